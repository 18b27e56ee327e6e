mod props;

use proptest::prelude::*;

proptest! {
    #[test]
    fn series_form_a_ring(a in props::series(), b in props::series(), c in props::series()) {
        props::ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn u_inverts_substitution(a in props::series(), m in 1u64..=9) {
        props::u_undoes_substitute(&a, m)?;
    }

    #[test]
    fn decompositions_round_trip(parts in props::parts()) {
        props::decomposition_round_trip(&parts)?;
    }
}

#[test]
fn lambda_is_minimal_to_eighth_power() {
    props::lambda_minimal(8).unwrap();
}
