use frob7_core::operators::appendix::{identities, verify_appendix, Group};
use frob7_core::operators::recurrence::{appendix_seeds, check_bounds, reproduce_seeds_downward};
use frob7_core::operators::{
    decompose, derive_recurrence, extend_tables, u7_image, BasisTriple, LaurentPoly, Multiplier,
};

#[test]
fn all_appendix_identities_hold() {
    let verdicts = verify_appendix(&Group::ALL, 500).unwrap();
    assert_eq!(verdicts.len(), 42);
    for v in &verdicts {
        assert!(v.ok(), "{}", serde_json::to_string(v).unwrap());
        assert!(v.terms_verified >= 500 && v.bound_used >= 500);
    }
}

#[test]
fn seeds_meet_row_bounds_where_stated() {
    // the bounds are stated for k >= 0; the k = 0 seeds must satisfy them
    for id in identities().into_iter().filter(|i| i.k == 0) {
        check_bounds(id.group.multiplier(), 0, &id.rhs).unwrap();
    }
}

#[test]
fn tables_extend_and_reproduce_seeds() {
    let basis = BasisTriple::plain(260).unwrap();
    let table = derive_recurrence(&basis, 200).unwrap();
    let seeds = appendix_seeds();
    let tables = extend_tables(&table, &seeds, 10, &basis).unwrap();
    for m in Multiplier::ALL {
        for k in 0..=10 {
            assert!(tables.row(m, k).unwrap().is_integral());
        }
    }
    for m in [Multiplier::One, Multiplier::P1, Multiplier::P2] {
        assert_eq!(reproduce_seeds_downward(&table, m, &seeds, &basis).unwrap(), None, "{m:?}");
    }
}

#[test]
fn decomposition_is_linear_under_u7() {
    let basis = BasisTriple::plain(160).unwrap();
    let x = u7_image(Multiplier::P1, -2, 150).unwrap();
    let y = u7_image(Multiplier::A, -3, 150).unwrap();
    let dx = decompose(&x, &basis, -1..=3).unwrap();
    let dy = decompose(&y, &basis, -1..=3).unwrap();
    let dxy = decompose(&(&x + &y), &basis, -1..=3).unwrap();
    assert!(dxy.same_parts(&dx.add(&dy)));
}

#[test]
fn u7_of_a_matches_printed_group_i() {
    let basis = BasisTriple::plain(160).unwrap();
    let target = u7_image(Multiplier::A, 0, 150).unwrap();
    let d = decompose(&target, &basis, 0..=8).unwrap();
    assert_eq!(d.part1.coeff(1), LaurentPoly::from_ints(&[(1, 784)]).coeff(1));
    assert_eq!(d.part1.coeff(2), LaurentPoly::from_ints(&[(2, 7148 * 49)]).coeff(2));
    assert_eq!(d.part2.coeff(0), LaurentPoly::from_ints(&[(0, 98)]).coeff(0));
    assert_eq!(d.part3.coeff(0), LaurentPoly::from_ints(&[(0, 98)]).coeff(0));
}
