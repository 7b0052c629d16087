use logcirc::arith;
use logcirc::classgrp::{self, Effort, QuadRelations};
use logcirc::quadratic::QuadField;
use logcirc::AbelianField;

/// `(d, D, h⁺, h)` from the reduced-forms oracle.
fn table() -> Vec<(u64, u64, u64, u64)> {
    include_str!("fixtures/quadratic_forms.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let v: Vec<u64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2], v[3])
        })
        .collect()
}

#[test]
fn fixture_covers_every_squarefree_d() {
    let ds: Vec<u64> = table().iter().map(|r| r.0).collect();
    let expected: Vec<u64> = (2..=299).filter(|&d| arith::is_squarefree(d)).collect();
    assert_eq!(ds, expected);
}

#[test]
fn class_numbers_match_reduced_forms() {
    for (d, disc, h_plus, h) in table() {
        let q = QuadField::new(d).unwrap();
        assert_eq!(classgrp::discriminant(&AbelianField::quadratic(d).unwrap()), disc.into(), "d = {d}");
        assert_eq!(q.narrow_class_number(), h_plus, "d = {d}");
        assert_eq!(q.class_number(), h, "d = {d}");
    }
}

#[test]
fn three_parts_of_class_groups_match() {
    for (d, _, _, h) in table() {
        let q = QuadField::new(d).unwrap();
        let rel = QuadRelations::collect(&q, 3, Effort::default()).unwrap();
        let cl = rel.class_group(8);
        let expected = arith::factor(h).iter().find(|x| x.0 == 3).map_or(0, |x| x.1);
        assert_eq!(cl.order_exponent(), expected, "d = {d}");
        assert_eq!(rel.class_number, h, "d = {d}");
    }
}
