mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use quadunits::form_class::{self, BinaryQuadraticForm, ClassGroup, FormError, Trichotomy};
use quadunits::quadfield::RealQuadratic;

fn fundamental_fields(max_disc: i64) -> Vec<(i64, i64)> {
    common::squarefree_upto(max_disc)
        .into_iter()
        .map(|d| (d, common::disc_of(d)))
        .filter(|&(_, disc)| disc <= max_disc)
        .collect()
}

fn order_statistics(cls: &ClassGroup) -> BTreeMap<u64, usize> {
    let g = cls.cayley();
    let mut hist = BTreeMap::new();
    for x in 0..g.order() {
        *hist.entry(g.element_order(x)).or_insert(0) += 1;
    }
    hist
}

#[test]
fn group_laws_and_structure_up_to_5000() {
    for (d, disc) in fundamental_fields(5000) {
        let cls = ClassGroup::new(disc).unwrap();
        let g = cls.cayley();
        let n = g.order();
        let e = cls.identity();
        assert_eq!(cls.representative(e), BinaryQuadraticForm::principal(disc).reduce().unwrap().cycle().into_iter().min().unwrap());
        for x in 0..n {
            assert_eq!(g.op(e, x), x, "identity, D = {disc}");
            let inv = cls.class_of(&cls.representative(x).inverse()).unwrap();
            assert_eq!(g.op(x, inv), e, "inverse, D = {disc}");
            for y in 0..n {
                assert_eq!(g.op(x, y), g.op(y, x), "commutativity, D = {disc}");
                for z in 0..n {
                    assert_eq!(g.op(g.op(x, y), z), g.op(x, g.op(y, z)), "associativity, D = {disc}");
                }
            }
        }
        // a finite abelian group is determined by its order statistics
        let structure = cls.structure();
        assert_eq!(structure.order(), n as u64);
        assert_eq!(order_statistics(&cls), common::model_order_statistics(&structure.invariant_factors), "d = {d}");
        // genus theory
        assert_eq!(structure.rank2() + 1, common::prime_divisor_count(disc as u64), "d = {d}");
    }
}

#[test]
fn every_reduced_form_lies_in_exactly_one_cycle() {
    for (_, disc) in fundamental_fields(2000) {
        let cycles = form_class::enumerate_classes(disc).unwrap();
        let mut seen = std::collections::HashSet::new();
        for c in &cycles {
            for f in c {
                assert!(f.is_reduced());
                assert!(seen.insert(*f), "{f} appears twice for D = {disc}");
            }
        }
        // independent enumeration of reduced forms over the whole box
        let s = (disc as f64).sqrt() as i64 + 1;
        let mut count = 0;
        for b in 1..=s {
            for a in -s..=s {
                if a == 0 || (b * b - disc) % (4 * a) != 0 {
                    continue;
                }
                let f = BinaryQuadraticForm::new(a, b, (b * b - disc) / (4 * a));
                if f.disc() == disc && f.is_reduced() {
                    count += 1;
                }
            }
        }
        assert_eq!(count, seen.len(), "D = {disc}");
    }
}

#[test]
fn reduction_is_a_proper_equivalence() {
    for disc in [12i64, 40, 60, 85, 120, 136, 145] {
        let cls = ClassGroup::new(disc).unwrap();
        for a in -6i64..=6 {
            for b in -12i64..=12 {
                if a == 0 || (b * b - disc) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - disc) / (4 * a);
                if c == 0 || c.abs() > 40 {
                    continue;
                }
                let f = BinaryQuadraticForm::new(a, b, c);
                let r = f.reduce().unwrap();
                assert!(r.is_reduced());
                // some form in the cycle of r is reached from f by a small matrix
                let cycle = r.cycle();
                let hit = cycle.iter().any(|g| common::properly_equivalent_by_search((a, b, c), (g.a, g.b, g.c), 6));
                assert!(hit, "{f} not visibly equivalent to its reduction {r} (D = {disc})");
                assert_eq!(cls.class_of(&f).unwrap(), cls.class_of(&r).unwrap());
            }
        }
    }
}

#[test]
fn class_counts_for_known_discriminants() {
    let h_plus = |disc| form_class::enumerate_classes(disc).unwrap().len();
    assert_eq!(h_plus(12), 2);
    assert_eq!(h_plus(8), 1);
    assert_eq!(h_plus(136), 4);
    assert_eq!(h_plus(120), 4);
    assert_eq!(ClassGroup::new(136).unwrap().structure().invariant_factors, vec![4]);
    assert_eq!(ClassGroup::new(120).unwrap().structure().invariant_factors, vec![2, 2]);
    assert_eq!(BinaryQuadraticForm::new(1, 0, -4).reduce(), Err(FormError::SquareDiscriminant(16)));
    // classical wide class numbers
    for (d, h) in [(79, 3), (82, 4), (229, 3), (257, 3), (226, 8), (10, 2), (15, 2), (65, 2)] {
        let r = form_class::rank_report(&RealQuadratic::new(d).unwrap()).unwrap();
        assert_eq!(r.h, h, "h(Q(√{d}))");
    }
}

#[test]
fn cyclic_class_group_of_order_four() {
    let cls = ClassGroup::new(136).unwrap();
    let g = cls.cayley();
    let gen = (0..4).find(|&x| g.element_order(x) == 4).unwrap();
    let mut acc = gen;
    for _ in 0..3 {
        acc = cls.compose(acc, gen);
    }
    assert_eq!(acc, cls.identity());
}

#[test]
fn rank_relations_up_to_5000() {
    let mut seen = [0usize; 3];
    for (d, _) in fundamental_fields(5000) {
        let k = RealQuadratic::new(d).unwrap();
        let r = form_class::rank_report(&k).unwrap();
        assert!(r.four_rank_plus as i64 >= (r.rho_inf + r.rho) as i64 - r.rho_plus as i64, "d = {d}");
        assert!(r.rho_plus <= r.rho + 1, "d = {d}");
        assert_eq!(r.h_plus, r.h << r.rho_inf, "d = {d}");
        // −1 is a norm iff no prime ≡ 3 mod 4 divides d
        let no_bad_prime = common::prime_divisors(d as u64).into_iter().all(|p| p == 2 || p % 4 == 1);
        assert_eq!(r.omega_exists, no_bad_prime, "d = {d}");
        match r.trichotomy() {
            Trichotomy::UnitNormMinusOne => {
                seen[0] += 1;
                assert_eq!(r.narrow, r.wide);
            }
            Trichotomy::NoNormMinusOne => {
                seen[1] += 1;
                assert!(r.rho_plus == r.rho + 1 && r.splits);
            }
            Trichotomy::ElementWithoutUnit => {
                seen[2] += 1;
                assert!(r.h_plus == 2 * r.h && r.rho_plus == r.rho);
            }
        }
    }
    assert!(seen.iter().all(|&n| n > 10), "{seen:?}");
}

#[test]
fn worked_rank_examples() {
    let r = form_class::rank_report(&RealQuadratic::new(34).unwrap()).unwrap();
    assert_eq!(r.narrow.invariant_factors, vec![4]);
    assert_eq!(r.wide.invariant_factors, vec![2]);
    assert_eq!((r.rho, r.rho_plus, r.rho_inf, r.four_rank_plus, r.splits), (1, 1, 1, 1, false));
    assert_eq!(r.trichotomy(), Trichotomy::ElementWithoutUnit);

    let r = form_class::rank_report(&RealQuadratic::new(30).unwrap()).unwrap();
    assert_eq!(r.narrow.invariant_factors, vec![2, 2]);
    assert_eq!((r.rho, r.rho_plus, r.rho_inf, r.four_rank_plus, r.splits), (1, 2, 1, 0, true));

    let r = form_class::rank_report(&RealQuadratic::new(33).unwrap()).unwrap();
    assert_eq!((r.h, r.h_plus), (1, 2));
    assert!(r.wide.invariant_factors.is_empty());

    let r = form_class::rank_report(&RealQuadratic::new(2).unwrap()).unwrap();
    assert_eq!((r.rho, r.rho_plus, r.rho_inf, r.four_rank_plus, r.h_plus), (0, 0, 0, 0, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn composition_respects_classes(idx in 0usize..400, i in 0usize..64, j in 0usize..64) {
        let fields = fundamental_fields(3000);
        let (_, disc) = fields[idx % fields.len()];
        let cls = ClassGroup::new(disc).unwrap();
        let n = cls.order();
        let (x, y) = (i % n, j % n);
        // compose non-canonical members of the cycles
        let f = *cls.cycles()[x].iter().filter(|f| f.a > 0).last().unwrap();
        let g = *cls.cycles()[y].iter().filter(|f| f.a > 0).next().unwrap();
        let h = form_class::compose_forms(&f, &g).unwrap();
        prop_assert_eq!(cls.class_of(&h).unwrap(), cls.compose(x, y));
        prop_assert_eq!(h.disc(), disc);
    }
}
