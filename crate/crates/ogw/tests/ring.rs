use std::collections::BTreeMap;

use num_traits::{One, Zero};
use ogw::novikov::{ClassGen, Cutoff, Monomial, NovikovError, Ring, Series, Var};
use ogw::rational::{frac, q};
use ogw::Q;
use proptest::prelude::*;

fn ring() -> Ring {
    let classes = vec![
        ClassGen { label: "a".into(), energy: q(1), maslov: 2, spherical: true, pairing: vec![q(0), q(2)] },
        ClassGen { label: "c".into(), energy: frac(3, 2), maslov: 0, spherical: false, pairing: vec![q(0), q(-1)] },
    ];
    Ring::new(3, classes, vec![0, 2]).unwrap()
}

type Exps = [u32; 5];

fn mono(e: &Exps) -> Monomial {
    Monomial { beta: vec![e[0], e[1]], s: e[2], t: vec![e[3], e[4]] }
}

fn terms() -> impl Strategy<Value = Vec<(Exps, i64, i64)>> {
    prop::collection::vec(([0u32..3, 0..3, 0..3, 0..3, 0..3], -6i64..7, 1i64..4), 0..6)
}

fn series(r: &Ring, raw: &[(Exps, i64, i64)], cutoff: Cutoff) -> Series {
    let mut s = Series::zero(cutoff);
    for (e, n, d) in raw {
        r.add_term(&mut s, mono(e), frac(*n, *d));
    }
    s
}

/// Polynomial product by explicit exponent addition, independent of the ring code.
fn oracle_mul(a: &[(Exps, i64, i64)], b: &[(Exps, i64, i64)]) -> BTreeMap<Exps, Q> {
    let collect = |raw: &[(Exps, i64, i64)]| {
        let mut m: BTreeMap<Exps, Q> = BTreeMap::new();
        for (e, n, d) in raw {
            *m.entry(*e).or_insert_with(Q::zero) += frac(*n, *d);
        }
        m
    };
    let (a, b) = (collect(a), collect(b));
    let mut out: BTreeMap<Exps, Q> = BTreeMap::new();
    for (ea, ca) in &a {
        for (eb, cb) in &b {
            let mut e = [0; 5];
            for i in 0..5 {
                e[i] = ea[i] + eb[i];
            }
            *out.entry(e).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn nu_of(e: &Exps) -> Q {
    q(e[0] as i64) + frac(3 * e[1] as i64, 2) + q((e[2] + e[3] + e[4]) as i64)
}

#[test]
fn gradings() {
    let r = ring();
    assert_eq!(r.s_degree(), -2);
    assert_eq!(r.t_degree(0), 2);
    assert_eq!(r.t_degree(1), 0);
    let m = mono(&[1, 1, 1, 1, 0]);
    assert_eq!(r.degree(&m), 2);
    assert_eq!(r.nu(&m), frac(9, 2));
    assert_eq!(r.pairing(&[2, 1], 1), q(3));
    assert!(!r.spherical(&[1, 1]));
    assert!(r.spherical(&[3, 0]));
}

#[test]
fn rejects_bad_rings() {
    assert!(Ring::new(4, vec![], vec![]).is_err());
    assert!(Ring::new(3, vec![], vec![1]).is_err());
    let odd = ClassGen { label: "o".into(), energy: q(1), maslov: 1, spherical: false, pairing: vec![] };
    assert!(Ring::new(3, vec![odd], vec![]).is_err());
}

#[test]
fn truncation_faults() {
    let r = ring();
    let s = r.monomial_series(r.s_mono(), q(2), Cutoff::finite(q(2)));
    assert_eq!(r.coefficient(&s, &r.s_mono()).unwrap(), q(2));
    assert_eq!(r.coefficient(&s, &r.t_mono(0)).unwrap(), q(0));
    let deep = mono(&[1, 0, 2, 0, 0]);
    assert!(matches!(r.coefficient(&s, &deep), Err(NovikovError::Truncation { .. })));
}

#[test]
fn zero_energy_class_is_not_sababa() {
    let free = ClassGen { label: "z".into(), energy: q(0), maslov: 0, spherical: false, pairing: vec![] };
    let r = Ring::new(3, vec![free], vec![]).unwrap();
    assert!(matches!(r.classes_up_to(&q(3)), Err(NovikovError::NonSababa(_))));
    assert!(matches!(r.generate_monoid(&[], &q(3)), Err(NovikovError::NonSababa(_))));
}

#[test]
fn monoid_matches_brute_force() {
    let r = ring();
    let cutoff = frac(7, 2);
    let gens = [r.monomial_series(r.s_mono(), q(1), Cutoff::Infinite)];
    let monoid = r.generate_monoid(&gens, &cutoff).unwrap();
    let mut expected = Vec::new();
    for a in 0..4 {
        for c in 0..3 {
            for s in 0..4 {
                for t0 in 0..4 {
                    for t1 in 0..4 {
                        let e = [a, c, s, t0, t1];
                        if nu_of(&e) <= cutoff {
                            expected.push(mono(&e));
                        }
                    }
                }
            }
        }
    }
    assert_eq!(monoid.elements.len(), expected.len());
    for m in &expected {
        assert!(monoid.elements.contains(m));
    }
    for w in monoid.elements.windows(2) {
        assert!(r.nu(&w[0]) <= r.nu(&w[1]));
    }
    for (l, nu) in monoid.levels.iter().enumerate() {
        assert!(monoid.level(l).iter().all(|m| r.nu(m) == *nu));
    }
}

proptest! {
    #[test]
    fn product_matches_oracle(a in terms(), b in terms()) {
        let r = ring();
        let prod = r.mul(&series(&r, &a, Cutoff::Infinite), &series(&r, &b, Cutoff::Infinite));
        let expected = oracle_mul(&a, &b);
        prop_assert_eq!(prod.terms.len(), expected.len());
        for (e, c) in expected {
            prop_assert_eq!(prod.get(&mono(&e)), c);
        }
    }

    #[test]
    fn ring_axioms(a in terms(), b in terms(), c in terms()) {
        let r = ring();
        let cut = Cutoff::finite(q(6));
        let (a, b, c) = (series(&r, &a, cut.clone()), series(&r, &b, cut.clone()), series(&r, &c, cut.clone()));
        prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
        prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
        prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
        let one = r.monomial_series(r.one(), Q::one(), cut.clone());
        prop_assert_eq!(r.mul(&a, &one), a.clone());
        prop_assert!(r.sub(&a, &a).is_zero());
    }

    #[test]
    fn stored_terms_respect_cutoff(a in terms(), b in terms(), k in 1i64..8) {
        let r = ring();
        let cut = Cutoff::finite(q(k));
        let p = r.mul(&series(&r, &a, cut.clone()), &series(&r, &b, Cutoff::Infinite));
        prop_assert_eq!(&p.cutoff, &cut);
        prop_assert!(p.terms.iter().all(|(m, c)| r.nu(m) <= q(k) && !c.is_zero()));
    }

    #[test]
    fn truncation_is_a_ring_map(a in terms(), b in terms(), k in 1i64..8) {
        let r = ring();
        let cut = Cutoff::finite(q(k));
        let (a, b) = (series(&r, &a, Cutoff::Infinite), series(&r, &b, Cutoff::Infinite));
        let lhs = r.truncate(&r.mul(&a, &b), &cut);
        let rhs = r.mul(&r.truncate(&a, &cut), &r.truncate(&b, &cut));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn valuation_is_additive(a in terms(), b in terms()) {
        let r = ring();
        let (a, b) = (series(&r, &a, Cutoff::Infinite), series(&r, &b, Cutoff::Infinite));
        let p = r.mul(&a, &b);
        match (r.valuation(&a), r.valuation(&b)) {
            (Some(x), Some(y)) => prop_assert_eq!(r.valuation(&p), Some(x + y)),
            _ => prop_assert!(p.is_zero()),
        }
    }

    #[test]
    fn grading_is_multiplicative(x in [0u32..3, 0..3, 0..3, 0..3, 0..3], y in [0u32..3, 0..3, 0..3, 0..3, 0..3]) {
        let r = ring();
        let (mx, my) = (mono(&x), mono(&y));
        let p = r.mono_mul(&mx, &my);
        prop_assert_eq!(r.degree(&p), r.degree(&mx) + r.degree(&my));
        prop_assert_eq!(r.nu(&p), r.nu(&mx) + r.nu(&my));
        prop_assert_eq!(r.mono_div(&p, &my), Some(mx));
    }

    #[test]
    fn leibniz_rule(a in terms(), b in terms(), var in 0usize..3) {
        let r = ring();
        let var = if var == 0 { Var::S } else { Var::T(var - 1) };
        let (a, b) = (series(&r, &a, Cutoff::Infinite), series(&r, &b, Cutoff::Infinite));
        let lhs = r.derive(&r.mul(&a, &b), var);
        let rhs = r.add(&r.mul(&r.derive(&a, var), &b), &r.mul(&a, &r.derive(&b, var)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivatives_commute(a in terms()) {
        let r = ring();
        let a = series(&r, &a, Cutoff::finite(q(7)));
        prop_assert_eq!(r.derive(&r.derive(&a, Var::S), Var::T(1)), r.derive(&r.derive(&a, Var::T(1)), Var::S));
    }

    #[test]
    fn type_d_projection_commutes_with_interior_derivatives(a in terms(), j in 0usize..2) {
        let r = ring();
        let a = series(&r, &a, Cutoff::Infinite);
        let d = r.type_d_projection(&a);
        prop_assert_eq!(r.type_d_projection(&d), d.clone());
        prop_assert_eq!(r.derive(&d, Var::T(j)), r.type_d_projection(&r.derive(&a, Var::T(j))));
        prop_assert!(d.terms.keys().all(|m| m.s == 0 && r.spherical(&m.beta)));
    }

    #[test]
    fn sababa_order_is_total_and_follows_valuation(x in [0u32..3, 0..3, 0..3, 0..3, 0..3], y in [0u32..3, 0..3, 0..3, 0..3, 0..3]) {
        let r = ring();
        let (mx, my) = (mono(&x), mono(&y));
        let ord = r.sababa_cmp(&mx, &my);
        prop_assert_eq!(ord == std::cmp::Ordering::Equal, mx == my);
        prop_assert_eq!(ord.reverse(), r.sababa_cmp(&my, &mx));
        if r.nu(&mx) < r.nu(&my) {
            prop_assert_eq!(ord, std::cmp::Ordering::Less);
        }
    }
}
