//! Synthetic q-operators satisfying every structural property exactly.
//!
//! Levels `(β, r)` with `β ≠ β₀` and `r` supported on classes that are neither the
//! unit nor a divisor are generated in order of valuation. At each level the new
//! operators only compose with the energy-zero ones, so the A∞ relation is linear in
//! them. Unknowns are the pairings `⟨q_k(α), w⟩` on tuples of odd forms, identified
//! along signed cyclic orbits, plus `q_0`. Restricting to odd inputs keeps every
//! composition of two generated operators zero, so each level is a homogeneous
//! linear system. A random point of its solution space is chosen; divisor levels and
//! point data follow.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::verify::{compose_into, real_sign, OpEntry, OpTable};
use super::{multiset, QOperators, QopsError};
use crate::linalg::{invert, Reducer, Row};
use crate::novikov::{Beta, Monomial};
use crate::rational::{multi_factorial, q};
use crate::setting::Setting;
use crate::Q;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    pub cutoff: Q,
    pub max_arity: usize,
    /// Impose the reversal identities of a real structure.
    pub real: bool,
}

struct Level {
    beta: Beta,
    r: Vec<u32>,
    mono: Monomial,
}

pub fn synth_qdata(setting: &Setting, params: &SynthParams) -> Result<QOperators, QopsError> {
    let ring = &setting.ring;
    let model = &setting.model;
    let n = setting.n() as i64;
    let k_max = params.max_arity;
    if params.real && !setting.interior.is_real() {
        return Err(QopsError::Invalid("real synthesis needs interior classes with involution eigenvalues".into()));
    }
    let ginv = invert(&model.pairing_matrix()).ok_or_else(|| QopsError::Invalid("degenerate pairing".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut store = QOperators::classical(params.cutoff.clone(), k_max);

    let b0 = ring.beta_zero();
    let free = setting.free_indices();
    let divisors = setting.divisor_indices();
    let classes = ring.classes_up_to(&params.cutoff).map_err(|e| QopsError::Invalid(e.to_string()))?;
    let mut levels = Vec::new();
    for beta in classes.into_iter().filter(|b| *b != b0) {
        let room = &params.cutoff - ring.energy(&beta);
        for r in count_vectors(ring.num_interior(), &free, &room) {
            let mono = Monomial { beta: beta.clone(), s: 0, t: r.clone() };
            levels.push(Level { beta: beta.clone(), r, mono });
        }
    }
    levels.sort_by(|a, b| {
        (ring.nu(&a.mono), ring.energy(&a.beta), &a.beta, &a.r).cmp(&(ring.nu(&b.mono), ring.energy(&b.beta), &b.beta, &b.r))
    });

    let classical = {
        let alg = super::assemble(setting, &QOperators::classical(params.cutoff.clone(), k_max));
        let l = alg.levels.iter().find(|l| l.mono == ring.one()).expect("classical level");
        OpTable::from_ops(&l.ops)
    };
    let mut known: Vec<(Monomial, OpTable)> = vec![(ring.one(), classical)];
    let mut known_index: HashMap<Monomial, usize> = HashMap::new();
    known_index.insert(ring.one(), 0);

    // Generated operators only see odd inputs, so by cyclicity their outputs are even
    // and any composition of two of them vanishes.
    let odd: Vec<usize> = (0..model.dim()).filter(|&a| model.degrees[a] % 2 == 1).collect();
    let deg = |a: usize| model.degrees[a] as i64;

    for level in &levels {
        let mu = ring.maslov(&level.beta);
        let big_r: i64 = level.r.iter().enumerate().map(|(j, &c)| c as i64 * ring.t_degree(j)).sum();
        let mut tup: HashMap<Vec<usize>, Option<(usize, Q)>> = HashMap::new();
        let mut num_vars = 0usize;
        for k in 1..=k_max {
            let target = n - 2 + k as i64 + mu + big_r;
            for t in tuples_with_sum(&odd, k + 1, target, &deg) {
                if tup.contains_key(&t) {
                    continue;
                }
                match cyclic_orbit(&t, &deg) {
                    None => {
                        let mut cur = t.clone();
                        for _ in 0..=k {
                            tup.insert(cur.clone(), None);
                            cur.rotate_right(1);
                        }
                    }
                    Some(orbit) => {
                        let v = num_vars;
                        num_vars += 1;
                        for (u, s) in orbit {
                            tup.insert(u, Some((v, s)));
                        }
                    }
                }
            }
        }
        let mut entries: BTreeMap<usize, BTreeMap<Vec<usize>, BTreeMap<usize, Row>>> = BTreeMap::new();
        for (t, slot) in &tup {
            let Some((v, s)) = slot else { continue };
            let k = t.len() - 1;
            let (alpha, w) = (&t[..k], t[k]);
            let e = entries.entry(k).or_default().entry(alpha.to_vec()).or_default();
            for (u, g) in ginv[w].iter().enumerate() {
                if !g.is_zero() {
                    e.entry(u).or_default().add(*v, s * g);
                }
            }
        }
        let out_degree = 2 - mu - big_r;
        if (0..n).contains(&out_degree) {
            for u in model.of_degree(out_degree as u32) {
                let e = entries.entry(0).or_default().entry(vec![]).or_default();
                e.entry(u).or_default().add(num_vars, Q::one());
                num_vars += 1;
            }
        }
        let table = OpTable::new(
            entries
                .iter()
                .map(|(&k, m)| {
                    let list = m
                        .iter()
                        .map(|(inputs, out)| OpEntry {
                            inputs: inputs.clone(),
                            out: out.iter().filter(|(_, r)| !r.is_trivial()).map(|(u, r)| (*u, r.clone())).collect(),
                        })
                        .collect();
                    (k, list)
                })
                .collect(),
        );

        let mut acc: BTreeMap<(Vec<usize>, usize), Row> = BTreeMap::new();
        compose_into(&known[0].1, &table, &model.degrees, k_max, &mut acc);
        compose_into(&table, &known[0].1, &model.degrees, k_max, &mut acc);
        for (ma, ta) in known.iter().skip(1) {
            let Some(mb) = ring.mono_div(&level.mono, ma) else { continue };
            let Some(&ib) = known_index.get(&mb) else { continue };
            if ib == 0 {
                continue;
            }
            compose_into(ta, &known[ib].1, &model.degrees, k_max, &mut acc);
        }
        let mut red = Reducer::new();
        let infeasible = || QopsError::Infeasible(ring.fmt_mono(&level.mono));
        for row in acc.into_values() {
            red.insert(row).map_err(|_| infeasible())?;
        }
        if params.real {
            for m in entries.values() {
                for (alpha, out) in m {
                    let rev: Vec<usize> = alpha.iter().rev().cloned().collect();
                    let s = real_sign(setting, &level.beta, &level.r, alpha);
                    let other = m.get(&rev);
                    for u in 0..model.dim() {
                        let mut row = out.get(&u).cloned().unwrap_or_default();
                        if let Some(r2) = other.and_then(|o| o.get(&u)) {
                            row.add_row(r2, &-s.clone());
                        }
                        if !row.is_trivial() {
                            red.insert(row).map_err(|_| infeasible())?;
                        }
                    }
                }
            }
        }
        let values = red.solve(num_vars, |_| q(rng.gen_range(-3..=3)));

        let mut ops: BTreeMap<usize, BTreeMap<Vec<usize>, Vec<(usize, Q)>>> = BTreeMap::new();
        let rfact = multi_factorial(&level.r);
        let interior = multiset(&level.r);
        for (&k, m) in &entries {
            for (alpha, out) in m {
                let mut v: Vec<(usize, Q)> = Vec::new();
                for (u, row) in out {
                    let x = evaluate(row, &values);
                    if !x.is_zero() {
                        v.push((*u, x));
                    }
                }
                if v.is_empty() {
                    continue;
                }
                for (u, x) in &v {
                    store.set(level.beta.clone(), interior.clone(), alpha.clone(), *u, x * &rfact);
                }
                ops.entry(k).or_default().insert(alpha.clone(), v);
            }
        }
        if mu + big_r == 3 - n {
            let x = q(rng.gen_range(-3..=3));
            if !x.is_zero() {
                store.point.insert((level.beta.clone(), interior.clone()), x);
            }
        }
        known_index.insert(level.mono.clone(), known.len());
        known.push((level.mono.clone(), OpTable::from_ops(&ops)));
    }

    materialize_divisors(setting, &mut store, &divisors);
    Ok(store)
}

fn evaluate(row: &Row, values: &[Q]) -> Q {
    let mut x = row.constant.clone();
    for (v, c) in &row.coeffs {
        x += c * &values[*v];
    }
    x
}

/// `q^{β, r+d} = ∏ (∫_β γ_i)^{d_i} q^{β, r}` for divisor multiplicities `d`.
fn materialize_divisors(setting: &Setting, store: &mut QOperators, divisors: &[usize]) {
    if divisors.is_empty() {
        return;
    }
    let ring = &setting.ring;
    let nint = ring.num_interior();
    let cutoff = store.meta.cutoff.clone();
    let disk: Vec<_> = store.disk.iter().map(|(k, t)| (k.clone(), t.clone())).collect();
    for (key, tensor) in disk {
        let r = super::counts(&key.interior, nint);
        let room = &cutoff - ring.nu(&Monomial { beta: key.beta.clone(), s: 0, t: r.clone() });
        for d in count_vectors(nint, divisors, &room) {
            if d.iter().all(|&c| c == 0) {
                continue;
            }
            let factor = divisor_factor(setting, &key.beta, &d);
            if factor.is_zero() {
                continue;
            }
            let upper: Vec<u32> = r.iter().zip(&d).map(|(a, b)| a + b).collect();
            for (inputs, v) in &tensor {
                for (u, c) in v {
                    store.set(key.beta.clone(), multiset(&upper), inputs.clone(), *u, c * &factor);
                }
            }
        }
    }
    let points: Vec<_> = store.point.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    for ((beta, interior), x) in points {
        let r = super::counts(&interior, nint);
        let room = &cutoff - ring.nu(&Monomial { beta: beta.clone(), s: 0, t: r.clone() });
        for d in count_vectors(nint, divisors, &room) {
            if d.iter().all(|&c| c == 0) {
                continue;
            }
            let factor = divisor_factor(setting, &beta, &d);
            if factor.is_zero() {
                continue;
            }
            let upper: Vec<u32> = r.iter().zip(&d).map(|(a, b)| a + b).collect();
            store.point.insert((beta.clone(), multiset(&upper)), &x * factor);
        }
    }
}

fn divisor_factor(setting: &Setting, beta: &Beta, d: &[u32]) -> Q {
    let mut f = Q::one();
    for (i, &c) in d.iter().enumerate() {
        for _ in 0..c {
            f *= setting.ring.pairing(beta, i);
        }
    }
    f
}

/// Multiplicity vectors supported on `support` with total at most `room`.
fn count_vectors(len: usize, support: &[usize], room: &Q) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if room < &Q::zero() {
        return out;
    }
    let max = room.floor().to_integer();
    let max: u32 = max.try_into().unwrap_or(u32::MAX);
    fn rec(support: &[usize], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((&j, rest)) = support.split_first() else {
            out.push(cur.clone());
            return;
        };
        for c in 0..=left {
            cur[j] = c;
            rec(rest, left - c, cur, out);
        }
        cur[j] = 0;
    }
    rec(support, max, &mut vec![0; len], &mut out);
    out
}

fn tuples_with_sum(basis: &[usize], len: usize, target: i64, deg: &dyn Fn(usize) -> i64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let min = basis.iter().map(|&a| deg(a)).min().unwrap_or(0);
    let max = basis.iter().map(|&a| deg(a)).max().unwrap_or(0);
    fn rec(
        basis: &[usize],
        len: usize,
        left: i64,
        bounds: (i64, i64),
        deg: &dyn Fn(usize) -> i64,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let rem = (len - cur.len()) as i64;
        if left < rem * bounds.0 || left > rem * bounds.1 {
            return;
        }
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for &a in basis {
            cur.push(a);
            rec(basis, len, left - deg(a), bounds, deg, cur, out);
            cur.pop();
        }
    }
    if !basis.is_empty() {
        rec(basis, len, target, (min, max), deg, &mut Vec::new(), &mut out);
    }
    out
}

/// Rotations of `t` with the sign relating their pairings to that of `t`; `None` when
/// the orbit forces the pairing to vanish.
fn cyclic_orbit(t: &[usize], deg: &dyn Fn(usize) -> i64) -> Option<Vec<(Vec<usize>, Q)>> {
    let mut seen: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    let mut cur = t.to_vec();
    let mut s = Q::one();
    seen.insert(cur.clone(), s.clone());
    loop {
        let k = cur.len() - 1;
        let e: i64 = (deg(cur[k]) + 1) * cur[..k].iter().map(|&a| deg(a) + 1).sum::<i64>();
        if e % 2 != 0 {
            s = -s;
        }
        cur.rotate_right(1);
        if let Some(prev) = seen.get(&cur) {
            return (prev == &s).then(|| seen.into_iter().collect());
        }
        seen.insert(cur.clone(), s.clone());
    }
}
