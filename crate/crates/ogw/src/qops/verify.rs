//! Exact verifiers for the structural properties of q-operators. Each returns a
//! [`Report`] with the number of checked slots and, on failure, a witness.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::{assemble, counts, eval_point, eval_q, multiset, Assembled, DiskKey, QOperators};
use crate::cochain::Sparse;
use crate::linalg::Row;
use crate::novikov::{Beta, Monomial};
use crate::rational::sign;
use crate::setting::Setting;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

impl Report {
    pub fn new(name: &'static str) -> Self {
        Report { name, passed: true, checked: 0, witness: None }
    }

    pub fn fail(&mut self, witness: String) {
        if self.passed {
            self.passed = false;
            self.witness = Some(witness);
        }
    }

    /// Records one checked slot; the first failure supplies the witness.
    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(witness());
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} checks)", self.name, self.checked)?;
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

/// Operator entries with affine outputs; used both for exact checks (constant rows)
/// and for the generator's linear systems.
pub(crate) struct OpEntry {
    pub inputs: Vec<usize>,
    pub out: Vec<(usize, Row)>,
}

pub(crate) struct OpTable {
    pub by_arity: BTreeMap<usize, Vec<OpEntry>>,
    index: HashMap<(usize, usize, usize), Vec<usize>>,
}

impl OpTable {
    pub fn new(by_arity: BTreeMap<usize, Vec<OpEntry>>) -> Self {
        let mut index: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
        for (&k, entries) in &by_arity {
            for (ei, e) in entries.iter().enumerate() {
                for (pos, &b) in e.inputs.iter().enumerate() {
                    index.entry((k, pos, b)).or_default().push(ei);
                }
            }
        }
        OpTable { by_arity, index }
    }

    pub fn from_ops(ops: &BTreeMap<usize, BTreeMap<Vec<usize>, Sparse>>) -> Self {
        let by_arity = ops
            .iter()
            .map(|(&k, t)| {
                let entries = t
                    .iter()
                    .map(|(inputs, v)| OpEntry {
                        inputs: inputs.clone(),
                        out: v.iter().map(|(i, c)| (*i, const_row(c.clone()))).collect(),
                    })
                    .collect();
                (k, entries)
            })
            .collect();
        OpTable::new(by_arity)
    }
}

pub(crate) fn const_row(c: Q) -> Row {
    let mut r = Row::new();
    r.constant = c;
    r
}

/// Product of two affine rows, at least one of them constant.
pub(crate) fn mul_rows(a: &Row, b: &Row) -> Row {
    let (c, lin) = if a.coeffs.is_empty() {
        (&a.constant, b)
    } else {
        assert!(b.coeffs.is_empty(), "quadratic term in a linear system");
        (&b.constant, a)
    };
    let mut out = Row::new();
    out.add_row(lin, c);
    out
}

/// Accumulates `m_{k1}(α_1, …, m_{k2}(…), …)` with the A∞ sign for every way of
/// feeding an `inner` output into an `outer` slot, keyed by the full input tuple and
/// output basis index.
pub(crate) fn compose_into(
    outer: &OpTable,
    inner: &OpTable,
    degrees: &[u32],
    k_limit: usize,
    acc: &mut BTreeMap<(Vec<usize>, usize), Row>,
) {
    for (&k2, entries2) in &inner.by_arity {
        for e2 in entries2 {
            for (j, val2) in &e2.out {
                for (&k1, entries1) in &outer.by_arity {
                    if k1 == 0 || k1 + k2 - 1 > k_limit {
                        continue;
                    }
                    for pos in 0..k1 {
                        let Some(list) = outer.index.get(&(k1, pos, *j)) else { continue };
                        for &ei in list {
                            let e1 = &entries1[ei];
                            let mut alpha = Vec::with_capacity(k1 + k2 - 1);
                            alpha.extend_from_slice(&e1.inputs[..pos]);
                            alpha.extend_from_slice(&e2.inputs);
                            alpha.extend_from_slice(&e1.inputs[pos + 1..]);
                            let s: i64 = e1.inputs[..pos].iter().map(|&a| degrees[a] as i64 + 1).sum();
                            let prod = mul_rows(val2, &const_row(sign(s)));
                            for (u, val1) in &e1.out {
                                let term = mul_rows(val1, &prod);
                                acc.entry((alpha.clone(), *u)).or_default().add_row(&term, &Q::one());
                            }
                        }
                    }
                }
            }
        }
    }
}

fn fmt_tuple(setting: &Setting, t: &[usize]) -> String {
    let labels: Vec<&str> = t.iter().map(|&i| setting.model.labels[i].as_str()).collect();
    format!("({})", labels.join(","))
}

fn fmt_level(setting: &Setting, beta: &Beta, r: &[u32]) -> String {
    setting.ring.fmt_mono(&Monomial { beta: beta.clone(), s: 0, t: r.to_vec() })
}

fn is_special(zero_class: bool, k: usize, l: usize) -> bool {
    zero_class && matches!((k, l), (1, 0) | (2, 0) | (0, 1))
}

/// `Σ_k m_{k1}(…, m_{k2}(…), …) = 0` at every level within the store cutoff and every
/// basis tuple of length at most `k_max`.
pub fn verify_a_infinity(setting: &Setting, q: &QOperators, k_max: usize) -> Report {
    let alg = assemble(setting, q);
    verify_a_infinity_assembled(setting, &alg, k_max)
}

pub(crate) fn verify_a_infinity_assembled(setting: &Setting, alg: &Assembled, k_max: usize) -> Report {
    let mut report = Report::new("a_infinity");
    let ring = &setting.ring;
    let k_limit = k_max.min(alg.meta.max_arity);
    let tables: Vec<OpTable> = alg.levels.iter().map(|l| OpTable::from_ops(&l.ops)).collect();
    let mut residual: BTreeMap<Monomial, BTreeMap<(Vec<usize>, usize), Row>> = BTreeMap::new();
    for (i1, l1) in alg.levels.iter().enumerate() {
        for (i2, l2) in alg.levels.iter().enumerate() {
            let mono = ring.mono_mul(&l1.mono, &l2.mono);
            if ring.nu(&mono) > alg.meta.cutoff {
                continue;
            }
            let acc = residual.entry(mono).or_default();
            compose_into(&tables[i1], &tables[i2], &setting.model.degrees, k_limit, acc);
        }
    }
    let mut order: Vec<&Monomial> = residual.keys().collect();
    order.sort_by(|a, b| ring.sababa_cmp(a, b));
    for mono in order {
        for ((alpha, u), row) in &residual[mono] {
            report.check(row.constant.is_zero(), || {
                format!(
                    "level {} inputs {} component {}: residual {}",
                    ring.fmt_mono(mono),
                    fmt_tuple(setting, alpha),
                    setting.model.labels[*u],
                    row.constant
                )
            });
        }
    }
    report
}

/// Degree-0 inputs annihilate every operator except `d` and the wedge, which act by
/// multiplication.
pub fn verify_unit(setting: &Setting, q: &QOperators) -> Report {
    let mut report = Report::new("unit");
    let model = &setting.model;
    let b0 = setting.ring.beta_zero();
    for (key, tensor) in &q.disk {
        let zero_class = key.beta == b0;
        if is_special(zero_class, key.k, key.interior.len()) {
            continue;
        }
        for (inputs, v) in tensor {
            if let Some(p) = inputs.iter().position(|&a| model.degrees[a] == 0) {
                report.check(v.is_empty(), || {
                    format!(
                        "{} with degree-0 input {} at slot {} is nonzero",
                        fmt_key(setting, key),
                        model.labels[inputs[p]],
                        p + 1
                    )
                });
            }
        }
    }
    for f in model.of_degree(0) {
        report.check(eval_q(setting, q, &b0, &[f], &[]) == model.d_vec(&model.basis_vec(f)), || {
            format!("q_1,0 on {} differs from d", model.labels[f])
        });
        for a in 0..model.dim() {
            let fv = model.basis_vec(f);
            let av = model.basis_vec(a);
            let left = eval_q(setting, q, &b0, &[f, a], &[]);
            report.check(left == model.wedge_vec(&fv, &av), || {
                format!("q_2,0({}, {}) ≠ f·α", model.labels[f], model.labels[a])
            });
            let right = eval_q(setting, q, &b0, &[a, f], &[]);
            let s = sign(model.degrees[a] as i64);
            let expected: Vec<Q> = model.wedge_vec(&fv, &av).iter().map(|c| c * &s).collect();
            report.check(right == expected, || {
                format!("q_2,0({}, {}) ≠ (-1)^|α| f·α", model.labels[a], model.labels[f])
            });
        }
    }
    report
}

fn fmt_key(setting: &Setting, key: &DiskKey) -> String {
    let r = counts(&key.interior, setting.ring.num_interior());
    format!("q_{},{} at {}", key.k, key.interior.len(), fmt_level(setting, &key.beta, &r))
}

/// `⟨q(α_1..α_k), α_{k+1}⟩ = (−1)^{(|α_{k+1}|+1)Σ(|α_j|+1)} ⟨q(α_{k+1}, α_1..α_{k−1}), α_k⟩`.
pub fn verify_cyclic(setting: &Setting, q: &QOperators, k_max: usize) -> Report {
    let mut report = Report::new("cyclic");
    let alg = assemble(setting, q);
    let model = &setting.model;
    let g = model.pairing_matrix();
    let deg = |a: usize| model.degrees[a] as i64;
    for level in &alg.levels {
        for (&k, tensor) in &level.ops {
            if k == 0 || k > k_max {
                continue;
            }
            let pair = |inputs: &[usize], w: usize| -> Q {
                tensor.get(inputs).map(|v| v.iter().map(|(u, c)| c * &g[*u][w]).sum()).unwrap_or_else(Q::zero)
            };
            let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
            for (inputs, v) in tensor {
                for w in 0..model.dim() {
                    if v.iter().any(|(u, _)| !g[*u][w].is_zero()) {
                        let mut t = inputs.clone();
                        t.push(w);
                        for _ in 0..=k {
                            candidates.insert(t.clone());
                            t.rotate_right(1);
                        }
                    }
                }
            }
            for t in candidates {
                let lhs = pair(&t[..k], t[k]);
                let s: i64 = (deg(t[k]) + 1) * t[..k].iter().map(|&a| deg(a) + 1).sum::<i64>();
                let mut rotated = vec![t[k]];
                rotated.extend_from_slice(&t[..k - 1]);
                let rhs = pair(&rotated, t[k - 1]) * sign(s);
                report.check(lhs == rhs, || {
                    format!(
                        "level {} tuple {}: {} vs {}",
                        setting.ring.fmt_mono(&level.mono),
                        fmt_tuple(setting, &t),
                        lhs,
                        rhs
                    )
                });
            }
        }
    }
    report
}

/// Expected form degree of `q^β_{k,l}(α; γ)`.
pub fn expected_degree(setting: &Setting, beta: &Beta, r: &[u32], inputs: &[usize]) -> i64 {
    let ring = &setting.ring;
    let sum: i64 = inputs.iter().map(|&a| setting.model.degrees[a] as i64).sum();
    let interior: i64 = r.iter().enumerate().map(|(j, &c)| c as i64 * ring.t_degree(j)).sum();
    sum + 2 - inputs.len() as i64 - ring.maslov(beta) - interior
}

pub fn verify_degree(setting: &Setting, q: &QOperators) -> Report {
    let mut report = Report::new("degree");
    let ring = &setting.ring;
    for (key, tensor) in &q.disk {
        let r = counts(&key.interior, ring.num_interior());
        for (inputs, v) in tensor {
            let expected = expected_degree(setting, &key.beta, &r, inputs);
            for (u, _) in v {
                report.check(setting.model.degrees[*u] as i64 == expected, || {
                    format!(
                        "{} on {} has output {} of degree {}, expected {}",
                        fmt_key(setting, key),
                        fmt_tuple(setting, inputs),
                        setting.model.labels[*u],
                        setting.model.degrees[*u],
                        expected
                    )
                });
            }
        }
    }
    for ((beta, interior), v) in &q.point {
        let r = counts(interior, ring.num_interior());
        let mono = Monomial { beta: beta.clone(), s: 0, t: r.clone() };
        let ok = v.is_zero() || ring.degree(&mono) == 3 - setting.n() as i64;
        report.check(ok, || format!("point datum at {} has degree {}", ring.fmt_mono(&mono), ring.degree(&mono)));
    }
    report
}

/// Permuting interior inputs changes the sign by the number of inverted odd pairs.
pub fn verify_symmetry(setting: &Setting, q: &QOperators) -> Report {
    let mut report = Report::new("symmetry");
    let degs = setting.interior.degrees();
    let perm_sign = |seq: &[usize]| -> Q {
        let mut inv = 0i64;
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if seq[i] > seq[j] && degs[seq[i]] % 2 == 1 && degs[seq[j]] % 2 == 1 {
                    inv += 1;
                }
            }
        }
        sign(inv)
    };
    for (key, tensor) in &q.disk {
        let mut sorted = key.interior.clone();
        sorted.sort_unstable();
        if sorted == key.interior {
            continue;
        }
        let s = perm_sign(&key.interior);
        let canon = q.disk.get(&DiskKey { beta: key.beta.clone(), interior: sorted, k: key.k });
        let mut tuples: BTreeSet<&Vec<usize>> = tensor.keys().collect();
        if let Some(c) = canon {
            tuples.extend(c.keys());
        }
        for t in tuples {
            let a = dense(setting, tensor.get(t));
            let b: Vec<Q> = dense(setting, canon.and_then(|c| c.get(t))).iter().map(|x| x * &s).collect();
            report.check(a == b, || format!("{} reordered interior differs on {}", fmt_key(setting, key), fmt_tuple(setting, t)));
        }
    }
    for ((beta, interior), v) in &q.point {
        let mut sorted = interior.clone();
        sorted.sort_unstable();
        if sorted == *interior {
            continue;
        }
        let canon = q.point.get(&(beta.clone(), sorted)).cloned().unwrap_or_else(Q::zero);
        report.check(*v == canon * perm_sign(interior), || "reordered point datum differs".into());
    }
    for (j, d) in degs.iter().enumerate() {
        report.check(d % 2 == 0, || format!("interior class {j} has odd degree"));
    }
    report
}

fn dense(setting: &Setting, v: Option<&Sparse>) -> Vec<Q> {
    let mut out = vec![Q::zero(); setting.dim()];
    if let Some(v) = v {
        for (i, c) in v {
            out[*i] = c.clone();
        }
    }
    out
}

/// An interior `1` kills everything except `q^{β₀}_{0,1}(1) = −1`.
pub fn verify_fundamental(setting: &Setting, q: &QOperators) -> Report {
    let mut report = Report::new("fundamental");
    let Some(u0) = setting.unit_index() else {
        return report;
    };
    let b0 = setting.ring.beta_zero();
    let model = &setting.model;
    let expected: Vec<Q> = model.basis_vec(model.unit).iter().map(|c| -c).collect();
    report.check(eval_q(setting, q, &b0, &[], &[u0]) == expected, || "q_0,1(1) at β₀ is not −1".into());
    for (key, tensor) in &q.disk {
        if !key.interior.contains(&u0) || is_special(key.beta == b0, key.k, key.interior.len()) {
            continue;
        }
        for (inputs, v) in tensor {
            report.check(v.is_empty(), || {
                format!("{} with interior 1 is nonzero on {}", fmt_key(setting, key), fmt_tuple(setting, inputs))
            });
        }
    }
    for ((beta, interior), v) in &q.point {
        if interior.contains(&u0) {
            report.check(v.is_zero(), || {
                format!("point datum with interior 1 at {:?} is nonzero", beta)
            });
        }
    }
    report
}

/// At `β₀` only `d`, the signed wedge and the restriction term survive.
pub fn verify_energy_zero(setting: &Setting, q: &QOperators) -> Report {
    let mut report = Report::new("energy_zero");
    let b0 = setting.ring.beta_zero();
    let model = &setting.model;
    for (key, tensor) in &q.disk {
        if key.beta != b0 {
            continue;
        }
        for (inputs, v) in tensor {
            report.check(v.is_empty(), || {
                format!("stored {} on {} overrides the energy-zero operators", fmt_key(setting, key), fmt_tuple(setting, inputs))
            });
        }
    }
    for ((beta, _), v) in &q.point {
        if *beta == b0 {
            report.check(v.is_zero(), || "point datum at β₀ is nonzero".into());
        }
    }
    for (j, class) in setting.interior.classes.iter().enumerate() {
        let s = sign(class.degree as i64 + 1);
        let expected: Vec<Q> = class.restriction.iter().map(|c| c * &s).collect();
        report.check(eval_q(setting, q, &b0, &[], &[j]) == expected, || {
            format!("q_0,1({}) is not (−1)^(|γ|+1) γ|_L", class.label)
        });
    }
    for a in 0..model.dim() {
        report.check(eval_q(setting, q, &b0, &[a], &[]) == model.d_vec(&model.basis_vec(a)), || {
            format!("q_1,0({}) ≠ d", model.labels[a])
        });
    }
    report
}

type LevelTensors = BTreeMap<(Beta, Vec<u32>), BTreeMap<usize, BTreeSet<Vec<usize>>>>;

fn stored_levels(setting: &Setting, q: &QOperators) -> LevelTensors {
    let mut out: LevelTensors = BTreeMap::new();
    let nint = setting.ring.num_interior();
    for (key, tensor) in &q.disk {
        let r = counts(&key.interior, nint);
        out.entry((key.beta.clone(), r)).or_default().entry(key.k).or_default().extend(tensor.keys().cloned());
    }
    out
}

/// `q^β_{k,r+e_i} = (∫_β γ_i) q^β_{k,r}` for every degree-2 class `γ_i` vanishing on `L`.
pub fn verify_divisor(setting: &Setting, q: &QOperators, k_max: usize) -> Report {
    let mut report = Report::new("divisor");
    let ring = &setting.ring;
    let nint = ring.num_interior();
    let levels = stored_levels(setting, q);
    let mut point_levels: BTreeSet<(Beta, Vec<u32>)> = BTreeSet::new();
    for (beta, interior) in q.point.keys() {
        point_levels.insert((beta.clone(), counts(interior, nint)));
    }
    let k_limit = k_max.min(q.meta.max_arity);
    for i in setting.divisor_indices() {
        if setting.interior.classes[i].restriction.iter().any(|c| !c.is_zero()) {
            continue;
        }
        let mut pairs: BTreeSet<(Beta, Vec<u32>)> = BTreeSet::new();
        for (beta, r) in levels.keys().chain(point_levels.iter()) {
            pairs.insert((beta.clone(), r.clone()));
            if r[i] > 0 {
                let mut lower = r.clone();
                lower[i] -= 1;
                pairs.insert((beta.clone(), lower));
            }
        }
        for (beta, r) in pairs {
            let mut upper = r.clone();
            upper[i] += 1;
            let mono = Monomial { beta: beta.clone(), s: 0, t: upper.clone() };
            if ring.nu(&mono) > q.meta.cutoff {
                continue;
            }
            let factor = ring.pairing(&beta, i);
            let (lo, hi) = (multiset(&r), multiset(&upper));
            for k in 0..=k_limit {
                let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
                for rr in [&r, &upper] {
                    if let Some(t) = levels.get(&(beta.clone(), rr.clone())).and_then(|m| m.get(&k)) {
                        tuples.extend(t.iter().cloned());
                    }
                }
                if beta.iter().all(|&e| e == 0)
                    && (k == 1 || k == 2) {
                        tuples.extend(all_tuples(setting.dim(), k));
                    }
                for t in tuples {
                    let a = eval_q(setting, q, &beta, &t, &hi);
                    let b: Vec<Q> = eval_q(setting, q, &beta, &t, &lo).iter().map(|c| c * &factor).collect();
                    report.check(a == b, || {
                        format!(
                            "k={k} at {} on {}: inserting {} does not multiply by {}",
                            fmt_level(setting, &beta, &r),
                            fmt_tuple(setting, &t),
                            setting.interior.classes[i].label,
                            factor
                        )
                    });
                }
            }
            let a = eval_point(q, &beta, &hi);
            let b = eval_point(q, &beta, &lo) * &factor;
            report.check(a == b, || format!("point data at {} violate the divisor rule", fmt_level(setting, &beta, &r)));
        }
    }
    report
}

fn all_tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..dim).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// The degree-n part of every operator vanishes off `d`, the wedge and `q^{β₀}_{0,1}`.
pub fn verify_top_degree(setting: &Setting, q: &QOperators) -> Report {
    let mut report = Report::new("top_degree");
    let n = setting.n();
    let b0 = setting.ring.beta_zero();
    for (key, tensor) in &q.disk {
        if is_special(key.beta == b0, key.k, key.interior.len()) {
            continue;
        }
        for (inputs, v) in tensor {
            for (u, _) in v {
                report.check(setting.model.degrees[*u] != n, || {
                    format!("{} on {} has a top-degree component", fmt_key(setting, key), fmt_tuple(setting, inputs))
                });
            }
        }
    }
    report
}

/// Sign relating `q(α_1..α_k; γ)` to `q(α_k..α_1; γ)` under the involution.
pub fn real_sign(setting: &Setting, beta: &Beta, r: &[u32], inputs: &[usize]) -> Q {
    let degs = |a: usize| setting.model.degrees[a] as i64;
    let mu = setting.ring.maslov(beta);
    let l: i64 = r.iter().map(|&c| c as i64).sum();
    let k = inputs.len();
    let mut s_sigma = 0i64;
    for i in 0..k {
        for j in i + 1..k {
            s_sigma += (degs(inputs[i]) + 1) * (degs(inputs[j]) + 1);
        }
    }
    let total: i64 = inputs.iter().map(|&a| degs(a)).sum();
    let mut eps = Q::one();
    for (j, &c) in r.iter().enumerate() {
        let e = setting.interior.classes[j].involution.unwrap_or(1);
        if e == -1 && c % 2 == 1 {
            eps = -eps;
        }
    }
    sign(mu / 2 + l + 1 + s_sigma + total) * eps
}

/// Reversal identity for `β ≠ β₀`, the mod-4 antisymmetry and the vanishing of
/// `q_{0,l}` when `4 | μ` and every interior class has odd half-degree.
pub fn verify_real_signs(setting: &Setting, q: &QOperators) -> Report {
    let mut report = Report::new("real_signs");
    if !setting.interior.is_real() {
        report.fail("interior classes do not carry the real involution eigenvalues".into());
        return report;
    }
    let ring = &setting.ring;
    let nint = ring.num_interior();
    let b0 = ring.beta_zero();
    let n = setting.n();
    for (key, tensor) in &q.disk {
        if key.beta == b0 {
            continue;
        }
        let r = counts(&key.interior, nint);
        let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
        for t in tensor.keys() {
            tuples.insert(t.clone());
            tuples.insert(t.iter().rev().cloned().collect());
        }
        for t in tuples {
            let rev: Vec<usize> = t.iter().rev().cloned().collect();
            let a = eval_q(setting, q, &key.beta, &t, &key.interior);
            let s = real_sign(setting, &key.beta, &r, &t);
            let b: Vec<Q> = eval_q(setting, q, &key.beta, &rev, &key.interior).iter().map(|c| c * &s).collect();
            report.check(a == b, || {
                format!("{} on {} violates the reversal identity", fmt_key(setting, key), fmt_tuple(setting, &t))
            });
            if n % 4 == 3 && t.iter().all(|&x| setting.model.degrees[x] % 4 == 3) {
                let b_raw = eval_q(setting, q, &key.beta, &rev, &key.interior);
                for u in 0..setting.dim() {
                    if setting.model.degrees[u] % 4 == 2 {
                        report.check(a[u] == -b_raw[u].clone(), || {
                            format!("{} on {} is not antisymmetric in degree ≡ 2 mod 4", fmt_key(setting, key), fmt_tuple(setting, &t))
                        });
                    }
                }
            }
        }
        if key.k == 0 {
            let mu = ring.maslov(&key.beta);
            let all_odd = key.interior.iter().all(|&j| (setting.interior.classes[j].degree / 2) % 2 == 1);
            if mu % 4 == 0 && all_odd {
                for v in tensor.values() {
                    report.check(v.is_empty(), || format!("{} must vanish (4 | μ, odd interior classes)", fmt_key(setting, key)));
                }
            }
        }
    }
    report
}

/// The nine structural verifiers in a fixed order.
pub fn verify_all(setting: &Setting, q: &QOperators, k_max: usize) -> Vec<Report> {
    vec![
        verify_a_infinity(setting, q, k_max),
        verify_unit(setting, q),
        verify_cyclic(setting, q, k_max),
        verify_degree(setting, q),
        verify_symmetry(setting, q),
        verify_fundamental(setting, q),
        verify_energy_zero(setting, q),
        verify_divisor(setting, q, k_max),
        verify_top_degree(setting, q),
    ]
}
