//! q-operator structure constants: storage, the forced energy-zero operators,
//! assembly of the A∞ maps, property verifiers and a synthetic generator.
//!
//! A stored disk tensor is `q^β_{k,l}( · ; γ_{i_1}, …, γ_{i_l})` evaluated on basis
//! tuples; the assembled maps use the coefficient of `T^β t^r` in `m_k`, which is the
//! tensor with interior multiset `r` divided by `r! = ∏ r_j!`.

mod format;
mod synth;
mod verify;

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cochain::{Cochain, Sparse};
use crate::novikov::{Beta, Cutoff, Monomial, Ring, Series};
use crate::rational::{multi_factorial, sign};
use crate::setting::Setting;
use crate::Q;

pub use format::{load_store, save_store};
pub use synth::{synth_qdata, SynthParams};
pub use verify::{
    verify_a_infinity, verify_all, verify_cyclic, verify_degree, verify_divisor, verify_energy_zero,
    verify_fundamental, verify_real_signs, verify_symmetry, verify_top_degree, verify_unit, Report,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QopsError {
    #[error("truncation fault: {0}")]
    Truncation(String),
    #[error("store line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("infeasible at level {0}")]
    Infeasible(String),
    #[error("invalid store: {0}")]
    Invalid(String),
}

/// Extent of the stored data: every level `(β, r)` with `ω(β) + |r| ≤ cutoff` and
/// every arity up to `max_arity` is known; anything beyond is unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreMeta {
    pub cutoff: Q,
    pub max_arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiskKey {
    pub beta: Beta,
    /// Interior class indices in the order they are inserted.
    pub interior: Vec<usize>,
    pub k: usize,
}

/// Input basis tuple to sparse output vector.
pub type Tensor = BTreeMap<Vec<usize>, Sparse>;

#[derive(Clone, Debug, PartialEq)]
pub struct QOperators {
    pub meta: StoreMeta,
    pub disk: BTreeMap<DiskKey, Tensor>,
    pub point: BTreeMap<(Beta, Vec<usize>), Q>,
    /// Sphere records are accepted and kept verbatim but never used.
    pub inert: Vec<String>,
}

impl QOperators {
    pub fn classical(cutoff: Q, max_arity: usize) -> Self {
        QOperators { meta: StoreMeta { cutoff, max_arity }, disk: BTreeMap::new(), point: BTreeMap::new(), inert: vec![] }
    }

    pub fn set(&mut self, beta: Beta, interior: Vec<usize>, inputs: Vec<usize>, out: usize, value: Q) {
        let k = inputs.len();
        let t = self.disk.entry(DiskKey { beta, interior, k }).or_default();
        let v = t.entry(inputs.clone()).or_default();
        match v.iter_mut().find(|(i, _)| *i == out) {
            Some(slot) => slot.1 = value,
            None => {
                v.push((out, value));
                v.sort_by_key(|(i, _)| *i);
            }
        }
        v.retain(|(_, c)| !c.is_zero());
        if v.is_empty() {
            t.remove(&inputs);
        }
    }

    fn stored(&self, beta: &Beta, interior: &[usize], inputs: &[usize]) -> Option<&Sparse> {
        let key = DiskKey { beta: beta.clone(), interior: interior.to_vec(), k: inputs.len() };
        if let Some(v) = self.disk.get(&key).and_then(|t| t.get(inputs)) {
            return Some(v);
        }
        let mut sorted = interior.to_vec();
        sorted.sort_unstable();
        let key = DiskKey { beta: beta.clone(), interior: sorted, k: inputs.len() };
        self.disk.get(&key).and_then(|t| t.get(inputs))
    }
}

pub fn counts(interior: &[usize], num: usize) -> Vec<u32> {
    let mut r = vec![0; num];
    for &j in interior {
        r[j] += 1;
    }
    r
}

pub fn multiset(r: &[u32]) -> Vec<usize> {
    r.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize)).collect()
}

/// `q^β_{k,l}(e_{α_1}, …, e_{α_k}; γ_{i_1}, …, γ_{i_l})` as a dense form vector,
/// with the three forced energy-zero operators.
pub fn eval_q(setting: &Setting, q: &QOperators, beta: &Beta, inputs: &[usize], interior: &[usize]) -> Vec<Q> {
    let model = &setting.model;
    let mut out = vec![Q::zero(); model.dim()];
    let zero_class = beta.iter().all(|&e| e == 0);
    if zero_class {
        match (inputs, interior) {
            ([a], []) => return model.d_vec(&model.basis_vec(*a)),
            ([a, b], []) => {
                let s = sign(model.degrees[*a] as i64);
                for (k, c) in model.wedge_basis(*a, *b) {
                    out[*k] = c * &s;
                }
                return out;
            }
            ([], [j]) => {
                let class = &setting.interior.classes[*j];
                let s = sign(class.degree as i64 + 1);
                return class.restriction.iter().map(|c| c * &s).collect();
            }
            _ => {}
        }
    }
    if let Some(v) = q.stored(beta, interior, inputs) {
        for (k, c) in v {
            out[*k] = c.clone();
        }
    }
    out
}

/// `q^β_{-1,l}(γ_{i_1}, …, γ_{i_l})`.
pub fn eval_point(q: &QOperators, beta: &Beta, interior: &[usize]) -> Q {
    if let Some(v) = q.point.get(&(beta.clone(), interior.to_vec())) {
        return v.clone();
    }
    let mut sorted = interior.to_vec();
    sorted.sort_unstable();
    q.point.get(&(beta.clone(), sorted)).cloned().unwrap_or_else(Q::zero)
}

/// The coefficient of `T^β t^r` in the A∞ maps, by arity.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelOps {
    pub beta: Beta,
    pub r: Vec<u32>,
    pub mono: Monomial,
    pub nu: Q,
    pub ops: BTreeMap<usize, BTreeMap<Vec<usize>, Sparse>>,
}

impl LevelOps {
    pub fn is_zero_class(&self) -> bool {
        self.beta.iter().all(|&e| e == 0)
    }
}

/// The assembled maps `m^γ_k` and `m^γ_{-1}`, coefficient by coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Assembled {
    pub levels: Vec<LevelOps>,
    /// Coefficients of `m_{-1}`.
    pub point: BTreeMap<Monomial, Q>,
    pub meta: StoreMeta,
    /// Smallest energy of a generating class, the first place unknown operators can live.
    pub min_energy: Option<Q>,
    /// Per arity: basis tuple to (level index, output).
    index: BTreeMap<usize, HashMap<Vec<usize>, Vec<(usize, Sparse)>>>,
}

pub fn assemble(setting: &Setting, q: &QOperators) -> Assembled {
    let ring = &setting.ring;
    let model = &setting.model;
    let nint = ring.num_interior();
    let mut levels: BTreeMap<(Beta, Vec<u32>), BTreeMap<usize, BTreeMap<Vec<usize>, Sparse>>> = BTreeMap::new();
    let b0 = ring.beta_zero();
    {
        let classical = levels.entry((b0.clone(), vec![0; nint])).or_default();
        for i in 0..model.dim() {
            if !model.d[i].is_empty() {
                classical.entry(1).or_default().insert(vec![i], model.d[i].clone());
            }
            for j in 0..model.dim() {
                let s = sign(model.degrees[i] as i64);
                let v: Sparse = model.wedge_basis(i, j).iter().map(|(k, c)| (*k, c * &s)).collect();
                if !v.is_empty() {
                    classical.entry(2).or_default().insert(vec![i, j], v);
                }
            }
        }
    }
    for (j, class) in setting.interior.classes.iter().enumerate() {
        let s = sign(class.degree as i64 + 1);
        let v: Sparse = class
            .restriction
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c * &s))
            .collect();
        if !v.is_empty() {
            let mut r = vec![0; nint];
            r[j] = 1;
            levels.entry((b0.clone(), r)).or_default().entry(0).or_default().insert(vec![], v);
        }
    }
    for (key, tensor) in &q.disk {
        let mut sorted = key.interior.clone();
        sorted.sort_unstable();
        if sorted != key.interior {
            continue;
        }
        let zero_class = key.beta == b0;
        let special = zero_class && matches!((key.k, key.interior.len()), (1, 0) | (2, 0) | (0, 1));
        if special {
            continue;
        }
        let r = counts(&key.interior, nint);
        let scale = Q::one() / multi_factorial(&r);
        let slot = levels.entry((key.beta.clone(), r)).or_default().entry(key.k).or_default();
        for (inputs, v) in tensor {
            slot.insert(inputs.clone(), v.iter().map(|(i, c)| (*i, c * &scale)).collect());
        }
    }
    let mut point = BTreeMap::new();
    for ((beta, interior), v) in &q.point {
        let mut sorted = interior.clone();
        sorted.sort_unstable();
        if sorted != *interior || v.is_zero() {
            continue;
        }
        let r = counts(interior, nint);
        let mono = Monomial { beta: beta.clone(), s: 0, t: r.clone() };
        point.insert(mono, v / multi_factorial(&r));
    }
    let levels: Vec<LevelOps> = levels
        .into_iter()
        .map(|((beta, r), mut ops)| {
            ops.retain(|_, t| {
                t.retain(|_, v| !v.is_empty());
                !t.is_empty()
            });
            let mono = Monomial { beta: beta.clone(), s: 0, t: r.clone() };
            let nu = ring.nu(&mono);
            LevelOps { beta, r, mono, nu, ops }
        })
        .filter(|l| !l.ops.is_empty())
        .collect();
    let mut index: BTreeMap<usize, HashMap<Vec<usize>, Vec<(usize, Sparse)>>> = BTreeMap::new();
    for (li, level) in levels.iter().enumerate() {
        for (k, t) in &level.ops {
            for (inputs, v) in t {
                index.entry(*k).or_default().entry(inputs.clone()).or_default().push((li, v.clone()));
            }
        }
    }
    let min_energy = ring.classes.iter().map(|c| c.energy.clone()).min();
    Assembled { levels, point, meta: q.meta.clone(), min_energy, index }
}

/// One coefficient of a cochain: `coeff · mono · e_basis`.
#[derive(Clone, Debug)]
struct Term {
    pub mono: Monomial,
    pub basis: usize,
    pub coeff: Q,
}

fn terms_of(x: &Cochain) -> Vec<Term> {
    let mut out = Vec::new();
    for (m, v) in &x.terms {
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out.push(Term { mono: m.clone(), basis: i, coeff: c.clone() });
            }
        }
    }
    out
}

/// `Π x_{i_j}` over the components named by `tuple`, memoised by prefix.
fn product(ring: &Ring, comps: &[Series], tuple: &[usize], memo: &mut HashMap<Vec<usize>, Series>) -> Series {
    if let Some(p) = memo.get(tuple) {
        return p.clone();
    }
    let (last, prefix) = tuple.split_last().expect("the empty product is seeded");
    let head = product(ring, comps, prefix, memo);
    let p = if head.is_zero() { head } else { ring.mul(&head, &comps[*last]) };
    memo.insert(tuple.to_vec(), p.clone());
    p
}

impl Assembled {
    /// Outputs of all levels on a basis tuple.
    pub fn lookup(&self, inputs: &[usize]) -> &[(usize, Sparse)] {
        self.index.get(&inputs.len()).and_then(|m| m.get(inputs)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Checks that every coefficient up to `cutoff` of a sum of `m_k` over words of
    /// `extra + k` factors from a cochain with least valuation `nu_min` is determined
    /// by the store.
    pub fn check_trust(&self, cutoff: &Cutoff, nu_min: Option<&Q>, extra: usize) -> Result<(), QopsError> {
        let Some(c) = cutoff.value() else {
            return Err(QopsError::Truncation("an infinite cutoff needs infinitely many operators".into()));
        };
        if c > &self.meta.cutoff {
            return Err(QopsError::Truncation(format!(
                "cutoff {c} exceeds the store cutoff {}",
                self.meta.cutoff
            )));
        }
        if let (Some(nu), Some(e)) = (nu_min, &self.min_energy) {
            let words = Q::from_integer((self.meta.max_arity + 1 + extra).into());
            if &(nu * words + e) <= c {
                return Err(QopsError::Truncation(format!(
                    "cutoff {c} needs operators of arity above the stored maximum {}",
                    self.meta.max_arity
                )));
            }
        }
        Ok(())
    }

    /// `m_k(x, …, x)` for every stored arity `k`, modulo the cutoff. `extra` counts
    /// further factors of `x` the caller will multiply in, for the trust check.
    pub fn m_powers(
        &self,
        setting: &Setting,
        x: &Cochain,
        cutoff: &Cutoff,
        extra: usize,
    ) -> Result<BTreeMap<usize, Cochain>, QopsError> {
        let ring = &setting.ring;
        let cutoff = x.cutoff.min(cutoff);
        let comps: Vec<Series> = (0..setting.dim()).map(|i| ring.truncate(&x.component(i), &cutoff)).collect();
        let nu_min = comps.iter().filter_map(|c| ring.valuation(c)).min();
        self.check_trust(&cutoff, nu_min.as_ref(), extra)?;
        if nu_min.as_ref().is_some_and(|v| v.is_zero()) {
            return Err(QopsError::Truncation("the argument must lie in the positive-valuation ideal".into()));
        }
        let budget = cutoff.value().cloned().expect("finite");
        let mut memo: HashMap<Vec<usize>, Series> = HashMap::new();
        memo.insert(vec![], ring.monomial_series(ring.one(), Q::one(), cutoff.clone()));
        let mut out: BTreeMap<usize, Cochain> = BTreeMap::new();
        for (&k, map) in &self.index {
            if k > self.meta.max_arity {
                continue;
            }
            for (tuple, hits) in map {
                let prod = product(ring, &comps, tuple, &mut memo);
                if prod.is_zero() {
                    continue;
                }
                let slot = out.entry(k).or_insert_with(|| Cochain::zero(cutoff.clone()));
                for (li, v) in hits {
                    let level = &self.levels[*li];
                    if level.nu > budget {
                        continue;
                    }
                    for (m, c) in &prod.terms {
                        let mono = ring.mono_mul(&level.mono, m);
                        for (u, val) in v {
                            slot.add_basis_term(ring, mono.clone(), setting.dim(), *u, &(c * val));
                        }
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// `Σ_k m_k(x, …, x)` modulo the cutoff.
    pub fn m_exp(&self, setting: &Setting, x: &Cochain, cutoff: &Cutoff) -> Result<Cochain, QopsError> {
        let cutoff = x.cutoff.min(cutoff);
        let mut total = Cochain::zero(cutoff.clone());
        for c in self.m_powers(setting, x, &cutoff, 0)?.values() {
            total = total.add(&setting.ring, c);
        }
        Ok(total)
    }

    /// `m_k(x_1, …, x_k)` for a fixed arity.
    pub fn m_k(&self, setting: &Setting, inputs: &[&Cochain], cutoff: &Cutoff) -> Result<Cochain, QopsError> {
        let ring = &setting.ring;
        let mut cutoff = cutoff.clone();
        for x in inputs {
            cutoff = cutoff.min(&x.cutoff);
        }
        if inputs.len() > self.meta.max_arity {
            return Err(QopsError::Truncation(format!("arity {} exceeds the stored maximum", inputs.len())));
        }
        if let Some(c) = cutoff.value() {
            if c > &self.meta.cutoff {
                return Err(QopsError::Truncation(format!("cutoff {c} exceeds the store cutoff")));
            }
        } else {
            return Err(QopsError::Truncation("an infinite cutoff needs infinitely many operators".into()));
        }
        let dim = setting.dim();
        let lists: Vec<Vec<Term>> = inputs.iter().map(|x| terms_of(x)).collect();
        let mut out = Cochain::zero(cutoff);
        let mut idx = vec![0usize; lists.len()];
        if lists.iter().any(|l| l.is_empty()) {
            return Ok(out);
        }
        loop {
            let basis: Vec<usize> = idx.iter().zip(&lists).map(|(&i, l)| l[i].basis).collect();
            let mut mono = ring.one();
            let mut coeff = Q::one();
            for (&i, l) in idx.iter().zip(&lists) {
                mono = ring.mono_mul(&mono, &l[i].mono);
                coeff *= &l[i].coeff;
            }
            for (li, v) in self.lookup(&basis) {
                let mut vec = vec![Q::zero(); dim];
                for (k, c) in v {
                    vec[*k] = c.clone();
                }
                out.add_term(ring, ring.mono_mul(&self.levels[*li].mono, &mono), &vec, &coeff);
            }
            let mut pos = lists.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < lists[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}
