//! The superpotential of a bounding pair and the invariants read off from it.
//!
//! `Ω̂ = Σ_k 1/(k+1) ∫_L m_k(b, …, b) ∧ b + m_{-1}` and `Ω` drops the monomials of
//! type 𝒟 (`s`-free with spherical class) from `Ω̂`. The invariant
//! `ogw_{β,k}(γ^r)` is `k! r! [T^β s^k t^r] Ω`.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::bounding::{solve_assembled, BoundingError, SolverPolicy, Variant};
use crate::cochain::{cohomology, wedge, Cochain, CochainError, GaugeChoice};
use crate::novikov::{Beta, Cutoff, Monomial, NovikovError, Series};
use crate::qops::{assemble, counts, multiset, Assembled, QOperators, QopsError, Report};
use crate::rational::{factorial, multi_factorial, num_den};
use crate::setting::Setting;
use crate::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuperpotentialError {
    #[error("truncation fault: {0}")]
    Truncation(String),
    #[error("superpotential term {0} is not of degree 3 − n")]
    Inhomogeneous(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Bounding(#[from] BoundingError),
    #[error(transparent)]
    Qops(#[from] QopsError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
}

impl From<NovikovError> for SuperpotentialError {
    fn from(e: NovikovError) -> Self {
        SuperpotentialError::Truncation(e.to_string())
    }
}

impl SuperpotentialError {
    pub fn is_truncation(&self) -> bool {
        match self {
            SuperpotentialError::Truncation(_) | SuperpotentialError::Qops(QopsError::Truncation(_)) => true,
            SuperpotentialError::Bounding(b) => b.is_truncation(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Superpotential {
    pub omega_hat: Series,
    pub omega: Series,
    pub n: u32,
    pub cutoff: Cutoff,
}

/// `Ω̂` and `Ω` for an arbitrary chain `b`; no bounding check is made.
pub fn omega_of_chain(setting: &Setting, alg: &Assembled, b: &Cochain, cutoff: &Cutoff) -> Result<Superpotential, SuperpotentialError> {
    let ring = &setting.ring;
    let model = &setting.model;
    let cutoff = b.cutoff.min(cutoff);
    let powers = alg.m_powers(setting, b, &cutoff, 1)?;
    let mut omega_hat = Series::zero(cutoff.clone());
    for (k, mk) in &powers {
        let weight = Q::one() / Q::from_integer((*k as i64 + 1).into());
        let top = wedge(ring, model, mk, b)?;
        for (m, x) in &top.terms {
            ring.add_term(&mut omega_hat, m.clone(), model.integrate_vec(x) * &weight);
        }
    }
    for (m, v) in &alg.point {
        ring.add_term(&mut omega_hat, m.clone(), v.clone());
    }
    let omega = ring.sub(&omega_hat, &ring.type_d_projection(&omega_hat));
    let target = 3 - setting.n() as i64;
    if let Some(m) = omega.terms.keys().find(|m| ring.degree(m) != target) {
        return Err(SuperpotentialError::Inhomogeneous(ring.fmt_mono(m)));
    }
    Ok(Superpotential { omega_hat, omega, n: setting.n(), cutoff })
}

pub fn omega(setting: &Setting, q: &QOperators, pair: &crate::bounding::BoundingPair) -> Result<Superpotential, SuperpotentialError> {
    let alg = assemble(setting, q);
    omega_of_chain(setting, &alg, &pair.b, &pair.cutoff)
}

/// The degree relation `n − 3 + μ(β) + k + 2l = kn + 2Σ m_j`.
pub fn degree_relation(setting: &Setting, beta: &Beta, k: usize, r: &[u32]) -> bool {
    let n = setting.n() as i64;
    let ring = &setting.ring;
    let l: i64 = r.iter().map(|&x| x as i64).sum();
    let half: i64 = r.iter().enumerate().map(|(j, &x)| x as i64 * ring.interior_degrees[j] as i64 / 2).sum();
    n - 3 + ring.maslov(beta) + k as i64 + 2 * l == k as i64 * n + 2 * half
}

fn target_monomial(beta: &Beta, k: usize, r: &[u32]) -> Monomial {
    Monomial { beta: beta.clone(), s: k as u32, t: r.to_vec() }
}

/// `k! r! [T^β s^k t^r] Ω`, always read from the series.
pub fn extract_ogw_full(setting: &Setting, sp: &Superpotential, beta: &Beta, k: usize, r: &[u32]) -> Result<Q, SuperpotentialError> {
    let m = target_monomial(beta, k, r);
    let c = setting.ring.coefficient(&sp.omega, &m)?;
    Ok(c * factorial(k as u32) * multi_factorial(r))
}

/// As [`extract_ogw_full`], returning 0 without a lookup when the degree relation fails.
pub fn extract_ogw(setting: &Setting, sp: &Superpotential, beta: &Beta, k: usize, r: &[u32]) -> Result<Q, SuperpotentialError> {
    let m = target_monomial(beta, k, r);
    if !sp.omega.cutoff.admits(&setting.ring.nu(&m)) {
        return Err(SuperpotentialError::Truncation(format!(
            "{} lies beyond the cutoff {}",
            setting.ring.fmt_mono(&m),
            sp.omega.cutoff
        )));
    }
    if !degree_relation(setting, beta, k, r) {
        return Ok(Q::zero());
    }
    extract_ogw_full(setting, sp, beta, k, r)
}

/// Invariants keyed by `(β, k, sorted interior multiset)`; zero entries are omitted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantTable {
    pub entries: BTreeMap<(Beta, usize, Vec<usize>), Q>,
}

impl InvariantTable {
    pub fn from_superpotential(sp: &Superpotential) -> Self {
        let mut entries = BTreeMap::new();
        for (m, c) in &sp.omega.terms {
            let value = c * factorial(m.s) * multi_factorial(&m.t);
            entries.insert((m.beta.clone(), m.s as usize, multiset(&m.t)), value);
        }
        InvariantTable { entries }
    }

    pub fn get(&self, beta: &Beta, k: usize, interior: &[usize]) -> Q {
        let mut sorted = interior.to_vec();
        sorted.sort_unstable();
        self.entries.get(&(beta.clone(), k, sorted)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn fmt_text(&self, setting: &Setting) -> String {
        let rows: Vec<[String; 4]> = self
            .entries
            .iter()
            .map(|((beta, k, interior), v)| [fmt_beta(setting, beta), k.to_string(), fmt_interior(setting, interior), v.to_string()])
            .collect();
        let header = ["beta".to_string(), "k".into(), "interior".into(), "ogw".into()];
        let mut widths = header.clone().map(|h| h.chars().count());
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&header).chain(&rows) {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
            writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
        }
        out
    }

    pub fn fmt_rows(&self, setting: &Setting) -> String {
        let mut out = String::new();
        for ((beta, k, interior), v) in &self.entries {
            let (num, den) = num_den(v);
            let b: Vec<String> = beta.iter().map(|e| e.to_string()).collect();
            let i: Vec<String> = interior.iter().map(|e| e.to_string()).collect();
            writeln!(
                out,
                "ogw beta={} label={} k={k} interior={} num={num} den={den}",
                if b.is_empty() { "-".into() } else { b.join(",") },
                fmt_beta(setting, beta),
                if i.is_empty() { "-".into() } else { i.join(",") },
            )
            .unwrap();
        }
        out
    }
}

pub fn fmt_beta(setting: &Setting, beta: &Beta) -> String {
    if beta.iter().all(|&e| e == 0) {
        return "β₀".into();
    }
    let parts: Vec<String> = beta
        .iter()
        .zip(&setting.ring.classes)
        .filter(|(&e, _)| e > 0)
        .map(|(&e, c)| if e == 1 { c.label.clone() } else { format!("{e}{}", c.label) })
        .collect();
    parts.join("+")
}

fn fmt_interior(setting: &Setting, interior: &[usize]) -> String {
    if interior.is_empty() {
        return "{}".into();
    }
    let labels: Vec<&str> = interior.iter().map(|&j| setting.interior.classes[j].label.as_str()).collect();
    format!("{{{}}}", labels.join(","))
}

/// Ranges of the exhaustive axiom sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub k_max: usize,
    pub l_max: usize,
}

/// Every `(β, k, r)` with `k ≤ k_max`, `|r| ≤ l_max` and valuation within the cutoff.
pub fn sweep_queries(setting: &Setting, cutoff: &Q, sweep: &Sweep) -> Result<Vec<(Beta, usize, Vec<u32>)>, SuperpotentialError> {
    let ring = &setting.ring;
    let nint = ring.num_interior();
    let mut multisets: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..sweep.l_max {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.last().copied().unwrap_or(0);
            for j in start..nint {
                let mut e = m.clone();
                e.push(j);
                next.push(e);
            }
        }
        multisets.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = Vec::new();
    for beta in ring.classes_up_to(cutoff)? {
        for k in 0..=sweep.k_max {
            for ms in &multisets {
                let r = counts(ms, nint);
                if &ring.nu(&target_monomial(&beta, k, &r)) <= cutoff {
                    out.push((beta.clone(), k, r));
                }
            }
        }
    }
    Ok(out)
}

/// Degree, zero, unit and divisor axioms over the sweep, plus the dual-path
/// agreement of the degree short-circuit.
pub fn check_axioms(setting: &Setting, sp: &Superpotential, sweep: &Sweep) -> Result<Vec<Report>, SuperpotentialError> {
    let ring = &setting.ring;
    let Some(cutoff) = sp.omega.cutoff.value().cloned() else {
        return Err(SuperpotentialError::Truncation("axioms are checked below a finite cutoff".into()));
    };
    let queries = sweep_queries(setting, &cutoff, sweep)?;
    let b0 = ring.beta_zero();
    let unit = setting.unit_index();
    let mut degree = Report::new("degree_axiom");
    let mut zero = Report::new("zero_axiom");
    let mut unit_r = Report::new("unit_axiom");
    let mut divisor = Report::new("divisor_axiom");
    let mut values: BTreeMap<(Beta, usize, Vec<u32>), Q> = BTreeMap::new();
    for (beta, k, r) in &queries {
        let full = extract_ogw_full(setting, sp, beta, *k, r)?;
        let short = extract_ogw(setting, sp, beta, *k, r)?;
        let label = || format!("ogw_{{{},{k}}}{}", fmt_beta(setting, beta), fmt_interior(setting, &multiset(r)));
        degree.check(full == short && (full.is_zero() || degree_relation(setting, beta, *k, r)), || {
            format!("{}: full {full}, short-circuit {short}", label())
        });
        let is_unit_point = |u: usize| *beta == b0 && *k == 1 && r[u] == 1 && r.iter().sum::<u32>() == 1;
        if *beta == b0 {
            let expected = match unit {
                Some(u) if is_unit_point(u) => -Q::one(),
                _ => Q::zero(),
            };
            zero.check(full == expected, || format!("{} = {full}, expected {expected}", label()));
        }
        if let Some(u) = unit {
            if r[u] > 0 {
                let expected = if is_unit_point(u) { -Q::one() } else { Q::zero() };
                unit_r.check(full == expected, || format!("{} = {full}, expected {expected}", label()));
            }
        }
        values.insert((beta.clone(), *k, r.clone()), full);
    }
    for ((beta, k, r), v) in &values {
        for i in setting.divisor_indices() {
            if r[i] == 0 {
                continue;
            }
            let mut lower = r.clone();
            lower[i] -= 1;
            let Some(base) = values.get(&(beta.clone(), *k, lower)) else { continue };
            let expected = ring.pairing(beta, i) * base;
            divisor.check(*v == expected, || {
                format!(
                    "ogw_{{{},{k}}}{} = {v}, expected {} · {base}",
                    fmt_beta(setting, beta),
                    fmt_interior(setting, &multiset(r)),
                    ring.pairing(beta, i)
                )
            });
        }
    }
    Ok(vec![degree, zero, unit_r, divisor])
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeReport {
    pub passed: bool,
    /// Monomials compared: the union of both supports.
    pub compared: usize,
    pub first_difference: Option<String>,
    /// Whether the two bounding chains differ.
    pub chains_differ: bool,
    /// Levels where a nonzero obstruction was solved, per gauge.
    pub primitive_solves: (usize, usize),
}

/// Termwise comparison of two superpotentials.
pub fn compare_omega(setting: &Setting, x: &Series, y: &Series) -> (usize, Option<String>) {
    let ring = &setting.ring;
    let mut monos: Vec<&Monomial> = x.terms.keys().chain(y.terms.keys()).collect();
    monos.sort_by(|a, b| ring.sababa_cmp(a, b));
    monos.dedup();
    let first = monos.iter().find(|m| x.get(m) != y.get(m)).map(|m| {
        format!("{}: {} vs {}", ring.fmt_mono(m), x.get(m), y.get(m))
    });
    (monos.len(), first)
}

/// Solves with two gauges and compares the resulting `Ω` monomial by monomial.
pub fn gauge_independence_check(
    setting: &Setting,
    q: &QOperators,
    a: &Series,
    cutoff: &Cutoff,
    variant: Variant,
    gauges: (&GaugeChoice, &GaugeChoice),
) -> Result<GaugeReport, SuperpotentialError> {
    let h = cohomology(&setting.model);
    let n = setting.n();
    if h.iter().any(|(p, dim)| *dim != if *p == 0 || *p == n { 1 } else { 0 }) {
        return Err(SuperpotentialError::Precondition("the model must have the cohomology of a sphere".into()));
    }
    let alg = assemble(setting, q);
    let p1 = solve_assembled(setting, &alg, a, cutoff, &SolverPolicy::new(variant, gauges.0.clone()))?;
    let p2 = solve_assembled(setting, &alg, a, cutoff, &SolverPolicy::new(variant, gauges.1.clone()))?;
    let o1 = omega_of_chain(setting, &alg, &p1.b, cutoff)?;
    let o2 = omega_of_chain(setting, &alg, &p2.b, cutoff)?;
    let (compared, first_difference) = compare_omega(setting, &o1.omega, &o2.omega);
    Ok(GaugeReport {
        passed: first_difference.is_none(),
        compared,
        first_difference,
        chains_differ: p1.b != p2.b,
        primitive_solves: (p1.primitive_solves(), p2.primitive_solves()),
    })
}
