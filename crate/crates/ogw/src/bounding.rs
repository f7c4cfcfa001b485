//! Bounding chains by obstruction theory over the valuation levels of the monoid
//! generated by the seed series, the disk classes and the interior variables.
//!
//! At each level the coefficients `o_λ` of `m(e^b) − c·1` are closed forms of degree
//! `2 − deg λ`. Degree zero ones are constants and feed `c`; the others are killed by
//! adding `λ·b_λ` with `d b_λ = −o_λ`.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cochain::{cohomology, differential, integral, Cochain, CochainError, GaugeChoice};
use crate::novikov::{Cutoff, Monomial, NovikovError, SababaMonoid, Series};
use crate::qops::{assemble, verify_real_signs, Assembled, QOperators, QopsError};
use crate::setting::Setting;
use crate::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundingError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("incompatible seed series: {0}")]
    IncompatibleSeed(String),
    #[error("obstructed at {lambda}: class of degree {degree} represented by {form} is not exact")]
    Obstructed { lambda: String, degree: u32, form: String },
    #[error("not bounding at level {level}: {residual}")]
    NotBounding { level: Q, residual: String },
    #[error("internal consistency fault at {lambda}: {msg}")]
    Internal { lambda: String, msg: String },
    #[error(transparent)]
    Qops(#[from] QopsError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
}

impl BoundingError {
    pub fn is_truncation(&self) -> bool {
        matches!(self, BoundingError::Qops(QopsError::Truncation(_)) | BoundingError::Novikov(NovikovError::Truncation { .. }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    UnitDivisor,
    RealThreeTypical,
    RealEven,
    N3Direct,
}

impl Variant {
    pub fn parse(s: &str) -> Option<Variant> {
        Some(match s {
            "plain" => Variant::Plain,
            "unit_divisor" => Variant::UnitDivisor,
            "real_three_typical" => Variant::RealThreeTypical,
            "real_even" => Variant::RealEven,
            "n3_direct" => Variant::N3Direct,
            _ => return None,
        })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plain => "plain",
            Variant::UnitDivisor => "unit_divisor",
            Variant::RealThreeTypical => "real_three_typical",
            Variant::RealEven => "real_even",
            Variant::N3Direct => "n3_direct",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverPolicy {
    pub variant: Variant,
    pub gauge: GaugeChoice,
}

impl SolverPolicy {
    pub fn new(variant: Variant, gauge: GaugeChoice) -> Self {
        SolverPolicy { variant, gauge }
    }
}

/// How the coefficient at one monomial was handled.
#[derive(Clone, Debug, PartialEq)]
pub enum StepKind {
    /// Degree-0 obstruction `c_λ·1`, absorbed into `c`.
    Scalar(Q),
    /// `b_λ` solved from `d b_λ = −o_λ` with `o_λ ≠ 0`.
    Primitive,
    /// `b_λ` copied from a lower level by the unit or divisor rule.
    Rule,
    /// Obstruction forced to vanish; `b_λ = 0`.
    Vanishing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub lambda: Monomial,
    pub degree: i64,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelLog {
    pub nu: Q,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundingPair {
    pub b: Cochain,
    pub c: Series,
    /// `∫_L b`.
    pub a: Series,
    pub cutoff: Cutoff,
    pub policy: SolverPolicy,
    pub monoid: SababaMonoid,
    pub log: Vec<LevelLog>,
}

impl BoundingPair {
    /// Number of levels where a nonzero obstruction of positive degree was solved.
    pub fn primitive_solves(&self) -> usize {
        self.log.iter().flat_map(|l| &l.steps).filter(|s| s.kind == StepKind::Primitive).count()
    }
}

fn internal(setting: &Setting, lambda: &Monomial, msg: impl Into<String>) -> BoundingError {
    BoundingError::Internal { lambda: setting.ring.fmt_mono(lambda), msg: msg.into() }
}

/// `m(e^b) − c·1` modulo the cutoff.
pub fn residual(setting: &Setting, alg: &Assembled, b: &Cochain, c: &Series, cutoff: &Cutoff) -> Result<Cochain, BoundingError> {
    let ring = &setting.ring;
    let m = alg.m_exp(setting, b, cutoff)?;
    let mut unit_part = Cochain::zero(m.cutoff.clone());
    let one = setting.model.basis_vec(setting.model.unit);
    for (mono, x) in &c.terms {
        unit_part.add_term(ring, mono.clone(), &one, &-x.clone());
    }
    Ok(m.add(ring, &unit_part))
}

/// Coefficients `o_λ` of `m(e^b) − c·1` at valuation `nu`, after checking that the
/// lower levels vanish.
pub fn obstruction(
    setting: &Setting,
    alg: &Assembled,
    b: &Cochain,
    c: &Series,
    nu: &Q,
) -> Result<Vec<(Monomial, Vec<Q>)>, BoundingError> {
    let ring = &setting.ring;
    let model = &setting.model;
    let res = residual(setting, alg, b, c, &Cutoff::Finite(nu.clone()))?;
    let mut out = Vec::new();
    for (lambda, x) in &res.terms {
        let v = ring.nu(lambda);
        if &v < nu {
            return Err(BoundingError::NotBounding {
                level: nu.clone(),
                residual: format!("{}·[{}]", ring.fmt_mono(lambda), model.fmt_vec(x)),
            });
        }
        let expected = 2 - ring.degree(lambda);
        if expected % 2 != 0 {
            return Err(internal(setting, lambda, "odd obstruction degree"));
        }
        if model.homogeneous_degree(x).map(|p| p as i64) != Some(expected) {
            return Err(internal(setting, lambda, format!("obstruction {} is not of degree {expected}", model.fmt_vec(x))));
        }
        if model.d_vec(x).iter().any(|v| !v.is_zero()) {
            return Err(internal(setting, lambda, format!("obstruction {} is not closed", model.fmt_vec(x))));
        }
        out.push((lambda.clone(), x.clone()));
    }
    out.sort_by(|a, b| ring.sababa_cmp(&a.0, &b.0));
    Ok(out)
}

fn check_preconditions(setting: &Setting, q: &QOperators, a: &Series, policy: &SolverPolicy) -> Result<(), BoundingError> {
    let ring = &setting.ring;
    let n = setting.n();
    let bad = |m: String| Err(BoundingError::Precondition(m));
    for m in a.terms.keys() {
        if ring.degree(m) != 1 - n as i64 {
            return bad(format!("seed monomial {} has degree {}, expected {}", ring.fmt_mono(m), ring.degree(m), 1 - n as i64));
        }
        if ring.nu(m).is_zero() {
            return bad(format!("seed monomial {} has valuation 0", ring.fmt_mono(m)));
        }
    }
    let h = cohomology(&setting.model);
    let nonzero = |pred: &dyn Fn(u32) -> bool| h.iter().find(|(p, dim)| pred(*p) && *dim > 0).map(|(p, _)| *p);
    let real_checks = || -> Result<(), BoundingError> {
        if n % 4 != 3 {
            return bad(format!("real variants need n ≡ 3 mod 4, got {n}"));
        }
        if let Some(p) = nonzero(&|p| p > 0 && p % 4 == 0) {
            return bad(format!("H^{p} of the model is nonzero"));
        }
        let report = verify_real_signs(setting, q);
        if !report.passed {
            return bad(format!("store fails the real sign identities: {}", report.witness.unwrap_or_default()));
        }
        Ok(())
    };
    match policy.variant {
        Variant::Plain | Variant::UnitDivisor => {
            if let Some(p) = nonzero(&|p| p > 0 && p % 2 == 0) {
                return bad(format!("H^{p} of the model is nonzero"));
            }
        }
        Variant::RealThreeTypical => real_checks()?,
        Variant::RealEven => {
            real_checks()?;
            if let Some(c) = ring.classes.iter().find(|c| c.maslov % 4 != 0) {
                return bad(format!("class {} has Maslov index {}, not divisible by 4", c.label, c.maslov));
            }
            if let Some(m) = a.terms.keys().find(|m| !in_even_ideal(setting, m)) {
                return bad(format!("seed monomial {} is not in the even ideal", ring.fmt_mono(m)));
            }
        }
        Variant::N3Direct => {
            if n != 3 {
                return bad(format!("the direct construction needs n = 3, got {n}"));
            }
            real_checks()?;
        }
    }
    if policy.variant == Variant::UnitDivisor {
        let Some(u) = setting.unit_index() else {
            return bad("the unit class is not among the interior classes".into());
        };
        check_seed_unit_divisor(setting, a, u)?;
    }
    Ok(())
}

/// The seed must be `t_0`-free and satisfy `ℓ_i(λ) a_λ = γ_i(λ) a_{λ/t_i}`.
fn check_seed_unit_divisor(setting: &Setting, a: &Series, unit: usize) -> Result<(), BoundingError> {
    let ring = &setting.ring;
    if let Some(m) = a.terms.keys().find(|m| m.t[unit] > 0) {
        return Err(BoundingError::IncompatibleSeed(format!("{} depends on t_{unit}", ring.fmt_mono(m))));
    }
    for i in setting.divisor_indices() {
        let mut monos: Vec<Monomial> = a.terms.keys().cloned().collect();
        for m in a.terms.keys() {
            let mut up = m.clone();
            up.t[i] += 1;
            if a.cutoff.admits(&ring.nu(&up)) {
                monos.push(up);
            }
        }
        for m in monos {
            if m.t[i] == 0 {
                continue;
            }
            let mut down = m.clone();
            down.t[i] -= 1;
            let lhs = a.get(&m) * Q::from_integer(m.t[i].into());
            let rhs = a.get(&down) * ring.pairing(&m.beta, i);
            if lhs != rhs {
                return Err(BoundingError::IncompatibleSeed(format!(
                    "divisor rule for t_{i} fails at {}",
                    ring.fmt_mono(&m)
                )));
            }
        }
    }
    Ok(())
}

/// Membership in the ideal generated by `s` and the `t_j` of even half-degree.
pub fn in_even_ideal(setting: &Setting, m: &Monomial) -> bool {
    m.s > 0 || m.t.iter().enumerate().any(|(j, &e)| e > 0 && (setting.ring.interior_degrees[j] / 2).is_multiple_of(2))
}

/// The normalised top form: the basis element `vol` divided by its integral.
fn point_class(setting: &Setting) -> Vec<Q> {
    let model = &setting.model;
    let v = model.basis_vec(model.top);
    let total = model.integrate_vec(&v);
    v.iter().map(|x| x / &total).collect()
}

fn seed_chain(setting: &Setting, a: &Series, cutoff: &Cutoff) -> Cochain {
    let pd = point_class(setting);
    let mut b = Cochain::zero(cutoff.clone());
    for (m, c) in &a.terms {
        b.add_term(&setting.ring, m.clone(), &pd, c);
    }
    b
}

/// Builds a bounding pair with `∫_L b = a` modulo `cutoff`.
pub fn solve(
    setting: &Setting,
    q: &QOperators,
    a: &Series,
    cutoff: &Cutoff,
    policy: &SolverPolicy,
) -> Result<BoundingPair, BoundingError> {
    check_preconditions(setting, q, a, policy)?;
    let alg = assemble(setting, q);
    solve_assembled(setting, &alg, a, cutoff, policy)
}

pub(crate) fn solve_assembled(
    setting: &Setting,
    alg: &Assembled,
    a: &Series,
    cutoff: &Cutoff,
    policy: &SolverPolicy,
) -> Result<BoundingPair, BoundingError> {
    let ring = &setting.ring;
    let model = &setting.model;
    let n = setting.n() as i64;
    let Some(limit) = cutoff.value().cloned() else {
        return Err(QopsError::Truncation("bounding chains are computed modulo a finite cutoff".into()).into());
    };
    alg.check_trust(cutoff, ring.valuation(a).as_ref(), 0)?;
    let a = ring.truncate(a, cutoff);
    let monoid = ring.generate_monoid(std::slice::from_ref(&a), &limit)?;
    let mut b = seed_chain(setting, &a, cutoff);
    let mut c = Series::zero(cutoff.clone());
    let mut log = Vec::new();

    if policy.variant == Variant::N3Direct {
        let res = residual(setting, alg, &b, &c, cutoff)?;
        let mut steps = Vec::new();
        for (lambda, x) in &res.terms {
            let scalar = scalar_multiple(setting, x).ok_or_else(|| BoundingError::NotBounding {
                level: ring.nu(lambda),
                residual: format!("{}·[{}]", ring.fmt_mono(lambda), model.fmt_vec(x)),
            })?;
            ring.add_term(&mut c, lambda.clone(), scalar.clone());
            steps.push(Step { lambda: lambda.clone(), degree: 0, kind: StepKind::Scalar(scalar) });
        }
        log.push(LevelLog { nu: limit.clone(), steps });
        return Ok(BoundingPair { b, c, a, cutoff: cutoff.clone(), policy: policy.clone(), monoid, log });
    }

    let unit = setting.unit_index();
    let divisors = setting.divisor_indices();
    for nu in monoid.levels.iter().filter(|v| !v.is_zero()) {
        let obstructions = obstruction(setting, alg, &b, &c, nu)?;
        let mut steps = Vec::new();
        let mut additions = Cochain::zero(cutoff.clone());
        for (lambda, o) in obstructions {
            let p = 2 - ring.degree(&lambda);
            let o_is_zero = o.iter().all(|x| x.is_zero());
            let vanishing = |why: &str| -> Result<StepKind, BoundingError> {
                if o_is_zero {
                    Ok(StepKind::Vanishing)
                } else {
                    Err(internal(setting, &lambda, format!("obstruction {} must vanish: {why}", model.fmt_vec(&o))))
                }
            };
            let kind = if p == 0 {
                let scalar = scalar_multiple(setting, &o)
                    .ok_or_else(|| internal(setting, &lambda, "degree-0 obstruction is not a multiple of 1"))?;
                ring.add_term(&mut c, lambda.clone(), scalar.clone());
                StepKind::Scalar(scalar)
            } else if p > n {
                vanishing("degree exceeds the dimension")?
            } else if p < 0 {
                vanishing("negative degree")?
            } else {
                let rule = if policy.variant == Variant::UnitDivisor {
                    divisor_rule(setting, &b, &lambda, unit, &divisors)
                } else {
                    None
                };
                match policy.variant {
                    _ if rule.is_some() => {
                        let bl = rule.expect("checked");
                        let db = model.d_vec(&bl);
                        if db.iter().zip(&o).any(|(x, y)| x != &-y.clone()) {
                            return Err(internal(setting, &lambda, "unit/divisor choice does not solve the obstruction"));
                        }
                        additions.add_term(ring, lambda.clone(), &bl, &Q::one());
                        StepKind::Rule
                    }
                    Variant::RealThreeTypical | Variant::RealEven if p % 4 == 2 => vanishing("spin antisymmetry")?,
                    Variant::RealEven if !in_even_ideal(setting, &lambda) => vanishing("odd interior classes with 4 | μ")?,
                    _ if o_is_zero => StepKind::Vanishing,
                    _ => {
                        let bl = model.solve_primitive_vec(&o, &policy.gauge).map_err(|e| match e {
                            CochainError::Obstructed { degree, form } => {
                                BoundingError::Obstructed { lambda: ring.fmt_mono(&lambda), degree, form }
                            }
                            other => other.into(),
                        })?;
                        additions.add_term(ring, lambda.clone(), &bl, &Q::one());
                        StepKind::Primitive
                    }
                }
            };
            steps.push(Step { lambda, degree: p, kind });
        }
        b = b.add(ring, &additions);
        check_level_invariants(setting, &b, &a, policy)?;
        log.push(LevelLog { nu: nu.clone(), steps });
    }
    let res = residual(setting, alg, &b, &c, cutoff)?;
    if let Some((lambda, x)) = res.terms.iter().next() {
        return Err(BoundingError::NotBounding {
            level: limit,
            residual: format!("{}·[{}]", ring.fmt_mono(lambda), model.fmt_vec(x)),
        });
    }
    Ok(BoundingPair { b, c, a, cutoff: cutoff.clone(), policy: policy.clone(), monoid, log })
}

fn scalar_multiple(setting: &Setting, x: &[Q]) -> Option<Q> {
    let model = &setting.model;
    let u = model.unit;
    let one = model.basis_vec(u);
    let k = x[u].clone() / &one[u];
    x.iter().zip(&one).all(|(a, b)| a == &(b * &k)).then_some(k)
}

/// Unit and divisor choice rule: `b_λ = 0` if `t_0 | λ`, otherwise for the first
/// divisor `i` with `t_i | λ`, `b_λ = (γ_i(β)/ℓ_i(λ)) b_{λ/t_i}`.
fn divisor_rule(setting: &Setting, b: &Cochain, lambda: &Monomial, unit: Option<usize>, divisors: &[usize]) -> Option<Vec<Q>> {
    let dim = setting.dim();
    if let Some(u) = unit {
        if lambda.t[u] > 0 {
            return Some(vec![Q::zero(); dim]);
        }
    }
    let i = *divisors.iter().find(|&&i| lambda.t[i] > 0)?;
    let mut lower = lambda.clone();
    lower.t[i] -= 1;
    let factor = setting.ring.pairing(&lambda.beta, i) / Q::from_integer(lambda.t[i].into());
    let base = b.terms.get(&lower).cloned().unwrap_or_else(|| vec![Q::zero(); dim]);
    Some(base.iter().map(|x| x * &factor).collect())
}

fn check_level_invariants(setting: &Setting, b: &Cochain, a: &Series, policy: &SolverPolicy) -> Result<(), BoundingError> {
    let ring = &setting.ring;
    let model = &setting.model;
    let fault = |msg: String| BoundingError::Internal { lambda: "b".into(), msg };
    let total = integral(ring, model, b);
    if ring.sub(&total, a).terms.iter().next().is_some() {
        return Err(fault("∫_L b drifted from the seed".into()));
    }
    for (m, x) in &b.terms {
        for (i, v) in x.iter().enumerate() {
            if !v.is_zero() && ring.degree(m) + model.degrees[i] as i64 != 1 {
                return Err(fault(format!("term {}·{} has total degree ≠ 1", ring.fmt_mono(m), model.labels[i])));
            }
            if !v.is_zero()
                && matches!(policy.variant, Variant::RealThreeTypical | Variant::RealEven)
                && model.degrees[i] % 4 != 3
            {
                return Err(fault(format!("term {}·{} is not three-typical", ring.fmt_mono(m), model.labels[i])));
            }
        }
        if policy.variant == Variant::RealEven && !in_even_ideal(setting, m) {
            return Err(fault(format!("term at {} is not even", ring.fmt_mono(m))));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundingReport {
    pub checks: Vec<(&'static str, bool, Option<String>)>,
    pub residual: Cochain,
}

impl BoundingReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok, _)| *ok)
    }
}

impl fmt::Display for BoundingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, ok, w)) in self.checks.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} {name}", if *ok { "PASS" } else { "FAIL" })?;
            if let Some(w) = w {
                write!(f, ": {w}")?;
            }
        }
        Ok(())
    }
}

/// Recomputes `m(e^b) − c·1` and the energy-zero identities for a pair.
pub fn verify_bounding(setting: &Setting, q: &QOperators, pair: &BoundingPair) -> Result<BoundingReport, BoundingError> {
    let alg = assemble(setting, q);
    verify_bounding_assembled(setting, &alg, pair)
}

pub(crate) fn verify_bounding_assembled(
    setting: &Setting,
    alg: &Assembled,
    pair: &BoundingPair,
) -> Result<BoundingReport, BoundingError> {
    let ring = &setting.ring;
    let model = &setting.model;
    let mut checks = Vec::new();
    let bad_c = pair.c.terms.keys().find(|m| ring.nu(m).is_zero() || ring.degree(m) != 2);
    checks.push(("c in the positive ideal with degree 2", bad_c.is_none(), bad_c.map(|m| ring.fmt_mono(m))));
    let bad_b = pair.b.terms.iter().find(|(m, x)| {
        ring.nu(m).is_zero()
            || x.iter().enumerate().any(|(i, v)| !v.is_zero() && ring.degree(m) + model.degrees[i] as i64 != 1)
    });
    checks.push(("b in the positive ideal with degree 1", bad_b.is_none(), bad_b.map(|(m, _)| ring.fmt_mono(m))));
    if !checks.iter().all(|(_, ok, _)| *ok) {
        return Ok(BoundingReport { checks, residual: Cochain::zero(pair.cutoff.clone()) });
    }
    let res = residual(setting, alg, &pair.b, &pair.c, &pair.cutoff)?;
    checks.push(("m(e^b) = c·1", res.is_zero(), (!res.is_zero()).then(|| res.fmt(ring, model))));

    let b0 = ring.beta_zero();
    let mut zeta = Cochain::zero(pair.b.cutoff.clone());
    for (m, x) in pair.b.terms.iter().filter(|(m, _)| m.beta == b0) {
        zeta.add_term(ring, m.clone(), x, &Q::one());
    }
    let dz = differential(ring, model, &zeta);
    checks.push(("d[T^β₀]b = 0", dz.is_zero(), (!dz.is_zero()).then(|| dz.fmt(ring, model))));
    // The energy-zero part of c is −γ|_L, read off as a multiple of 1.
    let mut expected = Series::zero(pair.c.cutoff.clone());
    for (j, class) in setting.interior.classes.iter().enumerate() {
        if let Some(k) = scalar_multiple(setting, &class.restriction) {
            ring.add_term(&mut expected, ring.t_mono(j), -k);
        }
    }
    let actual = Series {
        terms: pair.c.terms.iter().filter(|(m, _)| m.beta == b0).map(|(m, v)| (m.clone(), v.clone())).collect(),
        cutoff: pair.c.cutoff.clone(),
    };
    let diff = ring.sub(&actual, &expected);
    checks.push(("[T^β₀]c = −γ|_L", diff.is_zero(), (!diff.is_zero()).then(|| ring.fmt_series(&diff))));
    Ok(BoundingReport { checks, residual: res })
}
