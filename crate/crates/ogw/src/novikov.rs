//! Exact arithmetic in the graded Novikov ring and the formal rings built on it.
//!
//! A [`Monomial`] is `T^β s^k ∏ t_j^{l_j}` where `β` is an exponent vector over the
//! generating degree classes of a free commutative monoid. A [`Series`] is a finite
//! map from monomials to nonzero rationals together with a valuation cutoff: terms
//! with valuation above the cutoff are unknown, never silently zero.
//!
//! Invariants:
//! - every stored monomial has valuation at most the series cutoff;
//! - no stored coefficient is zero;
//! - binary operations keep the weaker (smaller) of the two cutoffs.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NovikovError {
    #[error("truncation fault: coefficient of {monomial} requested beyond cutoff {cutoff}")]
    Truncation { monomial: String, cutoff: String },
    #[error("non-sababa input: generator {0} has valuation 0")]
    NonSababa(String),
    #[error("infinite enumeration: cutoff must be finite")]
    InfiniteCutoff,
    #[error("invalid ring: {0}")]
    InvalidRing(String),
}

/// A valuation bound. Terms with valuation strictly above a finite cutoff are untrusted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cutoff {
    Finite(Q),
    Infinite,
}

impl Cutoff {
    pub fn finite(v: impl Into<Q>) -> Self {
        Cutoff::Finite(v.into())
    }

    pub fn admits(&self, nu: &Q) -> bool {
        match self {
            Cutoff::Finite(c) => nu <= c,
            Cutoff::Infinite => true,
        }
    }

    pub fn min(&self, other: &Cutoff) -> Cutoff {
        match (self, other) {
            (Cutoff::Infinite, c) | (c, Cutoff::Infinite) => c.clone(),
            (Cutoff::Finite(a), Cutoff::Finite(b)) => Cutoff::Finite(a.min(b).clone()),
        }
    }

    pub fn value(&self) -> Option<&Q> {
        match self {
            Cutoff::Finite(c) => Some(c),
            Cutoff::Infinite => None,
        }
    }
}

impl PartialOrd for Cutoff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Cutoff::Infinite, Cutoff::Infinite) => Ordering::Equal,
            (Cutoff::Infinite, _) => Ordering::Greater,
            (_, Cutoff::Infinite) => Ordering::Less,
            (Cutoff::Finite(a), Cutoff::Finite(b)) => a.cmp(b),
        })
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(c) => write!(f, "{c}"),
            Cutoff::Infinite => write!(f, "inf"),
        }
    }
}

/// A generating degree class of the free commutative monoid of disk classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGen {
    pub label: String,
    pub energy: Q,
    pub maslov: i64,
    pub spherical: bool,
    /// `∫_β γ_i` for every interior class `i`.
    pub pairing: Vec<Q>,
}

/// The scalar ring: dimension, degree classes and the form degrees of the interior classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    pub n: u32,
    pub classes: Vec<ClassGen>,
    /// Form degree `|γ_j|` for each interior variable `t_j`.
    pub interior_degrees: Vec<u32>,
}

/// Exponent vector over the class generators.
pub type Beta = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub beta: Beta,
    pub s: u32,
    pub t: Vec<u32>,
}

/// Formal variable for differentiation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    S,
    T(usize),
}

impl Ring {
    pub fn new(n: u32, classes: Vec<ClassGen>, interior_degrees: Vec<u32>) -> Result<Self, NovikovError> {
        if n.is_multiple_of(2) {
            return Err(NovikovError::InvalidRing(format!("dimension {n} is even; only odd n is supported")));
        }
        for (j, d) in interior_degrees.iter().enumerate() {
            if d % 2 != 0 {
                return Err(NovikovError::InvalidRing(format!("interior class {j} has odd degree {d}")));
            }
        }
        for c in &classes {
            if c.energy.is_negative() {
                return Err(NovikovError::InvalidRing(format!("class {} has negative energy", c.label)));
            }
            if c.maslov % 2 != 0 {
                return Err(NovikovError::InvalidRing(format!("class {} has odd Maslov index", c.label)));
            }
            if c.pairing.len() != interior_degrees.len() {
                return Err(NovikovError::InvalidRing(format!(
                    "class {} pairs with {} interior classes, expected {}",
                    c.label,
                    c.pairing.len(),
                    interior_degrees.len()
                )));
            }
        }
        Ok(Ring { n, classes, interior_degrees })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_interior(&self) -> usize {
        self.interior_degrees.len()
    }

    pub fn beta_zero(&self) -> Beta {
        vec![0; self.classes.len()]
    }

    pub fn energy(&self, beta: &[u32]) -> Q {
        beta.iter()
            .zip(&self.classes)
            .fold(Q::zero(), |acc, (&e, c)| acc + &c.energy * Q::from_integer(BigInt::from(e)))
    }

    pub fn maslov(&self, beta: &[u32]) -> i64 {
        beta.iter().zip(&self.classes).map(|(&e, c)| e as i64 * c.maslov).sum()
    }

    /// A class is spherical when every generator it uses is spherical.
    pub fn spherical(&self, beta: &[u32]) -> bool {
        beta.iter().zip(&self.classes).all(|(&e, c)| e == 0 || c.spherical)
    }

    /// `∫_β γ_i`, additive in `β`.
    pub fn pairing(&self, beta: &[u32], i: usize) -> Q {
        beta.iter()
            .zip(&self.classes)
            .fold(Q::zero(), |acc, (&e, c)| acc + &c.pairing[i] * Q::from_integer(BigInt::from(e)))
    }

    pub fn t_degree(&self, j: usize) -> i64 {
        2 - self.interior_degrees[j] as i64
    }

    pub fn s_degree(&self) -> i64 {
        1 - self.n as i64
    }

    pub fn one(&self) -> Monomial {
        Monomial { beta: self.beta_zero(), s: 0, t: vec![0; self.num_interior()] }
    }

    pub fn s_mono(&self) -> Monomial {
        Monomial { s: 1, ..self.one() }
    }

    pub fn t_mono(&self, j: usize) -> Monomial {
        let mut m = self.one();
        m.t[j] = 1;
        m
    }

    pub fn t_beta(&self, beta: Beta) -> Monomial {
        Monomial { beta, ..self.one() }
    }

    pub fn degree(&self, m: &Monomial) -> i64 {
        let t: i64 = m.t.iter().enumerate().map(|(j, &l)| l as i64 * self.t_degree(j)).sum();
        self.maslov(&m.beta) + m.s as i64 * self.s_degree() + t
    }

    pub fn nu(&self, m: &Monomial) -> Q {
        let vars: u64 = m.s as u64 + m.t.iter().map(|&l| l as u64).sum::<u64>();
        self.energy(&m.beta) + Q::from_integer(BigInt::from(vars))
    }

    pub fn mono_mul(&self, a: &Monomial, b: &Monomial) -> Monomial {
        Monomial {
            beta: a.beta.iter().zip(&b.beta).map(|(x, y)| x + y).collect(),
            s: a.s + b.s,
            t: a.t.iter().zip(&b.t).map(|(x, y)| x + y).collect(),
        }
    }

    /// `a / b` when `b` divides `a`.
    pub fn mono_div(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        let sub = |x: &u32, y: &u32| x.checked_sub(*y);
        Some(Monomial {
            beta: a.beta.iter().zip(&b.beta).map(|(x, y)| sub(x, y)).collect::<Option<_>>()?,
            s: a.s.checked_sub(b.s)?,
            t: a.t.iter().zip(&b.t).map(|(x, y)| sub(x, y)).collect::<Option<_>>()?,
        })
    }

    /// Sababa order: valuation, then energy, Maslov index, `s` exponent, `t` exponents.
    pub fn sababa_cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.nu(a)
            .cmp(&self.nu(b))
            .then_with(|| self.energy(&a.beta).cmp(&self.energy(&b.beta)))
            .then_with(|| self.maslov(&a.beta).cmp(&self.maslov(&b.beta)))
            .then_with(|| a.s.cmp(&b.s))
            .then_with(|| a.t.cmp(&b.t))
            .then_with(|| a.beta.cmp(&b.beta))
    }

    pub fn fmt_mono(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        if m.beta.iter().any(|&e| e > 0) {
            let b: Vec<String> = m
                .beta
                .iter()
                .zip(&self.classes)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, c)| if e == 1 { c.label.clone() } else { format!("{e}{}", c.label) })
                .collect();
            parts.push(format!("T^{{{}}}", b.join("+")));
        }
        if m.s > 0 {
            parts.push(if m.s == 1 { "s".into() } else { format!("s^{}", m.s) });
        }
        for (j, &l) in m.t.iter().enumerate() {
            if l > 0 {
                parts.push(if l == 1 { format!("t{j}") } else { format!("t{j}^{l}") });
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    pub fn fmt_series(&self, a: &Series) -> String {
        if a.terms.is_empty() {
            return "0".into();
        }
        let mut monos: Vec<&Monomial> = a.terms.keys().collect();
        monos.sort_by(|x, y| self.sababa_cmp(x, y));
        monos
            .iter()
            .map(|m| format!("({}) {}", a.terms[*m], self.fmt_mono(m)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    // Series arithmetic.

    pub fn monomial_series(&self, m: Monomial, c: Q, cutoff: Cutoff) -> Series {
        let mut out = Series::zero(cutoff);
        self.add_term(&mut out, m, c);
        out
    }

    /// Adds `c·m` to `a`, dropping it if `m` lies beyond the cutoff.
    pub fn add_term(&self, a: &mut Series, m: Monomial, c: Q) {
        if c.is_zero() || !a.cutoff.admits(&self.nu(&m)) {
            return;
        }
        add_coeff(&mut a.terms, m, c);
    }

    pub fn truncate(&self, a: &Series, cutoff: &Cutoff) -> Series {
        let cutoff = a.cutoff.min(cutoff);
        let terms = a
            .terms
            .iter()
            .filter(|(m, _)| cutoff.admits(&self.nu(m)))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Series { terms, cutoff }
    }

    pub fn add(&self, a: &Series, b: &Series) -> Series {
        let mut out = self.truncate(a, &b.cutoff);
        for (m, c) in &b.terms {
            self.add_term(&mut out, m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, a: &Series, b: &Series) -> Series {
        self.add(a, &b.scale(&-Q::one()))
    }

    pub fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut out = Series::zero(a.cutoff.min(&b.cutoff));
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(&mut out, self.mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    /// Infimum of the valuations of the stored terms; `None` stands for `+∞`.
    pub fn valuation(&self, a: &Series) -> Option<Q> {
        a.terms.keys().map(|m| self.nu(m)).min()
    }

    pub fn coefficient(&self, a: &Series, m: &Monomial) -> Result<Q, NovikovError> {
        if !a.cutoff.admits(&self.nu(m)) {
            return Err(NovikovError::Truncation { monomial: self.fmt_mono(m), cutoff: a.cutoff.to_string() });
        }
        Ok(a.terms.get(m).cloned().unwrap_or_else(Q::zero))
    }

    /// Formal partial derivative. Differentiation lowers valuation by one, so the
    /// result is trusted one unit below the input cutoff.
    pub fn derive(&self, a: &Series, var: Var) -> Series {
        let cutoff = match &a.cutoff {
            Cutoff::Finite(c) => Cutoff::Finite(c - Q::one()),
            Cutoff::Infinite => Cutoff::Infinite,
        };
        let mut out = Series::zero(cutoff);
        for (m, c) in &a.terms {
            let mut d = m.clone();
            let e = match var {
                Var::S => &mut d.s,
                Var::T(j) => &mut d.t[j],
            };
            if *e == 0 {
                continue;
            }
            let factor = Q::from_integer(BigInt::from(*e));
            *e -= 1;
            self.add_term(&mut out, d, c * factor);
        }
        out
    }

    /// Keeps the `s`-free monomials whose class is spherical.
    pub fn type_d_projection(&self, a: &Series) -> Series {
        Series {
            terms: a
                .terms
                .iter()
                .filter(|(m, _)| m.s == 0 && self.spherical(&m.beta))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            cutoff: a.cutoff.clone(),
        }
    }

    /// All `T^β` with `ω(β) ≤ cutoff` (including `β₀`).
    pub fn classes_up_to(&self, cutoff: &Q) -> Result<Vec<Beta>, NovikovError> {
        for c in &self.classes {
            if c.energy.is_zero() {
                return Err(NovikovError::NonSababa(format!("T^{}", c.label)));
            }
        }
        let mut out = Vec::new();
        let mut cur = self.beta_zero();
        fn rec(ring: &Ring, i: usize, cur: &mut Beta, energy: Q, cutoff: &Q, out: &mut Vec<Beta>) {
            if i == ring.classes.len() {
                out.push(cur.clone());
                return;
            }
            let mut e = energy;
            loop {
                if &e > cutoff {
                    break;
                }
                rec(ring, i + 1, cur, e.clone(), cutoff, out);
                cur[i] += 1;
                e += &ring.classes[i].energy;
            }
            cur[i] = 0;
        }
        rec(self, 0, &mut cur, Q::zero(), cutoff, &mut out);
        Ok(out)
    }

    /// Enumerates the monoid generated by the monomials of `generators`, all `T^β`
    /// and all `t_j`, up to valuation `cutoff`, in sababa order.
    pub fn generate_monoid(&self, generators: &[Series], cutoff: &Q) -> Result<SababaMonoid, NovikovError> {
        let mut gens: BTreeSet<Monomial> = BTreeSet::new();
        for g in generators {
            for m in g.terms.keys() {
                if *m == self.one() {
                    continue;
                }
                if self.nu(m).is_zero() {
                    return Err(NovikovError::NonSababa(self.fmt_mono(m)));
                }
                gens.insert(m.clone());
            }
        }
        for (i, c) in self.classes.iter().enumerate() {
            if c.energy.is_zero() {
                return Err(NovikovError::NonSababa(format!("T^{}", c.label)));
            }
            let mut beta = self.beta_zero();
            beta[i] = 1;
            gens.insert(self.t_beta(beta));
        }
        for j in 0..self.num_interior() {
            gens.insert(self.t_mono(j));
        }
        let gens: Vec<(Monomial, Q)> = gens
            .into_iter()
            .map(|m| {
                let nu = self.nu(&m);
                (m, nu)
            })
            .filter(|(_, nu)| nu <= cutoff)
            .collect();
        let mut seen: BTreeSet<Monomial> = BTreeSet::new();
        let mut frontier = vec![self.one()];
        seen.insert(self.one());
        while let Some(m) = frontier.pop() {
            let nu = self.nu(&m);
            for (g, gnu) in &gens {
                if &(&nu + gnu) > cutoff {
                    continue;
                }
                let p = self.mono_mul(&m, g);
                if seen.insert(p.clone()) {
                    frontier.push(p);
                }
            }
        }
        let mut elements: Vec<Monomial> = seen.into_iter().collect();
        elements.sort_by(|a, b| self.sababa_cmp(a, b));
        let mut levels: Vec<Q> = Vec::new();
        let mut level_ends: Vec<usize> = Vec::new();
        for (i, m) in elements.iter().enumerate() {
            let nu = self.nu(m);
            if levels.last() == Some(&nu) {
                *level_ends.last_mut().unwrap() = i;
            } else {
                levels.push(nu);
                level_ends.push(i);
            }
        }
        Ok(SababaMonoid { elements, levels, level_ends })
    }
}

pub(crate) fn add_coeff<K: Ord>(map: &mut BTreeMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub terms: BTreeMap<Monomial, Q>,
    pub cutoff: Cutoff,
}

impl Series {
    pub fn zero(cutoff: Cutoff) -> Self {
        Series { terms: BTreeMap::new(), cutoff }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Series {
        if c.is_zero() {
            return Series::zero(self.cutoff.clone());
        }
        Series { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(), cutoff: self.cutoff.clone() }
    }

    pub fn get(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }
}

/// Monomials enumerated with nondecreasing valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SababaMonoid {
    pub elements: Vec<Monomial>,
    /// Distinct valuations `E_0 = 0 < E_1 < …`.
    pub levels: Vec<Q>,
    /// `level_ends[l]` is the index of the last element with valuation `levels[l]`.
    pub level_ends: Vec<usize>,
}

impl SababaMonoid {
    /// Elements at level `l` (valuation exactly `levels[l]`).
    pub fn level(&self, l: usize) -> &[Monomial] {
        let start = if l == 0 { 0 } else { self.level_ends[l - 1] + 1 };
        &self.elements[start..=self.level_ends[l]]
    }
}
