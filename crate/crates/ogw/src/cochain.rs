//! Finite graded-commutative differential algebras standing in for the forms on `L`,
//! the closed interior classes on `(X, L)`, and cochains with Novikov coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{Reducer, Row};
use crate::novikov::{add_coeff, Cutoff, Monomial, Ring, Series};
use crate::rational::{q, sign};
use crate::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CochainError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("not closed: d o has a nonzero component in degree {0}")]
    NotClosed(u32),
    #[error("obstructed: class of degree {degree} does not vanish ({form})")]
    Obstructed { degree: u32, form: String },
    #[error("model mismatch: expected {expected} basis coefficients, got {got}")]
    ModelMismatch { expected: usize, got: usize },
}

/// Sparse vector over the model basis.
pub type Sparse = Vec<(usize, Q)>;

#[derive(Clone, Debug, PartialEq)]
pub struct CochainModel {
    pub n: u32,
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    /// `d(e_i)`.
    pub d: Vec<Sparse>,
    /// `e_i ∧ e_j` for every ordered pair with a nonzero product.
    pub product: BTreeMap<(usize, usize), Sparse>,
    /// `∫_L e_i`.
    pub integral: Vec<Q>,
    pub unit: usize,
    pub top: usize,
}

/// Primitive selection: the fixed linear section of `d`, optionally shifted by a
/// multiple of the chosen basis of closed forms in the primitive's degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaugeChoice {
    Canonical,
    Shifted(Q),
}

impl GaugeChoice {
    pub fn parse(s: &str) -> Option<GaugeChoice> {
        match s {
            "canonical" => Some(GaugeChoice::Canonical),
            "shifted" => Some(GaugeChoice::Shifted(Q::one())),
            other => {
                let v = other.strip_prefix("shifted:")?;
                crate::rational::parse_q(v).map(GaugeChoice::Shifted)
            }
        }
    }
}

impl fmt::Display for GaugeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeChoice::Canonical => write!(f, "canonical"),
            GaugeChoice::Shifted(c) => write!(f, "shifted:{c}"),
        }
    }
}

fn add_sparse(acc: &mut BTreeMap<usize, Q>, v: &Sparse, factor: &Q) {
    for (i, c) in v {
        add_coeff(acc, *i, c * factor);
    }
}

impl CochainModel {
    /// Builds a model from the differential, the products listed for some ordered pairs,
    /// and the integral. Unit products and graded-commutative partners are filled in;
    /// every structural identity is checked exactly.
    pub fn new(
        n: u32,
        basis: Vec<(String, u32)>,
        d: Vec<Sparse>,
        products: Vec<((usize, usize), Sparse)>,
        integral: Vec<Q>,
        unit: usize,
        top: usize,
    ) -> Result<Self, CochainError> {
        let dim = basis.len();
        let (labels, degrees): (Vec<String>, Vec<u32>) = basis.into_iter().unzip();
        let bad = |m: String| Err(CochainError::InvalidModel(m));
        if n.is_multiple_of(2) {
            return bad(format!("dimension {n} must be odd"));
        }
        if d.len() != dim || integral.len() != dim {
            return bad("differential and integral must list every basis element".into());
        }
        if unit >= dim || top >= dim {
            return bad("unit or top generator out of range".into());
        }
        if degrees.iter().any(|&g| g > n) {
            return bad("basis degree exceeds the dimension".into());
        }
        let mut product: BTreeMap<(usize, usize), Sparse> = BTreeMap::new();
        for i in 0..dim {
            product.insert((unit, i), vec![(i, Q::one())]);
            product.insert((i, unit), vec![(i, Q::one())]);
        }
        for ((i, j), v) in products {
            if i >= dim || j >= dim || v.iter().any(|(k, _)| *k >= dim) {
                return bad(format!("product entry ({i},{j}) out of range"));
            }
            let v: Sparse = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            let flip = sign(degrees[i] as i64 * degrees[j] as i64);
            let swapped: Sparse = v.iter().map(|(k, c)| (*k, c * &flip)).collect();
            if let Some(prev) = product.get(&(i, j)) {
                if *prev != v {
                    return bad(format!("conflicting products for ({}, {})", labels[i], labels[j]));
                }
            }
            product.insert((i, j), v);
            product.entry((j, i)).or_insert(swapped);
        }
        product.retain(|_, v| !v.is_empty());
        let m = CochainModel { n, labels, degrees, d, product, integral, unit, top };
        m.validate()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn wedge_basis(&self, i: usize, j: usize) -> &[(usize, Q)] {
        self.product.get(&(i, j)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn d_vec(&self, x: &[Q]) -> Vec<Q> {
        let mut acc = BTreeMap::new();
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                add_sparse(&mut acc, &self.d[i], c);
            }
        }
        self.dense(acc)
    }

    pub fn wedge_vec(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut acc = BTreeMap::new();
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                add_sparse(&mut acc, &self.product.get(&(i, j)).cloned().unwrap_or_default(), &(a * b));
            }
        }
        self.dense(acc)
    }

    pub fn integrate_vec(&self, x: &[Q]) -> Q {
        x.iter().zip(&self.integral).map(|(a, b)| a * b).sum()
    }

    /// `⟨e_i, e_j⟩ = (-1)^{|e_j|} ∫ e_i ∧ e_j`.
    pub fn pairing_basis(&self, i: usize, j: usize) -> Q {
        let w: Q = self.wedge_basis(i, j).iter().map(|(k, c)| c * &self.integral[*k]).sum();
        w * sign(self.degrees[j] as i64)
    }

    pub fn pairing_matrix(&self) -> Vec<Vec<Q>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.pairing_basis(i, j)).collect()).collect()
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[i] = Q::one();
        v
    }

    fn dense(&self, acc: BTreeMap<usize, Q>) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        for (i, c) in acc {
            v[i] = c;
        }
        v
    }

    pub fn fmt_vec(&self, x: &[Q]) -> String {
        let parts: Vec<String> =
            x.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| format!("({c}) {}", self.labels[i])).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Form-degree homogeneity of a vector, `None` for zero or mixed degree.
    pub fn homogeneous_degree(&self, x: &[Q]) -> Option<u32> {
        let mut deg = None;
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match deg {
                None => deg = Some(self.degrees[i]),
                Some(g) if g != self.degrees[i] => return None,
                _ => {}
            }
        }
        deg
    }

    fn validate(&self) -> Result<(), CochainError> {
        let dim = self.dim();
        let bad = |m: String| Err(CochainError::InvalidModel(m));
        for i in 0..dim {
            for (k, _) in &self.d[i] {
                if *k >= dim || self.degrees[*k] != self.degrees[i] + 1 {
                    return bad(format!("d({}) is not of degree +1", self.labels[i]));
                }
            }
            let dd = self.d_vec(&self.d_vec(&self.basis_vec(i)));
            if dd.iter().any(|c| !c.is_zero()) {
                return bad(format!("d∘d({}) ≠ 0", self.labels[i]));
            }
            if !self.integrate_vec(&self.d_vec(&self.basis_vec(i))).is_zero() {
                return bad(format!("∫ d({}) ≠ 0", self.labels[i]));
            }
            if !self.integral[i].is_zero() && self.degrees[i] != self.n {
                return bad(format!("integral is nonzero on {} outside degree n", self.labels[i]));
            }
        }
        if self.degrees[self.unit] != 0 || !self.d[self.unit].is_empty() {
            return bad("unit must be a closed degree-0 element".into());
        }
        if self.degrees[self.top] != self.n || self.integral[self.top] != Q::one() {
            return bad("top generator must have degree n and integral 1".into());
        }
        for (&(i, j), v) in &self.product {
            for (k, _) in v {
                if self.degrees[*k] != self.degrees[i] + self.degrees[j] {
                    return bad(format!("{}∧{} has the wrong degree", self.labels[i], self.labels[j]));
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let (x, y) = (self.basis_vec(i), self.basis_vec(j));
                let xy = self.wedge_vec(&x, &y);
                let yx = self.wedge_vec(&y, &x);
                let flip = sign(self.degrees[i] as i64 * self.degrees[j] as i64);
                if xy.iter().zip(&yx).any(|(a, b)| *a != b * &flip) {
                    return bad(format!("{}∧{} is not graded commutative", self.labels[i], self.labels[j]));
                }
                let lhs = self.d_vec(&xy);
                let mut rhs = self.wedge_vec(&self.d_vec(&x), &y);
                let s = sign(self.degrees[i] as i64);
                for (r, c) in rhs.iter_mut().zip(self.wedge_vec(&x, &self.d_vec(&y))) {
                    *r += c * &s;
                }
                if lhs != rhs {
                    return bad(format!("Leibniz rule fails on ({}, {})", self.labels[i], self.labels[j]));
                }
                for k in 0..dim {
                    let z = self.basis_vec(k);
                    if self.wedge_vec(&xy, &z) != self.wedge_vec(&x, &self.wedge_vec(&y, &z)) {
                        return bad(format!(
                            "product is not associative on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        ));
                    }
                }
            }
        }
        let h = cohomology(self);
        if h.first().map(|(_, dimension)| *dimension) != Some(1) {
            return bad("H^0 must be one-dimensional".into());
        }
        Ok(())
    }

    /// Basis indices of a given form degree.
    pub fn of_degree(&self, p: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == p).collect()
    }

    /// A basis of the closed forms of degree `p`, by free-variable parametrisation of `ker d`.
    pub fn closed_basis(&self, p: u32) -> Vec<Vec<Q>> {
        let cols = self.of_degree(p);
        let mut red = Reducer::new();
        for u in self.of_degree(p + 1) {
            let mut row = Row::new();
            for (ci, &i) in cols.iter().enumerate() {
                if let Some((_, c)) = self.d[i].iter().find(|(k, _)| *k == u) {
                    row.add(ci, c.clone());
                }
            }
            red.insert(row).expect("homogeneous");
        }
        let mut out = Vec::new();
        for f in (0..cols.len()).filter(|&c| !red.is_pivot(c)) {
            let sol = red.solve(cols.len(), |v| if v == f { Q::one() } else { Q::zero() });
            let mut v = vec![Q::zero(); self.dim()];
            for (ci, &i) in cols.iter().enumerate() {
                v[i] = sol[ci].clone();
            }
            out.push(v);
        }
        out
    }

    /// Returns `b` with `db = −o` for a form vector `o`, one homogeneous degree at a time.
    pub fn solve_primitive_vec(&self, o: &[Q], gauge: &GaugeChoice) -> Result<Vec<Q>, CochainError> {
        if o.len() != self.dim() {
            return Err(CochainError::ModelMismatch { expected: self.dim(), got: o.len() });
        }
        let d_o = self.d_vec(o);
        if let Some(i) = d_o.iter().position(|c| !c.is_zero()) {
            return Err(CochainError::NotClosed(self.degrees[i]));
        }
        let mut b = vec![Q::zero(); self.dim()];
        for p in 0..=self.n {
            let part: Vec<Q> =
                o.iter().enumerate().map(|(i, c)| if self.degrees[i] == p { c.clone() } else { Q::zero() }).collect();
            if part.iter().all(|c| c.is_zero()) {
                continue;
            }
            let obstructed = || CochainError::Obstructed { degree: p, form: self.fmt_vec(&part) };
            if p == 0 {
                return Err(obstructed());
            }
            let cols = self.of_degree(p - 1);
            let mut red = Reducer::new();
            for u in self.of_degree(p) {
                let mut row = Row::new();
                for (ci, &i) in cols.iter().enumerate() {
                    if let Some((_, c)) = self.d[i].iter().find(|(k, _)| *k == u) {
                        row.add(ci, c.clone());
                    }
                }
                row.constant = part[u].clone();
                red.insert(row).map_err(|_| obstructed())?;
            }
            let sol = red.solve(cols.len(), |_| Q::zero());
            for (ci, &i) in cols.iter().enumerate() {
                b[i] += &sol[ci];
            }
            if let GaugeChoice::Shifted(c) = gauge {
                if p - 1 < self.n {
                    for z in self.closed_basis(p - 1) {
                        for (bi, zi) in b.iter_mut().zip(&z) {
                            *bi += zi * c;
                        }
                    }
                }
            }
        }
        let check = self.d_vec(&b);
        debug_assert!(check.iter().zip(o).all(|(a, b)| *a == -b.clone()));
        Ok(b)
    }
}

/// `(degree, dimension)` of the cohomology in every degree `0..=n`.
pub fn cohomology(model: &CochainModel) -> Vec<(u32, usize)> {
    let rank_from = |p: u32| -> usize {
        let rows: Vec<Vec<Q>> = model
            .of_degree(p)
            .iter()
            .map(|&i| {
                let v = model.d_vec(&model.basis_vec(i));
                model.of_degree(p + 1).iter().map(|&u| v[u].clone()).collect()
            })
            .collect();
        crate::linalg::rank(&rows)
    };
    (0..=model.n)
        .map(|p| {
            let dim_p = model.of_degree(p).len();
            let kernel = dim_p - rank_from(p);
            let image = if p == 0 { 0 } else { rank_from(p - 1) };
            (p, kernel - image)
        })
        .collect()
}

/// The minimal model of `H*(S^n)`: `1` and `vol`, zero differential.
pub fn sphere_minimal(n: u32) -> CochainModel {
    CochainModel::new(
        n,
        vec![("1".into(), 0), ("vol".into(), n)],
        vec![vec![], vec![]],
        vec![],
        vec![Q::zero(), Q::one()],
        0,
        1,
    )
    .expect("sphere model is valid")
}

/// A three-sphere model with extra exact pairs `f→e`, `x→y`, `h→g`, so that
/// primitives are nontrivial in degrees 1 and 3.
pub fn s3_extended() -> CochainModel {
    let basis: Vec<(String, u32)> = [("1", 0), ("f", 0), ("e", 1), ("x", 1), ("y", 2), ("h", 2), ("vol", 3), ("g", 3)]
        .iter()
        .map(|(l, g)| (l.to_string(), *g))
        .collect();
    let d = vec![vec![], vec![(2, q(1))], vec![], vec![(4, q(1))], vec![], vec![(7, q(1))], vec![], vec![]];
    let products = vec![((3, 4), vec![(6, q(1))]), ((1, 7), vec![(6, q(1))]), ((2, 5), vec![(6, q(-1))])];
    let mut integral = vec![Q::zero(); 8];
    integral[6] = Q::one();
    CochainModel::new(3, basis, d, products, integral, 0, 6).expect("extended model is valid")
}

/// Closed interior class on `(X, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorClass {
    pub label: String,
    pub degree: u32,
    /// `γ|_L` as a vector over the model basis.
    pub restriction: Vec<Q>,
    /// Eigenvalue of the involution, when the real structure is modelled.
    pub involution: Option<i8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativeModel {
    pub classes: Vec<InteriorClass>,
}

impl RelativeModel {
    pub fn new(model: &CochainModel, classes: Vec<InteriorClass>) -> Result<Self, CochainError> {
        for c in &classes {
            let bad = |m: &str| Err(CochainError::InvalidModel(format!("interior class {}: {m}", c.label)));
            if c.degree % 2 != 0 {
                return bad("degree must be even");
            }
            if c.restriction.len() != model.dim() {
                return bad("restriction has the wrong length");
            }
            if c.restriction.iter().enumerate().any(|(i, x)| !x.is_zero() && model.degrees[i] != c.degree) {
                return bad("restriction does not preserve degree");
            }
            if c.degree > 0 && c.restriction.iter().any(|x| !x.is_zero()) {
                return bad("positive-degree classes vanish on L");
            }
            if model.d_vec(&c.restriction).iter().any(|x| !x.is_zero()) {
                return bad("restriction is not closed");
            }
            if let Some(e) = c.involution {
                if e != 1 && e != -1 {
                    return bad("involution eigenvalue must be ±1");
                }
            }
        }
        Ok(RelativeModel { classes })
    }

    /// `γ_0 = 1`, the unit class restricting to the unit of `L`, followed by the given
    /// positive-degree classes. Involution eigenvalues are the real ones `(-1)^{|γ|/2}`.
    pub fn with_unit(model: &CochainModel, degrees: &[(&str, u32)], real: bool) -> Result<Self, CochainError> {
        let mut classes = vec![InteriorClass {
            label: "1".into(),
            degree: 0,
            restriction: model.basis_vec(model.unit),
            involution: real.then_some(1),
        }];
        for (label, g) in degrees {
            classes.push(InteriorClass {
                label: label.to_string(),
                degree: *g,
                restriction: vec![Q::zero(); model.dim()],
                involution: real.then_some(if (g / 2) % 2 == 0 { 1 } else { -1 }),
            });
        }
        RelativeModel::new(model, classes)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.degree).collect()
    }

    /// Index of the class `γ_0 = 1`, if present.
    pub fn unit_index(&self, model: &CochainModel) -> Option<usize> {
        let one = model.basis_vec(model.unit);
        self.classes.iter().position(|c| c.degree == 0 && c.restriction == one)
    }

    pub fn divisor_indices(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&i| self.classes[i].degree == 2).collect()
    }

    /// Interior classes carry the real eigenvalue `(-1)^{|γ|/2}`.
    pub fn is_real(&self) -> bool {
        self.classes
            .iter()
            .all(|c| c.involution == Some(if (c.degree / 2) % 2 == 0 { 1 } else { -1 }))
    }
}

/// Cochain in `A*(L) ⊗ R`: for each monomial, its form vector over the model basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub terms: BTreeMap<Monomial, Vec<Q>>,
    pub cutoff: Cutoff,
}

impl Cochain {
    pub fn zero(cutoff: Cutoff) -> Self {
        Cochain { terms: BTreeMap::new(), cutoff }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · m · x`, dropping terms beyond the cutoff and cancelled vectors.
    pub fn add_term(&mut self, ring: &Ring, m: Monomial, x: &[Q], c: &Q) {
        if c.is_zero() || x.iter().all(|v| v.is_zero()) || !self.cutoff.admits(&ring.nu(&m)) {
            return;
        }
        let dim = x.len();
        let entry = self.terms.entry(m.clone()).or_insert_with(|| vec![Q::zero(); dim]);
        for (e, v) in entry.iter_mut().zip(x) {
            *e += v * c;
        }
        if entry.iter().all(|v| v.is_zero()) {
            self.terms.remove(&m);
        }
    }

    pub fn add_basis_term(&mut self, ring: &Ring, m: Monomial, dim: usize, i: usize, c: &Q) {
        let mut x = vec![Q::zero(); dim];
        x[i] = Q::one();
        self.add_term(ring, m, &x, c);
    }

    pub fn add(&self, ring: &Ring, other: &Cochain) -> Cochain {
        let cutoff = self.cutoff.min(&other.cutoff);
        let mut out = Cochain::zero(cutoff);
        for (m, x) in self.terms.iter().chain(&other.terms) {
            out.add_term(ring, m.clone(), x, &Q::one());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Cochain {
        if c.is_zero() {
            return Cochain::zero(self.cutoff.clone());
        }
        Cochain {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.iter().map(|v| v * c).collect())).collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    /// The coefficient series of one basis element.
    pub fn component(&self, i: usize) -> Series {
        let mut s = Series::zero(self.cutoff.clone());
        for (m, x) in &self.terms {
            if !x[i].is_zero() {
                s.terms.insert(m.clone(), x[i].clone());
            }
        }
        s
    }

    /// The part of form degree `p`.
    pub fn degree_part(&self, model: &CochainModel, p: u32) -> Cochain {
        let mut out = Cochain::zero(self.cutoff.clone());
        for (m, x) in &self.terms {
            let y: Vec<Q> =
                x.iter().enumerate().map(|(i, v)| if model.degrees[i] == p { v.clone() } else { Q::zero() }).collect();
            if y.iter().any(|v| !v.is_zero()) {
                out.terms.insert(m.clone(), y);
            }
        }
        out
    }

    pub fn fmt(&self, ring: &Ring, model: &CochainModel) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut monos: Vec<&Monomial> = self.terms.keys().collect();
        monos.sort_by(|a, b| ring.sababa_cmp(a, b));
        monos
            .iter()
            .map(|m| format!("{}·[{}]", ring.fmt_mono(m), model.fmt_vec(&self.terms[*m])))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub fn wedge(ring: &Ring, model: &CochainModel, x: &Cochain, y: &Cochain) -> Result<Cochain, CochainError> {
    check_dims(model, x)?;
    check_dims(model, y)?;
    let mut out = Cochain::zero(x.cutoff.min(&y.cutoff));
    for (mx, vx) in &x.terms {
        for (my, vy) in &y.terms {
            out.add_term(ring, ring.mono_mul(mx, my), &model.wedge_vec(vx, vy), &Q::one());
        }
    }
    Ok(out)
}

pub fn differential(ring: &Ring, model: &CochainModel, x: &Cochain) -> Cochain {
    let mut out = Cochain::zero(x.cutoff.clone());
    for (m, v) in &x.terms {
        out.add_term(ring, m.clone(), &model.d_vec(v), &Q::one());
    }
    out
}

pub fn integral(ring: &Ring, model: &CochainModel, x: &Cochain) -> Series {
    let mut out = Series::zero(x.cutoff.clone());
    for (m, v) in &x.terms {
        ring.add_term(&mut out, m.clone(), model.integrate_vec(v));
    }
    out
}

/// `⟨ξ, η⟩ = (−1)^{|η|} ∫ ξ∧η`, with the sign taken per form degree of `η`.
pub fn pairing(ring: &Ring, model: &CochainModel, x: &Cochain, y: &Cochain) -> Result<Series, CochainError> {
    check_dims(model, x)?;
    check_dims(model, y)?;
    let mut out = Series::zero(x.cutoff.min(&y.cutoff));
    for (mx, vx) in &x.terms {
        for (my, vy) in &y.terms {
            let mut c = Q::zero();
            for (i, a) in vx.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                for (j, b) in vy.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                    c += model.pairing_basis(i, j) * a * b;
                }
            }
            ring.add_term(&mut out, ring.mono_mul(mx, my), c);
        }
    }
    Ok(out)
}

/// Returns `b` with `db = −o`, termwise in the Novikov coefficients.
pub fn solve_primitive(
    ring: &Ring,
    model: &CochainModel,
    o: &Cochain,
    gauge: &GaugeChoice,
) -> Result<Cochain, CochainError> {
    check_dims(model, o)?;
    let mut out = Cochain::zero(o.cutoff.clone());
    for (m, v) in &o.terms {
        let b = model.solve_primitive_vec(v, gauge)?;
        out.add_term(ring, m.clone(), &b, &Q::one());
    }
    Ok(out)
}

fn check_dims(model: &CochainModel, x: &Cochain) -> Result<(), CochainError> {
    for v in x.terms.values() {
        if v.len() != model.dim() {
            return Err(CochainError::ModelMismatch { expected: model.dim(), got: v.len() });
        }
    }
    Ok(())
}
