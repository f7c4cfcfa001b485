//! Scenario files: TOML describing the cochain model, disk classes, interior classes,
//! the q-operator store and the solve settings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use ogw::bounding::{SolverPolicy, Variant};
use ogw::cochain::{s3_extended, sphere_minimal, CochainModel, GaugeChoice, RelativeModel};
use ogw::novikov::{ClassGen, Cutoff, Monomial, Ring, Series};
use ogw::qops::{load_store, synth_qdata, QOperators, SynthParams};
use ogw::rational::{parse_q, q};
use ogw::setting::Setting;
use ogw::Q;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::CliError;

/// A rational literal: an integer or a string such as `"3/2"`. Floats are refused.
#[derive(Clone, Debug, PartialEq)]
pub struct Rat(pub Q);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RatVisitor;
        impl<'de> Visitor<'de> for RatVisitor {
            type Value = Rat;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a rational string like \"3/2\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat(Q::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(Q::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
                Err(E::custom(format!("float {v} is not accepted; write an exact rational such as \"3/2\"")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                parse_q(v).map(Rat).ok_or_else(|| E::custom(format!("`{v}` is not an exact rational")))
            }
        }
        d.deserialize_any(RatVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub n: u32,
    pub model: ModelSpec,
    #[serde(default)]
    pub classes: Vec<ClassSpec>,
    #[serde(default)]
    pub interior: InteriorSpec,
    pub store: StoreSpec,
    #[serde(default)]
    pub solve: SolveSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Sphere,
    S3Extended,
    Custom { unit: String, top: String, basis: Vec<BasisSpec>, #[serde(default)] products: Vec<ProductSpec> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub label: String,
    pub degree: u32,
    #[serde(default)]
    pub d: BTreeMap<String, Rat>,
    #[serde(default)]
    pub integral: Option<Rat>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub left: String,
    pub right: String,
    pub value: BTreeMap<String, Rat>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub label: String,
    pub energy: Rat,
    pub maslov: i64,
    #[serde(default)]
    pub spherical: bool,
    #[serde(default)]
    pub pairing: BTreeMap<String, Rat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteriorSpec {
    #[serde(default)]
    pub real: bool,
    #[serde(default)]
    pub classes: Vec<InteriorClassSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteriorClassSpec {
    pub label: String,
    pub degree: u32,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StoreSpec {
    Classical { cutoff: Rat, max_arity: usize },
    Synth { seed: u64, cutoff: Rat, max_arity: usize, #[serde(default)] real: bool },
    File { path: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSpec {
    #[serde(default = "default_policy")]
    pub policy: String,
    #[serde(default = "default_gauge")]
    pub gauge: String,
    /// Second gauge for `gauge-check`.
    #[serde(default = "default_compare_gauge")]
    pub compare_gauge: String,
    pub cutoff: Option<Rat>,
    #[serde(default = "default_seed_terms")]
    pub a: Vec<TermSpec>,
}

impl Default for SolveSpec {
    fn default() -> Self {
        SolveSpec {
            policy: default_policy(),
            gauge: default_gauge(),
            compare_gauge: default_compare_gauge(),
            cutoff: None,
            a: default_seed_terms(),
        }
    }
}

fn default_policy() -> String {
    "unit_divisor".into()
}

fn default_gauge() -> String {
    "canonical".into()
}

fn default_compare_gauge() -> String {
    "shifted:1".into()
}

fn default_seed_terms() -> Vec<TermSpec> {
    vec![TermSpec { beta: BTreeMap::new(), s: 1, t: BTreeMap::new(), coeff: Rat(q(1)) }]
}

/// One monomial of the seed series `a = ∫_L b`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    #[serde(default)]
    pub beta: BTreeMap<String, u32>,
    #[serde(default)]
    pub s: u32,
    #[serde(default)]
    pub t: BTreeMap<String, u32>,
    pub coeff: Rat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_k")]
    pub verify_k: usize,
    #[serde(default = "default_k")]
    pub sweep_k: usize,
    #[serde(default = "default_l")]
    pub sweep_l: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { verify_k: default_k(), sweep_k: default_k(), sweep_l: default_l() }
    }
}

fn default_k() -> usize {
    4
}

fn default_l() -> usize {
    3
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub cutoff: Option<Q>,
    pub seed: Option<u64>,
    pub gauge: Option<String>,
}

/// A fully resolved scenario.
pub struct Scenario {
    pub setting: Setting,
    pub store: QOperators,
    pub seed_series: Series,
    pub cutoff: Cutoff,
    pub policy: SolverPolicy,
    /// The two gauges compared by `gauge-check`: the file's solve gauge and either
    /// `--gauge` or the file's comparison gauge.
    pub gauges: (GaugeChoice, GaugeChoice),
    pub outputs: OutputSpec,
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn build_model(spec: &ModelSpec, n: u32) -> Result<CochainModel, CliError> {
    match spec {
        ModelSpec::Sphere => Ok(sphere_minimal(n)),
        ModelSpec::S3Extended => {
            if n != 3 {
                return Err(config(format!("model.kind = \"s3_extended\" requires n = 3, got {n}")));
            }
            Ok(s3_extended())
        }
        ModelSpec::Custom { unit, top, basis, products } => {
            let index = |label: &str, field: &str| {
                basis
                    .iter()
                    .position(|b| b.label == label)
                    .ok_or_else(|| config(format!("model.{field}: unknown basis element `{label}`")))
            };
            let sparse = |map: &BTreeMap<String, Rat>, field: &str| -> Result<Vec<(usize, Q)>, CliError> {
                map.iter().map(|(l, c)| Ok((index(l, field)?, c.0.clone()))).collect()
            };
            let d = basis.iter().map(|b| sparse(&b.d, "basis.d")).collect::<Result<Vec<_>, _>>()?;
            let integral = basis.iter().map(|b| b.integral.as_ref().map_or_else(|| q(0), |r| r.0.clone())).collect();
            let prods = products
                .iter()
                .map(|p| Ok(((index(&p.left, "products.left")?, index(&p.right, "products.right")?), sparse(&p.value, "products.value")?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let labels = basis.iter().map(|b| (b.label.clone(), b.degree)).collect();
            CochainModel::new(n, labels, d, prods, integral, index(unit, "unit")?, index(top, "top")?)
                .map_err(|e| config(format!("model: {e}")))
        }
    }
}

fn parse_gauge(s: &str, field: &str) -> Result<GaugeChoice, CliError> {
    GaugeChoice::parse(s).ok_or_else(|| config(format!("{field}: unknown gauge `{s}` (use canonical, shifted or shifted:<rational>)")))
}

impl Scenario {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        let file: ScenarioFile = toml::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Scenario::resolve(file, base, overrides)
    }

    pub fn resolve(file: ScenarioFile, base: &Path, overrides: &Overrides) -> Result<Scenario, CliError> {
        let model = build_model(&file.model, file.n)?;
        let extra: Vec<(&str, u32)> = file.interior.classes.iter().map(|c| (c.label.as_str(), c.degree)).collect();
        let interior =
            RelativeModel::with_unit(&model, &extra, file.interior.real).map_err(|e| config(format!("interior: {e}")))?;
        let labels: Vec<String> = interior.classes.iter().map(|c| c.label.clone()).collect();
        let interior_index = |l: &str, field: &str| {
            labels.iter().position(|x| *x == l).ok_or_else(|| config(format!("{field}: unknown interior class `{l}`")))
        };
        let mut classes = Vec::new();
        for c in &file.classes {
            let mut pairing = vec![q(0); labels.len()];
            for (l, v) in &c.pairing {
                pairing[interior_index(l, &format!("classes.{}.pairing", c.label))?] = v.0.clone();
            }
            classes.push(ClassGen {
                label: c.label.clone(),
                energy: c.energy.0.clone(),
                maslov: c.maslov,
                spherical: c.spherical,
                pairing,
            });
        }
        let class_index = |l: &str| {
            file.classes.iter().position(|c| c.label == l).ok_or_else(|| config(format!("solve.a: unknown class `{l}`")))
        };
        let ring = Ring::new(file.n, classes, interior.degrees()).map_err(|e| config(format!("classes: {e}")))?;
        let setting = Setting::new(ring, model, interior).map_err(|e| config(e.to_string()))?;

        let store = match (&file.store, overrides.seed) {
            (StoreSpec::Classical { cutoff, max_arity }, None) => QOperators::classical(cutoff.0.clone(), *max_arity),
            (StoreSpec::Synth { seed, cutoff, max_arity, real }, over) => {
                let params = SynthParams { seed: over.unwrap_or(*seed), cutoff: cutoff.0.clone(), max_arity: *max_arity, real: *real };
                synth_qdata(&setting, &params).map_err(|e| CliError::Failure(format!("store synthesis: {e}")))?
            }
            (StoreSpec::File { path }, None) => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full).map_err(|e| config(format!("cannot read {}: {e}", full.display())))?;
                load_store(&setting, &text).map_err(|e| config(format!("{}: {e}", full.display())))?
            }
            (_, Some(_)) => return Err(config("--seed only applies to synthesized stores")),
        };

        let cutoff = match (&overrides.cutoff, &file.solve.cutoff) {
            (Some(c), _) => c.clone(),
            (None, Some(c)) => c.0.clone(),
            (None, None) => store.meta.cutoff.clone(),
        };
        if cutoff > store.meta.cutoff {
            return Err(config(format!("solve cutoff {cutoff} exceeds the store cutoff {}", store.meta.cutoff)));
        }
        if cutoff <= q(0) {
            return Err(config("the solve cutoff must be positive"));
        }

        let ring = &setting.ring;
        let mut seed_series = Series::zero(Cutoff::Infinite);
        for term in &file.solve.a {
            let mut m: Monomial = ring.one();
            m.s = term.s;
            for (l, e) in &term.beta {
                m.beta[class_index(l)?] = *e;
            }
            for (l, e) in &term.t {
                m.t[interior_index(l, "solve.a.t")?] = *e;
            }
            ring.add_term(&mut seed_series, m, term.coeff.0.clone());
        }

        let variant = Variant::parse(&file.solve.policy).ok_or_else(|| {
            config(format!(
                "solve.policy: unknown policy `{}` (plain, unit_divisor, real_three_typical, real_even, n3_direct)",
                file.solve.policy
            ))
        })?;
        let gauge = parse_gauge(&file.solve.gauge, "solve.gauge")?;
        let compare_gauge = parse_gauge(&file.solve.compare_gauge, "solve.compare_gauge")?;
        let over = overrides.gauge.as_deref().map(|g| parse_gauge(g, "--gauge")).transpose()?;
        let (gauges, gauge) = match over {
            Some(g) => ((gauge, g.clone()), g),
            None => ((gauge.clone(), compare_gauge), gauge),
        };
        Ok(Scenario {
            setting,
            store,
            seed_series,
            cutoff: Cutoff::Finite(cutoff),
            policy: SolverPolicy::new(variant, gauge),
            gauges,
            outputs: file.outputs,
        })
    }
}
