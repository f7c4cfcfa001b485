use std::fmt::Write;

use ogw::bounding::{solve as solve_pair, verify_bounding, BoundingPair};
use ogw::cochain::Cochain;
use ogw::novikov::{Monomial, Series};
use ogw::qops::{verify_all, verify_real_signs};
use ogw::rational::{num_den, q};
use ogw::setting::Setting;
use ogw::superpotential::{check_axioms, gauge_independence_check, omega as omega_of, InvariantTable, Superpotential, Sweep};

use crate::scenario::Scenario;
use crate::{CliError, Format, Outcome};

fn list(items: &[u32]) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn mono_fields(m: &Monomial) -> String {
    format!("beta={} s={} t={}", list(&m.beta), m.s, list(&m.t))
}

fn sorted<'a>(setting: &Setting, monos: impl Iterator<Item = &'a Monomial>) -> Vec<&'a Monomial> {
    let mut v: Vec<&Monomial> = monos.collect();
    v.sort_by(|a, b| setting.ring.sababa_cmp(a, b));
    v
}

fn series_rows(setting: &Setting, kind: &str, x: &Series, out: &mut String) {
    for m in sorted(setting, x.terms.keys()) {
        let (num, den) = num_den(&x.terms[m]);
        writeln!(out, "{kind} {} num={num} den={den}", mono_fields(m)).unwrap();
    }
}

fn series_text(setting: &Setting, x: &Series, out: &mut String) {
    if x.is_zero() {
        writeln!(out, "  0").unwrap();
    }
    for m in sorted(setting, x.terms.keys()) {
        writeln!(out, "  {:>8}  {}", x.terms[m].to_string(), setting.ring.fmt_mono(m)).unwrap();
    }
}

fn cochain_rows(setting: &Setting, b: &Cochain, out: &mut String) {
    for m in sorted(setting, b.terms.keys()) {
        for (i, c) in b.terms[m].iter().enumerate() {
            if *c != q(0) {
                let (num, den) = num_den(c);
                writeln!(out, "b {} basis={} num={num} den={den}", mono_fields(m), setting.model.labels[i]).unwrap();
            }
        }
    }
}

fn cochain_text(setting: &Setting, b: &Cochain, out: &mut String) {
    if b.is_zero() {
        writeln!(out, "  0").unwrap();
    }
    for m in sorted(setting, b.terms.keys()) {
        writeln!(out, "  {:<16}  {}", setting.ring.fmt_mono(m), setting.model.fmt_vec(&b.terms[m])).unwrap();
    }
}

pub fn verify(sc: &Scenario) -> Outcome {
    let mut reports = verify_all(&sc.setting, &sc.store, sc.outputs.verify_k);
    if sc.setting.interior.is_real() {
        reports.push(verify_real_signs(&sc.setting, &sc.store));
    }
    let mut text = String::new();
    for r in &reports {
        writeln!(text, "{r}").unwrap();
    }
    Outcome { passed: reports.iter().all(|r| r.passed), text }
}

/// Solves and certifies; a pair that fails its certificate is an error.
fn certified_pair(sc: &Scenario) -> Result<BoundingPair, CliError> {
    let pair = solve_pair(&sc.setting, &sc.store, &sc.seed_series, &sc.cutoff, &sc.policy)?;
    let report = verify_bounding(&sc.setting, &sc.store, &pair)?;
    if !report.passed() {
        return Err(CliError::Failure(format!("bounding certificate failed:\n{report}")));
    }
    Ok(pair)
}

pub fn solve(sc: &Scenario, format: Format) -> Result<Outcome, CliError> {
    let pair = solve_pair(&sc.setting, &sc.store, &sc.seed_series, &sc.cutoff, &sc.policy)?;
    let report = verify_bounding(&sc.setting, &sc.store, &pair)?;
    let setting = &sc.setting;
    let mut text = String::new();
    match format {
        Format::Text => {
            writeln!(text, "policy {} gauge {} cutoff {}", sc.policy.variant, sc.policy.gauge, sc.cutoff).unwrap();
            writeln!(text, "a = {}", setting.ring.fmt_series(&pair.a)).unwrap();
            writeln!(text, "b:").unwrap();
            cochain_text(setting, &pair.b, &mut text);
            writeln!(text, "c:").unwrap();
            series_text(setting, &pair.c, &mut text);
            writeln!(text, "primitive levels: {}", pair.primitive_solves()).unwrap();
            writeln!(text, "{report}").unwrap();
        }
        Format::Rows => {
            writeln!(text, "meta policy={} gauge={} cutoff={}", sc.policy.variant, sc.policy.gauge, sc.cutoff).unwrap();
            cochain_rows(setting, &pair.b, &mut text);
            series_rows(setting, "c", &pair.c, &mut text);
            for (name, ok, _) in &report.checks {
                writeln!(text, "check name=\"{name}\" passed={ok}").unwrap();
            }
        }
    }
    Ok(Outcome { passed: report.passed(), text })
}

fn superpotential(sc: &Scenario) -> Result<Superpotential, CliError> {
    let pair = certified_pair(sc)?;
    Ok(omega_of(&sc.setting, &sc.store, &pair)?)
}

pub fn omega(sc: &Scenario, format: Format) -> Result<Outcome, CliError> {
    let sp = superpotential(sc)?;
    let mut text = String::new();
    match format {
        Format::Text => {
            writeln!(text, "Ω modulo valuation > {}:", sp.cutoff).unwrap();
            series_text(&sc.setting, &sp.omega, &mut text);
            writeln!(text, "Ω̂:").unwrap();
            series_text(&sc.setting, &sp.omega_hat, &mut text);
        }
        Format::Rows => {
            series_rows(&sc.setting, "omega", &sp.omega, &mut text);
            series_rows(&sc.setting, "omega_hat", &sp.omega_hat, &mut text);
        }
    }
    Ok(Outcome { passed: true, text })
}

pub fn ogw(sc: &Scenario, format: Format) -> Result<Outcome, CliError> {
    let sp = superpotential(sc)?;
    let table = InvariantTable::from_superpotential(&sp);
    let text = match format {
        Format::Text => table.fmt_text(&sc.setting),
        Format::Rows => table.fmt_rows(&sc.setting),
    };
    Ok(Outcome { passed: true, text })
}

pub fn axioms(sc: &Scenario) -> Result<Outcome, CliError> {
    let sp = superpotential(sc)?;
    let sweep = Sweep { k_max: sc.outputs.sweep_k, l_max: sc.outputs.sweep_l };
    let reports = check_axioms(&sc.setting, &sp, &sweep)?;
    let mut text = String::new();
    for r in &reports {
        writeln!(text, "{r}").unwrap();
    }
    Ok(Outcome { passed: reports.iter().all(|r| r.passed), text })
}

pub fn gauge_check(sc: &Scenario) -> Result<Outcome, CliError> {
    let (g1, g2) = &sc.gauges;
    let report =
        gauge_independence_check(&sc.setting, &sc.store, &sc.seed_series, &sc.cutoff, sc.policy.variant, (g1, g2))?;
    let mut text = String::new();
    write!(
        text,
        "{} gauge_independence ({g1} vs {g2}): {} monomials compared, chains differ: {}, primitive levels: {}/{}",
        if report.passed { "PASS" } else { "FAIL" },
        report.compared,
        if report.chains_differ { "yes" } else { "no" },
        report.primitive_solves.0,
        report.primitive_solves.1,
    )
    .unwrap();
    if let Some(d) = &report.first_difference {
        write!(text, "; first difference at {d}").unwrap();
    }
    writeln!(text).unwrap();
    Ok(Outcome { passed: report.passed, text })
}
