//! Line-oriented text format for q-operator stores.
//!
//! ```text
//! meta cutoff=3 max_arity=4
//! disk beta=1 k=2 interior=- inputs=vol,vol out=y value=-3/2
//! point beta=1 interior=1,1 value=2
//! ```
//!
//! Inputs and outputs are basis labels, interior entries are class indices, `-`
//! marks an empty list and `#` starts a comment. `sphere` records are kept as is.

use std::fmt::Write;

use super::{QOperators, QopsError, StoreMeta};
use crate::novikov::Beta;
use crate::rational::parse_q;
use crate::setting::Setting;
use crate::Q;

fn list<T: ToString>(items: &[T]) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

pub fn save_store(setting: &Setting, q: &QOperators) -> String {
    let labels = &setting.model.labels;
    let mut out = String::new();
    writeln!(out, "meta cutoff={} max_arity={}", q.meta.cutoff, q.meta.max_arity).unwrap();
    for (key, tensor) in &q.disk {
        for (inputs, v) in tensor {
            let ins: Vec<&str> = inputs.iter().map(|&i| labels[i].as_str()).collect();
            for (u, c) in v {
                writeln!(
                    out,
                    "disk beta={} k={} interior={} inputs={} out={} value={}",
                    list(&key.beta),
                    key.k,
                    list(&key.interior),
                    list(&ins),
                    labels[*u],
                    c
                )
                .unwrap();
            }
        }
    }
    for ((beta, interior), v) in &q.point {
        writeln!(out, "point beta={} interior={} value={}", list(beta), list(interior), v).unwrap();
    }
    for line in &q.inert {
        writeln!(out, "{line}").unwrap();
    }
    out
}

struct Fields<'a> {
    line: usize,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn get(&self, name: &str) -> Result<&'a str, QopsError> {
        self.pairs
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| QopsError::Parse { line: self.line, msg: format!("missing field `{name}`") })
    }

    fn err(&self, msg: String) -> QopsError {
        QopsError::Parse { line: self.line, msg }
    }

    fn items(&self, name: &str) -> Result<Vec<&'a str>, QopsError> {
        let v = self.get(name)?;
        Ok(if v == "-" { vec![] } else { v.split(',').collect() })
    }

    fn numbers<T: std::str::FromStr>(&self, name: &str) -> Result<Vec<T>, QopsError> {
        self.items(name)?
            .into_iter()
            .map(|s| s.parse().map_err(|_| self.err(format!("bad entry `{s}` in `{name}`"))))
            .collect()
    }

    fn rational(&self, name: &str) -> Result<Q, QopsError> {
        let v = self.get(name)?;
        parse_q(v).ok_or_else(|| self.err(format!("`{v}` is not an exact rational")))
    }
}

pub fn load_store(setting: &Setting, text: &str) -> Result<QOperators, QopsError> {
    let model = &setting.model;
    let ring = &setting.ring;
    let mut meta: Option<StoreMeta> = None;
    let mut q = QOperators::classical(Q::from_integer(0.into()), 0);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let kind = words.next().unwrap_or_default();
        if kind == "sphere" {
            q.inert.push(line.to_string());
            continue;
        }
        let mut pairs = Vec::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| QopsError::Parse { line: i + 1, msg: format!("expected key=value, got `{w}`") })?;
            pairs.push((k, v));
        }
        let f = Fields { line: i + 1, pairs };
        let check_beta = |beta: &Beta| -> Result<(), QopsError> {
            if beta.len() != ring.num_classes() {
                return Err(f.err(format!("beta has {} entries, the ring has {} classes", beta.len(), ring.num_classes())));
            }
            Ok(())
        };
        let check_interior = |interior: &[usize]| -> Result<(), QopsError> {
            match interior.iter().find(|&&j| j >= ring.num_interior()) {
                Some(j) => Err(f.err(format!("interior class {j} does not exist"))),
                None => Ok(()),
            }
        };
        match kind {
            "meta" => {
                let cutoff = f.rational("cutoff")?;
                let max_arity = f.get("max_arity")?.parse().map_err(|_| f.err("bad max_arity".into()))?;
                meta = Some(StoreMeta { cutoff, max_arity });
            }
            "disk" => {
                let beta: Beta = f.numbers("beta")?;
                check_beta(&beta)?;
                let k: usize = f.get("k")?.parse().map_err(|_| f.err("bad arity".into()))?;
                let interior: Vec<usize> = f.numbers("interior")?;
                check_interior(&interior)?;
                let label = |s: &str| model.index(s).ok_or_else(|| f.err(format!("unknown basis element `{s}`")));
                let inputs = f.items("inputs")?.into_iter().map(label).collect::<Result<Vec<_>, _>>()?;
                if inputs.len() != k {
                    return Err(f.err(format!("k={k} but {} inputs", inputs.len())));
                }
                let out = label(f.get("out")?)?;
                let value = f.rational("value")?;
                q.set(beta, interior, inputs, out, value);
            }
            "point" => {
                let beta: Beta = f.numbers("beta")?;
                check_beta(&beta)?;
                let interior: Vec<usize> = f.numbers("interior")?;
                check_interior(&interior)?;
                let value = f.rational("value")?;
                q.point.insert((beta, interior), value);
            }
            other => return Err(f.err(format!("unknown record `{other}`"))),
        }
    }
    q.meta = meta.ok_or_else(|| QopsError::Parse { line: 0, msg: "missing meta record".into() })?;
    Ok(q)
}
