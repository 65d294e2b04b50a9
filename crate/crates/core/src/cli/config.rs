//! Run configuration: TOML (or JSON) with sections
//! `model`, `grid`, `fock`, `flow`, `solver`, `spectrum`, `multisource`,
//! `identities`, `output` and an array of `sources`.
//!
//! Both encodings are read into a `serde_json::Value` and extracted by hand so
//! that every error names the offending key path, e.g. `model.e0`.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::multisource::SourceConfig;
use crate::radial_grid::QuadratureScheme;
use crate::renorm::{FlowConfig, SolverConfig};
use crate::yukawa::{IbcParams, Point3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("output.format: expected csv or json, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub pos: Point3,
    pub params: IbcParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub g: f64,
    pub e0: f64,
    pub lambda_max: f64,
    pub nodes: usize,
    pub scheme: QuadratureScheme,
    pub max_particles: usize,
    pub lambda_list: Vec<f64>,
    pub solver: SolverConfig,
    /// Eigenvalues requested by the spectrum command.
    pub spectrum_k: usize,
    pub sources: Vec<SourceSpec>,
    /// λ-interval searched for zeros of det S(λ).
    pub search_interval: (f64, f64),
    pub trials: usize,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let flow = FlowConfig::default();
        RunConfig {
            g: flow.g,
            e0: flow.e0,
            lambda_max: flow.lambda_max,
            nodes: flow.nodes,
            scheme: flow.scheme,
            max_particles: flow.n_max,
            lambda_list: flow.lambda_list,
            solver: flow.solver,
            spectrum_k: 3,
            sources: Vec::new(),
            search_interval: (1e-8, 1e4),
            trials: 50,
            format: None,
            out: None,
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["g", "e0"]),
    ("grid", &["lambda_max", "nodes", "scheme"]),
    ("fock", &["max_particles"]),
    ("flow", &["lambda_list"]),
    ("solver", &["tol", "max_iter", "seed"]),
    ("spectrum", &["k"]),
    ("multisource", &["search_interval"]),
    ("identities", &["trials"]),
    ("output", &["format", "path"]),
];

const SOURCE_KEYS: &[&str] = &["pos", "theta", "alpha", "beta", "gamma", "delta"];

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidConfig(format!("{path}: {msg}"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(path, format!("expected a finite number, got {v}")))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| err(path, format!("expected a non-negative integer, got {v}")))
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| err(path, "expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

struct Section<'a> {
    name: &'a str,
    map: Option<&'a Map<String, Value>>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<(&'a Value, String)> {
        self.map
            .and_then(|m| m.get(key))
            .map(|v| (v, format!("{}.{key}", self.name)))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |(v, p)| number(v, &p))
    }

    fn f64_required(&self, key: &str) -> Result<f64> {
        let (v, p) = self
            .get(key)
            .ok_or_else(|| err(&format!("{}.{key}", self.name), "missing required key"))?;
        number(v, &p)
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key).map_or(Ok(default), |(v, p)| count(v, &p))
    }
}

fn section<'a>(root: &'a Map<String, Value>, name: &'a str) -> Result<Section<'a>> {
    let map = match root.get(name) {
        None => None,
        Some(Value::Object(m)) => Some(m),
        Some(_) => return Err(err(name, "expected a table")),
    };
    Ok(Section { name, map })
}

fn check_keys(root: &Map<String, Value>) -> Result<()> {
    for (key, value) in root {
        if key == "sources" {
            continue;
        }
        let Some((_, allowed)) = SECTIONS.iter().find(|(s, _)| s == key) else {
            return Err(err(key, "unknown section"));
        };
        if let Value::Object(m) = value {
            for k in m.keys() {
                if !allowed.contains(&k.as_str()) {
                    return Err(err(&format!("{key}.{k}"), "unknown key"));
                }
            }
        }
    }
    Ok(())
}

fn parse_source(v: &Value, i: usize) -> Result<SourceSpec> {
    let path = format!("sources[{i}]");
    let m = v.as_object().ok_or_else(|| err(&path, "expected a table"))?;
    for k in m.keys() {
        if !SOURCE_KEYS.contains(&k.as_str()) {
            return Err(err(&format!("{path}.{k}"), "unknown key"));
        }
    }
    let sec = Section { name: &path, map: Some(m) };
    let (pos_v, pos_p) = sec.get("pos").ok_or_else(|| err(&format!("{path}.pos"), "missing required key"))?;
    let pos = numbers(pos_v, &pos_p)?;
    let pos: Point3 = pos
        .try_into()
        .map_err(|_| err(&pos_p, "expected three coordinates"))?;
    let params = IbcParams {
        theta: sec.f64_or("theta", 0.0)?,
        alpha: sec.f64_required("alpha")?,
        beta: sec.f64_required("beta")?,
        gamma: sec.f64_required("gamma")?,
        delta: sec.f64_required("delta")?,
    };
    params.validate().map_err(|e| err(&path, e))?;
    Ok(SourceSpec { pos, params })
}

/// Which decoder [`RunConfig::parse`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Syntax {
    Toml,
    Json,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        Self::parse(&text, if is_json { Syntax::Json } else { Syntax::Toml })
    }

    pub fn parse(text: &str, syntax: Syntax) -> Result<Self> {
        let root: Value = match syntax {
            Syntax::Json => serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("JSON: {e}")))?,
            Syntax::Toml => toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("TOML: {e}")))?,
        };
        let root = root
            .as_object()
            .ok_or_else(|| Error::InvalidConfig("top level must be a table".into()))?;
        check_keys(root)?;
        let d = RunConfig::default();

        let model = section(root, "model")?;
        let grid = section(root, "grid")?;
        let fock = section(root, "fock")?;
        let flow = section(root, "flow")?;
        let solver = section(root, "solver")?;
        let spectrum = section(root, "spectrum")?;
        let multi = section(root, "multisource")?;
        let ident = section(root, "identities")?;
        let output = section(root, "output")?;

        let scheme = match grid.get("scheme") {
            None => d.scheme,
            Some((v, p)) => v
                .as_str()
                .ok_or_else(|| err(&p, "expected a string"))?
                .parse()
                .map_err(|e| err(&p, e))?,
        };
        let lambda_list = match flow.get("lambda_list") {
            None => d.lambda_list.clone(),
            Some((v, p)) => numbers(v, &p)?,
        };
        let search_interval = match multi.get("search_interval") {
            None => d.search_interval,
            Some((v, p)) => match numbers(v, &p)?.as_slice() {
                [lo, hi] => (*lo, *hi),
                _ => return Err(err(&p, "expected [lo, hi]")),
            },
        };
        let format = match output.get("format") {
            None => None,
            Some((v, p)) => Some(v.as_str().ok_or_else(|| err(&p, "expected a string"))?.parse()?),
        };
        let out = match output.get("path") {
            None => None,
            Some((v, p)) => Some(PathBuf::from(v.as_str().ok_or_else(|| err(&p, "expected a string"))?)),
        };
        let sources = match root.get("sources") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| parse_source(v, i))
                .collect::<Result<_>>()?,
            Some(_) => return Err(err("sources", "expected an array of tables")),
        };
        let seed = match solver.get("seed") {
            None => d.solver.seed,
            Some((v, p)) => v.as_u64().ok_or_else(|| err(&p, "expected a non-negative integer"))?,
        };

        let cfg = RunConfig {
            g: model.f64_required("g")?,
            e0: model.f64_required("e0")?,
            lambda_max: grid.f64_or("lambda_max", d.lambda_max)?,
            nodes: grid.usize_or("nodes", d.nodes)?,
            scheme,
            max_particles: fock.usize_or("max_particles", d.max_particles)?,
            lambda_list,
            solver: SolverConfig {
                tol: solver.f64_or("tol", d.solver.tol)?,
                max_iter: solver.usize_or("max_iter", d.solver.max_iter)?,
                seed,
            },
            spectrum_k: spectrum.usize_or("k", d.spectrum_k)?,
            sources,
            search_interval,
            trials: ident.usize_or("trials", d.trials)?,
            format,
            out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e0 > 0.0) {
            return Err(err("model.e0", format!("must be positive, got {}", self.e0)));
        }
        if !(self.lambda_max > 0.0) {
            return Err(err("grid.lambda_max", "must be positive"));
        }
        if self.nodes == 0 {
            return Err(err("grid.nodes", "must be at least 1"));
        }
        if let QuadratureScheme::CompositeGaussLegendre { panels } = self.scheme {
            if panels == 0 || !self.nodes.is_multiple_of(panels) {
                return Err(err("grid.scheme", format!("{} nodes do not split into {panels} panels", self.nodes)));
            }
        }
        if self.lambda_list.is_empty() {
            return Err(err("flow.lambda_list", "must not be empty"));
        }
        for (i, &l) in self.lambda_list.iter().enumerate() {
            let p = format!("flow.lambda_list[{i}]");
            if !(l > 0.0) {
                return Err(err(&p, "cutoffs must be positive"));
            }
            if l > self.lambda_max {
                return Err(err(&p, format!("cutoff {l} exceeds grid.lambda_max = {}", self.lambda_max)));
            }
            if i > 0 && !(l > self.lambda_list[i - 1]) {
                return Err(err(&p, "cutoffs must be strictly ascending"));
            }
        }
        if !(self.solver.tol > 0.0) {
            return Err(err("solver.tol", "must be positive"));
        }
        if self.solver.max_iter == 0 {
            return Err(err("solver.max_iter", "must be at least 1"));
        }
        if self.spectrum_k < 2 {
            return Err(err("spectrum.k", "must be at least 2"));
        }
        let (lo, hi) = self.search_interval;
        if !(lo > 0.0 && hi > lo) {
            return Err(err("multisource.search_interval", "need 0 < lo < hi"));
        }
        if !self.sources.is_empty() {
            self.source_config().map_err(|e| match e {
                Error::InvalidConfig(m) | Error::InvalidArgument(m) => err("sources", m),
                other => err("sources", other),
            })?;
        }
        Ok(())
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            g: self.g,
            e0: self.e0,
            lambda_max: self.lambda_max,
            nodes: self.nodes,
            scheme: self.scheme,
            n_max: self.max_particles,
            lambda_list: self.lambda_list.clone(),
            solver: self.solver,
        }
    }

    pub fn source_config(&self) -> Result<SourceConfig> {
        if self.sources.is_empty() {
            return Err(err("sources", "at least one source is required"));
        }
        SourceConfig::new(
            self.sources.iter().map(|s| s.pos).collect(),
            self.sources.iter().map(|s| s.params).collect(),
            self.e0,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_uses_defaults() {
        let c = RunConfig::parse("[model]\ng = 0.5\ne0 = 2.0\n", Syntax::Toml).unwrap();
        assert_eq!(c.g, 0.5);
        assert_eq!(c.lambda_list, vec![5.0, 10.0, 20.0, 40.0]);
        assert_eq!(c.nodes, 32);
    }

    #[test]
    fn errors_name_key_paths() {
        let e = RunConfig::parse("[model]\ng = 1.0\n", Syntax::Toml).unwrap_err();
        assert!(e.to_string().contains("model.e0"), "{e}");
        let e = RunConfig::parse("[model]\ng = 1\ne0 = 1\n[flow]\nlambda_list = [5, 3]\n", Syntax::Toml).unwrap_err();
        assert!(e.to_string().contains("flow.lambda_list[1]"), "{e}");
        let e = RunConfig::parse("[model]\ng = 1\ne0 = 1\nfoo = 2\n", Syntax::Toml).unwrap_err();
        assert!(e.to_string().contains("model.foo"), "{e}");
        let e = RunConfig::parse(
            r#"{"model": {"g": 1, "e0": 1}, "sources": [{"pos": [0,0,0], "alpha": 2, "beta": 1, "gamma": 1, "delta": 0.75}]}"#,
            Syntax::Json,
        )
        .unwrap_err();
        assert!(e.to_string().contains("sources[0]"), "{e}");
    }

    #[test]
    fn sources_round_trip() {
        let text = "[model]\ng = 1\ne0 = 1\n\n[[sources]]\npos = [0, 0, 0]\nalpha = 1\nbeta = 0\ngamma = 0\ndelta = 1\n\n[[sources]]\npos = [1, 0, 0]\ntheta = 0.3\nalpha = 2\nbeta = 1\ngamma = 1\ndelta = 1\n";
        let c = RunConfig::parse(text, Syntax::Toml).unwrap();
        assert_eq!(c.sources.len(), 2);
        assert_eq!(c.sources[1].params.theta, 0.3);
        assert_eq!(c.source_config().unwrap().len(), 2);
    }
}
