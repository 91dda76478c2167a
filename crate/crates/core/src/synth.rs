//! Seeded synthetic panels with planted same-year coupling.
//!
//! Coupling is planted on the rate signals: a target's rate is
//! `Σ s_k·driver_k + sqrt(1 − Σ s_k²)·noise`. Source signals and noise are
//! Laplace draws with standard deviation `noise_sd`; a heavy-tailed law is
//! required because a standardized Gaussian pair is exchangeable, which
//! makes the two VC correlations equal in expectation. Rates are integrated
//! into level series starting at 100.
//!
//! RNG: ChaCha8 seeded from `seed`, one stream per entity (stream = entity
//! index). Within an entity, draws are year-major then variable in declared
//! order, one draw per (year, variable).

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::num::Real;
use crate::panel::{Dataset, DatasetBuilder, Normalization, PanelError, VariableId};

const START_LEVEL: f64 = 100.0;
/// Rates are clipped from below so levels stay positive.
const MIN_RATE: f64 = -0.9;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse spec: {0}")]
    Parse(String),
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("coupling graph has a cycle through {0:?}")]
    Cyclic(Vec<String>),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub driver: String,
    pub target: String,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_entities: usize,
    pub n_years: usize,
    #[serde(default = "default_start_year")]
    pub start_year: i32,
    /// Variable codes.
    pub variables: Vec<String>,
    #[serde(default)]
    pub coupling: Vec<Coupling>,
    #[serde(default = "default_noise_sd")]
    pub noise_sd: f64,
    pub seed: u64,
    /// Per-code normalization overrides.
    #[serde(default)]
    pub normalization: BTreeMap<String, Normalization>,
}

fn default_start_year() -> i32 {
    1990
}

fn default_noise_sd() -> f64 {
    0.1
}

impl SynthSpec {
    /// Two variables `x`, `y` with `x → y` at `strength`.
    pub fn pair(n_entities: usize, n_years: usize, strength: f64, seed: u64) -> Self {
        Self {
            n_entities,
            n_years,
            start_year: default_start_year(),
            variables: vec!["x".into(), "y".into()],
            coupling: vec![Coupling {
                driver: "x".into(),
                target: "y".into(),
                strength,
            }],
            noise_sd: default_noise_sd(),
            seed,
            normalization: BTreeMap::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, SynthError> {
        let spec: Self = toml::from_str(text).map_err(|e| SynthError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SynthError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn variable_ids(&self) -> Vec<VariableId> {
        self.variables
            .iter()
            .map(|code| {
                let mut v = VariableId::from_code(code);
                if let Some(n) = self.normalization.get(code) {
                    v.normalization = *n;
                }
                v
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let invalid = |m: String| Err(SynthError::Invalid(m));
        if self.n_entities == 0 {
            return invalid("n_entities must be positive".into());
        }
        if self.n_years < 5 {
            return invalid(format!("n_years must be at least 5, got {}", self.n_years));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            return invalid(format!("noise_sd must be positive, got {}", self.noise_sd));
        }
        if self.variables.is_empty() {
            return invalid("no variables".into());
        }
        let mut index = HashMap::new();
        for (k, code) in self.variables.iter().enumerate() {
            if code.is_empty() || index.insert(code.as_str(), k).is_some() {
                return invalid(format!("variable code `{code}` empty or repeated"));
            }
        }
        for code in self.normalization.keys() {
            if !index.contains_key(code.as_str()) {
                return invalid(format!("normalization for unknown variable `{code}`"));
            }
        }
        let mut load: HashMap<&str, f64> = HashMap::new();
        for c in &self.coupling {
            for code in [&c.driver, &c.target] {
                if !index.contains_key(code.as_str()) {
                    return invalid(format!("coupling names unknown variable `{code}`"));
                }
            }
            if !(0.0..=1.0).contains(&c.strength) {
                return invalid(format!("strength {} outside [0, 1]", c.strength));
            }
            *load.entry(c.target.as_str()).or_default() += c.strength * c.strength;
        }
        if let Some((target, s2)) = load.iter().find(|(_, &s2)| s2 > 1.0 + 1e-12) {
            return invalid(format!("squared strengths into `{target}` sum to {s2} > 1"));
        }
        self.topological_order().map(|_| ())
    }

    /// Variable indices ordered so drivers precede targets; ties keep
    /// declared order.
    fn topological_order(&self) -> Result<Vec<usize>, SynthError> {
        let n = self.variables.len();
        let pos = |code: &str| {
            self.variables
                .iter()
                .position(|v| v == code)
                .expect("validated")
        };
        let mut indegree = vec![0usize; n];
        let mut edges = vec![Vec::new(); n];
        for c in &self.coupling {
            let (d, t) = (pos(&c.driver), pos(&c.target));
            edges[d].push(t);
            indegree[t] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut done = vec![false; n];
        while order.len() < n {
            let Some(next) = (0..n).find(|&k| !done[k] && indegree[k] == 0) else {
                let stuck = (0..n)
                    .filter(|&k| !done[k])
                    .map(|k| self.variables[k].clone())
                    .collect();
                return Err(SynthError::Cyclic(stuck));
            };
            done[next] = true;
            order.push(next);
            for &t in &edges[next] {
                indegree[t] -= 1;
            }
        }
        Ok(order)
    }
}

/// Entity identifier; fixed width so that identifiers do not depend on
/// `n_entities`.
pub fn entity_name(index: usize) -> String {
    format!("E{index:06}")
}

fn laplace(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = u - 0.5;
    let scale = sd / std::f64::consts::SQRT_2;
    -scale * v.signum() * (1.0 - 2.0 * v.abs()).ln()
}

/// Level paths for one entity: `levels[variable][year]`.
fn entity_levels(
    spec: &SynthSpec,
    order: &[usize],
    drivers: &[Vec<(usize, f64)>],
    entity: usize,
) -> Vec<Vec<f64>> {
    let n_vars = spec.variables.len();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(entity as u64);

    let mut levels = vec![Vec::with_capacity(spec.n_years); n_vars];
    for path in &mut levels {
        path.push(START_LEVEL);
    }
    let mut innovations = vec![0.0; n_vars];
    let mut signals = vec![0.0; n_vars];
    for _ in 1..spec.n_years {
        for e in innovations.iter_mut() {
            *e = laplace(&mut rng, spec.noise_sd);
        }
        for &k in order {
            signals[k] = if drivers[k].is_empty() {
                innovations[k]
            } else {
                let coupled: f64 = drivers[k].iter().map(|&(d, s)| s * signals[d]).sum();
                let load: f64 = drivers[k].iter().map(|&(_, s)| s * s).sum();
                coupled + (1.0 - load).max(0.0).sqrt() * innovations[k]
            };
        }
        for (path, &rate) in levels.iter_mut().zip(&signals) {
            let last = *path.last().expect("seeded with start level");
            path.push(last * (1.0 + rate.max(MIN_RATE)));
        }
    }
    levels
}

pub fn generate<T: Real>(spec: &SynthSpec) -> Result<Dataset<T>, SynthError> {
    spec.validate()?;
    let order = spec.topological_order()?;
    let mut drivers = vec![Vec::new(); spec.variables.len()];
    for c in &spec.coupling {
        let d = spec
            .variables
            .iter()
            .position(|v| *v == c.driver)
            .expect("validated");
        let t = spec
            .variables
            .iter()
            .position(|v| *v == c.target)
            .expect("validated");
        drivers[t].push((d, c.strength));
    }

    let paths: Vec<Vec<Vec<f64>>> = (0..spec.n_entities)
        .into_par_iter()
        .map(|k| entity_levels(spec, &order, &drivers, k))
        .collect();

    let start = spec.start_year;
    let end = start + spec.n_years as i32 - 1;
    let mut builder = DatasetBuilder::new(start, end, spec.variable_ids())?;
    for (k, levels) in paths.iter().enumerate() {
        let entity = entity_name(k);
        for (code, path) in spec.variables.iter().zip(levels) {
            for (offset, &value) in path.iter().enumerate() {
                builder.set(&entity, code, start + offset as i32, Some(T::of(value)))?;
            }
        }
    }
    Ok(builder.build())
}
