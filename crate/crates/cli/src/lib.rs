//! Command implementations behind the `vcnet` binary.

pub mod config;
pub mod hist;
pub mod report;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use vcnet::pipeline::pair_firm_stats;
use vcnet::{
    analyze, build_rate_panel, generate, load_csv, AnalysisConfig, DatasetF64, Schema, SynthSpec,
};

pub use config::{load_schema, parse_schema, RunConfig, TableFormat};
pub use hist::{histogram, Histogram};

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzeSummary {
    pub entities: usize,
    pub pairs: usize,
    pub directed_edges: usize,
    pub negative_denominators: usize,
    pub files: Vec<PathBuf>,
}

impl fmt::Display for AnalyzeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} entities, {} pairs, {} directed edges",
            self.entities, self.pairs, self.directed_edges
        )?;
        if self.negative_denominators > 0 {
            write!(
                f,
                " ({} rates with a negative denominator)",
                self.negative_denominators
            )?;
        }
        for file in &self.files {
            write!(f, "\n  {}", file.display())?;
        }
        Ok(())
    }
}

fn load(input: &Path, schema: &Schema) -> Result<DatasetF64> {
    load_csv(input, schema).with_context(|| format!("loading {}", input.display()))
}

/// Writes every file or none: on failure, files already written in this call
/// are removed.
fn write_files(outdir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = outdir.join(name);
        if let Err(e) = fs::write(&path, contents) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        written.push(path);
    }
    Ok(written)
}

/// Runs the full analysis and writes tables, networks and per-entity detail
/// into `config.outdir`.
pub fn cmd_analyze(config: &RunConfig) -> Result<AnalyzeSummary> {
    config.validate()?;
    let dataset = load(&config.input, &config.schema)?;
    let analysis = analyze(
        &dataset,
        &AnalysisConfig {
            h: config.h,
            alpha: config.alpha,
        },
    )?;
    let rendered = report::render_all(&analysis, dataset.variables(), &config.formats);
    let files = write_files(&config.outdir, &rendered)?;
    Ok(AnalyzeSummary {
        entities: dataset.entities().len(),
        pairs: analysis.pairs.len(),
        directed_edges: analysis.network.directed.len(),
        negative_denominators: analysis.negative_denominators,
        files,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateSummary {
    pub output: PathBuf,
    pub entities: usize,
    pub years: (i32, i32),
    pub variables: Vec<String>,
    pub couplings: usize,
    pub seed: u64,
}

impl fmt::Display for SimulateSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "wrote {}: {} entities, years {}..={}, variables [{}], {} couplings, seed {}",
            self.output.display(),
            self.entities,
            self.years.0,
            self.years.1,
            self.variables.join(", "),
            self.couplings,
            self.seed
        )
    }
}

/// Generates a synthetic panel from a TOML spec and writes it as CSV.
pub fn cmd_simulate(spec_path: &Path, output: &Path, seed: Option<u64>) -> Result<SimulateSummary> {
    let mut spec = SynthSpec::load(spec_path)
        .with_context(|| format!("loading spec {}", spec_path.display()))?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let dataset: DatasetF64 = generate(&spec)?;
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    if let Err(e) = dataset.save_csv(output) {
        let _ = fs::remove_file(output);
        return Err(e).with_context(|| format!("writing {}", output.display()));
    }
    Ok(SimulateSummary {
        output: output.to_path_buf(),
        entities: dataset.entities().len(),
        years: dataset.window(),
        variables: spec.variables.clone(),
        couplings: spec.coupling.len(),
        seed: spec.seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Statistic {
    /// Per-entity Pearson correlation.
    Pearson,
    /// Per-entity ΔF.
    DeltaF,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Pearson => "pearson",
            Statistic::DeltaF => "delta_f",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistConfig {
    pub input: PathBuf,
    pub outdir: PathBuf,
    pub schema: Schema,
    pub h: f64,
    pub pair: (String, String),
    pub statistic: Statistic,
    pub bins: usize,
}

/// Parses `"s,s'"` into an ordered pair of variable codes.
pub fn parse_pair(text: &str) -> Result<(String, String)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("pair must be written as 'first,second', got '{text}'"))?;
    let (a, b) = (a.trim(), b.trim());
    if a.is_empty() || b.is_empty() || a == b {
        bail!("pair needs two distinct variable codes, got '{text}'");
    }
    Ok((a.to_string(), b.to_string()))
}

/// Computes the per-entity distribution of one statistic for one ordered
/// pair and writes it as a unit-area histogram.
pub fn cmd_hist(config: &HistConfig) -> Result<(PathBuf, Histogram)> {
    if !(config.h >= 0.0 && config.h.is_finite()) {
        bail!("--h must be a finite value >= 0, got {}", config.h);
    }
    if config.bins == 0 {
        bail!("--bins must be at least 1");
    }
    let dataset = load(&config.input, &config.schema)?;
    let (first, second) = (&config.pair.0, &config.pair.1);
    for code in [first, second] {
        if dataset.variable(code).is_none() {
            bail!("unknown variable '{code}' in pair");
        }
    }
    let rates = build_rate_panel(&dataset)?;
    let (firms, _) = pair_firm_stats(&dataset, &rates, first, second, config.h)?;
    let values: Vec<f64> = firms
        .iter()
        .filter_map(|f| match config.statistic {
            Statistic::Pearson => f.vc.pearson,
            Statistic::DeltaF => f.vc.delta_f,
        })
        .collect();
    let hist = histogram(&values, config.bins).ok_or_else(|| {
        anyhow!(
            "no valid {} values for pair ({first}, {second})",
            config.statistic.name()
        )
    })?;
    let name = format!("hist_{first}_{second}_{}.tsv", config.statistic.name());
    let comment = format!(
        "statistic={} pair={first},{second} h={}",
        config.statistic.name(),
        config.h
    );
    let files = write_files(&config.outdir, &[(name, hist.to_tsv(&comment))])?;
    Ok((files.into_iter().next().expect("one file"), hist))
}
