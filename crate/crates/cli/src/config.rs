use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use vcnet::panel::{Normalization, Schema, VariableId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    /// Tab-separated values.
    Tsv,
    /// Column-aligned plain text.
    Text,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Tsv => "tsv",
            TableFormat::Text => "txt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub outdir: PathBuf,
    pub h: f64,
    pub alpha: f64,
    pub schema: Schema,
    pub formats: Vec<TableFormat>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, outdir: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            outdir: outdir.into(),
            h: vcnet::DEFAULT_H,
            alpha: vcnet::DEFAULT_ALPHA,
            schema: Schema::default(),
            formats: vec![TableFormat::Tsv, TableFormat::Text],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h >= 0.0 && self.h.is_finite()) {
            bail!("--h must be a finite value >= 0, got {}", self.h);
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("--alpha must lie in (0, 1), got {}", self.alpha);
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    #[serde(default = "default_entity")]
    entity_column: String,
    #[serde(default = "default_year")]
    year_column: String,
    window: Option<(i32, i32)>,
    variables: Option<Vec<VariableEntry>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableEntry {
    code: String,
    label: Option<String>,
    normalization: Option<Normalization>,
}

fn default_entity() -> String {
    "entity".into()
}

fn default_year() -> String {
    "year".into()
}

/// Parses a TOML column mapping:
///
/// ```toml
/// entity_column = "firm"
/// year_column = "fy"
/// window = [1990, 2018]
/// [[variables]]
/// code = "i"
/// label = "net income"
/// normalization = "revenue"
/// ```
pub fn parse_schema(text: &str) -> Result<Schema> {
    let file: SchemaFile = toml::from_str(text).context("invalid schema file")?;
    let variables = file.variables.map(|vars| {
        vars.into_iter()
            .map(|entry| {
                let mut var = VariableId::from_code(&entry.code);
                if let Some(label) = entry.label {
                    var.label = label;
                }
                if let Some(n) = entry.normalization {
                    var.normalization = n;
                }
                var
            })
            .collect()
    });
    Ok(Schema {
        entity_column: file.entity_column,
        year_column: file.year_column,
        variables,
        window: file.window,
    })
}

pub fn load_schema(path: &Path) -> Result<Schema> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading schema {}", path.display()))?;
    parse_schema(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_file_overrides() {
        let schema = parse_schema(
            r#"
            entity_column = "firm"
            window = [1990, 2018]
            [[variables]]
            code = "r"
            [[variables]]
            code = "x"
            label = "exports"
            normalization = "revenue"
            "#,
        )
        .unwrap();
        assert_eq!(schema.entity_column, "firm");
        assert_eq!(schema.year_column, "year");
        assert_eq!(schema.window, Some((1990, 2018)));
        let vars = schema.variables.unwrap();
        assert_eq!(vars[0].label, "revenue");
        assert_eq!(vars[1].label, "exports");
        assert_eq!(vars[1].normalization, Normalization::Revenue);
    }

    #[test]
    fn schema_rejects_unknown_keys() {
        assert!(parse_schema("colour = 1").is_err());
    }

    #[test]
    fn run_config_bounds() {
        let mut c = RunConfig::new("in.csv", "out");
        assert!(c.validate().is_ok());
        c.h = -1.0;
        assert!(c.validate().is_err());
        c.h = 0.2;
        c.alpha = 0.0;
        assert!(c.validate().is_err());
    }
}
