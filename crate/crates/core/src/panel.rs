//! Entity × variable × year panel data with explicit missing values.
//!
//! Input is CSV in long format: one row per (entity, year), one column per
//! variable. An empty or unparseable cell is a missing value; a missing year
//! is stored as `None` and never as zero.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::num::Real;

/// Fewest usable rate points for an entity to contribute to a pair.
pub const MIN_RATE_POINTS: usize = 4;

/// Code of the variable used as denominator by revenue-normalized rates.
pub const REVENUE_CODE: &str = "r";

#[derive(Debug, Error)]
pub enum PanelError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema error: column `{column}`: {reason}")]
    Schema { column: String, reason: String },
    #[error("duplicate key (entity `{entity}`, year {year}) at rows {first_row} and {second_row}")]
    DuplicateKey {
        entity: String,
        year: i32,
        first_row: u64,
        second_row: u64,
    },
    #[error("row {row}: cannot parse year `{value}`")]
    BadYear { row: u64, value: String },
    #[error("row {row}: empty entity identifier")]
    EmptyEntity { row: u64 },
    #[error("row {row}: year {year} outside window [{start}, {end}]")]
    YearOutOfWindow {
        row: u64,
        year: i32,
        start: i32,
        end: i32,
    },
    #[error("invalid window [{start}, {end}]: start must precede end")]
    InvalidWindow { start: i32, end: i32 },
    #[error("no data rows")]
    Empty,
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` is revenue-normalized but the dataset has no `{revenue}` variable", revenue = REVENUE_CODE)]
    MissingRevenue { variable: String },
}

/// How a variable's year-over-year change is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `(x(t+1) - x(t)) / x(t)`
    Own,
    /// `(x(t+1) - x(t)) / r(t)` with `r` the revenue series.
    Revenue,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariableId {
    pub code: String,
    pub label: String,
    pub normalization: Normalization,
}

impl VariableId {
    pub fn new(
        code: impl Into<String>,
        label: impl Into<String>,
        normalization: Normalization,
    ) -> Self {
        Self {
            code: code.into(),
            label: label.into(),
            normalization,
        }
    }

    /// Builds a variable from its code, using the default label and
    /// normalization for the five accounting codes and `Own` otherwise.
    pub fn from_code(code: &str) -> Self {
        let (label, normalization) = match code {
            "r" => ("revenue", Normalization::Own),
            "i" => ("net income", Normalization::Revenue),
            "p" => ("operating income", Normalization::Revenue),
            "o" => ("own capital", Normalization::Own),
            "m" => ("market capitalization", Normalization::Own),
            other => (other, Normalization::Own),
        };
        Self::new(code, label, normalization)
    }

    /// The five accounting variables in table order: r, i, p, o, m.
    pub fn default_set() -> Vec<VariableId> {
        ["r", "i", "p", "o", "m"]
            .iter()
            .map(|c| Self::from_code(c))
            .collect()
    }

    /// `label(code)`, as used in report tables.
    pub fn display_name(&self) -> String {
        if self.label == self.code {
            self.code.clone()
        } else {
            format!("{}({})", self.label, self.code)
        }
    }
}

/// One entity's values of one variable over the dataset window.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelSeries<T> {
    pub entity: String,
    pub variable: VariableId,
    pub start: i32,
    pub end: i32,
    /// Every year of `[start, end]` is a key; `None` marks a missing value.
    pub values: BTreeMap<i32, Option<T>>,
}

impl<T: Real> PanelSeries<T> {
    pub fn empty(entity: &str, variable: VariableId, start: i32, end: i32) -> Self {
        Self {
            entity: entity.to_string(),
            variable,
            start,
            end,
            values: (start..=end).map(|y| (y, None)).collect(),
        }
    }

    pub fn get(&self, year: i32) -> Option<T> {
        self.values.get(&year).copied().flatten()
    }

    pub fn is_complete(&self) -> bool {
        self.values.values().all(Option::is_some)
    }
}

/// Immutable panel of series keyed by `(entity, variable code)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    start: i32,
    end: i32,
    entities: Vec<String>,
    known: HashSet<String>,
    variables: Vec<VariableId>,
    series: BTreeMap<(String, String), PanelSeries<T>>,
}

impl<T: Real> Dataset<T> {
    pub fn window(&self) -> (i32, i32) {
        (self.start, self.end)
    }

    /// Entities in order of first appearance.
    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn variables(&self) -> &[VariableId] {
        &self.variables
    }

    pub fn variable(&self, code: &str) -> Option<&VariableId> {
        self.variables.iter().find(|v| v.code == code)
    }

    pub fn has_entity(&self, entity: &str) -> bool {
        self.known.contains(entity)
    }

    pub fn series(&self, entity: &str, code: &str) -> Option<&PanelSeries<T>> {
        self.series.get(&(entity.to_string(), code.to_string()))
    }

    pub fn series_iter(&self) -> impl Iterator<Item = &PanelSeries<T>> {
        self.series.values()
    }

    /// Years for which rates of both variables of `pair` are computable for
    /// `entity`, under the complete-case rule: every series the two rates
    /// touch (plus revenue when a rate is revenue-normalized) must be observed
    /// in every year of the window, and every denominator must be nonzero.
    ///
    /// Returns `Ok(None)` when the entity does not qualify, including when
    /// fewer than [`MIN_RATE_POINTS`] rate points would remain.
    pub fn complete_window(
        &self,
        entity: &str,
        pair: (&str, &str),
    ) -> Result<Option<Vec<i32>>, PanelError> {
        if !self.has_entity(entity) {
            return Err(PanelError::UnknownEntity(entity.to_string()));
        }
        let first = self
            .variable(pair.0)
            .ok_or_else(|| PanelError::UnknownVariable(pair.0.to_string()))?;
        let second = self
            .variable(pair.1)
            .ok_or_else(|| PanelError::UnknownVariable(pair.1.to_string()))?;

        let mut denominators: Vec<&str> = Vec::with_capacity(2);
        let mut touched: Vec<&str> = vec![first.code.as_str(), second.code.as_str()];
        for var in [first, second] {
            match var.normalization {
                Normalization::Own => denominators.push(var.code.as_str()),
                Normalization::Revenue => {
                    if self.variable(REVENUE_CODE).is_none() {
                        return Err(PanelError::MissingRevenue {
                            variable: var.code.clone(),
                        });
                    }
                    denominators.push(REVENUE_CODE);
                    touched.push(REVENUE_CODE);
                }
            }
        }

        for code in &touched {
            let series = self.series(entity, code).expect("dense series map");
            if !series.is_complete() {
                return Ok(None);
            }
        }
        let years: Vec<i32> = (self.start..self.end).collect();
        for code in &denominators {
            let series = self.series(entity, code).expect("dense series map");
            if years.iter().any(|&y| series.get(y) == Some(T::zero())) {
                return Ok(None);
            }
        }
        if years.len() < MIN_RATE_POINTS {
            return Ok(None);
        }
        Ok(Some(years))
    }

    /// Writes the dataset back as long-format CSV. Missing values become
    /// empty cells; numbers use the shortest round-trip representation.
    pub fn write_csv<W: Write>(
        &self,
        writer: W,
        entity_column: &str,
        year_column: &str,
    ) -> Result<(), PanelError> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec![entity_column.to_string(), year_column.to_string()];
        header.extend(self.variables.iter().map(|v| v.code.clone()));
        out.write_record(&header)?;
        for entity in &self.entities {
            for year in self.start..=self.end {
                let mut record = vec![entity.clone(), year.to_string()];
                for var in &self.variables {
                    let cell = self
                        .series(entity, &var.code)
                        .and_then(|s| s.get(year))
                        .map(|v| v.to_string())
                        .unwrap_or_default();
                    record.push(cell);
                }
                out.write_record(&record)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), PanelError> {
        let file = File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file), "entity", "year")
    }
}

/// Incrementally assembles a [`Dataset`] with a fixed window and variable set.
#[derive(Debug)]
pub struct DatasetBuilder<T> {
    start: i32,
    end: i32,
    entities: Vec<String>,
    known: HashSet<String>,
    variables: Vec<VariableId>,
    series: BTreeMap<(String, String), PanelSeries<T>>,
}

impl<T: Real> DatasetBuilder<T> {
    pub fn new(start: i32, end: i32, variables: Vec<VariableId>) -> Result<Self, PanelError> {
        if start >= end {
            return Err(PanelError::InvalidWindow { start, end });
        }
        let mut seen = HashSet::new();
        for var in &variables {
            if !seen.insert(var.code.as_str()) {
                return Err(PanelError::Schema {
                    column: var.code.clone(),
                    reason: "duplicate variable code".into(),
                });
            }
        }
        Ok(Self {
            start,
            end,
            entities: Vec::new(),
            known: HashSet::new(),
            variables,
            series: BTreeMap::new(),
        })
    }

    /// Registers `entity` with an all-missing series for every variable.
    pub fn add_entity(&mut self, entity: &str) {
        if !self.known.insert(entity.to_string()) {
            return;
        }
        self.entities.push(entity.to_string());
        for var in &self.variables {
            self.series.insert(
                (entity.to_string(), var.code.clone()),
                PanelSeries::empty(entity, var.clone(), self.start, self.end),
            );
        }
    }

    pub fn set(
        &mut self,
        entity: &str,
        code: &str,
        year: i32,
        value: Option<T>,
    ) -> Result<(), PanelError> {
        if year < self.start || year > self.end {
            return Err(PanelError::YearOutOfWindow {
                row: 0,
                year,
                start: self.start,
                end: self.end,
            });
        }
        if !self.variables.iter().any(|v| v.code == code) {
            return Err(PanelError::UnknownVariable(code.to_string()));
        }
        self.add_entity(entity);
        let series = self
            .series
            .get_mut(&(entity.to_string(), code.to_string()))
            .expect("entity registered");
        series.values.insert(year, value);
        Ok(())
    }

    pub fn build(self) -> Dataset<T> {
        Dataset {
            start: self.start,
            end: self.end,
            entities: self.entities,
            known: self.known,
            variables: self.variables,
            series: self.series,
        }
    }
}

/// Column mapping for CSV ingestion.
#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    pub entity_column: String,
    pub year_column: String,
    /// Variable columns. `None` takes every other header column, with
    /// defaults from [`VariableId::from_code`].
    pub variables: Option<Vec<VariableId>>,
    /// Declared `[t_i, t_f]`. `None` infers it from the data.
    pub window: Option<(i32, i32)>,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            entity_column: "entity".into(),
            year_column: "year".into(),
            variables: None,
            window: None,
        }
    }
}

impl Schema {
    /// The five accounting variables under the default column names.
    pub fn accounting() -> Self {
        Self {
            variables: Some(VariableId::default_set()),
            ..Self::default()
        }
    }
}

pub fn load_csv<T: Real>(
    path: impl AsRef<Path>,
    schema: &Schema,
) -> Result<Dataset<T>, PanelError> {
    let file = File::open(path)?;
    read_csv(std::io::BufReader::new(file), schema)
}

/// Parses long-format CSV into a [`Dataset`]. Row numbers in errors are
/// 1-based file line numbers (the header is line 1).
pub fn read_csv<T: Real, R: Read>(reader: R, schema: &Schema) -> Result<Dataset<T>, PanelError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let mut seen = HashMap::new();
    for (idx, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(PanelError::Schema {
                column: format!("#{}", idx + 1),
                reason: "empty column name".into(),
            });
        }
        if seen.insert(name.as_str(), idx).is_some() {
            return Err(PanelError::Schema {
                column: name.clone(),
                reason: "duplicate column name".into(),
            });
        }
    }
    let column = |name: &str| {
        seen.get(name).copied().ok_or_else(|| PanelError::Schema {
            column: name.to_string(),
            reason: "missing from header".into(),
        })
    };
    let entity_idx = column(&schema.entity_column)?;
    let year_idx = column(&schema.year_column)?;
    let variables = match &schema.variables {
        Some(vars) => vars.clone(),
        None => header
            .iter()
            .filter(|h| **h != schema.entity_column && **h != schema.year_column)
            .map(|h| VariableId::from_code(h))
            .collect(),
    };
    if variables.is_empty() {
        return Err(PanelError::Schema {
            column: "<variables>".into(),
            reason: "no variable columns".into(),
        });
    }
    let var_idx: Vec<usize> = variables
        .iter()
        .map(|v| column(&v.code))
        .collect::<Result<_, _>>()?;

    struct Row<T> {
        line: u64,
        entity: String,
        year: i32,
        values: Vec<Option<T>>,
    }
    let mut rows: Vec<Row<T>> = Vec::new();
    let mut keys: HashMap<(String, i32), u64> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let entity = record.get(entity_idx).unwrap_or("").trim().to_string();
        if entity.is_empty() {
            return Err(PanelError::EmptyEntity { row: line });
        }
        let raw_year = record.get(year_idx).unwrap_or("").trim();
        let year: i32 = raw_year.parse().map_err(|_| PanelError::BadYear {
            row: line,
            value: raw_year.to_string(),
        })?;
        if let Some((start, end)) = schema.window {
            if year < start || year > end {
                return Err(PanelError::YearOutOfWindow {
                    row: line,
                    year,
                    start,
                    end,
                });
            }
        }
        if let Some(first_row) = keys.insert((entity.clone(), year), line) {
            return Err(PanelError::DuplicateKey {
                entity,
                year,
                first_row,
                second_row: line,
            });
        }
        let values = var_idx
            .iter()
            .map(|&i| parse_cell(record.get(i).unwrap_or("")))
            .collect();
        rows.push(Row {
            line,
            entity,
            year,
            values,
        });
    }

    if rows.is_empty() {
        return Err(PanelError::Empty);
    }
    let (start, end) = match schema.window {
        Some(w) => w,
        None => {
            let lo = rows.iter().map(|r| r.year).min().expect("nonempty");
            let hi = rows.iter().map(|r| r.year).max().expect("nonempty");
            (lo, hi)
        }
    };
    let mut builder = DatasetBuilder::new(start, end, variables.clone())?;
    for row in rows {
        builder.add_entity(&row.entity);
        for (var, value) in variables.iter().zip(row.values) {
            builder
                .set(&row.entity, &var.code, row.year, value)
                .map_err(|e| match e {
                    PanelError::YearOutOfWindow {
                        year, start, end, ..
                    } => PanelError::YearOutOfWindow {
                        row: row.line,
                        year,
                        start,
                        end,
                    },
                    other => other,
                })?;
        }
    }
    Ok(builder.build())
}

fn parse_cell<T: Real>(cell: &str) -> Option<T> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    cell.parse::<T>().ok().filter(|v| v.is_finite())
}
