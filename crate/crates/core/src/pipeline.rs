//! End-to-end analysis: rates, per-entity VC statistics for every unordered
//! variable pair, aggregation, and the two networks.

use rayon::prelude::*;
use thiserror::Error;

use crate::aggregate::{aggregate_pair, AggregateError, PairAggregate, DEFAULT_ALPHA};
use crate::network::{build_networks, InfluenceNetwork, NetworkError};
use crate::num::Real;
use crate::panel::{Dataset, PanelError, VariableId};
use crate::stats::{vc_pair, PairFirmStats, StatsError};
use crate::transforms::{build_rate_panel, RatePanel, TransformError};

/// Default volatility cutoff.
pub const DEFAULT_H: f64 = 0.2;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig<T> {
    pub h: T,
    pub alpha: T,
}

impl<T: Real> Default for AnalysisConfig<T> {
    fn default() -> Self {
        Self {
            h: T::of(DEFAULT_H),
            alpha: T::of(DEFAULT_ALPHA),
        }
    }
}

impl<T: Real> AnalysisConfig<T> {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.h >= T::zero() && self.h.is_finite()) {
            return Err(Error::Config(format!("h must be >= 0, got {}", self.h)));
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairAnalysis<T> {
    pub first: VariableId,
    pub second: VariableId,
    /// Entities passing the complete-case filter, in dataset order.
    pub firms: Vec<PairFirmStats<T>>,
    /// Entities dropped by the complete-case filter.
    pub excluded: usize,
    /// Entities kept but with an absent ΔF.
    pub degenerate: usize,
    /// `None` when no entity produced a valid ΔF.
    pub aggregate: Option<PairAggregate<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Analysis<T> {
    pub pairs: Vec<PairAnalysis<T>>,
    pub network: InfluenceNetwork<T>,
    pub negative_denominators: usize,
}

/// Per-entity statistics for the ordered pair `(first, second)`. Returns the
/// stats of qualifying entities and the number excluded.
pub fn pair_firm_stats<T: Real>(
    dataset: &Dataset<T>,
    rates: &RatePanel<T>,
    first: &str,
    second: &str,
    h: T,
) -> Result<(Vec<PairFirmStats<T>>, usize), Error> {
    let results: Vec<Option<PairFirmStats<T>>> = dataset
        .entities()
        .par_iter()
        .map(|entity| -> Result<_, Error> {
            let Some(years) = dataset.complete_window(entity, (first, second))? else {
                return Ok(None);
            };
            let pick = |code: &str| -> Vec<T> {
                let series = rates
                    .get(entity, code)
                    .expect("rate series for every entity");
                years
                    .iter()
                    .map(|&y| series.get(y).expect("complete window implies present rate"))
                    .collect()
            };
            let vc = vc_pair(&pick(first), &pick(second), h)?;
            Ok(Some(PairFirmStats {
                entity: entity.clone(),
                pair: (first.to_string(), second.to_string()),
                vc,
            }))
        })
        .collect::<Result<_, _>>()?;
    let excluded = results.iter().filter(|r| r.is_none()).count();
    Ok((results.into_iter().flatten().collect(), excluded))
}

/// Runs the full analysis over all unordered pairs, each oriented by dataset
/// variable order.
pub fn analyze<T: Real>(
    dataset: &Dataset<T>,
    config: &AnalysisConfig<T>,
) -> Result<Analysis<T>, Error> {
    config.validate()?;
    let rates = build_rate_panel(dataset)?;
    let vars = dataset.variables();
    let mut pairs = Vec::new();
    for (k, first) in vars.iter().enumerate() {
        for second in &vars[k + 1..] {
            let (firms, excluded) =
                pair_firm_stats(dataset, &rates, &first.code, &second.code, config.h)?;
            let degenerate = firms.iter().filter(|f| f.vc.delta_f.is_none()).count();
            let aggregate = match aggregate_pair(&firms, config.alpha) {
                Ok(a) => Some(a),
                Err(AggregateError::Empty | AggregateError::InsufficientData(..)) => None,
                Err(e) => return Err(e.into()),
            };
            pairs.push(PairAnalysis {
                first: first.clone(),
                second: second.clone(),
                firms,
                excluded,
                degenerate,
                aggregate,
            });
        }
    }
    let aggregates: Vec<_> = pairs.iter().filter_map(|p| p.aggregate.clone()).collect();
    let network = build_networks(&aggregates)?;
    Ok(Analysis {
        pairs,
        network,
        negative_denominators: rates.negative_denominators(),
    })
}
