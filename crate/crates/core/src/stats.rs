//! Per-entity pairwise statistics.
//!
//! Moments use the population (divide-by-n) convention. A volatility subset
//! keeps the time points where the conditioning series deviates from its
//! mean by at least `h` standard deviations, boundary included; the VC
//! correlation is the Pearson correlation recomputed with means and standard
//! deviations taken inside that subset.
//!
//! Every sum goes through [`exact_sum`], so all statistics are functions of
//! the multiset of points: reordering time points jointly in both series
//! leaves results bit-identical, and swapping the two series swaps the two
//! VC correlations exactly.

use thiserror::Error;

use crate::num::{exact_sum, Real};
use crate::panel::MIN_RATE_POINTS;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degenerate series: zero standard deviation")]
    DegenerateSeries,
    #[error("degenerate subset: {size} points, zero constrained standard deviation or fewer than two points")]
    DegenerateSubset { size: usize },
    #[error("subset position {position} out of range for {len} points")]
    SubsetOutOfRange { position: usize, len: usize },
    #[error("cutoff h must be finite and non-negative, got {0}")]
    InvalidCutoff(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentPair<T> {
    pub mean: T,
    /// Population standard deviation.
    pub sd: T,
    pub n: usize,
}

pub fn moments<T: Real>(values: &[T]) -> Result<MomentPair<T>, StatsError> {
    let n = values.len();
    let first = *values
        .first()
        .ok_or(StatsError::InsufficientData { needed: 1, got: 0 })?;
    if values.iter().all(|&v| v == first) {
        return Ok(MomentPair {
            mean: first,
            sd: T::zero(),
            n,
        });
    }
    let count = T::of_count(n);
    let mean = exact_sum(values.iter().copied()) / count;
    let var = exact_sum(values.iter().map(|&v| (v - mean) * (v - mean))) / count;
    Ok(MomentPair {
        mean,
        sd: var.sqrt(),
        n,
    })
}

/// Correlation of paired samples with population moments. `None` when
/// either side has zero spread.
fn correlation<T: Real, I>(pairs: I) -> Option<T>
where
    I: Iterator<Item = (T, T)> + Clone,
{
    let xs: Vec<T> = pairs.clone().map(|p| p.0).collect();
    let ys: Vec<T> = pairs.map(|p| p.1).collect();
    let mx = moments(&xs).ok()?;
    let my = moments(&ys).ok()?;
    if mx.sd == T::zero() || my.sd == T::zero() {
        return None;
    }
    let count = T::of_count(xs.len());
    let cov = exact_sum(
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| (x - mx.mean) * (y - my.mean)),
    ) / count;
    let r = cov / (mx.sd * my.sd);
    Some(r.max(-T::one()).min(T::one()))
}

pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<T, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::InsufficientData {
            needed: 2,
            got: x.len(),
        });
    }
    correlation(x.iter().copied().zip(y.iter().copied())).ok_or(StatsError::DegenerateSeries)
}

/// Time points of a series selected by the volatility cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct VolatilitySubset<T> {
    pub h: T,
    /// Member years, in input order.
    pub years: Vec<i32>,
    /// Member positions into the input slices, ascending.
    pub positions: Vec<usize>,
}

impl<T> VolatilitySubset<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

fn omega_positions<T: Real>(values: &[T], h: T) -> Vec<usize> {
    let Ok(m) = moments(values) else {
        return Vec::new();
    };
    let bound = h * m.sd;
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| bound <= (v - m.mean).abs())
        .map(|(i, _)| i)
        .collect()
}

/// Volatility subset of `rates` (aligned with `years`) at cutoff `h`:
/// all `t` with `h·σ ≤ |R(t) − E|`, moments taken over the full list.
pub fn omega<T: Real>(years: &[i32], rates: &[T], h: T) -> Result<VolatilitySubset<T>, StatsError> {
    if years.len() != rates.len() {
        return Err(StatsError::LengthMismatch(years.len(), rates.len()));
    }
    check_cutoff(h)?;
    let positions = omega_positions(rates, h);
    Ok(VolatilitySubset {
        h,
        years: positions.iter().map(|&i| years[i]).collect(),
        positions,
    })
}

fn check_cutoff<T: Real>(h: T) -> Result<(), StatsError> {
    if !h.is_finite() || h < T::zero() {
        return Err(StatsError::InvalidCutoff(h.as_f64()));
    }
    Ok(())
}

fn constrained_by_positions<T: Real>(
    x: &[T],
    y: &[T],
    positions: &[usize],
) -> Result<T, StatsError> {
    if let Some(&bad) = positions.iter().find(|&&p| p >= x.len()) {
        return Err(StatsError::SubsetOutOfRange {
            position: bad,
            len: x.len(),
        });
    }
    if positions.len() < 2 {
        return Err(StatsError::DegenerateSubset {
            size: positions.len(),
        });
    }
    correlation(positions.iter().map(|&i| (x[i], y[i]))).ok_or(StatsError::DegenerateSubset {
        size: positions.len(),
    })
}

/// Pearson correlation of `x` and `y` restricted to `subset`, with means and
/// standard deviations computed inside the subset.
pub fn constrained_pearson<T: Real>(
    x: &[T],
    y: &[T],
    subset: &VolatilitySubset<T>,
) -> Result<T, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    constrained_by_positions(x, y, &subset.positions)
}

/// Standard and volatility-constrained correlations of one ordered pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VcCorrelation<T> {
    pub pearson: Option<T>,
    /// Conditioned on the first series' volatility subset.
    pub f_forward: Option<T>,
    /// Conditioned on the second series' volatility subset.
    pub f_backward: Option<T>,
    /// `f_forward - f_backward`, present when both are.
    pub delta_f: Option<T>,
    pub omega_sizes: (usize, usize),
}

/// VC correlations in both directions for year-aligned rate slices.
///
/// Degenerate sides are reported as `None`; only malformed input is an error.
pub fn vc_pair<T: Real>(x: &[T], y: &[T], h: T) -> Result<VcCorrelation<T>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < MIN_RATE_POINTS {
        return Err(StatsError::InsufficientData {
            needed: MIN_RATE_POINTS,
            got: x.len(),
        });
    }
    check_cutoff(h)?;

    let omega_x = omega_positions(x, h);
    let omega_y = omega_positions(y, h);
    let pearson = correlation(x.iter().copied().zip(y.iter().copied()));
    let f_forward = constrained_by_positions(x, y, &omega_x).ok();
    let f_backward = constrained_by_positions(x, y, &omega_y).ok();
    let delta_f = match (f_forward, f_backward) {
        (Some(f), Some(b)) => Some(f - b),
        _ => None,
    };
    Ok(VcCorrelation {
        pearson,
        f_forward,
        f_backward,
        delta_f,
        omega_sizes: (omega_x.len(), omega_y.len()),
    })
}

/// Per-entity result for the ordered pair `(first, second)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairFirmStats<T> {
    pub entity: String,
    pub pair: (String, String),
    pub vc: VcCorrelation<T>,
}
