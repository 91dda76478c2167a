//! Cross-entity aggregation and the directionality test.
//!
//! For one ordered pair `(s, s')` the per-entity Pearson values and ΔF values
//! are reduced to population means and standard deviations. The mean ΔF is
//! tested against zero with `Z = E·√N / σ` and a two-sided normal tail; a
//! significant positive mean orients the pair `s → s'`, a significant
//! negative one `s' → s`.

use thiserror::Error;

use crate::num::Real;
use crate::stats::PairFirmStats;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregateError {
    #[error("insufficient data for pair ({0}, {1}): no entity has a valid delta F")]
    InsufficientData(String, String),
    #[error("no per-entity statistics given")]
    Empty,
    #[error("mixed pairs: expected ({0}, {1}), found ({2}, {3})")]
    PairMismatch(String, String, String, String),
    #[error("degenerate test: sigma = {sigma}, n = {n}")]
    DegenerateTest { sigma: f64, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// first → second
    Forward,
    /// second → first
    Backward,
    Undecided,
}

impl Verdict {
    pub fn arrow(self) -> &'static str {
        match self {
            Verdict::Forward => "→",
            Verdict::Backward => "←",
            Verdict::Undecided => "",
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Verdict::Forward => Verdict::Backward,
            Verdict::Backward => Verdict::Forward,
            Verdict::Undecided => Verdict::Undecided,
        }
    }
}

/// Streaming population mean/variance (Welford), mergeable (Chan et al.).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunningMoments<T> {
    n: usize,
    mean: T,
    m2: T,
}

impl<T: Real> Default for RunningMoments<T> {
    fn default() -> Self {
        Self {
            n: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }
}

impl<T: Real> RunningMoments<T> {
    pub fn push(&mut self, value: T) {
        self.n += 1;
        let delta = value - self.mean;
        self.mean = self.mean + delta / T::of_count(self.n);
        self.m2 = self.m2 + delta * (value - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let (na, nb, nt) = (T::of_count(self.n), T::of_count(other.n), T::of_count(n));
        let delta = other.mean - self.mean;
        self.mean = self.mean + delta * nb / nt;
        self.m2 = self.m2 + other.m2 + delta * delta * na * nb / nt;
        self.n = n;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    /// Population (divide-by-n) standard deviation; zero when empty.
    pub fn sd(&self) -> T {
        if self.n == 0 {
            return T::zero();
        }
        (self.m2.max(T::zero()) / T::of_count(self.n)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZTest<T> {
    pub z: T,
    pub p_value: T,
}

/// Two-sided standard-normal tail `2·Φ(−|z|) = erfc(|z|/√2)`, clamped into
/// `(0, 1]`.
pub fn two_sided_p<T: Real>(z: T) -> T {
    let p = libm::erfc(z.as_f64().abs() / std::f64::consts::SQRT_2);
    let p = T::of(p.min(1.0));
    p.max(T::min_positive_value())
}

pub fn z_test<T: Real>(e_df: T, sigma_df: T, n_c: usize) -> Result<ZTest<T>, AggregateError> {
    if n_c < 2 || sigma_df.is_nan() || sigma_df <= T::zero() {
        return Err(AggregateError::DegenerateTest {
            sigma: sigma_df.as_f64(),
            n: n_c,
        });
    }
    let z = e_df * T::of_count(n_c).sqrt() / sigma_df;
    Ok(ZTest {
        z,
        p_value: two_sided_p(z),
    })
}

pub fn verdict<T: Real>(e_df: T, p_value: T, alpha: T) -> Verdict {
    if p_value < alpha && e_df > T::zero() {
        Verdict::Forward
    } else if p_value < alpha && e_df < T::zero() {
        Verdict::Backward
    } else {
        Verdict::Undecided
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairAggregate<T> {
    pub pair: (String, String),
    /// Mean of per-entity Pearson correlations.
    pub e_c: T,
    pub sigma_c: T,
    /// Entities with a valid Pearson correlation.
    pub n_pearson: usize,
    pub e_df: T,
    pub sigma_df: T,
    /// Entities with a valid ΔF.
    pub n_c: usize,
    /// Absent when the test is degenerate.
    pub z: Option<T>,
    pub p_value: T,
    pub verdict: Verdict,
    /// Set when the test could not be run.
    pub diagnostic: Option<String>,
}

impl<T: Real> PairAggregate<T> {
    /// Builds the aggregate from summary moments, as when only published
    /// `(E_ΔF, σ_ΔF, N_c)` values are available.
    pub fn from_summary(
        pair: (String, String),
        (e_c, sigma_c, n_pearson): (T, T, usize),
        (e_df, sigma_df, n_c): (T, T, usize),
        alpha: T,
    ) -> Self {
        let (z, p_value, verdict_, diagnostic) = match z_test(e_df, sigma_df, n_c) {
            Ok(t) => (Some(t.z), t.p_value, verdict(e_df, t.p_value, alpha), None),
            Err(e) => (None, T::one(), Verdict::Undecided, Some(e.to_string())),
        };
        Self {
            pair,
            e_c,
            sigma_c,
            n_pearson,
            e_df,
            sigma_df,
            n_c,
            z,
            p_value,
            verdict: verdict_,
            diagnostic,
        }
    }
}

/// Mergeable partial aggregate for one ordered pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAccumulator<T> {
    pair: (String, String),
    pearson: RunningMoments<T>,
    delta_f: RunningMoments<T>,
}

impl<T: Real> PairAccumulator<T> {
    pub fn new(pair: (String, String)) -> Self {
        Self {
            pair,
            pearson: RunningMoments::default(),
            delta_f: RunningMoments::default(),
        }
    }

    pub fn push(&mut self, stats: &PairFirmStats<T>) -> Result<(), AggregateError> {
        self.check_pair(&stats.pair)?;
        if let Some(c) = stats.vc.pearson {
            self.pearson.push(c);
        }
        if let Some(d) = stats.vc.delta_f {
            self.delta_f.push(d);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &Self) -> Result<(), AggregateError> {
        self.check_pair(&other.pair)?;
        self.pearson.merge(&other.pearson);
        self.delta_f.merge(&other.delta_f);
        Ok(())
    }

    fn check_pair(&self, pair: &(String, String)) -> Result<(), AggregateError> {
        if *pair != self.pair {
            return Err(AggregateError::PairMismatch(
                self.pair.0.clone(),
                self.pair.1.clone(),
                pair.0.clone(),
                pair.1.clone(),
            ));
        }
        Ok(())
    }

    pub fn finish(&self, alpha: T) -> Result<PairAggregate<T>, AggregateError> {
        if self.delta_f.count() == 0 {
            return Err(AggregateError::InsufficientData(
                self.pair.0.clone(),
                self.pair.1.clone(),
            ));
        }
        Ok(PairAggregate::from_summary(
            self.pair.clone(),
            (self.pearson.mean(), self.pearson.sd(), self.pearson.count()),
            (self.delta_f.mean(), self.delta_f.sd(), self.delta_f.count()),
            alpha,
        ))
    }
}

/// Aggregates per-entity statistics of a single ordered pair. Entities with
/// an absent ΔF do not count toward `n_c`.
pub fn aggregate_pair<T: Real>(
    stats: &[PairFirmStats<T>],
    alpha: T,
) -> Result<PairAggregate<T>, AggregateError> {
    let first = stats.first().ok_or(AggregateError::Empty)?;
    let mut acc = PairAccumulator::new(first.pair.clone());
    for s in stats {
        acc.push(s)?;
    }
    acc.finish(alpha)
}
