//! Year-over-year rates of change.
//!
//! A variable's rate is normalized either by its own prior value or by prior
//! revenue, according to its [`Normalization`]. A rate exists only where all
//! of its inputs exist and the denominator is nonzero.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::num::Real;
use crate::panel::{Dataset, Normalization, PanelSeries, VariableId, REVENUE_CODE};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("series entity `{series}` does not match revenue entity `{revenue}`")]
    EntityMismatch { series: String, revenue: String },
    #[error("series window [{0}, {1}] does not match revenue window [{2}, {3}]")]
    WindowMismatch(i32, i32, i32, i32),
    #[error("variable `{variable}` is revenue-normalized but the dataset has no `{revenue}` variable", revenue = REVENUE_CODE)]
    MissingRevenue { variable: String },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateSeries<T> {
    pub entity: String,
    pub variable: VariableId,
    /// Keys cover `[t_i, t_f - 1]`.
    pub rates: BTreeMap<i32, Option<T>>,
    /// Rate points computed with a strictly negative denominator.
    pub negative_denominators: usize,
}

impl<T: Real> RateSeries<T> {
    pub fn get(&self, year: i32) -> Option<T> {
        self.rates.get(&year).copied().flatten()
    }
}

fn rate_series<T: Real>(series: &PanelSeries<T>, denominator: &PanelSeries<T>) -> RateSeries<T> {
    let mut negative = 0;
    let rates = (series.start..series.end)
        .map(|t| {
            let rate = match (series.get(t), series.get(t + 1), denominator.get(t)) {
                (Some(now), Some(next), Some(base)) if base != T::zero() => {
                    if base < T::zero() {
                        negative += 1;
                    }
                    Some((next - now) / base)
                }
                _ => None,
            };
            (t, rate)
        })
        .collect();
    RateSeries {
        entity: series.entity.clone(),
        variable: series.variable.clone(),
        rates,
        negative_denominators: negative,
    }
}

/// `R(t) = (x(t+1) - x(t)) / x(t)`.
pub fn own_denominator_rate<T: Real>(series: &PanelSeries<T>) -> RateSeries<T> {
    rate_series(series, series)
}

/// `R(t) = (x(t+1) - x(t)) / r(t)`.
pub fn revenue_denominator_rate<T: Real>(
    series: &PanelSeries<T>,
    revenue: &PanelSeries<T>,
) -> Result<RateSeries<T>, TransformError> {
    if series.entity != revenue.entity {
        return Err(TransformError::EntityMismatch {
            series: series.entity.clone(),
            revenue: revenue.entity.clone(),
        });
    }
    if (series.start, series.end) != (revenue.start, revenue.end) {
        return Err(TransformError::WindowMismatch(
            series.start,
            series.end,
            revenue.start,
            revenue.end,
        ));
    }
    Ok(rate_series(series, revenue))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatePanel<T> {
    series: BTreeMap<(String, String), RateSeries<T>>,
}

impl<T: Real> RatePanel<T> {
    pub fn get(&self, entity: &str, code: &str) -> Option<&RateSeries<T>> {
        self.series.get(&(entity.to_string(), code.to_string()))
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RateSeries<T>> {
        self.series.values()
    }

    pub fn negative_denominators(&self) -> usize {
        self.series.values().map(|s| s.negative_denominators).sum()
    }

    /// Dumps `entity,year,variable,rate`; missing rates are empty cells.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), TransformError> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["entity", "year", "variable", "rate"])?;
        for s in self.series.values() {
            for (year, rate) in &s.rates {
                let cell = rate.map(|r| r.to_string()).unwrap_or_default();
                out.write_record([
                    s.entity.as_str(),
                    &year.to_string(),
                    &s.variable.code,
                    &cell,
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Computes one [`RateSeries`] per (entity, variable), dispatching on each
/// variable's normalization.
pub fn build_rate_panel<T: Real>(dataset: &Dataset<T>) -> Result<RatePanel<T>, TransformError> {
    let has_revenue = dataset.variable(REVENUE_CODE).is_some();
    if let Some(var) = dataset
        .variables()
        .iter()
        .find(|v| v.normalization == Normalization::Revenue && !has_revenue)
    {
        return Err(TransformError::MissingRevenue {
            variable: var.code.clone(),
        });
    }

    let per_entity: Vec<Vec<RateSeries<T>>> = dataset
        .entities()
        .par_iter()
        .map(|entity| {
            dataset
                .variables()
                .iter()
                .map(|var| {
                    let series = dataset.series(entity, &var.code).expect("dense series map");
                    match var.normalization {
                        Normalization::Own => Ok(own_denominator_rate(series)),
                        Normalization::Revenue => {
                            let revenue =
                                dataset.series(entity, REVENUE_CODE).expect("checked above");
                            revenue_denominator_rate(series, revenue)
                        }
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let series = per_entity
        .into_iter()
        .flatten()
        .map(|s| ((s.entity.clone(), s.variable.code.clone()), s))
        .collect();
    Ok(RatePanel { series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::DatasetBuilder;

    fn series(entity: &str, code: &str, values: &[(i32, Option<f64>)]) -> PanelSeries<f64> {
        let start = values.first().unwrap().0;
        let end = values.last().unwrap().0;
        PanelSeries {
            entity: entity.into(),
            variable: VariableId::from_code(code),
            start,
            end,
            values: values.iter().copied().collect(),
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn own_rate_arithmetic() {
        let s = series(
            "A",
            "r",
            &[(2000, Some(100.0)), (2001, Some(110.0)), (2002, Some(99.0))],
        );
        let r = own_denominator_rate(&s);
        assert_eq!(r.rates.len(), 2);
        assert!(close(r.get(2000).unwrap(), 0.10));
        assert!(close(r.get(2001).unwrap(), -0.10));
    }

    #[test]
    fn own_rate_constant_and_zero() {
        let s = series(
            "A",
            "o",
            &(2000..2005).map(|y| (y, Some(50.0))).collect::<Vec<_>>(),
        );
        let r = own_denominator_rate(&s);
        assert!(r.rates.values().all(|v| *v == Some(0.0)));

        let s = series("A", "o", &[(2000, Some(0.0)), (2001, Some(5.0))]);
        assert_eq!(own_denominator_rate(&s).rates.get(&2000), Some(&None));
    }

    #[test]
    fn own_rate_counts_negative_denominators() {
        let s = series(
            "A",
            "o",
            &[(2000, Some(-10.0)), (2001, Some(-5.0)), (2002, Some(5.0))],
        );
        let r = own_denominator_rate(&s);
        assert_eq!(r.negative_denominators, 2);
        assert!(close(r.get(2000).unwrap(), -0.5));
        assert!(close(r.get(2001).unwrap(), -2.0));
    }

    #[test]
    fn gap_never_bridged() {
        let s = series(
            "A",
            "m",
            &[
                (2000, Some(1.0)),
                (2001, None),
                (2002, Some(2.0)),
                (2003, Some(3.0)),
            ],
        );
        let r = own_denominator_rate(&s);
        assert_eq!(r.get(2000), None);
        assert_eq!(r.get(2001), None);
        assert!(close(r.get(2002).unwrap(), 0.5));
    }

    #[test]
    fn revenue_rate_arithmetic() {
        let i = series("A", "i", &[(2000, Some(-10.0)), (2001, Some(5.0))]);
        let r = series("A", "r", &[(2000, Some(100.0)), (2001, Some(120.0))]);
        let rate = revenue_denominator_rate(&i, &r).unwrap();
        assert!(close(rate.get(2000).unwrap(), 0.15));

        let i = series(
            "A",
            "i",
            &(2000..2004).map(|y| (y, Some(7.0))).collect::<Vec<_>>(),
        );
        let r = series(
            "A",
            "r",
            &(2000..2004)
                .map(|y| (y, Some(10.0 + y as f64)))
                .collect::<Vec<_>>(),
        );
        assert!(revenue_denominator_rate(&i, &r)
            .unwrap()
            .rates
            .values()
            .all(|v| *v == Some(0.0)));

        let i = series("A", "i", &[(2000, Some(1.0)), (2001, Some(2.0))]);
        let r = series("A", "r", &[(2000, Some(0.0)), (2001, Some(2.0))]);
        assert_eq!(revenue_denominator_rate(&i, &r).unwrap().get(2000), None);
    }

    #[test]
    fn revenue_rate_entity_mismatch() {
        let i = series("A", "i", &[(2000, Some(1.0)), (2001, Some(2.0))]);
        let r = series("B", "r", &[(2000, Some(1.0)), (2001, Some(2.0))]);
        assert!(matches!(
            revenue_denominator_rate(&i, &r),
            Err(TransformError::EntityMismatch { .. })
        ));
    }

    #[test]
    fn panel_matches_hand_computed_toy() {
        // r: 100 110 121 100 ; i: 5 8 6 10 ; p: 10 12 12 9
        // o: 50 55 44 44      ; m: 200 300 150 150
        let table = [
            ("r", [100.0, 110.0, 121.0, 100.0]),
            ("i", [5.0, 8.0, 6.0, 10.0]),
            ("p", [10.0, 12.0, 12.0, 9.0]),
            ("o", [50.0, 55.0, 44.0, 44.0]),
            ("m", [200.0, 300.0, 150.0, 150.0]),
        ];
        let mut b = DatasetBuilder::new(2000, 2003, VariableId::default_set()).unwrap();
        for (code, values) in table {
            for (k, v) in values.iter().enumerate() {
                b.set("A", code, 2000 + k as i32, Some(*v)).unwrap();
            }
        }
        let panel = build_rate_panel(&b.build()).unwrap();
        assert_eq!(panel.len(), 5);
        let expect = [
            ("r", [0.1, 0.1, -21.0 / 121.0]),
            ("i", [3.0 / 100.0, -2.0 / 110.0, 4.0 / 121.0]),
            ("p", [2.0 / 100.0, 0.0, -3.0 / 121.0]),
            ("o", [0.1, -0.2, 0.0]),
            ("m", [0.5, -0.5, 0.0]),
        ];
        for (code, rates) in expect {
            let s = panel.get("A", code).unwrap();
            assert_eq!(s.rates.len(), 3);
            for (k, want) in rates.iter().enumerate() {
                let got = s.get(2000 + k as i32).unwrap();
                assert!(close(got, *want), "{code} {k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn panel_requires_revenue_for_revenue_normalized() {
        let b = DatasetBuilder::<f64>::new(
            2000,
            2003,
            vec![VariableId::from_code("i"), VariableId::from_code("m")],
        )
        .unwrap();
        assert!(matches!(
            build_rate_panel(&b.build()),
            Err(TransformError::MissingRevenue { .. })
        ));
    }

    #[test]
    fn rate_dump_format() {
        let mut b = DatasetBuilder::new(2000, 2001, vec![VariableId::from_code("x")]).unwrap();
        b.set("A", "x", 2000, Some(2.0)).unwrap();
        b.set("A", "x", 2001, Some(3.0)).unwrap();
        let mut buf = Vec::new();
        build_rate_panel(&b.build())
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "entity,year,variable,rate\nA,2000,x,0.5\n"
        );
    }
}
