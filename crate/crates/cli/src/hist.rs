use std::fmt::Write as _;

/// Fixed-width histogram over `[-1, 1]`, normalized to unit area.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
    /// Values that fell inside `[-1, 1]`.
    pub n: usize,
    /// Values outside `[-1, 1]`, not binned.
    pub out_of_range: usize,
}

pub const LOW: f64 = -1.0;
pub const HIGH: f64 = 1.0;

impl Histogram {
    pub fn width(&self) -> f64 {
        (HIGH - LOW) / self.centers.len() as f64
    }

    pub fn area(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width()
    }

    pub fn to_tsv(&self, comment: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {comment} n={} out_of_range={}",
            self.n, self.out_of_range
        );
        out.push_str("bin_center\tdensity\n");
        for (c, d) in self.centers.iter().zip(&self.density) {
            let _ = writeln!(out, "{c}\t{d}");
        }
        out
    }
}

/// Returns `None` when `bins == 0` or no value lies in range.
pub fn histogram(values: &[f64], bins: usize) -> Option<Histogram> {
    if bins == 0 {
        return None;
    }
    let width = (HIGH - LOW) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut out_of_range = 0;
    for &v in values {
        if !(LOW..=HIGH).contains(&v) {
            out_of_range += 1;
            continue;
        }
        let k = (((v - LOW) / width).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = values.len() - out_of_range;
    if n == 0 {
        return None;
    }
    let centers = (0..bins).map(|k| LOW + (k as f64 + 0.5) * width).collect();
    let density = counts
        .iter()
        .map(|&c| c as f64 / (n as f64 * width))
        .collect();
    Some(Histogram {
        centers,
        density,
        n,
        out_of_range,
    })
}
