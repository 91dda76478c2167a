//! Straight-line reference implementations used as test oracles.
//!
//! Deliberately independent of the library: naive loops summing in reverse
//! index order, correlation as `Sxy / sqrt(Sxx·Syy)` rather than through
//! standard deviations, and no shared helpers.

#![allow(dead_code)]

pub fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in (0..v.len()).rev() {
        s += v[i];
    }
    s / v.len() as f64
}

pub fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    let mut s = 0.0;
    for i in (0..v.len()).rev() {
        s += (v[i] - m) * (v[i] - m);
    }
    (s / v.len() as f64).sqrt()
}

pub fn corr(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in (0..x.len()).rev() {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 || x.len() < 2 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

pub fn omega(v: &[f64], h: f64) -> Vec<usize> {
    let m = mean(v);
    let s = sd(v);
    let mut out = Vec::new();
    for (i, x) in v.iter().enumerate() {
        if (x - m).abs() >= h * s {
            out.push(i);
        }
    }
    out
}

pub fn constrained(x: &[f64], y: &[f64], idx: &[usize]) -> Option<f64> {
    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    corr(&xs, &ys)
}

/// `(pearson, F[x,y], F[y,x], dF)`
pub fn vc(x: &[f64], y: &[f64], h: f64) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
    let fwd = constrained(x, y, &omega(x, h));
    let bwd = constrained(x, y, &omega(y, h));
    let delta = match (fwd, bwd) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    (corr(x, y), fwd, bwd, delta)
}

/// Two-sided normal tail 2·Φ(−|z|) from the erfc Taylor series for small
/// |z| and the Laplace continued fraction for the upper tail.
pub fn normal_two_sided(z: f64) -> f64 {
    let x = z.abs() / std::f64::consts::SQRT_2;
    if x < 2.0 {
        // erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^(2n+1) / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let mut tail = 0.0;
        for k in (1..400).rev() {
            tail = (k as f64 / 2.0) / (x + tail);
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / (x + tail)
    }
}
