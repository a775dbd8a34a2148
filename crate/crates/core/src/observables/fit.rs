//! Least-squares fits: the exponential correlation-length model and an
//! ordinary straight-line fit used for log-t and log-log scalings.

use crate::error::{Error, Result};

/// Result of fitting y = A·exp(−x/ξ) + C₀.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub xi: f64,
    pub xi_err: f64,
    pub amplitude: f64,
    pub amplitude_err: f64,
    pub offset: f64,
    pub offset_err: f64,
    /// Residual sum of squares.
    pub rss: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// ξ ended on the upper bound.
    pub xi_at_bound: bool,
    /// Data carry no information about ξ (flat, or singular normal matrix).
    pub degenerate: bool,
}

impl FitResult {
    /// Converged, interior, and identifiable.
    pub fn is_reliable(&self) -> bool {
        self.converged && !self.xi_at_bound && !self.degenerate
    }
}

fn model(p: &[f64; 3], x: f64) -> f64 {
    p[0] * (-x / p[1]).exp() + p[2]
}

/// Jacobian row w.r.t. (A, ξ, C₀).
fn gradient(p: &[f64; 3], x: f64) -> [f64; 3] {
    let e = (-x / p[1]).exp();
    [e, p[0] * e * x / (p[1] * p[1]), 1.0]
}

fn rss(p: &[f64; 3], xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(&x, &y)| (y - model(p, x)).powi(2)).sum()
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let inv = invert3(a)?;
    Some(std::array::from_fn(|i| (0..3).map(|j| inv[i][j] * b[j]).sum()))
}

fn invert3(a: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c = |r: usize, s: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (s1, s2) = ((s + 1) % 3, (s + 2) % 3);
        a[r1][s1] * a[r2][s2] - a[r1][s2] * a[r2][s1]
    };
    let det = a[0][0] * c(0, 0) + a[0][1] * c(0, 1) + a[0][2] * c(0, 2);
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if !det.is_finite() || det.abs() <= 1e-14 * scale.powi(3) {
        return None;
    }
    // inverse = adjugate / det, adjugate[i][j] = cofactor[j][i]
    Some(std::array::from_fn(|i| std::array::from_fn(|j| c(j, i) / det)))
}

fn normal_equations(p: &[f64; 3], xs: &[f64], ys: &[f64]) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut jtj = [[0.0; 3]; 3];
    let mut jtr = [0.0; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let g = gradient(p, x);
        let r = y - model(p, x);
        for i in 0..3 {
            jtr[i] += g[i] * r;
            for j in 0..3 {
                jtj[i][j] += g[i] * g[j];
            }
        }
    }
    (jtj, jtr)
}

/// Levenberg–Marquardt from one starting point, with ξ clamped to
/// (0, xi_max].
fn levenberg_marquardt(start: [f64; 3], xs: &[f64], ys: &[f64], xi_max: f64) -> ([f64; 3], usize, bool) {
    let mut p = start;
    let mut cost = rss(&p, xs, ys);
    let mut lambda = 1e-3;
    let xi_min = 1e-6;
    for it in 1..=500 {
        let (jtj, jtr) = normal_equations(&p, xs, ys);
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[i][i] += lambda * jtj[i][i].max(1e-300);
            }
            let Some(step) = solve3(damped, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            trial[1] = trial[1].clamp(xi_min, xi_max);
            let c = rss(&trial, xs, ys);
            if c < cost {
                let rel = (cost - c) / cost.max(1e-300);
                p = trial;
                cost = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-14 || cost < 1e-30 {
                    return (p, it, true);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no downhill step at any damping: stationary point
            return (p, it, true);
        }
    }
    (p, 500, false)
}

/// Fits y = A·exp(−x/ξ) + C₀ by unweighted least squares on a linear scale,
/// with ξ restricted to (0, xi_max]. Needs at least four finite points.
pub fn fit_exponential_decay(xs: &[f64], ys: &[f64], xi_max: f64) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 4 || xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "exponential fit needs at least 4 finite points".into(),
        ));
    }
    let n = xs.len();
    let y_max = ys.iter().cloned().fold(f64::MIN, f64::max);
    let y_min = ys.iter().cloned().fold(f64::MAX, f64::min);
    let spread = y_max - y_min;
    let flat = spread <= 1e-12 * y_max.abs().max(y_min.abs()).max(1e-300);

    if flat {
        let mean = ys.iter().sum::<f64>() / n as f64;
        return Ok(FitResult {
            xi: f64::NAN,
            xi_err: f64::NAN,
            amplitude: 0.0,
            amplitude_err: f64::NAN,
            offset: mean,
            offset_err: f64::NAN,
            rss: ys.iter().map(|y| (y - mean).powi(2)).sum(),
            residuals: ys.iter().map(|y| y - mean).collect(),
            iterations: 0,
            converged: false,
            xi_at_bound: false,
            degenerate: true,
        });
    }

    // Multi-start over ξ; A and C₀ seeded from the data ends.
    let x0 = xs[0];
    let mut best: Option<([f64; 3], usize, bool, f64)> = None;
    let span = (xs[n - 1] - x0).abs().max(1.0);
    for xi0 in [0.3, 0.7, 1.5, 3.0, span / 2.0, span, 3.0 * span] {
        let xi0: f64 = xi0.min(xi_max);
        let c0 = ys[n - 1];
        let a0 = (ys[0] - c0) * (x0 / xi0).exp();
        let (p, it, ok) = levenberg_marquardt([a0, xi0, c0], xs, ys, xi_max);
        let c = rss(&p, xs, ys);
        if best.as_ref().map_or(true, |b| c < b.3) {
            best = Some((p, it, ok, c));
        }
    }
    let (p, iterations, converged, cost) = best.expect("at least one start");

    let (jtj, _) = normal_equations(&p, xs, ys);
    let dof = (n as f64 - 3.0).max(1.0);
    let s2 = cost / dof;
    let cov = invert3(jtj);
    let err = |i: usize| cov.map_or(f64::NAN, |c| (c[i][i] * s2).max(0.0).sqrt());
    let xi_at_bound = p[1] >= xi_max * (1.0 - 1e-9);
    let degenerate = cov.is_none() || p[0].abs() <= 1e-12 * spread;

    Ok(FitResult {
        xi: p[1],
        xi_err: err(1),
        amplitude: p[0],
        amplitude_err: err(0),
        offset: p[2],
        offset_err: err(2),
        rss: cost,
        residuals: xs.iter().zip(ys).map(|(&x, &y)| y - model(&p, x)).collect(),
        iterations,
        converged,
        xi_at_bound,
        degenerate,
    })
}

/// Ordinary least-squares line y = intercept + slope·x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub slope_err: f64,
    pub intercept: f64,
    pub intercept_err: f64,
    /// √(RSS / (n − 2)).
    pub residual_std: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InvalidArgument("linear fit needs at least 2 paired points".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("linear fit with constant abscissa".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let (residual_std, slope_err, intercept_err) = if n > 2 {
        let s2 = rss / (nf - 2.0);
        (s2.sqrt(), (s2 / sxx).sqrt(), (s2 * (1.0 / nf + mx * mx / sxx)).sqrt())
    } else {
        (0.0, f64::NAN, f64::NAN)
    };
    Ok(LinearFit {
        slope,
        slope_err,
        intercept,
        intercept_err,
        residual_std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_synthetic_parameters() {
        let xs: Vec<f64> = (1..16).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.1 * (-x / 2.0).exp() + 0.01).collect();
        let fit = fit_exponential_decay(&xs, &ys, 160.0).unwrap();
        assert!(fit.is_reliable(), "{fit:?}");
        assert!((fit.xi / 2.0 - 1.0).abs() < 0.01);
        assert!((fit.amplitude / 0.1 - 1.0).abs() < 0.01);
        assert!((fit.offset / 0.01 - 1.0).abs() < 0.01);
    }

    #[test]
    fn flat_data_is_degenerate() {
        let xs: Vec<f64> = (1..10).map(f64::from).collect();
        let fit = fit_exponential_decay(&xs, &[0.02; 9], 90.0).unwrap();
        assert!(fit.degenerate && !fit.is_reliable());
    }

    #[test]
    fn too_few_points() {
        assert!(fit_exponential_decay(&[1.0, 2.0, 3.0], &[1.0, 0.5, 0.2], 30.0).is_err());
        assert!(fit_exponential_decay(&[1.0, 2.0, 3.0, 4.0], &[1.0, f64::NAN, 0.2, 0.1], 30.0).is_err());
    }

    #[test]
    fn straight_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let fit = linear_fit(&xs, &[3.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14 && (fit.intercept - 1.0).abs() < 1e-14);
        assert!(fit.slope_err < 1e-14);
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }
}
