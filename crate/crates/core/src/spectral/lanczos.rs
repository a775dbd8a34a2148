//! Restarted Lanczos for the extremal eigenvalues of a real symmetric
//! sector operator.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::SparseOperator;

/// Controls for [`extremal_energies_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Krylov vectors per cycle.
    pub subspace_dim: usize,
    pub max_restarts: usize,
    /// Residual target relative to ‖H‖_∞.
    pub relative_tolerance: f64,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            subspace_dim: 60,
            max_restarts: 200,
            relative_tolerance: 1e-8,
            seed: 0x5eed,
        }
    }
}

/// Ground and top energies with their achieved residuals ‖Hx − θx‖.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalEnergies {
    pub ground: f64,
    pub max: f64,
    pub ground_residual: f64,
    pub max_residual: f64,
    pub matvecs: usize,
}

/// (E_GS, E_max), each converged to a residual ≤ 1e-8·‖H‖.
pub fn extremal_energies(h: &SparseOperator) -> Result<(f64, f64)> {
    let e = extremal_energies_with(h, &LanczosConfig::default())?;
    Ok((e.ground, e.max))
}

/// Runs Lanczos on H for the ground state and on −H for the top state.
pub fn extremal_energies_with(h: &SparseOperator, cfg: &LanczosConfig) -> Result<ExtremalEnergies> {
    let n = h.dimension();
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    if h.is_diagonal() {
        let d = h.diagonal();
        return Ok(ExtremalEnergies {
            ground: d.iter().cloned().fold(f64::INFINITY, f64::min),
            max: d.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ground_residual: 0.0,
            max_residual: 0.0,
            matvecs: 0,
        });
    }
    let target = cfg.relative_tolerance * h.norm_inf();
    let (ground, ground_residual, m1) = lowest(h, 1.0, target, cfg)?;
    let (neg_max, max_residual, m2) = lowest(h, -1.0, target, cfg)?;
    Ok(ExtremalEnergies {
        ground,
        max: -neg_max,
        ground_residual,
        max_residual,
        matvecs: m1 + m2,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest eigenvalue of sign·H with explicit restarts on the Ritz vector.
fn lowest(h: &SparseOperator, sign: f64, target: f64, cfg: &LanczosConfig) -> Result<(f64, f64, usize)> {
    let n = h.dimension();
    let m_max = cfg.subspace_dim.clamp(2, n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);

    let mut w = vec![0.0; n];
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;
    for _ in 0..=cfg.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        loop {
            let j = basis.len() - 1;
            h.apply_real_into(&basis[j], &mut w);
            w.iter_mut().for_each(|x| *x *= sign);
            matvecs += 1;
            alpha.push(dot(&w, &basis[j]));
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            if basis.len() == m_max || b <= 1e-14 * h.norm_inf().max(1e-300) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }

        let m = alpha.len();
        let t = Mat::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let evd = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let vals = evd.S().column_vector();
        let k = (0..m).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("m >= 1");
        let theta = vals[k];
        let u = evd.U();

        let mut x = vec![0.0; n];
        for (j, v) in basis.iter().enumerate() {
            let c = u[(j, k)];
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
        }
        let s = norm(&x);
        x.iter_mut().for_each(|xi| *xi /= s);
        h.apply_real_into(&x, &mut w);
        matvecs += 1;
        let residual = w
            .iter()
            .zip(&x)
            .map(|(hx, xi)| (sign * hx - theta * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        last_residual = residual;
        if residual <= target || m == n {
            return Ok((theta, residual, matvecs));
        }
        start = x;
    }
    Err(Error::LanczosNotConverged {
        residual: last_residual,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_hopping() {
        let j = 2.0;
        let h = SparseOperator::from_rows(vec![0.0, 0.0], vec![vec![(1, j)], vec![(0, j)]]).unwrap();
        let (lo, hi) = extremal_energies(&h).unwrap();
        assert!((lo + j).abs() < 1e-12 && (hi - j).abs() < 1e-12);
    }

    #[test]
    fn diagonal_shortcut() {
        let h = SparseOperator::from_diagonal(vec![3.0, -1.0, 7.5, 0.0]);
        assert_eq!(extremal_energies(&h).unwrap(), (-1.0, 7.5));
    }

    #[test]
    fn path_graph_spectrum() {
        // tridiagonal path of length n: eigenvalues 2cos(kπ/(n+1))
        let n = 400;
        let rows = (0..n)
            .map(|r| {
                let mut row = Vec::new();
                if r > 0 {
                    row.push((r - 1, 1.0));
                }
                if r + 1 < n {
                    row.push((r + 1, 1.0));
                }
                row
            })
            .collect();
        let h = SparseOperator::from_rows(vec![0.0; n], rows).unwrap();
        let e = extremal_energies_with(&h, &LanczosConfig::default()).unwrap();
        let exact = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((e.max - exact).abs() < 1e-8, "{} vs {exact}", e.max);
        assert!((e.ground + exact).abs() < 1e-8);
        assert!(e.ground_residual <= 2e-8);
    }
}
