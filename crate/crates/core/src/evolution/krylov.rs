//! Lanczos approximation of e^{-iH dt}|ψ⟩.
//!
//! The Krylov space K_m(H, ψ) is built with full reorthogonalization, the
//! projected tridiagonal T_m is exponentiated exactly, and the local error is
//! estimated by β₀ β_m |[e^{-iT_m dt}]_{m,1}|. When the largest allowed
//! subspace cannot meet the tolerance for the whole step, the step is split
//! and the remainder is covered by fresh Krylov spaces.

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::hamiltonian::phase;
use crate::model::{QuantumState, SparseOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KrylovConfig {
    pub max_subspace_dim: usize,
    /// Outer step, ns.
    pub step_dt: f64,
    /// Bound on the estimated local error per step.
    pub tolerance: f64,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig {
            max_subspace_dim: 30,
            step_dt: 2.0,
            tolerance: 1e-10,
        }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_subspace_dim < 2 {
            return Err(Error::InvalidArgument("max_subspace_dim must be at least 2".into()));
        }
        if !(self.tolerance > 0.0) || !(self.step_dt > 0.0) {
            return Err(Error::InvalidArgument("tolerance and step_dt must be positive".into()));
        }
        Ok(())
    }
}

/// Bookkeeping for one call of [`evolve_krylov`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovDiagnostics {
    pub substeps: usize,
    pub largest_subspace: usize,
    /// Sum of local error estimates.
    pub error_estimate: f64,
    /// Σ |‖ψ‖ − 1| measured before each renormalization.
    pub norm_drift: f64,
}

impl KrylovDiagnostics {
    pub fn absorb(&mut self, other: &KrylovDiagnostics) {
        self.substeps += other.substeps;
        self.largest_subspace = self.largest_subspace.max(other.largest_subspace);
        self.error_estimate += other.error_estimate;
        self.norm_drift += other.norm_drift;
    }
}

/// Orthonormal Lanczos basis with its tridiagonal projection.
struct KrylovSpace {
    beta0: f64,
    vectors: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    /// beta[j] couples vectors j and j+1; the last entry is the residual norm.
    beta: Vec<f64>,
    invariant: bool,
}

/// exp(-i T h) e_1 via the eigensystem of T.
struct ProjectedExp {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

impl ProjectedExp {
    fn new(alpha: &[f64], beta: &[f64]) -> Result<Self> {
        let m = alpha.len();
        let mut t = Mat::<f64>::zeros(m, m);
        for j in 0..m {
            t[(j, j)] = alpha[j];
            if j + 1 < m {
                t[(j, j + 1)] = beta[j];
                t[(j + 1, j)] = beta[j];
            }
        }
        let evd = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        Ok(ProjectedExp {
            values: (0..m).map(|k| s[k]).collect(),
            vectors: evd.U().to_owned(),
        })
    }

    fn apply(&self, h_ns: f64) -> Vec<Complex64> {
        let m = self.values.len();
        let w: Vec<Complex64> = (0..m)
            .map(|k| self.vectors[(0, k)] * Complex64::from_polar(1.0, -phase(self.values[k], h_ns)))
            .collect();
        (0..m)
            .map(|r| (0..m).map(|k| w[k] * self.vectors[(r, k)]).sum())
            .collect()
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl KrylovSpace {
    /// Grows the space until `accept` says the step `h_ns` is resolved, the
    /// space becomes invariant, or `max_dim` is reached.
    fn build(
        h: &SparseOperator,
        psi: &[Complex64],
        max_dim: usize,
        h_ns: f64,
        tolerance: f64,
    ) -> Result<(Self, ProjectedExp, f64)> {
        let beta0 = norm(psi);
        let scale = h.norm_inf().max(f64::MIN_POSITIVE);
        let mut space = KrylovSpace {
            beta0,
            vectors: vec![psi.iter().map(|a| a / beta0).collect()],
            alpha: Vec::new(),
            beta: Vec::new(),
            invariant: false,
        };
        let mut w = vec![Complex64::new(0.0, 0.0); psi.len()];
        let mut extra = 0;
        loop {
            let j = space.alpha.len();
            h.apply_into(&space.vectors[j], &mut w);
            let a = dot(&space.vectors[j], &w).re;
            for (x, v) in w.iter_mut().zip(&space.vectors[j]) {
                *x -= v * a;
            }
            if j > 0 {
                let b = space.beta[j - 1];
                for (x, v) in w.iter_mut().zip(&space.vectors[j - 1]) {
                    *x -= v * b;
                }
            }
            for v in &space.vectors {
                let c = dot(v, &w);
                for (x, y) in w.iter_mut().zip(v) {
                    *x -= y * c;
                }
            }
            let b = norm(&w);
            space.alpha.push(a);
            space.beta.push(b);

            let proj = ProjectedExp::new(&space.alpha, &space.beta)?;
            if b <= 1e-13 * scale {
                space.invariant = true;
                return Ok((space, proj, 0.0));
            }
            let estimate = space.estimate(&proj, h_ns);
            let dim = space.alpha.len();
            // One extra vector past the first acceptable size keeps the true
            // error well below the estimate.
            if estimate <= tolerance {
                extra += 1;
            }
            if extra == 2 || dim >= max_dim {
                return Ok((space, proj, estimate));
            }
            space.vectors.push(w.iter().map(|x| x / b).collect());
        }
    }

    fn estimate(&self, proj: &ProjectedExp, h_ns: f64) -> f64 {
        if self.invariant {
            return 0.0;
        }
        let y = proj.apply(h_ns);
        self.beta0 * self.beta.last().copied().unwrap_or(0.0) * y.last().map_or(0.0, |c| c.norm())
    }

    fn combine(&self, proj: &ProjectedExp, h_ns: f64, out: &mut [Complex64]) {
        let y = proj.apply(h_ns);
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for (v, c) in self.vectors.iter().zip(&y) {
            let c = c * self.beta0;
            for (x, vi) in out.iter_mut().zip(v) {
                *x += vi * c;
            }
        }
    }
}

/// Advances `psi` by `dt_ns` under `h`. The output is renormalized; the norm
/// drift before renormalization is reported in the diagnostics.
pub fn evolve_krylov(
    h: &SparseOperator,
    psi: &QuantumState,
    dt_ns: f64,
    cfg: &KrylovConfig,
) -> Result<(QuantumState, KrylovDiagnostics)> {
    cfg.validate()?;
    if !(dt_ns > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt_ns}")));
    }
    if h.dimension() != psi.dimension() {
        return Err(Error::DimensionMismatch {
            expected: h.dimension(),
            found: psi.dimension(),
        });
    }
    let mut diag = KrylovDiagnostics::default();
    let mut current = psi.amplitudes().to_vec();

    if h.is_diagonal() {
        for (a, &e) in current.iter_mut().zip(h.diagonal()) {
            *a *= Complex64::from_polar(1.0, -phase(e, dt_ns));
        }
        diag.substeps = 1;
        diag.largest_subspace = 1;
        let mut out = psi.with_amplitudes(current);
        diag.norm_drift = (out.normalize() - 1.0).abs();
        return Ok((out, diag));
    }

    let mut next = vec![Complex64::new(0.0, 0.0); current.len()];
    let mut remaining = dt_ns;
    const MAX_HALVINGS: u32 = 30;
    while remaining > 0.0 {
        let (space, proj, mut estimate) =
            KrylovSpace::build(h, &current, cfg.max_subspace_dim, remaining, cfg.tolerance)?;
        let mut step = remaining;
        let mut halvings = 0;
        while estimate > cfg.tolerance {
            if halvings == MAX_HALVINGS {
                return Err(Error::KrylovNotConverged {
                    estimate,
                    tolerance: cfg.tolerance,
                });
            }
            step *= 0.5;
            halvings += 1;
            estimate = space.estimate(&proj, step);
        }
        space.combine(&proj, step, &mut next);
        let n = norm(&next);
        diag.norm_drift += (n - 1.0).abs();
        next.iter_mut().for_each(|x| *x /= n);
        std::mem::swap(&mut current, &mut next);

        diag.substeps += 1;
        diag.largest_subspace = diag.largest_subspace.max(space.alpha.len());
        diag.error_estimate += estimate;
        remaining = if step >= remaining { 0.0 } else { remaining - step };
    }
    Ok((psi.with_amplitudes(current), diag))
}

/// Repeated [`evolve_krylov`] calls with outer step `cfg.step_dt`, landing
/// exactly on `t_ns`.
pub fn evolve_krylov_to(
    h: &SparseOperator,
    psi: &QuantumState,
    t_ns: f64,
    cfg: &KrylovConfig,
) -> Result<(QuantumState, KrylovDiagnostics)> {
    let mut diag = KrylovDiagnostics::default();
    let mut state = psi.clone();
    let mut elapsed = 0.0;
    while t_ns - elapsed > 1e-12 * t_ns.max(1.0) {
        let dt = cfg.step_dt.min(t_ns - elapsed);
        let (next, d) = evolve_krylov(h, &state, dt, cfg)?;
        diag.absorb(&d);
        state = next;
        elapsed += dt;
    }
    Ok((state, diag))
}
