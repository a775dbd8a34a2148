use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::hamiltonian::phase;
use crate::model::{QuantumState, SparseOperator};

/// Default ceiling on the sector dimension accepted for dense work.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Complete eigensystem of a real symmetric sector operator.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    /// Column α is |α⟩.
    eigenvectors: Mat<f64>,
}

fn dense(h: &SparseOperator, cap: usize) -> Result<Mat<f64>> {
    let n = h.dimension();
    if n > cap {
        return Err(Error::DimensionOverCap { dimension: n, cap });
    }
    let mut m = Mat::<f64>::zeros(n, n);
    for r in 0..n {
        m[(r, r)] = h.diagonal()[r];
        for (c, v) in h.row(r) {
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

/// Full eigensystem with the default dimension cap.
pub fn full_diagonalize(h: &SparseOperator) -> Result<EigenDecomposition> {
    full_diagonalize_capped(h, DEFAULT_DENSE_CAP)
}

pub fn full_diagonalize_capped(h: &SparseOperator, cap: usize) -> Result<EigenDecomposition> {
    let m = dense(h, cap)?;
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let n = h.dimension();
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let eigenvalues = order.iter().map(|&k| s[k]).collect();
    let eigenvectors = Mat::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only; cheaper than [`full_diagonalize`] by
/// skipping the eigenvector back-transformation.
pub fn eigenvalues(h: &SparseOperator) -> Result<Vec<f64>> {
    eigenvalues_capped(h, DEFAULT_DENSE_CAP)
}

pub fn eigenvalues_capped(h: &SparseOperator, cap: usize) -> Result<Vec<f64>> {
    if h.is_diagonal() {
        let mut v = h.diagonal().to_vec();
        v.sort_by(f64::total_cmp);
        return Ok(v);
    }
    let m = dense(h, cap)?;
    let mut v = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

impl EigenDecomposition {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Mat<f64> {
        &self.eigenvectors
    }

    /// |α⟩ as a contiguous slice.
    pub fn eigenvector(&self, alpha: usize) -> &[f64] {
        self.eigenvectors
            .col(alpha)
            .try_as_col_major()
            .expect("owned matrices are column-major")
            .as_slice()
    }

    /// Component ⟨basis r|α⟩.
    pub fn component(&self, r: usize, alpha: usize) -> f64 {
        self.eigenvectors[(r, alpha)]
    }

    /// ⟨α|ψ⟩ for all α.
    pub fn coefficients(&self, psi: &QuantumState) -> Result<Vec<Complex64>> {
        let n = self.dimension();
        if psi.dimension() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.dimension(),
            });
        }
        let x = Mat::from_fn(n, 2, |r, c| {
            let a = psi.amplitudes()[r];
            if c == 0 {
                a.re
            } else {
                a.im
            }
        });
        let c = self.eigenvectors.transpose() * &x;
        Ok((0..n).map(|k| Complex64::new(c[(k, 0)], c[(k, 1)])).collect())
    }

    /// Σ_α c_α |α⟩.
    pub fn synthesize(&self, template: &QuantumState, coeffs: &[Complex64]) -> QuantumState {
        let n = self.dimension();
        let x = Mat::from_fn(n, 2, |k, c| if c == 0 { coeffs[k].re } else { coeffs[k].im });
        let y = &self.eigenvectors * &x;
        template.with_amplitudes((0..n).map(|r| Complex64::new(y[(r, 0)], y[(r, 1)])).collect())
    }

    /// Largest ‖H v_α − E_α v_α‖ over the eigenpairs.
    pub fn max_residual(&self, h: &SparseOperator) -> f64 {
        let n = self.dimension();
        let mut hv = vec![0.0; n];
        let mut worst: f64 = 0.0;
        for a in 0..n {
            let v = self.eigenvector(a);
            h.apply_real_into(v, &mut hv);
            let e = self.eigenvalues[a];
            let res = hv.iter().zip(v).map(|(x, y)| (x - e * y).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(res);
        }
        worst
    }
}

/// Propagates in the eigenbasis: |ψ_t⟩ = Σ_α e^{-iE_α t} ⟨α|ψ_0⟩ |α⟩.
pub fn evolve_exact(eig: &EigenDecomposition, psi0: &QuantumState, t_ns: f64) -> Result<QuantumState> {
    if !(t_ns >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t_ns}")));
    }
    if t_ns == 0.0 {
        return Ok(psi0.clone());
    }
    let c = eig.coefficients(psi0)?;
    Ok(ExactPropagator::from_coefficients(eig, c).at(psi0, t_ns))
}

/// Eigenbasis coefficients of one initial state, reused for many times.
pub struct ExactPropagator<'a> {
    eig: &'a EigenDecomposition,
    coeffs: Vec<Complex64>,
}

impl<'a> ExactPropagator<'a> {
    pub fn new(eig: &'a EigenDecomposition, psi0: &QuantumState) -> Result<Self> {
        Ok(Self::from_coefficients(eig, eig.coefficients(psi0)?))
    }

    fn from_coefficients(eig: &'a EigenDecomposition, coeffs: Vec<Complex64>) -> Self {
        ExactPropagator { eig, coeffs }
    }

    pub fn at(&self, template: &QuantumState, t_ns: f64) -> QuantumState {
        let rotated: Vec<Complex64> = self
            .coeffs
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(c, &e)| c * Complex64::from_polar(1.0, -phase(e, t_ns)))
            .collect();
        self.eig.synthesize(template, &rotated)
    }
}
