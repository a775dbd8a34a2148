//! Energy densities and adjacent-gap ratio statistics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean gap ratio of the orthogonal ensemble, 4 − 2√3.
pub const GOE_MEAN_RATIO: f64 = 0.535_898_384_862_245_4;
/// Mean gap ratio of uncorrelated levels, 2 ln 2 − 1.
pub const POISSON_MEAN_RATIO: f64 = 0.386_294_361_119_890_6;

/// Gaps below this fraction of the spectral width count as degeneracies.
pub const DEGENERACY_RTOL: f64 = 1e-10;

/// ε = (E − E_GS)/(E_max − E_GS).
pub fn energy_density(e: f64, e_gs: f64, e_max: f64) -> Result<f64> {
    if !(e_max > e_gs) {
        return Err(Error::DegenerateSpectrum { e_gs, e_max });
    }
    Ok((e - e_gs) / (e_max - e_gs))
}

/// Contiguous ε windows of fixed width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindows {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

impl Default for EnergyWindows {
    fn default() -> Self {
        EnergyWindows {
            lo: 0.1,
            hi: 0.9,
            width: 0.05,
        }
    }
}

impl EnergyWindows {
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let count = ((self.hi - self.lo) / self.width + 1e-9).floor() as usize;
        (0..count)
            .map(|k| {
                let a = self.lo + k as f64 * self.width;
                (a, a + self.width)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRatio {
    /// Energy density of the middle level E_{α+1}.
    pub epsilon: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMean {
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub count: usize,
}

/// Histogram normalized as a probability density on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRatioStats {
    pub ratios: Vec<GapRatio>,
    /// Ratios dropped because one of their gaps was degenerate.
    pub degenerate_dropped: usize,
    pub windows: Vec<WindowMean>,
    /// Windows with fewer than three ratios; `mean` is NaN there.
    pub skipped_windows: Vec<WindowMean>,
    pub histogram: Histogram,
}

impl GapRatioStats {
    pub fn mean(&self) -> f64 {
        self.ratios.iter().map(|g| g.r).sum::<f64>() / self.ratios.len() as f64
    }

    /// Mean and count of the ratios with ε in [lo, hi].
    pub fn mean_in(&self, lo: f64, hi: f64) -> (f64, usize) {
        let sel: Vec<f64> = self
            .ratios
            .iter()
            .filter(|g| g.epsilon >= lo && g.epsilon <= hi)
            .map(|g| g.r)
            .collect();
        (sel.iter().sum::<f64>() / sel.len() as f64, sel.len())
    }

    pub fn windows_csv(&self) -> String {
        let mut out = String::from("eps_lo,eps_hi,mean_r,count\n");
        for w in &self.windows {
            let _ = writeln!(out, "{},{},{},{}", w.lo, w.hi, w.mean, w.count);
        }
        out
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("r_lo,r_hi,density,p_goe,p_poisson\n");
        for (k, d) in self.histogram.density.iter().enumerate() {
            let (a, b) = (self.histogram.edges[k], self.histogram.edges[k + 1]);
            let mid = 0.5 * (a + b);
            let _ = writeln!(out, "{a},{b},{d},{},{}", p_goe(mid), p_poisson(mid));
        }
        out
    }
}

/// Raw ratios of an ascending list; returns (ratios, dropped) where each
/// ratio carries the index of its middle level.
pub fn gap_ratios(sorted: &[f64]) -> (Vec<(usize, f64)>, usize) {
    if sorted.len() < 3 {
        return (Vec::new(), 0);
    }
    let width = sorted[sorted.len() - 1] - sorted[0];
    let threshold = DEGENERACY_RTOL * width.max(f64::MIN_POSITIVE);
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Vec::with_capacity(gaps.len() - 1);
    let mut dropped = 0;
    for a in 0..gaps.len() - 1 {
        let (d0, d1) = (gaps[a], gaps[a + 1]);
        if d0 <= threshold || d1 <= threshold {
            dropped += 1;
            continue;
        }
        out.push((a + 1, d0.min(d1) / d0.max(d1)));
    }
    (out, dropped)
}

/// Ratio statistics of a spectrum. `extremes` overrides (E_GS, E_max) used
/// for ε; by default the first and last eigenvalue.
pub fn gap_ratio_statistics(
    eigenvalues: &[f64],
    extremes: Option<(f64, f64)>,
    windows: &EnergyWindows,
    histogram_bins: usize,
) -> Result<GapRatioStats> {
    if eigenvalues.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "gap ratios need at least 3 levels, got {}",
            eigenvalues.len()
        )));
    }
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (e_gs, e_max) = extremes.unwrap_or((sorted[0], sorted[sorted.len() - 1]));
    if !(e_max > e_gs) {
        return Err(Error::DegenerateSpectrum { e_gs, e_max });
    }
    let (raw, degenerate_dropped) = gap_ratios(&sorted);
    let ratios: Vec<GapRatio> = raw
        .into_iter()
        .map(|(k, r)| GapRatio {
            epsilon: (sorted[k] - e_gs) / (e_max - e_gs),
            r,
        })
        .collect();

    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    let bounds = windows.bounds();
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        let last = i + 1 == bounds.len();
        let sel: Vec<f64> = ratios
            .iter()
            .filter(|g| g.epsilon >= lo && (g.epsilon < hi || (last && g.epsilon <= hi)))
            .map(|g| g.r)
            .collect();
        let w = WindowMean {
            lo,
            hi,
            mean: if sel.len() >= 3 {
                sel.iter().sum::<f64>() / sel.len() as f64
            } else {
                f64::NAN
            },
            count: sel.len(),
        };
        if sel.len() >= 3 {
            kept.push(w);
        } else {
            skipped.push(w);
        }
    }

    let bins = histogram_bins.max(1);
    let mut counts = vec![0usize; bins];
    for g in &ratios {
        counts[((g.r * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let total = ratios.len().max(1) as f64;
    let histogram = Histogram {
        edges: (0..=bins).map(|k| k as f64 / bins as f64).collect(),
        density: counts.iter().map(|&c| c as f64 * bins as f64 / total).collect(),
    };

    Ok(GapRatioStats {
        ratios,
        degenerate_dropped,
        windows: kept,
        skipped_windows: skipped,
        histogram,
    })
}

/// Orthogonal-ensemble density of r = min/max on [0, 1]. The familiar
/// 27/8 prefactor normalizes the distribution of δ_{α+1}/δ_α on [0, ∞);
/// folding onto [0, 1] doubles it.
pub fn p_goe(r: f64) -> f64 {
    27.0 / 4.0 * (r + r * r) / (1.0 + r + r * r).powf(2.5)
}

/// Poisson density of r = min/max on [0, 1].
pub fn p_poisson(r: f64) -> f64 {
    2.0 / (1.0 + r).powi(2)
}

/// Both reference densities on the given grid: (P_GOE, P_P).
pub fn reference_distributions(grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (grid.iter().map(|&r| p_goe(r)).collect(), grid.iter().map(|&r| p_poisson(r)).collect())
}

/// Composite Simpson rule on [a, b] with `intervals` (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_endpoints() {
        assert_eq!(energy_density(-3.0, -3.0, 5.0).unwrap(), 0.0);
        assert_eq!(energy_density(1.0, -3.0, 5.0).unwrap(), 0.5);
        assert!(matches!(energy_density(1.0, 2.0, 2.0), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn equally_spaced_levels_give_unit_ratios() {
        let e: Vec<f64> = (0..50).map(|k| 0.3 * k as f64 - 2.0).collect();
        let s = gap_ratio_statistics(&e, None, &EnergyWindows::default(), 20).unwrap();
        assert_eq!(s.ratios.len(), 48);
        assert!(s.ratios.iter().all(|g| (g.r - 1.0).abs() < 1e-12));
    }

    #[test]
    fn degeneracies_are_dropped_and_counted() {
        let e = [0.0, 1.0, 1.0, 2.5, 3.0, 4.0];
        let (r, dropped) = gap_ratios(&e);
        // gaps 1,0,1.5,0.5,1: ratios around the zero gap are dropped
        assert_eq!(dropped, 2);
        assert_eq!(r.len(), 2);
        assert!((r[0].1 - 1.0 / 3.0).abs() < 1e-15 && (r[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reference_values() {
        assert_eq!(p_poisson(0.0), 2.0);
        assert_eq!(p_goe(0.0), 0.0);
        assert!((simpson(p_goe, 0.0, 1.0, 20_000) - 1.0).abs() < 1e-6);
        assert!((simpson(p_poisson, 0.0, 1.0, 20_000) - 1.0).abs() < 1e-6);
        let goe = simpson(|r| r * p_goe(r), 0.0, 1.0, 20_000);
        let poi = simpson(|r| r * p_poisson(r), 0.0, 1.0, 20_000);
        assert!((goe - (4.0 - 2.0 * 3f64.sqrt())).abs() < 1e-6);
        assert!((poi - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-6);
        assert!((GOE_MEAN_RATIO - (4.0 - 2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((POISSON_MEAN_RATIO - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn windows_cover_range() {
        let b = EnergyWindows::default().bounds();
        assert_eq!(b.len(), 16);
        assert!((b[0].0 - 0.1).abs() < 1e-12 && (b[15].1 - 0.9).abs() < 1e-12);
    }
}
