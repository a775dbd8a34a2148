use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Single-sided amplitude spectra of mean-subtracted signals.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    /// Bin frequencies in MHz, 0 up to Nyquist.
    pub frequencies: Vec<f64>,
    /// Amplitude averaged over all signals.
    pub mean_amplitude: Vec<f64>,
    /// `per_signal[q][k]` is the amplitude of signal q at bin k.
    pub per_signal: Vec<Vec<f64>>,
    /// Bin spacing 1/(n·dt), MHz.
    pub resolution: f64,
}

impl FourierSpectrum {
    /// Index of the largest averaged amplitude, excluding the zero bin.
    pub fn peak_bin(&self) -> usize {
        self.mean_amplitude
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(k, _)| k)
    }

    /// Local maxima of the averaged spectrum (zero bin excluded), strongest
    /// first.
    pub fn peaks(&self) -> Vec<usize> {
        let a = &self.mean_amplitude;
        let mut idx: Vec<usize> = (1..a.len())
            .filter(|&k| a[k] > a[k - 1] && (k + 1 == a.len() || a[k] >= a[k + 1]))
            .collect();
        idx.sort_by(|&x, &y| a[y].total_cmp(&a[x]));
        idx
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("frequency_mhz,mean_amplitude");
        for q in 0..self.per_signal.len() {
            let _ = write!(out, ",q{q}");
        }
        out.push('\n');
        for (k, f) in self.frequencies.iter().enumerate() {
            let _ = write!(out, "{f},{}", self.mean_amplitude[k]);
            for s in &self.per_signal {
                let _ = write!(out, ",{}", s[k]);
            }
            out.push('\n');
        }
        out
    }
}

/// Checks that `times` (ns) are evenly spaced and returns the spacing.
pub fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::InvalidTimeGrid("need at least two samples".into()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::InvalidTimeGrid("times must increase".into()));
    }
    for (k, t) in times.iter().enumerate() {
        if (t - (times[0] + k as f64 * dt)).abs() > 1e-9 * dt.max(1.0) * (k as f64 + 1.0) {
            return Err(Error::InvalidTimeGrid(format!("sample {k} at t={t} breaks uniform spacing")));
        }
    }
    Ok(dt)
}

/// Amplitude spectrum of each signal after removing its mean, with a
/// rectangular window over all samples. `signals[q]` is sampled at `times`
/// (ns); frequencies are reported in MHz. Amplitudes are single-sided:
/// a unit cosine on an exact bin gives amplitude 1.
pub fn amplitude_spectrum(times: &[f64], signals: &[Vec<f64>]) -> Result<FourierSpectrum> {
    let dt = uniform_spacing(times)?;
    let n = times.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let half = n / 2 + 1;
    let resolution = 1e3 / (n as f64 * dt);
    let mut per_signal = Vec::with_capacity(signals.len());
    for (q, sig) in signals.iter().enumerate() {
        if sig.len() != n {
            return Err(Error::InvalidArgument(format!(
                "signal {q} has {} samples, grid has {n}",
                sig.len()
            )));
        }
        let mean = sig.iter().sum::<f64>() / n as f64;
        let mut buf: Vec<Complex64> = sig.iter().map(|x| Complex64::new(x - mean, 0.0)).collect();
        fft.process(&mut buf);
        let amp: Vec<f64> = (0..half)
            .map(|k| {
                let scale = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
                scale * buf[k].norm() / n as f64
            })
            .collect();
        per_signal.push(amp);
    }
    let mut mean_amplitude = vec![0.0; half];
    for s in &per_signal {
        for (m, a) in mean_amplitude.iter_mut().zip(s) {
            *m += a;
        }
    }
    if !per_signal.is_empty() {
        mean_amplitude.iter_mut().for_each(|m| *m /= per_signal.len() as f64);
    }
    Ok(FourierSpectrum {
        frequencies: (0..half).map(|k| k as f64 * resolution).collect(),
        mean_amplitude,
        per_signal,
        resolution,
    })
}

/// Spectrum over the half-open window [t₀, t_last): the final sample is
/// dropped so that a closed grid 0..=T with step dt yields bins spaced
/// exactly 1/T.
pub fn half_open_spectrum(times: &[f64], signals: &[Vec<f64>]) -> Result<FourierSpectrum> {
    if times.len() < 3 {
        return Err(Error::InvalidTimeGrid("need at least three samples".into()));
    }
    let m = times.len() - 1;
    let trimmed: Vec<Vec<f64>> = signals.iter().map(|s| s[..m.min(s.len())].to_vec()).collect();
    amplitude_spectrum(&times[..m], &trimmed)
}
