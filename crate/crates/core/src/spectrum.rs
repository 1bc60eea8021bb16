//! Spectral and correlation estimators for uniformly sampled real series.

use std::io::{self, Write};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Frequency grid plus one-sided power spectral density (units²/Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    frequencies: Vec<f64>,
    psd: Vec<f64>,
    segment_count: usize,
    segment_length: usize,
}

impl SpectrumEstimate {
    /// Checks that the grid is strictly increasing and non-negative, and that
    /// every PSD value is finite and non-negative.
    pub fn new(
        frequencies: Vec<f64>,
        psd: Vec<f64>,
        segment_count: usize,
        segment_length: usize,
    ) -> Result<Self> {
        if frequencies.len() != psd.len() {
            return Err(Error::Shape {
                expected: frequencies.len(),
                got: psd.len(),
            });
        }
        check_grid(&frequencies)?;
        if let Some(bad) = psd.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidInput(format!("psd value {bad} is not >= 0")));
        }
        Ok(SpectrumEstimate {
            frequencies,
            psd,
            segment_count,
            segment_length,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn psd(&self) -> &[f64] {
        &self.psd
    }

    /// Number of averaged segments; 0 for model spectra.
    pub fn segment_count(&self) -> usize {
        self.segment_count
    }

    /// FFT length of each segment; 0 for model spectra.
    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn len(&self) -> usize {
        self.psd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psd.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.frequencies
            .iter()
            .copied()
            .zip(self.psd.iter().copied())
    }

    /// Trapezoidal integral of the PSD over the grid.
    pub fn integrate(&self) -> f64 {
        self.frequencies
            .windows(2)
            .zip(self.psd.windows(2))
            .map(|(f, p)| 0.5 * (f[1] - f[0]) * (p[0] + p[1]))
            .sum()
    }

    /// `Σ psd·df` for a uniform grid starting at 0 (Welch output); matches the
    /// series variance by Parseval.
    pub fn bin_sum(&self) -> f64 {
        if self.frequencies.len() < 2 {
            return 0.0;
        }
        let df = self.frequencies[1] - self.frequencies[0];
        self.psd.iter().sum::<f64>() * df
    }

    /// CSV with header `f_hz,psd_m2_per_hz`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "f_hz,psd_m2_per_hz")?;
        for (f, p) in self.iter() {
            writeln!(out, "{f:.17e},{p:.17e}")?;
        }
        Ok(())
    }
}

/// Frequencies must be finite, non-negative and strictly increasing.
pub fn check_grid(frequencies: &[f64]) -> Result<()> {
    if let Some(f) = frequencies.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
        return Err(Error::InvalidGrid(format!("frequency {f} is not >= 0")));
    }
    if let Some(w) = frequencies.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Periodic Hann window of length `n`.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}

/// Welch-averaged one-sided PSD with a periodic Hann window and per-segment
/// mean removal.
///
/// `segment_length` must be a power of two no longer than the series;
/// `overlap_fraction` is in `[0, 1)`.
pub fn welch(
    samples: &[f64],
    sample_rate: f64,
    segment_length: usize,
    overlap_fraction: f64,
) -> Result<SpectrumEstimate> {
    if segment_length < 2 || !segment_length.is_power_of_two() {
        return Err(Error::Segmentation(format!(
            "segment length {segment_length} is not a power of two >= 2"
        )));
    }
    if segment_length > samples.len() {
        return Err(Error::Segmentation(format!(
            "segment length {segment_length} exceeds series length {}",
            samples.len()
        )));
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::Segmentation(format!(
            "overlap fraction {overlap_fraction} not in [0, 1)"
        )));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidInput(format!("sample rate {sample_rate}")));
    }

    let n = segment_length;
    let overlap = (overlap_fraction * n as f64).round() as usize;
    let step = (n - overlap).max(1);
    let window = hann(n);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let bins = n / 2 + 1;
    let mut acc = vec![0.0; bins];

    let mut segments = 0;
    let mut start = 0;
    while start + n <= samples.len() {
        let seg = &samples[start..start + n];
        let mean = seg.iter().sum::<f64>() / n as f64;
        for ((b, &x), &w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex::new((x - mean) * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (a, z) in acc.iter_mut().zip(&buf[..bins]) {
            *a += z.norm_sqr();
        }
        segments += 1;
        start += step;
    }

    let norm = 1.0 / (sample_rate * window_power * segments as f64);
    let psd: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            // DC and Nyquist have no mirror image.
            let one_sided = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            a * norm * one_sided
        })
        .collect();
    let df = sample_rate / n as f64;
    let frequencies = (0..bins).map(|k| k as f64 * df).collect();
    SpectrumEstimate::new(frequencies, psd, segments, n)
}

/// Biased sample autocovariance on the sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    lag_step: f64,
    values: Vec<f64>,
}

impl Autocorrelation {
    /// Lag spacing, s.
    pub fn lag_step(&self) -> f64 {
        self.lag_step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lags(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| k as f64 * self.lag_step)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lags().zip(self.values.iter().copied())
    }

    /// Linear interpolation between grid lags; `None` outside the table.
    pub fn value_at(&self, lag: f64) -> Option<f64> {
        if lag.is_nan() || lag < 0.0 {
            return None;
        }
        let pos = lag / self.lag_step;
        let lo = pos.floor() as usize;
        let frac = pos - lo as f64;
        match (self.values.get(lo), self.values.get(lo + 1)) {
            (Some(a), Some(b)) => Some(a + frac * (b - a)),
            (Some(a), None) if frac < 1e-9 => Some(*a),
            _ => None,
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "lag_s,acf_m2")?;
        for (lag, v) in self.iter() {
            writeln!(out, "{lag:.17e},{v:.17e}")?;
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            acc[i] += x[i] * y[i];
        }
    }
    acc.iter().sum::<f64>() + tail
}

/// Variance about the sample mean with `1/n` normalization; identical to
/// the autocovariance at lag 0.
pub fn sample_variance(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let centered = centered(samples);
    dot(&centered, &centered) / samples.len() as f64
}

fn centered(samples: &[f64]) -> Vec<f64> {
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.iter().map(|x| x - mean).collect()
}

/// Biased autocovariance `C(k) = (1/n) Σ (x_t − x̄)(x_{t+k} − x̄)` for lags up to
/// `max_lag` seconds, which may not exceed a quarter of the series duration.
pub fn autocorrelation(samples: &[f64], sample_rate: f64, max_lag: f64) -> Result<Autocorrelation> {
    let n = samples.len();
    let duration = n as f64 / sample_rate;
    let limit = duration / 4.0;
    if max_lag.is_nan() || max_lag < 0.0 || max_lag > limit * (1.0 + 1e-12) {
        return Err(Error::InsufficientData { max_lag, limit });
    }
    let max_k = ((max_lag * sample_rate) + 1e-9).floor() as usize;
    let centered = centered(samples);
    let values = (0..=max_k.min(n.saturating_sub(1)))
        .map(|k| dot(&centered[..n - k], &centered[k..]) / n as f64)
        .collect();
    Ok(Autocorrelation {
        lag_step: 1.0 / sample_rate,
        values,
    })
}
