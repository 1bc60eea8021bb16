//! Stationary transverse-jitter ("holographic noise") time series.
//!
//! The process is a boxcar moving average of white noise over a coherence
//! window `τ_c` (default `2L/c`), scaled so its variance is exactly `λL`. Its
//! autocovariance is the triangle `λL·max(0, 1 − |τ|/τ_c)`.
//!
//! Samples are drawn exactly from the continuous-time process: the window
//! average is the increment of a Brownian path over `[t − τ_c, t]`, and the
//! path is generated on the merged grid of sample times and window starts.
//! This keeps the triangle exact even when `τ_c·f_s` is not an integer.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`), a counter-based stream
//! cipher generator: a series is fully determined by `(seed, stream)`, and
//! ensemble member `k` uses stream `k` of the master seed.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::planck::PlanckScale;
use crate::spectrum::{self, Autocorrelation, SpectrumEstimate};
use crate::{Error, Result};

/// Re-sum the sliding window from scratch this often to bound rounding drift.
const RESUM_INTERVAL: usize = 1024;

/// Inputs that fully determine a series (with the stream index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub arm_length: f64,
    pub sample_rate: f64,
    pub duration: f64,
    pub seed: u64,
    /// Coherence window override, s. `None` means the round trip `2L/c`.
    pub window: Option<f64>,
}

impl NoiseConfig {
    pub fn new(arm_length: f64, sample_rate: f64, duration: f64, seed: u64) -> Self {
        NoiseConfig {
            arm_length,
            sample_rate,
            duration,
            seed,
            window: None,
        }
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn coherence_time(&self, scale: &PlanckScale) -> f64 {
        self.window.unwrap_or(2.0 * self.arm_length / scale.c())
    }

    /// `round(sample_rate × duration)`.
    pub fn len(&self) -> usize {
        (self.sample_rate * self.duration).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self, scale: &PlanckScale) -> Result<()> {
        let l = self.arm_length;
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidSeparation(l));
        }
        let min_rate = 2.0 * scale.c() / l;
        if !(self.sample_rate.is_finite() && self.sample_rate > min_rate) {
            return Err(Error::Undersampled {
                rate: self.sample_rate,
                min: min_rate,
            });
        }
        let tau = self.coherence_time(scale);
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidInput(format!("coherence window {tau} s")));
        }
        if self.sample_rate * tau < 4.0 {
            return Err(Error::Undersampled {
                rate: self.sample_rate,
                min: 4.0 / tau,
            });
        }
        let min_duration = 10.0 * tau;
        if !(self.duration.is_finite() && self.duration >= min_duration) || self.len() < 2 {
            return Err(Error::InsufficientDuration {
                duration: self.duration,
                min: min_duration,
            });
        }
        Ok(())
    }

    pub fn generate(&self, scale: &PlanckScale) -> Result<NoiseSeries> {
        self.generate_stream(0, scale)
    }

    /// Series drawn from stream `stream` of `self.seed`.
    pub fn generate_stream(&self, stream: u64, scale: &PlanckScale) -> Result<NoiseSeries> {
        self.validate(scale)?;
        let tau = self.coherence_time(scale);
        let variance = scale.lambda() * self.arm_length;
        let samples = boxcar_samples(
            self.len(),
            tau * self.sample_rate,
            variance,
            self.seed,
            stream,
        );
        Ok(NoiseSeries {
            samples,
            sample_rate: self.sample_rate,
            arm_length: self.arm_length,
            seed: self.seed,
            stream,
            coherence_time: tau,
        })
    }
}

/// Unit-free core: `n` samples of a boxcar average over `window_samples`
/// sampling intervals with the given variance.
fn boxcar_samples(
    n: usize,
    window_samples: f64,
    variance: f64,
    seed: u64,
    stream: u64,
) -> Vec<f64> {
    let mut k = window_samples.floor() as usize;
    let mut r = window_samples - k as f64;
    if r > 1.0 - 1e-9 {
        k += 1;
        r = 0.0;
    } else if r < 1e-9 {
        r = 0.0;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

    // Interval i (between grid points) splits at the window start offset into
    // a lower part of length (1-r) and an upper part of length r, in units of
    // the sampling interval. Interval s+k ends at sample s.
    let intervals = n + k;
    let lower_sd = (1.0 - r).sqrt();
    let upper_sd = r.sqrt();
    let mut full = Vec::with_capacity(intervals);
    let mut upper = Vec::with_capacity(if r > 0.0 { intervals } else { 0 });
    for _ in 0..intervals {
        if r > 0.0 {
            let lo = lower_sd * normal();
            let up = upper_sd * normal();
            full.push(lo + up);
            upper.push(up);
        } else {
            full.push(normal());
        }
    }

    let amplitude = (variance / window_samples).sqrt();
    let mut out = Vec::with_capacity(n);
    // Sample s covers full intervals [s+1, s+k] and the upper part of s.
    let mut window_sum: f64 = full[1..=k].iter().sum();
    for s in 0..n {
        if s > 0 {
            if s % RESUM_INTERVAL == 0 {
                window_sum = full[s + 1..=s + k].iter().sum();
            } else {
                window_sum += full[s + k] - full[s];
            }
        }
        let partial = if r > 0.0 { upper[s] } else { 0.0 };
        out.push(amplitude * (window_sum + partial));
    }
    out
}

/// Uniformly sampled transverse displacement, m.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSeries {
    samples: Vec<f64>,
    sample_rate: f64,
    arm_length: f64,
    seed: u64,
    stream: u64,
    coherence_time: f64,
}

impl NoiseSeries {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn arm_length(&self) -> f64 {
        self.arm_length
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn coherence_time(&self) -> f64 {
        self.coherence_time
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn variance(&self) -> f64 {
        spectrum::sample_variance(&self.samples)
    }

    pub fn rms(&self) -> f64 {
        self.variance().sqrt()
    }

    /// CSV with header `t_s,x_m`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t_s,x_m")?;
        for (i, x) in self.samples.iter().enumerate() {
            let t = i as f64 / self.sample_rate;
            writeln!(out, "{t:.17e},{x:.17e}")?;
        }
        Ok(())
    }
}

pub fn generate_timeseries(
    arm_length: f64,
    sample_rate: f64,
    duration: f64,
    seed: u64,
    scale: &PlanckScale,
) -> Result<NoiseSeries> {
    NoiseConfig::new(arm_length, sample_rate, duration, seed).generate(scale)
}

/// Generate `members` series from streams `0..members` of `config.seed` in
/// parallel and reduce each with `f`. Results are in stream order.
pub fn ensemble_map<T, F>(
    config: &NoiseConfig,
    members: u64,
    scale: &PlanckScale,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(NoiseSeries) -> T + Sync + Send,
{
    config.validate(scale)?;
    (0..members)
        .into_par_iter()
        .map(|k| config.generate_stream(k, scale).map(&f))
        .collect()
}

/// Biased sample autocovariance up to `max_lag` seconds (≤ duration/4).
pub fn autocorrelation(series: &NoiseSeries, max_lag: f64) -> Result<Autocorrelation> {
    spectrum::autocorrelation(series.samples(), series.sample_rate(), max_lag)
}

/// Welch PSD (Hann window) of a series.
pub fn power_spectrum(
    series: &NoiseSeries,
    segment_length: usize,
    overlap_fraction: f64,
) -> Result<SpectrumEstimate> {
    spectrum::welch(
        series.samples(),
        series.sample_rate(),
        segment_length,
        overlap_fraction,
    )
}

/// Model autocovariance `λL·max(0, 1 − |lag|/τ_c)` for coherence window `tau`.
pub fn triangle_acf(arm_length: f64, lag: f64, tau: f64, scale: &PlanckScale) -> f64 {
    scale.lambda() * arm_length * (1.0 - lag.abs() / tau).max(0.0)
}

/// `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// One-sided model PSD for the default window `τ_c = 2L/c`:
/// `2λL·τ_c·sinc²(f·τ_c)`, m²/Hz. Integrates to `λL` over `[0, ∞)`.
pub fn analytic_psd(arm_length: f64, frequency: f64, scale: &PlanckScale) -> f64 {
    analytic_psd_with_window(arm_length, frequency, 2.0 * arm_length / scale.c(), scale)
}

pub fn analytic_psd_with_window(
    arm_length: f64,
    frequency: f64,
    tau: f64,
    scale: &PlanckScale,
) -> f64 {
    let s = sinc(frequency * tau);
    2.0 * scale.lambda() * arm_length * tau * s * s
}

/// RMS displacement over the one-way light time: `c·√(λ/L)`, m/s.
pub fn drift_velocity_scale(arm_length: f64, scale: &PlanckScale) -> f64 {
    scale.c() * (scale.lambda() / arm_length).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scale() -> PlanckScale {
        PlanckScale::codata()
    }

    #[test]
    fn rejects_bad_configs() {
        let s = scale();
        let c = s.c();
        let l = 40.0;
        let ok = NoiseConfig::new(l, 25e6, 1e-3, 1);
        assert!(ok.validate(&s).is_ok());
        assert!(matches!(
            NoiseConfig::new(l, 2.0 * c / l, 1e-3, 1).validate(&s),
            Err(Error::Undersampled { .. })
        ));
        assert!(matches!(
            NoiseConfig::new(l, 25e6, 9.0 * 2.0 * l / c, 1).validate(&s),
            Err(Error::InsufficientDuration { .. })
        ));
        assert!(matches!(
            NoiseConfig::new(0.0, 25e6, 1e-3, 1).validate(&s),
            Err(Error::InvalidSeparation(_))
        ));
        // One-way window at a rate that only resolves the round trip.
        assert!(matches!(
            NoiseConfig::new(l, 16e6, 1e-3, 1)
                .with_window(l / c)
                .validate(&s),
            Err(Error::Undersampled { .. })
        ));
    }

    #[test]
    fn deterministic_and_stream_dependent() {
        let s = scale();
        let cfg = NoiseConfig::new(40.0, 25e6, 1e-3, 7);
        let a = cfg.generate(&s).unwrap();
        let b = cfg.generate(&s).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_eq!(a.len(), 25_000);
        let c = cfg.generate_stream(1, &s).unwrap();
        assert_ne!(a.samples(), c.samples());
        let d = cfg.with_seed(8).generate(&s).unwrap();
        assert_ne!(a.samples(), d.samples());
    }

    #[test]
    fn unit_process_has_triangle_acf() {
        // Brute force over many independent windows: fractional window 6.5.
        let n = 400_000;
        let x = boxcar_samples(n, 6.5, 1.0, 3, 0);
        let acf = spectrum::autocorrelation(&x, 1.0, 10.0).unwrap();
        for (k, v) in acf.values().iter().enumerate() {
            let want = (1.0 - k as f64 / 6.5).max(0.0);
            assert!((v - want).abs() < 0.02, "lag {k}: {v} vs {want}");
        }
    }

    #[test]
    fn integer_window_path() {
        let x = boxcar_samples(200_000, 8.0, 4.0, 9, 2);
        let acf = spectrum::autocorrelation(&x, 1.0, 9.0).unwrap();
        assert!((acf.values()[0] / 4.0 - 1.0).abs() < 0.03);
        assert!((acf.values()[4] / 4.0 - 0.5).abs() < 0.03);
        assert!((acf.values()[8] / 4.0).abs() < 0.03);
    }

    #[test]
    fn resum_does_not_change_statistics() {
        // Window sums are re-derived every RESUM_INTERVAL samples; the
        // sequence must stay continuous across those boundaries.
        let x = boxcar_samples(3 * RESUM_INTERVAL, 5.25, 1.0, 1, 0);
        let mut full = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        rng.set_stream(0);
        let (k, r) = (5usize, 0.25f64);
        let mut upper = Vec::new();
        for _ in 0..x.len() + k {
            let lo: f64 = StandardNormal.sample(&mut rng);
            let up: f64 = StandardNormal.sample(&mut rng);
            let (lo, up) = ((1.0 - r).sqrt() * lo, r.sqrt() * up);
            full.push(lo + up);
            upper.push(up);
        }
        let amp = (1.0f64 / 5.25).sqrt();
        for s in [
            0,
            RESUM_INTERVAL - 1,
            RESUM_INTERVAL,
            2 * RESUM_INTERVAL + 7,
        ] {
            let direct: f64 = full[s + 1..=s + k].iter().sum::<f64>() + upper[s];
            assert!((x[s] - amp * direct).abs() < 1e-12);
        }
    }

    #[test]
    fn psd_closed_form() {
        let s = scale();
        let tau = 80.0 / s.c();
        let p0 = analytic_psd(40.0, 0.0, &s);
        assert!((p0 / 9.733_392_280_145_674e-41 - 1.0).abs() < 1e-12);
        for k in 1..5 {
            assert!(analytic_psd(40.0, k as f64 / tau, &s) < 1e-30 * p0);
        }
    }

    #[test]
    fn drift_scale() {
        let s = scale();
        let v1 = drift_velocity_scale(1.0, &s);
        assert!((v1 / 6.401_373_694_439_225e-10 - 1.0).abs() < 1e-12);
        assert!((drift_velocity_scale(s.lambda(), &s) / s.c() - 1.0).abs() < 1e-15);
        assert!((drift_velocity_scale(100.0, &s) / (v1 / 10.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn series_csv() {
        let s = scale();
        let series = NoiseConfig::new(40.0, 25e6, 3e-6, 1).generate(&s).unwrap();
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("t_s,x_m"));
        assert_eq!(text.lines().count(), series.len() + 1);
    }
}
