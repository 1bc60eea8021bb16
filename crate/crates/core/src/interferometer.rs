//! Interferometer observables of the transverse jitter: RMS displacement,
//! output and cross spectra, and a radiometer-style detectability estimate.
//!
//! The optical response is taken as unity: the output displacement is the
//! geometric jitter itself.

use std::fmt;
use std::str::FromStr;

use crate::noise::analytic_psd;
use crate::planck::PlanckScale;
use crate::spectrum::{check_grid, SpectrumEstimate};
use crate::{Error, Result};

/// `snr_proxy` at or above this is a detection.
pub const DETECT_THRESHOLD: f64 = 5.0;
/// `snr_proxy` at or above this (and below detect) is marginal.
pub const MARGINAL_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerConfig {
    label: String,
    arm_length: f64,
    position: [f64; 3],
}

impl InterferometerConfig {
    pub fn new(label: impl Into<String>, arm_length: f64, position: [f64; 3]) -> Result<Self> {
        if !(arm_length.is_finite() && arm_length > 0.0) {
            return Err(Error::InvalidSeparation(arm_length));
        }
        if position.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("position {position:?}")));
        }
        Ok(InterferometerConfig {
            label: label.into(),
            arm_length,
            position,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arm_length(&self) -> f64 {
        self.arm_length
    }

    pub fn position(&self) -> [f64; 3] {
        self.position
    }

    pub fn with_arm_length(&self, arm_length: f64) -> Result<Self> {
        Self::new(self.label.clone(), arm_length, self.position)
    }

    pub fn with_position(&self, position: [f64; 3]) -> Result<Self> {
        Self::new(self.label.clone(), self.arm_length, position)
    }

    pub fn distance_to(&self, other: &InterferometerConfig) -> f64 {
        let (a, b) = (self.position, other.position);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

/// Parses the apparatus file format: one `key = value` per line, `#` starts a
/// comment. Keys are `label`, `arm_length_m` (required) and `position_m`
/// (three comma-separated numbers, default origin).
impl FromStr for InterferometerConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut label = String::new();
        let mut arm_length = None;
        let mut position = [0.0; 3];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let value = value.trim();
            match key.trim() {
                "label" => label = value.trim_matches('"').to_string(),
                "arm_length_m" => arm_length = Some(parse_number(value, lineno)?),
                "position_m" => position = parse_position(value, lineno)?,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        let arm_length =
            arm_length.ok_or_else(|| Error::Config("missing key `arm_length_m`".into()))?;
        InterferometerConfig::new(label, arm_length, position)
    }
}

fn parse_number(value: &str, lineno: usize) -> Result<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("line {}: bad number `{value}`", lineno + 1)))
}

/// Three comma-separated numbers.
pub fn parse_position(value: &str, lineno: usize) -> Result<[f64; 3]> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "line {}: position_m needs three comma-separated numbers",
            lineno + 1
        )));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_number(p, lineno)?;
    }
    Ok(out)
}

impl fmt::Display for InterferometerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.position;
        writeln!(f, "label = {}", self.label)?;
        writeln!(f, "arm_length_m = {:.17e}", self.arm_length)?;
        writeln!(f, "position_m = {:.17e},{:.17e},{:.17e}", p[0], p[1], p[2])
    }
}

/// `√(λ·L)`.
pub fn predict_rms(config: &InterferometerConfig, scale: &PlanckScale) -> f64 {
    (scale.lambda() * config.arm_length()).sqrt()
}

/// Characteristic frequency `c / 2L` of the output spectrum.
pub fn knee_frequency(arm_length: f64, scale: &PlanckScale) -> f64 {
    scale.c() / (2.0 * arm_length)
}

/// Model output PSD on a non-negative, strictly increasing grid.
pub fn predict_output_psd(
    config: &InterferometerConfig,
    frequencies: &[f64],
    scale: &PlanckScale,
) -> Result<SpectrumEstimate> {
    check_grid(frequencies)?;
    let psd = frequencies
        .iter()
        .map(|&f| analytic_psd(config.arm_length(), f, scale))
        .collect();
    SpectrumEstimate::new(frequencies.to_vec(), psd, 0, 0)
}

/// Causal overlap `max(0, 1 − d / (2·min(L_a, L_b)))`.
pub fn overlap_factor(distance: f64, arm_a: f64, arm_b: f64) -> f64 {
    (1.0 - distance / (2.0 * arm_a.min(arm_b))).clamp(0.0, 1.0)
}

/// Cross spectrum `γ(d)·√(PSD_a·PSD_b)` of two instruments.
///
/// Co-located instruments share the same motion; the overlap decays linearly
/// and vanishes at twice the shorter arm.
pub fn cross_spectrum(
    a: &InterferometerConfig,
    b: &InterferometerConfig,
    frequencies: &[f64],
    scale: &PlanckScale,
) -> Result<SpectrumEstimate> {
    check_grid(frequencies)?;
    let gamma = overlap_factor(a.distance_to(b), a.arm_length(), b.arm_length());
    let psd = frequencies
        .iter()
        .map(|&f| {
            let pa = analytic_psd(a.arm_length(), f, scale);
            let pb = analytic_psd(b.arm_length(), f, scale);
            gamma * (pa * pb).sqrt()
        })
        .collect();
    SpectrumEstimate::new(frequencies.to_vec(), psd, 0, 0)
}

/// `n + 1` evenly spaced points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let step = (hi - lo) / n as f64;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + step * i as f64 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Exclude,
    Marginal,
    Detect,
}

impl Verdict {
    pub fn from_snr(snr: f64) -> Self {
        if snr >= DETECT_THRESHOLD {
            Verdict::Detect
        } else if snr >= MARGINAL_THRESHOLD {
            Verdict::Marginal
        } else {
            Verdict::Exclude
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Detect => "detect",
            Verdict::Marginal => "marginal",
            Verdict::Exclude => "exclude",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectabilityReport {
    /// RMS of the model signal inside the band, m.
    pub signal_rms: f64,
    pub band: (f64, f64),
    pub instrument_floor: f64,
    pub snr_proxy: f64,
    pub verdict: Verdict,
}

/// Composite Simpson integral of the model PSD over `[lo, hi]`, with at least
/// 1024 panels per sinc lobe.
pub fn band_power(arm_length: f64, lo: f64, hi: f64, scale: &PlanckScale) -> f64 {
    let tau = 2.0 * arm_length / scale.c();
    let lobes = ((hi - lo) * tau).ceil().max(1.0) as usize;
    let panels = (lobes * 1024).max(8192);
    let panels = panels + panels % 2;
    let h = (hi - lo) / panels as f64;
    let f = |i: usize| analytic_psd(arm_length, lo + h * i as f64, scale);
    let mut sum = f(0) + f(panels);
    for i in 1..panels {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    sum * h / 3.0
}

/// `snr = [∫_band PSD df / (floor·Δf)]·√(T·Δf)` with thresholds detect ≥ 5,
/// marginal ≥ 1, otherwise exclude.
pub fn detectability(
    config: &InterferometerConfig,
    floor: f64,
    band: (f64, f64),
    integration_time: f64,
    scale: &PlanckScale,
) -> Result<DetectabilityReport> {
    let (lo, hi) = band;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidBand { lo, hi });
    }
    if !(floor.is_finite() && floor > 0.0) {
        return Err(Error::InvalidInput(format!(
            "noise floor {floor} m²/Hz must be > 0"
        )));
    }
    if !(integration_time.is_finite() && integration_time > 0.0) {
        return Err(Error::InvalidInput(format!(
            "integration time {integration_time} s must be > 0"
        )));
    }
    let width = hi - lo;
    let power = band_power(config.arm_length(), lo, hi, scale);
    let snr_proxy = power / (floor * width) * (integration_time * width).sqrt();
    Ok(DetectabilityReport {
        signal_rms: power.sqrt(),
        band,
        instrument_floor: floor,
        snr_proxy,
        verdict: Verdict::from_snr(snr_proxy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::transverse_variance_formula;
    use proptest::prelude::*;

    fn scale() -> PlanckScale {
        PlanckScale::codata()
    }

    fn arm(l: f64) -> InterferometerConfig {
        InterferometerConfig::new("test", l, [0.0; 3]).unwrap()
    }

    #[test]
    fn rms_values() {
        let s = scale();
        assert!((predict_rms(&arm(1.0), &s) / 2.135_268_424_410_872e-18 - 1.0).abs() < 1e-12);
        assert!((predict_rms(&arm(40.0), &s) / 1.350_462_327_395_487e-17 - 1.0).abs() < 1e-12);
        assert!(predict_rms(&arm(1e-300), &s) < 1e-160);
        for l in [0.5, 3.0, 40.0] {
            let rms = predict_rms(&arm(l), &s);
            assert!((rms * rms / transverse_variance_formula(l, &s).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn knee_for_40m() {
        let k = knee_frequency(40.0, &scale());
        assert!((k - 3_747_405.725).abs() < 1e-3);
        assert_eq!(crate::planck::format_sig(k, 3), "3.75e6");
    }

    #[test]
    fn output_psd_zeros_and_parseval() {
        let s = scale();
        let cfg = arm(40.0);
        let tau = 80.0 / s.c();
        let zeros: Vec<f64> = (1..4).map(|k| k as f64 / tau).collect();
        let est = predict_output_psd(&cfg, &zeros, &s).unwrap();
        let peak = predict_output_psd(&cfg, &[0.0], &s).unwrap().psd()[0];
        assert!(est.psd().iter().all(|p| *p < 1e-30 * peak));

        let grid = linear_grid(0.0, 400.0 / tau, 400_000);
        let total = predict_output_psd(&cfg, &grid, &s).unwrap().integrate();
        let want = s.lambda() * 40.0;
        assert!((total / want - 1.0).abs() < 0.02, "{}", total / want);
    }

    #[test]
    fn unsorted_grid_rejected() {
        let s = scale();
        assert!(matches!(
            predict_output_psd(&arm(1.0), &[2.0, 1.0], &s),
            Err(Error::InvalidGrid(_))
        ));
        assert!(cross_spectrum(&arm(1.0), &arm(1.0), &[-1.0], &s).is_err());
    }

    #[test]
    fn cross_spectrum_limits() {
        let s = scale();
        let a = arm(40.0);
        let grid = linear_grid(0.0, 2e7, 200);
        let auto = predict_output_psd(&a, &grid, &s).unwrap();
        let same = cross_spectrum(&a, &a, &grid, &s).unwrap();
        assert_eq!(auto.psd(), same.psd());

        let far = a.with_position([80.0, 0.0, 0.0]).unwrap();
        assert!(cross_spectrum(&a, &far, &grid, &s)
            .unwrap()
            .psd()
            .iter()
            .all(|p| *p == 0.0));

        let half = a.with_position([0.0, 40.0, 0.0]).unwrap();
        let x = cross_spectrum(&a, &half, &grid, &s).unwrap();
        for (h, full) in x.psd().iter().zip(same.psd()) {
            assert!((h - 0.5 * full).abs() <= 1e-15 * full);
        }
    }

    #[test]
    fn detectability_limits() {
        let s = scale();
        let a = arm(40.0);
        let r = detectability(&a, f64::MIN_POSITIVE, (1e6, 5e6), 1.0, &s).unwrap();
        assert_eq!(r.verdict, Verdict::Detect);
        let r = detectability(&a, 1e-20, (1e6, 5e6), 1e-3, &s).unwrap();
        assert!(r.snr_proxy < 1.0);
        assert_eq!(r.verdict, Verdict::Exclude);
        assert!(matches!(
            detectability(&a, 1.0, (5e6, 5e6), 1.0, &s),
            Err(Error::InvalidBand { .. })
        ));
        assert!(detectability(&a, 0.0, (1e6, 5e6), 1.0, &s).is_err());
        assert!(detectability(&a, 1.0, (1e6, 5e6), 0.0, &s).is_err());
    }

    #[test]
    fn detectability_pinned() {
        // mpmath quad of the one-sided model PSD over 1-5 MHz, floor = PSD(0).
        let s = scale();
        let a = arm(40.0);
        let floor = analytic_psd(40.0, 0.0, &s);
        let r = detectability(&a, floor, (1e6, 5e6), 3600.0, &s).unwrap();
        assert!(
            (r.snr_proxy / 23_695.379_335_900_37 - 1.0).abs() < 1e-10,
            "{}",
            r.snr_proxy
        );
        assert_eq!(r.verdict, Verdict::Detect);
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(Verdict::from_snr(5.0), Verdict::Detect);
        assert_eq!(Verdict::from_snr(4.999), Verdict::Marginal);
        assert_eq!(Verdict::from_snr(1.0), Verdict::Marginal);
        assert_eq!(Verdict::from_snr(0.999), Verdict::Exclude);
    }

    #[test]
    fn config_file_round_trip() {
        let text = "# holometer-like\nlabel = north\narm_length_m = 40\nposition_m = 1, 2.5, -3\n";
        let cfg: InterferometerConfig = text.parse().unwrap();
        assert_eq!(cfg.label(), "north");
        assert_eq!(cfg.arm_length(), 40.0);
        assert_eq!(cfg.position(), [1.0, 2.5, -3.0]);
        let again: InterferometerConfig = cfg.to_string().parse().unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn config_file_errors() {
        assert!(matches!(
            "label = x".parse::<InterferometerConfig>(),
            Err(Error::Config(_))
        ));
        assert!("arm_length_m = 1\nspeed = 3"
            .parse::<InterferometerConfig>()
            .is_err());
        assert!("arm_length_m = 1\nposition_m = 1,2"
            .parse::<InterferometerConfig>()
            .is_err());
        assert!("arm_length_m = -1".parse::<InterferometerConfig>().is_err());
        assert!("arm_length_m 1".parse::<InterferometerConfig>().is_err());
    }

    proptest! {
        #[test]
        fn cross_spectrum_symmetric(la in 1.0f64..100.0, lb in 1.0f64..100.0, d in 0.0f64..300.0, f in 0.0f64..5e7) {
            let s = scale();
            let a = arm(la);
            let b = InterferometerConfig::new("b", lb, [d, 0.0, 0.0]).unwrap();
            let ab = cross_spectrum(&a, &b, &[f], &s).unwrap().psd()[0];
            let ba = cross_spectrum(&b, &a, &[f], &s).unwrap().psd()[0];
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn overlap_monotone(d1 in 0.0f64..500.0, dd in 0.0f64..500.0, la in 0.1f64..100.0, lb in 0.1f64..100.0) {
            let g1 = overlap_factor(d1, la, lb);
            let g2 = overlap_factor(d1 + dd, la, lb);
            prop_assert!((0.0..=1.0).contains(&g1));
            prop_assert!(g2 <= g1);
        }

        #[test]
        fn lower_floor_never_worsens_verdict(floor in 1e-45f64..1e-35, shrink in 1.0f64..1e6, t in 1e-6f64..1e4) {
            let s = scale();
            let a = arm(40.0);
            let hi = detectability(&a, floor, (1e6, 5e6), t, &s).unwrap();
            let lo = detectability(&a, floor / shrink, (1e6, 5e6), t, &s).unwrap();
            prop_assert!(lo.verdict >= hi.verdict);
        }
    }
}
