use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde_json::json;

use qgeom_core::algebra::{
    self, commutator_residual, highest_weight_state, radial_expectation, state_count_continuum,
    state_count_discrete, transverse_variance_formula, transverse_variance_operator,
    DEFAULT_DIMENSION_CAP,
};
use qgeom_core::bounds::{self, boundary_curves, classify_with, intersection_scale_with};
use qgeom_core::interferometer::{
    self, cross_spectrum, detectability, knee_frequency, linear_grid, overlap_factor,
    predict_output_psd, predict_rms,
};
use qgeom_core::noise::{self, drift_velocity_scale};
use qgeom_core::spectrum::welch;
use qgeom_core::{
    AlgebraRep, Axis, ComptonConvention, InterferometerConfig, NoiseConfig, PlanckScale, Spin,
};

use crate::manifest::Params;
use crate::report::Report;
use crate::{create_file, Convention, Outcome};

fn parse_vec3(text: &str) -> Result<[f64; 3], String> {
    interferometer::parse_position(text, 0).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    /// Spin j, a non-negative multiple of 1/2.
    #[arg(long)]
    pub spin: f64,

    /// Projection axis as three comma-separated numbers (normalized).
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
    pub axis: [f64; 3],

    /// Verify commutator, Hermiticity, Casimir and spectrum.
    #[arg(long)]
    pub check: bool,

    /// Write one component matrix as CSV (row,col,re,im).
    #[arg(long, value_name = "PATH")]
    pub dump: Option<PathBuf>,

    /// Component to dump (1, 2 or 3).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub component: u8,
}

pub fn algebra(args: &AlgebraArgs, scale: &PlanckScale) -> Result<Outcome> {
    let spin = Spin::from_f64(args.spin)?;
    let axis = Axis::normalized(args.axis)?;
    let lambda = scale.lambda();
    let j = spin.value();

    let mut params = Params::default();
    params
        .num("spin", args.spin)
        .vec3("axis", args.axis)
        .flag("check", args.check)
        .int("component", args.component);

    let radial = radial_expectation(spin, lambda);
    let mut fields = Report::fields()
        .text("spin", spin.to_string())
        .int("dim", spin.dim())
        .num("lambda_m", lambda)
        .num("radial_m", radial)
        .num("highest_weight_eigenvalue_m", j * lambda);
    if spin.is_integer() {
        let count = state_count_discrete(spin)?;
        match u64::try_from(count) {
            Ok(n) => fields.push("state_count_discrete", json!(n)),
            Err(_) => fields.push("state_count_discrete", json!(count as f64)),
        }
    }
    if j > 0.0 {
        fields = fields.num(
            "state_count_continuum",
            state_count_continuum(lambda * j, scale)?,
        );
    }

    let mut outputs = Vec::new();
    let fits = spin.dim() <= DEFAULT_DIMENSION_CAP as u64;
    if fits {
        let rep = AlgebraRep::build(spin, scale)?;
        let psi = highest_weight_state(&rep, &axis)?;
        let transverse = transverse_variance_operator(&rep, &psi, &axis)?;
        fields = fields.num("transverse_variance_operator_m2", transverse);
        if j > 0.0 {
            let formula = transverse_variance_formula(radial, scale)?;
            fields = fields
                .num("transverse_variance_formula_m2", formula)
                .num("operator_over_formula", transverse / formula);
        }
        if args.check {
            let spectrum = rep.projected_spectrum(&axis);
            let (lo, hi) = (spectrum[0], spectrum[spectrum.len() - 1]);
            let spacing_dev = spectrum
                .windows(2)
                .map(|w| ((w[1] - w[0]) / lambda - 1.0).abs())
                .fold(0.0, f64::max);
            fields = fields
                .num("commutator_residual", commutator_residual(&rep))
                .num("hermiticity_residual", rep.hermiticity_residual())
                .num("casimir_residual", rep.casimir_residual())
                .num("spectrum_min_m", lo)
                .num("spectrum_max_m", hi)
                .num("spectrum_min_over_lambda", lo / lambda)
                .num("spectrum_max_over_lambda", hi / lambda)
                .num("spectrum_spacing_max_deviation", spacing_dev);
        }
        if let Some(path) = &args.dump {
            let index = usize::from(args.component - 1);
            let mut out = create_file(path)?;
            algebra::write_matrix_csv(rep.component(index), &mut out)?;
            out.flush()?;
            params.path("dump", path);
            outputs.push(path.clone());
        }
    } else {
        if args.check || args.dump.is_some() {
            bail!(qgeom_core::Error::Capacity {
                spin: j,
                dim: spin.dim() as usize,
                cap: DEFAULT_DIMENSION_CAP,
            });
        }
        fields = fields.num(
            "transverse_variance_operator_m2",
            algebra::highest_weight_transverse_variance(spin, lambda),
        );
    }

    Ok(Outcome {
        report: fields.build(),
        params,
        seed: None,
        outputs,
    })
}

/// Options shared by commands that synthesize a series.
#[derive(Debug, Args)]
pub struct GeneratorArgs {
    /// Apparatus file (`label`, `arm_length_m`, `position_m`); flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Arm length L, m.
    #[arg(long)]
    pub arm_length: Option<f64>,

    /// Sample rate, Hz.
    #[arg(long)]
    pub rate: Option<f64>,

    /// Duration, s.
    #[arg(long)]
    pub duration: Option<f64>,

    /// RNG seed.
    #[arg(long, env = "QGEOM_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Coherence window, s (default: round trip 2L/c).
    #[arg(long)]
    pub window: Option<f64>,
}

fn load_apparatus(path: &Path) -> Result<InterferometerConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse::<InterferometerConfig>()
        .with_context(|| format!("in {}", path.display()))
}

impl GeneratorArgs {
    fn resolve(&self, params: &mut Params) -> Result<NoiseConfig> {
        let from_file = match &self.config {
            Some(path) => Some(load_apparatus(path)?.arm_length()),
            None => None,
        };
        let arm = self
            .arm_length
            .or(from_file)
            .ok_or_else(|| anyhow!("--arm-length (or --config) is required"))?;
        let rate = self.rate.ok_or_else(|| anyhow!("--rate is required"))?;
        let duration = self
            .duration
            .ok_or_else(|| anyhow!("--duration is required"))?;
        params
            .num("arm-length", arm)
            .num("rate", rate)
            .num("duration", duration)
            .int("seed", self.seed);
        let mut cfg = NoiseConfig::new(arm, rate, duration, self.seed);
        if let Some(w) = self.window {
            params.num("window", w);
            cfg = cfg.with_window(w);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,

    /// Series CSV (t_s,x_m).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Autocorrelation CSV (lag_s,acf_m2).
    #[arg(long, value_name = "PATH")]
    pub acf_out: Option<PathBuf>,

    /// Largest autocorrelation lag, s (default 1.5 coherence windows).
    #[arg(long)]
    pub max_lag: Option<f64>,
}

pub fn noise(args: &NoiseArgs, scale: &PlanckScale) -> Result<Outcome> {
    let mut params = Params::default();
    let cfg = args.generator.resolve(&mut params)?;
    let series = cfg.generate(scale)?;
    let predicted = (scale.lambda() * cfg.arm_length).sqrt();
    let mut outputs = Vec::new();

    if let Some(path) = &args.out {
        let mut out = create_file(path)?;
        series.write_csv(&mut out)?;
        out.flush()?;
        params.path("out", path);
        outputs.push(path.clone());
    }
    let mut fields = Report::fields()
        .num("arm_length_m", cfg.arm_length)
        .num("sample_rate_hz", cfg.sample_rate)
        .int("samples", series.len() as u64)
        .int("seed", cfg.seed)
        .num("coherence_time_s", series.coherence_time())
        .num("variance_m2", series.variance())
        .num("rms_m", series.rms())
        .num("predicted_rms_m", predicted)
        .num("rms_ratio", series.rms() / predicted)
        .num(
            "drift_velocity_m_per_s",
            drift_velocity_scale(cfg.arm_length, scale),
        );

    if let Some(path) = &args.acf_out {
        let max_lag = args.max_lag.unwrap_or(1.5 * series.coherence_time());
        let acf = noise::autocorrelation(&series, max_lag)?;
        let mut out = create_file(path)?;
        acf.write_csv(&mut out)?;
        out.flush()?;
        params.num("max-lag", max_lag).path("acf-out", path);
        outputs.push(path.clone());
        let c0 = acf.values()[0];
        let one_way = series.coherence_time() / 2.0;
        if let Some(v) = acf.value_at(one_way) {
            fields = fields.num("acf_half_window_over_c0", v / c0);
        }
    }

    Ok(Outcome {
        report: fields.build(),
        params,
        seed: Some(cfg.seed),
        outputs,
    })
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Series CSV (t_s,x_m) to analyse instead of generating one.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["config", "arm_length", "duration", "window"])]
    pub input: Option<PathBuf>,

    #[command(flatten)]
    pub generator: GeneratorArgs,

    /// FFT segment length (power of two).
    #[arg(long, default_value_t = 4096)]
    pub segment_length: usize,

    /// Fractional segment overlap in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub overlap: f64,

    /// Spectrum CSV (f_hz,psd_m2_per_hz); printed to stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Reads `t_s,x_m`; the sample rate is inferred from the time column unless given.
fn read_series(path: &Path, rate: Option<f64>) -> Result<(Vec<f64>, f64)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("t_s,x_m") => {}
        other => bail!(
            "{}: expected header `t_s,x_m`, got {other:?}",
            path.display()
        ),
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let (t, x) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("{}: line {}: expected two columns", path.display(), i + 2))?;
        times.push(t.trim().parse::<f64>()?);
        values.push(x.trim().parse::<f64>()?);
    }
    if values.len() < 2 {
        bail!("{}: need at least two samples", path.display());
    }
    let rate = match rate {
        Some(r) => r,
        None => (times.len() - 1) as f64 / (times[times.len() - 1] - times[0]),
    };
    Ok((values, rate))
}

pub fn spectrum(args: &SpectrumArgs, scale: &PlanckScale) -> Result<Outcome> {
    let mut params = Params::default();
    let (samples, rate, seed) = match &args.input {
        Some(path) => {
            params.path("input", path);
            if let Some(r) = args.generator.rate {
                params.num("rate", r);
            }
            let (samples, rate) = read_series(path, args.generator.rate)?;
            (samples, rate, None)
        }
        None => {
            let cfg = args.generator.resolve(&mut params)?;
            let series = cfg.generate(scale)?;
            (series.samples().to_vec(), cfg.sample_rate, Some(cfg.seed))
        }
    };
    params
        .int("segment-length", args.segment_length)
        .num("overlap", args.overlap);
    let est = welch(&samples, rate, args.segment_length, args.overlap)?;

    let mut outputs = Vec::new();
    let report = match &args.out {
        Some(path) => {
            let mut out = create_file(path)?;
            est.write_csv(&mut out)?;
            out.flush()?;
            params.path("out", path);
            outputs.push(path.clone());
            let variance = qgeom_core::spectrum::sample_variance(&samples);
            Report::fields()
                .num("sample_rate_hz", rate)
                .int("samples", samples.len() as u64)
                .int("segment_count", est.segment_count() as u64)
                .int("segment_length", est.segment_length() as u64)
                .num("variance_m2", variance)
                .num("psd_sum_over_variance", est.bin_sum() / variance)
                .build()
        }
        None => Report::Table {
            columns: vec!["f_hz", "psd_m2_per_hz"],
            rows: est.iter().map(|(f, p)| vec![f, p]).collect(),
        },
    };
    Ok(Outcome {
        report,
        params,
        seed,
        outputs,
    })
}

#[derive(Debug, Args)]
pub struct InterferometerArgs {
    /// Apparatus file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub label: Option<String>,

    /// Arm length, m.
    #[arg(long)]
    pub arm_length: Option<f64>,

    /// Apparatus position, m, as x,y,z.
    #[arg(long, value_parser = parse_vec3)]
    pub position: Option<[f64; 3]>,

    /// Second apparatus file; enables the cross spectrum.
    #[arg(long, value_name = "PATH")]
    pub partner_config: Option<PathBuf>,

    #[arg(long)]
    pub partner_label: Option<String>,

    #[arg(long)]
    pub partner_arm_length: Option<f64>,

    #[arg(long, value_parser = parse_vec3)]
    pub partner_position: Option<[f64; 3]>,

    /// Lowest grid frequency, Hz.
    #[arg(long, default_value_t = 0.0)]
    pub f_min: f64,

    /// Highest grid frequency, Hz (default four times the knee).
    #[arg(long)]
    pub f_max: Option<f64>,

    /// Number of grid intervals.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,

    /// Instrument noise floor, m²/Hz; enables the detectability report.
    #[arg(long)]
    pub floor: Option<f64>,

    #[arg(long, default_value_t = 1e6)]
    pub band_lo: f64,

    #[arg(long, default_value_t = 5e6)]
    pub band_hi: f64,

    /// Integration time, s.
    #[arg(long, default_value_t = 3600.0)]
    pub integration_time: f64,

    /// Spectrum CSV (f_hz,psd_m2_per_hz): the cross spectrum when a partner is given.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn resolve_apparatus(
    config: Option<&Path>,
    label: Option<&str>,
    arm_length: Option<f64>,
    position: Option<[f64; 3]>,
    default_label: &str,
) -> Result<InterferometerConfig> {
    let base = config.map(load_apparatus).transpose()?;
    let arm = arm_length
        .or(base.as_ref().map(|b| b.arm_length()))
        .ok_or_else(|| anyhow!("arm length missing for `{default_label}`"))?;
    let pos = position
        .or(base.as_ref().map(|b| b.position()))
        .unwrap_or([0.0; 3]);
    let name = label
        .map(str::to_string)
        .or(base.as_ref().map(|b| b.label().to_string()))
        .filter(|l| !l.is_empty())
        .unwrap_or_else(|| default_label.to_string());
    Ok(InterferometerConfig::new(name, arm, pos)?)
}

pub fn interferometer(args: &InterferometerArgs, scale: &PlanckScale) -> Result<Outcome> {
    let a = resolve_apparatus(
        args.config.as_deref(),
        args.label.as_deref(),
        args.arm_length,
        args.position,
        "a",
    )?;
    let has_partner = args.partner_config.is_some()
        || args.partner_arm_length.is_some()
        || args.partner_position.is_some();
    let b = if has_partner {
        Some(resolve_apparatus(
            args.partner_config.as_deref(),
            args.partner_label.as_deref(),
            args.partner_arm_length.or(Some(a.arm_length())),
            args.partner_position,
            "b",
        )?)
    } else {
        None
    };

    let mut params = Params::default();
    params
        .text("label", a.label())
        .num("arm-length", a.arm_length())
        .vec3("position", a.position())
        .num("f-min", args.f_min)
        .int("points", args.points);
    if let Some(b) = &b {
        params
            .text("partner-label", b.label())
            .num("partner-arm-length", b.arm_length())
            .vec3("partner-position", b.position());
    }

    let knee = knee_frequency(a.arm_length(), scale);
    let f_max = args.f_max.unwrap_or(4.0 * knee);
    params.num("f-max", f_max);
    if args.points < 1 || f_max <= args.f_min {
        bail!(qgeom_core::Error::InvalidGrid(format!(
            "[{}, {f_max}] Hz with {} intervals",
            args.f_min, args.points
        )));
    }
    let grid = linear_grid(args.f_min, f_max, args.points);

    let mut fields = Report::fields()
        .text("label", a.label())
        .num("arm_length_m", a.arm_length())
        .num("rms_m", predict_rms(&a, scale))
        .num("knee_hz", knee)
        .num(
            "psd_peak_m2_per_hz",
            noise::analytic_psd(a.arm_length(), 0.0, scale),
        );

    let spectrum = match &b {
        Some(b) => {
            let d = a.distance_to(b);
            fields = fields
                .text("partner_label", b.label())
                .num("separation_m", d)
                .num(
                    "overlap_factor",
                    overlap_factor(d, a.arm_length(), b.arm_length()),
                );
            cross_spectrum(&a, b, &grid, scale)?
        }
        None => predict_output_psd(&a, &grid, scale)?,
    };
    fields = fields.num("grid_integral_m2", spectrum.integrate());

    if let Some(floor) = args.floor {
        let band = (args.band_lo, args.band_hi);
        let r = detectability(&a, floor, band, args.integration_time, scale)?;
        params
            .num("floor", floor)
            .num("band-lo", args.band_lo)
            .num("band-hi", args.band_hi)
            .num("integration-time", args.integration_time);
        fields = fields
            .num("band_lo_hz", band.0)
            .num("band_hi_hz", band.1)
            .num("instrument_floor_m2_per_hz", r.instrument_floor)
            .num("signal_rms_in_band_m", r.signal_rms)
            .num("snr_proxy", r.snr_proxy)
            .text("verdict", r.verdict.as_str());
    }

    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        let mut out = create_file(path)?;
        spectrum.write_csv(&mut out)?;
        out.flush()?;
        params.path("out", path);
        outputs.push(path.clone());
    }
    Ok(Outcome {
        report: fields.build(),
        params,
        seed: None,
        outputs,
    })
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Single mass, kg.
    #[arg(long)]
    pub mass: Option<f64>,

    /// System size, m; classifies (mass, size).
    #[arg(long, requires = "mass")]
    pub size: Option<f64>,

    #[arg(long, default_value_t = 1e-40)]
    pub mass_min: f64,

    #[arg(long, default_value_t = 1e40)]
    pub mass_max: f64,

    /// Points in the log-spaced mass grid.
    #[arg(long, default_value_t = 161)]
    pub points: usize,

    /// Quantum line from ħ (reduced) or h (full).
    #[arg(long, value_enum, default_value_t = Convention::Reduced)]
    pub convention: Convention,

    /// Curve CSV (mass_kg,compton_m,schwarzschild_m).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn bounds(args: &BoundsArgs, scale: &PlanckScale) -> Result<Outcome> {
    let convention = match args.convention {
        Convention::Reduced => ComptonConvention::Reduced,
        Convention::Full => ComptonConvention::Full,
    };
    let mut params = Params::default();
    params.text(
        "convention",
        match args.convention {
            Convention::Reduced => "reduced",
            Convention::Full => "full",
        },
    );
    let curves = match args.mass {
        Some(m) => {
            params.num("mass", m);
            boundary_curves(m, m, 1, scale, convention)?
        }
        None => {
            params
                .num("mass-min", args.mass_min)
                .num("mass-max", args.mass_max)
                .int("points", args.points);
            boundary_curves(args.mass_min, args.mass_max, args.points, scale, convention)?
        }
    };
    let rows: Vec<Vec<f64>> = curves
        .iter()
        .map(|p| vec![p.mass, p.compton, p.schwarzschild])
        .collect();

    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        let mut out = create_file(path)?;
        bounds::write_curves_csv(&curves, &mut out)?;
        out.flush()?;
        params.path("out", path);
        outputs.push(path.clone());
    }

    let intersection = intersection_scale_with(scale, convention);
    let report = if let (Some(mass), Some(size)) = (args.mass, args.size) {
        params.num("size", size);
        let c = classify_with(mass, size, scale, convention)?;
        Report::fields()
            .num("mass_kg", mass)
            .num("size_m", size)
            .num("compton_m", c.compton)
            .num("schwarzschild_m", c.schwarzschild)
            .text("regime", c.regime.as_str())
            .num("intersection_m", intersection)
            .num(
                "intersection_over_planck_length",
                intersection / scale.planck_length(),
            )
            .build()
    } else if outputs.is_empty() {
        Report::Table {
            columns: vec!["mass_kg", "compton_m", "schwarzschild_m"],
            rows,
        }
    } else {
        Report::fields()
            .int("points", curves.len() as u64)
            .num("intersection_m", intersection)
            .num(
                "intersection_over_planck_length",
                intersection / scale.planck_length(),
            )
            .num("planck_mass_kg", scale.planck_mass())
            .build()
    };
    Ok(Outcome {
        report,
        params,
        seed: None,
        outputs,
    })
}
