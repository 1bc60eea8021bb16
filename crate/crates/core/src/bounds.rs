//! Size limits of a system of given mass-energy: the single-quantum (Compton)
//! line, the black-hole (Schwarzschild) line, where they meet, and which side
//! of them a `(mass, size)` pair falls on.

use std::fmt;
use std::io::{self, Write};

use crate::planck::PlanckScale;
use crate::{Error, Result};

/// Whether the quantum line uses ℏ (reduced) or h = 2πℏ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComptonConvention {
    #[default]
    Reduced,
    Full,
}

impl ComptonConvention {
    fn factor(self) -> f64 {
        match self {
            ComptonConvention::Reduced => 1.0,
            ComptonConvention::Full => 2.0 * std::f64::consts::PI,
        }
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if mass.is_finite() && mass > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMass(mass))
    }
}

/// `ℏ / (m c)`.
pub fn compton_size(mass: f64, scale: &PlanckScale) -> Result<f64> {
    compton_size_with(mass, scale, ComptonConvention::Reduced)
}

pub fn compton_size_with(
    mass: f64,
    scale: &PlanckScale,
    convention: ComptonConvention,
) -> Result<f64> {
    check_mass(mass)?;
    Ok(convention.factor() * scale.hbar() / (mass * scale.c()))
}

/// `2 G m / c²`.
pub fn schwarzschild_radius(mass: f64, scale: &PlanckScale) -> Result<f64> {
    check_mass(mass)?;
    Ok(2.0 * scale.g() * mass / (scale.c() * scale.c()))
}

/// Mass at which the two lines cross: `√(kℏc / 2G)`.
pub fn intersection_mass(scale: &PlanckScale, convention: ComptonConvention) -> f64 {
    (convention.factor() * scale.hbar() * scale.c() / (2.0 * scale.g())).sqrt()
}

/// Common length where the lines cross: `√(2kℏG / c³)`, i.e. `√2·l_P` for the
/// reduced convention.
pub fn intersection_scale(scale: &PlanckScale) -> f64 {
    intersection_scale_with(scale, ComptonConvention::Reduced)
}

pub fn intersection_scale_with(scale: &PlanckScale, convention: ComptonConvention) -> f64 {
    let c = scale.c();
    (2.0 * convention.factor() * scale.hbar() * scale.g() / (c * c * c)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Smaller than a single quantum of this energy.
    ForbiddenQuantum,
    /// Smaller than a black hole of this mass.
    ForbiddenBlackhole,
    /// Allowed, below the Planck mass: quantum fields on a classical background.
    FieldTheorySide,
    /// Allowed, at or above the Planck mass: classical matter on a quantum background.
    ClassicalMatterSide,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ForbiddenQuantum => "forbidden_quantum",
            Regime::ForbiddenBlackhole => "forbidden_blackhole",
            Regime::FieldTheorySide => "field_theory_side",
            Regime::ClassicalMatterSide => "classical_matter_side",
        }
    }

    pub fn is_forbidden(self) -> bool {
        matches!(self, Regime::ForbiddenQuantum | Regime::ForbiddenBlackhole)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClassification {
    pub regime: Regime,
    pub compton: f64,
    pub schwarzschild: f64,
}

pub fn classify(mass: f64, size: f64, scale: &PlanckScale) -> Result<RegimeClassification> {
    classify_with(mass, size, scale, ComptonConvention::Reduced)
}

pub fn classify_with(
    mass: f64,
    size: f64,
    scale: &PlanckScale,
    convention: ComptonConvention,
) -> Result<RegimeClassification> {
    if !(mass.is_finite() && mass > 0.0 && size.is_finite() && size > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mass {mass} kg and size {size} m must both be > 0"
        )));
    }
    let compton = compton_size_with(mass, scale, convention)?;
    let schwarzschild = schwarzschild_radius(mass, scale)?;
    let regime = if compton >= schwarzschild {
        if size < compton {
            Regime::ForbiddenQuantum
        } else if mass < scale.planck_mass() {
            Regime::FieldTheorySide
        } else {
            Regime::ClassicalMatterSide
        }
    } else if size < schwarzschild {
        Regime::ForbiddenBlackhole
    } else if mass < scale.planck_mass() {
        Regime::FieldTheorySide
    } else {
        Regime::ClassicalMatterSide
    };
    Ok(RegimeClassification {
        regime,
        compton,
        schwarzschild,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub mass: f64,
    pub compton: f64,
    pub schwarzschild: f64,
}

/// `points` masses spaced evenly in log between `mass_min` and `mass_max`
/// (inclusive), with both boundary sizes at each.
pub fn boundary_curves(
    mass_min: f64,
    mass_max: f64,
    points: usize,
    scale: &PlanckScale,
    convention: ComptonConvention,
) -> Result<Vec<BoundaryPoint>> {
    check_mass(mass_min)?;
    check_mass(mass_max)?;
    if points == 0 || (points > 1 && mass_max <= mass_min) || (points == 1 && mass_max != mass_min)
    {
        return Err(Error::InvalidInput(format!(
            "mass grid [{mass_min}, {mass_max}] with {points} points"
        )));
    }
    let (lo, hi) = (mass_min.ln(), mass_max.ln());
    (0..points)
        .map(|i| {
            let mass = if i == 0 {
                mass_min
            } else if i + 1 == points {
                mass_max
            } else {
                (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp()
            };
            Ok(BoundaryPoint {
                mass,
                compton: compton_size_with(mass, scale, convention)?,
                schwarzschild: schwarzschild_radius(mass, scale)?,
            })
        })
        .collect()
}

/// CSV with header `mass_kg,compton_m,schwarzschild_m`.
pub fn write_curves_csv<W: Write>(points: &[BoundaryPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "mass_kg,compton_m,schwarzschild_m")?;
    for p in points {
        writeln!(
            out,
            "{:.17e},{:.17e},{:.17e}",
            p.mass, p.compton, p.schwarzschild
        )?;
    }
    Ok(())
}
