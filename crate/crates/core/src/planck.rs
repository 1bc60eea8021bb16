//! Fundamental constants and the Planck-scale quantities derived from them.

use std::f64::consts::PI;

use crate::{Error, Result};

/// CODATA 2018 reduced Planck constant, J·s.
pub const CODATA_HBAR: f64 = 1.054_571_817e-34;
/// CODATA 2018 Newtonian constant of gravitation, m³ kg⁻¹ s⁻².
pub const CODATA_G: f64 = 6.674_30e-11;
/// Speed of light in vacuum, m/s (exact).
pub const CODATA_C: f64 = 299_792_458.0;

/// Constants plus the derived Planck length, time, mass and the position
/// algebra scale `lambda = planck_length / sqrt(4π)`.
///
/// Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanckScale {
    hbar: f64,
    g: f64,
    c: f64,
    planck_length: f64,
    planck_time: f64,
    planck_mass: f64,
    lambda: f64,
}

impl PlanckScale {
    /// Derive the scale from ℏ, G and c. All three must be positive and finite.
    pub fn derive(hbar: f64, g: f64, c: f64) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("G", g), ("c", c)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConstant { name, value });
            }
        }
        let planck_length = (hbar * g / (c * c * c)).sqrt();
        let planck_time = planck_length / c;
        let planck_mass = (hbar * c / g).sqrt();
        let lambda = planck_length / (4.0 * PI).sqrt();
        let scale = Self {
            hbar,
            g,
            c,
            planck_length,
            planck_time,
            planck_mass,
            lambda,
        };
        if [planck_length, planck_time, planck_mass, lambda]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::InvalidConstant {
                name: "derived planck quantity",
                value: planck_length,
            });
        }
        Ok(scale)
    }

    pub fn codata() -> Self {
        Self::derive(CODATA_HBAR, CODATA_G, CODATA_C).expect("CODATA constants are valid")
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `sqrt(ℏG/c³)`, m.
    pub fn planck_length(&self) -> f64 {
        self.planck_length
    }

    /// `planck_length / c`, s.
    pub fn planck_time(&self) -> f64 {
        self.planck_time
    }

    /// `sqrt(ℏc/G)`, kg.
    pub fn planck_mass(&self) -> f64 {
        self.planck_mass
    }

    /// Commutator scale of the position algebra and eigenvalue spacing of
    /// every position component, m.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Default for PlanckScale {
    fn default() -> Self {
        Self::codata()
    }
}

/// Free-function form of [`PlanckScale::derive`].
pub fn derive_planck_scale(hbar: f64, g: f64, c: f64) -> Result<PlanckScale> {
    PlanckScale::derive(hbar, g, c)
}

/// Scientific notation with `digits` significant figures, e.g. `1.616e-35`.
pub fn format_sig(value: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn rounded_constants_reproduce_planck_length() {
        let s = PlanckScale::derive(1.0546e-34, 6.674e-11, 2.998e8).unwrap();
        assert_eq!(format_sig(s.planck_length(), 4), "1.616e-35");
        assert_eq!(format_sig(s.lambda(), 4), "4.559e-36");
        // sqrt(hbar c / G) by mpmath for these inputs; the CODATA value below
        // rounds to 2.176e-8.
        assert!(rel(s.planck_mass(), 2.176_539_717_612_206e-8) < 1e-12);
    }

    #[test]
    fn codata_matches_printed_value() {
        let s = PlanckScale::codata();
        assert_eq!(format_sig(s.planck_length(), 4), "1.616e-35");
        // mpmath, 30 digits
        assert!(rel(s.planck_length(), 1.616_255_023_928_55e-35) < 1e-12);
        assert!(rel(s.lambda(), 4.559_371_244_286_09e-36) < 1e-12);
        assert!(rel(s.planck_mass(), 2.176_434_342_051_13e-8) < 1e-12);
        assert_eq!(format_sig(s.planck_mass(), 4), "2.176e-8");
    }

    #[test]
    fn invariants_hold() {
        let s = PlanckScale::codata();
        let direct = (s.hbar() * s.g() / s.c().powi(3)).sqrt();
        assert!(rel(s.planck_length(), direct) < 1e-12);
        assert_eq!(s.planck_time(), s.planck_length() / s.c());
        assert!(rel(s.lambda(), s.planck_length() / (4.0 * PI).sqrt()) < 1e-15);
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(matches!(
            PlanckScale::derive(0.0, 1.0, 1.0),
            Err(Error::InvalidConstant { name: "hbar", .. })
        ));
        assert!(PlanckScale::derive(1.0, -1.0, 1.0).is_err());
        assert!(PlanckScale::derive(1.0, 1.0, f64::NAN).is_err());
        assert!(PlanckScale::derive(f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn unit_constants() {
        let s = PlanckScale::derive(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.planck_length(), 1.0);
        assert_eq!(s.planck_time(), 1.0);
        assert_eq!(s.planck_mass(), 1.0);
    }

    proptest! {
        #[test]
        fn light_crossing_round_trip(h in 1e-40f64..1e-20, g in 1e-15f64..1e-5, c in 1e6f64..1e10) {
            let s = PlanckScale::derive(h, g, c).unwrap();
            prop_assert!((s.c() * s.planck_time() / s.planck_length() - 1.0).abs() < 1e-15);
        }

        #[test]
        fn length_scales_linearly_with_sqrt_hbar(k in 1e-3f64..1e3) {
            let base = PlanckScale::codata();
            let scaled = PlanckScale::derive(CODATA_HBAR * k * k, CODATA_G, CODATA_C).unwrap();
            prop_assert!(rel(scaled.planck_length(), k * base.planck_length()) < 1e-12);
        }
    }
}
