//! Finite-dimensional irreducible representations of the position algebra
//! `[x_i, x_j] = i λ ε_ijk x_k`, and the geometric observables derived from
//! them: radial separation, directional eigenstates, transverse variance and
//! state counting.
//!
//! The algebra is that of angular momentum with λ in place of ℏ, so each
//! representation is `x_i = λ J_i` with `J_i` the spin-`j` matrices built from
//! ladder operators in the `J_3` eigenbasis. Basis index `a` holds `m = j - a`,
//! so `x_3` is diagonal with entries `+jλ, (j-1)λ, …, -jλ`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::planck::PlanckScale;
use crate::{Error, Result};

/// Largest matrix dimension built by default (`j <= 2000`).
pub const DEFAULT_DIMENSION_CAP: usize = 4001;

const DEGENERACY_TOL: f64 = 1e-10;
const AXIS_TOL: f64 = 1e-12;

/// A non-negative half-integer, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin {
    twice: u64,
}

impl Spin {
    pub const ZERO: Spin = Spin { twice: 0 };
    pub const HALF: Spin = Spin { twice: 1 };
    pub const ONE: Spin = Spin { twice: 2 };

    pub const fn from_twice(twice: u64) -> Self {
        Spin { twice }
    }

    pub const fn integer(j: u64) -> Self {
        Spin { twice: 2 * j }
    }

    /// Accepts any finite, non-negative multiple of 1/2.
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j < 0.0 || twice.fract() != 0.0 || twice > u64::MAX as f64 / 4.0 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Spin {
            twice: twice as u64,
        })
    }

    pub fn twice(self) -> u64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice.is_multiple_of(2)
    }

    /// `2j + 1`.
    pub fn dim(self) -> u64 {
        self.twice + 1
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Unit 3-vector selecting a direction in position space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis([f64; 3]);

impl Axis {
    pub const X: Axis = Axis([1.0, 0.0, 0.0]);
    pub const Y: Axis = Axis([0.0, 1.0, 0.0]);
    pub const Z: Axis = Axis([0.0, 0.0, 1.0]);

    /// Rejects vectors whose norm differs from 1 by more than 1e-12.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(v);
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOL {
            return Err(Error::InvalidAxis(norm));
        }
        Ok(Axis(v))
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(v);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidAxis(norm));
        }
        Ok(Axis([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// Two unit vectors that complete `self` to an orthonormal frame.
    pub fn perpendicular_pair(&self) -> ([f64; 3], [f64; 3]) {
        let n = self.0;
        // Cross with the coordinate axis least aligned with n.
        let pick = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
            [1.0, 0.0, 0.0]
        } else if n[1].abs() <= n[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let u = cross(n, pick);
        let un = norm3(u);
        let u = [u[0] / un, u[1] / un, u[2] / un];
        let v = cross(n, u);
        (u, v)
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Dense representation of the three position operators at one spin.
#[derive(Debug, Clone)]
pub struct AlgebraRep {
    spin: Spin,
    lambda: f64,
    x: [DMatrix<Complex64>; 3],
}

impl AlgebraRep {
    /// Build `x_i = λ J_i` with the default dimension cap.
    pub fn build(spin: Spin, scale: &PlanckScale) -> Result<Self> {
        Self::build_with_cap(spin, scale, DEFAULT_DIMENSION_CAP)
    }

    pub fn build_with_cap(spin: Spin, scale: &PlanckScale, cap: usize) -> Result<Self> {
        let dim = spin.dim();
        if dim > cap as u64 {
            return Err(Error::Capacity {
                spin: spin.value(),
                dim: usize::try_from(dim).unwrap_or(usize::MAX),
                cap,
            });
        }
        let n = dim as usize;
        let lambda = scale.lambda();
        let j = spin.value();
        let m = |a: usize| j - a as f64;

        let mut x1 = DMatrix::zeros(n, n);
        let mut x2 = DMatrix::zeros(n, n);
        let mut x3 = DMatrix::zeros(n, n);
        for a in 0..n {
            x3[(a, a)] = Complex64::new(lambda * m(a), 0.0);
        }
        // <m+1| J+ |m> sits at (a-1, a) because m decreases with a.
        for a in 1..n {
            let mm = m(a);
            let raised = (spin.casimir() - mm * (mm + 1.0)).max(0.0).sqrt();
            let half = 0.5 * lambda * raised;
            // J1 = (J+ + J-)/2, J2 = (J+ - J-)/(2i)
            x1[(a - 1, a)] = Complex64::new(half, 0.0);
            x1[(a, a - 1)] = Complex64::new(half, 0.0);
            x2[(a - 1, a)] = Complex64::new(0.0, -half);
            x2[(a, a - 1)] = Complex64::new(0.0, half);
        }
        Ok(AlgebraRep {
            spin,
            lambda,
            x: [x1, x2, x3],
        })
    }

    /// Assemble a representation from arbitrary component matrices without
    /// checking the algebra. Used to exercise the residual diagnostics.
    pub fn from_parts(spin: Spin, lambda: f64, x: [DMatrix<Complex64>; 3]) -> Result<Self> {
        let n = spin.dim() as usize;
        for xi in &x {
            if xi.nrows() != n || xi.ncols() != n {
                return Err(Error::Shape {
                    expected: n,
                    got: xi.nrows().max(xi.ncols()),
                });
            }
        }
        Ok(AlgebraRep { spin, lambda, x })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.x[0].nrows()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Component `i` in 0..3.
    pub fn component(&self, i: usize) -> &DMatrix<Complex64> {
        &self.x[i]
    }

    pub fn components(&self) -> &[DMatrix<Complex64>; 3] {
        &self.x
    }

    pub fn into_components(self) -> [DMatrix<Complex64>; 3] {
        self.x
    }

    /// `n · x` for a unit axis `n`.
    pub fn projected(&self, axis: &Axis) -> DMatrix<Complex64> {
        let n = axis.components();
        &self.x[0] * Complex64::from(n[0])
            + &self.x[1] * Complex64::from(n[1])
            + &self.x[2] * Complex64::from(n[2])
    }

    /// `x1² + x2² + x3²`.
    pub fn casimir_operator(&self) -> DMatrix<Complex64> {
        let mut sum = DMatrix::zeros(self.dim(), self.dim());
        for xi in &self.x {
            sum += sparse_product(xi, xi);
        }
        sum
    }

    /// Worst relative deviation of any component from Hermiticity,
    /// `max_i ‖x_i − x_i†‖ / ‖x_i‖`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.x
            .iter()
            .map(|xi| {
                let norm = xi.norm();
                if norm == 0.0 {
                    0.0
                } else {
                    (xi - xi.adjoint()).norm() / norm
                }
            })
            .fold(0.0, f64::max)
    }

    /// `‖x1²+x2²+x3² − λ²j(j+1)·I‖ / (λ²j(j+1))`; zero for the trivial rep.
    pub fn casimir_residual(&self) -> f64 {
        let target = self.lambda * self.lambda * self.spin.casimir();
        if target == 0.0 {
            return self.casimir_operator().norm();
        }
        let n = self.dim();
        let diff = self.casimir_operator() - DMatrix::identity(n, n) * Complex64::from(target);
        diff.norm() / target
    }

    /// Sorted (ascending) eigenvalues of `n · x`.
    pub fn projected_spectrum(&self, axis: &Axis) -> Vec<f64> {
        let eig = self.projected(axis).symmetric_eigen();
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Largest ‖[L̂, x_i]‖ where `L̂` is the matrix square root of the Casimir.
    pub fn radial_commutator_residual(&self) -> f64 {
        let radial = radial_operator(self);
        self.x
            .iter()
            .map(|xi| (&radial * xi - xi * &radial).norm())
            .fold(0.0, f64::max)
    }
}

/// Product that skips zero entries of `b`; exact for the dense case, cheap for
/// the banded ladder matrices.
fn sparse_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, b.ncols());
    for col in 0..b.ncols() {
        for k in 0..b.nrows() {
            let bk = b[(k, col)];
            if bk == Complex64::new(0.0, 0.0) {
                continue;
            }
            for row in 0..n {
                let ak = a[(row, k)];
                if ak != Complex64::new(0.0, 0.0) {
                    out[(row, col)] += ak * bk;
                }
            }
        }
    }
    out
}

fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    sparse_product(a, b) - sparse_product(b, a)
}

/// Worst relative violation of `[x_i, x_j] = iλ ε_ijk x_k` over the three
/// cyclic pairs: `‖[x_i,x_j] − iλ x_k‖ / (λ‖x_k‖)`.
///
/// The trivial representation (all components zero) has residual 0.
pub fn commutator_residual(rep: &AlgebraRep) -> f64 {
    let i_lambda = Complex64::new(0.0, rep.lambda());
    let x = rep.components();
    [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        .iter()
        .map(|&(i, j, k)| {
            let diff = commutator(&x[i], &x[j]) - &x[k] * i_lambda;
            let denom = rep.lambda() * x[k].norm();
            let num = diff.norm();
            if denom == 0.0 {
                if num == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                num / denom
            }
        })
        .fold(0.0, f64::max)
}

/// `⟨L̂⟩ = λ√(j(j+1))`, the classical separation carried by a representation.
pub fn radial_observable(rep: &AlgebraRep) -> f64 {
    radial_expectation(rep.spin(), rep.lambda())
}

/// Closed-form radial separation for any spin; no matrices are built.
pub fn radial_expectation(spin: Spin, lambda: f64) -> f64 {
    lambda * spin.casimir().sqrt()
}

/// `L̂ = (x_i x_i)^{1/2}` via the eigen-decomposition of the Casimir.
pub fn radial_operator(rep: &AlgebraRep) -> DMatrix<Complex64> {
    let eig = rep.casimir_operator().symmetric_eigen();
    let roots = eig.eigenvalues.map(|v| Complex64::from(v.max(0.0).sqrt()));
    let q = &eig.eigenvectors;
    q * DMatrix::from_diagonal(&roots) * q.adjoint()
}

/// Normalized amplitudes in a representation's `J_3` eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
    spin: Spin,
}

impl StateVector {
    /// Checks length `2j+1` and unit norm to 1e-12.
    pub fn new(amplitudes: DVector<Complex64>, spin: Spin) -> Result<Self> {
        let dim = spin.dim() as usize;
        if amplitudes.len() != dim {
            return Err(Error::Shape {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(StateVector { amplitudes, spin })
    }

    /// `|j, m⟩` with basis index `j - m`.
    pub fn basis(spin: Spin, index: usize) -> Result<Self> {
        let dim = spin.dim() as usize;
        if index >= dim {
            return Err(Error::Shape {
                expected: dim,
                got: index + 1,
            });
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes, spin })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Eigenvector of `n · x` with the largest eigenvalue (`+jλ`).
///
/// The global phase is fixed so the largest-magnitude amplitude is real and
/// positive (first such index on ties).
pub fn highest_weight_state(rep: &AlgebraRep, axis: &Axis) -> Result<StateVector> {
    let dim = rep.dim();
    if dim == 1 {
        return StateVector::basis(rep.spin(), 0);
    }
    let eig = rep.projected(axis).symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let top = order[0];
    let gap = eig.eigenvalues[top] - eig.eigenvalues[order[1]];
    let threshold = DEGENERACY_TOL * rep.lambda();
    if gap < threshold {
        return Err(Error::Degenerate { gap, threshold });
    }

    let mut v: DVector<Complex64> = eig.eigenvectors.column(top).into_owned();
    let mut pivot = 0;
    for (i, amp) in v.iter().enumerate() {
        if amp.norm() > v[pivot].norm() + 1e-15 {
            pivot = i;
        }
    }
    let phase = v[pivot] / v[pivot].norm();
    v.iter_mut().for_each(|a| *a /= phase);
    let norm = v.norm();
    v /= Complex64::from(norm);
    StateVector::new(v, rep.spin())
}

/// `⟨ψ| (n·x)ᵏ |ψ⟩`-style expectation of a Hermitian square, `‖Aψ‖²`.
fn square_expectation(op: &DMatrix<Complex64>, state: &DVector<Complex64>) -> f64 {
    (op * state).norm_squared()
}

fn check_state(rep: &AlgebraRep, state: &StateVector) -> Result<()> {
    if state.dim() != rep.dim() {
        return Err(Error::Shape {
            expected: rep.dim(),
            got: state.dim(),
        });
    }
    Ok(())
}

/// `⟨ψ| n·x |ψ⟩`.
pub fn projected_expectation(rep: &AlgebraRep, state: &StateVector, axis: &Axis) -> Result<f64> {
    check_state(rep, state)?;
    let psi = state.amplitudes();
    Ok(psi.dotc(&(rep.projected(axis) * psi)).re)
}

/// `⟨ψ| x_⊥² |ψ⟩`, the summed squares of the two position components
/// orthogonal to `axis`.
pub fn transverse_variance_operator(
    rep: &AlgebraRep,
    state: &StateVector,
    axis: &Axis,
) -> Result<f64> {
    check_state(rep, state)?;
    let (u, v) = axis.perpendicular_pair();
    let psi = state.amplitudes();
    // Summing the two perpendicular squares directly avoids the cancellation in
    // Casimir − (n·x)².
    let pu = rep.projected(&Axis(u));
    let pv = rep.projected(&Axis(v));
    Ok(square_expectation(&pu, psi) + square_expectation(&pv, psi))
}

/// Transverse variance of the highest-weight state, `λ² j`, for any spin.
pub fn highest_weight_transverse_variance(spin: Spin, lambda: f64) -> f64 {
    lambda * lambda * spin.value()
}

fn check_separation(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSeparation(l))
    }
}

/// Directional variance `λ / L` at separation `L`.
pub fn angular_variance_formula(separation: f64, scale: &PlanckScale) -> Result<f64> {
    check_separation(separation)?;
    Ok(scale.lambda() / separation)
}

/// Transverse position variance `λ L` at separation `L`, m².
pub fn transverse_variance_formula(separation: f64, scale: &PlanckScale) -> Result<f64> {
    check_separation(separation)?;
    Ok(scale.lambda() * separation)
}

/// Degrees of freedom inside a sphere of radius `R`: `4π (R / l_P)²`.
pub fn state_count_continuum(radius: f64, scale: &PlanckScale) -> Result<f64> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidRadius(radius));
    }
    let r = radius / scale.planck_length();
    Ok(4.0 * PI * r * r)
}

/// Eigenstates summed over integer-spin representations `0..=j`:
/// `Σ (2j'+1) = (j+1)²`.
pub fn state_count_discrete(max_spin: Spin) -> Result<u128> {
    if !max_spin.is_integer() {
        return Err(Error::InvalidSpin(max_spin.value()));
    }
    let j = (max_spin.twice() / 2) as u128;
    Ok((j + 1) * (j + 1))
}

/// Write a matrix as CSV with header `row,col,re,im`, one line per entry in
/// row-major order.
pub fn write_matrix_csv<W: Write>(matrix: &DMatrix<Complex64>, mut out: W) -> io::Result<()> {
    writeln!(out, "row,col,re,im")?;
    for r in 0..matrix.nrows() {
        for c in 0..matrix.ncols() {
            let z = matrix[(r, c)];
            writeln!(out, "{r},{c},{:.17e},{:.17e}", z.re, z.im)?;
        }
    }
    Ok(())
}
