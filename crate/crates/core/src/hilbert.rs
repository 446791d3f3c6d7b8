//! Quantum Hilbert space: Hilbert-Schmidt operators on the truncated Fock
//! space, with inner product `(phi, psi) = tr(phi^dagger psi)`.
//!
//! Positions act by left multiplication, momenta by commutators. At finite
//! `D` the algebra relations hold on the interior block (both indices below
//! `D - 2`); see [`interior_rel_err`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{coherent_vector, ladder_operators, FockSpace, FockVector, PhysicalParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A square complex array: an element of the quantum Hilbert space, or an
/// operator on configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    entries: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if entries.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::invalid("entries", "Hilbert-Schmidt norm overflowed"));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    /// `|a><b|`.
    pub fn outer(a: &FockVector, b: &FockVector) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        Ok(Self {
            entries: a.as_dvector() * b.as_dvector().adjoint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// Hermitian conjugate on configuration space.
    pub fn dagger(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            entries: &self.entries * factor,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries - &other.entries,
        })
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        })
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        check_dim(self.dim(), v.dim())?;
        Ok(FockVector::from_dvector(&self.entries * v.as_dvector()))
    }

    /// `tr(psi^dagger psi)`.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A point of the plane. The dimensionless coordinate
/// `z = (x + i y) / sqrt(2 theta)` depends on `theta` and is derived on
/// demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_z(z: Complex64, params: &PhysicalParams) -> Self {
        let scale = (2.0 * params.theta()).sqrt();
        Self {
            x: z.re * scale,
            y: z.im * scale,
        }
    }

    pub fn z(&self, params: &PhysicalParams) -> Complex64 {
        Complex64::new(self.x, self.y) / (2.0 * params.theta()).sqrt()
    }

    pub fn distance_sqr(&self, other: &PlanePoint) -> f64 {
        (self.x - other.x).powi(2) + (self.y - other.y).powi(2)
    }
}

/// Momentum `(px, py)` with complex combination `p = px + i py`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPoint {
    pub px: f64,
    pub py: f64,
}

impl MomentumPoint {
    pub fn new(px: f64, py: f64) -> Self {
        Self { px, py }
    }

    pub fn from_complex(p: Complex64) -> Self {
        Self { px: p.re, py: p.im }
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.px, self.py)
    }

    /// `conj(p) p = px^2 + py^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.px * self.px + self.py * self.py
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// `(phi, psi) = tr(phi^dagger psi)`.
pub fn hs_inner(phi: &FockOperator, psi: &FockOperator) -> Result<Complex64> {
    check_dim(phi.dim(), psi.dim())?;
    Ok(phi.entries.dotc(&psi.entries))
}

/// Configuration-space coordinate operator `x` or `y` at dimension `dim`.
pub fn coordinate_operator(which: Axis, params: &PhysicalParams, dim: usize) -> Result<FockOperator> {
    let (b, bd) = ladder_operators(&FockSpace::new(dim)?)?;
    let s = (params.theta() / 2.0).sqrt();
    Ok(match which {
        Axis::X => b.add(&bd)?.scale(Complex64::new(s, 0.0)),
        Axis::Y => b.sub(&bd)?.scale(Complex64::new(0.0, -s)),
    })
}

/// `X psi = x psi`, `Y psi = y psi`.
pub fn apply_position(which: Axis, psi: &FockOperator, params: &PhysicalParams) -> Result<FockOperator> {
    coordinate_operator(which, params, psi.dim())?.mul(psi)
}

/// `Px psi = [y, psi] / theta`, `Py psi = -[x, psi] / theta`.
pub fn apply_momentum(which: Axis, psi: &FockOperator, params: &PhysicalParams) -> Result<FockOperator> {
    let inv = 1.0 / params.theta();
    match which {
        Axis::X => {
            let y = coordinate_operator(Axis::Y, params, psi.dim())?;
            Ok(y.commutator(psi)?.scale(Complex64::new(inv, 0.0)))
        }
        Axis::Y => {
            let x = coordinate_operator(Axis::X, params, psi.dim())?;
            Ok(x.commutator(psi)?.scale(Complex64::new(-inv, 0.0)))
        }
    }
}

/// `B psi = b psi`.
pub fn apply_b(psi: &FockOperator) -> Result<FockOperator> {
    let (b, _) = ladder_operators(&FockSpace::new(psi.dim())?)?;
    b.mul(psi)
}

/// `B^ddagger psi = b^dagger psi`.
pub fn apply_b_ddagger(psi: &FockOperator) -> Result<FockOperator> {
    let (_, bd) = ladder_operators(&FockSpace::new(psi.dim())?)?;
    bd.mul(psi)
}

/// `P psi = -i sqrt(2/theta) [b, psi]`, with `P = Px + i Py`.
pub fn apply_p(psi: &FockOperator, params: &PhysicalParams) -> Result<FockOperator> {
    let (b, _) = ladder_operators(&FockSpace::new(psi.dim())?)?;
    let k = (2.0 / params.theta()).sqrt();
    Ok(b.commutator(psi)?.scale(Complex64::new(0.0, -k)))
}

/// `P^ddagger psi = i sqrt(2/theta) [b^dagger, psi]`.
pub fn apply_p_ddagger(psi: &FockOperator, params: &PhysicalParams) -> Result<FockOperator> {
    let (_, bd) = ladder_operators(&FockSpace::new(psi.dim())?)?;
    let k = (2.0 / params.theta()).sqrt();
    Ok(bd.commutator(psi)?.scale(Complex64::new(0.0, k)))
}

/// Position state `|z, zbar) = |z><z| / sqrt(theta)`. Not unit normalized:
/// `(z|z) = 1/theta`.
pub fn position_state(z: Complex64, params: &PhysicalParams, space: &FockSpace) -> Result<FockOperator> {
    let v = coherent_vector(space, z)?;
    Ok(FockOperator::outer(&v, &v)?.scale(Complex64::new(params.theta().sqrt().recip(), 0.0)))
}

/// Momentum eigenstate `|p) = sqrt(theta / 2 pi) exp(i sqrt(theta/2) (conj(p) b + p b^dagger))`.
///
/// The exponential is a displacement by `alpha = i sqrt(theta/2) p`; the
/// space must hold the coherent state `|alpha>` within its tail tolerance.
pub fn momentum_state(p: &MomentumPoint, params: &PhysicalParams, space: &FockSpace) -> Result<FockOperator> {
    let theta = params.theta();
    space.check_tail(theta * p.norm_sqr() / 2.0)?;
    let (b, bd) = ladder_operators(space)?;
    let pc = p.complex();
    let generator = b
        .scale(pc.conj())
        .add(&bd.scale(pc))?
        .scale(I * (theta / 2.0).sqrt());
    let displaced = generator.into_matrix().exp();
    FockOperator::from_matrix(displaced * Complex64::new((theta / (2.0 * PI)).sqrt(), 0.0))
}

/// Exact `(z, zbar | w, wbar) = exp(-|z - w|^2) / theta`.
pub fn position_overlap(z: Complex64, w: Complex64, params: &PhysicalParams) -> f64 {
    (-(z - w).norm_sqr()).exp() / params.theta()
}

/// Exact `(z, zbar | p) = exp(-theta |p|^2 / 4) exp(i sqrt(theta/2) (p zbar + conj(p) z)) / sqrt(2 pi)`.
pub fn position_momentum_overlap(z: Complex64, p: &MomentumPoint, params: &PhysicalParams) -> Complex64 {
    let theta = params.theta();
    let pc = p.complex();
    let phase = I * (theta / 2.0).sqrt() * (pc * z.conj() + pc.conj() * z);
    (phase - theta * p.norm_sqr() / 4.0).exp() / (2.0 * PI).sqrt()
}

/// Number of leading rows/columns on which truncated identities are exact.
pub fn interior_size(dim: usize) -> usize {
    dim.saturating_sub(2)
}

/// Frobenius error of `actual - expected` on the interior block, relative to
/// the interior norm of `expected` (absolute when that norm vanishes).
pub fn interior_rel_err(actual: &FockOperator, expected: &FockOperator) -> Result<f64> {
    block_rel_err(actual, expected, interior_size(actual.dim()))
}

/// As [`interior_rel_err`] on the leading `size x size` block. Displaced
/// states such as momentum eigenstates feel the truncation well inside the
/// interior; half the dimension is a safe block for them.
pub fn block_rel_err(actual: &FockOperator, expected: &FockOperator, size: usize) -> Result<f64> {
    check_dim(actual.dim(), expected.dim())?;
    let k = size.min(actual.dim());
    let a = actual.entries.view((0, 0), (k, k));
    let e = expected.entries.view((0, 0), (k, k));
    let diff = (a - e).norm();
    let scale = e.norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}
