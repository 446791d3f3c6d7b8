//! Truncated boson Fock space standing in for the noncommutative plane.
//!
//! The coordinates obey `[x, y] = i theta`; with `b = (x + i y) / sqrt(2 theta)`
//! they generate a Fock algebra `[b, b^dagger] = 1`, so configuration space is
//! the span of the number states `|n>`. Everything here is truncated to the
//! first `D` number states. Analytic coherent-state overlaps never touch the
//! truncation; the truncated vectors exist to cross-check them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::FockOperator;

/// Default bound on the Poisson tail discarded by truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Mass and noncommutativity in natural units (`hbar = c = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mass: f64,
    theta: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, theta: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid("mass", format!("must be positive and finite, got {mass}")));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::invalid("theta", format!("must be positive and finite, got {theta}")));
        }
        Ok(Self { mass, theta })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Truncated Fock space spanned by `|0>, ..., |D-1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpace {
    dim: usize,
    tail_tolerance: f64,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall { dim, min: 2 });
        }
        Ok(Self {
            dim,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        })
    }

    /// Smallest space whose truncation of `|z>` discards at most `tolerance`
    /// of its norm. Starts from `|z|^2 + 10 sqrt(|z|^2 + 1) + 20`.
    pub fn for_coherent(z: Complex64, tolerance: f64) -> Result<Self> {
        let dim = required_dim(z.norm_sqr(), tolerance);
        Ok(Self::new(dim)?.with_tail_tolerance(tolerance))
    }

    pub fn with_tail_tolerance(mut self, tolerance: f64) -> Self {
        self.tail_tolerance = tolerance;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Fails if a coherent state of mean occupation `mean` loses more than
    /// the configured tail in this space.
    pub(crate) fn check_tail(&self, mean: f64) -> Result<()> {
        let tail = poisson_tail(mean, self.dim);
        if tail > self.tail_tolerance {
            return Err(Error::TruncationTail {
                dim: self.dim,
                tail,
                tolerance: self.tail_tolerance,
                required_dim: required_dim(mean, self.tail_tolerance),
            });
        }
        Ok(())
    }
}

/// A vector of the truncated configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: DVector<Complex64>,
}

impl FockVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::invalid("amplitudes", "entries must be finite"));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// Number state `|n>`.
    pub fn basis(space: &FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::invalid("n", format!("basis index {n} outside dimension {}", space.dim())));
        }
        let mut amplitudes = DVector::zeros(space.dim());
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_dvector(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub(crate) fn as_dvector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Truncated annihilation and creation operators `(b, b^dagger)`.
///
/// `[b, b^dagger]` is the identity except in the last diagonal slot, where
/// it equals `-(D-1)`. That defect is the truncation and is left in place.
pub fn ladder_operators(space: &FockSpace) -> Result<(FockOperator, FockOperator)> {
    let d = space.dim();
    if d < 2 {
        return Err(Error::DimensionTooSmall { dim: d, min: 2 });
    }
    let mut lower = DMatrix::zeros(d, d);
    for n in 1..d {
        lower[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let raise = lower.adjoint();
    Ok((FockOperator::from_matrix(lower)?, FockOperator::from_matrix(raise)?))
}

/// Truncated normalized coherent state `|z> = e^{-|z|^2/2} e^{z b^dagger}|0>`.
pub fn coherent_vector(space: &FockSpace, z: Complex64) -> Result<FockVector> {
    space.check_tail(z.norm_sqr())?;
    let mut amplitudes = Vec::with_capacity(space.dim());
    let mut a = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..space.dim() {
        amplitudes.push(a);
        a = a * z / ((n + 1) as f64).sqrt();
    }
    FockVector::from_amplitudes(amplitudes)
}

/// `<z|w> = exp(-(|z|^2 + |w|^2)/2 + conj(z) w)`, exact.
pub fn coherent_overlap(z: Complex64, w: Complex64) -> Complex64 {
    (-0.5 * (z.norm_sqr() + w.norm_sqr()) + z.conj() * w).exp()
}

/// Probability mass `P(N >= dim)` of a Poisson distribution with the given
/// mean, summed directly so small tails keep full relative precision.
pub fn poisson_tail(mean: f64, dim: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (1..=dim).map(|k| (k as f64).ln()).sum();
    let mut term = (-mean + dim as f64 * mean.ln() - ln_fact).exp();
    let mut sum = 0.0;
    let mut n = dim;
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if n as f64 > mean && term <= 1e-18 * sum {
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    sum.min(1.0)
}

/// Smallest dimension with Poisson tail at most `tolerance`, starting from
/// the heuristic `mean + 10 sqrt(mean + 1) + 20`.
pub fn required_dim(mean: f64, tolerance: f64) -> usize {
    let guess = (mean + 10.0 * (mean + 1.0).sqrt() + 20.0).ceil() as usize;
    let mut dim = guess;
    while dim > 2 && poisson_tail(mean, dim - 1) <= tolerance {
        dim -= 1;
    }
    while poisson_tail(mean, dim) > tolerance {
        dim += 1;
    }
    dim.max(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_reject_nonpositive() {
        assert!(PhysicalParams::new(0.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, -2.0).is_err());
        assert!(PhysicalParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn ladder_d2() {
        let (lower, raise) = ladder_operators(&FockSpace::new(2).unwrap()).unwrap();
        let m = lower.matrix();
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(0, 0)], c(0.0, 0.0));
        assert_eq!(m[(1, 0)], c(0.0, 0.0));
        assert_eq!(m[(1, 1)], c(0.0, 0.0));
        assert_eq!(raise, lower.dagger());
    }

    #[test]
    fn ladder_rejects_d1() {
        assert!(matches!(FockSpace::new(1), Err(Error::DimensionTooSmall { .. })));
    }

    #[test]
    fn commutator_diagonal_d3() {
        let (lower, raise) = ladder_operators(&FockSpace::new(3).unwrap()).unwrap();
        let comm = lower.commutator(&raise).unwrap();
        let diag: Vec<f64> = (0..3).map(|i| comm.matrix()[(i, i)].re).collect();
        assert_eq!(diag.len(), 3);
        assert!((diag[0] - 1.0).abs() < 1e-15);
        assert!((diag[1] - 1.0).abs() < 1e-15);
        assert!((diag[2] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn commutator_identity_away_from_edge() {
        for d in [2, 5, 17, 40] {
            let space = FockSpace::new(d).unwrap();
            let (lower, raise) = ladder_operators(&space).unwrap();
            let comm = lower.commutator(&raise).unwrap();
            for i in 0..d {
                for j in 0..d {
                    let expect = if i == j && i < d - 1 { 1.0 } else if i == j { -((d - 1) as f64) } else { 0.0 };
                    assert!((comm.matrix()[(i, j)] - c(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lower_kills_vacuum() {
        let space = FockSpace::new(6).unwrap();
        let (lower, _) = ladder_operators(&space).unwrap();
        let out = lower.apply(&FockVector::basis(&space, 0).unwrap()).unwrap();
        assert_eq!(out.norm_sqr(), 0.0);
    }

    #[test]
    fn coherent_vacuum_and_first_amplitude() {
        let space = FockSpace::new(20).unwrap().with_tail_tolerance(1e-12);
        let v = coherent_vector(&space, c(0.0, 0.0)).unwrap();
        assert_eq!(v.amplitudes()[0], c(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));

        let v = coherent_vector(&space, c(1.0, 0.0)).unwrap();
        assert!((v.amplitudes()[0].re - 0.6065306597126334).abs() < 1e-15);
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_tail_violation_reports_dim() {
        let space = FockSpace::new(8).unwrap();
        match coherent_vector(&space, c(2.0, 1.0)) {
            Err(Error::TruncationTail { required_dim, dim, .. }) => {
                assert_eq!(dim, 8);
                assert!(required_dim > 8);
                let ok = FockSpace::new(required_dim).unwrap();
                assert!(coherent_vector(&ok, c(2.0, 1.0)).is_ok());
            }
            other => panic!("expected tail error, got {other:?}"),
        }
    }

    #[test]
    fn overlap_examples() {
        let z = c(0.3, -0.7);
        assert!((coherent_overlap(z, z) - c(1.0, 0.0)).norm() < 1e-15);

        let o = coherent_overlap(c(1.0, 0.0), c(0.0, 0.0));
        assert!((o.re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((o.norm_sqr() - 0.36787944117144233).abs() < 1e-15);

        let o = coherent_overlap(c(0.0, 1.0), c(0.0, -1.0));
        assert!((o - c((-2.0f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn overlap_matches_fock_sum() {
        let space = FockSpace::new(30).unwrap();
        let pairs = [
            (c(1.0, 0.0), c(0.0, 0.0)),
            (c(0.0, 1.0), c(0.0, -1.0)),
            (c(0.4, 0.9), c(-1.1, 0.2)),
        ];
        for (z, w) in pairs {
            let vz = coherent_vector(&space, z).unwrap();
            let vw = coherent_vector(&space, w).unwrap();
            let sum = vz.inner(&vw).unwrap();
            assert!((sum - coherent_overlap(z, w)).norm() < 1e-12, "{z} {w}");
        }
    }

    #[test]
    fn poisson_tail_matches_complement_sum() {
        for (mean, dim) in [(0.5f64, 4), (2.25, 10), (9.0, 20)] {
            let mut head = 0.0;
            let mut term = (-mean).exp();
            for n in 0..dim {
                head += term;
                term *= mean / (n + 1) as f64;
            }
            assert!((poisson_tail(mean, dim) - (1.0 - head)).abs() < 1e-14);
        }
        assert_eq!(poisson_tail(0.0, 3), 0.0);
    }

    #[test]
    fn required_dim_is_minimal() {
        for mean in [0.0, 0.3, 2.25, 16.0] {
            let d = required_dim(mean, 1e-12);
            assert!(poisson_tail(mean, d) <= 1e-12);
            if d > 2 {
                assert!(poisson_tail(mean, d - 1) > 1e-12);
            }
        }
    }
}
