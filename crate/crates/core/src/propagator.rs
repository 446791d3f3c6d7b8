//! Time-sliced free-particle kernel on the noncommutative plane.
//!
//! Each short-time segment is a Gaussian `N exp[-beta (dx)^2]` with
//! `N = m / (m theta + i tau)` and `beta = m / (2 (m theta + i tau))`.
//! Gluing two segments with a star product and integrating out the shared
//! point is again a Gaussian, so the sliced integral is computed exactly by
//! folding [`compose`]. Since `1/(2 beta) - theta` is additive under
//! composition, every slicing of the same total time gives the closed form
//! `m / (m theta + i T) exp[-m (dx)^2 / (2 (i T + m theta))]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::PhysicalParams;
use crate::hilbert::PlanePoint;
use crate::star::GaussianSymbol;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Mass and noncommutativity for kernel evaluation. Unlike
/// [`PhysicalParams`], `theta = 0` is allowed here: the commutative kernel
/// is a well-defined limit for `T > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    mass: f64,
    theta: f64,
}

impl KernelParams {
    pub fn new(mass: f64, theta: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid("mass", format!("must be positive and finite, got {mass}")));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::invalid("theta", format!("must be non-negative and finite, got {theta}")));
        }
        Ok(Self { mass, theta })
    }

    /// The commutative limit `theta = 0`.
    pub fn commutative(mass: f64) -> Result<Self> {
        Self::new(mass, 0.0)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `m theta + i t`, rejecting the `theta = t = 0` singularity.
    fn denominator(&self, t: f64) -> Result<Complex64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid("time", format!("must be non-negative and finite, got {t}")));
        }
        if self.theta == 0.0 && t == 0.0 {
            return Err(Error::invalid("time", "the commutative kernel diverges at T = 0"));
        }
        Ok(Complex64::new(self.mass * self.theta, t))
    }
}

impl From<PhysicalParams> for KernelParams {
    fn from(p: PhysicalParams) -> Self {
        Self {
            mass: p.mass(),
            theta: p.theta(),
        }
    }
}

impl From<&PhysicalParams> for KernelParams {
    fn from(p: &PhysicalParams) -> Self {
        (*p).into()
    }
}

/// `N exp[-beta (dx)^2]`, with `N = reduced_prefactor * (2 pi)^two_pi_power`.
///
/// Every composition contributes one explicit factor `2 pi`; it is counted
/// rather than multiplied in so that thousand-slice folds stay in range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSlice {
    reduced_prefactor: Complex64,
    two_pi_power: u32,
    width: Complex64,
}

impl GaussianSlice {
    pub fn new(prefactor: Complex64, width: Complex64) -> Self {
        Self {
            reduced_prefactor: prefactor,
            two_pi_power: 0,
            width,
        }
    }

    /// The full prefactor `N`. Overflows for very long folds; see
    /// [`GaussianSlice::reduced_prefactor`].
    pub fn prefactor(&self) -> Complex64 {
        self.reduced_prefactor * (2.0 * PI).powi(self.two_pi_power as i32)
    }

    pub fn reduced_prefactor(&self) -> Complex64 {
        self.reduced_prefactor
    }

    pub fn two_pi_power(&self) -> u32 {
        self.two_pi_power
    }

    pub fn width(&self) -> Complex64 {
        self.width
    }

    /// `N exp[-beta d2]` for a squared separation `d2`.
    pub fn eval(&self, d2: f64) -> Complex64 {
        self.prefactor() * (-self.width * d2).exp()
    }

    /// `(1 / 2 pi)^n N exp[-beta d2]`: the slice with `n` integration
    /// measures applied.
    pub fn eval_with_measure(&self, d2: f64, n: u32) -> Complex64 {
        let power = self.two_pi_power as i32 - n as i32;
        self.reduced_prefactor * (2.0 * PI).powi(power) * (-self.width * d2).exp()
    }

    /// The slice as a symbol joining variable `from` to `to`:
    /// `N exp[-2 theta beta (z_to - z_from)(zbar_to - zbar_from)]`.
    pub fn to_symbol(&self, vars: usize, from: usize, to: usize, params: &PhysicalParams) -> GaussianSymbol {
        GaussianSymbol::unit(vars)
            .with_prefactor(self.prefactor())
            .with_distance_sqr(to, from, -2.0 * params.theta() * self.width)
    }
}

/// Uniform slicing: `n` intermediate points, steps of `tau`, total
/// `T = (n + 1) tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSchedule {
    n: usize,
    tau: f64,
}

impl SliceSchedule {
    pub fn new(n: usize, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::invalid("tau", format!("must be non-negative and finite, got {tau}")));
        }
        Ok(Self { n, tau })
    }

    /// Splits `total` into `n + 1` equal steps.
    pub fn from_total(n: usize, total: f64) -> Result<Self> {
        Self::new(n, total / (n + 1) as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn total_time(&self) -> f64 {
        (self.n + 1) as f64 * self.tau
    }
}

/// `gamma = beta2 / beta1`, `Lambda = 1 + gamma - 2 theta beta2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionIntermediates {
    pub gamma: Complex64,
    pub lambda: Complex64,
}

impl CompositionIntermediates {
    pub fn new(left: &GaussianSlice, right: &GaussianSlice, theta: f64) -> Result<Self> {
        if left.width == Complex64::new(0.0, 0.0) {
            return Err(Error::invalid("beta1", "left slice width must be nonzero"));
        }
        let gamma = right.width / left.width;
        let lambda = 1.0 + gamma - 2.0 * theta * right.width;
        Ok(Self { gamma, lambda })
    }
}

/// Short-time segment `N = m / (m theta + i tau)`, `beta = N / 2`.
pub fn short_time_slice(params: impl Into<KernelParams>, tau: f64) -> Result<GaussianSlice> {
    let params = params.into();
    let n = params.mass / params.denominator(tau)?;
    Ok(GaussianSlice::new(n, n / 2.0))
}

/// `int dx dy (left) *(right)`: `N' = N1 N2 pi / (beta1 Lambda)`,
/// `beta' = beta1 gamma / Lambda`. `left` joins the shared point to the
/// later endpoint, `right` the earlier endpoint to the shared point.
pub fn compose(left: &GaussianSlice, right: &GaussianSlice, params: impl Into<KernelParams>) -> Result<GaussianSlice> {
    let theta = params.into().theta;
    let CompositionIntermediates { gamma, lambda } = CompositionIntermediates::new(left, right, theta)?;
    if lambda.norm() <= 1e-14 * (1.0 + gamma.norm()) {
        return Err(Error::DegenerateComposition { lambda });
    }
    let width = left.width * gamma / lambda;
    if width.re < -1e-14 * width.norm() {
        return Err(Error::NonIntegrable {
            reason: format!("composed width {width} has negative real part"),
        });
    }
    // N1 N2 pi / (beta1 Lambda) = 2 pi * N1 N2 / (2 beta1 Lambda)
    let reduced_prefactor = left.reduced_prefactor * right.reduced_prefactor / (2.0 * left.width * lambda);
    Ok(GaussianSlice {
        reduced_prefactor,
        two_pi_power: left.two_pi_power + right.two_pi_power + 1,
        width,
    })
}

/// Folds [`compose`] over `n + 1` equal short-time slices.
pub fn fold_slices(params: impl Into<KernelParams>, schedule: &SliceSchedule) -> Result<GaussianSlice> {
    let params = params.into();
    let step = short_time_slice(params, schedule.tau)?;
    (0..schedule.n).try_fold(step, |acc, _| compose(&step, &acc, params))
}

/// The sliced path integral: folded slices with the `(1/2 pi)^n` measure,
/// evaluated between the endpoints.
pub fn sliced_kernel(
    params: impl Into<KernelParams>,
    schedule: &SliceSchedule,
    from: &PlanePoint,
    to: &PlanePoint,
) -> Result<Complex64> {
    let folded = fold_slices(params, schedule)?;
    Ok(folded.eval_with_measure(to.distance_sqr(from), schedule.n as u32))
}

/// `m / (m theta + i T) exp[-m (dx)^2 / (2 (i T + m theta))]`.
pub fn closed_form_kernel(
    params: impl Into<KernelParams>,
    total_time: f64,
    from: &PlanePoint,
    to: &PlanePoint,
) -> Result<Complex64> {
    let params = params.into();
    let denom = params.denominator(total_time)?;
    let d2 = to.distance_sqr(from);
    Ok(params.mass / denom * (-params.mass * d2 / (2.0 * denom)).exp())
}

/// `theta = 0` limit, `(m / i T) exp[i m (dx)^2 / (2 T)]`. This carries the
/// same normalization as [`closed_form_kernel`]: it is `2 pi` times the
/// standard two-dimensional free kernel `m / (2 pi i T)`.
pub fn commutative_kernel(mass: f64, total_time: f64, from: &PlanePoint, to: &PlanePoint) -> Result<Complex64> {
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(Error::invalid("time", format!("must be positive, got {total_time}")));
    }
    let d2 = to.distance_sqr(from);
    Ok(mass / (I * total_time) * (I * mass * d2 / (2.0 * total_time)).exp())
}

/// Upper bound `m / sqrt(m^2 theta^2 + T^2)` on `|K|`, attained at `dx = 0`.
pub fn kernel_magnitude_bound(params: impl Into<KernelParams>, total_time: f64) -> f64 {
    let p = params.into();
    p.mass / (p.mass * p.mass * p.theta * p.theta + total_time * total_time).sqrt()
}
