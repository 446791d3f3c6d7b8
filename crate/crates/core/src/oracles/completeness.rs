//! Completeness relations checked by brute-force quadrature.
//!
//! Momentum states: `int d^2p (w|p)(p|z) = exp(-|w - z|^2) / theta`.
//!
//! Position states: `int dx dy / (2 pi) (p'|z) * (z|p)` is a delta function
//! in `p - p'`. It is tested smeared against a unit-mass Gaussian
//! `phi_sigma(q - p)` in the momentum `q`. The smeared right-hand side is
//! exactly `phi_sigma(p' - p)`, since the Gaussian weights cancel at
//! coincidence. The `q` integral is done analytically and the position
//! integral by quadrature. Replacing the star by the pointwise product leaves
//! a weight `exp(-theta |p|^2 / 2)` at coincidence instead of 1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::PhysicalParams;
use crate::hilbert::{position_momentum_overlap, MomentumPoint};
use crate::oracles::quadrature::{QuadratureRule, QuadratureSpec};
use crate::star::{integrate_position, star, GaussianSymbol, Slot};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const GL_ORDER: usize = 16;

/// Quadrature value next to its analytic target. `scale` sets the size
/// against which the error is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessCheck {
    pub value: Complex64,
    pub target: Complex64,
    pub scale: f64,
    pub quadrature_error: f64,
}

impl CompletenessCheck {
    pub fn error(&self) -> f64 {
        (self.value - self.target).norm() / self.scale
    }
}

/// Smallest `R` for which the momentum integrand outside `[-R, R]^2` is
/// below `tolerance / 10` relative to the result.
pub fn momentum_completeness_radius(z: Complex64, w: Complex64, params: &PhysicalParams, tolerance: f64) -> f64 {
    (2.0 * ((w - z).norm_sqr() + (10.0 / tolerance).ln()) / params.theta()).sqrt()
}

impl QuadratureSpec {
    /// Tail-bound radius and enough panels to resolve the phase
    /// `exp(i p.(x_w - x_z))`.
    pub fn for_momentum_completeness(z: Complex64, w: Complex64, params: &PhysicalParams, tolerance: f64) -> Self {
        let radius = momentum_completeness_radius(z, w, params, tolerance);
        let freq = (2.0 * params.theta()).sqrt() * (w - z).norm();
        QuadratureSpec {
            radius,
            rule: QuadratureRule::TensorGaussLegendre {
                panels: panels_for(radius, freq),
                order: GL_ORDER,
            },
            tolerance,
            sigma: default_sigma(params),
        }
    }

    /// Radius and panels for the position integral of the smeared star
    /// completeness check, read off the integrand itself.
    pub fn for_star_completeness(
        p: &MomentumPoint,
        p_prime: &MomentumPoint,
        params: &PhysicalParams,
        tolerance: f64,
    ) -> Result<Self> {
        let sigma = default_sigma(params);
        let mut radius: f64 = 0.0;
        let mut freq: f64 = 0.0;
        for with_star in [true, false] {
            let g = smeared_position_integrand(p, p_prime, params, sigma, with_star)?;
            let env = Envelope::new(&g, params);
            let scale = 1.0 / (2.0 * PI * sigma * sigma);
            let r = env.radius(tolerance * scale);
            radius = radius.max(r);
            freq = freq.max(env.max_frequency(r));
        }
        Ok(QuadratureSpec {
            radius,
            rule: QuadratureRule::TensorGaussLegendre {
                panels: panels_for(radius, freq),
                order: GL_ORDER,
            },
            tolerance,
            sigma,
        })
    }
}

/// Smearing width `0.05 / sqrt(theta)`.
pub fn default_sigma(params: &PhysicalParams) -> f64 {
    0.05 / params.theta().sqrt()
}

fn panels_for(radius: f64, freq: f64) -> usize {
    ((2.0 * radius * freq / (2.0 * PI)).ceil() as usize).max(8)
}

/// `int d^2p (w|p)(p|z)` by quadrature, against `exp(-|w - z|^2) / theta`.
pub fn check_momentum_completeness(
    z: Complex64,
    w: Complex64,
    params: &PhysicalParams,
    quad: &QuadratureSpec,
) -> Result<CompletenessCheck> {
    quad.check_radius(momentum_completeness_radius(z, w, params, quad.tolerance))?;
    let target = Complex64::new((-(w - z).norm_sqr()).exp() / params.theta(), 0.0);
    let result = quad.integrate(target.norm(), |px, py| {
        let p = MomentumPoint::new(px, py);
        position_momentum_overlap(w, &p, params) * position_momentum_overlap(z, &p, params).conj()
    })?;
    Ok(CompletenessCheck {
        value: result.value,
        target,
        scale: target.norm(),
        quadrature_error: result.error_estimate,
    })
}

/// Unit-mass Gaussian `exp(-|d|^2 / (2 sigma^2)) / (2 pi sigma^2)`.
pub fn smeared_delta(d: Complex64, sigma: f64) -> f64 {
    (-d.norm_sqr() / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
}

/// `int d^2q phi_sigma(q - p) (p'|z) * (z|q)` as a symbol in `z` alone.
/// With `with_star = false` the star is replaced by the pointwise product.
pub fn smeared_position_integrand(
    p: &MomentumPoint,
    p_prime: &MomentumPoint,
    params: &PhysicalParams,
    sigma: f64,
    with_star: bool,
) -> Result<GaussianSymbol> {
    let theta = params.theta();
    let s = (theta / 2.0).sqrt();
    let pp = p_prime.complex();
    let pc = p.complex();
    let half_ln_2pi = Complex64::new(0.5 * (2.0 * PI).ln(), 0.0);
    // (p'|z)
    let bra = GaussianSymbol::unit(2)
        .with_log_prefactor(-half_ln_2pi - theta * p_prime.norm_sqr() / 4.0)
        .with_linear(Slot::Z(0), -I * s * pp.conj())
        .with_linear(Slot::Zbar(0), -I * s * pp);
    // (z|q)
    let ket = GaussianSymbol::unit(2)
        .with_log_prefactor(-half_ln_2pi)
        .with_quadratic(Slot::Z(1), Slot::Zbar(1), Complex64::new(-theta / 4.0, 0.0))
        .with_quadratic(Slot::Z(1), Slot::Zbar(0), I * s)
        .with_quadratic(Slot::Zbar(1), Slot::Z(0), I * s);
    let k = 1.0 / (2.0 * sigma * sigma);
    let smear = GaussianSymbol::unit(2)
        .with_log_prefactor(Complex64::new(-(2.0 * PI * sigma * sigma).ln() - k * p.norm_sqr(), 0.0))
        .with_quadratic(Slot::Z(1), Slot::Zbar(1), Complex64::new(-k, 0.0))
        .with_linear(Slot::Z(1), pc.conj() * k)
        .with_linear(Slot::Zbar(1), pc * k);
    let inner = if with_star { star(&bra, &ket, 0)? } else { bra.mul(&ket)? };
    inner.mul(&smear)?.integrate_plane(1)
}

/// Smeared `int dx dy / (2 pi) (p'|z) * (z|p)` by quadrature over the
/// position plane, against `phi_sigma(p' - p)`.
pub fn check_position_star_completeness(
    p: &MomentumPoint,
    p_prime: &MomentumPoint,
    params: &PhysicalParams,
    quad: &QuadratureSpec,
) -> Result<CompletenessCheck> {
    position_completeness(p, p_prime, params, quad, true)
}

/// The same integral with the pointwise product in place of the star. Its
/// mismatch with the target is the negative control.
pub fn check_position_product_completeness(
    p: &MomentumPoint,
    p_prime: &MomentumPoint,
    params: &PhysicalParams,
    quad: &QuadratureSpec,
) -> Result<CompletenessCheck> {
    position_completeness(p, p_prime, params, quad, false)
}

fn position_completeness(
    p: &MomentumPoint,
    p_prime: &MomentumPoint,
    params: &PhysicalParams,
    quad: &QuadratureSpec,
    with_star: bool,
) -> Result<CompletenessCheck> {
    quad.validate()?;
    let g = smeared_position_integrand(p, p_prime, params, quad.sigma, with_star)?;
    let scale = 1.0 / (2.0 * PI * quad.sigma * quad.sigma);
    quad.check_radius(Envelope::new(&g, params).radius(quad.tolerance * scale))?;
    let target = Complex64::new(smeared_delta(p_prime.complex() - p.complex(), quad.sigma), 0.0);
    let q = g.coefficients(0);
    let lp = g.log_prefactor();
    let norm = (2.0 * params.theta()).sqrt().recip();
    let result = quad.integrate(scale, |x, y| {
        let z = Complex64::new(x, y) * norm;
        let zb = z.conj();
        (lp + q.a * z * z + q.b * zb * zb + q.c * z * zb + q.d * z + q.e * zb).exp() / (2.0 * PI)
    })?;
    Ok(CompletenessCheck {
        value: result.value,
        target,
        scale,
        quadrature_error: result.error_estimate,
    })
}

/// The smeared position integral done analytically.
pub fn position_completeness_analytic(
    p: &MomentumPoint,
    p_prime: &MomentumPoint,
    params: &PhysicalParams,
    sigma: f64,
    with_star: bool,
) -> Result<Complex64> {
    let g = smeared_position_integrand(p, p_prime, params, sigma, with_star)?;
    Ok(integrate_position(&g, 0, params)?.log_prefactor().exp())
}

/// Modulus of a one-variable symbol written in `xi = (Re z, Im z)`:
/// `|g| = exp(c0 - xi.M.xi / 2 + r.xi)`.
struct Envelope {
    m: [[f64; 2]; 2],
    r: [f64; 2],
    c0: f64,
    /// Imaginary part of the form, for the phase.
    m_im: [[f64; 2]; 2],
    r_im: [f64; 2],
    /// `x = sqrt(2 theta) xi`.
    length: f64,
}

impl Envelope {
    fn new(g: &GaussianSymbol, params: &PhysicalParams) -> Self {
        let q = g.coefficients(0);
        // exponent = a z^2 + b zbar^2 + c z zbar + d z + e zbar with z = s + i t
        let xx = q.a + q.b + q.c;
        let tt = -(q.a + q.b) + q.c;
        let xt = I * (q.a - q.b);
        let rs = q.d + q.e;
        let rt = I * (q.d - q.e);
        Envelope {
            m: [[-2.0 * xx.re, -2.0 * xt.re], [-2.0 * xt.re, -2.0 * tt.re]],
            r: [rs.re, rt.re],
            c0: g.log_prefactor().re,
            m_im: [[2.0 * xx.im, 2.0 * xt.im], [2.0 * xt.im, 2.0 * tt.im]],
            r_im: [rs.im, rt.im],
            length: (2.0 * params.theta()).sqrt(),
        }
    }

    fn eigenvalues(&self) -> (f64, f64) {
        let [[a, b], [_, d]] = self.m;
        let mean = (a + d) / 2.0;
        let dev = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        (mean - dev, mean + dev)
    }

    fn center(&self) -> [f64; 2] {
        let [[a, b], [_, d]] = self.m;
        let det = a * d - b * b;
        [(d * self.r[0] - b * self.r[1]) / det, (a * self.r[1] - b * self.r[0]) / det]
    }

    /// Half-width in `x` of a square whose complement carries at most
    /// `budget / 10` of `int |g| dx dy / (2 pi)`.
    fn radius(&self, budget: f64) -> f64 {
        let (lo, hi) = self.eigenvalues();
        let c = self.center();
        let peak = self.c0 + 0.5 * (c[0] * self.r[0] + c[1] * self.r[1]);
        let det = lo * hi;
        // int |g| dx dy / 2 pi = (theta / pi) int |g| d^2 xi
        let total_ln = peak + (2.0 * PI / det.sqrt()).ln() + (self.length * self.length / (2.0 * PI)).ln();
        let excess = (total_ln + 0.5 * (hi / lo).ln() - (budget / 10.0).ln()).max(0.0);
        let rho = (2.0 * excess / lo).sqrt();
        self.length * ((c[0] * c[0] + c[1] * c[1]).sqrt() + rho)
    }

    /// Largest phase gradient in `x` over the square of half-width `radius`.
    fn max_frequency(&self, radius: f64) -> f64 {
        let xi = radius / self.length * std::f64::consts::SQRT_2;
        let norm_im = self.m_im.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let grad = (self.r_im[0].powi(2) + self.r_im[1].powi(2)).sqrt() + norm_im * xi;
        grad / self.length
    }
}
