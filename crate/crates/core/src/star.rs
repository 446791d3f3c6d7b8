//! Voros star product `f * g = f exp(<-d_zbar ->d_z) g` on Gaussian symbols.
//!
//! A [`GaussianSymbol`] is `exp(c + L.w + w.Q.w / 2)` where `w` lists the
//! holomorphic and antiholomorphic slots `(z_0, zbar_0, z_1, zbar_1, ...)` of
//! every complex variable involved, treated as independent. One variable is
//! "active" in a star product; the others are spectators (other slice
//! endpoints, momenta) and ride along as shifts of the linear coefficients.
//!
//! With `k1 = d_zbar log f`, `k2 = d_z log g`, `b_f = (1/2) d_zbar^2 log f`,
//! `a_g = (1/2) d_z^2 log g` and `D = 1 - 4 a_g b_f`, resumming the derivative
//! series gives
//!
//! ```text
//! f * g = f g D^{-1/2} exp[(k1 k2 + a_g k1^2 + b_f k2^2) / D]
//! ```
//!
//! with the principal root, which is the analytic continuation of the series
//! from `a_g b_f = 0`. [`star_series_oracle`] sums the series term by term
//! from exact derivatives and is used to check this.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::PhysicalParams;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// One slot of the quadratic form: `z` or `zbar` of variable `var`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Z(usize),
    Zbar(usize),
}

impl Slot {
    fn index(self) -> usize {
        match self {
            Slot::Z(v) => 2 * v,
            Slot::Zbar(v) => 2 * v + 1,
        }
    }
}

/// Coefficients of `a z^2 + b zbar^2 + c z zbar + d z + e zbar` for a single
/// variable, spectators frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSymbol {
    log_prefactor: Complex64,
    linear: DVector<Complex64>,
    quadratic: DMatrix<Complex64>,
}

/// `constant + coeffs . w`
#[derive(Debug, Clone)]
struct Affine {
    constant: Complex64,
    coeffs: DVector<Complex64>,
}

impl GaussianSymbol {
    /// The constant symbol `1` over `vars` complex variables.
    pub fn unit(vars: usize) -> Self {
        Self {
            log_prefactor: ZERO,
            linear: DVector::zeros(2 * vars),
            quadratic: DMatrix::zeros(2 * vars, 2 * vars),
        }
    }

    /// `C exp(a z^2 + b zbar^2 + c z zbar + d z + e zbar)` in one variable.
    pub fn single(log_prefactor: Complex64, q: QuadraticCoefficients) -> Self {
        Self::unit(1)
            .with_log_prefactor(log_prefactor)
            .with_quadratic(Slot::Z(0), Slot::Z(0), q.a)
            .with_quadratic(Slot::Zbar(0), Slot::Zbar(0), q.b)
            .with_quadratic(Slot::Z(0), Slot::Zbar(0), q.c)
            .with_linear(Slot::Z(0), q.d)
            .with_linear(Slot::Zbar(0), q.e)
    }

    /// Multiplies by `exp(log)`.
    pub fn with_log_prefactor(mut self, log: Complex64) -> Self {
        self.log_prefactor += log;
        self
    }

    /// Multiplies by a nonzero constant.
    pub fn with_prefactor(self, factor: Complex64) -> Self {
        self.with_log_prefactor(factor.ln())
    }

    /// Adds `coef * w_slot` to the exponent.
    pub fn with_linear(mut self, slot: Slot, coef: Complex64) -> Self {
        self.linear[slot.index()] += coef;
        self
    }

    /// Adds `coef * w_s * w_t` to the exponent.
    pub fn with_quadratic(mut self, s: Slot, t: Slot, coef: Complex64) -> Self {
        let (i, j) = (s.index(), t.index());
        if i == j {
            self.quadratic[(i, i)] += 2.0 * coef;
        } else {
            self.quadratic[(i, j)] += coef;
            self.quadratic[(j, i)] += coef;
        }
        self
    }

    /// Adds `coef * (z_a - z_b)(zbar_a - zbar_b)` to the exponent.
    pub fn with_distance_sqr(self, a: usize, b: usize, coef: Complex64) -> Self {
        self.with_quadratic(Slot::Z(a), Slot::Zbar(a), coef)
            .with_quadratic(Slot::Z(b), Slot::Zbar(b), coef)
            .with_quadratic(Slot::Z(a), Slot::Zbar(b), -coef)
            .with_quadratic(Slot::Z(b), Slot::Zbar(a), -coef)
    }

    pub fn vars(&self) -> usize {
        self.linear.len() / 2
    }

    pub fn log_prefactor(&self) -> Complex64 {
        self.log_prefactor
    }

    /// Coefficient of `w_s w_t` in the exponent.
    pub fn quadratic_coefficient(&self, s: Slot, t: Slot) -> Complex64 {
        let (i, j) = (s.index(), t.index());
        if i == j {
            self.quadratic[(i, i)] / 2.0
        } else {
            self.quadratic[(i, j)]
        }
    }

    pub fn linear_coefficient(&self, s: Slot) -> Complex64 {
        self.linear[s.index()]
    }

    /// Coefficients in `var` with every other slot set to zero.
    pub fn coefficients(&self, var: usize) -> QuadraticCoefficients {
        QuadraticCoefficients {
            a: self.quadratic_coefficient(Slot::Z(var), Slot::Z(var)),
            b: self.quadratic_coefficient(Slot::Zbar(var), Slot::Zbar(var)),
            c: self.quadratic_coefficient(Slot::Z(var), Slot::Zbar(var)),
            d: self.linear_coefficient(Slot::Z(var)),
            e: self.linear_coefficient(Slot::Zbar(var)),
        }
    }

    fn slots(&self, point: &[Complex64]) -> Result<DVector<Complex64>> {
        if point.len() != self.vars() {
            return Err(Error::DimensionMismatch {
                expected: self.vars(),
                found: point.len(),
            });
        }
        Ok(DVector::from_iterator(
            2 * point.len(),
            point.iter().flat_map(|z| [*z, z.conj()]),
        ))
    }

    fn exponent_at(&self, w: &DVector<Complex64>) -> Complex64 {
        self.log_prefactor + self.linear.dot(w) + 0.5 * w.dot(&(&self.quadratic * w))
    }

    /// Logarithm of the symbol at `point` (one complex value per variable,
    /// antiholomorphic slots take the conjugates).
    pub fn log_eval(&self, point: &[Complex64]) -> Result<Complex64> {
        Ok(self.exponent_at(&self.slots(point)?))
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        Ok(self.log_eval(point)?.exp())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(Self {
            log_prefactor: self.log_prefactor + other.log_prefactor,
            linear: &self.linear + &other.linear,
            quadratic: &self.quadratic + &other.quadratic,
        })
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.vars() != other.vars() {
            return Err(Error::DimensionMismatch {
                expected: self.vars(),
                found: other.vars(),
            });
        }
        Ok(())
    }

    fn check_var(&self, var: usize) -> Result<()> {
        if var >= self.vars() {
            return Err(Error::invalid("var", format!("variable {var} out of range 0..{}", self.vars())));
        }
        Ok(())
    }

    /// Derivative of the exponent along `slot`, an affine function of `w`.
    fn gradient(&self, slot: Slot) -> Affine {
        let i = slot.index();
        Affine {
            constant: self.linear[i],
            coeffs: self.quadratic.row(i).transpose(),
        }
    }

    /// Adds `scale * p * q` to the exponent.
    fn add_product(&mut self, p: &Affine, q: &Affine, scale: Complex64) {
        self.log_prefactor += scale * p.constant * q.constant;
        self.linear += (&q.coeffs * p.constant + &p.coeffs * q.constant) * scale;
        self.quadratic += (&p.coeffs * q.coeffs.transpose() + &q.coeffs * p.coeffs.transpose()) * scale;
    }

    /// Integral over the plane of `var` with measure `d(Re z) d(Im z)`.
    ///
    /// Requires the real part of the quadratic form in `(Re z, Im z)` to be
    /// negative definite.
    pub fn integrate_plane(&self, var: usize) -> Result<Self> {
        self.check_var(var)?;
        let n = 2 * self.vars();
        let (u, v) = (Slot::Z(var).index(), Slot::Zbar(var).index());
        let rest: Vec<usize> = (0..n).filter(|&i| i != u && i != v).collect();

        // (z, zbar) = C (s, t)
        let c = Matrix2::new(ONE, I, ONE, -I);
        let q_bb = Matrix2::new(
            self.quadratic[(u, u)],
            self.quadratic[(u, v)],
            self.quadratic[(v, u)],
            self.quadratic[(v, v)],
        );
        let a = -(c.transpose() * q_bb * c);
        let re = a.map(|x| x.re);
        if !(re[(0, 0)] > 0.0 && re.determinant() > 0.0) {
            return Err(Error::NonIntegrable {
                reason: format!(
                    "real part of the form in variable {var} is not negative definite: \
                     [[{}, {}], [{}, {}]]",
                    -re[(0, 0)],
                    -re[(0, 1)],
                    -re[(1, 0)],
                    -re[(1, 1)]
                ),
            });
        }
        let pivot1 = a[(0, 0)];
        let pivot2 = a[(1, 1)] - a[(0, 1)] * a[(1, 0)] / pivot1;
        let a_inv = a
            .try_inverse()
            .ok_or_else(|| Error::NonIntegrable {
                reason: "singular quadratic form".into(),
            })?;
        let m = c * a_inv * c.transpose();

        let l_b = nalgebra::Vector2::new(self.linear[u], self.linear[v]);
        let q_br = DMatrix::from_fn(2, rest.len(), |i, j| self.quadratic[([u, v][i], rest[j])]);
        let q_rr = DMatrix::from_fn(rest.len(), rest.len(), |i, j| self.quadratic[(rest[i], rest[j])]);
        let l_r = DVector::from_iterator(rest.len(), rest.iter().map(|&i| self.linear[i]));

        let m_dyn = DMatrix::from_fn(2, 2, |i, j| m[(i, j)]);
        let l_b_dyn = DVector::from_column_slice(l_b.as_slice());
        let quadratic = q_rr + q_br.transpose() * &m_dyn * &q_br;
        let linear = l_r + q_br.transpose() * (&m_dyn * &l_b_dyn);
        let log_prefactor = self.log_prefactor + Complex64::new((2.0 * PI).ln(), 0.0)
            - 0.5 * pivot1.ln()
            - 0.5 * pivot2.ln()
            + 0.5 * l_b.dot(&(m * l_b));

        Ok(Self {
            log_prefactor,
            linear,
            quadratic,
        })
    }
}

/// Closed-form star product over variable `var`.
pub fn star(f: &GaussianSymbol, g: &GaussianSymbol, var: usize) -> Result<GaussianSymbol> {
    star_product(f, g, var, true)
}

fn star_product(f: &GaussianSymbol, g: &GaussianSymbol, var: usize, with_star: bool) -> Result<GaussianSymbol> {
    f.check_vars(g)?;
    f.check_var(var)?;
    let mut out = f.mul(g)?;
    if !with_star {
        return Ok(out);
    }
    let k1 = f.gradient(Slot::Zbar(var));
    let k2 = g.gradient(Slot::Z(var));
    let b_f = f.quadratic_coefficient(Slot::Zbar(var), Slot::Zbar(var));
    let a_g = g.quadratic_coefficient(Slot::Z(var), Slot::Z(var));
    let coupling = 4.0 * a_g * b_f;
    let denom = ONE - coupling;
    if denom.norm() < 1e-12 {
        return Err(Error::DegenerateStar { coupling });
    }
    let inv = denom.inv();
    out.add_product(&k1, &k2, inv);
    out.add_product(&k1, &k1, a_g * inv);
    out.add_product(&k2, &k2, b_f * inv);
    out.log_prefactor -= 0.5 * denom.ln();
    Ok(out)
}

/// Star product followed by integration over `var` with measure
/// `theta dz dzbar / (2 pi) = dx dy / (2 pi)`.
pub fn star_integral(
    f: &GaussianSymbol,
    g: &GaussianSymbol,
    var: usize,
    params: &PhysicalParams,
) -> Result<GaussianSymbol> {
    integrate_position(&star(f, g, var)?, var, params)
}

/// The same integral with the star replaced by the pointwise product.
pub fn product_integral(
    f: &GaussianSymbol,
    g: &GaussianSymbol,
    var: usize,
    params: &PhysicalParams,
) -> Result<GaussianSymbol> {
    integrate_position(&star_product(f, g, var, false)?, var, params)
}

/// Integral over `var` with measure `dx dy / (2 pi)`.
pub fn integrate_position(h: &GaussianSymbol, var: usize, params: &PhysicalParams) -> Result<GaussianSymbol> {
    Ok(h.integrate_plane(var)?
        .with_log_prefactor(Complex64::new((params.theta() / PI).ln(), 0.0)))
}

/// A polynomial in `(z, zbar)` of one active variable times a Gaussian
/// symbol. Only used by the series oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGaussian {
    /// `coeffs[i][j]` multiplies `z^i zbar^j`.
    coeffs: Vec<Vec<Complex64>>,
    var: usize,
    gaussian: GaussianSymbol,
}

impl PolyGaussian {
    pub fn new(coeffs: Vec<Vec<Complex64>>, var: usize, gaussian: GaussianSymbol) -> Result<Self> {
        gaussian.check_var(var)?;
        Ok(Self { coeffs, var, gaussian })
    }

    /// `z^i zbar^j` in a single variable.
    pub fn monomial(i: usize, j: usize) -> Self {
        let mut coeffs = vec![vec![ZERO; j + 1]; i + 1];
        coeffs[i][j] = ONE;
        Self {
            coeffs,
            var: 0,
            gaussian: GaussianSymbol::unit(1),
        }
    }

    pub fn from_gaussian(gaussian: GaussianSymbol, var: usize) -> Result<Self> {
        Self::new(vec![vec![ONE]], var, gaussian)
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        let z = point[self.var];
        let zb = z.conj();
        let poly: Complex64 = self
            .coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, c)| c * z.powu(i as u32) * zb.powu(j as u32)))
            .sum();
        Ok(poly * self.gaussian.eval(point)?)
    }

    /// `d^k/d(slot)^k` of the symbol at `point` for `k = 0..=order`, holding
    /// every other slot fixed.
    fn derivatives(&self, slot: Slot, point: &[Complex64], order: usize) -> Result<Vec<Complex64>> {
        let w = self.gaussian.slots(point)?;
        let base = self.gaussian.exponent_at(&w).exp();
        let i = slot.index();
        let w0 = w[i];
        // phi'(w0 + h) = slope + curvature h
        let grad = self.gaussian.gradient(slot);
        let slope = grad.constant + grad.coeffs.dot(&w);
        let curvature = self.gaussian.quadratic[(i, i)];

        // the polynomial restricted to this slot, as a polynomial in h
        let other = match slot {
            Slot::Z(_) => w[i + 1],
            Slot::Zbar(_) => w[i - 1],
        };
        let mut in_slot: Vec<Complex64> = Vec::new();
        for (a, row) in self.coeffs.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                let (own, rest) = match slot {
                    Slot::Z(_) => (a, b),
                    Slot::Zbar(_) => (b, a),
                };
                if in_slot.len() <= own {
                    in_slot.resize(own + 1, ZERO);
                }
                in_slot[own] += c * other.powu(rest as u32);
            }
        }
        let mut poly = taylor_shift(&in_slot, w0);

        let mut out = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            out.push(poly.first().copied().unwrap_or(ZERO) * base);
            // P <- P' + phi' P
            let mut next = vec![ZERO; poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                if k > 0 {
                    next[k - 1] += c * k as f64;
                }
                next[k] += c * slope;
                next[k + 1] += c * curvature;
            }
            poly = next;
        }
        Ok(out)
    }
}

/// Coefficients of `p(w0 + h)` in powers of `h`.
fn taylor_shift(p: &[Complex64], w0: Complex64) -> Vec<Complex64> {
    let mut out = p.to_vec();
    let n = out.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            let upper = out[k + 1];
            out[k] += w0 * upper;
        }
    }
    if out.is_empty() {
        out.push(ZERO);
    }
    out
}

/// Partial sum `sum_{k<=order} (1/k!) d_zbar^k f d_z^k g` at `point`, with
/// exact derivatives.
pub fn star_series_oracle(
    f: &GaussianSymbol,
    g: &GaussianSymbol,
    var: usize,
    point: &[Complex64],
    order: usize,
) -> Result<Complex64> {
    star_series_oracle_poly(
        &PolyGaussian::from_gaussian(f.clone(), var)?,
        &PolyGaussian::from_gaussian(g.clone(), var)?,
        point,
        order,
    )
}

/// Series oracle for polynomial-times-Gaussian symbols sharing their
/// active variable.
pub fn star_series_oracle_poly(
    f: &PolyGaussian,
    g: &PolyGaussian,
    point: &[Complex64],
    order: usize,
) -> Result<Complex64> {
    if f.var != g.var {
        return Err(Error::invalid("var", "symbols must share the active variable"));
    }
    let df = f.derivatives(Slot::Zbar(f.var), point, order)?;
    let dg = g.derivatives(Slot::Z(g.var), point, order)?;
    let mut sum = ZERO;
    let mut inv_fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            inv_fact /= k as f64;
        }
        sum += df[k] * dg[k] * inv_fact;
    }
    Ok(sum)
}
