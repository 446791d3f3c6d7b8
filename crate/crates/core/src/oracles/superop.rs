//! Superoperators on vectorized Fock operators and the truncated time
//! evolution used as an independent check of the kernel.
//!
//! Operators are vectorized row-major: entry `(j, k)` of a `D x D` operator
//! sits at index `j D + k`. With that convention the Hilbert-Schmidt inner
//! product is the plain Euclidean one, so the superoperator adjoint is the
//! conjugate transpose.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, PhysicalParams};
use crate::hilbert::{apply_p, apply_p_ddagger, hs_inner, position_state, FockOperator, PlanePoint};
use crate::propagator::closed_form_kernel;

/// Errors below this are treated as converged when checking monotonicity.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    entries: DMatrix<Complex64>,
}

pub fn vectorize(psi: &FockOperator) -> DVector<Complex64> {
    let m = psi.matrix();
    let d = psi.dim();
    DVector::from_iterator(d * d, (0..d).flat_map(|j| (0..d).map(move |k| m[(j, k)])))
}

pub fn unvectorize(v: &DVector<Complex64>, dim: usize) -> Result<FockOperator> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: v.len(),
        });
    }
    FockOperator::from_matrix(DMatrix::from_fn(dim, dim, |j, k| v[j * dim + k]))
}

impl SuperOperator {
    pub fn from_matrix(dim: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != dim * dim || entries.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Tabulates a linear action on the basis operators `|j><k|`.
    pub fn from_action<F>(dim: usize, action: F) -> Result<Self>
    where
        F: Fn(&FockOperator) -> Result<FockOperator>,
    {
        let n = dim * dim;
        let mut entries = DMatrix::zeros(n, n);
        for j in 0..dim {
            for k in 0..dim {
                let mut basis = DMatrix::zeros(dim, dim);
                basis[(j, k)] = Complex64::new(1.0, 0.0);
                let image = action(&FockOperator::from_matrix(basis)?)?;
                entries.set_column(j * dim + k, &vectorize(&image));
            }
        }
        Ok(Self { dim, entries })
    }

    /// `psi -> a psi`.
    pub fn left(a: &FockOperator) -> Self {
        let d = a.dim();
        let m = a.matrix();
        let mut entries = DMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for l in 0..d {
                let v = m[(j, l)];
                if v != Complex64::new(0.0, 0.0) {
                    for k in 0..d {
                        entries[(j * d + k, l * d + k)] = v;
                    }
                }
            }
        }
        Self { dim: d, entries }
    }

    /// `psi -> psi a`.
    pub fn right(a: &FockOperator) -> Self {
        let d = a.dim();
        let m = a.matrix();
        let mut entries = DMatrix::zeros(d * d, d * d);
        for l in 0..d {
            for k in 0..d {
                let v = m[(l, k)];
                if v != Complex64::new(0.0, 0.0) {
                    for j in 0..d {
                        entries[(j * d + k, j * d + l)] = v;
                    }
                }
            }
        }
        Self { dim: d, entries }
    }

    /// `psi -> [a, psi]`.
    pub fn commutator(a: &FockOperator) -> Self {
        let l = Self::left(a);
        let r = Self::right(a);
        Self {
            dim: l.dim,
            entries: l.entries - r.entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn apply(&self, psi: &FockOperator) -> Result<FockOperator> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        unvectorize(&(&self.entries * vectorize(psi)), self.dim)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            entries: &self.entries * &other.entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: &self.entries * factor,
        }
    }

    /// Adjoint with respect to the Hilbert-Schmidt inner product
    /// (the `ddagger` of the quantum Hilbert space).
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.adjoint(),
        }
    }

    /// Index sets that the superoperator never mixes: connected components of
    /// its sparsity graph, each sorted.
    pub fn sectors(&self) -> Vec<Vec<usize>> {
        let n = self.entries.nrows();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for r in 0..n {
            for c in 0..n {
                if self.entries[(r, c)] != Complex64::new(0.0, 0.0) {
                    let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// `exp(factor * self)`, computed sector by sector with a
    /// scaling-and-squaring Pade exponential.
    pub fn exp_scaled(&self, factor: Complex64) -> SectorExponential {
        let blocks = self
            .sectors()
            .into_iter()
            .map(|idx| {
                let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.entries[(idx[i], idx[j])] * factor);
                let exp = sub.exp();
                (idx, exp)
            })
            .collect();
        SectorExponential { dim: self.dim, blocks }
    }
}

/// A block-diagonal superoperator exponential.
#[derive(Debug, Clone)]
pub struct SectorExponential {
    dim: usize,
    blocks: Vec<(Vec<usize>, DMatrix<Complex64>)>,
}

impl SectorExponential {
    pub fn apply(&self, psi: &FockOperator) -> Result<FockOperator> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        let v = vectorize(psi);
        let mut out = DVector::zeros(v.len());
        for (idx, block) in &self.blocks {
            let sub = DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]));
            let image = block * sub;
            for (pos, &i) in idx.iter().enumerate() {
                out[i] = image[pos];
            }
        }
        unvectorize(&out, self.dim)
    }

    pub fn to_dense(&self) -> SuperOperator {
        let n = self.dim * self.dim;
        let mut entries = DMatrix::zeros(n, n);
        for (idx, block) in &self.blocks {
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    entries[(i, j)] = block[(a, b)];
                }
            }
        }
        SuperOperator { dim: self.dim, entries }
    }
}

/// Free Hamiltonian `psi -> P^ddagger P psi / 2m` on the truncated space.
pub fn build_hamiltonian_superop(params: &PhysicalParams, space: &FockSpace) -> Result<SuperOperator> {
    if space.dim() < 4 {
        return Err(Error::DimensionTooSmall {
            dim: space.dim(),
            min: 4,
        });
    }
    let scale = Complex64::new(1.0 / (2.0 * params.mass()), 0.0);
    SuperOperator::from_action(space.dim(), |psi| {
        Ok(apply_p_ddagger(&apply_p(psi, params)?, params)?.scale(scale))
    })
}

/// Truncated free evolution, built once per `(params, space)` and reused
/// for any time and endpoints.
#[derive(Debug, Clone)]
pub struct KernelOracle {
    params: PhysicalParams,
    space: FockSpace,
    hamiltonian: SuperOperator,
}

impl KernelOracle {
    pub fn new(params: &PhysicalParams, space: &FockSpace) -> Result<Self> {
        Ok(Self {
            params: *params,
            space: *space,
            hamiltonian: build_hamiltonian_superop(params, space)?,
        })
    }

    pub fn hamiltonian(&self) -> &SuperOperator {
        &self.hamiltonian
    }

    /// `(zf | exp(-i T H) | z0)`.
    pub fn kernel(&self, total_time: f64, z0: Complex64, zf: Complex64) -> Result<Complex64> {
        if !(total_time.is_finite() && total_time >= 0.0) {
            return Err(Error::invalid("time", format!("must be non-negative, got {total_time}")));
        }
        let start = position_state(z0, &self.params, &self.space)?;
        let end = position_state(zf, &self.params, &self.space)?;
        let evolved = self
            .hamiltonian
            .exp_scaled(Complex64::new(0.0, -total_time))
            .apply(&start)?;
        hs_inner(&end, &evolved)
    }
}

/// `(zf | exp(-i T H) | z0)` at truncation `space`.
pub fn evolve_kernel_oracle(
    params: &PhysicalParams,
    total_time: f64,
    z0: Complex64,
    zf: Complex64,
    space: &FockSpace,
) -> Result<Complex64> {
    KernelOracle::new(params, space)?.kernel(total_time, z0, zf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderRow {
    pub dim: usize,
    pub value: Option<Complex64>,
    pub rel_err: f64,
    pub note: String,
}

/// Oracle values against the closed form on a sequence of truncations.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport {
    pub target: Complex64,
    pub tolerance: f64,
    pub rows: Vec<LadderRow>,
}

impl LadderReport {
    /// Each rung at least as good as the previous one, up to roundoff.
    pub fn is_monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].rel_err <= w[0].rel_err || w[1].rel_err <= ROUNDOFF_FLOOR)
    }

    pub fn final_rel_err(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.rel_err)
    }

    pub fn converged(&self) -> bool {
        self.rows.iter().all(|r| r.value.is_some()) && self.is_monotone() && self.final_rel_err() <= self.tolerance
    }

    pub fn table(&self) -> String {
        let mut out = format!("target = {:.12e} {:+.12e}i, tolerance = {:.1e}\n", self.target.re, self.target.im, self.tolerance);
        let _ = writeln!(out, "{:>6}  {:>22}  {:>22}  {:>10}  note", "D", "re", "im", "rel_err");
        for r in &self.rows {
            let (re, im) = r.value.map_or((f64::NAN, f64::NAN), |v| (v.re, v.im));
            let _ = writeln!(out, "{:>6}  {:>22.15e}  {:>22.15e}  {:>10.3e}  {}", r.dim, re, im, r.rel_err, r.note);
        }
        out
    }
}

/// Endpoints and duration for one oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCase {
    pub total_time: f64,
    pub z0: Complex64,
    pub zf: Complex64,
}

/// Runs the oracle on each dimension in `dims` and compares with the closed
/// form. Fails with the error-vs-D table unless the errors decrease and the
/// last one is within `tolerance`.
pub fn oracle_ladder(
    params: &PhysicalParams,
    case: LadderCase,
    dims: &[usize],
    tolerance: f64,
    tail_tolerance: f64,
) -> Result<LadderReport> {
    oracle_ladder_cases(params, &[case], dims, tolerance, tail_tolerance)
        .pop()
        .expect("one case in, one report out")
}

/// [`oracle_ladder`] for several cases, building each truncated
/// Hamiltonian once.
pub fn oracle_ladder_cases(
    params: &PhysicalParams,
    cases: &[LadderCase],
    dims: &[usize],
    tolerance: f64,
    tail_tolerance: f64,
) -> Vec<Result<LadderReport>> {
    let oracles: Vec<(usize, Result<KernelOracle>)> = dims
        .iter()
        .map(|&dim| {
            let oracle = FockSpace::new(dim)
                .map(|s| s.with_tail_tolerance(tail_tolerance))
                .and_then(|space| KernelOracle::new(params, &space));
            (dim, oracle)
        })
        .collect();
    cases
        .iter()
        .map(|case| {
            let target = closed_form_kernel(
                params,
                case.total_time,
                &PlanePoint::from_z(case.z0, params),
                &PlanePoint::from_z(case.zf, params),
            )?;
            let rows = oracles
                .iter()
                .map(|(dim, oracle)| {
                    let attempt = oracle
                        .as_ref()
                        .map_err(Clone::clone)
                        .and_then(|o| o.kernel(case.total_time, case.z0, case.zf));
                    match attempt {
                        Ok(v) => LadderRow {
                            dim: *dim,
                            value: Some(v),
                            rel_err: (v - target).norm() / target.norm(),
                            note: String::new(),
                        },
                        Err(e) => LadderRow {
                            dim: *dim,
                            value: None,
                            rel_err: f64::INFINITY,
                            note: e.to_string(),
                        },
                    }
                })
                .collect();
            let report = LadderReport { target, tolerance, rows };
            if report.converged() {
                Ok(report)
            } else {
                Err(Error::NonConvergence { table: report.table() })
            }
        })
        .collect()
}

/// `{ceil(D/2), ceil(3D/4), D}`, each at least 4, deduplicated.
pub fn default_ladder(dim: usize) -> Vec<usize> {
    let mut dims: Vec<usize> = [dim.div_ceil(2), (3 * dim).div_ceil(4), dim]
        .into_iter()
        .map(|d| d.max(4))
        .collect();
    dims.dedup();
    dims
}
