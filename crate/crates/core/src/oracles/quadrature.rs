//! Two-dimensional quadrature over a square `[-R, R]^2` with composite
//! Gauss-Legendre rules.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureRule {
    /// Fixed composite rule; the error estimate comes from one extra pass
    /// with twice as many panels.
    TensorGaussLegendre { panels: usize, order: usize },
    /// Doubles the panel count from `panels` until the estimate meets the
    /// tolerance, at most `max_doublings` times.
    Adaptive {
        panels: usize,
        order: usize,
        max_doublings: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub radius: f64,
    pub rule: QuadratureRule,
    pub tolerance: f64,
    /// Width of the unit-mass Gaussian used to smear delta-valued targets.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::invalid("radius", format!("must be positive, got {}", self.radius)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", format!("must be positive, got {}", self.tolerance)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::invalid("sigma", format!("must be positive, got {}", self.sigma)));
        }
        let (panels, order) = match self.rule {
            QuadratureRule::TensorGaussLegendre { panels, order } => (panels, order),
            QuadratureRule::Adaptive { panels, order, .. } => (panels, order),
        };
        if panels == 0 || order < 2 {
            return Err(Error::invalid("rule", "need at least one panel and two nodes"));
        }
        Ok(())
    }

    /// Fails unless the square reaches `required`.
    pub fn check_radius(&self, required: f64) -> Result<()> {
        if self.radius < required {
            return Err(Error::QuadratureTail {
                radius: self.radius,
                required,
            });
        }
        Ok(())
    }

    /// Integrates `f(x, y) dx dy` over the square. Succeeds when the error
    /// estimate is at most `tolerance * scale`.
    pub fn integrate<F>(&self, scale: f64, f: F) -> Result<QuadratureResult>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        self.validate()?;
        let limit = self.tolerance * scale;
        match self.rule {
            QuadratureRule::TensorGaussLegendre { panels, order } => {
                let coarse = tensor_rule(self.radius, panels, order, &f);
                let fine = tensor_rule(self.radius, 2 * panels, order, &f);
                let result = QuadratureResult {
                    value: fine.0,
                    error_estimate: (fine.0 - coarse.0).norm(),
                    evaluations: coarse.1 + fine.1,
                };
                finish(result, limit)
            }
            QuadratureRule::Adaptive {
                panels,
                order,
                max_doublings,
            } => {
                let mut prev = tensor_rule(self.radius, panels, order, &f);
                let mut evaluations = prev.1;
                let mut p = panels;
                let mut result = None;
                for _ in 0..=max_doublings {
                    p *= 2;
                    let next = tensor_rule(self.radius, p, order, &f);
                    evaluations += next.1;
                    let r = QuadratureResult {
                        value: next.0,
                        error_estimate: (next.0 - prev.0).norm(),
                        evaluations,
                    };
                    if r.error_estimate <= limit {
                        return Ok(r);
                    }
                    result = Some(r);
                    prev = next;
                }
                finish(result.expect("at least one refinement"), limit)
            }
        }
    }
}

fn finish(result: QuadratureResult, limit: f64) -> Result<QuadratureResult> {
    if result.error_estimate <= limit {
        Ok(result)
    } else {
        Err(Error::QuadratureTolerance {
            estimate: result.error_estimate,
            tolerance: limit,
        })
    }
}

/// Composite Gauss-Legendre nodes and weights on `[-r, r]`.
pub fn composite_nodes(radius: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(2)).expect("nonzero order"));
    let width = 2.0 * radius / panels as f64;
    let half = width / 2.0;
    (0..panels)
        .flat_map(|k| {
            let mid = -radius + (k as f64 + 0.5) * width;
            rule.as_node_weight_pairs()
                .iter()
                .map(move |&(t, w)| (mid + half * t, half * w))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Tensor-product rule. Rows are summed in parallel and then combined in
/// order, so the result does not depend on scheduling.
fn tensor_rule<F>(radius: f64, panels: usize, order: usize, f: &F) -> (Complex64, usize)
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let nodes = composite_nodes(radius, panels, order);
    let rows: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(x, wx)| nodes.iter().map(|&(y, wy)| f(x, y) * (wx * wy)).sum::<Complex64>())
        .collect();
    (rows.into_iter().sum(), nodes.len() * nodes.len())
}
