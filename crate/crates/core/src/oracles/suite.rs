//! The verification suite behind `ncpath verify`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::fock::{coherent_overlap, coherent_vector, required_dim, FockSpace, PhysicalParams};
use crate::hilbert::{
    apply_momentum, apply_p, apply_p_ddagger, apply_position, interior_rel_err, Axis, FockOperator, MomentumPoint,
    PlanePoint,
};
use crate::oracles::completeness::{
    check_momentum_completeness, check_position_product_completeness, check_position_star_completeness,
};
use crate::oracles::quadrature::QuadratureSpec;
use crate::oracles::report::{CheckRow, SuiteReport};
use crate::oracles::superop::{default_ladder, oracle_ladder_cases, LadderCase};
use crate::propagator::{closed_form_kernel, compose, short_time_slice, sliced_kernel, SliceSchedule};

/// Tolerance for exact algebraic identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Tolerance of the truncated-evolution oracle against the closed form.
pub const ORACLE_TOLERANCE: f64 = 1e-4;
/// Coherent tail allowed on the lower rungs of the D-ladder.
pub const LADDER_TAIL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub params: PhysicalParams,
    pub fock_dim: usize,
    pub tolerance: f64,
    pub total_time: f64,
    pub slices: usize,
    /// `false` swaps the star for the pointwise product in the
    /// star-completeness check.
    pub with_star: bool,
}

/// Runs every check in a fixed order.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let mut rows = Vec::new();
    coherent_overlap_checks(config, &mut rows);
    heisenberg_checks(config, &mut rows);
    momentum_completeness_checks(config, &mut rows);
    star_completeness_checks(config, &mut rows);
    telescoping_checks(config, &mut rows);
    semigroup_checks(config, &mut rows);
    oracle_checks(config, &mut rows);
    SuiteReport { rows }
}

fn fmt_c(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coherent_overlap_checks(config: &SuiteConfig, rows: &mut Vec<CheckRow>) {
    for (z, w) in [(c(0.0, 0.0), c(1.0, 0.0)), (c(0.0, 1.0), c(0.0, -1.0)), (c(0.7, -0.3), c(-0.2, 1.1))] {
        let params = format!("z={};w={}", fmt_c(z), fmt_c(w));
        let mean = z.norm_sqr().max(w.norm_sqr());
        let result = FockSpace::new(required_dim(mean, 1e-16)).and_then(|space| {
            let a = coherent_vector(&space, z)?;
            let b = coherent_vector(&space, w)?;
            a.inner(&b)
        });
        let target = coherent_overlap(z, w);
        rows.push(match result {
            Ok(v) => CheckRow::within(
                "coherent-overlap",
                params,
                v,
                target,
                (v - target).norm() / target.norm(),
                config.tolerance,
            ),
            Err(e) => CheckRow::failed("coherent-overlap", params, config.tolerance, e.to_string()),
        });
    }
}

fn random_operator(dim: usize, seed: u64) -> FockOperator {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    FockOperator::from_matrix(DMatrix::from_fn(dim, dim, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
    .expect("finite entries")
}

/// Interior errors of the position/momentum relations on a random operator.
pub fn heisenberg_errors(params: &PhysicalParams, psi: &FockOperator) -> Result<Vec<(&'static str, f64)>> {
    let x = |p: &FockOperator| apply_position(Axis::X, p, params);
    let y = |p: &FockOperator| apply_position(Axis::Y, p, params);
    let px = |p: &FockOperator| apply_momentum(Axis::X, p, params);
    let py = |p: &FockOperator| apply_momentum(Axis::Y, p, params);
    let theta = params.theta();
    let zero = FockOperator::zeros(psi.dim());
    let psi_norm = interior_rel_err(psi, &zero)?;
    // vanishing right-hand sides are measured against psi
    let rel_to_psi = |lhs: &FockOperator, rhs: &FockOperator| -> Result<f64> {
        let err = interior_rel_err(lhs, rhs)?;
        Ok(if rhs.hs_norm_sqr() == 0.0 { err / psi_norm } else { err })
    };
    let xy = x(&y(psi)?)?.sub(&y(&x(psi)?)?)?;
    let xpx = x(&px(psi)?)?.sub(&px(&x(psi)?)?)?;
    let ypy = y(&py(psi)?)?.sub(&py(&y(psi)?)?)?;
    let xpy = x(&py(psi)?)?.sub(&py(&x(psi)?)?)?;
    let ypx = y(&px(psi)?)?.sub(&px(&y(psi)?)?)?;
    let pxpy = px(&py(psi)?)?.sub(&py(&px(psi)?)?)?;
    let p2 = px(&px(psi)?)?.add(&py(&py(psi)?)?)?;
    let pdp = apply_p_ddagger(&apply_p(psi, params)?, params)?;
    let ppd = apply_p(&apply_p_ddagger(psi, params)?, params)?;
    Ok(vec![
        ("[x,y]=i theta", rel_to_psi(&xy, &psi.scale(c(0.0, theta)))?),
        ("[x,px]=i", rel_to_psi(&xpx, &psi.scale(c(0.0, 1.0)))?),
        ("[y,py]=i", rel_to_psi(&ypy, &psi.scale(c(0.0, 1.0)))?),
        ("[x,py]=0", rel_to_psi(&xpy, &zero)?),
        ("[y,px]=0", rel_to_psi(&ypx, &zero)?),
        ("[px,py]=0", rel_to_psi(&pxpy, &zero)?),
        ("P^2=Pdd P", rel_to_psi(&pdp, &p2)?),
        ("P^2=P Pdd", rel_to_psi(&ppd, &p2)?),
    ])
}

fn heisenberg_checks(config: &SuiteConfig, rows: &mut Vec<CheckRow>) {
    let params = format!("D={};theta={}", config.fock_dim, config.params.theta());
    let result = FockSpace::new(config.fock_dim)
        .and_then(|_| heisenberg_errors(&config.params, &random_operator(config.fock_dim, 2024)));
    match result {
        Ok(errors) => {
            for (relation, err) in errors {
                rows.push(CheckRow::within(
                    "heisenberg-algebra",
                    format!("{params};relation={relation}"),
                    c(err, 0.0),
                    c(0.0, 0.0),
                    err,
                    IDENTITY_TOLERANCE,
                ));
            }
        }
        Err(e) => rows.push(CheckRow::failed("heisenberg-algebra", params, IDENTITY_TOLERANCE, e.to_string())),
    }
}

fn momentum_completeness_checks(config: &SuiteConfig, rows: &mut Vec<CheckRow>) {
    for (z, w) in [(c(0.0, 0.0), c(0.0, 0.0)), (c(1.0, 0.0), c(0.0, 0.0)), (c(0.5, 0.5), c(-0.5, 0.25))] {
        let params = format!("z={};w={};theta={}", fmt_c(z), fmt_c(w), config.params.theta());
        let quad = QuadratureSpec::for_momentum_completeness(z, w, &config.params, config.tolerance);
        rows.push(match check_momentum_completeness(z, w, &config.params, &quad) {
            Ok(r) => CheckRow::within("momentum-completeness", params, r.value, r.target, r.error(), config.tolerance),
            Err(e) => CheckRow::failed("momentum-completeness", params, config.tolerance, e.to_string()),
        });
    }
}

fn star_completeness_checks(config: &SuiteConfig, rows: &mut Vec<CheckRow>) {
    let on = MomentumPoint::new(1.0, 0.0);
    let off = MomentumPoint::new(0.0, 1.0);
    let theta = config.params.theta();
    for (p, pp) in [(on, on), (on, off)] {
        let params = format!(
            "p=({},{});p'=({},{});theta={theta};star={}",
            p.px, p.py, pp.px, pp.py, config.with_star
        );
        let result = QuadratureSpec::for_star_completeness(&p, &pp, &config.params, config.tolerance).and_then(|quad| {
            if config.with_star {
                check_position_star_completeness(&p, &pp, &config.params, &quad)
            } else {
                check_position_product_completeness(&p, &pp, &config.params, &quad)
            }
        });
        rows.push(match result {
            Ok(r) => CheckRow::within("star-completeness", params, r.value, r.target, r.error(), config.tolerance),
            Err(e) => CheckRow::failed("star-completeness", params, config.tolerance, e.to_string()),
        });
    }

    let params = format!("p=({},{});p'=({},{});theta={theta}", on.px, on.py, on.px, on.py);
    let margin = 10.0 * config.tolerance;
    let result = QuadratureSpec::for_star_completeness(&on, &on, &config.params, config.tolerance)
        .and_then(|quad| check_position_product_completeness(&on, &on, &config.params, &quad));
    rows.push(match result {
        Ok(r) => {
            let err = r.error();
            let mut row = CheckRow::within("star-free-control", params, r.value, r.target, err, margin);
            // the control passes when the pointwise product misses the target
            row.pass = err >= margin;
            row
        }
        Err(e) => CheckRow::failed("star-free-control", params, margin, e.to_string()),
    });
}

fn telescoping_checks(config: &SuiteConfig, rows: &mut Vec<CheckRow>) {
    let from = PlanePoint::new(0.0, 0.0);
    let to = PlanePoint::new(1.0, 0.5);
    let t = config.total_time.max(1e-3);
    let mut counts = vec![0, 1, 2, 4, config.slices, 1000];
    counts.sort_unstable();
    counts.dedup();
    let target = closed_form_kernel(config.params, t, &from, &to);
    for n in counts {
        let params = format!("n={n};T={t};dx=(1,0.5)");
        let result = SliceSchedule::from_total(n, t).and_then(|s| sliced_kernel(config.params, &s, &from, &to));
        rows.push(match (result, &target) {
            (Ok(v), Ok(k)) => CheckRow::within("telescoping", params, v, *k, (v - k).norm() / k.norm(), IDENTITY_TOLERANCE),
            (Err(e), _) => CheckRow::failed("telescoping", params, IDENTITY_TOLERANCE, e.to_string()),
            (_, Err(e)) => CheckRow::failed("telescoping", params, IDENTITY_TOLERANCE, e.to_string()),
        });
    }
}

fn semigroup_checks(config: &SuiteConfig, rows: &mut Vec<CheckRow>) {
    let d2 = 0.8;
    for (t1, t2) in [(0.3, 0.7), (0.05, 2.0), (1.0, 1.0)] {
        let params = format!("t1={t1};t2={t2};dx^2={d2}");
        let result = (|| -> Result<(Complex64, Complex64)> {
            let a = short_time_slice(config.params, t1)?;
            let b = short_time_slice(config.params, t2)?;
            let v = compose(&b, &a, config.params)?.eval_with_measure(d2, 1);
            let k = short_time_slice(config.params, t1 + t2)?.eval(d2);
            Ok((v, k))
        })();
        rows.push(match result {
            Ok((v, k)) => CheckRow::within("semigroup", params, v, k, (v - k).norm() / k.norm(), IDENTITY_TOLERANCE),
            Err(e) => CheckRow::failed("semigroup", params, IDENTITY_TOLERANCE, e.to_string()),
        });
    }
}

fn oracle_checks(config: &SuiteConfig, rows: &mut Vec<CheckRow>) {
    let dims = default_ladder(config.fock_dim);
    let cases = [
        LadderCase {
            total_time: 0.5,
            z0: c(0.0, 0.0),
            zf: c(0.0, 0.0),
        },
        LadderCase {
            total_time: 1.0,
            z0: c(1.0, 0.5),
            zf: c(-0.5, 1.0),
        },
    ];
    let reports = oracle_ladder_cases(&config.params, &cases, &dims, ORACLE_TOLERANCE, LADDER_TAIL_TOLERANCE);
    let ladder = dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("/");
    for (case, report) in cases.iter().zip(reports) {
        let params = format!(
            "T={};z0={};zf={};D={ladder}",
            case.total_time,
            fmt_c(case.z0),
            fmt_c(case.zf)
        );
        rows.push(match report {
            Ok(r) => {
                let last = r.rows.last().and_then(|row| row.value).unwrap_or_default();
                CheckRow::within("oracle-vs-closed-form", params, last, r.target, r.final_rel_err(), ORACLE_TOLERANCE)
            }
            Err(e) => CheckRow::failed("oracle-vs-closed-form", params, ORACLE_TOLERANCE, e.to_string()),
        });
    }
}
