//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use ncpath::fock::PhysicalParams;
use ncpath::hilbert::{FockOperator, MomentumPoint, PlanePoint};
use ncpath::oracles::completeness::{
    check_momentum_completeness, check_position_product_completeness, check_position_star_completeness,
};
use ncpath::oracles::quadrature::QuadratureSpec;
use ncpath::oracles::suite::heisenberg_errors;
use ncpath::oracles::superop::{oracle_ladder_cases, LadderCase};
use ncpath::propagator::{
    closed_form_kernel, commutative_kernel, compose, short_time_slice, sliced_kernel, KernelParams, SliceSchedule,
};
use ncpath::star::{star, star_integral, star_series_oracle};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

struct Outcome {
    pass: bool,
    summary: String,
}

fn verdict(worst: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        pass: worst <= tol,
        summary: format!("{what}: max error {worst:.3e} (tol {tol:.0e})"),
    }
}

/// Sliced kernel equals the closed form for every slicing.
fn closed_form_reproduction() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let m = rng.gen_range(0.2..5.0);
        let theta = rng.gen_range(0.05..3.0);
        let t = rng.gen_range(0.01..5.0);
        let params = KernelParams::new(m, theta).unwrap();
        let from = PlanePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let to = PlanePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let k = closed_form_kernel(params, t, &from, &to).unwrap();
        for n in [0, 1, 2, 4, 16, 1000] {
            let s = sliced_kernel(params, &SliceSchedule::from_total(n, t).unwrap(), &from, &to).unwrap();
            worst = worst.max(rel(s, k));
        }
    }
    verdict(worst, 1e-10, "50 tuples x n in {0,1,2,4,16,1000}")
}

/// One and two compositions against the hand-derived prefactors and widths.
fn worked_compositions() -> Outcome {
    let mut worst: f64 = 0.0;
    for (m, theta, tau) in [(1.0, 1.0, 1.0), (2.0, 0.5, 0.1), (0.7, 1.3, 2.5), (3.0, 0.01, 0.2)] {
        let params = KernelParams::new(m, theta).unwrap();
        let s = short_time_slice(params, tau).unwrap();
        let beta = s.width();
        let one = compose(&s, &s, params).unwrap();
        let n1 = 2.0 * PI * m / c(m * theta, 2.0 * tau);
        let b1 = beta / (2.0 * (1.0 - theta * beta));
        let two = compose(&s, &one, params).unwrap();
        let n2 = 4.0 * PI * PI * m / c(m * theta, 3.0 * tau);
        let b2 = beta / (3.0 - 4.0 * theta * beta);
        for (a, b) in [(one.prefactor(), n1), (one.width(), b1), (two.prefactor(), n2), (two.width(), b2)] {
            worst = worst.max(rel(a, b));
        }
    }
    verdict(worst, 1e-12, "n=1 and n=2 prefactors and widths, 4 parameter sets")
}

/// Truncated superoperator evolution against the closed form.
fn superoperator_oracle() -> Outcome {
    let params = PhysicalParams::new(1.0, 1.0).unwrap();
    let r = 1.5 / 2f64.sqrt();
    let points = [c(0.0, 0.0), c(1.5, 0.0), c(0.0, -1.5), c(r, r), c(-0.7, 0.4)];
    let mut cases = Vec::new();
    for t in [0.1, 0.5, 1.0] {
        for (i, &z0) in points.iter().enumerate() {
            for &zf in &points[i..] {
                cases.push(LadderCase { total_time: t, z0, zf });
            }
        }
    }
    let reports = oracle_ladder_cases(&params, &cases, &[16, 24, 32], 1e-4, 1e-6);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (case, report) in cases.iter().zip(reports) {
        match report {
            Ok(r) => worst = worst.max(r.final_rel_err()),
            Err(e) => failures.push(format!("T={} z0={} zf={}: {e}", case.total_time, case.z0, case.zf)),
        }
    }
    let mut out = verdict(worst, 1e-4, &format!("{} cases at D=32, monotone over D in {{16,24,32}}", cases.len()));
    if !failures.is_empty() {
        out.pass = false;
        out.summary = format!("{}; {} ladders failed, first: {}", out.summary, failures.len(), failures[0]);
    }
    out
}

/// Momentum completeness on a 5 x 5 grid of endpoints.
fn momentum_completeness() -> Outcome {
    let grid = [c(0.0, 0.0), c(0.5, 0.0), c(0.0, -0.5), c(1.0, 0.5), c(-1.2, 0.3)];
    let mut worst: f64 = 0.0;
    for theta in [1.0, 0.25] {
        let params = PhysicalParams::new(1.0, theta).unwrap();
        for &z in &grid {
            for &w in &grid {
                let quad = QuadratureSpec::for_momentum_completeness(z, w, &params, 1e-10);
                let r = check_momentum_completeness(z, w, &params, &quad).unwrap();
                worst = worst.max(r.error());
            }
        }
    }
    verdict(worst, 1e-8, "5x5 grid, theta in {1, 0.25}")
}

/// Smeared position completeness with the star, and its star-free control.
fn star_completeness() -> Outcome {
    let tol = 1e-8;
    let mut worst: f64 = 0.0;
    for theta in [1.0, 0.5] {
        let params = PhysicalParams::new(1.0, theta).unwrap();
        for (p, pp) in [
            (MomentumPoint::new(1.0, 0.0), MomentumPoint::new(1.0, 0.0)),
            (MomentumPoint::new(1.0, 0.0), MomentumPoint::new(0.0, 1.0)),
            (MomentumPoint::new(0.3, -0.2), MomentumPoint::new(0.33, -0.17)),
        ] {
            let quad = QuadratureSpec::for_star_completeness(&p, &pp, &params, tol).unwrap();
            let r = check_position_star_completeness(&p, &pp, &params, &quad).unwrap();
            worst = worst.max(r.error());
        }
    }
    let params = PhysicalParams::new(1.0, 1.0).unwrap();
    let p = MomentumPoint::new(1.0, 0.0);
    let quad = QuadratureSpec::for_star_completeness(&p, &p, &params, tol).unwrap();
    let control = check_position_product_completeness(&p, &p, &params, &quad).unwrap().error();
    Outcome {
        pass: worst <= tol && control >= 10.0 * tol,
        summary: format!(
            "star: max error {worst:.3e} (tol {tol:.0e}); star-free control error {control:.3e} (needs >= {:.0e})",
            10.0 * tol
        ),
    }
}

/// Magnitude of the kernel at T = 0 and at coincident points.
fn uv_cutoff() -> Outcome {
    let origin = PlanePoint::new(0.0, 0.0);
    let mut worst: f64 = 0.0;
    let mut finite = true;
    for theta in [0.1, 0.5, 1.0, 3.0] {
        for m in [0.5, 1.0, 2.0] {
            let params = KernelParams::new(m, theta).unwrap();
            for i in 0..=40 {
                let dx = 0.25 * i as f64;
                let k = closed_form_kernel(params, 0.0, &origin, &PlanePoint::new(dx * 0.6, dx * 0.8)).unwrap();
                finite &= k.re.is_finite() && k.im.is_finite();
                let expect = (-dx * dx / (2.0 * theta)).exp() / theta;
                worst = worst.max((k.norm() - expect).abs() / expect);
            }
            for i in 0..=40 {
                let t = 0.25 * i as f64;
                let k = closed_form_kernel(params, t, &origin, &origin).unwrap();
                let expect = m / (m * m * theta * theta + t * t).sqrt();
                worst = worst.max((k.norm() - expect).abs() / expect);
            }
        }
    }
    let mut out = verdict(worst, 1e-12, "|K(dx,0)| and |K(0,T)| over 4x3x41 grids each");
    out.pass &= finite;
    out
}

/// Linear approach to the commutative kernel.
fn commutative_limit() -> Outcome {
    let from = PlanePoint::new(0.0, 0.0);
    let to = PlanePoint::new(1.0, 0.0);
    let k0 = commutative_kernel(1.0, 1.0, &from, &to).unwrap();
    let errs: Vec<f64> = [1e-2, 1e-4, 1e-6]
        .iter()
        .map(|&theta| (closed_form_kernel(KernelParams::new(1.0, theta).unwrap(), 1.0, &from, &to).unwrap() - k0).norm())
        .collect();
    let ratios = [errs[1] / errs[0], errs[2] / errs[1]];
    let pass = ratios.iter().all(|r| (r / 1e-2 - 1.0).abs() <= 0.1);
    Outcome {
        pass,
        summary: format!(
            "errors {:.3e}, {:.3e}, {:.3e}; successive ratios {:.4e}, {:.4e} (expect 1e-2 within 10%)",
            errs[0], errs[1], errs[2], ratios[0], ratios[1]
        ),
    }
}

/// Closed-form star against the truncated series, and composition against
/// star-then-integrate.
fn star_closed_form() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(8);
    let params = PhysicalParams::new(1.0, 1.0).unwrap();
    let left = short_time_slice(params, 0.4).unwrap();
    let right = short_time_slice(params, 0.9).unwrap();
    // vars: 0 = start, 1 = shared point, 2 = end
    let f = left.to_symbol(3, 1, 2, &params);
    let g = right.to_symbol(3, 0, 1, &params);
    let closed = star(&f, &g, 1).unwrap();
    let mut series_worst: f64 = 0.0;
    for _ in 0..25 {
        let pt: Vec<Complex64> = (0..3).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let s = star_series_oracle(&f, &g, 1, &pt, 30).unwrap();
        series_worst = series_worst.max(rel(s, closed.eval(&pt).unwrap()));
    }

    let mut compose_worst: f64 = 0.0;
    for (m, theta, t1, t2) in [(1.0, 1.0, 0.4, 0.9), (2.0, 0.3, 1.5, 0.2), (0.6, 2.0, 0.05, 3.0)] {
        let params = PhysicalParams::new(m, theta).unwrap();
        let a = short_time_slice(params, t1).unwrap();
        let b = short_time_slice(params, t2).unwrap();
        let glued = compose(&b, &a, params).unwrap();
        let via_star = star_integral(&b.to_symbol(3, 1, 2, &params), &a.to_symbol(3, 0, 1, &params), 1, &params).unwrap();
        for _ in 0..8 {
            let z0 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let z2 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let d2 = 2.0 * theta * (z2 - z0).norm_sqr();
            let expect = glued.eval_with_measure(d2, 1);
            compose_worst = compose_worst.max(rel(via_star.eval(&[z0, z2]).unwrap(), expect));
        }
    }
    Outcome {
        pass: series_worst <= 1e-8 && compose_worst <= 1e-10,
        summary: format!(
            "series K=30 on 25 points: {series_worst:.3e} (tol 1e-8); compose vs star_integral: {compose_worst:.3e} (tol 1e-10)"
        ),
    }
}

/// Position/momentum relations on random operators at D = 32.
fn algebra_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    for (seed, theta) in [(1u64, 1.0), (2, 0.3), (3, 2.5)] {
        let params = PhysicalParams::new(1.0, theta).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let psi = FockOperator::from_matrix(nalgebra::DMatrix::from_fn(32, 32, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }))
        .unwrap();
        for (_, err) in heisenberg_errors(&params, &psi).unwrap() {
            worst = worst.max(err);
        }
    }
    verdict(worst, 1e-10, "8 relations x 3 random operators, D=32")
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("closed-form reproduction", closed_form_reproduction),
        ("worked compositions", worked_compositions),
        ("superoperator oracle", superoperator_oracle),
        ("momentum completeness", momentum_completeness),
        ("star completeness + control", star_completeness),
        ("ultraviolet cutoff", uv_cutoff),
        ("commutative limit", commutative_limit),
        ("star closed form vs series", star_closed_form),
        ("algebra suite", algebra_suite),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        all &= outcome.pass;
        println!(
            "acceptance {} {:<28} {}  {} [{:.1}s]",
            i + 1,
            name,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
