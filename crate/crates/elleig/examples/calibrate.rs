use elleig::geometry::{Convention, EllipseShape};
use elleig::mp::{format_decimal, matched_digits, PrecisionContext};
use elleig::solver::SolverConfig;
use rug::Float;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let e = args.get(1).map(String::as_str).unwrap_or("0.9998");
    let digits: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(60);

    let ctx = PrecisionContext::new(digits + 20).unwrap();
    let shape = EllipseShape::from_decimal(e, Convention::ConstantSemiMajor).unwrap();
    let eps = shape.stretch(&ctx);
    println!("e = {e}, eps = {}", format_decimal(&eps, 12));

    let t0 = Instant::now();
    let config = SolverConfig::new(digits);
    let rec = elleig::solver::solve_fundamental(&shape, &config, &ctx).unwrap();
    println!(
        "lambda' = {}  (M = {}, {:.1?})",
        format_decimal(&rec.eigenvalue, digits as usize),
        rec.meta.basis_size,
        t0.elapsed()
    );

    let series = elleig::expansions::asymptotic_lambda_prime(&eps, &ctx).unwrap();
    let agree = matched_digits(&rec.eigenvalue, &series, digits + 10);
    let eps_f = eps.to_f64();
    println!(
        "agreement with eps^5 series: {agree} digits (series trusted to ~{:.0})",
        -(0.1 * eps_f.powi(8)).log10()
    );

    let resid = elleig::solver::boundary_residual(
        &shape,
        &rec.eigenvalue,
        rec.meta.basis_size as usize,
        rec.meta.distribution,
        &ctx,
    )
    .unwrap();
    let resid_log = if resid.is_zero() {
        f64::NEG_INFINITY
    } else {
        Float::with_val(53, resid.log10_ref()).to_f64()
    };
    println!("midpoint residual / center amplitude: 1e{resid_log:.0}");
}
