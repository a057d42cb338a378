//! Runs the randomized identity suite, the special-function checks and a
//! dense cross-check of the branch method, printing each report.
//!
//! Usage: `cargo run --example oracle_suites [seed] [samples]`

use nonmarkov::dephasing::{build_discrete_model, DephasingParams, EnvKind};
use nonmarkov::measures::{ops_state, uniform_grid};
use nonmarkov::oracle::{dense_dephasing_check, identity_suite, special_function_suite, SuiteReport};

fn show(title: &str, report: &SuiteReport) {
    println!("{title} (seed {})", report.seed);
    for c in &report.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!("  {mark} {:<32} n={:<5} {:.2e} ≤ {:.0e}", c.name, c.samples, c.max_violation, c.tolerance);
    }
}

fn main() -> nonmarkov::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer argument"));
    let seed = args.next().unwrap_or(1);
    let samples = args.next().unwrap_or(200) as usize;

    show("identities", &identity_suite(seed, samples)?);
    show("special functions", &special_function_suite(seed)?);

    let params = DephasingParams {
        alpha1: 30.0,
        alpha2: 30.0,
        r: 0.5,
        ..DephasingParams::reference(EnvKind::Entangled)
    };
    let model = build_discrete_model(&params, 1, 5)?;
    let report = dense_dephasing_check(&model, &ops_state(), &uniform_grid(0.0, 5.0, 10))?;
    show("dense vs branch", &report);
    Ok(())
}
