//! Leaked information `I(A:E|S)` for entangled and classically correlated
//! baths, from the branch Gram method on a single mode pair.
//!
//! Usage: `cargo run --example leaked_information [alpha] [r]`

use nonmarkov::dephasing::discrete::{leaked_information, DEFAULT_BRANCH_BUDGET};
use nonmarkov::dephasing::{build_discrete_model, DephasingParams, EnvKind, EnvPart};
use nonmarkov::measures::{ops_state, positive_increment_integral, uniform_grid, DEFAULT_NOISE_TOL};

fn main() -> nonmarkov::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let alpha = args.next().unwrap_or(40.0);
    let r = args.next().unwrap_or(1.0);
    let times = uniform_grid(0.0, 5.0, 100);

    for kind in [EnvKind::Entangled, EnvKind::Classical] {
        let params = DephasingParams {
            alpha1: alpha,
            alpha2: alpha,
            r,
            ..DephasingParams::reference(kind)
        };
        let model = build_discrete_model(&params, 1, 12)?;
        let li = leaked_information(&model, &ops_state(), &times, DEFAULT_BRANCH_BUDGET)?;
        let e2 = li.cmi(EnvPart::E2)?;
        let all = li.cmi(EnvPart::E1E2)?;
        println!("{kind}: captured trace {:.6}", model.captured_trace());
        println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "I(A:E1|S)", "I(A:E2|S)", "I(A:E|S)", "I(S:A)");
        let e1 = li.cmi(EnvPart::E1)?;
        let sa = li.mutual_sa()?;
        for k in (0..times.len()).step_by(10) {
            println!(
                "{:>6.2} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6e}",
                times[k], e1.values()[k], e2.values()[k], all.values()[k], sa.values()[k]
            );
        }
        let (n1, _) = positive_increment_integral(&all.negated(), DEFAULT_NOISE_TOL)?;
        println!("N1 (integrated decrease of I(A:E|S)): {n1:.6e}\n");
    }
    Ok(())
}
