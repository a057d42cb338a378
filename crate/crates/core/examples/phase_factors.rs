//! Magnitudes of the six coherence factors for both bath kinds at
//! `α = 1, ω_c = 0.01, r = 3`, windows `[0, 2.5]` then `[2.5, 5]`.
//!
//! The single-qubit factors coincide. Only the entangled bath lets `|Λ12|`
//! come back once the second qubit starts coupling.

use nonmarkov::dephasing::{phase_factor_series, DephasingParams, EnvKind, PhaseFactors};
use nonmarkov::measures::uniform_grid;

fn main() -> nonmarkov::Result<()> {
    let times = uniform_grid(0.0, 5.0, 20);
    for kind in [EnvKind::Classical, EnvKind::Entangled] {
        let series = phase_factor_series(&DephasingParams::reference(kind), &times)?;
        println!("{kind}");
        print!("{:>6}", "t");
        for name in PhaseFactors::NAMES {
            print!(" {name:>9}");
        }
        println!();
        for (t, pf) in times.iter().zip(&series) {
            print!("{t:>6.2}");
            for m in pf.magnitudes() {
                print!(" {m:>9.5}");
            }
            println!();
        }
        println!();
    }
    Ok(())
}
