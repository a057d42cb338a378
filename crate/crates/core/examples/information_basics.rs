//! Entropies, mutual information and relative entropies on random states,
//! and their contraction under a random channel.

use nonmarkov::info::{
    conditional_mutual_information, jensen_shannon_telescopic, mutual_information,
    relative_entropy, telescopic_relative_entropy, trace_distance, von_neumann_entropy,
};
use nonmarkov::qstate::{random_channel, random_density_matrix, SystemPartition};

fn main() -> nonmarkov::Result<()> {
    let part = SystemPartition::qubits(&["A", "S", "E"])?;
    let rho = random_density_matrix(part.clone(), 3, 1)?;
    let sigma = random_density_matrix(part, 8, 2)?;

    println!("S(ρ)         = {:.6}", von_neumann_entropy(&rho)?);
    println!("I(A:SE)      = {:.6}", mutual_information(&rho, &["A"], &["S", "E"])?);
    println!("I(A:E|S)     = {:.6}", conditional_mutual_information(&rho, &["A"], &["E"], &["S"])?);

    // a rank-deficient second argument can make the relative entropy infinite
    let pure = random_density_matrix(rho.partition().clone(), 1, 3)?;
    println!("S(ρ||pure)   = {:?}", relative_entropy(&rho, &pure)?);

    let ch = random_channel(2, 2, 4)?;
    let (r2, s2) = (rho.apply_channel(&ch, "E")?, sigma.apply_channel(&ch, "E")?);
    println!("\n              before     after channel on E");
    println!("D(ρ,σ)       {:.6}   {:.6}", trace_distance(&rho, &sigma)?, trace_distance(&r2, &s2)?);
    println!(
        "S(ρ||σ)      {:.6}   {:.6}",
        relative_entropy(&rho, &sigma)?.to_f64(),
        relative_entropy(&r2, &s2)?.to_f64()
    );
    println!(
        "S_0.3(ρ||σ)  {:.6}   {:.6}",
        telescopic_relative_entropy(&rho, &sigma, 0.3)?,
        telescopic_relative_entropy(&r2, &s2, 0.3)?
    );
    println!(
        "D_tele       {:.6}   {:.6}",
        jensen_shannon_telescopic(&rho, &sigma)?,
        jensen_shannon_telescopic(&r2, &s2)?
    );
    Ok(())
}
