//! BLP, LFS, N1 and N2 on a system qubit exchanging with one environment
//! qubit under `exp(−i t SWAP)`. The system fully forgets its ancilla at
//! `t = π/2` and gets it back at `t = π`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nonmarkov::linalg::{unitary_from_hamiltonian, CMatrix, CVector, C64};
use nonmarkov::measures::{
    measure_distance_blp, measure_lfs, measure_n1, measure_n2, uniform_grid, Distance, Parties,
    StateTrajectory,
};
use nonmarkov::qstate::{DensityMatrix, SystemPartition};

fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

fn main() -> nonmarkov::Result<()> {
    let times = uniform_grid(0.0, PI, 400);
    let h = swap();

    // |Φ+⟩ on A,S with E in |0⟩
    let mut v = CVector::zeros(8);
    v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[6] = C64::new(FRAC_1_SQRT_2, 0.0);
    let start = DensityMatrix::from_pure(&v, SystemPartition::qubits(&["A", "S", "E"])?)?;
    let evolve = |rho: &DensityMatrix| {
        let rho = rho.clone();
        let h = h.clone();
        StateTrajectory::from_fn(times.clone(), move |t| {
            rho.apply_unitary(&unitary_from_hamiltonian(&h, t), &["S", "E"])
        })
    };
    let traj = evolve(&start)?;
    let parties = Parties::default();

    // two orthogonal system states for the distance measures
    let flip = |k: usize| -> nonmarkov::Result<StateTrajectory> {
        let rho = DensityMatrix::basis(SystemPartition::qubits(&["S", "E"])?, 2 * k)?;
        let t = evolve(&rho.tensor(&DensityMatrix::basis(SystemPartition::qubits(&["A"])?, 0)?)?)?;
        let states = t.states().iter().map(|s| s.partial_trace(&["S"])).collect::<Result<Vec<_>, _>>()?;
        StateTrajectory::new(t.times().to_vec(), states)
    };
    let pair = (flip(0)?, flip(1)?);

    let ap = DensityMatrix::maximally_mixed(SystemPartition::new([("A'", 3)])?);
    let extended = StateTrajectory::new(
        traj.times().to_vec(),
        traj.states().iter().map(|s| s.tensor(&ap)).collect::<Result<Vec<_>, _>>()?,
    )?;

    let results = [
        measure_distance_blp(std::slice::from_ref(&pair), Distance::Trace)?,
        measure_distance_blp(std::slice::from_ref(&pair), Distance::Telescopic)?,
        measure_lfs(std::slice::from_ref(&traj), &parties)?,
        measure_n1(std::slice::from_ref(&traj), &parties, &["E"])?,
        measure_n2(&[extended], &parties, "A'", &["E"])?,
    ];
    for r in results {
        println!("{:<5} {:.6}", r.measure_name.to_string(), r.value);
    }
    println!("2 ln 2 = {:.6}", 2.0 * std::f64::consts::LN_2);
    Ok(())
}
