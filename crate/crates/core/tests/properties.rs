//! Randomized invariants over seeds and parameters.

use nonmarkov::dephasing::discrete::{leaked_information, DEFAULT_BRANCH_BUDGET};
use nonmarkov::dephasing::{
    build_discrete_model, phase_factors, DephasingParams, EnvKind, EnvPart,
};
use nonmarkov::info::{
    conditional_mutual_information, mutual_information, recovery_check, relative_entropy,
    telescopic_relative_entropy,
};
use nonmarkov::linalg::{kron, max_abs, unitary_from_hamiltonian};
use nonmarkov::measures::{
    measure_lfs, measure_n1, ops_state, positive_increment_integral, uniform_grid, Parties,
    ScalarSeries, StateTrajectory, DEFAULT_NOISE_TOL,
};
use nonmarkov::qstate::{
    haar_random_unitary, random_channel, random_density_matrix, random_hermitian, DensityMatrix,
    SystemPartition,
};
use proptest::prelude::*;

fn q(labels: &[&str]) -> SystemPartition {
    SystemPartition::qubits(labels).unwrap()
}

fn state(labels: &[&str], seed: u64, rank: usize) -> DensityMatrix {
    let p = q(labels);
    let rank = rank.clamp(1, p.dim());
    random_density_matrix(p, rank, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_undoes_tensor(s1 in any::<u64>(), s2 in any::<u64>(), rank in 1usize..5) {
        let rho = state(&["A", "B"], s1, rank);
        let sigma = state(&["C"], s2, 2);
        let back = rho.tensor(&sigma).unwrap().partial_trace(&["A", "B"]).unwrap();
        prop_assert!(max_abs(&(back.data() - rho.data())) < 1e-12);
    }

    #[test]
    fn tensor_is_associative(s in any::<u64>()) {
        let (a, b, c) = (state(&["A"], s, 2), state(&["B"], s ^ 1, 1), state(&["C"], s ^ 2, 2));
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        prop_assert!(max_abs(&(left.data() - right.data())) < 1e-14);
    }

    #[test]
    fn channels_keep_states_valid(s in any::<u64>(), n_kraus in 1usize..5) {
        let rho = state(&["A", "B"], s, 4);
        let ch = random_channel(2, n_kraus, s.wrapping_add(7)).unwrap();
        let out = rho.apply_channel(&ch, "B").unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.eigenvalues().unwrap().iter().all(|&l| l > -1e-10));
    }

    #[test]
    fn haar_unitaries_follow_their_seed(s in any::<u64>()) {
        let u = haar_random_unitary(4, s);
        prop_assert_eq!(&u, &haar_random_unitary(4, s));
        prop_assert!(max_abs(&(u - haar_random_unitary(4, s.wrapping_add(1)))) > 1e-6);
    }

    #[test]
    fn strong_subadditivity(s in any::<u64>(), rank in 1usize..9) {
        let rho = state(&["A", "E", "S"], s, rank);
        prop_assert!(conditional_mutual_information(&rho, &["A"], &["E"], &["S"]).unwrap() >= -1e-9);
    }

    #[test]
    fn cmi_ignores_local_unitaries(s in any::<u64>()) {
        let rho = state(&["A", "S", "E"], s, 3);
        let before = conditional_mutual_information(&rho, &["A"], &["E"], &["S"]).unwrap();
        let u = kron(&haar_random_unitary(2, s ^ 3), &haar_random_unitary(2, s ^ 4));
        let moved = rho.apply_unitary(&u, &["S", "E"]).unwrap();
        let after = conditional_mutual_information(&moved, &["A"], &["E"], &["S"]).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn cmi_ignores_appended_environment(s in any::<u64>()) {
        let rho = state(&["A", "S", "E"], s, 4);
        let extra = state(&["F"], s ^ 9, 2);
        let ext = rho.tensor(&extra).unwrap();
        let a = conditional_mutual_information(&rho, &["A"], &["E"], &["S"]).unwrap();
        let b = conditional_mutual_information(&ext, &["A"], &["E", "F"], &["S"]).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn relative_entropies_contract(s in any::<u64>(), a in 0.05f64..0.95) {
        let rho = state(&["A", "B"], s, 4);
        let sigma = state(&["A", "B"], s ^ 5, 4);
        let ch = random_channel(2, 3, s ^ 6).unwrap();
        let (r2, s2) = (rho.apply_channel(&ch, "B").unwrap(), sigma.apply_channel(&ch, "B").unwrap());
        let d0 = relative_entropy(&rho, &sigma).unwrap().to_f64();
        let d1 = relative_entropy(&r2, &s2).unwrap().to_f64();
        prop_assert!(d1 <= d0 + 1e-9);
        let t0 = telescopic_relative_entropy(&rho, &sigma, a).unwrap();
        let t1 = telescopic_relative_entropy(&r2, &s2, a).unwrap();
        prop_assert!(t1 <= t0 + 1e-9);
    }

    #[test]
    fn cmi_chain_rule(s in any::<u64>(), rank in 1usize..17) {
        let rho = state(&["A", "S", "E1", "E2"], s, rank);
        let whole = conditional_mutual_information(&rho, &["E1", "E2"], &["A"], &["S"]).unwrap();
        let e1 = nonmarkov::info::cmi_of_marginal(&rho, &["E1"], &["A"], &["S"]).unwrap();
        let e2 = conditional_mutual_information(&rho, &["E2"], &["A"], &["S", "E1"]).unwrap();
        prop_assert!((whole - e1 - e2).abs() < 1e-9);
    }

    #[test]
    fn petz_continuity_bound(s in any::<u64>(), rank in 1usize..9) {
        let rho = state(&["A", "B", "C"], s, rank);
        let (_, check) = recovery_check(&rho, &["A"], &["B"], &["C"]).unwrap();
        prop_assert!(check.continuity_margin >= -1e-9);
    }

    #[test]
    fn mutual_information_is_relative_entropy_to_product(s in any::<u64>()) {
        let rho = state(&["A", "B"], s, 3);
        let prod = rho.partial_trace(&["A"]).unwrap().tensor(&rho.partial_trace(&["B"]).unwrap()).unwrap();
        let mi = mutual_information(&rho, &["A"], &["B"]).unwrap();
        prop_assert!((mi - relative_entropy(&rho, &prod).unwrap().to_f64()).abs() < 1e-9);
    }
}

fn closed_trajectory(seed: u64, env: &[&str], steps: usize) -> StateTrajectory {
    let mut labels = vec!["A", "S"];
    labels.extend_from_slice(env);
    let rho = state(&labels, seed, 1);
    let h = random_hermitian(4, seed ^ 11);
    StateTrajectory::from_fn(uniform_grid(0.0, 4.0, steps), move |t| {
        rho.apply_unitary(&unitary_from_hamiltonian(&h, t), &["S", env[0]])
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lfs_balances_n1_on_closed_dynamics(s in any::<u64>()) {
        let traj = closed_trajectory(s, &["E"], 200);
        let lfs = measure_lfs(std::slice::from_ref(&traj), &Parties::default()).unwrap();
        let n1 = measure_n1(&[traj], &Parties::default(), &["E"]).unwrap();
        prop_assert!(lfs.value >= 0.0);
        prop_assert!((lfs.value - n1.value).abs() < 1e-7);
    }

    #[test]
    fn idle_sub_environment_adds_nothing(s in any::<u64>()) {
        let traj = closed_trajectory(s, &["E1", "E2"], 120);
        let p = Parties::default();
        let sub = measure_n1(std::slice::from_ref(&traj), &p, &["E1"]).unwrap();
        let all = measure_n1(&[traj], &p, &["E1", "E2"]).unwrap();
        prop_assert!((sub.value - all.value).abs() < 1e-8);
    }

    #[test]
    fn candidate_order_only_moves_the_index(s in any::<u64>()) {
        let a = closed_trajectory(s, &["E"], 80);
        let b = closed_trajectory(s ^ 1, &["E"], 80);
        let p = Parties::default();
        let ab = measure_lfs(&[a.clone(), b.clone()], &p).unwrap();
        let ba = measure_lfs(&[b, a], &p).unwrap();
        prop_assert_eq!(ab.value, ba.value);
        prop_assert_eq!(ab.best_candidate_index, 1 - ba.best_candidate_index);
    }

    #[test]
    fn increment_integral_is_grid_stable(freq in 0.5f64..3.0) {
        let f = |t: f64| (freq * t).sin();
        let coarse = ScalarSeries::sample(uniform_grid(0.0, 6.0, 600), f).unwrap();
        let fine = ScalarSeries::sample(uniform_grid(0.0, 6.0, 2400), f).unwrap();
        let (c, _) = positive_increment_integral(&coarse, DEFAULT_NOISE_TOL).unwrap();
        let (d, _) = positive_increment_integral(&fine, DEFAULT_NOISE_TOL).unwrap();
        prop_assert!(c >= 0.0);
        prop_assert!((c - d).abs() < 2.0 * freq * 0.01);
    }

    #[test]
    fn phase_factor_magnitudes_are_bounded(t in 0.0f64..5.0, r in 0.0f64..3.0, alpha in 0.0f64..4.0) {
        for kind in [EnvKind::Entangled, EnvKind::Classical] {
            let p = DephasingParams { alpha1: alpha, alpha2: alpha, r, ..DephasingParams::reference(kind) };
            for m in phase_factors(&p, t).unwrap().magnitudes() {
                prop_assert!((0.0..=1.0 + 1e-9).contains(&m));
            }
        }
    }

    #[test]
    fn single_bath_factors_ignore_correlations(t in 0.0f64..5.0, r in 0.0f64..3.0) {
        let e = phase_factors(&DephasingParams { r, ..DephasingParams::reference(EnvKind::Entangled) }, t).unwrap();
        let c = phase_factors(&DephasingParams { r, ..DephasingParams::reference(EnvKind::Classical) }, t).unwrap();
        for j in 0..4 {
            prop_assert!((e.values()[j] - c.values()[j]).norm() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn leaked_information_balances_and_ignores_energies(
        alpha in 5.0f64..40.0,
        r in 0.0f64..0.8,
        eps in 0.1f64..2.0,
        classical in any::<bool>(),
    ) {
        let kind = if classical { EnvKind::Classical } else { EnvKind::Entangled };
        let base = DephasingParams { alpha1: alpha, alpha2: alpha, r, ..DephasingParams::reference(kind) };
        let shifted = DephasingParams { eps1: eps, eps2: 0.5 * eps, ..base.clone() };
        let times = uniform_grid(0.0, 5.0, 40);
        let run = |p: &DephasingParams| {
            let model = build_discrete_model(p, 1, 10).unwrap();
            leaked_information(&model, &ops_state(), &times, DEFAULT_BRANCH_BUDGET).unwrap()
        };
        let (a, b) = (run(&base), run(&shifted));
        let (ia, ib) = (a.cmi(EnvPart::E1E2).unwrap(), b.cmi(EnvPart::E1E2).unwrap());
        let sa = a.mutual_sa().unwrap();
        for k in 0..times.len() {
            prop_assert!((ia.values()[k] - ib.values()[k]).abs() < 1e-12);
            if k > 0 {
                let d = sa.values()[k] - sa.values()[k - 1] + ia.values()[k] - ia.values()[k - 1];
                prop_assert!(d.abs() < 1e-8);
            }
        }
    }
}
