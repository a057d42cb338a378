//! Non-Markovianity measures evaluated on sampled trajectories.
//!
//! Every measure is a positive-increment integral of some scalar series
//! (a distance, a mutual information, or the negated conditional mutual
//! information), maximized over a caller-supplied list of candidate initial
//! states. Values are therefore lower bounds on the supremum over all inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{
    cmi_of_marginal, jensen_shannon_telescopic, mutual_information, trace_distance,
};
use crate::linalg::{max_abs, CVector, C64, ZERO};
use crate::qstate::{DensityMatrix, SystemPartition};

/// Increments at or below this size (in nats) are treated as numerical noise.
pub const DEFAULT_NOISE_TOL: f64 = 1e-10;

/// Tolerance on the constancy of the `A′` marginal in [`measure_n2`].
pub const ANCILLA_DRIFT_TOL: f64 = 1e-8;

/// A real-valued series on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ScalarSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_grid(&times)?;
        Ok(Self { times, values })
    }

    /// Samples `f` on the grid.
    pub fn sample(times: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidSeries("non-finite time".into()));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSeries(format!(
            "time grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Uniform grid `start + (end − start)·k/steps` for `k = 0..=steps`.
pub fn uniform_grid(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![start];
    }
    (0..=steps)
        .map(|k| start + (end - start) * k as f64 / steps as f64)
        .collect()
}

/// Density matrices sampled on a time grid, all on one partition.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl StateTrajectory {
    pub fn new(times: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidSeries(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::InvalidSeries("empty trajectory".into()));
        }
        check_grid(&times)?;
        for s in &states[1..] {
            states[0].require_same_partition(s)?;
        }
        Ok(Self { times, states })
    }

    /// Builds a trajectory by evaluating `f` at each time.
    pub fn from_fn(
        times: Vec<f64>,
        f: impl Fn(f64) -> Result<DensityMatrix> + Sync,
    ) -> Result<Self> {
        let states = times
            .par_iter()
            .map(|&t| f(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, states)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn partition(&self) -> &SystemPartition {
        self.states[0].partition()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Evaluates a scalar functional at every sample.
    pub fn scalar_series(
        &self,
        f: impl Fn(&DensityMatrix) -> Result<f64> + Sync,
    ) -> Result<ScalarSeries> {
        let values = self
            .states
            .par_iter()
            .map(&f)
            .collect::<Result<Vec<_>>>()?;
        ScalarSeries::new(self.times.clone(), values)
    }

    /// Reduced trajectory on `keep`.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<StateTrajectory> {
        let states = self
            .states
            .iter()
            .map(|s| s.partial_trace(keep))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.times.clone(), states)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureName {
    #[serde(rename = "BLP")]
    Blp,
    #[serde(rename = "tBLP")]
    TBlp,
    #[serde(rename = "LFS")]
    Lfs,
    N1,
    N2,
}

impl std::fmt::Display for MeasureName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MeasureName::Blp => "BLP",
            MeasureName::TBlp => "tBLP",
            MeasureName::Lfs => "LFS",
            MeasureName::N1 => "N1",
            MeasureName::N2 => "N2",
        };
        f.write_str(s)
    }
}

/// The best value over the candidates together with its per-step increments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub measure_name: MeasureName,
    pub value: f64,
    pub best_candidate_index: usize,
    /// Positive contributions per step, stamped with the step's end time.
    pub increments: ScalarSeries,
}

/// Sum of positive first differences of `series`.
///
/// Steps with `|Δ| ≤ noise_tol` contribute nothing. The returned increments
/// are indexed by the end time of each step.
pub fn positive_increment_integral(
    series: &ScalarSeries,
    noise_tol: f64,
) -> Result<(f64, ScalarSeries)> {
    if !(noise_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise tolerance {noise_tol} must be nonnegative"
        )));
    }
    check_grid(&series.times)?;
    if series.len() < 2 {
        return Ok((0.0, ScalarSeries::new(Vec::new(), Vec::new())?));
    }
    let incs: Vec<f64> = series
        .values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d > noise_tol {
                d
            } else {
                0.0
            }
        })
        .collect();
    let total = incs.iter().sum();
    Ok((total, ScalarSeries::new(series.times[1..].to_vec(), incs)?))
}

fn best_of(name: MeasureName, per_candidate: Vec<(f64, ScalarSeries)>) -> Result<MeasureResult> {
    let (idx, (value, increments)) = per_candidate
        .into_iter()
        .enumerate()
        .fold(None::<(usize, (f64, ScalarSeries))>, |best, (i, cand)| match best {
            Some((j, b)) if b.0 >= cand.0 => Some((j, b)),
            _ => Some((i, cand)),
        })
        .ok_or_else(|| Error::InvalidArgument("candidate list is empty".into()))?;
    Ok(MeasureResult {
        measure_name: name,
        value,
        best_candidate_index: idx,
        increments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Trace,
    Telescopic,
}

/// BLP (trace distance) or telescopic BLP over candidate state pairs.
pub fn measure_distance_blp(
    pairs: &[(StateTrajectory, StateTrajectory)],
    distance: Distance,
) -> Result<MeasureResult> {
    let name = match distance {
        Distance::Trace => MeasureName::Blp,
        Distance::Telescopic => MeasureName::TBlp,
    };
    let per: Vec<(f64, ScalarSeries)> = pairs
        .par_iter()
        .map(|(a, b)| {
            if a.times != b.times {
                return Err(Error::InvalidSeries("pair trajectories use different grids".into()));
            }
            let values = a
                .states
                .iter()
                .zip(&b.states)
                .map(|(x, y)| match distance {
                    Distance::Trace => trace_distance(x, y),
                    Distance::Telescopic => jensen_shannon_telescopic(x, y),
                })
                .collect::<Result<Vec<_>>>()?;
            positive_increment_integral(&ScalarSeries::new(a.times.clone(), values)?, DEFAULT_NOISE_TOL)
        })
        .collect::<Result<_>>()?;
    best_of(name, per)
}

/// Assignment of partition labels to the ancilla and the open system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parties {
    pub ancilla: Vec<String>,
    pub system: Vec<String>,
}

impl Parties {
    pub fn new(ancilla: &[&str], system: &[&str]) -> Self {
        Self {
            ancilla: ancilla.iter().map(|s| s.to_string()).collect(),
            system: system.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn ancilla_refs(&self) -> Vec<&str> {
        self.ancilla.iter().map(String::as_str).collect()
    }

    fn system_refs(&self) -> Vec<&str> {
        self.system.iter().map(String::as_str).collect()
    }

    fn check(&self, partition: &SystemPartition) -> Result<()> {
        if self.ancilla.is_empty() || self.system.is_empty() {
            return Err(Error::LabelSets("ancilla and system must be nonempty".into()));
        }
        for l in self.ancilla.iter().chain(&self.system) {
            partition.index_of(l)?;
        }
        if self.ancilla.iter().any(|a| self.system.contains(a)) {
            return Err(Error::LabelSets("ancilla and system overlap".into()));
        }
        Ok(())
    }
}

impl Default for Parties {
    /// `A` and `S`.
    fn default() -> Self {
        Parties::new(&["A"], &["S"])
    }
}

/// Revivals of `I(S:A)`, maximized over candidate trajectories.
pub fn measure_lfs(trajectories: &[StateTrajectory], parties: &Parties) -> Result<MeasureResult> {
    let a = parties.ancilla_refs();
    let s = parties.system_refs();
    let per: Vec<(f64, ScalarSeries)> = trajectories
        .par_iter()
        .map(|traj| {
            parties.check(traj.partition())?;
            let keep: Vec<&str> = s.iter().chain(&a).copied().collect();
            let series = traj.scalar_series(|rho| {
                let sa = if keep.len() == rho.partition().len() {
                    rho.clone()
                } else {
                    rho.partial_trace(&keep)?
                };
                mutual_information(&sa, &s, &a)
            })?;
            positive_increment_integral(&series, DEFAULT_NOISE_TOL)
        })
        .collect::<Result<_>>()?;
    best_of(MeasureName::Lfs, per)
}

fn check_env(partition: &SystemPartition, parties: &Parties, env: &[&str], extra: &[&str]) -> Result<()> {
    parties.check(partition)?;
    if env.is_empty() {
        return Err(Error::LabelSets("environment label set is empty".into()));
    }
    for e in env {
        partition.index_of(e)?;
        if parties.ancilla.iter().chain(&parties.system).any(|l| l == e) || extra.contains(e) {
            return Err(Error::LabelSets(format!("`{e}` is not an environment label")));
        }
    }
    Ok(())
}

/// Decreases of `I(A:env|S)`, maximized over candidate trajectories.
pub fn measure_n1(
    trajectories: &[StateTrajectory],
    parties: &Parties,
    env_labels: &[&str],
) -> Result<MeasureResult> {
    let a = parties.ancilla_refs();
    let s = parties.system_refs();
    let per: Vec<(f64, ScalarSeries)> = trajectories
        .par_iter()
        .map(|traj| {
            check_env(traj.partition(), parties, env_labels, &[])?;
            let series = traj.scalar_series(|rho| cmi_of_marginal(rho, &a, env_labels, &s))?;
            positive_increment_integral(&series.negated(), DEFAULT_NOISE_TOL)
        })
        .collect::<Result<_>>()?;
    best_of(MeasureName::N1, per)
}

/// Decreases of `I(A:env|S A′)` where `A′` has dimension `dim S + 1` and is
/// left untouched by the dynamics.
pub fn measure_n2(
    trajectories: &[StateTrajectory],
    parties: &Parties,
    a_prime: &str,
    env_labels: &[&str],
) -> Result<MeasureResult> {
    let a = parties.ancilla_refs();
    let s = parties.system_refs();
    let cond: Vec<&str> = s.iter().copied().chain(std::iter::once(a_prime)).collect();
    let per: Vec<(f64, ScalarSeries)> = trajectories
        .par_iter()
        .map(|traj| {
            let p = traj.partition();
            check_env(p, parties, env_labels, &[a_prime])?;
            if a.contains(&a_prime) || s.contains(&a_prime) {
                return Err(Error::LabelSets(format!("`{a_prime}` is already a party")));
            }
            let want = p.dim_of(&s)? + 1;
            if p.factor_dim(a_prime)? != want {
                return Err(Error::DimensionMismatch(format!(
                    "`{a_prime}` has dimension {}, expected {want}",
                    p.factor_dim(a_prime)?
                )));
            }
            let first = traj.states[0].partial_trace(&[a_prime])?;
            for (t, rho) in traj.times.iter().zip(&traj.states) {
                let m = rho.partial_trace(&[a_prime])?;
                let drift = max_abs(&(m.data() - first.data()));
                if drift > ANCILLA_DRIFT_TOL {
                    return Err(Error::InvalidState(format!(
                        "`{a_prime}` marginal drifts by {drift:e} at t = {t}"
                    )));
                }
            }
            let series = traj.scalar_series(|rho| cmi_of_marginal(rho, &a, env_labels, &cond))?;
            positive_increment_integral(&series.negated(), DEFAULT_NOISE_TOL)
        })
        .collect::<Result<_>>()?;
    best_of(MeasureName::N2, per)
}

/// `½(ρ1 ⊗ |0⟩⟨0| + ρ2 ⊗ |1⟩⟨1|)` with a qubit flag labelled `ancilla`.
pub fn optimal_pair_state(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    ancilla: &str,
) -> Result<DensityMatrix> {
    rho1.require_same_partition(rho2)?;
    let flag = SystemPartition::new([(ancilla, 2)])?;
    let p0 = DensityMatrix::basis(flag.clone(), 0)?;
    let p1 = DensityMatrix::basis(flag, 1)?;
    rho1.tensor(&p0)?.mix(&rho2.tensor(&p1)?, 0.5)
}

/// Pure state `Σ aᵢ |fᵢ⟩_A ⊗ |sᵢ⟩_S` on `ancilla ⊗ system`.
///
/// `branches` holds `(aᵢ, system vector, flag vector)`; the flags must be
/// orthonormal and `Σ|aᵢ|²` must equal one.
pub fn flagged_ancilla_state(
    branches: &[(C64, CVector, CVector)],
    ancilla: SystemPartition,
    system: SystemPartition,
) -> Result<DensityMatrix> {
    if branches.is_empty() {
        return Err(Error::InvalidArgument("no branches".into()));
    }
    let norm: f64 = branches.iter().map(|(a, _, _)| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidState(format!(
            "branch amplitudes have total weight {norm}"
        )));
    }
    let (da, ds) = (ancilla.dim(), system.dim());
    for (i, (_, s, f)) in branches.iter().enumerate() {
        if s.len() != ds || f.len() != da {
            return Err(Error::DimensionMismatch(format!("branch {i} has wrong vector sizes")));
        }
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("system vector {i} is not normalized")));
        }
        for (j, (_, _, g)) in branches.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (f.dotc(g) - C64::new(want, 0.0)).norm() > 1e-12 {
                return Err(Error::InvalidArgument("ancilla flags are not orthonormal".into()));
            }
        }
    }
    let mut psi = CVector::from_element(da * ds, ZERO);
    for (a, s, f) in branches {
        psi += f.kronecker(s) * *a;
    }
    DensityMatrix::from_pure(&psi, ancilla.concat(&system)?)
}

/// `(|0⟩_A|01⟩ + |1⟩_A|10⟩)/√2` on `[A, S1, S2]`.
pub fn ops_state() -> DensityMatrix {
    let e = |k: usize, n: usize| {
        let mut v = CVector::from_element(n, ZERO);
        v[k] = C64::new(1.0, 0.0);
        v
    };
    let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    flagged_ancilla_state(
        &[(a, e(1, 4), e(0, 2)), (a, e(2, 4), e(1, 2))],
        SystemPartition::qubits(&["A"]).expect("static labels"),
        SystemPartition::qubits(&["S1", "S2"]).expect("static labels"),
    )
    .expect("static state is valid")
}
