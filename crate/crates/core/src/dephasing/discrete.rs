//! Finite-mode realization of the dephasing model and the branch Gram method.
//!
//! The bath spectral density is replaced by a Gauss–Laguerre rule with a
//! handful of mode pairs. Each pair starts in a Fock-truncated two-mode state.
//! For an initial `A ⊗ S` state with eigen-decomposition `Σ p_k |v_k⟩⟨v_k|`,
//! the purified global state is a sum of product branches labelled by
//! `(k, s, n)`: purifier component `k`, system basis state `s` and Fock levels
//! `n` (one per pair). The classical mixture is purified by a register `R`
//! holding `n`. Every reduced entropy follows from Hadamard products of the
//! per-factor branch overlap matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::gauss_laguerre;
use super::special::{displacement_element, geometric_weights};
use super::{beta, bits, multipliers, sigma, DephasingParams, EnvKind, PhaseFactors};
use crate::error::{Error, Result};
use crate::info::entropy_of_spectrum;
use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};
use crate::measures::ScalarSeries;
use crate::qstate::DensityMatrix;

/// Minimum retained trace of the truncated initial environment.
pub const CAPTURE_THRESHOLD: f64 = 0.999;

/// Default cap on the number of branches in the Gram method.
pub const DEFAULT_BRANCH_BUDGET: usize = 1024;

/// Eigencomponents of the initial state below this weight are dropped.
const COMPONENT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePair {
    pub omega: f64,
    pub g1: f64,
    pub g2: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteDephasingModel {
    pub mode_pairs: Vec<ModePair>,
    pub n_max: usize,
    pub env_kind: EnvKind,
    pub r: f64,
    pub params: DephasingParams,
    weights: Vec<f64>,
    captured: f64,
}

/// Builds `n_modes` pairs from the Gauss–Laguerre rule for `ω e^{−ω/ω_c} dω`
/// and truncates each pair at `n_max` quanta per mode.
pub fn build_discrete_model(
    params: &DephasingParams,
    n_modes: usize,
    n_max: usize,
) -> Result<DiscreteDephasingModel> {
    params.validate()?;
    if n_modes == 0 || n_max == 0 {
        return Err(Error::InvalidArgument("n_modes and n_max must be at least 1".into()));
    }
    let (x, w) = gauss_laguerre(n_modes, 1.0);
    let wc = params.omega_c;
    let mode_pairs = x
        .iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            let weight = wc * wc * wi;
            ModePair {
                omega: wc * xi,
                g1: (params.alpha1 * weight).sqrt(),
                g2: (params.alpha2 * weight).sqrt(),
            }
        })
        .collect();
    let u = match params.env_kind {
        EnvKind::Entangled => params.r.tanh(),
        EnvKind::Classical => params.u(),
    };
    let raw = geometric_weights(u, n_max);
    let per_pair: f64 = raw.iter().sum();
    let captured = per_pair.powi(n_modes as i32);
    if captured < CAPTURE_THRESHOLD {
        return Err(Error::Truncation {
            captured,
            threshold: CAPTURE_THRESHOLD,
        });
    }
    Ok(DiscreteDephasingModel {
        mode_pairs,
        n_max,
        env_kind: params.env_kind,
        r: params.r,
        params: params.clone(),
        weights: raw.iter().map(|p| p / per_pair).collect(),
        captured,
    })
}

impl DiscreteDephasingModel {
    /// Trace of the initial environment kept by the truncation.
    pub fn captured_trace(&self) -> f64 {
        self.captured
    }

    /// Renormalized occupation probabilities `P_n` of one pair.
    pub fn level_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Displacement amplitudes `(g₁β₁, g₂β₂)` of pair `m` at time `t`.
    pub fn amplitudes(&self, m: usize, t: f64) -> (C64, C64) {
        let mp = &self.mode_pairs[m];
        (
            mp.g1 * beta(mp.omega, t, self.params.window(0)),
            mp.g2 * beta(mp.omega, t, self.params.window(1)),
        )
    }

    pub(crate) fn free_phase(&self, ket: usize, bra: usize, t: f64) -> C64 {
        let m = multipliers(ket, bra);
        C64::from_polar(1.0, -(self.params.eps1 * m.0 as f64 + self.params.eps2 * m.1 as f64) * t)
    }
}

/// Which bath enters `I(A:E|S)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvPart {
    E1,
    E2,
    E1E2,
}

/// Reduced entropies (nats) of the subsets the leaked-information quantities need.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SubsystemEntropies {
    pub a: f64,
    pub s: f64,
    pub as_: f64,
    pub se1: f64,
    pub ase1: f64,
    pub se2: f64,
    pub ase2: f64,
    pub se1e2: f64,
    pub ase1e2: f64,
}

impl SubsystemEntropies {
    pub fn as_array(&self) -> [f64; 9] {
        [
            self.a, self.s, self.as_, self.se1, self.ase1, self.se2, self.ase2, self.se1e2,
            self.ase1e2,
        ]
    }

    /// `I(A:E|S) = S(AS) + S(SE) − S(S) − S(ASE)`.
    pub fn cmi(&self, part: EnvPart) -> f64 {
        let (se, ase) = match part {
            EnvPart::E1 => (self.se1, self.ase1),
            EnvPart::E2 => (self.se2, self.ase2),
            EnvPart::E1E2 => (self.se1e2, self.ase1e2),
        };
        self.as_ + se - self.s - ase
    }

    /// `I(S:A)`.
    pub fn mutual_sa(&self) -> f64 {
        self.s + self.a - self.as_
    }
}

/// The subsets listed in [`SubsystemEntropies`] order, as flags over
/// `(A, S, E1, E2)`.
pub(crate) const SUBSETS: [[bool; 4]; 9] = [
    [true, false, false, false],
    [false, true, false, false],
    [true, true, false, false],
    [false, true, true, false],
    [true, true, true, false],
    [false, true, false, true],
    [true, true, false, true],
    [false, true, true, true],
    [true, true, true, true],
];

impl SubsystemEntropies {
    pub(crate) fn from_array(v: [f64; 9]) -> Self {
        Self {
            a: v[0],
            s: v[1],
            as_: v[2],
            se1: v[3],
            ase1: v[4],
            se2: v[5],
            ase2: v[6],
            se1e2: v[7],
            ase1e2: v[8],
        }
    }
}

/// Splits a state on `[.., S1, S2]` into the ancilla dimension and the
/// weighted eigencomponents `√p_k |v_k⟩` laid out as `(ancilla, S1 S2)`.
pub(crate) fn ancilla_components(initial: &DensityMatrix) -> Result<(usize, Vec<CVector>)> {
    let part = initial.partition();
    for l in ["S1", "S2"] {
        if part.factor_dim(l)? != 2 {
            return Err(Error::DimensionMismatch(format!("`{l}` must be a qubit")));
        }
    }
    let mut order: Vec<&str> = part.complement(&["S1", "S2"]);
    if order.is_empty() {
        return Err(Error::LabelSets("initial state needs an ancilla factor".into()));
    }
    order.extend(["S1", "S2"]);
    let rho = initial.reorder(&order)?;
    let da = rho.dim() / 4;
    let (vals, vecs) = linalg::eigh(rho.data());
    let comps = (0..vals.len())
        .rev()
        .filter(|&k| vals[k] > COMPONENT_TOL)
        .map(|k| vecs.column(k).into_owned() * C64::new(vals[k].sqrt(), 0.0))
        .collect();
    Ok((da, comps))
}

struct Branch {
    comp: usize,
    sys: usize,
    levels: Vec<usize>,
    weight: f64,
}

/// Precomputed time-independent branch data for one initial state.
pub struct BranchSet {
    branches: Vec<Branch>,
    gram_a: CMatrix,
}

impl BranchSet {
    pub fn new(model: &DiscreteDephasingModel, initial: &DensityMatrix, budget: usize) -> Result<Self> {
        let (da, comps) = ancilla_components(initial)?;
        let mut heads: Vec<(usize, usize, CVector)> = Vec::new();
        for (k, v) in comps.iter().enumerate() {
            for s in 0..4 {
                let psi = CVector::from_fn(da, |a, _| v[a * 4 + s]);
                if psi.norm() > 1e-14 {
                    heads.push((k, s, psi));
                }
            }
        }
        let levels_per_pair = model.n_max + 1;
        let pairs = model.mode_pairs.len();
        let count = (levels_per_pair as f64).powi(pairs as i32) * heads.len() as f64;
        if count > budget as f64 {
            return Err(Error::Budget(format!(
                "{count} branches exceed the budget of {budget}"
            )));
        }
        let mut multi: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..pairs {
            multi = multi
                .into_iter()
                .flat_map(|m| {
                    (0..levels_per_pair).map(move |n| {
                        let mut next = m.clone();
                        next.push(n);
                        next
                    })
                })
                .collect();
        }
        let mut branches = Vec::new();
        let mut psis = Vec::new();
        for (k, s, psi) in &heads {
            for levels in &multi {
                let weight = levels
                    .iter()
                    .map(|&n| model.weights[n].sqrt())
                    .product();
                branches.push(Branch {
                    comp: *k,
                    sys: *s,
                    levels: levels.clone(),
                    weight,
                });
                psis.push(psi);
            }
        }
        let n = branches.len();
        let gram_a = CMatrix::from_fn(n, n, |i, j| psis[i].dotc(psis[j]));
        Ok(Self { branches, gram_a })
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Reduced entropies at time `t`.
    pub fn entropies(&self, model: &DiscreteDephasingModel, t: f64) -> Result<SubsystemEntropies> {
        let n = self.len();
        let pairs = model.mode_pairs.len();
        let dim = model.n_max + 1;
        // tables[pair][bath][δ index] for δ = −2, +2
        let tables: Vec<[[CMatrix; 2]; 2]> = (0..pairs)
            .map(|m| {
                let (b1, b2) = model.amplitudes(m, t);
                let table = |b: C64, d: f64| {
                    CMatrix::from_fn(dim, dim, |i, j| displacement_element(i, j, b * d))
                };
                [[table(b1, -2.0), table(b1, 2.0)], [table(b2, -2.0), table(b2, 2.0)]]
            })
            .collect();
        let env_gram = |bath: usize| {
            CMatrix::from_fn(n, n, |i, j| {
                let (bi, bj) = (&self.branches[i], &self.branches[j]);
                let si = if bath == 0 { bits(bi.sys).0 } else { bits(bi.sys).1 };
                let sj = if bath == 0 { bits(bj.sys).0 } else { bits(bj.sys).1 };
                let delta = sigma(sj) - sigma(si);
                let mut acc = ONE;
                for (m, tab) in tables.iter().enumerate() {
                    let (ni, nj) = (bi.levels[m], bj.levels[m]);
                    let z = match delta {
                        0 => {
                            if ni == nj {
                                ONE
                            } else {
                                ZERO
                            }
                        }
                        d => tab[bath][usize::from(d > 0)][(ni, nj)],
                    };
                    acc *= z;
                    if acc == ZERO {
                        break;
                    }
                }
                acc
            })
        };
        let g_e1 = env_gram(0);
        let g_e2 = env_gram(1);
        let g_s = CMatrix::from_fn(n, n, |i, j| delta(self.branches[i].sys, self.branches[j].sys));
        let g_hidden = CMatrix::from_fn(n, n, |i, j| {
            let (bi, bj) = (&self.branches[i], &self.branches[j]);
            let r = match model.env_kind {
                EnvKind::Classical if bi.levels != bj.levels => ZERO,
                _ => ONE,
            };
            r * delta(bi.comp, bj.comp)
        });
        let weights = CMatrix::from_fn(n, n, |i, j| {
            C64::new(self.branches[i].weight * self.branches[j].weight, 0.0)
        });
        let factors = [&self.gram_a, &g_s, &g_e1, &g_e2];
        let mut out = [0.0; 9];
        for (slot, subset) in out.iter_mut().zip(SUBSETS.iter()) {
            let mut hx = weights.clone();
            let mut hy = g_hidden.clone();
            for (f, &inside) in factors.iter().zip(subset) {
                if inside {
                    hx.component_mul_assign(f);
                } else {
                    hy.component_mul_assign(f);
                }
            }
            *slot = gram_entropy(&hx, &hy);
        }
        Ok(SubsystemEntropies::from_array(out))
    }
}

fn delta(a: usize, b: usize) -> C64 {
    if a == b {
        ONE
    } else {
        ZERO
    }
}

/// Entropy of `Σ_ij conj(H_Y)_ij |x_i⟩⟨x_j|` from the Gram matrices
/// `H_X = ⟨x_i|x_j⟩` and `H_Y = ⟨y_i|y_j⟩`.
fn gram_entropy(hx: &CMatrix, hy: &CMatrix) -> f64 {
    let root = linalg::hermitian_fn(hx, |l| l.max(0.0).sqrt());
    let m = &root * hy.conjugate() * &root;
    entropy_of_spectrum(linalg::eigvalsh(&m).iter().map(|&l| l.max(0.0)))
}

/// Leaked-information series on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakedInformation {
    pub times: Vec<f64>,
    pub entropies: Vec<SubsystemEntropies>,
}

impl LeakedInformation {
    pub fn cmi(&self, part: EnvPart) -> Result<ScalarSeries> {
        ScalarSeries::new(
            self.times.clone(),
            self.entropies.iter().map(|e| e.cmi(part)).collect(),
        )
    }

    pub fn mutual_sa(&self) -> Result<ScalarSeries> {
        ScalarSeries::new(
            self.times.clone(),
            self.entropies.iter().map(|e| e.mutual_sa()).collect(),
        )
    }
}

/// Reduced entropies along `times` for an initial state on `[.., S1, S2]`.
pub fn leaked_information(
    model: &DiscreteDephasingModel,
    initial: &DensityMatrix,
    times: &[f64],
    budget: usize,
) -> Result<LeakedInformation> {
    let set = BranchSet::new(model, initial, budget)?;
    let entropies = times
        .par_iter()
        .map(|&t| set.entropies(model, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(LeakedInformation {
        times: times.to_vec(),
        entropies,
    })
}

/// `I(A:env|S₁S₂)(t)` by the branch Gram method.
pub fn cmi_trajectory(
    model: &DiscreteDephasingModel,
    initial: &DensityMatrix,
    times: &[f64],
    env_part: EnvPart,
) -> Result<ScalarSeries> {
    leaked_information(model, initial, times, DEFAULT_BRANCH_BUDGET)?.cmi(env_part)
}

/// Truncated displacement `exp(α b† − α* b)` on `dim` Fock levels.
pub fn truncated_displacement(alpha: C64, dim: usize) -> CMatrix {
    // exp(G) = exp(−i H) with H = iG Hermitian
    let mut h = CMatrix::zeros(dim, dim);
    for n in 0..dim - 1 {
        let s = ((n + 1) as f64).sqrt();
        h[(n + 1, n)] = C64::new(0.0, 1.0) * alpha * s;
        h[(n, n + 1)] = C64::new(0.0, -1.0) * alpha.conj() * s;
    }
    linalg::unitary_from_hamiltonian(&h, 1.0)
}

/// Phase factors of the discrete model from truncated dense displacements on
/// `fock_dim ≥ n_max + 1` levels per mode.
pub fn discrete_phase_factors(model: &DiscreteDephasingModel, t: f64, fock_dim: usize) -> Result<PhaseFactors> {
    if fock_dim < model.n_max + 1 {
        return Err(Error::InvalidArgument("fock_dim must exceed n_max".into()));
    }
    let w = &model.weights;
    let mut f = CMatrix::from_element(4, 4, ONE);
    for &(ket, bra) in PhaseFactors::ELEMENTS.iter() {
        let m = multipliers(ket, bra);
        let mut acc = model.free_phase(ket, bra, t);
        for pair in 0..model.mode_pairs.len() {
            let (b1, b2) = model.amplitudes(pair, t);
            let d1 = truncated_displacement(b1 * m.0 as f64, fock_dim);
            let d2 = truncated_displacement(b2 * m.1 as f64, fock_dim);
            let mut z = ZERO;
            match model.env_kind {
                EnvKind::Classical => {
                    for (n, p) in w.iter().enumerate() {
                        z += d1[(n, n)] * d2[(n, n)] * *p;
                    }
                }
                EnvKind::Entangled => {
                    for (n, p) in w.iter().enumerate() {
                        for (k, q) in w.iter().enumerate() {
                            z += d1[(n, k)] * d2[(n, k)] * (p * q).sqrt();
                        }
                    }
                }
            }
            acc *= z;
        }
        f[(ket, bra)] = acc;
    }
    Ok(PhaseFactors::from_map(&f))
}
