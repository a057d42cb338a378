//! Two qubits dephasing through two bosonic baths.
//!
//! Each qubit `q` couples to its own bath through `σ_z^q (g b† + h.c.)` during
//! the window `[t_q^s, t_q^f]`. Mode `k` of bath 1 and mode `k` of bath 2 start
//! either in a two-mode squeezed vacuum (entangled) or in the diagonal mixture
//! `Σ (1−u²)u^{2n} |nn⟩⟨nn|` (classically correlated). Both share the same
//! single-bath marginals.
//!
//! Basis states use `|0⟩` for `σ_z = +1` and `|1⟩` for `σ_z = −1`; the
//! two-qubit index is `2·s₁ + s₂`.

pub mod discrete;
pub mod quadrature;
pub mod special;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ONE};
use crate::qstate::{DensityMatrix, SystemPartition};

pub use discrete::{build_discrete_model, cmi_trajectory, DiscreteDephasingModel, EnvPart, ModePair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Entangled,
    Classical,
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnvKind::Entangled => "entangled",
            EnvKind::Classical => "classical",
        })
    }
}

/// Adaptive quadrature settings for the frequency integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    /// Maximum number of bisected subintervals.
    pub max_subintervals: usize,
    /// Upper limit of integration in units of `omega_c`.
    pub cutoff_multiplier: f64,
    pub rel_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            max_subintervals: 2000,
            cutoff_multiplier: 60.0,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingParams {
    #[serde(default)]
    pub eps1: f64,
    #[serde(default)]
    pub eps2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub omega_c: f64,
    pub r: f64,
    /// Correlation parameter of the classical state; `tanh r` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_u: Option<f64>,
    pub t1s: f64,
    pub t1f: f64,
    pub t2s: f64,
    pub t2f: f64,
    pub env_kind: EnvKind,
    #[serde(default)]
    pub quad: QuadConfig,
}

impl DephasingParams {
    /// `α₁ = α₂ = 1`, `ω_c = 10⁻²`, `r = 3`, windows `[0, 2.5]` and `[2.5, 5]`.
    pub fn reference(env_kind: EnvKind) -> Self {
        Self {
            eps1: 0.0,
            eps2: 0.0,
            alpha1: 1.0,
            alpha2: 1.0,
            omega_c: 0.01,
            r: 3.0,
            classical_u: None,
            t1s: 0.0,
            t1f: 2.5,
            t2s: 2.5,
            t2f: 5.0,
            env_kind,
            quad: QuadConfig::default(),
        }
    }

    pub fn with_kind(&self, env_kind: EnvKind) -> Self {
        Self {
            env_kind,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eps1, self.eps2, self.alpha1, self.alpha2, self.omega_c, self.r, self.t1s,
            self.t1f, self.t2s, self.t2f,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite dephasing parameter".into()));
        }
        if !(self.omega_c > 0.0) {
            return Err(Error::InvalidArgument("omega_c must be positive".into()));
        }
        if self.alpha1 < 0.0 || self.alpha2 < 0.0 || self.r < 0.0 {
            return Err(Error::InvalidArgument("alpha and r must be nonnegative".into()));
        }
        if !(self.t1s <= self.t1f && self.t1f <= self.t2s && self.t2s <= self.t2f) {
            return Err(Error::InvalidArgument(format!(
                "windows must satisfy t1s ≤ t1f ≤ t2s ≤ t2f, got {} {} {} {}",
                self.t1s, self.t1f, self.t2s, self.t2f
            )));
        }
        if let Some(u) = self.classical_u {
            if !(0.0..1.0).contains(&u) {
                return Err(Error::InvalidArgument(format!("classical u = {u} outside [0, 1)")));
            }
        }
        let q = &self.quad;
        if q.max_subintervals == 0 || !(q.cutoff_multiplier > 0.0) || !(q.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("invalid quadrature settings".into()));
        }
        Ok(())
    }

    /// Correlation parameter of the classically correlated state.
    pub fn u(&self) -> f64 {
        self.classical_u.unwrap_or_else(|| self.r.tanh())
    }

    pub fn window(&self, qubit: usize) -> (f64, f64) {
        match qubit {
            0 => (self.t1s, self.t1f),
            _ => (self.t2s, self.t2f),
        }
    }

    fn eps(&self, qubit: usize) -> f64 {
        match qubit {
            0 => self.eps1,
            _ => self.eps2,
        }
    }
}

/// Displacement amplitude per unit coupling of a mode at frequency `omega`:
/// `(1/ω)·e^{iω t_s}·(1 − e^{iωτ})` with `τ = clamp(t, t_s, t_f) − t_s`.
pub fn beta(omega: f64, t: f64, window: (f64, f64)) -> C64 {
    let (ts, tf) = window;
    let tau = t.clamp(ts, tf) - ts;
    if tau <= 0.0 {
        return C64::new(0.0, 0.0);
    }
    // 1 − e^{iθ} = −2i sin(θ/2) e^{iθ/2}
    let theta = omega * tau;
    let one_minus = C64::new(0.0, -2.0 * (0.5 * theta).sin()) * C64::from_polar(1.0, 0.5 * theta);
    C64::from_polar(1.0, omega * ts) * one_minus / omega
}

/// `σ_z` eigenvalue of basis bit `b`.
pub fn sigma(bit: usize) -> i32 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

/// Bits `(s₁, s₂)` of two-qubit basis index `k = 2·s₁ + s₂`.
pub fn bits(k: usize) -> (usize, usize) {
    (k >> 1, k & 1)
}

/// Displacement multipliers `(σ(ket) − σ(bra))` per qubit for a coherence.
pub fn multipliers(ket: usize, bra: usize) -> (i32, i32) {
    let (k1, k2) = bits(ket);
    let (b1, b2) = bits(bra);
    (sigma(k1) - sigma(b1), sigma(k2) - sigma(b2))
}

/// The six coherence factors at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactors {
    /// `⟨10|·|00⟩`
    pub k1: C64,
    /// `⟨01|·|00⟩`
    pub k2: C64,
    /// `⟨11|·|01⟩`
    pub k1t: C64,
    /// `⟨11|·|10⟩`
    pub k2t: C64,
    /// `⟨11|·|00⟩`
    pub k12: C64,
    /// `⟨10|·|01⟩`
    pub lam12: C64,
}

impl PhaseFactors {
    pub const NAMES: [&'static str; 6] = ["k1", "k2", "k1t", "k2t", "k12", "lam12"];

    /// `(ket, bra)` basis indices of each factor, in [`Self::NAMES`] order.
    pub const ELEMENTS: [(usize, usize); 6] = [(2, 0), (1, 0), (3, 1), (3, 2), (3, 0), (2, 1)];

    pub fn from_map(f: &CMatrix) -> Self {
        let e = |k: usize| f[Self::ELEMENTS[k]];
        Self {
            k1: e(0),
            k2: e(1),
            k1t: e(2),
            k2t: e(3),
            k12: e(4),
            lam12: e(5),
        }
    }

    pub fn values(&self) -> [C64; 6] {
        [self.k1, self.k2, self.k1t, self.k2t, self.k12, self.lam12]
    }

    pub fn magnitudes(&self) -> [f64; 6] {
        self.values().map(|z| z.norm())
    }
}

/// Log of the environment factor for displacement multipliers `(m1, m2)`,
/// per unit frequency, for the continuum bath.
///
/// Only the part linear in the per-mode spectral weight survives the
/// continuum limit. For the entangled state that is the whole Gaussian
/// exponent; for the classical mixture the Bessel term is second order in the
/// mode weight and drops out.
fn continuum_log_density(p: &DephasingParams, m: (i32, i32), omega: f64, t: f64) -> f64 {
    let j0 = omega * (-omega / p.omega_c).exp();
    let g1 = (p.alpha1 * j0).sqrt() * m.0 as f64 * beta(omega, t, p.window(0));
    let g2 = (p.alpha2 * j0).sqrt() * m.1 as f64 * beta(omega, t, p.window(1));
    match p.env_kind {
        EnvKind::Entangled => special::entangled_char_factor(g1, g2, p.r),
        EnvKind::Classical => {
            let u2 = p.u().powi(2);
            -(1.0 + u2) / (2.0 * (1.0 - u2)) * (g1.norm_sqr() + g2.norm_sqr())
        }
    }
}

/// Free phase `e^{−i(E_ket − E_bra)t}` with `E = Σ ε_q σ_z^q`.
fn free_phase(p: &DephasingParams, m: (i32, i32), t: f64) -> C64 {
    C64::from_polar(1.0, -(p.eps(0) * m.0 as f64 + p.eps(1) * m.1 as f64) * t)
}

/// Continuum environment factor of the coherence `|ket⟩⟨bra|`.
pub fn coherence_factor(p: &DephasingParams, ket: usize, bra: usize, t: f64) -> Result<C64> {
    let m = multipliers(ket, bra);
    if m == (0, 0) {
        return Ok(ONE);
    }
    let upper = p.quad.cutoff_multiplier * p.omega_c;
    let log = quadrature::integrate_adaptive(
        |w| continuum_log_density(p, m, w, t),
        0.0,
        upper,
        p.quad.rel_tol,
        1e-15,
        p.quad.max_subintervals,
    )?;
    Ok(free_phase(p, m, t) * log.exp())
}

/// The 4×4 Schur multiplier `F` with `ρ_S(t) = F ∘ ρ_S(0)`.
pub fn dephasing_map(p: &DephasingParams, t: f64) -> Result<CMatrix> {
    p.validate()?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let mut f = CMatrix::from_element(4, 4, ONE);
    for ket in 0..4 {
        for bra in (ket + 1)..4 {
            let z = coherence_factor(p, ket, bra, t)?;
            f[(ket, bra)] = z;
            f[(bra, ket)] = z.conj();
        }
    }
    Ok(f)
}

pub fn phase_factors(p: &DephasingParams, t: f64) -> Result<PhaseFactors> {
    let f = dephasing_map(p, t)?;
    // ELEMENTS list ket > bra; F stores the conjugate pair symmetrically
    Ok(PhaseFactors::from_map(&f))
}

/// Phase factors on a grid, evaluated in parallel.
pub fn phase_factor_series(p: &DephasingParams, times: &[f64]) -> Result<Vec<PhaseFactors>> {
    times.par_iter().map(|&t| phase_factors(p, t)).collect()
}

/// `ρ_S(t)` for the initial pure state `Σ a_ij |ij⟩` on `[S1, S2]`.
pub fn system_state(p: &DephasingParams, a: [[C64; 2]; 2], t: f64) -> Result<DensityMatrix> {
    let norm: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidState(format!("amplitudes have total weight {norm}")));
    }
    let psi = CVector::from_fn(4, |k, _| a[k >> 1][k & 1]);
    let rho0 = &psi * psi.adjoint();
    let f = dephasing_map(p, t)?;
    DensityMatrix::new(rho0.component_mul(&f), system_partition())
}

pub fn system_partition() -> SystemPartition {
    SystemPartition::qubits(&["S1", "S2"]).expect("static labels")
}

/// Applies the Schur multiplier `F` to the `S1 S2` indices of `rho`, leaving
/// every other factor untouched.
pub fn apply_dephasing_map(rho: &DensityMatrix, f: &CMatrix) -> Result<DensityMatrix> {
    let part = rho.partition();
    let (i1, i2) = (part.index_of("S1")?, part.index_of("S2")?);
    if part.factor_dim("S1")? != 2 || part.factor_dim("S2")? != 2 {
        return Err(Error::DimensionMismatch("S1 and S2 must be qubits".into()));
    }
    let dims = part.dims();
    let strides = crate::linalg::strides(&dims);
    let sys: Vec<usize> = (0..rho.dim())
        .map(|k| 2 * ((k / strides[i1]) % 2) + (k / strides[i2]) % 2)
        .collect();
    let data = CMatrix::from_fn(rho.dim(), rho.dim(), |i, j| rho.data()[(i, j)] * f[(sys[i], sys[j])]);
    DensityMatrix::new(data, part.clone())
}

/// Evolves a state on `[.., S1, S2, ..]` (the other factors are ancillas).
pub fn evolve_with_ancilla(p: &DephasingParams, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    apply_dephasing_map(rho, &dephasing_map(p, t)?)
}
