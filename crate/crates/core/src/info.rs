//! Entropies, divergences, correlation measures and the Petz recovery map.
//!
//! All quantities are in nats.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::qstate::{clamp_spectrum, DensityMatrix, SystemPartition};

/// Negative round-off tolerated on quantities that are nonnegative in theory.
pub const NONNEG_TOL: f64 = 1e-9;
/// `σ` eigenvalues below this are treated as outside its support.
pub const SUPPORT_EIGEN_TOL: f64 = 1e-12;
/// `ρ` weight above this on σ's kernel makes `S(ρ||σ)` infinite.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

/// A nonnegative real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

fn clamp_nonneg(v: f64, what: &str) -> Result<f64> {
    if v < -NONNEG_TOL {
        Err(Error::InvalidState(format!("{what} = {v:e} is negative")))
    } else {
        Ok(v.max(0.0))
    }
}

/// `-Σ λ ln λ` with `0 ln 0 = 0`.
pub fn entropy_of_spectrum(vals: impl IntoIterator<Item = f64>) -> f64 {
    vals.into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(rho.eigenvalues()?))
}

/// Entropy of the marginal on `labels` (zero for the empty set).
pub fn marginal_entropy(rho: &DensityMatrix, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    if labels.len() == rho.partition().len() {
        for l in labels {
            rho.partition().index_of(l)?;
        }
        return von_neumann_entropy(rho);
    }
    von_neumann_entropy(&rho.partial_trace(labels)?)
}

/// `½ Σ |eig(ρ - σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.require_same_partition(sigma)?;
    let diff = rho.data() - sigma.data();
    Ok(0.5 * linalg::eigvalsh(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// `‖√ρ √σ‖₁²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.require_same_partition(sigma)?;
    let sqrt_rho = linalg::hermitian_fn(rho.data(), |l| l.max(0.0).sqrt());
    let inner = &sqrt_rho * sigma.data() * &sqrt_rho;
    let root_sum: f64 = linalg::eigvalsh(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).min(1.0))
}

/// `tr ρ (ln ρ − ln σ)`, `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    rho.require_same_partition(sigma)?;
    let (mu, vecs) = linalg::eigh(sigma.data());
    clamp_spectrum(mu.iter().copied())?;
    let mut cross = 0.0;
    for (j, &m) in mu.iter().enumerate() {
        let v = vecs.column(j);
        let w = (v.adjoint() * rho.data() * v)[(0, 0)].re;
        if m < SUPPORT_EIGEN_TOL {
            if w > SUPPORT_WEIGHT_TOL {
                return Ok(ExtendedReal::Infinite);
            }
            continue;
        }
        cross += w * m.ln();
    }
    let neg_entropy = -von_neumann_entropy(rho)?;
    Ok(ExtendedReal::Finite(clamp_nonneg(
        neg_entropy - cross,
        "relative entropy",
    )?))
}

/// `S(ρ || aρ + (1−a)σ) / (−ln a)`, always finite, in `[0, 1]`.
pub fn telescopic_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    a: f64,
) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "telescopic parameter a = {a} must lie in (0, 1)"
        )));
    }
    let mix = rho.mix(sigma, a)?;
    let s = relative_entropy(rho, &mix)?.finite().ok_or_else(|| {
        Error::InvalidState("mixture support does not contain ρ".into())
    })?;
    Ok((s / -a.ln()).min(1.0))
}

/// Quantum Jensen–Shannon divergence built from `S_{1/2}`, in `[0, 1]`.
pub fn jensen_shannon_telescopic(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let ab = telescopic_relative_entropy(rho, sigma, 0.5)?;
    let ba = telescopic_relative_entropy(sigma, rho, 0.5)?;
    Ok(0.5 * (ab + ba))
}

/// Checks that the label sets are pairwise disjoint and cover the partition.
pub fn check_cover(partition: &SystemPartition, sets: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for set in sets {
        for l in *set {
            partition.index_of(l)?;
            if seen.contains(l) {
                return Err(Error::LabelSets(format!("label `{l}` appears twice")));
            }
            seen.push(l);
        }
    }
    if seen.len() != partition.len() {
        let missing: Vec<_> = partition.complement(&seen);
        return Err(Error::LabelSets(format!(
            "labels {missing:?} are not assigned to any party"
        )));
    }
    Ok(())
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    a.iter().chain(b.iter()).copied().collect()
}

/// `I(A:B) = S(A) + S(B) − S(AB)`; the label sets must cover the partition.
pub fn mutual_information(rho: &DensityMatrix, part_a: &[&str], part_b: &[&str]) -> Result<f64> {
    check_cover(rho.partition(), &[part_a, part_b])?;
    let v = marginal_entropy(rho, part_a)? + marginal_entropy(rho, part_b)?
        - von_neumann_entropy(rho)?;
    clamp_nonneg(v, "mutual information")
}

/// `I(A:B|C) = S(AC) + S(CB) − S(C) − S(ACB)` with `part_c` the conditioning
/// set; the three sets must cover the partition.
pub fn conditional_mutual_information(
    rho: &DensityMatrix,
    part_a: &[&str],
    part_b: &[&str],
    part_c: &[&str],
) -> Result<f64> {
    check_cover(rho.partition(), &[part_a, part_b, part_c])?;
    let v = marginal_entropy(rho, &union(part_a, part_c))?
        + marginal_entropy(rho, &union(part_c, part_b))?
        - marginal_entropy(rho, part_c)?
        - von_neumann_entropy(rho)?;
    clamp_nonneg(v, "conditional mutual information")
}

/// `I(A:B|C)` on the marginal over `A ∪ B ∪ C` (other labels traced out).
pub fn cmi_of_marginal(
    rho: &DensityMatrix,
    part_a: &[&str],
    part_b: &[&str],
    part_c: &[&str],
) -> Result<f64> {
    let keep: Vec<&str> = part_a
        .iter()
        .chain(part_b)
        .chain(part_c)
        .copied()
        .collect();
    if keep.len() == rho.partition().len() {
        return conditional_mutual_information(rho, part_a, part_b, part_c);
    }
    conditional_mutual_information(&rho.partial_trace(&keep)?, part_a, part_b, part_c)
}

/// `I(E1;E2;A|S) = I(E1:E2|S) − I(E1:E2|SA)`; may be negative.
pub fn interaction_information(
    rho: &DensityMatrix,
    part_e1: &[&str],
    part_e2: &[&str],
    part_a: &[&str],
    part_s: &[&str],
) -> Result<f64> {
    check_cover(rho.partition(), &[part_e1, part_e2, part_a, part_s])?;
    let given_s = cmi_of_marginal(rho, part_e1, part_e2, part_s)?;
    let given_sa = conditional_mutual_information(rho, part_e1, part_e2, &union(part_s, part_a))?;
    Ok(given_s - given_sa)
}

/// Petz transpose channel of `Tr_C` applied to `ρ_AB`:
/// `σ_ABC = ρ_BC^{1/2} (ρ_B^{-1/2} ρ_AB ρ_B^{-1/2} ⊗ I_C) ρ_BC^{1/2}`.
///
/// Inverse square roots use the eigen-clamped pseudo-inverse. The output is
/// returned on the input's partition.
pub fn petz_recovery(
    rho: &DensityMatrix,
    part_a: &[&str],
    part_b: &[&str],
    part_c: &[&str],
) -> Result<DensityMatrix> {
    check_cover(rho.partition(), &[part_a, part_b, part_c])?;
    let p = rho.partition();
    let (da, db, dc) = (p.dim_of(part_a)?, p.dim_of(part_b)?, p.dim_of(part_c)?);

    let ab = union(part_a, part_b);
    let bc = union(part_b, part_c);
    let rho_ab = rho.partial_trace(&ab)?.reorder(&ab)?;
    let rho_bc = rho.partial_trace(&bc)?.reorder(&bc)?;
    let rho_b = if part_b.is_empty() {
        CMatrix::identity(1, 1)
    } else {
        rho.partial_trace(part_b)?.reorder(part_b)?.data().clone()
    };

    let inv_sqrt_b = linalg::hermitian_fn(&rho_b, |l| {
        if l > SUPPORT_EIGEN_TOL {
            l.powf(-0.5)
        } else {
            0.0
        }
    });
    let sqrt_bc = linalg::hermitian_fn(rho_bc.data(), |l| l.max(0.0).sqrt());

    let left = linalg::kron(&CMatrix::identity(da, da), &inv_sqrt_b);
    let x = &left * rho_ab.data() * &left;
    let y = linalg::kron(&x, &CMatrix::identity(dc, dc));
    let outer = linalg::kron(&CMatrix::identity(da, da), &sqrt_bc);
    let mut sigma = linalg::hermitize(&(&outer * y * &outer));
    debug_assert_eq!(sigma.nrows(), da * db * dc);

    let tr = linalg::trace(&sigma).re;
    if (tr - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "Petz output has trace {tr}, drift too large to renormalize"
        )));
    }
    sigma /= C64::new(tr, 0.0);

    let order: Vec<&str> = part_a.iter().chain(part_b).chain(part_c).copied().collect();
    let ordered = p.restrict(&order)?;
    let ordered = SystemPartition::new(order.iter().map(|l| {
        (l.to_string(), ordered.factor_dim(l).expect("label checked"))
    }))?;
    let original: Vec<&str> = p.labels().collect();
    DensityMatrix::new(sigma, ordered)?.reorder(&original)
}

/// Numerical comparison of a recovery against the CMI-based bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryCheck {
    pub cmi: f64,
    /// `½‖ρ − σ‖₁`.
    pub trace_distance: f64,
    pub fidelity: f64,
    /// `D² ≤ ln2 · I(A:C|B)` with the ½-normalized distance.
    pub squared_bound_half_norm: bool,
    /// Same bound with the unnormalized distance `‖ρ − σ‖₁`.
    pub squared_bound_full_norm: bool,
    /// `7 log₂(dim A) √D`.
    pub continuity_rhs: f64,
    /// `continuity_rhs − cmi`; negative means the bound failed.
    pub continuity_margin: f64,
}

/// Recovers `ρ` with the Petz map and evaluates both recovery bounds.
pub fn recovery_check(
    rho: &DensityMatrix,
    part_a: &[&str],
    part_b: &[&str],
    part_c: &[&str],
) -> Result<(DensityMatrix, RecoveryCheck)> {
    let sigma = petz_recovery(rho, part_a, part_b, part_c)?;
    let cmi = conditional_mutual_information(rho, part_a, part_c, part_b)?;
    let d = trace_distance(rho, &sigma)?;
    let f = fidelity(rho, &sigma)?;
    let dim_a = rho.partition().dim_of(part_a)? as f64;
    let rhs = 7.0 * dim_a.log2() * d.sqrt();
    let check = RecoveryCheck {
        cmi,
        trace_distance: d,
        fidelity: f,
        squared_bound_half_norm: d * d <= LN_2 * cmi + NONNEG_TOL,
        squared_bound_full_norm: 4.0 * d * d <= LN_2 * cmi + NONNEG_TOL,
        continuity_rhs: rhs,
        continuity_margin: rhs - cmi,
    };
    Ok((sigma, check))
}
