//! Dense finite-dimensional quantum states on labelled tensor-product spaces.
//!
//! A [`SystemPartition`] fixes the order of the tensor factors; every
//! operation addresses factors by label and never reorders them silently.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};

/// Entrywise Hermiticity tolerance for a valid state.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off and clamped.
pub const PSD_TOL: f64 = 1e-10;

/// Ordered list of labelled tensor factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemPartition {
    factors: Vec<(String, usize)>,
}

impl SystemPartition {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (k, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidArgument(format!(
                    "factor `{label}` has dimension 0"
                )));
            }
            if factors[..k].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { factors })
    }

    /// A partition of qubits with the given labels.
    pub fn qubits(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|l| (*l, 2usize)))
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|(l, _)| l.as_str())
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|(l, _)| l == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.index_of(label)?].1)
    }

    /// Product dimension of a set of labels.
    pub fn dim_of(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().map(|l| self.factor_dim(l)).product()
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &SystemPartition) -> Result<Self> {
        Self::new(self.factors.iter().chain(other.factors.iter()).cloned())
    }

    /// The sub-partition of `keep`, in this partition's order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        for l in keep {
            self.index_of(l)?;
        }
        Self::new(
            self.factors
                .iter()
                .filter(|(l, _)| keep.contains(&l.as_str()))
                .cloned(),
        )
    }

    /// Labels not in `labels`, in partition order.
    pub fn complement<'a>(&'a self, labels: &[&str]) -> Vec<&'a str> {
        self.labels().filter(|l| !labels.contains(l)).collect()
    }

    fn strides(&self) -> Vec<usize> {
        linalg::strides(&self.dims())
    }

    /// `(dim, stride)` pairs for the given factor indices.
    fn layout(&self, idx: &[usize]) -> Vec<(usize, usize)> {
        let st = self.strides();
        idx.iter().map(|&k| (self.factors[k].1, st[k])).collect()
    }
}

/// A density operator on a labelled tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
    partition: SystemPartition,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(data: CMatrix, partition: SystemPartition) -> Result<Self> {
        let state = Self::from_parts(data, partition)?;
        state.validate()?;
        Ok(state)
    }

    fn from_parts(data: CMatrix, partition: SystemPartition) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() != partition.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} for partition of dimension {}",
                data.nrows(),
                data.ncols(),
                partition.dim()
            )));
        }
        Ok(Self { data, partition })
    }

    /// Result of an operation known to preserve validity; only re-Hermitized.
    pub(crate) fn assume_valid(data: CMatrix, partition: SystemPartition) -> Self {
        debug_assert_eq!(data.nrows(), partition.dim());
        Self {
            data: linalg::hermitize(&data),
            partition,
        }
    }

    fn validate(&self) -> Result<()> {
        let h = linalg::hermiticity_defect(&self.data);
        if h > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {h:e})")));
        }
        let tr = linalg::trace(&self.data);
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        self.eigenvalues().map(|_| ())
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn from_pure(psi: &CVector, partition: SystemPartition) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Self::new(psi * psi.adjoint(), partition)
    }

    /// Computational basis projector `|k⟩⟨k|`.
    pub fn basis(partition: SystemPartition, k: usize) -> Result<Self> {
        let d = partition.dim();
        if k >= d {
            return Err(Error::InvalidArgument(format!("basis index {k} >= {d}")));
        }
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = ONE;
        Self::new(m, partition)
    }

    pub fn maximally_mixed(partition: SystemPartition) -> Self {
        let d = partition.dim();
        let m = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        Self::assume_valid(m, partition)
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn partition(&self) -> &SystemPartition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.data)
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// Eigenvalues with round-off negatives clamped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        clamp_spectrum(linalg::eigvalsh(&self.data).iter().copied())
    }

    /// Kronecker product; the partition is the concatenation of both.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let partition = self.partition.concat(&other.partition)?;
        Ok(Self::assume_valid(
            linalg::kron(&self.data, &other.data),
            partition,
        ))
    }

    /// Reduced state on `keep`, in the original factor order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let mut kept = Vec::new();
        for l in keep {
            kept.push(self.partition.index_of(l)?);
        }
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..self.partition.len())
            .filter(|k| !kept.contains(k))
            .collect();
        let kept_off = linalg::offsets(&self.partition.layout(&kept));
        let traced_off = linalg::offsets(&self.partition.layout(&traced));
        let dk = kept_off.len();
        let mut out = CMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = ZERO;
                for &t in &traced_off {
                    acc += self.data[(kept_off[a] + t, kept_off[b] + t)];
                }
                out[(a, b)] = acc;
            }
        }
        let partition = SystemPartition::new(
            kept.iter().map(|&k| self.partition.factors[k].clone()),
        )?;
        Ok(Self::assume_valid(out, partition))
    }

    /// Permutes factors into `order`, which must list every label once.
    pub fn reorder(&self, order: &[&str]) -> Result<DensityMatrix> {
        if order.len() != self.partition.len() {
            return Err(Error::LabelSets(format!(
                "reorder needs all {} labels, got {}",
                self.partition.len(),
                order.len()
            )));
        }
        let mut idx = Vec::new();
        for l in order {
            let k = self.partition.index_of(l)?;
            if idx.contains(&k) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            idx.push(k);
        }
        let off = linalg::offsets(&self.partition.layout(&idx));
        let d = off.len();
        let data = CMatrix::from_fn(d, d, |i, j| self.data[(off[i], off[j])]);
        let partition = SystemPartition::new(idx.iter().map(|&k| self.partition.factors[k].clone()))?;
        Ok(Self { data, partition })
    }

    /// `Σ_k (I⊗K_k⊗I) ρ (I⊗K_k⊗I)†` with the channel acting on `target`.
    pub fn apply_channel(&self, ch: &QuantumChannel, target: &str) -> Result<DensityMatrix> {
        let d_in = self.partition.factor_dim(target)?;
        if ch.input_dim() != d_in {
            return Err(Error::DimensionMismatch(format!(
                "channel input dimension {} vs factor `{target}` of dimension {d_in}",
                ch.input_dim()
            )));
        }
        let mut acc: Option<CMatrix> = None;
        let mut out_partition = None;
        for k in ch.kraus() {
            let (full, part) = embed_operator(k, &self.partition, &[target])?;
            let term = &full * &self.data * full.adjoint();
            acc = Some(match acc {
                Some(a) => a + term,
                None => term,
            });
            out_partition = Some(part);
        }
        Ok(Self::assume_valid(
            acc.expect("channel has at least one Kraus operator"),
            out_partition.expect("set with acc"),
        ))
    }

    /// `U ρ U†` with `U` acting on `targets` (in the listed order).
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[&str]) -> Result<DensityMatrix> {
        let (full, part) = embed_operator(u, &self.partition, targets)?;
        Ok(Self::assume_valid(&full * &self.data * full.adjoint(), part))
    }

    /// Mixture `p·self + (1-p)·other` on a shared partition.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        self.require_same_partition(other)?;
        Ok(Self::assume_valid(
            &self.data * C64::new(p, 0.0) + &other.data * C64::new(1.0 - p, 0.0),
            self.partition.clone(),
        ))
    }

    pub fn require_same_partition(&self, other: &DensityMatrix) -> Result<()> {
        if self.partition != other.partition {
            return Err(Error::DimensionMismatch(format!(
                "partitions differ: {:?} vs {:?}",
                self.partition.factors, other.partition.factors
            )));
        }
        Ok(())
    }
}

/// Clamps eigenvalues in `[-PSD_TOL, 0)` to zero and rejects anything lower.
pub(crate) fn clamp_spectrum(vals: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
    vals.map(|v| {
        if v < -PSD_TOL {
            Err(Error::InvalidState(format!("negative eigenvalue {v:e}")))
        } else {
            Ok(v.max(0.0))
        }
    })
    .collect()
}

/// Lifts `op` (acting on `targets`, in the listed order) to the full space.
///
/// A rectangular `op` is allowed for a single target; the returned partition
/// then carries the target's output dimension.
pub fn embed_operator(
    op: &CMatrix,
    partition: &SystemPartition,
    targets: &[&str],
) -> Result<(CMatrix, SystemPartition)> {
    let mut t_idx = Vec::new();
    for l in targets {
        let k = partition.index_of(l)?;
        if t_idx.contains(&k) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
        t_idx.push(k);
    }
    let d_in: usize = t_idx.iter().map(|&k| partition.factors[k].1).product();
    if op.ncols() != d_in {
        return Err(Error::DimensionMismatch(format!(
            "operator has {} columns, targets have dimension {d_in}",
            op.ncols()
        )));
    }
    let out_partition = if op.nrows() == d_in {
        partition.clone()
    } else if t_idx.len() == 1 {
        let mut f = partition.factors.clone();
        f[t_idx[0]].1 = op.nrows();
        SystemPartition::new(f)?
    } else {
        return Err(Error::DimensionMismatch(
            "dimension-changing operators must act on a single factor".into(),
        ));
    };
    let others: Vec<usize> = (0..partition.len()).filter(|k| !t_idx.contains(k)).collect();
    let in_t = linalg::offsets(&partition.layout(&t_idx));
    let in_o = linalg::offsets(&partition.layout(&others));
    let out_t = linalg::offsets(&out_partition.layout(&t_idx));
    let out_o = linalg::offsets(&out_partition.layout(&others));
    let mut full = CMatrix::zeros(out_partition.dim(), partition.dim());
    for (o_in, o_out) in in_o.iter().zip(&out_o) {
        for (a, ta) in out_t.iter().enumerate() {
            for (b, tb) in in_t.iter().enumerate() {
                let v = op[(a, b)];
                if v != ZERO {
                    full[(o_out + ta, o_in + tb)] = v;
                }
            }
        }
    }
    Ok((full, out_partition))
}

/// A CPTP map in Kraus form; each operator is `out_dim × in_dim`.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus set".into()))?;
        let (dout, din) = first.shape();
        if kraus.iter().any(|k| k.shape() != (dout, din)) {
            return Err(Error::InvalidChannel("Kraus operators differ in shape".into()));
        }
        let mut sum = CMatrix::zeros(din, din);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = linalg::max_abs(&(sum - CMatrix::identity(din, din)));
        if defect > 1e-10 {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from identity by {defect:e}"
            )));
        }
        Ok(Self { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![CMatrix::identity(dim, dim)],
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Qubit depolarizing channel `ρ ↦ (1-p)ρ + p I/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("depolarizing p = {p}")));
        }
        let paulis = pauli_matrices();
        let mut kraus = vec![CMatrix::identity(2, 2) * C64::new((1.0 - 0.75 * p).sqrt(), 0.0)];
        for s in paulis {
            kraus.push(s * C64::new((p / 4.0).sqrt(), 0.0));
        }
        Self::new(kraus)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// Sequential composition: `other` after `self`.
    pub fn then(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        if other.input_dim() != self.output_dim() {
            return Err(Error::DimensionMismatch("channel composition".into()));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Self::new(kraus)
    }
}

/// Pauli X, Y, Z.
pub fn pauli_matrices() -> [CMatrix; 3] {
    let i = linalg::I;
    [
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Deterministic generator used by every seeded routine in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent per-sample seed from a suite seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64
    let mut z = seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    haar_from_rng(dim, &mut rng)
}

pub(crate) fn haar_from_rng(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    assert!(dim >= 1, "unitary dimension must be positive");
    let qr = ginibre(dim, dim, rng).qr();
    let (q, r) = qr.unpack();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random state of the given rank: `G G† / tr(G G†)` for a `dim × rank`
/// Ginibre matrix, i.e. the partial trace of a random pure state.
pub fn random_density_matrix(
    partition: SystemPartition,
    rank: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    let d = partition.dim();
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} not in 1..={d}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let g = ginibre(d, rank, &mut rng);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityMatrix::new(m / C64::new(tr, 0.0), partition)
}

/// Random unit vector (Haar measure on the sphere).
pub fn random_pure_vector(dim: usize, seed: u64) -> CVector {
    let mut rng = rng_from_seed(seed);
    let g = ginibre(dim, 1, &mut rng);
    let v: CVector = g.column(0).into_owned();
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Random channel from a Haar-random Stinespring isometry with `n_kraus`
/// environment levels.
pub fn random_channel(dim: usize, n_kraus: usize, seed: u64) -> Result<QuantumChannel> {
    if n_kraus == 0 {
        return Err(Error::InvalidArgument("n_kraus must be positive".into()));
    }
    let u = haar_random_unitary(dim * n_kraus, seed);
    let kraus = (0..n_kraus)
        .map(|k| CMatrix::from_fn(dim, dim, |i, j| u[(i * n_kraus + k, j * n_kraus)]))
        .collect();
    QuantumChannel::new(kraus)
}

/// Random Hermitian matrix with Gaussian entries (GUE, unnormalized).
pub fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    linalg::hermitize(&ginibre(dim, dim, &mut rng))
}

/// Reduced density matrix of the pure state `psi` on the factors `keep`
/// (indices into `dims`, kept in ascending order).
pub fn reduced_from_pure(psi: &CVector, dims: &[usize], keep: &[usize]) -> CMatrix {
    let st = linalg::strides(dims);
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let ko = linalg::offsets(&kept.iter().map(|&k| (dims[k], st[k])).collect::<Vec<_>>());
    let to = linalg::offsets(&traced.iter().map(|&k| (dims[k], st[k])).collect::<Vec<_>>());
    let m = CMatrix::from_fn(ko.len(), to.len(), |a, t| psi[ko[a] + to[t]]);
    &m * m.adjoint()
}

/// Convenience: a real diagonal state.
pub fn diagonal_state(probs: &[f64], partition: SystemPartition) -> Result<DensityMatrix> {
    let v = DVector::from_iterator(probs.len(), probs.iter().map(|&p| C64::new(p, 0.0)));
    DensityMatrix::new(CMatrix::from_diagonal(&v), partition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit(label: &str) -> SystemPartition {
        SystemPartition::qubits(&[label]).unwrap()
    }

    fn ket(bits: &[C64]) -> CVector {
        CVector::from_column_slice(bits)
    }

    #[test]
    fn partition_rejects_duplicates_and_zero_dims() {
        assert!(matches!(
            SystemPartition::qubits(&["A", "A"]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(SystemPartition::new([("A", 0usize)]).is_err());
    }

    #[test]
    fn tensor_of_maximally_mixed_qubits() {
        let a = DensityMatrix::maximally_mixed(qubit("S"));
        let b = DensityMatrix::maximally_mixed(qubit("A"));
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.partition().labels().collect::<Vec<_>>(), ["S", "A"]);
        let expect = CMatrix::identity(4, 4) * C64::new(0.25, 0.0);
        assert!(linalg::max_abs(&(ab.data() - expect)) < 1e-15);
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = DensityMatrix::basis(qubit("S"), 0).unwrap();
        let one = DensityMatrix::basis(qubit("A"), 1).unwrap();
        let zo = zero.tensor(&one).unwrap();
        assert_eq!(zo.data()[(1, 1)], ONE);
        assert!((zo.trace() - ONE).norm() < 1e-15);
    }

    #[test]
    fn tensor_label_collision() {
        let a = DensityMatrix::maximally_mixed(qubit("S"));
        assert!(matches!(a.tensor(&a), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn tensor_spectrum_is_product_of_spectra() {
        let r = random_density_matrix(qubit("S"), 2, 3).unwrap();
        let s = random_density_matrix(qubit("A"), 2, 4).unwrap();
        let rs = r.tensor(&s).unwrap();
        assert!((rs.trace() - ONE).norm() < 1e-14);
        let mut got = rs.eigenvalues().unwrap();
        let mut want: Vec<f64> = r
            .eigenvalues()
            .unwrap()
            .iter()
            .flat_map(|a| s.eigenvalues().unwrap().into_iter().map(move |b| a * b))
            .collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = ket(&[h, ZERO, ZERO, h]);
        let rho = DensityMatrix::from_pure(&bell, SystemPartition::qubits(&["S", "A"]).unwrap())
            .unwrap();
        let s = rho.partial_trace(&["S"]).unwrap();
        let expect = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(linalg::max_abs(&(s.data() - expect)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_ghz_keeps_classical_correlation() {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut v = CVector::zeros(8);
        v[0] = h;
        v[7] = h;
        let rho =
            DensityMatrix::from_pure(&v, SystemPartition::qubits(&["A", "S", "E"]).unwrap())
                .unwrap();
        let as_ = rho.partial_trace(&["A", "S"]).unwrap();
        let expect = diagonal_state(&[0.5, 0.0, 0.0, 0.5], SystemPartition::qubits(&["A", "S"]).unwrap()).unwrap();
        assert!(linalg::max_abs(&(as_.data() - expect.data())) < 1e-15);
    }

    #[test]
    fn partial_trace_unknown_label() {
        let a = DensityMatrix::maximally_mixed(qubit("S"));
        assert!(matches!(a.partial_trace(&["E"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn partial_trace_keeps_original_order() {
        let p = SystemPartition::qubits(&["A", "S", "E"]).unwrap();
        let rho = random_density_matrix(p, 8, 11).unwrap();
        let r1 = rho.partial_trace(&["E", "A"]).unwrap();
        assert_eq!(r1.partition().labels().collect::<Vec<_>>(), ["A", "E"]);
    }

    #[test]
    fn reorder_round_trip() {
        let p = SystemPartition::new([("A", 2usize), ("S", 3), ("E", 2)]).unwrap();
        let rho = random_density_matrix(p, 4, 5).unwrap();
        let back = rho
            .reorder(&["E", "A", "S"])
            .unwrap()
            .reorder(&["A", "S", "E"])
            .unwrap();
        assert!(linalg::max_abs(&(back.data() - rho.data())) < 1e-15);
        // reordering then tracing agrees with tracing directly
        let r = rho.reorder(&["S", "E", "A"]).unwrap().partial_trace(&["S"]).unwrap();
        let s = rho.partial_trace(&["S"]).unwrap();
        assert!(linalg::max_abs(&(r.data() - s.data())) < 1e-14);
    }

    #[test]
    fn identity_channel_is_trivial() {
        let p = SystemPartition::qubits(&["S", "A"]).unwrap();
        let rho = random_density_matrix(p, 3, 9).unwrap();
        let out = rho.apply_channel(&QuantumChannel::identity(2), "A").unwrap();
        assert!(linalg::max_abs(&(out.data() - rho.data())) < 1e-15);
    }

    #[test]
    fn full_depolarizing_destroys_correlations() {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = ket(&[h, ZERO, ZERO, h]);
        let rho = DensityMatrix::from_pure(&bell, SystemPartition::qubits(&["S", "A"]).unwrap())
            .unwrap();
        let out = rho
            .apply_channel(&QuantumChannel::depolarizing(1.0).unwrap(), "S")
            .unwrap();
        let expect = CMatrix::identity(4, 4) * C64::new(0.25, 0.0);
        assert!(linalg::max_abs(&(out.data() - expect)) < 1e-15);
    }

    #[test]
    fn unitary_channel_preserves_spectrum() {
        let p = SystemPartition::qubits(&["S", "A"]).unwrap();
        let rho = random_density_matrix(p, 4, 21).unwrap();
        let u = haar_random_unitary(2, 22);
        let out = rho
            .apply_channel(&QuantumChannel::unitary(u).unwrap(), "A")
            .unwrap();
        let mut a = rho.eigenvalues().unwrap();
        let mut b = out.eigenvalues().unwrap();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn channel_dimension_errors() {
        let rho = DensityMatrix::maximally_mixed(qubit("S"));
        assert!(matches!(
            rho.apply_channel(&QuantumChannel::identity(3), "S"),
            Err(Error::DimensionMismatch(_))
        ));
        let bad = vec![CMatrix::identity(2, 2) * C64::new(0.5, 0.0)];
        assert!(matches!(QuantumChannel::new(bad), Err(Error::InvalidChannel(_))));
    }

    #[test]
    fn haar_unitary_properties() {
        let u1 = haar_random_unitary(1, 4);
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-14);
        for dim in [2, 3, 8] {
            let u = haar_random_unitary(dim, 17);
            let defect = linalg::max_abs(&(u.adjoint() * &u - CMatrix::identity(dim, dim)));
            assert!(defect <= 1e-12, "defect {defect}");
        }
        assert_eq!(haar_random_unitary(4, 1), haar_random_unitary(4, 1));
        assert_ne!(haar_random_unitary(4, 1), haar_random_unitary(4, 2));
    }

    #[test]
    fn random_density_matrix_ranks() {
        let p = SystemPartition::qubits(&["A", "S"]).unwrap();
        let pure = random_density_matrix(p.clone(), 1, 1).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let full = random_density_matrix(p.clone(), 4, 1).unwrap();
        let min = full.eigenvalues().unwrap().into_iter().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);
        let again = random_density_matrix(p.clone(), 4, 1).unwrap();
        assert_eq!(full, again);
        assert!(random_density_matrix(p, 5, 1).is_err());
    }

    #[test]
    fn invalid_states_are_rejected() {
        let p = qubit("S");
        let neg = CMatrix::from_diagonal(&CVector::from_column_slice(&[
            C64::new(1.5, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(neg, p.clone()).is_err());
        let nonherm = CMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)]);
        assert!(DensityMatrix::new(nonherm, p).is_err());
    }

    #[test]
    fn reduced_from_pure_matches_partial_trace() {
        let p = SystemPartition::new([("A", 2usize), ("S", 3), ("E", 2)]).unwrap();
        let v = random_pure_vector(12, 8);
        let rho = DensityMatrix::from_pure(&v, p).unwrap();
        let direct = rho.partial_trace(&["A", "E"]).unwrap();
        let fast = reduced_from_pure(&v, &[2, 3, 2], &[0, 2]);
        assert!(linalg::max_abs(&(direct.data() - fast)) < 1e-14);
    }
}
