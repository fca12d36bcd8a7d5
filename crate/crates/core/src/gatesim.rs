//! Dense simulation of gate replication for qubits.
//!
//! `N` uses of an unknown `U` are stretched to `M` uses by projecting the
//! `M`-qubit input onto the total-spin sectors `j <= N/2`: on that subspace
//! `U^{⊗M}` is implemented exactly, and outside it the identity is applied.
//! Everything here is brute force on `2^M` amplitudes and serves as an oracle
//! for the closed forms in [`crate::schur`].
//!
//! Qubit `a` of an `M`-qubit register is bit `a` of the basis index.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register simulated densely.
pub const DENSE_LIMIT: u64 = 12;

/// Samples per independent random stream. Batches are combined in index
/// order, so estimates do not depend on the worker count.
pub const BATCH_SIZE: u64 = 256;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_dense(qubits: u64) -> Result<()> {
    if qubits > DENSE_LIMIT {
        return Err(Error::DenseLimit { qubits, limit: DENSE_LIMIT });
    }
    Ok(())
}

fn check_replication(n: u64, m: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N", "at least one gate use is required"));
    }
    crate::error::require_outputs(n, m)?;
    check_dense(m)
}

/// Unit vector of amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseState {
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if amplitudes.is_empty() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("amplitudes", format!("squared norm {norm} is not 1")));
        }
        Ok(DenseState { amplitudes })
    }

    /// Rescales to unit norm; a zero vector is rejected.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::invalid("amplitudes", "cannot normalize the zero vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(DenseState { amplitudes })
    }

    /// Uniform superposition of the `M`-qubit strings with `ones` set bits.
    pub fn dicke(qubits: u64, ones: u64) -> Result<Self> {
        check_dense(qubits)?;
        if ones > qubits {
            return Err(Error::invalid("ones", format!("{ones} exceeds {qubits} qubits")));
        }
        let amplitudes = (0..1usize << qubits)
            .map(|i| if i.count_ones() as u64 == ones { Complex64::new(1.0, 0.0) } else { ZERO })
            .collect();
        Self::normalized(amplitudes)
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &DenseState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("matrix", format!("{}x{} is not square", matrix.nrows(), matrix.ncols())));
        }
        Ok(DenseOperator { matrix })
    }

    /// Accepts `matrix` only if `U^dag U = I` within `1e-9`.
    pub fn unitary(matrix: DMatrix<Complex64>) -> Result<Self> {
        let op = Self::new(matrix)?;
        let deviation = op.unitarity_deviation();
        if deviation > 1e-9 {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(op)
    }

    pub fn identity(dimension: usize) -> Self {
        DenseOperator { matrix: DMatrix::identity(dimension, dimension) }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Largest entry of `|U^dag U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = self.matrix.adjoint() * &self.matrix;
        let eye = DMatrix::<Complex64>::identity(self.dimension(), self.dimension());
        (product - eye).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, state: &DenseState) -> Result<DenseState> {
        if state.dimension() != self.dimension() {
            return Err(Error::invalid("state", "dimension mismatch"));
        }
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        DenseState::normalized((&self.matrix * v).as_slice().to_vec())
    }

    /// `self^{⊗copies}` as a dense matrix.
    pub fn tensor_power(&self, copies: u32) -> DenseOperator {
        let mut out = DMatrix::<Complex64>::identity(1, 1);
        for _ in 0..copies {
            out = out.kronecker(&self.matrix);
        }
        DenseOperator { matrix: out }
    }

    pub(crate) fn as_qubit_gate(&self) -> Result<Matrix2<Complex64>> {
        if self.dimension() != 2 {
            return Err(Error::invalid("U", format!("expected a 2x2 gate, got {0}x{0}", self.dimension())));
        }
        Ok(Matrix2::from_fn(|r, c| self.matrix[(r, c)]))
    }
}

/// Applies `u` to every qubit of a `2^M` amplitude vector, in place.
fn apply_product(u: &Matrix2<Complex64>, amplitudes: &mut [Complex64]) {
    let dim = amplitudes.len();
    let mut bit = 1;
    while bit < dim {
        for base in (0..dim).filter(|i| i & bit == 0) {
            let (a0, a1) = (amplitudes[base], amplitudes[base | bit]);
            amplitudes[base] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            amplitudes[base | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
        bit <<= 1;
    }
}

/// Haar-random `d x d` unitary: QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DenseOperator {
    let ginibre = DMatrix::<Complex64>::from_fn(d, d, |_, _| gaussian(rng));
    let qr = ginibre.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    DenseOperator { matrix: q }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state of `qubits` qubits.
pub fn haar_state<R: Rng + ?Sized>(qubits: u64, rng: &mut R) -> Result<DenseState> {
    check_dense(qubits)?;
    DenseState::normalized((0..1usize << qubits).map(|_| gaussian(rng)).collect())
}

/// Orthogonal projector onto the total-spin sectors `j <= N/2` of `M` qubits.
///
/// Total spin conserves the number of set bits, so the projector is stored
/// as one real orthonormal basis per Hamming-weight block.
#[derive(Debug, Clone)]
pub struct SpinProjector {
    qubits: u64,
    max_two_j: u64,
    blocks: Vec<ProjectorBlock>,
}

#[derive(Debug, Clone)]
struct ProjectorBlock {
    indices: Vec<usize>,
    basis: DMatrix<f64>,
}

/// `S^2` restricted to the strings of one Hamming weight:
/// `3M/4 - M(M-1)/4 + sum_{a<b} SWAP_ab`.
fn casimir_block(qubits: u64, indices: &[usize]) -> DMatrix<f64> {
    let size = indices.len();
    let m = qubits as f64;
    let mut s2 = DMatrix::<f64>::from_diagonal_element(size, size, 0.75 * m - 0.25 * m * (m - 1.0));
    let position: std::collections::HashMap<usize, usize> = indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    for (col, &i) in indices.iter().enumerate() {
        for a in 0..qubits {
            for b in a + 1..qubits {
                let (ba, bb) = ((i >> a) & 1, (i >> b) & 1);
                let swapped = if ba == bb { i } else { i ^ (1 << a) ^ (1 << b) };
                s2[(position[&swapped], col)] += 1.0;
            }
        }
    }
    s2
}

fn weight_blocks(qubits: u64) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); qubits as usize + 1];
    for i in 0..1usize << qubits {
        blocks[i.count_ones() as usize].push(i);
    }
    blocks
}

/// `2j` from a Casimir eigenvalue `j(j+1)`.
fn two_j_of(eigenvalue: f64) -> u64 {
    ((4.0 * eigenvalue + 1.0).max(0.0).sqrt() - 1.0).round() as u64
}

/// Builds `P_N` on `M` qubits by diagonalizing the total-spin Casimir block by block.
pub fn build_projector(n: u64, m: u64) -> Result<SpinProjector> {
    check_replication(n, m)?;
    let blocks = weight_blocks(m)
        .into_iter()
        .map(|indices| {
            let eigen = SymmetricEigen::new(casimir_block(m, &indices));
            let keep: Vec<usize> = (0..indices.len()).filter(|&c| two_j_of(eigen.eigenvalues[c]) <= n).collect();
            let basis = DMatrix::from_fn(indices.len(), keep.len(), |r, c| eigen.eigenvectors[(r, keep[c])]);
            ProjectorBlock { indices, basis }
        })
        .collect();
    Ok(SpinProjector { qubits: m, max_two_j: n, blocks })
}

impl SpinProjector {
    pub fn qubits(&self) -> u64 {
        self.qubits
    }

    /// Largest `2j` kept.
    pub fn max_two_j(&self) -> u64 {
        self.max_two_j
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.basis.ncols()).sum()
    }

    pub fn apply_slice(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; amplitudes.len()];
        for block in &self.blocks {
            let r = block.basis.ncols();
            if r == 0 {
                continue;
            }
            let mut coeff = vec![ZERO; r];
            for (row, &i) in block.indices.iter().enumerate() {
                let a = amplitudes[i];
                for (c, slot) in coeff.iter_mut().enumerate() {
                    *slot += a * block.basis[(row, c)];
                }
            }
            for (row, &i) in block.indices.iter().enumerate() {
                out[i] = coeff.iter().enumerate().map(|(c, &k)| k * block.basis[(row, c)]).sum();
            }
        }
        out
    }

    /// `P|psi>`, unnormalized.
    pub fn apply(&self, state: &DenseState) -> Vec<Complex64> {
        self.apply_slice(state.amplitudes())
    }

    /// `<psi|P|psi>`.
    pub fn expectation(&self, state: &DenseState) -> f64 {
        self.apply(state).iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_operator(&self) -> DenseOperator {
        let dim = 1usize << self.qubits;
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for block in &self.blocks {
            let local = &block.basis * block.basis.transpose();
            for (r, &i) in block.indices.iter().enumerate() {
                for (c, &j) in block.indices.iter().enumerate() {
                    matrix[(i, j)] = Complex64::new(local[(r, c)], 0.0);
                }
            }
        }
        DenseOperator { matrix }
    }
}

/// `(2j, multiplicity)` pairs of `K` qubits read off the dense Casimir spectrum.
pub fn total_spin_spectrum(qubits: u64) -> Result<Vec<(u64, u64)>> {
    if qubits == 0 {
        return Err(Error::invalid("K", "at least one qubit is required"));
    }
    check_dense(qubits)?;
    let mut counts = std::collections::BTreeMap::<u64, u64>::new();
    for indices in weight_blocks(qubits) {
        let eigen = SymmetricEigen::new(casimir_block(qubits, &indices));
        for &value in eigen.eigenvalues.iter() {
            *counts.entry(two_j_of(value)).or_insert(0) += 1;
        }
    }
    Ok(counts.into_iter().rev().map(|(two_j, dim)| (two_j, dim / (two_j + 1))).collect())
}

/// One branch of the replication instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    /// Renormalized output; absent when the branch never occurs.
    pub state: Option<DenseState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    /// `U^{⊗M} P |psi>`.
    pub success: Branch,
    /// `(I - P)|psi>`, left untouched.
    pub failure: Branch,
}

fn branch(amplitudes: Vec<Complex64>) -> Branch {
    let probability: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let state = if probability > 1e-24 { DenseState::normalized(amplitudes).ok() } else { None };
    Branch { probability, state }
}

/// A replication network `N -> M` for qubit gates.
#[derive(Debug, Clone)]
pub struct ReplicationNetwork {
    n: u64,
    projector: SpinProjector,
}

impl ReplicationNetwork {
    pub fn new(n: u64, m: u64) -> Result<Self> {
        Ok(ReplicationNetwork { n, projector: build_projector(n, m)? })
    }

    pub fn uses(&self) -> u64 {
        self.n
    }

    pub fn outputs(&self) -> u64 {
        self.projector.qubits
    }

    pub fn projector(&self) -> &SpinProjector {
        &self.projector
    }

    fn check_input(&self, input: &DenseState) -> Result<()> {
        if input.dimension() != 1usize << self.outputs() {
            return Err(Error::invalid("input", format!("expected {} qubits", self.outputs())));
        }
        Ok(())
    }

    pub fn run(&self, u: &DenseOperator, input: &DenseState) -> Result<ChannelOutput> {
        self.check_input(input)?;
        let gate = checked_gate(u)?;
        let mut success = self.projector.apply(input);
        let failure: Vec<Complex64> = input.amplitudes().iter().zip(&success).map(|(a, p)| a - p).collect();
        apply_product(&gate, &mut success);
        Ok(ChannelOutput { success: branch(success), failure: branch(failure) })
    }

    /// `<psi|(U^dag)^{⊗M} C_U(|psi><psi|) U^{⊗M}|psi>`.
    pub fn fidelity(&self, u: &DenseOperator, input: &DenseState) -> Result<f64> {
        self.check_input(input)?;
        Ok(self.fidelity_unchecked(&checked_gate(u)?, input.amplitudes()))
    }

    fn fidelity_unchecked(&self, gate: &Matrix2<Complex64>, psi: &[Complex64]) -> f64 {
        let mut ideal = psi.to_vec();
        apply_product(gate, &mut ideal);
        let mut success = self.projector.apply_slice(psi);
        let failure: Vec<Complex64> = psi.iter().zip(&success).map(|(a, p)| a - p).collect();
        apply_product(gate, &mut success);
        inner(&ideal, &success).norm_sqr() + inner(&ideal, &failure).norm_sqr()
    }
}

fn checked_gate(u: &DenseOperator) -> Result<Matrix2<Complex64>> {
    let gate = u.as_qubit_gate()?;
    let deviation = u.unitarity_deviation();
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(gate)
}

/// Runs the replication instrument once: `(U^{⊗M} P|psi>, (I - P)|psi>)` with probabilities.
pub fn replication_channel(u: &DenseOperator, n: u64, m: u64, input: &DenseState) -> Result<ChannelOutput> {
    ReplicationNetwork::new(n, m)?.run(u, input)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, workers: 1 }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        McConfig { workers, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Running mean and squared deviation (Welford), merged with Chan's rule.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * weight,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * weight,
        }
    }
}

/// Averages `sample` over `config.samples` draws.
///
/// Batch `b` draws from ChaCha8 seeded with `config.seed` on stream `b`; the
/// result is bit-identical for every worker count.
pub fn monte_carlo<F>(config: &McConfig, sample: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if config.samples < 2 {
        return Err(Error::invalid("samples", "at least two samples are needed for an error estimate"));
    }
    if config.workers == 0 {
        return Err(Error::invalid("workers", "at least one worker is required"));
    }
    let batches = config.samples.div_ceil(BATCH_SIZE);
    let run = |b: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(b);
        let mut moments = Moments::default();
        for _ in 0..BATCH_SIZE.min(config.samples - b * BATCH_SIZE) {
            moments.push(sample(&mut rng));
        }
        moments
    };
    let partial: Vec<Moments> = if config.workers == 1 {
        (0..batches).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        pool.install(|| (0..batches).into_par_iter().map(run).collect())
    };
    let total = partial.into_iter().fold(Moments::default(), Moments::merge);
    let n = total.count as f64;
    Ok(McEstimate {
        mean: total.mean,
        std_error: (total.m2.max(0.0) / (n - 1.0)).sqrt() / n.sqrt(),
        samples: config.samples,
        seed: config.seed,
        workers: config.workers,
    })
}

/// Haar average over `U` and `|psi>` of the replicated gate's fidelity.
pub fn mc_gate_fidelity(n: u64, m: u64, config: &McConfig) -> Result<McEstimate> {
    if config.samples < 100 {
        return Err(Error::invalid("samples", "gate fidelity estimates need at least 100 samples"));
    }
    let network = ReplicationNetwork::new(n, m)?;
    monte_carlo(config, |rng| {
        let u = haar_unitary(2, rng).as_qubit_gate().expect("2x2");
        let psi = haar_state(m, rng).expect("within dense limit");
        network.fidelity_unchecked(&u, psi.amplitudes())
    })
}

/// Haar average of `<psi|P_N|psi>`.
pub fn mc_projector_overlap(n: u64, m: u64, config: &McConfig) -> Result<McEstimate> {
    let projector = build_projector(n, m)?;
    monte_carlo(config, |rng| projector.expectation(&haar_state(m, rng).expect("within dense limit")))
}

/// `E<psi|P|psi> = Tr P / D` and `E<psi|P|psi>^2 = Tr P (Tr P + 1) / (D (D + 1))` over Haar states.
pub fn exact_moments(n: u64, m: u64) -> Result<(f64, f64)> {
    let rank = build_projector(n, m)?.rank() as f64;
    let dim = (1u64 << m) as f64;
    Ok((rank / dim, rank * (rank + 1.0) / (dim * (dim + 1.0))))
}

/// `((d^M + 1) F_gate - 1) / d^M`.
pub fn entanglement_fidelity(d: u64, m: u64, gate_fidelity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gate_fidelity) {
        return Err(Error::invalid("F_gate", "must lie in [0, 1]"));
    }
    if d < 2 {
        return Err(Error::invalid("d", "dimension must be at least 2"));
    }
    // Same expression as 1 - (1 + d^-M)(1 - F_gate), which stays finite for large M.
    let inverse = (-(m as f64) * (d as f64).ln()).exp();
    Ok(1.0 - (1.0 + inverse) * (1.0 - gate_fidelity))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementEstimate {
    pub fidelity: McEstimate,
    /// `(1/4)^N`: probability that gate teleportation extracts all `N` uses.
    pub extraction_probability: f64,
}

/// Replication applied to the system halves of `M` Bell pairs, scored against
/// `(U ⊗ I)^{⊗M}|Φ+>^{⊗M}` and averaged over Haar `U`.
pub fn mc_ent_superreplication(n: u64, m: u64, config: &McConfig) -> Result<EntanglementEstimate> {
    let network = ReplicationNetwork::new(n, m)?;
    let dim = 1usize << m;
    let fidelity = monte_carlo(config, |rng| {
        let u = haar_unitary(2, rng).as_qubit_gate().expect("2x2");
        // Column i of the joint state is the system vector paired with reference |i>.
        let (mut success, mut overlap_fail) = (ZERO, ZERO);
        for i in 0..dim {
            let mut column = vec![ZERO; dim];
            column[i] = Complex64::new(1.0, 0.0);
            let mut ideal = column.clone();
            apply_product(&u, &mut ideal);
            let mut kept = network.projector.apply_slice(&column);
            let rest: Vec<Complex64> = column.iter().zip(&kept).map(|(a, p)| a - p).collect();
            apply_product(&u, &mut kept);
            success += inner(&ideal, &kept);
            overlap_fail += inner(&ideal, &rest);
        }
        let norm = dim as f64;
        (success / norm).norm_sqr() + (overlap_fail / norm).norm_sqr()
    })?;
    Ok(EntanglementEstimate { fidelity, extraction_probability: 0.25f64.powi(n as i32) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub min_fidelity: f64,
    pub argmin_index: usize,
    pub per_probe: Vec<McEstimate>,
}

/// Haar average over `U` of the fidelity on each supplied input; reports the worst.
///
/// Every probe sees the same sequence of unitaries.
pub fn worst_case_probe(n: u64, m: u64, probes: &[DenseState], config: &McConfig) -> Result<ProbeReport> {
    if probes.is_empty() {
        return Err(Error::invalid("probes", "at least one probe is required"));
    }
    let network = ReplicationNetwork::new(n, m)?;
    let per_probe = probes
        .iter()
        .map(|probe| {
            network.check_input(probe)?;
            monte_carlo(config, |rng| {
                let u = haar_unitary(2, rng).as_qubit_gate().expect("2x2");
                network.fidelity_unchecked(&u, probe.amplitudes())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (argmin_index, min_fidelity) = per_probe
        .iter()
        .enumerate()
        .map(|(i, e)| (i, e.mean))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(ProbeReport { min_fidelity, argmin_index, per_probe })
}

/// Haar state projected into the replicated subspace `range(P_N)`.
pub fn projected_probe<R: Rng + ?Sized>(n: u64, m: u64, rng: &mut R) -> Result<DenseState> {
    let projector = build_projector(n, m)?;
    DenseState::normalized(projector.apply(&haar_state(m, rng)?))
}
