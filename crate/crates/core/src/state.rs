//! Dense quantum state over a small register, with two interchangeable
//! backends: a pure state vector for quantum-trajectory sampling and a full
//! density matrix for exact channel evolution.
//!
//! Basis indexing is little-endian: qubit `i` occupies bit `i` of the basis
//! index. A density matrix over `n` qubits is stored flat as `r * 2^n + c`,
//! which lets every gate kernel treat it as a `2n`-qubit amplitude vector
//! (rows at bit offset `n`, columns at bit offset 0).

use num_complex::Complex64;
use rand::Rng;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue_hermitian, CMatrix, C64, C_ZERO};
use crate::pauli::PauliString;

/// Maximum register size supported by the dense backends.
pub const MAX_QUBITS: usize = 8;

/// Probability floor guarding renormalization of near-impossible branches.
pub const BRANCH_PROB_FLOOR: f64 = 1e-30;

const UNITARY_TOL: f64 = 1e-10;

/// Storage backend for a [`QuantumState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateBackend {
    /// Pure state vector; channels are unravelled by sampling one Kraus
    /// branch per application.
    PureVector,
    /// Density matrix; channels apply the full Kraus sum.
    DensityMatrix,
}

#[derive(Debug, Clone)]
enum Storage {
    Pure(Vec<C64>),
    Density(Vec<C64>),
}

/// Quantum state of an `n`-qubit register.
#[derive(Debug, Clone)]
pub struct QuantumState {
    n: usize,
    storage: Storage,
}

impl QuantumState {
    /// All-zeros computational basis state.
    pub fn zero(n: usize, backend: StateBackend) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS, "register size {n} outside 1..={MAX_QUBITS}");
        let dim = 1usize << n;
        match backend {
            StateBackend::PureVector => {
                let mut amps = vec![C_ZERO; dim];
                amps[0] = Complex64::new(1.0, 0.0);
                QuantumState { n, storage: Storage::Pure(amps) }
            }
            StateBackend::DensityMatrix => {
                let mut flat = vec![C_ZERO; dim * dim];
                flat[0] = Complex64::new(1.0, 0.0);
                QuantumState { n, storage: Storage::Density(flat) }
            }
        }
    }

    /// Pure state from explicit amplitudes (normalized on input).
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector length {dim} is not a power of two"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::DimensionMismatch(format!("{n} qubits exceeds limit {MAX_QUBITS}")));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("amplitudes have norm {norm}, expected 1")));
        }
        Ok(QuantumState { n, storage: Storage::Pure(amps) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn backend(&self) -> StateBackend {
        match self.storage {
            Storage::Pure(_) => StateBackend::PureVector,
            Storage::Density(_) => StateBackend::DensityMatrix,
        }
    }

    /// Promote a pure state to its density matrix |psi><psi|.
    pub fn to_density(&self) -> QuantumState {
        match &self.storage {
            Storage::Density(_) => self.clone(),
            Storage::Pure(amps) => {
                let dim = amps.len();
                let mut flat = vec![C_ZERO; dim * dim];
                for r in 0..dim {
                    for c in 0..dim {
                        flat[r * dim + c] = amps[r] * amps[c].conj();
                    }
                }
                QuantumState { n: self.n, storage: Storage::Density(flat) }
            }
        }
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.storage {
            Storage::Pure(a) => Some(a),
            Storage::Density(_) => None,
        }
    }

    /// Density-matrix element (row, col); pure states are expanded on the fly.
    pub fn density_element(&self, r: usize, c: usize) -> C64 {
        match &self.storage {
            Storage::Pure(a) => a[r] * a[c].conj(),
            Storage::Density(flat) => flat[r * self.dim() + c],
        }
    }

    /// Probability of each computational basis outcome.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Pure(a) => a.iter().map(|x| x.norm_sqr()).collect(),
            Storage::Density(flat) => {
                let dim = self.dim();
                (0..dim).map(|i| flat[i * dim + i].re).collect()
            }
        }
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(Error::QubitOutOfRange { index: t, n_qubits: self.n });
            }
            if targets[i + 1..].contains(&t) {
                return Err(Error::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Apply a unitary on `targets`; bit `j` of the matrix index corresponds
    /// to `targets[j]`. The matrix is checked for unitarity.
    pub fn apply_unitary(&mut self, u: &CMatrix, targets: &[usize]) -> Result<()> {
        if u.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} does not match {} target qubits",
                u.dim(),
                targets.len()
            )));
        }
        self.check_targets(targets)?;
        u.check_unitary(UNITARY_TOL)?;
        self.apply_matrix_unchecked(u, targets);
        Ok(())
    }

    /// Internal gate application without the unitarity check.
    pub(crate) fn apply_matrix_unchecked(&mut self, u: &CMatrix, targets: &[usize]) {
        match &mut self.storage {
            Storage::Pure(amps) => apply_matrix(amps, u, targets),
            Storage::Density(flat) => {
                let n = self.n;
                let row_targets: Vec<usize> = targets.iter().map(|&t| t + n).collect();
                apply_matrix(flat, u, &row_targets);
                apply_matrix(flat, &u.conj(), targets);
            }
        }
    }

    /// Apply a bijection of basis indices (a permutation gate such as X,
    /// CNOT, SWAP or a parity map).
    pub(crate) fn apply_permutation(&mut self, perm: impl Fn(usize) -> usize) {
        let dim = self.dim();
        match &mut self.storage {
            Storage::Pure(amps) => {
                let mut out = vec![C_ZERO; dim];
                for (x, &a) in amps.iter().enumerate() {
                    out[perm(x)] = a;
                }
                *amps = out;
            }
            Storage::Density(flat) => {
                let mut out = vec![C_ZERO; dim * dim];
                for r in 0..dim {
                    let pr = perm(r);
                    for c in 0..dim {
                        out[pr * dim + perm(c)] = flat[r * dim + c];
                    }
                }
                *flat = out;
            }
        }
    }

    /// Apply a Kraus channel on `targets`.
    ///
    /// Pure backend: one branch is sampled with its Born probability (the
    /// quantum-trajectory unravelling), so `rng` is consumed. Density
    /// backend: the full sum is applied and `rng` is untouched.
    pub fn apply_channel<R: Rng>(
        &mut self,
        channel: &KrausChannel,
        targets: &[usize],
        rng: &mut R,
    ) -> Result<()> {
        if channel.n_target_qubits() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "channel acts on {} qubits but {} targets given",
                channel.n_target_qubits(),
                targets.len()
            )));
        }
        self.check_targets(targets)?;
        match &mut self.storage {
            Storage::Pure(amps) => {
                let mut branch_amps: Vec<Vec<C64>> = Vec::with_capacity(channel.operators().len());
                let mut probs: Vec<f64> = Vec::with_capacity(channel.operators().len());
                for k in channel.operators() {
                    let mut cand = amps.clone();
                    apply_matrix(&mut cand, k, targets);
                    let p: f64 = cand.iter().map(|a| a.norm_sqr()).sum();
                    probs.push(p);
                    branch_amps.push(cand);
                }
                let total: f64 = probs.iter().sum();
                let mut u = rng.gen::<f64>() * total;
                let mut chosen = probs.len() - 1;
                for (i, &p) in probs.iter().enumerate() {
                    if u < p {
                        chosen = i;
                        break;
                    }
                    u -= p;
                }
                let p = probs[chosen].max(BRANCH_PROB_FLOOR);
                let scale = Complex64::new(1.0 / p.sqrt(), 0.0);
                *amps = branch_amps.swap_remove(chosen);
                for a in amps.iter_mut() {
                    *a *= scale;
                }
            }
            Storage::Density(flat) => {
                let n = self.n;
                let row_targets: Vec<usize> = targets.iter().map(|&t| t + n).collect();
                let mut out = vec![C_ZERO; flat.len()];
                for k in channel.operators() {
                    let mut term = flat.clone();
                    apply_matrix(&mut term, k, &row_targets);
                    apply_matrix(&mut term, &k.conj(), targets);
                    for (o, t) in out.iter_mut().zip(&term) {
                        *o += t;
                    }
                }
                *flat = out;
            }
        }
        Ok(())
    }

    /// Expectation value of a Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "Pauli string length {} does not match register size {}",
                p.len(),
                self.n
            )));
        }
        let flip = p.flip_mask();
        let value = match &self.storage {
            Storage::Pure(amps) => {
                let mut acc = C_ZERO;
                for (x, &a) in amps.iter().enumerate() {
                    acc += amps[x ^ flip].conj() * p.phase(x) * a;
                }
                acc.re
            }
            Storage::Density(flat) => {
                // Tr(rho P) = sum_x rho[x, x^flip] * phase(x)
                let dim = self.dim();
                let mut acc = C_ZERO;
                for x in 0..dim {
                    acc += flat[x * dim + (x ^ flip)] * p.phase(x);
                }
                acc.re
            }
        };
        Ok(value)
    }

    /// Projective measurement of a Pauli string. Returns the sampled +-1
    /// outcome; the state collapses to the renormalized projection.
    pub fn measure_pauli<R: Rng>(&mut self, p: &PauliString, rng: &mut R) -> Result<i8> {
        if p.is_identity() {
            return Err(Error::AllIdentityPauli);
        }
        let expect = self.expectation(p)?;
        let p_plus = ((1.0 + expect) / 2.0).clamp(0.0, 1.0);
        let outcome: i8 = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        let branch_prob = if outcome == 1 { p_plus } else { 1.0 - p_plus };
        self.project_pauli(p, outcome, branch_prob.max(BRANCH_PROB_FLOOR));
        Ok(outcome)
    }

    fn project_pauli(&mut self, p: &PauliString, sign: i8, branch_prob: f64) {
        let flip = p.flip_mask();
        let s = Complex64::new(sign as f64, 0.0);
        match &mut self.storage {
            Storage::Pure(amps) => {
                // (psi + s P psi) / 2, then renormalize.
                let mut projected = vec![C_ZERO; amps.len()];
                for (x, &a) in amps.iter().enumerate() {
                    projected[x ^ flip] += s * p.phase(x) * a;
                }
                let scale = Complex64::new(0.5 / branch_prob.sqrt(), 0.0);
                for (a, &pr) in amps.iter_mut().zip(&projected) {
                    *a = (*a + pr) * scale;
                }
            }
            Storage::Density(flat) => {
                // Pi rho Pi with Pi = (I + s P)/2, then renormalize.
                let dim = 1usize << self.n;
                let left = {
                    // P rho: out[x, y] = phase(x^flip) rho[x^flip, y]
                    let mut out = vec![C_ZERO; flat.len()];
                    for x in 0..dim {
                        let ph = p.phase(x ^ flip);
                        for y in 0..dim {
                            out[x * dim + y] = ph * flat[(x ^ flip) * dim + y];
                        }
                    }
                    out
                };
                let right = {
                    // rho P: out[x, y] = rho[x, y^flip] phase(y^flip)
                    let mut out = vec![C_ZERO; flat.len()];
                    for x in 0..dim {
                        for y in 0..dim {
                            out[x * dim + y] = flat[x * dim + (y ^ flip)] * p.phase(y ^ flip);
                        }
                    }
                    out
                };
                let both = {
                    // P rho P: left-multiplied buffer, then right multiply.
                    let mut out = vec![C_ZERO; flat.len()];
                    for x in 0..dim {
                        for y in 0..dim {
                            out[x * dim + y] = left[x * dim + (y ^ flip)] * p.phase(y ^ flip);
                        }
                    }
                    out
                };
                let scale = 0.25 / branch_prob;
                for i in 0..flat.len() {
                    flat[i] = (flat[i] + s * left[i] + s * right[i] + both[i])
                        * Complex64::new(scale, 0.0);
                }
            }
        }
    }

    /// Measure qubit `q` in the Z basis; returns the bit and collapses.
    pub fn measure_qubit<R: Rng>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n });
        }
        let p0 = self.qubit_zero_probability(q);
        let bit = if rng.gen::<f64>() < p0 { 0u8 } else { 1u8 };
        let branch = if bit == 0 { p0 } else { 1.0 - p0 };
        self.project_qubit(q, bit, branch.max(BRANCH_PROB_FLOOR));
        Ok(bit)
    }

    /// Probability that qubit `q` reads 0.
    pub fn qubit_zero_probability(&self, q: usize) -> f64 {
        let mask = 1usize << q;
        match &self.storage {
            Storage::Pure(amps) => amps
                .iter()
                .enumerate()
                .filter(|(x, _)| x & mask == 0)
                .map(|(_, a)| a.norm_sqr())
                .sum(),
            Storage::Density(flat) => {
                let dim = self.dim();
                (0..dim).filter(|x| x & mask == 0).map(|x| flat[x * dim + x].re).sum()
            }
        }
    }

    fn project_qubit(&mut self, q: usize, bit: u8, branch_prob: f64) {
        let mask = 1usize << q;
        let keep = |x: usize| ((x & mask != 0) as u8) == bit;
        let scale = 1.0 / branch_prob.sqrt();
        match &mut self.storage {
            Storage::Pure(amps) => {
                for (x, a) in amps.iter_mut().enumerate() {
                    if keep(x) {
                        *a *= Complex64::new(scale, 0.0);
                    } else {
                        *a = C_ZERO;
                    }
                }
            }
            Storage::Density(flat) => {
                let dim = 1usize << self.n;
                let scale = 1.0 / branch_prob;
                for r in 0..dim {
                    for c in 0..dim {
                        let e = &mut flat[r * dim + c];
                        if keep(r) && keep(c) {
                            *e *= Complex64::new(scale, 0.0);
                        } else {
                            *e = C_ZERO;
                        }
                    }
                }
            }
        }
    }

    /// Reduced density matrix over `keep` (ascending order required).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<QuantumState> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepList);
        }
        self.check_targets(keep)?;
        if keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("keep list must be strictly ascending".into()));
        }
        let full = self.to_density();
        let flat = match &full.storage {
            Storage::Density(f) => f,
            Storage::Pure(_) => unreachable!(),
        };
        let dim = full.dim();
        let k = keep.len();
        let kdim = 1usize << k;
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let tdim = 1usize << traced.len();
        let compose = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut idx = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                idx |= ((kept_bits >> j) & 1) << q;
            }
            for (j, &q) in traced.iter().enumerate() {
                idx |= ((traced_bits >> j) & 1) << q;
            }
            idx
        };
        let mut out = vec![C_ZERO; kdim * kdim];
        for rk in 0..kdim {
            for ck in 0..kdim {
                let mut acc = C_ZERO;
                for t in 0..tdim {
                    acc += flat[compose(rk, t) * dim + compose(ck, t)];
                }
                out[rk * kdim + ck] = acc;
            }
        }
        Ok(QuantumState { n: k, storage: Storage::Density(out) })
    }

    /// Norm (pure) or trace (density).
    pub fn norm(&self) -> f64 {
        match &self.storage {
            Storage::Pure(amps) => amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt(),
            Storage::Density(flat) => {
                let dim = self.dim();
                (0..dim).map(|i| flat[i * dim + i].re).sum()
            }
        }
    }

    /// Fidelity to a pure target state: |<t|psi>|^2 or <t|rho|t>.
    pub fn fidelity_to(&self, target: &[C64]) -> Result<f64> {
        if target.len() != self.dim() {
            return Err(Error::DimensionMismatch("target state dimension".into()));
        }
        match &self.storage {
            Storage::Pure(amps) => {
                let overlap: C64 =
                    target.iter().zip(amps).map(|(t, a)| t.conj() * a).sum();
                Ok(overlap.norm_sqr())
            }
            Storage::Density(flat) => {
                let dim = self.dim();
                let mut acc = C_ZERO;
                for r in 0..dim {
                    for c in 0..dim {
                        acc += target[r].conj() * flat[r * dim + c] * target[c];
                    }
                }
                Ok(acc.re)
            }
        }
    }

    /// Structural sanity check: normalization, and for density matrices
    /// hermiticity, unit trace and positive semidefiniteness (eigenvalue
    /// floor -1e-10).
    pub fn validate(&self) -> Result<()> {
        match &self.storage {
            Storage::Pure(_) => {
                let norm = self.norm();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!("pure state norm {norm}")));
                }
            }
            Storage::Density(flat) => {
                let dim = self.dim();
                let tr = self.norm();
                if (tr - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!("density trace {tr}")));
                }
                let mut m = CMatrix::zeros(dim);
                for r in 0..dim {
                    for c in 0..dim {
                        let v = flat[r * dim + c];
                        if (v - flat[c * dim + r].conj()).norm() > 1e-12 {
                            return Err(Error::InvalidParameter("density not Hermitian".into()));
                        }
                        m.set(r, c, v);
                    }
                }
                let min = min_eigenvalue_hermitian(&m);
                if min < -1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "density not positive semidefinite (min eigenvalue {min:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Apply a 2^k x 2^k matrix to the amplitude vector on the given target bit
/// positions; bit `j` of the matrix index corresponds to `targets[j]`.
fn apply_matrix(amps: &mut [C64], mat: &CMatrix, targets: &[usize]) {
    let k = targets.len();
    let block = 1usize << k;
    debug_assert_eq!(mat.dim(), block);
    let tmask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let offset = |base: usize, m: usize| -> usize {
        let mut idx = base;
        for (j, &t) in targets.iter().enumerate() {
            idx |= ((m >> j) & 1) << t;
        }
        idx
    };
    let mut gathered = vec![C_ZERO; block];
    for base in 0..amps.len() {
        if base & tmask != 0 {
            continue;
        }
        for (m, g) in gathered.iter_mut().enumerate() {
            *g = amps[offset(base, m)];
        }
        for r in 0..block {
            let mut acc = C_ZERO;
            for c in 0..block {
                acc += mat.get(r, c) * gathered[c];
            }
            amps[offset(base, r)] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::KrausChannel;
    use crate::linalg::{hadamard, pauli_x, rot_x, C_ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn x_flips_zero_to_one() {
        let mut s = QuantumState::zero(1, StateBackend::PureVector);
        s.apply_unitary(&pauli_x(), &[0]).unwrap();
        assert!((s.probabilities()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let mut s = QuantumState::zero(3, StateBackend::PureVector);
        s.apply_unitary(&hadamard(), &[1]).unwrap();
        let before = s.amplitudes().unwrap().to_vec();
        s.apply_unitary(&CMatrix::identity(2), &[2]).unwrap();
        for (a, b) in before.iter().zip(s.amplitudes().unwrap()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let mut s = QuantumState::zero(1, StateBackend::PureVector);
        let m = CMatrix::from_rows(&[&[C_ONE, C_ONE], &[C_ZERO, C_ONE]]);
        assert!(matches!(s.apply_unitary(&m, &[0]), Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn target_validation() {
        let mut s = QuantumState::zero(2, StateBackend::PureVector);
        assert!(matches!(
            s.apply_unitary(&pauli_x(), &[5]),
            Err(Error::QubitOutOfRange { .. })
        ));
        let cnot = CMatrix::identity(4);
        assert!(matches!(
            s.apply_unitary(&cnot, &[1, 1]),
            Err(Error::DuplicateTarget(1))
        ));
    }

    #[test]
    fn expectation_z_on_zero() {
        let s = QuantumState::zero(1, StateBackend::PureVector);
        let z: PauliString = "Z".parse().unwrap();
        assert!((s.expectation(&z).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn expectation_length_mismatch() {
        let s = QuantumState::zero(2, StateBackend::PureVector);
        let z: PauliString = "Z".parse().unwrap();
        assert!(s.expectation(&z).is_err());
    }

    #[test]
    fn depolarizing_fixed_point() {
        // Fully depolarizing channel sends |0><0| to the maximally mixed state.
        let mut s = QuantumState::zero(1, StateBackend::DensityMatrix);
        let ch = KrausChannel::depolarizing_1q(1.0).unwrap();
        s.apply_channel(&ch, &[0], &mut rng(1)).unwrap();
        assert!((s.density_element(0, 0).re - 0.5).abs() < 1e-12);
        assert!((s.density_element(1, 1).re - 0.5).abs() < 1e-12);
        assert!(s.density_element(0, 1).norm() < 1e-12);
    }

    #[test]
    fn bit_flip_closed_form() {
        // p = 0.3 on |0><0| gives diag(0.7, 0.3).
        let mut s = QuantumState::zero(1, StateBackend::DensityMatrix);
        let ch = KrausChannel::bit_flip(0.3).unwrap();
        s.apply_channel(&ch, &[0], &mut rng(1)).unwrap();
        assert!((s.density_element(0, 0).re - 0.7).abs() < 1e-12);
        assert!((s.density_element(1, 1).re - 0.3).abs() < 1e-12);
    }

    #[test]
    fn identity_channel_is_noop() {
        let mut s = QuantumState::zero(2, StateBackend::DensityMatrix);
        s.apply_matrix_unchecked(&hadamard(), &[0]);
        let before = s.clone();
        let ch = KrausChannel::identity(1);
        s.apply_channel(&ch, &[1], &mut rng(3)).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert!((s.density_element(r, c) - before.density_element(r, c)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn measure_z_on_one_is_deterministic() {
        for seed in 0..20 {
            let mut s = QuantumState::zero(1, StateBackend::PureVector);
            s.apply_matrix_unchecked(&pauli_x(), &[0]);
            let z: PauliString = "Z".parse().unwrap();
            let outcome = s.measure_pauli(&z, &mut rng(seed)).unwrap();
            assert_eq!(outcome, -1);
            assert!((s.probabilities()[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measure_ziz_on_zeros() {
        let mut s = QuantumState::zero(3, StateBackend::PureVector);
        let p: PauliString = "ZIZ".parse().unwrap();
        let outcome = s.measure_pauli(&p, &mut rng(7)).unwrap();
        assert_eq!(outcome, 1);
        assert!((s.probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_all_identity_rejected() {
        let mut s = QuantumState::zero(2, StateBackend::PureVector);
        let p = PauliString::identity(2);
        assert!(matches!(s.measure_pauli(&p, &mut rng(0)), Err(Error::AllIdentityPauli)));
    }

    #[test]
    fn measurement_statistics_on_plus() {
        // ~10^5 shots of Z on |+>; +1 frequency within 5 binomial sigma of 1/2.
        let shots = 100_000u32;
        let mut plus_count = 0u32;
        let mut r = rng(42);
        for _ in 0..shots {
            let mut s = QuantumState::zero(1, StateBackend::PureVector);
            s.apply_matrix_unchecked(&hadamard(), &[0]);
            let z: PauliString = "Z".parse().unwrap();
            if s.measure_pauli(&z, &mut r).unwrap() == 1 {
                plus_count += 1;
            }
        }
        let freq = plus_count as f64 / shots as f64;
        let sigma = 0.5 / (shots as f64).sqrt();
        assert!((freq - 0.5).abs() < 5.0 * sigma, "freq {freq}");
    }

    #[test]
    fn repeated_measurement_is_stable() {
        let mut r = rng(5);
        let mut s = QuantumState::zero(2, StateBackend::PureVector);
        s.apply_matrix_unchecked(&hadamard(), &[0]);
        s.apply_matrix_unchecked(&rot_x(0.7), &[1]);
        let p: PauliString = "ZX".parse().unwrap();
        let first = s.measure_pauli(&p, &mut r).unwrap();
        let e = s.expectation(&p).unwrap();
        assert!((e - first as f64).abs() < 1e-10);
        for _ in 0..5 {
            assert_eq!(s.measure_pauli(&p, &mut r).unwrap(), first);
        }
    }

    #[test]
    fn partial_trace_bell_pair() {
        let mut s = QuantumState::zero(2, StateBackend::PureVector);
        s.apply_matrix_unchecked(&hadamard(), &[0]);
        // CNOT 0 -> 1 as a permutation.
        s.apply_permutation(|x| if x & 1 == 1 { x ^ 2 } else { x });
        let reduced = s.partial_trace(&[0]).unwrap();
        assert!((reduced.density_element(0, 0).re - 0.5).abs() < 1e-12);
        assert!((reduced.density_element(1, 1).re - 0.5).abs() < 1e-12);
        assert!(reduced.density_element(0, 1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        let mut s = QuantumState::zero(2, StateBackend::PureVector);
        s.apply_matrix_unchecked(&rot_x(0.9), &[1]);
        let reduced = s.partial_trace(&[1]).unwrap();
        let mut single = QuantumState::zero(1, StateBackend::PureVector);
        single.apply_matrix_unchecked(&rot_x(0.9), &[0]);
        let single = single.to_density();
        for r in 0..2 {
            for c in 0..2 {
                assert!(
                    (reduced.density_element(r, c) - single.density_element(r, c)).norm() < 1e-12
                );
            }
        }
    }

    #[test]
    fn partial_trace_empty_keep_rejected() {
        let s = QuantumState::zero(2, StateBackend::PureVector);
        assert!(matches!(s.partial_trace(&[]), Err(Error::EmptyKeepList)));
    }

    #[test]
    fn validate_accepts_fresh_states() {
        QuantumState::zero(3, StateBackend::PureVector).validate().unwrap();
        QuantumState::zero(3, StateBackend::DensityMatrix).validate().unwrap();
    }
}
