//! Hybrid GHZ entanglement: state generation, joint measurements in three
//! bases, coincidence accumulation and the stabilizer-witness fidelity bound.
//!
//! The protocol prepares the three-party state
//! (|0>_e |0>_c |l>_p + |1>_e |1>_c |e>_p) / sqrt(2)
//! and estimates the fidelity lower bound
//! F_lb = (<-Z_e I_c Z_p> + <Z_e Z_c I_p> + <X_e X_c X_p> - 1) / 2.
//!
//! Readout asymmetry is handled by the double-run trick: each basis is
//! measured once as-is and once with the electron flipped after the mapping
//! sequence, so either logical outcome can be the bright state during
//! detection. A shot enters the witness statistics when it is heralded and
//! the fluorescence detection clicks (reports bright); dark heralded shots
//! are kept in the table for diagnostics.

use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hadamard, C64, C_ZERO};
use crate::node::{GateSpec, MwAxis, NodeCircuit};
use crate::noise::NoiseModel;
use crate::register::{Register, CARBON1, ELECTRON, PHOTON};
use crate::rng::ShotSeeder;
use crate::state::{QuantumState, StateBackend};

const PI: f64 = std::f64::consts::PI;
const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// The three joint measurement bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointBasis {
    ZeIcZp,
    ZeZcIp,
    XeXcXp,
}

impl JointBasis {
    pub const ALL: [JointBasis; 3] = [JointBasis::ZeIcZp, JointBasis::ZeZcIp, JointBasis::XeXcXp];

    pub fn label(self) -> &'static str {
        match self {
            JointBasis::ZeIcZp => "ZeIcZp",
            JointBasis::ZeZcIp => "ZeZcIp",
            JointBasis::XeXcXp => "XeXcXp",
        }
    }

    pub fn index(self) -> usize {
        match self {
            JointBasis::ZeIcZp => 0,
            JointBasis::ZeZcIp => 1,
            JointBasis::XeXcXp => 2,
        }
    }

    /// Pulse sequence mapping the spin part of the observable onto the
    /// electron population. The photon is never touched.
    ///
    /// * `ZeIcZp`: the electron is read out directly; nothing to map.
    /// * `ZeZcIp`: CNOT (carbon -> electron) writes the Z parity on the
    ///   electron; even parity ends bright (|0>).
    /// * `XeXcXp`: one conditional rotation with microwave pulses maps the
    ///   X parity; even parity ends dark (|1>).
    pub fn mapping_sequence(self) -> Vec<GateSpec> {
        match self {
            JointBasis::ZeIcZp => vec![],
            JointBasis::ZeZcIp => vec![GateSpec::Cnot { control: CARBON1, target: ELECTRON }],
            JointBasis::XeXcXp => vec![
                GateSpec::CondNucRot { target: CARBON1 },
                GateSpec::MwRot { axis: MwAxis::X, angle: HALF_PI },
                GateSpec::MwRot { axis: MwAxis::X, angle: PI },
            ],
        }
    }

    /// Observable value for a pooled coincidence with logical electron bit
    /// `l` (variant-unflipped) and photon outcome bit `j`.
    fn value(self, l: u8, j: u8) -> f64 {
        let sl = if l == 0 { 1.0 } else { -1.0 };
        let sj = if j == 0 { 1.0 } else { -1.0 };
        match self {
            // -Z_e Z_p: target states are (0, l) and (1, e).
            JointBasis::ZeIcZp => -sl * sj,
            // Even Z_e Z_c parity maps to bright.
            JointBasis::ZeZcIp => sl,
            // Even X_e X_c parity maps to dark; photon carries X_p.
            JointBasis::XeXcXp => -sl * sj,
        }
    }

    fn uses_mzi(self) -> bool {
        matches!(self, JointBasis::XeXcXp)
    }
}

/// Pulse sequence of Fig-style GHZ generation on the canonical register:
/// Bell pair between electron and carbon 1, photon emission, and the final
/// electron pi pulse that leaves the state in the
/// (|0 0 l> + |1 1 e>)/sqrt(2) convention.
pub fn build_ghz_circuit() -> Vec<GateSpec> {
    vec![
        GateSpec::MwRot { axis: MwAxis::X, angle: HALF_PI },
        GateSpec::CondNucRot { target: CARBON1 },
        GateSpec::MwRot { axis: MwAxis::X, angle: HALF_PI },
        GateSpec::OpticalPiEmit,
        GateSpec::MwRot { axis: MwAxis::X, angle: PI },
    ]
}

/// Ideal GHZ amplitudes on the canonical five-qubit register.
pub fn ghz_target_amplitudes() -> Vec<C64> {
    let mut amps = vec![C_ZERO; 32];
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[1 << PHOTON] = w; // |0>_e |0>_c |l>_p
    amps[(1 << ELECTRON) | (1 << CARBON1)] = w; // |1>_e |1>_c |e>_p
    amps
}

/// Coincidence counts for one basis, split by run variant.
#[derive(Debug, Clone)]
pub struct CoincidenceTable {
    pub basis: JointBasis,
    /// counts[variant][reported electron bit][photon bit]
    pub counts: [[[u64; 2]; 2]; 2],
    /// Heralded shots per variant (the per-variant normalization).
    pub heralded: [u64; 2],
    /// Shots simulated per variant.
    pub shots_run: [u64; 2],
    pub warning: Option<String>,
}

impl CoincidenceTable {
    fn empty(basis: JointBasis) -> Self {
        CoincidenceTable {
            basis,
            counts: [[[0; 2]; 2]; 2],
            heralded: [0, 0],
            shots_run: [0, 0],
            warning: None,
        }
    }

    /// Populations normalized per variant; sums to one for a variant with
    /// at least one heralded shot.
    pub fn normalized(&self, variant: usize) -> [[f64; 2]; 2] {
        let total = self.heralded[variant] as f64;
        let mut out = [[0.0; 2]; 2];
        if total > 0.0 {
            for bit in 0..2 {
                for j in 0..2 {
                    out[bit][j] = self.counts[variant][bit][j] as f64 / total;
                }
            }
        }
        out
    }

    /// Pooled bright-click populations over the four logical electron-photon
    /// states, plus the pooled coincidence count. Bright clicks in the
    /// unflipped variant carry logical bit 0, in the flipped variant bit 1.
    pub fn pooled_bright(&self) -> ([[f64; 2]; 2], u64) {
        let mut weights = [[0.0f64; 2]; 2];
        let mut total = 0u64;
        for variant in 0..2 {
            for j in 0..2 {
                let n = self.counts[variant][0][j];
                weights[variant][j] = n as f64;
                total += n;
            }
        }
        if total > 0 {
            for row in weights.iter_mut() {
                for w in row.iter_mut() {
                    *w /= total as f64;
                }
            }
        }
        (weights, total)
    }

    /// Associative merge of partial tables from parallel workers.
    pub fn merge(&mut self, other: &CoincidenceTable) {
        for v in 0..2 {
            for b in 0..2 {
                for j in 0..2 {
                    self.counts[v][b][j] += other.counts[v][b][j];
                }
            }
            self.heralded[v] += other.heralded[v];
            self.shots_run[v] += other.shots_run[v];
        }
    }
}

/// Witness expectation values and the fidelity lower bound.
#[derive(Debug, Clone, Copy)]
pub struct WitnessResult {
    /// <-Z_e I_c Z_p>
    pub e1: f64,
    /// <Z_e Z_c I_p>
    pub e2: f64,
    /// <X_e X_c X_p>
    pub e3: f64,
    pub f_lb: f64,
    pub sigma: [f64; 3],
    pub sigma_f_lb: f64,
    /// Pooled coincidences per basis.
    pub coincidences: [u64; 3],
}

impl WitnessResult {
    /// F_lb from given expectation values: (e1 + e2 + e3 - 1) / 2, with the
    /// per-term sigmas propagated in quadrature.
    pub fn from_expectations(e: [f64; 3], sigma: [f64; 3], coincidences: [u64; 3]) -> Self {
        let f_lb = (e[0] + e[1] + e[2] - 1.0) / 2.0;
        let sigma_f_lb = 0.5 * (sigma[0].powi(2) + sigma[1].powi(2) + sigma[2].powi(2)).sqrt();
        WitnessResult { e1: e[0], e2: e[1], e3: e[2], f_lb, sigma, sigma_f_lb, coincidences }
    }
}

/// Run the GHZ protocol and joint measurement for one basis.
///
/// Half the shots run the plain sequence, half add an electron flip between
/// the mapping sequence and fluorescence detection. Odd shot counts lose the
/// odd shot and set a warning on the table.
pub fn measure_joint(
    basis: JointBasis,
    shots: u64,
    noise: &NoiseModel,
    seeder: ShotSeeder,
    backend: StateBackend,
) -> Result<CoincidenceTable> {
    if shots == 0 {
        return Err(Error::InvalidParameter("measure_joint requires shots > 0".into()));
    }
    let per_variant = shots / 2;
    if per_variant == 0 {
        return Err(Error::InvalidParameter("measure_joint requires at least 2 shots".into()));
    }
    let mut table = (0..2 * per_variant)
        .into_par_iter()
        .fold(
            || CoincidenceTable::empty(basis),
            |mut acc, shot| {
                let variant = usize::from(shot >= per_variant);
                acc.shots_run[variant] += 1;
                let mut rng = seeder.shot_rng(shot);
                if !noise.herald(&mut rng) {
                    return acc;
                }
                let (bit, j) = run_ghz_shot(basis, variant, noise, backend, &mut rng)
                    .expect("GHZ shot on a valid register cannot fail");
                acc.heralded[variant] += 1;
                acc.counts[variant][bit as usize][j as usize] += 1;
                acc
            },
        )
        .reduce(
            || CoincidenceTable::empty(basis),
            |mut a, b| {
                a.merge(&b);
                a
            },
        );
    if shots % 2 == 1 {
        table.warning =
            Some(format!("odd shot count {shots}: running {per_variant} shots per variant"));
    }
    Ok(table)
}

fn run_ghz_shot(
    basis: JointBasis,
    variant: usize,
    noise: &NoiseModel,
    backend: StateBackend,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<(u8, u8)> {
    let mut node = NodeCircuit::new(Register::nv_default(), backend, noise);
    node.run_gates(&build_ghz_circuit(), rng)?;
    node.run_gates(&basis.mapping_sequence(), rng)?;
    if variant == 1 {
        node.mw_rotation(MwAxis::X, PI, rng)?;
    }
    let readout = node.fluorescence_readout(rng)?;
    let j = if basis.uses_mzi() {
        let outcome = node.mzi_x_readout(rng)?;
        u8::from(outcome < 0)
    } else {
        node.photon_z_readout(rng)?
    };
    Ok((readout.reported, j))
}

/// Witness estimate from the three coincidence tables.
///
/// Bright clicks from the two variants are pooled into the four-state
/// populations of the logical electron-photon outcomes; each expectation is
/// the population-weighted observable value with a binomial uncertainty.
pub fn estimate_witness(tables: &[CoincidenceTable]) -> Result<WitnessResult> {
    let mut e = [0.0; 3];
    let mut sigma = [0.0; 3];
    let mut coincidences = [0u64; 3];
    for basis in JointBasis::ALL {
        let table = tables
            .iter()
            .find(|t| t.basis == basis)
            .ok_or(Error::MissingBasis(basis.label()))?;
        if table.heralded[0] + table.heralded[1] == 0 {
            return Err(Error::NoCoincidences(basis.label()));
        }
        let (weights, total) = table.pooled_bright();
        if total == 0 {
            return Err(Error::NoCoincidences(basis.label()));
        }
        let idx = basis.index();
        e[idx] = expectation_from_weights(basis, &weights);
        let p_plus = ((1.0 + e[idx]) / 2.0).clamp(0.0, 1.0);
        sigma[idx] = 2.0 * (p_plus * (1.0 - p_plus) / total as f64).sqrt();
        coincidences[idx] = total;
    }
    Ok(WitnessResult::from_expectations(e, sigma, coincidences))
}

fn expectation_from_weights(basis: JointBasis, weights: &[[f64; 2]; 2]) -> f64 {
    let mut acc = 0.0;
    for l in 0..2u8 {
        for j in 0..2u8 {
            acc += basis.value(l, j) * weights[l as usize][j as usize];
        }
    }
    acc
}

/// Bootstrap 68% intervals for (e1, e2, e3, F_lb) by multinomial resampling
/// of the coincidence tables, which is equivalent to shot-level resampling
/// of the heralded categorical outcomes. Deterministic for a fixed seeder.
pub fn bootstrap_witness(
    tables: &[CoincidenceTable],
    resamples: usize,
    seeder: ShotSeeder,
) -> Result<[(f64, f64); 4]> {
    use rand::Rng;
    if resamples < 100 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 100 resamples, got {resamples}"
        )));
    }
    let mut samples: Vec<[f64; 4]> = Vec::with_capacity(resamples);
    for i in 0..resamples as u64 {
        let mut rng = seeder.shot_rng(i);
        let mut resampled = Vec::with_capacity(tables.len());
        for table in tables {
            let mut copy = table.clone();
            copy.counts = [[[0; 2]; 2]; 2];
            for variant in 0..2usize {
                let total = table.heralded[variant];
                if total == 0 {
                    continue;
                }
                let mut cum = [0.0f64; 4];
                let mut acc = 0.0;
                for cell in 0..4usize {
                    acc += table.counts[variant][cell / 2][cell % 2] as f64 / total as f64;
                    cum[cell] = acc;
                }
                for _ in 0..total {
                    let u: f64 = rng.gen();
                    let cell = cum.iter().position(|&c| u < c).unwrap_or(3);
                    copy.counts[variant][cell / 2][cell % 2] += 1;
                }
            }
            resampled.push(copy);
        }
        if let Ok(w) = estimate_witness(&resampled) {
            samples.push([w.e1, w.e2, w.e3, w.f_lb]);
        }
    }
    if samples.is_empty() {
        return Err(Error::NoCoincidences("bootstrap"));
    }
    let mut out = [(0.0, 0.0); 4];
    for (q, slot) in out.iter_mut().enumerate() {
        let mut values: Vec<f64> = samples.iter().map(|s| s[q]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let pick = |frac: f64| values[(frac * (values.len() - 1) as f64).round() as usize];
        *slot = (pick(0.16), pick(0.84));
    }
    Ok(out)
}

/// Infinite-shot witness on the density-matrix backend: the same estimator
/// arithmetic as [`estimate_witness`], with the coincidence populations
/// computed exactly (gate noise as full channel sums, fluorescence confusion
/// and photon reporting noise applied analytically).
pub fn exact_witness(noise: &NoiseModel) -> Result<WitnessResult> {
    let mut e = [0.0; 3];
    for basis in JointBasis::ALL {
        let mut weights = [[0.0f64; 2]; 2];
        for variant in 0..2 {
            let joint = exact_variant_distribution(noise, basis, variant)?;
            for j in 0..2 {
                // Bright click: reported 0 through the confusion matrix.
                let c = noise.confusion();
                weights[variant][j] += c.prob(0, 0) * joint[0][j] + c.prob(0, 1) * joint[1][j];
            }
        }
        let total: f64 = weights.iter().flatten().sum();
        if total <= 0.0 {
            return Err(Error::NoCoincidences(basis.label()));
        }
        for row in weights.iter_mut() {
            for w in row.iter_mut() {
                *w /= total;
            }
        }
        e[basis.index()] = expectation_from_weights(basis, &weights);
    }
    Ok(WitnessResult::from_expectations(e, [0.0; 3], [0; 3]))
}

/// Joint (true electron bit, reported photon bit) distribution for one basis
/// variant, before fluorescence confusion.
fn exact_variant_distribution(
    noise: &NoiseModel,
    basis: JointBasis,
    variant: usize,
) -> Result<[[f64; 2]; 2]> {
    // The density backend ignores rng draws; a fixed dummy stream keeps the
    // node API uniform.
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0);
    let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::DensityMatrix, noise);
    node.run_gates(&build_ghz_circuit(), &mut rng)?;
    node.run_gates(&basis.mapping_sequence(), &mut rng)?;
    if variant == 1 {
        node.mw_rotation(MwAxis::X, PI, &mut rng)?;
    }
    if basis.uses_mzi() {
        let dephase_prob = (1.0 - noise.mzi_visibility) / 2.0;
        if dephase_prob > 0.0 {
            let ch = crate::channel::KrausChannel::phase_flip(dephase_prob)?;
            node.state_mut().apply_channel(&ch, &[PHOTON], &mut rng)?;
        }
        node.state_mut().apply_matrix_unchecked(&hadamard(), &[PHOTON]);
    }
    let probs = node.state().probabilities();
    let mut joint = [[0.0f64; 2]; 2];
    for (idx, p) in probs.iter().enumerate() {
        let e_bit = idx & 1;
        let p_bit = (idx >> PHOTON) & 1;
        joint[e_bit][p_bit] += p;
    }
    if !basis.uses_mzi() {
        // Time-resolved bin detection: bin misassignment, then background.
        let o = noise.photon_bin_overlap_prob;
        let b = noise.photon_background_prob;
        for row in joint.iter_mut() {
            let (p0, p1) = (row[0], row[1]);
            let (mut q0, mut q1) = ((1.0 - o) * p0 + o * p1, (1.0 - o) * p1 + o * p0);
            let total = q0 + q1;
            q0 = (1.0 - b) * q0 + b * total / 2.0;
            q1 = (1.0 - b) * q1 + b * total / 2.0;
            row[0] = q0;
            row[1] = q1;
        }
    }
    Ok(joint)
}

/// Exact state fidelity of the noisy GHZ preparation to the ideal target,
/// on the density-matrix backend.
pub fn exact_ghz_fidelity(noise: &NoiseModel) -> Result<f64> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0);
    let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::DensityMatrix, noise);
    node.run_gates(&build_ghz_circuit(), &mut rng)?;
    node.state().fidelity_to(&ghz_target_amplitudes())
}

/// Noiseless GHZ state as a pure vector, for oracle comparisons.
pub fn ideal_ghz_state() -> Result<QuantumState> {
    let noise = NoiseModel::noiseless();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0);
    let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
    node.run_gates(&build_ghz_circuit(), &mut rng)?;
    Ok(node.into_state())
}
