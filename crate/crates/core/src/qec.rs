//! Repeated three-qubit repetition-code error correction on the node's
//! memory register, entangled with a time-bin photon.
//!
//! The logical states are |0>_L = |000>_c and |1>_L = |111>_c on carbons 1-3.
//! Each round reads the two parity checks ZIZ (carbons 1, 3) and IZZ
//! (carbons 2, 3) through the electron, decodes them with the lookup table
//! and, when feedback is on, flips the indicated qubit before the next round.
//! The final measurement projects onto one of the sixteen product states
//! |i1 i2 i3>_c |j>_p via three sequential electron-mediated parity readouts
//! (ZIZ, IZZ, ZII) and time-resolved photon detection; ZII doubles as the
//! logical operator Z_L.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::PopulationVector;
use crate::error::{Error, Result};
use crate::node::{GateSpec, MwAxis, NodeCircuit};
use crate::noise::{ConfusionMatrix, NoiseModel};
use crate::register::{Register, CARBON1, CARBON2, CARBON3, ELECTRON};
use crate::rng::ShotSeeder;
use crate::state::StateBackend;

const PI: f64 = std::f64::consts::PI;

/// Initial state of the logical-photon register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogicalPrep {
    /// |0>_L |e>_p via direct emission.
    ZeroL,
    /// |1>_L |l>_p via emission and direct flips.
    OneL,
    /// alpha |0>_L |e>_p + beta |1>_L |l>_p through CNOTs and a SWAP.
    PlusEntangled { alpha: f64, beta: f64 },
}

impl LogicalPrep {
    pub fn plus() -> Self {
        let w = std::f64::consts::FRAC_1_SQRT_2;
        LogicalPrep::PlusEntangled { alpha: w, beta: w }
    }

    pub fn validate(&self) -> Result<()> {
        if let LogicalPrep::PlusEntangled { alpha, beta } = self {
            if !alpha.is_finite() || !beta.is_finite() {
                return Err(Error::InvalidParameter("non-finite logical amplitudes".into()));
            }
            let norm = alpha * alpha + beta * beta;
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "logical amplitudes have norm {norm}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// Pulse sequence preparing this state from the all-zero register.
    pub fn circuit(&self) -> Vec<GateSpec> {
        match self {
            LogicalPrep::ZeroL => vec![GateSpec::OpticalPiEmit],
            LogicalPrep::OneL => vec![
                GateSpec::MwRot { axis: MwAxis::X, angle: PI },
                GateSpec::OpticalPiEmit,
                GateSpec::MwRot { axis: MwAxis::X, angle: PI },
                GateSpec::Flip { target: CARBON1 },
                GateSpec::Flip { target: CARBON2 },
                GateSpec::Flip { target: CARBON3 },
            ],
            LogicalPrep::PlusEntangled { alpha, beta } => vec![
                GateSpec::MwRot { axis: MwAxis::Y, angle: 2.0 * beta.atan2(*alpha) },
                GateSpec::OpticalPiEmit,
                GateSpec::Cnot { control: ELECTRON, target: CARBON1 },
                GateSpec::Cnot { control: ELECTRON, target: CARBON2 },
                GateSpec::Swap { a: ELECTRON, b: CARBON3 },
            ],
        }
    }

    /// Final-measurement outcome index of the ideal product preparations.
    pub fn target_outcome(&self) -> Option<u8> {
        match self {
            LogicalPrep::ZeroL => Some(0),
            LogicalPrep::OneL => Some(0b1111),
            LogicalPrep::PlusEntangled { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LogicalPrep::ZeroL => "zero",
            LogicalPrep::OneL => "one",
            LogicalPrep::PlusEntangled { .. } => "plus",
        }
    }
}

/// The two repeated parity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityCheck {
    Ziz,
    Izz,
}

impl ParityCheck {
    pub fn carbons(self) -> [usize; 2] {
        match self {
            ParityCheck::Ziz => [CARBON1, CARBON3],
            ParityCheck::Izz => [CARBON2, CARBON3],
        }
    }
}

/// Feedback action from the syndrome lookup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionAction {
    None,
    FlipQ1,
    FlipQ2,
    FlipQ3,
}

impl CorrectionAction {
    pub fn carbon(self) -> Option<usize> {
        match self {
            CorrectionAction::None => None,
            CorrectionAction::FlipQ1 => Some(CARBON1),
            CorrectionAction::FlipQ2 => Some(CARBON2),
            CorrectionAction::FlipQ3 => Some(CARBON3),
        }
    }
}

/// Syndrome lookup table: ZIZ = -1 alone flags qubit 1, IZZ = -1 alone flags
/// qubit 2, both flag qubit 3, both +1 means no error.
pub fn decode(ziz: i8, izz: i8) -> CorrectionAction {
    match (ziz, izz) {
        (-1, 1) => CorrectionAction::FlipQ1,
        (1, -1) => CorrectionAction::FlipQ2,
        (-1, -1) => CorrectionAction::FlipQ3,
        _ => CorrectionAction::None,
    }
}

/// One round's parity outcomes and the feedback taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub round: u16,
    pub ziz: i8,
    pub izz: i8,
    pub action: CorrectionAction,
    pub feedback_applied: bool,
}

/// The final 16-outcome projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalMeasurement {
    /// Index (i1 << 3) | (i2 << 2) | (i3 << 1) | j over |i1 i2 i3>_c |j>_p.
    pub outcome: u8,
    pub ziz: i8,
    pub izz: i8,
    pub zii: i8,
    pub zp: i8,
}

impl FinalMeasurement {
    pub fn bits(&self) -> (u8, u8, u8, u8) {
        (
            (self.outcome >> 3) & 1,
            (self.outcome >> 2) & 1,
            (self.outcome >> 1) & 1,
            self.outcome & 1,
        )
    }

    /// <Z_L Z_p> sample for this shot.
    pub fn z_l_z_p(&self) -> f64 {
        (self.zii * self.zp) as f64
    }
}

/// One experimental repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shot: u64,
    pub heralded: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub syndromes: Vec<SyndromeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_state: Option<FinalMeasurement>,
}

impl ShotRecord {
    /// Structural and semantic validation, used when decoding record files.
    pub fn validate(&self) -> Result<()> {
        if !self.heralded {
            if !self.syndromes.is_empty() || self.final_state.is_some() {
                return Err(Error::Parse("unheralded record carries quantum payload".into()));
            }
            return Ok(());
        }
        for (i, s) in self.syndromes.iter().enumerate() {
            if s.round as usize != i + 1 {
                return Err(Error::Parse(format!(
                    "syndrome rounds must be 1..=M in order, found {} at position {}",
                    s.round, i
                )));
            }
            for v in [s.ziz, s.izz] {
                if v != 1 && v != -1 {
                    return Err(Error::Parse(format!("parity value {v} outside {{-1, +1}}")));
                }
            }
            let expected = if s.feedback_applied { decode(s.ziz, s.izz) } else { CorrectionAction::None };
            if s.action != expected {
                return Err(Error::Parse(format!(
                    "round {}: action {:?} inconsistent with syndrome ({}, {})",
                    s.round, s.action, s.ziz, s.izz
                )));
            }
        }
        let f = self
            .final_state
            .as_ref()
            .ok_or_else(|| Error::Parse("heralded record missing final measurement".into()))?;
        if f.outcome > 15 {
            return Err(Error::Parse(format!("final outcome {} outside 0..=15", f.outcome)));
        }
        for v in [f.ziz, f.izz, f.zii, f.zp] {
            if v != 1 && v != -1 {
                return Err(Error::Parse(format!("final parity value {v} outside {{-1, +1}}")));
            }
        }
        let (i1, i2, i3, j) = f.bits();
        let sign = |b: u8| if b == 0 { 1i8 } else { -1i8 };
        if f.zii != sign(i1)
            || f.ziz != sign(i1 ^ i3)
            || f.izz != sign(i2 ^ i3)
            || f.zp != sign(j)
        {
            return Err(Error::Parse("final parities inconsistent with outcome bits".into()));
        }
        Ok(())
    }
}

/// Deliberate single-X injection for round-trip tests. `None` fields are
/// drawn uniformly per shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InjectionSpec {
    /// Code qubit 0..=2 (carbon 1..=3).
    pub qubit: Option<u8>,
    /// Round 1..=M; the flip lands before that round's checks.
    pub round: Option<u16>,
}

/// Configuration of one error-correction run.
#[derive(Debug, Clone)]
pub struct QecRunConfig {
    pub prep: LogicalPrep,
    pub rounds: u16,
    pub feedback: bool,
    pub shots: u64,
    pub backend: StateBackend,
    pub injection: Option<InjectionSpec>,
}

impl QecRunConfig {
    pub fn validate(&self) -> Result<()> {
        self.prep.validate()?;
        if self.shots == 0 {
            return Err(Error::InvalidParameter("shots must be positive".into()));
        }
        if self.injection.is_some() && self.rounds == 0 {
            return Err(Error::InvalidParameter("injection requires at least one round".into()));
        }
        Ok(())
    }
}

/// One parity readout through the electron: mapping sequence, fluorescence
/// detection and electron reset. Returns the reported parity (+1 when the
/// dark state is reported).
pub fn parity_round<R: Rng>(
    node: &mut NodeCircuit<'_>,
    check: ParityCheck,
    rng: &mut R,
) -> Result<i8> {
    let carbons = check.carbons();
    node.parity_mapping(&carbons, rng)?;
    let readout = node.fluorescence_readout(rng)?;
    node.reset_electron(rng)?;
    Ok(if readout.reported == 1 { 1 } else { -1 })
}

fn single_z_round<R: Rng>(node: &mut NodeCircuit<'_>, carbon: usize, rng: &mut R) -> Result<i8> {
    node.parity_mapping(&[carbon], rng)?;
    let readout = node.fluorescence_readout(rng)?;
    node.reset_electron(rng)?;
    Ok(if readout.reported == 1 { 1 } else { -1 })
}

/// Final three-parity readout plus photon Z detection. The outcome bits are
/// derived from the reported parities, so parity/outcome consistency holds
/// by construction.
pub fn final_measurement<R: Rng>(node: &mut NodeCircuit<'_>, rng: &mut R) -> Result<FinalMeasurement> {
    let ziz = parity_round(node, ParityCheck::Ziz, rng)?;
    let izz = parity_round(node, ParityCheck::Izz, rng)?;
    let zii = single_z_round(node, CARBON1, rng)?;
    let j = node.photon_z_readout(rng)?;
    let zp: i8 = if j == 0 { 1 } else { -1 };
    let i1 = u8::from(zii == -1);
    let z3 = ziz * zii;
    let i3 = u8::from(z3 == -1);
    let z2 = izz * z3;
    let i2 = u8::from(z2 == -1);
    let outcome = (i1 << 3) | (i2 << 2) | (i3 << 1) | j;
    Ok(FinalMeasurement { outcome, ziz, izz, zii, zp })
}

/// Run the full pipeline for `shots` repetitions.
///
/// Unheralded shots are recorded with `heralded = false` and no quantum
/// payload. Shot `k` uses the RNG stream `k` of the seeder, so any shot is
/// reproducible in isolation and the loop parallelizes freely.
pub fn run_qec(config: &QecRunConfig, noise: &NoiseModel, seeder: ShotSeeder) -> Result<Vec<ShotRecord>> {
    config.validate()?;
    let records: Vec<ShotRecord> = (0..config.shots)
        .into_par_iter()
        .map(|shot| run_single_shot(config, noise, seeder, shot))
        .collect::<Result<Vec<_>>>()?;
    Ok(records)
}

fn run_single_shot(
    config: &QecRunConfig,
    noise: &NoiseModel,
    seeder: ShotSeeder,
    shot: u64,
) -> Result<ShotRecord> {
    let mut rng = seeder.shot_rng(shot);
    if !noise.herald(&mut rng) {
        return Ok(ShotRecord { shot, heralded: false, syndromes: vec![], final_state: None });
    }
    let injection = config.injection.map(|spec| {
        let qubit = spec.qubit.unwrap_or_else(|| rng.gen_range(0..3u8));
        let round = spec.round.unwrap_or_else(|| rng.gen_range(1..=config.rounds));
        (qubit, round)
    });
    let mut node = NodeCircuit::new(Register::nv_default(), config.backend, noise);
    node.run_gates(&config.prep.circuit(), &mut rng)?;
    let mut syndromes = Vec::with_capacity(config.rounds as usize);
    for m in 1..=config.rounds {
        node.idle_round_noise(&mut rng)?;
        if let Some((qubit, round)) = injection {
            if round == m {
                node.inject_x(CARBON1 + qubit as usize);
            }
        }
        let ziz = parity_round(&mut node, ParityCheck::Ziz, &mut rng)?;
        let izz = parity_round(&mut node, ParityCheck::Izz, &mut rng)?;
        let decoded = decode(ziz, izz);
        let action = if config.feedback { decoded } else { CorrectionAction::None };
        if config.feedback {
            if let Some(carbon) = decoded.carbon() {
                node.flip(carbon, &mut rng)?;
            }
        }
        syndromes.push(SyndromeRecord {
            round: m,
            ziz,
            izz,
            action,
            feedback_applied: config.feedback,
        });
    }
    if noise.idle_during_final_readout {
        node.idle_round_noise(&mut rng)?;
    }
    let final_state = final_measurement(&mut node, &mut rng)?;
    Ok(ShotRecord { shot, heralded: true, syndromes, final_state: Some(final_state) })
}

/// Error-detection post-selection summary of <Z_L Z_p>.
#[derive(Debug, Clone, Copy)]
pub struct PostSelection {
    pub all_mean: f64,
    pub all_sigma: f64,
    pub all_n: u64,
    pub selected_mean: f64,
    pub selected_sigma: f64,
    pub selected_n: u64,
    pub acceptance: f64,
}

/// <Z_L Z_p> with and without conditioning on clean final parities
/// (ZIZ = IZZ = +1).
pub fn post_select_no_error(records: &[ShotRecord]) -> Result<PostSelection> {
    let mut all = MeanAcc::default();
    let mut selected = MeanAcc::default();
    for record in records.iter().filter(|r| r.heralded) {
        let f = record.final_state.as_ref().ok_or(Error::EmptyRecords)?;
        let value = f.z_l_z_p();
        all.push(value);
        if f.ziz == 1 && f.izz == 1 {
            selected.push(value);
        }
    }
    if all.n == 0 {
        return Err(Error::EmptyRecords);
    }
    if selected.n == 0 {
        return Err(Error::EmptyPostSelection);
    }
    Ok(PostSelection {
        all_mean: all.mean(),
        all_sigma: all.sigma(),
        all_n: all.n,
        selected_mean: selected.mean(),
        selected_sigma: selected.sigma(),
        selected_n: selected.n,
        acceptance: selected.n as f64 / all.n as f64,
    })
}

#[derive(Default)]
struct MeanAcc {
    sum: f64,
    n: u64,
}

impl MeanAcc {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.n += 1;
    }

    fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Binomial sigma of a +-1 sample mean.
    fn sigma(&self) -> f64 {
        let m = self.mean();
        ((1.0 - m * m).max(0.0) / self.n as f64).sqrt()
    }
}

/// Fraction of heralded shots whose final outcome matches `outcome`.
pub fn outcome_fidelity(records: &[ShotRecord], outcome: u8) -> Result<(f64, u64)> {
    let mut hits = 0u64;
    let mut n = 0u64;
    for record in records.iter().filter(|r| r.heralded) {
        let f = record.final_state.as_ref().ok_or(Error::EmptyRecords)?;
        n += 1;
        if f.outcome == outcome {
            hits += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyRecords);
    }
    Ok((hits as f64 / n as f64, n))
}

/// Populations over the 16 final outcomes from heralded shots.
pub fn outcome_populations(records: &[ShotRecord]) -> Result<PopulationVector> {
    let mut counts = [0u64; 16];
    let mut n = 0u64;
    for record in records.iter().filter(|r| r.heralded) {
        let f = record.final_state.as_ref().ok_or(Error::EmptyRecords)?;
        counts[f.outcome as usize] += 1;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyRecords);
    }
    let probs = counts.iter().map(|&c| c as f64 / n as f64).collect();
    PopulationVector::new(probs, n)
}

/// Outcome index (i1, i2, i3, j) -> reported-bit index (b_ziz, b_izz, b_zii, j),
/// with bit k of the result being the k-th sequential readout.
pub fn outcome_to_reported_bits(outcome: u8) -> u8 {
    let i1 = (outcome >> 3) & 1;
    let i2 = (outcome >> 2) & 1;
    let i3 = (outcome >> 1) & 1;
    let j = outcome & 1;
    let b_ziz = 1 ^ i1 ^ i3;
    let b_izz = 1 ^ i2 ^ i3;
    let b_zii = 1 ^ i1;
    b_ziz | (b_izz << 1) | (b_zii << 2) | (j << 3)
}

/// Inverse of [`outcome_to_reported_bits`].
pub fn reported_bits_to_outcome(bits: u8) -> u8 {
    let b_ziz = bits & 1;
    let b_izz = (bits >> 1) & 1;
    let b_zii = (bits >> 2) & 1;
    let j = (bits >> 3) & 1;
    let i1 = 1 ^ b_zii;
    let i3 = b_zii ^ b_ziz;
    let i2 = 1 ^ b_izz ^ i3;
    (i1 << 3) | (i2 << 2) | (i3 << 1) | j
}

/// Readout mitigation of the 16-outcome populations: the three sequential
/// electron readouts share the fluorescence confusion matrix, the photon bin
/// is left untouched.
pub fn mitigate_outcome_populations(
    raw: &PopulationVector,
    confusion: &ConfusionMatrix,
) -> Result<PopulationVector> {
    if raw.len() != 16 {
        return Err(Error::DimensionMismatch(format!(
            "expected 16 outcome populations, got {}",
            raw.len()
        )));
    }
    // Permute to reported-bit coordinates.
    let mut bitspace = vec![0.0; 16];
    for (outcome, &p) in raw.probs().iter().enumerate() {
        bitspace[outcome_to_reported_bits(outcome as u8) as usize] = p;
    }
    let bit_vec = PopulationVector::new(bitspace, raw.samples())?;
    let confusions =
        [Some(*confusion), Some(*confusion), Some(*confusion), None];
    let mitigated = crate::analysis::mitigate_readout(&bit_vec, &confusions)?;
    // Permute back to outcome coordinates.
    let mut out = vec![0.0; 16];
    let mut preclip = vec![0.0; 16];
    for bits in 0..16u8 {
        let outcome = reported_bits_to_outcome(bits) as usize;
        out[outcome] = mitigated.probs()[bits as usize];
        preclip[outcome] = mitigated.preclip().expect("mitigation keeps preclip")[bits as usize];
    }
    PopulationVector::with_preclip(out, raw.samples(), preclip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn decode_table_matches_convention() {
        assert_eq!(decode(-1, 1), CorrectionAction::FlipQ1);
        assert_eq!(decode(1, -1), CorrectionAction::FlipQ2);
        assert_eq!(decode(-1, -1), CorrectionAction::FlipQ3);
        assert_eq!(decode(1, 1), CorrectionAction::None);
    }

    fn basis_syndrome(bits: [u8; 3]) -> (i8, i8) {
        let sign = |b: u8| if b == 0 { 1i8 } else { -1i8 };
        (sign(bits[0] ^ bits[2]), sign(bits[1] ^ bits[2]))
    }

    #[test]
    fn decode_then_flip_restores_majority() {
        // Exhaustive: 8 basis states x 4 weight-<=1 errors; decode-then-flip
        // always lands back in the codespace on the majority codeword.
        let mut cases = 0;
        for state in 0..8u8 {
            for error in 0..4u8 {
                let mut bits = [(state >> 2) & 1, (state >> 1) & 1, state & 1];
                if error > 0 {
                    bits[(error - 1) as usize] ^= 1;
                }
                let (ziz, izz) = basis_syndrome(bits);
                match decode(ziz, izz) {
                    CorrectionAction::None => {}
                    CorrectionAction::FlipQ1 => bits[0] ^= 1,
                    CorrectionAction::FlipQ2 => bits[1] ^= 1,
                    CorrectionAction::FlipQ3 => bits[2] ^= 1,
                }
                let majority = (bits[0] + bits[1] + bits[2] >= 2) as u8;
                assert_eq!(bits, [majority; 3], "state {state} error {error}");
                cases += 1;
            }
        }
        assert_eq!(cases, 32);
    }

    #[test]
    fn prepare_zero_l() {
        let noise = NoiseModel::noiseless();
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.run_gates(&LogicalPrep::ZeroL.circuit(), &mut rng(0)).unwrap();
        assert!((node.state().probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prepare_one_l() {
        let noise = NoiseModel::noiseless();
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.run_gates(&LogicalPrep::OneL.circuit(), &mut rng(0)).unwrap();
        // |0>_e |111>_c |l>_p = index 0b11110
        let probs = node.state().probabilities();
        assert!((probs[0b11110] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prepare_plus_entangled() {
        let noise = NoiseModel::noiseless();
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.run_gates(&LogicalPrep::plus().circuit(), &mut rng(0)).unwrap();
        let state = node.state();
        // Electron disentangled in |0>.
        assert!((state.qubit_zero_probability(ELECTRON) - 1.0).abs() < 1e-10);
        // +1 eigenstate of Z_L Z_p (Z_L = Z on carbon 1).
        let zlzp = state.expectation(&"IZIIZ".parse().unwrap()).unwrap();
        assert!((zlzp - 1.0).abs() < 1e-10);
        // Equal populations on |000,e> and |111,l>.
        let probs = state.probabilities();
        assert!((probs[0] - 0.5).abs() < 1e-10);
        assert!((probs[0b11110] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn plus_entangled_matches_brute_force_product() {
        // Independent oracle: alpha|0>_e|e>_p + beta|1>_e|l>_p, two CNOTs,
        // one SWAP, all as explicit index maps on the 32-dim vector.
        let (alpha, beta) = (0.6f64, 0.8f64);
        let noise = NoiseModel::noiseless();
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.run_gates(&LogicalPrep::PlusEntangled { alpha, beta }.circuit(), &mut rng(0))
            .unwrap();

        let mut expect = vec![crate::linalg::C_ZERO; 32];
        expect[0] = crate::linalg::C64::new(alpha, 0.0);
        expect[0b11110] = crate::linalg::C64::new(beta, 0.0);
        let amps = node.state().amplitudes().unwrap();
        for i in 0..32 {
            assert!((amps[i] - expect[i]).norm() < 1e-10, "amp {i}");
        }
    }

    #[test]
    fn invalid_amplitudes_rejected() {
        let bad = LogicalPrep::PlusEntangled { alpha: 1.0, beta: 1.0 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn parity_rounds_on_basis_states() {
        let noise = NoiseModel::noiseless();
        // |000>: both checks +1, memory untouched.
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.emit_time_bin().unwrap();
        assert_eq!(parity_round(&mut node, ParityCheck::Ziz, &mut rng(0)).unwrap(), 1);
        assert_eq!(parity_round(&mut node, ParityCheck::Izz, &mut rng(0)).unwrap(), 1);
        assert!((node.state().probabilities()[0] - 1.0).abs() < 1e-12);

        // |010>: ZIZ = +1, IZZ = -1.
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.emit_time_bin().unwrap();
        node.inject_x(CARBON2);
        assert_eq!(parity_round(&mut node, ParityCheck::Ziz, &mut rng(0)).unwrap(), 1);
        assert_eq!(parity_round(&mut node, ParityCheck::Izz, &mut rng(0)).unwrap(), -1);
    }

    #[test]
    fn parity_readout_limited_by_dark_fidelity() {
        // Readout-only noise on |000>: the +1 outcome is reported through the
        // dark-state fidelity 0.988.
        let noise = NoiseModel::readout_only();
        let shots = 50_000;
        let mut r = rng(21);
        let mut correct = 0u32;
        for _ in 0..shots {
            let mut node =
                NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
            node.emit_time_bin().unwrap();
            if parity_round(&mut node, ParityCheck::Ziz, &mut r).unwrap() == 1 {
                correct += 1;
            }
        }
        let f = correct as f64 / shots as f64;
        let sigma = (0.988f64 * 0.012 / shots as f64).sqrt();
        assert!((f - 0.988).abs() < 4.0 * sigma, "parity fidelity {f}");
    }

    #[test]
    fn final_measurement_basis_states() {
        let noise = NoiseModel::noiseless();
        // |111>_c |l>_p
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.run_gates(&LogicalPrep::OneL.circuit(), &mut rng(0)).unwrap();
        let f = final_measurement(&mut node, &mut rng(0)).unwrap();
        assert_eq!(f.outcome, 0b1111);
        assert_eq!(f.zii, -1);
        assert_eq!(f.zp, -1);
        assert_eq!(f.z_l_z_p(), 1.0);

        // |010>_c |e>_p
        let mut node = NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
        node.emit_time_bin().unwrap();
        node.inject_x(CARBON2);
        let f = final_measurement(&mut node, &mut rng(0)).unwrap();
        assert_eq!((f.ziz, f.izz, f.zii), (1, -1, 1));
        assert_eq!(f.outcome, 0b0100);
    }

    #[test]
    fn uniform_mixture_spreads_over_outcomes() {
        // Fully depolarized memories and photon: every outcome near 1/16.
        let noise = NoiseModel::noiseless();
        let shots = 40_000u64;
        let seeder = ShotSeeder::new(31);
        let mut counts = [0u64; 16];
        for shot in 0..shots {
            let mut r = seeder.shot_rng(shot);
            let mut node =
                NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
            node.emit_time_bin().unwrap();
            let depol = crate::channel::KrausChannel::depolarizing_1q(1.0).unwrap();
            for q in [CARBON1, CARBON2, CARBON3, crate::register::PHOTON] {
                node.state_mut().apply_channel(&depol, &[q], &mut r).unwrap();
            }
            let f = final_measurement(&mut node, &mut r).unwrap();
            counts[f.outcome as usize] += 1;
        }
        let expect = shots as f64 / 16.0;
        let sigma = (shots as f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() < 4.0 * sigma,
                "outcome {i} count {c} vs {expect}"
            );
        }
    }

    #[test]
    fn m0_noiseless_zero_prep_is_deterministic() {
        let noise = NoiseModel::noiseless();
        let config = QecRunConfig {
            prep: LogicalPrep::ZeroL,
            rounds: 0,
            feedback: false,
            shots: 200,
            backend: StateBackend::PureVector,
            injection: None,
        };
        let records = run_qec(&config, &noise, ShotSeeder::new(5)).unwrap();
        let (fid, n) = outcome_fidelity(&records, 0).unwrap();
        assert_eq!(n, 200);
        assert_eq!(fid, 1.0);
    }

    #[test]
    fn single_injected_error_is_corrected() {
        let noise = NoiseModel::noiseless();
        let config = QecRunConfig {
            prep: LogicalPrep::ZeroL,
            rounds: 1,
            feedback: true,
            shots: 100,
            backend: StateBackend::PureVector,
            injection: Some(InjectionSpec { qubit: Some(1), round: Some(1) }),
        };
        let records = run_qec(&config, &noise, ShotSeeder::new(5)).unwrap();
        for r in &records {
            assert_eq!(r.syndromes[0].ziz, 1);
            assert_eq!(r.syndromes[0].izz, -1);
            assert_eq!(r.syndromes[0].action, CorrectionAction::FlipQ2);
        }
        let (fid, _) = outcome_fidelity(&records, 0).unwrap();
        assert_eq!(fid, 1.0);
    }

    #[test]
    fn injection_without_feedback_shows_up_in_final_state() {
        let noise = NoiseModel::noiseless();
        let config = QecRunConfig {
            prep: LogicalPrep::ZeroL,
            rounds: 1,
            feedback: false,
            shots: 50,
            backend: StateBackend::PureVector,
            injection: Some(InjectionSpec { qubit: Some(0), round: Some(1) }),
        };
        let records = run_qec(&config, &noise, ShotSeeder::new(6)).unwrap();
        for r in &records {
            assert_eq!(r.syndromes[0].action, CorrectionAction::None);
            assert_eq!(r.final_state.unwrap().outcome, 0b1000);
        }
    }

    #[test]
    fn post_selection_examples() {
        let noise = NoiseModel::noiseless();
        let config = QecRunConfig {
            prep: LogicalPrep::plus(),
            rounds: 0,
            feedback: false,
            shots: 400,
            backend: StateBackend::PureVector,
            injection: None,
        };
        let records = run_qec(&config, &noise, ShotSeeder::new(8)).unwrap();
        let ps = post_select_no_error(&records).unwrap();
        assert_eq!(ps.all_mean, 1.0);
        assert_eq!(ps.selected_mean, 1.0);
        assert_eq!(ps.acceptance, 1.0);
    }

    #[test]
    fn logical_flip_is_invisible_to_checks() {
        // X(x)X(x)X commutes with both parity checks: both means flip to -1
        // and post-selection still accepts every shot.
        let noise = NoiseModel::noiseless();
        let seeder = ShotSeeder::new(9);
        let mut records = Vec::new();
        for shot in 0..300u64 {
            let mut r = seeder.shot_rng(shot);
            let mut node =
                NodeCircuit::new(Register::nv_default(), StateBackend::PureVector, &noise);
            node.run_gates(&LogicalPrep::plus().circuit(), &mut r).unwrap();
            for c in [CARBON1, CARBON2, CARBON3] {
                node.inject_x(c);
            }
            let f = final_measurement(&mut node, &mut r).unwrap();
            records.push(ShotRecord {
                shot,
                heralded: true,
                syndromes: vec![],
                final_state: Some(f),
            });
        }
        let ps = post_select_no_error(&records).unwrap();
        assert_eq!(ps.all_mean, -1.0);
        assert_eq!(ps.selected_mean, -1.0);
        assert_eq!(ps.acceptance, 1.0);
    }

    #[test]
    fn unheralded_shots_have_no_payload() {
        let mut noise = NoiseModel::noiseless();
        noise.herald_prob = 0.3;
        let config = QecRunConfig {
            prep: LogicalPrep::ZeroL,
            rounds: 2,
            feedback: true,
            shots: 500,
            backend: StateBackend::PureVector,
            injection: None,
        };
        let records = run_qec(&config, &noise, ShotSeeder::new(10)).unwrap();
        let heralded = records.iter().filter(|r| r.heralded).count();
        assert!(heralded > 100 && heralded < 200, "heralded {heralded}");
        for r in &records {
            r.validate().unwrap();
            if !r.heralded {
                assert!(r.syndromes.is_empty() && r.final_state.is_none());
            } else {
                assert_eq!(r.syndromes.len(), 2);
            }
        }
    }

    #[test]
    fn outcome_bit_mapping_round_trips() {
        for outcome in 0..16u8 {
            assert_eq!(reported_bits_to_outcome(outcome_to_reported_bits(outcome)), outcome);
        }
    }

    #[test]
    fn zii_is_logical_operator_bookkeeping() {
        // final_zii == (-1)^{i1} for every record of a noisy run.
        let noise = NoiseModel::default();
        let mut n = noise.clone();
        n.herald_prob = 1.0;
        let config = QecRunConfig {
            prep: LogicalPrep::plus(),
            rounds: 3,
            feedback: true,
            shots: 300,
            backend: StateBackend::PureVector,
            injection: None,
        };
        let records = run_qec(&config, &n, ShotSeeder::new(11)).unwrap();
        for r in records.iter().filter(|r| r.heralded) {
            let f = r.final_state.unwrap();
            let (i1, _, _, _) = f.bits();
            assert_eq!(f.zii, if i1 == 0 { 1 } else { -1 });
            r.validate().unwrap();
        }
    }
}
