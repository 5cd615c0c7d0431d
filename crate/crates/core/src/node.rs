//! The NV-node abstraction: calibrated gate set, time-bin photon emission,
//! asymmetric fluorescence readout, electron reset and per-round idle
//! decoherence, all parameterized by one [`NoiseModel`].
//!
//! Noisy gates are modeled as their ideal unitaries followed by depolarizing
//! channels; with every noise probability at zero they reduce to the ideal
//! operations exactly. Nuclear gates are abstract noisy unitaries; no pulse
//! compilation is attempted.

use rand::Rng;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{hadamard, rot_x, rot_y, CMatrix, C_ZERO};
use crate::noise::NoiseModel;
use crate::register::Register;
use crate::state::{QuantumState, StateBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwAxis {
    X,
    Y,
}

/// One element of a pulse-level circuit description.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    /// Microwave rotation of the electron spin.
    MwRot { axis: MwAxis, angle: f64 },
    /// Electron-conditioned nuclear rotation: R_X(+pi/2) on the target when
    /// the electron is |0>, R_X(-pi/2) when it is |1>.
    CondNucRot { target: usize },
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
    /// Two optical pi pulses and a microwave pi pulse entangling the electron
    /// with the time-bin photon.
    OpticalPiEmit,
    /// Direct X flip of a nuclear spin.
    Flip { target: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct Readout {
    /// Bit reported by the fluorescence detector (through the confusion matrix).
    pub reported: u8,
    /// True projective outcome kept by the post-measurement state.
    pub true_bit: u8,
}

/// A node register mid-shot: quantum state plus shot-local bookkeeping.
#[derive(Debug, Clone)]
pub struct NodeCircuit<'a> {
    register: Register,
    state: QuantumState,
    noise: &'a NoiseModel,
    noisy: bool,
    photon_emitted: bool,
}

impl<'a> NodeCircuit<'a> {
    pub fn new(register: Register, backend: StateBackend, noise: &'a NoiseModel) -> Self {
        let state = QuantumState::zero(register.len(), backend);
        NodeCircuit { register, state, noise, noisy: true, photon_emitted: false }
    }

    /// Same register and backend, but every gate ideal.
    pub fn ideal(register: Register, backend: StateBackend, noise: &'a NoiseModel) -> Self {
        let mut node = Self::new(register, backend, noise);
        node.noisy = false;
        node
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut QuantumState {
        &mut self.state
    }

    pub fn into_state(self) -> QuantumState {
        self.state
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn noise(&self) -> &NoiseModel {
        self.noise
    }

    fn depol1<R: Rng>(&mut self, p: f64, target: usize, rng: &mut R) -> Result<()> {
        if self.noisy && p > 0.0 {
            let ch = KrausChannel::depolarizing_1q(p)?;
            self.state.apply_channel(&ch, &[target], rng)?;
        }
        Ok(())
    }

    fn depol2<R: Rng>(&mut self, p: f64, a: usize, b: usize, rng: &mut R) -> Result<()> {
        if self.noisy && p > 0.0 {
            let ch = KrausChannel::depolarizing_2q(p)?;
            self.state.apply_channel(&ch, &[a, b], rng)?;
        }
        Ok(())
    }

    /// Microwave rotation exp(-i angle/2 sigma_axis) of the electron.
    pub fn mw_rotation<R: Rng>(&mut self, axis: MwAxis, angle: f64, rng: &mut R) -> Result<()> {
        let m = match axis {
            MwAxis::X => rot_x(angle),
            MwAxis::Y => rot_y(angle),
        };
        let e = self.register.electron();
        self.state.apply_matrix_unchecked(&m, &[e]);
        self.depol1(self.noise.p_gate_e, e, rng)
    }

    /// Entangling gate R_{+-X}^{pi/2}: rotates the target nuclear spin about
    /// +X when the electron is |0> and about -X when it is |1>.
    pub fn conditional_nuclear_rotation<R: Rng>(&mut self, target: usize, rng: &mut R) -> Result<()> {
        if !self.register.is_memory(target) {
            return Err(Error::NotMemoryQubit(target));
        }
        let e = self.register.electron();
        let m = conditional_rotation_matrix();
        // Matrix bit 0 is the nuclear target, bit 1 the electron.
        self.state.apply_matrix_unchecked(&m, &[target, e]);
        self.depol2(self.noise.p_gate_ec, e, target, rng)
    }

    /// CNOT composed of two elementary entangling steps.
    pub fn cnot<R: Rng>(&mut self, control: usize, target: usize, rng: &mut R) -> Result<()> {
        if control == target {
            return Err(Error::DuplicateTarget(control));
        }
        let (cm, tm) = (1usize << control, 1usize << target);
        self.state.apply_permutation(|x| if x & cm != 0 { x ^ tm } else { x });
        self.depol2(self.noise.p_gate_ec, control, target, rng)?;
        self.depol2(self.noise.p_gate_ec, control, target, rng)
    }

    /// SWAP composed of three elementary entangling steps.
    pub fn swap<R: Rng>(&mut self, a: usize, b: usize, rng: &mut R) -> Result<()> {
        if a == b {
            return Err(Error::DuplicateTarget(a));
        }
        let (am, bm) = (1usize << a, 1usize << b);
        self.state.apply_permutation(|x| {
            let (ba, bb) = ((x & am != 0) as usize, (x & bm != 0) as usize);
            if ba != bb {
                x ^ am ^ bm
            } else {
                x
            }
        });
        for _ in 0..3 {
            self.depol2(self.noise.p_gate_ec, a, b, rng)?;
        }
        Ok(())
    }

    /// Direct nuclear X flip (feedback corrections, product-state preparation).
    pub fn flip<R: Rng>(&mut self, target: usize, rng: &mut R) -> Result<()> {
        let mask = 1usize << target;
        self.state.apply_permutation(|x| x ^ mask);
        self.depol1(self.noise.p_flip_gate, target, rng)
    }

    /// Ideal X with no gate-error budget, for deliberate error injection.
    pub fn inject_x(&mut self, target: usize) {
        let mask = 1usize << target;
        self.state.apply_permutation(|x| x ^ mask);
    }

    /// Time-bin photon emission: maps a|0>_e + b|1>_e (photon in the vacuum
    /// placeholder |e>_p = |0>) to a|0>_e|e>_p + b|1>_e|l>_p. The optical
    /// pulse pair and its restoring microwave pi pulse are treated as one
    /// ideal operation; photon loss is handled by state-independent
    /// heralding, not by this gate.
    pub fn emit_time_bin(&mut self) -> Result<()> {
        if self.photon_emitted {
            return Err(Error::PhotonAlreadyEmitted);
        }
        let (em, pm) = (1usize << self.register.electron(), 1usize << self.register.photon());
        self.state.apply_permutation(|x| if x & em != 0 { x ^ pm } else { x });
        self.photon_emitted = true;
        Ok(())
    }

    pub fn photon_emitted(&self) -> bool {
        self.photon_emitted
    }

    /// Projective Z measurement of the electron with classical reporting
    /// noise: the state keeps the true projection, the reported bit passes
    /// through the asymmetric confusion matrix.
    pub fn fluorescence_readout<R: Rng>(&mut self, rng: &mut R) -> Result<Readout> {
        let e = self.register.electron();
        let true_bit = self.state.measure_qubit(e, rng)?;
        let reported = if self.noisy {
            self.noise.confusion().report(true_bit, rng)
        } else {
            true_bit
        };
        Ok(Readout { reported, true_bit })
    }

    /// Reset the electron to |0> by optical pumping; with probability
    /// `reset_error` it is left in |1> instead. Implemented as a
    /// reset-to-zero channel followed by a residual bit flip, which gives
    /// identical statistics on both backends.
    pub fn reset_electron<R: Rng>(&mut self, rng: &mut R) -> Result<()> {
        let e = self.register.electron();
        self.state.apply_channel(&KrausChannel::reset_to_zero(), &[e], rng)?;
        if self.noisy && self.noise.reset_error > 0.0 {
            let ch = KrausChannel::bit_flip(self.noise.reset_error)?;
            self.state.apply_channel(&ch, &[e], rng)?;
        }
        Ok(())
    }

    /// Idle decoherence for one error-correction round: independent bit- and
    /// phase-flip channels on every memory qubit plus full dephasing of the
    /// electron (it is measured and reset each round anyway).
    pub fn idle_round_noise<R: Rng>(&mut self, rng: &mut R) -> Result<()> {
        if !self.noisy {
            return Ok(());
        }
        let memories: Vec<usize> = self.register.memories().to_vec();
        if self.noise.p_flip_round > 0.0 {
            let ch = KrausChannel::bit_flip(self.noise.p_flip_round)?;
            for q in &memories {
                self.state.apply_channel(&ch, &[*q], rng)?;
            }
        }
        if self.noise.p_phase_round > 0.0 {
            let ch = KrausChannel::phase_flip(self.noise.p_phase_round)?;
            for q in &memories {
                self.state.apply_channel(&ch, &[*q], rng)?;
            }
        }
        let dephase = KrausChannel::phase_flip(0.5)?;
        self.state.apply_channel(&dephase, &[self.register.electron()], rng)?;
        Ok(())
    }

    /// Parity mapping sequence for syndrome readout: XORs the Z-parity of the
    /// listed carbons into the electron with the +1 -> dark polarity (a +1
    /// parity leaves the electron in |1>). One entangling error per
    /// conditional rotation, i.e. per carbon involved; the noise accrues
    /// during the mapping sequence, so it is applied before the parity
    /// transfer and nuclear back-action is visible to the same round's
    /// syndrome.
    pub fn parity_mapping<R: Rng>(&mut self, carbons: &[usize], rng: &mut R) -> Result<()> {
        for &c in carbons {
            if !self.register.is_memory(c) {
                return Err(Error::NotMemoryQubit(c));
            }
        }
        let e = self.register.electron();
        for &c in carbons {
            self.depol2(self.noise.p_parity_map, e, c, rng)?;
        }
        let em = 1usize << e;
        let masks: Vec<usize> = carbons.iter().map(|&c| 1usize << c).collect();
        self.state.apply_permutation(|x| {
            let mut parity = 1usize; // polarity flip: even parity -> dark
            for &m in &masks {
                parity ^= usize::from(x & m != 0);
            }
            if parity == 1 {
                x ^ em
            } else {
                x
            }
        });
        Ok(())
    }

    /// Time-resolved Z-basis detection of the photon. The reported bin may be
    /// misassigned by bin overlap or replaced by a background count.
    pub fn photon_z_readout<R: Rng>(&mut self, rng: &mut R) -> Result<u8> {
        let p = self.register.photon();
        let true_bin = self.state.measure_qubit(p, rng)?;
        let mut reported = true_bin;
        if self.noisy {
            if self.noise.photon_bin_overlap_prob > 0.0
                && rng.gen::<f64>() < self.noise.photon_bin_overlap_prob
            {
                reported = 1 - reported;
            }
            if self.noise.photon_background_prob > 0.0
                && rng.gen::<f64>() < self.noise.photon_background_prob
            {
                reported = u8::from(rng.gen::<f64>() < 0.5);
            }
        }
        Ok(reported)
    }

    /// X-basis photon measurement through the imbalanced interferometer:
    /// finite contrast acts as a phase-flip channel of probability (1-v)/2
    /// before an ideal Hadamard and Z projection. Returns +-1.
    pub fn mzi_x_readout<R: Rng>(&mut self, rng: &mut R) -> Result<i8> {
        let p = self.register.photon();
        if self.noisy {
            let dephase_prob = (1.0 - self.noise.mzi_visibility) / 2.0;
            if dephase_prob > 0.0 {
                let ch = KrausChannel::phase_flip(dephase_prob)?;
                self.state.apply_channel(&ch, &[p], rng)?;
            }
        }
        self.state.apply_matrix_unchecked(&hadamard(), &[p]);
        let bit = self.state.measure_qubit(p, rng)?;
        Ok(if bit == 0 { 1 } else { -1 })
    }

    pub fn apply_gate<R: Rng>(&mut self, gate: &GateSpec, rng: &mut R) -> Result<()> {
        match gate {
            GateSpec::MwRot { axis, angle } => self.mw_rotation(*axis, *angle, rng),
            GateSpec::CondNucRot { target } => self.conditional_nuclear_rotation(*target, rng),
            GateSpec::Cnot { control, target } => self.cnot(*control, *target, rng),
            GateSpec::Swap { a, b } => self.swap(*a, *b, rng),
            GateSpec::OpticalPiEmit => self.emit_time_bin(),
            GateSpec::Flip { target } => self.flip(*target, rng),
        }
    }

    pub fn run_gates<R: Rng>(&mut self, gates: &[GateSpec], rng: &mut R) -> Result<()> {
        for gate in gates {
            self.apply_gate(gate, rng)?;
        }
        Ok(())
    }
}

/// 4x4 conditional rotation |0><0| (x) R_X(pi/2) + |1><1| (x) R_X(-pi/2),
/// with the electron on matrix bit 1 and the nuclear target on bit 0.
pub fn conditional_rotation_matrix() -> CMatrix {
    let p0 = CMatrix::from_rows(&[
        &[crate::linalg::C_ONE, C_ZERO],
        &[C_ZERO, C_ZERO],
    ]);
    let p1 = CMatrix::from_rows(&[
        &[C_ZERO, C_ZERO],
        &[C_ZERO, crate::linalg::C_ONE],
    ]);
    let half_pi = std::f64::consts::FRAC_PI_2;
    p0.kron(&rot_x(half_pi)).add(&p1.kron(&rot_x(-half_pi)))
}
