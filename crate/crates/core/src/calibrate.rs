//! Calibration of microscopic error rates against target observables.
//!
//! The published observables constrain separate parts of the noise model:
//! the parity-map error budget sets the syndrome readout fidelities, the
//! microwave gate error dominates the first witness term, the entangling
//! gate error the second, and the interferometer contrast the third. The
//! search therefore runs a coarse-grid bisection per knob (all observables
//! are monotone in their dominant knob) with joint refinement passes to
//! absorb the weak cross couplings. All observables are evaluated exactly on
//! the density-matrix backend, so calibration is deterministic.

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::ghz::exact_witness;
use crate::node::NodeCircuit;
use crate::noise::NoiseModel;
use crate::qec::ParityCheck;
use crate::register::Register;
use crate::state::StateBackend;

/// Target observables with their quoted one-sigma tolerances.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationTargets {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub f_ziz: f64,
    pub f_izz: f64,
    pub tol_e1: f64,
    pub tol_e2: f64,
    pub tol_e3: f64,
    pub tol_f_ziz: f64,
    pub tol_f_izz: f64,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        CalibrationTargets {
            e1: 0.97,
            e2: 0.88,
            e3: 0.82,
            f_ziz: 0.85,
            f_izz: 0.84,
            tol_e1: 0.01,
            tol_e2: 0.02,
            tol_e3: 0.05,
            tol_f_ziz: 0.01,
            tol_f_izz: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CalObservables {
    pub e: [f64; 3],
    pub f_ziz: f64,
    pub f_izz: f64,
}

#[derive(Debug, Clone)]
pub struct CalibrationOutcome {
    pub noise: NoiseModel,
    pub observables: CalObservables,
    /// observable - target, in the order (e1, e2, e3, f_ziz, f_izz).
    pub residuals: [f64; 5],
    pub within_tolerance: bool,
}

/// Average parity readout fidelity over the eight memory basis states,
/// excluding the fluorescence confusion (the mapped electron population is
/// compared to the intended parity directly).
///
/// The characterization mirrors the experimental procedure: each basis state
/// is prepared through swap-mediated nuclear initialization, modeled as
/// three entangling-step depolarizing events per carbon at the same
/// weak-coupling error grade as the parity maps themselves (the electron is
/// repolarized after each swap, so only the carbon marginal survives). The
/// reported number therefore bundles nuclear-state preparation error with
/// the mapping error proper, and the electron reset error enters as an
/// imperfect |0> ancilla.
pub fn parity_readout_fidelity(noise: &NoiseModel, check: ParityCheck) -> Result<f64> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0);
    let carbons = check.carbons();
    let mut total = 0.0;
    for basis in 0..8u8 {
        let mut node =
            NodeCircuit::new(Register::nv_default(), StateBackend::DensityMatrix, noise);
        if noise.reset_error > 0.0 {
            let flip = crate::channel::KrausChannel::bit_flip(noise.reset_error)?;
            let electron = node.register().electron();
            node.state_mut().apply_channel(&flip, &[electron], &mut rng)?;
        }
        for (i, &carbon) in [1usize, 2, 3].iter().enumerate() {
            if (basis >> (2 - i)) & 1 == 1 {
                node.inject_x(carbon);
            }
            if noise.p_parity_map > 0.0 {
                let init = crate::channel::KrausChannel::depolarizing_1q(noise.p_parity_map)?;
                for _ in 0..3 {
                    node.state_mut().apply_channel(&init, &[carbon], &mut rng)?;
                }
            }
        }
        let bit = |q: usize| (basis >> (3 - q)) & 1;
        let parity_plus = (bit(carbons[0]) ^ bit(carbons[1])) == 0;
        // The measurement block spans a full round's idle decoherence.
        node.idle_round_noise(&mut rng)?;
        node.parity_mapping(&carbons, &mut rng)?;
        let p_dark = 1.0 - node.state().qubit_zero_probability(node.register().electron());
        total += if parity_plus { p_dark } else { 1.0 - p_dark };
    }
    Ok(total / 8.0)
}

/// Evaluate all calibration observables for a noise model.
pub fn observables(noise: &NoiseModel) -> Result<CalObservables> {
    let witness = exact_witness(noise)?;
    Ok(CalObservables {
        e: [witness.e1, witness.e2, witness.e3],
        f_ziz: parity_readout_fidelity(noise, ParityCheck::Ziz)?,
        f_izz: parity_readout_fidelity(noise, ParityCheck::Izz)?,
    })
}

/// Bisection for f(x) = target with f monotone decreasing in x on [lo, hi].
/// Saturates at the interval ends when the target is unreachable.
fn bisect_decreasing(
    mut eval: impl FnMut(f64) -> Result<f64>,
    target: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if eval(lo)? <= target {
        return Ok(lo);
    }
    if eval(hi)? >= target {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if eval(mid)? > target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Calibrate (p_parity_map, p_gate_e, p_gate_ec, mzi_visibility) against the
/// targets, leaving all other fields of `base` untouched.
pub fn calibrate(targets: &CalibrationTargets, base: &NoiseModel) -> Result<CalibrationOutcome> {
    let mut noise = base.clone();

    // Witness terms first: e1 is set by the post-emission microwave budget,
    // e2 by the entangling budget, e3 by the interferometer contrast. The
    // syndrome fidelities then pin the parity-map budget given the
    // entangling rate (the characterization preps its basis states through
    // p_gate_ec-grade initialization). Three passes absorb cross terms.
    for _ in 0..3 {
        noise.p_gate_e = bisect_decreasing(
            |p| {
                let mut n = noise.clone();
                n.p_gate_e = p;
                Ok(exact_witness(&n)?.e1)
            },
            targets.e1,
            0.0,
            0.2,
        )?;
        noise.p_gate_ec = bisect_decreasing(
            |p| {
                let mut n = noise.clone();
                n.p_gate_ec = p;
                Ok(exact_witness(&n)?.e2)
            },
            targets.e2,
            0.0,
            0.3,
        )?;
        // e3 increases with visibility; flip the sign to reuse the
        // decreasing-bisection.
        let v = bisect_decreasing(
            |minus_v| {
                let mut n = noise.clone();
                n.mzi_visibility = 1.0 - minus_v;
                Ok(exact_witness(&n)?.e3)
            },
            targets.e3,
            0.0,
            1.0,
        )?;
        noise.mzi_visibility = 1.0 - v;
        // Both checks share the budget; aim for the midpoint of the targets.
        let f_target = 0.5 * (targets.f_ziz + targets.f_izz);
        noise.p_parity_map = bisect_decreasing(
            |p| {
                let mut n = noise.clone();
                n.p_parity_map = p;
                parity_readout_fidelity(&n, ParityCheck::Ziz)
            },
            f_target,
            0.0,
            0.5,
        )?;
    }

    let observables = observables(&noise)?;
    let residuals = [
        observables.e[0] - targets.e1,
        observables.e[1] - targets.e2,
        observables.e[2] - targets.e3,
        observables.f_ziz - targets.f_ziz,
        observables.f_izz - targets.f_izz,
    ];
    let within_tolerance = residuals[0].abs() <= targets.tol_e1
        && residuals[1].abs() <= targets.tol_e2
        && residuals[2].abs() <= targets.tol_e3
        && residuals[3].abs() <= targets.tol_f_ziz
        && residuals[4].abs() <= targets.tol_f_izz;
    Ok(CalibrationOutcome { noise, observables, residuals, within_tolerance })
}

/// Calibration with targets that are provably unreachable reports itself as
/// out of tolerance rather than erroring; callers decide how to surface it.
pub fn calibrate_or_fail(targets: &CalibrationTargets, base: &NoiseModel) -> Result<CalibrationOutcome> {
    let outcome = calibrate(targets, base)?;
    if !outcome.within_tolerance {
        return Err(Error::CalibrationFailed(format!(
            "residuals {:?} exceed tolerances",
            outcome.residuals
        )));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_parity_fidelity_is_one() {
        let noise = NoiseModel::noiseless();
        for check in [ParityCheck::Ziz, ParityCheck::Izz] {
            let f = parity_readout_fidelity(&noise, check).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_fidelity_decreases_with_map_noise() {
        let mut noise = NoiseModel::noiseless();
        noise.p_parity_map = 0.1;
        let f = parity_readout_fidelity(&noise, ParityCheck::Ziz).unwrap();
        assert!(f < 0.95 && f > 0.8, "fidelity {f}");
    }

    #[test]
    fn trivial_targets_calibrate_to_zero_noise() {
        let targets = CalibrationTargets {
            e1: 1.0,
            e2: 1.0,
            e3: 1.0,
            f_ziz: 1.0,
            f_izz: 1.0,
            ..Default::default()
        };
        let mut base = NoiseModel::noiseless();
        base.reset_error = 0.0;
        let outcome = calibrate(&targets, &base).unwrap();
        assert!(outcome.noise.p_gate_e < 1e-9);
        assert!(outcome.noise.p_gate_ec < 1e-9);
        assert!(outcome.noise.p_parity_map < 1e-9);
        assert!((outcome.noise.mzi_visibility - 1.0).abs() < 1e-9);
        assert!(outcome.within_tolerance);
    }

    #[test]
    fn infeasible_targets_fail_loudly() {
        // e1 above the bright-leak ceiling cannot be reached.
        let targets = CalibrationTargets { e1: 0.999, ..Default::default() };
        let base = NoiseModel::default();
        let outcome = calibrate(&targets, &base).unwrap();
        assert!(!outcome.within_tolerance);
        assert!(calibrate_or_fail(&targets, &base).is_err());
    }
}
