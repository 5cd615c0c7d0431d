//! Calibrated noise model and the asymmetric fluorescence-readout confusion
//! matrix.
//!
//! A [`NoiseModel`] collects every error parameter of the node. It is
//! immutable after load and freely shareable between shot workers. The model
//! round-trips through a flat TOML calibration file; unknown keys in the file
//! are a hard error so typos cannot silently disable a parameter.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All calibrated error parameters of the node.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    /// P(report 0 | electron in bright state |0>).
    pub readout_bright_fid: f64,
    /// P(report 1 | electron in dark state |1>).
    pub readout_dark_fid: f64,
    /// Single-qubit depolarizing probability per microwave electron gate.
    pub p_gate_e: f64,
    /// Two-qubit depolarizing probability per electron-nuclear entangling
    /// step in state-preparation circuits.
    pub p_gate_ec: f64,
    /// Two-qubit depolarizing probability per conditional rotation inside a
    /// parity mapping sequence. Defaults to `p_gate_ec` when the calibration
    /// file does not name it.
    pub p_parity_map: f64,
    /// Depolarizing probability of a direct nuclear X flip (feedback and
    /// product-state preparation).
    pub p_flip_gate: f64,
    /// Per-memory-qubit bit-flip probability per error-correction round.
    pub p_flip_round: f64,
    /// Per-memory-qubit phase-flip probability per round.
    pub p_phase_round: f64,
    /// Wall-clock duration of one round, in milliseconds.
    pub round_duration_ms: f64,
    /// Probability that a shot registers a photon detection.
    pub herald_prob: f64,
    /// Interference contrast of the X-basis photon measurement.
    pub mzi_visibility: f64,
    /// Probability the electron reset leaves |1> instead of |0>.
    pub reset_error: f64,
    /// Background contribution to photon bin detection (uniform bin).
    pub photon_background_prob: f64,
    /// Probability the detected time bin is misassigned from bin overlap.
    pub photon_bin_overlap_prob: f64,
    /// Apply one idle-noise step during the final multi-parity readout block.
    pub idle_during_final_readout: bool,
    /// Time-bin separation in nanoseconds. Metadata only; no dynamics.
    pub time_bin_separation_ns: f64,
}

impl Default for NoiseModel {
    /// Pre-calibration defaults.
    fn default() -> Self {
        NoiseModel {
            readout_bright_fid: 0.809,
            readout_dark_fid: 0.988,
            p_gate_e: 0.005,
            p_gate_ec: 0.03,
            p_parity_map: 0.03,
            p_flip_gate: 0.005,
            p_flip_round: 0.02,
            p_phase_round: 0.05,
            round_duration_ms: 5.0,
            herald_prob: 0.01,
            mzi_visibility: 0.9,
            reset_error: 0.01,
            photon_background_prob: 0.0,
            photon_bin_overlap_prob: 0.0,
            idle_during_final_readout: true,
            time_bin_separation_ns: 52.0,
        }
    }
}

impl NoiseModel {
    /// A model with every error switched off: ideal gates, perfect readout,
    /// unit heralding and full interferometer contrast.
    pub fn noiseless() -> Self {
        NoiseModel {
            readout_bright_fid: 1.0,
            readout_dark_fid: 1.0,
            p_gate_e: 0.0,
            p_gate_ec: 0.0,
            p_parity_map: 0.0,
            p_flip_gate: 0.0,
            p_flip_round: 0.0,
            p_phase_round: 0.0,
            round_duration_ms: 5.0,
            herald_prob: 1.0,
            mzi_visibility: 1.0,
            reset_error: 0.0,
            photon_background_prob: 0.0,
            photon_bin_overlap_prob: 0.0,
            idle_during_final_readout: true,
            time_bin_separation_ns: 52.0,
        }
    }

    /// Readout-only model: paper confusion values, everything else ideal.
    pub fn readout_only() -> Self {
        NoiseModel {
            readout_bright_fid: 0.809,
            readout_dark_fid: 0.988,
            ..Self::noiseless()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("readout_bright_fid", self.readout_bright_fid),
            ("readout_dark_fid", self.readout_dark_fid),
            ("p_gate_e", self.p_gate_e),
            ("p_gate_ec", self.p_gate_ec),
            ("p_parity_map", self.p_parity_map),
            ("p_flip_gate", self.p_flip_gate),
            ("p_flip_round", self.p_flip_round),
            ("p_phase_round", self.p_phase_round),
            ("herald_prob", self.herald_prob),
            ("mzi_visibility", self.mzi_visibility),
            ("reset_error", self.reset_error),
            ("photon_background_prob", self.photon_background_prob),
            ("photon_bin_overlap_prob", self.photon_bin_overlap_prob),
        ];
        for (name, value) in probs {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidNoiseModel(format!("{name} = {value} outside [0, 1]")));
            }
        }
        if !self.round_duration_ms.is_finite() || self.round_duration_ms <= 0.0 {
            return Err(Error::InvalidNoiseModel(format!(
                "round_duration_ms = {} must be positive",
                self.round_duration_ms
            )));
        }
        if !self.time_bin_separation_ns.is_finite() || self.time_bin_separation_ns <= 0.0 {
            return Err(Error::InvalidNoiseModel(format!(
                "time_bin_separation_ns = {} must be positive",
                self.time_bin_separation_ns
            )));
        }
        Ok(())
    }

    pub fn confusion(&self) -> ConfusionMatrix {
        ConfusionMatrix::from_fidelities(self.readout_bright_fid, self.readout_dark_fid)
    }

    pub fn herald<R: Rng>(&self, rng: &mut R) -> bool {
        rng.gen::<f64>() < self.herald_prob
    }

    /// Parse from the flat TOML calibration format. Unknown keys are a hard
    /// error; every core field must be present.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: NoiseFile =
            toml::from_str(text).map_err(|e| Error::Parse(format!("noise file: {e}")))?;
        if let Some(v) = raw.schema_version {
            if v != 1 {
                return Err(Error::Parse(format!("unsupported noise file schema_version {v}")));
            }
        }
        let model = NoiseModel {
            readout_bright_fid: raw.readout_bright_fid,
            readout_dark_fid: raw.readout_dark_fid,
            p_gate_e: raw.p_gate_e,
            p_gate_ec: raw.p_gate_ec,
            p_parity_map: raw.p_parity_map.unwrap_or(raw.p_gate_ec),
            p_flip_gate: raw.p_flip_gate.unwrap_or(0.005),
            p_flip_round: raw.p_flip_round,
            p_phase_round: raw.p_phase_round,
            round_duration_ms: raw.round_duration_ms,
            herald_prob: raw.herald_prob,
            mzi_visibility: raw.mzi_visibility,
            reset_error: raw.reset_error,
            photon_background_prob: raw.photon_background_prob.unwrap_or(0.0),
            photon_bin_overlap_prob: raw.photon_bin_overlap_prob.unwrap_or(0.0),
            idle_during_final_readout: raw.idle_during_final_readout.unwrap_or(true),
            time_bin_separation_ns: raw.time_bin_separation_ns.unwrap_or(52.0),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Serialize in a fixed key order so identical models give identical bytes.
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        out.push_str("schema_version = 1\n");
        let f = |k: &str, v: f64| format!("{k} = {v:?}\n");
        out.push_str(&f("readout_bright_fid", self.readout_bright_fid));
        out.push_str(&f("readout_dark_fid", self.readout_dark_fid));
        out.push_str(&f("p_gate_e", self.p_gate_e));
        out.push_str(&f("p_gate_ec", self.p_gate_ec));
        out.push_str(&f("p_parity_map", self.p_parity_map));
        out.push_str(&f("p_flip_gate", self.p_flip_gate));
        out.push_str(&f("p_flip_round", self.p_flip_round));
        out.push_str(&f("p_phase_round", self.p_phase_round));
        out.push_str(&f("round_duration_ms", self.round_duration_ms));
        out.push_str(&f("herald_prob", self.herald_prob));
        out.push_str(&f("mzi_visibility", self.mzi_visibility));
        out.push_str(&f("reset_error", self.reset_error));
        out.push_str(&f("photon_background_prob", self.photon_background_prob));
        out.push_str(&f("photon_bin_overlap_prob", self.photon_bin_overlap_prob));
        out.push_str(&format!(
            "idle_during_final_readout = {}\n",
            self.idle_during_final_readout
        ));
        out.push_str(&f("time_bin_separation_ns", self.time_bin_separation_ns));
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    schema_version: Option<u32>,
    readout_bright_fid: f64,
    readout_dark_fid: f64,
    p_gate_e: f64,
    p_gate_ec: f64,
    p_parity_map: Option<f64>,
    p_flip_gate: Option<f64>,
    p_flip_round: f64,
    p_phase_round: f64,
    round_duration_ms: f64,
    herald_prob: f64,
    mzi_visibility: f64,
    reset_error: f64,
    photon_background_prob: Option<f64>,
    photon_bin_overlap_prob: Option<f64>,
    idle_during_final_readout: Option<bool>,
    time_bin_separation_ns: Option<f64>,
}

/// Classical readout confusion: `c[observed][true_bit]` = P(observed | true).
/// Columns sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    c: [[f64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_fidelities(bright_fid: f64, dark_fid: f64) -> Self {
        ConfusionMatrix {
            c: [[bright_fid, 1.0 - dark_fid], [1.0 - bright_fid, dark_fid]],
        }
    }

    pub fn identity() -> Self {
        Self::from_fidelities(1.0, 1.0)
    }

    /// P(observed | true).
    pub fn prob(&self, observed: u8, true_bit: u8) -> f64 {
        self.c[observed as usize][true_bit as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.c[0][0] == 1.0 && self.c[1][1] == 1.0
    }

    /// Sample a reported bit for the given true bit.
    pub fn report<R: Rng>(&self, true_bit: u8, rng: &mut R) -> u8 {
        if rng.gen::<f64>() < self.c[(1 - true_bit) as usize][true_bit as usize] {
            1 - true_bit
        } else {
            true_bit
        }
    }

    /// Inverse matrix entries, for linear readout mitigation. Singular when
    /// both fidelities sum to exactly one.
    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        let det = self.c[0][0] * self.c[1][1] - self.c[0][1] * self.c[1][0];
        if det.abs() < 1e-12 {
            return Err(Error::InvalidParameter("confusion matrix is singular".into()));
        }
        Ok([
            [self.c[1][1] / det, -self.c[0][1] / det],
            [-self.c[1][0] / det, self.c[0][0] / det],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        NoiseModel::default().validate().unwrap();
        NoiseModel::noiseless().validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let model = NoiseModel::default();
        let text = model.to_toml_string();
        let parsed = NoiseModel::from_toml_str(&text).unwrap();
        assert_eq!(model, parsed);
    }

    #[test]
    fn unknown_key_is_hard_error() {
        let mut text = NoiseModel::default().to_toml_string();
        text.push_str("p_gate_typo = 0.1\n");
        let err = NoiseModel::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("noise file"), "{err}");
    }

    #[test]
    fn missing_required_key_is_error() {
        let text = "readout_bright_fid = 0.809\n";
        assert!(NoiseModel::from_toml_str(text).is_err());
    }

    #[test]
    fn out_of_range_probability_rejected() {
        let mut model = NoiseModel::default();
        model.herald_prob = 1.5;
        let text = model.to_toml_string();
        assert!(NoiseModel::from_toml_str(&text).is_err());
    }

    #[test]
    fn parity_map_defaults_to_gate_ec() {
        let mut text = String::new();
        for line in NoiseModel::default().to_toml_string().lines() {
            if !line.starts_with("p_parity_map") {
                text.push_str(line);
                text.push('\n');
            }
        }
        let parsed = NoiseModel::from_toml_str(&text).unwrap();
        assert_eq!(parsed.p_parity_map, parsed.p_gate_ec);
    }

    #[test]
    fn confusion_columns_sum_to_one() {
        let c = ConfusionMatrix::from_fidelities(0.809, 0.988);
        for t in 0..2u8 {
            let sum = c.prob(0, t) + c.prob(1, t);
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert!((c.prob(0, 0) - 0.809).abs() < 1e-12);
        assert!((c.prob(1, 1) - 0.988).abs() < 1e-12);
    }

    #[test]
    fn confusion_inverse() {
        let c = ConfusionMatrix::from_fidelities(0.809, 0.988);
        let inv = c.inverse().unwrap();
        // inv * c = identity
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += inv[i][k] * c.prob(k as u8, j as u8);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expect).abs() < 1e-12);
            }
        }
        let singular = ConfusionMatrix::from_fidelities(0.5, 0.5);
        assert!(singular.inverse().is_err());
    }
}
