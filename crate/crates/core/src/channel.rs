//! Kraus-operator noise channels.

use crate::error::{Error, Result};
use crate::linalg::{pauli_i, pauli_x, pauli_y, pauli_z, CMatrix, C64};

const COMPLETENESS_TOL: f64 = 1e-10;

/// A quantum channel given by Kraus operators on `k` target qubits.
///
/// Completeness (sum K†K = I) is enforced at construction.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    k: usize,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn from_operators(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::IncompleteChannel { deviation: 1.0 });
        }
        let dim = ops[0].dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch(format!("Kraus operator dimension {dim}")));
        }
        if ops.iter().any(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch("mixed Kraus operator dimensions".into()));
        }
        let mut sum = CMatrix::zeros(dim);
        for op in &ops {
            sum = sum.add(&op.dagger().mul(op));
        }
        let deviation = sum.max_abs_diff(&CMatrix::identity(dim));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteChannel { deviation });
        }
        Ok(KrausChannel { k: dim.trailing_zeros() as usize, ops })
    }

    pub fn identity(k: usize) -> Self {
        KrausChannel { k, ops: vec![CMatrix::identity(1 << k)] }
    }

    /// Single-qubit depolarizing channel: with probability `p` the qubit is
    /// replaced by the maximally mixed state, so every non-identity Pauli
    /// expectation scales by exactly (1 - p).
    pub fn depolarizing_1q(p: f64) -> Result<Self> {
        check_prob(p)?;
        let w_id = (1.0 - 0.75 * p).sqrt();
        let w = (0.25 * p).sqrt();
        Self::from_operators(vec![
            pauli_i().scale(real(w_id)),
            pauli_x().scale(real(w)),
            pauli_y().scale(real(w)),
            pauli_z().scale(real(w)),
        ])
    }

    /// Two-qubit depolarizing channel with the same replace-with-mixed
    /// convention: non-identity Pauli expectations scale by (1 - p).
    pub fn depolarizing_2q(p: f64) -> Result<Self> {
        check_prob(p)?;
        let singles = [pauli_i(), pauli_x(), pauli_y(), pauli_z()];
        let mut ops = Vec::with_capacity(16);
        for (i, a) in singles.iter().enumerate() {
            for (j, b) in singles.iter().enumerate() {
                let w = if i == 0 && j == 0 {
                    (1.0 - 15.0 / 16.0 * p).sqrt()
                } else {
                    (p / 16.0).sqrt()
                };
                // High factor of the Kronecker product is the high index bit.
                ops.push(a.kron(b).scale(real(w)));
            }
        }
        Self::from_operators(ops)
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        check_prob(p)?;
        Self::from_operators(vec![
            pauli_i().scale(real((1.0 - p).sqrt())),
            pauli_x().scale(real(p.sqrt())),
        ])
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        check_prob(p)?;
        Self::from_operators(vec![
            pauli_i().scale(real((1.0 - p).sqrt())),
            pauli_z().scale(real(p.sqrt())),
        ])
    }

    /// Pump a qubit to |0>: K0 = |0><0|, K1 = |0><1|. On the pure backend
    /// this samples a projective measurement and relabels the outcome.
    pub fn reset_to_zero() -> Self {
        use crate::linalg::{C_ONE, C_ZERO};
        let k0 = CMatrix::from_rows(&[&[C_ONE, C_ZERO], &[C_ZERO, C_ZERO]]);
        let k1 = CMatrix::from_rows(&[&[C_ZERO, C_ONE], &[C_ZERO, C_ZERO]]);
        KrausChannel { k: 1, ops: vec![k0, k1] }
    }

    pub fn n_target_qubits(&self) -> usize {
        self.k
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C_ONE;

    #[test]
    fn depolarizing_is_complete() {
        for p in [0.0, 0.1, 0.5, 1.0] {
            KrausChannel::depolarizing_1q(p).unwrap();
            KrausChannel::depolarizing_2q(p).unwrap();
        }
    }

    #[test]
    fn invalid_probability_rejected() {
        assert!(KrausChannel::depolarizing_1q(-0.1).is_err());
        assert!(KrausChannel::bit_flip(1.5).is_err());
    }

    #[test]
    fn incomplete_channel_rejected() {
        let half = CMatrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(matches!(
            KrausChannel::from_operators(vec![half]),
            Err(Error::IncompleteChannel { .. })
        ));
    }

    #[test]
    fn from_operators_accepts_unitary_partition() {
        let ops = vec![
            pauli_i().scale(C64::new((0.5f64).sqrt(), 0.0)),
            pauli_x().scale(C64::new((0.5f64).sqrt(), 0.0)),
        ];
        let ch = KrausChannel::from_operators(ops).unwrap();
        assert_eq!(ch.n_target_qubits(), 1);
        assert_eq!(ch.operators()[0].get(0, 0).re, (0.5f64).sqrt());
        let _ = C_ONE;
    }
}
