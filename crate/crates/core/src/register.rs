//! Qubit roles and the node's fixed register layout.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitRole {
    /// Electron spin: optical interface and readout ancilla.
    Interface,
    /// Carbon-13 nuclear spin: long-lived memory.
    Memory,
    /// Time-bin photonic qubit (early bin = 0, late bin = 1).
    Flying,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitId {
    pub index: usize,
    pub role: QubitRole,
}

/// A validated register configuration: unique indices covering 0..n, exactly
/// one interface qubit and exactly one flying qubit.
#[derive(Debug, Clone)]
pub struct Register {
    qubits: Vec<QubitId>,
    electron: usize,
    photon: usize,
    memories: Vec<usize>,
}

/// Canonical register layout indices: [electron, carbon1, carbon2, carbon3, photon].
pub const ELECTRON: usize = 0;
pub const CARBON1: usize = 1;
pub const CARBON2: usize = 2;
pub const CARBON3: usize = 3;
pub const PHOTON: usize = 4;

impl Register {
    pub fn new(qubits: Vec<QubitId>) -> Result<Self> {
        let n = qubits.len();
        if n < 2 {
            return Err(Error::InvalidRegister("need at least an interface and a flying qubit".into()));
        }
        let mut seen = vec![false; n];
        for q in &qubits {
            if q.index >= n {
                return Err(Error::InvalidRegister(format!("index {} out of range", q.index)));
            }
            if seen[q.index] {
                return Err(Error::InvalidRegister(format!("duplicate index {}", q.index)));
            }
            seen[q.index] = true;
        }
        let interfaces: Vec<usize> = qubits
            .iter()
            .filter(|q| q.role == QubitRole::Interface)
            .map(|q| q.index)
            .collect();
        let flying: Vec<usize> = qubits
            .iter()
            .filter(|q| q.role == QubitRole::Flying)
            .map(|q| q.index)
            .collect();
        if interfaces.len() != 1 {
            return Err(Error::InvalidRegister(format!(
                "expected exactly one interface qubit, found {}",
                interfaces.len()
            )));
        }
        if flying.len() != 1 {
            return Err(Error::InvalidRegister(format!(
                "expected exactly one flying qubit, found {}",
                flying.len()
            )));
        }
        let mut memories: Vec<usize> = qubits
            .iter()
            .filter(|q| q.role == QubitRole::Memory)
            .map(|q| q.index)
            .collect();
        memories.sort_unstable();
        Ok(Register { electron: interfaces[0], photon: flying[0], memories, qubits })
    }

    /// The canonical five-qubit NV node register.
    pub fn nv_default() -> Self {
        Register::new(vec![
            QubitId { index: ELECTRON, role: QubitRole::Interface },
            QubitId { index: CARBON1, role: QubitRole::Memory },
            QubitId { index: CARBON2, role: QubitRole::Memory },
            QubitId { index: CARBON3, role: QubitRole::Memory },
            QubitId { index: PHOTON, role: QubitRole::Flying },
        ])
        .expect("canonical register is valid")
    }

    /// Minimal register for three-party protocols: electron, one carbon, photon.
    pub fn three_qubit() -> Self {
        Register::new(vec![
            QubitId { index: 0, role: QubitRole::Interface },
            QubitId { index: 1, role: QubitRole::Memory },
            QubitId { index: 2, role: QubitRole::Flying },
        ])
        .expect("three-qubit register is valid")
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn electron(&self) -> usize {
        self.electron
    }

    pub fn photon(&self) -> usize {
        self.photon
    }

    pub fn memories(&self) -> &[usize] {
        &self.memories
    }

    pub fn is_memory(&self, index: usize) -> bool {
        self.memories.contains(&index)
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_layout() {
        let r = Register::nv_default();
        assert_eq!(r.len(), 5);
        assert_eq!(r.electron(), ELECTRON);
        assert_eq!(r.photon(), PHOTON);
        assert_eq!(r.memories(), &[CARBON1, CARBON2, CARBON3]);
    }

    #[test]
    fn rejects_two_interfaces() {
        let result = Register::new(vec![
            QubitId { index: 0, role: QubitRole::Interface },
            QubitId { index: 1, role: QubitRole::Interface },
            QubitId { index: 2, role: QubitRole::Flying },
        ]);
        assert!(result.is_err());
    }

    #[test]
    fn rejects_duplicate_indices() {
        let result = Register::new(vec![
            QubitId { index: 0, role: QubitRole::Interface },
            QubitId { index: 0, role: QubitRole::Memory },
            QubitId { index: 2, role: QubitRole::Flying },
        ]);
        assert!(result.is_err());
    }
}
