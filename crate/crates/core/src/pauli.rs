//! Pauli strings over the qubit register.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

/// A tensor product of single-qubit Pauli operators, one per register qubit.
///
/// Qubit `i` of the string acts on bit `i` of the little-endian basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    ops: Vec<PauliOp>,
}

impl PauliString {
    pub fn new(ops: Vec<PauliOp>) -> Self {
        PauliString { ops }
    }

    /// All-identity string of the given length.
    pub fn identity(n: usize) -> Self {
        PauliString { ops: vec![PauliOp::I; n] }
    }

    /// Single non-identity operator at `index`, identity elsewhere.
    pub fn single(n: usize, index: usize, op: PauliOp) -> Self {
        let mut ops = vec![PauliOp::I; n];
        ops[index] = op;
        PauliString { ops }
    }

    /// Z on each listed qubit, identity elsewhere.
    pub fn z_on(n: usize, qubits: &[usize]) -> Self {
        let mut ops = vec![PauliOp::I; n];
        for &q in qubits {
            ops[q] = PauliOp::Z;
        }
        PauliString { ops }
    }

    /// X on each listed qubit, identity elsewhere.
    pub fn x_on(n: usize, qubits: &[usize]) -> Self {
        let mut ops = vec![PauliOp::I; n];
        for &q in qubits {
            ops[q] = PauliOp::X;
        }
        PauliString { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&op| op == PauliOp::I)
    }

    /// Bit mask of qubits whose basis bit is flipped by this string (X and Y).
    pub fn flip_mask(&self) -> usize {
        let mut mask = 0;
        for (i, &op) in self.ops.iter().enumerate() {
            if matches!(op, PauliOp::X | PauliOp::Y) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Phase picked up when acting on basis state `index`:
    /// P |index> = phase(index) |index ^ flip_mask()>.
    pub fn phase(&self, index: usize) -> C64 {
        let mut phase = C64::new(1.0, 0.0);
        for (i, &op) in self.ops.iter().enumerate() {
            let bit = (index >> i) & 1;
            match op {
                PauliOp::I | PauliOp::X => {}
                // Y|0> = i|1>, Y|1> = -i|0>
                PauliOp::Y => {
                    phase *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                }
                PauliOp::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        phase
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            let c = match op {
                PauliOp::I => 'I',
                PauliOp::X => 'X',
                PauliOp::Y => 'Y',
                PauliOp::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings like "ZIZ". Qubit 0 is the leftmost character.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        let mut ops = Vec::with_capacity(s.len());
        for ch in s.chars() {
            ops.push(match ch {
                'I' | 'i' => PauliOp::I,
                'X' | 'x' => PauliOp::X,
                'Y' | 'y' => PauliOp::Y,
                'Z' | 'z' => PauliOp::Z,
                other => {
                    return Err(Error::Parse(format!(
                        "invalid Pauli character {other:?} (expected I, X, Y or Z)"
                    )))
                }
            });
        }
        Ok(PauliString { ops })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let p: PauliString = "ZIXY".parse().unwrap();
        assert_eq!(p.to_string(), "ZIXY");
        assert_eq!(p.len(), 4);
        assert!(!p.is_identity());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(PauliString::from_str("").is_err());
        assert!(PauliString::from_str("ZQ").is_err());
    }

    #[test]
    fn flip_mask_and_phase() {
        let p: PauliString = "XZY".parse().unwrap();
        // X on qubit 0, Z on qubit 1, Y on qubit 2.
        assert_eq!(p.flip_mask(), 0b101);
        // |010>: Z sees bit 1 -> -1; Y sees bit 0 -> +i.
        assert_eq!(p.phase(0b010), C64::new(0.0, -1.0));
        // |000>: only Y contributes +i.
        assert_eq!(p.phase(0), C64::new(0.0, 1.0));
    }
}
