//! Small dense complex matrices for gate definitions and oracle checks.
//!
//! Everything here is sized for few-qubit operators (dimension at most 256),
//! so the implementations favour clarity over asymptotics.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const C_ZERO: C64 = Complex64::new(0.0, 0.0);
pub const C_ONE: C64 = Complex64::new(1.0, 0.0);
pub const C_I: C64 = Complex64::new(0.0, 1.0);

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![C_ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C_ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix rows must form a square");
            data.extend_from_slice(row);
        }
        CMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C_ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.data[r1 * n + c1];
                if a == C_ZERO {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        out.data[(r1 * m + r2) * (n * m) + (c1 * m + c2)] = a * other.data[r2 * m + c2];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation of U†U from the identity, measured element-wise.
    pub fn unitarity_deviation(&self) -> f64 {
        self.dagger().mul(self).max_abs_diff(&CMatrix::identity(self.dim))
    }

    pub fn check_unitary(&self, tolerance: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > tolerance {
            return Err(Error::NonUnitary { deviation, tolerance });
        }
        Ok(())
    }

    /// Apply to a column vector.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![C_ZERO; n];
        for r in 0..n {
            let mut acc = C_ZERO;
            for c in 0..n {
                acc += self.data[r * n + c] * v[c];
            }
            out[r] = acc;
        }
        out
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
///
/// The complex Hermitian matrix H = A + iB is embedded as the real symmetric
/// matrix [[A, -B], [B, A]], whose spectrum is that of H with every eigenvalue
/// doubled in multiplicity; a cyclic Jacobi sweep then diagonalizes it.
pub fn min_eigenvalue_hermitian(m: &CMatrix) -> f64 {
    let n = m.dim;
    let d = 2 * n;
    let mut a = vec![0.0f64; d * d];
    for r in 0..n {
        for c in 0..n {
            let v = m.get(r, c);
            a[r * d + c] = v.re;
            a[(r + n) * d + (c + n)] = v.re;
            a[r * d + (c + n)] = -v.im;
            a[(r + n) * d + c] = v.im;
        }
    }
    // Classical Jacobi rotations until off-diagonal mass is negligible.
    for _sweep in 0..100 {
        let mut off = 0.0;
        for r in 0..d {
            for c in (r + 1)..d {
                off += a[r * d + c] * a[r * d + c];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let tau = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // B = A J (mix columns p and q), then A <- J^T B (mix rows).
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..d).map(|i| a[i * d + i]).fold(f64::INFINITY, f64::min)
}

// Fixed single-qubit operators.

pub fn pauli_i() -> CMatrix {
    CMatrix::identity(2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_rows(&[&[C_ZERO, C_ONE], &[C_ONE, C_ZERO]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[&[C_ZERO, -C_I], &[C_I, C_ZERO]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_rows(&[&[C_ONE, C_ZERO], &[C_ZERO, -C_ONE]])
}

pub fn hadamard() -> CMatrix {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_rows(&[&[h, h], &[h, -h]])
}

/// exp(-i angle/2 X)
pub fn rot_x(angle: f64) -> CMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    let c = C64::new(c, 0.0);
    let ms = C64::new(0.0, -s);
    CMatrix::from_rows(&[&[c, ms], &[ms, c]])
}

/// exp(-i angle/2 Y)
pub fn rot_y(angle: f64) -> CMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    let c = C64::new(c, 0.0);
    let s = C64::new(s, 0.0);
    CMatrix::from_rows(&[&[c, -s], &[s, c]])
}
