//! Square complex matrices for gates and register operators.
//!
//! Register basis index `i` encodes qubit `j` in bit `j` of `i`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Diagonal matrix with real entries.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = C64::new(*v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `self ⊗ other`, with `self` on the more significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let d = n * m;
        let mut out = Self::zeros(d);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * d + j * m + l] = a * other.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * x[j]).sum())
            .collect()
    }

    /// `⟨x|M|x⟩`, real part only.
    pub fn expectation(&self, x: &[C64]) -> f64 {
        let mx = self.matvec(x);
        x.iter().zip(&mx).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|M†M − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entry of `|M² − M|` combined with the Hermiticity defect.
    pub fn projector_defect(&self) -> f64 {
        self.matmul(self)
            .max_abs_diff(self)
            .max(self.hermiticity_defect())
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self.data[i * n + j].norm() <= tol))
    }

    pub fn real_part(&self) -> Matrix {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.iter().map(|z| z.re).collect(),
        }
    }

    /// The real representation `[[A, −B], [B, A]]` of `A + iB`.
    pub fn realify(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.data[i * n + j];
                out.set(i, j, z.re);
                out.set(n + i, n + j, z.re);
                out.set(n + i, j, z.im);
                out.set(i, n + j, -z.im);
            }
        }
        out
    }

    /// Lift a `2^w × 2^w` gate acting on `targets` to the full `q`-qubit
    /// register. The first target is the most significant local bit.
    pub fn embed_gate(gate: &CMatrix, targets: &[usize], qubits: usize) -> Result<Self> {
        let w = targets.len();
        if gate.dim != 1 << w {
            return Err(Error::InvalidGate(format!(
                "gate of dimension {} acting on {w} qubits",
                gate.dim
            )));
        }
        let d = 1usize << qubits;
        let local = |i: usize| {
            targets
                .iter()
                .fold(0usize, |acc, &t| (acc << 1) | ((i >> t) & 1))
        };
        let mask = targets.iter().fold(0usize, |acc, &t| acc | (1 << t));
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                if i & !mask == j & !mask {
                    out.data[i * d + j] = gate.get(local(i), local(j));
                }
            }
        }
        Ok(out)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Computational basis state `|i⟩` in dimension `dim`.
pub fn basis(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); dim];
    v[i] = c(1.0, 0.0);
    v
}

pub fn cnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Common gates.
pub mod gates {
    use super::*;

    pub fn x() -> CMatrix {
        CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn h() -> CMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real(2, &[r, r, r, -r]).unwrap()
    }

    pub fn s() -> CMatrix {
        CMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap()
    }

    /// `exp(−iθY/2)`: sends `|0⟩` to `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    pub fn ry(theta: f64) -> CMatrix {
        let (s, co) = (0.5 * theta).sin_cos();
        CMatrix::from_real(2, &[co, -s, s, co]).unwrap()
    }

    /// Controlled-NOT with the control on the first target.
    pub fn cnot() -> CMatrix {
        CMatrix::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gates_are_unitary() {
        for g in [
            gates::x(),
            gates::h(),
            gates::s(),
            gates::ry(0.7),
            gates::cnot(),
        ] {
            assert!(g.unitarity_defect() < 1e-15);
        }
    }

    #[test]
    fn embedding_respects_bit_order() {
        // X on qubit 1 of a 2-qubit register flips bit 1: |0⟩ ↔ |2⟩.
        let x1 = CMatrix::embed_gate(&gates::x(), &[1], 2).unwrap();
        assert_eq!(x1.get(2, 0), c(1.0, 0.0));
        assert_eq!(x1.get(3, 1), c(1.0, 0.0));
        // CNOT with control 0, target 1: |1⟩ (bit 0 set) → |3⟩.
        let cx = CMatrix::embed_gate(&gates::cnot(), &[0, 1], 2).unwrap();
        assert_eq!(cx.get(3, 1), c(1.0, 0.0));
        assert_eq!(cx.get(0, 0), c(1.0, 0.0));
        assert_eq!(cx.get(2, 2), c(1.0, 0.0));
    }

    #[test]
    fn kron_matches_embedding() {
        let a = gates::h();
        let b = gates::s();
        let k = a.kron(&b);
        let e = CMatrix::embed_gate(&a, &[1], 2)
            .unwrap()
            .matmul(&CMatrix::embed_gate(&b, &[0], 2).unwrap());
        assert!(k.max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn realify_is_a_homomorphism() {
        let a = gates::s().matmul(&gates::h());
        let b = gates::h();
        let lhs = a.matmul(&b).realify();
        let rhs = a.realify().matmul(&b.realify()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }
}
