use num_complex::Complex64 as C64;

use super::complex::{basis, c, gates, CMatrix};
use crate::error::{Error, Result};

/// Gate matrices must be unitary to this precision.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Largest register supported; dense register operators are `4^q` entries.
pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    /// Clock step, `1 ≤ step ≤ T − 1`; maps clock label `step − 1` to `step`.
    pub step: usize,
    pub targets: Vec<usize>,
    pub matrix: CMatrix,
}

/// A circuit laid out along a clock of `steps` states. Steps without a
/// gate apply the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    qubits: usize,
    steps: usize,
    gates: Vec<Gate>,
    ancillas: Vec<usize>,
    output: Option<usize>,
}

impl CircuitSpec {
    pub fn new(
        qubits: usize,
        steps: usize,
        gates: Vec<Gate>,
        ancillas: Vec<usize>,
        output: Option<usize>,
    ) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::InvalidSize(format!(
                "qubit count {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidSize(format!(
                "a clock needs at least 2 states, got {steps}"
            )));
        }
        let mut used = vec![false; steps];
        for g in &gates {
            if g.step == 0 || g.step >= steps {
                return Err(Error::InvalidGate(format!(
                    "step {} outside 1..={}",
                    g.step,
                    steps - 1
                )));
            }
            if used[g.step] {
                return Err(Error::InvalidGate(format!("two gates at step {}", g.step)));
            }
            used[g.step] = true;
            if g.targets.is_empty() || g.targets.len() > 2 {
                return Err(Error::InvalidGate(format!(
                    "gate at step {} acts on {} qubits; 1 or 2 supported",
                    g.step,
                    g.targets.len()
                )));
            }
            if g.targets.iter().any(|&t| t >= qubits)
                || (g.targets.len() == 2 && g.targets[0] == g.targets[1])
            {
                return Err(Error::InvalidGate(format!(
                    "bad targets {:?} at step {}",
                    g.targets, g.step
                )));
            }
            if g.matrix.dim() != 1 << g.targets.len() {
                return Err(Error::InvalidGate(format!(
                    "gate at step {} has dimension {}, expected {}",
                    g.step,
                    g.matrix.dim(),
                    1 << g.targets.len()
                )));
            }
            let defect = g.matrix.unitarity_defect();
            if defect > UNITARITY_TOL {
                return Err(Error::InvalidGate(format!(
                    "gate at step {} is not unitary (defect {defect:e})",
                    g.step
                )));
            }
        }
        if let Some(&a) = ancillas.iter().find(|&&a| a >= qubits) {
            return Err(Error::InvalidGate(format!("ancilla {a} out of range")));
        }
        if let Some(o) = output {
            if o >= qubits {
                return Err(Error::InvalidGate(format!("output qubit {o} out of range")));
            }
        }
        let mut gates = gates;
        gates.sort_by_key(|g| g.step);
        Ok(Self {
            qubits,
            steps,
            gates,
            ancillas,
            output,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn ancillas(&self) -> &[usize] {
        &self.ancillas
    }

    pub fn output(&self) -> Option<usize> {
        self.output
    }

    pub fn register_dim(&self) -> usize {
        1 << self.qubits
    }

    /// `U_t` on the full register.
    pub fn step_unitary(&self, t: usize) -> CMatrix {
        match self.gates.iter().find(|g| g.step == t) {
            Some(g) => CMatrix::embed_gate(&g.matrix, &g.targets, self.qubits)
                .expect("validated at construction"),
            None => CMatrix::identity(self.register_dim()),
        }
    }

    /// `V_t = U_t ⋯ U_1` for `t = 0 … T−1`; `V_0 = 1`.
    pub fn prefix_unitaries(&self) -> Vec<CMatrix> {
        let mut out = Vec::with_capacity(self.steps);
        let mut v = CMatrix::identity(self.register_dim());
        out.push(v.clone());
        for t in 1..self.steps {
            v = self.step_unitary(t).matmul(&v);
            out.push(v.clone());
        }
        out
    }

    /// The whole circuit `U = U_{T−1} ⋯ U_1`.
    pub fn total_unitary(&self) -> CMatrix {
        self.prefix_unitaries().pop().expect("steps >= 2")
    }

    pub fn is_real(&self) -> bool {
        self.gates.iter().all(|g| g.matrix.max_imag() == 0.0)
    }

    /// `Π_out = |1⟩⟨1|` on the output qubit, if there is one.
    pub fn output_projector(&self) -> Option<CMatrix> {
        let o = self.output?;
        let d: Vec<f64> = (0..self.register_dim())
            .map(|i| ((i >> o) & 1) as f64)
            .collect();
        Some(CMatrix::diagonal(&d))
    }

    /// `1 − |0…0⟩⟨0…0|` on the ancillas: penalizes any ancilla left set.
    pub fn ancilla_projector(&self) -> CMatrix {
        let mask = self.ancillas.iter().fold(0usize, |acc, &a| acc | (1 << a));
        let d: Vec<f64> = (0..self.register_dim())
            .map(|i| if i & mask != 0 { 1.0 } else { 0.0 })
            .collect();
        CMatrix::diagonal(&d)
    }

    /// `U† Π_out U`, the rejection observable on circuit inputs.
    pub fn rejection_operator(&self) -> Result<CMatrix> {
        let p = self
            .output_projector()
            .ok_or_else(|| Error::DomainError("circuit has no output qubit".into()))?;
        let u = self.total_unitary();
        Ok(u.adjoint().matmul(&p).matmul(&u))
    }

    /// Same circuit laid out on a different number of clock states.
    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        Self::new(
            self.qubits,
            steps,
            self.gates.clone(),
            self.ancillas.clone(),
            self.output,
        )
    }
}

/// Probability that the circuit accepts `witness`, which must leave every
/// ancilla in `|0⟩`.
pub fn acceptance_probability(c: &CircuitSpec, witness: &[C64]) -> Result<f64> {
    if witness.len() != c.register_dim() {
        return Err(Error::DimensionMismatch(format!(
            "witness of length {} for a {}-qubit register",
            witness.len(),
            c.qubits()
        )));
    }
    let n = super::complex::cnorm(witness);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::DomainError(format!(
            "witness has norm {n}, expected 1"
        )));
    }
    let leak = c.ancilla_projector().expectation(witness);
    if leak > 1e-12 {
        return Err(Error::NotInitialized(format!(
            "ancilla weight {leak:e} outside |0…0⟩"
        )));
    }
    let reject = c.rejection_operator()?.expectation(witness);
    Ok((1.0 - reject).clamp(0.0, 1.0))
}

/// Ready-made circuits. Qubit 0 is the output ancilla throughout.
pub mod builtin {
    use super::*;

    /// No gates; ancilla 0 is the output. Accepts every valid input.
    pub fn identity(qubits: usize, steps: usize) -> Result<CircuitSpec> {
        CircuitSpec::new(qubits, steps, vec![], vec![0], Some(0))
    }

    /// Flips the output at the last step. Rejects every valid input.
    pub fn always_reject(qubits: usize, steps: usize) -> Result<CircuitSpec> {
        let g = Gate {
            step: steps - 1,
            targets: vec![0],
            matrix: gates::x(),
        };
        CircuitSpec::new(qubits, steps, vec![g], vec![0], Some(0))
    }

    /// Rotates the output at the last step so that every valid input is
    /// rejected with probability `p`. Qubit 1 is an idle witness.
    pub fn biased(steps: usize, p: f64) -> Result<CircuitSpec> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::DomainError(format!("probability {p} not in [0, 1]")));
        }
        let theta = 2.0 * p.sqrt().asin();
        let g = Gate {
            step: steps - 1,
            targets: vec![0],
            matrix: gates::ry(theta),
        };
        CircuitSpec::new(2, steps, vec![g], vec![0], Some(0))
    }

    /// Witness-dependent rejection: the output is rotated by a controlled
    /// `Ry` so witness `|0⟩` is rejected with `p0` and `|1⟩` with `p1`.
    pub fn witness_biased(steps: usize, p0: f64, p1: f64) -> Result<CircuitSpec> {
        for p in [p0, p1] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::DomainError(format!("probability {p} not in [0, 1]")));
            }
        }
        if steps < 3 {
            return Err(Error::InvalidSize("needs at least 3 clock states".into()));
        }
        let r0 = gates::ry(2.0 * p0.sqrt().asin());
        let r1 = gates::ry(2.0 * p1.sqrt().asin());
        // Local order (witness, output): block-diagonal in the witness bit.
        let mut m = CMatrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, r0.get(i, j));
                m.set(2 + i, 2 + j, r1.get(i, j));
            }
        }
        let g = Gate {
            step: steps - 1,
            targets: vec![1, 0],
            matrix: m,
        };
        CircuitSpec::new(2, steps, vec![g], vec![0], Some(0))
    }

    /// Input state with all qubits in `|0⟩` except the listed ones.
    pub fn product_input(qubits: usize, ones: &[usize]) -> Vec<C64> {
        let idx = ones.iter().fold(0usize, |acc, &q| acc | (1 << q));
        basis(1 << qubits, idx)
    }

    pub fn phase_input(qubits: usize) -> Vec<C64> {
        let d = 1usize << qubits;
        let mut v = vec![c(0.0, 0.0); d];
        // Ancilla 0 must be |0⟩: only even indices are populated.
        let even: Vec<usize> = (0..d).step_by(2).collect();
        let a = 1.0 / (even.len() as f64).sqrt();
        for (k, &i) in even.iter().enumerate() {
            v[i] = C64::from_polar(a, 0.3 * k as f64);
        }
        v
    }
}
