//! Standard-form Hamiltonians over clock ⊗ register.
//!
//! Operators are stored as lists of clock-block terms `|a⟩⟨b| ⊗ M` and only
//! materialized densely on the subspace being analysed. When any register
//! operator has an imaginary part the dense form is the real representation
//! `[[A, −B], [B, A]]`; every eigenvalue then appears twice and
//! [`StandardFormHamiltonian::block_spectrum`] reports each once.
//!
//! Dense index of `(clock position p, register state r)` inside a block is
//! `p·R + r`, followed by the same range again for imaginary parts when
//! realified.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::circuit::CircuitSpec;
use super::clock::{mixed_cuts, ClockSpec, Subspace, SubspaceKind};
use super::complex::{cnorm, CMatrix};
use crate::error::{Error, Result};
use crate::linalg::{eig_dense, is_psd, rayleigh, DenseSymmetric, Matrix};
use crate::walks::one_minus_cos;

/// Default cap on the real dimension of an assembled Hamiltonian.
pub const DEFAULT_MAX_DIM: usize = 16384;

const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockTerm {
    pub row: usize,
    pub col: usize,
    pub op: CMatrix,
}

/// `Σ |row⟩⟨col| ⊗ op` over clock labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClockOperator {
    pub terms: Vec<BlockTerm>,
}

impl ClockOperator {
    fn push(&mut self, row: usize, col: usize, op: CMatrix) {
        self.terms.push(BlockTerm { row, col, op });
    }

    fn max_imag(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.op.max_imag())
            .fold(0.0, f64::max)
    }

    /// Dense restriction to the clock labels `labels` (in that order).
    pub fn restrict(&self, labels: &[usize], reg: usize, realify: bool) -> DenseSymmetric {
        let n = labels.len() * reg;
        let dim = if realify { 2 * n } else { n };
        let mut m = Matrix::zeros(dim, dim);
        let pos = |l: usize| labels.iter().position(|&x| x == l);
        for term in &self.terms {
            let (Some(pr), Some(pc)) = (pos(term.row), pos(term.col)) else {
                continue;
            };
            for r in 0..reg {
                for s in 0..reg {
                    let z = term.op.get(r, s);
                    if z == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let (i, j) = (pr * reg + r, pc * reg + s);
                    m.data[i * dim + j] += z.re;
                    if realify {
                        m.data[(n + i) * dim + n + j] += z.re;
                        m.data[(n + i) * dim + j] += z.im;
                        m.data[i * dim + n + j] -= z.im;
                    }
                }
            }
        }
        DenseSymmetric::from_matrix(&m, 1e-10).expect("clock operators are Hermitian")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Trans,
    Pen,
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormHamiltonian {
    circuit: CircuitSpec,
    clock: ClockSpec,
    pub trans: ClockOperator,
    pub pen: ClockOperator,
    pub input: ClockOperator,
    pub output: ClockOperator,
    complex: bool,
}

pub fn assemble(c: &CircuitSpec, k: &ClockSpec) -> Result<StandardFormHamiltonian> {
    assemble_capped(c, k, DEFAULT_MAX_DIM)
}

pub fn assemble_capped(
    c: &CircuitSpec,
    k: &ClockSpec,
    max_dim: usize,
) -> Result<StandardFormHamiltonian> {
    if c.steps() != k.steps() {
        return Err(Error::DimensionMismatch(format!(
            "circuit has {} clock states but the clock's valid path has {}",
            c.steps(),
            k.steps()
        )));
    }
    check_identity_prefix(c, k)?;
    let reg = c.register_dim();
    let path = k.valid_path();

    let mut input = ClockOperator::default();
    if k.input_penalties().is_empty() {
        let p = c.ancilla_projector();
        if !c.ancillas().is_empty() {
            for &label in &path[..k.t_init()] {
                input.push(label, label, p.clone());
            }
        }
    } else {
        for (t, p) in k.input_penalties() {
            if p.dim() != reg {
                return Err(Error::DimensionMismatch(format!(
                    "input penalty at t = {t} has dimension {}, register has {reg}",
                    p.dim()
                )));
            }
            input.push(path[*t], path[*t], p.clone());
        }
    }

    let mut output = ClockOperator::default();
    if let Some(p) = c.output_projector() {
        let last = *path.last().expect("path has >= 2 labels");
        output.push(last, last, p);
    }

    let id = CMatrix::identity(reg);
    let half = id.scale(0.5);
    let mut trans = ClockOperator::default();
    for &(a, b) in k.rules() {
        let u = match path.iter().position(|&l| l == b) {
            Some(t) if t > 0 && path[t - 1] == a => c.step_unitary(t),
            _ => id.clone(),
        };
        trans.push(a, a, half.clone());
        trans.push(b, b, half.clone());
        trans.push(b, a, u.scale(-0.5));
        trans.push(a, b, u.adjoint().scale(-0.5));
    }

    let mut pen = ClockOperator::default();
    for l in 0..k.num_labels() {
        if k.is_illegal(l) {
            pen.push(l, l, id.clone());
        }
    }

    let complex = trans.max_imag() > 0.0 || input.max_imag() > 0.0;
    let h = StandardFormHamiltonian {
        circuit: c.clone(),
        clock: k.clone(),
        trans,
        pen,
        input,
        output,
        complex,
    };
    if h.dim() > max_dim {
        return Err(Error::TooLarge {
            dim: h.dim(),
            cap: max_dim,
        });
    }
    Ok(h)
}

fn check_identity_prefix(c: &CircuitSpec, k: &ClockSpec) -> Result<()> {
    for g in c.gates() {
        if g.step <= k.t_init() && !g.matrix.is_identity(IDENTITY_TOL) {
            return Err(Error::ClockContractViolation(format!(
                "gate at step {} is not the identity but t_init = {}",
                g.step,
                k.t_init()
            )));
        }
    }
    Ok(())
}

fn needs_realification(c: &CircuitSpec, k: &ClockSpec) -> bool {
    !c.is_real() || k.input_penalties().iter().any(|(_, p)| p.max_imag() > 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceSummary {
    pub kind: SubspaceKind,
    pub labels: Vec<String>,
    pub valid_path: bool,
    pub cycle: bool,
    pub reach: Option<usize>,
    /// Complex dimension.
    pub dim: usize,
    pub lambda0: f64,
    pub kernel_dim: usize,
}

impl StandardFormHamiltonian {
    pub fn circuit(&self) -> &CircuitSpec {
        &self.circuit
    }

    pub fn clock(&self) -> &ClockSpec {
        &self.clock
    }

    pub fn register_dim(&self) -> usize {
        self.circuit.register_dim()
    }

    /// 2 when realified, else 1.
    pub fn factor(&self) -> usize {
        if self.complex {
            2
        } else {
            1
        }
    }

    pub fn is_realified(&self) -> bool {
        self.complex
    }

    /// Real dimension of the full dense form.
    pub fn dim(&self) -> usize {
        self.clock.num_labels() * self.register_dim() * self.factor()
    }

    pub fn partition(&self) -> Vec<Subspace> {
        self.clock.invariant_partition()
    }

    pub fn valid_subspace(&self) -> Subspace {
        self.partition()
            .into_iter()
            .find(|s| s.valid_path)
            .expect("label 0 always lies on the valid path")
    }

    fn op(&self, c: Component) -> &ClockOperator {
        match c {
            Component::Trans => &self.trans,
            Component::Pen => &self.pen,
            Component::In => &self.input,
            Component::Out => &self.output,
        }
    }

    pub fn component_block(&self, c: Component, labels: &[usize]) -> DenseSymmetric {
        self.op(c)
            .restrict(labels, self.register_dim(), self.complex)
    }

    /// `H` restricted to the given clock labels.
    pub fn block(&self, labels: &[usize]) -> DenseSymmetric {
        let reg = self.register_dim();
        let mut all = ClockOperator::default();
        for c in [
            Component::Trans,
            Component::Pen,
            Component::In,
            Component::Out,
        ] {
            all.terms.extend(self.op(c).terms.iter().cloned());
        }
        all.restrict(labels, reg, self.complex)
    }

    /// Whole Hamiltonian as a dense matrix.
    pub fn full(&self) -> DenseSymmetric {
        let labels: Vec<usize> = (0..self.clock.num_labels()).collect();
        self.block(&labels)
    }

    /// `H` on the valid path in walk order.
    pub fn legal_block(&self) -> DenseSymmetric {
        self.block(self.clock.valid_path())
    }

    /// Eigenvalues on a block, one per complex eigenvalue.
    pub fn block_spectrum(&self, labels: &[usize]) -> Result<Vec<f64>> {
        let s = eig_dense(&self.block(labels), false)?;
        Ok(if self.complex {
            s.halve_multiplicities()
        } else {
            s.eigenvalues
        })
    }

    pub fn ground_energy(&self, labels: &[usize]) -> Result<f64> {
        Ok(eig_dense(&self.block(labels), false)?.min())
    }

    pub fn summarize(&self, kernel_tol: f64) -> Result<Vec<SubspaceSummary>> {
        self.partition()
            .into_iter()
            .map(|s| {
                let spec = self.block_spectrum(&s.labels)?;
                Ok(SubspaceSummary {
                    kind: s.kind,
                    labels: s
                        .labels
                        .iter()
                        .map(|&l| self.clock.labels()[l].clone())
                        .collect(),
                    valid_path: s.valid_path,
                    cycle: s.cycle,
                    reach: s.reach,
                    dim: s.labels.len() * self.register_dim(),
                    lambda0: spec[0],
                    kernel_dim: spec.iter().filter(|&&x| x.abs() <= kernel_tol).count(),
                })
            })
            .collect()
    }

    /// Dense real vector for a history state on the valid block.
    pub fn history_vector(&self, h: &HistoryState) -> Result<Vec<f64>> {
        let amps = h.amplitudes();
        if self.complex {
            Ok(amps
                .iter()
                .map(|z| z.re)
                .chain(amps.iter().map(|z| z.im))
                .collect())
        } else {
            let im = amps.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            if im > 1e-14 {
                return Err(Error::DomainError(
                    "complex history state on a real Hamiltonian; use history_energy".into(),
                ));
            }
            Ok(amps.iter().map(|z| z.re).collect())
        }
    }

    /// `⟨Ψ|H|Ψ⟩/⟨Ψ|Ψ⟩` over the valid block, for any complex history state.
    pub fn history_energy(&self, h: &HistoryState) -> Result<f64> {
        let block = ClockOperator {
            terms: [
                Component::Trans,
                Component::Pen,
                Component::In,
                Component::Out,
            ]
            .iter()
            .flat_map(|&c| self.op(c).terms.iter().cloned())
            .collect(),
        }
        .restrict(self.clock.valid_path(), self.register_dim(), true);
        let amps = h.amplitudes();
        let v: Vec<f64> = amps
            .iter()
            .map(|z| z.re)
            .chain(amps.iter().map(|z| z.im))
            .collect();
        rayleigh(&block, &v)
    }
}

/// `W = Σ_t |t⟩⟨t| ⊗ V_t` on the valid path, realified when the assembled
/// Hamiltonian would be.
pub fn conjugation_w(c: &CircuitSpec, k: &ClockSpec) -> Result<Matrix> {
    check_identity_prefix(c, k)?;
    let v = c.prefix_unitaries();
    let reg = c.register_dim();
    let n = v.len() * reg;
    let realify = needs_realification(c, k);
    let dim = if realify { 2 * n } else { n };
    let mut w = Matrix::zeros(dim, dim);
    for (t, vt) in v.iter().enumerate() {
        for r in 0..reg {
            for s in 0..reg {
                let z = vt.get(r, s);
                let (i, j) = (t * reg + r, t * reg + s);
                w.set(i, j, z.re);
                if realify {
                    w.set(n + i, n + j, z.re);
                    w.set(n + i, j, z.im);
                    w.set(i, n + j, -z.im);
                }
            }
        }
    }
    Ok(w)
}

/// `Δ^(T) ⊗ 1` in the same layout as [`conjugation_w`].
pub fn walk_tensor_identity(t: usize, reg: usize, realify: bool) -> Result<DenseSymmetric> {
    let lap = crate::walks::laplacian(t)?.to_dense();
    Ok(kron_identity(&lap, reg, realify))
}

fn kron_identity(m: &DenseSymmetric, reg: usize, realify: bool) -> DenseSymmetric {
    let l = m.dim();
    let n = l * reg;
    let dim = if realify { 2 * n } else { n };
    let mut out = DenseSymmetric::zeros(dim);
    for p in 0..l {
        for q in p..l {
            let x = m.get(p, q);
            if x == 0.0 {
                continue;
            }
            for r in 0..reg {
                out.add_sym(p * reg + r, q * reg + r, x);
                if realify {
                    out.add_sym(n + p * reg + r, n + q * reg + r, x);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Equal weight on every clock state.
    Uniform,
    /// Ground-state profile of a walk with a unit penalty on its last
    /// state: `∝ cos((2t+1)π/4T)`.
    NoProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryState {
    /// Clock amplitudes, unit norm.
    pub profile: Vec<f64>,
    /// `|ψ_t⟩ = V_t |ψ_0⟩`.
    pub trajectory: Vec<Vec<C64>>,
}

impl HistoryState {
    /// Amplitudes in block order `(t, r) ↦ t·R + r`.
    pub fn amplitudes(&self) -> Vec<C64> {
        self.profile
            .iter()
            .zip(&self.trajectory)
            .flat_map(|(a, psi)| psi.iter().map(move |z| z * a))
            .collect()
    }

    pub fn norm(&self) -> f64 {
        cnorm(&self.amplitudes())
    }
}

pub fn history_state(c: &CircuitSpec, input: &[C64], profile: Profile) -> Result<HistoryState> {
    if input.len() != c.register_dim() {
        return Err(Error::DimensionMismatch(format!(
            "input of length {} for register of dimension {}",
            input.len(),
            c.register_dim()
        )));
    }
    let n = cnorm(input);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::DomainError(format!(
            "input has norm {n}, expected 1"
        )));
    }
    let t = c.steps();
    let tf = t as f64;
    let raw: Vec<f64> = match profile {
        Profile::Uniform => vec![1.0; t],
        Profile::NoProfile => (0..t)
            .map(|s| ((2 * s + 1) as f64 * std::f64::consts::PI / (4.0 * tf)).cos())
            .collect(),
    };
    let z = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let trajectory = c
        .prefix_unitaries()
        .iter()
        .map(|v| v.matvec(input))
        .collect();
    Ok(HistoryState {
        profile: raw.into_iter().map(|x| x / z).collect(),
        trajectory,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedReport {
    pub labels: Vec<String>,
    pub reach: usize,
    /// `1 − cos(π/(2(2r+1)))`.
    pub bound: f64,
    pub lambda0: f64,
    pub segments_lambda0: f64,
    /// `H|_S − segments ≥ 0`.
    pub cut_is_lower_bound: bool,
    pub holds: bool,
}

/// Lower bound on a mixed component from cutting it into short pieces that
/// each touch an illegal label.
pub fn mixed_lower_bound(reach: usize) -> f64 {
    one_minus_cos(std::f64::consts::PI / (2.0 * (2 * reach + 1) as f64))
}

pub fn verify_mixed(h: &StandardFormHamiltonian, sub: &Subspace) -> Result<MixedReport> {
    if sub.kind != SubspaceKind::Mixed {
        return Err(Error::Precondition("subspace is not mixed".into()));
    }
    let computed = sub.reach.expect("mixed components carry a reach");
    let reach = h.clock().reach().unwrap_or(computed);
    let flags: Vec<bool> = sub
        .labels
        .iter()
        .map(|&l| h.clock().is_illegal(l))
        .collect();
    let cuts = mixed_cuts(&flags, sub.cycle);
    let l = sub.labels.len();

    let mut seg = DenseSymmetric::zeros(l);
    let mut edge = |i: usize, j: usize| {
        seg.add_sym(i, i, 0.5);
        seg.add_sym(j, j, 0.5);
        seg.add_sym(i, j, -0.5);
    };
    for i in 0..l.saturating_sub(1) {
        if !cuts.contains(&(i, i + 1)) {
            edge(i, i + 1);
        }
    }
    if sub.cycle && l > 2 && !cuts.contains(&(l - 1, 0)) {
        edge(l - 1, 0);
    }
    for (i, &f) in flags.iter().enumerate() {
        if f {
            seg.add_sym(i, i, 1.0);
        }
    }
    let segments_lambda0 = eig_dense(&seg, false)?.min();
    let block = h.block(&sub.labels);
    let lifted = kron_identity(&seg, h.register_dim(), h.is_realified());
    let cut_is_lower_bound = is_psd(&block.sub(&lifted)?, 1e-12)?;
    let lambda0 = eig_dense(&block, false)?.min();
    let bound = mixed_lower_bound(reach);
    Ok(MixedReport {
        labels: sub
            .labels
            .iter()
            .map(|&x| h.clock().labels()[x].clone())
            .collect(),
        reach,
        bound,
        lambda0,
        segments_lambda0,
        cut_is_lower_bound,
        holds: cut_is_lower_bound
            && segments_lambda0 >= bound - 1e-12
            && lambda0 >= segments_lambda0 - 1e-12,
    })
}
