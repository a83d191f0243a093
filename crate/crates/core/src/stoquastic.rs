//! Block-diagonal rotation of a projector into stoquastic 2×2 form.
//!
//! For a real projector `M` and a split `s`, diagonalize the top-left block
//! `M_aa = Σ α_i x_i x_iᵀ`. Every `x_i` with `0 < α_i < 1` pairs with
//! `y_i ∝ −M_ba x_i`, which is an eigenvector of `M_bb` with eigenvalue
//! `μ_i = 1 − α_i`; on `(x_i, y_i)` the projector reads
//!
//! ```text
//! [ 1−μ_i          −√(μ_i(1−μ_i)) ]
//! [ −√(μ_i(1−μ_i))  μ_i           ]
//! ```
//!
//! The `α_i` are squared cosines of the principal angles between `range M`
//! and the first `s` coordinates, so `μ_i` are squared cosines of the angles
//! to the remaining coordinates. The leftover vectors on either side are
//! eigenvectors with eigenvalue 0 or 1.

use serde::Serialize;

use crate::circuitham::{CMatrix, CircuitSpec, ClockSpec};
use crate::error::{Error, Result};
use crate::linalg::{dot, eig_dense, norm, DenseSymmetric, Matrix};

/// Eigenvalues within this distance of 0 or 1 are snapped.
pub const SNAP_TOL: f64 = 1e-10;
const PROJECTOR_TOL: f64 = 1e-11;
const RECONSTRUCTION_TOL: f64 = 1e-9;
const PATTERN_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Block {
    /// Coupled pair at `(i, s+i)`.
    Pair { a: usize, b: usize, mu: f64 },
    /// 1×1 block on the first `s` coordinates.
    SingleA { index: usize, value: f64 },
    /// 1×1 block on the last `d − s` coordinates.
    SingleB { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorBlockForm {
    pub split: usize,
    /// `V = V′ ⊕ V″`, orthogonal.
    pub v: Matrix,
    /// `Vᵀ M V`.
    pub d: DenseSymmetric,
    pub blocks: Vec<Block>,
    /// Rank of `D_aa`.
    pub r_a: usize,
    /// Rank of `D_bb`.
    pub r_b: usize,
    /// Number of coupled pairs, equal to the rank of `D_ab`.
    pub pairs: usize,
}

impl ProjectorBlockForm {
    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    /// `V D Vᵀ`.
    pub fn reconstruct(&self) -> DenseSymmetric {
        self.d.congruence(&self.v.transpose()).expect("square")
    }

    /// True where the block form may be nonzero: the leading `r_a` and
    /// `r_b` diagonal entries of each side and the coupling diagonal.
    pub fn in_pattern(&self, i: usize, j: usize) -> bool {
        let s = self.split;
        let (i, j) = (i.min(j), i.max(j));
        (i == j && (i < self.r_a || (i >= s && i < s + self.r_b))) || (i < self.pairs && j == s + i)
    }

    /// Largest entry outside [`in_pattern`](Self::in_pattern).
    pub fn off_pattern_max(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if !self.in_pattern(i, j) {
                    worst = worst.max(self.d.get(i, j).abs());
                }
            }
        }
        worst
    }

    /// Smallest absolute entry inside the pattern; positive when the
    /// pattern is exact.
    pub fn in_pattern_min(&self) -> f64 {
        let n = self.dim();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                if self.in_pattern(i, j) {
                    best = best.min(self.d.get(i, j).abs());
                }
            }
        }
        best
    }

    /// Block parameters seen from the second side: `μ_i` for pairs and
    /// the 0/1 value of each trailing 1×1 block. Descending.
    pub fn mus(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .blocks
            .iter()
            .filter_map(|b| match *b {
                Block::Pair { mu, .. } => Some(mu),
                Block::SingleB { value, .. } => Some(value),
                Block::SingleA { .. } => None,
            })
            .collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }
}

fn snap(x: f64) -> f64 {
    if x.abs() < SNAP_TOL {
        0.0
    } else if (1.0 - x).abs() < SNAP_TOL {
        1.0
    } else {
        x
    }
}

/// Rotate `m` into block form with respect to the split after `s`
/// coordinates. `s = 0` and `s = dim` are accepted and reduce to a plain
/// diagonalization.
pub fn stoquastize(m: &DenseSymmetric, s: usize) -> Result<ProjectorBlockForm> {
    let d = m.dim();
    if s > d {
        return Err(Error::InvalidSize(format!(
            "split {s} exceeds dimension {d}"
        )));
    }
    let sq = m.to_matrix().matmul(&m.to_matrix())?;
    let defect = sq.max_abs_diff(&m.to_matrix());
    if defect > PROJECTOR_TOL {
        return Err(Error::NotAProjector(format!("|M² − M| = {defect:e}")));
    }
    let nb = d - s;
    let a_idx: Vec<usize> = (0..s).collect();
    let b_idx: Vec<usize> = (s..d).collect();

    // (α, x) on the first side, descending in μ = 1 − α, so ascending α.
    let mut a_vecs: Vec<(f64, Vec<f64>)> = Vec::new();
    if s > 0 {
        let sp = eig_dense(&m.submatrix(&a_idx), true)?;
        let vs = sp.eigenvectors.expect("requested");
        a_vecs = sp.eigenvalues.into_iter().map(snap).zip(vs).collect();
    }
    let m_ba = |x: &[f64]| -> Vec<f64> {
        (0..nb)
            .map(|i| (0..s).map(|j| m.get(s + i, j) * x[j]).sum())
            .collect()
    };

    let mut paired: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut a_single: Vec<(f64, Vec<f64>)> = Vec::new();
    for (alpha, x) in a_vecs {
        let y = m_ba(&x);
        let ny = norm(&y);
        if alpha > 0.0 && alpha < 1.0 && ny > SNAP_TOL {
            paired.push((1.0 - alpha, x, y.iter().map(|v| -v / ny).collect()));
        } else if alpha == 0.0 || alpha == 1.0 {
            a_single.push((alpha, x));
        } else {
            return Err(Error::DecompositionFailed(format!(
                "eigenvalue {alpha} of the leading block has no partner"
            )));
        }
    }
    // Descending μ; eig_dense returns ascending α so this is already stable.
    paired.sort_by(|p, q| q.0.total_cmp(&p.0));
    // Clean up orthogonality among the partners.
    let mut b_basis: Vec<Vec<f64>> = Vec::with_capacity(nb);
    for (_, _, y) in paired.iter_mut() {
        for prev in &b_basis {
            let c = dot(y, prev);
            y.iter_mut().zip(prev).for_each(|(a, p)| *a -= c * p);
        }
        let n = norm(y);
        y.iter_mut().for_each(|a| *a /= n);
        b_basis.push(y.clone());
    }
    a_single.sort_by(|p, q| q.0.total_cmp(&p.0));

    // Complement of the partners on the second side, diagonalizing M_bb there.
    let mut b_single: Vec<(f64, Vec<f64>)> = Vec::new();
    if nb > paired.len() {
        let proj = DenseSymmetric::from_fn(nb, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - b_basis.iter().map(|y| y[i] * y[j]).sum::<f64>()
        })?;
        let sp = eig_dense(&proj, true)?;
        let vecs = sp.eigenvectors.expect("requested");
        let comp: Vec<Vec<f64>> = sp
            .eigenvalues
            .iter()
            .zip(vecs)
            .filter(|(l, _)| **l > 0.5)
            .map(|(_, v)| v)
            .collect();
        let z = Matrix::from_columns(nb, &comp);
        let restricted = m.submatrix(&b_idx).congruence(&z)?;
        let sp = eig_dense(&restricted, true)?;
        let vecs = sp.eigenvectors.expect("requested");
        for (val, w) in sp.eigenvalues.into_iter().zip(vecs) {
            let val = snap(val);
            if val != 0.0 && val != 1.0 {
                return Err(Error::DecompositionFailed(format!(
                    "unpaired eigenvalue {val} on the trailing block"
                )));
            }
            b_single.push((val, z.matvec(&w)));
        }
        b_single.sort_by(|p, q| q.0.total_cmp(&p.0));
    }

    let mut v = Matrix::zeros(d, d);
    let mut blocks = Vec::with_capacity(d);
    let mut col = 0;
    for (i, (mu, x, _)) in paired.iter().enumerate() {
        place(&mut v, 0, col, x);
        blocks.push(Block::Pair {
            a: i,
            b: s + i,
            mu: *mu,
        });
        col += 1;
    }
    for (alpha, x) in &a_single {
        place(&mut v, 0, col, x);
        blocks.push(Block::SingleA {
            index: col,
            value: *alpha,
        });
        col += 1;
    }
    let mut col = s;
    for (_, _, y) in &paired {
        place(&mut v, s, col, y);
        col += 1;
    }
    for (val, w) in &b_single {
        place(&mut v, s, col, w);
        blocks.push(Block::SingleB {
            index: col,
            value: *val,
        });
        col += 1;
    }

    let dm = m.congruence(&v)?;
    let r_a = paired.len() + a_single.iter().filter(|p| p.0 == 1.0).count();
    let r_b = paired.len() + b_single.iter().filter(|p| p.0 == 1.0).count();
    let form = ProjectorBlockForm {
        split: s,
        v,
        d: dm,
        blocks,
        r_a,
        r_b,
        pairs: paired.len(),
    };
    let recon = form.reconstruct().max_abs_diff(m);
    if recon > RECONSTRUCTION_TOL {
        return Err(Error::DecompositionFailed(format!(
            "reconstruction error {recon:e}"
        )));
    }
    let off = form.off_pattern_max();
    if off > PATTERN_TOL {
        return Err(Error::DecompositionFailed(format!(
            "entry {off:e} outside the block pattern"
        )));
    }
    let bad_sign = (0..form.pairs).any(|i| form.d.get(i, s + i) > 0.0);
    if bad_sign {
        return Err(Error::DecompositionFailed("positive coupling".into()));
    }
    Ok(form)
}

fn place(v: &mut Matrix, offset: usize, col: usize, x: &[f64]) {
    for (i, xi) in x.iter().enumerate() {
        v.set(offset + i, col, *xi);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceKind {
    Yes { eta: f64 },
    No { eta: f64 },
    EqmaYes,
    EqmaNo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuTag {
    Accepting,
    Rejecting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuReport {
    pub kind: InstanceKind,
    /// Descending, each tagged by which side of ½ it falls.
    pub mus: Vec<(f64, MuTag)>,
}

/// Check the block parameters against the promise of an instance kind.
pub fn extract_mu(b: &ProjectorBlockForm, kind: InstanceKind) -> Result<MuReport> {
    let mus = b.mus();
    if mus.is_empty() {
        return Err(Error::InstanceContractViolation(
            "no valid inputs: every state is penalized at initialization".into(),
        ));
    }
    let min = *mus.last().unwrap();
    let ok = match kind {
        InstanceKind::EqmaNo => mus.iter().all(|&m| m == 1.0),
        InstanceKind::EqmaYes => min == 0.0,
        InstanceKind::No { eta } => min >= 1.0 - eta - SNAP_TOL,
        InstanceKind::Yes { eta } => min <= eta + SNAP_TOL,
    };
    if !ok {
        return Err(Error::InstanceContractViolation(format!(
            "{kind:?} violated: block parameters {mus:?}"
        )));
    }
    Ok(MuReport {
        kind,
        mus: mus
            .into_iter()
            .map(|m| {
                let tag = if m < 0.5 {
                    MuTag::Accepting
                } else {
                    MuTag::Rejecting
                };
                (m, tag)
            })
            .collect(),
    })
}

/// The rejection observable of a circuit put into block form, with the
/// first side spanning the support of the input penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitBlockForm {
    pub form: ProjectorBlockForm,
    /// Orthogonal change of register basis applied before `form.v`.
    pub basis: Matrix,
    /// Register operators were complex and have been realified; every
    /// block then appears twice.
    pub realified: bool,
}

impl CircuitBlockForm {
    /// Block parameters, one per complex block when realified.
    pub fn mus(&self) -> Vec<f64> {
        let m = self.form.mus();
        if self.realified {
            m.into_iter().step_by(2).collect()
        } else {
            m
        }
    }

    /// Smallest rejection probability over valid inputs.
    pub fn min_rejection(&self) -> f64 {
        self.form.mus().last().copied().unwrap_or(1.0)
    }

    /// Worst-case error of a YES instance: `min μ`.
    pub fn eta_yes(&self) -> f64 {
        self.min_rejection()
    }

    /// Worst-case error of a NO instance: `1 − min μ`.
    pub fn eta_no(&self) -> f64 {
        1.0 - self.min_rejection()
    }
}

pub fn circuit_block_form(c: &CircuitSpec, k: &ClockSpec) -> Result<CircuitBlockForm> {
    let reg = c.register_dim();
    let mut penalty = CMatrix::zeros(reg);
    if k.input_penalties().is_empty() {
        if !c.ancillas().is_empty() && k.t_init() > 0 {
            penalty = c.ancilla_projector();
        }
    } else {
        for (_, p) in k.input_penalties() {
            penalty = penalty.add(p);
        }
    }
    let rejection = c.rejection_operator()?;
    let realified = rejection.max_imag() > 0.0 || penalty.max_imag() > 0.0;
    let (mr, pr) = if realified {
        (rejection.realify(), penalty.realify())
    } else {
        (rejection.real_part(), penalty.real_part())
    };
    let m = DenseSymmetric::from_matrix(&mr, 1e-10)?;
    let p = DenseSymmetric::from_matrix(&pr, 1e-10)?;

    let sp = eig_dense(&p, true)?;
    let vecs = sp.eigenvectors.expect("requested");
    let mut support = Vec::new();
    let mut kernel = Vec::new();
    for (l, v) in sp.eigenvalues.iter().zip(vecs) {
        if *l > SNAP_TOL {
            support.push(v);
        } else {
            kernel.push(v);
        }
    }
    let s = support.len();
    support.extend(kernel);
    let basis = Matrix::from_columns(m.dim(), &support);
    let rotated = m.congruence(&basis)?;
    let form = stoquastize(&rotated, s)?;
    Ok(CircuitBlockForm {
        form,
        basis,
        realified,
    })
}
