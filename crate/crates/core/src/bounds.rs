//! Predicted energy windows and their numerical verification.
//!
//! Every check produces a [`BoundReport`]: a closed interval, the value that
//! was computed, and a verdict. Reports serialize row by row through
//! [`crate::report`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::circuitham::StandardFormHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{
    dot, eig_dense, eigenvalue_k, is_psd, spectral_norm, DenseSymmetric, SymTridiagonal,
};
use crate::par::{self, Exec};
use crate::stoquastic::{circuit_block_form, extract_mu, InstanceKind};
use crate::walks::{
    endpoint_ground_energy, laplacian, one_minus_cos, starting_penalty_scan_with, uncouple,
    PenalizedWalk,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: String,
    /// Clock length, when the bound has one.
    pub t: Option<usize>,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    /// How the interval was obtained.
    pub formula: String,
    pub predicted_lo: f64,
    pub predicted_hi: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl BoundReport {
    /// Builds a report whose verdict is `computed ∈ [lo − tol, hi + tol]`.
    pub fn new(
        bound: &str,
        t: Option<usize>,
        params: String,
        formula: &str,
        (lo, hi): (f64, f64),
        computed: f64,
        tolerance: f64,
    ) -> Self {
        let ok = computed >= lo - tolerance && computed <= hi + tolerance;
        Self {
            bound: bound.to_string(),
            t,
            params,
            formula: formula.to_string(),
            predicted_lo: lo,
            predicted_hi: hi,
            computed,
            tolerance,
            verdict: if ok {
                Verdict::Holds
            } else {
                Verdict::Violated
            },
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Narrows the verdict with an extra condition checked elsewhere.
    fn require(mut self, ok: bool) -> Self {
        if !ok {
            self.verdict = Verdict::Violated;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Instance {
    Yes,
    No,
}

/// `1 − cos(π/2T)`: ground energy of a walk penalized at one end.
pub fn no_energy(t: usize) -> f64 {
    one_minus_cos(PI / (2.0 * t as f64))
}

/// Ground energy of the valid block of a zero-error circuit.
pub fn predict_eqma(t: usize, instance: Instance) -> Result<f64> {
    if t < 2 {
        return Err(Error::InvalidSize(format!("T = {t} < 2")));
    }
    Ok(match instance {
        Instance::Yes => 0.0,
        Instance::No => no_energy(t),
    })
}

/// Valid-block ground energy of `h`.
fn legal_lambda0(h: &StandardFormHamiltonian) -> Result<f64> {
    Ok(eig_dense(&h.legal_block(), false)?.min())
}

/// Classifies `h` as a zero-error instance from its rejection blocks and
/// compares the valid-block ground energy to the prediction.
pub fn verify_eqma(h: &StandardFormHamiltonian) -> Result<BoundReport> {
    let t = h.clock().steps();
    let cb = circuit_block_form(h.circuit(), h.clock())?;
    let instance = if extract_mu(&cb.form, InstanceKind::EqmaNo).is_ok() {
        Instance::No
    } else if extract_mu(&cb.form, InstanceKind::EqmaYes).is_ok() {
        Instance::Yes
    } else {
        return Err(Error::InstanceContractViolation(format!(
            "neither zero-error kind: block parameters {:?}",
            cb.mus()
        )));
    };
    let e = predict_eqma(t, instance)?;
    let computed = legal_lambda0(h)?;
    let (name, formula) = match instance {
        Instance::Yes => ("eqma-yes", "0"),
        Instance::No => ("eqma-no", "1-cos(pi/2T)"),
    };
    Ok(BoundReport::new(
        name,
        Some(t),
        format!("t_init={}", h.clock().t_init()),
        formula,
        (e, e),
        computed,
        1e-9,
    ))
}

/// Checks the valid-block ground energy against the bounded-error window.
///
/// `eta` is the promised error. The instance is checked against the
/// circuit's rejection blocks first.
pub fn verify_qma_window(
    h: &StandardFormHamiltonian,
    eta: f64,
    instance: Instance,
) -> Result<BoundReport> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::DomainError(format!("eta = {eta} not in [0, 1)")));
    }
    let t = h.clock().steps();
    let kind = match instance {
        Instance::Yes => InstanceKind::Yes { eta },
        Instance::No => InstanceKind::No { eta },
    };
    let cb = circuit_block_form(h.circuit(), h.clock())?;
    extract_mu(&cb.form, kind)?;
    let computed = legal_lambda0(h)?;
    let e = no_energy(t);
    let (name, formula, window) = match instance {
        Instance::Yes => ("qma-yes", "[0, sqrt(eta)]", (0.0, eta.sqrt())),
        Instance::No => (
            "qma-no",
            "[1-cos(pi/2T) - sqrt(eta), 1-cos(pi/2T)]",
            (e - eta.sqrt(), e),
        ),
    };
    Ok(BoundReport::new(
        name,
        Some(t),
        format!("eta={eta};t_init={}", h.clock().t_init()),
        formula,
        window,
        computed,
        1e-10,
    ))
}

/// `max_j |λ_j(H1) − λ_j(H2)| ≤ ‖H1 − H2‖`.
pub fn kkr_check(h1: &DenseSymmetric, h2: &DenseSymmetric) -> Result<BoundReport> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            h1.dim(),
            h2.dim()
        )));
    }
    let a = eig_dense(h1, false)?.eigenvalues;
    let b = eig_dense(h2, false)?.eigenvalues;
    let gap = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let norm = spectral_norm(&h1.sub(h2)?)?;
    Ok(BoundReport::new(
        "kkr",
        None,
        format!("dim={}", h1.dim()),
        "[0, |H1-H2|]",
        (0.0, norm),
        gap,
        1e-10,
    ))
}

/// Unnormalized trial state on the two-block matrix `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialVector {
    /// Unit-norm ground state of `Δ^(T′) + ½|0⟩⟨0|`, `u_t ∝ sin(tπ/(2T′+1))`.
    pub u: Vec<f64>,
    /// `√μ / u_{T′}` scaling of the first block.
    pub u_scale: f64,
    /// `√(T(1−μ))` scaling of the uniform second block.
    pub w_scale: f64,
    pub len: usize,
}

impl TrialVector {
    pub fn new(t: usize, t_prime: usize, mu: f64) -> Self {
        let d = (2 * t_prime + 1) as f64;
        let c = 2.0 / d.sqrt();
        let u: Vec<f64> = (1..=t_prime)
            .map(|k| c * (k as f64 * PI / d).sin())
            .collect();
        let last = u[t_prime - 1];
        Self {
            u_scale: mu.sqrt() / last,
            w_scale: (t as f64 * (1.0 - mu)).sqrt(),
            u,
            len: t,
        }
    }

    pub fn u_last(&self) -> f64 {
        *self.u.last().expect("T' >= 2")
    }

    /// Components in the `(u-block, w-block)` order of `B`.
    pub fn components(&self) -> Vec<f64> {
        let w = 1.0 / (self.len as f64).sqrt();
        self.u
            .iter()
            .map(|x| x * self.u_scale)
            .chain((0..self.len).map(|_| w * self.w_scale))
            .collect()
    }
}

/// Upper bound on the ground energy of a bounded-error YES instance with
/// rejection `μ`, from an explicit trial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRejection {
    pub t: usize,
    pub t_init: usize,
    pub mu: f64,
    pub trial: TrialVector,
    /// `⟨ν|B|ν⟩/⟨ν|ν⟩`.
    pub quotient: f64,
    /// `μ(1 − cos(π/(2T′+1)))`.
    pub bound: f64,
    /// `T·u_{T′}²`.
    pub t_u_sq: f64,
    /// `λ₀(B)`.
    pub lambda0_b: f64,
}

impl ConstantRejection {
    pub fn report(&self) -> BoundReport {
        BoundReport::new(
            "constant-rejection",
            Some(self.t),
            format!("mu={};t_init={}", self.mu, self.t_init),
            "[lambda0(B), mu(1-cos(pi/(2T'+1)))]",
            (self.lambda0_b, self.bound * (1.0 + 1e-9)),
            self.quotient,
            1e-12,
        )
        .require(self.t_u_sq >= 1.0)
    }
}

/// `B = (Δ^(T′) + ½|0⟩⟨0|) ⊕ Δ^(T)` with `P(μ)` on the two sites joining
/// the blocks.
pub fn two_block_matrix(t: usize, t_prime: usize, mu: f64) -> Result<SymTridiagonal> {
    let mut first = laplacian(t_prime)?;
    first.add_diag(0, 0.5);
    let mut m = first.direct_sum(&laplacian(t)?);
    m.add_diag(t_prime - 1, 1.0 - mu);
    m.add_diag(t_prime, mu);
    let mut off = m.offdiag().to_vec();
    off[t_prime - 1] = -(mu * (1.0 - mu)).sqrt();
    SymTridiagonal::new(m.diag().to_vec(), off)
}

pub fn constant_rejection_bound(t: usize, t_init: usize, mu: f64) -> Result<ConstantRejection> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::DomainError(format!("mu = {mu} not in [0, 1]")));
    }
    let root = (t as f64).sqrt().ceil() as usize;
    if t_init > root {
        return Err(Error::Precondition(format!(
            "T_init = {t_init} exceeds ceil(sqrt(T)) = {root}"
        )));
    }
    if t < t_init + 2 {
        return Err(Error::Precondition(format!(
            "T - T_init = {} < 2",
            t.saturating_sub(t_init)
        )));
    }
    let tp = t - t_init;
    let trial = TrialVector::new(t, tp, mu);
    let b = two_block_matrix(t, tp, mu)?;
    let nu = trial.components();
    let quotient = dot(&nu, &b.matvec(&nu)) / dot(&nu, &nu);
    let gamma0 = one_minus_cos(PI / (2 * tp + 1) as f64);
    let u_last = trial.u_last();
    Ok(ConstantRejection {
        t,
        t_init,
        mu,
        quotient,
        bound: mu * gamma0,
        t_u_sq: t as f64 * u_last * u_last,
        lambda0_b: eigenvalue_k(&b, 0)?,
        trial,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub k: f64,
    pub t: usize,
    pub lambda0: f64,
    /// `λ₀T²/k`; `None` when `k = 0`.
    pub scaled: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingBand {
    pub k: f64,
    pub min: f64,
    pub max: f64,
    pub ratio: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingStudy {
    pub factor: f64,
    pub rows: Vec<ScalingRow>,
    pub bands: Vec<ScalingBand>,
}

impl ScalingStudy {
    pub fn holds(&self) -> bool {
        self.bands.iter().all(|b| b.within)
    }

    pub fn reports(&self) -> Vec<BoundReport> {
        self.bands
            .iter()
            .map(|b| {
                BoundReport::new(
                    "scaling-band",
                    None,
                    format!("k={};factor={}", b.k, self.factor),
                    "max/min of lambda0*T^2/k",
                    (1.0, self.factor),
                    b.ratio,
                    0.0,
                )
            })
            .collect()
    }
}

pub const DEFAULT_BAND_FACTOR: f64 = 10.0;

/// `λ₀(Δ^(T) + (k/T)|T⟩⟨T|)·T²/k` over a grid, with the spread per `k`.
pub fn scaling_study(
    k_values: &[f64],
    t_grid: &[usize],
    factor: f64,
    exec: Exec,
) -> Result<ScalingStudy> {
    if k_values.is_empty() || t_grid.is_empty() {
        return Err(Error::InvalidSize("empty grid".into()));
    }
    let points: Vec<(f64, usize)> = k_values
        .iter()
        .flat_map(|&k| t_grid.iter().map(move |&t| (k, t)))
        .collect();
    let rows = par::map(exec, &points, |&(k, t)| {
        let mu = k / t as f64;
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::DomainError(format!("k/T = {mu} not in [0, 1]")));
        }
        let lambda0 = endpoint_ground_energy(t, mu)?;
        let tf = t as f64;
        Ok(ScalingRow {
            k,
            t,
            lambda0,
            scaled: (k != 0.0).then(|| lambda0 * tf * tf / k),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let bands = k_values
        .iter()
        .map(|&k| {
            let mine: Vec<&ScalingRow> = rows.iter().filter(|r| r.k == k).collect();
            if k == 0.0 {
                let max = mine.iter().map(|r| r.lambda0.abs()).fold(0.0, f64::max);
                return ScalingBand {
                    k,
                    min: 0.0,
                    max,
                    ratio: 1.0,
                    within: max == 0.0,
                };
            }
            let vals: Vec<f64> = mine.iter().filter_map(|r| r.scaled).collect();
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(0.0, f64::max);
            let ratio = max / min;
            ScalingBand {
                k,
                min,
                max,
                ratio,
                within: min > 0.0 && ratio < factor,
            }
        })
        .collect();
    Ok(ScalingStudy {
        factor,
        rows,
        bands,
    })
}

/// Penalty-set comparison in a zero-error NO instance.
///
/// With `K_in(Z) = Δ^(T) + Σ_{k∈Z} |k⟩⟨k|`, `j = min Z` and
/// `K_out = Δ^(T) + |T−1⟩⟨T−1|` (0-based), the first step
/// `K_in(Z) ≥ Δ^(T) + |j⟩⟨j|` is a PSD ordering. The second step holds for
/// ground energies only, so `second_psd` is reported but not required.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub t: usize,
    pub penalties: Vec<usize>,
    pub j: usize,
    pub first_psd: bool,
    pub second_psd: bool,
    pub lambda0_in: f64,
    pub lambda0_j: f64,
    pub lambda0_out: f64,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.first_psd
            && self.lambda0_in >= self.lambda0_j - 1e-12
            && self.lambda0_j >= self.lambda0_out - 1e-12
    }
}

pub fn eqma_no_chain(t: usize, z: &[usize]) -> Result<ChainReport> {
    let mut z = z.to_vec();
    z.sort_unstable();
    z.dedup();
    let j = *z
        .iter()
        .min()
        .ok_or_else(|| Error::Precondition("empty penalty set".into()))?;
    if z.iter().any(|&k| k >= t) {
        return Err(Error::InvalidSize(format!("penalty outside 0..{t}")));
    }
    let walk = |ks: &[usize]| -> Result<DenseSymmetric> {
        PenalizedWalk::new(t, ks.iter().map(|&k| (k + 1, 1.0)).collect())
            .map(|w| w.to_matrix().to_dense())
    };
    let k_in = walk(&z)?;
    let k_j = walk(&[j])?;
    let k_out = walk(&[t - 1])?;
    let l0 = |m: &DenseSymmetric| eig_dense(m, false).map(|s| s.min());
    Ok(ChainReport {
        t,
        penalties: z,
        j,
        first_psd: is_psd(&k_in.sub(&k_j)?, 1e-12)?,
        second_psd: is_psd(&k_j.sub(&k_out)?, 1e-12)?,
        lambda0_in: l0(&k_in)?,
        lambda0_j: l0(&k_j)?,
        lambda0_out: l0(&k_out)?,
    })
}

/// For every interior unit penalty on walks up to `tmax`: the coupling is
/// PSD and the block sum bounds the ground energy from below.
pub fn uncoupling_reports(tmax: usize, exec: Exec) -> Result<Vec<BoundReport>> {
    let cases: Vec<(usize, usize)> = (3..=tmax)
        .flat_map(|t| (2..t).map(move |k| (t, k)))
        .collect();
    par::map(exec, &cases, |&(t, k)| {
        let u = uncouple(&PenalizedWalk::single(t, k, 1.0)?)?;
        let j_min = eig_dense(&u.coupling, false)?.min();
        let full = eigenvalue_k(&PenalizedWalk::single(t, k, 1.0)?.to_matrix(), 0)?;
        let split = eigenvalue_k(&u.block_sum, 0)?;
        Ok(BoundReport::new(
            "uncoupling",
            Some(t),
            format!("k={k}"),
            "[lambda0(blocks), inf)",
            (split, f64::INFINITY),
            full,
            1e-12,
        )
        .require(j_min >= -1e-12))
    })
    .into_iter()
    .collect()
}

/// A single unit penalty has its lowest ground energy at either end, where
/// it equals `1 − cos(π/2T)`.
pub fn starting_penalty_reports(tmax: usize, exec: Exec) -> Result<Vec<BoundReport>> {
    (4..=tmax)
        .map(|t| {
            let scan = starting_penalty_scan_with(t, exec)?;
            let e = no_energy(t);
            Ok(BoundReport::new(
                "starting-penalty",
                Some(t),
                format!("argmin={:?}", scan.argmin).replace(',', " "),
                "1-cos(pi/2T) at k in {1,T}",
                (e, e),
                scan.min,
                1e-10,
            )
            .require(scan.argmin == [1, t]))
        })
        .collect()
}
