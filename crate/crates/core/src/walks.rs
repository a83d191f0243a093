//! Quantum walks on a line with diagonal penalties.
//!
//! Positions are 1-based throughout this module, matching the usual
//! `|1⟩ … |T⟩` labelling of the path; conversion to 0-based storage
//! happens only inside [`PenalizedWalk::to_matrix`].
//!
//! The characteristic function is evaluated on the angle θ with
//! `λ = 1 − cos θ`, in which it becomes `g_T = tan(θ/2)·tan(Tθ)`. With
//! `p₀ = det(Δ − λ)` and `p₁ = det(Δ + |T⟩⟨T| − λ)` one has `g_T = −p₀/p₁`,
//! and the eigenvalues of `Δ + μ|T⟩⟨T|` are the solutions of
//! `g_T(λ) = μ/(1−μ)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{eig_tridiagonal, eigenvalue_k, DenseSymmetric, SymTridiagonal};
use crate::par::{self, Exec};

/// Minimum λ-distance to a pole of `g_T` accepted by [`g_eval`].
pub const POLE_GUARD: f64 = 1e-13;

/// Path-graph Laplacian on `n` vertices with unit weights halved:
/// diagonal `[1/2, 1, …, 1, 1/2]`, off-diagonal `−1/2`.
///
/// The single-vertex graph has no edges, so `n = 1` gives `[0]`.
pub fn laplacian(n: usize) -> Result<SymTridiagonal> {
    if n == 0 {
        return Err(Error::InvalidSize(
            "a walk needs at least one vertex".into(),
        ));
    }
    if n == 1 {
        return SymTridiagonal::new(vec![0.0], vec![]);
    }
    let mut diag = vec![1.0; n];
    diag[0] = 0.5;
    diag[n - 1] = 0.5;
    SymTridiagonal::new(diag, vec![-0.5; n - 1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedWalk {
    len: usize,
    penalties: Vec<(usize, f64)>,
}

impl PenalizedWalk {
    pub fn new(len: usize, penalties: Vec<(usize, f64)>) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidSize("walk length must be positive".into()));
        }
        let mut seen = vec![false; len + 1];
        for &(k, w) in &penalties {
            if k == 0 || k > len {
                return Err(Error::InvalidSize(format!(
                    "penalty position {k} outside 1..={len}"
                )));
            }
            if seen[k] {
                return Err(Error::InvalidSize(format!(
                    "duplicate penalty position {k}"
                )));
            }
            seen[k] = true;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::DomainError(format!(
                    "penalty weight {w} must be finite and non-negative"
                )));
            }
        }
        Ok(Self { len, penalties })
    }

    pub fn free(len: usize) -> Result<Self> {
        Self::new(len, vec![])
    }

    /// `Δ^(T) + μ|T⟩⟨T|`.
    pub fn endpoint(len: usize, mu: f64) -> Result<Self> {
        Self::new(len, vec![(len, mu)])
    }

    pub fn single(len: usize, k: usize, weight: f64) -> Result<Self> {
        Self::new(len, vec![(k, weight)])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn penalties(&self) -> &[(usize, f64)] {
        &self.penalties
    }

    pub fn to_matrix(&self) -> SymTridiagonal {
        let mut m = laplacian(self.len).expect("length validated");
        for &(k, w) in &self.penalties {
            m.add_diag(k - 1, w);
        }
        m
    }

    /// The mirror image `k → T + 1 − k`.
    pub fn reflect(&self) -> Self {
        Self {
            len: self.len,
            penalties: self
                .penalties
                .iter()
                .map(|&(k, w)| (self.len + 1 - k, w))
                .collect(),
        }
    }
}

/// Spectrum of `Δ^(T) + |T⟩⟨T|`: `1 − cos((2k−1)π/2T)`, ascending.
pub fn analytic_spectrum_full_penalty(t: usize) -> Result<Vec<f64>> {
    check_len(t)?;
    let tf = t as f64;
    Ok((1..=t)
        .map(|k| one_minus_cos((2 * k - 1) as f64 * PI / (2.0 * tf)))
        .collect())
}

/// Spectrum of `Δ^(T) + ½|T⟩⟨T|`: `1 − cos((2k−1)π/(2T+1))`, ascending.
pub fn analytic_spectrum_half_penalty(t: usize) -> Result<Vec<f64>> {
    check_len(t)?;
    let tf = t as f64;
    Ok((1..=t)
        .map(|k| one_minus_cos((2 * k - 1) as f64 * PI / (2.0 * tf + 1.0)))
        .collect())
}

/// Spectrum of the unpenalized walk: `1 − cos(mπ/T)`, `m = 0 … T−1`.
pub fn free_spectrum(t: usize) -> Result<Vec<f64>> {
    check_len(t)?;
    let tf = t as f64;
    Ok((0..t).map(|m| one_minus_cos(m as f64 * PI / tf)).collect())
}

fn check_len(t: usize) -> Result<()> {
    if t == 0 {
        Err(Error::InvalidSize("walk length must be positive".into()))
    } else {
        Ok(())
    }
}

/// `1 − cos θ` without cancellation for small θ.
pub fn one_minus_cos(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    2.0 * s * s
}

/// Inverse of [`one_minus_cos`] on `[0, 2]`.
fn angle_of(lambda: f64) -> f64 {
    if lambda <= 1.0 {
        2.0 * (0.5 * lambda).sqrt().asin()
    } else {
        PI - 2.0 * (0.5 * (2.0 - lambda)).sqrt().asin()
    }
}

/// `det(M − λI)` carried as sign and log-magnitude so that long walks do
/// not overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Continuant {
    /// −1, 0 or +1.
    pub sign: f64,
    /// `ln|det|`; `-inf` when the determinant vanishes.
    pub log_abs: f64,
    /// Last term of the rescaled recurrence; same sign as the determinant.
    pub scaled: f64,
}

impl Continuant {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }

    /// `self / other`, computed in log space.
    pub fn ratio(&self, other: &Continuant) -> f64 {
        if other.sign == 0.0 {
            return f64::INFINITY * self.sign;
        }
        self.sign * other.sign * (self.log_abs - other.log_abs).exp()
    }
}

/// Three-term recurrence `f_n = (a_n − λ) f_{n−1} − b_{n−1}² f_{n−2}` with
/// the running pair rescaled every step.
pub fn continuant(m: &SymTridiagonal, lambda: f64) -> Continuant {
    let (a, b) = (m.diag(), m.offdiag());
    let mut prev = 1.0;
    let mut cur = a[0] - lambda;
    let mut log_scale = 0.0;
    for i in 1..a.len() {
        let next = (a[i] - lambda) * cur - b[i - 1] * b[i - 1] * prev;
        prev = cur;
        cur = next;
        let s = prev.abs().max(cur.abs());
        if s > 0.0 && s.is_finite() {
            prev /= s;
            cur /= s;
            log_scale += s.ln();
        }
    }
    Continuant {
        sign: if cur == 0.0 { 0.0 } else { cur.signum() },
        log_abs: cur.abs().ln() + log_scale,
        scaled: cur,
    }
}

pub fn char_poly_continuant(w: &PenalizedWalk, lambda: f64) -> Continuant {
    continuant(&w.to_matrix(), lambda)
}

/// Poles of `g_T`: `1 − cos((2k−1)π/2T)`, `k = 1 … T`.
pub fn g_poles(t: usize) -> Result<Vec<f64>> {
    analytic_spectrum_full_penalty(t)
}

/// `g_T(λ) = tan(θ/2)·tan(Tθ)` with `λ = 1 − cos θ`.
pub fn g_eval(t: usize, lambda: f64) -> Result<f64> {
    check_len(t)?;
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::DomainError(format!(
            "lambda = {lambda} not in (0, 2)"
        )));
    }
    let theta = angle_of(lambda);
    let tf = t as f64;
    let k = (tf * theta / PI + 0.5).round().clamp(1.0, tf);
    let distance = [k - 1.0, k, k + 1.0]
        .iter()
        .filter(|&&j| j >= 1.0 && j <= tf)
        .map(|&j| (lambda - one_minus_cos((2.0 * j - 1.0) * PI / (2.0 * tf))).abs())
        .fold(f64::INFINITY, f64::min);
    if distance < POLE_GUARD {
        return Err(Error::NearPole { lambda, distance });
    }
    Ok((0.5 * theta).tan() * (tf * theta).tan())
}

/// `dg_T/dλ`, from the chain rule through θ.
pub fn g_slope(t: usize, lambda: f64) -> Result<f64> {
    g_eval(t, lambda)?;
    let theta = angle_of(lambda);
    let tf = t as f64;
    let half = 0.5 * theta;
    let sec2 = |x: f64| 1.0 / (x.cos() * x.cos());
    let dg = 0.5 * sec2(half) * (tf * theta).tan() + tf * half.tan() * sec2(tf * theta);
    Ok(dg / theta.sin())
}

/// Eigenvalues of `Δ^(T) + μ|T⟩⟨T|` for `μ ∈ [0, 1]`, ascending.
pub fn endpoint_spectrum(t: usize, mu: f64) -> Result<Vec<f64>> {
    endpoint_roots(t, mu, t)
}

/// Smallest eigenvalue of `Δ^(T) + μ|T⟩⟨T|` for `μ ∈ [0, 1]`.
pub fn endpoint_ground_energy(t: usize, mu: f64) -> Result<f64> {
    Ok(endpoint_roots(t, mu, 1)?[0])
}

fn endpoint_roots(t: usize, mu: f64, count: usize) -> Result<Vec<f64>> {
    check_len(t)?;
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::DomainError(format!("mu = {mu} not in [0, 1]")));
    }
    if mu == 0.0 {
        return Ok(free_spectrum(t)?.into_iter().take(count).collect());
    }
    if mu == 1.0 {
        return Ok(analytic_spectrum_full_penalty(t)?
            .into_iter()
            .take(count)
            .collect());
    }
    let r = mu / (1.0 - mu);
    let tf = t as f64;
    // g_T = r  ⇔  F(θ) = tan(θ/2)·sin(Tθ) − r·cos(Tθ) = 0, which is
    // continuous across the poles of g_T.
    let f = |theta: f64| (0.5 * theta).tan() * (tf * theta).sin() - r * (tf * theta).cos();
    let pole = |k: usize| (2 * k - 1) as f64 * PI / (2.0 * tf);
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        let lo = if k == 1 { 0.0 } else { pole(k - 1) };
        let hi = pole(k);
        let (flo, fhi) = (f(lo), f(hi));
        let theta = if flo * fhi < 0.0 {
            bisect_angle(&f, lo, hi, flo)
        } else {
            return sturm_fallback(t, mu, count);
        };
        out.push(one_minus_cos(theta));
    }
    Ok(out)
}

fn bisect_angle(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let lo_negative = flo < 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

fn sturm_fallback(t: usize, mu: f64, count: usize) -> Result<Vec<f64>> {
    let m = PenalizedWalk::endpoint(t, mu)?.to_matrix();
    (0..count).map(|k| eigenvalue_k(&m, k)).collect()
}

/// Lower-bound split of a walk with one unit penalty at an interior site.
#[derive(Debug, Clone, PartialEq)]
pub struct Uncoupling {
    pub len: usize,
    pub position: usize,
    /// `Δ^(k−1) + ¼|k−1⟩⟨k−1|`.
    pub left: SymTridiagonal,
    /// `Δ^(T−k+1) + ½|k⟩⟨k|`, with `k` its first site.
    pub right: SymTridiagonal,
    pub block_sum: SymTridiagonal,
    /// The 2×2 coupling on sites `(k−1, k)`.
    pub coupling: DenseSymmetric,
}

impl Uncoupling {
    /// The coupling placed on sites `(k−1, k)` of a `T × T` zero matrix.
    pub fn coupling_embedded(&self) -> DenseSymmetric {
        self.coupling
            .embed(self.len, self.position - 2)
            .expect("2 <= k <= T-1")
    }

    /// `block_sum + J`, which equals the original walk matrix.
    pub fn reconstruct(&self) -> DenseSymmetric {
        self.block_sum
            .to_dense()
            .add(&self.coupling_embedded())
            .expect("same dimension")
    }
}

pub fn uncouple(w: &PenalizedWalk) -> Result<Uncoupling> {
    let t = w.len();
    let (k, weight) = match w.penalties() {
        [(k, weight)] => (*k, *weight),
        _ => {
            return Err(Error::NoDecomposition(
                "requires exactly one penalty".into(),
            ))
        }
    };
    if weight != 1.0 {
        return Err(Error::NoDecomposition(format!(
            "requires unit penalty weight, got {weight}"
        )));
    }
    if k < 2 || k + 1 > t {
        return Err(Error::NoDecomposition(format!(
            "penalty at {k} is an endpoint of a length-{t} walk; use the closed forms"
        )));
    }
    let mut left = laplacian(k - 1)?;
    left.add_diag(k - 2, 0.25);
    let mut right = laplacian(t - k + 1)?;
    right.add_diag(0, 0.5);
    let block_sum = left.direct_sum(&right);
    let coupling = DenseSymmetric::new(2, vec![0.25, -0.5, -0.5, 1.0])?;
    Ok(Uncoupling {
        len: t,
        position: k,
        left,
        right,
        block_sum,
        coupling,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartingPenaltyScan {
    pub len: usize,
    /// `values[k−1] = λ₀(Δ^(T) + |k⟩⟨k|)`.
    pub values: Vec<f64>,
    /// 1-based positions attaining the minimum.
    pub argmin: Vec<usize>,
    pub min: f64,
}

/// Ground energy of a single unit penalty at every position.
pub fn starting_penalty_scan(t: usize) -> Result<StartingPenaltyScan> {
    starting_penalty_scan_with(t, Exec::default())
}

pub fn starting_penalty_scan_with(t: usize, exec: Exec) -> Result<StartingPenaltyScan> {
    if t < 4 {
        return Err(Error::InvalidSize(format!("scan needs T >= 4, got {t}")));
    }
    let ks: Vec<usize> = (1..=t).collect();
    let values = par::map(exec, &ks, |&k| {
        eigenvalue_k(&PenalizedWalk::single(t, k, 1.0)?.to_matrix(), 0)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin = ks
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v - min <= 1e-12)
        .map(|(k, _)| *k)
        .collect();
    Ok(StartingPenaltyScan {
        len: t,
        values,
        argmin,
        min,
    })
}

/// Spectrum of an arbitrary penalized walk through the Sturm solver.
pub fn walk_spectrum(w: &PenalizedWalk) -> Result<Vec<f64>> {
    Ok(eig_tridiagonal(&w.to_matrix(), false)?.eigenvalues)
}
