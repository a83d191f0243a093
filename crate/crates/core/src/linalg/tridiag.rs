//! Sturm-sequence bisection and inverse iteration for symmetric tridiagonals.

use super::{dot, norm, Spectrum, SymTridiagonal};
use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Below this size the eigenvalue loop stays on the calling thread.
const PAR_THRESHOLD: usize = 128;

/// Number of eigenvalues strictly less than `x`, from the signs of the
/// LDLᵀ pivots of `m − xI`.
pub fn sturm_count(m: &SymTridiagonal, x: f64) -> usize {
    let pivmin = pivot_floor(m);
    let (a, b) = (m.diag(), m.offdiag());
    let mut count = 0;
    let mut d = a[0] - x;
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..a.len() {
        d = a[i] - x - b[i - 1] * b[i - 1] / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn pivot_floor(m: &SymTridiagonal) -> f64 {
    let bmax = m.offdiag().iter().map(|b| b * b).fold(1.0, f64::max);
    f64::MIN_POSITIVE * bmax
}

fn gershgorin(m: &SymTridiagonal) -> (f64, f64) {
    let (a, b) = (m.diag(), m.offdiag());
    let n = a.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += b[i - 1].abs();
        }
        if i + 1 < n {
            r += b[i].abs();
        }
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0) * 4.0;
    (lo - pad, hi + pad)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection alone.
///
/// The bracket is refined until its width drops below the larger of
/// `2ε|λ|` and `ε‖m‖∞`, which is under 1e−13 for any matrix of moderate
/// norm.
pub fn eigenvalue_k(m: &SymTridiagonal, k: usize) -> Result<f64> {
    if k >= m.dim() {
        return Err(Error::InvalidSize(format!(
            "index {k} out of range for dimension {}",
            m.dim()
        )));
    }
    let (lo, hi) = gershgorin(m);
    Ok(bisect(m, k, lo, hi, f64::EPSILON * m.norm_inf()))
}

fn bisect(m: &SymTridiagonal, k: usize, mut lo: f64, mut hi: f64, floor: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        let tol = (2.0 * f64::EPSILON * lo.abs().max(hi.abs())).max(floor);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        if sturm_count(m, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

fn eigenvalues_with(m: &SymTridiagonal, exec: Exec) -> Vec<f64> {
    if m.dim() == 1 {
        return m.diag().to_vec();
    }
    let (lo, hi) = gershgorin(m);
    let floor = f64::EPSILON * m.norm_inf();
    let ks: Vec<usize> = (0..m.dim()).collect();
    let exec = if m.dim() < PAR_THRESHOLD {
        Exec::Sequential
    } else {
        exec
    };
    par::map(exec, &ks, |&k| bisect(m, k, lo, hi, floor))
}

/// Full spectrum. Vectors, if requested, come from inverse iteration on
/// each unreduced block with reorthogonalization inside eigenvalue clusters.
pub fn eig_tridiagonal(m: &SymTridiagonal, want_vectors: bool) -> Result<Spectrum> {
    if m.diag().iter().chain(m.offdiag()).any(|x| !x.is_finite()) {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    if !want_vectors {
        let eigenvalues = eigenvalues_with(m, Exec::default());
        let residual = 2.0 * f64::EPSILON * m.norm_inf().max(1.0);
        return Ok(Spectrum {
            eigenvalues,
            eigenvectors: None,
            residual,
        });
    }

    let n = m.dim();
    let mut pairs: Vec<(f64, usize, Vec<f64>)> = Vec::with_capacity(n);
    for (start, end) in unreduced_blocks(m) {
        let block = SymTridiagonal::new(
            m.diag()[start..end].to_vec(),
            m.offdiag()[start..end - 1].to_vec(),
        )?;
        let values = eigenvalues_with(&block, Exec::default());
        let vectors = inverse_iteration(&block, &values);
        for (val, v) in values.into_iter().zip(vectors) {
            let mut full = vec![0.0; n];
            full[start..end].copy_from_slice(&v);
            pairs.push((val, start, full));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut residual: f64 = 0.0;
    for (val, _, v) in &pairs {
        let mv = m.matvec(v);
        for (x, y) in mv.iter().zip(v) {
            residual = residual.max((x - val * y).abs());
        }
    }
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = pairs.into_iter().map(|p| p.2).collect();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
        residual,
    })
}

/// Half-open index ranges between negligible off-diagonal entries.
fn unreduced_blocks(m: &SymTridiagonal) -> Vec<(usize, usize)> {
    let (a, b) = (m.diag(), m.offdiag());
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..b.len() {
        if b[i].abs() <= f64::EPSILON * (a[i].abs() + a[i + 1].abs()) {
            blocks.push((start, i + 1));
            start = i + 1;
        }
    }
    blocks.push((start, a.len()));
    blocks
}

/// Tridiagonal LU with partial pivoting of `m − λI`.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(m: &SymTridiagonal, lambda: f64, tiny: f64) -> Self {
        let n = m.dim();
        let mut d: Vec<f64> = m.diag().iter().map(|a| a - lambda).collect();
        let mut dl = m.offdiag().to_vec();
        let mut du = m.offdiag().to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for x in d.iter_mut() {
            if x.abs() < tiny {
                *x = if *x < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn inverse_iteration(m: &SymTridiagonal, values: &[f64]) -> Vec<Vec<f64>> {
    let n = m.dim();
    if n == 1 {
        return vec![vec![1.0]];
    }
    let scale = m.norm_inf().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let cluster_gap = 1e-3 * scale;
    let separation = 10.0 * f64::EPSILON * scale;

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    let mut shifted_prev = f64::NEG_INFINITY;
    for (j, &lambda) in values.iter().enumerate() {
        if j > 0 && lambda - values[j - 1] > cluster_gap {
            cluster_start = j;
        }
        // Nudge coincident shifts apart so each solve converges to its own vector.
        let mut shift = lambda;
        if j > cluster_start && shift - shifted_prev < separation {
            shift = shifted_prev + separation;
        }
        shifted_prev = shift;

        let lu = ShiftedLu::new(m, shift, tiny);
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (((i * 7919 + j * 104_729) % 1000) as f64 / 1000.0 - 0.5))
            .collect();
        for iter in 0..6 {
            lu.solve(&mut v);
            for prev in &vectors[cluster_start..j] {
                let c = dot(&v, prev);
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= c * p;
                }
            }
            let nv = norm(&v);
            if nv == 0.0 || !nv.is_finite() {
                v = (0..n).map(|i| ((i + j + 1) as f64).sin()).collect();
                continue;
            }
            v.iter_mut().for_each(|x| *x /= nv);
            if iter >= 1 {
                let mv = m.matvec(&v);
                let r = mv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - lambda * b).abs())
                    .fold(0.0, f64::max);
                if r <= 1e-13 * scale {
                    break;
                }
            }
        }
        vectors.push(v);
    }
    vectors
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize) -> SymTridiagonal {
        let mut d = vec![1.0; n];
        d[0] = 0.5;
        d[n - 1] = 0.5;
        SymTridiagonal::new(d, vec![-0.5; n - 1]).unwrap()
    }

    #[test]
    fn two_by_two_laplacian() {
        let s = eig_tridiagonal(&laplacian(2), true).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn full_penalty_two_by_two() {
        let m = SymTridiagonal::new(vec![0.5, 1.5], vec![-0.5]).unwrap();
        let s = eig_tridiagonal(&m, false).unwrap();
        let r = 2f64.sqrt() / 2.0;
        assert!((s.eigenvalues[0] - (1.0 - r)).abs() < 1e-15);
        assert!((s.eigenvalues[1] - (1.0 + r)).abs() < 1e-15);
    }

    #[test]
    fn free_walk_spectrum() {
        let n = 200;
        let s = eig_tridiagonal(&laplacian(n), true).unwrap();
        for (m, val) in s.eigenvalues.iter().enumerate() {
            let exact = 1.0 - (m as f64 * PI / n as f64).cos();
            assert!((val - exact).abs() < 1e-13, "m={m}");
        }
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn degenerate_direct_sum_gives_orthonormal_vectors() {
        let a = laplacian(5);
        let m = a.direct_sum(&a).direct_sum(&a);
        let s = eig_tridiagonal(&m, true).unwrap();
        let vs = s.eigenvectors.unwrap();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&vs[i], &vs[j]) - expect).abs() < 1e-12);
            }
        }
        assert!(s.residual < 1e-13);
    }

    #[test]
    fn wilkinson_close_pairs() {
        // W21+: the top eigenvalues come in pairs agreeing to ~1e−14.
        let d: Vec<f64> = (0..21).map(|i| (10i32 - i).abs() as f64).collect();
        let m = SymTridiagonal::new(d, vec![1.0; 20]).unwrap();
        let s = eig_tridiagonal(&m, true).unwrap();
        assert!(s.residual < 1e-10 * m.norm_inf());
        let vs = s.eigenvectors.unwrap();
        assert!(dot(&vs[19], &vs[20]).abs() < 1e-8);
    }

    #[test]
    fn count_matches_spectrum() {
        let m = laplacian(30);
        assert_eq!(sturm_count(&m, -1.0), 0);
        assert_eq!(sturm_count(&m, 3.0), 30);
        let k = eigenvalue_k(&m, 4).unwrap();
        assert_eq!(sturm_count(&m, k - 1e-9), 4);
        assert_eq!(sturm_count(&m, k + 1e-9), 5);
    }

    #[test]
    fn one_by_one() {
        let m = SymTridiagonal::new(vec![3.0], vec![]).unwrap();
        let s = eig_tridiagonal(&m, true).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0]);
        assert_eq!(s.eigenvectors.unwrap(), vec![vec![1.0]]);
    }
}
