//! Cyclic Jacobi for dense symmetric matrices, plus the small helpers that
//! sit on top of it.

use super::{dot, DenseSymmetric, Spectrum, SymTridiagonal};
use crate::error::{Error, Result};

pub const DEFAULT_DENSE_CAP: usize = 4096;

const MAX_SWEEPS: usize = 100;

pub fn eig_dense(m: &DenseSymmetric, want_vectors: bool) -> Result<Spectrum> {
    eig_dense_capped(m, want_vectors, DEFAULT_DENSE_CAP)
}

pub fn eig_dense_capped(m: &DenseSymmetric, want_vectors: bool, cap: usize) -> Result<Spectrum> {
    let n = m.dim();
    if n > cap {
        return Err(Error::TooLarge { dim: n, cap });
    }
    let mut a = m.data().to_vec();
    // Jacobi rotations preserve exact symmetry only if we start from it.
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = avg;
            a[j * n + i] = avg;
        }
    }
    let mut v = if want_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };

    let frob = m.frobenius();
    let target = f64::EPSILON * frob;
    let mut off = off_norm(&a, n);
    let mut sweeps = 0;
    while off > target && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if apq.abs() < 1e-3 * f64::EPSILON * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, n, p, q, c, s);
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        off = off_norm(&a, n);
    }
    if off > 1e-9 * frob.max(1.0) {
        return Err(Error::InvalidMatrix(format!(
            "Jacobi did not converge: off-diagonal norm {off:e} after {sweeps} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();

    match v {
        None => Ok(Spectrum {
            eigenvalues,
            eigenvectors: None,
            residual: off,
        }),
        Some(v) => {
            let vectors: Vec<Vec<f64>> = order
                .iter()
                .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
                .collect();
            let mut residual: f64 = 0.0;
            for (lambda, vec) in eigenvalues.iter().zip(&vectors) {
                let mv = m.matvec(vec);
                for (x, y) in mv.iter().zip(vec) {
                    residual = residual.max((x - lambda * y).abs());
                }
            }
            Ok(Spectrum {
                eigenvalues,
                eigenvectors: Some(vectors),
                residual,
            })
        }
    }
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

/// `A ← JᵀAJ` for the plane rotation on (p, q).
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    let (rp, rq) = if p < q {
        let (lo, hi) = a.split_at_mut(q * n);
        (&mut lo[p * n..(p + 1) * n], &mut hi[..n])
    } else {
        unreachable!("p < q by construction")
    };
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let apk = *x;
        let aqk = *y;
        *x = c * apk - s * aqk;
        *y = s * apk + c * aqk;
    }
}

/// Orthogonal reduction to tridiagonal form with Householder reflectors.
/// The result is similar to `m`, so the two spectra coincide.
pub fn householder_tridiagonalize(m: &DenseSymmetric) -> SymTridiagonal {
    let n = m.dim();
    let mut a = m.data().to_vec();
    for i in 0..n.saturating_sub(2) {
        let len = n - i - 1;
        let x: Vec<f64> = (0..len).map(|k| a[(i + 1 + k) * n + i]).collect();
        let xnorm = dot(&x, &x).sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = dot(&v, &v).sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|e| *e /= vnorm);

        let off = i + 1;
        let p: Vec<f64> = (0..len)
            .map(|r| (0..len).map(|c| a[(off + r) * n + off + c] * v[c]).sum())
            .collect();
        let k = dot(&v, &p);
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - k * vi).collect();
        for r in 0..len {
            for c in 0..len {
                a[(off + r) * n + off + c] -= 2.0 * (v[r] * w[c] + w[r] * v[c]);
            }
        }
        for r in 0..len {
            let val = if r == 0 { alpha } else { 0.0 };
            a[(off + r) * n + i] = val;
            a[i * n + off + r] = val;
        }
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    let offdiag = (0..n.saturating_sub(1))
        .map(|i| a[(i + 1) * n + i])
        .collect();
    SymTridiagonal::new(diag, offdiag).expect("finite input stays finite")
}

/// Largest absolute eigenvalue.
pub fn spectral_norm(m: &DenseSymmetric) -> Result<f64> {
    let s = eig_dense(m, false)?;
    Ok(s.eigenvalues
        .first()
        .unwrap()
        .abs()
        .max(s.eigenvalues.last().unwrap().abs()))
}

pub fn is_psd(m: &DenseSymmetric, tol: f64) -> Result<bool> {
    Ok(eig_dense(m, false)?.min() >= -tol)
}

pub fn rayleigh(m: &DenseSymmetric, v: &[f64]) -> Result<f64> {
    if v.len() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for matrix of dimension {}",
            v.len(),
            m.dim()
        )));
    }
    let nn = dot(v, v);
    if nn == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok(dot(v, &m.matvec(v)) / nn)
}
