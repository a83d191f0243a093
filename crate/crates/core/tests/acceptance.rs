//! Acceptance criteria, one test each. Every test prints a `[PASS]` or
//! `[FAIL]` line and enforces its runtime budget.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use clockham::bounds::{
    constant_rejection_bound, kkr_check, no_energy, scaling_study, uncoupling_reports,
    verify_qma_window, Instance,
};
use clockham::circuitham::complex::gates;
use clockham::circuitham::{
    assemble, builtin, conjugation_w, history_state, walk_tensor_identity, CircuitSpec, ClockSpec,
    Component, Gate, Profile,
};
use clockham::linalg::{eig_dense, DenseSymmetric};
use clockham::par::Exec;
use clockham::stoquastic::{circuit_block_form, extract_mu, stoquastize, Block, InstanceKind};
use clockham::walks::{
    analytic_spectrum_full_penalty, analytic_spectrum_half_penalty, continuant, endpoint_spectrum,
    g_eval, laplacian, one_minus_cos, starting_penalty_scan, uncouple, walk_spectrum,
    PenalizedWalk,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn criterion(id: &str, name: &str, budget_secs: u64, f: impl FnOnce() -> Check) {
    let budget = Duration::from_secs(budget_secs);
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|()| {
        if elapsed <= budget {
            Ok(())
        } else {
            Err(format!("took {elapsed:.2?}, budget {budget:?}"))
        }
    });
    match &outcome {
        Ok(()) => println!("[PASS] {id} {name} ({elapsed:.2?})"),
        Err(e) => println!("[FAIL] {id} {name}: {e}"),
    }
    if let Err(e) = outcome {
        panic!("{id} {name}: {e}");
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: clockham::Error) -> String {
    e.to_string()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> Option<(usize, f64)> {
    if a.len() != b.len() {
        return Some((usize::MAX, f64::INFINITY));
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .enumerate()
        .find(|(_, d)| *d > tol)
}

#[test]
fn ac01_starting_penalty() {
    criterion("AC-1", "starting penalty", 10, || {
        for t in 4..=64 {
            let scan = starting_penalty_scan(t).map_err(err)?;
            let e = no_energy(t);
            ensure(scan.argmin == [1, t], || {
                format!("T={t}: argmin {:?}", scan.argmin)
            })?;
            ensure((scan.min - e).abs() < 1e-10, || {
                format!("T={t}: min {} vs {e}", scan.min)
            })?;
            let dense: Vec<f64> = (1..=t)
                .map(|k| {
                    let m = PenalizedWalk::single(t, k, 1.0)?.to_matrix().to_dense();
                    Ok(eig_dense(&m, false)?.min())
                })
                .collect::<clockham::Result<_>>()
                .map_err(err)?;
            if let Some((k, d)) = close(&dense, &scan.values, 1e-10) {
                return Err(format!("T={t}, k={}: dense and Sturm differ by {d}", k + 1));
            }
            let dmin = dense.iter().copied().fold(f64::INFINITY, f64::min);
            let dargmin: Vec<usize> = (1..=t).filter(|&k| dense[k - 1] - dmin <= 1e-12).collect();
            ensure(dargmin == [1, t], || {
                format!("T={t}: dense argmin {dargmin:?}")
            })?;
        }
        Ok(())
    });
}

#[test]
fn ac02_analytic_spectra() {
    criterion("AC-2", "analytic spectra", 5, || {
        for t in 1..=128 {
            for (mu, exact) in [
                (1.0, analytic_spectrum_full_penalty(t).map_err(err)?),
                (0.5, analytic_spectrum_half_penalty(t).map_err(err)?),
            ] {
                let w = PenalizedWalk::endpoint(t, mu).map_err(err)?;
                let sturm = walk_spectrum(&w).map_err(err)?;
                if let Some((i, d)) = close(&exact, &sturm, 1e-10) {
                    return Err(format!("T={t} mu={mu} index {i}: Sturm off by {d}"));
                }
                if t % 16 == 0 || t <= 8 {
                    let dense = eig_dense(&w.to_matrix().to_dense(), false)
                        .map_err(err)?
                        .eigenvalues;
                    if let Some((i, d)) = close(&exact, &dense, 1e-10) {
                        return Err(format!("T={t} mu={mu} index {i}: dense off by {d}"));
                    }
                }
            }
        }
        Ok(())
    });
}

#[test]
fn ac03_endpoint_equation() {
    criterion("AC-3", "endpoint characteristic equation", 30, || {
        for &mu in &[0.01, 0.1, 0.25, 0.5, 0.9] {
            for &t in &[8, 32, 128] {
                let roots = endpoint_spectrum(t, mu).map_err(err)?;
                let sturm =
                    walk_spectrum(&PenalizedWalk::endpoint(t, mu).map_err(err)?).map_err(err)?;
                if let Some((i, d)) = close(&roots, &sturm, 1e-9) {
                    return Err(format!("T={t} mu={mu} root {i} off by {d}"));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tested = 0;
        while tested < 1000 {
            let t = rng.gen_range(2..=128);
            let lambda: f64 = rng.gen_range(1e-6..2.0 - 1e-6);
            let Ok(g) = g_eval(t, lambda) else { continue };
            let p0 = laplacian(t).map_err(err)?;
            let p1 = PenalizedWalk::endpoint(t, 1.0).map_err(err)?.to_matrix();
            let r = -continuant(&p0, lambda).ratio(&continuant(&p1, lambda));
            ensure((g - r).abs() <= 1e-9 * r.abs().max(1.0), || {
                format!("T={t} lambda={lambda}: g={g} ratio={r}")
            })?;
            tested += 1;
        }
        Ok(())
    });
}

#[test]
fn ac04_uncoupling() {
    criterion("AC-4", "uncoupling", 20, || {
        for t in 3..=32 {
            for k in 2..t {
                let w = PenalizedWalk::single(t, k, 1.0).map_err(err)?;
                let u = uncouple(&w).map_err(err)?;
                let j_min = eig_dense(&u.coupling, false).map_err(err)?.min();
                ensure(j_min >= -1e-12, || format!("T={t} k={k}: J has {j_min}"))?;
                let dense = w.to_matrix().to_dense();
                ensure(u.reconstruct().max_abs_diff(&dense) < 1e-15, || {
                    format!("T={t} k={k}: split does not reproduce H")
                })?;
                let full = eig_dense(&dense, false).map_err(err)?.min();
                let split = eig_dense(&u.block_sum.to_dense(), false)
                    .map_err(err)?
                    .min();
                ensure(full >= split - 1e-12, || {
                    format!("T={t} k={k}: {full} < {split}")
                })?;
            }
        }
        let reports = uncoupling_reports(32, Exec::default()).map_err(err)?;
        ensure(reports.iter().all(|r| r.holds()), || {
            "Sturm-based uncoupling report violated".into()
        })
    });
}

#[test]
fn ac05_scaling() {
    criterion("AC-5", "Theta(k/T^2) scaling band", 60, || {
        let grid: Vec<usize> = (6..=12).map(|p| 1usize << p).collect();
        let study =
            scaling_study(&[0.25, 0.5, 1.0, 2.0], &grid, 10.0, Exec::default()).map_err(err)?;
        for b in &study.bands {
            ensure(b.within, || format!("k={}: band ratio {}", b.k, b.ratio))?;
        }
        Ok(())
    });
}

fn random_gate(rng: &mut ChaCha8Rng, step: usize) -> Gate {
    let q = rng.gen_range(0..2usize);
    let (targets, matrix) = match rng.gen_range(0..6) {
        0 => (vec![q], gates::h()),
        1 => (vec![q], gates::s()),
        2 => (vec![q], gates::x()),
        3 => (vec![q], gates::ry(rng.gen_range(0.0..2.0 * PI))),
        4 => (vec![q, 1 - q], gates::cnot()),
        _ => (vec![q], gates::s().matmul(&gates::h())),
    };
    Gate {
        step,
        targets,
        matrix,
    }
}

fn random_input(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

#[test]
fn ac06_history_kernel() {
    criterion("AC-6", "history-state kernel", 30, || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for case in 0..20 {
            let t = rng.gen_range(3..=8);
            let mut gates = Vec::new();
            for s in 1..t {
                if rng.gen_bool(0.8) {
                    gates.push(random_gate(&mut rng, s));
                }
            }
            let c = CircuitSpec::new(2, t, gates, vec![], None).map_err(err)?;
            let k = ClockSpec::linear(t, 0).map_err(err)?;
            let h = assemble(&c, &k).map_err(err)?;
            let spec = h.block_spectrum(k.valid_path()).map_err(err)?;
            ensure(spec[0].abs() < 1e-10, || {
                format!("case {case}: lambda0 = {}", spec[0])
            })?;

            let psi =
                history_state(&c, &random_input(&mut rng, 4), Profile::Uniform).map_err(err)?;
            let q = h.history_energy(&psi).map_err(err)?;
            ensure(q.abs() < 1e-10, || {
                format!("case {case}: history quotient {q}")
            })?;

            let w = conjugation_w(&c, &k).map_err(err)?;
            let conj = h
                .component_block(Component::Trans, k.valid_path())
                .congruence(&w)
                .map_err(err)?;
            let target = walk_tensor_identity(t, 4, h.is_realified()).map_err(err)?;
            let d = conj.max_abs_diff(&target);
            ensure(d < 1e-11, || {
                format!("case {case}: W^T H_trans W off by {d}")
            })?;
        }
        Ok(())
    });
}

#[test]
fn ac07_eqma_energies() {
    criterion("AC-7", "zero-error energies", 30, || {
        for t in [4, 8, 16] {
            let k = ClockSpec::linear(t, 1).map_err(err)?;
            let e = no_energy(t);
            let no = builtin::always_reject(1, t).map_err(err)?;
            let h = assemble(&no, &k).map_err(err)?;
            let l0 = eig_dense(&h.legal_block(), false).map_err(err)?.min();
            ensure((l0 - e).abs() < 1e-9, || format!("T={t}: NO {l0} vs {e}"))?;
            let nu = history_state(&no, &builtin::product_input(1, &[]), Profile::NoProfile)
                .map_err(err)?;
            let q = h.history_energy(&nu).map_err(err)?;
            ensure((q - e).abs() < 1e-9, || {
                format!("T={t}: NO trial {q} vs {e}")
            })?;

            let yes = builtin::identity(1, t).map_err(err)?;
            let h = assemble(&yes, &k).map_err(err)?;
            let l0 = eig_dense(&h.legal_block(), false).map_err(err)?.min();
            ensure(l0.abs() < 1e-10, || format!("T={t}: YES {l0}"))?;
        }
        Ok(())
    });
}

#[test]
fn ac08_qma_window() {
    criterion("AC-8", "bounded-error window", 30, || {
        for eta in [0.25, 1.0 / 3.0] {
            for t in [4, 8, 16] {
                let k = ClockSpec::linear(t, 1).map_err(err)?;
                let cases = [
                    (builtin::biased(t, eta), Instance::Yes),
                    (builtin::witness_biased(t, 0.9, eta), Instance::Yes),
                    (builtin::biased(t, 1.0 - eta), Instance::No),
                ];
                for (c, inst) in cases {
                    let c = c.map_err(err)?;
                    let cb = circuit_block_form(&c, &k).map_err(err)?;
                    let measured = match inst {
                        Instance::Yes => cb.eta_yes(),
                        Instance::No => cb.eta_no(),
                    };
                    ensure((measured - eta).abs() < 1e-12, || {
                        format!("T={t} {inst:?}: measured eta {measured}")
                    })?;
                    let h = assemble(&c, &k).map_err(err)?;
                    let r = verify_qma_window(&h, measured, inst).map_err(err)?;
                    ensure(r.holds(), || {
                        format!(
                            "T={t} eta={eta} {inst:?}: {} not in [{}, {}]",
                            r.computed, r.predicted_lo, r.predicted_hi
                        )
                    })?;
                }
            }
        }
        let h = assemble(
            &builtin::biased(8, 0.0).map_err(err)?,
            &ClockSpec::linear(8, 1).map_err(err)?,
        )
        .map_err(err)?;
        let r = verify_qma_window(&h, 0.0, Instance::Yes).map_err(err)?;
        ensure(r.holds() && r.predicted_hi == 0.0, || "eta=0 window".into())
    });
}

#[test]
fn ac09_constant_rejection() {
    criterion("AC-9", "constant-rejection upper bound", 20, || {
        for t in [36, 100] {
            let t_init = (t as f64).sqrt().ceil() as usize;
            let tp = t - t_init;
            for mu in [0.1, 1.0 / 3.0] {
                let r = constant_rejection_bound(t, t_init, mu).map_err(err)?;
                let bound = mu * one_minus_cos(PI / (2 * tp + 1) as f64);
                ensure(r.quotient <= bound * (1.0 + 1e-9), || {
                    format!("T={t} mu={mu}: quotient {} > {bound}", r.quotient)
                })?;
                ensure(r.t_u_sq >= 1.0, || format!("T={t}: T u^2 = {}", r.t_u_sq))?;
                ensure(r.lambda0_b <= r.quotient, || {
                    format!("T={t} mu={mu}: lambda0(B) above quotient")
                })?;
                let c = builtin::biased(t, mu).map_err(err)?;
                let k = ClockSpec::linear(t, t_init).map_err(err)?;
                let h = assemble(&c, &k).map_err(err)?;
                let l0 = eig_dense(&h.legal_block(), false).map_err(err)?.min();
                ensure(l0 <= bound * (1.0 + 1e-9), || {
                    format!("T={t} mu={mu}: assembled {l0} > {bound}")
                })?;
            }
        }
        Ok(())
    });
}

fn orthonormal(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vs {
        for u in &out {
            let c: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Rank-r projector in dimension d: generic for most draws, coordinate
/// aligned with one rotated pair for the rest.
fn random_projector(rng: &mut ChaCha8Rng) -> DenseSymmetric {
    let d = rng.gen_range(1..=16);
    let r = rng.gen_range(0..=d);
    let cols: Vec<Vec<f64>> = if rng.gen_bool(0.8) {
        (0..r)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    } else {
        let mut idx: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        let theta: f64 = rng.gen_range(0.0..PI);
        (0..r)
            .map(|j| {
                let mut v = vec![0.0; d];
                v[idx[j]] = 1.0;
                if j == 0 && d > r {
                    v[idx[0]] = theta.cos();
                    v[idx[r]] = theta.sin();
                }
                v
            })
            .collect()
    };
    let basis = orthonormal(cols);
    DenseSymmetric::from_fn(d, |i, j| basis.iter().map(|v| v[i] * v[j]).sum()).unwrap()
}

#[test]
fn ac10_stoquastization() {
    criterion("AC-10", "stoquastization", 30, || {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for case in 0..1000 {
            let m = random_projector(&mut rng);
            for s in 0..=m.dim() {
                let f = stoquastize(&m, s).map_err(|e| format!("case {case} s={s}: {e}"))?;
                let rec = f.reconstruct().max_abs_diff(&m);
                ensure(rec < 1e-10, || format!("case {case} s={s}: residual {rec}"))?;
                let off = f.off_pattern_max();
                ensure(off < 1e-11, || {
                    format!("case {case} s={s}: off-pattern {off}")
                })?;
                let inside = f.in_pattern_min();
                ensure(inside > 0.0, || {
                    format!("case {case} s={s}: zero inside pattern")
                })?;
                for b in &f.blocks {
                    if let Block::Pair { a, b, mu } = *b {
                        ensure((0.0..=1.0).contains(&mu), || format!("mu {mu}"))?;
                        let p = [
                            [f.d.get(a, a), f.d.get(a, b)],
                            [f.d.get(b, a), f.d.get(b, b)],
                        ];
                        let target = [
                            [1.0 - mu, -(mu * (1.0 - mu)).sqrt()],
                            [-(mu * (1.0 - mu)).sqrt(), mu],
                        ];
                        for i in 0..2 {
                            for j in 0..2 {
                                let sq = p[i][0] * p[0][j] + p[i][1] * p[1][j];
                                ensure((sq - p[i][j]).abs() < 1e-11, || {
                                    "block not idempotent".into()
                                })?;
                                ensure((p[i][j] - target[i][j]).abs() < 1e-11, || {
                                    format!("case {case}: block is not P(mu)")
                                })?;
                            }
                        }
                    }
                }
            }
        }
        for t in [4, 6] {
            let k = ClockSpec::linear(t, 1).map_err(err)?;
            let no =
                circuit_block_form(&builtin::always_reject(2, t).map_err(err)?, &k).map_err(err)?;
            ensure(no.mus().iter().all(|&m| m == 1.0), || {
                format!("zero-error NO: {:?}", no.mus())
            })?;
            extract_mu(&no.form, InstanceKind::EqmaNo).map_err(err)?;
            let yes =
                circuit_block_form(&builtin::identity(2, t).map_err(err)?, &k).map_err(err)?;
            ensure(yes.mus().contains(&0.0), || {
                format!("zero-error YES: {:?}", yes.mus())
            })?;
            extract_mu(&yes.form, InstanceKind::EqmaYes).map_err(err)?;
        }
        Ok(())
    });
}

#[test]
fn ac11_kkr() {
    criterion("AC-11", "eigenvalue perturbation inequality", 10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..500 {
            let n = rng.gen_range(1..=32);
            let eps = 10f64.powf(rng.gen_range(-8.0..0.5));
            let mut h1 = DenseSymmetric::zeros(n);
            let mut h2 = DenseSymmetric::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let x = rng.gen_range(-1.0..1.0);
                    h1.add_sym(i, j, x);
                    h2.add_sym(i, j, x + eps * rng.gen_range(-1.0..1.0));
                }
            }
            let r = kkr_check(&h1, &h2).map_err(err)?;
            ensure(r.computed <= r.predicted_hi + 1e-10, || {
                format!("case {case}: {} > {}", r.computed, r.predicted_hi)
            })?;
        }
        Ok(())
    });
}
