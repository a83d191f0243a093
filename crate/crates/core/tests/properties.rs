use std::f64::consts::PI;

use clockham::bounds::{
    constant_rejection_bound, eqma_no_chain, kkr_check, two_block_matrix, BoundReport,
};
use clockham::circuitham::{assemble, builtin, verify_mixed, ClockSpec, MixedBranch, SubspaceKind};
use clockham::linalg::{
    eig_dense, eig_tridiagonal, householder_tridiagonalize, sturm_count, DenseSymmetric,
    SymTridiagonal,
};
use clockham::report::write_csv;
use clockham::stoquastic::stoquastize;
use clockham::walks::{
    endpoint_ground_energy, one_minus_cos, uncouple, walk_spectrum, PenalizedWalk,
};
use proptest::prelude::*;

fn tridiagonal() -> impl Strategy<Value = SymTridiagonal> {
    (1usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-2.0f64..2.0, n - 1),
        )
            .prop_map(|(d, e)| SymTridiagonal::new(d, e).unwrap())
    })
}

fn symmetric(max: usize) -> impl Strategy<Value = DenseSymmetric> {
    (1usize..=max).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
            DenseSymmetric::from_fn(n, |i, j| v[i.min(j) * n + i.max(j)]).unwrap()
        })
    })
}

fn projector(max: usize) -> impl Strategy<Value = (DenseSymmetric, usize)> {
    (1usize..=max)
        .prop_flat_map(|d| (Just(d), 0..=d, 0..=d))
        .prop_flat_map(|(d, r, s)| {
            (
                prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), r),
                Just(s),
            )
        })
        .prop_map(|(cols, s)| {
            let d = cols.first().map_or(1, Vec::len);
            let mut basis: Vec<Vec<f64>> = Vec::new();
            for mut v in cols {
                for u in &basis {
                    let c: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
                }
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-6 {
                    basis.push(v.into_iter().map(|x| x / n).collect());
                }
            }
            let m =
                DenseSymmetric::from_fn(d, |i, j| basis.iter().map(|v| v[i] * v[j]).sum()).unwrap();
            (m, s.min(d))
        })
}

fn walk() -> impl Strategy<Value = PenalizedWalk> {
    (2usize..40).prop_flat_map(|t| {
        prop::collection::btree_map(1..=t, 0.0f64..2.0, 0..4)
            .prop_map(move |p| PenalizedWalk::new(t, p.into_iter().collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sturm_matches_jacobi(m in tridiagonal()) {
        let s = eig_tridiagonal(&m, true).unwrap();
        let d = eig_dense(&m.to_dense(), false).unwrap();
        let scale = 1.0 + m.norm_inf();
        for (a, b) in s.eigenvalues.iter().zip(&d.eigenvalues) {
            prop_assert!((a - b).abs() < 1e-11 * scale);
        }
        prop_assert!(s.residual < 1e-10 * scale);
        for (k, &x) in s.eigenvalues.iter().enumerate() {
            prop_assert!(sturm_count(&m, x - 1e-9 * scale) <= k);
        }
    }

    #[test]
    fn householder_preserves_spectrum(m in symmetric(12)) {
        let t = householder_tridiagonalize(&m);
        let a = eig_tridiagonal(&t, false).unwrap().eigenvalues;
        let b = eig_dense(&m, false).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn penalties_lift_every_level(w in walk()) {
        let free = walk_spectrum(&PenalizedWalk::free(w.len()).unwrap()).unwrap();
        let pen = walk_spectrum(&w).unwrap();
        for (a, b) in free.iter().zip(&pen) {
            prop_assert!(*b >= a - 1e-12);
        }
        let refl = walk_spectrum(&w.reflect()).unwrap();
        for (a, b) in pen.iter().zip(&refl) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_energy_is_monotone(t in 2usize..300, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let e_lo = endpoint_ground_energy(t, lo).unwrap();
        let e_hi = endpoint_ground_energy(t, hi).unwrap();
        prop_assert!(e_lo <= e_hi + 1e-15);
        prop_assert!(e_hi <= one_minus_cos(PI / (2 * t) as f64) + 1e-15);
    }

    #[test]
    fn uncoupling_reconstructs(t in 3usize..60, k in 2usize..59) {
        prop_assume!(k < t);
        let w = PenalizedWalk::single(t, k, 1.0).unwrap();
        let u = uncouple(&w).unwrap();
        prop_assert!(u.reconstruct().max_abs_diff(&w.to_matrix().to_dense()) < 1e-15);
    }

    #[test]
    fn stoquastize_round_trip((m, s) in projector(16)) {
        let f = stoquastize(&m, s).unwrap();
        prop_assert!(f.reconstruct().max_abs_diff(&m) < 1e-10);
        prop_assert!(f.off_pattern_max() < 1e-11);
        prop_assert!(f.v.orthogonality_defect() < 1e-10);
        for mu in f.mus() {
            prop_assert!((0.0..=1.0).contains(&mu));
        }
        let coupled = (0..f.pairs).filter(|&i| f.d.get(i, s + i) < 0.0).count();
        prop_assert_eq!(coupled, f.pairs);
        prop_assert!(f.pairs <= f.r_a.min(f.r_b));
    }

    #[test]
    fn kkr_always_holds(a in symmetric(16), eps in 1e-6f64..1.0) {
        let n = a.dim();
        let b = a.add(&DenseSymmetric::from_fn(n, |i, j| eps * ((i * j + i + j) % 5) as f64 / 5.0)
            .unwrap()).unwrap();
        prop_assert!(kkr_check(&a, &b).unwrap().holds());
    }

    #[test]
    fn trial_quotient_under_bound(t in 4usize..400, mu in 0.0f64..=1.0) {
        let t_init = (t as f64).sqrt().ceil() as usize;
        let r = constant_rejection_bound(t, t_init, mu).unwrap();
        prop_assert!(r.quotient <= r.bound * (1.0 + 1e-9) + 1e-300);
        prop_assert!(r.lambda0_b <= r.quotient + 1e-15);
        prop_assert!(r.t_u_sq >= 1.0);
    }

    #[test]
    fn coupling_kernel(mu in 0.0f64..=1.0) {
        let b = two_block_matrix(3, 2, mu).unwrap().to_dense();
        // The P(μ) contribution on sites (1, 2) is B minus the two walks.
        let p = [
            [b.get(1, 1) - 0.5, b.get(1, 2)],
            [b.get(2, 1), b.get(2, 2) - 0.5],
        ];
        let v = [mu.sqrt(), (1.0 - mu).sqrt()];
        for row in p {
            prop_assert!((row[0] * v[0] + row[1] * v[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn eqma_no_chain_holds(t in 4usize..=32, picks in prop::collection::vec(0usize..32, 1..6)) {
        let z: Vec<usize> = picks.into_iter().map(|k| k % t).collect();
        let r = eqma_no_chain(t, &z).unwrap();
        prop_assert!(r.first_psd);
        prop_assert!(r.holds());
    }
}

#[test]
fn trial_bound_dominates_assembled_yes() {
    for t in [8, 16, 32, 64] {
        let t_init = (t as f64).sqrt().ceil() as usize;
        let k = ClockSpec::linear(t, t_init).unwrap();
        for mu in [0.0, 0.05, 0.2, 0.5, 0.8, 1.0] {
            let h = assemble(&builtin::biased(t, mu).unwrap(), &k).unwrap();
            let l0 = eig_dense(&h.legal_block(), false).unwrap().min();
            let r = constant_rejection_bound(t, t_init, mu).unwrap();
            assert!(
                l0 <= r.bound * (1.0 + 1e-9) + 1e-12,
                "T={t} mu={mu}: {l0} > {}",
                r.bound
            );
        }
    }
}

#[test]
fn mixed_components_respect_reach_bound() {
    let branches = [
        MixedBranch {
            len: 5,
            illegal: vec![2],
            cycle: false,
        },
        MixedBranch {
            len: 6,
            illegal: vec![0, 5],
            cycle: true,
        },
        MixedBranch {
            len: 1,
            illegal: vec![0],
            cycle: false,
        },
    ];
    let k = ClockSpec::dynamic_init(9, &branches).unwrap();
    let h = assemble(&builtin::identity(2, 9).unwrap(), &k).unwrap();
    let mixed: Vec<_> = h
        .partition()
        .into_iter()
        .filter(|s| s.kind == SubspaceKind::Mixed)
        .collect();
    assert_eq!(mixed.len(), 2);
    for s in &mixed {
        let r = verify_mixed(&h, s).unwrap();
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn csv_is_deterministic() {
    let rows: Vec<BoundReport> = (1..20)
        .map(|t| {
            let e = endpoint_ground_energy(t * 10, 1.0 / 3.0).unwrap();
            BoundReport::new("x", Some(t), format!("t={t}"), "", (0.0, 1.0), e, 0.0)
        })
        .collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_csv(&mut a, &rows).unwrap();
    write_csv(&mut b, &rows).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    for (line, r) in text.lines().skip(1).zip(&rows) {
        let computed: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert_eq!(computed, r.computed);
    }
}
