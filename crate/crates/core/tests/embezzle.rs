mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64 as C64;

use ucorr::correlation::{compress, validate, Generator};
use ucorr::embezzle::{
    alternate_correlation, alternate_limit, build_protocol, closed_form_correlation,
    closed_form_matrix, dense_correlation, limit_correlation, overlap, DenseModel, TargetVector,
};
use ucorr::linalg::{inner, kron_vec, operator_norm, ComplexMatrix, ONE, ZERO};
use ucorr::Error;

use common::*;

fn bell() -> TargetVector {
    TargetVector::maximally_entangled(2, 2).unwrap()
}

#[test]
fn product_target_is_fixed() {
    let t = TargetVector::product(2, 3).unwrap();
    assert_eq!(t.theta(), 0.0);
    let p = build_protocol(&t, 5).unwrap();
    for j in 0..=5 {
        assert_eq!(p.h(j)[0], ONE);
    }
    assert_eq!(overlap(&p), 1.0);
    let x = closed_form_matrix(&p);
    assert_eq!(x.matrix, limit_correlation(&t).matrix);
}

#[test]
fn bell_angle_and_chain() {
    for r in [1, 2, 7, 30] {
        let p = build_protocol(&bell(), r).unwrap();
        assert!((bell().theta() - FRAC_PI_4).abs() < 1e-15);
        for j in 1..=r {
            let c = inner(p.h(j - 1), p.h(j));
            assert!((c.re - (FRAC_PI_4 / r as f64).cos()).abs() < 1e-12);
            assert!(c.im.abs() < 1e-15);
        }
        assert!(p.chain_residual() < 1e-12);
    }
}

#[test]
fn interpolants_span_endpoints() {
    let t = TargetVector::new(random_unit(&mut rng(3), 6), 2, 3).unwrap();
    let p = build_protocol(&t, 4).unwrap();
    let h0 = p.h(0).to_vec();
    let h4 = p.h(4).to_vec();
    let zalpha: Vec<C64> = t.alpha().iter().map(|a| t.phase() * a).collect();
    for (x, y) in h4.iter().zip(&zalpha) {
        assert!((x - y).norm() < 1e-12);
    }
    for j in 0..=4 {
        let h = p.h(j);
        let norm: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        // residual after projecting onto span{h_0, h_4}
        let g: Vec<C64> = h4
            .iter()
            .zip(&h0)
            .map(|(a, b)| a - inner(&h0, &h4) * b)
            .collect();
        let gn = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let g: Vec<C64> = g.iter().map(|z| z / gn).collect();
        let rest: Vec<C64> = (0..6)
            .map(|i| h[i] - inner(&h0, h) * h0[i] - inner(&g, h) * g[i])
            .collect();
        assert!(rest.iter().all(|z| z.norm() < 1e-12));
    }
}

#[test]
fn negative_phase_is_reduced() {
    let t = TargetVector::new(
        vec![C64::new(-FRAC_1_SQRT_2, 0.0), ZERO, ZERO, C64::new(FRAC_1_SQRT_2, 0.0)],
        2,
        2,
    )
    .unwrap();
    assert_eq!(t.phase(), C64::new(-1.0, 0.0));
    assert!((t.theta() - FRAC_PI_4).abs() < 1e-15);
}

#[test]
fn overlap_values() {
    let p1 = build_protocol(&bell(), 1).unwrap();
    assert!((overlap(&p1) - FRAC_1_SQRT_2).abs() < 1e-15);
    let p10 = build_protocol(&bell(), 10).unwrap();
    let direct = (std::f64::consts::PI / 40.0).cos().powi(10);
    assert!((overlap(&p10) - direct).abs() < 1e-15);
    assert!((direct - 0.9696).abs() < 1e-4);
}

#[test]
fn first_coordinate_at_r1_is_half() {
    let full = closed_form_correlation(&build_protocol(&bell(), 1).unwrap());
    let v = full.get(Generator::U(0, 0), Generator::U(0, 0));
    assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn closed_form_block_formula() {
    for r in [1usize, 2, 5, 20] {
        let t = bell();
        let p = build_protocol(&t, r).unwrap();
        let x = closed_form_matrix(&p);
        let step = (FRAC_PI_4 / r as f64).cos();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let e = kron_vec(&unit(2, j), &unit(2, l));
                        let expected = t.entry(i, k) * inner(p.h(1), &e).conj() * step.powi(r as i32 - 1);
                        assert!((x.entry(i, j, k, l) - expected).norm() < 1e-12);
                    }
                }
            }
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[i] = ONE;
    v
}

#[test]
fn closed_form_agrees_with_dense_model() {
    let mut seed = 0;
    for n in 2..=3 {
        for m in 2..=3 {
            for r in 1..=3 {
                if ((n * m) as u128).pow(r as u32 + 1) > 1 << 20 {
                    continue;
                }
                let t = TargetVector::new(random_unit(&mut rng(500 + seed), n * m), n, m).unwrap();
                seed += 1;
                let p = build_protocol(&t, r).unwrap();
                let d = closed_form_correlation(&p).max_abs_diff(&dense_correlation(&p).unwrap());
                assert!(d < 1e-10, "(n, m, r) = ({n}, {m}, {r}): {d:e}");
            }
        }
    }
}

#[test]
fn dense_cap_is_enforced() {
    let p = build_protocol(&TargetVector::maximally_entangled(3, 3).unwrap(), 6).unwrap();
    assert!(matches!(dense_correlation(&p), Err(Error::DenseCapExceeded { .. })));
}

#[test]
fn dense_unit_state() {
    let p = build_protocol(&TargetVector::new(random_unit(&mut rng(8), 4), 2, 2).unwrap(), 3).unwrap();
    let full = dense_correlation(&p).unwrap();
    assert!((full.get(Generator::One, Generator::One) - ONE).norm() < 1e-12);
}

#[test]
fn limit_patterns() {
    let x = limit_correlation(&TargetVector::product(2, 2).unwrap());
    assert_eq!(x.matrix, ComplexMatrix::unit(4, 4, 0, 0));
    let x = limit_correlation(&bell());
    let first = x.first_column();
    let expected = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
    for (a, b) in first.iter().zip(expected) {
        assert!((a - C64::new(b, 0.0)).norm() < 1e-15);
    }
    assert_eq!(x.max_off_first_column(), 0.0);
    assert!(validate(&x).passed());
}

#[test]
fn convergence_to_limit() {
    for seed in 0..6 {
        let (n, m) = [(2, 2), (2, 3), (3, 3)][seed as usize % 3];
        let t = TargetVector::new(random_unit(&mut rng(700 + seed), n * m), n, m).unwrap();
        let limit = limit_correlation(&t);
        let mut previous = f64::INFINITY;
        for r in 1..=12 {
            let p = build_protocol(&t, r).unwrap();
            let x = closed_form_matrix(&p);
            let d = frobenius_distance(&x.matrix, &limit.matrix);
            assert!(d <= previous + 1e-12, "seed {seed}, r {r}: {d} > {previous}");
            previous = d;
            assert!(operator_norm(&x.matrix).unwrap() <= 1.0 + 1e-9);
            // off-first-column entries are bounded by |α_ik|·|⟨e_j⊗e_l, h_1⟩|
            for i in 0..n {
                for j in 0..n {
                    for k in 0..m {
                        for l in 0..m {
                            let bound = t.entry(i, k).norm() * p.h(1)[j * m + l].norm();
                            assert!(x.entry(i, j, k, l).norm() <= bound + 1e-12);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn overlap_strictly_below_one() {
    let t = TargetVector::new(random_unit(&mut rng(9), 9), 3, 3).unwrap();
    for r in [1u64, 10, 1000, 1_000_000, 1 << 40] {
        assert!(t.overlap_deficit_at(r) > 0.0);
    }
}

#[test]
fn schmidt_spectrum_preserved_by_local_unitaries() {
    for (n, m, r) in [(2, 2, 1), (2, 2, 2), (2, 3, 1), (3, 2, 2)] {
        let t = TargetVector::new(random_unit(&mut rng(40 + r as u64), n * m), n, m).unwrap();
        let p = build_protocol(&t, r).unwrap();
        let model = DenseModel::new(&p).unwrap();
        let psi = model.embed(0, 0);
        let moved = model.apply_u(&model.apply_v(&psi, false), false);
        let before = model.cut_schmidt_coefficients(&psi).unwrap();
        let after = model.cut_schmidt_coefficients(&moved).unwrap();
        assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn alternate_for_product_target() {
    let t = TargetVector::product(2, 2).unwrap();
    let alt = alternate_limit(&t).unwrap();
    let mut expected = ComplexMatrix::zeros(4, 4);
    expected[(0, 0)] = ONE;
    expected[(3, 3)] = ONE;
    assert!(alt.matrix.max_abs_diff(&expected) < 1e-12);
    let d = frobenius_distance(&alt.matrix, &limit_correlation(&t).matrix);
    assert!(d > 0.5);
    assert!((d - 1.0).abs() < 1e-12);
}

#[test]
fn alternate_finite_r_keeps_first_column() {
    let alpha = vec![
        C64::new(0.6, 0.0),
        ZERO,
        ZERO,
        ZERO,
        C64::new(0.0, 0.8),
        ZERO,
        ZERO,
        ZERO,
        ZERO,
    ];
    let t = TargetVector::new(alpha, 3, 3).unwrap();
    assert_eq!(t.schmidt_rank(), 2);
    let limit = limit_correlation(&t);
    let alt = alternate_limit(&t).unwrap();
    let alt_first = alt.first_column();
    for (a, b) in alt_first.iter().zip(limit.first_column()) {
        assert!((a - b).norm() < 1e-12);
    }
    assert!(frobenius_distance(&alt.matrix, &limit.matrix) > 0.5);
    let mut previous = f64::INFINITY;
    for r in [1, 2, 4, 8, 16] {
        let x = alternate_correlation(&t, r).unwrap();
        assert!(validate(&x).passed());
        let d = frobenius_distance(&x.matrix, &alt.matrix);
        assert!(d <= previous + 1e-12);
        previous = d;
    }
}

#[test]
fn alternate_rejects_maximally_entangled() {
    assert!(matches!(alternate_correlation(&bell(), 3), Err(Error::MaximallyEntangled)));
    assert!(alternate_limit(&TargetVector::maximally_entangled(2, 3).unwrap()).is_err());
}

#[test]
fn compressed_correlation_of_dense_matches_closed_form_entrywise() {
    let t = TargetVector::new(random_unit(&mut rng(21), 4), 2, 2).unwrap();
    let p = build_protocol(&t, 2).unwrap();
    let x = compress(&dense_correlation(&p).unwrap());
    assert!(x.matrix.max_abs_diff(&closed_form_matrix(&p).matrix) < 1e-10);
}
