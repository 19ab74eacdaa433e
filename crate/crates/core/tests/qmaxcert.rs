mod common;

use num_complex::Complex64 as C64;

use ucorr::correlation::{compress, validate, Generator};
use ucorr::linalg::{operator_norm, ComplexMatrix, ONE, ZERO};
use ucorr::qmaxcert::{build_quotient_rep, certify};
use ucorr::rng::{contraction, rng_for};

use common::*;

#[test]
fn quotient_map_for_n2() {
    let rep = build_quotient_rep(2).unwrap();
    assert_eq!(rep.phi_unit(0, 0), Some((Generator::One, 0.25)));
    assert_eq!(rep.phi_unit(0, 2), Some((Generator::U(0, 0), 0.25)));
    assert_eq!(rep.phi_unit(3, 1), Some((Generator::UStar(1, 1), 0.25)));
    assert_eq!(rep.phi_unit(0, 1), None);
    assert_eq!(rep.kernel_basis.len(), 7);
    for k in &rep.kernel_basis {
        assert!(rep.apply(k).iter().all(|c| c.norm() < 1e-15));
    }
    let (rank, kernel) = rep.ranks().unwrap();
    assert_eq!(rank, 9);
    assert_eq!(kernel, 7);
}

#[test]
fn quotient_map_dimensions() {
    for n in 2..=4 {
        let rep = build_quotient_rep(n).unwrap();
        assert_eq!(rep.kernel_basis.len(), 4 * n * n - (2 * n * n + 1));
        let (rank, kernel) = rep.ranks().unwrap();
        assert_eq!(rank + kernel, 4 * n * n);
        assert_eq!(kernel, rep.kernel_basis.len());
    }
    assert!(build_quotient_rep(1).is_err());
}

#[test]
fn certificate_of_zero() {
    let c = certify(&ComplexMatrix::zeros(4, 4), 2, 2).unwrap();
    assert_eq!(c.p, ComplexMatrix::identity(16));
    assert!((c.min_eig - 1.0).abs() < 1e-15);
    assert_eq!(c.kernel_residual, 0.0);
    assert_eq!(c.recovery_residual, 0.0);
    assert!(c.valid());
}

#[test]
fn certificate_of_identity_and_its_double() {
    let c = certify(&ComplexMatrix::identity(4), 2, 2).unwrap();
    assert!(c.min_eig >= -1e-9);
    assert_eq!(c.recovery_residual, 0.0);
    assert!(c.valid());
    assert!((c.p.trace() - C64::new(16.0, 0.0)).norm() < 1e-15);

    let c = certify(&ComplexMatrix::identity(4).scale_real(2.0), 2, 2).unwrap();
    assert!(c.min_eig <= -1.0 + 1e-9);
    assert!(!c.valid());
}

#[test]
fn chi_layout() {
    let mut x = ComplexMatrix::zeros(6, 6);
    // x_{ijkl} at i=1, j=0, k=2, l=1
    x[(1 * 3 + 2, 0 * 3 + 1)] = C64::new(0.3, -0.2);
    let c = certify(&x, 2, 3).unwrap();
    // E_12 ⊗ E_ij ⊗ E_12 ⊗ E_kl: row (i, k), column (n + j, m + l) in M_2n ⊗ M_2m
    let row = 1 * 6 + 2;
    let col = (2 + 0) * 6 + 3 + 1;
    assert_eq!(c.chi[(row, col)], C64::new(0.3, -0.2));
    assert_eq!(c.chi.as_slice().iter().filter(|z| **z != ZERO).count(), 1);
    assert_eq!(c.chi.trace(), ZERO);
    assert_eq!(c.p[(col, row)], C64::new(0.3, 0.2));
}

#[test]
fn contractions_certify() {
    for seed in 0..30 {
        let (n, m) = [(2, 2), (2, 3), (3, 2), (3, 3)][seed as usize % 4];
        let x = contraction(&mut rng_for(seed, 11), n * m);
        let c = certify(&x, n, m).unwrap();
        assert!(c.min_eig >= -1e-9, "seed {seed}: {}", c.min_eig);
        assert!(c.kernel_residual <= 1e-12);
        assert!(c.recovery_residual <= 1e-10);
        assert!((c.p.trace().re - (4 * n * m) as f64).abs() < 1e-12);
        // the spectrum of P is 1 ± σ(X) padded with ones
        let oracle = hermitian_eigenvalues(&c.p)[0];
        let expected = 1.0 - power_norm(&x, 3000);
        assert!((oracle - c.min_eig).abs() < 1e-8);
        assert!((expected - c.min_eig).abs() < 1e-8);
    }
}

#[test]
fn sharp_failure_beyond_unit_ball() {
    for delta in [0.1, 0.5, 1.0] {
        for seed in 0..3 {
            let mut g = rng_for(seed, 12);
            let x = contraction(&mut g, 6);
            let x = x.scale_real((1.0 + delta) / operator_norm(&x).unwrap());
            let c = certify(&x, 2, 3).unwrap();
            assert!(c.min_eig <= -delta + 1e-8);
            assert!((c.min_eig - (-delta)).abs() < 1e-8);
            assert!(!c.valid());
        }
    }
}

#[test]
fn corrupted_p_is_detected() {
    let x = contraction(&mut rng_for(4, 13), 4);
    let mut c = certify(&x, 2, 2).unwrap();
    let rep = build_quotient_rep(2).unwrap();
    assert!(c.kernel_annihilation_check(&rep, &rep) <= 1e-12);
    // E_11 ⊗ E_11 pattern, off the generator lifts
    c.p[(0, 1)] += C64::new(0.1, 0.0);
    c.p[(1, 0)] += C64::new(0.1, 0.0);
    assert!(c.kernel_annihilation_check(&rep, &rep) >= 0.01);
    c.recheck().unwrap();
    assert!(!c.valid());
}

#[test]
fn induced_correlation_recovers_x() {
    for seed in 0..5 {
        let x = contraction(&mut rng_for(seed, 14), 6);
        let c = certify(&x, 2, 3).unwrap();
        let full = c.induced_correlation();
        assert_eq!(full.get(Generator::One, Generator::One), ONE);
        assert!(full.state_residual() < 1e-12);
        let back = compress(&full);
        assert!(back.matrix.max_abs_diff(&x) < 1e-12);
        assert!(validate(&back).passed());
    }
}
