// Copyright 2026 The qsvd Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


mod common;

use common::*;
use proptest::prelude::*;
use qsvd_core::matrix::{
    exact_eig, exact_evolution, norms, random_complex, random_hermitian, random_low_rank, svd, ComplexMatrix,
    HermitianMatrix, C64,
};
use qsvd_core::state::{DensityMatrix, QuantumState};

fn exchange() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

#[test]
fn norms_of_exchange_and_identity() {
    let r = norms(&exchange());
    assert_eq!(r.max_norm, 1.0);
    assert!((r.frobenius - 2f64.sqrt()).abs() < 1e-15);
    assert!((r.nuclear - 2.0).abs() < 1e-12);

    let r = norms(&ComplexMatrix::identity(3));
    assert_eq!(r.max_norm, 1.0);
    assert!((r.frobenius - 3f64.sqrt()).abs() < 1e-15);
    assert!((r.nuclear - 3.0).abs() < 1e-12);
}

#[test]
fn singular_values_match_jacobi_reference() {
    let mut g = rng(11);
    let a = random_low_rank(4, 2, 1.0, &mut g).unwrap().into_matrix();
    let ours = svd(&a).singular_values;
    let reference = dense_singular_values(&a);
    for (x, y) in ours.iter().zip(&reference) {
        assert!((x - y).abs() < 1e-10, "{ours:?} vs {reference:?}");
    }
    let nuclear: f64 = reference.iter().sum();
    assert!((norms(&a).nuclear - nuclear).abs() < 1e-10);
}

#[test]
fn eig_of_small_closed_forms() {
    let d = HermitianMatrix::new(ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, -1.0]).unwrap()).unwrap();
    let e = exact_eig(&d);
    assert_eq!(e.eigenvalues, vec![2.0, -1.0]);
    assert!(vec_diff(&e.eigenvectors[0], &[c(1.0, 0.0), c(0.0, 0.0)]) < 1e-15);
    assert!(vec_diff(&e.eigenvectors[1], &[c(0.0, 0.0), c(1.0, 0.0)]) < 1e-15);

    let x = HermitianMatrix::new(exchange()).unwrap();
    let e = exact_eig(&x);
    assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
    assert!((e.eigenvalues[1] + 1.0).abs() < 1e-14);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!(vec_diff(&e.eigenvectors[0], &[c(h, 0.0), c(h, 0.0)]) < 1e-12);
    let v = &e.eigenvectors[1];
    assert!((v[0] + v[1]).norm() < 1e-12 && (v[0].norm() - h).abs() < 1e-12);
}

#[test]
fn eig_reconstruction_random_and_large() {
    for (n, seed) in [(6, 1), (64, 2)] {
        let a = random_hermitian(n, &mut rng(seed));
        let e = exact_eig(&a);
        assert!((&e.reconstruct() - a.as_matrix()).frobenius_norm() <= 1e-10);
        assert!(e.max_residual(a.as_matrix()) <= 1e-10);
        assert!(e.orthonormality_error() <= 1e-10);
    }
}

#[test]
fn exact_evolution_examples() {
    let sigma = QuantumState::basis(2, 0).to_density();
    let zero = HermitianMatrix::new(ComplexMatrix::zeros(2, 2)).unwrap();
    let out = exact_evolution(&zero, 3.0, &sigma).unwrap();
    assert!(out.as_matrix().max_abs_diff(sigma.as_matrix()) < 1e-15);

    let diag = HermitianMatrix::new(ComplexMatrix::from_real(2, 2, &[2.0 * 0.7, 0.0, 0.0, -2.0 * 1.3]).unwrap()).unwrap();
    let mixed = DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.3, 0.0, 0.0, 0.7]).unwrap()).unwrap();
    let out = exact_evolution(&diag, 2.5, &mixed).unwrap();
    assert!(out.as_matrix().max_abs_diff(mixed.as_matrix()) < 1e-14);

    let a = HermitianMatrix::new(ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 2.0, 0.0]).unwrap()).unwrap();
    let out = exact_evolution(&a, std::f64::consts::FRAC_PI_2, &sigma).unwrap();
    let target = QuantumState::basis(2, 1).to_density();
    assert!(out.as_matrix().max_abs_diff(target.as_matrix()) < 1e-10);
    let dense = dense_exact_evolution(a.as_matrix(), sigma.as_matrix(), std::f64::consts::FRAC_PI_2);
    assert!(dense.max_abs_diff(target.as_matrix()) < 1e-10);
}

#[test]
fn exact_evolution_matches_taylor_reference() {
    let a = random_hermitian(5, &mut rng(3));
    let psi = QuantumState::normalized((0..5).map(|k| c(k as f64 + 1.0, 0.5 - k as f64)).collect()).unwrap();
    let sigma = psi.to_density();
    let ours = exact_evolution(&a, 1.7, &sigma).unwrap();
    let dense = dense_exact_evolution(a.as_matrix(), sigma.as_matrix(), 1.7);
    assert!(ours.as_matrix().max_abs_diff(&dense) < 1e-12);
}

#[test]
fn low_rank_rank_two_spectrum() {
    let a = random_low_rank(8, 2, 1.0, &mut rng(4)).unwrap();
    let spectrum = jacobi_eigenvalues(a.as_matrix());
    let big = spectrum.iter().filter(|l| l.abs() >= 4.0).count();
    let small = spectrum.iter().filter(|l| l.abs() <= 1e-10).count();
    assert_eq!((big, small), (2, 6), "{spectrum:?}");
    assert!(a.as_matrix().hermitian_deviation() <= 1e-12);
}

#[test]
fn low_rank_full_rank_magnitudes() {
    let a = random_low_rank(4, 4, 1.0, &mut rng(5)).unwrap();
    for l in jacobi_eigenvalues(a.as_matrix()) {
        assert!((2.0 - 1e-10..=4.0 + 1e-10).contains(&l.abs()), "{l}");
    }
}

/// The typical max-norm of the ensemble is a small multiple of the rank;
/// only the median over seeds is checked.
#[test]
fn low_rank_median_max_norm() {
    let mut values: Vec<f64> = (0..41)
        .map(|seed| random_low_rank(64, 2, 1.0, &mut rng(100 + seed)).unwrap().as_matrix().max_norm())
        .collect();
    values.sort_by(f64::total_cmp);
    let median = values[values.len() / 2];
    assert!(median > 0.0 && median < 2.0 * 4.0, "median {median}");
}

#[test]
fn generated_matrices_are_hermitian() {
    let mut g = rng(6);
    for n in [1, 3, 16] {
        assert!(random_hermitian(n, &mut g).as_matrix().hermitian_deviation() <= 1e-12);
        for r in 1..=n.min(3) {
            assert!(random_low_rank(n, r, 0.5, &mut g).unwrap().as_matrix().hermitian_deviation() <= 1e-12);
        }
    }
}

#[test]
fn rejects_bad_generator_arguments() {
    let mut g = rng(7);
    assert!(random_low_rank(4, 0, 1.0, &mut g).is_err());
    assert!(random_low_rank(4, 5, 1.0, &mut g).is_err());
    assert!(random_low_rank(4, 2, -1.0, &mut g).is_err());
    assert!(HermitianMatrix::new(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 2.0, 0.0]).unwrap()).is_err());
}

#[test]
fn norms_ordering_on_many_matrices() {
    let mut g = rng(8);
    for i in 0..1000 {
        let (r, c) = (1 + i % 5, 1 + (i / 5) % 5);
        let a = random_complex(r, c, &mut g);
        let n = norms(&a);
        assert!(n.max_norm <= n.frobenius * (1.0 + 1e-12));
        assert!(n.frobenius <= n.nuclear * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_preserves_spectrum(seed in any::<u64>(), n in 1usize..7, t in -5.0f64..5.0) {
        let mut g = rng(seed);
        let a = random_hermitian(n, &mut g);
        let b = random_complex(n, n, &mut g);
        let gram = &b * &b.adjoint();
        let tr = gram.trace().re;
        let sigma = DensityMatrix::new(gram.scale_real(1.0 / tr)).unwrap();
        let out = exact_evolution(&a, t, &sigma).unwrap();
        prop_assert!(max_sorted_diff(&out.eigenvalues(), &sigma.eigenvalues()) <= 1e-10);
    }

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..10) {
        let a = random_hermitian(n, &mut rng(seed));
        let e = exact_eig(&a);
        prop_assert!(e.max_residual(a.as_matrix()) <= 1e-10);
        prop_assert!(max_sorted_diff(&e.eigenvalues, &jacobi_eigenvalues(a.as_matrix())) <= 1e-9);
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), m in 1usize..7, n in 1usize..7) {
        let a = random_complex(m, n, &mut rng(seed));
        let d = svd(&a);
        prop_assert!((&d.reconstruct() - &a).frobenius_norm() <= 1e-10);
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }
}

/// Singular vectors of rank-deficient complex matrices satisfy both pairing
/// relations and stay orthonormal.
#[test]
fn rank_deficient_complex_svd_vectors() {
    use qsvd_core::matrix::random_low_rank_rect;
    let mut g = rng(15145964231023693568);
    for (m, n, r) in [(4, 6, 3), (6, 4, 2), (5, 5, 1), (8, 3, 3)] {
        let a = random_low_rank_rect(m, n, r, 1.0, &mut g).unwrap();
        let d = svd(&a);
        for j in 0..r {
            let (u, v, s) = (d.u.column(j), d.v.column(j), d.singular_values[j]);
            let av: Vec<C64> = a.mul_vec(&v).iter().zip(&u).map(|(x, y)| x - y * s).collect();
            let ahu: Vec<C64> = a.adjoint().mul_vec(&u).iter().zip(&v).map(|(x, y)| x - y * s).collect();
            assert!(vec_norm(&av) < 1e-12 && vec_norm(&ahu) < 1e-12, "{m}x{n} rank {r}");
        }
        let k = m.min(n);
        assert!((&d.u.adjoint() * &d.u).max_abs_diff(&ComplexMatrix::identity(k)) < 1e-12);
        assert!((&d.v.adjoint() * &d.v).max_abs_diff(&ComplexMatrix::identity(k)) < 1e-12);
        assert!(max_sorted_diff(&d.singular_values, &dense_singular_values(&a)) < 1e-10);
    }
}

#[test]
fn complex_gram_is_positive() {
    let b = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(-1.0, 0.0), c(0.5, 0.5)]]).unwrap();
    let g = &b.adjoint() * &b;
    assert!(jacobi_eigenvalues(&g).iter().all(|&l| l >= -1e-12));
    let _: C64 = g.trace();
}
