use jivelab::matrixkit::{project_out, qr_orthonormalize, spectral_norm, sym_top_eigvecs, truncated_svd};
use jivelab::metrics::{misalignment, subspace_error};
use jivelab::model::{gen_orthonormal, gen_unique_randomized, gen_unique_two_group};
use jivelab::momentlab::{closed_form, random_operands, Identity};
use jivelab::rng::Stream;
use jivelab::{Matrix, OrthonormalBasis};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn gaussian(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut data = vec![0.0; rows * cols];
    Stream::new(seed).fill_normal(&mut data, 1.0);
    Matrix::new(rows, cols, data).unwrap()
}

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn na_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

fn basis(n: usize, k: usize, seed: u64) -> OrthonormalBasis {
    gen_orthonormal(seed, n, k, &[]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_norm_is_transpose_invariant(rows in 1usize..30, cols in 1usize..30, seed: u64) {
        let m = gaussian(rows, cols, seed);
        let a = spectral_norm(&m);
        prop_assert!((a - spectral_norm(&m.transpose())).abs() <= 1e-10 * a.max(1.0));
        prop_assert!((a - na_norm(&to_na(&m))).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn projector_distance_is_a_bounded_metric(n in 2usize..16, seed: u64) {
        let ka = 1 + (seed as usize % (n - 1)).min(n - 1);
        let kb = 1 + ((seed >> 8) as usize % n).min(n - 1);
        let a = basis(n, ka, seed);
        let b = basis(n, kb, seed ^ 0xabc);
        let e = subspace_error(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
        prop_assert_eq!(e, subspace_error(&b, &a).unwrap());
        let (pa, pb) = (to_na(a.mat()), to_na(b.mat()));
        let brute = na_norm(&(&pa * pa.transpose() - &pb * pb.transpose()));
        prop_assert!((e - brute.min(1.0)).abs() <= 1e-10, "{} vs {}", e, brute);
        prop_assert!(subspace_error(&a, &a).unwrap() <= 1e-12);
    }

    #[test]
    fn project_out_is_idempotent(n in 3usize..16, cols in 1usize..6, seed: u64) {
        let k = 1 + seed as usize % (n - 1);
        let b = basis(n, k, seed);
        let m = gaussian(n, cols, seed.wrapping_add(1));
        let once = project_out(&m, &b).unwrap();
        let twice = project_out(&once, &b).unwrap();
        prop_assert!(once.max_abs_diff(&twice).unwrap() <= 1e-12 * m.max_abs().max(1.0));
        prop_assert!(b.mat().t_matmul(&once).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn qr_spans_the_input(n in 2usize..40, seed: u64) {
        let k = 1 + seed as usize % n.min(8);
        let m = gaussian(n, k, seed);
        let q = qr_orthonormalize(&m).unwrap();
        prop_assert!(q.mat().orthonormality_defect() <= 1e-12);
        prop_assert!(project_out(&m, &q).map(|r| spectral_norm(&r)).unwrap() <= 1e-10 * spectral_norm(&m));
    }

    #[test]
    fn truncated_svd_residual_is_next_singular_value(rows in 2usize..25, cols in 2usize..25, seed: u64) {
        let m = gaussian(rows, cols, seed);
        let k = 1 + seed as usize % rows.min(cols);
        let svd = truncated_svd(&m, k).unwrap();
        let mut sv: Vec<f64> = to_na(&m).singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let resid = spectral_norm(&m.sub(&svd.reconstruct()).unwrap());
        prop_assert!((resid - sv.get(k).copied().unwrap_or(0.0)).abs() <= 1e-8);
        prop_assert!(svd.left.mat().orthonormality_defect() <= 1e-10);
        prop_assert!(svd.right.mat().orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn top_eigvecs_match_nalgebra(n in 2usize..25, seed: u64) {
        let g = gaussian(n, n, seed);
        let s = g.matmul_t(&g).unwrap();
        let k = 1 + seed as usize % (n - 1);
        let (ours, values) = sym_top_eigvecs(&s, k).unwrap();
        let eig = to_na(&s).symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        for (v, &i) in values.iter().zip(&order) {
            prop_assert!((v - eig.eigenvalues[i]).abs() <= 1e-10 * eig.eigenvalues[order[0]].max(1.0));
        }
        let gap = eig.eigenvalues[order[k - 1]] - eig.eigenvalues[order[k]];
        prop_assume!(gap > 1e-6);
        let top = DMatrix::from_fn(n, k, |i, j| eig.eigenvectors[(i, order[j])]);
        let theirs = OrthonormalBasis::new(Matrix::new(n, k, top.transpose().as_slice().to_vec()).unwrap()).unwrap();
        prop_assert!(subspace_error(&ours, &theirs).unwrap() <= 1e-8);
    }

    #[test]
    fn unique_subspaces_are_orthogonal_to_shared(theta in 0.01f64..0.5, half_k in 1usize..6, seed: u64) {
        let k = 2 * half_k;
        let u_star = basis(20, 2, seed);
        for u_k in [
            gen_unique_two_group(seed, &u_star, theta, k, 2).unwrap(),
            gen_unique_randomized(seed, &u_star, theta, k, 2).unwrap(),
        ] {
            for u in &u_k {
                prop_assert!(u.mat().t_matmul(u_star.mat()).unwrap().max_abs() <= 1e-10);
                prop_assert!(u.mat().orthonormality_defect() <= 1e-10);
            }
        }
        let two = gen_unique_two_group(seed, &u_star, theta, k, 2).unwrap();
        prop_assert!((misalignment(&two).unwrap() - theta).abs() <= 1e-10);
    }

    #[test]
    fn closed_forms_scale_linearly(which in 0usize..12, n1 in 2usize..5, n2 in 2usize..5, seed: u64, power in -3i32..4) {
        // a power of two scales without rounding, so linearity holds exactly
        let alpha = 2f64.powi(power) * if seed % 2 == 0 { 1.0 } else { -1.0 };
        let id = Identity::all()[which];
        let ops = random_operands(id, n1, n2, seed).unwrap();
        let base = closed_form(id, &ops, 1.3, n1, n2).unwrap();
        for slot in 0..ops.len() {
            let mut scaled = ops.clone();
            scaled[slot] = scaled[slot].scale(alpha);
            let got = closed_form(id, &scaled, 1.3, n1, n2).unwrap();
            let want = base.scale(alpha);
            prop_assert_eq!(got.as_slice(), want.as_slice());
        }
    }
}
