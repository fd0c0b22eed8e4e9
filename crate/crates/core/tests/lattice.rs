use gkplat_core::exact::{det_exact, hnf, smith, ExactMatrix};
use gkplat_core::lattice::{DualKind, EnumOptions, GeneratorMatrix, MemberMode};
use gkplat_core::par::ExecPolicy;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn int_matrix(dim: usize, range: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-range..=range, dim), dim).prop_filter("singular", |rows| {
        det_exact(&ExactMatrix::from_i64_rows(rows)).map(|d| !d.is_zero()).unwrap_or(false)
    })
}

fn unimodular(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    // Product of elementary row operations.
    prop::collection::vec((0..dim, 0..dim, -2i64..=2), 1..12).prop_map(move |ops| {
        let mut u: Vec<Vec<i64>> = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, k) in ops {
            if i != j {
                for c in 0..dim {
                    u[i][c] += k * u[j][c];
                }
            }
        }
        u
    })
}

/// Every point of `M` with coefficients in `[-w, w]^dim` and norm² ≤ r2.
fn box_count(m: &GeneratorMatrix, w: i64, r2: f64) -> usize {
    let dim = m.dim();
    let mut a = vec![-w; dim];
    let mut count = 0;
    loop {
        let p = m.combine(&a);
        if p.iter().map(|x| x * x).sum::<f64>() <= r2 + 1e-9 {
            count += 1;
        }
        let mut j = 0;
        loop {
            if j == dim {
                return count;
            }
            if a[j] < w {
                a[j] += 1;
                break;
            }
            a[j] = -w;
            j += 1;
        }
    }
}

#[test]
fn z2_shell_counts() {
    let z2 = GeneratorMatrix::from_int_rows(&[vec![1, 0], vec![0, 1]], 1).unwrap();
    let list = z2.enumerate_short_vectors(5.0, None, &EnumOptions::default()).unwrap();
    // 1 + 4 + 4 + 4 + 8 points of norm² 0, 1, 2, 4, 5.
    assert_eq!(list.entries.len(), 21);
    assert!(list.entries.windows(2).all(|w| w[0].norm2 <= w[1].norm2 + 1e-12));
}

#[test]
fn babai_mismatch_on_skewed_basis() {
    let m = GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.51, 0.1]]).unwrap();
    let x = [0.5, 0.0];
    let rounded = m.babai_round(&x).unwrap();
    let exact = m.closest_vector(&x, &EnumOptions::default()).unwrap();
    let d_round: f64 = rounded.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum();
    assert!(exact.dist2 < d_round - 1e-6, "rounding should lose here: {} vs {d_round}", exact.dist2);
}

#[test]
fn symplectic_dual_pairs_with_basis() {
    let m = GeneratorMatrix::from_rows(&[
        vec![2.0f64.sqrt(), 0.0],
        vec![0.5f64.sqrt(), 1.5f64.sqrt()],
    ])
    .unwrap();
    let d = m.dual(DualKind::Symplectic).unwrap();
    // M J (M⊥)ᵀ = −I
    let j = gkplat_core::lattice::symplectic_form(1);
    let p = m.matrix() * j * d.matrix().transpose();
    assert!((p + DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
}

#[test]
fn sequential_and_parallel_enumeration_agree() {
    let m = GeneratorMatrix::from_int_rows(&[vec![2, 1, 0, 0], vec![1, 2, 1, 0], vec![0, 1, 2, 1], vec![0, 0, 1, 2]], 1)
        .unwrap();
    let seq = m.enumerate_short_vectors(12.0, None, &EnumOptions::sequential()).unwrap();
    let par = m
        .enumerate_short_vectors(12.0, None, &EnumOptions::with_policy(ExecPolicy::Parallel { threads: Some(3) }))
        .unwrap();
    assert_eq!(seq, par);
}

#[test]
fn radius_cap_is_enforced() {
    let z4 = GeneratorMatrix::from_int_rows(&(0..4).map(|i| (0..4).map(|j| i64::from(i == j)).collect()).collect::<Vec<_>>(), 1)
        .unwrap();
    let opts = EnumOptions { cap: 1000, ..EnumOptions::default() };
    assert!(matches!(
        z4.enumerate_short_vectors(400.0, None, &opts),
        Err(gkplat_core::Error::RadiusTooLarge { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_is_basis_invariant(rows in int_matrix(3, 3), u in unimodular(3)) {
        let m = ExactMatrix::from_i64_rows(&rows);
        let um = ExactMatrix::from_i64_rows(&u).mul(&m).unwrap();
        prop_assert_eq!(hnf(&m).unwrap().h, hnf(&um).unwrap().h);
        let a = GeneratorMatrix::from_int_rows(&rows, 1).unwrap();
        let b = GeneratorMatrix::from_exact(um, 1).unwrap();
        prop_assert!(a.same_lattice(&b).unwrap());
    }

    #[test]
    fn hnf_transform_reproduces(rows in int_matrix(3, 4)) {
        let m = ExactMatrix::from_i64_rows(&rows);
        let h = hnf(&m).unwrap();
        prop_assert_eq!(h.u.mul(&m).unwrap(), h.h.clone());
        prop_assert_eq!(h.rank, 3);
        let det_u = det_exact(&h.u).unwrap();
        prop_assert!(det_u.abs() == num_rational::BigRational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn smith_decomposition(rows in int_matrix(3, 4)) {
        let a = ExactMatrix::from_i64_rows(&rows);
        let s = smith(&a).unwrap();
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.s.clone());
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[0].is_positive());
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn lll_preserves_lattice(rows in int_matrix(3, 5)) {
        let m = GeneratorMatrix::from_int_rows(&rows, 1).unwrap();
        let (r, t) = m.lll_reduce_with_transform(0.99).unwrap();
        prop_assert!(r.same_lattice(&m).unwrap());
        prop_assert!((r.abs_det() - m.abs_det()).abs() < 1e-9 * m.abs_det());
        let det_t = det_exact(&ExactMatrix::from_i64_rows(&t)).unwrap();
        prop_assert!(det_t.abs() == num_rational::BigRational::from_integer(BigInt::from(1)));
        let rr = m.rounding_reduced(0.99).unwrap();
        prop_assert!(rr.same_lattice(&m).unwrap());
    }

    #[test]
    fn closest_vector_is_optimal(rows in int_matrix(3, 2), x in prop::collection::vec(-3.0f64..3.0, 3)) {
        let m = GeneratorMatrix::from_int_rows(&rows, 1).unwrap();
        let cv = m.closest_vector(&x, &EnumOptions::default()).unwrap();
        prop_assert!(m.member(&cv.point, MemberMode::Auto).unwrap());
        // No lattice point within the returned distance is strictly closer.
        let near = m.enumerate_short_vectors(cv.dist2, Some(&x), &EnumOptions::default()).unwrap();
        for v in &near.entries {
            prop_assert!(v.norm2 >= cv.dist2 - 1e-9);
        }
        let rounded = m.babai_round(&x).unwrap();
        let d_round: f64 = rounded.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum();
        prop_assert!(cv.dist2 <= d_round + 1e-9);
    }

    #[test]
    fn enumeration_matches_box(rows in int_matrix(2, 2), r2 in 1.0f64..12.0) {
        let m = GeneratorMatrix::from_int_rows(&rows, 1).unwrap();
        let list = m.enumerate_short_vectors(r2, None, &EnumOptions::default()).unwrap();
        // Coefficients of points with ‖x‖² ≤ r2 are bounded by √r2·‖M⁻¹‖.
        let w = (r2.sqrt() * m.inverse().norm()).ceil() as i64 + 1;
        prop_assert_eq!(list.entries.len(), box_count(&m, w, r2));
    }

    #[test]
    fn interleaving_round_trip(rows in int_matrix(4, 2)) {
        let m = GeneratorMatrix::from_int_rows(&rows, 1).unwrap();
        let back = m.to_interleaved().unwrap().from_interleaved().unwrap();
        prop_assert_eq!(back.matrix(), m.matrix());
    }

    #[test]
    fn successive_minima_are_sorted(rows in int_matrix(3, 3)) {
        let m = GeneratorMatrix::from_int_rows(&rows, 1).unwrap();
        let l = m.successive_minima(&EnumOptions::default()).unwrap();
        prop_assert_eq!(l.len(), 3);
        prop_assert!(l.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        // Minkowski: λ₁ ≤ √n·det^{1/n}.
        prop_assert!(l[0] <= 3f64.sqrt() * m.abs_det().powf(1.0 / 3.0) + 1e-9);
    }
}
