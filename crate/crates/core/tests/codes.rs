use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use gkplat_core::code::{symplectic_defect, CosetSystem, GkpCode};
use gkplat_core::constructions::registry;
use gkplat_core::exact::ExactMatrix;
use gkplat_core::lattice::{symplectic_product, EnumOptions, GeneratorMatrix};
use gkplat_core::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-8
}

fn code(name: &str) -> GkpCode {
    registry::code(name).unwrap()
}

fn diag_code(d: &[f64]) -> GkpCode {
    let n = d.len();
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { d[i % n].sqrt() } else { 0.0 });
    GkpCode::validate("diag", GeneratorMatrix::new(m).unwrap()).unwrap()
}

#[test]
fn registry_parameters() {
    let expected = [
        ("square", 1, 2),
        ("hexagonal", 1, 2),
        ("sensor", 1, 1),
        ("rep2", 2, 2),
        ("rep3", 3, 2),
        ("surface17", 9, 2),
        ("d4", 2, 4),
    ];
    for (name, n, d) in expected {
        let c = code(name);
        assert_eq!(c.n_modes(), n, "{name}");
        assert_eq!(c.logical_dim(), d, "{name}");
        assert!(close(c.generator().abs_det(), d as f64), "{name}: |det M| = d");
        assert_eq!(c.cosets().order(), d * d, "{name}: |L⊥/L| = d²");
    }
}

#[test]
fn validation_examples() {
    let hex = code("hexagonal");
    assert_eq!(hex.symplectic_gram_i64(), &[vec![0, 2], vec![-2, 0]]);
    let odd = GeneratorMatrix::from_rows(&[vec![3f64.sqrt(), 0.0], vec![0.0, 3f64.sqrt()]]).unwrap();
    assert_eq!(GkpCode::validate("qutrit", odd).unwrap().logical_dim(), 3);
    let bad = GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.5]]).unwrap();
    assert!(matches!(GkpCode::validate("bad", bad), Err(Error::NonIntegralSymplecticGram { .. })));
}

#[test]
fn sensor_phases() {
    let s = code("sensor");
    assert_eq!(s.phase_sector(&[1.0, 0.0]).unwrap(), 0.0);
    assert_eq!(s.phase_sector(&[0.0, 1.0]).unwrap(), 0.0);
    assert_eq!(s.phase_sector(&[1.0, 1.0]).unwrap(), PI);
    assert_eq!(s.phase_sector(&[2.0, 2.0]).unwrap(), 0.0);
    assert!(matches!(s.phase_sector(&[0.5, 0.0]), Err(Error::NotInLattice)));
}

#[test]
fn square_cosets() {
    let sq = code("square");
    let x = sq.coset_label(&[FRAC_1_SQRT_2, 0.0]).unwrap();
    let p = sq.coset_label(&[0.0, FRAC_1_SQRT_2]).unwrap();
    assert!(!CosetSystem::is_zero(&x) && !CosetSystem::is_zero(&p));
    assert_ne!(x, p);
    assert_eq!(sq.cosets().orders(), &[2, 2]);
    assert!(CosetSystem::is_zero(&sq.coset_label(&[SQRT_2, 0.0]).unwrap()));
    assert!(matches!(sq.coset_label(&[0.3, 0.0]), Err(Error::NotInDualLattice)));
}

#[test]
fn coset_representatives_round_trip() {
    for name in registry::CODE_NAMES {
        let c = code(name);
        for label in c.cosets().labels() {
            let rep = c.coset_representative(&label);
            assert_eq!(c.coset_label(&rep).unwrap(), label, "{name}");
        }
    }
}

#[test]
fn standard_forms() {
    assert_eq!(code("square").standard_form().unwrap().d, vec![2]);
    assert_eq!(code("hexagonal").standard_form().unwrap().d, vec![2]);
    assert_eq!(diag_code(&[4.0, 1.0]).standard_form().unwrap().d, vec![4, 1]);
    assert_eq!(diag_code(&[1.0, 4.0]).standard_form().unwrap().d, vec![4, 1]);
    assert_eq!(diag_code(&[2.0, 2.0]).standard_form().unwrap().d, vec![2, 2]);
    let s17 = code("surface17").standard_form().unwrap();
    assert_eq!(s17.d, [vec![2], vec![1; 8]].concat());
    // (U M) J (U M)ᵀ = J₂ ⊗ D
    for name in registry::CODE_NAMES {
        let c = code(name);
        let sf = c.standard_form().unwrap();
        let n = c.n_modes();
        let a = sf.basis.symplectic_gram().unwrap();
        let want = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if j == i + n {
                sf.d[i] as f64
            } else if i == j + n {
                -(sf.d[j] as f64)
            } else {
                0.0
            }
        });
        assert!((a - want).amax() < 1e-9, "{name}");
    }
}

#[test]
fn equivalence_with_itself_and_normal_form() {
    let hex = code("hexagonal");
    let eq = hex.symplectically_equivalent(&hex).unwrap().unwrap();
    assert!(symplectic_defect(&eq.r) < 1e-9);
    let s17 = code("surface17");
    let nf = s17.normal_form_code().unwrap();
    let mut want = vec![1.0; 18];
    want[0] = SQRT_2;
    want[9] = SQRT_2;
    let got: Vec<f64> = (0..18).map(|i| nf.generator().matrix()[(i, i)]).collect();
    assert!(got.iter().zip(&want).all(|(a, b)| close(*a, *b)), "{got:?}");
    let d22 = diag_code(&[2.0, 2.0]).normal_form_code().unwrap();
    assert!(d22.generator().same_lattice(diag_code(&[2.0, 2.0]).generator()).unwrap());
    assert!(matches!(
        code("square").symplectically_equivalent(&code("rep2")),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn distances() {
    assert!(close(code("square").distance().unwrap().delta, FRAC_1_SQRT_2));
    assert!(close(code("hexagonal").distance().unwrap().delta, 3f64.powf(-0.25)));
    let s17 = code("surface17");
    let d = s17.distance().unwrap();
    assert!(close(d.delta, 1.5f64.sqrt()));
    assert!(!s17.is_stabilizer(&d.witness).unwrap());
    assert!(matches!(code("sensor").distance(), Err(Error::TrivialCode)));
}

#[test]
fn scaled_distances_follow_seed_minimum() {
    for seed in ["square", "hexagonal"] {
        let m0 = registry::seed(seed).unwrap();
        let l1 = m0.successive_minima(&EnumOptions::default()).unwrap()[0];
        for lambda in [2u64, 4] {
            let c = gkplat_core::constructions::scaled_code(seed, &m0, lambda, false).unwrap();
            assert!(close(c.distance().unwrap().delta, l1 / (lambda as f64).sqrt()), "{seed} λ={lambda}");
        }
    }
}

#[test]
fn css_structure() {
    let (mq, mp) = code("square").css_split().unwrap().unwrap();
    assert!(close(mq.matrix()[(0, 0)].abs(), SQRT_2) && close(mp.matrix()[(0, 0)].abs(), SQRT_2));
    let (dq, dp) = code("square").css_distances().unwrap();
    assert!(close(dq, FRAC_1_SQRT_2) && close(dp, FRAC_1_SQRT_2));
    let (dq, dp) = code("surface17").css_distances().unwrap();
    assert!(close(dq, 1.5f64.sqrt()) && close(dp, 1.5f64.sqrt()));
    let (dq, dp) = code("rep2").css_distances().unwrap();
    assert!(close(dq, 1.0) && close(dp, FRAC_1_SQRT_2));
    // A mixed row (q₁ + p₂)·√2 breaks the q/p block structure.
    let mixed = GeneratorMatrix::from_int_rows(
        &[vec![1, 0, 0, 1], vec![0, 2, 0, 0], vec![0, 0, 2, 0], vec![0, 0, 0, 2]],
        2,
    )
    .unwrap();
    let mixed = GkpCode::validate("mixed", mixed).unwrap();
    assert!(mixed.css_split().unwrap().is_none());
    assert!(matches!(mixed.css_distances(), Err(Error::NotCss)));
}

#[test]
fn squeezed_css_distances() {
    let eta = 1.7;
    let sq = code("square").squeezed(eta).unwrap();
    let (dq, dp) = sq.css_distances().unwrap();
    assert!(close(dq, FRAC_1_SQRT_2 / eta) && close(dp, FRAC_1_SQRT_2 * eta), "{dq} {dp}");
}

#[test]
fn bound_report_examples() {
    let sq = code("square").bounds_report(None).unwrap();
    assert!(close(sq.k, 1.0) && close(sq.c, SQRT_2));
    let had = sq.check("hadamard").unwrap();
    assert!(close(had.rhs, 1.0) && had.holds);
    assert!(close(sq.lambda1 * sq.lambda_2n_dual, 1.0));
    assert!(close(sq.squeezing_bound.unwrap(), FRAC_1_SQRT_2));

    let hex = code("hexagonal").bounds_report(None).unwrap();
    let lemma = hex.check("lemma1").unwrap();
    assert!(close(lemma.lhs, lemma.rhs));
    assert!(hex.squeezing_bound.unwrap() >= 3f64.powf(-0.25) - 1e-9);

    let s17 = code("surface17").bounds_report(None).unwrap();
    assert!(close(s17.lambda1, 1.0) && close(s17.lambda1_dual, 1.0));
    assert!(s17.check("lemma1").unwrap().slack() > 0.2);
    assert!(s17.squeezing_bound.unwrap() >= 1.5f64.sqrt());
    assert!(s17.all_hold());

    let sensor = code("sensor").bounds_report(None).unwrap();
    assert!(sensor.check("lemma1").unwrap().vacuous && sensor.all_hold());
}

#[test]
fn bounds_reject_foreign_basis() {
    let other = code("hexagonal");
    assert!(code("square").bounds_report(Some(other.generator())).is_err());
}

/// Shortest nontrivial coset element over an explicit ball of `L⊥`.
fn brute_distance(c: &GkpCode) -> f64 {
    let l1 = c.dual().successive_minima(&EnumOptions::default()).unwrap()[0];
    let r = 3.0 * l1;
    let list = c.dual().enumerate_short_vectors(r * r, None, &EnumOptions::default()).unwrap();
    list.entries
        .iter()
        .filter(|v| v.norm2 > 1e-12)
        .filter(|v| !CosetSystem::is_zero(&c.cosets().label_of_coeffs(&v.coeffs)))
        .map(|v| v.norm2.sqrt())
        .fold(f64::INFINITY, f64::min)
}

fn unimodular(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..dim, 0..dim, -2i64..=2), 1..10).prop_map(move |ops| {
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

fn random_code() -> impl Strategy<Value = GkpCode> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 4)
        .prop_filter_map("need 2 ≤ |det| ≤ 4", |rows| {
            let m = GeneratorMatrix::from_int_rows(&rows, 1).ok()?;
            let det = m.abs_det().round() as i64;
            (2..=4).contains(&det).then(|| GkpCode::validate("random", m).unwrap())
        })
}

/// A symplectic matrix built from shears and a squeeze.
fn symplectic() -> impl Strategy<Value = DMatrix<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, 0.5f64..2.0).prop_map(|(a, b, s)| {
        let shear_q = DMatrix::from_row_slice(4, 4, &[1.0, 0.0, a, b, 0.0, 1.0, b, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let squeeze = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![s, 1.0, 1.0 / s, 1.0]));
        shear_q * squeeze
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_is_basis_invariant(c in random_code(), u in unimodular(4)) {
        let rebased = c.generator().rebased(&ExactMatrix::from_i64_rows(&u)).unwrap();
        let c2 = GkpCode::validate("rebased", rebased).unwrap();
        prop_assert_eq!(c.standard_form().unwrap().d, c2.standard_form().unwrap().d);
        prop_assert!(c.symplectically_equivalent(&c2).unwrap().is_some());
    }

    #[test]
    fn distance_matches_brute_force(c in random_code()) {
        let d = c.distance().unwrap().delta;
        prop_assert!((d - brute_distance(&c)).abs() < 1e-9);
    }

    #[test]
    fn labels_form_a_homomorphism(c in random_code(), a in prop::collection::vec(-3i64..=3, 4), b in prop::collection::vec(-3i64..=3, 4)) {
        let x = c.dual().combine(&a);
        let y = c.dual().combine(&b);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        let lx = c.coset_label(&x).unwrap();
        let ly = c.coset_label(&y).unwrap();
        prop_assert_eq!(c.coset_label(&xy).unwrap(), c.cosets().add(&lx, &ly));
        // Shifting by a stabilizer leaves the label alone.
        let s = c.generator().combine(&b);
        let xs: Vec<f64> = x.iter().zip(&s).map(|(p, q)| p + q).collect();
        prop_assert_eq!(c.coset_label(&xs).unwrap(), lx);
    }

    #[test]
    fn phase_composition(c in random_code(), a in prop::collection::vec(-2i64..=2, 4), b in prop::collection::vec(-2i64..=2, 4)) {
        let x = c.generator().combine(&a);
        let y = c.generator().combine(&b);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        let lhs = c.phase_sector(&xy).unwrap();
        let rhs = c.phase_sector(&x).unwrap() + c.phase_sector(&y).unwrap() + PI * symplectic_product(&x, &y);
        let diff = (lhs - rhs).rem_euclid(2.0 * PI);
        prop_assert!(diff < 1e-6 || (2.0 * PI - diff) < 1e-6, "lhs {} rhs {}", lhs, rhs);
    }

    #[test]
    fn symplectic_maps_preserve_d_and_standard_form(c in random_code(), s in symplectic()) {
        let t = c.transformed(&s, "moved").unwrap();
        prop_assert_eq!(t.logical_dim(), c.logical_dim());
        prop_assert_eq!(t.standard_form().unwrap().d, c.standard_form().unwrap().d);
        prop_assert!(t.bounds_report(None).unwrap().all_hold());
    }
}
