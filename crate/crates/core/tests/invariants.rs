use proptest::prelude::*;

use ptlab_core::hermite::project;
use ptlab_core::operator::{build_hamiltonian, hermitian_part, position_power, pt_symmetry_defect};
use ptlab_core::pseudospectrum::{sweep_grid, Window};
use ptlab_core::resolvent::{resolvent_norm, smallest_singular_value, vector_residual, InverseIterationOptions};
use ptlab_core::scaling::{unscale_pseudomode, ScalingParams};
use ptlab_core::spectral::eigensystem;
use ptlab_core::wkb::ladder::certified_mode;
use ptlab_core::wkb::LadderOptions;
use ptlab_core::{Complex64, Error, PotentialSpec};

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(32) })]

    #[test]
    fn assembled_matrices_are_pt_symmetric(beta in -3.0f64..3.0, n in 1u32..4, extra in 0usize..60) {
        let dim = 2 * n as usize + 2 + extra;
        let a = build_hamiltonian(&PotentialSpec::new(beta, n).unwrap(), dim).unwrap();
        prop_assert_eq!(pt_symmetry_defect(&a), 0.0);
        prop_assert!(a.effective_bandwidth() <= (2 * n + 1) as usize);
        for (r, c, v) in hermitian_part(&a).entries() {
            let expect = if r == c { (2 * r + 1) as f64 } else { 0.0 };
            prop_assert_eq!(v, Complex64::new(expect, 0.0));
        }
    }

    #[test]
    fn padded_power_matches_larger_product(n in 1u32..4, dim in 1usize..50) {
        let p = 2 * n + 1;
        let padded = position_power(dim, p, p as usize);
        let reference = position_power(dim, p, 10 + p as usize);
        for (r, c, v) in padded.entries() {
            prop_assert_eq!(v, reference.get(r, c));
        }
    }

    #[test]
    fn inverse_singular_values_are_one_lipschitz(re0 in -2.0f64..15.0, im0 in -6.0f64..6.0, beta in 0.0f64..2.0) {
        let a = build_hamiltonian(&PotentialSpec::new(beta, 1).unwrap(), 60).unwrap();
        let w = Window { re_min: re0, re_max: re0 + 1.3, im_min: im0, im_max: im0 + 0.9, nx: 5, ny: 4 };
        let g = sweep_grid(&a, &w).unwrap();
        prop_assert_eq!(g.lipschitz_violations(), 0);
    }
}

#[test]
fn smin_near_eigenvalues_scales_with_projection_norm() {
    let a = build_hamiltonian(&PotentialSpec::cubic(), 200).unwrap();
    let es = eigensystem(&a, 3).unwrap();
    let opts = InverseIterationOptions::default();
    for k in 0..3 {
        for theta in [0.3f64, 2.0] {
            let lam = es.eigenvalues[k] + Complex64::from_polar(1e-4, theta);
            let s = smallest_singular_value(&a, lam, &opts).unwrap().s_min;
            let predicted = 1e-4 / es.projection_norms[k];
            assert!((s / predicted - 1.0).abs() < 0.01, "k={k} s={s} predicted={predicted}");
        }
    }
}

#[test]
fn left_half_plane_resolvent_is_bounded() {
    let a = build_hamiltonian(&PotentialSpec::cubic(), 120).unwrap();
    for lam in [Complex64::new(-1.0, 0.0), Complex64::new(-0.5, 7.0), Complex64::new(-3.0, -2.0)] {
        assert!(resolvent_norm(&a, lam).unwrap() <= 1.0 / lam.re.abs() * (1.0 + 1e-10));
    }
}

#[test]
fn unscaled_pseudomode_is_a_matrix_pseudomode() {
    let spec = PotentialSpec::cubic();
    let lam = Complex64::new(2.0, 1.0);
    for (h, dim) in [(0.05, 300usize), (0.03, 400)] {
        let mode = certified_mode(lam, h, &spec, &LadderOptions::default(), true).unwrap();
        let params = ScalingParams::from_h(h, 1).unwrap();
        let un = unscale_pseudomode(&mode, &params).unwrap();
        assert!((un.samples.l2_norm() / mode.samples.l2_norm() - 1.0).abs() < 1e-10);
        assert!((un.lambda_phys - lam * params.tau.powi(3)).norm() < 1e-9 * un.lambda_phys.norm());
        let a = build_hamiltonian(&spec, dim).unwrap();
        let v = project(&un.samples, dim);
        let r = vector_residual(&a, un.lambda_phys, &v);
        let s = match smallest_singular_value(&a, un.lambda_phys, &InverseIterationOptions::default()) {
            Ok(e) => e.s_min,
            Err(Error::AtEigenvalue(_)) => 0.0,
            Err(e) => panic!("{e}"),
        };
        println!("h={h} residual_phys={:.4e} vector={:.4e} s_min={:.4e}", un.residual_phys, r, s);
        assert!(s <= r * (1.0 + 1e-9));
        assert!(r <= 10.0 * un.residual_phys && un.residual_phys <= 10.0 * r);
    }
}
