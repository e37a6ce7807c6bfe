//! Randomized structural laws: transform round trips, norm axioms,
//! square-function sublinearity, and kernel self-similarity.

use std::f64::consts::PI;

use ndarray::Array3;
use proptest::prelude::*;

use fraclp::field::{lp_norm, GridSpec, ScalarField, SpaceTimeField};
use fraclp::kernel::{evaluate_many, KernelParams, Method};
use fraclp::spectral::{dft_forward, dft_inverse, semigroup_apply, Convention};
use fraclp::sqop::{square_function, PsiSpec, TimeQuadMesh};

fn spatial_field(d: usize, nx: usize, values: Vec<f64>) -> ScalarField {
    let spec = GridSpec::new(d, PI, nx, 1, 0.0, 1.0, 1).unwrap();
    ScalarField::new(spec, ndarray::Array1::from(values)).unwrap()
}

fn st_field(values: Vec<f64>) -> SpaceTimeField {
    let spec = GridSpec::new(1, PI, 16, 4, 0.0, 0.5, 2).unwrap();
    SpaceTimeField::new(spec.clone(), Array3::from_shape_vec((4, 16, 2), values).unwrap())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_round_trip_recovers_the_field(
        nx in prop::sample::select(vec![4usize, 8, 16]),
        d in 1usize..=2,
        seed_values in prop::collection::vec(-50.0f64..50.0, 256),
    ) {
        let n = nx.pow(d as u32);
        let g = spatial_field(d, nx, seed_values[..n].to_vec());
        let back = dft_inverse(&dft_forward(&g));
        let scale = g.values.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        for (a, b) in g.values.iter().zip(back.values.iter()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn lp_norms_satisfy_the_axioms(
        f_values in prop::collection::vec(-10.0f64..10.0, 128),
        g_values in prop::collection::vec(-10.0f64..10.0, 128),
        c in -5.0f64..5.0,
        p in prop::sample::select(vec![1.0f64, 2.0, 3.5]),
    ) {
        let f = st_field(f_values.clone());
        let g = st_field(g_values);
        let mut sum_values = f_values;
        for (s, gv) in sum_values.iter_mut().zip(g.values.iter()) {
            *s += gv;
        }
        let fg = st_field(sum_values);
        let nf = lp_norm(&f, p).unwrap();
        let ng = lp_norm(&g, p).unwrap();
        let nfg = lp_norm(&fg, p).unwrap();
        prop_assert!(nfg <= nf + ng + 1e-9 * (1.0 + nf + ng));

        let scaled = st_field(f.values.iter().map(|v| c * v).collect());
        let ns = lp_norm(&scaled, p).unwrap();
        prop_assert!((ns - c.abs() * nf).abs() <= 1e-11 * (1.0 + nf));
    }

    #[test]
    fn square_function_is_sublinear_and_homogeneous(
        f_values in prop::collection::vec(-5.0f64..5.0, 128),
        g_values in prop::collection::vec(-5.0f64..5.0, 128),
        alpha in prop::sample::select(vec![0.6f64, 1.0, 1.7]),
    ) {
        let f = st_field(f_values.clone());
        let g = st_field(g_values);
        let mut sum_values = f_values;
        for (s, gv) in sum_values.iter_mut().zip(g.values.iter()) {
            *s += gv;
        }
        let fg = st_field(sum_values);

        let psi = PsiSpec::PhiBeta { beta: 0.5 * alpha };
        let mesh = TimeQuadMesh::build(&f.spec, alpha, &psi).unwrap();
        let gf = square_function(&f, &psi, &mesh).unwrap();
        let gg = square_function(&g, &psi, &mesh).unwrap();
        let gfg = square_function(&fg, &psi, &mesh).unwrap();
        // each value is an L^2 norm over quadrature nodes, so Minkowski applies
        for ((a, b), c) in gf.values.iter().zip(gg.values.iter()).zip(gfg.values.iter()) {
            prop_assert!(*c <= a + b + 1e-9 * (1.0 + a + b));
        }

        let doubled = {
            let spec = f.spec.clone();
            SpaceTimeField::new(spec, f.values.mapv(|v| -2.0 * v)).unwrap()
        };
        let gd = square_function(&doubled, &psi, &mesh).unwrap();
        for (a, b) in gf.values.iter().zip(gd.values.iter()) {
            prop_assert!((2.0 * a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn square_function_ignores_channel_order(
        values in prop::collection::vec(-5.0f64..5.0, 128),
    ) {
        let f = st_field(values);
        let mut swapped_values = f.values.clone();
        swapped_values.invert_axis(ndarray::Axis(2));
        let swapped = SpaceTimeField::new(f.spec.clone(), swapped_values).unwrap();

        let psi = PsiSpec::PhiBeta { beta: 0.5 };
        let mesh = TimeQuadMesh::build(&f.spec, 1.0, &psi).unwrap();
        let a = square_function(&f, &psi, &mesh).unwrap();
        let b = square_function(&swapped, &psi, &mesh).unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            prop_assert!((x - y).abs() <= 1e-13 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn canonical_semigroup_composes(
        values in prop::collection::vec(-10.0f64..10.0, 32),
        s in 0.01f64..1.0,
        t in 0.01f64..1.0,
        alpha in prop::sample::select(vec![0.7f64, 1.0, 1.5, 2.0]),
    ) {
        let g = spatial_field(1, 32, values);
        let one = semigroup_apply(
            &semigroup_apply(&g, s, alpha, Convention::Canonical).unwrap(),
            t,
            alpha,
            Convention::Canonical,
        )
        .unwrap();
        let two = semigroup_apply(&g, s + t, alpha, Convention::Canonical).unwrap();
        let scale = g.values.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        for (a, b) in one.values.iter().zip(two.values.iter()) {
            prop_assert!((a - b).abs() <= 1e-11 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stable_kernels_are_positive_and_self_similar(
        alpha in 0.35f64..1.95,
        t in 0.5f64..3.0,
        r in 0.0f64..20.0,
    ) {
        let here = KernelParams::new(1, alpha, 0.0, t).unwrap();
        let unit = KernelParams::new(1, alpha, 0.0, 1.0).unwrap();
        let v_t = evaluate_many(&here, &[r], Method::Contour, None).unwrap()[0];
        prop_assert!(v_t.value > 0.0, "kernel value {} at r={r}", v_t.value);

        let lam = t.powf(-1.0 / alpha);
        let v_1 = evaluate_many(&unit, &[lam * r], Method::Contour, None).unwrap()[0];
        let scaled = lam * v_1.value;
        let tol = 1e-9 * scaled.abs() + 3.0 * (v_t.err_estimate + lam * v_1.err_estimate);
        prop_assert!(
            (v_t.value - scaled).abs() <= tol,
            "self-similarity gap {} vs tol {tol}",
            (v_t.value - scaled).abs()
        );
    }
}
