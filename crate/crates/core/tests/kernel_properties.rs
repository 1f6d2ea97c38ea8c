use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphere_tps::fit::{assemble, FitProblem, PointSet};
use sphere_tps::kernel::{k_closed, kernel, singular_at_one};
use sphere_tps::quadrature::integrate;
use sphere_tps::{EvalMethod, KernelSpec, SeriesControl, TrendBasis};

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

#[test]
fn zero_mean_on_the_sphere() {
    // int_0^pi k(cos t) sin(t)^(d-2) dt = 0: the degree-0 coefficient is absent
    for (d, m) in [
        (2, 1),
        (2, 3),
        (3, 1),
        (3, 2),
        (3, 3),
        (4, 1),
        (4, 2),
        (5, 2),
        (6, 1),
        (7, 1),
    ] {
        let f = |t: f64| k_closed(d, m, t.cos()).unwrap() * t.sin().powi(d as i32 - 2);
        // for d >= 3 the dropped piece near t = 0 is O(eps^2 |ln eps|)
        let eps = if singular_at_one(d, m) { 2e-6 } else { 0.0 };
        let res = integrate(f, &[eps, 0.1, 0.5, PI / 2.0, PI], 1e-12, 1e-12).unwrap();
        assert!(res.value.abs() <= 1e-9, "({d},{m}): {}", res.value);
    }
}

#[test]
fn symmetric_two_point_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in [2, 3, 4, 7] {
        let spec = KernelSpec::new(d, d.div_ceil(2) + 1, 0).unwrap();
        for _ in 0..10 {
            let (x, y) = (random_unit(&mut rng, d), random_unit(&mut rng, d));
            assert_eq!(
                kernel(&spec, &x, &y).unwrap(),
                kernel(&spec, &y, &x).unwrap()
            );
        }
    }
}

fn quadratic_form(k: &nalgebra::DMatrix<f64>, c: &[f64]) -> f64 {
    let mut q = 0.0;
    for i in 0..c.len() {
        for j in 0..c.len() {
            q += c[i] * k[(i, j)] * c[j];
        }
    }
    q
}

#[test]
fn strictly_conditionally_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (d, m, ell) in [
        (2, 1, 0),
        (2, 2, 0),
        (3, 2, 0),
        (4, 2, 0),
        (3, 2, 1),
        (3, 3, 2),
        (6, 4, 0),
    ] {
        let spec = KernelSpec::new(d, m, ell).unwrap();
        let basis = TrendBasis::new(d, ell).unwrap();
        for _ in 0..20 {
            let n = basis.dim() + rng.gen_range(1..=15);
            let pts = PointSet::new(d, (0..n).map(|_| random_unit(&mut rng, d)).collect()).unwrap();
            let asm = assemble(&FitProblem::interpolation(spec, pts, vec![0.0; n])).unwrap();
            // project a random vector onto the null space of C_X
            let c0 = nalgebra::DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.0..1.0)));
            let ct = asm.cx.transpose();
            let qr = ct.clone().qr();
            let q = qr.q();
            let c = &c0 - &q * (q.transpose() * &c0);
            assert!((&asm.cx * &c).amax() <= 1e-12);
            let form = quadratic_form(&asm.kx, c.as_slice());
            assert!(form > 0.0, "({d},{m},{ell}) n={n}: {form}");
        }
    }
}

#[test]
fn series_controls_report_usage() {
    let spec = KernelSpec::new(3, 2, 0)
        .unwrap()
        .with_method(EvalMethod::Series);
    let mut ctl = SeriesControl::new(1e-8);
    spec.eval_with(0.3, &mut ctl).unwrap();
    assert!(ctl.used_terms > 0 && ctl.tail_estimate <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_matches_series(xi in -1.0f64..0.95, pick in 0usize..10) {
        let (d, m) = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (5, 1)][pick];
        let spec = KernelSpec::new(d, m, 0).unwrap().with_method(EvalMethod::Series);
        let s = spec.eval_with(xi, &mut SeriesControl::new(1e-10)).unwrap();
        let c = k_closed(d, m, xi).unwrap();
        prop_assert!((s - c).abs() <= 1e-8, "({d},{m}) xi={xi}: {s} vs {c}");
    }

    #[test]
    fn shifted_kernel_drops_low_degrees(xi in -1.0f64..1.0) {
        // k_{3,2,0} - k_{3,2,1} = 3 xi / 4
        let s0 = KernelSpec::new(3, 2, 0).unwrap().with_method(EvalMethod::Series).eval_with(xi, &mut SeriesControl::new(1e-11)).unwrap();
        let s1 = KernelSpec::new(3, 2, 1).unwrap().eval_with(xi, &mut SeriesControl::new(1e-11)).unwrap();
        prop_assert!((s0 - s1 - 0.75 * xi).abs() <= 1e-9);
    }
}
