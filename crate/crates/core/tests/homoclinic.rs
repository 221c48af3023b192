use std::sync::OnceLock;

use dnls_core::homoclinic::{
    det_curve_fit, multistart_search, newton_match, normalized_transversality_det,
    scan_parameters, symmetric_search, transversality_det, HomoclinicSolution, NewtonOptions,
    ScanOptions,
};
use dnls_core::lattice::{nonwandering_bound, SymmetryId};
use dnls_core::manifold::{compute_pair, ManifoldSeries, ScalingPolicy};
use dnls_core::ModelParams;

const REFERENCE: [f64; 4] = [9.23324715725e-3, 1.32738452775e-2, 1.32738452775e-2, 9.23324715725e-3];

fn illustrative() -> ModelParams {
    ModelParams::new(0.0004, -0.125).unwrap()
}

fn pair() -> &'static (ManifoldSeries, ManifoldSeries) {
    static P: OnceLock<(ManifoldSeries, ManifoldSeries)> = OnceLock::new();
    P.get_or_init(|| compute_pair(illustrative(), 80, ScalingPolicy::default()).unwrap())
}

fn reference_solution() -> &'static HomoclinicSolution {
    static S: OnceLock<HomoclinicSolution> = OnceLock::new();
    S.get_or_init(|| {
        let (pu, ps) = pair();
        let sols = symmetric_search(pu, ps, &NewtonOptions::default(), 21).unwrap();
        sols.into_iter().find(|s| hits_reference(s)).expect("reference point not found")
    })
}

fn hits_reference(s: &HomoclinicSolution) -> bool {
    s.point.to_array().iter().zip(REFERENCE).all(|(x, y)| (x - y).abs() <= 1e-8)
}

#[test]
fn symmetric_point_matches_reference() {
    let s = reference_solution();
    assert!(s.residual <= 1e-10, "{:e}", s.residual);
    assert!(s.is_symmetric(1e-10));
    let p = s.point;
    assert!((p.x - p.w).abs() <= 1e-10 && (p.y - p.z).abs() <= 1e-10);
    assert!(transversality_det(&pair().0, &pair().1, s.parameters()) != 0.0);
}

#[test]
fn newton_cross_validates_symmetric_search() {
    let (pu, ps) = pair();
    let s = reference_solution();
    let q = s.parameters();
    let guess = [q[0] * 1.02, q[1] * 0.98, q[2] * 0.99, q[3] * 1.01];
    let n = newton_match(pu, ps, guess, &NewtonOptions::default()).unwrap();
    assert!(hits_reference(&n));
    assert!(n.residual <= 1e-12);
    assert!((n.residual - s.residual).abs() <= 1e-12);
    assert!(n.point.distance(s.point) <= 1e-10);
}

#[test]
fn zero_guess_is_the_trivial_solution() {
    let (pu, ps) = pair();
    assert!(newton_match(pu, ps, [0.0; 4], &NewtonOptions::default()).is_err());
}

#[test]
fn reflections_are_accepted() {
    let (pu, ps) = pair();
    let s = reference_solution();
    for sym in [SymmetryId::Sigma4, SymmetryId::Sigma5] {
        let r = s.reflect(pu, ps, sym).unwrap();
        assert!(r.residual <= 1e-10, "{sym:?}");
        let image = sym.apply4(s.point).unwrap();
        assert!(r.point.distance(image) <= 1e-10, "{sym:?}");
    }
    assert!(s.reflect(pu, ps, SymmetryId::Sigma1).is_err());
}

#[test]
fn multistart_contains_reference_and_stays_in_box() {
    let (pu, ps) = pair();
    let sols = multistart_search(pu, ps, &NewtonOptions::default(), 11).unwrap();
    assert!(sols.iter().any(hits_reference));
    let bound = nonwandering_bound(illustrative(), 4).unwrap();
    for s in &sols {
        assert!(s.residual < 1e-10);
        assert!(s.point.norm_inf() <= bound);
    }
    // distinct in image space
    for (i, a) in sols.iter().enumerate() {
        for b in &sols[i + 1..] {
            assert!(a.point.distance(b.point) > 1e-8);
        }
    }
}

#[test]
fn negative_epsilon_has_no_homoclinics() {
    for a in [-0.145, -0.125] {
        let (pu, ps) = compute_pair(ModelParams::new(-0.5, a).unwrap(), 40, ScalingPolicy::default()).unwrap();
        let opts = NewtonOptions::default();
        assert!(symmetric_search(&pu, &ps, &opts, 11).unwrap().is_empty(), "A={a}");
        assert!(multistart_search(&pu, &ps, &opts, 7).unwrap().is_empty(), "A={a}");
    }
}

#[test]
fn determinant_properties() {
    let (pu, ps) = pair();
    let q = reference_solution().parameters();
    let (u, v) = (q[0], q[1]);
    assert_eq!(transversality_det(pu, pu, [u, v, u, v]), 0.0);

    let d = transversality_det(pu, ps, q);
    let nd = normalized_transversality_det(pu, ps, q);
    assert!(nd.abs() <= 1.0 && nd.signum() == d.signum());
    for t in [0.5, 0.9, 1.7] {
        let (gu, gs) = (pu.regauged([t, t]), ps.regauged([t, t]));
        let dq = transversality_det(&gu, &gs, [u / t, v / t, q[2] / t, q[3] / t]);
        assert_eq!(dq.signum(), d.signum(), "t={t}");
        // each tangent row scales by t
        assert!((dq - t.powi(4) * d).abs() <= 1e-8 * dq.abs(), "t={t}: {dq} vs {d}");
    }
}

#[test]
fn scan_residuals_fall_with_epsilon() {
    let eps = [0.0004, 0.01, 0.1, 1.0];
    let a = [-0.145, -0.13, -0.115];
    let opts = ScanOptions { workers: Some(1), seeds: 11, ..Default::default() };
    let table = scan_parameters(&eps, &a, &opts).unwrap();
    for &x in &a {
        let res: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let c = table.cell(e, x).unwrap();
                assert!(c.found, "eps={e} A={x}");
                c.solution.as_ref().unwrap().residual
            })
            .collect();
        let min = res.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(res[0], min, "A={x}: {res:?}");
    }
    let neg = scan_parameters(&[-0.5, -0.1], &[-0.13], &opts).unwrap();
    assert!(neg.cells.iter().all(|c| !c.found));
}

fn t_poly(a: f64) -> f64 {
    0.009737 + a * (0.3682 + a * (5.272 + a * (33.74 + a * 80.64)))
}

#[test]
fn fitter_recovers_printed_quartic() {
    let a: Vec<f64> = (0..31).map(|k| -0.145 + 0.001 * k as f64).collect();
    let d: Vec<f64> = a.iter().map(|&x| t_poly(x)).collect();
    let fit = det_curve_fit(&a, &d, 4).unwrap();
    for (c, e) in fit.coefficients.iter().zip([0.009737, 0.3682, 5.272, 33.74, 80.64]) {
        assert!((c - e).abs() <= 1e-6, "{c} vs {e}");
    }
    let want = [-0.146292, -0.0891431];
    for w in want {
        assert!(fit.real_roots.iter().any(|r| (r - w).abs() <= 1e-5), "{w} not in {:?}", fit.real_roots);
    }
    assert!(!fit.ill_conditioned);
}

#[test]
fn fitter_edge_cases() {
    let a: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
    let fit = det_curve_fit(&a, &vec![3.0; 10], 3).unwrap();
    assert!((fit.coefficients[0] - 3.0).abs() <= 1e-12);
    assert!(fit.coefficients[1..].iter().all(|c| c.abs() <= 1e-10));
    assert!(det_curve_fit(&a[..3], &[1.0; 3], 3).is_err());
    assert!(det_curve_fit(&a, &[1.0; 9], 2).is_err());
}
