use std::sync::OnceLock;

use dnls_core::lattice::{LatticeMap, Map4, SymmetryId};
use dnls_core::manifold::{
    block_residuals, compute_manifold, compute_pair, cubic_convolution, solve_order_block,
    tri_index, tri_len, Branch, EvalBox, ManifoldSeries, ScalingPolicy,
};
use dnls_core::spectral::{origin_eigensystem, vandermonde_unit};
use dnls_core::{ModelParams, State4};

fn illustrative() -> ModelParams {
    ModelParams::new(0.0004, -0.125).unwrap()
}

fn pair() -> &'static (ManifoldSeries, ManifoldSeries) {
    static P: OnceLock<(ManifoldSeries, ManifoldSeries)> = OnceLock::new();
    P.get_or_init(|| compute_pair(illustrative(), 80, ScalingPolicy::default()).unwrap())
}

#[test]
fn convolution_examples() {
    let order = 6;
    let zeros = vec![0.0; tri_len(order)];
    assert_eq!(cubic_convolution(&zeros, 3, 2), 0.0);

    let mut lin = vec![0.0; tri_len(order)];
    lin[tri_index(1, 0)] = 0.7;
    lin[tri_index(0, 1)] = -1.3;
    for (n, m) in [(2, 0), (1, 1), (0, 2)] {
        assert_eq!(cubic_convolution(&lin, n, m), 0.0);
    }

    let mut u = vec![0.0; tri_len(order)];
    u[tri_index(1, 0)] = 1.0;
    for n in 0..=order {
        for m in 0..=order - n {
            let expect = if (n, m) == (3, 0) { 1.0 } else { 0.0 };
            assert_eq!(cubic_convolution(&u, n, m), expect, "({n}, {m})");
        }
    }

    // (u + v)^3 has binomial coefficients
    let mut uv = vec![0.0; tri_len(order)];
    uv[tri_index(1, 0)] = 1.0;
    uv[tri_index(0, 1)] = 1.0;
    let got: Vec<f64> = (0..=3).map(|m| cubic_convolution(&uv, 3 - m, m)).collect();
    assert_eq!(got, vec![1.0, 3.0, 3.0, 1.0]);
}

#[test]
fn blocks_satisfy_their_equations() {
    let p = illustrative();
    for (rate, forcing) in [(0.3, 1.5), (0.05, -2.0), (4.0, 0.25), (7.5, 1e3)] {
        let block = solve_order_block(rate, p.a, forcing, 3, 2).unwrap();
        let r = block_residuals(rate, p.a, forcing, block);
        assert!(r.iter().all(|x| x.abs() <= 1e-12 * (1.0 + forcing.abs())), "{r:?}");
    }
}

#[test]
fn structure_of_the_series() {
    let (pu, ps) = pair();
    let es = origin_eigensystem(illustrative()).unwrap();
    let l1 = es.eigenvalues[0].re;
    let l2 = es.eigenvalues[1].re;
    assert_eq!(ps.rates, [l1, l2]);
    assert_eq!(pu.rates, [1.0 / l1, 1.0 / l2]);
    for s in [pu, ps] {
        assert_eq!(s.coeff(0, 0), [0.0; 4]);
        for (i, (n, m)) in [(1, 0), (0, 1)].into_iter().enumerate() {
            let w = vandermonde_unit(num_complex::Complex64::new(s.rates[i], 0.0));
            let b = s.coeff(n, m);
            for k in 0..4 {
                assert!((b[k] - s.scale[i] * w[k].re).abs() <= 1e-15 * s.scale[i]);
            }
        }
        for n in 0..=80usize {
            for m in 0..=80 - n {
                let b = s.coeff(n, m);
                let r = s.rates[0].powi(n as i32) * s.rates[1].powi(m as i32);
                let big = b.iter().fold(0.0f64, |x, y| x.max(y.abs()));
                assert!((b[1] - r * b[0]).abs() <= 1e-12 * big.max(1e-300));
                assert!((b[2] - r * b[1]).abs() <= 1e-12 * big.max(1e-300));
                assert!((b[3] - r * b[2]).abs() <= 1e-12 * big.max(1e-300));
            }
        }
    }
}

#[test]
fn conjugacy_on_the_unit_box() {
    let (pu, ps) = pair();
    let bx = EvalBox::default();
    assert!(ps.conjugacy_residual(bx, 41).unwrap() <= 1e-9);
    assert!(pu.conjugacy_residual(bx, 41).unwrap() <= 1e-9);
    assert!(pu.inverse_conjugacy_residual(bx, 41).unwrap() <= 1e-9);
    assert_eq!(ps.evaluate(0.0, 0.0), State4::ORIGIN);
}

#[test]
fn linear_series() {
    let (_, ps) = pair();
    let lin = compute_manifold(illustrative(), Branch::Stable, 1, ScalingPolicy::Fixed { gamma: ps.scale }).unwrap();
    assert_eq!(lin.coeff(1, 0), ps.coeff(1, 0));
    assert_eq!(lin.coeff(0, 1), ps.coeff(0, 1));
    assert_eq!(lin.coeff(3, 0), [0.0; 4]);
    let (u, v) = (0.3, -0.7);
    let e = lin.evaluate(u, v).to_array();
    for k in 0..4 {
        assert!((e[k] - (u * ps.coeff(1, 0)[k] + v * ps.coeff(0, 1)[k])).abs() <= 1e-17);
    }
    assert!(lin.conjugacy_residual(EvalBox::default(), 41).unwrap() > 0.0);
    // the default gauge also works at order 1
    assert!(compute_manifold(illustrative(), Branch::Stable, 1, ScalingPolicy::default()).is_ok());
}

#[test]
fn residual_falls_with_order() {
    let (_, ps) = pair();
    let policy = ScalingPolicy::Fixed { gamma: ps.scale };
    let res: Vec<f64> = [5, 10, 20, 40, 80]
        .iter()
        .map(|&n| {
            compute_manifold(illustrative(), Branch::Stable, n, policy)
                .unwrap()
                .conjugacy_residual(EvalBox::default(), 41)
                .unwrap()
        })
        .collect();
    for w in res.windows(2) {
        assert!(w[1] <= w[0] || w[1] <= 1e-11, "{res:?}");
    }
    assert!(res[4] <= 1e-9);
}

#[test]
fn tangency_and_jacobian() {
    let (_, ps) = pair();
    let t0 = ps.coeff(1, 0);
    let d = |u: f64| {
        let e = ps.evaluate(u, 0.0).to_array();
        (0..4).map(|k| (e[k] - u * t0[k]).powi(2)).sum::<f64>().sqrt()
    };
    // the quadratic block vanishes, so the defect is cubic in u
    let r = d(1e-2) / d(2e-2);
    assert!((r - 0.125).abs() < 0.01, "{r}");

    let j = ps.jacobian(0.0, 0.0);
    for k in 0..4 {
        assert_eq!(j[(k, 0)], ps.coeff(1, 0)[k]);
        assert_eq!(j[(k, 1)], ps.coeff(0, 1)[k]);
    }
    for &(u, v) in &[(0.2, 0.3), (-0.5, 0.8), (0.9, -0.9)] {
        let j = ps.jacobian(u, v);
        let sv = j.singular_values();
        assert!(sv.min() > 1e-10 * sv.max(), "rank-deficient at ({u}, {v})");
    }
}

#[test]
fn symmetry_transport_on_grid() {
    let (pu, ps) = pair();
    let m = Map4::new(illustrative()).unwrap();
    let [r1, r2] = ps.rates;
    let s5 = |s: State4| SymmetryId::Sigma5.apply4(s).unwrap();
    let neg = |s: State4| SymmetryId::Sigma4.apply4(s).unwrap();
    for (u, v) in EvalBox::default().grid(21) {
        let lhs = m.inverse(s5(ps.evaluate(u, v)));
        assert!(lhs.distance(s5(ps.evaluate(r1 * u, r2 * v))) <= 1e-9);
        let lhs = m.apply(neg(ps.evaluate(u, v)));
        assert!(lhs.distance(neg(ps.evaluate(r1 * u, r2 * v))) <= 1e-9);
        // both branches come from separate recursions, so they agree up to rounding
        assert!(pu.evaluate(u, v).distance(s5(ps.evaluate(u, v))) <= 1e-10);
    }
}

#[test]
fn scan_window_residuals() {
    for e in [0.0004, 0.01, 0.1, 1.0] {
        for a in [-0.145, -0.13, -0.115] {
            let (pu, ps) = compute_pair(ModelParams::new(e, a).unwrap(), 80, ScalingPolicy::default()).unwrap();
            for s in [&pu, &ps] {
                let r = s.conjugacy_residual(EvalBox::default(), 41).unwrap();
                assert!(r <= 1e-9, "eps={e} A={a} {:?}: {r:e}", s.branch);
            }
        }
    }
}

#[test]
fn refusals() {
    assert!(compute_pair(ModelParams::new(0.0004, 0.5).unwrap(), 10, ScalingPolicy::default()).is_err());
    assert!(compute_pair(ModelParams::new(0.0004, -0.2).unwrap(), 10, ScalingPolicy::default()).is_err());
    assert!(compute_pair(illustrative(), 0, ScalingPolicy::default()).is_err());
    assert!(compute_pair(illustrative(), 5, ScalingPolicy::Fixed { gamma: [0.0, 1.0] }).is_err());
}

#[test]
fn json_round_trip_is_exact() {
    let (_, ps) = pair();
    let back = ManifoldSeries::from_json(&ps.to_json().unwrap()).unwrap();
    assert_eq!(&back, ps);
}
