use std::f64::consts::PI;

use super::*;

fn euclid_h(n: usize, alpha: f64) -> SolitonProblem {
    let h = CurvatureFunction::mean_curvature(n).unwrap().widened().unwrap();
    SolitonProblem::new(WarpedAmbient::euclidean(), n, h, alpha).unwrap()
}

#[test]
fn p_examples() {
    let prob = euclid_h(2, 2.0);
    let g = crate::rotgeo::slice_geometry(&prob.ambient, 2, 1.0).unwrap();
    assert!((p_eval(&prob, &g).unwrap() + 1.0 / 6.0).abs() < 1e-15);
    let prob1 = euclid_h(2, 1.0);
    for rho in [0.3, 1.0, 4.0] {
        let g = crate::rotgeo::slice_geometry(&prob1.ambient, 2, rho).unwrap();
        assert!(p_eval(&prob1, &g).unwrap().abs() < 1e-14);
    }
    let sph = SolitonProblem::new(WarpedAmbient::sphere(), 2, CurvatureFunction::mean_curvature(2).unwrap(), 1.0).unwrap();
    let r0 = 0.8f64;
    let g = crate::rotgeo::slice_geometry(&sph.ambient, 2, r0).unwrap();
    let expected = (1.0 - r0.cos()) - r0.sin().powi(2) / 2.0;
    assert!((p_eval(&sph, &g).unwrap() - expected).abs() < 1e-15);
    let mut bad = g;
    bad.u = 0.0;
    assert!(matches!(p_eval(&sph, &bad), Err(Error::NonpositiveSupport { .. })));
}

#[test]
fn slice_solver() {
    let roots = slice_solve(&euclid_h(3, 2.0), (0.1, 5.0)).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0] - 1.0).abs() < 1e-12);
    let roots = slice_solve(&euclid_h(3, 0.5), (0.013, 7.7)).unwrap();
    assert!((roots[0] - 1.0).abs() < 1e-12);

    let sph = SolitonProblem::new(WarpedAmbient::sphere(), 2, CurvatureFunction::mean_curvature(2).unwrap(), 2.0).unwrap();
    let roots = slice_solve(&sph, (0.01, PI / 2.0 - 0.01)).unwrap();
    let expected = ((5f64.sqrt() - 1.0) / 2.0).asin();
    assert_eq!(roots.len(), 1);
    assert!((roots[0] - expected).abs() < 1e-10);
    assert!((roots[0] - 0.66624).abs() < 1e-5);

    let hyp = SolitonProblem::new(WarpedAmbient::hyperbolic(), 2, CurvatureFunction::mean_curvature(2).unwrap(), 2.0).unwrap();
    assert!(matches!(slice_solve(&hyp, (1e-3, 10.0)), Err(Error::NoRoot { .. })));
    let cert = certify_empty(&hyp, (1e-3, 10.0)).unwrap();
    assert!(cert.max_g < 0.0);

    assert!(matches!(slice_solve(&euclid_h(2, 1.0), (0.1, 5.0)), Err(Error::DegenerateFamily { .. })));
    assert!(slice_solve(&sph, (0.5, 2.0)).is_err());
}

#[test]
fn kappa_root_finder() {
    let prob = euclid_h(3, 1.0);
    let k = prob.solve_kappa_p(0.5, 2.0, 0.0).unwrap();
    assert!(((k + 2.0 * 0.5) / 3.0 - 2.0).abs() < 1e-14);
    let g = SolitonProblem::new(WarpedAmbient::euclidean(), 3, CurvatureFunction::sigma_n_root(3).unwrap(), 1.0).unwrap();
    let k = g.solve_kappa_p(2.0, 1.0, 10.0).unwrap();
    assert!(((k * 4.0).cbrt() - 1.0).abs() < 1e-14);
    // no positive kappa_p reaches the target when kappa_o <= 0
    assert!(g.solve_kappa_p(-1.0, 1.0, 1.0).is_err());
    // power means with negative exponent are bounded in kappa_p
    let pm = SolitonProblem::new(WarpedAmbient::euclidean(), 2, CurvatureFunction::power_mean(2, -1.0).unwrap(), 1.0).unwrap();
    assert!(pm.solve_kappa_p(1.0, 3.0, 1.0).is_err());
    let k = pm.solve_kappa_p(1.0, 1.5, 1.0).unwrap();
    assert!((2.0 / (1.0 / k + 1.0) - 1.5).abs() < 1e-14);
}

#[test]
fn alpha_one_spheres_close() {
    let prob = euclid_h(2, 1.0);
    for rho in [0.3, 1.0, 2.7] {
        let t = shoot(&prob, rho, &StepControl::default()).unwrap();
        assert!(t.classification.is_closed(), "{rho}: {:?}", t.events);
        assert!((t.r_min - rho).abs() < 1e-8 && (t.r_max - rho).abs() < 1e-8);
        assert!(t.max_residual <= 1e-8);
        assert!(t.p_max - t.p_min <= 1e-6 * (1.0 + t.p_max.abs()));
    }
}

#[test]
fn unit_sphere_closes_for_alpha_two() {
    let t = shoot(&euclid_h(2, 2.0), 1.0, &StepControl::default()).unwrap();
    assert!(t.classification.is_closed(), "{:?}", t.events);
    assert!((t.r_min - 1.0).abs() < 1e-8 && (t.r_max - 1.0).abs() < 1e-8);
}

#[test]
fn off_slice_start_does_not_close() {
    let t = shoot(&euclid_h(2, 2.0), 0.5, &StepControl::default()).unwrap();
    assert!(!t.classification.is_closed(), "{:?}", t.events);
    assert!(t.max_residual <= 1e-8);
    assert!(t.closure_defect > 1e-3);
}

#[test]
fn sphere_ambient_slice_closes() {
    let prob = SolitonProblem::new(WarpedAmbient::sphere(), 2, CurvatureFunction::mean_curvature(2).unwrap().widened().unwrap(), 2.0)
        .unwrap();
    let r0 = slice_solve(&prob, (0.01, 1.5)).unwrap()[0];
    let t = shoot(&prob, r0, &StepControl::default()).unwrap();
    assert!(t.classification.is_closed(), "{:?}", t.events);
    let slice = crate::rotgeo::slice_geometry(&prob.ambient, 2, r0).unwrap();
    for x in &t.samples {
        assert!((x.geom.r - r0).abs() < 1e-6);
    }
    // curvature is only resolved away from the closing axis
    for x in t.samples.iter().filter(|x| x.geom.w > 1e-3) {
        assert!((x.geom.kappa_p - slice.kappa_p).abs() < 1e-6);
    }
    let off = shoot(&prob, r0 + 0.1, &StepControl::default()).unwrap();
    assert!(!off.classification.is_closed());
}

#[test]
fn p_operator_identity_on_open_arc() {
    let prob = euclid_h(2, 2.0);
    let t = shoot(&prob, 0.5, &StepControl::default()).unwrap();
    let end = t.samples.last().unwrap().geom.s;
    for j in 1..10 {
        let s = end * j as f64 / 10.0;
        let lp = match lp_decompose(&prob, &t, s) {
            Ok(lp) => lp,
            Err(e) => panic!("s={s}: {e}"),
        };
        assert!(lp.residual <= 1e-5, "{lp:?}");
        let h = lp.mean_curvature.unwrap();
        assert!(h.residual <= 1e-5, "{h:?}");
        assert!(h.lhs >= h.lower_bound - 1e-8, "{h:?}");
    }
}

#[test]
fn p_operator_terms_vanish_on_alpha_one_sphere() {
    let prob = euclid_h(3, 1.0);
    let t = shoot(&prob, 1.3, &StepControl::default()).unwrap();
    let lp = lp_decompose(&prob, &t, 1.0).unwrap();
    for x in lp.terms() {
        assert!(x.abs() < 1e-8, "{lp:?}");
    }
    assert!(lp.lhs_fd.abs() < 1e-8 && lp.drift_adjusted.abs() < 1e-8);
}

#[test]
fn lp_requires_interior_point() {
    let prob = euclid_h(2, 1.0);
    let t = shoot(&prob, 1.0, &StepControl::default()).unwrap();
    assert!(lp_decompose(&prob, &t, 1e-5).is_err());
}

#[test]
fn scan_is_ordered() {
    let prob = euclid_h(2, 1.0);
    let grid = [2.0, 0.5, 1.0];
    let table = scan(&prob, &grid, &StepControl::default());
    let starts: Vec<f64> = table.rows.iter().map(|r| r.start_r).collect();
    assert_eq!(starts, vec![0.5, 1.0, 2.0]);
    assert!(table.rows.iter().all(|r| r.closed));
    let bad = scan(&prob, &[-1.0], &StepControl::default());
    assert!(bad.rows[0].error.is_some());
}

#[test]
fn trace_export() {
    let prob = euclid_h(2, 1.0);
    let t = shoot(&prob, 1.0, &StepControl::default()).unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&t, &mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("s,r,theta,phi,kappa_p,kappa_o,u,f,p,residual"));
    let mut buf = Vec::new();
    write_trace_json(&t, &mut buf).unwrap();
    let back = read_trace_json(buf.as_slice()).unwrap();
    assert_eq!(back, t);
}

