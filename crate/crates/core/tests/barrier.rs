use num_complex::Complex64;
use proptest::prelude::*;
use qnm_core::barrier::{
    cross_check_printed_formulas, locate_barrier, photon_sphere_radius, taylor_expand,
};
use qnm_core::chart::ChartMap;
use qnm_core::geometry::BlackHoleParams as Params;
use qnm_core::numerics::ode::{integrate, OdeOptions, State};
use qnm_core::{BlackHoleParams, Model};

fn dsrn(m: f64, q: f64, l: f64) -> BlackHoleParams {
    BlackHoleParams::new(m, q, l, Model::Dsrn).unwrap()
}

/// Fourth-order central differences for derivatives 1..=4 at 0.
fn fd(f: &dyn Fn(f64) -> f64, h: f64) -> [f64; 4] {
    let v = |k: i32| f(k as f64 * h);
    [
        (-v(2) + 8.0 * v(1) - 8.0 * v(-1) + v(-2)) / (12.0 * h),
        (-v(2) + 16.0 * v(1) - 30.0 * v(0) + 16.0 * v(-1) - v(-2)) / (12.0 * h * h),
        (-v(3) + 8.0 * v(2) - 13.0 * v(1) + 13.0 * v(-1) - 8.0 * v(-2) + v(-3)) / (8.0 * h.powi(3)),
        (-v(3) + 12.0 * v(2) - 39.0 * v(1) + 56.0 * v(0) - 39.0 * v(-1) + 12.0 * v(-2) - v(-3))
            / (6.0 * h.powi(4)),
    ]
}

#[test]
fn photon_sphere_radius_values() {
    assert_eq!(
        photon_sphere_radius(&BlackHoleParams::new(1.0, 0.0, 0.0, Model::Dss).unwrap()),
        3.0
    );
    assert_eq!(
        photon_sphere_radius(&BlackHoleParams::new(2.5, 0.0, 0.01, Model::Dss).unwrap()),
        7.5
    );
    let r0 = photon_sphere_radius(&dsrn(1.0, 0.5, 0.0));
    assert!((r0 - (3.0 + 7f64.sqrt()) / 2.0).abs() < 1e-15);
    assert!((r0 - 2.8229).abs() < 1e-4);
}

#[test]
fn schwarzschild_barrier_top() {
    let loc = locate_barrier(&BlackHoleParams::new(1.0, 0.0, 0.0, Model::Dss).unwrap()).unwrap();
    assert!((loc.z0 * loc.z0 - 1.0 / 27.0).abs() < 1e-16);
    assert!((loc.omega - 1.0 / 27.0).abs() < 1e-16);
    assert_eq!(loc.x0, 0.0);
}

#[test]
fn barrier_identities() {
    for (m, q, l) in [
        (1.0, 0.3, 0.02),
        (1.0, 0.0, 0.02),
        (2.0, 1.2, 0.001),
        (1.0, 0.5, 0.0),
    ] {
        let p = dsrn(m, q, l);
        let e = taylor_expand(&p, 6).unwrap();
        let r0 = e.r0;
        assert!((r0 * r0 - 3.0 * m * r0 + 2.0 * q * q).abs() < 1e-14 * r0 * r0);
        let v0 = (m * r0 - q * q - l / 3.0 * r0.powi(4)) / r0.powi(4);
        let f_over = p.lapse(r0).unwrap() / (r0 * r0);
        assert!((v0 - f_over).abs() <= 1e-12 * v0);
        assert!((e.z0 * e.z0 - v0).abs() <= 1e-12 * v0);
        assert!(e.taylor_h0[1].abs() <= 1e-10 * v0);
        assert!((e.taylor_h0[2] + e.omega * e.omega).abs() <= 1e-12 * e.omega * e.omega);
        assert!((e.omega * e.omega - 0.5 * e.v0_derivatives[2].abs()).abs() <= 1e-14);
        assert!(
            (e.taylor_h1[1] + e.omega * e.omega / e.z0).abs() <= 1e-12 * e.omega * e.omega / e.z0
        );
        assert!(e.taylor_h2.iter().all(|&c| c == 0.0));
        let report = cross_check_printed_formulas(&p, &e);
        assert!(report.get("v0pp_form_a").unwrap().pass);
        assert!(report.get("v0pp_form_b").unwrap().pass);
        let v3 = report.get("v0ppp").unwrap();
        assert!(v3.chain_rule.is_finite() && v3.printed.is_finite());
    }
}

#[test]
fn derivatives_match_finite_differences_on_the_chart() {
    for (q, model) in [(0.3, Model::Dsrn), (0.0, Model::Dss)] {
        let p = BlackHoleParams::new(1.0, q, 0.02, model).unwrap();
        let e = taylor_expand(&p, 6).unwrap();
        let chart = ChartMap::new(&p).unwrap();
        let v0 = |x: f64| chart.alpha_real(x).0.powi(2);
        let alpha = |x: f64| chart.alpha_real(x).0;
        let d = fd(&v0, 0.05);
        for m in 2..=4 {
            let rel = (d[m - 1] - e.v0_derivatives[m]).abs() / e.v0_derivatives[m].abs();
            assert!(rel < 1e-5, "V0 derivative {m}: {rel}");
        }
        assert!(d[0].abs() < 1e-9);
        let da = fd(&alpha, 0.05);
        for m in 2..=4 {
            let rel = (da[m - 1] - e.alpha_derivatives[m]).abs() / e.alpha_derivatives[m].abs();
            assert!(rel < 1e-5, "alpha derivative {m}: {rel}");
        }
    }
}

#[test]
fn schwarzschild_derivatives_by_local_integration() {
    // Lambda = 0 has no cosmological horizon, so r(x) comes from dr/dx = F(r) near r0.
    let p = BlackHoleParams::new(1.0, 0.0, 0.0, Model::Dss).unwrap();
    let e = taylor_expand(&p, 6).unwrap();
    let opts = OdeOptions {
        rtol: 1e-14,
        atol: 1e-16,
        ..OdeOptions::default()
    };
    let r_of = |x: f64| {
        let f = |_: f64, y: &State<1>| [p.lapse_complex(y[0]).unwrap()];
        integrate(f, 0.0, [Complex64::new(3.0, 0.0)], x, &opts, |_, _| Ok(())).unwrap()[0].re
    };
    let v0 = |x: f64| {
        let r = r_of(x);
        p.lapse(r).unwrap() / (r * r)
    };
    let d = fd(&v0, 0.05);
    for m in 2..=4 {
        let rel = (d[m - 1] - e.v0_derivatives[m]).abs() / e.v0_derivatives[m].abs();
        assert!(rel < 1e-5, "derivative {m}: {rel}");
    }
}

#[test]
fn dss_second_grade_only() {
    let e = taylor_expand(
        &BlackHoleParams::new(1.0, 0.0, 0.02, Model::Dss).unwrap(),
        5,
    )
    .unwrap();
    assert!(e.taylor_h1.iter().all(|&c| c == 0.0));
    assert!(e.taylor_h2[0] > 0.0);
    // W_h at h = 0.1 and dx = 0.2 against the truncated series
    let s = e.eval(0.1, 0.2);
    assert!(
        (s - (e.eval(0.0, 0.2)
            + 0.01
                * e.taylor_h2
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * 0.2f64.powi(j as i32))
                    .sum::<f64>()))
        .abs()
            < 1e-15
    );
}

#[test]
fn order_range_is_enforced() {
    let p = dsrn(1.0, 0.3, 0.02);
    assert!(taylor_expand(&p, 3).is_err());
    assert!(taylor_expand(&p, 13).is_err());
    assert!(taylor_expand(&p, 12).is_ok());
}

#[test]
fn single_precision_expansion() {
    let p = Params::<f32>::new(1.0, 0.3, 0.02, Model::Dsrn).unwrap();
    let e32 = taylor_expand(&p, 4).unwrap();
    let e64 = taylor_expand(&dsrn(1.0, 0.3, 0.02), 4).unwrap();
    assert!((e32.z0 as f64 - e64.z0).abs() < 1e-5 * e64.z0);
    assert!((e32.omega as f64 - e64.omega).abs() < 1e-4 * e64.omega);
}

#[test]
fn json_has_grades() {
    let e = taylor_expand(&dsrn(1.0, 0.3, 0.02), 4).unwrap();
    let j = e.to_json();
    assert_eq!(j["model"], "dsrn");
    assert_eq!(j["grades"]["h0"].as_array().unwrap().len(), 5);
}

proptest! {
    #[test]
    fn photon_sphere_identity(m in 0.1f64..10.0, qr in 0.0f64..1.06, lr in 0.0f64..0.1) {
        let p = dsrn(m, qr * m, lr / (m * m));
        let r0 = photon_sphere_radius(&p);
        prop_assert!((r0 * r0 - 3.0 * m * r0 + 2.0 * p.charge * p.charge).abs() <= 1e-13 * r0 * r0);
        if let Ok(e) = taylor_expand(&p, 4) {
            prop_assert!(e.omega > 0.0 && e.z0 > 0.0);
            prop_assert!(e.taylor_h0[2] < 0.0);
        }
    }
}
