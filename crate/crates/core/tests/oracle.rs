use num_complex::Complex64;
use proptest::prelude::*;
use qnm_core::bnf::normal_form_for_order;
use qnm_core::chart::ChartMap;
use qnm_core::lattice::{dss_value, Branch, CandidateTag, Pseudopole};
use qnm_core::numerics::zeros::Rect;
use qnm_core::oracle::*;
use qnm_core::{BlackHoleParams, Model, QnmError};

fn dsrn_chart() -> ChartMap {
    ChartMap::new(&BlackHoleParams::new(1.0, 0.3, 0.02, Model::Dsrn).unwrap()).unwrap()
}

#[test]
fn free_system_has_unit_jost_function() {
    let zero = |_: f64| (0.0, 0.0);
    for kind in [
        JostKind::Dirac { negate: false },
        JostKind::Schrodinger { plus: true },
    ] {
        let p = JostProblem::from_profile(&zero, 10.0, kind, -20.0, 20.0, 0.05).unwrap();
        for lam in [
            Complex64::new(0.7, -0.2),
            Complex64::new(2.0, -0.01),
            Complex64::new(-1.3, -0.4),
        ] {
            assert!((p.eval(lam) - 1.0).norm() < 1e-12, "{kind:?} {lam}");
        }
        let s = search_problem(&p, &Rect::new(0.5, 2.5, -0.5, -0.01), JostMode::compact()).unwrap();
        assert_eq!(s.winding, 0);
        assert!(s.estimates.is_empty());
    }
}

#[test]
fn dirac_zeros_for_plus_and_minus_q_are_mirror_images() {
    let chart = dsrn_chart();
    let rect = Rect::new(1.6, 1.9, -0.2, -0.01);
    let mirror = Rect::new(-1.9, -1.6, -0.2, -0.01);
    let plus = jost_resonances(
        &chart,
        10.0,
        JostKind::Dirac { negate: false },
        &rect,
        JostMode::compact(),
    )
    .unwrap();
    let minus = jost_resonances(
        &chart,
        10.0,
        JostKind::Dirac { negate: true },
        &mirror,
        JostMode::compact(),
    )
    .unwrap();
    assert!(plus.estimates.len() >= 3);
    assert_eq!(plus.estimates.len(), minus.estimates.len());
    for e in &plus.estimates {
        let m = -e.value.conj();
        let d = minus
            .estimates
            .iter()
            .map(|w| (w.value - m).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-8, "{} has no mirror partner ({d})", e.value);
        assert!(e.value.im < 0.0);
    }
}

#[test]
fn oscillator_resonances_are_exact() {
    let b = QuadraticBarrier {
        z0: 1.0,
        omega: 0.5,
    };
    let r = quadratic_exactness(&b, 0.1, 5, &oscillator_settings(&b, 0.1), 1e-8).unwrap();
    assert!(r.pass, "max relative error {}", r.max_relative_error);
    assert_eq!(r.rows.len(), 6);
    let b2 = QuadraticBarrier {
        z0: 0.6,
        omega: 1.3,
    };
    let r2 = quadratic_exactness(&b2, 0.05, 3, &oscillator_settings(&b2, 0.05), 1e-8).unwrap();
    assert!(r2.pass, "max relative error {}", r2.max_relative_error);
}

#[test]
fn dss_estimates_are_angle_independent_and_near_the_lattice() {
    let p = BlackHoleParams::new(1.0, 0.0, 0.02, Model::Dss).unwrap();
    let chart = ChartMap::new(&p).unwrap();
    let l = 10.0;
    let h = model_h(Model::Dss, l);
    let settings = ScalingSettings::default();
    let res = scaled_eigen_resonances(&chart, Model::Dss, h, 3, &settings).unwrap();
    assert_eq!(res.estimates.len(), 3);
    let coeffs = normal_form_for_order(&p, 2).unwrap();
    for (k, e) in res.estimates.iter().enumerate() {
        assert!(e.drift <= 1e-6);
        assert!(e.value.im < 0.0 && e.value.re > 0.0);
        let mu = dss_value(&coeffs, k as u32, l, 2, false).unwrap();
        let scale = (l + 0.5) * mu.norm() / (l + 0.5).powi(3);
        assert!(
            (mu - e.value).norm() < 10.0 * scale,
            "k = {k}: {} vs {mu}",
            e.value
        );
    }
    let tilted = ScalingSettings {
        theta: 0.55 * 1.1,
        theta_refine: 1.0,
        ..settings
    };
    let res2 = scaled_eigen_resonances(&chart, Model::Dss, h, 3, &tilted).unwrap();
    for (a, b) in res.estimates.iter().zip(&res2.estimates) {
        let ea = a.energy.unwrap();
        assert!((ea - b.energy.unwrap()).norm() / ea.norm() <= 1e-6);
    }
}

#[test]
fn even_superpotential_gives_identical_partner_spectra() {
    let settings = manufactured_settings();
    let h = 0.05;
    let plus = AnalyticBarrier::skewed_sech(1.0, 1.0, 0.0)
        .unwrap()
        .with_h(h, 1.0);
    let minus = AnalyticBarrier::skewed_sech(1.0, 1.0, 0.0)
        .unwrap()
        .with_h(h, -1.0);
    let a = scaled_eigen_resonances_for(&plus, h, 3, &settings)
        .unwrap()
        .estimates;
    let b = scaled_eigen_resonances_for(&minus, h, 3, &settings)
        .unwrap()
        .estimates;
    assert_eq!(a.len(), 3);
    assert_eq!(b.len(), 3);
    for (x, y) in a.iter().zip(&b) {
        assert!((x.value - y.value).norm() / x.value.norm() < 1e-8);
    }
}

#[test]
fn jost_integrator_is_fourth_order() {
    let chart = dsrn_chart();
    let lam = Complex64::new(1.75, -0.1);
    let kind = JostKind::Dirac { negate: false };
    let eval = |step: f64| {
        JostProblem::from_chart(&chart, 10.0, kind, JostMode::compact(), 0.1, step)
            .unwrap()
            .eval(lam)
    };
    let (a, b, c) = (eval(0.08), eval(0.04), eval(0.02));
    let ratio = (a - b).norm() / (b - c).norm();
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    assert!((b - c).norm() / c.norm() < 1e-6);
}

#[test]
fn strip_mode_rejects_searches_below_the_strip() {
    let chart = dsrn_chart();
    let depth = strip_depth(&chart, JostKind::Dirac { negate: false });
    let rect = Rect::new(1.6, 1.9, -2.0 * depth, -0.001);
    let err = dirac_jost_resonances(&chart, 10.0, &rect, JostMode::Strip).unwrap_err();
    assert!(matches!(err, QnmError::Configuration(_)));
}

#[test]
fn scaling_angle_is_limited_by_the_cone() {
    let chart = dsrn_chart();
    let s = ScalingSettings {
        theta: 0.7,
        ..ScalingSettings::default()
    };
    let err = scaled_eigen_resonances(&chart, Model::Dsrn, 0.1, 2, &s).unwrap_err();
    assert!(matches!(err, QnmError::Configuration(_)));
    let dss = ChartMap::new(&BlackHoleParams::new(1.0, 0.3, 0.02, Model::Dsrn).unwrap()).unwrap();
    assert!(
        scaled_eigen_resonances(&dss, Model::Dss, 0.1, 2, &ScalingSettings::default()).is_err()
    );
}

#[test]
fn free_band_is_vacuous_for_small_n() {
    let chart = dsrn_chart();
    let r = free_region_scan(&chart, 10.0, 10.0, 0.03, JostMode::compact()).unwrap();
    assert!(r.vacuous && r.pass && r.rect.is_none());
    assert!(free_region_scan(&chart, 10.0, -1.0, 0.03, JostMode::compact()).is_err());
}

#[test]
fn matching_is_greedy_and_one_to_one() {
    let pole = |re: f64, n: f64| Pseudopole {
        model: Model::Dsrn,
        branch: Branch::Dirac,
        tag: CandidateTag::Engine,
        k: 0,
        l: n - 0.5,
        n,
        value: Complex64::new(re, -0.1),
        multiplicity: 1,
        order: 1,
    };
    let est = |re: f64| ResonanceEstimate {
        value: Complex64::new(re, -0.1),
        energy: None,
        method: Method::DiracJost,
        h: None,
        n: None,
        grid: 0,
        theta: 0.0,
        drift: 0.0,
    };
    let report = match_estimates(
        &[pole(1.0, 10.0), pole(2.0, 20.0)],
        &[est(1.001), est(1.002), est(5.0)],
        0.01,
    );
    assert_eq!(report.pairs.len(), 1);
    assert!((report.pairs[0].distance - 0.001).abs() < 1e-12);
    assert_eq!(report.unmatched_poles.len(), 1);
    assert_eq!(report.unmatched_estimates.len(), 2);
    assert!(sets_agree(
        &[Complex64::new(1.0, 0.0)],
        &[Complex64::new(1.0, 1e-9)],
        1e-6
    ));
    assert!(!sets_agree(&[Complex64::new(1.0, 0.0)], &[], 1e-6));
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert_eq!(Suite::parse_list("all").unwrap().len(), 6);
    assert_eq!(
        Suite::parse_list("union,b12").unwrap(),
        vec![Suite::Union, Suite::B12]
    );
    assert!(Suite::parse_list("union,nope").is_err());
    assert_eq!("zero_b02".parse::<Mutation>().unwrap(), Mutation::ZeroB02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dirac_jost_reflection(re in -3.0f64..3.0, im in -0.5f64..0.0) {
        let profile = |x: f64| {
            let (c, cp) = cutoff(x, 4.0, 2.0);
            let a = 0.2 / x.cosh();
            (a * c, -a * x.tanh() * c + a * cp)
        };
        let p = JostProblem::from_profile(&profile, 5.0, JostKind::Dirac { negate: false }, -6.0, 6.0, 0.05).unwrap();
        let lam = Complex64::new(re, im);
        let a = p.eval(lam);
        let b = p.eval(-lam.conj());
        prop_assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1.0));
    }
}
