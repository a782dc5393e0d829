use num_complex::Complex64;
use proptest::prelude::*;
use qnm_core::bnf::normal_form_for_order;
use qnm_core::lattice::{
    assemble_resonance_sets, dsrn_pseudopoles, dsrn_value, dss_pseudopoles, dss_value,
    filter_regions, to_csv, Branch, CandidateTag, LatticeSpec, Pseudopole, RegionSpec,
};
use qnm_core::numerics::fit::power_law;
use qnm_core::{BlackHoleParams, Model, QnmError};

fn coeffs(m: f64, q: f64, l: f64, model: Model, order: usize) -> qnm_core::BnfCoefficients {
    normal_form_for_order(&BlackHoleParams::new(m, q, l, model).unwrap(), order).unwrap()
}

#[test]
fn schwarzschild_leading_dirac_pole() {
    let c = coeffs(1.0, 0.0, 0.0, Model::Dsrn, 0);
    let v = dsrn_value(&c, 0, 4.5, 0).unwrap();
    let expect = Complex64::new(5.0, -0.5) / 27f64.sqrt();
    assert!((v - expect).norm() < 1e-12, "{v} vs {expect}");
}

#[test]
fn dss_leading_pole() {
    let c = coeffs(1.0, 0.0, 0.0, Model::Dss, 0);
    let v = dss_value(&c, 0, 1.0, 0, false).unwrap();
    assert!((v - Complex64::new(0.28868, -0.09623)).norm() < 1e-5);
    let spec = LatticeSpec::new(3, 1.0, 6.0, 0).untruncated();
    let w = (1.0f64 / 27.0).sqrt();
    for p in dss_pseudopoles(&c, &spec)
        .unwrap()
        .iter()
        .filter(|p| p.tag == CandidateTag::Engine)
    {
        let expect = Complex64::new(p.n, -(p.k as f64 + 0.5)) * w;
        assert!((p.value - expect).norm() < 1e-12);
        assert_eq!(p.multiplicity as f64, 2.0 * p.l + 1.0);
    }
}

#[test]
fn photon_sphere_frequencies() {
    let (m, q, lam) = (1.0, 0.3, 0.02);
    let c = coeffs(m, q, lam, Model::Dsrn, 2);
    let r0 = (3.0 * m + (9.0 * m * m - 8.0 * q * q).sqrt()) / 2.0;
    let big = (m / r0.powi(3) - q * q / r0.powi(4) - lam / 3.0).sqrt();
    let damping = 0.5 * big * (3.0 * m / r0 - 4.0 * q * q / (r0 * r0)).sqrt();
    let l = 2000.5;
    let v = dsrn_value(&c, 0, l, 2).unwrap();
    assert!((v.re / (l + 0.5) - big).abs() < 1e-6);
    assert!((v.im + damping).abs() < 1e-3);
}

#[test]
fn order_differences_decay() {
    let c = coeffs(1.0, 0.3, 0.02, Model::Dsrn, 3);
    let ls: Vec<f64> = [10.5, 20.5, 50.5, 100.5, 199.5].to_vec();
    let ns: Vec<f64> = ls.iter().map(|l| l + 0.5).collect();
    let d21: Vec<f64> = ls
        .iter()
        .map(|&l| (dsrn_value(&c, 1, l, 2).unwrap() - dsrn_value(&c, 1, l, 1).unwrap()).norm())
        .collect();
    let d32: Vec<f64> = ls
        .iter()
        .map(|&l| (dsrn_value(&c, 1, l, 3).unwrap() - dsrn_value(&c, 1, l, 2).unwrap()).norm())
        .collect();
    assert!((power_law(&ns, &d21).unwrap().exponent + 1.0).abs() < 0.05);
    assert!((power_law(&ns, &d32).unwrap().exponent + 2.0).abs() < 0.05);
}

#[test]
fn dss_parameterizations_agree_to_second_order() {
    let c = coeffs(1.0, 0.0, 0.02, Model::Dss, 2);
    let ls = [10.0, 20.0, 40.0, 80.0, 160.0];
    let ns: Vec<f64> = ls.iter().map(|l| l + 0.5).collect();
    let d: Vec<f64> = ls
        .iter()
        .map(|&l| {
            (dss_value(&c, 1, l, 2, true).unwrap() - dss_value(&c, 1, l, 2, false).unwrap()).norm()
        })
        .collect();
    let slope = power_law(&ns, &d).unwrap().exponent;
    assert!(slope < -1.9, "slope {slope}");
}

#[test]
fn dss_and_dsrn_agree_at_zero_charge() {
    let a = coeffs(1.0, 0.0, 0.02, Model::Dss, 1);
    let b = coeffs(1.0, 0.0, 0.02, Model::Dsrn, 1);
    for k in 0..3 {
        let x = dss_value(&a, k, 7.0, 0, false).unwrap();
        let y = dsrn_value(&b, k, 7.0, 0).unwrap();
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn dsrn_lattice_metadata_and_candidates() {
    let c = coeffs(1.0, 0.3, 0.02, Model::Dsrn, 2);
    let spec = LatticeSpec::new(2, 1.0, 40.5, 2);
    let poles = dsrn_pseudopoles(&c, &spec).unwrap();
    // candidate_b leaves the lower half-plane at small l
    assert!(!poles
        .iter()
        .any(|p| p.tag == CandidateTag::CandidateB && p.l < 10.0));
    for tag in [
        CandidateTag::Engine,
        CandidateTag::CandidateA,
        CandidateTag::CandidateB,
    ] {
        assert!(poles.iter().any(|p| p.tag == tag));
    }
    for p in &poles {
        assert!(p.value.im < 0.0 && p.value.re > 0.0);
        assert_eq!(p.branch, Branch::Dirac);
        assert_eq!(p.multiplicity as f64, 2.0 * p.l - 1.0);
        assert_eq!(p.n, p.l + 0.5);
        assert!(p.k as f64 <= 0.25 * p.l);
    }
    let low = dsrn_pseudopoles(&c, &LatticeSpec::new(2, 1.0, 10.5, 1)).unwrap();
    assert!(low.iter().all(|p| p.tag == CandidateTag::Engine));
}

#[test]
fn order_beyond_engine_is_rejected() {
    let c = coeffs(1.0, 0.3, 0.02, Model::Dsrn, 2);
    let err = dsrn_pseudopoles(&c, &LatticeSpec::new(1, 1.0, 3.0, 3)).unwrap_err();
    assert!(matches!(err, QnmError::Configuration(_)));
    let err = normal_form_for_order(
        &BlackHoleParams::new(1.0, 0.3, 0.02, Model::Dsrn).unwrap(),
        7,
    )
    .unwrap_err();
    assert!(matches!(err, QnmError::Configuration(_)));
}

#[test]
fn dss_rejects_dsrn_coefficients() {
    let c = coeffs(1.0, 0.3, 0.02, Model::Dsrn, 2);
    assert!(matches!(
        dss_pseudopoles(&c, &LatticeSpec::new(1, 1.0, 3.0, 2)),
        Err(QnmError::Configuration(_))
    ));
}

fn pole(value: Complex64) -> Pseudopole {
    Pseudopole {
        model: Model::Dsrn,
        branch: Branch::Dirac,
        tag: CandidateTag::Engine,
        k: 0,
        l: 1.5,
        n: 2.0,
        value,
        multiplicity: 2,
        order: 1,
    }
}

#[test]
fn union_examples() {
    let sets = assemble_resonance_sets(&[pole(Complex64::new(0.5, -0.1))]).unwrap();
    assert_eq!(sets.union.len(), 2);
    assert!(sets
        .union
        .iter()
        .any(|p| (p.value - Complex64::new(-0.5, -0.1)).norm() < 1e-15));
    let sets = assemble_resonance_sets(&[pole(Complex64::new(0.0, -0.3))]).unwrap();
    assert_eq!(sets.union.len(), 1);
    let bad = Pseudopole {
        branch: Branch::Mirror,
        ..pole(Complex64::new(0.5, -0.1))
    };
    assert!(assemble_resonance_sets(&[bad]).is_err());
}

#[test]
fn generated_union_is_mirror_symmetric() {
    let c = coeffs(1.0, 0.3, 0.02, Model::Dsrn, 2);
    let poles = dsrn_pseudopoles(&c, &LatticeSpec::new(2, 1.0, 10.5, 2).untruncated()).unwrap();
    let sets = assemble_resonance_sets(&poles).unwrap();
    for p in &sets.union {
        let m = -p.value.conj();
        assert!(sets.union.iter().any(|q| (q.value - m).norm() < 1e-14));
    }
    let again: Vec<Pseudopole> = sets.mirror.iter().map(|p| p.mirror()).collect();
    let twice = assemble_resonance_sets(&again).unwrap();
    assert_eq!(twice.union, sets.union);
}

#[test]
fn region_filter() {
    let c = coeffs(1.0, 0.3, 0.02, Model::Dsrn, 2);
    let poles = dsrn_pseudopoles(&c, &LatticeSpec::new(3, 1.0, 60.5, 1).untruncated()).unwrap();
    let rec = c.record.as_ref().unwrap();
    let (z0, w) = (rec.z0, rec.omega);
    let region = RegionSpec {
        c: 4.0 * w / z0,
        k_floor: 0.1,
        theta: 0.5,
        r: 10.0 * z0.max(w / z0),
        c0: 0.01,
    };
    let report = filter_regions(&poles, &region).unwrap();
    assert!(report.violations.is_empty());
    for p in &report.kept {
        assert!(p.value.im > -region.c);
    }
    let deep = pole(Complex64::new(3.0, -10.0));
    assert_eq!(filter_regions(&[deep], &region).unwrap().kept.len(), 0);
    let band = RegionSpec {
        r: 1.0,
        c0: 1.0,
        ..region
    };
    let inside = Pseudopole {
        n: 40.0,
        ..pole(Complex64::new(5.0, -0.2))
    };
    assert_eq!(
        filter_regions(&[inside], &band).unwrap().violations.len(),
        1
    );
    assert!(filter_regions(&[inside], &RegionSpec { c0: -1.0, ..band }).is_err());
}

#[test]
fn csv_is_deterministic() {
    let c = coeffs(1.0, 0.3, 0.02, Model::Dsrn, 2);
    let spec = LatticeSpec::new(2, 1.0, 12.5, 2);
    let a = to_csv(&dsrn_pseudopoles(&c, &spec).unwrap(), 12);
    let b = to_csv(&dsrn_pseudopoles(&c, &spec).unwrap(), 12);
    assert_eq!(a, b);
    assert!(a.starts_with("model,branch,k,l,n,re,im,multiplicity,order,candidate_tag\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn poles_lie_in_lower_right_quadrant(q in 0.0f64..1.0, lam in 0.0f64..0.08, k in 0u32..4, l in 1u32..60) {
        let params = BlackHoleParams::new(1.0, q, lam, Model::Dsrn).unwrap();
        if let Ok(c) = normal_form_for_order(&params, 2) {
            let v = dsrn_value(&c, k, l as f64 + 0.5, 1).unwrap();
            prop_assert!(v.im < 0.0 && v.re > 0.0);
            let m = pole(v).mirror();
            prop_assert_eq!(m.branch, Branch::Mirror);
            prop_assert_eq!(m.value, -v.conj());
        }
    }
}
