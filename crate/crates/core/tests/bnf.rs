use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use qnm_core::barrier::taylor_expand;
use qnm_core::bnf::*;
use qnm_core::{BlackHoleParams, Model};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

fn mono(p: u32, qq: u32, c: Q) -> GradedSymbol<Q> {
    GradedSymbol::monomial(Basis::XXi, 12, Monomial::new(p, qq, 0), c)
}

/// S = a3 (x^2 xi - (2/3) xi^3)
fn s03(a3: &Q) -> GradedSymbol<Q> {
    mono(2, 1, a3.clone()).add(&mono(0, 3, a3.mul_ref(&q(-2, 3))))
}

#[test]
fn bracket_examples() {
    assert_eq!(
        mono(0, 2, q(1, 1)).moyal_bracket(&mono(2, 0, q(1, 1)), 1),
        mono(1, 1, q(4, 1))
    );
    let a3 = q(3, 7);
    let omega = GradedSymbol::<Q>::omega(Basis::XXi, 12);
    let br = moyal_bracket(&s03(&a3), &omega, 1);
    assert_eq!(br, mono(3, 0, a3.neg_ref()));
    let br3 = moyal_bracket(&s03(&a3), &mono(3, 0, a3.clone()), 3);
    assert_eq!(
        br3,
        GradedSymbol::monomial(
            Basis::XXi,
            12,
            Monomial::new(0, 0, 0),
            a3.mul_ref(&a3).scale_ratio(-24, 1)
        )
    );
}

#[test]
fn bracket_grade_closure() {
    let a = mono(3, 2, q(1, 2)).add(&mono(1, 1, q(2, 1)));
    let b = mono(2, 3, q(-1, 3));
    for j in 0..=4 {
        let br = a.moyal_bracket(&b, j);
        assert!(br.degree() <= 10, "j = {j}");
    }
}

fn model(a3: Q, a4: Q, c1: Q, c2: Q, d0: Q) -> ModelCoefficients<Q> {
    let z = Q::zero();
    ModelCoefficients {
        a: vec![z.clone(), z.clone(), z.clone(), a3, a4],
        c: vec![z, c1, c2],
        d: vec![d0],
    }
}

#[test]
fn b02_with_cubic_term_only() {
    let a3 = q(5, 11);
    let b = reduce_to_normal_form(
        &model_symbol(
            &model(a3.clone(), Q::zero(), Q::zero(), Q::zero(), Q::zero()),
            4,
        ),
        4,
    )
    .unwrap();
    assert_eq!(b.b02(), a3.mul_ref(&a3).scale_ratio(15, 4));
    assert_eq!(b.get(0, 1), q(1, 1));
    assert!(b.b12().is_zero());
}

#[test]
fn b12_recursion_value() {
    let (a3, a4, c1, c2) = (q(1, 3), q(-2, 5), q(3, 4), q(1, 9));
    let b = reduce_to_normal_form(
        &model_symbol(
            &model(a3.clone(), a4.clone(), c1.clone(), c2.clone(), Q::zero()),
            4,
        ),
        4,
    )
    .unwrap();
    assert_eq!(
        b.b02(),
        a3.mul_ref(&a3)
            .scale_ratio(15, 4)
            .add_ref(&a4.scale_ratio(3, 2))
    );
    assert_eq!(b.b12(), c1.mul_ref(&a3).scale_ratio(-3, 1).sub_ref(&c2));
}

#[test]
fn b20_engine_value() {
    // with c1 = 0 and no h^2 input the h^2 coefficient is a3^2 / 2
    let a3 = q(2, 3);
    let b = reduce_to_normal_form(
        &model_symbol(
            &model(a3.clone(), q(1, 5), Q::zero(), q(1, 7), Q::zero()),
            4,
        ),
        4,
    )
    .unwrap();
    assert_eq!(b.b20(), a3.mul_ref(&a3).scale_ratio(1, 2));
    let d0 = q(-3, 8);
    let c1 = q(1, 2);
    let b = reduce_to_normal_form(
        &model_symbol(
            &model(a3.clone(), Q::zero(), c1.clone(), Q::zero(), d0.clone()),
            4,
        ),
        4,
    )
    .unwrap();
    assert_eq!(
        b.b20(),
        a3.mul_ref(&a3)
            .add_ref(&c1.mul_ref(&c1))
            .scale_ratio(1, 2)
            .add_ref(&d0)
    );
}

#[test]
fn even_models_have_no_odd_h_terms() {
    let z = Q::zero();
    let coeffs = ModelCoefficients {
        a: vec![
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            q(1, 3),
            z.clone(),
            q(-1, 5),
        ],
        c: vec![],
        d: vec![q(2, 7), z, q(1, 11)],
    };
    let b = reduce_to_normal_form(&model_symbol(&coeffs, 8), 8).unwrap();
    for e in b.entries.values() {
        if e.h_power % 2 == 1 {
            assert!(e.value.is_zero(), "h^{} Omega^{}", e.h_power, e.omega_power);
        }
    }
    assert!(!b.b20().is_zero());
}

#[test]
fn normalized_hamiltonian_at_schwarzschild() {
    let p = BlackHoleParams::new(1.0, 0.0, 0.0, Model::Dss).unwrap();
    let e = taylor_expand(&p, 6).unwrap();
    let nh = normalize_hamiltonian(&e, 4).unwrap();
    assert_eq!(nh.symbol.coefficient(Monomial::new(0, 2, 0)), 0.5);
    assert_eq!(nh.symbol.coefficient(Monomial::new(2, 0, 0)), -0.5);
    let w = e.omega;
    let a3 = e.v0_derivatives[3] / (12.0 * w.powf(2.5));
    assert!((nh.record.get("a3") - a3).abs() <= 1e-14 * a3.abs());
    assert!(nh.record.get("d0") != 0.0);
    assert_eq!(nh.record.get("c1"), 0.0);
    let b = barrier_normal_form(&e, 4).unwrap();
    assert_eq!(b.get(0, 1), 1.0);
}

#[test]
fn dsrn_has_no_h_squared_input() {
    let p = BlackHoleParams::new(1.0, 0.3, 0.02, Model::Dsrn).unwrap();
    let e = taylor_expand(&p, 4).unwrap();
    let nh = normalize_hamiltonian(&e, 4).unwrap();
    assert!(nh.symbol.terms().all(|(m, _)| m.h < 2));
    assert!(normalize_hamiltonian(&taylor_expand(&p, 4).unwrap(), 6).is_err());
}

#[test]
fn b02_through_barrier_derivatives() {
    for (m, qq, l, model) in [
        (1.0, 0.3, 0.02, Model::Dsrn),
        (1.0, 0.0, 0.02, Model::Dss),
        (2.0, 0.0, 0.0, Model::Dss),
    ] {
        let p = BlackHoleParams::new(m, qq, l, model).unwrap();
        let b = normal_form_for_order(&p, 2).unwrap();
        let r = b.record.as_ref().unwrap();
        let closed = ClosedForms::from_record(r);
        let theorem = theorem_b02(r.v0_third, r.v0_fourth, r.omega);
        assert!((theorem - closed.b02).abs() <= 1e-14 * closed.b02.abs());
        assert!((b.b02() - closed.b02).abs() <= 1e-12 * closed.b02.abs());
    }
}

#[test]
fn energy_examples() {
    let p = BlackHoleParams::new(1.0, 0.0, 0.0, Model::Dss).unwrap();
    let b = normal_form_for_order(&p, 2).unwrap();
    let r = b.record.clone().unwrap();
    let h = 0.1;
    for k in 0..4 {
        let e0 = energy_expansion(&b, k, h, 0).unwrap();
        let expect = Complex64::new(r.z0 * r.z0, -h * r.omega * (2 * k + 1) as f64);
        assert!((e0 - expect).norm() < 1e-15);
    }
    let mut bare = b.clone();
    bare.entries.retain(|&(m, a), _| (m, a) == (0, 1));
    let e = energy_expansion(&bare, 0, h, 2).unwrap();
    assert!((e - Complex64::new(r.z0 * r.z0, -h * r.omega)).norm() < 1e-15);
    // k = 0: the Weyl symbol Omega^2 has eigenvalue -h^2/2, so e2 = 2w (b20 - b02/2)
    let e2 = energy_series(&b, 0, 2).unwrap();
    let expect2 = 2.0 * r.omega * (b.b20() - 0.5 * b.b02());
    assert!((e2[2].re - expect2).abs() < 1e-14 * expect2.abs().max(1.0));
    assert!(e2[2].im.abs() < 1e-15);
    assert!(energy_expansion(&b, 0, h, 3).is_err());
}

#[test]
fn json_carries_provenance() {
    let p = BlackHoleParams::new(1.0, 0.3, 0.02, Model::Dsrn).unwrap();
    let j = normal_form_for_order(&p, 2).unwrap().to_json();
    assert_eq!(j["entries"][0]["provenance"], "engine");
    assert!(j["normalization"]["coefficients"].as_array().unwrap().len() >= 4);
}

fn small_symbol() -> impl Strategy<Value = GradedSymbol<Q>> {
    prop::collection::vec((0u32..4, 0u32..4, 0u32..2, -4i64..5), 1..5).prop_map(|terms| {
        let mut s = GradedSymbol::zero(Basis::XXi, 6);
        for (p, qq, h, c) in terms {
            if p + qq + 2 * h <= 6 {
                s.add_term(Monomial::new(p, qq, h), q(c, 1));
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn star_product_is_associative(a in small_symbol(), b in small_symbol(), c in small_symbol()) {
        let (a, b, c) = (ComplexSymbol::real(a), ComplexSymbol::real(b), ComplexSymbol::real(c));
        let left = a.star_product(&b).star_product(&c);
        let right = a.star_product(&b.star_product(&c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn closed_forms_match_engine(a3 in -2.0f64..2.0, a4 in -2.0f64..2.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let coeffs = ModelCoefficients { a: vec![0.0, 0.0, 0.0, a3, a4], c: vec![0.0, c1, c2], d: vec![] };
        let b = reduce_to_normal_form(&model_symbol(&coeffs, 4), 4).unwrap();
        let cf = ClosedForms::from_parameters(a3, a4, c1, c2, 0.0);
        prop_assert!((b.b02() - cf.b02).abs() <= 1e-12 * cf.b02.abs().max(1.0));
        prop_assert!((b.b12() - cf.b12).abs() <= 1e-12 * cf.b12.abs().max(1.0));
    }
}
