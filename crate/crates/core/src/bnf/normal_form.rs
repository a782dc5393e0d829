//! Normalization at the barrier top and Lie-transform Birkhoff reduction.

use super::coefficient::Coefficient;
use super::symbol::{Basis, GradedSymbol, Monomial};
use crate::barrier::BarrierExpansion;
use crate::error::{QnmError, Result};
use crate::geometry::Model;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One named Hamiltonian coefficient with its defining expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedCoefficient {
    pub name: String,
    pub value: f64,
    pub expression: String,
}

/// Scaling data linking the barrier expansion to the normalized symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub model: Model,
    pub z0: f64,
    pub omega: f64,
    pub e0: f64,
    pub v0_third: f64,
    pub v0_fourth: f64,
    pub scaling: String,
    pub coefficients: Vec<NamedCoefficient>,
}

impl NormalizationRecord {
    pub fn get(&self, name: &str) -> f64 {
        self.coefficients
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
            .unwrap_or(0.0)
    }
}

/// Normalized Hamiltonian H - E0 = 2 omega (Omega + ...), kept as the
/// bracketed symbol (the overall 2 omega factor lives in the record).
#[derive(Clone, Debug)]
pub struct NormalizedHamiltonian {
    pub symbol: GradedSymbol<f64>,
    pub record: NormalizationRecord,
}

/// Inputs of the model symbol Omega + sum a_j x^j + h sum c_j x^j + h^2 sum d_j x^j.
/// Index j of each vector is the power of x.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelCoefficients<C> {
    pub a: Vec<C>,
    pub c: Vec<C>,
    pub d: Vec<C>,
}

pub fn model_symbol<C: Coefficient>(
    coeffs: &ModelCoefficients<C>,
    max_grade: u32,
) -> GradedSymbol<C> {
    let mut s = GradedSymbol::omega(Basis::XXi, max_grade);
    for (hpow, list) in [(0u32, &coeffs.a), (1, &coeffs.c), (2, &coeffs.d)] {
        for (j, v) in list.iter().enumerate() {
            if hpow == 0 && j < 3 {
                continue;
            }
            s.add_term(Monomial::new(j as u32, 0, hpow), v.clone());
        }
    }
    s
}

/// Printed form of c2 (audit only; disagrees with the Taylor data).
pub fn printed_c2(z0: f64, omega: f64, v0_third: f64) -> f64 {
    0.25 * (0.5 / z0.powi(3) + v0_third / (z0 * omega * omega))
}

/// Printed form of d0.
pub fn printed_d0(mass: f64, z0: f64, omega: f64) -> f64 {
    9.0 * mass * mass * z0.powi(4) / omega
}

pub fn normalize_hamiltonian(
    exp: &BarrierExpansion<f64>,
    max_grade: u32,
) -> Result<NormalizedHamiltonian> {
    if exp.order < 4 {
        return Err(QnmError::Configuration(format!(
            "expansion order {} below 4",
            exp.order
        )));
    }
    if (max_grade as usize) > exp.order {
        return Err(QnmError::Configuration(format!(
            "normal-form grade {max_grade} needs Taylor order >= {max_grade}, have {}",
            exp.order
        )));
    }
    let w = exp.omega;
    let unit = |j: usize| w.powf(-(j as f64) / 2.0) / (2.0 * w);
    let g = max_grade as usize;
    let a: Vec<f64> = (0..=g)
        .map(|j| {
            if j < 3 {
                0.0
            } else {
                exp.taylor_h0[j] * unit(j)
            }
        })
        .collect();
    let c: Vec<f64> = match exp.model {
        Model::Dsrn => (0..=g.saturating_sub(2))
            .map(|j| exp.taylor_h1[j] * unit(j))
            .collect(),
        Model::Dss => Vec::new(),
    };
    let d: Vec<f64> = match exp.model {
        Model::Dss => (0..=g.saturating_sub(4))
            .map(|j| exp.taylor_h2[j] * unit(j))
            .collect(),
        Model::Dsrn => Vec::new(),
    };
    let mut named = Vec::new();
    for (j, v) in a.iter().enumerate().skip(3) {
        named.push(NamedCoefficient {
            name: format!("a{j}"),
            value: *v,
            expression: format!("V0^({j})(x0) / ({j}! * 2 * omega^{})", j as f64 / 2.0 + 1.0),
        });
    }
    for (j, v) in c.iter().enumerate() {
        named.push(NamedCoefficient {
            name: format!("c{j}"),
            value: *v,
            expression: format!(
                "alpha^({})(x0) / ({j}! * 2 * omega^{})",
                j + 1,
                j as f64 / 2.0 + 1.0
            ),
        });
    }
    for (j, v) in d.iter().enumerate() {
        named.push(NamedCoefficient {
            name: format!("d{j}"),
            value: *v,
            expression: format!("W2^({j})(x0) / ({j}! * 2 * omega^{})", j as f64 / 2.0 + 1.0),
        });
    }
    let record = NormalizationRecord {
        model: exp.model,
        z0: exp.z0,
        omega: w,
        e0: exp.z0 * exp.z0,
        v0_third: exp.v0_derivatives[3],
        v0_fourth: exp.v0_derivatives[4],
        scaling: "x - x0 = omega^(-1/2) X, xi = omega^(1/2) Xi, H = z0^2 + 2 omega (Omega + ...)"
            .into(),
        coefficients: named,
    };
    let symbol = model_symbol(&ModelCoefficients { a, c, d }, max_grade);
    Ok(NormalizedHamiltonian { symbol, record })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Engine,
    ClosedForm,
}

/// Coefficient of h^m Omega^j (pointwise Omega power, Weyl symbol).
#[derive(Clone, Debug, PartialEq)]
pub struct BnfEntry<C> {
    pub h_power: u32,
    pub omega_power: u32,
    pub value: C,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BnfCoefficients<C> {
    pub max_grade: u32,
    pub entries: BTreeMap<(u32, u32), BnfEntry<C>>,
    pub record: Option<NormalizationRecord>,
}

impl<C: Coefficient> BnfCoefficients<C> {
    pub fn get(&self, h_power: u32, omega_power: u32) -> C {
        self.entries
            .get(&(h_power, omega_power))
            .map(|e| e.value.clone())
            .unwrap_or_else(C::zero)
    }

    /// Coefficient of Omega^2.
    pub fn b02(&self) -> C {
        self.get(0, 2)
    }

    /// Coefficient of h Omega.
    pub fn b12(&self) -> C {
        self.get(1, 1)
    }

    /// Coefficient of h^2.
    pub fn b20(&self) -> C {
        self.get(2, 0)
    }

    pub fn set(&mut self, h_power: u32, omega_power: u32, value: C, provenance: Provenance) {
        self.entries.insert(
            (h_power, omega_power),
            BnfEntry {
                h_power,
                omega_power,
                value,
                provenance,
            },
        );
    }
}

impl BnfCoefficients<f64> {
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .values()
            .map(|e| {
                serde_json::json!({
                    "h_power": e.h_power,
                    "omega_power": e.omega_power,
                    "value": e.value,
                    "provenance": e.provenance,
                })
            })
            .collect();
        serde_json::json!({
            "max_grade": self.max_grade,
            "entries": entries,
            "normalization": self.record,
        })
    }
}

/// Solves the homological equations grade by grade with a sequence of Lie
/// transforms exp(L_S) and returns the coefficients of h^m Omega^j.
pub fn reduce_to_normal_form<C: Coefficient>(
    h: &GradedSymbol<C>,
    max_grade: u32,
) -> Result<BnfCoefficients<C>> {
    let mut cur = h.with_max_grade(max_grade).to_basis(Basis::UV);
    let quad = cur.grade_part(2);
    let omega = GradedSymbol::<C>::omega(Basis::UV, max_grade);
    let quad_h0 = {
        let mut q = GradedSymbol::zero(Basis::UV, max_grade);
        for (m, c) in quad.terms().filter(|(m, _)| m.h == 0) {
            q.add_term(*m, c.clone());
        }
        q
    };
    if quad_h0 != omega {
        return Err(QnmError::Configuration(
            "Hamiltonian quadratic part is not Omega".into(),
        ));
    }
    if !cur.grade_part(1).is_zero() {
        return Err(QnmError::Configuration(
            "Hamiltonian has a linear term; not at a critical point".into(),
        ));
    }
    for g in 3..=max_grade {
        let part = cur.grade_part(g);
        let mut gen = GradedSymbol::zero(Basis::UV, max_grade);
        for (m, c) in part.terms() {
            if m.p != m.q {
                let diff = m.p as i64 - m.q as i64;
                gen.add_term(*m, c.scale_ratio(-1, diff));
            }
        }
        if gen.is_zero() {
            continue;
        }
        let scale = part
            .terms()
            .filter_map(|(_, c)| c.to_f64())
            .fold(0.0, |a: f64, v| a.max(v.abs()));
        cur = gen.lie_exponential(&cur);
        let residue: Vec<(Monomial, C)> = cur
            .grade_part(g)
            .terms()
            .filter(|(m, _)| m.p != m.q)
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        for (m, c) in residue {
            let size = c.to_f64().map(f64::abs).unwrap_or(f64::INFINITY);
            if size > 1e-10 * scale.max(1.0) {
                return Err(QnmError::InternalInvariant(format!(
                    "homological equation left a non-normal term {m:?} of size {size:e} at grade {g}"
                )));
            }
            cur.add_term(m, c.neg_ref());
        }
    }
    let mut out = BnfCoefficients {
        max_grade,
        entries: BTreeMap::new(),
        record: None,
    };
    for (m, c) in cur.terms() {
        if m.p != m.q {
            return Err(QnmError::InternalInvariant(format!(
                "non-normal term {m:?} survived"
            )));
        }
        // u^a v^a = (2 Omega)^a
        let v = c.scale_ratio(1i64 << m.p, 1);
        out.set(m.h, m.p, v, Provenance::Engine);
    }
    Ok(out)
}

/// Runs normalization and reduction for a numeric barrier expansion.
pub fn barrier_normal_form(
    exp: &BarrierExpansion<f64>,
    max_grade: u32,
) -> Result<BnfCoefficients<f64>> {
    let nh = normalize_hamiltonian(exp, max_grade)?;
    let mut coeffs = reduce_to_normal_form(&nh.symbol, max_grade)?;
    coeffs.record = Some(nh.record);
    Ok(coeffs)
}

/// Normal form with enough grade for energies of the given order.
pub fn normal_form_for_order(
    params: &crate::BlackHoleParams,
    order: usize,
) -> Result<BnfCoefficients<f64>> {
    let grade = (2 * super::energy::effective_order(order)).max(4);
    if grade > crate::barrier::MAX_TAYLOR_ORDER {
        return Err(QnmError::Configuration(format!(
            "order {order} needs grade {grade}, above the supported {}",
            crate::barrier::MAX_TAYLOR_ORDER
        )));
    }
    let exp = crate::barrier::taylor_expand(params, grade)?;
    barrier_normal_form(&exp, grade as u32)
}

/// The printed closed forms, evaluated on normalized coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub b02: f64,
    pub b12: f64,
    pub b20_dsrn: f64,
    pub b20_dss: f64,
}

impl ClosedForms {
    pub fn from_parameters(a3: f64, a4: f64, c1: f64, c2: f64, d0: f64) -> Self {
        ClosedForms {
            b02: 15.0 / 4.0 * a3 * a3 + 1.5 * a4,
            b12: -3.0 * c1 * a3 - c2,
            b20_dsrn: a3 * a3 - 0.5 * c1 * c1,
            b20_dss: a3 * a3 + d0,
        }
    }

    pub fn from_record(r: &NormalizationRecord) -> Self {
        Self::from_parameters(
            r.get("a3"),
            r.get("a4"),
            r.get("c1"),
            r.get("c2"),
            r.get("d0"),
        )
    }
}

/// b02 written through the barrier derivatives: 15/(4 144) V0'''^2/omega^5 + V0''''/(32 omega^3).
pub fn theorem_b02(v0_third: f64, v0_fourth: f64, omega: f64) -> f64 {
    15.0 / (4.0 * 144.0) * v0_third * v0_third / omega.powi(5) + v0_fourth / (32.0 * omega.powi(3))
}

/// The two b12 candidates in circulation for the dSRN lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct B12Candidates {
    /// 1/(8 z0^3) - 3 V0'''/(8 z0 omega^2)
    pub candidate_a: f64,
    /// -3 c1 a3 - c2 with the printed c2, i.e. -1/(8 z0^3) - V0'''/(8 z0 omega^2)
    pub candidate_b: f64,
}

impl B12Candidates {
    pub fn new(z0: f64, omega: f64, v0_third: f64) -> Self {
        let a3 = v0_third / (12.0 * omega.powf(2.5));
        let c1 = -omega.sqrt() / (2.0 * z0);
        B12Candidates {
            candidate_a: 1.0 / (8.0 * z0.powi(3)) - 3.0 * v0_third / (8.0 * z0 * omega * omega),
            candidate_b: -3.0 * c1 * a3 - printed_c2(z0, omega, v0_third),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnf::coefficient::ParamPoly;

    fn var(s: &str) -> ParamPoly {
        ParamPoly::var(s)
    }

    #[test]
    fn symbolic_grade_four() {
        let zero = ParamPoly::zero();
        let coeffs = ModelCoefficients {
            a: vec![
                zero.clone(),
                zero.clone(),
                zero.clone(),
                var("a3"),
                var("a4"),
            ],
            c: vec![zero.clone(), var("c1"), var("c2")],
            d: vec![var("d0")],
        };
        let b = reduce_to_normal_form(&model_symbol(&coeffs, 4), 4).unwrap();
        assert_eq!(b.get(0, 1), ParamPoly::from_ratio(1, 1));
        let b02 = var("a3")
            .mul_ref(&var("a3"))
            .scale_ratio(15, 4)
            .add_ref(&var("a4").scale_ratio(3, 2));
        assert_eq!(b.b02(), b02);
        let b12 = var("c1")
            .mul_ref(&var("a3"))
            .scale_ratio(-3, 1)
            .sub_ref(&var("c2"));
        assert_eq!(b.b12(), b12);
        let b20 = var("a3")
            .mul_ref(&var("a3"))
            .scale_ratio(1, 2)
            .add_ref(&var("c1").mul_ref(&var("c1")).scale_ratio(1, 2))
            .add_ref(&var("d0"));
        assert_eq!(b.b20(), b20);
    }
}
