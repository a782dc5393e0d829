//! Barrier top location and graded Taylor data of the semiclassical potential.
//!
//! Every x-derivative is computed exactly in r: the lapse is a Laurent
//! polynomial in r, d/dx = F d/dr maps Laurent polynomials to Laurent
//! polynomials, and the x-derivatives of alpha = sqrt(F)/r are sqrt(F) times
//! a Laurent polynomial.

use crate::error::{QnmError, Result};
use crate::geometry::{BlackHoleParams, Model};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

pub const MAX_TAYLOR_ORDER: usize = 12;
pub const DEFAULT_TAYLOR_ORDER: usize = 8;

/// Finite Laurent polynomial sum_k c_k r^(low + k).
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<T> {
    low: i32,
    coeffs: Vec<T>,
}

impl<T: Real> Laurent<T> {
    pub fn monomial(c: T, power: i32) -> Self {
        Laurent {
            low: power,
            coeffs: vec![c],
        }
    }

    pub fn from_terms(terms: &[(i32, T)]) -> Self {
        let low = terms.iter().map(|t| t.0).min().unwrap_or(0);
        let high = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut coeffs = vec![T::zero(); (high - low + 1) as usize];
        for &(p, c) in terms {
            coeffs[(p - low) as usize] = coeffs[(p - low) as usize] + c;
        }
        Laurent { low, coeffs }
    }

    pub fn eval(&self, r: T) -> T {
        let mut acc = T::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * r + c;
        }
        acc * r.powi(self.low)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * T::int((self.low + k as i32) as i64))
            .collect();
        Laurent {
            low: self.low - 1,
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let low = self.low.min(other.low);
        let high = (self.low + self.coeffs.len() as i32).max(other.low + other.coeffs.len() as i32);
        let mut coeffs = vec![T::zero(); (high - low) as usize];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + k] = coeffs[(self.low - low) as usize + k] + c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            coeffs[(other.low - low) as usize + k] = coeffs[(other.low - low) as usize + k] + c;
        }
        Laurent { low, coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j] + a * b;
            }
        }
        Laurent {
            low: self.low + other.low,
            coeffs,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Laurent {
            low: self.low,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }
}

/// Laurent data of the lapse and of the potentials for one parameter set.
pub struct RadialCalculus<T> {
    pub lapse: Laurent<T>,
    pub lapse_r: Laurent<T>,
}

impl<T: Real> RadialCalculus<T> {
    pub fn new(params: &BlackHoleParams<T>) -> Self {
        let (m, q, l) = (params.mass, params.charge, params.lambda);
        let lapse = Laurent::from_terms(&[
            (0, T::one()),
            (-1, -T::lit(2.0) * m),
            (-2, q * q),
            (2, -l / T::lit(3.0)),
        ]);
        let lapse_r = lapse.derivative();
        RadialCalculus { lapse, lapse_r }
    }

    /// d/dx = F d/dr.
    pub fn dx(&self, g: &Laurent<T>) -> Laurent<T> {
        self.lapse.mul(&g.derivative())
    }

    /// V0 = F / r^2.
    pub fn v0(&self) -> Laurent<T> {
        self.lapse.mul(&Laurent::monomial(T::one(), -2))
    }

    /// L_j with d^j alpha / dx^j = sqrt(F) L_j.
    pub fn alpha_factors(&self, count: usize) -> Vec<Laurent<T>> {
        let mut out = vec![Laurent::monomial(T::one(), -1)];
        let half_fr = self.lapse_r.scale(T::lit(0.5));
        while out.len() < count {
            let l = out.last().unwrap();
            let next = half_fr.mul(l).add(&self.dx(l));
            out.push(next);
        }
        out
    }

    /// h^2 part of the dSS potential: 2 alpha^3 alpha' r^3 + 2 alpha^4 r^2 = 2F^2 (L_1 + r^-2).
    pub fn dss_h2(&self) -> Laurent<T> {
        let l1 = &self.alpha_factors(2)[1];
        let f2 = self.lapse.mul(&self.lapse).scale(T::lit(2.0));
        f2.mul(&l1.add(&Laurent::monomial(T::one(), -2)))
    }

    /// Successive x-derivatives g, g', ..., g^(count-1) as Laurent polynomials.
    pub fn x_derivatives(&self, g: &Laurent<T>, count: usize) -> Vec<Laurent<T>> {
        let mut out = vec![g.clone()];
        while out.len() < count {
            let next = self.dx(out.last().unwrap());
            out.push(next);
        }
        out
    }
}

pub fn photon_sphere_radius<T: Real>(params: &BlackHoleParams<T>) -> T {
    let (m, q) = (params.mass, params.charge);
    (T::lit(3.0) * m + (T::lit(9.0) * m * m - T::lit(8.0) * q * q).sqrt()) / T::lit(2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierLocation<T> {
    pub r0: T,
    pub x0: T,
    pub z0: T,
    pub omega: T,
}

pub fn locate_barrier<T: Real>(params: &BlackHoleParams<T>) -> Result<BarrierLocation<T>> {
    params.validate()?;
    let calc = RadialCalculus::new(params);
    let r0 = photon_sphere_radius(params);
    let f0 = calc.lapse.eval(r0);
    if f0 <= T::zero() {
        return Err(QnmError::Inadmissible(format!(
            "lapse non-positive at the photon sphere: F(r0) = {f0}"
        )));
    }
    let v0 = calc.v0();
    let dv = v0.derivative();
    let eps = T::lit(1e-4) * r0;
    let (left, right) = (dv.eval(r0 - eps), dv.eval(r0 + eps));
    if !(left > T::zero() && right < T::zero()) {
        return Err(QnmError::InternalInvariant(format!(
            "V0' does not change sign across r0: {left} / {right}"
        )));
    }
    let v2 = calc.dx(&calc.dx(&v0)).eval(r0);
    Ok(BarrierLocation {
        r0,
        x0: T::zero(),
        z0: v0.eval(r0).sqrt(),
        omega: (v2.abs() / T::lit(2.0)).sqrt(),
    })
}

/// Taylor data at the barrier top. Entry m of each grade vector is the
/// coefficient of (x - x0)^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierExpansion<T> {
    pub model: Model,
    pub order: usize,
    pub r0: T,
    pub x0: T,
    pub z0: T,
    pub omega: T,
    pub taylor_h0: Vec<T>,
    pub taylor_h1: Vec<T>,
    pub taylor_h2: Vec<T>,
    /// d^m V0 / dx^m at x0.
    pub v0_derivatives: Vec<T>,
    /// d^m alpha / dx^m at x0.
    pub alpha_derivatives: Vec<T>,
}

impl<T: Real> BarrierExpansion<T> {
    pub fn grade(&self, m: usize) -> &[T] {
        match m {
            0 => &self.taylor_h0,
            1 => &self.taylor_h1,
            _ => &self.taylor_h2,
        }
    }

    /// Evaluates the truncated expansion sum_m h^m sum_j c_j dx^j.
    pub fn eval(&self, h: T, dx: T) -> T {
        let poly = |c: &[T]| c.iter().rev().fold(T::zero(), |acc, &a| acc * dx + a);
        poly(&self.taylor_h0) + h * poly(&self.taylor_h1) + h * h * poly(&self.taylor_h2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f = |v: &[T]| v.iter().map(|c| c.as_f64()).collect::<Vec<_>>();
        serde_json::json!({
            "model": self.model.to_string(),
            "order": self.order,
            "r0": self.r0.as_f64(),
            "x0": self.x0.as_f64(),
            "z0": self.z0.as_f64(),
            "omega": self.omega.as_f64(),
            "grades": {
                "h0": f(&self.taylor_h0),
                "h1": f(&self.taylor_h1),
                "h2": f(&self.taylor_h2),
            }
        })
    }
}

fn factorials<T: Real>(n: usize) -> Vec<T> {
    let mut out = vec![T::one()];
    for k in 1..=n {
        out.push(out[k - 1] * T::int(k as i64));
    }
    out
}

pub fn taylor_expand<T: Real>(
    params: &BlackHoleParams<T>,
    order: usize,
) -> Result<BarrierExpansion<T>> {
    if !(4..=MAX_TAYLOR_ORDER).contains(&order) {
        return Err(QnmError::Configuration(format!(
            "Taylor order must lie in 4..={MAX_TAYLOR_ORDER}, got {order}"
        )));
    }
    let loc = locate_barrier(params)?;
    let calc = RadialCalculus::new(params);
    let r0 = loc.r0;
    let fact = factorials::<T>(order + 1);
    let sqrt_f = calc.lapse.eval(r0).sqrt();

    let v0_derivatives: Vec<T> = calc
        .x_derivatives(&calc.v0(), order + 1)
        .iter()
        .map(|g| g.eval(r0))
        .collect();
    let alpha_derivatives: Vec<T> = calc
        .alpha_factors(order + 2)
        .iter()
        .map(|g| sqrt_f * g.eval(r0))
        .collect();
    let taylor_h0: Vec<T> = v0_derivatives
        .iter()
        .zip(&fact)
        .map(|(&d, &f)| d / f)
        .collect();

    let zeros = vec![T::zero(); order + 1];
    let (taylor_h1, taylor_h2) = match params.model {
        Model::Dsrn => {
            let h1 = (0..=order)
                .map(|m| alpha_derivatives[m + 1] / fact[m])
                .collect();
            (h1, zeros)
        }
        Model::Dss => {
            let h2 = calc
                .x_derivatives(&calc.dss_h2(), order + 1)
                .iter()
                .zip(&fact)
                .map(|(g, &f)| g.eval(r0) / f)
                .collect();
            (zeros, h2)
        }
    };
    Ok(BarrierExpansion {
        model: params.model,
        order,
        r0,
        x0: loc.x0,
        z0: loc.z0,
        omega: loc.omega,
        taylor_h0,
        taylor_h1,
        taylor_h2,
        v0_derivatives,
        alpha_derivatives,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub name: String,
    pub chain_rule: f64,
    pub printed: f64,
    pub relative_difference: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedFormulaReport {
    pub checks: Vec<FormulaCheck>,
}

impl PrintedFormulaReport {
    pub fn get(&self, name: &str) -> Option<&FormulaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// The two printed forms of V0'' and the printed V0''' at the barrier top.
pub fn printed_derivatives<T: Real>(params: &BlackHoleParams<T>, r0: T) -> (T, T, T) {
    let (m, q, l) = (params.mass, params.charge, params.lambda);
    let v0 = (m * r0 - q * q - l / T::lit(3.0) * r0.powi(4)) / r0.powi(4);
    let v2a = (T::lit(4.0) * q * q / (r0 * r0) - T::lit(2.0)) * v0 * v0;
    let v2b = -T::lit(2.0) * (T::lit(3.0) * m / r0 - T::lit(4.0) * q * q / (r0 * r0)) * v0 * v0;
    let bracket = T::lit(11.0) * m * r0 - T::lit(18.0) * q * q - T::lit(8.0) * m * r0.powi(3)
        + T::lit(12.0) * q * q * r0 * r0
        + T::lit(4.0 / 3.0) * l * (r0.powi(4) - r0.powi(6));
    let v3 = T::lit(4.0) / r0 * bracket * v0 * v0 * v0;
    (v2a, v2b, v3)
}

pub fn cross_check_printed_formulas<T: Real>(
    params: &BlackHoleParams<T>,
    exp: &BarrierExpansion<T>,
) -> PrintedFormulaReport {
    let (v2a, v2b, v3) = printed_derivatives(params, exp.r0);
    let check = |name: &str, chain: T, printed: T, tol: f64| {
        let (c, p) = (chain.as_f64(), printed.as_f64());
        let rel = (c - p).abs() / c.abs().max(p.abs()).max(f64::MIN_POSITIVE);
        FormulaCheck {
            name: name.into(),
            chain_rule: c,
            printed: p,
            relative_difference: rel,
            pass: rel <= tol,
        }
    };
    let tol = 256.0 * T::epsilon().as_f64();
    PrintedFormulaReport {
        checks: vec![
            check("v0pp_form_a", exp.v0_derivatives[2], v2a, tol),
            check("v0pp_form_b", exp.v0_derivatives[2], v2b, tol),
            check("v0ppp", exp.v0_derivatives[3], v3, 1e-8),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_algebra() {
        let a = Laurent::<f64>::from_terms(&[(-1, 2.0), (1, 3.0)]);
        let b = Laurent::from_terms(&[(0, 1.0), (-2, -1.0)]);
        let r: f64 = 1.7;
        assert!((a.mul(&b).eval(r) - a.eval(r) * b.eval(r)).abs() < 1e-14);
        assert!((a.add(&b).eval(r) - a.eval(r) - b.eval(r)).abs() < 1e-14);
        assert!((a.derivative().eval(r) - (-2.0 / (r * r) + 3.0)).abs() < 1e-14);
    }

    #[test]
    fn schwarzschild_top() {
        let p = BlackHoleParams::new(1.0, 0.0, 0.0, Model::Dss).unwrap();
        let loc = locate_barrier::<f64>(&p).unwrap();
        assert_eq!(loc.r0, 3.0);
        assert!((loc.z0 * loc.z0 - 1.0 / 27.0).abs() < 1e-16);
        assert!((loc.omega - 1.0 / 27.0).abs() < 1e-16);
    }

    #[test]
    fn order_range() {
        let p = BlackHoleParams::new(1.0, 0.0, 0.0, Model::Dss).unwrap();
        assert!(taylor_expand(&p, 3).is_err());
        assert!(taylor_expand(&p, 13).is_err());
    }
}
