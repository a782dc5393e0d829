//! Resonance energies from the normal form.
//!
//! The normal form is a Weyl symbol sum b_{m,a} h^m Omega^a with pointwise
//! powers of Omega. On the k-th oscillator state the star powers Omega^(*q)
//! act as varpi^q with varpi = -i h (2k+1)/2, so pointwise powers are first
//! rewritten as star powers.

use super::coefficient::Coefficient;
use super::normal_form::BnfCoefficients;
use super::symbol::{Basis, GradedSymbol};
use crate::error::{QnmError, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use std::collections::BTreeMap;

type Table<C> = Vec<BTreeMap<(u32, u32), C>>;

/// Entry a maps (m, q) to the coefficient of h^m Omega^q (pointwise) in Omega^(*a).
pub fn star_powers<C: Coefficient>(max_power: u32) -> Result<Table<C>> {
    let cap = 2 * max_power;
    let omega = GradedSymbol::<C>::omega(Basis::UV, cap);
    let mut cur = GradedSymbol::monomial(
        Basis::UV,
        cap,
        super::symbol::Monomial::new(0, 0, 0),
        C::one(),
    );
    let mut out = Vec::new();
    for a in 0..=max_power {
        if a > 0 {
            let (re, im) = cur.star_product(&omega);
            if !im.is_zero() {
                return Err(QnmError::InternalInvariant(
                    "star power of Omega has an imaginary part".into(),
                ));
            }
            cur = re;
        }
        let mut row = BTreeMap::new();
        for (m, c) in cur.terms() {
            if m.p != m.q {
                return Err(QnmError::InternalInvariant(
                    "star power of Omega is not a function of Omega".into(),
                ));
            }
            row.insert((m.h, m.p), c.scale_ratio(1i64 << m.p, 1));
        }
        out.push(row);
    }
    Ok(out)
}

/// Entry a maps (m, q) to the coefficient of h^m Omega^(*q) in the pointwise Omega^a.
pub fn weyl_to_star<C: Coefficient>(max_power: u32) -> Result<Table<C>> {
    let star = star_powers::<C>(max_power)?;
    let mut out: Table<C> = Vec::new();
    for a in 0..=max_power as usize {
        let mut row: BTreeMap<(u32, u32), C> = BTreeMap::new();
        row.insert((0, a as u32), C::one());
        for (&(m, p), s) in &star[a] {
            if (m, p) == (0, a as u32) {
                continue;
            }
            for (&(m2, q), w) in &out[p as usize] {
                let e = row.entry((m + m2, q)).or_insert_with(C::zero);
                *e = e.sub_ref(&s.mul_ref(w));
            }
        }
        row.retain(|_, v| !v.is_zero());
        out.push(row);
    }
    Ok(out)
}

/// Highest energy order available from coefficients computed to `max_grade`.
pub fn max_energy_order(max_grade: u32) -> usize {
    (max_grade / 2) as usize
}

/// Number of h powers kept at a given order: the oscillator term h^1 is
/// always present, so orders 0 and 1 coincide.
pub fn effective_order(order: usize) -> usize {
    order.max(1)
}

/// Coefficients e_0..e_p of E_k = sum_j h^j e_j with p = effective_order(order).
pub fn energy_series(
    coeffs: &BnfCoefficients<f64>,
    k: u32,
    order: usize,
) -> Result<Vec<Complex64>> {
    let record = coeffs.record.as_ref().ok_or_else(|| {
        QnmError::Configuration("normal form carries no normalization record".into())
    })?;
    energy_series_raw(coeffs, record.z0, record.omega, k, order)
}

/// As `energy_series` with explicit barrier height z0^2 and curvature omega.
pub fn energy_series_raw(
    coeffs: &BnfCoefficients<f64>,
    z0: f64,
    omega: f64,
    k: u32,
    order: usize,
) -> Result<Vec<Complex64>> {
    let order = effective_order(order);
    if order > max_energy_order(coeffs.max_grade) {
        return Err(QnmError::Configuration(format!(
            "energy order {order} exceeds the normal-form grade {} (max order {})",
            coeffs.max_grade,
            max_energy_order(coeffs.max_grade)
        )));
    }
    let table = weyl_to_star::<BigRational>(order as u32)?;
    let varpi = Complex64::new(0.0, -(2.0 * k as f64 + 1.0) / 2.0);
    let mut e = vec![Complex64::new(0.0, 0.0); order + 1];
    e[0] = Complex64::new(z0 * z0, 0.0);
    for (&(m, a), entry) in &coeffs.entries {
        if (m + a) as usize > order {
            continue;
        }
        for (&(m2, q), w) in &table[a as usize] {
            let power = (m + m2 + q) as usize;
            if power <= order {
                let w = w.to_f64().expect("rational weight");
                e[power] += 2.0 * omega * entry.value * w * varpi.powu(q);
            }
        }
    }
    Ok(e)
}

pub fn energy_expansion(
    coeffs: &BnfCoefficients<f64>,
    k: u32,
    h: f64,
    order: usize,
) -> Result<Complex64> {
    let e = energy_series(coeffs, k, order)?;
    Ok(e.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * h + c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_square_star() {
        let t = star_powers::<BigRational>(2).unwrap();
        // Omega * Omega = Omega^2 + h^2/4 for the hyperbolic oscillator
        assert_eq!(t[2].get(&(0, 2)), Some(&BigRational::from_ratio(1, 1)));
        assert_eq!(t[2].get(&(2, 0)), Some(&BigRational::from_ratio(1, 4)));
        let w = weyl_to_star::<BigRational>(2).unwrap();
        assert_eq!(w[2].get(&(2, 0)), Some(&BigRational::from_ratio(-1, 4)));
    }
}
