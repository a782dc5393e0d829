//! Polynomial symbols in two phase-space variables and h, with Moyal brackets.

use super::coefficient::Coefficient;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Phase-space coordinates of a symbol.
///
/// `XXi`: monomials x^i xi^j. `UV`: monomials u^i v^j with u = xi - x and
/// v = xi + x, in which Omega = (xi^2 - x^2)/2 = uv/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    XXi,
    UV,
}

/// Exponents (first variable, second variable, h).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub p: u32,
    pub q: u32,
    pub h: u32,
}

impl Monomial {
    pub const fn new(p: u32, q: u32, h: u32) -> Self {
        Monomial { p, q, h }
    }

    /// Total grade p + q + 2h.
    pub fn grade(&self) -> u32 {
        self.p + self.q + 2 * self.h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedSymbol<C> {
    pub basis: Basis,
    pub max_grade: u32,
    terms: BTreeMap<Monomial, C>,
}

fn falling(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64)
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

impl<C: Coefficient> GradedSymbol<C> {
    pub fn zero(basis: Basis, max_grade: u32) -> Self {
        GradedSymbol {
            basis,
            max_grade,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(basis: Basis, max_grade: u32, mono: Monomial, c: C) -> Self {
        let mut s = Self::zero(basis, max_grade);
        s.add_term(mono, c);
        s
    }

    /// Omega = (xi^2 - x^2)/2 in the requested basis.
    pub fn omega(basis: Basis, max_grade: u32) -> Self {
        match basis {
            Basis::XXi => {
                let mut s = Self::zero(basis, max_grade);
                s.add_term(Monomial::new(0, 2, 0), C::from_ratio(1, 2));
                s.add_term(Monomial::new(2, 0, 0), C::from_ratio(-1, 2));
                s
            }
            Basis::UV => Self::monomial(
                basis,
                max_grade,
                Monomial::new(1, 1, 0),
                C::from_ratio(1, 2),
            ),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: Monomial) -> C {
        self.terms.get(&mono).cloned().unwrap_or_else(C::zero)
    }

    /// Highest grade among the stored terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.grade()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: Monomial, c: C) {
        if mono.grade() > self.max_grade || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                let sum = existing.add_ref(&c);
                if sum.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn with_max_grade(&self, max_grade: u32) -> Self {
        let mut out = Self::zero(self.basis, max_grade);
        for (m, c) in &self.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    /// Terms of exactly the given grade.
    pub fn grade_part(&self, grade: u32) -> Self {
        let mut out = Self::zero(self.basis, self.max_grade);
        for (m, c) in self.terms.iter().filter(|(m, _)| m.grade() == grade) {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        let mut out = self.with_max_grade(self.max_grade.min(other.max_grade));
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_ratio(-1, 1))
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.basis, self.max_grade);
        for (m, c) in &self.terms {
            out.add_term(*m, c.mul_ref(s));
        }
        out
    }

    pub fn scale_ratio(&self, num: i64, den: i64) -> Self {
        let mut out = Self::zero(self.basis, self.max_grade);
        for (m, c) in &self.terms {
            out.add_term(*m, c.scale_ratio(num, den));
        }
        out
    }

    /// Multiplies by h^k.
    pub fn shift_h(&self, k: u32) -> Self {
        let mut out = Self::zero(self.basis, self.max_grade);
        for (m, c) in &self.terms {
            out.add_term(Monomial::new(m.p, m.q, m.h + k), c.clone());
        }
        out
    }

    /// Pointwise product, truncated at the smaller max grade.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        let mut out = Self::zero(self.basis, self.max_grade.min(other.max_grade));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = Monomial::new(ma.p + mb.p, ma.q + mb.q, ma.h + mb.h);
                if m.grade() <= out.max_grade {
                    out.add_term(m, ca.mul_ref(cb));
                }
            }
        }
        out
    }

    /// d^a/dp^a d^b/dq^b in the symbol's own variables.
    pub fn derivative(&self, a: u32, b: u32) -> Self {
        let mut out = Self::zero(self.basis, self.max_grade);
        for (m, c) in &self.terms {
            if m.p >= a && m.q >= b {
                let f = falling(m.p, a) * falling(m.q, b);
                out.add_term(Monomial::new(m.p - a, m.q - b, m.h), c.scale_ratio(f, 1));
            }
        }
        out
    }

    /// The j-th Moyal bracket {a,b}_j. In the (x, xi) basis
    /// {a,b}_j = sum_n C(j,n) (-1)^n d_x^n d_xi^(j-n) a d_x^(j-n) d_xi^n b,
    /// so that {a,b}_1 = a_xi b_x - a_x b_xi. In the (u, v) basis the same
    /// bracket reads 2^j sum_n C(j,n) (-1)^n d_u^(j-n) d_v^n a d_u^n d_v^(j-n) b.
    /// Terms above the operands' grade cap are dropped.
    pub fn moyal_bracket(&self, other: &Self, j: u32) -> Self {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        let cap = self.max_grade.min(other.max_grade);
        let mut out = Self::zero(self.basis, cap);
        for n in 0..=j {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let weight = binomial(j, n) * sign;
            let (da, db) = match self.basis {
                Basis::XXi => (self.derivative(n, j - n), other.derivative(j - n, n)),
                Basis::UV => (self.derivative(j - n, n), other.derivative(n, j - n)),
            };
            if da.is_zero() || db.is_zero() {
                continue;
            }
            let mut prod = Self::zero(self.basis, u32::MAX);
            for (ma, ca) in &da.terms {
                for (mb, cb) in &db.terms {
                    let m = Monomial::new(ma.p + mb.p, ma.q + mb.q, ma.h + mb.h);
                    prod.add_term(m, ca.mul_ref(cb));
                }
            }
            let scale = match self.basis {
                Basis::XXi => weight,
                Basis::UV => weight * (1i64 << j),
            };
            for (m, c) in prod.terms {
                if m.grade() <= cap {
                    out.add_term(m, c.scale_ratio(scale, 1));
                }
            }
        }
        out
    }

    /// Largest j for which {self, other}_j can be nonzero.
    fn bracket_depth(&self, other: &Self) -> u32 {
        let deg = |s: &Self| s.terms.keys().map(|m| m.p + m.q).max().unwrap_or(0);
        deg(self).min(deg(other))
    }

    /// L_S(b) = (i/h)[S, b]_star = sum_{j odd} h^(j-1) (-1)^((j-1)/2) / (2^(j-1) j!) {S, b}_j.
    pub fn lie_derivative(&self, b: &Self) -> Self {
        let cap = self.max_grade.min(b.max_grade);
        let mut out = Self::zero(self.basis, cap);
        let depth = self.bracket_depth(b);
        let mut j = 1;
        while j <= depth {
            let sign = if ((j - 1) / 2) % 2 == 0 { 1 } else { -1 };
            let den = (1i64 << (j - 1)) * factorial(j);
            let br = self.moyal_bracket(b, j);
            let term = br.shift_h(j - 1).scale_ratio(sign, den);
            out = out.add(&term);
            j += 2;
        }
        out
    }

    /// exp(L_S) b truncated at the grade cap.
    pub fn lie_exponential(&self, b: &Self) -> Self {
        let mut result = b.clone();
        let mut term = b.clone();
        let mut k = 1i64;
        loop {
            term = self.lie_derivative(&term).scale_ratio(1, k);
            if term.is_zero() {
                return result;
            }
            result = result.add(&term);
            k += 1;
        }
    }

    /// Real and imaginary parts of a star b for real-coefficient a, b:
    /// a star b = sum_j (1/j!) (h/2i)^j {a,b}_j.
    pub fn star_product(&self, other: &Self) -> (Self, Self) {
        let cap = self.max_grade.min(other.max_grade);
        let mut re = Self::zero(self.basis, cap);
        let mut im = Self::zero(self.basis, cap);
        let depth = self.bracket_depth(other);
        re = re.add(&self.mul(other));
        for j in 1..=depth {
            let br = self.moyal_bracket(other, j).shift_h(j);
            let den = (1i64 << j) * factorial(j);
            if j % 2 == 0 {
                let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
                re = re.add(&br.scale_ratio(sign, den));
            } else {
                let sign = if ((j - 1) / 2) % 2 == 0 { -1 } else { 1 };
                im = im.add(&br.scale_ratio(sign, den));
            }
        }
        (re, im)
    }

    /// Change of phase-space coordinates between (x, xi) and (u, v).
    pub fn to_basis(&self, target: Basis) -> Self {
        if self.basis == target {
            return self.clone();
        }
        // XXi -> UV: x = (v - u)/2, xi = (u + v)/2.
        // UV -> XXi: u = xi - x, v = xi + x.
        let (first, second) = match target {
            Basis::UV => (
                lin::<C>(target, self.max_grade, (-1, 2), (1, 2)),
                lin::<C>(target, self.max_grade, (1, 2), (1, 2)),
            ),
            Basis::XXi => (
                lin::<C>(target, self.max_grade, (-1, 1), (1, 1)),
                lin::<C>(target, self.max_grade, (1, 1), (1, 1)),
            ),
        };
        let mut out = Self::zero(target, self.max_grade);
        let mut cache_a: Vec<Self> = vec![Self::monomial(
            target,
            self.max_grade,
            Monomial::new(0, 0, 0),
            C::one(),
        )];
        let mut cache_b = cache_a.clone();
        for (m, c) in &self.terms {
            while cache_a.len() <= m.p as usize {
                let next = cache_a.last().unwrap().mul(&first);
                cache_a.push(next);
            }
            while cache_b.len() <= m.q as usize {
                let next = cache_b.last().unwrap().mul(&second);
                cache_b.push(next);
            }
            let piece = cache_a[m.p as usize]
                .mul(&cache_b[m.q as usize])
                .shift_h(m.h)
                .scale(c);
            out = out.add(&piece);
        }
        out
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> GradedSymbol<D> {
        let mut out = GradedSymbol::zero(self.basis, self.max_grade);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }
}

/// Linear form a*first + b*second of the target basis variables, where the
/// ratios give the coefficients of the target's (p, q) variables.
fn lin<C: Coefficient>(basis: Basis, cap: u32, a: (i64, i64), b: (i64, i64)) -> GradedSymbol<C> {
    let mut s = GradedSymbol::zero(basis, cap);
    s.add_term(Monomial::new(1, 0, 0), C::from_ratio(a.0, a.1));
    s.add_term(Monomial::new(0, 1, 0), C::from_ratio(b.0, b.1));
    s
}

/// Complex-coefficient symbol stored as real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSymbol<C> {
    pub re: GradedSymbol<C>,
    pub im: GradedSymbol<C>,
}

impl<C: Coefficient> ComplexSymbol<C> {
    pub fn real(re: GradedSymbol<C>) -> Self {
        let im = GradedSymbol::zero(re.basis, re.max_grade);
        ComplexSymbol { re, im }
    }

    pub fn star_product(&self, other: &Self) -> Self {
        let (rr_r, rr_i) = self.re.star_product(&other.re);
        let (ii_r, ii_i) = self.im.star_product(&other.im);
        let (ri_r, ri_i) = self.re.star_product(&other.im);
        let (ir_r, ir_i) = self.im.star_product(&other.re);
        ComplexSymbol {
            re: rr_r.sub(&ii_r).sub(&ri_i).sub(&ir_i),
            im: rr_i.sub(&ii_i).add(&ri_r).add(&ir_r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn bracket_examples() {
        let xi2 = GradedSymbol::monomial(Basis::XXi, 12, Monomial::new(0, 2, 0), q(1, 1));
        let x2 = GradedSymbol::monomial(Basis::XXi, 12, Monomial::new(2, 0, 0), q(1, 1));
        let br = xi2.moyal_bracket(&x2, 1);
        assert_eq!(
            br,
            GradedSymbol::monomial(Basis::XXi, 12, Monomial::new(1, 1, 0), q(4, 1))
        );
    }

    #[test]
    fn uv_round_trip_and_omega() {
        let om = GradedSymbol::<Q>::omega(Basis::XXi, 8);
        assert_eq!(om.to_basis(Basis::UV), GradedSymbol::omega(Basis::UV, 8));
        let mut s = GradedSymbol::<Q>::zero(Basis::XXi, 8);
        s.add_term(Monomial::new(3, 1, 1), q(2, 3));
        s.add_term(Monomial::new(0, 5, 0), q(-1, 7));
        assert_eq!(s.to_basis(Basis::UV).to_basis(Basis::XXi), s);
    }

    #[test]
    fn bracket_is_basis_covariant() {
        let mut a = GradedSymbol::<Q>::zero(Basis::XXi, 10);
        a.add_term(Monomial::new(2, 1, 0), q(1, 1));
        a.add_term(Monomial::new(0, 3, 1), q(-2, 3));
        let mut b = GradedSymbol::<Q>::zero(Basis::XXi, 10);
        b.add_term(Monomial::new(3, 0, 0), q(5, 1));
        b.add_term(Monomial::new(1, 2, 0), q(1, 2));
        for j in 1..=3 {
            let direct = a.moyal_bracket(&b, j).to_basis(Basis::UV);
            let via = a
                .to_basis(Basis::UV)
                .moyal_bracket(&b.to_basis(Basis::UV), j);
            assert_eq!(direct, via, "j = {j}");
        }
    }

    #[test]
    fn commutator_matches_star_product() {
        let mut a = GradedSymbol::<Q>::zero(Basis::XXi, 10);
        a.add_term(Monomial::new(2, 1, 0), q(1, 1));
        a.add_term(Monomial::new(0, 3, 0), q(-2, 3));
        let mut b = GradedSymbol::<Q>::zero(Basis::XXi, 10);
        b.add_term(Monomial::new(4, 0, 0), q(5, 1));
        b.add_term(Monomial::new(1, 2, 0), q(1, 2));
        let (ab_r, ab_i) = a.star_product(&b);
        let (ba_r, ba_i) = b.star_product(&a);
        // (i/h)(a*b - b*a): real part = -(Im commutator)/h
        assert_eq!(ab_r.sub(&ba_r), GradedSymbol::zero(Basis::XXi, 10));
        let comm_im = ab_i.sub(&ba_i);
        let lie = a.lie_derivative(&b).shift_h(1);
        assert_eq!(comm_im.scale_ratio(-1, 1), lie);
    }
}
