//! Analytic barrier potentials of the form alpha^2 + s h alpha', used as
//! manufactured test operators.

use super::scaling::ComplexPotential;
use crate::barrier::BarrierExpansion;
use crate::error::{QnmError, Result};
use crate::geometry::Model;
use num_complex::Complex64;

type ComplexFn = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Taylor coefficients of f at x0 from a Cauchy integral on |z - x0| = radius.
pub fn taylor_coefficients(
    f: &dyn Fn(Complex64) -> Complex64,
    x0: f64,
    radius: f64,
    count: usize,
) -> Vec<f64> {
    let m = 128.max(4 * count);
    let vals: Vec<Complex64> = (0..m)
        .map(|j| {
            f(Complex64::new(x0, 0.0)
                + Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / m as f64))
        })
        .collect();
    (0..count)
        .map(|k| {
            let s: Complex64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64,
                    )
                })
                .sum();
            (s / m as f64).re / radius.powi(k as i32)
        })
        .collect()
}

/// sech and tanh without overflow for large |Re z|.
fn sech_tanh(z: Complex64) -> (Complex64, Complex64) {
    let w = if z.re < 0.0 { -z } else { z };
    let e = (-2.0 * w).exp();
    let sech = (-w).exp() * 2.0 / (1.0 + e);
    let tanh = (1.0 - e) / (1.0 + e);
    if z.re < 0.0 {
        (sech, -tanh)
    } else {
        (sech, tanh)
    }
}

/// alpha(x) with its derivative, and the sign of the h alpha' term.
pub struct AnalyticBarrier {
    alpha: ComplexFn,
    alpha_prime: ComplexFn,
    pub x0: f64,
    /// Radius of a disc around x0 where alpha is analytic.
    pub radius: f64,
    pub h: f64,
    pub sign: f64,
    pub max_angle: f64,
}

impl AnalyticBarrier {
    /// Locates the maximum of alpha^2 by Newton iteration from `guess`.
    pub fn new(
        alpha: ComplexFn,
        alpha_prime: ComplexFn,
        guess: f64,
        radius: f64,
        max_angle: f64,
    ) -> Result<Self> {
        let mut b = AnalyticBarrier {
            alpha,
            alpha_prime,
            x0: guess,
            radius,
            h: 0.0,
            sign: 1.0,
            max_angle,
        };
        for _ in 0..60 {
            let t = b.v0_taylor(3);
            let step = t[1] / (2.0 * t[2]);
            b.x0 -= step;
            if step.abs() < 1e-15 * (1.0 + b.x0.abs()) {
                break;
            }
        }
        let t = b.v0_taylor(3);
        if !(t[1].abs() < 1e-10 && t[2] < 0.0 && t[0] > 0.0) {
            return Err(QnmError::Domain(format!(
                "no non-degenerate barrier top near {guess}"
            )));
        }
        Ok(b)
    }

    /// alpha = a sech(b x) exp(eps tanh(b x)), analytic for |Im x| < pi/(2b).
    pub fn skewed_sech(a: f64, b: f64, eps: f64) -> Result<Self> {
        let alpha = move |z: Complex64| {
            let (sech, tanh) = sech_tanh(z * b);
            sech * a * (tanh * eps).exp()
        };
        let alpha_prime = move |z: Complex64| {
            let (sech, t) = sech_tanh(z * b);
            sech * a * (t * eps).exp() * b * (eps * (1.0 - t * t) - t)
        };
        let radius = 0.4 * std::f64::consts::PI / (2.0 * b);
        Self::new(
            Box::new(alpha),
            Box::new(alpha_prime),
            0.0,
            radius,
            std::f64::consts::PI / 5.0,
        )
    }

    pub fn with_h(mut self, h: f64, sign: f64) -> Self {
        self.h = h;
        self.sign = sign;
        self
    }

    pub fn alpha(&self, z: Complex64) -> Complex64 {
        (self.alpha)(z)
    }

    pub fn alpha_prime(&self, z: Complex64) -> Complex64 {
        (self.alpha_prime)(z)
    }

    fn v0_taylor(&self, count: usize) -> Vec<f64> {
        let f = |z: Complex64| {
            let a = (self.alpha)(z);
            a * a
        };
        taylor_coefficients(&f, self.x0, self.radius, count)
    }

    /// Taylor data of alpha^2 + h alpha' at the barrier top, in the dSRN layout.
    pub fn expansion(&self, order: usize) -> BarrierExpansion<f64> {
        let h0 = self.v0_taylor(order + 1);
        let h1 = taylor_coefficients(
            &|z| (self.alpha_prime)(z) * self.sign,
            self.x0,
            self.radius,
            order + 1,
        );
        let alpha = taylor_coefficients(&|z| (self.alpha)(z), self.x0, self.radius, order + 3);
        let mut fact = 1.0;
        let v0_derivatives = h0
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j > 0 {
                    fact *= j as f64;
                }
                c * fact
            })
            .collect();
        let mut fact = 1.0;
        let alpha_derivatives = alpha
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j > 0 {
                    fact *= j as f64;
                }
                c * fact
            })
            .collect();
        BarrierExpansion {
            model: Model::Dsrn,
            order,
            r0: f64::NAN,
            x0: self.x0,
            z0: h0[0].sqrt(),
            omega: (-h0[2]).sqrt(),
            taylor_h0: h0,
            taylor_h1: h1,
            taylor_h2: vec![0.0; order + 1],
            v0_derivatives,
            alpha_derivatives,
        }
    }
}

impl ComplexPotential for AnalyticBarrier {
    fn on_ray(&self, theta: f64, ys: &[f64]) -> Result<Vec<Complex64>> {
        let e = Complex64::from_polar(1.0, theta);
        Ok(ys
            .iter()
            .map(|&y| {
                let z = self.x0 + e * y;
                let a = (self.alpha)(z);
                a * a + (self.alpha_prime)(z) * (self.sign * self.h)
            })
            .collect())
    }

    fn barrier_height(&self) -> f64 {
        let a = (self.alpha)(Complex64::new(self.x0, 0.0)).re;
        a * a
    }

    fn max_angle(&self) -> f64 {
        self.max_angle
    }
}
