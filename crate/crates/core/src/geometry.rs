//! Lapse function, horizons and surface gravities.

use crate::error::{QnmError, Result};
use crate::scalar::Real;
use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dsrn,
    Dss,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Dsrn => "dsrn",
            Model::Dss => "dss",
        })
    }
}

impl FromStr for Model {
    type Err = QnmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dsrn" => Ok(Model::Dsrn),
            "dss" => Ok(Model::Dss),
            other => Err(QnmError::Configuration(format!("unknown model `{other}`"))),
        }
    }
}

/// Mass, charge and cosmological constant in geometric units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackHoleParams<T> {
    pub mass: T,
    pub charge: T,
    pub lambda: T,
    pub model: Model,
}

impl<T: Real> BlackHoleParams<T> {
    pub fn new(mass: T, charge: T, lambda: T, model: Model) -> Result<Self> {
        let p = BlackHoleParams {
            mass,
            charge,
            lambda,
            model,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (m, q, l) = (self.mass, self.charge, self.lambda);
        if !(m.is_finite() && q.is_finite() && l.is_finite()) {
            return Err(QnmError::Inadmissible("non-finite parameter".into()));
        }
        if m <= T::zero() {
            return Err(QnmError::Inadmissible(format!(
                "mass must be positive, got {m}"
            )));
        }
        if l < T::zero() {
            return Err(QnmError::Inadmissible(format!(
                "lambda must be non-negative, got {l}"
            )));
        }
        if q * q >= T::lit(9.0 / 8.0) * m * m {
            return Err(QnmError::Inadmissible(format!(
                "charge^2 = {} must be below 9/8 mass^2 = {}",
                q * q,
                T::lit(9.0 / 8.0) * m * m
            )));
        }
        if self.model == Model::Dss && q != T::zero() {
            return Err(QnmError::Configuration(format!(
                "model dss requires charge = 0, got {q}"
            )));
        }
        Ok(())
    }

    pub fn lapse(&self, r: T) -> Result<T> {
        if r == T::zero() {
            return Err(QnmError::Domain("lapse evaluated at r = 0".into()));
        }
        Ok(self.lapse_unchecked(r))
    }

    pub(crate) fn lapse_unchecked(&self, r: T) -> T {
        let (m, q, l) = (self.mass, self.charge, self.lambda);
        T::one() - T::lit(2.0) * m / r + q * q / (r * r) - l / T::lit(3.0) * r * r
    }

    pub fn lapse_complex(&self, r: Complex<T>) -> Result<Complex<T>> {
        if r.re == T::zero() && r.im == T::zero() {
            return Err(QnmError::Domain("lapse evaluated at r = 0".into()));
        }
        let (m, q, l) = (self.mass, self.charge, self.lambda);
        let inv = r.inv();
        let one = Complex::new(T::one(), T::zero());
        Ok(one - inv * (T::lit(2.0) * m) + inv * inv * (q * q) - r * r * (l / T::lit(3.0)))
    }

    /// dF/dr.
    pub fn lapse_derivative(&self, r: T) -> Result<T> {
        if r == T::zero() {
            return Err(QnmError::Domain(
                "lapse derivative evaluated at r = 0".into(),
            ));
        }
        let (m, q, l) = (self.mass, self.charge, self.lambda);
        Ok(T::lit(2.0) * m / (r * r)
            - T::lit(2.0) * q * q / (r * r * r)
            - T::lit(2.0) * l / T::lit(3.0) * r)
    }

    /// Ascending coefficients of r^2 F(r) = Q^2 - 2Mr + r^2 - (Lambda/3) r^4.
    pub fn lapse_polynomial(&self) -> [T; 5] {
        [
            self.charge * self.charge,
            -T::lit(2.0) * self.mass,
            T::one(),
            T::zero(),
            -self.lambda / T::lit(3.0),
        ]
    }
}

pub fn evaluate_lapse<T: Real>(params: &BlackHoleParams<T>, r: T) -> Result<T> {
    params.lapse(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonKind {
    Negative,
    Cauchy,
    Event,
    Cosmological,
}

impl HorizonKind {
    pub fn label(self) -> &'static str {
        match self {
            HorizonKind::Negative => "r_n",
            HorizonKind::Cauchy => "r_c",
            HorizonKind::Event => "r_-",
            HorizonKind::Cosmological => "r_+",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Horizon<T> {
    pub kind: HorizonKind,
    pub radius: T,
    pub kappa: T,
}

/// Real roots of r^2 F(r), ascending, with surface gravities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonData<T> {
    pub roots: Vec<Horizon<T>>,
}

impl<T: Real> HorizonData<T> {
    fn get(&self, kind: HorizonKind) -> Option<&Horizon<T>> {
        self.roots.iter().find(|h| h.kind == kind)
    }

    pub fn negative(&self) -> &Horizon<T> {
        self.get(HorizonKind::Negative)
            .expect("negative root always present")
    }

    pub fn cauchy(&self) -> Option<&Horizon<T>> {
        self.get(HorizonKind::Cauchy)
    }

    pub fn event(&self) -> &Horizon<T> {
        self.get(HorizonKind::Event)
            .expect("event horizon always present")
    }

    pub fn cosmological(&self) -> &Horizon<T> {
        self.get(HorizonKind::Cosmological)
            .expect("cosmological horizon always present")
    }

    pub fn radii(&self) -> Vec<T> {
        self.roots.iter().map(|h| h.radius).collect()
    }

    pub fn kappas(&self) -> Vec<T> {
        self.roots.iter().map(|h| h.kappa).collect()
    }

    /// min(kappa_-, |kappa_+|).
    pub fn min_exterior_kappa(&self) -> T {
        self.event().kappa.min(self.cosmological().kappa.abs())
    }
}

fn eval_poly<T: Real>(coeffs: &[T], r: T) -> (T, T) {
    let mut p = T::zero();
    let mut dp = T::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * r + p;
        p = p * r + c;
    }
    (p, dp)
}

fn companion_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -coeffs[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

fn discriminant<T: Real>(params: &BlackHoleParams<T>) -> T {
    let [e, d, c, _, a] = params.lapse_polynomial();
    if params.charge == T::zero() {
        // a r^3 + c r + d after removing the factor r
        -T::lit(4.0) * a * c * c * c - T::lit(27.0) * a * a * d * d
    } else {
        T::lit(256.0) * a * a * a * e * e * e - T::lit(128.0) * a * a * c * c * e * e
            + T::lit(144.0) * a * a * c * d * d * e
            - T::lit(27.0) * a * a * d * d * d * d
            + T::lit(16.0) * a * c * c * c * c * e
            - T::lit(4.0) * a * c * c * c * d * d
    }
}

pub fn find_horizons<T: Real>(params: &BlackHoleParams<T>) -> Result<HorizonData<T>> {
    params.validate()?;
    if params.lambda <= T::zero() {
        return Err(QnmError::Inadmissible(
            "horizon structure requires lambda > 0".into(),
        ));
    }
    let full = params.lapse_polynomial();
    let poly: Vec<T> = if params.charge == T::zero() {
        full[1..].to_vec()
    } else {
        full.to_vec()
    };
    let needed = if params.charge == T::zero() { 3 } else { 4 };
    let coeffs64: Vec<f64> = poly.iter().map(|c| c.as_f64()).collect();
    let mut real: Vec<T> = Vec::new();
    for z in companion_roots(&coeffs64) {
        if z.im.abs() > 1e-7 * z.re.abs().max(1.0) {
            continue;
        }
        let mut r = T::lit(z.re);
        for _ in 0..8 {
            let (p, dp) = eval_poly(&poly, r);
            if dp == T::zero() {
                break;
            }
            let step = p / dp;
            r = r - step;
            if step.abs() <= T::epsilon() * r.abs() {
                break;
            }
        }
        real.push(r);
    }
    real.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    let diag = || {
        format!(
            "found {} real roots of r^2 F, need {}; discriminant = {:e}",
            real.len(),
            needed,
            discriminant(params).as_f64()
        )
    };
    if real.len() != needed {
        return Err(QnmError::Inadmissible(diag()));
    }
    for w in real.windows(2) {
        if (w[1] - w[0]).abs() <= T::lit(1e-7) * w[1].abs().max(T::one()) {
            return Err(QnmError::Inadmissible(format!(
                "merged horizons; {}",
                diag()
            )));
        }
    }
    let kinds: &[HorizonKind] = if needed == 3 {
        &[
            HorizonKind::Negative,
            HorizonKind::Event,
            HorizonKind::Cosmological,
        ]
    } else {
        &[
            HorizonKind::Negative,
            HorizonKind::Cauchy,
            HorizonKind::Event,
            HorizonKind::Cosmological,
        ]
    };
    if real[0] >= T::zero() || real[1] <= T::zero() {
        return Err(QnmError::Inadmissible(format!(
            "root ordering violated: {:?}",
            real
        )));
    }
    let kappas = surface_gravities(params, &real)?;
    let roots = real
        .iter()
        .zip(kappas)
        .zip(kinds)
        .map(|((&radius, kappa), &kind)| Horizon {
            kind,
            radius,
            kappa,
        })
        .collect::<Vec<_>>();
    let data = HorizonData { roots };
    if !(data.event().kappa > T::zero() && data.cosmological().kappa < T::zero()) {
        return Err(QnmError::Inadmissible(
            "surface gravity sign pattern violated".into(),
        ));
    }
    Ok(data)
}

pub fn surface_gravities<T: Real>(params: &BlackHoleParams<T>, roots: &[T]) -> Result<Vec<T>> {
    roots
        .iter()
        .map(|&r| {
            let slope = params.lapse_derivative(r)?;
            if slope.abs() < T::lit(1e-10) {
                return Err(QnmError::DegenerateHorizon {
                    radius: r.as_f64(),
                    slope: slope.as_f64(),
                });
            }
            Ok(slope / T::lit(2.0))
        })
        .collect()
}
