//! Tortoise coordinate, its inverse on the real line and on complex
//! contours, and the potentials built from alpha = sqrt(F)/r.

use crate::barrier::photon_sphere_radius;
use crate::error::{QnmError, Result};
use crate::geometry::{find_horizons, HorizonKind};
use crate::numerics::ode::{integrate, OdeFailure, OdeOptions, State};
use crate::{BlackHoleParams, HorizonData};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_CONE_ANGLE: f64 = std::f64::consts::PI / 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartOptions {
    /// Half-aperture of the cone of complex abscissae around the real axis.
    pub cone_angle: f64,
    /// Half-width of the strip added to the cone near x0.
    pub strip_half_width: f64,
    pub table_size: usize,
    pub ode_rtol: f64,
}

impl Default for ChartOptions {
    fn default() -> Self {
        ChartOptions {
            cone_angle: DEFAULT_CONE_ANGLE,
            strip_half_width: 0.5,
            table_size: 512,
            ode_rtol: 1e-13,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct NearHorizon {
    root: f64,
    kappa: f64,
    index: usize,
    /// r = root + side * delta
    side: f64,
    x_switch: f64,
}

/// Real point of the exterior with the horizon gaps kept to full precision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialPoint {
    pub x: f64,
    pub r: f64,
    /// r - r_-
    pub gap_event: f64,
    /// r_+ - r
    pub gap_cosmo: f64,
}

/// Complex point on a contour: r(z) and the continued s = sqrt(F(r(z))).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub z: Complex64,
    pub r: Complex64,
    pub s: Complex64,
}

#[derive(Clone, Debug)]
pub struct ChartMap {
    pub params: BlackHoleParams,
    pub horizons: HorizonData,
    pub r0: f64,
    pub options: ChartOptions,
    roots: Vec<f64>,
    weights: Vec<f64>,
    shift: f64,
    /// (x, r) samples, strictly increasing in both.
    table: Vec<(f64, f64)>,
    minus: NearHorizon,
    plus: NearHorizon,
}

impl ChartMap {
    pub fn new(params: &BlackHoleParams) -> Result<Self> {
        Self::with_options(params, ChartOptions::default())
    }

    pub fn with_options(params: &BlackHoleParams, options: ChartOptions) -> Result<Self> {
        if !(options.cone_angle > 0.0 && options.cone_angle <= std::f64::consts::FRAC_PI_4 + 1e-12)
        {
            return Err(QnmError::Configuration(format!(
                "cone angle must lie in (0, pi/4], got {}",
                options.cone_angle
            )));
        }
        let horizons = find_horizons(params)?;
        let roots = horizons.radii();
        let weights: Vec<f64> = horizons.kappas().iter().map(|k| 0.5 / k).collect();
        let idx = |kind| horizons.roots.iter().position(|h| h.kind == kind).unwrap();
        let (im, ip) = (idx(HorizonKind::Event), idx(HorizonKind::Cosmological));
        let r0 = photon_sphere_radius(params);
        let mut chart = ChartMap {
            params: *params,
            r0,
            options,
            roots,
            weights,
            shift: 0.0,
            table: Vec::new(),
            minus: NearHorizon {
                root: horizons.roots[im].radius,
                kappa: horizons.roots[im].kappa,
                index: im,
                side: 1.0,
                x_switch: 0.0,
            },
            plus: NearHorizon {
                root: horizons.roots[ip].radius,
                kappa: horizons.roots[ip].kappa,
                index: ip,
                side: -1.0,
                x_switch: 0.0,
            },
            horizons,
        };
        if !(chart.minus.root < r0 && r0 < chart.plus.root) {
            return Err(QnmError::Inadmissible(
                "photon sphere outside (r_-, r_+)".into(),
            ));
        }
        chart.shift = chart.raw_tortoise(r0, r0 - chart.minus.root, chart.plus.root - r0);
        let width = chart.plus.root - chart.minus.root;
        let inner_gap = chart.minus.root - chart.roots[chart.minus.index - 1].max(0.0);
        let delta_switch = 1e-4 * width.min(inner_gap);
        let lo = chart.minus.root + delta_switch;
        let hi = chart.plus.root - delta_switch;
        chart.minus.x_switch = chart.tortoise_of_radius(lo)?;
        chart.plus.x_switch = chart.tortoise_of_radius(hi)?;
        let n = options.table_size.max(16);
        let mut table = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos());
            let r = lo + (hi - lo) * t;
            table.push((chart.tortoise_of_radius(r)?, r));
        }
        chart.table = table;
        Ok(chart)
    }

    pub fn event_radius(&self) -> f64 {
        self.minus.root
    }

    pub fn cosmological_radius(&self) -> f64 {
        self.plus.root
    }

    pub fn kappa_event(&self) -> f64 {
        self.minus.kappa
    }

    pub fn kappa_cosmological(&self) -> f64 {
        self.plus.kappa
    }

    /// Abscissae beyond which the near-horizon inversion is used.
    pub fn switch_points(&self) -> (f64, f64) {
        (self.minus.x_switch, self.plus.x_switch)
    }

    fn raw_tortoise(&self, r: f64, gap_event: f64, gap_cosmo: f64) -> f64 {
        let mut x = 0.0;
        for (j, (&rj, &aj)) in self.roots.iter().zip(&self.weights).enumerate() {
            let d = if j == self.minus.index {
                gap_event
            } else if j == self.plus.index {
                gap_cosmo
            } else {
                (r - rj).abs()
            };
            x += aj * d.ln();
        }
        x
    }

    /// x(r) = sum_j ln|r - r_j| / (2 kappa_j), shifted so that x(r0) = 0.
    pub fn tortoise_of_radius(&self, r: f64) -> Result<f64> {
        if !(r > self.minus.root && r < self.plus.root) {
            return Err(QnmError::Domain(format!(
                "r = {r} outside ({}, {})",
                self.minus.root, self.plus.root
            )));
        }
        Ok(self.raw_tortoise(r, r - self.minus.root, self.plus.root - r) - self.shift)
    }

    /// x from a radial point, using its stored gaps.
    pub fn tortoise_of_point(&self, p: &RadialPoint) -> f64 {
        self.raw_tortoise(p.r, p.gap_event, p.gap_cosmo) - self.shift
    }

    /// Sum of the log terms other than the one of the given horizon, minus the shift.
    fn regular_part(&self, nh: &NearHorizon, r: f64) -> f64 {
        let mut g = -self.shift;
        for (j, (&rj, &aj)) in self.roots.iter().zip(&self.weights).enumerate() {
            if j != nh.index {
                g += aj * (r - rj).abs().ln();
            }
        }
        g
    }

    fn near_horizon_gap(&self, nh: &NearHorizon, x: f64) -> f64 {
        let a = 0.5 / nh.kappa;
        let mut delta = ((x - self.regular_part(nh, nh.root)) / a).exp();
        for _ in 0..200 {
            let next = ((x - self.regular_part(nh, nh.root + nh.side * delta)) / a).exp();
            let done = (next - delta).abs() <= 1e-16 * next;
            delta = next;
            if done {
                break;
            }
        }
        delta
    }

    /// Inverse tortoise map with precise horizon gaps.
    pub fn radial_point(&self, x: f64) -> RadialPoint {
        let (rm, rp) = (self.minus.root, self.plus.root);
        if x <= self.minus.x_switch {
            let d = self.near_horizon_gap(&self.minus, x);
            return RadialPoint {
                x,
                r: rm + d,
                gap_event: d,
                gap_cosmo: (rp - rm) - d,
            };
        }
        if x >= self.plus.x_switch {
            let d = self.near_horizon_gap(&self.plus, x);
            return RadialPoint {
                x,
                r: rp - d,
                gap_event: (rp - rm) - d,
                gap_cosmo: d,
            };
        }
        let i = self
            .table
            .partition_point(|p| p.0 <= x)
            .clamp(1, self.table.len() - 1);
        let (mut lo, mut hi) = (self.table[i - 1].1, self.table[i].1);
        let (x_lo, x_hi) = (self.table[i - 1].0, self.table[i].0);
        let mut r = lo + (hi - lo) * (x - x_lo) / (x_hi - x_lo);
        for _ in 0..100 {
            let fx = self.tortoise_of_radius(r).unwrap_or(f64::NAN) - x;
            if fx > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let step = fx * self.params.lapse_unchecked(r);
            let mut next = r - step;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let done = (next - r).abs() <= 2e-16 * r;
            r = next;
            if done {
                break;
            }
        }
        RadialPoint {
            x,
            r,
            gap_event: r - rm,
            gap_cosmo: rp - r,
        }
    }

    pub fn radius_of_tortoise(&self, x: f64) -> f64 {
        self.radial_point(x).r
    }

    /// F(r) from its factorized form, using the stored horizon gaps.
    pub fn lapse_at(&self, p: &RadialPoint) -> f64 {
        let mut prod = -self.params.lambda / 3.0;
        for (j, &rj) in self.roots.iter().enumerate() {
            prod *= if j == self.minus.index {
                p.gap_event
            } else if j == self.plus.index {
                -p.gap_cosmo
            } else {
                p.r - rj
            };
        }
        let denom_power = if self.roots.len() == 4 { 2 } else { 1 };
        prod / p.r.powi(denom_power)
    }

    /// (alpha, alpha') at a real abscissa.
    pub fn alpha_real(&self, x: f64) -> (f64, f64) {
        let p = self.radial_point(x);
        let f = self.lapse_at(&p).max(0.0);
        let s = f.sqrt();
        let fp = self.params.lapse_derivative(p.r).unwrap_or(f64::NAN);
        (s / p.r, s * (fp / (2.0 * p.r) - f / (p.r * p.r)))
    }

    /// alpha_- and alpha_+ with alpha(x) ~ alpha_(+-) exp(kappa_(+-) x) as x -> -+infinity.
    pub fn asymptotic_amplitudes(&self) -> (f64, f64) {
        let amp = |nh: &NearHorizon| {
            (2.0 * nh.kappa.abs()).sqrt() * (-nh.kappa * self.regular_part(nh, nh.root)).exp()
                / nh.root
        };
        (amp(&self.minus), amp(&self.plus))
    }

    /// Whether z lies in the conic neighbourhood of the real axis.
    pub fn in_cone(&self, z: Complex64) -> bool {
        z.im.abs()
            <= self.options.strip_half_width + self.options.cone_angle.tan() * z.re.abs() + 1e-12
    }

    fn forbidden_check(&self) -> impl Fn(&Complex64) -> std::result::Result<(), String> + '_ {
        let inner = self.roots[..self.minus.index]
            .iter()
            .copied()
            .chain(std::iter::once(0.0))
            .collect::<Vec<_>>();
        let gap = self.minus.root - self.roots[self.minus.index - 1].max(0.0);
        let tol = 1e-3 * gap;
        let far = 10.0 * self.plus.root;
        move |r: &Complex64| {
            if !(r.re.is_finite() && r.im.is_finite()) {
                return Err("non-finite radius".into());
            }
            if r.norm() > far {
                return Err(format!("|r| = {} diverged", r.norm()));
            }
            for &root in &inner {
                if (r - root).norm() < tol {
                    return Err(format!("r = {r} reached the interior root {root}"));
                }
            }
            Ok(())
        }
    }

    fn rhs(&self, dir: Complex64) -> impl Fn(f64, &State<2>) -> State<2> + '_ {
        move |_, y: &State<2>| {
            let r = y[0];
            let f = self
                .params
                .lapse_complex(r)
                .unwrap_or(Complex64::new(f64::NAN, 0.0));
            let inv = r.inv();
            let (m, q, l) = (self.params.mass, self.params.charge, self.params.lambda);
            let fp = inv * inv * (2.0 * m) - inv * inv * inv * (2.0 * q * q) - r * (2.0 * l / 3.0);
            [dir * f, dir * fp * y[1] * 0.5]
        }
    }

    fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.options.ode_rtol,
            atol: 1e-300,
            ..OdeOptions::default()
        }
    }

    fn advance(&self, from: ContourPoint, to: Complex64) -> Result<ContourPoint> {
        let seg = to - from.z;
        if seg.norm() == 0.0 {
            return Ok(from);
        }
        let dir = seg / seg.norm();
        if seg.norm() < 1e-8 {
            let f = self.rhs(dir);
            let h = seg.norm();
            let k1 = f(0.0, &[from.r, from.s]);
            let k2 = f(h, &[from.r + k1[0] * h, from.s + k1[1] * h]);
            let half = 0.5 * h;
            return Ok(ContourPoint {
                z: to,
                r: from.r + (k1[0] + k2[0]) * half,
                s: from.s + (k1[1] + k2[1]) * half,
            });
        }
        let check = self.forbidden_check();
        let y = integrate(
            self.rhs(dir),
            0.0,
            [from.r, from.s],
            seg.norm(),
            &self.ode_options(),
            |_, y| check(&y[0]),
        )
        .map_err(|e| {
            QnmError::ContourLeftDomain(match e {
                OdeFailure::Rejected { reason, .. } => reason,
                other => format!("{other:?} on segment {} -> {}", from.z, to),
            })
        })?;
        Ok(ContourPoint {
            z: to,
            r: y[0],
            s: y[1],
        })
    }

    fn real_anchor(&self, x: f64) -> ContourPoint {
        let p = self.radial_point(x);
        let s = self.lapse_at(&p).max(0.0).sqrt();
        ContourPoint {
            z: Complex64::new(x, 0.0),
            r: Complex64::new(p.r, 0.0),
            s: Complex64::new(s, 0.0),
        }
    }

    /// r(z) and sqrt(F(r(z))) by continuation from x0 along the straight segment.
    pub fn contour_point(&self, z: Complex64) -> Result<ContourPoint> {
        self.contour_point_from(0.0, z)
    }

    /// As `contour_point`, continuing from a chosen real anchor.
    pub fn contour_point_from(&self, anchor: f64, z: Complex64) -> Result<ContourPoint> {
        if !self.in_cone(z) {
            return Err(QnmError::Domain(format!(
                "z = {z} outside the cone of validity"
            )));
        }
        if z.im == 0.0 {
            return Ok(self.real_anchor(z.re));
        }
        self.advance(self.real_anchor(anchor), z)
    }

    pub fn radius_on_contour(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.contour_point(z)?.r)
    }

    /// Points x0 + e^{i theta} y for the given ordinates (any order), continued
    /// outward from y = 0 in both directions.
    pub fn ray(&self, theta: f64, ys: &[f64]) -> Result<Vec<ContourPoint>> {
        if theta.abs() > self.options.cone_angle + 1e-12 {
            return Err(QnmError::Domain(format!(
                "ray angle {theta} exceeds the cone angle {}",
                self.options.cone_angle
            )));
        }
        let e = Complex64::from_polar(1.0, theta);
        let mut order: Vec<usize> = (0..ys.len()).collect();
        order.sort_by(|&a, &b| ys[a].partial_cmp(&ys[b]).unwrap());
        let mut out = vec![self.real_anchor(0.0); ys.len()];
        let halves = [
            order
                .iter()
                .copied()
                .filter(|&i| ys[i] >= 0.0)
                .collect::<Vec<_>>(),
            order
                .iter()
                .rev()
                .copied()
                .filter(|&i| ys[i] < 0.0)
                .collect::<Vec<_>>(),
        ];
        let results: Vec<Result<Vec<(usize, ContourPoint)>>> = halves
            .par_iter()
            .map(|idx| {
                let mut cur = self.real_anchor(0.0);
                let mut acc = Vec::with_capacity(idx.len());
                for &i in idx {
                    cur = self.advance(cur, e * ys[i])?;
                    acc.push((i, cur));
                }
                Ok(acc)
            })
            .collect();
        for part in results {
            for (i, p) in part? {
                out[i] = p;
            }
        }
        Ok(out)
    }

    /// (alpha, alpha') from a contour point.
    pub fn alpha_complex(&self, p: &ContourPoint) -> (Complex64, Complex64) {
        let r = p.r;
        let f = self
            .params
            .lapse_complex(r)
            .unwrap_or(Complex64::new(f64::NAN, 0.0));
        let inv = r.inv();
        let (m, q, l) = (self.params.mass, self.params.charge, self.params.lambda);
        let fp = inv * inv * (2.0 * m) - inv * inv * inv * (2.0 * q * q) - r * (2.0 * l / 3.0);
        (p.s * inv, p.s * (fp * inv * 0.5 - f * inv * inv))
    }

    /// Potential of the given grade at a real or complex abscissa.
    pub fn potential(
        &self,
        grade: PotentialGrade,
        h: f64,
        z: Complex64,
    ) -> Result<PotentialSample> {
        grade.check(self, h)?;
        let (a, ap, r) = if z.im == 0.0 {
            let (a, ap) = self.alpha_real(z.re);
            (
                Complex64::new(a, 0.0),
                Complex64::new(ap, 0.0),
                Complex64::new(self.radius_of_tortoise(z.re), 0.0),
            )
        } else {
            let p = self.contour_point(z)?;
            let (a, ap) = self.alpha_complex(&p);
            (a, ap, p.r)
        };
        Ok(PotentialSample {
            x: z,
            value: grade.combine(h, a, ap, r),
            grade,
            h,
        })
    }

    /// Potential values at x0 + e^{i theta} y.
    pub fn potential_on_ray(
        &self,
        grade: PotentialGrade,
        h: f64,
        theta: f64,
        ys: &[f64],
    ) -> Result<Vec<Complex64>> {
        grade.check(self, h)?;
        if theta == 0.0 {
            return Ok(ys
                .par_iter()
                .map(|&y| {
                    let (a, ap) = self.alpha_real(y);
                    let r = self.radius_of_tortoise(y);
                    grade.combine(
                        h,
                        Complex64::new(a, 0.0),
                        Complex64::new(ap, 0.0),
                        Complex64::new(r, 0.0),
                    )
                })
                .collect());
        }
        let pts = self.ray(theta, ys)?;
        Ok(pts
            .iter()
            .map(|p| {
                let (a, ap) = self.alpha_complex(p);
                grade.combine(h, a, ap, p.r)
            })
            .collect())
    }

    /// Potential table as CSV rows (x, value_re, value_im, grade, h).
    pub fn potential_table_csv(
        &self,
        grade: PotentialGrade,
        h: f64,
        xs: &[f64],
        digits: usize,
    ) -> Result<String> {
        let mut out = String::from("x,value_re,value_im,grade,h\n");
        for &x in xs {
            let s = self.potential(grade, h, Complex64::new(x, 0.0))?;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_sig(x, digits),
                fmt_sig(s.value.re, digits),
                fmt_sig(s.value.im, digits),
                grade,
                fmt_sig(h, digits)
            ));
        }
        Ok(out)
    }
}

/// Formats with the given number of significant digits.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), v);
    let parsed: f64 = s.parse().unwrap_or(v);
    let mag = parsed.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let t = format!("{:.*}", decimals, parsed);
        if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t
        }
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialGrade {
    Alpha,
    AlphaPrime,
    DiracQ,
    SchrodingerPlus,
    SchrodingerMinus,
    DsrnSemiclassical,
    DssSemiclassical,
}

impl PotentialGrade {
    pub const ALL: [PotentialGrade; 7] = [
        PotentialGrade::Alpha,
        PotentialGrade::AlphaPrime,
        PotentialGrade::DiracQ,
        PotentialGrade::SchrodingerPlus,
        PotentialGrade::SchrodingerMinus,
        PotentialGrade::DsrnSemiclassical,
        PotentialGrade::DssSemiclassical,
    ];

    fn check(self, chart: &ChartMap, h: f64) -> Result<()> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(QnmError::Configuration(format!(
                "h must be non-negative, got {h}"
            )));
        }
        match self {
            PotentialGrade::DssSemiclassical if chart.params.charge != 0.0 => Err(
                QnmError::Configuration("dss potential requires charge = 0".into()),
            ),
            PotentialGrade::DiracQ
            | PotentialGrade::SchrodingerPlus
            | PotentialGrade::SchrodingerMinus
                if h == 0.0 =>
            {
                Err(QnmError::Configuration(format!("{self} needs h > 0")))
            }
            _ => Ok(()),
        }
    }

    /// Combines alpha, alpha' and r into this potential.
    pub fn combine(self, h: f64, a: Complex64, ap: Complex64, r: Complex64) -> Complex64 {
        match self {
            PotentialGrade::Alpha => a,
            PotentialGrade::AlphaPrime => ap,
            PotentialGrade::DiracQ => -a / h,
            PotentialGrade::SchrodingerPlus => (a * a - ap * h) / (h * h),
            PotentialGrade::SchrodingerMinus => (a * a + ap * h) / (h * h),
            PotentialGrade::DsrnSemiclassical => a * a + ap * h,
            PotentialGrade::DssSemiclassical => {
                a * a * (1.0 + (a * ap * r * r * r * 2.0 + a * a * r * r * 2.0) * (h * h))
            }
        }
    }
}

impl fmt::Display for PotentialGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialGrade::Alpha => "alpha",
            PotentialGrade::AlphaPrime => "alpha_prime",
            PotentialGrade::DiracQ => "dirac_q",
            PotentialGrade::SchrodingerPlus => "schrodinger_plus",
            PotentialGrade::SchrodingerMinus => "schrodinger_minus",
            PotentialGrade::DsrnSemiclassical => "dsrn_semiclassical",
            PotentialGrade::DssSemiclassical => "dss_semiclassical",
        })
    }
}

impl FromStr for PotentialGrade {
    type Err = QnmError;

    fn from_str(s: &str) -> Result<Self> {
        PotentialGrade::ALL
            .iter()
            .copied()
            .find(|g| g.to_string() == s.trim())
            .ok_or_else(|| QnmError::Configuration(format!("unknown potential grade `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub x: Complex64,
    pub value: Complex64,
    pub grade: PotentialGrade,
    pub h: f64,
}
