//! Complex-scaled spectral eigenvalues of -h^2 d^2/dx^2 + V.

use super::{Method, ResonanceEstimate};
use crate::chart::{ChartMap, PotentialGrade};
use crate::error::{QnmError, Result};
use crate::geometry::Model;
use crate::numerics::spectral::{eigenvalues, MappedGrid};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A potential that can be evaluated on rays x0 + e^{i theta} y.
pub trait ComplexPotential: Sync {
    fn on_ray(&self, theta: f64, ys: &[f64]) -> Result<Vec<Complex64>>;
    /// Energy of the barrier top; eigenvalues are searched around it.
    fn barrier_height(&self) -> f64;
    /// Largest admissible scaling angle.
    fn max_angle(&self) -> f64;
}

/// V = z0^2 - omega^2 y^2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticBarrier {
    pub z0: f64,
    pub omega: f64,
}

impl QuadraticBarrier {
    /// E_k = z0^2 - i h omega (2k+1).
    pub fn exact(&self, h: f64, k: u32) -> Complex64 {
        Complex64::new(self.z0 * self.z0, -h * self.omega * (2.0 * k as f64 + 1.0))
    }
}

impl ComplexPotential for QuadraticBarrier {
    fn on_ray(&self, theta: f64, ys: &[f64]) -> Result<Vec<Complex64>> {
        let e = Complex64::from_polar(1.0, theta);
        Ok(ys
            .iter()
            .map(|&y| self.z0 * self.z0 - (e * y).powu(2) * self.omega * self.omega)
            .collect())
    }

    fn barrier_height(&self) -> f64 {
        self.z0 * self.z0
    }

    fn max_angle(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 - 1e-3
    }
}

/// A chart potential, multiplied by `scale` (h^2 turns q^2 -+ q' into semiclassical form).
pub struct ChartPotential<'a> {
    pub chart: &'a ChartMap,
    pub grade: PotentialGrade,
    pub h: f64,
    pub scale: f64,
}

impl<'a> ChartPotential<'a> {
    /// The semiclassical operator of the model: alpha^2 + h alpha' or the dSS W_h.
    pub fn semiclassical(chart: &'a ChartMap, model: Model, h: f64) -> Self {
        let grade = match model {
            Model::Dsrn => PotentialGrade::DsrnSemiclassical,
            Model::Dss => PotentialGrade::DssSemiclassical,
        };
        ChartPotential {
            chart,
            grade,
            h,
            scale: 1.0,
        }
    }

    /// h^2 (q^2 + q') = alpha^2 - h alpha' with q = -alpha/h.
    pub fn partner_plus(chart: &'a ChartMap, h: f64) -> Self {
        ChartPotential {
            chart,
            grade: PotentialGrade::SchrodingerPlus,
            h,
            scale: h * h,
        }
    }

    /// h^2 (q^2 - q') = alpha^2 + h alpha'.
    pub fn partner_minus(chart: &'a ChartMap, h: f64) -> Self {
        ChartPotential {
            chart,
            grade: PotentialGrade::SchrodingerMinus,
            h,
            scale: h * h,
        }
    }
}

impl ComplexPotential for ChartPotential<'_> {
    fn on_ray(&self, theta: f64, ys: &[f64]) -> Result<Vec<Complex64>> {
        let v = self.chart.potential_on_ray(self.grade, self.h, theta, ys)?;
        Ok(v.into_iter().map(|x| x * self.scale).collect())
    }

    fn barrier_height(&self) -> f64 {
        let (a, _) = self.chart.alpha_real(0.0);
        a * a
    }

    fn max_angle(&self) -> f64 {
        self.chart.options.cone_angle
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSettings {
    pub grid: usize,
    pub theta: f64,
    /// L in y = L s / sqrt(1 - s^2).
    pub map_scale: f64,
    pub theta_refine: f64,
    pub grid_refine: f64,
    /// Largest accepted relative change under refinement.
    pub drift_tol: f64,
    /// Eigenvalues with |E - V_top| > window * V_top are ignored.
    pub window: f64,
}

impl Default for ScalingSettings {
    fn default() -> Self {
        ScalingSettings {
            grid: 400,
            theta: 0.55,
            map_scale: 4.0,
            theta_refine: 1.1,
            grid_refine: 1.5,
            drift_tol: 1e-6,
            window: 2.0,
        }
    }
}

impl ScalingSettings {
    pub fn validate(&self, max_angle: f64) -> Result<()> {
        if self.grid < 16 {
            return Err(QnmError::Configuration(format!(
                "grid size {} too small",
                self.grid
            )));
        }
        if !(self.theta > 0.0 && self.theta * self.theta_refine.max(1.0) <= max_angle + 1e-12) {
            return Err(QnmError::Configuration(format!(
                "scaling angle {} (refined {}) must lie in (0, {max_angle}]",
                self.theta,
                self.theta * self.theta_refine
            )));
        }
        if !(self.map_scale > 0.0
            && self.grid_refine >= 1.0
            && self.theta_refine >= 1.0
            && self.window > 0.0)
        {
            return Err(QnmError::Configuration(
                "invalid scaling refinement settings".into(),
            ));
        }
        Ok(())
    }
}

/// Eigenvalues of -e^{-2i theta} h^2 d^2/dy^2 + V(x0 + e^{i theta} y) on the mapped grid.
pub fn scaled_spectrum(
    pot: &dyn ComplexPotential,
    h: f64,
    theta: f64,
    grid: usize,
    map_scale: f64,
) -> Result<Vec<Complex64>> {
    let g = MappedGrid::new(grid, map_scale);
    let v = pot.on_ray(theta, &g.y)?;
    let c = -Complex64::from_polar(h * h, -2.0 * theta);
    let m = g.y.len();
    let a = DMatrix::from_fn(m, m, |i, j| {
        let base = c * g.second[(i, j)];
        if i == j {
            base + v[i]
        } else {
            base
        }
    });
    eigenvalues(a).ok_or_else(|| {
        QnmError::Convergence("non-finite potential or Schur iteration did not converge".into())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub estimates: Vec<ResonanceEstimate>,
    /// Candidates in the window that failed the refinement test: (energy, drift).
    pub rejected: Vec<(Complex64, f64)>,
}

fn nearest(list: &[Complex64], z: Complex64) -> Complex64 {
    *list
        .iter()
        .min_by(|a, b| (*a - z).norm().total_cmp(&(*b - z).norm()))
        .unwrap_or(&Complex64::new(f64::NAN, f64::NAN))
}

/// Resonance energies closest to the real axis that survive refinement, sorted by |Im E|.
pub fn scaled_eigen_resonances_for(
    pot: &dyn ComplexPotential,
    h: f64,
    count: usize,
    settings: &ScalingSettings,
) -> Result<ScalingResult> {
    settings.validate(pot.max_angle())?;
    if !(h > 0.0) {
        return Err(QnmError::Configuration(format!(
            "h must be positive, got {h}"
        )));
    }
    let fine_grid = (settings.grid as f64 * settings.grid_refine).round() as usize;
    let runs = [
        (settings.theta, settings.grid),
        (settings.theta * settings.theta_refine, settings.grid),
        (settings.theta, fine_grid),
    ];
    let spectra: Vec<Result<Vec<Complex64>>> = runs
        .par_iter()
        .map(|&(t, n)| scaled_spectrum(pot, h, t, n, settings.map_scale))
        .collect();
    let mut spectra = spectra.into_iter().collect::<Result<Vec<_>>>()?;
    let refined = spectra.split_off(1);
    let base = spectra.pop().unwrap_or_default();
    let top = pot.barrier_height();
    let mut candidates: Vec<Complex64> = base
        .into_iter()
        .filter(|e| e.im < 0.0 && e.re > 0.0 && (e - top).norm() <= settings.window * top)
        .collect();
    candidates.sort_by(|a, b| b.im.total_cmp(&a.im));
    let mut estimates = Vec::new();
    let mut rejected = Vec::new();
    for e in candidates {
        let drift = refined
            .iter()
            .map(|list| (nearest(list, e) - e).norm() / e.norm())
            .fold(0.0, f64::max);
        if drift <= settings.drift_tol {
            if estimates.len() < count {
                let value = e.sqrt() / h;
                estimates.push(ResonanceEstimate {
                    value,
                    energy: Some(e),
                    method: Method::ComplexScaling,
                    h: Some(h),
                    n: None,
                    grid: settings.grid,
                    theta: settings.theta,
                    drift,
                });
            }
        } else {
            rejected.push((e, drift));
        }
    }
    Ok(ScalingResult {
        estimates,
        rejected,
    })
}

/// Semiclassical resonances of the model operator with parameter h.
pub fn scaled_eigen_resonances(
    chart: &ChartMap,
    model: Model,
    h: f64,
    count: usize,
    settings: &ScalingSettings,
) -> Result<ScalingResult> {
    if model == Model::Dss && chart.params.charge != 0.0 {
        return Err(QnmError::Configuration(
            "dss operator requires charge = 0".into(),
        ));
    }
    scaled_eigen_resonances_for(
        &ChartPotential::semiclassical(chart, model, h),
        h,
        count,
        settings,
    )
}
