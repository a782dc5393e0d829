//! Resonances computed without the asymptotic formulas: complex scaling for
//! the Schroedinger operators, Jost-function zeros for the Dirac system,
//! and the comparisons against the pseudopole lattices.

pub mod analytic;
pub mod jost;
pub mod scaling;
pub mod studies;
pub mod suite;

pub use analytic::{taylor_coefficients, AnalyticBarrier};
pub use jost::{
    cutoff, dirac_jost_resonances, jost_resonances, search_problem, strip_depth, JostKind,
    JostMode, JostProblem, JostSearch, DEFAULT_JOST_STEP,
};
pub use scaling::{
    scaled_eigen_resonances, scaled_eigen_resonances_for, scaled_spectrum, ChartPotential,
    ComplexPotential, QuadraticBarrier, ScalingResult, ScalingSettings,
};
pub use studies::*;
pub use suite::*;

use crate::lattice::Pseudopole;
use crate::numerics::fit::{power_law, PowerFit};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ComplexScaling,
    DiracJost,
    SchrodingerJost,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEstimate {
    pub value: Complex64,
    pub energy: Option<Complex64>,
    pub method: Method,
    pub h: Option<f64>,
    pub n: Option<f64>,
    /// Collocation size or number of Magnus steps.
    pub grid: usize,
    pub theta: f64,
    /// Relative change under refinement.
    pub drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub pole: Pseudopole,
    pub estimate: ResonanceEstimate,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub pairs: Vec<MatchPair>,
    pub unmatched_poles: Vec<Pseudopole>,
    pub unmatched_estimates: Vec<ResonanceEstimate>,
    /// Distance against n over the matched pairs.
    pub fit: Option<PowerFit>,
}

/// Greedy closest-first matching within `radius`.
pub fn match_estimates(
    poles: &[Pseudopole],
    estimates: &[ResonanceEstimate],
    radius: f64,
) -> MatchReport {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in poles.iter().enumerate() {
        for (j, e) in estimates.iter().enumerate() {
            let d = (p.value - e.value).norm();
            if d <= radius {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; poles.len()];
    let mut used_e = vec![false; estimates.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in cand {
        if !used_p[i] && !used_e[j] {
            used_p[i] = true;
            used_e[j] = true;
            pairs.push(MatchPair {
                pole: poles[i],
                estimate: estimates[j],
                distance: d,
            });
        }
    }
    pairs.sort_by(|a, b| a.pole.n.total_cmp(&b.pole.n).then(a.pole.k.cmp(&b.pole.k)));
    let ns: Vec<f64> = pairs.iter().map(|p| p.pole.n).collect();
    let ds: Vec<f64> = pairs.iter().map(|p| p.distance).collect();
    MatchReport {
        fit: power_law(&ns, &ds),
        unmatched_poles: poles
            .iter()
            .zip(&used_p)
            .filter(|(_, u)| !**u)
            .map(|(p, _)| *p)
            .collect(),
        unmatched_estimates: estimates
            .iter()
            .zip(&used_e)
            .filter(|(_, u)| !**u)
            .map(|(e, _)| *e)
            .collect(),
        pairs,
    }
}

/// Whether two point sets agree within `radius` (each point has a partner in the other set).
pub fn sets_agree(a: &[Complex64], b: &[Complex64], radius: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| (x - y).norm() <= radius))
        && b.iter().all(|y| a.iter().any(|x| (x - y).norm() <= radius))
}
