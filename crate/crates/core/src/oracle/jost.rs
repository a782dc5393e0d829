//! Jost functions of the Dirac (Zakharov-Shabat) system and of the
//! Schroedinger partners, by a fourth-order Magnus integrator.

use super::{Method, ResonanceEstimate};
use crate::chart::ChartMap;
use crate::error::{QnmError, Result};
use crate::numerics::zeros::{find_zeros, Rect, ZeroOptions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum JostMode {
    /// True potential; searches limited to the analyticity strip.
    Strip,
    /// alpha multiplied by a smooth cutoff: 1 on [-xc, xc], 0 outside [-xc - 5, xc + 5].
    Compact { xc: f64 },
}

impl JostMode {
    pub const DEFAULT_XC: f64 = 30.0;

    pub fn compact() -> Self {
        JostMode::Compact {
            xc: Self::DEFAULT_XC,
        }
    }
}

/// Smooth step: 0 for t <= 0, 1 for t >= 1, and its derivative.
fn smooth_step(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let da = a / (t * t);
    let db = -b / ((1.0 - t) * (1.0 - t));
    let s = a + b;
    (a / s, (da * s - a * (da + db)) / (s * s))
}

/// Cutoff equal to 1 on [-xc, xc] and 0 outside [-xc - width, xc + width], with its derivative.
pub fn cutoff(x: f64, xc: f64, width: f64) -> (f64, f64) {
    let (v, d) = smooth_step((xc + width - x.abs()) / width);
    (v, -d * x.signum() / width)
}

/// Which Jost function to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JostKind {
    /// Zakharov-Shabat system with potential sign * q.
    Dirac { negate: bool },
    /// -f'' + (q^2 + s q') f = lambda^2 f with s = +1 (plus) or -1.
    Schrodinger { plus: bool },
}

/// Potential tabulated at the two Gauss nodes of each Magnus step.
#[derive(Clone, Debug)]
pub struct JostProblem {
    pub kind: JostKind,
    pub n: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub step: f64,
    /// q (Dirac) or U (Schroedinger) at the nodes of each step.
    nodes: Vec<[f64; 2]>,
}

const GAUSS: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

impl JostProblem {
    /// Builds the problem from a profile x -> (alpha, alpha') with q = -n alpha.
    pub fn from_profile(
        profile: &(dyn Fn(f64) -> (f64, f64) + Sync),
        n: f64,
        kind: JostKind,
        x_start: f64,
        x_end: f64,
        step: f64,
    ) -> Result<Self> {
        if !(x_end > x_start && step > 0.0) {
            return Err(QnmError::Configuration(format!(
                "bad Jost interval [{x_start}, {x_end}] step {step}"
            )));
        }
        let steps = ((x_end - x_start) / step).ceil().max(1.0) as usize;
        let dx = (x_end - x_start) / steps as f64;
        let nodes = (0..steps)
            .map(|i| {
                let mut out = [0.0; 2];
                for (j, c) in GAUSS.iter().enumerate() {
                    let (a, ap) = profile(x_start + (i as f64 + c) * dx);
                    let (q, qp) = (-n * a, -n * ap);
                    out[j] = match kind {
                        JostKind::Dirac { negate } => {
                            if negate {
                                -q
                            } else {
                                q
                            }
                        }
                        JostKind::Schrodinger { plus } => q * q + if plus { qp } else { -qp },
                    };
                }
                out
            })
            .collect();
        Ok(JostProblem {
            kind,
            n,
            x_start,
            x_end,
            step: dx,
            nodes,
        })
    }

    /// Chart potential, truncated per the mode.
    pub fn from_chart(
        chart: &ChartMap,
        n: f64,
        kind: JostKind,
        mode: JostMode,
        depth: f64,
        step: f64,
    ) -> Result<Self> {
        match mode {
            JostMode::Compact { xc } => {
                if !(xc > 0.0) {
                    return Err(QnmError::Configuration(format!(
                        "cutoff X_c must be positive, got {xc}"
                    )));
                }
                let width = 5.0;
                let profile = move |x: f64| {
                    let (a, ap) = chart.alpha_real(x);
                    let (c, cp) = cutoff(x, xc, width);
                    (a * c, ap * c + a * cp)
                };
                Self::from_profile(&profile, n, kind, -xc - width, xc + width, step)
            }
            JostMode::Strip => {
                let (lo, hi) = strip_interval(chart, n, depth, kind);
                let profile = |x: f64| chart.alpha_real(x);
                Self::from_profile(&profile, n, kind, lo, hi, step)
            }
        }
    }

    fn matrix(&self, lambda: Complex64, v: f64) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        match self.kind {
            JostKind::Dirac { .. } => [[i * lambda, -i * v], [i * v, -i * lambda]],
            JostKind::Schrodinger { .. } => [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [v - lambda * lambda, Complex64::new(0.0, 0.0)],
            ],
        }
    }

    /// Jost coefficient normalized to 1 for the free problem.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let i = Complex64::i();
        let h = self.step;
        let c = 3f64.sqrt() * h * h / 12.0;
        let left = (i * lambda * (-self.x_start)).exp();
        let mut y = match self.kind {
            JostKind::Dirac { .. } => [Complex64::new(0.0, 0.0), left],
            JostKind::Schrodinger { .. } => [left, -i * lambda * left],
        };
        for nd in &self.nodes {
            let a1 = self.matrix(lambda, nd[0]);
            let a2 = self.matrix(lambda, nd[1]);
            let mut om = [[Complex64::new(0.0, 0.0); 2]; 2];
            for r in 0..2 {
                for s in 0..2 {
                    let comm = (0..2)
                        .map(|t| a2[r][t] * a1[t][s] - a1[r][t] * a2[t][s])
                        .sum::<Complex64>();
                    om[r][s] = (a1[r][s] + a2[r][s]) * (0.5 * h) + comm * c;
                }
            }
            let s2 = om[0][0] * om[0][0] + om[0][1] * om[1][0];
            let (ch, shc) = if s2.norm() < 1e-8 {
                (
                    1.0 + s2 / 2.0 + s2 * s2 / 24.0,
                    1.0 + s2 / 6.0 + s2 * s2 / 120.0,
                )
            } else {
                let s = s2.sqrt();
                (s.cosh(), s.sinh() / s)
            };
            y = [
                ch * y[0] + shc * (om[0][0] * y[0] + om[0][1] * y[1]),
                ch * y[1] + shc * (om[1][0] * y[0] + om[1][1] * y[1]),
            ];
        }
        let right = (i * lambda * self.x_end).exp();
        match self.kind {
            JostKind::Dirac { .. } => y[1] * right,
            JostKind::Schrodinger { .. } => (i * lambda * y[0] - y[1]) * right / (2.0 * i * lambda),
        }
    }
}

/// Integration interval for the true potential so that the neglected tails are below 1e-12
/// at search depth `depth`.
fn strip_interval(chart: &ChartMap, n: f64, depth: f64, kind: JostKind) -> (f64, f64) {
    let (am, ap) = chart.asymptotic_amplitudes();
    let (km, kp) = (chart.kappa_event(), chart.kappa_cosmological().abs());
    let (rate, amp) = match kind {
        JostKind::Dirac { .. } => (1.0, n),
        JostKind::Schrodinger { .. } => (2.0, n * n),
    };
    let reach = |a: f64, k: f64| {
        let decay = (rate * k - 2.0 * depth).max(1e-3 * k);
        ((amp * a.max(1e-300) / decay / 1e-12).ln() / decay).clamp(20.0, 6000.0)
    };
    (-reach(am, km), reach(ap, kp))
}

/// Dirac analyticity strip 0.45 min|kappa| and Schroedinger strip 0.9 min|kappa|.
pub fn strip_depth(chart: &ChartMap, kind: JostKind) -> f64 {
    let k = chart.kappa_event().min(chart.kappa_cosmological().abs());
    match kind {
        JostKind::Dirac { .. } => 0.45 * k,
        JostKind::Schrodinger { .. } => 0.9 * k,
    }
}

pub const DEFAULT_JOST_STEP: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JostSearch {
    pub kind: JostKind,
    pub mode: JostMode,
    pub rect: Rect,
    pub winding: i64,
    pub estimates: Vec<ResonanceEstimate>,
    pub evaluations: usize,
}

/// Zeros of a Jost function of the chart potential inside `rect`.
pub fn jost_resonances(
    chart: &ChartMap,
    n: f64,
    kind: JostKind,
    rect: &Rect,
    mode: JostMode,
) -> Result<JostSearch> {
    let depth = -rect.im_min.min(0.0);
    if mode == JostMode::Strip && depth >= strip_depth(chart, kind) {
        return Err(QnmError::Configuration(format!(
            "search depth {depth} exceeds the analyticity strip {}; use compact mode",
            strip_depth(chart, kind)
        )));
    }
    let problem = JostProblem::from_chart(chart, n, kind, mode, depth, DEFAULT_JOST_STEP)?;
    search_problem(&problem, rect, mode)
}

pub fn search_problem(problem: &JostProblem, rect: &Rect, mode: JostMode) -> Result<JostSearch> {
    let f = |z: Complex64| problem.eval(z);
    let res = find_zeros(&f, rect, &ZeroOptions::default())
        .map_err(|e| QnmError::Convergence(e.to_string()))?;
    let method = match problem.kind {
        JostKind::Dirac { .. } => Method::DiracJost,
        JostKind::Schrodinger { .. } => Method::SchrodingerJost,
    };
    let estimates = res
        .zeros
        .iter()
        .map(|&z| ResonanceEstimate {
            value: z,
            energy: Some(z * z),
            method,
            h: None,
            n: Some(problem.n),
            grid: problem.nodes.len(),
            theta: 0.0,
            drift: 0.0,
        })
        .collect();
    Ok(JostSearch {
        kind: problem.kind,
        mode,
        rect: *rect,
        winding: res.winding,
        estimates,
        evaluations: res.evaluations,
    })
}

/// Dirac resonances (zeros of a(lambda)) for potential q = -n alpha.
pub fn dirac_jost_resonances(
    chart: &ChartMap,
    n: f64,
    rect: &Rect,
    mode: JostMode,
) -> Result<JostSearch> {
    jost_resonances(chart, n, JostKind::Dirac { negate: false }, rect, mode)
}
