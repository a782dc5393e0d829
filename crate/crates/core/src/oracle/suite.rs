//! The verification suites: quadratic exactness, partner equivalence, the union
//! identity, lattice convergence, b12 adjudication and the resonance-free scan.

use super::jost::{strip_depth, JostKind, JostMode};
use super::scaling::{QuadraticBarrier, ScalingSettings};
use super::studies::*;
use crate::bnf::normal_form_for_order;
use crate::chart::ChartMap;
use crate::error::{QnmError, Result};
use crate::geometry::Model;
use crate::lattice::with_zero_b02;
use crate::numerics::zeros::Rect;
use crate::BlackHoleParams;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Quadratic,
    Partner,
    Union,
    Convergence,
    B12,
    FreeRegion,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Quadratic,
        Suite::Partner,
        Suite::Union,
        Suite::Convergence,
        Suite::B12,
        Suite::FreeRegion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Quadratic => "quadratic",
            Suite::Partner => "partner",
            Suite::Union => "union",
            Suite::Convergence => "convergence",
            Suite::B12 => "b12",
            Suite::FreeRegion => "free_region",
        }
    }

    /// "all" or a comma-separated list of suite names.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        s.split(',').map(|p| p.parse()).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = QnmError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| QnmError::Configuration(format!("unknown suite '{s}'")))
    }
}

/// Deliberate corruption of the coefficients, used to check that the suites can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    ZeroB02,
}

impl FromStr for Mutation {
    type Err = QnmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zero_b02" => Ok(Mutation::ZeroB02),
            other => Err(QnmError::Configuration(format!(
                "unknown mutation '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mutation::ZeroB02 => "zero_b02",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// dSRN parameters; the dSS runs use the same mass and lambda with zero charge.
    pub mass: f64,
    pub charge: f64,
    pub lambda: f64,
    pub settings: ScalingSettings,
    pub mode: JostMode,
    pub lmin: u32,
    pub lmax: u32,
    pub l_count: usize,
    pub kmax: u32,
    pub union_n: f64,
    pub free_n: f64,
    pub free_r: f64,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            mass: 1.0,
            charge: 0.3,
            lambda: 0.02,
            settings: ScalingSettings::default(),
            mode: JostMode::compact(),
            lmin: 5,
            lmax: 50,
            l_count: 8,
            kmax: 2,
            union_n: 10.0,
            free_n: 10.0,
            free_r: 10.0,
            mutation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub pass: bool,
    pub summary: String,
    pub details: serde_json::Value,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn chart_for(cfg: &VerifyConfig, model: Model) -> Result<(BlackHoleParams, ChartMap)> {
    let charge = if model == Model::Dss { 0.0 } else { cfg.charge };
    let p = BlackHoleParams::new(cfg.mass, charge, cfg.lambda, model)?;
    let chart = ChartMap::new(&p)?;
    Ok((p, chart))
}

pub fn run_quadratic() -> Result<SuiteOutcome> {
    let barrier = QuadraticBarrier {
        z0: 1.0,
        omega: 0.5,
    };
    let h = 0.1;
    let r = quadratic_exactness(&barrier, h, 5, &oscillator_settings(&barrier, h), 1e-8)?;
    Ok(SuiteOutcome {
        suite: Suite::Quadratic,
        pass: r.pass,
        summary: format!(
            "k <= 5, max relative error {:.3e} (tol 1e-8)",
            r.max_relative_error
        ),
        details: to_json(&r),
    })
}

pub fn run_partner(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let (_, chart) = chart_for(cfg, Model::Dsrn)?;
    let r = partner_equivalence_check(&chart, cfg.union_n, 3, &cfg.settings)?;
    Ok(SuiteOutcome {
        suite: Suite::Partner,
        pass: r.pass,
        summary: format!(
            "n = {}, {} pairs, max relative difference {:.3e} (tol 1e-6)",
            cfg.union_n,
            r.plus.len().min(r.minus.len()),
            r.max_relative_difference
        ),
        details: to_json(&r),
    })
}

/// Search rectangle around n z0, limited to the Dirac strip in strip mode.
pub fn union_rect(chart: &ChartMap, n: f64, mode: JostMode) -> Rect {
    let (a, _) = chart.alpha_real(0.0);
    let depth = match mode {
        JostMode::Compact { .. } => 0.3,
        JostMode::Strip => 0.3f64.min(0.95 * strip_depth(chart, JostKind::Dirac { negate: false })),
    };
    Rect::new(n * a - 0.3, n * a + 0.3, -depth, -0.01 * depth)
}

pub fn run_union(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let (_, chart) = chart_for(cfg, Model::Dsrn)?;
    let rect = union_rect(&chart, cfg.union_n, cfg.mode);
    let r = union_check(
        &chart,
        cfg.union_n,
        &rect,
        cfg.mode,
        super::jost::DEFAULT_JOST_STEP,
    )?;
    Ok(SuiteOutcome {
        suite: Suite::Union,
        pass: r.pass,
        summary: format!(
            "n = {}, {} Schroedinger zeros, union match {}, partner match {}, mirror error {:.1e}",
            cfg.union_n, r.count, r.union_matches, r.partners_match, r.mirror_error
        ),
        details: to_json(&r),
    })
}

/// Convergence study of one model with the engine coefficients (mutated if configured).
pub fn model_study(
    cfg: &VerifyConfig,
    model: Model,
) -> Result<(ConvergenceStudy, crate::BnfCoefficients)> {
    let (p, chart) = chart_for(cfg, model)?;
    let coeffs = normal_form_for_order(&p, 2)?;
    let used = match cfg.mutation {
        Some(Mutation::ZeroB02) => with_zero_b02(&coeffs),
        None => coeffs.clone(),
    };
    let variants = default_variants(&used, model)?;
    let ls = log_spaced_l(model, cfg.lmin, cfg.lmax, cfg.l_count);
    let study = convergence_study(
        &chart,
        model,
        &variants,
        &ls,
        cfg.kmax,
        &[1, 2],
        &cfg.settings,
    )?;
    Ok((study, coeffs))
}

fn convergence_outcome(studies: &[&ConvergenceStudy]) -> SuiteOutcome {
    let mut parts = Vec::new();
    for s in studies {
        for order in [1, 2] {
            let slopes = s.slopes(crate::lattice::CandidateTag::Engine, order);
            parts.push(format!(
                "{} order {order}: [{}]",
                s.model,
                slopes
                    .iter()
                    .map(|x| format!("{x:.3}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
    }
    SuiteOutcome {
        suite: Suite::Convergence,
        pass: studies.iter().all(|s| s.pass),
        summary: format!("engine slopes over k: {}", parts.join("; ")),
        details: json!(studies.iter().map(|s| to_json(s)).collect::<Vec<_>>()),
    }
}

fn b12_outcome(verdict: &B12Verdict, manufactured: &ManufacturedB12) -> SuiteOutcome {
    let slopes: Vec<String> = verdict
        .tags
        .iter()
        .map(|t| {
            format!(
                "{} {:?}",
                t.tag,
                t.slopes
                    .iter()
                    .map(|x| (x * 1000.0).round() / 1000.0)
                    .collect::<Vec<_>>()
            )
        })
        .collect();
    SuiteOutcome {
        suite: Suite::B12,
        pass: manufactured.selects_recursion,
        summary: format!(
            "verdict {}; order-2 slopes {}; manufactured winners {:?}",
            verdict.verdict,
            slopes.join(", "),
            manufactured
                .winners
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
        ),
        details: json!({ "verdict": to_json(verdict), "manufactured": to_json(manufactured) }),
    }
}

pub fn run_free_region(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let (_, chart) = chart_for(cfg, Model::Dsrn)?;
    let c0 = 0.5 * chart.kappa_event().min(chart.kappa_cosmological().abs());
    let main = free_region_scan(&chart, cfg.free_n, cfg.free_r, c0, cfg.mode)?;
    let extra = free_region_scan(&chart, 100.0, 6.0, c0, cfg.mode)?;
    Ok(SuiteOutcome {
        suite: Suite::FreeRegion,
        pass: main.pass && extra.pass,
        summary: format!(
            "n = {}, R = {}: {}; n = 100, R = 6: count {}",
            cfg.free_n,
            cfg.free_r,
            if main.vacuous {
                "empty band, vacuous".to_string()
            } else {
                format!("count {}", main.count)
            },
            extra.count
        ),
        details: json!([to_json(&main), to_json(&extra)]),
    })
}

/// Runs the requested suites in order; the dSRN study is shared by convergence and b12.
pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<Vec<SuiteOutcome>> {
    let mut dsrn: Option<(ConvergenceStudy, crate::BnfCoefficients)> = None;
    let mut out = Vec::new();
    for &s in suites {
        let needs_dsrn = matches!(s, Suite::Convergence | Suite::B12);
        if needs_dsrn && dsrn.is_none() {
            dsrn = Some(model_study(cfg, Model::Dsrn)?);
        }
        out.push(match s {
            Suite::Quadratic => run_quadratic()?,
            Suite::Partner => run_partner(cfg)?,
            Suite::Union => run_union(cfg)?,
            Suite::Convergence => {
                let (dss, _) = model_study(cfg, Model::Dss)?;
                let (study, _) = dsrn.as_ref().unwrap();
                convergence_outcome(&[study, &dss])
            }
            Suite::B12 => {
                let (study, coeffs) = dsrn.as_ref().unwrap();
                let verdict = adjudicate_b12(study, coeffs)?;
                let ns = [10.0, 14.0, 20.0, 28.0, 40.0, 57.0, 80.0];
                let manufactured = manufactured_b12(&ns, cfg.kmax, &manufactured_settings())?;
                b12_outcome(&verdict, &manufactured)
            }
            Suite::FreeRegion => run_free_region(cfg)?,
        });
    }
    Ok(out)
}
