//! The six commands. Each returns a `Report` holding CSV and JSON forms.

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{csv_table, round_json, Report};
use qnm_core::barrier::{
    cross_check_printed_formulas, locate_barrier, taylor_expand, DEFAULT_TAYLOR_ORDER,
    MAX_TAYLOR_ORDER,
};
use qnm_core::bnf::{effective_order, normal_form_for_order, ClosedForms};
use qnm_core::chart::{fmt_sig, ChartMap, PotentialGrade};
use qnm_core::geometry::find_horizons;
use qnm_core::lattice::{self, assemble_resonance_sets, b12_candidates, LatticeSpec};
use qnm_core::oracle::{run_suites, SuiteOutcome};
use qnm_core::Model;
use serde_json::json;

fn params_json(cfg: &RunConfig) -> serde_json::Value {
    json!({ "mass": cfg.mass, "charge": cfg.charge, "lambda": cfg.lambda, "model": cfg.model.to_string() })
}

pub fn horizons(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let h = find_horizons(&p)?;
    let b = locate_barrier(&p)?;
    let d = cfg.precision;
    let mut rows = Vec::new();
    for hz in &h.roots {
        let kind = serde_json::to_value(hz.kind)?
            .as_str()
            .unwrap_or_default()
            .to_string();
        rows.push(vec![format!("r_{kind}"), fmt_sig(hz.radius, d)]);
        rows.push(vec![format!("kappa_{kind}"), fmt_sig(hz.kappa, d)]);
    }
    for (name, v) in [("r0", b.r0), ("z0", b.z0), ("omega", b.omega)] {
        rows.push(vec![name.to_string(), fmt_sig(v, d)]);
    }
    let json = json!({
        "params": params_json(cfg),
        "horizons": h.roots,
        "r0": b.r0,
        "z0": b.z0,
        "omega": b.omega,
    });
    Ok(Report {
        csv: csv_table(&["quantity", "value"], &rows)?,
        json: round_json(json, d),
    })
}

/// Options only the potential command uses.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialArgs {
    pub grade: Option<PotentialGrade>,
    pub h: f64,
    pub xmin: f64,
    pub xmax: f64,
    pub points: usize,
}

impl Default for PotentialArgs {
    fn default() -> Self {
        PotentialArgs {
            grade: None,
            h: 0.1,
            xmin: -10.0,
            xmax: 10.0,
            points: 201,
        }
    }
}

pub fn potential(cfg: &RunConfig, args: &PotentialArgs) -> Result<Report> {
    if args.points < 2 || !(args.xmax > args.xmin) {
        return Err(CliError::Config(
            "potential needs points >= 2 and xmax > xmin".into(),
        ));
    }
    let chart = ChartMap::new(&cfg.params()?)?;
    let grade = args.grade.unwrap_or(match cfg.model {
        Model::Dsrn => PotentialGrade::DsrnSemiclassical,
        Model::Dss => PotentialGrade::DssSemiclassical,
    });
    let xs: Vec<f64> = (0..args.points)
        .map(|i| args.xmin + (args.xmax - args.xmin) * i as f64 / (args.points - 1) as f64)
        .collect();
    let csv = chart.potential_table_csv(grade, args.h, &xs, cfg.precision)?;
    let vals = chart.potential_on_ray(grade, args.h, 0.0, &xs)?;
    let rows: Vec<_> = xs
        .iter()
        .zip(&vals)
        .map(|(x, v)| json!({ "x": x, "re": v.re, "im": v.im }))
        .collect();
    let json = json!({ "params": params_json(cfg), "grade": grade.to_string(), "h": args.h, "rows": rows });
    Ok(Report {
        csv,
        json: round_json(json, cfg.precision),
    })
}

pub fn barrier(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let order = DEFAULT_TAYLOR_ORDER
        .max(2 * effective_order(cfg.order))
        .min(MAX_TAYLOR_ORDER);
    let e = taylor_expand(&p, order)?;
    let checks = cross_check_printed_formulas(&p, &e);
    let d = cfg.precision;
    let mut rows = Vec::new();
    for (name, list) in [
        ("taylor_h0", &e.taylor_h0),
        ("taylor_h1", &e.taylor_h1),
        ("taylor_h2", &e.taylor_h2),
        ("v0_derivative", &e.v0_derivatives),
        ("alpha_derivative", &e.alpha_derivatives),
    ] {
        for (j, v) in list.iter().enumerate() {
            rows.push(vec![name.to_string(), j.to_string(), fmt_sig(*v, d)]);
        }
    }
    let mut json = e.to_json();
    json["params"] = params_json(cfg);
    json["v0_derivatives"] = json!(e.v0_derivatives);
    json["alpha_derivatives"] = json!(e.alpha_derivatives);
    json["printed_formula_checks"] = serde_json::to_value(&checks)?;
    Ok(Report {
        csv: csv_table(&["quantity", "index", "value"], &rows)?,
        json: round_json(json, d),
    })
}

pub fn bnf(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let coeffs = normal_form_for_order(&p, cfg.order)?;
    let d = cfg.precision;
    let rows: Vec<Vec<String>> = coeffs
        .entries
        .values()
        .map(|e| {
            let prov = serde_json::to_value(e.provenance).ok();
            vec![
                e.h_power.to_string(),
                e.omega_power.to_string(),
                fmt_sig(e.value, d),
                prov.as_ref()
                    .and_then(|v| v.as_str())
                    .unwrap_or_default()
                    .to_string(),
            ]
        })
        .collect();
    let mut json = coeffs.to_json();
    json["params"] = params_json(cfg);
    if let Some(r) = &coeffs.record {
        json["closed_forms"] = serde_json::to_value(ClosedForms::from_record(r))?;
    }
    if cfg.model == Model::Dsrn {
        json["b12_candidates"] = serde_json::to_value(b12_candidates(&coeffs)?)?;
    }
    Ok(Report {
        csv: csv_table(&["h_power", "omega_power", "value", "provenance"], &rows)?,
        json: round_json(json, d),
    })
}

pub fn qnm(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.params()?;
    let coeffs = normal_form_for_order(&p, cfg.order)?;
    let mut spec = LatticeSpec::new(cfg.kmax, cfg.lmin, cfg.lmax, cfg.order);
    spec.truncation = cfg.truncation;
    let poles = lattice::pseudopoles(&coeffs, cfg.model, &spec)?;
    let all = match cfg.model {
        Model::Dsrn => {
            let sets = assemble_resonance_sets(&poles)?;
            [sets.dirac, sets.mirror, sets.union].concat()
        }
        Model::Dss => poles,
    };
    let json = json!({
        "params": params_json(cfg),
        "order": cfg.order,
        "kmax": cfg.kmax,
        "lmin": cfg.lmin,
        "lmax": cfg.lmax,
        "rows": lattice::to_json(&all, cfg.precision),
    });
    Ok(Report {
        csv: lattice::to_csv(&all, cfg.precision),
        json,
    })
}

/// Suite outcomes with the names of the failed suites.
pub struct Verification {
    pub report: Report,
    pub outcomes: Vec<SuiteOutcome>,
    pub failures: Vec<String>,
}

pub fn verify(cfg: &RunConfig) -> Result<Verification> {
    let suites = cfg.suites()?;
    let outcomes = run_suites(&suites, &cfg.verify_config())?;
    let failures: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| o.suite.to_string())
        .collect();
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                o.suite.to_string(),
                if o.pass { "pass" } else { "fail" }.to_string(),
                o.summary.clone(),
            ]
        })
        .collect();
    let json = json!({
        "params": params_json(cfg),
        "pass": failures.is_empty(),
        "failures": failures,
        "suites": outcomes,
    });
    Ok(Verification {
        report: Report {
            csv: csv_table(&["suite", "status", "summary"], &rows)?,
            json: round_json(json, cfg.precision),
        },
        outcomes,
        failures,
    })
}
