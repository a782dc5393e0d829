//! Comparisons between oracle resonances and the lattices, and the
//! structural checks on the resonance sets.

use super::analytic::AnalyticBarrier;
use super::jost::{search_problem, JostKind, JostMode, JostProblem};
use super::scaling::{
    scaled_eigen_resonances, scaled_eigen_resonances_for, QuadraticBarrier, ScalingSettings,
};
use super::{sets_agree, ChartPotential, ResonanceEstimate};
use crate::bnf::{barrier_normal_form, B12Candidates, BnfCoefficients};
use crate::chart::{fmt_sig, ChartMap};
use crate::error::{QnmError, Result};
use crate::geometry::Model;
use crate::lattice::{
    b12_candidates, dsrn_value, dss_value, with_b12, CandidateTag, DEFAULT_TRUNCATION,
};
use crate::numerics::fit::{power_law, PowerFit};
use crate::numerics::zeros::{count_zeros, Rect, ZeroOptions};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRow {
    pub k: u32,
    pub exact: Complex64,
    pub estimate: Option<Complex64>,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticReport {
    pub barrier: QuadraticBarrier,
    pub h: f64,
    pub rows: Vec<QuadraticRow>,
    pub max_relative_error: f64,
    pub pass: bool,
}

/// Settings that resolve the oscillator eigenfunctions of a quadratic barrier.
pub fn oscillator_settings(barrier: &QuadraticBarrier, h: f64) -> ScalingSettings {
    ScalingSettings {
        grid: 160,
        theta: std::f64::consts::FRAC_PI_4,
        map_scale: 2.0 * (h / barrier.omega).sqrt(),
        window: 4.0,
        ..ScalingSettings::default()
    }
}

/// Complex scaling on V = z0^2 - omega^2 y^2 against z0^2 - i h omega (2k+1).
pub fn quadratic_exactness(
    barrier: &QuadraticBarrier,
    h: f64,
    kmax: u32,
    settings: &ScalingSettings,
    tol: f64,
) -> Result<QuadraticReport> {
    let res = scaled_eigen_resonances_for(barrier, h, kmax as usize + 4, settings)?;
    let rows: Vec<QuadraticRow> = (0..=kmax)
        .map(|k| {
            let exact = barrier.exact(h, k);
            let est = res
                .estimates
                .iter()
                .filter_map(|e| e.energy)
                .min_by(|a, b| (a - exact).norm().total_cmp(&(b - exact).norm()));
            let relative_error = est
                .map(|e| (e - exact).norm() / exact.norm())
                .unwrap_or(f64::INFINITY);
            QuadraticRow {
                k,
                exact,
                estimate: est,
                relative_error,
            }
        })
        .collect();
    let max_relative_error = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    Ok(QuadraticReport {
        barrier: *barrier,
        h,
        rows,
        max_relative_error,
        pass: max_relative_error <= tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartnerReport {
    pub n: f64,
    pub plus: Vec<ResonanceEstimate>,
    pub minus: Vec<ResonanceEstimate>,
    pub max_relative_difference: f64,
    pub pass: bool,
}

pub const PARTNER_TOL: f64 = 1e-6;

/// Resonances of q^2 + q' and q^2 - q' (q = -n alpha) by complex scaling.
pub fn partner_equivalence_check(
    chart: &ChartMap,
    n: f64,
    count: usize,
    settings: &ScalingSettings,
) -> Result<PartnerReport> {
    let h = 1.0 / n;
    let plus = ChartPotential::partner_plus(chart, h);
    let minus = ChartPotential::partner_minus(chart, h);
    let (p, m) = rayon::join(
        || scaled_eigen_resonances_for(&plus, h, count, settings),
        || scaled_eigen_resonances_for(&minus, h, count, settings),
    );
    let (p, m) = (p?.estimates, m?.estimates);
    let mut worst = if p.len() == count && m.len() == count {
        0.0
    } else {
        f64::INFINITY
    };
    for (a, b) in p.iter().zip(&m) {
        worst = f64::max(worst, (a.value - b.value).norm() / b.value.norm());
    }
    Ok(PartnerReport {
        n,
        plus: p,
        minus: m,
        max_relative_difference: worst,
        pass: worst <= PARTNER_TOL,
    })
}

fn mirror_rect(r: &Rect) -> Rect {
    Rect::new(-r.re_max, -r.re_min, r.im_min, r.im_max)
}

fn zeros_in(problem: &JostProblem, rects: &[Rect], mode: JostMode) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for r in rects {
        out.extend(
            search_problem(problem, r, mode)?
                .estimates
                .iter()
                .map(|e| e.value),
        );
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionReport {
    pub n: f64,
    pub rect: Rect,
    pub mode: JostMode,
    pub schrodinger: Vec<Complex64>,
    pub schrodinger_partner: Vec<Complex64>,
    pub dirac_q: Vec<Complex64>,
    pub dirac_minus_q: Vec<Complex64>,
    /// Largest distance between -conj(z), z a zero for q, and the nearest zero for -q.
    pub mirror_error: f64,
    pub union_matches: bool,
    pub partners_match: bool,
    pub count: usize,
    pub pass: bool,
}

pub const UNION_RADIUS: f64 = 1e-6;
pub const MIRROR_TOL: f64 = 1e-8;

/// Compares {Schroedinger zeros} \ {0} with the Dirac zeros for q and -q, searching `rect` and its mirror.
pub fn union_check(
    chart: &ChartMap,
    n: f64,
    rect: &Rect,
    mode: JostMode,
    step: f64,
) -> Result<UnionReport> {
    if rect.contains(Complex64::new(0.0, 0.0), 0.0)
        || mirror_rect(rect).contains(Complex64::new(0.0, 0.0), 0.0)
    {
        return Err(QnmError::Configuration(
            "union search rectangle must exclude lambda = 0".into(),
        ));
    }
    let kinds = [
        JostKind::Schrodinger { plus: true },
        JostKind::Schrodinger { plus: false },
        JostKind::Dirac { negate: false },
        JostKind::Dirac { negate: true },
    ];
    let depth = -rect.im_min.min(0.0);
    let problems = kinds
        .iter()
        .map(|&kind| JostProblem::from_chart(chart, n, kind, mode, depth, step))
        .collect::<Result<Vec<_>>>()?;
    // A zero on the boundary: shrink the rectangle slightly and retry.
    let mut used = *rect;
    let mut attempt = 0;
    let mut found = loop {
        let rects = [used, mirror_rect(&used)];
        let found: Result<Vec<Vec<Complex64>>> = problems
            .par_iter()
            .map(|p| zeros_in(p, &rects, mode))
            .collect();
        match found {
            Err(QnmError::Convergence(_)) if attempt < 4 => {
                attempt += 1;
                let d = 1e-3 * used.diameter();
                used = Rect::new(
                    used.re_min + d,
                    used.re_max - d,
                    used.im_min + d,
                    used.im_max - d,
                );
            }
            other => break other?,
        }
    };
    let dirac_minus_q = found.pop().unwrap_or_default();
    let dirac_q = found.pop().unwrap_or_default();
    let schrodinger_partner = found.pop().unwrap_or_default();
    let schrodinger = found.pop().unwrap_or_default();
    let mut mirror_error: f64 = if dirac_q.len() == dirac_minus_q.len() {
        0.0
    } else {
        f64::INFINITY
    };
    for z in &dirac_q {
        let m = -z.conj();
        let d = dirac_minus_q
            .iter()
            .map(|w| (w - m).norm())
            .fold(f64::INFINITY, f64::min);
        mirror_error = mirror_error.max(d);
    }
    let mut union: Vec<Complex64> = dirac_q.clone();
    for z in &dirac_minus_q {
        if !union.iter().any(|w| (w - z).norm() <= UNION_RADIUS) {
            union.push(*z);
        }
    }
    let union_matches = sets_agree(&schrodinger, &union, UNION_RADIUS);
    let partners_match = sets_agree(&schrodinger, &schrodinger_partner, UNION_RADIUS);
    let count = schrodinger.len();
    Ok(UnionReport {
        n,
        rect: used,
        mode,
        pass: union_matches && partners_match && mirror_error <= MIRROR_TOL && count >= 6,
        schrodinger,
        schrodinger_partner,
        dirac_q,
        dirac_minus_q,
        mirror_error,
        union_matches,
        partners_match,
        count,
    })
}

/// Rectangle around n z0 covering the overtones k = 0..=kmax of the leading lattice.
pub fn overtone_rect(z0: f64, omega: f64, n: f64, kmax: u32) -> Rect {
    let spacing = omega / z0;
    Rect::new(
        n * z0 - 2.0 * spacing,
        n * z0 + 2.0 * spacing,
        -spacing * (kmax as f64 + 1.0),
        -0.05 * spacing,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeRegionReport {
    pub n: f64,
    pub r: f64,
    pub c0: f64,
    pub rect: Option<Rect>,
    pub count: i64,
    pub vacuous: bool,
    pub pass: bool,
}

/// Zero count of the Dirac Jost function over [R, n/R] + i[-C0, 0].
pub fn free_region_scan(
    chart: &ChartMap,
    n: f64,
    r: f64,
    c0: f64,
    mode: JostMode,
) -> Result<FreeRegionReport> {
    if !(r > 0.0 && c0 > 0.0) {
        return Err(QnmError::Configuration(format!(
            "R and C0 must be positive, got {r}, {c0}"
        )));
    }
    let rect = Rect::new(r, n / r, -c0, 0.0);
    if rect.is_empty() {
        return Ok(FreeRegionReport {
            n,
            r,
            c0,
            rect: None,
            count: 0,
            vacuous: true,
            pass: true,
        });
    }
    let problem = JostProblem::from_chart(
        chart,
        n,
        JostKind::Dirac { negate: false },
        mode,
        c0,
        super::jost::DEFAULT_JOST_STEP,
    )?;
    let f = |z: Complex64| problem.eval(z);
    let count = count_zeros(&f, &rect, &ZeroOptions::default())
        .map_err(|e| QnmError::Convergence(e.to_string()))?;
    Ok(FreeRegionReport {
        n,
        r,
        c0,
        rect: Some(rect),
        count,
        vacuous: false,
        pass: count == 0,
    })
}

/// One set of coefficients to build lattices from.
#[derive(Clone, Debug)]
pub struct LatticeVariant {
    pub tag: CandidateTag,
    pub coeffs: BnfCoefficients<f64>,
}

/// engine, candidate_a, candidate_b (dSRN) or engine, llp1 (dSS).
pub fn default_variants(
    coeffs: &BnfCoefficients<f64>,
    model: Model,
) -> Result<Vec<LatticeVariant>> {
    Ok(match model {
        Model::Dsrn => {
            let c = b12_candidates(coeffs)?;
            vec![
                LatticeVariant {
                    tag: CandidateTag::Engine,
                    coeffs: coeffs.clone(),
                },
                LatticeVariant {
                    tag: CandidateTag::CandidateA,
                    coeffs: with_b12(coeffs, c.candidate_a),
                },
                LatticeVariant {
                    tag: CandidateTag::CandidateB,
                    coeffs: with_b12(coeffs, c.candidate_b),
                },
            ]
        }
        Model::Dss => vec![
            LatticeVariant {
                tag: CandidateTag::Engine,
                coeffs: coeffs.clone(),
            },
            LatticeVariant {
                tag: CandidateTag::Llp1,
                coeffs: coeffs.clone(),
            },
        ],
    })
}

/// Semiclassical parameter of the model at angular index l.
pub fn model_h(model: Model, l: f64) -> f64 {
    match model {
        Model::Dsrn => 1.0 / (l + 0.5),
        Model::Dss => 1.0 / (l * (l + 1.0)).sqrt(),
    }
}

fn lattice_value(
    model: Model,
    v: &LatticeVariant,
    k: u32,
    l: f64,
    order: usize,
) -> Result<Complex64> {
    match model {
        Model::Dsrn => dsrn_value(&v.coeffs, k, l, order),
        Model::Dss => dss_value(&v.coeffs, k, l, order, v.tag == CandidateTag::Llp1),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub tag: CandidateTag,
    pub order: usize,
    pub value: Complex64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub l: f64,
    pub n: f64,
    pub k: u32,
    pub oracle: ResonanceEstimate,
    pub lattice: Vec<LatticePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFit {
    pub tag: CandidateTag,
    pub order: usize,
    pub k: u32,
    pub fit: Option<PowerFit>,
    pub expected: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub model: Model,
    pub rows: Vec<ConvergenceRow>,
    pub fits: Vec<ConvergenceFit>,
    /// (l, k) without a stable oracle estimate.
    pub missing: Vec<(f64, u32)>,
    pub pass: bool,
}

pub const SLOPE_TOL: f64 = 0.5;

impl ConvergenceStudy {
    pub fn fit(&self, tag: CandidateTag, order: usize, k: u32) -> Option<&ConvergenceFit> {
        self.fits
            .iter()
            .find(|f| f.tag == tag && f.order == order && f.k == k)
    }

    /// Fitted exponents over k for one lattice.
    pub fn slopes(&self, tag: CandidateTag, order: usize) -> Vec<f64> {
        self.fits
            .iter()
            .filter(|f| f.tag == tag && f.order == order)
            .map(|f| f.fit.map(|p| p.exponent).unwrap_or(f64::NAN))
            .collect()
    }

    /// CSV rows (l, k, lattice_re, lattice_im, oracle_re, oracle_im, distance) for one lattice.
    pub fn to_csv(&self, tag: CandidateTag, order: usize, digits: usize) -> String {
        let mut out = String::from("l,k,lattice_re,lattice_im,oracle_re,oracle_im,distance\n");
        for row in &self.rows {
            if let Some(p) = row
                .lattice
                .iter()
                .find(|p| p.tag == tag && p.order == order)
            {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt_sig(row.l, digits),
                    row.k,
                    fmt_sig(p.value.re, digits),
                    fmt_sig(p.value.im, digits),
                    fmt_sig(row.oracle.value.re, digits),
                    fmt_sig(row.oracle.value.im, digits),
                    fmt_sig(p.distance, digits)
                ));
            }
        }
        out
    }
}

/// Oracle resonances at angular index l, one per overtone k = 0..=kmax, assigned to the
/// nearest point of the reference lattice.
pub fn oracle_overtones(
    chart: &ChartMap,
    model: Model,
    reference: &LatticeVariant,
    l: f64,
    kmax: u32,
    settings: &ScalingSettings,
) -> Result<Vec<Option<ResonanceEstimate>>> {
    let h = model_h(model, l);
    let res = scaled_eigen_resonances(chart, model, h, kmax as usize + 3, settings)?;
    let order = 2;
    let mut taken = vec![false; res.estimates.len()];
    let mut out = Vec::new();
    for k in 0..=kmax {
        let target = lattice_value(model, reference, k, l, order)?;
        let spacing = (lattice_value(model, reference, k + 1, l, 1)?
            - lattice_value(model, reference, k, l, 1)?)
        .norm();
        let best = res
            .estimates
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .min_by(|a, b| {
                (a.1.value - target)
                    .norm()
                    .total_cmp(&(b.1.value - target).norm())
            });
        match best {
            Some((i, e)) if (e.value - target).norm() < 0.5 * spacing => {
                taken[i] = true;
                out.push(Some(ResonanceEstimate {
                    n: Some(l + 0.5),
                    ..*e
                }));
            }
            _ => out.push(None),
        }
    }
    Ok(out)
}

/// Distances between oracle resonances and the lattices of each variant and order, with
/// power-law fits against n = l + 1/2.
pub fn convergence_study(
    chart: &ChartMap,
    model: Model,
    variants: &[LatticeVariant],
    ls: &[f64],
    kmax: u32,
    orders: &[usize],
    settings: &ScalingSettings,
) -> Result<ConvergenceStudy> {
    let reference = variants
        .iter()
        .find(|v| v.tag == CandidateTag::Engine)
        .ok_or_else(|| {
            QnmError::Configuration("convergence study needs the engine variant".into())
        })?;
    let per_l: Vec<Result<Vec<Option<ResonanceEstimate>>>> = ls
        .par_iter()
        .map(|&l| oracle_overtones(chart, model, reference, l, kmax, settings))
        .collect();
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for (&l, est) in ls.iter().zip(per_l) {
        for (k, e) in est?.into_iter().enumerate() {
            let k = k as u32;
            if k as f64 > DEFAULT_TRUNCATION * l + 1e-12 {
                continue;
            }
            let Some(oracle) = e else {
                missing.push((l, k));
                continue;
            };
            let mut lattice = Vec::new();
            for v in variants {
                for &order in orders {
                    let value = lattice_value(model, v, k, l, order)?;
                    lattice.push(LatticePoint {
                        tag: v.tag,
                        order,
                        value,
                        distance: (value - oracle.value).norm(),
                    });
                }
            }
            rows.push(ConvergenceRow {
                l,
                n: l + 0.5,
                k,
                oracle,
                lattice,
            });
        }
    }
    let mut fits = Vec::new();
    for v in variants {
        for &order in orders {
            for k in 0..=kmax {
                let (ns, ds): (Vec<f64>, Vec<f64>) = rows
                    .iter()
                    .filter(|r| r.k == k)
                    .filter_map(|r| {
                        r.lattice
                            .iter()
                            .find(|p| p.tag == v.tag && p.order == order)
                            .map(|p| (r.n, p.distance))
                    })
                    .unzip();
                let fit = power_law(&ns, &ds);
                let expected = -(crate::bnf::effective_order(order) as f64);
                let pass = fit.is_some_and(|f| (f.exponent - expected).abs() <= SLOPE_TOL);
                fits.push(ConvergenceFit {
                    tag: v.tag,
                    order,
                    k,
                    fit,
                    expected,
                    pass,
                });
            }
        }
    }
    let pass = missing.is_empty()
        && fits
            .iter()
            .filter(|f| f.tag == CandidateTag::Engine)
            .all(|f| f.pass);
    Ok(ConvergenceStudy {
        model,
        rows,
        fits,
        missing,
        pass,
    })
}

/// Angular indices log-spaced in [lo, hi]: integers for dSS, half-integers for dSRN.
pub fn log_spaced_l(model: Model, lo: u32, hi: u32, count: usize) -> Vec<f64> {
    let base = crate::numerics::fit::log_spaced(lo, hi, count);
    match model {
        Model::Dss => base.into_iter().map(|l| l as f64).collect(),
        Model::Dsrn => {
            let mut v: Vec<f64> = base
                .into_iter()
                .map(|l| (l as f64 + 0.5).min(hi as f64 - 0.5))
                .collect();
            v.dedup();
            v
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TagSlopes {
    pub tag: CandidateTag,
    pub b12: f64,
    pub slopes: Vec<f64>,
    pub decays_like_n_minus_2: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct B12Verdict {
    pub order: usize,
    pub tags: Vec<TagSlopes>,
    /// candidate_a or candidate_b, or "inconclusive".
    pub verdict: String,
    pub winner: Option<CandidateTag>,
}

fn verdict_from(
    study: &ConvergenceStudy,
    values: &[(CandidateTag, f64)],
    order: usize,
) -> B12Verdict {
    let tags: Vec<TagSlopes> = values
        .iter()
        .map(|&(tag, b12)| {
            let slopes = study.slopes(tag, order);
            let ok = !slopes.is_empty() && slopes.iter().all(|s| (s + 2.0).abs() <= SLOPE_TOL);
            TagSlopes {
                tag,
                b12,
                slopes,
                decays_like_n_minus_2: ok,
            }
        })
        .collect();
    let winners: Vec<CandidateTag> = tags
        .iter()
        .filter(|t| t.decays_like_n_minus_2 && t.tag != CandidateTag::Engine)
        .map(|t| t.tag)
        .collect();
    let (verdict, winner) = match winners.as_slice() {
        [one] => (one.to_string(), Some(*one)),
        _ => ("inconclusive".to_string(), None),
    };
    B12Verdict {
        order,
        tags,
        verdict,
        winner,
    }
}

/// Chooses between the two closed-form b12 candidates from the order-2 slopes of a dSRN study.
pub fn adjudicate_b12(
    study: &ConvergenceStudy,
    coeffs: &BnfCoefficients<f64>,
) -> Result<B12Verdict> {
    if study.model != Model::Dsrn {
        return Err(QnmError::Configuration(
            "b12 adjudication needs a dsrn study".into(),
        ));
    }
    let c = b12_candidates(coeffs)?;
    Ok(verdict_from(
        study,
        &[
            (CandidateTag::Engine, coeffs.b12()),
            (CandidateTag::CandidateA, c.candidate_a),
            (CandidateTag::CandidateB, c.candidate_b),
        ],
        2,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedB12 {
    pub ns: Vec<f64>,
    pub tags: Vec<TagSlopes>,
    /// Tags whose order-2 lattice decays like n^-2.
    pub winners: Vec<CandidateTag>,
    pub selects_recursion: bool,
}

/// Oracle on alpha^2 + h alpha' for an analytic skewed barrier, where the recursion value of b12
/// is known exactly, against the closed-form candidates evaluated on the same barrier.
pub fn manufactured_b12(
    ns: &[f64],
    kmax: u32,
    settings: &ScalingSettings,
) -> Result<ManufacturedB12> {
    let barrier = AnalyticBarrier::skewed_sech(1.0, 1.0, 0.3)?;
    let exp = barrier.expansion(8);
    let coeffs = barrier_normal_form(&exp, 4)?;
    let cand = B12Candidates::new(exp.z0, exp.omega, exp.v0_derivatives[3]);
    let values = [
        (CandidateTag::Engine, coeffs.b12()),
        (CandidateTag::CandidateA, cand.candidate_a),
        (CandidateTag::CandidateB, cand.candidate_b),
    ];
    let variants: Vec<LatticeVariant> = values
        .iter()
        .map(|&(tag, b)| LatticeVariant {
            tag,
            coeffs: with_b12(&coeffs, b),
        })
        .collect();
    let per_n: Vec<Result<Vec<ResonanceEstimate>>> = ns
        .par_iter()
        .map(|&n| {
            let pot = AnalyticBarrier::skewed_sech(1.0, 1.0, 0.3)?.with_h(1.0 / n, 1.0);
            Ok(scaled_eigen_resonances_for(&pot, 1.0 / n, kmax as usize + 3, settings)?.estimates)
        })
        .collect();
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for (&n, est) in ns.iter().zip(per_n) {
        let est = est?;
        let l = n - 0.5;
        for k in 0..=kmax {
            let target = dsrn_value(&coeffs, k, l, 2)?;
            let Some(oracle) = est.iter().min_by(|a, b| {
                (a.value - target)
                    .norm()
                    .total_cmp(&(b.value - target).norm())
            }) else {
                missing.push((l, k));
                continue;
            };
            let lattice = variants
                .iter()
                .map(|v| {
                    let value = dsrn_value(&v.coeffs, k, l, 2)?;
                    Ok(LatticePoint {
                        tag: v.tag,
                        order: 2,
                        value,
                        distance: (value - oracle.value).norm(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(ConvergenceRow {
                l,
                n,
                k,
                oracle: *oracle,
                lattice,
            });
        }
    }
    let mut fits = Vec::new();
    for v in &variants {
        for k in 0..=kmax {
            let (xs, ds): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.k == k)
                .filter_map(|r| {
                    r.lattice
                        .iter()
                        .find(|p| p.tag == v.tag)
                        .map(|p| (r.n, p.distance))
                })
                .unzip();
            let fit = power_law(&xs, &ds);
            let pass = fit.is_some_and(|f| (f.exponent + 2.0).abs() <= SLOPE_TOL);
            fits.push(ConvergenceFit {
                tag: v.tag,
                order: 2,
                k,
                fit,
                expected: -2.0,
                pass,
            });
        }
    }
    let study = ConvergenceStudy {
        model: Model::Dsrn,
        rows,
        fits,
        pass: missing.is_empty(),
        missing,
    };
    let verdict = verdict_from(&study, &values, 2);
    let winners: Vec<CandidateTag> = verdict
        .tags
        .iter()
        .filter(|t| t.decays_like_n_minus_2)
        .map(|t| t.tag)
        .collect();
    Ok(ManufacturedB12 {
        ns: ns.to_vec(),
        selects_recursion: winners == [CandidateTag::Engine],
        tags: verdict.tags,
        winners,
    })
}

/// Settings for the manufactured barrier.
pub fn manufactured_settings() -> ScalingSettings {
    ScalingSettings {
        grid: 300,
        theta: 0.5,
        map_scale: 3.0,
        ..ScalingSettings::default()
    }
}
