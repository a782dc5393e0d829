//! Pseudopole lattices from the normal-form energies, mirror images,
//! resonance-set assembly and region filters.

use crate::bnf::{effective_order, energy_series, B12Candidates, BnfCoefficients, Provenance};
use crate::chart::fmt_sig;
use crate::error::{QnmError, Result};
use crate::geometry::Model;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Dirac,
    Mirror,
    SchrodingerUnion,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Dirac => "dirac",
            Branch::Mirror => "mirror",
            Branch::SchrodingerUnion => "schrodinger_union",
        })
    }
}

/// Which b12 value (dSRN) or which angular parameterization (dSS) produced a pole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateTag {
    Engine,
    CandidateA,
    CandidateB,
    /// dSS values expanded in [l(l+1)]^(1/2) instead of l + 1/2.
    Llp1,
}

impl fmt::Display for CandidateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateTag::Engine => "engine",
            CandidateTag::CandidateA => "candidate_a",
            CandidateTag::CandidateB => "candidate_b",
            CandidateTag::Llp1 => "llp1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pseudopole {
    pub model: Model,
    pub branch: Branch,
    pub tag: CandidateTag,
    pub k: u32,
    pub l: f64,
    /// l + 1/2
    pub n: f64,
    pub value: Complex64,
    pub multiplicity: u32,
    pub order: usize,
}

impl Pseudopole {
    /// The reflection lambda -> -conj(lambda).
    pub fn mirror(&self) -> Pseudopole {
        let branch = match self.branch {
            Branch::Dirac => Branch::Mirror,
            Branch::Mirror => Branch::Dirac,
            b => b,
        };
        Pseudopole {
            branch,
            value: -self.value.conj(),
            ..*self
        }
    }

    fn sort_key(&self, other: &Self) -> Ordering {
        self.l
            .total_cmp(&other.l)
            .then(self.k.cmp(&other.k))
            .then(self.branch.cmp(&other.branch))
            .then(self.tag.cmp(&other.tag))
            .then(self.value.re.total_cmp(&other.value.re))
    }
}

pub fn sort_poles(poles: &mut [Pseudopole]) {
    poles.sort_by(|a, b| a.sort_key(b));
}

/// Overtones with k > ratio * l are not emitted by default.
pub const DEFAULT_TRUNCATION: f64 = 0.25;

/// Ranges of a lattice computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kmax: u32,
    pub lmin: f64,
    pub lmax: f64,
    pub order: usize,
    /// Keep k <= ratio * l when set.
    pub truncation: Option<f64>,
}

impl LatticeSpec {
    pub fn new(kmax: u32, lmin: f64, lmax: f64, order: usize) -> Self {
        LatticeSpec {
            kmax,
            lmin,
            lmax,
            order,
            truncation: Some(DEFAULT_TRUNCATION),
        }
    }

    pub fn untruncated(mut self) -> Self {
        self.truncation = None;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lmin >= 1.0 && self.lmax >= self.lmin && self.lmax.is_finite()) {
            return Err(QnmError::Configuration(format!(
                "angular range [{}, {}] invalid (need 1 <= lmin <= lmax)",
                self.lmin, self.lmax
            )));
        }
        if let Some(r) = self.truncation {
            if !(r > 0.0) {
                return Err(QnmError::Configuration(format!(
                    "truncation ratio must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }

    /// Angular indices: half-integers for dSRN, integers for dSS.
    pub fn angular_indices(&self, model: Model) -> Vec<f64> {
        let offset = match model {
            Model::Dsrn => 0.5,
            Model::Dss => 0.0,
        };
        let mut l = (self.lmin - offset - 1e-9).ceil() + offset;
        let mut out = Vec::new();
        while l <= self.lmax + 1e-9 {
            out.push(l);
            l += 1.0;
        }
        out
    }

    fn pairs(&self, model: Model) -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        for l in self.angular_indices(model) {
            for k in 0..=self.kmax {
                if self.truncation.is_none_or(|r| k as f64 <= r * l + 1e-12) {
                    out.push((k, l));
                }
            }
        }
        out
    }
}

/// Square-root series: s with (sum s_j h^j)^2 = sum e_j h^j and s_0 = sqrt(e_0) > 0.
pub fn sqrt_series(e: &[Complex64]) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(0.0, 0.0); e.len()];
    if e.is_empty() {
        return s;
    }
    s[0] = e[0].sqrt();
    for j in 1..e.len() {
        let mut acc = e[j];
        for i in 1..j {
            acc -= s[i] * s[j - i];
        }
        s[j] = acc / (2.0 * s[0]);
    }
    s
}

fn binomial(a: f64, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, t| acc * (a - t as f64) / (t as f64 + 1.0))
}

/// f_p with lambda = sum_p f_p n^(1-p) when h = 1/sqrt(n^2 - 1/4), given s_j for lambda = sum_j s_j h^(j-1).
pub fn reexpand_llp1(s: &[Complex64]) -> Vec<Complex64> {
    let mut f = vec![Complex64::new(0.0, 0.0); s.len()];
    for (j, sj) in s.iter().enumerate() {
        let m = j as f64 - 1.0;
        let mut i = 0;
        while j + 2 * i < s.len() {
            f[j + 2 * i] += sj * binomial(-m / 2.0, i) * (-0.25f64).powi(i as i32);
            i += 1;
        }
    }
    f
}

/// Lattice coefficients f_0..f_p for overtone k.
pub fn lattice_coefficients(
    coeffs: &BnfCoefficients<f64>,
    model: Model,
    k: u32,
    order: usize,
) -> Result<Vec<Complex64>> {
    let s = sqrt_series(&energy_series(coeffs, k, order)?);
    Ok(match model {
        Model::Dsrn => s,
        Model::Dss => reexpand_llp1(&s),
    })
}

fn eval_lattice(f: &[Complex64], n: f64) -> Complex64 {
    f.iter()
        .enumerate()
        .map(|(p, c)| c * n.powi(1 - p as i32))
        .sum()
}

/// Truncated expansions can leave the lower half-plane at small l; such points are not emitted.
fn physical(value: Complex64) -> bool {
    value.im < 0.0 && value.re.is_finite()
}

/// Copy of the coefficients with b12 replaced by a closed-form candidate.
pub fn with_b12(coeffs: &BnfCoefficients<f64>, value: f64) -> BnfCoefficients<f64> {
    let mut c = coeffs.clone();
    c.set(1, 1, value, Provenance::ClosedForm);
    c
}

/// Copy of the coefficients with b02 set to zero (mutation hook).
pub fn with_zero_b02(coeffs: &BnfCoefficients<f64>) -> BnfCoefficients<f64> {
    let mut c = coeffs.clone();
    c.set(0, 2, 0.0, Provenance::ClosedForm);
    c
}

/// The b12 candidates built from the normalization record.
pub fn b12_candidates(coeffs: &BnfCoefficients<f64>) -> Result<B12Candidates> {
    let r = coeffs.record.as_ref().ok_or_else(|| {
        QnmError::Configuration("normal form carries no normalization record".into())
    })?;
    Ok(B12Candidates::new(r.z0, r.omega, r.v0_third))
}

fn require_model(coeffs: &BnfCoefficients<f64>, model: Model) -> Result<()> {
    match &coeffs.record {
        Some(r) if r.model != model => Err(QnmError::Configuration(format!(
            "coefficients belong to the {} model, not {model}",
            r.model
        ))),
        _ => Ok(()),
    }
}

/// Single dSRN pole lambda = n sqrt(E_k(1/n)) expanded in 1/n.
pub fn dsrn_value(
    coeffs: &BnfCoefficients<f64>,
    k: u32,
    l: f64,
    order: usize,
) -> Result<Complex64> {
    let f = lattice_coefficients(coeffs, Model::Dsrn, k, order)?;
    Ok(eval_lattice(&f, l + 0.5))
}

/// Single dSS pole, in l + 1/2 (`llp1 = false`) or in [l(l+1)]^(1/2).
pub fn dss_value(
    coeffs: &BnfCoefficients<f64>,
    k: u32,
    l: f64,
    order: usize,
    llp1: bool,
) -> Result<Complex64> {
    if llp1 {
        let s = sqrt_series(&energy_series(coeffs, k, order)?);
        let m = (l * (l + 1.0)).sqrt();
        Ok(eval_lattice(&s, m))
    } else {
        let f = lattice_coefficients(coeffs, Model::Dss, k, order)?;
        Ok(eval_lattice(&f, l + 0.5))
    }
}

/// dSRN lattice on the Dirac branch, with the b12 candidates from order 2 on.
pub fn dsrn_pseudopoles(
    coeffs: &BnfCoefficients<f64>,
    spec: &LatticeSpec,
) -> Result<Vec<Pseudopole>> {
    spec.validate()?;
    require_model(coeffs, Model::Dsrn)?;
    let mut variants = vec![(CandidateTag::Engine, coeffs.clone())];
    if effective_order(spec.order) >= 2 {
        let cand = b12_candidates(coeffs)?;
        variants.push((CandidateTag::CandidateA, with_b12(coeffs, cand.candidate_a)));
        variants.push((CandidateTag::CandidateB, with_b12(coeffs, cand.candidate_b)));
    }
    let pairs = spec.pairs(Model::Dsrn);
    let mut out: Vec<Pseudopole> = variants
        .par_iter()
        .flat_map(|(tag, c)| {
            pairs.par_iter().map(move |&(k, l)| {
                let value = dsrn_value(c, k, l, spec.order)?;
                Ok(physical(value).then_some(Pseudopole {
                    model: Model::Dsrn,
                    branch: Branch::Dirac,
                    tag: *tag,
                    k,
                    l,
                    n: l + 0.5,
                    value,
                    multiplicity: (2.0 * l - 1.0).round() as u32,
                    order: spec.order,
                }))
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    sort_poles(&mut out);
    Ok(out)
}

/// dSS lattice in both angular parameterizations.
pub fn dss_pseudopoles(
    coeffs: &BnfCoefficients<f64>,
    spec: &LatticeSpec,
) -> Result<Vec<Pseudopole>> {
    spec.validate()?;
    require_model(coeffs, Model::Dss)?;
    let pairs = spec.pairs(Model::Dss);
    let mut out: Vec<Pseudopole> = [CandidateTag::Engine, CandidateTag::Llp1]
        .par_iter()
        .flat_map(|tag| {
            pairs.par_iter().map(move |&(k, l)| {
                let value = dss_value(coeffs, k, l, spec.order, *tag == CandidateTag::Llp1)?;
                Ok(physical(value).then_some(Pseudopole {
                    model: Model::Dss,
                    branch: Branch::SchrodingerUnion,
                    tag: *tag,
                    k,
                    l,
                    n: l + 0.5,
                    value,
                    multiplicity: (2.0 * l + 1.0).round() as u32,
                    order: spec.order,
                }))
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    sort_poles(&mut out);
    Ok(out)
}

/// Lattice for the model the coefficients were computed for.
pub fn pseudopoles(
    coeffs: &BnfCoefficients<f64>,
    model: Model,
    spec: &LatticeSpec,
) -> Result<Vec<Pseudopole>> {
    match model {
        Model::Dsrn => dsrn_pseudopoles(coeffs, spec),
        Model::Dss => dss_pseudopoles(coeffs, spec),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSets {
    pub dirac: Vec<Pseudopole>,
    pub mirror: Vec<Pseudopole>,
    /// Res(D) together with its mirror; points on the imaginary axis appear once.
    pub union: Vec<Pseudopole>,
}

/// Relative tolerance for treating lambda and -conj(lambda) as the same point.
pub const MIRROR_TOL: f64 = 1e-12;

pub fn assemble_resonance_sets(dirac: &[Pseudopole]) -> Result<ResonanceSets> {
    if let Some(p) = dirac.iter().find(|p| p.branch != Branch::Dirac) {
        return Err(QnmError::Configuration(format!(
            "assemble expects dirac-branch poles, got {}",
            p.branch
        )));
    }
    let mirror: Vec<Pseudopole> = dirac.iter().map(Pseudopole::mirror).collect();
    let mut union = Vec::with_capacity(2 * dirac.len());
    for (p, m) in dirac.iter().zip(&mirror) {
        union.push(Pseudopole {
            branch: Branch::SchrodingerUnion,
            ..*p
        });
        if p.value.re.abs() > MIRROR_TOL * p.value.norm().max(1.0) {
            union.push(Pseudopole {
                branch: Branch::SchrodingerUnion,
                ..*m
            });
        }
    }
    let mut dirac = dirac.to_vec();
    let mut mirror = mirror;
    sort_poles(&mut dirac);
    sort_poles(&mut mirror);
    sort_poles(&mut union);
    Ok(ResonanceSets {
        dirac,
        mirror,
        union,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    /// Depth bound: Im lambda > -c.
    pub c: f64,
    /// Real-part floor: |Re lambda| > k_floor.
    pub k_floor: f64,
    /// Aperture: Im lambda > -theta |Re lambda|.
    pub theta: f64,
    /// Resonance-free band [r, n/r] + i[-c0, 0].
    pub r: f64,
    pub c0: f64,
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("C", self.c),
            ("K", self.k_floor),
            ("theta", self.theta),
            ("R", self.r),
            ("C0", self.c0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QnmError::Configuration(format!(
                    "region parameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.im > -self.c && z.re.abs() > self.k_floor && z.im > -self.theta * z.re.abs()
    }

    /// Whether z lies in the band for angular parameter n (empty when n/R < R).
    pub fn in_free_band(&self, z: Complex64, n: f64) -> bool {
        z.re >= self.r && z.re <= n / self.r && z.im >= -self.c0 && z.im <= 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: Vec<Pseudopole>,
    pub excluded: usize,
    /// Poles inside the resonance-free band; reported, never dropped.
    pub violations: Vec<Pseudopole>,
}

pub fn filter_regions(poles: &[Pseudopole], region: &RegionSpec) -> Result<FilterReport> {
    region.validate()?;
    let mut kept = Vec::new();
    let mut violations = Vec::new();
    for p in poles {
        if region.in_free_band(p.value, p.n) {
            violations.push(*p);
        }
        if region.contains(p.value) {
            kept.push(*p);
        }
    }
    Ok(FilterReport {
        excluded: poles.len() - kept.len(),
        kept,
        violations,
    })
}

pub const CSV_HEADER: &str = "model,branch,k,l,n,re,im,multiplicity,order,candidate_tag";

pub fn to_csv(poles: &[Pseudopole], digits: usize) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in poles {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            p.model,
            p.branch,
            p.k,
            fmt_sig(p.l, digits),
            fmt_sig(p.n, digits),
            fmt_sig(p.value.re, digits),
            fmt_sig(p.value.im, digits),
            p.multiplicity,
            p.order,
            p.tag
        ));
    }
    out
}

/// JSON rows with the same fields as the CSV export.
pub fn to_json(poles: &[Pseudopole], digits: usize) -> serde_json::Value {
    let round = |v: f64| fmt_sig(v, digits).parse::<f64>().unwrap_or(v);
    serde_json::Value::Array(
        poles
            .iter()
            .map(|p| {
                serde_json::json!({
                    "model": p.model,
                    "branch": p.branch,
                    "k": p.k,
                    "l": p.l,
                    "n": p.n,
                    "re": round(p.value.re),
                    "im": round(p.value.im),
                    "multiplicity": p.multiplicity,
                    "order": p.order,
                    "candidate_tag": p.tag,
                })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_series_squares_back() {
        let e = [
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, -0.3),
            Complex64::new(0.1, 0.05),
        ];
        let s = sqrt_series(&e);
        assert!((s[0] * s[0] - e[0]).norm() < 1e-15);
        assert!((2.0 * s[0] * s[1] - e[1]).norm() < 1e-15);
        assert!((2.0 * s[0] * s[2] + s[1] * s[1] - e[2]).norm() < 1e-15);
    }

    #[test]
    fn llp1_shift() {
        let s = [Complex64::new(1.0, 0.0)];
        let f = reexpand_llp1(&[s[0], Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((f[2].re + 0.125).abs() < 1e-15);
    }

    #[test]
    fn angular_ranges() {
        let spec = LatticeSpec::new(2, 1.0, 4.0, 1);
        assert_eq!(spec.angular_indices(Model::Dsrn), vec![1.5, 2.5, 3.5]);
        assert_eq!(spec.angular_indices(Model::Dss), vec![1.0, 2.0, 3.0, 4.0]);
    }
}
