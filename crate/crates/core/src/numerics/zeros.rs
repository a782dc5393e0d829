//! Zeros of analytic functions in rectangles by the argument principle.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Mutex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.re_max > self.re_min && self.im_max > self.im_min)
    }

    pub fn contains(&self, z: Complex64, pad: f64) -> bool {
        z.re >= self.re_min - pad
            && z.re <= self.re_max + pad
            && z.im >= self.im_min - pad
            && z.im <= self.im_max + pad
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    /// Quadrants split at the given fractions of the width and height.
    fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re_min + fx * (self.re_max - self.re_min);
        let ym = self.im_min + fy * (self.im_max - self.im_min);
        [
            Rect::new(self.re_min, xm, self.im_min, ym),
            Rect::new(xm, self.re_max, self.im_min, ym),
            Rect::new(xm, self.re_max, ym, self.im_max),
            Rect::new(self.re_min, xm, ym, self.im_max),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroOptions {
    /// Largest accepted phase change of f between neighbouring boundary samples.
    pub max_phase_step: f64,
    pub samples_per_edge: usize,
    pub max_refinements: usize,
    /// Cells below this diameter are not subdivided further.
    pub min_cell: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        ZeroOptions {
            max_phase_step: 0.4,
            samples_per_edge: 16,
            max_refinements: 14,
            min_cell: 1e-6,
            newton_tol: 1e-12,
            max_newton: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroError {
    ZeroOnBoundary(Complex64),
    PhaseUnresolved {
        winding: f64,
    },
    Inconsistent {
        rect: Rect,
        expected: i64,
        located: usize,
    },
}

impl std::fmt::Display for ZeroError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZeroError::ZeroOnBoundary(z) => write!(f, "function vanishes on the contour near {z}"),
            ZeroError::PhaseUnresolved { winding } => {
                write!(f, "boundary phase not resolved (winding {winding})")
            }
            ZeroError::Inconsistent {
                rect,
                expected,
                located,
            } => {
                write!(
                    f,
                    "winding {expected} but {located} zeros located in {rect:?}"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSearch {
    pub winding: i64,
    pub zeros: Vec<Complex64>,
    pub evaluations: usize,
}

fn key(z: Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

/// Memoizing wrapper that evaluates batches in parallel.
pub struct Evaluator<'a> {
    f: &'a (dyn Fn(Complex64) -> Complex64 + Sync),
    cache: Mutex<HashMap<(u64, u64), Complex64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(f: &'a (dyn Fn(Complex64) -> Complex64 + Sync)) -> Self {
        Evaluator {
            f,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn evaluations(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        if let Some(v) = self.cache.lock().unwrap().get(&key(z)) {
            return *v;
        }
        let v = (self.f)(z);
        self.cache.lock().unwrap().insert(key(z), v);
        v
    }

    pub fn eval_many(&self, zs: &[Complex64]) -> Vec<Complex64> {
        let missing: Vec<Complex64> = {
            let cache = self.cache.lock().unwrap();
            zs.iter()
                .filter(|z| !cache.contains_key(&key(**z)))
                .copied()
                .collect()
        };
        let vals: Vec<(Complex64, Complex64)> =
            missing.par_iter().map(|&z| (z, (self.f)(z))).collect();
        let mut cache = self.cache.lock().unwrap();
        for (z, v) in vals {
            cache.insert(key(z), v);
        }
        zs.iter().map(|z| cache[&key(*z)]).collect()
    }
}

fn edge_points(a: Complex64, b: Complex64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| a + (b - a) * (i as f64 / n as f64))
        .collect()
}

/// Winding number of f around the rectangle boundary (counter-clockwise).
pub fn winding_number(ev: &Evaluator, rect: &Rect, opts: &ZeroOptions) -> Result<i64, ZeroError> {
    let c = rect.corners();
    let mut pts: Vec<Complex64> = Vec::new();
    for k in 0..4 {
        pts.extend(edge_points(c[k], c[(k + 1) % 4], opts.samples_per_edge));
    }
    pts.push(c[0]);
    let mut vals = ev.eval_many(&pts);
    for _ in 0..opts.max_refinements {
        let local = |i: usize| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(vals.len() - 1);
            vals[lo].norm().max(vals[hi].norm())
        };
        if let Some(i) =
            (0..vals.len()).find(|&i| vals[i].norm() <= 1e-300_f64.max(1e-14 * local(i)))
        {
            return Err(ZeroError::ZeroOnBoundary(pts[i]));
        }
        let bad: Vec<usize> = (0..pts.len() - 1)
            .filter(|&i| (vals[i + 1] / vals[i]).arg().abs() > opts.max_phase_step)
            .collect();
        if bad.is_empty() {
            let total: f64 = (0..pts.len() - 1)
                .map(|i| (vals[i + 1] / vals[i]).arg())
                .sum();
            let w = total / (2.0 * std::f64::consts::PI);
            let r = w.round();
            if (w - r).abs() > 1e-3 {
                return Err(ZeroError::PhaseUnresolved { winding: w });
            }
            return Ok(r as i64);
        }
        let mids: Vec<Complex64> = bad.iter().map(|&i| 0.5 * (pts[i] + pts[i + 1])).collect();
        let mvals = ev.eval_many(&mids);
        let mut np = Vec::with_capacity(pts.len() + mids.len());
        let mut nv = Vec::with_capacity(pts.len() + mids.len());
        let mut bi = 0;
        for i in 0..pts.len() {
            np.push(pts[i]);
            nv.push(vals[i]);
            if bi < bad.len() && bad[bi] == i {
                np.push(mids[bi]);
                nv.push(mvals[bi]);
                bi += 1;
            }
        }
        pts = np;
        vals = nv;
    }
    let total: f64 = (0..pts.len() - 1)
        .map(|i| (vals[i + 1] / vals[i]).arg())
        .sum();
    Err(ZeroError::PhaseUnresolved {
        winding: total / (2.0 * std::f64::consts::PI),
    })
}

fn newton(ev: &Evaluator, start: Complex64, opts: &ZeroOptions, scale: f64) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..opts.max_newton {
        let d = 1e-7 * scale.max(1e-3);
        let f = (ev.f)(z);
        let df = ((ev.f)(z + d) - (ev.f)(z - d)) / (2.0 * d);
        if df.norm() == 0.0 || !df.re.is_finite() {
            return None;
        }
        let step = f / df;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        if step.norm() <= opts.newton_tol * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

fn locate(
    ev: &Evaluator,
    rect: Rect,
    count: i64,
    opts: &ZeroOptions,
    out: &mut Vec<Complex64>,
    depth: usize,
) -> Result<(), ZeroError> {
    if count <= 0 {
        return Ok(());
    }
    let pad = 0.05 * rect.diameter();
    if count == 1 {
        if let Some(z) = newton(ev, rect.center(), opts, rect.diameter()) {
            if rect.contains(z, pad * 1e-3) {
                out.push(z);
                return Ok(());
            }
        }
    }
    if rect.diameter() < opts.min_cell || depth > 60 {
        let z = newton(ev, rect.center(), opts, rect.diameter()).unwrap_or(rect.center());
        for _ in 0..count {
            out.push(z);
        }
        return Ok(());
    }
    let fractions = [(0.5, 0.5), (0.4871, 0.5137), (0.5313, 0.4719)];
    for (fx, fy) in fractions {
        let cells = rect.split(fx, fy);
        let counts: Result<Vec<i64>, ZeroError> =
            cells.iter().map(|c| winding_number(ev, c, opts)).collect();
        match counts {
            Ok(counts) if counts.iter().sum::<i64>() == count && counts.iter().all(|&c| c >= 0) => {
                for (cell, c) in cells.iter().zip(counts) {
                    locate(ev, *cell, c, opts, out, depth + 1)?;
                }
                return Ok(());
            }
            _ => continue,
        }
    }
    Err(ZeroError::Inconsistent {
        rect,
        expected: count,
        located: 0,
    })
}

/// Counts and locates the zeros of f inside the rectangle.
pub fn find_zeros(
    f: &(dyn Fn(Complex64) -> Complex64 + Sync),
    rect: &Rect,
    opts: &ZeroOptions,
) -> Result<ZeroSearch, ZeroError> {
    let ev = Evaluator::new(f);
    if rect.is_empty() {
        return Ok(ZeroSearch {
            winding: 0,
            zeros: Vec::new(),
            evaluations: 0,
        });
    }
    let winding = winding_number(&ev, rect, opts)?;
    let mut zeros = Vec::new();
    locate(&ev, *rect, winding, opts, &mut zeros, 0)?;
    if zeros.len() as i64 != winding {
        return Err(ZeroError::Inconsistent {
            rect: *rect,
            expected: winding,
            located: zeros.len(),
        });
    }
    zeros.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    Ok(ZeroSearch {
        winding,
        zeros,
        evaluations: ev.evaluations(),
    })
}

/// Winding count only.
pub fn count_zeros(
    f: &(dyn Fn(Complex64) -> Complex64 + Sync),
    rect: &Rect,
    opts: &ZeroOptions,
) -> Result<i64, ZeroError> {
    if rect.is_empty() {
        return Ok(0);
    }
    winding_number(&Evaluator::new(f), rect, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_zeros() {
        let roots = [
            Complex64::new(0.3, -0.2),
            Complex64::new(-0.5, -0.7),
            Complex64::new(0.31, -0.21),
        ];
        let f = move |z: Complex64| {
            roots
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, r| acc * (z - r))
                * (z * 0.3).exp()
        };
        let res = find_zeros(
            &f,
            &Rect::new(-1.0, 1.0, -1.0, 0.1),
            &ZeroOptions::default(),
        )
        .unwrap();
        assert_eq!(res.winding, 3);
        for r in roots {
            assert!(res.zeros.iter().any(|z| (z - r).norm() < 1e-10));
        }
        let none =
            count_zeros(&f, &Rect::new(2.0, 3.0, -1.0, 1.0), &ZeroOptions::default()).unwrap();
        assert_eq!(none, 0);
    }
}
