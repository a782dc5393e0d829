//! Adaptive Dormand–Prince 5(4) integration of complex systems.

use num_complex::Complex64;

pub type State<const N: usize> = [Complex64; N];

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub min_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-13,
            atol: 1e-15,
            max_steps: 200_000,
            min_step: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OdeFailure {
    StepUnderflow { t: f64 },
    TooManySteps { t: f64 },
    NonFinite { t: f64 },
    Rejected { t: f64, reason: String },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates y' = f(t, y) from t0 to t1 (either direction). `check` may veto
/// an accepted state, which aborts the integration.
pub fn integrate<const N: usize, F, G>(
    f: F,
    t0: f64,
    y0: State<N>,
    t1: f64,
    opts: &OdeOptions,
    mut check: G,
) -> Result<State<N>, OdeFailure>
where
    F: Fn(f64, &State<N>) -> State<N>,
    G: FnMut(f64, &State<N>) -> Result<(), String>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * (span.abs() / 16.0).min(0.05);
    let zero = Complex64::new(0.0, 0.0);
    for _ in 0..opts.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok(y);
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let mut k = [[zero; N]; 7];
        k[0] = f(t, &y);
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = zero;
                for j in 0..s {
                    acc += k[j][i] * A[s][j];
                }
                *yi += acc * h;
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut acc = zero;
            let mut eacc = zero;
            for s in 0..7 {
                acc += k[s][i] * B[s];
                eacc += k[s][i] * E[s];
            }
            y_new[i] = y[i] + acc * h;
            let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max((eacc * h).norm() / scale);
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            h *= 0.25;
            if h.abs() < opts.min_step {
                return Err(OdeFailure::NonFinite { t });
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            check(t, &y).map_err(|reason| OdeFailure::Rejected { t, reason })?;
            if (t1 - t) * dir <= 0.0 {
                return Ok(y);
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < opts.min_step {
                return Err(OdeFailure::StepUnderflow { t });
            }
        }
    }
    Err(OdeFailure::TooManySteps { t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential() {
        let lam = Complex64::new(-0.3, 2.0);
        let y = integrate(
            |_, y: &State<1>| [y[0] * lam],
            0.0,
            [Complex64::new(1.0, 0.0)],
            3.0,
            &OdeOptions::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-11);
        let back = integrate(
            |_, y: &State<1>| [y[0] * lam],
            3.0,
            y,
            0.0,
            &OdeOptions::default(),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((back[0] - 1.0).norm() < 1e-11);
    }
}
