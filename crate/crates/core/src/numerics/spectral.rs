//! Chebyshev collocation on the real line through the algebraic map
//! y = L s / sqrt(1 - s^2).

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Gauss–Lobatto points cos(pi j / n), j = 0..=n, and the differentiation matrix.
pub fn chebyshev(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let s: Vec<f64> = (0..=n)
        .map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
    let mut d = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                d[(i, j)] = c(i) / c(j) * sign / (s[i] - s[j]);
            }
        }
    }
    for i in 0..=n {
        let row: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -row;
    }
    (s, d)
}

/// Interior collocation abscissae y_j and the matrix of d^2/dy^2 with
/// homogeneous conditions at y = +-infinity.
pub struct MappedGrid {
    pub y: Vec<f64>,
    pub second: DMatrix<f64>,
    pub scale: f64,
}

impl MappedGrid {
    pub fn new(n: usize, scale: f64) -> Self {
        let (s, d) = chebyshev(n);
        let g: Vec<f64> = s
            .iter()
            .map(|&v| (1.0 - v * v).max(0.0).powf(1.5) / scale)
            .collect();
        let gd = DMatrix::from_fn(n + 1, n + 1, |i, j| g[i] * d[(i, j)]);
        let full = &gd * &gd;
        let second = full.view((1, 1), (n - 1, n - 1)).into_owned();
        let y = s[1..n]
            .iter()
            .map(|&v| scale * v / (1.0 - v * v).sqrt())
            .collect();
        MappedGrid { y, second, scale }
    }
}

/// All eigenvalues of a complex matrix.
pub fn eigenvalues(m: DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    m.schur().eigenvalues().map(|v| v.iter().copied().collect())
}
