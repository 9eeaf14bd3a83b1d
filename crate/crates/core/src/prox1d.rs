//! Exact proximity operators of total variation and Laplacian penalties on a
//! chain `x(0) - x(1) - ... - x(n-1)`.
//!
//! * [`tv_prox_path`]: `argmin ½‖x − y‖² + α Σ w_k |x(k+1) − x(k)|` by the
//!   taut-string method.
//! * [`laplacian_prox_path`]: `argmin ½‖x − y‖² + λ Σ w_k (x(k+1) − x(k))²`,
//!   i.e. the tridiagonal system `(I + 2λL) x = y`, by the Thomas algorithm.
//! * [`laplacian_prox_dct`]: the unweighted Laplacian prox through the
//!   cosine eigenbasis of the path Laplacian.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

fn check_inputs(y: &[f64], scale: f64, weights: Option<&[f64]>) -> Result<()> {
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    if scale < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "negative prox scale {scale}"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if let Some(w) = weights {
        let edges = y.len().saturating_sub(1);
        if w.len() != edges {
            return Err(Error::DimensionMismatch {
                expected: edges,
                actual: w.len(),
            });
        }
        if w.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(
                "path weights must be positive".into(),
            ));
        }
    }
    Ok(())
}

type Knot = (usize, f64);

fn slope(a: Knot, b: Knot) -> f64 {
    (b.1 - a.1) / (b.0 - a.0) as f64
}

/// Shortest path through the tube around the cumulative sums of `y`.
///
/// Knot `t` carries the cumulative sum of the first `t` outputs. The path
/// is pinned at `(0, 0)` and `(n, Σy)`; between them, knot `k + 1` must lie
/// within a given half-width of the partial sum of the input. The output at index `i`
/// is the slope of the path over `[i, i + 1]`.
struct TautString {
    upper: VecDeque<Knot>,
    lower: VecDeque<Knot>,
    out: Vec<f64>,
}

impl TautString {
    fn new(n: usize) -> Self {
        let origin = (0, 0.0);
        Self {
            upper: VecDeque::from([origin]),
            lower: VecDeque::from([origin]),
            out: vec![0.0; n],
        }
    }

    fn emit(&mut self, from: Knot, to: Knot) {
        let s = slope(from, to);
        self.out[from.0..to.0].fill(s);
    }

    fn push_upper(&mut self, p: Knot) {
        let mut moved = false;
        while self.lower.len() >= 2
            && slope(self.lower[0], self.lower[1]) >= slope(self.lower[0], p)
        {
            let (a, b) = (self.lower[0], self.lower[1]);
            self.emit(a, b);
            self.lower.pop_front();
            moved = true;
        }
        if moved {
            self.upper.clear();
            self.upper.push_back(self.lower[0]);
        } else {
            while self.upper.len() >= 2 {
                let k = self.upper.len();
                let (a, b) = (self.upper[k - 2], self.upper[k - 1]);
                if slope(a, p) <= slope(a, b) {
                    self.upper.pop_back();
                } else {
                    break;
                }
            }
        }
        self.upper.push_back(p);
    }

    fn push_lower(&mut self, q: Knot) {
        let mut moved = false;
        while self.upper.len() >= 2
            && slope(self.upper[0], self.upper[1]) <= slope(self.upper[0], q)
        {
            let (a, b) = (self.upper[0], self.upper[1]);
            self.emit(a, b);
            self.upper.pop_front();
            moved = true;
        }
        if moved {
            self.lower.clear();
            self.lower.push_back(self.upper[0]);
        } else {
            while self.lower.len() >= 2 {
                let k = self.lower.len();
                let (a, b) = (self.lower[k - 2], self.lower[k - 1]);
                if slope(a, q) >= slope(a, b) {
                    self.lower.pop_back();
                } else {
                    break;
                }
            }
        }
        self.lower.push_back(q);
    }

    fn finish(mut self) -> Vec<f64> {
        let chain: Vec<Knot> = self.lower.iter().copied().collect();
        for pair in chain.windows(2) {
            if pair[1].0 > pair[0].0 {
                self.emit(pair[0], pair[1]);
            }
        }
        self.out
    }
}

/// Proximity operator of weighted total variation along a chain:
/// `argmin_x ½‖x − y‖² + alpha Σ_k w_k |x(k+1) − x(k)|`, with `w_k = 1`
/// when `weights` is `None`. Linear time.
pub fn tv_prox_path(y: &[f64], alpha: f64, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    check_inputs(y, alpha, weights)?;
    let n = y.len();
    if n <= 1 || alpha == 0.0 {
        return Ok(y.to_vec());
    }
    let mut string = TautString::new(n);
    let mut partial = 0.0;
    for k in 0..n - 1 {
        partial += y[k];
        let width = alpha * weights.map_or(1.0, |w| w[k]);
        string.push_upper((k + 1, partial + width));
        string.push_lower((k + 1, partial - width));
    }
    partial += y[n - 1];
    let end = (n, partial);
    string.push_upper(end);
    string.push_lower(end);
    Ok(string.finish())
}

/// Proximity operator of the (weighted) Laplacian penalty along a chain:
/// solves `(I + 2 lambda L_w) x = y` where `L_w` is the weighted path
/// Laplacian. The matrix is strictly diagonally dominant, so the forward
/// sweep needs no pivoting.
pub fn laplacian_prox_path(y: &[f64], lambda: f64, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    check_inputs(y, lambda, weights)?;
    let n = y.len();
    if n <= 1 || lambda == 0.0 {
        return Ok(y.to_vec());
    }
    let off = |k: usize| 2.0 * lambda * weights.map_or(1.0, |w| w[k]);
    // forward sweep: sub[i] = -off(i-1), diag[i] = 1 + off(i-1) + off(i), sup[i] = -off(i)
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut prev = 0.0;
    for i in 0..n {
        let next = if i + 1 < n { off(i) } else { 0.0 };
        let diag = 1.0 + prev + next;
        let (pivot, r) = if i == 0 {
            (diag, y[0])
        } else {
            (diag + prev * sup[i - 1], y[i] + prev * rhs[i - 1])
        };
        sup[i] = -next / pivot;
        rhs[i] = r / pivot;
        prev = next;
    }
    let mut x = rhs;
    for i in (0..n - 1).rev() {
        x[i] -= sup[i] * x[i + 1];
    }
    Ok(x)
}

/// Eigenvalues `1 + 4 lambda (1 − cos(pi k / n))`, `k = 0..n`, of
/// `I + 2 lambda L` for the unweighted path on `n` nodes.
pub fn path_prox_eigenvalues(n: usize, lambda: f64) -> Vec<f64> {
    (0..n)
        .map(|k| 1.0 + 4.0 * lambda * (1.0 - (PI * k as f64 / n as f64).cos()))
        .collect()
}

/// Orthonormal DCT-II, `X_k = s_k Σ_j x_j cos(pi k (j + ½) / n)`, through
/// one complex FFT of the even/odd reordered input.
pub fn dct2_orthonormal(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut v = vec![Complex::new(0.0, 0.0); n];
    for k in 0..n.div_ceil(2) {
        v[k] = Complex::new(x[2 * k], 0.0);
    }
    for k in 0..n / 2 {
        v[n - 1 - k] = Complex::new(x[2 * k + 1], 0.0);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut v);
    let (s0, s) = ((1.0 / n as f64).sqrt(), (2.0 / n as f64).sqrt());
    (0..n)
        .map(|k| {
            let angle = -PI * k as f64 / (2.0 * n as f64);
            let raw = (Complex::from_polar(1.0, angle) * v[k]).re;
            raw * if k == 0 { s0 } else { s }
        })
        .collect()
}

/// Inverse of [`dct2_orthonormal`] (orthonormal DCT-III).
pub fn dct3_orthonormal(coef: &[f64]) -> Vec<f64> {
    let n = coef.len();
    if n == 0 {
        return Vec::new();
    }
    let (s0, s) = ((1.0 / n as f64).sqrt(), (2.0 / n as f64).sqrt());
    // unnormalized DCT-II coefficients
    let raw: Vec<f64> = coef
        .iter()
        .enumerate()
        .map(|(k, c)| c / if k == 0 { s0 } else { s })
        .collect();
    let mut v: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let mirrored = if k == 0 { 0.0 } else { raw[n - k] };
            let angle = PI * k as f64 / (2.0 * n as f64);
            Complex::from_polar(1.0, angle) * Complex::new(raw[k], -mirrored)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut v);
    let mut x = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        x[2 * k] = v[k].re / n as f64;
    }
    for k in 0..n / 2 {
        x[2 * k + 1] = v[n - 1 - k].re / n as f64;
    }
    x
}

/// Unweighted Laplacian prox as `C^T Λ^{-1} C y`, with `C` the orthonormal
/// DCT-II that diagonalizes the path Laplacian. `O(n log n)`.
pub fn laplacian_prox_dct(y: &[f64], lambda: f64, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    if weights.is_some() {
        return Err(Error::Unsupported(
            "the cosine-basis Laplacian prox is unweighted only",
        ));
    }
    check_inputs(y, lambda, None)?;
    let n = y.len();
    if n <= 1 || lambda == 0.0 {
        return Ok(y.to_vec());
    }
    let mut coef = dct2_orthonormal(y);
    for (c, ev) in coef.iter_mut().zip(path_prox_eigenvalues(n, lambda)) {
        *c /= ev;
    }
    Ok(dct3_orthonormal(&coef))
}
