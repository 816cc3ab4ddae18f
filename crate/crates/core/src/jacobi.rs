//! Recurrence coefficients `z P_n = p_n P_{n-1} + q_n P_n + p_{n+1} P_{n+1}`,
//! `P_0 = 1/p_0`, from a discretized spectral measure by Lanczos with full
//! reorthogonalization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{tau_transform_measure, SpectralMeasure, StieltjesFunction};
use crate::quadrature::dot2;

/// Residual below which a discretization is accepted.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

/// `p_0..p_N` and `q_0..q_{N-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiCoefficients {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl JacobiCoefficients {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if q.is_empty() || p.len() != q.len() + 1 {
            return Err(Error::InvalidArgument(format!("{} p and {} q coefficients", p.len(), q.len())));
        }
        if let Some(v) = p.iter().chain(&q).find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coefficient {v}")));
        }
        if let Some(v) = p.iter().find(|&&v| v <= 0.0) {
            return Err(Error::InvalidArgument(format!("nonpositive p coefficient {v}")));
        }
        Ok(Self { p, q })
    }

    /// Number `N` of `q` coefficients.
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// First `n` levels: `p_0..p_n`, `q_0..q_{n-1}`.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self { p: self.p[..=n].to_vec(), q: self.q[..n].to_vec() }
    }

    /// CSV with header `n,p_n,q_n`; the last row has an empty `q_N`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,p_n,q_n\n");
        for (n, p) in self.p.iter().enumerate() {
            match self.q.get(n) {
                Some(q) => s.push_str(&format!("{n},{p:e},{q:e}\n")),
                None => s.push_str(&format!("{n},{p:e},\n")),
            }
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut p = Vec::new();
        let mut q = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with('n')) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() < 2 {
                return Err(Error::InvalidArgument(format!("line {}: expected n,p_n,q_n", i + 1)));
            }
            let n: usize = cols[0].parse().map_err(|_| Error::InvalidArgument(format!("line {}: bad index", i + 1)))?;
            if n != p.len() {
                return Err(Error::InvalidArgument(format!("line {}: index {n} out of sequence", i + 1)));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("line {}: bad number {s}", i + 1)));
            p.push(parse(cols[1])?);
            if let Some(c) = cols.get(2).filter(|c| !c.is_empty()) {
                q.push(parse(c)?);
            }
        }
        Self::new(p, q)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: JacobiCoefficients =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("coefficient json: {e}")))?;
        Self::new(c.p, c.q)
    }
}

/// Nodes and positive weights of a discrete approximation to a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscretizedMeasure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * x.powi(k)).sum()
    }
}

/// Midpoint rule in `theta` on each band plus the point masses as exact nodes.
pub fn discretize(measure: &SpectralMeasure, nodes_per_band: usize) -> Result<DiscretizedMeasure> {
    if nodes_per_band < 8 {
        return Err(Error::InvalidArgument(format!("{nodes_per_band} nodes per band, need at least 8")));
    }
    let mut pairs: Vec<(f64, f64)> = measure.ac_nodes(nodes_per_band).into_iter().filter(|&(_, w)| w > 0.0).collect();
    pairs.extend_from_slice(measure.masses());
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(DiscretizedMeasure {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Lanczos options.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LanczosOptions {
    /// Use compensated inner products.
    pub compensated: bool,
}

pub fn recurrence_coefficients(d: &DiscretizedMeasure, n: usize) -> Result<JacobiCoefficients> {
    lanczos(d, n, LanczosOptions::default())
}

/// Lanczos on `diag(nodes)` started from `sqrt(weights)`, with two passes of
/// classical Gram-Schmidt against all previous vectors.
pub fn lanczos(d: &DiscretizedMeasure, n: usize, opts: LanczosOptions) -> Result<JacobiCoefficients> {
    let m = d.len();
    if n < 1 || n >= m {
        return Err(Error::InvalidArgument(format!("N = {n} needs 1 <= N < node count {m}")));
    }
    let dot = |a: &[f64], b: &[f64]| if opts.compensated { dot2(a, b) } else { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let scale = d.nodes.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let p0 = d.total().sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    basis.push(d.weights.iter().map(|w| w.sqrt() / p0).collect());
    let mut p = vec![p0];
    let mut q = Vec::with_capacity(n);
    let mut u = vec![0.0; m];
    for k in 0..n {
        let v = &basis[k];
        for i in 0..m {
            u[i] = d.nodes[i] * v[i];
        }
        if k > 0 {
            let b = p[k];
            let prev = &basis[k - 1];
            for i in 0..m {
                u[i] -= b * prev[i];
            }
        }
        let alpha = dot(&u, v);
        for i in 0..m {
            u[i] -= alpha * v[i];
        }
        for _ in 0..2 {
            for w in basis.iter() {
                let c = dot(&u, w);
                for i in 0..m {
                    u[i] -= c * w[i];
                }
            }
        }
        let beta = dot(&u, &u).sqrt();
        q.push(alpha);
        if !(beta > 1e-13 * scale) {
            return Err(Error::RankExhausted { index: k + 1 });
        }
        p.push(beta);
        basis.push(u.iter().map(|x| x / beta).collect());
    }
    Ok(JacobiCoefficients { p, q })
}

/// Coefficients with the discretization level that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRun {
    pub coefficients: JacobiCoefficients,
    pub nodes_per_band: usize,
    /// Orthonormality residual on the next finer discretization; for measures
    /// with point masses, the largest coefficient change to that level instead.
    pub residual: f64,
    pub compensated: bool,
}

/// Starts at `8N` nodes in total and doubles up to `64N` until the coefficients
/// stay orthonormal under the next finer discretization; then falls back to
/// compensated inner products at the cap.
///
/// Polynomials evaluated at a point mass off `E` by the forward recurrence pick
/// up the growing solution, so with point masses the acceptance test compares
/// coefficients between levels.
pub fn recurrence_auto(measure: &SpectralMeasure, n: usize) -> Result<CoefficientRun> {
    let Some(set) = measure.bands() else {
        let d = discretize(measure, 8)?;
        let c = recurrence_coefficients(&d, n)?;
        let residual = orthonormality_residual(&d, &c, n);
        return Ok(CoefficientRun { coefficients: c, nodes_per_band: 0, residual, compensated: false });
    };
    let check = |c: &JacobiCoefficients, per: usize| -> Result<f64> {
        let fine = discretize(measure, 2 * per)?;
        if measure.masses().is_empty() {
            Ok(orthonormality_residual(&fine, c, n))
        } else {
            Ok(coefficient_change(c, &recurrence_coefficients(&fine, n)?, &fine))
        }
    };
    let bands = set.num_bands();
    let mut per = (8 * n).div_ceil(bands).max(16);
    let cap = (64 * n).div_ceil(bands).max(16);
    let mut last;
    loop {
        let d = discretize(measure, per)?;
        let c = recurrence_coefficients(&d, n)?;
        let residual = check(&c, per)?;
        if residual < ORTHONORMALITY_TOL {
            return Ok(CoefficientRun { coefficients: c, nodes_per_band: per, residual, compensated: false });
        }
        last = Some((c, residual));
        if 2 * per > cap {
            break;
        }
        per *= 2;
    }
    let d = discretize(measure, per)?;
    let c = lanczos(&d, n, LanczosOptions { compensated: true })?;
    let residual = check(&c, per)?;
    let (c0, r0) = last.unwrap();
    if residual < r0 {
        Ok(CoefficientRun { coefficients: c, nodes_per_band: per, residual, compensated: true })
    } else {
        Ok(CoefficientRun { coefficients: c0, nodes_per_band: per, residual: r0, compensated: false })
    }
}

/// `max |a_k - b_k|` over all coefficients, relative to the node range.
fn coefficient_change(a: &JacobiCoefficients, b: &JacobiCoefficients, d: &DiscretizedMeasure) -> f64 {
    let scale = d.nodes.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let dp = a.p.iter().zip(&b.p).map(|(x, y)| (x - y).abs());
    let dq = a.q.iter().zip(&b.q).map(|(x, y)| (x - y).abs());
    dp.chain(dq).fold(0.0, f64::max) / scale
}

/// `P_0(z)..P_n(z)` by the forward recurrence (`n <= N`).
pub fn eval_polys(c: &JacobiCoefficients, z: Complex64, n: usize) -> Vec<Complex64> {
    let n = n.min(c.len());
    let mut out = Vec::with_capacity(n + 1);
    out.push(Complex64::new(1.0 / c.p[0], 0.0));
    for k in 0..n {
        let prev = if k > 0 { out[k - 1] * c.p[k] } else { Complex64::new(0.0, 0.0) };
        let next = ((z - c.q[k]) * out[k] - prev) / c.p[k + 1];
        out.push(next);
    }
    out
}

/// Real-argument version of [`eval_polys`].
pub fn eval_polys_real(c: &JacobiCoefficients, x: f64, n: usize) -> Vec<f64> {
    let n = n.min(c.len());
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0 / c.p[0]);
    for k in 0..n {
        let prev = if k > 0 { out[k - 1] * c.p[k] } else { 0.0 };
        out.push(((x - c.q[k]) * out[k] - prev) / c.p[k + 1]);
    }
    out
}

/// `h_k = int P_k(x) / (z - x) d sigma(x)` for `k = 0..n`, from
/// `h_0 = (1 - r(z)) / p_0` and ratios `h_k / h_{k-1}` taken from the backward
/// continued fraction over all available coefficients.
pub fn second_kind_eval(r: &StieltjesFunction, c: &JacobiCoefficients, z: Complex64, n: usize) -> Result<Vec<Complex64>> {
    let rz = r.eval(z)?;
    let big = c.len();
    if n + 1 > big {
        return Err(Error::InsufficientLength { needed: n + 2, available: big });
    }
    let mut ratio = vec![Complex64::new(0.0, 0.0); big + 1];
    for k in (1..big).rev() {
        let tail = if k + 1 < big { c.p[k + 1] * ratio[k + 1] } else { Complex64::new(0.0, 0.0) };
        ratio[k] = c.p[k] / ((z - c.q[k]) - tail);
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push((r.constant - rz) / c.p[0]);
    for k in 1..=n {
        out.push(out[k - 1] * ratio[k]);
    }
    Ok(out)
}

/// Rank-one update `q_0 -> q_0 + p_0^2 / c` for `r = c + S`.
pub fn tau_transform_jacobi_with(c: &JacobiCoefficients, constant: f64) -> JacobiCoefficients {
    let mut out = c.clone();
    out.q[0] += c.p[0] * c.p[0] / constant;
    out
}

/// `q_0 -> q_0 + p_0^2`, all other entries unchanged.
pub fn tau_transform_jacobi(c: &JacobiCoefficients) -> JacobiCoefficients {
    tau_transform_jacobi_with(c, 1.0)
}

/// `max |<P_n, P_m> - delta_nm|` over `0 <= n, m <= N`.
pub fn orthonormality_residual(d: &DiscretizedMeasure, c: &JacobiCoefficients, n: usize) -> f64 {
    let n = n.min(c.len());
    let vals: Vec<Vec<f64>> = d.nodes.iter().map(|&x| eval_polys_real(c, x, n)).collect();
    gram_residual(&vals, &d.weights, n)
}

fn gram_residual(vals: &[Vec<f64>], weights: &[f64], n: usize) -> f64 {
    let mut gram = vec![0.0; (n + 1) * (n + 1)];
    for (v, &w) in vals.iter().zip(weights) {
        for a in 0..=n {
            let wa = w * v[a];
            for b in a..=n {
                gram[a * (n + 1) + b] += wa * v[b];
            }
        }
    }
    let mut worst = 0.0f64;
    for a in 0..=n {
        for b in a..=n {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((gram[a * (n + 1) + b] - target).abs());
        }
    }
    worst
}

/// `D_k(x, y) = (P_k(x) - P_k(y)) / (x - y)` for `k = 0..n`.
fn divided_differences(c: &JacobiCoefficients, y: Complex64, px: &[Complex64], n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut d = Vec::with_capacity(n + 1);
    d.push(zero);
    for k in 0..n {
        let prev = if k > 0 { d[k - 1] * c.p[k] } else { zero };
        d.push((px[k] + (y - c.q[k]) * d[k] - prev) / c.p[k + 1]);
    }
    d
}

/// `P(y) - int (P(x) - P(y)) / (x - y) d sigma(x)` for `P = P_0..P_n`, with
/// `sigma` given by a discretization exact for the degrees involved.
fn mapped_polys(c: &JacobiCoefficients, d: &DiscretizedMeasure, y: Complex64, n: usize, sign: f64) -> Vec<Complex64> {
    let py = eval_polys(c, y, n);
    let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
    for (&x, &w) in d.nodes.iter().zip(&d.weights) {
        let xc = Complex64::new(x, 0.0);
        let px = eval_polys(c, xc, n);
        let dd = divided_differences(c, y, &px, n);
        for k in 0..=n {
            acc[k] += dd[k] * w;
        }
    }
    py.iter().zip(&acc).map(|(p, a)| p - a * sign).collect()
}

/// Unitarity diagnostics of the polynomial tau-map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauPolysReport {
    /// `max |<P_n^tau, P_m^tau>_{sigma_tau} - delta_nm|`.
    pub gram_residual: f64,
    /// Largest error of the inverse map at the sample points, relative to `max(1, |P_n|)`.
    pub inverse_error: f64,
    /// Largest gap between the mapped polynomials and those of the rank-one
    /// updated matrix, relative like `inverse_error`.
    pub rank_one_error: f64,
}

/// Maps `P_0..P_N` with `P -> P - int (P(x) - P(z))/(x - z) d sigma` and checks
/// orthonormality under `sigma_tau` and the inverse map at sample points.
pub fn tau_transform_polys(
    r: &StieltjesFunction,
    c: &JacobiCoefficients,
    n: usize,
    samples: &[Complex64],
) -> Result<TauPolysReport> {
    let n = n.min(c.len());
    let tau = tau_transform_measure(r)?;
    let per = (16 * (n + 8)).max(64);
    let d = discretize(&r.measure, per)?;
    let d_tau = discretize(tau.measure(), per)?;
    let vals: Vec<Vec<f64>> = d_tau
        .nodes
        .iter()
        .map(|&y| mapped_polys(c, &d, Complex64::new(y, 0.0), n, 1.0).iter().map(|v| v.re).collect())
        .collect();
    let gram_residual = gram_residual(&vals, &d_tau.weights, n);

    let c_tau = tau_transform_jacobi_with(c, r.constant);
    let mut inverse_error = 0.0f64;
    let mut rank_one_error = 0.0f64;
    for &z in samples {
        let forward = mapped_polys(c, &d, z, n, 1.0);
        let direct = eval_polys(&c_tau, z, n);
        for (a, b) in forward.iter().zip(&direct) {
            rank_one_error = rank_one_error.max((a - b).norm() / b.norm().max(1.0));
        }
        // P = P_tau + int (P_tau(x) - P_tau(z)) / (x - z) d sigma_tau
        let back = mapped_polys(&c_tau, &d_tau, z, n, -1.0);
        let orig = eval_polys(c, z, n);
        for (a, b) in back.iter().zip(&orig) {
            inverse_error = inverse_error.max((a - b).norm() / b.norm().max(1.0));
        }
    }
    Ok(TauPolysReport { gram_residual, inverse_error, rank_one_error })
}
