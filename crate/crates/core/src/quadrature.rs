//! Quadrature rules used throughout the crate.
//!
//! Every integral over a band or a gap is taken after the substitution
//! `t = mid + half * cos(theta)`, which turns the inverse square-root endpoint
//! behaviour of equilibrium-type densities into a smooth periodic integrand.
//! Path integrals with a square-root endpoint use `t = e + (z - e) s^2` and a
//! geometrically graded composite Gauss–Legendre rule.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Midpoint rule in `theta` on `[0, pi]`: nodes `(k + 1/2) pi / n`, weights `pi / n`.
///
/// After `x = mid + half cos(theta)` this is Gauss–Chebyshev of the first kind,
/// exact for trigonometric polynomials of degree below `2n`.
pub fn cos_midpoint(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let w = PI / n as f64;
    (0..n).map(move |k| ((k as f64 + 0.5) * w, w))
}

/// `int_a^b f(t) / sqrt((t - a)(b - t)) dt`, integrated in `theta` with Gauss–Legendre.
pub fn chebyshev_integral<F: FnMut(f64, f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, mut f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    rule.integrate(0.0, PI, |theta| f(mid + half * theta.cos(), theta))
}

/// Composite Gauss–Legendre on `[0, 1]` with panels graded geometrically toward both ends.
#[derive(Debug, Clone)]
pub struct GradedRule {
    points: Vec<(f64, f64)>,
}

impl GradedRule {
    pub fn new(per_panel: usize, levels: u32) -> Self {
        let gl = GaussLegendre::new(per_panel);
        // 0, 2^-levels, ..., 1/2, then mirrored onto (1/2, 1]
        let mut left: Vec<f64> = vec![0.0];
        for k in (1..=levels).rev() {
            left.push(0.5f64.powi(k as i32));
        }
        let mut all = left.clone();
        for &b in left.iter().rev().skip(1) {
            all.push(1.0 - b);
        }
        let mut points = Vec::with_capacity((all.len() - 1) * per_panel);
        for w in all.windows(2) {
            points.extend(gl.mapped(w[0], w[1]));
        }
        Self { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.points.iter().map(|&(s, w)| f(s) * w).sum()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().map(|&(s, w)| f(s) * w).sum()
    }
}

impl Default for GradedRule {
    fn default() -> Self {
        Self::new(12, 34)
    }
}

/// Compensated dot product (Ogita–Rump–Oishi `Dot2`).
pub fn dot2(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (p, pe) = two_product(x, y);
        let (t, te) = two_sum(s, p);
        s = t;
        c += pe + te;
    }
    s + c
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(10);
        assert_abs_diff_eq!(rule.weights().iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        // degree 19 is the exactness limit
        let v = rule.integrate(-1.0, 1.0, |x| x.powi(18));
        assert_abs_diff_eq!(v, 2.0 / 19.0, epsilon = 1e-14);
        let v = rule.integrate(0.0, 2.0, |x| x.exp());
        assert_abs_diff_eq!(v, 2f64.exp() - 1.0, epsilon = 1e-13);
    }

    #[test]
    fn large_rule_is_accurate() {
        let rule = GaussLegendre::new(512);
        let v = rule.integrate(0.0, PI, |t| t.sin());
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn chebyshev_integral_matches_arcsine_moments() {
        let rule = GaussLegendre::new(32);
        // int_{-2}^{2} x^2 / sqrt(4 - x^2) dx = 2 pi
        let v = chebyshev_integral(&rule, -2.0, 2.0, |x, _| x * x);
        assert_abs_diff_eq!(v, 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn graded_rule_handles_log_endpoint() {
        let rule = GradedRule::default();
        let v = rule.integrate(|s| s.ln());
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-12);
        let v = rule.integrate(|s| 1.0 / (1.0 - s).sqrt());
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn dot2_recovers_cancelled_sum() {
        let a = [1e16, 1.0, -1e16];
        let b = [1.0, 1.0, 1.0];
        assert_eq!(dot2(&a, &b), 1.0);
    }
}
