//! Equilibrium problem, capacity and Green's functions of `C \ E` for a
//! finite-gap set `E`.
//!
//! All work happens in the normalized variable `t = (x - mid) / half`, which maps
//! the bounding interval onto `[-1, 1]`. With `R(t) = prod (t - e_i)` over the
//! `2g + 2` band endpoints the equilibrium measure is
//! `|q(t)| / (pi sqrt|R(t)|) dt`, where `q` is monic of degree `g` and has zero
//! integral against `1 / sqrt|R|` over every gap. `q` is stored in the Chebyshev
//! basis. The square root of `R` is the product of principal square roots of the
//! factors, which is analytic off `E`, positive on `(a0, inf)` and gives the
//! upper boundary value on `E`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::{IntervalSet, Location};
use crate::quadrature::{GaussLegendre, GradedRule};

/// Default and maximal quadrature orders of the automatic solve.
pub const DEFAULT_ORDER: usize = 128;
pub const MAX_ORDER: usize = 1024;
/// Capacity change that stops order doubling.
pub const CAPACITY_TOL: f64 = 1e-10;

/// Solved equilibrium problem of an [`IntervalSet`].
#[derive(Debug, Clone)]
pub struct EquilibriumData {
    set: IntervalSet,
    center: f64,
    half: f64,
    ends: Vec<f64>,
    q_cheb: Vec<f64>,
    gap_zeros: Vec<f64>,
    capacity: f64,
    band_measures: Vec<f64>,
    quadrature_order: usize,
    rule: GaussLegendre,
    graded: GradedRule,
}

/// The exported part of [`EquilibriumData`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSummary {
    pub capacity: f64,
    pub gap_zeros: Vec<f64>,
    pub band_measures: Vec<f64>,
}

/// Solves the equilibrium problem at a fixed quadrature order (`order >= 16`).
pub fn equilibrium(set: &IntervalSet, order: usize) -> Result<EquilibriumData> {
    if order < 16 {
        return Err(Error::InvalidArgument(format!("quadrature order {order} below 16")));
    }
    EquilibriumData::solve(set, order)
}

/// Solves with order doubling from 128 until the capacity settles (max 1024).
pub fn equilibrium_auto(set: &IntervalSet) -> Result<EquilibriumData> {
    let mut eq = EquilibriumData::solve(set, DEFAULT_ORDER)?;
    while eq.quadrature_order < MAX_ORDER {
        let next = EquilibriumData::solve(set, 2 * eq.quadrature_order)?;
        let settled = (next.capacity - eq.capacity).abs() < CAPACITY_TOL;
        eq = next;
        if settled {
            break;
        }
    }
    Ok(eq)
}

impl EquilibriumData {
    fn solve(set: &IntervalSet, order: usize) -> Result<Self> {
        let center = set.midpoint();
        let half = 0.5 * set.diam();
        let mut ends: Vec<f64> = set.endpoints().iter().map(|x| (x - center) / half).collect();
        let last = ends.len() - 1;
        ends[0] = -1.0;
        ends[last] = 1.0;
        let g = set.num_gaps();
        let rule = GaussLegendre::new(order);

        let q_cheb = if g == 0 {
            vec![1.0]
        } else {
            let lead = 2f64.powi(1 - g as i32);
            let mut a = DMatrix::<f64>::zeros(g, g);
            let mut rhs = DVector::<f64>::zeros(g);
            let mut tvals = vec![0.0; g + 1];
            for k in 0..g {
                let (l, r) = (2 * k + 1, 2 * k + 2);
                let (mid, hw) = (0.5 * (ends[l] + ends[r]), 0.5 * (ends[r] - ends[l]));
                for (theta, w) in rule.mapped(0.0, PI) {
                    let t = mid + hw * theta.cos();
                    let scale = w / other_abs_sqrt(&ends, t, l, r);
                    chebyshev_values_into(t, &mut tvals);
                    for m in 0..g {
                        a[(k, m)] += scale * tvals[m];
                    }
                    rhs[k] -= scale * lead * tvals[g];
                }
            }
            let lu = a.lu();
            let sol = lu
                .solve(&rhs)
                .filter(|s| s.iter().all(|v| v.is_finite()))
                .ok_or_else(|| Error::DegenerateGeometry("singular gap-period system".into()))?;
            let mut c: Vec<f64> = sol.iter().copied().collect();
            c.push(lead);
            c
        };

        let mut eq = Self {
            set: set.clone(),
            center,
            half,
            ends,
            q_cheb,
            gap_zeros: Vec::new(),
            capacity: 0.0,
            band_measures: Vec::new(),
            quadrature_order: order,
            rule,
            graded: GradedRule::default(),
        };
        eq.gap_zeros = eq.find_gap_zeros()?;
        eq.band_measures = (0..=g)
            .map(|b| {
                let (l, r) = (2 * b, 2 * b + 1);
                let (mid, hw) = (0.5 * (eq.ends[l] + eq.ends[r]), 0.5 * (eq.ends[r] - eq.ends[l]));
                eq.rule.integrate(0.0, PI, |theta| {
                    let t = mid + hw * theta.cos();
                    eq.q(t).abs() / other_abs_sqrt(&eq.ends, t, l, r)
                }) / PI
            })
            .collect();
        if eq.band_measures.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::DegenerateGeometry("nonpositive band harmonic measure".into()));
        }
        eq.capacity = half * eq.log_capacity_normalized().exp();
        Ok(eq)
    }

    fn find_gap_zeros(&self) -> Result<Vec<f64>> {
        let g = self.set.num_gaps();
        let mut zeros = Vec::with_capacity(g);
        for k in 0..g {
            let (mut lo, mut hi) = (self.ends[2 * k + 1], self.ends[2 * k + 2]);
            let flo = self.q(lo);
            if flo * self.q(hi) >= 0.0 {
                return Err(Error::DegenerateGeometry(format!("no sign change of q in gap {}", k + 1)));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (self.q(mid) < 0.0) == (flo < 0.0) { lo = mid } else { hi = mid }
            }
            zeros.push(self.center + self.half * 0.5 * (lo + hi));
        }
        Ok(zeros)
    }

    /// `log cap` in normalized coordinates:
    /// `-int_1^inf (q/sqrt R - 1/t) dt` after `t = 1 + tan^2 phi`.
    fn log_capacity_normalized(&self) -> f64 {
        let last = self.ends.len() - 1;
        -self.rule.integrate(0.0, FRAC_PI_2, |phi| {
            let (s, c) = phi.sin_cos();
            let t = 1.0 + (s / c).powi(2);
            let re = other_abs_sqrt_one(&self.ends, t, last);
            2.0 / (c * c) * (self.q(t) / re - s * c)
        })
    }

    /// The monic numerator `q` in normalized coordinates.
    fn q(&self, t: f64) -> f64 {
        clenshaw(&self.q_cheb, t)
    }

    fn q_complex(&self, t: Complex64) -> Complex64 {
        clenshaw_complex(&self.q_cheb, t)
    }

    fn sqrt_r(&self, t: Complex64) -> Complex64 {
        self.ends.iter().map(|&e| (t - e).sqrt()).product()
    }

    fn to_t(&self, x: f64) -> f64 {
        (x - self.center) / self.half
    }

    fn to_tc(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.half
    }

    pub fn set(&self) -> &IntervalSet {
        &self.set
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn gap_zeros(&self) -> &[f64] {
        &self.gap_zeros
    }

    pub fn band_measures(&self) -> &[f64] {
        &self.band_measures
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_order
    }

    pub fn summary(&self) -> EquilibriumSummary {
        EquilibriumSummary {
            capacity: self.capacity,
            gap_zeros: self.gap_zeros.clone(),
            band_measures: self.band_measures.clone(),
        }
    }

    /// Monic density numerator in original coordinates, `prod (x - c_k)`.
    pub fn numerator(&self, x: f64) -> f64 {
        self.gap_zeros.iter().map(|c| x - c).product()
    }

    /// Equilibrium density `d mu / dx` at a point of `E` (zero off `E`).
    pub fn density(&self, x: f64) -> f64 {
        if !self.set.contains(x) {
            return 0.0;
        }
        let t = self.to_t(x);
        let r: f64 = self.ends.iter().map(|e| (t - e).abs()).product();
        self.q(t).abs() / (PI * r.sqrt() * self.half)
    }

    /// `int f d mu_E`, with panels graded toward the band edges so that
    /// logarithmic endpoint behaviour of `f` is integrated accurately.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let rule = GradedRule::new(16, 20);
        let mut acc = 0.0;
        for b in 0..self.set.num_bands() {
            let (l, r) = (2 * b, 2 * b + 1);
            let (mid, hw) = (0.5 * (self.ends[l] + self.ends[r]), 0.5 * (self.ends[r] - self.ends[l]));
            // d mu = |q| / (pi W) dtheta and dtheta = pi ds
            acc += rule.integrate(|s| {
                let t = mid + hw * (PI * s).cos();
                self.q(t).abs() / other_abs_sqrt(&self.ends, t, l, r) * f(self.center + self.half * t)
            });
        }
        acc
    }

    /// `int d mu(x) / (x - z) = -q(z) / sqrt(R(z))`; upper boundary value for real `z` on `E`.
    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        let t = self.to_tc(z);
        -self.q_complex(t) / self.sqrt_r(t) / self.half
    }

    /// `int log|z - x| d mu(x) - log cap` by direct quadrature. Accurate only
    /// away from `E`; serves as an independent check of [`Self::green`].
    pub fn log_potential(&self, z: Complex64) -> f64 {
        let t = self.to_tc(z);
        let mut acc = 0.0;
        for b in 0..self.set.num_bands() {
            let (l, r) = (2 * b, 2 * b + 1);
            let (mid, hw) = (0.5 * (self.ends[l] + self.ends[r]), 0.5 * (self.ends[r] - self.ends[l]));
            acc += self.rule.integrate(0.0, PI, |theta| {
                let s = mid + hw * theta.cos();
                self.q(s).abs() / other_abs_sqrt(&self.ends, s, l, r) * (t - s).norm().ln()
            }) / PI;
        }
        acc + self.half.ln() - self.capacity.ln()
    }

    /// Green's function `G(z, inf)` of `C \ E`.
    pub fn green(&self, z: Complex64) -> f64 {
        let z = if z.im < 0.0 { z.conj() } else { z };
        let g_real = self.green_real_t(self.to_t(z.re));
        if z.im == 0.0 {
            return g_real;
        }
        let t0 = self.to_t(z.re);
        let y = z.im / self.half;
        let vertical = self.graded.integrate_complex(|s| {
            let tau = Complex64::new(t0, y * s * s);
            self.q_complex(tau) / self.sqrt_r(tau) * Complex64::new(0.0, 2.0 * y * s)
        });
        (g_real + vertical.re).max(0.0)
    }

    pub fn green_real(&self, x: f64) -> f64 {
        self.green_real_t(self.to_t(x))
    }

    fn green_real_t(&self, t: f64) -> f64 {
        let Some(e_idx) = self.nearest_edge(t) else {
            return 0.0;
        };
        let e = self.ends[e_idx];
        let d = t - e;
        let sd = d.abs().sqrt();
        let v = self.graded.integrate(|s| {
            let tau = e + d * s * s;
            2.0 * sd * self.q(tau) / other_abs_sqrt_one(&self.ends, tau, e_idx)
        });
        v.abs()
    }

    /// Index of the band edge nearest to a point off `E` (`None` on `E`).
    fn nearest_edge(&self, t: f64) -> Option<usize> {
        let last = self.ends.len() - 1;
        if t > 1.0 {
            return Some(last);
        }
        if t < -1.0 {
            return Some(0);
        }
        for k in 0..self.set.num_gaps() {
            let (l, r) = (self.ends[2 * k + 1], self.ends[2 * k + 2]);
            if t > l && t < r {
                return Some(if t - l <= r - t { 2 * k + 1 } else { 2 * k + 2 });
            }
        }
        None
    }

    fn on_support(&self, z: Complex64) -> bool {
        z.im == 0.0 && self.set.contains(z.re)
    }

    /// Two-point Green's function `G(z, w)`.
    pub fn green_two_point(&self, z: Complex64, w: Complex64) -> Result<f64> {
        if self.on_support(z) {
            return Err(Error::OnSupport(z.re));
        }
        if self.on_support(w) {
            return Err(Error::OnSupport(w.re));
        }
        if z == w {
            return Err(Error::Singularity(format!("z = w = {z}")));
        }
        let (a, b) = if (z.re, z.im) <= (w.re, w.im) { (z, w) } else { (w, z) };
        let tb = self.to_tc(b);
        let ta = self.to_tc(a);
        let (eval, pole) = if self.clearance(tb, ta) > self.clearance(ta, tb) { (tb, ta) } else { (ta, tb) };
        let kernel = self.third_kind(pole)?;
        Ok(self.eval_third_kind(&kernel, eval))
    }

    /// Distance from the pole (and its conjugate) to the integration path ending at `eval`.
    fn clearance(&self, eval: Complex64, pole: Complex64) -> f64 {
        let (eval, pole) = if eval.im < 0.0 { (eval.conj(), pole.conj()) } else { (eval, pole) };
        let (start, _) = self.real_path(eval.re, pole);
        let mut d = f64::INFINITY;
        for p in [pole, pole.conj()] {
            d = d.min(segment_distance(Complex64::new(start, 0.0), Complex64::new(eval.re, 0.0), p));
            if eval.im > 0.0 {
                d = d.min(segment_distance(Complex64::new(eval.re, 0.0), eval, p));
            }
        }
        d
    }

    /// Starting edge for the real part of a path to `x`; prefers the edge with
    /// the pole not in between. Returns `(edge, index)`; `x` itself on `E`.
    fn real_path(&self, x: f64, pole: Complex64) -> (f64, Option<usize>) {
        let last = self.ends.len() - 1;
        if x > 1.0 {
            return (self.ends[last], Some(last));
        }
        if x < -1.0 {
            return (self.ends[0], Some(0));
        }
        for k in 0..self.set.num_gaps() {
            let (li, ri) = (2 * k + 1, 2 * k + 2);
            let (l, r) = (self.ends[li], self.ends[ri]);
            if x > l && x < r {
                let near_left = x - l <= r - x;
                if pole.im == 0.0 && pole.re > l && pole.re < r {
                    return if pole.re > x { (l, Some(li)) } else { (r, Some(ri)) };
                }
                return if near_left { (l, Some(li)) } else { (r, Some(ri)) };
            }
        }
        (x, None)
    }

    /// Normalizes the third-kind differential with poles at `w` (sheet one)
    /// and at the reflected point: real coefficients of the holomorphic part
    /// are fixed by zero real periods over every gap.
    fn third_kind(&self, w: Complex64) -> Result<ThirdKind> {
        let g = self.set.num_gaps();
        let sqrt_rw = self.sqrt_r(w);
        let real_pole = w.im == 0.0;
        let sqrt_rwc = self.sqrt_r(w.conj());
        let mut coeffs = Vec::new();
        if g > 0 {
            let mut a = DMatrix::<f64>::zeros(g, g);
            let mut rhs = DVector::<f64>::zeros(g);
            let mut tvals = vec![0.0; g];
            for k in 0..g {
                let (li, ri) = (2 * k + 1, 2 * k + 2);
                let (l, r) = (self.ends[li], self.ends[ri]);
                let (mid, hw) = (0.5 * (l + r), 0.5 * (r - l));
                let pole_here = real_pole && w.re > l && w.re < r;
                // 1/sqrt(R) dt = dtheta / W(t) on the segment
                let inv_w = |t: f64| 1.0 / self.segment_factor(t, li, ri);
                let theta_w = if pole_here { ((w.re - mid) / hw).clamp(-1.0, 1.0).acos() } else { 0.0 };
                let inv_w_pole = if pole_here { inv_w(w.re) } else { Complex64::new(0.0, 0.0) };
                for (theta, wt) in self.rule.mapped(0.0, PI) {
                    let c = theta.cos();
                    let t = mid + hw * c;
                    let iw = inv_w(t);
                    chebyshev_values_into(t, &mut tvals);
                    for m in 0..g {
                        a[(k, m)] += wt * (iw * tvals[m]).re;
                    }
                    let b = if pole_here {
                        // principal value via int_0^pi dtheta / (cos theta - cos theta_w) = 0
                        -sqrt_rw * (iw - inv_w_pole) / (hw * (c - theta_w.cos()))
                    } else {
                        self.pole_part(Complex64::new(t, 0.0), w, sqrt_rw, sqrt_rwc) * iw
                    };
                    rhs[k] -= wt * b.re;
                }
            }
            let sol = a
                .lu()
                .solve(&rhs)
                .filter(|s| s.iter().all(|v| v.is_finite()))
                .ok_or_else(|| Error::DegenerateGeometry("singular third-kind normalization".into()))?;
            coeffs = sol.iter().copied().collect();
        }
        Ok(ThirdKind { w, sqrt_rw, sqrt_rwc, coeffs })
    }

    /// `W(t) = sqrt(R(t + i0)) / sqrt((t - e_l)(e_r - t))` for `t` between adjacent endpoints.
    fn segment_factor(&self, t: f64, li: usize, ri: usize) -> Complex64 {
        let tc = Complex64::new(t, 0.0);
        let mut p = Complex64::new(0.0, 1.0);
        for (i, &e) in self.ends.iter().enumerate() {
            if i != li && i != ri {
                p *= (tc - e).sqrt();
            }
        }
        p
    }

    /// `-(1/2) [sqrt R(w) / (t - w) + sqrt R(conj w) / (t - conj w)]`.
    fn pole_part(&self, t: Complex64, w: Complex64, sqrt_rw: Complex64, sqrt_rwc: Complex64) -> Complex64 {
        if w.im == 0.0 {
            -sqrt_rw / (t - w)
        } else {
            -0.5 * (sqrt_rw / (t - w) + sqrt_rwc / (t - w.conj()))
        }
    }

    fn third_kind_numerator(&self, k: &ThirdKind, t: Complex64) -> Complex64 {
        let p = if k.coeffs.is_empty() { Complex64::new(0.0, 0.0) } else { clenshaw_complex(&k.coeffs, t) };
        self.pole_part(t, k.w, k.sqrt_rw, k.sqrt_rwc) + p
    }

    fn eval_third_kind(&self, k: &ThirdKind, z: Complex64) -> f64 {
        // the differential is real-symmetric, so G(conj z, conj w) = G(z, w)
        let flipped;
        let (z, k) = if z.im < 0.0 {
            flipped = ThirdKind { w: k.w.conj(), sqrt_rw: k.sqrt_rwc, sqrt_rwc: k.sqrt_rw, coeffs: k.coeffs.clone() };
            (z.conj(), &flipped)
        } else {
            (z, k)
        };
        let (start, idx) = self.real_path(z.re, k.w);
        let mut total = 0.0;
        if let Some(e_idx) = idx {
            let d = z.re - start;
            let sd = Complex64::new(d, 0.0).sqrt();
            let v = self.graded.integrate_complex(|s| {
                let tau = Complex64::new(start + d * s * s, 0.0);
                let mut others = Complex64::new(1.0, 0.0);
                for (i, &e) in self.ends.iter().enumerate() {
                    if i != e_idx {
                        others *= (tau - e).sqrt();
                    }
                }
                self.third_kind_numerator(k, tau) / others * (2.0 * sd)
            });
            total += v.re;
        }
        if z.im > 0.0 {
            let x = z.re;
            let y = z.im;
            let v = self.graded.integrate_complex(|s| {
                let tau = Complex64::new(x, y * s * s);
                self.third_kind_numerator(k, tau) / self.sqrt_r(tau) * Complex64::new(0.0, 2.0 * y * s)
            });
            total += v.re;
        }
        if k.w.im != 0.0 {
            total -= 0.5 * ((z - k.w).norm() / (z - k.w.conj()).norm()).ln();
        }
        total
    }

    /// Frequencies `omega_j` = harmonic measure of the bands right of gap `j`, mod 1.
    pub fn harmonic_frequencies(&self) -> Vec<f64> {
        let g = self.set.num_gaps();
        (1..=g)
            .map(|j| {
                let w: f64 = self.band_measures[j..].iter().sum();
                w.rem_euclid(1.0)
            })
            .collect()
    }

    /// `sum_l G(x_l)` over real points off `E`.
    pub fn greens_sum(&self, points: &[f64]) -> Result<f64> {
        points
            .iter()
            .map(|&x| {
                if self.set.contains(x) { Err(Error::OnSupport(x)) } else { Ok(self.green_real(x)) }
            })
            .sum()
    }

    /// `sup_l sum_{j != l} G(y_j, y_l)` over pairwise distinct real points off `E`.
    pub fn carleson_sum(&self, points: &[f64]) -> Result<f64> {
        for (i, &x) in points.iter().enumerate() {
            if self.set.contains(x) {
                return Err(Error::OnSupport(x));
            }
            if points[..i].contains(&x) {
                return Err(Error::DuplicatePoint(x));
            }
        }
        let n = points.len();
        let mut table = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.green_two_point(Complex64::new(points[i], 0.0), Complex64::new(points[j], 0.0))?;
                table[i * n + j] = v;
                table[j * n + i] = v;
            }
        }
        Ok((0..n).map(|l| table[l * n..(l + 1) * n].iter().sum::<f64>()).fold(0.0, f64::max))
    }

    pub fn location(&self, x: f64) -> Location {
        self.set.locate(x)
    }
}

#[derive(Debug, Clone)]
struct ThirdKind {
    w: Complex64,
    sqrt_rw: Complex64,
    sqrt_rwc: Complex64,
    coeffs: Vec<f64>,
}

/// Affine image with capacity one, scaled about the midpoint of the set.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCapacity {
    pub set: IntervalSet,
    pub scale: f64,
    pub shift: f64,
}

pub fn rescale_to_unit_capacity(set: &IntervalSet) -> Result<UnitCapacity> {
    let eq = equilibrium_auto(set)?;
    let scale = 1.0 / eq.capacity();
    let shift = set.midpoint() * (1.0 - scale);
    Ok(UnitCapacity { set: set.affine(scale, shift)?, scale, shift })
}

/// `prod_{i not in {l, r}} sqrt|t - e_i|`.
fn other_abs_sqrt(ends: &[f64], t: f64, l: usize, r: usize) -> f64 {
    let mut p = 1.0;
    for (i, &e) in ends.iter().enumerate() {
        if i != l && i != r {
            p *= (t - e).abs();
        }
    }
    p.sqrt()
}

fn other_abs_sqrt_one(ends: &[f64], t: f64, skip: usize) -> f64 {
    let mut p = 1.0;
    for (i, &e) in ends.iter().enumerate() {
        if i != skip {
            p *= (t - e).abs();
        }
    }
    p.sqrt()
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let u = ((p - a) * ab.conj()).re / len2;
    let u = u.clamp(0.0, 1.0);
    (p - (a + ab * u)).norm()
}

/// `T_0(t), ..., T_{n-1}(t)` into `out` (length `n`).
fn chebyshev_values_into(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = t;
    }
    for k in 2..out.len() {
        out[k] = 2.0 * t * out[k - 1] - out[k - 2];
    }
}

pub(crate) fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + t * b1 - b2
}

pub(crate) fn clenshaw_complex(c: &[f64], t: Complex64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let (mut b1, mut b2) = (zero, zero);
    for &ck in c.iter().skip(1).rev() {
        let b0 = t * b1 * 2.0 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn single() -> EquilibriumData {
        equilibrium_auto(&IntervalSet::interval(-2.0, 2.0).unwrap()).unwrap()
    }

    fn two() -> EquilibriumData {
        equilibrium_auto(&IntervalSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap()).unwrap()
    }

    #[test]
    fn single_interval_capacity_and_density() {
        let eq = single();
        assert_abs_diff_eq!(eq.capacity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.density(0.0), 1.0 / (2.0 * PI), epsilon = 1e-14);
        assert_abs_diff_eq!(eq.density(1.0), 1.0 / (PI * 3f64.sqrt()), epsilon = 1e-14);
        assert!(eq.gap_zeros().is_empty());
        assert_eq!(eq.band_measures().len(), 1);
        assert_abs_diff_eq!(eq.band_measures()[0], 1.0, epsilon = 1e-13);
        let unit = equilibrium_auto(&IntervalSet::interval(0.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(unit.capacity(), 0.25, epsilon = 1e-13);
    }

    #[test]
    fn symmetric_two_interval() {
        let eq = two();
        assert_abs_diff_eq!(eq.capacity(), 3f64.sqrt() / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eq.gap_zeros()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.band_measures()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.band_measures()[1], 0.5, epsilon = 1e-12);
        assert_eq!(eq.harmonic_frequencies().len(), 1);
        assert_abs_diff_eq!(eq.harmonic_frequencies()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cantor_generation_one_capacity() {
        let set = IntervalSet::new(vec![(-2.0, -0.5), (0.5, 2.0)]).unwrap();
        let eq = equilibrium_auto(&set).unwrap();
        assert_abs_diff_eq!(eq.capacity(), (4.0f64 - 0.25).sqrt() / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn green_single_interval_closed_form() {
        let eq = single();
        assert_abs_diff_eq!(eq.green_real(3.0), ((3.0 + 5f64.sqrt()) / 2.0).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(eq.green_real(10.0), ((10.0 + 96f64.sqrt()) / 2.0).ln(), epsilon = 1e-12);
        assert_eq!(eq.green_real(0.3), 0.0);
        let z = Complex64::new(0.5, 1.0);
        let s = (z * z - 4.0).sqrt();
        let s = if (z + s).norm() < 2.0 { -s } else { s };
        assert_abs_diff_eq!(eq.green(z), ((z + s) / 2.0).norm().ln(), epsilon = 1e-11);
    }

    #[test]
    fn green_matches_log_potential() {
        let eq = two();
        for z in [Complex64::new(0.0, 0.5), Complex64::new(3.0, 0.0), Complex64::new(-1.5, 0.8), c(0.2)] {
            assert_abs_diff_eq!(eq.green(z), eq.log_potential(z), epsilon = 1e-9);
        }
    }

    #[test]
    fn green_tail() {
        let eq = two();
        let z = Complex64::new(0.0, 1e6);
        assert_abs_diff_eq!(eq.green(z) - 1e6f64.ln(), -eq.capacity().ln(), epsilon = 1e-6);
    }

    #[test]
    fn two_point_single_interval() {
        let eq = single();
        let phi = |x: f64| (x - (x * x - 4.0).sqrt()) / 2.0;
        let oracle = -((phi(3.0) - phi(4.0)) / (1.0 - phi(3.0) * phi(4.0))).abs().ln();
        let v = eq.green_two_point(c(3.0), c(4.0)).unwrap();
        assert_abs_diff_eq!(v, oracle, epsilon = 1e-10);
        assert_eq!(v, eq.green_two_point(c(4.0), c(3.0)).unwrap());
        assert!(eq.green_two_point(c(3.0), c(3.0)).is_err());
        assert!(eq.green_two_point(c(1.0), c(3.0)).is_err());
    }

    #[test]
    fn two_point_symmetry_two_interval() {
        let eq = two();
        let a = eq.green_two_point(c(0.2), c(-0.2)).unwrap();
        let b = eq.green_two_point(c(-0.2), c(0.2)).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0);
        let x = eq.green_two_point(c(0.3), c(2.5)).unwrap();
        let y = eq.green_two_point(c(-0.3), c(-2.5)).unwrap();
        assert_abs_diff_eq!(x, y, epsilon = 1e-10);
    }

    #[test]
    fn sums() {
        let eq = single();
        assert_eq!(eq.greens_sum(&[]).unwrap(), 0.0);
        assert_abs_diff_eq!(eq.greens_sum(&[3.0, 10.0]).unwrap(), 3.254856, epsilon = 1e-6);
        assert!(eq.greens_sum(&[0.0]).is_err());
        assert_eq!(eq.carleson_sum(&[3.0]).unwrap(), 0.0);
        assert!(eq.carleson_sum(&[3.0, 3.0]).is_err());
    }

    #[test]
    fn rescale() {
        let u = rescale_to_unit_capacity(&IntervalSet::interval(-2.0, 2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(u.scale, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.shift, 0.0, epsilon = 1e-12);
        let u = rescale_to_unit_capacity(&IntervalSet::interval(0.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(u.scale, 4.0, epsilon = 1e-12);
        let u = rescale_to_unit_capacity(&IntervalSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap()).unwrap();
        assert_abs_diff_eq!(u.scale, 2.0 / 3f64.sqrt(), epsilon = 1e-10);
        let cap = equilibrium_auto(&u.set).unwrap().capacity();
        assert_abs_diff_eq!(cap, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn order_below_minimum_rejected() {
        assert!(equilibrium(&IntervalSet::interval(0.0, 1.0).unwrap(), 8).is_err());
    }
}
