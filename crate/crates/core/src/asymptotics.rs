//! Finite-`n` diagnostics of the asymptotic behaviour of recurrence
//! coefficients: Widom factors, almost-period scans on the frequency torus,
//! Szegő asymptotics on a single interval and `n`-th root decay.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::Location;
use crate::jacobi::{eval_polys, recurrence_auto, JacobiCoefficients};
use crate::measure::{SpectralMeasure, Weight};
use crate::potential::EquilibriumData;
use crate::quadrature::GradedRule;

/// Torus distances closer than this count as ties.
pub const TORUS_TIE_TOL: f64 = 1e-9;
/// Torus distance regarded as small.
pub const SMALL_TORUS_DISTANCE: f64 = 0.05;
/// Default largest period scanned.
pub const DEFAULT_T_MAX: usize = 12;

/// Frequencies `omega_j` in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector {
    pub omegas: Vec<f64>,
}

impl FrequencyVector {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if let Some(w) = omegas.iter().find(|w| !(0.0..1.0).contains(*w)) {
            return Err(Error::InvalidArgument(format!("frequency {w} outside [0, 1)")));
        }
        Ok(Self { omegas })
    }

    /// `max_j ||T omega_j||`, the distance of `T omega` to the integer lattice.
    pub fn torus_distance(&self, t: usize) -> f64 {
        self.omegas
            .iter()
            .map(|w| {
                let x = t as f64 * w;
                (x - x.round()).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn frequency_vector(eq: &EquilibriumData) -> FrequencyVector {
    FrequencyVector { omegas: eq.harmonic_frequencies() }
}

/// `W_n = p_0 ... p_n / cap^n` for `n = 0..N`.
pub fn widom_factors(c: &JacobiCoefficients, cap: f64) -> Result<Vec<f64>> {
    if !(cap > 0.0) {
        return Err(Error::InvalidArgument(format!("capacity {cap} must be positive")));
    }
    let lc = cap.ln();
    let mut acc = 0.0;
    Ok(c.p
        .iter()
        .enumerate()
        .map(|(n, p)| {
            acc += p.ln();
            (acc - n as f64 * lc).exp()
        })
        .collect())
}

/// One candidate period of an almost-period scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodCandidate {
    pub period: usize,
    pub torus_distance: f64,
    pub sup_deviation_p: f64,
    pub sup_deviation_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodDiagnostics {
    pub burn_in: usize,
    pub candidate_periods: Vec<PeriodCandidate>,
}

impl AlmostPeriodDiagnostics {
    /// Periods whose torus distance is minimal up to [`TORUS_TIE_TOL`].
    pub fn torus_argmin(&self) -> Vec<usize> {
        let best = self.candidate_periods.iter().map(|c| c.torus_distance).fold(f64::INFINITY, f64::min);
        self.candidate_periods
            .iter()
            .filter(|c| c.torus_distance <= best + TORUS_TIE_TOL)
            .map(|c| c.period)
            .collect()
    }

    /// Period with the smallest `p` deviation (first on ties).
    pub fn deviation_argmin(&self) -> Option<usize> {
        self.candidate_periods
            .iter()
            .min_by(|a, b| a.sup_deviation_p.total_cmp(&b.sup_deviation_p))
            .map(|c| c.period)
    }

    /// True when the coefficient-deviation minimizer also minimizes the torus distance.
    pub fn argmin_agrees(&self) -> bool {
        self.deviation_argmin().is_some_and(|t| self.torus_argmin().contains(&t))
    }

    pub fn candidate(&self, period: usize) -> Option<&PeriodCandidate> {
        self.candidate_periods.iter().find(|c| c.period == period)
    }
}

/// For `T = 1..=t_max`: torus distance and `sup_{m >= burn_in}` of
/// `|p_{m+T} - p_m|` and `|q_{m+T} - q_m|`.
pub fn almost_period_scan(
    c: &JacobiCoefficients,
    omega: &FrequencyVector,
    burn_in: usize,
    t_max: usize,
) -> Result<AlmostPeriodDiagnostics> {
    let n = c.len();
    let needed = burn_in + t_max + 10;
    if n < needed {
        return Err(Error::InsufficientLength { needed, available: n });
    }
    let candidate_periods = (1..=t_max)
        .map(|t| {
            let dev = |v: &[f64]| (burn_in..v.len() - t).map(|m| (v[m + t] - v[m]).abs()).fold(0.0, f64::max);
            PeriodCandidate {
                period: t,
                torus_distance: omega.torus_distance(t),
                sup_deviation_p: dev(&c.p),
                sup_deviation_q: dev(&c.q),
            }
        })
        .collect();
    Ok(AlmostPeriodDiagnostics { burn_in, candidate_periods })
}

/// Szegő function `D` of a single-interval weight after mapping the interval to `[-2, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub enum SzegoFunction {
    /// `D = 1 - zeta^2`.
    Semicircle,
    /// `D = sqrt 2`.
    Arcsine,
    /// `D = sqrt 2 (1 - zeta)`.
    Sigma0,
    /// Outer function computed from the density by quadrature.
    Outer(OuterFunction),
}

impl SzegoFunction {
    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        let s2 = 2f64.sqrt();
        match self {
            SzegoFunction::Semicircle => 1.0 - zeta * zeta,
            SzegoFunction::Arcsine => Complex64::new(s2, 0.0),
            SzegoFunction::Sigma0 => (1.0 - zeta) * s2,
            SzegoFunction::Outer(f) => f.eval(zeta),
        }
    }
}

/// `D(zeta) = exp((1/2) int log rho(t) (t + zeta)/(t - zeta) dm(t))` for a
/// density `rho` on the unit circle that is even in the angle.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterFunction {
    phis: Vec<f64>,
    weights: Vec<f64>,
    log_rho: Vec<f64>,
}

impl OuterFunction {
    /// Samples `log rho(e^{i phi})` for `phi` in `(0, pi)` on a graded rule.
    pub fn new<F: Fn(f64) -> f64>(log_rho: F) -> Self {
        let rule = GradedRule::new(16, 20);
        let mut phis = Vec::new();
        let mut weights = Vec::new();
        let mut vals = Vec::new();
        for &(s, w) in rule.points() {
            let phi = PI * s;
            let l = log_rho(phi);
            // a density evaluated at 2 cos(phi) loses relative accuracy like
            // eps / phi^2, which caps the useful grading depth
            if !l.is_finite() {
                continue;
            }
            phis.push(phi);
            weights.push(PI * w);
            vals.push(l);
        }
        Self { phis, weights, log_rho: vals }
    }

    /// From the density `w` of a measure on `[-2, 2]`: `rho = 2 pi w(2 cos phi) |2 sin phi|`.
    pub fn from_density<F: Fn(f64) -> f64>(density: F) -> Self {
        Self::new(|phi| (2.0 * PI * density(2.0 * phi.cos()) * 2.0 * phi.sin()).ln())
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&phi, &w), &l) in self.phis.iter().zip(&self.weights).zip(&self.log_rho) {
            let t = Complex64::from_polar(1.0, phi);
            let tc = t.conj();
            let k = (t + zeta) / (t - zeta) + (tc + zeta) / (tc - zeta);
            acc += k * (w * l);
        }
        // dm = dphi / (2 pi); the half-circle sum covers both signs of phi
        (acc / (4.0 * PI)).exp()
    }
}

/// One Szegő comparison `|P_n(z(zeta)) zeta^n D(zeta) - 1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoCheck {
    pub zeta_re: f64,
    pub zeta_im: f64,
    pub n: usize,
    pub observed_re: f64,
    pub observed_im: f64,
    pub predicted: f64,
    pub error: f64,
}

/// Single-interval Szegő reference data of a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoReference {
    pub function: SzegoFunction,
    /// Affine map `x = scale y + shift` from `[-2, 2]` to the support.
    pub scale: f64,
    pub shift: f64,
}

impl SzegoReference {
    pub fn for_measure(measure: &SpectralMeasure) -> Result<Self> {
        let set = measure.bands().ok_or_else(|| Error::Unsupported("measure without a.c. part".into()))?;
        if set.num_bands() != 1 {
            return Err(Error::Unsupported(format!("Szegő reference needs one band, got {}", set.num_bands())));
        }
        if !measure.masses().is_empty() {
            return Err(Error::Unsupported("Szegő reference with point masses".into()));
        }
        let (a, b) = set.bands()[0];
        let scale = 0.25 * (b - a);
        let shift = 0.5 * (a + b);
        let function = match measure.weight() {
            Weight::Jacobi(bw) if bw[0].h.len() == 1 && (measure.total_mass() - 1.0).abs() < 1e-12 => {
                match (bw[0].left, bw[0].right) {
                    (l, r) if l > 0.0 && r > 0.0 => SzegoFunction::Semicircle,
                    (l, r) if l < 0.0 && r < 0.0 => SzegoFunction::Arcsine,
                    _ => Self::outer(measure, scale, shift),
                }
            }
            Weight::Equilibrium(_) => SzegoFunction::Arcsine,
            Weight::Sigma0 { x, .. } if x.is_empty() => SzegoFunction::Sigma0,
            _ => Self::outer(measure, scale, shift),
        };
        Ok(Self { function, scale, shift })
    }

    fn outer(measure: &SpectralMeasure, scale: f64, shift: f64) -> SzegoFunction {
        SzegoFunction::Outer(OuterFunction::from_density(|y| scale * measure.density(scale * y + shift)))
    }

    pub fn d0(&self) -> f64 {
        self.function.eval(Complex64::new(0.0, 0.0)).re
    }

    pub fn z_of_zeta(&self, zeta: Complex64) -> Complex64 {
        (zeta + 1.0 / zeta) * self.scale + self.shift
    }
}

/// `|P_n(z(zeta)) zeta^n D(zeta) - 1|` at the given points.
pub fn szego_reference_check(
    c: &JacobiCoefficients,
    measure: &SpectralMeasure,
    zetas: &[Complex64],
    n: usize,
) -> Result<Vec<SzegoCheck>> {
    if n > c.len() {
        return Err(Error::InsufficientLength { needed: n, available: c.len() });
    }
    let reference = SzegoReference::for_measure(measure)?;
    Ok(zetas
        .iter()
        .map(|&zeta| {
            let p = eval_polys(c, reference.z_of_zeta(zeta), n)[n];
            let obs = p * zeta.powu(n as u32) * reference.function.eval(zeta);
            SzegoCheck {
                zeta_re: zeta.re,
                zeta_im: zeta.im,
                n,
                observed_re: obs.re,
                observed_im: obs.im,
                predicted: 1.0,
                error: (obs - 1.0).norm(),
            }
        })
        .collect())
}

/// `|(1/n) log|P_n(z)| - G(z)|`.
pub fn nth_root_check(c: &JacobiCoefficients, eq: &EquilibriumData, z: Complex64, n: usize) -> Result<f64> {
    if z.im == 0.0 && eq.set().contains(z.re) {
        return Err(Error::OnSupport(z.re));
    }
    if n == 0 || n > c.len() {
        return Err(Error::InsufficientLength { needed: n.max(1), available: c.len() });
    }
    let p = eval_polys(c, z, n)[n];
    Ok((p.norm().ln() / n as f64 - eq.green(z)).abs())
}

/// `sup_{n >= burn_in} |log(|P_{n+T}(z)| / |P_n(z)|) - T G(z)|`.
pub fn ratio_along_almost_periods(
    c: &JacobiCoefficients,
    eq: &EquilibriumData,
    z: Complex64,
    burn_in: usize,
    period: usize,
) -> Result<f64> {
    if z.im == 0.0 && eq.set().contains(z.re) {
        return Err(Error::OnSupport(z.re));
    }
    let n = c.len();
    if burn_in + period > n {
        return Err(Error::InsufficientLength { needed: burn_in + period, available: n });
    }
    let logs: Vec<f64> = eval_polys(c, z, n).iter().map(|p| p.norm().ln()).collect();
    let tg = period as f64 * eq.green(z);
    Ok((burn_in..=n - period).map(|k| (logs[k + period] - logs[k] - tg).abs()).fold(0.0, f64::max))
}

/// Tail deviation of the coefficients after adding a point mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassStability {
    pub burn_in: usize,
    pub sup_delta_p: f64,
    pub sup_delta_q: f64,
    /// `sup_{n >= k} max(|dp_n|, |dq_n|)` for `k = 0..=N`.
    pub tail_profile: Vec<f64>,
}

impl MassStability {
    pub fn deviation(&self) -> f64 {
        self.sup_delta_p.max(self.sup_delta_q)
    }
}

/// Coefficients of `sigma` and `sigma + m delta_x` compared beyond `burn_in`.
pub fn point_mass_stability(base: &SpectralMeasure, mass: (f64, f64), n: usize, burn_in: usize) -> Result<MassStability> {
    let (x, m) = mass;
    if let Some(set) = base.bands() {
        if set.contains(x) {
            return Err(Error::OnSupport(x));
        }
    }
    let a = recurrence_auto(base, n)?.coefficients;
    let b = if m == 0.0 { a.clone() } else { recurrence_auto(&base.with_mass(x, m)?, n)?.coefficients };
    let dp: Vec<f64> = a.p.iter().zip(&b.p).map(|(u, v)| (u - v).abs()).collect();
    let dq: Vec<f64> = a.q.iter().zip(&b.q).map(|(u, v)| (u - v).abs()).collect();
    let mut tail_profile = vec![0.0; dp.len()];
    let mut run = 0.0f64;
    for k in (0..dp.len()).rev() {
        run = run.max(dp[k]).max(dq.get(k).copied().unwrap_or(0.0));
        tail_profile[k] = run;
    }
    let sup = |v: &[f64]| v.iter().skip(burn_in).copied().fold(0.0, f64::max);
    Ok(MassStability { burn_in, sup_delta_p: sup(&dp), sup_delta_q: sup(&dq), tail_profile })
}

/// Spread `sup - inf` of `W_n` over `n` in `[start, end]`.
pub fn widom_window(w: &[f64], start: usize, end: usize) -> (f64, f64) {
    let slice = &w[start.min(w.len())..(end + 1).min(w.len())];
    let lo = slice.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Inputs of [`build_report`].
#[derive(Debug, Clone)]
pub struct ReportInputs<'a> {
    pub measure: &'a SpectralMeasure,
    pub eq: &'a EquilibriumData,
    pub coefficients: &'a JacobiCoefficients,
    pub burn_in: usize,
    pub t_max: usize,
    pub szego_n: usize,
    pub szego_points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub widom_factors: Vec<f64>,
    pub frequency: FrequencyVector,
    pub diagnostics: Option<AlmostPeriodDiagnostics>,
    pub szego_checks: Vec<SzegoCheck>,
    pub notes: Vec<String>,
}

pub fn build_report(inputs: &ReportInputs<'_>) -> Result<AsymptoticsReport> {
    let c = inputs.coefficients;
    let widom_factors = widom_factors(c, inputs.eq.capacity())?;
    let frequency = frequency_vector(inputs.eq);
    let mut notes = Vec::new();
    let diagnostics = match almost_period_scan(c, &frequency, inputs.burn_in, inputs.t_max) {
        Ok(d) => Some(d),
        Err(e) => {
            notes.push(format!("almost-period scan skipped: {e}"));
            None
        }
    };
    let szego_checks = match szego_reference_check(c, inputs.measure, &inputs.szego_points, inputs.szego_n.min(c.len())) {
        Ok(v) => v,
        Err(e) => {
            notes.push(format!("Szegő reference skipped: {e}"));
            Vec::new()
        }
    };
    if let Some(set) = inputs.measure.bands() {
        for &(x, _) in inputs.measure.masses() {
            if let Location::Left | Location::Right = set.locate(x) {
                notes.push(format!("mass at {x} lies outside the convex hull"));
            }
        }
    }
    Ok(AsymptoticsReport { widom_factors, frequency, diagnostics, szego_checks, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval_sets::IntervalSet;
    use crate::measure::{build_measure, make_sigma0, WeightSpec};
    use crate::potential::equilibrium_auto;
    use approx::assert_abs_diff_eq;

    fn unit() -> IntervalSet {
        IntervalSet::interval(-2.0, 2.0).unwrap()
    }

    #[test]
    fn widom_factors_closed_forms() {
        let c = JacobiCoefficients::new(vec![1.0; 11], vec![0.0; 10]).unwrap();
        assert!(widom_factors(&c, 1.0).unwrap().iter().all(|&w| w == 1.0));
        let mut p = vec![1.0; 11];
        p[1] = 2f64.sqrt();
        let c = JacobiCoefficients::new(p, vec![0.0; 10]).unwrap();
        let w = widom_factors(&c, 1.0).unwrap();
        assert_eq!(w[0], 1.0);
        assert!(w[1..].iter().all(|&v| (v - 2f64.sqrt()).abs() < 1e-15));
        assert!(widom_factors(&c, 0.0).is_err());
    }

    #[test]
    fn torus_distance() {
        let w = FrequencyVector::new(vec![0.5]).unwrap();
        assert_eq!(w.torus_distance(2), 0.0);
        assert_eq!(w.torus_distance(3), 0.5);
        assert_eq!(FrequencyVector::new(vec![]).unwrap().torus_distance(5), 0.0);
        assert!(FrequencyVector::new(vec![1.0]).is_err());
    }

    #[test]
    fn outer_function_matches_closed_forms() {
        let semi = OuterFunction::from_density(|x| (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI));
        let arc = OuterFunction::from_density(|x| 1.0 / (PI * (4.0 - x * x).sqrt()));
        let s0 = OuterFunction::from_density(|x| ((2.0 - x) / (2.0 + x)).sqrt() / PI);
        for zeta in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.2), Complex64::new(-0.7, 0.1)] {
            for (f, g) in [(&semi, SzegoFunction::Semicircle), (&arc, SzegoFunction::Arcsine), (&s0, SzegoFunction::Sigma0)] {
                let e = (f.eval(zeta) - g.eval(zeta)).norm();
                assert!(e < 1e-8, "{g:?} {zeta} {e}");
            }
        }
    }

    #[test]
    fn szego_semicircle_and_arcsine() {
        for w in [WeightSpec::Semicircle {}, WeightSpec::Arcsine {}] {
            let m = build_measure(&unit(), &w, &[]).unwrap();
            let c = recurrence_auto(&m, 40).unwrap().coefficients;
            let checks = szego_reference_check(&c, &m, &[Complex64::new(0.5, 0.0)], 30).unwrap();
            assert!(checks[0].error < 1e-12);
        }
        let two = build_measure(&IntervalSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap(), &WeightSpec::Arcsine {}, &[]).unwrap();
        let c = JacobiCoefficients::new(vec![1.0; 3], vec![0.0; 2]).unwrap();
        assert!(matches!(szego_reference_check(&c, &two, &[], 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn szego_sigma0() {
        let m = make_sigma0(&unit(), &[], &[]).unwrap();
        let c = recurrence_auto(&m, 40).unwrap().coefficients;
        let checks = szego_reference_check(&c, &m, &[Complex64::new(0.3, 0.3)], 30).unwrap();
        assert!(checks[0].error < 1e-10);
        let w = widom_factors(&c, 1.0).unwrap();
        assert_abs_diff_eq!(w[30], 2f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn nth_root_semicircle() {
        let m = build_measure(&unit(), &WeightSpec::Semicircle {}, &[]).unwrap();
        let c = recurrence_auto(&m, 400).unwrap().coefficients;
        let eq = equilibrium_auto(&unit()).unwrap();
        let z = Complex64::new(3.0, 0.0);
        let e200 = nth_root_check(&c, &eq, z, 200).unwrap();
        let a = eq.green(z);
        let exact = ((201.0 * a).sinh() / a.sinh()).ln() / 200.0 - a;
        assert_abs_diff_eq!(e200, exact.abs(), epsilon = 1e-10);
        assert!(nth_root_check(&c, &eq, z, 400).unwrap() <= nth_root_check(&c, &eq, z, 100).unwrap());
        assert!(ratio_along_almost_periods(&c, &eq, z, 50, 3).unwrap() < 1e-10);
    }

    #[test]
    fn mass_stability_zero_mass() {
        let m = build_measure(&unit(), &WeightSpec::Semicircle {}, &[]).unwrap();
        let s = point_mass_stability(&m, (3.0, 0.0), 40, 20).unwrap();
        assert_eq!(s.deviation(), 0.0);
        assert!(point_mass_stability(&m, (1.0, 0.1), 40, 20).is_err());
    }

    #[test]
    fn scan_requires_length() {
        let c = JacobiCoefficients::new(vec![1.0; 21], vec![0.0; 20]).unwrap();
        let w = FrequencyVector::new(vec![]).unwrap();
        assert!(almost_period_scan(&c, &w, 10, 12).is_err());
        let d = almost_period_scan(&c, &w, 5, 5).unwrap();
        assert_eq!(d.torus_argmin(), vec![1, 2, 3, 4, 5]);
        assert!(d.argmin_agrees());
    }
}
