//! Spectral measures on `E` with finitely many point masses off `E`, their
//! Stieltjes functions `r(z) = c + int d sigma(x) / (x - z)` and the
//! tau-transform `r -> -1/r`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::IntervalSet;
use crate::potential::{equilibrium_auto, EquilibriumData};
use crate::quadrature::{cos_midpoint, GaussLegendre, GradedRule};

/// Default quadrature order for integrals over `E`.
pub const DEFAULT_ORDER: usize = 256;
/// `|r(e)|` below this at a band edge counts as a zero on the boundary.
pub const BOUNDARY_ZERO_TOL: f64 = 1e-11;

/// Weight of one band: `c (1 - t)^right (1 + t)^left h(t)` in the local
/// variable `t = (x - mid) / halfwidth`, exponents `+-1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandWeight {
    pub left: f64,
    pub right: f64,
    /// Monomial coefficients of `h`, lowest degree first.
    pub h: Vec<f64>,
    pub scale: f64,
}

impl BandWeight {
    fn new(left: f64, right: f64, h: Vec<f64>) -> Result<Self> {
        for e in [left, right] {
            if e != 0.5 && e != -0.5 {
                return Err(Error::InvalidArgument(format!("endpoint exponent {e} is not +-1/2")));
            }
        }
        if h.is_empty() {
            return Err(Error::InvalidArgument("empty smooth factor".into()));
        }
        Ok(Self { left, right, h, scale: 1.0 })
    }

    fn h_at(&self, t: f64) -> f64 {
        self.h.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// `(1 - cos th)^(right + 1/2) (1 + cos th)^(left + 1/2) h(cos th)`, i.e. the
    /// weight times `sin th`, without the scale.
    fn theta_factor(&self, theta: f64) -> f64 {
        let c = theta.cos();
        let mut v = self.h_at(c);
        if self.right > 0.0 {
            v *= 1.0 - c;
        }
        if self.left > 0.0 {
            v *= 1.0 + c;
        }
        v
    }

    /// `int weight dt` over `[-1, 1]`, without the scale.
    fn unit_mass(&self) -> f64 {
        let n = self.h.len() + 4;
        cos_midpoint(n).map(|(th, w)| w * self.theta_factor(th)).sum()
    }

    fn density_local(&self, t: f64) -> f64 {
        let mut v = self.scale * self.h_at(t);
        v *= (1.0 - t).max(0.0).powf(self.right);
        v *= (1.0 + t).max(0.0).powf(self.left);
        v
    }

    /// `int_{-1}^{1} weight(t) / (t - zeta) dt`.
    fn stieltjes_local(&self, zeta: Complex64) -> Complex64 {
        if self.h.len() > 1 && zeta.norm() > 2.0 {
            let n = 64 + 2 * self.h.len();
            let s: Complex64 = cos_midpoint(n).map(|(th, w)| w * self.theta_factor(th) / (th.cos() - zeta)).sum();
            return s * self.scale;
        }
        // h(t) = h(zeta) + (t - zeta) d(t)
        let mut d = vec![Complex64::new(0.0, 0.0); self.h.len().saturating_sub(1)];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..self.h.len()).rev() {
            acc = acc * zeta + self.h[k];
            if k > 0 {
                d[k - 1] = acc;
            }
        }
        let h_zeta = acc;
        let mut smooth = Complex64::new(0.0, 0.0);
        if !d.is_empty() {
            let n = d.len() + 4;
            for (th, w) in cos_midpoint(n) {
                let c = th.cos();
                let mut f = d.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &dk| a * c + dk);
                if self.right > 0.0 {
                    f *= 1.0 - c;
                }
                if self.left > 0.0 {
                    f *= 1.0 + c;
                }
                smooth += f * w;
            }
        }
        (h_zeta * jacobi_cauchy(self.left, self.right, zeta) + smooth) * self.scale
    }
}

/// Closed-form `int (1 - t)^a (1 + t)^b / (t - zeta) dt` for `a, b = +-1/2`.
fn jacobi_cauchy(left: f64, right: f64, zeta: Complex64) -> Complex64 {
    let u = (zeta - 1.0).sqrt();
    let v = (zeta + 1.0).sqrt();
    match (right > 0.0, left > 0.0) {
        (false, false) => -PI / (u * v),
        (true, true) => -PI / (u * v + zeta),
        (true, false) => -2.0 * PI / (v * (u + v)),
        (false, true) => -2.0 * PI / (u * (u + v)),
    }
}

/// Absolutely continuous part of a spectral measure.
#[derive(Debug, Clone)]
pub enum Weight {
    /// One [`BandWeight`] per band.
    Jacobi(Vec<BandWeight>),
    /// The equilibrium measure of the bands.
    Equilibrium(Arc<EquilibriumData>),
    /// Reference measure with `r0(z) = prod (z - xtau)/(z - x) sqrt(prod (z - b_j)/(z - a_j))`.
    Sigma0 { x: Vec<f64>, xtau: Vec<f64> },
    /// Measure of `-1/F + 1/c` for a Stieltjes function `F` with constant `c`.
    Transformed { source: Arc<StieltjesFunction>, exponents: Vec<(f64, f64)> },
    /// No absolutely continuous part.
    Zero,
}

/// Weight description accepted from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `sqrt((x - a)(b - x))` on each band, band mass proportional to length, total 1.
    Semicircle {},
    /// `1 / sqrt((x - a)(b - x))` on each band, band mass proportional to length, total 1.
    Arcsine {},
    Equilibrium {},
    Sigma0 {
        #[serde(default)]
        x: Vec<f64>,
        #[serde(default)]
        xtau: Vec<f64>,
    },
    GeneralizedJacobi { bands: Vec<JacobiBandSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JacobiBandSpec {
    pub left: f64,
    pub right: f64,
    #[serde(default = "unit_poly")]
    pub h: Vec<f64>,
    /// Band mass after normalization; `None` keeps the literal weight.
    #[serde(default)]
    pub mass: Option<f64>,
}

fn unit_poly() -> Vec<f64> {
    vec![1.0]
}

impl WeightSpec {
    pub fn name(&self) -> &'static str {
        match self {
            WeightSpec::Semicircle {} => "semicircle",
            WeightSpec::Arcsine {} => "arcsine",
            WeightSpec::Equilibrium {} => "equilibrium",
            WeightSpec::Sigma0 { .. } => "sigma0",
            WeightSpec::GeneralizedJacobi { .. } => "generalized-jacobi",
        }
    }
}

/// Measure spec in JSON form: bands, weight and point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub weight: WeightSpec,
    #[serde(default)]
    pub masses: Vec<[f64; 2]>,
}

/// Positive measure on `E` plus finitely many point masses off `E`.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    bands: Option<IntervalSet>,
    weight: Weight,
    masses: Vec<(f64, f64)>,
}

/// Builds a measure from bands, a weight description and point masses.
pub fn build_measure(bands: &IntervalSet, weight: &WeightSpec, masses: &[(f64, f64)]) -> Result<SpectralMeasure> {
    let weight = match weight {
        WeightSpec::Semicircle {} | WeightSpec::Arcsine {} => {
            let e = if matches!(weight, WeightSpec::Semicircle {}) { 0.5 } else { -0.5 };
            let total = bands.total_length();
            let specs = bands
                .bands()
                .iter()
                .map(|&(l, r)| JacobiBandSpec { left: e, right: e, h: vec![1.0], mass: Some((r - l) / total) })
                .collect::<Vec<_>>();
            jacobi_weight(bands, &specs)?
        }
        WeightSpec::Equilibrium {} => Weight::Equilibrium(Arc::new(equilibrium_auto(bands)?)),
        WeightSpec::Sigma0 { x, xtau } => {
            if !masses.is_empty() {
                return Err(Error::InvalidArgument("sigma0 masses are determined by x and xtau".into()));
            }
            return make_sigma0(bands, x, xtau);
        }
        WeightSpec::GeneralizedJacobi { bands: specs } => jacobi_weight(bands, specs)?,
    };
    SpectralMeasure::new(Some(bands.clone()), weight, masses.to_vec())
}

fn jacobi_weight(set: &IntervalSet, specs: &[JacobiBandSpec]) -> Result<Weight> {
    if specs.len() != set.num_bands() {
        return Err(Error::InvalidArgument(format!(
            "{} band weights for {} bands",
            specs.len(),
            set.num_bands()
        )));
    }
    let mut out = Vec::with_capacity(specs.len());
    for (spec, &(l, r)) in specs.iter().zip(set.bands()) {
        let mut bw = BandWeight::new(spec.left, spec.right, spec.h.clone())?;
        // positivity of h on the open band
        for (th, _) in cos_midpoint(64) {
            if !(bw.h_at(th.cos()) > 0.0) {
                return Err(Error::InvalidArgument(format!("weight factor not positive on band [{l}, {r}]")));
            }
        }
        if let Some(m) = spec.mass {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("band mass {m} must be positive")));
            }
            let hw = 0.5 * (r - l);
            bw.scale = m / (hw * bw.unit_mass());
        }
        out.push(bw);
    }
    Ok(Weight::Jacobi(out))
}

/// Reference measure whose Stieltjes function is
/// `r0(z) = prod (z - xtau_l)/(z - x_l) * sqrt(prod_j (z - b_j)/(z - a_j))`.
pub fn make_sigma0(bands: &IntervalSet, x: &[f64], xtau: &[f64]) -> Result<SpectralMeasure> {
    if x.len() != xtau.len() {
        return Err(Error::NonInterlacing(format!("{} poles and {} zeros", x.len(), xtau.len())));
    }
    let mut prev = f64::NEG_INFINITY;
    for (&p, &z) in x.iter().zip(xtau) {
        if !(prev < p && p < z) {
            return Err(Error::NonInterlacing(format!("pole {p} and zero {z} out of order")));
        }
        for pt in [p, z] {
            if bands.contains(pt) {
                return Err(Error::MassOnSupport(pt));
            }
        }
        if bands.bands().iter().any(|&(l, r)| l > p && r < z) {
            return Err(Error::NonInterlacing(format!("band between pole {p} and zero {z}")));
        }
        if bands.locate(p) != bands.locate(z) {
            return Err(Error::NonInterlacing(format!("pole {p} and zero {z} in different gaps")));
        }
        prev = z;
    }
    let weight = Weight::Sigma0 { x: x.to_vec(), xtau: xtau.to_vec() };
    let mut masses = Vec::with_capacity(x.len());
    for (l, &xl) in x.iter().enumerate() {
        let mut s = xtau[l] - xl;
        for k in 0..x.len() {
            if k != l {
                s *= (xl - xtau[k]) / (xl - x[k]);
            }
        }
        s *= sigma0_root(bands, Complex64::new(xl, 0.0)).re;
        if !(s > 0.0) {
            return Err(Error::NonInterlacing(format!("negative residue at pole {xl}")));
        }
        masses.push((xl, s));
    }
    SpectralMeasure::new(Some(bands.clone()), weight, masses)
}

/// `sqrt(prod (z - b_j)/(z - a_j))` as a product of principal roots; positive on `(a0, inf)`.
fn sigma0_root(bands: &IntervalSet, z: Complex64) -> Complex64 {
    bands.bands().iter().map(|&(a, b)| (z - b).sqrt() / (z - a).sqrt()).product()
}

impl SpectralMeasure {
    fn new(bands: Option<IntervalSet>, weight: Weight, mut masses: Vec<(f64, f64)>) -> Result<Self> {
        for &(x, m) in &masses {
            if !x.is_finite() {
                return Err(Error::InvalidArgument(format!("mass location {x}")));
            }
            if let Some(b) = &bands {
                if b.contains(x) {
                    return Err(Error::MassOnSupport(x));
                }
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::NonPositiveMass { x, weight: m });
            }
        }
        masses.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = masses.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicatePoint(w[0].0));
        }
        Ok(Self { bands, weight, masses })
    }

    /// Sum of point masses without absolutely continuous part.
    pub fn point_masses(masses: &[(f64, f64)]) -> Result<Self> {
        Self::new(None, Weight::Zero, masses.to_vec())
    }

    pub fn bands(&self) -> Option<&IntervalSet> {
        self.bands.as_ref()
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn masses(&self) -> &[(f64, f64)] {
        &self.masses
    }

    pub fn kind(&self) -> &'static str {
        match self.weight {
            Weight::Jacobi(_) => "generalized-jacobi",
            Weight::Equilibrium(_) => "equilibrium",
            Weight::Sigma0 { .. } => "sigma0",
            Weight::Transformed { .. } => "tau-transformed",
            Weight::Zero => "point-masses",
        }
    }

    /// Copy with one more point mass (a zero mass returns the measure unchanged).
    pub fn with_mass(&self, x: f64, m: f64) -> Result<Self> {
        if m == 0.0 {
            return Ok(self.clone());
        }
        if matches!(self.weight, Weight::Sigma0 { .. } | Weight::Transformed { .. }) {
            return Err(Error::Unsupported(format!("adding masses to a {} measure", self.kind())));
        }
        let mut masses = self.masses.clone();
        masses.push((x, m));
        Self::new(self.bands.clone(), self.weight.clone(), masses)
    }

    /// Affine image `x -> s x + t` (`s > 0`) of a Jacobi-type or point measure.
    pub fn affine(&self, s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidArgument(format!("scale {s} must be positive")));
        }
        let bands = self.bands.as_ref().map(|b| b.affine(s, t)).transpose()?;
        let weight = match &self.weight {
            // density in the local variable is invariant; mass is preserved by 1/s
            Weight::Jacobi(bw) => Weight::Jacobi(
                bw.iter().map(|b| BandWeight { scale: b.scale / s, ..b.clone() }).collect(),
            ),
            Weight::Zero => Weight::Zero,
            Weight::Equilibrium(_) => Weight::Equilibrium(Arc::new(equilibrium_auto(bands.as_ref().unwrap())?)),
            Weight::Sigma0 { x, xtau } => {
                let m = |v: &Vec<f64>| v.iter().map(|y| s * y + t).collect::<Vec<_>>();
                return make_sigma0(bands.as_ref().unwrap(), &m(x), &m(xtau));
            }
            Weight::Transformed { .. } => {
                return Err(Error::Unsupported("affine image of a transformed measure".into()));
            }
        };
        let masses = self.masses.iter().map(|&(x, m)| (s * x + t, m)).collect();
        Self::new(bands, weight, masses)
    }

    /// Left and right endpoint exponents of the density on each band.
    pub fn edge_exponents(&self) -> Vec<(f64, f64)> {
        let n = self.bands.as_ref().map_or(0, |b| b.num_bands());
        match &self.weight {
            Weight::Jacobi(bw) => bw.iter().map(|b| (b.left, b.right)).collect(),
            Weight::Equilibrium(_) => vec![(-0.5, -0.5); n],
            Weight::Sigma0 { .. } => vec![(-0.5, 0.5); n],
            Weight::Transformed { exponents, .. } => exponents.clone(),
            Weight::Zero => Vec::new(),
        }
    }

    /// Density of the absolutely continuous part at `x` (zero off `E`).
    pub fn density(&self, x: f64) -> f64 {
        let Some(set) = &self.bands else {
            return 0.0;
        };
        let crate::interval_sets::Location::Band(i) = set.locate(x) else {
            return 0.0;
        };
        let (l, r) = set.bands()[i];
        match &self.weight {
            Weight::Jacobi(bw) => bw[i].density_local((x - 0.5 * (l + r)) / (0.5 * (r - l))),
            Weight::Equilibrium(eq) => eq.density(x),
            Weight::Sigma0 { x: poles, xtau } => {
                (sigma0_rational(poles, xtau, Complex64::new(x, 0.0)) * sigma0_root(set, Complex64::new(x, 0.0))).im
                    / PI
            }
            Weight::Transformed { source, .. } => (-1.0 / source.value(Complex64::new(x, 0.0))).im.max(0.0) / PI,
            Weight::Zero => 0.0,
        }
    }

    /// `int f(x) w(x) dx` over `E` for the absolutely continuous part `w`, by the
    /// midpoint rule in `theta` with `n` nodes per band.
    pub fn integrate_ac<F: FnMut(f64) -> f64>(&self, n: usize, mut f: F) -> f64 {
        let mut acc = 0.0;
        for (x, w) in self.ac_nodes(n) {
            acc += w * f(x);
        }
        acc
    }

    /// Nodes `x_k` and weights `(pi/n) hw sin(theta_k) w(x_k)` of the a.c. part, `n` per band.
    pub fn ac_nodes(&self, n: usize) -> Vec<(f64, f64)> {
        let Some(set) = &self.bands else {
            return Vec::new();
        };
        if matches!(self.weight, Weight::Zero) {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(n * set.num_bands());
        for (i, &(l, r)) in set.bands().iter().enumerate() {
            let (mid, hw) = (0.5 * (l + r), 0.5 * (r - l));
            for (th, w) in cos_midpoint(n) {
                let x = mid + hw * th.cos();
                let wt = match &self.weight {
                    Weight::Jacobi(bw) => bw[i].scale * bw[i].theta_factor(th),
                    _ => th.sin() * self.density(x),
                };
                out.push((x, w * hw * wt));
            }
        }
        out
    }

    /// Mass of the absolutely continuous part.
    pub fn ac_mass(&self) -> f64 {
        match &self.weight {
            Weight::Jacobi(bw) => {
                let set = self.bands.as_ref().unwrap();
                bw.iter().zip(set.bands()).map(|(b, &(l, r))| b.scale * 0.5 * (r - l) * b.unit_mass()).sum()
            }
            Weight::Equilibrium(_) => 1.0,
            Weight::Zero => 0.0,
            _ => self.total_mass() - self.masses.iter().map(|m| m.1).sum::<f64>(),
        }
    }

    /// Total mass, from closed forms where available.
    pub fn total_mass(&self) -> f64 {
        let point: f64 = self.masses.iter().map(|m| m.1).sum();
        match &self.weight {
            Weight::Sigma0 { x, xtau } => {
                let shift: f64 = x.iter().zip(xtau).map(|(a, b)| b - a).sum();
                shift + 0.5 * self.bands.as_ref().unwrap().total_length()
            }
            // -1/(c + S) = -1/c + S/c^2 + O(z^-2)
            Weight::Transformed { source, .. } => source.measure.total_mass() / (source.constant * source.constant),
            _ => self.ac_mass() + point,
        }
    }

    /// `int d sigma(x) / (x - z)` including point masses; upper boundary value for real `z` on `E`.
    fn transform(&self, z: Complex64) -> Complex64 {
        let point: Complex64 = self.masses.iter().map(|&(x, m)| m / (x - z)).sum();
        match &self.weight {
            Weight::Jacobi(bw) => {
                let set = self.bands.as_ref().unwrap();
                let mut s = point;
                for (b, &(l, r)) in bw.iter().zip(set.bands()) {
                    let (mid, hw) = (0.5 * (l + r), 0.5 * (r - l));
                    s += b.stieltjes_local((z - mid) / hw);
                }
                s
            }
            Weight::Equilibrium(eq) => eq.stieltjes(z) + point,
            Weight::Sigma0 { x, xtau } => sigma0_rational(x, xtau, z) * sigma0_root(self.bands.as_ref().unwrap(), z) - 1.0,
            Weight::Transformed { source, .. } => -1.0 / source.value(z) + 1.0 / source.constant,
            Weight::Zero => point,
        }
    }

    /// Real limit of the transform at a band edge, approached from outside `E`.
    fn edge_limit(&self, band: usize, right: bool) -> f64 {
        let exps = self.edge_exponents()[band];
        let exp = if right { exps.1 } else { exps.0 };
        if exp < 0.0 {
            return if right { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match &self.weight {
            Weight::Transformed { source, .. } => {
                -1.0 / (source.constant + source.measure.edge_limit(band, right)) + 1.0 / source.constant
            }
            _ => {
                let (l, r) = self.bands.as_ref().unwrap().bands()[band];
                self.transform(Complex64::new(if right { r } else { l }, 0.0)).re
            }
        }
    }

    fn on_support(&self, x: f64) -> bool {
        self.bands.as_ref().is_some_and(|b| b.contains(x)) || self.masses.iter().any(|m| m.0 == x)
    }

    /// Distance from a real point to the support.
    fn support_distance(&self, x: f64) -> f64 {
        let d = self.bands.as_ref().map_or(f64::INFINITY, |b| b.distance(x));
        self.masses.iter().map(|m| (m.0 - x).abs()).fold(d, f64::min)
    }

    /// Samples `(x, w(x))` of the a.c. density at `n` Chebyshev points per band.
    pub fn density_samples(&self, n: usize) -> Vec<(f64, f64)> {
        let Some(set) = &self.bands else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for &(l, r) in set.bands() {
            let (mid, hw) = (0.5 * (l + r), 0.5 * (r - l));
            for (th, _) in cos_midpoint(n).collect::<Vec<_>>().into_iter().rev() {
                let x = mid + hw * th.cos();
                out.push((x, self.density(x)));
            }
        }
        out
    }
}

fn sigma0_rational(x: &[f64], xtau: &[f64], z: Complex64) -> Complex64 {
    x.iter().zip(xtau).map(|(&p, &q)| (z - q) / (z - p)).product()
}

/// `r(z) = c + int d sigma(x) / (x - z)` with `c = +-1`.
#[derive(Debug, Clone)]
pub struct StieltjesFunction {
    pub measure: SpectralMeasure,
    pub constant: f64,
    pub quadrature_order: usize,
}

impl StieltjesFunction {
    /// The normalized function `r = 1 + int d sigma / (x - z)`.
    pub fn new(measure: SpectralMeasure) -> Self {
        Self { measure, constant: 1.0, quadrature_order: DEFAULT_ORDER }
    }

    pub fn with_constant(measure: SpectralMeasure, constant: f64) -> Result<Self> {
        if constant != 1.0 && constant != -1.0 {
            return Err(Error::InvalidArgument(format!("constant {constant} must be +-1")));
        }
        Ok(Self { measure, constant, quadrature_order: DEFAULT_ORDER })
    }

    /// Value off the support; real symmetry is enforced by evaluating in the upper half-plane.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite point {z}")));
        }
        if z.im == 0.0 && self.measure.on_support(z.re) {
            return Err(Error::OnSupport(z.re));
        }
        Ok(self.value(z))
    }

    /// Value without the support check; upper boundary value on `E`.
    fn value(&self, z: Complex64) -> Complex64 {
        if z.im < 0.0 {
            (self.measure.transform(z.conj()) + self.constant).conj()
        } else {
            self.measure.transform(z) + self.constant
        }
    }

    /// Upper boundary value `r(x + i0)` at a point of `E`.
    pub fn boundary_value(&self, x: f64) -> Complex64 {
        self.value(Complex64::new(x, 0.0))
    }

    fn real_value(&self, x: f64) -> f64 {
        self.value(Complex64::new(x, 0.0)).re
    }

    /// `r'(x)` at a real point off the support, by a trapezoidal contour integral.
    pub fn derivative(&self, x: f64) -> f64 {
        let radius = 0.5 * self.measure.support_distance(x);
        let m = 64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let phi = 2.0 * PI * (k as f64 + 0.5) / m as f64;
            let e = Complex64::from_polar(1.0, phi);
            acc += self.value(x + e * radius) / e;
        }
        acc.re / (m as f64 * radius)
    }

    /// Components of `R \ supp` with the limits of `r` at their ends.
    fn components(&self) -> Vec<Component> {
        #[derive(Clone, Copy)]
        enum Barrier {
            Mass(f64),
            Band(usize, f64, f64),
        }
        let mut barriers: Vec<Barrier> = self.measure.masses.iter().map(|m| Barrier::Mass(m.0)).collect();
        if let Some(set) = &self.measure.bands {
            barriers.extend(set.bands().iter().enumerate().map(|(i, &(l, r))| Barrier::Band(i, l, r)));
        }
        let key = |b: &Barrier| match *b {
            Barrier::Mass(x) => x,
            Barrier::Band(_, l, _) => l,
        };
        barriers.sort_by(|a, b| key(a).total_cmp(&key(b)));
        let c = self.constant;
        let left_end = |b: Option<&Barrier>| match b {
            None => (f64::NEG_INFINITY, c, None),
            Some(&Barrier::Mass(x)) => (x, f64::NEG_INFINITY, None),
            Some(&Barrier::Band(i, _, r)) => (r, c + self.measure.edge_limit(i, true), Some(r)),
        };
        let right_end = |b: Option<&Barrier>| match b {
            None => (f64::INFINITY, c, None),
            Some(&Barrier::Mass(x)) => (x, f64::INFINITY, None),
            Some(&Barrier::Band(i, l, _)) => (l, c + self.measure.edge_limit(i, false), Some(l)),
        };
        let mut out = Vec::with_capacity(barriers.len() + 1);
        for k in 0..=barriers.len() {
            let (lo, f_lo, e_lo) = left_end(if k == 0 { None } else { barriers.get(k - 1) });
            let (hi, f_hi, e_hi) = right_end(barriers.get(k));
            out.push(Component { lo, hi, f_lo, f_hi, edge_lo: e_lo, edge_hi: e_hi });
        }
        out
    }

    /// Real zeros of `r` off the support (one per sign change) and band edges where `r` vanishes.
    pub fn real_zeros(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut zeros = Vec::new();
        let mut boundary = Vec::new();
        for comp in self.components() {
            let mut f_lo = comp.f_lo;
            let mut f_hi = comp.f_hi;
            if let Some(e) = comp.edge_lo {
                if f_lo.abs() < BOUNDARY_ZERO_TOL {
                    push_once(&mut boundary, e);
                    f_lo = 0.0;
                }
            }
            if let Some(e) = comp.edge_hi {
                if f_hi.abs() < BOUNDARY_ZERO_TOL {
                    push_once(&mut boundary, e);
                    f_hi = 0.0;
                }
            }
            if f_lo < 0.0 && f_hi > 0.0 {
                zeros.push(self.bisect(comp.lo, comp.hi)?);
            }
        }
        Ok((zeros, boundary))
    }

    fn bisect(&self, lo: f64, hi: f64) -> Result<f64> {
        let err = Error::Bracketing { lo, hi };
        let (mut a, mut b) = (lo, hi);
        if a == f64::NEG_INFINITY {
            let mut d = 1f64.max(b.abs());
            a = b - d;
            while self.real_value(a) >= 0.0 {
                d *= 2.0;
                a = b - d;
                if !d.is_finite() || d > 1e300 {
                    return Err(err);
                }
            }
        }
        if b == f64::INFINITY {
            let mut d = 1f64.max(a.abs());
            b = a + d;
            while self.real_value(b) <= 0.0 {
                d *= 2.0;
                b = a + d;
                if !d.is_finite() || d > 1e300 {
                    return Err(err);
                }
            }
        }
        for _ in 0..2000 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let v = self.real_value(mid);
            if v.is_nan() {
                // a pole of the source function, i.e. a removable zero here
                return Ok(mid);
            }
            if v < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }
}

#[derive(Debug, Clone, Copy)]
struct Component {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    edge_lo: Option<f64>,
    edge_hi: Option<f64>,
}

fn push_once(v: &mut Vec<f64>, x: f64) {
    if !v.contains(&x) {
        v.push(x);
    }
}

/// Evaluates `r(z)`; errors on the support.
pub fn stieltjes_eval(r: &StieltjesFunction, z: Complex64) -> Result<Complex64> {
    r.eval(z)
}

/// Result of the tau-transform: `-1/r` as a Stieltjes function plus the band
/// edges where `r` vanished (no mass is emitted there).
#[derive(Debug, Clone)]
pub struct TauTransform {
    pub function: StieltjesFunction,
    pub boundary_zeros: Vec<f64>,
}

impl TauTransform {
    pub fn measure(&self) -> &SpectralMeasure {
        &self.function.measure
    }
}

/// `-1/r = -1/c + int d sigma_tau / (x - z)`: masses `1/r'` at the real zeros of
/// `r`, density `Im(-1/r(x + i0)) / pi` on `E`.
pub fn tau_transform_measure(r: &StieltjesFunction) -> Result<TauTransform> {
    let (zeros, boundary) = r.real_zeros()?;
    let mut masses = Vec::with_capacity(zeros.len());
    for &x in &zeros {
        let d = r.derivative(x);
        if !(d > 0.0) {
            return Err(Error::DegenerateGeometry(format!("nonpositive derivative {d} at zero {x}")));
        }
        masses.push((x, 1.0 / d));
    }
    let bands = r.measure.bands.clone();
    let weight = match &bands {
        None => Weight::Zero,
        Some(_) => {
            let exponents = r
                .measure
                .edge_exponents()
                .iter()
                .zip(r.measure.bands.as_ref().unwrap().bands())
                .map(|(&(el, er), &(l, rr))| {
                    let flip = |e: f64, x: f64| {
                        if e < 0.0 || !boundary.contains(&x) { 0.5 } else { -0.5 }
                    };
                    (flip(el, l), flip(er, rr))
                })
                .collect();
            Weight::Transformed { source: Arc::new(r.clone()), exponents }
        }
    };
    let measure = SpectralMeasure::new(bands, weight, masses)?;
    let function = StieltjesFunction {
        measure,
        constant: -1.0 / r.constant,
        quadrature_order: r.quadrature_order,
    };
    Ok(TauTransform { function, boundary_zeros: boundary })
}

/// `|sum sigma_l + (1/pi) int_E Im r(x + i0) dx - total mass|`.
pub fn mass_balance_residual(r: &StieltjesFunction) -> f64 {
    let m = &r.measure;
    let point: f64 = m.masses.iter().map(|x| x.1).sum();
    let ac = m.bands.as_ref().map_or(0.0, |set| {
        let rule = GaussLegendre::new(r.quadrature_order);
        set.bands()
            .iter()
            .map(|&(l, rr)| {
                let (mid, hw) = (0.5 * (l + rr), 0.5 * (rr - l));
                rule.integrate(0.0, PI, |th| {
                    let x = mid + hw * th.cos();
                    hw * th.sin() * r.boundary_value(x).im
                }) / PI
            })
            .sum()
    });
    (point + ac - m.total_mass()).abs()
}

/// Phase `f` of the exponential representation `r(z) = exp((1/pi) int f(x)/(x - z) dx)`:
/// `f = arg r(x + i0)` on `E`, `pi` where `r < 0` off `E`, zero elsewhere.
#[derive(Debug, Clone)]
pub struct PhaseFunction {
    r: StieltjesFunction,
    /// Intervals off `E` where the phase is `pi`.
    pub negative_intervals: Vec<(f64, f64)>,
}

pub fn exp_representation(r: &StieltjesFunction) -> Result<PhaseFunction> {
    if r.constant != 1.0 {
        return Err(Error::Unsupported("exponential representation needs r(inf) = 1".into()));
    }
    let (zeros, _) = r.real_zeros()?;
    let mut negative = Vec::new();
    for comp in r.components() {
        if comp.f_lo < 0.0 && !(comp.f_lo.abs() < BOUNDARY_ZERO_TOL && comp.edge_lo.is_some()) {
            let end = zeros.iter().copied().find(|&z| z > comp.lo && z < comp.hi).unwrap_or(comp.hi);
            negative.push((comp.lo, end));
        }
    }
    Ok(PhaseFunction { r: r.clone(), negative_intervals: negative })
}

impl PhaseFunction {
    pub fn value(&self, x: f64) -> f64 {
        if self.r.measure.bands.as_ref().is_some_and(|b| b.contains(x)) {
            return self.r.boundary_value(x).arg().clamp(0.0, PI);
        }
        if self.negative_intervals.iter().any(|&(a, b)| x > a && x < b) { PI } else { 0.0 }
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.value(x)).collect()
    }

    /// `exp((1/pi) int f(x) / (x - z) dx)` for `z` off the real line or off the
    /// closure of the phase support.
    pub fn exp_eval(&self, z: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for &(a, b) in &self.negative_intervals {
            s += ((b - z) / (a - z)).ln();
        }
        if let Some(set) = &self.r.measure.bands {
            let rule = GradedRule::new(24, 24);
            for &(l, rr) in set.bands() {
                let (mid, hw) = (0.5 * (l + rr), 0.5 * (rr - l));
                s += rule.integrate_complex(|u| {
                    let th = PI * u;
                    let x = mid + hw * th.cos();
                    let f = self.r.boundary_value(x).arg().clamp(0.0, PI);
                    hw * th.sin() * f / (x - z)
                });
            }
        }
        s.exp()
    }
}

/// `int_E log w(x) d mu_E(x)`; `-inf` when the density vanishes on a set of positive measure.
pub fn szego_integral(measure: &SpectralMeasure, eq: &EquilibriumData) -> f64 {
    let mut vanishing = false;
    let v = eq.integrate(|x| {
        let w = measure.density(x);
        if w > 0.0 {
            w.ln()
        } else {
            vanishing = true;
            0.0
        }
    });
    if vanishing { f64::NEG_INFINITY } else { v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn unit() -> IntervalSet {
        IntervalSet::interval(-2.0, 2.0).unwrap()
    }

    fn semicircle() -> SpectralMeasure {
        build_measure(&unit(), &WeightSpec::Semicircle {}, &[]).unwrap()
    }

    fn arcsine() -> SpectralMeasure {
        build_measure(&unit(), &WeightSpec::Arcsine {}, &[]).unwrap()
    }

    #[test]
    fn masses_and_normalization() {
        assert_abs_diff_eq!(semicircle().total_mass(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(arcsine().total_mass(), 1.0, epsilon = 1e-14);
        let m = build_measure(&unit(), &WeightSpec::Semicircle {}, &[(3.0, 0.1)]).unwrap();
        assert_abs_diff_eq!(m.total_mass(), 1.1, epsilon = 1e-14);
        assert_abs_diff_eq!(semicircle().density(0.0), 1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(arcsine().density(1.0), 1.0 / (PI * 3f64.sqrt()), epsilon = 1e-15);
    }

    #[test]
    fn validation_errors() {
        let e = build_measure(&unit(), &WeightSpec::Semicircle {}, &[(1.0, 0.1)]).unwrap_err();
        assert_eq!(e, Error::MassOnSupport(1.0));
        assert!(e.to_string().contains("mass point on support"));
        assert!(matches!(
            build_measure(&unit(), &WeightSpec::Semicircle {}, &[(3.0, -0.1)]),
            Err(Error::NonPositiveMass { .. })
        ));
        assert!(matches!(
            build_measure(&unit(), &WeightSpec::Semicircle {}, &[(3.0, 0.1), (3.0, 0.2)]),
            Err(Error::DuplicatePoint(_))
        ));
        let two = IntervalSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap();
        assert!(matches!(make_sigma0(&two, &[0.5], &[0.2]), Err(Error::NonInterlacing(_))));
        assert!(matches!(make_sigma0(&two, &[-3.0], &[0.0]), Err(Error::NonInterlacing(_))));
    }

    #[test]
    fn stieltjes_closed_forms() {
        let r = StieltjesFunction::new(SpectralMeasure::point_masses(&[(0.0, 1.0)]).unwrap());
        assert_abs_diff_eq!(r.eval(c(2.0)).unwrap().re, 0.5, epsilon = 1e-15);
        let r = StieltjesFunction::new(semicircle());
        assert_abs_diff_eq!(r.eval(c(3.0)).unwrap().re, 1.0 + (-3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        let r = StieltjesFunction::new(arcsine());
        assert_abs_diff_eq!(r.eval(c(3.0)).unwrap().re, 1.0 - 1.0 / 5f64.sqrt(), epsilon = 1e-14);
        assert!(r.eval(c(1.0)).is_err());
    }

    #[test]
    fn polynomial_weight_transform_matches_quadrature() {
        let spec = WeightSpec::GeneralizedJacobi {
            bands: vec![JacobiBandSpec { left: 0.5, right: -0.5, h: vec![2.0, 0.5, 0.3], mass: Some(1.0) }],
        };
        let m = build_measure(&IntervalSet::interval(-1.0, 3.0).unwrap(), &spec, &[]).unwrap();
        let r = StieltjesFunction::new(m.clone());
        for z in [Complex64::new(0.5, 0.3), Complex64::new(3.5, 0.0), Complex64::new(10.0, -4.0), Complex64::new(2.9, 0.01)] {
            let direct: Complex64 = m.ac_nodes(4000).iter().map(|&(x, w)| w / (x - z)).sum::<Complex64>() + 1.0;
            assert!((r.eval(z).unwrap() - direct).norm() < 1e-8, "{z}");
        }
        assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn tau_of_point_mass() {
        let r = StieltjesFunction::new(SpectralMeasure::point_masses(&[(0.0, 1.0)]).unwrap());
        let t = tau_transform_measure(&r).unwrap();
        assert_eq!(t.measure().masses().len(), 1);
        let (x, m) = t.measure().masses()[0];
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-12);
        assert_eq!(t.function.constant, -1.0);
        let back = tau_transform_measure(&t.function).unwrap();
        assert_abs_diff_eq!(back.measure().masses()[0].0, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(back.measure().masses()[0].1, 1.0, epsilon = 1e-12);
        assert_eq!(back.function.constant, 1.0);
    }

    #[test]
    fn tau_of_semicircle_has_boundary_zero() {
        let r = StieltjesFunction::new(semicircle());
        let t = tau_transform_measure(&r).unwrap();
        assert!(t.measure().masses().is_empty());
        assert_eq!(t.boundary_zeros, vec![2.0]);
        assert_eq!(t.measure().edge_exponents(), vec![(0.5, -0.5)]);
        for x in [-1.5, 0.0, 1.2] {
            let expect = (-1.0 / r.boundary_value(x)).im / PI;
            assert_abs_diff_eq!(t.measure().density(x), expect, epsilon = 1e-15);
        }
        assert!(mass_balance_residual(&t.function) < 1e-8);
    }

    #[test]
    fn tau_round_trip_with_masses() {
        let two = IntervalSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap();
        let m = build_measure(&two, &WeightSpec::Arcsine {}, &[(0.3, 0.2), (-3.0, 0.05), (2.5, 0.1)]).unwrap();
        let r = StieltjesFunction::new(m.clone());
        let t = tau_transform_measure(&r).unwrap();
        let back = tau_transform_measure(&t.function).unwrap();
        assert_eq!(back.measure().masses().len(), 3);
        for (a, b) in back.measure().masses().iter().zip(m.masses()) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-9);
        }
        for x in [-1.7, -1.01, 1.5, 1.99] {
            let (u, v) = (back.measure().density(x), m.density(x));
            assert!((u - v).abs() <= 1e-8 * v, "{x}: {u} vs {v}");
        }
    }

    #[test]
    fn sigma0_on_interval() {
        let m = make_sigma0(&unit(), &[], &[]).unwrap();
        assert_abs_diff_eq!(m.total_mass(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.density(0.5), (1.5f64 / 2.5).sqrt() / PI, epsilon = 1e-15);
        let r = StieltjesFunction::new(m);
        assert!(mass_balance_residual(&r) < 1e-8);
        let z = c(1e6);
        assert_abs_diff_eq!((z * (1.0 - r.eval(z).unwrap())).re, 2.0, epsilon = 1e-5);
        let phase = exp_representation(&r).unwrap();
        for x in [-1.9, 0.0, 1.9] {
            assert_abs_diff_eq!(phase.value(x), PI / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sigma0_masses_balance() {
        let two = IntervalSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap();
        let m = make_sigma0(&two, &[-0.5, 2.5], &[0.25, 3.0]).unwrap();
        assert_eq!(m.masses().len(), 2);
        let r = StieltjesFunction::new(m);
        assert!(r.eval(Complex64::new(0.0, 1e-9)).unwrap().im > 0.0);
        assert!(mass_balance_residual(&r) < 1e-8);
        let (zeros, boundary) = r.real_zeros().unwrap();
        assert_eq!(zeros.len(), 2);
        assert_abs_diff_eq!(zeros[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(zeros[1], 3.0, epsilon = 1e-12);
        assert_eq!(boundary, vec![-1.0, 2.0]);
    }

    #[test]
    fn exp_representation_point_mass() {
        let r = StieltjesFunction::new(SpectralMeasure::point_masses(&[(0.0, 1.0)]).unwrap());
        let f = exp_representation(&r).unwrap();
        assert_eq!(f.negative_intervals.len(), 1);
        assert_abs_diff_eq!(f.negative_intervals[0].1, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.exp_eval(c(2.0)).re, 0.5, epsilon = 1e-14);
        assert_eq!(f.sample(&[0.5, 1.5]), vec![PI, 0.0]);
    }

    #[test]
    fn exp_representation_semicircle() {
        let r = StieltjesFunction::new(semicircle());
        let f = exp_representation(&r).unwrap();
        let z = Complex64::new(1.0, 2.0);
        let a = f.exp_eval(z);
        let b = r.eval(z).unwrap();
        assert!((a - b).norm() / b.norm() < 1e-6);
    }

    #[test]
    fn szego_integrals() {
        let eq = equilibrium_auto(&unit()).unwrap();
        assert_abs_diff_eq!(szego_integral(&semicircle(), &eq), -(2.0 * PI).ln(), epsilon = 1e-8);
        assert_abs_diff_eq!(szego_integral(&arcsine(), &eq), -PI.ln(), epsilon = 1e-8);
        let point = SpectralMeasure::point_masses(&[(3.0, 1.0)]).unwrap();
        assert_eq!(szego_integral(&point, &eq), f64::NEG_INFINITY);
    }

    #[test]
    fn weight_spec_json() {
        let w: WeightSpec = serde_json::from_str(r#"{"kind":"sigma0","x":[-0.5],"xtau":[0.25]}"#).unwrap();
        assert_eq!(w, WeightSpec::Sigma0 { x: vec![-0.5], xtau: vec![0.25] });
        let w: WeightSpec = serde_json::from_str(r#"{"kind":"semicircle"}"#).unwrap();
        assert_eq!(w.name(), "semicircle");
        assert!(serde_json::from_str::<WeightSpec>(r#"{"kind":"table"}"#).is_err());
        assert!(serde_json::from_str::<WeightSpec>(r#"{"kind":"arcsine","extra":1}"#).is_err());
        let m: MeasureSpec = serde_json::from_str(r#"{"weight":{"kind":"arcsine"},"masses":[[3,0.1]]}"#).unwrap();
        assert_eq!(m.masses, vec![[3.0, 0.1]]);
    }
}
