//! Compact real sets given as finitely many disjoint closed bands.
//!
//! A set `E = [b0, a0] \ U (a_j, b_j)` is stored as its ordered bands. Cantor
//! truncations are produced by [`make_cantor`], polynomial preimages of an
//! interval by [`polynomial_preimage`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance below which touching bands are merged.
const MERGE_TOL: f64 = 1e-14;

/// A finite union of disjoint closed intervals, ordered left to right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSet {
    bands: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Validates and normalizes a list of bands.
    ///
    /// Bands are sorted; bands separated by less than `1e-14 * diam` are merged.
    /// Overlapping or empty bands are rejected.
    pub fn new(mut bands: Vec<(f64, f64)>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::InvalidSet("at least one band is required".into()));
        }
        for &(l, r) in &bands {
            if !(l.is_finite() && r.is_finite()) {
                return Err(Error::InvalidSet(format!("non-finite band [{l}, {r}]")));
            }
            if l >= r {
                return Err(Error::InvalidSet(format!("band [{l}, {r}] has nonpositive length")));
            }
        }
        bands.sort_by(|a, b| a.0.total_cmp(&b.0));
        let hi = bands.iter().map(|b| b.1).fold(f64::MIN, f64::max);
        let diam = hi - bands[0].0;
        let tol = MERGE_TOL * diam;
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(bands.len());
        for (l, r) in bands {
            if let Some(last) = merged.last_mut() {
                if l < last.1 - tol {
                    return Err(Error::InvalidSet(format!(
                        "bands [{}, {}] and [{l}, {r}] overlap",
                        last.0, last.1
                    )));
                }
                if l - last.1 <= tol {
                    last.1 = last.1.max(r);
                    continue;
                }
            }
            merged.push((l, r));
        }
        Ok(Self { bands: merged })
    }

    /// The single band `[left, right]`.
    pub fn interval(left: f64, right: f64) -> Result<Self> {
        Self::new(vec![(left, right)])
    }

    pub fn bands(&self) -> &[(f64, f64)] {
        &self.bands
    }

    pub fn num_bands(&self) -> usize {
        self.bands.len()
    }

    /// Number of bounded gaps, the genus `g`.
    pub fn num_gaps(&self) -> usize {
        self.bands.len() - 1
    }

    /// Bounding interval `[b0, a0]`.
    pub fn bounding(&self) -> (f64, f64) {
        (self.bands[0].0, self.bands[self.bands.len() - 1].1)
    }

    pub fn diam(&self) -> f64 {
        let (l, r) = self.bounding();
        r - l
    }

    pub fn midpoint(&self) -> f64 {
        let (l, r) = self.bounding();
        0.5 * (l + r)
    }

    /// Bounded open components of `[b0, a0] \ E`, left to right.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.bands.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    /// All band endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<f64> {
        self.bands.iter().flat_map(|&(l, r)| [l, r]).collect()
    }

    /// Sum of band lengths.
    pub fn total_length(&self) -> f64 {
        self.bands.iter().map(|(l, r)| r - l).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.bands.iter().any(|&(l, r)| l <= x && x <= r)
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: f64) -> f64 {
        self.bands
            .iter()
            .map(|&(l, r)| if x < l { l - x } else if x > r { x - r } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    /// Where a real point sits relative to the set.
    pub fn locate(&self, x: f64) -> Location {
        let (lo, hi) = self.bounding();
        if x < lo {
            return Location::Left;
        }
        if x > hi {
            return Location::Right;
        }
        for (i, &(l, r)) in self.bands.iter().enumerate() {
            if l <= x && x <= r {
                return Location::Band(i);
            }
            if x < l {
                return Location::Gap(i);
            }
        }
        Location::Right
    }

    /// Image under `x -> scale * x + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!("affine scale {scale}")));
        }
        let bands = self
            .bands
            .iter()
            .map(|&(l, r)| {
                let (a, b) = (scale * l + shift, scale * r + shift);
                if a < b { (a, b) } else { (b, a) }
            })
            .collect();
        Self::new(bands)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SetSpec::deserialize(d)?;
        raw.build().map_err(serde::de::Error::custom)
    }
}

/// Position of a real point relative to an [`IntervalSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Left,
    Right,
    /// Inside band `i`.
    Band(usize),
    /// Inside the gap left of band `i` (so `i >= 1`).
    Gap(usize),
}

/// Parameters of a Cantor construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    pub l0: f64,
    pub kappas: Vec<f64>,
    #[serde(default)]
    pub origin: f64,
}

impl CantorSpec {
    pub fn new(l0: f64, kappas: Vec<f64>, origin: f64) -> Result<Self> {
        let spec = Self { l0, kappas, origin };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.l0 > 0.0 && self.l0.is_finite()) {
            return Err(Error::InvalidArgument(format!("l0 = {} must be positive", self.l0)));
        }
        if let Some(k) = self.kappas.iter().find(|&&k| !(k > 0.0 && k < 1.0)) {
            return Err(Error::InvalidArgument(format!("removal fraction {k} outside (0, 1)")));
        }
        Ok(())
    }

    /// Band length after `n` steps, `l_n = (1 - kappa_n) l_{n-1} / 2`.
    pub fn band_length(&self, n: usize) -> f64 {
        self.kappas[..n].iter().fold(self.l0, |l, k| 0.5 * (1.0 - k) * l)
    }

    /// `l0 * prod_{j <= n} (1 - kappa_j)`.
    pub fn length_at(&self, n: usize) -> f64 {
        self.kappas[..n].iter().fold(self.l0, |l, k| l * (1.0 - k))
    }
}

/// Generation `generation` of the Cantor construction: `2^generation` bands.
pub fn make_cantor(spec: &CantorSpec, generation: usize) -> Result<IntervalSet> {
    spec.validate()?;
    if generation > spec.kappas.len() {
        return Err(Error::InsufficientDepth { requested: generation, available: spec.kappas.len() });
    }
    let mut bands = vec![(spec.origin, spec.origin + spec.l0)];
    for &kappa in &spec.kappas[..generation] {
        let mut next = Vec::with_capacity(2 * bands.len());
        for (a, b) in bands {
            let child = 0.5 * (1.0 - kappa) * (b - a);
            next.push((a, a + child));
            next.push((b - child, b));
        }
        bands = next;
    }
    IntervalSet::new(bands)
}

/// JSON form of a set: explicit bands or a Cantor truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SetSpec {
    Bands { bands: Vec<[f64; 2]> },
    Cantor { cantor: CantorJson },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorJson {
    pub l0: f64,
    #[serde(default)]
    pub origin: f64,
    pub kappas: Vec<f64>,
    pub generation: usize,
}

impl SetSpec {
    pub fn build(&self) -> Result<IntervalSet> {
        match self {
            SetSpec::Bands { bands } => IntervalSet::new(bands.iter().map(|b| (b[0], b[1])).collect()),
            SetSpec::Cantor { cantor } => {
                let spec = CantorSpec::new(cantor.l0, cantor.kappas.clone(), cantor.origin)?;
                make_cantor(&spec, cantor.generation)
            }
        }
    }

    pub fn from_set(set: &IntervalSet) -> Self {
        SetSpec::Bands { bands: set.bands().iter().map(|&(l, r)| [l, r]).collect() }
    }
}

/// `|(x - rho, x + rho) ∩ E| / rho`, exact for a finite band union.
pub fn local_density(set: &IntervalSet, x: f64, rho: f64) -> f64 {
    // offsets relative to x keep edge-centred windows exact
    let covered: f64 = set
        .bands()
        .iter()
        .map(|&(l, r)| ((r - x).min(rho) - (l - x).max(-rho)).max(0.0))
        .sum();
    covered / rho
}

/// Sample points for the homogeneity estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub xs: Vec<f64>,
    pub rhos: Vec<f64>,
}

/// Summary of a [`SampleGrid`] carried in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub num_x: usize,
    pub num_rho: usize,
    pub rho_min: f64,
    pub rho_max: f64,
}

impl SampleGrid {
    /// Band endpoints and midpoints for `x`; `rho` log-spaced from `diam 2^-20`
    /// to `diam`, `per_octave` samples per doubling.
    pub fn default_for(set: &IntervalSet) -> Self {
        Self::with_density(set, 4)
    }

    pub fn with_density(set: &IntervalSet, per_octave: usize) -> Self {
        let mut xs = Vec::with_capacity(3 * set.num_bands());
        for &(l, r) in set.bands() {
            xs.extend([l, 0.5 * (l + r), r]);
        }
        let diam = set.diam();
        let steps = 20 * per_octave;
        let rhos = (0..=steps)
            .map(|k| diam * 2f64.powf(-20.0 + k as f64 / per_octave as f64))
            .collect();
        Self { xs, rhos }
    }

    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor {
            num_x: self.xs.len(),
            num_rho: self.rhos.len(),
            rho_min: self.rhos.iter().copied().fold(f64::INFINITY, f64::min),
            rho_max: self.rhos.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Grid minimum of [`local_density`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub eta_estimate: f64,
    pub worst_x: f64,
    pub worst_rho: f64,
    pub sample_grid: GridDescriptor,
}

pub fn homogeneity_eta(set: &IntervalSet, grid: &SampleGrid) -> Result<HomogeneityReport> {
    if grid.xs.is_empty() || grid.rhos.is_empty() {
        return Err(Error::InvalidArgument("empty homogeneity grid".into()));
    }
    let mut best = (f64::INFINITY, f64::NAN, f64::NAN);
    for &x in &grid.xs {
        for &rho in &grid.rhos {
            let d = local_density(set, x, rho);
            if d < best.0 {
                best = (d, x, rho);
            }
        }
    }
    Ok(HomogeneityReport {
        eta_estimate: best.0,
        worst_x: best.1,
        worst_rho: best.2,
        sample_grid: grid.descriptor(),
    })
}

/// `sup_j sum_{k != j} sqrt(l_j l_k) / rho_{j,k}` with the outer gap `l_0 = 1`
/// at distance `min(a_j - b0, a0 - b_j)`.
pub fn sodin_criterion(set: &IntervalSet) -> f64 {
    let gaps = set.gaps();
    let (b0, a0) = set.bounding();
    let mut sup = 0.0f64;
    for (j, &(aj, bj)) in gaps.iter().enumerate() {
        let lj = bj - aj;
        let rho0 = (aj - b0).min(a0 - bj);
        let mut sum = lj.sqrt() / rho0;
        for (k, &(ak, bk)) in gaps.iter().enumerate() {
            if k == j {
                continue;
            }
            let rho = if ak > bj { ak - bj } else { aj - bk };
            sum += (lj * (bk - ak)).sqrt() / rho;
        }
        sup = sup.max(sum);
    }
    sup
}

/// Real roots of a polynomial given by monomial coefficients (low to high).
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let coeffs = trim(coeffs);
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let bound = 1.0 + coeffs[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let deriv: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let mut knots = vec![-bound];
    knots.extend(real_roots(&deriv).into_iter().filter(|x| x.abs() < bound));
    knots.push(bound);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(&coeffs, lo), horner(&coeffs, hi));
        if flo == 0.0 {
            push_unique(&mut roots, lo);
            continue;
        }
        if flo * fhi > 0.0 {
            continue;
        }
        if fhi == 0.0 {
            continue; // picked up as the left knot of the next window
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = horner(&coeffs, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) { lo = mid } else { hi = mid }
        }
        push_unique(&mut roots, 0.5 * (lo + hi));
    }
    if horner(&coeffs, bound) == 0.0 {
        push_unique(&mut roots, bound);
    }
    roots
}

fn push_unique(roots: &mut Vec<f64>, x: f64) {
    if roots.last().is_none_or(|&r| (r - x).abs() > 1e-14 * (1.0 + x.abs())) {
        roots.push(x);
    }
}

fn trim(coeffs: &[f64]) -> Vec<f64> {
    let mut v = coeffs.to_vec();
    while v.len() > 1 && *v.last().unwrap() == 0.0 {
        v.pop();
    }
    v
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `{x : lo <= T(x) <= hi}` for a real polynomial `T` (monomial coefficients, low to high).
pub fn polynomial_preimage(coeffs: &[f64], lo: f64, hi: f64) -> Result<IntervalSet> {
    let coeffs = trim(coeffs);
    if coeffs.len() < 2 {
        return Err(Error::InvalidArgument("preimage needs a nonconstant polynomial".into()));
    }
    let shifted = |c: f64| {
        let mut v = coeffs.clone();
        v[0] -= c;
        v
    };
    let mut pts = real_roots(&shifted(lo));
    pts.extend(real_roots(&shifted(hi)));
    pts.sort_by(f64::total_cmp);
    let mut bands: Vec<(f64, f64)> = Vec::new();
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let t = horner(&coeffs, mid);
        if t >= lo && t <= hi && w[1] > w[0] {
            match bands.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => bands.push((w[0], w[1])),
            }
        }
    }
    IntervalSet::new(bands)
}
