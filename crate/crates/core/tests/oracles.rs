//! Independent oracles: a Chebyshev boundary-integral solver for balayage and
//! equilibrium problems, conformal maps and polynomial preimages.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use widom_core::interval_sets::{polynomial_preimage, IntervalSet};
use widom_core::potential::{equilibrium, equilibrium_auto};

/// Measure `nu` on `E` and constant `c` with `int log|x - t| d nu(t) - c = f(x)` on `E`
/// and `nu(E) = 1`. On band `i`, `nu = sum_k a_ik T_k(s) / (pi sqrt(1 - s^2)) ds`.
struct Bem {
    bands: Vec<(f64, f64)>,
    coeffs: Vec<Vec<f64>>,
    c: f64,
    quad: usize,
}

impl Bem {
    fn solve(set: &IntervalSet, k: usize, f: impl Fn(f64) -> f64) -> Self {
        let bands = set.bands().to_vec();
        let b = bands.len();
        let quad = 400;
        let size = b * k + 1;
        let mut a = DMatrix::<f64>::zeros(size, size);
        let mut rhs = DVector::<f64>::zeros(size);
        for (i, &(l, r)) in bands.iter().enumerate() {
            let (m, h) = (0.5 * (l + r), 0.5 * (r - l));
            for row_k in 0..k {
                let s = (PI * (row_k as f64 + 0.5) / k as f64).cos();
                let x = m + h * s;
                let row = i * k + row_k;
                for (j, &(lj, rj)) in bands.iter().enumerate() {
                    for kk in 0..k {
                        let col = j * k + kk;
                        a[(row, col)] = if i == j {
                            if kk == 0 { h.ln() - 2f64.ln() } else { -(kk as f64 * s.acos()).cos() / kk as f64 }
                        } else {
                            cross(x, lj, rj, kk, quad)
                        };
                    }
                }
                a[(row, size - 1)] = -1.0;
                rhs[row] = f(x);
            }
        }
        for j in 0..b {
            a[(size - 1, j * k)] = 1.0;
        }
        rhs[size - 1] = 1.0;
        let sol = a.lu().solve(&rhs).expect("nonsingular collocation system");
        let coeffs = (0..b).map(|j| sol.rows(j * k, k).iter().copied().collect()).collect();
        Self { bands, coeffs, c: sol[size - 1], quad }
    }

    /// `int log|z - t| d nu(t)` for `z` away from `E`.
    fn potential(&self, z: Complex64) -> f64 {
        let mut s = 0.0;
        for (&(l, r), a) in self.bands.iter().zip(&self.coeffs) {
            let (m, h) = (0.5 * (l + r), 0.5 * (r - l));
            for q in 0..self.quad {
                let phi = PI * (q as f64 + 0.5) / self.quad as f64;
                let t = m + h * phi.cos();
                let dens: f64 = a.iter().enumerate().map(|(k, ak)| ak * (k as f64 * phi).cos()).sum();
                s += (z - t).norm().ln() * dens / self.quad as f64;
            }
        }
        s
    }

    fn band_mass(&self, j: usize) -> f64 {
        self.coeffs[j][0]
    }
}

/// `(1/pi) int log|x - m - h s| T_k(s) / sqrt(1 - s^2) ds` by Gauss-Chebyshev.
fn cross(x: f64, l: f64, r: f64, k: usize, quad: usize) -> f64 {
    let (m, h) = (0.5 * (l + r), 0.5 * (r - l));
    (0..quad)
        .map(|q| {
            let phi = PI * (q as f64 + 0.5) / quad as f64;
            (x - m - h * phi.cos()).abs().ln() * (k as f64 * phi).cos()
        })
        .sum::<f64>()
        / quad as f64
}

fn sets() -> Vec<IntervalSet> {
    vec![
        IntervalSet::new(vec![(-2.0, -1.0), (1.0, 2.0)]).unwrap(),
        IntervalSet::new(vec![(-3.0, -2.0), (-1.0, 0.5), (1.0, 2.5)]).unwrap(),
        IntervalSet::new(vec![(0.0, 0.3), (0.8, 2.0), (2.2, 2.4), (3.0, 5.0)]).unwrap(),
    ]
}

#[test]
fn equilibrium_matches_boundary_integral_solver() {
    for set in sets() {
        let bem = Bem::solve(&set, 24, |_| 0.0);
        let eq = equilibrium_auto(&set).unwrap();
        // Robin constant: int log|x - t| d mu = log cap on E
        assert!((eq.capacity() - bem.c.exp()).abs() < 1e-10, "{} vs {}", eq.capacity(), bem.c.exp());
        for (j, w) in eq.band_measures().iter().enumerate() {
            assert!((w - bem.band_mass(j)).abs() < 1e-10);
        }
        for z in [Complex64::new(0.7, 1.3), Complex64::new(10.0, 0.0), Complex64::new(-4.0, -0.5)] {
            let g = bem.potential(z) - bem.c;
            assert!((eq.green(z) - g).abs() < 1e-9, "{z}: {} vs {g}", eq.green(z));
        }
    }
}

#[test]
fn two_point_green_matches_balayage() {
    for set in sets() {
        let eq = equilibrium_auto(&set).unwrap();
        let (lo, hi) = set.bounding();
        let gap = set.gaps()[0];
        let poles = [
            Complex64::new(0.5 * (gap.0 + gap.1), 0.0),
            Complex64::new(0.3 * lo + 0.7 * hi, 0.8),
            Complex64::new(hi + 1.5, -0.4),
        ];
        for w in poles {
            let bem = Bem::solve(&set, 32, |x| (Complex64::new(x, 0.0) - w).norm().ln());
            for z in [Complex64::new(lo - 0.7, 0.2), Complex64::new(0.5 * (lo + hi), 2.0), Complex64::new(hi + 0.3, -1.1)] {
                let oracle = bem.potential(z) - (z - w).norm().ln() - bem.c;
                let g = eq.green_two_point(z, w).unwrap();
                assert!((g - oracle).abs() < 1e-7, "w = {w}, z = {z}: {g} vs {oracle}");
            }
        }
    }
}

#[test]
fn two_point_green_matches_mobius_image() {
    // G_E(z, w) = G_{E'}(1/(z - w)) with E' the image of E under x -> 1/(x - w)
    for set in sets() {
        let eq = equilibrium_auto(&set).unwrap();
        let (_, hi) = set.bounding();
        let gap = set.gaps()[0];
        for w in [0.4 * gap.0 + 0.6 * gap.1, hi + 0.75] {
            let image = IntervalSet::new(set.bands().iter().map(|&(l, r)| (1.0 / (r - w), 1.0 / (l - w))).collect()).unwrap();
            let eq_image = equilibrium_auto(&image).unwrap();
            for z in [Complex64::new(0.3, 0.9), Complex64::new(hi + 2.0, 0.0), Complex64::new(-1.0, -2.5)] {
                let a = eq.green_two_point(z, Complex64::new(w, 0.0)).unwrap();
                let b = eq_image.green(1.0 / (z - w));
                assert!((a - b).abs() < 1e-9, "w = {w}, z = {z}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn green_on_interval_matches_joukowski() {
    let eq = equilibrium_auto(&IntervalSet::interval(-2.0, 2.0).unwrap()).unwrap();
    for z in [Complex64::new(0.0, 1.0), Complex64::new(2.5, 0.01), Complex64::new(-7.0, 3.0)] {
        let s = (z * z - 4.0).sqrt();
        let zeta = if ((z + s) / 2.0).norm() >= 1.0 { (z + s) / 2.0 } else { (z - s) / 2.0 };
        assert!((eq.green(z) - zeta.norm().ln()).abs() < 1e-12);
    }
}

#[test]
fn polynomial_preimages_have_rational_band_measures() {
    // T monic of degree d with all critical values outside [-2, 2]:
    // cap(T^-1[-2, 2]) = 1 and band measures are multiples of 1/d
    let cases = [
        (vec![-3.0, 0.0, 1.0], 2.0, 2),
        (vec![0.0, -4.0, 0.0, 1.0], 3.0, 3),
        (vec![3.0, 0.0, -5.0, 0.0, 1.0], 4.0, 4),
    ];
    for (coeffs, d, bands) in cases {
        let set = polynomial_preimage(&coeffs, -2.0, 2.0).unwrap();
        assert_eq!(set.num_bands(), bands);
        let eq = equilibrium_auto(&set).unwrap();
        assert!((eq.capacity() - 1.0).abs() < 1e-10, "{coeffs:?}");
        for w in eq.band_measures() {
            assert!((w * d - (w * d).round()).abs() < 1e-9, "{w}");
        }
        // G_E(z) = G_[-2,2](T(z)) / d
        let unit = equilibrium_auto(&IntervalSet::interval(-2.0, 2.0).unwrap()).unwrap();
        let z = Complex64::new(0.3, 0.4);
        let tz = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
        assert!((eq.green(z) - unit.green(tz) / d).abs() < 1e-10);
    }
}

#[test]
fn fixed_order_converges_to_adaptive() {
    let set = &sets()[2];
    let a = equilibrium_auto(set).unwrap();
    let b = equilibrium(set, 512).unwrap();
    assert!((a.capacity() - b.capacity()).abs() < 1e-12);
}

