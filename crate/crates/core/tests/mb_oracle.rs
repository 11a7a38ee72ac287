//! Mattis-Bardeen quadrature against a dense fixed-grid trapezoid rule.
//!
//! The oracle uses different substitutions from the library: E = 1 + s^2 for
//! sigma1, and a split of the finite sigma2 interval with E = 1 - w + s^2 and
//! E = 1 - s^2 on each half. Both make the integrands smooth so that the
//! trapezoid rule converges.

use kitwpa_core::materials::{mb_conductivity, mb_conductivity_with, MbMethod};

const POINTS: usize = 1_000_000;

fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for i in 1..n {
        sum += f(a + h * i as f64);
    }
    sum * h
}

fn fermi(x: f64, t: f64) -> f64 {
    1.0 / ((x / t).exp() + 1.0)
}

fn oracle_sigma1(w: f64, t: f64) -> f64 {
    let e_max = 1.0 + (30.0 * t).max(10.0 * w);
    let g = |s: f64| {
        let e = 1.0 + s * s;
        let ew = e + w;
        // dE / sqrt(E^2 - 1) = 2 ds / sqrt(2 + s^2)
        2.0 * (fermi(e, t) - fermi(ew, t)) * (e * ew + 1.0)
            / ((2.0 + s * s).sqrt() * (ew * ew - 1.0).sqrt())
    };
    2.0 / w * trapezoid(g, 0.0, (e_max - 1.0).sqrt(), POINTS)
}

fn oracle_sigma2(w: f64, t: f64) -> f64 {
    let pair = |ew: f64| 1.0 - 2.0 * fermi(ew, t);
    let half = (0.5 * w).sqrt();
    // Lower half: E = 1 - w + s^2, so sqrt(E + w - 1) = s.
    let lower = |s: f64| {
        let e = 1.0 - w + s * s;
        let ew = e + w;
        2.0 * pair(ew) * (e * ew + 1.0) / ((1.0 - e * e).sqrt() * (ew + 1.0).sqrt())
    };
    // Upper half: E = 1 - s^2, so sqrt(1 - E) = s.
    let upper = |s: f64| {
        let e = 1.0 - s * s;
        let ew = e + w;
        2.0 * pair(ew) * (e * ew + 1.0) / ((1.0 + e).sqrt() * (ew * ew - 1.0).sqrt())
    };
    (trapezoid(lower, 0.0, half, POINTS / 2) + trapezoid(upper, 0.0, half, POINTS / 2)) / w
}

const OMEGAS: [f64; 4] = [0.01, 0.05, 0.1, 0.5];
const TEMPS: [f64; 4] = [0.05, 0.2, 0.5, 0.9];

#[test]
fn quadrature_matches_fixed_grid_oracle() {
    for &w in &OMEGAS {
        for &t in &TEMPS {
            let mb = mb_conductivity(w, t).unwrap();
            let s1 = oracle_sigma1(w, t);
            let s2 = oracle_sigma2(w, t);
            let e1 = (mb.sigma1_over_sn / s1 - 1.0).abs();
            let e2 = (mb.sigma2_over_sn / s2 - 1.0).abs();
            assert!(
                e1 < 1e-3,
                "sigma1 w={w} t={t}: {} vs {s1}",
                mb.sigma1_over_sn
            );
            assert!(
                e2 < 1e-3,
                "sigma2 w={w} t={t}: {} vs {s2}",
                mb.sigma2_over_sn
            );
        }
    }
}

#[test]
fn low_temperature_point_matches_oracle() {
    let mb = mb_conductivity(0.01, 0.005).unwrap();
    let s2 = oracle_sigma2(0.01, 0.005);
    assert!((mb.sigma2_over_sn / s2 - 1.0).abs() < 1e-3);
    assert!((mb.sigma2_over_sn / (std::f64::consts::PI / 0.01) - 1.0).abs() < 0.02);
}

#[test]
fn regularized_mode_tracks_substitution() {
    for &w in &[0.05, 0.5] {
        for &t in &[0.2, 0.9] {
            let a = mb_conductivity(w, t).unwrap();
            let b = mb_conductivity_with(w, t, MbMethod::Regularized { epsilon: 1e-12 }).unwrap();
            assert!((a.sigma1_over_sn / b.sigma1_over_sn - 1.0).abs() < 1e-3);
            assert!((a.sigma2_over_sn / b.sigma2_over_sn - 1.0).abs() < 1e-3);
        }
    }
}
