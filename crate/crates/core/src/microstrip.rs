//! Inverse-microstrip line parameters: Hammerstad-Jensen baseline plus
//! superconducting kinetic inductance and conductor/dielectric loss.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

use crate::constants::{C_LIGHT, ETA_0};
use crate::error::{Error, Result};
use crate::materials::{penetration_depth, surface_inductance_thin_film, SurfaceImpedance};

/// Cross-section of the inverse microstrip (SI units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Strip width w [m].
    pub width: f64,
    /// Dielectric thickness h [m].
    pub dielectric_h: f64,
    /// Strip thickness t_s [m].
    pub strip_t: f64,
    /// Ground-plane thickness t_g [m].
    pub ground_t: f64,
    pub eps_sub: f64,
    pub eps_super: f64,
    pub tand_sub: f64,
    pub tand_super: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            width: 340e-9,
            dielectric_h: 100e-9,
            strip_t: 35e-9,
            ground_t: 350e-9,
            eps_sub: 10.3,
            eps_super: 11.4,
            tand_sub: 1e-5,
            tand_super: 0.03,
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "microstrip::Geometry";
        for (name, v) in [
            ("width", self.width),
            ("dielectric_h", self.dielectric_h),
            ("strip_t", self.strip_t),
            ("ground_t", self.ground_t),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(OP, format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("eps_sub", self.eps_sub), ("eps_super", self.eps_super)] {
            if !(v.is_finite() && v >= 1.0) {
                return Err(Error::domain(OP, format!("{name} must be >= 1, got {v}")));
            }
        }
        for (name, v) in [("tand_sub", self.tand_sub), ("tand_super", self.tand_super)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(OP, format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Normalized width u = w / h.
    pub fn u(&self) -> f64 {
        self.width / self.dielectric_h
    }
}

/// Hammerstad-Jensen baseline for a single dielectric of permittivity eps_sub.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baseline {
    pub eps_eff0: f64,
    pub z0_base: f64,
    /// Thickness-corrected normalized width u_r.
    pub u_r: f64,
    /// Geometric inductance per length [H/m].
    pub l_geom: f64,
    /// Capacitance per length [F/m].
    pub c: f64,
}

/// Field filling factors and the mixed effective permittivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DielectricFill {
    pub q_sub: f64,
    pub q_super: f64,
    pub eps_eff_mixed: f64,
}

/// Distributed RLGC parameters with derived Z0 and gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub r_per_m: f64,
    pub l_per_m: f64,
    pub g_per_m: f64,
    pub c_per_m: f64,
    pub z0: Complex64,
    /// gamma = alpha + j beta [1/m].
    pub gamma: Complex64,
    pub eps_eff0: f64,
    pub eps_eff_mixed: f64,
}

impl LineParams {
    /// Lossless line with the given real impedance and phase constant.
    pub fn lossless(z0: f64, beta: f64, frequency: f64) -> Self {
        let omega = 2.0 * PI * frequency;
        LineParams {
            r_per_m: 0.0,
            l_per_m: z0 * beta / omega,
            g_per_m: 0.0,
            c_per_m: beta / (omega * z0),
            z0: Complex64::new(z0, 0.0),
            gamma: Complex64::new(0.0, beta),
            eps_eff0: 1.0,
            eps_eff_mixed: 1.0,
        }
    }

    /// Phase velocity omega / beta [m/s].
    pub fn phase_velocity(&self, frequency: f64) -> f64 {
        2.0 * PI * frequency / self.gamma.im
    }
}

/// Hammerstad-Jensen effective permittivity, impedance and the L', C'
/// extraction. The superstrate is ignored here; see [`mixed_eps_and_fill`].
pub fn hj_baseline(geom: &Geometry) -> Baseline {
    let u = geom.u();
    let er = geom.eps_sub;
    let t_h = geom.strip_t / geom.dielectric_h;

    let coth = 1.0 / (6.517 * u).sqrt().tanh();
    let du1 = if t_h > 0.0 {
        t_h / PI * (1.0 + 4.0 * E / (t_h * coth * coth)).ln()
    } else {
        0.0
    };
    let dur = 0.5 * (1.0 + 1.0 / (er - 1.0).sqrt().cosh()) * du1;
    let ur = u + dur;

    let a = 1.0
        + ((ur.powi(4) + (ur / 52.0).powi(2)) / (ur.powi(4) + 0.432)).ln() / 49.0
        + (1.0 + (ur / 18.1).powi(3)).ln() / 18.7;
    let b = 0.564 * ((er - 0.9) / (er + 3.0)).powf(0.053);
    let eps_eff0 = 0.5 * (er + 1.0) + 0.5 * (er - 1.0) * (1.0 + 10.0 / ur).powf(-a * b);

    let fu = 6.0 + (2.0 * PI - 6.0) * (-(30.666 / ur).powf(0.7528)).exp();
    let z0_base =
        ETA_0 / (2.0 * PI * eps_eff0.sqrt()) * (fu / ur + (1.0 + (2.0 / ur).powi(2)).sqrt()).ln();

    Baseline {
        eps_eff0,
        z0_base,
        u_r: ur,
        l_geom: z0_base * eps_eff0.sqrt() / C_LIGHT,
        c: eps_eff0.sqrt() / (z0_base * C_LIGHT),
    }
}

/// Substrate/superstrate filling factors and weighted permittivity.
pub fn mixed_eps_and_fill(geom: &Geometry) -> DielectricFill {
    let u = geom.u();
    let q_sub = 0.5
        + 0.25 * (1.0 - (0.5 * (geom.eps_sub / geom.eps_super).ln()).tanh()) * (1.0 + (u * u).ln())
            / (1.0 + 10.0 / u);
    let q_super = 1.0 - q_sub;
    DielectricFill {
        q_sub,
        q_super,
        eps_eff_mixed: geom.eps_sub * q_sub + geom.eps_super * q_super,
    }
}

/// Full line parameters at `frequency` given the strip and ground surface
/// impedances.
///
/// L' adds the thin-film surface inductances of both films (the strip term
/// scaled by `alpha_ki`), each spread over the strip width. Conductor and
/// dielectric attenuation are turned into R' and G' with the real baseline
/// impedance; Z0 and gamma then follow from RLGC so that gamma Z0 = R' + j w L'.
pub fn line_params(
    geom: &Geometry,
    zs_strip: &SurfaceImpedance,
    zs_ground: &SurfaceImpedance,
    alpha_ki: f64,
    frequency: f64,
) -> Result<LineParams> {
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::domain(
            "microstrip::line_params",
            format!("frequency must be > 0, got {frequency}"),
        ));
    }
    let base = hj_baseline(geom);
    let fill = mixed_eps_and_fill(geom);
    let omega = 2.0 * PI * frequency;
    let w = geom.width;

    let l_strip =
        surface_inductance_thin_film(penetration_depth(zs_strip, frequency), geom.strip_t);
    let l_ground =
        surface_inductance_thin_film(penetration_depth(zs_ground, frequency), geom.ground_t);
    let l_total = base.l_geom + l_strip * alpha_ki / w + l_ground / w;

    let sqrt_eps = fill.eps_eff_mixed.sqrt();
    let alpha_d = PI * frequency / C_LIGHT
        * sqrt_eps
        * (fill.q_sub * geom.tand_sub + fill.q_super * geom.tand_super);
    let alpha_c = (zs_strip.rs / w + zs_ground.rs / w) / base.z0_base * sqrt_eps;

    let r = alpha_c * base.z0_base;
    let g = 2.0 * alpha_d / base.z0_base;

    let series = Complex64::new(r, omega * l_total);
    let shunt = Complex64::new(g, omega * base.c);
    Ok(LineParams {
        r_per_m: r,
        l_per_m: l_total,
        g_per_m: g,
        c_per_m: base.c,
        z0: (series / shunt).sqrt(),
        gamma: (series * shunt).sqrt(),
        eps_eff0: base.eps_eff0,
        eps_eff_mixed: fill.eps_eff_mixed,
    })
}
