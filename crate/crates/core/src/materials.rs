//! Superconducting gap versus temperature and field, Mattis-Bardeen
//! conductivity, and the resulting surface impedance of thin films.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B, MU_0};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Thin-film superconductor parameters (SI units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Critical temperature [K].
    pub tc: f64,
    /// 2 Delta_0 / (k_B Tc).
    pub gap_ratio: f64,
    /// Normal-state conductivity [S/m].
    pub sigma_n: f64,
    /// Film thickness [m].
    pub thickness: f64,
    /// Effective out-of-plane critical field [T].
    pub bc_perp_eff: f64,
    /// Effective in-plane critical field [T].
    pub bc_par_eff: f64,
    /// Kinetic-inductance enhancement factor (1.0 if none).
    pub alpha_ki: f64,
}

impl Material {
    /// NbTiN strip film.
    pub fn nbtin() -> Self {
        Material {
            name: "NbTiN".into(),
            tc: 12.0,
            gap_ratio: 3.5,
            sigma_n: 0.56e6,
            thickness: 35e-9,
            bc_perp_eff: 13.8,
            bc_par_eff: 13.8,
            alpha_ki: 1.6,
        }
    }

    /// Nb ground-plane film.
    pub fn nb() -> Self {
        Material {
            name: "Nb".into(),
            tc: 9.15,
            gap_ratio: 3.5,
            sigma_n: 5e6,
            thickness: 350e-9,
            bc_perp_eff: 1.6,
            bc_par_eff: 1.6,
            alpha_ki: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("tc", self.tc),
            ("gap_ratio", self.gap_ratio),
            ("sigma_n", self.sigma_n),
            ("thickness", self.thickness),
            ("bc_perp_eff", self.bc_perp_eff),
            ("bc_par_eff", self.bc_par_eff),
            ("alpha_ki", self.alpha_ki),
        ];
        for (field, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(
                    "materials::Material",
                    format!("{}: {field} must be finite and > 0, got {value}", self.name),
                ));
            }
        }
        Ok(())
    }

    /// Zero-temperature, zero-field gap Delta_0 [J].
    pub fn gap_zero(&self) -> f64 {
        0.5 * self.gap_ratio * K_B * self.tc
    }
}

/// Operating point: bath temperature and applied field components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// [K]
    pub temperature: f64,
    /// Out-of-plane field [T].
    pub b_perp: f64,
    /// In-plane field [T].
    pub b_par: f64,
}

impl Environment {
    pub fn at_temperature(temperature: f64) -> Self {
        Environment {
            temperature,
            b_perp: 0.0,
            b_par: 0.0,
        }
    }

    /// Both field components nonzero: the suppression factors are multiplied,
    /// which is an extrapolation of the single-axis laws.
    pub fn is_field_extrapolation(&self) -> bool {
        self.b_perp != 0.0 && self.b_par != 0.0
    }
}

/// Which field components suppress the gap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldOrientation {
    Perp,
    Par,
    /// Product of both suppression factors.
    #[default]
    Both,
}

/// sigma / sigma_n = sigma1/sigma_n - j sigma2/sigma_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexConductivity {
    pub sigma1_over_sn: f64,
    pub sigma2_over_sn: f64,
}

/// Z_s = rs + j xs [ohm / square].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SurfaceImpedance {
    pub rs: f64,
    pub xs: f64,
}

impl SurfaceImpedance {
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.rs, self.xs)
    }
}

impl From<Complex64> for SurfaceImpedance {
    fn from(z: Complex64) -> Self {
        SurfaceImpedance { rs: z.re, xs: z.im }
    }
}

/// How the Mattis-Bardeen integrals treat their inverse-square-root endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
#[derive(Default)]
pub enum MbMethod {
    /// Change of variables that removes the endpoint singularities.
    #[default]
    Substitution,
    /// Integrate in the energy variable with `epsilon` added under each root.
    Regularized { epsilon: f64 },
}

pub const DEFAULT_REGULARIZATION: f64 = 1e-12;

/// Below this fraction of Tc the analytic T = 0 conductivity is used.
pub const ZERO_TEMPERATURE_FRACTION: f64 = 1e-4;

fn check_non_negative(op: &'static str, what: &str, value: f64) -> Result<()> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::domain(
            op,
            format!("{what} must be >= 0, got {value}"),
        ));
    }
    Ok(())
}

/// Gap Delta(T, B) [J].
///
/// Temperature enters through Delta_0 tanh(1.74 sqrt(Tc/T - 1)); fields multiply
/// by (1 - B_perp/Bc_perp) and/or sqrt(1 - (B_par/Bc_par)^2). Returns 0 at or
/// above Tc and at or above the effective critical field.
pub fn gap(material: &Material, env: &Environment, orientation: FieldOrientation) -> Result<f64> {
    const OP: &str = "materials::gap";
    check_non_negative(OP, "temperature", env.temperature)?;
    check_non_negative(OP, "b_perp", env.b_perp)?;
    check_non_negative(OP, "b_par", env.b_par)?;

    let t = env.temperature;
    if t >= material.tc {
        return Ok(0.0);
    }
    let thermal = if t == 0.0 {
        1.0
    } else {
        (1.74 * (material.tc / t - 1.0).sqrt()).tanh()
    };

    let perp = (1.0 - env.b_perp / material.bc_perp_eff).max(0.0);
    let par = {
        let r = env.b_par / material.bc_par_eff;
        (1.0 - r * r).max(0.0).sqrt()
    };
    let field = match orientation {
        FieldOrientation::Perp => perp,
        FieldOrientation::Par => par,
        FieldOrientation::Both => perp * par,
    };
    Ok(material.gap_zero() * thermal * field)
}

/// Fermi-Dirac occupation at reduced energy `x` and reduced temperature `t > 0`.
fn fermi(x: f64, t: f64) -> f64 {
    1.0 / ((x / t).exp() + 1.0)
}

/// f(e) - f(e + w), free of cancellation when w << t.
fn fermi_difference(e: f64, w: f64, t: f64) -> f64 {
    fermi(e, t) * fermi(-(e + w), t) * -(-w / t).exp_m1()
}

fn sigma1_upper_limit(omega_tilde: f64, t_tilde: f64) -> f64 {
    1.0 + (30.0 * t_tilde).max(10.0 * omega_tilde)
}

/// Mattis-Bardeen conductivity ratio for hbar w / Delta = `omega_tilde` and
/// k_B T / Delta = `t_tilde`, using the default substitution method.
///
/// Only the thermal quasiparticle term of sigma1 is included, so
/// `omega_tilde >= 2` is rejected.
pub fn mb_conductivity(omega_tilde: f64, t_tilde: f64) -> Result<ComplexConductivity> {
    mb_conductivity_with(omega_tilde, t_tilde, MbMethod::Substitution)
}

pub fn mb_conductivity_with(
    omega_tilde: f64,
    t_tilde: f64,
    method: MbMethod,
) -> Result<ComplexConductivity> {
    const OP: &str = "materials::mb_conductivity";
    if !(omega_tilde.is_finite() && omega_tilde > 0.0) {
        return Err(Error::domain(
            OP,
            format!("omega_tilde must be > 0, got {omega_tilde}"),
        ));
    }
    if omega_tilde >= 2.0 {
        return Err(Error::Unsupported {
            op: OP,
            msg: format!(
                "omega_tilde = {omega_tilde} >= 2 requires the pair-breaking term, which is not modeled"
            ),
        });
    }
    check_non_negative(OP, "t_tilde", t_tilde)?;

    let tol = Tolerance::default();
    let w = omega_tilde;
    let converged = |est: quadrature::Estimate| -> Result<f64> {
        if est.converged {
            Ok(est.value)
        } else {
            Err(Error::Quadrature {
                op: OP,
                value: est.value,
                abs_error: est.abs_error,
                intervals: est.intervals,
            })
        }
    };

    let sigma1 = if t_tilde == 0.0 {
        0.0
    } else {
        let e_max = sigma1_upper_limit(w, t_tilde);
        let integral = match method {
            MbMethod::Substitution => {
                // E = cosh(u) absorbs 1/sqrt(E^2 - 1).
                let integrand = |u: f64| {
                    let e = u.cosh();
                    let ew = e + w;
                    fermi_difference(e, w, t_tilde) * (e * ew + 1.0) / (ew * ew - 1.0).sqrt()
                };
                quadrature::integrate(integrand, 0.0, e_max.acosh(), &tol)
            }
            MbMethod::Regularized { epsilon } => {
                let integrand = |e: f64| {
                    let ew = e + w;
                    fermi_difference(e, w, t_tilde) * (e * ew + 1.0)
                        / ((e * e - 1.0 + epsilon).sqrt() * (ew * ew - 1.0 + epsilon).sqrt())
                };
                quadrature::integrate(integrand, 1.0, e_max, &tol)
            }
        };
        2.0 / w * converged(integral)?
    };

    // 1 - 2 f(E + w) = tanh((E + w) / 2T); the T = 0 limit is 1 on this interval.
    let pair_factor = |y: f64| {
        if t_tilde == 0.0 {
            1.0
        } else {
            (0.5 * y / t_tilde).tanh()
        }
    };
    let integral = match method {
        MbMethod::Substitution => {
            // 1 - E = w (1 - cos theta) / 2 absorbs both root singularities.
            let integrand = |theta: f64| {
                let e = 1.0 - 0.5 * w * (1.0 - theta.cos());
                let ew = e + w;
                pair_factor(ew) * (e * ew + 1.0) / ((1.0 + e).sqrt() * (ew + 1.0).sqrt())
            };
            quadrature::integrate(integrand, 0.0, std::f64::consts::PI, &tol)
        }
        MbMethod::Regularized { epsilon } => {
            let integrand = |e: f64| {
                let ew = e + w;
                pair_factor(ew) * (e * ew + 1.0)
                    / ((1.0 - e * e + epsilon).sqrt() * (ew * ew - 1.0 + epsilon).sqrt())
            };
            quadrature::integrate(integrand, 1.0 - w, 1.0, &tol)
        }
    };
    let sigma2 = converged(integral)? / w;

    Ok(ComplexConductivity {
        sigma1_over_sn: sigma1,
        sigma2_over_sn: sigma2,
    })
}

/// Normal-metal skin impedance sqrt(j w mu0 / sigma_n).
pub fn normal_surface_impedance(sigma_n: f64, frequency: f64) -> SurfaceImpedance {
    let omega = 2.0 * std::f64::consts::PI * frequency;
    (Complex64::new(0.0, omega * MU_0) / sigma_n).sqrt().into()
}

/// Bulk surface impedance of `material` at an arbitrary gap value.
///
/// When the photon energy reaches 2 Delta (including Delta = 0) the normal
/// skin impedance is returned.
pub fn surface_impedance_at_gap(
    material: &Material,
    gap: f64,
    temperature: f64,
    frequency: f64,
    method: MbMethod,
) -> Result<SurfaceImpedance> {
    const OP: &str = "materials::surface_impedance";
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::domain(
            OP,
            format!("frequency must be > 0, got {frequency}"),
        ));
    }
    check_non_negative(OP, "gap", gap)?;
    check_non_negative(OP, "temperature", temperature)?;

    let omega = 2.0 * std::f64::consts::PI * frequency;
    let photon = HBAR * omega;
    if gap == 0.0 || photon >= 2.0 * gap {
        return Ok(normal_surface_impedance(material.sigma_n, frequency));
    }

    let t_tilde = if temperature < ZERO_TEMPERATURE_FRACTION * material.tc {
        0.0
    } else {
        K_B * temperature / gap
    };
    let cond = mb_conductivity_with(photon / gap, t_tilde, method)?;
    let sigma = Complex64::new(cond.sigma1_over_sn, -cond.sigma2_over_sn) * material.sigma_n;
    Ok((Complex64::new(0.0, omega * MU_0) / sigma).sqrt().into())
}

/// Surface impedance at the operating point, with the gap suppressed by the
/// selected field components.
pub fn surface_impedance(
    material: &Material,
    env: &Environment,
    frequency: f64,
    orientation: FieldOrientation,
) -> Result<SurfaceImpedance> {
    surface_impedance_with(
        material,
        env,
        frequency,
        orientation,
        MbMethod::Substitution,
    )
}

pub fn surface_impedance_with(
    material: &Material,
    env: &Environment,
    frequency: f64,
    orientation: FieldOrientation,
    method: MbMethod,
) -> Result<SurfaceImpedance> {
    let delta = gap(material, env, orientation)?;
    surface_impedance_at_gap(material, delta, env.temperature, frequency, method)
}

/// Penetration depth lambda = Im(Z_s) / (w mu0) [m].
pub fn penetration_depth(zs: &SurfaceImpedance, frequency: f64) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * frequency;
    (zs.xs / (omega * MU_0)).max(0.0)
}

/// Thin-film surface inductance mu0 lambda coth(t / lambda) [H / square].
pub fn surface_inductance_thin_film(lambda: f64, thickness: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    MU_0 * lambda / (thickness / lambda).tanh()
}
