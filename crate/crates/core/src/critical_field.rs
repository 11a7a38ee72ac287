//! Critical-field extraction from (B, Tc) pairs: straight-line and WHH
//! estimates, the Abrikosov-Gorkov pair-breaking fit, and the coherence
//! length.

use std::f64::consts::PI;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::analysis::{nelder_mead, OptimizerConfig};
use crate::constants::PHI_0;
use crate::error::{Error, Result};
use crate::special::{digamma, DIGAMMA_HALF};

/// WHH dirty-limit prefactor.
pub const WHH_FACTOR: f64 = 0.69;

/// Column header of a Tc(B) CSV file.
pub const TC_FIELD_HEADER: &str = "b_tesla,tc_kelvin";

/// Measured or synthetic (field, transition temperature) samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcFieldData {
    points: Vec<(f64, f64)>,
}

impl TcFieldData {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        const OP: &str = "critical_field::TcFieldData";
        if points.len() < 2 {
            return Err(Error::domain(OP, "need at least 2 points"));
        }
        for &(b, tc) in &points {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::domain(
                    OP,
                    format!("field must be finite and >= 0, got {b}"),
                ));
            }
            if !(tc.is_finite() && tc > 0.0) {
                return Err(Error::domain(
                    OP,
                    format!("tc must be finite and > 0, got {tc}"),
                ));
            }
        }
        let mut bs: Vec<f64> = points.iter().map(|p| p.0).collect();
        bs.sort_by(f64::total_cmp);
        if let Some(w) = bs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(OP, format!("duplicate field value {}", w[0])));
        }
        Ok(TcFieldData { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Parse `b_tesla,tc_kelvin` rows; `#` lines and blank lines are skipped.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut points = Vec::new();
        let mut seen_header = false;
        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if !seen_header {
                let cols: Vec<&str> = t.split(',').map(str::trim).collect();
                if cols != ["b_tesla", "tc_kelvin"] {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected header '{TC_FIELD_HEADER}', got '{t}'"),
                    });
                }
                seen_header = true;
                continue;
            }
            let fields: Vec<&str> = t.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 2 columns, got {}", fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        msg: format!("invalid number '{s}'"),
                    })
            };
            points.push((parse(fields[0])?, parse(fields[1])?));
        }
        if !seen_header {
            return Err(Error::Parse {
                line: 0,
                msg: "no header row found".into(),
            });
        }
        TcFieldData::new(points)
    }
}

/// Pair-breaking model: Tc0 at zero field and the field that drives Tc to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgFit {
    pub tc0: f64,
    pub bc_zero_tc: f64,
}

/// How the field enters the pair-breaking parameter alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaScaling {
    /// alpha = exp(psi(1/2)) b / bc, so `bc_zero_tc` is where Tc reaches 0.
    #[default]
    ZeroTcField,
    /// alpha = b / bc as written; Tc then vanishes at b = exp(psi(1/2)) bc.
    Raw,
}

impl AlphaScaling {
    /// Field as a fraction of the field where Tc vanishes.
    fn zero_tc_fraction(self, b: f64, bc: f64) -> f64 {
        match self {
            AlphaScaling::ZeroTcField => b / bc,
            AlphaScaling::Raw => b / bc / DIGAMMA_HALF.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgTc {
    pub tc: f64,
    /// The field is beyond the point where Tc vanishes; `tc` is 0.
    pub out_of_range: bool,
}

/// Reduced temperature t = Tc/Tc0 solving ln t = psi(1/2) - psi(1/2 + alpha/t).
fn reduced_tc(alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 1.0;
    }
    let g = |t: f64| t.ln() - DIGAMMA_HALF + digamma(0.5 + alpha / t);
    // g(1) > 0 for alpha > 0 and g -> ln(alpha / exp(psi(1/2))) < 0 as t -> 0.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..1100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn ag_tc(b: f64, fit: &AgFit) -> AgTc {
    ag_tc_with(b, fit, AlphaScaling::default())
}

pub fn ag_tc_with(b: f64, fit: &AgFit, scaling: AlphaScaling) -> AgTc {
    let frac = scaling.zero_tc_fraction(b.max(0.0), fit.bc_zero_tc);
    if frac >= 1.0 {
        return AgTc {
            tc: 0.0,
            out_of_range: frac > 1.0,
        };
    }
    AgTc {
        tc: fit.tc0 * reduced_tc(DIGAMMA_HALF.exp() * frac),
        out_of_range: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    /// Temperature where the line reaches zero field [K].
    pub tc_intercept: f64,
    /// Field where the line reaches zero temperature [T].
    pub b_intercept: f64,
    /// |dB/dT| [T/K].
    pub slope: f64,
    /// RMS field residual of the fit [T].
    pub residual_rms: f64,
}

/// Ordinary least squares of b against tc.
pub fn linear_fit_intercepts(data: &TcFieldData) -> Result<LinearFit> {
    let pts = data.points();
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mean_b = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.1 - mean_t).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::domain(
            "critical_field::linear_fit_intercepts",
            "all tc values are equal",
        ));
    }
    let stb: f64 = pts.iter().map(|p| (p.1 - mean_t) * (p.0 - mean_b)).sum();
    let m = stb / stt;
    let c = mean_b - m * mean_t;
    let ss: f64 = pts.iter().map(|p| (p.0 - (m * p.1 + c)).powi(2)).sum();
    Ok(LinearFit {
        tc_intercept: -c / m,
        b_intercept: c,
        slope: m.abs(),
        residual_rms: (ss / n).sqrt(),
    })
}

/// B_c2(0) = 0.69 Tc |dB_c2/dT|.
pub fn whh_bc0(tc0: f64, slope_abs: f64) -> f64 {
    WHH_FACTOR * tc0 * slope_abs
}

/// xi = sqrt(Phi0 / (2 pi B_c)).
pub fn coherence_length(bc: f64) -> f64 {
    (PHI_0 / (2.0 * PI * bc)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgFitReport {
    pub fit: AgFit,
    pub scaling: AlphaScaling,
    /// RMS Tc residual [K].
    pub residual_rms: f64,
    pub iterations: usize,
}

fn ag_sse(data: &TcFieldData, fit: &AgFit, scaling: AlphaScaling) -> f64 {
    data.points()
        .iter()
        .map(|&(b, tc)| (ag_tc_with(b, fit, scaling).tc - tc).powi(2))
        .sum()
}

/// Least-squares fit of the zero-Tc field with Tc0 held fixed.
pub fn ag_fit(data: &TcFieldData, tc0: f64) -> Result<AgFitReport> {
    ag_fit_with(data, tc0, AlphaScaling::default(), &ag_optimizer())
}

/// Optimizer settings used by [`ag_fit`]: a simplex in ln(bc).
pub fn ag_optimizer() -> OptimizerConfig {
    OptimizerConfig {
        max_iters: 500,
        f_tol: 1e-14,
        x_tol: 1e-10,
        simplex_scale: vec![0.05],
    }
}

pub fn ag_fit_with(
    data: &TcFieldData,
    tc0: f64,
    scaling: AlphaScaling,
    config: &OptimizerConfig,
) -> Result<AgFitReport> {
    const OP: &str = "critical_field::ag_fit";
    if !(tc0.is_finite() && tc0 > 0.0) {
        return Err(Error::domain(OP, format!("tc0 must be > 0, got {tc0}")));
    }
    let line = linear_fit_intercepts(data)?;
    let alpha_c = DIGAMMA_HALF.exp();
    let zero_tc_guess = if line.b_intercept > 0.0 {
        (PI * PI / 2.0) * alpha_c * line.b_intercept
    } else {
        data.points()
            .iter()
            .map(|p| p.0)
            .fold(0.0, f64::max)
            .max(1e-3)
    };
    let start = match scaling {
        AlphaScaling::ZeroTcField => zero_tc_guess,
        AlphaScaling::Raw => zero_tc_guess / alpha_c,
    };
    let objective = |x: &[f64]| {
        let fit = AgFit {
            tc0,
            bc_zero_tc: x[0].exp(),
        };
        ag_sse(data, &fit, scaling)
    };
    let m = nelder_mead(objective, &[start.ln()], config)?;
    if !m.converged {
        return Err(Error::NotConverged {
            op: OP,
            iterations: m.iterations,
            best_point: vec![m.best_point[0].exp()],
            best_value: m.best_value,
        });
    }
    Ok(AgFitReport {
        fit: AgFit {
            tc0,
            bc_zero_tc: m.best_point[0].exp(),
        },
        scaling,
        residual_rms: (m.best_value / data.points().len() as f64).sqrt(),
        iterations: m.iterations,
    })
}

/// Noiseless Tc(B) samples from the pair-breaking model at `fields`.
pub fn synthetic_ag_data(fit: &AgFit, fields: &[f64]) -> Result<TcFieldData> {
    TcFieldData::new(fields.iter().map(|&b| (b, ag_tc(b, fit).tc)).collect())
}
