//! Signal-to-noise improvement of a parametric amplifier followed by a
//! second amplifier, lossy-cascade noise arithmetic, and the vortex entry
//! field of a thin strip.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{HBAR, K_B, PHI_0};
use crate::error::{Error, Result};

/// Amplifier-chain parameters for the SNR-improvement model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Parametric amplifier gain [dB].
    pub gain_db: f64,
    /// Noise temperature of the following amplifier [K].
    pub t_second: f64,
    /// Floor applied to the physical temperature [K].
    pub t_min: f64,
    /// Pump frequency [Hz].
    pub f_pump: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            gain_db: 12.0,
            t_second: 13.0,
            t_min: 0.48,
            f_pump: 9.75e9,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "noise::NoiseModel";
        if !self.gain_db.is_finite() {
            return Err(Error::domain(OP, "gain_db must be finite"));
        }
        if !(self.t_second.is_finite() && self.t_second > 0.0) {
            return Err(Error::domain(OP, "t_second must be > 0"));
        }
        if !(self.t_min.is_finite() && self.t_min >= 0.0) {
            return Err(Error::domain(OP, "t_min must be >= 0"));
        }
        if !(self.f_pump.is_finite() && self.f_pump > 0.0) {
            return Err(Error::domain(OP, "f_pump must be > 0"));
        }
        Ok(())
    }

    /// Idler frequency 2 f_p - f_s.
    pub fn idler_frequency(&self, f_signal: f64) -> f64 {
        2.0 * self.f_pump - f_signal
    }

    /// Added noise T_p = T_signal + T_idler at the floored temperature [K].
    pub fn amplifier_noise_temperature(&self, f_signal: f64, temperature: f64) -> Result<f64> {
        const OP: &str = "noise::delta_snr";
        self.validate()?;
        if !(f_signal.is_finite() && f_signal > 0.0) {
            return Err(Error::domain(
                OP,
                format!("f_signal must be > 0, got {f_signal}"),
            ));
        }
        let f_idler = self.idler_frequency(f_signal);
        if f_idler <= 0.0 {
            return Err(Error::domain(
                OP,
                format!(
                    "f_signal = {f_signal} Hz leaves no positive idler for f_pump = {} Hz",
                    self.f_pump
                ),
            ));
        }
        if temperature.is_nan() || temperature < 0.0 {
            return Err(Error::domain(
                OP,
                format!("temperature must be >= 0, got {temperature}"),
            ));
        }
        let t_eff = temperature.max(self.t_min);
        Ok(port_noise(f_signal, t_eff) + port_noise(f_idler, t_eff))
    }
}

/// Vortex-entry geometry of the strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripGeometry {
    /// Strip width W [m].
    pub width: f64,
    /// Coherence length xi [m].
    pub coherence_len: f64,
}

impl Default for StripGeometry {
    fn default() -> Self {
        StripGeometry {
            width: 340e-9,
            coherence_len: 4.9e-9,
        }
    }
}

/// Bose-Einstein occupation 1 / (exp(h f / k_B T) - 1).
pub fn occupation(frequency: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * 2.0 * PI * frequency / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// (hbar w / k_B)(1 + 2 n(w, T)).
fn port_noise(frequency: f64, temperature: f64) -> f64 {
    HBAR * 2.0 * PI * frequency / K_B * (1.0 + 2.0 * occupation(frequency, temperature))
}

/// 10 log10(1 / (T_p / T_2nd + 1 / G)).
pub fn dsnr_from_noise_temperature(t_amp: f64, t_second: f64, gain_db: f64) -> f64 {
    let g_inv = 10f64.powf(-gain_db / 10.0);
    -10.0 * (t_amp / t_second + g_inv).log10()
}

/// SNR improvement [dB] at signal frequency `f_signal` and bath
/// temperature `temperature`.
pub fn delta_snr(model: &NoiseModel, f_signal: f64, temperature: f64) -> Result<f64> {
    let t_p = model.amplifier_noise_temperature(f_signal, temperature)?;
    Ok(dsnr_from_noise_temperature(
        t_p,
        model.t_second,
        model.gain_db,
    ))
}

/// Mean of [`delta_snr`] in dB over `points` equally spaced signal
/// frequencies spanning `[f_low, f_high]`.
pub fn delta_snr_band_mean(
    model: &NoiseModel,
    f_low: f64,
    f_high: f64,
    points: usize,
    temperature: f64,
) -> Result<f64> {
    if points == 0 || !(f_high >= f_low) {
        return Err(Error::domain(
            "noise::delta_snr_band_mean",
            "need points >= 1 and f_high >= f_low",
        ));
    }
    let step = if points > 1 {
        (f_high - f_low) / (points - 1) as f64
    } else {
        0.0
    };
    let mut sum = 0.0;
    for i in 0..points {
        sum += delta_snr(model, f_low + step * i as f64, temperature)?;
    }
    Ok(sum / points as f64)
}

/// Temperature where the SNR improvement at `f_signal` falls to `level_db`,
/// searched by bisection on `[t_low, t_high]`. `None` if the level is not
/// crossed inside the bracket.
pub fn crossover_temperature(
    model: &NoiseModel,
    f_signal: f64,
    level_db: f64,
    t_low: f64,
    t_high: f64,
) -> Result<Option<f64>> {
    let g = |t: f64| delta_snr(model, f_signal, t).map(|v| v - level_db);
    let (mut lo, mut hi) = (t_low, t_high);
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    if g_lo == 0.0 {
        return Ok(Some(lo));
    }
    if g_lo.signum() == g_hi.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)?.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Loss [dB] that raises an amplifier noise temperature `t_amp` to
/// `t_effective` when the lossy element sits at `t_attenuator`:
/// (L - 1) T_att + L T_amp = T_eff.
pub fn cascade_loss_for_temp(t_amp: f64, t_effective: f64, t_attenuator: f64) -> Result<f64> {
    const OP: &str = "noise::cascade_loss_for_temp";
    if !(t_amp >= 0.0 && t_attenuator >= 0.0 && t_effective.is_finite()) {
        return Err(Error::domain(OP, "temperatures must be finite and >= 0"));
    }
    if t_effective <= t_amp {
        return Err(Error::domain(
            OP,
            format!("t_effective ({t_effective} K) must exceed t_amp ({t_amp} K)"),
        ));
    }
    let denom = t_amp + t_attenuator;
    if denom <= 0.0 {
        return Err(Error::domain(
            OP,
            "no finite loss: t_amp + t_attenuator = 0",
        ));
    }
    let linear = (t_effective + t_attenuator) / denom;
    Ok(10.0 * linear.log10())
}

/// Field above which a vortex is stable at the strip center [T]:
/// H_s = (2 Phi0 / (pi W^2)) ln(2W / (pi xi)).
pub fn vortex_entry_field(strip: &StripGeometry) -> Result<f64> {
    const OP: &str = "noise::vortex_entry_field";
    let (w, xi) = (strip.width, strip.coherence_len);
    if !(w > 0.0 && xi > 0.0 && w.is_finite() && xi.is_finite()) {
        return Err(Error::domain(OP, "width and coherence length must be > 0"));
    }
    if w <= 0.5 * PI * xi {
        return Err(Error::domain(
            OP,
            format!("width {w} m must exceed pi xi / 2 = {} m", 0.5 * PI * xi),
        ));
    }
    Ok(2.0 * PHI_0 / (PI * w * w) * (2.0 * w / (PI * xi)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn occupation_reference_points() {
        assert_eq!(occupation(6e9, 0.0), 0.0);
        let f = 6e9;
        let t = HBAR * 2.0 * PI * f / (K_B * 2f64.ln());
        assert_relative_eq!(occupation(f, t), 1.0, max_relative = 1e-12);
        // Rayleigh-Jeans: n ~ k_B T / (hbar w) - 1/2.
        let rj = K_B * 4.0 / (HBAR * 2.0 * PI * f) - 0.5;
        assert!((occupation(f, 4.0) / rj - 1.0).abs() < 0.005);
    }

    #[test]
    fn occupation_monotone_in_temperature() {
        let mut last = 0.0;
        for i in 0..100 {
            let n = occupation(6e9, 0.01 * (i + 1) as f64);
            assert!(n >= 0.0 && n > last);
            last = n;
        }
    }

    #[test]
    fn zero_noise_gives_full_gain() {
        assert_eq!(dsnr_from_noise_temperature(0.0, 13.0, 12.0), 12.0);
        let huge = NoiseModel {
            t_second: 1e15,
            t_min: 0.0,
            ..NoiseModel::default()
        };
        assert!((delta_snr(&huge, 6e9, 0.0).unwrap() - 12.0).abs() < 1e-9);
    }

    #[test]
    fn base_temperature_golden() {
        let m = NoiseModel::default();
        // Direct evaluation at T_eff = T_min = 0.48 K: T_p = 2.0901 K.
        let t_p = m.amplifier_noise_temperature(6e9, 0.05).unwrap();
        let closed = {
            let n = |f: f64| 1.0 / (HBAR * 2.0 * PI * f / (K_B * 0.48)).exp_m1();
            let q = |f: f64| HBAR * 2.0 * PI * f / K_B;
            q(6e9) * (1.0 + 2.0 * n(6e9)) + q(13.5e9) * (1.0 + 2.0 * n(13.5e9))
        };
        assert_relative_eq!(t_p, closed, max_relative = 1e-14);
        let dsnr = delta_snr(&m, 6e9, 0.05).unwrap();
        assert_relative_eq!(
            dsnr,
            -10.0 * (closed / 13.0 + 10f64.powf(-1.2)).log10(),
            max_relative = 1e-14
        );
        assert!((t_p - 2.090131).abs() < 1e-5, "{t_p}");
        assert!((dsnr - 6.49994).abs() < 1e-4, "{dsnr}");
    }

    #[test]
    fn crossover_lies_in_expected_window() {
        let m = NoiseModel::default();
        let t = crossover_temperature(&m, 6e9, 0.0, 0.01, 20.0)
            .unwrap()
            .unwrap();
        assert!((2.4..=3.2).contains(&t), "{t}");
    }

    #[test]
    fn dsnr_monotone_and_bounded() {
        let m = NoiseModel::default();
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let t = m.t_min + 0.1 * i as f64;
            let v = delta_snr(&m, 6e9, t).unwrap();
            assert!(v <= last);
            assert!(v <= m.gain_db);
            last = v;
        }
    }

    #[test]
    fn high_gain_limit() {
        let m = NoiseModel {
            gain_db: 60.0,
            ..NoiseModel::default()
        };
        for &t in &[0.05, 1.0, 3.0] {
            let t_p = m.amplifier_noise_temperature(6e9, t).unwrap();
            let limit = 10.0 * (m.t_second / t_p).log10();
            assert!((delta_snr(&m, 6e9, t).unwrap() - limit).abs() < 0.01);
        }
    }

    #[test]
    fn idler_must_be_positive() {
        let m = NoiseModel::default();
        assert!(delta_snr(&m, 2.0 * m.f_pump, 1.0).is_err());
        assert!(delta_snr(&m, 6e9, -1.0).is_err());
    }

    #[test]
    fn band_mean_of_single_point_matches() {
        let m = NoiseModel::default();
        assert_eq!(
            delta_snr_band_mean(&m, 6e9, 6e9, 1, 1.0).unwrap(),
            delta_snr(&m, 6e9, 1.0).unwrap()
        );
        let band = delta_snr_band_mean(&m, 4e9, 8e9, 41, 1.0).unwrap();
        assert!(band.is_finite());
    }

    #[test]
    fn cascade_loss_cases() {
        let l = cascade_loss_for_temp(3.0, 13.0, 4.0).unwrap();
        assert!((l - 3.85).abs() < 0.1, "{l}");
        assert_relative_eq!(
            cascade_loss_for_temp(3.0, 13.0, 0.0).unwrap(),
            10.0 * (13.0f64 / 3.0).log10(),
            max_relative = 1e-14
        );
        assert!(cascade_loss_for_temp(3.0, 3.0 + 1e-9, 4.0).unwrap() < 1e-8);
        assert!(cascade_loss_for_temp(3.0, 2.0, 4.0).is_err());
        assert!(cascade_loss_for_temp(0.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn vortex_field_cases() {
        let hs = vortex_entry_field(&StripGeometry::default()).unwrap();
        assert!((hs - 0.043).abs() < 0.002, "{hs}");

        let xi = 5e-9;
        let w = 0.5 * PI * xi * std::f64::consts::E;
        let hs = vortex_entry_field(&StripGeometry {
            width: w,
            coherence_len: xi,
        })
        .unwrap();
        assert_relative_eq!(hs, 2.0 * PHI_0 / (PI * w * w), max_relative = 1e-14);

        let bad = StripGeometry {
            width: 0.5 * PI * xi,
            coherence_len: xi,
        };
        assert!(vortex_entry_field(&bad).is_err());
    }

    #[test]
    fn vortex_field_doubling_width() {
        let s = StripGeometry::default();
        let double = StripGeometry {
            width: 2.0 * s.width,
            ..s.clone()
        };
        let ratio = vortex_entry_field(&s).unwrap() / vortex_entry_field(&double).unwrap();
        let log = (2.0 * s.width / (PI * s.coherence_len)).ln();
        assert_relative_eq!(ratio, 4.0 / (1.0 + 2f64.ln() / log), max_relative = 1e-12);
    }

    #[test]
    fn vortex_field_decreasing_in_width() {
        let xi = 4.9e-9;
        let start = std::f64::consts::E * PI * xi / 2.0;
        let mut last = f64::INFINITY;
        for i in 1..200 {
            let w = start * (1.0 + 0.05 * i as f64);
            let hs = vortex_entry_field(&StripGeometry {
                width: w,
                coherence_len: xi,
            })
            .unwrap();
            assert!(hs < last);
            last = hs;
        }
    }
}
