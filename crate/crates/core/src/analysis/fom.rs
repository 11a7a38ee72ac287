//! Figures of merit of a measured or simulated SNR-improvement spectrum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smoothing::moving_average;
use crate::spectrum::{Spectrum, SpectrumKind};

/// Knobs for [`figures_of_merit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FomConfig {
    /// Histogram bin width used for the mode [dB].
    pub bin_width_db: f64,
    /// Moving-average window applied before thresholding (points).
    pub smoothing_window: usize,
    /// Drop below the mode that still counts as in-band [dB].
    pub threshold_db: f64,
}

impl Default for FomConfig {
    fn default() -> Self {
        FomConfig {
            bin_width_db: 0.25,
            smoothing_window: 11,
            threshold_db: 3.0,
        }
    }
}

/// Minimum number of points accepted by [`dsnr_mode`].
pub const MODE_MIN_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bandwidth {
    /// Sorted, disjoint `(f_low, f_high)` pairs [Hz].
    pub regions: Vec<(f64, f64)>,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandStats {
    pub mean: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FomResult {
    pub dsnr_mode: f64,
    pub bw_regions: Vec<(f64, f64)>,
    pub bw_total: f64,
    /// `None` when no point clears the threshold.
    pub mean_dsnr_in_bw: Option<f64>,
    /// `None` without a gain spectrum or when it has no in-band points.
    pub mean_gain_in_bw: Option<f64>,
    pub q25: Option<f64>,
    pub q75: Option<f64>,
}

fn require_kind(op: &'static str, s: &Spectrum, kind: SpectrumKind) -> Result<Vec<f64>> {
    if s.kind() != kind {
        return Err(Error::domain(
            op,
            format!("expected a {kind} spectrum, got {}", s.kind()),
        ));
    }
    Ok(s.db_values())
}

/// Most common value: center of the fullest histogram bin, bins centered on
/// multiples of `bin_width`. Ties go to the higher bin.
pub fn dsnr_mode_with(spectrum: &Spectrum, bin_width: f64) -> Result<f64> {
    const OP: &str = "analysis::dsnr_mode";
    let values = require_kind(OP, spectrum, SpectrumKind::DsnrDb)?;
    if values.len() < MODE_MIN_POINTS {
        return Err(Error::domain(
            OP,
            format!(
                "need at least {MODE_MIN_POINTS} points, got {}",
                values.len()
            ),
        ));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::domain(OP, "bin width must be > 0"));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in &values {
        *counts.entry((v / bin_width).round() as i64).or_default() += 1;
    }
    let mut best = (i64::MIN, 0usize);
    for (&k, &c) in &counts {
        // Ascending keys, so >= hands ties to the higher bin.
        if c >= best.1 {
            best = (k, c);
        }
    }
    Ok(best.0 as f64 * bin_width)
}

pub fn dsnr_mode(spectrum: &Spectrum) -> Result<f64> {
    dsnr_mode_with(spectrum, FomConfig::default().bin_width_db)
}

/// Runs of the smoothed trace at or above `mode - threshold_db`.
pub fn bandwidth_3db_with(
    spectrum: &Spectrum,
    mode: f64,
    window: usize,
    threshold_db: f64,
) -> Result<Bandwidth> {
    let values = require_kind("analysis::bandwidth_3db", spectrum, SpectrumKind::DsnrDb)?;
    let smooth = moving_average(&values, window);
    let f = spectrum.frequencies();
    let threshold = mode - threshold_db;

    let mut regions = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &v) in smooth.iter().enumerate() {
        match (v >= threshold, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                regions.push((f[s], f[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        regions.push((f[s], f[f.len() - 1]));
    }
    let total = regions.iter().map(|(lo, hi)| hi - lo).sum();
    Ok(Bandwidth { regions, total })
}

pub fn bandwidth_3db(spectrum: &Spectrum, mode: f64) -> Result<Bandwidth> {
    let cfg = FomConfig::default();
    bandwidth_3db_with(spectrum, mode, cfg.smoothing_window, cfg.threshold_db)
}

/// Percentile of sorted data, interpolating linearly at rank p (n - 1).
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

fn in_regions(f: f64, regions: &[(f64, f64)]) -> bool {
    regions.iter().any(|&(lo, hi)| f >= lo && f <= hi)
}

/// Mean and quartiles of the raw (unsmoothed) points inside `regions`.
pub fn band_stats(spectrum: &Spectrum, regions: &[(f64, f64)]) -> Result<BandStats> {
    const OP: &str = "analysis::band_stats";
    if regions.is_empty() {
        return Err(Error::domain(OP, "no bandwidth regions"));
    }
    let values = spectrum.db_values();
    let mut inside: Vec<f64> = spectrum
        .frequencies()
        .iter()
        .zip(&values)
        .filter(|(f, _)| in_regions(**f, regions))
        .map(|(_, v)| *v)
        .collect();
    if inside.is_empty() {
        return Err(Error::domain(OP, "no spectrum points inside the regions"));
    }
    let mean = inside.iter().sum::<f64>() / inside.len() as f64;
    inside.sort_by(f64::total_cmp);
    Ok(BandStats {
        mean,
        q25: percentile_sorted(&inside, 0.25),
        q75: percentile_sorted(&inside, 0.75),
    })
}

/// Mode, bandwidth and in-band statistics of an SNR-improvement spectrum,
/// plus the in-band mean of an optional gain spectrum.
pub fn figures_of_merit(
    dsnr: &Spectrum,
    gain: Option<&Spectrum>,
    cfg: &FomConfig,
) -> Result<FomResult> {
    let mode = dsnr_mode_with(dsnr, cfg.bin_width_db)?;
    let bw = bandwidth_3db_with(dsnr, mode, cfg.smoothing_window, cfg.threshold_db)?;
    let stats = if bw.regions.is_empty() {
        None
    } else {
        Some(band_stats(dsnr, &bw.regions)?)
    };
    let mean_gain_in_bw = match gain {
        Some(g) if !bw.regions.is_empty() => {
            require_kind("analysis::figures_of_merit", g, SpectrumKind::GainDb)?;
            band_stats(g, &bw.regions).ok().map(|s| s.mean)
        }
        _ => None,
    };
    Ok(FomResult {
        dsnr_mode: mode,
        bw_regions: bw.regions,
        bw_total: bw.total,
        mean_dsnr_in_bw: stats.map(|s| s.mean),
        mean_gain_in_bw,
        q25: stats.map(|s| s.q25),
        q75: stats.map(|s| s.q75),
    })
}
