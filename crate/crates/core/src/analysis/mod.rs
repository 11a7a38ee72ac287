//! Spectrum loading, figure-of-merit extraction and the simplex optimizer.

mod fom;
mod nelder_mead;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

pub use fom::{
    band_stats, bandwidth_3db, bandwidth_3db_with, dsnr_mode, dsnr_mode_with, figures_of_merit,
    percentile_sorted, BandStats, Bandwidth, FomConfig, FomResult, MODE_MIN_POINTS,
};
pub use nelder_mead::{nelder_mead, nelder_mead_multistart, Grid2, Minimum, OptimizerConfig};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Read a spectrum CSV from disk.
pub fn load_spectrum(path: impl AsRef<Path>) -> Result<Spectrum> {
    let file = File::open(path.as_ref()).map_err(|source| Error::Io {
        op: "analysis::load_spectrum",
        source,
    })?;
    Spectrum::read_csv(BufReader::new(file))
}
