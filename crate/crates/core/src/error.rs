use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the model and analysis routines.
///
/// Every variant names the operation that failed so that callers (and the
/// CLI) can report it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("{op}: unsupported regime: {msg}")]
    Unsupported { op: &'static str, msg: String },

    #[error("network::abcd_stub: stub resonance (|cos(beta*L)| = {cos_abs:.3e}){}", fmt_freq(*.frequency))]
    StubResonance {
        cos_abs: f64,
        frequency: Option<f64>,
    },

    #[error("{op}: adaptive quadrature did not converge ({intervals} intervals, estimated error {abs_error:.3e} on {value:.6e})")]
    Quadrature {
        op: &'static str,
        value: f64,
        abs_error: f64,
        intervals: usize,
    },

    #[error("network::spectrum_sweep: {failed} of {total} frequencies failed; first at {frequency} Hz: {first}")]
    Sweep {
        failed: usize,
        total: usize,
        frequency: f64,
        first: Box<Error>,
    },

    #[error("analysis::load_spectrum: line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("analysis::nelder_mead: non-finite objective value {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("{op}: no convergence after {iterations} iterations; best value {best_value:.6e} at {best_point:?}")]
    NotConverged {
        op: &'static str,
        iterations: usize,
        best_point: Vec<f64>,
        best_value: f64,
    },

    #[error("{op}: {source}")]
    Io {
        op: &'static str,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_freq(frequency: Option<f64>) -> String {
    match frequency {
        Some(f) => format!(" at {f} Hz"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    /// Attach a frequency to a stub-resonance error raised below the sweep.
    pub(crate) fn at_frequency(self, f: f64) -> Self {
        match self {
            Error::StubResonance { cos_abs, .. } => Error::StubResonance {
                cos_abs,
                frequency: Some(f),
            },
            other => other,
        }
    }
}
