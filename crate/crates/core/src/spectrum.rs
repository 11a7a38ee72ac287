//! Frequency-indexed spectra and their CSV representation.
//!
//! Two layouts are used: `frequency_hz,re,im` for complex S21 and
//! `frequency_hz,value_db` for real dB quantities. Lines starting with `#`
//! are comments; a `# kind: <kind>` comment tags the quantity. Values are
//! written with the shortest round-trip representation so that reading back an
//! exported file reproduces every value bit for bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub const COMPLEX_HEADER: &str = "frequency_hz,re,im";
pub const DB_HEADER: &str = "frequency_hz,value_db";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    S21Complex,
    S21Db,
    GainDb,
    DsnrDb,
    NoiseDb,
}

impl SpectrumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumKind::S21Complex => "s21_complex",
            SpectrumKind::S21Db => "s21_db",
            SpectrumKind::GainDb => "gain_db",
            SpectrumKind::DsnrDb => "dsnr_db",
            SpectrumKind::NoiseDb => "noise_db",
        }
    }

    pub fn is_complex(self) -> bool {
        self == SpectrumKind::S21Complex
    }
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpectrumKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "s21_complex" => SpectrumKind::S21Complex,
            "s21_db" => SpectrumKind::S21Db,
            "gain_db" => SpectrumKind::GainDb,
            "dsnr_db" => SpectrumKind::DsnrDb,
            "noise_db" => SpectrumKind::NoiseDb,
            other => return Err(format!("unknown spectrum kind '{other}'")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumValues {
    Complex(Vec<Complex64>),
    Db(Vec<f64>),
}

impl SpectrumValues {
    pub fn len(&self) -> usize {
        match self {
            SpectrumValues::Complex(v) => v.len(),
            SpectrumValues::Db(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Values on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    frequencies: Vec<f64>,
    values: SpectrumValues,
    kind: SpectrumKind,
}

pub(crate) fn check_grid(op: &'static str, frequencies: &[f64]) -> Result<()> {
    if frequencies.is_empty() {
        return Err(Error::domain(op, "empty frequency grid"));
    }
    if let Some(f) = frequencies.iter().find(|f| !f.is_finite()) {
        return Err(Error::domain(op, format!("non-finite frequency {f}")));
    }
    if let Some(i) = frequencies.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::domain(
            op,
            format!(
                "frequencies must be strictly increasing ({} then {})",
                frequencies[i],
                frequencies[i + 1]
            ),
        ));
    }
    Ok(())
}

impl Spectrum {
    pub fn new(frequencies: Vec<f64>, values: SpectrumValues, kind: SpectrumKind) -> Result<Self> {
        const OP: &str = "network::Spectrum";
        check_grid(OP, &frequencies)?;
        if values.len() != frequencies.len() {
            return Err(Error::domain(
                OP,
                format!(
                    "{} values for {} frequencies",
                    values.len(),
                    frequencies.len()
                ),
            ));
        }
        if matches!(values, SpectrumValues::Complex(_)) != kind.is_complex() {
            return Err(Error::domain(
                OP,
                format!("kind {kind} does not match value type"),
            ));
        }
        Ok(Spectrum {
            frequencies,
            values,
            kind,
        })
    }

    pub fn complex(frequencies: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        Self::new(
            frequencies,
            SpectrumValues::Complex(values),
            SpectrumKind::S21Complex,
        )
    }

    pub fn db(frequencies: Vec<f64>, values: Vec<f64>, kind: SpectrumKind) -> Result<Self> {
        Self::new(frequencies, SpectrumValues::Db(values), kind)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &SpectrumValues {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// dB view of the values; complex entries map to 20 log10 |s|.
    pub fn db_values(&self) -> Vec<f64> {
        match &self.values {
            SpectrumValues::Complex(v) => v.iter().map(|s| 20.0 * s.norm().log10()).collect(),
            SpectrumValues::Db(v) => v.clone(),
        }
    }

    /// Mean of the dB values over `[f_low, f_high]`, or `None` if no grid
    /// point falls inside.
    pub fn mean_db_in(&self, f_low: f64, f_high: f64) -> Option<f64> {
        let db = self.db_values();
        let (sum, n) = self
            .frequencies
            .iter()
            .zip(&db)
            .filter(|(f, _)| **f >= f_low && **f <= f_high)
            .fold((0.0, 0usize), |(s, n), (_, v)| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    /// Write as CSV. Each entry of `comments` becomes one `# ` line ahead of
    /// the kind tag and the column header.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for line in comments {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# kind: {}", self.kind)?;
        match &self.values {
            SpectrumValues::Complex(v) => {
                writeln!(out, "{COMPLEX_HEADER}")?;
                for (f, s) in self.frequencies.iter().zip(v) {
                    writeln!(out, "{},{},{}", fmt_f64(*f), fmt_f64(s.re), fmt_f64(s.im))?;
                }
            }
            SpectrumValues::Db(v) => {
                writeln!(out, "{DB_HEADER}")?;
                for (f, x) in self.frequencies.iter().zip(v) {
                    writeln!(out, "{},{}", fmt_f64(*f), fmt_f64(*x))?;
                }
            }
        }
        Ok(())
    }

    /// Parse CSV produced by [`Spectrum::write_csv`] (or by hand).
    ///
    /// A dB file without a kind tag is read as `s21_db`.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut kind_tag: Option<(usize, SpectrumKind)> = None;
        let mut header: Option<(usize, bool)> = None;
        let mut freqs = Vec::new();
        let mut complex = Vec::new();
        let mut db = Vec::new();

        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(k) = comment.trim().strip_prefix("kind:") {
                    let kind = k
                        .parse()
                        .map_err(|msg| Error::Parse { line: lineno, msg })?;
                    kind_tag = Some((lineno, kind));
                }
                continue;
            }
            let Some((_, is_complex)) = header else {
                let cols: Vec<&str> = trimmed.split(',').map(str::trim).collect();
                let is_complex = match cols.as_slice() {
                    ["frequency_hz", "re", "im"] => true,
                    ["frequency_hz", "value_db"] => false,
                    _ => return Err(Error::Parse {
                        line: lineno,
                        msg: format!(
                            "expected header '{COMPLEX_HEADER}' or '{DB_HEADER}', got '{trimmed}'"
                        ),
                    }),
                };
                header = Some((lineno, is_complex));
                continue;
            };

            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            let expected = if is_complex { 3 } else { 2 };
            if fields.len() != expected {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {expected} columns, got {}", fields.len()),
                });
            }
            let mut nums = [0.0; 3];
            for (slot, field) in nums.iter_mut().zip(&fields) {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid number '{field}'"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("non-finite value '{field}'"),
                    });
                }
                *slot = v;
            }
            if let Some(&prev) = freqs.last() {
                if nums[0] <= prev {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!(
                            "frequency {} is not greater than previous {}",
                            nums[0], prev
                        ),
                    });
                }
            }
            freqs.push(nums[0]);
            if is_complex {
                complex.push(Complex64::new(nums[1], nums[2]));
            } else {
                db.push(nums[1]);
            }
        }

        let Some((header_line, is_complex)) = header else {
            return Err(Error::Parse {
                line: 0,
                msg: "no header row found".into(),
            });
        };
        if freqs.is_empty() {
            return Err(Error::Parse {
                line: header_line,
                msg: "no data rows".into(),
            });
        }

        let kind = match kind_tag {
            Some((line, k)) if k.is_complex() != is_complex => {
                return Err(Error::Parse {
                    line,
                    msg: format!("kind {k} does not match the column layout"),
                })
            }
            Some((_, k)) => k,
            None if is_complex => SpectrumKind::S21Complex,
            None => SpectrumKind::S21Db,
        };
        let values = if is_complex {
            SpectrumValues::Complex(complex)
        } else {
            SpectrumValues::Db(db)
        };
        Spectrum::new(freqs, values, kind)
    }
}

/// Shortest round-trip decimal form; exponent notation for very large or
/// small magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
