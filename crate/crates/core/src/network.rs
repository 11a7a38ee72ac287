//! ABCD (chain) matrices of line segments and stubs, the modulated unit
//! cell, the full-device cascade, and S21 sweeps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::execution::{self, Execution};
use crate::materials::{surface_impedance_with, Environment, FieldOrientation, Material, MbMethod};
use crate::microstrip::{line_params, Geometry, LineParams};
use crate::smoothing::moving_average;
use crate::spectrum::{check_grid, Spectrum};

/// 2x2 complex chain matrix [[a, b], [c, d]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPort {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPort {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        TwoPort {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Largest element magnitude.
    pub fn max_norm(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for TwoPort {
    type Output = TwoPort;

    fn mul(self, rhs: TwoPort) -> TwoPort {
        TwoPort {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Stub placement within one modulation period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellLayout {
    /// Spacing d between stubs [m].
    pub stub_spacing: f64,
    pub n_stubs: usize,
    pub n_cells: usize,
    /// Mean stub length [m].
    pub l0: f64,
    /// Stub-length modulation amplitude [m].
    pub la: f64,
}

impl Default for CellLayout {
    fn default() -> Self {
        CellLayout {
            stub_spacing: 2.21e-6,
            n_stubs: 59,
            n_cells: 80,
            l0: 10.8e-6,
            la: 2.08e-6,
        }
    }
}

impl CellLayout {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "network::CellLayout";
        for (name, v) in [("stub_spacing", self.stub_spacing), ("l0", self.l0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(OP, format!("{name} must be > 0, got {v}")));
            }
        }
        if !self.la.is_finite() || self.la.abs() > self.l0 {
            return Err(Error::domain(
                OP,
                format!("|la| must not exceed l0, got la = {}", self.la),
            ));
        }
        if self.n_stubs == 0 || self.n_cells == 0 {
            return Err(Error::domain(OP, "n_stubs and n_cells must be >= 1"));
        }
        Ok(())
    }

    /// L_i = l0 + la sin(2 pi i / n_stubs) for i = 1..=n_stubs.
    pub fn stub_lengths(&self) -> Vec<f64> {
        (1..=self.n_stubs)
            .map(|i| self.l0 + self.la * (2.0 * PI * i as f64 / self.n_stubs as f64).sin())
            .collect()
    }

    /// Physical length of one cell along the line [m].
    pub fn cell_length(&self) -> f64 {
        self.stub_spacing * (self.n_stubs as f64 + 0.5)
    }
}

/// Stub input admittance model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StubModel {
    /// Y = j (2 / Z0) tan(beta L) with the real phase constant.
    #[default]
    RealBeta,
    /// Y = (2 / Z0) tanh(gamma L), i.e. the complex propagation constant
    /// inside the tangent.
    ComplexGamma,
}

const STUB_RESONANCE_COS: f64 = 1e-12;

/// Chain matrix of a uniform line section.
pub fn abcd_line(line: &LineParams, length: f64) -> TwoPort {
    let gl = line.gamma * length;
    let (ch, sh) = (gl.cosh(), gl.sinh());
    TwoPort {
        a: ch,
        b: line.z0 * sh,
        c: sh / line.z0,
        d: ch,
    }
}

/// Shunt admittance of a pair of open stubs of length `stub_len`.
pub fn abcd_stub(line: &LineParams, stub_len: f64) -> Result<TwoPort> {
    abcd_stub_with(line, stub_len, StubModel::RealBeta)
}

pub fn abcd_stub_with(line: &LineParams, stub_len: f64, model: StubModel) -> Result<TwoPort> {
    if stub_len == 0.0 {
        return Ok(TwoPort::identity());
    }
    let y = match model {
        StubModel::RealBeta => {
            let bl = line.gamma.im * stub_len;
            let cos = bl.cos();
            if cos.abs() < STUB_RESONANCE_COS {
                return Err(Error::StubResonance {
                    cos_abs: cos.abs(),
                    frequency: None,
                });
            }
            Complex64::new(0.0, 2.0 * bl.sin() / cos) / line.z0
        }
        StubModel::ComplexGamma => {
            let gl = line.gamma * stub_len;
            let cosh = gl.cosh();
            if cosh.norm() < STUB_RESONANCE_COS {
                return Err(Error::StubResonance {
                    cos_abs: cosh.norm(),
                    frequency: None,
                });
            }
            2.0 * gl.sinh() / cosh / line.z0
        }
    };
    Ok(TwoPort {
        c: y,
        ..TwoPort::identity()
    })
}

/// One modulation period: a half section, then `n_stubs` repetitions of
/// (stub, full section).
pub fn unit_cell(line: &LineParams, layout: &CellLayout, frequency: f64) -> Result<TwoPort> {
    unit_cell_with(line, layout, frequency, StubModel::RealBeta)
}

pub fn unit_cell_with(
    line: &LineParams,
    layout: &CellLayout,
    frequency: f64,
    model: StubModel,
) -> Result<TwoPort> {
    let half = abcd_line(line, 0.5 * layout.stub_spacing);
    let full = abcd_line(line, layout.stub_spacing);
    layout.stub_lengths().iter().try_fold(half, |acc, &len| {
        let stub = abcd_stub_with(line, len, model).map_err(|e| e.at_frequency(frequency))?;
        Ok(acc * stub * full)
    })
}

/// `cell` raised to the `n`-th power by repeated squaring.
pub fn cascade_power(cell: TwoPort, n: usize) -> TwoPort {
    let mut result = TwoPort::identity();
    let mut base = cell;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = result * base;
        }
        k >>= 1;
        if k > 0 {
            base = base * base;
        }
    }
    result
}

/// S21 of a two-port between matched `z_env` terminations.
pub fn s21_from_abcd(total: &TwoPort, z_env: f64) -> Complex64 {
    2.0 / (total.a + total.b / z_env + total.c * z_env + total.d)
}

/// Numerical options for the device model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Reference impedance of the measurement environment [ohm].
    pub z_env: f64,
    pub stub_model: StubModel,
    pub mb_method: MbMethod,
    pub orientation: FieldOrientation,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            z_env: 50.0,
            stub_model: StubModel::RealBeta,
            mb_method: MbMethod::Substitution,
            orientation: FieldOrientation::Both,
        }
    }
}

/// Everything needed to evaluate the device S21 at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub strip: Material,
    pub ground: Material,
    pub geometry: Geometry,
    pub layout: CellLayout,
    #[serde(default)]
    pub options: ModelOptions,
}

impl Default for Device {
    fn default() -> Self {
        Device {
            strip: Material::nbtin(),
            ground: Material::nb(),
            geometry: Geometry::default(),
            layout: CellLayout::default(),
            options: ModelOptions::default(),
        }
    }
}

impl Device {
    pub fn validate(&self) -> Result<()> {
        self.strip.validate()?;
        self.ground.validate()?;
        self.geometry.validate()?;
        self.layout.validate()?;
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if !same(self.strip.thickness, self.geometry.strip_t)
            || !same(self.ground.thickness, self.geometry.ground_t)
        {
            return Err(Error::domain(
                "network::Device",
                format!(
                    "film thicknesses disagree with geometry (strip {} vs {}, ground {} vs {})",
                    self.strip.thickness,
                    self.geometry.strip_t,
                    self.ground.thickness,
                    self.geometry.ground_t
                ),
            ));
        }
        if !(self.options.z_env.is_finite() && self.options.z_env > 0.0) {
            return Err(Error::domain("network::Device", "z_env must be > 0"));
        }
        Ok(())
    }

    /// Line cross-section parameters at one operating point.
    pub fn line_at(&self, env: &Environment, frequency: f64) -> Result<LineParams> {
        let opts = &self.options;
        let zs_strip = surface_impedance_with(
            &self.strip,
            env,
            frequency,
            opts.orientation,
            opts.mb_method,
        )?;
        let zs_ground = surface_impedance_with(
            &self.ground,
            env,
            frequency,
            opts.orientation,
            opts.mb_method,
        )?;
        line_params(
            &self.geometry,
            &zs_strip,
            &zs_ground,
            self.strip.alpha_ki,
            frequency,
        )
    }

    /// Chain matrix of the full cascade.
    pub fn total_abcd(&self, env: &Environment, frequency: f64) -> Result<TwoPort> {
        let line = self.line_at(env, frequency)?;
        let cell = unit_cell_with(&line, &self.layout, frequency, self.options.stub_model)?;
        Ok(cascade_power(cell, self.layout.n_cells))
    }

    /// Full pipeline at a single frequency.
    pub fn s21(&self, env: &Environment, frequency: f64) -> Result<Complex64> {
        let total = self.total_abcd(env, frequency)?;
        Ok(s21_from_abcd(&total, self.options.z_env))
    }
}

fn collect_sweep(freqs: &[f64], results: Vec<Result<Complex64>>) -> Result<Vec<Complex64>> {
    let failed = results.iter().filter(|r| r.is_err()).count();
    let total = results.len();
    let mut values = Vec::with_capacity(total);
    let mut first = None;
    for (f, r) in freqs.iter().zip(results) {
        match r {
            Ok(v) => values.push(v),
            Err(e) => {
                if first.is_none() {
                    first = Some((*f, e));
                }
            }
        }
    }
    match first {
        None => Ok(values),
        Some((frequency, e)) => Err(Error::Sweep {
            failed,
            total,
            frequency,
            first: Box::new(e),
        }),
    }
}

/// Complex S21 over `f_grid` (strictly increasing) at a fixed operating
/// point.
pub fn spectrum_sweep(device: &Device, env: &Environment, f_grid: &[f64]) -> Result<Spectrum> {
    spectrum_sweep_with(device, env, f_grid, Execution::default())
}

pub fn spectrum_sweep_with(
    device: &Device,
    env: &Environment,
    f_grid: &[f64],
    exec: Execution,
) -> Result<Spectrum> {
    device.validate()?;
    check_grid("network::spectrum_sweep", f_grid)?;
    let results = execution::map(exec, f_grid, |&f| device.s21(env, f));
    Spectrum::complex(f_grid.to_vec(), collect_sweep(f_grid, results)?)
}

/// Mean of 20 log10 |S21| over `f_grid`, at each operating point in `envs`.
///
/// All (operating point, frequency) pairs are evaluated independently.
pub fn mean_transmission_sweep(
    device: &Device,
    envs: &[Environment],
    f_grid: &[f64],
    exec: Execution,
) -> Result<Vec<f64>> {
    device.validate()?;
    if f_grid.is_empty() {
        return Err(Error::domain(
            "network::mean_transmission_sweep",
            "empty frequency grid",
        ));
    }
    let points: Vec<(usize, f64)> = (0..envs.len())
        .flat_map(|i| f_grid.iter().map(move |&f| (i, f)))
        .collect();
    let results = execution::map(exec, &points, |&(i, f)| device.s21(&envs[i], f));
    let freqs: Vec<f64> = points.iter().map(|p| p.1).collect();
    let values = collect_sweep(&freqs, results)?;
    Ok(values
        .chunks(f_grid.len())
        .map(|chunk| {
            chunk.iter().map(|s| 20.0 * s.norm().log10()).sum::<f64>() / chunk.len() as f64
        })
        .collect())
}

/// Result of a stopband search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandgap {
    /// Frequency of the smoothed minimum [Hz].
    pub center: f64,
    /// Edges of the dip region [Hz].
    pub f_low: f64,
    pub f_high: f64,
    /// Depth of the smoothed minimum below the spectrum's median [dB].
    pub depth_db: f64,
}

pub const BANDGAP_SMOOTHING: usize = 11;
pub const BANDGAP_MIN_DEPTH_DB: f64 = 10.0;

/// Locate the stopband center with the default 11-point smoothing and 10 dB
/// depth threshold.
pub fn bandgap_center(spectrum: &Spectrum) -> Option<Bandgap> {
    bandgap_center_with(spectrum, BANDGAP_SMOOTHING, BANDGAP_MIN_DEPTH_DB)
}

/// The |S21| dB trace is smoothed with a centered moving average; a dip is a
/// maximal run of points more than `min_depth_db` below the median of the
/// smoothed trace. The deepest dip wins and its smoothed minimum is returned.
pub fn bandgap_center_with(
    spectrum: &Spectrum,
    window: usize,
    min_depth_db: f64,
) -> Option<Bandgap> {
    let smoothed = moving_average(&spectrum.db_values(), window);
    let mut sorted = smoothed.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let threshold = median - min_depth_db;
    let freqs = spectrum.frequencies();

    let mut best: Option<Bandgap> = None;
    let mut i = 0;
    while i < n {
        if smoothed[i] >= threshold {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && smoothed[i] < threshold {
            i += 1;
        }
        let (k, &min) = smoothed[start..i]
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty run");
        let candidate = Bandgap {
            center: freqs[start + k],
            f_low: freqs[start],
            f_high: freqs[i - 1],
            depth_db: median - min,
        };
        if best.is_none_or(|b| candidate.depth_db > b.depth_db) {
            best = Some(candidate);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &TwoPort, b: &TwoPort, tol: f64) -> bool {
        let scale = a.max_norm().max(b.max_norm()).max(1.0);
        [(a.a, b.a), (a.b, b.b), (a.c, b.c), (a.d, b.d)]
            .iter()
            .all(|(x, y)| (x - y).norm() <= tol * scale)
    }

    fn lossy_line() -> LineParams {
        let mut line = LineParams::lossless(60.0, 2.0e4, 6e9);
        line.z0 = c(60.0, -0.4);
        line.gamma = c(3.0, 2.0e4);
        line
    }

    #[test]
    fn zero_length_line_is_identity() {
        assert_eq!(abcd_line(&lossy_line(), 0.0), TwoPort::identity());
        assert_eq!(abcd_stub(&lossy_line(), 0.0).unwrap(), TwoPort::identity());
    }

    #[test]
    fn lossless_line_magnitudes() {
        let line = LineParams::lossless(50.0, 1.0e4, 6e9);
        for i in 0..20 {
            let m = abcd_line(&line, i as f64 * 3.7e-5);
            assert!(m.a.norm() <= 1.0 + 1e-12);
            assert_relative_eq!(m.a.re, (1.0e4 * i as f64 * 3.7e-5).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn halves_compose_to_full_length() {
        let line = lossy_line();
        let half = abcd_line(&line, 1.3e-4);
        let full = abcd_line(&line, 2.6e-4);
        assert!(close(&(half * half), &full, 1e-12));
    }

    #[test]
    fn quarter_pi_stub_admittance() {
        let line = LineParams::lossless(50.0, 1.0e4, 6e9);
        let len = PI / 4.0 / 1.0e4;
        let m = abcd_stub(&line, len).unwrap();
        assert_relative_eq!(m.c.im, 2.0 / 50.0, max_relative = 1e-12);
        assert!(m.c.re.abs() < 1e-15);
        assert_eq!(m.det(), c(1.0, 0.0));
    }

    #[test]
    fn stub_resonance_is_reported() {
        let line = LineParams::lossless(50.0, 1.0, 6e9);
        let err = abcd_stub(&line, PI / 2.0).unwrap_err();
        assert!(matches!(err, Error::StubResonance { .. }));
        let layout = CellLayout {
            stub_spacing: 0.1,
            n_stubs: 1,
            n_cells: 1,
            l0: PI / 2.0,
            la: 0.0,
        };
        match unit_cell(&line, &layout, 6e9) {
            Err(Error::StubResonance {
                frequency: Some(f), ..
            }) => assert_eq!(f, 6e9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_gamma_stub_reduces_to_tan_when_lossless() {
        let line = LineParams::lossless(40.0, 3.0e4, 6e9);
        let a = abcd_stub_with(&line, 1.1e-5, StubModel::RealBeta).unwrap();
        let b = abcd_stub_with(&line, 1.1e-5, StubModel::ComplexGamma).unwrap();
        assert!((a.c - b.c).norm() < 1e-14 * a.c.norm());
    }

    #[test]
    fn unmodulated_single_stub_cell() {
        let line = lossy_line();
        let layout = CellLayout {
            stub_spacing: 2.0e-6,
            n_stubs: 1,
            n_cells: 1,
            l0: 9.0e-6,
            la: 0.0,
        };
        let cell = unit_cell(&line, &layout, 6e9).unwrap();
        let direct =
            abcd_line(&line, 1.0e-6) * abcd_stub(&line, 9.0e-6).unwrap() * abcd_line(&line, 2.0e-6);
        assert!(close(&cell, &direct, 1e-15));
    }

    #[test]
    fn power_edge_cases() {
        let m = abcd_line(&lossy_line(), 1e-4);
        assert_eq!(cascade_power(m, 0), TwoPort::identity());
        assert_eq!(cascade_power(m, 1), m);
    }

    #[test]
    fn s21_reference_values() {
        assert_eq!(s21_from_abcd(&TwoPort::identity(), 50.0), c(1.0, 0.0));
        let series = TwoPort {
            b: c(50.0, 0.0),
            ..TwoPort::identity()
        };
        assert_relative_eq!(
            s21_from_abcd(&series, 50.0).re,
            2.0 / 3.0,
            max_relative = 1e-15
        );
        let line = LineParams::lossless(50.0, 1.0e4, 6e9);
        let len = 1.234e-4;
        let s = s21_from_abcd(&abcd_line(&line, len), 50.0);
        assert_relative_eq!(s.norm(), 1.0, max_relative = 1e-12);
        let expected = -(1.0e4 * len);
        let phase_err = (s.arg() - expected).rem_euclid(2.0 * PI);
        assert!(phase_err < 1e-12 || 2.0 * PI - phase_err < 1e-12);
    }

    #[test]
    fn stub_lengths_follow_sinusoid() {
        let layout = CellLayout::default();
        let lens = layout.stub_lengths();
        assert_eq!(lens.len(), 59);
        assert_relative_eq!(*lens.last().unwrap(), layout.l0, max_relative = 1e-12);
        let max = lens.iter().cloned().fold(f64::MIN, f64::max);
        assert!(max <= layout.l0 + layout.la && max > layout.l0 + 0.99 * layout.la);
    }

    #[test]
    fn flat_spectrum_has_no_bandgap() {
        let freqs: Vec<f64> = (0..200).map(|i| 1e9 + i as f64 * 1e7).collect();
        let s = Spectrum::complex(freqs, vec![c(0.9, 0.1); 200]).unwrap();
        assert!(bandgap_center(&s).is_none());
    }

    #[test]
    fn synthetic_dip_is_located() {
        let freqs: Vec<f64> = (0..400).map(|i| 1e9 + i as f64 * 5e7).collect();
        let db: Vec<f64> = freqs
            .iter()
            .map(|f| {
                let x: f64 = (f - 11.3e9) / 0.4e9;
                -40.0 * (-x * x).exp() - 1.0
            })
            .collect();
        let s = Spectrum::db(freqs, db, crate::SpectrumKind::S21Db).unwrap();
        let gap = bandgap_center(&s).unwrap();
        assert!((gap.center - 11.3e9).abs() <= 5e7);
        assert!(gap.depth_db > 10.0);
        assert!(gap.f_low < gap.center && gap.center < gap.f_high);
    }

    #[test]
    fn device_validation_catches_thickness_mismatch() {
        let mut d = Device::default();
        assert!(d.validate().is_ok());
        d.geometry.strip_t = 40e-9;
        assert!(d.validate().is_err());
    }
}
