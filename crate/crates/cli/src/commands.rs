//! One function per subcommand. Each writes its CSV and returns the
//! headline numbers for stdout and the manifest.

use std::path::Path;

use kitwpa_core::analysis::{figures_of_merit, load_spectrum};
use kitwpa_core::critical_field::{
    ag_fit_with, ag_optimizer, coherence_length, linear_fit_intercepts, whh_bc0, TcFieldData,
};
use kitwpa_core::materials::Environment;
use kitwpa_core::network::{bandgap_center, mean_transmission_sweep, spectrum_sweep_with};
use kitwpa_core::noise::{
    cascade_loss_for_temp, crossover_temperature, delta_snr, delta_snr_band_mean,
    vortex_entry_field,
};
use kitwpa_core::spectrum::{Spectrum, SpectrumKind};
use toml::{Table, Value};

use crate::config::{Config, FieldAxis};
use crate::output::{header_comments, write_spectrum, write_table, Cell};
use crate::CliError;

pub const NBTIN_DATA: &str = include_str!("../data/nbtin_tc_vs_b.csv");
pub const NB_DATA: &str = include_str!("../data/nb_tc_vs_b.csv");

/// Headline results, in output order.
#[derive(Default)]
pub struct Report {
    pub notes: Vec<String>,
    pub results: Table,
    order: Vec<String>,
}

impl Report {
    fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.order.push(key.to_string());
        self.results.insert(key.to_string(), value.into());
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// `key: value` lines in insertion order.
    pub fn lines(&self) -> Vec<String> {
        self.order
            .iter()
            .map(|k| match &self.results[k] {
                Value::Float(x) => format!("{k}: {}", kitwpa_core::spectrum::fmt_f64(*x)),
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect()
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

const EXTRAPOLATION_NOTE: &str =
    "both field components are nonzero; the two gap suppression factors are multiplied (extrapolation)";

pub fn spectrum(cfg: &Config, out: &Path, db: bool) -> Result<Report, CliError> {
    let mut report = Report::default();
    if cfg.environment.is_field_extrapolation() {
        report.note(EXTRAPOLATION_NOTE);
    }
    let grid = cfg.sweep.frequency.values("frequency").map_err(usage)?;
    let s = spectrum_sweep_with(&cfg.device(), &cfg.environment, &grid, cfg.run.execution)?;
    let s = if db {
        Spectrum::db(grid, s.db_values(), SpectrumKind::S21Db)?
    } else {
        s
    };
    write_spectrum(out, &header_comments("spectrum", cfg, &report.notes), &s)?;
    let mean = s.db_values().iter().sum::<f64>() / s.len() as f64;
    report.put("points", s.len() as i64);
    report.put("mean_s21_db", mean);
    Ok(report)
}

pub fn sweep_temp(cfg: &Config, out: &Path) -> Result<Report, CliError> {
    let mut report = Report::default();
    let temps = cfg.sweep.temperature.values("temperature").map_err(usage)?;
    let grid = cfg.sweep.frequency.values("frequency").map_err(usage)?;
    let envs: Vec<Environment> = temps
        .iter()
        .map(|&t| Environment {
            temperature: t,
            ..cfg.environment
        })
        .collect();
    if envs.iter().any(Environment::is_field_extrapolation) {
        report.note(EXTRAPOLATION_NOTE);
    }
    let means = mean_transmission_sweep(&cfg.device(), &envs, &grid, cfg.run.execution)?;
    let rows: Vec<Vec<Cell>> = temps
        .iter()
        .zip(&means)
        .map(|(t, m)| vec![Cell::Num(*t), Cell::Num(*m)])
        .collect();
    write_table(
        out,
        &header_comments("sweep-temp", cfg, &report.notes),
        "temperature_k,mean_s21_db",
        &rows,
    )?;
    report.put("points", temps.len() as i64);
    report.put("mean_s21_db_first", means[0]);
    report.put("mean_s21_db_last", means[means.len() - 1]);
    Ok(report)
}

pub fn sweep_field(cfg: &Config, out: &Path, axis: FieldAxis) -> Result<Report, CliError> {
    let mut report = Report::default();
    let f = &cfg.sweep.field;
    let fields = crate::config::Grid::new(f.start, f.stop, f.points)
        .values("field")
        .map_err(usage)?;
    let grid = cfg.sweep.frequency.values("frequency").map_err(usage)?;
    let envs: Vec<Environment> = fields
        .iter()
        .map(|&b| match axis {
            FieldAxis::Perp => Environment {
                b_perp: b,
                ..cfg.environment
            },
            FieldAxis::Par => Environment {
                b_par: b,
                ..cfg.environment
            },
        })
        .collect();
    if envs.iter().any(Environment::is_field_extrapolation) {
        report.note(EXTRAPOLATION_NOTE);
    }
    let means = mean_transmission_sweep(&cfg.device(), &envs, &grid, cfg.run.execution)?;
    let column = match axis {
        FieldAxis::Perp => "b_perp_t",
        FieldAxis::Par => "b_par_t",
    };
    let rows: Vec<Vec<Cell>> = fields
        .iter()
        .zip(&means)
        .map(|(b, m)| vec![Cell::Num(*b), Cell::Num(*m)])
        .collect();
    write_table(
        out,
        &header_comments("sweep-field", cfg, &report.notes),
        &format!("{column},mean_s21_db"),
        &rows,
    )?;
    report.put("axis", column.trim_end_matches("_t"));
    report.put("points", fields.len() as i64);
    report.put("mean_s21_db_first", means[0]);
    report.put("mean_s21_db_last", means[means.len() - 1]);
    Ok(report)
}

pub fn bandgap(cfg: &Config, out: &Path) -> Result<Report, CliError> {
    let mut report = Report::default();
    if cfg.environment.is_field_extrapolation() {
        report.note(EXTRAPOLATION_NOTE);
    }
    let grid = cfg.sweep.bandgap.values("bandgap").map_err(usage)?;
    let s = spectrum_sweep_with(&cfg.device(), &cfg.environment, &grid, cfg.run.execution)?;
    let db = Spectrum::db(grid, s.db_values(), SpectrumKind::S21Db)?;
    write_spectrum(out, &header_comments("bandgap", cfg, &report.notes), &db)?;
    match bandgap_center(&db) {
        Some(gap) => {
            report.put("found", true);
            report.put("center_hz", gap.center);
            report.put("f_low_hz", gap.f_low);
            report.put("f_high_hz", gap.f_high);
            report.put("depth_db", gap.depth_db);
        }
        None => report.put("found", false),
    }
    Ok(report)
}

/// First zero crossing on the sampled curve, refined linearly.
fn grid_crossing(x: &[f64], y: &[f64]) -> Option<f64> {
    (1..x.len()).find_map(|i| {
        if y[i - 1] == 0.0 {
            Some(x[i - 1])
        } else if y[i - 1].signum() != y[i].signum() {
            Some(x[i - 1] + (x[i] - x[i - 1]) * y[i - 1] / (y[i - 1] - y[i]))
        } else {
            None
        }
    })
}

pub fn dsnr_model(cfg: &Config, out: &Path, band: bool) -> Result<Report, CliError> {
    let mut report = Report::default();
    let d = &cfg.sweep.dsnr;
    let band = band || d.band_average;
    let temps = d.temperature.values("dsnr.temperature").map_err(usage)?;
    let mut values = Vec::with_capacity(temps.len());
    for &t in &temps {
        let v = if band {
            delta_snr_band_mean(&cfg.noise, d.band.start, d.band.stop, d.band.points, t)?
        } else {
            delta_snr(&cfg.noise, d.f_signal, t)?
        };
        values.push(v);
    }
    let mode = if band {
        format!(
            "band mean over {}-{} Hz ({} points)",
            d.band.start, d.band.stop, d.band.points
        )
    } else {
        format!("single signal frequency {} Hz", d.f_signal)
    };
    report.note(format!("dsnr mode: {mode}"));
    let rows: Vec<Vec<Cell>> = temps
        .iter()
        .zip(&values)
        .map(|(t, v)| vec![Cell::Num(*t), Cell::Num(*v)])
        .collect();
    write_table(
        out,
        &header_comments("dsnr-model", cfg, &report.notes),
        "temperature_k,dsnr_db",
        &rows,
    )?;

    report.put("dsnr_db_first", values[0]);
    let t_lo = temps[0];
    let t_hi = temps[temps.len() - 1];
    let crossing = if band {
        grid_crossing(&temps, &values)
    } else {
        crossover_temperature(&cfg.noise, d.f_signal, 0.0, t_lo, t_hi)?
    };
    match crossing {
        Some(t) => report.put("zero_db_crossing_k", t),
        None => report.put("zero_db_crossing_k", "none in range"),
    }
    let c = &cfg.cascade;
    let loss = cascade_loss_for_temp(c.t_amp, c.t_effective, c.t_attenuator)?;
    report.put("cascade_loss_db", loss);
    Ok(report)
}

pub fn vortex_field(cfg: &Config, out: &Path) -> Result<Report, CliError> {
    let mut report = Report::default();
    let hs = vortex_entry_field(&cfg.vortex)?;
    write_table(
        out,
        &header_comments("vortex-field", cfg, &[]),
        "width_m,coherence_length_m,entry_field_t",
        &[vec![
            Cell::Num(cfg.vortex.width),
            Cell::Num(cfg.vortex.coherence_len),
            Cell::Num(hs),
        ]],
    )?;
    report.put("entry_field_t", hs);
    report.put("entry_field_mt", format!("{:.1}", hs * 1e3));
    Ok(report)
}

pub enum FitSource<'a> {
    File(&'a Path),
    Packaged {
        name: &'static str,
        text: &'static str,
    },
}

pub fn fit_bc(
    cfg: &Config,
    out: &Path,
    source: FitSource,
    tc0: Option<f64>,
) -> Result<Report, CliError> {
    let mut report = Report::default();
    let (label, data) = match source {
        FitSource::File(p) => {
            let file = std::fs::File::open(p)
                .map_err(|e| usage(format!("cannot read '{}': {e}", p.display())))?;
            (
                p.display().to_string(),
                TcFieldData::read_csv(std::io::BufReader::new(file))?,
            )
        }
        FitSource::Packaged { name, text } => (
            format!("packaged:{name}"),
            TcFieldData::read_csv(text.as_bytes())?,
        ),
    };
    let tc0 = match tc0.or((cfg.fit.tc0 > 0.0).then_some(cfg.fit.tc0)) {
        Some(t) => t,
        None => data
            .points()
            .iter()
            .find(|p| p.0 == 0.0)
            .map(|p| p.1)
            .ok_or_else(|| usage("no B = 0 sample; pass --tc0 or set fit.tc0".into()))?,
    };
    report.note(format!("data: {label}"));

    let line = linear_fit_intercepts(&data)?;
    let mut opt = ag_optimizer();
    opt.max_iters = cfg.fit.max_iters;
    let ag = ag_fit_with(&data, tc0, cfg.fit.scaling, &opt)?;
    let bc = ag.fit.bc_zero_tc;
    let xi = coherence_length(bc);
    let whh = whh_bc0(tc0, line.slope);

    let rows = vec![
        ("tc0", tc0, "K"),
        ("bc_fit", bc, "T"),
        ("fit_residual_rms", ag.residual_rms, "K"),
        ("coherence_length", xi, "m"),
        ("linear_b_intercept", line.b_intercept, "T"),
        ("linear_tc_intercept", line.tc_intercept, "K"),
        ("linear_slope", line.slope, "T/K"),
        ("whh_bc0", whh, "T"),
        ("bc_fit_over_b_intercept", bc / line.b_intercept, "1"),
    ];
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|(k, v, u)| {
            vec![
                Cell::Text(k.to_string()),
                Cell::Num(*v),
                Cell::Text(u.to_string()),
            ]
        })
        .collect();
    write_table(
        out,
        &header_comments("fit-bc", cfg, &report.notes),
        "quantity,value,unit",
        &table,
    )?;

    report.put("bc_fit_t", bc);
    report.put("coherence_length_nm", xi * 1e9);
    report.put("whh_bc0_t", whh);
    report.put("linear_b_intercept_t", line.b_intercept);
    report.put("fit_residual_rms_k", ag.residual_rms);
    report.put("iterations", ag.iterations as i64);
    Ok(report)
}

pub fn analyze(
    cfg: &Config,
    out: &Path,
    input: &Path,
    gain: Option<&Path>,
    kind: Option<SpectrumKind>,
) -> Result<Report, CliError> {
    let mut report = Report::default();
    let retag = |s: Spectrum, k: SpectrumKind| -> Result<Spectrum, CliError> {
        let values = s.db_values();
        Ok(Spectrum::db(s.frequencies().to_vec(), values, k)?)
    };
    let mut dsnr = load_spectrum(input)?;
    if let Some(k) = kind {
        dsnr = retag(dsnr, k)?;
    }
    let gain = match gain {
        Some(p) => {
            let g = load_spectrum(p)?;
            Some(if g.kind() == SpectrumKind::GainDb {
                g
            } else {
                retag(g, SpectrumKind::GainDb)?
            })
        }
        None => None,
    };
    report.note(format!("input: {}", input.display()));
    let fom = figures_of_merit(&dsnr, gain.as_ref(), &cfg.fom)?;

    let opt = |v: Option<f64>| v.map_or(Cell::Text("none".into()), Cell::Num);
    let mut rows = vec![
        vec![
            Cell::Text("dsnr_mode".into()),
            Cell::Num(fom.dsnr_mode),
            Cell::Text("dB".into()),
        ],
        vec![
            Cell::Text("bw_total".into()),
            Cell::Num(fom.bw_total),
            Cell::Text("Hz".into()),
        ],
        vec![
            Cell::Text("mean_dsnr_in_bw".into()),
            opt(fom.mean_dsnr_in_bw),
            Cell::Text("dB".into()),
        ],
        vec![
            Cell::Text("mean_gain_in_bw".into()),
            opt(fom.mean_gain_in_bw),
            Cell::Text("dB".into()),
        ],
        vec![
            Cell::Text("q25".into()),
            opt(fom.q25),
            Cell::Text("dB".into()),
        ],
        vec![
            Cell::Text("q75".into()),
            opt(fom.q75),
            Cell::Text("dB".into()),
        ],
    ];
    for (i, (lo, hi)) in fom.bw_regions.iter().enumerate() {
        rows.push(vec![
            Cell::Text(format!("region_{}_f_low", i + 1)),
            Cell::Num(*lo),
            Cell::Text("Hz".into()),
        ]);
        rows.push(vec![
            Cell::Text(format!("region_{}_f_high", i + 1)),
            Cell::Num(*hi),
            Cell::Text("Hz".into()),
        ]);
    }
    write_table(
        out,
        &header_comments("analyze", cfg, &report.notes),
        "quantity,value,unit",
        &rows,
    )?;

    report.put("dsnr_mode_db", fom.dsnr_mode);
    report.put("bw_total_hz", fom.bw_total);
    report.put("bw_regions", fom.bw_regions.len() as i64);
    let put_opt = |r: &mut Report, k: &str, v: Option<f64>| match v {
        Some(x) => r.put(k, x),
        None => r.put(k, "none"),
    };
    put_opt(&mut report, "mean_dsnr_in_bw_db", fom.mean_dsnr_in_bw);
    put_opt(&mut report, "mean_gain_in_bw_db", fom.mean_gain_in_bw);
    put_opt(&mut report, "q25_db", fom.q25);
    put_opt(&mut report, "q75_db", fom.q75);
    Ok(report)
}
