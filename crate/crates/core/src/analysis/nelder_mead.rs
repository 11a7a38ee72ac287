//! Derivative-free simplex minimizer and a bilinear lookup surface to run it on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping rule and starting simplex for [`nelder_mead`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Stop once max - min of the vertex values is below this...
    pub f_tol: f64,
    /// ...and no vertex is farther than this from the best one (max norm).
    /// Zero disables the size test.
    pub x_tol: f64,
    /// Offset of each initial vertex along its axis. Empty means 5% of the
    /// start coordinate (0.00025 for a zero coordinate).
    pub simplex_scale: Vec<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 2000,
            f_tol: 1e-12,
            x_tol: 1e-9,
            simplex_scale: Vec::new(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        const OP: &str = "analysis::nelder_mead";
        if self.max_iters < 1 {
            return Err(Error::domain(OP, "max_iters must be >= 1"));
        }
        if !(self.f_tol > 0.0) {
            return Err(Error::domain(OP, "f_tol must be > 0"));
        }
        if !(self.x_tol >= 0.0) {
            return Err(Error::domain(OP, "x_tol must be >= 0"));
        }
        if !self.simplex_scale.is_empty() && self.simplex_scale.len() != dim {
            return Err(Error::domain(
                OP,
                format!(
                    "simplex_scale has {} entries for a {dim}-dimensional start",
                    self.simplex_scale.len()
                ),
            ));
        }
        if self
            .simplex_scale
            .iter()
            .any(|s| !s.is_finite() || *s == 0.0)
        {
            return Err(Error::domain(
                OP,
                "simplex_scale entries must be finite and non-zero",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub iterations: usize,
    /// False when `max_iters` was reached first.
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            point: x.to_vec(),
            value: v,
        })
    }
}

/// Move from the centroid `c` along `c - worst` by `coef`.
fn along(c: &[f64], worst: &[f64], coef: f64) -> Vec<f64> {
    c.iter()
        .zip(worst)
        .map(|(ci, wi)| ci + coef * (ci - wi))
        .collect()
}

/// Minimize `f` starting from `start`.
pub fn nelder_mead<F>(mut f: F, start: &[f64], config: &OptimizerConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    if n == 0 {
        return Err(Error::domain("analysis::nelder_mead", "empty start point"));
    }
    config.validate(n)?;

    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut v = start.to_vec();
        let step = match config.simplex_scale.get(i) {
            Some(s) => *s,
            None if start[i] != 0.0 => 0.05 * start[i],
            None => 0.00025,
        };
        v[i] += step;
        simplex.push(v);
    }
    let mut values = Vec::with_capacity(n + 1);
    for v in &simplex {
        values.push(eval(&mut f, v)?);
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // Stable sort keeps the order deterministic for equal values.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if values[n] - values[0] < config.f_tol && size <= config.x_tol {
            converged = true;
            break;
        }
        if iterations >= config.max_iters {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let xr = along(&centroid, &simplex[n], REFLECT);
        let fr = eval(&mut f, &xr)?;
        if fr < values[0] {
            let xe = along(&centroid, &simplex[n], EXPAND);
            let fe = eval(&mut f, &xe)?;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        // Contract outside when the reflection beat the worst vertex, inside otherwise.
        let (xc, fc) = if fr < values[n] {
            let xc = along(&centroid, &simplex[n], REFLECT * CONTRACT);
            let fc = eval(&mut f, &xc)?;
            (xc, fc)
        } else {
            let xc = along(&centroid, &simplex[n], -CONTRACT);
            let fc = eval(&mut f, &xc)?;
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = best
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + SHRINK * (x - b))
                .collect();
            values[i] = eval(&mut f, &simplex[i])?;
        }
    }

    Ok(Minimum {
        best_point: simplex[0].clone(),
        best_value: values[0],
        iterations,
        converged,
    })
}

/// Run [`nelder_mead`] from each start and keep the lowest result.
/// Earlier starts win ties.
pub fn nelder_mead_multistart<F>(
    mut f: F,
    starts: &[Vec<f64>],
    config: &OptimizerConfig,
) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best: Option<Minimum> = None;
    for s in starts {
        let m = nelder_mead(&mut f, s, config)?;
        if best.as_ref().is_none_or(|b| m.best_value < b.best_value) {
            best = Some(m);
        }
    }
    best.ok_or_else(|| Error::domain("analysis::nelder_mead", "no starting points"))
}

/// Values on a rectangular grid, `values[i][j]` at `(x[i], y[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    x: Vec<f64>,
    y: Vec<f64>,
    values: Vec<Vec<f64>>,
}

fn bracket(axis: &[f64], v: f64) -> (usize, f64) {
    let v = v.clamp(axis[0], axis[axis.len() - 1]);
    let i = match axis.partition_point(|&a| a <= v) {
        0 => 0,
        k => (k - 1).min(axis.len() - 2),
    };
    (i, (v - axis[i]) / (axis[i + 1] - axis[i]))
}

impl Grid2 {
    pub fn new(x: Vec<f64>, y: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        const OP: &str = "analysis::Grid2";
        for axis in [&x, &y] {
            if axis.len() < 2 || axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::domain(
                    OP,
                    "axes need >= 2 strictly increasing nodes",
                ));
            }
        }
        if values.len() != x.len() || values.iter().any(|row| row.len() != y.len()) {
            return Err(Error::domain(OP, "values shape does not match the axes"));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain(OP, "values must be finite"));
        }
        Ok(Grid2 { x, y, values })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Bilinear interpolation; points outside are clamped to the edge.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let (i, tx) = bracket(&self.x, x);
        let (j, ty) = bracket(&self.y, y);
        let v = &self.values;
        (1.0 - tx) * (1.0 - ty) * v[i][j]
            + tx * (1.0 - ty) * v[i + 1][j]
            + (1.0 - tx) * ty * v[i][j + 1]
            + tx * ty * v[i + 1][j + 1]
    }

    /// Maximize the interpolated surface with one simplex run per start.
    /// `best_value` is the surface value at the returned point, not its negation.
    pub fn maximize(&self, starts: &[Vec<f64>], config: &OptimizerConfig) -> Result<Minimum> {
        let m = nelder_mead_multistart(|p| -self.bilinear(p[0], p[1]), starts, config)?;
        let (cx, cy) = (
            m.best_point[0].clamp(self.x[0], self.x[self.x.len() - 1]),
            m.best_point[1].clamp(self.y[0], self.y[self.y.len() - 1]),
        );
        Ok(Minimum {
            best_point: vec![cx, cy],
            best_value: self.bilinear(cx, cy),
            ..m
        })
    }
}
