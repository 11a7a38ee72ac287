//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//!
//! Interval selection follows the usual QUADPACK `qag` strategy: the
//! sub-interval with the largest error estimate is bisected until the summed
//! error drops below the requested tolerance. Endpoint singularities are not
//! treated here; callers remove them with a change of variables first.

/// Stopping criteria for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 0.0,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
    pub converged: bool,
}

// Kronrod abscissae on [-1, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over `[a, b]` to the given tolerance.
///
/// Never panics on a difficult integrand: when the interval budget runs out
/// or bisection reaches machine resolution the best estimate is returned
/// with `converged = false`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Estimate {
    if a == b {
        return Estimate {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
            converged: true,
        };
    }

    let mut segments = vec![gauss_kronrod_15(&f, a, b)];
    let mut total = segments[0].value;
    let mut total_err = segments[0].error;

    loop {
        let target = tol.abs.max(tol.rel * total.abs());
        if total_err <= target {
            return Estimate {
                value: total,
                abs_error: total_err,
                intervals: segments.len(),
                converged: true,
            };
        }
        if segments.len() >= tol.max_intervals {
            break;
        }

        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, s)| {
                    if s.error > best.1 {
                        (i, s.error)
                    } else {
                        best
                    }
                });
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            break;
        }

        let left = gauss_kronrod_15(&f, seg.a, mid);
        let right = gauss_kronrod_15(&f, mid, seg.b);
        total += left.value + right.value - seg.value;
        total_err += left.error + right.error - seg.error;
        segments[worst] = left;
        segments.push(right);

        // Re-sum now and then so cancellation in the running totals cannot drift.
        if segments.len() % 64 == 0 {
            total = segments.iter().map(|s| s.value).sum();
            total_err = segments.iter().map(|s| s.error).sum();
        }
    }

    let value = segments.iter().map(|s| s.value).sum::<f64>();
    let abs_error = segments.iter().map(|s| s.error).sum::<f64>();
    Estimate {
        value,
        abs_error,
        intervals: segments.len(),
        converged: abs_error <= tol.abs.max(tol.rel * value.abs()),
    }
}
