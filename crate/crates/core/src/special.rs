//! Special functions needed by the pair-breaking fit.

/// psi(1/2) = -gamma - 2 ln 2.
pub const DIGAMMA_HALF: f64 = -1.963_510_026_021_423_5;

/// Digamma function psi(x) for real x > 0.
///
/// Shifts the argument above 10 with the recurrence psi(x) = psi(x+1) - 1/x
/// and then applies the asymptotic series.
pub fn digamma(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return f64::NAN;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_2k / (2k x^2k) for k = 1..7.
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 * inv - series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((digamma(0.5) - DIGAMMA_HALF).abs() < 1e-14);
        assert!((digamma(1.0) + 0.577_215_664_901_532_9).abs() < 1e-14);
        assert!((digamma(10.0) - 2.251_752_589_066_721).abs() < 1e-14);
        assert!((digamma(0.1) + 10.423_754_940_411_076).abs() < 1e-12);
    }

    #[test]
    fn recurrence_holds() {
        for i in 1..400 {
            let x = 0.037 * i as f64;
            let lhs = digamma(x + 1.0);
            let rhs = digamma(x) + 1.0 / x;
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn non_positive_is_nan() {
        assert!(digamma(0.0).is_nan());
        assert!(digamma(-1.5).is_nan());
    }
}
