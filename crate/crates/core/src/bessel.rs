//! Bessel functions of the first kind for integer order.
//!
//! Evaluated by Miller's backward recurrence normalised with
//! `J_0 + 2 Σ J_2k = 1`, with the ascending power series used for small
//! arguments where the recurrence would start from a huge seed.

use thiserror::Error;

/// Largest order accepted by [`bessel_j`].
pub const MAX_ORDER: i32 = 200;
/// Largest argument accepted by [`bessel_j`].
pub const MAX_ARG: f64 = 50.0;

const SERIES_LIMIT: f64 = 1.0;
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BesselError {
    #[error("J_{order}({x}) is outside the supported domain |n| <= {MAX_ORDER}, 0 <= x <= {MAX_ARG}")]
    Domain { order: i32, x: f64 },
}

/// `J_n(x)` for integer `n` and `0 <= x <= 50`.
///
/// Negative orders use `J_{-n}(x) = (-1)^n J_n(x)`, so the reflection holds
/// bit-for-bit.
pub fn bessel_j(order: i32, x: f64) -> Result<f64, BesselError> {
    if order.abs() > MAX_ORDER || !(0.0..=MAX_ARG).contains(&x) {
        return Err(BesselError::Domain { order, x });
    }
    let n = order.unsigned_abs();
    let value = bessel_j_nonneg(n, x);
    if order < 0 && n % 2 == 1 {
        Ok(-value)
    } else {
        Ok(value)
    }
}

fn bessel_j_nonneg(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        return series(n, x);
    }
    miller(n, x)
}

/// Ascending series `Σ_k (-1)^k (x/2)^(2k+n) / (k! (n+k)!)`.
fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=n {
        term *= half / j as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term *= -q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        k += 1;
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x.ceil());
    let mut start = top as u32 + 20 + (60.0 * top).sqrt().ceil() as u32;
    if start % 2 == 1 {
        start += 1;
    }

    let two_over_x = 2.0 / x;
    let mut above = 0.0; // j_{k+1}
    let mut current = 1.0; // j_k
    let mut result = if start == n { current } else { 0.0 };
    let mut norm = 0.0;

    let mut k = start;
    while k > 0 {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        k -= 1;
        if k == n {
            result = current;
        }
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            result *= RESCALE_BY;
            norm *= RESCALE_BY;
        }
    }
    norm += current;
    result / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(-3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_outside_domain() {
        assert!(bessel_j(201, 1.0).is_err());
        assert!(bessel_j(-201, 1.0).is_err());
        assert!(bessel_j(0, 50.1).is_err());
        assert!(bessel_j(0, -0.1).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_j(200, 50.0).is_ok());
    }

    #[test]
    fn reflection_is_exact() {
        for n in 0..=60 {
            for &x in &[0.3, 1.0, 2.5, 7.75, 19.0, 42.0] {
                let pos = bessel_j(n, x).unwrap();
                let neg = bessel_j(-n, x).unwrap();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(neg, sign * pos);
            }
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        for n in 0..12 {
            let s = series(n, 1.0);
            let m = miller(n, 1.0);
            assert!((s - m).abs() < 1e-15, "n={n}: {s} vs {m}");
        }
    }
}
