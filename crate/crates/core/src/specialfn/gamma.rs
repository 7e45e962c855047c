use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `sin(pi x)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Gamma function: Lanczos approximation with reflection below 1/2.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if is_pole(x) {
        return Err(Error::Pole { nearest: x as i64 });
    }
    if x.is_nan() {
        return Err(Error::InvalidInput("Gamma of NaN".into()));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * lanczos(1.0 - x)))
    } else if x > 171.7 {
        Ok(f64::INFINITY)
    } else {
        Ok(lanczos(x))
    }
}

/// `1 / Gamma(x)`, zero at the poles.
pub(crate) fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        0.0
    } else if x < 0.5 {
        sin_pi(x) * lanczos(1.0 - x) / PI
    } else {
        1.0 / lanczos(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-12 * PI.sqrt());
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12 * 24.0);
        assert!((gamma_fn(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-12 * 4.0);
    }

    #[test]
    fn recursion_self_check() {
        for &x in &[3.7, 1.25, 0.3, -1.4, 12.5] {
            let lhs = gamma_fn(x).unwrap();
            let rhs = (x - 1.0) * gamma_fn(x - 1.0).unwrap();
            assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs(), "{x}");
        }
    }

    #[test]
    fn poles_report_nearest_integer() {
        match gamma_fn(-3.0) {
            Err(Error::Pole { nearest }) => assert_eq!(nearest, -3),
            other => panic!("{other:?}"),
        }
        assert!(gamma_fn(0.0).is_err());
        assert_eq!(rgamma(-2.0), 0.0);
        assert!((rgamma(4.0) - 1.0 / 6.0).abs() < 1e-15);
    }
}
