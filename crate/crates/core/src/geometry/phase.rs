use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// `|n_s|` and its first two `s`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffractivePhaseState {
    pub r1: f64,
    pub r2: f64,
    pub s: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

fn check_radii(r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.0 && r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
        return Err(invalid(format!("radii must be positive and finite, got ({r1}, {r2})")));
    }
    Ok(())
}

pub fn dist_diff(r1: f64, r2: f64, s: f64) -> Result<DiffractivePhaseState> {
    check_radii(r1, r2)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(invalid(format!("s must be finite and nonnegative, got {s}")));
    }
    let p = r1 * r2;
    let sh = (0.5 * s).sinh();
    // r1^2 + r2^2 + 2 r1 r2 cosh s = (r1 + r2)^2 + 4 r1 r2 sinh^2(s/2)
    let value = ((r1 + r2).powi(2) + 4.0 * p * sh * sh).sqrt();
    let d1 = p * s.sinh() / value;
    let d2 = p * s.cosh() / value - (p * s.sinh()).powi(2) / value.powi(3);
    Ok(DiffractivePhaseState { r1, r2, s, value, d1, d2 })
}

/// Analytic continuation of `|n_s|` to complex `s` (principal square root).
#[inline]
pub fn n_s_complex(r1: f64, r2: f64, s: Complex64) -> Complex64 {
    let sh = (0.5 * s).sinh();
    (Complex64::from((r1 + r2).powi(2)) + 4.0 * r1 * r2 * sh * sh).sqrt()
}

/// `b = sqrt(2) sin((dtheta + pi) / 2)`.
pub fn b_param(dtheta: f64) -> f64 {
    std::f64::consts::SQRT_2 * (0.5 * (dtheta + std::f64::consts::PI)).sin()
}

/// Result of the quadratic (Morse) reparametrisation of the phase near `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseChange {
    pub s_tilde: f64,
    /// `ds / ds_tilde`.
    pub jacobian: f64,
}

/// `s_tilde` with `|n_s| - (r1 + r2) = r1 r2 s_tilde^2` exactly.
///
/// Since `|n_s| - (r1+r2) = 4 r1 r2 sinh^2(s/2) / (|n_s| + r1 + r2)`, this is
/// `s_tilde = 2 sinh(s/2) / (|n_s| + r1 + r2)^{1/2}`, regular at `s = 0` with
/// `ds/ds_tilde = (2 (r1 + r2))^{1/2}` there.
pub fn morse_change(r1: f64, r2: f64, s: f64) -> Result<MorseChange> {
    check_radii(r1, r2)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("Morse change only applies on [0, 1], got s = {s}")));
    }
    let st = dist_diff(r1, r2, s)?;
    let m = st.value + r1 + r2;
    let sh = (0.5 * s).sinh();
    let ch = (0.5 * s).cosh();
    let s_tilde = 2.0 * sh / m.sqrt();
    let dst = ch / m.sqrt() - sh * st.d1 / m.powf(1.5);
    Ok(MorseChange { s_tilde, jacobian: 1.0 / dst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    #[test]
    fn dist_diff_at_origin() {
        let st = dist_diff(0.7, 1.9, 0.0).unwrap();
        assert!((st.value - 2.6).abs() < 1e-15);
        assert_eq!(st.d1, 0.0);
        let st = dist_diff(1.0, 1.0, 0.0).unwrap();
        assert!((st.d2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dist_diff_direct_formula() {
        let st = dist_diff(1.0, 2.0, 1.0).unwrap();
        let direct = (5.0 + 4.0 * 1f64.cosh()).sqrt();
        assert!((st.value - direct).abs() < 1e-12);
        assert!(dist_diff(0.0, 1.0, 0.5).is_err());
        assert!(dist_diff(1.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &(r1, r2, s) in &[(0.3, 0.9, 0.2), (2.0, 0.5, 1.7), (1.0, 1.0, 4.0)] {
            let h = 1e-5;
            let f = |t: f64| dist_diff(r1, r2, t).unwrap().value;
            let st = dist_diff(r1, r2, s).unwrap();
            let d1 = (f(s + h) - f(s - h)) / (2.0 * h);
            let d2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
            assert!((st.d1 - d1).abs() < 1e-8, "{} {}", st.d1, d1);
            assert!((st.d2 - d2).abs() < 1e-4, "{} {}", st.d2, d2);
        }
    }

    #[test]
    fn complex_continuation_agrees_on_axis() {
        let z = n_s_complex(0.4, 1.1, Complex64::new(2.3, 0.0));
        assert!((z.re - dist_diff(0.4, 1.1, 2.3).unwrap().value).abs() < 1e-14);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn b_param_examples() {
        assert!((b_param(0.0) - SQRT_2).abs() < 1e-15);
        assert!(b_param(-PI).abs() < 1e-15);
        assert!((b_param(FRAC_PI_2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn morse_change_examples() {
        let m = morse_change(0.5, 1.5, 0.0).unwrap();
        assert_eq!(m.s_tilde, 0.0);
        assert!((m.jacobian - 2.0).abs() < 1e-15);
        let m = morse_change(1.0, 1.0, 0.0).unwrap();
        assert!((m.jacobian - 2.0).abs() < 1e-15);
        let m = morse_change(1.0, 2.0, 0.5).unwrap();
        let lhs = 2.0 * m.s_tilde * m.s_tilde;
        let rhs = dist_diff(1.0, 2.0, 0.5).unwrap().value - 3.0;
        assert!((lhs - rhs).abs() < 1e-10);
        assert!(morse_change(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn morse_jacobian_matches_numerical_derivative() {
        let (r1, r2) = (0.3, 0.8);
        for &s in &[0.05, 0.4, 0.9] {
            let h = 1e-6;
            let f = |t: f64| morse_change(r1, r2, t).unwrap().s_tilde;
            let dst = (f(s + h) - f(s - h)) / (2.0 * h);
            let j = morse_change(r1, r2, s).unwrap().jacobian;
            assert!((j - 1.0 / dst).abs() < 1e-7);
        }
    }

    proptest::proptest! {
        #[test]
        fn n_s_dominates_free_distance(r1 in 0.01f64..20.0, r2 in 0.01f64..20.0, s in 0.0f64..8.0, dt in -6.0f64..6.0) {
            let n = dist_diff(r1, r2, s).unwrap();
            proptest::prop_assert!(n.value >= r1 + r2 - 1e-12);
            proptest::prop_assert!(n.d1 >= 0.0);
            proptest::prop_assert!(n.value >= super::super::dist_geo(r1, r2, dt).unwrap() - 1e-12);
        }

        #[test]
        fn morse_is_increasing(r1 in 0.05f64..2.0, r2 in 0.05f64..2.0, s in 0.0f64..0.99) {
            let a = morse_change(r1, r2, s).unwrap().s_tilde;
            let b = morse_change(r1, r2, s + 0.01).unwrap().s_tilde;
            proptest::prop_assert!(b > a);
        }
    }
}
