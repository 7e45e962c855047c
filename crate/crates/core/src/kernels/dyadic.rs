use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::half_shadow_angle;
use crate::error::{invalid, Error, Result};
use crate::geometry::{n_s_complex, FluxProfile};
use crate::quadrature::{integrate_adaptive, integrate_oscillatory_s, Amplitude, OscillatorySpec, QuadResult};

/// Symbol `a(r)` multiplying the amplitude; evaluated at `2^j |n_s|`, which is
/// complex on the deformed part of the path.
pub type Symbol<'a> = &'a (dyn Fn(Complex64) -> Complex64 + Sync);

const STEP_LO: f64 = 3.0 / 8.0;
const STEP_HI: f64 = 2.0 / 3.0;

fn smooth_step(u: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        h(u) / (h(u) + h(1.0 - u))
    }
}

/// Smooth cutoff: one on `t <= 3/8`, zero on `t >= 2/3`.
fn cutoff(t: f64) -> f64 {
    smooth_step((STEP_HI - t) / (STEP_HI - STEP_LO))
}

/// `beta(t) = cutoff(t/2) - cutoff(t)`, smooth and supported in `[3/8, 4/3]`.
pub fn bump_beta(t: f64) -> f64 {
    cutoff(0.5 * t) - cutoff(t)
}

/// `beta_0(r) = 1 - sum_{j >= 1} beta(2^{-j} r)`, which telescopes to `cutoff(r/2)`.
pub fn bump_beta0(r: f64) -> f64 {
    cutoff(0.5 * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicPiece {
    pub ell: u8,
    pub j: u32,
}

impl DyadicPiece {
    pub fn new(ell: u8, j: u32) -> Result<Self> {
        if !(1..=3).contains(&ell) {
            return Err(invalid(format!("ell must be 1, 2 or 3, got {ell}")));
        }
        Ok(DyadicPiece { ell, j })
    }

    pub fn bump(&self, r: f64) -> f64 {
        if self.j == 0 {
            bump_beta0(r)
        } else {
            bump_beta(r)
        }
    }

    pub fn frequency(&self) -> f64 {
        2f64.powi(self.j as i32)
    }

    /// `2^{-j(3/2 + delta)}` for signed `delta`.
    pub fn scale(&self, delta: f64) -> f64 {
        self.frequency().powf(-(1.5 + delta))
    }
}

/// The angular amplitude families of the diffractive kernel.
#[derive(Debug, Clone, Copy)]
struct Family {
    ell: u8,
    alpha: f64,
    sin2h: f64,
    sn: f64,
}

impl Family {
    fn new(ell: u8, alpha: f64, dtheta: f64) -> Self {
        let h = half_shadow_angle(dtheta);
        let (s, c) = h.sin_cos();
        Family { ell, alpha, sin2h: 2.0 * s * s, sn: 2.0 * s * c }
    }

    fn rate(&self) -> f64 {
        match self.ell {
            1 => self.alpha.abs(),
            _ => (1.0 - self.alpha.abs()).max(0.0),
        }
    }

    fn eval(&self, s: Complex64) -> Complex64 {
        let a = self.alpha;
        if self.ell == 1 {
            return (-a.abs() * s).exp();
        }
        let shs = (0.5 * s).sinh();
        let den = 2.0 * shs * shs + self.sin2h;
        if den == Complex64::new(0.0, 0.0) {
            // s = 0 on the shadow line: (e^{-s} - 1) sinh(as) / (2 sinh^2(s/2)) -> -2a.
            return Complex64::new(if self.ell == 2 { -2.0 * a } else { 0.0 }, 0.0);
        }
        if self.ell == 2 {
            let em1 = if s.im == 0.0 { Complex64::new(f64::exp_m1(-s.re), 0.0) } else { (-s).exp() - 1.0 };
            (em1 + self.sin2h) * (a * s).sinh() / den
        } else {
            self.sn * (a * s).cosh() / den
        }
    }
}

fn one(_: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `K_D^{ell,j}(r1, r2; dtheta) = 2^{-j(3/2+delta)} beta(r1 + r2)
///   int_0^inf e^{i 2^j |n_s|} |n_s|^{-3/2-delta} a(2^j |n_s|) psi_ell(s) ds`
/// with `psi_1 = e^{-|alpha| s}` and the two cosh-denominator families for
/// `ell = 2, 3`. `delta` is signed; `symbol = None` means `a = 1`.
#[allow(clippy::too_many_arguments)]
pub fn kd_kernel(
    piece: DyadicPiece,
    profile: &FluxProfile,
    delta: f64,
    r1: f64,
    r2: f64,
    dtheta: f64,
    symbol: Option<Symbol<'_>>,
    tol: f64,
) -> Result<QuadResult> {
    DyadicPiece::new(piece.ell, piece.j)?;
    if !(delta > -1.5) {
        return Err(invalid(format!("delta must exceed -3/2, got {delta}")));
    }
    let alpha = profile.alpha();
    if piece.ell > 1 && alpha.abs() > 1.0 {
        return Err(Error::UnsupportedRegime(format!("amplitude grows for |alpha| > 1, got {alpha}")));
    }
    let bump = piece.bump(r1 + r2);
    let zero = QuadResult { value: Complex64::new(0.0, 0.0), abs_error_estimate: 0.0, evaluations: 0, converged: true };
    if bump == 0.0 {
        return Ok(zero);
    }
    let fam = Family::new(piece.ell, alpha, dtheta);
    if piece.ell == 3 && fam.sn == 0.0 {
        return Ok(zero);
    }
    let freq = piece.frequency();
    let power = 1.5 + delta;
    let scale = piece.scale(delta) * bump;
    let sym: Symbol<'_> = symbol.unwrap_or(&one);
    let amp = move |s: Complex64| {
        let n = n_s_complex(r1, r2, s);
        n.powf(-power) * sym(freq * n) * fam.eval(s) * scale
    };
    let b = fam.sin2h.sqrt();
    let spec = OscillatorySpec {
        lambda: freq,
        r1,
        r2,
        amplitude: Amplitude::Plain(&amp),
        tail_rate: fam.rate() + 0.5 * power,
        peak_width: (piece.ell > 1 && b > 0.0).then_some(b.min(2.0)),
    };
    integrate_oscillatory_s(&spec, tol)
}

/// Outputs of [`model_kernels`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelKernels {
    /// `int_0^inf e^{i 2^j |n_s|} psi_{3,m}(s) ds`.
    pub psi3m_integral: Complex64,
    /// `K_{D,m}^{3,j} = 2^{-j(3/2+delta)} beta(r1 + r2) psi3m_integral`.
    pub kdm: Complex64,
    /// `H = 2^{-j(3/2+delta)} beta(r1+r2) (r1+r2)^{3/2+delta} int_0^inf e^{i 2^j r1 r2 s^2} psi_{3,m} ds`.
    pub h: Complex64,
    pub abs_error_estimate: f64,
}

impl ModelKernels {
    /// `|e^{-i 2^j (r1 + r2)} K_{D,m}^{3,j} - H|`.
    pub fn difference(&self, j: u32, r1: f64, r2: f64) -> f64 {
        let phase = Complex64::from_polar(1.0, -2f64.powi(j as i32) * (r1 + r2));
        (phase * self.kdm - self.h).norm()
    }
}

/// Algebraic (`s^{-2}`) decay: a nominal rate that keeps the truncation point
/// far beyond the contour cut, so the deformed path is always taken.
const ALGEBRAIC_RATE: f64 = 0.05;

/// Model amplitude `psi_{3,m} = (r1+r2)^{-3/2-delta} a(2^j(r1+r2)) sin(dtheta+pi) / (s^2/2 + b^2)`
/// and the associated kernels. `delta` is signed.
#[allow(clippy::too_many_arguments)]
pub fn model_kernels(
    r1: f64,
    r2: f64,
    dtheta: f64,
    j: u32,
    delta: f64,
    symbol: Option<Symbol<'_>>,
    tol: f64,
) -> Result<ModelKernels> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(invalid(format!("radii must be positive, got ({r1}, {r2})")));
    }
    let piece = DyadicPiece { ell: 3, j };
    let freq = piece.frequency();
    let rs = r1 + r2;
    let h_angle = half_shadow_angle(dtheta);
    let (sh, ch) = h_angle.sin_cos();
    let sn = 2.0 * sh * ch;
    let b2 = 2.0 * sh * sh;
    let zero = Complex64::new(0.0, 0.0);
    if sn == 0.0 {
        return Ok(ModelKernels { psi3m_integral: zero, kdm: zero, h: zero, abs_error_estimate: 0.0 });
    }
    let sym: Symbol<'_> = symbol.unwrap_or(&one);
    let c = rs.powf(-(1.5 + delta)) * sym(Complex64::new(freq * rs, 0.0)) * sn;
    let psi = move |s: Complex64| c / (0.5 * s * s + b2);
    let spec = OscillatorySpec {
        lambda: freq,
        r1,
        r2,
        amplitude: Amplitude::Plain(&psi),
        tail_rate: ALGEBRAIC_RATE,
        peak_width: Some(b2.sqrt().min(2.0)),
    };
    let q = integrate_oscillatory_s(&spec, tol)?;
    let outer = piece.scale(delta) * bump_beta_for(j, rs);

    // int_0^inf e^{i L s^2} psi(s) ds along s = e^{i pi/4} t, where the phase
    // becomes the Gaussian e^{-L t^2}; the poles at s = +-i sqrt(2) b are not crossed.
    let lam = freq * r1 * r2;
    let rot = Complex64::from_polar(1.0, FRAC_PI_4);
    let f = move |t: f64| rot * (-lam * t * t).exp() * psi(rot * t);
    let b = b2.sqrt();
    let end = (40.0 / lam).sqrt().max(4.0 * b).max(1.0);
    let mut breaks = vec![0.0];
    let mut x = (b.min(lam.powf(-0.5)) / 8.0).min(end / 2.0);
    while x < end {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(end);
    let mut gauss = QuadResult { value: zero, abs_error_estimate: 0.0, evaluations: 0, converged: true };
    for w in breaks.windows(2) {
        let r = integrate_adaptive(f, w[0], w[1], 0.5 * tol * (w[1] - w[0]) / end)?;
        gauss.value += r.value;
        gauss.abs_error_estimate += r.abs_error_estimate;
    }
    // |integrand| <= |c| e^{-L t^2} / (t^2 / 2) past the end point.
    gauss.abs_error_estimate += c.norm() * 2.0 / end * (-lam * end * end).exp();
    let h = outer * rs.powf(1.5 + delta) * gauss.value;
    Ok(ModelKernels {
        psi3m_integral: q.value,
        kdm: outer * q.value,
        h,
        abs_error_estimate: outer * q.abs_error_estimate + outer * rs.powf(1.5 + delta) * gauss.abs_error_estimate,
    })
}

fn bump_beta_for(j: u32, r: f64) -> f64 {
    if j == 0 {
        bump_beta0(r)
    } else {
        bump_beta(r)
    }
}
