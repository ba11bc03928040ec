//! Modified Bessel functions I_μ(x) and K_μ(x) of complex order and real
//! positive argument.
//!
//! Orders of the form ±iν ± ½ with large ν make I and K individually
//! exponentially large or small (I ~ e^{π|ν|/2}, K ~ e^{-π|ν|/2}). The
//! `_scaled` variants remove that factor so results stay representable:
//!
//! * `bessel_mod_first_scaled(μ, x) = I_μ(x) e^{-π|Im μ|/2}`
//! * `bessel_mod_second_scaled(μ, x) = K_μ(x) e^{+π|Im μ|/2}`
//!
//! K is evaluated by the reflection formula K = π(I_{-μ} - I_μ) / (2 sin μπ)
//! when the subtraction is well conditioned, and otherwise by the integral
//! K_μ(x) = ½ ∫ exp(μt - x cosh t) dt taken along the shifted line
//! t = s + iθ, which removes the oscillatory cancellation of the real-axis
//! form at large |Im μ|.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;

use super::gamma::ln_gamma;
use super::quadrature::{adaptive_integrate, Estimate, QuadratureSpec};
use crate::error::{Error, Result};

const SERIES_MAX_TERMS: usize = 5000;
/// Largest tolerated ratio between the reflection-formula terms and their
/// difference before falling back to the integral.
const MAX_CANCELLATION: f64 = 1e3;

fn check_argument(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    Ok(())
}

fn check_order(order: Complex64) -> Result<()> {
    if !order.re.is_finite() || !order.im.is_finite() {
        return Err(Error::Domain(format!("Bessel order {order} is not finite")));
    }
    Ok(())
}

fn is_negative_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re < 0.0 && z.re == z.re.round()
}

/// Ascending series for I_μ(x) e^{-π|Im μ|/2}, given ln Γ(μ + 1).
fn first_scaled_series(order: Complex64, ln_gamma_next: Complex64, x: f64) -> Result<Complex64> {
    let half_x = 0.5 * x;
    let lead = order * half_x.ln() - ln_gamma_next - FRAC_PI_2 * order.im.abs();
    let mut term = lead.exp();
    let mut sum = term;
    let q = half_x * half_x;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (order + kf + 1.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && kf + 1.0 > half_x {
            return Ok(sum);
        }
        if sum.norm() == 0.0 && term.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!("I series for order {order}, x = {x}")))
}

/// Modified Bessel function of the first kind, scaled by e^{-π|Im μ|/2}.
pub fn bessel_mod_first_scaled(order: Complex64, x: f64) -> Result<Complex64> {
    // I_{-n} = I_n for integer n, where 1/Γ(μ+1) vanishes.
    BesselIOrder::new(order)?.scaled(x)
}

/// Modified Bessel function of the first kind I_μ(x).
pub fn bessel_mod_first(order: Complex64, x: f64) -> Result<Complex64> {
    Ok(bessel_mod_first_scaled(order, x)? * (FRAC_PI_2 * order.im.abs()).exp())
}

/// Precomputed data for repeated evaluation of I at one fixed order.
#[derive(Clone, Copy, Debug)]
pub(crate) struct BesselIOrder {
    order: Complex64,
    ln_gamma_next: Complex64,
}

impl BesselIOrder {
    pub(crate) fn new(order: Complex64) -> Result<Self> {
        check_order(order)?;
        let order = if is_negative_integer(order) { -order } else { order };
        Ok(Self {
            order,
            ln_gamma_next: ln_gamma(order + 1.0)?,
        })
    }

    /// I_μ(x) e^{-π|Im μ|/2}
    pub(crate) fn scaled(&self, x: f64) -> Result<Complex64> {
        check_argument(x)?;
        first_scaled_series(self.order, self.ln_gamma_next, x)
    }
}

/// Precomputed data for repeated evaluation of K at one fixed order.
#[derive(Clone, Copy, Debug)]
pub(crate) struct BesselKOrder {
    order: Complex64,
    ln_gamma_plus: Option<Complex64>,
    ln_gamma_minus: Option<Complex64>,
    /// e^{π|ν|} / (2 sin μπ), or None when sin μπ vanishes.
    reflection: Option<Complex64>,
}

impl BesselKOrder {
    pub(crate) fn new(order: Complex64) -> Result<Self> {
        check_order(order)?;
        let nu = order.im;
        let damp = (-2.0 * PI * nu.abs()).exp();
        let (s, c) = (PI * order.re).sin_cos();
        // sin(μπ) e^{-π|ν|}
        let sine = Complex64::new(
            s * (1.0 + damp) * 0.5,
            c * nu.signum() * (1.0 - damp) * 0.5,
        );
        let integer = nu == 0.0 && order.re == order.re.round();
        let reflection = if integer || sine.norm() < 1e-300 {
            None
        } else {
            Some(1.0 / (2.0 * sine))
        };
        let lg = |z: Complex64| if is_negative_integer(z - 1.0) { None } else { ln_gamma(z).ok() };
        Ok(Self {
            order,
            ln_gamma_plus: lg(order + 1.0),
            ln_gamma_minus: lg(1.0 - order),
            reflection,
        })
    }

    /// Reflection-formula value of K e^{π|ν|/2} together with the
    /// cancellation ratio (|I_{-μ}| + |I_μ|) / |I_{-μ} - I_μ|.
    pub(crate) fn series_scaled(&self, x: f64) -> Result<(Complex64, f64)> {
        check_argument(x)?;
        let (Some(refl), Some(lp), Some(lm)) =
            (self.reflection, self.ln_gamma_plus, self.ln_gamma_minus)
        else {
            return Err(Error::Unsupported(format!(
                "reflection formula undefined at integer order {}",
                self.order
            )));
        };
        let ip = first_scaled_series(self.order, lp, x)?;
        let im = first_scaled_series(-self.order, lm, x)?;
        let diff = im - ip;
        let cancellation = if diff.norm() > 0.0 {
            (im.norm() + ip.norm()) / diff.norm()
        } else {
            f64::INFINITY
        };
        Ok((PI * diff * refl, cancellation))
    }

    pub(crate) fn scaled(&self, x: f64) -> Result<Complex64> {
        check_argument(x)?;
        if self.reflection.is_some() {
            let (value, cancellation) = self.series_scaled(x)?;
            if cancellation <= MAX_CANCELLATION && value.re.is_finite() && value.im.is_finite() {
                return Ok(value);
            }
        }
        trapezoid_scaled(self.order, x)
    }
}

/// Contour angle θ for the shifted integral; sign follows Im μ.
fn contour_angle(nu: f64, x: f64) -> f64 {
    let a = nu.abs();
    if a == 0.0 {
        return 0.0;
    }
    let saddle = (a / x).min(1.0).asin();
    let cap = (FRAC_PI_2 - (1.0 / a).min(FRAC_PI_2)).max(0.0);
    nu.signum() * saddle.min(cap)
}

/// Shifted-contour integrand of K_μ(x) e^{π|Im μ|/2} and the interval
/// outside which it is below `threshold` times its peak.
struct ShiftedContour {
    order: Complex64,
    x: f64,
    constant: Complex64,
    cos_t: f64,
    sin_t: f64,
    lo: f64,
    hi: f64,
    peak_magnitude: f64,
}

impl ShiftedContour {
    fn new(order: Complex64, x: f64, threshold: f64) -> Result<Self> {
        check_order(order)?;
        check_argument(x)?;
        let nu = order.im;
        let sigma = order.re;
        let theta = contour_angle(nu, x);
        let (sin_t, cos_t) = theta.sin_cos();
        let constant = FRAC_PI_2 * nu.abs() + Complex64::i() * order * theta - LN_2;

        // ln|integrand| up to the constant: σ s - x cos θ cosh s.
        let log_mag = |s: f64| sigma * s - x * cos_t * s.cosh();
        let peak_s = (sigma / (x * cos_t)).asinh();
        let peak = log_mag(peak_s);
        let drop = -threshold.max(1e-300).ln();
        let edge = |dir: f64| {
            let mut step = 1.0;
            while log_mag(peak_s + dir * step) > peak - drop {
                step *= 2.0;
                if step > 1e4 {
                    break;
                }
            }
            let (mut inner, mut outer) = (0.0, step);
            for _ in 0..60 {
                let mid = 0.5 * (inner + outer);
                if log_mag(peak_s + dir * mid) > peak - drop {
                    inner = mid;
                } else {
                    outer = mid;
                }
            }
            peak_s + dir * outer
        };
        Ok(Self {
            order,
            x,
            constant,
            cos_t,
            sin_t,
            lo: edge(-1.0),
            hi: edge(1.0),
            peak_magnitude: (peak + constant.re).exp(),
        })
    }

    fn eval(&self, s: f64) -> Complex64 {
        let cosh_shift = Complex64::new(s.cosh() * self.cos_t, s.sinh() * self.sin_t);
        (self.constant + self.order * s - self.x * cosh_shift).exp()
    }
}

/// K_μ(x) e^{π|Im μ|/2} by adaptive quadrature along the shifted contour.
fn integral_scaled(order: Complex64, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let contour = ShiftedContour::new(order, x, spec.truncation_threshold)?;
    let inner_spec = QuadratureSpec {
        abs_tol: 1e-16 * contour.peak_magnitude * (contour.hi - contour.lo),
        rel_tol: spec.rel_tol.min(1e-13),
        ..*spec
    };
    adaptive_integrate(|s| contour.eval(s), contour.lo, contour.hi, &inner_spec)
}

/// K_μ(x) e^{π|Im μ|/2} by the trapezoid rule along the shifted contour.
/// The integrand is analytic in a strip and negligible at both ends, so the
/// rule converges geometrically; the step is halved until two successive
/// sums agree.
fn trapezoid_scaled(order: Complex64, x: f64) -> Result<Complex64> {
    let contour = ShiftedContour::new(order, x, 1e-18)?;
    let width = contour.hi - contour.lo;
    let mut panels = 16usize;
    let mut h = width / panels as f64;
    let mut sum: Complex64 = (0..=panels)
        .map(|k| contour.eval(contour.lo + k as f64 * h))
        .sum();
    let mut estimate = sum * h;
    let floor = 1e-16 * contour.peak_magnitude * width;
    for _ in 0..14 {
        let midpoints: Complex64 = (0..panels)
            .map(|k| contour.eval(contour.lo + (k as f64 + 0.5) * h))
            .sum();
        sum += midpoints;
        panels *= 2;
        h *= 0.5;
        let refined = sum * h;
        let change = (refined - estimate).norm();
        estimate = refined;
        if change <= 1e-14 * estimate.norm() + floor {
            return Ok(estimate);
        }
    }
    Err(Error::NonConvergence(format!(
        "trapezoid rule for K at order {order}, x = {x}"
    )))
}

/// K_μ(x) e^{π|Im μ|/2} evaluated purely by quadrature along the shifted
/// contour. Independent of the series path; used to cross-check it.
pub fn bessel_mod_second_integral(order: Complex64, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    integral_scaled(order, x, spec)
}

/// K_μ(x) e^{π|Im μ|/2} from the reflection formula, with the cancellation
/// ratio of the subtraction. Fails at integer orders.
pub fn bessel_mod_second_series(order: Complex64, x: f64) -> Result<(Complex64, f64)> {
    BesselKOrder::new(order)?.series_scaled(x)
}

/// Modified Bessel function of the second kind, scaled by e^{π|Im μ|/2}.
pub fn bessel_mod_second_scaled(order: Complex64, x: f64) -> Result<Complex64> {
    BesselKOrder::new(order)?.scaled(x)
}

/// Modified Bessel function of the second kind K_μ(x).
pub fn bessel_mod_second(order: Complex64, x: f64) -> Result<Complex64> {
    Ok(bessel_mod_second_scaled(order, x)? * (-FRAC_PI_2 * order.im.abs()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn real_order_reference_values() {
        let k0 = bessel_mod_second(c(0.0, 0.0), 1.0).unwrap();
        assert!(close(k0, c(0.421_024_438_240_708_3, 0.0), 1e-13), "{k0}");
        let kh = bessel_mod_second(c(0.5, 0.0), 1.0).unwrap();
        assert!(close(kh, c(0.461_068_504_447_894_56, 0.0), 1e-13), "{kh}");
        let ih = bessel_mod_first(c(0.5, 0.0), 1.0).unwrap();
        assert!(close(ih, c(0.937_674_888_245_487_6, 0.0), 1e-14), "{ih}");
    }

    #[test]
    fn complex_order_reference_values() {
        let k = bessel_mod_second(c(0.5, 2.0), 0.3).unwrap();
        assert!(close(k, c(-0.138_057_080_459_745_38, -0.019_975_321_926_716_04), 1e-12), "{k}");
        let k = bessel_mod_second(c(-0.5, 1.0), 0.5).unwrap();
        assert!(close(k, c(0.471_992_436_002_002_4, -0.366_948_585_757_244_5), 1e-12), "{k}");
        let i = bessel_mod_first(c(-0.5, 1.0), 0.5).unwrap();
        assert!(close(i, c(3.494_951_705_939_104_8, -1.823_850_701_867_171), 1e-13), "{i}");
        let i = bessel_mod_first(c(0.5, -1.0), 0.5).unwrap();
        assert!(close(i, c(0.011_804_864_299_463_592, 0.884_107_540_749_780_7), 1e-13), "{i}");
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.01, 0.3, 1.0, 4.0, 25.0] {
            let k = bessel_mod_second(c(0.5, 0.0), x).unwrap();
            let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k.re / want - 1.0).abs() < 1e-12, "x = {x}");
            let i = bessel_mod_first(c(0.5, 0.0), x).unwrap();
            let want = (2.0 / (PI * x)).sqrt() * x.sinh();
            assert!((i.re / want - 1.0).abs() < 1e-12, "x = {x}");
            let i = bessel_mod_first(c(-0.5, 0.0), x).unwrap();
            let want = (2.0 / (PI * x)).sqrt() * x.cosh();
            assert!((i.re / want - 1.0).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn integral_agrees_with_series_at_large_imaginary_order() {
        let spec = QuadratureSpec::default();
        for &(nu, x) in &[(8.0, 0.05), (12.0, 1.5), (-10.0, 3.0), (20.0, 0.002)] {
            for &sigma in &[0.5, -0.5] {
                let order = c(sigma, nu);
                let (series, cancel) = bessel_mod_second_series(order, x).unwrap();
                assert!(cancel < 10.0);
                let integral = bessel_mod_second_integral(order, x, &spec).unwrap();
                assert!(close(integral.value, series, 1e-11), "nu = {nu}, x = {x}");
            }
        }
    }

    #[test]
    fn large_argument_falls_back_to_integral() {
        // e^{2x} cancellation makes the series unusable here.
        let order = c(0.5, 0.3);
        let (_, cancel) = bessel_mod_second_series(order, 40.0).unwrap();
        assert!(cancel > MAX_CANCELLATION);
        let k = bessel_mod_second(c(0.5, 0.0), 40.0).unwrap();
        let want = (PI / 80.0).sqrt() * (-40.0f64).exp();
        assert!((k.re / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_agrees_with_adaptive_contour() {
        let spec = QuadratureSpec::default();
        for &(re, im) in &[(0.5, 0.0), (0.5, 4.0), (-0.5, 11.7), (0.5, -14.0), (1.3, 2.0)] {
            for &x in &[0.3, 2.0, 6.0, 17.5, 60.0] {
                let order = c(re, im);
                let t = trapezoid_scaled(order, x).unwrap();
                let a = integral_scaled(order, x, &spec).unwrap().value;
                assert!(close(t, a, 1e-11), "{order} {x}: {t} vs {a}");
            }
        }
    }

    #[test]
    fn conjugate_order_symmetry() {
        let a = bessel_mod_second(c(0.5, 3.0), 0.7).unwrap();
        let b = bessel_mod_second(c(0.5, -3.0), 0.7).unwrap();
        assert!(close(a, b.conj(), 1e-13));
        // K_{-μ} = K_μ
        let d = bessel_mod_second(c(-0.5, -3.0), 0.7).unwrap();
        assert!(close(a, d, 1e-12));
    }

    #[test]
    fn negative_integer_order_of_first_kind() {
        let a = bessel_mod_first(c(-2.0, 0.0), 1.3).unwrap();
        let b = bessel_mod_first(c(2.0, 0.0), 1.3).unwrap();
        assert!(close(a, b, 1e-15));
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(bessel_mod_second(c(0.5, 0.0), 0.0).is_err());
        assert!(bessel_mod_first(c(0.5, 0.0), -1.0).is_err());
        assert!(bessel_mod_second(c(f64::NAN, 0.0), 1.0).is_err());
    }
}
