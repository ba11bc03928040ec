//! Complex gamma function via the Lanczos approximation (g = 7, nine terms).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
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

/// ln(2π)/2
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Logarithm of sin(πz) that stays finite for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let two_i = Complex64::new(0.0, 2.0);
    if z.im >= 0.0 {
        // sin(πz) = e^{-iπz} (e^{2iπz} - 1) / (2i), |e^{2iπz}| <= 1
        -i * PI * z + ((two_i * PI * z).exp() - 1.0).ln() - two_i.ln()
    } else {
        i * PI * z + (1.0 - (-two_i * PI * z).exp()).ln() - two_i.ln()
    }
}

/// Principal-sheet-agnostic log-gamma: `exp(ln_gamma(z))` equals Γ(z), but
/// the imaginary part is not reduced to a particular branch.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("ln_gamma argument {z} is not finite")));
    }
    if is_pole(z) {
        return Err(Error::Pole(z));
    }
    if z.re < 0.5 {
        // Reflection: Γ(z) Γ(1 - z) = π / sin(πz)
        let reflected = ln_gamma(1.0 - z)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected);
    }
    let zm = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    Ok(HALF_LN_TWO_PI + (zm + 0.5) * t.ln() - t + series.ln())
}

/// Γ(z) for complex z; poles at non-positive integers are reported as errors.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}
