//! Fermi–Dirac weights of the accelerated vacuum.

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn ratio(omega: f64, accel: f64) -> Result<f64> {
    if !(accel > 0.0) || !accel.is_finite() {
        return Err(Error::Domain(format!("acceleration must be positive, got {accel}")));
    }
    if !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite, got {omega}")));
    }
    Ok(omega / accel)
}

/// 1 / (1 + e^{2πΩ/a}), the occupation weight of a Rindler mode.
pub fn fermi_weight(omega: f64, accel: f64) -> Result<f64> {
    let nu = ratio(omega, accel)?;
    let t = 2.0 * PI * nu;
    Ok(if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    })
}

/// e^{πΩ/a} / (1 + e^{2πΩ/a}) = 1 / (2 cosh(πΩ/a)), the weight coupling
/// opposite wedges.
pub fn cross_weight(omega: f64, accel: f64) -> Result<f64> {
    let nu = ratio(omega, accel)?;
    let e = (-PI * nu.abs()).exp();
    Ok(e / (1.0 + e * e))
}

/// (cos r, sin r) of the two-mode squeezing with tan r = e^{-πΩ/a}.
pub fn squeeze_cos_sin(omega: f64, accel: f64) -> Result<(f64, f64)> {
    let sin2 = fermi_weight(omega, accel)?;
    let cos2 = fermi_weight(-omega, accel)?;
    Ok((cos2.sqrt(), sin2.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_value_at_unit_ratio() {
        let s = fermi_weight(1.0, 1.0).unwrap();
        assert!((s - 1.863_961_889_625_027_9e-3).abs() < 1e-17);
    }

    #[test]
    fn weights_are_consistent() {
        for &nu in &[0.0, 0.1, 1.0, 3.7, 40.0, 400.0] {
            let f = fermi_weight(nu, 1.0).unwrap();
            let g = cross_weight(nu, 1.0).unwrap();
            let (c, s) = squeeze_cos_sin(nu, 1.0).unwrap();
            assert!((c * c + s * s - 1.0).abs() < 1e-15);
            assert!((c * s - g).abs() <= 1e-15 * g.max(1e-300) + 1e-300, "nu = {nu}");
            assert!((s * s - f).abs() <= 4e-16 * f + 1e-300);
        }
        assert_eq!(fermi_weight(0.0, 2.0).unwrap(), 0.5);
        assert_eq!(cross_weight(0.0, 2.0).unwrap(), 0.5);
    }

    #[test]
    fn large_ratio_underflows_gracefully() {
        assert!(fermi_weight(1e4, 1.0).unwrap() >= 0.0);
        assert!(cross_weight(1e4, 1.0).unwrap() >= 0.0);
        assert!((fermi_weight(-1e4, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_positive_acceleration_rejected() {
        assert!(fermi_weight(1.0, 0.0).is_err());
        assert!(cross_weight(1.0, -1.0).is_err());
    }
}
