//! The Gaussian channel between inertial and accelerated observers.
//!
//! A Minkowski vacuum seen through Rindler wave packets ψ_Λ^± (Λ = I, II)
//! acquires thermal covariance entries
//!
//! * N_Λ = 1 - 2 ∫dΩ |(ψ_Λ, w_ΛΩ)|² / (1 + e^{2πΩ/a})
//! * N_cross^± = -2 ∫dΩ (ψ_I^±, w_IΩ^±)(ψ_II^∓, w_IIΩ^∓) e^{πΩ/a} / (1 + e^{2πΩ/a})
//!
//! and states built on Minkowski packets φ_Λ^± are additionally damped by the
//! overlaps α_Λ^± = (ψ_Λ^±, φ_Λ^±). Antiparticle packets are charge
//! conjugates of the particle packets, so every antiparticle overlap is the
//! complex conjugate of its particle counterpart.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{rotation_block, CovarianceMatrix, GaussianChannel, ModeLayout};
use crate::modes::{
    inner_product, MinkowskiPacketParams, RindlerPacketParams, Species, SpectralOverlap,
    SpinorMode, Wedge,
};
use crate::special::{
    adaptive_integrate_many, cross_weight, fermi_weight, Estimate, QuadratureSpec,
};

/// Weight below which the thermal kernels are treated as zero.
pub const KERNEL_CUTOFF: f64 = 1e-16;

/// Frequencies sampled to estimate the rounding floor of the overlaps.
const PROBE_POINTS: usize = 32;
/// Factor between the probed rounding floor and the outer tolerance. The
/// coarse probe underestimates the floor at some frequencies; with a small
/// margin the adaptive rule subdivides chasing noise.
const PROBE_MARGIN: f64 = 64.0;

/// Physical and numerical parameters of one acceleration configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccelerationConfig {
    pub mass: f64,
    pub width: f64,
    /// Central frequency Ω₀ of the Rindler packets (inverse length); the
    /// packets carry Bessel order Ω₀/a.
    pub omega0: f64,
    pub accel_i: f64,
    pub accel_ii: f64,
    /// Chart parameter a; defaults to √(𝒜_I 𝒜_II).
    pub chart_accel: Option<f64>,
    /// Minkowski packet wavenumber; defaults to the local wavenumber
    /// √((Ω₀ 𝒜_Λ / a)² - m²) of the matching Rindler packet.
    pub wavenumber: Option<f64>,
    pub quadrature: QuadratureSpec,
    /// Upper frequency limit; defaults to where the wedge-coupling weight
    /// 1/(2 cosh(πΩ/a)) drops below [`KERNEL_CUTOFF`].
    pub omega_max: Option<f64>,
}

impl AccelerationConfig {
    /// Mass 0.1, width 2, Ω₀ = 4.71 at equal accelerations.
    pub fn reference(accel: f64) -> Self {
        Self {
            mass: 0.1,
            width: 2.0,
            omega0: 4.71,
            accel_i: accel,
            accel_ii: accel,
            chart_accel: None,
            wavenumber: None,
            quadrature: QuadratureSpec::default(),
            omega_max: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("mass", self.mass),
            ("width", self.width),
            ("omega0", self.omega0),
            ("accel_i", self.accel_i),
            ("accel_ii", self.accel_ii),
            ("abs_tol", self.quadrature.abs_tol),
            ("rel_tol", self.quadrature.rel_tol),
        ];
        for (name, v) in named {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("chart_accel", self.chart_accel), ("omega_max", self.omega_max)] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Domain(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.quadrature.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    pub fn chart(&self) -> f64 {
        self.chart_accel
            .unwrap_or_else(|| (self.accel_i * self.accel_ii).sqrt())
    }

    pub fn omega_cutoff(&self) -> f64 {
        self.omega_max
            .unwrap_or_else(|| self.chart() * (1.0 / KERNEL_CUTOFF).ln() / PI)
    }

    pub fn accel(&self, wedge: Wedge) -> f64 {
        match wedge {
            Wedge::I => self.accel_i,
            Wedge::II => self.accel_ii,
        }
    }

    /// Parameters of the Rindler packet in `wedge`, centered at 1/𝒜.
    pub fn rindler_params(&self, wedge: Wedge) -> RindlerPacketParams {
        RindlerPacketParams {
            mass: self.mass,
            width: self.width,
            center: 1.0 / self.accel(wedge),
            order: self.omega0 / self.chart(),
        }
    }

    /// Parameters of the Minkowski packet in `wedge`, centered at 1/𝒜.
    pub fn minkowski_params(&self, wedge: Wedge) -> Result<MinkowskiPacketParams> {
        let wavenumber = match self.wavenumber {
            Some(k) => k,
            None => {
                let local = self.omega0 * self.accel(wedge) / self.chart();
                if local <= self.mass {
                    return Err(Error::Domain(format!(
                        "local frequency {local} is below the mass gap; set a wavenumber"
                    )));
                }
                (local * local - self.mass * self.mass).sqrt()
            }
        };
        Ok(MinkowskiPacketParams {
            mass: self.mass,
            width: self.width,
            center: 1.0 / self.accel(wedge),
            wavenumber,
        })
    }

    /// Warnings about parameters outside the localized-packet regime.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, accel) in [("accel_i", self.accel_i), ("accel_ii", self.accel_ii)] {
            if accel * self.width > 1.0 {
                out.push(format!(
                    "{name} * width = {} exceeds 1; the packet is not localized enough to carry a single acceleration",
                    accel * self.width
                ));
            }
        }
        out
    }
}

/// The scalars determining the channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelElements {
    pub n_i_plus: f64,
    pub n_i_minus: f64,
    pub n_ii_plus: f64,
    pub n_ii_minus: f64,
    /// 1 - N_I and 1 - N_II without the rounding of the subtraction.
    pub deficit_i: f64,
    pub deficit_ii: f64,
    pub cross_plus: Complex64,
    pub cross_minus: Complex64,
    pub alpha_i_plus: Complex64,
    pub alpha_i_minus: Complex64,
    pub alpha_ii_plus: Complex64,
    pub alpha_ii_minus: Complex64,
    /// Upper bound on the absolute error of every element.
    pub error: f64,
    /// 2√(∫|c_I|²g ∫|c_II|²g), the Cauchy–Schwarz bound on |N_cross|.
    pub cross_bound: f64,
    pub converged: bool,
}

impl ChannelElements {
    /// Elements of the untouched vacuum: no thermal noise, unit overlaps.
    pub fn inertial() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            n_i_plus: 1.0,
            n_i_minus: 1.0,
            n_ii_plus: 1.0,
            n_ii_minus: 1.0,
            deficit_i: 0.0,
            deficit_ii: 0.0,
            cross_plus: Complex64::new(0.0, 0.0),
            cross_minus: Complex64::new(0.0, 0.0),
            alpha_i_plus: one,
            alpha_i_minus: one,
            alpha_ii_plus: one,
            alpha_ii_minus: one,
            error: 0.0,
            cross_bound: 0.0,
            converged: true,
        }
    }

    /// Thermal elements from the deficits 1 - N_Λ and the particle cross
    /// term, with antiparticle entries filled in by charge conjugation.
    pub fn thermal(deficit_i: f64, deficit_ii: f64, cross_plus: Complex64) -> Self {
        Self {
            n_i_plus: 1.0 - deficit_i,
            n_i_minus: 1.0 - deficit_i,
            n_ii_plus: 1.0 - deficit_ii,
            n_ii_minus: 1.0 - deficit_ii,
            deficit_i,
            deficit_ii,
            cross_plus,
            cross_minus: cross_plus.conj(),
            ..Self::inertial()
        }
    }

    /// Copy with the packet overlaps replaced.
    pub fn with_overlaps(&self, alpha_i_plus: Complex64, alpha_ii_plus: Complex64) -> Self {
        Self {
            alpha_i_plus,
            alpha_i_minus: alpha_i_plus.conj(),
            alpha_ii_plus,
            alpha_ii_minus: alpha_ii_plus.conj(),
            ..self.clone()
        }
    }
}

/// Normalized Rindler packet ψ_Λ^± of the configuration.
pub fn rindler_packet(cfg: &AccelerationConfig, wedge: Wedge, species: Species) -> Result<SpinorMode> {
    SpinorMode::rindler_packet(&cfg.rindler_params(wedge), wedge, species, &cfg.quadrature)
}

/// Thermal elements N_Λ^± and N_cross^± for the configuration. Overlaps
/// α are set to one; see [`channel_elements`] for the full set.
pub fn vacuum_channel_elements(cfg: &AccelerationConfig) -> Result<ChannelElements> {
    cfg.validate()?;
    let a = cfg.chart();
    let omega_max = cfg.omega_cutoff();
    let spec = cfg.quadrature;
    let psi_i = rindler_packet(cfg, Wedge::I, Species::Particle)?;
    let table_i = SpectralOverlap::new(&psi_i, a, omega_max)?;
    // Wedge II packets are mirror images; equal accelerations give equal
    // overlaps.
    let table_ii = if cfg.accel_i == cfg.accel_ii {
        None
    } else {
        let psi_ii = rindler_packet(cfg, Wedge::II, Species::Particle)?;
        Some(SpectralOverlap::new(&psi_ii, a, omega_max)?)
    };

    let zero = Complex64::new(0.0, 0.0);
    // Integrands at Ω and their first-order error from the overlap errors.
    let sample = |omega: f64| -> Result<([Complex64; 5], f64)> {
        let f = fermi_weight(omega, a)?;
        let g = cross_weight(omega, a)?;
        let ci = table_i.coefficient(omega, &spec)?;
        let cii = match &table_ii {
            Some(t) => t.coefficient(omega, &spec)?,
            None => ci,
        };
        let (mi, mii) = (ci.value.norm(), cii.value.norm());
        let re = |v: f64| Complex64::new(v, 0.0);
        // Covers |c|² of either wedge and the cross product c_I c_II*.
        let noise = 2.0 * (mi.max(mii) * (ci.error + cii.error) + ci.error * cii.error) * (f + g);
        Ok((
            [
                re(mi * mi * f),
                re(mii * mii * f),
                ci.value * cii.value.conj() * g,
                re(mi * mi * g),
                re(mii * mii * g),
            ],
            noise,
        ))
    };
    // The integrands are quadratic in the overlaps, whose absolute accuracy
    // is abs_tol. Rounding in the overlap sums sets a floor below which the
    // outer quadrature cannot resolve anything; probe it on a coarse grid.
    let mut floor: f64 = 0.0;
    for k in 1..=PROBE_POINTS {
        let (_, noise) = sample(omega_max * k as f64 / PROBE_POINTS as f64)?;
        floor = floor.max(noise);
    }
    let outer = QuadratureSpec {
        abs_tol: (spec.abs_tol * spec.abs_tol).max(PROBE_MARGIN * floor * omega_max),
        ..spec
    };
    let mut failure: Option<Error> = None;
    // Largest first-order contribution of the overlap errors to any
    // integrand; kept out of the adaptive vector since it is not smooth.
    let mut propagated: f64 = 0.0;
    let mut integrand = |omega: f64| -> [Complex64; 5] {
        if failure.is_some() || omega <= 0.0 {
            return [zero; 5];
        }
        match sample(omega) {
            Ok((v, noise)) => {
                propagated = propagated.max(noise);
                v
            }
            Err(e) => {
                failure = Some(e);
                [zero; 5]
            }
        }
    };
    let result = adaptive_integrate_many(&mut integrand, 0.0, omega_max, &outer)?;
    drop(integrand);
    if let Some(e) = failure {
        return Err(e);
    }
    let v = result.values;
    let quad_err = result.errors.iter().take(3).fold(0.0, |m: f64, &e| m.max(e));
    let error = 2.0 * (quad_err + propagated * omega_max);
    let (deficit_i, deficit_ii) = (2.0 * v[0].re, 2.0 * v[1].re);
    Ok(ChannelElements {
        error,
        cross_bound: 2.0 * (v[3].re * v[4].re).sqrt(),
        converged: result.converged,
        ..ChannelElements::thermal(deficit_i, deficit_ii, -2.0 * v[2])
    })
}

/// Overlap α_Λ^± = (ψ_Λ^±, φ_Λ^±) between the Rindler and Minkowski packets
/// centered in `wedge`.
pub fn mode_overlap_alpha(cfg: &AccelerationConfig, wedge: Wedge, species: Species) -> Result<Estimate> {
    cfg.validate()?;
    let psi = rindler_packet(cfg, wedge, species)?;
    let phi = SpinorMode::minkowski_packet(&cfg.minkowski_params(wedge)?, wedge, species, &cfg.quadrature)?;
    let ip = inner_product(&psi, &phi, &cfg.quadrature)?;
    Ok(Estimate {
        value: ip.value,
        error: ip.error,
        evaluations: 0,
    })
}

/// Thermal elements together with the four packet overlaps.
pub fn channel_elements(cfg: &AccelerationConfig) -> Result<ChannelElements> {
    let base = vacuum_channel_elements(cfg)?;
    let mut alphas = [Complex64::new(0.0, 0.0); 4];
    let mut error = base.error;
    let slots = [
        (Wedge::I, Species::Particle),
        (Wedge::II, Species::Particle),
        (Wedge::I, Species::Antiparticle),
        (Wedge::II, Species::Antiparticle),
    ];
    for (slot, (wedge, species)) in alphas.iter_mut().zip(slots) {
        let est = mode_overlap_alpha(cfg, wedge, species)?;
        *slot = est.value;
        error = error.max(est.error);
    }
    Ok(ChannelElements {
        alpha_i_plus: alphas[0],
        alpha_ii_plus: alphas[1],
        alpha_i_minus: alphas[2],
        alpha_ii_minus: alphas[3],
        error,
        ..base
    })
}

/// Transformed vacuum covariance in the canonical layout
/// (I,+), (II,+), (I,-), (II,-). Wedge I particles couple to wedge II
/// antiparticles and vice versa.
pub fn assemble_vacuum_sigma(el: &ChannelElements) -> CovarianceMatrix {
    let mut s = DMatrix::zeros(8, 8);
    let (xp, xm) = (el.cross_plus, el.cross_minus);
    let mut set = |i: usize, j: usize, v: f64| {
        s[(i - 1, j - 1)] = v;
        s[(j - 1, i - 1)] = -v;
    };
    set(1, 2, el.n_i_plus);
    set(3, 4, el.n_ii_plus);
    set(5, 6, el.n_i_minus);
    set(7, 8, el.n_ii_minus);
    // (I,+) with (II,-)
    set(1, 7, xp.im);
    set(1, 8, xp.re);
    set(2, 7, xp.re);
    set(2, 8, -xp.im);
    // (II,+) with (I,-)
    set(3, 5, -xm.im);
    set(3, 6, -xm.re);
    set(4, 5, -xm.re);
    set(4, 6, xm.im);
    CovarianceMatrix::new(s, ModeLayout::canonical()).expect("8x8 matches the canonical layout")
}

/// Block-diagonal transfer matrix M built from the four overlaps.
pub fn transfer_matrix(el: &ChannelElements) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    let alphas = [el.alpha_i_plus, el.alpha_ii_plus, el.alpha_i_minus, el.alpha_ii_minus];
    for (j, alpha) in alphas.iter().enumerate() {
        let b = rotation_block(*alpha);
        for r in 0..2 {
            for c in 0..2 {
                m[(2 * j + r, 2 * j + c)] = b[r][c];
            }
        }
    }
    m
}

/// Channel (M, N) with N = σ^(d) - M σ_vac Mᵀ, so that the vacuum is mapped
/// onto [`assemble_vacuum_sigma`].
pub fn assemble_channel(el: &ChannelElements) -> GaussianChannel {
    channel_from_vacuum_image(el, &assemble_vacuum_sigma(el))
}

/// Channel with transfer matrix built from the overlaps in `el` whose image
/// of the vacuum is `sigma_d`.
pub fn channel_from_vacuum_image(el: &ChannelElements, sigma_d: &CovarianceMatrix) -> GaussianChannel {
    let m = transfer_matrix(el);
    let vac = CovarianceMatrix::vacuum(ModeLayout::canonical());
    let noise = sigma_d.matrix() - &m * vac.matrix() * m.transpose();
    let noise = (&noise - noise.transpose()) * 0.5;
    GaussianChannel::new(m, noise).expect("8x8 channel matrices")
}

/// Particle block (I,+), (II,+) of the transformed Bell state written out
/// directly: diagonal entries N_Λ^+ - |α_Λ^+|² and correlations carried by
/// the product α_I^+ α_II^+.
pub fn bell_block_truncated(el: &ChannelElements) -> CovarianceMatrix {
    let d1 = el.n_i_plus - el.alpha_i_plus.norm_sqr();
    let d2 = el.n_ii_plus - el.alpha_ii_plus.norm_sqr();
    let p = el.alpha_i_plus * el.alpha_ii_plus;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        0.0,   d1,    p.im,  p.re,
        -d1,   0.0,   p.re,  -p.im,
        -p.im, -p.re, 0.0,   d2,
        -p.re, p.im,  -d2,   0.0,
    ]);
    let layout = ModeLayout::from_labels(vec![
        crate::gaussian::ModeLabel::Slot(Wedge::I, Species::Particle),
        crate::gaussian::ModeLabel::Slot(Wedge::II, Species::Particle),
    ])
    .expect("distinct labels");
    CovarianceMatrix::new(m, layout).expect("4x4 matches two modes")
}

/// ∫dΩ |(ψ_Λ, w_ΛΩ)|² over the whole spectrum of the packet in `wedge`.
/// Equals one for a complete particle basis.
pub fn parseval_sum(cfg: &AccelerationConfig, wedge: Wedge) -> Result<Estimate> {
    cfg.validate()?;
    let a = cfg.chart();
    let params = cfg.rindler_params(wedge);
    // Spectral profile of the packet is roughly Gaussian in Ω/a around its
    // order with standard deviation √2 / (𝒜 L).
    let spread = std::f64::consts::SQRT_2 / (cfg.accel(wedge) * cfg.width);
    let upper = a * (params.order + 14.0 * spread);
    let psi = rindler_packet(cfg, wedge, Species::Particle)?;
    let table = SpectralOverlap::new(&psi, a, upper)?;
    let spec = cfg.quadrature;
    let mut failure = None;
    let mut propagated: f64 = 0.0;
    let zero = Complex64::new(0.0, 0.0);
    let mut floor: f64 = 0.0;
    for k in 1..=PROBE_POINTS {
        let c = table.coefficient(upper * k as f64 / PROBE_POINTS as f64, &spec)?;
        floor = floor.max(2.0 * c.value.norm() * c.error);
    }
    let outer = QuadratureSpec {
        abs_tol: (spec.abs_tol * spec.abs_tol).max(PROBE_MARGIN * floor * upper),
        ..spec
    };
    let r = adaptive_integrate_many(
        |omega: f64| {
            if omega <= 0.0 || failure.is_some() {
                return [zero];
            }
            match table.coefficient(omega, &spec) {
                Ok(c) => {
                    propagated = propagated.max(2.0 * c.value.norm() * c.error);
                    [Complex64::new(c.value.norm_sqr(), 0.0)]
                }
                Err(e) => {
                    failure = Some(e);
                    [zero]
                }
            }
        },
        0.0,
        upper,
        &outer,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Estimate {
        value: r.values[0],
        error: r.errors[0] + propagated * upper,
        evaluations: r.evaluations,
    })
}
