//! Spinor mode functions on the t = 0 slice and their inner products.
//!
//! Modes are two-component spinors of the 1+1 dimensional Dirac field.
//! Every mode lives in one wedge; its profile is written in the distance
//! `r > 0` from the horizon, which is the Rindler coordinate χ in wedge I and
//! its mirror |χ| in wedge II. Inner products are ∫ dr f†g over the common
//! support and are evaluated in u = ln r.
//!
//! Antiparticle modes are charge conjugates of particle modes,
//! (Cf)(r) = -σ_x f(r)*, so that (Cf, Cg) = (f, g)*.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{adaptive_integrate, BesselIOrder, BesselKOrder, Estimate, QuadratureSpec};

/// Two-component complex spinor.
pub type Spinor = [Complex64; 2];

/// Half of the t = 0 slice on which a mode is supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wedge {
    /// Right wedge, x > 0.
    I,
    /// Left wedge, x < 0.
    II,
}

/// Particle or antiparticle sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    Particle,
    Antiparticle,
}

/// The envelope exp(-2 (c/L)² ln²(r/c)) is cut where its exponent drops
/// below this value.
pub const ENVELOPE_CUTOFF_EXPONENT: f64 = -40.0;

/// Half-width in ln r of the truncated packet envelope.
pub fn envelope_half_width(center: f64, width: f64) -> f64 {
    (-ENVELOPE_CUTOFF_EXPONENT / 2.0).sqrt() * width / center
}

fn log_envelope(center: f64, width: f64, r: f64) -> f64 {
    let t = center / width * (r / center).ln();
    -2.0 * t * t
}

/// Parameters of the Rindler wave packet built from I-Bessel functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RindlerPacketParams {
    pub mass: f64,
    pub width: f64,
    /// Peak position χ₀ (distance from the horizon).
    pub center: f64,
    /// Dimensionless Bessel order ν₀ carried by the packet.
    pub order: f64,
}

/// Parameters of the Minkowski wave packet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinkowskiPacketParams {
    pub mass: f64,
    pub width: f64,
    /// Peak position x₀ (distance from the origin).
    pub center: f64,
    pub wavenumber: f64,
}

#[derive(Clone, Debug)]
enum Profile {
    Continuum {
        omega: f64,
        chart_accel: f64,
        mass: f64,
        order: BesselKOrder,
    },
    RindlerPacket {
        params: RindlerPacketParams,
        i_minus: BesselIOrder,
        i_plus: BesselIOrder,
        norm: f64,
    },
    MinkowskiPacket {
        params: MinkowskiPacketParams,
        spinor: Spinor,
        norm: f64,
    },
    Smeared {
        center_omega: f64,
        width_omega: f64,
        chart_accel: f64,
        mass: f64,
    },
}

/// A spinor mode function in one wedge.
#[derive(Clone, Debug)]
pub struct SpinorMode {
    pub wedge: Wedge,
    pub species: Species,
    profile: Profile,
}

/// Result of an inner product between two modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerProduct {
    pub value: Complex64,
    pub error: f64,
    /// True when the modes live in different wedges; the value is then 0.
    pub disjoint: bool,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn conjugate(s: Spinor) -> Spinor {
    [-s[1].conj(), -s[0].conj()]
}

/// √(m cosh(πν) / (2π² a)) e^{-π|ν|/2}, the continuum prefactor with the
/// Bessel scaling folded in.
fn continuum_prefactor(nu: f64, chart_accel: f64, mass: f64) -> f64 {
    let half_cosh = 0.5 * (1.0 + (-2.0 * PI * nu.abs()).exp());
    (mass * half_cosh / (2.0 * PI * PI * chart_accel)).sqrt()
}

/// Order ½ + iν of the upper Bessel component. The lower one, order
/// -½ + iν, equals its complex conjugate for real argument.
fn continuum_order(nu: f64) -> Result<BesselKOrder> {
    BesselKOrder::new(Complex64::new(0.5, nu))
}

fn continuum_particle(
    prefactor: f64,
    order: &BesselKOrder,
    x: f64,
) -> Result<Spinor> {
    let kp = order.scaled(x)?;
    let km = kp.conj();
    let i = Complex64::i();
    Ok([prefactor * (kp + i * km), prefactor * (-kp + i * km)])
}

/// Spinor structure of the Minkowski packet: a positive-frequency plane-wave
/// spinor at wavenumber k, phased so the packet is real-symmetric about x₀.
fn minkowski_spinor(mass: f64, wavenumber: f64, center: f64) -> Spinor {
    let kappa = mass.atan2(wavenumber);
    let (s, c) = (0.5 * kappa).sin_cos();
    let phase = Complex64::from_polar(1.0, -0.5 * kappa - wavenumber * center);
    [phase * (c + s), phase * (c - s)]
}

fn smeared_window(omega: f64, center: f64, width: f64) -> f64 {
    let t = (omega - center) / width;
    (-0.5 * t * t).exp()
}

impl SpinorMode {
    /// Rindler continuum mode of frequency Ω > 0 in a chart with
    /// acceleration parameter `chart_accel`, δ(Ω - Ω')-normalized.
    pub fn rindler_continuum(
        omega: f64,
        chart_accel: f64,
        mass: f64,
        wedge: Wedge,
        species: Species,
    ) -> Result<Self> {
        check_positive("frequency", omega)?;
        check_positive("chart acceleration", chart_accel)?;
        check_positive("mass", mass)?;
        let order = continuum_order(omega / chart_accel)?;
        Ok(Self {
            wedge,
            species,
            profile: Profile::Continuum {
                omega,
                chart_accel,
                mass,
                order,
            },
        })
    }

    /// Normalized Rindler wave packet.
    pub fn rindler_packet(
        params: &RindlerPacketParams,
        wedge: Wedge,
        species: Species,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        check_positive("mass", params.mass)?;
        check_positive("width", params.width)?;
        check_positive("center", params.center)?;
        if !params.order.is_finite() {
            return Err(Error::Domain("packet order must be finite".into()));
        }
        let mut mode = Self {
            wedge,
            species,
            profile: Profile::RindlerPacket {
                params: *params,
                i_minus: BesselIOrder::new(Complex64::new(-0.5, params.order))?,
                i_plus: BesselIOrder::new(Complex64::new(0.5, params.order))?,
                norm: 1.0,
            },
        };
        mode.normalize(spec)?;
        Ok(mode)
    }

    /// Normalized Minkowski wave packet.
    pub fn minkowski_packet(
        params: &MinkowskiPacketParams,
        wedge: Wedge,
        species: Species,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        check_positive("mass", params.mass)?;
        check_positive("width", params.width)?;
        check_positive("center", params.center)?;
        if !params.wavenumber.is_finite() {
            return Err(Error::Domain("wavenumber must be finite".into()));
        }
        let mut mode = Self {
            wedge,
            species,
            profile: Profile::MinkowskiPacket {
                params: *params,
                spinor: minkowski_spinor(params.mass, params.wavenumber, params.center),
                norm: 1.0,
            },
        };
        mode.normalize(spec)?;
        Ok(mode)
    }

    /// Continuum modes superposed with the Gaussian window
    /// g(Ω) = exp(-(Ω - Ω_c)² / 2w²). Used to test δ-normalization.
    pub fn smeared_continuum(
        center_omega: f64,
        width_omega: f64,
        chart_accel: f64,
        mass: f64,
        wedge: Wedge,
        species: Species,
    ) -> Result<Self> {
        check_positive("window width", width_omega)?;
        check_positive("chart acceleration", chart_accel)?;
        check_positive("mass", mass)?;
        if center_omega - 8.0 * width_omega <= 0.0 {
            return Err(Error::Domain(
                "smearing window must stay at positive frequency".into(),
            ));
        }
        Ok(Self {
            wedge,
            species,
            profile: Profile::Smeared {
                center_omega,
                width_omega,
                chart_accel,
                mass,
            },
        })
    }

    /// Smearing window of a smeared continuum mode, evaluated at Ω.
    pub fn window(&self, omega: f64) -> Option<f64> {
        match self.profile {
            Profile::Smeared {
                center_omega,
                width_omega,
                ..
            } => Some(smeared_window(omega, center_omega, width_omega)),
            _ => None,
        }
    }

    /// The same profile in the other species sector.
    pub fn charge_conjugate(&self) -> Self {
        let species = match self.species {
            Species::Particle => Species::Antiparticle,
            Species::Antiparticle => Species::Particle,
        };
        Self {
            species,
            ..self.clone()
        }
    }

    /// The same profile mirrored into the given wedge.
    pub fn in_wedge(&self, wedge: Wedge) -> Self {
        Self {
            wedge,
            ..self.clone()
        }
    }

    /// Interval of r outside which the mode is treated as zero.
    pub fn support(&self) -> (f64, f64) {
        match &self.profile {
            Profile::Continuum { .. } => (0.0, f64::INFINITY),
            Profile::RindlerPacket { params, .. } => {
                let h = envelope_half_width(params.center, params.width);
                (params.center * (-h).exp(), params.center * h.exp())
            }
            Profile::MinkowskiPacket { params, .. } => {
                let h = envelope_half_width(params.center, params.width);
                (params.center * (-h).exp(), params.center * h.exp())
            }
            Profile::Smeared {
                width_omega,
                chart_accel,
                mass,
                ..
            } => {
                let spread = (-2.0 * ENVELOPE_CUTOFF_EXPONENT).sqrt() * chart_accel / width_omega;
                ((2.0 / mass) * (-spread).exp(), 50.0 / mass)
            }
        }
    }

    /// True for modes with finite norm.
    pub fn is_normalizable(&self) -> bool {
        !matches!(self.profile, Profile::Continuum { .. })
    }

    fn particle_value(&self, r: f64) -> Result<Spinor> {
        let zero = Complex64::new(0.0, 0.0);
        match &self.profile {
            Profile::Continuum {
                omega,
                chart_accel,
                mass,
                order,
            } => {
                let pref = continuum_prefactor(omega / chart_accel, *chart_accel, *mass);
                continuum_particle(pref, order, mass * r)
            }
            Profile::RindlerPacket {
                params,
                i_minus,
                i_plus,
                norm,
            } => {
                let (lo, hi) = self.support();
                if r < lo || r > hi {
                    return Ok([zero, zero]);
                }
                let x = params.mass * r;
                let a = i_minus.scaled(x)?;
                let b = i_plus.scaled(x)? * Complex64::i();
                let env = norm * log_envelope(params.center, params.width, r).exp();
                Ok([(a + b) * env, (a - b) * env])
            }
            Profile::MinkowskiPacket {
                params,
                spinor,
                norm,
            } => {
                let (lo, hi) = self.support();
                if r < lo || r > hi {
                    return Ok([zero, zero]);
                }
                let env = Complex64::from_polar(
                    norm * log_envelope(params.center, params.width, r).exp(),
                    params.wavenumber * r,
                );
                Ok([spinor[0] * env, spinor[1] * env])
            }
            Profile::Smeared {
                center_omega,
                width_omega,
                chart_accel,
                mass,
            } => {
                let lo = (center_omega - 8.0 * width_omega).max(0.0);
                let hi = center_omega + 8.0 * width_omega;
                let spec = QuadratureSpec {
                    abs_tol: 1e-13,
                    rel_tol: 1e-11,
                    ..QuadratureSpec::default()
                };
                let mut out = [zero, zero];
                for (slot, component) in out.iter_mut().enumerate() {
                    let integrand = |omega: f64| {
                        let nu = omega / chart_accel;
                        let Ok(order) = continuum_order(nu) else {
                            return Complex64::new(f64::NAN, 0.0);
                        };
                        let pref = continuum_prefactor(nu, *chart_accel, *mass);
                        match continuum_particle(pref, &order, mass * r) {
                            Ok(w) => smeared_window(omega, *center_omega, *width_omega) * w[slot],
                            Err(_) => Complex64::new(f64::NAN, 0.0),
                        }
                    };
                    *component = adaptive_integrate(integrand, lo, hi, &spec)?.value;
                }
                if out.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::Domain(format!("smeared mode undefined at r = {r}")));
                }
                Ok(out)
            }
        }
    }

    /// Spinor value at distance `r > 0` from the horizon.
    pub fn evaluate(&self, r: f64) -> Result<Spinor> {
        check_positive("distance from the horizon", r)?;
        let v = self.particle_value(r)?;
        Ok(match self.species {
            Species::Particle => v,
            Species::Antiparticle => conjugate(v),
        })
    }

    /// Rescales a normalizable mode to unit norm. Returns the norm before
    /// rescaling.
    pub fn normalize(&mut self, spec: &QuadratureSpec) -> Result<f64> {
        if !self.is_normalizable() {
            return Err(Error::NonNormalizable(
                "continuum modes are δ-normalized".into(),
            ));
        }
        let (lo, hi) = self.support();
        let (ulo, uhi) = (lo.ln(), hi.ln());
        let density = |u: f64| {
            let r = u.exp();
            match self.evaluate(r) {
                Ok(s) => Complex64::new(r * (s[0].norm_sqr() + s[1].norm_sqr()), 0.0),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            }
        };
        let squared = adaptive_integrate(density, ulo, uhi, spec)?.value.re;
        if !(squared > 0.0) || !squared.is_finite() {
            return Err(Error::NonNormalizable(format!("norm² = {squared}")));
        }
        let old = squared.sqrt();
        match &mut self.profile {
            Profile::RindlerPacket { norm, .. } | Profile::MinkowskiPacket { norm, .. } => {
                *norm /= old;
            }
            _ => {
                return Err(Error::NonNormalizable(
                    "only packets carry a normalization".into(),
                ))
            }
        }
        Ok(old)
    }
}

/// Inner product (f, g) = ∫ dr f(r)† g(r).
pub fn inner_product(f: &SpinorMode, g: &SpinorMode, spec: &QuadratureSpec) -> Result<InnerProduct> {
    if f.wedge != g.wedge {
        return Ok(InnerProduct {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            disjoint: true,
        });
    }
    if !f.is_normalizable() && !g.is_normalizable() {
        return Err(Error::NonNormalizable(
            "inner product of two continuum modes is a distribution".into(),
        ));
    }
    let (flo, fhi) = f.support();
    let (glo, ghi) = g.support();
    let (lo, hi) = (flo.max(glo), fhi.min(ghi));
    if lo >= hi {
        return Ok(InnerProduct {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            disjoint: false,
        });
    }
    let integrand = |u: f64| {
        let r = u.exp();
        match (f.evaluate(r), g.evaluate(r)) {
            (Ok(a), Ok(b)) => r * (a[0].conj() * b[0] + a[1].conj() * b[1]),
            _ => Complex64::new(f64::NAN, 0.0),
        }
    };
    let Estimate { value, error, .. } = adaptive_integrate(integrand, lo.ln(), hi.ln(), spec)?;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Domain("mode evaluation failed inside the support".into()));
    }
    Ok(InnerProduct {
        value,
        error,
        disjoint: false,
    })
}

/// Overlaps (ψ, w_Ω) of one packet with the continuum modes of its wedge,
/// for many frequencies Ω.
///
/// The packet is sampled once on a fixed set of 21-point Gauss–Kronrod
/// panels in u = ln r that resolves the fastest oscillation expected up to
/// `max_omega`. Each coefficient carries its own Kronrod–Gauss error
/// estimate; if that misses the tolerance the coefficient is recomputed
/// with fully adaptive quadrature.
#[derive(Clone, Debug)]
pub struct SpectralOverlap {
    packet: SpinorMode,
    chart_accel: f64,
    mass: f64,
    /// Per panel: 21 nodes (r, Kronrod weight, Gauss weight, packet value).
    panels: Vec<Vec<(f64, f64, f64, Spinor)>>,
}

const GK_NODES: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const GK_WEIGHTS: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const G_WEIGHTS: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

impl SpectralOverlap {
    pub fn new(packet: &SpinorMode, chart_accel: f64, max_omega: f64) -> Result<Self> {
        check_positive("chart acceleration", chart_accel)?;
        check_positive("maximum frequency", max_omega)?;
        let (params_center, params_width, order, mass) = match &packet.profile {
            Profile::RindlerPacket { params, .. } => {
                (params.center, params.width, params.order, params.mass)
            }
            _ => {
                return Err(Error::Unsupported(
                    "spectral overlaps are defined for Rindler packets".into(),
                ))
            }
        };
        let (lo, hi) = packet.support();
        let (ulo, uhi) = (lo.ln(), hi.ln());
        // Phase rate in u: packet order, largest continuum order, and the
        // bandwidth of the Gaussian envelope.
        let rate = order.abs() + max_omega / chart_accel + 8.0 * params_center / params_width;
        let count = (((uhi - ulo) * rate / PI).ceil() as usize).max(8);
        let step = (uhi - ulo) / count as f64;
        let mut panels = Vec::with_capacity(count);
        for p in 0..count {
            let a = ulo + p as f64 * step;
            let center = a + 0.5 * step;
            let half = 0.5 * step;
            let mut nodes = Vec::with_capacity(21);
            let mut push = |t: f64, wk: f64, wg: f64| -> Result<()> {
                let u = center + half * t;
                let r = u.exp();
                let v = packet.evaluate(r)?;
                nodes.push((r, wk * half * r, wg * half * r, [v[0].conj(), v[1].conj()]));
                Ok(())
            };
            push(0.0, GK_WEIGHTS[10], 0.0)?;
            for j in 0..10 {
                let wg = if j % 2 == 1 { G_WEIGHTS[j / 2] } else { 0.0 };
                push(-GK_NODES[j], GK_WEIGHTS[j], wg)?;
                push(GK_NODES[j], GK_WEIGHTS[j], wg)?;
            }
            panels.push(nodes);
        }
        Ok(Self {
            packet: packet.clone(),
            chart_accel,
            mass,
            panels,
        })
    }

    /// Number of packet samples held in the table.
    pub fn node_count(&self) -> usize {
        self.panels.iter().map(Vec::len).sum()
    }

    /// Overlap (ψ, w_Ω) with the continuum mode of the packet's own species.
    pub fn coefficient(&self, omega: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        check_positive("frequency", omega)?;
        let nu = omega / self.chart_accel;
        let order = continuum_order(nu)?;
        let pref = continuum_prefactor(nu, self.chart_accel, self.mass);
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        let mut samples = [Complex64::new(0.0, 0.0); 21];
        for nodes in &self.panels {
            let mut kronrod = Complex64::new(0.0, 0.0);
            let mut gauss = Complex64::new(0.0, 0.0);
            let mut weight_sum = 0.0;
            for (slot, &(r, wk, wg, psi)) in nodes.iter().enumerate() {
                let mut w = continuum_particle(pref, &order, self.mass * r)?;
                if self.packet.species == Species::Antiparticle {
                    w = conjugate(w);
                }
                let f = psi[0] * w[0] + psi[1] * w[1];
                samples[slot] = f;
                kronrod += wk * f;
                gauss += wg * f;
                weight_sum += wk;
            }
            let mean = kronrod / weight_sum;
            let asc: f64 = nodes
                .iter()
                .zip(samples.iter())
                .map(|(n, f)| n.1 * (f - mean).norm())
                .sum();
            let mut err = (kronrod - gauss).norm();
            if asc != 0.0 && err != 0.0 {
                err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
            }
            value += kronrod;
            error += err;
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.norm()) {
            return Ok(Estimate {
                value,
                error,
                evaluations: self.node_count(),
            });
        }
        let mode = SpinorMode::rindler_continuum(
            omega,
            self.chart_accel,
            self.mass,
            self.packet.wedge,
            self.packet.species,
        )?;
        let ip = inner_product(&self.packet, &mode, spec)?;
        Ok(Estimate {
            value: ip.value,
            error: ip.error,
            evaluations: 0,
        })
    }
}
