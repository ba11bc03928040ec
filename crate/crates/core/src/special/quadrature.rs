//! Adaptive 21-point Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! Infinite limits are mapped onto a finite interval with `x = a + t/(1-t)`.
//! The vector-valued variant shares one subdivision between several
//! integrands, so that expensive common factors are evaluated once per node.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
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

const WGK: [f64; 11] = [
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

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Tolerances and limits for adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Relative magnitude below which an integrand tail is dropped.
    pub truncation_threshold: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            truncation_threshold: 1e-17,
        }
    }
}

impl QuadratureSpec {
    /// Same limits with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

/// Scalar integration result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Result of integrating several integrands over a shared subdivision.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorEstimate<const K: usize> {
    pub values: [Complex64; K],
    pub errors: [f64; K],
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Mapping {
    kind: MapKind,
    origin: f64,
}

#[derive(Clone, Copy)]
enum MapKind {
    Identity,
    /// x = origin + t/(1-t), t in [0, 1)
    Upper,
    /// x = origin - t/(1-t), t in [0, 1)
    Lower,
}

impl Mapping {
    fn apply(&self, t: f64) -> (f64, f64) {
        match self.kind {
            MapKind::Identity => (t, 1.0),
            MapKind::Upper => {
                let d = 1.0 - t;
                (self.origin + t / d, 1.0 / (d * d))
            }
            MapKind::Lower => {
                let d = 1.0 - t;
                (self.origin - t / d, 1.0 / (d * d))
            }
        }
    }
}

struct Segment<const K: usize> {
    lo: f64,
    hi: f64,
    values: [Complex64; K],
    errors: [f64; K],
}

fn gauss_kronrod<const K: usize, F>(f: &mut F, map: Mapping, lo: f64, hi: f64) -> Segment<K>
where
    F: FnMut(f64) -> [Complex64; K],
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut eval = |t: f64| {
        let (x, jac) = map.apply(t);
        let mut v = f(x);
        for c in v.iter_mut() {
            *c *= jac;
        }
        v
    };

    let zero = [Complex64::new(0.0, 0.0); K];
    let mut samples = [[zero; 2]; 10];
    let fc = eval(center);
    let mut kronrod = zero;
    let mut gauss = zero;
    for k in 0..K {
        kronrod[k] = fc[k] * WGK[10];
    }
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        for k in 0..K {
            let s = f1[k] + f2[k];
            kronrod[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
        *sample = [f1, f2];
    }

    let mut values = zero;
    let mut errors = [0.0; K];
    for k in 0..K {
        let mean = kronrod[k] * 0.5;
        let mut abs_sum = WGK[10] * fc[k].norm();
        let mut asc = WGK[10] * (fc[k] - mean).norm();
        for (j, s) in samples.iter().enumerate() {
            abs_sum += WGK[j] * (s[0][k].norm() + s[1][k].norm());
            asc += WGK[j] * ((s[0][k] - mean).norm() + (s[1][k] - mean).norm());
        }
        let abs_sum = abs_sum * half.abs();
        let asc = asc * half.abs();
        let mut err = ((kronrod[k] - gauss[k]) * half).norm();
        if asc != 0.0 && err != 0.0 {
            err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
        }
        if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * abs_sum);
        }
        values[k] = kronrod[k] * half;
        errors[k] = err;
    }
    Segment { lo, hi, values, errors }
}

fn integrate_mapped<const K: usize, F>(
    f: &mut F,
    map: Mapping,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> VectorEstimate<K>
where
    F: FnMut(f64) -> [Complex64; K],
{
    let mut segments = vec![gauss_kronrod(f, map, lo, hi)];
    let mut evaluations = 21;
    loop {
        let mut values = [Complex64::new(0.0, 0.0); K];
        let mut errors = [0.0; K];
        for s in &segments {
            for k in 0..K {
                values[k] += s.values[k];
                errors[k] += s.errors[k];
            }
        }
        let tols: Vec<f64> = values.iter().map(|v| spec.tolerance(v.norm())).collect();
        let converged = (0..K).all(|k| errors[k] <= tols[k]);
        if converged || segments.len() >= spec.max_subdivisions.max(1) {
            return VectorEstimate {
                values,
                errors,
                evaluations,
                converged,
            };
        }
        let score = |s: &Segment<K>| {
            (0..K)
                .map(|k| s.errors[k] / tols[k].max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        };
        let (worst, _) = segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, score(s)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval can no longer be split in floating point.
            segments.push(seg);
            let mut values = [Complex64::new(0.0, 0.0); K];
            let mut errors = [0.0; K];
            for s in &segments {
                for k in 0..K {
                    values[k] += s.values[k];
                    errors[k] += s.errors[k];
                }
            }
            return VectorEstimate {
                values,
                errors,
                evaluations,
                converged: false,
            };
        }
        segments.push(gauss_kronrod(f, map, seg.lo, mid));
        segments.push(gauss_kronrod(f, map, mid, seg.hi));
        evaluations += 42;
    }
}

fn check_limits(lo: f64, hi: f64) -> Result<()> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::Domain("integration limit is NaN".into()));
    }
    if lo > hi {
        return Err(Error::Domain(format!("integration limits reversed: {lo} > {hi}")));
    }
    Ok(())
}

/// Integrates several complex integrands over `[lo, hi]` with one shared
/// adaptive subdivision. Either limit may be infinite. Convergence requires
/// every component to meet its own tolerance; `converged` is false otherwise
/// and the best estimate is returned.
pub fn adaptive_integrate_many<const K: usize, F>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<VectorEstimate<K>>
where
    F: FnMut(f64) -> [Complex64; K],
{
    integrate_any(&mut f, lo, hi, spec)
}

fn integrate_any<const K: usize, F>(
    f: &mut F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<VectorEstimate<K>>
where
    F: FnMut(f64) -> [Complex64; K],
{
    check_limits(lo, hi)?;
    if lo == hi {
        return Ok(VectorEstimate {
            values: [Complex64::new(0.0, 0.0); K],
            errors: [0.0; K],
            evaluations: 0,
            converged: true,
        });
    }
    let identity = Mapping {
        kind: MapKind::Identity,
        origin: 0.0,
    };
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => Ok(integrate_mapped(f, identity, lo, hi, spec)),
        (true, false) => {
            let map = Mapping {
                kind: MapKind::Upper,
                origin: lo,
            };
            Ok(integrate_mapped(f, map, 0.0, 1.0, spec))
        }
        (false, true) => {
            let map = Mapping {
                kind: MapKind::Lower,
                origin: hi,
            };
            Ok(integrate_mapped(f, map, 0.0, 1.0, spec))
        }
        (false, false) => {
            let half_spec = spec.scaled(0.5);
            let left = integrate_any(f, f64::NEG_INFINITY, 0.0, &half_spec)?;
            let right = integrate_any(f, 0.0, f64::INFINITY, &half_spec)?;
            let mut values = left.values;
            let mut errors = left.errors;
            for k in 0..K {
                values[k] += right.values[k];
                errors[k] += right.errors[k];
            }
            Ok(VectorEstimate {
                values,
                errors,
                evaluations: left.evaluations + right.evaluations,
                converged: left.converged && right.converged,
            })
        }
    }
}

/// Integrates a complex integrand over `[lo, hi]` (limits may be infinite).
///
/// Fails with [`Error::ToleranceNotMet`] carrying the best estimate when the
/// subdivision limit is exhausted.
pub fn adaptive_integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    let r = adaptive_integrate_many(|x| [f(x)], lo, hi, spec)?;
    if !r.converged {
        return Err(Error::ToleranceNotMet {
            value: r.values[0],
            error: r.errors[0],
        });
    }
    Ok(Estimate {
        value: r.values[0],
        error: r.errors[0],
        evaluations: r.evaluations,
    })
}
