//! Logarithmic-negativity lower bound for two-mode fermionic Gaussian states.
//!
//! The partial transpose of a fermionic Gaussian state is a combination of
//! two Gaussian operators O± with matrices
//! Γ± = [[Γ_AA, ±iΓ_AB], [±iΓ_BA, -Γ_BB]], Γ = iσ. With ±ν⁺, ±ν⁻ the
//! eigenvalues of Γ₊ the bound reads
//! Ẽ = ln(Re z + Im z), z = ½(1 + ν⁺ν⁻ + ν⁺ - ν⁻).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::ChannelElements;
use crate::error::{Error, Result};
use crate::gaussian::{pfaffian, CovarianceMatrix, ModeLabel};
use crate::modes::{Species, Wedge};

/// Tolerance on the vacuum-template pattern of σ_AB.
const TEMPLATE_TOL: f64 = 1e-14;

/// The two modes whose mutual entanglement is bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub side_a: ModeLabel,
    pub side_b: ModeLabel,
}

impl Bipartition {
    pub fn new(side_a: ModeLabel, side_b: ModeLabel) -> Result<Self> {
        if side_a == side_b {
            return Err(Error::Shape(format!("bipartition sides coincide: {side_a}")));
        }
        Ok(Self { side_a, side_b })
    }

    /// Wedge I particles against wedge II antiparticles.
    pub fn vacuum_default() -> Self {
        Self {
            side_a: ModeLabel::Slot(Wedge::I, Species::Particle),
            side_b: ModeLabel::Slot(Wedge::II, Species::Antiparticle),
        }
    }

    /// Wedge I antiparticles against wedge II particles.
    pub fn vacuum_mirrored() -> Self {
        Self {
            side_a: ModeLabel::Slot(Wedge::I, Species::Antiparticle),
            side_b: ModeLabel::Slot(Wedge::II, Species::Particle),
        }
    }

    /// Wedge I particles against wedge II particles.
    pub fn bell() -> Self {
        Self {
            side_a: ModeLabel::Slot(Wedge::I, Species::Particle),
            side_b: ModeLabel::Slot(Wedge::II, Species::Particle),
        }
    }
}

/// Γ₊ and Γ₋ of a bipartition.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaPair {
    pub plus: DMatrix<Complex64>,
    pub minus: DMatrix<Complex64>,
    /// Whether [Γ₊, Γ₋] vanishes, in which case the bound is the exact
    /// negativity.
    pub commuting: bool,
}

/// 4×4 covariance of the two bipartition modes, side A first.
pub fn bipartite_block(sigma: &CovarianceMatrix, part: &Bipartition) -> Result<CovarianceMatrix> {
    let find = |label: ModeLabel| {
        sigma
            .layout()
            .position(label)
            .ok_or_else(|| Error::Shape(format!("mode {label} not in the layout")))
    };
    sigma.submatrix(&[find(part.side_a)?, find(part.side_b)?])
}

fn gamma_sign(block: &DMatrix<f64>, sign: f64) -> DMatrix<Complex64> {
    let i = Complex64::i();
    DMatrix::from_fn(4, 4, |r, c| {
        // Γ = iσ
        let g = i * block[(r, c)];
        match (r < 2, c < 2) {
            (true, true) => g,
            (false, false) => -g,
            _ => sign * i * g,
        }
    })
}

pub fn gamma_plus_minus(sigma: &CovarianceMatrix, part: &Bipartition) -> Result<GammaPair> {
    let block = bipartite_block(sigma, part)?;
    let plus = gamma_sign(block.matrix(), 1.0);
    let minus = gamma_sign(block.matrix(), -1.0);
    let commutator = &plus * &minus - &minus * &plus;
    let scale = plus.iter().map(|z| z.norm()).fold(1.0, f64::max);
    Ok(GammaPair {
        commuting: commutator.iter().all(|z| z.norm() <= 1e-12 * scale * scale),
        plus,
        minus,
    })
}

/// How a [`NuPair`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NuProvenance {
    ClosedForm,
    Eigensolver,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuPair {
    pub nu_plus: Complex64,
    pub nu_minus: Complex64,
    pub provenance: NuProvenance,
}

impl NuPair {
    fn product(&self) -> Complex64 {
        self.nu_plus * self.nu_minus
    }
}

/// σ_AB recovered from Γ₊ = [[iσ_AA, -σ_AB], [σ_ABᵀ, -iσ_BB]].
fn sigma_from_gamma_plus(gp: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let i = Complex64::i();
    DMatrix::from_fn(4, 4, |r, c| match (r < 2, c < 2) {
        (true, true) => -i * gp[(r, c)],
        (false, false) => i * gp[(r, c)],
        (true, false) => -gp[(r, c)],
        (false, true) => gp[(r, c)],
    })
}

/// Parameters (N_A, N_B, X) when σ_AB has the shape
/// [[N_A J, C], [-Cᵀ, N_B J]] with C = [[Im X, Re X], [Re X, -Im X]].
fn vacuum_template(s: &DMatrix<Complex64>) -> Option<(f64, f64, Complex64)> {
    let scale = s.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = TEMPLATE_TOL * scale;
    if s.iter().any(|z| z.im.abs() > tol) {
        return None;
    }
    let e = |r: usize, c: usize| s[(r, c)].re;
    let x = Complex64::new(e(0, 3), e(0, 2));
    let pattern = [
        (e(2, 1), x.re),
        (e(1, 3), -x.im),
        (e(1, 2), x.re),
    ];
    if pattern.iter().any(|(got, want)| (got - want).abs() > tol) {
        return None;
    }
    Some((e(0, 1), e(2, 3), x))
}

/// Spectrum-consistent pair whose difference maximizes Re + Im of the
/// bound argument, with ν⁺ν⁻ fixed to Pf(Γ₊).
fn pair_from_spectrum(lambdas: [Complex64; 2], product: Complex64, provenance: NuProvenance) -> NuPair {
    let [l1, l2] = lambdas;
    let l2 = if (l1 * l2 - product).norm() <= (l1 * -l2 - product).norm() {
        l2
    } else {
        -l2
    };
    let diff = l1 - l2;
    if diff.re + diff.im >= 0.0 {
        NuPair { nu_plus: l1, nu_minus: l2, provenance }
    } else {
        NuPair { nu_plus: -l1, nu_minus: -l2, provenance }
    }
}

/// Eigenvalues of Γ₊ grouped into two ± pairs, one representative each.
/// Γ₊ is complex antisymmetric, so the squares λ₁², λ₂² solve
/// t² - ½tr(Γ₊²) t + det Γ₊ = 0 with det Γ₊ = Pf(Γ₊)².
pub fn gamma_plus_spectrum(gp: &DMatrix<Complex64>) -> Result<[Complex64; 2]> {
    if gp.shape() != (4, 4) {
        return Err(Error::Shape(format!("Γ₊ must be 4x4, got {:?}", gp.shape())));
    }
    let pf = pfaffian(gp)?;
    let half_trace = 0.5 * (gp * gp).trace();
    let disc = (half_trace * half_trace - 4.0 * pf * pf).sqrt();
    // Larger-magnitude root first, the other from Vieta to avoid cancellation.
    let big = 0.5 * if (half_trace + disc).norm() >= (half_trace - disc).norm() {
        half_trace + disc
    } else {
        half_trace - disc
    };
    let small = if big.norm() > 0.0 { pf * pf / big } else { Complex64::new(0.0, 0.0) };
    Ok([big.sqrt(), small.sqrt()])
}

/// ν⁺, ν⁻ of Γ₊. The closed form is used for the vacuum template and
/// checked against the eigensolver.
pub fn nu_pair(gp: &DMatrix<Complex64>) -> Result<NuPair> {
    let lambdas = gamma_plus_spectrum(gp)?;
    let generic = pair_from_spectrum(lambdas, pfaffian(gp)?, NuProvenance::Eigensolver);
    let Some((na, nb, x)) = vacuum_template(&sigma_from_gamma_plus(gp)) else {
        return Ok(generic);
    };
    let root = Complex64::new((na - nb).powi(2) - 4.0 * x.norm_sqr(), 0.0).sqrt();
    let closed = NuPair {
        nu_plus: 0.5 * (na + nb + root),
        nu_minus: 0.5 * (na + nb - root),
        provenance: NuProvenance::ClosedForm,
    };
    let scale = 1.0 + na.abs() + nb.abs() + x.norm();
    let agrees = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-10 * scale;
    let spectrum_matches = [closed.nu_plus, closed.nu_minus].iter().all(|nu| {
        lambdas.iter().any(|l| agrees(*l, *nu) || agrees(*l, -*nu))
    });
    if !spectrum_matches || !agrees(closed.product(), generic.product()) {
        return Err(Error::NonConvergence(format!(
            "closed-form ν ({}, {}) disagrees with eigensolver ({}, {})",
            closed.nu_plus, closed.nu_minus, generic.nu_plus, generic.nu_minus
        )));
    }
    Ok(closed)
}

fn bound_argument_check(arg: f64) -> Result<f64> {
    if !(arg > 0.0) {
        return Err(Error::Unphysical(format!(
            "negativity bound argument {arg} is not positive; inconsistent ν pairing"
        )));
    }
    Ok(arg)
}

/// Ẽ = ln(Re z + Im z), z = ½(1 + ν⁺ν⁻ + ν⁺ - ν⁻).
pub fn bound_from_nu(nu: &NuPair) -> Result<f64> {
    let z = 0.5 * (1.0 + nu.product() + nu.nu_plus - nu.nu_minus);
    Ok(bound_argument_check(z.re + z.im)?.ln())
}

/// Closed-form bound for a template block given the deficits 1 - N_A and
/// 1 - N_B, evaluated without cancellation against 1.
pub fn template_bound(deficit_a: f64, deficit_b: f64, cross: Complex64) -> Result<f64> {
    let x2 = cross.norm_sqr();
    let root = Complex64::new((deficit_b - deficit_a).powi(2) - 4.0 * x2, 0.0).sqrt();
    // z - 1 with N_A N_B = 1 - d_A - d_B + d_A d_B
    let excess = 0.5 * (-deficit_a - deficit_b + deficit_a * deficit_b + x2 + root.re + root.im);
    bound_argument_check(1.0 + excess)?;
    Ok(excess.ln_1p())
}

/// Bound between wedge I and wedge II modes of the transformed vacuum.
pub fn vacuum_negativity(el: &ChannelElements, part: &Bipartition) -> Result<f64> {
    let default = Bipartition::vacuum_default();
    let mirrored = Bipartition::vacuum_mirrored();
    let cross = if *part == default {
        el.cross_plus
    } else if *part == mirrored {
        el.cross_minus
    } else {
        return Err(Error::Unsupported(format!(
            "closed form covers only particle/antiparticle partitions across the wedges, got {} | {}",
            part.side_a, part.side_b
        )));
    };
    template_bound(el.deficit_i, el.deficit_ii, cross)
}

/// Bound between the two particle modes of a transformed Bell state.
pub fn bell_negativity(sigma: &CovarianceMatrix) -> Result<f64> {
    let gp = gamma_plus_minus(sigma, &Bipartition::bell())?;
    bound_from_nu(&nu_pair(&gp.plus)?)
}

/// Bell bound from the channel elements using the truncated particle block,
/// with deficits kept separate from 1.
pub fn bell_negativity_truncated(el: &ChannelElements) -> Result<f64> {
    let deficit = |d: f64, alpha: Complex64| d + alpha.norm_sqr();
    template_bound(
        deficit(el.deficit_i, el.alpha_i_plus),
        deficit(el.deficit_ii, el.alpha_ii_plus),
        el.alpha_i_plus * el.alpha_ii_plus,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{assemble_channel, assemble_vacuum_sigma};
    use crate::gaussian::ModeLayout;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bell_gamma_plus_matches_hand_result() {
        let gp = gamma_plus_minus(&CovarianceMatrix::bell_canonical(), &Bipartition::bell()).unwrap();
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.0, 0.0, -1.0,
            0.0, 0.0, -1.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            1.0, 0.0, 0.0, 0.0,
        ])
        .map(|v| c(v, 0.0));
        assert_eq!(gp.plus, want);
        let sq = &gp.plus * &gp.plus + DMatrix::identity(4, 4);
        assert!(sq.iter().all(|z| z.norm() < 1e-15));
        let nu = nu_pair(&gp.plus).unwrap();
        assert!((bound_from_nu(&nu).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!((bell_negativity(&CovarianceMatrix::bell_canonical()).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn bound_examples() {
        let nu = |p: Complex64, m: Complex64| NuPair {
            nu_plus: p,
            nu_minus: m,
            provenance: NuProvenance::Eigensolver,
        };
        assert_eq!(bound_from_nu(&nu(c(1.0, 0.0), c(1.0, 0.0))).unwrap(), 0.0);
        let b = bound_from_nu(&nu(c(0.0, 1.0), c(0.0, -1.0))).unwrap();
        assert!((b - 2f64.ln()).abs() < 1e-15);
        assert!(bound_from_nu(&nu(c(0.0, -1.0), c(0.0, 1.0))).is_err());
    }

    #[test]
    fn uncorrelated_closed_form_returns_diagonal() {
        let el = ChannelElements::thermal(0.1, 0.3, c(0.0, 0.0));
        let s = assemble_vacuum_sigma(&el);
        let gp = gamma_plus_minus(&s, &Bipartition::vacuum_default()).unwrap();
        assert!(gp.commuting);
        let nu = nu_pair(&gp.plus).unwrap();
        assert_eq!(nu.provenance, NuProvenance::ClosedForm);
        assert!((nu.nu_plus - c(0.9, 0.0)).norm() < 1e-15);
        assert!((nu.nu_minus - c(0.7, 0.0)).norm() < 1e-15);
        assert!(vacuum_negativity(&el, &Bipartition::vacuum_default()).unwrap() <= 1e-16);
    }

    #[test]
    fn vacuum_closed_form_matches_generic_route() {
        for &(da, db, x) in &[
            (1e-3, 1e-3, c(-0.03, 0.0)),
            (2e-3, 5e-4, c(-0.01, 0.02)),
            (0.2, 0.01, c(0.05, -0.01)),
            (0.0, 0.0, c(0.0, 0.0)),
        ] {
            let el = ChannelElements::thermal(da, db, x);
            let s = assemble_vacuum_sigma(&el);
            for part in [Bipartition::vacuum_default(), Bipartition::vacuum_mirrored()] {
                let gp = gamma_plus_minus(&s, &part).unwrap();
                let nu = nu_pair(&gp.plus).unwrap();
                let generic = bound_from_nu(&nu).unwrap();
                let closed = vacuum_negativity(&el, &part).unwrap();
                assert!((generic - closed).abs() < 1e-12, "{generic} vs {closed}");
            }
        }
    }

    #[test]
    fn bell_limits() {
        let unaccelerated = assemble_channel(&ChannelElements::inertial())
            .apply(&CovarianceMatrix::bell_canonical())
            .unwrap();
        assert!((bell_negativity(&unaccelerated).unwrap() - 2f64.ln()).abs() < 1e-14);
        let decoupled = ChannelElements::inertial().with_overlaps(c(0.0, 0.0), c(0.0, 0.0));
        let out = assemble_channel(&decoupled)
            .apply(&CovarianceMatrix::bell_canonical())
            .unwrap();
        assert!(bell_negativity(&out).unwrap().abs() < 1e-15);
        assert!(bell_negativity_truncated(&decoupled).unwrap().abs() < 1e-15);
    }

    #[test]
    fn bell_routes_agree() {
        let el = ChannelElements::thermal(1e-4, 2e-4, c(-3e-3, 0.0))
            .with_overlaps(c(0.8, 0.5), c(0.6, -0.7));
        let out = assemble_channel(&el).apply(&CovarianceMatrix::bell_canonical()).unwrap();
        let a = bell_negativity(&out).unwrap();
        let b = bell_negativity_truncated(&el).unwrap();
        assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        assert!(a > 0.0 && a < 2f64.ln());
    }

    #[test]
    fn spectrum_matches_schur_eigenvalues() {
        let el = ChannelElements::thermal(2e-3, 5e-4, c(-0.01, 0.02))
            .with_overlaps(c(0.8, 0.3), c(0.5, -0.6));
        let s = assemble_channel(&el).apply(&assemble_vacuum_sigma(&el)).unwrap();
        for part in [Bipartition::vacuum_default(), Bipartition::bell()] {
            let gp = gamma_plus_minus(&s, &part).unwrap().plus;
            let eig = gp.clone().try_schur(1e-15, 10_000).unwrap().eigenvalues().unwrap();
            let [l1, l2] = gamma_plus_spectrum(&gp).unwrap();
            for want in [l1, -l1, l2, -l2] {
                assert!(eig.iter().any(|e| (e - want).norm() < 1e-10), "{want} not in {eig}");
            }
        }
    }

    #[test]
    fn missing_mode_is_an_error() {
        let s = CovarianceMatrix::vacuum(ModeLayout::indexed(2));
        assert!(gamma_plus_minus(&s, &Bipartition::bell()).is_err());
        assert!(Bipartition::new(ModeLabel::Index(0), ModeLabel::Index(0)).is_err());
    }
}
