//! Dense-matrix reference implementation for small systems (at most four
//! modes, Hilbert space dimension 16).
//!
//! Majorana operators are built with a Jordan–Wigner string, mode 0 being
//! the most significant tensor factor, with f = |0⟩⟨1| on each site. States
//! are reconstructed from covariance matrices, observables are evaluated by
//! plain traces, and channels are realized by an explicit unitary dilation.
//! Nothing here reuses the covariance-level formulas it is meant to check.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gaussian::{pfaffian, CovarianceMatrix, FirstMoments, GaussianChannel, ModeLayout};

/// Largest supported mode count.
pub const MAX_MODES: usize = 4;

type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Majorana operators and all their ordered monomials for `n` modes.
#[derive(Clone, Debug)]
pub struct DenseMajoranas {
    modes: usize,
    ops: Vec<CMatrix>,
    /// Monomial c_S for every subset S, indexed by bitmask.
    monomials: Vec<CMatrix>,
}

impl DenseMajoranas {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 || modes > MAX_MODES {
            return Err(Error::Unsupported(format!(
                "dense oracle supports 1..={MAX_MODES} modes, got {modes}"
            )));
        }
        let id = CMatrix::identity(2, 2);
        let z = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let lower = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut ops = Vec::with_capacity(2 * modes);
        for j in 0..modes {
            let mut f = CMatrix::identity(1, 1);
            for k in 0..modes {
                let factor = if k < j {
                    &z
                } else if k == j {
                    &lower
                } else {
                    &id
                };
                f = kron(&f, factor);
            }
            let fd = f.adjoint();
            ops.push((&fd + &f) * c(s, 0.0));
            ops.push((&fd - &f) * c(0.0, -s));
        }
        let dim = 1 << modes;
        let count = 1usize << (2 * modes);
        let mut monomials = Vec::with_capacity(count);
        for mask in 0..count {
            let mut m = CMatrix::identity(dim, dim);
            for (k, op) in ops.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    m = &m * op;
                }
            }
            monomials.push(m);
        }
        Ok(Self {
            modes,
            ops,
            monomials,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dimension(&self) -> usize {
        1 << self.modes
    }

    /// Majorana operator c_k, zero-based.
    pub fn op(&self, k: usize) -> &CMatrix {
        &self.ops[k]
    }

    /// Ordered monomial for the subset encoded in `mask`.
    pub fn monomial(&self, mask: usize) -> &CMatrix {
        &self.monomials[mask]
    }

    /// Coefficients x_S of X = Σ_S x_S c_S.
    pub fn expand(&self, x: &CMatrix) -> Vec<Complex64> {
        let dim = self.dimension() as f64;
        self.monomials
            .iter()
            .enumerate()
            .map(|(mask, m)| {
                let norm = dim * 0.5f64.powi(mask.count_ones() as i32);
                (m.adjoint() * x).trace() / norm
            })
            .collect()
    }

    /// Σ_S x_S c_S
    pub fn assemble(&self, coeffs: &[Complex64]) -> CMatrix {
        let d = self.dimension();
        let mut out = CMatrix::zeros(d, d);
        for (m, &x) in self.monomials.iter().zip(coeffs) {
            if x != c(0.0, 0.0) {
                out += m * x;
            }
        }
        out
    }
}

/// Pair structure of an antisymmetric matrix: σ = O (⊕_k λ_k J) Oᵀ with
/// O orthogonal and J = [[0, 1], [-1, 0]].
pub fn williamson_form(sigma: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = sigma.nrows();
    if n % 2 != 0 || !sigma.is_square() {
        return Err(Error::Shape("antisymmetric matrix of even size expected".into()));
    }
    // -σ² is symmetric positive semidefinite with eigenvalues λ_k², each
    // twice; σ maps each eigenspace to itself.
    let sym = -(sigma * sigma);
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n / 2);
    for &idx in &order {
        if basis.len() == n {
            break;
        }
        let mut v = eig.eigenvectors.column(idx).into_owned();
        for b in &basis {
            let p = b.dot(&v);
            v -= b * p;
        }
        let norm = v.norm();
        if norm < 1e-6 {
            continue;
        }
        let v = v / norm;
        // Partner: w ∝ -σᵀ v = σ v, so that vᵀ σ w = λ.
        let mut w = sigma * &v;
        for b in &basis {
            let p = b.dot(&w);
            w -= b * p;
        }
        let p = v.dot(&w);
        w -= &v * p;
        let lambda = w.norm();
        if lambda < 1e-12 {
            // Zero pair: complete with any orthonormal vector.
            let mut found = None;
            for e in 0..n {
                let mut u = nalgebra::DVector::zeros(n);
                u[e] = 1.0;
                for b in basis.iter().chain(std::iter::once(&v)) {
                    let p = b.dot(&u);
                    u -= b * p;
                }
                if u.norm() > 1e-6 {
                    found = Some(u.normalize());
                    break;
                }
            }
            let u = found.ok_or_else(|| Error::Shape("could not complete basis".into()))?;
            lambdas.push(0.0);
            basis.push(v);
            basis.push(u);
        } else {
            let w = w / lambda;
            lambdas.push(v.dot(&(sigma * &w)));
            basis.push(v);
            basis.push(w);
        }
    }
    let o = DMatrix::from_columns(&basis);
    Ok((o, lambdas))
}

/// Density matrix of the Gaussian state with covariance σ and zero first
/// moments: ρ = Π_k (1 + λ_k Z'_k)/2 with Z'_k = 2i c'_{2k} c'_{2k+1} in the
/// rotated Majoranas c' = Oᵀ c.
pub fn dense_state(maj: &DenseMajoranas, sigma: &CovarianceMatrix) -> Result<CMatrix> {
    if sigma.modes() != maj.modes() {
        return Err(Error::Shape("mode count mismatch".into()));
    }
    let (o, lambdas) = williamson_form(sigma.matrix())?;
    let d = maj.dimension();
    let rotated: Vec<CMatrix> = (0..2 * maj.modes())
        .map(|a| {
            let mut m = CMatrix::zeros(d, d);
            for k in 0..2 * maj.modes() {
                m += maj.op(k) * c(o[(k, a)], 0.0);
            }
            m
        })
        .collect();
    let mut rho = CMatrix::identity(d, d);
    for (k, &lambda) in lambdas.iter().enumerate() {
        let z = &rotated[2 * k] * &rotated[2 * k + 1] * c(0.0, 2.0);
        let factor = (CMatrix::identity(d, d) + z * c(lambda, 0.0)) * c(0.5, 0.0);
        rho = rho * factor;
    }
    Ok(rho)
}

/// Covariance σ_kl = i Tr(ρ [c_k, c_l]) and first moments Tr(ρ c_k).
pub fn covariance_from_density(
    maj: &DenseMajoranas,
    rho: &CMatrix,
) -> Result<(CovarianceMatrix, FirstMoments)> {
    let n = 2 * maj.modes();
    let mut sigma = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            if k != l {
                let comm = maj.op(k) * maj.op(l) - maj.op(l) * maj.op(k);
                sigma[(k, l)] = (c(0.0, 1.0) * (rho * comm).trace()).re;
            }
        }
    }
    let mu = nalgebra::DVector::from_fn(n, |k, _| (rho * maj.op(k)).trace().re);
    Ok((
        CovarianceMatrix::new(sigma, ModeLayout::indexed(maj.modes()))?,
        FirstMoments(mu),
    ))
}

/// Largest deviation of ⟨c_S⟩ from Pf(σ_S)/(2i)^{|S|/2} over all
/// nonempty even subsets S.
pub fn wick_defect(maj: &DenseMajoranas, rho: &CMatrix, sigma: &CovarianceMatrix) -> Result<f64> {
    let n = 2 * maj.modes();
    let mut worst: f64 = 0.0;
    for mask in 1usize..(1 << n) {
        let size = mask.count_ones() as usize;
        if size % 2 != 0 {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let sub = DMatrix::from_fn(size, size, |a, b| c(sigma.matrix()[(idx[a], idx[b])], 0.0));
        let want = pfaffian(&sub)? / c(0.0, 2.0).powi((size / 2) as i32);
        let got = (rho * maj.monomial(mask)).trace();
        worst = worst.max((got - want).norm());
    }
    Ok(worst)
}

fn subsystem_mask(modes: &[usize]) -> usize {
    modes.iter().fold(0, |m, &j| m | (0b11 << (2 * j)))
}

/// Fermionic partial transpose of ρ over the modes in `part_b`: monomials
/// with m Majoranas in B pick up the phase 1, 1, -1, -1 for m mod 4.
pub fn partial_transpose(maj: &DenseMajoranas, rho: &CMatrix, part_b: &[usize]) -> CMatrix {
    let b = subsystem_mask(part_b);
    let coeffs: Vec<Complex64> = maj
        .expand(rho)
        .into_iter()
        .enumerate()
        .map(|(mask, x)| match (mask & b).count_ones() % 4 {
            0 | 1 => x,
            _ => -x,
        })
        .collect();
    maj.assemble(&coeffs)
}

/// ln ‖ρ^{T_B}‖₁
pub fn exact_log_negativity(maj: &DenseMajoranas, rho: &CMatrix, part_b: &[usize]) -> f64 {
    let pt = partial_transpose(maj, rho, part_b);
    pt.singular_values().iter().sum::<f64>().ln()
}

/// Trace norm of a dense operator.
pub fn trace_norm(x: &CMatrix) -> f64 {
    x.singular_values().iter().sum()
}

/// Majorana unitary implementing σ → QσQᵀ for Q ∈ SO(2n), built from a
/// Givens factorization Q = G₁⋯G_m. A rotation by θ in the (k, l) plane
/// is implemented by cos(θ/2) - 2 sin(θ/2) c_k c_l.
pub fn majorana_unitary(maj: &DenseMajoranas, q: &DMatrix<f64>) -> Result<CMatrix> {
    let n = q.nrows();
    if n != 2 * maj.modes() || !q.is_square() {
        return Err(Error::Shape("rotation size does not match the mode count".into()));
    }
    let orth = (q * q.transpose() - DMatrix::identity(n, n)).amax();
    if orth > 1e-10 || q.determinant() < 0.0 {
        return Err(Error::Domain("rotation must be special orthogonal".into()));
    }
    let mut r = q.clone();
    let mut rotations = Vec::new();
    for j in 0..n {
        for i in (j + 1..n).rev() {
            let (a, b) = (i - 1, i);
            let theta = r[(b, j)].atan2(r[(a, j)]);
            if theta == 0.0 {
                continue;
            }
            let (s, cth) = theta.sin_cos();
            for col in 0..n {
                let ra = r[(a, col)];
                let rb = r[(b, col)];
                r[(a, col)] = cth * ra + s * rb;
                r[(b, col)] = -s * ra + cth * rb;
            }
            rotations.push((a, b, theta));
        }
    }
    let d = maj.dimension();
    let mut u = CMatrix::identity(d, d);
    for &(k, l, theta) in &rotations {
        let half = 0.5 * theta;
        let g = CMatrix::identity(d, d) * c(half.cos(), 0.0)
            - maj.op(k) * maj.op(l) * c(2.0 * half.sin(), 0.0);
        u = u * g;
    }
    Ok(u)
}

fn symmetric_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new((m + m.transpose()) * 0.5);
    let vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

/// Output covariance of a channel computed by dilation: the system is
/// coupled to an environment of equal size prepared with covariance
/// X⁻¹NX⁻ᵀ (X = √(1 - MMᵀ)), rotated by the orthogonal Halmos dilation of M,
/// evolved as a dense state, and the environment discarded.
pub fn dense_channel_output(
    channel: &GaussianChannel,
    sigma: &CovarianceMatrix,
) -> Result<CovarianceMatrix> {
    let n = sigma.matrix().nrows();
    if 2 * (n / 2) * 2 > 2 * MAX_MODES || channel.transfer.nrows() != n {
        return Err(Error::Unsupported(
            "dilation needs a system of at most two modes".into(),
        ));
    }
    let m = &channel.transfer;
    let id = DMatrix::<f64>::identity(n, n);
    let x_left = symmetric_sqrt(&(&id - m * m.transpose()));
    let x_right = symmetric_sqrt(&(&id - m.transpose() * m));
    let x_inv = x_left
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("transfer matrix is not a strict contraction".into()))?;
    let env_sigma = &x_inv * &channel.noise * x_inv.transpose();
    let env = CovarianceMatrix::new(env_sigma, ModeLayout::indexed(n / 2))?.antisymmetrized();
    if env.max_singular_value() > 1.0 + 1e-9 {
        return Err(Error::Unphysical(
            "channel noise does not come from a physical environment".into(),
        ));
    }
    let mut dilation = DMatrix::zeros(2 * n, 2 * n);
    dilation.view_mut((0, 0), (n, n)).copy_from(m);
    dilation.view_mut((0, n), (n, n)).copy_from(&x_left);
    dilation.view_mut((n, 0), (n, n)).copy_from(&x_right);
    dilation.view_mut((n, n), (n, n)).copy_from(&(-m.transpose()));
    if dilation.determinant() < 0.0 {
        for col in 0..2 * n {
            dilation[(2 * n - 1, col)] = -dilation[(2 * n - 1, col)];
        }
    }
    let mut joint = DMatrix::zeros(2 * n, 2 * n);
    joint.view_mut((0, 0), (n, n)).copy_from(sigma.matrix());
    joint.view_mut((n, n), (n, n)).copy_from(env.matrix());
    let maj = DenseMajoranas::new(n)?;
    let joint = CovarianceMatrix::new(joint, ModeLayout::indexed(n))?;
    let rho = dense_state(&maj, &joint)?;
    let u = majorana_unitary(&maj, &dilation)?;
    let out = &u * rho * u.adjoint();
    let (full, _) = covariance_from_density(&maj, &out)?;
    let modes: Vec<usize> = (0..n / 2).collect();
    let sys = full.submatrix(&modes)?;
    CovarianceMatrix::new(sys.into_matrix(), sigma.layout().clone())
}

/// Random special orthogonal matrix from the QR decomposition of a Gaussian
/// matrix.
pub fn random_rotation<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        // Box–Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Random physical covariance matrix on `modes` modes. With `pure` all
/// pair values are ±1; otherwise they are uniform in [-1, 1].
pub fn random_covariance<R: Rng>(modes: usize, pure: bool, rng: &mut R) -> CovarianceMatrix {
    let n = 2 * modes;
    let o = random_rotation(n, rng);
    let mut block = DMatrix::zeros(n, n);
    for k in 0..modes {
        let lambda = if pure {
            if rng.gen::<bool>() {
                1.0
            } else {
                -1.0
            }
        } else {
            rng.gen_range(-1.0..=1.0)
        };
        block[(2 * k, 2 * k + 1)] = lambda;
        block[(2 * k + 1, 2 * k)] = -lambda;
    }
    let m = &o * block * o.transpose();
    CovarianceMatrix::new(m, ModeLayout::indexed(modes))
        .expect("shape is consistent by construction")
        .antisymmetrized()
}

/// Creation operator f_j† = (c_{2j} + i c_{2j+1})/√2.
pub fn creation(maj: &DenseMajoranas, j: usize) -> CMatrix {
    (maj.op(2 * j) + maj.op(2 * j + 1) * c(0.0, 1.0)) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

/// Pure state Π (cos r + e^{iφ} sin r f_a† f_b†)|0⟩ for entries (a, b, r, φ)
/// on distinct modes, as a density matrix.
pub fn paired_state(maj: &DenseMajoranas, pairs: &[(usize, usize, f64, f64)]) -> Result<CMatrix> {
    let mut used = vec![false; maj.modes()];
    for &(a, b, _, _) in pairs {
        if a == b || a >= maj.modes() || b >= maj.modes() || used[a] || used[b] {
            return Err(Error::Shape("pairs must use distinct modes".into()));
        }
        used[a] = true;
        used[b] = true;
    }
    let d = maj.dimension();
    let mut psi = nalgebra::DVector::<Complex64>::zeros(d);
    psi[0] = c(1.0, 0.0);
    for &(a, b, r, phase) in pairs {
        let pair = creation(maj, a) * creation(maj, b);
        let op = CMatrix::identity(d, d) * c(r.cos(), 0.0)
            + pair * (Complex64::from_polar(1.0, phase) * r.sin());
        psi = op * psi;
    }
    Ok(&psi * psi.adjoint())
}

/// Random channel (M, N) with a strictly contracting M and noise
/// N = X σ_E Xᵀ, X = √(1 - MMᵀ), from a random environment state σ_E.
pub fn random_channel<R: Rng>(modes: usize, rng: &mut R) -> GaussianChannel {
    let n = 2 * modes;
    let left = random_rotation(n, rng);
    let right = random_rotation(n, rng);
    let scales = nalgebra::DVector::from_fn(n, |_, _| rng.gen_range(0.0..0.95));
    let m = &left * DMatrix::from_diagonal(&scales) * &right;
    let x = symmetric_sqrt(&(DMatrix::identity(n, n) - &m * m.transpose()));
    let env = random_covariance(modes, false, rng);
    let noise = &x * env.matrix() * x.transpose();
    GaussianChannel::new(m, (&noise - noise.transpose()) * 0.5).expect("square matrices of equal size")
}
