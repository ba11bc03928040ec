//! Fermionic Gaussian states in the Majorana covariance representation.
//!
//! Each fermionic mode f contributes two Majorana operators
//! c₁ = (f† + f)/√2 and c₂ = (f† - f)/(i√2), so {c_k, c_l} = δ_kl. The real
//! antisymmetric covariance matrix is σ_kl = i⟨[c_k, c_l]⟩; the vacuum is a
//! direct sum of [[0, 1], [-1, 0]] blocks and σ₁₂ = ⟨1 - 2f†f⟩ for a single
//! mode. A state is physical iff σ is antisymmetric with all singular values
//! at most one, and pure iff σσᵀ = 1.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::{Species, Wedge};

/// Label of one fermionic mode in a covariance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    Slot(Wedge, Species),
    Index(usize),
}

impl ModeLabel {
    fn token(&self) -> String {
        match self {
            ModeLabel::Slot(w, s) => {
                let w = match w {
                    Wedge::I => "I",
                    Wedge::II => "II",
                };
                let s = match s {
                    Species::Particle => "+",
                    Species::Antiparticle => "-",
                };
                format!("{w}{s}")
            }
            ModeLabel::Index(i) => format!("m{i}"),
        }
    }

    fn parse(token: &str) -> Option<Self> {
        let slot = |w, s| Some(ModeLabel::Slot(w, s));
        match token {
            "I+" => slot(Wedge::I, Species::Particle),
            "II+" => slot(Wedge::II, Species::Particle),
            "I-" => slot(Wedge::I, Species::Antiparticle),
            "II-" => slot(Wedge::II, Species::Antiparticle),
            _ => token.strip_prefix('m')?.parse().ok().map(ModeLabel::Index),
        }
    }
}

impl std::fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.token())
    }
}

impl std::str::FromStr for ModeLabel {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        Self::parse(token).ok_or_else(|| Error::Config(format!("unknown mode label '{token}'")))
    }
}

/// Ordered list of modes; mode j owns Majorana rows 2j and 2j + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeLayout {
    labels: Vec<ModeLabel>,
}

impl ModeLayout {
    /// The four-mode layout (I,+), (II,+), (I,-), (II,-).
    pub fn canonical() -> Self {
        Self {
            labels: vec![
                ModeLabel::Slot(Wedge::I, Species::Particle),
                ModeLabel::Slot(Wedge::II, Species::Particle),
                ModeLabel::Slot(Wedge::I, Species::Antiparticle),
                ModeLabel::Slot(Wedge::II, Species::Antiparticle),
            ],
        }
    }

    /// Anonymous modes 0..n.
    pub fn indexed(n: usize) -> Self {
        Self {
            labels: (0..n).map(ModeLabel::Index).collect(),
        }
    }

    pub fn from_labels(labels: Vec<ModeLabel>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Shape(format!("duplicate mode label {}", l.token())));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    /// Mode index of a labelled slot.
    pub fn position(&self, label: ModeLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Mode index of a (wedge, species) slot.
    pub fn slot(&self, wedge: Wedge, species: Species) -> Option<usize> {
        self.position(ModeLabel::Slot(wedge, species))
    }

    /// Zero-based Majorana indices of mode `j`.
    pub fn majorana_pair(j: usize) -> (usize, usize) {
        (2 * j, 2 * j + 1)
    }
}

/// Majorana covariance matrix together with its mode layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
    layout: ModeLayout,
}

/// First moments ⟨c_k⟩. Nonzero only for states with odd parity components.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstMoments(pub DVector<f64>);

impl CovarianceMatrix {
    pub fn new(matrix: DMatrix<f64>, layout: ModeLayout) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Shape(format!(
                "covariance matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() != 2 * layout.len() {
            return Err(Error::Shape(format!(
                "covariance matrix of size {} does not match {} modes",
                matrix.nrows(),
                layout.len()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("covariance matrix has non-finite entries".into()));
        }
        Ok(Self { matrix, layout })
    }

    /// Vacuum covariance for the given layout.
    pub fn vacuum(layout: ModeLayout) -> Self {
        let n = layout.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            m[(2 * j, 2 * j + 1)] = 1.0;
            m[(2 * j + 1, 2 * j)] = -1.0;
        }
        Self { matrix: m, layout }
    }

    /// Maximally entangled state (|00⟩ + |11⟩)/√2 of the (I,+) and (II,+)
    /// modes with the antiparticle modes in vacuum, canonical layout.
    /// Here |11⟩ = f₁†f₂†|00⟩.
    pub fn bell_canonical() -> Self {
        let mut s = Self::vacuum(ModeLayout::canonical());
        let m = &mut s.matrix;
        m[(0, 1)] = 0.0;
        m[(1, 0)] = 0.0;
        m[(2, 3)] = 0.0;
        m[(3, 2)] = 0.0;
        m[(0, 3)] = 1.0;
        m[(3, 0)] = -1.0;
        m[(1, 2)] = 1.0;
        m[(2, 1)] = -1.0;
        s
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn modes(&self) -> usize {
        self.layout.len()
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Restriction to the listed modes, in the order given.
    pub fn submatrix(&self, modes: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(2 * modes.len());
        let mut labels = Vec::with_capacity(modes.len());
        for &j in modes {
            if j >= self.modes() {
                return Err(Error::Shape(format!("mode {j} out of range")));
            }
            rows.push(2 * j);
            rows.push(2 * j + 1);
            labels.push(self.layout.labels[j]);
        }
        let k = rows.len();
        let m = DMatrix::from_fn(k, k, |a, b| self.matrix[(rows[a], rows[b])]);
        Self::new(m, ModeLayout::from_labels(labels)?)
    }

    /// (σ - σᵀ)/2, removing rounding asymmetry.
    pub fn antisymmetrized(&self) -> Self {
        let m = (&self.matrix - self.matrix.transpose()) * 0.5;
        Self {
            matrix: m,
            layout: self.layout.clone(),
        }
    }

    /// max |σ + σᵀ|
    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.matrix + self.matrix.transpose()).amax()
    }

    /// Largest singular value of σ.
    pub fn max_singular_value(&self) -> f64 {
        self.matrix
            .clone()
            .singular_values()
            .iter()
            .fold(0.0, |a: f64, &b| a.max(b))
    }

    /// max |σσᵀ - 1|, zero for pure states.
    pub fn purity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        (&self.matrix * self.matrix.transpose() - DMatrix::identity(n, n)).amax()
    }

    /// Largest entrywise difference to another covariance matrix.
    pub fn max_difference(&self, other: &Self) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).amax()
    }

    /// Writes the matrix row-major with 17 significant digits. The first
    /// line records the mode layout.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let labels: Vec<String> = self.layout.labels.iter().map(ModeLabel::token).collect();
        writeln!(out, "# modes: {}", labels.join(" "))?;
        for row in self.matrix.row_iter() {
            let mut line = String::new();
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                write!(line, "{v:.16e}").expect("writing to a String cannot fail");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads the format produced by [`CovarianceMatrix::write_text`].
    /// Without a `# modes:` line the modes are indexed.
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut labels: Option<Vec<ModeLabel>> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(list) = comment.trim().strip_prefix("modes:") {
                    let parsed: Option<Vec<ModeLabel>> =
                        list.split_whitespace().map(ModeLabel::parse).collect();
                    labels = Some(parsed.ok_or_else(|| Error::Parse {
                        line: i + 1,
                        message: format!("unknown mode label in '{list}'"),
                    })?);
                }
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                trimmed.split_whitespace().map(str::parse).collect();
            rows.push(row.map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("row has {} entries, expected {n}", r.len()),
            });
        }
        if n % 2 != 0 {
            return Err(Error::Shape(format!("odd matrix dimension {n}")));
        }
        let layout = match labels {
            Some(l) => ModeLayout::from_labels(l)?,
            None => ModeLayout::indexed(n / 2),
        };
        Self::new(DMatrix::from_fn(n, n, |a, b| rows[a][b]), layout)
    }
}

/// Outcome of a physicality check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalityReport {
    pub antisymmetry_defect: f64,
    pub max_singular_value: f64,
    pub purity_defect: f64,
    pub physical: bool,
}

/// Checks antisymmetry and the singular-value bound within `tol`.
pub fn physicality_check(sigma: &CovarianceMatrix, tol: f64) -> PhysicalityReport {
    let antisymmetry_defect = sigma.antisymmetry_defect();
    let max_singular_value = sigma.max_singular_value();
    PhysicalityReport {
        antisymmetry_defect,
        max_singular_value,
        purity_defect: sigma.purity_defect(),
        physical: antisymmetry_defect <= tol && max_singular_value <= 1.0 + tol,
    }
}

/// 2×2 block representing multiplication by α on a mode's Majorana pair.
pub fn rotation_block(alpha: Complex64) -> [[f64; 2]; 2] {
    [[alpha.re, alpha.im], [-alpha.im, alpha.re]]
}

/// Linear map σ → MσMᵀ + N on covariance matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianChannel {
    pub transfer: DMatrix<f64>,
    pub noise: DMatrix<f64>,
}

impl GaussianChannel {
    pub fn new(transfer: DMatrix<f64>, noise: DMatrix<f64>) -> Result<Self> {
        if !transfer.is_square() || transfer.shape() != noise.shape() || transfer.nrows() % 2 != 0 {
            return Err(Error::Shape(format!(
                "channel matrices {:?} and {:?}",
                transfer.shape(),
                noise.shape()
            )));
        }
        Ok(Self { transfer, noise })
    }

    /// Identity channel on `n` modes.
    pub fn identity(n: usize) -> Self {
        Self {
            transfer: DMatrix::identity(2 * n, 2 * n),
            noise: DMatrix::zeros(2 * n, 2 * n),
        }
    }

    /// Applies the channel and antisymmetrizes the result.
    pub fn apply(&self, sigma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        if sigma.matrix.shape() != self.transfer.shape() {
            return Err(Error::Shape(format!(
                "channel acts on {} Majoranas, state has {}",
                self.transfer.nrows(),
                sigma.matrix.nrows()
            )));
        }
        let out = &self.transfer * &sigma.matrix * self.transfer.transpose() + &self.noise;
        Ok(CovarianceMatrix {
            matrix: out,
            layout: sigma.layout.clone(),
        }
        .antisymmetrized())
    }

    /// μ → Mμ
    pub fn apply_moments(&self, moments: &FirstMoments) -> Result<FirstMoments> {
        if moments.0.len() != self.transfer.ncols() {
            return Err(Error::Shape("first-moment vector has the wrong length".into()));
        }
        Ok(FirstMoments(&self.transfer * &moments.0))
    }

    /// The channel applying `self` first, then `next`.
    pub fn then(&self, next: &GaussianChannel) -> Result<GaussianChannel> {
        if self.transfer.shape() != next.transfer.shape() {
            return Err(Error::Shape("channels act on different mode counts".into()));
        }
        let transfer = &next.transfer * &self.transfer;
        let noise = &next.transfer * &self.noise * next.transfer.transpose() + &next.noise;
        Ok(GaussianChannel { transfer, noise })
    }
}

/// Pfaffian of a complex antisymmetric matrix by Gaussian elimination with
/// pivoting (Parlett–Reid). Odd dimensions give zero.
pub fn pfaffian(matrix: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = matrix.nrows();
    if !matrix.is_square() {
        return Err(Error::Shape("pfaffian of a non-square matrix".into()));
    }
    if n % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut a = matrix.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let (pivot, _) = (k + 1..n)
            .map(|j| (j, a[(k, j)].norm()))
            .fold((k + 1, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pivot != k + 1 {
            a.swap_rows(k + 1, pivot);
            a.swap_columns(k + 1, pivot);
            pf = -pf;
        }
        let p = a[(k, k + 1)];
        if p.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        pf *= p;
        if k + 2 < n {
            // Eliminate row/column k + 1 couplings using the (k, k+1) pivot.
            let col_k: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)]).collect();
            let col_k1: Vec<Complex64> = (k + 2..n).map(|j| a[(k + 1, j)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += (col_k1[ii] * col_k[jj] - col_k[ii] * col_k1[jj]) / p;
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}

/// Pfaffian of a real antisymmetric matrix.
pub fn pfaffian_real(matrix: &DMatrix<f64>) -> Result<f64> {
    Ok(pfaffian(&matrix.map(|v| Complex64::new(v, 0.0)))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_pure_and_physical() {
        let v = CovarianceMatrix::vacuum(ModeLayout::canonical());
        let r = physicality_check(&v, 1e-12);
        assert!(r.physical);
        assert_eq!(r.purity_defect, 0.0);
        assert!((r.max_singular_value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_state_is_pure() {
        let b = CovarianceMatrix::bell_canonical();
        assert_eq!(b.antisymmetry_defect(), 0.0);
        assert!(b.purity_defect() < 1e-15);
        let reduced = b.submatrix(&[0]).unwrap();
        assert!(reduced.matrix().amax() < 1e-15, "single mode of a Bell pair is maximally mixed");
    }

    #[test]
    fn text_round_trip_is_exact() {
        let mut m = CovarianceMatrix::bell_canonical().into_matrix();
        m[(0, 5)] = 0.123_456_789_012_345_67;
        m[(5, 0)] = -0.123_456_789_012_345_67;
        m[(2, 7)] = 1e-300;
        let s = CovarianceMatrix::new(m, ModeLayout::canonical()).unwrap();
        let mut buf = Vec::new();
        s.write_text(&mut buf).unwrap();
        let back = CovarianceMatrix::read_text(buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn malformed_text_rejected() {
        let err = CovarianceMatrix::read_text("0 1\n-1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = CovarianceMatrix::read_text("0 x\n-1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = CovarianceMatrix::read_text("# modes: I+ Q\n0 1\n-1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn shape_errors() {
        assert!(CovarianceMatrix::new(DMatrix::zeros(3, 3), ModeLayout::indexed(1)).is_err());
        assert!(CovarianceMatrix::new(DMatrix::zeros(4, 4), ModeLayout::canonical()).is_err());
        let ch = GaussianChannel::identity(2);
        assert!(ch.apply(&CovarianceMatrix::vacuum(ModeLayout::canonical())).is_err());
    }

    #[test]
    fn channel_composition_matches_sequential_application() {
        let mut m = DMatrix::identity(4, 4) * 0.8;
        m[(0, 1)] = 0.3;
        m[(1, 0)] = -0.3;
        let n = DMatrix::from_fn(4, 4, |i, j| 0.1 * (i as f64 - j as f64));
        let a = GaussianChannel::new(m.clone(), n.clone()).unwrap();
        let b = GaussianChannel::new(m.transpose(), n * 0.5).unwrap();
        let s = CovarianceMatrix::vacuum(ModeLayout::indexed(2));
        let seq = b.apply(&a.apply(&s).unwrap()).unwrap();
        let composed = a.then(&b).unwrap().apply(&s).unwrap();
        assert!(seq.max_difference(&composed) < 1e-15);
    }

    #[test]
    fn pfaffian_small_cases() {
        let s = CovarianceMatrix::vacuum(ModeLayout::indexed(3));
        assert!((pfaffian_real(s.matrix()).unwrap() - 1.0).abs() < 1e-15);
        // Pf of the 4×4 antisymmetric matrix = a12 a34 - a13 a24 + a14 a23
        let v = [0.3, -1.2, 0.7, 2.0, 0.4, -0.9];
        let mut m = DMatrix::zeros(4, 4);
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (&(i, j), &x) in pairs.iter().zip(v.iter()) {
            m[(i, j)] = x;
            m[(j, i)] = -x;
        }
        let want = v[0] * v[5] - v[1] * v[4] + v[2] * v[3];
        assert!((pfaffian_real(&m).unwrap() - want).abs() < 1e-14);
        let b = CovarianceMatrix::bell_canonical();
        let pf = pfaffian_real(b.matrix()).unwrap();
        assert!((pf * pf - b.matrix().determinant()).abs() < 1e-13);
    }
}
