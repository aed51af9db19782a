//! Phase-space algebra for the three-mode system: quadrature indexing,
//! elementary symplectic maps (beam splitter, two-mode squeezer) and
//! Gaussian second-moment propagation.
//!
//! Conventions, fixed for the whole crate:
//!
//! * quadratures are x = (a + a†)/2 and p = (a − a†)/2i, so the vacuum
//!   variance is 1/4;
//! * the basis is ordered (x_a, p_a, x_b, p_b, x_c, p_c);
//! * a beam splitter of angle θ maps the first mode to
//!   cos θ · in_i − sin θ · in_j, identically on x and p;
//! * a two-mode squeezer of parameter λ maps x_i → cosh λ · x_i − sinh λ · x_j
//!   and p_i → cosh λ · p_i + sinh λ · p_j, symmetrically in i and j.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};

/// Quadrature variance of the vacuum state in this crate's convention.
pub const VACUUM_VARIANCE: f64 = 0.25;

pub type Mat6 = SMatrix<f64, 6, 6>;
pub type Vec6 = SVector<f64, 6>;

/// One of the three bosonic modes: `A` carries the signal, `B` and `C` are
/// Eve's ancillas (second clone and amplifier idler, respectively).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B, Mode::C];

    fn offset(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 1,
            Mode::C => 2,
        }
    }
}

/// Position (`X`) or momentum (`P`) quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

/// Index of a single quadrature in the fixed (x_a, p_a, …, p_c) ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadIndex {
    pub mode: Mode,
    pub quadrature: Quadrature,
}

impl QuadIndex {
    pub const fn new(mode: Mode, quadrature: Quadrature) -> Self {
        Self { mode, quadrature }
    }

    /// Basis position 2·mode + quadrature.
    pub fn index(self) -> usize {
        2 * self.mode.offset()
            + match self.quadrature {
                Quadrature::X => 0,
                Quadrature::P => 1,
            }
    }

    /// Inverse of [`QuadIndex::index`].
    pub fn from_index(i: usize) -> Self {
        assert!(i < 6, "quadrature index out of range: {i}");
        let mode = Mode::ALL[i / 2];
        let quadrature = if i % 2 == 0 { Quadrature::X } else { Quadrature::P };
        Self { mode, quadrature }
    }
}

/// A 6×6 real linear map on the quadrature vector that preserves the
/// symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    matrix: Mat6,
}

impl SymplecticMap {
    pub fn identity() -> Self {
        Self { matrix: Mat6::identity() }
    }

    /// Beam splitter of transmission cos²θ acting on modes `i` and `j`:
    /// out_i = cos θ · in_i − sin θ · in_j, out_j = sin θ · in_i + cos θ · in_j,
    /// identically on x and p. Acts as the identity on the third mode.
    pub fn beam_splitter(mode_i: Mode, mode_j: Mode, angle: f64) -> Result<Self> {
        if mode_i == mode_j {
            return Err(Error::EqualModes(mode_i));
        }
        if !angle.is_finite() {
            return Err(Error::NonFinite { name: "beam splitter angle", value: angle });
        }
        let (c, s) = (angle.cos(), angle.sin());
        let mut m = Mat6::identity();
        for q in [Quadrature::X, Quadrature::P] {
            let i = QuadIndex::new(mode_i, q).index();
            let j = QuadIndex::new(mode_j, q).index();
            m[(i, i)] = c;
            m[(i, j)] = -s;
            m[(j, i)] = s;
            m[(j, j)] = c;
        }
        Ok(Self { matrix: m })
    }

    /// Two-mode squeezer (phase-insensitive amplifier of gain cosh²λ) acting
    /// on modes `i` and `j`. The x block carries −sinh λ on the cross terms,
    /// the p block +sinh λ; that sign split is what distinguishes it from a
    /// rotation.
    pub fn two_mode_squeezer(mode_i: Mode, mode_j: Mode, lambda: f64) -> Result<Self> {
        if mode_i == mode_j {
            return Err(Error::EqualModes(mode_i));
        }
        if !lambda.is_finite() {
            return Err(Error::NonFinite { name: "squeezing parameter", value: lambda });
        }
        if lambda < 0.0 {
            return Err(Error::NegativeSqueezing(lambda));
        }
        let (ch, sh) = (lambda.cosh(), lambda.sinh());
        let mut m = Mat6::identity();
        for (mode_a, mode_b) in [(mode_i, mode_j), (mode_j, mode_i)] {
            let x = QuadIndex::new(mode_a, Quadrature::X).index();
            let p = QuadIndex::new(mode_a, Quadrature::P).index();
            let xo = QuadIndex::new(mode_b, Quadrature::X).index();
            let po = QuadIndex::new(mode_b, Quadrature::P).index();
            m[(x, x)] = ch;
            m[(x, xo)] = -sh;
            m[(p, p)] = ch;
            m[(p, po)] = sh;
        }
        Ok(Self { matrix: m })
    }

    /// `outer ∘ inner`: the map applying `inner` first, then `self`.
    pub fn compose(&self, inner: &SymplecticMap) -> SymplecticMap {
        SymplecticMap { matrix: self.matrix * inner.matrix }
    }

    pub fn matrix(&self) -> &Mat6 {
        &self.matrix
    }

    /// Row of the map feeding a given output quadrature.
    pub fn row(&self, out: QuadIndex) -> [f64; 6] {
        let r = self.matrix.row(out.index());
        [r[0], r[1], r[2], r[3], r[4], r[5]]
    }

    pub fn apply(&self, v: &Vec6) -> Vec6 {
        self.matrix * v
    }

    /// Largest entrywise deviation of M J Mᵀ from J, where J is the
    /// block-diagonal symplectic form with per-mode blocks [[0, 1], [−1, 0]].
    pub fn symplectic_defect(&self) -> f64 {
        let j = symplectic_form();
        let residual = self.matrix * j * self.matrix.transpose() - j;
        residual.iter().fold(0.0_f64, |acc, e| acc.max(e.abs()))
    }
}

/// The symplectic form J in the fixed basis ordering.
pub fn symplectic_form() -> Mat6 {
    let mut j = Mat6::zeros();
    for mode in Mode::ALL {
        let x = QuadIndex::new(mode, Quadrature::X).index();
        let p = QuadIndex::new(mode, Quadrature::P).index();
        j[(x, p)] = 1.0;
        j[(p, x)] = -1.0;
    }
    j
}

/// Gaussian state of the three modes, stored as mean vector and symmetric
/// covariance matrix. The vacuum has zero mean and covariance I/4.
///
/// Vacuum quadratures are modelled as independent zero-mean Gaussians of
/// variance 1/4; all maps here are linear and only symmetrized second
/// moments are ever queried, so this loses nothing for Gaussian states.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    mean: Vec6,
    cov: Mat6,
}

impl MomentState {
    pub const SYMMETRY_TOL: f64 = 1e-14;

    /// Three-mode vacuum: zero mean, covariance I/4.
    pub fn vacuum() -> Self {
        Self { mean: Vec6::zeros(), cov: Mat6::identity() * VACUUM_VARIANCE }
    }

    /// Validating constructor: `cov` must be symmetric to 1e-14 and positive
    /// semidefinite.
    pub fn new(mean: Vec6, cov: Mat6) -> Result<Self> {
        let asym = (cov - cov.transpose()).iter().fold(0.0_f64, |a, e| a.max(e.abs()));
        if asym > Self::SYMMETRY_TOL {
            return Err(Error::AsymmetricCovariance(asym));
        }
        let min_eig = min_eigenvalue(&cov);
        if min_eig < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        Ok(Self { mean, cov })
    }

    /// Heisenberg-picture second-moment propagation:
    /// mean′ = M·mean, cov′ = M·cov·Mᵀ (re-symmetrized against rounding).
    pub fn propagate(&self, map: &SymplecticMap) -> MomentState {
        let mean = map.matrix * self.mean;
        let raw = map.matrix * self.cov * map.matrix.transpose();
        let cov = (raw + raw.transpose()) * 0.5;
        MomentState { mean, cov }
    }

    pub fn mean(&self) -> &Vec6 {
        &self.mean
    }

    pub fn cov(&self) -> &Mat6 {
        &self.cov
    }

    pub fn variance(&self, q: QuadIndex) -> f64 {
        self.cov[(q.index(), q.index())]
    }

    pub fn covariance(&self, a: QuadIndex, b: QuadIndex) -> f64 {
        self.cov[(a.index(), b.index())]
    }
}

pub(crate) fn min_eigenvalue<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    nalgebra::DMatrix::from_iterator(N, N, sym.iter().cloned())
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
