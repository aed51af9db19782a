//! Joint Gaussian second moments of Alice's classical modulation variables
//! and the six circuit output quadratures, plus conditional variances.
//!
//! Alice's variables (x_A, p_A) are adjoined as explicit Gaussian variables
//! of variance V_A/4, correlated with mode a only through the additive
//! decomposition x_a = x_A + vacuum. That reproduces every mixed moment of
//! the modulated-coherent-state ensemble without integrating over the
//! modulation distribution.

use nalgebra::{SMatrix, SVector};

use crate::circuit::{build_circuit, ChannelParams, CircuitParams};
use crate::error::{Error, Result};
use crate::quad::{min_eigenvalue, VACUUM_VARIANCE};

pub type Mat8 = SMatrix<f64, 8, 8>;
pub type Vec8 = SVector<f64, 8>;

/// Variance normalization. Internally everything is kept in quadrature units
/// (vacuum = 1/4); shot-noise units (vacuum = 1) are a ×4 rescaling applied
/// at reporting boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceConvention {
    QuadratureUnits,
    ShotNoiseUnits,
}

impl VarianceConvention {
    /// Multiplier taking a quadrature-unit variance into this convention.
    pub fn from_quadrature(self) -> f64 {
        match self {
            VarianceConvention::QuadratureUnits => 1.0,
            VarianceConvention::ShotNoiseUnits => 4.0,
        }
    }
}

/// One of the eight jointly Gaussian variables, ordered
/// (x_A, p_A, x_a″, p_a″, x_b″, p_b″, x_c″, p_c″).
///
/// `Clone*` and `Anticlone*` name Eve's b″ and c″ ports; they are the exact
/// clone-2 and anticlone modes at θ = 0 and mixtures of the two otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointVar {
    AliceX,
    AliceP,
    BobX,
    BobP,
    CloneX,
    CloneP,
    AnticloneX,
    AnticloneP,
}

impl JointVar {
    pub const ALL: [JointVar; 8] = [
        JointVar::AliceX,
        JointVar::AliceP,
        JointVar::BobX,
        JointVar::BobP,
        JointVar::CloneX,
        JointVar::CloneP,
        JointVar::AnticloneX,
        JointVar::AnticloneP,
    ];

    pub fn index(self) -> usize {
        match self {
            JointVar::AliceX => 0,
            JointVar::AliceP => 1,
            JointVar::BobX => 2,
            JointVar::BobP => 3,
            JointVar::CloneX => 4,
            JointVar::CloneP => 5,
            JointVar::AnticloneX => 6,
            JointVar::AnticloneP => 7,
        }
    }

    /// True for x_A, x_a″, x_b″, x_c″.
    pub fn is_position(self) -> bool {
        self.index() % 2 == 0
    }
}

/// 8×8 symmetric second-moment matrix over [`JointVar`] with zero mean.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMoments {
    cov: Mat8,
}

/// Result of conditioning one Gaussian variable on another. `degenerate` is
/// set when the conditioning variable has zero variance, in which case the
/// value falls back to the target's marginal variance (conditioning on a
/// constant conveys nothing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalVariance {
    pub value: f64,
    pub degenerate: bool,
}

impl JointMoments {
    /// Validating constructor: symmetric to 1e-14 and positive semidefinite.
    pub fn from_cov(cov: Mat8) -> Result<Self> {
        let asym = (cov - cov.transpose()).iter().fold(0.0_f64, |a, e| a.max(e.abs()));
        if asym > 1e-14 {
            return Err(Error::AsymmetricCovariance(asym));
        }
        let min_eig = min_eigenvalue(&cov);
        if min_eig < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        Ok(Self { cov })
    }

    pub fn cov(&self) -> &Mat8 {
        &self.cov
    }

    /// All eight means vanish for the centered modulation ensemble.
    pub fn mean(&self) -> Vec8 {
        Vec8::zeros()
    }

    pub fn variance(&self, v: JointVar) -> f64 {
        self.cov[(v.index(), v.index())]
    }

    pub fn covariance(&self, a: JointVar, b: JointVar) -> f64 {
        self.cov[(a.index(), b.index())]
    }

    /// V(target | given) = Var(target) − Cov(target, given)² / Var(given),
    /// the residual variance of the best linear estimator.
    pub fn conditional_variance(
        &self,
        target: JointVar,
        given: JointVar,
        convention: VarianceConvention,
    ) -> ConditionalVariance {
        let var_t = self.variance(target);
        let var_g = self.variance(given);
        let scale = convention.from_quadrature();
        if var_g <= 0.0 {
            return ConditionalVariance { value: var_t * scale, degenerate: true };
        }
        let cov = self.covariance(target, given);
        let value = (var_t - cov * cov / var_g).max(0.0);
        ConditionalVariance { value: value * scale, degenerate: false }
    }
}

/// Second moments of (x_A, p_A, outputs) for the circuit tuned to `channel`
/// with Eve's angle `theta`.
pub fn ensemble_moments(channel: &ChannelParams, theta: f64) -> Result<JointMoments> {
    let params = CircuitParams::from_channel(channel.eta(), channel.delta(), theta)?;
    let map = build_circuit(&params);

    // Input covariance over (x_A, p_A, x_a, p_a, x_b, p_b, x_c, p_c):
    // x_a = x_A + vacuum, modes b and c in vacuum.
    let va4 = channel.v_a() / 4.0;
    let mut cov_in = Mat8::zeros();
    cov_in[(0, 0)] = va4;
    cov_in[(1, 1)] = va4;
    cov_in[(2, 2)] = va4 + VACUUM_VARIANCE;
    cov_in[(3, 3)] = va4 + VACUUM_VARIANCE;
    cov_in[(0, 2)] = va4;
    cov_in[(2, 0)] = va4;
    cov_in[(1, 3)] = va4;
    cov_in[(3, 1)] = va4;
    for k in 4..8 {
        cov_in[(k, k)] = VACUUM_VARIANCE;
    }

    // Transform = identity on Alice's variables, circuit map on the modes.
    let mut t = Mat8::zeros();
    t[(0, 0)] = 1.0;
    t[(1, 1)] = 1.0;
    t.view_mut((2, 2), (6, 6)).copy_from(map.matrix());

    let raw = t * cov_in * t.transpose();
    let cov = (raw + raw.transpose()) * 0.5;
    Ok(JointMoments { cov })
}

/// Alice's conditional variances (V(x_B|x_A), V(p_B|p_A)) in quadrature
/// units. Both equal (1+δ)/4 independent of η, V_A and θ.
pub fn alice_conditional_variances(channel: &ChannelParams) -> (f64, f64) {
    ((1.0 + channel.delta()) / 4.0, (1.0 + channel.delta()) / 4.0)
}

/// The smallest conditional variance on Bob's quadrature achievable on
/// Alice's side, in quadrature units: (1 + δ − ηV_A/(1+V_A))/4.
///
/// Holding the classical modulation record gives Alice (1+δ)/4; holding a
/// purification of the source instead (an entangled two-mode squeezed pair
/// of the same thermal statistics) tightens it to this value. It is the
/// exact uncertainty partner of Eve's optimal attack: the product of the two
/// conditional variances is 1/16 (one shot-noise unit squared).
pub fn alice_min_conditional_variance(channel: &ChannelParams) -> f64 {
    let v_a = channel.v_a();
    (1.0 + channel.delta() - channel.eta() * v_a / (1.0 + v_a)) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ch(eta: f64, delta: f64, v_a: f64) -> ChannelParams {
        ChannelParams::new(eta, delta, v_a).unwrap()
    }

    #[test]
    fn identity_channel_moments() {
        let m = ensemble_moments(&ch(1.0, 0.0, 7.0), 0.4).unwrap();
        assert_relative_eq!(m.covariance(JointVar::AliceX, JointVar::BobX), 7.0 / 4.0, epsilon = 1e-14);
        assert_relative_eq!(m.variance(JointVar::BobX), 8.0 / 4.0, epsilon = 1e-14);
        assert_relative_eq!(m.variance(JointVar::AliceX), 7.0 / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn generic_channel_moments() {
        let m = ensemble_moments(&ch(0.5, 0.1, 10.0), 0.23).unwrap();
        assert_relative_eq!(m.variance(JointVar::BobX), 1.525, epsilon = 1e-12);
        assert_relative_eq!(
            m.covariance(JointVar::AliceX, JointVar::BobX),
            10.0 / (4.0 * 2.0_f64.sqrt()),
            epsilon = 1e-12
        );
        // p analogues
        assert_relative_eq!(m.variance(JointVar::BobP), 1.525, epsilon = 1e-12);
        assert_relative_eq!(
            m.covariance(JointVar::AliceP, JointVar::BobP),
            1.767_766_952_966_368_9,
            epsilon = 1e-12
        );
    }

    #[test]
    fn no_x_p_coupling() {
        let m = ensemble_moments(&ch(0.62, 0.37, 4.2), -0.9).unwrap();
        for a in JointVar::ALL {
            for b in JointVar::ALL {
                if a.is_position() != b.is_position() {
                    assert!(
                        m.covariance(a, b).abs() < 1e-14,
                        "{a:?}/{b:?} coupled: {}",
                        m.covariance(a, b)
                    );
                }
            }
        }
    }

    #[test]
    fn conditioning_on_self_gives_zero() {
        let m = ensemble_moments(&ch(0.5, 0.1, 10.0), 0.0).unwrap();
        let cv = m.conditional_variance(JointVar::BobX, JointVar::BobX, VarianceConvention::QuadratureUnits);
        assert_eq!(cv.value, 0.0);
        assert!(!cv.degenerate);
    }

    #[test]
    fn conditioning_on_independent_variable_changes_nothing() {
        let m = ensemble_moments(&ch(0.5, 0.1, 10.0), 0.0).unwrap();
        // AliceP is uncorrelated with BobX (no x–p coupling).
        let cv = m.conditional_variance(JointVar::BobX, JointVar::AliceP, VarianceConvention::QuadratureUnits);
        assert_relative_eq!(cv.value, m.variance(JointVar::BobX), epsilon = 1e-15);
    }

    #[test]
    fn degenerate_conditioner_is_flagged() {
        // A constant (zero-variance) conditioning variable conveys nothing.
        let mut cov = Mat8::identity();
        cov[(1, 1)] = 0.0;
        let m = JointMoments::from_cov(cov).unwrap();
        let cv = m.conditional_variance(JointVar::BobX, JointVar::AliceP, VarianceConvention::QuadratureUnits);
        assert!(cv.degenerate);
        assert_eq!(cv.value, 1.0);
    }

    #[test]
    fn alice_conditional_variance_is_vacuum_plus_excess() {
        // (1+δ)/4 independent of η, V_A, θ — also checked through the moments.
        for (eta, delta, va, theta) in [
            (0.5, 0.0, 3.0, 0.0),
            (0.5, 0.1, 10.0, 0.9),
            (0.9, 1.0, 2.5, -1.2),
            (0.8, 0.1, 200.0, 0.5),
        ] {
            let channel = ch(eta, delta, va);
            let (vx, vp) = alice_conditional_variances(&channel);
            assert_eq!(vx, vp);
            assert_relative_eq!(vx, (1.0 + delta) / 4.0, epsilon = 1e-15);
            let m = ensemble_moments(&channel, theta).unwrap();
            let got = m.conditional_variance(JointVar::BobX, JointVar::AliceX, VarianceConvention::QuadratureUnits);
            assert_relative_eq!(got.value, vx, epsilon = 1e-12);
            let got_p = m.conditional_variance(JointVar::BobP, JointVar::AliceP, VarianceConvention::QuadratureUnits);
            assert_relative_eq!(got_p.value, vp, epsilon = 1e-12);
        }
        assert_eq!(alice_conditional_variances(&ch(0.5, 0.0, 1.0)).0, 0.25);
        assert_relative_eq!(alice_conditional_variances(&ch(0.5, 0.1, 1.0)).0, 0.275);
        assert_relative_eq!(alice_conditional_variances(&ch(0.9, 1.0, 1.0)).0, 0.5);
    }

    #[test]
    fn shot_noise_units_are_four_times_quadrature() {
        let m = ensemble_moments(&ch(0.5, 0.1, 10.0), 0.4).unwrap();
        let q = m.conditional_variance(JointVar::BobX, JointVar::CloneX, VarianceConvention::QuadratureUnits);
        let s = m.conditional_variance(JointVar::BobX, JointVar::CloneX, VarianceConvention::ShotNoiseUnits);
        assert_relative_eq!(s.value, 4.0 * q.value, epsilon = 1e-15);
    }

    #[test]
    fn p_block_mirrors_x_block_under_theta_reflection() {
        // V(p_B | p_b″(θ)) equals V(x_B | x_b″(−θ)).
        let channel = ch(0.44, 0.31, 6.0);
        for theta in [-1.1, -0.2, 0.35, 1.4] {
            let at = ensemble_moments(&channel, theta).unwrap();
            let reflected = ensemble_moments(&channel, -theta).unwrap();
            let p_side = at.conditional_variance(JointVar::BobP, JointVar::CloneP, VarianceConvention::QuadratureUnits);
            let x_side = reflected.conditional_variance(JointVar::BobX, JointVar::CloneX, VarianceConvention::QuadratureUnits);
            assert_relative_eq!(p_side.value, x_side.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn moments_propagate_domain_errors() {
        let channel = ChannelParams::new(0.5, 0.1, 10.0).unwrap();
        assert!(ensemble_moments(&channel, 0.0).is_ok());
        assert!(ensemble_moments(&ch(0.5, 0.9, 1.0), f64::NAN).is_err());
    }
}
