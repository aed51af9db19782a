//! Closed-form security analysis of the four eavesdropping strategies:
//! Eve's conditional variance V_B|E(θ), the per-attack values and security
//! thresholds, the optimal splitter angle, and asymptotic limits.
//!
//! All closed forms here are cross-checked against the covariance-propagation
//! route of [`crate::ensemble`] by the test suite; the printed shot-noise
//! expressions are exactly 4× the quadrature-unit conditional variances.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::circuit::{validate_channel, ChannelParams};
use crate::ensemble::VarianceConvention;
use crate::error::{Error, Result};
use crate::optimize::{golden_section_min, periodic_min};

/// Expansion coefficients of Eve's measured quadrature in terms of the input
/// modes: x_b″(θ) = X·x_a + Y·x_b + Z·x_c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyzCoefficients {
    pub x_coef: f64,
    pub y_coef: f64,
    pub z_coef: f64,
}

/// Coefficients of x_b″(θ) for the circuit tuned to (η, δ).
pub fn xyz(theta: f64, eta: f64, delta: f64) -> Result<XyzCoefficients> {
    validate_channel(eta, delta)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite { name: "splitter angle theta", value: theta });
    }
    let root = (eta - delta / 2.0).sqrt();
    let s_phi = (1.0 - eta + delta / 2.0).sqrt();
    let s_lam = (delta / 2.0).sqrt();
    let (sin_th, cos_th) = theta.sin_cos();
    Ok(XyzCoefficients {
        x_coef: (eta.sqrt() * s_phi * cos_th + s_lam * sin_th) / root,
        y_coef: (eta - delta / 2.0) * cos_th / root,
        z_coef: -(eta.sqrt() * sin_th + s_lam * s_phi * cos_th) / root,
    })
}

/// Eve's conditional variance V(x_B | x_b″(θ)) for the circuit tuned to
/// (η, δ) under modulation variance `v_a`.
pub fn v_be(
    theta: f64,
    eta: f64,
    delta: f64,
    v_a: f64,
    convention: VarianceConvention,
) -> Result<f64> {
    if !v_a.is_finite() || v_a <= 0.0 {
        return Err(Error::NonPositiveModulation(v_a));
    }
    let c = xyz(theta, eta, delta)?;
    let (x, y, z) = (c.x_coef, c.y_coef, c.z_coef);
    let omega =
        x - y * ((1.0 - eta + delta / 2.0) / eta).sqrt() - z * (delta / (2.0 * eta)).sqrt();
    let sum_sq = x * x + y * y + z * z;
    let quadrature = 0.25
        * (1.0
            + delta
            + eta * (v_a * (sum_sq - 2.0 * x * omega) - omega * omega)
                / ((v_a + 1.0) * x * x + y * y + z * z));
    Ok(quadrature * convention.from_quadrature())
}

/// The four conditional variances Eve can reach at a fixed angle θ,
/// expressed through V_B|E: swapping her two output ports shifts θ by −π/2,
/// and switching to the momentum quadrature reflects θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryVariances {
    /// V(x_B | x_b″(θ)) = V_B|E(θ)
    pub x_given_clone: f64,
    /// V(x_B | x_c″(θ)) = V_B|E(θ − π/2)
    pub x_given_anticlone: f64,
    /// V(p_B | p_b″(θ)) = V_B|E(−θ)
    pub p_given_clone: f64,
    /// V(p_B | p_c″(θ)) = V_B|E(π/2 − θ)
    pub p_given_anticlone: f64,
}

pub fn v_be_symmetries(
    theta: f64,
    eta: f64,
    delta: f64,
    v_a: f64,
    convention: VarianceConvention,
) -> Result<SymmetryVariances> {
    Ok(SymmetryVariances {
        x_given_clone: v_be(theta, eta, delta, v_a, convention)?,
        x_given_anticlone: v_be(theta - FRAC_PI_2, eta, delta, v_a, convention)?,
        p_given_clone: v_be(-theta, eta, delta, v_a, convention)?,
        p_given_anticlone: v_be(FRAC_PI_2 - theta, eta, delta, v_a, convention)?,
    })
}

/// Eve's strategy: which port(s) she measures and how she sets θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    /// θ = 0; Eve keeps only the second clone (port b′).
    Cloning,
    /// θ = π/2; Eve keeps only the anticlone (port c′).
    Anticloning,
    /// θ = π/4; Eve measures x of b″ and p of c″ immediately, no quantum
    /// memory or delayed measurement choice needed.
    BellMeasurement,
    /// θ = ±θ_opt chosen after the basis announcement to minimize her
    /// conditional variance.
    OptimalGaussian,
}

impl AttackKind {
    pub const ALL: [AttackKind; 4] = [
        AttackKind::Cloning,
        AttackKind::Anticloning,
        AttackKind::BellMeasurement,
        AttackKind::OptimalGaussian,
    ];

    /// The splitter angle the attack uses for Bob's x basis.
    pub fn theta(self, channel: &ChannelParams) -> Result<f64> {
        Ok(match self {
            AttackKind::Cloning => 0.0,
            AttackKind::Anticloning => FRAC_PI_2,
            AttackKind::BellMeasurement => FRAC_PI_4,
            AttackKind::OptimalGaussian => {
                theta_opt(channel.eta(), channel.delta(), channel.v_a())?
            }
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            AttackKind::Cloning => "cloning",
            AttackKind::Anticloning => "anticloning",
            AttackKind::BellMeasurement => "Bell measurement",
            AttackKind::OptimalGaussian => "optimal Gaussian",
        }
    }
}

impl std::fmt::Display for AttackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Security evaluation of one attack against one channel.
///
/// `secure` holds exactly when v_ba ≤ min(v_be_x, v_be_p): Alice's
/// uncertainty about Bob must not exceed Eve's in either quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackReport {
    pub kind: AttackKind,
    /// Eve's angle for Bob's x basis (she uses −θ for p where needed).
    pub theta: f64,
    pub v_be_x: f64,
    pub v_be_p: f64,
    pub v_ba: f64,
    pub convention: VarianceConvention,
    pub secure: bool,
    /// Minimum line transmission at which this attack is beaten, for the
    /// report's (δ, V_A). Values above 1 mean no physical transmission is
    /// secure against this attack.
    pub threshold_eta: f64,
}

impl AttackReport {
    /// The same report re-expressed in another variance convention.
    pub fn in_convention(&self, convention: VarianceConvention) -> AttackReport {
        let scale = convention.from_quadrature() / self.convention.from_quadrature();
        AttackReport {
            v_be_x: self.v_be_x * scale,
            v_be_p: self.v_be_p * scale,
            v_ba: self.v_ba * scale,
            convention,
            ..*self
        }
    }
}

/// Closed-form conditional variance of the cloning attack, V_B|E(0), in
/// shot-noise units.
fn v_clone_snu(eta: f64, delta: f64, v_a: f64) -> f64 {
    (delta + 2.0 * (1.0 + v_a) * eta)
        / (delta * delta
            + delta * (1.0 + (v_a - 2.0) * eta)
            + 2.0 * eta * (1.0 + v_a * (1.0 - eta)))
}

/// Closed-form conditional variance of the anticloning attack, V_B|E(π/2),
/// in shot-noise units. The correlation term carries a factor η; at δ = 0
/// the anticlone is pure vacuum and the value reduces to Bob's marginal
/// variance 1 + ηV_A.
fn v_anticlone_snu(eta: f64, delta: f64, v_a: f64) -> f64 {
    1.0 + delta
        - eta * ((4.0 + 3.0 * v_a) * delta - 2.0 * v_a * eta) / ((1.0 + v_a) * delta + 2.0 * eta)
}

/// Closed-form conditional variance of the Bell-measurement attack,
/// V_B|E(π/4), in shot-noise units.
fn v_bma_snu(eta: f64, delta: f64, v_a: f64) -> f64 {
    let num = v_a * (2.0 * eta - delta).powi(2);
    let den = delta * delta
        + 2.0 * (v_a + 2.0) * (2.0 * eta * delta * (1.0 - eta + delta / 2.0)).sqrt()
        + delta * (v_a + 2.0 + (v_a - 2.0) * eta)
        + 2.0 * eta * (2.0 + v_a * (1.0 - eta));
    1.0 + num / den
}

/// Closed-form minimum of V_B|E over θ, in shot-noise units.
fn v_optimal_snu(eta: f64, delta: f64, v_a: f64) -> f64 {
    (1.0 + v_a) / ((1.0 + v_a) * (1.0 + delta) - eta * v_a)
}

/// Full security evaluation of `kind` against `channel`, in shot-noise
/// units.
pub fn attack_report(kind: AttackKind, channel: &ChannelParams) -> Result<AttackReport> {
    validate_channel(channel.eta(), channel.delta())?;
    let (eta, delta, v_a) = (channel.eta(), channel.delta(), channel.v_a());
    let theta = kind.theta(channel)?;
    // All four strategies reach the same uncertainty in both quadratures.
    let v_be_snu = match kind {
        AttackKind::Cloning => v_clone_snu(eta, delta, v_a),
        AttackKind::Anticloning => v_anticlone_snu(eta, delta, v_a),
        AttackKind::BellMeasurement => v_bma_snu(eta, delta, v_a),
        AttackKind::OptimalGaussian => v_optimal_snu(eta, delta, v_a),
    };
    let v_ba = 1.0 + delta;
    Ok(AttackReport {
        kind,
        theta,
        v_be_x: v_be_snu,
        v_be_p: v_be_snu,
        v_ba,
        convention: VarianceConvention::ShotNoiseUnits,
        secure: v_ba <= v_be_snu,
        threshold_eta: threshold(kind, delta, v_a),
    })
}

/// The angle minimizing Eve's conditional variance, in (−π/2, π/2].
///
/// Uses the closed form
/// θ_opt = atan(√(ηδ)(2+V_A) / (√(2−2η+δ)·(V_A(η−δ)−δ))),
/// then guards against the conjugate stationary branch at θ_opt ± π/2: if
/// that branch ever evaluates lower, the golden-section minimizer wins and a
/// warning is logged. For δ = 0 the anticlone carries nothing and the best
/// angle is 0.
pub fn theta_opt(eta: f64, delta: f64, v_a: f64) -> Result<f64> {
    validate_channel(eta, delta)?;
    if !v_a.is_finite() || v_a <= 0.0 {
        return Err(Error::NonPositiveModulation(v_a));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let num = (eta * delta).sqrt() * (2.0 + v_a);
    let den = (2.0 - 2.0 * eta + delta).sqrt() * (v_a * (eta - delta) - delta);
    let theta = (num / den).atan();

    let eval = |th: f64| v_be(th, eta, delta, v_a, VarianceConvention::QuadratureUnits)
        .expect("domain already validated");
    let here = eval(theta);
    let conjugate = if theta > 0.0 { theta - FRAC_PI_2 } else { theta + FRAC_PI_2 };
    if eval(conjugate) < here * (1.0 - 1e-12) {
        log::warn!(
            "closed-form splitter angle {theta} is not the minimizer at \
             eta={eta}, delta={delta}, v_a={v_a}; refining numerically"
        );
        return Ok(periodic_min(eval, -FRAC_PI_2, FRAC_PI_2, 360, 1e-12));
    }
    Ok(theta)
}

/// Minimum line transmission for security against `kind` at excess noise
/// `delta` and modulation `v_a`.
///
/// Thresholds above 1 are returned as-is: they mean the channel cannot be
/// secure against that attack at any physical transmission. The
/// Bell-measurement threshold is +∞ when `v_a` < `delta` (no transmission
/// beats the attack there). `delta` must be nonnegative and `v_a` positive.
pub fn threshold(kind: AttackKind, delta: f64, v_a: f64) -> f64 {
    debug_assert!(delta >= 0.0 && v_a > 0.0);
    match kind {
        AttackKind::Cloning => {
            delta / (4.0 * v_a * (1.0 + delta))
                * ((3.0 + delta) * v_a - 2.0 * delta
                    + (((3.0 + delta) * v_a + 2.0 * delta).powi(2) + 16.0 * v_a).sqrt())
        }
        AttackKind::Anticloning => (4.0 + 3.0 * v_a) * delta / (2.0 * v_a),
        AttackKind::BellMeasurement => {
            if v_a < delta {
                f64::INFINITY
            } else {
                2.0 * delta * (v_a + 1.0 - delta / 2.0 + ((v_a + 2.0) * (v_a - delta)).sqrt())
                    / (v_a * (2.0 + delta))
            }
        }
        AttackKind::OptimalGaussian => {
            (1.0 + v_a) / v_a * delta * (2.0 + delta) / (1.0 + delta)
        }
    }
}

/// True when a threshold exceeds every physical transmission.
pub fn threshold_unreachable(eta_threshold: f64) -> bool {
    !(eta_threshold <= 1.0)
}

/// Necessary security bound from the intercept-resend attack: η > δ/2.
pub fn intercept_resend_bound(delta: f64) -> f64 {
    delta / 2.0
}

/// V_B|E(θ_opt) and θ_opt in the limit of arbitrarily large modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighModulationLimits {
    /// lim V_B|E(θ_opt) = 1/(1+δ−η) in shot-noise units.
    pub v_be_snu: f64,
    /// lim θ_opt = atan(√(ηδ) / (√(2−2η+δ)·(η−δ))).
    pub theta: f64,
    /// Set when η = δ, where the angle limit sits at the π/2 boundary.
    pub theta_at_boundary: bool,
}

pub fn high_modulation_limits(eta: f64, delta: f64) -> Result<HighModulationLimits> {
    validate_channel(eta, delta)?;
    let v_be_snu = 1.0 / (1.0 + delta - eta);
    let at_boundary = eta == delta;
    let theta = if at_boundary {
        FRAC_PI_2
    } else {
        ((eta * delta).sqrt() / ((2.0 - 2.0 * eta + delta).sqrt() * (eta - delta))).atan()
    };
    Ok(HighModulationLimits { v_be_snu, theta, theta_at_boundary: at_boundary })
}

/// One row of a threshold sweep at fixed modulation variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub delta: f64,
    pub eta_clone: f64,
    pub eta_anticlone: f64,
    pub eta_bma: f64,
    pub eta_opt: f64,
    pub eta_intercept_resend: f64,
}

/// Threshold curves for all four attacks plus the intercept-resend bound,
/// one row per requested δ, ordered by ascending δ.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub v_a: f64,
    pub rows: Vec<ThresholdRow>,
}

pub fn threshold_curve(v_a: f64, delta_grid: &[f64]) -> ThresholdCurve {
    let mut rows: Vec<ThresholdRow> = delta_grid
        .iter()
        .map(|&delta| ThresholdRow {
            delta,
            eta_clone: threshold(AttackKind::Cloning, delta, v_a),
            eta_anticlone: threshold(AttackKind::Anticloning, delta, v_a),
            eta_bma: threshold(AttackKind::BellMeasurement, delta, v_a),
            eta_opt: threshold(AttackKind::OptimalGaussian, delta, v_a),
            eta_intercept_resend: intercept_resend_bound(delta),
        })
        .collect();
    rows.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    ThresholdCurve { v_a, rows }
}

/// Golden-section minimum of V_B|E over one full period of θ. Test oracle
/// for [`theta_opt`]; exposed because the simulation and FFI layers reuse it.
pub fn minimize_v_be(eta: f64, delta: f64, v_a: f64) -> Result<(f64, f64)> {
    validate_channel(eta, delta)?;
    let f = |th: f64| {
        v_be(th, eta, delta, v_a, VarianceConvention::QuadratureUnits).expect("validated domain")
    };
    let th = periodic_min(f, -FRAC_PI_2, FRAC_PI_2, 720, 1e-13);
    let th = golden_section_min(f, th - 1e-4, th + 1e-4, 1e-14);
    Ok((th, f(th)))
}
