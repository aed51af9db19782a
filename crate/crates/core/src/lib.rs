//! Phase-space simulation and security analysis of coherent-state
//! continuous-variable QKD with reverse reconciliation against Gaussian
//! individual attacks.
//!
//! The toolkit models the amplifier–beam-splitter eavesdropping circuit in
//! three independent ways and cross-checks them against each other:
//!
//! * closed-form conditional variances and security thresholds for the four
//!   attack strategies ([`attacks`]);
//! * exact Gaussian second-moment propagation through the symplectic circuit
//!   ([`quad`], [`circuit`], [`ensemble`]);
//! * a seeded Monte Carlo sampler of full protocol rounds ([`montecarlo`]).
//!
//! Everything internal is kept in quadrature units (vacuum variance 1/4);
//! shot-noise units (vacuum variance 1) appear only at reporting boundaries
//! via [`ensemble::VarianceConvention`].

pub mod attacks;
pub mod circuit;
mod error;
pub mod ensemble;
pub mod montecarlo;
pub mod optimize;
pub mod plot;
pub mod quad;
pub mod sweep;

pub use attacks::{
    attack_report, high_modulation_limits, intercept_resend_bound, theta_opt, threshold,
    threshold_curve, threshold_unreachable, v_be, v_be_symmetries, xyz, AttackKind, AttackReport,
    HighModulationLimits, SymmetryVariances, ThresholdCurve, ThresholdRow, XyzCoefficients,
};
pub use circuit::{
    build_circuit, invert_channel, output_amplitudes, verify_channel, ChannelParams,
    CircuitParams, CoherentAmplitude, OutputAmplitudes,
};
pub use ensemble::{
    alice_conditional_variances, alice_min_conditional_variance, ensemble_moments,
    ConditionalVariance, JointMoments, JointVar, VarianceConvention,
};
pub use error::{Error, Result};
pub use montecarlo::{run_simulation, standard_error, EmpiricalReport, SimConfig};
pub use quad::{Mode, MomentState, QuadIndex, Quadrature, SymplecticMap};
pub use sweep::{parse_csv, write_csv, CsvError, SweepSpec};
