//! Statistical oracle for the closed forms: samples full protocol rounds
//! (Gaussian modulation, vacuum ancillas, circuit propagation, quadrature
//! outcomes for Bob and Eve) and estimates the conditional variances
//! empirically.
//!
//! Reproducibility contract: every round derives its randomness from
//! (seed, round index) through an independent ChaCha stream, and partial
//! sums are combined per fixed-size chunk in index order, so reports are
//! bit-identical across runs and across worker counts.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::attacks::AttackKind;
use crate::circuit::{build_circuit, ChannelParams, CircuitParams};
use crate::error::{Error, Result};
use crate::quad::{Mode, QuadIndex, Quadrature};

const CHUNK: u64 = 8192;

/// Simulation request: channel, attack, round count and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub channel: ChannelParams,
    pub kind: AttackKind,
    pub samples: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Requires at least 10³ rounds; below that the standard-error gates
    /// are meaningless.
    pub fn new(channel: ChannelParams, kind: AttackKind, samples: u64, seed: u64) -> Result<Self> {
        if samples < 1000 {
            return Err(Error::TooFewSamples(samples));
        }
        Ok(Self { channel, kind, samples, seed })
    }
}

/// Empirical conditional variances in quadrature units, with standard-error
/// estimates for test gating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalReport {
    pub v_ba_hat: f64,
    pub v_be_x_hat: f64,
    pub v_be_p_hat: f64,
    pub se_v_ba: f64,
    pub se_v_be_x: f64,
    pub se_v_be_p: f64,
    pub samples: u64,
    /// Rounds in which Bob measured x (resp. p); Eve's x estimate uses only
    /// the former, her p estimate only the latter.
    pub sifted_x: u64,
    pub sifted_p: u64,
}

/// Gaussian residual-variance standard error, ≈ estimate·√(2/(n−1)).
pub fn standard_error(variance_estimate: f64, samples: u64) -> f64 {
    debug_assert!(samples >= 2);
    variance_estimate * (2.0 / (samples as f64 - 1.0)).sqrt()
}

/// Which output quadratures Eve reads: the circuit angle and port for Bob's
/// x basis, and the angle and port for his p basis.
///
/// Only the Bell-measurement plan reads both of its quadratures in the same
/// round (its two angles coincide, so a single circuit serves both); they
/// sit on distinct modes, which is what makes the simultaneous measurement
/// legitimate. Every other plan realizes a delayed choice: one port, one
/// quadrature per round, selected after Bob's basis is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPlan {
    pub theta_x: f64,
    pub theta_p: f64,
    pub eve_x: QuadIndex,
    pub eve_p: QuadIndex,
}

pub fn measurement_plan(kind: AttackKind, channel: &ChannelParams) -> Result<MeasurementPlan> {
    let plan = match kind {
        // Clone 2 is port b″ of the θ = 0 circuit (the second splitter
        // never fires).
        AttackKind::Cloning => MeasurementPlan {
            theta_x: 0.0,
            theta_p: 0.0,
            eve_x: QuadIndex::new(Mode::B, Quadrature::X),
            eve_p: QuadIndex::new(Mode::B, Quadrature::P),
        },
        // The anticlone is the amplifier idler, port c″ of the θ = 0
        // circuit. (Its statistics coincide with port b″ at θ = π/2, which
        // is how the closed form indexes this attack.)
        AttackKind::Anticloning => MeasurementPlan {
            theta_x: 0.0,
            theta_p: 0.0,
            eve_x: QuadIndex::new(Mode::C, Quadrature::X),
            eve_p: QuadIndex::new(Mode::C, Quadrature::P),
        },
        AttackKind::BellMeasurement => MeasurementPlan {
            theta_x: FRAC_PI_4,
            theta_p: FRAC_PI_4,
            eve_x: QuadIndex::new(Mode::B, Quadrature::X),
            eve_p: QuadIndex::new(Mode::C, Quadrature::P),
        },
        AttackKind::OptimalGaussian => {
            let theta = kind.theta(channel)?;
            MeasurementPlan {
                theta_x: theta,
                theta_p: -theta,
                eve_x: QuadIndex::new(Mode::B, Quadrature::X),
                eve_p: QuadIndex::new(Mode::B, Quadrature::P),
            }
        }
    };
    Ok(plan)
}

/// Neumaier-compensated scalar accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Running sums for one (target, given) pair.
#[derive(Debug, Clone, Copy, Default)]
struct PairSums {
    n: u64,
    t: Compensated,
    g: Compensated,
    tt: Compensated,
    gg: Compensated,
    tg: Compensated,
}

impl PairSums {
    fn push(&mut self, target: f64, given: f64) {
        self.n += 1;
        self.t.add(target);
        self.g.add(given);
        self.tt.add(target * target);
        self.gg.add(given * given);
        self.tg.add(target * given);
    }

    fn merge(&mut self, other: &PairSums) {
        self.n += other.n;
        self.t.add(other.t.value());
        self.g.add(other.g.value());
        self.tt.add(other.tt.value());
        self.gg.add(other.gg.value());
        self.tg.add(other.tg.value());
    }

    /// Var̂(target) − Cov̂(target, given)² / Var̂(given), sample moments.
    fn conditional_variance(&self) -> f64 {
        let n = self.n as f64;
        let mean_t = self.t.value() / n;
        let mean_g = self.g.value() / n;
        let var_t = (self.tt.value() - n * mean_t * mean_t) / (n - 1.0);
        let var_g = (self.gg.value() - n * mean_g * mean_g) / (n - 1.0);
        let cov = (self.tg.value() - n * mean_t * mean_g) / (n - 1.0);
        if var_g <= 0.0 {
            return var_t;
        }
        (var_t - cov * cov / var_g).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkStats {
    alice: PairSums,
    eve_x: PairSums,
    eve_p: PairSums,
}

impl ChunkStats {
    fn merge(&mut self, other: &ChunkStats) {
        self.alice.merge(&other.alice);
        self.eve_x.merge(&other.eve_x);
        self.eve_p.merge(&other.eve_p);
    }
}

/// Runs the sampled protocol. Per round: Alice draws (x_A, p_A) from a
/// zero-mean Gaussian of variance V_A/4, every vacuum port contributes an
/// independent Gaussian of variance 1/4, the six-mode vector is propagated
/// through the circuit, Bob measures x or p of his port on a fair coin, and
/// Eve records her plan's quadratures. Conditional variances are estimated
/// over the basis-matched rounds.
pub fn run_simulation(config: &SimConfig) -> Result<EmpiricalReport> {
    let plan = measurement_plan(config.kind, &config.channel)?;
    let channel = config.channel;
    let map_x = build_circuit(&CircuitParams::from_channel(
        channel.eta(),
        channel.delta(),
        plan.theta_x,
    )?);
    let map_p = build_circuit(&CircuitParams::from_channel(
        channel.eta(),
        channel.delta(),
        plan.theta_p,
    )?);

    // Only four output rows are ever read.
    let bob_x_row = map_x.row(QuadIndex::new(Mode::A, Quadrature::X));
    let bob_p_row = map_p.row(QuadIndex::new(Mode::A, Quadrature::P));
    let eve_x_row = map_x.row(plan.eve_x);
    let eve_p_row = map_p.row(plan.eve_p);

    let sigma_alice = channel.v_a().sqrt() / 2.0;
    let sigma_vacuum = 0.5;
    let base_rng = ChaCha8Rng::seed_from_u64(config.seed);

    let chunks = config.samples.div_ceil(CHUNK);
    let partials: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|chunk_idx| {
            let lo = chunk_idx * CHUNK;
            let hi = (lo + CHUNK).min(config.samples);
            let mut stats = ChunkStats::default();
            let mut rng = base_rng.clone();
            for round in lo..hi {
                rng.set_stream(round);
                rng.set_word_pos(0);

                let x_alice = sigma_alice * rng.sample::<f64, _>(StandardNormal);
                let p_alice = sigma_alice * rng.sample::<f64, _>(StandardNormal);
                let input = [
                    x_alice + sigma_vacuum * rng.sample::<f64, _>(StandardNormal),
                    p_alice + sigma_vacuum * rng.sample::<f64, _>(StandardNormal),
                    sigma_vacuum * rng.sample::<f64, _>(StandardNormal),
                    sigma_vacuum * rng.sample::<f64, _>(StandardNormal),
                    sigma_vacuum * rng.sample::<f64, _>(StandardNormal),
                    sigma_vacuum * rng.sample::<f64, _>(StandardNormal),
                ];
                let bob_measures_x: bool = rng.r#gen();

                if bob_measures_x {
                    let bob = dot6(&bob_x_row, &input);
                    let eve = dot6(&eve_x_row, &input);
                    stats.alice.push(bob, x_alice);
                    stats.eve_x.push(bob, eve);
                } else {
                    let bob = dot6(&bob_p_row, &input);
                    let eve = dot6(&eve_p_row, &input);
                    stats.alice.push(bob, p_alice);
                    stats.eve_p.push(bob, eve);
                }
            }
            stats
        })
        .collect();

    let mut total = ChunkStats::default();
    for partial in &partials {
        total.merge(partial);
    }

    let v_ba_hat = total.alice.conditional_variance();
    let v_be_x_hat = total.eve_x.conditional_variance();
    let v_be_p_hat = total.eve_p.conditional_variance();
    Ok(EmpiricalReport {
        v_ba_hat,
        v_be_x_hat,
        v_be_p_hat,
        se_v_ba: standard_error(v_ba_hat, total.alice.n),
        se_v_be_x: standard_error(v_be_x_hat, total.eve_x.n),
        se_v_be_p: standard_error(v_be_p_hat, total.eve_p.n),
        samples: config.samples,
        sifted_x: total.eve_x.n,
        sifted_p: total.eve_p.n,
    })
}

fn dot6(row: &[f64; 6], v: &[f64; 6]) -> f64 {
    row.iter().zip(v).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{attack_report, v_be};
    use crate::ensemble::VarianceConvention;
    use approx::assert_relative_eq;

    fn ch(eta: f64, delta: f64, v_a: f64) -> ChannelParams {
        ChannelParams::new(eta, delta, v_a).unwrap()
    }

    #[test]
    fn config_rejects_tiny_sample_counts() {
        assert!(matches!(
            SimConfig::new(ch(0.5, 0.1, 10.0), AttackKind::Cloning, 999, 1),
            Err(Error::TooFewSamples(999))
        ));
        assert!(SimConfig::new(ch(0.5, 0.1, 10.0), AttackKind::Cloning, 1000, 1).is_ok());
    }

    #[test]
    fn standard_error_examples() {
        assert_relative_eq!(standard_error(0.25, 1_000_000), 3.535_535_673_701e-4, max_relative = 1e-9);
        assert_eq!(standard_error(0.0, 50), 0.0);
        assert_relative_eq!(standard_error(1.0, 10_000), 1.414_284_278_354_9e-2, max_relative = 1e-9);
    }

    #[test]
    fn bell_plan_reads_distinct_modes_simultaneously() {
        let plan = measurement_plan(AttackKind::BellMeasurement, &ch(0.5, 0.1, 10.0)).unwrap();
        // Simultaneous x and p sampling is only legitimate on distinct modes.
        assert_eq!(plan.theta_x, plan.theta_p);
        assert_ne!(plan.eve_x.mode, plan.eve_p.mode);
        assert_eq!(plan.eve_x, QuadIndex::new(Mode::B, Quadrature::X));
        assert_eq!(plan.eve_p, QuadIndex::new(Mode::C, Quadrature::P));
    }

    #[test]
    fn delayed_choice_plans_read_one_port() {
        for kind in [AttackKind::Cloning, AttackKind::Anticloning, AttackKind::OptimalGaussian] {
            let plan = measurement_plan(kind, &ch(0.5, 0.1, 10.0)).unwrap();
            // x and p of one mode are never sampled in the same round: these
            // plans read one quadrature per round, chosen by Bob's basis.
            assert_eq!(plan.eve_x.mode, plan.eve_p.mode);
            assert_eq!(plan.eve_x.quadrature, Quadrature::X);
            assert_eq!(plan.eve_p.quadrature, Quadrature::P);
        }
        let opt = measurement_plan(AttackKind::OptimalGaussian, &ch(0.5, 0.1, 10.0)).unwrap();
        assert_relative_eq!(opt.theta_x, -opt.theta_p);
    }

    #[test]
    fn identity_channel_is_vacuum_limited() {
        let config =
            SimConfig::new(ch(1.0, 0.0, 4.0), AttackKind::Cloning, 200_000, 7).unwrap();
        let report = run_simulation(&config).unwrap();
        assert!((report.v_ba_hat - 0.25).abs() < 5.0 * report.se_v_ba);
    }

    #[test]
    fn reports_are_bit_identical_across_worker_counts() {
        let config =
            SimConfig::new(ch(0.5, 0.1, 10.0), AttackKind::BellMeasurement, 50_000, 42).unwrap();
        let default_pool = run_simulation(&config).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_simulation(&config).unwrap());
        assert_eq!(default_pool, single);
        let repeat = run_simulation(&config).unwrap();
        assert_eq!(default_pool, repeat);
    }

    #[test]
    fn empirical_matches_analytic_for_each_attack() {
        let channel = ch(0.5, 0.1, 10.0);
        for kind in AttackKind::ALL {
            let config = SimConfig::new(channel, kind, 400_000, 1234).unwrap();
            let report = run_simulation(&config).unwrap();
            let analytic = attack_report(kind, &channel).unwrap().in_convention(VarianceConvention::QuadratureUnits);
            assert!(
                (report.v_be_x_hat - analytic.v_be_x).abs() < 5.0 * report.se_v_be_x,
                "{kind:?}: x-estimate {} vs analytic {} (se {})",
                report.v_be_x_hat,
                analytic.v_be_x,
                report.se_v_be_x
            );
            assert!(
                (report.v_be_p_hat - analytic.v_be_p).abs() < 5.0 * report.se_v_be_p,
                "{kind:?}: p-estimate {} vs analytic {} (se {})",
                report.v_be_p_hat,
                analytic.v_be_p,
                report.se_v_be_p
            );
            assert!((report.v_ba_hat - analytic.v_ba).abs() < 5.0 * report.se_v_ba);
        }
    }

    #[test]
    fn bell_outcome_depends_only_on_its_two_ports() {
        // Functional audit of the simultaneous measurement: Eve's Bell
        // records are exactly the x_b″ and p_c″ entries of the output.
        let channel = ch(0.62, 0.3, 6.0);
        let plan = measurement_plan(AttackKind::BellMeasurement, &channel).unwrap();
        let map = build_circuit(
            &CircuitParams::from_channel(channel.eta(), channel.delta(), plan.theta_x).unwrap(),
        );
        let input = [0.3, -0.2, 0.15, 0.7, -0.4, 0.05];
        let out = map.apply(&nalgebra::SVector::<f64, 6>::from_column_slice(&input));
        let eve_x = dot6(&map.row(plan.eve_x), &input);
        let eve_p = dot6(&map.row(plan.eve_p), &input);
        assert_relative_eq!(eve_x, out[2], epsilon = 1e-14); // x of mode b
        assert_relative_eq!(eve_p, out[5], epsilon = 1e-14); // p of mode c
    }

    #[test]
    fn bma_quadrature_estimates_agree() {
        // Bell measurement estimates both quadratures with the same
        // uncertainty; check the two empirical values against the single
        // analytic number.
        let channel = ch(0.5, 0.1, 10.0);
        let config = SimConfig::new(channel, AttackKind::BellMeasurement, 400_000, 5).unwrap();
        let report = run_simulation(&config).unwrap();
        let analytic = v_be(
            std::f64::consts::FRAC_PI_4,
            0.5,
            0.1,
            10.0,
            VarianceConvention::QuadratureUnits,
        )
        .unwrap();
        assert!((report.v_be_x_hat - analytic).abs() < 5.0 * report.se_v_be_x);
        assert!((report.v_be_p_hat - analytic).abs() < 5.0 * report.se_v_be_p);
    }
}
