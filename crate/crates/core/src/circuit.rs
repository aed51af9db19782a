//! The amplifier–beam-splitter eavesdropping circuit: an amplifier on modes
//! (a, c), a beam splitter of angle φ on (a, b) handing mode a″ to Bob, and a
//! second beam splitter of angle θ on Eve's modes (b′, c′).
//!
//! Users describe the channel by its line transmission η and excess noise δ;
//! the squeezing λ and first splitter angle φ are derived from them, while θ
//! remains Eve's free parameter.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{Mode, MomentState, QuadIndex, Quadrature, SymplecticMap};

/// Channel description: line transmission, excess noise (shot-noise
/// normalized) and Alice's modulation variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    eta: f64,
    delta: f64,
    v_a: f64,
}

impl ChannelParams {
    /// Validates 0 < η ≤ 1, 0 ≤ δ < 2η (needed for a real circuit) and V_A > 0.
    pub fn new(eta: f64, delta: f64, v_a: f64) -> Result<Self> {
        validate_channel(eta, delta)?;
        if !v_a.is_finite() || v_a <= 0.0 {
            return Err(Error::NonPositiveModulation(v_a));
        }
        Ok(Self { eta, delta, v_a })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn v_a(&self) -> f64 {
        self.v_a
    }
}

pub(crate) fn validate_channel(eta: f64, delta: f64) -> Result<()> {
    if !eta.is_finite() || eta <= 0.0 || eta > 1.0 {
        return Err(Error::TransmissionOutOfRange(eta));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::NegativeExcessNoise(delta));
    }
    if delta >= 2.0 * eta {
        // λ diverges at δ = 2η; no finite circuit exists, so reject rather
        // than clamp.
        return Err(Error::ExcessNoiseTooLarge { eta, delta });
    }
    Ok(())
}

/// Solves the channel equations for the circuit parameters:
/// tan φ = √((1−η+δ/2)/(η−δ/2)) and tanh λ = √(δ/(2η)).
pub fn invert_channel(eta: f64, delta: f64) -> Result<(f64, f64)> {
    validate_channel(eta, delta)?;
    let lambda = (delta / (2.0 * eta)).sqrt().atanh();
    let phi = ((1.0 - eta + delta / 2.0) / (eta - delta / 2.0)).sqrt().atan();
    Ok((lambda, phi))
}

/// Concrete circuit settings: amplifier squeezing λ, first splitter angle φ
/// and Eve's second splitter angle θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    lambda: f64,
    phi: f64,
    theta: f64,
}

impl CircuitParams {
    /// λ must be finite and nonnegative; φ and θ finite. The canonical ranges
    /// are φ ∈ [0, π/2) and θ ∈ (−π/2, π/2]; the circuit is π-periodic in θ
    /// up to signs that no second moment can see.
    pub fn new(lambda: f64, phi: f64, theta: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite { name: "squeezing parameter", value: lambda });
        }
        if lambda < 0.0 {
            return Err(Error::NegativeSqueezing(lambda));
        }
        if !phi.is_finite() {
            return Err(Error::NonFinite { name: "splitter angle phi", value: phi });
        }
        if !theta.is_finite() {
            return Err(Error::NonFinite { name: "splitter angle theta", value: theta });
        }
        Ok(Self { lambda, phi, theta })
    }

    /// Circuit reproducing the (η, δ) channel, with Eve's angle θ free.
    pub fn from_channel(eta: f64, delta: f64, theta: f64) -> Result<Self> {
        let (lambda, phi) = invert_channel(eta, delta)?;
        Self::new(lambda, phi, theta)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Amplifier gain g = cosh²λ ≥ 1.
    pub fn gain(&self) -> f64 {
        self.lambda.cosh().powi(2)
    }
}

/// Assembles the full three-mode map: squeezer on (a, c), splitter φ on
/// (a, b), splitter θ on (b, c). Bob's output rows (x_a″, p_a″) do not
/// depend on θ.
pub fn build_circuit(params: &CircuitParams) -> SymplecticMap {
    let amp = SymplecticMap::two_mode_squeezer(Mode::A, Mode::C, params.lambda)
        .expect("CircuitParams guarantees a valid squeezing parameter");
    let split = SymplecticMap::beam_splitter(Mode::A, Mode::B, params.phi)
        .expect("CircuitParams guarantees a finite angle");
    let eve = SymplecticMap::beam_splitter(Mode::B, Mode::C, params.theta)
        .expect("CircuitParams guarantees a finite angle");
    eve.compose(&split.compose(&amp))
}

/// Coherent amplitude α, stored as its x and p quadrature means:
/// re = (α + α*)/2, im = (α − α*)/2i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    pub re: f64,
    pub im: f64,
}

impl CoherentAmplitude {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn from_complex(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Mean output amplitudes of the three circuit ports for input |α⟩ on mode a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputAmplitudes {
    /// Bob's port a″.
    pub a: CoherentAmplitude,
    /// Eve's port b″ (the second clone when θ = 0).
    pub b: CoherentAmplitude,
    /// Eve's port c″ (the anticlone when θ = 0).
    pub c: CoherentAmplitude,
}

/// Mean amplitudes of the outputs:
/// ⟨a″⟩ = α cosh λ cos φ,
/// ⟨b″⟩ = α cosh λ cos θ sin φ + α* sinh λ sin θ,
/// ⟨c″⟩ = α cosh λ sin θ sin φ − α* sinh λ cos θ.
pub fn output_amplitudes(params: &CircuitParams, alpha: CoherentAmplitude) -> OutputAmplitudes {
    let z = alpha.as_complex();
    let zc = z.conj();
    let (ch, sh) = (params.lambda.cosh(), params.lambda.sinh());
    let (sin_phi, cos_phi) = params.phi.sin_cos();
    let (sin_th, cos_th) = params.theta.sin_cos();
    OutputAmplitudes {
        a: CoherentAmplitude::from_complex(z * ch * cos_phi),
        b: CoherentAmplitude::from_complex(z * ch * cos_th * sin_phi + zc * sh * sin_th),
        c: CoherentAmplitude::from_complex(z * ch * sin_th * sin_phi - zc * sh * cos_th),
    }
}

/// Measures the channel the circuit realizes: η from the mean-amplitude
/// attenuation, δ from the propagated vacuum covariance of Bob's mode
/// (δ = 4·Var(x_a″) − 1 with all inputs in vacuum). Round-trips
/// [`invert_channel`] to better than 1e-12.
pub fn verify_channel(params: &CircuitParams) -> (f64, f64) {
    let eta = (params.lambda.cosh() * params.phi.cos()).powi(2);
    let map = build_circuit(params);
    let out = MomentState::vacuum().propagate(&map);
    let var_bob_x = out.variance(QuadIndex::new(Mode::A, Quadrature::X));
    (eta, 4.0 * var_bob_x - 1.0)
}
