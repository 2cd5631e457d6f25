//! S-wave neutron scattering, slab phase shifts, and interferometer fringes.
//!
//! Units: cross sections in barn, wave numbers in 1/√barn, so `4π/k²` is in
//! barn. Densities are per barn^(3/2) and thicknesses in √barn, which keeps
//! `πnL/k²` dimensionless. See [`units`] for conversions from laboratory units.

mod slab;
mod visibility;

pub use slab::{
    compose_slabs, order_discrepancy, phase_about, slab_operator, slab_phase, Slab, SlabPhase,
    SlabSpec,
};
pub use visibility::{fringe_visibility, Fringe, Spectrum, MIN_QUADRATURE_NODES};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::Amplitude;
use crate::quat::{PureAxis, Quaternion};

/// Conversions from laboratory units to the barn-based system used here.
pub mod units {
    /// 1/Å → 1/√barn (1 √barn = 1e-4 Å).
    pub const INV_ANGSTROM_TO_INV_SQRT_BARN: f64 = 1e-4;
    /// cm → √barn (1 √barn = 1e-12 cm).
    pub const CM_TO_SQRT_BARN: f64 = 1e12;
    /// cm⁻³ → barn^(-3/2).
    pub const PER_CM3_TO_PER_BARN_3_2: f64 = 1e-36;

    pub fn k_from_inv_angstrom(k: f64) -> f64 {
        k * INV_ANGSTROM_TO_INV_SQRT_BARN
    }

    pub fn length_from_cm(l: f64) -> f64 {
        l * CM_TO_SQRT_BARN
    }

    pub fn density_from_per_cm3(n: f64) -> f64 {
        n * PER_CM3_TO_PER_BARN_3_2
    }
}

/// One S-wave channel: wave number `k` (1/√barn), phase shift `δ` (rad) and
/// elasticity `η ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuclearChannel {
    k: f64,
    delta: f64,
    eta: f64,
}

impl NuclearChannel {
    pub fn new(k: f64, delta: f64, eta: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidInput(format!(
                "wave number must be positive, got {k}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidInput("phase shift must be finite".into()));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidInput(format!(
                "elasticity must lie in [0, 1], got {eta}"
            )));
        }
        Ok(Self { k, delta, eta })
    }

    /// Builds the channel from the unitarity scale `4π/k²` in barn.
    pub fn from_unitarity_scale(four_pi_over_k2: f64, delta: f64, eta: f64) -> Result<Self> {
        if !(four_pi_over_k2.is_finite() && four_pi_over_k2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "4π/k² must be positive, got {four_pi_over_k2}"
            )));
        }
        Self::new((4.0 * PI / four_pi_over_k2).sqrt(), delta, eta)
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `4π/k²` in barn.
    pub fn unitarity_scale(&self) -> f64 {
        4.0 * PI / (self.k * self.k)
    }
}

/// `f = [η sin 2δ + u (1 − η cos 2δ)] / 2k` with `u` the channel's imaginary
/// unit, as a quaternion in span{1, u}.
pub fn forward_amplitude_value(ch: &NuclearChannel, axis: PureAxis) -> Quaternion {
    let (s2, c2) = (2.0 * ch.delta).sin_cos();
    let re = ch.eta * s2 / (2.0 * ch.k);
    let im = (1.0 - ch.eta * c2) / (2.0 * ch.k);
    Quaternion::from_real(re) + axis.as_quaternion().scale(im)
}

/// Forward amplitude as magnitude (√barn) and direction.
pub fn forward_amplitude(ch: &NuclearChannel, axis: PureAxis) -> Result<Amplitude> {
    Amplitude::from_quaternion(forward_amplitude_value(ch, axis))
}

/// `σ_s = (4π/k²)[η sin²δ + ((1 − η)/2)²]`.
pub fn scattering_xsec(ch: &NuclearChannel) -> f64 {
    let h = (1.0 - ch.eta) / 2.0;
    ch.unitarity_scale() * (ch.eta * ch.delta.sin().powi(2) + h * h)
}

/// `σ_a = π(1 − η²)/k²`.
pub fn absorption_xsec(ch: &NuclearChannel) -> f64 {
    PI * (1.0 - ch.eta * ch.eta) / (ch.k * ch.k)
}

/// Inverts `σ_a = π(1 − η²)/k²` for `η`.
pub fn eta_from_absorption(sigma_a: f64, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidInput(format!(
            "wave number must be positive, got {k}"
        )));
    }
    let limit = PI / (k * k);
    if !(sigma_a.is_finite() && sigma_a >= 0.0) || sigma_a > limit {
        return Err(Error::UnphysicalAbsorption { sigma_a, limit });
    }
    Ok((1.0 - sigma_a / limit).sqrt())
}

/// Inverts `σ_s` for `δ ∈ [0, π/2]` at fixed `k` and `η > 0`.
pub fn delta_from_scattering(sigma_s: f64, k: f64, eta: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidInput(format!(
            "wave number must be positive, got {k}"
        )));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "elasticity must lie in (0, 1], got {eta}"
        )));
    }
    let scale = 4.0 * PI / (k * k);
    let h = (1.0 - eta) / 2.0;
    let sin2 = (sigma_s / scale - h * h) / eta;
    if !(0.0..=1.0).contains(&sin2) {
        return Err(Error::UnphysicalScattering(format!(
            "sigma_s = {sigma_s} barn needs sin²δ = {sin2}"
        )));
    }
    Ok(sin2.sqrt().asin())
}
