use std::f64::consts::PI;

use serde::Serialize;

use super::NuclearChannel;
use crate::error::{Error, Result};
use crate::quat::{exp_pure, PureAxis, Quaternion};

/// Composed operators below this norm are treated as total absorption.
pub const MIN_OPERATOR_NORM: f64 = 1e-300;

/// A plate of thickness `L` with `n` scatterers per unit volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabSpec {
    pub channel: NuclearChannel,
    /// Number density, barn^(-3/2).
    pub density: f64,
    /// Thickness, √barn.
    pub thickness: f64,
    /// Imaginary direction of this material's phase; `i` is complex theory.
    pub axis: PureAxis,
    /// Surface transmission coefficient in (0, 1].
    pub transmission: f64,
}

impl SlabSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(Error::InvalidInput(format!(
                "density must be positive, got {}",
                self.density
            )));
        }
        if !(self.thickness.is_finite() && self.thickness > 0.0) {
            return Err(Error::InvalidInput(format!(
                "thickness must be positive, got {}",
                self.thickness
            )));
        }
        check_transmission(self.transmission)
    }
}

fn check_transmission(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "transmission must lie in (0, 1], got {t}"
        )))
    }
}

/// Macroscopic phase of a slab: `optical` is the real part (radians of
/// optical path), `attenuation` the imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabPhase {
    pub optical: f64,
    pub attenuation: f64,
    pub axis: PureAxis,
}

impl SlabPhase {
    pub fn new(optical: f64, attenuation: f64, axis: PureAxis) -> Result<Self> {
        if !optical.is_finite() {
            return Err(Error::InvalidInput("optical phase must be finite".into()));
        }
        if !(attenuation.is_finite() && attenuation >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "attenuation must be nonnegative, got {attenuation}"
            )));
        }
        Ok(Self {
            optical,
            attenuation,
            axis,
        })
    }

    pub fn from_degrees(optical_deg: f64, attenuation: f64, axis: PureAxis) -> Result<Self> {
        Self::new(optical_deg.to_radians(), attenuation, axis)
    }

    /// Both parts multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            optical: self.optical * factor,
            attenuation: self.attenuation * factor,
            axis: self.axis,
        }
    }
}

/// A slab in the beam: its phase and surface transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slab {
    pub phase: SlabPhase,
    pub transmission: f64,
}

impl Slab {
    pub fn new(phase: SlabPhase, transmission: f64) -> Result<Self> {
        check_transmission(transmission)?;
        Ok(Self {
            phase,
            transmission,
        })
    }
}

/// `Δ = [η sin 2δ + i(1 − η cos 2δ)] πnL/k²`.
pub fn slab_phase(slab: &SlabSpec) -> Result<SlabPhase> {
    slab.validate()?;
    let ch = &slab.channel;
    let scale = PI * slab.density * slab.thickness / (ch.k() * ch.k());
    let (s2, c2) = (2.0 * ch.delta()).sin_cos();
    SlabPhase::new(
        ch.eta() * s2 * scale,
        (1.0 - ch.eta() * c2) * scale,
        slab.axis,
    )
}

/// `T e^{−Im Δ} exp(axis · Re Δ)`, which is `T e^{iΔ}` when the axis is `i`.
pub fn slab_operator(p: &SlabPhase, transmission: f64) -> Result<Quaternion> {
    check_transmission(transmission)?;
    let gain = transmission * (-p.attenuation).exp();
    Ok(exp_pure(p.axis, p.optical).get().scale(gain))
}

/// Product of slab operators in traversal order. The state is acted on from
/// the left, so the first slab traversed is the rightmost factor:
/// `[s₁, s₂, s₃] ↦ S₃·S₂·S₁`.
pub fn compose_slabs(ordered: &[Slab]) -> Result<Quaternion> {
    if ordered.is_empty() {
        return Err(Error::InvalidInput("no slabs to compose".into()));
    }
    let mut acc = Quaternion::ONE;
    for s in ordered {
        acc = slab_operator(&s.phase, s.transmission)? * acc;
    }
    Ok(acc)
}

/// 4-D angle between `compose([a, b])` and `compose([b, a])`; zero means
/// swapping the two slabs has no observable effect.
pub fn order_discrepancy(a: &Slab, b: &Slab) -> Result<f64> {
    let ab = compose_slabs(&[*a, *b])?;
    let ba = compose_slabs(&[*b, *a])?;
    for q in [ab, ba] {
        let n = q.norm();
        if n.is_nan() || n < MIN_OPERATOR_NORM {
            return Err(Error::DegenerateOperator(n));
        }
    }
    Ok(ab.angle_between(ba))
}

/// Signed rotation angle of `q` about `axis`: `atan2(v·axis, w)`.
pub fn phase_about(q: Quaternion, axis: PureAxis) -> f64 {
    let [x, y, z] = axis.components();
    (q.x * x + q.y * y + q.z * z).atan2(q.w)
}
