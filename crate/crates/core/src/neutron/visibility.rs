//! Fringe contrast for a polychromatic beam.
//!
//! The wave number is Gaussian, `k = k₀(1 + s·z)` with `z ~ N(0, 1)`, and
//! slab phases scale as `Δ(k) = Δ(k₀)(k₀/k)²`. The complex visibility is the
//! spectrally averaged slab-path operator normalized by the averaged
//! transmitted amplitude, so a monochromatic beam always gives 1.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::hermite::GaussHermite;
use serde::Serialize;

use super::slab::{compose_slabs, phase_about, Slab};
use crate::error::{Error, Result};
use crate::quat::{PureAxis, Quaternion};

pub const MIN_QUADRATURE_NODES: usize = 64;

/// Gauss–Hermite `(node, weight)` pairs, computed once per node count.
type Rule = Arc<Vec<(f64, f64)>>;

fn hermite_rule(nodes: usize) -> Rule {
    static RULES: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let mut rules = RULES
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    rules
        .entry(nodes)
        .or_insert_with(|| {
            let rule = GaussHermite::new(NonZeroUsize::new(nodes).expect("nodes > 0"));
            Arc::new(rule.iter().map(|(x, w)| (*x, *w)).collect())
        })
        .clone()
}

/// Gaussian wave-number distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spectrum {
    /// Mean wave number (any unit; only ratios `k₀/k` enter).
    pub k0: f64,
    /// Relative standard deviation `s = σ_k / k₀`.
    pub relative_spread: f64,
    pub nodes: usize,
}

impl Spectrum {
    pub fn new(k0: f64, relative_spread: f64) -> Self {
        Self {
            k0,
            relative_spread,
            nodes: MIN_QUADRATURE_NODES,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.k0.is_finite() && self.k0 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "k0 must be positive, got {}",
                self.k0
            )));
        }
        if !(self.relative_spread.is_finite() && (0.0..0.5).contains(&self.relative_spread)) {
            return Err(Error::InvalidInput(format!(
                "relative spread must lie in [0, 0.5), got {}",
                self.relative_spread
            )));
        }
        if self.nodes < MIN_QUADRATURE_NODES {
            return Err(Error::InvalidInput(format!(
                "at least {MIN_QUADRATURE_NODES} quadrature nodes required, got {}",
                self.nodes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fringe {
    /// `|⟨S⟩| / ⟨|S|⟩` in [0, 1].
    pub visibility: f64,
    /// Fringe phase about the reference axis, radians.
    pub phase: f64,
    /// `⟨S⟩ / ⟨|S|⟩`.
    pub mean_operator: Quaternion,
}

/// Visibility and phase of the fringes between the slab path and an empty
/// reference path. `reference_axis` is the imaginary unit of the phase
/// shifter used to scan the fringes (normally `i`).
///
/// Nodes whose wave number would be nonpositive are dropped and the weights
/// renormalized; for spreads of a few percent their weight is below 1e-40.
pub fn fringe_visibility(
    slabs: &[Slab],
    spectrum: &Spectrum,
    reference_axis: PureAxis,
) -> Result<Fringe> {
    spectrum.validate()?;
    if slabs.is_empty() {
        return Err(Error::InvalidInput("no slabs in the beam".into()));
    }

    let rule = hermite_rule(spectrum.nodes);
    let mut sum = Quaternion::ZERO;
    let mut norm_sum = 0.0;
    let mut weight_sum = 0.0;
    let mut scaled = slabs.to_vec();
    for &(x, w) in rule.iter() {
        // ∫ e^{-x²} f(x) dx with z = √2·x is the standard normal average.
        let ratio = 1.0 + spectrum.relative_spread * std::f64::consts::SQRT_2 * x;
        if ratio <= 0.0 {
            continue;
        }
        let factor = 1.0 / (ratio * ratio);
        for (dst, src) in scaled.iter_mut().zip(slabs) {
            dst.phase = src.phase.scaled(factor);
        }
        let op = compose_slabs(&scaled)?;
        sum = sum + op.scale(w);
        norm_sum += w * op.norm();
        weight_sum += w;
    }
    if !(weight_sum > 0.0 && norm_sum > 0.0) {
        return Err(Error::DegenerateOperator(norm_sum));
    }
    let mean_operator = sum.scale(1.0 / norm_sum);
    Ok(Fringe {
        visibility: mean_operator.norm().min(1.0),
        phase: phase_about(mean_operator, reference_axis),
        mean_operator,
    })
}
