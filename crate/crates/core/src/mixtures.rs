//! Ensemble-averaged interference for unpolarized or otherwise mixed beams.
//!
//! Only weighted averages of cross sections are observable for a mixture, so
//! the averaged cosine `⟨γ⟩` is built from `⟨σ₁⟩`, `⟨σ₂⟩` and `⟨σ₁₂⟩`. It is not
//! the cosine of any phase difference unless the cross sections do not depend
//! on the component, which is why three-scatterer verdicts on averaged data
//! are withheld unless that condition is asserted and checked.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::{
    classify, cosine_triple, cross_section, f_statistic, gamma_from_sigmas, pair_cross_section,
    Amplitude, CosineTriple, CrossSectionSet, TheoryVerdict,
};

/// Tolerance on `Σ weights = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Relative tolerance used when checking that cross sections do not depend on
/// the ensemble component.
pub const SPIN_INDEPENDENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleComponent {
    pub weight: f64,
    pub amp1: Amplitude,
    pub amp2: Amplitude,
}

/// One ensemble component of a three-scatterer experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleComponent {
    pub weight: f64,
    pub amps: [Amplitude; 3],
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for w in weights {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidInput(format!(
                "ensemble weight {w} outside [0, 1]"
            )));
        }
        sum += w;
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty ensemble".into()));
    }
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidInput(format!(
            "ensemble weights sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// `⟨γ⟩ = (⟨σ₁₂⟩ − ⟨σ₁⟩ − ⟨σ₂⟩) / 2√(⟨σ₁⟩⟨σ₂⟩)`.
pub fn averaged_gamma(ensemble: &[EnsembleComponent]) -> Result<f64> {
    check_weights(ensemble.iter().map(|c| c.weight))?;
    let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
    for c in ensemble {
        s1 += c.weight * cross_section(&c.amp1);
        s2 += c.weight * cross_section(&c.amp2);
        s12 += c.weight * pair_cross_section(&c.amp1, &c.amp2);
    }
    gamma_from_sigmas(s1, s2, s12)
}

/// Weighted average of the seven cross sections over the ensemble.
pub fn averaged_cross_sections(ensemble: &[TripleComponent]) -> Result<CrossSectionSet> {
    check_weights(ensemble.iter().map(|c| c.weight))?;
    let mut avg = CrossSectionSet {
        sigma123: Some(0.0),
        ..Default::default()
    };
    for c in ensemble {
        let s = CrossSectionSet::from_amplitudes(&c.amps);
        avg.sigma1 += c.weight * s.sigma1;
        avg.sigma2 += c.weight * s.sigma2;
        avg.sigma3 += c.weight * s.sigma3;
        avg.sigma12 += c.weight * s.sigma12;
        avg.sigma23 += c.weight * s.sigma23;
        avg.sigma31 += c.weight * s.sigma31;
        avg.sigma123 = Some(avg.sigma123.unwrap_or(0.0) + c.weight * s.sigma123.unwrap_or(0.0));
    }
    Ok(avg)
}

/// Whether the ensemble is observationally a pure state: every component
/// produces the same seven cross sections (relative tolerance
/// [`SPIN_INDEPENDENCE_TOL`]).
pub fn is_spin_independent(ensemble: &[TripleComponent]) -> bool {
    let Some(first) = ensemble.first() else {
        return true;
    };
    let reference = CrossSectionSet::from_amplitudes(&first.amps);
    ensemble.iter().all(|c| {
        let s = CrossSectionSet::from_amplitudes(&c.amps);
        crate::interference::Channel::ALL.iter().all(|ch| {
            let (a, r) = (s.get(*ch).unwrap_or(0.0), reference.get(*ch).unwrap_or(0.0));
            (a - r).abs() <= SPIN_INDEPENDENCE_TOL * r.abs().max(1.0)
        })
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureAssessment {
    pub set: CrossSectionSet,
    pub cosines: CosineTriple,
    pub f_value: f64,
    /// True only when the cross sections are component-independent.
    pub probative: bool,
    /// Present only when `probative`.
    pub verdict: Option<TheoryVerdict>,
}

/// Averaged cosines and `F` for a mixed beam.
///
/// `F` is always reported. A verdict is produced only when the caller asserts
/// spin independence and the ensemble actually satisfies it; asserting it for
/// an ensemble that violates it is an error.
pub fn assess_mixture(
    ensemble: &[TripleComponent],
    spin_independent: bool,
    tol: Option<f64>,
) -> Result<MixtureAssessment> {
    let set = averaged_cross_sections(ensemble)?;
    let cosines = cosine_triple(&set)?;
    let f_value = f_statistic(&cosines);
    let verdict = if spin_independent {
        if !is_spin_independent(ensemble) {
            return Err(Error::InvalidInput(
                "spin independence asserted but cross sections differ between components".into(),
            ));
        }
        Some(classify(&cosines, tol)?)
    } else {
        None
    };
    Ok(MixtureAssessment {
        set,
        cosines,
        f_value,
        probative: verdict.is_some(),
        verdict,
    })
}
