//! Coherent cross sections of up to three scatterers and the observables
//! built from them.
//!
//! Pair bookkeeping used throughout:
//!
//! | cosine | pair  | cross sections used   |
//! |--------|-------|-----------------------|
//! | `γ`    | (1,2) | `σ₁`, `σ₂`, `σ₁₂`     |
//! | `α`    | (2,3) | `σ₂`, `σ₃`, `σ₂₃`     |
//! | `β`    | (3,1) | `σ₃`, `σ₁`, `σ₃₁`     |
//!
//! Swapping any of these silently breaks `F = 1` for complex amplitudes.

mod fit;
mod realize;

pub use fit::{fit_amplitudes, FitResult};
pub use realize::{gram_matrix, realize_from_cosines, REALIZABILITY_TOL};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{Quaternion, UnitQuaternion};

/// Floor for the default classification tolerance.
pub const MIN_CLASSIFY_TOL: f64 = 1e-9;

/// A scattering amplitude `a·u` with magnitude `a` in √barn and a unit
/// quaternion direction `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitude {
    magnitude: f64,
    direction: UnitQuaternion,
}

impl Amplitude {
    pub fn new(magnitude: f64, direction: UnitQuaternion) -> Result<Self> {
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "amplitude magnitude must be finite and nonnegative, got {magnitude}"
            )));
        }
        Ok(Self {
            magnitude,
            direction,
        })
    }

    /// The complex amplitude `a·exp(iφ)`.
    pub fn complex(magnitude: f64, phase: f64) -> Result<Self> {
        Self::new(magnitude, UnitQuaternion::from_phase(phase))
    }

    /// Splits a quaternion into magnitude and direction. The zero quaternion
    /// maps to magnitude 0 with direction 1.
    pub fn from_quaternion(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if n == 0.0 {
            return Self::new(0.0, UnitQuaternion::ONE);
        }
        Self::new(n, UnitQuaternion::new(q)?)
    }

    #[inline]
    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    #[inline]
    pub fn direction(&self) -> UnitQuaternion {
        self.direction
    }

    /// `a·u` as a quaternion.
    #[inline]
    pub fn value(&self) -> Quaternion {
        self.direction.get().scale(self.magnitude)
    }

    /// Same magnitude, direction multiplied on the left by `g`.
    pub fn rotated_left(&self, g: UnitQuaternion) -> Self {
        Self {
            magnitude: self.magnitude,
            direction: g.compose(self.direction),
        }
    }
}

/// `σ = a²` in barn.
pub fn cross_section(amp: &Amplitude) -> f64 {
    amp.magnitude * amp.magnitude
}

/// `|a₁u₁ + a₂u₂|² = σ₁ + σ₂ + 2a₁a₂ (u₁·u₂)`, double scattering neglected.
pub fn pair_cross_section(amp1: &Amplitude, amp2: &Amplitude) -> f64 {
    cross_section(amp1)
        + cross_section(amp2)
        + 2.0 * amp1.magnitude * amp2.magnitude * amp1.direction.dot4(amp2.direction)
}

/// `(σ₁₂ − σ₁ − σ₂) / 2√(σ₁σ₂)`.
pub fn gamma_from_sigmas(sigma1: f64, sigma2: f64, sigma12: f64) -> Result<f64> {
    check_single(sigma1, "first")?;
    check_single(sigma2, "second")?;
    Ok((sigma12 - sigma1 - sigma2) / (2.0 * (sigma1 * sigma2).sqrt()))
}

fn check_single(sigma: f64, which: &str) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateScatterer(format!(
            "{which} single cross section is {sigma}; the cosine is undefined"
        )))
    }
}

/// Identifies one observable of a three-scatterer experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    S1,
    S2,
    S3,
    S12,
    S23,
    S31,
    S123,
}

impl Channel {
    pub const ALL: [Channel; 7] = [
        Channel::S1,
        Channel::S2,
        Channel::S3,
        Channel::S12,
        Channel::S23,
        Channel::S31,
        Channel::S123,
    ];
    /// The six channels every measurement needs.
    pub const REQUIRED: [Channel; 6] = [
        Channel::S1,
        Channel::S2,
        Channel::S3,
        Channel::S12,
        Channel::S23,
        Channel::S31,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Channel::S1 => "1",
            Channel::S2 => "2",
            Channel::S3 => "3",
            Channel::S12 => "12",
            Channel::S23 => "23",
            Channel::S31 => "31",
            Channel::S123 => "123",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Channel::ALL.into_iter().find(|c| c.id() == id)
    }

    #[inline]
    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// The coherent cross sections (barn) of three scatterers taken singly and in
/// pairs, optionally all three together, each with an optional standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CrossSectionSet {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub sigma12: f64,
    pub sigma23: f64,
    pub sigma31: f64,
    pub sigma123: Option<f64>,
    /// Standard errors indexed in [`Channel::ALL`] order.
    pub errors: [Option<f64>; 7],
}

impl CrossSectionSet {
    pub fn new(singles: [f64; 3], pairs: [f64; 3]) -> Result<Self> {
        let set = Self {
            sigma1: singles[0],
            sigma2: singles[1],
            sigma3: singles[2],
            sigma12: pairs[0],
            sigma23: pairs[1],
            sigma31: pairs[2],
            sigma123: None,
            errors: [None; 7],
        };
        set.validate()?;
        Ok(set)
    }

    /// Exact cross sections produced by three amplitudes, including `σ₁₂₃`
    /// from the direct three-term sum.
    pub fn from_amplitudes(amps: &[Amplitude; 3]) -> Self {
        let [a1, a2, a3] = amps;
        Self {
            sigma1: cross_section(a1),
            sigma2: cross_section(a2),
            sigma3: cross_section(a3),
            sigma12: pair_cross_section(a1, a2),
            sigma23: pair_cross_section(a2, a3),
            sigma31: pair_cross_section(a3, a1),
            sigma123: Some((a1.value() + a2.value() + a3.value()).norm_squared()),
            errors: [None; 7],
        }
    }

    pub fn get(&self, ch: Channel) -> Option<f64> {
        match ch {
            Channel::S1 => Some(self.sigma1),
            Channel::S2 => Some(self.sigma2),
            Channel::S3 => Some(self.sigma3),
            Channel::S12 => Some(self.sigma12),
            Channel::S23 => Some(self.sigma23),
            Channel::S31 => Some(self.sigma31),
            Channel::S123 => self.sigma123,
        }
    }

    pub fn set(&mut self, ch: Channel, value: f64) {
        match ch {
            Channel::S1 => self.sigma1 = value,
            Channel::S2 => self.sigma2 = value,
            Channel::S3 => self.sigma3 = value,
            Channel::S12 => self.sigma12 = value,
            Channel::S23 => self.sigma23 = value,
            Channel::S31 => self.sigma31 = value,
            Channel::S123 => self.sigma123 = Some(value),
        }
    }

    #[inline]
    pub fn error(&self, ch: Channel) -> Option<f64> {
        self.errors[ch.index()]
    }

    #[inline]
    pub fn set_error(&mut self, ch: Channel, err: Option<f64>) {
        self.errors[ch.index()] = err;
    }

    pub fn has_errors(&self) -> bool {
        self.errors.iter().any(Option::is_some)
    }

    /// Present entries and errors must be finite and nonnegative.
    pub fn validate(&self) -> Result<()> {
        for ch in Channel::ALL {
            if let Some(v) = self.get(ch) {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Value(format!(
                        "cross section {ch} = {v} is not a nonnegative number"
                    )));
                }
            }
            if let Some(e) = self.error(ch) {
                if !(e.is_finite() && e >= 0.0) {
                    return Err(Error::Value(format!(
                        "error on {ch} = {e} is not a nonnegative number"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `(α, β, γ)` with an optional 3×3 covariance matrix in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub covariance: Option<[[f64; 3]; 3]>,
}

impl CosineTriple {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            covariance: None,
        }
    }

    /// Attaches independent standard errors.
    pub fn with_std_errors(mut self, errs: [f64; 3]) -> Self {
        let mut cov = [[0.0; 3]; 3];
        for (i, e) in errs.into_iter().enumerate() {
            cov[i][i] = e * e;
        }
        self.covariance = Some(cov);
        self
    }

    #[inline]
    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn std_errors(&self) -> Option<[f64; 3]> {
        self.covariance
            .map(|c| [c[0][0].sqrt(), c[1][1].sqrt(), c[2][2].sqrt()])
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Gradient of `γ = (σ₁₂ − σ₁ − σ₂)/2√(σ₁σ₂)` with respect to `(σ₁, σ₂, σ₁₂)`.
fn gamma_gradient(s1: f64, s2: f64, gamma: f64) -> [f64; 3] {
    let d = 2.0 * (s1 * s2).sqrt();
    [
        -1.0 / d - gamma / (2.0 * s1),
        -1.0 / d - gamma / (2.0 * s2),
        1.0 / d,
    ]
}

/// `(α, β, γ)` from a measured set. When the set carries errors, the
/// covariance of the three cosines is propagated to first order; missing
/// errors count as zero. The cosines share single cross sections, so the
/// off-diagonal terms are kept.
pub fn cosine_triple(set: &CrossSectionSet) -> Result<CosineTriple> {
    set.validate()?;
    check_single(set.sigma1, "scatterer 1")?;
    check_single(set.sigma2, "scatterer 2")?;
    check_single(set.sigma3, "scatterer 3")?;

    let alpha = gamma_from_sigmas(set.sigma2, set.sigma3, set.sigma23)?;
    let beta = gamma_from_sigmas(set.sigma3, set.sigma1, set.sigma31)?;
    let gamma = gamma_from_sigmas(set.sigma1, set.sigma2, set.sigma12)?;
    let mut t = CosineTriple::new(alpha, beta, gamma);

    if set.has_errors() {
        use Channel::*;
        let var: [f64; 6] =
            [S1, S2, S3, S12, S23, S31].map(|c| set.error(c).unwrap_or(0.0).powi(2));
        // Jacobian rows: α, β, γ; columns: σ₁ σ₂ σ₃ σ₁₂ σ₂₃ σ₃₁.
        let mut jac = [[0.0; 6]; 3];
        let [a2, a3, a23] = gamma_gradient(set.sigma2, set.sigma3, alpha);
        jac[0][1] = a2;
        jac[0][2] = a3;
        jac[0][4] = a23;
        let [b3, b1, b31] = gamma_gradient(set.sigma3, set.sigma1, beta);
        jac[1][2] = b3;
        jac[1][0] = b1;
        jac[1][5] = b31;
        let [g1, g2, g12] = gamma_gradient(set.sigma1, set.sigma2, gamma);
        jac[2][0] = g1;
        jac[2][1] = g2;
        jac[2][3] = g12;

        let mut cov = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                cov[r][c] = (0..6).map(|k| jac[r][k] * var[k] * jac[c][k]).sum();
            }
        }
        t.covariance = Some(cov);
    }
    Ok(t)
}

/// `F(α, β, γ) = α² + β² + γ² − 2αβγ`.
pub fn f_statistic(t: &CosineTriple) -> f64 {
    let (a, b, g) = (t.alpha, t.beta, t.gamma);
    a * a + b * b + g * g - 2.0 * a * b * g
}

/// `∇F = (2α − 2βγ, 2β − 2αγ, 2γ − 2αβ)`.
pub fn f_gradient(t: &CosineTriple) -> [f64; 3] {
    let (a, b, g) = (t.alpha, t.beta, t.gamma);
    [2.0 * (a - b * g), 2.0 * (b - a * g), 2.0 * (g - a * b)]
}

/// `F` and, when the triple has a covariance, its first-order standard error.
pub fn f_with_error(t: &CosineTriple) -> (f64, Option<f64>) {
    let f = f_statistic(t);
    let err = t.covariance.map(|cov| {
        let g = f_gradient(t);
        let mut var = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                var += g[r] * cov[r][c] * g[c];
            }
        }
        var.max(0.0).sqrt()
    });
    (f, err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoryClass {
    RealAdmissible,
    ComplexAdmissible,
    QuaternionAdmissible,
    SuperpositionViolation,
}

impl fmt::Display for TheoryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoryClass::RealAdmissible => "REAL_ADMISSIBLE",
            TheoryClass::ComplexAdmissible => "COMPLEX_ADMISSIBLE",
            TheoryClass::QuaternionAdmissible => "QUATERNION_ADMISSIBLE",
            TheoryClass::SuperpositionViolation => "SUPERPOSITION_VIOLATION",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryVerdict {
    pub f_value: f64,
    pub f_error: Option<f64>,
    pub class: TheoryClass,
    pub tolerance: f64,
}

/// Default tolerance: `max(3·σ_F, 1e-9)`.
pub fn default_tolerance(f_error: Option<f64>) -> f64 {
    f_error.map_or(MIN_CLASSIFY_TOL, |e| (3.0 * e).max(MIN_CLASSIFY_TOL))
}

/// Sorts a cosine triple into one of the four theory classes.
///
/// Rules, in order:
/// 1. every cosine within `tol` of ±1 and `|F − 1| ≤ tol` → real;
/// 2. any `|cosine| > 1 + tol` → superposition violated;
/// 3. `|F − 1| ≤ tol` → complex;
/// 4. `−tol ≤ F < 1 − tol` → quaternionic;
/// 5. otherwise (`F > 1 + tol` or `F < −tol`) → superposition violated.
///
/// `tol = None` uses [`default_tolerance`].
pub fn classify(t: &CosineTriple, tol: Option<f64>) -> Result<TheoryVerdict> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite cosines {:?}",
            t.as_array()
        )));
    }
    let (f, f_error) = f_with_error(t);
    let tol = match tol {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {v}"
            )))
        }
        None => default_tolerance(f_error),
    };
    let cos = t.as_array();
    let near_unit = cos.iter().all(|c| (c.abs() - 1.0).abs() <= tol);
    let class = if near_unit && (f - 1.0).abs() <= tol {
        TheoryClass::RealAdmissible
    } else if cos.iter().any(|c| c.abs() > 1.0 + tol) {
        TheoryClass::SuperpositionViolation
    } else if (f - 1.0).abs() <= tol {
        TheoryClass::ComplexAdmissible
    } else if f < 1.0 - tol && f >= -tol {
        TheoryClass::QuaternionAdmissible
    } else {
        TheoryClass::SuperpositionViolation
    };
    Ok(TheoryVerdict {
        f_value: f,
        f_error,
        class,
        tolerance: tol,
    })
}

/// `σ₁₂₃` predicted from singles and pairs, and the residual against a
/// measured `σ₁₂₃` when one is present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriplePrediction {
    pub predicted: f64,
    pub residual: Option<f64>,
}

/// `σ₁₂₃ = σ₁₂ + σ₂₃ + σ₃₁ − σ₁ − σ₂ − σ₃`, valid for any amplitude algebra.
pub fn triple_cross_section(set: &CrossSectionSet) -> Result<TriplePrediction> {
    set.validate()?;
    let predicted = set.sigma12 + set.sigma23 + set.sigma31 - set.sigma1 - set.sigma2 - set.sigma3;
    Ok(TriplePrediction {
        predicted,
        residual: set.sigma123.map(|m| m - predicted),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{exp_pure, PureAxis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn unit(axis: PureAxis, angle: f64) -> UnitQuaternion {
        exp_pure(axis, angle)
    }

    #[test]
    fn cross_section_examples() {
        assert_eq!(
            cross_section(&Amplitude::new(1.0, UnitQuaternion::ONE).unwrap()),
            1.0
        );
        assert_eq!(
            cross_section(&Amplitude::new(3.0, UnitQuaternion::K).unwrap()),
            9.0
        );
        let u = unit(PureAxis::new(1.0, 1.0, 0.0).unwrap(), 1.1);
        let amp = Amplitude::new(2f64.sqrt(), u).unwrap();
        // oracle: squared quaternion norm of a·u
        assert!((amp.value().norm_squared() - 2.0).abs() < 1e-15);
        assert!((cross_section(&amp) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pair_examples() {
        let one = Amplitude::new(1.0, UnitQuaternion::ONE).unwrap();
        assert_eq!(pair_cross_section(&one, &one), 4.0);
        let i = Amplitude::new(1.0, UnitQuaternion::I).unwrap();
        assert_eq!(pair_cross_section(&one, &i), 2.0);
        let b = Amplitude::new(2.0, unit(PureAxis::J, FRAC_PI_3)).unwrap();
        // 1 + 4 + 2·1·2·cos60°
        assert!((pair_cross_section(&one, &b) - 7.0).abs() < 1e-14);
        assert!(((one.value() + b.value()).norm_squared() - 7.0).abs() < 1e-14);
    }

    #[test]
    fn pair_reduces_to_complex_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (a1, a2) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
            let (p1, p2) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            let s = pair_cross_section(
                &Amplitude::complex(a1, p1).unwrap(),
                &Amplitude::complex(a2, p2).unwrap(),
            );
            let (s1, s2): (f64, f64) = (a1 * a1, a2 * a2);
            let expected = s1 + s2 + 2.0 * (s1 * s2).sqrt() * (p1 - p2).cos();
            assert!((s - expected).abs() < 1e-12 * (s1 + s2));
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_from_sigmas(1.0, 1.0, 4.0).unwrap(), 1.0);
        assert_eq!(gamma_from_sigmas(1.0, 1.0, 2.0).unwrap(), 0.0);
        assert!((gamma_from_sigmas(1.0, 4.0, 7.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            gamma_from_sigmas(0.0, 1.0, 1.0),
            Err(Error::DegenerateScatterer(_))
        ));
        assert!(matches!(
            gamma_from_sigmas(1.0, -2.0, 1.0),
            Err(Error::DegenerateScatterer(_))
        ));
    }

    fn uniform_set(pair: f64) -> CrossSectionSet {
        CrossSectionSet::new([1.0; 3], [pair; 3]).unwrap()
    }

    #[test]
    fn cosine_triple_examples() {
        let t = cosine_triple(&uniform_set(2.0)).unwrap();
        assert_eq!(t.as_array(), [0.0, 0.0, 0.0]);
        let t = cosine_triple(&uniform_set(4.0)).unwrap();
        assert_eq!(t.as_array(), [1.0, 1.0, 1.0]);

        let phases = [0.0, FRAC_PI_3, FRAC_PI_2];
        let amps = phases.map(|p| Amplitude::complex(1.0, p).unwrap());
        let t = cosine_triple(&CrossSectionSet::from_amplitudes(&amps)).unwrap();
        // α = cos(φ₂−φ₃), β = cos(φ₃−φ₁), γ = cos(φ₁−φ₂)
        let oracle = [
            (phases[1] - phases[2]).cos(),
            (phases[2] - phases[0]).cos(),
            (phases[0] - phases[1]).cos(),
        ];
        for (got, want) in t.as_array().iter().zip(oracle) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((t.alpha - 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!(t.beta.abs() < 1e-12);
        assert!((t.gamma - 0.5).abs() < 1e-12);

        let mut bad = uniform_set(2.0);
        bad.sigma3 = 0.0;
        assert!(matches!(
            cosine_triple(&bad),
            Err(Error::DegenerateScatterer(_))
        ));
    }

    #[test]
    fn error_propagation_matches_finite_differences() {
        let amps = [
            Amplitude::complex(1.0, 0.2).unwrap(),
            Amplitude::complex(1.5, 1.1).unwrap(),
            Amplitude::complex(0.8, -0.7).unwrap(),
        ];
        let base = CrossSectionSet::from_amplitudes(&amps);
        let mut with_err = base;
        let errs = [0.01, 0.02, 0.015, 0.03, 0.01, 0.02];
        for (ch, e) in Channel::REQUIRED.iter().zip(errs) {
            with_err.set_error(*ch, Some(e));
        }
        let t = cosine_triple(&with_err).unwrap();
        let cov = t.covariance.unwrap();

        // central differences of each cosine in each σ
        let h = 1e-6;
        let mut jac = [[0.0; 6]; 3];
        for (k, ch) in Channel::REQUIRED.iter().enumerate() {
            let mut up = base;
            let mut dn = base;
            up.set(*ch, base.get(*ch).unwrap() + h);
            dn.set(*ch, base.get(*ch).unwrap() - h);
            let (tu, td) = (cosine_triple(&up).unwrap(), cosine_triple(&dn).unwrap());
            for (r, row) in jac.iter_mut().enumerate() {
                row[k] = (tu.as_array()[r] - td.as_array()[r]) / (2.0 * h);
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                let fd: f64 = (0..6)
                    .map(|k| jac[r][k] * errs[k] * errs[k] * jac[c][k])
                    .sum();
                assert!(
                    (cov[r][c] - fd).abs() < 1e-8 * (1.0 + fd.abs()),
                    "cov[{r}][{c}] {} vs {fd}",
                    cov[r][c]
                );
            }
        }

        // σ_F against finite differences of F directly in σ space
        let (_, ferr) = f_with_error(&t);
        let mut var = 0.0;
        for (k, ch) in Channel::REQUIRED.iter().enumerate() {
            let mut up = base;
            let mut dn = base;
            up.set(*ch, base.get(*ch).unwrap() + h);
            dn.set(*ch, base.get(*ch).unwrap() - h);
            let d = (f_statistic(&cosine_triple(&up).unwrap())
                - f_statistic(&cosine_triple(&dn).unwrap()))
                / (2.0 * h);
            var += d * d * errs[k] * errs[k];
        }
        assert!((ferr.unwrap() - var.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_statistic(&CosineTriple::new(1.0, 1.0, 1.0)), 1.0);
        assert_eq!(f_statistic(&CosineTriple::new(0.0, 0.0, 0.0)), 0.0);
        let t = CosineTriple::new(
            (FRAC_PI_3 - FRAC_PI_2).cos(),
            (FRAC_PI_2).cos(),
            (FRAC_PI_3).cos(),
        );
        assert!((f_statistic(&t) - 1.0).abs() < 1e-15);
        assert!((f_statistic(&CosineTriple::new(0.86603, 0.0, 0.5)) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn f_gradient_matches_finite_differences() {
        let t = CosineTriple::new(0.3, -0.4, 0.7);
        let g = f_gradient(&t);
        let h = 1e-6;
        for k in 0..3 {
            let mut up = t.as_array();
            let mut dn = t.as_array();
            up[k] += h;
            dn[k] -= h;
            let fu = f_statistic(&CosineTriple::new(up[0], up[1], up[2]));
            let fd = f_statistic(&CosineTriple::new(dn[0], dn[1], dn[2]));
            assert!((g[k] - (fu - fd) / (2.0 * h)).abs() < 1e-8);
        }
    }

    /// A triple with prescribed F: α = β = 0 gives F = γ².
    fn triple_with_f(f: f64) -> CosineTriple {
        CosineTriple::new(0.0, 0.0, f.sqrt())
    }

    #[test]
    fn classify_examples() {
        let v = classify(&CosineTriple::new(1.0, 1.0, 1.0), None).unwrap();
        assert_eq!(v.class, TheoryClass::RealAdmissible);
        let v = classify(&CosineTriple::new(-1.0, 1.0, -1.0), Some(1e-6)).unwrap();
        assert_eq!(v.class, TheoryClass::RealAdmissible);

        let v = classify(&triple_with_f(0.3), Some(1e-3)).unwrap();
        assert!((v.f_value - 0.3).abs() < 1e-15);
        assert_eq!(v.class, TheoryClass::QuaternionAdmissible);

        let v = classify(&triple_with_f(1.2), Some(1e-3)).unwrap();
        assert_eq!(v.class, TheoryClass::SuperpositionViolation);

        let v = classify(
            &CosineTriple::new(0.866_025_403_784_438_6, 0.0, 0.5),
            Some(1e-6),
        )
        .unwrap();
        assert_eq!(v.class, TheoryClass::ComplexAdmissible);
    }

    #[test]
    fn classify_edge_cases() {
        // sign pattern with αβγ = −1 cannot come from real amplitudes: F = 5
        let v = classify(&CosineTriple::new(1.0, 1.0, -1.0), Some(1e-6)).unwrap();
        assert_eq!(v.f_value, 5.0);
        assert_eq!(v.class, TheoryClass::SuperpositionViolation);

        // |α| > 1 even though F happens to equal 1
        let v = classify(&CosineTriple::new(1.2, 1.2, 1.0), Some(1e-6)).unwrap();
        assert!((v.f_value - 1.0).abs() < 1e-12);
        assert_eq!(v.class, TheoryClass::SuperpositionViolation);

        // F(c, c, c) = 3c² − 2c³ is negative only for c > 1.5
        let v = classify(&CosineTriple::new(2.0, 2.0, 2.0), Some(1e-6)).unwrap();
        assert_eq!(v.f_value, -4.0);
        assert!(v.f_value < 0.0);
        assert_eq!(v.class, TheoryClass::SuperpositionViolation);

        // default tolerance floor and error scaling
        let v = classify(&CosineTriple::new(0.5, 0.5, 0.5), None).unwrap();
        assert_eq!(v.tolerance, MIN_CLASSIFY_TOL);
        let t = CosineTriple::new(0.0, 0.0, 0.999).with_std_errors([0.01, 0.01, 0.01]);
        let v = classify(&t, None).unwrap();
        assert!((v.f_error.unwrap() - 2.0 * 0.999 * 0.01).abs() < 1e-12);
        assert!((v.tolerance - 3.0 * v.f_error.unwrap()).abs() < 1e-15);
        assert_eq!(v.class, TheoryClass::ComplexAdmissible);

        assert!(classify(&CosineTriple::new(0.1, 0.1, 0.1), Some(0.0)).is_err());
        assert!(classify(&CosineTriple::new(f64::NAN, 0.1, 0.1), None).is_err());
    }

    #[test]
    fn triple_examples() {
        assert_eq!(
            triple_cross_section(&uniform_set(2.0)).unwrap().predicted,
            3.0
        );
        assert_eq!(
            triple_cross_section(&uniform_set(4.0)).unwrap().predicted,
            9.0
        );

        let amps = [0.0, FRAC_PI_3, FRAC_PI_2].map(|p| Amplitude::complex(1.0, p).unwrap());
        let set = CrossSectionSet::from_amplitudes(&amps);
        let direct = (amps[0].value() + amps[1].value() + amps[2].value()).norm_squared();
        let pred = triple_cross_section(&set).unwrap();
        assert!((pred.predicted - direct).abs() < 1e-12);
        assert!(pred.residual.unwrap().abs() < 1e-12);
    }

    #[test]
    fn complex_amplitudes_never_look_quaternionic() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..2000 {
            let amps: [Amplitude; 3] = std::array::from_fn(|_| {
                Amplitude::complex(rng.random_range(0.2..3.0), rng.random_range(-PI..PI)).unwrap()
            });
            let t = cosine_triple(&CrossSectionSet::from_amplitudes(&amps)).unwrap();
            let v = classify(&t, Some(1e-6)).unwrap();
            assert!(
                matches!(
                    v.class,
                    TheoryClass::ComplexAdmissible | TheoryClass::RealAdmissible
                ),
                "{t:?} -> {v:?}"
            );
        }
    }

    #[test]
    fn set_validation() {
        assert!(matches!(
            CrossSectionSet::new([1.0, -1.0, 1.0], [2.0; 3]),
            Err(Error::Value(_))
        ));
        let mut s = uniform_set(2.0);
        s.set_error(Channel::S12, Some(-0.1));
        assert!(s.validate().is_err());
        assert_eq!(Channel::from_id("31"), Some(Channel::S31));
        assert_eq!(Channel::from_id("13"), None);
    }
}
