//! Amplitudes from measured cross sections.
//!
//! Magnitudes are fixed to `√σᵢ`. Directions are gauge-fixed to
//!
//! ```text
//! u₁ = 1
//! u₂ = cos a + i sin a
//! u₃ = cos b + sin b (i cos c + j sin c)
//! ```
//!
//! so that `u₁·u₂ = cos a`, `u₃·u₁ = cos b` and
//! `u₂·u₃ = cos a cos b + sin a sin b cos c`. Every point of `(a, b, c)` is a
//! positive semidefinite Gram matrix, so the search never leaves the physical
//! region. The three pair cross sections are matched by damped least squares.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::{
    cross_section, gram_matrix, realize, Amplitude, Channel, CosineTriple, CrossSectionSet,
};
use crate::error::{Error, Result};
use crate::quat::{Quaternion, UnitQuaternion};

const MAX_ITERATIONS: usize = 500;
const INITIAL_DAMPING: f64 = 1e-3;

/// Pairs beyond this many standard errors from the best fit reject the data.
pub const FIT_SIGMA_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub amplitudes: [Amplitude; 3],
    /// Root-mean-square of the three pair residuals, barn.
    pub residual_rms: f64,
    /// Predicted minus measured for `σ₂₃`, `σ₃₁`, `σ₁₂`, barn.
    pub pair_residuals: [f64; 3],
    /// Pairwise cosines of the fitted directions.
    pub cosines: CosineTriple,
    pub iterations: usize,
}

struct Problem {
    mag: [f64; 3],
    sigma: [f64; 3],
    /// Measured `σ₂₃`, `σ₃₁`, `σ₁₂`.
    pairs: [f64; 3],
    /// Residual weights (1/σ_err or 1).
    weight: [f64; 3],
}

impl Problem {
    /// Cosines `(α, β, γ)` and their Jacobian in `(a, b, c)`.
    fn cosines(&self, p: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
        let (sa, ca) = p[0].sin_cos();
        let (sb, cb) = p[1].sin_cos();
        let (sc, cc) = p[2].sin_cos();
        let alpha = ca * cb + sa * sb * cc;
        let jac = [
            [
                -sa * cb + ca * sb * cc,
                -ca * sb + sa * cb * cc,
                -sa * sb * sc,
            ],
            [0.0, -sb, 0.0],
            [-sa, 0.0, 0.0],
        ];
        ([alpha, cb, ca], jac)
    }

    /// Second derivatives of `(α, β, γ)` in `(a, b, c)`.
    fn cosine_hessians(&self, p: &[f64; 3]) -> [Matrix3<f64>; 3] {
        let (sa, ca) = p[0].sin_cos();
        let (sb, cb) = p[1].sin_cos();
        let (sc, cc) = p[2].sin_cos();
        let alpha = ca * cb + sa * sb * cc;
        let ab = sa * sb + ca * cb * cc;
        let ac = -ca * sb * sc;
        let bc = -sa * cb * sc;
        let h_alpha = Matrix3::new(-alpha, ab, ac, ab, -alpha, bc, ac, bc, -sa * sb * cc);
        let mut h_beta = Matrix3::zeros();
        h_beta[(1, 1)] = -cb;
        let mut h_gamma = Matrix3::zeros();
        h_gamma[(0, 0)] = -ca;
        [h_alpha, h_beta, h_gamma]
    }

    /// Exact Hessian of the cost: `JᵀJ + Σ wₖ² rₖ ∇²σₖ`.
    fn hessian(&self, p: &[f64; 3], r: &[f64; 3], jac: &Matrix3<f64>) -> Matrix3<f64> {
        let prod = self.pair_products();
        let second = self.cosine_hessians(p);
        let mut h = jac.transpose() * jac;
        for k in 0..3 {
            h += second[k] * (self.weight[k].powi(2) * r[k] * prod[k]);
        }
        h
    }

    fn pair_products(&self) -> [f64; 3] {
        let m = self.mag;
        [2.0 * m[1] * m[2], 2.0 * m[2] * m[0], 2.0 * m[0] * m[1]]
    }

    /// Unweighted residuals (predicted − measured) and the weighted Jacobian.
    fn evaluate(&self, p: &[f64; 3]) -> ([f64; 3], Matrix3<f64>) {
        let (cos, dcos) = self.cosines(p);
        let s = self.sigma;
        let base = [s[1] + s[2], s[2] + s[0], s[0] + s[1]];
        let prod = self.pair_products();
        let mut r = [0.0; 3];
        let mut jac = Matrix3::zeros();
        for k in 0..3 {
            r[k] = base[k] + prod[k] * cos[k] - self.pairs[k];
            for v in 0..3 {
                jac[(k, v)] = self.weight[k] * prod[k] * dcos[k][v];
            }
        }
        (r, jac)
    }

    fn cost(&self, r: &[f64; 3]) -> f64 {
        r.iter()
            .zip(self.weight)
            .map(|(ri, w)| (ri * w).powi(2))
            .sum::<f64>()
            * 0.5
    }

    /// Damped Newton iteration with Marquardt diagonal scaling and Nielsen's
    /// damping update. The exact Hessian is used because data outside the
    /// physical region leaves large residuals, where Gauss–Newton stalls.
    fn solve(&self, start: [f64; 3]) -> ([f64; 3], f64, usize) {
        let mut p = start;
        let (mut r, mut jac) = self.evaluate(&p);
        let mut cost = self.cost(&r);
        let mut lambda = INITIAL_DAMPING;
        let mut nu = 2.0;
        let mut iterations = 0;

        while iterations < MAX_ITERATIONS && cost > 0.0 {
            iterations += 1;
            let wr = Vector3::from_fn(|k, _| r[k] * self.weight[k]);
            let jtj = jac.transpose() * jac;
            let hess = self.hessian(&p, &r, &jac);
            let grad = jac.transpose() * wr;
            if grad.amax() <= 1e-30 {
                break;
            }
            let mut a = hess;
            for d in 0..3 {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-grad))) else {
                lambda *= nu;
                nu *= 2.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let (tr, tjac) = self.evaluate(&trial);
            let tcost = self.cost(&tr);
            let predicted = -(grad.dot(&step) + 0.5 * (step.transpose() * hess * step)[(0, 0)]);
            if tcost < cost {
                let rho = if predicted > 0.0 {
                    (cost - tcost) / predicted
                } else {
                    1.0
                };
                lambda *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                nu = 2.0;
                let small_step =
                    step.amax() <= 1e-15 * (1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                let stalled = cost - tcost <= 1e-16 * cost;
                p = trial;
                r = tr;
                jac = tjac;
                cost = tcost;
                if small_step || stalled {
                    break;
                }
            } else {
                lambda *= nu;
                nu *= 2.0;
                if lambda > 1e20 {
                    break;
                }
            }
        }
        (p, cost, iterations)
    }
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(-1.0, 1.0)
}

/// Angles `(a, b, c)` reproducing the cosines as closely as the gauge allows.
fn angles_from_cosines(alpha: f64, beta: f64, gamma: f64) -> [f64; 3] {
    let a = clamp_unit(gamma).acos();
    let b = clamp_unit(beta).acos();
    let denom = a.sin() * b.sin();
    let c = if denom.abs() < 1e-300 {
        0.0
    } else {
        clamp_unit((alpha - a.cos() * b.cos()) / denom).acos()
    };
    [a, b, c]
}

fn directions(p: &[f64; 3]) -> Result<[UnitQuaternion; 3]> {
    let (sa, ca) = p[0].sin_cos();
    let (sb, cb) = p[1].sin_cos();
    let (sc, cc) = p[2].sin_cos();
    Ok([
        UnitQuaternion::ONE,
        UnitQuaternion::new(Quaternion::new(ca, sa, 0.0, 0.0))?,
        UnitQuaternion::new(Quaternion::new(cb, sb * cc, sb * sc, 0.0))?,
    ])
}

/// Fits three amplitudes to the six required cross sections.
///
/// Without error bars the best fit is always returned together with its
/// residual. With error bars, a best fit whose pair residual exceeds
/// [`FIT_SIGMA_LIMIT`] standard errors on any pair is rejected as
/// [`Error::NotRealizable`].
pub fn fit_amplitudes(set: &CrossSectionSet) -> Result<FitResult> {
    set.validate()?;
    for (ch, s) in [
        (Channel::S1, set.sigma1),
        (Channel::S2, set.sigma2),
        (Channel::S3, set.sigma3),
    ] {
        if s <= 0.0 {
            return Err(Error::DegenerateScatterer(format!(
                "single cross section {ch} is {s}"
            )));
        }
    }
    let measured = super::cosine_triple(set)?;
    let sigma = [set.sigma1, set.sigma2, set.sigma3];
    let mag = sigma.map(f64::sqrt);
    let pairs = [set.sigma23, set.sigma31, set.sigma12];

    // Effective pair errors include the singles through the fixed magnitudes:
    // ∂σ₁₂/∂σ₁ = 1 + γ√(σ₂/σ₁), evaluated at the clamped measured cosines.
    let eff_err = set.has_errors().then(|| {
        let cos = measured.as_array().map(clamp_unit);
        let idx = [
            (1usize, 2usize, Channel::S23),
            (2, 0, Channel::S31),
            (0, 1, Channel::S12),
        ];
        let single = [Channel::S1, Channel::S2, Channel::S3];
        let mut out = [0.0; 3];
        for (k, (i, j, ch)) in idx.into_iter().enumerate() {
            let e = |c: Channel| set.error(c).unwrap_or(0.0);
            let di = 1.0 + cos[k] * mag[j] / mag[i];
            let dj = 1.0 + cos[k] * mag[i] / mag[j];
            out[k] =
                (e(ch).powi(2) + (di * e(single[i])).powi(2) + (dj * e(single[j])).powi(2)).sqrt();
        }
        out
    });
    let weight = match eff_err {
        Some(e) if e.iter().all(|v| *v > 0.0) => e.map(|v| 1.0 / v),
        _ => [1.0; 3],
    };

    let problem = Problem {
        mag,
        sigma,
        pairs,
        weight,
    };
    let first = angles_from_cosines(measured.alpha, measured.beta, measured.gamma);
    let mut starts = vec![first];
    // Realizable data is matched exactly by the first start; the others only
    // matter when the data lies outside the physical region.
    if realize::min_eigenvalue(&gram_matrix(&measured)) < -realize::REALIZABILITY_TOL {
        for c in [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            starts.push([first[0], first[1], c]);
        }
        starts.push(angles_from_cosines(0.0, 0.0, 0.0));
    }

    let mut best: Option<([f64; 3], f64, usize)> = None;
    for s in starts {
        let sol = problem.solve(s);
        if best.as_ref().is_none_or(|b| sol.1 < b.1) {
            best = Some(sol);
        }
    }
    let (params, _, iterations) = best.expect("at least one start");
    if !params.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("fit produced non-finite angles".into()));
    }

    let (residuals, _) = problem.evaluate(&params);
    let residual_rms = (residuals.iter().map(|r| r * r).sum::<f64>() / 3.0).sqrt();
    let dirs = directions(&params)?;
    let amplitudes = [
        Amplitude::new(mag[0], dirs[0])?,
        Amplitude::new(mag[1], dirs[1])?,
        Amplitude::new(mag[2], dirs[2])?,
    ];
    debug_assert!((cross_section(&amplitudes[0]) - sigma[0]).abs() <= 1e-12 * sigma[0]);
    let cosines = CosineTriple::new(
        dirs[1].dot4(dirs[2]),
        dirs[2].dot4(dirs[0]),
        dirs[0].dot4(dirs[1]),
    );

    if let Some(err) = eff_err {
        let worst = residuals
            .iter()
            .zip(err)
            .map(|(r, e)| {
                if e > 0.0 {
                    r.abs() / e
                } else if *r == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0f64, f64::max);
        if worst > FIT_SIGMA_LIMIT {
            return Err(Error::NotRealizable {
                detail: format!(
                    "best physical fit misses a pair cross section by {worst:.2} standard errors"
                ),
                residual: residual_rms,
            });
        }
    }

    Ok(FitResult {
        amplitudes,
        residual_rms,
        pair_residuals: residuals,
        cosines,
        iterations,
    })
}
