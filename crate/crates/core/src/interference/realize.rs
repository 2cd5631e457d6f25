use nalgebra::{Matrix3, SymmetricEigen};

use super::{Amplitude, CosineTriple};
use crate::error::{Error, Result};
use crate::quat::{Quaternion, UnitQuaternion};

/// Most negative Gram eigenvalue still treated as positive semidefinite.
pub const REALIZABILITY_TOL: f64 = 1e-9;

/// Schur complements at or below this are treated as exhausted rank.
const PIVOT_FLOOR: f64 = 1e-18;

/// Unit-diagonal Gram matrix of three directions whose pairwise cosines are
/// `γ` (1,2), `α` (2,3) and `β` (3,1).
pub fn gram_matrix(t: &CosineTriple) -> [[f64; 3]; 3] {
    [
        [1.0, t.gamma, t.beta],
        [t.gamma, 1.0, t.alpha],
        [t.beta, t.alpha, 1.0],
    ]
}

pub(crate) fn min_eigenvalue(g: &[[f64; 3]; 3]) -> f64 {
    let m = Matrix3::from_fn(|r, c| g[r][c]);
    SymmetricEigen::new(m).eigenvalues.min()
}

/// Three unit-magnitude amplitudes in span{1, i, j} whose pairwise `dot4`
/// values reproduce `t`.
///
/// Fails with [`Error::NotRealizable`] when the Gram matrix has an eigenvalue
/// below `−1e-9`, i.e. no set of quaternion amplitudes can produce `t`.
pub fn realize_from_cosines(t: &CosineTriple) -> Result<[Amplitude; 3]> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite cosines {:?}",
            t.as_array()
        )));
    }
    let g = gram_matrix(t);
    let lambda_min = min_eigenvalue(&g);
    if lambda_min < -REALIZABILITY_TOL {
        return Err(Error::NotRealizable {
            detail: format!("Gram matrix has eigenvalue {lambda_min:.6e}"),
            residual: -lambda_min,
        });
    }

    let rows = pivoted_cholesky(&g);
    let mut out = [Amplitude::new(1.0, UnitQuaternion::ONE)?; 3];
    for (amp, row) in out.iter_mut().zip(rows) {
        let dir = UnitQuaternion::new(Quaternion::new(row[0], row[1], row[2], 0.0))?;
        *amp = Amplitude::new(1.0, dir)?;
    }
    Ok(out)
}

/// Rows `L[i]` with `L[i]·L[j] = g[i][j]`, pivoting on the largest remaining
/// Schur complement. Column `k` holds the `k`-th pivot step, so the first
/// pivot row is `(1, 0, 0)`.
fn pivoted_cholesky(g: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut l = [[0.0; 3]; 3];
    let mut d = [g[0][0], g[1][1], g[2][2]];
    let mut done = [false; 3];

    for step in 0..3 {
        let mut p = None;
        for i in 0..3 {
            if !done[i] && p.is_none_or(|q: usize| d[i] > d[q]) {
                p = Some(i);
            }
        }
        let Some(p) = p else { break };
        if d[p] <= PIVOT_FLOOR {
            break;
        }
        let piv = d[p].sqrt();
        done[p] = true;
        l[p][step] = piv;
        for i in 0..3 {
            if done[i] {
                continue;
            }
            let partial: f64 = (0..step).map(|s| l[i][s] * l[p][s]).sum();
            l[i][step] = (g[i][p] - partial) / piv;
            d[i] -= l[i][step] * l[i][step];
        }
    }
    l
}
