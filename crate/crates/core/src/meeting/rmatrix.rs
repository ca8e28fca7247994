use nalgebra::DMatrix;

use crate::chain::{eigendecompose, SpectralDecomposition, TransitionKernel};
use crate::error::{Error, Result};

/// The matrix `R_λ(x,y) = 2 (π(y)/π(x)) ∫₀^∞ e^{-λt} Q_t(y,x) (Q Q_t)(y,x) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    pub lambda: f64,
    pub entries: DMatrix<f64>,
}

impl RMatrix {
    /// `max |R(x,y) - R(y,x)|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.entries.nrows();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..x {
                worst = worst.max((self.entries[(x, y)] - self.entries[(y, x)]).abs());
            }
        }
        worst
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.min()
    }
}

pub fn r_matrix(base: &TransitionKernel, lambda: f64) -> Result<RMatrix> {
    r_matrix_from_spectrum(&eigendecompose(base)?, lambda)
}

/// Closed form from the spectral expansion of both heat kernels.
///
/// With `u_q = φ_q(x) φ_q(y)`, `R(x,y) = 2 Σ_{q,q'} q' u_q u_{q'} / (λ+2-q-q')`;
/// the `π` prefactors cancel against the similarity transform. Only the
/// symmetric part of `q'` survives the double sum, so the weight matrix is
/// symmetrized before use.
pub(crate) fn r_matrix_from_spectrum(spec: &SpectralDecomposition, lambda: f64) -> Result<RMatrix> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    let n = spec.n();
    let q = spec.eigenvalues();
    let phi = spec.eigenvectors();
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            weights[(i, j)] = 0.5 * (q[i] + q[j]) / (lambda + 2.0 - q[i] - q[j]);
        }
    }
    let mut entries = DMatrix::zeros(n, n);
    let mut u = vec![0.0; n];
    for x in 0..n {
        for y in x..n {
            for (i, ui) in u.iter_mut().enumerate() {
                *ui = phi[(x, i)] * phi[(y, i)];
            }
            let mut acc = 0.0;
            for i in 0..n {
                if u[i] == 0.0 {
                    continue;
                }
                let mut row = 0.0;
                for j in 0..n {
                    row += weights[(i, j)] * u[j];
                }
                acc += u[i] * row;
            }
            entries[(x, y)] = 2.0 * acc;
            entries[(y, x)] = 2.0 * acc;
        }
    }
    Ok(RMatrix { lambda, entries })
}
