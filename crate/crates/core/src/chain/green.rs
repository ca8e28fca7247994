use nalgebra::DMatrix;

use super::spectral::SpectralDecomposition;
use crate::error::{Error, Result};

const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Resolvent Green function of the pair of walks,
/// `G_λ(x,y) = ∫₀^∞ e^{-λt} P(X^x_t = Y^y_t) dt`, or its restriction `G^<_λ`
/// with the stationary (eigenvalue 1) component removed.
#[derive(Debug, Clone)]
pub struct GreenEvaluation {
    pub lambda: f64,
    pub values: DMatrix<f64>,
    pub restricted: bool,
}

impl GreenEvaluation {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.values.nrows())
            .map(|x| self.values[(x, x)])
            .collect()
    }
}

/// Evaluate `G_λ` (`restricted = false`, needs `λ > 0`) or `G^<_λ`
/// (`restricted = true`, `λ ≥ 0`).
///
/// For symmetric kernels this is `⟨δ_x, (λ + 2(1-Q))^{-1} δ_y⟩`. For general
/// reversible kernels both heat kernels are expanded spectrally:
///
/// `G_λ(x,y) = π(x)^{-1/2} π(y)^{-1/2} Σ_{q,q'} φ_q(x) φ_{q'}(y) C(q,q') / (λ+2-q-q')`
///
/// with `C = Φᵀ Π Φ`. The restricted form drops the `(1,1)` term, so that
/// `G_λ - G^<_λ = Σ_z π(z)² / λ` everywhere.
pub fn green_function(
    spec: &SpectralDecomposition,
    lambda: f64,
    restricted: bool,
) -> Result<GreenEvaluation> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid(format!(
            "resolvent parameter must be finite and >= 0, got {lambda}"
        )));
    }
    if lambda == 0.0 && !restricted {
        return Err(Error::Singularity {
            eigenvalue: spec.eigenvalues()[0],
        });
    }
    let n = spec.n();
    let uniform = spec
        .pi_sqrt()
        .iter()
        .all(|&p| (p * p - 1.0 / n as f64).abs() <= 1e-14);
    let values = if uniform {
        symmetric_green(spec, lambda, restricted)?
    } else {
        general_green(spec, lambda, restricted)?
    };
    Ok(GreenEvaluation {
        lambda,
        values,
        restricted,
    })
}

fn symmetric_green(
    spec: &SpectralDecomposition,
    lambda: f64,
    restricted: bool,
) -> Result<DMatrix<f64>> {
    spec.apply_symmetric_indexed(|j, q| {
        if restricted && j == 0 {
            return Ok(0.0);
        }
        let denom = lambda + 2.0 - 2.0 * q;
        if denom <= DENOMINATOR_FLOOR {
            return Err(Error::Singularity { eigenvalue: q });
        }
        Ok(1.0 / denom)
    })
}

pub(super) fn general_green(
    spec: &SpectralDecomposition,
    lambda: f64,
    restricted: bool,
) -> Result<DMatrix<f64>> {
    let n = spec.n();
    let phi = spec.eigenvectors();
    let ev = spec.eigenvalues();
    let pi = spec.pi_sqrt().map(|p| p * p);
    let weighted = DMatrix::from_fn(n, n, |z, j| pi[z] * phi[(z, j)]);
    let mut core = phi.transpose() * weighted;
    for a in 0..n {
        for b in 0..n {
            if restricted && a == 0 && b == 0 {
                core[(a, b)] = 0.0;
                continue;
            }
            let denom = lambda + 2.0 - ev[a] - ev[b];
            if denom <= DENOMINATOR_FLOOR {
                return Err(Error::Singularity {
                    eigenvalue: ev[a].max(ev[b]),
                });
            }
            core[(a, b)] /= denom;
        }
    }
    let mut g = phi * core * phi.transpose();
    let sqrt_pi = spec.pi_sqrt();
    for x in 0..n {
        for y in 0..n {
            g[(x, y)] /= sqrt_pi[x] * sqrt_pi[y];
        }
    }
    Ok(g)
}
