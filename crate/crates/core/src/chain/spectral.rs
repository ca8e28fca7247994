use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::kernel::{symmetrize, TransitionKernel};
use crate::error::{Error, Result};

/// Largest state count handled by the dense eigensolver.
pub const DENSE_EIGEN_LIMIT: usize = 2048;

/// Minimum separation between the two largest eigenvalues before the top
/// eigenvalue is treated as simple.
pub const TOP_GAP_THRESHOLD: f64 = 1e-8;

/// Eigenvalues (descending) and orthonormal eigenvectors of the symmetrized
/// kernel `S`, together with `π^{1/2}`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    pi_sqrt: DVector<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Column `j` is the eigenvector of `eigenvalues()[j]`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn pi_sqrt(&self) -> &DVector<f64> {
        &self.pi_sqrt
    }

    /// `1 - λ₂`, the separation of the top eigenvalue.
    pub fn top_gap(&self) -> f64 {
        if self.n() < 2 {
            return f64::INFINITY;
        }
        self.eigenvalues[0] - self.eigenvalues[1]
    }

    /// `f(S) = Σ_q f(q) φ_q φ_qᵀ`.
    pub fn apply_symmetric<F: Fn(f64) -> f64>(&self, f: F) -> Result<DMatrix<f64>> {
        let weights = self.evaluate(f)?;
        let scaled = DMatrix::from_fn(self.n(), self.n(), |x, j| {
            self.eigenvectors[(x, j)] * weights[j]
        });
        Ok(scaled * self.eigenvectors.transpose())
    }

    /// `f(S)` where `f` sees the eigenvalue index as well as its value.
    pub(crate) fn apply_symmetric_indexed<F>(&self, f: F) -> Result<DMatrix<f64>>
    where
        F: Fn(usize, f64) -> Result<f64>,
    {
        let weights = self
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &q)| f(j, q))
            .collect::<Result<Vec<f64>>>()?;
        let scaled = DMatrix::from_fn(self.n(), self.n(), |x, j| {
            self.eigenvectors[(x, j)] * weights[j]
        });
        Ok(scaled * self.eigenvectors.transpose())
    }

    /// `f(Q)(x,y) = π(x)^{-1/2} f(S)(x,y) π(y)^{1/2}`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<DMatrix<f64>> {
        let mut m = self.apply_symmetric(f)?;
        for x in 0..self.n() {
            for y in 0..self.n() {
                m[(x, y)] *= self.pi_sqrt[y] / self.pi_sqrt[x];
            }
        }
        Ok(m)
    }

    /// `Σ_q q φ_q φ_qᵀ`, which should reproduce `S`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply_symmetric(|q| q).expect("identity is finite")
    }

    fn evaluate<F: Fn(f64) -> f64>(&self, f: F) -> Result<Vec<f64>> {
        self.eigenvalues
            .iter()
            .map(|&q| {
                let v = f(q);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Singularity { eigenvalue: q })
                }
            })
            .collect()
    }
}

/// Dense symmetric eigendecomposition of `S`.
///
/// Eigenvector signs are arbitrary except that the top eigenvector is
/// oriented along `π^{1/2}`.
pub fn eigendecompose(kernel: &TransitionKernel) -> Result<SpectralDecomposition> {
    let n = kernel.n();
    if n > DENSE_EIGEN_LIMIT {
        return Err(Error::Budget(format!(
            "dense eigendecomposition limited to {DENSE_EIGEN_LIMIT} states, got {n}"
        )));
    }
    let s = symmetrize(kernel);
    let s = (&s + s.transpose()) * 0.5;
    let max_niter = 10_000 + 100 * n;
    let eig =
        SymmetricEigen::try_new(s, f64::EPSILON, max_niter).ok_or(Error::NumericalFailure {
            what: "symmetric eigensolver",
            iterations: max_niter,
            residual: f64::NAN,
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&j| eig.eigenvalues[j]));
    let mut eigenvectors = DMatrix::from_fn(n, n, |x, j| eig.eigenvectors[(x, order[j])]);

    let pi_sqrt = kernel.pi().map(f64::sqrt);
    if eigenvectors.column(0).dot(&pi_sqrt) < 0.0 {
        eigenvectors.column_mut(0).neg_mut();
    }
    let decomposition = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        pi_sqrt,
    };
    if decomposition.top_gap() < TOP_GAP_THRESHOLD {
        log::warn!(
            "top eigenvalue gap {:e} below {TOP_GAP_THRESHOLD:e}; eigenvalue 1 may not be simple",
            decomposition.top_gap()
        );
    }
    Ok(decomposition)
}

/// `f(Q)` through the spectral decomposition.
pub fn apply_function<F: Fn(f64) -> f64>(
    spec: &SpectralDecomposition,
    f: F,
) -> Result<DMatrix<f64>> {
    spec.apply(f)
}

/// Transition matrix `Q_t = e^{t(Q-1)}` of the rate-1 continuous-time chain.
pub fn heat_kernel(spec: &SpectralDecomposition, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!(
            "heat kernel time must be finite and >= 0, got {t}"
        )));
    }
    spec.apply(|q| (t * (q - 1.0)).exp())
}
