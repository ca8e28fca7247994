use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::product::{MeetingSolution, ProductChain, SolverChoice};
use super::rmatrix::{r_matrix_from_spectrum, RMatrix};
use crate::chain::{eigendecompose, green_function, SpectralDecomposition, TransitionKernel};
use crate::error::{Error, Result};
use crate::graph::constancy_check;
use crate::mckay;

/// Default depth of the diagonal-constancy precondition for the trace formula.
pub const DEFAULT_CONSTANCY_DEPTH: usize = 6;

/// Tolerance on the Kesten–McKay series tail in the tree comparison.
const TREE_SERIES_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaceEquationCheck {
    /// `‖(Id + R_λ)F_λ - ((2+λ)/λ)π‖_max`.
    pub equation_residual: f64,
    /// `v(x) ≤ ((2+λ)/λ) π(x)² + 1e-12` for every `x`.
    pub domination_ok: bool,
    /// `max_x v(x) / (((2+λ)/λ) π(x)²)`.
    pub max_domination_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeGapCheck {
    pub lambda: f64,
    /// `s = λ/N`, the rescaled parameter actually used.
    pub s: f64,
    pub laplace: f64,
    /// `Σ_x v(x) G^<_s(x,x)`.
    pub green_term: f64,
    /// `Σ_ℓ 2^ℓ Q∞^ℓ / (s+2)^{ℓ+1}`.
    pub tree_series: f64,
    /// `|green_term - laplace · tree_series|`.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub green_identity: f64,
    /// Present only for kernels with uniform stationary law.
    pub resolvent_identity: Option<f64>,
    pub place_equation: f64,
}

/// Exact analysis of one base kernel, reusing its spectral decomposition and
/// product chain across parameters.
#[derive(Debug, Clone)]
pub struct ExactAnalysis {
    kernel: TransitionKernel,
    spectrum: SpectralDecomposition,
    product: ProductChain,
}

impl ExactAnalysis {
    pub fn new(kernel: &TransitionKernel) -> Result<Self> {
        Ok(Self {
            kernel: kernel.clone(),
            spectrum: eigendecompose(kernel)?,
            product: ProductChain::new(kernel),
        })
    }

    pub fn with_solver(mut self, solver: SolverChoice) -> Self {
        self.product = self.product.with_solver(solver);
        self
    }

    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn product(&self) -> &ProductChain {
        &self.product
    }

    pub fn mean(&self) -> Result<MeetingSolution> {
        self.product.mean_meeting()
    }

    pub fn laplace(&self, lambda: f64) -> Result<MeetingSolution> {
        self.product.laplace_meeting(lambda)
    }

    /// `|(1/λ) Σ π² - Σ_x v(x) G_λ(x,x)|`.
    pub fn green_identity(&self, solution: &MeetingSolution) -> Result<f64> {
        let (lambda, v) = laplace_parts(solution)?;
        let green = green_function(&self.spectrum, lambda, false)?.diagonal();
        let rhs: f64 = v.iter().zip(&green).map(|(a, b)| a * b).sum();
        Ok((self.kernel.pi_square_sum() / lambda - rhs).abs())
    }

    /// `|1/N - laplace/N - λ Σ_x v(x) G^<_λ(x,x)|`, for uniform `π`.
    pub fn resolvent_identity(&self, solution: &MeetingSolution) -> Result<f64> {
        self.require_uniform("the restricted resolvent identity")?;
        let (lambda, v) = laplace_parts(solution)?;
        let laplace = solution.laplace.unwrap_or_else(|| v.sum());
        let n = self.kernel.n() as f64;
        let green = green_function(&self.spectrum, lambda, true)?.diagonal();
        let term: f64 = v.iter().zip(&green).map(|(a, b)| a * b).sum();
        Ok((1.0 / n - laplace / n - lambda * term).abs())
    }

    pub fn r_matrix(&self, lambda: f64) -> Result<RMatrix> {
        r_matrix_from_spectrum(&self.spectrum, lambda)
    }

    /// Residual of `(Id + R_λ)F_λ = ((2+λ)/λ)π` and the domination bound
    /// `v(x) ≤ ((2+λ)/λ)π(x)²`. The linear system is only checked, never solved.
    pub fn place_equation(&self, solution: &MeetingSolution) -> Result<PlaceEquationCheck> {
        let (lambda, v) = laplace_parts(solution)?;
        let pi = self.kernel.pi();
        let f = v.component_div(pi);
        let r = self.r_matrix(lambda)?;
        let scale = (2.0 + lambda) / lambda;
        let lhs = &f + &r.entries * &f;
        let equation_residual = (lhs - pi * scale).amax();
        let mut domination_ok = true;
        let mut max_domination_ratio: f64 = 0.0;
        for x in 0..pi.len() {
            let bound = scale * pi[x] * pi[x];
            domination_ok &= v[x] <= bound + 1e-12;
            max_domination_ratio = max_domination_ratio.max(v[x] / bound);
        }
        Ok(PlaceEquationCheck {
            equation_residual,
            domination_ok,
            max_domination_ratio,
        })
    }

    /// All identity residuals at one `λ`.
    pub fn residuals(&self, solution: &MeetingSolution) -> Result<IdentityResiduals> {
        let resolvent_identity = if self.kernel.has_uniform_pi() {
            Some(self.resolvent_identity(solution)?)
        } else {
            None
        };
        Ok(IdentityResiduals {
            green_identity: self.green_identity(solution)?,
            resolvent_identity,
            place_equation: self.place_equation(solution)?.equation_residual,
        })
    }

    /// `E[e^{-λM}] = 1 / (λ Σ_q 1/(λ+2-2q))`, valid when every `Q^ℓ(x,x)` is
    /// independent of `x`. The precondition is checked up to `depth` steps.
    pub fn trace_transform(&self, lambda: f64, depth: usize) -> Result<f64> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if !self.kernel.is_symmetric(1e-14) {
            return Err(Error::Precondition(
                "the trace formula needs a symmetric kernel".into(),
            ));
        }
        let report = constancy_check(&self.kernel, depth);
        if let Some(ell) = report.first_failure() {
            return Err(Error::Precondition(format!(
                "Q^{ell}(x,x) is not constant in x, so the trace formula does not apply"
            )));
        }
        let trace: f64 = self
            .spectrum
            .eigenvalues()
            .iter()
            .map(|q| 1.0 / (lambda + 2.0 - 2.0 * q))
            .sum();
        Ok(1.0 / (lambda * trace))
    }

    /// Degree `k` of a simple random walk on a regular graph.
    pub fn regular_degree(&self) -> Result<usize> {
        self.require_uniform("the tree comparison")?;
        let rows = self.kernel.sparse_rows();
        let k = rows[0].len();
        let uniform = rows.iter().all(|row| {
            row.len() == k && row.iter().all(|&(_, p)| (p * k as f64 - 1.0).abs() < 1e-12)
        });
        if !uniform || k == 0 {
            return Err(Error::Precondition(
                "the tree comparison needs a simple random walk on a regular graph".into(),
            ));
        }
        Ok(k)
    }

    /// Compare `Σ_x v(x) G^<_s(x,x)` with `laplace` times the tree value at
    /// `s = λ/N`, given the tree series value.
    pub fn tree_gap_with_series(&self, lambda: f64, tree_series: f64) -> Result<TreeGapCheck> {
        self.require_uniform("the tree comparison")?;
        let s = lambda / self.kernel.n() as f64;
        let solution = self.laplace(s)?;
        let (_, v) = laplace_parts(&solution)?;
        let green = green_function(&self.spectrum, s, true)?.diagonal();
        let green_term: f64 = v.iter().zip(&green).map(|(a, b)| a * b).sum();
        let laplace = solution.laplace.expect("laplace populated");
        Ok(TreeGapCheck {
            lambda,
            s,
            laplace,
            green_term,
            tree_series,
            delta: (green_term - laplace * tree_series).abs(),
        })
    }

    /// As [`ExactAnalysis::tree_gap_with_series`], computing the tree series
    /// from the graph degree.
    pub fn tree_gap(&self, lambda: f64) -> Result<TreeGapCheck> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        let k = self.regular_degree()?;
        let s = lambda / self.kernel.n() as f64;
        let series = mckay::tree_green_series(k, s, TREE_SERIES_TOL)?;
        self.tree_gap_with_series(lambda, series.value)
    }

    fn require_uniform(&self, what: &str) -> Result<()> {
        if self.kernel.has_uniform_pi() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what} needs a uniform stationary law"
            )))
        }
    }
}

fn laplace_parts(solution: &MeetingSolution) -> Result<(f64, &DVector<f64>)> {
    match (solution.lambda, solution.place_transform.as_ref()) {
        (Some(lambda), Some(v)) => Ok((lambda, v)),
        _ => Err(Error::invalid("solution has no Laplace-transform fields")),
    }
}

pub fn mean_meeting(base: &TransitionKernel) -> Result<MeetingSolution> {
    ProductChain::new(base).mean_meeting()
}

pub fn laplace_meeting(base: &TransitionKernel, lambda: f64) -> Result<MeetingSolution> {
    ProductChain::new(base).laplace_meeting(lambda)
}

pub fn verify_green_identity(base: &TransitionKernel, lambda: f64) -> Result<f64> {
    let analysis = ExactAnalysis::new(base)?;
    analysis.green_identity(&analysis.laplace(lambda)?)
}

pub fn verify_resolvent_identity(base: &TransitionKernel, lambda0: f64) -> Result<f64> {
    let analysis = ExactAnalysis::new(base)?;
    analysis.require_uniform("the restricted resolvent identity")?;
    analysis.resolvent_identity(&analysis.laplace(lambda0)?)
}

pub fn normalized_trace_transform(base: &TransitionKernel, lambda: f64) -> Result<f64> {
    ExactAnalysis::new(base)?.trace_transform(lambda, DEFAULT_CONSTANCY_DEPTH)
}

pub fn verify_place_equation(base: &TransitionKernel, lambda: f64) -> Result<PlaceEquationCheck> {
    let analysis = ExactAnalysis::new(base)?;
    analysis.place_equation(&analysis.laplace(lambda)?)
}

/// `Δ = |Σ_x v(x) G^<_{λ/N}(x,x) - laplace · tree_series|`.
pub fn verify_tree_gap(base: &TransitionKernel, lambda: f64, tree_series: f64) -> Result<f64> {
    Ok(ExactAnalysis::new(base)?
        .tree_gap_with_series(lambda, tree_series)?
        .delta)
}
