use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::TransitionKernel;
use crate::error::{Error, Result};

/// Base chains up to this many states are solved by dense Cholesky on the
/// `N(N-1)` off-diagonal product states; larger ones by conjugate gradients.
pub const DENSE_SOLVE_LIMIT: usize = 32;

const CG_TOL: f64 = 1e-13;
const CG_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Auto,
    Dense,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    DenseCholesky,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub method: SolveMethod,
    pub iterations: usize,
    /// Max-norm residual of the symmetrized system.
    pub residual: f64,
}

/// Meeting-time quantities for two independent stationary walks.
///
/// Only the fields relevant to the requested computation are populated.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingSolution {
    pub lambda: Option<f64>,
    /// `E[e^{-λM}]` under the product stationary start.
    pub laplace: Option<f64>,
    /// `E[M]` under the product stationary start.
    pub mean: Option<f64>,
    /// `E[M_{x,y}]` for every pair of starting points.
    pub mean_matrix: Option<DMatrix<f64>>,
    /// `v(x) = E[e^{-λM}; X_M = x]`.
    pub place_transform: Option<DVector<f64>>,
    /// `F_λ(x) = v(x)/π(x)`.
    pub f_lambda: Option<DVector<f64>>,
    pub diagnostics: SolveDiagnostics,
}

/// Pair of independent walks on `E × E`, stored through the symmetrized base
/// kernel `S`.
///
/// With `D = diag(π(a)π(b))` the killed generator `A = (λ+2) - (Q⊕Q)` on the
/// off-diagonal states satisfies `A = D^{-1/2} B D^{1/2}` where
/// `B = (λ+2) - (S⊕S)` is symmetric positive definite, so every solve is done
/// with `B`.
#[derive(Debug, Clone)]
pub struct ProductChain {
    base: TransitionKernel,
    sym_rows: Vec<Vec<(usize, f64)>>,
    sqrt_pi: Vec<f64>,
    solver: SolverChoice,
}

impl ProductChain {
    pub fn new(base: &TransitionKernel) -> Self {
        let sqrt_pi: Vec<f64> = base.pi().iter().map(|p| p.sqrt()).collect();
        let sym_rows = base
            .sparse_rows()
            .into_iter()
            .enumerate()
            .map(|(x, row)| {
                row.into_iter()
                    .map(|(y, p)| (y, sqrt_pi[x] * p / sqrt_pi[y]))
                    .collect()
            })
            .collect();
        Self {
            base: base.clone(),
            sym_rows,
            sqrt_pi,
            solver: SolverChoice::Auto,
        }
    }

    pub fn with_solver(mut self, solver: SolverChoice) -> Self {
        self.solver = solver;
        self
    }

    pub fn base(&self) -> &TransitionKernel {
        &self.base
    }

    /// Number of base states `N`; the product chain has `N²`.
    pub fn n(&self) -> usize {
        self.sqrt_pi.len()
    }

    /// `sqrt(π(a)π(b))` laid out row-major with zeros on the diagonal.
    pub(crate) fn sqrt_product_weights(&self) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    w[a * n + b] = self.sqrt_pi[a] * self.sqrt_pi[b];
                }
            }
        }
        w
    }

    /// `out = B y` on off-diagonal states, for `y` vanishing on the diagonal.
    pub(crate) fn apply_killed(&self, shift: f64, y: &[f64], out: &mut [f64]) {
        let n = self.n();
        let diag = shift + 2.0;
        for a in 0..n {
            for b in 0..n {
                let i = a * n + b;
                if a == b {
                    out[i] = 0.0;
                    continue;
                }
                let mut acc = diag * y[i];
                for &(a2, s) in &self.sym_rows[a] {
                    acc -= s * y[a2 * n + b];
                }
                for &(b2, s) in &self.sym_rows[b] {
                    acc -= s * y[a * n + b2];
                }
                out[i] = acc;
            }
        }
    }

    /// Solve `B y = rhs` on the off-diagonal states (`rhs` must vanish on the
    /// diagonal). `shift` is λ, or 0 for mean hitting times.
    pub fn solve_killed(&self, shift: f64, rhs: &[f64]) -> Result<(Vec<f64>, SolveDiagnostics)> {
        let n = self.n();
        assert_eq!(rhs.len(), n * n);
        if !(shift >= 0.0) || !shift.is_finite() {
            return Err(Error::invalid(format!(
                "shift must be finite and >= 0, got {shift}"
            )));
        }
        let dense = match self.solver {
            SolverChoice::Auto => n <= DENSE_SOLVE_LIMIT,
            SolverChoice::Dense => true,
            SolverChoice::ConjugateGradient => false,
        };
        let (y, method, iterations) = if dense {
            (self.solve_dense(shift, rhs)?, SolveMethod::DenseCholesky, 1)
        } else {
            let (y, it) = self.solve_cg(shift, rhs)?;
            (y, SolveMethod::ConjugateGradient, it)
        };
        let mut check = vec![0.0; n * n];
        self.apply_killed(shift, &y, &mut check);
        let residual = check
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok((
            y,
            SolveDiagnostics {
                method,
                iterations,
                residual,
            },
        ))
    }

    fn solve_dense(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let index = |a: usize, b: usize| a * (n - 1) + if b > a { b - 1 } else { b };
        let m = n * (n - 1);
        let mut mat = DMatrix::zeros(m, m);
        let mut vec = DVector::zeros(m);
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let i = index(a, b);
                vec[i] = rhs[a * n + b];
                mat[(i, i)] += shift + 2.0;
                for &(a2, s) in &self.sym_rows[a] {
                    if a2 != b {
                        mat[(i, index(a2, b))] -= s;
                    }
                }
                for &(b2, s) in &self.sym_rows[b] {
                    if b2 != a {
                        mat[(i, index(a, b2))] -= s;
                    }
                }
            }
        }
        let sol = match mat.clone().cholesky() {
            Some(chol) => chol.solve(&vec),
            None => mat.lu().solve(&vec).ok_or(Error::NumericalFailure {
                what: "dense product-chain solve",
                iterations: 1,
                residual: f64::INFINITY,
            })?,
        };
        let mut y = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    y[a * n + b] = sol[index(a, b)];
                }
            }
        }
        Ok(y)
    }

    fn solve_cg(&self, shift: f64, rhs: &[f64]) -> Result<(Vec<f64>, usize)> {
        let len = rhs.len();
        let mut x = vec![0.0; len];
        let mut r = rhs.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; len];
        let b_norm = norm(rhs);
        if b_norm == 0.0 {
            return Ok((x, 0));
        }
        let mut rr = dot(&r, &r);
        for it in 1..=CG_MAX_ITER {
            self.apply_killed(shift, &p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            for i in 0..len {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            if rr_new.sqrt() <= CG_TOL * b_norm {
                return Ok((x, it));
            }
            let beta = rr_new / rr;
            for i in 0..len {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_new;
        }
        Err(Error::NumericalFailure {
            what: "conjugate gradient product-chain solve",
            iterations: CG_MAX_ITER,
            residual: rr.sqrt() / b_norm,
        })
    }

    /// Mean meeting time from every pair of starting points.
    pub fn mean_meeting(&self) -> Result<MeetingSolution> {
        let n = self.n();
        let weights = self.sqrt_product_weights();
        let (y, diagnostics) = self.solve_killed(0.0, &weights)?;
        let mut matrix = DMatrix::zeros(n, n);
        let mut mean = 0.0;
        for a in 0..n {
            for b in 0..n {
                let i = a * n + b;
                if a != b {
                    matrix[(a, b)] = y[i] / weights[i];
                    mean += weights[i] * y[i];
                }
            }
        }
        Ok(MeetingSolution {
            lambda: None,
            laplace: None,
            mean: Some(mean),
            mean_matrix: Some(matrix),
            place_transform: None,
            f_lambda: None,
            diagnostics,
        })
    }

    /// Laplace transform and meeting-place transform at `λ > 0`.
    ///
    /// One adjoint solve replaces the `N` per-target solves: with `μ = π⊗π`
    /// on off-diagonal states and `w = A^{-T} μ`, the meeting-place transform
    /// is `v(x) = π(x)² + Σ_{a≠x} w(a,x)Q(a,x) + Σ_{b≠x} w(x,b)Q(b,x)`.
    pub fn laplace_meeting(&self, lambda: f64) -> Result<MeetingSolution> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        let n = self.n();
        let weights = self.sqrt_product_weights();
        let (y, diagnostics) = self.solve_killed(lambda, &weights)?;
        let pi = self.base.pi();
        let q = self.base.entries();
        let mut v = DVector::zeros(n);
        for x in 0..n {
            let mut acc = pi[x] * pi[x];
            for a in 0..n {
                if a != x {
                    let i = a * n + x;
                    acc += weights[i] * y[i] * q[(a, x)];
                    let j = x * n + a;
                    acc += weights[j] * y[j] * q[(a, x)];
                }
            }
            v[x] = acc;
        }
        let laplace = v.sum();
        let f = v.component_div(pi);
        Ok(MeetingSolution {
            lambda: Some(lambda),
            laplace: Some(laplace),
            mean: None,
            mean_matrix: None,
            place_transform: Some(v),
            f_lambda: Some(f),
            diagnostics,
        })
    }

    /// Max-norm residual of `2m(z) - Σ Q(a,a')m(a',b) - Σ Q(b,b')m(a,b') = 1`
    /// on off-diagonal `z = (a,b)`, with `m = 0` on the diagonal.
    pub fn mean_system_residual(&self, m: &DMatrix<f64>) -> f64 {
        let n = self.n();
        let q = self.base.sparse_rows();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut lhs = 2.0 * m[(a, b)];
                for &(a2, p) in &q[a] {
                    lhs -= p * m[(a2, b)];
                }
                for &(b2, p) in &q[b] {
                    lhs -= p * m[(a, b2)];
                }
                worst = worst.max((lhs - 1.0).abs());
            }
        }
        worst.max((0..n).map(|z| m[(z, z)].abs()).fold(0.0, f64::max))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
