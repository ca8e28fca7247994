//! Extremal eigenvalues of large sparse symmetric operators.
//!
//! Lanczos with full reorthogonalization, optionally restricted to the
//! orthogonal complement of a known eigenvector (for a walk kernel, `π^{1/2}`).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub max: f64,
    pub min: f64,
    pub iterations: usize,
}

const CHECK_EVERY: usize = 20;

/// Largest and smallest eigenvalue of the symmetric operator `matvec` on
/// `R^n`, restricted to the complement of the unit vector `deflate` if given.
///
/// Stops when both Ritz residuals fall below `tol`, or when the Krylov space
/// is exhausted.
pub fn extremal_eigenvalues<F>(
    n: usize,
    matvec: F,
    deflate: Option<&[f64]>,
    tol: f64,
) -> Result<Extremes>
where
    F: Fn(&[f64], &mut [f64]),
{
    if n == 0 {
        return Err(Error::invalid("empty operator"));
    }
    let dim = n - usize::from(deflate.is_some());
    if dim == 0 {
        return Err(Error::invalid("nothing left after deflation"));
    }
    let project = |v: &mut [f64]| {
        if let Some(u) = deflate {
            let c = dot(u, v);
            axpy(-c, u, v);
        }
    };

    let mut rng = stream_rng(0x1a2c_2051, n as u64);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    project(&mut v);
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut last = None;

    for j in 0..dim {
        matvec(&basis[j], &mut w);
        project(&mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
            project(&mut w);
        }
        let b = dot(&w, &w).sqrt();
        let steps = j + 1;
        let exhausted = steps == dim || b <= 1e-13;
        if steps % CHECK_EVERY == 0 || exhausted {
            let (ext, res_max, res_min) = ritz_extremes(&alpha, &beta, b);
            last = Some((ext, res_max.max(res_min)));
            if exhausted || (res_max <= tol && res_min <= tol) {
                return Ok(Extremes {
                    iterations: steps,
                    ..ext
                });
            }
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let (ext, residual) = last.expect("at least one Ritz check");
    Err(Error::NumericalFailure {
        what: "lanczos",
        iterations: ext.iterations,
        residual,
    })
}

/// Extreme Ritz values of the tridiagonal `T` and their residual bounds
/// `|β_j s_j|`.
fn ritz_extremes(alpha: &[f64], beta: &[f64], next_beta: f64) -> (Extremes, f64, f64) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (mut imax, mut imin) = (0, 0);
    for i in 0..m {
        if eig.eigenvalues[i] > eig.eigenvalues[imax] {
            imax = i;
        }
        if eig.eigenvalues[i] < eig.eigenvalues[imin] {
            imin = i;
        }
    }
    let res = |i: usize| (next_beta * eig.eigenvectors[(m - 1, i)]).abs();
    (
        Extremes {
            max: eig.eigenvalues[imax],
            min: eig.eigenvalues[imin],
            iterations: m,
        },
        res(imax),
        res(imin),
    )
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}
