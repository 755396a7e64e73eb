//! Dense complex linear solve shared by the synthesis solver and the
//! peak-refinement fits. Systems here are tiny (at most ~12 unknowns), so a
//! plain Gaussian elimination with partial pivoting is the right tool.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Solves A x = b by Gaussian elimination with partial pivoting plus one
/// step of iterative refinement (the normal-equation systems fed in here
/// are mildly ill-conditioned, and the cheap extra solve buys back the
/// digits that elimination noise costs).
///
/// `a` is row-major and square. Fails with [`Error::SingularSystem`] when a
/// pivot falls below n * eps * max|a_ij| of the input matrix.
pub(crate) fn solve_complex<T: Scalar>(
    a: Vec<Vec<Complex<T>>>,
    b: Vec<Complex<T>>,
) -> Result<Vec<Complex<T>>> {
    let x = eliminate(a.clone(), b.clone())?;
    // residual correction: solve A dx = b - A x and nudge once
    let mut residual = b;
    for (r, row) in residual.iter_mut().zip(&a) {
        for (coef, xi) in row.iter().zip(&x) {
            *r = *r - coef * xi;
        }
    }
    let dx = eliminate(a, residual)?;
    Ok(x.into_iter().zip(dx).map(|(xi, di)| xi + di).collect())
}

/// One pass of Gaussian elimination with partial pivoting, consuming its
/// inputs.
fn eliminate<T: Scalar>(
    mut a: Vec<Vec<Complex<T>>>,
    mut b: Vec<Complex<T>>,
) -> Result<Vec<Complex<T>>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    debug_assert_eq!(b.len(), n);

    let mut max_entry = T::zero();
    for row in &a {
        for entry in row {
            max_entry = max_entry.max(entry.norm());
        }
    }
    let tol = max_entry * T::epsilon() * real::<T>(n as f64);

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r][col]
                    .norm()
                    .partial_cmp(&a[s][col].norm())
                    .expect("pivot magnitudes are finite")
            })
            .expect("non-empty pivot range");
        let pivot = a[pivot_row][col];
        if pivot.norm() <= tol {
            return Err(Error::SingularSystem(format!(
                "pivot magnitude {:e} at column {col} below tolerance {:e}",
                pivot.norm().to_f64().unwrap_or(f64::NAN),
                tol.to_f64().unwrap_or(f64::NAN),
            )));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..n {
            let factor = a[row][col] / pivot;
            if factor.norm() == T::zero() {
                continue;
            }
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] = a[row][k] - sub;
            }
            let sub = factor * b[col];
            b[row] = b[row] - sub;
        }
    }

    let zero = Complex::new(T::zero(), T::zero());
    let mut x = vec![zero; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc = acc - a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

/// Solves the real system A x = b by funneling through the complex solver;
/// used for the small normal-equation fits in peak refinement.
pub(crate) fn solve_real<T: Scalar>(a: Vec<Vec<T>>, b: Vec<T>) -> Result<Vec<T>> {
    let a = a
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| Complex::new(v, T::zero()))
                .collect()
        })
        .collect();
    let b = b.into_iter().map(|v| Complex::new(v, T::zero())).collect();
    Ok(solve_complex(a, b)?.into_iter().map(|z| z.re).collect())
}
