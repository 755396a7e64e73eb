//! Gauss-Legendre quadrature on [-1, 1].
//!
//! Nodes are the roots of the Legendre polynomial P_n, located by Newton
//! iteration from the classical cosine initial guesses; weights follow from
//!
//! ```text
//! w_i = 2 / ((1 - x_i^2) * P'_n(x_i)^2)
//! ```
//!
//! The sphere integrals in this crate keep n in the hundreds, where this
//! construction is fast and accurate to machine precision. For odd n the
//! middle node is pinned to exactly zero (P_n is odd), which the far-field
//! grid relies on to sample theta = pi/2 without rounding.

use crate::scalar::{real, Scalar};

/// Legendre P_n(x) and its derivative via the three-term recurrence.
fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut prev = T::one(); // P_0
    let mut current = x; // P_1
    for k in 2..=n {
        let kf = real::<T>(k as f64);
        let next = ((real::<T>((2 * k - 1) as f64) * x * current)
            - (kf - T::one()) * prev)
            / kf;
        prev = current;
        current = next;
    }
    // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1); roots never sit at x = +-1
    let derivative =
        real::<T>(n as f64) * (x * current - prev) / (x * x - T::one());
    (current, derivative)
}

/// Gauss-Legendre nodes (ascending) and weights for `n` points on [-1, 1].
///
/// Panics if `n` is zero.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "quadrature needs at least one node");
    if n == 1 {
        return (vec![T::zero()], vec![real(2.0)]);
    }
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let half = n / 2;
    for i in 0..half {
        // i-th root counted from the +1 end
        let guess = (T::PI() * (real::<T>(i as f64) + real(0.75))
            / (real::<T>(n as f64) + real(0.5)))
        .cos();
        let mut x = guess;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let step = p / dp;
            x = x - step;
            if step.abs() <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = real::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        // odd P_n vanishes at 0 exactly
        let x = T::zero();
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[half] = x;
        weights[half] = real::<T>(2.0) / (dp * dp);
    }
    (nodes, weights)
}
