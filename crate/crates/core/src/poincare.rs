//! Reduction of the recurrence to a Poincaré type equation on odd indices.
//!
//! With `x_n = f_{2n+1}` and `y_n = f_{2n}`, eliminating `y` gives
//! `x_{n+1} + F_n x_n + G_n x_{n-1} = 0`, and `y` is recovered from
//! `b_{2n-1} x_{n-1} + q_{2n} y_n + b_{2n} x_n = λ y_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{JacobiFamily, SpectralWindow};
use crate::recurrence::{residual_at, scaled_combination, ScaledPair};
use crate::signed_log::{SignedLogSeq, SignedLogValue};

/// Relative threshold for `|λ - q_{2n}|` in the reconstruction.
pub const RECONSTRUCT_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareCoeffs {
    pub n: usize,
    pub f: f64,
    pub g: f64,
}

/// Smallest `N >= 1` with `(2N)^α > hi`.
pub fn min_index_for(hi: f64, alpha: f64) -> usize {
    if hi <= 0.0 {
        return 1;
    }
    let mut n = (hi.powf(1.0 / alpha) / 2.0).ceil().max(1.0) as usize;
    while ((2 * n) as f64).powf(alpha) <= hi {
        n += 1;
    }
    n
}

/// Start of the admissible range for a window: `q_{2n}` lies above the
/// window for every `n >= N`.
pub fn min_index_n(window: &SpectralWindow, alpha: f64) -> usize {
    min_index_for(window.hi(), alpha)
}

fn require_admissible(family: &JacobiFamily, lambda: f64, n: usize) -> Result<()> {
    if n < 1 || family.diagonal(2 * n) <= lambda {
        return Err(Error::BelowAdmissible {
            index: n,
            min: min_index_for(lambda, family.alpha()),
        });
    }
    Ok(())
}

/// `F_n` from the powers `(2n)^α, (2n+1)^α, (2n+2)^α`.
#[inline]
pub(crate) fn f_from_powers(c1: f64, c2: f64, lambda: f64, p0: f64, p1: f64, p2: f64) -> f64 {
    let b0 = c2 * p0;
    let b1 = c1 * p1;
    let b2 = c2 * p2;
    (p2 - lambda) * b0 * b0 / ((p0 - lambda) * b1 * b2) - (p1 - lambda) * (p2 - lambda) / (b1 * b2)
        + b1 / b2
}

/// `G_n` from the powers `(2n-1)^α, (2n)^α, (2n+1)^α, (2n+2)^α`.
#[inline]
pub(crate) fn g_from_powers(
    c1: f64,
    c2: f64,
    lambda: f64,
    pm: f64,
    p0: f64,
    p1: f64,
    p2: f64,
) -> f64 {
    (p2 - lambda) * (c1 * pm) * (c2 * p0) / ((p0 - lambda) * (c1 * p1) * (c2 * p2))
}

pub fn poincare_f(family: &JacobiFamily, lambda: f64, n: usize) -> Result<f64> {
    require_admissible(family, lambda, n)?;
    let (b2n, b2n1, b2n2) = (
        family.weight(2 * n),
        family.weight(2 * n + 1),
        family.weight(2 * n + 2),
    );
    let (q2n, q2n1, q2n2) = (
        family.diagonal(2 * n),
        family.diagonal(2 * n + 1),
        family.diagonal(2 * n + 2),
    );
    Ok((q2n2 - lambda) * b2n * b2n / ((q2n - lambda) * b2n1 * b2n2)
        - (q2n1 - lambda) * (q2n2 - lambda) / (b2n1 * b2n2)
        + b2n1 / b2n2)
}

pub fn poincare_g(family: &JacobiFamily, lambda: f64, n: usize) -> Result<f64> {
    require_admissible(family, lambda, n)?;
    Ok(
        (family.diagonal(2 * n + 2) - lambda) * family.weight(2 * n - 1) * family.weight(2 * n)
            / ((family.diagonal(2 * n) - lambda)
                * family.weight(2 * n + 1)
                * family.weight(2 * n + 2)),
    )
}

pub fn poincare_coeffs(family: &JacobiFamily, lambda: f64, n: usize) -> Result<PoincareCoeffs> {
    Ok(PoincareCoeffs {
        n,
        f: poincare_f(family, lambda, n)?,
        g: poincare_g(family, lambda, n)?,
    })
}

/// The quotients `A_n, B_n, C_n` with
/// `F_n = (c2/c1) A_n - B_n/(c1 c2) + (c1/c2) C_n` and
/// `G_n = A_n (2n-1)^α/(2n)^α`.
pub fn abc_quotients(family: &JacobiFamily, lambda: f64, n: usize) -> Result<(f64, f64, f64)> {
    require_admissible(family, lambda, n)?;
    let p0 = family.power(2 * n);
    let p1 = family.power(2 * n + 1);
    let p2 = family.power(2 * n + 2);
    let a = (p2 - lambda) * p0 * p0 / ((p0 - lambda) * p1 * p2);
    let b = (p1 - lambda) * (p2 - lambda) / (p1 * p2);
    let c = p1 / p2;
    Ok((a, b, c))
}

/// Odd- and even-index subsequences `(x_n = f_{2n+1}, y_n = f_{2n})`, each
/// indexed from 1.
pub fn split_f(f: &SignedLogSeq) -> Result<(SignedLogSeq, SignedLogSeq)> {
    let lo = f.start_index();
    let hi = f.end_index();
    let x_lo = (lo / 2).max(1);
    let x_hi = (hi - 1) / 2;
    let y_lo = lo.div_ceil(2);
    let y_hi = hi / 2;
    let x: Vec<_> = (x_lo..=x_hi).map(|n| f.at(2 * n + 1)).collect();
    let y: Vec<_> = (y_lo..=y_hi).map(|n| f.at(2 * n)).collect();
    Ok((SignedLogSeq::new(x_lo, x)?, SignedLogSeq::new(y_lo, y)?))
}

/// Rebuild `f` on `[2a+1, 2b+1]` from `x` on `[a, b]`, with
/// `y_n = (b_{2n-1} x_{n-1} + b_{2n} x_n) / (λ - q_{2n})`.
pub fn reconstruct_f_from_x(
    family: &JacobiFamily,
    lambda: f64,
    x: &SignedLogSeq,
) -> Result<SignedLogSeq> {
    let a = x.start_index();
    let b = x.end_index();
    let mut f = Vec::with_capacity(2 * (b - a) + 1);
    f.push(x.at(a));
    for n in a + 1..=b {
        f.push(reconstruct_y(family, lambda, n, x.at(n - 1), x.at(n))?);
        f.push(x.at(n));
    }
    SignedLogSeq::new(2 * a + 1, f)
}

/// `y_n` from `x_{n-1}` and `x_n`.
pub fn reconstruct_y(
    family: &JacobiFamily,
    lambda: f64,
    n: usize,
    x_prev: SignedLogValue,
    x_n: SignedLogValue,
) -> Result<SignedLogValue> {
    let q = family.diagonal(2 * n);
    let denom = lambda - q;
    if denom.abs() < RECONSTRUCT_GUARD * lambda.abs().max(q) {
        return Err(Error::Singular {
            index: 2 * n,
            what: format!("λ = {lambda} coincides with q_{} = {q}", 2 * n),
        });
    }
    let (sum, _, shift) = scaled_combination(&[
        (family.weight(2 * n - 1), x_prev),
        (family.weight(2 * n), x_n),
    ]);
    Ok(SignedLogValue::from_scaled(sum / denom, shift))
}

/// Largest scaled residual of `x_{n+1} + F_n x_n + G_n x_{n-1}` over the
/// interior of `x`.
pub fn verify_poincare(family: &JacobiFamily, lambda: f64, x: &SignedLogSeq) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in x.start_index() + 1..x.end_index() {
        let c = poincare_coeffs(family, lambda, n)?;
        let (sum, scale, _) =
            scaled_combination(&[(1.0, x.at(n + 1)), (c.f, x.at(n)), (c.g, x.at(n - 1))]);
        if scale > 0.0 {
            worst = worst.max(sum.abs() / scale);
        }
    }
    Ok(worst)
}

/// Largest scaled residual of the original recurrence at odd interior
/// indices of `f`. These are the equations the reduction leaves implicit.
pub fn odd_index_residual(family: &JacobiFamily, lambda: f64, f: &SignedLogSeq) -> f64 {
    let lo = (f.start_index() + 1).max(2);
    (lo..f.end_index())
        .filter(|n| n % 2 == 1)
        .map(|n| residual_at(family, lambda, f, n))
        .fold(0.0, f64::max)
}

/// Forward solution of the Poincaré equation on `[n0, n_max]` from
/// `(x_{n0}, x_{n0+1})`.
pub fn solve_poincare(
    family: &JacobiFamily,
    lambda: f64,
    n0: usize,
    x0: SignedLogValue,
    x1: SignedLogValue,
    n_max: usize,
) -> Result<SignedLogSeq> {
    if x0.is_zero() && x1.is_zero() {
        return Err(Error::ZeroSeed);
    }
    if n_max <= n0 {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} must exceed n0 = {n0}"
        )));
    }
    require_admissible(family, lambda, n0.max(1))?;
    let mut values = Vec::with_capacity(n_max - n0 + 1);
    values.push(x0);
    values.push(x1);
    let mut pair = ScaledPair::new(x0, x1);
    for n in n0 + 1..n_max {
        let c = poincare_coeffs(family, lambda, n)?;
        pair.push(-c.f * pair.hi - c.g * pair.lo);
        values.push(pair.hi_value());
    }
    SignedLogSeq::new(n0, values)
}
