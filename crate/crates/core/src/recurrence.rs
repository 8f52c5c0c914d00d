//! The three-term recurrence `b_{n-1} f_{n-1} + q_n f_n + b_n f_{n+1} = λ f_n`
//! run forward and backward on a rescaled frame.
//!
//! The active pair is held as two `f64`s sharing one binary exponent. When
//! the larger of the two leaves `[2^-500, 2^500]` both are multiplied by an
//! exact power of two, so rescaling introduces no rounding.

use crate::error::{Error, Result};
use crate::family::JacobiFamily;
use crate::signed_log::{SignedLogSeq, SignedLogValue};

const RESCALE_HI: i64 = 500;

/// Two consecutive values `(lo, hi) * 2^exp`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledPair {
    pub lo: f64,
    pub hi: f64,
    pub exp: i64,
}

impl ScaledPair {
    pub fn new(a: SignedLogValue, b: SignedLogValue) -> Self {
        let exp = crate::signed_log::common_exponent(&[a, b]);
        Self {
            lo: a.scaled_down(exp),
            hi: b.scaled_down(exp),
            exp,
        }
    }

    /// Shift in `next` as the new `hi`, dropping `lo`, then renormalize.
    #[inline]
    pub fn push(&mut self, next: f64) {
        self.lo = self.hi;
        self.hi = next;
        self.renormalize();
    }

    #[inline]
    fn renormalize(&mut self) {
        let m = self.lo.abs().max(self.hi.abs());
        if m == 0.0 {
            return;
        }
        let e = ((m.to_bits() >> 52) & 0x7ff) as i64 - 1023;
        if !(-RESCALE_HI..=RESCALE_HI).contains(&e) {
            self.lo = crate::signed_log::ldexp(self.lo, -e);
            self.hi = crate::signed_log::ldexp(self.hi, -e);
            self.exp += e;
        }
    }

    #[inline]
    pub fn hi_value(&self) -> SignedLogValue {
        SignedLogValue::from_scaled(self.hi, self.exp)
    }
}

fn check_seed(a: SignedLogValue, b: SignedLogValue) -> Result<()> {
    if a.is_zero() && b.is_zero() {
        Err(Error::ZeroSeed)
    } else {
        Ok(())
    }
}

/// Forward solution on `1..=n_max` from `f_1 = f1`, `f_2 = f2`.
pub fn recurrence_forward(
    family: &JacobiFamily,
    lambda: f64,
    f1: f64,
    f2: f64,
    n_max: usize,
) -> Result<SignedLogSeq> {
    forward_from(
        family,
        lambda,
        1,
        SignedLogValue::from_f64(f1),
        SignedLogValue::from_f64(f2),
        n_max,
    )
}

/// Forward solution on `m..=n_max` from the pair `(f_m, f_{m+1})`.
pub fn forward_from(
    family: &JacobiFamily,
    lambda: f64,
    m: usize,
    f_m: SignedLogValue,
    f_m1: SignedLogValue,
    n_max: usize,
) -> Result<SignedLogSeq> {
    if m < 1 {
        return Err(Error::InvalidParameter("start index must be >= 1".into()));
    }
    if n_max < m + 1 {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} must exceed the start index {m}"
        )));
    }
    check_seed(f_m, f_m1)?;
    let mut values = Vec::with_capacity(n_max - m + 1);
    values.push(f_m);
    values.push(f_m1);
    let mut pair = ScaledPair::new(f_m, f_m1);
    let mut b_prev = family.weight(m);
    for n in m + 1..n_max {
        let b_n = family.weight(n);
        let next = ((lambda - family.diagonal(n)) * pair.hi - b_prev * pair.lo) / b_n;
        pair.push(next);
        values.push(pair.hi_value());
        b_prev = b_n;
    }
    SignedLogSeq::new(m, values)
}

/// Backward solution on `down_to..=m+1` from the pair `(f_m, f_{m+1})`.
pub fn recurrence_backward(
    family: &JacobiFamily,
    lambda: f64,
    m: usize,
    f_m: SignedLogValue,
    f_m1: SignedLogValue,
    down_to: usize,
) -> Result<SignedLogSeq> {
    if down_to < 1 || m <= down_to {
        return Err(Error::InvalidParameter(format!(
            "need m > down_to >= 1, got m = {m}, down_to = {down_to}"
        )));
    }
    check_seed(f_m, f_m1)?;
    let mut rev = Vec::with_capacity(m + 2 - down_to);
    rev.push(f_m1);
    rev.push(f_m);
    // pair holds (f_{n+1}, f_n) in (lo, hi)
    let mut pair = ScaledPair::new(f_m1, f_m);
    let mut b_n = family.weight(m);
    for n in (down_to + 1..=m).rev() {
        let b_nm1 = family.weight(n - 1);
        let prev = ((lambda - family.diagonal(n)) * pair.hi - b_n * pair.lo) / b_nm1;
        pair.push(prev);
        rev.push(pair.hi_value());
        b_n = b_nm1;
    }
    rev.reverse();
    SignedLogSeq::new(down_to, rev)
}

/// Polynomials of the first kind: `f_1 = 1`, `f_2 = (λ - q_1)/b_1`.
pub fn first_kind_polynomials(
    family: &JacobiFamily,
    lambda: f64,
    n_max: usize,
) -> Result<SignedLogSeq> {
    let f2 = (lambda - family.diagonal(1)) / family.weight(1);
    recurrence_forward(family, lambda, 1.0, f2, n_max)
}

/// `Σ c_i v_i` together with `max |c_i v_i|`, both in units of `2^shift`.
pub(crate) fn scaled_combination(terms: &[(f64, SignedLogValue)]) -> (f64, f64, i64) {
    let shift = terms
        .iter()
        .filter(|(c, v)| *c != 0.0 && !v.is_zero())
        .map(|(_, v)| v.exponent())
        .max()
        .unwrap_or(0);
    let mut sum = 0.0;
    let mut scale = 0.0f64;
    for &(c, v) in terms {
        let t = c * v.scaled_down(shift);
        sum += t;
        scale = scale.max(t.abs());
    }
    (sum, scale, shift)
}

/// Three-term residual at interior index `n`, divided by the largest of the
/// three terms (0 when all three vanish).
pub fn residual_at(family: &JacobiFamily, lambda: f64, seq: &SignedLogSeq, n: usize) -> f64 {
    let (sum, scale, _) = scaled_combination(&[
        (family.weight(n - 1), seq.at(n - 1)),
        (family.diagonal(n) - lambda, seq.at(n)),
        (family.weight(n), seq.at(n + 1)),
    ]);
    if scale == 0.0 {
        0.0
    } else {
        sum.abs() / scale
    }
}

/// Largest scaled three-term residual over all interior indices of `seq`.
pub fn recurrence_residual(family: &JacobiFamily, lambda: f64, seq: &SignedLogSeq) -> f64 {
    let lo = (seq.start_index() + 1).max(2);
    let hi = seq.end_index();
    (lo..hi)
        .map(|n| residual_at(family, lambda, seq, n))
        .fold(0.0, f64::max)
}

/// First-row residual `|(q_1 - λ) f_1 + b_1 f_2|` divided by its larger term.
pub fn boundary_residual(family: &JacobiFamily, lambda: f64, seq: &SignedLogSeq) -> Result<f64> {
    let (f1, f2) = match (seq.get(1), seq.get(2)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::InvalidParameter(
                "sequence does not contain indices 1 and 2".into(),
            ))
        }
    };
    let (sum, scale, _) =
        scaled_combination(&[(family.diagonal(1) - lambda, f1), (family.weight(1), f2)]);
    Ok(if scale == 0.0 { 0.0 } else { sum.abs() / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fam() -> JacobiFamily {
        JacobiFamily::reference()
    }

    #[test]
    fn zero_seed_rejected() {
        assert_eq!(
            recurrence_forward(&fam(), 1.0, 0.0, 0.0, 10).unwrap_err(),
            Error::ZeroSeed
        );
        let z = SignedLogValue::ZERO;
        assert_eq!(
            recurrence_backward(&fam(), 1.0, 10, z, z, 1).unwrap_err(),
            Error::ZeroSeed
        );
    }

    #[test]
    fn one_hand_step() {
        let s = first_kind_polynomials(&fam(), 1.0, 3).unwrap();
        assert_eq!(s.at(1).to_f64(), 1.0);
        assert_eq!(s.at(2).sign(), 0);
        // f3 = -b1 f1 / b2 = -2 / 2^0.4
        assert_relative_eq!(
            s.at(3).to_f64(),
            -1.515_716_566_510_398,
            max_relative = 1e-14
        );
        let s = first_kind_polynomials(&fam(), 1.5, 2).unwrap();
        assert_eq!(s.at(2).to_f64(), 0.25);
    }

    #[test]
    fn deep_forward_run_stays_finite_and_exact() {
        let s = first_kind_polynomials(&fam(), 1.3, 200_000).unwrap();
        let last = s.at(200_000);
        assert!(last.logmag() > 1000.0, "logmag {}", last.logmag());
        assert!(recurrence_residual(&fam(), 1.3, &s) <= 1e-13);
    }

    #[test]
    fn backward_inverts_forward() {
        let f = fam();
        let fwd = recurrence_forward(&f, 1.7, 0.3, -1.1, 16).unwrap();
        let back = recurrence_backward(&f, 1.7, 15, fwd.at(15), fwd.at(16), 1).unwrap();
        assert!(recurrence_residual(&f, 1.7, &back) <= 1e-13);
        assert_relative_eq!(back.at(1).to_f64(), 0.3, max_relative = 1e-10);
        assert_relative_eq!(back.at(2).to_f64(), -1.1, max_relative = 1e-10);
    }

    #[test]
    fn polynomial_in_lambda() {
        // f_n(λ) has degree n-1: a degree-(n-1) interpolant through 7 nodes
        // reproduces the value at an eighth node.
        let f = fam();
        let nodes = [0.3, 0.8, 1.1, 1.6, 2.2, 2.9, 3.5];
        let probe = 1.37;
        let val = |l: f64, n: usize| first_kind_polynomials(&f, l, 6).unwrap().at(n).to_f64();
        for n in 1..=6 {
            let xs = &nodes[..n];
            let mut interp = 0.0;
            for (i, &xi) in xs.iter().enumerate() {
                let mut w = 1.0;
                for (j, &xj) in xs.iter().enumerate() {
                    if i != j {
                        w *= (probe - xj) / (xi - xj);
                    }
                }
                interp += w * val(xi, n);
            }
            let exact = val(probe, n);
            assert!(
                (interp - exact).abs() <= 1e-10 * exact.abs().max(1.0),
                "n = {n}: {interp} vs {exact}"
            );
            // the remaining nodes lie on the same polynomial
            for &xk in &nodes[n..] {
                let mut p = 0.0;
                for (i, &xi) in xs.iter().enumerate() {
                    let mut w = 1.0;
                    for (j, &xj) in xs.iter().enumerate() {
                        if i != j {
                            w *= (xk - xj) / (xi - xj);
                        }
                    }
                    p += w * val(xi, n);
                }
                let e = val(xk, n);
                assert!((p - e).abs() <= 1e-10 * e.abs().max(1.0));
            }
        }
    }

    #[test]
    fn boundary_condition_of_first_kind() {
        let f = fam();
        for &l in &[0.5, 1.0, 1.9] {
            let s = first_kind_polynomials(&f, l, 10).unwrap();
            assert!(boundary_residual(&f, l, &s).unwrap() <= 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn backward_after_forward_is_identity(
            lambda in 0.1f64..4.0,
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            m in 2usize..20,
        ) {
            prop_assume!(a.abs().max(b.abs()) > 1e-3);
            let f = fam();
            let fwd = recurrence_forward(&f, lambda, a, b, m + 1).unwrap();
            prop_assert!(recurrence_residual(&f, lambda, &fwd) <= 1e-13);
            let back = recurrence_backward(&f, lambda, m, fwd.at(m), fwd.at(m + 1), 1).unwrap();
            prop_assert!(recurrence_residual(&f, lambda, &back) <= 1e-13);
            let scale = a.abs().max(b.abs());
            let da = (back.at(1).to_f64() - a).abs() / scale;
            let db = (back.at(2).to_f64() - b).abs() / scale;
            prop_assert!(da <= 1e-10 && db <= 1e-10, "da {:e} db {:e}", da, db);
        }

        #[test]
        fn backward_residual_deep(
            lambda in 0.1f64..8.0,
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
            m in 3usize..20_000,
        ) {
            prop_assume!(a.abs() + b.abs() > 1e-6);
            let f = fam();
            let back = recurrence_backward(
                &f, lambda, m, SignedLogValue::from_f64(a), SignedLogValue::from_f64(b), 1,
            ).unwrap();
            prop_assert!(recurrence_residual(&f, lambda, &back) <= 1e-13);
        }
    }
}
