//! The Riccati form of the Poincaré equation.
//!
//! With `β_n = 4 G_n / (F_n F_{n-1}) - 1` and
//! `X_n = -2 x_{n+1} / (F_n x_n) - 1`, the linear equation for `x` becomes
//! `X_n (1 + X_{n-1}) = X_{n-1} - β_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::JacobiFamily;
use crate::poincare::{f_from_powers, g_from_powers, poincare_f, poincare_g};
use crate::signed_log::{SignedLogSeq, SignedLogValue};

/// Smallest `|F_n|` accepted in `β_n`.
pub const F_GUARD: f64 = 1e-9;
/// Smallest `|1 ± X|` accepted in a Riccati step.
pub const STEP_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(&self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

fn check_f(f: f64, n: usize) -> Result<f64> {
    if f.abs() < F_GUARD {
        Err(Error::Singular {
            index: n,
            what: format!("|F_{n}| = {:e} below {F_GUARD:e}", f.abs()),
        })
    } else {
        Ok(f)
    }
}

pub fn beta(family: &JacobiFamily, lambda: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::BelowAdmissible { index: n, min: 2 });
    }
    let f_n = check_f(poincare_f(family, lambda, n)?, n)?;
    let f_prev = check_f(poincare_f(family, lambda, n - 1)?, n - 1)?;
    let g = poincare_g(family, lambda, n)?;
    Ok(4.0 * g / (f_n * f_prev) - 1.0)
}

/// `β_n` from the powers `k^α`, `k = 2n-2 ..= 2n+2`, without guards.
/// Used by scans that share the powers across a λ grid.
#[inline]
pub(crate) fn beta_from_powers(c1: f64, c2: f64, lambda: f64, p: &[f64; 5]) -> f64 {
    let f_prev = f_from_powers(c1, c2, lambda, p[0], p[1], p[2]);
    let f_n = f_from_powers(c1, c2, lambda, p[2], p[3], p[4]);
    let g = g_from_powers(c1, c2, lambda, p[1], p[2], p[3], p[4]);
    4.0 * g / (f_n * f_prev) - 1.0
}

/// `φ_n = sqrt(-β_n)`.
pub fn phi(family: &JacobiFamily, lambda: f64, n: usize) -> Result<f64> {
    let b = beta(family, lambda, n)?;
    phi_of(b, lambda, n)
}

pub(crate) fn phi_of(beta: f64, lambda: f64, n: usize) -> Result<f64> {
    if beta >= 0.0 {
        Err(Error::NonNegativeBeta {
            index: n,
            lambda,
            beta,
        })
    } else {
        Ok((-beta).sqrt())
    }
}

/// `X_n = (1 + β_n) X_{n-1} / (1 + X_{n-1}) - β_n`.
#[inline]
pub fn riccati_forward_step(x_prev: f64, beta_n: f64) -> Result<f64> {
    if (1.0 + x_prev).abs() < STEP_GUARD {
        return Err(Error::Singular {
            index: 0,
            what: format!("forward Riccati step at X = {x_prev}"),
        });
    }
    Ok((1.0 + beta_n) * x_prev / (1.0 + x_prev) - beta_n)
}

/// `X_{n-1} = (X_n + β_n) / (1 - X_n)`.
#[inline]
pub fn riccati_backward_step(x_n: f64, beta_n: f64) -> Result<f64> {
    if (1.0 - x_n).abs() < STEP_GUARD {
        return Err(Error::Singular {
            index: 0,
            what: format!("backward Riccati step at X = {x_n}"),
        });
    }
    Ok((x_n + beta_n) / (1.0 - x_n))
}

/// `X_n` on `[start, start + values.len())`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiSolution {
    start: usize,
    values: Vec<f64>,
    branch: Option<Branch>,
}

impl RiccatiSolution {
    pub fn new(start: usize, values: Vec<f64>, branch: Option<Branch>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty Riccati solution".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Singular {
                index: start + i,
                what: "non-finite Riccati value".into(),
            });
        }
        Ok(Self {
            start,
            values,
            branch,
        })
    }

    pub fn start_index(&self) -> usize {
        self.start
    }

    pub fn end_index(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn branch(&self) -> Option<Branch> {
        self.branch
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.start)
            .and_then(|i| self.values.get(i))
            .copied()
    }

    pub fn at(&self, n: usize) -> f64 {
        self.get(n)
            .unwrap_or_else(|| panic!("index {n} outside [{}, {}]", self.start, self.end_index()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.start + i, v))
    }

    /// Whether `|X_n| < 1` and `1 + X_n > 0` at every stored index.
    pub fn is_bounded(&self) -> bool {
        self.values.iter().all(|&v| v.abs() < 1.0 && 1.0 + v > 0.0)
    }

    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        let from = from.max(self.start);
        let to = to.min(self.end_index());
        if to < from {
            return Err(Error::InvalidParameter(format!(
                "empty slice [{from}, {to}]"
            )));
        }
        Self::new(
            from,
            self.values[from - self.start..=to - self.start].to_vec(),
            self.branch,
        )
    }
}

/// `X_n = -2 x_{n+1} / (F_n x_n) - 1` for every `n` with `x_{n+1}` stored.
pub fn x_to_riccati(
    family: &JacobiFamily,
    lambda: f64,
    x: &SignedLogSeq,
) -> Result<RiccatiSolution> {
    let mut values = Vec::with_capacity(x.len() - 1);
    for n in x.start_index()..x.end_index() {
        let xn = x.at(n);
        if xn.is_zero() {
            return Err(Error::Singular {
                index: n,
                what: "x_n = 0 in the Riccati transform".into(),
            });
        }
        let f = check_f(poincare_f(family, lambda, n)?, n)?;
        values.push(-2.0 * x.at(n + 1).ratio(&xn) / f - 1.0);
    }
    RiccatiSolution::new(x.start_index(), values, None)
}

/// `x_{n+1} / x_n = -(F_n / 2)(1 + X_n)`.
#[inline]
pub fn x_ratio(f_n: f64, x_n: f64) -> f64 {
    -0.5 * f_n * (1.0 + x_n)
}

/// Rebuild `x` on `[start, end + 1]` from `X` and a starting value.
pub fn riccati_to_x(
    family: &JacobiFamily,
    lambda: f64,
    sol: &RiccatiSolution,
    x_start: SignedLogValue,
) -> Result<SignedLogSeq> {
    let mut values = Vec::with_capacity(sol.values.len() + 1);
    let mut cur = x_start;
    values.push(cur);
    for (n, xn) in sol.iter() {
        let f = poincare_f(family, lambda, n)?;
        cur = cur.mul_f64(x_ratio(f, xn));
        values.push(cur);
    }
    SignedLogSeq::new(sol.start, values)
}

/// `±φ_n + α/(4n)`.
pub fn formal_x(family: &JacobiFamily, lambda: f64, n: usize, branch: Branch) -> Result<f64> {
    Ok(branch.sign() * phi(family, lambda, n)? + family.alpha() / (4.0 * n as f64))
}

/// Largest scaled residual of `X_n + X_n X_{n-1} - X_{n-1} + β_n` over the
/// solution.
pub fn riccati_residual(family: &JacobiFamily, lambda: f64, sol: &RiccatiSolution) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in sol.start + 1..=sol.end_index() {
        let b = beta(family, lambda, n)?;
        let (x, xp) = (sol.at(n), sol.at(n - 1));
        let terms = [x, x * xp, -xp, b];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let sum: f64 = terms.iter().sum();
        if scale > 0.0 {
            worst = worst.max(sum.abs() / scale);
        }
    }
    Ok(worst)
}

/// Largest `|X_n² + β_n - (X_n - 1)(X_n - X_{n-1})|` over the solution.
pub fn rectifier_residual(
    family: &JacobiFamily,
    lambda: f64,
    sol: &RiccatiSolution,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in sol.start + 1..=sol.end_index() {
        let b = beta(family, lambda, n)?;
        let (x, xp) = (sol.at(n), sol.at(n - 1));
        let t = (x - 1.0) * (x - xp);
        worst = worst.max((x * x + b - t).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poincare::solve_poincare;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fam() -> JacobiFamily {
        JacobiFamily::reference()
    }

    fn beta_oracle(l: f64, n: usize) -> f64 {
        let k = |m: usize| (m as f64).powf(0.4);
        let b = |m: usize| if m % 2 == 1 { 2.0 * k(m) } else { k(m) };
        let f = |j: usize| {
            (k(2 * j + 2) - l) * b(2 * j).powi(2) / ((k(2 * j) - l) * b(2 * j + 1) * b(2 * j + 2))
                - (k(2 * j + 1) - l) * (k(2 * j + 2) - l) / (b(2 * j + 1) * b(2 * j + 2))
                + b(2 * j + 1) / b(2 * j + 2)
        };
        let g = (k(2 * n + 2) - l) * b(2 * n - 1) * b(2 * n)
            / ((k(2 * n) - l) * b(2 * n + 1) * b(2 * n + 2));
        4.0 * g / (f(n) * f(n - 1)) - 1.0
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(
            beta(&fam(), 1.0, 100).unwrap(),
            beta_oracle(1.0, 100),
            max_relative = 1e-13
        );
        for l in [1.0, 1.25, 1.5, 1.75, 2.0] {
            let b = beta(&fam(), l, 1_000_000).unwrap();
            assert!(b < 0.0 && b.abs() < 0.01, "β = {b}");
            let p = [
                2.0 * 1_000_000.0 - 2.0,
                1_999_999.0,
                2_000_000.0,
                2_000_001.0,
                2_000_002.0,
            ]
            .map(|k: f64| k.powf(0.4));
            assert_relative_eq!(beta_from_powers(2.0, 1.0, l, &p), b, max_relative = 1e-12);
        }
    }

    #[test]
    fn phi_guard_and_identity() {
        let f = fam();
        match phi(&f, 2.0, 2) {
            Err(Error::NonNegativeBeta { .. }) | Err(Error::BelowAdmissible { .. }) => {}
            Ok(v) => {
                let b = beta(&f, 2.0, 2).unwrap();
                assert_eq!(v * v + b, 0.0);
            }
            Err(e) => panic!("unexpected {e}"),
        }
        assert!(matches!(
            phi_of(0.01, 2.0, 2),
            Err(Error::NonNegativeBeta { index: 2, .. })
        ));
        let n = 50_000;
        let p = phi(&f, 1.0, n).unwrap();
        let b = beta(&f, 1.0, n).unwrap();
        assert!((p * p + b).abs() <= 1e-17);
        // φ_n n^{α/2} → ψ0(1) = 0.870550563296124
        let lead = phi(&f, 1.0, 1_000_000).unwrap() * 1e6f64.powf(0.2);
        assert!((lead - 0.870_550_563_296_124).abs() < 0.05, "{lead}");
    }

    #[test]
    fn steps() {
        assert_eq!(riccati_forward_step(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(riccati_backward_step(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(riccati_backward_step(0.0, -0.04).unwrap(), -0.04);
        for b in [-0.04_f64, -0.3, -0.001] {
            let r = (-b).sqrt();
            assert_relative_eq!(riccati_forward_step(r, b).unwrap(), r, max_relative = 1e-15);
            assert_relative_eq!(
                riccati_forward_step(-r, b).unwrap(),
                -r,
                max_relative = 1e-14
            );
        }
        assert!(riccati_forward_step(-1.0, 0.1).is_err());
        assert!(riccati_backward_step(1.0, 0.1).is_err());
    }

    #[test]
    fn constant_coefficient_sanity() {
        // F = -2, G = 1 and x ≡ 1: X = -2 * 1 / (-2 * 1) - 1 = 0.
        assert_eq!(-2.0 * 1.0 / (-2.0 * 1.0) - 1.0, 0.0);
        assert_eq!(x_ratio(-2.0, 0.0), 1.0);
    }

    #[test]
    fn formal_signs() {
        let f = fam();
        assert!(formal_x(&f, 1.5, 10_000, Branch::Plus).unwrap() > 0.0);
        assert!(formal_x(&f, 1.5, 10_000, Branch::Minus).unwrap() < 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn step_inverse(x in -0.9f64..0.9, b in -0.5f64..0.0) {
            let y = riccati_forward_step(x, b).unwrap();
            let back = riccati_backward_step(y, b).unwrap();
            prop_assert!((back - x).abs() <= 1e-14);
            let z = riccati_backward_step(x, b).unwrap();
            prop_assume!((1.0 + z).abs() > 1e-3);
            let fwd = riccati_forward_step(z, b).unwrap();
            prop_assert!((fwd - x).abs() <= 1e-13);
        }

        #[test]
        fn transform_of_poincare_solution(
            l in 1.0f64..2.0,
            a in -3.0f64..3.0,
            c in -3.0f64..3.0,
        ) {
            prop_assume!(a.abs() > 1e-2);
            let f = fam();
            let x = solve_poincare(
                &f, l, 3, SignedLogValue::from_f64(a), SignedLogValue::from_f64(c), 2_000,
            ).unwrap();
            prop_assume!(x.values().iter().all(|v| !v.is_zero()));
            let sol = x_to_riccati(&f, l, &x).unwrap();
            prop_assert!(riccati_residual(&f, l, &sol).unwrap() <= 1e-12);
            prop_assert!(rectifier_residual(&f, l, &sol).unwrap() <= 1e-12);
            let rebuilt = riccati_to_x(&f, l, &sol, x.at(3)).unwrap();
            for n in [10usize, 100, 1000, 1999] {
                let d = rebuilt.at(n).logmag() - x.at(n).logmag();
                prop_assert!(d.abs() <= 1e-12 * (1.0 + x.at(n).logmag().abs()), "n = {} d = {:e}", n, d);
                prop_assert_eq!(rebuilt.at(n).sign(), x.at(n).sign());
            }
        }
    }
}
