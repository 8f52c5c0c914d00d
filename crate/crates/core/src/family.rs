//! The two-parameter Jacobi family `b_n = n^α c_n`, `q_n = n^α`, with
//! `c_n` alternating between `c1` (odd n) and `c2` (even n).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when deciding whether `|c1 - c2| = 1` holds.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[cfg(not(feature = "wide-alpha"))]
const ALPHA_RANGE: (f64, f64) = (1.0 / 3.0, 0.5);
#[cfg(feature = "wide-alpha")]
const ALPHA_RANGE: (f64, f64) = (0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiFamily {
    c1: f64,
    c2: f64,
    alpha: f64,
}

impl JacobiFamily {
    pub fn new(c1: f64, c2: f64, alpha: f64) -> Result<Self> {
        if !(c1.is_finite() && c1 > 0.0 && c2.is_finite() && c2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c1 and c2 must be positive, got c1={c1}, c2={c2}"
            )));
        }
        let (lo, hi) = ALPHA_RANGE;
        if !(alpha > lo && alpha < hi) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in ({lo:.6}, {hi}), got {alpha}"
            )));
        }
        Ok(Self { c1, c2, alpha })
    }

    /// The reference family (2, 1, 0.4) on the critical boundary.
    pub fn reference() -> Self {
        Self {
            c1: 2.0,
            c2: 1.0,
            alpha: 0.4,
        }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Product `c1 c2`, which is all the critical-case expansions depend on.
    pub fn c_product(&self) -> f64 {
        self.c1 * self.c2
    }

    /// `k^α` for a positive integer `k`.
    #[inline]
    pub fn power(&self, k: usize) -> f64 {
        (k as f64).powf(self.alpha)
    }

    #[inline]
    pub fn modulation(&self, n: usize) -> f64 {
        if n % 2 == 1 {
            self.c1
        } else {
            self.c2
        }
    }

    /// Off-diagonal entry `b_n = n^α c_n`.
    #[inline]
    pub fn weight(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        self.power(n) * self.modulation(n)
    }

    /// Diagonal entry `q_n = n^α`.
    #[inline]
    pub fn diagonal(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        self.power(n)
    }

    pub fn is_critical(&self) -> bool {
        ((self.c1 - self.c2).abs() - 1.0).abs() <= BOUNDARY_TOL
    }

    pub fn require_critical(&self) -> Result<()> {
        if self.is_critical() {
            Ok(())
        } else {
            Err(Error::OffCriticalBoundary {
                c1: self.c1,
                c2: self.c2,
            })
        }
    }

    /// `p = α/2`, the decay exponent of `sqrt(-β_n)`.
    pub fn p(&self) -> f64 {
        0.5 * self.alpha
    }

    /// Leading coefficient of `sqrt(-β_n) n^{α/2}`.
    pub fn psi0(&self, lambda: f64) -> f64 {
        (lambda * 2f64.powf(1.0 - self.alpha) / self.c_product()).sqrt()
    }

    /// Predicted exponent rate of `f_n^±`: `sqrt(λ/(2 c1 c2)) / (1 - α/2)`.
    pub fn decay_rate(&self, lambda: f64) -> f64 {
        (lambda / (2.0 * self.c_product())).sqrt() / (1.0 - 0.5 * self.alpha)
    }

    /// Result of the Carleman divergence test, with the partial sum of `1/b_n`.
    pub fn carleman_check(&self, n_terms: usize) -> Result<CarlemanReport> {
        if n_terms == 0 {
            return Err(Error::InvalidParameter("n_terms must be >= 1".into()));
        }
        let partial_sum = (1..=n_terms).map(|n| 1.0 / self.weight(n)).sum();
        Ok(CarlemanReport {
            // sum 1/b_n ~ sum n^{-α} diverges for α <= 1
            analytic_verdict: self.alpha <= 1.0,
            partial_sum,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlemanReport {
    pub analytic_verdict: bool,
    pub partial_sum: f64,
}

/// Bounded spectral window `[lo, hi]` with `0 < lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    lo: f64,
    hi: f64,
}

impl SpectralWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "window must satisfy 0 < lo < hi < inf, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lo && lambda <= self.hi
    }

    /// `points` equispaced values from `lo` to `hi` inclusive.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => (0..points)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (points - 1) as f64)
                .collect(),
        }
    }
}
