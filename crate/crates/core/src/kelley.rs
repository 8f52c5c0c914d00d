//! Minorant and majorant envelopes for the Riccati equation and the
//! solutions they trap.
//!
//! The envelopes are `v_n = ±φ_n + A/n` and `w_n = ±φ_n + B/n` with
//! `φ_n = sqrt(-β_n)`. On the plus branch any solution started between them
//! stays between them; on the minus branch the solution is obtained as the
//! limit of backward runs started on `w`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::JacobiFamily;
use crate::poincare::min_index_for;
use crate::riccati::{
    beta_from_powers, riccati_backward_step, riccati_forward_step, Branch, RiccatiSolution,
};

/// Envelope offsets around `p/2` with `p = α/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    p: f64,
    a_plus: f64,
    a_minus: f64,
    b_minus: f64,
    b_plus: f64,
}

impl BoundParams {
    /// Requires `A+ < p/2 < A-` and `B- < p/2 < B+`.
    pub fn new(p: f64, a_plus: f64, a_minus: f64, b_minus: f64, b_plus: f64) -> Result<Self> {
        let h = p / 2.0;
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "p must be positive, got {p}"
            )));
        }
        if !(a_plus < h && h < a_minus) {
            return Err(Error::InvalidParameter(format!(
                "need A+ < p/2 < A-, got A+ = {a_plus}, p/2 = {h}, A- = {a_minus}"
            )));
        }
        if !(b_minus < h && h < b_plus) {
            return Err(Error::InvalidParameter(format!(
                "need B- < p/2 < B+, got B- = {b_minus}, p/2 = {h}, B+ = {b_plus}"
            )));
        }
        Ok(Self {
            p,
            a_plus,
            a_minus,
            b_minus,
            b_plus,
        })
    }

    /// Offsets `0.9 p/2` and `1.1 p/2`.
    pub fn default_for(family: &JacobiFamily) -> Self {
        let h = family.p() / 2.0;
        Self {
            p: family.p(),
            a_plus: 0.9 * h,
            a_minus: 1.1 * h,
            b_minus: 0.9 * h,
            b_plus: 1.1 * h,
        }
    }

    /// Offsets `p/2 ∓ delta` on both sides.
    pub fn symmetric(family: &JacobiFamily, delta: f64) -> Result<Self> {
        let h = family.p() / 2.0;
        Self::new(family.p(), h - delta, h + delta, h - delta, h + delta)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn a_plus(&self) -> f64 {
        self.a_plus
    }
    pub fn a_minus(&self) -> f64 {
        self.a_minus
    }
    pub fn b_minus(&self) -> f64 {
        self.b_minus
    }
    pub fn b_plus(&self) -> f64 {
        self.b_plus
    }

    /// `(A, B)` for the branch: `v = ±φ + A/n`, `w = ±φ + B/n`.
    pub fn offsets(&self, branch: Branch) -> (f64, f64) {
        match branch {
            Branch::Plus => (self.a_plus, self.b_plus),
            Branch::Minus => (self.a_minus, self.b_minus),
        }
    }

    pub fn max_offset(&self) -> f64 {
        [self.a_plus, self.a_minus, self.b_minus, self.b_plus]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// The inequality that failed at some index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Inequality {
    /// `β_n < 0`, needed for `φ_n` to exist.
    NegativeBeta,
    /// `1 + β_n ≥ 0`.
    OnePlusBeta,
    /// `v_n > -1` and `w_n > -1` (plus branch).
    AboveMinusOne,
    /// `v_n ≤ w_n` (plus) or `v_n ≥ w_n` (minus).
    Ordering,
    /// `|v_n| < 1` and `|w_n| < 1` (minus branch).
    Bounded,
    /// `v_n ≤ (1 + β_n) v_{n-1}/(1 + v_{n-1}) - β_n`.
    Minorant,
    /// `w_n ≥ (1 + β_n) w_{n-1}/(1 + w_{n-1}) - β_n`.
    Majorant,
}

impl Inequality {
    pub fn describe(&self) -> &'static str {
        match self {
            Inequality::NegativeBeta => "beta_n < 0",
            Inequality::OnePlusBeta => "1 + beta_n >= 0",
            Inequality::AboveMinusOne => "v_n, w_n > -1",
            Inequality::Ordering => "envelope ordering",
            Inequality::Bounded => "|v_n|, |w_n| < 1",
            Inequality::Minorant => "minorant step inequality",
            Inequality::Majorant => "majorant step inequality",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub inequality: Inequality,
}

/// Incremental `k^α` table for `k = 2n-2 ..= 2n+2`.
struct PowerWindow {
    alpha: f64,
    n: usize,
    p: [f64; 5],
}

impl PowerWindow {
    fn new(alpha: f64, n: usize) -> Self {
        debug_assert!(n >= 2);
        let mut p = [0.0; 5];
        for (i, v) in p.iter_mut().enumerate() {
            *v = ((2 * n - 2 + i) as f64).powf(alpha);
        }
        Self { alpha, n, p }
    }

    fn advance(&mut self) {
        self.n += 1;
        self.p = [
            self.p[2],
            self.p[3],
            self.p[4],
            ((2 * self.n + 1) as f64).powf(self.alpha),
            ((2 * self.n + 2) as f64).powf(self.alpha),
        ];
    }
}

/// `β_n` for `n` in `[from, to]`, sharing powers between neighbours.
pub fn beta_range(family: &JacobiFamily, lambda: f64, from: usize, to: usize) -> Result<Vec<f64>> {
    let adm = min_index_for(lambda, family.alpha()) + 1;
    if from < adm.max(2) {
        return Err(Error::BelowAdmissible {
            index: from,
            min: adm.max(2),
        });
    }
    let mut out = Vec::with_capacity(to + 1 - from);
    let mut w = PowerWindow::new(family.alpha(), from);
    for n in from..=to {
        if n > from {
            w.advance();
        }
        out.push(beta_from_powers(family.c1(), family.c2(), lambda, &w.p));
    }
    Ok(out)
}

/// Failures at index `n` given the envelope values at `n - 1` and `n`.
/// `prev` is `None` at the first index of a scan.
#[inline]
fn check_index(
    branch: Branch,
    beta_n: f64,
    v: f64,
    w: f64,
    prev: Option<(f64, f64)>,
) -> Option<Inequality> {
    match branch {
        Branch::Plus => {
            if !(v > -1.0 && w > -1.0) {
                return Some(Inequality::AboveMinusOne);
            }
            if v > w {
                return Some(Inequality::Ordering);
            }
        }
        Branch::Minus => {
            if v < w {
                return Some(Inequality::Ordering);
            }
            if !(v.abs() < 1.0 && w.abs() < 1.0) {
                return Some(Inequality::Bounded);
            }
        }
    }
    let (vp, wp) = prev?;
    if 1.0 + beta_n < 0.0 {
        return Some(Inequality::OnePlusBeta);
    }
    if v > (1.0 + beta_n) * vp / (1.0 + vp) - beta_n {
        return Some(Inequality::Minorant);
    }
    if w < (1.0 + beta_n) * wp / (1.0 + wp) - beta_n {
        return Some(Inequality::Majorant);
    }
    None
}

/// How far the scan may look.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Largest index ever examined.
    pub cap: usize,
    /// A candidate start `N0` is accepted once `(N0, lookahead·N0]` (or up
    /// to the cap) is free of failures.
    pub lookahead: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            cap: 4_000_000,
            lookahead: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaScan {
    pub lambda: f64,
    pub valid_from: usize,
    /// Last index at which an inequality failed, if any.
    pub last_failure: Option<Violation>,
    /// Largest index checked.
    pub horizon: usize,
}

/// Per-λ start indices from which every envelope inequality holds.
pub fn scan_valid_from(
    family: &JacobiFamily,
    lambda: f64,
    bounds: &BoundParams,
    branch: Branch,
    config: &ScanConfig,
) -> Result<LambdaScan> {
    let (a, b) = bounds.offsets(branch);
    let s = branch.sign();
    let first = (min_index_for(lambda, family.alpha()) + 1).max(2);
    let mut win = PowerWindow::new(family.alpha(), first);
    let mut last_failure: Option<Violation> = None;
    let mut prev: Option<(f64, f64)> = None;
    let mut n = first;
    loop {
        let beta_n = beta_from_powers(family.c1(), family.c2(), lambda, &win.p);
        let nf = n as f64;
        let fail = if beta_n >= 0.0 {
            prev = None;
            Some(Inequality::NegativeBeta)
        } else {
            let phi = (-beta_n).sqrt();
            let v = s * phi + a / nf;
            let w = s * phi + b / nf;
            let f = check_index(branch, beta_n, v, w, prev);
            prev = Some((v, w));
            f
        };
        if let Some(inequality) = fail {
            last_failure = Some(Violation {
                index: n,
                inequality,
            });
        }
        // Step failures at n force N0 >= n; pointwise failures force N0 > n.
        let n0 = match last_failure {
            None => first,
            Some(v) => match v.inequality {
                Inequality::OnePlusBeta | Inequality::Minorant | Inequality::Majorant => v.index,
                _ => v.index + 1,
            },
        };
        let target = (config.lookahead * n0).min(config.cap);
        if n >= target {
            if 2 * n0 > config.cap {
                let diag = last_failure
                    .map(|v| format!("{} fails at n = {}", v.inequality.describe(), v.index))
                    .unwrap_or_default();
                return Err(Error::ScanCapExceeded {
                    cap: config.cap,
                    lambda,
                    diagnostic: diag,
                });
            }
            return Ok(LambdaScan {
                lambda,
                valid_from: n0,
                last_failure,
                horizon: n,
            });
        }
        n += 1;
        win.advance();
    }
}

/// Result of scanning a λ grid for one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeScan {
    pub branch: Branch,
    pub bounds: BoundParams,
    pub per_lambda: Vec<LambdaScan>,
    /// Maximum of the per-λ start indices.
    pub valid_from: usize,
}

pub fn envelopes(
    family: &JacobiFamily,
    lambdas: &[f64],
    bounds: &BoundParams,
    branch: Branch,
    config: &ScanConfig,
) -> Result<EnvelopeScan> {
    family.require_critical()?;
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty λ grid".into()));
    }
    let scan = |&l: &f64| scan_valid_from(family, l, bounds, branch, config);
    #[cfg(feature = "parallel")]
    let per_lambda = {
        use rayon::prelude::*;
        lambdas.par_iter().map(scan).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per_lambda = lambdas.iter().map(scan).collect::<Result<Vec<_>>>()?;
    let valid_from = per_lambda.iter().map(|s| s.valid_from).max().unwrap_or(1);
    Ok(EnvelopeScan {
        branch,
        bounds: *bounds,
        per_lambda,
        valid_from,
    })
}

/// Envelope values for one λ on `[start, end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePair {
    pub branch: Branch,
    pub lambda: f64,
    pub bounds: BoundParams,
    pub valid_from: usize,
    minorant: Vec<f64>,
    majorant: Vec<f64>,
}

impl EnvelopePair {
    pub fn new(
        family: &JacobiFamily,
        lambda: f64,
        bounds: &BoundParams,
        branch: Branch,
        valid_from: usize,
        end: usize,
    ) -> Result<Self> {
        if end < valid_from {
            return Err(Error::InvalidParameter(format!(
                "end {end} precedes valid_from {valid_from}"
            )));
        }
        let betas = beta_range(family, lambda, valid_from, end)?;
        let (a, b) = bounds.offsets(branch);
        let s = branch.sign();
        let mut minorant = Vec::with_capacity(betas.len());
        let mut majorant = Vec::with_capacity(betas.len());
        for (i, &beta_n) in betas.iter().enumerate() {
            let n = valid_from + i;
            if beta_n >= 0.0 {
                return Err(Error::NonNegativeBeta {
                    index: n,
                    lambda,
                    beta: beta_n,
                });
            }
            let phi = (-beta_n).sqrt();
            let v = s * phi + a / n as f64;
            let w = s * phi + b / n as f64;
            let ordered = match branch {
                Branch::Plus => v <= w,
                Branch::Minus => v >= w,
            };
            if !(ordered && 1.0 + v > 0.0 && 1.0 + w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "envelopes not ordered or not above -1 at n = {n}"
                )));
            }
            minorant.push(v);
            majorant.push(w);
        }
        Ok(Self {
            branch,
            lambda,
            bounds: *bounds,
            valid_from,
            minorant,
            majorant,
        })
    }

    pub fn end_index(&self) -> usize {
        self.valid_from + self.minorant.len() - 1
    }

    pub fn v(&self, n: usize) -> f64 {
        self.minorant[n - self.valid_from]
    }

    pub fn w(&self, n: usize) -> f64 {
        self.majorant[n - self.valid_from]
    }

    pub fn minorant(&self) -> &[f64] {
        &self.minorant
    }

    pub fn majorant(&self) -> &[f64] {
        &self.majorant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrappingReport {
    pub trapped: bool,
    pub max_violation: f64,
    pub checked: usize,
}

/// Checks `v ≤ X ≤ w` (plus) or `v ≥ X ≥ w` (minus) on the common range.
pub fn verify_trapping(envelope: &EnvelopePair, solution: &RiccatiSolution) -> TrappingReport {
    let lo = envelope.valid_from.max(solution.start_index());
    let hi = envelope.end_index().min(solution.end_index());
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in lo..=hi {
        let (v, w, x) = (envelope.v(n), envelope.w(n), solution.at(n));
        let viol = match envelope.branch {
            Branch::Plus => (v - x).max(x - w),
            Branch::Minus => (x - v).max(w - x),
        };
        worst = worst.max(viol);
        checked += 1;
    }
    TrappingReport {
        trapped: checked > 0 && worst <= 0.0,
        max_violation: worst.max(0.0),
        checked,
    }
}

/// Where the forward plus-branch solution starts inside `[v_N, w_N]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Seed {
    Midpoint,
    Minorant,
    Majorant,
    Value(f64),
}

pub fn growing_riccati(
    family: &JacobiFamily,
    lambda: f64,
    bounds: &BoundParams,
    n0: usize,
    n_max: usize,
    seed: Seed,
) -> Result<RiccatiSolution> {
    if n_max <= n0 {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} must exceed N = {n0}"
        )));
    }
    let betas = beta_range(family, lambda, n0, n_max)?;
    let phi0 = crate::riccati::phi_of(betas[0], lambda, n0)?;
    let (a, b) = bounds.offsets(Branch::Plus);
    let v0 = phi0 + a / n0 as f64;
    let w0 = phi0 + b / n0 as f64;
    let x0 = match seed {
        Seed::Midpoint => 0.5 * (v0 + w0),
        Seed::Minorant => v0,
        Seed::Majorant => w0,
        Seed::Value(x) => x,
    };
    let mut values = Vec::with_capacity(betas.len());
    values.push(x0);
    let mut x = x0;
    for (i, &beta_n) in betas.iter().enumerate().skip(1) {
        x = riccati_forward_step(x, beta_n).map_err(|e| at_index(e, n0 + i))?;
        values.push(x);
    }
    RiccatiSolution::new(n0, values, Some(Branch::Plus))
}

fn at_index(e: Error, n: usize) -> Error {
    match e {
        Error::Singular { what, .. } => Error::Singular { index: n, what },
        other => other,
    }
}

/// Monotonicity tolerance for the backward runs in `s`.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayingRun {
    /// The run for the largest `s`, on `[N, s]`.
    pub solution: RiccatiSolution,
    pub s_used: usize,
    /// `max |X_{n,s_last} - X_{n,s_prev}|` over `[N, N + (s_prev - N)/2]`.
    pub certificate: f64,
    /// Largest decrease `X_{n,s_prev} - X_{n,s_last}` seen (≤ tolerance).
    pub max_drop: f64,
}

/// One backward run `X_{s,s} = w_s`, then `X_{n-1} = (X_n + β_n)/(1 - X_n)`
/// down to `n0`. `betas[i]` holds `β_{n0+i}`.
fn backward_run(n0: usize, s: usize, w_s: f64, betas: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; s - n0 + 1];
    let mut x = w_s;
    out[s - n0] = x;
    for n in (n0 + 1..=s).rev() {
        x = riccati_backward_step(x, betas[n - n0]).map_err(|e| at_index(e, n))?;
        out[n - 1 - n0] = x;
    }
    Ok(out)
}

fn minus_majorant(bounds: &BoundParams, beta_s: f64, lambda: f64, s: usize) -> Result<f64> {
    let phi = crate::riccati::phi_of(beta_s, lambda, s)?;
    Ok(-phi + bounds.b_minus() / s as f64)
}

/// Backward-limit construction of the minus-branch solution for each `s`
/// in `s_list` (strictly increasing, all above `n0`).
pub fn decaying_riccati(
    family: &JacobiFamily,
    lambda: f64,
    bounds: &BoundParams,
    s_list: &[usize],
    n0: usize,
) -> Result<DecayingRun> {
    if s_list.is_empty() || s_list.windows(2).any(|w| w[0] >= w[1]) || s_list[0] <= n0 {
        return Err(Error::InvalidParameter(
            "s_list must be strictly increasing and above N".into(),
        ));
    }
    let s_max = *s_list.last().unwrap();
    let betas = beta_range(family, lambda, n0, s_max)?;
    let mut prev: Option<(usize, Vec<f64>)> = None;
    let mut certificate = f64::INFINITY;
    let mut max_drop = 0.0f64;
    for &s in s_list {
        let w_s = minus_majorant(bounds, betas[s - n0], lambda, s)?;
        let run = backward_run(n0, s, w_s, &betas)?;
        if let Some((sp, ref old)) = prev {
            for (i, (&new, &o)) in run.iter().zip(old.iter()).enumerate() {
                let drop = o - new;
                if drop > MONOTONE_TOL {
                    return Err(Error::NonMonotone {
                        index: n0 + i,
                        drop,
                    });
                }
                max_drop = max_drop.max(drop);
            }
            let reach = (sp - n0) / 2;
            certificate = run[..=reach]
                .iter()
                .zip(old)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        }
        prev = Some((s, run));
    }
    let (s_used, run) = prev.unwrap();
    Ok(DecayingRun {
        solution: RiccatiSolution::new(n0, run, Some(Branch::Minus))?,
        s_used,
        certificate,
        max_drop,
    })
}

/// Doubles `s` from `s0` until the certificate drops below `tol`.
pub fn decaying_riccati_doubling(
    family: &JacobiFamily,
    lambda: f64,
    bounds: &BoundParams,
    n0: usize,
    s0: usize,
    tol: f64,
    s_cap: usize,
) -> Result<DecayingRun> {
    let mut s = s0.max(n0 + 2);
    let mut list = vec![s];
    loop {
        let next = 2 * s - n0;
        if next > s_cap {
            return Err(Error::ScanCapExceeded {
                cap: s_cap,
                lambda,
                diagnostic: format!("backward limit not converged to {tol:e} by s = {s}"),
            });
        }
        list.push(next);
        let run = decaying_riccati(family, lambda, bounds, &list[list.len() - 2..], n0)?;
        if run.certificate < tol {
            return Ok(run);
        }
        s = next;
        list = vec![s];
    }
}

/// `max n |X_n ∓ φ_n|` over `[from, to]`.
pub fn sharpness(
    family: &JacobiFamily,
    lambda: f64,
    solution: &RiccatiSolution,
    branch: Branch,
    from: usize,
    to: usize,
) -> Result<f64> {
    let from = from.max(solution.start_index());
    let to = to.min(solution.end_index());
    if to < from {
        return Err(Error::InvalidParameter(format!(
            "empty range [{from}, {to}]"
        )));
    }
    let betas = beta_range(family, lambda, from, to)?;
    let mut worst = 0.0f64;
    for (i, &b) in betas.iter().enumerate() {
        let n = from + i;
        let phi = crate::riccati::phi_of(b, lambda, n)?;
        worst = worst.max((solution.at(n) - branch.sign() * phi).abs() * n as f64);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::{beta, rectifier_residual, riccati_residual};
    use approx::assert_relative_eq;

    fn fam() -> JacobiFamily {
        JacobiFamily::reference()
    }

    #[test]
    fn bound_validation() {
        let d = BoundParams::default_for(&fam());
        assert_relative_eq!(d.a_plus(), 0.09, max_relative = 1e-14);
        assert_relative_eq!(d.a_minus(), 0.11, max_relative = 1e-14);
        assert_relative_eq!(d.b_minus(), 0.09, max_relative = 1e-14);
        assert_relative_eq!(d.b_plus(), 0.11, max_relative = 1e-14);
        assert!(BoundParams::new(0.2, 0.09, 0.11, 0.09, 0.11).is_ok());
        assert!(BoundParams::new(0.2, 0.11, 0.11, 0.09, 0.11).is_err());
        assert!(BoundParams::new(0.2, 0.09, 0.11, 0.1, 0.11).is_err());
    }

    #[test]
    fn beta_range_matches_pointwise() {
        let f = fam();
        let r = beta_range(&f, 1.3, 4, 40).unwrap();
        for (i, b) in r.iter().enumerate() {
            assert_relative_eq!(*b, beta(&f, 1.3, 4 + i).unwrap(), max_relative = 1e-12);
        }
        assert!(beta_range(&f, 2.0, 3, 10).is_err());
    }

    #[test]
    fn gap_identities() {
        let f = fam();
        let b = BoundParams::default_for(&f);
        let p = EnvelopePair::new(&f, 1.5, &b, Branch::Plus, 100, 400).unwrap();
        let m = EnvelopePair::new(&f, 1.5, &b, Branch::Minus, 100, 400).unwrap();
        for n in 100..=400 {
            let nf = n as f64;
            assert!(((p.w(n) - p.v(n)) - 0.02 / nf).abs() <= 1e-15);
            assert!(((m.v(n) - m.w(n)) - 0.02 / nf).abs() <= 1e-15);
        }
    }

    #[test]
    fn wide_bounds_scan() {
        let f = fam();
        let b = BoundParams::new(0.2, 0.05, 0.15, 0.05, 0.15).unwrap();
        let grid = crate::family::SpectralWindow::new(1.0, 2.0)
            .unwrap()
            .grid(9);
        let plus = envelopes(&f, &grid, &b, Branch::Plus, &ScanConfig::default()).unwrap();
        let minus = envelopes(&f, &grid, &b, Branch::Minus, &ScanConfig::default()).unwrap();
        assert!(plus.valid_from < 1_000, "plus {}", plus.valid_from);
        assert!(minus.valid_from < 1_000, "minus {}", minus.valid_from);
    }

    #[test]
    fn scan_cap_reports_diagnostic() {
        let f = fam();
        let b = BoundParams::default_for(&f);
        let cfg = ScanConfig {
            cap: 10_000,
            lookahead: 10,
        };
        match scan_valid_from(&f, 2.0, &b, Branch::Plus, &cfg) {
            Err(Error::ScanCapExceeded { diagnostic, .. }) => {
                assert!(diagnostic.contains("fails at n"), "{diagnostic}")
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn plus_branch_trapping() {
        let f = fam();
        let b = BoundParams::symmetric(&f, 0.05).unwrap();
        let l = 1.5;
        let scan = scan_valid_from(&f, l, &b, Branch::Plus, &ScanConfig::default()).unwrap();
        let n0 = scan.valid_from;
        let env = EnvelopePair::new(&f, l, &b, Branch::Plus, n0, 100_000).unwrap();
        for seed in [Seed::Midpoint, Seed::Minorant, Seed::Majorant] {
            let sol = growing_riccati(&f, l, &b, n0, 100_000, seed).unwrap();
            let rep = verify_trapping(&env, &sol);
            assert!(rep.trapped, "{seed:?}: {rep:?}");
            assert_eq!(rep.checked, 100_000 - n0 + 1);
        }
        let sol = growing_riccati(&f, l, &b, n0, 2_000, Seed::Midpoint).unwrap();
        assert!(riccati_residual(&f, l, &sol).unwrap() <= 1e-13);
        assert!(rectifier_residual(&f, l, &sol).unwrap() <= 1e-13);
        let bad = growing_riccati(&f, l, &b, n0, 2_000, Seed::Value(env.w(n0) + 0.1)).unwrap();
        let rep = verify_trapping(&env, &bad);
        assert!(!rep.trapped && rep.max_violation > 0.0);
    }

    #[test]
    fn backward_limit_converges_monotonically() {
        let f = fam();
        let b = BoundParams::default_for(&f);
        let run = decaying_riccati(&f, 1.5, &b, &[20_000, 40_000], 4).unwrap();
        assert!(run.certificate < 1e-10, "certificate {:e}", run.certificate);
        assert!(run.max_drop <= MONOTONE_TOL);
        assert_eq!(run.solution.start_index(), 4);
        assert_eq!(run.solution.end_index(), 40_000);
        assert!(riccati_residual(&f, 1.5, &run.solution.slice(4, 5000).unwrap()).unwrap() <= 1e-13);
    }

    #[test]
    fn backward_limit_trapped() {
        let f = fam();
        let b = BoundParams::symmetric(&f, 0.05).unwrap();
        let l = 1.25;
        let n0 = scan_valid_from(&f, l, &b, Branch::Minus, &ScanConfig::default())
            .unwrap()
            .valid_from;
        let run = decaying_riccati(&f, l, &b, &[50_000, 100_000], n0).unwrap();
        let env = EnvelopePair::new(&f, l, &b, Branch::Minus, n0, 100_000).unwrap();
        let rep = verify_trapping(&env, &run.solution);
        assert!(rep.trapped, "{rep:?}");
        let sharp = sharpness(&f, l, &run.solution, Branch::Minus, n0, 100_000).unwrap();
        assert!(sharp <= b.max_offset() + 0.05, "{sharp}");
    }

    #[test]
    fn doubling() {
        let f = fam();
        let b = BoundParams::default_for(&f);
        let run = decaying_riccati_doubling(&f, 1.0, &b, 4, 1_000, 1e-10, 1_000_000).unwrap();
        assert!(run.certificate < 1e-10);
    }
}
