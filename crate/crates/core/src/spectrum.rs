//! Eigenvalues on a positive window by two independent routes.
//!
//! Finite sections are counted with the Sturm sequence of the shifted
//! `LDLᵀ` factorization. Shooting builds the decaying solution from the
//! backward Riccati limit, carries it down to the first row, and looks for
//! zeros of the boundary defect.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{JacobiFamily, SpectralWindow};
use crate::fit::ols;
use crate::kelley::{beta_range, BoundParams};
use crate::poincare::{min_index_n, poincare_f, reconstruct_f_from_x, reconstruct_y};
use crate::recurrence::{boundary_residual, recurrence_backward, recurrence_residual};
use crate::riccati::{riccati_backward_step, x_ratio};
use crate::signed_log::{SignedLogSeq, SignedLogValue};

/// Default bracket width for Sturm bisection.
pub const BRACKET_TOL: f64 = 1e-11;

/// Leading `K × K` section of the operator, stored as diagonal and squared
/// off-diagonal.
#[derive(Debug, Clone)]
pub struct Truncation {
    diag: Vec<f64>,
    off_sq: Vec<f64>,
    pivmin: f64,
}

impl Truncation {
    pub fn new(family: &JacobiFamily, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("K must be >= 1".into()));
        }
        let diag: Vec<f64> = (1..=k).map(|n| family.diagonal(n)).collect();
        let off_sq: Vec<f64> = (1..k).map(|n| family.weight(n).powi(2)).collect();
        let max_sq = off_sq.iter().fold(1.0f64, |m, &v| m.max(v));
        Ok(Self {
            diag,
            off_sq,
            pivmin: f64::MIN_POSITIVE * max_sq,
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `lambda`. A zero pivot becomes
    /// `+pivmin`, so an eigenvalue sitting exactly at `lambda` is not counted.
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d = self.diag[0] - lambda;
        if d.abs() < self.pivmin {
            d = self.pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            d = (self.diag[i] - lambda) - self.off_sq[i - 1] / d;
            if d.abs() < self.pivmin {
                d = self.pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole section spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let k = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..k {
            let mut r = 0.0;
            if i > 0 {
                r += self.off_sq[i - 1].sqrt();
            }
            if i + 1 < k {
                r += self.off_sq[i].sqrt();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Bisection brackets of every eigenvalue in `[lo, hi]`, ascending.
    pub fn brackets_in(&self, lo: f64, hi: f64, tol: f64) -> Vec<(f64, f64)> {
        let (c_lo, c_hi) = (self.count_below(lo), self.count_below(hi));
        let run = |j: usize| self.bisect(j, lo, hi, tol);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (c_lo..c_hi).into_par_iter().map(run).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (c_lo..c_hi).map(run).collect()
        }
    }

    /// The `j`-th eigenvalue (0-based) inside `[lo, hi]`, bracketed to `tol`.
    /// Requires `count_below(lo) <= j < count_below(hi)`.
    fn bisect(&self, j: usize, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }
}

pub fn sturm_count(family: &JacobiFamily, k: usize, lambda: f64) -> Result<usize> {
    Ok(Truncation::new(family, k)?.count_below(lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpectrum {
    pub size: usize,
    pub window: SpectralWindow,
    pub eigenvalues: Vec<f64>,
    /// `(lo, hi)` bisection brackets, one per eigenvalue.
    pub brackets: Vec<(f64, f64)>,
    /// Brackets whose count jump is not exactly one.
    pub unresolved: usize,
}

pub fn truncate_eigenvalues(
    family: &JacobiFamily,
    k: usize,
    window: &SpectralWindow,
) -> Result<TruncationSpectrum> {
    truncate_eigenvalues_tol(family, k, window, BRACKET_TOL)
}

pub fn truncate_eigenvalues_tol(
    family: &JacobiFamily,
    k: usize,
    window: &SpectralWindow,
    tol: f64,
) -> Result<TruncationSpectrum> {
    if k < 2 {
        return Err(Error::InvalidParameter("K must be >= 2".into()));
    }
    let t = Truncation::new(family, k)?;
    let brackets = t.brackets_in(window.lo(), window.hi(), tol);
    let unresolved = brackets
        .iter()
        .filter(|(a, b)| t.count_below(*b) - t.count_below(*a) != 1)
        .count();
    let eigenvalues = brackets.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    Ok(TruncationSpectrum {
        size: k,
        window: *window,
        eigenvalues,
        brackets,
        unresolved,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingRow {
    pub size: usize,
    pub count: usize,
    /// Smallest nearest-neighbour gap (`inf` with fewer than two eigenvalues).
    pub min_gap: f64,
    pub unresolved: usize,
}

pub fn spacing_report(
    family: &JacobiFamily,
    window: &SpectralWindow,
    sizes: &[usize],
) -> Result<Vec<SpacingRow>> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("K list must be ascending".into()));
    }
    sizes
        .iter()
        .map(|&k| {
            let s = truncate_eigenvalues(family, k, window)?;
            let min_gap = s
                .eigenvalues
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            Ok(SpacingRow {
                size: k,
                count: s.eigenvalues.len(),
                min_gap,
                unresolved: s.unresolved,
            })
        })
        .collect()
}

/// Depths of the decaying construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingSetup {
    pub bounds: BoundParams,
    /// First index of the Riccati run.
    pub n0: usize,
    /// Index at which the backward run is started on the majorant.
    pub s: usize,
}

impl ShootingSetup {
    /// `n0` one above the admissible index of the window, `s` calibrated by
    /// doubling until the boundary defect is stable to `1e-13` at `hi`.
    pub fn for_window(
        family: &JacobiFamily,
        window: &SpectralWindow,
        s_cap: usize,
    ) -> Result<Self> {
        let n0 = min_index_n(window, family.alpha()) + 1;
        Self::calibrate(family, window, BoundParams::default_for(family), n0, s_cap)
    }

    /// Same doubling rule with explicit bounds and start index.
    pub fn calibrate(
        family: &JacobiFamily,
        window: &SpectralWindow,
        bounds: BoundParams,
        n0: usize,
        s_cap: usize,
    ) -> Result<Self> {
        let min = min_index_n(window, family.alpha()) + 1;
        if n0 < min {
            return Err(Error::BelowAdmissible { index: n0, min });
        }
        let mut s = (2 * n0).max(n0 + 64);
        let probe = [window.lo(), 0.5 * (window.lo() + window.hi()), window.hi()];
        loop {
            let next = 2 * s;
            if next > s_cap {
                return Err(Error::ScanCapExceeded {
                    cap: s_cap,
                    lambda: window.hi(),
                    diagnostic: format!("shooting defect not stable by s = {s}"),
                });
            }
            let mut stable = true;
            for &l in &probe {
                let a = shooting_mismatch(family, l, &ShootingSetup { bounds, n0, s })?;
                let b = shooting_mismatch(
                    family,
                    l,
                    &ShootingSetup {
                        bounds,
                        n0,
                        s: next,
                    },
                )?;
                if (a - b).abs() > 1e-13 * a.abs().max(1.0) {
                    stable = false;
                }
            }
            if stable {
                return Ok(Self {
                    bounds,
                    n0,
                    s: next,
                });
            }
            s = next;
        }
    }
}

/// `X_n` of the decaying solution on `[n0, s]` by one backward run.
fn decaying_x(family: &JacobiFamily, lambda: f64, setup: &ShootingSetup) -> Result<Vec<f64>> {
    let (n0, s) = (setup.n0, setup.s);
    if s <= n0 {
        return Err(Error::InvalidParameter(format!(
            "s = {s} must exceed N = {n0}"
        )));
    }
    let betas = beta_range(family, lambda, n0, s)?;
    let phi_s = crate::riccati::phi_of(betas[s - n0], lambda, s)?;
    let mut x = -phi_s + setup.bounds.b_minus() / s as f64;
    let mut out = vec![0.0; s - n0 + 1];
    out[s - n0] = x;
    for n in (n0 + 1..=s).rev() {
        x = riccati_backward_step(x, betas[n - n0]).map_err(|e| match e {
            Error::Singular { what, .. } => Error::Singular { index: n, what },
            other => other,
        })?;
        out[n - 1 - n0] = x;
    }
    Ok(out)
}

/// `x_{n0}` sign making `x_s (-1)^s > 0`: deep in the run the ratios
/// `x_{n+1}/x_n` are negative, so the sign only depends on the parity of
/// the count of positive ratios.
fn canonical_sign(family: &JacobiFamily, lambda: f64, n0: usize, xs: &[f64]) -> Result<f64> {
    let mut positive = 0usize;
    for (i, &x) in xs[..xs.len() - 1].iter().enumerate() {
        if x_ratio(poincare_f(family, lambda, n0 + i)?, x) > 0.0 {
            positive += 1;
        }
    }
    Ok(if (n0 + positive).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    })
}

/// Decaying solution on `[1, 2 n0 + 2]`.
fn decaying_head(
    family: &JacobiFamily,
    lambda: f64,
    setup: &ShootingSetup,
) -> Result<SignedLogSeq> {
    let xs = decaying_x(family, lambda, setup)?;
    let n0 = setup.n0;
    let x0 = canonical_sign(family, lambda, n0, &xs)?;
    let x1 = x0 * x_ratio(poincare_f(family, lambda, n0)?, xs[0]);
    let y1 = reconstruct_y(
        family,
        lambda,
        n0 + 1,
        SignedLogValue::from_f64(x0),
        SignedLogValue::from_f64(x1),
    )?;
    recurrence_backward(
        family,
        lambda,
        2 * n0 + 1,
        SignedLogValue::from_f64(x0),
        y1,
        1,
    )
}

/// Boundary defect `[(q_1 - λ) f_1 + b_1 f_2] / max(|f_1|, |f_2|)` of the
/// decaying solution.
pub fn shooting_mismatch(family: &JacobiFamily, lambda: f64, setup: &ShootingSetup) -> Result<f64> {
    let head = decaying_head(family, lambda, setup)?;
    let (f1, f2) = (head.at(1), head.at(2));
    let shift = crate::signed_log::common_exponent(&[f1, f2]);
    let (a, b) = (f1.scaled_down(shift), f2.scaled_down(shift));
    Ok(((family.diagonal(1) - lambda) * a + family.weight(1) * b) / a.abs().max(b.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenpairEstimate {
    pub lambda0: f64,
    pub bracket: (f64, f64),
    /// Decaying solution with `x_{n0} = ±1`, on `[1, n_max]`.
    pub eigvec: SignedLogSeq,
    pub recurrence_residual: f64,
    pub boundary_residual: f64,
    pub decay_slope: f64,
    pub predicted_slope: f64,
}

/// Decaying solution on `[1, n_max]`.
pub fn decaying_solution(
    family: &JacobiFamily,
    lambda: f64,
    setup: &ShootingSetup,
    n_max: usize,
) -> Result<SignedLogSeq> {
    let head = decaying_head(family, lambda, setup)?;
    let x_top = n_max / 2;
    if x_top <= setup.n0 {
        return head.slice(1, n_max.max(2));
    }
    // a longer run so that the pinned top end is far above x_top
    let deep = ShootingSetup {
        s: setup.s.max(2 * x_top),
        ..*setup
    };
    let xs = decaying_x(family, lambda, &deep)?;
    let n0 = setup.n0;
    let mut x = SignedLogValue::from_f64(canonical_sign(family, lambda, n0, &xs)?);
    let mut vals = Vec::with_capacity(x_top - n0 + 1);
    vals.push(x);
    for n in n0..x_top {
        x = x.mul_f64(x_ratio(poincare_f(family, lambda, n)?, xs[n - n0]));
        vals.push(x);
    }
    let xseq = SignedLogSeq::new(n0, vals)?;
    let tail = reconstruct_f_from_x(family, lambda, &xseq)?;
    head.extend_with(&tail)?.slice(1, n_max)
}

/// Bisection on the shooting defect inside `bracket`, then eigenvector
/// assembly to `n_max` with residual checks and a decay fit.
pub fn eigenvalue_refine(
    family: &JacobiFamily,
    bracket: (f64, f64),
    setup: &ShootingSetup,
    n_max: usize,
) -> Result<EigenpairEstimate> {
    let (mut a, mut b) = bracket;
    let mut wa = shooting_mismatch(family, a, setup)?;
    let wb = shooting_mismatch(family, b, setup)?;
    if wa == 0.0 {
        b = a;
    } else if wb == 0.0 {
        a = b;
    } else if wa.signum() == wb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    // bisect down to adjacent doubles; the bracket ends well inside 1e-11
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let wm = shooting_mismatch(family, mid, setup)?;
        if wm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if wm.signum() == wa.signum() {
            a = mid;
            wa = wm;
        } else {
            b = mid;
        }
    }
    let lambda0 = if (shooting_mismatch(family, a, setup)?).abs()
        <= (shooting_mismatch(family, b, setup)?).abs()
    {
        a
    } else {
        b
    };
    let eigvec = decaying_solution(family, lambda0, setup, n_max)?;
    let recurrence_residual = recurrence_residual(family, lambda0, &eigvec);
    let boundary_residual = boundary_residual(family, lambda0, &eigvec)?;
    let predicted_slope = -family.decay_rate(lambda0);
    let decay_slope = if n_max >= 100_000 {
        log_slope(family, &eigvec, 1_000, 100_000)?
    } else {
        f64::NAN
    };
    Ok(EigenpairEstimate {
        lambda0,
        bracket: (a, b),
        eigvec,
        recurrence_residual,
        boundary_residual,
        decay_slope,
        predicted_slope,
    })
}

/// Slope of `ln|f_n|` against `n^{1-α/2}` over `[lo, hi]`.
pub fn log_slope(family: &JacobiFamily, f: &SignedLogSeq, lo: usize, hi: usize) -> Result<f64> {
    if f.start_index() > lo || f.end_index() < hi || hi <= lo {
        return Err(Error::Insufficient(format!(
            "fit range [{lo}, {hi}] not inside [{}, {}]",
            f.start_index(),
            f.end_index()
        )));
    }
    let e = 1.0 - 0.5 * family.alpha();
    let (x, y): (Vec<f64>, Vec<f64>) = (lo..=hi)
        .filter_map(|n| {
            let v = f.at(n);
            (!v.is_zero()).then(|| ((n as f64).powf(e), v.logmag()))
        })
        .unzip();
    Ok(ols(&x, &y)?.slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub predicted: f64,
    pub ratio: f64,
}

pub fn decay_rate_fit(
    estimate: &EigenpairEstimate,
    family: &JacobiFamily,
    lo: usize,
    hi: usize,
) -> Result<DecayFit> {
    let slope = log_slope(family, &estimate.eigvec, lo, hi)?;
    let predicted = -family.decay_rate(estimate.lambda0);
    Ok(DecayFit {
        slope,
        predicted,
        ratio: slope / predicted,
    })
}

/// Growth fit of the first-kind sequence against `+rate(λ) n^{1-α/2}`; away
/// from the spectrum the growing solution dominates.
pub fn first_kind_growth(
    family: &JacobiFamily,
    lambda: f64,
    lo: usize,
    hi: usize,
) -> Result<DecayFit> {
    let p = crate::recurrence::first_kind_polynomials(family, lambda, hi)?;
    let slope = log_slope(family, &p, lo, hi)?;
    let predicted = family.decay_rate(lambda);
    Ok(DecayFit {
        slope,
        predicted,
        ratio: slope / predicted,
    })
}

/// Brackets `[λ_i, λ_{i+1}]` of a grid on which the shooting defect
/// changes sign.
pub fn shooting_brackets(
    family: &JacobiFamily,
    window: &SpectralWindow,
    setup: &ShootingSetup,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    let grid = window.grid(points.max(2));
    let w = {
        let eval = |&l: &f64| shooting_mismatch(family, l, setup);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            grid.par_iter().map(eval).collect::<Result<Vec<_>>>()?
        }
        #[cfg(not(feature = "parallel"))]
        {
            grid.iter().map(eval).collect::<Result<Vec<_>>>()?
        }
    };
    let mut out = Vec::new();
    for i in 0..grid.len() - 1 {
        if w[i] == 0.0 || w[i].signum() != w[i + 1].signum() {
            out.push((grid[i], grid[i + 1]));
        }
    }
    Ok(out)
}

/// Pairs each truncation eigenvalue with a shooting eigenvalue within `tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub pairs: Vec<(f64, f64)>,
    pub unmatched_truncation: Vec<f64>,
    pub unmatched_shooting: Vec<f64>,
    pub max_difference: f64,
}

impl CrossCheck {
    pub fn is_bijection(&self) -> bool {
        self.unmatched_truncation.is_empty() && self.unmatched_shooting.is_empty()
    }
}

pub fn cross_check(truncation: &[f64], shooting: &[f64], tol: f64) -> CrossCheck {
    let mut used = vec![false; shooting.len()];
    let mut pairs = Vec::new();
    let mut unmatched_truncation = Vec::new();
    for &t in truncation {
        let best = shooting
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()));
        match best {
            Some((i, &s)) if (s - t).abs() <= tol => {
                used[i] = true;
                pairs.push((t, s));
            }
            _ => unmatched_truncation.push(t),
        }
    }
    let unmatched_shooting = shooting
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(s, _)| *s)
        .collect();
    let max_difference = pairs.iter().fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    CrossCheck {
        pairs,
        unmatched_truncation,
        unmatched_shooting,
        max_difference,
    }
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
    fn tiny_sections() {
        let f = fam();
        assert_eq!(sturm_count(&f, 1, 0.999).unwrap(), 0);
        assert_eq!(sturm_count(&f, 1, 1.0).unwrap(), 0);
        assert_eq!(sturm_count(&f, 1, 1.001).unwrap(), 1);
        // [[1, 2], [2, 2^0.4]]
        let d = 2f64.powf(0.4);
        let tr = 1.0 + d;
        let disc = ((1.0 - d).powi(2) + 16.0).sqrt();
        let (e1, e2) = (0.5 * (tr - disc), 0.5 * (tr + disc));
        let t = Truncation::new(&f, 2).unwrap();
        let (a, b) = t.bisect(0, -10.0, 10.0, 1e-13);
        assert!(a <= e1 + 1e-12 && e1 - 1e-12 <= b);
        let (a, b) = t.bisect(1, -10.0, 10.0, 1e-13);
        assert!(a <= e2 + 1e-12 && e2 - 1e-12 <= b);
    }

    #[test]
    fn interlacing() {
        let f = fam();
        for k in [10usize, 31, 64] {
            let t = Truncation::new(&f, k + 1).unwrap();
            let (lo, hi) = t.gershgorin();
            let mid = |(a, b): (f64, f64)| 0.5 * (a + b);
            let a: Vec<f64> = Truncation::new(&f, k)
                .unwrap()
                .brackets_in(lo - 1.0, hi + 1.0, 1e-12)
                .into_iter()
                .map(mid)
                .collect();
            let b: Vec<f64> = t
                .brackets_in(lo - 1.0, hi + 1.0, 1e-12)
                .into_iter()
                .map(mid)
                .collect();
            assert_eq!((a.len(), b.len()), (k, k + 1));
            let tol = 1e-10 * hi.abs().max(1.0);
            for (i, &l) in a.iter().enumerate() {
                assert!(b[i] <= l + tol, "K = {k}, i = {i}");
                assert!(l <= b[i + 1] + tol, "K = {k}, i = {i}");
            }
            assert!(a.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn empty_unit_window() {
        // no positive eigenvalues below ~2.985 for the reference family
        let f = fam();
        let w = SpectralWindow::new(1.0, 2.0).unwrap();
        let s = truncate_eigenvalues(&f, 400, &w).unwrap();
        assert!(s.eigenvalues.is_empty());
    }

    #[test]
    fn shooting_matches_truncation() {
        let f = fam();
        let w = SpectralWindow::new(2.5, 5.0).unwrap();
        let trunc = truncate_eigenvalues(&f, 1000, &w).unwrap();
        assert_eq!(trunc.eigenvalues.len(), 2);
        let setup = ShootingSetup::for_window(&f, &w, 1_000_000).unwrap();
        let brackets = shooting_brackets(&f, &w, &setup, 251).unwrap();
        assert_eq!(brackets.len(), 2);
        let est: Vec<EigenpairEstimate> = brackets
            .iter()
            .map(|&br| eigenvalue_refine(&f, br, &setup, 2_000).unwrap())
            .collect();
        let shoot: Vec<f64> = est.iter().map(|e| e.lambda0).collect();
        let cc = cross_check(&trunc.eigenvalues, &shoot, 1e-9);
        assert!(cc.is_bijection(), "{cc:?}");
        for e in &est {
            assert!(e.recurrence_residual <= 1e-10, "{}", e.recurrence_residual);
            assert!(e.boundary_residual <= 1e-10, "{}", e.boundary_residual);
            assert!(shooting_mismatch(&f, e.lambda0, &setup).unwrap().abs() < 1e-6);
        }
        assert_relative_eq!(est[0].lambda0, 2.985_208_720_316, max_relative = 1e-11);
    }

    #[test]
    fn defect_continuity() {
        let f = fam();
        let w = SpectralWindow::new(2.9, 3.1).unwrap();
        let setup = ShootingSetup::for_window(&f, &w, 1_000_000).unwrap();
        let grid = w.grid(2001);
        let vals: Vec<f64> = grid
            .iter()
            .map(|&l| shooting_mismatch(&f, l, &setup).unwrap())
            .collect();
        let jump = vals
            .windows(2)
            .map(|p| (p[1] - p[0]).abs())
            .fold(0.0, f64::max);
        assert!(jump < 0.1, "max jump {jump}");
    }

    #[test]
    fn cross_check_reports_orphans() {
        let cc = cross_check(&[1.0, 2.0], &[1.0 + 1e-12, 3.0], 1e-9);
        assert_eq!(cc.pairs.len(), 1);
        assert_eq!(cc.unmatched_truncation, vec![2.0]);
        assert_eq!(cc.unmatched_shooting, vec![3.0]);
        assert!(!cc.is_bijection());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn count_monotone(a in -20.0f64..40.0, d in 0.0f64..5.0, k in 2usize..200) {
            let t = Truncation::new(&fam(), k).unwrap();
            prop_assert!(t.count_below(a + d) >= t.count_below(a));
        }
    }
}
