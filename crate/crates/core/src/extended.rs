//! Extended-precision checks near an eigenvalue.
//!
//! The first-kind sequence grows like `exp(+c n^{1-α/2})` away from the
//! spectrum, so at an f64 eigenvalue its first fifty values already carry a
//! relative error near `e^{33} · 1e-16`. Here the eigenvalue is sharpened with
//! a Miller backward recurrence in multiprecision arithmetic and the
//! first-kind values are evaluated at the sharpened point.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::JacobiFamily;
use crate::spectrum::EigenpairEstimate;

type Big = FBig<HalfEven, 2>;

/// Working precision in bits.
pub const EXTENDED_BITS: usize = 320;
/// Start index of the Miller backward recurrence.
pub const MILLER_DEPTH: usize = 600;
/// Half-width of the bracket opened around an f64 eigenvalue.
const BRACKET_HALF_WIDTH: f64 = 1e-9;
/// Bisection stops once the bracket is narrower than this.
const TARGET_WIDTH: f64 = 1e-80;

fn big(x: f64) -> Big {
    Big::try_from(x)
        .expect("finite f64")
        .with_precision(EXTENDED_BITS)
        .value()
}

fn abs(x: &Big) -> Big {
    if *x < Big::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

/// Matrix entries `q_n`, `b_n` for `n = 1..=m` in extended precision.
struct BigEntries {
    diag: Vec<Big>,
    weight: Vec<Big>,
}

impl BigEntries {
    fn new(family: &JacobiFamily, m: usize) -> Self {
        let alpha = big(family.alpha());
        let (c1, c2) = (big(family.c1()), big(family.c2()));
        let mut diag = Vec::with_capacity(m);
        let mut weight = Vec::with_capacity(m);
        for n in 1..=m {
            let p = (big(n as f64).ln() * &alpha).exp();
            weight.push(if n % 2 == 1 { &p * &c1 } else { &p * &c2 });
            diag.push(p);
        }
        Self { diag, weight }
    }

    fn q(&self, n: usize) -> &Big {
        &self.diag[n - 1]
    }

    fn b(&self, n: usize) -> &Big {
        &self.weight[n - 1]
    }

    fn len(&self) -> usize {
        self.diag.len()
    }
}

/// Boundary defect of the solution vanishing at `depth + 1`, normalized by
/// `max(|f_1|, |f_2|)`.
fn miller_defect(e: &BigEntries, lambda: &Big) -> Big {
    let m = e.len() - 1;
    let mut hi = Big::ZERO.with_precision(EXTENDED_BITS).value();
    let mut lo = big(1.0);
    for n in (2..=m).rev() {
        let next = ((lambda - e.q(n)) * &lo - e.b(n) * &hi) / e.b(n - 1);
        hi = lo;
        lo = next;
    }
    let (f1, f2) = (lo, hi);
    let scale = {
        let (a, b) = (abs(&f1), abs(&f2));
        if a > b {
            a
        } else {
            b
        }
    };
    ((e.q(1) - lambda) * &f1 + e.b(1) * &f2) / scale
}

/// Eigenvalue near `lambda0` to about `1e-80`, by bisection on the Miller
/// defect over `lambda0 ± 1e-9`.
fn sharpen(e: &BigEntries, lambda0: f64) -> Result<Big> {
    let mut a = big(lambda0 - BRACKET_HALF_WIDTH);
    let mut b = big(lambda0 + BRACKET_HALF_WIDTH);
    let da = miller_defect(e, &a);
    let db = miller_defect(e, &b);
    let neg_a = da < Big::ZERO;
    if neg_a == (db < Big::ZERO) {
        return Err(Error::NoSignChange {
            lo: lambda0 - BRACKET_HALF_WIDTH,
            hi: lambda0 + BRACKET_HALF_WIDTH,
        });
    }
    let target = big(TARGET_WIDTH);
    let half = big(0.5);
    while &b - &a > target {
        let mid = (&a + &b) * &half;
        let dm = miller_defect(e, &mid);
        if dm == Big::ZERO {
            return Ok(mid);
        }
        if (dm < Big::ZERO) == neg_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((&a + &b) * &half)
}

/// First-kind values `f_1..f_n` at `lambda` in extended precision.
fn first_kind_big(e: &BigEntries, lambda: &Big, n: usize) -> Vec<Big> {
    let mut out = vec![big(1.0), (lambda - e.q(1)) / e.b(1)];
    for k in 2..n {
        let next = ((lambda - e.q(k)) * &out[k - 1] - e.b(k - 1) * &out[k - 2]) / e.b(k);
        out.push(next);
    }
    out.truncate(n);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proportionality {
    /// Sharpened eigenvalue rounded to f64.
    pub lambda_star: f64,
    /// `λ* − λ0` evaluated in extended precision.
    pub shift: f64,
    /// Mean ratio of first-kind values to the decaying solution.
    pub constant: f64,
    /// `(max − min) / |mean|` of the ratios.
    pub spread: f64,
    pub ratios: Vec<f64>,
}

/// Ratios `f*_n / f^-_n` for `n = 1..=n_max`, with `f*` the first-kind
/// sequence at the sharpened eigenvalue and `f^-` the decaying solution of
/// `estimate`.
pub fn proportionality(
    family: &JacobiFamily,
    estimate: &EigenpairEstimate,
    n_max: usize,
) -> Result<Proportionality> {
    if n_max < 2 || estimate.eigvec.end_index() < n_max || estimate.eigvec.start_index() != 1 {
        return Err(Error::Insufficient(format!(
            "decaying solution must cover [1, {n_max}]"
        )));
    }
    let e = BigEntries::new(family, MILLER_DEPTH.max(n_max + 1));
    let star = sharpen(&e, estimate.lambda0)?;
    let f = first_kind_big(&e, &star, n_max);
    let mut ratios = Vec::with_capacity(n_max);
    for (i, fk) in f.iter().enumerate() {
        let d = estimate.eigvec.at(i + 1).to_f64();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Singular {
                index: i + 1,
                what: "decaying solution not representable in f64".into(),
            });
        }
        ratios.push((fk / big(d)).to_f64().value());
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| {
            (a.min(r), b.max(r))
        });
    Ok(Proportionality {
        lambda_star: star.to_f64().value(),
        shift: (&star - big(estimate.lambda0)).to_f64().value(),
        constant: mean,
        spread: (hi - lo) / mean.abs(),
        ratios,
    })
}
