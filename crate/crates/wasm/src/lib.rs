//! Browser bindings: phase classification, Riccati envelope traces and the
//! shooting defect curve. Every export returns a JSON string.

use jacobi_core::kelley::{
    decaying_riccati, growing_riccati, scan_valid_from, verify_trapping, BoundParams, EnvelopePair,
    ScanConfig, Seed,
};
use jacobi_core::riccati::{phi, Branch};
use jacobi_core::spectrum::{shooting_mismatch, truncate_eigenvalues, ShootingSetup};
use jacobi_core::{phase_classify, JacobiFamily, SpectralWindow};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn json<T: Serialize>(v: &T) -> Out {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Serialize)]
struct Phase {
    tag: &'static str,
    discriminant: f64,
}

pub fn classify_json(c1: f64, c2: f64) -> Out {
    let r = phase_classify(c1, c2).map_err(err)?;
    json(&Phase {
        tag: r.tag.as_str(),
        discriminant: r.discriminant,
    })
}

#[derive(Serialize)]
struct BranchTrace {
    valid_from: usize,
    trapped: bool,
    /// `n (X_n ∓ φ_n)` at the sampled indices; the envelopes are the
    /// constant lines at the two bound offsets.
    scaled: Vec<f64>,
    n: Vec<usize>,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct EnvelopeTrace {
    lambda: f64,
    plus: BranchTrace,
    minus: BranchTrace,
}

/// Indices spread geometrically over `[from, to]`.
fn sample(from: usize, to: usize, count: usize) -> Vec<usize> {
    let (a, b) = ((from as f64).ln(), (to as f64).ln());
    let mut v: Vec<usize> = (0..count.max(2))
        .map(|i| {
            (a + (b - a) * i as f64 / (count.max(2) - 1) as f64)
                .exp()
                .round() as usize
        })
        .map(|n| n.clamp(from, to))
        .collect();
    v.dedup();
    v
}

fn trace(
    family: &JacobiFamily,
    lambda: f64,
    bounds: &BoundParams,
    branch: Branch,
    span: usize,
    samples: usize,
) -> Result<BranchTrace, String> {
    let scan =
        scan_valid_from(family, lambda, bounds, branch, &ScanConfig::default()).map_err(err)?;
    let vf = scan.valid_from;
    let end = vf + span;
    let env = EnvelopePair::new(family, lambda, bounds, branch, vf, end).map_err(err)?;
    let sol = match branch {
        Branch::Plus => {
            growing_riccati(family, lambda, bounds, vf, end, Seed::Midpoint).map_err(err)?
        }
        Branch::Minus => {
            decaying_riccati(family, lambda, bounds, &[end + span, end + 3 * span], vf)
                .map_err(err)?
                .solution
                .slice(vf, end)
                .map_err(err)?
        }
    };
    let rep = verify_trapping(&env, &sol);
    let n = sample(vf, end, samples);
    let scaled = n
        .iter()
        .map(|&k| {
            let p = phi(family, lambda, k).map_err(err)?;
            Ok(k as f64 * (sol.at(k) - branch.sign() * p))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let (a, b) = bounds.offsets(branch);
    Ok(BranchTrace {
        valid_from: vf,
        trapped: rep.trapped,
        scaled,
        n,
        lower: a.min(b),
        upper: a.max(b),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn envelope_trace_json(
    c2: f64,
    alpha: f64,
    lambda: f64,
    a_plus: f64,
    a_minus: f64,
    b_minus: f64,
    b_plus: f64,
    span: usize,
    samples: usize,
) -> Out {
    let family = JacobiFamily::new(c2 + 1.0, c2, alpha).map_err(err)?;
    let bounds = BoundParams::new(family.p(), a_plus, a_minus, b_minus, b_plus).map_err(err)?;
    if span < 2 {
        return Err("span must be at least 2".into());
    }
    json(&EnvelopeTrace {
        lambda,
        plus: trace(&family, lambda, &bounds, Branch::Plus, span, samples)?,
        minus: trace(&family, lambda, &bounds, Branch::Minus, span, samples)?,
    })
}

#[derive(Serialize)]
struct DefectCurve {
    lambda: Vec<f64>,
    defect: Vec<f64>,
    eigenvalues: Vec<f64>,
    n0: usize,
    s: usize,
}

pub fn defect_curve_json(c2: f64, alpha: f64, lo: f64, hi: f64, points: usize, k: usize) -> Out {
    let family = JacobiFamily::new(c2 + 1.0, c2, alpha).map_err(err)?;
    let window = SpectralWindow::new(lo, hi).map_err(err)?;
    let setup = ShootingSetup::for_window(&family, &window, 1_000_000).map_err(err)?;
    let lambda = window.grid(points.clamp(2, 20_000));
    let defect = lambda
        .iter()
        .map(|&l| shooting_mismatch(&family, l, &setup).map_err(err))
        .collect::<Result<Vec<_>, _>>()?;
    let eigenvalues = truncate_eigenvalues(&family, k.max(2), &window)
        .map_err(err)?
        .eigenvalues;
    json(&DefectCurve {
        lambda,
        defect,
        eigenvalues,
        n0: setup.n0,
        s: setup.s,
    })
}

fn js(r: Out) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn classify(c1: f64, c2: f64) -> Result<String, JsError> {
    js(classify_json(c1, c2))
}

/// Critical family `(c2 + 1, c2, alpha)`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn envelope_trace(
    c2: f64,
    alpha: f64,
    lambda: f64,
    a_plus: f64,
    a_minus: f64,
    b_minus: f64,
    b_plus: f64,
    span: usize,
    samples: usize,
) -> Result<String, JsError> {
    js(envelope_trace_json(
        c2, alpha, lambda, a_plus, a_minus, b_minus, b_plus, span, samples,
    ))
}

/// Critical family `(c2 + 1, c2, alpha)`.
#[wasm_bindgen]
pub fn defect_curve(
    c2: f64,
    alpha: f64,
    lo: f64,
    hi: f64,
    points: usize,
    k: usize,
) -> Result<String, JsError> {
    js(defect_curve_json(c2, alpha, lo, hi, points, k))
}
