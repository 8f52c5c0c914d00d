//! One function per subcommand, each returning a table and its verdicts.

use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use jacobi_core::expansion::{beta_expansion, f_expansion, g_expansion, residual_slope, Quantity};
use jacobi_core::extended::proportionality;
use jacobi_core::fit::GEOMETRIC_GRID;
use jacobi_core::kelley::{
    decaying_riccati_doubling, growing_riccati, scan_valid_from, sharpness, verify_trapping,
    EnvelopePair, ScanConfig, Seed,
};
use jacobi_core::poincare::{min_index_n, poincare_f, poincare_g};
use jacobi_core::recurrence::{
    boundary_residual, first_kind_polynomials, recurrence_backward, recurrence_forward,
    recurrence_residual,
};
use jacobi_core::riccati::{beta, Branch};
use jacobi_core::spectrum::{
    cross_check, decay_rate_fit, eigenvalue_refine, shooting_brackets, spacing_report,
    truncate_eigenvalues, ShootingSetup,
};
use jacobi_core::{phase_classify, SignedLogSeq, SignedLogValue};

use crate::config::{ConfigError, RunConfig};
use crate::output::{Cell, Report, Table, Verdict};

pub fn classify(c1: f64, c2: f64) -> anyhow::Result<Report> {
    let r = phase_classify(c1, c2).map_err(|e| ConfigError(e.to_string()))?;
    let mut table = Table::new(&["c1", "c2", "discriminant", "phase"]);
    table.push(vec![
        c1.into(),
        c2.into(),
        r.discriminant.into(),
        r.tag.as_str().into(),
    ]);
    Ok(Report {
        table,
        verdicts: Vec::new(),
    })
}

pub const EXPAND_COLUMNS: [&str; 11] = [
    "lambda",
    "n",
    "F_exact",
    "F_exp",
    "F_res",
    "G_exact",
    "G_exp",
    "G_res",
    "beta_exact",
    "beta_exp",
    "beta_res",
];

pub fn expand(cfg: &RunConfig) -> anyhow::Result<Report> {
    let fam = cfg.family()?;
    let (fe, ge, be) = (
        f_expansion(&fam)?,
        g_expansion(&fam)?,
        beta_expansion(&fam)?,
    );
    let bound = -(1.0 + fam.alpha()) + 0.1;
    let mut table = Table::new(&EXPAND_COLUMNS);
    let mut verdicts = Vec::new();
    for l in cfg.lambdas()? {
        for &n in &GEOMETRIC_GRID {
            let (f, g, b) = (
                poincare_f(&fam, l, n)?,
                poincare_g(&fam, l, n)?,
                beta(&fam, l, n)?,
            );
            let (fx, gx, bx) = (fe.eval(l, n), ge.eval(l, n), be.eval(l, n));
            table.push(vec![
                l.into(),
                n.into(),
                f.into(),
                fx.into(),
                (f - fx).into(),
                g.into(),
                gx.into(),
                (g - gx).into(),
                b.into(),
                bx.into(),
                (b - bx).into(),
            ]);
        }
        for (q, name) in [
            (Quantity::F, "F"),
            (Quantity::G, "G"),
            (Quantity::Beta, "beta"),
        ] {
            let s = residual_slope(&fam, q, l)?;
            verdicts.push(Verdict::at_most(format!("slope_{name}@{l}"), s, bound));
        }
    }
    Ok(Report { table, verdicts })
}

pub const KELLEY_COLUMNS: [&str; 13] = [
    "lambda",
    "branch",
    "valid_from",
    "last_failure_n",
    "last_failure",
    "gap_at_valid_from",
    "end",
    "trapped",
    "max_violation",
    "checked",
    "sharpness",
    "certificate",
    "max_drop",
];

/// Certificate and monotonicity tolerance for the backward limit.
const LIMIT_TOL: f64 = 1e-12;

pub fn kelley(cfg: &RunConfig) -> anyhow::Result<Report> {
    let fam = cfg.family()?;
    fam.require_critical()?;
    let bounds = cfg.bounds()?;
    let window = cfg.window()?;
    let n_low = cfg.n0.unwrap_or(min_index_n(&window, fam.alpha()) + 1);
    let scan = ScanConfig {
        cap: cfg.s_cap,
        ..ScanConfig::default()
    };
    let slack = bounds.max_offset() + 0.05;
    let mut table = Table::new(&KELLEY_COLUMNS);
    let mut verdicts = Vec::new();
    let mut uniform = [0usize; 2];
    for l in cfg.lambdas()? {
        for (bi, branch) in [Branch::Plus, Branch::Minus].into_iter().enumerate() {
            let sc = scan_valid_from(&fam, l, &bounds, branch, &scan)?;
            let vf = sc.valid_from;
            uniform[bi] = uniform[bi].max(vf);
            let end = cfg.n_max.max(vf + cfg.n_max);
            let env = EnvelopePair::new(&fam, l, &bounds, branch, vf, end)?;
            let (a, b) = bounds.offsets(branch);
            let (sol, certificate, max_drop) = match branch {
                Branch::Plus => (
                    growing_riccati(&fam, l, &bounds, vf, end, Seed::Midpoint)?,
                    f64::NAN,
                    f64::NAN,
                ),
                Branch::Minus => {
                    if n_low > vf {
                        return Err(ConfigError(format!(
                            "n0 = {n_low} lies above valid_from = {vf}"
                        ))
                        .into());
                    }
                    let run = decaying_riccati_doubling(
                        &fam,
                        l,
                        &bounds,
                        n_low,
                        2 * end,
                        LIMIT_TOL,
                        cfg.s_cap,
                    )?;
                    (
                        run.solution.slice(n_low, end)?,
                        run.certificate,
                        run.max_drop,
                    )
                }
            };
            let rep = verify_trapping(&env, &sol);
            let sharp = sharpness(&fam, l, &sol, branch, vf, end)?;
            let (fail_n, fail) = match sc.last_failure {
                Some(v) => (Cell::from(v.index), Cell::from(v.inequality.describe())),
                None => (Cell::from(""), Cell::from("")),
            };
            table.push(vec![
                l.into(),
                branch.as_str().into(),
                vf.into(),
                fail_n,
                fail,
                ((b - a).abs() / vf as f64).into(),
                end.into(),
                rep.trapped.into(),
                rep.max_violation.into(),
                rep.checked.into(),
                sharp.into(),
                certificate.into(),
                max_drop.into(),
            ]);
            let tag = branch.as_str();
            verdicts.push(Verdict::flag(format!("trapped_{tag}@{l}"), rep.trapped));
            verdicts.push(Verdict::at_most(
                format!("sharpness_{tag}@{l}"),
                sharp,
                slack,
            ));
            if branch == Branch::Minus {
                verdicts.push(Verdict::at_most(
                    format!("certificate@{l}"),
                    certificate,
                    LIMIT_TOL,
                ));
                verdicts.push(Verdict::at_most(
                    format!("monotone_drop@{l}"),
                    max_drop,
                    LIMIT_TOL,
                ));
            }
        }
    }
    verdicts.push(Verdict::info("valid_from_uniform_plus", uniform[0] as f64));
    verdicts.push(Verdict::info("valid_from_uniform_minus", uniform[1] as f64));
    Ok(Report { table, verdicts })
}

pub const SPECTRUM_COLUMNS: [&str; 13] = [
    "index",
    "lambda_trunc",
    "lambda_trunc_2k",
    "lambda_shoot",
    "delta",
    "recurrence_residual",
    "boundary_residual",
    "decay_slope",
    "predicted_slope",
    "decay_ratio",
    "C",
    "spread",
    "lambda_extended",
];

/// Shooting scan spacing.
const SHOOT_STEP: f64 = 1e-3;
/// Decay fits run over `[FIT_LO, FIT_HI]`.
const FIT_LO: usize = 1_000;
const FIT_HI: usize = 100_000;

pub fn spectrum(cfg: &RunConfig) -> anyhow::Result<Report> {
    let fam = cfg.family()?;
    fam.require_critical()?;
    let w = cfg.window()?;
    let bounds = cfg.bounds()?;
    let k2 = 2 * cfg.k;
    let a = truncate_eigenvalues(&fam, cfg.k, &w)?;
    let b = truncate_eigenvalues(&fam, k2, &w)?;
    let n0 = cfg.n0.unwrap_or(min_index_n(&w, fam.alpha()) + 1);
    let setup = ShootingSetup::calibrate(&fam, &w, bounds, n0, cfg.s_cap)?;
    let points = ((w.hi() - w.lo()) / SHOOT_STEP).ceil() as usize + 1;
    let brackets = shooting_brackets(&fam, &w, &setup, points)?;
    let n_max = cfg.n_max.max(50);
    let est = brackets
        .iter()
        .map(|&br| eigenvalue_refine(&fam, br, &setup, n_max))
        .collect::<Result<Vec<_>, _>>()?;
    let shoot: Vec<f64> = est.iter().map(|e| e.lambda0).collect();
    let cc = cross_check(&a.eigenvalues, &shoot, 1e-9);

    let mut table = Table::new(&SPECTRUM_COLUMNS);
    let mut verdicts = Vec::new();
    let mut residual = 0.0f64;
    let (mut c_min, mut c_max) = (f64::INFINITY, 0.0f64);
    for (i, e) in est.iter().enumerate() {
        let t = a
            .eigenvalues
            .iter()
            .copied()
            .find(|t| (t - e.lambda0).abs() <= 1e-9);
        let t2 = b
            .eigenvalues
            .iter()
            .copied()
            .find(|t| (t - e.lambda0).abs() <= 1e-8);
        let fit = (n_max >= FIT_HI)
            .then(|| decay_rate_fit(e, &fam, FIT_LO, FIT_HI))
            .transpose()?;
        let p = proportionality(&fam, e, 50)?;
        residual = residual.max(e.recurrence_residual).max(e.boundary_residual);
        c_min = c_min.min(p.constant.abs());
        c_max = c_max.max(p.constant.abs());
        let nan = f64::NAN;
        table.push(vec![
            (i + 1).into(),
            t.unwrap_or(nan).into(),
            t2.unwrap_or(nan).into(),
            e.lambda0.into(),
            t.map_or(nan, |t| e.lambda0 - t).into(),
            e.recurrence_residual.into(),
            e.boundary_residual.into(),
            fit.map_or(nan, |f| f.slope).into(),
            e.predicted_slope.into(),
            fit.map_or(nan, |f| f.ratio).into(),
            p.constant.into(),
            p.spread.into(),
            p.lambda_star.into(),
        ]);
        let l = e.lambda0;
        if let Some(f) = fit {
            verdicts.push(Verdict::within(
                format!("decay_ratio@{l}"),
                f.ratio,
                0.85,
                1.15,
            ));
        }
        verdicts.push(Verdict::at_most(format!("spread@{l}"), p.spread, 1e-6));
    }
    for &t in &cc.unmatched_truncation {
        let mut row: Vec<Cell> = vec![0usize.into(), t.into()];
        row.extend(std::iter::repeat_n(
            Cell::Float(f64::NAN),
            SPECTRUM_COLUMNS.len() - 2,
        ));
        table.push(row);
    }
    let shift = if a.eigenvalues.len() == b.eigenvalues.len() {
        a.eigenvalues
            .iter()
            .zip(&b.eigenvalues)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    } else {
        f64::INFINITY
    };
    verdicts.push(Verdict::flag("bijection", cc.is_bijection()));
    verdicts.push(Verdict::at_most("cross_max_delta", cc.max_difference, 1e-9));
    verdicts.push(Verdict::flag(
        "count_stable",
        a.eigenvalues.len() == b.eigenvalues.len(),
    ));
    verdicts.push(Verdict::at_most("k_shift", shift, 1e-8));
    verdicts.push(Verdict::at_most("eigvec_residual", residual, 1e-10));
    verdicts.push(Verdict::flag(
        "brackets_resolved",
        a.unresolved + b.unresolved == 0,
    ));
    if !est.is_empty() {
        verdicts.push(Verdict::flag(
            "C_separated",
            c_min > 0.0 && c_max.is_finite(),
        ));
        verdicts.push(Verdict::info("C_min", c_min));
        verdicts.push(Verdict::info("C_max", c_max));
    }
    let sp = spacing_report(&fam, &w, &[cfg.k, k2])?;
    for row in &sp {
        verdicts.push(Verdict::info(
            format!("count_K{}", row.size),
            row.count as f64,
        ));
        verdicts.push(Verdict::info(format!("min_gap_K{}", row.size), row.min_gap));
    }
    if sp[0].count >= 2 {
        let rel = (sp[1].min_gap - sp[0].min_gap).abs() / sp[0].min_gap;
        verdicts.push(Verdict::at_most("min_gap_rel_change", rel, 0.01));
    }
    verdicts.push(Verdict::info("shooting_n0", setup.n0 as f64));
    verdicts.push(Verdict::info("shooting_s", setup.s as f64));
    Ok(Report { table, verdicts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[allow(clippy::enum_variant_names)]
pub enum Kind {
    /// `f_1 = 1`, `f_2 = (λ - q_1)/b_1`, forward to `n_max`.
    FirstKind,
    /// Forward from `--seed f1 f2`.
    Forward,
    /// Backward from `--seed f_m f_{m+1}` at `m = n_max - 1` down to 1.
    Backward,
}

pub const SOLVE_COLUMNS: [&str; 3] = ["n", "sign", "logmag"];

pub fn solve(
    cfg: &RunConfig,
    lambda: f64,
    kind: Kind,
    seed: Option<(f64, f64)>,
) -> anyhow::Result<Report> {
    let fam = cfg.family()?;
    if !lambda.is_finite() {
        return Err(ConfigError(format!("lambda must be finite, got {lambda}")).into());
    }
    let seq = match kind {
        Kind::FirstKind => first_kind_polynomials(&fam, lambda, cfg.n_max)?,
        Kind::Forward => {
            let (a, b) = seed.unwrap_or((1.0, 0.0));
            recurrence_forward(&fam, lambda, a, b, cfg.n_max)?
        }
        Kind::Backward => {
            let (a, b) = seed.unwrap_or((1.0, 0.0));
            recurrence_backward(
                &fam,
                lambda,
                cfg.n_max - 1,
                SignedLogValue::from_f64(a),
                SignedLogValue::from_f64(b),
                1,
            )?
        }
    };
    let mut table = Table::new(&SOLVE_COLUMNS);
    for (n, s, m) in seq.triples() {
        table.push(vec![n.into(), (s as i64).into(), m.into()]);
    }
    let mut verdicts = vec![Verdict::at_most(
        "recurrence_residual",
        recurrence_residual(&fam, lambda, &seq),
        1e-10,
    )];
    if kind == Kind::FirstKind && lambda > 0.0 && cfg.n_max >= 10_000 && fam.is_critical() {
        let predicted = fam.decay_rate(lambda) * 10_000f64.powf(1.0 - fam.alpha() / 2.0);
        let got = seq.at(10_000).logmag();
        verdicts.push(Verdict::within(
            "growth_ratio@10000",
            got / predicted,
            0.85,
            1.15,
        ));
    }
    Ok(Report { table, verdicts })
}

/// Reads an `n,sign,logmag` dump and checks it against the recurrence.
pub fn verify_dump(cfg: &RunConfig, lambda: f64, path: &Path) -> anyhow::Result<Report> {
    let fam = cfg.family()?;
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != SOLVE_COLUMNS {
        return Err(
            ConfigError(format!("{}: expected header n,sign,logmag", path.display())).into(),
        );
    }
    let mut triples = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse_err = || ConfigError(format!("{}: bad record {:?}", path.display(), rec));
        let n: usize = rec[0].parse().map_err(|_| parse_err())?;
        let s: i8 = rec[1].parse().map_err(|_| parse_err())?;
        let m: f64 = rec[2].parse().map_err(|_| parse_err())?;
        triples.push((n, s, m));
    }
    let seq = SignedLogSeq::from_triples(&triples)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))
        .context("re-ingesting dump")?;
    let rr = recurrence_residual(&fam, lambda, &seq);
    let br = if seq.start_index() == 1 {
        boundary_residual(&fam, lambda, &seq)?
    } else {
        f64::NAN
    };
    let mut table = Table::new(&["start", "end", "recurrence_residual", "boundary_residual"]);
    table.push(vec![
        seq.start_index().into(),
        seq.end_index().into(),
        rr.into(),
        br.into(),
    ]);
    Ok(Report {
        table,
        verdicts: vec![Verdict::at_most("recurrence_residual", rr, 1e-10)],
    })
}
