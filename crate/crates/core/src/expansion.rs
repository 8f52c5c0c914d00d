//! Truncated large-`n` expansions of the Poincaré coefficients and of `β_n`
//! on the critical boundary `|c1 - c2| = 1`, together with residual-slope
//! regressions against the exact quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::JacobiFamily;
use crate::fit::{loglog_slope, GEOMETRIC_GRID};
use crate::poincare::{abc_quotients, poincare_f, poincare_g};
use crate::riccati::beta;

/// One term `coeff · λ^lambda_power · n^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub lambda_power: i32,
    pub exponent: f64,
}

impl Term {
    pub fn psi(&self, lambda: f64) -> f64 {
        self.coeff * lambda.powi(self.lambda_power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticExpansion {
    terms: Vec<Term>,
    remainder_order: f64,
}

impl AsymptoticExpansion {
    /// Terms are sorted by exponent; equal exponents are rejected.
    pub fn new(mut terms: Vec<Term>, remainder_order: f64) -> Result<Self> {
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        for w in terms.windows(2) {
            if w[0].exponent >= w[1].exponent {
                return Err(Error::InvalidParameter(format!(
                    "repeated exponent {} in expansion",
                    w[0].exponent
                )));
            }
        }
        if let Some(last) = terms.last() {
            if last.exponent > remainder_order {
                return Err(Error::InvalidParameter(format!(
                    "term n^-{} lies beyond the remainder order {remainder_order}",
                    last.exponent
                )));
            }
        }
        Ok(Self {
            terms,
            remainder_order,
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn remainder_order(&self) -> f64 {
        self.remainder_order
    }

    pub fn eval(&self, lambda: f64, n: usize) -> f64 {
        let n = n as f64;
        self.terms
            .iter()
            .map(|t| t.psi(lambda) * n.powf(-t.exponent))
            .sum()
    }

    /// `(ψ_k(λ), s_k)` pairs.
    pub fn coefficients_at(&self, lambda: f64) -> Vec<(f64, f64)> {
        self.terms
            .iter()
            .map(|t| (t.psi(lambda), t.exponent))
            .collect()
    }
}

fn term(coeff: f64, lambda_power: i32, exponent: f64) -> Term {
    Term {
        coeff,
        lambda_power,
        exponent,
    }
}

pub fn f_expansion(family: &JacobiFamily) -> Result<AsymptoticExpansion> {
    family.require_critical()?;
    let a = family.alpha();
    let c = family.c_product();
    AsymptoticExpansion::new(
        vec![
            term(2.0, 0, 0.0),
            term(2f64.powf(1.0 - a) / c, 1, a),
            term(-(2f64.powf(-2.0 * a)) / c, 2, 2.0 * a),
            term(-a * (1.0 + 1.0 / (2.0 * c)), 0, 1.0),
        ],
        1.0 + a,
    )
}

pub fn g_expansion(family: &JacobiFamily) -> Result<AsymptoticExpansion> {
    family.require_critical()?;
    let a = family.alpha();
    AsymptoticExpansion::new(vec![term(1.0, 0, 0.0), term(-a, 0, 1.0)], 1.0 + a)
}

/// `γ_1..γ_4` with `4/(F_n F_{n-1}) = 1 + γ_1 n^{-α} + γ_2 n^{-2α} + γ_3 n^{-1}
/// + γ_4 n^{-3α} + O(n^{-1-α})`.
pub fn gamma_coefficients(family: &JacobiFamily, lambda: f64) -> Result<[f64; 4]> {
    family.require_critical()?;
    let a = family.alpha();
    let c = family.c_product();
    Ok([
        -(2f64.powf(1.0 - a)) * lambda / c,
        2f64.powf(-2.0 * a) * (3.0 / c + 1.0) * lambda * lambda / c,
        a * (1.0 + 1.0 / (2.0 * c)),
        -(2f64.powf(-3.0 * a)) * (3.0 + 4.0 / c) * lambda.powi(3) / (c * c),
    ])
}

/// Expansion of `4 / (F_n F_{n-1})` built from the γ coefficients.
pub fn inverse_product_expansion(family: &JacobiFamily) -> Result<AsymptoticExpansion> {
    let g = gamma_coefficients(family, 1.0)?;
    let a = family.alpha();
    AsymptoticExpansion::new(
        vec![
            term(1.0, 0, 0.0),
            term(g[0], 1, a),
            term(g[1], 2, 2.0 * a),
            term(g[2], 0, 1.0),
            term(g[3], 3, 3.0 * a),
        ],
        1.0 + a,
    )
}

pub fn beta_expansion(family: &JacobiFamily) -> Result<AsymptoticExpansion> {
    family.require_critical()?;
    let a = family.alpha();
    let c = family.c_product();
    AsymptoticExpansion::new(
        vec![
            term(-(2f64.powf(1.0 - a)) / c, 1, a),
            term(2f64.powf(-2.0 * a) / c * (3.0 / c + 1.0), 2, 2.0 * a),
            term(a / (2.0 * c), 0, 1.0),
            term(
                -(2f64.powf(-3.0 * a)) / (c * c) * (3.0 + 4.0 / c),
                3,
                3.0 * a,
            ),
        ],
        1.0 + a,
    )
}

/// Expansions of the quotients `A_n`, `B_n`, `C_n` behind `F_n` and `G_n`.
pub fn abc_expansions(family: &JacobiFamily) -> Result<[AsymptoticExpansion; 3]> {
    let a = family.alpha();
    let half = term(-a / 2.0, 0, 1.0);
    Ok([
        AsymptoticExpansion::new(vec![term(1.0, 0, 0.0), half], 1.0 + a)?,
        AsymptoticExpansion::new(
            vec![
                term(1.0, 0, 0.0),
                term(-(2f64.powf(1.0 - a)), 1, a),
                term(2f64.powf(-2.0 * a), 2, 2.0 * a),
            ],
            1.0 + a,
        )?,
        AsymptoticExpansion::new(vec![term(1.0, 0, 0.0), half], 1.0 + a)?,
    ])
}

/// Quantities with a printed truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    F,
    G,
    Beta,
    InverseProduct,
    A,
    B,
    C,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::F,
        Quantity::G,
        Quantity::Beta,
        Quantity::InverseProduct,
        Quantity::A,
        Quantity::B,
        Quantity::C,
    ];

    pub fn exact(&self, family: &JacobiFamily, lambda: f64, n: usize) -> Result<f64> {
        match self {
            Quantity::F => poincare_f(family, lambda, n),
            Quantity::G => poincare_g(family, lambda, n),
            Quantity::Beta => beta(family, lambda, n),
            Quantity::InverseProduct => {
                Ok(4.0 / (poincare_f(family, lambda, n)? * poincare_f(family, lambda, n - 1)?))
            }
            Quantity::A => Ok(abc_quotients(family, lambda, n)?.0),
            Quantity::B => Ok(abc_quotients(family, lambda, n)?.1),
            Quantity::C => Ok(abc_quotients(family, lambda, n)?.2),
        }
    }

    pub fn expansion(&self, family: &JacobiFamily) -> Result<AsymptoticExpansion> {
        match self {
            Quantity::F => f_expansion(family),
            Quantity::G => g_expansion(family),
            Quantity::Beta => beta_expansion(family),
            Quantity::InverseProduct => inverse_product_expansion(family),
            Quantity::A => Ok(abc_expansions(family)?[0].clone()),
            Quantity::B => Ok(abc_expansions(family)?[1].clone()),
            Quantity::C => Ok(abc_expansions(family)?[2].clone()),
        }
    }
}

/// Fitted log-log slope of `|exact - truncation|` over [`GEOMETRIC_GRID`].
pub fn residual_slope(family: &JacobiFamily, quantity: Quantity, lambda: f64) -> Result<f64> {
    let exp = quantity.expansion(family)?;
    let res = GEOMETRIC_GRID
        .iter()
        .map(|&n| Ok(quantity.exact(family, lambda, n)? - exp.eval(lambda, n)))
        .collect::<Result<Vec<_>>>()?;
    loglog_slope(&GEOMETRIC_GRID, &res)
}

/// Largest residual slope of `quantity` over a λ grid.
pub fn max_residual_slope(
    family: &JacobiFamily,
    quantity: Quantity,
    lambdas: &[f64],
) -> Result<f64> {
    lambdas
        .iter()
        .map(|&l| residual_slope(family, quantity, l))
        .try_fold(f64::NEG_INFINITY, |m, s| Ok(m.max(s?)))
}
