//! Penalized-likelihood order selection: ITC(k) = −2 ln L(k) + φ(k)·ν.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Penalty family P(k) = φ(k)·ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyRule<T> {
    /// ν = 2.
    Aic,
    /// ν = ln n.
    Bic,
    /// Explicit ν ≥ 0.
    Gic(T),
}

impl<T: Real> PenaltyRule<T> {
    pub fn gic(nu: T) -> Result<Self> {
        if nu >= T::zero() && nu.is_finite() {
            Ok(Self::Gic(nu))
        } else {
            Err(domain(format!(
                "GIC penalty ν = {nu} must be finite and nonnegative"
            )))
        }
    }

    /// The per-parameter penalty ν for a sample size `n`.
    pub fn resolve_nu(&self, n: usize) -> Result<T> {
        match *self {
            Self::Aic => Ok(T::lit(2.0)),
            Self::Bic => {
                if n < 2 {
                    Err(domain(format!("BIC needs n ≥ 2, got {n}")))
                } else {
                    Ok(T::from_count(n).ln())
                }
            }
            Self::Gic(nu) => {
                if nu >= T::zero() && nu.is_finite() {
                    Ok(nu)
                } else {
                    Err(domain(format!(
                        "GIC penalty ν = {nu} must be finite and nonnegative"
                    )))
                }
            }
        }
    }
}

impl<T: Real> fmt::Display for PenaltyRule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Aic => f.write_str("aic"),
            Self::Bic => f.write_str("bic"),
            Self::Gic(nu) => write!(f, "gic:{nu}"),
        }
    }
}

/// Serialized as its display form, e.g. `"gic:2.5"`.
impl<T: Real> Serialize for PenaltyRule<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<T: Real + FromStr> FromStr for PenaltyRule<T> {
    type Err = Error;

    /// Parses `aic`, `bic` or `gic:NU` (case-insensitive keyword).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "aic" => return Ok(Self::Aic),
            "bic" | "mdl" => return Ok(Self::Bic),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("gic:") {
            let nu: T = rest
                .trim()
                .parse()
                .map_err(|_| domain(format!("cannot parse ν in penalty '{s}'")))?;
            return Self::gic(nu);
        }
        Err(domain(format!(
            "unknown penalty '{s}' (expected aic, bic or gic:NU)"
        )))
    }
}

/// −2·log-likelihood and free-parameter count φ(k) for each order `k = 0..=q_max`.
///
/// The candidate set is dense by construction. `+∞` and `−∞` are accepted as
/// degenerate-fit sentinels; NaN is rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LikelihoodProfile<T> {
    minus2loglik: Vec<T>,
    free_params: Vec<u64>,
}

impl<T: Real> LikelihoodProfile<T> {
    pub fn new(minus2loglik: Vec<T>, free_params: Vec<u64>) -> Result<Self> {
        if minus2loglik.is_empty() {
            return Err(Error::Data("empty likelihood profile".into()));
        }
        if minus2loglik.len() != free_params.len() {
            return Err(Error::Data(format!(
                "profile has {} likelihood values but {} parameter counts",
                minus2loglik.len(),
                free_params.len()
            )));
        }
        if let Some(k) = minus2loglik.iter().position(|v| v.is_nan()) {
            return Err(Error::Data(format!("NaN likelihood at order {k}")));
        }
        if free_params[0] == 0 {
            return Err(Error::Data("free parameter counts must be positive".into()));
        }
        if free_params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Data(
                "free parameter counts must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            minus2loglik,
            free_params,
        })
    }

    pub fn q_max(&self) -> usize {
        self.minus2loglik.len() - 1
    }

    pub fn minus2loglik(&self) -> &[T] {
        &self.minus2loglik
    }

    pub fn free_params(&self) -> &[u64] {
        &self.free_params
    }
}

/// One row of the selection table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderRecord<T> {
    pub order: usize,
    pub minus2loglik: T,
    pub free_params: u64,
    pub penalty: T,
    pub total: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult<T> {
    pub selected: usize,
    pub nu: T,
    pub table: Vec<OrderRecord<T>>,
}

/// Minimizes ITC(k) over the profile for the rule resolved at sample size `n`.
pub fn select_order<T: Real>(
    profile: &LikelihoodProfile<T>,
    rule: &PenaltyRule<T>,
    n: usize,
) -> Result<SelectionResult<T>> {
    let nu = rule.resolve_nu(n)?;
    Ok(select_with_nu(profile, nu))
}

/// Selection for an already-resolved ν. Ties go to the smallest order,
/// including ties among `−∞` totals.
pub fn select_with_nu<T: Real>(profile: &LikelihoodProfile<T>, nu: T) -> SelectionResult<T> {
    let table: Vec<OrderRecord<T>> = profile
        .minus2loglik
        .iter()
        .zip(&profile.free_params)
        .enumerate()
        .map(|(order, (&m2ll, &phi))| {
            let penalty = T::from_u64(phi).expect("parameter count representable") * nu;
            OrderRecord {
                order,
                minus2loglik: m2ll,
                free_params: phi,
                penalty,
                total: m2ll + penalty,
            }
        })
        .collect();
    let mut selected = 0;
    for rec in &table[1..] {
        if rec.total < table[selected].total {
            selected = rec.order;
        }
    }
    SelectionResult {
        selected,
        nu,
        table,
    }
}
