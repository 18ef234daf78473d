//! Excess-demand systems and the price-adjustment map
//! `phi_i = (p_i + max(f_i, 0)) / sum_j (p_j + max(f_j, 0))`.

mod cobb_douglas;
mod config;
mod table;

use std::ops::Deref;

use thiserror::Error;

use crate::scalar::{Coord, ParseNumberError};
use crate::simplex_grid::GridError;

pub use cobb_douglas::{CobbDouglas, Consumer};
pub use config::{ConfigNumber, ConsumerConfig, EconomyConfig, TableEntry};
pub use table::TableEconomy;

/// Largest `|p . f(p)|` accepted from a float economy.
pub const WALRAS_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EconomyError {
    #[error("price of good {good} is zero and demand is unbounded there")]
    ZeroPriceSingular { good: usize },
    #[error("all prices are zero")]
    AllZeroPrices,
    #[error("price {index} is negative")]
    NegativePrice { index: usize },
    #[error("prices do not sum to one")]
    NotNormalized,
    #[error("expected {expected} goods, found {found}")]
    WrongGoodCount { expected: usize, found: usize },
    #[error("excess demand for good {good} is not finite")]
    NonFinite { good: usize },
    #[error("walras law fails at {vertex:?}: |p.f| = {residual:e}")]
    WalrasViolation { vertex: Vec<u32>, residual: f64 },
    #[error("invalid economy: {0}")]
    Invalid(String),
    #[error(transparent)]
    Number(#[from] ParseNumberError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("economy config: {0}")]
    Json(#[from] serde_json::Error),
}

/// Excess demand `f(p)`, one entry per good.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandVector<T = f64>(pub Vec<T>);

impl<T> Deref for DemandVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// An excess-demand system on the price simplex.
pub trait ExcessDemand<T: Coord = f64>: Send + Sync {
    fn goods(&self) -> usize;

    /// `f(p)` for a normalized price vector `p`.
    fn excess_demand(&self, p: &[T]) -> Result<Vec<T>, EconomyError>;

    /// Whether demand blows up at zero prices, so labels must be computed
    /// away from the boundary.
    fn needs_interior(&self) -> bool {
        false
    }
}

/// Built-in economies loadable from a config file.
#[derive(Debug, Clone, PartialEq)]
pub enum EconomySpec {
    CobbDouglas(CobbDouglas),
    Table(TableEconomy),
}

impl EconomySpec {
    pub fn from_config(cfg: EconomyConfig) -> Result<Self, EconomyError> {
        cfg.build()
    }

    pub fn from_json(text: &str) -> Result<Self, EconomyError> {
        EconomyConfig::from_json(text)?.build()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EconomySpec::CobbDouglas(_) => "cobb_douglas",
            EconomySpec::Table(_) => "table",
        }
    }
}

impl ExcessDemand<f64> for EconomySpec {
    fn goods(&self) -> usize {
        match self {
            EconomySpec::CobbDouglas(e) => e.goods(),
            EconomySpec::Table(e) => e.goods(),
        }
    }

    fn excess_demand(&self, p: &[f64]) -> Result<Vec<f64>, EconomyError> {
        match self {
            EconomySpec::CobbDouglas(e) => e.excess_demand(p),
            EconomySpec::Table(e) => e.excess_demand(p),
        }
    }

    fn needs_interior(&self) -> bool {
        match self {
            EconomySpec::CobbDouglas(e) => e.needs_interior(),
            EconomySpec::Table(e) => e.needs_interior(),
        }
    }
}

/// `raw / sum(raw)`.
pub fn normalize_prices<T: Coord>(raw: &[T]) -> Result<Vec<T>, EconomyError> {
    if let Some(index) = raw.iter().position(|x| *x < T::zero()) {
        return Err(EconomyError::NegativePrice { index });
    }
    let sum = raw.iter().fold(T::zero(), |acc, x| acc + x.clone());
    if sum.is_zero() {
        return Err(EconomyError::AllZeroPrices);
    }
    Ok(raw.iter().map(|x| x.clone() / sum.clone()).collect())
}

fn check_prices<T: Coord>(goods: usize, p: &[T]) -> Result<(), EconomyError> {
    if p.len() != goods {
        return Err(EconomyError::WrongGoodCount {
            expected: goods,
            found: p.len(),
        });
    }
    if let Some(index) = p.iter().position(|x| *x < T::zero()) {
        return Err(EconomyError::NegativePrice { index });
    }
    let sum = p.iter().fold(T::zero(), |acc, x| acc + x.clone());
    if !T::is_unit_sum(&sum) {
        return Err(EconomyError::NotNormalized);
    }
    Ok(())
}

/// `f(p)`, after checking that `p` is a simplex point and the result finite.
pub fn evaluate<T: Coord, E: ExcessDemand<T> + ?Sized>(econ: &E, p: &[T]) -> Result<DemandVector<T>, EconomyError> {
    check_prices(econ.goods(), p)?;
    let f = econ.excess_demand(p)?;
    if f.len() != econ.goods() {
        return Err(EconomyError::WrongGoodCount {
            expected: econ.goods(),
            found: f.len(),
        });
    }
    if let Some(good) = f.iter().position(|x| !x.is_finite()) {
        return Err(EconomyError::NonFinite { good });
    }
    Ok(DemandVector(f))
}

fn dot<T: Coord>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn abs<T: Coord>(x: T) -> T {
    if x < T::zero() {
        T::zero() - x
    } else {
        x
    }
}

/// `|p . f(p)|`.
pub fn walras_residual<T: Coord, E: ExcessDemand<T> + ?Sized>(econ: &E, p: &[T]) -> Result<T, EconomyError> {
    let f = evaluate(econ, p)?;
    Ok(abs(dot(p, &f)))
}

/// `phi(p)` given `f(p)`.
pub fn price_map_from_demand<T: Coord>(p: &[T], f: &[T]) -> Vec<T> {
    let v: Vec<T> = p.iter().zip(f).map(|(pi, fi)| pi.clone() + fi.max_zero()).collect();
    let sum = v.iter().fold(T::zero(), |acc, x| acc + x.clone());
    v.into_iter().map(|x| x / sum.clone()).collect()
}

pub fn price_map<T: Coord, E: ExcessDemand<T> + ?Sized>(econ: &E, p: &[T]) -> Result<Vec<T>, EconomyError> {
    let f = evaluate(econ, p)?;
    Ok(price_map_from_demand(p, &f))
}

/// `max_i max(f_i, 0)`.
pub fn residual_of_demand<T: Coord>(f: &[T]) -> T {
    f.iter().fold(T::zero(), |acc, x| {
        let x = x.max_zero();
        if x > acc {
            x
        } else {
            acc
        }
    })
}

pub fn equilibrium_residual<T: Coord, E: ExcessDemand<T> + ?Sized>(econ: &E, p: &[T]) -> Result<T, EconomyError> {
    Ok(residual_of_demand(&evaluate(econ, p)?))
}

/// Max-norm distance between two float vectors.
pub fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
