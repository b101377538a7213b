//! Least-squares rates from a per-level CSV.

use std::path::Path;
use std::str::FromStr;

use afem_core::rates::{fit_loglog, RateFit};

use crate::error::{AfemError, Result};
use crate::formats::{read_levels, LevelRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Rho,
    RhoTilde,
    Apx,
    Eps,
    /// `sqrt(eps)`, which decays like the energy error.
    SqrtEps,
}

impl Quantity {
    pub fn of(self, row: &LevelRow) -> Option<f64> {
        match self {
            Quantity::Rho => Some(row.rho),
            Quantity::RhoTilde => Some(row.rho_tilde),
            Quantity::Apx => Some(row.apx),
            Quantity::Eps => row.eps,
            Quantity::SqrtEps => row.eps.map(f64::sqrt),
        }
    }
}

impl FromStr for Quantity {
    type Err = AfemError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" => Quantity::Rho,
            "rho_tilde" => Quantity::RhoTilde,
            "apx" => Quantity::Apx,
            "eps" => Quantity::Eps,
            "sqrt_eps" => Quantity::SqrtEps,
            _ => return Err(AfemError::Usage(format!("unknown quantity `{s}` (rho, rho_tilde, apx, eps, sqrt_eps)"))),
        })
    }
}

/// Which levels enter a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    All,
    /// The last `k` rows.
    Last(usize),
    /// Levels in `from..=to`, either end open.
    Levels {
        from: Option<usize>,
        to: Option<usize>,
    },
}

impl Window {
    pub fn select<'a>(&self, rows: &'a [LevelRow]) -> Vec<&'a LevelRow> {
        match *self {
            Window::All => rows.iter().collect(),
            Window::Last(k) => rows[rows.len().saturating_sub(k)..].iter().collect(),
            Window::Levels { from, to } => {
                rows.iter().filter(|r| from.is_none_or(|a| r.level >= a) && to.is_none_or(|b| r.level <= b)).collect()
            }
        }
    }
}

impl FromStr for Window {
    type Err = AfemError;

    /// `all`, `last:K` or `A:B` with either bound optional.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || AfemError::Usage(format!("bad window `{s}` (all, last:K, A:B, A:, :B)"));
        if s == "all" {
            return Ok(Window::All);
        }
        if let Some(k) = s.strip_prefix("last:") {
            return k.parse().map(Window::Last).map_err(|_| bad());
        }
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let bound = |t: &str| -> Result<Option<usize>> {
            if t.is_empty() {
                Ok(None)
            } else {
                t.parse().map(Some).map_err(|_| bad())
            }
        };
        Ok(Window::Levels { from: bound(a)?, to: bound(b)? })
    }
}

/// Slope of `log quantity` against `log N` over the window.
pub fn fit_rows(rows: &[LevelRow], quantity: Quantity, window: Window) -> Result<RateFit> {
    let chosen = window.select(rows);
    let mut n = Vec::with_capacity(chosen.len());
    let mut q = Vec::with_capacity(chosen.len());
    for r in chosen {
        let v = quantity.of(r).ok_or_else(|| AfemError::Usage("the CSV has no eps column".into()))?;
        n.push(r.n as f64);
        q.push(v);
    }
    fit_loglog(&n, &q).map_err(|e| AfemError::Usage(e.to_string()))
}

pub fn fit_rates(csv: &Path, quantity: Quantity, window: Window) -> Result<RateFit> {
    let file = std::fs::File::open(csv).map_err(|e| AfemError::io(csv, e))?;
    fit_rows(&read_levels(file)?, quantity, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(mut q: impl FnMut(f64) -> f64) -> Vec<LevelRow> {
        (0..8)
            .map(|l| {
                let n = 2usize << (2 * l);
                let v = q(n as f64);
                LevelRow {
                    level: l,
                    n,
                    rho: v,
                    rho_tilde: v,
                    apx: v,
                    j: 0.0,
                    eps: Some(v * v),
                    pdas_iters: 1,
                    wall_ms: 0.0,
                }
            })
            .collect()
    }

    #[test]
    fn windows() {
        let r = rows(|n| n.powf(-0.5));
        assert_eq!(Window::from_str("last:5").unwrap().select(&r).len(), 5);
        assert_eq!(Window::from_str("2:4").unwrap().select(&r).len(), 3);
        assert_eq!(Window::from_str("6:").unwrap().select(&r).len(), 2);
        assert_eq!(Window::from_str(":0").unwrap().select(&r).len(), 1);
        assert_eq!(Window::from_str("all").unwrap().select(&r).len(), 8);
        assert!(Window::from_str("x").is_err());
        assert!(Window::from_str("last:").is_err());
    }

    #[test]
    fn exact_slopes() {
        let r = rows(|n| n.powf(-0.5));
        let fit = fit_rows(&r, Quantity::SqrtEps, Window::All).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        let fit = fit_rows(&r, Quantity::Eps, Window::Last(4)).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        let fit = fit_rows(&rows(|_| 3.0), Quantity::Rho, Window::All).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = rows(|n| 2.5 * n.powf(-0.75) * (1.0 + rng.gen_range(-0.01..0.01)));
        let fit = fit_rows(&r, Quantity::Apx, Window::All).unwrap();
        assert!((fit.slope + 0.75).abs() < 0.02);
    }

    #[test]
    fn too_few_points() {
        let r = rows(|n| n.powf(-0.5));
        assert!(fit_rows(&r, Quantity::Apx, Window::Last(3)).is_err());
        let mut no_eps = r.clone();
        no_eps.iter_mut().for_each(|x| x.eps = None);
        assert!(matches!(fit_rows(&no_eps, Quantity::Eps, Window::All), Err(AfemError::Usage(_))));
    }
}
