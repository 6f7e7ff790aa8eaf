//! Lattice-path counting primitives.
//!
//! Arrival orders of adversarial (`X`) and honest (`Y`) blocks during an
//! attack cycle are words in which no prefix has more `Y`s than `X`s
//! (Pre-Dyck words). Their counts, the Catalan numbers, and the Wald
//! extension term are all that the closed forms in [`crate::analytic`] need.
//!
//! Counts are kept exact (as a rounded 128-bit integer) while the binomial
//! fits, and switch to log-gamma evaluation beyond that so that long
//! stubbornness levels never overflow.

use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// Largest `n` for which `binom(n, k)` is evaluated with integer arithmetic.
const EXACT_BINOMIAL_MAX_N: u64 = 120;

/// Relative size below which a series term no longer contributes.
pub(crate) const SERIES_REL_TOL: f64 = 1e-16;
/// Hard cap on the number of terms summed for an infinite level.
pub(crate) const SERIES_MAX_TERMS: u32 = 10_000;

/// A nonnegative path count that stays representable for huge arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathCount {
    ln: f64,
    exact: Option<f64>,
}

impl PathCount {
    pub const ZERO: PathCount = PathCount {
        ln: f64::NEG_INFINITY,
        exact: Some(0.0),
    };

    fn from_exact(v: u128) -> Self {
        let value = v as f64;
        PathCount {
            ln: value.ln(),
            exact: Some(value),
        }
    }

    fn from_ln(ln: f64) -> Self {
        PathCount { ln, exact: None }
    }

    /// The count as a float; `+inf` once it exceeds `f64::MAX`.
    pub fn value(&self) -> f64 {
        self.exact.unwrap_or_else(|| self.ln.exp())
    }

    /// Natural logarithm of the count (`-inf` for zero).
    pub fn ln(&self) -> f64 {
        self.ln
    }

    /// Whether the count came from integer arithmetic.
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `count · α^i · β^j`, the probability mass of every path with this count.
    pub fn weighted(&self, alpha: f64, alpha_exp: u32, beta: f64, beta_exp: u32) -> f64 {
        match self.exact {
            Some(0.0) => 0.0,
            Some(v) if alpha_exp <= i32::MAX as u32 && beta_exp <= i32::MAX as u32 => {
                v * alpha.powi(alpha_exp as i32) * beta.powi(beta_exp as i32)
            }
            _ => (self.ln + alpha_exp as f64 * alpha.ln() + beta_exp as f64 * beta.ln()).exp(),
        }
    }
}

fn exact_binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `n`-th Catalan number, `binom(2n, n) / (n + 1)`.
pub fn catalan(n: u32) -> PathCount {
    let n = n as u64;
    if 2 * n <= EXACT_BINOMIAL_MAX_N {
        PathCount::from_exact(exact_binomial(2 * n, n) / (n as u128 + 1))
    } else {
        PathCount::from_ln(ln_binomial(2 * n, n) - ((n + 1) as f64).ln())
    }
}

/// Number of Pre-Dyck words with `n` `X`s and `m` `Y`s,
/// `P[n, m] = (n - m + 1) / (n + m + 1) · binom(n + m + 1, n + 1)`, and zero when `m > n`.
pub fn pre_dyck_count(n: u32, m: u32) -> PathCount {
    if m > n {
        return PathCount::ZERO;
    }
    let (n, m) = (n as u64, m as u64);
    let total = n + m + 1;
    if total <= EXACT_BINOMIAL_MAX_N {
        let b = exact_binomial(total, n + 1);
        PathCount::from_exact(b * (n - m + 1) as u128 / total as u128)
    } else {
        let ln = ((n - m + 1) as f64).ln() - (total as f64).ln() + ln_binomial(total, n + 1);
        PathCount::from_ln(ln)
    }
}

/// Catalan generating function `C(x) = 2 / (1 + sqrt(1 - 4x))` on `[0, 1/4]`.
pub fn catalan_generating(x: f64) -> Result<f64> {
    if !(0.0..=0.25).contains(&x) {
        return Err(Error::GeneratingArgument(x));
    }
    Ok(2.0 / (1.0 + (1.0 - 4.0 * x).sqrt()))
}

/// Expected number of extra adversarial arrivals before a lead of `gap + 1`
/// shrinks back to one: `gap · α / (1 - 2α)`.
pub fn wald_extension(gap: u32, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Alpha(alpha));
    }
    Ok(gap as f64 * alpha / (1.0 - 2.0 * alpha))
}

/// Sums `term(0) + term(1) + ...` until a term drops below
/// [`SERIES_REL_TOL`] of the running total or [`SERIES_MAX_TERMS`] is hit.
pub(crate) fn truncated_series(mut term: impl FnMut(u32) -> f64) -> f64 {
    let mut sum = 0.0;
    for n in 0..SERIES_MAX_TERMS {
        let t = term(n);
        sum += t;
        if n >= 8 && t.abs() <= SERIES_REL_TOL * sum.abs() {
            break;
        }
    }
    sum
}
