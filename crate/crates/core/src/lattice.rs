//! Counting nonzero lattice points in Euclidean balls.

use std::collections::BTreeMap;

use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::majorization::{weak_quasinorm, DecreasingSequence};

/// Cumulative counts `N_0(lambda)` at every jump `lambda = |k|^2 <= lambda_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCountProfile {
    pub n: usize,
    pub lambda_max: f64,
    /// `(lambda_j, N_0(lambda_j))`, strictly increasing in both entries.
    pub jumps: Vec<(u64, u64)>,
}

/// Multiplicity of each squared norm among nonzero points with `|k|^2 <= r2_max`.
fn shell_counts(n: usize, r2_max: u64) -> BTreeMap<u64, u64> {
    let r = (r2_max as f64).sqrt().floor() as i64;
    let mut shells = BTreeMap::new();
    // Recursive enumeration over axes with the running squared norm.
    fn walk(axis: usize, n: usize, r: i64, acc: u64, r2_max: u64, shells: &mut BTreeMap<u64, u64>) {
        if axis == n {
            if acc > 0 {
                *shells.entry(acc).or_insert(0) += 1;
            }
            return;
        }
        for x in -r..=r {
            let s = acc + (x * x) as u64;
            if s <= r2_max {
                walk(axis + 1, n, r, s, r2_max, shells);
            }
        }
    }
    walk(0, n, r, 0, r2_max, &mut shells);
    shells
}

pub fn count_profile(n: usize, lambda_max: f64) -> Result<LatticeCountProfile> {
    if !(lambda_max >= 1.0) || !lambda_max.is_finite() {
        return Err(Error::Domain {
            name: "lambda_max",
            value: lambda_max,
            domain: "1 <= lambda_max < inf",
        });
    }
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    let shells = shell_counts(n, lambda_max.floor() as u64);
    let mut total = 0;
    let jumps = shells
        .into_iter()
        .map(|(r2, m)| {
            total += m;
            (r2, total)
        })
        .collect();
    Ok(LatticeCountProfile { n, lambda_max, jumps })
}

/// `N_0(lambda) = #{k != 0 : |k|^2 <= lambda}`.
pub fn count_nonzero_in_ball(n: usize, lambda: f64) -> Result<u64> {
    if !(lambda >= 1.0) {
        return Err(Error::Domain {
            name: "lambda",
            value: lambda,
            domain: "lambda >= 1",
        });
    }
    Ok(count_profile(n, lambda)?.jumps.last().map_or(0, |j| j.1))
}

/// Maximum of `lambda^{-n/2} N_0(lambda)` over the scan window.
#[derive(Debug, Clone, PartialEq)]
pub struct Nu0Estimate {
    /// Lower bound for the supremum over all `lambda >= 1`.
    pub value: f64,
    /// Smallest jump where the maximum is attained.
    pub argmax: u64,
    pub profile: LatticeCountProfile,
}

/// The supremum of a right-continuous step function times a decreasing
/// factor is attained at a jump, so the jump list suffices.
pub fn nu0_estimate(n: usize, lambda_max: f64) -> Result<Nu0Estimate> {
    let profile = count_profile(n, lambda_max)?;
    let mut best = (0.0, 1);
    for &(lam, count) in &profile.jumps {
        let v = ratio(n, lam, count);
        if v > best.0 {
            best = (v, lam);
        }
    }
    Ok(Nu0Estimate {
        value: best.0,
        argmax: best.1,
        profile,
    })
}

/// `lambda^{-n/2} N_0(lambda)`, exact for even `n` (integer power).
pub fn ratio(n: usize, lambda: u64, count: u64) -> f64 {
    if n.is_multiple_of(2) {
        count as f64 / (lambda as f64).powi((n / 2) as i32)
    } else {
        count as f64 / (lambda as f64).powf(n as f64 / 2.0)
    }
}

/// Closed-form upper bound used on the right-hand side of inequalities:
/// 4 in dimension two and `3^n - 1` otherwise.
pub fn nu0_bound(n: usize) -> f64 {
    if n == 2 {
        4.0
    } else {
        3f64.powi(n as i32) - 1.0
    }
}

pub const ANCHOR_NU0: &str = "lattice point constant";

/// Record comparing the scanned constant with its closed-form bound.
pub fn verify_nu0(id: &str, n: usize, lambda_max: f64) -> Result<CheckRecord> {
    let est = nu0_estimate(n, lambda_max)?;
    Ok(CheckRecord::upper(id, ANCHOR_NU0, est.value, nu0_bound(n), 0.0)
        .with("n", n)
        .with("lambda_max", lambda_max)
        .with("argmax", est.argmax)
        .with("jumps", est.profile.jumps.len()))
}

/// Weak `l_{p,inf}` quasinorm of `k -> |k|^{-n/p}` over `0 < |k|_inf <= K`.
pub fn weak_norm_gp(n: usize, p: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain {
            name: "K",
            value: 0.0,
            domain: "K >= 1",
        });
    }
    let mut values = Vec::new();
    let r = k as i64;
    let mut cur = vec![-r; n];
    loop {
        let r2: i64 = cur.iter().map(|x| x * x).sum();
        if r2 > 0 {
            values.push((r2 as f64).powf(-(n as f64) / (2.0 * p)));
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                return weak_quasinorm(&DecreasingSequence::from_reals(values), p);
            }
            axis -= 1;
            if cur[axis] < r {
                cur[axis] += 1;
                break;
            }
            cur[axis] = -r;
        }
    }
}
