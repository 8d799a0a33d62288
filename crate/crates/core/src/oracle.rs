//! Offline optima.
//!
//! Because rewards depend only on how often each arm is pulled, the offline
//! optimum for horizon `T` is a single arm pulled `T` times: the arm with the
//! largest `Rew_i(T)`. [`brute_force_opt`] checks that claim by enumerating
//! every allocation of `T` pulls, using its own direct sums rather than the
//! prefix caches.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::instance::ImabInstance;

/// Default cap on the number of allocations [`brute_force_opt`] will visit.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 2_000_000;

/// Best single arm (0-based) and its value `OPT(I, T)`; ties go to the
/// lowest index.
pub fn opt_single_arm(instance: &ImabInstance, horizon: u64) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, arm) in instance.arms().iter().enumerate() {
        let v = arm.cumulative(horizon);
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// `OPT(I, N)` and its maximizing arm for every `N` in `1..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalReport {
    pub instance_id: String,
    pub horizon: u64,
    /// 0-based arm per `N`; entry `N - 1` is for horizon `N`.
    pub best_arm_per_n: Vec<usize>,
    /// Entry `N - 1` holds `OPT(I, N)`.
    pub opt_curve: Vec<f64>,
}

impl OptimalReport {
    /// `OPT(I, n)` for `1 <= n <= horizon`; `OPT(I, 0) = 0`.
    pub fn opt(&self, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.opt_curve[(n - 1) as usize]
        }
    }

    /// CSV with header `N,best_arm,opt_value`; arms are written 1-based.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "best_arm", "opt_value"])?;
        for (i, (&arm, &v)) in self.best_arm_per_n.iter().zip(&self.opt_curve).enumerate() {
            w.write_record([(i + 1).to_string(), (arm + 1).to_string(), fmt_num(v)])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

pub fn opt_curve(instance: &ImabInstance, horizon: u64) -> OptimalReport {
    let mut best_arm_per_n = Vec::with_capacity(horizon as usize);
    let mut curve = Vec::with_capacity(horizon as usize);
    for arm in instance.arms() {
        arm.warm(horizon);
    }
    for n in 1..=horizon {
        let (i, v) = opt_single_arm(instance, n);
        best_arm_per_n.push(i);
        curve.push(v);
    }
    OptimalReport {
        instance_id: instance.id().to_string(),
        horizon,
        best_arm_per_n,
        opt_curve: curve,
    }
}

/// A split of `T` pulls among the arms and its total reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub pulls: Vec<u64>,
    pub value: f64,
}

impl Allocation {
    pub fn is_single_arm(&self) -> bool {
        self.pulls.iter().filter(|&&n| n > 0).count() <= 1
    }
}

/// Number of ways to split `t` pulls among `k` arms, `C(t + k - 1, k - 1)`.
pub fn composition_count(k: usize, t: u64) -> u128 {
    let (n, r) = (t as u128 + k as u128 - 1, k as u128 - 1);
    let r = r.min(n - r);
    let mut c: u128 = 1;
    for i in 0..r {
        c = c.saturating_mul(n - i) / (i + 1);
    }
    c
}

/// Exhaustive search over all allocations with `sum(pulls) == horizon`.
///
/// Values within `1e-12` count as ties and resolve to the lexicographically
/// largest allocation, so single-arm optima surface as `(T, 0, ..., 0)`.
pub fn brute_force_opt(instance: &ImabInstance, horizon: u64, limit: u128) -> Result<Allocation> {
    let k = instance.k();
    let count = composition_count(k, horizon);
    if count > limit {
        return Err(Error::EnumerationTooLarge {
            compositions: count,
            limit,
        });
    }
    // direct left-to-right sums, independent of the prefix caches
    let sums: Vec<Vec<f64>> = instance
        .arms()
        .iter()
        .map(|f| {
            let mut row = Vec::with_capacity(horizon as usize + 1);
            let mut s = 0.0;
            row.push(s);
            for n in 1..=horizon {
                s += f.eval(n);
                row.push(s);
            }
            row
        })
        .collect();

    let mut pulls = vec![0u64; k];
    let mut best: Option<Allocation> = None;
    // visits compositions in lexicographically decreasing order
    enumerate(&mut pulls, 0, horizon, &mut |p| {
        let value: f64 = p.iter().enumerate().map(|(i, &n)| sums[i][n as usize]).sum();
        match &best {
            Some(b) if value <= b.value + 1e-12 => {}
            _ => {
                best = Some(Allocation {
                    pulls: p.to_vec(),
                    value,
                })
            }
        }
    });
    Ok(best.expect("at least one composition"))
}

fn enumerate(pulls: &mut [u64], idx: usize, remaining: u64, visit: &mut impl FnMut(&[u64])) {
    if idx == pulls.len() - 1 {
        pulls[idx] = remaining;
        visit(pulls);
        return;
    }
    for n in (0..=remaining).rev() {
        pulls[idx] = n;
        enumerate(pulls, idx + 1, remaining - n, visit);
    }
    pulls[idx] = 0;
}
