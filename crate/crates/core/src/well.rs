//! Well-distributed refinements of interval collections.
//!
//! The model decomposition of `[-1/2, 1/2]` is the central piece
//! `[-1/18, 1/18]` together with `+-[b_k, b_{k+1}]`, where
//! `b_k = 1/2 - (4/9)(4/5)^k`. Each piece sits at distance four times its
//! length from the nearest endpoint. It is transported to an integer arc by
//! the affine map and rounded to the nearest integer; the geometric tail is
//! cut once a piece would be narrower than one frequency and lumped into a
//! final (flagged) piece on each side.

use crate::grid::{FreqInterval, IntervalCollection};

/// `b_k = 1/2 - (4/9)(4/5)^k`.
pub fn model_breakpoint(k: u32) -> f64 {
    0.5 - (4.0 / 9.0) * 0.8f64.powi(k as i32)
}

/// Length `(4/9)(4/5)^k / 5` of the model piece `[b_k, b_{k+1}]`.
pub fn model_length(k: u32) -> f64 {
    (4.0 / 9.0) * 0.8f64.powi(k as i32) / 5.0
}

/// One member of `Well(omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WellPiece {
    pub interval: FreqInterval,
    /// Tail remainder that does not satisfy `2 omega' in omega`.
    pub lumped: bool,
    /// `omega` was too narrow to refine and is passed through unchanged.
    pub pass_through: bool,
}

fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// `Well(omega)` in increasing frequency order.
pub fn refine_interval(omega: FreqInterval) -> Vec<WellPiece> {
    let w = omega.width() as f64;
    if model_length(0) * w < 1.0 {
        return vec![WellPiece { interval: omega, lumped: false, pass_through: true }];
    }
    let map = |u: f64| round_half_up(omega.lo as f64 + (u + 0.5) * w);
    let mut k_stop = 0u32;
    while model_length(k_stop) * w >= 1.0 {
        k_stop += 1;
    }
    let mut right = Vec::new();
    let mut left = Vec::new();
    for k in 0..k_stop {
        let (a, b) = (model_breakpoint(k), model_breakpoint(k + 1));
        right.push(WellPiece { interval: FreqInterval { lo: map(a), hi: map(b) }, lumped: false, pass_through: false });
        left.push(WellPiece { interval: FreqInterval { lo: map(-b), hi: map(-a) }, lumped: false, pass_through: false });
    }
    let cut = model_breakpoint(k_stop);
    right.push(WellPiece { interval: FreqInterval { lo: map(cut), hi: omega.hi }, lumped: true, pass_through: false });
    left.push(WellPiece { interval: FreqInterval { lo: omega.lo, hi: map(-cut) }, lumped: true, pass_through: false });
    let center = WellPiece {
        interval: FreqInterval { lo: map(-1.0 / 18.0), hi: map(1.0 / 18.0) },
        lumped: false,
        pass_through: false,
    };
    left.reverse();
    left.into_iter().chain(std::iter::once(center)).chain(right).collect()
}

/// Detailed refinement: the pieces of every `Well(omega)`, in input order.
pub fn refine_detailed(omega: &IntervalCollection) -> Vec<Vec<WellPiece>> {
    omega.intervals().iter().map(|&w| refine_interval(w)).collect()
}

/// `Well(Omega) = union of Well(omega)`.
pub fn refine(omega: &IntervalCollection) -> IntervalCollection {
    let pieces: Vec<FreqInterval> = refine_detailed(omega).into_iter().flatten().map(|p| p.interval).collect();
    IntervalCollection::new(pieces).expect("refinement of a disjoint family is disjoint")
}

/// `|| sum_omega 1_{3 omega} ||_inf` over integer frequencies in `[-n/2, n/2)`.
pub fn overlap_bound(omega: &IntervalCollection, n: usize) -> u64 {
    let h = (n / 2) as i64;
    let mut diff = vec![0i64; n + 1];
    for w in omega.intervals() {
        if let Some(t) = w.dilate(3.0).clip(n) {
            diff[(t.lo + h) as usize] += 1;
            diff[(t.hi + h) as usize] -= 1;
        }
    }
    let mut run = 0i64;
    let mut best = 0i64;
    for d in &diff[..n] {
        run += d;
        best = best.max(run);
    }
    best as u64
}

pub const WELL_DISTRIBUTED_LIMIT: u64 = 100;

pub fn is_well_distributed(omega: &IntervalCollection, n: usize) -> bool {
    overlap_bound(omega, n) <= WELL_DISTRIBUTED_LIMIT
}
