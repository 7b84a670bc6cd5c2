//! q-variation of sampled multipliers, the variation profile `mu`, the
//! martingale decomposition along `mu`-quantile partitions, rectangle
//! variation in two variables, and block norms of step functions.

use std::ops::Range;

use crate::error::{LabError, Result};
use crate::grid::{FreqInterval, C64};

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(LabError::InvalidExponent(q, "need 0 < q < infinity"))
    }
}

/// Piecewise constant function on the integer frequency arc `[start, end)`.
/// Cell `i` is `[breakpoints[i], breakpoints[i + 1])`, the last cell ends at `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMultiplier {
    breakpoints: Vec<i64>,
    values: Vec<C64>,
    end: i64,
}

impl StepMultiplier {
    pub fn new(breakpoints: Vec<i64>, values: Vec<C64>, end: i64) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(LabError::Malformed(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || *breakpoints.last().unwrap() >= end {
            return Err(LabError::Malformed("breakpoints must increase strictly and stay below the domain end".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LabError::Malformed("non-finite multiplier value".into()));
        }
        Ok(Self { breakpoints, values, end })
    }

    /// Constant `c` on `domain`.
    pub fn constant(domain: FreqInterval, c: C64) -> Self {
        Self { breakpoints: vec![domain.lo], values: vec![c], end: domain.hi }
    }

    pub fn domain(&self) -> FreqInterval {
        FreqInterval { lo: self.breakpoints[0], hi: self.end }
    }

    pub fn breakpoints(&self) -> &[i64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn cells(&self) -> impl Iterator<Item = (FreqInterval, C64)> + '_ {
        (0..self.values.len()).map(move |i| {
            let hi = self.breakpoints.get(i + 1).copied().unwrap_or(self.end);
            (FreqInterval { lo: self.breakpoints[i], hi }, self.values[i])
        })
    }

    /// Value at `k`; zero outside the domain.
    pub fn at(&self, k: i64) -> C64 {
        if k < self.breakpoints[0] || k >= self.end {
            return C64::new(0.0, 0.0);
        }
        let i = self.breakpoints.partition_point(|&b| b <= k) - 1;
        self.values[i]
    }

    /// Same function on a finer partition: every cell is cut at `cuts` that fall inside it.
    pub fn refine(&self, cuts: &[i64]) -> Self {
        let mut bps: Vec<i64> = self.breakpoints.iter().copied().chain(cuts.iter().copied().filter(|&c| c > self.breakpoints[0] && c < self.end)).collect();
        bps.sort_unstable();
        bps.dedup();
        let values = bps.iter().map(|&b| self.at(b)).collect();
        Self { breakpoints: bps, values, end: self.end }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `sup (sum_k |m(xi_{k+1}) - m(xi_k)|^q)^{1/q}` over increasing index
/// sequences, by the `O(n^2)` recursion `V[j] = max_{i<j} V[i] + |m_j - m_i|^q`.
pub fn var_q(m: &[C64], q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(best_ending(m, q).into_iter().fold(0.0, f64::max).powf(1.0 / q))
}

/// `V[j]`: best `q`-th power sum over sequences ending at `j`.
fn best_ending(m: &[C64], q: f64) -> Vec<f64> {
    let mut v = vec![0.0; m.len()];
    for j in 1..m.len() {
        let mut best = 0.0f64;
        for i in 0..j {
            let d = (m[j] - m[i]).norm();
            if d > 0.0 {
                best = best.max(v[i] + d.powf(q));
            }
        }
        v[j] = best;
    }
    v
}

/// `||m||_inf + Var_q(m)`.
pub fn vq_norm(m: &[C64], q: f64) -> Result<f64> {
    let sup = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(sup + var_q(m, q)?)
}

/// Variation of a step function: the cell values are the only samples that matter.
pub fn step_var_q(m: &StepMultiplier, q: f64) -> Result<f64> {
    var_q(m.values(), q)
}

/// `mu[i] = Var_q(m[0..=i])^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationProfile {
    pub mu: Vec<f64>,
}

impl VariationProfile {
    pub fn new(m: &[C64], q: f64) -> Result<Self> {
        check_q(q)?;
        let mut run = 0.0f64;
        let mu = best_ending(m, q)
            .into_iter()
            .map(|v| {
                run = run.max(v);
                run
            })
            .collect();
        Ok(Self { mu })
    }

    pub fn total(&self) -> f64 {
        self.mu.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct MartingaleLevel {
    /// `Pi_j` as contiguous index ranges in increasing order.
    pub cells: Vec<Range<usize>>,
    /// `m_j = E_j m - E_{j-1} m` (with `E_{-1} m = 0`), in units of the input.
    pub piece: Vec<C64>,
    /// `||m_j||_inf` of the normalized multiplier.
    pub sup: f64,
}

#[derive(Debug, Clone)]
pub struct MartingaleDecomposition {
    /// `||m||_{V_q}`; the partitions are built for `m / scale`.
    pub scale: f64,
    pub q: f64,
    pub levels: Vec<MartingaleLevel>,
    /// `max_j 2^{j/q} ||m_j||_inf` for the normalized multiplier.
    pub constant: f64,
}

impl MartingaleDecomposition {
    /// `sum_{j <= j_max} m_j`, equal to the cell averages of `m` on `Pi_{j_max}`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let len = self.levels[0].piece.len();
        let mut out = vec![C64::new(0.0, 0.0); len];
        for l in &self.levels {
            for (o, p) in out.iter_mut().zip(&l.piece) {
                *o += p;
            }
        }
        out
    }
}

fn cell_ranges(labels: &[u64]) -> Vec<Range<usize>> {
    let mut cells = Vec::new();
    let mut start = 0;
    for i in 1..=labels.len() {
        if i == labels.len() || labels[i] != labels[start] {
            cells.push(start..i);
            start = i;
        }
    }
    cells
}

/// Levels `j = 0..=j_max`. `Pi_j` is the preimage under `mu` of the standard
/// partition of `[0, mu_total]` into `2^j` cells (last cell closed); empty
/// cells are dropped.
pub fn martingale_decompose(m: &[C64], q: f64, j_max: u32) -> Result<MartingaleDecomposition> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(LabError::InvalidExponent(q, "decomposition needs 1 <= q < infinity"));
    }
    if m.is_empty() {
        return Err(LabError::InvalidLength(0));
    }
    if j_max > 52 {
        return Err(LabError::InvalidParameter(format!("j_max = {j_max} exceeds 52")));
    }
    let scale = vq_norm(m, q)?;
    let normalized: Vec<C64> = if scale > 0.0 { m.iter().map(|z| z / scale).collect() } else { m.to_vec() };
    let profile = VariationProfile::new(&normalized, q)?;
    let total = profile.total();
    // Finest labels once, coarser labels by shifting, so nesting is exact.
    let top = 1u64 << j_max;
    let finest: Vec<u64> = profile
        .mu
        .iter()
        .map(|&x| if total > 0.0 { (((x / total) * top as f64).floor() as u64).min(top - 1) } else { 0 })
        .collect();
    let mut levels = Vec::with_capacity(j_max as usize + 1);
    let mut prev = vec![C64::new(0.0, 0.0); m.len()];
    let mut constant = 0.0f64;
    for j in 0..=j_max {
        let labels: Vec<u64> = finest.iter().map(|l| l >> (j_max - j)).collect();
        let cells = cell_ranges(&labels);
        let mut avg = vec![C64::new(0.0, 0.0); m.len()];
        for c in &cells {
            let mean = normalized[c.clone()].iter().sum::<C64>() / c.len() as f64;
            avg[c.clone()].iter_mut().for_each(|a| *a = mean);
        }
        let diff: Vec<C64> = avg.iter().zip(&prev).map(|(a, b)| a - b).collect();
        let sup = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
        constant = constant.max((j as f64 / q).exp2() * sup);
        let unit = if scale > 0.0 { scale } else { 1.0 };
        levels.push(MartingaleLevel { cells, piece: diff.iter().map(|z| z * unit).collect(), sup });
        prev = avg;
    }
    Ok(MartingaleDecomposition { scale, q, levels, constant })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var2Mode {
    /// Tensor partitions: exact over column subsets when `n2 <= 10`,
    /// alternating coordinate recursions otherwise.
    GridDp,
    /// Every tensor partition; grids up to 5 x 5.
    Brute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Var2 {
    pub value: f64,
    /// Row breakpoints of the maximizing tensor partition.
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Mixed difference of `m` over `[x0, x1] x [y0, y1]`.
pub fn diff_rect(m: &[C64], n2: usize, (x0, x1): (usize, usize), (y0, y1): (usize, usize)) -> C64 {
    m[x1 * n2 + y1] - m[x0 * n2 + y1] - m[x1 * n2 + y0] + m[x0 * n2 + y0]
}

fn tensor_sum(m: &[C64], n2: usize, rows: &[usize], cols: &[usize], q: f64) -> f64 {
    let mut s = 0.0;
    for r in rows.windows(2) {
        for c in cols.windows(2) {
            s += diff_rect(m, n2, (r[0], r[1]), (c[0], c[1])).norm().powf(q);
        }
    }
    s
}

/// Best breakpoint set along one axis with the other fixed; `cost(i, j) >= 0`
/// is the contribution of the slab between breakpoints `i < j`. Prepending a
/// breakpoint never hurts, so every chain starts at 0.
fn chain_dp(len: usize, cost: impl Fn(usize, usize) -> f64) -> (f64, Vec<usize>) {
    let mut v = vec![0.0; len];
    let mut from = vec![0; len];
    for j in 1..len {
        for i in 0..j {
            let c = v[i] + cost(i, j);
            if c > v[j] {
                v[j] = c;
                from[j] = i;
            }
        }
    }
    let (mut end, mut best) = (len - 1, 0.0);
    for (j, &x) in v.iter().enumerate() {
        if x > best {
            best = x;
            end = j;
        }
    }
    let mut path = vec![end];
    while *path.last().unwrap() != 0 {
        path.push(from[*path.last().unwrap()]);
    }
    path.reverse();
    (best, path)
}

fn rows_given_cols(m: &[C64], n1: usize, n2: usize, cols: &[usize], q: f64) -> (f64, Vec<usize>) {
    chain_dp(n1, |i, j| cols.windows(2).map(|c| diff_rect(m, n2, (i, j), (c[0], c[1])).norm().powf(q)).sum())
}

fn cols_given_rows(m: &[C64], n2: usize, rows: &[usize], q: f64) -> (f64, Vec<usize>) {
    chain_dp(n2, |i, j| rows.windows(2).map(|r| diff_rect(m, n2, (r[0], r[1]), (i, j)).norm().powf(q)).sum())
}

fn subsets(len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << len).filter(|s| s.count_ones() >= 2).map(move |s| (0..len).filter(|i| s >> i & 1 == 1).collect())
}

/// Rectangle `q`-variation of `m` sampled on an `n1 x n2` grid (row-major),
/// restricted to tensor partitions.
pub fn var_q_2d(m: &[C64], n1: usize, n2: usize, q: f64, mode: Var2Mode) -> Result<Var2> {
    check_q(q)?;
    if m.len() != n1 * n2 {
        return Err(LabError::LengthMismatch { expected: n1 * n2, actual: m.len() });
    }
    if n1 < 2 || n2 < 2 {
        return Ok(Var2 { value: 0.0, rows: vec![0], cols: vec![0] });
    }
    let (mut best, mut rows, mut cols) = (0.0f64, vec![0, n1 - 1], vec![0, n2 - 1]);
    match mode {
        Var2Mode::Brute => {
            if n1 > 5 || n2 > 5 {
                return Err(LabError::GridTooLarge(n1 * n2));
            }
            let col_sets: Vec<Vec<usize>> = subsets(n2).collect();
            for r in subsets(n1) {
                for c in &col_sets {
                    let s = tensor_sum(m, n2, &r, c, q);
                    if s > best {
                        (best, rows, cols) = (s, r.clone(), c.clone());
                    }
                }
            }
        }
        Var2Mode::GridDp if n2 <= 10 => {
            for c in subsets(n2) {
                let (s, r) = rows_given_cols(m, n1, n2, &c, q);
                if s > best {
                    (best, rows, cols) = (s, r, c);
                }
            }
        }
        Var2Mode::GridDp => {
            // Alternate from the full column set and from the coarsest one.
            for init in [(0..n2).collect::<Vec<_>>(), vec![0, n2 - 1]] {
                let mut c = init;
                let mut cur = -1.0;
                loop {
                    let (_, r) = rows_given_cols(m, n1, n2, &c, q);
                    let (s, c2) = cols_given_rows(m, n2, &r, q);
                    if s <= cur * (1.0 + 1e-15) {
                        break;
                    }
                    cur = s;
                    c = c2;
                    if s > best {
                        (best, rows, cols) = (s, r, c.clone());
                    }
                }
            }
        }
    }
    Ok(Var2 { value: best.powf(1.0 / q), rows, cols })
}

/// `(sum_j |b_j|^q)^{1/q}` over the cells of `m`.
pub fn block_step_norm(m: &StepMultiplier, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(m.values().iter().map(|v| v.norm().powf(q)).sum::<f64>().powf(1.0 / q))
}

/// Two-level block norm: `(sum_i (sum_j |b_ij|^{q_inner})^{q_outer/q_inner})^{1/q_outer}`,
/// with `blocks[i]` holding the inner cell values of outer cell `i`.
pub fn nested_block_norm(blocks: &[Vec<C64>], q_outer: f64, q_inner: f64) -> Result<f64> {
    check_q(q_outer)?;
    check_q(q_inner)?;
    let s: f64 = blocks
        .iter()
        .map(|b| b.iter().map(|v| v.norm().powf(q_inner)).sum::<f64>().powf(q_outer / q_inner))
        .sum();
    Ok(s.powf(1.0 / q_outer))
}
