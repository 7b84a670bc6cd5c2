//! Fourier multipliers `A_m`, lower-bound estimates of their `L^p` norms,
//! the variation bound over lacunary blocks, decoupling of refined step
//! multipliers, and two families of counterexamples.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fit::loglog_slope;
use crate::grid::{dft, freq_slot, idft, lp_norm, slot_freq, FreqInterval, IntervalCollection, Spectrum, TorusSignal, C64};
use crate::projections::square_sharp;
use crate::rng::{gaussian_signal, random_sign, trial_rng};
use crate::variation::{var_q, vq_norm, StepMultiplier};
use crate::window::make_window;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Multiplier sampled on every frequency of `Z_n`, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    values: Vec<C64>,
}

impl Multiplier {
    pub fn from_fft_order(values: Vec<C64>) -> Result<Self> {
        crate::grid::check_len(values.len())?;
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, m: impl Fn(i64) -> C64) -> Result<Self> {
        crate::grid::check_len(n)?;
        Ok(Self { values: (0..n).map(|i| m(slot_freq(i, n))).collect() })
    }

    /// A step multiplier whose domain is exactly `[-n/2, n/2)`.
    pub fn from_step(m: &StepMultiplier, n: usize) -> Result<Self> {
        let full = FreqInterval::full(n);
        if m.domain() != full {
            return Err(LabError::InvalidParameter(format!(
                "step multiplier lives on [{}, {}), need [{}, {})",
                m.domain().lo,
                m.domain().hi,
                full.lo,
                full.hi
            )));
        }
        Self::from_fn(n, |k| m.at(k))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, k: i64) -> C64 {
        self.values[freq_slot(k, self.len())]
    }

    pub fn fft_order(&self) -> &[C64] {
        &self.values
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        Self { values: self.values.iter().map(|z| z.conj()).collect() }
    }

    /// Values on `block` in increasing frequency.
    pub fn restrict(&self, block: FreqInterval) -> Vec<C64> {
        block.iter().map(|k| self.at(k)).collect()
    }
}

/// `A_m f`: pointwise multiplication of the spectrum.
pub fn apply_multiplier(f: &TorusSignal, m: &Multiplier) -> Result<TorusSignal> {
    if f.len() != m.len() {
        return Err(LabError::LengthMismatch { expected: m.len(), actual: f.len() });
    }
    Ok(apply(f, m))
}

fn apply(f: &TorusSignal, m: &Multiplier) -> TorusSignal {
    idft(&Spectrum::from_vec_unchecked(dft(f).fft_order().iter().zip(&m.values).map(|(a, b)| a * b).collect()))
}

#[derive(Debug, Clone, Copy)]
pub struct NormConfig {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    /// Relative change of the ratio below which a restart counts as converged.
    pub tol: f64,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self { restarts: 20, iters: 200, seed: 0, tol: 1e-9 }
    }
}

/// Lower bound for `||A_m||_{p -> p}` together with the input that attains it.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub p: f64,
    /// `||A_m w||_p / ||w||_p` for `w = witness`.
    pub value: f64,
    pub witness: TorusSignal,
    /// Best ratio so far after each iteration (max over restarts).
    pub history: Vec<f64>,
    /// Restarts whose ratio settled to within `tol`.
    pub converged: usize,
    pub restarts: usize,
}

impl NormEstimate {
    pub fn all_converged(&self) -> bool {
        self.converged == self.restarts
    }
}

fn check_open_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(LabError::InvalidExponent(p, "need 1 < p < infinity"))
    }
}

/// `|z|^{e} sign(z)`.
fn signed_power(f: &TorusSignal, e: f64) -> TorusSignal {
    let peak = f.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return f.clone();
    }
    // Rescaling by the peak keeps |z|^e in range; only the direction matters.
    TorusSignal::from_vec_unchecked(
        f.samples()
            .iter()
            .map(|z| {
                let r = z.norm() / peak;
                if r == 0.0 {
                    ZERO
                } else {
                    z / z.norm() * r.powf(e)
                }
            })
            .collect(),
    )
}

fn ratio(m: &Multiplier, f: &TorusSignal, p: f64) -> f64 {
    let d = lp_norm(f, p).unwrap();
    if d == 0.0 {
        0.0
    } else {
        lp_norm(&apply(f, m), p).unwrap() / d
    }
}

/// Nonlinear power iteration `x <- J_{p'}(A* J_p(A x))` with `J_r(y) = |y|^{r-1} sign y`.
fn power_run(m: &Multiplier, adj: &Multiplier, p: f64, start: TorusSignal, iters: usize, tol: f64) -> (f64, TorusSignal, Vec<f64>, bool) {
    let q = p / (p - 1.0);
    let mut x = start;
    let mut best = ratio(m, &x, p);
    let mut witness = x.clone();
    let mut hist = Vec::with_capacity(iters);
    let mut last = best;
    let mut converged = false;
    for _ in 0..iters {
        let y = apply(&x, m);
        let z = apply(&signed_power(&y, p - 1.0), adj);
        x = signed_power(&z, q - 1.0);
        let r = ratio(m, &x, p);
        if r > best {
            best = r;
            witness = x.clone();
        }
        hist.push(best);
        if (r - last).abs() <= tol * r.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        last = r;
    }
    hist.resize(iters, best);
    (best, witness, hist, converged)
}

/// Estimates `||A_m||_p` from below. Exact at `p = 2`.
pub fn op_norm_p(m: &Multiplier, p: f64, cfg: NormConfig) -> Result<NormEstimate> {
    check_open_exponent(p)?;
    let n = m.len();
    if p == 2.0 {
        let (slot, sup) = m.values.iter().enumerate().fold((0, 0.0), |(bi, b), (i, z)| if z.norm() > b { (i, z.norm()) } else { (bi, b) });
        let k = slot_freq(slot, n);
        let witness = TorusSignal::from_fn(n, |x| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 * x))?;
        return Ok(NormEstimate { p, value: sup, witness, history: vec![sup], converged: 1, restarts: 1 });
    }
    let adj = m.conj();
    let runs: Vec<(f64, TorusSignal, Vec<f64>, bool)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let start = gaussian_signal(&mut trial_rng(cfg.seed, r as u64), n);
            power_run(m, &adj, p, start, cfg.iters, cfg.tol)
        })
        .collect();
    let mut history = vec![0.0f64; cfg.iters];
    for run in &runs {
        for (h, v) in history.iter_mut().zip(&run.2) {
            *h = h.max(*v);
        }
    }
    let converged = runs.iter().filter(|r| r.3).count();
    let restarts = runs.len();
    let (value, witness) = runs
        .into_iter()
        .fold((f64::NEG_INFINITY, None), |(b, w), (v, f, _, _)| if v > b { (v, Some(f)) } else { (b, w) });
    Ok(NormEstimate { p, value, witness: witness.unwrap(), history, converged, restarts })
}

/// Lacunary blocks of `Z_n`: `[-2, 2)`, then `[2^k, 2^{k+1})` and
/// `[-2^{k+1}, -2^k)` for `k >= 1` up to `n/2`. Sorted by left endpoint;
/// together they partition `[-n/2, n/2)`.
pub fn lacunary_blocks(n: usize) -> Result<Vec<FreqInterval>> {
    crate::grid::check_len(n)?;
    let h = (n / 2) as i64;
    let mut blocks = vec![FreqInterval { lo: -2, hi: 2 }];
    let mut a = 2;
    while a < h {
        blocks.push(FreqInterval { lo: a, hi: 2 * a });
        blocks.push(FreqInterval { lo: -2 * a, hi: -a });
        a *= 2;
    }
    blocks.sort_by_key(|b| b.lo);
    Ok(blocks)
}

fn check_crs_exponents(p: f64, q: f64) -> Result<()> {
    check_open_exponent(p)?;
    if !(q > 0.0) || (0.5 - 1.0 / p).abs() >= 1.0 / q {
        return Err(LabError::InvalidParameter(format!("need |1/2 - 1/p| < 1/q, got p = {p}, q = {q}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CrsReport {
    pub lhs: f64,
    /// `sup_{I lacunary} ||m||_{V_q(I)}`.
    pub rhs: f64,
    pub ratio: f64,
    pub block_norms: Vec<(FreqInterval, f64)>,
    pub converged: bool,
}

/// `sup` over lacunary blocks of the `V_q` norm of `m` on the block.
pub fn lacunary_vq(m: &Multiplier, q: f64) -> Result<Vec<(FreqInterval, f64)>> {
    lacunary_blocks(m.len())?.into_iter().map(|b| Ok((b, vq_norm(&m.restrict(b), q)?))).collect()
}

pub fn crs_check(m: &Multiplier, p: f64, q: f64, cfg: NormConfig) -> Result<CrsReport> {
    check_crs_exponents(p, q)?;
    let block_norms = lacunary_vq(m, q)?;
    let rhs = block_norms.iter().map(|b| b.1).fold(0.0, f64::max);
    let est = op_norm_p(m, p, cfg)?;
    let ratio = if rhs > 0.0 { est.value / rhs } else { 0.0 };
    Ok(CrsReport { lhs: est.value, rhs, ratio, block_norms, converged: est.all_converged() })
}

/// Multiplier families for the variation bound battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrsFamily {
    /// One random value of modulus at most 1 per block.
    LacunarySteps,
    /// One unit jump at a random position inside each block.
    UnitJump,
    /// Four random cells of modulus at most 1 per block.
    RandomSteps,
}

impl CrsFamily {
    pub const ALL: [CrsFamily; 3] = [CrsFamily::LacunarySteps, CrsFamily::UnitJump, CrsFamily::RandomSteps];

    pub fn name(&self) -> &'static str {
        match self {
            CrsFamily::LacunarySteps => "lacunary-steps",
            CrsFamily::UnitJump => "unit-jump",
            CrsFamily::RandomSteps => "random-steps",
        }
    }
}

fn disk<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(rng.random::<f64>().sqrt(), 2.0 * std::f64::consts::PI * rng.random::<f64>())
}

/// Random step multiplier on `Z_n` from `family`.
pub fn random_crs_multiplier<R: Rng + ?Sized>(rng: &mut R, n: usize, family: CrsFamily) -> Result<StepMultiplier> {
    let mut bps = Vec::new();
    let mut vals = Vec::new();
    for b in lacunary_blocks(n)? {
        let w = b.width();
        match family {
            CrsFamily::LacunarySteps => {
                bps.push(b.lo);
                vals.push(disk(rng));
            }
            CrsFamily::UnitJump => {
                let base = disk(rng) * 0.5;
                bps.push(b.lo);
                vals.push(base);
                if w > 1 {
                    bps.push(b.lo + rng.random_range(1..w));
                    vals.push(base + C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.random::<f64>()));
                }
            }
            CrsFamily::RandomSteps => {
                let mut cuts: Vec<i64> = (0..3).filter(|_| w > 1).map(|_| b.lo + rng.random_range(1..w)).collect();
                cuts.push(b.lo);
                cuts.sort_unstable();
                cuts.dedup();
                for c in cuts {
                    bps.push(c);
                    vals.push(disk(rng));
                }
            }
        }
    }
    StepMultiplier::new(bps, vals, (n / 2) as i64)
}

#[derive(Debug, Clone)]
pub struct CrsRow {
    pub family: CrsFamily,
    pub draw: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct CrsBattery {
    pub n: usize,
    pub rows: Vec<CrsRow>,
    pub cap: f64,
}

/// `draws` multipliers per family; the cap is the largest ratio seen.
pub fn crs_battery(n: usize, p: f64, q: f64, draws: usize, cfg: NormConfig) -> Result<CrsBattery> {
    check_crs_exponents(p, q)?;
    let jobs: Vec<(usize, CrsFamily, usize)> = CrsFamily::ALL
        .iter()
        .enumerate()
        .flat_map(|(fi, &f)| (0..draws).map(move |d| (fi, f, d)))
        .collect();
    let rows = jobs
        .into_iter()
        .map(|(fi, family, draw)| {
            let idx = (fi * draws + draw) as u64;
            let step = random_crs_multiplier(&mut trial_rng(cfg.seed, idx), n, family)?;
            let m = Multiplier::from_step(&step, n)?;
            let r = crs_check(&m, p, q, NormConfig { seed: cfg.seed ^ (idx + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15), ..cfg })?;
            Ok(CrsRow { family, draw, lhs: r.lhs, rhs: r.rhs, ratio: r.ratio, converged: r.converged })
        })
        .collect::<Result<Vec<_>>>()?;
    let cap = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(CrsBattery { n, rows, cap })
}

/// Largest number of cells of `m` inside one lacunary block, or an error if
/// a cell straddles two blocks or `m` does not live on `[-n/2, n/2)`.
pub fn refinement_depth(m: &StepMultiplier, n: usize) -> Result<usize> {
    if m.domain() != FreqInterval::full(n) {
        return Err(LabError::Malformed("refinement must cover [-n/2, n/2)".into()));
    }
    let blocks = lacunary_blocks(n)?;
    let mut counts = vec![0usize; blocks.len()];
    for (cell, _) in m.cells() {
        let b = blocks
            .iter()
            .position(|b| b.contains_interval(&cell))
            .ok_or_else(|| LabError::Malformed(format!("cell [{}, {}) crosses a lacunary boundary", cell.lo, cell.hi)))?;
        counts[b] += 1;
    }
    Ok(counts.into_iter().max().unwrap_or(0))
}

/// Splits every lacunary block into `min(cells, width)` near-equal cells.
pub fn lacunary_refinement(n: usize, cells: usize) -> Result<Vec<i64>> {
    if cells == 0 {
        return Err(LabError::InvalidParameter("need at least one cell per block".into()));
    }
    let mut bps = Vec::new();
    for b in lacunary_blocks(n)? {
        let w = b.width() as usize;
        let c = cells.min(w);
        for i in 0..c {
            bps.push(b.lo + (i * w / c) as i64);
        }
    }
    Ok(bps)
}

#[derive(Debug, Clone)]
pub struct DecoupleRow {
    pub cells: usize,
    /// Best norm estimate over the draws.
    pub lhs: f64,
    /// `lhs / (cells^{1/q} ||a||_inf)`.
    pub bound_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct DecoupleReport {
    pub rows: Vec<DecoupleRow>,
    /// Fitted exponent of `lhs` against `cells`.
    pub slope: f64,
    /// Largest `bound_ratio`.
    pub constant: f64,
}

/// Random `+-1` coefficients on refinements with `cells` pieces per lacunary block.
pub fn decouple_check(n: usize, cells: &[usize], p: f64, q: f64, draws: usize, cfg: NormConfig) -> Result<DecoupleReport> {
    check_open_exponent(p)?;
    if !(q > 0.0) {
        return Err(LabError::InvalidExponent(q, "need q > 0"));
    }
    let mut rows = Vec::new();
    for (ci, &c) in cells.iter().enumerate() {
        let bps = lacunary_refinement(n, c)?;
        let mut lhs = 0.0f64;
        let mut depth = 0;
        for d in 0..draws.max(1) {
            let idx = (ci * draws.max(1) + d) as u64;
            let mut rng = trial_rng(cfg.seed, idx);
            let vals: Vec<C64> = bps.iter().map(|_| C64::new(random_sign(&mut rng), 0.0)).collect();
            let step = StepMultiplier::new(bps.clone(), vals, (n / 2) as i64)?;
            depth = refinement_depth(&step, n)?;
            let m = Multiplier::from_step(&step, n)?;
            lhs = lhs.max(op_norm_p(&m, p, NormConfig { seed: cfg.seed.wrapping_add(idx << 20), ..cfg })?.value);
        }
        rows.push(DecoupleRow { cells: c, lhs, bound_ratio: lhs / (depth as f64).powf(1.0 / q) });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.cells as f64).collect();
    let slope = loglog_slope(&xs, &rows.iter().map(|r| r.lhs).collect::<Vec<_>>());
    let constant = rows.iter().map(|r| r.bound_ratio).fold(0.0, f64::max);
    Ok(DecoupleReport { rows, slope, constant })
}

#[derive(Debug, Clone)]
pub struct RubioRow {
    pub big_n: usize,
    pub square_norm: f64,
    pub f_norm: f64,
    pub ratio: f64,
    /// `S^Omega f(0) / sqrt(N)`.
    pub witness_constant: f64,
}

#[derive(Debug, Clone)]
pub struct RubioReport {
    pub p: f64,
    pub rows: Vec<RubioRow>,
    pub slope: f64,
    /// `1/p - 1/2`.
    pub expected: f64,
}

/// `f^ = 1_[0, N)` against unit arcs covering `Z_n`.
pub fn counterexample_rubio(n: usize, ns: &[usize], p: f64) -> Result<RubioReport> {
    if !(p > 1.0 && p < 2.0) {
        return Err(LabError::InvalidExponent(p, "need 1 < p < 2"));
    }
    crate::grid::check_len(n)?;
    let h = (n / 2) as i64;
    let arcs = IntervalCollection::unit_arcs(-h, h);
    let rows = ns
        .iter()
        .map(|&big_n| {
            if big_n == 0 || big_n > n / 4 {
                return Err(LabError::InvalidParameter(format!("N = {big_n} must lie in 1..=n/4")));
            }
            let spec = Spectrum::from_fn(n, |k| if (0..big_n as i64).contains(&k) { C64::new(1.0, 0.0) } else { ZERO })?;
            let f = idft(&spec);
            let s = square_sharp(&f, &arcs)?;
            let square_norm = lp_norm(&s, p)?;
            let f_norm = lp_norm(&f, p)?;
            Ok(RubioRow {
                big_n,
                square_norm,
                f_norm,
                ratio: square_norm / f_norm,
                witness_constant: s.samples()[0].re / (big_n as f64).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(&rows.iter().map(|r| r.big_n as f64).collect::<Vec<_>>(), &rows.iter().map(|r| r.ratio).collect::<Vec<_>>());
    Ok(RubioReport { p, rows, slope, expected: 1.0 / p - 0.5 })
}

#[derive(Debug, Clone)]
pub struct BumpRow {
    pub big_n: usize,
    /// Mean over sign draws of `||A_m f||_p / sqrt(N)`.
    pub mean_over_sqrt_n: f64,
    /// Best `||A_m f||_r / ||f||_r` with `r = min(p, p')`, a lower bound for `||A_m||_p`.
    pub witness_ratio: f64,
    /// `Var_q` of `m` over `[0, N delta)` for the first draw.
    pub var_q: f64,
}

#[derive(Debug, Clone)]
pub struct BumpReport {
    pub p: f64,
    pub q: f64,
    pub rows: Vec<BumpRow>,
    pub slope: f64,
    /// `|1/2 - 1/p|`.
    pub expected: f64,
    pub var_slope: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BumpConfig {
    pub n: usize,
    pub delta: i64,
    pub q: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for BumpConfig {
    fn default() -> Self {
        Self { n: 4096, delta: 8, q: 2.0, trials: 16, seed: 0 }
    }
}

/// Bump with plateau `[-1, 1)` and support `[-3, 3)`.
pub const BUMP_HALF_SUPPORT: i64 = 3;

/// `m = sum_{j<N} eps_j psi^(. - c_j)` with centers `c_j = j delta + delta/2`,
/// tested on `f^ = 1_[0, N delta)`.
pub fn counterexample_multiplier(ns: &[usize], p: f64, cfg: BumpConfig) -> Result<BumpReport> {
    check_open_exponent(p)?;
    if p == 2.0 {
        return Err(LabError::InvalidExponent(p, "need p != 2"));
    }
    if cfg.delta < 2 * BUMP_HALF_SUPPORT {
        return Err(LabError::InvalidParameter(format!("bumps of width {} overlap at spacing {}", 2 * BUMP_HALF_SUPPORT, cfg.delta)));
    }
    let n = cfg.n;
    let bump = make_window(n, FreqInterval::new(-1, 1)?, FreqInterval::new(-BUMP_HALF_SUPPORT, BUMP_HALF_SUPPORT)?)?;
    let r = p.min(p / (p - 1.0));
    let mut rows = Vec::new();
    for (ni, &big_n) in ns.iter().enumerate() {
        let top = big_n as i64 * cfg.delta;
        if big_n == 0 || top > (n / 2) as i64 {
            return Err(LabError::InvalidParameter(format!("N delta = {top} exceeds n/2")));
        }
        let f = idft(&Spectrum::from_fn(n, |k| if (0..top).contains(&k) { C64::new(1.0, 0.0) } else { ZERO })?);
        let f_r = lp_norm(&f, r)?;
        let draws: Vec<(f64, f64, f64)> = (0..cfg.trials.max(1))
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(cfg.seed, (ni * cfg.trials.max(1) + t) as u64);
                let eps: Vec<f64> = (0..big_n).map(|_| random_sign(&mut rng)).collect();
                let m = Multiplier::from_fn(n, |k| {
                    let j = k.div_euclid(cfg.delta);
                    if j < 0 || j >= big_n as i64 {
                        return ZERO;
                    }
                    C64::new(eps[j as usize] * bump.at(k - j * cfg.delta - cfg.delta / 2), 0.0)
                })
                .expect("valid length");
                let g = apply(&f, &m);
                let vq = var_q(&m.restrict(FreqInterval { lo: 0, hi: top }), cfg.q).expect("q checked");
                (lp_norm(&g, p).unwrap() / (big_n as f64).sqrt(), lp_norm(&g, r).unwrap() / f_r, vq)
            })
            .collect();
        rows.push(BumpRow {
            big_n,
            mean_over_sqrt_n: draws.iter().map(|d| d.0).sum::<f64>() / draws.len() as f64,
            witness_ratio: draws.iter().map(|d| d.1).fold(0.0, f64::max),
            var_q: draws[0].2,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.big_n as f64).collect();
    let slope = loglog_slope(&xs, &rows.iter().map(|r| r.witness_ratio).collect::<Vec<_>>());
    let var_slope = loglog_slope(&xs, &rows.iter().map(|r| r.var_q).collect::<Vec<_>>());
    Ok(BumpReport { p, q: cfg.q, rows, slope, expected: (0.5 - 1.0 / p).abs(), var_slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{hilbert, project};

    fn noise(n: usize, seed: u64) -> TorusSignal {
        gaussian_signal(&mut trial_rng(seed, 0), n)
    }

    #[test]
    fn identity_projection_and_hilbert() {
        let n = 64;
        let f = noise(n, 1);
        let one = Multiplier::from_fn(n, |_| C64::new(1.0, 0.0)).unwrap();
        assert!(apply_multiplier(&f, &one).unwrap().max_abs_diff(&f) < 1e-13);
        let w = FreqInterval::new(-5, 9).unwrap();
        let ind = Multiplier::from_fn(n, |k| if w.contains(k) { C64::new(1.0, 0.0) } else { ZERO }).unwrap();
        assert!(apply_multiplier(&f, &ind).unwrap().max_abs_diff(&project(&f, w).unwrap()) < 1e-13);
        let h = (n / 2) as i64;
        let sign = Multiplier::from_fn(n, |k| C64::new(if k == 0 || k == -h { 0.0 } else { (k as f64).signum() }, 0.0)).unwrap();
        let lhs = apply_multiplier(&f, &sign).unwrap().scale(C64::new(0.0, -1.0));
        assert!(lhs.max_abs_diff(&hilbert(&f)) < 1e-13);
        assert!(apply_multiplier(&noise(32, 0), &one).is_err());
    }

    #[test]
    fn constant_multiplier_norm_is_modulus() {
        let m = Multiplier::from_fn(128, |_| C64::new(0.6, -0.8)).unwrap();
        for p in [1.5, 2.0, 3.0, 4.0] {
            let e = op_norm_p(&m, p, NormConfig { restarts: 2, iters: 5, ..Default::default() }).unwrap();
            assert!((e.value - 1.0).abs() < 1e-12, "p = {p}: {}", e.value);
        }
        assert!(op_norm_p(&m, 1.0, NormConfig::default()).is_err());
    }

    #[test]
    fn witness_reproduces_value_and_history_is_monotone() {
        let n = 256;
        let m = Multiplier::from_fn(n, |k| C64::new(if k > 0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        let e = op_norm_p(&m, 4.0, NormConfig { restarts: 4, iters: 50, seed: 9, tol: 1e-12 }).unwrap();
        assert!((ratio(&m, &e.witness, 4.0) - e.value).abs() < 1e-12);
        assert!(e.history.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*e.history.last().unwrap(), e.value);
    }

    #[test]
    fn lacunary_blocks_partition() {
        for n in [8, 64, 1024] {
            let b = lacunary_blocks(n).unwrap();
            let c = IntervalCollection::new(b).unwrap();
            assert!(c.is_full_partition(n));
        }
    }

    #[test]
    fn unit_multiplier_has_unit_crs_ratio() {
        let m = Multiplier::from_fn(256, |_| C64::new(1.0, 0.0)).unwrap();
        let r = crs_check(&m, 3.0, 2.0, NormConfig { restarts: 2, iters: 10, ..Default::default() }).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-15 && (r.ratio - 1.0).abs() < 1e-12);
        assert!(crs_check(&m, 4.0, 4.0, NormConfig::default()).is_err());
    }

    #[test]
    fn one_jump_per_block_has_rhs_two() {
        let n = 512;
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        for b in lacunary_blocks(n).unwrap() {
            bps.push(b.lo);
            vals.push(C64::new(0.0, 0.0));
            if b.width() > 1 {
                bps.push(b.lo + b.width() / 2);
                vals.push(C64::new(1.0, 0.0));
            }
        }
        let step = StepMultiplier::new(bps, vals, 256).unwrap();
        let m = Multiplier::from_step(&step, n).unwrap();
        let r = crs_check(&m, 3.0, 2.0, NormConfig { restarts: 2, iters: 20, ..Default::default() }).unwrap();
        assert_eq!(r.rhs, 2.0);
        assert!(r.lhs >= 1.0 - 1e-12);
    }

    #[test]
    fn refinement_validation() {
        let n = 64;
        let bps = lacunary_refinement(n, 4).unwrap();
        let vals = vec![C64::new(1.0, 0.0); bps.len()];
        assert_eq!(refinement_depth(&StepMultiplier::new(bps, vals, 32).unwrap(), n).unwrap(), 4);
        let straddle = StepMultiplier::new(vec![-32, 3, 5], vec![C64::new(1.0, 0.0); 3], 32).unwrap();
        assert!(refinement_depth(&straddle, n).is_err());
        let short = StepMultiplier::new(vec![-32], vec![C64::new(1.0, 0.0)], 16).unwrap();
        assert!(Multiplier::from_step(&short, n).is_err());
    }

    #[test]
    fn rubio_witness_is_sqrt_n() {
        let r = counterexample_rubio(1024, &[16, 64, 256], 4.0 / 3.0).unwrap();
        for row in &r.rows {
            assert!((row.witness_constant - 1.0).abs() < 1e-12);
        }
        assert!(counterexample_rubio(1024, &[16], 2.0).is_err());
        assert!(counterexample_rubio(1024, &[512], 1.5).is_err());
    }

    #[test]
    fn bump_signs_all_plus_at_two() {
        let cfg = BumpConfig { n: 1024, trials: 1, ..Default::default() };
        let bump = make_window(cfg.n, FreqInterval::new(-1, 1).unwrap(), FreqInterval::new(-3, 3).unwrap()).unwrap();
        let m = Multiplier::from_fn(cfg.n, |k| {
            let j = k.div_euclid(cfg.delta);
            if (0..16).contains(&j) {
                C64::new(bump.at(k - j * cfg.delta - cfg.delta / 2), 0.0)
            } else {
                ZERO
            }
        })
        .unwrap();
        assert_eq!(op_norm_p(&m, 2.0, NormConfig::default()).unwrap().value, bump.sup());
        assert!(counterexample_multiplier(&[16], 4.0, BumpConfig { delta: 5, ..cfg }).is_err());
    }
}
