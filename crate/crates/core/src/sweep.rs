//! Randomized batteries for `||S^Omega f||_p / ||f||_p` over disjoint
//! frequency families, on `Z_n` and on `Z_n x Z_n`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fit::loglog_slope;
use crate::grid::{check_exponent, lp_norm, lp_norm_real, FreqInterval, IntervalCollection};
use crate::projections::square_sharp;
use crate::rng::{gaussian_signal, trial_rng};
use crate::signal2::{square_sharp2, FreqRect, Signal2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaFamily {
    /// Consecutive arcs with log-uniform widths in `[1, n/4]`, covering `Z_n`.
    RandomPartition,
    /// Dyadic blocks around zero.
    Lacunary,
    /// Every single frequency.
    UnitArcs,
    /// Random disjoint arcs with random gaps; does not cover.
    Sparse,
}

impl OmegaFamily {
    pub const ALL: [OmegaFamily; 4] = [OmegaFamily::RandomPartition, OmegaFamily::Lacunary, OmegaFamily::UnitArcs, OmegaFamily::Sparse];

    pub fn name(&self) -> &'static str {
        match self {
            OmegaFamily::RandomPartition => "random-partition",
            OmegaFamily::Lacunary => "lacunary",
            OmegaFamily::UnitArcs => "unit-arcs",
            OmegaFamily::Sparse => "sparse",
        }
    }
}

fn log_uniform_width<R: Rng + ?Sized>(rng: &mut R, max: i64) -> i64 {
    let e = rng.random::<f64>() * (max as f64).log2();
    (e.exp2().floor() as i64).clamp(1, max)
}

/// Random disjoint collection of the given family on `Z_n`.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, n: usize, family: OmegaFamily) -> Result<IntervalCollection> {
    crate::grid::check_len(n)?;
    let h = (n / 2) as i64;
    let max = (n / 4) as i64;
    Ok(match family {
        OmegaFamily::RandomPartition => {
            let widths: Vec<i64> = (0..n).map(|_| log_uniform_width(rng, max)).collect();
            IntervalCollection::partition_by_widths(n, widths)
        }
        OmegaFamily::Lacunary => IntervalCollection::new(crate::multiplier::lacunary_blocks(n)?)?,
        OmegaFamily::UnitArcs => IntervalCollection::unit_arcs(-h, h),
        OmegaFamily::Sparse => {
            let mut v = Vec::new();
            let mut lo = -h + rng.random_range(0..4);
            loop {
                let w = log_uniform_width(rng, max / 2);
                if lo + w > h {
                    break;
                }
                v.push(FreqInterval { lo, hi: lo + w });
                lo += w + log_uniform_width(rng, max / 4);
            }
            IntervalCollection::new(v)?
        }
    })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub p: f64,
    pub family: &'static str,
    pub max_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSlope {
    pub p: f64,
    pub family: &'static str,
    /// Fitted exponent of `max_ratio` against `n`.
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub slopes: Vec<SweepSlope>,
    pub max_slope: f64,
}

fn summarize(rows: Vec<SweepRow>, ps: &[f64], families: &[&'static str]) -> SweepReport {
    let mut slopes = Vec::new();
    for &p in ps {
        for &family in families {
            let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.p == p && r.family == family).collect();
            let xs: Vec<f64> = sel.iter().map(|r| r.n as f64).collect();
            let ys: Vec<f64> = sel.iter().map(|r| r.max_ratio).collect();
            slopes.push(SweepSlope { p, family, slope: loglog_slope(&xs, &ys) });
        }
    }
    let max_slope = slopes.iter().map(|s| s.slope).filter(|s| s.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    SweepReport { rows, slopes, max_slope }
}

/// Max over `trials` draws of `(Omega, f)` per `(n, p, family)`; `f` is complex white noise.
pub fn square_sweep(ns: &[usize], ps: &[f64], trials: usize, seed: u64) -> Result<SweepReport> {
    for &p in ps {
        check_exponent(p)?;
    }
    let mut rows = Vec::new();
    for (ni, &n) in ns.iter().enumerate() {
        for (fi, &family) in OmegaFamily::ALL.iter().enumerate() {
            let ratios: Vec<Vec<f64>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, ((ni * OmegaFamily::ALL.len() + fi) * trials + t) as u64);
                    let omega = random_family(&mut rng, n, family)?;
                    let f = gaussian_signal(&mut rng, n);
                    let s = square_sharp(&f, &omega)?;
                    ps.iter().map(|&p| Ok(lp_norm(&s, p)? / lp_norm(&f, p)?)).collect()
                })
                .collect::<Result<_>>()?;
            for (pi, &p) in ps.iter().enumerate() {
                let max_ratio = ratios.iter().map(|r| r[pi]).fold(0.0, f64::max);
                rows.push(SweepRow { n, p, family: family.name(), max_ratio });
            }
        }
    }
    let names: Vec<&'static str> = OmegaFamily::ALL.iter().map(|f| f.name()).collect();
    Ok(summarize(rows, ps, &names))
}

/// Tensor products of two random partitions, keeping each rectangle with probability `keep`.
pub fn random_rects<R: Rng + ?Sized>(rng: &mut R, n1: usize, n2: usize, keep: f64) -> Result<Vec<FreqRect>> {
    let a = random_family(rng, n1, OmegaFamily::RandomPartition)?;
    let b = random_family(rng, n2, OmegaFamily::RandomPartition)?;
    let mut out = Vec::new();
    for &x in a.intervals() {
        for &y in b.intervals() {
            if rng.random::<f64>() < keep {
                out.push(FreqRect { x, y });
            }
        }
    }
    Ok(out)
}

/// Two-dimensional battery on square grids `n x n`.
pub fn square_sweep2(ns: &[usize], ps: &[f64], trials: usize, seed: u64) -> Result<SweepReport> {
    for &p in ps {
        check_exponent(p)?;
    }
    let mut rows = Vec::new();
    let families: [(&'static str, f64); 2] = [("tensor-partition", 1.0), ("tensor-sparse", 0.5)];
    for (ni, &n) in ns.iter().enumerate() {
        if n > 256 {
            return Err(LabError::InvalidParameter(format!("2D sweep is limited to 256 x 256, got {n}")));
        }
        for (fi, &(name, keep)) in families.iter().enumerate() {
            let ratios: Vec<Vec<f64>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, ((ni * families.len() + fi) * trials + t) as u64);
                    let rects = random_rects(&mut rng, n, n, keep)?;
                    let f = Signal2::new(n, n, gaussian_signal(&mut rng, n * n).into_samples())?;
                    let s = square_sharp2(&f, &rects)?;
                    ps.iter().map(|&p| Ok(lp_norm_real(&s, p)? / f.lp_norm(p)?)).collect()
                })
                .collect::<Result<_>>()?;
            for (pi, &p) in ps.iter().enumerate() {
                let max_ratio = ratios.iter().map(|r| r[pi]).fold(0.0, f64::max);
                rows.push(SweepRow { n, p, family: name, max_ratio });
            }
        }
    }
    Ok(summarize(rows, ps, &families.map(|f| f.0)))
}
