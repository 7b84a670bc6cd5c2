//! Dyadic BMO, the dyadic sharp function, Carleson sequences and the
//! one-parameter John–Nirenberg check.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::grid::{lp_norm_of, DyadicInterval, TorusSignal};
use crate::rng::trial_rng;

/// Nonnegative `alpha(I)` for dyadic `I` with level `<= depth`, stored densely
/// per level (`levels[k][j]` is `alpha([j 2^-k, (j+1) 2^-k))`).
#[derive(Debug, Clone, PartialEq)]
pub struct CarlesonSeq {
    levels: Vec<Vec<f64>>,
}

impl CarlesonSeq {
    pub fn zeros(depth: u32) -> Self {
        Self { levels: (0..=depth).map(|k| vec![0.0; 1 << k]).collect() }
    }

    pub fn from_entries(depth: u32, entries: impl IntoIterator<Item = (DyadicInterval, f64)>) -> Result<Self> {
        let mut s = Self::zeros(depth);
        for (i, v) in entries {
            s.set(i, v)?;
        }
        Ok(s)
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn get(&self, i: DyadicInterval) -> f64 {
        self.levels.get(i.level as usize).and_then(|l| l.get(i.offset as usize)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, i: DyadicInterval, v: f64) -> Result<()> {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(LabError::InvalidParameter(format!("alpha must be finite and nonnegative, got {v}")));
        }
        if i.level > self.depth() || i.offset >= 1u64 << i.level {
            return Err(LabError::InvalidDyadic { level: i.level, offset: i.offset, n: 1 << self.depth() });
        }
        self.levels[i.level as usize][i.offset as usize] = v;
        Ok(())
    }

    pub fn add_to(&mut self, i: DyadicInterval, v: f64) {
        self.levels[i.level as usize][i.offset as usize] += v;
    }

    pub fn level(&self, k: u32) -> &[f64] {
        &self.levels[k as usize]
    }

    /// Nonzero entries, coarse to fine.
    pub fn entries(&self) -> impl Iterator<Item = (DyadicInterval, f64)> + '_ {
        self.levels.iter().enumerate().flat_map(|(k, l)| {
            l.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(move |(j, v)| (DyadicInterval { level: k as u32, offset: j as u64 }, *v))
        })
    }

    pub fn sum(&self, other: &CarlesonSeq) -> CarlesonSeq {
        let depth = self.depth().max(other.depth());
        let mut out = Self::zeros(depth);
        for (i, v) in self.entries().chain(other.entries()) {
            out.add_to(i, v);
        }
        out
    }

    /// `S(J) = sum_{I subset J} alpha(I)` for every `J`, bottom-up.
    pub fn subtree_sums(&self) -> Vec<Vec<f64>> {
        let mut s = self.levels.clone();
        for k in (0..self.depth() as usize).rev() {
            let (upper, lower) = s.split_at_mut(k + 1);
            for (j, v) in upper[k].iter_mut().enumerate() {
                *v += lower[0][2 * j] + lower[0][2 * j + 1];
            }
        }
        s
    }

    /// `sup_J |J|^-1 sum_{I subset J} alpha(I)` in one tree pass.
    pub fn cm_norm(&self) -> f64 {
        self.subtree_sums()
            .iter()
            .enumerate()
            .flat_map(|(k, l)| l.iter().map(move |v| v * (1u64 << k) as f64))
            .fold(0.0, f64::max)
    }

    /// `F_J = sum_{I subset J} alpha(I) / |I| 1_I` on the `2^depth` finest cells.
    pub fn jn_function(&self, j: DyadicInterval) -> Vec<f64> {
        let d = self.depth();
        let cells = 1usize << d;
        let mut f = vec![0.0; cells];
        if j.level > d {
            return f;
        }
        for k in j.level..=d {
            let shift = k - j.level;
            let first = (j.offset << shift) as usize;
            let width = cells >> k;
            for (o, v) in self.levels[k as usize][first..first + (1 << shift)].iter().enumerate() {
                if *v != 0.0 {
                    let h = v * (1u64 << k) as f64;
                    let a = (first + o) * width;
                    for x in &mut f[a..a + width] {
                        *x += h;
                    }
                }
            }
        }
        f
    }
}

/// `||F_J||_p / (||alpha||_CM |J|^{1/p})`.
pub fn jn_check(alpha: &CarlesonSeq, p: f64, j: DyadicInterval) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(LabError::InvalidExponent(p, "need p >= 1"));
    }
    let cm = alpha.cm_norm();
    if cm == 0.0 {
        return Ok(0.0);
    }
    let f = alpha.jn_function(j);
    let norm = lp_norm_of(f.iter().copied(), f.len(), p);
    Ok(norm / (cm * j.len().powf(1.0 / p)))
}

/// Random `alpha` from the battery: with probability 3/4 spread entries
/// `alpha(I) in {0, |I| u}`; otherwise a single root-to-leaf path carrying
/// `alpha(I) = |I| u`.
pub fn random_carleson<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> CarlesonSeq {
    let mut a = CarlesonSeq::zeros(depth);
    if rng.random::<f64>() < 0.75 {
        let density: f64 = rng.random_range(0.05..1.0);
        for k in 0..=depth {
            let len = (-(k as f64)).exp2();
            for v in a.levels[k as usize].iter_mut() {
                if rng.random::<f64>() < density {
                    *v = len * rng.random::<f64>();
                }
            }
        }
    } else {
        let leaf: u64 = rng.random_range(0..1u64 << depth);
        for k in 0..=depth {
            let len = (-(k as f64)).exp2();
            a.levels[k as usize][(leaf >> (depth - k)) as usize] = len * rng.random::<f64>();
        }
    }
    a
}

#[derive(Debug, Clone)]
pub struct JnBatteryRow {
    pub depth: u32,
    pub p: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Max and mean `jn_check` ratio at `J = [0, 1)` over `instances` random sequences.
pub fn jn_battery(depth: u32, p: f64, instances: usize, seed: u64) -> Result<JnBatteryRow> {
    let ratios: Vec<f64> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let a = random_carleson(&mut rng, depth);
            jn_check(&a, p, DyadicInterval::unit())
        })
        .collect::<Result<_>>()?;
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    Ok(JnBatteryRow { depth, p, max_ratio, mean_ratio })
}

fn levels_for(n: usize) -> u32 {
    n.trailing_zeros()
}

/// Per dyadic interval `I` of an `n` grid: `(mean, mean |g - mean|, mean |g - mean|^2)`.
fn oscillations(g: &TorusSignal) -> Vec<Vec<(f64, f64)>> {
    let n = g.len();
    let s = g.samples();
    (0..=levels_for(n))
        .map(|k| {
            let w = n >> k;
            (0..1usize << k)
                .map(|j| {
                    let cell = &s[j * w..(j + 1) * w];
                    let mean = cell.iter().sum::<crate::grid::C64>() / w as f64;
                    let l1 = cell.iter().map(|z| (z - mean).norm()).sum::<f64>() / w as f64;
                    let l2 = cell.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / w as f64;
                    (l1, l2)
                })
                .collect()
        })
        .collect()
}

/// `sup_{I dyadic} mean_I |g - mean_I g|` over intervals with at least one sample.
pub fn dyadic_bmo(g: &TorusSignal) -> f64 {
    oscillations(g).iter().flatten().map(|o| o.0).fold(0.0, f64::max)
}

/// `g#(x) = sup_{I dyadic, x in I} (mean_I |g - mean_I g|^2)^{1/2}`.
pub fn sharp_function(g: &TorusSignal) -> Vec<f64> {
    let n = g.len();
    let osc = oscillations(g);
    let mut out = vec![0.0f64; n];
    for (k, level) in osc.iter().enumerate() {
        let w = n >> k;
        for (j, o) in level.iter().enumerate() {
            let v = o.1.sqrt();
            for x in &mut out[j * w..(j + 1) * w] {
                *x = x.max(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::C64;

    fn di(level: u32, offset: u64) -> DyadicInterval {
        DyadicInterval::new(level, offset).unwrap()
    }

    #[test]
    fn single_full_mass_has_norm_one() {
        let a = CarlesonSeq::from_entries(5, [(di(2, 1), 0.25)]).unwrap();
        assert!((a.cm_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_mass_counts_levels() {
        for d in 0..8 {
            let mut a = CarlesonSeq::zeros(d);
            for i in DyadicInterval::all_up_to(d) {
                a.set(i, i.len()).unwrap();
            }
            assert!((a.cm_norm() - (d + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_negative_mass() {
        let mut a = CarlesonSeq::zeros(3);
        assert!(a.set(di(1, 0), -1.0).is_err());
        assert!(a.set(di(4, 0), 1.0).is_err());
    }

    #[test]
    fn jn_single_interval() {
        let j = di(3, 5);
        let a = CarlesonSeq::from_entries(6, [(j, j.len())]).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert!((jn_check(&a, p, j).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bmo_of_half_indicator() {
        let g = TorusSignal::indicator(64, 0, 32).unwrap();
        assert!((dyadic_bmo(&g) - 0.5).abs() < 1e-15);
        let sharp = sharp_function(&g);
        assert!(sharp.iter().all(|v| (v - 0.5).abs() < 1e-15));
        let c = TorusSignal::constant(64, C64::new(3.0, 1.0)).unwrap();
        assert_eq!(dyadic_bmo(&c), 0.0);
        assert!(sharp_function(&c).iter().all(|v| *v == 0.0));
    }
}
