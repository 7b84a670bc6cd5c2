//! Greedy Carleson split of a tile set relative to a set `F`.
//!
//! With `a_s = |<1_F, phi_s>|^2` and `alpha(J) = sum_{s in stock, I_s = J} a_s`,
//! the loop runs while `||alpha||_CM >= beta / 4`: it takes a maximal dyadic
//! `J` with `|J|^-1 sum_{I subset J} alpha(I) >= beta / 4` (coarsest level
//! first, then smallest offset) and moves every stock tile with `I_s subset J`
//! into the big part.

use crate::carleson::CarlesonSeq;
use crate::error::{LabError, Result};
use crate::grid::{DyadicInterval, TorusSignal, C64};
use crate::tiles::TileSet;

/// Tile index: `(family, spatial offset)`.
pub type TileId = (usize, usize);

#[derive(Debug, Clone)]
pub struct GreedySplit {
    pub big: Vec<TileId>,
    pub small: Vec<TileId>,
    /// Extracted intervals, in extraction order.
    pub js: Vec<DyadicInterval>,
    pub beta: f64,
    /// `||alpha||_CM` of the full tile set.
    pub cm_initial: f64,
    /// `||alpha||_CM` of the small part.
    pub cm_small: f64,
    /// `|sh(T_big)|`.
    pub shadow: f64,
    /// `|F|`.
    pub f_measure: f64,
    /// `sum_s a_s` over all tiles.
    pub total_mass: f64,
}

impl GreedySplit {
    /// `|sh(T_big)| beta / |F|`.
    pub fn shadow_ratio(&self) -> f64 {
        self.shadow * self.beta / self.f_measure
    }

    /// The provable ceiling `4 sum_s a_s / |F|` for [`Self::shadow_ratio`].
    pub fn shadow_ceiling(&self) -> f64 {
        4.0 * self.total_mass / self.f_measure
    }
}

fn carleson_of(tiles: &TileSet, mass: &[Vec<f64>], alive: &[Vec<bool>], depth: u32) -> CarlesonSeq {
    let mut a = CarlesonSeq::zeros(depth);
    for (fi, fam) in tiles.families.iter().enumerate() {
        for (j, &m) in mass[fi].iter().enumerate() {
            if alive[fi][j] && m > 0.0 {
                a.add_to(DyadicInterval { level: fam.level, offset: j as u64 }, m);
            }
        }
    }
    a
}

/// Finds the first `J` (coarse to fine, then by offset) with `|J|^-1 S(J) >= thr`.
fn first_heavy(alpha: &CarlesonSeq, thr: f64) -> Option<DyadicInterval> {
    for (k, level) in alpha.subtree_sums().iter().enumerate() {
        for (j, s) in level.iter().enumerate() {
            if s * (1u64 << k) as f64 >= thr {
                return Some(DyadicInterval { level: k as u32, offset: j as u64 });
            }
        }
    }
    None
}

/// Runs the greedy loop for `F` given as a sample mask.
pub fn greedy_bmo_split(tiles: &TileSet, f_set: &[bool], beta: f64) -> Result<GreedySplit> {
    if !(beta > 0.0) {
        return Err(LabError::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let n = tiles.n;
    if f_set.len() != n {
        return Err(LabError::LengthMismatch { expected: n, actual: f_set.len() });
    }
    let count = f_set.iter().filter(|b| **b).count();
    if count == 0 {
        return Err(LabError::InvalidParameter("F must be nonempty".into()));
    }
    let f = TorusSignal::new(f_set.iter().map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect())?;
    let coeffs = tiles.coefficients(&f);
    let mass: Vec<Vec<f64>> = coeffs.iter().map(|c| c.iter().map(|z| z.norm_sqr()).collect()).collect();
    let depth = tiles.families.iter().map(|f| f.level).max().unwrap_or(0);
    let mut alive: Vec<Vec<bool>> = tiles.families.iter().map(|f| vec![true; f.count()]).collect();
    let thr = beta / 4.0;
    let mut js = Vec::new();
    let mut big = Vec::new();
    let cm_initial = carleson_of(tiles, &mass, &alive, depth).cm_norm();
    loop {
        let alpha = carleson_of(tiles, &mass, &alive, depth);
        if alpha.cm_norm() < thr {
            break;
        }
        let j = first_heavy(&alpha, thr).expect("a heavy interval exists when the norm reaches the threshold");
        for (fi, fam) in tiles.families.iter().enumerate() {
            for (o, a) in alive[fi].iter_mut().enumerate() {
                if *a && (DyadicInterval { level: fam.level, offset: o as u64 }).is_subset_of(&j) {
                    *a = false;
                    big.push((fi, o));
                }
            }
        }
        js.push(j);
    }
    let cm_small = carleson_of(tiles, &mass, &alive, depth).cm_norm();
    let small: Vec<TileId> = alive
        .iter()
        .enumerate()
        .flat_map(|(fi, a)| a.iter().enumerate().filter(|(_, b)| **b).map(move |(o, _)| (fi, o)))
        .collect();
    let mut covered = vec![false; n];
    for &(fi, o) in &big {
        let i = DyadicInterval { level: tiles.families[fi].level, offset: o as u64 };
        for x in &mut covered[i.samples(n)] {
            *x = true;
        }
    }
    let shadow = covered.iter().filter(|b| **b).count() as f64 / n as f64;
    Ok(GreedySplit {
        big,
        small,
        js,
        beta,
        cm_initial,
        cm_small,
        shadow,
        f_measure: count as f64 / n as f64,
        total_mass: mass.iter().flatten().sum(),
    })
}

/// JSON form `{"big": [...], "small": [...], "J": [...]}`; tiles are
/// `[omega_lo, omega_hi, level, offset]`, intervals `[level, offset]`.
pub fn split_json(tiles: &TileSet, split: &GreedySplit) -> String {
    let tile = |&(fi, o): &TileId| {
        let f = &tiles.families[fi];
        format!("[{},{},{},{}]", f.omega.lo, f.omega.hi, f.level, o)
    };
    let big: Vec<String> = split.big.iter().map(tile).collect();
    let small: Vec<String> = split.small.iter().map(tile).collect();
    let js: Vec<String> = split.js.iter().map(|j| format!("[{},{}]", j.level, j.offset)).collect();
    format!("{{\"big\":[{}],\"small\":[{}],\"J\":[{}]}}", big.join(","), small.join(","), js.join(","))
}
