//! Product tiles on the two-dimensional torus: tensor wave packets
//! `phi_s = phi_{s1} (x) phi_{s2}` over dual rectangles `R_s x omega_s`.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::grid::{freq_slot, ifft_in_place, DyadicInterval, C64};
use crate::maximal::strong_maximal_real;
use crate::rng::{gaussian_complex, trial_rng};
use crate::signal2::{check_disjoint_rects, dft2, FreqRect, Signal2, Spectrum2};
use crate::tiles::{bessel_constant, TileFamily};
use crate::window::Window;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest grid side supported by the product tile code.
pub const MAX_SIDE: usize = 256;

/// All tiles over one frequency rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct TileFamily2 {
    pub x: TileFamily,
    pub y: TileFamily,
}

impl TileFamily2 {
    pub fn adapted(n1: usize, n2: usize, rect: FreqRect) -> Result<Self> {
        if n1 > MAX_SIDE || n2 > MAX_SIDE {
            return Err(LabError::InvalidParameter(format!("2D grids are limited to {MAX_SIDE} per axis")));
        }
        Ok(Self { x: TileFamily::adapted(n1, rect.x)?, y: TileFamily::adapted(n2, rect.y)? })
    }

    pub fn rect(&self) -> FreqRect {
        FreqRect { x: self.x.omega, y: self.y.omega }
    }

    /// `<f, phi_s>` indexed `[j1 * M2 + j2]`.
    pub fn coefficients(&self, spec: &Spectrum2) -> Vec<C64> {
        let (m1, m2) = (self.x.count(), self.y.count());
        let mut h = vec![ZERO; m1 * m2];
        let pi = std::f64::consts::PI;
        for (k1, w1) in self.x.band.iter() {
            if w1 == 0.0 {
                continue;
            }
            let e1 = C64::from_polar(w1, pi * k1 as f64 / m1 as f64);
            let r1 = k1.rem_euclid(m1 as i64) as usize;
            for (k2, w2) in self.y.band.iter() {
                if w2 == 0.0 {
                    continue;
                }
                let e2 = C64::from_polar(w2, pi * k2 as f64 / m2 as f64);
                h[r1 * m2 + k2.rem_euclid(m2 as i64) as usize] += spec.get(k1, k2) * e1 * e2;
            }
        }
        ifft2(&mut h, m1, m2);
        let s = (self.x.spatial_len() * self.y.spatial_len()).sqrt();
        h.iter_mut().for_each(|z| *z *= s);
        h
    }

    /// Product of the coordinate Gram bounds.
    pub fn bessel_constant(&self) -> f64 {
        bessel_constant(&self.x) * bessel_constant(&self.y)
    }
}

fn ifft2(data: &mut [C64], m1: usize, m2: usize) {
    for row in data.chunks_mut(m2) {
        ifft_in_place(row);
    }
    let mut col = vec![ZERO; m1];
    for c in 0..m2 {
        for r in 0..m1 {
            col[r] = data[r * m2 + c];
        }
        ifft_in_place(&mut col);
        for r in 0..m1 {
            data[r * m2 + c] = col[r];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileSet2 {
    pub n1: usize,
    pub n2: usize,
    pub families: Vec<TileFamily2>,
}

pub fn build_tiles2(n1: usize, n2: usize, rects: &[FreqRect]) -> Result<TileSet2> {
    check_disjoint_rects(rects)?;
    let families = rects.iter().map(|&r| TileFamily2::adapted(n1, n2, r)).collect::<Result<_>>()?;
    Ok(TileSet2 { n1, n2, families })
}

#[derive(Debug, Clone)]
pub struct TileTransform2 {
    pub values: Vec<f64>,
    pub coefficients: Vec<Vec<C64>>,
}

/// `T^Omega f = (sum_s |<f, phi_s>|^2 / |R_s| 1_{R_s})^{1/2}`.
pub fn product_tile_operator(f: &Signal2, tiles: &TileSet2) -> Result<TileTransform2> {
    let (n1, n2) = (f.n1(), f.n2());
    if (n1, n2) != (tiles.n1, tiles.n2) {
        return Err(LabError::LengthMismatch { expected: tiles.n1 * tiles.n2, actual: n1 * n2 });
    }
    let spec = dft2(f);
    let coefficients: Vec<Vec<C64>> = tiles.families.par_iter().map(|fam| fam.coefficients(&spec)).collect();
    let mut sq = vec![0.0; n1 * n2];
    for (fam, c) in tiles.families.iter().zip(&coefficients) {
        let (m1, m2) = (fam.x.count(), fam.y.count());
        let (p1, p2) = (n1 / m1, n2 / m2);
        let scale = (m1 * m2) as f64;
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                sq[i1 * n2 + i2] += c[(i1 / p1) * m2 + i2 / p2].norm_sqr() * scale;
            }
        }
    }
    Ok(TileTransform2 { values: sq.into_iter().map(f64::sqrt).collect(), coefficients })
}

#[derive(Debug, Clone)]
pub struct ProductTailReport {
    /// Measure of `{M 1_U > a}`.
    pub enlarged_measure: f64,
    /// Max over trials and families of `sum_{R_s subset U} |<f, phi_s>|^2 / ||psi^{3 omega} * f||^2`.
    pub max_ratio: f64,
    pub trials: usize,
}

/// For `f` supported off `{M 1_U > a}` (strong maximal function, `U` a dyadic
/// square), compares the coefficient mass of tiles inside `U` with
/// `||psi^{3 omega} * f||^2`.
pub fn product_tail_probe(tiles: &TileSet2, u: (DyadicInterval, DyadicInterval), a: f64, trials: usize, seed: u64) -> Result<ProductTailReport> {
    let (n1, n2) = (tiles.n1, tiles.n2);
    u.0.check_fits(n1)?;
    u.1.check_fits(n2)?;
    let mut ind = vec![0.0; n1 * n2];
    for i1 in u.0.samples(n1) {
        for i2 in u.1.samples(n2) {
            ind[i1 * n2 + i2] = 1.0;
        }
    }
    let m = strong_maximal_real(&ind, n1, n2);
    let allowed: Vec<bool> = m.iter().map(|v| *v <= a).collect();
    let enlarged_measure = allowed.iter().filter(|b| !**b).count() as f64 / (n1 * n2) as f64;
    let smooth: Vec<(Window, Window)> = tiles
        .families
        .iter()
        .map(|f| Ok((Window::scaled(n1, f.x.omega, 3.0, 6.0)?, Window::scaled(n2, f.y.omega, 3.0, 6.0)?)))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let data: Vec<C64> = allowed.iter().map(|&ok| if ok { gaussian_complex(&mut rng) } else { ZERO }).collect();
            let f = Signal2::new(n1, n2, data).expect("valid grid");
            let spec = dft2(&f);
            let mut worst = 0.0f64;
            for (fam, (s1, s2)) in tiles.families.iter().zip(&smooth) {
                let c = fam.coefficients(&spec);
                let (l1, l2) = (fam.x.level, fam.y.level);
                let m2 = fam.y.count();
                let mut num = 0.0;
                for (idx, z) in c.iter().enumerate() {
                    let r1 = DyadicInterval { level: l1, offset: (idx / m2) as u64 };
                    let r2 = DyadicInterval { level: l2, offset: (idx % m2) as u64 };
                    if r1.is_subset_of(&u.0) && r2.is_subset_of(&u.1) {
                        num += z.norm_sqr();
                    }
                }
                let mut den = 0.0;
                for k1 in s1.active() {
                    let w1 = s1.at(k1);
                    for k2 in s2.active() {
                        den += (w1 * s2.at(k2)).powi(2) * spec.coeffs[freq_slot(k1, n1) * n2 + freq_slot(k2, n2)].norm_sqr();
                    }
                }
                if den > 0.0 {
                    worst = worst.max(num / den);
                }
            }
            worst
        })
        .collect();
    Ok(ProductTailReport { enlarged_measure, max_ratio: ratios.into_iter().fold(0.0, f64::max), trials })
}
