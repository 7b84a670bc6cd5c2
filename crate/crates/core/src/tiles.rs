//! Time-frequency tiles and the tile operator `T^Omega`.
//!
//! For a frequency arc `omega` the spatial level is the unique `L` with
//! `1 <= 2^-L |omega| < 2`. Writing `M = 2^L`, `|I| = 1/M` and
//! `c(I_j) = (j + 1/2) / M`, the wave packet of tile `s = (I_j, omega)` is
//!
//! ```text
//! phi_s^(k) = |I|^{1/2} w(k) e^{-2 pi i k c(I_j)}
//! ```
//!
//! where `w` is the window of `omega`. Coefficients `<f, phi_s>` for all `j`
//! come from folding `f^ w` modulo `M` and one inverse FFT of size `M`.
//! The Gram matrix of one family is circulant with eigenvalues
//! `sum_{k = r mod M} w(k)^2`.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::grid::{dft, fft_in_place, freq_slot, idft, ifft_in_place, translate, DyadicInterval, FreqInterval, IntervalCollection, Spectrum, TorusSignal, C64};
use crate::maximal::maximal;
use crate::window::Window;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A tile `s = (I_s, omega_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tile {
    pub spatial: DyadicInterval,
    pub freq: FreqInterval,
}

impl Tile {
    /// `|I_s| |omega_s|`.
    pub fn area(&self) -> f64 {
        self.spatial.len() * self.freq.width() as f64
    }
}

/// Real window values over a contiguous frequency band starting at `lo`.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub lo: i64,
    pub values: Vec<f64>,
}

impl Band {
    pub fn from_window(w: &Window) -> Self {
        let r = w.active();
        Self { lo: r.start, values: r.map(|k| w.at(k)).collect() }
    }

    /// The sharp indicator of `omega`.
    pub fn sharp(omega: FreqInterval) -> Self {
        Self { lo: omega.lo, values: vec![1.0; omega.width() as usize] }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(m, &v)| (self.lo + m as i64, v))
    }

    pub fn at(&self, k: i64) -> f64 {
        let m = k - self.lo;
        if m < 0 || m as usize >= self.values.len() {
            0.0
        } else {
            self.values[m as usize]
        }
    }
}

/// All tiles sharing one frequency arc.
#[derive(Debug, Clone, PartialEq)]
pub struct TileFamily {
    pub omega: FreqInterval,
    pub level: u32,
    pub band: Band,
}

/// The unique dyadic level with `1 <= 2^-L width < 2`.
pub fn dual_level(width: i64) -> u32 {
    63 - (width as u64).leading_zeros()
}

impl TileFamily {
    pub fn new(n: usize, omega: FreqInterval, band: Band) -> Result<Self> {
        omega.check_range(n)?;
        let level = dual_level(omega.width());
        if (1usize << level) > n {
            return Err(LabError::TooWide { width: omega.width(), n });
        }
        Ok(Self { omega, level, band })
    }

    pub fn adapted(n: usize, omega: FreqInterval) -> Result<Self> {
        Self::new(n, omega, Band::from_window(&Window::adapted(n, omega)?))
    }

    /// Number of tiles `M = 2^L`.
    pub fn count(&self) -> usize {
        1 << self.level
    }

    pub fn spatial_len(&self) -> f64 {
        1.0 / self.count() as f64
    }

    pub fn tile(&self, j: usize) -> Tile {
        Tile { spatial: DyadicInterval { level: self.level, offset: j as u64 }, freq: self.omega }
    }

    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        (0..self.count()).map(move |j| self.tile(j))
    }

    /// `<f, phi_s>` for every tile of the family, indexed by spatial offset.
    pub fn coefficients(&self, spec: &Spectrum) -> Vec<C64> {
        let m = self.count();
        let mut h = vec![ZERO; m];
        for (k, w) in self.band.iter() {
            if w == 0.0 {
                continue;
            }
            let half_cell = C64::from_polar(1.0, std::f64::consts::PI * k as f64 / m as f64);
            h[k.rem_euclid(m as i64) as usize] += spec.get(k) * w * half_cell;
        }
        ifft_in_place(&mut h);
        let s = self.spatial_len().sqrt();
        h.iter_mut().for_each(|z| *z *= s);
        h
    }

    /// Spectrum of `sum_j a_j phi_{s_j}` on an `n`-point grid.
    pub fn synthesize(&self, n: usize, a: &[C64]) -> Spectrum {
        let m = self.count();
        let mut big_a = a.to_vec();
        fft_in_place(&mut big_a);
        let s = self.spatial_len().sqrt();
        let mut out = vec![ZERO; n];
        for (k, w) in self.band.iter() {
            let half_cell = C64::from_polar(1.0, -std::f64::consts::PI * k as f64 / m as f64);
            out[freq_slot(k, n)] += big_a[k.rem_euclid(m as i64) as usize] * (s * w) * half_cell;
        }
        Spectrum::from_vec_unchecked(out)
    }

    /// The wave packet `phi_s` for spatial offset `j`.
    pub fn packet(&self, n: usize, j: usize) -> TorusSignal {
        let mut a = vec![ZERO; self.count()];
        a[j] = C64::new(1.0, 0.0);
        idft(&self.synthesize(n, &a))
    }

    /// Gram eigenvalues `sum_{k = r mod M} w(k)^2`, `r = 0..M`.
    pub fn gram_eigenvalues(&self) -> Vec<f64> {
        let m = self.count();
        let mut lam = vec![0.0; m];
        for (k, w) in self.band.iter() {
            lam[k.rem_euclid(m as i64) as usize] += w * w;
        }
        lam
    }

    /// Dense Gram matrix `(<phi_s, phi_s'>)`.
    pub fn gram_matrix(&self) -> DMatrix<C64> {
        let m = self.count();
        // first column of the circulant: G_{j,0} = |I| sum_k w^2 e^{-2 pi i k j / M}
        let mut col = vec![ZERO; m];
        for (k, w) in self.band.iter() {
            col[k.rem_euclid(m as i64) as usize] += C64::new(w * w, 0.0);
        }
        fft_in_place(&mut col);
        let s = self.spatial_len();
        DMatrix::from_fn(m, m, |i, j| col[(i + m - j) % m] * s)
    }
}

/// `T(Omega)`: one tile family per arc.
#[derive(Debug, Clone, PartialEq)]
pub struct TileSet {
    pub n: usize,
    pub families: Vec<TileFamily>,
}

/// Tiles for `Omega` with windows adapted to each arc.
pub fn build_tiles(n: usize, omega: &IntervalCollection) -> Result<TileSet> {
    let families = omega.intervals().iter().map(|&w| TileFamily::adapted(n, w)).collect::<Result<_>>()?;
    Ok(TileSet { n, families })
}

impl TileSet {
    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        self.families.iter().flat_map(|f| f.tiles())
    }

    pub fn len(&self) -> usize {
        self.families.iter().map(|f| f.count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coefficient table, one vector per family.
    pub fn coefficients(&self, f: &TorusSignal) -> Vec<Vec<C64>> {
        let spec = dft(f);
        self.families.par_iter().map(|fam| fam.coefficients(&spec)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct TileTransform {
    /// `T^Omega f` at each sample.
    pub values: Vec<f64>,
    pub coefficients: Vec<Vec<C64>>,
}

/// `T^Omega f = (sum_s |<f, phi_s>|^2 / |I_s| 1_{I_s})^{1/2}`.
pub fn tile_operator(f: &TorusSignal, tiles: &TileSet) -> Result<TileTransform> {
    let n = f.len();
    if n != tiles.n {
        return Err(LabError::LengthMismatch { expected: tiles.n, actual: n });
    }
    let coefficients = tiles.coefficients(f);
    let mut sq = vec![0.0; n];
    for (fam, c) in tiles.families.iter().zip(&coefficients) {
        let m = fam.count();
        let per = n / m;
        for (j, z) in c.iter().enumerate() {
            let v = z.norm_sqr() * m as f64;
            for x in &mut sq[j * per..(j + 1) * per] {
                *x += v;
            }
        }
    }
    Ok(TileTransform { values: sq.into_iter().map(f64::sqrt).collect(), coefficients })
}

/// Rows `(omega_lo, omega_hi, level, offset, re, im)`.
pub fn coefficient_rows(tiles: &TileSet, coefficients: &[Vec<C64>]) -> Vec<(i64, i64, u32, u64, f64, f64)> {
    tiles
        .families
        .iter()
        .zip(coefficients)
        .flat_map(|(fam, c)| {
            c.iter()
                .enumerate()
                .map(move |(j, z)| (fam.omega.lo, fam.omega.hi, fam.level, j as u64, z.re, z.im))
        })
        .collect()
}

const EIGEN_LIMIT: usize = 512;

/// Largest Gram eigenvalue of the family: the sharp constant in
/// `sum_s |<f, phi_s>|^2 <= C ||f||_2^2`. Dense Hermitian eigen-solve for
/// families up to 512 tiles, the circulant closed form beyond.
pub fn bessel_constant(family: &TileFamily) -> f64 {
    if family.count() <= EIGEN_LIMIT {
        bessel_constant_eigen(family)
    } else {
        bessel_constant_circulant(family)
    }
}

pub fn bessel_constant_eigen(family: &TileFamily) -> f64 {
    SymmetricEigen::new(family.gram_matrix()).eigenvalues.iter().cloned().fold(f64::MIN, f64::max)
}

pub fn bessel_constant_circulant(family: &TileFamily) -> f64 {
    family.gram_eigenvalues().into_iter().fold(0.0, f64::max)
}

/// Rayleigh-quotient power iteration on the Gram matrix.
pub fn bessel_constant_power(family: &TileFamily, iters: usize, seed: u64) -> f64 {
    let g = family.gram_matrix();
    let mut rng = crate::rng::trial_rng(seed, 0);
    let mut v = nalgebra::DVector::from_fn(family.count(), |_, _| crate::rng::gaussian_complex(&mut rng));
    v /= C64::new(v.norm(), 0.0);
    let mut lam = 0.0;
    for _ in 0..iters {
        let w = &g * &v;
        lam = v.dotc(&w).re;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / C64::new(nw, 0.0);
    }
    lam
}

#[derive(Debug, Clone)]
pub struct BesselSlack {
    pub constant: f64,
    /// `min_f (C ||f||^2 - sum_s |<f, phi_s>|^2) / (C ||f||^2)` over the trials.
    pub min_relative_slack: f64,
    pub trials: usize,
}

/// Bessel inequality margin over `trials` inputs: complex white noise,
/// with every fourth input replaced by a single packet of the family.
pub fn bessel_slack(n: usize, family: &TileFamily, trials: usize, seed: u64) -> BesselSlack {
    let constant = bessel_constant(family);
    let min_relative_slack = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = crate::rng::trial_rng(seed, t as u64);
            let f = if t % 4 == 3 {
                family.packet(n, t % family.count())
            } else {
                crate::rng::gaussian_signal(&mut rng, n)
            };
            let energy = f.inner(&f).re;
            let mass: f64 = family.coefficients(&dft(&f)).iter().map(|z| z.norm_sqr()).sum();
            (constant * energy - mass) / (constant * energy)
        })
        .reduce(|| f64::INFINITY, f64::min);
    BesselSlack { constant, min_relative_slack, trials }
}

/// Discrepancy between `(1/n) sum_y Tr_{-y} H_omega Tr_y f` and `psi^omega * f`
/// where `H_omega = sum_s <., phi_s> phi_s` and `psi^ = |phi^|^2`.
pub fn translation_average_check(family: &TileFamily, f: &TorusSignal) -> f64 {
    let n = f.len();
    const CHUNK: usize = 32;
    let partials: Vec<Vec<C64>> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(CHUNK)
        .map(|ys| {
            let mut acc = vec![ZERO; n];
            for &y in ys {
                let g = translate(f, y as i64);
                let c = family.coefficients(&dft(&g));
                let h = idft(&family.synthesize(n, &c));
                let back = translate(&h, -(y as i64));
                for (a, z) in acc.iter_mut().zip(back.samples()) {
                    *a += z;
                }
            }
            acc
        })
        .collect();
    let mut avg = vec![ZERO; n];
    for p in partials {
        for (a, z) in avg.iter_mut().zip(p) {
            *a += z;
        }
    }
    avg.iter_mut().for_each(|z| *z /= n as f64);
    let spec = dft(f);
    let mut conv = vec![ZERO; n];
    for (k, w) in family.band.iter() {
        conv[freq_slot(k, n)] = spec.get(k) * (w * w);
    }
    let psi_f = idft(&Spectrum::from_vec_unchecked(conv));
    avg.iter().zip(psi_f.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// `sup_s 1_{I_s}(x) |<f, phi_s>| / |I_s|^{1/2}` at every sample.
pub fn tile_maximal(f: &TorusSignal, tiles: &TileSet) -> Vec<f64> {
    let n = f.len();
    let coeffs = tiles.coefficients(f);
    let mut out = vec![0.0f64; n];
    for (fam, c) in tiles.families.iter().zip(&coeffs) {
        let m = fam.count();
        let per = n / m;
        for (j, z) in c.iter().enumerate() {
            let v = z.norm() * (m as f64).sqrt();
            for x in &mut out[j * per..(j + 1) * per] {
                *x = x.max(v);
            }
        }
    }
    out
}

/// Smallest `C` with `tile_maximal(f) <= C Mf` at every sample.
pub fn pointwise_max_ratio(f: &TorusSignal, tiles: &TileSet) -> f64 {
    let lhs = tile_maximal(f, tiles);
    let mf = maximal(f);
    lhs.iter()
        .zip(&mf)
        .map(|(a, b)| if *b > 0.0 { a / b } else if *a > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct PointwiseMaxReport {
    /// Per battery member, the smallest admissible constant.
    pub ratios: Vec<(String, f64)>,
    pub constant: f64,
}

/// Battery: constant, delta, indicator of a quarter, modulated indicator, noise.
pub fn pointwise_max_check(tiles: &TileSet, seed: u64) -> Result<PointwiseMaxReport> {
    let n = tiles.n;
    let mut battery: Vec<(String, TorusSignal)> = vec![
        ("constant".into(), TorusSignal::constant(n, C64::new(1.0, 0.0))?),
        ("delta".into(), TorusSignal::indicator(n, 0, 1)?),
        ("quarter".into(), TorusSignal::indicator(n, 0, n / 4)?),
    ];
    if let Some(fam) = tiles.families.first() {
        let c = fam.omega.center().round() as i64;
        battery.push(("modulated-quarter".into(), crate::grid::modulate(&TorusSignal::indicator(n, n / 8, 3 * n / 8)?, c)));
        battery.push(("packet".into(), fam.packet(n, 0)));
    }
    battery.push(("noise".into(), crate::rng::gaussian_signal(&mut crate::rng::trial_rng(seed, 0), n)));
    let ratios: Vec<(String, f64)> = battery.into_iter().map(|(name, f)| (name, pointwise_max_ratio(&f, tiles))).collect();
    let constant = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(PointwiseMaxReport { ratios, constant })
}

/// `||T^Omega 1_F||_p / |F|^{1/p}` for a sample set `F`.
pub fn restricted_type_ratio(tiles: &TileSet, set: &[bool], p: f64) -> Result<f64> {
    if p <= 2.0 {
        return Err(LabError::InvalidExponent(p, "restricted type needs p > 2"));
    }
    let n = tiles.n;
    let count = set.iter().filter(|b| **b).count();
    if count == 0 {
        return Ok(0.0);
    }
    let f = TorusSignal::new(set.iter().map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect())?;
    let t = tile_operator(&f, tiles)?;
    let norm = crate::grid::lp_norm_real(&t.values, p)?;
    Ok(norm / (count as f64 / n as f64).powf(1.0 / p))
}

#[derive(Debug, Clone)]
pub struct RestrictedTypeReport {
    /// `(label, |F|, ratio)`.
    pub rows: Vec<(String, f64, f64)>,
    pub max_ratio: f64,
}

/// Battery of sets: dyadic intervals, unions of two intervals and random
/// sample sets, with measures `2^-1 .. 2^-6`.
pub fn restricted_type_check(tiles: &TileSet, p: f64, seed: u64) -> Result<RestrictedTypeReport> {
    use rand::Rng;
    let n = tiles.n;
    let mut rows = Vec::new();
    for e in 1..=6u32 {
        let m = n >> e;
        let mut sets: Vec<(String, Vec<bool>)> = Vec::new();
        sets.push((format!("interval-2^-{e}"), (0..n).map(|j| j < m).collect()));
        sets.push((format!("two-intervals-2^-{e}"), (0..n).map(|j| j < m / 2 || (n / 2..n / 2 + m / 2).contains(&j)).collect()));
        let mut rng = crate::rng::trial_rng(seed, e as u64);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..m {
            let r = rng.random_range(i..n);
            idx.swap(i, r);
        }
        let mut random = vec![false; n];
        for &i in &idx[..m] {
            random[i] = true;
        }
        sets.push((format!("random-2^-{e}"), random));
        for (name, s) in sets {
            let r = restricted_type_ratio(tiles, &s, p)?;
            rows.push((name, (m as f64) / n as f64, r));
        }
    }
    let max_ratio = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(RestrictedTypeReport { rows, max_ratio })
}
