//! The discrete torus `Z_n` viewed as `[0, 1)` with sample points `x_j = j / n`.
//!
//! Normalization: the spatial side carries the probability measure (weight
//! `1/n` per sample) and the frequency side counting measure, so that
//!
//! ```text
//! f^(k) = (1/n) sum_j f(x_j) e^{-2 pi i k x_j},   f(x_j) = sum_k f^(k) e^{2 pi i k x_j}
//! ```
//!
//! and Plancherel reads `||f||_2 = ||f^||_l2` with no stray constants.
//! Frequencies are indexed symmetrically in `[-n/2, n/2)`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{LabError, Result};

pub type C64 = Complex64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized in-place forward FFT (`sum_j x_j e^{-2 pi i jk/n}`).
pub fn fft_in_place(buf: &mut [C64]) {
    if buf.len() > 1 {
        plan(buf.len(), false).process(buf);
    }
}

/// Unnormalized in-place inverse FFT (`sum_k x_k e^{+2 pi i jk/n}`).
pub fn ifft_in_place(buf: &mut [C64]) {
    if buf.len() > 1 {
        plan(buf.len(), true).process(buf);
    }
}

pub(crate) fn check_len(n: usize) -> Result<()> {
    if n >= 8 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(LabError::InvalidLength(n))
    }
}

/// Storage slot of signed frequency `k` in FFT order.
#[inline]
pub fn freq_slot(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Signed frequency stored in FFT slot `i`.
#[inline]
pub fn slot_freq(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Complex samples on the torus. Length is a power of two, at least 8.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSignal {
    samples: Vec<C64>,
}

impl TorusSignal {
    pub fn new(samples: Vec<C64>) -> Result<Self> {
        check_len(samples.len())?;
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LabError::Malformed("non-finite sample".into()));
        }
        Ok(Self { samples })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Samples `f(x_j)` for `x_j = j / n`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        check_len(n)?;
        Self::new((0..n).map(|j| f(j as f64 / n as f64)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); n])
    }

    pub fn constant(n: usize, c: C64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// Indicator of the samples in `[start, end)` (sample indices).
    pub fn indicator(n: usize, start: usize, end: usize) -> Result<Self> {
        check_len(n)?;
        let mut s = vec![C64::new(0.0, 0.0); n];
        for z in &mut s[start.min(n)..end.min(n)] {
            *z = C64::new(1.0, 0.0);
        }
        Self::new(s)
    }

    pub(crate) fn from_vec_unchecked(samples: Vec<C64>) -> Self {
        debug_assert!(samples.len().is_power_of_two());
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn abs(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm()).collect()
    }

    pub fn mean(&self) -> C64 {
        self.samples.iter().sum::<C64>() / self.len() as f64
    }

    /// `<f, g> = (1/n) sum f conj(g)`.
    pub fn inner(&self, other: &TorusSignal) -> C64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            / self.len() as f64
    }

    pub fn add(&self, other: &TorusSignal) -> TorusSignal {
        Self::from_vec_unchecked(self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &TorusSignal) -> TorusSignal {
        Self::from_vec_unchecked(self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: C64) -> TorusSignal {
        Self::from_vec_unchecked(self.samples.iter().map(|a| a * c).collect())
    }

    pub fn max_abs_diff(&self, other: &TorusSignal) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Fourier coefficients `f^(k)` for `k` in `[-n/2, n/2)`, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<C64>,
}

impl Spectrum {
    pub fn zeros(n: usize) -> Result<Self> {
        check_len(n)?;
        Ok(Self { coeffs: vec![C64::new(0.0, 0.0); n] })
    }

    /// Builds a spectrum from `g(k)` evaluated at every frequency.
    pub fn from_fn(n: usize, g: impl Fn(i64) -> C64) -> Result<Self> {
        check_len(n)?;
        Ok(Self { coeffs: (0..n).map(|i| g(slot_freq(i, n))).collect() })
    }

    /// Takes coefficients already in FFT order.
    pub fn from_fft_order(coeffs: Vec<C64>) -> Result<Self> {
        check_len(coeffs.len())?;
        Ok(Self { coeffs })
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn half(&self) -> i64 {
        (self.len() / 2) as i64
    }

    pub fn get(&self, k: i64) -> C64 {
        self.coeffs[freq_slot(k, self.len())]
    }

    pub fn set(&mut self, k: i64, v: C64) {
        let n = self.len();
        self.coeffs[freq_slot(k, n)] = v;
    }

    pub fn fft_order(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn fft_order_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    /// `(k, f^(k))` for `k = -n/2 .. n/2` in increasing order.
    pub fn centered(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let h = self.half();
        (-h..h).map(move |k| (k, self.get(k)))
    }

    /// Pointwise product with a multiplier given in FFT order.
    pub fn multiply(&self, m: &[C64]) -> Spectrum {
        Self { coeffs: self.coeffs.iter().zip(m).map(|(a, b)| a * b).collect() }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn dft(signal: &TorusSignal) -> Spectrum {
    let n = signal.len();
    let mut buf = signal.samples.clone();
    fft_in_place(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|z| *z *= s);
    Spectrum { coeffs: buf }
}

pub fn idft(spec: &Spectrum) -> TorusSignal {
    let mut buf = spec.coeffs.clone();
    ifft_in_place(&mut buf);
    TorusSignal { samples: buf }
}

/// Checked variant of [`dft`] for raw sample vectors.
pub fn dft_raw(samples: &[C64]) -> Result<Spectrum> {
    Ok(dft(&TorusSignal::new(samples.to_vec())?))
}

/// Lebesgue exponent: `p >= 1` or `p = infinity` (as `f64::INFINITY`).
pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(LabError::InvalidExponent(p, "need p >= 1"))
    } else {
        Ok(())
    }
}

/// `((1/n) sum |v|^p)^{1/p}` over nonnegative magnitudes, sup for `p = inf`.
pub fn lp_norm_of(values: impl Iterator<Item = f64> + Clone, n: usize, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, f64::max);
    }
    if p == 2.0 {
        return (values.map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    }
    if p == 1.0 {
        return values.sum::<f64>() / n as f64;
    }
    // Scale by the max to keep |v|^p in range for large p.
    let m = values.clone().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = values.map(|v| (v / m).powf(p)).sum();
    m * (s / n as f64).powf(1.0 / p)
}

pub fn lp_norm(signal: &TorusSignal, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_of(signal.samples.iter().map(|z| z.norm()), signal.len(), p))
}

/// `lp_norm` for real nonnegative data (square functions, maximal functions).
pub fn lp_norm_real(values: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_of(values.iter().map(|v| v.abs()), values.len(), p))
}

/// Half-open integer frequency arc `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqInterval {
    pub lo: i64,
    pub hi: i64,
}

impl FreqInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo >= hi {
            return Err(LabError::FrequencyOutOfRange { lo, hi, half: 0 });
        }
        Ok(Self { lo, hi })
    }

    /// The whole frequency range `[-n/2, n/2)`.
    pub fn full(n: usize) -> Self {
        let h = (n / 2) as i64;
        Self { lo: -h, hi: h }
    }

    pub fn width(&self) -> i64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        (self.lo + self.hi) as f64 / 2.0
    }

    pub fn contains(&self, k: i64) -> bool {
        self.lo <= k && k < self.hi
    }

    pub fn contains_interval(&self, other: &FreqInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &FreqInterval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    pub fn in_range(&self, n: usize) -> bool {
        let h = (n / 2) as i64;
        -h <= self.lo && self.hi <= h
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        if self.in_range(n) {
            Ok(())
        } else {
            Err(LabError::FrequencyOutOfRange { lo: self.lo, hi: self.hi, half: (n / 2) as i64 })
        }
    }

    /// Concentric dilation by `factor`, endpoints rounded outward.
    pub fn dilate(&self, factor: f64) -> FreqInterval {
        let c = self.center();
        let r = factor * self.width() as f64 / 2.0;
        let lo = (c - r).floor() as i64;
        let hi = (c + r).ceil() as i64;
        FreqInterval { lo, hi: hi.max(lo + 1) }
    }

    /// Intersection with `[-n/2, n/2)`, if nonempty.
    pub fn clip(&self, n: usize) -> Option<FreqInterval> {
        let h = (n / 2) as i64;
        let lo = self.lo.max(-h);
        let hi = self.hi.min(h);
        (lo < hi).then_some(FreqInterval { lo, hi })
    }

    pub fn iter(&self) -> std::ops::Range<i64> {
        self.lo..self.hi
    }
}

/// A family of pairwise disjoint frequency arcs, kept in caller order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalCollection {
    intervals: Vec<FreqInterval>,
}

impl IntervalCollection {
    pub fn new(intervals: Vec<FreqInterval>) -> Result<Self> {
        let mut sorted = intervals.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0].intersects(&w[1]) {
                return Err(LabError::Overlap(w[0].lo, w[0].hi, w[1].lo, w[1].hi));
            }
        }
        Ok(Self { intervals })
    }

    /// Unit arcs `[k, k+1)` covering `[lo, hi)`.
    pub fn unit_arcs(lo: i64, hi: i64) -> Self {
        Self { intervals: (lo..hi).map(|k| FreqInterval { lo: k, hi: k + 1 }).collect() }
    }

    /// Partition of `[-n/2, n/2)` into consecutive arcs of the given widths
    /// (the last arc is truncated to the range).
    pub fn partition_by_widths(n: usize, widths: impl IntoIterator<Item = i64>) -> Self {
        let h = (n / 2) as i64;
        let mut lo = -h;
        let mut out = Vec::new();
        for w in widths {
            if lo >= h {
                break;
            }
            let hi = (lo + w.max(1)).min(h);
            out.push(FreqInterval { lo, hi });
            lo = hi;
        }
        if lo < h {
            out.push(FreqInterval { lo, hi: h });
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[FreqInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        self.intervals.iter().try_for_each(|w| w.check_range(n))
    }

    /// True when the arcs exactly tile `[-n/2, n/2)`.
    pub fn is_full_partition(&self, n: usize) -> bool {
        let total: i64 = self.intervals.iter().map(|w| w.width()).sum();
        total == n as i64 && self.intervals.iter().all(|w| w.in_range(n))
    }
}

/// Dyadic interval `[j 2^-k, (j+1) 2^-k)` of the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub level: u32,
    pub offset: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, offset: u64) -> Result<Self> {
        if level > 62 || offset >= 1u64 << level {
            return Err(LabError::InvalidDyadic { level, offset, n: 0 });
        }
        Ok(Self { level, offset })
    }

    pub fn unit() -> Self {
        Self { level: 0, offset: 0 }
    }

    pub fn len(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn left(&self) -> f64 {
        self.offset as f64 * self.len()
    }

    pub fn center(&self) -> f64 {
        (self.offset as f64 + 0.5) * self.len()
    }

    /// At least one sample per interval.
    pub fn fits(&self, n: usize) -> bool {
        (1usize << self.level) <= n
    }

    pub fn check_fits(&self, n: usize) -> Result<()> {
        if self.fits(n) {
            Ok(())
        } else {
            Err(LabError::InvalidDyadic { level: self.level, offset: self.offset, n })
        }
    }

    /// Sample indices covered on an `n`-point grid.
    pub fn samples(&self, n: usize) -> std::ops::Range<usize> {
        let w = n >> self.level;
        let a = self.offset as usize * w;
        a..a + w
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self { level: self.level - 1, offset: self.offset / 2 })
    }

    pub fn children(&self) -> [Self; 2] {
        [
            Self { level: self.level + 1, offset: 2 * self.offset },
            Self { level: self.level + 1, offset: 2 * self.offset + 1 },
        ]
    }

    /// `self ⊂ other` (not necessarily strict).
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.level >= other.level && (self.offset >> (self.level - other.level)) == other.offset
    }

    /// The dyadic interval at `level` containing sample `j` of an `n` grid.
    pub fn containing(level: u32, j: usize, n: usize) -> Self {
        Self { level, offset: ((j as u64) << level) / n as u64 }
    }

    /// All dyadic intervals with `level <= max_level`, coarse to fine, then by offset.
    pub fn all_up_to(max_level: u32) -> impl Iterator<Item = Self> {
        (0..=max_level).flat_map(|k| (0..1u64 << k).map(move |j| Self { level: k, offset: j }))
    }
}

/// The symmetry group generators acting on torus signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    /// `Mod_xi f(x) = e^{2 pi i xi x} f(x)`.
    Modulate(i64),
    /// `Tr_y f(x) = f(x - y)` with `y = shift / n`.
    Translate(i64),
    /// `Dil^p_lambda f(x) = lambda^{-1/p} f(x / lambda)` with `lambda = 2^log2_lambda`.
    Dilate { log2_lambda: i32, p: f64 },
}

pub fn modulate(f: &TorusSignal, xi: i64) -> TorusSignal {
    let n = f.len();
    let xi = xi.rem_euclid(n as i64) as usize;
    let samples = f
        .samples
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let phase = 2.0 * std::f64::consts::PI * ((xi * j) % n) as f64 / n as f64;
            z * C64::from_polar(1.0, phase)
        })
        .collect();
    TorusSignal { samples }
}

pub fn translate(f: &TorusSignal, shift: i64) -> TorusSignal {
    let n = f.len();
    let s = shift.rem_euclid(n as i64) as usize;
    let mut out = f.samples.clone();
    out.rotate_right(s);
    TorusSignal { samples: out }
}

/// Dilation of `f` viewed as a step function on the centered domain
/// `[-1/2, 1/2)`, extended by zero outside it. Exact `L^p` isometry; errors
/// when the image does not fit (expansion) or `f` is not constant on the
/// merged cells (compression).
pub fn dilate(f: &TorusSignal, log2_lambda: i32, p: f64) -> Result<TorusSignal> {
    check_exponent(p)?;
    let n = f.len() as i64;
    let h = n / 2;
    if log2_lambda.unsigned_abs() as i64 >= n.trailing_zeros() as i64 {
        return Err(LabError::IncompatibleDilation(log2_lambda, "scale exceeds grid"));
    }
    let lambda = (log2_lambda as f64).exp2();
    let amp = if p.is_infinite() { 1.0 } else { lambda.powf(-1.0 / p) };
    let centered = |c: i64| f.samples[c.rem_euclid(n) as usize];
    let zero = C64::new(0.0, 0.0);
    let mut out = vec![zero; n as usize];
    if log2_lambda >= 0 {
        let a = 1i64 << log2_lambda;
        for c in -h..h {
            let v = centered(c);
            if v != zero && (c < -h / a || c >= h / a) {
                return Err(LabError::IncompatibleDilation(log2_lambda, "support does not fit"));
            }
        }
        for c in -h..h {
            out[c.rem_euclid(n) as usize] = centered(c.div_euclid(a)) * amp;
        }
    } else {
        let b = 1i64 << (-log2_lambda);
        for blk in (-h..h).step_by(b as usize) {
            let v = centered(blk);
            if (blk..blk + b).any(|c| centered(c) != v) {
                return Err(LabError::IncompatibleDilation(log2_lambda, "not constant on merged cells"));
            }
        }
        for c in -h / b..h / b {
            out[c.rem_euclid(n) as usize] = centered(c * b) * amp;
        }
    }
    Ok(TorusSignal { samples: out })
}

pub fn symmetry(f: &TorusSignal, op: Symmetry) -> Result<TorusSignal> {
    match op {
        Symmetry::Modulate(xi) => Ok(modulate(f, xi)),
        Symmetry::Translate(y) => Ok(translate(f, y)),
        Symmetry::Dilate { log2_lambda, p } => dilate(f, log2_lambda, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let mut s = vec![c(0.0); 8];
        s[0] = c(1.0);
        let spec = dft(&TorusSignal::new(s).unwrap());
        for (_, v) in spec.centered() {
            assert_abs_diff_eq!(v.re, 1.0 / 8.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_lives_at_zero_frequency() {
        let spec = dft(&TorusSignal::constant(16, c(1.0)).unwrap());
        for (k, v) in spec.centered() {
            let expect = if k == 0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(v.norm(), expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn pure_frequency_is_a_single_coefficient() {
        let f = TorusSignal::from_fn(16, |x| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * x)).unwrap();
        let spec = dft(&f);
        for (k, v) in spec.centered() {
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(v.norm(), expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(TorusSignal::new(vec![c(0.0); 12]).is_err());
        assert!(TorusSignal::new(vec![c(0.0); 4]).is_err());
        assert!(dft_raw(&[c(1.0); 24]).is_err());
    }

    #[test]
    fn lp_norm_basics() {
        let one = TorusSignal::constant(32, c(1.0)).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert_abs_diff_eq!(lp_norm(&one, p).unwrap(), 1.0, epsilon = 1e-15);
        }
        let spike = TorusSignal::indicator(32, 5, 6).unwrap();
        for p in [1.0, 2.0, 3.0] {
            assert_abs_diff_eq!(lp_norm(&spike, p).unwrap(), (1.0f64 / 32.0).powf(1.0 / p), epsilon = 1e-15);
        }
        assert!(lp_norm(&one, 0.5).is_err());
    }

    #[test]
    fn identities_of_the_symmetry_group() {
        let f = TorusSignal::from_fn(16, |x| C64::new((7.0 * x).sin(), x * x)).unwrap();
        assert_eq!(modulate(&f, 0), f);
        assert_eq!(translate(&f, 0), f);
        assert_eq!(dilate(&f, 0, 2.0).unwrap(), f);
        let g = modulate(&f, 5);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_abs_diff_eq!(lp_norm(&g, p).unwrap(), lp_norm(&f, p).unwrap(), epsilon = 1e-14);
        }
    }

    #[test]
    fn modulation_shifts_the_spectrum() {
        let f = TorusSignal::from_fn(32, |x| C64::new((3.0 * x).cos(), (11.0 * x).sin())).unwrap();
        let a = dft(&f);
        let b = dft(&modulate(&f, 3));
        for k in -16..16 {
            assert_abs_diff_eq!((b.get(k) - a.get(k - 3)).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn dyadic_dilation_is_an_isometry() {
        let n = 64;
        // supported in the centered window [-1/8, 1/8)
        let f = TorusSignal::new(
            (0..n)
                .map(|j| {
                    let c = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                    if (-8..8).contains(&c) {
                        C64::new(1.0 + c as f64, 0.5)
                    } else {
                        c64_zero()
                    }
                })
                .collect(),
        )
        .unwrap();
        for p in [1.0, 2.0, 3.0] {
            let g = dilate(&f, 2, p).unwrap();
            assert_abs_diff_eq!(lp_norm(&g, p).unwrap(), lp_norm(&f, p).unwrap(), epsilon = 1e-13);
            let back = dilate(&g, -2, p).unwrap();
            assert!(back.max_abs_diff(&f) < 1e-13);
        }
        assert!(dilate(&f, 3, 2.0).is_err());
        assert!(dilate(&f, -1, 2.0).is_err());
    }

    fn c64_zero() -> C64 {
        C64::new(0.0, 0.0)
    }

    #[test]
    fn dyadic_interval_geometry() {
        let i = DyadicInterval::new(3, 5).unwrap();
        assert_eq!(i.samples(64), 40..48);
        assert!(i.is_subset_of(&DyadicInterval::new(1, 1).unwrap()));
        assert!(!i.is_subset_of(&DyadicInterval::new(1, 0).unwrap()));
        assert_eq!(i.parent().unwrap(), DyadicInterval::new(2, 2).unwrap());
        assert_eq!(DyadicInterval::containing(3, 41, 64), i);
        assert!(DyadicInterval::new(2, 4).is_err());
        assert!(!DyadicInterval::new(7, 0).unwrap().fits(64));
    }

    #[test]
    fn collections_reject_overlap() {
        let a = FreqInterval::new(0, 4).unwrap();
        let b = FreqInterval::new(3, 6).unwrap();
        assert!(IntervalCollection::new(vec![a, b]).is_err());
        let p = IntervalCollection::partition_by_widths(32, [3, 5, 7, 100]);
        assert!(p.is_full_partition(32));
    }

    #[test]
    fn frequency_interval_dilation_rounds_outward() {
        let w = FreqInterval::new(2, 5).unwrap();
        assert_eq!(w.dilate(3.0), FreqInterval { lo: -1, hi: 8 });
        assert_eq!(w.dilate(2.0), FreqInterval { lo: 0, hi: 7 });
    }
}
