//! Signals on the two-dimensional torus `Z_{n1} x Z_{n2}` with the same
//! normalization as the 1D model (probability measure in space, counting
//! measure in frequency). Storage is row-major: `data[i1 * n2 + i2]`.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::grid::{check_exponent, check_len, fft_in_place, freq_slot, ifft_in_place, lp_norm_of, FreqInterval, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Signal2 {
    n1: usize,
    n2: usize,
    data: Vec<C64>,
}

/// A rectangle `omega1 x omega2` of integer frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqRect {
    pub x: FreqInterval,
    pub y: FreqInterval,
}

impl FreqRect {
    pub fn intersects(&self, other: &FreqRect) -> bool {
        self.x.intersects(&other.x) && self.y.intersects(&other.y)
    }
}

/// Checks pairwise disjointness of frequency rectangles.
pub fn check_disjoint_rects(rects: &[FreqRect]) -> Result<()> {
    for (i, a) in rects.iter().enumerate() {
        for b in &rects[i + 1..] {
            if a.intersects(b) {
                return Err(LabError::Overlap(a.x.lo, a.x.hi, b.x.lo, b.x.hi));
            }
        }
    }
    Ok(())
}

impl Signal2 {
    pub fn new(n1: usize, n2: usize, data: Vec<C64>) -> Result<Self> {
        check_len(n1)?;
        check_len(n2)?;
        if data.len() != n1 * n2 {
            return Err(LabError::LengthMismatch { expected: n1 * n2, actual: data.len() });
        }
        Ok(Self { n1, n2, data })
    }

    pub fn zeros(n1: usize, n2: usize) -> Result<Self> {
        Self::new(n1, n2, vec![C64::new(0.0, 0.0); n1 * n2])
    }

    /// `g (x) h`.
    pub fn tensor(g: &[C64], h: &[C64]) -> Result<Self> {
        let data = g.iter().flat_map(|a| h.iter().map(move |b| a * b)).collect();
        Self::new(g.len(), h.len(), data)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn at(&self, i1: usize, i2: usize) -> C64 {
        self.data[i1 * self.n2 + i2]
    }

    pub fn abs(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm()).collect()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        Ok(lp_norm_of(self.data.iter().map(|z| z.norm()), self.data.len(), p))
    }
}

fn transform2(data: &mut [C64], n1: usize, n2: usize, inverse: bool) {
    for row in data.chunks_mut(n2) {
        if inverse {
            ifft_in_place(row)
        } else {
            fft_in_place(row)
        }
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n1];
    for c in 0..n2 {
        for r in 0..n1 {
            col[r] = data[r * n2 + c];
        }
        if inverse {
            ifft_in_place(&mut col)
        } else {
            fft_in_place(&mut col)
        }
        for r in 0..n1 {
            data[r * n2 + c] = col[r];
        }
    }
}

/// Fourier coefficients on the 2D torus, stored in FFT order per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2 {
    pub n1: usize,
    pub n2: usize,
    pub coeffs: Vec<C64>,
}

impl Spectrum2 {
    pub fn get(&self, k1: i64, k2: i64) -> C64 {
        self.coeffs[freq_slot(k1, self.n1) * self.n2 + freq_slot(k2, self.n2)]
    }
}

pub fn dft2(f: &Signal2) -> Spectrum2 {
    let mut buf = f.data.clone();
    transform2(&mut buf, f.n1, f.n2, false);
    let s = 1.0 / (f.n1 * f.n2) as f64;
    buf.iter_mut().for_each(|z| *z *= s);
    Spectrum2 { n1: f.n1, n2: f.n2, coeffs: buf }
}

pub fn idft2(spec: &Spectrum2) -> Signal2 {
    let mut buf = spec.coeffs.clone();
    transform2(&mut buf, spec.n1, spec.n2, true);
    Signal2 { n1: spec.n1, n2: spec.n2, data: buf }
}

/// `S^Omega f` for disjoint frequency rectangles.
pub fn square_sharp2(f: &Signal2, rects: &[FreqRect]) -> Result<Vec<f64>> {
    check_disjoint_rects(rects)?;
    for r in rects {
        r.x.check_range(f.n1)?;
        r.y.check_range(f.n2)?;
    }
    let spec = dft2(f);
    let (n1, n2) = (f.n1, f.n2);
    let mut acc = vec![0.0; n1 * n2];
    let zero = C64::new(0.0, 0.0);
    for r in rects {
        let mut band = Spectrum2 { n1, n2, coeffs: vec![zero; n1 * n2] };
        for k1 in r.x.iter() {
            for k2 in r.y.iter() {
                let i = freq_slot(k1, n1) * n2 + freq_slot(k2, n2);
                band.coeffs[i] = spec.coeffs[i];
            }
        }
        let g = idft2(&band);
        for (a, z) in acc.iter_mut().zip(&g.data) {
            *a += z.norm_sqr();
        }
    }
    Ok(acc.into_iter().map(f64::sqrt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_complex, trial_rng};

    #[test]
    fn round_trip_and_plancherel() {
        let mut rng = trial_rng(7, 0);
        let f = Signal2::new(16, 8, (0..128).map(|_| gaussian_complex(&mut rng)).collect()).unwrap();
        let spec = dft2(&f);
        let back = idft2(&spec);
        for (a, b) in back.data().iter().zip(f.data()) {
            assert!((a - b).norm() < 1e-12);
        }
        let e1 = f.lp_norm(2.0).unwrap().powi(2);
        let e2: f64 = spec.coeffs.iter().map(|z| z.norm_sqr()).sum();
        assert!((e1 - e2).abs() < 1e-12 * e1);
    }

    #[test]
    fn full_partition_preserves_l2() {
        let mut rng = trial_rng(8, 0);
        let f = Signal2::new(16, 16, (0..256).map(|_| gaussian_complex(&mut rng)).collect()).unwrap();
        let mut rects = Vec::new();
        for (a, b) in [(-8, -3), (-3, 0), (0, 8)] {
            for (c, d) in [(-8, 1), (1, 8)] {
                rects.push(FreqRect { x: FreqInterval::new(a, b).unwrap(), y: FreqInterval::new(c, d).unwrap() });
            }
        }
        let s = square_sharp2(&f, &rects).unwrap();
        let ns = (s.iter().map(|v| v * v).sum::<f64>() / 256.0).sqrt();
        assert!((ns - f.lp_norm(2.0).unwrap()).abs() < 1e-12);
    }
}
