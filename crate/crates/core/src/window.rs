//! Smooth frequency windows `phi^` with a flat plateau and compact support.
//!
//! The transition uses `h(t) = g(t) / (g(t) + g(1 - t))`, `g(t) = exp(-1/t)`
//! for `t > 0` and `0` otherwise. The window equals 1 on the closed plateau
//! `[p.lo, p.hi]`, vanishes outside the open support `(s.lo, s.hi)`, and
//! rises/falls through `h` in between. Taking the plateau closed keeps
//! concentric windows exactly even about their center.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::grid::{check_len, freq_slot, FreqInterval, Spectrum, TorusSignal};

fn g(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Infinitely smooth step from 0 (t <= 0) to 1 (t >= 1).
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = g(t);
        a / (a + g(1.0 - t))
    }
}

/// Window profile value at integer frequency `k`.
pub fn profile(plateau: FreqInterval, support: FreqInterval, k: i64) -> f64 {
    if k <= support.lo || k >= support.hi {
        0.0
    } else if k < plateau.lo {
        smooth_step((k - support.lo) as f64 / (plateau.lo - support.lo) as f64)
    } else if k <= plateau.hi {
        1.0
    } else {
        smooth_step((support.hi - k) as f64 / (support.hi - plateau.hi) as f64)
    }
}

/// A real frequency window sampled over `[-n/2, n/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    n: usize,
    /// Values in FFT order.
    hat: Vec<f64>,
    pub plateau: FreqInterval,
    pub support: FreqInterval,
}

pub fn make_window(n: usize, plateau: FreqInterval, support: FreqInterval) -> Result<Window> {
    check_len(n)?;
    if !(support.lo < plateau.lo && plateau.hi < support.hi) {
        return Err(LabError::InvalidWindow(plateau.lo, plateau.hi, support.lo, support.hi));
    }
    let h = (n / 2) as i64;
    let mut hat = vec![0.0; n];
    for k in support.lo.max(-h)..support.hi.min(h) {
        hat[freq_slot(k, n)] = profile(plateau, support, k);
    }
    Ok(Window { n, hat, plateau, support })
}

impl Window {
    /// Window adapted to `omega`: plateau `omega`, support its concentric double.
    pub fn adapted(n: usize, omega: FreqInterval) -> Result<Window> {
        Self::scaled(n, omega, 1.0, 2.0)
    }

    /// Plateau `a * omega`, support `b * omega` (both concentric, rounded outward).
    pub fn scaled(n: usize, omega: FreqInterval, a: f64, b: f64) -> Result<Window> {
        let p = if a == 1.0 { omega } else { omega.dilate(a) };
        make_window(n, p, omega.dilate(b))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn at(&self, k: i64) -> f64 {
        if k < -(self.n as i64) / 2 || k >= self.n as i64 / 2 {
            0.0
        } else {
            self.hat[freq_slot(k, self.n)]
        }
    }

    pub fn fft_order(&self) -> &[f64] {
        &self.hat
    }

    /// In-range frequencies where the window may be nonzero.
    pub fn active(&self) -> std::ops::Range<i64> {
        let h = (self.n / 2) as i64;
        self.support.lo.max(-h)..self.support.hi.min(h)
    }

    pub fn sup(&self) -> f64 {
        self.hat.iter().cloned().fold(0.0, f64::max)
    }

    /// `sum_k phi^(k)^2`, the squared L2 norm of `phi`.
    pub fn energy(&self) -> f64 {
        self.hat.iter().map(|v| v * v).sum()
    }

    /// `phi` in space: inverse transform of the window.
    pub fn kernel(&self) -> TorusSignal {
        let spec = Spectrum::from_vec_unchecked(self.hat.iter().map(|&v| Complex64::new(v, 0.0)).collect());
        crate::grid::idft(&spec)
    }

    /// `phi * f`.
    pub fn convolve(&self, f: &TorusSignal) -> TorusSignal {
        let spec = crate::grid::dft(f);
        let out: Vec<Complex64> = spec.fft_order().iter().zip(&self.hat).map(|(a, &w)| a * w).collect();
        crate::grid::idft(&Spectrum::from_vec_unchecked(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::lp_norm;

    fn fi(lo: i64, hi: i64) -> FreqInterval {
        FreqInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn endpoint_values() {
        let w = make_window(64, fi(-4, 4), fi(-8, 8)).unwrap();
        assert_eq!(w.at(0), 1.0);
        assert_eq!(w.at(-8), 0.0);
        assert_eq!(w.at(8), 0.0);
        assert_eq!(w.at(4), 1.0);
        assert_eq!(w.at(-4), 1.0);
    }

    #[test]
    fn monotone_transitions_and_sandwich() {
        let p = fi(-3, 5);
        let s = fi(-9, 12);
        let w = make_window(64, p, s).unwrap();
        for k in s.lo..p.lo {
            assert!(w.at(k) <= w.at(k + 1));
        }
        for k in p.hi..s.hi {
            assert!(w.at(k) >= w.at(k + 1));
        }
        for k in -32..32 {
            let lower = if p.contains(k) { 1.0 } else { 0.0 };
            let upper = if s.contains(k) { 1.0 } else { 0.0 };
            assert!(lower <= w.at(k) && w.at(k) <= upper);
        }
    }

    #[test]
    fn concentric_windows_are_even() {
        let w = make_window(128, fi(10, 20), fi(5, 25)).unwrap();
        for d in 0..12 {
            assert_eq!(w.at(15 + d), w.at(15 - d));
        }
    }

    #[test]
    fn rejects_plateau_touching_support() {
        assert!(make_window(64, fi(-8, 4), fi(-8, 8)).is_err());
        assert!(make_window(64, fi(-4, 8), fi(-8, 8)).is_err());
    }

    #[test]
    fn spatial_decay_at_quarter_distance() {
        // Support width 16 on n = 1024: the kernel is negligible a quarter turn away.
        let w = make_window(1024, fi(-4, 4), fi(-8, 8)).unwrap();
        let phi = w.kernel();
        let sup = lp_norm(&phi, f64::INFINITY).unwrap();
        assert!(phi.samples()[256].norm() <= 1e-6 * sup);
    }
}
