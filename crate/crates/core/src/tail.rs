//! Probe of the localized Bessel estimate: tiles inside a long interval `I`
//! see little of a function supported away from `tI`.
//!
//! For each `t` the probe lower-bounds
//!
//! ```text
//! sup_f  sum_{I_s subset I} |<f, phi_s>|^2 / ||psi^{3 omega} * f||_2^2,   supp f in (tI)^c
//! ```
//!
//! by projected gradient ascent from random starts, and separately computes
//! the exact value of the same supremum normalized by `||f||_2^2` instead
//! (the top eigenvalue of the restricted tile Gram matrix).

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fit::loglog_slope;
use crate::grid::{dft, freq_slot, idft, DyadicInterval, FreqInterval, Spectrum, TorusSignal, C64};
use crate::rng::{gaussian_signal, trial_rng};
use crate::tiles::TileFamily;
use crate::window::Window;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy)]
pub struct TailProbeConfig {
    pub starts: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for TailProbeConfig {
    fn default() -> Self {
        Self { starts: 20, steps: 200, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct TailRow {
    pub t: f64,
    pub t_rho: f64,
    /// Best ratio found against `||psi^{3 omega} * f||^2`.
    pub ratio: f64,
    /// Exact supremum of the ratio against `||f||^2`.
    pub ratio_l2: f64,
}

#[derive(Debug, Clone)]
pub struct TailProbeReport {
    pub rho: f64,
    pub inside_tiles: usize,
    pub rows: Vec<TailRow>,
    /// Fitted log-log slope of `ratio` against `t rho`.
    pub slope: f64,
    /// Fitted log-log slope of `ratio_l2` against `t rho`.
    pub slope_l2: f64,
    /// Exact supremum of the `psi^{3 omega}` ratio, the same for every `t`:
    /// the numerator only sees `f^` on `2 omega`, and `f^` restricted to the
    /// support of `psi^{3 omega}` can be prescribed freely by `f` supported
    /// off `tI` (a polynomial with `K` consecutive frequencies has fewer than
    /// `K` zeros). Attaining it takes `||f|| / ||psi^{3 omega} * f||` growing
    /// rapidly in `t`, which the ascent does not reach.
    pub sup_exact: f64,
}

struct Problem<'a> {
    n: usize,
    family: &'a TileFamily,
    inside: std::ops::Range<usize>,
    /// `psi^{3 omega}^2` in FFT order.
    smooth_sq: Vec<f64>,
    /// Samples allowed to carry mass.
    allowed: Vec<bool>,
}

impl Problem<'_> {
    /// `(numerator, denominator, A f, B f)`.
    fn eval(&self, f: &TorusSignal) -> (f64, f64, Spectrum, Spectrum) {
        let spec = dft(f);
        let c = self.family.coefficients(&spec);
        let mut masked = vec![ZERO; c.len()];
        let mut num = 0.0;
        for j in self.inside.clone() {
            masked[j] = c[j];
            num += c[j].norm_sqr();
        }
        let af = self.family.synthesize(self.n, &masked);
        let bf: Vec<C64> = spec.fft_order().iter().zip(&self.smooth_sq).map(|(z, w)| z * w).collect();
        let den: f64 = spec.fft_order().iter().zip(&self.smooth_sq).map(|(z, w)| z.norm_sqr() * w).sum();
        (num, den, af, Spectrum::from_vec_unchecked(bf))
    }

    fn project(&self, v: Vec<C64>) -> TorusSignal {
        TorusSignal::from_vec_unchecked(v.into_iter().zip(&self.allowed).map(|(z, &a)| if a { z } else { ZERO }).collect())
    }

    fn ratio(&self, f: &TorusSignal) -> f64 {
        let (num, den, _, _) = self.eval(f);
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Normalized projected gradient ascent with backtracking; returns the best iterate.
    fn ascend(&self, start: TorusSignal, steps: usize) -> (f64, TorusSignal) {
        let mut f = normalize(start);
        let mut r = self.ratio(&f);
        let mut eta = 0.5;
        for _ in 0..steps {
            let (num, den, af, bf) = self.eval(&f);
            if den <= 0.0 {
                break;
            }
            let rr = num / den;
            let a = idft(&af);
            let b = idft(&bf);
            let grad: Vec<C64> = a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y * rr) / den).collect();
            let g = self.project(grad);
            let gn = l2(&g);
            if gn == 0.0 || !gn.is_finite() {
                break;
            }
            let mut improved = false;
            for _ in 0..30 {
                let cand = normalize(f.add(&g.scale(C64::new(eta / gn, 0.0))));
                let rc = self.ratio(&cand);
                if rc > r {
                    f = cand;
                    r = rc;
                    eta = (eta * 1.5).min(4.0);
                    improved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (r, f)
    }
}

fn l2(f: &TorusSignal) -> f64 {
    f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(f: TorusSignal) -> TorusSignal {
    let s = l2(&f);
    if s > 0.0 {
        f.scale(C64::new(1.0 / s, 0.0))
    } else {
        f
    }
}

/// Samples of the torus outside the concentric dilate `tI`.
pub fn outside_dilate(n: usize, i: DyadicInterval, t: f64) -> Vec<bool> {
    let half = t * i.len() / 2.0;
    let c = i.center();
    (0..n)
        .map(|j| {
            let x = j as f64 / n as f64;
            let d = (x - (c - half)).rem_euclid(1.0);
            d >= 2.0 * half
        })
        .collect()
}

/// Exact `sup_{supp f in S} sum_{s inside} |<f, phi_s>|^2 / ||f||^2`.
fn exact_l2_sup(p: &Problem) -> f64 {
    let packets: Vec<TorusSignal> = p.inside.clone().map(|j| p.family.packet(p.n, j)).collect();
    let r = packets.len();
    let g = DMatrix::from_fn(r, r, |a, b| {
        packets[a]
            .samples()
            .iter()
            .zip(packets[b].samples())
            .zip(&p.allowed)
            .filter(|(_, ok)| **ok)
            .map(|((x, y), _)| y * x.conj())
            .sum::<C64>()
            / p.n as f64
    });
    SymmetricEigen::new(g).eigenvalues.iter().cloned().fold(0.0, f64::max)
}

pub fn tail_decay_probe(n: usize, omega: FreqInterval, i: DyadicInterval, t_grid: &[f64], cfg: TailProbeConfig) -> Result<TailProbeReport> {
    let family = TileFamily::adapted(n, omega)?;
    i.check_fits(n)?;
    let rho = i.len() * omega.width() as f64;
    if !(rho > 1.0) {
        return Err(LabError::InvalidParameter(format!("rho = |I||omega| must exceed 1, got {rho}")));
    }
    if i.level > family.level {
        return Err(LabError::InvalidParameter("I is shorter than the tiles of omega".into()));
    }
    let shift = family.level - i.level;
    let inside = (i.offset as usize) << shift..((i.offset as usize) + 1) << shift;
    let smooth = Window::scaled(n, omega, 3.0, 6.0)?;
    let mut smooth_sq = vec![0.0; n];
    for k in smooth.active() {
        smooth_sq[freq_slot(k, n)] = smooth.at(k).powi(2);
    }
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for &t in &ts {
        if !(t >= 1.0) || t * i.len() >= 1.0 {
            return Err(LabError::InvalidParameter(format!("t = {t} must satisfy 1 <= t < 1/|I|")));
        }
    }
    let mut rows = Vec::new();
    let mut carry: Option<TorusSignal> = None;
    for (ti, &t) in ts.iter().enumerate() {
        let p = Problem { n, family: &family, inside: inside.clone(), smooth_sq: smooth_sq.clone(), allowed: outside_dilate(n, i, t) };
        let mut starts: Vec<TorusSignal> = (0..cfg.starts)
            .map(|s| p.project(gaussian_signal(&mut trial_rng(cfg.seed, (ti * cfg.starts + s) as u64), n).into_samples()))
            .collect();
        if let Some(prev) = carry.take() {
            starts.push(prev);
        }
        let results: Vec<(f64, TorusSignal)> = starts.into_par_iter().map(|s| p.ascend(s, cfg.steps)).collect();
        let (best, witness) = results
            .into_iter()
            .fold((f64::NEG_INFINITY, None), |(b, w), (r, f)| if r > b { (r, Some(f)) } else { (b, w) });
        carry = witness;
        rows.push(TailRow { t, t_rho: t * rho, ratio: best.max(0.0), ratio_l2: exact_l2_sup(&p) });
    }
    rows.reverse();
    let xs: Vec<f64> = rows.iter().map(|r| r.t_rho).collect();
    let slope = loglog_slope(&xs, &rows.iter().map(|r| r.ratio).collect::<Vec<_>>());
    let slope_l2 = loglog_slope(&xs, &rows.iter().map(|r| r.ratio_l2).collect::<Vec<_>>());
    let full = Problem { n, family: &family, inside: inside.clone(), smooth_sq, allowed: vec![true; n] };
    let sup_exact = exact_l2_sup(&full);
    Ok(TailProbeReport { rho, inside_tiles: inside.len(), rows, slope, slope_l2, sup_exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excluded_region_is_concentric() {
        let i = DyadicInterval::new(3, 2).unwrap(); // [1/4, 3/8)
        let ok = outside_dilate(64, i, 2.0); // excludes [1/4 - 1/16, 3/8 + 1/16)
        for j in 0..64 {
            let inside = (12..28).contains(&j);
            assert_eq!(ok[j], !inside, "sample {j}");
        }
    }

    #[test]
    fn estimates_are_monotone_in_t() {
        let cfg = TailProbeConfig { starts: 3, steps: 20, seed: 1 };
        let r = tail_decay_probe(512, FreqInterval::new(16, 32).unwrap(), DyadicInterval::new(3, 0).unwrap(), &[1.5, 2.0, 3.0, 4.0], cfg).unwrap();
        assert!(r.rows[0].ratio <= r.sup_exact * (1.0 + 1e-9));
        for w in r.rows.windows(2) {
            assert!(w[1].ratio <= w[0].ratio);
            assert!(w[1].ratio_l2 <= w[0].ratio_l2 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn smooth_window_is_flat_on_the_packet_band() {
        for w in [5, 16, 33, 64] {
            let omega = FreqInterval::new(40, 40 + w).unwrap();
            let fam = TileFamily::adapted(1024, omega).unwrap();
            let psi = Window::scaled(1024, omega, 3.0, 6.0).unwrap();
            for (k, v) in fam.band.iter() {
                if v != 0.0 {
                    assert_eq!(psi.at(k), 1.0, "w = {w}, k = {k}");
                }
            }
        }
    }
}
