//! Fourier projections, the Hilbert transform, rough and smooth square
//! functions, and the random-sign kernel / G-function demonstration.

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{dft, freq_slot, idft, lp_norm, lp_norm_real, FreqInterval, IntervalCollection, Spectrum, TorusSignal, C64};
use crate::rng::{random_sign, trial_rng};
use crate::well::overlap_bound;
use crate::window::{make_window, Window};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `S_omega f`: the spectrum of `f` restricted to `omega`.
pub fn project(f: &TorusSignal, omega: FreqInterval) -> Result<TorusSignal> {
    let n = f.len();
    omega.check_range(n)?;
    let spec = dft(f);
    let mut out = Spectrum::zeros(n)?;
    for k in omega.iter() {
        out.set(k, spec.get(k));
    }
    Ok(idft(&out))
}

/// Multiplier `-i sign(k)`, zero at `k = 0` and at the unpaired `k = -n/2`.
pub fn hilbert(f: &TorusSignal) -> TorusSignal {
    let n = f.len();
    let h = (n / 2) as i64;
    let mut spec = dft(f);
    for (i, z) in spec.fft_order_mut().iter_mut().enumerate() {
        let k = crate::grid::slot_freq(i, n);
        *z = if k == 0 || k == -h {
            ZERO
        } else if k > 0 {
            *z * C64::new(0.0, -1.0)
        } else {
            *z * C64::new(0.0, 1.0)
        };
    }
    idft(&spec)
}

/// Twiddles `e^{2 pi i j / n}`.
fn twiddles(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect()
}

/// Adds `|sum_{k in band} a_k e^{2 pi i k x_j}|^2` into `acc` for every sample.
/// `coeffs[m]` is the coefficient at frequency `lo + m`.
fn accumulate_band(acc: &mut [f64], lo: i64, coeffs: &[C64], tw: &[C64]) {
    let n = acc.len();
    match coeffs.len() {
        0 => {}
        1 => {
            let e = coeffs[0].norm_sqr();
            acc.iter_mut().for_each(|a| *a += e);
        }
        w if w <= 16 => {
            // demodulate by e^{2 pi i lo x}; it does not change the modulus
            for (j, a) in acc.iter_mut().enumerate() {
                let mut s = ZERO;
                for (m, c) in coeffs.iter().enumerate() {
                    s += c * tw[(m * j) % n];
                }
                *a += s.norm_sqr();
            }
        }
        _ => {
            let mut buf = vec![ZERO; n];
            for (m, c) in coeffs.iter().enumerate() {
                buf[freq_slot(lo + m as i64, n)] = *c;
            }
            crate::grid::ifft_in_place(&mut buf);
            for (a, z) in acc.iter_mut().zip(&buf) {
                *a += z.norm_sqr();
            }
        }
    }
}

const CHUNK: usize = 16;

/// `(sum_b |band_b|^2)^{1/2}` with bands reduced in fixed chunk order.
fn square_of_bands(n: usize, bands: &[(i64, Vec<C64>)]) -> Vec<f64> {
    let tw = twiddles(n);
    let partials: Vec<Vec<f64>> = bands
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            for (lo, c) in chunk {
                accumulate_band(&mut acc, *lo, c, &tw);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total.into_iter().map(f64::sqrt).collect()
}

/// `S^Omega f = (sum_omega |S_omega f|^2)^{1/2}`.
pub fn square_sharp(f: &TorusSignal, omega: &IntervalCollection) -> Result<TorusSignal> {
    let n = f.len();
    omega.check_range(n)?;
    let spec = dft(f);
    let bands: Vec<(i64, Vec<C64>)> = omega
        .intervals()
        .iter()
        .map(|w| (w.lo, w.iter().map(|k| spec.get(k)).collect()))
        .collect();
    Ok(real_signal(square_of_bands(n, &bands)))
}

fn real_signal(v: Vec<f64>) -> TorusSignal {
    TorusSignal::from_vec_unchecked(v.into_iter().map(|x| C64::new(x, 0.0)).collect())
}

/// Smooth square function and its frequency-overlap constant.
#[derive(Debug, Clone)]
pub struct SmoothSquare {
    pub values: TorusSignal,
    /// `sup_k sum_omega phi^omega(k)^2`, the sharp L2 bound for `G^Omega`.
    pub overlap_constant: f64,
    /// `|| sum 1_{3 omega} ||_inf` of the collection.
    pub overlap_bound: u64,
    /// Whether the collection passed the well-distributedness test.
    pub well_distributed: bool,
}

/// Windows `phi^omega` adapted to each `omega` (plateau `omega`, support `2 omega`).
pub fn adapted_windows(n: usize, omega: &IntervalCollection) -> Result<Vec<Window>> {
    omega.intervals().iter().map(|&w| Window::adapted(n, w)).collect()
}

/// `G^Omega f = (sum_omega |phi^omega * f|^2)^{1/2}`. Collections that fail
/// the well-distributedness test are still evaluated; the report records it.
pub fn square_smooth(f: &TorusSignal, omega: &IntervalCollection) -> Result<SmoothSquare> {
    let n = f.len();
    omega.check_range(n)?;
    let windows = adapted_windows(n, omega)?;
    let spec = dft(f);
    let bands: Vec<(i64, Vec<C64>)> = windows
        .iter()
        .map(|w| {
            let r = w.active();
            (r.start, r.map(|k| spec.get(k) * w.at(k)).collect())
        })
        .collect();
    let values = real_signal(square_of_bands(n, &bands));
    let mut density = vec![0.0; n];
    for w in &windows {
        for k in w.active() {
            density[freq_slot(k, n)] += w.at(k) * w.at(k);
        }
    }
    let overlap_constant = density.into_iter().fold(0.0, f64::max);
    let ob = overlap_bound(omega, n);
    Ok(SmoothSquare { values, overlap_constant, overlap_bound: ob, well_distributed: ob <= 100 })
}

/// Random-sign kernel windows `psi_{j, +}` (plateau `[2^j, 2^{j+1}]`, support
/// `(2^{j-1}, 5 * 2^{j-1})`) and their mirror images `psi_{j, -}`, for every
/// scale whose support fits in the frequency range.
pub fn dyadic_kernel_windows(n: usize) -> Result<Vec<Window>> {
    let h = (n / 2) as i64;
    let mut out = Vec::new();
    let mut j = 0u32;
    loop {
        let a = 1i64 << j;
        let s_lo = a / 2;
        let s_hi = (5 * a + 1) / 2;
        if s_hi > h {
            break;
        }
        out.push(make_window(n, FreqInterval { lo: a, hi: 2 * a }, FreqInterval { lo: s_lo, hi: s_hi })?);
        out.push(make_window(n, FreqInterval { lo: -2 * a, hi: -a }, FreqInterval { lo: -s_hi, hi: -s_lo })?);
        j += 1;
    }
    Ok(out)
}

/// `K^ = sum eps_{j, sigma} psi^_{j, sigma}` in FFT order.
pub fn khintchine_kernel(windows: &[Window], signs: &[f64]) -> Vec<C64> {
    let n = windows.first().map_or(0, |w| w.len());
    let mut hat = vec![ZERO; n];
    for (w, s) in windows.iter().zip(signs) {
        for k in w.active() {
            hat[freq_slot(k, n)] += C64::new(s * w.at(k), 0.0);
        }
    }
    hat
}

#[derive(Debug, Clone)]
pub struct KhintchineReport {
    pub exponents: Vec<f64>,
    /// Per trial, `||K * f||_p / ||f||_p` for each exponent.
    pub trial_ratios: Vec<Vec<f64>>,
    /// Per exponent, max over trials.
    pub max_ratio: Vec<f64>,
    /// Per exponent, min over trials.
    pub min_ratio: Vec<f64>,
    /// Per exponent, `||G f||_p / ||f||_p` for the dyadic G-function.
    pub gfunction_ratio: Vec<f64>,
    pub scales: usize,
}

pub const KHINTCHINE_EXPONENTS: [f64; 3] = [2.0, 3.0, 4.0];

/// Applies random-sign kernels `K * f` over `trials` sign draws.
pub fn khintchine_gfunction(f: &TorusSignal, trials: usize, seed: u64) -> Result<KhintchineReport> {
    if trials == 0 {
        return Err(crate::error::LabError::InvalidParameter("trials must be >= 1".into()));
    }
    let n = f.len();
    let windows = dyadic_kernel_windows(n)?;
    let spec = dft(f);
    let norms: Vec<f64> = KHINTCHINE_EXPONENTS.iter().map(|&p| lp_norm(f, p)).collect::<Result<_>>()?;
    let trial_ratios: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let signs: Vec<f64> = windows.iter().map(|_| random_sign(&mut rng)).collect();
            let hat = khintchine_kernel(&windows, &signs);
            let g = idft(&spec.multiply(&hat));
            KHINTCHINE_EXPONENTS
                .iter()
                .zip(&norms)
                .map(|(&p, nf)| ratio(lp_norm(&g, p).unwrap_or(0.0), *nf))
                .collect()
        })
        .collect();
    let pick = |i: usize, init: f64, op: fn(f64, f64) -> f64| trial_ratios.iter().map(|r| r[i]).fold(init, op);
    let max_ratio = (0..KHINTCHINE_EXPONENTS.len()).map(|i| pick(i, 0.0, f64::max)).collect();
    let min_ratio = (0..KHINTCHINE_EXPONENTS.len()).map(|i| pick(i, f64::INFINITY, f64::min)).collect();
    let bands: Vec<(i64, Vec<C64>)> = windows
        .iter()
        .map(|w| {
            let r = w.active();
            (r.start, r.map(|k| spec.get(k) * w.at(k)).collect())
        })
        .collect();
    let gf = square_of_bands(n, &bands);
    let gfunction_ratio = KHINTCHINE_EXPONENTS
        .iter()
        .zip(&norms)
        .map(|(&p, nf)| Ok(ratio(lp_norm_real(&gf, p)?, *nf)))
        .collect::<Result<_>>()?;
    Ok(KhintchineReport {
        exponents: KHINTCHINE_EXPONENTS.to_vec(),
        trial_ratios,
        max_ratio,
        min_ratio,
        gfunction_ratio,
        scales: windows.len() / 2,
    })
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::gaussian_signal;

    fn fi(lo: i64, hi: i64) -> FreqInterval {
        FreqInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn full_projection_is_identity() {
        let f = gaussian_signal(&mut trial_rng(1, 0), 64);
        let g = project(&f, FreqInterval::full(64)).unwrap();
        assert!(g.max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn projection_restricts_flat_band() {
        let spec = Spectrum::from_fn(64, |k| if (-8..8).contains(&k) { C64::new(1.0, 0.0) } else { ZERO }).unwrap();
        let f = idft(&spec);
        let g = dft(&project(&f, fi(0, 4)).unwrap());
        for (k, v) in g.centered() {
            let expect = if (0..4).contains(&k) { 1.0 } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-14);
        }
        assert!(project(&f, fi(0, 40)).is_err());
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let tau = 2.0 * std::f64::consts::PI;
        let f = TorusSignal::from_fn(64, |x| C64::new((tau * x).cos(), 0.0)).unwrap();
        let g = TorusSignal::from_fn(64, |x| C64::new((tau * x).sin(), 0.0)).unwrap();
        assert!(hilbert(&f).max_abs_diff(&g) < 1e-12);
        let c = TorusSignal::constant(64, C64::new(2.0, 0.0)).unwrap();
        assert!(hilbert(&c).abs().iter().all(|v| *v < 1e-14));
    }

    #[test]
    fn sharp_square_with_single_full_interval_is_modulus() {
        let f = gaussian_signal(&mut trial_rng(2, 0), 128);
        let omega = IntervalCollection::new(vec![FreqInterval::full(128)]).unwrap();
        let s = square_sharp(&f, &omega).unwrap();
        for (a, b) in s.samples().iter().zip(f.samples()) {
            assert!((a.re - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn all_band_paths_agree() {
        // widths 1, 5 (direct sum) and 40 (FFT) all give the same square function
        let n = 256;
        let f = gaussian_signal(&mut trial_rng(3, 0), n);
        let omega = IntervalCollection::new(vec![fi(-30, -29), fi(-20, -15), fi(0, 40)]).unwrap();
        let s = square_sharp(&f, &omega).unwrap();
        let mut acc = vec![0.0; n];
        for w in omega.intervals() {
            let g = project(&f, *w).unwrap();
            for (a, z) in acc.iter_mut().zip(g.samples()) {
                *a += z.norm_sqr();
            }
        }
        for (a, b) in s.samples().iter().zip(&acc) {
            assert!((a.re - b.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_square_vanishes_off_tripled_intervals() {
        let n = 256;
        let omega = IntervalCollection::new(vec![fi(10, 18), fi(40, 48)]).unwrap();
        let spec = Spectrum::from_fn(n, |k| if (70..90).contains(&k) { C64::new(1.0, 0.5) } else { ZERO }).unwrap();
        let g = square_smooth(&idft(&spec), &omega).unwrap();
        assert!(g.values.abs().iter().all(|v| *v < 1e-15));
        assert!(g.well_distributed);
        assert!(g.overlap_constant <= 1.0 + 1e-15);
    }

    #[test]
    fn kernel_windows_mirror() {
        let ws = dyadic_kernel_windows(256).unwrap();
        for pair in ws.chunks(2) {
            for k in -128..128 {
                assert_eq!(pair[0].at(k), pair[1].at(-k));
            }
        }
    }

    #[test]
    fn kernel_on_pure_frequency() {
        let n = 256;
        let k0 = 12;
        let f = TorusSignal::from_fn(n, |x| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k0 as f64 * x)).unwrap();
        let r = khintchine_gfunction(&f, 4, 9).unwrap();
        let ws = dyadic_kernel_windows(n).unwrap();
        let gf: f64 = ws.iter().map(|w| w.at(k0).powi(2)).sum::<f64>().sqrt();
        for g in &r.gfunction_ratio {
            assert!((g - gf).abs() < 1e-12);
        }
    }
}
