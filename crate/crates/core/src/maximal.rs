//! Centered discrete Hardy–Littlewood maximal function (1D) and the
//! strong maximal function over axis-parallel centered rectangles (2D).
//!
//! Windows are centered at the evaluation point with radii `0..=len/2`; a
//! radius whose window would wrap onto itself is truncated to the whole
//! circle. Radius 0 is the point itself, so `Mf >= |f|`.

use crate::grid::TorusSignal;
use crate::signal2::Signal2;

fn cyclic_prefix(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut pre = vec![0.0; 3 * n + 1];
    for i in 0..3 * n {
        pre[i + 1] = pre[i] + values[i % n];
    }
    pre
}

/// Maximal function of nonnegative data on a cycle of any length.
pub fn maximal_real(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let pre = cyclic_prefix(values);
    (0..n)
        .map(|j| {
            let mut best = values[j];
            for r in 1..=n / 2 {
                let count = (2 * r + 1).min(n);
                let start = j + n - r;
                let avg = (pre[start + count] - pre[start]) / count as f64;
                if avg > best {
                    best = avg;
                }
            }
            best
        })
        .collect()
}

/// `Mf` for a torus signal, applied to `|f|`.
pub fn maximal(f: &TorusSignal) -> Vec<f64> {
    maximal_real(&f.abs())
}

/// Strong maximal function of nonnegative data on an `n1 x n2` torus
/// (row-major, `values[i1 * n2 + i2]`).
pub fn strong_maximal_real(values: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    assert_eq!(values.len(), n1 * n2);
    // Prefix sums over the tripled torus.
    let (m1, m2) = (3 * n1, 3 * n2);
    let mut pre = vec![0.0; (m1 + 1) * (m2 + 1)];
    let at = |a: usize, b: usize| a * (m2 + 1) + b;
    for a in 0..m1 {
        let mut row = 0.0;
        for b in 0..m2 {
            row += values[(a % n1) * n2 + b % n2];
            pre[at(a + 1, b + 1)] = pre[at(a, b + 1)] + row;
        }
    }
    let rect = |a0: usize, b0: usize, ca: usize, cb: usize| {
        pre[at(a0 + ca, b0 + cb)] - pre[at(a0, b0 + cb)] - pre[at(a0 + ca, b0)] + pre[at(a0, b0)]
    };
    let mut out = vec![0.0; n1 * n2];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let mut best = values[i1 * n2 + i2];
            for r1 in 0..=n1 / 2 {
                let c1 = (2 * r1 + 1).min(n1);
                let a0 = i1 + n1 - r1;
                for r2 in 0..=n2 / 2 {
                    let c2 = (2 * r2 + 1).min(n2);
                    let b0 = i2 + n2 - r2;
                    let avg = rect(a0, b0, c1, c2) / (c1 * c2) as f64;
                    if avg > best {
                        best = avg;
                    }
                }
            }
            out[i1 * n2 + i2] = best;
        }
    }
    out
}

/// Uncentered strong maximal function on a (non-periodic) `n1 x n2` cell
/// grid: the sup of averages over all axis-parallel cell rectangles
/// containing each cell. Intended for small grids.
pub fn strong_maximal_uncentered(values: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    assert_eq!(values.len(), n1 * n2);
    let mut pre = vec![0.0; (n1 + 1) * (n2 + 1)];
    let at = |a: usize, b: usize| a * (n2 + 1) + b;
    for a in 0..n1 {
        let mut row = 0.0;
        for b in 0..n2 {
            row += values[a * n2 + b];
            pre[at(a + 1, b + 1)] = pre[at(a, b + 1)] + row;
        }
    }
    let mut out = values.to_vec();
    for a0 in 0..n1 {
        for a1 in a0 + 1..=n1 {
            for b0 in 0..n2 {
                for b1 in b0 + 1..=n2 {
                    let s = pre[at(a1, b1)] - pre[at(a0, b1)] - pre[at(a1, b0)] + pre[at(a0, b0)];
                    let avg = s / ((a1 - a0) * (b1 - b0)) as f64;
                    for a in a0..a1 {
                        for v in &mut out[a * n2 + b0..a * n2 + b1] {
                            if avg > *v {
                                *v = avg;
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn strong_maximal(f: &Signal2) -> Vec<f64> {
    strong_maximal_real(&f.abs(), f.n1(), f.n2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::C64;

    fn brute(values: &[f64], j: usize) -> f64 {
        let n = values.len();
        let mut best = 0.0f64;
        for r in 0..=n / 2 {
            let c = (2 * r + 1).min(n);
            let s: f64 = (0..c).map(|t| values[(j + n - r + t) % n]).sum();
            best = best.max(s / c as f64);
        }
        best
    }

    #[test]
    fn constant_is_fixed() {
        let f = TorusSignal::constant(32, C64::new(-3.0, 4.0)).unwrap();
        assert!(maximal(&f).iter().all(|v| (v - 5.0).abs() < 1e-12));
    }

    #[test]
    fn spike_attains_one_at_origin() {
        let f = TorusSignal::indicator(64, 0, 1).unwrap();
        let m = maximal(&f);
        assert_eq!(m[0], 1.0);
        // two samples away the best window has radius 2: 1/5
        assert!((m[2] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn quarter_indicator_matches_window_search() {
        let n = 64;
        let f = TorusSignal::indicator(n, 0, n / 4).unwrap();
        let m = maximal(&f);
        let vals = f.abs();
        assert!((m[n / 2] - brute(&vals, n / 2)).abs() < 1e-15);
    }

    #[test]
    fn strong_maximal_of_constant() {
        let v = vec![2.5; 8 * 4];
        assert!(strong_maximal_real(&v, 8, 4).iter().all(|x| (x - 2.5).abs() < 1e-12));
    }

    #[test]
    fn strong_maximal_dominates_and_matches_brute() {
        let (n1, n2) = (8, 8);
        let v: Vec<f64> = (0..n1 * n2).map(|i| ((i * 37 % 11) as f64).powi(2)).collect();
        let m = strong_maximal_real(&v, n1, n2);
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                let mut best = 0.0f64;
                for r1 in 0..=n1 / 2 {
                    for r2 in 0..=n2 / 2 {
                        let (c1, c2) = ((2 * r1 + 1).min(n1), (2 * r2 + 1).min(n2));
                        let mut s = 0.0;
                        for a in 0..c1 {
                            for b in 0..c2 {
                                s += v[((i1 + n1 - r1 + a) % n1) * n2 + (i2 + n2 - r2 + b) % n2];
                            }
                        }
                        best = best.max(s / (c1 * c2) as f64);
                    }
                }
                assert!((m[i1 * n2 + i2] - best).abs() < 1e-9);
                assert!(m[i1 * n2 + i2] >= v[i1 * n2 + i2]);
            }
        }
    }
}
