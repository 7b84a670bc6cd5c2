use lp_tile_core::multiplier::{random_crs_multiplier, CrsFamily};
use lp_tile_core::rng::{gaussian_signal, trial_rng};
use lp_tile_core::{apply_multiplier, lp_norm, op_norm_p, Multiplier, NormConfig, C64};
use rayon::prelude::*;

fn sign_multiplier(n: usize) -> Multiplier {
    let h = (n / 2) as i64;
    Multiplier::from_fn(n, |k| if k == 0 || k == -h { C64::new(0.0, 0.0) } else { C64::new(k.signum() as f64, 0.0) }).unwrap()
}

/// Best ratio over independent complex Gaussian inputs, no optimization.
fn gaussian_trials(m: &Multiplier, p: f64, trials: usize, seed: u64) -> f64 {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let f = gaussian_signal(&mut trial_rng(seed, t as u64), m.len());
            lp_norm(&apply_multiplier(&f, m).unwrap(), p).unwrap() / lp_norm(&f, p).unwrap()
        })
        .reduce(|| 0.0, f64::max)
}

#[test]
fn sign_multiplier_estimate_dominates_random_search() {
    let n = 1024;
    let m = sign_multiplier(n);
    let est = op_norm_p(&m, 4.0, NormConfig::default()).unwrap();
    let mc = gaussian_trials(&m, 4.0, 10_000, 77);
    // Both are lower bounds for the same norm; the iteration may not fall 10% below random search.
    assert!(est.value >= 0.9 * mc, "iteration {} vs Monte Carlo {}", est.value, mc);
    // true norm is cot(pi/8) on the line
    assert!(est.value <= 1.0 / (std::f64::consts::PI / 8.0).tan() + 1e-9);
    let w = &est.witness;
    let r = lp_norm(&apply_multiplier(w, &m).unwrap(), 4.0).unwrap() / lp_norm(w, 4.0).unwrap();
    assert_eq!(r, est.value);
}

#[test]
fn estimates_at_dual_exponents_agree() {
    let cfg = NormConfig { restarts: 12, iters: 300, seed: 3, tol: 1e-10 };
    let mut cases = vec![("sign", sign_multiplier(256))];
    for (i, fam) in CrsFamily::ALL.iter().enumerate() {
        let s = random_crs_multiplier(&mut trial_rng(19, i as u64), 256, *fam).unwrap();
        cases.push((fam.name(), Multiplier::from_step(&s, 256).unwrap()));
    }
    for (name, m) in cases {
        for p in [3.0, 4.0] {
            let a = op_norm_p(&m, p, cfg).unwrap().value;
            let b = op_norm_p(&m, p / (p - 1.0), cfg).unwrap().value;
            let rel = (a - b).abs() / a.max(b);
            assert!(rel <= 0.15, "{name} p = {p}: {a} vs {b} ({rel:.3})");
        }
    }
}

#[test]
fn estimate_never_exceeds_the_trivial_upper_bound() {
    // Young: ||A_m||_p <= sum_x |K(x)| with K = A_m delta.
    let m = sign_multiplier(128);
    let mut kernel = vec![C64::new(0.0, 0.0); 128];
    kernel[0] = C64::new(1.0, 0.0);
    let k = apply_multiplier(&lp_tile_core::TorusSignal::new(kernel).unwrap(), &m).unwrap();
    let l1: f64 = k.samples().iter().map(|z| z.norm()).sum();
    for p in [1.5, 3.0, 6.0] {
        let e = op_norm_p(&m, p, NormConfig { restarts: 6, ..Default::default() }).unwrap();
        assert!(e.value <= l1 * (1.0 + 1e-12), "p = {p}: {} > {l1}", e.value);
        assert!(e.value >= 1.0 - 1e-9);
    }
}
