use lp_tile_core::grid::translate;
use lp_tile_core::multiplier::{lacunary_blocks, lacunary_vq};
use lp_tile_core::projections::square_sharp;
use lp_tile_core::variation::{block_step_norm, martingale_decompose, VariationProfile};
use lp_tile_core::{apply_multiplier, dft, idft, lp_norm, var_q, vq_norm, IntervalCollection, Multiplier, Spectrum, StepMultiplier, TorusSignal, C64};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| C64::new(a, b))
}

fn signal(n: usize) -> impl Strategy<Value = TorusSignal> {
    prop::collection::vec(complex(), n).prop_map(|v| TorusSignal::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_round_trip_and_plancherel(f in signal(64)) {
        let s = dft(&f);
        prop_assert!(idft(&s).max_abs_diff(&f) < 1e-12);
        let e: f64 = s.fft_order().iter().map(|z| z.norm_sqr()).sum();
        let l2 = lp_norm(&f, 2.0).unwrap();
        prop_assert!((e - l2 * l2).abs() < 1e-12 * e.max(1.0));
    }

    #[test]
    fn full_partition_square_function_is_isometric(f in signal(128), widths in prop::collection::vec(1i64..40, 1..40)) {
        let omega = IntervalCollection::partition_by_widths(128, widths.into_iter().cycle().take(200));
        prop_assume!(omega.is_full_partition(128));
        let s = square_sharp(&f, &omega).unwrap();
        let (a, b) = (lp_norm(&s, 2.0).unwrap(), lp_norm(&f, 2.0).unwrap());
        prop_assert!((a - b).abs() < 1e-12 * b.max(1.0));
    }

    #[test]
    fn var_q_is_nonincreasing_in_q(m in prop::collection::vec(complex(), 1..30), q in 0.5f64..6.0, dq in 0.0f64..3.0) {
        let a = var_q(&m, q).unwrap();
        let b = var_q(&m, q + dq).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12) + 1e-15);
        prop_assert!(vq_norm(&m, q).unwrap() >= a);
    }

    #[test]
    fn var_q_ignores_how_samples_are_spaced(vals in prop::collection::vec(complex(), 1..20), gaps in prop::collection::vec(1i64..9, 20), q in 1.0f64..4.0) {
        // same values on two different strictly increasing sets of breakpoints
        let n = vals.len();
        let tight = StepMultiplier::new((0..n as i64).collect(), vals.clone(), n as i64).unwrap();
        let mut bps = vec![-100i64];
        for g in gaps.iter().take(n - 1) {
            bps.push(bps.last().unwrap() + g);
        }
        let spread = StepMultiplier::new(bps.clone(), vals.clone(), bps.last().unwrap() + 1).unwrap();
        let a = lp_tile_core::variation::step_var_q(&tight, q).unwrap();
        let b = lp_tile_core::variation::step_var_q(&spread, q).unwrap();
        prop_assert_eq!(a, b);
        // sampling the spread step function densely gives the same variation
        let dense: Vec<C64> = (bps[0]..*bps.last().unwrap() + 1).map(|k| spread.at(k)).collect();
        prop_assert!((var_q(&dense, q).unwrap() - a).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn profile_is_monotone_and_ends_at_variation(m in prop::collection::vec(complex(), 1..40), q in 0.5f64..4.0) {
        let p = VariationProfile::new(&m, q).unwrap();
        prop_assert_eq!(p.mu[0], 0.0);
        prop_assert!(p.mu.windows(2).all(|w| w[0] <= w[1]));
        let v = var_q(&m, q).unwrap().powf(q);
        prop_assert!((p.total() - v).abs() <= 1e-12 * v.max(1.0));
    }

    #[test]
    fn martingale_cells_nest_count_and_average(m in prop::collection::vec(complex(), 1..80), q in 1.0f64..4.0, j_max in 0u32..9) {
        let d = martingale_decompose(&m, q, j_max).unwrap();
        let mut partial = vec![C64::new(0.0, 0.0); m.len()];
        for (j, l) in d.levels.iter().enumerate() {
            prop_assert!(l.cells.len() <= 1 << j);
            prop_assert_eq!(l.cells.first().unwrap().start, 0);
            prop_assert_eq!(l.cells.last().unwrap().end, m.len());
            if j > 0 {
                let coarse = &d.levels[j - 1].cells;
                for c in &l.cells {
                    prop_assert!(coarse.iter().any(|p| p.start <= c.start && c.end <= p.end));
                }
            }
            for (a, b) in partial.iter_mut().zip(&l.piece) {
                *a += b;
            }
            // partial sums are the cell averages at level j
            for c in &l.cells {
                let mean = m[c.clone()].iter().sum::<C64>() / c.len() as f64;
                for i in c.clone() {
                    prop_assert!((partial[i] - mean).norm() <= 1e-10 * (1.0 + mean.norm()));
                }
            }
            prop_assert!(l.sup <= 2f64.powf(-((j.max(1) - 1) as f64) / q) * (1.0 + 1e-12));
        }
        prop_assert!(d.constant <= 2.0 + 1e-12);
    }

    #[test]
    fn block_norm_never_drops_under_refinement(vals in prop::collection::vec(complex(), 1..12), cuts in prop::collection::vec(-60i64..60, 0..20), q in 0.5f64..5.0) {
        let bps: Vec<i64> = (0..vals.len() as i64).map(|i| -60 + 10 * i).collect();
        let m = StepMultiplier::new(bps, vals, 60).unwrap();
        let r = m.refine(&cuts);
        prop_assert!(block_step_norm(&r, q).unwrap() >= block_step_norm(&m, q).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn multipliers_are_linear_and_translation_invariant(f in signal(64), g in signal(64), a in complex(), vals in prop::collection::vec(complex(), 64), y in -64i64..64) {
        let m = Multiplier::from_fft_order(vals).unwrap();
        let lhs = apply_multiplier(&f.add(&g.scale(a)), &m).unwrap();
        let rhs = apply_multiplier(&f, &m).unwrap().add(&apply_multiplier(&g, &m).unwrap().scale(a));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let t1 = apply_multiplier(&translate(&f, y), &m).unwrap();
        let t2 = translate(&apply_multiplier(&f, &m).unwrap(), y);
        prop_assert!(t1.max_abs_diff(&t2) < 1e-10);
    }

    #[test]
    fn lacunary_bound_is_unchanged_by_modulating_each_block(vals in prop::collection::vec(complex(), 256), phases in prop::collection::vec(0.0f64..6.3, 16), q in 1.0f64..4.0) {
        let n = 256;
        let m = Multiplier::from_fft_order(vals).unwrap();
        let blocks = lacunary_blocks(n).unwrap();
        // a unimodular constant per block leaves V_q of every block unchanged
        let rotated = Multiplier::from_fn(n, |k| {
            let b = blocks.iter().position(|b| b.contains(k)).unwrap();
            m.at(k) * C64::from_polar(1.0, phases[b % phases.len()])
        }).unwrap();
        let a = lacunary_vq(&m, q).unwrap();
        let b = lacunary_vq(&rotated, q).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.1 - y.1).abs() <= 1e-12 * x.1.max(1.0));
        }
    }

    #[test]
    fn p_two_norm_is_the_sup(vals in prop::collection::vec(complex(), 32)) {
        let m = Multiplier::from_fft_order(vals).unwrap();
        let e = lp_tile_core::op_norm_p(&m, 2.0, Default::default()).unwrap();
        prop_assert_eq!(e.value, m.sup());
        let out = apply_multiplier(&e.witness, &m).unwrap();
        let r = lp_norm(&out, 2.0).unwrap() / lp_norm(&e.witness, 2.0).unwrap();
        prop_assert!((r - e.value).abs() <= 1e-12 * e.value.max(1.0));
    }
}

#[test]
fn zero_spectrum_stays_zero() {
    let s = Spectrum::zeros(16).unwrap();
    assert!(idft(&s).samples().iter().all(|z| z.norm() == 0.0));
}
