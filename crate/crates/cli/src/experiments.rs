//! The experiment registry. Each experiment reads its parameters, calls
//! [`Params::finish`] before doing any work, and returns one table plus a
//! summary object.

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use lp_tile_core::carleson::jn_battery;
use lp_tile_core::greedy::greedy_bmo_split;
use lp_tile_core::multiplier::{counterexample_multiplier, counterexample_rubio, crs_battery, decouple_check, BumpConfig};
use lp_tile_core::product_carleson::{product_jn_recursion, random_product_carleson};
use lp_tile_core::projections::square_sharp;
use lp_tile_core::rng::{gaussian_complex, gaussian_signal, trial_rng};
use lp_tile_core::sweep::{random_family, square_sweep2, OmegaFamily};
use lp_tile_core::tail::{tail_decay_probe, TailProbeConfig};
use lp_tile_core::tiles::{bessel_constant_circulant, bessel_constant_eigen, bessel_constant_power, bessel_slack, build_tiles, translation_average_check};
use lp_tile_core::variation::{martingale_decompose, var_q_2d, Var2Mode};
use lp_tile_core::well::{overlap_bound, refine, refine_detailed, WELL_DISTRIBUTED_LIMIT};
use lp_tile_core::{lp_norm, var_q, DyadicInterval, FreqInterval, NormConfig, TileFamily, C64};

use crate::config::Params;
use crate::report::{Cell, Outcome, Table};
use crate::CliError;

pub const NAMES: [&str; 12] = [
    "square-sweep",
    "well-distributed",
    "tiles-bessel",
    "tail-probe",
    "greedy-split",
    "carleson-jn",
    "product-jn",
    "varq",
    "martingale",
    "crs",
    "counterexample-rubio",
    "counterexample-multiplier",
];

/// Experiments whose `n` is a torus size, so `--n` applies.
pub fn uses_grid(name: &str) -> bool {
    !matches!(name, "carleson-jn" | "product-jn" | "varq")
}

pub fn run(name: &str, p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    match name {
        "square-sweep" => square_sweep_exp(p, seed),
        "well-distributed" => well_distributed(p, seed),
        "tiles-bessel" => tiles_bessel(p, seed),
        "tail-probe" => tail_probe(p, seed),
        "greedy-split" => greedy_split(p, seed),
        "carleson-jn" => carleson_jn(p, seed),
        "product-jn" => product_jn(p, seed),
        "varq" => varq(p, seed),
        "martingale" => martingale(p, seed),
        "crs" => crs(p, seed),
        "counterexample-rubio" => rubio(p),
        "counterexample-multiplier" => bump(p, seed),
        _ => Err(CliError::Usage(format!("unknown experiment {name:?}"))),
    }
}

fn at_least(key: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v < min {
        Err(CliError::Usage(format!("parameter {key} = {v}: must be at least {min}")))
    } else {
        Ok(v)
    }
}

/// Powers of two in `[lo, hi]`.
fn dyadic_range(lo: usize, hi: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut x = lo.next_power_of_two().max(1);
    while x <= hi {
        v.push(x);
        x *= 2;
    }
    v
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn square_sweep_exp(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let default_ns: Vec<usize> = [n / 8, n / 4, n / 2, n].into_iter().filter(|&m| m >= 8).collect();
    let ns = p.usizes("ns", &default_ns)?;
    let ps = p.f64s("p", &[2.0, 3.0, 4.0])?;
    let trials = at_least("trials", p.usize("trials", 20)?, 1)?;
    let ns2 = p.usizes("ns2", &[32, 64, 128])?;
    let trials2 = at_least("trials2", p.usize("trials2", 32)?, 1)?;
    p.finish()?;
    let r1 = lp_tile_core::sweep::square_sweep(&ns, &ps, trials, seed)?;
    let r2 = if ns2.is_empty() { None } else { Some(square_sweep2(&ns2, &ps, trials2, seed.wrapping_add(1))?) };
    let mut t = Table::new(&["dim", "n", "p", "family", "max_ratio"]);
    let mut slopes = Vec::new();
    for (dim, r) in std::iter::once((1u32, &r1)).chain(r2.iter().map(|r| (2u32, r))) {
        for row in &r.rows {
            t.push(vec![dim.into(), row.n.into(), row.p.into(), row.family.into(), row.max_ratio.into()]);
        }
        let sizes = if dim == 1 { ns.len() } else { ns2.len() };
        for s in r.slopes.iter().filter(|_| sizes >= 2) {
            slopes.push(json!({ "dim": dim, "p": s.p, "family": s.family, "slope": s.slope }));
        }
    }
    let mut out = Outcome::new(t);
    if ns.len() >= 2 {
        out.put("max_slope_1d", r1.max_slope);
    }
    if let Some(r) = r2.as_ref().filter(|_| ns2.len() >= 2) {
        out.put("max_slope_2d", r.max_slope);
    }
    out.put("slopes", Value::Array(slopes));
    Ok(out)
}

fn well_distributed(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let draws = at_least("draws", p.usize("draws", 4)?, 1)?;
    let samples = at_least("samples", p.usize("samples", 200)?, 1)?;
    let ps = p.f64s("p", &[2.0, 3.0, 4.0])?;
    p.finish()?;
    let mut t = Table::new(&[
        "family", "draw", "intervals", "refined", "pass_through", "lumped", "overlap", "overlap_refined", "p", "min_ratio", "max_ratio",
    ]);
    let mut max_overlap = 0u64;
    let mut bracket = vec![1.0f64; ps.len()];
    let mut idx = 0u64;
    for fam in OmegaFamily::ALL {
        // lacunary blocks and unit arcs do not depend on the draw
        let fam_draws = if matches!(fam, OmegaFamily::Lacunary | OmegaFamily::UnitArcs) { 1 } else { draws };
        for d in 0..fam_draws {
            idx += 1;
            let omega = random_family(&mut trial_rng(seed, idx), n, fam)?;
            let pieces = refine_detailed(&omega);
            let refined = refine(&omega);
            let pass = pieces.iter().flatten().filter(|w| w.pass_through).count();
            let lumped = pieces.iter().flatten().filter(|w| w.lumped).count();
            let (ob, ob2) = (overlap_bound(&omega, n), overlap_bound(&refined, n));
            max_overlap = max_overlap.max(ob2);
            let ratios: Vec<Vec<f64>> = (0..samples)
                .into_par_iter()
                .map(|s| {
                    let f = gaussian_signal(&mut trial_rng(seed ^ 0x5157_e11d, idx * samples as u64 + s as u64), n);
                    let a = square_sharp(&f, &refined)?;
                    let b = square_sharp(&f, &omega)?;
                    ps.iter().map(|&q| Ok(lp_norm(&a, q)? / lp_norm(&b, q)?)).collect()
                })
                .collect::<lp_tile_core::Result<_>>()?;
            for (pi, &q) in ps.iter().enumerate() {
                let lo = ratios.iter().map(|r| r[pi]).fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().map(|r| r[pi]).fold(0.0, f64::max);
                bracket[pi] = bracket[pi].max(hi).max(1.0 / lo);
                t.push(vec![
                    fam.name().into(),
                    d.into(),
                    omega.len().into(),
                    refined.len().into(),
                    pass.into(),
                    lumped.into(),
                    ob.into(),
                    ob2.into(),
                    q.into(),
                    lo.into(),
                    hi.into(),
                ]);
            }
        }
    }
    let mut out = Outcome::new(t);
    out.put("max_overlap_refined", max_overlap);
    out.put("well_distributed", max_overlap <= WELL_DISTRIBUTED_LIMIT);
    out.put("bracket", Value::Array(ps.iter().zip(&bracket).map(|(q, c)| json!({ "p": q, "constant": c })).collect()));
    Ok(out)
}

fn tiles_bessel(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let widths = p.usizes("widths", &[8, 16, 32, 64])?;
    let trials = at_least("trials", p.usize("trials", 500)?, 1)?;
    let power_iters = p.usize("power_iters", 20_000)?;
    p.finish()?;
    let mut t = Table::new(&["omega_lo", "omega_hi", "level", "tiles", "eigen", "circulant", "power", "min_slack", "translation"]);
    let (mut min_slack, mut max_tr, mut max_gap) = (f64::INFINITY, 0.0f64, 0.0f64);
    for (i, &w) in widths.iter().enumerate() {
        let w = w as i64;
        let q = (n / 4) as i64;
        if w < 1 || w > q {
            return Err(CliError::Usage(format!("width {w} must lie in 1..={q}")));
        }
        let mut rng = trial_rng(seed, i as u64);
        let lo = rng.random_range(-q..=q - w);
        let omega = FreqInterval::new(lo, lo + w)?;
        let fam = TileFamily::adapted(n, omega)?;
        let e = bessel_constant_eigen(&fam);
        let c = bessel_constant_circulant(&fam);
        let pw = bessel_constant_power(&fam, power_iters, seed.wrapping_add(i as u64));
        let slack = bessel_slack(n, &fam, trials, seed.wrapping_add(1000 + i as u64));
        let f = gaussian_signal(&mut rng, n);
        let tr = translation_average_check(&fam, &f);
        min_slack = min_slack.min(slack.min_relative_slack);
        max_tr = max_tr.max(tr);
        max_gap = max_gap.max((e - c).abs() / e).max((e - pw).abs() / e);
        t.push(vec![
            lo.into(),
            (lo + w).into(),
            fam.level.into(),
            fam.count().into(),
            e.into(),
            c.into(),
            pw.into(),
            slack.min_relative_slack.into(),
            tr.into(),
        ]);
    }
    let mut out = Outcome::new(t);
    if !widths.is_empty() {
        out.put("min_slack", min_slack);
        out.put("max_translation_discrepancy", max_tr);
        out.put("max_route_gap", max_gap);
    }
    Ok(out)
}

fn tail_probe(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let lo = p.i64("omega_lo", (100 * n / 4096) as i64)?;
    let hi = p.i64("omega_hi", lo + (n as i64 / 64).max(32))?;
    let omega = FreqInterval::new(lo, hi)?;
    let dual = lp_tile_core::tiles::dual_level(omega.width());
    let level = p.u32("level", dual.saturating_sub(2))?;
    let offset = p.usize("offset", 3.min((1usize << level) - 1))? as u64;
    let len = (-(level as f64)).exp2();
    let default_ts: Vec<f64> = [1.5, 2.0, 3.0, 4.0, 6.0, 8.0].into_iter().filter(|t| t * len < 1.0).collect();
    let ts = p.f64s("t", &default_ts)?;
    let starts = at_least("starts", p.usize("starts", 20)?, 1)?;
    let steps = p.usize("steps", 200)?;
    p.finish()?;
    let i = DyadicInterval::new(level, offset)?;
    let r = tail_decay_probe(n, omega, i, &ts, TailProbeConfig { starts, steps, seed })?;
    let mut t = Table::new(&["t", "t_rho", "ratio", "ratio_l2"]);
    for row in &r.rows {
        t.push(vec![row.t.into(), row.t_rho.into(), row.ratio.into(), row.ratio_l2.into()]);
    }
    let mut out = Outcome::new(t);
    out.put("rho", r.rho);
    out.put("inside_tiles", r.inside_tiles);
    if r.rows.len() >= 2 {
        out.put("slope", r.slope);
        out.put("slope_l2", r.slope_l2);
    }
    out.put("sup_exact", r.sup_exact);
    Ok(out)
}

fn greedy_split(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 512)?;
    let level = p.u32("f_level", 3)?;
    let offset = p.usize("f_offset", 2)? as u64;
    let exps = p.f64s("beta_exp", &[-6.0, -5.0, -4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0])?;
    let fam = p.choice("omega", &["random-partition", "lacunary", "sparse"], "random-partition")?;
    p.finish()?;
    let family = OmegaFamily::ALL.into_iter().find(|f| f.name() == fam).expect("listed family");
    let omega = random_family(&mut trial_rng(seed, 0), n, family)?;
    let tiles = build_tiles(n, &omega)?;
    let j = DyadicInterval::new(level, offset)?;
    j.check_fits(n)?;
    let span = j.samples(n);
    let f: Vec<bool> = (0..n).map(|x| span.contains(&x)).collect();
    let mut t = Table::new(&["beta", "big", "small", "js", "cm_initial", "cm_small", "invariant", "shadow", "shadow_ratio", "shadow_ceiling"]);
    let mut invariant = true;
    let mut active = Vec::new();
    for e in &exps {
        let beta = e.exp2();
        let s = greedy_bmo_split(&tiles, &f, beta)?;
        let ok = s.cm_small < beta / 4.0;
        invariant &= ok;
        if !s.big.is_empty() {
            active.push(s.shadow_ratio());
        }
        t.push(vec![
            beta.into(),
            s.big.len().into(),
            s.small.len().into(),
            s.js.len().into(),
            s.cm_initial.into(),
            s.cm_small.into(),
            ok.into(),
            s.shadow.into(),
            s.shadow_ratio().into(),
            s.shadow_ceiling().into(),
        ]);
    }
    let mut out = Outcome::new(t);
    out.put("tiles", tiles.len());
    out.put("invariant_holds", invariant);
    if !active.is_empty() {
        out.put("shadow_constant", active.iter().cloned().fold(0.0, f64::max));
        out.put("shadow_spread", spread(&active));
    }
    Ok(out)
}

fn carleson_jn(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let depths = p.usizes("depths", &[8, 10, 12, 14])?;
    let ps = p.f64s("p", &[2.0, 3.0, 4.0])?;
    let instances = at_least("instances", p.usize("instances", 1000)?, 1)?;
    p.finish()?;
    if let Some(d) = depths.iter().find(|d| **d > 20) {
        return Err(CliError::Usage(format!("depth {d} exceeds 20")));
    }
    let mut t = Table::new(&["depth", "p", "max_ratio", "mean_ratio"]);
    let mut drift = Vec::new();
    for &q in &ps {
        let mut maxes = Vec::new();
        for &d in &depths {
            let r = jn_battery(d as u32, q, instances, seed.wrapping_add(d as u64))?;
            maxes.push(r.max_ratio);
            t.push(vec![d.into(), q.into(), r.max_ratio.into(), r.mean_ratio.into()]);
        }
        if !maxes.is_empty() {
            drift.push(json!({ "p": q, "drift": spread(&maxes) }));
        }
    }
    let mut out = Outcome::new(t);
    out.put("drift", Value::Array(drift));
    Ok(out)
}

fn product_jn(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let d1 = p.u32("d1", 3)?;
    let d2 = p.u32("d2", 3)?;
    let instances = at_least("instances", p.usize("instances", 20)?, 1)?;
    let density = p.f64("density", 0.3)?;
    let ps = p.f64s("p", &[2.0, 3.0, 4.0])?;
    let k0 = p.f64("k0", 4.0)?;
    p.finish()?;
    if d1 + d2 > 6 {
        return Err(CliError::Usage(format!("grid 2^{d1} x 2^{d2} exceeds the 8 x 8 exact limit")));
    }
    let mut t = Table::new(&["instance", "p", "step", "u_measure", "v_measure", "k", "fu_norm", "fv_norm", "split_constant", "halved"]);
    let (mut halved_all, mut max_steps, mut max_ratio, mut max_split) = (true, 0usize, 0.0f64, 0.0f64);
    let mut bound_over_ratio = Vec::new();
    for i in 0..instances {
        let a = random_product_carleson(&mut trial_rng(seed, i as u64), d1, d2, density);
        let (c1, c2) = a.cells();
        let u = vec![true; c1 * c2];
        for &q in &ps {
            let r = product_jn_recursion(&a, &u, q, k0)?;
            max_steps = max_steps.max(r.steps.len());
            max_ratio = max_ratio.max(r.jn_ratio);
            if r.jn_ratio > 0.0 {
                bound_over_ratio.push(r.unrolled_bound / r.jn_ratio);
            }
            for (si, s) in r.steps.iter().enumerate() {
                let h = s.fu_norm == 0.0 || s.v_measure < s.u_measure / 2.0;
                halved_all &= h;
                max_split = max_split.max(s.split_constant);
                t.push(vec![
                    i.into(),
                    q.into(),
                    si.into(),
                    s.u_measure.into(),
                    s.v_measure.into(),
                    s.k.into(),
                    s.fu_norm.into(),
                    s.fv_norm.into(),
                    s.split_constant.into(),
                    h.into(),
                ]);
            }
        }
    }
    let mut out = Outcome::new(t);
    out.put("halved_every_step", halved_all);
    out.put("max_steps", max_steps);
    out.put("depth_limit", (d1 + d2) as usize + 1);
    out.put("max_jn_ratio", max_ratio);
    out.put("max_split_constant", max_split);
    if !bound_over_ratio.is_empty() {
        out.put("max_bound_over_ratio", bound_over_ratio.iter().cloned().fold(0.0, f64::max));
    }
    Ok(out)
}

/// Every subsequence, straight from the definition.
fn var_q_subsequences(m: &[C64], q: f64) -> f64 {
    let n = m.len();
    let mut best = 0.0f64;
    for mask in 0u32..1 << n {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let s: f64 = idx.windows(2).map(|w| (m[w[1]] - m[w[0]]).norm().powf(q)).sum();
        best = best.max(s);
    }
    best.powf(1.0 / q)
}

fn varq(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let mode = p.choice("mode", &["oracle", "grid"], "oracle")?;
    let n = p.usize("n", if mode == "oracle" { 12 } else { 4 })?;
    let instances = at_least("instances", p.usize("instances", 200)?, 1)?;
    let qs = p.f64s("q", &[1.0, 2.0, 3.0])?;
    let tol = p.f64("tol", 1e-12)?;
    p.finish()?;
    let limit = if mode == "oracle" { 20 } else { 5 };
    if n == 0 || n > limit {
        return Err(CliError::Usage(format!("{mode} mode needs 1 <= n <= {limit}, got {n}")));
    }
    let mut t = Table::new(&["instance", "n", "q", "fast", "oracle", "abs_diff", "pass"]);
    let rows: Vec<Vec<(f64, f64, f64)>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let len = if mode == "oracle" { n } else { n * n };
            let m: Vec<C64> = (0..len).map(|_| gaussian_complex(&mut rng)).collect();
            qs.iter()
                .map(|&q| {
                    Ok(if mode == "oracle" {
                        (q, var_q(&m, q)?, var_q_subsequences(&m, q))
                    } else {
                        (q, var_q_2d(&m, n, n, q, Var2Mode::GridDp)?.value, var_q_2d(&m, n, n, q, Var2Mode::Brute)?.value)
                    })
                })
                .collect()
        })
        .collect::<lp_tile_core::Result<_>>()?;
    let (mut all_pass, mut max_diff) = (true, 0.0f64);
    for (i, r) in rows.iter().enumerate() {
        for &(q, fast, oracle) in r {
            let d = (fast - oracle).abs();
            let ok = d <= tol * oracle.max(1.0);
            all_pass &= ok;
            max_diff = max_diff.max(d);
            t.push(vec![i.into(), n.into(), q.into(), fast.into(), oracle.into(), d.into(), ok.into()]);
        }
    }
    let mut out = Outcome::new(t);
    out.put("all_pass", all_pass);
    out.put("max_abs_diff", max_diff);
    if !all_pass {
        out.warnings.push("fast and brute-force values disagree beyond tol".into());
    }
    Ok(out)
}

fn martingale_family(name: &str, n: usize, seed: u64) -> Vec<C64> {
    let mut rng = trial_rng(seed, n as u64);
    match name {
        "ramp" => (0..n).map(|k| C64::new(k as f64 / (n - 1) as f64, 0.0)).collect(),
        "jump" => {
            let at = rng.random_range(1..n);
            (0..n).map(|k| C64::new(if k >= at { 1.0 } else { 0.0 }, 0.0)).collect()
        }
        _ => {
            let mut acc = C64::new(0.0, 0.0);
            (0..n)
                .map(|_| {
                    acc += gaussian_complex(&mut rng);
                    acc
                })
                .collect()
        }
    }
}

fn martingale(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let ns = p.usizes("ns", &[n / 4, n])?;
    let q = p.f64("q", 2.0)?;
    let j_max = p.u32("j_max", 8)?;
    p.finish()?;
    if let Some(m) = ns.iter().find(|m| **m < 2) {
        return Err(CliError::Usage(format!("sequence length {m} is below 2")));
    }
    let mut t = Table::new(&["family", "n", "j", "cells", "sup", "weighted"]);
    let (mut cells_ok, mut max_c) = (true, 0.0f64);
    let mut constants = Vec::new();
    for fam in ["ramp", "jump", "random-walk"] {
        for &len in &ns {
            let m = martingale_family(fam, len, seed);
            let d = martingale_decompose(&m, q, j_max)?;
            for (j, l) in d.levels.iter().enumerate() {
                cells_ok &= l.cells.len() <= 1 << j;
                let w = (j as f64 / q).exp2() * l.sup;
                t.push(vec![fam.into(), len.into(), j.into(), l.cells.len().into(), l.sup.into(), w.into()]);
            }
            max_c = max_c.max(d.constant);
            constants.push(json!({ "family": fam, "n": len, "constant": d.constant }));
        }
    }
    let mut out = Outcome::new(t);
    out.put("cells_within_bound", cells_ok);
    out.put("max_constant", max_c);
    out.put("constants", Value::Array(constants));
    Ok(out)
}

fn crs(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let ns = p.usizes("ns", &[n / 4, n])?;
    let pe = p.f64("p", 3.0)?;
    let q = p.f64("q", 2.0)?;
    let draws = at_least("draws", p.usize("draws", 10)?, 1)?;
    let restarts = at_least("restarts", p.usize("restarts", 8)?, 1)?;
    let iters = at_least("iters", p.usize("iters", 100)?, 1)?;
    let tol = p.f64("tol", 1e-9)?;
    let dn = p.grid("decouple_n", n)?;
    let cells = p.usizes("decouple_cells", &[1, 2, 4, 8, 16])?;
    let dp = p.f64("decouple_p", 4.0)?;
    let dq = p.f64("decouple_q", 2.0)?;
    let dd = at_least("decouple_draws", p.usize("decouple_draws", 2)?, 1)?;
    p.finish()?;
    let cfg = NormConfig { restarts, iters, seed, tol };
    let mut t = Table::new(&["kind", "n", "family", "index", "lhs", "rhs", "ratio", "converged"]);
    let mut caps = Vec::new();
    let mut unconverged = 0usize;
    for &m in &ns {
        let b = crs_battery(m, pe, q, draws, cfg)?;
        for r in &b.rows {
            unconverged += usize::from(!r.converged);
            t.push(vec!["crs".into(), m.into(), r.family.name().into(), r.draw.into(), r.lhs.into(), r.rhs.into(), r.ratio.into(), r.converged.into()]);
        }
        caps.push((m, b.cap));
    }
    let mut out = Outcome::new(Table::new(&[]));
    if !cells.is_empty() {
        let d = decouple_check(dn, &cells, dp, dq, dd, NormConfig { seed: seed.wrapping_add(7), ..cfg })?;
        for r in &d.rows {
            let rhs = (r.cells as f64).powf(1.0 / dq);
            t.push(vec!["decouple".into(), dn.into(), "random-signs".into(), r.cells.into(), r.lhs.into(), rhs.into(), r.bound_ratio.into(), Cell::Text(String::new())]);
        }
        if cells.len() >= 2 {
            out.put("decouple_slope", d.slope);
            out.put("decouple_slope_limit", 1.0 / dq + 0.1);
        }
        out.put("decouple_constant", d.constant);
    }
    out.table = t;
    out.put("caps", Value::Array(caps.iter().map(|(m, c)| json!({ "n": m, "cap": c })).collect()));
    if !caps.is_empty() {
        out.put("cap_spread", spread(&caps.iter().map(|c| c.1).collect::<Vec<_>>()));
    }
    out.put("unconverged_estimates", unconverged);
    if unconverged > 0 {
        out.warnings.push(format!("{unconverged} norm estimates had restarts that did not settle within {iters} iterations; values remain valid lower bounds"));
    }
    Ok(out)
}

fn rubio(p: &mut Params) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let ns = p.usizes("ns", &dyadic_range((n / 256).max(16), n / 8))?;
    let ps = p.f64s("p", &[4.0 / 3.0, 1.9])?;
    p.finish()?;
    let mut t = Table::new(&["p", "big_n", "square_norm", "f_norm", "ratio", "witness_constant"]);
    let mut fits = Vec::new();
    for &q in &ps {
        let r = counterexample_rubio(n, &ns, q)?;
        for row in &r.rows {
            t.push(vec![q.into(), row.big_n.into(), row.square_norm.into(), row.f_norm.into(), row.ratio.into(), row.witness_constant.into()]);
        }
        let w: Vec<f64> = r.rows.iter().map(|x| x.witness_constant).collect();
        let mut fit = json!({ "p": q, "expected": r.expected });
        if r.rows.len() >= 2 {
            fit["slope"] = json!(r.slope);
            fit["witness_spread"] = json!(spread(&w));
        }
        fits.push(fit);
    }
    let mut out = Outcome::new(t);
    out.put("fits", Value::Array(fits));
    Ok(out)
}

fn bump(p: &mut Params, seed: u64) -> Result<Outcome, CliError> {
    let n = p.grid("n", 1024)?;
    let delta = p.i64("delta", 8)?;
    let top = if delta > 0 { n / (2 * delta as usize) } else { 0 };
    let ns = p.usizes("ns", &dyadic_range((n / 256).max(4), top))?;
    let pe = p.f64("p", 4.0)?;
    let q = p.f64("q", 2.0)?;
    let trials = at_least("trials", p.usize("trials", 16)?, 1)?;
    p.finish()?;
    let r = counterexample_multiplier(&ns, pe, BumpConfig { n, delta, q, trials, seed })?;
    let mut t = Table::new(&["big_n", "mean_over_sqrt_n", "witness_ratio", "var_q"]);
    for row in &r.rows {
        t.push(vec![row.big_n.into(), row.mean_over_sqrt_n.into(), row.witness_ratio.into(), row.var_q.into()]);
    }
    let mut out = Outcome::new(t);
    out.put("expected", r.expected);
    if r.rows.len() >= 2 {
        out.put("slope", r.slope);
        out.put("var_slope", r.var_slope);
        out.put("mean_spread", spread(&r.rows.iter().map(|x| x.mean_over_sqrt_n).collect::<Vec<_>>()));
    }
    Ok(out)
}
