//! Product Carleson sequences indexed by dyadic rectangles of `[0,1)^2`,
//! their Carleson norms over arbitrary unions of cells, and the
//! Chang–Fefferman recursion behind the product John–Nirenberg inequality.
//!
//! A set `U` is a union of finest-level cells (`2^d1 x 2^d2` of them). The
//! norm `sup_U |U|^-1 sum_{R subset U} alpha(R)` is a ratio of a
//! supermodular set function to a modular one; it is maximized exactly by
//! Dinkelbach iteration, each step a maximum-weight closure solved by
//! minimum cut.

use rand::Rng;

use crate::error::{LabError, Result};
use crate::grid::{lp_norm_of, DyadicInterval};
use crate::maximal::strong_maximal_uncentered;

/// Dyadic rectangle `I1 x I2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicRect {
    pub x: DyadicInterval,
    pub y: DyadicInterval,
}

impl DyadicRect {
    pub fn area(&self) -> f64 {
        self.x.len() * self.y.len()
    }

    /// Finest cells `(c1, c2)` covered on a `2^d1 x 2^d2` grid.
    pub fn cells(&self, d1: u32, d2: u32) -> impl Iterator<Item = (usize, usize)> {
        let (s1, s2) = (d1 - self.x.level, d2 - self.y.level);
        let a1 = (self.x.offset << s1) as usize;
        let a2 = (self.y.offset << s2) as usize;
        (a1..a1 + (1 << s1)).flat_map(move |c1| (a2..a2 + (1 << s2)).map(move |c2| (c1, c2)))
    }
}

/// `alpha(R) >= 0` for dyadic rectangles with levels up to `(d1, d2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductCarlesonSeq {
    pub d1: u32,
    pub d2: u32,
    entries: Vec<(DyadicRect, f64)>,
}

impl ProductCarlesonSeq {
    pub fn new(d1: u32, d2: u32) -> Self {
        Self { d1, d2, entries: Vec::new() }
    }

    /// Adds mass to `R` (accumulating).
    pub fn add(&mut self, r: DyadicRect, v: f64) -> Result<()> {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(LabError::InvalidParameter(format!("alpha must be finite and nonnegative, got {v}")));
        }
        if r.x.level > self.d1 || r.y.level > self.d2 || r.x.offset >> r.x.level != 0 || r.y.offset >> r.y.level != 0 {
            return Err(LabError::InvalidParameter(format!("rectangle {r:?} outside depth ({}, {})", self.d1, self.d2)));
        }
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == r) {
            e.1 += v;
        } else if v > 0.0 {
            self.entries.push((r, v));
        }
        Ok(())
    }

    pub fn entries(&self) -> &[(DyadicRect, f64)] {
        &self.entries
    }

    pub fn cells(&self) -> (usize, usize) {
        (1 << self.d1, 1 << self.d2)
    }

    pub fn cell_area(&self) -> f64 {
        1.0 / (1u64 << (self.d1 + self.d2)) as f64
    }

    fn cell_index(&self, c: (usize, usize)) -> usize {
        c.0 * (1 << self.d2) + c.1
    }

    /// Whether every cell of `r` lies in `u` (row-major cell mask).
    pub fn rect_in(&self, r: &DyadicRect, u: &[bool]) -> bool {
        r.cells(self.d1, self.d2).all(|c| u[self.cell_index(c)])
    }

    /// `sum_{R subset U} alpha(R)`.
    pub fn mass_in(&self, u: &[bool]) -> f64 {
        self.entries.iter().filter(|(r, _)| self.rect_in(r, u)).map(|e| e.1).sum()
    }

    /// `F_U = sum_{R subset U} alpha(R) / |R| 1_R` on the cell grid.
    pub fn jn_function(&self, u: &[bool]) -> Vec<f64> {
        let mut f = vec![0.0; u.len()];
        for (r, v) in &self.entries {
            if self.rect_in(r, u) {
                let h = v / r.area();
                for c in r.cells(self.d1, self.d2) {
                    f[self.cell_index(c)] += h;
                }
            }
        }
        f
    }

    fn ratio(&self, u: &[bool]) -> f64 {
        let k = u.iter().filter(|b| **b).count();
        if k == 0 {
            0.0
        } else {
            self.mass_in(u) / (k as f64 * self.cell_area())
        }
    }

    fn rect_mask(&self, r: &DyadicRect) -> Vec<bool> {
        let (c1, c2) = self.cells();
        let mut u = vec![false; c1 * c2];
        for c in r.cells(self.d1, self.d2) {
            u[self.cell_index(c)] = true;
        }
        u
    }

    /// All dyadic rectangles of the grid.
    pub fn all_rects(&self) -> Vec<DyadicRect> {
        let mut out = Vec::new();
        for x in DyadicInterval::all_up_to(self.d1) {
            for y in DyadicInterval::all_up_to(self.d2) {
                out.push(DyadicRect { x, y });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductCmMode {
    /// Supremum over dyadic rectangles only.
    RectOnly,
    /// Exact supremum over all unions of cells.
    Exhaustive,
    /// Local search over cell unions; a lower bound for the exact value.
    Heuristic,
}

/// Cell grids allowed in exhaustive mode.
pub const EXHAUSTIVE_MAX_CELLS: usize = 64;

#[derive(Debug, Clone)]
pub struct ProductCm {
    pub value: f64,
    /// A maximizing union of cells (row-major mask).
    pub witness: Vec<bool>,
}

pub fn product_cm_norm(alpha: &ProductCarlesonSeq, mode: ProductCmMode) -> Result<ProductCm> {
    match mode {
        ProductCmMode::RectOnly => Ok(rect_only(alpha)),
        ProductCmMode::Exhaustive => {
            let (c1, c2) = alpha.cells();
            if c1 > 8 || c2 > 8 || c1 * c2 > EXHAUSTIVE_MAX_CELLS {
                return Err(LabError::GridTooLarge(c1 * c2));
            }
            Ok(exact(alpha))
        }
        ProductCmMode::Heuristic => Ok(heuristic(alpha)),
    }
}

fn rect_only(alpha: &ProductCarlesonSeq) -> ProductCm {
    let mut best = ProductCm { value: 0.0, witness: vec![false; alpha.cells().0 * alpha.cells().1] };
    for r in alpha.all_rects() {
        let mass: f64 = alpha.entries.iter().filter(|(s, _)| s.x.is_subset_of(&r.x) && s.y.is_subset_of(&r.y)).map(|e| e.1).sum();
        let v = mass / r.area();
        if v > best.value {
            best = ProductCm { value: v, witness: alpha.rect_mask(&r) };
        }
    }
    best
}

fn heuristic(alpha: &ProductCarlesonSeq) -> ProductCm {
    let start = rect_only(alpha);
    if start.value == 0.0 {
        return start;
    }
    let mut u = start.witness;
    let mut val = alpha.ratio(&u);
    loop {
        let mut best_move = None;
        let mut best_val = val;
        for i in 0..u.len() {
            u[i] = !u[i];
            let v = alpha.ratio(&u);
            if v > best_val * (1.0 + 1e-14) {
                best_val = v;
                best_move = Some(i);
            }
            u[i] = !u[i];
        }
        match best_move {
            Some(i) => {
                u[i] = !u[i];
                val = best_val;
            }
            None => break,
        }
    }
    ProductCm { value: val, witness: u }
}

/// Maximizes `mass(U) - lambda |U|` by minimum cut; returns the source side cells.
fn max_closure(alpha: &ProductCarlesonSeq, lambda: f64) -> (f64, Vec<bool>) {
    let (c1, c2) = alpha.cells();
    let cells = c1 * c2;
    let rects = alpha.entries.len();
    let (src, sink) = (rects + cells, rects + cells + 1);
    let mut g = FlowGraph::new(rects + cells + 2);
    let total: f64 = alpha.entries.iter().map(|e| e.1).sum();
    let big = 1.0 + 4.0 * total + lambda * cells as f64;
    for (i, (r, v)) in alpha.entries.iter().enumerate() {
        g.add_edge(src, i, *v);
        for c in r.cells(alpha.d1, alpha.d2) {
            g.add_edge(i, rects + alpha.cell_index(c), big);
        }
    }
    let w = lambda * alpha.cell_area();
    for c in 0..cells {
        g.add_edge(rects + c, sink, w);
    }
    let cut = g.max_flow(src, sink);
    let side = g.source_side(src);
    (total - cut, (0..cells).map(|c| side[rects + c]).collect())
}

fn exact(alpha: &ProductCarlesonSeq) -> ProductCm {
    let mut best = rect_only(alpha);
    if best.value == 0.0 {
        return best;
    }
    let total: f64 = alpha.entries.iter().map(|e| e.1).sum();
    for _ in 0..200 {
        let (profit, u) = max_closure(alpha, best.value);
        if profit <= 1e-13 * total || !u.iter().any(|b| *b) {
            break;
        }
        let v = alpha.ratio(&u);
        if v <= best.value {
            break;
        }
        best = ProductCm { value: v, witness: u };
    }
    best
}

/// Dinic maximum flow on real capacities.
struct FlowGraph {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn add_edge(&mut self, a: usize, b: usize, c: f64) {
        self.adj[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.adj[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0.0);
    }

    const EPS: f64 = 1e-15;

    fn levels(&self, s: usize) -> Vec<i64> {
        let mut level = vec![-1i64; self.adj.len()];
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                if self.cap[e] > Self::EPS && level[self.to[e]] < 0 {
                    level[self.to[e]] = level[v] + 1;
                    queue.push_back(self.to[e]);
                }
            }
        }
        level
    }

    fn augment(&mut self, v: usize, t: usize, f: f64, level: &[i64], it: &mut [usize]) -> f64 {
        if v == t {
            return f;
        }
        while it[v] < self.adj[v].len() {
            let e = self.adj[v][it[v]];
            let u = self.to[e];
            if self.cap[e] > Self::EPS && level[u] == level[v] + 1 {
                let d = self.augment(u, t, f.min(self.cap[e]), level, it);
                if d > 0.0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            it[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return flow;
            }
            let mut it = vec![0usize; self.adj.len()];
            loop {
                let f = self.augment(s, t, f64::INFINITY, &level, &mut it);
                if f <= 0.0 {
                    break;
                }
                flow += f;
            }
        }
    }

    fn source_side(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l >= 0).collect()
    }
}

/// Two overlapping rectangles `[0,1/2)x[0,1/4)` and `[0,1/4)x[0,1/2)`, each
/// carrying mass equal to its area, on a `4 x 4` grid. Every dyadic
/// rectangle sees ratio at most 1, while their union has ratio `4/3`.
pub fn cross_instance() -> ProductCarlesonSeq {
    let mut a = ProductCarlesonSeq::new(2, 2);
    let r1 = DyadicRect { x: DyadicInterval { level: 1, offset: 0 }, y: DyadicInterval { level: 2, offset: 0 } };
    let r2 = DyadicRect { x: DyadicInterval { level: 2, offset: 0 }, y: DyadicInterval { level: 1, offset: 0 } };
    a.add(r1, r1.area()).unwrap();
    a.add(r2, r2.area()).unwrap();
    a
}

/// Random product sequence: each dyadic rectangle independently receives
/// mass `|R| u` with probability `density`.
pub fn random_product_carleson<R: Rng + ?Sized>(rng: &mut R, d1: u32, d2: u32, density: f64) -> ProductCarlesonSeq {
    let mut a = ProductCarlesonSeq::new(d1, d2);
    for r in a.all_rects() {
        if rng.random::<f64>() < density {
            let v = r.area() * rng.random::<f64>();
            a.add(r, v).expect("valid rectangle");
        }
    }
    a
}

#[derive(Debug, Clone)]
pub struct JnStep {
    pub u_measure: f64,
    pub v_measure: f64,
    pub k: f64,
    pub fu_norm: f64,
    pub fv_norm: f64,
    /// `||F_U||_p / (CM |U|^{1/p} + ||F_V||_p)`.
    pub split_constant: f64,
    pub v_mask: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct ProductJnReport {
    pub cm: f64,
    pub steps: Vec<JnStep>,
    /// `||F_U||_p / (CM |U|^{1/p})` for the initial `U`.
    pub jn_ratio: f64,
    /// `sum_i K_i |U_i|^{1/p} / |U_0|^{1/p}`: the bound produced by unrolling the recursion.
    pub unrolled_bound: f64,
}

fn measure(mask: &[bool], cell: f64) -> f64 {
    mask.iter().filter(|b| **b).count() as f64 * cell
}

/// One step of the duality argument: `g = F_U^{p-1} / ||F_U||_p^{p-1}`
/// (the norming function in `L^{p'}`), `V = {M g > K |U|^{-1/p'}}` with
/// the strong maximal function, `K` doubling from `k0` until `|V| < |U|/2`.
pub fn product_jn_step(alpha: &ProductCarlesonSeq, u: &[bool], p: f64, k0: f64, cm: f64) -> Result<JnStep> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(LabError::InvalidExponent(p, "need 1 < p < infinity"));
    }
    if !(k0 > 0.0) {
        return Err(LabError::InvalidParameter("K must be positive".into()));
    }
    let (c1, c2) = alpha.cells();
    let cell = alpha.cell_area();
    let n = c1 * c2;
    let um = measure(u, cell);
    let fu = alpha.jn_function(u);
    let fu_norm = lp_norm_of(fu.iter().copied(), n, p);
    let empty = vec![false; n];
    if fu_norm == 0.0 || um == 0.0 {
        return Ok(JnStep { u_measure: um, v_measure: 0.0, k: k0, fu_norm, fv_norm: 0.0, split_constant: 0.0, v_mask: empty });
    }
    let g: Vec<f64> = fu.iter().map(|v| (v / fu_norm).powf(p - 1.0)).collect();
    let mg = strong_maximal_uncentered(&g, c1, c2);
    let pp = p / (p - 1.0);
    let mut k = k0;
    let v_mask = loop {
        let thr = k * um.powf(-1.0 / pp);
        let v: Vec<bool> = mg.iter().map(|m| *m > thr).collect();
        if measure(&v, cell) < um / 2.0 {
            break v;
        }
        k *= 2.0;
    };
    let fv_norm = lp_norm_of(alpha.jn_function(&v_mask).into_iter(), n, p);
    let split_constant = fu_norm / (cm * um.powf(1.0 / p) + fv_norm);
    Ok(JnStep { u_measure: um, v_measure: measure(&v_mask, cell), k, fu_norm, fv_norm, split_constant, v_mask })
}

/// Iterates [`product_jn_step`] from `U` until `V` is empty.
pub fn product_jn_recursion(alpha: &ProductCarlesonSeq, u: &[bool], p: f64, k0: f64) -> Result<ProductJnReport> {
    let cm = exact(alpha).value;
    let mut steps = Vec::new();
    let mut cur = u.to_vec();
    let u0 = measure(u, alpha.cell_area());
    loop {
        let s = product_jn_step(alpha, &cur, p, k0, cm)?;
        let done = s.fu_norm == 0.0 || !s.v_mask.iter().any(|b| *b);
        cur = s.v_mask.clone();
        steps.push(s);
        if done || steps.len() > 64 {
            break;
        }
    }
    let first = &steps[0];
    let jn_ratio = if cm == 0.0 || u0 == 0.0 { 0.0 } else { first.fu_norm / (cm * u0.powf(1.0 / p)) };
    let unrolled_bound = if u0 == 0.0 {
        0.0
    } else {
        steps.iter().filter(|s| s.fu_norm > 0.0).map(|s| s.k * s.u_measure.powf(1.0 / p)).sum::<f64>() / u0.powf(1.0 / p)
    };
    Ok(ProductJnReport { cm, steps, jn_ratio, unrolled_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn brute(alpha: &ProductCarlesonSeq) -> f64 {
        let (c1, c2) = alpha.cells();
        let n = c1 * c2;
        let mut best = 0.0f64;
        for mask in 1u64..(1u64 << n) {
            let u: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            best = best.max(alpha.ratio(&u));
        }
        best
    }

    #[test]
    fn single_rectangle_all_modes_one() {
        let mut a = ProductCarlesonSeq::new(3, 3);
        let r = DyadicRect { x: DyadicInterval { level: 1, offset: 1 }, y: DyadicInterval { level: 2, offset: 3 } };
        a.add(r, r.area()).unwrap();
        for mode in [ProductCmMode::RectOnly, ProductCmMode::Exhaustive, ProductCmMode::Heuristic] {
            assert!((product_cm_norm(&a, mode).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_is_zero() {
        let a = ProductCarlesonSeq::new(2, 3);
        for mode in [ProductCmMode::RectOnly, ProductCmMode::Exhaustive, ProductCmMode::Heuristic] {
            assert_eq!(product_cm_norm(&a, mode).unwrap().value, 0.0);
        }
    }

    #[test]
    fn cross_instance_separates_modes() {
        let a = cross_instance();
        let r = product_cm_norm(&a, ProductCmMode::RectOnly).unwrap().value;
        let e = product_cm_norm(&a, ProductCmMode::Exhaustive).unwrap().value;
        assert!((r - 1.0).abs() < 1e-12);
        assert!((e - 4.0 / 3.0).abs() < 1e-12);
        assert!((brute(&a) - e).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_enumeration_on_small_grids() {
        for i in 0..40 {
            let mut rng = trial_rng(11, i);
            let (d1, d2) = ((i % 3) as u32, (i / 3 % 3) as u32);
            let a = random_product_carleson(&mut rng, d1, d2, 0.4);
            let e = product_cm_norm(&a, ProductCmMode::Exhaustive).unwrap().value;
            let b = brute(&a);
            assert!((e - b).abs() <= 1e-12 * b.max(1.0), "{e} vs {b}");
        }
    }

    #[test]
    fn too_large_grid_rejected() {
        let a = ProductCarlesonSeq::new(4, 3);
        assert!(product_cm_norm(&a, ProductCmMode::Exhaustive).is_err());
    }

    #[test]
    fn zero_alpha_recursion_is_trivial() {
        let a = ProductCarlesonSeq::new(3, 3);
        let u = vec![true; 64];
        let r = product_jn_recursion(&a, &u, 2.0, 4.0).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.steps[0].fu_norm, 0.0);
        assert_eq!(r.steps[0].v_measure, 0.0);
    }
}
