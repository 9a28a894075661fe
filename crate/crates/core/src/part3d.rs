//! Plane partitions: canonical enumeration, coloured, signed and reduced
//! generating functions, positivity checks, Young's closed products and the
//! symmetry-orbit analysis.
//!
//! Enumeration walks the tree of downward-closed box sets: a box is addable
//! iff all coordinate-decremented neighbours are present, and children only
//! add boxes strictly after the parent's last-added box in the total order
//! `(i+j+k, i, j)`.  Every plane partition is reached exactly once.  Only
//! per-weight counts are kept; box sets are materialised only for the small
//! orbit computations.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::groups::{mckay_quiver, ColourGroup, DimVector};
use crate::mpoly::{std_series, Monomial, StdSeriesKind, TruncatedSeries};
use crate::report::{describe_term, Check};

/// A plane partition as an explicit, sorted box list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlanePartition {
    boxes: Vec<[u8; 3]>,
}

impl PlanePartition {
    pub fn new(mut boxes: Vec<[u8; 3]>) -> Self {
        boxes.sort_unstable();
        boxes.dedup();
        let pp = PlanePartition { boxes };
        assert!(pp.is_downward_closed(), "box set is not a plane partition");
        pp
    }

    pub fn boxes(&self) -> &[[u8; 3]] {
        &self.boxes
    }

    pub fn size(&self) -> usize {
        self.boxes.len()
    }

    fn contains(&self, b: &[u8; 3]) -> bool {
        self.boxes.binary_search(b).is_ok()
    }

    pub fn is_downward_closed(&self) -> bool {
        self.boxes.iter().all(|&[i, j, k]| {
            (i == 0 || self.contains(&[i - 1, j, k]))
                && (j == 0 || self.contains(&[i, j - 1, k]))
                && (k == 0 || self.contains(&[i, j, k - 1]))
        })
    }

    /// Per-colour box counts under the group's colouring.
    pub fn weight(&self, g: &ColourGroup) -> Vec<i64> {
        assert_eq!(g.dim(), 3);
        let mut w = vec![0i64; g.order()];
        for &[i, j, k] in &self.boxes {
            w[g.colour(&[i as u64, j as u64, k as u64])] += 1;
        }
        w
    }

    /// Image under a coordinate permutation, re-sorted.
    pub fn permute(&self, perm: &[usize; 3]) -> PlanePartition {
        let mut boxes: Vec<[u8; 3]> = self
            .boxes
            .iter()
            .map(|b| {
                let mut c = [0u8; 3];
                for (axis, &src) in perm.iter().enumerate() {
                    c[axis] = b[src];
                }
                c
            })
            .collect();
        boxes.sort_unstable();
        PlanePartition { boxes }
    }
}

// ---------------------------------------------------------------------------
// Canonical DFS enumeration
// ---------------------------------------------------------------------------

const MAX_COLOURS: usize = 10;
const WEIGHT_BITS: u32 = 6;

fn encode_weight(w: &[u32]) -> u64 {
    debug_assert!(w.len() <= MAX_COLOURS && w.iter().all(|&x| x < (1 << WEIGHT_BITS)));
    w.iter().rev().fold(0u64, |acc, &x| (acc << WEIGHT_BITS) | x as u64)
}

fn decode_weight(mut enc: u64, r: usize) -> Vec<i64> {
    let mut w = Vec::with_capacity(r);
    for _ in 0..r {
        w.push((enc & ((1 << WEIGHT_BITS) - 1)) as i64);
        enc >>= WEIGHT_BITS;
    }
    w
}

struct Walker {
    side: usize,
    bound: u32,
    heights: Vec<u8>,
    colour: Vec<u8>,
    weight: Vec<u32>,
}

#[derive(Clone)]
struct SubtreeRoot {
    heights: Vec<u8>,
    weight: Vec<u32>,
    last_key: i64,
    size: u32,
}

impl Walker {
    fn new(g: &ColourGroup, bound: u32) -> Self {
        let side = (bound as usize).max(1);
        let mut colour = vec![0u8; side * side * side];
        for i in 0..side {
            for j in 0..side {
                for k in 0..side {
                    colour[(i * side + j) * side + k] =
                        g.colour(&[i as u64, j as u64, k as u64]) as u8;
                }
            }
        }
        Walker {
            side,
            bound,
            heights: vec![0u8; side * side],
            colour,
            weight: vec![0u32; g.order()],
        }
    }

    fn key(&self, i: usize, j: usize, k: usize) -> i64 {
        (((i + j + k) * self.side + i) * self.side + j) as i64
    }

    fn for_each_addable(&self, last_key: i64, mut f: impl FnMut(usize, usize, usize, i64)) {
        let w = self.side;
        for i in 0..w {
            if i > 0 && self.heights[(i - 1) * w] == 0 {
                break;
            }
            for j in 0..w {
                let h = self.heights[i * w + j];
                if h == 0 {
                    let blocked = if i == 0 {
                        j > 0 && self.heights[j - 1] == 0
                    } else {
                        self.heights[(i - 1) * w + j] == 0
                    };
                    if blocked {
                        break;
                    }
                }
                let above_ok = i == 0 || self.heights[(i - 1) * w + j] > h;
                let left_ok = j == 0 || self.heights[i * w + j - 1] > h;
                if above_ok && left_ok {
                    let k = h as usize;
                    let key = self.key(i, j, k);
                    if key > last_key {
                        f(i, j, k, key);
                    }
                }
            }
        }
    }

    fn push_box(&mut self, i: usize, j: usize, k: usize) -> usize {
        let c = self.colour[(i * self.side + j) * self.side + k] as usize;
        self.heights[i * self.side + j] += 1;
        self.weight[c] += 1;
        c
    }

    fn pop_box(&mut self, i: usize, j: usize, c: usize) {
        self.heights[i * self.side + j] -= 1;
        self.weight[c] -= 1;
    }

    fn dfs(&mut self, last_key: i64, size: u32, sink: &mut impl FnMut(u32, u64)) {
        sink(size, encode_weight(&self.weight));
        if size == self.bound {
            return;
        }
        let mut moves: Vec<(usize, usize, usize, i64)> = Vec::new();
        self.for_each_addable(last_key, |i, j, k, key| moves.push((i, j, k, key)));
        for (i, j, k, key) in moves {
            let c = self.push_box(i, j, k);
            self.dfs(key, size + 1, sink);
            self.pop_box(i, j, c);
        }
    }

    /// Like `dfs` but splits off the subtrees rooted at depth `depth`,
    /// recording only the shallower nodes through `sink`.
    fn collect_roots(
        &mut self,
        last_key: i64,
        size: u32,
        depth: u32,
        sink: &mut impl FnMut(u32, u64),
        roots: &mut Vec<SubtreeRoot>,
    ) {
        if size == depth {
            roots.push(SubtreeRoot {
                heights: self.heights.clone(),
                weight: self.weight.clone(),
                last_key,
                size,
            });
            return;
        }
        sink(size, encode_weight(&self.weight));
        if size == self.bound {
            return;
        }
        let mut moves: Vec<(usize, usize, usize, i64)> = Vec::new();
        self.for_each_addable(last_key, |i, j, k, key| moves.push((i, j, k, key)));
        for (i, j, k, key) in moves {
            let c = self.push_box(i, j, k);
            self.collect_roots(key, size + 1, depth, sink, roots);
            self.pop_box(i, j, c);
        }
    }

    fn dfs_with_boxes(
        &mut self,
        last_key: i64,
        stack: &mut Vec<[u8; 3]>,
        sink: &mut impl FnMut(&[[u8; 3]], &[u32]),
    ) {
        sink(stack, &self.weight);
        if stack.len() as u32 == self.bound {
            return;
        }
        let mut moves: Vec<(usize, usize, usize, i64)> = Vec::new();
        self.for_each_addable(last_key, |i, j, k, key| moves.push((i, j, k, key)));
        for (i, j, k, key) in moves {
            let c = self.push_box(i, j, k);
            stack.push([i as u8, j as u8, k as u8]);
            self.dfs_with_boxes(key, stack, sink);
            stack.pop();
            self.pop_box(i, j, c);
        }
    }
}

type WeightTables = Vec<HashMap<u64, u64>>;

fn merge_tables(into: &mut WeightTables, from: WeightTables) {
    for (n, table) in from.into_iter().enumerate() {
        for (w, c) in table {
            *into[n].entry(w).or_insert(0) += c;
        }
    }
}

/// Counts plane partitions of every size `<= bound` by colour-weight
/// vector.  With `shards > 1` the DFS is split deterministically at a fixed
/// depth and the subtrees are distributed over worker threads; the merged
/// tables are identical to the serial ones.
pub(crate) fn weight_tables(g: &ColourGroup, bound: i64, shards: usize) -> WeightTables {
    assert!(g.dim() == 3, "plane partition colouring needs a 3-dimensional action");
    assert!(g.order() <= MAX_COLOURS, "weight encoding supports up to {} colours", MAX_COLOURS);
    assert!((0..64).contains(&bound), "bound out of range");
    let bound = bound as u32;
    let mut tables: WeightTables = (0..=bound).map(|_| HashMap::new()).collect();
    let mut walker = Walker::new(g, bound);
    let shards = shards.max(1);
    if shards == 1 || bound < 8 {
        let mut sink = |n: u32, w: u64| {
            *tables[n as usize].entry(w).or_insert(0) += 1;
        };
        walker.dfs(-1, 0, &mut sink);
        return tables;
    }
    // split at a fixed depth; subtree roots are distributed in chunks
    let depth = (usize::BITS - shards.leading_zeros() + 2).min(bound.min(8)) as u32;
    let mut roots = Vec::new();
    {
        let mut sink = |n: u32, w: u64| {
            *tables[n as usize].entry(w).or_insert(0) += 1;
        };
        walker.collect_roots(-1, 0, depth, &mut sink, &mut roots);
    }
    let chunk = roots.len().div_ceil(shards);
    let results: Vec<WeightTables> = std::thread::scope(|scope| {
        let walker_ref = &walker;
        let handles: Vec<_> = roots
            .chunks(chunk.max(1))
            .map(|chunk_roots| {
                scope.spawn(move || {
                    let mut local: WeightTables = (0..=bound).map(|_| HashMap::new()).collect();
                    let mut w = Walker {
                        side: walker_ref.side,
                        bound,
                        heights: vec![0; walker_ref.side * walker_ref.side],
                        colour: walker_ref.colour.clone(),
                        weight: vec![0; walker_ref.weight.len()],
                    };
                    for root in chunk_roots {
                        w.heights.copy_from_slice(&root.heights);
                        w.weight.copy_from_slice(&root.weight);
                        let mut sink = |n: u32, enc: u64| {
                            *local[n as usize].entry(enc).or_insert(0) += 1;
                        };
                        w.dfs(root.last_key, root.size, &mut sink);
                    }
                    local
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("enumeration thread panicked")).collect()
    });
    for r in results {
        merge_tables(&mut tables, r);
    }
    tables
}

/// All plane partitions of exactly `n` boxes, via the canonical DFS.
pub fn enum_plane_partitions(n: u32) -> Vec<PlanePartition> {
    let g = ColourGroup::mu(1, 0, 0, 0);
    let mut walker = Walker::new(&g, n);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut sink = |boxes: &[[u8; 3]], _w: &[u32]| {
        if boxes.len() as u32 == n {
            out.push(PlanePartition::new(boxes.to_vec()));
        }
    };
    walker.dfs_with_boxes(-1, &mut stack, &mut sink);
    out
}

/// The coloured generating function `Σ_α x^{w(α)}` over plane partitions
/// with at most `bound` boxes.
pub fn z3d(g: &ColourGroup, bound: i64, shards: usize) -> TruncatedSeries {
    let tables = weight_tables(g, bound, shards);
    let r = g.order();
    let mut out = TruncatedSeries::zero(r, bound);
    for table in tables {
        for (enc, count) in table {
            out.add_term(decode_weight(enc, r), BigInt::from(count));
        }
    }
    out
}

/// The signed series `Σ_α (-1)^{d_0 + (d,d)} x^{w(α)}` with `d = w(α)` and
/// the Euler form of the McKay quiver of `g`.
pub fn z3d_signed(g: &ColourGroup, bound: i64, shards: usize) -> TruncatedSeries {
    let q = mckay_quiver(g);
    let z = z3d(g, bound, shards);
    TruncatedSeries::from_terms(
        z.nvars(),
        z.bound(),
        z.terms().map(|(e, c)| {
            let d = DimVector::new(e.clone());
            let sign = q.sign_exponent(&d);
            let coeff = if sign == 1 { -c.clone() } else { c.clone() };
            (e.clone(), coeff)
        }),
    )
}

/// Divides a coloured series by `M(t)^r`, `t = t_0...t_{r-1}`.
pub fn reduce3d(z: &TruncatedSeries, r: u32, bound: i64) -> TruncatedSeries {
    assert_eq!(z.nvars(), r as usize);
    let bound = bound.min(z.bound());
    let t = Monomial::ones(r as usize);
    let m = std_series(StdSeriesKind::MacMahonM, None, &t, r as usize, bound)
        .expect("M(t) substitution is valid");
    let m_inv_r = m.inv().expect("M has constant term 1").pow(r).expect("same ring");
    z.truncate(bound).mul(&m_inv_r).expect("same ring")
}

// ---------------------------------------------------------------------------
// Verification reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConjectureReport {
    pub group: String,
    pub bound: i64,
    /// Negative coefficients of the reduced series, if any.  A non-empty
    /// list is a mathematical discovery, not a computation failure.
    pub negative_terms: Vec<String>,
    pub positivity: Check,
    pub prop_r_boxes: Check,
    #[serde(skip)]
    pub z: TruncatedSeries,
    #[serde(skip)]
    pub reduced: TruncatedSeries,
}

impl ConjectureReport {
    pub fn pass(&self) -> bool {
        self.positivity.pass && self.prop_r_boxes.pass
    }
}

/// Computes the reduced series of `g` and reports any negative coefficient,
/// together with the coefficient-of-`t_0...t_{r-1}`-equals-`r` check.
pub fn verify_conjecture(g: &ColourGroup, bound: i64, shards: usize) -> ConjectureReport {
    let r = g.order() as u32;
    let z = z3d(g, bound, shards);
    let reduced = reduce3d(&z, r, bound);
    let negative_terms: Vec<String> = reduced
        .sorted_terms()
        .into_iter()
        .filter(|(_, c)| c.is_negative())
        .map(|(e, c)| describe_term(&e, &c))
        .collect();
    let positivity = if negative_terms.is_empty() {
        Check::pass(format!("reduced series non-negative up to degree {bound}"))
    } else {
        Check::fail(
            format!("reduced series non-negative up to degree {bound}"),
            negative_terms[0].clone(),
        )
    };
    let ones = vec![1i64; r as usize];
    let coeff = z.coeff(&ones);
    let prop_r_boxes = if coeff == BigInt::from(r) {
        Check::pass(format!("coefficient of t_0...t_{} equals {}", r - 1, r))
    } else {
        Check::fail(
            format!("coefficient of t_0...t_{} equals {}", r - 1, r),
            format!("got {}", coeff),
        )
    };
    ConjectureReport {
        group: g.spec_string(),
        bound,
        negative_terms,
        positivity,
        prop_r_boxes,
        z,
        reduced,
    }
}

// ---------------------------------------------------------------------------
// Young's closed products
// ---------------------------------------------------------------------------

/// `PExp^σ( t/(1-t)^2 · (r + Σ_{α ∈ Σ(A_{r-1})} x^α) )` with
/// `t = t_0...t_{r-1}` and `x^α = Π_{a<=j<=b} t_j^{±1}`.  Equals the
/// coloured series of the `mu_r(1,r-1,0)` action.
pub fn young_product_a(r: u32, bound: i64) -> TruncatedSeries {
    assert!(r >= 1);
    let n = r as usize;
    let mut bracket: Vec<(Vec<i64>, i64)> = vec![(vec![0; n], r as i64)];
    for a in 1..n {
        for b in a..n {
            let mut plus = vec![0i64; n];
            for e in plus.iter_mut().take(b + 1).skip(a) {
                *e = 1;
            }
            let minus: Vec<i64> = plus.iter().map(|&x| -x).collect();
            bracket.push((plus, 1));
            bracket.push((minus, 1));
        }
    }
    pexp_of_bracket(&bracket, n, bound)
}

/// Argument assembly shared by the Young products: expands
/// `Σ_{k>=1} k t^k · bracket` and applies `PExp^σ`.  Every combined
/// exponent must be non-negative, which holds because bracket exponents
/// are at least -1 and `t^k` contributes `k >= 1` to every variable.
fn pexp_of_bracket(bracket: &[(Vec<i64>, i64)], nvars: usize, bound: i64) -> TruncatedSeries {
    let mut arg = TruncatedSeries::zero(nvars, bound);
    let r = nvars as i64;
    let mut k = 1i64;
    while k * r - (r - 1) <= bound {
        for (exps, c) in bracket {
            let comb: Vec<i64> = exps.iter().map(|&x| x + k).collect();
            assert!(comb.iter().all(|&x| x >= 0), "negative combined exponent");
            if comb.iter().sum::<i64>() <= bound {
                arg.add_term(comb, BigInt::from(k * c));
            }
        }
        k += 1;
    }
    arg.pexp_sigma().expect("bracket argument is admissible")
}

/// `PExp^σ( t/(1-t)^2 · (2 + Π_{j=1..3}(t_j^{1/2} - t_j^{-1/2}) ·
/// ((t_1t_2t_3)^{-1/2} - (t_1t_2t_3)^{1/2})) )`, the closed form of the
/// `mu_2 x mu_2` coloured series.  The bracket is expanded through doubled
/// exponents; the sixteen products all have integer exponents.
pub fn young_product_2x2(bound: i64) -> TruncatedSeries {
    let n = 4usize;
    let scratch = 8i64;
    let halved_pair = |exps_pos: Vec<i64>, exps_neg: Vec<i64>| {
        TruncatedSeries::from_halved_terms(
            n,
            scratch,
            [(exps_pos, BigInt::one()), (exps_neg, BigInt::from(-1))],
        )
    };
    let factor = |var: usize| {
        let mut pos = vec![0i64; n];
        pos[var] = 1;
        let mut neg = vec![0i64; n];
        neg[var] = -1;
        halved_pair(pos, neg)
    };
    // (t1 t2 t3)^{-1/2} - (t1 t2 t3)^{1/2}
    let last = halved_pair(vec![0, -1, -1, -1], vec![0, 1, 1, 1]);
    let prod = factor(1)
        .mul(&factor(2))
        .expect("same ring")
        .mul(&factor(3))
        .expect("same ring")
        .mul(&last)
        .expect("same ring");
    let poly = prod.un_halve().expect("half powers combine to integers");
    let mut bracket: Vec<(Vec<i64>, i64)> = vec![(vec![0; n], 2)];
    for (e, c) in poly.terms() {
        use num_traits::ToPrimitive;
        bracket.push((e.clone(), c.to_i64().expect("small coefficient")));
    }
    pexp_of_bracket(&bracket, n, bound)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct YoungReadingsReport {
    pub r: u32,
    pub bound: i64,
    /// The root-system form of the product against the enumerated series.
    pub root_system_reading: Check,
    /// The displayed product over index pairs `0 < a < b < r` against the
    /// enumerated series (empty product for r = 2).
    pub interval_pair_reading: Check,
}

/// Compares both readings of the closed product for `mu_r(1,r-1,0)` with
/// the enumerated series: the root-system sum over all of `Σ(A_{r-1})`,
/// and the literal product over pairs `0 < a < b < r`.
pub fn young_readings_report(r: u32, bound: i64, shards: usize) -> YoungReadingsReport {
    let g = ColourGroup::mu(r, 1, r as i64 - 1, 0);
    let z = z3d(&g, bound, shards);
    let corollary = young_product_a(r, bound);
    let n = r as usize;
    let t = Monomial::ones(n);
    let m = std_series(StdSeriesKind::MacMahonM, None, &t, n, bound).expect("valid");
    let mut displayed = m.pow(r).expect("same ring");
    for a in 1..n {
        for b in (a + 1)..n {
            let mut s = vec![0i64; n];
            for e in s.iter_mut().take(b + 1).skip(a) {
                *e = 1;
            }
            let factor =
                std_series(StdSeriesKind::MTildeSt, Some(&Monomial::new(s)), &t, n, bound)
                    .expect("valid");
            displayed = displayed.mul(&factor).expect("same ring");
        }
    }
    YoungReadingsReport {
        r,
        bound,
        root_system_reading: Check::from_series_eq(
            format!("PExp form (sum over all roots) = z3d(mu_{r}(1,{},0))", r - 1),
            &corollary,
            &z,
        ),
        interval_pair_reading: Check::from_series_eq(
            format!("product over 0<a<b<{r} = z3d(mu_{r}(1,{},0))", r - 1),
            &displayed,
            &z,
        ),
    }
}

// ---------------------------------------------------------------------------
// Orbit analysis and the support cone
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct OrbitReport {
    pub weight: Vec<i64>,
    pub total: u64,
    /// Histogram orbit size -> number of orbits of that size.
    pub orbit_histogram: BTreeMap<usize, u64>,
    pub a3_fixed: u64,
    pub s3_fixed: u64,
}

const PERMS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
const A3_PERMS: [[usize; 3]; 2] = [[1, 2, 0], [2, 0, 1]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotSymmetric;

impl std::fmt::Display for NotSymmetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "orbit analysis needs an S3-invariant colouring (a = b = c)")
    }
}

impl std::error::Error for NotSymmetric {}

/// Groups the plane partitions of colour-weight exactly `w` into orbits
/// under coordinate permutation.  Requires an `S_3`-invariant colouring,
/// i.e. equal weights `a = b = c`.
pub fn s3_orbits(g: &ColourGroup, w: &[i64]) -> Result<OrbitReport, NotSymmetric> {
    if g.dim() != 3 || g.weights()[0] != g.weights()[1] || g.weights()[1] != g.weights()[2] {
        return Err(NotSymmetric);
    }
    assert_eq!(w.len(), g.order());
    let n: i64 = w.iter().sum();
    let mut matching: Vec<PlanePartition> = Vec::new();
    for pp in enum_plane_partitions(n as u32) {
        if pp.weight(g) == w {
            matching.push(pp);
        }
    }
    let mut orbit_histogram: BTreeMap<usize, u64> = BTreeMap::new();
    let mut a3_fixed = 0u64;
    let mut s3_fixed = 0u64;
    let mut seen: std::collections::BTreeSet<PlanePartition> = std::collections::BTreeSet::new();
    for pp in &matching {
        if pp.weight(g) != *w {
            continue;
        }
        let images: Vec<PlanePartition> = PERMS.iter().map(|p| pp.permute(p)).collect();
        let canonical = images.iter().min().unwrap().clone();
        if seen.contains(&canonical) {
            continue;
        }
        seen.insert(canonical);
        let mut distinct = images;
        distinct.sort();
        distinct.dedup();
        *orbit_histogram.entry(distinct.len()).or_insert(0) += 1;
        // fixed-point counts are per element of the orbit
        for q in &distinct {
            if A3_PERMS.iter().all(|p| q.permute(p) == *q) {
                a3_fixed += 1;
                if PERMS.iter().all(|p| q.permute(p) == *q) {
                    s3_fixed += 1;
                }
            }
        }
    }
    // sanity: orbit sizes account for every matching partition
    let accounted: u64 = orbit_histogram.iter().map(|(&s, &c)| s as u64 * c).sum();
    assert_eq!(accounted, matching.len() as u64);
    // a3/s3 fixed elements were counted once per appearance in an orbit
    Ok(OrbitReport {
        weight: w.to_vec(),
        total: matching.len() as u64,
        orbit_histogram,
        a3_fixed,
        s3_fixed,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SupportConeReport {
    /// Weights outside the cone spanned by (1,0,0), (1,3,0), (1,3,6).
    pub violations: Vec<Vec<i64>>,
    /// The three generators with their coefficients.
    pub generator_coeffs: Vec<(Vec<i64>, String)>,
    pub generators_unit: bool,
}

impl SupportConeReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty() && self.generators_unit
    }
}

/// Checks that every weight of a three-variable reduced series lies in the
/// simplicial cone generated by (1,0,0), (1,3,0), (1,3,6): solving
/// `w = λ1 (1,0,0) + λ2 (1,3,0) + λ3 (1,3,6)` gives `λ3 = a2/6`,
/// `λ2 = (2 a1 - a2)/6`, `λ1 = (3 a0 - a1)/3`, so membership is the three
/// integer inequalities `a2 >= 0`, `2 a1 >= a2`, `3 a0 >= a1`.
pub fn support_cone_report(reduced: &TruncatedSeries) -> SupportConeReport {
    assert_eq!(reduced.nvars(), 3, "support cone check is for 3-colour series");
    let mut violations = Vec::new();
    for (e, _) in reduced.terms() {
        let (a0, a1, a2) = (e[0], e[1], e[2]);
        let inside = a2 >= 0 && 2 * a1 >= a2 && 3 * a0 >= a1;
        if !inside {
            violations.push(e.clone());
        }
    }
    violations.sort_by(|a, b| crate::mpoly::graded_lex_cmp(a, b));
    let generators = [vec![1i64, 0, 0], vec![1, 3, 0], vec![1, 3, 6]];
    let generator_coeffs: Vec<(Vec<i64>, String)> =
        generators.iter().map(|gv| (gv.clone(), reduced.coeff(gv).to_string())).collect();
    let generators_unit = generators.iter().all(|gv| reduced.coeff(gv) == BigInt::one());
    SupportConeReport { violations, generator_coeffs, generators_unit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const PP_COUNTS: [u64; 11] = [1, 1, 3, 6, 13, 24, 48, 86, 160, 282, 500];

    #[test]
    fn plane_partition_counts() {
        assert_eq!(enum_plane_partitions(0).len(), 1);
        assert_eq!(enum_plane_partitions(2).len(), 3);
        assert_eq!(enum_plane_partitions(4).len(), 13);
        for n in 0..=8u32 {
            assert_eq!(enum_plane_partitions(n).len() as u64, PP_COUNTS[n as usize]);
        }
    }

    #[test]
    fn dfs_matches_dedup_oracle() {
        // breadth-first closure with explicit deduplication
        let mut level: HashSet<Vec<u8>> = HashSet::new();
        level.insert(vec![0; 10 * 10]);
        let side = 10usize;
        for n in 1..=10u32 {
            let mut next: HashSet<Vec<u8>> = HashSet::new();
            for h in &level {
                for i in 0..side {
                    for j in 0..side {
                        let v = h[i * side + j];
                        let above = if i == 0 { u8::MAX } else { h[(i - 1) * side + j] };
                        let left = if j == 0 { u8::MAX } else { h[i * side + j - 1] };
                        if above > v && left > v {
                            let mut h2 = h.clone();
                            h2[i * side + j] += 1;
                            next.insert(h2);
                        }
                    }
                }
            }
            assert_eq!(next.len() as u64, PP_COUNTS[n as usize], "n = {}", n);
            level = next;
        }
        // and the canonical DFS agrees without any deduplication
        for n in 0..=10u32 {
            assert_eq!(enum_plane_partitions(n).len() as u64, PP_COUNTS[n as usize]);
        }
    }

    #[test]
    fn counts_match_macmahon_per_degree() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let z = z3d(&g, 10, 1);
        let targets = vec![Monomial::unit_var(1, 0); 3];
        let collapsed = z.specialize(&targets, 1, 10).unwrap();
        for n in 0..=10i64 {
            assert_eq!(collapsed.coeff(&[n]), BigInt::from(PP_COUNTS[n as usize]));
        }
    }

    #[test]
    fn sharded_enumeration_is_identical() {
        let g = ColourGroup::mu(4, 1, 1, 2);
        let serial = z3d(&g, 12, 1);
        let sharded = z3d(&g, 12, 4);
        assert_eq!(serial, sharded);
    }

    #[test]
    fn z3d_examples() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let z = z3d(&g, 8, 1);
        assert_eq!(z.coeff(&[1, 1, 1]), BigInt::from(3));
        assert_eq!(z.coeff(&[1, 1, 0]), BigInt::from(3));
        // weights of the two coloured examples pictured in the paper
        // (2,3,3) needs degree 8
        assert!(z.coeff(&[2, 3, 3]) > BigInt::from(0));
    }

    #[test]
    fn prop_r_boxes_all_groups() {
        for g in [
            ColourGroup::mu(3, 1, 1, 1),
            ColourGroup::mu(4, 1, 1, 2),
            ColourGroup::mu(5, 1, 1, 3),
            ColourGroup::mu(6, 1, 2, 3),
            ColourGroup::mu(2, 1, 1, 0),
            ColourGroup::mu2xmu2(),
        ] {
            let r = g.order();
            let z = z3d(&g, r as i64, 1);
            assert_eq!(z.coeff(&vec![1; r]), BigInt::from(r), "group {}", g.spec_string());
        }
    }

    #[test]
    fn signed_series_trivial_group_is_m_minus_t() {
        let g = ColourGroup::mu(1, 0, 0, 0);
        let signed = z3d_signed(&g, 12, 1);
        let t = Monomial::unit_var(1, 0);
        let m = std_series(StdSeriesKind::MacMahonM, None, &t, 1, 12).unwrap();
        let m_neg = TruncatedSeries::from_terms(
            1,
            12,
            m.terms().map(|(e, c)| {
                let c = if e[0] % 2 == 1 { -c.clone() } else { c.clone() };
                (e.clone(), c)
            }),
        );
        assert_eq!(signed.first_difference(&m_neg), None);
    }

    #[test]
    fn signed_series_mu3_low_terms() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let signed = z3d_signed(&g, 4, 1);
        assert_eq!(signed.coeff(&[0, 0, 0]), BigInt::one());
        assert_eq!(signed.coeff(&[1, 1, 1]), BigInt::from(-3));
    }

    #[test]
    fn reduced_series_appendix_spot_checks() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let z = z3d(&g, 9, 1);
        let red = reduce3d(&z, 3, 9);
        assert_eq!(red.coeff(&[3, 3, 3]), BigInt::from(44));
        assert_eq!(red.coeff(&[2, 3, 3]), BigInt::from(46));
        assert_eq!(red.coeff(&[1, 2, 2]), BigInt::from(9));
        assert_eq!(red.coeff(&[1, 0, 0]), BigInt::one());
        assert_eq!(red.coeff(&[1, 1, 0]), BigInt::from(3));
    }

    #[test]
    fn conjecture_report_small() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let rep = verify_conjecture(&g, 9, 1);
        assert!(rep.pass(), "{:?}", rep.negative_terms);
    }

    #[test]
    fn young_product_a_matches_enumeration() {
        for r in [1u32, 2, 3] {
            let bound = if r == 1 { 8 } else { 8 };
            let g = ColourGroup::mu(r, 1, r as i64 - 1, 0);
            let z = z3d(&g, bound, 1);
            let y = young_product_a(r, bound);
            assert_eq!(y.first_difference(&z), None, "r = {}", r);
        }
    }

    #[test]
    fn young_readings_disagree_at_r2() {
        let rep = young_readings_report(2, 8, 1);
        assert!(rep.root_system_reading.pass);
        // the printed index range gives the empty product at r = 2, which
        // misses the M~(t1, t) factor
        assert!(!rep.interval_pair_reading.pass);
        let rep3 = young_readings_report(3, 8, 1);
        assert!(rep3.root_system_reading.pass);
        assert!(!rep3.interval_pair_reading.pass);
    }

    #[test]
    fn young_product_2x2_matches_enumeration() {
        let g = ColourGroup::mu2xmu2();
        let bound = 8;
        let z = z3d(&g, bound, 1);
        let y = young_product_2x2(bound);
        assert_eq!(y.first_difference(&z), None);
        assert_eq!(y.coeff(&[1, 1, 1, 1]), BigInt::from(4));
        assert_eq!(y.coeff(&[0, 0, 0, 0]), BigInt::one());
    }

    #[test]
    fn orbits_small_weights() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let rep = s3_orbits(&g, &[1, 0, 0]).unwrap();
        assert_eq!(rep.total, 1);
        assert_eq!(rep.orbit_histogram.get(&1), Some(&1));
        let rep2 = s3_orbits(&g, &[1, 1, 0]).unwrap();
        assert_eq!(rep2.total, 3);
        assert_eq!(rep2.orbit_histogram.get(&3), Some(&1));
        // asymmetric colourings are rejected
        assert!(s3_orbits(&ColourGroup::mu(4, 1, 1, 2), &[1, 1, 1, 1]).is_err());
    }

    #[test]
    fn orbits_333() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let rep = s3_orbits(&g, &[3, 3, 3]).unwrap();
        assert_eq!(rep.total, 108);
        assert!(rep.orbit_histogram.keys().all(|&s| s == 3 || s == 6));
        assert_eq!(rep.a3_fixed, 0);
        assert_eq!(rep.s3_fixed, 0);
    }

    #[test]
    fn weights_invariant_under_permutation_for_symmetric_groups() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        for pp in enum_plane_partitions(6) {
            let w = pp.weight(&g);
            for p in &PERMS {
                assert_eq!(pp.permute(p).weight(&g), w);
            }
        }
    }

    #[test]
    fn support_cone_checks() {
        let g = ColourGroup::mu(3, 1, 1, 1);
        let z = z3d(&g, 10, 1);
        let red = reduce3d(&z, 3, 10);
        let rep = support_cone_report(&red);
        assert!(rep.pass(), "violations: {:?}", rep.violations);
        // vacuous pass on the empty series
        let empty = TruncatedSeries::zero(3, 5);
        assert!(support_cone_report(&empty).violations.is_empty());
        // negative control: inject a weight outside the cone
        let mut bad = red.clone();
        bad.add_term(vec![0, 1, 0], BigInt::one());
        let rep_bad = support_cone_report(&bad);
        assert_eq!(rep_bad.violations, vec![vec![0, 1, 0]]);
    }
}
