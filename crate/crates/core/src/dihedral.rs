//! Binary dihedral character theory, the coloured octant and
//! D_r-partitions.
//!
//! The group `BD_r` (order `4r-8`) is generated by `A = diag(ξ, ξ^{-1})`
//! with `ξ` a primitive `(2r-4)`-th root of unity and `B = [[0,1],[-1,0]]`.
//! Monomial pairs `span{x^i y^j, x^j y^i}` decompose into irreducibles and
//! colour the octant `0 <= i <= j`; most cells carry one two-dimensional
//! label, the exceptional ones split into two half boxes labelled by the
//! one-dimensional characters `{0,1}` or `{r-1,r}`.
//!
//! Cells are addressed in sheared coordinates `(row i, offset q = j - i)`:
//! the cell type depends only on the offset, its labels only on the offset
//! and the row parity.  "Above" a cell `(i, j)` means `(i+1, j)`, i.e.
//! offset `q - 1` one row up, and the NE diagonal through `(i, j)` is the
//! constant-offset ray `(i+k, j+k)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::cyclotomic::{CycInt, CycRing};
use crate::mpoly::{std_series, Monomial, StdSeriesKind, TruncatedSeries};
use crate::part2d::{theta_series, RootLattice};
use crate::report::Check;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DihedralError {
    RankTooSmall { r: u32 },
}

impl std::fmt::Display for DihedralError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DihedralError::RankTooSmall { r } => {
                write!(f, "binary dihedral construction needs r >= 4, got {}", r)
            }
        }
    }
}

impl std::error::Error for DihedralError {}

/// The exact character table of `BD_r`.
///
/// Class order: identity, `-1 = A^{n/2}`, the classes `{A^k, A^{-k}}` for
/// `k = 1 .. n/2-1`, then the two reflection classes `[B]` and `[BA]`
/// (`n = 2r-4`).  Characters are labelled `ρ_0 = triv`, `ρ_1` the sign
/// character killing `⟨A⟩`, `ρ_2` the defining representation,
/// `ρ_3..ρ_{r-2}` the remaining two-dimensional ones in tensor order, and
/// `ρ_{r-1}, ρ_r` the last two one-dimensional characters.
pub struct BdCharacterTable {
    pub r: u32,
    n: usize,
    ring: CycRing,
    pub class_sizes: Vec<usize>,
    pub dims: Vec<usize>,
    chars: Vec<Vec<CycInt>>,
}

impl BdCharacterTable {
    pub fn new(r: u32) -> Result<Self, DihedralError> {
        if r < 4 {
            return Err(DihedralError::RankTooSmall { r });
        }
        let n = 2 * r as usize - 4;
        let cyc_order = if n % 4 == 0 { n } else { 2 * n }; // lcm(4, n)
        let ring = CycRing::new(cyc_order);
        let half = n / 2;
        let nclasses = half + 3;
        let mut class_sizes = vec![1usize, 1];
        class_sizes.extend(std::iter::repeat(2).take(half - 1));
        class_sizes.push(half);
        class_sizes.push(half);
        debug_assert_eq!(class_sizes.len(), nclasses);
        debug_assert_eq!(class_sizes.iter().sum::<usize>(), 2 * n);

        let xi = |k: i64| ring.zeta_pow(k * (cyc_order as i64 / n as i64));
        let sigma = if r % 2 == 0 { ring.one() } else { ring.zeta_pow(cyc_order as i64 / 4) };
        let minus_one_pow = |e: i64| ring.from_int(if e.rem_euclid(2) == 0 { 1 } else { -1 });

        let mut chars: Vec<Vec<CycInt>> = Vec::new();
        let mut dims: Vec<usize> = Vec::new();
        // ρ_0
        chars.push(vec![ring.one(); nclasses]);
        dims.push(1);
        // ρ_1: trivial on ⟨A⟩, -1 on the reflections
        {
            let mut v = vec![ring.one(); nclasses];
            v[nclasses - 2] = ring.from_int(-1);
            v[nclasses - 1] = ring.from_int(-1);
            chars.push(v);
            dims.push(1);
        }
        // ρ_j = V_{j-1} for j = 2..=r-2
        for j in 2..=(r as usize - 2) {
            let l = (j - 1) as i64;
            let mut v = Vec::with_capacity(nclasses);
            v.push(ring.from_int(2));
            v.push(ring.scale(&minus_one_pow(l), 2));
            for k in 1..half as i64 {
                v.push(ring.add(&xi(l * k), &xi(-l * k)));
            }
            v.push(ring.zero());
            v.push(ring.zero());
            chars.push(v);
            dims.push(2);
        }
        // ρ_{r-1}, ρ_r
        for (which, role) in [(1i64, 0usize), (-1, 1)] {
            let _ = role;
            let mut v = Vec::with_capacity(nclasses);
            v.push(ring.one());
            v.push(minus_one_pow(r as i64));
            for k in 1..half as i64 {
                v.push(minus_one_pow(k));
            }
            v.push(ring.scale(&sigma, which));
            v.push(ring.scale(&sigma, -which));
            chars.push(v);
            dims.push(1);
        }

        let table = BdCharacterTable { r, n, ring, class_sizes, dims, chars };
        table.validate();
        Ok(table)
    }

    fn validate(&self) {
        let order = self.group_order();
        assert_eq!(
            self.dims.iter().map(|d| d * d).sum::<usize>(),
            order,
            "dimension squares must sum to the group order"
        );
        for a in 0..self.chars.len() {
            for b in 0..self.chars.len() {
                let ip = self.inner_product(&self.chars[a], &self.chars[b]);
                assert_eq!(ip, (a == b) as i64, "orthonormality fails at ({}, {})", a, b);
            }
        }
        // tensor labelling rules
        let r = self.r as usize;
        for j in 3..(r - 2) {
            let prod = self.pointwise_mul(&self.chars[j], &self.chars[2]);
            let mut expected = vec![0i64; r + 1];
            expected[j - 1] += 1;
            expected[j + 1] += 1;
            assert_eq!(self.decompose(&prod), expected, "chain rule fails at j = {}", j);
        }
        if r >= 5 {
            let prod = self.pointwise_mul(&self.chars[r - 2], &self.chars[2]);
            let mut expected = vec![0i64; r + 1];
            expected[r - 3] += 1;
            expected[r - 1] += 1;
            expected[r] += 1;
            assert_eq!(self.decompose(&prod), expected, "fork rule fails");
        } else {
            // r = 4: ρ_2 ⊗ ρ_2 = ρ_0 + ρ_1 + ρ_3 + ρ_4
            let prod = self.pointwise_mul(&self.chars[2], &self.chars[2]);
            assert_eq!(self.decompose(&prod), vec![1, 1, 0, 1, 1]);
        }
    }

    pub fn group_order(&self) -> usize {
        2 * self.n
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn character(&self, j: usize) -> &[CycInt] {
        &self.chars[j]
    }

    fn pointwise_mul(&self, a: &[CycInt], b: &[CycInt]) -> Vec<CycInt> {
        a.iter().zip(b).map(|(x, y)| self.ring.mul(x, y)).collect()
    }

    /// `⟨a,b⟩ = (1/|G|) Σ_c |c| a(c) conj(b(c))`, always a rational integer
    /// for virtual characters.
    pub fn inner_product(&self, a: &[CycInt], b: &[CycInt]) -> i64 {
        let mut sum = self.ring.zero();
        for (c, (&size, (x, y))) in self.class_sizes.iter().zip(a.iter().zip(b)).enumerate() {
            let _ = c;
            let term = self.ring.mul(x, &self.ring.conj(y));
            sum = self.ring.add(&sum, &self.ring.scale(&term, size as i64));
        }
        let v = self.ring.as_int(&sum).expect("inner product must be rational");
        let g = self.group_order() as i64;
        assert_eq!(v.rem_euclid(g), 0, "inner product {} not divisible by |G| = {}", v, g);
        v / g
    }

    /// Multiplicities of each irreducible in a class function.
    pub fn decompose(&self, values: &[CycInt]) -> Vec<i64> {
        (0..self.chars.len()).map(|j| self.inner_product(values, &self.chars[j])).collect()
    }
}

// ---------------------------------------------------------------------------
// Octant cells
// ---------------------------------------------------------------------------

/// Content of one octant cell: the 1-dimensional diagonal cells, full boxes
/// carrying a single two-dimensional label, and split cells carrying two
/// half boxes with one-dimensional labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellKind {
    Diagonal { label: usize },
    Full { label: usize },
    Split { labels: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OctantCell {
    pub i: u64,
    pub j: u64,
    pub kind: CellKind,
}

/// Decomposes the module `span{x^i y^j, x^j y^i}` (one-dimensional when
/// `i = j`) by character inner products.
pub fn classify_cell(table: &BdCharacterTable, i: u64, j: u64) -> OctantCell {
    assert!(i <= j, "octant cells have i <= j");
    let ring = &table.ring;
    let n = table.n as i64;
    let half = table.n / 2;
    let cyc = ring.order() as i64;
    let xi = |k: i64| ring.zeta_pow(k.rem_euclid(n) * (cyc / n));
    let nclasses = table.num_classes();
    let mut values = Vec::with_capacity(nclasses);
    if i == j {
        let sign = if i % 2 == 0 { 1 } else { -1 };
        values.push(ring.one());
        values.push(ring.one());
        for _k in 1..half {
            values.push(ring.one());
        }
        values.push(ring.from_int(sign));
        values.push(ring.from_int(sign));
    } else {
        let d = (j - i) as i64;
        values.push(ring.from_int(2));
        values.push(ring.scale(&xi(d * (n / 2)), 2));
        for k in 1..half as i64 {
            values.push(ring.add(&xi(k * d), &xi(-k * d)));
        }
        values.push(ring.zero());
        values.push(ring.zero());
    }
    let mult = table.decompose(&values);
    let present: Vec<usize> = mult
        .iter()
        .enumerate()
        .flat_map(|(l, &m)| {
            assert!(m >= 0, "negative multiplicity");
            std::iter::repeat(l).take(m as usize)
        })
        .collect();
    let kind = match present.as_slice() {
        [l] if i == j => CellKind::Diagonal { label: *l },
        [l] if table.dims[*l] == 2 => CellKind::Full { label: *l },
        [a, b] if table.dims[*a] == 1 && table.dims[*b] == 1 => CellKind::Split { labels: [*a, *b] },
        other => panic!("unexpected cell decomposition {:?} at ({}, {})", other, i, j),
    };
    OctantCell { i, j, kind }
}

// ---------------------------------------------------------------------------
// The row pattern and D_r-partitions
// ---------------------------------------------------------------------------

/// Which half of a split cell a row's frontier occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Frontier {
    None,
    Lower,
    Upper,
}

/// One row of a D_r-partition in sheared coordinates: a fully present
/// prefix of `complete` cells plus optionally one half of the next cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowState {
    pub complete: usize,
    pub frontier: Frontier,
}

/// A D_r-partition, stored as its non-empty rows from the bottom up.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DrPartition {
    pub rows: Vec<RowState>,
}

/// Resolved cell content per parity and offset, with the half-box label
/// assignment frozen: split labels alternate along NE diagonals (tensoring
/// with the sign character), anchored so that even rows carry `r-1` on the
/// lower half of a `{r-1,r}` cell and `1` on the lower half of a `{0,1}`
/// cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternCell {
    Diagonal { label: usize },
    Full { label: usize },
    Split { lower: usize, upper: usize },
}

pub struct OctantPattern {
    pub r: u32,
    /// `cells[offset][parity]`
    cells: Vec<[PatternCell; 2]>,
    /// cumulative half-box units of a complete prefix (parity independent)
    prefix_units: Vec<i64>,
    /// cumulative weight vector of a complete prefix, per parity
    prefix_weight: Vec<[Vec<i64>; 2]>,
}

impl OctantPattern {
    pub fn new(table: &BdCharacterTable, max_offset: usize) -> Self {
        let r = table.r;
        let nlab = r as usize + 1;
        let mut cells = Vec::with_capacity(max_offset + 1);
        for q in 0..=max_offset {
            let mut per_parity = Vec::with_capacity(2);
            for p in 0..2u64 {
                let cell = classify_cell(table, p, p + q as u64);
                let pc = match cell.kind {
                    CellKind::Diagonal { label } => PatternCell::Diagonal { label },
                    CellKind::Full { label } => PatternCell::Full { label },
                    CellKind::Split { labels } => {
                        let lo = *labels.iter().min().unwrap();
                        let hi = *labels.iter().max().unwrap();
                        // {0,1}: even rows carry 1 below; {r-1,r}: even rows
                        // carry r-1 below; odd rows swap
                        let zero_one = lo == 0;
                        let (lower, upper) = match (zero_one, p % 2 == 0) {
                            (true, true) => (hi, lo),
                            (true, false) => (lo, hi),
                            (false, true) => (lo, hi),
                            (false, false) => (hi, lo),
                        };
                        PatternCell::Split { lower, upper }
                    }
                };
                per_parity.push(pc);
            }
            cells.push([per_parity[0].clone(), per_parity[1].clone()]);
        }
        let mut prefix_units = vec![0i64];
        let mut prefix_weight = vec![[vec![0i64; nlab], vec![0i64; nlab]]];
        for q in 0..=max_offset {
            let last_u = *prefix_units.last().unwrap();
            let u = match cells[q][0] {
                PatternCell::Split { .. } => 2,
                _ => 1,
            };
            prefix_units.push(last_u + u);
            let mut next = prefix_weight.last().unwrap().clone();
            for p in 0..2 {
                match &cells[q][p] {
                    PatternCell::Diagonal { label } | PatternCell::Full { label } => {
                        next[p][*label] += 1;
                    }
                    PatternCell::Split { lower, upper } => {
                        next[p][*lower] += 1;
                        next[p][*upper] += 1;
                    }
                }
            }
            prefix_weight.push(next);
        }
        OctantPattern { r, cells, prefix_units, prefix_weight }
    }

    pub fn max_offset(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cell(&self, parity: usize, offset: usize) -> &PatternCell {
        &self.cells[offset][parity]
    }

    pub fn is_split(&self, offset: usize) -> bool {
        matches!(self.cells[offset][0], PatternCell::Split { .. })
    }

    /// Half-box units of a complete prefix of `m` cells.
    pub fn prefix_units(&self, m: usize) -> i64 {
        self.prefix_units[m]
    }

    fn row_weight(&self, parity: usize, row: &RowState) -> Vec<i64> {
        let mut w = self.prefix_weight[row.complete][parity].clone();
        match row.frontier {
            Frontier::None => {}
            half => {
                if let PatternCell::Split { lower, upper } = self.cell(parity, row.complete) {
                    let label = if half == Frontier::Lower { *lower } else { *upper };
                    w[label] += 1;
                } else {
                    panic!("frontier half on a non-split cell");
                }
            }
        }
        w
    }

    fn row_units(&self, row: &RowState) -> i64 {
        self.prefix_units(row.complete) + (row.frontier != Frontier::None) as i64
    }
}

impl DrPartition {
    /// Builds a D_r-partition and re-validates the defining rules.
    pub fn new(rows: Vec<RowState>, pattern: &OctantPattern) -> Result<Self, String> {
        let pp = DrPartition { rows };
        validate_dr(&pp, pattern, Rule2Reading::DiagonalRay)?;
        Ok(pp)
    }

    pub fn total_units(&self, pattern: &OctantPattern) -> i64 {
        self.rows.iter().map(|r| pattern.row_units(r)).sum()
    }

    /// Per-label half-box counts (half boxes count one unit each).
    pub fn weight(&self, pattern: &OctantPattern) -> Vec<i64> {
        let mut w = vec![0i64; pattern.r as usize + 1];
        for (i, row) in self.rows.iter().enumerate() {
            for (l, c) in pattern.row_weight(i % 2, row).iter().enumerate() {
                w[l] += c;
            }
        }
        w
    }
}

/// How to read rule (2): missing boxes kill the same sub-box position along
/// the full NE diagonal ray, or (alternate reading) both the cell above and
/// the cell to the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule2Reading {
    DiagonalRay,
    BothNeighbours,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CellContent {
    Single(bool),
    Pair { lower: bool, upper: bool },
}

impl CellContent {
    fn fully_present(&self) -> bool {
        match *self {
            CellContent::Single(b) => b,
            CellContent::Pair { lower, upper } => lower && upper,
        }
    }

    fn fully_absent(&self) -> bool {
        match *self {
            CellContent::Single(b) => !b,
            CellContent::Pair { lower, upper } => !lower && !upper,
        }
    }
}

/// Expands a row-state description into an explicit content grid of
/// `rows x cols` cells.
fn explicit_content(pp: &DrPartition, pattern: &OctantPattern, rows: usize, cols: usize) -> Vec<Vec<CellContent>> {
    let mut grid = Vec::with_capacity(rows);
    for i in 0..rows {
        let state = pp.rows.get(i);
        let mut row = Vec::with_capacity(cols);
        for q in 0..cols {
            let split = pattern.is_split(q);
            let present_full = state.is_some_and(|s| q < s.complete);
            let content = if split {
                if present_full {
                    CellContent::Pair { lower: true, upper: true }
                } else if state.is_some_and(|s| q == s.complete) {
                    match state.unwrap().frontier {
                        Frontier::None => CellContent::Pair { lower: false, upper: false },
                        Frontier::Lower => CellContent::Pair { lower: true, upper: false },
                        Frontier::Upper => CellContent::Pair { lower: false, upper: true },
                    }
                } else {
                    CellContent::Pair { lower: false, upper: false }
                }
            } else {
                CellContent::Single(present_full)
            };
            row.push(content);
        }
        grid.push(row);
    }
    grid
}

/// Checks rules (1)-(4) literally on the explicit box set.
pub fn validate_dr(
    pp: &DrPartition,
    pattern: &OctantPattern,
    reading: Rule2Reading,
) -> Result<(), String> {
    for row in &pp.rows {
        if row.complete == 0 && row.frontier == Frontier::None {
            return Err("empty row stored explicitly".into());
        }
        if row.frontier != Frontier::None && !pattern.is_split(row.complete) {
            return Err(format!("frontier half on non-split offset {}", row.complete));
        }
        if row.complete > pattern.max_offset() {
            return Err("row exceeds pattern window".into());
        }
    }
    let rows = pp.rows.len() + 2;
    let cols = pp.rows.iter().map(|r| r.complete + 2).max().unwrap_or(2).min(pattern.max_offset() + 1);
    let grid = explicit_content(pp, pattern, rows, cols);
    let cell = |i: usize, q: usize| -> CellContent {
        grid[i][q]
    };
    for i in 0..rows {
        for q in 0..cols {
            match cell(i, q) {
                CellContent::Single(present) => {
                    if !present {
                        // rule (1): nothing to the right, and not all of the
                        // cell above is present
                        for q2 in q + 1..cols {
                            if !cell(i, q2).fully_absent() {
                                return Err(format!(
                                    "rule 1: box right of missing full box ({}, {})",
                                    i, q
                                ));
                            }
                        }
                        if q >= 1 && i + 1 < rows && cell(i + 1, q - 1).fully_present() {
                            return Err(format!(
                                "rule 1: cell above missing full box ({}, {}) is full",
                                i, q
                            ));
                        }
                        // rule (2) for the full box position
                        match reading {
                            Rule2Reading::DiagonalRay => {
                                for k in 1..rows - i {
                                    if !cell(i + k, q).fully_absent() {
                                        return Err(format!(
                                            "rule 2: diagonal above missing box ({}, {})",
                                            i, q
                                        ));
                                    }
                                }
                            }
                            Rule2Reading::BothNeighbours => {
                                if q + 1 < cols && !cell(i, q + 1).fully_absent() {
                                    return Err(format!("rule 2B at ({}, {})", i, q));
                                }
                                if q >= 1 && i + 1 < rows && !cell(i + 1, q - 1).fully_absent() {
                                    return Err(format!("rule 2B above ({}, {})", i, q));
                                }
                            }
                        }
                    }
                }
                CellContent::Pair { lower, upper } => {
                    for (which, present) in [(Frontier::Lower, lower), (Frontier::Upper, upper)] {
                        if !present {
                            // rule (3): the full box to the right is absent
                            if q + 1 < cols && !cell(i, q + 1).fully_absent() {
                                return Err(format!(
                                    "rule 3: box right of missing half ({}, {})",
                                    i, q
                                ));
                            }
                            // rule (2): same half position along the ray
                            match reading {
                                Rule2Reading::DiagonalRay => {
                                    for k in 1..rows - i {
                                        let ok = match cell(i + k, q) {
                                            CellContent::Pair { lower, upper } => {
                                                if which == Frontier::Lower {
                                                    !lower
                                                } else {
                                                    !upper
                                                }
                                            }
                                            CellContent::Single(_) => {
                                                unreachable!("split column stays split")
                                            }
                                        };
                                        if !ok {
                                            return Err(format!(
                                                "rule 2: half above missing half ({}, {})",
                                                i, q
                                            ));
                                        }
                                    }
                                }
                                Rule2Reading::BothNeighbours => {
                                    if q + 1 < cols && !cell(i, q + 1).fully_absent() {
                                        return Err(format!("rule 2B at split ({}, {})", i, q));
                                    }
                                    if q >= 1 && i + 1 < rows && !cell(i + 1, q - 1).fully_absent()
                                    {
                                        return Err(format!("rule 2B above split ({}, {})", i, q));
                                    }
                                }
                            }
                        }
                    }
                    if !lower && !upper {
                        // rule (4): the full box immediately above is absent
                        if q >= 1 && i + 1 < rows && !cell(i + 1, q - 1).fully_absent() {
                            return Err(format!(
                                "rule 4: box above empty split cell ({}, {})",
                                i, q
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Rule variants for the negative-control test: `NoEmptySplitRule` drops the
/// rule-(4) strengthening at an empty split frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RuleSet {
    Standard,
    NoEmptySplitRule,
}

fn dr_walk(
    pattern: &OctantPattern,
    budget: i64,
    rules: RuleSet,
    f: &mut impl FnMut(&[RowState], &[i64]),
) {
    let nlab = pattern.r as usize + 1;
    let mut rows: Vec<RowState> = Vec::new();
    let mut weight = vec![0i64; nlab];
    fn extend(
        pattern: &OctantPattern,
        rules: RuleSet,
        budget_left: i64,
        rows: &mut Vec<RowState>,
        weight: &mut Vec<i64>,
        f: &mut impl FnMut(&[RowState], &[i64]),
    ) {
        f(rows, weight);
        let parity = rows.len() % 2;
        // admissible range for the next row's complete-prefix length
        let (m_cap, eq_frontier) = match rows.last() {
            None => (usize::MAX, None),
            Some(prev) => {
                let split = pattern.is_split(prev.complete);
                match (split, prev.frontier) {
                    (true, Frontier::Lower) | (true, Frontier::Upper) => {
                        (prev.complete, Some(prev.frontier))
                    }
                    (true, Frontier::None) => {
                        let cap = if rules == RuleSet::NoEmptySplitRule {
                            prev.complete
                        } else {
                            prev.complete.saturating_sub(1)
                        };
                        (cap, None)
                    }
                    (false, _) => (prev.complete.saturating_sub(1), None),
                }
            }
        };
        let mut m = 1usize;
        while m <= m_cap && m <= pattern.max_offset() && pattern.prefix_units(m) <= budget_left {
            let split = pattern.is_split(m);
            let mut options = vec![Frontier::None];
            if split && pattern.prefix_units(m) + 1 <= budget_left {
                options.push(Frontier::Lower);
                options.push(Frontier::Upper);
            }
            for h in options {
                if m == m_cap && eq_frontier.is_some() {
                    // equal length above a half frontier: only the same half
                    // (or nothing) may survive
                    if h != Frontier::None && Some(h) != eq_frontier {
                        continue;
                    }
                }
                let row = RowState { complete: m, frontier: h };
                let u = pattern.row_units(&row);
                if u > budget_left {
                    continue;
                }
                let w = pattern.row_weight(parity, &row);
                for (l, c) in w.iter().enumerate() {
                    weight[l] += c;
                }
                rows.push(row);
                extend(pattern, rules, budget_left - u, rows, weight, f);
                rows.pop();
                for (l, c) in w.iter().enumerate() {
                    weight[l] -= c;
                }
            }
            m += 1;
        }
    }
    extend(pattern, rules, budget, &mut rows, &mut weight, f);
}

/// All D_r-partitions of total weight at most `max_weight`, by incremental
/// row growth.  Every emitted object passes the rule validator.
pub fn enum_dr_partitions(r: u32, max_weight: i64) -> Vec<DrPartition> {
    let table = BdCharacterTable::new(r).expect("r >= 4");
    let pattern = OctantPattern::new(&table, max_weight.max(1) as usize);
    let mut out = Vec::new();
    dr_walk(&pattern, max_weight, RuleSet::Standard, &mut |rows, _w| {
        out.push(DrPartition { rows: rows.to_vec() });
    });
    out
}

pub(crate) fn z_dr_with_rules(r: u32, bound: i64, rules: RuleSet) -> TruncatedSeries {
    let table = BdCharacterTable::new(r).expect("r >= 4");
    let pattern = OctantPattern::new(&table, bound.max(1) as usize);
    let mut out = TruncatedSeries::zero(r as usize + 1, bound);
    dr_walk(&pattern, bound, rules, &mut |_rows, w| {
        out.add_term(w.to_vec(), BigInt::one());
    });
    out
}

/// The coloured D_r-partition generating function `Σ_β x^{w(β)}` up to
/// total degree `bound`, in the `r+1` variables `t_0 .. t_r`.
pub fn z_dr(r: u32, bound: i64) -> TruncatedSeries {
    z_dr_with_rules(r, bound, RuleSet::Standard)
}

/// The type-D theta sum with base `t = t_0 t_1 t_{r-1} t_r Π_{j=2}^{r-2} t_j²`.
pub fn theta_sum_d(r: u32, bound: i64) -> TruncatedSeries {
    assert!(r >= 4);
    let lattice = RootLattice::type_d(r as usize);
    let nvars = r as usize + 1;
    let mut t_exps = vec![1i64; nvars];
    for e in t_exps.iter_mut().take(r as usize - 1).skip(2) {
        *e = 2;
    }
    let coord_vars: Vec<usize> = (1..=r as usize).collect();
    theta_series(&lattice, nvars, &t_exps, &coord_vars, bound)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyDrReport {
    pub r: u32,
    pub bound: i64,
    pub checks: Vec<Check>,
    /// Count of core D_r-partitions (theta terms) per total degree.
    pub core_counts_by_degree: BTreeMap<i64, u64>,
    pub notes: Vec<String>,
}

impl VerifyDrReport {
    /// The factorisation check decides the outcome; the alternate-reading
    /// check is informational.
    pub fn pass(&self) -> bool {
        self.checks.iter().filter(|c| !c.name.contains("alternate")).all(|c| c.pass)
    }
}

/// Checks `z_dr = E(t)^{r+1} · theta_D` up to the bound and reports the
/// core D_r-partition counts; also evaluates the alternate reading of rule
/// (2) at a small bound.
pub fn verify_dr(r: u32, bound: i64) -> VerifyDrReport {
    let mut checks = Vec::new();
    let z = z_dr(r, bound);
    let nvars = r as usize + 1;
    let mut t_exps = vec![1i64; nvars];
    for e in t_exps.iter_mut().take(r as usize - 1).skip(2) {
        *e = 2;
    }
    let t = Monomial::new(t_exps);
    let e = std_series(StdSeriesKind::EulerE, None, &t, nvars, bound)
        .expect("E(t) substitution is valid");
    let er = e.pow(r + 1).expect("same ring");
    let theta = theta_sum_d(r, bound);
    let rhs = er.mul(&theta).expect("same ring");
    checks.push(Check::from_series_eq(
        format!("z_dr({r}) = E(t)^{} * theta_D up to degree {bound}", r + 1),
        &z,
        &rhs,
    ));

    let mut core_counts_by_degree: BTreeMap<i64, u64> = BTreeMap::new();
    for (exps, _) in theta.terms() {
        *core_counts_by_degree.entry(exps.iter().sum()).or_insert(0) += 1;
    }

    // alternate reading of rule (2): filter the unconstrained row universe
    // with the literal validator and compare at a small bound
    let alt_bound = bound.min(6);
    let table = BdCharacterTable::new(r).expect("r >= 4");
    let pattern = OctantPattern::new(&table, alt_bound.max(1) as usize);
    let mut alt = TruncatedSeries::zero(nvars, alt_bound);
    for_each_unconstrained(&pattern, alt_bound, &mut |rows| {
        let pp = DrPartition { rows: rows.to_vec() };
        if validate_dr(&pp, &pattern, Rule2Reading::BothNeighbours).is_ok() {
            alt.add_term(pp.weight(&pattern), BigInt::one());
        }
    });
    let alt_check = Check::from_series_eq(
        format!("alternate rule-2 reading (both neighbours) up to degree {alt_bound}"),
        &alt,
        &rhs.truncate(alt_bound),
    )
    .with_detail("informational: records whether the alternate reading also matches".into());
    checks.push(alt_check);

    VerifyDrReport {
        r,
        bound,
        checks,
        core_counts_by_degree,
        notes: vec![
            "rule (2) is read as: a missing box kills the same sub-box position along the \
             whole NE diagonal ray"
                .to_string(),
        ],
    }
}

/// Enumerates all row-state sequences with unit sum <= budget and no
/// between-row constraints (the generate-then-filter universe).
pub(crate) fn for_each_unconstrained(
    pattern: &OctantPattern,
    budget: i64,
    f: &mut impl FnMut(&[RowState]),
) {
    fn extend(
        pattern: &OctantPattern,
        budget_left: i64,
        rows: &mut Vec<RowState>,
        f: &mut impl FnMut(&[RowState]),
    ) {
        f(rows);
        let mut m = 1usize;
        while m <= pattern.max_offset() && pattern.prefix_units(m) <= budget_left {
            let split = pattern.is_split(m);
            let mut options = vec![Frontier::None];
            if split && pattern.prefix_units(m) + 1 <= budget_left {
                options.push(Frontier::Lower);
                options.push(Frontier::Upper);
            }
            for h in options {
                let row = RowState { complete: m, frontier: h };
                let u = pattern.row_units(&row);
                if u > budget_left {
                    continue;
                }
                rows.push(row);
                extend(pattern, budget_left - u, rows, f);
                rows.pop();
            }
            m += 1;
        }
    }
    let mut rows = Vec::new();
    extend(pattern, budget, &mut rows, f);
}

/// Versioned text rendering of the octant pattern, the golden layout
/// format: one line per (parity, offset) pair.
pub fn render_layout(r: u32, max_offset: usize) -> String {
    let table = BdCharacterTable::new(r).expect("r >= 4");
    let pattern = OctantPattern::new(&table, max_offset);
    let mut out = format!("drlayout v1 r={} max_offset={}\n", r, max_offset);
    for parity in 0..2 {
        for q in 0..=max_offset {
            let line = match pattern.cell(parity, q) {
                PatternCell::Diagonal { label } => {
                    format!("parity {} offset {}: diag {}", parity, q, label)
                }
                PatternCell::Full { label } => {
                    format!("parity {} offset {}: full {}", parity, q, label)
                }
                PatternCell::Split { lower, upper } => {
                    format!("parity {} offset {}: split lower={} upper={}", parity, q, lower, upper)
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn character_table_r4() {
        let t = BdCharacterTable::new(4).unwrap();
        assert_eq!(t.group_order(), 8);
        assert_eq!(t.num_classes(), 5);
        assert_eq!(t.dims, vec![1, 1, 2, 1, 1]);
        // ρ_2 ⊗ ρ_2 contains the trivial representation
        let sq = t.pointwise_mul(t.character(2), t.character(2));
        assert_eq!(t.decompose(&sq)[0], 1);
    }

    #[test]
    fn character_tables_validate_up_to_r7() {
        for r in 4..=7u32 {
            let t = BdCharacterTable::new(r).unwrap();
            assert_eq!(t.group_order(), 4 * r as usize - 8);
            assert_eq!(t.num_classes(), r as usize + 1);
        }
        assert!(BdCharacterTable::new(3).is_err());
    }

    #[test]
    fn classify_origin_and_splits() {
        let t = BdCharacterTable::new(4).unwrap();
        assert_eq!(classify_cell(&t, 0, 0).kind, CellKind::Diagonal { label: 0 });
        assert_eq!(classify_cell(&t, 1, 1).kind, CellKind::Diagonal { label: 1 });
        // split cells carry the pairs {r-1, r} or {0, 1}
        assert_eq!(classify_cell(&t, 0, 2).kind, CellKind::Split { labels: [3, 4] });
        assert_eq!(classify_cell(&t, 0, 4).kind, CellKind::Split { labels: [0, 1] });
        for r in 5..=6u32 {
            let t = BdCharacterTable::new(r).unwrap();
            let n = 2 * r as u64 - 4;
            let s1 = classify_cell(&t, 0, n / 2);
            assert_eq!(s1.kind, CellKind::Split { labels: [r as usize - 1, r as usize] });
            let s2 = classify_cell(&t, 1, 1 + n);
            assert_eq!(s2.kind, CellKind::Split { labels: [0, 1] });
        }
    }

    #[test]
    fn bottom_row_sequence_r4() {
        // offsets 0..: 0, 2, {3,4}, 2, {0,1}, 2, {3,4}, 2, {0,1}, periodic
        let t = BdCharacterTable::new(4).unwrap();
        let pattern = OctantPattern::new(&t, 8);
        let expect = [
            PatternCell::Diagonal { label: 0 },
            PatternCell::Full { label: 2 },
            PatternCell::Split { lower: 3, upper: 4 },
            PatternCell::Full { label: 2 },
            PatternCell::Split { lower: 1, upper: 0 },
            PatternCell::Full { label: 2 },
            PatternCell::Split { lower: 3, upper: 4 },
            PatternCell::Full { label: 2 },
            PatternCell::Split { lower: 1, upper: 0 },
        ];
        for (q, e) in expect.iter().enumerate() {
            assert_eq!(pattern.cell(0, q), e, "offset {}", q);
        }
    }

    #[test]
    fn labels_alternate_along_diagonals() {
        for r in [4u32, 5, 6] {
            let t = BdCharacterTable::new(r).unwrap();
            for q in 0..=(4 * r as u64 - 8) {
                for i in 0..2u64 {
                    let a = classify_cell(&t, i, i + q).kind;
                    let b = classify_cell(&t, i + 1, i + 1 + q).kind;
                    match (a, b) {
                        (CellKind::Full { label: x }, CellKind::Full { label: y }) => {
                            assert_eq!(x, y)
                        }
                        (CellKind::Diagonal { label: x }, CellKind::Diagonal { label: y }) => {
                            assert_eq!(x ^ 1, y)
                        }
                        (CellKind::Split { labels: x }, CellKind::Split { labels: y }) => {
                            assert_eq!(x, y)
                        }
                        (a, b) => panic!("cell type changed along diagonal: {:?} vs {:?}", a, b),
                    }
                }
            }
        }
    }

    #[test]
    fn enum_small_weights() {
        let pps = enum_dr_partitions(4, 0);
        assert_eq!(pps.len(), 1); // only the empty partition
        let table = BdCharacterTable::new(4).unwrap();
        let pattern = OctantPattern::new(&table, 4);
        let pps1: Vec<_> =
            enum_dr_partitions(4, 1).into_iter().filter(|p| p.total_units(&pattern) == 1).collect();
        assert_eq!(pps1.len(), 1);
        assert_eq!(pps1[0].rows, vec![RowState { complete: 1, frontier: Frontier::None }]);
        assert_eq!(pps1[0].weight(&pattern), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn figure_examples_are_emitted_and_valid() {
        let table = BdCharacterTable::new(4).unwrap();
        let pattern = OctantPattern::new(&table, 10);
        let all = enum_dr_partitions(4, 10);
        let set: BTreeSet<_> = all.iter().cloned().collect();
        // first pictured D_4-partition: bottom row 0,2,{3,4},2 and the
        // diagonal box 1 above
        let fig1 = DrPartition {
            rows: vec![
                RowState { complete: 4, frontier: Frontier::None },
                RowState { complete: 1, frontier: Frontier::None },
            ],
        };
        assert!(set.contains(&fig1));
        assert_eq!(fig1.weight(&pattern), vec![1, 1, 2, 1, 1]);
        // third pictured one: two rows ending in upper halves
        let fig3 = DrPartition {
            rows: vec![
                RowState { complete: 2, frontier: Frontier::Upper },
                RowState { complete: 2, frontier: Frontier::Upper },
            ],
        };
        assert!(set.contains(&fig3));
        assert!(DrPartition::new(fig3.rows.clone(), &pattern).is_ok());
    }

    #[test]
    fn generator_agrees_with_filter_oracle() {
        for r in [4u32, 5] {
            let budget = if r == 4 { 8 } else { 7 };
            let table = BdCharacterTable::new(r).unwrap();
            let pattern = OctantPattern::new(&table, budget as usize);
            let generated: BTreeSet<DrPartition> =
                enum_dr_partitions(r, budget).into_iter().collect();
            let mut filtered: BTreeSet<DrPartition> = BTreeSet::new();
            for_each_unconstrained(&pattern, budget, &mut |rows| {
                let pp = DrPartition { rows: rows.to_vec() };
                if validate_dr(&pp, &pattern, Rule2Reading::DiagonalRay).is_ok() {
                    filtered.insert(pp);
                }
            });
            assert_eq!(generated, filtered, "r = {}", r);
        }
    }

    #[test]
    fn z_dr_low_degrees_r4() {
        let z = z_dr(4, 4);
        assert_eq!(z.coeff(&[0, 0, 0, 0, 0]), BigInt::one());
        assert_eq!(z.coeff(&[1, 0, 0, 0, 0]), BigInt::one());
        // degree 2: only the diagonal box plus one full box
        assert_eq!(z.coeff(&[1, 0, 1, 0, 0]), BigInt::one());
        assert_eq!(
            z.terms().filter(|(e, _)| e.iter().sum::<i64>() == 2).count(),
            1
        );
        // degree 3: three partitions
        assert_eq!(z.coeff(&[1, 0, 1, 1, 0]), BigInt::one());
        assert_eq!(z.coeff(&[1, 0, 1, 0, 1]), BigInt::one());
        assert_eq!(z.coeff(&[1, 1, 1, 0, 0]), BigInt::one());
    }

    #[test]
    fn theta_d_basics() {
        let th = theta_sum_d(4, 8);
        assert_eq!(th.coeff(&[0, 0, 0, 0, 0]), BigInt::one());
        // m = e_i gives degree (2r-2) + 1 = 7 terms with Q = 1
        assert_eq!(th.coeff(&[1, 2, 2, 1, 1]), BigInt::one()); // m = e_1
        assert_eq!(th.coeff(&[1, 0, 1, 0, 0]), BigInt::one()); // m = -(highest root)
    }

    #[test]
    fn verify_dr_passes() {
        let rep4 = verify_dr(4, 10);
        assert!(rep4.pass(), "{:?}", rep4.checks);
        let rep5 = verify_dr(5, 8);
        assert!(rep5.pass(), "{:?}", rep5.checks);
    }

    #[test]
    fn perturbed_rules_fail_with_discrepancy() {
        let z_std = z_dr(4, 8);
        let z_bad = z_dr_with_rules(4, 8, RuleSet::NoEmptySplitRule);
        let diff = z_std.first_difference(&z_bad);
        assert!(diff.is_some());
    }

    #[test]
    fn layout_render_stable() {
        let layout = render_layout(4, 6);
        assert!(layout.starts_with("drlayout v1 r=4 max_offset=6\n"));
        assert!(layout.contains("parity 0 offset 2: split lower=3 upper=4"));
        assert!(layout.contains("parity 1 offset 2: split lower=4 upper=3"));
    }
}
