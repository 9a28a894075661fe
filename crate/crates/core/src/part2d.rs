//! Partitions, the diagonal `mu_r(1,r-1)` colouring, the r-core/r-quotient
//! bijection via beta-numbers, root-lattice theta sums and the
//! factorisation check `Z = E(t)^r * theta`.
//!
//! Beta-number convention: pad the partition with zero parts to a length
//! `s ≡ 0 (mod r)` and take `β_i = λ_i + s - i`; runner `j` of the abacus
//! collects the beta-numbers congruent to `j` mod `r`.  The convention is
//! stable under enlarging `s` by a multiple of `r`.

use num_bigint::BigInt;
use num_traits::One;

use crate::mpoly::{std_series, Monomial, StdSeriesKind, TruncatedSeries};
use crate::qtorus::{Pairing, QLaurent, QSeries};
use crate::report::Check;

/// An integer partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]) && parts.iter().all(|&p| p > 0),
            "parts must be weakly decreasing and positive"
        );
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of boxes.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Part at (0-based) row index, zero beyond the last row.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Hook length of the box in column `i` of row `j` (both 0-based).
    fn hook_length(&self, i: u32, j: usize) -> u32 {
        let arm = self.parts[j] - 1 - i;
        let leg = self.parts.iter().skip(j + 1).take_while(|&&p| p > i).count() as u32;
        arm + leg + 1
    }

    /// A partition is an r-core iff no hook length is divisible by r.
    pub fn is_r_core_by_hooks(&self, r: u32) -> bool {
        for j in 0..self.parts.len() {
            for i in 0..self.parts[j] {
                if self.hook_length(i, j) % r == 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// All partitions of `n`, each exactly once, first part descending.
pub fn enum_partitions(n: u32) -> Vec<Partition> {
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        let hi = max.min(n);
        for p in (1..=hi).rev() {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    go(n, n.max(1), &mut cur, &mut out);
    out
}

/// Per-colour box counts of a partition under the `mu_r(1,r-1)` colouring:
/// the box in column `i` of row `j` has colour `(i - j) mod r`.
pub fn weight2d(r: u32, lam: &Partition) -> Vec<i64> {
    assert!(r >= 1);
    let mut w = vec![0i64; r as usize];
    for (j, &p) in lam.parts().iter().enumerate() {
        for i in 0..p as i64 {
            let c = (i - j as i64).rem_euclid(r as i64) as usize;
            w[c] += 1;
        }
    }
    w
}

/// The coloured partition generating function `Σ_λ x^{w(λ)}` over all
/// partitions with at most `bound` boxes.
pub fn z2d(r: u32, bound: i64) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(r as usize, bound);
    for n in 0..=bound as u32 {
        for lam in enum_partitions(n) {
            out.add_term(weight2d(r, &lam), BigInt::one());
        }
    }
    out
}

/// The coloured generating function of r-cores with at most `bound` boxes.
pub fn r_core_series(r: u32, bound: i64) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(r as usize, bound);
    for n in 0..=bound as u32 {
        for lam in enum_partitions(n) {
            let (_, quots) = core_quotient(&lam, r);
            if quots.iter().all(|q| q.is_empty()) {
                out.add_term(weight2d(r, &lam), BigInt::one());
            }
        }
    }
    out
}

fn beta_numbers(lam: &Partition, s: usize) -> Vec<u64> {
    (1..=s).map(|i| lam.part(i - 1) as u64 + (s - i) as u64).collect()
}

fn partition_from_betas(mut betas: Vec<u64>) -> Partition {
    betas.sort_unstable_by(|a, b| b.cmp(a));
    let s = betas.len();
    let parts: Vec<u32> = betas
        .iter()
        .enumerate()
        .map(|(idx, &b)| (b - (s - 1 - idx) as u64) as u32)
        .filter(|&p| p > 0)
        .collect();
    Partition::new(parts)
}

/// The r-core and r-quotient of a partition.  The box-count identity
/// `|λ| = |core| + r·Σ|quotient_j|` always holds.
pub fn core_quotient(lam: &Partition, r: u32) -> (Partition, Vec<Partition>) {
    assert!(r >= 1);
    let r = r as usize;
    let len = lam.len();
    let s = len.div_ceil(r) * r;
    let betas = beta_numbers(lam, s);
    let mut runner_levels: Vec<Vec<u64>> = vec![Vec::new(); r];
    for &b in &betas {
        runner_levels[(b % r as u64) as usize].push(b / r as u64);
    }
    // betas are strictly decreasing, so each runner's levels are too
    let quotients: Vec<Partition> = runner_levels
        .iter()
        .map(|levels| {
            let k = levels.len();
            let parts: Vec<u32> = levels
                .iter()
                .enumerate()
                .map(|(idx, &l)| (l - (k - 1 - idx) as u64) as u32)
                .filter(|&p| p > 0)
                .collect();
            Partition::new(parts)
        })
        .collect();
    let mut core_betas = Vec::with_capacity(s);
    for (j, levels) in runner_levels.iter().enumerate() {
        for lvl in 0..levels.len() as u64 {
            core_betas.push(lvl * r as u64 + j as u64);
        }
    }
    (partition_from_betas(core_betas), quotients)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotAnRCore;

impl std::fmt::Display for NotAnRCore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "core argument is not an r-core")
    }
}

impl std::error::Error for NotAnRCore {}

/// Inverse of [`core_quotient`] under the same beta-number convention.
pub fn from_core_quotient(
    core: &Partition,
    quotients: &[Partition],
    r: u32,
) -> Result<Partition, NotAnRCore> {
    assert!(r >= 1);
    let r = r as usize;
    assert_eq!(quotients.len(), r, "need exactly r quotient partitions");
    let (_, core_quots) = core_quotient(core, r as u32);
    if !core_quots.iter().all(|q| q.is_empty()) {
        return Err(NotAnRCore);
    }
    let max_quot_len = quotients.iter().map(|q| q.len()).max().unwrap_or(0);
    let k_base = core.len().div_ceil(r);
    let s = (k_base + max_quot_len + 1) * r;
    let core_betas = beta_numbers(core, s);
    let mut runner_counts = vec![0usize; r];
    for &b in &core_betas {
        runner_counts[(b % r as u64) as usize] += 1;
    }
    let mut betas = Vec::with_capacity(s);
    for (j, q) in quotients.iter().enumerate() {
        let k = runner_counts[j];
        debug_assert!(k >= q.len());
        for m in 0..k {
            let level = q.part(m) as u64 + (k - 1 - m) as u64;
            betas.push(level * r as u64 + j as u64);
        }
    }
    Ok(partition_from_betas(betas))
}

// ---------------------------------------------------------------------------
// Root lattices and theta sums
// ---------------------------------------------------------------------------

/// Reduced fraction with exact i128 arithmetic; enough for the small Cartan
/// matrices handled here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Frac {
    num: i128,
    den: i128,
}

impl Frac {
    fn new(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let g = gcd(num.abs(), den.abs()).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Frac { num: sign * num / g, den: sign * den / g }
    }

    fn from_int(n: i128) -> Self {
        Frac { num: n, den: 1 }
    }

    fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn sub(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }

    fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }

    fn div(self, o: Frac) -> Frac {
        assert!(o.num != 0);
        Frac::new(self.num * o.den, self.den * o.num)
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }

    fn floor(self) -> i128 {
        self.num.div_euclid(self.den)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact inverse of a small non-singular rational matrix (Gauss-Jordan).
fn invert_matrix(m: &[Vec<i64>]) -> Vec<Vec<Frac>> {
    let n = m.len();
    let mut a: Vec<Vec<Frac>> = m
        .iter()
        .map(|row| row.iter().map(|&x| Frac::from_int(x as i128)).collect())
        .collect();
    let mut inv: Vec<Vec<Frac>> =
        (0..n).map(|i| (0..n).map(|j| Frac::from_int((i == j) as i128)).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&row| !a[row][col].is_zero()).expect("singular matrix");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] = a[col][j].div(p);
            inv[col][j] = inv[col][j].div(p);
        }
        for row in 0..n {
            if row != col && !a[row][col].is_zero() {
                let f = a[row][col];
                for j in 0..n {
                    a[row][j] = a[row][j].sub(f.mul(a[col][j]));
                    inv[row][j] = inv[row][j].sub(f.mul(inv[col][j]));
                }
            }
        }
    }
    inv
}

/// A simply-laced root (Cartan) lattice of type A or D, with exact inverse
/// Cartan data used to bound theta-sum windows.
#[derive(Debug, Clone)]
pub struct RootLattice {
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    inv: Vec<Vec<Frac>>,
}

impl RootLattice {
    fn from_cartan(cartan: Vec<Vec<i64>>) -> Self {
        let inv = invert_matrix(&cartan);
        RootLattice { rank: cartan.len(), cartan, inv }
    }

    /// Type A_{r-1}: a path on r-1 nodes.
    pub fn type_a(r: usize) -> Self {
        assert!(r >= 2);
        let n = r - 1;
        let mut c = vec![vec![0i64; n]; n];
        for i in 0..n {
            c[i][i] = 2;
            if i + 1 < n {
                c[i][i + 1] = -1;
                c[i + 1][i] = -1;
            }
        }
        RootLattice::from_cartan(c)
    }

    /// Type D_r: a path on nodes 1..r-2 with the fork r-1, r at node r-2.
    pub fn type_d(r: usize) -> Self {
        assert!(r >= 4);
        let mut c = vec![vec![0i64; r]; r];
        for i in 0..r {
            c[i][i] = 2;
        }
        for i in 0..r - 3 {
            c[i][i + 1] = -1;
            c[i + 1][i] = -1;
        }
        // both fork tips attach to the end of the chain
        c[r - 3][r - 2] = -1;
        c[r - 2][r - 3] = -1;
        c[r - 3][r - 1] = -1;
        c[r - 1][r - 3] = -1;
        RootLattice::from_cartan(c)
    }

    /// `⟨m,m⟩/2 = (m^T C m)/2`, a non-negative integer.
    pub fn half_norm(&self, m: &[i64]) -> i64 {
        let mut q2 = 0i64;
        for i in 0..self.rank {
            for j in 0..self.rank {
                q2 += m[i] * self.cartan[i][j] * m[j];
            }
        }
        debug_assert!(q2 >= 0 && q2 % 2 == 0);
        q2 / 2
    }

    #[cfg(test)]
    pub(crate) fn inv_entry(&self, i: usize, j: usize) -> (i128, i128) {
        (self.inv[i][j].num, self.inv[i][j].den)
    }

    /// Sum of all inverse Cartan entries, `b^T C^{-1} b` for `b = (1,..,1)`.
    fn inv_total(&self) -> Frac {
        let mut t = Frac::from_int(0);
        for row in &self.inv {
            for &x in row {
                t = t.add(x);
            }
        }
        t
    }

    /// Enumerates all lattice vectors whose theta term can reach total
    /// degree <= `bound` when the base monomial `t` has degree `t_deg`,
    /// calling `f(m, half_norm)` on each vector inside the window.
    ///
    /// Completeness: a theta term has degree `D(m) = t_deg·Q(m) + Σm_i`
    /// with `|Σm_i| <= sqrt(2 c Q)` for `c = b^T C^{-1} b` (Cauchy-Schwarz
    /// in the Cartan inner product), hence `D(m) >= (t_deg - 1) Q - c/2`,
    /// so every `m` with `D(m) <= bound` has
    /// `Q(m) <= (2·bound + c) / (2 (t_deg - 1))`.  Per coordinate,
    /// `m_i^2 <= 2 Q (C^{-1})_{ii}`.
    pub fn for_each_theta_vector<F: FnMut(&[i64], i64)>(&self, t_deg: i64, bound: i64, mut f: F) {
        assert!(t_deg >= 2, "base monomial must have degree at least 2");
        let c = self.inv_total();
        let window = (Frac::from_int(2 * bound as i128)
            .add(c)
            .div(Frac::from_int(2 * (t_deg as i128 - 1))))
        .floor() as i64
            + 1;
        let limits: Vec<i64> = (0..self.rank)
            .map(|i| {
                let sq = Frac::from_int(2 * window as i128).mul(self.inv[i][i]);
                isqrt(sq.floor().max(0) as u64) as i64
            })
            .collect();
        let mut m = vec![0i64; self.rank];
        self.recurse_window(0, &limits, window, &mut m, &mut f);
    }

    fn recurse_window<F: FnMut(&[i64], i64)>(
        &self,
        i: usize,
        limits: &[i64],
        window: i64,
        m: &mut Vec<i64>,
        f: &mut F,
    ) {
        if i == self.rank {
            let q = self.half_norm(m);
            if q <= window {
                f(m, q);
            }
            return;
        }
        for v in -limits[i]..=limits[i] {
            m[i] = v;
            self.recurse_window(i + 1, limits, window, m, f);
        }
        m[i] = 0;
    }
}

fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64 + 2;
    while x * x > n {
        x -= 1;
    }
    x
}

/// Generic truncated theta sum `Σ_m x^{t·Q(m)} Π_i t_{vars[i]}^{m_i}` where
/// the base `t` is the monomial with exponents `t_exps` and `Q` is the half
/// norm of the lattice.
pub(crate) fn theta_series(
    lattice: &RootLattice,
    nvars: usize,
    t_exps: &[i64],
    coord_vars: &[usize],
    bound: i64,
) -> TruncatedSeries {
    assert_eq!(coord_vars.len(), lattice.rank);
    let t_deg: i64 = t_exps.iter().sum();
    let mut out = TruncatedSeries::zero(nvars, bound);
    lattice.for_each_theta_vector(t_deg, bound, |m, q| {
        let degree = t_deg * q + m.iter().sum::<i64>();
        if degree <= bound {
            let mut exps: Vec<i64> = t_exps.iter().map(|&e| e * q).collect();
            for (i, &v) in coord_vars.iter().enumerate() {
                exps[v] += m[i];
            }
            assert!(exps.iter().all(|&e| e >= 0), "theta term with negative exponent: {:?}", exps);
            out.add_term(exps, BigInt::one());
        }
    });
    out
}

/// The type-A theta sum `Σ_{m ∈ Λ_{A_{r-1}}} t^{⟨m,m⟩/2} Π t_i^{m_i}` with
/// `t = t_0 ... t_{r-1}`, truncated by total degree.  For `r = 1` the sum
/// is the constant 1.
pub fn theta_sum_a(r: u32, bound: i64) -> TruncatedSeries {
    if r == 1 {
        return TruncatedSeries::one(1, bound);
    }
    let lattice = RootLattice::type_a(r as usize);
    let t_exps = vec![1i64; r as usize];
    let coord_vars: Vec<usize> = (1..r as usize).collect();
    theta_series(&lattice, r as usize, &t_exps, &coord_vars, bound)
}

// ---------------------------------------------------------------------------
// Verification and the refined product
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct Verify2dReport {
    pub r: u32,
    pub bound: i64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Verify2dReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks, up to the bound: the factorisation `Z = E(t)^r · theta`, the
/// identification of the theta sum with the coloured r-core generating
/// function, and the core/quotient round trip.
pub fn verify_2d(r: u32, bound: i64) -> Verify2dReport {
    let mut checks = Vec::new();
    let z = z2d(r, bound);
    let t = Monomial::ones(r as usize);
    let e = std_series(StdSeriesKind::EulerE, None, &t, r as usize, bound)
        .expect("E(t) substitution is valid");
    let er = e.pow(r).expect("same ring");
    let theta = theta_sum_a(r, bound);
    let rhs = er.mul(&theta).expect("same ring");
    checks.push(Check::from_series_eq(
        format!("z2d({r}) = E(t)^{r} * theta_A up to degree {bound}"),
        &z,
        &rhs,
    ));
    let cores = r_core_series(r, bound);
    checks.push(Check::from_series_eq(
        format!("theta_A({r}) = coloured r-core generating function"),
        &theta,
        &cores,
    ));

    let roundtrip_bound = bound.min(12) as u32;
    let mut roundtrip_ok = true;
    let mut roundtrip_msg = None;
    'outer: for n in 0..=roundtrip_bound {
        for lam in enum_partitions(n) {
            let (core, quots) = core_quotient(&lam, r);
            let total: u64 = core.size() + r as u64 * quots.iter().map(|q| q.size()).sum::<u64>();
            if total != lam.size() {
                roundtrip_ok = false;
                roundtrip_msg = Some(format!("size identity fails for {:?}", lam.parts()));
                break 'outer;
            }
            match from_core_quotient(&core, &quots, r) {
                Ok(back) if back == lam => {}
                _ => {
                    roundtrip_ok = false;
                    roundtrip_msg = Some(format!("round trip fails for {:?}", lam.parts()));
                    break 'outer;
                }
            }
        }
    }
    checks.push(Check {
        name: format!("core/quotient round trip for |λ| <= {roundtrip_bound}"),
        pass: roundtrip_ok,
        first_discrepancy: roundtrip_msg,
        detail: None,
    });

    Verify2dReport {
        r,
        bound,
        checks,
        notes: vec![
            "theta base read as t = t_0...t_{r-1}, the product of all variables".to_string()
        ],
    }
}

/// The q-refined coloured series
/// `Π_{m>0} (1 - t^m q^{m-1})^{-1} (1 - t^m q^m)^{-(r-1)} · theta_A(r)`,
/// truncated in t-total-degree (and optionally in q-degree).  Setting
/// `q^{1/2} = 1` recovers [`z2d`].
pub fn refined_2d_product(r: u32, bound: i64, qbound: Option<i64>) -> QSeries {
    let nvars = r as usize;
    let mut acc = QSeries::one(nvars, bound, Pairing::Trivial);
    let rr = r as i64;
    let mut m = 1i64;
    while rr * m <= bound {
        // (1 - t^m q^{m-1})^{-1}
        let mut f1 = QSeries::zero(nvars, bound, Pairing::Trivial);
        let mut k = 0i64;
        while rr * m * k <= bound {
            f1.add_term(vec![m * k; nvars], QLaurent::monomial(2 * (m - 1) * k, BigInt::one()));
            k += 1;
        }
        acc = acc.qt_mul(&f1).expect("compatible");
        // (1 - t^m q^m)^{-(r-1)}
        if r >= 2 {
            let mut f2 = QSeries::zero(nvars, bound, Pairing::Trivial);
            let mut coeff = BigInt::one();
            let mut k = 0i64;
            while rr * m * k <= bound {
                if k > 0 {
                    // binomial C(r-2+k, k) built incrementally
                    coeff = coeff * BigInt::from(rr - 2 + k) / BigInt::from(k);
                }
                f2.add_term(vec![m * k; nvars], QLaurent::monomial(2 * m * k, coeff.clone()));
                k += 1;
            }
            acc = acc.qt_mul(&f2).expect("compatible");
        }
        m += 1;
    }
    let theta = QSeries::from_scalar_series(&theta_sum_a(r, bound), Pairing::Trivial);
    let mut out = acc.qt_mul(&theta).expect("compatible");
    if let Some(qb) = qbound {
        out.truncate_q(2 * qb);
    }
    out
}
