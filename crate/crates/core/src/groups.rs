//! Finite abelian colour groups, the box colouring, McKay quivers, Euler
//! forms, superpotential terms and the DT sign exponent.
//!
//! A group is presented as a product of cyclic factors `Z_{n1} x ... x Z_{nk}`
//! together with one weight element per ambient coordinate (two weights for
//! the plane, three for space).  The weights must sum to the identity — this
//! is the determinant-one condition for the diagonal embedding into SL.
//! Group elements are indexed in mixed-radix lexicographic order, so for a
//! cyclic group the index of `rho_1^k` is `k`.

use std::fmt;

use crate::mpoly::format_monomial;

/// Errors from parsing or validating colour group specifications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    Parse { spec: String, reason: String },
    WeightSum,
    Dimension { expected: usize, got: usize },
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::Parse { spec, reason } => {
                write!(f, "cannot parse group spec {:?}: {}", spec, reason)
            }
            GroupError::WeightSum => write!(f, "weights do not sum to the identity"),
            GroupError::Dimension { expected, got } => {
                write!(f, "operation needs a {}-dimensional action, got {}", expected, got)
            }
        }
    }
}

impl std::error::Error for GroupError {}

/// A finite abelian group `Z_{n1} x ... x Z_{nk}` acting diagonally on
/// `C^d` (`d` = 2 or 3) with the given weight characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourGroup {
    factors: Vec<u32>,
    /// One group element per ambient coordinate, entries reduced mod factors.
    weights: Vec<Vec<u32>>,
}

impl ColourGroup {
    pub fn new(factors: Vec<u32>, weights: Vec<Vec<u32>>) -> Result<Self, GroupError> {
        assert!(!factors.is_empty() && factors.iter().all(|&n| n >= 1));
        let dim = weights.len();
        if dim != 2 && dim != 3 {
            return Err(GroupError::Dimension { expected: 3, got: dim });
        }
        let k = factors.len();
        let weights: Vec<Vec<u32>> = weights
            .into_iter()
            .map(|w| {
                assert_eq!(w.len(), k, "weight arity mismatch");
                w.iter().zip(&factors).map(|(&x, &n)| x % n).collect()
            })
            .collect();
        for j in 0..k {
            let sum: u32 = weights.iter().map(|w| w[j]).sum();
            if sum % factors[j] != 0 {
                return Err(GroupError::WeightSum);
            }
        }
        Ok(ColourGroup { factors, weights })
    }

    /// Cyclic group `mu_r` with integer weights (reduced mod `r`).
    pub fn cyclic(r: u32, weights: &[i64]) -> Result<Self, GroupError> {
        let ws = weights
            .iter()
            .map(|&w| vec![w.rem_euclid(r as i64) as u32])
            .collect();
        ColourGroup::new(vec![r], ws)
    }

    /// Shorthand for the 3-dimensional cyclic action `mu_r(a,b,c)`.
    pub fn mu(r: u32, a: i64, b: i64, c: i64) -> Self {
        ColourGroup::cyclic(r, &[a, b, c]).expect("weights must sum to 0 mod r")
    }

    /// The group `mu_2 x mu_2` embedded with weights (1,0), (0,1), (1,1).
    pub fn mu2xmu2() -> Self {
        ColourGroup::new(vec![2, 2], vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    /// The group `mu_3 x mu_3` embedded with weights (1,0), (0,1), (2,2).
    pub fn mu3xmu3() -> Self {
        ColourGroup::new(vec![3, 3], vec![vec![1, 0], vec![0, 1], vec![2, 2]]).unwrap()
    }

    /// Number of elements (= number of characters = number of colours).
    pub fn order(&self) -> usize {
        self.factors.iter().map(|&n| n as usize).product()
    }

    /// Ambient dimension of the action (2 or 3).
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn weights(&self) -> &[Vec<u32>] {
        &self.weights
    }

    /// Mixed-radix lexicographic index of a group element.
    fn index_of(&self, elem: &[u32]) -> usize {
        let mut idx = 0usize;
        for (j, &n) in self.factors.iter().enumerate() {
            idx = idx * n as usize + (elem[j] % n) as usize;
        }
        idx
    }

    /// Index of the sum of element `idx` and weight `w`.
    fn add_weight(&self, idx: usize, w: &[u32]) -> usize {
        let mut rem = idx;
        let k = self.factors.len();
        let mut elem = vec![0u32; k];
        for j in (0..k).rev() {
            let n = self.factors[j] as usize;
            elem[j] = (rem % n) as u32;
            rem /= n;
        }
        for j in 0..k {
            elem[j] = (elem[j] + w[j]) % self.factors[j];
        }
        self.index_of(&elem)
    }

    /// Colour of the lattice box with the given coordinates: the index of
    /// `i·a + j·b (+ k·c)` in the character group.
    pub fn colour(&self, coords: &[u64]) -> usize {
        assert_eq!(coords.len(), self.dim(), "coordinate arity mismatch");
        let k = self.factors.len();
        let mut elem = vec![0u32; k];
        for (w, &c) in self.weights.iter().zip(coords) {
            for j in 0..k {
                let n = self.factors[j] as u64;
                elem[j] = ((elem[j] as u64 + (c % n) * (w[j] as u64)) % n) as u32;
            }
        }
        self.index_of(&elem)
    }

    /// Canonical spec string, re-parseable by [`ColourGroup::parse`].
    pub fn spec_string(&self) -> String {
        if self.factors.len() == 1 {
            let ws: Vec<String> = self.weights.iter().map(|w| w[0].to_string()).collect();
            format!("cyclic:{}:{}", self.factors[0], ws.join(","))
        } else {
            let ns: Vec<String> = self.factors.iter().map(|n| n.to_string()).collect();
            let ws: Vec<String> = self
                .weights
                .iter()
                .map(|w| {
                    let xs: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                    format!("({})", xs.join(","))
                })
                .collect();
            format!("product:{}:{}", ns.join("x"), ws.join(","))
        }
    }

    /// Parses `cyclic:r:a,b[,c]` or `product:n1xn2x..:(a1,a2,..),(..),(..)`.
    /// Rejects specs whose weights do not sum to the identity.
    pub fn parse(spec: &str) -> Result<Self, GroupError> {
        let err = |reason: &str| GroupError::Parse { spec: spec.to_string(), reason: reason.into() };
        let mut it = spec.splitn(3, ':');
        let kind = it.next().ok_or_else(|| err("empty"))?;
        match kind {
            "cyclic" => {
                let r: u32 = it
                    .next()
                    .ok_or_else(|| err("missing order"))?
                    .parse()
                    .map_err(|_| err("bad order"))?;
                if r == 0 {
                    return Err(err("order must be positive"));
                }
                let ws: Vec<i64> = it
                    .next()
                    .ok_or_else(|| err("missing weights"))?
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| err("bad weight")))
                    .collect::<Result<_, _>>()?;
                if ws.len() != 2 && ws.len() != 3 {
                    return Err(err("need 2 or 3 weights"));
                }
                ColourGroup::cyclic(r, &ws)
            }
            "product" => {
                let ns: Vec<u32> = it
                    .next()
                    .ok_or_else(|| err("missing moduli"))?
                    .split('x')
                    .map(|s| s.trim().parse().map_err(|_| err("bad modulus")))
                    .collect::<Result<_, _>>()?;
                if ns.is_empty() || ns.iter().any(|&n| n == 0) {
                    return Err(err("moduli must be positive"));
                }
                let rest = it.next().ok_or_else(|| err("missing weights"))?;
                let mut weights = Vec::new();
                let mut cur = rest.trim();
                while !cur.is_empty() {
                    if !cur.starts_with('(') {
                        return Err(err("expected '('"));
                    }
                    let close = cur.find(')').ok_or_else(|| err("unbalanced parens"))?;
                    let inner = &cur[1..close];
                    let w: Vec<u32> = inner
                        .split(',')
                        .map(|s| s.trim().parse().map_err(|_| err("bad weight entry")))
                        .collect::<Result<_, _>>()?;
                    if w.len() != ns.len() {
                        return Err(err("weight arity mismatch"));
                    }
                    weights.push(w);
                    cur = cur[close + 1..].trim_start_matches(',').trim();
                }
                if weights.len() != 2 && weights.len() != 3 {
                    return Err(err("need 2 or 3 weights"));
                }
                ColourGroup::new(ns, weights)
            }
            _ => Err(err("unknown kind (expected cyclic: or product:)")),
        }
    }
}

/// Arrow kinds of the three-dimensional McKay quiver, one per coordinate.
pub const ARROW_NAMES: [char; 3] = ['x', 'y', 'z'];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    /// 0 = x, 1 = y, 2 = z.
    pub kind: usize,
    pub source: usize,
    pub target: usize,
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", ARROW_NAMES[self.kind], self.source)
    }
}

/// The McKay quiver of a three-dimensional colour group: one vertex per
/// character, arrows `x_i: i -> i+a`, `y_i: i -> i+b`, `z_i: i -> i+c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McKayQuiver {
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
}

/// A dimension vector indexed by colour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimVector(pub Vec<i64>);

impl DimVector {
    pub fn new(entries: Vec<i64>) -> Self {
        assert!(entries.iter().all(|&d| d >= 0), "dimension vector entries must be >= 0");
        DimVector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One term of the superpotential: a signed 3-cycle of quiver arrows,
/// listed in composition order (first arrow applied first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialTerm {
    pub arrows: [Arrow; 3],
    pub sign: i8,
}

impl PotentialTerm {
    /// A term must be a closed path.
    pub fn is_cycle(&self) -> bool {
        self.arrows[0].target == self.arrows[1].source
            && self.arrows[1].target == self.arrows[2].source
            && self.arrows[2].target == self.arrows[0].source
    }
}

/// Builds the McKay quiver; the group must act on three coordinates.
pub fn mckay_quiver(g: &ColourGroup) -> McKayQuiver {
    assert_eq!(g.dim(), 3, "McKay quiver construction needs a 3-dimensional action");
    let r = g.order();
    let mut arrows = Vec::with_capacity(3 * r);
    for kind in 0..3 {
        let w = &g.weights()[kind];
        for i in 0..r {
            arrows.push(Arrow { kind, source: i, target: g.add_weight(i, w) });
        }
    }
    McKayQuiver { vertices: r, arrows }
}

impl McKayQuiver {
    /// Euler pairing `(d,e) = Σ_i d_i e_i − Σ_{a: i→j} d_i e_j`.
    pub fn euler_form(&self, d: &DimVector, e: &DimVector) -> i64 {
        assert_eq!(d.len(), self.vertices, "dimension vector length mismatch");
        assert_eq!(e.len(), self.vertices, "dimension vector length mismatch");
        let mut total: i64 = d.0.iter().zip(&e.0).map(|(&x, &y)| x * y).sum();
        for a in &self.arrows {
            total -= d.0[a.source] * e.0[a.target];
        }
        total
    }

    /// The Euler pairing as a matrix `B` with `(d,e) = d^T B e`.
    pub fn euler_matrix(&self) -> Vec<Vec<i64>> {
        let r = self.vertices;
        let mut b = vec![vec![0i64; r]; r];
        for i in 0..r {
            b[i][i] += 1;
        }
        for a in &self.arrows {
            b[a.source][a.target] -= 1;
        }
        b
    }

    /// Parity of `d_0 + (d,d)`, the exponent of the DT sign `(-1)^{...}`.
    pub fn sign_exponent(&self, d: &DimVector) -> u8 {
        ((d.0[0] + self.euler_form(d, d)).rem_euclid(2)) as u8
    }
}

/// The superpotential terms `z_{i+a+b} y_{i+a} x_i − y_{i+a+c} z_{i+a} x_i`
/// summed over the colours `i`.
pub fn potential(g: &ColourGroup) -> Vec<PotentialTerm> {
    assert_eq!(g.dim(), 3, "potential needs a 3-dimensional action");
    let r = g.order();
    let q = mckay_quiver(g);
    let arrow = |kind: usize, source: usize| -> Arrow {
        q.arrows[kind * r + source]
    };
    let a = &g.weights()[0];
    let b = &g.weights()[1];
    let c = &g.weights()[2];
    let mut terms = Vec::with_capacity(2 * r);
    for i in 0..r {
        let ia = g.add_weight(i, a);
        let iab = g.add_weight(ia, b);
        terms.push(PotentialTerm { arrows: [arrow(0, i), arrow(1, ia), arrow(2, iab)], sign: 1 });
        let iac = g.add_weight(ia, c);
        terms.push(PotentialTerm { arrows: [arrow(0, i), arrow(2, ia), arrow(1, iac)], sign: -1 });
    }
    debug_assert!(terms.iter().all(|t| t.is_cycle()));
    terms
}

/// Helper for reports: names of the variables `t_0 .. t_{r-1}`.
pub fn monomial_name(exps: &[i64]) -> String {
    format_monomial(exps)
}
