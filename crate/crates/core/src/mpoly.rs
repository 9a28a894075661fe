//! Sparse multivariate power series over big integers, truncated by total
//! degree.
//!
//! A [`TruncatedSeries`] stores finitely many terms `c * t0^e0 * ... * tk^ek`
//! with non-zero `c` and total degree `e0 + ... + ek <= bound`.  Negative
//! (Laurent) exponents are tolerated in intermediate computations; any series
//! surfaced to a user must have non-negative exponents only, and the standard
//! product constructors enforce this.
//!
//! Half-integer powers are represented exactly by doubling every stored
//! exponent and setting the `halved` flag; [`TruncatedSeries::un_halve`]
//! clears the flag once all exponents are even again.
//!
//! The module also implements the twisted plethystic exponential
//!
//! ```text
//! PExp^σ( Σ σ_n a_n x^n ) = Π (1 - σ_n x^n)^(-σ_n a_n)
//! ```
//!
//! which expands with non-negative integer coefficients, and the standard
//! product series E(t), M(t), M(s,t) and M~(s,t) via monomial substitution.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// A monomial in `nvars` variables.  When `halved` is set the stored
/// exponents are twice the represented ones, so `exps = [1, 0]` with
/// `halved = true` stands for `t0^(1/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub exps: Vec<i64>,
    pub halved: bool,
}

impl Monomial {
    pub fn new(exps: Vec<i64>) -> Self {
        Monomial { exps, halved: false }
    }

    pub fn ones(nvars: usize) -> Self {
        Monomial::new(vec![1; nvars])
    }

    pub fn unit_var(nvars: usize, var: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Monomial::new(exps)
    }

    /// Doubled total degree, i.e. total degree in half-units.
    pub fn doubled_degree(&self) -> i64 {
        let raw: i64 = self.exps.iter().sum();
        if self.halved {
            raw
        } else {
            2 * raw
        }
    }
}

/// One signed term of a series, as consumed by the plethystic exponential:
/// the term `c * x^n` is split into `sign = sgn(c)` and `magnitude = |c|`.
#[derive(Debug, Clone)]
pub struct SignedSummand {
    pub monomial: Monomial,
    pub magnitude: BigUint,
    pub sign: i8,
}

/// Errors from series arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    NvarsMismatch { left: usize, right: usize },
    HalvedMismatch,
    /// Inversion requires constant term +1 or -1 and no other term of
    /// non-positive total degree.
    NonUnitConstant,
    /// The plethystic exponential requires a vanishing constant term.
    NonZeroConstant,
    NegativeExponent { exps: Vec<i64> },
    /// `un_halve` found an odd doubled exponent.
    NonIntegralHalfPower { exps: Vec<i64> },
    InvalidSubstitution { reason: String },
    Json { reason: String },
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::NvarsMismatch { left, right } => {
                write!(f, "variable count mismatch: {} vs {}", left, right)
            }
            SeriesError::HalvedMismatch => write!(f, "halved flag mismatch between operands"),
            SeriesError::NonUnitConstant => {
                write!(f, "inversion requires constant term +1 or -1")
            }
            SeriesError::NonZeroConstant => {
                write!(f, "plethystic exponential requires zero constant term")
            }
            SeriesError::NegativeExponent { exps } => {
                write!(f, "negative exponent in exported term {:?}", exps)
            }
            SeriesError::NonIntegralHalfPower { exps } => {
                write!(f, "half power does not combine to an integer exponent: {:?}", exps)
            }
            SeriesError::InvalidSubstitution { reason } => {
                write!(f, "invalid substitution: {}", reason)
            }
            SeriesError::Json { reason } => write!(f, "bad series JSON: {}", reason),
        }
    }
}

impl std::error::Error for SeriesError {}

/// A sparse multivariate series with big-integer coefficients, truncated by
/// total degree `bound` (inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    nvars: usize,
    bound: i64,
    halved: bool,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

/// Graded-lexicographic comparison of exponent vectors: first by total
/// degree, then lexicographically.  This is the canonical term order for
/// serialization and first-discrepancy reporting.
pub fn graded_lex_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, bound: i64) -> Self {
        assert!(bound >= 0, "bound must be non-negative");
        TruncatedSeries { nvars, bound, halved: false, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize, bound: i64) -> Self {
        let mut s = Self::zero(nvars, bound);
        s.terms.insert(vec![0; nvars], BigInt::one());
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn halved(&self) -> bool {
        self.halved
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Effective truncation threshold for raw stored exponent sums.
    fn raw_bound(&self) -> i64 {
        if self.halved {
            2 * self.bound
        } else {
            self.bound
        }
    }

    /// Adds `coeff * x^exps` to the series.  Terms above the bound are
    /// rejected; use this only with in-bound data.
    pub fn add_term(&mut self, exps: Vec<i64>, coeff: BigInt) {
        assert_eq!(exps.len(), self.nvars, "exponent arity mismatch");
        if coeff.is_zero() {
            return;
        }
        let deg: i64 = exps.iter().sum();
        assert!(deg <= self.raw_bound(), "term degree {} above bound {}", deg, self.raw_bound());
        let entry = self.terms.entry(exps).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            // re-borrow to remove; BTreeMap has no remove-on-entry
            let key: Vec<i64> = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    /// Builds a series from explicit terms.
    pub fn from_terms<I>(nvars: usize, bound: i64, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut s = Self::zero(nvars, bound);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Builds a halved series from terms given with doubled exponents, so
    /// `(vec![1, 0], c)` stands for `c * t0^(1/2)`.
    pub fn from_halved_terms<I>(nvars: usize, bound: i64, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut s = Self::zero(nvars, bound);
        s.halved = true;
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Coefficient of `x^exps` (zero if absent).
    pub fn coeff(&self, exps: &[i64]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.terms.iter()
    }

    /// Terms sorted in graded-lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(Vec<i64>, BigInt)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        v.sort_by(|a, b| graded_lex_cmp(&a.0, &b.0));
        v
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.terms.keys().any(|e| e.iter().any(|&x| x < 0))
    }

    /// Fails with the offending exponent vector if any stored term has a
    /// negative exponent.
    pub fn ensure_non_negative(&self) -> Result<(), SeriesError> {
        for e in self.terms.keys() {
            if e.iter().any(|&x| x < 0) {
                return Err(SeriesError::NegativeExponent { exps: e.clone() });
            }
        }
        Ok(())
    }

    /// Re-truncates to a smaller bound.
    pub fn truncate(&self, bound: i64) -> TruncatedSeries {
        assert!(bound <= self.bound);
        let scale = if self.halved { 2 } else { 1 };
        let mut out = TruncatedSeries {
            nvars: self.nvars,
            bound,
            halved: self.halved,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if e.iter().sum::<i64>() <= bound * scale {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    fn check_compatible(&self, other: &TruncatedSeries) -> Result<(), SeriesError> {
        if self.nvars != other.nvars {
            return Err(SeriesError::NvarsMismatch { left: self.nvars, right: other.nvars });
        }
        if self.halved != other.halved {
            return Err(SeriesError::HalvedMismatch);
        }
        Ok(())
    }

    /// Coefficient-wise sum, truncated to the smaller bound.
    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.check_compatible(other)?;
        let bound = self.bound.min(other.bound);
        let mut out = self.truncate(bound);
        let scale = if self.halved { 2 } else { 1 };
        for (e, c) in &other.terms {
            if e.iter().sum::<i64>() <= bound * scale {
                let entry = out.terms.entry(e.clone()).or_insert_with(BigInt::zero);
                *entry += c;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    /// Multiplies every coefficient by `k`.
    pub fn scale(&self, k: &BigInt) -> TruncatedSeries {
        let mut out = self.clone();
        if k.is_zero() {
            out.terms.clear();
            return out;
        }
        for c in out.terms.values_mut() {
            *c *= k;
        }
        out
    }

    /// Convolution product, truncated to the smaller bound.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.check_compatible(other)?;
        let bound = self.bound.min(other.bound);
        let raw_bound = if self.halved { 2 * bound } else { bound };
        let mut bt: Vec<(&Vec<i64>, i64, &BigInt)> =
            other.terms.iter().map(|(e, c)| (e, e.iter().sum::<i64>(), c)).collect();
        bt.sort_by_key(|&(_, d, _)| d);
        let mut out = TruncatedSeries {
            nvars: self.nvars,
            bound,
            halved: self.halved,
            terms: BTreeMap::new(),
        };
        let mut buf = vec![0i64; self.nvars];
        for (ea, ca) in &self.terms {
            let da: i64 = ea.iter().sum();
            for &(eb, db, cb) in &bt {
                if da + db > raw_bound {
                    break;
                }
                for i in 0..self.nvars {
                    buf[i] = ea[i] + eb[i];
                }
                let entry = out.terms.entry(buf.clone()).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Binary powering.
    pub fn pow(&self, mut n: u32) -> Result<TruncatedSeries, SeriesError> {
        let mut result = TruncatedSeries::one(self.nvars, self.bound);
        result.halved = self.halved;
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Multiplicative inverse up to the bound.  Requires constant term ±1 and
    /// every other term of positive total degree.
    pub fn inv(&self) -> Result<TruncatedSeries, SeriesError> {
        let c0 = self.constant_term();
        if !(c0 == BigInt::one() || c0 == -BigInt::one()) {
            return Err(SeriesError::NonUnitConstant);
        }
        let raw_bound = self.raw_bound();
        // graded components of self
        let mut comps: Vec<Vec<(&Vec<i64>, &BigInt)>> =
            (0..=raw_bound as usize).map(|_| Vec::new()).collect();
        for (e, c) in &self.terms {
            let d: i64 = e.iter().sum();
            if d < 0 || (d == 0 && e.iter().any(|&x| x != 0)) {
                return Err(SeriesError::NonUnitConstant);
            }
            if d > 0 {
                comps[d as usize].push((e, c));
            }
        }
        // b_0 = c0 (±1 is its own inverse); b_d = -c0 * sum_{k=1..d} a_k b_{d-k}
        let mut inv_comps: Vec<BTreeMap<Vec<i64>, BigInt>> =
            (0..=raw_bound as usize).map(|_| BTreeMap::new()).collect();
        inv_comps[0].insert(vec![0; self.nvars], c0.clone());
        let mut buf = vec![0i64; self.nvars];
        for d in 1..=raw_bound as usize {
            let mut acc: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
            for k in 1..=d {
                for &(ea, ca) in &comps[k] {
                    for (eb, cb) in &inv_comps[d - k] {
                        for i in 0..self.nvars {
                            buf[i] = ea[i] + eb[i];
                        }
                        let entry = acc.entry(buf.clone()).or_insert_with(BigInt::zero);
                        *entry += ca * cb;
                    }
                }
            }
            let neg_c0 = -c0.clone();
            let comp: BTreeMap<Vec<i64>, BigInt> = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e, c * &neg_c0))
                .collect();
            inv_comps[d] = comp;
        }
        let mut out = TruncatedSeries {
            nvars: self.nvars,
            bound: self.bound,
            halved: self.halved,
            terms: BTreeMap::new(),
        };
        for comp in inv_comps {
            for (e, c) in comp {
                if !c.is_zero() {
                    out.terms.insert(e, c);
                }
            }
        }
        Ok(out)
    }

    /// Splits the series into signed summands `σ_n a_n x^n`.
    pub fn signed_summands(&self) -> Vec<SignedSummand> {
        self.terms
            .iter()
            .map(|(e, c)| SignedSummand {
                monomial: Monomial { exps: e.clone(), halved: self.halved },
                magnitude: c.abs().to_biguint().expect("|c| >= 0"),
                sign: if c.is_negative() { -1 } else { 1 },
            })
            .collect()
    }

    /// Twisted plethystic exponential: maps `Σ σ_n a_n x^n` (zero constant
    /// term, non-negative exponents) to `Π (1 - σ_n x^n)^(-σ_n a_n)`.
    /// The result always has non-negative integer coefficients.
    pub fn pexp_sigma(&self) -> Result<TruncatedSeries, SeriesError> {
        if self.halved {
            return Err(SeriesError::HalvedMismatch);
        }
        self.ensure_non_negative()?;
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonZeroConstant);
        }
        pexp_engine(self)
    }

    /// Applies a monomial substitution variable-by-variable.  `targets[i]`
    /// replaces variable `i`; all targets must have non-negative exponents
    /// and live in the same `new_nvars`-variable ring.
    pub fn specialize(
        &self,
        targets: &[Monomial],
        new_nvars: usize,
        new_bound: i64,
    ) -> Result<TruncatedSeries, SeriesError> {
        if targets.len() != self.nvars {
            return Err(SeriesError::NvarsMismatch { left: self.nvars, right: targets.len() });
        }
        for t in targets {
            if t.exps.len() != new_nvars {
                return Err(SeriesError::NvarsMismatch { left: new_nvars, right: t.exps.len() });
            }
            if t.halved {
                return Err(SeriesError::HalvedMismatch);
            }
            if t.exps.iter().any(|&x| x < 0) {
                return Err(SeriesError::NegativeExponent { exps: t.exps.clone() });
            }
        }
        if self.halved {
            return Err(SeriesError::HalvedMismatch);
        }
        let mut out = TruncatedSeries::zero(new_nvars, new_bound);
        for (e, c) in &self.terms {
            let mut exps = vec![0i64; new_nvars];
            for (i, &ei) in e.iter().enumerate() {
                for (j, &tj) in targets[i].exps.iter().enumerate() {
                    exps[j] += ei * tj;
                }
            }
            if exps.iter().sum::<i64>() <= new_bound {
                let entry = out.terms.entry(exps).or_insert_with(BigInt::zero);
                *entry += c;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Doubles all exponents and marks the series as halved.
    pub fn halve(&self) -> TruncatedSeries {
        assert!(!self.halved, "already halved");
        TruncatedSeries {
            nvars: self.nvars,
            bound: self.bound,
            halved: true,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|&x| 2 * x).collect(), c.clone()))
                .collect(),
        }
    }

    /// Clears the halved flag; every doubled exponent must be even.
    pub fn un_halve(&self) -> Result<TruncatedSeries, SeriesError> {
        assert!(self.halved, "not halved");
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.iter().any(|&x| x.rem_euclid(2) != 0) {
                return Err(SeriesError::NonIntegralHalfPower { exps: e.clone() });
            }
            terms.insert(e.iter().map(|&x| x / 2).collect(), c.clone());
        }
        Ok(TruncatedSeries { nvars: self.nvars, bound: self.bound, halved: false, terms })
    }

    /// First graded-lex monomial where the two series disagree, together
    /// with both coefficients.  Comparison happens at the smaller bound.
    pub fn first_difference(
        &self,
        other: &TruncatedSeries,
    ) -> Option<(Vec<i64>, BigInt, BigInt)> {
        let bound = self.bound.min(other.bound);
        let a = self.truncate(bound);
        let b = other.truncate(bound);
        let mut keys: Vec<&Vec<i64>> = a.terms.keys().chain(b.terms.keys()).collect();
        keys.sort_by(|x, y| graded_lex_cmp(x, y));
        keys.dedup();
        for k in keys {
            let ca = a.coeff(k);
            let cb = b.coeff(k);
            if ca != cb {
                return Some((k.clone(), ca, cb));
            }
        }
        None
    }

    /// Canonical JSON form: terms in graded-lex order, coefficients as
    /// decimal strings.
    pub fn to_json_string(&self) -> String {
        let terms: Vec<serde_json::Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                serde_json::json!({ "exp": e, "coeff": c.to_string() })
            })
            .collect();
        serde_json::json!({
            "nvars": self.nvars,
            "bound": self.bound,
            "halved": self.halved,
            "terms": terms,
        })
        .to_string()
    }

    pub fn from_json_str(s: &str) -> Result<TruncatedSeries, SeriesError> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| SeriesError::Json { reason: e.to_string() })?;
        let nvars = v["nvars"]
            .as_u64()
            .ok_or_else(|| SeriesError::Json { reason: "missing nvars".into() })?
            as usize;
        let bound = v["bound"]
            .as_i64()
            .ok_or_else(|| SeriesError::Json { reason: "missing bound".into() })?;
        let halved = v["halved"].as_bool().unwrap_or(false);
        let mut out = TruncatedSeries::zero(nvars, bound);
        out.halved = halved;
        let terms = v["terms"]
            .as_array()
            .ok_or_else(|| SeriesError::Json { reason: "missing terms".into() })?;
        for t in terms {
            let exps: Vec<i64> = t["exp"]
                .as_array()
                .ok_or_else(|| SeriesError::Json { reason: "missing exp".into() })?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| SeriesError::Json { reason: "bad exp".into() }))
                .collect::<Result<_, _>>()?;
            if exps.len() != nvars {
                return Err(SeriesError::Json { reason: "exp arity mismatch".into() });
            }
            let cs = t["coeff"]
                .as_str()
                .ok_or_else(|| SeriesError::Json { reason: "missing coeff".into() })?;
            let c: BigInt = cs
                .parse()
                .map_err(|_| SeriesError::Json { reason: format!("bad coeff {:?}", cs) })?;
            let deg: i64 = exps.iter().sum();
            if deg > out.raw_bound() {
                return Err(SeriesError::Json { reason: "term above bound".into() });
            }
            if !c.is_zero() {
                out.terms.insert(exps, c);
            }
        }
        Ok(out)
    }
}

/// Formats an exponent vector as a readable monomial, e.g. `t0^2*t1`.
pub fn format_monomial(exps: &[i64]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("t{}", i)),
            _ => parts.push(format!("t{}^{}", i, e)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.sorted_terms() {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            if e.iter().all(|&x| x == 0) {
                write!(f, "{}", c)?;
            } else if c == BigInt::one() {
                write!(f, "{}", format_monomial(&e))?;
            } else {
                write!(f, "{}*{}", c, format_monomial(&e))?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Plethystic exponential engine and standard products
// ---------------------------------------------------------------------------

/// Expands `Π (1 - σ_n x^n)^(-σ_n a_n)` over the signed summands of `arg`.
/// Laurent exponents are tolerated as long as every term has positive total
/// degree (needed for truncation to terminate).
pub(crate) fn pexp_engine(arg: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    let bound = arg.bound();
    let nvars = arg.nvars();
    for e in arg.terms.keys() {
        if e.iter().sum::<i64>() < 1 {
            return Err(SeriesError::InvalidSubstitution {
                reason: format!("plethystic factor exponent {:?} has non-positive degree", e),
            });
        }
    }
    let mut result = TruncatedSeries::one(nvars, bound);
    for s in arg.signed_summands() {
        let deg: i64 = s.monomial.exps.iter().sum();
        let max_k = (bound / deg) as usize;
        // factor = (1 - σ x^n)^(-σ a) expanded in powers of x^n
        let mut factor_coeffs: Vec<BigInt> = Vec::with_capacity(max_k + 1);
        factor_coeffs.push(BigInt::one());
        let a = BigInt::from(s.magnitude.clone());
        if s.sign > 0 {
            // (1-u)^{-a}: c_k = c_{k-1} (a+k-1)/k
            for k in 1..=max_k {
                let prev = factor_coeffs[k - 1].clone();
                let num = prev * (&a + BigInt::from(k as i64 - 1));
                factor_coeffs.push(num / BigInt::from(k as i64));
            }
        } else {
            // (1+u)^{a}: c_k = c_{k-1} (a-k+1)/k, zero beyond k = a
            for k in 1..=max_k {
                if BigInt::from(k as i64) > a {
                    break;
                }
                let prev = factor_coeffs[k - 1].clone();
                let num = prev * (&a - BigInt::from(k as i64 - 1));
                factor_coeffs.push(num / BigInt::from(k as i64));
            }
        }
        let factor = TruncatedSeries::from_terms(
            nvars,
            bound,
            factor_coeffs.into_iter().enumerate().filter(|(k, _)| *k as i64 * deg <= bound).map(
                |(k, c)| {
                    let exps: Vec<i64> =
                        s.monomial.exps.iter().map(|&x| x * k as i64).collect();
                    (exps, c)
                },
            ),
        );
        result = result.mul(&factor)?;
    }
    Ok(result)
}

/// The standard product series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StdSeriesKind {
    /// `E(t) = Π (1 - t^m)^{-1}`, the partition generating function.
    EulerE,
    /// `M(t) = Π (1 - t^m)^{-m}`, the MacMahon function.
    MacMahonM,
    /// `M(s,t) = Π (1 - s t^m)^{-m}`.
    MSt,
    /// `M~(s,t) = M(s,t) M(s^{-1},t)`.
    MTildeSt,
}

/// Builds the truncated expansion of a standard product with the variables
/// `s`, `t` replaced by monomials of the ambient ring.  The `s` substitution
/// may be a Laurent monomial, but every term of the result must come out
/// with non-negative exponents.
pub fn std_series(
    kind: StdSeriesKind,
    s: Option<&Monomial>,
    t: &Monomial,
    nvars: usize,
    bound: i64,
) -> Result<TruncatedSeries, SeriesError> {
    let out = std_series_laurent(kind, s, t, nvars, bound)?;
    out.ensure_non_negative()?;
    Ok(out)
}

/// Same as [`std_series`] but keeps Laurent terms (intermediate use only).
pub(crate) fn std_series_laurent(
    kind: StdSeriesKind,
    s: Option<&Monomial>,
    t: &Monomial,
    nvars: usize,
    bound: i64,
) -> Result<TruncatedSeries, SeriesError> {
    if t.exps.len() != nvars || t.halved {
        return Err(SeriesError::InvalidSubstitution { reason: "bad t substitution".into() });
    }
    let t_deg: i64 = t.exps.iter().sum();
    if t_deg < 1 {
        return Err(SeriesError::InvalidSubstitution {
            reason: "t substitution must have positive degree".into(),
        });
    }
    let needs_s = matches!(kind, StdSeriesKind::MSt | StdSeriesKind::MTildeSt);
    if needs_s != s.is_some() {
        return Err(SeriesError::InvalidSubstitution {
            reason: "s substitution required exactly for M(s,t) and M~(s,t)".into(),
        });
    }
    if let Some(sm) = s {
        if sm.exps.len() != nvars || sm.halved {
            return Err(SeriesError::InvalidSubstitution { reason: "bad s substitution".into() });
        }
    }
    let mut arg = TruncatedSeries::zero(nvars, bound);
    let mut push = |exps: Vec<i64>, coeff: i64| -> Result<(), SeriesError> {
        let deg: i64 = exps.iter().sum();
        if deg < 1 {
            return Err(SeriesError::InvalidSubstitution {
                reason: format!("factor monomial {:?} has non-positive degree", exps),
            });
        }
        if deg <= bound {
            arg.add_term(exps, BigInt::from(coeff));
        }
        Ok(())
    };
    let mut m = 1i64;
    loop {
        let base: Vec<i64> = t.exps.iter().map(|&x| x * m).collect();
        let base_deg = t_deg * m;
        // Smallest achievable degree for this m; once even that exceeds the
        // bound no later m contributes.
        let s_deg: i64 = s.map(|sm| sm.exps.iter().sum()).unwrap_or(0);
        let min_deg = match kind {
            StdSeriesKind::EulerE | StdSeriesKind::MacMahonM => base_deg,
            StdSeriesKind::MSt => base_deg + s_deg,
            StdSeriesKind::MTildeSt => base_deg + s_deg.min(-s_deg),
        };
        if min_deg > bound {
            break;
        }
        match kind {
            StdSeriesKind::EulerE => push(base, 1)?,
            StdSeriesKind::MacMahonM => push(base, m)?,
            StdSeriesKind::MSt => {
                let sm = s.unwrap();
                let e: Vec<i64> = base.iter().zip(&sm.exps).map(|(&b, &x)| b + x).collect();
                push(e, m)?;
            }
            StdSeriesKind::MTildeSt => {
                let sm = s.unwrap();
                let plus: Vec<i64> = base.iter().zip(&sm.exps).map(|(&b, &x)| b + x).collect();
                let minus: Vec<i64> = base.iter().zip(&sm.exps).map(|(&b, &x)| b - x).collect();
                if plus.iter().sum::<i64>() <= bound {
                    push(plus, m)?;
                }
                if minus.iter().sum::<i64>() <= bound {
                    push(minus, m)?;
                }
            }
        }
        m += 1;
    }
    pexp_engine(&arg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1(bound: i64, terms: &[(i64, i64)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            1,
            bound,
            terms.iter().map(|&(e, c)| (vec![e], BigInt::from(c))),
        )
    }

    #[test]
    fn add_cancellation() {
        let a = s1(5, &[(0, 1), (1, 1)]);
        let b = s1(5, &[(0, 1), (1, -1)]);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum, s1(5, &[(0, 2)]));
    }

    #[test]
    fn add_identity_and_two_vars() {
        let f = s1(6, &[(1, 3), (4, -2)]);
        let z = TruncatedSeries::zero(1, 6);
        assert_eq!(f.add(&z).unwrap(), f);
        let a = TruncatedSeries::from_terms(
            2,
            4,
            [(vec![1, 0], BigInt::from(1)), (vec![0, 1], BigInt::from(1))],
        );
        let b = TruncatedSeries::from_terms(
            2,
            4,
            [(vec![1, 0], BigInt::from(1)), (vec![0, 1], BigInt::from(-1))],
        );
        let expect = TruncatedSeries::from_terms(2, 4, [(vec![1, 0], BigInt::from(2))]);
        assert_eq!(a.add(&b).unwrap(), expect);
    }

    #[test]
    fn add_nvars_mismatch() {
        let a = TruncatedSeries::one(1, 3);
        let b = TruncatedSeries::one(2, 3);
        assert!(matches!(a.add(&b), Err(SeriesError::NvarsMismatch { .. })));
    }

    #[test]
    fn mul_basic() {
        let a = s1(5, &[(0, 1), (1, 1)]);
        let b = s1(5, &[(0, 1), (1, -1)]);
        assert_eq!(a.mul(&b).unwrap(), s1(5, &[(0, 1), (2, -1)]));
        let f = s1(5, &[(2, 7), (3, -1)]);
        assert_eq!(f.mul(&TruncatedSeries::one(1, 5)).unwrap(), f);
    }

    #[test]
    fn mul_truncates_to_min_bound() {
        // (1+t+t^2)(1-t) = 1 - t^3, truncated at bound 2 -> 1
        let a = s1(5, &[(0, 1), (1, 1), (2, 1)]);
        let b = s1(2, &[(0, 1), (1, -1)]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.bound(), 2);
        assert_eq!(p, s1(2, &[(0, 1)]));
    }

    #[test]
    fn inv_geometric() {
        let a = s1(6, &[(0, 1), (1, -1)]);
        let inv = a.inv().unwrap();
        for k in 0..=6 {
            assert_eq!(inv.coeff(&[k]), BigInt::one());
        }
        assert_eq!(TruncatedSeries::one(1, 4).inv().unwrap(), TruncatedSeries::one(1, 4));
        assert_eq!(a.mul(&inv).unwrap(), TruncatedSeries::one(1, 6));
    }

    #[test]
    fn inv_two_vars_hand_expansion() {
        // inv(1 - t0 - t1) at bound 2 = 1 + t0 + t1 + t0^2 + 2 t0 t1 + t1^2
        let a = TruncatedSeries::from_terms(
            2,
            2,
            [
                (vec![0, 0], BigInt::from(1)),
                (vec![1, 0], BigInt::from(-1)),
                (vec![0, 1], BigInt::from(-1)),
            ],
        );
        let inv = a.inv().unwrap();
        let expect = TruncatedSeries::from_terms(
            2,
            2,
            [
                (vec![0, 0], BigInt::from(1)),
                (vec![1, 0], BigInt::from(1)),
                (vec![0, 1], BigInt::from(1)),
                (vec![2, 0], BigInt::from(1)),
                (vec![1, 1], BigInt::from(2)),
                (vec![0, 2], BigInt::from(1)),
            ],
        );
        assert_eq!(inv, expect);
    }

    #[test]
    fn inv_requires_unit_constant() {
        assert!(matches!(
            s1(3, &[(0, 2)]).inv(),
            Err(SeriesError::NonUnitConstant)
        ));
        assert!(matches!(
            s1(3, &[(1, 1)]).inv(),
            Err(SeriesError::NonUnitConstant)
        ));
    }

    // Brute-force oracle: number of partitions of n.
    fn count_partitions(n: i64, max_part: i64) -> i64 {
        if n == 0 {
            return 1;
        }
        (1..=max_part.min(n)).map(|p| count_partitions(n - p, p)).sum()
    }

    // Brute-force oracle: number of plane partitions of n, counted as chains
    // of ordinary partitions under containment (layer decomposition).
    fn count_plane_partitions(n: i64) -> i64 {
        fn parts_within(n: i64, shape: &[i64]) -> Vec<Vec<i64>> {
            // all partitions of n fitting under `shape` (row-wise bound)
            fn go(n: i64, shape: &[i64], row: usize, maxp: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
                if n == 0 {
                    out.push(cur.clone());
                    return;
                }
                if row >= shape.len() {
                    return;
                }
                let hi = maxp.min(shape[row]).min(n);
                for p in (1..=hi).rev() {
                    cur.push(p);
                    go(n - p, shape, row + 1, p, cur, out);
                    cur.pop();
                }
            }
            let mut out = Vec::new();
            let mut cur = Vec::new();
            go(n, shape, 0, i64::MAX, &mut cur, &mut out);
            out
        }
        fn chains(rest: i64, prev: &[i64]) -> i64 {
            if rest == 0 {
                return 1;
            }
            let mut total = 0;
            for k in 1..=rest {
                for lam in parts_within(k, prev) {
                    total += chains(rest - k, &lam);
                }
            }
            total
        }
        let wide = vec![n; n.max(1) as usize];
        let mut total = 0;
        for k in (0..=n).rev() {
            if k == 0 {
                if n == 0 {
                    total += 1;
                }
                continue;
            }
            for lam in parts_within(k, &wide) {
                total += chains(n - k, &lam);
            }
        }
        total
    }

    #[test]
    fn pexp_geometric_and_sign() {
        let t = s1(6, &[(1, 1)]);
        let e = t.pexp_sigma().unwrap();
        for k in 0..=6 {
            assert_eq!(e.coeff(&[k]), BigInt::one());
        }
        let neg = s1(6, &[(1, -1)]);
        assert_eq!(neg.pexp_sigma().unwrap(), s1(6, &[(0, 1), (1, 1)]));
    }

    #[test]
    fn pexp_partition_counts() {
        // PExp^σ(t/(1-t)) = E(t); coefficients are partition numbers
        let bound = 8;
        let arg = s1(bound, &(1..=bound).map(|m| (m, 1)).collect::<Vec<_>>());
        let e = arg.pexp_sigma().unwrap();
        for n in 0..=bound {
            assert_eq!(e.coeff(&[n]), BigInt::from(count_partitions(n, n)), "E coeff {}", n);
        }
    }

    #[test]
    fn pexp_plane_partition_counts() {
        // PExp^σ(t/(1-t)^2) = M(t); coefficients are plane partition numbers
        let bound = 6;
        let arg = s1(bound, &(1..=bound).map(|m| (m, m)).collect::<Vec<_>>());
        let m = arg.pexp_sigma().unwrap();
        let expect = [1, 1, 3, 6, 13, 24, 48];
        for n in 0..=bound {
            assert_eq!(m.coeff(&[n]), BigInt::from(expect[n as usize]), "M coeff {}", n);
            assert_eq!(BigInt::from(count_plane_partitions(n)), BigInt::from(expect[n as usize]));
        }
    }

    #[test]
    fn pexp_rejects_bad_input() {
        assert!(matches!(
            s1(4, &[(0, 1), (1, 1)]).pexp_sigma(),
            Err(SeriesError::NonZeroConstant)
        ));
        let laurent = TruncatedSeries::from_terms(1, 4, [(vec![-1], BigInt::from(1)), (vec![3], BigInt::from(1))]);
        assert!(matches!(laurent.pexp_sigma(), Err(SeriesError::NegativeExponent { .. })));
    }

    #[test]
    fn std_series_e_and_m() {
        let t = Monomial::unit_var(1, 0);
        let e = std_series(StdSeriesKind::EulerE, None, &t, 1, 5).unwrap();
        let e_expect = [1, 1, 2, 3, 5, 7];
        for n in 0..=5 {
            assert_eq!(e.coeff(&[n]), BigInt::from(e_expect[n as usize]));
        }
        let m = std_series(StdSeriesKind::MacMahonM, None, &t, 1, 5).unwrap();
        let m_expect = [1, 1, 3, 6, 13, 24];
        for n in 0..=5 {
            assert_eq!(m.coeff(&[n]), BigInt::from(m_expect[n as usize]));
        }
    }

    #[test]
    fn std_series_mtilde_hand_expansion() {
        // M~(s,t) with s = t1, t = t0 t1, to total degree 3:
        // 1 + t0 + t0^2 + t0^3 + t0 t1^2 + 2 t0^2 t1 + 2 t0^3 t1
        let s = Monomial::unit_var(2, 1);
        let t = Monomial::new(vec![1, 1]);
        let mt = std_series(StdSeriesKind::MTildeSt, Some(&s), &t, 2, 3).unwrap();
        let expect = TruncatedSeries::from_terms(
            2,
            3,
            [
                (vec![0, 0], BigInt::from(1)),
                (vec![1, 0], BigInt::from(1)),
                (vec![2, 0], BigInt::from(1)),
                (vec![3, 0], BigInt::from(1)),
                (vec![1, 2], BigInt::from(1)),
                (vec![2, 1], BigInt::from(2)),
            ],
        );
        assert_eq!(mt, expect);
        assert_eq!(mt.coeff(&[1, 2]), BigInt::one());
    }

    #[test]
    fn std_series_rejects_negative_result() {
        // M(s,t) with s = t0^2 t1^{-1}, t = t0: every factor monomial has
        // positive degree but a negative t1 exponent that never combines
        // away, so the expansion is rejected.
        let s = Monomial::new(vec![2, -1]);
        let t = Monomial::unit_var(2, 0);
        let r = std_series(StdSeriesKind::MSt, Some(&s), &t, 2, 5);
        assert!(matches!(r, Err(SeriesError::NegativeExponent { .. })));
        // a degenerate substitution (factor of degree zero) is caught, too
        let s0 = Monomial::new(vec![0, -1]);
        let r0 = std_series(StdSeriesKind::MSt, Some(&s0), &t, 2, 3);
        assert!(matches!(r0, Err(SeriesError::InvalidSubstitution { .. })));
    }

    #[test]
    fn mtilde_pexp_identity() {
        // M~(-s,t)^{-1} = PExp^σ(-(s+s^{-1}) t/(1-t)^2), checked under the
        // substitution s = t1, t = t0 t1 which makes all exponents
        // non-negative.
        let bound = 9;
        let s = Monomial::unit_var(2, 1);
        let t = Monomial::new(vec![1, 1]);
        let mt = std_series(StdSeriesKind::MTildeSt, Some(&s), &t, 2, bound).unwrap();
        // s-degree of a term t0^a t1^b is b - a; negating s flips odd ones
        let flipped = TruncatedSeries::from_terms(
            2,
            bound,
            mt.terms().map(|(e, c)| {
                let sgn = if (e[1] - e[0]).rem_euclid(2) == 1 { -c.clone() } else { c.clone() };
                (e.clone(), sgn)
            }),
        );
        let lhs = flipped.inv().unwrap();
        let mut arg = TruncatedSeries::zero(2, bound);
        let mut m = 1i64;
        while 2 * m - 1 <= bound {
            if 2 * m + 1 <= bound {
                arg.add_term(vec![m, m + 1], BigInt::from(-m));
            }
            arg.add_term(vec![m, m - 1], BigInt::from(-m));
            m += 1;
        }
        let rhs = arg.pexp_sigma().unwrap();
        assert_eq!(lhs.first_difference(&rhs), None);
    }

    #[test]
    fn specialize_examples() {
        let f = TruncatedSeries::from_terms(
            2,
            4,
            [(vec![1, 2], BigInt::from(5)), (vec![2, 0], BigInt::from(-1))],
        );
        let id = [Monomial::unit_var(2, 0), Monomial::unit_var(2, 1)];
        assert_eq!(f.specialize(&id, 2, 4).unwrap(), f);
        let collapse = [Monomial::unit_var(1, 0), Monomial::unit_var(1, 0)];
        let g = f.specialize(&collapse, 1, 4).unwrap();
        assert_eq!(g.coeff(&[3]), BigInt::from(5));
        assert_eq!(g.coeff(&[2]), BigInt::from(-1));
    }

    #[test]
    fn halve_roundtrip_and_residue_error() {
        let f = TruncatedSeries::from_terms(1, 4, [(vec![2], BigInt::from(3))]);
        let h = f.halve();
        assert!(h.halved());
        assert_eq!(h.un_halve().unwrap(), f);
        let odd = TruncatedSeries::from_terms(1, 4, [(vec![2], BigInt::from(3))]);
        let mut bad = odd.halve();
        bad.add_term(vec![3], BigInt::from(1)); // t0^{3/2}
        assert!(matches!(bad.un_halve(), Err(SeriesError::NonIntegralHalfPower { .. })));
    }

    #[test]
    fn json_roundtrip_and_order() {
        let f = TruncatedSeries::from_terms(
            2,
            3,
            [
                (vec![0, 2], BigInt::from(7)),
                (vec![1, 0], BigInt::from(-3)),
                (vec![0, 0], BigInt::from(1)),
            ],
        );
        let js = f.to_json_string();
        // graded-lex order: 1, t0, t1^2
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        let exps: Vec<Vec<i64>> = v["terms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["exp"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect())
            .collect();
        assert_eq!(exps, vec![vec![0, 0], vec![1, 0], vec![0, 2]]);
        assert_eq!(TruncatedSeries::from_json_str(&js).unwrap(), f);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_series(nvars: usize, bound: i64) -> impl Strategy<Value = TruncatedSeries> {
            let term = (
                proptest::collection::vec(0i64..=bound, nvars),
                -6i64..=6,
            );
            proptest::collection::vec(term, 0..8).prop_map(move |ts| {
                let mut s = TruncatedSeries::zero(nvars, bound);
                for (e, c) in ts {
                    if e.iter().sum::<i64>() <= bound {
                        s.add_term(e, BigInt::from(c));
                    }
                }
                s
            })
        }

        proptest! {
            #[test]
            fn ring_axioms(a in arb_series(2, 8), b in arb_series(2, 8), c in arb_series(2, 8)) {
                prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
                prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
                let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
                let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(ab_c, a_bc);
                let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
                let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn inv_roundtrip(a in arb_series(2, 6), unit in prop::bool::ANY) {
                let mut u = a;
                let c0 = if unit { 1 } else { -1 };
                // force the constant term to ±1
                let cur = u.constant_term();
                u.add_term(vec![0, 0], BigInt::from(c0) - cur);
                let inv = u.inv().unwrap();
                prop_assert_eq!(u.mul(&inv).unwrap(), TruncatedSeries::one(2, 6));
            }

            #[test]
            fn pexp_non_negative(a in arb_series(2, 7)) {
                let mut arg = a;
                let cur = arg.constant_term();
                arg.add_term(vec![0, 0], -cur);
                let out = arg.pexp_sigma().unwrap();
                for (_, c) in out.terms() {
                    prop_assert!(!c.is_negative());
                }
            }

            #[test]
            fn pexp_restricted_multiplicativity(f in arb_series(2, 7), g in arb_series(2, 7)) {
                // with all-non-negative coefficients, PExp^σ(f+g) = PExp^σ(f)·PExp^σ(g)
                let abs = |s: &TruncatedSeries| TruncatedSeries::from_terms(
                    2, 7,
                    s.terms().map(|(e, c)| (e.clone(), c.abs()))
                );
                let mut f = abs(&f);
                let mut g = abs(&g);
                let cf = f.constant_term();
                f.add_term(vec![0, 0], -cf);
                let cg = g.constant_term();
                g.add_term(vec![0, 0], -cg);
                let lhs = f.add(&g).unwrap().pexp_sigma().unwrap();
                let rhs = f.pexp_sigma().unwrap().mul(&g.pexp_sigma().unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
