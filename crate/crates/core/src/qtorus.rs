//! Series with Laurent-polynomial coefficients in a formal half power
//! `q^{1/2}`, multiplied through a quiver Euler pairing:
//! `x^d · x^e = q^{(d,e)/2} x^{d+e}`.
//!
//! Half powers of `q` are stored as doubled integer exponents, so the
//! coefficient `q^{n/2}` sits at key `n`.  The paper's Laurent-series
//! coefficient ring is truncated here to finitely supported Laurent
//! polynomials; every in-scope computation has polynomial q-content per
//! weight.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::groups::{mckay_quiver, ColourGroup, DimVector};
use crate::mpoly::{SeriesError, TruncatedSeries};
use crate::part3d;

/// A Laurent polynomial in `q^{1/2}`: map from doubled exponents to
/// coefficients, no zero entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QLaurent {
    terms: BTreeMap<i64, BigInt>,
}

impl QLaurent {
    pub fn zero() -> Self {
        QLaurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        QLaurent::monomial(0, BigInt::one())
    }

    /// `coeff * q^{doubled_exp / 2}`.
    pub fn monomial(doubled_exp: i64, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(doubled_exp, coeff);
        }
        QLaurent { terms }
    }

    /// `coeff * (-q^{1/2})^m = (-1)^m coeff * q^{m/2}`.
    pub fn signed_half_power(m: i64, coeff: BigInt) -> Self {
        let c = if m.rem_euclid(2) == 1 { -coeff } else { coeff };
        QLaurent::monomial(m, c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, doubled_exp: i64) -> BigInt {
        self.terms.get(&doubled_exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_assign(&mut self, other: &QLaurent) {
        for (&e, c) in &other.terms {
            let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
            *entry += c;
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn mul(&self, other: &QLaurent) -> QLaurent {
        let mut out = QLaurent::zero();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &other.terms {
                let entry = out.terms.entry(ea + eb).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Multiplies by `q^{doubled/2}`.
    pub fn shift(&self, doubled: i64) -> QLaurent {
        QLaurent { terms: self.terms.iter().map(|(&e, c)| (e + doubled, c.clone())).collect() }
    }

    /// Value at `q^{1/2} = 1`: the sum of all coefficients.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// True when every stored exponent is an even (integer) power with
    /// non-negative coefficient of the expected form; used by tests.
    pub fn is_q_free(&self) -> bool {
        self.terms.keys().all(|&e| e == 0)
    }
}

/// The multiplication twist: either trivial (ordinary commutative series)
/// or a quiver Euler pairing given as a matrix `B` with `(d,e) = d^T B e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pairing {
    Trivial,
    Euler(Vec<Vec<i64>>),
}

impl Pairing {
    pub fn value(&self, d: &[i64], e: &[i64]) -> i64 {
        match self {
            Pairing::Trivial => 0,
            Pairing::Euler(b) => {
                let mut total = 0i64;
                for (i, &di) in d.iter().enumerate() {
                    if di == 0 {
                        continue;
                    }
                    for (j, &ej) in e.iter().enumerate() {
                        total += di * b[i][j] * ej;
                    }
                }
                total
            }
        }
    }
}

/// A truncated series in the t-variables whose coefficients are Laurent
/// polynomials in `q^{1/2}`, with multiplication twisted by `pairing`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    nvars: usize,
    bound: i64,
    pairing: Pairing,
    terms: BTreeMap<Vec<i64>, QLaurent>,
}

impl QSeries {
    pub fn zero(nvars: usize, bound: i64, pairing: Pairing) -> Self {
        QSeries { nvars, bound, pairing, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize, bound: i64, pairing: Pairing) -> Self {
        let mut s = QSeries::zero(nvars, bound, pairing);
        s.terms.insert(vec![0; nvars], QLaurent::one());
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &QLaurent)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i64]) -> QLaurent {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Adds `coeff * x^exps`, dropping terms above the bound.
    pub fn add_term(&mut self, exps: Vec<i64>, coeff: QLaurent) {
        assert_eq!(exps.len(), self.nvars);
        assert!(exps.iter().all(|&e| e >= 0), "t-exponents must be non-negative");
        if coeff.is_zero() || exps.iter().sum::<i64>() > self.bound {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(QLaurent::zero);
        entry.add_assign(&coeff);
        if entry.is_zero() {
            let key: Vec<i64> = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    /// Lifts an ordinary series to a q-free QSeries.
    pub fn from_scalar_series(s: &TruncatedSeries, pairing: Pairing) -> QSeries {
        assert!(!s.halved());
        let mut out = QSeries::zero(s.nvars(), s.bound(), pairing);
        for (e, c) in s.terms() {
            out.terms.insert(e.clone(), QLaurent::monomial(0, c.clone()));
        }
        out
    }

    /// Twisted product: term pairs multiply with the factor
    /// `q^{(d,e)/2}`.  Both operands must share the pairing.
    pub fn qt_mul(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        if self.nvars != other.nvars {
            return Err(SeriesError::NvarsMismatch { left: self.nvars, right: other.nvars });
        }
        if self.pairing != other.pairing {
            return Err(SeriesError::InvalidSubstitution {
                reason: "pairing mismatch in quantum torus product".into(),
            });
        }
        let bound = self.bound.min(other.bound);
        let mut bt: Vec<(&Vec<i64>, i64, &QLaurent)> =
            other.terms.iter().map(|(e, c)| (e, e.iter().sum::<i64>(), c)).collect();
        bt.sort_by_key(|&(_, d, _)| d);
        let mut out = QSeries::zero(self.nvars, bound, self.pairing.clone());
        for (ea, ca) in &self.terms {
            let da: i64 = ea.iter().sum();
            for &(eb, db, cb) in &bt {
                if da + db > bound {
                    break;
                }
                let twist = self.pairing.value(ea, eb);
                let exps: Vec<i64> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                let c = ca.mul(cb).shift(twist);
                let entry = out.terms.entry(exps).or_insert_with(QLaurent::zero);
                entry.add_assign(&c);
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Drops all q-terms with doubled exponent above `doubled_qbound` (in
    /// absolute value).
    pub fn truncate_q(&mut self, doubled_qbound: i64) {
        for c in self.terms.values_mut() {
            c.terms.retain(|&e, _| e.abs() <= doubled_qbound);
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    /// Sets `q^{1/2} = 1`, collapsing each coefficient to an integer.
    pub fn q_specialize(&self) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.nvars, self.bound);
        for (e, c) in &self.terms {
            let v = c.eval_at_one();
            if !v.is_zero() {
                out.add_term(e.clone(), v);
            }
        }
        out
    }

    /// JSON extension of the series format: coefficients become lists of
    /// `{"qexp_doubled": n, "coeff": "<decimal>"}` objects.
    pub fn to_json_string(&self) -> String {
        let mut keys: Vec<&Vec<i64>> = self.terms.keys().collect();
        keys.sort_by(|a, b| crate::mpoly::graded_lex_cmp(a, b));
        let terms: Vec<serde_json::Value> = keys
            .iter()
            .map(|k| {
                let c = &self.terms[*k];
                let coeffs: Vec<serde_json::Value> = c
                    .terms()
                    .map(|(&e, v)| {
                        serde_json::json!({ "qexp_doubled": e, "coeff": v.to_string() })
                    })
                    .collect();
                serde_json::json!({ "exp": k, "coeff": coeffs })
            })
            .collect();
        serde_json::json!({
            "nvars": self.nvars,
            "bound": self.bound,
            "pairing": match &self.pairing {
                Pairing::Trivial => serde_json::Value::String("trivial".into()),
                Pairing::Euler(b) => serde_json::json!({ "euler": b }),
            },
            "terms": terms,
        })
        .to_string()
    }
}

/// Packages the coloured plane-partition counts of `g` as a quantum-torus
/// element: the weight-`d` count rides on `(-q^{1/2})^{d_0 + (d,d)}`.
/// Setting `q^{1/2} = 1` recovers the signed series.
pub fn signed_char(g: &ColourGroup, bound: i64) -> QSeries {
    let q = mckay_quiver(g);
    let euler = q.euler_matrix();
    let z = part3d::z3d(g, bound, 1);
    let mut out = QSeries::zero(z.nvars(), bound, Pairing::Euler(euler.clone()));
    for (e, c) in z.terms() {
        let d = DimVector::new(e.clone());
        let pairing = Pairing::Euler(euler.clone());
        let dd = pairing.value(&d.0, &d.0);
        let m = e[0] + dd;
        out.add_term(e.clone(), QLaurent::signed_half_power(m, c.clone()));
    }
    out
}
