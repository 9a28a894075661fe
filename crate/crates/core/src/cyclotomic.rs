//! Exact arithmetic in rings of cyclotomic integers `Z[ζ_N]`.
//!
//! Elements are integer polynomials in `ζ = ζ_N` reduced modulo the N-th
//! cyclotomic polynomial, so representations are unique and equality is
//! coefficient equality.  This is all the number theory the character
//! tables need: addition, multiplication, complex conjugation
//! (`ζ ↦ ζ^{-1}`) and recognising rational integers.

use std::fmt;

/// Coefficients of the N-th cyclotomic polynomial, lowest degree first.
/// Computed by the recursive exact division
/// `Φ_N = (x^N - 1) / Π_{d|N, d<N} Φ_d`.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![-1, 1];
    }
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    let mut quo = num;
    for d in 1..n {
        if n % d == 0 {
            quo = poly_div_exact(&quo, &cyclotomic_polynomial(d));
        }
    }
    quo
}

/// Exact division of integer polynomials with monic divisor (panics on a
/// non-zero remainder).
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    assert_eq!(*den.last().unwrap(), 1, "divisor must be monic");
    let mut rem: Vec<i64> = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        assert!(rem.iter().all(|&c| c == 0), "non-zero remainder");
        return vec![0];
    }
    let mut quo = vec![0i64; rem.len() - dd];
    for i in (0..quo.len()).rev() {
        let c = rem[i + dd];
        quo[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "non-zero remainder in exact division");
    quo
}

/// The ring `Z[ζ_N]`, holding the reduction polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycRing {
    n: usize,
    /// Φ_N, monic, lowest degree first.
    phi: Vec<i64>,
}

/// An element of `Z[ζ_N]` in reduced form: degree < deg Φ_N.
#[derive(Clone, PartialEq, Eq)]
pub struct CycInt {
    coeffs: Vec<i64>,
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc{:?}", self.coeffs)
    }
}

impl CycRing {
    pub fn new(n: usize) -> Self {
        CycRing { n, phi: cyclotomic_polynomial(n) }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Degree of the extension, `φ(N)`.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    fn reduce(&self, mut coeffs: Vec<i64>) -> CycInt {
        let deg = self.degree();
        while coeffs.len() > deg {
            let i = coeffs.len() - 1;
            let c = coeffs[i];
            if c != 0 {
                // x^i = x^{i-deg} (x^deg - Φ_N) because Φ_N is monic
                for (j, &pj) in self.phi.iter().enumerate().take(deg) {
                    coeffs[i - deg + j] -= c * pj;
                }
            }
            coeffs.pop();
        }
        coeffs.resize(deg, 0);
        CycInt { coeffs }
    }

    pub fn zero(&self) -> CycInt {
        CycInt { coeffs: vec![0; self.degree()] }
    }

    pub fn from_int(&self, v: i64) -> CycInt {
        let mut c = vec![0; self.degree()];
        if self.degree() > 0 {
            c[0] = v;
        }
        CycInt { coeffs: c }
    }

    pub fn one(&self) -> CycInt {
        self.from_int(1)
    }

    /// `ζ_N^k`.
    pub fn zeta_pow(&self, k: i64) -> CycInt {
        let k = k.rem_euclid(self.n as i64) as usize;
        let mut c = vec![0i64; k + 1];
        c[k] = 1;
        self.reduce(c)
    }

    pub fn add(&self, a: &CycInt, b: &CycInt) -> CycInt {
        CycInt { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| x + y).collect() }
    }

    pub fn sub(&self, a: &CycInt, b: &CycInt) -> CycInt {
        CycInt { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| x - y).collect() }
    }

    pub fn neg(&self, a: &CycInt) -> CycInt {
        CycInt { coeffs: a.coeffs.iter().map(|&x| -x).collect() }
    }

    pub fn mul(&self, a: &CycInt, b: &CycInt) -> CycInt {
        let mut prod = vec![0i64; a.coeffs.len() + b.coeffs.len()];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(prod)
    }

    pub fn scale(&self, a: &CycInt, k: i64) -> CycInt {
        CycInt { coeffs: a.coeffs.iter().map(|&x| x * k).collect() }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self, a: &CycInt) -> CycInt {
        let mut acc = self.zero();
        for (k, &c) in a.coeffs.iter().enumerate() {
            if c != 0 {
                let term = self.scale(&self.zeta_pow(-(k as i64)), c);
                acc = self.add(&acc, &term);
            }
        }
        acc
    }

    /// Returns the value as a rational integer, if it is one.
    pub fn as_int(&self, a: &CycInt) -> Option<i64> {
        if a.coeffs.iter().skip(1).all(|&c| c == 0) {
            Some(a.coeffs.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn is_zero(&self, a: &CycInt) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_relations() {
        for n in [4usize, 8, 12, 20] {
            let ring = CycRing::new(n);
            assert_eq!(ring.zeta_pow(n as i64), ring.one());
            assert_eq!(ring.zeta_pow(n as i64 / 2), ring.from_int(-1));
            let z = ring.zeta_pow(1);
            let zi = ring.zeta_pow(-1);
            assert_eq!(ring.mul(&z, &zi), ring.one());
            // conjugation is an involution and fixes integers
            let a = ring.add(&ring.zeta_pow(3), &ring.scale(&ring.zeta_pow(1), 5));
            assert_eq!(ring.conj(&ring.conj(&a)), a);
            assert_eq!(ring.conj(&ring.from_int(7)), ring.from_int(7));
        }
    }

    #[test]
    fn real_combinations() {
        let ring = CycRing::new(12);
        // ζ + ζ^{-1} is fixed by conjugation
        let s = ring.add(&ring.zeta_pow(1), &ring.zeta_pow(-1));
        assert_eq!(ring.conj(&s), s);
        // (ζ + ζ^{-1})(ζ - ζ^{-1}) = ζ² - ζ^{-2}
        let d = ring.sub(&ring.zeta_pow(1), &ring.zeta_pow(-1));
        let lhs = ring.mul(&s, &d);
        let rhs = ring.sub(&ring.zeta_pow(2), &ring.zeta_pow(-2));
        assert_eq!(lhs, rhs);
        assert_eq!(ring.as_int(&ring.from_int(-3)), Some(-3));
        assert_eq!(ring.as_int(&s), None);
    }
}
