//! Dense univariate polynomials over Q.

mod zfactor;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{rational_vec_str, Interval, Rational};

pub use zfactor::{factor_over_q, Factorization};

/// Coefficients stored constant term first, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Rational>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let m = a.abs();
            let show_coeff = k == 0 || !m.is_one();
            if show_coeff {
                write!(f, "{m}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{k}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Poly {
        while c.last().is_some_and(|a| a.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&a| Rational::from_integer(BigInt::from(a))).collect())
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn constant(a: Rational) -> Poly {
        Poly::new(vec![a])
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn x() -> Poly {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn monomial(a: Rational, k: usize) -> Poly {
        let mut c = vec![Rational::zero(); k + 1];
        c[k] = a;
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.c.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.c.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.c.iter().rev().fold(Rational::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_interval(&self, x: Interval) -> Interval {
        self.c
            .iter()
            .rev()
            .fold(Interval::ZERO, |acc, a| acc * x + Interval::from_rational(a))
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.lead().recip())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// `p(x^k)`.
    pub fn inflate(&self, k: usize) -> Poly {
        let Some(n) = self.degree() else { return Poly::zero() };
        let mut c = vec![Rational::zero(); n * k + 1];
        for (j, a) in self.c.iter().enumerate() {
            c[j * k] = a.clone();
        }
        Poly::new(c)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dn = d.degree().expect("division by zero polynomial");
        let lead_inv = d.lead().recip();
        let mut r = self.c.clone();
        if r.len() <= dn {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dn];
        for k in (0..q.len()).rev() {
            let f = &r[k + dn] * &lead_inv;
            if !f.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= &f * b;
                }
            }
            q[k] = f;
        }
        r.truncate(dn);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Coefficients of `p(a + x)`, i.e. the Taylor coefficients at `a`.
    pub fn taylor(&self, a: &Rational) -> Vec<Rational> {
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = &c[j + 1] * a;
                c[j] += t;
            }
        }
        c
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.c.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()))
    }

    /// Integer coefficients of `D * p` with `D = denom_lcm`.
    pub fn cleared(&self) -> Vec<BigInt> {
        let d = Rational::from_integer(self.denom_lcm());
        self.c.iter().map(|a| (a * &d).to_integer()).collect()
    }

    /// Yun's algorithm: `p = lead * prod q_i^i` with each `q_i` monic and
    /// squarefree, pairwise coprime. Trivial factors are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut dd = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dd);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = dd.div_rem(&a).0;
            dd = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Product of the distinct monic squarefree factors.
    pub fn squarefree_part(&self) -> Poly {
        self.squarefree_decomposition()
            .into_iter()
            .fold(Poly::one(), |acc, (q, _)| &acc * &q)
    }

    /// Cauchy bound `1 + max |a_j / a_n|` on the absolute values of roots.
    pub fn cauchy_bound(&self) -> Rational {
        let lead = self.lead().abs();
        let n = self.c.len().saturating_sub(1);
        let m = self.c[..n]
            .iter()
            .map(|a| a.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        Rational::one() + m
    }
}

/// Serialized as the list of coefficients, constant term first.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_vec_str::serialize(&self.c, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Poly, D::Error> {
        rational_vec_str::deserialize(d).map(Poly::new)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.c.len().max(rhs.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.c.len().max(rhs.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.iter().map(|a| -a).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

/// Determinant by Gaussian elimination over Q.
pub fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for k in col..n {
                let t = &f * &m[col][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

/// Sylvester resultant of `f` and `g` viewed with formal degrees `m` and
/// `n` (coefficients constant first, padded with zeros as needed). This is
/// the resultant of the binary forms `Y^m f(X/Y)` and `Y^n g(X/Y)`.
pub fn sylvester_resultant(f: &[Rational], m: usize, g: &[Rational], n: usize) -> Rational {
    let size = m + n;
    if size == 0 {
        return Rational::one();
    }
    let get = |c: &[Rational], k: usize| c.get(k).cloned().unwrap_or_else(Rational::zero);
    let mut rows = Vec::with_capacity(size);
    // rows hold coefficients from highest to lowest degree
    for i in 0..n {
        let mut row = vec![Rational::zero(); size];
        for j in 0..=m {
            row[i + j] = get(f, m - j);
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![Rational::zero(); size];
        for j in 0..=n {
            row[i + j] = get(g, n - j);
        }
        rows.push(row);
    }
    determinant(rows)
}

/// Resultant with the actual degrees.
pub fn resultant(f: &Poly, g: &Poly) -> Rational {
    match (f.degree(), g.degree()) {
        (Some(m), Some(n)) => sylvester_resultant(f.coeffs(), m, g.coeffs(), n),
        _ => Rational::zero(),
    }
}

/// `disc(p) = (-1)^{n(n-1)/2} Res(p, p') / lead(p)`.
pub fn discriminant(p: &Poly) -> Rational {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return Rational::one();
    }
    let r = resultant(p, &p.derivative()) / p.lead();
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn division_and_gcd() {
        let f = Poly::from_ints(&[-1, 0, 1]);
        let g = Poly::from_ints(&[-1, 1]);
        let (q, r) = f.div_rem(&g);
        assert_eq!(q, Poly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.gcd(&Poly::from_ints(&[1, 2, 1])), Poly::from_ints(&[1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^3 (x+2)
        let f = &Poly::from_ints(&[-1, 1]).pow(3) * &Poly::from_ints(&[2, 1]);
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(Poly::from_ints(&[2, 1]), 1), (Poly::from_ints(&[-1, 1]), 3)]);
    }

    #[test]
    fn taylor_shift() {
        // x^2 at a = 3: 9 + 6x + x^2
        let f = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(f.taylor(&int(3)), vec![int(9), int(6), int(1)]);
    }

    #[test]
    fn resultants() {
        // Res(x^2 - 2, x - 1) = 1 - 2 = -1 (up to sign convention: g(root) products)
        let f = Poly::from_ints(&[-2, 0, 1]);
        let g = Poly::from_ints(&[-1, 1]);
        assert_eq!(resultant(&f, &g).abs(), int(1));
        assert_eq!(discriminant(&f), int(8));
        assert_eq!(discriminant(&Poly::from_ints(&[1, -3, 1])), int(5));
    }

    #[test]
    fn formal_degree_resultant() {
        // Res(X^2 + Y^2/3, Y^2) as forms: leading Y-coefficient of the first
        let f = vec![rat(1, 3), int(0), int(1)];
        let g = vec![int(1)];
        assert_eq!(sylvester_resultant(&f, 2, &g, 2), int(1));
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_ints(&[1, 0, -3, 1]).to_string(), "x^3 - 3*x^2 + 1");
    }
}
