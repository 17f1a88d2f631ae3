//! Factorization of polynomials over Q by the big-prime Zassenhaus method:
//! factor modulo a prime larger than twice the Mignotte bound with
//! Cantor–Zassenhaus, then recombine modular factors by trial division.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Poly;
use crate::arith::factor::is_prime;
use crate::arith::Rational;
use crate::error::Result;

/// `p = content * prod f_i^{m_i}` with each `f_i` monic and irreducible.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub content: Rational,
    pub factors: Vec<(Poly, u32)>,
}

pub fn factor_over_q(p: &Poly) -> Result<Factorization> {
    let content = p.lead();
    let mut factors = Vec::new();
    for (q, m) in p.squarefree_decomposition() {
        for g in factor_squarefree(&q) {
            factors.push((g, m));
        }
    }
    factors.sort_by(|a, b| {
        (a.0.degree(), a.0.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>())
            .cmp(&(b.0.degree(), b.0.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()))
    });
    Ok(Factorization { content, factors })
}

fn primitive_integer(p: &Poly) -> Vec<BigInt> {
    let c = p.cleared();
    let g = c.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
    let sign = if c.last().is_some_and(|a| a.is_negative()) { -BigInt::one() } else { BigInt::one() };
    c.into_iter().map(|a| a / &g * &sign).collect()
}

fn to_poly(c: &[BigInt]) -> Poly {
    Poly::new(c.iter().map(|a| Rational::from_integer(a.clone())).collect())
}

/// Monic irreducible factors of a monic squarefree polynomial.
fn factor_squarefree(q: &Poly) -> Vec<Poly> {
    let n = q.degree().unwrap_or(0);
    if n <= 1 {
        return if n == 1 { vec![q.clone()] } else { vec![] };
    }
    let f = primitive_integer(q);
    let lc = f.last().unwrap().abs();
    let norm2 = f.iter().map(|a| a * a).fold(BigInt::zero(), |s, x| s + x).sqrt() + 1;
    let bound: BigInt = (BigInt::one() << n) * norm2 * &lc * 2 + 1;
    let mut cand = bound.to_biguint().unwrap() | BigUint::one();
    let p = loop {
        if is_prime(&cand) {
            let pb = BigInt::from(cand.clone());
            let fp = reduce(&f, &pb);
            let dfp = reduce(&deriv(&f), &pb);
            if gcd_mod(&fp, &dfp, &pb).len() == 1 {
                break pb;
            }
        }
        cand += 2u32;
    };
    let fp = reduce(&f, &p);
    let monic_fp = make_monic(&fp, &p);
    let mut rng = XorShift(0x9e37_79b9_7f4a_7c15);
    let modular = factor_mod_p(&monic_fp, &p, &mut rng);
    recombine(f, modular, &p)
        .into_iter()
        .map(|g| to_poly(&g).monic())
        .collect()
}

fn recombine(mut f: Vec<BigInt>, mut modular: Vec<Vec<BigInt>>, p: &BigInt) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    let half = p / 2;
    let mut s = 1;
    while 2 * s <= modular.len() {
        let mut found = None;
        for subset in combinations(modular.len(), s) {
            let lc = f.last().unwrap().clone();
            let mut g = vec![lc.mod_floor(p)];
            for &i in &subset {
                g = mul_mod(&g, &modular[i], p);
            }
            let lifted: Vec<BigInt> = g.into_iter().map(|a| if a > half { a - p } else { a }).collect();
            let cand = primitive_integer(&to_poly(&lifted));
            let (quot, rem) = to_poly(&f).div_rem(&to_poly(&cand));
            if rem.is_zero() {
                found = Some((subset, cand, quot));
                break;
            }
        }
        match found {
            Some((subset, cand, quot)) => {
                out.push(cand);
                f = primitive_integer(&quot);
                for &i in subset.iter().rev() {
                    modular.remove(i);
                }
            }
            None => s += 1,
        }
    }
    if f.len() > 1 {
        out.push(f);
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { return out };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn below(&mut self, p: &BigInt) -> BigInt {
        let words = p.bits() / 64 + 2;
        let digits: Vec<u32> = (0..words * 2).map(|_| self.next() as u32).collect();
        BigInt::from_slice(Sign::Plus, &digits).mod_floor(p)
    }
}

// Polynomials mod p: coefficient vectors, constant first, entries in [0, p).

fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.last().is_some_and(|x| x.is_zero()) {
        a.pop();
    }
    a
}

fn reduce(a: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    trim(a.iter().map(|x| x.mod_floor(p)).collect())
}

fn deriv(a: &[BigInt]) -> Vec<BigInt> {
    a.iter().enumerate().skip(1).map(|(k, x)| x * BigInt::from(k)).collect()
}

fn inv_mod(a: &BigInt, p: &BigInt) -> BigInt {
    a.modpow(&(p - 2), p)
}

fn make_monic(a: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let inv = inv_mod(a.last().unwrap(), p);
    a.iter().map(|x| (x * &inv).mod_floor(p)).collect()
}

fn sub_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim((0..n).map(|k| (a.get(k).unwrap_or(&z) - b.get(k).unwrap_or(&z)).mod_floor(p)).collect())
}

fn mul_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    reduce(&c, p)
}

fn divrem_mod(a: &[BigInt], m: &[BigInt], p: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let dm = m.len() - 1;
    let inv = inv_mod(m.last().unwrap(), p);
    let mut r: Vec<BigInt> = a.to_vec();
    if r.len() <= dm {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![BigInt::zero(); r.len() - dm];
    for k in (0..q.len()).rev() {
        let f = (&r[k + dm] * &inv).mod_floor(p);
        if !f.is_zero() {
            for (j, b) in m.iter().enumerate() {
                r[k + j] = (&r[k + j] - &f * b).mod_floor(p);
            }
        }
        q[k] = f;
    }
    r.truncate(dm);
    (trim(q), trim(r))
}

fn gcd_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = divrem_mod(&a, &b, p).1;
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        make_monic(&a, p)
    }
}

fn powmod_poly(base: &[BigInt], e: &BigInt, m: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut result = vec![BigInt::one()];
    let mut b = divrem_mod(base, m, p).1;
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            result = divrem_mod(&mul_mod(&result, &b, p), m, p).1;
        }
        if i + 1 < bits {
            b = divrem_mod(&mul_mod(&b, &b, p), m, p).1;
        }
    }
    result
}

/// Monic irreducible factors of a monic squarefree polynomial mod an odd prime.
fn factor_mod_p(f: &[BigInt], p: &BigInt, rng: &mut XorShift) -> Vec<Vec<BigInt>> {
    let x = vec![BigInt::zero(), BigInt::one()];
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let mut h = x.clone();
    let mut i = 1;
    while rest.len() > 2 * i {
        h = powmod_poly(&h, p, &rest, p);
        let g = gcd_mod(&sub_mod(&h, &x, p), &rest, p);
        if g.len() > 1 {
            out.extend(equal_degree(&g, i, p, rng));
            rest = divrem_mod(&rest, &g, p).0;
            h = divrem_mod(&h, &rest, p).1;
        }
        i += 1;
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}

fn equal_degree(g: &[BigInt], i: usize, p: &BigInt, rng: &mut XorShift) -> Vec<Vec<BigInt>> {
    let n = g.len() - 1;
    if n == i {
        return vec![g.to_vec()];
    }
    let e = (p.pow(i as u32) - 1) / 2;
    loop {
        let a: Vec<BigInt> = trim((0..n).map(|_| rng.below(p)).collect());
        if a.len() < 2 {
            continue;
        }
        let b = sub_mod(&powmod_poly(&a, &e, g, p), &[BigInt::one()], p);
        let d = gcd_mod(&b, g, p);
        if d.len() > 1 && d.len() < g.len() {
            let other = divrem_mod(g, &d, p).0;
            let mut out = equal_degree(&d, i, p, rng);
            out.extend(equal_degree(&make_monic(&other, p), i, p, rng));
            return out;
        }
    }
}
