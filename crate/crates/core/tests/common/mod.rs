#![allow(dead_code)]

use heightforge::arith::{int, Rational};
use heightforge::family::{build_family, unicritical, Family};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform `a / b` in lowest terms with `|a| <= bound`, `1 <= b <= bound`.
pub fn rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let a = rng.gen_range(-bound..=bound);
    let b = rng.gen_range(1..=bound);
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    loop {
        let q = rational(rng, bound);
        if q != int(0) {
            return q;
        }
    }
}

/// Random rational with denominator prime to `p`.
pub fn p_integral<R: Rng>(rng: &mut R, bound: i64, p: i64) -> Rational {
    loop {
        let a = rng.gen_range(-bound..=bound);
        let b = rng.gen_range(1..=bound);
        let g = a.gcd(&b);
        if (b / g) % p != 0 {
            return Rational::new(BigInt::from(a), BigInt::from(b));
        }
    }
}

/// Random rational with `|q| <= 1`.
pub fn unit_disk<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let b = rng.gen_range(1..=bound);
    let a = rng.gen_range(-b..=b);
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// `z^6 - 3 t z^3 + t^2`.
pub fn composed() -> Family {
    build_family(&[int(1), int(-3), int(1)], 3).expect("family")
}

/// `z^4 + t^2`.
pub fn quartic() -> Family {
    build_family(&[int(1), int(0), int(1)], 2).expect("family")
}

pub fn basic_families() -> Vec<Family> {
    vec![unicritical(2), unicritical(3), composed()]
}

pub fn is_squarefree(n: u64) -> bool {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d * d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Random nonzero rational with `v_p = 0`.
pub fn p_unit<R: Rng>(rng: &mut R, bound: i64, p: i64) -> Rational {
    loop {
        let a = rng.gen_range(-bound..=bound);
        let b = rng.gen_range(1..=bound);
        if a != 0 && a % p != 0 && b % p != 0 {
            return Rational::new(BigInt::from(a), BigInt::from(b));
        }
    }
}

/// Random nonzero integer prime to `p`.
pub fn p_unit_int<R: Rng>(rng: &mut R, bound: i64, p: i64) -> Rational {
    loop {
        let a = rng.gen_range(-bound..=bound);
        if a != 0 && a % p != 0 {
            return Rational::from_integer(BigInt::from(a));
        }
    }
}
