//! Integer factorization for desk-scale inputs: trial division by a sieve of
//! small primes, then Pollard–Brent with Miller–Rabin on the cofactor.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const SIEVE_LIMIT: u64 = 1 << 16;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = SIEVE_LIMIT as usize;
        let mut is = vec![true; n + 1];
        is[0] = false;
        is[1] = false;
        let mut i = 2;
        while i * i <= n {
            if is[i] {
                let mut j = i * i;
                while j <= n {
                    is[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&k| is[k]).map(|k| k as u64).collect()
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin on arbitrary integers with the first twenty prime bases.
/// Deterministic below 3.3 * 10^24.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in &small_primes()[..20] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn pollard_brent_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = one.clone();
        let mut iters = 0u64;
        while g == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
            iters += 1;
            if iters > 5_000_000 {
                break;
            }
        }
        if g != *n && g != one {
            return g;
        }
        c += 1u32;
    }
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64, k: u32) {
    if let Some(e) = out.iter_mut().find(|(q, _)| *q == p) {
        e.1 += k;
    } else {
        out.push((p, k));
    }
}

fn split_cofactor(n: BigUint, out: &mut Vec<(u64, u32)>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(&n) {
        let p = n
            .to_u64()
            .ok_or_else(|| Error::Factorization(format!("prime factor {n} exceeds 64 bits")))?;
        push_factor(out, p, 1);
        return Ok(());
    }
    // perfect powers defeat rho; peel them off first
    for k in (2..=n.bits() as u32).rev() {
        let r = n.nth_root(k);
        if r.pow(k) == n && r > BigUint::one() {
            let mut sub = Vec::new();
            split_cofactor(r, &mut sub)?;
            for (p, e) in sub {
                push_factor(out, p, e * k);
            }
            return Ok(());
        }
    }
    let d = match n.to_u64() {
        Some(small) => BigUint::from(pollard_brent_u64(small)),
        None => pollard_brent_big(&n),
    };
    let other = &n / &d;
    split_cofactor(d, out)?;
    split_cofactor(other, out)
}

/// Prime factorization of `|n|`, sorted by prime. Zero is rejected.
pub fn factorize(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::domain("cannot factor zero"));
    }
    let mut m = n.magnitude().clone();
    let mut out = Vec::new();
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut k = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
    }
    split_cofactor(m, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

/// Smallest prime factor of `|n| > 1`.
pub fn smallest_prime_factor(n: &BigInt) -> Result<u64> {
    if let Some(m) = n.magnitude().to_u64() {
        for &p in small_primes() {
            if p * p > m {
                break;
            }
            if m % p == 0 {
                return Ok(p);
            }
        }
    }
    factorize(n)?
        .first()
        .map(|&(p, _)| p)
        .ok_or_else(|| Error::domain("unit has no prime factor"))
}

/// The exact `k`-th root of `n` when it exists, respecting sign for odd `k`.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if k == 0 {
        return None;
    }
    if n.sign() == num_bigint::Sign::Minus && k.is_multiple_of(2) {
        return None;
    }
    let r = n.nth_root(k);
    (r.pow(k) == *n).then_some(r)
}
