//! Small modular arithmetic helpers for prime moduli.

use crate::error::{domain, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo a prime `p`; `a` must be nonzero mod `p`.
pub fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest positive primitive root of a prime `p`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .ok_or_else(|| unreachable!("every prime has a primitive root"))
}

/// `log[x]` is the exponent `a` in `0..p-1` with `g^a = x`, for `x` in `1..p`.
/// Index 0 is unused.
pub fn discrete_log_table(p: u64, g: u64) -> Vec<usize> {
    let mut table = vec![usize::MAX; p as usize];
    let mut x = 1u64;
    for a in 0..(p - 1) as usize {
        table[x as usize] = a;
        x = x * g % p;
    }
    table
}

pub fn require_prime(p: usize) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        domain(format!("{p} is not prime"))
    }
}
