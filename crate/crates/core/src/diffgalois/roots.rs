//! Root search for monic characteristic polynomials over the base field
//! itself: rational-root search over Q (via the integer-scaled polynomial),
//! exhaustive scan over GF(p). Returns roots with multiplicities; callers
//! decide what a shortfall against the degree means.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::{FieldElem, FieldSpec};

/// Roots in k of the monic polynomial with ascending coefficients
/// c_0 .. c_d (c_d = 1), with multiplicities.
pub fn roots_in_field(coeffs_ascending: &[FieldElem]) -> Result<Vec<(FieldElem, usize)>> {
    let spec = coeffs_ascending[0].spec();
    // Work with descending coefficients; deflation is simplest there.
    let desc: Vec<FieldElem> = coeffs_ascending.iter().rev().cloned().collect();
    match spec {
        FieldSpec::PrimeField(p) => Ok(roots_mod_p(desc, p as u64, spec)),
        FieldSpec::Rationals => rational_roots(desc, spec),
    }
}

fn eval(desc: &[FieldElem], x: &FieldElem) -> FieldElem {
    let mut acc = FieldElem::zero(x.spec());
    for c in desc {
        acc = acc.mul(x).and_then(|a| a.add(c)).expect("same spec");
    }
    acc
}

/// Divides by (X - r); returns the quotient when the remainder vanishes.
fn deflate(desc: &[FieldElem], r: &FieldElem) -> Option<Vec<FieldElem>> {
    let d = desc.len() - 1;
    let mut q = Vec::with_capacity(d);
    let mut carry = desc[0].clone();
    for c in desc.iter().take(d).skip(1) {
        q.push(carry.clone());
        carry = carry.mul(r).and_then(|v| v.add(c)).expect("same spec");
    }
    q.push(carry.clone());
    let rem = carry.mul(r).and_then(|v| v.add(&desc[d])).expect("same spec");
    if rem.is_zero() {
        Some(q)
    } else {
        None
    }
}

fn take_multiplicity(desc: &mut Vec<FieldElem>, r: &FieldElem) -> usize {
    let mut mult = 0usize;
    while desc.len() > 1 {
        match deflate(desc, r) {
            Some(q) => {
                *desc = q;
                mult += 1;
            }
            None => break,
        }
    }
    mult
}

fn roots_mod_p(mut desc: Vec<FieldElem>, p: u64, spec: FieldSpec) -> Vec<(FieldElem, usize)> {
    let mut out = Vec::new();
    for r in 0..p {
        if desc.len() <= 1 {
            break;
        }
        let cand = FieldElem::from_i64(r as i64, spec);
        if !eval(&desc, &cand).is_zero() {
            continue;
        }
        let mult = take_multiplicity(&mut desc, &cand);
        out.push((cand, mult));
    }
    out
}

fn rational_roots(mut desc: Vec<FieldElem>, spec: FieldSpec) -> Result<Vec<(FieldElem, usize)>> {
    let mut out = Vec::new();
    // Zero roots first.
    let zero = FieldElem::zero(spec);
    let m0 = take_multiplicity(&mut desc, &zero);
    if m0 > 0 {
        out.push((zero, m0));
    }
    if desc.len() <= 1 {
        return Ok(out);
    }
    // Scale X = Y/D by the lcm D of the denominators: the result is a monic
    // integer polynomial in Y whose integer roots y give roots y/D.
    let d = desc.len() - 1;
    let mut scale = BigInt::one();
    for c in &desc {
        scale = scale.lcm(c.as_rational().denom());
    }
    let const_term = {
        let c0 = desc[d].as_rational();
        let v = c0 * num::BigRational::from_integer(scale.pow(d as u32));
        debug_assert!(v.denom().is_one());
        v.numer().abs()
    };
    let divisors = divisors_of(&const_term)?;
    for div in divisors {
        for sign in [1i64, -1] {
            if desc.len() <= 1 {
                break;
            }
            let y = if sign > 0 { div.clone() } else { -div.clone() };
            let cand = FieldElem::from_ratio(&y, &scale)?;
            if !eval(&desc, &cand).is_zero() {
                continue;
            }
            let mult = take_multiplicity(&mut desc, &cand);
            out.push((cand, mult));
        }
    }
    Ok(out)
}

const MAX_DIVISORS: usize = 1 << 20;

/// All positive divisors of |n| (n != 0), via complete factorization.
fn divisors_of(n: &BigInt) -> Result<Vec<BigInt>> {
    let factors = factorize(n.abs())?;
    let mut divisors = vec![BigInt::one()];
    for (prime, exp) in factors {
        let mut next = Vec::with_capacity(divisors.len() * (exp as usize + 1));
        for base in &divisors {
            let mut v = base.clone();
            next.push(v.clone());
            for _ in 0..exp {
                v = &v * &prime;
                next.push(v.clone());
            }
        }
        if next.len() > MAX_DIVISORS {
            return Err(Error::SizeLimit(
                "too many divisor candidates in rational root search".into(),
            ));
        }
        divisors = next;
    }
    Ok(divisors)
}

fn factorize(mut n: BigInt) -> Result<Vec<(BigInt, u32)>> {
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let push = |factors: &mut Vec<(BigInt, u32)>, p: BigInt, e: u32| {
        if let Some(entry) = factors.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            factors.push((p, e));
        }
    };
    if n.is_zero() {
        return Err(Error::SizeLimit("factorize(0)".into()));
    }
    let mut small = 2u64;
    while small <= 1_000_000 {
        let bp = BigInt::from(small);
        if (&bp * &bp) > n {
            break;
        }
        let mut e = 0u32;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            push(&mut factors, bp, e);
        }
        small = if small == 2 { 3 } else { small + 2 };
    }
    if n > BigInt::one() {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_probable_prime(&m) {
                push(&mut factors, m, 1);
                continue;
            }
            let f = pollard_rho(&m)?;
            let q = &m / &f;
            stack.push(f);
            stack.push(q);
        }
    }
    factors.sort();
    Ok(factors)
}

/// Miller-Rabin with the first twelve primes as bases; deterministic below
/// 3.3e24, overwhelmingly reliable beyond.
fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let bq = BigInt::from(q);
        if n == &bq {
            return true;
        }
        if (n % &bq).is_zero() {
            return false;
        }
    }
    let n_minus_1: BigInt = n - 1;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard's rho with f(x) = x^2 + c; n composite and odd.
fn pollard_rho(n: &BigInt) -> Result<BigInt> {
    let two = BigInt::from(2);
    if (n % &two).is_zero() {
        return Ok(two);
    }
    for c in 1u64..64 {
        let cc = BigInt::from(c);
        let mut x = BigInt::from(2);
        let mut y = BigInt::from(2);
        loop {
            x = (x.modpow(&two, n) + &cc) % n;
            y = (y.modpow(&two, n) + &cc) % n;
            y = (y.modpow(&two, n) + &cc) % n;
            if x == y {
                break; // cycle without a factor; retry with another c
            }
            let g = (&x - &y).abs().gcd(n);
            if g > BigInt::one() {
                return Ok(g);
            }
        }
    }
    Err(Error::SizeLimit(
        "could not factor a coefficient during rational root search".into(),
    ))
}
