//! Exact field arithmetic over Q and GF(p), the canonical map Z -> k, and
//! arbitrary-precision binomial coefficients.

use std::fmt;
use std::str::FromStr;

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{Error, Result};

/// Which field an element lives in: the rationals or a prime field GF(p)
/// with a machine-word prime p < 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u32),
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    /// GF(p). Fails unless 2 <= p < 2^31 and p is prime.
    pub fn prime_field(p: u32) -> Result<Self> {
        if p < 2 || p >= (1 << 31) || !is_prime_u32(p) {
            return Err(Error::InvalidModulus(p as u64));
        }
        Ok(FieldSpec::PrimeField(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p as u64,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "gf:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Grammar: `"Q" | "gf:<p>"`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(rest) = s.strip_prefix("gf:") {
            let p: u64 = rest.parse().map_err(|_| Error::ParseError {
                pos: 3,
                msg: format!("expected a prime after \"gf:\", got {rest:?}"),
            })?;
            if p >= (1 << 31) {
                return Err(Error::InvalidModulus(p));
            }
            return FieldSpec::prime_field(p as u32);
        }
        Err(Error::ParseError {
            pos: 0,
            msg: format!("expected \"Q\" or \"gf:<p>\", got {s:?}"),
        })
    }
}

/// Deterministic Miller-Rabin; the bases {2, 7, 61} are exact below 4.759e9.
fn is_prime_u32(n: u32) -> bool {
    let n = n as u64;
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        let mut x = pow_mod(a % n, d, n);
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

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    // Operands stay below 2^31, so the product fits in u64.
    (a * b) % m
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    /// Always reduced, positive denominator (BigRational maintains both).
    Rat(BigRational),
    /// Canonical residue in [0, p).
    Mod(u64),
}

/// An exact element of Q or GF(p), tagged with the field it lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    spec: FieldSpec,
    value: Value,
}

impl FieldElem {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn zero(spec: FieldSpec) -> Self {
        Self::from_integer(&BigInt::zero(), spec)
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::from_integer(&BigInt::one(), spec)
    }

    /// Image of n under the unique ring map Z -> k.
    pub fn from_integer(n: &BigInt, spec: FieldSpec) -> Self {
        let value = match spec {
            FieldSpec::Rationals => Value::Rat(BigRational::from_integer(n.clone())),
            FieldSpec::PrimeField(p) => {
                let p = BigInt::from(p);
                let mut r = n % &p;
                if r.sign() == Sign::Minus {
                    r += &p;
                }
                Value::Mod(r.try_into().expect("residue fits in u64"))
            }
        };
        FieldElem { spec, value }
    }

    pub fn from_i64(n: i64, spec: FieldSpec) -> Self {
        Self::from_integer(&BigInt::from(n), spec)
    }

    /// A rational a/b, reduced; only meaningful over Q.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElem {
            spec: FieldSpec::Rationals,
            value: Value::Rat(BigRational::new(num.clone(), den.clone())),
        })
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rat(r) => r.is_zero(),
            Value::Mod(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Rat(r) => r.is_one(),
            Value::Mod(r) => *r == 1,
        }
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    fn modulus(&self) -> u64 {
        match self.spec {
            FieldSpec::PrimeField(p) => p as u64,
            FieldSpec::Rationals => unreachable!("modulus of a rational"),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_spec(rhs)?;
        let value = match (&self.value, &rhs.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            (Value::Mod(a), Value::Mod(b)) => Value::Mod((a + b) % self.modulus()),
            _ => unreachable!(),
        };
        Ok(FieldElem { spec: self.spec, value })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_spec(rhs)?;
        let value = match (&self.value, &rhs.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a - b),
            (Value::Mod(a), Value::Mod(b)) => {
                let p = self.modulus();
                Value::Mod((a + p - b) % p)
            }
            _ => unreachable!(),
        };
        Ok(FieldElem { spec: self.spec, value })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_spec(rhs)?;
        let value = match (&self.value, &rhs.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a * b),
            (Value::Mod(a), Value::Mod(b)) => Value::Mod(mul_mod(*a, *b, self.modulus())),
            _ => unreachable!(),
        };
        Ok(FieldElem { spec: self.spec, value })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.mul(&rhs.inv()?)
    }

    pub fn neg(&self) -> Self {
        let value = match &self.value {
            Value::Rat(a) => Value::Rat(-a),
            Value::Mod(a) => {
                let p = self.modulus();
                Value::Mod((p - a) % p)
            }
        };
        FieldElem { spec: self.spec, value }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let value = match &self.value {
            Value::Rat(a) => Value::Rat(a.recip()),
            Value::Mod(a) => {
                let p = self.modulus();
                Value::Mod(pow_mod(*a, p - 2, p))
            }
        };
        Ok(FieldElem { spec: self.spec, value })
    }

    /// Repeated-squaring power with non-negative exponent.
    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = FieldElem::one(self.spec);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same spec");
            }
            base = base.mul(&base).expect("same spec");
            exp >>= 1;
        }
        acc
    }

    /// As a rational number; only valid over Q.
    pub fn as_rational(&self) -> &BigRational {
        match &self.value {
            Value::Rat(r) => r,
            Value::Mod(_) => panic!("as_rational on a GF(p) element"),
        }
    }

    /// Canonical residue; only valid over GF(p).
    pub fn as_residue(&self) -> u64 {
        match &self.value {
            Value::Mod(r) => *r,
            Value::Rat(_) => panic!("as_residue on a rational element"),
        }
    }

    /// Total order used only for canonical sorting of printed output.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (&self.value, &other.value) {
            (Value::Rat(a), Value::Rat(b)) => a.cmp(b),
            (Value::Mod(a), Value::Mod(b)) => a.cmp(b),
            (Value::Rat(_), Value::Mod(_)) => std::cmp::Ordering::Less,
            (Value::Mod(_), Value::Rat(_)) => std::cmp::Ordering::Greater,
        }
    }

    /// Parses `[sign] digits ["/" digits]`. GF(p) fractions reduce via the
    /// inverse mod p.
    pub fn parse(text: &str, spec: FieldSpec) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0usize;
        while pos < chars.len() && chars[pos].is_whitespace() {
            pos += 1;
        }
        let num = parse_signed_int(&chars, &mut pos)?;
        let den = if pos < chars.len() && chars[pos] == '/' {
            pos += 1;
            let d = parse_unsigned_int(&chars, &mut pos)?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            d
        } else {
            BigInt::one()
        };
        while pos < chars.len() && chars[pos].is_whitespace() {
            pos += 1;
        }
        if pos < chars.len() {
            return Err(Error::ParseError {
                pos,
                msg: format!("unexpected character {:?}", chars[pos]),
            });
        }
        let n = FieldElem::from_integer(&num, spec);
        let d = FieldElem::from_integer(&den, spec);
        if d.is_zero() {
            // A denominator divisible by p has no inverse in GF(p).
            return Err(Error::DivisionByZero);
        }
        n.div(&d)
    }
}

fn parse_signed_int(chars: &[char], pos: &mut usize) -> Result<BigInt> {
    let mut negative = false;
    if *pos < chars.len() && matches!(chars[*pos], '+' | '-' | '\u{2212}') {
        negative = chars[*pos] != '+';
        *pos += 1;
    }
    let mag = parse_unsigned_int(chars, pos)?;
    Ok(if negative { -mag } else { mag })
}

fn parse_unsigned_int(chars: &[char], pos: &mut usize) -> Result<BigInt> {
    let start = *pos;
    let mut acc = BigInt::zero();
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        acc = acc * 10 + (chars[*pos] as u8 - b'0');
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::ParseError {
            pos: *pos,
            msg: "expected a decimal digit".into(),
        });
    }
    Ok(acc)
}

impl fmt::Display for FieldElem {
    /// Canonical form: Q as "a/b" in lowest terms (omit "/1"), GF(p) as the
    /// least non-negative residue.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Value::Mod(r) => write!(f, "{r}"),
        }
    }
}

/// Exact C(n, j) over Z; 0 when j > n. Multiplicative formula, every
/// intermediate division is exact.
pub fn binomial(n: u64, j: u64) -> BigInt {
    if j > n {
        return BigInt::zero();
    }
    let j = j.min(n - j);
    let mut acc = BigInt::one();
    for i in 0..j {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> FieldElem {
        FieldElem::parse(s, FieldSpec::Rationals).unwrap()
    }

    fn gf(p: u32, n: i64) -> FieldElem {
        FieldElem::from_i64(n, FieldSpec::prime_field(p).unwrap())
    }

    #[test]
    fn prime_field_rejects_composites() {
        assert!(FieldSpec::prime_field(2).is_ok());
        assert!(FieldSpec::prime_field(2147483647).is_ok()); // 2^31 - 1
        assert_eq!(FieldSpec::prime_field(1), Err(Error::InvalidModulus(1)));
        assert_eq!(FieldSpec::prime_field(91), Err(Error::InvalidModulus(91)));
        assert_eq!(FieldSpec::prime_field(0), Err(Error::InvalidModulus(0)));
    }

    #[test]
    fn spec_string_grammar() {
        assert_eq!("Q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!("gf:7".parse::<FieldSpec>().unwrap().characteristic(), 7);
        assert!("gf:6".parse::<FieldSpec>().is_err());
        assert!("R".parse::<FieldSpec>().is_err());
        assert_eq!(FieldSpec::prime_field(13).unwrap().to_string(), "gf:13");
    }

    #[test]
    fn field_ops_examples() {
        assert_eq!(gf(7, 3).mul(&gf(7, 5)).unwrap(), gf(7, 1));
        assert_eq!(q("2/3").add(&q("1/6")).unwrap(), q("5/6"));
        assert_eq!(gf(2, 1).inv().unwrap(), gf(2, 1));
    }

    #[test]
    fn mixed_fields_rejected() {
        assert_eq!(q("1").add(&gf(7, 1)), Err(Error::MixedFields));
        assert_eq!(gf(5, 1).mul(&gf(7, 1)), Err(Error::MixedFields));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(q("1").div(&q("0")), Err(Error::DivisionByZero));
        assert_eq!(gf(7, 0).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn from_integer_examples() {
        assert_eq!(
            FieldElem::from_i64(10, FieldSpec::prime_field(7).unwrap()),
            gf(7, 3)
        );
        assert_eq!(FieldElem::from_i64(-1, FieldSpec::Rationals), q("-1"));
        assert_eq!(FieldElem::from_i64(6, FieldSpec::prime_field(2).unwrap()), gf(2, 0));
    }

    #[test]
    fn from_integer_is_a_ring_hom() {
        let specs = [FieldSpec::Rationals, FieldSpec::prime_field(11).unwrap()];
        for spec in specs {
            for m in -20i64..20 {
                for n in -20i64..20 {
                    let fm = FieldElem::from_i64(m, spec);
                    let fn_ = FieldElem::from_i64(n, spec);
                    assert_eq!(FieldElem::from_i64(m + n, spec), fm.add(&fn_).unwrap());
                    assert_eq!(FieldElem::from_i64(m * n, spec), fm.mul(&fn_).unwrap());
                }
            }
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(4, 0), BigInt::from(1));
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }

    #[test]
    fn binomial_satisfies_pascal_exhaustively() {
        for n in 1..=64u64 {
            for j in 1..=n {
                assert_eq!(binomial(n, j), binomial(n - 1, j - 1) + binomial(n - 1, j));
            }
        }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(q("-3/6"), q("-1/2"));
        assert_eq!(q("\u{2212}3/6"), q("-1/2"));
        assert_eq!(
            FieldElem::parse("9", FieldSpec::prime_field(7).unwrap()).unwrap(),
            gf(7, 2)
        );
        assert_eq!(
            FieldElem::parse("1/2", FieldSpec::prime_field(7).unwrap()).unwrap(),
            gf(7, 4)
        );
        assert!(matches!(
            FieldElem::parse("x", FieldSpec::Rationals),
            Err(Error::ParseError { pos: 0, .. })
        ));
        assert_eq!(
            FieldElem::parse("1/0", FieldSpec::Rationals),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn canonical_display() {
        assert_eq!(q("4/2").to_string(), "2");
        assert_eq!(q("-1/2").to_string(), "-1/2");
        assert_eq!(gf(7, -1).to_string(), "6");
    }

    fn arb_elem(spec: FieldSpec) -> impl Strategy<Value = FieldElem> {
        (-50i64..50, 1i64..20).prop_map(move |(n, d)| match spec {
            FieldSpec::Rationals => FieldElem::from_ratio(&BigInt::from(n), &BigInt::from(d)).unwrap(),
            FieldSpec::PrimeField(_) => FieldElem::from_i64(n, spec),
        })
    }

    proptest! {
        #[test]
        fn field_axioms_q(
            a in arb_elem(FieldSpec::Rationals),
            b in arb_elem(FieldSpec::Rationals),
            c in arb_elem(FieldSpec::Rationals),
        ) {
            field_axioms(&a, &b, &c);
        }

        #[test]
        fn field_axioms_gf7(
            a in arb_elem(FieldSpec::PrimeField(7)),
            b in arb_elem(FieldSpec::PrimeField(7)),
            c in arb_elem(FieldSpec::PrimeField(7)),
        ) {
            field_axioms(&a, &b, &c);
        }
    }

    fn field_axioms(a: &FieldElem, b: &FieldElem, c: &FieldElem) {
        let spec = a.spec();
        assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
        assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
        assert_eq!(
            a.add(b).unwrap().add(c).unwrap(),
            a.add(&b.add(c).unwrap()).unwrap()
        );
        assert_eq!(
            a.mul(b).unwrap().mul(c).unwrap(),
            a.mul(&b.mul(c).unwrap()).unwrap()
        );
        assert_eq!(
            a.mul(&b.add(c).unwrap()).unwrap(),
            a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap()
        );
        assert_eq!(a.add(&a.neg()).unwrap(), FieldElem::zero(spec));
        if !a.is_zero() {
            assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), FieldElem::one(spec));
        }
    }
}
