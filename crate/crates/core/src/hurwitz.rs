//! The differential ring Hk of Hurwitz series: memoized coefficient streams
//! with the binomial-weighted product, the shift derivation, inversion,
//! divided powers, exponentials and polynomial Taylor expansion.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{binomial, factorial, FieldElem, FieldSpec};

/// Number of leading coefficients (indices 0..N-1) considered when comparing
/// or printing series. Series equality is only decidable to finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision(usize);

impl Precision {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "precision must be at least 1");
        Precision(n)
    }

    pub fn get(&self) -> usize {
        self.0
    }
}

impl Default for Precision {
    /// The CLI default.
    fn default() -> Self {
        Precision(32)
    }
}

/// Coefficient rule: given the index n and the already-computed prefix
/// (coefficients 0..n of the series being defined), produce coefficient n.
/// The prefix argument is what lets inversion and ODE recurrences refer to
/// earlier coefficients of themselves without re-entering the cache lock.
type Generator = Box<dyn Fn(usize, &[FieldElem]) -> FieldElem + Send + Sync>;

struct Inner {
    cache: Mutex<Vec<FieldElem>>,
    generator: Generator,
}

/// A Hurwitz series (a_0, a_1, ...) over a fixed field. Cloning shares the
/// generator and cache; coefficients are computed once and memoized in order.
#[derive(Clone)]
pub struct HurwitzSeries {
    spec: FieldSpec,
    inner: Arc<Inner>,
}

impl std::fmt::Debug for HurwitzSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prefix = self.truncate(Precision::new(8));
        let strs: Vec<String> = prefix.iter().map(|c| c.to_string()).collect();
        write!(f, "HurwitzSeries[{}]({}, ...)", self.spec, strs.join(", "))
    }
}

impl HurwitzSeries {
    pub(crate) fn from_generator(spec: FieldSpec, generator: Generator) -> Self {
        HurwitzSeries {
            spec,
            inner: Arc::new(Inner {
                cache: Mutex::new(Vec::new()),
                generator,
            }),
        }
    }

    /// Finite-support series; coefficients beyond the vector are zero.
    pub fn from_coeffs(spec: FieldSpec, coeffs: Vec<FieldElem>) -> Result<Self> {
        if coeffs.iter().any(|c| c.spec() != spec) {
            return Err(Error::MixedFields);
        }
        Ok(Self::from_generator(
            spec,
            Box::new(move |n, _| {
                coeffs
                    .get(n)
                    .cloned()
                    .unwrap_or_else(|| FieldElem::zero(spec))
            }),
        ))
    }

    pub fn zero(spec: FieldSpec) -> Self {
        Self::constant(FieldElem::zero(spec))
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::constant(FieldElem::one(spec))
    }

    /// The constant series (c, 0, 0, ...).
    pub fn constant(c: FieldElem) -> Self {
        let spec = c.spec();
        Self::from_generator(
            spec,
            Box::new(move |n, _| {
                if n == 0 {
                    c.clone()
                } else {
                    FieldElem::zero(spec)
                }
            }),
        )
    }

    /// The divided power x^[i]: 1 in position i, 0 elsewhere.
    pub fn divided_power(i: usize, spec: FieldSpec) -> Self {
        Self::from_generator(
            spec,
            Box::new(move |n, _| {
                if n == i {
                    FieldElem::one(spec)
                } else {
                    FieldElem::zero(spec)
                }
            }),
        )
    }

    /// exp(beta) = (1, beta, beta^2, ...), the unique solution of
    /// y' = beta*y with y(0) = 1.
    pub fn exponential(beta: FieldElem) -> Self {
        let spec = beta.spec();
        Self::from_generator(
            spec,
            Box::new(move |n, prev| {
                if n == 0 {
                    FieldElem::one(spec)
                } else {
                    prev[n - 1].mul(&beta).expect("same spec")
                }
            }),
        )
    }

    /// Taylor expansion at 0 of a polynomial p = sum p_m X^m, as a Hurwitz
    /// series: coefficient n is n! * p_n mapped into k. This is the unique
    /// differential ring homomorphism k[X] -> Hk extending evaluation at 0.
    pub fn from_polynomial(coeffs: &[FieldElem], spec: FieldSpec) -> Result<Self> {
        if coeffs.iter().any(|c| c.spec() != spec) {
            return Err(Error::MixedFields);
        }
        let coeffs = coeffs.to_vec();
        Ok(Self::from_generator(
            spec,
            Box::new(move |n, _| match coeffs.get(n) {
                Some(c) => {
                    let nf = FieldElem::from_integer(&factorial(n as u64), spec);
                    nf.mul(c).expect("same spec")
                }
                None => FieldElem::zero(spec),
            }),
        ))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// pi_n: the n-th coefficient. Memoizes everything up to n.
    pub fn coeff(&self, n: usize) -> FieldElem {
        let mut cache = self.inner.cache.lock().unwrap();
        while cache.len() <= n {
            // The generator may read coefficients of *other* series (their
            // own locks) but refers to this series only through the prefix
            // slice, so holding our lock here cannot deadlock.
            let next = (self.inner.generator)(cache.len(), &cache);
            debug_assert_eq!(next.spec(), self.spec);
            cache.push(next);
        }
        cache[n].clone()
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        let (f, g) = (self.clone(), other.clone());
        Ok(Self::from_generator(
            self.spec,
            Box::new(move |n, _| f.coeff(n).add(&g.coeff(n)).expect("same spec")),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let f = self.clone();
        Self::from_generator(self.spec, Box::new(move |n, _| f.coeff(n).neg()))
    }

    pub fn scalar_mul(&self, c: &FieldElem) -> Result<Self> {
        if c.spec() != self.spec {
            return Err(Error::MixedFields);
        }
        let (f, c) = (self.clone(), c.clone());
        Ok(Self::from_generator(
            self.spec,
            Box::new(move |n, _| f.coeff(n).mul(&c).expect("same spec")),
        ))
    }

    /// Hurwitz product: c_n = sum_{j=0}^{n} C(n,j) a_j b_{n-j}. The binomial
    /// is computed over Z and mapped into k, which is what keeps the product
    /// correct in characteristic p.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        let (f, g) = (self.clone(), other.clone());
        let spec = self.spec;
        Ok(Self::from_generator(
            spec,
            Box::new(move |n, _| {
                let mut acc = FieldElem::zero(spec);
                for j in 0..=n {
                    let b = FieldElem::from_integer(&binomial(n as u64, j as u64), spec);
                    let term = b
                        .mul(&f.coeff(j))
                        .and_then(|t| t.mul(&g.coeff(n - j)))
                        .expect("same spec");
                    acc = acc.add(&term).expect("same spec");
                }
                acc
            }),
        ))
    }

    /// Coefficient stream shifted left by k places.
    pub fn shift(&self, k: usize) -> Self {
        let f = self.clone();
        Self::from_generator(self.spec, Box::new(move |n, _| f.coeff(n + k)))
    }

    /// The derivation: (a_0, a_1, a_2, ...) -> (a_1, a_2, a_3, ...).
    pub fn derive(&self) -> Self {
        self.shift(1)
    }

    /// Multiplicative inverse, defined when pi_0 is a unit. Coefficients come
    /// from b_0 = a_0^{-1}, b_n = -a_0^{-1} sum_{j=1}^{n} C(n,j) a_j b_{n-j}.
    pub fn invert(&self) -> Result<Self> {
        let a0 = self.coeff(0);
        if a0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let a0_inv = a0.inv().expect("nonzero");
        let f = self.clone();
        let spec = self.spec;
        Ok(Self::from_generator(
            spec,
            Box::new(move |n, prev| {
                if n == 0 {
                    return a0_inv.clone();
                }
                let mut acc = FieldElem::zero(spec);
                for j in 1..=n {
                    let b = FieldElem::from_integer(&binomial(n as u64, j as u64), spec);
                    let term = b
                        .mul(&f.coeff(j))
                        .and_then(|t| t.mul(&prev[n - j]))
                        .expect("same spec");
                    acc = acc.add(&term).expect("same spec");
                }
                acc.mul(&a0_inv).expect("same spec").neg()
            }),
        ))
    }

    /// Hurwitz power f^k.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.spec);
        for _ in 0..k {
            acc = acc.mul(self).expect("same spec");
        }
        acc
    }

    /// True iff the first P.N coefficients agree.
    pub fn eq_to_precision(&self, other: &Self, p: Precision) -> Result<bool> {
        self.check_spec(other)?;
        Ok((0..p.get()).all(|n| self.coeff(n) == other.coeff(n)))
    }

    pub fn is_zero_to_precision(&self, p: Precision) -> bool {
        (0..p.get()).all(|n| self.coeff(n).is_zero())
    }

    /// The first P.N coefficients as a vector.
    pub fn truncate(&self, p: Precision) -> Vec<FieldElem> {
        (0..p.get()).map(|n| self.coeff(n)).collect()
    }

    pub fn to_repr(&self, p: Precision) -> SeriesRepr {
        SeriesRepr {
            field: self.spec.to_string(),
            coeffs: self
                .truncate(p)
                .iter()
                .map(|c| c.to_string())
                .collect(),
        }
    }
}

/// JSON form of a truncated series. Reading one back yields the finite-support
/// series that pads with zeros past the listed coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesRepr {
    pub field: String,
    pub coeffs: Vec<String>,
}

impl SeriesRepr {
    pub fn to_series(&self) -> Result<HurwitzSeries> {
        let spec: FieldSpec = self.field.parse()?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| FieldElem::parse(s, spec))
            .collect::<Result<Vec<_>>>()?;
        HurwitzSeries::from_coeffs(spec, coeffs)
    }
}

/// n! as an element of k. Zero in characteristic p once n >= p.
pub fn factorial_in(n: u64, spec: FieldSpec) -> FieldElem {
    FieldElem::from_integer(&factorial(n), spec)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<HurwitzSeries>();
}
