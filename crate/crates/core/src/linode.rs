//! Monic linear homogeneous differential operators on Hk: application, the
//! recursive initial-value solver, solution bases, Wronskians, and
//! reconstruction of an operator from a solution basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::{HurwitzSeries, Precision, SeriesRepr};
use crate::linalg::{Matrix, SeriesMatrix, SERIES_DET_MAX};
use crate::ring::{binomial, FieldElem, FieldSpec};

/// L(h) = d^n(h) + sum_{i<n} h_i d^i(h), monic of order n >= 1. The leading
/// term is implicit. The constant-coefficient case remembers its scalars so
/// the solver can use the plain linear recurrence.
#[derive(Clone)]
pub struct LinearOperator {
    spec: FieldSpec,
    coeffs: Vec<HurwitzSeries>,
    constants: Option<Vec<FieldElem>>,
}

impl LinearOperator {
    /// General operator from series coefficients h_0 .. h_{n-1}.
    pub fn new(spec: FieldSpec, coeffs: Vec<HurwitzSeries>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ShapeMismatch("operator order must be >= 1".into()));
        }
        if coeffs.iter().any(|h| h.spec() != spec) {
            return Err(Error::MixedFields);
        }
        Ok(LinearOperator { spec, coeffs, constants: None })
    }

    /// Constant-coefficient operator from scalars a_0 .. a_{n-1}.
    pub fn constant(spec: FieldSpec, scalars: Vec<FieldElem>) -> Result<Self> {
        if scalars.is_empty() {
            return Err(Error::ShapeMismatch("operator order must be >= 1".into()));
        }
        if scalars.iter().any(|a| a.spec() != spec) {
            return Err(Error::MixedFields);
        }
        let coeffs = scalars
            .iter()
            .map(|a| HurwitzSeries::constant(a.clone()))
            .collect();
        Ok(LinearOperator { spec, coeffs, constants: Some(scalars) })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn coeff(&self, i: usize) -> &HurwitzSeries {
        &self.coeffs[i]
    }

    pub fn is_constant_coefficient(&self) -> bool {
        self.constants.is_some()
    }

    /// The scalars a_0 .. a_{n-1}, when constant-coefficient.
    pub fn constant_coeffs(&self) -> Result<&[FieldElem]> {
        self.constants
            .as_deref()
            .ok_or(Error::NotConstantCoefficient)
    }

    /// Applies the operator to a series, lazily.
    pub fn apply(&self, h: &HurwitzSeries) -> Result<HurwitzSeries> {
        if h.spec() != self.spec {
            return Err(Error::MixedFields);
        }
        let n = self.order();
        let mut acc = h.shift(n);
        for (i, hi) in self.coeffs.iter().enumerate() {
            acc = acc.add(&hi.mul(&h.shift(i))?)?;
        }
        Ok(acc)
    }

    /// The unique solution with pi_i(y) = c_i for i < n, as a recurrence-backed
    /// stream: pi_{n+m}(y) = -sum_i sum_{j<=m} C(m,j) pi_j(h_i) pi_{m-j+i}(y).
    /// Constant coefficients collapse the inner sum to its j = 0 term, giving
    /// the plain linear recurrence y_{n+m} = -sum_i a_i y_{m+i}.
    pub fn solve_ivp(&self, init: &[FieldElem]) -> Result<HurwitzSeries> {
        let n = self.order();
        if init.len() != n {
            return Err(Error::ArityMismatch { expected: n, got: init.len() });
        }
        if init.iter().any(|c| c.spec() != self.spec) {
            return Err(Error::MixedFields);
        }
        let spec = self.spec;
        let init = init.to_vec();
        match &self.constants {
            Some(scalars) => {
                let scalars = scalars.clone();
                Ok(HurwitzSeries::from_generator(
                    spec,
                    Box::new(move |idx, prev| {
                        if idx < n {
                            return init[idx].clone();
                        }
                        let m = idx - n;
                        let mut acc = FieldElem::zero(spec);
                        for (i, a) in scalars.iter().enumerate() {
                            acc = acc.add(&a.mul(&prev[m + i]).expect("same spec")).expect("same spec");
                        }
                        acc.neg()
                    }),
                ))
            }
            None => {
                let coeffs = self.coeffs.clone();
                Ok(HurwitzSeries::from_generator(
                    spec,
                    Box::new(move |idx, prev| {
                        if idx < n {
                            return init[idx].clone();
                        }
                        let m = idx - n;
                        let mut acc = FieldElem::zero(spec);
                        for (i, hi) in coeffs.iter().enumerate() {
                            for j in 0..=m {
                                let b = FieldElem::from_integer(
                                    &binomial(m as u64, j as u64),
                                    spec,
                                );
                                let term = b
                                    .mul(&hi.coeff(j))
                                    .and_then(|t| t.mul(&prev[m - j + i]))
                                    .expect("same spec");
                                acc = acc.add(&term).expect("same spec");
                            }
                        }
                        acc.neg()
                    }),
                ))
            }
        }
    }

    /// The standard basis y_1 .. y_n with pi_{i-1}(y_j) = delta_i^j.
    pub fn solution_basis(&self) -> SolutionBasis {
        let n = self.order();
        let basis = (0..n)
            .map(|j| {
                let init: Vec<FieldElem> = (0..n)
                    .map(|i| {
                        if i == j {
                            FieldElem::one(self.spec)
                        } else {
                            FieldElem::zero(self.spec)
                        }
                    })
                    .collect();
                self.solve_ivp(&init).expect("arity matches by construction")
            })
            .collect();
        SolutionBasis { operator: self.clone(), basis }
    }

    /// The unique B with Y' = Y B for the standard solution basis Y, built
    /// directly from the recurrence and verified against the basis streams.
    pub fn companion_matrix(&self) -> Result<Matrix> {
        let scalars = self.constant_coeffs()?;
        let n = self.order();
        let mut b = Matrix::zeros(n, n, self.spec);
        for i in 0..n.saturating_sub(1) {
            b.set(i, i + 1, FieldElem::one(self.spec));
        }
        for (j, a) in scalars.iter().enumerate() {
            b.set(n - 1, j, a.neg());
        }
        let sb = self.solution_basis();
        let check = Precision::new(16);
        for j in 0..n {
            let deriv = sb.basis[j].derive();
            let mut combo = HurwitzSeries::zero(self.spec);
            for i in 0..n {
                combo = combo.add(&sb.basis[i].scalar_mul(b.at(i, j))?)?;
            }
            assert!(
                deriv.eq_to_precision(&combo, check)?,
                "companion matrix fails Y' = YB"
            );
        }
        Ok(b)
    }

    pub fn to_repr(&self, p: Precision) -> OperatorRepr {
        let coeffs = match &self.constants {
            Some(scalars) => scalars
                .iter()
                .map(|a| CoeffRepr::Scalar(a.to_string()))
                .collect(),
            None => self
                .coeffs
                .iter()
                .map(|h| CoeffRepr::Series(h.truncate(p).iter().map(|c| c.to_string()).collect()))
                .collect(),
        };
        OperatorRepr {
            field: self.spec.to_string(),
            order: self.order(),
            coeffs,
        }
    }
}

/// Solutions y_1 .. y_n of L with identity initial-condition matrix.
#[derive(Clone)]
pub struct SolutionBasis {
    pub operator: LinearOperator,
    pub basis: Vec<HurwitzSeries>,
}

/// Wronskian w(y_1, ..., y_n): determinant of the matrix (d^i y_j).
pub fn wronskian(series: &[HurwitzSeries]) -> Result<HurwitzSeries> {
    let n = series.len();
    if n == 0 || n > SERIES_DET_MAX {
        return Err(Error::SizeLimit(format!(
            "wronskian takes 1..={SERIES_DET_MAX} series, got {n}"
        )));
    }
    let spec = series[0].spec();
    if series.iter().any(|s| s.spec() != spec) {
        return Err(Error::MixedFields);
    }
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for s in series {
            entries.push(s.shift(i));
        }
    }
    SeriesMatrix::new(n, spec, entries)?.det_division_free()
}

/// Recovers the monic operator annihilating the given n series, via the
/// bordered Wronskian w(Y, s_1, ..., s_n): the coefficient of d^i(Y) is the
/// signed i-th minor along the Y column, divided by w(s_1, ..., s_n). One
/// series inversion, division-free everywhere else.
pub fn operator_from_basis(series: &[HurwitzSeries], p: Precision) -> Result<LinearOperator> {
    let n = series.len();
    if n == 0 || n >= SERIES_DET_MAX {
        return Err(Error::SizeLimit(format!(
            "operator_from_basis takes 1..{SERIES_DET_MAX} series, got {n}"
        )));
    }
    let spec = series[0].spec();
    if series.iter().any(|s| s.spec() != spec) {
        return Err(Error::MixedFields);
    }
    let w = wronskian(series)?;
    if w.coeff(0).is_zero() {
        return Err(Error::SingularWronskian);
    }
    let w_inv = w.invert().expect("constant term nonzero");
    // Minor i: rows {0..n} \ {i} of the derivative tower, columns s_1..s_n.
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        let mut entries = Vec::with_capacity(n * n);
        for row in (0..=n).filter(|&r| r != i) {
            for s in series {
                entries.push(s.shift(row));
            }
        }
        let minor = SeriesMatrix::new(n, spec, entries)?.det_division_free()?;
        let signed = if (i + n) % 2 == 0 { minor } else { minor.neg() };
        coeffs.push(signed.mul(&w_inv)?);
    }
    let op = LinearOperator::new(spec, coeffs)?;
    for s in series {
        assert!(
            op.apply(s)?.is_zero_to_precision(p),
            "reconstructed operator does not annihilate its basis"
        );
    }
    Ok(op)
}

/// Operator JSON: a scalar string denotes a constant coefficient; a list of
/// strings denotes a truncated series coefficient (zero-padded past the end).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    Scalar(String),
    Series(Vec<String>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorRepr {
    pub field: String,
    pub order: usize,
    pub coeffs: Vec<CoeffRepr>,
}

impl OperatorRepr {
    pub fn to_operator(&self) -> Result<LinearOperator> {
        let spec: FieldSpec = self.field.parse()?;
        if self.coeffs.len() != self.order {
            return Err(Error::ShapeMismatch(format!(
                "order {} operator needs {} coefficients, got {}",
                self.order,
                self.order,
                self.coeffs.len()
            )));
        }
        let all_scalar = self.coeffs.iter().all(|c| matches!(c, CoeffRepr::Scalar(_)));
        if all_scalar {
            let scalars = self
                .coeffs
                .iter()
                .map(|c| match c {
                    CoeffRepr::Scalar(s) => FieldElem::parse(s, spec),
                    CoeffRepr::Series(_) => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()?;
            return LinearOperator::constant(spec, scalars);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c {
                CoeffRepr::Scalar(s) => {
                    Ok(HurwitzSeries::constant(FieldElem::parse(s, spec)?))
                }
                CoeffRepr::Series(v) => {
                    let elems = v
                        .iter()
                        .map(|s| FieldElem::parse(s, spec))
                        .collect::<Result<Vec<_>>>()?;
                    HurwitzSeries::from_coeffs(spec, elems)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        LinearOperator::new(spec, coeffs)
    }
}

/// Series repr helper for the CLI: a whole basis as a list of series.
pub fn basis_to_reprs(basis: &[HurwitzSeries], p: Precision) -> Vec<SeriesRepr> {
    basis.iter().map(|s| s.to_repr(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn qe(s: &str) -> FieldElem {
        FieldElem::parse(s, Q).unwrap()
    }

    fn qv(ints: &[i64]) -> Vec<FieldElem> {
        ints.iter().map(|&n| FieldElem::from_i64(n, Q)).collect()
    }

    /// L = Y'' - Y' - Y, whose solutions are Fibonacci-type sequences.
    fn fibonacci_op() -> LinearOperator {
        LinearOperator::constant(Q, qv(&[-1, -1])).unwrap()
    }

    #[test]
    fn apply_examples() {
        let dd = LinearOperator::constant(Q, qv(&[0, 0])).unwrap(); // d^2
        let x = HurwitzSeries::divided_power(1, Q);
        assert!(dd.apply(&x).unwrap().is_zero_to_precision(Precision::new(16)));

        let beta = qe("4/3");
        let l = LinearOperator::constant(Q, vec![beta.neg()]).unwrap(); // d - beta
        let e = HurwitzSeries::exponential(beta);
        assert!(l.apply(&e).unwrap().is_zero_to_precision(Precision::new(16)));

        let fib = fibonacci_op();
        let y1 = HurwitzSeries::from_coeffs(Q, qv(&[1, 0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987])).unwrap();
        assert!(fib.apply(&y1).unwrap().is_zero_to_precision(Precision::new(16)));
    }

    #[test]
    fn solve_ivp_fibonacci() {
        let y2 = fibonacci_op().solve_ivp(&qv(&[0, 1])).unwrap();
        assert_eq!(
            y2.truncate(Precision::new(8)),
            qv(&[0, 1, 1, 2, 3, 5, 8, 13])
        );
    }

    #[test]
    fn solve_ivp_zero_initials() {
        let l = LinearOperator::constant(Q, qv(&[3, -2, 1])).unwrap();
        let y = l.solve_ivp(&qv(&[0, 0, 0])).unwrap();
        assert!(y.is_zero_to_precision(Precision::new(24)));
    }

    #[test]
    fn solve_ivp_airy_like() {
        // L = d^2 + h0 with h0 = (0,1,0,...); no closed form asserted, the
        // oracle is that substituting back gives 0.
        let h0 = HurwitzSeries::divided_power(1, Q);
        let l = LinearOperator::new(Q, vec![h0, HurwitzSeries::zero(Q)]).unwrap();
        let y = l.solve_ivp(&qv(&[1, 0])).unwrap();
        assert!(l.apply(&y).unwrap().is_zero_to_precision(Precision::new(20)));
        assert_eq!(y.coeff(0), qe("1"));
        assert_eq!(y.coeff(1), qe("0"));
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(
            fibonacci_op().solve_ivp(&qv(&[1])),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn solution_basis_examples() {
        let dd = LinearOperator::constant(Q, qv(&[0, 0])).unwrap();
        let sb = dd.solution_basis();
        assert!(sb.basis[0]
            .eq_to_precision(&HurwitzSeries::one(Q), Precision::new(12))
            .unwrap());
        assert!(sb.basis[1]
            .eq_to_precision(&HurwitzSeries::divided_power(1, Q), Precision::new(12))
            .unwrap());

        let beta = qe("2");
        let l = LinearOperator::constant(Q, vec![beta.neg()]).unwrap();
        let sb = l.solution_basis();
        assert!(sb.basis[0]
            .eq_to_precision(&HurwitzSeries::exponential(beta), Precision::new(12))
            .unwrap());

        let l3 = LinearOperator::constant(Q, qv(&[-1, 3, -3])).unwrap();
        let sb = l3.solution_basis();
        for i in 0..8usize {
            for (j, y) in sb.basis.iter().enumerate() {
                if i < 3 {
                    let expect = if i == j { qe("1") } else { qe("0") };
                    assert_eq!(y.coeff(i), expect);
                }
                assert!(l3.apply(y).unwrap().is_zero_to_precision(Precision::new(8)));
            }
        }
    }

    #[test]
    fn wronskian_examples() {
        let one = HurwitzSeries::one(Q);
        let x = HurwitzSeries::divided_power(1, Q);
        let w = wronskian(&[one, x]).unwrap();
        assert!(w
            .eq_to_precision(&HurwitzSeries::one(Q), Precision::new(16))
            .unwrap());

        let f = HurwitzSeries::from_coeffs(Q, qv(&[1, 2, 3])).unwrap();
        let w = wronskian(&[f.clone(), f]).unwrap();
        assert!(w.is_zero_to_precision(Precision::new(16)));
    }

    #[test]
    fn wronskian_of_divided_power_exponentials() {
        // w(x^[0] e^{ax}, ..., x^[t] e^{ax}) = exp((t+1) a).
        for (spec, alpha) in [
            (Q, FieldElem::parse("5/2", Q).unwrap()),
            (
                FieldSpec::prime_field(5).unwrap(),
                FieldElem::from_i64(3, FieldSpec::prime_field(5).unwrap()),
            ),
        ] {
            for t in 0..4usize {
                let e = HurwitzSeries::exponential(alpha.clone());
                let z: Vec<HurwitzSeries> = (0..=t)
                    .map(|j| HurwitzSeries::divided_power(j, spec).mul(&e).unwrap())
                    .collect();
                let w = wronskian(&z).unwrap();
                let mut total = FieldElem::zero(spec);
                for _ in 0..=t {
                    total = total.add(&alpha).unwrap();
                }
                let expect = HurwitzSeries::exponential(total);
                assert!(w.eq_to_precision(&expect, Precision::new(16)).unwrap());
            }
        }
    }

    #[test]
    fn operator_from_basis_examples() {
        let p = Precision::new(16);

        // (1, x) -> d^2: both recovered coefficients vanish.
        let one = HurwitzSeries::one(Q);
        let x = HurwitzSeries::divided_power(1, Q);
        let l = operator_from_basis(&[one, x], p).unwrap();
        assert_eq!(l.order(), 2);
        assert!(l.coeff(0).is_zero_to_precision(p));
        assert!(l.coeff(1).is_zero_to_precision(p));

        // (exp(alpha)) -> d - alpha.
        let alpha = qe("3/2");
        let l = operator_from_basis(&[HurwitzSeries::exponential(alpha.clone())], p).unwrap();
        let expect = HurwitzSeries::constant(alpha.neg());
        assert!(l.coeff(0).eq_to_precision(&expect, p).unwrap());

        // Round trip through the Fibonacci operator.
        let fib = fibonacci_op();
        let sb = fib.solution_basis();
        let back = operator_from_basis(&sb.basis, p).unwrap();
        for i in 0..2 {
            assert!(back
                .coeff(i)
                .eq_to_precision(fib.coeff(i), p)
                .unwrap());
        }
    }

    #[test]
    fn operator_from_basis_rejects_singular_wronskian() {
        let f = HurwitzSeries::from_coeffs(Q, qv(&[1, 1])).unwrap();
        assert!(matches!(
            operator_from_basis(&[f.clone(), f], Precision::new(8)),
            Err(Error::SingularWronskian)
        ));
    }

    #[test]
    fn companion_matrix_examples() {
        let l3 = LinearOperator::constant(Q, qv(&[-1, 3, -3])).unwrap();
        assert_eq!(
            l3.companion_matrix().unwrap(),
            Matrix::from_i64_rows(Q, &[&[0, 1, 0], &[0, 0, 1], &[1, -3, 3]]).unwrap()
        );

        assert_eq!(
            fibonacci_op().companion_matrix().unwrap(),
            Matrix::from_i64_rows(Q, &[&[0, 1], &[1, 1]]).unwrap()
        );

        let dd = LinearOperator::constant(Q, qv(&[0, 0])).unwrap();
        assert_eq!(
            dd.companion_matrix().unwrap(),
            Matrix::from_i64_rows(Q, &[&[0, 1], &[0, 0]]).unwrap()
        );

        let h0 = HurwitzSeries::divided_power(1, Q);
        let nonconst = LinearOperator::new(Q, vec![h0, HurwitzSeries::zero(Q)]).unwrap();
        assert!(matches!(
            nonconst.companion_matrix(),
            Err(Error::NotConstantCoefficient)
        ));
    }

    #[test]
    fn solve_ivp_streams_are_reproducible() {
        let l = LinearOperator::constant(Q, qv(&[2, -1, 5])).unwrap();
        let a = l.solve_ivp(&qv(&[1, 2, 3])).unwrap();
        let b = l.solve_ivp(&qv(&[1, 2, 3])).unwrap();
        assert!(a.eq_to_precision(&b, Precision::new(40)).unwrap());
    }

    #[test]
    fn solve_ivp_is_linear_in_initial_conditions() {
        let l = fibonacci_op();
        let a = l.solve_ivp(&qv(&[1, 0])).unwrap();
        let b = l.solve_ivp(&qv(&[0, 1])).unwrap();
        let sum = l.solve_ivp(&qv(&[1, 1])).unwrap();
        assert!(a
            .add(&b)
            .unwrap()
            .eq_to_precision(&sum, Precision::new(32))
            .unwrap());
    }

    #[test]
    fn general_recurrence_matches_constant_specialization() {
        // The same operator built with series coefficients must produce the
        // identical stream through the general recurrence.
        let scalars = qv(&[2, -3, 1, 4]);
        let as_const = LinearOperator::constant(Q, scalars.clone()).unwrap();
        let as_series = LinearOperator::new(
            Q,
            scalars
                .iter()
                .map(|a| HurwitzSeries::constant(a.clone()))
                .collect(),
        )
        .unwrap();
        let init = qv(&[1, -1, 2, 0]);
        let ya = as_const.solve_ivp(&init).unwrap();
        let yb = as_series.solve_ivp(&init).unwrap();
        assert!(ya.eq_to_precision(&yb, Precision::new(32)).unwrap());
    }

    #[test]
    fn basis_wronskian_has_unit_constant_term() {
        let l = LinearOperator::constant(Q, qv(&[5, 1, -2])).unwrap();
        let w = wronskian(&l.solution_basis().basis).unwrap();
        assert_eq!(w.coeff(0), qe("1"));
    }

    #[test]
    fn round_trip_nonconstant_operator() {
        // L = d^2 + x d (coefficients h_0 = 0, h_1 = x); reconstruct from its
        // own standard basis.
        let x = HurwitzSeries::divided_power(1, Q);
        let l = LinearOperator::new(Q, vec![HurwitzSeries::zero(Q), x]).unwrap();
        let sb = l.solution_basis();
        let p = Precision::new(16);
        let back = operator_from_basis(&sb.basis, p).unwrap();
        for i in 0..2 {
            assert!(back.coeff(i).eq_to_precision(l.coeff(i), p).unwrap());
        }
    }

    #[test]
    fn operator_repr_round_trip() {
        let repr = OperatorRepr {
            field: "Q".into(),
            order: 2,
            coeffs: vec![CoeffRepr::Scalar("-1".into()), CoeffRepr::Scalar("-1".into())],
        };
        let op = repr.to_operator().unwrap();
        assert!(op.is_constant_coefficient());
        let y = op.solve_ivp(&qv(&[0, 1])).unwrap();
        assert_eq!(y.coeff(7), qe("13"));

        let repr = OperatorRepr {
            field: "Q".into(),
            order: 2,
            coeffs: vec![
                CoeffRepr::Series(vec!["0".into(), "1".into()]),
                CoeffRepr::Scalar("0".into()),
            ],
        };
        let op = repr.to_operator().unwrap();
        assert!(!op.is_constant_coefficient());
    }
}
