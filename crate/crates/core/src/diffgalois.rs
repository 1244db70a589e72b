//! The group of differential automorphisms of the solution space of a
//! constant-coefficient operator, presented as an explicit matrix group:
//! the centralizer algebra span{I, B, ..., B^{n-1}} of the companion matrix,
//! cut down by invertibility and (when 0 is a root of the characteristic
//! polynomial) the condition that constant solutions stay fixed. When the
//! characteristic polynomial splits over k, a spectral decomposition into
//! per-root blocks is also available; no algebraic closure is ever needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::{HurwitzSeries, Precision};
use crate::linalg::{Matrix, MatrixRepr};
use crate::linode::{LinearOperator, SolutionBasis};
use crate::ring::{FieldElem, FieldSpec};

mod roots;

/// Which cut of the centralizer algebra forms the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// a_0 != 0: every invertible member of the algebra.
    InvertibleOnly,
    /// a_0 = 0: invertible members that fix the constant solution, i.e.
    /// C e_1 = e_1.
    InvertibleAndFixesConstants,
}

/// Finite presentation of G(V|k) for a constant-coefficient operator.
#[derive(Debug, Clone)]
pub struct GroupDescriptor {
    n: usize,
    b: Matrix,
    algebra_basis: Vec<Matrix>,
    constraint: Constraint,
    spec: FieldSpec,
}

/// Outcome of a membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member { coords: Vec<FieldElem> },
    NotMember { reason: NonMemberReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonMemberReason {
    /// Not a k-linear combination of I, B, ..., B^{n-1}.
    NotInAlgebra,
    /// In the algebra but not invertible.
    NotInvertible,
    /// Invertible and in the algebra, but moves the constant solution.
    MovesConstants,
}

impl std::fmt::Display for NonMemberReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            NonMemberReason::NotInAlgebra => "not in span{I, B, ..., B^(n-1)}",
            NonMemberReason::NotInvertible => "determinant is zero",
            NonMemberReason::MovesConstants => "does not fix the constant solution",
        };
        f.write_str(s)
    }
}

/// The commutation map X -> BX - XB as an n^2 x n^2 matrix acting on
/// column-vectorized X.
fn commutation_map(b: &Matrix) -> Result<Matrix> {
    let n = b.rows();
    let spec = b.spec();
    let mut m = Matrix::zeros(n * n, n * n, spec);
    // Column of the map indexed by the unit matrix E_{ij}.
    for j in 0..n {
        for i in 0..n {
            let mut e = Matrix::zeros(n, n, spec);
            e.set(i, j, FieldElem::one(spec));
            let image = b.matmul(&e)?.sub(&e.matmul(b)?)?;
            let col = image.vectorize();
            for (row, v) in col.into_iter().enumerate() {
                m.set(row, j * n + i, v);
            }
        }
    }
    Ok(m)
}

/// [I, B, ..., B^{n-1}] for a companion (nonderogatory) matrix B. Verifies
/// linear independence and cross-checks the span against the kernel of
/// X -> BX - XB; a mismatch signals a non-companion input.
pub fn centralizer_basis(b: &Matrix) -> Result<Vec<Matrix>> {
    if !b.is_square() {
        return Err(Error::ShapeMismatch("centralizer_basis: non-square".into()));
    }
    let n = b.rows();
    let mut basis = Vec::with_capacity(n);
    let mut power = Matrix::identity(n, b.spec());
    for _ in 0..n {
        basis.push(power.clone());
        power = power.matmul(b)?;
    }
    let stacked = stack_vectorized(&basis)?;
    if stacked.rank() != n {
        return Err(Error::CentralizerMismatch { expected: n, got: stacked.rank() });
    }
    let kernel_dim = commutation_map(b)?.kernel().len();
    if kernel_dim != n {
        return Err(Error::CentralizerMismatch { expected: n, got: kernel_dim });
    }
    Ok(basis)
}

/// n^2 x m matrix whose columns are the vectorized basis matrices.
fn stack_vectorized(mats: &[Matrix]) -> Result<Matrix> {
    let n = mats[0].rows();
    let spec = mats[0].spec();
    let mut stacked = Matrix::zeros(n * n, mats.len(), spec);
    for (col, m) in mats.iter().enumerate() {
        for (row, v) in m.vectorize().into_iter().enumerate() {
            stacked.set(row, col, v);
        }
    }
    Ok(stacked)
}

/// Builds the group presentation for a constant-coefficient operator.
pub fn group_descriptor(op: &LinearOperator) -> Result<GroupDescriptor> {
    let scalars = op.constant_coeffs()?;
    let b = op.companion_matrix()?;
    let n = op.order();
    let algebra_basis = centralizer_basis(&b)?;
    let a0 = &scalars[0];
    let constraint = if a0.is_zero() {
        // 0 is a root of the characteristic polynomial exactly when a_0 = 0,
        // and then the constant solution's coordinate vector e_1 is killed
        // by B.
        let e1 = unit_vector(n, 0, op.spec());
        let be1 = b.mul_vec(&e1)?;
        assert!(be1.iter().all(|v| v.is_zero()), "a_0 = 0 but B e_1 != 0");
        Constraint::InvertibleAndFixesConstants
    } else {
        Constraint::InvertibleOnly
    };
    Ok(GroupDescriptor { n, b, algebra_basis, constraint, spec: op.spec() })
}

fn unit_vector(n: usize, i: usize, spec: FieldSpec) -> Vec<FieldElem> {
    (0..n)
        .map(|j| {
            if j == i {
                FieldElem::one(spec)
            } else {
                FieldElem::zero(spec)
            }
        })
        .collect()
}

impl GroupDescriptor {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn companion(&self) -> &Matrix {
        &self.b
    }

    pub fn algebra_basis(&self) -> &[Matrix] {
        &self.algebra_basis
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    /// Decides membership: C must be an invertible k-combination of the
    /// algebra basis and, under the fixes-constants constraint, satisfy
    /// C e_1 = e_1. Coordinates are solved by exact elimination.
    pub fn membership(&self, c: &Matrix) -> Result<Membership> {
        if c.spec() != self.spec {
            return Err(Error::MixedFields);
        }
        if (c.rows(), c.cols()) != (self.n, self.n) {
            return Err(Error::ShapeMismatch(format!(
                "membership: expected {}x{}, got {}x{}",
                self.n,
                self.n,
                c.rows(),
                c.cols()
            )));
        }
        let stacked = stack_vectorized(&self.algebra_basis)?;
        let coords = match stacked.solve_any(&c.vectorize())? {
            Some(coords) => coords,
            None => {
                return Ok(Membership::NotMember { reason: NonMemberReason::NotInAlgebra })
            }
        };
        if c.det()?.is_zero() {
            return Ok(Membership::NotMember { reason: NonMemberReason::NotInvertible });
        }
        if self.constraint == Constraint::InvertibleAndFixesConstants {
            let e1 = unit_vector(self.n, 0, self.spec);
            if c.mul_vec(&e1)? != e1 {
                return Ok(Membership::NotMember { reason: NonMemberReason::MovesConstants });
            }
        }
        Ok(Membership::Member { coords })
    }

    /// The member sum c_i B^i for given coordinates (no constraint checks).
    pub fn from_coords(&self, coords: &[FieldElem]) -> Result<Matrix> {
        crate::linalg::matrix_poly_eval(coords, &self.b)
    }

    pub fn to_repr(&self) -> GroupDescriptorRepr {
        GroupDescriptorRepr {
            n: self.n,
            b: self.b.to_repr(),
            constraint: self.constraint,
            algebra_basis: self.algebra_basis.iter().map(|m| m.to_repr()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDescriptorRepr {
    pub n: usize,
    #[serde(rename = "B")]
    pub b: MatrixRepr,
    pub constraint: Constraint,
    pub algebra_basis: Vec<MatrixRepr>,
}

/// Spectral presentation available when the characteristic polynomial splits
/// over k: sorted roots with block sizes, the semisimple part S, the
/// nilpotent part N, and the change of basis T with Y T = Z for
/// z_{j,t} = x^[j] exp(alpha_t x).
#[derive(Debug, Clone)]
pub struct SpectralData {
    spec: FieldSpec,
    n: usize,
    roots: Vec<FieldElem>,
    block_sizes: Vec<usize>,
    s: Matrix,
    nil: Matrix,
    t: Matrix,
    b: Matrix,
}

impl SpectralData {
    pub fn roots(&self) -> &[FieldElem] {
        &self.roots
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn semisimple(&self) -> &Matrix {
        &self.s
    }

    pub fn nilpotent(&self) -> &Matrix {
        &self.nil
    }

    pub fn change_of_basis(&self) -> &Matrix {
        &self.t
    }

    pub fn companion(&self) -> &Matrix {
        &self.b
    }

    /// The basis z_{j,t} = x^[j] exp(alpha_t x) in block order.
    pub fn z_basis(&self) -> Vec<HurwitzSeries> {
        let mut out = Vec::with_capacity(self.n);
        for (root, &size) in self.roots.iter().zip(&self.block_sizes) {
            let e = HurwitzSeries::exponential(root.clone());
            for j in 0..size {
                out.push(
                    HurwitzSeries::divided_power(j, self.spec)
                        .mul(&e)
                        .expect("same spec"),
                );
            }
        }
        out
    }

    pub fn to_repr(&self) -> SpectralDataRepr {
        SpectralDataRepr {
            roots: self.roots.iter().map(|r| r.to_string()).collect(),
            multiplicities: self.block_sizes.clone(),
            s: self.s.to_repr(),
            n: self.nil.to_repr(),
            t: self.t.to_repr(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDataRepr {
    pub roots: Vec<String>,
    pub multiplicities: Vec<usize>,
    #[serde(rename = "S")]
    pub s: MatrixRepr,
    #[serde(rename = "N")]
    pub n: MatrixRepr,
    #[serde(rename = "T")]
    pub t: MatrixRepr,
}

/// Factors the characteristic polynomial X^n + sum a_i X^i over k itself
/// (rational-root search over Q, exhaustive scan over GF(p)) and, when it
/// splits, assembles the Jordan data and the change of basis. Fails with
/// NotSplitOverK when an irreducible factor of degree > 1 remains; the
/// descriptor path is unaffected by that failure.
pub fn spectral_data(op: &LinearOperator) -> Result<SpectralData> {
    let scalars = op.constant_coeffs()?;
    let n = op.order();
    let spec = op.spec();
    let mut char_poly: Vec<FieldElem> = scalars.to_vec();
    char_poly.push(FieldElem::one(spec));

    let mut found = roots::roots_in_field(&char_poly)?;
    let total: usize = found.iter().map(|(_, m)| m).sum();
    if total != n {
        return Err(Error::NotSplitOverK(format!(
            "characteristic polynomial has an irreducible factor of degree {}",
            n - total
        )));
    }
    found.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let roots_sorted: Vec<FieldElem> = found.iter().map(|(r, _)| r.clone()).collect();
    let block_sizes: Vec<usize> = found.iter().map(|(_, m)| *m).collect();

    let mut s = Matrix::zeros(n, n, spec);
    let mut nil = Matrix::zeros(n, n, spec);
    let mut offset = 0usize;
    for (root, &size) in roots_sorted.iter().zip(&block_sizes) {
        for j in 0..size {
            s.set(offset + j, offset + j, root.clone());
            if j + 1 < size {
                nil.set(offset + j, offset + j + 1, FieldElem::one(spec));
            }
        }
        offset += size;
    }

    let b = op.companion_matrix()?;
    let sd = SpectralData {
        spec,
        n,
        roots: roots_sorted,
        block_sizes,
        s,
        nil,
        t: Matrix::identity(n, spec), // replaced below
        b,
    };
    let z = sd.z_basis();
    let mut t = Matrix::zeros(n, n, spec);
    for (col, zj) in z.iter().enumerate() {
        for i in 0..n {
            t.set(i, col, zj.coeff(i));
        }
    }
    let sd = SpectralData { t, ..sd };

    // Y T = Z at the stated verification depth, and T^{-1} B T = S + N
    // exactly; both are theorems for this construction.
    let basis = op.solution_basis();
    let check = Precision::new(16);
    for (col, zj) in z.iter().enumerate() {
        let mut combo = HurwitzSeries::zero(spec);
        for (i, yi) in basis.basis.iter().enumerate() {
            combo = combo.add(&yi.scalar_mul(sd.t.at(i, col))?)?;
        }
        assert!(combo.eq_to_precision(zj, check)?, "Y T != Z");
    }
    let conj = sd.t.inv()?.matmul(&sd.b)?.matmul(&sd.t)?;
    assert_eq!(conj, sd.s.add(&sd.nil)?, "T^-1 B T != S + N");
    Ok(sd)
}

/// One per-root factor of the block decomposition of G(V|k).
#[derive(Debug, Clone)]
pub struct BlockGroup {
    pub root: FieldElem,
    pub size: usize,
    /// Powers of the size x size shift block: the block centralizer algebra.
    pub algebra_basis: Vec<Matrix>,
    /// True exactly when the root is 0: the block must be unipotent (fix the
    /// constant solution), i.e. upper unitriangular.
    pub unipotent_required: bool,
}

/// Per-block description of G(V|k) from spectral data: for each root, the
/// upper-triangular-Toeplitz algebra of its block and whether unipotence is
/// forced.
pub fn block_group_decomposition(sd: &SpectralData) -> Vec<BlockGroup> {
    let spec = sd.spec;
    sd.roots
        .iter()
        .zip(&sd.block_sizes)
        .map(|(root, &size)| {
            let mut shift = Matrix::zeros(size, size, spec);
            for i in 0..size.saturating_sub(1) {
                shift.set(i, i + 1, FieldElem::one(spec));
            }
            let mut basis = Vec::with_capacity(size);
            let mut power = Matrix::identity(size, spec);
            for _ in 0..size {
                basis.push(power.clone());
                power = power.matmul(&shift).expect("same spec");
            }
            BlockGroup {
                root: root.clone(),
                size,
                algebra_basis: basis,
                unipotent_required: root.is_zero(),
            }
        })
        .collect()
}

/// The conjugated block predicate: C belongs to the group iff T^{-1} C T is
/// block diagonal, each block lies in its block algebra (upper triangular
/// Toeplitz), blocks at root 0 are unitriangular, and C is invertible.
pub fn spectral_membership(sd: &SpectralData, c: &Matrix) -> Result<bool> {
    if c.spec() != sd.spec {
        return Err(Error::MixedFields);
    }
    if (c.rows(), c.cols()) != (sd.n, sd.n) {
        return Err(Error::ShapeMismatch("spectral_membership: wrong shape".into()));
    }
    if c.det()?.is_zero() {
        return Ok(false);
    }
    let d = sd.t.inv()?.matmul(c)?.matmul(&sd.t)?;
    let mut offset = 0usize;
    for (root, &size) in sd.roots.iter().zip(&sd.block_sizes) {
        // Off-block entries in this block-row and block-column must vanish.
        for i in offset..offset + size {
            for j in 0..sd.n {
                let inside = (offset..offset + size).contains(&j);
                if !inside && !d.at(i, j).is_zero() {
                    return Ok(false);
                }
                if !inside && !d.at(j, i).is_zero() {
                    return Ok(false);
                }
            }
        }
        // Upper triangular Toeplitz within the block.
        for i in 0..size {
            for j in 0..size {
                let v = d.at(offset + i, offset + j);
                if j < i {
                    if !v.is_zero() {
                        return Ok(false);
                    }
                } else if v != d.at(offset, offset + (j - i)) {
                    return Ok(false);
                }
            }
        }
        if root.is_zero() && !d.at(offset, offset).is_one() {
            return Ok(false);
        }
        offset += size;
    }
    Ok(true)
}

/// The action of a member on a solution basis: sigma(y_j) = sum_i y_i C_{ij}.
pub fn act(c: &Matrix, descriptor: &GroupDescriptor, basis: &SolutionBasis) -> Result<Vec<HurwitzSeries>> {
    match descriptor.membership(c)? {
        Membership::Member { .. } => {}
        Membership::NotMember { reason } => {
            return Err(Error::NotAMember(reason.to_string()))
        }
    }
    apply_matrix_to_basis(c, &basis.basis)
}

fn apply_matrix_to_basis(c: &Matrix, basis: &[HurwitzSeries]) -> Result<Vec<HurwitzSeries>> {
    let n = basis.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = HurwitzSeries::zero(basis[0].spec());
        for (i, yi) in basis.iter().enumerate() {
            acc = acc.add(&yi.scalar_mul(c.at(i, j))?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Checks the defining property sigma(v)' = sigma(v') coefficientwise below
/// the given precision, with the derivation on V represented by the
/// companion matrix B.
pub fn verify_automorphism(c: &Matrix, basis: &SolutionBasis, p: Precision) -> Result<bool> {
    let b = basis.operator.companion_matrix()?;
    let n = basis.basis.len();
    if (c.rows(), c.cols()) != (n, n) {
        return Err(Error::ShapeMismatch("verify_automorphism: wrong shape".into()));
    }
    let sigma_y = apply_matrix_to_basis(c, &basis.basis)?;
    for j in 0..n {
        let lhs = sigma_y[j].derive();
        // sigma(y_j') = sigma(sum_i y_i B_{ij}) = sum_i sigma(y_i) B_{ij}.
        let mut rhs = HurwitzSeries::zero(basis.basis[0].spec());
        for (i, si) in sigma_y.iter().enumerate() {
            rhs = rhs.add(&si.scalar_mul(b.at(i, j))?)?;
        }
        if !lhs.eq_to_precision(&rhs, p)? {
            return Ok(false);
        }
    }
    Ok(true)
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

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::prime_field(p).unwrap()
    }

    fn fibonacci_op() -> LinearOperator {
        LinearOperator::constant(Q, qv(&[-1, -1])).unwrap()
    }

    fn second_derivative_op() -> LinearOperator {
        LinearOperator::constant(Q, qv(&[0, 0])).unwrap()
    }

    #[test]
    fn centralizer_basis_examples() {
        let b = Matrix::from_i64_rows(Q, &[&[0, 1], &[1, 1]]).unwrap();
        let basis = centralizer_basis(&b).unwrap();
        assert_eq!(basis[0], Matrix::identity(2, Q));
        assert_eq!(basis[1], b);
        assert_eq!(commutation_map(&b).unwrap().kernel().len(), 2);

        let b1 = Matrix::from_i64_rows(Q, &[&[5]]).unwrap();
        let basis = centralizer_basis(&b1).unwrap();
        assert_eq!(basis, vec![Matrix::identity(1, Q)]);

        // Example 3 companion: span{I,B,B^2} equals the commutant as a subspace.
        let b3 = Matrix::from_i64_rows(Q, &[&[0, 1, 0], &[0, 0, 1], &[1, -3, 3]]).unwrap();
        let basis = centralizer_basis(&b3).unwrap();
        let stacked = stack_vectorized(&basis).unwrap();
        for v in commutation_map(&b3).unwrap().kernel() {
            assert!(stacked.solve_any(&v).unwrap().is_some());
        }
    }

    #[test]
    fn centralizer_rejects_derogatory_matrices() {
        // For the identity the powers collapse to a single dimension and the
        // commutant is all of M(2,k); either check trips.
        let id = Matrix::identity(2, Q);
        assert!(matches!(
            centralizer_basis(&id),
            Err(Error::CentralizerMismatch { .. })
        ));
    }

    #[test]
    fn descriptor_constraints() {
        let d = group_descriptor(&fibonacci_op()).unwrap();
        assert_eq!(d.constraint(), Constraint::InvertibleOnly);

        let d = group_descriptor(&second_derivative_op()).unwrap();
        assert_eq!(d.constraint(), Constraint::InvertibleAndFixesConstants);

        // d - alpha with alpha != 0: the group is all of k^*.
        let l = LinearOperator::constant(Q, vec![qe("-3")]).unwrap();
        let d = group_descriptor(&l).unwrap();
        assert_eq!(d.constraint(), Constraint::InvertibleOnly);
        for c in ["1", "2", "-7/3"] {
            let m = Matrix::from_rows(Q, vec![vec![qe(c)]]).unwrap();
            assert!(matches!(d.membership(&m).unwrap(), Membership::Member { .. }));
        }
        let zero = Matrix::zeros(1, 1, Q);
        assert_eq!(
            d.membership(&zero).unwrap(),
            Membership::NotMember { reason: NonMemberReason::NotInvertible }
        );
    }

    #[test]
    fn membership_examples() {
        let d = group_descriptor(&fibonacci_op()).unwrap();
        let c = Matrix::from_i64_rows(Q, &[&[2, 3], &[3, 5]]).unwrap();
        match d.membership(&c).unwrap() {
            Membership::Member { coords } => assert_eq!(coords, qv(&[2, 3])),
            other => panic!("expected member, got {other:?}"),
        }

        let d = group_descriptor(&second_derivative_op()).unwrap();
        let shear = Matrix::from_i64_rows(Q, &[&[1, 5], &[0, 1]]).unwrap();
        assert!(matches!(d.membership(&shear).unwrap(), Membership::Member { .. }));

        let scale = Matrix::from_i64_rows(Q, &[&[2, 0], &[0, 2]]).unwrap();
        assert_eq!(
            d.membership(&scale).unwrap(),
            Membership::NotMember { reason: NonMemberReason::MovesConstants }
        );
    }

    #[test]
    fn fixes_constants_iff_c0_is_one() {
        // Under the constraint, membership coordinates must start with 1;
        // derived from B e_1 = 0, checked rather than assumed.
        let d = group_descriptor(&second_derivative_op()).unwrap();
        for c1 in -3i64..=3 {
            let coords = vec![qe("1"), FieldElem::from_i64(c1, Q)];
            let m = d.from_coords(&coords).unwrap();
            match d.membership(&m).unwrap() {
                Membership::Member { coords } => assert_eq!(coords[0], qe("1")),
                other => panic!("expected member, got {other:?}"),
            }
        }
        let bad = d.from_coords(&qv(&[2, 0])).unwrap();
        assert_eq!(
            d.membership(&bad).unwrap(),
            Membership::NotMember { reason: NonMemberReason::MovesConstants }
        );
    }

    #[test]
    fn spectral_example_3() {
        let l = LinearOperator::constant(Q, qv(&[-1, 3, -3])).unwrap();
        let sd = spectral_data(&l).unwrap();
        assert_eq!(sd.roots(), &[qe("1")]);
        assert_eq!(sd.block_sizes(), &[3]);
        assert_eq!(
            sd.change_of_basis(),
            &Matrix::from_i64_rows(Q, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 1]]).unwrap()
        );
    }

    #[test]
    fn spectral_second_derivative() {
        let sd = spectral_data(&second_derivative_op()).unwrap();
        assert_eq!(sd.roots(), &[qe("0")]);
        assert_eq!(sd.block_sizes(), &[2]);
        assert_eq!(sd.semisimple(), &Matrix::zeros(2, 2, Q));
        assert_eq!(
            sd.nilpotent(),
            &Matrix::from_i64_rows(Q, &[&[0, 1], &[0, 0]]).unwrap()
        );
    }

    #[test]
    fn spectral_not_split() {
        // X^2 - X - 1 has irrational roots: candidates +-1 both fail.
        assert!(matches!(
            spectral_data(&fibonacci_op()),
            Err(Error::NotSplitOverK(_))
        ));
    }

    #[test]
    fn spectral_distinct_roots_sorted() {
        // (X-2)(X+1)(X-1/2) = X^3 - 3/2 X^2 - 3/2 X + 1.
        let l = LinearOperator::constant(Q, vec![qe("1"), qe("-3/2"), qe("-3/2")]).unwrap();
        let sd = spectral_data(&l).unwrap();
        assert_eq!(sd.roots(), &[qe("-1"), qe("1/2"), qe("2")]);
        assert_eq!(sd.block_sizes(), &[1, 1, 1]);
    }

    #[test]
    fn spectral_over_gf5() {
        // X^2 + 3X + 2 = (X+1)(X+2) over GF(5): roots 3 and 4.
        let spec = gf(5);
        let l = LinearOperator::constant(
            spec,
            vec![FieldElem::from_i64(2, spec), FieldElem::from_i64(3, spec)],
        )
        .unwrap();
        let sd = spectral_data(&l).unwrap();
        assert_eq!(
            sd.roots(),
            &[FieldElem::from_i64(3, spec), FieldElem::from_i64(4, spec)]
        );
    }

    #[test]
    fn block_decomposition_example_1() {
        let sd = spectral_data(&second_derivative_op()).unwrap();
        let blocks = block_group_decomposition(&sd);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].size, 2);
        assert!(blocks[0].unipotent_required);
        assert_eq!(blocks[0].algebra_basis.len(), 2);
    }

    #[test]
    fn spectral_membership_agrees_with_descriptor() {
        let l = LinearOperator::constant(Q, qv(&[-1, 3, -3])).unwrap();
        let d = group_descriptor(&l).unwrap();
        let sd = spectral_data(&l).unwrap();
        for coords in [
            qv(&[1, 0, 0]),
            qv(&[2, 1, 0]),
            qv(&[1, -1, 3]),
            qv(&[0, 1, 1]),
        ] {
            let c = d.from_coords(&coords).unwrap();
            let member = matches!(d.membership(&c).unwrap(), Membership::Member { .. });
            assert_eq!(spectral_membership(&sd, &c).unwrap(), member);
        }
        let outside = Matrix::from_i64_rows(Q, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert!(matches!(
            d.membership(&outside).unwrap(),
            Membership::NotMember { .. }
        ));
        assert!(!spectral_membership(&sd, &outside).unwrap());
    }

    #[test]
    fn act_examples() {
        let dd = second_derivative_op();
        let d = group_descriptor(&dd).unwrap();
        let basis = dd.solution_basis();

        let id = Matrix::identity(2, Q);
        let acted = act(&id, &d, &basis).unwrap();
        for (a, b) in acted.iter().zip(&basis.basis) {
            assert!(a.eq_to_precision(b, Precision::new(16)).unwrap());
        }

        // [[1,c],[0,1]] sends x to c*1 + x and commutes with the derivation.
        let c = Matrix::from_i64_rows(Q, &[&[1, 7], &[0, 1]]).unwrap();
        let acted = act(&c, &d, &basis).unwrap();
        let expect = HurwitzSeries::from_coeffs(Q, qv(&[7, 1])).unwrap();
        assert!(acted[1].eq_to_precision(&expect, Precision::new(16)).unwrap());
        assert!(verify_automorphism(&c, &basis, Precision::new(24)).unwrap());

        let scale = Matrix::from_i64_rows(Q, &[&[2, 0], &[0, 2]]).unwrap();
        assert!(matches!(act(&scale, &d, &basis), Err(Error::NotAMember(_))));
    }

    #[test]
    fn b_itself_acts_on_fibonacci_basis() {
        let fib = fibonacci_op();
        let d = group_descriptor(&fib).unwrap();
        let basis = fib.solution_basis();
        let b = d.companion().clone();
        let acted = act(&b, &d, &basis).unwrap();
        // sigma(Y) = Y B: first image is y_2, by B's first column.
        assert!(acted[0]
            .eq_to_precision(&basis.basis[1], Precision::new(24))
            .unwrap());
        assert!(verify_automorphism(&b, &basis, Precision::new(24)).unwrap());
    }

    #[test]
    fn non_commuting_matrix_fails_verification() {
        let fib = fibonacci_op();
        let basis = fib.solution_basis();
        let bad = Matrix::from_i64_rows(Q, &[&[1, 1], &[0, 1]]).unwrap();
        // Invertible, but does not commute with the companion matrix.
        let b = fib.companion_matrix().unwrap();
        assert_ne!(bad.matmul(&b).unwrap(), b.matmul(&bad).unwrap());
        assert!(!verify_automorphism(&bad, &basis, Precision::new(24)).unwrap());
    }

    #[test]
    fn group_closure_and_commutativity() {
        for op in [
            fibonacci_op(),
            LinearOperator::constant(Q, qv(&[2, 0, 1])).unwrap(),
        ] {
            let d = group_descriptor(&op).unwrap();
            let members: Vec<Matrix> = [
                qv(&[1, 1, 0]),
                qv(&[2, -1, 1]),
                qv(&[1, 0, 2]),
            ]
            .iter()
            .map(|coords| d.from_coords(&coords[..d.order()].to_vec()).unwrap())
            .filter(|c| matches!(d.membership(c).unwrap(), Membership::Member { .. }))
            .collect();
            for a in &members {
                for b in &members {
                    let prod = a.matmul(b).unwrap();
                    assert!(matches!(d.membership(&prod).unwrap(), Membership::Member { .. }));
                    assert_eq!(prod, b.matmul(a).unwrap());
                }
                let inv = a.inv().unwrap();
                assert!(matches!(d.membership(&inv).unwrap(), Membership::Member { .. }));
            }
        }
    }
}
