//! Exact linear algebra over the rationals.
//!
//! Subspaces are kept in reduced row-echelon form with positional pivoting,
//! so two subspaces are equal exactly when their stored bases are equal.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::partition::Partition;

/// Exact rational number.
pub type Scalar = BigRational;

/// The integer multiple of `v` with coprime entries and positive leading entry.
pub fn primitive(v: &[Scalar]) -> Vec<Scalar> {
    use num::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Scalar::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x < &BigInt::zero() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| Scalar::from_integer(x / &gcd * &sign)).collect()
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Converts a slice of integers to scalars.
pub fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| int(x)).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not nilpotent")]
    NotNilpotent,
    #[error("operator does not shift the grading by {step}")]
    NotGraded { step: isize },
    #[error("matrix is singular")]
    Singular,
}

fn check_dim(expected: usize, found: usize) -> Result<(), LinAlgError> {
    if expected == found {
        Ok(())
    } else {
        Err(LinAlgError::DimensionMismatch { expected, found })
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn diagonal(d: &[Scalar]) -> Self {
        let n = d.len();
        let mut m = Mat::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    /// Builds a matrix from rows, which must all have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<Scalar>]) -> Result<Self, LinAlgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r.len())?;
            data.extend(r.iter().cloned());
        }
        Ok(Mat { rows: rows.len(), cols, data })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| ints(r)).collect();
        Mat::from_rows(cols, &rows).expect("ragged integer rows")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<Scalar>]) -> Result<Self, LinAlgError> {
        Ok(Mat::from_rows(rows, cols)?.transpose())
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self, LinAlgError> {
        check_dim(rows * cols, data.len())?;
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn flat(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// The block with the given row and column ranges.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Mat {
        let data = rows.clone().flat_map(|i| self.row(i)[cols.clone()].iter().cloned()).collect();
        Mat { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn diag(&self) -> Vec<Scalar> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "apply: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn checked_mul(&self, other: &Mat) -> Result<Mat, LinAlgError> {
        check_dim(self.cols, other.rows)?;
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Mat {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut out = Mat::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> Scalar {
        self.diag().into_iter().fold(Scalar::zero(), |a, b| a + b)
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    /// Stacks matrices vertically.
    pub fn vstack(cols: usize, blocks: &[&Mat]) -> Result<Mat, LinAlgError> {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            check_dim(cols, b.cols)?;
            rows += b.rows;
            data.extend(b.data.iter().cloned());
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn inverse(&self) -> Result<Mat, LinAlgError> {
        check_dim(self.rows, self.cols)?;
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let (r, piv) = rref(&aug);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(LinAlgError::Singular);
        }
        let mut inv = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn mul(self, rhs: &'a Mat) -> Mat {
        self.checked_mul(rhs).expect("matrix product: dimension mismatch")
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn add(self, rhs: &'a Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum: shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn sub(self, rhs: &'a Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference: shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

fn eliminate(target: &mut [Scalar], row: &[Scalar], col: usize) {
    let f = target[col].clone();
    if f.is_zero() {
        return;
    }
    for (t, r) in target.iter_mut().zip(row).skip(col) {
        if !r.is_zero() {
            *t -= &f * r;
        }
    }
}

fn normalize(row: &mut [Scalar], col: usize) {
    let p = row[col].clone();
    if p.is_one() {
        return;
    }
    for x in row.iter_mut().skip(col) {
        if !x.is_zero() {
            *x /= &p;
        }
    }
}

/// Reduced row-echelon form with zero rows removed, plus pivot columns.
///
/// Pivoting is positional: in each column the first eligible nonzero row is used.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut rows: Vec<Vec<Scalar>> = m.row_vecs();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        normalize(&mut rows[r], c);
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().unwrap();
        for other in head.iter_mut().chain(rest.iter_mut()) {
            eliminate(other, pivot_row, c);
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (Mat::from_rows(m.cols, &rows).unwrap(), pivots)
}

/// A particular solution of `a x = b` with free variables set to zero.
pub fn solve(a: &Mat, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinAlgError> {
    check_dim(a.rows, b.len())?;
    let n = a.cols;
    let mut aug = Mat::zeros(a.rows, n + 1);
    for i in 0..a.rows {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (r, piv) = rref(&aug);
    if piv.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![Scalar::zero(); n];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = r.get(i, n).clone();
    }
    Ok(Some(x))
}

/// Incrementally built echelon basis; cheaper than repeated `rref` when
/// vectors arrive one at a time.
#[derive(Clone, Debug)]
pub struct EchelonBuilder {
    ambient: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl EchelonBuilder {
    pub fn new(ambient: usize) -> Self {
        EchelonBuilder { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_subspace(s: &Subspace) -> Self {
        EchelonBuilder { ambient: s.ambient, rows: s.basis.row_vecs(), pivots: s.pivots.clone() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after reduction against the current rows.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            eliminate(&mut v, row, c);
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was added.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient, "echelon insert: dimension mismatch");
        let mut v = self.reduce(v);
        let Some(c) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        normalize(&mut v, c);
        self.rows.push(v);
        self.pivots.push(c);
        true
    }

    pub fn to_subspace(&self) -> Subspace {
        Subspace::from_rows(self.ambient, &self.rows).unwrap()
    }
}

/// A linear subspace of `Q^n`, stored as its RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in Q^{}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Mat::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Mat::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// Row space of a matrix.
    pub fn row_space(m: &Mat) -> Self {
        let (basis, pivots) = rref(m);
        Subspace { ambient: m.cols(), basis, pivots }
    }

    pub fn from_rows(ambient: usize, vectors: &[Vec<Scalar>]) -> Result<Self, LinAlgError> {
        Ok(Subspace::row_space(&Mat::from_rows(ambient, vectors)?))
    }

    pub fn span(ambient: usize, vectors: &[&[Scalar]]) -> Result<Self, LinAlgError> {
        let rows: Vec<Vec<Scalar>> = vectors.iter().map(|v| v.to_vec()).collect();
        Subspace::from_rows(ambient, &rows)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// RREF basis matrix, one basis vector per row.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.row_vecs()
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if v.len() != self.ambient {
            return None;
        }
        let coords: Vec<Scalar> = self.pivots.iter().map(|&c| v[c].clone()).collect();
        let mut residual = v.to_vec();
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (r, b) in residual.iter_mut().zip(self.basis.row(i)) {
                if !b.is_zero() {
                    *r -= c * b;
                }
            }
        }
        residual.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && (0..self.dim()).all(|i| other.contains(self.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        check_dim(self.ambient, other.ambient)?;
        Ok(Subspace::row_space(&Mat::vstack(self.ambient, &[&self.basis, &other.basis])?))
    }

    /// Vectors annihilated by the standard pairing with every basis vector.
    pub fn annihilator(&self) -> Subspace {
        kernel(&self.basis)
    }

    /// Intersection, computed as the kernel of the stacked annihilator constraints.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        check_dim(self.ambient, other.ambient)?;
        let a = self.annihilator();
        let b = other.annihilator();
        Ok(kernel(&Mat::vstack(self.ambient, &[&a.basis, &b.basis])?))
    }
}

/// Image of a subspace under a linear map acting on column vectors.
pub fn image(op: &Mat, s: &Subspace) -> Result<Subspace, LinAlgError> {
    check_dim(op.cols(), s.ambient)?;
    let rows: Vec<Vec<Scalar>> = (0..s.dim()).map(|i| op.apply(s.basis.row(i))).collect();
    Subspace::from_rows(op.rows(), &rows)
}

/// Kernel `{x : op x = 0}`.
pub fn kernel(op: &Mat) -> Subspace {
    let (r, piv) = rref(op);
    let n = op.cols();
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; n];
    for &p in &piv {
        is_pivot[p] = true;
    }
    for free in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = vec![Scalar::zero(); n];
        v[free] = Scalar::one();
        for (i, &p) in piv.iter().enumerate() {
            v[p] = -r.get(i, free).clone();
        }
        basis.push(v);
    }
    Subspace::from_rows(n, &basis).unwrap()
}

/// Symmetric bilinear form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    gram: Mat,
}

impl BilinearForm {
    pub fn new(gram: Mat) -> Result<Self, LinAlgError> {
        check_dim(gram.rows(), gram.cols())?;
        assert!(gram.is_symmetric(), "Gram matrix must be symmetric");
        Ok(BilinearForm { gram })
    }

    /// The standard dot product on `Q^n`.
    pub fn standard(n: usize) -> Self {
        BilinearForm { gram: Mat::identity(n) }
    }

    pub fn diagonal(weights: &[Scalar]) -> Self {
        BilinearForm { gram: Mat::diagonal(weights) }
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn eval(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let gv = self.gram.apply(v);
        u.iter().zip(&gv).fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Gram matrix of the form restricted to a subspace, in its RREF basis.
    pub fn restricted_gram(&self, s: &Subspace) -> Mat {
        let b = s.basis();
        &(b * &self.gram) * &b.transpose()
    }

    pub fn is_nondegenerate_on(&self, s: &Subspace) -> bool {
        self.restricted_gram(s).rank() == s.dim()
    }
}

/// `{w : q(w, v) = 0 for all v in s}`.
pub fn orth_complement(s: &Subspace, q: &BilinearForm) -> Result<Subspace, LinAlgError> {
    check_dim(q.dim(), s.ambient())?;
    Ok(kernel(&(s.basis() * q.gram())))
}

/// Jordan type of a nilpotent operator from its rank sequence.
pub fn nilpotent_partition(n: &Mat) -> Result<Partition, LinAlgError> {
    check_dim(n.rows(), n.cols())?;
    let dim = n.rows();
    let mut ranks = vec![dim];
    let mut power = Mat::identity(dim);
    while *ranks.last().unwrap() > 0 {
        if ranks.len() > dim {
            return Err(LinAlgError::NotNilpotent);
        }
        power = &power * n;
        let r = power.rank();
        if r == *ranks.last().unwrap() {
            return Err(LinAlgError::NotNilpotent);
        }
        ranks.push(r);
    }
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    Ok(Partition::new(at_least).conjugate())
}

/// One Jordan chain `x, N x, ..., N^(len-1) x` of a graded nilpotent operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedChain {
    /// Level of the first vector `x`.
    pub start_level: usize,
    /// Level of the last vector, which lies in the kernel.
    pub end_level: usize,
    pub vectors: Vec<Vec<Scalar>>,
}

impl GradedChain {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn head(&self) -> &[Scalar] {
        &self.vectors[0]
    }
}

fn shifted(level: usize, step: isize, times: usize, levels: usize) -> Option<usize> {
    let l = level as isize + step * times as isize;
    (0..levels as isize).contains(&l).then_some(l as usize)
}

/// The map from level `from` to level `from + k·step` induced by `N^k`, for
/// `n` in coordinates where each level is a consecutive block; `None` when
/// the target level does not exist.
pub fn level_power(n: &Mat, offsets: &[usize], from: usize, k: usize, step: isize) -> Option<Mat> {
    let nl = offsets.len() - 1;
    let range = |p: usize| offsets[p]..offsets[p + 1];
    let mut m = Mat::identity(offsets[from + 1] - offsets[from]);
    let mut cur = from;
    for _ in 0..k {
        let next = shifted(cur, step, 1, nl)?;
        m = &n.submatrix(range(next), range(cur)) * &m;
        cur = next;
    }
    Some(m)
}

/// Column space of a matrix.
pub fn column_space(m: &Mat) -> Subspace {
    Subspace::row_space(&m.transpose())
}

/// Graded Jordan chains of a nilpotent operator mapping level `p` into level
/// `p + step`, given in coordinates where level `p` occupies the block
/// `offsets[p]..offsets[p+1]`.
///
/// For each end level and chain length, the chain ends are chosen by extending
/// the RREF basis of the longer-chain ends inside `ker N ∩ im N^q ∩ level`,
/// and each chain start is the free-variables-zero preimage under `N^q`.
pub fn graded_chains(n: &Mat, offsets: &[usize], step: isize) -> Result<Vec<GradedChain>, LinAlgError> {
    check_dim(n.rows(), n.cols())?;
    let dim = n.rows();
    check_dim(dim, *offsets.last().unwrap_or(&0))?;
    let nl = offsets.len() - 1;
    let level_of = |i: usize| offsets.partition_point(|&o| o <= i) - 1;
    for i in 0..dim {
        for j in 0..dim {
            if !n.get(i, j).is_zero() && shifted(level_of(j), step, 1, nl) != Some(level_of(i)) {
                return Err(LinAlgError::NotGraded { step });
            }
        }
    }
    let mut chains = Vec::new();
    for p in 0..nl {
        let hp = offsets[p + 1] - offsets[p];
        let kp = match level_power(n, offsets, p, 1, step) {
            Some(b) => kernel(&b),
            None => Subspace::full(hp),
        };
        // ends[q] = ker N ∩ N^q(source level) ∩ H^p, in level coordinates
        let mut ends = Vec::with_capacity(nl + 1);
        let mut maps = Vec::with_capacity(nl);
        for q in 0..nl {
            let src = shifted(p, -step, q, nl);
            let m = src.and_then(|s| level_power(n, offsets, s, q, step));
            let e = match &m {
                Some(m) => kp.intersect(&column_space(m))?,
                None => Subspace::zero(hp),
            };
            ends.push(e);
            maps.push(src.zip(m));
        }
        ends.push(Subspace::zero(hp));
        for q in (0..nl).rev() {
            let mut eb = EchelonBuilder::from_subspace(&ends[q + 1]);
            for tail in ends[q].vectors() {
                if !eb.insert(&tail) {
                    continue;
                }
                let (src, m) = maps[q].as_ref().expect("nonzero ends have a source level");
                let c = solve(m, &tail)?.expect("tail lies in the image");
                let mut x = vec![Scalar::zero(); dim];
                x[offsets[*src]..offsets[*src + 1]].clone_from_slice(&c);
                let mut vectors = vec![x];
                for _ in 0..q {
                    let next = n.apply(vectors.last().unwrap());
                    vectors.push(next);
                }
                chains.push(GradedChain { start_level: *src, end_level: p, vectors });
            }
        }
    }
    Ok(chains)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let (r, p) = rref(&Mat::identity(3));
        assert_eq!(r, Mat::identity(3));
        assert_eq!(p, vec![0, 1, 2]);

        let (r, p) = rref(&Mat::zeros(2, 4));
        assert_eq!(r.rows(), 0);
        assert!(p.is_empty());

        let (r, _) = rref(&Mat::from_int_rows(&[&[2, 4], &[1, 3]]));
        assert_eq!(r, Mat::identity(2));
    }

    #[test]
    fn subspace_examples() {
        let x = Subspace::from_rows(2, &[ints(&[1, 0])]).unwrap();
        let y = Subspace::from_rows(2, &[ints(&[0, 1])]).unwrap();
        assert!(x.intersect(&y).unwrap().is_zero());
        assert_eq!(x.sum(&y).unwrap(), Subspace::full(2));
        let k = kernel(&Mat::from_int_rows(&[&[1, 1], &[0, 0]]));
        assert_eq!(k, Subspace::from_rows(2, &[ints(&[1, -1])]).unwrap());
    }

    #[test]
    fn dimension_mismatch_reported() {
        let a = Subspace::full(2);
        let b = Subspace::full(3);
        assert_eq!(a.sum(&b), Err(LinAlgError::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn orth_complement_examples() {
        let q = BilinearForm::standard(3);
        assert!(orth_complement(&Subspace::full(3), &q).unwrap().is_zero());
        assert_eq!(orth_complement(&Subspace::zero(3), &q).unwrap(), Subspace::full(3));
        let s = Subspace::from_rows(3, &[ints(&[1, 1, 0])]).unwrap();
        let expected = Subspace::from_rows(3, &[ints(&[1, -1, 0]), ints(&[0, 0, 1])]).unwrap();
        assert_eq!(orth_complement(&s, &q).unwrap(), expected);
    }

    fn jordan_blocks(sizes: &[usize]) -> Mat {
        let n: usize = sizes.iter().sum();
        let mut m = Mat::zeros(n, n);
        let mut off = 0;
        for &s in sizes {
            for i in 1..s {
                m.set(off + i, off + i - 1, int(1));
            }
            off += s;
        }
        m
    }

    #[test]
    fn nilpotent_partition_examples() {
        assert_eq!(nilpotent_partition(&Mat::zeros(5, 5)).unwrap(), Partition::column(5));
        assert_eq!(nilpotent_partition(&jordan_blocks(&[3])).unwrap(), Partition::row(3));
        assert_eq!(
            nilpotent_partition(&jordan_blocks(&[2, 2, 1])).unwrap(),
            Partition::new(vec![2, 2, 1])
        );
        assert_eq!(nilpotent_partition(&Mat::identity(2)), Err(LinAlgError::NotNilpotent));
    }

    #[test]
    fn inverse_round_trip() {
        let a = Mat::from_int_rows(&[&[2, 1], &[7, 4]]);
        assert_eq!(&a * &a.inverse().unwrap(), Mat::identity(2));
        assert_eq!(Mat::from_int_rows(&[&[1, 2], &[2, 4]]).inverse(), Err(LinAlgError::Singular));
    }

    #[test]
    fn graded_chains_of_shift() {
        // Levels {e0, e3}, {e1}, {e2} in the coordinate order e0, e3, e1, e2:
        // e0 -> e1 -> e2 and e3 killed.
        let mut n = Mat::zeros(4, 4);
        n.set(2, 0, int(1));
        n.set(3, 2, int(1));
        let chains = graded_chains(&n, &[0, 2, 3, 4], 1).unwrap();
        let mut shape: Vec<(usize, usize, usize)> =
            chains.iter().map(|c| (c.start_level, c.end_level, c.len())).collect();
        shape.sort();
        assert_eq!(shape, vec![(0, 0, 1), (0, 2, 3)]);
        assert_eq!(graded_chains(&n, &[0, 2, 3, 4], -1), Err(LinAlgError::NotGraded { step: -1 }));
    }
}
