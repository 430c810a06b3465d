//! Exact integer and rational linear algebra.
//!
//! Dense matrices over `BigInt` / `BigRational` with rank, nullspace,
//! determinant and maximal-minor computations. Integer elimination is
//! fraction-free (Bareiss) to control intermediate growth; rational
//! elimination uses deterministic first-nonzero pivoting so results are
//! reproducible across runs and platforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type IntScalar = BigInt;
pub type RatScalar = BigRational;

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.at(i, k) * other.at(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Submatrix keeping the given columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zero(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from(x.clone())).collect(),
        }
    }
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Rank over the rationals via Bareiss fraction-free elimination on a
/// denominator-cleared copy. Deterministic: pivots are the first nonzero
/// entry in column order.
pub fn rank_exact(m: &RatMatrix) -> usize {
    // Clear denominators row by row; row scaling does not change rank.
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| {
            let lcm = m.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            m.row(i).iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    bareiss_rank(&mut a)
}

pub fn rank_int(m: &IntMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    bareiss_rank(&mut a)
}

/// Bareiss fraction-free row reduction; returns the rank. Mutates `a`.
fn bareiss_rank(a: &mut [Vec<BigInt>]) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let pivot = (rank..rows).find(|&i| !a[i][col].is_zero());
        let Some(p) = pivot else {
            col += 1;
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let t = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = &t / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        col += 1;
    }
    rank
}

/// Determinant of a square integer matrix, fraction-free.
pub fn det_int(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = &t / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 { -d } else { d }
}

/// Determinant of the n×n submatrix of `a` obtained by deleting two columns.
pub fn maximal_minor(a: &IntMatrix, deleted: (usize, usize)) -> Result<BigInt> {
    let (i, j) = deleted;
    if i == j {
        return Err(Error::InvalidInput("duplicate column index in minor".into()));
    }
    if i >= a.cols || j >= a.cols {
        return Err(Error::InvalidInput("column index out of range in minor".into()));
    }
    let keep: Vec<usize> = (0..a.cols).filter(|&c| c != i && c != j).collect();
    Ok(det_int(&a.select_cols(&keep)))
}

/// Gcd of absolute values of the entries; the lattice length of the vector.
pub fn content(v: &[BigInt]) -> Result<BigInt> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(Error::InvalidInput("zero vector has no content".into()));
    }
    Ok(g)
}

/// Reduced row echelon form over the rationals. Returns pivot columns.
/// Deterministic: first nonzero entry in column order becomes the pivot.
fn rref(a: &mut Vec<Vec<BigRational>>) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for j in c..cols {
            let t = &a[r][j] / &inv;
            a[r][j] = t;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &a[i][j] - &f * &a[r][j];
                    a[i][j] = t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact right-nullspace dimension and basis, from the reduced echelon form.
/// Basis vectors are indexed by free columns in ascending order; the free
/// coordinate is set to one.
pub fn nullspace_dim_and_basis(m: &RatMatrix) -> (usize, Vec<Vec<BigRational>>) {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let pivots = rref(&mut a);
    let cols = m.cols;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[ri][fc].clone();
        }
        basis.push(v);
    }
    (free.len(), basis)
}

/// Inverse of a square rational matrix by Gauss-Jordan on the augmented
/// system. Errors on singular input.
pub fn invert(m: &RatMatrix) -> Result<RatMatrix> {
    assert_eq!(m.rows, m.cols, "inverse of non-square matrix");
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            for j in 0..n {
                row.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            row
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| k != c) {
        return Err(Error::Internal("singular matrix passed to invert".into()));
    }
    let mut out = RatMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, a[i][n + j].clone());
        }
    }
    Ok(out)
}

/// Divide an integer vector by its content and fix sign so the first nonzero
/// entry is positive. Used for canonical direction vectors.
pub fn primitive(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = content(v)?;
    let mut out: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut out {
                *x = -std::mem::take(x);
            }
        }
    }
    Ok(out)
}

pub fn int_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn hexagon_plu() -> IntMatrix {
        IntMatrix::from_i64_rows(&[
            vec![0, -2, 2, 1, -1],
            vec![2, 0, -4, 0, 2],
            vec![-2, 4, 0, -2, 0],
            vec![-1, 0, 2, 0, -1],
            vec![1, -2, 0, 1, 0],
        ])
    }

    #[test]
    fn rank_of_printed_pluecker_matrix_is_two() {
        assert_eq!(rank_int(&hexagon_plu()), 2);
    }

    #[test]
    fn rank_zero_and_identity() {
        assert_eq!(rank_int(&IntMatrix::zero(3, 3)), 0);
        assert_eq!(rank_int(&IntMatrix::from_i64_rows(&[vec![1, 0], vec![0, 1]])), 2);
    }

    #[test]
    fn maximal_minor_examples() {
        // 3x5 exponent matrix: deleting columns {0,1} leaves a 3x3 block of
        // determinant 4, independently checked by cofactor expansion.
        let a = IntMatrix::from_i64_rows(&[
            vec![2, 1, 1, 0, 0],
            vec![0, 1, 0, 2, 0],
            vec![0, 0, 1, 0, 2],
        ]);
        assert_eq!(maximal_minor(&a, (0, 1)).unwrap(), BigInt::from(4));
        assert_eq!(maximal_minor(&a, (1, 0)).unwrap(), BigInt::from(4));

        let z = IntMatrix::from_i64_rows(&[vec![3, 2, 1, 0], vec![0, 1, 2, 3]]);
        assert_eq!(maximal_minor(&z, (0, 1)).unwrap(), BigInt::from(3));

        assert!(maximal_minor(&z, (1, 1)).is_err());
        assert!(maximal_minor(&z, (0, 9)).is_err());
    }

    #[test]
    fn content_examples() {
        assert_eq!(content(&int_vec(&[2, -1, -4, 3])).unwrap(), BigInt::one());
        assert_eq!(content(&int_vec(&[-4, -4, 12, 2, -6])).unwrap(), BigInt::from(2));
        assert!(content(&int_vec(&[0, 0, 0])).is_err());
    }

    #[test]
    fn nullspace_examples() {
        let m = IntMatrix::from_i64_rows(&[vec![1, -1]]).to_rational();
        let (dim, basis) = nullspace_dim_and_basis(&m);
        assert_eq!(dim, 1);
        assert_eq!(basis[0], vec![BigRational::one(), BigRational::one()]);

        let inv2 = IntMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]]).to_rational();
        assert_eq!(nullspace_dim_and_basis(&inv2).0, 0);

        let z = RatMatrix::zero(2, 3);
        assert_eq!(nullspace_dim_and_basis(&z).0, 3);
    }

    #[test]
    fn rank_plus_nullity_is_column_count() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..60 {
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..6);
            let m = IntMatrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-4i64..5))).collect())
                    .collect(),
            );
            let r = rank_int(&m);
            let (nullity, basis) = nullspace_dim_and_basis(&m.to_rational());
            assert_eq!(r + nullity, cols);
            // Every basis vector is annihilated by the matrix.
            let mr = m.to_rational();
            for b in &basis {
                assert!(mr.mul_vec(b).iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn invert_round_trip() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 1, 0], vec![0, 1, 1], vec![1, 0, 3]]).to_rational();
        let inv = invert(&m).unwrap();
        for i in 0..3 {
            let e: Vec<BigRational> = (0..3)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect();
            let x = inv.mul_vec(&m.mul_vec(&e));
            assert_eq!(x, e);
        }
    }

    proptest! {
        #[test]
        fn bareiss_and_rational_elimination_agree_on_rank(
            rows in 1usize..5, cols in 1usize..5, seed in 0u64..500
        ) {
            let mut rng = StdRng::seed_from_u64(seed);
            let m = IntMatrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-6i64..7))).collect())
                    .collect(),
            );
            let bareiss = rank_int(&m);
            let mut a: Vec<Vec<BigRational>> =
                (0..rows).map(|i| m.to_rational().row(i).to_vec()).collect();
            let rational = rref(&mut a).len();
            prop_assert_eq!(bareiss, rational);
        }

        #[test]
        fn content_scales_linearly(c in -20i64..20, seed in 0u64..200) {
            prop_assume!(c != 0);
            let mut rng = StdRng::seed_from_u64(seed);
            let v: Vec<BigInt> = (0..5).map(|_| BigInt::from(rng.gen_range(-9i64..10))).collect();
            prop_assume!(v.iter().any(|x| !x.is_zero()));
            let scaled: Vec<BigInt> = v.iter().map(|x| x * BigInt::from(c)).collect();
            prop_assert_eq!(
                content(&scaled).unwrap(),
                BigInt::from(c.unsigned_abs()) * content(&v).unwrap()
            );
        }
    }
}
