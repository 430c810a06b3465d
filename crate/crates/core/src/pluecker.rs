//! Problem instances and the Plücker matrix.
//!
//! A valid instance is an n×(n+2) integer matrix `A` of full rank whose
//! columns all sum to the same positive integer `d`, together with n+2
//! nonzero univariate polynomials. The Plücker matrix collects the signed
//! maximal minors of `A`, normalized by their gcd; its rows span `ker A`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exactmath::{maximal_minor, rank_int, IntMatrix};
use crate::unipoly::UPoly;
use crate::{Error, Result};

/// A validated problem instance: the pair (A, f).
#[derive(Clone, Debug)]
pub struct ToricInput {
    pub a: IntMatrix,
    pub f: Vec<UPoly>,
    /// Number of torus variables; `a` has n rows and n+2 columns.
    pub n: usize,
    /// Common column sum of `a`.
    pub d: BigInt,
}

/// Skew-symmetric matrix of normalized signed maximal minors, with the
/// normalizing gcd.
#[derive(Clone, Debug)]
pub struct PlueckerData {
    pub p: IntMatrix,
    pub delta: BigInt,
}

/// Validate a raw instance: shape, rank, equal positive column sums, and
/// nonzero polynomials.
pub fn validate_input(a: IntMatrix, f: Vec<UPoly>) -> Result<ToricInput> {
    let n = a.rows;
    if n == 0 {
        return Err(Error::InvalidInput("matrix A has no rows".into()));
    }
    if a.cols != n + 2 {
        return Err(Error::InvalidInput(format!(
            "matrix A must have n+2 = {} columns, found {}",
            n + 2,
            a.cols
        )));
    }
    if f.len() != n + 2 {
        return Err(Error::InvalidInput(format!(
            "expected {} polynomials, found {}",
            n + 2,
            f.len()
        )));
    }
    let d: BigInt = (0..n).map(|i| a.at(i, 0)).sum();
    for j in 1..a.cols {
        let s: BigInt = (0..n).map(|i| a.at(i, j)).sum();
        if s != d {
            return Err(Error::InvalidInput("column sums differ".into()));
        }
    }
    if !d.is_positive() {
        return Err(Error::InvalidInput("column sums must be positive".into()));
    }
    if rank_int(&a) < n {
        return Err(Error::InvalidInput(format!("rank(A) < n = {}", n)));
    }
    for (i, fi) in f.iter().enumerate() {
        if fi.is_zero() {
            return Err(Error::InvalidInput(format!("f_{} is the zero polynomial", i)));
        }
    }
    Ok(ToricInput { a, f, n, d })
}

/// Build the Plücker matrix: `p_ij = (-1)^(i+j) det(A with columns i,j
/// deleted) / delta` for i < j, skew-symmetric below, zero diagonal, with
/// `delta` the gcd of all maximal minors.
pub fn build_pluecker(a: &IntMatrix) -> Result<PlueckerData> {
    let m = a.cols;
    let mut minors = vec![vec![BigInt::zero(); m]; m];
    let mut delta = BigInt::zero();
    for i in 0..m {
        for j in i + 1..m {
            let d = maximal_minor(a, (i, j))?;
            delta = delta.gcd(&d);
            minors[i][j] = d;
        }
    }
    if delta.is_zero() {
        // Unreachable for rank-n A: some n columns are independent.
        return Err(Error::Internal("all maximal minors of A vanish".into()));
    }
    let mut p = IntMatrix::zero(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let v = BigInt::from(sign) * &minors[i][j] / &delta;
            p.set(i, j, v.clone());
            p.set(j, i, -v);
        }
    }
    Ok(PlueckerData { p, delta })
}

impl PlueckerData {
    /// Lexicographically first index pair (i, j), i < j, with `p_ij != 0`.
    pub fn projection_pair(&self) -> (usize, usize) {
        let m = self.p.rows;
        for i in 0..m {
            for j in i + 1..m {
                if !self.p.at(i, j).is_zero() {
                    return (i, j);
                }
            }
        }
        unreachable!("Plücker matrix of a valid instance is nonzero");
    }
}
