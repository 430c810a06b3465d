//! The valuation matrix.
//!
//! Each coprime-basis element g contributes the vector of orders of
//! vanishing of the f_i at its roots, weighted by deg(g) — the sum of the
//! identical per-root vectors over all conjugate roots. Vectors spanning a
//! common line are merged by summation, columns are sorted canonically, and
//! a final column for the valuation at infinity makes every row sum to zero.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exactmath::{primitive, IntMatrix};
use crate::unipoly::{CoprimeBasis, UPoly};
use crate::{Error, Result};

/// Integer matrix with n+2 rows; the first `finite` columns are the merged
/// order-of-vanishing vectors, the last column is the valuation at infinity.
#[derive(Clone, Debug)]
pub struct ValuationMatrix {
    pub v: IntMatrix,
    /// Number of finite columns (the infinity column is at index `finite`).
    pub finite: usize,
    /// For each finite column, the indices of the basis elements merged
    /// into it.
    pub provenance: Vec<Vec<usize>>,
}

/// The valuation at infinity: componentwise negated degrees.
pub fn infinity_column(f: &[UPoly]) -> Vec<BigInt> {
    f.iter()
        .map(|fi| {
            if fi.is_zero() || fi.is_constant() {
                BigInt::zero()
            } else {
                -BigInt::from(fi.degree() as u64)
            }
        })
        .collect()
}

/// Build the valuation matrix from a coprime basis of `f`.
pub fn build_valuation(f: &[UPoly], basis: &CoprimeBasis) -> Result<ValuationMatrix> {
    let rows = f.len();
    // Degree-weighted order vector per basis element.
    let mut weighted: Vec<(Vec<BigInt>, usize)> = Vec::new();
    for (j, g) in basis.basis.iter().enumerate() {
        let degw = BigInt::from(g.degree() as u64);
        let col: Vec<BigInt> =
            (0..rows).map(|i| &degw * BigInt::from(basis.exponents[i][j] as u64)).collect();
        if col.iter().any(|x| !x.is_zero()) {
            weighted.push((col, j));
        }
    }

    // Merge vectors spanning a common line. All finite vectors are
    // componentwise nonnegative, so same line means same primitive direction.
    let mut groups: Vec<(Vec<BigInt>, Vec<BigInt>, Vec<usize>)> = Vec::new();
    for (col, j) in weighted {
        let dir = primitive(&col)?;
        match groups.iter_mut().find(|(gdir, _, _)| *gdir == dir) {
            Some((_, sum, prov)) => {
                for (s, c) in sum.iter_mut().zip(&col) {
                    *s += c;
                }
                prov.push(j);
            }
            None => groups.push((dir, col, vec![j])),
        }
    }

    // Canonical order: lexicographic descending.
    groups.sort_by(|a, b| b.1.cmp(&a.1));

    let finite = groups.len();
    let mut cols: Vec<Vec<BigInt>> = groups.iter().map(|(_, sum, _)| sum.clone()).collect();
    let provenance: Vec<Vec<usize>> = groups.into_iter().map(|(_, _, p)| p).collect();

    // The infinity column balances the rows to zero; it equals the negated
    // degree vector because multiplicities sum to degrees.
    let mut inf = vec![BigInt::zero(); rows];
    for col in &cols {
        for (s, c) in inf.iter_mut().zip(col) {
            *s -= c;
        }
    }
    if inf != infinity_column(f) {
        return Err(Error::Internal(
            "infinity column does not match negated degrees".into(),
        ));
    }
    cols.push(inf);

    let mut v = IntMatrix::zero(rows, finite + 1);
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            v.set(i, j, x.clone());
        }
    }
    Ok(ValuationMatrix { v, finite, provenance })
}
