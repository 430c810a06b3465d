//! Three independent degree computations and the initial-monomial formula.
//!
//! * from the polygon: the common coordinate sum of its vertices;
//! * from the tropical ray formula: signed intersection counts of the rays
//!   against a generic direction, read off P, V and a generic vector w;
//! * from the triangulation sum over the kernel-plane (Gale) configuration:
//!   for each valuation column v, the regular subdivision of the column
//!   configuration of A induced by lifting heights v, summed with the
//!   normalized simplex volumes.
//!
//! The triangulation sum is evaluated with an infinitesimal lexicographic
//! perturbation, so columns whose lift is non-generic (on a cone boundary)
//! still contribute their exact value; such columns are reported in the
//! result so callers can see the perturbation was exercised.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::exactmath::{IntMatrix, RatScalar};
use crate::pluecker::PlueckerData;
use crate::polygon::NewtonPolygon;
use crate::valuation::ValuationMatrix;
use crate::{Error, Result};

/// Common total degree of the polygon's vertices.
pub fn degree_from_polygon(poly: &NewtonPolygon) -> Result<BigInt> {
    let deg: BigInt = poly.vertices[0].iter().sum();
    for v in &poly.vertices[1..] {
        let s: BigInt = v.iter().sum();
        if s != deg {
            return Err(Error::Internal("vertex coordinate sums differ".into()));
        }
    }
    Ok(deg)
}

const GENERIC_RETRIES: usize = 32;
const GENERIC_RANGE: i64 = 1_000_000;

fn draw_vector(rng: &mut StdRng, len: usize) -> Vec<BigInt> {
    (0..len).map(|_| BigInt::from(rng.gen_range(-GENERIC_RANGE..=GENERIC_RANGE))).collect()
}

/// Check the strict genericity needed by the ray formula: no coordinate of
/// P·w vanishes and no relevant valuation column is orthogonal to P·w.
/// Columns with P·v = 0 produce no edge and are excluded from every matched
/// pair regardless of w, so they place no constraint on w (for such v the
/// dot product v·(P·w) = -w·(P·v) vanishes identically and no w would pass).
fn tropical_generic(p: &PlueckerData, v: &ValuationMatrix, w: &[BigInt]) -> bool {
    let z = p.p.mul_vec(w);
    if z.iter().any(|x| x.is_zero()) {
        return false;
    }
    (0..v.v.cols).all(|j| {
        let col = v.v.col(j);
        if p.p.mul_vec(&col).iter().all(|x| x.is_zero()) {
            return true;
        }
        let dot: BigInt = col.iter().zip(&z).map(|(a, b)| a * b).sum();
        !dot.is_zero()
    })
}

fn draw_generic_w(p: &PlueckerData, v: &ValuationMatrix, seed: u64) -> Result<Vec<BigInt>> {
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..GENERIC_RETRIES {
        let w = draw_vector(&mut rng, p.p.rows);
        if tropical_generic(p, v, &w) {
            return Ok(w);
        }
    }
    Err(Error::Internal("no generic w found within retry budget".into()))
}

/// Degree from the tropical ray formula at an explicit generic w:
/// sum of |e_i^T P v_j| over the pairs where e_i^T P w, e_i^T P v_j and
/// v_j^T P w all share one strict sign.
pub fn degree_tropical_at(
    p: &PlueckerData,
    v: &ValuationMatrix,
    w: &[BigInt],
) -> Result<BigInt> {
    if !tropical_generic(p, v, w) {
        return Err(Error::InvalidInput("w is not generic for the ray formula".into()));
    }
    let z = p.p.mul_vec(w);
    let e = p.p.mul(&v.v);
    let mut total = BigInt::zero();
    for j in 0..v.v.cols {
        let col = v.v.col(j);
        let vz: BigInt = col.iter().zip(&z).map(|(a, b)| a * b).sum();
        let s = vz.sign();
        for i in 0..e.rows {
            let eij = e.at(i, j);
            if eij.is_zero() {
                continue;
            }
            if z[i].sign() == s && eij.sign() == s {
                total += eij.abs();
            }
        }
    }
    Ok(total)
}

/// Degree from the ray formula with a seeded generic direction.
pub fn degree_tropical(p: &PlueckerData, v: &ValuationMatrix, seed: u64) -> Result<BigInt> {
    let w = draw_generic_w(p, v, seed)?;
    degree_tropical_at(p, v, &w)
}

/// Exponent vector of the w-maximal term of the implicit polynomial: the
/// i-th entry sums |e_i^T P v_j| over the matched pairs. The matching runs
/// against -w because the underlying intersection count locates the
/// w-minimal face; negating w turns it into the argmax contract.
pub fn initial_monomial_at(
    p: &PlueckerData,
    v: &ValuationMatrix,
    w: &[BigInt],
) -> Result<Vec<BigInt>> {
    if !tropical_generic(p, v, w) {
        return Err(Error::InvalidInput("w is not generic for the ray formula".into()));
    }
    let neg: Vec<BigInt> = w.iter().map(|x| -x.clone()).collect();
    let z = p.p.mul_vec(&neg);
    let e = p.p.mul(&v.v);
    let mut exps = vec![BigInt::zero(); e.rows];
    for j in 0..v.v.cols {
        let col = v.v.col(j);
        let vz: BigInt = col.iter().zip(&z).map(|(a, b)| a * b).sum();
        let s = vz.sign();
        for i in 0..e.rows {
            let eij = e.at(i, j);
            if !eij.is_zero() && z[i].sign() == s && eij.sign() == s {
                exps[i] += eij.abs();
            }
        }
    }
    Ok(exps)
}

pub fn initial_monomial(
    p: &PlueckerData,
    v: &ValuationMatrix,
    seed: u64,
) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    let w = draw_generic_w(p, v, seed)?;
    let m = initial_monomial_at(p, v, &w)?;
    Ok((m, w))
}

/// Kernel-plane context: a 2×(n+2) integer matrix whose rows span ker(A),
/// taken as the lexicographically first pair of linearly independent rows
/// of the Plücker matrix.
#[derive(Clone, Debug)]
pub struct PsContext {
    pub b: IntMatrix,
    pub row_indices: (usize, usize),
}

pub fn ps_context(p: &PlueckerData) -> Result<PsContext> {
    let m = p.p.rows;
    for i in 0..m {
        if p.p.row(i).iter().all(|x| x.is_zero()) {
            continue;
        }
        for j in i + 1..m {
            // Independent iff some 2x2 minor of the two rows is nonzero.
            let indep = (0..m).any(|a| {
                (a + 1..m).any(|b| {
                    !(p.p.at(i, a) * p.p.at(j, b) - p.p.at(i, b) * p.p.at(j, a)).is_zero()
                })
            });
            if indep {
                let b = IntMatrix::from_rows(vec![p.p.row(i).to_vec(), p.p.row(j).to_vec()]);
                return Ok(PsContext { b, row_indices: (i, j) });
            }
        }
    }
    Err(Error::Internal("Plücker matrix has no independent row pair".into()))
}

/// Result of the triangulation-sum degree.
#[derive(Clone, Debug)]
pub struct PsDegree {
    pub total: BigInt,
    /// Exact contribution of each valuation column, in column order.
    pub per_column: Vec<RatScalar>,
    /// Columns whose lift landed on a cone boundary (evaluated by
    /// perturbation rather than skipped).
    pub nongeneric_columns: Vec<usize>,
}

fn det2(a: &[BigInt; 2], b: &[BigInt; 2]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Strictly positive with an infinitesimal tiebreaker: x + eps*y > 0.
fn lex_positive(x: &BigInt, y: &BigInt) -> bool {
    x.is_positive() || (x.is_zero() && y.is_positive())
}

/// Degree by the triangulation sum over the valuation columns.
///
/// For a column v lifted over the columns of A, the cells of the induced
/// regular subdivision are read off the kernel-plane configuration: the
/// simplex on the columns outside {i, j} is a cell iff B·v lies in the
/// strictly positive span of b_i and b_j. Summing the normalized cell
/// volumes against the lifted heights and negating gives the column's exact
/// contribution; the grand total over all columns is the degree.
pub fn degree_ps(
    a: &IntMatrix,
    v: &ValuationMatrix,
    ctx: &PsContext,
    delta: &BigInt,
    seed: u64,
) -> Result<PsDegree> {
    let m = a.cols;
    let bcols: Vec<[BigInt; 2]> =
        (0..m).map(|i| [ctx.b.at(0, i).clone(), ctx.b.at(1, i).clone()]).collect();

    // Precompute the n×n minors on each complementary column set.
    let mut minor_abs = vec![vec![BigInt::zero(); m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = crate::exactmath::maximal_minor(a, (i, j))?;
            minor_abs[i][j] = d.abs();
        }
    }

    // Perturbation direction: B·w0 off every ray b_i and nonzero.
    let mut rng = StdRng::seed_from_u64(seed);
    let mut bw0: Option<[BigInt; 2]> = None;
    for _ in 0..GENERIC_RETRIES {
        let w0 = draw_vector(&mut rng, m);
        let cand = [
            ctx.b.row(0).iter().zip(&w0).map(|(a, b)| a * b).sum::<BigInt>(),
            ctx.b.row(1).iter().zip(&w0).map(|(a, b)| a * b).sum::<BigInt>(),
        ];
        if cand[0].is_zero() && cand[1].is_zero() {
            continue;
        }
        if bcols.iter().all(|b| (b[0].is_zero() && b[1].is_zero()) || !det2(b, &cand).is_zero()) {
            bw0 = Some(cand);
            break;
        }
    }
    let bw0 = bw0
        .ok_or_else(|| Error::Internal("no generic perturbation direction found".into()))?;

    let mut per_column = Vec::with_capacity(v.v.cols);
    let mut nongeneric = Vec::new();
    let mut total = BigRational::zero();
    for cidx in 0..v.v.cols {
        let col = v.v.col(cidx);
        let bv = [
            ctx.b.row(0).iter().zip(&col).map(|(a, b)| a * b).sum::<BigInt>(),
            ctx.b.row(1).iter().zip(&col).map(|(a, b)| a * b).sum::<BigInt>(),
        ];
        let on_boundary = (bv[0].is_zero() && bv[1].is_zero())
            || bcols.iter().any(|b| {
                !(b[0].is_zero() && b[1].is_zero()) && det2(b, &bv).is_zero()
            });
        if on_boundary {
            nongeneric.push(cidx);
        }

        let mut acc = BigInt::zero();
        for i in 0..m {
            for j in i + 1..m {
                let d = det2(&bcols[i], &bcols[j]);
                if d.is_zero() {
                    continue;
                }
                // Cramer numerators for B(v + eps*w0) = lam*b_i + mu*b_j,
                // scaled by det(b_i, b_j).
                let lam_num = det2(&bv, &bcols[j]);
                let lam_eps = det2(&bw0, &bcols[j]);
                let mu_num = det2(&bcols[i], &bv);
                let mu_eps = det2(&bcols[i], &bw0);
                let (lam_num, lam_eps, mu_num, mu_eps) = if d.is_negative() {
                    (-lam_num, -lam_eps, -mu_num, -mu_eps)
                } else {
                    (lam_num, lam_eps, mu_num, mu_eps)
                };
                if lex_positive(&lam_num, &lam_eps) && lex_positive(&mu_num, &mu_eps) {
                    let height: BigInt = col
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != i && *k != j)
                        .map(|(_, x)| x.clone())
                        .sum();
                    acc += &minor_abs[i][j] * height;
                }
            }
        }
        let contrib = -BigRational::new(acc, delta.clone());
        total += &contrib;
        per_column.push(contrib);
    }
    if !total.denom().is_one() {
        return Err(Error::Internal("triangulation degree sum is not an integer".into()));
    }
    Ok(PsDegree { total: total.numer().clone(), per_column, nongeneric_columns: nongeneric })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int_vec;
    use crate::pluecker::{build_pluecker, validate_input};
    use crate::polygon::{assemble_polygon, edge_matrix, lattice_points};
    use crate::unipoly::{coprime_basis, parse_poly, UPoly};
    use crate::valuation::build_valuation;

    fn setup(
        a: Vec<Vec<i64>>,
        f: &[&str],
    ) -> (IntMatrix, PlueckerData, ValuationMatrix, NewtonPolygon) {
        let a = IntMatrix::from_i64_rows(&a);
        let f: Vec<UPoly> = f.iter().map(|s| parse_poly(s).unwrap()).collect();
        let inst = validate_input(a.clone(), f).unwrap();
        let pd = build_pluecker(&inst.a).unwrap();
        let cb = coprime_basis(&inst.f).unwrap();
        let vm = build_valuation(&inst.f, &cb).unwrap();
        let em = edge_matrix(&pd, &vm);
        let poly = assemble_polygon(&em, &pd).unwrap();
        (a, pd, vm, poly)
    }

    fn hexagon() -> (IntMatrix, PlueckerData, ValuationMatrix, NewtonPolygon) {
        setup(
            vec![vec![2, 1, 1, 0, 0], vec![0, 1, 0, 2, 0], vec![0, 0, 1, 0, 2]],
            &["x^2+1", "x^3*(x-1)", "x*(x+1)", "(x-2)*(x^2+1)", "(x-1)^2*(x+1)"],
        )
    }

    fn quartic() -> (IntMatrix, PlueckerData, ValuationMatrix, NewtonPolygon) {
        setup(
            vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]],
            &["x^2*(x-1)", "x^2+1", "x*(x+1)^2", "(x-1)*(x-2)"],
        )
    }

    fn segment() -> (IntMatrix, PlueckerData, ValuationMatrix, NewtonPolygon) {
        setup(vec![vec![1, 1, 1]], &["1", "1", "x"])
    }

    #[test]
    fn polygon_degrees() {
        assert_eq!(degree_from_polygon(&hexagon().3).unwrap(), BigInt::from(22));
        assert_eq!(degree_from_polygon(&quartic().3).unwrap(), BigInt::from(12));
        assert_eq!(degree_from_polygon(&segment().3).unwrap(), BigInt::one());
    }

    #[test]
    fn tropical_degrees_match_polygon() {
        for (which, (_, pd, vm, poly)) in
            [hexagon(), quartic(), segment()].into_iter().enumerate()
        {
            let d = degree_tropical(&pd, &vm, 42).unwrap();
            assert_eq!(d, degree_from_polygon(&poly).unwrap(), "instance {}", which);
        }
    }

    #[test]
    fn tropical_degree_invariant_across_seeds() {
        let (_, pd, vm, poly) = quartic();
        let want = degree_from_polygon(&poly).unwrap();
        for seed in 0..25u64 {
            assert_eq!(degree_tropical(&pd, &vm, seed).unwrap(), want);
        }
    }

    #[test]
    fn initial_monomial_is_the_w_argmax_vertex() {
        for (a, pd, vm, poly) in [hexagon(), quartic(), segment()] {
            let pts = lattice_points(&poly, &a).unwrap();
            for seed in 0..20u64 {
                let (mono, w) = initial_monomial(&pd, &vm, seed).unwrap();
                // argmax of <w, v> over the lattice points
                let best = pts
                    .iter()
                    .max_by_key(|v| {
                        v.iter().zip(&w).map(|(a, b)| a * b).sum::<BigInt>()
                    })
                    .unwrap();
                assert_eq!(&mono, best, "seed {}", seed);
                assert!(poly.vertices.contains(&mono));
            }
        }
    }

    #[test]
    fn triangulation_degree_on_golden_instances() {
        let (a, pd, vm, poly) = hexagon();
        let ctx = ps_context(&pd).unwrap();
        let ps = degree_ps(&a, &vm, &ctx, &pd.delta, 7).unwrap();
        assert_eq!(ps.total, degree_from_polygon(&poly).unwrap());
        // Both golden instances have boundary lifts, exercised via the
        // perturbation, and some strictly negative contributions.
        assert!(!ps.nongeneric_columns.is_empty());
        assert!(ps.per_column.iter().any(|c| c.is_negative()));

        let (a, pd, vm, poly) = quartic();
        let ctx = ps_context(&pd).unwrap();
        let ps = degree_ps(&a, &vm, &ctx, &pd.delta, 7).unwrap();
        assert_eq!(ps.total, BigInt::from(12));
        assert_eq!(ps.total, degree_from_polygon(&poly).unwrap());
        assert!(!ps.nongeneric_columns.is_empty());
    }

    #[test]
    fn triangulation_degree_on_segment_family() {
        // Rational normal curve reparameterizations: degree = max f-degree.
        for (f, want) in [
            (["1", "1", "x"], 1i64),
            (["1", "x", "x^2"], 2),
            (["x^2", "x", "1"], 2),
            (["x^3", "x*(x-1)", "1"], 3),
        ] {
            let (a, pd, vm, poly) = setup(vec![vec![1, 1, 1]], &f);
            let ctx = ps_context(&pd).unwrap();
            let ps = degree_ps(&a, &vm, &ctx, &pd.delta, 3).unwrap();
            assert_eq!(ps.total, BigInt::from(want));
            assert_eq!(ps.total, degree_from_polygon(&poly).unwrap());
        }
    }

    #[test]
    fn ps_context_picks_first_independent_rows() {
        let (_, pd, _, _) = hexagon();
        let ctx = ps_context(&pd).unwrap();
        assert_eq!(ctx.row_indices, (0, 1));
        assert_eq!(ctx.b.row(0), &int_vec(&[0, -2, 2, 1, -1])[..]);
        assert_eq!(ctx.b.row(1), &int_vec(&[2, 0, -4, 0, 2])[..]);
    }
}
