//! Newton polygon reconstruction and lattice-point enumeration.
//!
//! The columns of E = P·V are the directed edges of the Newton polygon.
//! Assembly: drop zero columns, sum same-direction columns, sort by exact
//! angular order of a 2-coordinate projection (orientation fixed by the sign
//! of the Plücker entry at the projection pair), chain partial sums, and
//! translate so every coordinate attains minimum zero. Lattice points come
//! from an exact scanline over the projected polygon, lifted back through an
//! invertible n×n block of A.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactmath::{content, invert, primitive, rank_int, IntMatrix};
use crate::pluecker::PlueckerData;
use crate::valuation::ValuationMatrix;
use crate::{Error, Result};

/// Rank classification of E = P·V per the three hypersurface cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// rank 0: codimension two or more, no implicit hypersurface equation.
    NotHypersurface,
    /// rank 1: a toric (binomial) hypersurface; degenerate two-vertex polygon.
    ToricHypersurface,
    /// rank 2: a hypersurface with a nondegenerate Newton polygon.
    AlmostToric,
}

/// The edge matrix E = P·V with its rank classification.
#[derive(Clone, Debug)]
pub struct EdgeMatrix {
    pub e: IntMatrix,
    pub classification: Classification,
}

/// Compute E = P·V and classify by exact rank.
pub fn edge_matrix(p: &PlueckerData, v: &ValuationMatrix) -> EdgeMatrix {
    let e = p.p.mul(&v.v);
    let classification = match rank_int(&e) {
        0 => Classification::NotHypersurface,
        1 => Classification::ToricHypersurface,
        2 => Classification::AlmostToric,
        r => unreachable!("edge matrix has rank {} > 2", r),
    };
    EdgeMatrix { e, classification }
}

/// The Newton polygon: cyclically ordered integer vertices in the ambient
/// space, the directed edges between consecutive vertices, and the
/// projection pair used for 2D work.
#[derive(Clone, Debug)]
pub struct NewtonPolygon {
    pub vertices: Vec<Vec<BigInt>>,
    pub edges: Vec<Vec<BigInt>>,
    pub projection: (usize, usize),
    pub classification: Classification,
}

/// Exact counterclockwise angular comparator starting at the positive
/// x-axis: quadrant class first, cross product within a class.
fn angle_class(x: &BigInt, y: &BigInt) -> u8 {
    use std::cmp::Ordering::*;
    match (x.cmp(&BigInt::zero()), y.cmp(&BigInt::zero())) {
        (Greater, Equal) => 0,
        (Greater, Greater) => 1,
        (Equal, Greater) => 2,
        (Less, Greater) => 3,
        (Less, Equal) => 4,
        (Less, Less) => 5,
        (Equal, Less) => 6,
        (Greater, Less) => 7,
        (Equal, Equal) => unreachable!("zero projection of a polygon edge"),
    }
}

fn ccw_cmp(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> std::cmp::Ordering {
    let ca = angle_class(&a.0, &a.1);
    let cb = angle_class(&b.0, &b.1);
    ca.cmp(&cb).then_with(|| {
        // Within a class, a before b when cross(a, b) > 0.
        let cross = &a.0 * &b.1 - &a.1 * &b.0;
        BigInt::zero().cmp(&cross)
    })
}

/// Assemble the polygon from the edge matrix. `flip_orientation` inverts the
/// calibrated sign rule; the result is the point reflection of the true
/// polygon and exists only to let callers falsify the rule and to drive the
/// interpolation fallback.
pub fn assemble_polygon_oriented(
    em: &EdgeMatrix,
    p: &PlueckerData,
    flip_orientation: bool,
) -> Result<NewtonPolygon> {
    if em.classification == Classification::NotHypersurface {
        return Err(Error::NotHypersurface);
    }
    let (c1, c2) = p.projection_pair();

    // Drop zero columns; sum columns sharing a direction (edges appear once,
    // lattice length is additive).
    let mut merged: Vec<(Vec<BigInt>, Vec<BigInt>)> = Vec::new();
    for j in 0..em.e.cols {
        let col = em.e.col(j);
        if col.iter().all(|x| x.is_zero()) {
            continue;
        }
        let dir = primitive(&col)?;
        match merged.iter_mut().find(|(d, s)| {
            *d == dir && {
                // same primitive line; same direction iff some nonzero
                // coordinate has equal sign
                let k = s.iter().position(|x| !x.is_zero()).unwrap();
                s[k].sign() == col[k].sign()
            }
        }) {
            Some((_, sum)) => {
                for (a, b) in sum.iter_mut().zip(&col) {
                    *a += b;
                }
            }
            None => merged.push((dir, col)),
        }
    }
    let mut edges: Vec<Vec<BigInt>> = merged.into_iter().map(|(_, s)| s).collect();
    if edges.len() < 2 {
        return Err(Error::Internal("fewer than two polygon edges".into()));
    }

    // Counterclockwise iff the Plücker entry at the projection pair is
    // positive (calibrated on known polygons; the flipped rule produces the
    // point reflection).
    let ccw_wanted = p.p.at(c1, c2).is_positive() ^ flip_orientation;
    edges.sort_by(|a, b| ccw_cmp(&(a[c1].clone(), a[c2].clone()), &(b[c1].clone(), b[c2].clone())));
    if !ccw_wanted {
        edges.reverse();
    }

    let dim = em.e.rows;
    let m = edges.len();
    let mut partial = vec![BigInt::zero(); dim];
    let mut sums: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for e in &edges {
        for (s, x) in partial.iter_mut().zip(e) {
            *s += x;
        }
        sums.push(partial.clone());
    }
    if sums[m - 1].iter().any(|x| !x.is_zero()) {
        return Err(Error::Internal("polygon edges do not close up".into()));
    }

    // r_i = -min_k of the i-th partial sums; shifts every coordinate's
    // minimum over the vertex cycle to zero.
    let shift: Vec<BigInt> = (0..dim)
        .map(|i| -sums.iter().map(|s| s[i].clone()).min().unwrap())
        .collect();
    let mut vertices: Vec<Vec<BigInt>> =
        sums.iter().map(|s| s.iter().zip(&shift).map(|(a, r)| a + r).collect()).collect();

    // Rotate so the lexicographically smallest vertex comes first; edge k
    // still points from vertex k to vertex k+1.
    let start = (0..m).min_by(|&i, &j| vertices[i].cmp(&vertices[j])).unwrap();
    vertices.rotate_left(start);
    let mut cyc_edges: Vec<Vec<BigInt>> = edges;
    // edges[k] leads *into* sums[k]; after rotation vertex 0 is sums[start],
    // so the edge out of vertex 0 is edges[start+1].
    cyc_edges.rotate_left((start + 1) % m);

    Ok(NewtonPolygon {
        vertices,
        edges: cyc_edges,
        projection: (c1, c2),
        classification: em.classification,
    })
}

/// Assemble with the calibrated orientation rule.
pub fn assemble_polygon(em: &EdgeMatrix, p: &PlueckerData) -> Result<NewtonPolygon> {
    assemble_polygon_oriented(em, p, false)
}

impl NewtonPolygon {
    /// Common total degree of all vertices (every coordinate sum agrees).
    pub fn degree(&self) -> BigInt {
        self.vertices[0].iter().sum()
    }

    /// Serializable snapshot with all integers as decimal strings.
    pub fn report(&self, lattice: &[Vec<BigInt>]) -> PolygonReport {
        let enc = |vs: &[Vec<BigInt>]| {
            vs.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect()
        };
        PolygonReport {
            classification: match self.classification {
                Classification::NotHypersurface => "not_hypersurface",
                Classification::ToricHypersurface => "toric_hypersurface",
                Classification::AlmostToric => "almost_toric",
            }
            .to_string(),
            vertices: enc(&self.vertices),
            edges: enc(&self.edges),
            lattice_points: enc(lattice),
        }
    }
}

/// JSON-facing polygon report; integers as decimal strings since adversarial
/// inputs overflow 64 bits.
#[derive(Clone, Debug, Serialize)]
pub struct PolygonReport {
    pub classification: String,
    pub vertices: Vec<Vec<String>>,
    pub edges: Vec<Vec<String>>,
    pub lattice_points: Vec<Vec<String>>,
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from(n.clone())
}

/// Integer points of a (possibly degenerate) convex polygon given by its
/// cyclic vertex list in 2D, by exact scanline. Rows are independent; order
/// is deterministic (ascending y, then x).
fn lattice_points_2d(verts: &[(BigInt, BigInt)]) -> Vec<(BigInt, BigInt)> {
    let ymin = verts.iter().map(|v| v.1.clone()).min().unwrap();
    let ymax = verts.iter().map(|v| v.1.clone()).max().unwrap();
    let m = verts.len();
    let mut out = Vec::new();
    let mut y = ymin;
    while y <= ymax {
        let mut xlo: Option<BigRational> = None;
        let mut xhi: Option<BigRational> = None;
        let mut push = |x: BigRational| {
            if xlo.as_ref().map_or(true, |lo| x < *lo) {
                xlo = Some(x.clone());
            }
            if xhi.as_ref().map_or(true, |hi| x > *hi) {
                xhi = Some(x);
            }
        };
        for k in 0..m {
            let (ref px, ref py) = verts[k];
            let (ref qx, ref qy) = verts[(k + 1) % m];
            if py == qy {
                if *py == y {
                    push(rat(px));
                    push(rat(qx));
                }
                continue;
            }
            let (lo, hi) = if py < qy { (py, qy) } else { (qy, py) };
            if *lo <= y && y <= *hi {
                // x = px + (y - py) * (qx - px) / (qy - py)
                let t = BigRational::new(&y - py, qy - py);
                let x = rat(px) + t * rat(&(qx - px));
                push(x);
            }
        }
        let (lo, hi) = (xlo.unwrap(), xhi.unwrap());
        let mut x = lo.ceil().to_integer();
        let xmax = hi.floor().to_integer();
        while x <= xmax {
            out.push((x.clone(), y.clone()));
            x += 1;
        }
        y += 1;
    }
    out
}

/// Enumerate the lattice points of the polygon: scanline over the projected
/// polygon, then lift each 2D point by solving the invertible complementary
/// n×n system over the rationals, keeping integral solutions. The projection
/// is injective on the polygon's plane, so this is a bijection.
pub fn lattice_points(poly: &NewtonPolygon, a: &IntMatrix) -> Result<Vec<Vec<BigInt>>> {
    let (c1, c2) = poly.projection;
    let dim = poly.vertices[0].len();

    // Degenerate segment: walk primitive steps in the ambient space.
    if poly.vertices.len() == 2 {
        let p0 = &poly.vertices[0];
        let p1 = &poly.vertices[1];
        let delta: Vec<BigInt> = p1.iter().zip(p0).map(|(b, a)| b - a).collect();
        let g = content(&delta)?;
        let step: Vec<BigInt> = delta.iter().map(|x| x / &g).collect();
        let mut out = Vec::new();
        let mut t = BigInt::zero();
        while t <= g {
            out.push(p0.iter().zip(&step).map(|(s, d)| s + d * &t).collect());
            t += 1;
        }
        return Ok(out);
    }

    let proj: Vec<(BigInt, BigInt)> =
        poly.vertices.iter().map(|v| (v[c1].clone(), v[c2].clone())).collect();
    let pts2d = lattice_points_2d(&proj);

    let keep: Vec<usize> = (0..dim).filter(|&c| c != c1 && c != c2).collect();
    let a_rest = a.select_cols(&keep).to_rational();
    let inv = invert(&a_rest)?;
    let alpha = a.mul_vec(&poly.vertices[0]);
    let a1 = a.col(c1);
    let a2 = a.col(c2);

    let mut out = Vec::new();
    for (x, y) in pts2d {
        let rhs: Vec<BigRational> = alpha
            .iter()
            .zip(a1.iter().zip(&a2))
            .map(|(al, (b1, b2))| rat(&(al - b1 * &x - b2 * &y)))
            .collect();
        let sol = inv.mul_vec(&rhs);
        if sol.iter().all(|s| s.denom().is_one()) {
            let mut v = vec![BigInt::zero(); dim];
            v[c1] = x;
            v[c2] = y;
            for (&c, s) in keep.iter().zip(&sol) {
                debug_assert!(!s.numer().is_negative(), "polygon point with negative coordinate");
                v[c] = s.numer().clone();
            }
            out.push(v);
        }
    }
    Ok(out)
}
