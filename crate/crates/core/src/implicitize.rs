//! Implicit polynomial recovery by exact interpolation.
//!
//! Every lattice point v of the Newton polygon is a candidate monomial; its
//! coefficient is an unknown. Substituting the parameterization turns the
//! candidate polynomial into a common torus monomial times a univariate
//! polynomial in x of degree at most D = max_v deg(prod f_i^{v_i}), so
//! vanishing at max(2r+1, D+1) distinct integer points (r = floor(k/2),
//! points avoiding roots of prod f_i) is equivalent to identical vanishing.
//! The resulting homogeneous system has a one-dimensional kernel; we solve
//! it exactly.
//!
//! Small systems go through incremental rational elimination directly. For
//! large systems the kernel direction is first obtained modulo a sequence of
//! 62-bit primes and lifted by CRT plus rational reconstruction; the lifted
//! vector is then certified by exact integer re-evaluation of every
//! equation, and a modular full-rank certificate pins the kernel dimension,
//! so the fast path proves exactly as much as the slow one. No result is
//! ever returned on probabilistic evidence alone.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exactmath::IntMatrix;
use crate::pluecker::{build_pluecker, PlueckerData, ToricInput};
use crate::polygon::{
    assemble_polygon_oriented, edge_matrix, lattice_points, Classification, EdgeMatrix,
    NewtonPolygon,
};
use crate::unipoly::{coprime_basis, UPoly};
use crate::valuation::{build_valuation, ValuationMatrix};
use crate::{Error, Result};

/// Common torus exponent of the support: A·v, asserted identical for every
/// support vector.
pub fn assert_common_t_monomial(support: &[Vec<BigInt>], a: &IntMatrix) -> Result<Vec<BigInt>> {
    let first = support
        .first()
        .ok_or_else(|| Error::Internal("empty support".into()))?;
    let alpha = a.mul_vec(first);
    for v in &support[1..] {
        if a.mul_vec(v) != alpha {
            return Err(Error::Internal(
                "support vectors do not share a torus monomial".into(),
            ));
        }
    }
    Ok(alpha)
}

/// The implicit polynomial: integer coefficients of content one, sign fixed
/// so the lexicographically greatest exponent vector has a positive
/// coefficient, terms sorted lexicographically descending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicitPolynomial {
    pub n: usize,
    pub terms: Vec<(Vec<BigInt>, BigInt)>,
}

#[derive(Serialize)]
struct TermJson {
    coeff: String,
    exps: Vec<u64>,
}

impl ImplicitPolynomial {
    pub fn degree(&self) -> BigInt {
        self.terms[0].0.iter().sum()
    }

    pub fn support(&self) -> Vec<Vec<BigInt>> {
        self.terms.iter().map(|(e, _)| e.clone()).collect()
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, u: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (exps, c) in &self.terms {
            let mut term = BigRational::from(c.clone());
            for (ui, e) in u.iter().zip(exps) {
                let e = e.to_u32().expect("exponent fits u32");
                term *= rat_pow_u32(ui, e);
            }
            acc += term;
        }
        acc
    }

    /// Human-readable form, lex-descending: `8*u0^6*u3^6 - 28*u0^5*u2^3*u3^4 ...`
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, (exps, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || exps.iter().all(|e| e.is_zero()) {
                parts.push(mag.to_string());
            }
            for (i, e) in exps.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                if e.is_one() {
                    parts.push(format!("u{}", i));
                } else {
                    parts.push(format!("u{}^{}", i, e));
                }
            }
            out.push_str(&parts.join("*"));
        }
        out
    }

    /// JSON form with coefficients as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(e, c)| TermJson {
                coeff: c.to_string(),
                exps: e.iter().map(|x| x.to_u64().expect("exponent fits u64")).collect(),
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let terms = v
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| Error::InvalidInput("polynomial json lacks terms".into()))?;
        let mut out = Vec::new();
        let mut n = 0;
        for t in terms {
            let coeff: BigInt = t
                .get("coeff")
                .and_then(|c| c.as_str())
                .ok_or_else(|| Error::InvalidInput("term lacks coeff string".into()))?
                .parse()
                .map_err(|_| Error::InvalidInput("bad coefficient".into()))?;
            let exps: Vec<BigInt> = t
                .get("exps")
                .and_then(|e| e.as_array())
                .ok_or_else(|| Error::InvalidInput("term lacks exps".into()))?
                .iter()
                .map(|x| BigInt::from(x.as_u64().unwrap_or(0)))
                .collect();
            n = exps.len().saturating_sub(2);
            out.push((exps, coeff));
        }
        out.sort_by(|a, b| b.0.cmp(&a.0));
        Ok(ImplicitPolynomial { n, terms: out })
    }
}

fn rat_pow_u32(x: &BigRational, e: u32) -> BigRational {
    BigRational::new(x.numer().pow(e), x.denom().pow(e))
}

fn rat_pow_i64(x: &BigRational, e: i64) -> BigRational {
    let p = rat_pow_u32(x, e.unsigned_abs() as u32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

// ---------------------------------------------------------------------------
// Evaluation machinery
// ---------------------------------------------------------------------------

/// Shared data for building the interpolation system: integerized
/// polynomials, scaled unknowns, evaluation points.
struct EvalContext {
    /// Support vectors (the unknown monomials), sorted lex ascending, with
    /// exponents as u32 for table indexing.
    support: Vec<Vec<u32>>,
    support_big: Vec<Vec<BigInt>>,
    /// Primitive integer versions of the f_i.
    fint: Vec<Vec<BigInt>>,
    /// f_i = ratio_i * F_i; scales kernel coordinates back at the end.
    ratio: Vec<BigRational>,
    /// max exponent of coordinate i over the support
    maxexp: Vec<u32>,
    /// usable integer evaluation points
    points: Vec<i64>,
    /// max_v deg prod F_i^{v_i}
    degree_bound: usize,
    k: usize,
}

fn build_eval_context(inst: &ToricInput, support: &[Vec<BigInt>]) -> Result<EvalContext> {
    let k = support.len();
    if k < 2 {
        return Err(Error::Internal("support has fewer than two monomials".into()));
    }
    let mut support_big: Vec<Vec<BigInt>> = support.to_vec();
    support_big.sort();
    let support_u32: Vec<Vec<u32>> = support_big
        .iter()
        .map(|v| v.iter().map(|x| x.to_u32().expect("support exponent fits u32")).collect())
        .collect();

    let fint: Vec<Vec<BigInt>> = inst.f.iter().map(|f| f.primitive_int_coeffs()).collect();
    let ratio: Vec<BigRational> = inst
        .f
        .iter()
        .zip(&fint)
        .map(|(f, fi)| f.leading_coeff() / BigRational::from(fi.last().unwrap().clone()))
        .collect();

    let width = inst.f.len();
    let mut maxexp = vec![0u32; width];
    for v in &support_u32 {
        for (m, &e) in maxexp.iter_mut().zip(v) {
            *m = (*m).max(e);
        }
    }

    let fdeg: Vec<usize> = inst.f.iter().map(|f| f.degree()).collect();
    let degree_bound = support_u32
        .iter()
        .map(|v| v.iter().zip(&fdeg).map(|(&e, &d)| e as usize * d).sum::<usize>())
        .max()
        .unwrap();

    // Points from -r..r, then alternating outward, skipping roots of prod f_i.
    let r = (k / 2) as i64;
    let need = (2 * r as usize + 1).max(degree_bound + 1);
    let usable = |x: i64| -> bool {
        fint.iter().all(|f| !eval_int(f, x).is_zero())
    };
    let mut points = Vec::with_capacity(need);
    for x in -r..=r {
        if usable(x) {
            points.push(x);
        }
    }
    let mut m = r + 1;
    while points.len() < need {
        if usable(m) {
            points.push(m);
        }
        if points.len() < need && usable(-m) {
            points.push(-m);
        }
        m += 1;
    }
    points.truncate(need);

    Ok(EvalContext {
        support: support_u32,
        support_big,
        fint,
        ratio,
        maxexp,
        points,
        degree_bound,
        k,
    })
}

fn eval_int(coeffs: &[BigInt], x: i64) -> BigInt {
    let xb = BigInt::from(x);
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &xb + c;
    }
    acc
}

impl EvalContext {
    /// Exact integer row of the system at one point: [Q_v(x)]_v with
    /// Q_v = prod F_i^{v_i}. Adjacent support vectors share prefixes, so
    /// products are reused along the lex order.
    fn row_exact(&self, x: i64) -> Vec<BigInt> {
        let width = self.fint.len();
        let tables: Vec<Vec<BigInt>> = self
            .fint
            .iter()
            .zip(&self.maxexp)
            .map(|(f, &m)| {
                let base = eval_int(f, x);
                let mut t = Vec::with_capacity(m as usize + 1);
                t.push(BigInt::one());
                for e in 1..=m as usize {
                    let next = &t[e - 1] * &base;
                    t.push(next);
                }
                t
            })
            .collect();
        let mut prefix: Vec<BigInt> = vec![BigInt::one(); width + 1];
        let mut prev: Option<&Vec<u32>> = None;
        let mut out = Vec::with_capacity(self.k);
        for v in &self.support {
            let start = match prev {
                None => 0,
                Some(p) => p.iter().zip(v).position(|(a, b)| a != b).unwrap_or(width),
            };
            for i in start..width {
                prefix[i + 1] = &prefix[i] * &tables[i][v[i] as usize];
            }
            out.push(prefix[width].clone());
            prev = Some(v);
        }
        out
    }

    /// Row of the system at one point, reduced modulo a prime.
    fn row_mod(&self, x: i64, p: u64, fmod: &[Vec<u64>]) -> Vec<u64> {
        let width = self.fint.len();
        let xm = x.rem_euclid(p as i64) as u64;
        let tables: Vec<Vec<u64>> = fmod
            .iter()
            .zip(&self.maxexp)
            .map(|(f, &m)| {
                let base = horner_mod(f, xm, p);
                let mut t = Vec::with_capacity(m as usize + 1);
                t.push(1u64);
                for e in 1..=m as usize {
                    t.push(mulmod(t[e - 1], base, p));
                }
                t
            })
            .collect();
        let mut prefix: Vec<u64> = vec![1; width + 1];
        let mut prev: Option<&Vec<u32>> = None;
        let mut out = Vec::with_capacity(self.k);
        for v in &self.support {
            let start = match prev {
                None => 0,
                Some(pv) => pv.iter().zip(v).position(|(a, b)| a != b).unwrap_or(width),
            };
            for i in start..width {
                prefix[i + 1] = mulmod(prefix[i], tables[i][v[i] as usize], p);
            }
            out.push(prefix[width]);
            prev = Some(v);
        }
        out
    }

    /// Exact value of sum_v c_v Q_v(x); zero iff the candidate kernel vector
    /// satisfies this point's equation.
    fn residual(&self, x: i64, c: &[BigInt]) -> BigInt {
        let row = self.row_exact(x);
        row.iter().zip(c).map(|(q, cv)| q * cv).sum()
    }

    /// Exact bound on the coefficients of sum_v c_v Q_v as a polynomial in
    /// x: sum_v |c_v| prod_i ||F_i||_1^{v_i}, sharing prefixes like the rows.
    fn residual_coeff_bound(&self, c: &[BigInt]) -> BigInt {
        let width = self.fint.len();
        let norms: Vec<BigInt> =
            self.fint.iter().map(|f| f.iter().map(|x| x.abs()).sum()).collect();
        let tables: Vec<Vec<BigInt>> = norms
            .iter()
            .zip(&self.maxexp)
            .map(|(nrm, &m)| {
                let mut t = Vec::with_capacity(m as usize + 1);
                t.push(BigInt::one());
                for e in 1..=m as usize {
                    let next = &t[e - 1] * nrm;
                    t.push(next);
                }
                t
            })
            .collect();
        let mut prefix: Vec<BigInt> = vec![BigInt::one(); width + 1];
        let mut prev: Option<&Vec<u32>> = None;
        let mut bound = BigInt::zero();
        for (v, cv) in self.support.iter().zip(c) {
            let start = match prev {
                None => 0,
                Some(p) => p.iter().zip(v).position(|(a, b)| a != b).unwrap_or(width),
            };
            for i in start..width {
                prefix[i + 1] = &prefix[i] * &tables[i][v[i] as usize];
            }
            bound += cv.abs() * &prefix[width];
            prev = Some(v);
        }
        bound
    }
}

fn horner_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for c in coeffs.iter().rev() {
        acc = (mulmod(acc, x, p) + c) % p;
    }
    acc
}

// ---------------------------------------------------------------------------
// u64 modular arithmetic and primes
// ---------------------------------------------------------------------------

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    // p prime
    powmod(a, p - 2, p)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic sequence of 62-bit primes.
struct PrimeSeq {
    next: u64,
}

impl PrimeSeq {
    fn new() -> Self {
        PrimeSeq { next: (1u64 << 62) + 1 }
    }
}

impl Iterator for PrimeSeq {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        loop {
            let c = self.next;
            self.next += 2;
            if is_prime_u64(c) {
                return Some(c);
            }
        }
    }
}

fn bigint_mod_u64(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Rational reconstruction of a residue modulo m with numerator and
/// denominator bounded by sqrt(m/2).
fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let mut r0 = m.clone();
    let mut r1 = r.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Some(BigRational::new(num, den))
}

// ---------------------------------------------------------------------------
// Kernel solvers
// ---------------------------------------------------------------------------

/// Incremental reduced echelon elimination over the rationals; the
/// authoritative (if slow) route. Returns the kernel direction when the
/// nullspace is exactly one-dimensional.
fn kernel_exact(ctx: &EvalContext) -> Result<Vec<BigRational>> {
    let k = ctx.k;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &x in &ctx.points {
        let raw = ctx.row_exact(x);
        let mut row: Vec<BigRational> =
            raw.into_iter().map(BigRational::from).collect();
        for (r, &pc) in rows.iter().zip(&pivots) {
            if !row[pc].is_zero() {
                let f = row[pc].clone();
                for (a, b) in row.iter_mut().zip(r) {
                    *a -= &f * b;
                }
            }
        }
        if let Some(pc) = row.iter().position(|x| !x.is_zero()) {
            let inv = row[pc].clone();
            for a in row.iter_mut() {
                *a /= &inv;
            }
            // back-reduce earlier rows
            for (r, &opc) in rows.iter_mut().zip(&pivots) {
                let _ = opc;
                if !r[pc].is_zero() {
                    let f = r[pc].clone();
                    for (a, b) in r.iter_mut().zip(&row) {
                        *a -= &f * b;
                    }
                }
            }
            rows.push(row);
            pivots.push(pc);
            if rows.len() == k {
                return Err(Error::NullspaceEmpty);
            }
        }
    }
    match k - rows.len() {
        0 => Err(Error::NullspaceEmpty),
        1 => {
            let free = (0..k).find(|c| !pivots.contains(c)).unwrap();
            let mut kernel = vec![BigRational::zero(); k];
            kernel[free] = BigRational::one();
            for (r, &pc) in rows.iter().zip(&pivots) {
                kernel[pc] = -r[free].clone();
            }
            Ok(kernel)
        }
        d => Err(Error::Internal(format!(
            "interpolation nullspace has dimension {}, expected 1",
            d
        ))),
    }
}

/// Kernel of the pivot-row submatrix modulo p, normalized so that the
/// coordinate `norm_col` equals one. Returns None when the modular data is
/// inconsistent with a one-dimensional kernel (unlucky prime).
fn kernel_mod(
    ctx: &EvalContext,
    point_idx: &[usize],
    p: u64,
    norm_col: usize,
) -> Option<Vec<u64>> {
    let k = ctx.k;
    let fmod: Vec<Vec<u64>> = ctx
        .fint
        .iter()
        .map(|f| f.iter().map(|c| bigint_mod_u64(c, p)).collect())
        .collect();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &pi in point_idx {
        let mut row = ctx.row_mod(ctx.points[pi], p, &fmod);
        for (r, &pc) in rows.iter().zip(&pivots) {
            if row[pc] != 0 {
                let f = row[pc];
                for (a, b) in row.iter_mut().zip(r) {
                    *a = (*a + p - mulmod(f, *b, p)) % p;
                }
            }
        }
        if let Some(pc) = row.iter().position(|&x| x != 0) {
            let inv = invmod(row[pc], p);
            for a in row.iter_mut() {
                *a = mulmod(*a, inv, p);
            }
            for r in rows.iter_mut() {
                if r[pc] != 0 {
                    let f = r[pc];
                    for (a, b) in r.iter_mut().zip(&row) {
                        *a = (*a + p - mulmod(f, *b, p)) % p;
                    }
                }
            }
            rows.push(row);
            pivots.push(pc);
        }
    }
    if rows.len() != k - 1 {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c)).unwrap();
    let mut kernel = vec![0u64; k];
    kernel[free] = 1;
    for (r, &pc) in rows.iter().zip(&pivots) {
        kernel[pc] = (p - r[free]) % p;
    }
    if kernel[norm_col] == 0 {
        return None;
    }
    let inv = invmod(kernel[norm_col], p);
    Some(kernel.iter().map(|&x| mulmod(x, inv, p)).collect())
}

/// Structural pass modulo one prime over the full point set: finds the rank
/// and which points carry pivot rows. A full-rank result proves the exact
/// kernel is trivial.
fn structural_pass(ctx: &EvalContext, p: u64) -> (usize, Vec<usize>) {
    let k = ctx.k;
    let fmod: Vec<Vec<u64>> = ctx
        .fint
        .iter()
        .map(|f| f.iter().map(|c| bigint_mod_u64(c, p)).collect())
        .collect();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut pivot_points: Vec<usize> = Vec::new();
    for (pi, &x) in ctx.points.iter().enumerate() {
        let mut row = ctx.row_mod(x, p, &fmod);
        for (r, &pc) in rows.iter().zip(&pivots) {
            if row[pc] != 0 {
                let f = row[pc];
                for (a, b) in row.iter_mut().zip(r) {
                    *a = (*a + p - mulmod(f, *b, p)) % p;
                }
            }
        }
        if let Some(pc) = row.iter().position(|&x| x != 0) {
            let inv = invmod(row[pc], p);
            for a in row.iter_mut() {
                *a = mulmod(*a, inv, p);
            }
            rows.push(row);
            pivots.push(pc);
            pivot_points.push(pi);
            if rows.len() == k {
                return (k, pivot_points);
            }
        }
    }
    (rows.len(), pivot_points)
}

const MAX_PRIMES: usize = 512;

/// Modular-lifted kernel with unconditional exact certification.
fn kernel_modular(ctx: &EvalContext) -> Result<Vec<BigRational>> {
    let k = ctx.k;
    let mut primes = PrimeSeq::new();

    // Structure: rank and pivot points. Full rank modulo any prime already
    // proves the exact nullspace is trivial.
    let mut structural_tries = 0;
    let (pivot_points, norm_col) = loop {
        let p = primes.next().unwrap();
        let (rank, pivot_points) = structural_pass(ctx, p);
        if rank == k {
            return Err(Error::NullspaceEmpty);
        }
        if rank == k - 1 {
            let fc = free_col_of(ctx, &pivot_points, p);
            break (pivot_points, fc);
        }
        structural_tries += 1;
        if structural_tries >= 3 {
            // Either a nullspace of dimension >= 2 or absurdly unlucky
            // primes; settle it exactly.
            return kernel_exact(ctx);
        }
    };
    let Some(norm_col) = norm_col else {
        return kernel_exact(ctx);
    };

    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); k];
    let mut last: Option<Vec<BigRational>> = None;
    let mut used = 0;
    while used < MAX_PRIMES {
        let p = primes.next().unwrap();
        let Some(kvec) = kernel_mod(ctx, &pivot_points, p, norm_col) else {
            continue;
        };
        used += 1;
        // CRT combine.
        let pb = BigInt::from(p);
        if modulus.is_one() {
            residues = kvec.iter().map(|&x| BigInt::from(x)).collect();
            modulus = pb;
        } else {
            let g = modulus.extended_gcd(&pb);
            debug_assert!(g.gcd.is_one());
            let inv_m_mod_p = g.x.mod_floor(&pb);
            let new_mod = &modulus * &pb;
            for (r, &x) in residues.iter_mut().zip(&kvec) {
                let diff = (BigInt::from(x) - &*r).mod_floor(&pb);
                let t = (&diff * &inv_m_mod_p).mod_floor(&pb);
                *r = (&*r + &modulus * t).mod_floor(&new_mod);
            }
            modulus = new_mod;
        }
        // Attempt reconstruction once enough primes accumulated.
        let rec: Option<Vec<BigRational>> =
            residues.iter().map(|r| rational_reconstruct(r, &modulus)).collect();
        if let Some(cand) = rec {
            if last.as_ref() == Some(&cand) {
                // Stable across one more prime: certify exactly.
                if certify(ctx, &cand)? {
                    return Ok(cand);
                }
            }
            last = Some(cand);
        } else {
            last = None;
        }
    }
    Err(Error::Internal(
        "interpolation kernel did not converge within the prime budget".into(),
    ))
}

fn free_col_of(ctx: &EvalContext, pivot_points: &[usize], p: u64) -> Option<usize> {
    let k = ctx.k;
    let fmod: Vec<Vec<u64>> = ctx
        .fint
        .iter()
        .map(|f| f.iter().map(|c| bigint_mod_u64(c, p)).collect())
        .collect();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &pi in pivot_points {
        let mut row = ctx.row_mod(ctx.points[pi], p, &fmod);
        for (r, &pc) in rows.iter().zip(&pivots) {
            if row[pc] != 0 {
                let f = row[pc];
                for (a, b) in row.iter_mut().zip(r) {
                    *a = (*a + p - mulmod(f, *b, p)) % p;
                }
            }
        }
        if let Some(pc) = row.iter().position(|&x| x != 0) {
            let inv = invmod(row[pc], p);
            for a in row.iter_mut() {
                *a = mulmod(*a, inv, p);
            }
            rows.push(row);
            pivots.push(pc);
        }
    }
    if rows.len() != k - 1 {
        return None;
    }
    (0..k).find(|c| !pivots.contains(c))
}

/// Unconditional certificate that the candidate satisfies every equation.
///
/// Write T(x) = sum_v c_v Q_v(x) with denominators cleared; deg T <= D and
/// the point set has at least D+1 distinct members, so T vanishing at every
/// point modulo a prime q (with q far above D and every |x_j|) forces
/// T = 0 modulo q coefficientwise. Checking enough primes to push the
/// modulus past twice an exactly computed coefficient bound forces T = 0
/// over the integers. True certifies the kernel membership; the structural
/// pass already pinned the kernel dimension to at most one.
fn certify(ctx: &EvalContext, cand: &[BigRational]) -> Result<bool> {
    let lcm = cand.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = cand.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let target = ctx.residual_coeff_bound(&ints) * BigInt::from(2) + BigInt::one();
    let mut acc = BigInt::one();
    let mut qs = Vec::new();
    let mut seq = PrimeSeq::new();
    while acc < target {
        let q = seq.next().unwrap();
        qs.push(q);
        acc *= BigInt::from(q);
    }
    let ok = qs.par_iter().all(|&q| {
        let fmod: Vec<Vec<u64>> = ctx
            .fint
            .iter()
            .map(|f| f.iter().map(|c| bigint_mod_u64(c, q)).collect())
            .collect();
        let cmod: Vec<u64> = ints.iter().map(|c| bigint_mod_u64(c, q)).collect();
        ctx.points.iter().all(|&x| {
            let row = ctx.row_mod(x, q, &fmod);
            let dot = row
                .iter()
                .zip(&cmod)
                .fold(0u64, |acc, (r, c)| (acc + mulmod(*r, *c, q)) % q);
            dot == 0
        })
    });
    Ok(ok)
}

const EXACT_PATH_MAX_K: usize = 48;
const EXACT_PATH_MAX_D: usize = 256;

/// Interpolate the implicit polynomial on the given support (the polygon's
/// lattice points).
pub fn interpolate(inst: &ToricInput, support: &[Vec<BigInt>]) -> Result<ImplicitPolynomial> {
    assert_common_t_monomial(support, &inst.a)?;
    let ctx = build_eval_context(inst, support)?;
    let kernel = if ctx.k <= EXACT_PATH_MAX_K && ctx.degree_bound <= EXACT_PATH_MAX_D {
        kernel_exact(&ctx)?
    } else {
        kernel_modular(&ctx)?
    };

    // Undo the integerization scaling: the solved unknowns are c_v * rho_v
    // with rho_v = prod ratio_i^{v_i}.
    let mut coeffs: Vec<BigRational> = Vec::with_capacity(ctx.k);
    for (v, c) in ctx.support.iter().zip(&kernel) {
        let mut rho = BigRational::one();
        for (r, &e) in ctx.ratio.iter().zip(v) {
            if e > 0 {
                rho *= rat_pow_u32(r, e);
            }
        }
        coeffs.push(c / rho);
    }

    // Normalize: integer, content one, lex-greatest exponent positive.
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return Err(Error::Internal("interpolation produced the zero vector".into()));
    }
    for c in &mut ints {
        *c = &*c / &g;
    }
    // support_big is sorted ascending, so scan from the top for the
    // lex-greatest surviving exponent vector.
    let top = (0..ctx.k)
        .rev()
        .find(|&i| !ints[i].is_zero())
        .ok_or_else(|| Error::Internal("interpolation produced the zero vector".into()))?;
    if ints[top].is_negative() {
        for c in &mut ints {
            *c = -std::mem::take(c);
        }
    }

    let mut terms: Vec<(Vec<BigInt>, BigInt)> = ctx
        .support_big
        .iter()
        .zip(ints)
        .filter(|(_, c)| !c.is_zero())
        .map(|(v, c)| (v.clone(), c))
        .collect();
    terms.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(ImplicitPolynomial { n: inst.n, terms })
}

// ---------------------------------------------------------------------------
// Full pipeline with orientation fallback
// ---------------------------------------------------------------------------

/// Everything the pipeline computed, for reporting.
pub struct Pipeline {
    pub pluecker: PlueckerData,
    pub valuation: ValuationMatrix,
    pub edges: EdgeMatrix,
    pub polygon: NewtonPolygon,
    pub lattice: Vec<Vec<BigInt>>,
    pub polynomial: ImplicitPolynomial,
    /// True when only the reflected orientation admitted a solution; the
    /// calibrated rule failed on this instance.
    pub orientation_flipped: bool,
}

/// Run the full implicitization pipeline: Plücker and valuation matrices,
/// polygon, lattice points, interpolation. If the calibrated orientation
/// leaves an empty solution space, retry once with the reflected polygon,
/// then fail loudly.
pub fn implicitize(inst: &ToricInput) -> Result<Pipeline> {
    let pluecker = build_pluecker(&inst.a)?;
    let basis = coprime_basis(&inst.f)?;
    let valuation = build_valuation(&inst.f, &basis)?;
    let edges = edge_matrix(&pluecker, &valuation);
    if edges.classification == Classification::NotHypersurface {
        return Err(Error::NotHypersurface);
    }
    let mut flipped = false;
    let polygon = assemble_polygon_oriented(&edges, &pluecker, false)?;
    let lattice = lattice_points(&polygon, &inst.a)?;
    match interpolate(inst, &lattice) {
        Ok(polynomial) => Ok(Pipeline {
            pluecker,
            valuation,
            edges,
            polygon,
            lattice,
            polynomial,
            orientation_flipped: flipped,
        }),
        Err(Error::NullspaceEmpty) => {
            flipped = true;
            let polygon = assemble_polygon_oriented(&edges, &pluecker, true)?;
            let lattice = lattice_points(&polygon, &inst.a)?;
            let polynomial = interpolate(inst, &lattice).map_err(|e| match e {
                Error::NullspaceEmpty => Error::Internal(
                    "interpolation found no solution in either orientation".into(),
                ),
                other => other,
            })?;
            Ok(Pipeline {
                pluecker,
                valuation,
                edges,
                polygon,
                lattice,
                polynomial,
                orientation_flipped: flipped,
            })
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Vanishing oracle
// ---------------------------------------------------------------------------

/// Outcome of the vanishing checks.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub symbolic_ok: bool,
    pub trials_run: usize,
    pub witness: Option<String>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.symbolic_ok && self.witness.is_none()
    }
}

/// Two independent checks that p vanishes on the parameterized variety:
/// symbolic substitution (expand sum c_v prod f_i^{v_i} in x, which must be
/// the zero polynomial once the common torus monomial is cancelled), and
/// exact evaluation at seeded pseudo-random rational parameter points.
pub fn verify_vanishing(
    p: &ImplicitPolynomial,
    inst: &ToricInput,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    // Symbolic: the common t-monomial cancels, leaving a univariate identity.
    let support = p.support();
    assert_common_t_monomial(&support, &inst.a)?;
    let mut total = UPoly::zero();
    for (exps, c) in &p.terms {
        let mut q = UPoly::constant(BigRational::from(c.clone()));
        for (f, e) in inst.f.iter().zip(exps) {
            let e = e.to_u32().expect("exponent fits u32") as usize;
            if e > 0 {
                q = q.mul(&f.pow(e));
            }
        }
        total = total.add(&q);
    }
    let symbolic_ok = total.is_zero();

    // Randomized: exact evaluation at rational (t, x).
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut witness = None;
    let draw_rat = |rng: &mut ChaCha20Rng| -> BigRational {
        let num = loop {
            let n = rng.gen_range(-40i64..=40);
            if n != 0 {
                break n;
            }
        };
        let den = rng.gen_range(1i64..=12);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    };
    let mut run = 0;
    for _ in 0..trials {
        // x with all f_i(x) nonzero
        let x = loop {
            let cand = draw_rat(&mut rng);
            if inst.f.iter().all(|f| !f.eval(&cand).is_zero()) {
                break cand;
            }
        };
        let t: Vec<BigRational> = (0..inst.n).map(|_| draw_rat(&mut rng)).collect();
        let u: Vec<BigRational> = (0..inst.f.len())
            .map(|i| {
                let mut m = inst.f[i].eval(&x);
                for (l, tl) in t.iter().enumerate() {
                    let e = inst.a.at(l, i).to_i64().expect("exponent fits i64");
                    if e != 0 {
                        m *= rat_pow_i64(tl, e);
                    }
                }
                m
            })
            .collect();
        let val = p.eval(&u);
        run += 1;
        if !val.is_zero() {
            witness = Some(format!(
                "p(u(t, x)) = {} at x = {}, t = ({})",
                val,
                x,
                t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            ));
            break;
        }
    }
    if !symbolic_ok {
        return Ok(VerifyReport { symbolic_ok, trials_run: run, witness });
    }
    Ok(VerifyReport { symbolic_ok, trials_run: run, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::int_vec;
    use crate::pluecker::validate_input;
    use crate::unipoly::parse_poly;

    pub fn instance(a: Vec<Vec<i64>>, f: &[&str]) -> ToricInput {
        let a = IntMatrix::from_i64_rows(&a);
        let f: Vec<UPoly> = f.iter().map(|s| parse_poly(s).unwrap()).collect();
        validate_input(a, f).unwrap()
    }

    pub fn hexagon() -> ToricInput {
        instance(
            vec![vec![2, 1, 1, 0, 0], vec![0, 1, 0, 2, 0], vec![0, 0, 1, 0, 2]],
            &["x^2+1", "x^3*(x-1)", "x*(x+1)", "(x-2)*(x^2+1)", "(x-1)^2*(x+1)"],
        )
    }

    pub fn quartic() -> ToricInput {
        instance(
            vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]],
            &["x^2*(x-1)", "x^2+1", "x*(x+1)^2", "(x-1)*(x-2)"],
        )
    }

    pub fn segment() -> ToricInput {
        instance(vec![vec![1, 1, 1]], &["1", "1", "x"])
    }

    pub fn quartic_terms() -> Vec<(Vec<i64>, i64)> {
        vec![
            (vec![6, 0, 0, 6], 8),
            (vec![5, 1, 1, 5], 52),
            (vec![5, 0, 3, 4], -28),
            (vec![4, 3, 0, 5], -48),
            (vec![4, 2, 2, 4], 58),
            (vec![4, 1, 4, 3], -82),
            (vec![4, 0, 6, 2], 25),
            (vec![3, 4, 1, 4], -1312),
            (vec![3, 3, 3, 3], -175),
            (vec![3, 2, 5, 2], 476),
            (vec![3, 1, 7, 1], -50),
            (vec![2, 6, 0, 4], 72),
            (vec![2, 5, 2, 3], -5760),
            (vec![2, 4, 4, 2], 5056),
            (vec![2, 3, 6, 1], -1194),
            (vec![2, 2, 8, 0], 25),
            (vec![1, 6, 3, 2], -4176),
            (vec![1, 5, 5, 1], -3256),
            (vec![1, 4, 7, 0], -72),
            (vec![0, 7, 4, 1], -576),
        ]
    }

    pub fn hexagon_terms() -> Vec<(Vec<i64>, i64)> {
        vec![
            (vec![0, 4, 16, 2, 0], 16),
            (vec![1, 4, 14, 2, 1], -40),
            (vec![2, 2, 14, 3, 1], 8),
            (vec![1, 6, 12, 1, 2], -16),
            (vec![2, 4, 12, 2, 2], 20),
            (vec![3, 2, 12, 3, 2], 159),
            (vec![4, 0, 12, 4, 2], 1),
            (vec![2, 6, 10, 1, 3], 54),
            (vec![3, 4, 10, 2, 3], -77),
            (vec![4, 2, 10, 3, 3], 379),
            (vec![2, 8, 8, 0, 4], 5),
            (vec![3, 6, 8, 1, 4], -27),
            (vec![4, 4, 8, 2, 4], -29),
            (vec![5, 2, 8, 3, 4], 163),
            (vec![3, 8, 6, 0, 5], -12),
            (vec![4, 6, 6, 1, 5], -35),
            (vec![5, 4, 6, 2, 5], -425),
            (vec![6, 2, 6, 3, 5], 4),
            (vec![5, 6, 4, 1, 6], 87),
            (vec![6, 4, 4, 2, 6], 717),
            (vec![6, 6, 2, 1, 7], 103),
            (vec![7, 4, 2, 2, 7], -115),
            (vec![7, 6, 0, 1, 8], 12),
            (vec![8, 4, 0, 2, 8], 4),
        ]
    }

    pub fn terms_to_poly(n: usize, terms: Vec<(Vec<i64>, i64)>) -> ImplicitPolynomial {
        let mut terms: Vec<(Vec<BigInt>, BigInt)> = terms
            .into_iter()
            .map(|(e, c)| (int_vec(&e), BigInt::from(c)))
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        ImplicitPolynomial { n, terms }
    }

    #[test]
    fn common_t_monomial_of_quartic_support() {
        let inst = quartic();
        let support: Vec<Vec<BigInt>> =
            quartic_terms().iter().map(|(e, _)| int_vec(e)).collect();
        let alpha = assert_common_t_monomial(&support, &inst.a).unwrap();
        assert_eq!(alpha, int_vec(&[18, 18]));
    }

    #[test]
    fn common_t_monomial_of_segment() {
        let inst = segment();
        let support = vec![int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])];
        assert_eq!(assert_common_t_monomial(&support, &inst.a).unwrap(), int_vec(&[1]));
    }

    #[test]
    fn interpolates_quartic_to_printed_polynomial() {
        let inst = quartic();
        let out = implicitize(&inst).unwrap();
        assert!(!out.orientation_flipped);
        let expect = terms_to_poly(2, quartic_terms());
        assert_eq!(out.polynomial, expect);
        assert_eq!(out.polynomial.degree(), BigInt::from(12));
        assert_eq!(out.polynomial.terms.len(), 20);
    }

    #[test]
    fn interpolates_hexagon_to_printed_polynomial() {
        let inst = hexagon();
        let out = implicitize(&inst).unwrap();
        assert!(!out.orientation_flipped);
        let expect = terms_to_poly(3, hexagon_terms());
        assert_eq!(out.polynomial, expect);
        assert_eq!(out.polynomial.degree(), BigInt::from(22));
        assert_eq!(out.polynomial.terms.len(), 24);
    }

    #[test]
    fn interpolates_segment_to_difference_of_coordinates() {
        let inst = segment();
        let out = implicitize(&inst).unwrap();
        let expect = terms_to_poly(1, vec![(vec![1, 0, 0], 1), (vec![0, 1, 0], -1)]);
        assert_eq!(out.polynomial, expect);
        assert_eq!(out.polynomial.to_text(), "u0 - u1");
    }

    #[test]
    fn coefficients_invariant_under_more_evaluation_points() {
        // Interpolate the quartic on the same support but after dropping
        // the first few usable points, forcing a different point set.
        let inst = quartic();
        let out = implicitize(&inst).unwrap();
        let mut ctx = build_eval_context(&inst, &out.lattice).unwrap();
        let extra: Vec<i64> = {
            let mut more = Vec::new();
            let mut m = ctx.points.iter().map(|x| x.abs()).max().unwrap() + 1;
            while more.len() < 8 {
                if ctx.fint.iter().all(|f| !eval_int(f, m).is_zero()) {
                    more.push(m);
                }
                m += 1;
            }
            more
        };
        ctx.points.drain(0..4);
        ctx.points.extend(extra);
        let kernel = kernel_exact(&ctx).unwrap();
        // Rebuild coefficients exactly as interpolate() does.
        let mut coeffs: Vec<BigRational> = Vec::new();
        for (v, c) in ctx.support.iter().zip(&kernel) {
            let mut rho = BigRational::one();
            for (r, &e) in ctx.ratio.iter().zip(v) {
                if e > 0 {
                    rho *= rat_pow_u32(r, e);
                }
            }
            coeffs.push(c / rho);
        }
        let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> =
            coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        for c in &mut ints {
            *c = &*c / &g;
        }
        let top = (0..ctx.k).rev().find(|&i| !ints[i].is_zero()).unwrap();
        if ints[top].is_negative() {
            for c in &mut ints {
                *c = -std::mem::take(c);
            }
        }
        let mut terms: Vec<(Vec<BigInt>, BigInt)> = ctx
            .support_big
            .iter()
            .zip(ints)
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (v.clone(), c))
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        assert_eq!(terms, out.polynomial.terms);
    }

    #[test]
    fn modular_path_agrees_with_exact_path() {
        let inst = hexagon();
        let out = implicitize(&inst).unwrap();
        let ctx = build_eval_context(&inst, &out.lattice).unwrap();
        let exact = kernel_exact(&ctx).unwrap();
        let modular = kernel_modular(&ctx).unwrap();
        // Both normalized kernels span the same line; compare after scaling
        // at a common nonzero coordinate.
        let i0 = exact.iter().position(|c| !c.is_zero()).unwrap();
        let scale = &modular[i0] / &exact[i0];
        for (e, m) in exact.iter().zip(&modular) {
            assert_eq!(&(e * &scale), m);
        }
    }

    #[test]
    fn verify_vanishing_accepts_computed_polynomials() {
        for inst in [quartic(), segment()] {
            let out = implicitize(&inst).unwrap();
            let rep = verify_vanishing(&out.polynomial, &inst, 30, 99).unwrap();
            assert!(rep.pass(), "witness: {:?}", rep.witness);
            assert!(rep.symbolic_ok);
            assert_eq!(rep.trials_run, 30);
        }
    }

    #[test]
    fn verify_vanishing_accepts_printed_golden_polynomials() {
        let rep = verify_vanishing(&terms_to_poly(2, quartic_terms()), &quartic(), 10, 1).unwrap();
        assert!(rep.pass());
        let rep = verify_vanishing(&terms_to_poly(3, hexagon_terms()), &hexagon(), 10, 1).unwrap();
        assert!(rep.pass());
    }

    #[test]
    fn verify_vanishing_rejects_wrong_sign() {
        let inst = segment();
        let bad = terms_to_poly(1, vec![(vec![1, 0, 0], 1), (vec![0, 1, 0], 1)]);
        let rep = verify_vanishing(&bad, &inst, 10, 7).unwrap();
        assert!(!rep.pass());
        assert!(!rep.symbolic_ok);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn polynomial_support_hull_matches_polygon() {
        for inst in [quartic(), hexagon()] {
            let out = implicitize(&inst).unwrap();
            let support: std::collections::BTreeSet<Vec<BigInt>> =
                out.polynomial.support().into_iter().collect();
            let lattice: std::collections::BTreeSet<Vec<BigInt>> =
                out.lattice.iter().cloned().collect();
            assert!(support.is_subset(&lattice));
            for v in &out.polygon.vertices {
                assert!(support.contains(v), "vertex {:?} missing from support", v);
            }
        }
    }

    #[test]
    fn text_and_json_round_trip() {
        let inst = quartic();
        let out = implicitize(&inst).unwrap();
        let j = out.polynomial.to_json();
        let back = ImplicitPolynomial::from_json(&j).unwrap();
        assert_eq!(back.terms, out.polynomial.terms);
        let text = out.polynomial.to_text();
        assert!(text.starts_with("8*u0^6*u3^6"));
        assert!(text.ends_with("576*u1^7*u2^4*u3"));
    }

    #[test]
    fn rational_reconstruction_round_trip() {
        let m: BigInt = "1000000007000000009000000021".parse().unwrap();
        for (n, d) in [(22i64, 7u64), (-5, 3), (1, 1), (-1000, 999)] {
            let num = BigInt::from(n);
            let den = BigInt::from(d);
            let inv = mod_inverse_big(&den, &m);
            let residue = (num.clone() * inv).mod_floor(&m);
            let rec = rational_reconstruct(&residue, &m).unwrap();
            assert_eq!(rec, BigRational::new(num, den));
        }
    }

    fn mod_inverse_big(a: &BigInt, m: &BigInt) -> BigInt {
        let g = a.extended_gcd(m);
        assert!(g.gcd.is_one());
        g.x.mod_floor(m)
    }
}
