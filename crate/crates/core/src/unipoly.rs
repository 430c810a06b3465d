//! Univariate polynomials over the rationals.
//!
//! Dense coefficient vectors, lowest degree first, no trailing zeros.
//! Provides expression parsing, arithmetic, monic gcd, squarefree parts,
//! gcd-free (pairwise coprime) basis extraction, multiplicity counting and
//! exact Horner evaluation. The coprime basis replaces root listing over the
//! algebraic closure: conjugate roots stay bundled inside one squarefree
//! basis element and never need to be separated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::{Error, Result};

/// Univariate polynomial with rational coefficients, lowest degree first.
/// The zero polynomial is the empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<BigRational>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        UPoly::from_coeffs(vec![c])
    }

    pub fn x() -> Self {
        UPoly::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    /// Normalizing constructor: strips trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UPoly::from_coeffs(coeffs.iter().map(|&c| BigRational::from(BigInt::from(c))).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree of the polynomial; zero for constants including the zero
    /// polynomial (callers that care test `is_zero` first).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigRational) -> UPoly {
        UPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: usize) -> UPoly {
        let mut out = UPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Euclidean division; panics on zero divisor.
    pub fn div_rem(&self, divisor: &UPoly) -> (UPoly, UPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.degree() < divisor.degree() || self.is_zero() {
            return (UPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dlead = divisor.leading_coeff();
        let ddeg = divisor.degree();
        let qdeg = self.degree() - ddeg;
        let mut quot = vec![BigRational::zero(); qdeg + 1];
        for k in (0..=qdeg).rev() {
            let c = &rem[k + ddeg] / &dlead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    let t = &rem[k + j] - &(&c * d);
                    rem[k + j] = t;
                }
            }
            quot[k] = c;
        }
        (UPoly::from_coeffs(quot), UPoly::from_coeffs(rem))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &UPoly) -> Result<UPoly> {
        let (q, r) = self.div_rem(divisor);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Internal("inexact polynomial division".into()))
        }
    }

    pub fn derivative(&self) -> UPoly {
        if self.coeffs.len() <= 1 {
            return UPoly::zero();
        }
        UPoly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * BigRational::from(BigInt::from(k as u64 + 1)))
                .collect(),
        )
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let lc = self.leading_coeff();
        self.scale(&lc.recip())
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Smallest k with a nonzero coefficient; zero for the zero polynomial.
    pub fn order_at_zero(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Scale to integer coefficients with content one and positive leading
    /// coefficient. Returns the primitive integer coefficient vector.
    pub fn primitive_int_coeffs(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        let mut out: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
        if out.last().map_or(false, |c| c.is_negative()) {
            for x in &mut out {
                *x = -std::mem::take(x);
            }
        }
        out
    }
}

impl fmt::Display for UPoly {
    /// Prints in the same grammar the parser accepts, with explicit `*`
    /// and `^`, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !abs.is_one() || k == 0;
            if show_coeff {
                if abs.denom().is_one() {
                    write!(f, "{}", abs.numer())?;
                } else {
                    write!(f, "{}/{}", abs.numer(), abs.denom())?;
                }
            }
            if k > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "x")?;
                if k > 1 {
                    write!(f, "^{}", k)?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Expression parser
//
// expr   := term (('+'|'-') term)*
// term   := factor ('*' factor)*
// factor := base ('^' uint)?
// base   := int | int '/' posint | 'x' | '(' expr ')'
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { bytes: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse_uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }

    fn parse_base(&mut self) -> Result<UPoly> {
        match self.peek() {
            Some(b'x') => {
                self.bump();
                Ok(UPoly::x())
            }
            Some(b'(') => {
                self.bump();
                let e = self.parse_expr()?;
                match self.peek() {
                    Some(b')') => {
                        self.bump();
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let neg = c == b'-';
                if neg {
                    self.bump();
                }
                let num = self.parse_uint()?;
                let num = if neg { -num } else { num };
                if self.peek() == Some(b'/') {
                    self.bump();
                    let den = self.parse_uint()?;
                    if den.is_zero() {
                        return self.err("zero denominator");
                    }
                    Ok(UPoly::constant(BigRational::new(num, den)))
                } else {
                    Ok(UPoly::constant(BigRational::from(num)))
                }
            }
            _ => self.err("expected integer, 'x' or '('"),
        }
    }

    fn parse_factor(&mut self) -> Result<UPoly> {
        // Unary minus binding to the whole factor, so printed output like
        // "-x^2" reparses.
        if self.peek() == Some(b'-') {
            let save = self.pos;
            self.bump();
            match self.peek() {
                Some(b'x') | Some(b'(') => {
                    let f = self.parse_factor()?;
                    return Ok(f.neg());
                }
                _ => self.pos = save,
            }
        }
        let base = self.parse_base()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.parse_uint()?;
            let e: usize = e
                .try_into()
                .map_err(|_| Error::Parse { pos: self.pos, msg: "exponent overflow".into() })?;
            if e > 100_000 {
                return self.err("exponent overflow");
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn parse_term(&mut self) -> Result<UPoly> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            let f = self.parse_factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn parse_expr(&mut self) -> Result<UPoly> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }
}

/// Parse a polynomial expression into its expanded canonical form.
pub fn parse_poly(text: &str) -> Result<UPoly> {
    let mut p = Parser::new(text);
    let e = p.parse_expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(Error::Parse { pos: p.pos, msg: "unexpected trailing input".into() });
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Gcd, squarefree parts, coprime basis
// ---------------------------------------------------------------------------

/// Monic gcd by the Euclidean algorithm; `gcd(f, 0) = monic f`.
pub fn poly_gcd(f: &UPoly, g: &UPoly) -> Result<UPoly> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::InvalidInput("gcd of two zero polynomials".into()));
    }
    let mut a = f.clone();
    let mut b = g.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    Ok(a.monic())
}

/// Monic product of the distinct irreducible factors of `f`: `f / gcd(f, f')`.
pub fn squarefree_part(f: &UPoly) -> Result<UPoly> {
    if f.is_zero() {
        return Err(Error::InvalidInput("squarefree part of zero polynomial".into()));
    }
    if f.is_constant() {
        return Ok(UPoly::one());
    }
    let g = poly_gcd(f, &f.derivative())?;
    Ok(f.div_exact(&g)?.monic())
}

/// Largest e with `g^e` dividing `f` exactly.
pub fn multiplicity(f: &UPoly, g: &UPoly) -> Result<usize> {
    if g.is_constant() {
        return Err(Error::InvalidInput("multiplicity with constant divisor".into()));
    }
    if f.is_zero() {
        return Err(Error::InvalidInput("multiplicity in zero polynomial".into()));
    }
    let mut e = 0;
    let mut cur = f.clone();
    loop {
        let (q, r) = cur.div_rem(g);
        if !r.is_zero() {
            return Ok(e);
        }
        e += 1;
        cur = q;
    }
}

/// Gcd-free basis of a family of polynomials.
///
/// `basis` is an ordered list of monic, squarefree, pairwise coprime,
/// non-constant polynomials; `exponents[i][j]` is the multiplicity of
/// `basis[j]` in the i-th input, and `leading[i]` its leading coefficient,
/// so that `f_i = leading[i] * prod_j basis[j]^exponents[i][j]` exactly.
#[derive(Clone, Debug)]
pub struct CoprimeBasis {
    pub basis: Vec<UPoly>,
    pub leading: Vec<BigRational>,
    pub exponents: Vec<Vec<usize>>,
}

/// Canonical order for basis elements: ascending degree, then lexicographic
/// on the coefficient sequence (lowest degree first).
fn basis_cmp(a: &UPoly, b: &UPoly) -> std::cmp::Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        for k in 0..=a.degree().max(b.degree()) {
            let c = a.coeff(k).cmp(&b.coeff(k));
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Compute a pairwise-coprime squarefree basis refining the squarefree parts
/// of all inputs, with exact exponent vectors.
///
/// Seed with the distinct-power chain of every input (repeatedly divide by
/// the radical: level m collects the roots of multiplicity >= m), then
/// repeatedly split any two non-coprime elements p, q into
/// {gcd, p/gcd, q/gcd} and drop constants. Total degree strictly decreases
/// at each split, so this terminates. Seeding with the full chains, not just
/// the radicals, is what makes every root of a basis element carry one
/// uniform multiplicity per input.
pub fn coprime_basis(fs: &[UPoly]) -> Result<CoprimeBasis> {
    for f in fs {
        if f.is_zero() {
            return Err(Error::InvalidInput("zero polynomial in coprime basis input".into()));
        }
    }
    let mut elems: Vec<UPoly> = Vec::new();
    for f in fs {
        let mut rest = f.monic();
        while !rest.is_constant() {
            let h = squarefree_part(&rest)?;
            elems.push(h.clone());
            rest = rest.div_exact(&h)?.monic();
        }
    }
    elems.sort_by(basis_cmp);
    elems.dedup();

    'refine: loop {
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                let g = poly_gcd(&elems[i], &elems[j])?;
                if g.is_constant() {
                    continue;
                }
                let p = elems[i].div_exact(&g)?.monic();
                let q = elems[j].div_exact(&g)?.monic();
                let keep_j = elems.remove(j);
                let keep_i = elems.remove(i);
                debug_assert_eq!(keep_i.monic(), keep_i);
                debug_assert_eq!(keep_j.monic(), keep_j);
                for piece in [g, p, q] {
                    if !piece.is_constant() {
                        elems.push(piece);
                    }
                }
                elems.sort_by(basis_cmp);
                elems.dedup();
                continue 'refine;
            }
        }
        break;
    }

    let mut exponents = Vec::with_capacity(fs.len());
    let mut leading = Vec::with_capacity(fs.len());
    for f in fs {
        let mut row = Vec::with_capacity(elems.len());
        let mut rest = f.clone();
        for g in &elems {
            let e = multiplicity(&rest, g)?;
            for _ in 0..e {
                rest = rest.div_exact(g)?;
            }
            row.push(e);
        }
        if !rest.is_constant() {
            return Err(Error::Internal("coprime basis does not exhaust input factors".into()));
        }
        leading.push(rest.coeff(0));
        exponents.push(row);
    }
    Ok(CoprimeBasis { basis: elems, leading, exponents })
}

impl CoprimeBasis {
    /// Multiply the factorization of input `i` back together.
    pub fn reconstruct(&self, i: usize) -> UPoly {
        let mut acc = UPoly::constant(self.leading[i].clone());
        for (g, &e) in self.basis.iter().zip(&self.exponents[i]) {
            if e > 0 {
                acc = acc.mul(&g.pow(e));
            }
        }
        acc
    }
}
