//! Instance files and random instance generation.
//!
//! An instance file is a JSON document with the exponent matrix as rows of
//! integers and the polynomials as expression strings:
//!
//! ```json
//! { "A": [[3,2,1,0],[0,1,2,3]], "f": ["x^2*(x-1)", "x^2+1", ...] }
//! ```
//!
//! Matrix entries are written as JSON numbers when they fit 53 bits and as
//! decimal strings otherwise; the reader accepts both.
//!
//! Random instances follow the benchmark recipe: n+2 distinct degree-d
//! monomials in n variables for the columns of A (all columns automatically
//! sum to d), and f_i of the form (x-2)^a (x-1)^b x^c (x+1)^d (x+2)^e with
//! exponents uniform in 0..=k. Rank-deficient draws of A are rejected and
//! resampled. Everything is deterministic given the seed.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::exactmath::{rank_int, IntMatrix};
use crate::pluecker::{validate_input, ToricInput};
use crate::unipoly::{parse_poly, UPoly};
use crate::{Error, Result};

/// Parsed-but-unvalidated instance file contents.
#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub a: Vec<Vec<BigInt>>,
    pub f: Vec<String>,
}

impl InstanceFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("bad instance JSON: {}", e)))?;
        let a_rows = v
            .get("A")
            .and_then(|a| a.as_array())
            .ok_or_else(|| Error::InvalidInput("instance lacks matrix \"A\"".into()))?;
        let mut a = Vec::with_capacity(a_rows.len());
        for row in a_rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::InvalidInput("matrix row is not an array".into()))?;
            let mut out = Vec::with_capacity(row.len());
            for x in row {
                let v = match x {
                    Value::Number(n) => n
                        .as_i64()
                        .map(BigInt::from)
                        .ok_or_else(|| Error::InvalidInput("non-integer matrix entry".into()))?,
                    Value::String(s) => s
                        .parse::<BigInt>()
                        .map_err(|_| Error::InvalidInput("bad matrix entry string".into()))?,
                    _ => return Err(Error::InvalidInput("bad matrix entry".into())),
                };
                out.push(v);
            }
            a.push(out);
        }
        let f = v
            .get("f")
            .and_then(|f| f.as_array())
            .ok_or_else(|| Error::InvalidInput("instance lacks polynomial list \"f\"".into()))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| Error::InvalidInput("polynomial entry is not a string".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InstanceFile { a, f })
    }

    pub fn to_json_string(&self) -> String {
        let enc_entry = |x: &BigInt| -> Value {
            match x.to_i64() {
                Some(v) if v.unsigned_abs() < (1u64 << 53) => json!(v),
                _ => json!(x.to_string()),
            }
        };
        let a: Vec<Vec<Value>> =
            self.a.iter().map(|row| row.iter().map(enc_entry).collect()).collect();
        let doc = json!({ "A": a, "f": self.f });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    /// Parse the polynomials and validate the instance.
    pub fn validate(&self) -> Result<ToricInput> {
        if self.a.is_empty() {
            return Err(Error::InvalidInput("matrix A has no rows".into()));
        }
        let cols = self.a[0].len();
        if self.a.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        let a = IntMatrix::from_rows(self.a.clone());
        let f: Vec<UPoly> =
            self.f.iter().map(|s| parse_poly(s)).collect::<Result<Vec<_>>>()?;
        validate_input(a, f)
    }
}

/// Parameters of the random-instance recipe.
#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub seed: u64,
}

/// All exponent vectors in n nonnegative variables summing to d,
/// lexicographically ordered.
fn monomials(n: usize, d: usize) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n - 1, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d as u32, &mut Vec::new(), &mut out);
    out
}

const GEN_RANK_RETRIES: usize = 1000;

/// Generate a deterministic random instance.
pub fn generate_instance(params: GenParams) -> Result<InstanceFile> {
    let GenParams { n, d, k, seed } = params;
    if n < 1 || d < 1 {
        return Err(Error::InvalidInput("need n >= 1 and d >= 1".into()));
    }
    let pool = monomials(n, d);
    let need = n + 2;
    // For n = 1 the pool is the single monomial x^d; every valid A repeats
    // it, so sampling without replacement is impossible and the unique
    // full-rank choice is taken directly. For n >= 2 an undersized pool is
    // a parameter error.
    if pool.len() < need && n > 1 {
        return Err(Error::InvalidInput(format!(
            "impossible parameters: need {} distinct degree-{} monomials in {} variables, only {} exist",
            need, d, n, pool.len()
        )));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = if n == 1 {
        IntMatrix::from_rows(vec![vec![BigInt::from(d as u64); 3]])
    } else {
        let mut attempt = 0;
        loop {
            // Partial Fisher-Yates draw of `need` distinct indices.
            let mut idx: Vec<usize> = (0..pool.len()).collect();
            for i in 0..need {
                let j = rng.gen_range(i..idx.len());
                idx.swap(i, j);
            }
            let cols: Vec<&Vec<u32>> = idx[..need].iter().map(|&i| &pool[i]).collect();
            let rows: Vec<Vec<BigInt>> = (0..n)
                .map(|r| cols.iter().map(|c| BigInt::from(c[r])).collect())
                .collect();
            let a = IntMatrix::from_rows(rows);
            if rank_int(&a) == n {
                break a;
            }
            attempt += 1;
            if attempt >= GEN_RANK_RETRIES {
                return Err(Error::InvalidInput(
                    "could not draw a full-rank exponent matrix".into(),
                ));
            }
        }
    };

    let factors = ["(x-2)", "(x-1)", "x", "(x+1)", "(x+2)"];
    let f: Vec<String> = (0..a.cols)
        .map(|_| {
            let exps: Vec<usize> = (0..5).map(|_| rng.gen_range(0..=k)).collect();
            let mut parts = Vec::new();
            for (fac, &e) in factors.iter().zip(&exps) {
                match e {
                    0 => {}
                    1 => parts.push((*fac).to_string()),
                    _ => parts.push(format!("{}^{}", fac, e)),
                }
            }
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        })
        .collect();

    let rows: Vec<Vec<BigInt>> = (0..a.rows).map(|i| a.row(i).to_vec()).collect();
    Ok(InstanceFile { a: rows, f })
}
