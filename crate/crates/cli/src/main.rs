//! Command-line front end.
//!
//! Subcommands: `newton`, `implicitize`, `degree`, `verify`, `gen`.
//! Exit codes: 0 success, 1 input error, 2 not a hypersurface,
//! 3 internal inconsistency, 4 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use almost_toric::degree::{degree_from_polygon, degree_ps, degree_tropical, ps_context};
use almost_toric::implicitize::{implicitize, verify_vanishing, ImplicitPolynomial};
use almost_toric::instance::{generate_instance, GenParams, InstanceFile};
use almost_toric::pluecker::ToricInput;
use almost_toric::Error;

#[derive(Parser)]
#[command(name = "atoric", about = "Exact implicitization of almost-toric hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Polygon,
    Tropical,
    Ps,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute and print the Newton polygon of the instance.
    Newton {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the full pipeline and print the implicit polynomial.
    Implicitize {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compute the degree by one or all of the three methods.
    Degree {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Implicitize, then run the vanishing oracle on the result (or on a
    /// supplied polynomial).
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Verify this polynomial JSON file instead of the computed one.
        #[arg(long)]
        polynomial: Option<PathBuf>,
    },
    /// Generate a random instance file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Parse { .. } => 1,
        Error::NotHypersurface => 2,
        Error::NullspaceEmpty | Error::Internal(_) => 3,
        Error::VerificationFailed(_) => 4,
    }
}

fn load_instance(path: &PathBuf) -> Result<ToricInput, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {}", path.display(), e)))?;
    InstanceFile::from_json_str(&text)?.validate()
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Newton { file, format } => {
            let inst = load_instance(&file)?;
            let out = implicitize_polygon_only(&inst)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.1).unwrap()),
                Format::Text => {
                    let (poly, report) = out;
                    println!("classification: {}", report.classification);
                    println!("vertices ({}):", poly.vertices.len());
                    for v in &poly.vertices {
                        println!("  {}", fmt_vec(v));
                    }
                    println!("directed edges:");
                    for e in &poly.edges {
                        println!("  {}", fmt_vec(e));
                    }
                    println!("lattice points: {}", report.lattice_points.len());
                }
            }
            Ok(())
        }
        Cmd::Implicitize { file, format } => {
            let inst = load_instance(&file)?;
            let started = Instant::now();
            let out = implicitize(&inst)?;
            let elapsed = started.elapsed();
            match format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "polynomial": out.polynomial.to_json(),
                        "degree": out.polynomial.degree().to_string(),
                        "terms": out.polynomial.terms.len(),
                        "newton_polygon": out.polygon.report(&out.lattice),
                        "orientation_flipped": out.orientation_flipped,
                        "wall_time_ms": elapsed.as_millis() as u64,
                    });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                Format::Text => {
                    println!("{}", out.polynomial.to_text());
                    println!("degree: {}", out.polynomial.degree());
                    println!("terms: {}", out.polynomial.terms.len());
                    println!("wall time: {:.3?}", elapsed);
                }
            }
            Ok(())
        }
        Cmd::Degree { file, method, seed } => {
            let inst = load_instance(&file)?;
            let plu = almost_toric::pluecker::build_pluecker(&inst.a)?;
            let basis = almost_toric::unipoly::coprime_basis(&inst.f)?;
            let val = almost_toric::valuation::build_valuation(&inst.f, &basis)?;
            let em = almost_toric::polygon::edge_matrix(&plu, &val);
            if em.classification == almost_toric::polygon::Classification::NotHypersurface {
                return Err(Error::NotHypersurface);
            }
            let poly_deg = || -> Result<_, Error> {
                let poly = almost_toric::polygon::assemble_polygon(&em, &plu)?;
                degree_from_polygon(&poly)
            };
            match method {
                Method::Polygon => println!("polygon: {}", poly_deg()?),
                Method::Tropical => {
                    println!("tropical: {}", degree_tropical(&plu, &val, seed)?)
                }
                Method::Ps => {
                    let ctx = ps_context(&plu)?;
                    let ps = degree_ps(&inst.a, &val, &ctx, &plu.delta, seed)?;
                    println!("philippon-sombra: {}", ps.total);
                    if !ps.nongeneric_columns.is_empty() {
                        eprintln!(
                            "warning: columns {:?} lie on cone boundaries; evaluated by perturbation",
                            ps.nongeneric_columns
                        );
                    }
                }
                Method::All => {
                    let d1 = poly_deg()?;
                    let d2 = degree_tropical(&plu, &val, seed)?;
                    let ctx = ps_context(&plu)?;
                    let ps = degree_ps(&inst.a, &val, &ctx, &plu.delta, seed)?;
                    if !ps.nongeneric_columns.is_empty() {
                        eprintln!(
                            "warning: columns {:?} lie on cone boundaries; evaluated by perturbation",
                            ps.nongeneric_columns
                        );
                    }
                    let agree = d1 == d2 && d2 == ps.total;
                    println!(
                        "{} {} {} {}",
                        d1,
                        d2,
                        ps.total,
                        if agree { "agree" } else { "DISAGREE" }
                    );
                    if !agree {
                        return Err(Error::Internal("degree methods disagree".into()));
                    }
                }
            }
            Ok(())
        }
        Cmd::Verify { file, trials, seed, polynomial } => {
            let inst = load_instance(&file)?;
            let poly = match polynomial {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| {
                        Error::InvalidInput(format!("cannot read {}: {}", p.display(), e))
                    })?;
                    let v: serde_json::Value = serde_json::from_str(&text)
                        .map_err(|e| Error::InvalidInput(format!("bad polynomial JSON: {}", e)))?;
                    ImplicitPolynomial::from_json(&v)?
                }
                None => implicitize(&inst)?.polynomial,
            };
            let report = verify_vanishing(&poly, &inst, trials, seed)?;
            if report.pass() {
                println!("verify: pass (symbolic + {} random points)", report.trials_run);
                Ok(())
            } else {
                println!("verify: FAIL");
                if !report.symbolic_ok {
                    println!("  symbolic residual is nonzero");
                }
                if let Some(w) = &report.witness {
                    println!("  witness: {}", w);
                }
                Err(Error::VerificationFailed("vanishing oracle rejected".into()))
            }
        }
        Cmd::Gen { n, d, k, seed, out } => {
            let inst = generate_instance(GenParams { n, d, k, seed })?;
            let text = inst.to_json_string();
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| {
                    Error::InvalidInput(format!("cannot write {}: {}", path.display(), e))
                })?,
                None => print!("{}", text),
            }
            Ok(())
        }
    }
}

/// Newton polygon plus serializable report. The verification failure path in
/// `verify` also needs the common-monomial checks, so keep this thin.
fn implicitize_polygon_only(
    inst: &ToricInput,
) -> Result<(almost_toric::polygon::NewtonPolygon, almost_toric::polygon::PolygonReport), Error> {
    let plu = almost_toric::pluecker::build_pluecker(&inst.a)?;
    let basis = almost_toric::unipoly::coprime_basis(&inst.f)?;
    let val = almost_toric::valuation::build_valuation(&inst.f, &basis)?;
    let em = almost_toric::polygon::edge_matrix(&plu, &val);
    let poly = almost_toric::polygon::assemble_polygon(&em, &plu)?;
    let lattice = almost_toric::polygon::lattice_points(&poly, &inst.a)?;
    let report = poly.report(&lattice);
    Ok((poly, report))
}

fn fmt_vec(v: &[almost_toric::IntScalar]) -> String {
    let coords: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", coords.join(", "))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match e {
                Error::NotHypersurface => println!("not a hypersurface"),
                ref other => eprintln!("error: {}", other),
            }
            ExitCode::from(exit_code_for(&e))
        }
    }
}
