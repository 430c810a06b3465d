//! Python bindings: thin wrappers over the core pipeline. Structured results
//! cross the boundary as JSON strings with big integers encoded as decimal
//! strings, so nothing is clipped to machine precision.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use almost_toric::degree::{degree_from_polygon, degree_ps, degree_tropical, ps_context};
use almost_toric::implicitize::{implicitize, verify_vanishing};
use almost_toric::instance::{generate_instance, GenParams, InstanceFile};
use almost_toric::pluecker::ToricInput;
use almost_toric::polygon::Classification;
use almost_toric::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Parse { .. } | Error::NotHypersurface => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn load(instance_json: &str) -> PyResult<ToricInput> {
    InstanceFile::from_json_str(instance_json)
        .and_then(|f| f.validate())
        .map_err(to_py_err)
}

/// Classify the instance and return the Newton polygon report as JSON.
#[pyfunction]
fn newton(instance_json: &str) -> PyResult<String> {
    let inst = load(instance_json)?;
    let plu = almost_toric::pluecker::build_pluecker(&inst.a).map_err(to_py_err)?;
    let basis = almost_toric::unipoly::coprime_basis(&inst.f).map_err(to_py_err)?;
    let val = almost_toric::valuation::build_valuation(&inst.f, &basis).map_err(to_py_err)?;
    let em = almost_toric::polygon::edge_matrix(&plu, &val);
    if em.classification == Classification::NotHypersurface {
        let doc = serde_json::json!({
            "classification": "not_hypersurface",
            "vertices": [], "edges": [], "lattice_points": [],
        });
        return Ok(doc.to_string());
    }
    let poly = almost_toric::polygon::assemble_polygon(&em, &plu).map_err(to_py_err)?;
    let lattice = almost_toric::polygon::lattice_points(&poly, &inst.a).map_err(to_py_err)?;
    serde_json::to_string(&poly.report(&lattice))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Run the full pipeline; returns polynomial, degree, term count and the
/// polygon as JSON. Raises ValueError when the instance is not a
/// hypersurface.
#[pyfunction]
fn implicitize_instance(instance_json: &str) -> PyResult<String> {
    let inst = load(instance_json)?;
    let out = implicitize(&inst).map_err(to_py_err)?;
    let doc = serde_json::json!({
        "polynomial": out.polynomial.to_json(),
        "polynomial_text": out.polynomial.to_text(),
        "degree": out.polynomial.degree().to_string(),
        "terms": out.polynomial.terms.len(),
        "newton_polygon": out.polygon.report(&out.lattice),
        "orientation_flipped": out.orientation_flipped,
    });
    Ok(doc.to_string())
}

/// The three degree computations; returns a JSON object with one decimal
/// string per method and an agreement flag.
#[pyfunction]
#[pyo3(signature = (instance_json, seed = 0))]
fn degrees(instance_json: &str, seed: u64) -> PyResult<String> {
    let inst = load(instance_json)?;
    let plu = almost_toric::pluecker::build_pluecker(&inst.a).map_err(to_py_err)?;
    let basis = almost_toric::unipoly::coprime_basis(&inst.f).map_err(to_py_err)?;
    let val = almost_toric::valuation::build_valuation(&inst.f, &basis).map_err(to_py_err)?;
    let em = almost_toric::polygon::edge_matrix(&plu, &val);
    if em.classification == Classification::NotHypersurface {
        return Err(PyValueError::new_err("not a hypersurface"));
    }
    let poly = almost_toric::polygon::assemble_polygon(&em, &plu).map_err(to_py_err)?;
    let d1 = degree_from_polygon(&poly).map_err(to_py_err)?;
    let d2 = degree_tropical(&plu, &val, seed).map_err(to_py_err)?;
    let ctx = ps_context(&plu).map_err(to_py_err)?;
    let ps = degree_ps(&inst.a, &val, &ctx, &plu.delta, seed).map_err(to_py_err)?;
    let doc = serde_json::json!({
        "polygon": d1.to_string(),
        "tropical": d2.to_string(),
        "philippon_sombra": ps.total.to_string(),
        "agree": d1 == d2 && d2 == ps.total,
    });
    Ok(doc.to_string())
}

/// Implicitize and run the vanishing oracle; True when both the symbolic
/// and the randomized checks pass.
#[pyfunction]
#[pyo3(signature = (instance_json, trials = 100, seed = 0))]
fn verify(instance_json: &str, trials: usize, seed: u64) -> PyResult<bool> {
    let inst = load(instance_json)?;
    let out = implicitize(&inst).map_err(to_py_err)?;
    let report = verify_vanishing(&out.polynomial, &inst, trials, seed).map_err(to_py_err)?;
    Ok(report.pass())
}

/// Generate a deterministic random instance; returns the instance JSON.
#[pyfunction]
#[pyo3(signature = (n, d, k, seed = 0))]
fn generate(n: usize, d: usize, k: usize, seed: u64) -> PyResult<String> {
    generate_instance(GenParams { n, d, k, seed })
        .map(|f| f.to_json_string())
        .map_err(to_py_err)
}

#[pymodule]
fn almost_toric_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(newton, m)?)?;
    m.add_function(wrap_pyfunction!(implicitize_instance, m)?)?;
    m.add_function(wrap_pyfunction!(degrees, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
