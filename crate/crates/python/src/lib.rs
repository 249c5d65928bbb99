//! Python module `minsurf`: thin wrappers over the Rust library. Points are
//! returned as `(x, y, z)` tuples and complex numbers as `(re, im)`.

use minsurf::classical::{self, RiemannParams};
use minsurf::curve::{self, CurveParams, HomologyLoop, LoopKind};
use minsurf::mesh::{self, DomainMap, TriMesh};
use minsurf::registration;
use minsurf::shiffkdv::{self, Jet};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

pub type Mesh = (Vec<(f64, f64, f64)>, Vec<(u32, u32, u32)>);

fn mesh_tuple(m: &TriMesh) -> Mesh {
    (m.vertices.iter().map(|v| (v[0], v[1], v[2])).collect(), m.faces.iter().map(|f| (f[0], f[1], f[2])).collect())
}

#[pyfunction]
pub fn sigma_of_lambda(lam: f64) -> f64 {
    classical::sigma_of_lambda(lam)
}

#[pyfunction]
pub fn lambda_of_sigma(sigma: f64) -> f64 {
    classical::lambda_of_sigma(sigma)
}

#[pyfunction]
pub fn q_min(lam: f64) -> f64 {
    classical::q_min(lam)
}

/// Point of `R_λ` on the circle of squared radius `q` at angle `v`.
#[pyfunction]
pub fn classical_point(lam: f64, q: f64, v: f64) -> PyResult<(f64, f64, f64)> {
    let p = RiemannParams::new(lam).map_err(err)?;
    let x = classical::parameterize(&p, q, v).map_err(err)?;
    Ok((x[0], x[1], x[2]))
}

/// Flux of the loop `"gamma1"`, `"gamma2"` or `"end"` on `M_σ`.
#[pyfunction]
pub fn flux(sigma: f64, loop_kind: &str) -> PyResult<(f64, f64, f64)> {
    let kind = match loop_kind {
        "gamma1" => LoopKind::Gamma1,
        "gamma2" => LoopKind::Gamma2,
        "end" => LoopKind::EndLoop,
        other => return Err(PyValueError::new_err(format!("unknown loop {other:?}"))),
    };
    let p = CurveParams::new(sigma).map_err(err)?;
    let lp = HomologyLoop::new(&p, kind).map_err(err)?;
    let f = curve::flux(&p, &lp).map_err(err)?;
    Ok((f[0], f[1], f[2]))
}

/// Largest |Shiffman function| over `count` seeded random points of `M_σ`.
#[pyfunction]
#[pyo3(signature = (sigma, seed = 7, count = 1000))]
pub fn shiffman_max(sigma: f64, seed: u64, count: usize) -> PyResult<f64> {
    let p = CurveParams::new(sigma).map_err(err)?;
    let mut worst = 0.0f64;
    for q in curve::sample_points(&p, seed, count) {
        worst = worst.max(shiffkdv::shiffman(&Jet::gauss_on_curve(&p, &q, 2)).map_err(err)?.abs());
    }
    Ok(worst)
}

/// Canonical text of `P_0, …, P_n`.
#[pyfunction]
pub fn hierarchy(n: usize) -> PyResult<Vec<String>> {
    Ok(shiffkdv::hierarchy_up_to(n).map_err(err)?.iter().map(|p| p.to_string()).collect())
}

/// `(vertices, faces)` of the fundamental piece on an `nr × nt` grid.
#[pyfunction]
#[pyo3(signature = (sigma, e = 0.1, nr = 40, nt = 60))]
pub fn fundamental_piece(sigma: f64, e: f64, nr: usize, nt: usize) -> PyResult<Mesh> {
    let map = DomainMap::new(sigma, e).map_err(err)?;
    Ok(mesh_tuple(&mesh::sample_fundamental(&map, nr, nt).map_err(err)?))
}

/// `(vertices, faces)` of the piece extended by reflections and `copies` translates.
#[pyfunction]
#[pyo3(signature = (sigma, e = 0.1, nr = 40, nt = 60, copies = 1))]
pub fn extended_surface(sigma: f64, e: f64, nr: usize, nt: usize, copies: usize) -> PyResult<Mesh> {
    let map = DomainMap::new(sigma, e).map_err(err)?;
    let piece = mesh::sample_fundamental(&map, nr, nt).map_err(err)?;
    let ops = mesh::extension_ops(sigma).map_err(err)?;
    Ok(mesh_tuple(&mesh::extend(&piece, &ops, copies)))
}

/// `{"c": ..., "t0": ...}` of the fundamental piece.
#[pyfunction]
pub fn fundamental_constants(sigma: f64) -> PyResult<BTreeMap<String, (f64, f64, f64)>> {
    let k = mesh::fundamental_constants(sigma).map_err(err)?;
    let t = |v: [f64; 3]| (v[0], v[1], v[2]);
    Ok(BTreeMap::from([("c".to_string(), t(k.c)), ("t0".to_string(), t(k.t0))]))
}

/// Scale and worst relative mismatch between `R_λ` and `M_σ(λ)`.
#[pyfunction]
#[pyo3(signature = (lam, taus = vec![0.0, 0.15, 0.3, 0.45, 0.6]))]
pub fn register(lam: f64, taus: Vec<f64>) -> PyResult<BTreeMap<String, f64>> {
    let r = registration::register(lam, &taus, 400).map_err(err)?;
    Ok(BTreeMap::from([
        ("sigma".to_string(), r.sigma),
        ("scale".to_string(), r.scale),
        ("max_relative_error".to_string(), r.max_relative_error),
    ]))
}

#[pymodule]
#[pyo3(name = "minsurf")]
fn minsurf_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sigma_of_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_of_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(q_min, m)?)?;
    m.add_function(wrap_pyfunction!(classical_point, m)?)?;
    m.add_function(wrap_pyfunction!(flux, m)?)?;
    m.add_function(wrap_pyfunction!(shiffman_max, m)?)?;
    m.add_function(wrap_pyfunction!(hierarchy, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental_piece, m)?)?;
    m.add_function(wrap_pyfunction!(extended_surface, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental_constants, m)?)?;
    m.add_function(wrap_pyfunction!(register, m)?)?;
    Ok(())
}
