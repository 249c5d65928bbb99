//! Measurements behind `verify`. Each returns the raw quantity; thresholds
//! are applied by the caller.

use crate::error::CliError;
use minsurf::classical::{self, FoliationData, RiemannParams};
use minsurf::curve::{self, CurveParams, HomologyLoop, LoopKind, Symmetry, C};
use minsurf::fd;
use minsurf::mesh::{self, chord_integral, DomainMap, LevelFit, TriMesh};
use minsurf::quad::QuadSettings;
use minsurf::registration::{self, Registration};
use minsurf::shiffkdv::{shiffman, Jet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;

/// Default thresholds, overridable by `--tol name=value`.
pub const DEFAULT_THRESHOLDS: &[(&str, f64)] = &[
    ("period_closure", 1e-7),
    ("symmetry", 1e-9),
    ("shiffman", 1e-9),
    ("circle_fit", 1e-5),
    ("line_slices", 0.0),
    ("registration", 1e-3),
    ("enneper", 1e-4),
    ("minimality", 1e-3),
    ("conformality", 1e-5),
    ("catenoid", 1e-8),
];

pub fn default_threshold(name: &str) -> Option<f64> {
    DEFAULT_THRESHOLDS.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
}

/// Relative level heights used for registration.
pub const REGISTRATION_TAUS: [f64; 5] = [0.0, 0.15, 0.3, 0.45, 0.6];

/// Largest of the real periods of `γ₁`, the `x₂` real period of `γ₂` and the
/// flux of the doubled end loop.
pub fn period_closure(sigma: f64) -> Result<f64, CliError> {
    let p = CurveParams::new(sigma)?;
    let g1 = HomologyLoop::new(&p, LoopKind::Gamma1)?;
    let g2 = HomologyLoop::new(&p, LoopKind::Gamma2)?;
    let end = HomologyLoop::new(&p, LoopKind::EndLoop)?;
    let p1 = curve::period(&p, &g1)?;
    let p2 = curve::period(&p, &g2)?;
    let fe = curve::flux(&p, &end)?;
    let mut worst = p2[1].re.abs();
    for v in p1 {
        worst = worst.max(v.re.abs());
    }
    for v in fe {
        worst = worst.max(v.abs());
    }
    Ok(worst)
}

pub fn symmetry_residual(sigma: f64, seed: u64, count: usize) -> Result<f64, CliError> {
    let p = CurveParams::new(sigma)?;
    let pts = curve::sample_points(&p, seed, count);
    let mut worst = 0.0f64;
    for s in [Symmetry::S1, Symmetry::S2, Symmetry::S3] {
        worst = worst.max(curve::verify_symmetry_action(&p, s, &pts)?);
    }
    Ok(worst)
}

pub fn shiffman_max(sigma: f64, seed: u64, count: usize) -> Result<f64, CliError> {
    let p = CurveParams::new(sigma)?;
    let mut worst = 0.0f64;
    for q in curve::sample_points(&p, seed, count) {
        worst = worst.max(shiffman(&Jet::gauss_on_curve(&p, &q, 2))?.abs());
    }
    Ok(worst)
}

/// The extended surface used for slicing.
pub fn extended_mesh(sigma: f64, e: f64, grid: (usize, usize), copies: usize) -> Result<TriMesh, CliError> {
    let piece = mesh::sample_fundamental(&DomainMap::new(sigma, e)?, grid.0, grid.1)?;
    Ok(mesh::extend(&piece, &mesh::extension_ops(sigma)?, copies))
}

/// Slice heights of an extended mesh: ten generic ones spread over its height
/// range, and the heights `0` and `2c₃` of the straight lines.
pub fn slice_heights(sigma: f64, copies: usize) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let c3 = mesh::fundamental_constants(sigma)?.c[2];
    let (lo, hi) = (-2.0 * c3, (2.0 + 4.0 * copies as f64) * c3);
    // The offset 0.37 keeps every generic height away from multiples of c₃.
    let generic = (0..10).map(|k| lo + (k as f64 + 0.37) / 10.0 * (hi - lo)).collect();
    Ok((generic, vec![0.0, 2.0 * c3]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceSummary {
    /// Largest circle-fit residual divided by the radius over generic heights.
    pub max_relative_residual: f64,
    /// Generic heights whose slice was not a circle.
    pub generic_not_circles: usize,
    /// Line heights whose slice was not classified as a line.
    pub lines_missed: usize,
}

pub fn slice_summary(m: &TriMesh, generic: &[f64], lines: &[f64]) -> Result<SliceSummary, CliError> {
    let mut out = SliceSummary { max_relative_residual: 0.0, generic_not_circles: 0, lines_missed: 0 };
    for &h in generic {
        let pts = mesh::slice(m, h)?;
        match mesh::level_circle_fit(&pts, 1e-9 * (1.0 + h.abs()))? {
            LevelFit::Circle { radius, residual, .. } => {
                out.max_relative_residual = out.max_relative_residual.max(residual / radius);
            }
            LevelFit::Line { .. } => out.generic_not_circles += 1,
        }
    }
    for &h in lines {
        let pts = mesh::slice(m, h)?;
        let is_line = matches!(mesh::level_circle_fit(&pts, 1e-9 * (1.0 + h.abs())), Ok(LevelFit::Line { .. }));
        if !is_line {
            out.lines_missed += 1;
        }
    }
    Ok(out)
}

pub fn registration(lambda: f64) -> Result<Registration, CliError> {
    Ok(registration::register(lambda, &REGISTRATION_TAUS, 400)?)
}

/// A random circle foliation with radius and curvature bounded away from 0.
pub fn random_foliation(rng: &mut ChaCha8Rng) -> FoliationData {
    let mut u = |a: f64, b: f64| rng.random_range(a..b);
    FoliationData {
        r: u(0.5, 1.5),
        r1: u(-0.5, 0.5),
        r2: u(-0.5, 0.5),
        kappa: u(0.3, 1.5),
        kappa1: u(-0.5, 0.5),
        tau: u(-0.5, 0.5),
        alpha: u(-1.0, 1.0),
        beta: u(-1.0, 1.0),
        delta: u(-1.0, 1.0),
        alpha1: u(-0.5, 0.5),
        beta1: u(-0.5, 0.5),
        delta1: u(-0.5, 0.5),
    }
}

/// Largest gap between the closed-form and the sampled Fourier coefficients
/// over `count` random foliations and the canonical one.
pub fn enneper_residual(seed: u64, count: usize) -> Result<f64, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = classical::enneper_fourier_check(&FoliationData::canonical())?;
    for _ in 0..count {
        worst = worst.max(classical::enneper_fourier_check(&random_foliation(&mut rng))?);
    }
    Ok(worst)
}

/// Max finite-difference mean curvature of `R_λ` on an `n × n` grid in
/// `(q, v)` with `q ∈ [q₁ + 0.2, q₁ + 4]`.
pub fn classical_minimality(lambda: f64, n: usize) -> Result<f64, CliError> {
    let p = RiemannParams::new(lambda)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let q = p.q1 + 0.2 + 3.8 * i as f64 / (n - 1) as f64;
        let chart = classical::LocalChart::new(&p, q)?;
        for j in 0..n {
            let v = std::f64::consts::TAU * j as f64 / n as f64;
            let h = fd::mean_curvature_fd(&|a, b| chart.eval(a, b), q, v, 1e-4, 1e-3);
            worst = worst.max(h.abs());
        }
    }
    Ok(worst)
}

/// Max mean curvature and conformality defect of the Weierstrass immersion
/// of `M_σ` on an `n × n` grid of `z ∈ [-3, 2] × [0.3, 2]`, each point seen
/// through a chart built from short chords.
pub fn weierstrass_minimality(sigma: f64, n: usize) -> Result<(f64, f64), CliError> {
    let p = CurveParams::new(sigma)?;
    let s = QuadSettings::new(1e-15, 1e-14, 2000).map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut h_max = 0.0f64;
    let mut conf_max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let z0 = C::new(-3.0 + 5.0 * i as f64 / (n - 1) as f64, 0.3 + 1.7 * j as f64 / (n - 1) as f64);
            let failed = RefCell::new(None);
            let chart = |u: f64, v: f64| match chord_integral(&p, z0, z0 + C::new(u, v), &s) {
                Ok(x) => x.re(),
                Err(e) => {
                    failed.borrow_mut().get_or_insert(e);
                    [f64::NAN; 3]
                }
            };
            let part = fd::partials(&chart, 0.0, 0.0, 1e-4, 1e-3);
            if let Some(e) = failed.into_inner() {
                return Err(e.into());
            }
            h_max = h_max.max(fd::mean_curvature(&part).abs());
            conf_max = conf_max.max(fd::conformality_defect(&part));
        }
    }
    Ok((h_max, conf_max))
}

/// Closed-form catenoid height against the quadrature with `a = 0` for 20
/// squared radii per `λ`.
pub fn catenoid_gap(lambdas: &[f64]) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for &lam in lambdas {
        for k in 0..20 {
            let q = (1.0 + 0.25 * k as f64) / lam;
            let a = classical::catenoid_height(lam, q)?;
            let b = classical::radial_height(0.0, lam, q)?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
