//! Comparison of the classical Riemann example `R_λ` with `M_σ(λ)`: level
//! circles of both are sampled at matching relative heights and a single
//! scale factor is fitted.

use crate::classical::{self, ClassicalError, RiemannParams};
use crate::curve::{self, CurveError, CurveParams, HomologyLoop, LoopKind, XiState, C};
use crate::mesh::{self, LevelFit, MeshError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistrationError {
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("level curve at tau = {tau} is not a circle")]
    NotCircle { tau: f64 },
    #[error("level curve does not close (gap {0:e})")]
    NotClosed(f64),
}

/// A horizontal level circle: its radius and the horizontal distance of its
/// center from the center of the smallest circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSample {
    pub tau: f64,
    pub radius: f64,
    pub offset: f64,
}

/// Level circles of `R_λ` at heights `τζ` above the smallest circle.
pub fn classical_levels(params: &RiemannParams, taus: &[f64]) -> Result<Vec<LevelSample>, ClassicalError> {
    taus.iter()
        .map(|&tau| {
            let q = classical::q_at_height(params, tau * params.zeta)?;
            Ok(LevelSample { tau, radius: q.sqrt(), offset: classical::center_offset(params, q)?.abs() })
        })
        .collect()
}

/// One horizontal level curve of `M_σ` at height `h ∈ (0, 2c₃)`: starting at
/// `z = 1`, which sits on a straight line at height 0, the `ξ`-flow moves by
/// `h` in the real direction and then one full period along the imaginary
/// direction. Returns the traced points.
pub fn trace_level_curve(
    params: &CurveParams,
    h: f64,
    period: f64,
    steps: usize,
) -> Result<Vec<[f64; 3]>, RegistrationError> {
    let start = XiState { z: C::new(1.0, 0.0), w: C::new(0.0, 0.0), x: [0.0; 3] };
    let up = curve::trace_xi(params, start, C::new(1.0, 0.0), h, steps.max(64));
    let on_level = *up.last().expect("trace has at least one state");
    let around = curve::trace_xi(params, on_level, C::new(0.0, 1.0), period, steps);
    let first = around[0].x;
    let last = around[around.len() - 1].x;
    let gap = crate::fd::norm(crate::fd::sub(first, last));
    let scale = 1.0 + crate::fd::norm(first);
    if gap > 1e-6 * scale {
        return Err(RegistrationError::NotClosed(gap));
    }
    Ok(around[..around.len() - 1].iter().map(|s| s.x).collect())
}

/// Height `c₃` of the smallest circle of `M_σ` above the line through `z = 1`,
/// and the `ξ`-period of a level circle.
pub fn weierstrass_spacing(params: &CurveParams) -> Result<(f64, f64), RegistrationError> {
    let k = mesh::fundamental_constants(params.sigma())?;
    let lp = HomologyLoop::new(params, LoopKind::Gamma1)?;
    let period = curve::flux(params, &lp)?[2].abs();
    Ok((k.c[2], period))
}

/// Level circles of `M_σ` at heights `c₃(1 - τ)`, i.e. `τc₃` from the
/// smallest circle toward the line.
pub fn weierstrass_levels(
    params: &CurveParams,
    taus: &[f64],
    steps: usize,
) -> Result<Vec<LevelSample>, RegistrationError> {
    let (c3, period) = weierstrass_spacing(params)?;
    let fit = |tau: f64| -> Result<([f64; 2], f64), RegistrationError> {
        let pts = trace_level_curve(params, c3 * (1.0 - tau), period, steps)?;
        match mesh::level_circle_fit(&pts, 1e-7 * (1.0 + c3))? {
            LevelFit::Circle { center, radius, .. } => Ok((center, radius)),
            LevelFit::Line { .. } => Err(RegistrationError::NotCircle { tau }),
        }
    };
    let (c0, _) = fit(0.0)?;
    taus.iter()
        .map(|&tau| {
            let (c, r) = fit(tau)?;
            Ok(LevelSample { tau, radius: r, offset: (c[0] - c0[0]).hypot(c[1] - c0[1]) })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registration {
    pub lambda: f64,
    pub sigma: f64,
    /// Multiplies lengths of `R_λ` to match `M_σ`.
    pub scale: f64,
    pub classical_spacing: f64,
    pub weierstrass_spacing: f64,
    pub classical: Vec<LevelSample>,
    pub weierstrass: Vec<LevelSample>,
    /// Largest relative mismatch over spacing, radii and nonzero offsets.
    pub max_relative_error: f64,
}

/// Fits one scale `s` with `s·(ζ, rᵢ, fᵢ) ≈ (c₃, ρᵢ, gᵢ)` by least squares on
/// logarithms and reports the worst relative mismatch.
pub fn register(lambda: f64, taus: &[f64], steps: usize) -> Result<Registration, RegistrationError> {
    let rp = RiemannParams::new(lambda)?;
    let sigma = classical::sigma_of_lambda(lambda);
    let cp = CurveParams::new(sigma)?;
    let cl = classical_levels(&rp, taus)?;
    let ws = weierstrass_levels(&cp, taus, steps)?;
    let (c3, _) = weierstrass_spacing(&cp)?;
    let mut pairs = vec![(rp.zeta, c3)];
    for (a, b) in cl.iter().zip(&ws) {
        pairs.push((a.radius, b.radius));
        if a.offset > 1e-9 * a.radius {
            pairs.push((a.offset, b.offset));
        }
    }
    let log_scale = pairs.iter().map(|(a, b)| (b / a).ln()).sum::<f64>() / pairs.len() as f64;
    let scale = log_scale.exp();
    log::debug!("registration at lambda = {lambda}: scale {scale} from {} pairs", pairs.len());
    let max_relative_error = pairs.iter().map(|(a, b)| (scale * a - b).abs() / b.abs()).fold(0.0, f64::max);
    Ok(Registration {
        lambda,
        sigma,
        scale,
        classical_spacing: rp.zeta,
        weierstrass_spacing: c3,
        classical: cl,
        weierstrass: ws,
        max_relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_curve_closes_on_a_circle() {
        let p = CurveParams::new(2.0).unwrap();
        let (c3, period) = weierstrass_spacing(&p).unwrap();
        let pts = trace_level_curve(&p, 0.7 * c3, period, 400).unwrap();
        for q in &pts {
            assert!((q[2] - 0.7 * c3).abs() < 1e-9);
        }
        let fit = mesh::level_circle_fit(&pts, 1e-8).unwrap();
        assert!(!fit.is_line());
        assert!(fit.residual() < 1e-8, "{fit:?}");
    }

    #[test]
    fn smallest_circle_of_sigma_2() {
        // The smallest circle passes through ψ(i√σ) = c, whose x₂ is its radius
        // because the circle is symmetric about {x₂ = 0}.
        let p = CurveParams::new(2.0).unwrap();
        let k = mesh::fundamental_constants(2.0).unwrap();
        let w = weierstrass_levels(&p, &[0.0], 400).unwrap();
        assert!((w[0].radius - k.c[1].abs()).abs() < 1e-8);
        assert_eq!(w[0].offset, 0.0);
    }
}
