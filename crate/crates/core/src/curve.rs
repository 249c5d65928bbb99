//! The elliptic curve `w² = z(z-1)(z+σ)`, branch-continuous square roots,
//! Weierstrass data with `g = z/√σ`, `φ₃ = dz/w`, and the resulting immersion.

use crate::quad::{integrate_breaks, segment_distance, ComplexPath, Integrand, QuadError, QuadSettings, C3};
use num_complex::Complex64;
use thiserror::Error;

pub type C = Complex64;

const I: C = C::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("point ({z}, {w}) is off the curve (residual {residual:e})")]
    NotOnCurve { z: C, w: C, residual: f64 },
    #[error("operation needs a regular point, got branch point or end at z = {0}")]
    NotRegular(C),
    #[error("branch of the square root could not be tracked near z = {0}")]
    BranchAmbiguity(C),
    #[error("path comes within {distance:e} of branch point {point} (clearance {clearance:e})")]
    ClearanceViolation { point: C, distance: f64, clearance: f64 },
    #[error("Gauss map has a zero or pole here")]
    PoleOfGaussMap,
    #[error("loop lift does not close (relative defect {0:e})")]
    LoopNotClosed(f64),
    #[error("path has no nodes")]
    EmptyPath,
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    sigma: f64,
}

impl CurveParams {
    pub fn new(sigma: f64) -> Result<Self, CurveError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(CurveError::InvalidSigma(sigma));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sqrt_sigma(&self) -> f64 {
        self.sigma.sqrt()
    }

    /// `P(z) = z(z-1)(z+σ)`
    pub fn poly(&self, z: C) -> C {
        z * (z - 1.0) * (z + self.sigma)
    }

    /// `P'(z) = 3z² + 2(σ-1)z - σ`
    pub fn dpoly(&self, z: C) -> C {
        3.0 * z * z + 2.0 * (self.sigma - 1.0) * z - self.sigma
    }

    pub fn branch_points(&self) -> [C; 3] {
        [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(-self.sigma, 0.0)]
    }

    pub fn default_clearance(&self) -> f64 {
        1e-3 * (1.0 + self.sigma)
    }

    /// Distance between the closest pair of finite branch points.
    pub fn min_gap(&self) -> f64 {
        self.sigma.min(1.0)
    }

    pub fn g(&self, z: C) -> C {
        z / self.sqrt_sigma()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub z: C,
    pub w: C,
}

impl CurvePoint {
    pub fn new(params: &CurveParams, z: C, w: C) -> Result<Self, CurveError> {
        let residual = (w * w - params.poly(z)).norm();
        if !(residual <= 1e-9 * (1.0 + z.norm().powi(3))) {
            return Err(CurveError::NotOnCurve { z, w, residual });
        }
        Ok(Self { z, w })
    }

    /// The point over `z` whose `w` is closest to `hint`.
    pub fn near(params: &CurveParams, z: C, hint: C) -> Self {
        let r = params.poly(z).sqrt();
        let w = if (r * hint.conj()).re >= 0.0 { r } else { -r };
        Self { z, w }
    }

    pub fn is_regular(&self, params: &CurveParams) -> bool {
        params.branch_points().iter().all(|b| (self.z - b).norm() > 1e-12 * (1.0 + params.sigma))
            && self.w.norm() > 0.0
            && self.z.re.is_finite()
            && self.z.im.is_finite()
    }

    fn require_regular(&self, params: &CurveParams) -> Result<(), CurveError> {
        if self.is_regular(params) {
            Ok(())
        } else {
            Err(CurveError::NotRegular(self.z))
        }
    }
}

/// `(φ₁, φ₂, φ₃)` divided by `dz`, with `g`, at a regular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassForms {
    pub g: C,
    pub phi1_density: C,
    pub phi2_density: C,
    pub phi3_density: C,
}

impl WeierstrassForms {
    pub fn at(params: &CurveParams, p: &CurvePoint) -> Result<Self, CurveError> {
        p.require_regular(params)?;
        let g = params.g(p.z);
        let phi3 = 1.0 / p.w;
        Ok(Self::from_g(g, phi3))
    }

    /// Forms built from a Gauss map value and a height density.
    pub fn from_g(g: C, phi3_density: C) -> Self {
        let inv = 1.0 / g;
        Self {
            g,
            phi1_density: 0.5 * (inv - g) * phi3_density,
            phi2_density: 0.5 * I * (inv + g) * phi3_density,
            phi3_density,
        }
    }

    pub fn densities(&self) -> C3 {
        C3([self.phi1_density, self.phi2_density, self.phi3_density])
    }

    /// `|φ₁² + φ₂² + φ₃²| / (|φ₁|² + |φ₂|² + |φ₃|²)`
    pub fn nullity_defect(&self) -> f64 {
        let s = self.phi1_density * self.phi1_density
            + self.phi2_density * self.phi2_density
            + self.phi3_density * self.phi3_density;
        s.norm() / (self.phi1_density.norm_sqr() + self.phi2_density.norm_sqr() + self.phi3_density.norm_sqr())
    }
}

/// `(½(1/g - g), (i/2)(1/g + g), 1)`, the forms divided by `φ₃`.
pub fn frame_factors(params: &CurveParams, z: C) -> C3 {
    let g = params.g(z);
    let inv = 1.0 / g;
    C3([0.5 * (inv - g), 0.5 * I * (inv + g), C::new(1.0, 0.0)])
}

/// Stereographic Gauss map `N = (2Re g, 2Im g, |g|²-1)/(1+|g|²)`.
pub fn gauss_map(forms: &WeierstrassForms) -> Result<[f64; 3], CurveError> {
    normal_from_g(forms.g)
}

pub fn normal_from_g(g: C) -> Result<[f64; 3], CurveError> {
    if g.norm() == 0.0 || !g.re.is_finite() || !g.im.is_finite() {
        return Err(CurveError::PoleOfGaussMap);
    }
    let a = g.norm_sqr();
    if !a.is_finite() {
        return Err(CurveError::PoleOfGaussMap);
    }
    let d = 1.0 + a;
    Ok([2.0 * g.re / d, 2.0 * g.im / d, (a - 1.0) / d])
}

/// Gaussian curvature in the coordinate where `φ₃ = dξ`; `g_prime = dg/dξ`.
pub fn gaussian_curvature(forms: &WeierstrassForms, g_prime: C) -> Result<f64, CurveError> {
    let g = forms.g;
    let a = g.norm();
    if a == 0.0 || !a.is_finite() {
        return Err(CurveError::PoleOfGaussMap);
    }
    let s = a + 1.0 / a;
    let q = 4.0 * (g_prime / g).norm() / (s * s);
    Ok(-q * q)
}

/// Dense samples of a continuous square-root branch along a real parameter.
#[derive(Debug, Clone)]
struct SqrtTrack {
    s: Vec<f64>,
    v: Vec<C>,
}

impl SqrtTrack {
    /// Follows `√radicand(s)` from `s0` (value `v0`) to `s1`, refining until
    /// consecutive values differ by less than 30° in argument and a factor
    /// of two in modulus.
    fn follow<R: Fn(f64) -> C>(
        radicand: R,
        s0: f64,
        s1: f64,
        v0: C,
        at: impl Fn(f64) -> C,
    ) -> Result<Self, CurveError> {
        let cos_max = (30f64).to_radians().cos();
        let span = s1 - s0;
        let mut s = vec![s0];
        let mut v = vec![v0];
        if span == 0.0 {
            return Ok(Self { s, v });
        }
        let mut h = 0.05 * span.abs();
        let h_max = 0.25;
        let mut cur_s = s0;
        let mut cur_v = v0;
        let dir = span.signum();
        while (s1 - cur_s) * dir > 0.0 {
            let step = h.min((s1 - cur_s).abs());
            let ns = if step == (s1 - cur_s).abs() { s1 } else { cur_s + dir * step };
            let r = radicand(ns).sqrt();
            let cand = if (r * cur_v.conj()).re >= 0.0 { r } else { -r };
            let ratio = cand.norm() / cur_v.norm();
            let cosang = (cand * cur_v.conj()).re / (cand.norm() * cur_v.norm());
            if cand.norm() > 0.0 && cosang > cos_max && (0.5..=2.0).contains(&ratio) {
                cur_s = ns;
                cur_v = cand;
                s.push(ns);
                v.push(cand);
                h = (h * 1.5).min(h_max);
            } else {
                h *= 0.5;
                if h < 1e-13 * (1.0 + cur_s.abs()) {
                    return Err(CurveError::BranchAmbiguity(at(cur_s)));
                }
            }
        }
        if dir < 0.0 {
            s.reverse();
            v.reverse();
        }
        Ok(Self { s, v })
    }

    fn last(&self, forward: bool) -> C {
        if forward {
            *self.v.last().unwrap()
        } else {
            self.v[0]
        }
    }

    /// Square root of `rad` on the tracked branch at parameter `t`.
    fn value(&self, t: f64, rad: C) -> C {
        let idx = match self.s.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= self.s.len() {
                    self.s.len() - 1
                } else if (t - self.s[i - 1]) < (self.s[i] - t) {
                    i - 1
                } else {
                    i
                }
            }
        };
        let r = rad.sqrt();
        if (r * self.v[idx].conj()).re >= 0.0 {
            r
        } else {
            -r
        }
    }
}

/// Options for path-based continuation and integration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathOptions {
    /// Minimum distance to the finite branch points; `None` uses the default.
    pub clearance: Option<f64>,
    pub quad: QuadSettings,
}

fn check_clearance(params: &CurveParams, path: &ComplexPath, opts: &PathOptions) -> Result<(), CurveError> {
    let clearance = opts.clearance.unwrap_or_else(|| params.default_clearance()).max(path.clearance());
    for b in params.branch_points() {
        let d = path.nodes().windows(2).map(|w| segment_distance(w[0], w[1], b)).fold(f64::INFINITY, f64::min);
        let d = if path.nodes().len() == 1 { (path.nodes()[0] - b).norm() } else { d };
        if d < clearance {
            return Err(CurveError::ClearanceViolation { point: b, distance: d, clearance });
        }
    }
    Ok(())
}

fn track_path(
    params: &CurveParams,
    path: &ComplexPath,
    w_start: C,
    opts: &PathOptions,
) -> Result<SqrtTrack, CurveError> {
    let z0 = path.start().ok_or(CurveError::EmptyPath)?;
    let start = CurvePoint::new(params, z0, w_start)?;
    check_clearance(params, path, opts)?;
    start.require_regular(params)?;
    let n = path.segment_count();
    if n == 0 {
        return Ok(SqrtTrack { s: vec![0.0], v: vec![w_start] });
    }
    SqrtTrack::follow(|s| params.poly(path.point_at(s).1), 0.0, n as f64, w_start, |s| path.point_at(s).1)
}

/// Analytic continuation of `w` along `path`.
pub fn continue_w(params: &CurveParams, path: &ComplexPath, w_start: C) -> Result<C, CurveError> {
    continue_w_with(params, path, w_start, &PathOptions::default())
}

pub fn continue_w_with(
    params: &CurveParams,
    path: &ComplexPath,
    w_start: C,
    opts: &PathOptions,
) -> Result<C, CurveError> {
    Ok(track_path(params, path, w_start, opts)?.last(true))
}

/// `∫_path (φ₁, φ₂, φ₃)` with branch-continuous `w`, and the end point.
pub fn path_integral(
    params: &CurveParams,
    path: &ComplexPath,
    w_start: C,
    opts: &PathOptions,
) -> Result<(C3, CurvePoint), CurveError> {
    let track = track_path(params, path, w_start, opts)?;
    let n = path.segment_count();
    let z_end = path.end().ok_or(CurveError::EmptyPath)?;
    let end = CurvePoint { z: z_end, w: track.last(true) };
    if n == 0 {
        return Ok((C3::zero(), end));
    }
    // Integrate segment by segment so breakpoints sit on the polyline corners.
    let breaks: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let (v, _) = integrate_breaks(
        |s| {
            let (_, z, dz) = path.point_at(s);
            let w = track.value(s, params.poly(z));
            frame_factors(params, z).scale(dz / w)
        },
        &breaks,
        &opts.quad,
    )?;
    Ok((v, end))
}

/// `base_position + Re ∫_path (φ₁, φ₂, φ₃)`, and the end point of the lift.
pub fn immerse(
    params: &CurveParams,
    path: &ComplexPath,
    w_start: C,
    base_position: [f64; 3],
) -> Result<([f64; 3], CurvePoint), CurveError> {
    immerse_with(params, path, w_start, base_position, &PathOptions::default())
}

pub fn immerse_with(
    params: &CurveParams,
    path: &ComplexPath,
    w_start: C,
    base_position: [f64; 3],
    opts: &PathOptions,
) -> Result<([f64; 3], CurvePoint), CurveError> {
    let (v, end) = path_integral(params, path, w_start, opts)?;
    let r = v.re();
    Ok(([base_position[0] + r[0], base_position[1] + r[1], base_position[2] + r[2]], end))
}

/// `∫_e^{end.z} (φ₁, φ₂, φ₃)` along the straight segment from the finite
/// branch point `e ∈ {1, -σ}`, with the branch fixed by `end.w`.
///
/// Uses `z = e + (z_end - e)t²`, so that `w = t·h(t)` with `h` smooth.
pub fn integral_from_branch(params: &CurveParams, e: C, end: &CurvePoint, s: &QuadSettings) -> Result<C3, CurveError> {
    let bps = params.branch_points();
    if (e - bps[0]).norm() < 1e-14 {
        return Err(CurveError::NotRegular(e));
    }
    if !bps[1..].iter().any(|b| (e - b).norm() < 1e-14) {
        return Err(CurveError::NotRegular(e));
    }
    end.require_regular(params)?;
    let d = end.z - e;
    // Remaining factor of P after removing (z - e).
    let others: Vec<C> = bps.iter().copied().filter(|b| (b - e).norm() > 1e-14).collect();
    for &o in &others {
        // The segment must stay away from the other two roots.
        if segment_distance(e, end.z, o) < 1e-3 * (1.0 + params.sigma) {
            return Err(CurveError::ClearanceViolation {
                point: o,
                distance: segment_distance(e, end.z, o),
                clearance: 1e-3 * (1.0 + params.sigma),
            });
        }
    }
    let rad = |t: f64| {
        let z = e + d * t * t;
        d * (z - others[0]) * (z - others[1])
    };
    let track = SqrtTrack::follow(rad, 1.0, 0.0, end.w, |t| e + d * t * t)?;
    let (v, _) = integrate_breaks(
        |t| {
            let z = e + d * t * t;
            let h = track.value(t, rad(t));
            frame_factors(params, z).scale(2.0 * d / h)
        },
        &[0.0, 1.0],
        s,
    )?;
    Ok(v)
}

/// The regular basepoint `(1+δ, +√P(1+δ))`, `δ = 10⁻²`.
pub fn basepoint(params: &CurveParams) -> CurvePoint {
    let z = C::new(1.0 + BASE_DELTA, 0.0);
    let w = params.poly(z).sqrt();
    CurvePoint { z, w: C::new(w.re.abs(), 0.0) }
}

pub const BASE_DELTA: f64 = 1e-2;

/// Polyline from the basepoint into the closed upper half-plane:
/// `base → base + iY → Re(target) + iY → target`.
pub fn upper_path(params: &CurveParams, target: C) -> Result<ComplexPath, CurveError> {
    let base = basepoint(params).z;
    let y = 0.5 * params.min_gap().max(target.im);
    let y = if target.im > y { target.im } else { y };
    let mut nodes = vec![base, base + I * y, C::new(target.re, y), target];
    nodes.dedup_by(|a, b| (*a - *b).norm() < 1e-15);
    Ok(ComplexPath::new(nodes)?)
}

/// Holomorphic developing map normalised at the branch point `z = 1`:
/// `ψ(z) = Re ∫_1^z (φ₁, φ₂, φ₃)` on the branch with `w > 0` over `(1, ∞)`.
#[derive(Debug, Clone)]
pub struct Developing {
    params: CurveParams,
    base: CurvePoint,
    base_value: C3,
    opts: PathOptions,
}

impl Developing {
    pub fn new(params: CurveParams) -> Result<Self, CurveError> {
        let opts = PathOptions::default();
        let base = basepoint(&params);
        let base_value = integral_from_branch(&params, C::new(1.0, 0.0), &base, &opts.quad)?;
        Ok(Self { params, base, base_value, opts })
    }

    pub fn params(&self) -> &CurveParams {
        &self.params
    }

    pub fn base(&self) -> CurvePoint {
        self.base
    }

    /// `∫_1^{base}` of the forms.
    pub fn base_value(&self) -> C3 {
        self.base_value
    }

    /// Lift of a regular `z` in the closed upper half-plane, by continuation
    /// from the basepoint.
    pub fn lift_upper(&self, z: C) -> Result<CurvePoint, CurveError> {
        let path = upper_path(&self.params, z)?;
        let w = continue_w_with(&self.params, &path, self.base.w, &self.opts)?;
        Ok(CurvePoint { z, w })
    }

    /// Complex integral `∫_1^z` along the upper-half-plane path; `z` may be
    /// the branch point `1` or `-σ`, but not the end `0`.
    pub fn complex_upper(&self, z: C) -> Result<(C3, CurvePoint), CurveError> {
        let sigma = self.params.sigma;
        if (z - 1.0).norm() < 1e-14 {
            return Ok((C3::zero(), CurvePoint { z: C::new(1.0, 0.0), w: C::new(0.0, 0.0) }));
        }
        if (z + sigma).norm() < 1e-14 {
            let e = C::new(-sigma, 0.0);
            let aux = e + I * 0.5 * self.params.min_gap();
            let (v, p) = self.complex_upper(aux)?;
            let tail = integral_from_branch(&self.params, e, &p, &self.opts.quad)?;
            return Ok((v - tail, CurvePoint { z: e, w: C::new(0.0, 0.0) }));
        }
        let path = upper_path(&self.params, z)?;
        let (v, end) = path_integral(&self.params, &path, self.base.w, &self.opts)?;
        Ok((self.base_value + v, end))
    }

    pub fn psi_upper(&self, z: C) -> Result<[f64; 3], CurveError> {
        Ok(self.complex_upper(z)?.0.re())
    }
}

/// The three isometries of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    S1,
    S2,
    S3,
}

/// Image of a regular point under `S₁(z,w) = (-σ/z, -σw/z²)`,
/// `S₂(z,w) = (z̄, -w̄)` or `S₃(z,w) = (z̄, w̄)`.
pub fn apply_symmetry(params: &CurveParams, which: Symmetry, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
    p.require_regular(params)?;
    let s = params.sigma;
    Ok(match which {
        Symmetry::S1 => CurvePoint { z: -s / p.z, w: -s * p.w / (p.z * p.z) },
        Symmetry::S2 => CurvePoint { z: p.z.conj(), w: -p.w.conj() },
        Symmetry::S3 => CurvePoint { z: p.z.conj(), w: p.w.conj() },
    })
}

/// Largest defect over `samples` of the relations
/// `g∘S₁ = -1/g`, `S₁*φ₃ = -φ₃`; `g∘S₂ = ḡ`, `S₂*φ₃ = -φ̄₃`; `g∘S₃ = ḡ`, `S₃*φ₃ = φ̄₃`,
/// together with the curve equation at the image.
pub fn verify_symmetry_action(
    params: &CurveParams,
    which: Symmetry,
    samples: &[CurvePoint],
) -> Result<f64, CurveError> {
    let mut worst = 0.0f64;
    for p in samples {
        let q = apply_symmetry(params, which, p)?;
        let fp = WeierstrassForms::at(params, p)?;
        let fq = WeierstrassForms::at(params, &q)?;
        let scale = 1.0 + q.z.norm().powi(3);
        let curve_defect = (q.w * q.w - params.poly(q.z)).norm() / scale;
        let (g_expected, phi_expected, jac) = match which {
            // dz'/dz for the holomorphic S₁, dz'/dz̄ for the antiholomorphic ones.
            Symmetry::S1 => (-1.0 / fp.g, -fp.phi3_density, params.sigma / (p.z * p.z)),
            Symmetry::S2 => (fp.g.conj(), -fp.phi3_density.conj(), C::new(1.0, 0.0)),
            Symmetry::S3 => (fp.g.conj(), fp.phi3_density.conj(), C::new(1.0, 0.0)),
        };
        let dg = (fq.g - g_expected).norm() / (1.0 + g_expected.norm());
        let dphi = (fq.phi3_density * jac - phi_expected).norm() / (1.0 + phi_expected.norm());
        worst = worst.max(dg).max(dphi).max(curve_defect);
    }
    Ok(worst)
}

/// Defect of `(g')² = g(√σ+g)(√σg-1)` and
/// `g'' = -√σ/2 + (σ-1)g + (3√σ/2)g²` with `g' = w/√σ`.
pub fn gauss_ode_residual(params: &CurveParams, p: &CurvePoint) -> f64 {
    let rs = params.sqrt_sigma();
    let s = params.sigma;
    let g = p.z / rs;
    let g1 = p.w / rs;
    let g2 = params.dpoly(p.z) / (2.0 * rs);
    // √σ·g - 1 is written as z - 1 so the factor vanishes exactly at z = 1.
    let r1 = (g1 * g1 - g * (rs + g) * (p.z - 1.0)).norm();
    let r2 = (g2 - (-0.5 * rs + (s - 1.0) * g + 1.5 * rs * g * g)).norm();
    r1.max(r2)
}

/// Derivatives `g, g', …, g^{(order)}` with respect to `ξ` (`φ₃ = dξ`) at `p`.
pub fn gauss_jet(params: &CurveParams, p: &CurvePoint, order: usize) -> Vec<C> {
    let rs = params.sqrt_sigma();
    let s = params.sigma;
    let a = C::new(-0.5 * rs, 0.0);
    let b = s - 1.0;
    let d = 1.5 * rs;
    // Taylor coefficients c_k with G'' = a + bG + dG².
    let mut c = vec![C::new(0.0, 0.0); order.max(1) + 1];
    c[0] = p.z / rs;
    if order >= 1 {
        c[1] = p.w / rs;
    }
    for k in 0..order.saturating_sub(1) {
        let mut f = b * c[k];
        for i in 0..=k {
            f += d * c[i] * c[k - i];
        }
        if k == 0 {
            f += a;
        }
        c[k + 2] = f / (((k + 1) * (k + 2)) as f64);
    }
    let mut fact = 1.0;
    c.truncate(order + 1);
    c.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 0 {
                fact *= k as f64;
            }
            v * fact
        })
        .collect()
}

/// Which homology class a loop represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    /// Encloses the branch points 0 and 1.
    Gamma1,
    /// Encloses the branch points 1 and -σ but not 0.
    Gamma2,
    /// Encircles the end at z = 0 twice.
    EndLoop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomologyLoop {
    pub kind: LoopKind,
    pub base: CurvePoint,
    pub geometry: ComplexPath,
}

impl HomologyLoop {
    pub fn new(params: &CurveParams, kind: LoopKind) -> Result<Self, CurveError> {
        let gap = params.min_gap();
        let s = params.sigma;
        let geometry = match kind {
            LoopKind::Gamma1 => {
                let r = 0.5 + 0.5 * gap;
                ComplexPath::circle(C::new(0.5, 0.0), r, 64, 1)?
            }
            LoopKind::Gamma2 => {
                // Rectangle around [-σ, 1] with a notch cutting 0 out.
                let d = 0.5 * gap;
                let (a, b) = (d, 2.0 * d);
                let nodes = vec![
                    C::new(1.0 + a, 0.0),
                    C::new(1.0 + a, b),
                    C::new(-s - a, b),
                    C::new(-s - a, -b),
                    C::new(-d, -b),
                    C::new(-d, d),
                    C::new(d, d),
                    C::new(d, -b),
                    C::new(1.0 + a, -b),
                    C::new(1.0 + a, 0.0),
                ];
                ComplexPath::new(nodes)?
            }
            LoopKind::EndLoop => ComplexPath::circle(C::new(0.0, 0.0), 0.5 * gap, 48, 2)?,
        };
        let z0 = geometry.start().ok_or(CurveError::EmptyPath)?;
        let r = params.poly(z0).sqrt();
        // Positive real part fixes the sheet; on the real axis right of 1 this is w > 0.
        let w0 = if r.re >= 0.0 { r } else { -r };
        let base = CurvePoint { z: z0, w: w0 };
        Self::from_parts(params, kind, base, geometry)
    }

    pub fn from_parts(
        params: &CurveParams,
        kind: LoopKind,
        base: CurvePoint,
        geometry: ComplexPath,
    ) -> Result<Self, CurveError> {
        let base = CurvePoint::new(params, base.z, base.w)?;
        if !geometry.is_closed() {
            return Err(CurveError::LoopNotClosed(f64::INFINITY));
        }
        if geometry.start() != Some(base.z) {
            return Err(CurveError::LoopNotClosed(f64::INFINITY));
        }
        let w_end = continue_w(params, &geometry, base.w)?;
        let defect = (w_end - base.w).norm() / base.w.norm();
        if defect > 1e-8 {
            return Err(CurveError::LoopNotClosed(defect));
        }
        Ok(Self { kind, base, geometry })
    }

    /// The loop traversed `times` times.
    pub fn repeated(&self, times: usize) -> Result<Self, CurveError> {
        Ok(Self { kind: self.kind, base: self.base, geometry: self.geometry.repeated(times)? })
    }

    pub fn reversed(&self) -> Self {
        Self { kind: self.kind, base: self.base, geometry: self.geometry.reversed() }
    }
}

/// Loop integrals `(∫φ₁, ∫φ₂, ∫φ₃)`.
pub fn period(params: &CurveParams, lp: &HomologyLoop) -> Result<[C; 3], CurveError> {
    let (v, _) = path_integral(params, &lp.geometry, lp.base.w, &PathOptions::default())?;
    Ok(v.0)
}

/// Flux `Im ∫_γ (φ₁, φ₂, φ₃)`.
pub fn flux(params: &CurveParams, lp: &HomologyLoop) -> Result<[f64; 3], CurveError> {
    let p = period(params, lp)?;
    Ok([p[0].im, p[1].im, p[2].im])
}

/// State of the `ξ`-flow: a curve point together with the immersion value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiState {
    pub z: C,
    pub w: C,
    pub x: [f64; 3],
}

/// Moves along the straight line `ξ → ξ + dir·s`, `s ∈ [0, length]`, by RK4 on
/// `dz/dξ = w`, `dw/dξ = P'(z)/2`, `dX/dξ = (½(1/g-g), (i/2)(1/g+g), 1)`.
/// Returns `steps + 1` states.
pub fn trace_xi(params: &CurveParams, start: XiState, dir: C, length: f64, steps: usize) -> Vec<XiState> {
    let h = length / steps as f64;
    let rhs = |z: C, w: C| -> (C, C, [f64; 3]) {
        let f = frame_factors(params, z).scale(dir);
        (w * dir, 0.5 * params.dpoly(z) * dir, f.re())
    };
    let mut out = Vec::with_capacity(steps + 1);
    let mut st = start;
    out.push(st);
    for _ in 0..steps {
        let (z, w) = (st.z, st.w);
        let (k1z, k1w, k1x) = rhs(z, w);
        let (k2z, k2w, k2x) = rhs(z + k1z * (h / 2.0), w + k1w * (h / 2.0));
        let (k3z, k3w, k3x) = rhs(z + k2z * (h / 2.0), w + k2w * (h / 2.0));
        let (k4z, k4w, k4x) = rhs(z + k3z * h, w + k3w * h);
        let nz = z + (k1z + 2.0 * k2z + 2.0 * k3z + k4z) * (h / 6.0);
        let mut nw = w + (k1w + 2.0 * k2w + 2.0 * k3w + k4w) * (h / 6.0);
        let mut nx = st.x;
        for i in 0..3 {
            nx[i] += (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]) * (h / 6.0);
        }
        // Project back onto the curve.
        let r = params.poly(nz).sqrt();
        if nw.norm() > 1e-6 {
            nw = if (r * nw.conj()).re >= 0.0 { r } else { -r };
        }
        st = XiState { z: nz, w: nw, x: nx };
        out.push(st);
    }
    out
}

/// Deterministic random regular points in an annulus around the branch
/// points, keeping `0.1·min_gap` away from each of them.
pub fn sample_points(params: &CurveParams, seed: u64, count: usize) -> Vec<CurvePoint> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gap = params.min_gap();
    let (r_in, r_out) = (0.25 * gap, 2.0 * (1.0 + params.sigma));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let r = rng.random_range(r_in..r_out);
        let t = rng.random_range(0.0..std::f64::consts::TAU);
        let z = C::from_polar(r, t);
        if params.branch_points().iter().any(|b| (z - b).norm() < 0.1 * gap) {
            continue;
        }
        let w = params.poly(z).sqrt();
        let w = if rng.random_bool(0.5) { w } else { -w };
        out.push(CurvePoint { z, w });
    }
    out
}
