//! The classical construction: surfaces foliated by horizontal circles whose
//! squared radius `q` solves `(q')² = 4(q³ - q + λq²)` in the height variable.

use crate::fd::{self, V3};
use crate::quad::{integrate_real, integrate_sqrt_singular, integrate_tail_with, QuadError, QuadSettings, TailMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("argument {value} outside the domain [{min}, ∞)")]
    DomainError { value: f64, min: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical sequence did not converge: {0}")]
    ConvergenceError(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// `q₁(λ) = ½(-λ + √(4+λ²))`, the squared radius of the neck circle.
pub fn q_min(lambda: f64) -> f64 {
    let s = (4.0 + lambda * lambda).sqrt();
    if lambda > 0.0 {
        // Same value without cancellation.
        2.0 / (lambda + s)
    } else {
        0.5 * (-lambda + s)
    }
}

/// `σ(λ) = (2/(√(λ²+4) - λ))²`
pub fn sigma_of_lambda(lambda: f64) -> f64 {
    let r = 1.0 / q_min(lambda);
    r * r
}

/// Inverse of [`sigma_of_lambda`]: `λ = √σ - 1/√σ`.
pub fn lambda_of_sigma(sigma: f64) -> f64 {
    let r = sigma.sqrt();
    r - 1.0 / r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannParams {
    pub lambda: f64,
    pub q1: f64,
    pub zeta: f64,
    pub a_direction: [f64; 2],
    q1_other: f64,
}

impl RiemannParams {
    pub fn new(lambda: f64) -> Result<Self, ClassicalError> {
        if !lambda.is_finite() {
            return Err(ClassicalError::InvalidParameter(format!("lambda = {lambda}")));
        }
        let q1 = q_min(lambda);
        let mut p = Self { lambda, q1, zeta: 0.0, a_direction: [1.0, 0.0], q1_other: -1.0 / q1 };
        let s = QuadSettings::default();
        let split = q1 + 1.0;
        let near = 0.5 * integrate_sqrt_singular(|u| 1.0 / p.sqrt_radicand(u), q1, split, &s)?;
        let far = 0.5 * integrate_tail_with(|u| 1.0 / p.sqrt_radicand(u), split, 1.5, TailMap::InverseSquare, &s)?;
        p.zeta = near + far;
        Ok(p)
    }

    /// `u³ - u + λu² = u(u - q₁)(u + 1/q₁)`
    pub fn radicand(&self, u: f64) -> f64 {
        u * (u - self.q1) * (u - self.q1_other)
    }

    fn sqrt_radicand(&self, u: f64) -> f64 {
        self.radicand(u).max(0.0).sqrt()
    }

    fn check(&self, q: f64) -> Result<(), ClassicalError> {
        if !(q >= self.q1 * (1.0 - 1e-15)) || !q.is_finite() {
            return Err(ClassicalError::DomainError { value: q, min: self.q1 });
        }
        Ok(())
    }

    /// `∫_{q₁}^{q} du / √(u³-u+λu²)` over the part adjacent to `q₁`.
    fn tail_from(&self, q: f64) -> Result<f64, QuadError> {
        integrate_tail_with(|u| 1.0 / self.sqrt_radicand(u), q, 1.5, TailMap::InverseSquare, &QuadSettings::default())
    }
}

/// `z_λ(q) = ½ ∫_{q₁}^q du/√(u³ - u + λu²)`
pub fn height(params: &RiemannParams, q: f64) -> Result<f64, ClassicalError> {
    params.check(q)?;
    if q <= params.q1 {
        return Ok(0.0);
    }
    let s = QuadSettings::default();
    if q <= params.q1 + 1.0 {
        Ok(0.5 * integrate_sqrt_singular(|u| 1.0 / params.sqrt_radicand(u), params.q1, q, &s)?)
    } else {
        Ok(params.zeta - 0.5 * params.tail_from(q)?)
    }
}

/// `z_λ(qb) - z_λ(qa)` as a local integral.
pub fn height_increment(params: &RiemannParams, qa: f64, qb: f64) -> Result<f64, ClassicalError> {
    params.check(qa)?;
    params.check(qb)?;
    let lo = qa.min(qb);
    if lo - params.q1 < 1e-3 * (1.0 + params.q1) {
        return Ok(height(params, qb)? - height(params, qa)?);
    }
    Ok(0.5 * integrate_real(|u| 1.0 / params.sqrt_radicand(u), qa, qb, &QuadSettings::default())?)
}

/// `f_λ(q) = -½ ∫_{q₁}^q u du/√(u³ - u + λu²)`
pub fn center_offset(params: &RiemannParams, q: f64) -> Result<f64, ClassicalError> {
    params.check(q)?;
    if q <= params.q1 {
        return Ok(0.0);
    }
    let s = QuadSettings::default();
    let split = params.q1 + 1.0;
    let f = |u: f64| u / params.sqrt_radicand(u);
    if q <= split {
        return Ok(-0.5 * integrate_sqrt_singular(f, params.q1, q, &s)?);
    }
    let near = integrate_sqrt_singular(f, params.q1, split, &s)?;
    Ok(-0.5 * (near + smooth_center_integral(params, split, q)?))
}

/// `∫_{qa}^{qb} u du/√R` via `u = t²`, which makes the integrand bounded.
fn smooth_center_integral(params: &RiemannParams, qa: f64, qb: f64) -> Result<f64, QuadError> {
    integrate_real(
        |t| {
            let u = t * t;
            2.0 * t * u / params.sqrt_radicand(u)
        },
        qa.sqrt(),
        qb.sqrt(),
        &QuadSettings::default(),
    )
}

/// `f_λ(qb) - f_λ(qa)` as a local integral.
pub fn center_increment(params: &RiemannParams, qa: f64, qb: f64) -> Result<f64, ClassicalError> {
    params.check(qa)?;
    params.check(qb)?;
    let lo = qa.min(qb);
    if lo - params.q1 < 1e-3 * (1.0 + params.q1) {
        return Ok(center_offset(params, qb)? - center_offset(params, qa)?);
    }
    Ok(-0.5 * smooth_center_integral(params, qa, qb)?)
}

/// `X_λ(q, v) = (f_λ(q) + √q cos v, √q sin v, z_λ(q))`
pub fn parameterize(params: &RiemannParams, q: f64, v: f64) -> Result<V3, ClassicalError> {
    let f = center_offset(params, q)?;
    let z = height(params, q)?;
    let r = q.sqrt();
    Ok([f + r * v.cos(), r * v.sin(), z])
}

/// A chart of `X_λ` around `(q0, ·)` whose values near `q0` come from local
/// increments, so finite differences do not lose digits.
pub struct LocalChart<'a> {
    params: &'a RiemannParams,
    q0: f64,
    f0: f64,
    z0: f64,
}

impl<'a> LocalChart<'a> {
    pub fn new(params: &'a RiemannParams, q0: f64) -> Result<Self, ClassicalError> {
        Ok(Self { params, q0, f0: center_offset(params, q0)?, z0: height(params, q0)? })
    }

    pub fn eval(&self, q: f64, v: f64) -> V3 {
        let (df, dz) = if q == self.q0 {
            (0.0, 0.0)
        } else {
            (
                center_increment(self.params, self.q0, q).unwrap_or(f64::NAN),
                height_increment(self.params, self.q0, q).unwrap_or(f64::NAN),
            )
        };
        let r = q.sqrt();
        [self.f0 + df + r * v.cos(), r * v.sin(), self.z0 + dz]
    }
}

/// Finite-difference mean curvature of `X_λ` at `(q, v)`.
pub fn mean_curvature_fd(params: &RiemannParams, q: f64, v: f64, h1: f64, h2: f64) -> Result<f64, ClassicalError> {
    let chart = LocalChart::new(params, q)?;
    Ok(fd::mean_curvature_fd(&|a, b| chart.eval(a, b), q, v, h1, h2))
}

/// The squared radius at height `z ∈ [0, ζ)`.
pub fn q_at_height(params: &RiemannParams, z: f64) -> Result<f64, ClassicalError> {
    if !(z >= 0.0) || !(z < params.zeta) {
        return Err(ClassicalError::DomainError { value: z, min: 0.0 });
    }
    if z == 0.0 {
        return Ok(params.q1);
    }
    // Work in s = √(q - q₁), where the height is smooth and increasing.
    let hq = |s: f64| height(params, params.q1 + s * s);
    let mut hi = 1.0f64;
    while hq(hi)? < z {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(ClassicalError::ConvergenceError(format!("height {z} not bracketed")));
        }
    }
    let mut lo = 0.0f64;
    let mut s = 0.5 * hi;
    for _ in 0..200 {
        let val = hq(s)? - z;
        if val > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let q = params.q1 + s * s;
        let deriv = s / params.sqrt_radicand(q).max(f64::MIN_POSITIVE);
        let mut next = s - val / deriv;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 4.0 * f64::EPSILON * s {
            return Ok(params.q1 + next * next);
        }
        s = next;
    }
    Err(ClassicalError::ConvergenceError(format!("inverse height at z = {z}")))
}

/// The squared radius at height `height(q0) + dz`, found from local increments.
pub fn q_step(params: &RiemannParams, q0: f64, dz: f64) -> Result<f64, ClassicalError> {
    let mut q = q0 + dz * 2.0 * params.sqrt_radicand(q0);
    for _ in 0..50 {
        let f = height_increment(params, q0, q)? - dz;
        let next = q - f * 2.0 * params.sqrt_radicand(q);
        if (next - q).abs() <= 4.0 * f64::EPSILON * q.abs() {
            return Ok(next);
        }
        q = next;
    }
    Err(ClassicalError::ConvergenceError(format!("q_step from {q0} by {dz}")))
}

/// Residuals of the radius equations at height `z`:
/// `2r⁶ + ((r²)')² + r²(2 - (r²)'') = 0` and `(q')²/q² - 4(q - 1/q) - 4λ = 0`,
/// with `q = r²` and its derivatives from central differences (steps `h1`, `h2`).
pub fn radius_ode_residuals(params: &RiemannParams, z: f64, h1: f64, h2: f64) -> Result<(f64, f64), ClassicalError> {
    let q0 = q_at_height(params, z)?;
    let qp1 = q_step(params, q0, h1)?;
    let qm1 = q_step(params, q0, -h1)?;
    let qp2 = q_step(params, q0, h2)?;
    let qm2 = q_step(params, q0, -h2)?;
    let d1 = (qp1 - qm1) / (2.0 * h1);
    let d2 = ((qp2 - q0) + (qm2 - q0)) / (h2 * h2);
    let r11 = 2.0 * q0.powi(3) + d1 * d1 + q0 * (2.0 - d2);
    let r12 = d1 * d1 / (q0 * q0) - 4.0 * (q0 - 1.0 / q0) - 4.0 * params.lambda;
    Ok((r11, r12))
}

/// Height for general `|a|²`: `½ ∫_{q*}^q du/√(|a|²u³ - u + λu²)` from the
/// positive root `q*` of the radicand.
pub fn radial_height(a_norm_sq: f64, lambda: f64, q: f64) -> Result<f64, ClassicalError> {
    let root = if a_norm_sq == 0.0 {
        if !(lambda > 0.0) {
            return Err(ClassicalError::InvalidParameter(format!("lambda must be positive when a = 0, got {lambda}")));
        }
        1.0 / lambda
    } else {
        (-lambda + (lambda * lambda + 4.0 * a_norm_sq).sqrt()) / (2.0 * a_norm_sq)
    };
    if !(q >= root) {
        return Err(ClassicalError::DomainError { value: q, min: root });
    }
    if q == root {
        return Ok(0.0);
    }
    let f = |u: f64| 1.0 / (u * (a_norm_sq * u * u + lambda * u - 1.0)).max(0.0).sqrt();
    Ok(0.5 * integrate_sqrt_singular(f, root, q, &QuadSettings::default())?)
}

/// Half-catenoid height for `a = 0`: `(1/√λ)·arcsinh √(λq - 1)`.
pub fn catenoid_height(lambda: f64, q: f64) -> Result<f64, ClassicalError> {
    if !(lambda > 0.0) {
        return Err(ClassicalError::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let min = 1.0 / lambda;
    if !(q >= min * (1.0 - 1e-15)) {
        return Err(ClassicalError::DomainError { value: q, min });
    }
    Ok((lambda * q - 1.0).max(0.0).sqrt().asinh() / lambda.sqrt())
}

/// `N₁/(1 - N₃)` along `v = 0` at squared radius `q`, from the exact partials
/// and the normal `X_q × X_v`.
pub fn gauss_ratio(params: &RiemannParams, q: f64) -> f64 {
    let x = (params.lambda * q - 1.0) / (q * q);
    let s = (1.0 + x).sqrt();
    // X_q = (f' + 1/(2√q), 0, z'), X_v = (0, √q, 0)
    let a = -0.5 / (q * s);
    let b = 0.5 * x / (s * (1.0 + s));
    let n = (a * a + b * b).sqrt();
    let (n1, n3) = (a / n, b / n);
    n1 / (1.0 - n3)
}

/// `lim_{q→∞} N₁/(1 - N₃)` on the meridian `v = 0`, extrapolated from
/// `q ∈ {10³, 10⁴, 10⁵}` and checked against `2/(λ - √(λ²+4))` and `-√σ(λ)`.
pub fn gauss_limit(params: &RiemannParams) -> Result<f64, ClassicalError> {
    let v3 = gauss_ratio(params, 1e3);
    let v4 = gauss_ratio(params, 1e4);
    let v5 = gauss_ratio(params, 1e5);
    // The ratio converges like 1/q; extrapolate each consecutive pair.
    let r34 = (10.0 * v4 - v3) / 9.0;
    let r45 = (10.0 * v5 - v4) / 9.0;
    if !((r45 - r34).abs() < 1e-4) || (v5 - v4).abs() > (v4 - v3).abs() {
        return Err(ClassicalError::ConvergenceError(format!("normal ratios {v3}, {v4}, {v5} are not settling")));
    }
    let limit = r45;
    let lam = params.lambda;
    let closed = 2.0 / (lam - (lam * lam + 4.0).sqrt());
    let from_sigma = -sigma_of_lambda(lam).sqrt();
    if (limit - closed).abs() > 1e-4 || (limit - from_sigma).abs() > 1e-4 {
        return Err(ClassicalError::ConvergenceError(format!("limit {limit} disagrees with {closed} / {from_sigma}")));
    }
    Ok(limit)
}

/// Local data of a circle foliation: radius, directrix curvature and torsion,
/// and the velocity of the centers in the Frenet frame, with `u`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationData {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub kappa: f64,
    pub kappa1: f64,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub delta1: f64,
}

impl FoliationData {
    pub fn validate(&self) -> Result<(), ClassicalError> {
        if !(self.r > 0.0) || !(self.kappa > 0.0) {
            return Err(ClassicalError::InvalidParameter("need r > 0 and kappa > 0".into()));
        }
        Ok(())
    }

    /// Unit radius and curvature, centers moving along the binormal.
    pub fn canonical() -> Self {
        Self {
            r: 1.0,
            r1: 0.0,
            r2: 0.0,
            kappa: 1.0,
            kappa1: 0.0,
            tau: 0.0,
            alpha: 0.0,
            beta: 0.0,
            delta: 1.0,
            alpha1: 0.0,
            beta1: 0.0,
            delta1: 0.0,
        }
    }
}

/// The trigonometric coefficients `a₁, …, a₇` of `(eG - 2fF + gE)·|X_u ∧ X_v|`
/// in the basis `cos 3v, sin 3v, cos 2v, sin 2v, cos v, sin v, 1`.
pub fn enneper_coefficients(d: &FoliationData) -> [f64; 7] {
    let FoliationData {
        r,
        r1,
        r2,
        kappa: k,
        kappa1: k1,
        tau,
        alpha: al,
        beta: be,
        delta: de,
        alpha1: al1,
        beta1: be1,
        delta1: de1,
    } = *d;
    let r3 = r * r * r;
    let a1 = -0.5 * r3 * k * (be * be - de * de + r * r * k * k);
    let a2 = -r3 * be * de * k;
    let a3 = 0.5 * r3 * (-6.0 * be * k * r1 + r * (5.0 * al * k * k + k * be1 - be * k1));
    let a4 = 0.5 * r3 * (r * k * de1 - de * (6.0 * k * r1 + r * k1));
    let a5 = -0.5
        * r
        * r
        * (3.0 * r3 * k * k * k - 4.0 * al * be * r1
            + r * (8.0 * al * al * k + 3.0 * be * be * k + 3.0 * k * (de * de + 2.0 * r1 * r1) - 2.0 * be * al1
                + 2.0 * al * (de * tau + be1))
            + 2.0 * r * r * (r1 * k1 - k * r2));
    let a6 = r * r * (2.0 * al * de * r1 + r * r * k * tau * r1 + r * (de * al1 + al * (be * tau - de1)));
    let a7 = 0.5
        * r
        * r
        * (2.0 * al * al * al
            + r * (2.0 * r1 * (-2.0 * be * k + al1) + r * (k * (2.0 * de * tau + be1) - be * k1))
            + al * (2.0 * be * be + 2.0 * de * de + 5.0 * r * r * k * k + 2.0 * r1 * r1 - 2.0 * r * r2));
    [a1, a2, a3, a4, a5, a6, a7]
}

/// Frame `(t, n, b)` and center `c` at parameter `u`, integrated from `u = 0`
/// with `t' = κn`, `n' = -κt - τb`, `b' = τn`, `c' = αt + βn + δb`.
fn frame_at(d: &FoliationData, u: f64) -> [V3; 4] {
    type St = [V3; 4];
    let rhs = |s: f64, y: &St| -> St {
        let k = d.kappa + d.kappa1 * s;
        let al = d.alpha + d.alpha1 * s;
        let be = d.beta + d.beta1 * s;
        let de = d.delta + d.delta1 * s;
        let [t, n, b, _] = *y;
        [
            fd::scale(n, k),
            fd::sub(fd::scale(t, -k), fd::scale(b, d.tau)),
            fd::scale(n, d.tau),
            fd::add(fd::add(fd::scale(t, al), fd::scale(n, be)), fd::scale(b, de)),
        ]
    };
    let axpy = |y: &St, k: &St, h: f64| -> St {
        let mut o = *y;
        for i in 0..4 {
            o[i] = fd::add(y[i], fd::scale(k[i], h));
        }
        o
    };
    let mut y: St = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0; 3]];
    let steps = 4;
    let h = u / steps as f64;
    let mut s = 0.0;
    for _ in 0..steps {
        let k1 = rhs(s, &y);
        let k2 = rhs(s + h / 2.0, &axpy(&y, &k1, h / 2.0));
        let k3 = rhs(s + h / 2.0, &axpy(&y, &k2, h / 2.0));
        let k4 = rhs(s + h, &axpy(&y, &k3, h));
        for i in 0..4 {
            let inc = fd::add(fd::add(k1[i], fd::scale(k2[i], 2.0)), fd::add(fd::scale(k3[i], 2.0), k4[i]));
            y[i] = fd::add(y[i], fd::scale(inc, h / 6.0));
        }
        s += h;
    }
    y
}

/// `X(u, v) = c(u) + r(u)(cos v·n(u) + sin v·b(u))` for the local model of `d`.
pub fn foliation_surface(d: &FoliationData, u: f64, v: f64) -> V3 {
    let [_, n, b, c] = frame_at(d, u);
    let r = d.r + d.r1 * u + 0.5 * d.r2 * u * u;
    fd::add(c, fd::scale(fd::add(fd::scale(n, v.cos()), fd::scale(b, v.sin())), r))
}

/// Max difference between [`enneper_coefficients`] and the Fourier
/// coefficients of `(eG - 2fF + gE)·|X_u ∧ X_v|` sampled on a 256-point grid
/// with finite-difference step `h`.
pub fn enneper_fourier_check_with(d: &FoliationData, h: f64) -> Result<f64, ClassicalError> {
    d.validate()?;
    let n = 256;
    let x = |u: f64, v: f64| foliation_surface(d, u, v);
    let mut acc = [0.0f64; 7];
    for k in 0..n {
        let v = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let p = fd::partials(&x, 0.0, v, h, h);
        let e1 = fd::dot(p.xu, p.xu);
        let f1 = fd::dot(p.xu, p.xv);
        let g1 = fd::dot(p.xv, p.xv);
        let pv = fd::det3(p.xu, p.xv, p.xuu) * g1 - 2.0 * fd::det3(p.xu, p.xv, p.xuv) * f1
            + fd::det3(p.xu, p.xv, p.xvv) * e1;
        let basis = [(3.0 * v).cos(), (3.0 * v).sin(), (2.0 * v).cos(), (2.0 * v).sin(), v.cos(), v.sin()];
        for i in 0..6 {
            acc[i] += pv * basis[i] * 2.0 / n as f64;
        }
        acc[6] += pv / n as f64;
    }
    let exact = enneper_coefficients(d);
    Ok(acc.iter().zip(exact.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

pub fn enneper_fourier_check(d: &FoliationData) -> Result<f64, ClassicalError> {
    enneper_fourier_check_with(d, 1e-5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn q_min_values() {
        assert_eq!(q_min(0.0), 1.0);
        assert_abs_diff_eq!(q_min(1.0), (5f64.sqrt() - 1.0) / 2.0, epsilon = 1e-15);
        assert!(q_min(0.5) > q_min(0.6));
        assert!(q_min(-3.0) > q_min(-2.0));
    }

    #[test]
    fn sigma_values() {
        assert_abs_diff_eq!(sigma_of_lambda(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma_of_lambda(1.0), (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        for k in 0..20 {
            let l = -5.0 + 0.5 * k as f64;
            assert_abs_diff_eq!(sigma_of_lambda(l) * q_min(l).powi(2), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(lambda_of_sigma(sigma_of_lambda(l)), l, epsilon = 1e-12);
        }
    }

    #[test]
    fn height_basics() {
        let p = RiemannParams::new(1.0).unwrap();
        assert_eq!(height(&p, p.q1).unwrap(), 0.0);
        assert!(height(&p, 0.5 * p.q1).is_err());
        let h2 = height(&p, 2.0).unwrap();
        assert!(h2 > 0.0 && h2 < p.zeta);
        assert!((height(&p, 1e8).unwrap() - p.zeta).abs() < 1e-4);
    }

    #[test]
    fn height_matches_trapezoid() {
        // Oracle: 10⁶-panel trapezoid in t with u = q₁ + t², which is smooth.
        let p = RiemannParams::new(1.0).unwrap();
        let q = 2.0;
        let top = (q - p.q1).sqrt();
        let n = 1_000_000;
        let h = top / n as f64;
        let g = |t: f64| {
            let u = p.q1 + t * t;
            if t == 0.0 {
                // limit of 2t/√R as t → 0
                2.0 / (p.q1 * (p.q1 - p.q1_other)).sqrt()
            } else {
                2.0 * t / p.radicand(u).sqrt()
            }
        };
        let mut sum = 0.5 * (g(0.0) + g(top));
        for k in 1..n {
            sum += g(k as f64 * h);
        }
        let trap = 0.5 * sum * h;
        assert!((height(&p, q).unwrap() - trap).abs() < 1e-6);
    }

    #[test]
    fn center_offset_behaviour() {
        let p = RiemannParams::new(1.0).unwrap();
        assert_eq!(center_offset(&p, p.q1).unwrap(), 0.0);
        let a = center_offset(&p, 100.0).unwrap() + 10.0;
        let b = center_offset(&p, 1e4).unwrap() + 100.0;
        assert!((a - b).abs() < 0.5);
        let mut prev = 0.0;
        for k in 1..=100 {
            let q = p.q1 + 0.05 * k as f64;
            let f = center_offset(&p, q).unwrap();
            assert!(f < prev);
            prev = f;
        }
    }

    #[test]
    fn parameterization_examples() {
        let p = RiemannParams::new(0.7).unwrap();
        let x = parameterize(&p, p.q1, 0.0).unwrap();
        assert_abs_diff_eq!(x[0], p.q1.sqrt(), epsilon = 1e-15);
        assert_eq!(x[1], 0.0);
        assert_eq!(x[2], 0.0);
        let a = parameterize(&p, 3.0, 0.4).unwrap();
        let b = parameterize(&p, 3.0, -0.4).unwrap();
        assert_eq!(a[0], b[0]);
        assert_eq!(a[1], -b[1]);
        assert_eq!(a[2], b[2]);
        let c = [center_offset(&p, 3.0).unwrap(), 0.0, height(&p, 3.0).unwrap()];
        for v in [0.0, 1.0, 2.5, 4.0] {
            let x = parameterize(&p, 3.0, v).unwrap();
            assert_abs_diff_eq!(fd::norm(fd::sub(x, c)), 3f64.sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn catenoid_closed_form() {
        assert_eq!(catenoid_height(1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(catenoid_height(1.0, 2.0).unwrap(), (1.0 + 2f64.sqrt()).ln(), epsilon = 1e-15);
        let quad = radial_height(0.0, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(quad, (1.0 + 2f64.sqrt()).ln(), epsilon = 1e-8);
        // λ = 2, q = 1: the quadrature value is arcsinh(1)/√2.
        let quad = radial_height(0.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(catenoid_height(2.0, 1.0).unwrap(), quad, epsilon = 1e-8);
        assert_abs_diff_eq!(quad, 1f64.asinh() / 2f64.sqrt(), epsilon = 1e-8);
        assert!(catenoid_height(2.0, 0.1).is_err());
    }

    #[test]
    fn general_height_reduces_to_unit_a() {
        let p = RiemannParams::new(1.3).unwrap();
        for q in [p.q1 + 0.01, 1.5, 3.0] {
            assert_abs_diff_eq!(radial_height(1.0, 1.3, q).unwrap(), height(&p, q).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn gauss_limit_values() {
        let p = RiemannParams::new(0.0).unwrap();
        assert_abs_diff_eq!(gauss_limit(&p).unwrap(), -1.0, epsilon = 1e-6);
        let p = RiemannParams::new(1.0).unwrap();
        assert_abs_diff_eq!(gauss_limit(&p).unwrap(), -1.618034, epsilon = 1e-5);
    }

    #[test]
    fn gauss_ratio_matches_finite_difference_normal() {
        for lam in [0.5, 1.0, 2.0] {
            let p = RiemannParams::new(lam).unwrap();
            let q = 1e4;
            let chart = LocalChart::new(&p, q).unwrap();
            let part = fd::partials(&|a, b| chart.eval(a, b), q, 0.0, 1e-2, 1e-1);
            let n = fd::cross(part.xu, part.xv);
            let n = fd::scale(n, 1.0 / fd::norm(n));
            let ratio = n[0] / (1.0 - n[2]);
            assert!((ratio - gauss_ratio(&p, q)).abs() < 1e-6, "{ratio} vs {}", gauss_ratio(&p, q));
            let closed = 2.0 / (lam - (lam * lam + 4.0f64).sqrt());
            assert!((gauss_limit(&p).unwrap() - closed).abs() < 1e-4);
        }
    }

    #[test]
    fn enneper_canonical() {
        let d = FoliationData::canonical();
        assert_eq!(enneper_coefficients(&d), [0.0, 0.0, 0.0, 0.0, -3.0, 0.0, 0.0]);
        assert!(enneper_fourier_check(&d).unwrap() < 1e-5);
    }

    #[test]
    fn enneper_tangent_velocity() {
        let d = FoliationData { beta: 0.0, delta: 0.0, r: 1.3, kappa: 0.7, ..FoliationData::canonical() };
        let a = enneper_coefficients(&d);
        assert_abs_diff_eq!(a[0], -0.5 * 1.3f64.powi(5) * 0.7f64.powi(3), epsilon = 1e-14);
    }

    #[test]
    fn enneper_a5_homogeneity() {
        let base = FoliationData { r: 1.2, kappa: 0.8, delta: 1.2 * 0.8, ..FoliationData::canonical() };
        let c = 1.7;
        let scaled = FoliationData { r: c * base.r, delta: c * base.delta, ..base };
        let a = enneper_coefficients(&base)[4];
        let b = enneper_coefficients(&scaled)[4];
        assert_abs_diff_eq!(b, c.powi(5) * a, epsilon = 1e-12);
    }

    #[test]
    fn enneper_zero_velocity() {
        let d = FoliationData { delta: 0.0, r: 0.9, kappa: 1.1, ..FoliationData::canonical() };
        let a = enneper_coefficients(&d);
        for i in [1, 2, 3, 5, 6] {
            assert_eq!(a[i], 0.0);
        }
        assert!(enneper_fourier_check(&d).unwrap() < 1e-5);
    }

    #[test]
    fn radius_equations_hold() {
        for lam in [0.5, 1.0, 2.0] {
            let p = RiemannParams::new(lam).unwrap();
            for k in 1..=5 {
                let z = p.zeta * 0.08 * k as f64;
                let (r11, r12) = radius_ode_residuals(&p, z, 1e-4, 1e-3).unwrap();
                assert!(r11.abs() < 1e-4, "λ={lam} z={z} r11={r11}");
                assert!(r12.abs() < 1e-6, "λ={lam} z={z} r12={r12}");
            }
        }
    }

    #[test]
    fn classical_surface_is_minimal() {
        let p = RiemannParams::new(1.0).unwrap();
        for q in [p.q1 + 0.3, 2.0, 4.0] {
            for v in [0.0, 1.0, 2.0] {
                let h = mean_curvature_fd(&p, q, v, 1e-4, 1e-3).unwrap();
                assert!(h.abs() < 1e-3, "H = {h} at q={q}");
            }
        }
    }
}
