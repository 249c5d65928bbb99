//! Finite-difference differential geometry of parameterized surfaces.

pub type V3 = [f64; 3];

pub fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: V3, c: f64) -> V3 {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

pub fn det3(a: V3, b: V3, c: V3) -> f64 {
    dot(a, cross(b, c))
}

/// First and second partial derivatives of a surface patch at `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub xu: V3,
    pub xv: V3,
    pub xuu: V3,
    pub xuv: V3,
    pub xvv: V3,
}

/// Central differences: step `h1` for first and `h2` for second derivatives.
pub fn partials<F: Fn(f64, f64) -> V3 + ?Sized>(x: &F, u: f64, v: f64, h1: f64, h2: f64) -> Partials {
    let d1 = |a: V3, b: V3, h: f64| scale(sub(a, b), 0.5 / h);
    let xu = d1(x(u + h1, v), x(u - h1, v), h1);
    let xv = d1(x(u, v + h1), x(u, v - h1), h1);
    let c = x(u, v);
    let second = |p: V3, m: V3| scale(add(sub(p, c), sub(m, c)), 1.0 / (h2 * h2));
    let xuu = second(x(u + h2, v), x(u - h2, v));
    let xvv = second(x(u, v + h2), x(u, v - h2));
    let pp = x(u + h2, v + h2);
    let pm = x(u + h2, v - h2);
    let mp = x(u - h2, v + h2);
    let mm = x(u - h2, v - h2);
    let xuv = scale(add(sub(pp, pm), sub(mm, mp)), 0.25 / (h2 * h2));
    Partials { xu, xv, xuu, xuv, xvv }
}

/// `(E, F, G, e, f, g)` with the unit normal `X_u × X_v / |X_u × X_v|`.
pub fn fundamental_forms(p: &Partials) -> [f64; 6] {
    let n = cross(p.xu, p.xv);
    let nn = norm(n);
    let n = scale(n, 1.0 / nn);
    [dot(p.xu, p.xu), dot(p.xu, p.xv), dot(p.xv, p.xv), dot(p.xuu, n), dot(p.xuv, n), dot(p.xvv, n)]
}

pub fn mean_curvature(p: &Partials) -> f64 {
    let [e1, f1, g1, e2, f2, g2] = fundamental_forms(p);
    (e2 * g1 - 2.0 * f2 * f1 + g2 * e1) / (2.0 * (e1 * g1 - f1 * f1))
}

pub fn gaussian_curvature(p: &Partials) -> f64 {
    let [e1, f1, g1, e2, f2, g2] = fundamental_forms(p);
    (e2 * g2 - f2 * f2) / (e1 * g1 - f1 * f1)
}

pub fn gaussian_curvature_fd<F: Fn(f64, f64) -> V3 + ?Sized>(x: &F, u: f64, v: f64, h: f64) -> f64 {
    gaussian_curvature(&partials(x, u, v, h, h.max(1e-3)))
}

pub fn mean_curvature_fd<F: Fn(f64, f64) -> V3 + ?Sized>(x: &F, u: f64, v: f64, h1: f64, h2: f64) -> f64 {
    mean_curvature(&partials(x, u, v, h1, h2))
}

/// `max(| |X_u|² - |X_v|² |, |⟨X_u, X_v⟩|) / |X_u|²`
pub fn conformality_defect(p: &Partials) -> f64 {
    let e = dot(p.xu, p.xu);
    let g = dot(p.xv, p.xv);
    let f = dot(p.xu, p.xv);
    (e - g).abs().max(f.abs()) / e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_curvatures() {
        let r = 2.0;
        let x = |u: f64, v: f64| [r * u.cos() * v.cos(), r * u.cos() * v.sin(), r * u.sin()];
        let p = partials(&x, 0.3, 0.7, 1e-4, 1e-3);
        assert!((gaussian_curvature(&p) - 0.25).abs() < 1e-5);
        assert!((mean_curvature(&p).abs() - 0.5).abs() < 1e-5);
    }

    #[test]
    fn helicoid_is_minimal_and_conformal() {
        let x = |u: f64, v: f64| [u.sinh() * v.cos(), u.sinh() * v.sin(), v];
        let p = partials(&x, 0.4, 1.1, 1e-4, 1e-3);
        assert!(mean_curvature(&p).abs() < 1e-6);
        assert!(conformality_defect(&p) < 1e-7);
    }
}
