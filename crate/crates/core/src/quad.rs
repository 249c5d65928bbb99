//! Adaptive Gauss–Kronrod quadrature along polyline paths, plus substitution
//! rules for endpoint square-root singularities and infinite tails.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("adaptive refinement exceeded {limit} subdivisions (error estimate {estimate:e})")]
    SubdivisionLimit { limit: usize, estimate: f64 },
    #[error("integrand returned a non-finite value at parameter {at}")]
    NonFinite { at: f64 },
    #[error("tail decay exponent {p} does not exceed 1")]
    Divergent { p: f64 },
    #[error("invalid quadrature settings: {0}")]
    InvalidSettings(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_subdivisions: 2000 }
    }
}

impl QuadSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, QuadError> {
        let s = Self { abs_tol, rel_tol, max_subdivisions };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(QuadError::InvalidSettings("tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::InvalidSettings("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Values that can be integrated: a vector space over the reals with a norm.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Three complex components, e.g. the Weierstrass forms integrated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C3(pub [Complex64; 3]);

impl C3 {
    pub fn re(&self) -> [f64; 3] {
        [self.0[0].re, self.0[1].re, self.0[2].re]
    }
    pub fn im(&self) -> [f64; 3] {
        [self.0[0].im, self.0[1].im, self.0[2].im]
    }
    pub fn scale(&self, c: Complex64) -> C3 {
        C3([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }
}

impl Add for C3 {
    type Output = C3;
    fn add(self, o: C3) -> C3 {
        C3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for C3 {
    type Output = C3;
    fn sub(self, o: C3) -> C3 {
        C3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for C3 {
    type Output = C3;
    fn mul(self, c: f64) -> C3 {
        C3([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }
}

impl Integrand for C3 {
    fn zero() -> Self {
        C3([Complex64::new(0.0, 0.0); 3])
    }
    fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
    fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error
            .partial_cmp(&o.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| o.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn gk15<T: Integrand, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Result<(T, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { at: c });
    }
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { at: c - x });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { at: c + x });
        }
        let s = f1 + f2;
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    Ok((kron, (kron - gauss).norm()))
}

/// Globally adaptive GK15 over the real interval split at `breaks`
/// (sorted, at least two entries). Returns the value and error estimate.
pub fn integrate_breaks<T, F>(mut f: F, breaks: &[f64], s: &QuadSettings) -> Result<(T, f64), QuadError>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    s.validate()?;
    if breaks.len() < 2 {
        return Ok((T::zero(), 0.0));
    }
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (v, e) = gk15(&mut f, w[0], w[1])?;
        total = total + v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut subdivisions = 0usize;
    loop {
        let target = s.abs_tol.max(s.rel_tol * total.norm());
        if err <= target {
            return Ok((total, err));
        }
        if subdivisions >= s.max_subdivisions {
            return Err(QuadError::SubdivisionLimit { limit: s.max_subdivisions, estimate: err });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => return Ok((total, err)),
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel cannot be split further in double precision.
            return Err(QuadError::SubdivisionLimit { limit: s.max_subdivisions, estimate: err });
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, worst.b)?;
        total = total - worst.value + v1 + v2;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
        if subdivisions.is_multiple_of(64) {
            // Re-sum to limit drift from repeated updates.
            total = heap.iter().fold(T::zero(), |acc, p| acc + p.value);
            err = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Adaptive quadrature of a real function on `[a, b]`.
pub fn integrate_real<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, s: &QuadSettings) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_breaks(f, &[b, a], s).map(|(v, _)| -v);
    }
    integrate_breaks(f, &[a, b], s).map(|(v, _)| v)
}

/// A polyline in the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPath {
    nodes: Vec<Complex64>,
    clearance: f64,
}

impl ComplexPath {
    pub fn new(nodes: Vec<Complex64>) -> Result<Self, QuadError> {
        Self::with_clearance(nodes, 0.0)
    }

    pub fn with_clearance(nodes: Vec<Complex64>, clearance: f64) -> Result<Self, QuadError> {
        if !(clearance >= 0.0) {
            return Err(QuadError::InvalidPath("clearance must be nonnegative".into()));
        }
        if nodes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QuadError::InvalidPath("non-finite node".into()));
        }
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(QuadError::InvalidPath("consecutive nodes coincide".into()));
        }
        Ok(Self { nodes, clearance })
    }

    /// Straight segment from `a` to `b`.
    pub fn segment(a: Complex64, b: Complex64) -> Result<Self, QuadError> {
        Self::new(vec![a, b])
    }

    /// Closed regular polygon approximating the circle `|z - center| = radius`,
    /// starting at `center + radius` and traversed `turns` times counterclockwise.
    pub fn circle(center: Complex64, radius: f64, sides: usize, turns: usize) -> Result<Self, QuadError> {
        if !(radius > 0.0) || sides < 3 || turns < 1 {
            return Err(QuadError::InvalidPath("degenerate circle".into()));
        }
        let mut nodes = Vec::with_capacity(sides * turns + 1);
        for k in 0..=(sides * turns) {
            let th = 2.0 * std::f64::consts::PI * (k % sides) as f64 / sides as f64;
            nodes.push(center + Complex64::from_polar(radius, th));
        }
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn start(&self) -> Option<Complex64> {
        self.nodes.first().copied()
    }

    pub fn end(&self) -> Option<Complex64> {
        self.nodes.last().copied()
    }

    pub fn segment_count(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_closed(&self) -> bool {
        self.nodes.len() > 2 && self.nodes.first() == self.nodes.last()
    }

    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self { nodes, clearance: self.clearance }
    }

    /// This path followed by `other`; the end of `self` must equal the start of `other`.
    pub fn concat(&self, other: &ComplexPath) -> Result<Self, QuadError> {
        if self.nodes.is_empty() {
            return Ok(other.clone());
        }
        if other.nodes.is_empty() {
            return Ok(self.clone());
        }
        if self.end() != other.start() {
            return Err(QuadError::InvalidPath("paths do not join".into()));
        }
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes[1..]);
        Self::with_clearance(nodes, self.clearance.min(other.clearance))
    }

    /// The same geometry traversed `times` times (closed paths only).
    pub fn repeated(&self, times: usize) -> Result<Self, QuadError> {
        if !self.is_closed() {
            return Err(QuadError::InvalidPath("only closed paths can be repeated".into()));
        }
        let mut nodes = self.nodes.clone();
        for _ in 1..times {
            nodes.extend_from_slice(&self.nodes[1..]);
        }
        Self::with_clearance(nodes, self.clearance)
    }

    /// Point at global parameter `s` in `[0, segment_count]`, with the segment index and `dz/ds`.
    pub fn point_at(&self, s: f64) -> (usize, Complex64, Complex64) {
        let n = self.segment_count();
        let k = (s.floor().max(0.0) as usize).min(n - 1);
        let t = s - k as f64;
        let a = self.nodes[k];
        let b = self.nodes[k + 1];
        (k, a + (b - a) * t, b - a)
    }

    /// Smallest distance from the path to `p`.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        if self.nodes.len() == 1 {
            return (self.nodes[0] - p).norm();
        }
        self.nodes.windows(2).map(|w| segment_distance(w[0], w[1], p)).fold(f64::INFINITY, f64::min)
    }

    /// Checks that every point of the path keeps at least `clearance` from each exclusion point.
    pub fn check_exclusions(&self, exclusions: &[Complex64]) -> Result<(), QuadError> {
        for &e in exclusions {
            let d = self.distance_to(e);
            if d < self.clearance {
                return Err(QuadError::InvalidPath(format!(
                    "path passes within {d:e} of excluded point {e} (clearance {})",
                    self.clearance
                )));
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.nodes.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

pub(crate) fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

/// Line integral of a vector-valued integrand along a polyline. The integrand
/// receives the global path parameter, the point `z`, and returns the density;
/// the `dz` factor is applied here.
pub fn integrate_path_with<T, F>(mut f: F, path: &ComplexPath, s: &QuadSettings) -> Result<T, QuadError>
where
    T: Integrand + Mul<Complex64, Output = T>,
    F: FnMut(f64, Complex64) -> T,
{
    let n = path.segment_count();
    if n == 0 {
        return Ok(T::zero());
    }
    let breaks: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    integrate_breaks(
        |t| {
            let (_, z, dz) = path.point_at(t);
            f(t, z) * dz
        },
        &breaks,
        s,
    )
    .map(|(v, _)| v)
}

impl Mul<Complex64> for C3 {
    type Output = C3;
    fn mul(self, c: Complex64) -> C3 {
        self.scale(c)
    }
}

/// Line integral `∫_path f(z) dz`.
pub fn integrate_path<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    path: &ComplexPath,
    s: &QuadSettings,
) -> Result<Complex64, QuadError> {
    integrate_path_with(|_, z| f(z), path, s)
}

/// `∫_a^b f(u) du` where `f` may blow up like `(u - a)^(-1/2)` at `a`.
pub fn integrate_sqrt_singular<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    s: &QuadSettings,
) -> Result<f64, QuadError> {
    if !(a < b) {
        return Err(QuadError::InvalidSettings(format!("need a < b, got a = {a}, b = {b}")));
    }
    let top = (b - a).sqrt();
    integrate_breaks(|t| 2.0 * t * f(a + t * t), &[0.0, top], s).map(|(v, _)| v)
}

/// Change of variables used to map `[a, ∞)` onto `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMap {
    /// `u = a / v`
    Inverse,
    /// `u = a / v²`, smooth for `u^(-3/2)` decay
    InverseSquare,
}

/// `∫_a^∞ f(u) du` for `f(u) = O(u^-p)`, `p > 1`, using `u = a/v`.
pub fn integrate_tail<F: FnMut(f64) -> f64>(f: F, a: f64, p: f64, s: &QuadSettings) -> Result<f64, QuadError> {
    integrate_tail_with(f, a, p, TailMap::Inverse, s)
}

pub fn integrate_tail_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    p: f64,
    map: TailMap,
    s: &QuadSettings,
) -> Result<f64, QuadError> {
    if !(p > 1.0) {
        return Err(QuadError::Divergent { p });
    }
    if !(a > 0.0) {
        return Err(QuadError::InvalidSettings(format!("tail start must be positive, got {a}")));
    }
    let g = |v: f64| -> f64 {
        match map {
            TailMap::Inverse => {
                let u = a / v;
                f(u) * a / (v * v)
            }
            TailMap::InverseSquare => {
                let u = a / (v * v);
                f(u) * 2.0 * a / (v * v * v)
            }
        }
    };
    integrate_breaks(g, &[0.0, 1.0], s).map(|(v, _)| v)
}
