//! Shiffman function of a Gauss map jet, the Jacobi operator on a conformal
//! grid, and the Gauss map → KdV potential pipeline with the KdV hierarchy as
//! exact differential polynomials.

use crate::curve::{self, CurveError, CurveParams, CurvePoint, WeierstrassForms, C};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

const I: C = C::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShiffError {
    #[error("Gauss map vanishes or is infinite at this point")]
    PoleOfGaussMap,
    #[error("jet of order {got} is too short, need order {needed}")]
    JetTooShort { needed: usize, got: usize },
    #[error("grid {nx}x{ny} is too small, need at least 3x3")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("field has {got} values, grid has {expected} nodes")]
    FieldSize { expected: usize, got: usize },
    #[error("formal antidifferentiation left a nonzero remainder: {0}")]
    NotExactDerivative(String),
    #[error("hierarchy level {0} exceeds the configured maximum {MAX_LEVEL}")]
    LevelTooHigh(usize),
    #[error("need at least one sample")]
    NoSamples,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Values `f, f', …, f^{(k)}` at a point, derivatives in the conformal
/// coordinate `ξ` with `φ₃ = dξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub values: Vec<C>,
}

impl Jet {
    pub fn new(values: Vec<C>) -> Self {
        assert!(!values.is_empty(), "a jet needs at least a value");
        Self { values }
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> C {
        self.values[k]
    }

    fn require(&self, needed: usize) -> Result<(), ShiffError> {
        if self.order() < needed {
            Err(ShiffError::JetTooShort { needed, got: self.order() })
        } else {
            Ok(())
        }
    }

    /// Jet of `g = e^ξ` (all derivatives equal).
    pub fn exponential(xi: C, order: usize) -> Self {
        Self::new(vec![xi.exp(); order + 1])
    }

    /// Taylor coefficients `f^{(k)}/k!`.
    pub fn taylor(&self) -> Vec<C> {
        let mut fact = 1.0;
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                if k > 0 {
                    fact *= k as f64;
                }
                v / fact
            })
            .collect()
    }

    pub fn from_taylor(coeffs: &[C]) -> Self {
        let mut fact = 1.0;
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    v * fact
                })
                .collect(),
        )
    }

    /// Jet of the Gauss map of `M_σ` at `p`, from the curve relations.
    pub fn gauss_on_curve(params: &CurveParams, p: &CurvePoint, order: usize) -> Self {
        Self::new(curve::gauss_jet(params, p, order))
    }

    /// The jet of `f(cξ)` given the jet of `f` at the image point.
    pub fn rescaled(&self, c: C) -> Self {
        let mut pow = C::new(1.0, 0.0);
        Self::new(
            self.values
                .iter()
                .map(|v| {
                    let r = v * pow;
                    pow *= c;
                    r
                })
                .collect(),
        )
    }
}

/// Truncated power series helpers on Taylor coefficients.
pub mod series {
    use super::C;

    pub fn mul(a: &[C], b: &[C]) -> Vec<C> {
        let n = a.len().min(b.len());
        (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
    }

    /// `a / b`, requires `b[0] ≠ 0`.
    pub fn div(a: &[C], b: &[C]) -> Vec<C> {
        let n = a.len().min(b.len());
        let mut q = vec![C::new(0.0, 0.0); n];
        for k in 0..n {
            let mut s = a[k];
            for i in 1..=k {
                s -= b[i] * q[k - i];
            }
            q[k] = s / b[0];
        }
        q
    }

    pub fn deriv(a: &[C]) -> Vec<C> {
        a.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect()
    }

    pub fn lin(alpha: C, a: &[C], beta: C, b: &[C]) -> Vec<C> {
        a.iter().zip(b.iter()).map(|(x, y)| alpha * x + beta * y).collect()
    }
}

fn nonzero(g: C) -> Result<(), ShiffError> {
    if g.norm() == 0.0 || !g.re.is_finite() || !g.im.is_finite() {
        Err(ShiffError::PoleOfGaussMap)
    } else {
        Ok(())
    }
}

/// `|g|/(1+|g|²) · Re(g'/g)`, the bracket used for the planar curvature of
/// horizontal level curves. For the unit catenoid neck this gives ½.
pub fn level_curvature_raw(j: &Jet) -> Result<f64, ShiffError> {
    j.require(1)?;
    let g = j.get(0);
    nonzero(g)?;
    let a = g.norm();
    Ok(a / (1.0 + a * a) * (j.get(1) / g).re)
}

/// `(3/2)(g'/g)² - g''/g - (g'/g)²/(1+|g|²)`
fn shiffman_bracket(j: &Jet) -> Result<C, ShiffError> {
    j.require(2)?;
    let g = j.get(0);
    nonzero(g)?;
    let x = j.get(1) / g;
    Ok(1.5 * x * x - j.get(2) / g - x * x / (1.0 + g.norm_sqr()))
}

/// Shiffman function `S = Im[(3/2)(g'/g)² - g''/g - (g'/g)²/(1+|g|²)]`.
pub fn shiffman(j: &Jet) -> Result<f64, ShiffError> {
    Ok(shiffman_bracket(j)?.im)
}

/// `S + iS* = -i·bracket`: the real part is [`shiffman`] and the imaginary
/// part `S*` is minus the real part of the bracket.
pub fn shiffman_complex(j: &Jet) -> Result<C, ShiffError> {
    Ok(-I * shiffman_bracket(j)?)
}

/// `ġ = (i/2)(g''' - 3g'g''/g + (3/2)(g')³/g²)`
pub fn shiffman_velocity(j: &Jet) -> Result<C, ShiffError> {
    j.require(3)?;
    let g = j.get(0);
    nonzero(g)?;
    let (g1, g2, g3) = (j.get(1), j.get(2), j.get(3));
    Ok(0.5 * I * (g3 - 3.0 * g1 * g2 / g + 1.5 * g1 * g1 * g1 / (g * g)))
}

/// Nodes `ξ = origin + spacing·(i + j·i)` carrying Gauss map jets.
#[derive(Debug, Clone)]
pub struct ConformalGrid {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub g_jets: Vec<Jet>,
    pub metric: Vec<f64>,
}

impl ConformalGrid {
    pub fn from_fn<F: Fn(C) -> Jet>(nx: usize, ny: usize, spacing: f64, origin: C, f: F) -> Result<Self, ShiffError> {
        if nx < 3 || ny < 3 {
            return Err(ShiffError::GridTooSmall { nx, ny });
        }
        let mut g_jets = Vec::with_capacity(nx * ny);
        let mut metric = Vec::with_capacity(nx * ny);
        for jy in 0..ny {
            for ix in 0..nx {
                let xi = origin + C::new(ix as f64 * spacing, jy as f64 * spacing);
                let jet = f(xi);
                jet.require(1)?;
                let a = jet.get(0).norm();
                if a == 0.0 || !a.is_finite() {
                    return Err(ShiffError::PoleOfGaussMap);
                }
                metric.push(0.5 * (a + 1.0 / a));
                g_jets.push(jet);
            }
        }
        Ok(Self { nx, ny, spacing, g_jets, metric })
    }

    pub fn index(&self, ix: usize, jy: usize) -> usize {
        ix + self.nx * jy
    }

    pub fn len(&self) -> usize {
        self.g_jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_jets.is_empty()
    }

    /// Applies `f` to every node jet.
    pub fn field<F: Fn(&Jet) -> Result<f64, ShiffError>>(&self, f: F) -> Result<Vec<f64>, ShiffError> {
        self.g_jets.iter().map(f).collect()
    }

    pub fn curvature(&self, k: usize) -> Result<f64, ShiffError> {
        let j = &self.g_jets[k];
        let forms = WeierstrassForms::from_g(j.get(0), C::new(1.0, 0.0));
        Ok(curve::gaussian_curvature(&forms, j.get(1))?)
    }
}

/// Max over interior nodes of `|Λ⁻²Δf - 2Kf|` with the five-point Laplacian.
pub fn jacobi_residual(grid: &ConformalGrid, field: &[f64]) -> Result<f64, ShiffError> {
    if grid.nx < 3 || grid.ny < 3 {
        return Err(ShiffError::GridTooSmall { nx: grid.nx, ny: grid.ny });
    }
    if field.len() != grid.len() {
        return Err(ShiffError::FieldSize { expected: grid.len(), got: field.len() });
    }
    let h2 = grid.spacing * grid.spacing;
    let mut worst = 0.0f64;
    for jy in 1..grid.ny - 1 {
        for ix in 1..grid.nx - 1 {
            let k = grid.index(ix, jy);
            let lap = (field[grid.index(ix + 1, jy)]
                + field[grid.index(ix - 1, jy)]
                + field[grid.index(ix, jy + 1)]
                + field[grid.index(ix, jy - 1)]
                - 4.0 * field[k])
                / h2;
            let lam = grid.metric[k];
            let r = lap / (lam * lam) - 2.0 * grid.curvature(k)? * field[k];
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// Jet of `u = -3(g')²/(4g²) + g''/(2g)` up to order `m`.
pub fn potential_u(jg: &Jet, m: usize) -> Result<Jet, ShiffError> {
    jg.require(m + 2)?;
    nonzero(jg.get(0))?;
    let g = jg.taylor();
    let x = series::div(&series::deriv(&g), &g);
    let u = miura_series(&x);
    Ok(Jet::from_taylor(&u[..=m]))
}

/// `u = ½x' - ¼x²` on Taylor coefficients (one order shorter than `x`).
fn miura_series(x: &[C]) -> Vec<C> {
    let dx = series::deriv(x);
    let x2 = series::mul(x, x);
    series::lin(C::new(0.5, 0.0), &dx, C::new(-0.25, 0.0), &x2[..dx.len()])
}

/// Miura map `u = ½x' - ¼x²` on jets.
pub fn miura(jx: &Jet) -> Result<Jet, ShiffError> {
    jx.require(1)?;
    Ok(Jet::from_taylor(&miura_series(&jx.taylor())))
}

/// `x = g'/g` as a jet one order shorter than `jg`.
pub fn log_derivative(jg: &Jet) -> Result<Jet, ShiffError> {
    jg.require(1)?;
    nonzero(jg.get(0))?;
    let g = jg.taylor();
    Ok(Jet::from_taylor(&series::div(&series::deriv(&g), &g)))
}

/// `-u''' - 6uu'`
pub fn kdv_flow(ju: &Jet) -> Result<C, ShiffError> {
    ju.require(3)?;
    Ok(-ju.get(3) - 6.0 * ju.get(0) * ju.get(1))
}

/// `(i/2)(x''' - (3/2)x²x')`
pub fn mkdv_flow(jx: &Jet) -> Result<C, ShiffError> {
    jx.require(3)?;
    let x = jx.get(0);
    Ok(0.5 * I * (jx.get(3) - 1.5 * x * x * jx.get(1)))
}

/// Under `ẋ = mkdv_flow`, the Miura image moves by `MIURA_TIME_FACTOR · kdv_flow`.
pub const MIURA_TIME_FACTOR: C = C::new(0.0, -0.5);

/// `d/dt (½x' - ¼x²)` when every point of the `x`-jet moves by the mKdV flow.
pub fn miura_velocity(jx: &Jet) -> Result<C, ShiffError> {
    jx.require(4)?;
    let x = jx.taylor();
    let dx = series::deriv(&x);
    let d3x = series::deriv(&series::deriv(&dx));
    let x2 = series::mul(&x, &x);
    let x2dx = series::mul(&x2, &dx);
    // ẋ as a series, valid through first order.
    let xdot = series::lin(0.5 * I, &d3x, -0.75 * I, &x2dx[..d3x.len()]);
    let dxdot = series::deriv(&xdot);
    Ok(0.5 * dxdot[0] - 0.5 * x[0] * xdot[0])
}

/// A differential polynomial in `u, u', u'', …` with exact rational
/// coefficients. Monomials are ascending lists of derivative orders.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Vec<usize>, BigRational>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    /// The variable `u^{(k)}`.
    pub fn var(k: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![k], BigRational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<usize>, BigRational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (mut k, c) in it {
            k.sort_unstable();
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, key: Vec<usize>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &[usize]) -> BigRational {
        let mut k = monomial.to_vec();
        k.sort_unstable();
        self.terms.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_order(&self) -> Option<usize> {
        self.terms.keys().filter_map(|k| k.last().copied()).max()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), -c.clone());
        }
        r
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut r = Self::zero();
        for (k, v) in &self.terms {
            r.add_term(k.clone(), v * c);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let mut k = ka.clone();
                k.extend_from_slice(kb);
                k.sort_unstable();
                r.add_term(k, ca * cb);
            }
        }
        r
    }

    /// Total derivative `∂_z`.
    pub fn derivative(&self) -> Self {
        let mut r = Self::zero();
        for (k, c) in &self.terms {
            for i in 0..k.len() {
                if i > 0 && k[i] == k[i - 1] {
                    continue;
                }
                let mult = k.iter().filter(|&&o| o == k[i]).count();
                let mut nk = k.clone();
                nk[i] += 1;
                nk.sort_unstable();
                r.add_term(nk, c * BigRational::from_integer(BigInt::from(mult)));
            }
        }
        r
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// A polynomial `R` with `∂_z R = self` and no constant term.
    pub fn antiderivative(&self) -> Result<Self, ShiffError> {
        let mut rem = self.clone();
        let mut out = Self::zero();
        let mut guard = 0usize;
        while !rem.is_zero() {
            guard += 1;
            if guard > 100_000 {
                return Err(ShiffError::NotExactDerivative("iteration limit".into()));
            }
            // Highest-order term.
            let (key, c) = rem
                .terms
                .iter()
                .max_by(|a, b| a.0.last().cmp(&b.0.last()).then_with(|| a.0.len().cmp(&b.0.len()).reverse()))
                .map(|(k, c)| (k.clone(), c.clone()))
                .unwrap();
            let k = match key.last() {
                Some(&k) if k > 0 => k,
                _ => return Err(ShiffError::NotExactDerivative(format!("{rem}"))),
            };
            if key.iter().filter(|&&o| o == k).count() > 1 {
                return Err(ShiffError::NotExactDerivative(format!("{rem}")));
            }
            let mut rest: Vec<usize> = key[..key.len() - 1].to_vec();
            let p = rest.iter().filter(|&&o| o == k - 1).count();
            rest.push(k - 1);
            rest.sort_unstable();
            let coef = c / BigRational::from_integer(BigInt::from(p + 1));
            let cand = Self::from_terms([(rest, coef)]);
            rem = rem.sub(&cand.derivative());
            out = out.add(&cand);
        }
        Ok(out)
    }

    /// Evaluates on a jet of `u`.
    pub fn evaluate(&self, j: &Jet) -> Result<C, ShiffError> {
        if let Some(m) = self.max_order() {
            j.require(m)?;
        }
        let mut s = C::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut t = C::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for &o in k {
                t *= j.get(o);
            }
            s += t;
        }
        Ok(s)
    }
}

fn var_name(k: usize) -> String {
    if k <= 4 {
        format!("u{}", "'".repeat(k))
    } else {
        format!("u^({k})")
    }
}

fn monomial_name(key: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < key.len() {
        let o = key[i];
        let n = key[i..].iter().take_while(|&&x| x == o).count();
        let name = var_name(o);
        parts.push(match (n, o > 4) {
            (1, _) => name,
            (_, false) => format!("{name}^{n}"),
            (_, true) => format!("({name})^{n}"),
        });
        i += n;
    }
    parts.join(" ")
}

impl fmt::Display for DiffPoly {
    /// Monomials sorted by their derivative orders in decreasing lexicographic
    /// order, e.g. `u'''' + 10 u u'' + 5 u'^2 + 10 u^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<(&Vec<usize>, &BigRational)> = self.terms.iter().collect();
        keys.sort_by(|a, b| {
            let ra: Vec<usize> = a.0.iter().rev().copied().collect();
            let rb: Vec<usize> = b.0.iter().rev().copied().collect();
            rb.cmp(&ra)
        });
        for (idx, (k, c)) in keys.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono = monomial_name(k);
            let coef =
                if mag.is_integer() { format!("{}", mag.numer()) } else { format!("{}/{}", mag.numer(), mag.denom()) };
            if mono.is_empty() {
                write!(f, "{coef}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coef} {mono}")?;
            }
        }
        Ok(())
    }
}

/// Highest hierarchy level kept in the shared table.
pub const MAX_LEVEL: usize = 6;

/// `(∂³ + 4u∂ + 2u')P`
pub fn recurrence_operator(p: &DiffPoly) -> DiffPoly {
    let u = DiffPoly::var(0);
    let u1 = DiffPoly::var(1);
    let four = DiffPoly::constant(rat(4, 1));
    let two = DiffPoly::constant(rat(2, 1));
    let dp = p.derivative();
    p.nth_derivative(3).add(&four.mul(&u).mul(&dp)).add(&two.mul(&u1).mul(p))
}

/// `P₀, …, P_n` from `∂P_{k+1} = (∂³ + 4u∂ + 2u')P_k`, `P₀ = ½`, zero constants.
pub fn hierarchy_up_to(n: usize) -> Result<Vec<DiffPoly>, ShiffError> {
    let mut out = vec![DiffPoly::constant(rat(1, 2))];
    for k in 0..n {
        let next = recurrence_operator(&out[k]).antiderivative()?;
        out.push(next);
    }
    Ok(out)
}

fn table() -> Result<&'static Vec<DiffPoly>, ShiffError> {
    static TABLE: OnceLock<Result<Vec<DiffPoly>, ShiffError>> = OnceLock::new();
    TABLE.get_or_init(|| hierarchy_up_to(MAX_LEVEL)).as_ref().map_err(|e| e.clone())
}

/// The hierarchy polynomial `P_n`, `n ≤ MAX_LEVEL`.
#[allow(non_snake_case)]
pub fn hierarchy_P(n: usize) -> Result<DiffPoly, ShiffError> {
    if n > MAX_LEVEL {
        return Err(ShiffError::LevelTooHigh(n));
    }
    Ok(table()?[n].clone())
}

/// `∂u/∂t_n = -∂_z P_{n+1}(u)`
pub fn flow_n(n: usize, ju: &Jet) -> Result<C, ShiffError> {
    ju.require(2 * n + 1)?;
    let p = hierarchy_P(n + 1)?;
    Ok(-p.derivative().evaluate(ju)?)
}

/// Least-squares fit of `flow_n` by `flow_0, …, flow_{n-1}` over sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebroGeometricFit {
    pub coefficients: Vec<C>,
    pub residual: f64,
    pub rank_deficient: bool,
    pub samples: usize,
}

/// Fits the flows of the potential from the Gauss map of `M_σ`.
pub fn algebro_geometric_residual(
    params: &CurveParams,
    n: usize,
    samples: &[CurvePoint],
) -> Result<AlgebroGeometricFit, ShiffError> {
    let jets = samples
        .iter()
        .map(|p| {
            let jg = Jet::gauss_on_curve(params, p, 2 * n + 3);
            potential_u(&jg, 2 * n + 1)
        })
        .collect::<Result<Vec<_>, _>>()?;
    fit_flows(n, &jets)
}

/// Least-squares fit of `flow_n` against the lower flows on given `u`-jets.
pub fn fit_flows(n: usize, u_jets: &[Jet]) -> Result<AlgebroGeometricFit, ShiffError> {
    if u_jets.is_empty() {
        return Err(ShiffError::NoSamples);
    }
    let m = u_jets.len();
    let mut a = DMatrix::<C>::zeros(m, n);
    let mut b = DMatrix::<C>::zeros(m, 1);
    for (i, j) in u_jets.iter().enumerate() {
        for k in 0..n {
            a[(i, k)] = flow_n(k, j)?;
        }
        b[(i, 0)] = flow_n(n, j)?;
    }
    let bnorm = b.norm();
    if bnorm == 0.0 || n == 0 {
        return Ok(AlgebroGeometricFit {
            coefficients: vec![C::new(0.0, 0.0); n],
            residual: if bnorm == 0.0 { 0.0 } else { 1.0 },
            rank_deficient: n > 0 && a.norm() == 0.0,
            samples: m,
        });
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let rank_deficient = !(smin > 1e-12 * smax);
    let sol = svd.solve(&b, 1e-12 * smax).map_err(|e| ShiffError::NotExactDerivative(e.to_string()))?;
    let resid = (&a * &sol - &b).norm() / bnorm;
    Ok(AlgebroGeometricFit {
        coefficients: sol.column(0).iter().copied().collect(),
        residual: resid,
        rank_deficient,
        samples: m,
    })
}
