//! Triangle meshes of `M_σ`: sampling the fundamental piece over the
//! half-annulus, the reflection/rotation/translation extension, horizontal
//! slicing with circle fits, welding and OBJ/PLY export.

use crate::curve::{self, CurveError, CurveParams, CurvePoint, Developing, C};
use crate::fd::{self, V3};
use crate::quad::{integrate_breaks, Integrand, QuadSettings, C3};
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};
use std::io::{BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("adjacent samples ({0}, {1}) coincide")]
    DegenerateCell(usize, usize),
    #[error("degenerate point set: {0}")]
    Degenerate(String),
    #[error("points are not on a common horizontal plane (height spread {0:e})")]
    NotLevel(f64),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Rational map from the half-annulus `{e ≤ |ζ| ≤ 1, Im ζ ≥ 0}` onto the
/// upper half of the disc `|z - (1-σ)/2| ≤ (1+σ)/2` with a neighbourhood of
/// the end `z = 0` removed. `ζ = ±1 ↦ 1, -σ`; `±e` land on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainMap {
    pub sigma: f64,
    pub e: f64,
    /// Angular warp `ζ = r·exp(iπt^n)`; `1` is the plain polar grid.
    pub warp: f64,
}

impl DomainMap {
    pub fn new(sigma: f64, e: f64) -> Result<Self, MeshError> {
        Self::with_warp(sigma, e, 1.0)
    }

    pub fn with_warp(sigma: f64, e: f64, warp: f64) -> Result<Self, MeshError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(MeshError::InvalidParameter(format!("sigma = {sigma}")));
        }
        if !(e > 0.0 && e < 1.0) {
            return Err(MeshError::InvalidParameter(format!("e = {e} must lie in (0, 1)")));
        }
        if !(warp > 0.0 && warp.is_finite()) {
            return Err(MeshError::InvalidParameter(format!("warp = {warp}")));
        }
        Ok(Self { sigma, e, warp })
    }

    /// The Möbius map itself.
    pub fn apply(&self, zeta: C) -> C {
        let a = self.sigma;
        let e2 = self.e * self.e;
        let s = (4.0 * (a - 1.0).powi(2) * e2 + (1.0 + a).powi(2) * (e2 - 1.0).powi(2)).sqrt();
        let z = zeta;
        let num = -a * a * (1.0 + e2) * (z - 1.0) - 2.0 * a * (e2 - 3.0) * z - (1.0 + e2) * (1.0 + z)
            + s * (1.0 + a * (z - 1.0) + z);
        let den = 2.0 * s - 2.0 * ((1.0 + a) * (e2 - 1.0) - 2.0 * (a - 1.0) * z);
        num / den
    }

    /// Polar grid point `r ∈ [e, 1]`, `t ∈ [0, 1]`, snapped so that the
    /// corners hit `1` and `-σ` exactly and the image stays in `Im z ≥ +0`.
    pub fn polar(&self, r: f64, t: f64) -> C {
        let zeta = C::from_polar(r, std::f64::consts::PI * t.powf(self.warp));
        let z = self.apply(zeta);
        let z = C::new(z.re, if z.im > 0.0 { z.im } else { 0.0 });
        if (z - 1.0).norm() < 1e-12 {
            C::new(1.0, 0.0)
        } else if (z + self.sigma).norm() < 1e-12 * (1.0 + self.sigma) {
            C::new(-self.sigma, 0.0)
        } else {
            z
        }
    }
}

/// `w = √z·√(z-1)·√(z+σ)` with principal roots: the branch on the closed
/// upper half-plane with `w > 0` over `(1, ∞)`.
pub fn upper_w(params: &CurveParams, z: C) -> C {
    let z = C::new(z.re, if z.im > 0.0 { z.im } else { 0.0 });
    z.sqrt() * (z - 1.0).sqrt() * (z + params.sigma()).sqrt()
}

fn is_branch(params: &CurveParams, z: C) -> Option<C> {
    let bps = params.branch_points();
    bps[1..].iter().copied().find(|b| (z - b).norm() < 1e-13 * (1.0 + params.sigma()))
}

/// `∫_a^b (φ₁, φ₂, φ₃)` along the chord, on the upper branch. Either end may
/// be `1` or `-σ`.
pub fn chord_integral(params: &CurveParams, a: C, b: C, s: &QuadSettings) -> Result<C3, CurveError> {
    if a == b {
        return Ok(C3::zero());
    }
    if let Some(e) = is_branch(params, a) {
        let end = CurvePoint { z: b, w: upper_w(params, b) };
        return curve::integral_from_branch(params, e, &end, s);
    }
    if let Some(e) = is_branch(params, b) {
        let end = CurvePoint { z: a, w: upper_w(params, a) };
        return Ok(C3::zero() - curve::integral_from_branch(params, e, &end, s)?);
    }
    let d = b - a;
    let (v, _) = integrate_breaks(
        |t| {
            let z = a + d * t;
            curve::frame_factors(params, z).scale(d / upper_w(params, z))
        },
        &[0.0, 1.0],
        s,
    )?;
    Ok(v)
}

/// A rigid motion `x ↦ Lx + o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryOp {
    pub linear: [[f64; 3]; 3],
    pub offset: V3,
}

impl IsometryOp {
    pub fn identity() -> Self {
        Self::diagonal([1.0, 1.0, 1.0], [0.0; 3])
    }

    pub fn diagonal(d: V3, offset: V3) -> Self {
        let mut linear = [[0.0; 3]; 3];
        for i in 0..3 {
            linear[i][i] = d[i];
        }
        Self { linear, offset }
    }

    pub fn translation(v: V3) -> Self {
        Self::diagonal([1.0, 1.0, 1.0], v)
    }

    pub fn linear_apply(&self, x: V3) -> V3 {
        let l = &self.linear;
        [fd::dot(l[0], x), fd::dot(l[1], x), fd::dot(l[2], x)]
    }

    pub fn apply(&self, x: V3) -> V3 {
        fd::add(self.linear_apply(x), self.offset)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        let linear = std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| self.linear[i][k] * other.linear[k][j]).sum())
        });
        Self { linear, offset: self.apply(other.offset) }
    }

    pub fn inverse(&self) -> Self {
        let t = std::array::from_fn(|i| std::array::from_fn(|j| self.linear[j][i]));
        let inv = Self { linear: t, offset: [0.0; 3] };
        let o = inv.linear_apply(self.offset);
        Self { linear: t, offset: fd::scale(o, -1.0) }
    }

    pub fn det(&self) -> f64 {
        let l = &self.linear;
        fd::det3(l[0], l[1], l[2])
    }

    /// `max |LᵀL - I|`
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| self.linear[k][i] * self.linear[k][j]).sum();
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

/// Which `σ` and which transformed copy of the fundamental piece a vertex came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub sigma: f64,
    pub patch: u32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<V3>,
    pub normals: Vec<V3>,
    pub faces: Vec<[u32; 3]>,
    pub provenance: Vec<Provenance>,
    /// Placement of each patch relative to the fundamental piece.
    pub patches: Vec<IsometryOp>,
    /// Parameter `z` of each vertex on the upper branch, when known.
    pub source_z: Vec<C>,
}

impl TriMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        if self.normals.len() != n || self.provenance.len() != n {
            return Err(MeshError::Degenerate("per-vertex arrays differ in length".into()));
        }
        if !self.vertices.iter().flatten().all(|x| x.is_finite()) {
            return Err(MeshError::Degenerate("non-finite coordinate".into()));
        }
        if self.faces.iter().flatten().any(|&i| i as usize >= n) {
            return Err(MeshError::Degenerate("face index out of range".into()));
        }
        Ok(())
    }

    /// `(min, max)` of the third coordinate.
    pub fn height_range(&self) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[2]), hi.max(v[2])))
    }

    /// Image of the whole mesh under `op`, with winding flipped for reflections.
    pub fn transformed(&self, op: &IsometryOp) -> TriMesh {
        let flip = op.det() < 0.0;
        TriMesh {
            vertices: self.vertices.iter().map(|&v| op.apply(v)).collect(),
            normals: self.normals.iter().map(|&n| op.linear_apply(n)).collect(),
            faces: self.faces.iter().map(|&[a, b, c]| if flip { [a, c, b] } else { [a, b, c] }).collect(),
            provenance: self.provenance.clone(),
            patches: self.patches.iter().map(|p| op.compose(p)).collect(),
            source_z: self.source_z.clone(),
        }
    }

    /// Disjoint union; patch ids of `other` are shifted.
    pub fn append(&mut self, other: &TriMesh) {
        let base = self.vertices.len() as u32;
        let pbase = self.patches.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.normals.extend_from_slice(&other.normals);
        self.faces.extend(other.faces.iter().map(|f| [f[0] + base, f[1] + base, f[2] + base]));
        self.provenance.extend(other.provenance.iter().map(|p| Provenance { sigma: p.sigma, patch: p.patch + pbase }));
        self.patches.extend_from_slice(&other.patches);
        if self.source_z.len() + other.source_z.len() == self.vertices.len() {
            self.source_z.extend_from_slice(&other.source_z);
        } else {
            self.source_z.clear();
        }
    }
}

/// Samples `ψ(z) = Re ∫_1^z (φ₁, φ₂, φ₃)` over the image of an `nr × nt`
/// polar grid; vertex `(i, j)` has index `i·nt + j` with radius index `i`.
///
/// The column `t = 0` lies on `[f(e), 1]` and is integrated from the branch
/// point `1`; every radius row then walks its own arc in parallel.
pub fn sample_fundamental(map: &DomainMap, nr: usize, nt: usize) -> Result<TriMesh, MeshError> {
    sample_fundamental_with(map, nr, nt, &QuadSettings::default())
}

pub fn sample_fundamental_with(map: &DomainMap, nr: usize, nt: usize, s: &QuadSettings) -> Result<TriMesh, MeshError> {
    if nr < 2 || nt < 2 {
        return Err(MeshError::InvalidParameter(format!("grid {nr}x{nt} needs at least 2x2")));
    }
    let params = CurveParams::new(map.sigma)?;
    log::debug!("sampling {nr}x{nt} grid for sigma = {}, e = {}", map.sigma, map.e);
    let rs: Vec<f64> = (0..nr).map(|i| map.e + (1.0 - map.e) * i as f64 / (nr - 1) as f64).collect();
    let one = C::new(1.0, 0.0);
    // Domain points and immersed positions of one grid row.
    type Row = (Vec<C>, Vec<V3>);
    let rows: Vec<Result<Row, CurveError>> = rs
        .par_iter()
        .map(|&r| {
            let zs: Vec<C> = (0..nt).map(|j| map.polar(r, j as f64 / (nt - 1) as f64)).collect();
            let mut acc = chord_integral(&params, one, zs[0], s)?;
            let mut out = Vec::with_capacity(nt);
            out.push(acc.re());
            for j in 1..nt {
                acc = acc + chord_integral(&params, zs[j - 1], zs[j], s)?;
                out.push(acc.re());
            }
            Ok((zs, out))
        })
        .collect();
    let mut mesh = TriMesh { patches: vec![IsometryOp::identity()], ..TriMesh::default() };
    for row in rows {
        let (zs, xs) = row?;
        for (z, x) in zs.into_iter().zip(xs) {
            mesh.vertices.push(x);
            mesh.normals.push(curve::normal_from_g(params.g(z))?);
            mesh.provenance.push(Provenance { sigma: map.sigma, patch: 0 });
            mesh.source_z.push(z);
        }
    }
    let idx = |i: usize, j: usize| (i * nt + j) as u32;
    for i in 0..nr - 1 {
        for j in 0..nt - 1 {
            for (a, b) in [(idx(i, j), idx(i + 1, j)), (idx(i, j), idx(i, j + 1))] {
                let d = fd::norm(fd::sub(mesh.vertices[a as usize], mesh.vertices[b as usize]));
                if !(d > 1e-14) {
                    return Err(MeshError::DegenerateCell(a as usize, b as usize));
                }
            }
            mesh.faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            mesh.faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    orient_faces(&mut mesh);
    Ok(mesh)
}

fn face_normal(m: &TriMesh, f: &[u32; 3]) -> V3 {
    let p = |k: usize| m.vertices[f[k] as usize];
    fd::cross(fd::sub(p(1), p(0)), fd::sub(p(2), p(0)))
}

/// Flips all faces if most of them disagree with the vertex normals.
fn orient_faces(m: &mut TriMesh) {
    let agree = m
        .faces
        .iter()
        .map(|f| {
            let n = fd::add(fd::add(m.normals[f[0] as usize], m.normals[f[1] as usize]), m.normals[f[2] as usize]);
            fd::dot(face_normal(m, f), n).signum()
        })
        .sum::<f64>();
    if agree < 0.0 {
        for f in &mut m.faces {
            f.swap(1, 2);
        }
    }
}

/// `c = ψ(i√σ)` on the outer boundary arc and `t₀ = ψ(-σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalConstants {
    pub c: V3,
    pub t0: V3,
}

pub fn fundamental_constants(sigma: f64) -> Result<FundamentalConstants, MeshError> {
    let params = CurveParams::new(sigma)?;
    let dev = Developing::new(params)?;
    let c = dev.psi_upper(C::new(0.0, sigma.sqrt()))?;
    let t0 = dev.psi_upper(C::new(-sigma, 0.0))?;
    Ok(FundamentalConstants { c, t0 })
}

/// The four steps: half-turn about the line through `c` parallel to the
/// `x₂`-axis, reflection in `{x₂ = 0}`, half-turn about the `x₂`-axis, and
/// translation by `2t₀`.
pub fn extension_ops(sigma: f64) -> Result<[IsometryOp; 4], MeshError> {
    let k = fundamental_constants(sigma)?;
    Ok([
        IsometryOp::diagonal([-1.0, 1.0, -1.0], [2.0 * k.c[0], 0.0, 2.0 * k.c[2]]),
        IsometryOp::diagonal([1.0, -1.0, 1.0], [0.0; 3]),
        IsometryOp::diagonal([-1.0, 1.0, -1.0], [0.0; 3]),
        IsometryOp::translation(fd::scale(k.t0, 2.0)),
    ])
}

/// `mesh ∪ op₁(mesh)`, then the same with `op₂`, `op₃`, then `copies`
/// translates by `op₄`.
pub fn extend(mesh: &TriMesh, ops: &[IsometryOp; 4], copies: usize) -> TriMesh {
    let mut cur = mesh.clone();
    for op in &ops[..3] {
        let img = cur.transformed(op);
        cur.append(&img);
    }
    let unit = cur.clone();
    let mut shift = IsometryOp::identity();
    for _ in 0..copies {
        shift = ops[3].compose(&shift);
        cur.append(&unit.transformed(&shift));
    }
    cur
}

/// Merges vertices closer than `tol`, dropping faces that collapse.
pub fn weld(mesh: &TriMesh, tol: f64) -> TriMesh {
    let key = |v: &V3| -> [i64; 3] {
        [(v[0] / tol).floor() as i64, (v[1] / tol).floor() as i64, (v[2] / tol).floor() as i64]
    };
    let mut cells: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
    let mut remap = vec![0u32; mesh.vertices.len()];
    let mut out = TriMesh { patches: mesh.patches.clone(), ..TriMesh::default() };
    let keep_z = mesh.source_z.len() == mesh.vertices.len();
    for (i, v) in mesh.vertices.iter().enumerate() {
        let k = key(v);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &j in list {
                            if fd::norm(fd::sub(out.vertices[j as usize], *v)) <= tol {
                                found = Some(j);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        remap[i] = match found {
            Some(j) => j,
            None => {
                let j = out.vertices.len() as u32;
                out.vertices.push(*v);
                out.normals.push(mesh.normals[i]);
                out.provenance.push(mesh.provenance[i]);
                if keep_z {
                    out.source_z.push(mesh.source_z[i]);
                }
                cells.entry(k).or_default().push(j);
                j
            }
        };
    }
    out.faces = mesh
        .faces
        .iter()
        .map(|f| [remap[f[0] as usize], remap[f[1] as usize], remap[f[2] as usize]])
        .filter(|f| f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
        .collect();
    out
}

/// Points of the mesh at height `h`: vertices within `1e-9` and one point per
/// strictly crossing edge. With analytic sources the crossing is located on
/// the surface itself by root finding along the `z`-chord of the edge;
/// otherwise it is linearly interpolated.
pub fn slice(mesh: &TriMesh, h: f64) -> Result<Vec<V3>, MeshError> {
    const ON: f64 = 1e-9;
    let mut pts: Vec<V3> = mesh.vertices.iter().filter(|v| (v[2] - h).abs() <= ON).copied().collect();
    let mut edges = HashSet::new();
    for f in &mesh.faces {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let (a, b) = (a.min(b), a.max(b));
            let (ha, hb) = (mesh.vertices[a as usize][2] - h, mesh.vertices[b as usize][2] - h);
            if ha.abs() > ON && hb.abs() > ON && ha * hb < 0.0 {
                edges.insert((a, b));
            }
        }
    }
    let mut edges: Vec<(u32, u32)> = edges.into_iter().collect();
    edges.sort_unstable();
    let analytic = mesh.source_z.len() == mesh.vertices.len() && !mesh.provenance.is_empty();
    let crossings: Vec<Result<V3, MeshError>> = edges
        .par_iter()
        .map(|&(a, b)| {
            if analytic {
                refine_crossing(mesh, a as usize, b as usize, h)
            } else {
                let (va, vb) = (mesh.vertices[a as usize], mesh.vertices[b as usize]);
                let t = (h - va[2]) / (vb[2] - va[2]);
                Ok(fd::add(va, fd::scale(fd::sub(vb, va), t)))
            }
        })
        .collect();
    for c in crossings {
        pts.push(c?);
    }
    Ok(pts)
}

fn refine_crossing(mesh: &TriMesh, a: usize, b: usize, h: f64) -> Result<V3, MeshError> {
    let pa = mesh.provenance[a];
    let iso = mesh.patches[pa.patch as usize];
    let params = CurveParams::new(pa.sigma)?;
    let s = QuadSettings::new(1e-13, 1e-12, 2000).map_err(CurveError::from)?;
    // Start from whichever end is a branch point so the chord integral stays exact.
    let (a, b) = if is_branch(&params, mesh.source_z[b]).is_some() { (b, a) } else { (a, b) };
    let (za, zb) = (mesh.source_z[a], mesh.source_z[b]);
    let base = iso.inverse().apply(mesh.vertices[a]);
    let at = |t: f64| -> Result<V3, MeshError> {
        let z = za + (zb - za) * t;
        let v = chord_integral(&params, za, z, &s)?.re();
        Ok(iso.apply(fd::add(base, v)))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut flo, mut fhi) = (mesh.vertices[a][2] - h, mesh.vertices[b][2] - h);
    let mut best = at(0.5)?;
    // Illinois-modified regula falsi on the height along the chord.
    let mut side = 0;
    for _ in 0..100 {
        let t = (lo * fhi - hi * flo) / (fhi - flo);
        let t = if t > lo && t < hi { t } else { 0.5 * (lo + hi) };
        best = at(t)?;
        let ft = best[2] - h;
        if ft.abs() < 1e-13 || hi - lo < 1e-15 {
            break;
        }
        if ft * flo < 0.0 {
            hi = t;
            fhi = ft;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        } else {
            lo = t;
            flo = ft;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best)
}

/// Result of fitting a planar level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelFit {
    Circle { center: [f64; 2], radius: f64, residual: f64 },
    Line { point: [f64; 2], direction: [f64; 2], residual: f64 },
}

impl LevelFit {
    pub fn residual(&self) -> f64 {
        match self {
            LevelFit::Circle { residual, .. } | LevelFit::Line { residual, .. } => *residual,
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, LevelFit::Line { .. })
    }
}

/// Least-squares circle through points sharing a height (to `height_tol`).
/// Collinear data, or circles with radius beyond `10⁶` times the spread, are
/// reported as lines.
pub fn level_circle_fit(points: &[V3], height_tol: f64) -> Result<LevelFit, MeshError> {
    if points.len() < 5 {
        return Err(MeshError::Degenerate(format!("{} points, need 5", points.len())));
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[2]), h.max(p[2])));
    if hi - lo > height_tol {
        return Err(MeshError::NotLevel(hi - lo));
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let q: Vec<[f64; 2]> = points.iter().map(|p| [p[0] - cx, p[1] - cy]).collect();
    let spread = q.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    if spread == 0.0 {
        return Err(MeshError::Degenerate("all points coincide".into()));
    }
    // Principal direction.
    let (sxx, sxy, syy) =
        q.iter().fold((0.0, 0.0, 0.0), |(a, b, c), p| (a + p[0] * p[0], b + p[0] * p[1], c + p[1] * p[1]));
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = [theta.cos(), theta.sin()];
    let line_res = q.iter().map(|p| (p[0] * dir[1] - p[1] * dir[0]).abs()).fold(0.0, f64::max);
    let line = LevelFit::Line { point: [cx, cy], direction: dir, residual: line_res };
    if line_res <= 1e-12 * spread {
        return Ok(line);
    }
    // Algebraic fit x² + y² + Dx + Ey + F = 0.
    let a = nalgebra::DMatrix::from_fn(q.len(), 3, |i, j| match j {
        0 => q[i][0],
        1 => q[i][1],
        _ => 1.0,
    });
    let b = nalgebra::DVector::from_fn(q.len(), |i, _| -(q[i][0] * q[i][0] + q[i][1] * q[i][1]));
    let sol = a.svd(true, true).solve(&b, 1e-14).map_err(|e| MeshError::Degenerate(e.to_string()))?;
    let (mut x0, mut y0) = (-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = x0 * x0 + y0 * y0 - sol[2];
    if !(r2 > 0.0) || r2.sqrt() > 1e6 * spread {
        return Ok(line);
    }
    let mut r = r2.sqrt();
    // Gauss–Newton on the geometric distances.
    for _ in 0..20 {
        let mut jtj = nalgebra::Matrix3::<f64>::zeros();
        let mut jtr = nalgebra::Vector3::<f64>::zeros();
        for p in &q {
            let (dx, dy) = (p[0] - x0, p[1] - y0);
            let d = dx.hypot(dy);
            if d == 0.0 {
                continue;
            }
            let j = nalgebra::Vector3::new(-dx / d, -dy / d, -1.0);
            let res = d - r;
            jtj += j * j.transpose();
            jtr += j * res;
        }
        let Some(step) = jtj.lu().solve(&(-jtr)) else { break };
        x0 += step[0];
        y0 += step[1];
        r += step[2];
        if step.norm() < 1e-15 * (1.0 + r) {
            break;
        }
    }
    if r > 1e6 * spread {
        return Ok(line);
    }
    let residual = q.iter().map(|p| ((p[0] - x0).hypot(p[1] - y0) - r).abs()).fold(0.0, f64::max);
    Ok(LevelFit::Circle { center: [x0 + cx, y0 + cy], radius: r, residual })
}

/// Nine significant digits.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// ASCII OBJ with `v`, `vn` and `f i//i` records. Returns the byte count.
pub fn export_obj(mesh: &TriMesh, path: &Path) -> Result<u64, MeshError> {
    let bytes = obj_bytes(mesh);
    std::fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

pub fn obj_bytes(mesh: &TriMesh) -> Vec<u8> {
    let mut s = String::with_capacity(mesh.vertices.len() * 96 + mesh.faces.len() * 32);
    for v in &mesh.vertices {
        s.push_str(&format!("v {} {} {}\n", sig9(v[0]), sig9(v[1]), sig9(v[2])));
    }
    for n in &mesh.normals {
        s.push_str(&format!("vn {} {} {}\n", sig9(n[0]), sig9(n[1]), sig9(n[2])));
    }
    for f in &mesh.faces {
        let (a, b, c) = (f[0] + 1, f[1] + 1, f[2] + 1);
        s.push_str(&format!("f {a}//{a} {b}//{b} {c}//{c}\n"));
    }
    s.into_bytes()
}

/// Binary little-endian PLY, float32 positions and normals, int32 indices.
pub fn export_ply(mesh: &TriMesh, path: &Path) -> Result<u64, MeshError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let bytes = ply_bytes(mesh);
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(bytes.len() as u64)
}

pub fn ply_bytes(mesh: &TriMesh) -> Vec<u8> {
    let header = format!(
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         property float nx\nproperty float ny\nproperty float nz\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.faces.len()
    );
    let mut out = header.into_bytes();
    for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
        for x in v.iter().chain(n.iter()) {
            out.extend_from_slice(&(*x as f32).to_le_bytes());
        }
    }
    for f in &mesh.faces {
        out.push(3);
        for &i in f {
            out.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    out
}

/// Reads back the `v` records of an OBJ file.
pub fn parse_obj_vertices(text: &str) -> Vec<V3> {
    text.lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|rest| {
            let mut it = rest.split_whitespace().map(|t| t.parse::<f64>().unwrap_or(f64::NAN));
            [it.next().unwrap_or(f64::NAN), it.next().unwrap_or(f64::NAN), it.next().unwrap_or(f64::NAN)]
        })
        .collect()
}
