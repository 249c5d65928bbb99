use minsurf::curve::{immerse_with, upper_path, CurveParams, Developing, PathOptions, C};
use minsurf::fd;
use minsurf::mesh::*;
use minsurf::quad::integrate_real;
use proptest::prelude::*;

fn piece(sigma: f64, e: f64, nr: usize, nt: usize) -> TriMesh {
    sample_fundamental(&DomainMap::new(sigma, e).unwrap(), nr, nt).unwrap()
}

fn dist(a: fd::V3, b: fd::V3) -> f64 {
    fd::norm(fd::sub(a, b))
}

#[test]
fn fundamental_piece_of_sigma_2() {
    let m = piece(2.0, 0.1, 40, 60);
    assert_eq!(m.vertex_count(), 2400);
    m.validate().unwrap();
    // z = 1 is the grid corner r = 1, t = 0.
    assert_eq!(m.source_z[39 * 60], C::new(1.0, 0.0));
    assert_eq!(m.vertices[39 * 60], [0.0, 0.0, 0.0]);
    // The column t = 0 covers part of [0, 1]: a line parallel to the x₂-axis.
    for i in 0..40 {
        let v = m.vertices[i * 60];
        assert!(v[0].abs() < 1e-12 && v[2].abs() < 1e-12, "{v:?}");
    }
    // Column t = 1 covers part of [-σ, 0], a planar geodesic in {x₂ = 0}.
    for i in 0..40 {
        assert!(m.vertices[i * 60 + 59][1].abs() < 1e-10);
    }
}

#[test]
fn grid_vertices_match_independent_path_integration() {
    // Oracle: the branch-tracking integrator along the basepoint paths.
    let sigma = 2.0;
    let m = piece(sigma, 0.1, 12, 15);
    let dev = Developing::new(CurveParams::new(sigma).unwrap()).unwrap();
    for k in (0..m.vertex_count()).step_by(7) {
        let x = dev.psi_upper(m.source_z[k]).unwrap();
        assert!(dist(x, m.vertices[k]) < 1e-8 * (1.0 + fd::norm(x)), "vertex {k}");
    }
}

#[test]
fn extension_ops_examples() {
    let sigma = 2.0;
    let ops = extension_ops(sigma).unwrap();
    let k = fundamental_constants(sigma).unwrap();
    for op in &ops {
        assert!(op.orthogonality_defect() < 1e-12);
    }
    let x = [0.3, -1.1, 0.8];
    assert!(dist(ops[0].compose(&ops[0]).apply(x), x) < 1e-14);
    // Fixes c and the line through it parallel to the x₂-axis.
    assert!(dist(ops[0].apply(k.c), k.c) < 1e-14);
    let q = [k.c[0], k.c[1] + 2.5, k.c[2]];
    assert!(dist(ops[0].apply(q), q) < 1e-14);
    // c lies on the outer boundary arc of the domain.
    let center = (1.0 - sigma) / 2.0;
    assert!((C::new(center, -sigma.sqrt()).norm() - (1.0 + sigma) / 2.0).abs() < 1e-14);
}

#[test]
fn translation_vector_is_the_one_sided_limit() {
    let sigma = 2.0;
    let k = fundamental_constants(sigma).unwrap();
    let dev = Developing::new(CurveParams::new(sigma).unwrap()).unwrap();
    let params = CurveParams::new(sigma).unwrap();
    let opts = PathOptions { clearance: Some(0.0), ..PathOptions::default() };
    let at = |eps: f64| {
        let z = C::new(-sigma + eps, 0.0);
        let path = upper_path(&params, z).unwrap();
        immerse_with(&params, &path, dev.base().w, dev.base_value().re(), &opts).unwrap().0
    };
    let (p5, p6) = (at(1e-5), at(1e-6));
    // The integrand has a 1/√ singularity, so the approach is like √ε.
    let (d5, d6) = (dist(p5, k.t0), dist(p6, k.t0));
    assert!((d5 / d6 - 10f64.sqrt()).abs() < 0.05, "{d5} {d6}");
    // Removing the √ε term makes the two evaluations agree to 1e-4 with t₀.
    let r = 10f64.sqrt();
    for i in 0..3 {
        let extrapolated = (r * p6[i] - p5[i]) / (r - 1.0);
        assert!((extrapolated - k.t0[i]).abs() < 1e-4);
    }
    // Height component against a direct real quadrature of dz/w on [-σ, 0).
    // Substituting z = -σ + s² removes the singularity.
    let s = minsurf::quad::QuadSettings::default();
    let far = dev.psi_upper(C::new(-1.0, 0.0)).unwrap();
    let piece_int = integrate_real(
        |t| {
            let z = -sigma + t * t;
            // w = -t·√(|z|(1-z)) on the upper branch and dz = 2t dt.
            -2.0 / ((-z) * (1.0 - z)).sqrt()
        },
        0.0,
        (sigma - 1.0f64).sqrt(),
        &s,
    )
    .unwrap();
    assert!((far[2] - piece_int - k.t0[2]).abs() < 1e-10);
}

#[test]
fn extension_counts_and_symmetry() {
    let sigma = 2.0;
    let m = piece(sigma, 0.1, 20, 30);
    let ops = extension_ops(sigma).unwrap();
    let e0 = extend(&m, &ops, 0);
    assert_eq!(e0.vertex_count(), 8 * m.vertex_count());
    e0.validate().unwrap();
    let e2 = extend(&m, &ops, 2);
    assert_eq!(e2.vertex_count(), 24 * m.vertex_count());
    let n = e0.vertex_count();
    let shift = 2.0 * fundamental_constants(sigma).unwrap().t0[2];
    for k in (0..n).step_by(13) {
        assert_eq!(e2.vertices[n + k], ops[3].apply(e0.vertices[k]));
        assert!((e2.vertices[2 * n + k][2] - e0.vertices[k][2] - 2.0 * shift).abs() < 1e-12);
    }
    // The piece and its x₂-mirror share the geodesic on [-σ, 0].
    let nv = m.vertex_count();
    let after1 = 2 * nv;
    for i in 0..20 {
        let a = e0.vertices[i * 30 + 29];
        let b = e0.vertices[after1 + i * 30 + 29];
        assert!(dist(a, b) < 1e-8);
    }
    // Welding removes those duplicated boundary vertices.
    let welded = weld(&e0, 1e-8);
    assert!(welded.vertex_count() < e0.vertex_count());
    welded.validate().unwrap();
}

#[test]
fn slab_growth() {
    let sigma = 2.0;
    let m = piece(sigma, 0.1, 20, 30);
    let k = fundamental_constants(sigma).unwrap();
    let (lo, hi) = m.height_range();
    assert!(lo.abs() < 1e-12 && (hi - 2.0 * k.c[2]).abs() < 1e-9);
    let ops = extension_ops(sigma).unwrap();
    // The half-turns fill [-2c₃, 2c₃]; every translated copy adds 4c₃.
    for copies in 0..3 {
        let (lo, hi) = extend(&m, &ops, copies).height_range();
        assert!((lo + 2.0 * k.c[2]).abs() < 1e-9);
        assert!((hi - (2.0 + 4.0 * copies as f64) * k.c[2]).abs() < 1e-9);
    }
}

#[test]
fn slices_match_level_sets_found_independently() {
    let sigma = 2.0;
    let m = piece(sigma, 0.1, 30, 40);
    let k = fundamental_constants(sigma).unwrap();
    let dev = Developing::new(CurveParams::new(sigma).unwrap()).unwrap();
    let h = 0.6 * k.c[2];
    let fit = level_circle_fit(&slice(&m, h).unwrap(), 1e-9).unwrap();
    let LevelFit::Circle { center, radius, residual } = fit else { panic!("{fit:?}") };
    assert!(residual < 1e-5 * radius);
    // Oracle: bisect ψ₃ = h along vertical rays in the z-plane.
    let mut pts = Vec::new();
    for x in [-1.5, -1.0, -0.5, 0.3, 0.6, 0.9] {
        let f = |y: f64| dev.psi_upper(C::new(x, y)).unwrap();
        let (mut a, mut b) = (1e-3, 1.8);
        let (fa, fb) = (f(a)[2] - h, f(b)[2] - h);
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if (f(mid)[2] - h) * fa > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        pts.push(f(0.5 * (a + b)));
    }
    assert!(pts.len() >= 3);
    for p in pts {
        let r = (p[0] - center[0]).hypot(p[1] - center[1]);
        assert!((r - radius).abs() < 1e-8 * radius, "{r} vs {radius}");
    }
}

#[test]
fn export_round_trip_and_determinism() {
    let m = piece(2.0, 0.1, 8, 10);
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.obj");
    let b = dir.path().join("b.obj");
    let na = export_obj(&m, &a).unwrap();
    export_obj(&m, &b).unwrap();
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta.len() as u64, na);
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let back = parse_obj_vertices(&String::from_utf8(ta).unwrap());
    assert_eq!(back.len(), m.vertex_count());
    for (p, q) in back.iter().zip(&m.vertices) {
        assert!(dist(*p, *q) < 1e-8 * (1.0 + fd::norm(*q)));
    }
    let pa = dir.path().join("a.ply");
    let pb = dir.path().join("b.ply");
    export_ply(&m, &pa).unwrap();
    export_ply(&m, &pb).unwrap();
    assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn isometries_preserve_distances(i in 0usize..600, j in 0usize..600, which in 0usize..4) {
        let m = piece(2.0, 0.1, 20, 30);
        let op = extension_ops(2.0).unwrap()[which];
        let (a, b) = (m.vertices[i], m.vertices[j]);
        let d0 = dist(a, b);
        let d1 = dist(op.apply(a), op.apply(b));
        prop_assert!((d0 - d1).abs() <= 1e-10 * d0.max(1e-300));
    }

    #[test]
    fn domain_map_lands_in_the_half_disc(r in 0.1f64..1.0, t in 0.0f64..1.0, sigma in 0.2f64..6.0) {
        let m = DomainMap::new(sigma, 0.1).unwrap();
        let z = m.polar(r, t);
        prop_assert!(z.im >= 0.0);
        prop_assert!((z - (1.0 - sigma) / 2.0).norm() <= (1.0 + sigma) / 2.0 + 1e-12);
    }
}
