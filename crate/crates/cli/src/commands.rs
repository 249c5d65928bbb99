use crate::checks::{self, default_threshold, DEFAULT_THRESHOLDS};
use crate::config::{RunConfig, Surface};
use crate::error::CliError;
use crate::report::{Check, Report};
use minsurf::curve::{sample_points, CurveParams};
use minsurf::mesh::{self, DomainMap, TriMesh};
use minsurf::shiffkdv::{self, ShiffError, MAX_LEVEL};
use serde_json::json;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

fn surface(cfg: &RunConfig) -> Result<Surface, CliError> {
    cfg.surface.ok_or_else(|| CliError::Config("need --sigma or --lambda".into()))
}

fn write_meshes(cfg: &RunConfig, stem: &str, m: &TriMesh, files: &mut Vec<serde_json::Value>) -> Result<(), CliError> {
    let mut one = |ext: &str, bytes: Vec<u8>| -> Result<(), CliError> {
        let name = format!("{stem}.{ext}");
        std::fs::write(cfg.out_dir.join(&name), &bytes)?;
        files.push(json!({ "name": name, "bytes": bytes.len() }));
        Ok(())
    };
    if cfg.format.obj() {
        one("obj", mesh::obj_bytes(m))?;
    }
    if cfg.format.ply() {
        one("ply", mesh::ply_bytes(m))?;
    }
    Ok(())
}

/// `gen`: fundamental piece, reflected and translated copies, mesh files and
/// `report.json` in the output directory.
pub fn generate(cfg: &RunConfig) -> Result<Report, CliError> {
    let s = surface(cfg)?;
    let mut r = Report::new("gen", cfg.seed);
    r.sigma = Some(s.sigma);
    r.lambda = Some(s.lambda);
    let map = DomainMap::new(s.sigma, cfg.e)?;
    let piece = r.timed("sample", || mesh::sample_fundamental(&map, cfg.grid.0, cfg.grid.1))?;
    piece.validate()?;
    let k = mesh::fundamental_constants(s.sigma)?;
    let ops = mesh::extension_ops(s.sigma)?;
    let ext = r.timed("extend", || mesh::extend(&piece, &ops, cfg.copies));
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut files = Vec::new();
    r.timed("write", || -> Result<(), CliError> {
        write_meshes(cfg, "fundamental", &piece, &mut files)?;
        write_meshes(cfg, "extended", &ext, &mut files)
    })?;
    r.set("e", cfg.e);
    r.set("grid", [cfg.grid.0, cfg.grid.1]);
    r.set("copies", cfg.copies);
    r.set("fundamental_vertices", piece.vertex_count());
    r.set("fundamental_faces", piece.faces.len());
    r.set("extended_vertices", ext.vertex_count());
    r.set("extended_faces", ext.faces.len());
    r.set("fundamental_height_range", piece.height_range());
    r.set("extended_height_range", ext.height_range());
    r.set("slab_height", 2.0 * k.c[2]);
    r.set("translation", ops[3].offset);
    r.set("c", k.c);
    r.set("t0", k.t0);
    r.set("files", files);
    let path = cfg.out_dir.join("report.json");
    std::fs::write(&path, r.to_json()?)?;
    if let Some(p) = &cfg.json {
        std::fs::write(p, r.to_json()?)?;
    }
    Ok(r)
}

fn thresholds(cfg: &RunConfig) -> Result<BTreeMap<String, f64>, CliError> {
    let mut t: BTreeMap<String, f64> = DEFAULT_THRESHOLDS.iter().map(|(n, v)| (n.to_string(), *v)).collect();
    for (name, v) in &cfg.tolerances {
        if default_threshold(name).is_none() {
            let known: Vec<&str> = DEFAULT_THRESHOLDS.iter().map(|(n, _)| *n).collect();
            return Err(CliError::Config(format!("unknown check {name:?}; known: {}", known.join(", "))));
        }
        t.insert(name.clone(), *v);
    }
    Ok(t)
}

/// Turns a numeric error inside a check into a failed check; configuration
/// errors still abort.
fn measured(r: &mut Report, name: &str, threshold: f64, value: Result<f64, CliError>) -> Result<(), CliError> {
    match value {
        Ok(v) => r.push(Check::new(name, v, threshold)),
        Err(CliError::Numeric(msg)) => r.push(Check::new(name, f64::NAN, threshold).with_detail(msg)),
        Err(e) => return Err(e),
    }
    Ok(())
}

/// `verify`: the invariant suite for one surface.
pub fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let s = surface(cfg)?;
    let t = thresholds(cfg)?;
    let mut r = Report::new("verify", cfg.seed);
    r.sigma = Some(s.sigma);
    r.lambda = Some(s.lambda);
    if s.is_catenoid_mode() {
        r.set("mode", "catenoid");
        let v = r.timed("catenoid", || checks::catenoid_gap(&[0.5, 1.0, 2.0]));
        measured(&mut r, "catenoid", t["catenoid"], v)?;
    }
    let v = r.timed("period_closure", || checks::period_closure(s.sigma));
    measured(&mut r, "period_closure", t["period_closure"], v)?;
    let v = r.timed("symmetry", || checks::symmetry_residual(s.sigma, cfg.seed, 50));
    measured(&mut r, "symmetry", t["symmetry"], v)?;
    let v = r.timed("shiffman", || checks::shiffman_max(s.sigma, cfg.seed, 1000));
    measured(&mut r, "shiffman", t["shiffman"], v)?;

    let slices = r.timed("slices", || -> Result<checks::SliceSummary, CliError> {
        let m = checks::extended_mesh(s.sigma, cfg.e, cfg.grid, cfg.copies)?;
        let (generic, lines) = checks::slice_heights(s.sigma, cfg.copies)?;
        checks::slice_summary(&m, &generic, &lines)
    });
    match slices {
        Ok(sm) => {
            let circle = if sm.generic_not_circles > 0 { f64::INFINITY } else { sm.max_relative_residual };
            r.push(Check::new("circle_fit", circle, t["circle_fit"]));
            r.push(Check::new("line_slices", sm.lines_missed as f64, t["line_slices"]));
        }
        Err(e) => {
            measured(&mut r, "circle_fit", t["circle_fit"], Err(e))?;
        }
    }

    let reg = r.timed("registration", || checks::registration(s.lambda));
    match reg {
        Ok(g) => {
            r.set("registration_scale", g.scale);
            r.push(Check::new("registration", g.max_relative_error, t["registration"]));
        }
        Err(e) => measured(&mut r, "registration", t["registration"], Err(e))?,
    }
    let v = r.timed("enneper", || checks::enneper_residual(cfg.seed, 10));
    measured(&mut r, "enneper", t["enneper"], v)?;
    let mc = r.timed("minimality", || -> Result<(f64, f64), CliError> {
        let hc = checks::classical_minimality(s.lambda, 20)?;
        let (hw, conf) = checks::weierstrass_minimality(s.sigma, 20)?;
        Ok((hc.max(hw), conf))
    });
    match mc {
        Ok((h, conf)) => {
            r.push(Check::new("minimality", h, t["minimality"]));
            r.push(Check::new("conformality", conf, t["conformality"]));
        }
        Err(e) => measured(&mut r, "minimality", t["minimality"], Err(e))?,
    }
    Ok(r)
}

fn level_error(e: ShiffError) -> CliError {
    match e {
        ShiffError::LevelTooHigh(_) => CliError::Config(e.to_string()),
        other => CliError::from(other),
    }
}

/// Canonical text of `P₀, …, P_n`, one per line.
pub fn hierarchy_text(n: usize) -> Result<Vec<String>, CliError> {
    if n > MAX_LEVEL {
        return Err(CliError::Config(format!("--print-p {n} exceeds the maximum level {MAX_LEVEL}")));
    }
    let ps = shiffkdv::hierarchy_up_to(n)?;
    Ok(ps.iter().enumerate().map(|(k, p)| format!("P{k} = {p}")).collect())
}

/// `kdv`: hierarchy text and the flow fit on random curve points.
pub fn kdv(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut r = Report::new("kdv", cfg.seed);
    if let Some(n) = cfg.print_p {
        r.set("hierarchy", hierarchy_text(n)?);
    }
    if let Some(n) = cfg.n {
        if n >= MAX_LEVEL {
            return Err(CliError::Config(format!("--n {n} needs P{} but the maximum level is {MAX_LEVEL}", n + 1)));
        }
        let s = surface(cfg)?;
        r.sigma = Some(s.sigma);
        r.lambda = Some(s.lambda);
        let p = CurveParams::new(s.sigma)?;
        let fit = r
            .timed("fit", || shiffkdv::algebro_geometric_residual(&p, n, &sample_points(&p, cfg.seed, cfg.samples)))
            .map_err(level_error)?;
        let doubled = r
            .timed("fit_doubled", || {
                shiffkdv::algebro_geometric_residual(&p, n, &sample_points(&p, cfg.seed, 2 * cfg.samples))
            })
            .map_err(level_error)?;
        let change = fit
            .coefficients
            .iter()
            .zip(&doubled.coefficients)
            .map(|(a, b)| (a - b).norm() / a.norm().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        r.set("n", n);
        r.set("samples", fit.samples);
        r.set("coefficients", fit.coefficients.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
        r.set("residual", fit.residual);
        r.set("rank_deficient", fit.rank_deficient);
        r.set("doubled_samples", doubled.samples);
        r.set("doubled_residual", doubled.residual);
        r.set("coefficient_change", change);
    }
    Ok(r)
}

/// Prints or stores the report of `verify` and `kdv`.
pub fn emit(cfg: &RunConfig, r: &Report, out: &mut dyn Write) -> Result<(), CliError> {
    let text_only = r.command == "kdv" && cfg.n.is_none();
    if r.command == "kdv" && (text_only || cfg.json.is_some()) {
        if let Some(serde_json::Value::Array(lines)) = r.data.get("hierarchy") {
            for l in lines {
                writeln!(out, "{}", l.as_str().unwrap_or_default())?;
            }
        }
    }
    if text_only {
        return Ok(());
    }
    match (&cfg.json, r.command.as_str()) {
        (_, "gen") => writeln!(out, "wrote {}", cfg.out_dir.join("report.json").display())?,
        (Some(p), _) => write_file(p, &r.to_json()?)?,
        (None, _) => out.write_all(r.to_json()?.as_bytes())?,
    }
    Ok(())
}

fn write_file(p: &Path, s: &str) -> Result<(), CliError> {
    if let Some(dir) = p.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(p, s)?;
    Ok(())
}
