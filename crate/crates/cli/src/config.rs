use crate::args::{Cli, FormatArg, GridArgs, Sub, SurfaceArgs};
use crate::error::CliError;
use minsurf::classical::{lambda_of_sigma, sigma_of_lambda};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Verify,
    Kdv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Obj,
    Ply,
    Both,
}

impl Format {
    pub fn obj(self) -> bool {
        matches!(self, Format::Obj | Format::Both)
    }

    pub fn ply(self) -> bool {
        matches!(self, Format::Ply | Format::Both)
    }
}

/// `σ` and `λ` of one surface, whichever was given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface {
    pub sigma: f64,
    pub lambda: f64,
    pub from_lambda: bool,
}

impl Surface {
    pub fn from_sigma(sigma: f64) -> Result<Self, CliError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(CliError::Config(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma, lambda: lambda_of_sigma(sigma), from_lambda: false })
    }

    pub fn from_lambda(lambda: f64) -> Result<Self, CliError> {
        if !lambda.is_finite() {
            return Err(CliError::Config(format!("lambda must be finite, got {lambda}")));
        }
        Ok(Self { sigma: sigma_of_lambda(lambda), lambda, from_lambda: true })
    }

    fn resolve(a: &SurfaceArgs) -> Result<Option<Self>, CliError> {
        match (a.sigma, a.lambda) {
            (Some(_), Some(_)) => Err(CliError::Config("give either --sigma or --lambda, not both".into())),
            (Some(s), None) => Self::from_sigma(s).map(Some),
            (None, Some(l)) => Self::from_lambda(l).map(Some),
            (None, None) => Ok(None),
        }
    }

    /// The catenoid branch of `verify`, selected by `--lambda 0`.
    pub fn is_catenoid_mode(&self) -> bool {
        self.from_lambda && self.lambda == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub surface: Option<Surface>,
    pub e: f64,
    pub grid: (usize, usize),
    pub copies: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub out_dir: PathBuf,
    pub format: Format,
    pub json: Option<PathBuf>,
    pub print_p: Option<usize>,
    pub n: Option<usize>,
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Verify,
            surface: None,
            e: 0.1,
            grid: (40, 60),
            copies: 1,
            seed: 7,
            tolerances: BTreeMap::new(),
            out_dir: PathBuf::from("."),
            format: Format::Obj,
            json: None,
            print_p: None,
            n: None,
            samples: 60,
        }
    }
}

/// Parses `NRxNT`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("grid must look like 40x60, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nr: usize = a.trim().parse().map_err(|_| bad())?;
    let nt: usize = b.trim().parse().map_err(|_| bad())?;
    if nr < 2 || nt < 2 {
        return Err(CliError::Config(format!("grid {nr}x{nt} needs at least 2x2")));
    }
    Ok((nr, nt))
}

/// Parses repeated `name=value` threshold overrides.
pub fn parse_tolerances(items: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("tolerance must be name=value, got {item:?}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("tolerance {name} has non-numeric value {value:?}")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Config(format!("tolerance {name} must be positive, got {v}")));
        }
        out.insert(name.trim().to_string(), v);
    }
    Ok(out)
}

fn apply_grid(cfg: &mut RunConfig, g: &GridArgs) -> Result<(), CliError> {
    if !(g.e > 0.0 && g.e < 1.0) {
        return Err(CliError::Config(format!("e = {} must lie in (0, 1)", g.e)));
    }
    cfg.e = g.e;
    cfg.grid = parse_grid(&g.grid)?;
    cfg.copies = g.copies;
    Ok(())
}

fn apply_surface(cfg: &mut RunConfig, s: &SurfaceArgs) -> Result<(), CliError> {
    cfg.surface = Surface::resolve(s)?;
    cfg.seed = s.seed;
    cfg.json = s.json.clone();
    Ok(())
}

impl TryFrom<Cli> for RunConfig {
    type Error = CliError;

    fn try_from(cli: Cli) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        match cli.command {
            Sub::Gen(a) => {
                cfg.command = Command::Generate;
                apply_surface(&mut cfg, &a.surface)?;
                apply_grid(&mut cfg, &a.grid)?;
                cfg.out_dir = a.out;
                cfg.format = match a.format {
                    FormatArg::Obj => Format::Obj,
                    FormatArg::Ply => Format::Ply,
                    FormatArg::Both => Format::Both,
                };
                if cfg.surface.is_none() {
                    return Err(CliError::Config("gen needs --sigma or --lambda".into()));
                }
            }
            Sub::Verify(a) => {
                cfg.command = Command::Verify;
                apply_surface(&mut cfg, &a.surface)?;
                apply_grid(&mut cfg, &a.grid)?;
                cfg.tolerances = parse_tolerances(&a.tol)?;
                if cfg.surface.is_none() {
                    return Err(CliError::Config("verify needs --sigma or --lambda".into()));
                }
            }
            Sub::Kdv(a) => {
                cfg.command = Command::Kdv;
                apply_surface(&mut cfg, &a.surface)?;
                cfg.print_p = a.print_p;
                cfg.n = a.n;
                cfg.samples = a.samples;
                if cfg.print_p.is_none() && cfg.n.is_none() {
                    return Err(CliError::Config("kdv needs --print-p or --n".into()));
                }
                if cfg.n.is_some() && cfg.surface.is_none() {
                    return Err(CliError::Config("kdv --n needs --sigma or --lambda".into()));
                }
                if cfg.samples == 0 {
                    return Err(CliError::Config("--samples must be positive".into()));
                }
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_tolerances() {
        assert_eq!(parse_grid("40x60").unwrap(), (40, 60));
        assert!(parse_grid("40*60").is_err());
        assert!(parse_grid("1x60").is_err());
        let t = parse_tolerances(&["shiffman=1e-15".into(), "registration=0.01".into()]).unwrap();
        assert_eq!(t["shiffman"], 1e-15);
        assert!(parse_tolerances(&["shiffman=-1".into()]).is_err());
        assert!(parse_tolerances(&["shiffman".into()]).is_err());
    }

    #[test]
    fn lambda_sigma_duality() {
        let s = Surface::from_lambda(1.0).unwrap();
        assert!((s.sigma - 2.618033988749895).abs() < 1e-12);
        let t = Surface::from_sigma(s.sigma).unwrap();
        assert!((t.lambda - 1.0).abs() < 1e-12);
        assert!(Surface::from_lambda(0.0).unwrap().is_catenoid_mode());
        assert!(!Surface::from_sigma(1.0).unwrap().is_catenoid_mode());
        assert!(Surface::from_sigma(0.0).is_err());
    }
}
