//! Plain-text `key = value` run configuration.

use std::path::Path;

use crate::field::Grid;
use crate::solver::{ConfigError, ForcingKind, InitKind, Scheme, SolverConfig};

const KEYS: &[&str] = &[
    "nu",
    "dt",
    "t_end",
    "nx",
    "ny",
    "nz",
    "dealias",
    "scheme",
    "init",
    "init_amplitude",
    "init_seed",
    "forcing",
    "forcing_amplitude",
    "forcing_seed",
    "diag_every",
    "lambda1",
    "r",
    "q",
    "alpha",
    "c_generic",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::new(key, format!("cannot parse {value:?} as a number")))
}

fn boolean(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::new(key, format!("expected true/false, got {value:?}"))),
    }
}

/// Parses and validates configuration text.
///
/// `nu`, `dt`, `nx`, `ny` and `nz` are required; every other key has a
/// default. Unknown and repeated keys are errors.
pub fn parse_config_str(text: &str) -> Result<SolverConfig, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::new(format!("line {}", n + 1), "expected `key = value`"));
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if !KEYS.contains(&k.as_str()) {
            return Err(ConfigError::new(k, "unknown key"));
        }
        if pairs.iter().any(|(existing, _)| *existing == k) {
            return Err(ConfigError::new(k, "given more than once"));
        }
        pairs.push((k, v));
    }
    let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let required = |key: &str| get(key).ok_or_else(|| ConfigError::new(key, "required key is missing"));

    let nu = number("nu", required("nu")?)?;
    let dt = number("dt", required("dt")?)?;
    let nx = number("nx", required("nx")?)?;
    let ny = number("ny", required("ny")?)?;
    let nz = number("nz", required("nz")?)?;
    let grid = Grid::new(nx, ny, nz).map_err(|e| ConfigError::new("nx/ny/nz", e.to_string()))?;
    let t_end = get("t_end").map_or(Ok(0.0), |v| number("t_end", v))?;
    let init = match get("init") {
        None => InitKind::Zero,
        Some(v) => InitKind::parse(v)
            .ok_or_else(|| ConfigError::new("init", format!("expected zero/shear/taylor_green/random, got {v:?}")))?,
    };
    let mut c = SolverConfig::new(nu, dt, t_end, grid, init);
    for (k, v) in &pairs {
        let v = v.as_str();
        match k.as_str() {
            "dealias" => c.dealias = boolean(k, v)?,
            "scheme" => {
                c.scheme = Scheme::parse(v).ok_or_else(|| ConfigError::new(k, format!("expected ifab2/cnab2, got {v:?}")))?
            }
            "init_amplitude" => c.init_amplitude = number(k, v)?,
            "init_seed" => c.init_seed = number(k, v)?,
            "forcing" => {
                c.forcing = ForcingKind::parse(v)
                    .ok_or_else(|| ConfigError::new(k, format!("expected none/shear/random, got {v:?}")))?
            }
            "forcing_amplitude" => c.forcing_amplitude = number(k, v)?,
            "forcing_seed" => c.forcing_seed = number(k, v)?,
            "diag_every" => c.diag_every = number(k, v)?,
            "lambda1" => c.lambda1 = number(k, v)?,
            "r" => c.r = number(k, v)?,
            "q" => c.q = number(k, v)?,
            "alpha" => c.alpha = number(k, v)?,
            "c_generic" => c.c_generic = number(k, v)?,
            _ => {}
        }
    }
    c.validate()?;
    Ok(c)
}

pub fn parse_config(path: &Path) -> Result<SolverConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Every key, in canonical order; floats are written in shortest
/// round-trip form so that `parse_config_str(emit_config(c)) == c`.
pub fn emit_config(c: &SolverConfig) -> String {
    let lines = [
        ("nu", format!("{:?}", c.nu)),
        ("dt", format!("{:?}", c.dt)),
        ("t_end", format!("{:?}", c.t_end)),
        ("nx", c.grid.nx.to_string()),
        ("ny", c.grid.ny.to_string()),
        ("nz", c.grid.nz.to_string()),
        ("dealias", c.dealias.to_string()),
        ("scheme", c.scheme.as_str().to_string()),
        ("init", c.init.as_str().to_string()),
        ("init_amplitude", format!("{:?}", c.init_amplitude)),
        ("init_seed", c.init_seed.to_string()),
        ("forcing", c.forcing.as_str().to_string()),
        ("forcing_amplitude", format!("{:?}", c.forcing_amplitude)),
        ("forcing_seed", c.forcing_seed.to_string()),
        ("diag_every", c.diag_every.to_string()),
        ("lambda1", format!("{:?}", c.lambda1)),
        ("r", format!("{:?}", c.r)),
        ("q", format!("{:?}", c.q)),
        ("alpha", format!("{:?}", c.alpha)),
        ("c_generic", format!("{:?}", c.c_generic)),
    ];
    lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
