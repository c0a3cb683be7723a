//! Line-based `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Lists are comma separated.
//! Every key is optional; omitted keys take the benchmark defaults (R = 5 m,
//! h/R = 2, gamma = 20 kN/m^3, k0 = 0.8, E = 20 MPa, nu = 0.3, N = 50, x0/h = 100).

use crate::error::CliError;
use shallow_tunnel::fields::GridSpec;
use shallow_tunnel::geometry::TunnelGeometry;
use shallow_tunnel::loading::{Material, Plane};
use shallow_tunnel::solver::SolverConfig;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Tunnel radius, m.
    pub radius: f64,
    pub h_over_r: f64,
    /// Unit weight, kN/m^3.
    pub gamma: f64,
    pub k0: f64,
    /// Elastic modulus, kPa.
    pub e: f64,
    pub nu: f64,
    pub plane: Plane,
    pub n: usize,
    pub x0_over_h: f64,
    pub lanczos: bool,
    pub epsilon: f64,
    pub max_reps: usize,
    /// Grid extents in metres; `None` means `x in [0, 4h]`, `y in [-4h, 0]`.
    pub grid_x_min: Option<f64>,
    pub grid_x_max: Option<f64>,
    pub grid_y_min: Option<f64>,
    pub grid_y_max: Option<f64>,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub boundary_samples: usize,
    pub out_dir: PathBuf,
    pub sweep_h_over_r: Option<Vec<f64>>,
    pub sweep_k0: Option<Vec<f64>>,
    pub sweep_x0_over_h: Option<Vec<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            radius: 5.0,
            h_over_r: 2.0,
            gamma: 20.0,
            k0: 0.8,
            e: 20_000.0,
            nu: 0.3,
            plane: Plane::Strain,
            n: 50,
            x0_over_h: 100.0,
            lanczos: true,
            epsilon: 1e-16,
            max_reps: SolverConfig::default().max_reps,
            grid_x_min: None,
            grid_x_max: None,
            grid_y_min: None,
            grid_y_max: None,
            grid_nx: 201,
            grid_ny: 201,
            boundary_samples: 720,
            out_dir: PathBuf::from("out"),
            sweep_h_over_r: None,
            sweep_k0: None,
            sweep_x0_over_h: None,
        }
    }
}

fn parse_f64(key: &str, v: &str, line: usize) -> Result<f64, CliError> {
    v.parse::<f64>().map_err(|_| CliError::Parse { line, msg: format!("{key}: `{v}` is not a number") })
}

fn parse_usize(key: &str, v: &str, line: usize) -> Result<usize, CliError> {
    v.parse::<usize>().map_err(|_| CliError::Parse { line, msg: format!("{key}: `{v}` is not a non-negative integer") })
}

fn parse_bool(key: &str, v: &str, line: usize) -> Result<bool, CliError> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::Parse { line, msg: format!("{key}: `{v}` is not a boolean") }),
    }
}

fn parse_list(key: &str, v: &str, line: usize) -> Result<Vec<f64>, CliError> {
    if v.trim().is_empty() {
        return Err(CliError::Parse { line, msg: format!("{key}: list is empty") });
    }
    v.split(',').map(|s| parse_f64(key, s.trim(), line)).collect()
}

fn range(key: &str, ok: bool, what: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Range { key: key.to_string(), msg: what.to_string() })
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| CliError::Parse { line, msg: format!("expected `key = value`, got `{body}`") })?;
        let (key, v) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(CliError::Parse { line, msg: format!("duplicate key `{key}`") });
        }
        match key {
            "R" => c.radius = parse_f64(key, v, line)?,
            "h_over_R" => c.h_over_r = parse_f64(key, v, line)?,
            "gamma" => c.gamma = parse_f64(key, v, line)?,
            "k0" => c.k0 = parse_f64(key, v, line)?,
            "E" => c.e = parse_f64(key, v, line)?,
            "nu" => c.nu = parse_f64(key, v, line)?,
            "plane" => {
                c.plane = match v {
                    "strain" => Plane::Strain,
                    "stress" => Plane::Stress,
                    _ => return Err(CliError::Parse { line, msg: format!("plane: expected `strain` or `stress`, got `{v}`") }),
                }
            }
            "N" => c.n = parse_usize(key, v, line)?,
            "x0_over_h" => c.x0_over_h = parse_f64(key, v, line)?,
            "lanczos" => c.lanczos = parse_bool(key, v, line)?,
            "epsilon" => c.epsilon = parse_f64(key, v, line)?,
            "max_reps" => c.max_reps = parse_usize(key, v, line)?,
            "grid_x_min" => c.grid_x_min = Some(parse_f64(key, v, line)?),
            "grid_x_max" => c.grid_x_max = Some(parse_f64(key, v, line)?),
            "grid_y_min" => c.grid_y_min = Some(parse_f64(key, v, line)?),
            "grid_y_max" => c.grid_y_max = Some(parse_f64(key, v, line)?),
            "grid_nx" => c.grid_nx = parse_usize(key, v, line)?,
            "grid_ny" => c.grid_ny = parse_usize(key, v, line)?,
            "boundary_samples" => c.boundary_samples = parse_usize(key, v, line)?,
            "out_dir" => {
                if v.is_empty() {
                    return Err(CliError::Parse { line, msg: "out_dir is empty".into() });
                }
                c.out_dir = PathBuf::from(v)
            }
            "sweep_h_over_R" => c.sweep_h_over_r = Some(parse_list(key, v, line)?),
            "sweep_k0" => c.sweep_k0 = Some(parse_list(key, v, line)?),
            "sweep_x0_over_h" => c.sweep_x0_over_h = Some(parse_list(key, v, line)?),
            _ => return Err(CliError::Parse { line, msg: format!("unknown key `{key}`") }),
        }
    }
    c.validate()?;
    Ok(c)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let fin = |x: f64| x.is_finite();
        range("R", fin(self.radius) && self.radius > 0.0, "must be positive")?;
        range("h_over_R", fin(self.h_over_r) && self.h_over_r > 1.0, "must exceed 1")?;
        range("gamma", fin(self.gamma) && self.gamma >= 0.0, "must be >= 0")?;
        range("k0", fin(self.k0) && self.k0 >= 0.0, "must be >= 0")?;
        range("E", fin(self.e) && self.e > 0.0, "must be positive")?;
        range("nu", self.nu > 0.0 && self.nu < 0.5, "must lie in (0, 0.5)")?;
        range("N", (4..=400).contains(&self.n), "must lie in [4, 400]")?;
        range("x0_over_h", fin(self.x0_over_h) && self.x0_over_h > 0.0, "must be positive")?;
        range("epsilon", fin(self.epsilon) && self.epsilon > 0.0, "must be positive")?;
        range("max_reps", self.max_reps >= 1, "must be >= 1")?;
        range("grid_nx", (1..=5001).contains(&self.grid_nx), "must lie in [1, 5001]")?;
        range("grid_ny", (1..=5001).contains(&self.grid_ny), "must lie in [1, 5001]")?;
        range("boundary_samples", (8..=1_000_000).contains(&self.boundary_samples), "must lie in [8, 1000000]")?;
        for (k, v) in [("grid_x_min", self.grid_x_min), ("grid_x_max", self.grid_x_max), ("grid_y_min", self.grid_y_min), ("grid_y_max", self.grid_y_max)] {
            range(k, v.is_none_or(fin), "must be finite")?;
        }
        let g = self.grid();
        range("grid_x_max", g.x_max >= g.x_min, "must be >= grid_x_min")?;
        range("grid_y_max", g.y_max >= g.y_min, "must be >= grid_y_min")?;
        for (k, list) in [("sweep_h_over_R", &self.sweep_h_over_r), ("sweep_k0", &self.sweep_k0), ("sweep_x0_over_h", &self.sweep_x0_over_h)] {
            if let Some(l) = list {
                for &v in l {
                    let mut probe = self.clone();
                    match k {
                        "sweep_h_over_R" => probe.h_over_r = v,
                        "sweep_k0" => probe.k0 = v,
                        _ => probe.x0_over_h = v,
                    }
                    probe.sweep_h_over_r = None;
                    probe.sweep_k0 = None;
                    probe.sweep_x0_over_h = None;
                    probe.validate().map_err(|e| CliError::Range { key: k.to_string(), msg: format!("entry {v}: {e}") })?;
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> f64 {
        self.h_over_r * self.radius
    }

    pub fn geometry(&self) -> Result<TunnelGeometry, CliError> {
        let h = self.depth();
        Ok(TunnelGeometry::new(self.radius, h, self.x0_over_h * h)?)
    }

    pub fn material(&self) -> Result<Material, CliError> {
        Ok(Material::new(self.gamma, self.k0, self.e, self.nu, self.plane)?)
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { n: self.n, epsilon: self.epsilon, max_reps: self.max_reps, lanczos: self.lanczos }
    }

    pub fn grid(&self) -> GridSpec {
        let h = self.depth();
        GridSpec {
            x_min: self.grid_x_min.unwrap_or(0.0),
            x_max: self.grid_x_max.unwrap_or(4.0 * h),
            y_min: self.grid_y_min.unwrap_or(-4.0 * h),
            y_max: self.grid_y_max.unwrap_or(0.0),
            nx: self.grid_nx,
            ny: self.grid_ny,
        }
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list = |l: &Vec<f64>| l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "R = {}", self.radius);
        let _ = writeln!(s, "h_over_R = {}", self.h_over_r);
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let _ = writeln!(s, "k0 = {}", self.k0);
        let _ = writeln!(s, "E = {}", self.e);
        let _ = writeln!(s, "nu = {}", self.nu);
        let _ = writeln!(s, "plane = {}", match self.plane { Plane::Strain => "strain", Plane::Stress => "stress" });
        let _ = writeln!(s, "N = {}", self.n);
        let _ = writeln!(s, "x0_over_h = {}", self.x0_over_h);
        let _ = writeln!(s, "lanczos = {}", self.lanczos);
        let _ = writeln!(s, "epsilon = {:e}", self.epsilon);
        let _ = writeln!(s, "max_reps = {}", self.max_reps);
        for (k, v) in [("grid_x_min", self.grid_x_min), ("grid_x_max", self.grid_x_max), ("grid_y_min", self.grid_y_min), ("grid_y_max", self.grid_y_max)] {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        let _ = writeln!(s, "grid_nx = {}", self.grid_nx);
        let _ = writeln!(s, "grid_ny = {}", self.grid_ny);
        let _ = writeln!(s, "boundary_samples = {}", self.boundary_samples);
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        for (k, v) in [("sweep_h_over_R", &self.sweep_h_over_r), ("sweep_k0", &self.sweep_k0), ("sweep_x0_over_h", &self.sweep_x0_over_h)] {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {}", list(v));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.x0_over_h, 100.0);
        assert_eq!(c.depth(), 10.0);
        let g = c.grid();
        assert_eq!((g.x_min, g.x_max, g.y_min, g.y_max), (0.0, 40.0, -40.0, 0.0));
    }

    #[test]
    fn comments_and_whitespace() {
        let c = parse_config("# header\n\n  k0 = 1.2   # lateral\nplane=stress\nlanczos = off\n").unwrap();
        assert_eq!(c.k0, 1.2);
        assert_eq!(c.plane, Plane::Stress);
        assert!(!c.lanczos);
    }

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::default();
        c.k0 = 0.1 + 0.2;
        c.grid_y_min = Some(-17.25);
        c.sweep_k0 = Some(vec![0.8, 1.0, 1.2]);
        c.epsilon = 3e-15;
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(parse_config(&d.to_text()).unwrap(), d);
    }
}
