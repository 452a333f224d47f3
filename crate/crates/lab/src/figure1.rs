//! Three-panel density surfaces: the coined walk, its continuous-time limit
//! system and the scalar continuous-time walk.

use std::fs;
use std::path::{Path, PathBuf};

use qwalk_core::bessel::bessel_j;
use qwalk_core::ctqw::{ctqw_evolve, limit_pair_evolve, CtqwParams};
use qwalk_core::dtqw::{dtqw_densities, initial_symmetric_entangled, max_group_velocity, DtqwParams};
use qwalk_core::{l1_distance, ProbabilityField, ScalarWaveField};
use serde_json::json;

use crate::error::{LabError, LabResult};
use crate::io::{write_surface, Surface};
use crate::report::Report;
use crate::svg::heatmap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Config {
    pub cos_theta: f64,
    pub gamma: f64,
    pub t_max: u64,
    pub n_sites: usize,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self { cos_theta: 0.25, gamma: 0.125, t_max: 100, n_sites: 256 }
    }
}

impl Figure1Config {
    pub fn validate(&self) -> LabResult<()> {
        if !(self.cos_theta > 0.0 && self.cos_theta < 1.0) {
            return Err(LabError::Usage(format!("cos-theta must lie in (0, 1), got {}", self.cos_theta)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(LabError::Usage(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.n_sites < 8 || !self.n_sites.is_multiple_of(4) {
            return Err(LabError::Usage(format!("n-sites must be a multiple of 4 and at least 8, got {}", self.n_sites)));
        }
        if self.t_max == 0 {
            return Err(LabError::Usage("t-max must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Figure1Output {
    pub config: Figure1Config,
    /// (a) coined walk, τ = 0..=t_max.
    pub dtqw: Surface,
    /// (b) limit system, chiral components summed.
    pub limit: Surface,
    /// (c) scalar walk from `δ_{n,0}`.
    pub ctqw: Surface,
    pub l1_a_b: f64,
    pub l1_b_c: f64,
    pub rho_c_origin: f64,
    pub j0_squared: f64,
    pub max_group_velocity: f64,
    pub peak_left: i64,
    pub peak_right: i64,
    pub wraparound_risk: bool,
}

fn field_of(surface: &Surface, t: u64) -> LabResult<ProbabilityField> {
    let row = surface.row(t).ok_or_else(|| LabError::Usage(format!("no surface row at t = {t}")))?;
    Ok(ProbabilityField::from_values(row.to_vec())?)
}

pub fn run_figure1(config: &Figure1Config) -> LabResult<Figure1Output> {
    config.validate()?;
    let Figure1Config { cos_theta, gamma, t_max, n_sites } = *config;
    let times: Vec<u64> = (0..=t_max).collect();

    let walk = DtqwParams::from_cos_theta(cos_theta, n_sites, t_max as usize)?;
    let start = initial_symmetric_entangled(n_sites)?;
    let dtqw = Surface::from_fields(times.clone(), &dtqw_densities(&start, walk.theta, walk.steps));
    let mut wraparound_risk = walk.guard().wraparound_risk();

    let mut limit_rows = Vec::with_capacity(times.len());
    let mut ctqw_rows = Vec::with_capacity(times.len());
    let delta = ScalarWaveField::delta(n_sites, 0)?;
    for &t in &times {
        let params = CtqwParams::new(gamma, t as f64)?;
        let pair = limit_pair_evolve(&start, &params)?;
        let scalar = ctqw_evolve(&delta, &params)?;
        wraparound_risk |= pair.wraparound_risk() || scalar.wraparound_risk();
        limit_rows.push(pair.field.density());
        ctqw_rows.push(scalar.field.density());
    }
    let limit = Surface::from_fields(times.clone(), &limit_rows);
    let ctqw = Surface::from_fields(times, &ctqw_rows);

    let (a, b, c) = (field_of(&dtqw, t_max)?, field_of(&limit, t_max)?, field_of(&ctqw, t_max)?);
    let l1_a_b = l1_distance(&a, &b)?;
    let l1_b_c = l1_distance(&b, &c)?;
    let j0 = bessel_j(0, 2.0 * gamma * t_max as f64)?;

    let argmax = |range: &mut dyn Iterator<Item = i64>| range.max_by(|x, y| a.at(*x).total_cmp(&a.at(*y))).unwrap_or(0);
    let half = (n_sites / 2) as i64;
    let peak_left = argmax(&mut (-half..0));
    let peak_right = argmax(&mut (1..half));

    Ok(Figure1Output {
        config: *config,
        dtqw,
        limit,
        ctqw,
        l1_a_b,
        l1_b_c,
        rho_c_origin: c.at(0),
        j0_squared: j0 * j0,
        max_group_velocity: max_group_velocity(walk.theta, n_sites)?,
        peak_left,
        peak_right,
        wraparound_risk,
    })
}

impl Figure1Output {
    pub fn report(&self) -> Report {
        let c = self.config;
        Report::new()
            .config("cos_theta", c.cos_theta)
            .config("gamma", c.gamma)
            .config("t_max", c.t_max)
            .config("n_sites", c.n_sites as u64)
            .config("initial_a_b", "symmetric-entangled")
            .config("initial_c", "delta")
            .config("time_sampling", "integer t and tau")
            .config("colour_map", "grey, lightness (rho/rho_max)^0.5")
            .results(json!({
                "panels": {
                    "a": "panel_a.csv",
                    "b": "panel_b.csv",
                    "c": "panel_c.csv",
                },
                "peak_positions": [self.peak_left, self.peak_right],
                "expected_peak_positions": [-c.cos_theta * c.t_max as f64, c.cos_theta * c.t_max as f64],
            }))
            .metric("l1_a_b", self.l1_a_b)
            .metric("l1_b_c", self.l1_b_c)
            .metric("rho_c_origin", self.rho_c_origin)
            .metric("j0_squared", self.j0_squared)
            .metric("max_group_velocity", self.max_group_velocity)
            .metric("wraparound_risk", self.wraparound_risk)
    }

    /// Writes `panel_{a,b,c}.{csv,svg}` and `figure1.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> LabResult<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let panels = [("a", "coined walk", &self.dtqw), ("b", "continuous-time limit", &self.limit), ("c", "continuous-time walk", &self.ctqw)];
        for (tag, title, surface) in panels {
            let csv_path = dir.join(format!("panel_{tag}.csv"));
            write_surface(fs::File::create(&csv_path)?, surface)?;
            written.push(csv_path);
            let svg_path = dir.join(format!("panel_{tag}.svg"));
            fs::write(&svg_path, heatmap(surface, &format!("({tag}) {title}")))?;
            written.push(svg_path);
        }
        let json_path = dir.join("figure1.json");
        fs::write(&json_path, self.report().to_pretty()?)?;
        written.push(json_path);
        Ok(written)
    }
}
