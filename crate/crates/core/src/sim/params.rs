use std::fmt::Write as _;

use crate::atxy::TrapRect;
use crate::config::{parse_real, parse_reals, parse_value, ConfigError, ConfigFile};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Both directions spawn across the whole generator width.
    Mixed,
    /// Each direction keeps to its own (right-hand) half of the walkway.
    Segregated,
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mixed" => Ok(Self::Mixed),
            "segregated" => Ok(Self::Segregated),
            other => Err(format!("expected `mixed` or `segregated`, got `{other}`")),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Mixed => "mixed",
            Self::Segregated => "segregated",
        })
    }
}

/// Model parameters, pedestrian population and scenario controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Global force weight (s).
    pub mass: f64,
    pub alpha: f64,
    /// Collision-avoidance scale (m).
    pub beta: f64,
    /// Repulse-away scale; its sign picks the avoidance side.
    pub chi: f64,
    pub body_diameter: f64,
    pub influence_diameter: f64,
    pub dt: f64,
    pub a_max: f64,
    pub vmax_mean: f64,
    pub vmax_std: f64,
    pub sight_distance: f64,
    pub trap: TrapRect,
    pub n_ways: u8,
    pub generator_spread_mean_pct: f64,
    pub generator_spread_std_pct: f64,
    pub generator_distance: f64,
    /// Longitudinal extent of each generator rectangle (m).
    pub generator_depth: f64,
    pub n_pedestrians: usize,
    pub elderly_fraction: f64,
    pub elderly_vmax: f64,
    pub scenario: Scenario,
    pub seed: u64,
    pub destination_radius: f64,
    pub t_max: f64,
    /// Emit every `decimate`-th frame.
    pub decimate: u32,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            mass: 0.750,
            alpha: 0.205,
            beta: 0.001,
            chi: 0.250,
            body_diameter: 0.60,
            influence_diameter: 1.67,
            dt: 1.0 / 15.0,
            a_max: 1.750,
            vmax_mean: 1.775,
            vmax_std: 0.30,
            sight_distance: 4.0,
            trap: TrapRect {
                xmin: 0.0,
                ymin: 0.0,
                xmax: 12.0,
                ymax: 32.0,
            },
            n_ways: 2,
            generator_spread_mean_pct: 50.0,
            generator_spread_std_pct: 10.0,
            generator_distance: 21.0,
            generator_depth: 150.0,
            n_pedestrians: 300,
            elderly_fraction: 0.0,
            elderly_vmax: 0.84,
            scenario: Scenario::Mixed,
            seed: 1,
            destination_radius: 0.835,
            t_max: 300.0,
            decimate: 1,
        }
    }
}

fn invalid(key: &str, message: impl Into<String>) -> SimError {
    SimError::InvalidParams(format!("{key}: {}", message.into()))
}

impl SimParams {
    pub fn influence_radius(&self) -> f64 {
        0.5 * self.influence_diameter
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("mass", self.mass),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("a_max", self.a_max),
            ("vmax_mean", self.vmax_mean),
            ("body_diameter", self.body_diameter),
            ("influence_diameter", self.influence_diameter),
            ("sight_distance", self.sight_distance),
            ("generator_distance", self.generator_distance),
            ("generator_depth", self.generator_depth),
            ("elderly_vmax", self.elderly_vmax),
            ("destination_radius", self.destination_radius),
            ("t_max", self.t_max),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(key, format!("must be > 0, got {value}")));
            }
        }
        if !(self.chi.is_finite() && self.chi != 0.0) {
            return Err(invalid("chi", "must be finite and non-zero"));
        }
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return Err(invalid("dt", format!("must lie in (0, 1], got {}", self.dt)));
        }
        if !(self.vmax_std.is_finite() && self.vmax_std >= 0.0) {
            return Err(invalid("vmax_std", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.elderly_fraction) {
            return Err(invalid("elderly_fraction", "must lie in [0, 1]"));
        }
        if !(0.0..=100.0).contains(&self.generator_spread_mean_pct) {
            return Err(invalid("generator_spread_mean_pct", "must lie in [0, 100]"));
        }
        if !(self.generator_spread_std_pct.is_finite() && self.generator_spread_std_pct >= 0.0) {
            return Err(invalid("generator_spread_std_pct", "must be >= 0"));
        }
        if !matches!(self.n_ways, 1 | 2) {
            return Err(invalid("n_ways", "must be 1 or 2"));
        }
        if self.decimate == 0 {
            return Err(invalid("decimate", "must be >= 1"));
        }
        TrapRect::new(self.trap.xmin, self.trap.ymin, self.trap.xmax, self.trap.ymax)
            .map_err(|e| invalid("trap", e.to_string()))?;
        Ok(())
    }

    /// Applies a scenario file on top of `self`. Unknown sections or keys fail.
    pub fn apply_config(&mut self, cfg: &ConfigFile) -> Result<(), ConfigError> {
        for (section, entries) in cfg.sections() {
            for (key, entry) in entries {
                let v = entry.value.as_str();
                let unknown = || ConfigError::UnknownKey {
                    section: section.to_string(),
                    key: key.clone(),
                };
                match section {
                    "forces" => match key.as_str() {
                        "mass" => self.mass = parse_real(key, v)?,
                        "alpha" => self.alpha = parse_real(key, v)?,
                        "beta" => self.beta = parse_real(key, v)?,
                        "chi" => self.chi = parse_real(key, v)?,
                        _ => return Err(unknown()),
                    },
                    "pedestrian" => match key.as_str() {
                        "body_diameter" => self.body_diameter = parse_real(key, v)?,
                        "influence_diameter" => self.influence_diameter = parse_real(key, v)?,
                        "vmax_mean" => self.vmax_mean = parse_real(key, v)?,
                        "vmax_std" => self.vmax_std = parse_real(key, v)?,
                        "a_max" => self.a_max = parse_real(key, v)?,
                        "sight_distance" => self.sight_distance = parse_real(key, v)?,
                        "elderly_fraction" => self.elderly_fraction = parse_real(key, v)?,
                        "elderly_vmax" => self.elderly_vmax = parse_real(key, v)?,
                        _ => return Err(unknown()),
                    },
                    "world" => match key.as_str() {
                        "trap" => {
                            let b = parse_reals(key, v)?;
                            if b.len() != 4 {
                                return Err(ConfigError::InvalidValue {
                                    key: key.clone(),
                                    message: "expected xmin,ymin,xmax,ymax".into(),
                                });
                            }
                            self.trap =
                                TrapRect::new(b[0], b[1], b[2], b[3]).map_err(|e| ConfigError::InvalidValue {
                                    key: key.clone(),
                                    message: e.to_string(),
                                })?;
                        }
                        "n_ways" => self.n_ways = parse_value(key, v)?,
                        "generator_distance" => self.generator_distance = parse_real(key, v)?,
                        "generator_spread_mean_pct" => self.generator_spread_mean_pct = parse_real(key, v)?,
                        "generator_spread_std_pct" => self.generator_spread_std_pct = parse_real(key, v)?,
                        "generator_depth" => self.generator_depth = parse_real(key, v)?,
                        "scenario" => self.scenario = parse_value(key, v)?,
                        _ => return Err(unknown()),
                    },
                    "run" => match key.as_str() {
                        "dt" => self.dt = parse_real(key, v)?,
                        "n_pedestrians" => self.n_pedestrians = parse_value(key, v)?,
                        "seed" => self.seed = parse_value(key, v)?,
                        "t_max" => self.t_max = parse_real(key, v)?,
                        "destination_radius" => self.destination_radius = parse_real(key, v)?,
                        "decimate" => self.decimate = parse_value(key, v)?,
                        _ => return Err(unknown()),
                    },
                    other => return Err(ConfigError::UnknownSection(other.to_string())),
                }
            }
        }
        Ok(())
    }

    pub fn from_config_str(text: &str) -> Result<Self, ConfigError> {
        let cfg = ConfigFile::parse(text)?;
        let mut params = Self::default();
        params.apply_config(&cfg)?;
        Ok(params)
    }

    /// Renders the parameters in the scenario file format.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let t = &self.trap;
        writeln!(s, "[forces]").unwrap();
        writeln!(s, "mass = {:?}", self.mass).unwrap();
        writeln!(s, "alpha = {:?}", self.alpha).unwrap();
        writeln!(s, "beta = {:?}", self.beta).unwrap();
        writeln!(s, "chi = {:?}", self.chi).unwrap();
        writeln!(s, "\n[pedestrian]").unwrap();
        writeln!(s, "body_diameter = {:?}", self.body_diameter).unwrap();
        writeln!(s, "influence_diameter = {:?}", self.influence_diameter).unwrap();
        writeln!(s, "vmax_mean = {:?}", self.vmax_mean).unwrap();
        writeln!(s, "vmax_std = {:?}", self.vmax_std).unwrap();
        writeln!(s, "a_max = {:?}", self.a_max).unwrap();
        writeln!(s, "sight_distance = {:?}", self.sight_distance).unwrap();
        writeln!(s, "elderly_fraction = {:?}", self.elderly_fraction).unwrap();
        writeln!(s, "elderly_vmax = {:?}", self.elderly_vmax).unwrap();
        writeln!(s, "\n[world]").unwrap();
        writeln!(s, "trap = {:?},{:?},{:?},{:?}", t.xmin, t.ymin, t.xmax, t.ymax).unwrap();
        writeln!(s, "n_ways = {}", self.n_ways).unwrap();
        writeln!(s, "generator_distance = {:?}", self.generator_distance).unwrap();
        writeln!(s, "generator_spread_mean_pct = {:?}", self.generator_spread_mean_pct).unwrap();
        writeln!(s, "generator_spread_std_pct = {:?}", self.generator_spread_std_pct).unwrap();
        writeln!(s, "generator_depth = {:?}", self.generator_depth).unwrap();
        writeln!(s, "scenario = {}", self.scenario).unwrap();
        writeln!(s, "\n[run]").unwrap();
        writeln!(s, "dt = {:?}", self.dt).unwrap();
        writeln!(s, "n_pedestrians = {}", self.n_pedestrians).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "t_max = {:?}", self.t_max).unwrap();
        writeln!(s, "destination_radius = {:?}", self.destination_radius).unwrap();
        writeln!(s, "decimate = {}", self.decimate).unwrap();
        s
    }
}
