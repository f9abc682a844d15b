//! Pedestrian generators: off-trap spawn rectangles on either end of the
//! walkway.
//!
//! Random streams are PCG64 (`Lcg128Xsl64`). Placement draws from stream 0
//! of the run seed; each pedestrian's speed draws come from its own stream
//! numbered by its id, so changing one pedestrian's draws never shifts
//! another's.

use glam::DVec2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rand_pcg::Pcg64;

use super::{Direction, PedestrianState, Scenario, SimError, SimParams};

pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;
const MIN_VMAX: f64 = 0.1;
const SEED_MIX: u128 = 0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c834;

pub fn placement_stream(seed: u64) -> Pcg64 {
    Pcg64::new(seed as u128 ^ SEED_MIX, 0)
}

pub fn pedestrian_stream(seed: u64, ped_id: u32) -> Pcg64 {
    Pcg64::new(seed as u128 ^ SEED_MIX, ped_id as u128)
}

/// Spawn rectangle for one walking direction, with the lateral sampling law.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub direction: Direction,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub lateral_mean: f64,
    pub lateral_std: f64,
}

impl Generator {
    pub fn contains(&self, p: DVec2) -> bool {
        p.x >= self.x_lo && p.x <= self.x_hi && p.y >= self.y_lo && p.y <= self.y_hi
    }
}

pub fn group_sizes(params: &SimParams) -> (usize, usize) {
    if params.n_ways == 1 {
        (params.n_pedestrians, 0)
    } else {
        let up = params.n_pedestrians.div_ceil(2);
        (up, params.n_pedestrians - up)
    }
}

/// Id parity decides the direction in two-way runs: odd ids walk up.
pub fn direction_of(params: &SimParams, id: u32) -> Direction {
    if params.n_ways == 1 || id % 2 == 1 {
        Direction::Up
    } else {
        Direction::Down
    }
}

/// Spawn rectangle for `direction`: spans the walkway laterally (or the
/// group's half of it) and `generator_depth` longitudinally, starting
/// `generator_distance` beyond the trap edge.
pub fn generator_for(params: &SimParams, direction: Direction) -> Generator {
    let trap = &params.trap;
    let xmid = 0.5 * (trap.xmin + trap.xmax);
    let (x_lo, x_hi) = match (params.scenario, direction) {
        (Scenario::Mixed, _) => (trap.xmin, trap.xmax),
        // right-hand side of the walking direction
        (Scenario::Segregated, Direction::Up) => (xmid, trap.xmax),
        (Scenario::Segregated, Direction::Down) => (trap.xmin, xmid),
    };
    let band = x_hi - x_lo;
    let lateral_mean = x_lo + params.generator_spread_mean_pct / 100.0 * band;
    let lateral_std = params.generator_spread_std_pct / 100.0 * band;
    let depth = params.generator_depth;
    let (y_lo, y_hi) = match direction {
        Direction::Up => {
            let near = trap.ymin - params.generator_distance;
            (near - depth, near)
        }
        Direction::Down => {
            let near = trap.ymax + params.generator_distance;
            (near, near + depth)
        }
    };
    Generator {
        direction,
        x_lo,
        x_hi,
        y_lo,
        y_hi,
        lateral_mean,
        lateral_std,
    }
}

/// Mirror of a spawn point across the trap's cross-walkway centre line.
pub fn destination_for(params: &SimParams, origin: DVec2) -> DVec2 {
    DVec2::new(origin.x, params.trap.ymin + params.trap.ymax - origin.y)
}

fn sample_lateral(generator: &Generator, lateral: Option<&Normal<f64>>, rng: &mut Pcg64) -> Option<f64> {
    let x = match lateral {
        Some(n) => n.sample(rng),
        None => generator.lateral_mean,
    };
    (x >= generator.x_lo && x <= generator.x_hi).then_some(x)
}

fn sample_vmax(params: &SimParams, id: u32) -> f64 {
    let mut rng = pedestrian_stream(params.seed, id);
    let elderly = params.elderly_fraction > 0.0 && rng.random::<f64>() < params.elderly_fraction;
    let (mean, std) = if elderly {
        (
            params.elderly_vmax,
            params.vmax_std * params.elderly_vmax / params.vmax_mean,
        )
    } else {
        (params.vmax_mean, params.vmax_std)
    };
    if std <= 0.0 {
        return mean.max(MIN_VMAX);
    }
    let law = Normal::new(mean, std).expect("finite std");
    loop {
        let v = law.sample(&mut rng);
        if v > MIN_VMAX {
            return v;
        }
    }
}

/// Creates every pedestrian at t = 0, at rest, without overlapping bodies.
pub fn generate_pedestrians(params: &SimParams) -> Result<Vec<PedestrianState>, SimError> {
    params.validate()?;
    let generators = [
        generator_for(params, Direction::Up),
        generator_for(params, Direction::Down),
    ];
    let laterals: Vec<Option<Normal<f64>>> = generators
        .iter()
        .map(|g| (g.lateral_std > 0.0).then(|| Normal::new(g.lateral_mean, g.lateral_std).unwrap()))
        .collect();
    let mut rng = placement_stream(params.seed);
    let min_sep2 = params.body_diameter * params.body_diameter;
    let mut placed: [Vec<DVec2>; 2] = [Vec::new(), Vec::new()];
    let mut peds = Vec::with_capacity(params.n_pedestrians);
    for idx in 0..params.n_pedestrians {
        let id = idx as u32 + 1;
        let direction = direction_of(params, id);
        let g = direction.index();
        let generator = &generators[g];
        let mut origin = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let Some(x) = sample_lateral(generator, laterals[g].as_ref(), &mut rng) else {
                continue;
            };
            let y = rng.random_range(generator.y_lo..=generator.y_hi);
            let candidate = DVec2::new(x, y);
            if placed[g].iter().all(|q| q.distance_squared(candidate) >= min_sep2) {
                origin = Some(candidate);
                break;
            }
        }
        let origin = origin.ok_or(SimError::Capacity {
            ped_id: id,
            attempts: MAX_PLACEMENT_ATTEMPTS,
        })?;
        placed[g].push(origin);
        peds.push(PedestrianState {
            id,
            position: origin,
            velocity: DVec2::ZERO,
            vmax: sample_vmax(params, id),
            origin,
            destination: destination_for(params, origin),
            group: direction,
            active: true,
            t_enter_trap: None,
            t_exit_trap: None,
        });
    }
    Ok(peds)
}
