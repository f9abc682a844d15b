//! Deterministic force-based pedestrian simulator.
//!
//! Every active pedestrian feels three intended velocities (forward,
//! repulse-away, collision-avoid); their sum minus the current velocity,
//! divided by the mass, is the acceleration. Updates are synchronous: all
//! forces at frame `t` read the same snapshot, so the result does not depend
//! on evaluation order.

pub mod forces;
pub mod generate;
mod params;

use std::collections::BTreeMap;

use glam::DVec2;
use thiserror::Error;

use crate::atxy::{AtxyDatabase, AtxyError, AtxyRecord};

pub use forces::{acceleration, collision_avoid_velocity, forward_velocity, repulse_away_velocity};
pub use generate::generate_pedestrians;
pub use params::{Scenario, SimParams};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("could not place pedestrian {ped_id} without overlap after {attempts} attempts")]
    Capacity { ped_id: u32, attempts: usize },
    #[error("pedestrian {ped_id} sits on its destination; direction undefined")]
    UndefinedDirection { ped_id: u32 },
    #[error("non-finite {term} for pedestrian {ped_id} at frame {frame}")]
    NumericalFault {
        ped_id: u32,
        frame: u32,
        term: &'static str,
    },
    #[error(transparent)]
    Database(#[from] AtxyError),
}

/// Walking direction along the Y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn index(self) -> usize {
        match self {
            Self::Up => 0,
            Self::Down => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianState {
    pub id: u32,
    pub position: DVec2,
    pub velocity: DVec2,
    pub vmax: f64,
    pub origin: DVec2,
    pub destination: DVec2,
    pub group: Direction,
    pub active: bool,
    pub t_enter_trap: Option<u32>,
    pub t_exit_trap: Option<u32>,
}

impl PedestrianState {
    /// Unit vector from origin to destination.
    pub fn desired_direction(&self) -> DVec2 {
        (self.destination - self.origin).normalize_or_zero()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDiagnostics {
    pub t: u32,
    pub active: usize,
    /// Pairs whose body disks overlap.
    pub overlap_count: usize,
    /// Pedestrians moving backwards relative to their goal.
    pub pushback_count: usize,
    /// Largest applied acceleration magnitude this step.
    pub max_accel: f64,
    /// Largest `speed - vmax` this step (should never exceed 0).
    pub max_speed_excess: f64,
}

/// Velocity component against the goal direction that counts as a push-back.
pub const PUSHBACK_THRESHOLD: f64 = -0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub frame: u32,
    pub peds: Vec<PedestrianState>,
}

impl World {
    pub fn new(peds: Vec<PedestrianState>) -> Self {
        let mut peds = peds;
        peds.sort_by_key(|p| p.id);
        Self { frame: 0, peds }
    }

    pub fn active_count(&self) -> usize {
        self.peds.iter().filter(|p| p.active).count()
    }
}

fn check_finite(v: DVec2, ped_id: u32, frame: u32, term: &'static str) -> Result<DVec2, SimError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SimError::NumericalFault { ped_id, frame, term })
    }
}

/// Total intended velocity and clamped acceleration for one pedestrian,
/// read from the snapshot `others`.
pub fn pedestrian_acceleration(
    ped: &PedestrianState,
    others: &[PedestrianState],
    params: &SimParams,
    frame: u32,
) -> Result<DVec2, SimError> {
    let f = check_finite(forward_velocity(ped, params)?, ped.id, frame, "forward velocity")?;
    let a = check_finite(
        repulse_away_velocity(ped, others, params),
        ped.id,
        frame,
        "repulse-away velocity",
    )?;
    let r = check_finite(
        collision_avoid_velocity(ped, others, params),
        ped.id,
        frame,
        "collision-avoid velocity",
    )?;
    check_finite(acceleration(ped, f + a + r, params), ped.id, frame, "acceleration")
}

fn clamp_speed(v: DVec2, vmax: f64) -> DVec2 {
    let s = v.length();
    if s > vmax {
        v * (vmax / s)
    } else {
        v
    }
}

/// Advances the world by one Euler step of `params.dt`.
pub fn step(world: &World, params: &SimParams) -> Result<(World, StepDiagnostics), SimError> {
    let frame = world.frame;
    let snapshot: Vec<PedestrianState> = world.peds.iter().filter(|p| p.active).cloned().collect();
    let accels = snapshot
        .iter()
        .map(|p| pedestrian_acceleration(p, &snapshot, params, frame))
        .collect::<Result<Vec<_>, _>>()?;

    let next_frame = frame + 1;
    let mut next = world.clone();
    next.frame = next_frame;
    let mut diag = StepDiagnostics {
        t: next_frame,
        ..Default::default()
    };
    for (ped, &a) in next.peds.iter_mut().filter(|p| p.active).zip(&accels) {
        diag.max_accel = diag.max_accel.max(a.length());
        ped.velocity = clamp_speed(ped.velocity + a * params.dt, ped.vmax);
        ped.position += ped.velocity * params.dt;
        check_finite(ped.position, ped.id, next_frame, "position")?;
        diag.max_speed_excess = diag.max_speed_excess.max(ped.velocity.length() - ped.vmax);

        let inside = params.trap.contains(ped.position.x, ped.position.y);
        if inside && ped.t_enter_trap.is_none() {
            ped.t_enter_trap = Some(next_frame);
        }
        if ped.t_enter_trap.is_some() && !inside && ped.t_exit_trap.is_none() {
            ped.t_exit_trap = Some(next_frame);
        }
        if inside {
            ped.t_exit_trap = None;
        }
        if ped.position.distance(ped.destination) <= params.destination_radius {
            ped.active = false;
        }
    }

    let active: Vec<&PedestrianState> = next.peds.iter().filter(|p| p.active).collect();
    diag.active = active.len();
    let body2 = params.body_diameter * params.body_diameter;
    for (i, a) in active.iter().enumerate() {
        for b in &active[i + 1..] {
            if a.position.distance_squared(b.position) < body2 {
                diag.overlap_count += 1;
            }
        }
        let to_goal = (a.destination - a.position).normalize_or_zero();
        if a.velocity.dot(to_goal) < PUSHBACK_THRESHOLD {
            diag.pushback_count += 1;
        }
    }
    Ok((next, diag))
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Records only while a pedestrian is inside the trap.
    pub trap: AtxyDatabase,
    /// Every active pedestrian at every emitted frame.
    pub full: AtxyDatabase,
    pub diagnostics: Vec<StepDiagnostics>,
    pub final_world: World,
    pub vmax: BTreeMap<u32, f64>,
    pub groups: BTreeMap<u32, Direction>,
    pub desired_directions: BTreeMap<u32, [f64; 2]>,
    /// False when `t_max` cut the run short with pedestrians still walking.
    pub complete: bool,
    pub steps: u32,
}

impl RunOutput {
    /// Overlap and push-back counts as fractions of active pedestrians,
    /// averaged over steps after `skip_seconds`.
    pub fn health_rates(&self, dt: f64, skip_seconds: f64) -> (f64, f64) {
        let skip = (skip_seconds / dt).round() as u32;
        let mut overlap = 0.0;
        let mut push = 0.0;
        let mut samples = 0usize;
        for d in self.diagnostics.iter().filter(|d| d.t > skip && d.active > 0) {
            overlap += d.overlap_count as f64 / d.active as f64;
            push += d.pushback_count as f64 / d.active as f64;
            samples += 1;
        }
        if samples == 0 {
            (0.0, 0.0)
        } else {
            (overlap / samples as f64, push / samples as f64)
        }
    }
}

fn record_frame(world: &World, params: &SimParams, full: &mut Vec<AtxyRecord>, trap: &mut Vec<AtxyRecord>) {
    if !world.frame.is_multiple_of(params.decimate) {
        return;
    }
    let t = world.frame / params.decimate;
    for p in world.peds.iter().filter(|p| p.active) {
        let rec = AtxyRecord::new(p.id, t, p.position.x, p.position.y);
        full.push(rec);
        if params.trap.contains(rec.x, rec.y) {
            trap.push(rec);
        }
    }
}

/// Runs from a prepared world until every pedestrian arrives or `t_max`.
pub fn run_world(initial: World, params: &SimParams) -> Result<RunOutput, SimError> {
    params.validate()?;
    let vmax = initial.peds.iter().map(|p| (p.id, p.vmax)).collect();
    let groups = initial.peds.iter().map(|p| (p.id, p.group)).collect();
    let desired_directions = initial
        .peds
        .iter()
        .map(|p| {
            let d = p.desired_direction();
            (p.id, [d.x, d.y])
        })
        .collect();
    let max_steps = (params.t_max / params.dt).ceil() as u32;
    let mut full = Vec::new();
    let mut trap = Vec::new();
    let mut diagnostics = Vec::new();
    let mut world = initial;
    record_frame(&world, params, &mut full, &mut trap);
    while world.active_count() > 0 && world.frame < max_steps {
        // Emit the final position of pedestrians that arrive this step too.
        let (next, diag) = step(&world, params)?;
        let arrived: Vec<u32> = world
            .peds
            .iter()
            .zip(&next.peds)
            .filter(|(before, after)| before.active && !after.active)
            .map(|(p, _)| p.id)
            .collect();
        world = next;
        if !arrived.is_empty() && world.frame.is_multiple_of(params.decimate) {
            let t = world.frame / params.decimate;
            for p in world.peds.iter().filter(|p| arrived.contains(&p.id)) {
                let rec = AtxyRecord::new(p.id, t, p.position.x, p.position.y);
                full.push(rec);
                if params.trap.contains(rec.x, rec.y) {
                    trap.push(rec);
                }
            }
        }
        record_frame(&world, params, &mut full, &mut trap);
        diagnostics.push(diag);
    }
    let dt_out = params.dt * params.decimate as f64;
    Ok(RunOutput {
        trap: AtxyDatabase::new(trap, dt_out, Some(params.trap))?,
        full: AtxyDatabase::new(full, dt_out, Some(params.trap))?,
        diagnostics,
        complete: world.active_count() == 0,
        steps: world.frame,
        final_world: world,
        vmax,
        groups,
        desired_directions,
    })
}

/// Generates the population for `params` and runs it.
pub fn run(params: &SimParams) -> Result<RunOutput, SimError> {
    let peds = generate_pedestrians(params)?;
    run_world(World::new(peds), params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lone(alpha: f64) -> (World, SimParams) {
        let params = SimParams {
            alpha,
            n_pedestrians: 1,
            n_ways: 1,
            ..SimParams::default()
        };
        let ped = PedestrianState {
            id: 1,
            position: DVec2::new(6.0, -21.0),
            velocity: DVec2::ZERO,
            vmax: 1.775,
            origin: DVec2::new(6.0, -21.0),
            destination: DVec2::new(6.0, 53.0),
            group: Direction::Up,
            active: true,
            t_enter_trap: None,
            t_exit_trap: None,
        };
        (World::new(vec![ped]), params)
    }

    #[test]
    fn free_flow_straight_line() {
        let (mut world, params) = lone(1.0);
        for _ in 0..150 {
            world = step(&world, &params).unwrap().0;
            let p = &world.peds[0];
            assert!(p.velocity.length() <= p.vmax + 1e-9);
            assert!((p.position.x - 6.0).abs() < 1e-12);
        }
        let speed = world.peds[0].velocity.length();
        assert!((speed - 1.775).abs() < 0.01 * 1.775, "{speed}");
    }

    #[test]
    fn stationary_without_net_intent() {
        let (world, params) = lone(1.0);
        let mut w = world.clone();
        // sitting exactly on the destination radius boundary is "arrived"
        w.peds[0].destination = w.peds[0].position + DVec2::new(0.0, 0.5);
        let (next, _) = step(&w, &params).unwrap();
        assert!(!next.peds[0].active);
    }

    #[test]
    fn trap_crossing_frames_recorded() {
        let (world, params) = lone(0.205);
        let out = run_world(world, &params).unwrap();
        assert!(out.complete);
        let p = &out.final_world.peds[0];
        let (enter, exit) = (p.t_enter_trap.unwrap(), p.t_exit_trap.unwrap());
        assert!(exit > enter);
        let crossing = (exit - enter) as f64 * params.dt;
        assert!((crossing - 32.0 / 1.775).abs() < 0.2, "{crossing}");
        let track = out.trap.track(1);
        assert_eq!(track.first().unwrap().t, enter);
        assert_eq!(track.last().unwrap().t, exit - 1);
    }

    #[test]
    fn empty_population() {
        let params = SimParams {
            n_pedestrians: 0,
            ..SimParams::default()
        };
        let out = run(&params).unwrap();
        assert!(out.trap.is_empty() && out.full.is_empty());
        assert!(out.complete);
    }

    #[test]
    fn truncated_run_is_flagged() {
        let params = SimParams {
            n_pedestrians: 4,
            t_max: 2.0,
            ..SimParams::default()
        };
        let out = run(&params).unwrap();
        assert!(!out.complete);
        assert_eq!(out.steps, 30);
    }

    #[test]
    fn decimation_keeps_every_other_frame() {
        let base = SimParams {
            n_pedestrians: 6,
            ..SimParams::default()
        };
        let a = run(&base).unwrap();
        let b = run(&SimParams {
            decimate: 2,
            ..base.clone()
        })
        .unwrap();
        assert!((b.full.dt_seconds() - 2.0 * base.dt).abs() < 1e-15);
        for id in a.full.ped_ids() {
            let na = a.full.track(id).len() as i64;
            let nb = b.full.track(id).len() as i64;
            assert!((na - 2 * nb).abs() <= 2, "{na} vs {nb}");
        }
    }
}
