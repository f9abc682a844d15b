//! The three intended velocities and the resulting acceleration.

use glam::DVec2;

use super::{PedestrianState, SimError, SimParams};

/// Pair distances are floored here so coincident pedestrians cannot blow up
/// the collision term.
pub const MIN_PAIR_DISTANCE: f64 = 0.01;

/// Forward intended velocity `(vmax / alpha) * unit(e - p)`.
pub fn forward_velocity(ped: &PedestrianState, params: &SimParams) -> Result<DVec2, SimError> {
    let to_goal = ped.destination - ped.position;
    let dist = to_goal.length();
    if dist <= 0.0 || !dist.is_finite() {
        return Err(SimError::UndefinedDirection { ped_id: ped.id });
    }
    Ok(to_goal / dist * (ped.vmax / params.alpha))
}

/// Heading frame: local x along the current velocity, local y to its left.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    origin: DVec2,
    cos: f64,
    sin: f64,
}

impl LocalFrame {
    /// `None` when the pedestrian is not moving (heading undefined).
    pub fn from_state(ped: &PedestrianState) -> Option<Self> {
        let speed = ped.velocity.length();
        if speed <= 0.0 {
            return None;
        }
        let dir = ped.velocity / speed;
        Some(Self {
            origin: ped.position,
            cos: dir.x,
            sin: dir.y,
        })
    }

    /// World point to local coordinates: `R * (g - p)`.
    pub fn to_local(&self, g: DVec2) -> DVec2 {
        let d = g - self.origin;
        DVec2::new(self.cos * d.x + self.sin * d.y, -self.sin * d.x + self.cos * d.y)
    }

    /// Local vector back to world orientation: `R^-1 * l`.
    pub fn vector_to_world(&self, l: DVec2) -> DVec2 {
        DVec2::new(self.cos * l.x - self.sin * l.y, self.sin * l.x + self.cos * l.y)
    }
}

/// Closest pedestrian in the forward sight corridor, as `(id, local, distance)`.
pub fn closest_in_sight(
    ped: &PedestrianState,
    frame: &LocalFrame,
    others: &[PedestrianState],
    params: &SimParams,
) -> Option<(u32, DVec2, f64)> {
    let corridor = params.influence_diameter;
    let mut best: Option<(u32, DVec2, f64)> = None;
    for other in others.iter().filter(|o| o.active && o.id != ped.id) {
        let local = frame.to_local(other.position);
        if local.x <= 0.0 || local.x > params.sight_distance || local.y.abs() >= corridor {
            continue;
        }
        let d = local.length();
        let better = match best {
            None => true,
            Some((id, _, bd)) => d < bd || (d == bd && other.id < id),
        };
        if better {
            best = Some((other.id, local, d));
        }
    }
    best
}

/// First repulsive intended velocity: veer away from the closest pedestrian
/// ahead, with magnitude `vmax * (2r - y) / (chi * d)` along local y.
pub fn repulse_away_velocity(ped: &PedestrianState, others: &[PedestrianState], params: &SimParams) -> DVec2 {
    let Some(frame) = LocalFrame::from_state(ped) else {
        return DVec2::ZERO;
    };
    let Some((_, local, d)) = closest_in_sight(ped, &frame, others, params) else {
        return DVec2::ZERO;
    };
    let two_r = params.influence_diameter;
    let intrusion = local.y.abs().clamp(0.0, two_r);
    // An intruder exactly on the axis counts as being on the right.
    let side = if local.y > 0.0 { 1.0 } else { -1.0 };
    let d = d.max(MIN_PAIR_DISTANCE);
    let lateral = -side * ped.vmax * (two_r - intrusion) / (params.chi * d);
    frame.vector_to_world(DVec2::new(0.0, lateral))
}

/// Contribution of one neighbour to the collision-avoidance sum, before the
/// `vmax / beta` factor. Zero when influence disks do not overlap.
pub fn pair_repulsion(pi: DVec2, pj: DVec2, two_r: f64) -> DVec2 {
    let diff = pi - pj;
    let raw = diff.length();
    if raw >= two_r {
        return DVec2::ZERO;
    }
    let d = raw.max(MIN_PAIR_DISTANCE);
    diff / d * (two_r / d - 1.0)
}

/// Second repulsive intended velocity, summed over all overlapping
/// neighbours in ascending id order.
pub fn collision_avoid_velocity(ped: &PedestrianState, others: &[PedestrianState], params: &SimParams) -> DVec2 {
    let two_r = params.influence_diameter;
    let mut sum = DVec2::ZERO;
    for other in others.iter().filter(|o| o.active && o.id != ped.id) {
        sum += pair_repulsion(ped.position, other.position, two_r);
    }
    sum * (ped.vmax / params.beta)
}

/// `(sum of intended velocities - v) / m`, clamped to `a_max` in magnitude.
pub fn acceleration(ped: &PedestrianState, intended_sum: DVec2, params: &SimParams) -> DVec2 {
    let raw = (intended_sum - ped.velocity) / params.mass;
    let norm = raw.length();
    if norm > params.a_max {
        raw * (params.a_max / norm)
    } else {
        raw
    }
}
