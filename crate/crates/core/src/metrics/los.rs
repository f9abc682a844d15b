use std::fmt;

/// Walkway level of service, graded on pedestrian space (m²/ped).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelOfService {
    A,
    B,
    C,
    D,
    E,
    F,
}

/// Lower bounds of grades A through E; anything below the last is F.
pub const LOS_THRESHOLDS: [(f64, LevelOfService); 5] = [
    (12.077, LevelOfService::A),
    (3.716, LevelOfService::B),
    (2.230, LevelOfService::C),
    (1.394, LevelOfService::D),
    (0.557, LevelOfService::E),
];

/// Grade for a pedestrian space `m` in m²/ped. Lower bounds are inclusive.
pub fn level_of_service(m: f64) -> LevelOfService {
    LOS_THRESHOLDS
        .iter()
        .find(|(lo, _)| m >= *lo)
        .map_or(LevelOfService::F, |&(_, g)| g)
}

impl fmt::Display for LevelOfService {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}
