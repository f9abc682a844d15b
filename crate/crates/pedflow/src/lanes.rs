//! Lane counting by 1-D single-linkage clustering of lateral positions.

use std::collections::BTreeMap;

use pedflow_core::atxy::AtxyDatabase;
use pedflow_core::sim::Direction;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupLanes {
    pub group: Direction,
    pub pedestrians: usize,
    pub lane_count: usize,
    /// Mean lateral extent (max X - min X) of the lanes, m.
    pub mean_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaneReport {
    pub t: u32,
    pub groups: Vec<GroupLanes>,
}

/// Groups from the sign of each pedestrian's mean Y velocity. Pedestrians
/// with a single record, or no net Y motion, are left out.
pub fn infer_groups(db: &AtxyDatabase) -> BTreeMap<u32, Direction> {
    db.tracks()
        .filter_map(|tr| {
            let dy = tr.last()?.y - tr.first()?.y;
            let dir = if dy > 0.0 {
                Direction::Up
            } else if dy < 0.0 {
                Direction::Down
            } else {
                return None;
            };
            Some((tr[0].ped_id, dir))
        })
        .collect()
}

/// Splits sorted positions wherever the gap exceeds `gap`.
pub fn cluster_1d(xs: &mut [f64], gap: f64) -> Vec<(f64, f64)> {
    xs.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let Some(&first) = xs.first() else {
        return out;
    };
    let (mut lo, mut hi) = (first, first);
    for &x in &xs[1..] {
        if x - hi > gap {
            out.push((lo, hi));
            lo = x;
        }
        hi = x;
    }
    out.push((lo, hi));
    out
}

/// Lane counts per direction group at every `every`-th frame. The linkage
/// gap is one body diameter.
pub fn lane_formation_report(
    db: &AtxyDatabase,
    groups: &BTreeMap<u32, Direction>,
    body_diameter: f64,
    every: u32,
) -> Vec<LaneReport> {
    let every = every.max(1);
    let mut frames: BTreeMap<u32, BTreeMap<Direction, Vec<f64>>> = BTreeMap::new();
    for r in db.records() {
        if r.t % every != 0 {
            continue;
        }
        if let Some(&g) = groups.get(&r.ped_id) {
            frames.entry(r.t).or_default().entry(g).or_default().push(r.x);
        }
    }
    frames
        .into_iter()
        .map(|(t, by_group)| LaneReport {
            t,
            groups: by_group
                .into_iter()
                .map(|(group, mut xs)| {
                    let lanes = cluster_1d(&mut xs, body_diameter);
                    GroupLanes {
                        group,
                        pedestrians: xs.len(),
                        lane_count: lanes.len(),
                        mean_width: lanes.iter().map(|(lo, hi)| hi - lo).sum::<f64>() / lanes.len() as f64,
                    }
                })
                .collect(),
        })
        .collect()
}

/// Mean lane count of `group` over reports at or after frame `from`.
pub fn mean_lane_count(reports: &[LaneReport], group: Direction, from: u32) -> Option<f64> {
    let counts: Vec<f64> = reports
        .iter()
        .filter(|r| r.t >= from)
        .flat_map(|r| r.groups.iter().filter(|g| g.group == group))
        .map(|g| g.lane_count as f64)
        .collect();
    (!counts.is_empty()).then(|| counts.iter().sum::<f64>() / counts.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pedflow_core::atxy::AtxyRecord;

    fn columns() -> AtxyDatabase {
        let mut recs = Vec::new();
        for t in 0..10u32 {
            for (i, x) in [2.0, 2.3, 8.0, 8.4].into_iter().enumerate() {
                recs.push(AtxyRecord::new(i as u32 + 1, t, x, t as f64 * 0.1 + i as f64));
            }
        }
        AtxyDatabase::new(recs, 0.1, None).unwrap()
    }

    #[test]
    fn two_columns_give_two_lanes() {
        let db = columns();
        let groups = infer_groups(&db);
        assert!(groups.values().all(|&g| g == Direction::Up));
        let reports = lane_formation_report(&db, &groups, 0.6, 1);
        assert_eq!(reports.len(), 10);
        for r in &reports {
            assert_eq!(r.groups.len(), 1);
            assert_eq!(r.groups[0].lane_count, 2);
            assert!((r.groups[0].mean_width - 0.35).abs() < 1e-12);
        }
        assert_eq!(mean_lane_count(&reports, Direction::Up, 0), Some(2.0));
        assert_eq!(mean_lane_count(&reports, Direction::Down, 0), None);
    }

    #[test]
    fn single_pedestrian_is_one_lane() {
        let db = AtxyDatabase::new(
            vec![AtxyRecord::new(1, 0, 3.0, 0.0), AtxyRecord::new(1, 1, 3.0, -1.0)],
            0.1,
            None,
        )
        .unwrap();
        let groups = infer_groups(&db);
        assert_eq!(groups[&1], Direction::Down);
        let reports = lane_formation_report(&db, &groups, 0.6, 1);
        assert!(reports
            .iter()
            .all(|r| r.groups[0].lane_count == 1 && r.groups[0].mean_width == 0.0));
    }

    #[test]
    fn sampling_skips_frames() {
        let db = columns();
        let reports = lane_formation_report(&db, &infer_groups(&db), 0.6, 3);
        let ts: Vec<u32> = reports.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![0, 3, 6, 9]);
    }

    #[test]
    fn gap_equal_to_diameter_links() {
        let mut xs = vec![0.0, 0.6, 1.3];
        assert_eq!(cluster_1d(&mut xs, 0.6), vec![(0.0, 0.6), (1.3, 1.3)]);
    }
}
