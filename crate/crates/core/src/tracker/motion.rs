use std::collections::BTreeMap;

use crate::atxy::{AtxyDatabase, AtxyRecord, TrapRect};

use super::{tracks_of, DescriptorTable, TrackerError, TrackerParams};

/// Weights of the motion index. `c1` allows a 5% loss when the third point
/// lands two step lengths off the straight-line guess; `c2` then allows 15%
/// for the same miss at a right-angle turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionConstants {
    pub c1: f64,
    pub c2: f64,
}

impl Default for MotionConstants {
    fn default() -> Self {
        let c1 = -(0.95f64).ln() / 2.0;
        // delta = 2, d2 = 1, beta = 90 degrees
        let (delta, d2, beta) = (2.0, 1.0, std::f64::consts::FRAC_PI_2);
        let c2 = -d2 * ((0.85f64).ln() + c1 * delta) / (delta * (beta / 2.0).tan());
        Self { c1, c2 }
    }
}

/// `exp(-c1 δ/d1 - c2 (δ/d2) tan(β/2))`, with `β` in radians. Zero when
/// either step length is zero.
pub fn motion_index_terms(delta: f64, d1: f64, d2: f64, beta: f64, c: &MotionConstants) -> f64 {
    if d1 == 0.0 || d2 == 0.0 {
        return 0.0;
    }
    if delta == 0.0 {
        return 1.0;
    }
    (-c.c1 * delta / d1 - c.c2 * (delta / d2) * (beta / 2.0).tan()).exp()
}

/// How well `p3` continues the motion `p1 -> p2`, in [0, 1].
pub fn motion_index(p1: [f64; 2], p2: [f64; 2], p3: [f64; 2], c: &MotionConstants) -> f64 {
    let s1 = [p2[0] - p1[0], p2[1] - p1[1]];
    let s2 = [p3[0] - p2[0], p3[1] - p2[1]];
    let d1 = s1[0].hypot(s1[1]);
    let d2 = s2[0].hypot(s2[1]);
    if d1 == 0.0 || d2 == 0.0 {
        return 0.0;
    }
    let guess = [2.0 * p2[0] - p1[0], 2.0 * p2[1] - p1[1]];
    let delta = (p3[0] - guess[0]).hypot(p3[1] - guess[1]);
    let cos = ((s1[0] * s2[0] + s1[1] * s2[1]) / (d1 * d2)).clamp(-1.0, 1.0);
    motion_index_terms(delta, d1, d2, cos.acos(), c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recognized {
    pub db: AtxyDatabase,
    /// Traced id to output pedestrian number, for surviving tracks.
    pub id_map: BTreeMap<u32, u32>,
    /// Average motion index of every track long enough to be scored.
    pub mean_index: BTreeMap<u32, f64>,
}

/// Keeps tracks that are long enough and move like pedestrians, renumbered
/// densely from 1 in id order.
pub fn recognize(
    table: &DescriptorTable,
    params: &TrackerParams,
    dt_seconds: f64,
    trap: Option<TrapRect>,
) -> Result<Recognized, TrackerError> {
    let (xi, yi) = table.xy();
    let mut records = Vec::new();
    let mut id_map = BTreeMap::new();
    let mut mean_index = BTreeMap::new();
    for (id, rows) in tracks_of(table) {
        if rows.len() < params.min_track_rows.max(3) {
            continue;
        }
        let pts: Vec<[f64; 2]> = rows.iter().map(|r| [r.features[xi], r.features[yi]]).collect();
        let sum: f64 = pts
            .windows(3)
            .map(|w| motion_index(w[0], w[1], w[2], &params.constants))
            .sum();
        let mean = sum / (pts.len() - 2) as f64;
        mean_index.insert(id, mean);
        if mean < params.motion_threshold {
            continue;
        }
        let new_id = id_map.len() as u32 + 1;
        id_map.insert(id, new_id);
        records.extend(
            rows.iter()
                .zip(&pts)
                .map(|(r, p)| AtxyRecord::new(new_id, r.slice, p[0], p[1])),
        );
    }
    Ok(Recognized {
        db: AtxyDatabase::new(records, dt_seconds, trap)?,
        id_map,
        mean_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::DescriptorRow;

    #[test]
    fn constants_match_published_values() {
        let c = MotionConstants::default();
        assert!((c.c1 - 0.0256466).abs() < 1e-7);
        assert!((c.c2 - 0.0556130).abs() < 1e-6);
    }

    #[test]
    fn anchors() {
        let c = MotionConstants::default();
        assert_eq!(motion_index([0.0, 0.0], [1.0, 0.0], [2.0, 0.0], &c), 1.0);
        assert!((motion_index_terms(2.0, 1.0, 1.0, 0.0, &c) - 0.95).abs() < 1e-12);
        let p = motion_index_terms(2.0, 1.0, 1.0, std::f64::consts::FRAC_PI_2, &c);
        assert!((p - 0.85).abs() < 1e-3, "{p}");
        assert_eq!(motion_index([0.0, 0.0], [0.0, 0.0], [1.0, 0.0], &c), 0.0);
        assert_eq!(motion_index([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], &c), 0.0);
    }

    #[test]
    fn geometric_form_agrees_with_terms() {
        let c = MotionConstants::default();
        // right-angle turn after a unit step
        let p = motion_index([0.0, 0.0], [1.0, 0.0], [1.0, 1.0], &c);
        let expected = motion_index_terms(2f64.sqrt(), 1.0, 1.0, std::f64::consts::FRAC_PI_2, &c);
        assert!((p - expected).abs() < 1e-12);
    }

    fn table_from(tracks: &[Vec<[f64; 2]>]) -> DescriptorTable {
        let mut rows = Vec::new();
        for (i, pts) in tracks.iter().enumerate() {
            for (t, p) in pts.iter().enumerate() {
                let mut r = DescriptorRow::new(t as u32, i as u32 + 1, vec![p[0], p[1]]);
                r.object_id = Some(10 * (i as u32 + 1));
                rows.push(r);
            }
        }
        DescriptorTable::new(vec!["X".into(), "Y".into()], rows).unwrap()
    }

    #[test]
    fn recognize_rules() {
        let straight: Vec<[f64; 2]> = (0..20).map(|t| [t as f64 * 0.1, 1.0]).collect();
        let short: Vec<[f64; 2]> = (0..4).map(|t| [t as f64, 5.0]).collect();
        let still: Vec<[f64; 2]> = (0..10).map(|_| [3.0, 3.0]).collect();
        let table = table_from(&[short, straight, still]);
        let out = recognize(&table, &TrackerParams::default(), 1.0 / 15.0, None).unwrap();
        assert_eq!(out.id_map, BTreeMap::from([(20, 1)]));
        assert_eq!(out.mean_index[&20], 1.0);
        assert_eq!(out.mean_index[&30], 0.0);
        assert!(!out.mean_index.contains_key(&10));
        assert_eq!(out.db.ped_ids(), vec![1]);
        assert_eq!(out.db.len(), 20);
    }
}
