//! Descriptor-table tracker: per-frame detections are linked into
//! identity-consistent tracks by similarity matching, short occlusions are
//! bridged by interpolation, and tracks that do not move like pedestrians
//! are discarded by the motion index.

mod io;
mod motion;
mod synth;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::config::{parse_real, parse_value, ConfigError, ConfigFile};

pub use io::{read_descriptors, write_descriptors};
pub use motion::{motion_index, motion_index_terms, recognize, MotionConstants, Recognized};
pub use synth::{synthesize_descriptors, Occlusion, Source, SynthSpec, Synthesized};

/// Literal used for a missing feature value.
pub const MISSING: f64 = -1.0;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("row {row}: expected {expected} features, got {got}")]
    Layout { row: usize, expected: usize, got: usize },
    #[error("descriptor table needs feature columns named X and Y")]
    MissingXy,
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("row {row}: non-finite position")]
    NonFinite { row: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Atxy(#[from] crate::atxy::AtxyError),
}

/// One detected object in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorRow {
    pub slice: u32,
    pub slot: u32,
    pub features: Vec<f64>,
    pub object_id: Option<u32>,
}

impl DescriptorRow {
    pub fn new(slice: u32, slot: u32, features: Vec<f64>) -> Self {
        Self {
            slice,
            slot,
            features,
            object_id: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<DescriptorRow>,
}

impl DescriptorTable {
    /// Checks the layout and sorts rows by `(slice, slot)`.
    pub fn new(feature_names: Vec<String>, mut rows: Vec<DescriptorRow>) -> Result<Self, TrackerError> {
        let expected = feature_names.len();
        let xy = xy_indices(&feature_names)?;
        for (i, r) in rows.iter().enumerate() {
            if r.features.len() != expected {
                return Err(TrackerError::Layout {
                    row: i,
                    expected,
                    got: r.features.len(),
                });
            }
            let (x, y) = (r.features[xy.0], r.features[xy.1]);
            if !(x.is_finite() && y.is_finite()) {
                return Err(TrackerError::NonFinite { row: i });
            }
        }
        rows.sort_by_key(|r| (r.slice, r.slot));
        Ok(Self { feature_names, rows })
    }

    pub fn xy(&self) -> (usize, usize) {
        xy_indices(&self.feature_names).expect("validated on construction")
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }
}

fn xy_indices(names: &[String]) -> Result<(usize, usize), TrackerError> {
    let x = names.iter().position(|n| n == "X");
    let y = names.iter().position(|n| n == "Y");
    match (x, y) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(TrackerError::MissingXy),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerParams {
    /// Maximum searching depth n; gaps of up to n - 1 frames are bridged.
    pub depth: u32,
    /// Distance allowance per unit depth, in position units.
    pub distance_threshold: f64,
    pub similarity_threshold: f64,
    /// Feature names compared by the similarity index; `None` uses every
    /// feature except X and Y.
    pub similarity_features: Option<Vec<String>>,
    pub min_track_rows: usize,
    pub motion_threshold: f64,
    pub constants: MotionConstants,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            depth: 3,
            distance_threshold: 2.0,
            similarity_threshold: 0.8,
            similarity_features: None,
            min_track_rows: 5,
            motion_threshold: 0.7,
            constants: MotionConstants::default(),
        }
    }
}

impl TrackerParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: &str| ConfigError::InvalidValue {
            key: key.into(),
            message: message.into(),
        };
        if self.depth < 2 {
            return Err(bad("depth", "must be greater than one"));
        }
        if !self.distance_threshold.is_finite() || self.distance_threshold <= 0.0 {
            return Err(bad("distance_threshold", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.similarity_threshold) {
            return Err(bad("similarity_threshold", "must lie in [0, 1]"));
        }
        if !(self.constants.c1 > 0.0 && self.constants.c2 > 0.0) {
            return Err(bad("c1", "motion constants must be positive"));
        }
        Ok(())
    }

    /// Reads the `[tracker]` section; other sections are ignored so the
    /// tracker keys can share a file with a scenario.
    pub fn apply_config(&mut self, cfg: &ConfigFile) -> Result<(), ConfigError> {
        for (section, entries) in cfg.sections() {
            if section != "tracker" {
                continue;
            }
            for (key, entry) in entries {
                let v = entry.value.as_str();
                match key.as_str() {
                    "depth" => self.depth = parse_value(key, v)?,
                    "distance_threshold" => self.distance_threshold = parse_real(key, v)?,
                    "similarity_threshold" => self.similarity_threshold = parse_real(key, v)?,
                    "similarity_features" => {
                        self.similarity_features = Some(
                            v.split(',')
                                .map(|s| s.trim().to_string())
                                .filter(|s| !s.is_empty())
                                .collect(),
                        )
                    }
                    "min_track_rows" => self.min_track_rows = parse_value(key, v)?,
                    "motion_threshold" => self.motion_threshold = parse_real(key, v)?,
                    "c1" => self.constants.c1 = parse_real(key, v)?,
                    "c2" => self.constants.c2 = parse_real(key, v)?,
                    _ => {
                        return Err(ConfigError::UnknownKey {
                            section: section.to_string(),
                            key: key.clone(),
                        })
                    }
                }
            }
        }
        self.validate()
    }

    pub fn from_config_str(text: &str) -> Result<Self, ConfigError> {
        let mut p = Self::default();
        p.apply_config(&ConfigFile::parse(text)?)?;
        Ok(p)
    }
}

/// Resolved column indices for one table.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub xy: (usize, usize),
    pub similarity: Vec<usize>,
}

impl Layout {
    pub fn resolve(table: &DescriptorTable, params: &TrackerParams) -> Result<Self, TrackerError> {
        let xy = table.xy();
        let similarity = match &params.similarity_features {
            Some(names) => names
                .iter()
                .map(|n| {
                    table
                        .feature_index(n)
                        .ok_or_else(|| TrackerError::UnknownFeature(n.clone()))
                })
                .collect::<Result<_, _>>()?,
            None => (0..table.feature_names.len())
                .filter(|&i| i != xy.0 && i != xy.1)
                .collect(),
        };
        Ok(Self { xy, similarity })
    }

    fn distance(&self, a: &DescriptorRow, b: &DescriptorRow) -> f64 {
        let (x, y) = self.xy;
        (a.features[x] - b.features[x]).hypot(a.features[y] - b.features[y])
    }
}

/// Mean over the selected features of `1 - |b - c| / (b + c)`.
///
/// A feature is skipped when either value is the missing literal or the
/// denominator is zero. `None` means every feature was skipped; such a pair
/// never matches.
pub fn similarity_index(base: &DescriptorRow, cand: &DescriptorRow, features: &[usize]) -> Option<f64> {
    assert_eq!(
        base.features.len(),
        cand.features.len(),
        "rows must share one feature layout"
    );
    let mut sum = 0.0;
    let mut used = 0usize;
    for &i in features {
        let (b, c) = (base.features[i], cand.features[i]);
        if b == MISSING || c == MISSING {
            continue;
        }
        let den = b + c;
        if den == 0.0 {
            continue;
        }
        sum += (1.0 - (b - c).abs() / den).clamp(0.0, 1.0);
        used += 1;
    }
    (used > 0).then(|| sum / used as f64)
}

/// Similarity and distance of `cand` as a continuation of `base` at
/// `depth`, if it passes the distance and similarity criteria.
fn score(
    base: &DescriptorRow,
    cand: &DescriptorRow,
    depth: u32,
    params: &TrackerParams,
    layout: &Layout,
) -> Option<(f64, f64)> {
    if cand.object_id.is_some() {
        return None;
    }
    let d = layout.distance(base, cand);
    if d * depth as f64 >= params.distance_threshold {
        return None;
    }
    let lambda = similarity_index(base, cand, &layout.similarity)?;
    (lambda > params.similarity_threshold).then_some((lambda, d))
}

/// Ranking of passing candidates: higher similarity, then nearer, then
/// smaller slot.
fn outranks(a: (f64, f64, u32), b: (f64, f64, u32)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
}

/// Picks the continuation of `base` among `frame` rows searched at `depth`.
///
/// A row already carrying the base's id wins outright. Otherwise a candidate
/// must be unlabeled, lie strictly within `distance_threshold / depth`, and
/// have similarity above the threshold; the best similarity wins, ties going
/// to the nearer row and then the smaller slot. An id listed in `claimed`
/// is never handed out again in this frame.
pub fn match_in_frame(
    base: &DescriptorRow,
    frame: &[DescriptorRow],
    depth: u32,
    params: &TrackerParams,
    layout: &Layout,
    claimed: &BTreeSet<u32>,
) -> Option<usize> {
    if let Some(id) = base.object_id {
        if let Some(i) = frame.iter().position(|r| r.object_id == Some(id)) {
            return Some(i);
        }
        if claimed.contains(&id) {
            return None;
        }
    }
    let mut best: Option<((f64, f64, u32), usize)> = None;
    for (i, cand) in frame.iter().enumerate() {
        let Some((lambda, d)) = score(base, cand, depth, params, layout) else {
            continue;
        };
        let key = (lambda, d, cand.slot);
        if best.is_none_or(|(b, _)| outranks(key, b)) {
            best = Some((key, i));
        }
    }
    best.map(|b| b.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Enter,
    Exit,
    Continue,
    OcclusionBridged,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Enter => "enter",
            Self::Exit => "exit",
            Self::Continue => "continue",
            Self::OcclusionBridged => "occlusion_bridged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackEvent {
    pub kind: EventKind,
    pub object_id: u32,
    pub first_frame: u32,
    pub last_frame: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Traced {
    /// Input rows with ids assigned, plus interpolated rows for bridged
    /// occlusions, sorted by `(slice, slot)`.
    pub table: DescriptorTable,
    pub events: Vec<TrackEvent>,
    /// `(slice, slot)` of every interpolated row.
    pub interpolated: BTreeSet<(u32, u32)>,
}

fn interpolate(a: &[f64], b: &[f64], w: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            if x == MISSING || y == MISSING {
                MISSING
            } else {
                x + (y - x) * w
            }
        })
        .collect()
}

/// Forward tracing over the slices of `table`.
///
/// Existing labels in the input are discarded. Bases of one frame are
/// processed in slot order, each to completion, before the next frame.
pub fn trace(table: &DescriptorTable, params: &TrackerParams) -> Result<Traced, TrackerError> {
    let layout = Layout::resolve(table, params)?;
    let mut events = Vec::new();
    let mut interpolated = BTreeSet::new();
    let (Some(first), Some(last)) = (table.rows.first(), table.rows.last()) else {
        return Ok(Traced {
            table: table.clone(),
            events,
            interpolated,
        });
    };
    let s0 = first.slice;
    let span = (last.slice - s0) as usize + 1;
    let mut frames: Vec<Vec<DescriptorRow>> = vec![Vec::new(); span];
    for r in &table.rows {
        let mut r = r.clone();
        r.object_id = None;
        frames[(r.slice - s0) as usize].push(r);
    }

    let mut next_id = 1u32;
    let mut label_new = |frame: &mut Vec<DescriptorRow>, events: &mut Vec<TrackEvent>| {
        for r in frame.iter_mut().filter(|r| r.object_id.is_none()) {
            r.object_id = Some(next_id);
            events.push(TrackEvent {
                kind: EventKind::Enter,
                object_id: next_id,
                first_frame: r.slice,
                last_frame: r.slice,
            });
            next_id += 1;
        }
    };
    label_new(&mut frames[0], &mut events);

    // bases still searching: (base row, depth at which it searches next)
    let mut pending: Vec<(DescriptorRow, u32)> = Vec::new();
    for s in 0..span - 1 {
        // frame s's bases search s+1 at depth 1 alongside earlier bases
        // still looking across an occlusion; the passing pairs are assigned
        // best-first so no base pre-empts a better continuation
        pending.extend(frames[s].iter().map(|r| (r.clone(), 1)));
        pending.sort_by_key(|(b, k)| (std::cmp::Reverse(*k), b.slot));
        let target = &mut frames[s + 1];
        let present: BTreeSet<u32> = target.iter().filter_map(|r| r.object_id).collect();
        pending.retain(|(b, _)| !present.contains(&b.object_id.expect("labeled base")));
        let mut pairs = Vec::new();
        for (bi, (base, k)) in pending.iter().enumerate() {
            for (ci, cand) in target.iter().enumerate() {
                if let Some((lambda, d)) = score(base, cand, *k, params, &layout) {
                    pairs.push(((lambda, d, cand.slot), *k, base.slot, bi, ci));
                }
            }
        }
        pairs.sort_by(|x, y| {
            y.0 .0
                .total_cmp(&x.0 .0)
                .then(x.0 .1.total_cmp(&y.0 .1))
                .then(x.0 .2.cmp(&y.0 .2))
                .then(x.1.cmp(&y.1))
                .then(x.2.cmp(&y.2))
        });
        let mut taken = vec![false; pending.len()];
        let mut matched = Vec::new();
        for (_, _, _, bi, ci) in pairs {
            if taken[bi] || target[ci].object_id.is_some() {
                continue;
            }
            taken[bi] = true;
            target[ci].object_id = pending[bi].0.object_id;
            matched.push((bi, target[ci].features.clone()));
        }
        for (bi, features) in matched {
            let (base, k) = &pending[bi];
            let id = base.object_id.unwrap();
            if *k == 1 {
                events.push(TrackEvent {
                    kind: EventKind::Continue,
                    object_id: id,
                    first_frame: base.slice,
                    last_frame: base.slice + 1,
                });
                continue;
            }
            for j in 1..*k {
                let frame = &mut frames[(base.slice - s0 + j) as usize];
                let slot = frame.iter().map(|r| r.slot + 1).max().unwrap_or(1);
                let slice = base.slice + j;
                frame.push(DescriptorRow {
                    slice,
                    slot,
                    features: interpolate(&base.features, &features, j as f64 / *k as f64),
                    object_id: Some(id),
                });
                interpolated.insert((slice, slot));
            }
            events.push(TrackEvent {
                kind: EventKind::OcclusionBridged,
                object_id: id,
                first_frame: base.slice,
                last_frame: base.slice + k,
            });
        }
        let mut next = Vec::new();
        for (bi, (base, k)) in pending.drain(..).enumerate() {
            if taken[bi] {
                continue;
            }
            if k < params.depth {
                next.push((base, k + 1));
            } else {
                events.push(TrackEvent {
                    kind: EventKind::Exit,
                    object_id: base.object_id.unwrap(),
                    first_frame: base.slice + 1,
                    last_frame: base.slice + 1,
                });
            }
        }
        pending = next;
        label_new(&mut frames[s + 1], &mut events);
    }
    for (base, _) in pending {
        events.push(TrackEvent {
            kind: EventKind::Exit,
            object_id: base.object_id.unwrap(),
            first_frame: base.slice + 1,
            last_frame: base.slice + 1,
        });
    }

    let rows: Vec<DescriptorRow> = frames.into_iter().flatten().collect();
    Ok(Traced {
        table: DescriptorTable::new(table.feature_names.clone(), rows)?,
        events,
        interpolated,
    })
}

/// Rows per object id, in slice order.
pub fn tracks_of(table: &DescriptorTable) -> BTreeMap<u32, Vec<&DescriptorRow>> {
    let mut out: BTreeMap<u32, Vec<&DescriptorRow>> = BTreeMap::new();
    for r in &table.rows {
        if let Some(id) = r.object_id {
            out.entry(id).or_default().push(r);
        }
    }
    for v in out.values_mut() {
        v.sort_by_key(|r| r.slice);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["X", "Y", "area"].iter().map(|s| s.to_string()).collect()
    }

    fn row(slice: u32, slot: u32, x: f64, y: f64, area: f64) -> DescriptorRow {
        DescriptorRow::new(slice, slot, vec![x, y, area])
    }

    fn layout() -> Layout {
        Layout {
            xy: (0, 1),
            similarity: vec![2],
        }
    }

    #[test]
    fn similarity_hand_values() {
        let a = DescriptorRow::new(0, 1, vec![5.0, 5.0]);
        assert_eq!(similarity_index(&a, &a, &[0, 1]), Some(1.0));
        let b = DescriptorRow::new(0, 1, vec![1.0]);
        let c = DescriptorRow::new(0, 2, vec![3.0]);
        assert_eq!(similarity_index(&b, &c, &[0]), Some(0.5));
        // middle feature missing, last one 4 vs 0
        let d = DescriptorRow::new(0, 1, vec![2.0, -1.0, 4.0]);
        let e = DescriptorRow::new(0, 2, vec![2.0, 7.0, 0.0]);
        assert_eq!(similarity_index(&d, &e, &[0, 1, 2]), Some(0.5));
        let f = DescriptorRow::new(0, 1, vec![-1.0, 0.0]);
        let g = DescriptorRow::new(0, 2, vec![3.0, 0.0]);
        assert_eq!(similarity_index(&f, &g, &[0, 1]), None);
    }

    #[test]
    fn similarity_ratio_shape() {
        let base = DescriptorRow::new(0, 1, vec![1.0]);
        let at = |rho: f64| similarity_index(&base, &DescriptorRow::new(0, 2, vec![rho]), &[0]).unwrap();
        let mut prev = 0.0;
        for i in 1..=10 {
            let v = at(i as f64 / 10.0);
            assert!(v > prev);
            prev = v;
        }
        assert_eq!(at(1.0), 1.0);
        let mut prev = 1.0;
        for i in 2..50 {
            let v = at(i as f64);
            assert!(v < prev);
            prev = v;
        }
        assert!(at(1e9) < 1e-8);
    }

    #[test]
    fn match_rules() {
        let p = TrackerParams {
            distance_threshold: 1.0,
            similarity_threshold: 0.5,
            ..TrackerParams::default()
        };
        let none = BTreeSet::new();
        let base = row(0, 1, 0.0, 0.0, 1.0);
        assert_eq!(
            match_in_frame(&base, &[row(1, 1, 0.0, 0.0, 1.0)], 1, &p, &layout(), &none),
            Some(0)
        );
        // exactly at threshold / depth is rejected
        assert_eq!(
            match_in_frame(&base, &[row(1, 1, 0.5, 0.0, 1.0)], 2, &p, &layout(), &none),
            None
        );
        assert_eq!(
            match_in_frame(&base, &[row(1, 1, 0.49, 0.0, 1.0)], 2, &p, &layout(), &none),
            Some(0)
        );
        // argmax of similarity: area 1.222.. gives 0.9, 1.5 gives 0.8
        let frame = [row(1, 1, 0.1, 0.0, 1.5), row(1, 2, 0.2, 0.0, 11.0 / 9.0)];
        assert_eq!(match_in_frame(&base, &frame, 1, &p, &layout(), &none), Some(1));
        // labeled rows are not candidates, except one carrying the base id
        let mut frame = [row(1, 1, 0.0, 0.0, 1.0), row(1, 2, 0.9, 0.0, 0.6)];
        frame[0].object_id = Some(7);
        assert_eq!(match_in_frame(&base, &frame, 1, &p, &layout(), &none), Some(1));
        let mut labeled = base.clone();
        labeled.object_id = Some(7);
        assert_eq!(match_in_frame(&labeled, &frame, 1, &p, &layout(), &none), Some(0));
        // ties: nearer first, then smaller slot
        let frame = [
            row(1, 3, 0.2, 0.0, 1.0),
            row(1, 2, 0.1, 0.0, 1.0),
            row(1, 1, 0.1, 0.0, 1.0),
        ];
        assert_eq!(match_in_frame(&base, &frame, 1, &p, &layout(), &none), Some(2));
        // claimed id blocks a second assignment
        let claimed: BTreeSet<u32> = [7].into();
        assert_eq!(
            match_in_frame(&labeled, &[row(1, 1, 0.0, 0.0, 1.0)], 1, &p, &layout(), &claimed),
            None
        );
    }

    fn linear_table(skip: &[u32]) -> DescriptorTable {
        let rows = (0..10)
            .filter(|t| !skip.contains(t))
            .map(|t| row(t, 1, t as f64, 0.0, 1.0))
            .collect();
        DescriptorTable::new(names(), rows).unwrap()
    }

    #[test]
    fn single_object_continues() {
        let p = TrackerParams::default();
        let out = trace(&linear_table(&[]), &p).unwrap();
        assert!(out.table.rows.iter().all(|r| r.object_id == Some(1)));
        let cont = out.events.iter().filter(|e| e.kind == EventKind::Continue).count();
        assert_eq!(cont, 9);
        assert!(out.events.iter().all(|e| e.kind != EventKind::OcclusionBridged));
    }

    #[test]
    fn occlusion_is_bridged_exactly() {
        let p = TrackerParams {
            depth: 3,
            distance_threshold: 10.0,
            ..TrackerParams::default()
        };
        let out = trace(&linear_table(&[4, 5]), &p).unwrap();
        assert_eq!(out.table.rows.len(), 10);
        assert!(out.table.rows.iter().all(|r| r.object_id == Some(1)));
        for r in &out.table.rows {
            assert!((r.features[0] - r.slice as f64).abs() < 1e-12);
        }
        let bridged: Vec<_> = out
            .events
            .iter()
            .filter(|e| e.kind == EventKind::OcclusionBridged)
            .collect();
        assert_eq!(bridged.len(), 1);
        assert_eq!((bridged[0].first_frame, bridged[0].last_frame), (3, 6));
        assert_eq!(out.interpolated.len(), 2);
    }

    #[test]
    fn long_gap_splits_identity() {
        let p = TrackerParams {
            depth: 3,
            distance_threshold: 100.0,
            ..TrackerParams::default()
        };
        let out = trace(&linear_table(&[3, 4, 5]), &p).unwrap();
        let ids: BTreeSet<_> = out.table.rows.iter().filter_map(|r| r.object_id).collect();
        assert_eq!(ids.len(), 2);
        assert!(out
            .events
            .iter()
            .any(|e| e.kind == EventKind::Exit && e.first_frame == 3));
        assert!(out.interpolated.is_empty());
    }

    #[test]
    fn symmetric_swap_is_deterministic() {
        // two identical objects crossing; one hidden for a frame
        let mut rows = Vec::new();
        for t in 0..6u32 {
            let a = t as f64 * 0.2;
            rows.push(row(t, 1, a, 0.0, 1.0));
            if t != 2 {
                rows.push(row(t, 2, 1.0 - a, 0.0, 1.0));
            }
        }
        let table = DescriptorTable::new(names(), rows).unwrap();
        let p = TrackerParams {
            distance_threshold: 3.0,
            ..TrackerParams::default()
        };
        let a = trace(&table, &p).unwrap();
        let b = trace(&table, &p).unwrap();
        assert_eq!(a, b);
        for s in 0..6 {
            let ids: Vec<_> = a
                .table
                .rows
                .iter()
                .filter(|r| r.slice == s)
                .filter_map(|r| r.object_id)
                .collect();
            let set: BTreeSet<_> = ids.iter().collect();
            assert_eq!(ids.len(), set.len());
        }
    }

    #[test]
    fn config_section() {
        let p = TrackerParams::from_config_str(
            "[tracker]\ndepth = 4\ndistance_threshold = 1.5\nsimilarity_features = area, perimeter\n",
        )
        .unwrap();
        assert_eq!(p.depth, 4);
        assert_eq!(
            p.similarity_features.as_deref(),
            Some(&["area".to_string(), "perimeter".to_string()][..])
        );
        assert!(TrackerParams::from_config_str("[tracker]\ndepth = 1\n").is_err());
        assert!(matches!(
            TrackerParams::from_config_str("[tracker]\nfoo = 1\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
    }
}
