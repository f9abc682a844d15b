use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use rand_pcg::Pcg64;

use crate::atxy::AtxyDatabase;

use super::{DescriptorRow, DescriptorTable, TrackerError};

/// Frames `first..=last` of one pedestrian are deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occlusion {
    pub ped_id: u32,
    pub first_frame: u32,
    pub last_frame: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Position noise (m).
    pub noise_sigma: f64,
    pub occlusions: Vec<Occlusion>,
    /// Number of static clutter objects.
    pub clutter: usize,
    /// Frames each clutter object stays visible.
    pub clutter_frames: u32,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            noise_sigma: 0.0,
            occlusions: Vec::new(),
            clutter: 0,
            clutter_frames: 3,
            seed: 1,
        }
    }
}

/// Where a synthesized row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Pedestrian(u32),
    Clutter(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesized {
    pub table: DescriptorTable,
    /// Origin of every row keyed by `(slice, slot)`.
    pub truth: BTreeMap<(u32, u32), Source>,
}

const RELATIVE_SHAPE_NOISE: f64 = 0.01;

/// Detections `[X, Y, area, perimeter]` from ground-truth trajectories.
///
/// Each pedestrian keeps its own area and perimeter, jittered by 1% per
/// frame; positions get Gaussian noise. Slots are shuffled within a frame.
pub fn synthesize_descriptors(truth: &AtxyDatabase, spec: &SynthSpec) -> Result<Synthesized, TrackerError> {
    let mut rng = Pcg64::seed_from_u64(spec.seed);
    let pos_noise = (spec.noise_sigma > 0.0).then(|| Normal::new(0.0, spec.noise_sigma).unwrap());
    let shape_noise = Normal::new(0.0, RELATIVE_SHAPE_NOISE).unwrap();
    let jitter = |rng: &mut Pcg64| pos_noise.map_or(0.0, |n| n.sample(rng));

    let mut shapes: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
    for id in truth.ped_ids() {
        shapes.insert(id, (rng.random_range(0.15..0.45), rng.random_range(1.4..2.6)));
    }
    let occluded = |id: u32, t: u32| {
        spec.occlusions
            .iter()
            .any(|o| o.ped_id == id && (o.first_frame..=o.last_frame).contains(&t))
    };

    let mut frames: BTreeMap<u32, Vec<(Vec<f64>, Source)>> = BTreeMap::new();
    for r in truth.records() {
        if occluded(r.ped_id, r.t) {
            continue;
        }
        let (area, perim) = shapes[&r.ped_id];
        let features = vec![
            r.x + jitter(&mut rng),
            r.y + jitter(&mut rng),
            area * (1.0 + shape_noise.sample(&mut rng)),
            perim * (1.0 + shape_noise.sample(&mut rng)),
        ];
        frames
            .entry(r.t)
            .or_default()
            .push((features, Source::Pedestrian(r.ped_id)));
    }

    if let Some((t0, t1)) = truth.frame_range() {
        let (mut xmin, mut ymin, mut xmax, mut ymax) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for r in truth.records() {
            xmin = xmin.min(r.x);
            xmax = xmax.max(r.x);
            ymin = ymin.min(r.y);
            ymax = ymax.max(r.y);
        }
        for c in 0..spec.clutter {
            let x = if xmax > xmin {
                rng.random_range(xmin..=xmax)
            } else {
                xmin
            };
            let y = if ymax > ymin {
                rng.random_range(ymin..=ymax)
            } else {
                ymin
            };
            let area = rng.random_range(0.05..0.8);
            let perim = rng.random_range(0.8..3.0);
            let start = rng.random_range(t0..=t1);
            for t in start..(start + spec.clutter_frames).min(t1 + 1) {
                let features = vec![
                    x + jitter(&mut rng),
                    y + jitter(&mut rng),
                    area * (1.0 + shape_noise.sample(&mut rng)),
                    perim * (1.0 + shape_noise.sample(&mut rng)),
                ];
                frames
                    .entry(t)
                    .or_default()
                    .push((features, Source::Clutter(c as u32 + 1)));
            }
        }
    }

    let mut rows = Vec::new();
    let mut sources = BTreeMap::new();
    for (t, mut objs) in frames {
        objs.shuffle(&mut rng);
        for (i, (features, source)) in objs.into_iter().enumerate() {
            let slot = i as u32 + 1;
            sources.insert((t, slot), source);
            rows.push(DescriptorRow::new(t, slot, features));
        }
    }
    let names = ["X", "Y", "area", "perimeter"].map(String::from).to_vec();
    Ok(Synthesized {
        table: DescriptorTable::new(names, rows)?,
        truth: sources,
    })
}
