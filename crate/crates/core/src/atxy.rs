//! The aTXY trajectory database: one `(pedestrian, frame, x, y)` row per
//! observation. Simulator, tracker and analytics all exchange data in this
//! form.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AtxyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate record for pedestrian {ped_id} at frame {t}")]
    Duplicate { ped_id: u32, t: u32 },
    #[error("invalid sampling interval {0}")]
    InvalidDt(f64),
    #[error("non-finite coordinate for pedestrian {ped_id} at frame {t}")]
    NonFinite { ped_id: u32, t: u32 },
    #[error("invalid trap rectangle: {0}")]
    InvalidTrap(String),
    #[error("degenerate geometry: {0}")]
    Geometry(String),
    #[error("rank-deficient calibration data: {0}")]
    RankDeficient(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AtxyError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtxyRecord {
    pub ped_id: u32,
    pub t: u32,
    pub x: f64,
    pub y: f64,
}

impl AtxyRecord {
    pub fn new(ped_id: u32, t: u32, x: f64, y: f64) -> Self {
        Self { ped_id, t, x, y }
    }
}

/// Measurement rectangle. Walking runs along Y, so `width` is the X extent
/// and `length` the Y extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapRect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl TrapRect {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let all_finite = [xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite());
        if !all_finite || xmin >= xmax || ymin >= ymax {
            return Err(AtxyError::InvalidTrap(format!("[{xmin}, {ymin}, {xmax}, {ymax}]")));
        }
        Ok(Self { xmin, ymin, xmax, ymax })
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn length(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.length()
    }

    /// Closed containment: boundary points count as inside.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }
}

/// Records sorted by `(ped_id, t)` with unique keys.
#[derive(Debug, Clone, PartialEq)]
pub struct AtxyDatabase {
    records: Vec<AtxyRecord>,
    dt_seconds: f64,
    trap: Option<TrapRect>,
}

impl AtxyDatabase {
    pub fn new(mut records: Vec<AtxyRecord>, dt_seconds: f64, trap: Option<TrapRect>) -> Result<Self> {
        if !(dt_seconds.is_finite() && dt_seconds > 0.0) {
            return Err(AtxyError::InvalidDt(dt_seconds));
        }
        records.sort_by_key(|r| (r.ped_id, r.t));
        for pair in records.windows(2) {
            if pair[0].ped_id == pair[1].ped_id && pair[0].t == pair[1].t {
                return Err(AtxyError::Duplicate {
                    ped_id: pair[0].ped_id,
                    t: pair[0].t,
                });
            }
        }
        if let Some(r) = records.iter().find(|r| !(r.x.is_finite() && r.y.is_finite())) {
            return Err(AtxyError::NonFinite {
                ped_id: r.ped_id,
                t: r.t,
            });
        }
        Ok(Self {
            records,
            dt_seconds,
            trap,
        })
    }

    pub fn empty(dt_seconds: f64, trap: Option<TrapRect>) -> Result<Self> {
        Self::new(Vec::new(), dt_seconds, trap)
    }

    pub fn records(&self) -> &[AtxyRecord] {
        &self.records
    }

    pub fn dt_seconds(&self) -> f64 {
        self.dt_seconds
    }

    pub fn trap(&self) -> Option<&TrapRect> {
        self.trap.as_ref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn with_trap(mut self, trap: Option<TrapRect>) -> Self {
        self.trap = trap;
        self
    }

    /// Iterates over each pedestrian's records as a contiguous, frame-ordered slice.
    pub fn tracks(&self) -> impl Iterator<Item = &[AtxyRecord]> + '_ {
        self.records.chunk_by(|a, b| a.ped_id == b.ped_id)
    }

    pub fn track(&self, ped_id: u32) -> &[AtxyRecord] {
        let start = self.records.partition_point(|r| r.ped_id < ped_id);
        let end = self.records.partition_point(|r| r.ped_id <= ped_id);
        &self.records[start..end]
    }

    pub fn get(&self, ped_id: u32, t: u32) -> Option<&AtxyRecord> {
        let track = self.track(ped_id);
        track.binary_search_by_key(&t, |r| r.t).ok().map(|i| &track[i])
    }

    pub fn ped_ids(&self) -> Vec<u32> {
        self.tracks().map(|t| t[0].ped_id).collect()
    }

    pub fn frame_range(&self) -> Option<(u32, u32)> {
        let lo = self.records.iter().map(|r| r.t).min()?;
        let hi = self.records.iter().map(|r| r.t).max()?;
        Some((lo, hi))
    }

    /// Keeps records for which `keep` holds; the result inherits dt and trap.
    pub fn filter<F: FnMut(&AtxyRecord) -> bool>(&self, mut keep: F) -> Self {
        let db = Self {
            records: self.records.iter().copied().filter(|r| keep(r)).collect(),
            dt_seconds: self.dt_seconds,
            trap: self.trap,
        };
        debug_assert!(db.frames_strictly_increasing());
        db
    }

    pub(crate) fn frames_strictly_increasing(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[0].ped_id != w[1].ped_id || w[0].t < w[1].t)
    }
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| AtxyError::Parse {
        line,
        message: format!("bad {what} {:?}: {e}", field.trim()),
    })
}

fn parse_trap(value: &str, line: usize) -> Result<TrapRect> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 4 {
        return Err(AtxyError::Parse {
            line,
            message: format!("trap needs four values, got {}", parts.len()),
        });
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| parse_f64(p, line, "trap bound"))
        .collect::<Result<_>>()?;
    TrapRect::new(v[0], v[1], v[2], v[3])
}

/// Reads the text format: `# dt=<s>` and optional `# trap=xmin,ymin,xmax,ymax`
/// header lines, then `ped_id,t,x,y` rows in any order.
pub fn read_atxy<R: Read>(source: R) -> Result<AtxyDatabase> {
    let reader = BufReader::new(source);
    let mut dt = None;
    let mut trap = None;
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(header) = text.strip_prefix('#') {
            let Some((key, value)) = header.split_once('=') else {
                continue;
            };
            match key.trim() {
                "dt" => dt = Some(parse_f64(value, line_no, "dt")?),
                "trap" => trap = Some(parse_trap(value, line_no)?),
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 4 {
            return Err(AtxyError::Parse {
                line: line_no,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let ped_id = fields[0].trim().parse::<u32>().map_err(|e| AtxyError::Parse {
            line: line_no,
            message: format!("bad ped_id {:?}: {e}", fields[0]),
        })?;
        if ped_id == 0 {
            return Err(AtxyError::Parse {
                line: line_no,
                message: "ped_id must be positive".into(),
            });
        }
        let t = fields[1].trim().parse::<u32>().map_err(|e| AtxyError::Parse {
            line: line_no,
            message: format!("bad frame {:?}: {e}", fields[1]),
        })?;
        let x = parse_f64(fields[2], line_no, "x")?;
        let y = parse_f64(fields[3], line_no, "y")?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(AtxyError::Parse {
                line: line_no,
                message: "non-finite coordinate".into(),
            });
        }
        records.push(AtxyRecord { ped_id, t, x, y });
    }
    let dt = dt.ok_or(AtxyError::Parse {
        line: 0,
        message: "missing `# dt=` header".into(),
    })?;
    AtxyDatabase::new(records, dt, trap)
}

/// Writes the text format. Floats use the shortest representation that
/// parses back to the identical value.
pub fn write_atxy<W: Write>(db: &AtxyDatabase, mut sink: W) -> Result<()> {
    let mut out = String::with_capacity(32 * db.len() + 64);
    writeln!(out, "# dt={:?}", db.dt_seconds).unwrap();
    if let Some(t) = db.trap {
        writeln!(out, "# trap={:?},{:?},{:?},{:?}", t.xmin, t.ymin, t.xmax, t.ymax).unwrap();
    }
    for r in &db.records {
        writeln!(out, "{},{},{:?},{:?}", r.ped_id, r.t, r.x, r.y).unwrap();
    }
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

/// Keeps records inside the closed world-space trap rectangle.
pub fn trim_to_trap_world(db: &AtxyDatabase, trap: &TrapRect) -> AtxyDatabase {
    db.filter(|r| trap.contains(r.x, r.y)).with_trap(Some(*trap))
}

/// Image-space quadrilateral `A', B', C', D'` bounding the trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageQuad {
    corners: [[f64; 2]; 4],
    orientation: f64,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl ImageQuad {
    /// Corners must be given in boundary order (either winding).
    pub fn new(corners: [[f64; 2]; 4]) -> Result<Self> {
        if corners.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AtxyError::Geometry("non-finite corner".into()));
        }
        let turns: Vec<f64> = (0..4)
            .map(|i| cross(corners[i], corners[(i + 1) % 4], corners[(i + 2) % 4]))
            .collect();
        let area2: f64 = (0..4)
            .map(|i| {
                let a = corners[i];
                let b = corners[(i + 1) % 4];
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        if area2.abs() <= f64::EPSILON {
            return Err(AtxyError::Geometry("quadrilateral has zero area".into()));
        }
        let orientation = area2.signum();
        if turns.iter().any(|&c| c * orientation <= 0.0) {
            return Err(AtxyError::Geometry("quadrilateral is not strictly convex".into()));
        }
        Ok(Self { corners, orientation })
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        self.corners
    }

    /// Inside or on the boundary: every edge sees the point on its inner side.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0..4).all(|i| cross(self.corners[i], self.corners[(i + 1) % 4], [x, y]) * self.orientation >= 0.0)
    }
}

/// Keeps records whose image-space point lies in the quadrilateral.
pub fn trim_to_trap_image(db: &AtxyDatabase, quad: &ImageQuad) -> AtxyDatabase {
    db.filter(|r| quad.contains(r.x, r.y))
}

/// Per-axis affine map `X = u + v*Xi + w*Yi`, `Y = x0 + y0*Xi + z0*Yi`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineModel {
    pub x_coeffs: [f64; 3],
    pub y_coeffs: [f64; 3],
    pub r2_x: f64,
    pub r2_y: f64,
    /// t-statistics in the order `u, v, w, x0, y0, z0`.
    pub t_stats: [f64; 6],
    /// Standard errors in the same order as `t_stats`.
    pub std_errors: [f64; 6],
}

impl AffineModel {
    pub fn identity() -> Self {
        Self {
            x_coeffs: [0.0, 1.0, 0.0],
            y_coeffs: [0.0, 0.0, 1.0],
            r2_x: 1.0,
            r2_y: 1.0,
            t_stats: [0.0; 6],
            std_errors: [0.0; 6],
        }
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        apply_affine(self, p)
    }
}

pub fn apply_affine(model: &AffineModel, p: [f64; 2]) -> [f64; 2] {
    let [u, v, w] = model.x_coeffs;
    let [x0, y0, z0] = model.y_coeffs;
    [u + v * p[0] + w * p[1], x0 + y0 * p[0] + z0 * p[1]]
}

struct AxisFit {
    coeffs: [f64; 3],
    r2: f64,
    std_errors: [f64; 3],
    t_stats: [f64; 3],
}

fn fit_axis(design: &DMatrix<f64>, xtx_inv: &DMatrix<f64>, response: &DVector<f64>) -> AxisFit {
    let beta = xtx_inv * (design.transpose() * response);
    let residuals = response - design * &beta;
    let sse = residuals.norm_squared();
    let n = response.len();
    let mean = response.mean();
    let sst: f64 = response.iter().map(|v| (v - mean).powi(2)).sum();
    let r2 = if sst > 0.0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else if sse <= f64::EPSILON {
        1.0
    } else {
        0.0
    };
    let dof = (n - 3) as f64;
    let s2 = if dof > 0.0 { sse / dof } else { f64::NAN };
    let mut std_errors = [0.0; 3];
    let mut t_stats = [0.0; 3];
    for i in 0..3 {
        let se = (s2 * xtx_inv[(i, i)]).max(0.0).sqrt();
        std_errors[i] = se;
        t_stats[i] = if se > 0.0 {
            beta[i] / se
        } else if beta[i] == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(beta[i])
        };
    }
    AxisFit {
        coeffs: [beta[0], beta[1], beta[2]],
        r2,
        std_errors,
        t_stats,
    }
}

/// Ordinary least squares per world axis from `(image, world)` pairs.
pub fn fit_affine(pairs: &[([f64; 2], [f64; 2])]) -> Result<AffineModel> {
    let n = pairs.len();
    if n < 4 {
        return Err(AtxyError::RankDeficient(format!(
            "need at least 4 point pairs, got {n}"
        )));
    }
    if pairs.iter().any(|(i, w)| i.iter().chain(w).any(|v| !v.is_finite())) {
        return Err(AtxyError::Geometry("non-finite calibration point".into()));
    }
    let design = DMatrix::from_fn(n, 3, |r, c| match c {
        0 => 1.0,
        1 => pairs[r].0[0],
        _ => pairs[r].0[1],
    });
    let svd = design.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin / smax < 1e-12 {
        return Err(AtxyError::RankDeficient(
            "image points are collinear or coincident".into(),
        ));
    }
    let xtx = design.transpose() * &design;
    let xtx_inv = xtx
        .try_inverse()
        .ok_or_else(|| AtxyError::RankDeficient("normal matrix is singular".into()))?;
    let wx = DVector::from_iterator(n, pairs.iter().map(|p| p.1[0]));
    let wy = DVector::from_iterator(n, pairs.iter().map(|p| p.1[1]));
    let fx = fit_axis(&design, &xtx_inv, &wx);
    let fy = fit_axis(&design, &xtx_inv, &wy);
    let mut t_stats = [0.0; 6];
    let mut std_errors = [0.0; 6];
    t_stats[..3].copy_from_slice(&fx.t_stats);
    t_stats[3..].copy_from_slice(&fy.t_stats);
    std_errors[..3].copy_from_slice(&fx.std_errors);
    std_errors[3..].copy_from_slice(&fy.std_errors);
    Ok(AffineModel {
        x_coeffs: fx.coeffs,
        y_coeffs: fy.coeffs,
        r2_x: fx.r2,
        r2_y: fy.r2,
        t_stats,
        std_errors,
    })
}

/// Maps every record through `model`, keeping dt and ids.
pub fn to_world(db: &AtxyDatabase, model: &AffineModel, trap: Option<TrapRect>) -> Result<AtxyDatabase> {
    let records = db
        .records()
        .iter()
        .map(|r| {
            let [x, y] = model.apply([r.x, r.y]);
            AtxyRecord { x, y, ..*r }
        })
        .collect();
    AtxyDatabase::new(records, db.dt_seconds(), trap)
}
