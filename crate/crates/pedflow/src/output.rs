//! CSV tables. Floats use Rust's shortest round-trip formatting so reruns
//! are byte-identical.

use std::io::Write;

use csv::Writer;
use pedflow_core::metrics::{FundamentalFit, InstantReport, SystemReport};
use pedflow_core::sim::StepDiagnostics;
use pedflow_core::tracker::TrackEvent;

use crate::calibrate::CalibrationReport;
use crate::lanes::LaneReport;
use crate::sweep::SweepResult;
use crate::HarnessError;

type Result<T> = std::result::Result<T, HarnessError>;

fn f(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_instant<W: Write>(rows: &[InstantReport], sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record(["t", "n", "v_tilde", "d_tilde", "u_tilde", "k"])?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.n.to_string(),
            f(r.v_tilde),
            f(r.d_tilde),
            f(r.u_tilde),
            f(r.k),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_system<W: Write>(s: &SystemReport, sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record([
        "v_bar_sys",
        "d_bar_sys",
        "u_bar_sys",
        "dissipation_time",
        "k_mean",
        "n_mean",
        "speed_mean",
        "speed_std",
        "accel_mean",
        "accel_std",
        "pedestrians",
        "busy_periods",
    ])?;
    w.write_record([
        f(s.v_bar_sys),
        f(s.d_bar_sys),
        f(s.u_bar_sys),
        f(s.dissipation_time),
        f(s.k_mean),
        f(s.n_mean),
        f(s.speed_stats.mean),
        f(s.speed_stats.std),
        f(s.accel_stats.mean),
        f(s.accel_stats.std),
        s.pedestrians.to_string(),
        s.busy_periods.len().to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// `model,c0,c1,r2,mf,kj,Q`; the last three are blank where undefined.
pub fn write_fits<W: Write>(fits: &[FundamentalFit], sink: W) -> Result<()> {
    write_labeled_fits(fits.iter().map(|f| ("", f)), false, sink)
}

/// As [`write_fits`] with a leading `series` column when `labeled`.
pub fn write_labeled_fits<'a, W: Write>(
    fits: impl IntoIterator<Item = (&'a str, &'a FundamentalFit)>,
    labeled: bool,
    sink: W,
) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    let mut header = vec!["model", "c0", "c1", "r2", "mf", "kj", "Q"];
    if labeled {
        header.insert(0, "series");
    }
    w.write_record(&header)?;
    for (label, fit) in fits {
        let mut row = vec![
            fit.model.name().to_string(),
            f(fit.coefficients[0]),
            f(fit.coefficients[1]),
            f(fit.r2),
            opt(fit.free_flow_speed),
            opt(fit.jam_density),
            opt(fit.capacity),
        ];
        if labeled {
            row.insert(0, label.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram<W: Write>(bins: &[(f64, f64, usize)], sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record(["bin_lo", "bin_hi", "count"])?;
    for &(lo, hi, c) in bins {
        w.write_record([f(lo), f(hi), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics<W: Write>(rows: &[StepDiagnostics], sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record([
        "t",
        "active",
        "overlap_count",
        "pushback_count",
        "max_accel",
        "max_speed_excess",
    ])?;
    for d in rows {
        w.write_record([
            d.t.to_string(),
            d.active.to_string(),
            d.overlap_count.to_string(),
            d.pushback_count.to_string(),
            f(d.max_accel),
            f(d.max_speed_excess),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per successful run, in sweep order.
pub fn write_sweep<W: Write>(r: &SweepResult, sink: W) -> Result<()> {
    write_sweep_rows(std::iter::once(("", r)), false, sink)
}

/// Several sweeps in one table, with a `series` column when `labeled`.
pub fn write_sweep_rows<'a, W: Write>(
    sweeps: impl IntoIterator<Item = (&'a str, &'a SweepResult)>,
    labeled: bool,
    sink: W,
) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    let mut header = vec![
        "variable",
        "value",
        "replication",
        "seed",
        "v_bar_sys",
        "u_bar_sys",
        "d_bar_sys",
        "dissipation",
        "k_mean",
        "n_mean",
        "speed_mean",
        "speed_std",
        "overlap_rate",
        "pushback_rate",
        "complete",
    ];
    if labeled {
        header.insert(0, "series");
    }
    w.write_record(&header)?;
    for (label, sweep) in sweeps {
        for r in &sweep.rows {
            let mut row = vec![
                sweep.variable.name().to_string(),
                f(r.value),
                r.replication.to_string(),
                r.seed.to_string(),
                f(r.v_bar_sys),
                f(r.u_bar_sys),
                f(r.d_bar_sys),
                f(r.dissipation_time),
                f(r.k_mean),
                f(r.n_mean),
                f(r.speed_mean),
                f(r.speed_std),
                f(r.overlap_rate),
                f(r.pushback_rate),
                r.complete.to_string(),
            ];
            if labeled {
                row.insert(0, label.to_string());
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_failures<W: Write>(r: &SweepResult, sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record(["value", "replication", "seed", "message"])?;
    for x in &r.failures {
        w.write_record([
            f(x.value),
            x.replication.to_string(),
            x.seed.to_string(),
            x.message.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Every grid point with its scores; `winner` and `frontier` flag columns.
pub fn write_calibration<W: Write>(r: &CalibrationReport, sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    let frontier = r.frontier();
    w.write_record([
        "point",
        "assignment",
        "speed_mean",
        "speed_std",
        "overlap_rate",
        "pushback_rate",
        "objective",
        "feasible",
        "frontier",
        "winner",
    ])?;
    for (i, p) in r.points.iter().enumerate() {
        let assignment: Vec<String> = p
            .assignment
            .iter()
            .map(|(v, x)| format!("{}={}", v.name(), x))
            .collect();
        w.write_record([
            i.to_string(),
            assignment.join(";"),
            f(p.speed.mean),
            f(p.speed.std),
            f(p.overlap_rate),
            f(p.pushback_rate),
            f(p.objective),
            p.feasible.to_string(),
            frontier.contains(&i).to_string(),
            (r.winner == Some(i)).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_events<W: Write>(events: &[TrackEvent], sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record(["event", "object_id", "first_frame", "last_frame"])?;
    for e in events {
        w.write_record([
            e.kind.label().to_string(),
            e.object_id.to_string(),
            e.first_frame.to_string(),
            e.last_frame.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_lanes<W: Write>(reports: &[LaneReport], sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record(["t", "group", "pedestrians", "lane_count", "mean_width"])?;
    for r in reports {
        for g in &r.groups {
            w.write_record([
                r.t.to_string(),
                g.group.label().to_string(),
                g.pedestrians.to_string(),
                g.lane_count.to_string(),
                f(g.mean_width),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Generic two-or-more column table of floats.
pub fn write_table<W: Write>(header: &[&str], rows: &[Vec<f64>], sink: W) -> Result<()> {
    let mut w = Writer::from_writer(sink);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| f(*v)))?;
    }
    w.flush()?;
    Ok(())
}
