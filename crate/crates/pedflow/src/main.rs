use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use pedflow::calibrate::{calibrate, CalibrationGrid, CalibrationTarget};
use pedflow::experiments::{self, ExperimentName};
use pedflow::lanes::{infer_groups, lane_formation_report};
use pedflow::output::*;
use pedflow::plot::{emit_plot, Labels, PlotKind, Series};
use pedflow::sweep::{run_sweep, SweepSpec, SweepVariable};
use pedflow::{evaluate, HarnessError};
use pedflow_core::atxy::{read_atxy, write_atxy, AtxyDatabase, TrapRect};
use pedflow_core::config::{parse_reals, ConfigError, ConfigFile};
use pedflow_core::metrics::{analyze, histogram, FitModel, SampleSummary};
use pedflow_core::sim::SimParams;
use pedflow_core::tracker::{read_descriptors, recognize, trace, write_descriptors, TrackerParams};

#[derive(Parser)]
#[command(
    name = "pedflow",
    version,
    about = "Pedestrian flow simulator, analytics and tracker"
)]
struct Cli {
    /// Scenario file (tracker file for `track`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    decimate: Option<u32>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trajectories and reports.
    Simulate,
    /// Sweep one parameter over values and replications.
    Sweep {
        #[arg(long)]
        variable: SweepVariable,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        replications: u32,
    },
    /// Grid search for parameters matching a speed distribution.
    Calibrate {
        /// `variable=v1,v2,...`; repeat for more axes.
        #[arg(long = "grid", required = true)]
        grid: Vec<String>,
        #[arg(long, default_value_t = 1)]
        replications: u32,
        #[arg(long, default_value_t = 1.38)]
        target_mean: f64,
        #[arg(long, default_value_t = 0.37)]
        target_std: f64,
        #[arg(long, default_value_t = 0.02)]
        max_overlap: f64,
        #[arg(long, default_value_t = 0.02)]
        max_pushback: f64,
        /// Reference sample as `mean,variance,count`.
        #[arg(long)]
        reference: Option<String>,
    },
    /// Run one of the policy studies.
    Experiment {
        name: ExperimentName,
        #[arg(long)]
        replications: Option<u32>,
        /// Densities (n) or elderly fractions, depending on the study.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Turn a descriptor table into pedestrian trajectories.
    Track {
        descriptors: PathBuf,
        /// Seconds between slices.
        #[arg(long, default_value_t = 1.0 / 15.0)]
        dt: f64,
        /// `xmin,ymin,xmax,ymax` recorded in the output header.
        #[arg(long)]
        trap: Option<String>,
    },
    /// Flow performances of an aTXY file.
    Metrics {
        atxy: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        bin_width: f64,
    },
    /// Lane counts per walking direction.
    Lanes {
        atxy: PathBuf,
        /// Sample every n-th frame.
        #[arg(long, default_value_t = 15)]
        every: u32,
        #[arg(long, default_value_t = 0.60)]
        body_diameter: f64,
    },
    /// Render a CSV table as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        x: String,
        /// Required except for histograms.
        #[arg(long)]
        y: Option<String>,
        #[arg(long, default_value = "scatter")]
        kind: String,
        /// Fit models to overlay on a scatter.
        #[arg(long, value_delimiter = ',')]
        fit: Vec<FitModel>,
        #[arg(long, default_value_t = 0.1)]
        bin_width: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Marks the "no feasible calibration point" outcome.
#[derive(Debug)]
struct EmptyFeasibleSet;

impl std::fmt::Display for EmptyFeasibleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("no grid point satisfies the overlap and push-back caps")
    }
}

impl std::error::Error for EmptyFeasibleSet {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<EmptyFeasibleSet>().is_some() {
            return 4;
        }
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(h) = cause.downcast_ref::<HarnessError>() {
            return if h.is_config() { 2 } else { 3 };
        }
        if let Some(pedflow_core::sim::SimError::InvalidParams(_)) = cause.downcast_ref() {
            return 2;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn out(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.cli.out.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    fn base_params(&self) -> Result<SimParams> {
        let mut p = SimParams::default();
        if let Some(path) = &self.cli.config {
            let text = read_text(path)?;
            let cfg = ConfigFile::parse(&text).map_err(|e| config_err(path, e))?;
            p.apply_config(&cfg).map_err(|e| config_err(path, e))?;
        }
        if let Some(s) = self.cli.seed {
            p.seed = s;
        }
        if let Some(d) = self.cli.decimate {
            p.decimate = d;
        }
        p.validate().map_err(HarnessError::from)?;
        Ok(p)
    }
}

fn config_err(path: &Path, e: ConfigError) -> anyhow::Error {
    anyhow::Error::new(e).context(format!("in {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| anyhow::Error::new(HarnessError::Invalid(format!("cannot read {}: {e}", path.display()))))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path)
        .map_err(|e| anyhow::Error::new(HarnessError::Invalid(format!("cannot open {}: {e}", path.display()))))?;
    Ok(BufReader::new(f))
}

fn run(cli: &Cli) -> Result<()> {
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Simulate => simulate(&ctx),
        Command::Sweep {
            variable,
            values,
            replications,
        } => sweep(&ctx, *variable, values, *replications),
        Command::Calibrate {
            grid,
            replications,
            target_mean,
            target_std,
            max_overlap,
            max_pushback,
            reference,
        } => {
            let target = CalibrationTarget {
                target_speed_mean: *target_mean,
                target_speed_std: *target_std,
                max_overlap_rate: *max_overlap,
                max_pushback_rate: *max_pushback,
            };
            calibrate_cmd(&ctx, grid, *replications, target, reference.as_deref())
        }
        Command::Experiment {
            name,
            replications,
            values,
        } => experiment(&ctx, *name, *replications, values.as_deref()),
        Command::Track { descriptors, dt, trap } => track(&ctx, descriptors, *dt, trap.as_deref()),
        Command::Metrics { atxy, bin_width } => metrics(&ctx, atxy, *bin_width),
        Command::Lanes {
            atxy,
            every,
            body_diameter,
        } => lanes(&ctx, atxy, *every, *body_diameter),
        Command::Plot {
            csv,
            x,
            y,
            kind,
            fit,
            bin_width,
            output,
        } => plot(&ctx, csv, x, y.as_deref(), kind, fit, *bin_width, output.as_deref()),
    }
}

fn simulate(ctx: &Ctx) -> Result<()> {
    let params = ctx.base_params()?;
    ctx.note(format!(
        "simulating {} pedestrians, seed {}",
        params.n_pedestrians, params.seed
    ));
    let e = evaluate(&params)?;
    write_atxy(&e.output.trap, ctx.out("trap.atxy")?)?;
    write_atxy(&e.output.full, ctx.out("full.atxy")?)?;
    write_diagnostics(&e.output.diagnostics, ctx.out("diagnostics.csv")?)?;
    write_system(&e.analysis.system, ctx.out("system.csv")?)?;
    write_instant(&e.analysis.instants, ctx.out("instant.csv")?)?;
    if !e.output.complete {
        ctx.note("t_max reached with pedestrians still walking");
    }
    ctx.note(format!(
        "v_bar_sys {:.3} m/s, overlap {:.4}, push-back {:.4}",
        e.analysis.system.v_bar_sys, e.overlap_rate, e.pushback_rate
    ));
    Ok(())
}

fn sweep(ctx: &Ctx, variable: SweepVariable, values: &[f64], replications: u32) -> Result<()> {
    let spec = SweepSpec::new(variable, values.to_vec(), replications, ctx.base_params()?);
    ctx.note(format!(
        "sweeping {variable} over {} values x {replications}",
        values.len()
    ));
    let r = run_sweep(&spec)?;
    write_sweep(&r, ctx.out("sweep.csv")?)?;
    write_failures(&r, ctx.out("failures.csv")?)?;
    if !r.fits.is_empty() {
        write_fits(&r.fits, ctx.out("fit.csv")?)?;
        let pts = r.replicate_means().iter().map(|m| (m.1, m.2)).collect();
        emit_plot(
            &[Series::new("replicate means", pts)],
            &PlotKind::ScatterFit(r.fits.clone()),
            &Labels {
                title: "speed-density".into(),
                x: "k (ped/m2)".into(),
                y: "u (m/s)".into(),
            },
            &ctx.cli.out.join("uk.svg"),
        )?;
    }
    for f in &r.failures {
        ctx.note(format!(
            "run {}={} rep {} failed: {}",
            variable, f.value, f.replication, f.message
        ));
    }
    Ok(())
}

fn parse_axis(spec: &str) -> Result<(SweepVariable, Vec<f64>)> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| HarnessError::Invalid(format!("grid axis `{spec}` is not `variable=v1,v2`")))?;
    let var: SweepVariable = name.trim().parse().map_err(HarnessError::Invalid)?;
    let vals = parse_reals(name.trim(), values)?;
    Ok((var, vals))
}

fn calibrate_cmd(
    ctx: &Ctx,
    grid: &[String],
    replications: u32,
    target: CalibrationTarget,
    reference: Option<&str>,
) -> Result<()> {
    let axes = grid.iter().map(|g| parse_axis(g)).collect::<Result<Vec<_>>>()?;
    let reference = match reference {
        Some(r) => {
            let v = parse_reals("reference", r)?;
            if v.len() != 3 || v[2] < 2.0 || v[2].fract() != 0.0 {
                return Err(HarnessError::Invalid("reference must be mean,variance,count".into()).into());
            }
            Some(SampleSummary::new(v[0], v[1], v[2] as usize))
        }
        None => None,
    };
    let grid = CalibrationGrid {
        axes,
        base: ctx.base_params()?,
        replications,
    };
    let report = calibrate(&grid, &target, reference.as_ref())?;
    write_calibration(&report, ctx.out("calibration.csv")?)?;
    match report.winner_point() {
        Some(w) => {
            std::fs::write(ctx.cli.out.join("best.cfg"), w.params.to_config_string())?;
            ctx.note(format!(
                "winner: speed {:.3}/{:.3}, overlap {:.4}, push-back {:.4}",
                w.speed.mean, w.speed.std, w.overlap_rate, w.pushback_rate
            ));
            if let Some(t) = report.welch {
                ctx.note(format!(
                    "t = {:.3}, df = {:.1}, two-tail p = {:.3}",
                    t.t, t.df, t.p_two_tail
                ));
            }
            Ok(())
        }
        None => {
            for i in report.nearest_to_feasible(3) {
                let p = &report.points[i];
                ctx.note(format!(
                    "nearest: point {i} overlap {:.4} push-back {:.4} objective {:.4}",
                    p.overlap_rate, p.pushback_rate, p.objective
                ));
            }
            Err(EmptyFeasibleSet.into())
        }
    }
}

fn experiment(ctx: &Ctx, name: ExperimentName, replications: Option<u32>, values: Option<&[f64]>) -> Result<()> {
    let base = ctx.base_params()?;
    let densities = |default: &[usize]| -> Result<Vec<usize>> {
        match values {
            None => Ok(default.to_vec()),
            Some(v) => v
                .iter()
                .map(|&x| {
                    if x >= 1.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(HarnessError::Invalid(format!("density {x} is not a pedestrian count")).into())
                    }
                })
                .collect(),
        }
    };
    ctx.note(format!("running {name}"));
    match name {
        ExperimentName::OnewayTwoway => {
            let r = experiments::oneway_twoway(
                &base,
                &densities(&experiments::DEFAULT_DENSITIES)?,
                replications.unwrap_or(3),
            )?;
            write_sweep_rows(
                [("one_way", &r.one_way), ("two_way", &r.two_way)],
                true,
                ctx.out("sweep.csv")?,
            )?;
            let fits: Vec<(&str, _)> = r
                .one_way
                .fits
                .iter()
                .map(|f| ("one_way", f))
                .chain(r.two_way.fits.iter().map(|f| ("two_way", f)))
                .collect();
            write_labeled_fits(fits, true, ctx.out("fit.csv")?)?;
            let d1 = r.dissipation_curve(1);
            let d2 = r.dissipation_curve(2);
            let rows: Vec<Vec<f64>> = d1.iter().zip(&d2).map(|(a, b)| vec![a.0, a.1, b.1]).collect();
            write_table(&["n", "one_way", "two_way"], &rows, ctx.out("dissipation.csv")?)?;
            let mut fit_rows = Vec::new();
            for (i, ways) in [1.0, 2.0].into_iter().enumerate() {
                let lin = r.dissipation_linear[i].as_ref();
                let pow = r.dissipation_power[i];
                fit_rows.push(vec![
                    ways,
                    lin.map_or(f64::NAN, |f| f.coefficients[0]),
                    lin.map_or(f64::NAN, |f| -f.coefficients[1]),
                    lin.map_or(f64::NAN, |f| f.r2),
                    pow.map_or(f64::NAN, |p| p.0),
                    pow.map_or(f64::NAN, |p| p.1),
                    pow.map_or(f64::NAN, |p| p.2),
                ]);
            }
            write_table(
                &[
                    "ways",
                    "linear_intercept",
                    "linear_slope",
                    "linear_r2",
                    "power_c",
                    "power_p",
                    "power_r2",
                ],
                &fit_rows,
                ctx.out("dissipation_fit.csv")?,
            )?;
            let ordering: Vec<Vec<f64>> = r
                .ordered_per_replication
                .iter()
                .map(|&(n, rep, ok)| vec![n, rep as f64, ok as u8 as f64])
                .collect();
            write_table(
                &["n", "replication", "two_way_not_faster"],
                &ordering,
                ctx.out("ordering.csv")?,
            )?;
            let series = |s: &pedflow::sweep::SweepResult, label: &str| {
                Series::new(label, s.replicate_means().iter().map(|m| (m.1, m.2)).collect())
            };
            emit_plot(
                &[series(&r.one_way, "one way"), series(&r.two_way, "two way")],
                &PlotKind::ScatterFit(r.one_way.fits.iter().chain(&r.two_way.fits).cloned().collect()),
                &Labels {
                    title: "one-way vs two-way".into(),
                    x: "k (ped/m2)".into(),
                    y: "u (m/s)".into(),
                },
                &ctx.cli.out.join("uk.svg"),
            )?;
            emit_plot(
                &[Series::new("one way", d1), Series::new("two way", d2)],
                &PlotKind::Profile,
                &Labels {
                    title: "dissipation time".into(),
                    x: "pedestrians".into(),
                    y: "s".into(),
                },
                &ctx.cli.out.join("dissipation.svg"),
            )?;
            let violations = r.ordered.iter().filter(|o| !o.1).count();
            ctx.note(format!("densities where two-way is faster on average: {violations}"));
        }
        ExperimentName::Elderly => {
            let fractions = values
                .map(|v| v.to_vec())
                .unwrap_or(experiments::DEFAULT_FRACTIONS.to_vec());
            let r = experiments::elderly(&experiments::elderly_base(&base), &fractions, replications.unwrap_or(3))?;
            write_sweep(&r.sweep, ctx.out("sweep.csv")?)?;
            let rows: Vec<Vec<f64>> = r.points.iter().map(|p| vec![p.0, p.1]).collect();
            write_table(&["elderly_fraction", "v_bar_sys"], &rows, ctx.out("points.csv")?)?;
            let fits: Vec<(&str, _)> = r
                .linear
                .iter()
                .map(|f| ("fraction", f))
                .chain(r.logarithmic.iter().map(|f| ("one_plus_percent", f)))
                .collect();
            write_labeled_fits(fits, true, ctx.out("fit.csv")?)?;
            emit_plot(
                &[Series::new("replicate means", r.points.clone())],
                &PlotKind::Profile,
                &Labels {
                    title: "elderly share".into(),
                    x: "fraction".into(),
                    y: "u (m/s)".into(),
                },
                &ctx.cli.out.join("elderly.svg"),
            )?;
            if let (Some(l), Some(g)) = (&r.linear, &r.logarithmic) {
                ctx.note(format!("linear r2 {:.3}, log r2 {:.3}", l.r2, g.r2));
            }
        }
        ExperimentName::CrossingPolicy => {
            let r = experiments::crossing_policy(
                &base,
                &densities(&experiments::CROSSING_DENSITIES)?,
                replications.unwrap_or(5),
            )?;
            write_sweep_rows(
                [("mixed", &r.mixed), ("segregated", &r.segregated)],
                true,
                ctx.out("sweep.csv")?,
            )?;
            let mut rows = Vec::new();
            for (label, s) in [(0.0, &r.mixed), (1.0, &r.segregated)] {
                let v = s.replicate_means();
                let d = s.replicate_means_of(|x| x.d_bar_sys);
                let u = s.replicate_means_of(|x| x.u_bar_sys);
                let t = s.replicate_means_of(|x| x.dissipation_time);
                for i in 0..v.len() {
                    rows.push(vec![label, v[i].0, v[i].1, v[i].2, d[i].2, u[i].2, t[i].2]);
                }
            }
            write_table(
                &[
                    "segregated",
                    "n",
                    "k_mean",
                    "speed",
                    "delay",
                    "uncomfortability",
                    "dissipation",
                ],
                &rows,
                ctx.out("summary.csv")?,
            )?;
            let w = r.wins;
            write_table(
                &[
                    "n",
                    "speed_ratio",
                    "replications",
                    "delay_wins",
                    "uncomfortability_wins",
                    "dissipation_wins",
                ],
                &[vec![
                    r.highest_density,
                    r.speed_ratio,
                    w.replications as f64,
                    w.delay as f64,
                    w.uncomfortability as f64,
                    w.dissipation as f64,
                ]],
                ctx.out("comparison.csv")?,
            )?;
            let series = |s: &pedflow::sweep::SweepResult, label: &str| {
                Series::new(label, s.replicate_means().iter().map(|m| (m.0, m.2)).collect())
            };
            emit_plot(
                &[series(&r.mixed, "mixed"), series(&r.segregated, "segregated")],
                &PlotKind::Profile,
                &Labels {
                    title: "crossing policy".into(),
                    x: "pedestrians".into(),
                    y: "u (m/s)".into(),
                },
                &ctx.cli.out.join("crossing.svg"),
            )?;
            ctx.note(format!("segregated/mixed speed ratio {:.3}", r.speed_ratio));
        }
    }
    Ok(())
}

fn track(ctx: &Ctx, descriptors: &Path, dt: f64, trap: Option<&str>) -> Result<()> {
    let mut params = TrackerParams::default();
    if let Some(path) = &ctx.cli.config {
        let cfg = ConfigFile::parse(&read_text(path)?).map_err(|e| config_err(path, e))?;
        params.apply_config(&cfg).map_err(|e| config_err(path, e))?;
    }
    let trap = match trap {
        Some(t) => {
            let v = parse_reals("trap", t)?;
            if v.len() != 4 {
                return Err(HarnessError::Invalid("trap must be xmin,ymin,xmax,ymax".into()).into());
            }
            Some(TrapRect::new(v[0], v[1], v[2], v[3])?)
        }
        None => None,
    };
    let table = read_descriptors(open(descriptors)?)?;
    let traced = trace(&table, &params)?;
    let rec = recognize(&traced.table, &params, dt, trap)?;
    write_descriptors(&traced.table, ctx.out("traced.csv")?)?;
    write_events(&traced.events, ctx.out("events.csv")?)?;
    write_atxy(&rec.db, ctx.out("tracks.atxy")?)?;
    ctx.note(format!(
        "{} rows, {} tracks kept",
        traced.table.rows.len(),
        rec.id_map.len()
    ));
    Ok(())
}

fn load_atxy(path: &Path) -> Result<AtxyDatabase> {
    Ok(read_atxy(open(path)?)?)
}

fn metrics(ctx: &Ctx, path: &Path, bin_width: f64) -> Result<()> {
    let db = load_atxy(path)?;
    let a = analyze(&db, &Default::default())?;
    write_instant(&a.instants, ctx.out("instant.csv")?)?;
    write_system(&a.system, ctx.out("system.csv")?)?;
    write_histogram(&histogram(&a.speeds, bin_width), ctx.out("hist_speed.csv")?)?;
    if !a.system.missing_vmax.is_empty() {
        ctx.note("no maximum speeds in an aTXY file; delay is reported as 0");
    }
    Ok(())
}

fn lanes(ctx: &Ctx, path: &Path, every: u32, body_diameter: f64) -> Result<()> {
    let db = load_atxy(path)?;
    let reports = lane_formation_report(&db, &infer_groups(&db), body_diameter, every);
    write_lanes(&reports, ctx.out("lanes.csv")?)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn plot(
    ctx: &Ctx,
    path: &Path,
    x: &str,
    y: Option<&str>,
    kind: &str,
    fits: &[FitModel],
    bin_width: f64,
    output: Option<&Path>,
) -> Result<()> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::Invalid(format!("no column `{name}` in {}", path.display())))
    };
    let xi = col(x)?;
    let yi = match (kind, y) {
        ("histogram", _) => None,
        (_, Some(y)) => Some(col(y)?),
        (_, None) => bail!(HarnessError::Invalid("--y is required for this plot kind".into())),
    };
    let mut pts = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let xv: f64 = rec[xi]
            .parse()
            .map_err(|_| HarnessError::Invalid(format!("bad number {:?}", &rec[xi])))?;
        let yv: f64 = match yi {
            Some(i) => rec[i]
                .parse()
                .map_err(|_| HarnessError::Invalid(format!("bad number {:?}", &rec[i])))?,
            None => 0.0,
        };
        pts.push((xv, yv));
    }
    let plot_kind = match kind {
        "scatter" => PlotKind::ScatterFit(
            fits.iter()
                .filter_map(|m| pedflow_core::metrics::fit_fundamental(&pts, *m).ok())
                .collect(),
        ),
        "profile" => PlotKind::Profile,
        "histogram" => PlotKind::Histogram { bin_width },
        other => bail!(HarnessError::Invalid(format!(
            "unknown plot kind `{other}` (scatter, profile or histogram)"
        ))),
    };
    let target = match output {
        Some(p) => p.to_path_buf(),
        None => ctx.cli.out.join(format!(
            "{}.svg",
            path.file_stem().and_then(|s| s.to_str()).unwrap_or("plot")
        )),
    };
    let labels = Labels {
        title: path.file_name().and_then(|s| s.to_str()).unwrap_or("").to_string(),
        x: x.to_string(),
        y: y.unwrap_or("count").to_string(),
    };
    if !emit_plot(&[Series::new(y.unwrap_or(x), pts)], &plot_kind, &labels, &target)? {
        ctx.note("empty series, nothing plotted");
    }
    Ok(())
}
