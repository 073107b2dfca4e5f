//! Configuration, sweeps and CSV output behind the `coopjump` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{params_from_geometry, preset, Geometry, ParamConfig, SystemParams, PRESET_NAMES};
use crate::rates::{closed_form, double_jump_components, double_jump_rate, transition_rates, triple_jump_rate, RateSet};
use crate::trajectories::{
    bright_rate, count_jumps, default_window, level_trace, segment_periods, JumpCounts, Simulator,
};

/// Default number of grid points of a sweep.
pub const DEFAULT_STEPS: usize = 151;

/// Default refusal threshold on the estimated number of photon events.
pub const DEFAULT_EVENT_CAP: f64 = 1e8;

/// Environment variable overriding the worker count.
pub const THREADS_VAR: &str = "COOPJUMP_THREADS";

/// Command-line overrides; every field is optional.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub seeds: Option<u64>,
    pub duration: Option<f64>,
    pub t_m: Option<f64>,
    /// Single distance in units of λ3, replacing the sweep grid.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Rates,
    Closed,
    Baseline,
    Djtj,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
    log: Option<bool>,
    outputs: Option<Vec<Output>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segmentation {
    /// Photon counts in windows, as an experiment would see them.
    Photons,
    /// The simulator's hidden level.
    Hidden,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryFile {
    seeds: Option<u64>,
    seed_list: Option<Vec<u64>>,
    duration: Option<f64>,
    segmentation: Option<Segmentation>,
    window: Option<f64>,
    label_threshold: Option<f64>,
    event_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<String>,
    t_m: Option<f64>,
    params: Option<ParamConfig>,
    sweep: Option<SweepFile>,
    trajectories: Option<TrajectoryFile>,
}

/// Distance grid and requested columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub log: bool,
    pub base: SystemParams,
    pub theta: f64,
    pub t_m: f64,
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.start > 0.0) {
            return Err(Error::Config(format!("sweep start must be positive, got {}", self.start)));
        }
        if !(self.stop >= self.start) {
            return Err(Error::Config(format!("sweep stop {} is below start {}", self.stop, self.start)));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.t_m > 0.0) {
            return Err(Error::Config(format!("t_m must be positive, got {}", self.t_m)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                if self.log {
                    self.start * (self.stop / self.start).powf(f)
                } else {
                    self.start + f * (self.stop - self.start)
                }
            })
            .collect()
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub params: SystemParams,
    pub seeds: Vec<u64>,
    pub duration: f64,
    pub t_m: f64,
    pub segmentation: Segmentation,
    pub window: Option<f64>,
    pub label_threshold: f64,
    pub event_cap: f64,
}

/// Everything a subcommand needs, after merging preset, file and flags.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub sweep: SweepSpec,
    /// Parameters at the single point, if one was given.
    pub point: Option<SystemParams>,
    /// Its distance; None when C3 was given explicitly.
    pub point_r: Option<f64>,
    pub trajectories: TrajectorySpec,
}

/// Parse a TOML configuration, reporting line and key on failure.
fn parse_config(text: &str, path: &Path) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn lookup_preset(name: &str) -> Result<crate::model::Preset> {
    preset(name).ok_or_else(|| Error::Config(format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", "))))
}

pub fn resolve(opts: &Options) -> Result<Resolved> {
    let file = match &opts.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?, path)?,
        None => ConfigFile::default(),
    };
    let preset_name = opts.preset.clone().or(file.preset.clone());
    if preset_name.is_none() && file.params.is_none() {
        return Err(Error::Config("give --preset or a --config with a [params] table".into()));
    }
    let pr = preset_name.as_deref().map(lookup_preset).transpose()?;
    let mut base = pr.map_or_else(|| SystemParams::v(0.0, 0.0, 0.0), |p| p.params);
    let mut r = pr.map(|p| p.r);
    let mut theta = std::f64::consts::FRAC_PI_2;
    let mut explicit_c3 = false;
    if let Some(pc) = &file.params {
        let (p, geom) = pc.apply(base);
        base = p;
        if let Some(g) = geom {
            r = Some(g.r);
        }
        if let Some(t) = pc.theta {
            theta = t;
        }
        explicit_c3 = pc.c3.is_some();
    }
    let t_m = opts.t_m.or(file.t_m).or(pr.map(|p| p.t_m)).unwrap_or(1e-3);
    let sf = file.sweep.clone().unwrap_or_default();
    let (r0, r1) = pr.map_or((0.5, 2.0), |p| p.r_range);
    let sweep = SweepSpec {
        start: sf.start.unwrap_or(r0),
        stop: sf.stop.unwrap_or(r1),
        steps: sf.steps.unwrap_or(DEFAULT_STEPS),
        log: sf.log.unwrap_or(false),
        base: base.independent(),
        theta,
        t_m,
        outputs: sf.outputs.unwrap_or_else(|| vec![Output::Rates, Output::Closed, Output::Baseline, Output::Djtj]),
    };
    sweep.validate()?;
    if let Some(x) = opts.r {
        r = Some(x);
    }
    let point_r = if explicit_c3 && opts.r.is_none() { None } else { r };
    let point = if explicit_c3 && opts.r.is_none() {
        base.validate()?;
        Some(base)
    } else {
        r.map(|r| params_from_geometry(&base, &Geometry::equilateral(r).with_theta(theta))).transpose()?
    };
    let tf = file.trajectories.clone().unwrap_or_default();
    let seeds = match (opts.seeds, &tf.seed_list) {
        (Some(n), _) => (0..n).collect(),
        (None, Some(list)) => list.clone(),
        (None, None) => (0..tf.seeds.unwrap_or(32)).collect(),
    };
    let duration = opts.duration.or(tf.duration).unwrap_or(200.0);
    if !(duration >= 0.0) {
        return Err(Error::Config(format!("duration must be nonnegative, got {duration}")));
    }
    let trajectories = TrajectorySpec {
        params: point.unwrap_or(base),
        seeds,
        duration,
        t_m,
        segmentation: tf.segmentation.unwrap_or(Segmentation::Photons),
        window: tf.window,
        label_threshold: tf.label_threshold.unwrap_or(crate::trajectories::DEFAULT_LABEL_THRESHOLD),
        event_cap: tf.event_cap.unwrap_or(DEFAULT_EVENT_CAP),
    };
    Ok(Resolved { sweep, point, point_r, trajectories })
}

/// Scientific notation with 17 significant digits, enough to round-trip.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn pair_names(prefix: &str, levels: usize) -> Vec<String> {
    let mut v = Vec::new();
    for i in 0..levels {
        for j in 0..levels {
            if i != j {
                v.push(format!("{prefix}p{i}{j}"));
            }
        }
    }
    v
}

fn pair_values(rs: Option<&RateSet>, levels: usize) -> Vec<String> {
    let mut v = Vec::new();
    for i in 0..levels {
        for j in 0..levels {
            if i != j {
                v.push(fmt(rs.map_or(f64::NAN, |r| r.get(i, j))));
            }
        }
    }
    v
}

fn jump_rates(rs: &RateSet, t_m: f64) -> (f64, f64) {
    match (double_jump_rate(rs, t_m), triple_jump_rate(rs, t_m)) {
        (Ok(d), Ok(t)) => (d, t),
        (Err(e), _) | (_, Err(e)) => {
            log::warn!("jump rates undefined: {e}");
            (f64::NAN, f64::NAN)
        }
    }
}

/// One sweep row: header names and values.
pub struct Row {
    pub r: f64,
    pub values: Vec<String>,
}

fn sweep_row(spec: &SweepSpec, params: &SystemParams, r: f64) -> Result<Row> {
    let levels = params.n_atoms + 1;
    let rs = transition_rates(params)?;
    let mut values = vec![fmt(r), fmt(params.c[2].re), fmt(params.c[2].im)];
    let base = if spec.wants(Output::Baseline) { Some(transition_rates(&params.independent())?) } else { None };
    if spec.wants(Output::Rates) {
        values.extend(pair_values(Some(&rs), levels));
    }
    if spec.wants(Output::Closed) {
        let cf = closed_form(params).ok();
        values.extend(pair_values(cf.as_ref(), levels));
    }
    if let Some(b) = &base {
        values.extend(pair_values(Some(b), levels));
    }
    if spec.wants(Output::Djtj) {
        let (d, t) = jump_rates(&rs, spec.t_m);
        values.push(fmt(d));
        values.push(fmt(t));
        if let Some(b) = &base {
            let (d0, t0) = jump_rates(b, spec.t_m);
            values.push(fmt(d0));
            values.push(fmt(t0));
        }
    }
    Ok(Row { r, values })
}

fn sweep_header(spec: &SweepSpec, levels: usize) -> Vec<String> {
    let mut h = vec!["r".to_string(), "re_c3".into(), "im_c3".into()];
    if spec.wants(Output::Rates) {
        h.extend(pair_names("", levels));
    }
    if spec.wants(Output::Closed) {
        h.extend(pair_names("closed_", levels));
    }
    if spec.wants(Output::Baseline) {
        h.extend(pair_names("indep_", levels));
    }
    if spec.wants(Output::Djtj) {
        h.push("n_dj".into());
        h.push("n_tj".into());
        if spec.wants(Output::Baseline) {
            h.push("indep_n_dj".into());
            h.push("indep_n_tj".into());
        }
    }
    h
}

fn grid_points(spec: &SweepSpec) -> Result<Vec<(f64, SystemParams)>> {
    spec.grid()
        .into_iter()
        .map(|r| Ok((r, params_from_geometry(&spec.base, &Geometry::equilateral(r).with_theta(spec.theta))?)))
        .collect()
}

/// Evaluate a table in parallel; rows keep the input order.
fn table(spec: &SweepSpec, points: &[(f64, SystemParams)], out: &mut dyn Write) -> Result<()> {
    let rows: Vec<Row> = points.par_iter().map(|(r, p)| sweep_row(spec, p, *r)).collect::<Result<_>>()?;
    let levels = spec.base.n_atoms + 1;
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(sweep_header(spec, levels))?;
    for row in rows {
        wr.write_record(&row.values)?;
    }
    wr.flush()?;
    Ok(())
}

/// `rates`: every column, at the single point when `single` is set and a
/// point is known, else over the sweep grid.
pub fn run_rates(res: &Resolved, single: bool, out: &mut dyn Write) -> Result<()> {
    let spec = SweepSpec {
        outputs: vec![Output::Rates, Output::Closed, Output::Baseline, Output::Djtj],
        ..res.sweep.clone()
    };
    let points = match (single, res.point) {
        (true, Some(p)) => vec![(res.point_r.unwrap_or(f64::NAN), p)],
        _ => grid_points(&spec)?,
    };
    table(&spec, &points, out)
}

/// `sweep`: the requested columns over the grid.
pub fn run_sweep(res: &Resolved, out: &mut dyn Write) -> Result<()> {
    let points = grid_points(&res.sweep)?;
    table(&res.sweep, &points, out)
}

/// `djtj`: double and triple jump rates, their independent baselines and
/// the un-expanded double jump sum.
pub fn run_djtj(res: &Resolved, out: &mut dyn Write) -> Result<()> {
    let spec = &res.sweep;
    let points = grid_points(spec)?;
    let t_m = spec.t_m;
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|(r, p)| {
            let rs = transition_rates(p)?;
            let b = transition_rates(&p.independent())?;
            let (d, t) = jump_rates(&rs, t_m);
            let (d0, t0) = jump_rates(&b, t_m);
            let full = double_jump_components(&rs, t_m).map_or(f64::NAN, |c| c.total());
            Ok(vec![r, &d, &t, &d0, &t0, &(d / d0), &(t / t0), &full].into_iter().map(|x| fmt(*x)).collect())
        })
        .collect::<Result<_>>()?;
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["r", "n_dj", "n_tj", "indep_n_dj", "indep_n_tj", "dj_ratio", "tj_ratio", "n_dj_unexpanded"])?;
    for row in rows {
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Rough number of photon events, for the desk-scale guard.
pub fn estimated_events(spec: &TrajectorySpec) -> f64 {
    let p = &spec.params;
    let per_second = 2.0 * p.n_atoms as f64 * bright_rate(p) + p.n_atoms as f64 * (p.a[0] + p.a[1]);
    spec.seeds.len() as f64 * spec.duration * per_second
}

/// Counts of one trajectory.
#[derive(Debug, Clone)]
pub struct SeedResult {
    pub seed: u64,
    pub events: usize,
    pub counts: JumpCounts,
    pub absorbed_islands: usize,
}

#[derive(Debug, Clone)]
pub struct TrajectoryReport {
    pub per_seed: Vec<SeedResult>,
    pub pooled: JumpCounts,
    pub predicted: RateSet,
    pub predicted_double: f64,
    pub predicted_triple: f64,
}

/// One line of the pooled comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledLine {
    pub quantity: String,
    pub count: u64,
    pub empirical: f64,
    pub sigma: f64,
    pub predicted: f64,
    pub z: f64,
}

impl TrajectoryReport {
    pub fn lines(&self) -> Vec<PooledLine> {
        let mut out: Vec<PooledLine> = self
            .pooled
            .compare(&self.predicted)
            .into_iter()
            .map(|c| PooledLine {
                quantity: format!("p{}{}", c.i, c.j),
                count: c.count,
                empirical: c.empirical.value,
                sigma: c.empirical.sigma,
                predicted: c.predicted,
                z: c.z,
            })
            .collect();
        let t = self.pooled.total_time;
        for (name, est, count, pred) in [
            ("n_dj", self.pooled.double_jump_rate(), self.pooled.double_jumps, self.predicted_double),
            ("n_tj", self.pooled.triple_jump_rate(), self.pooled.triple_jumps, self.predicted_triple),
        ] {
            out.push(PooledLine {
                quantity: name.into(),
                count,
                empirical: est.value,
                sigma: est.sigma,
                predicted: pred,
                z: est.z(pred, t),
            });
        }
        out
    }
}

/// Simulate every seed, segment, count and pool.
pub fn trajectories(spec: &TrajectorySpec) -> Result<TrajectoryReport> {
    let est = estimated_events(spec);
    if est > spec.event_cap {
        return Err(Error::Config(format!(
            "estimated {est:.3e} photon events exceed the cap {:.3e}; reduce seeds or duration",
            spec.event_cap
        )));
    }
    let p = &spec.params;
    let levels = p.n_atoms + 1;
    let predicted = transition_rates(p)?;
    let (predicted_double, predicted_triple) = jump_rates(&predicted, spec.t_m);
    let mut sim = Simulator::new(p)?;
    sim.label_threshold = spec.label_threshold;
    let bright = bright_rate(p);
    let window = spec.window.unwrap_or_else(|| default_window(bright));
    let per_seed: Vec<SeedResult> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            let rec = sim.simulate(seed, spec.duration)?;
            let trace = match spec.segmentation {
                Segmentation::Photons => segment_periods(&rec, window, bright, p.n_atoms)?,
                Segmentation::Hidden => level_trace(&rec),
            };
            Ok(SeedResult {
                seed,
                events: rec.events.len(),
                counts: count_jumps(&trace, levels, spec.t_m),
                absorbed_islands: trace.absorbed_islands,
            })
        })
        .collect::<Result<_>>()?;
    let pooled = JumpCounts::pooled(levels, spec.t_m, per_seed.iter().map(|s| &s.counts));
    Ok(TrajectoryReport { per_seed, pooled, predicted, predicted_double, predicted_triple })
}

pub fn write_per_seed(report: &TrajectoryReport, out: &mut dyn Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    let levels = report.pooled.levels();
    let mut header = vec!["seed".to_string(), "events".into()];
    let pairs: Vec<(usize, usize)> = report.predicted.neighbours().into_iter().map(|(ij, _)| ij).collect();
    header.extend(pairs.iter().map(|(i, j)| format!("k{i}{j}")));
    header.extend((0..levels).map(|i| format!("time{i}")));
    header.extend(["double".into(), "triple".into(), "unresolved".into(), "absorbed_islands".into()]);
    wr.write_record(&header)?;
    for s in &report.per_seed {
        let c = &s.counts;
        let mut row = vec![s.seed.to_string(), s.events.to_string()];
        row.extend(pairs.iter().map(|&(i, j)| c.k[[i, j]].to_string()));
        row.extend(c.time_at_level.iter().map(|t| fmt(*t)));
        row.extend([
            c.double_jumps.to_string(),
            c.triple_jumps.to_string(),
            c.unresolved.sum().to_string(),
            s.absorbed_islands.to_string(),
        ]);
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_pooled(report: &TrajectoryReport, out: &mut dyn Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["quantity", "count", "empirical", "sigma", "predicted", "z"])?;
    for l in report.lines() {
        wr.write_record([
            l.quantity.clone(),
            l.count.to_string(),
            fmt(l.empirical),
            fmt(l.sigma),
            fmt(l.predicted),
            fmt(l.z),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Path of the pooled table next to the per-seed output.
pub fn pooled_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.pooled.csv"))
}

/// Worker count from the environment, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("{THREADS_VAR} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}
