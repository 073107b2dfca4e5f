use crate::error::{Error, Result};

use super::simulate::{EmissionRecord, LevelChange};

/// Minimum expected counts per window and intensity step.
pub const MIN_COUNTS_PER_WINDOW: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Period {
    pub start: f64,
    pub end: f64,
    pub level: usize,
}

impl Period {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Contiguous intensity periods with adjacent levels distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodTrace {
    pub periods: Vec<Period>,
    /// Window width, or None for a trace read off the hidden state.
    pub window: Option<f64>,
    /// Count thresholds separating the levels.
    pub thresholds: Vec<f64>,
    pub absorbed_islands: usize,
    /// Remaining multi-window runs no longer than two windows between
    /// neighbours of equal level, likely misclassifications.
    pub suspect_runs: usize,
}

impl PeriodTrace {
    pub fn duration(&self) -> f64 {
        match (self.periods.first(), self.periods.last()) {
            (Some(a), Some(b)) => b.end - a.start,
            _ => 0.0,
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["start", "end", "level"])?;
        for p in &self.periods {
            wr.write_record([format!("{:.16e}", p.start), format!("{:.16e}", p.end), p.level.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Level of each window of width `w`, by the period holding its midpoint.
    pub fn window_levels(&self, w: f64) -> Vec<usize> {
        let n = window_count(self.duration(), w);
        let t0 = self.periods.first().map_or(0.0, |p| p.start);
        let mut k = 0;
        (0..n)
            .map(|i| {
                let mid = t0 + (i as f64 + 0.5) * w;
                while k + 1 < self.periods.len() && self.periods[k].end <= mid {
                    k += 1;
                }
                self.periods[k].level
            })
            .collect()
    }
}

fn window_count(duration: f64, w: f64) -> usize {
    ((duration / w).ceil() as usize).max(1)
}

/// Default window width giving 20 expected counts per intensity step.
pub fn default_window(bright_rate: f64) -> f64 {
    MIN_COUNTS_PER_WINDOW / bright_rate
}

/// Classify windows by photon counts, merge equal levels and absorb
/// single-window islands. `max_level` caps the level (the atom number).
pub fn segment_periods(rec: &EmissionRecord, w: f64, bright_rate: f64, max_level: usize) -> Result<PeriodTrace> {
    if !(w > 0.0 && bright_rate > 0.0) || w * bright_rate < MIN_COUNTS_PER_WINDOW - 1e-9 {
        return Err(Error::Segmentation(format!(
            "window {w} s at {bright_rate} s⁻¹ gives {:.2} expected counts per step, need {MIN_COUNTS_PER_WINDOW}",
            w * bright_rate
        )));
    }
    let n = window_count(rec.duration, w);
    let mut counts = vec![0usize; n];
    for e in &rec.events {
        let k = ((e.time / w) as usize).min(n - 1);
        counts[k] += 1;
    }
    let unit = bright_rate * w;
    let thresholds: Vec<f64> = (0..max_level).map(|k| (k as f64 + 0.5) * unit).collect();
    let levels: Vec<usize> = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            // The last window may be short; scale its count to a full window.
            let width = if k + 1 == n { rec.duration - k as f64 * w } else { w };
            let c = if width > 0.0 { c as f64 * w / width } else { 0.0 };
            thresholds.iter().filter(|&&t| c >= t).count()
        })
        .collect();
    let mut trace = segment_window_levels(&levels, w, rec.duration);
    trace.thresholds = thresholds;
    Ok(trace)
}

/// Merge per-window levels into periods, absorbing single-window runs
/// whose neighbours share a level.
pub fn segment_window_levels(levels: &[usize], w: f64, duration: f64) -> PeriodTrace {
    // Runs as (level, window count).
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for &l in levels {
        match runs.last_mut() {
            Some((lv, n)) if *lv == l => *n += 1,
            _ => runs.push((l, 1)),
        }
    }
    let mut absorbed = 0;
    let mut k = 1;
    while k + 1 < runs.len() {
        if runs[k].1 == 1 && runs[k - 1].0 == runs[k + 1].0 {
            let extra = 1 + runs[k + 1].1;
            runs[k - 1].1 += extra;
            runs.drain(k..k + 2);
            absorbed += 1;
        } else {
            k += 1;
        }
    }
    let suspect = (1..runs.len().saturating_sub(1))
        .filter(|&k| runs[k].1 == 2 && runs[k - 1].0 == runs[k + 1].0)
        .count();
    let mut periods = Vec::with_capacity(runs.len());
    let mut start = 0usize;
    for (level, len) in runs {
        let end = start + len;
        periods.push(Period {
            start: start as f64 * w,
            end: (end as f64 * w).min(duration),
            level,
        });
        start = end;
    }
    if periods.is_empty() {
        periods.push(Period { start: 0.0, end: duration, level: 0 });
    }
    PeriodTrace { periods, window: Some(w), thresholds: Vec::new(), absorbed_islands: absorbed, suspect_runs: suspect }
}

/// Periods of the hidden level recorded by the simulator.
pub fn level_trace(rec: &EmissionRecord) -> PeriodTrace {
    let mut periods: Vec<Period> = Vec::with_capacity(rec.levels.len());
    let changes: &[LevelChange] = &rec.levels;
    for (k, c) in changes.iter().enumerate() {
        let end = changes.get(k + 1).map_or(rec.duration, |n| n.time);
        match periods.last_mut() {
            Some(p) if p.level == c.level => p.end = end,
            _ => periods.push(Period { start: c.time, end, level: c.level }),
        }
    }
    if periods.is_empty() {
        periods.push(Period { start: 0.0, end: rec.duration, level: 0 });
    }
    PeriodTrace { periods, window: None, thresholds: Vec::new(), absorbed_islands: 0, suspect_runs: 0 }
}
