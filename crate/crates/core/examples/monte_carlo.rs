//! Quantum trajectories for the desk-scale D preset, counted on the hidden
//! intensity level and compared with the predicted rates.
//!
//! Usage: monte_carlo [seeds] [duration]

use coopjump::cli::{trajectories, Segmentation, TrajectorySpec};
use coopjump::model::{params_from_geometry, preset, Geometry};
use coopjump::trajectories::DEFAULT_LABEL_THRESHOLD;

fn main() -> coopjump::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let seeds: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let duration: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(50.0);
    let pr = preset("desk-d").expect("preset");
    let spec = TrajectorySpec {
        params: params_from_geometry(&pr.params, &Geometry::equilateral(pr.r))?,
        seeds: (0..seeds).collect(),
        duration,
        t_m: pr.t_m,
        segmentation: Segmentation::Hidden,
        window: None,
        label_threshold: DEFAULT_LABEL_THRESHOLD,
        event_cap: 1e8,
    };
    let report = trajectories(&spec)?;
    let events: usize = report.per_seed.iter().map(|s| s.events).sum();
    println!("{seeds} seeds × {duration} s, {events} photons");
    println!("{:>8} {:>7} {:>10} {:>9} {:>10} {:>6}", "quantity", "count", "empirical", "sigma", "predicted", "z");
    for l in report.lines() {
        println!("{:>8} {:>7} {:>10.4} {:>9.4} {:>10.4} {:>6.2}", l.quantity, l.count, l.empirical, l.sigma, l.predicted, l.z);
    }
    Ok(())
}
