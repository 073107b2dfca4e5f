//! Photon-count segmentation of one simulated record, next to the hidden
//! level trace of the same trajectory.

use coopjump::model::{params_from_geometry, preset, Geometry};
use coopjump::trajectories::{bright_rate, count_jumps, default_window, level_trace, segment_periods, simulate};

fn main() -> coopjump::Result<()> {
    let pr = preset("desk-d").expect("preset");
    let p = params_from_geometry(&pr.params, &Geometry::equilateral(pr.r))?;
    let rec = simulate(&p, 7, 20.0)?;
    let bright = bright_rate(&p);
    let w = default_window(bright);
    let photons = segment_periods(&rec, w, bright, 3)?;
    let hidden = level_trace(&rec);
    println!("{} photons, bright rate {bright:.1} s⁻¹, window {w:.4} s", rec.events.len());
    println!("thresholds per window: {:?}", photons.thresholds);
    println!(
        "photon periods {}, hidden periods {}, absorbed islands {}, suspect runs {}",
        photons.periods.len(),
        hidden.periods.len(),
        photons.absorbed_islands,
        photons.suspect_runs
    );
    for (name, tr) in [("photons", &photons), ("hidden", &hidden)] {
        let c = count_jumps(tr, 4, pr.t_m);
        println!("{name:>8}: time at levels {:.2?} s, boundaries {}", c.time_at_level, c.k.sum());
    }
    println!("\nfirst hidden periods:");
    let mut out = Vec::new();
    hidden.write_csv(&mut out)?;
    for l in String::from_utf8_lossy(&out).lines().take(8) {
        println!("  {l}");
    }
    Ok(())
}
