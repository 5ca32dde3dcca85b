//! Smeared charges meet a radiation front as a smooth step in the force.

use lightfront::scenarios::{scenario_two_body, TwoBodyPreset};

fn main() -> lightfront::Result<()> {
    let run = scenario_two_body(TwoBodyPreset::RetardedLineSmeared)?;
    for s in &run.steps {
        println!(
            "charge {} meets the front of {} at t = {:.4}: |step| {:.4e}, 10-90% width {:.4} (diameter {})",
            s.charge, s.source, s.crossing_time, s.step.norm(), s.width, s.diameter
        );
    }
    for row in run.forces.iter().filter(|r| r.charge == 1).step_by(20) {
        println!("  t = {:.3}  F = ({:+.5e}, {:+.5e}, {:+.5e})", row.t, row.fx, row.fy, row.fz);
    }
    Ok(())
}
