//! Half-advanced, half-retarded interaction solved by waveform relaxation.

use lightfront::scenarios::{run_document, Dynamics, TwoBodyPreset};

fn main() -> lightfront::Result<()> {
    let run = run_document(&TwoBodyPreset::FstWindow.document())?;
    let Dynamics::Relaxed(out) = &run.dynamics else { unreachable!() };
    println!("converged after {} sweeps", out.iterations);
    for (k, change) in out.trace.iter().enumerate() {
        println!("  sweep {:>2}: {change:.3e}", k + 1);
    }
    for (i, h) in out.histories.iter().enumerate() {
        let last = h.nodes().last().unwrap();
        println!("charge {i} at t = {:.2}: q = {:.6?}", last.t, last.q.as_slice());
    }
    Ok(())
}
