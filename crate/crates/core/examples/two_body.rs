//! Two charges on a line with a frozen initial field: the march halts where
//! the uncancelled front reaches the second charge.

use lightfront::scenarios::{scenario_two_body, TwoBodyPreset};

fn main() -> lightfront::Result<()> {
    let run = scenario_two_body(TwoBodyPreset::RetardedLine)?;
    for ev in run.dynamics.events() {
        println!("{ev:?}");
    }
    if let Some(res) = &run.residual {
        println!("residual: pointwise {:.2e}, integrated {:.2e}", res.max_pointwise, res.max_integrated);
    }
    for (i, h) in run.dynamics.histories().iter().enumerate() {
        let last = h.nodes().last().unwrap();
        println!("charge {i}: t = {:.3}, q = {:.6?}, p = {:.6?}", last.t, last.q.as_slice(), last.p.as_slice());
    }
    let adapted = scenario_two_body(TwoBodyPreset::RetardedLineAdapted)?;
    println!("with adapted initial data: {:?}", adapted.dynamics.events());
    Ok(())
}
