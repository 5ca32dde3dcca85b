//! Exponential runaway of the radiation-reaction equation without a force.

use lightfront::dynamics::ald_runaway_probe;

fn main() -> lightfront::Result<()> {
    for e in [0.1, 0.3, 0.5] {
        let probe = ald_runaway_probe(1.0, e, 1e-3, 0.5)?;
        println!("e = {e}: fitted rate {:.6}, expected {:.6}", probe.fitted_rate, probe.expected_rate);
    }
    Ok(())
}
