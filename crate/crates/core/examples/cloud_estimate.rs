//! Order-of-magnitude estimate for two electron clouds, in both unit systems.

use lightfront::scenarios::paper_example;
use lightfront::units::UnitMode;

fn main() -> lightfront::Result<()> {
    for mode in [UnitMode::Si, UnitMode::Natural] {
        let e = paper_example(mode)?;
        println!(
            "{:?}: E = {:.6e} V/m, a = {:.6e} m/s^2, P = {:.6e} W, rise time {:.3e} s",
            mode, e.e1x, e.a2, e.p2, e.rise_time
        );
    }
    Ok(())
}
