//! Expectation of a scalar field switched on at t = 0 near a static source.

use lightfront::propagation::qft_toy_expectation;
use lightfront::Vec3;

fn main() -> lightfront::Result<()> {
    let source = Vec3::zeros();
    for t in [0.5, 1.0, 2.0] {
        let row: Vec<String> = [0.25, 0.75, 1.5, 2.5]
            .iter()
            .map(|&r| qft_toy_expectation(1.0, &source, &Vec3::new(r, 0.0, 0.0), t).map(|v| format!("{v:>9.5}")))
            .collect::<lightfront::Result<_>>()?;
        println!("t = {t}: {}", row.join(" "));
    }
    Ok(())
}
