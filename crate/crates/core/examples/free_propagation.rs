//! Kirchhoff propagation of a tabulated plane wave, against the exact wave.

use lightfront::propagation::{kirchhoff_propagate, FreeFieldSpec};
use lightfront::quadrature::SphereRule;
use lightfront::Vec3;

fn main() -> lightfront::Result<()> {
    let (k, pol) = (Vec3::new(1.0, 2.0, 2.0), Vec3::new(2.0, -1.0, 0.0).normalize());
    let spec = FreeFieldSpec::plane_wave(k, pol, 1.0, 0.0)?;
    let (x, t) = (Vec3::new(0.1, -0.2, 0.3), 0.6);
    let exact = pol * (k.dot(&x) - k.norm() * t).cos();
    for h in [0.2, 0.1, 0.05] {
        let n = (3.2 / h as f64).round() as usize + 1;
        let grid = spec.tabulate(Vec3::new(-1.6, -1.6, -1.6), h, [n, n, n])?;
        for order in [4, 8, 16] {
            let f = kirchhoff_propagate(&grid, &x, t, &SphereRule::new(order))?;
            println!("spacing {h:<5} polar nodes {order:>2}: error {:.3e}", (f.e - exact).norm());
        }
    }
    Ok(())
}
