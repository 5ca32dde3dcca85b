//! A charge kicked at t = 0 with Coulomb initial data: field regions and the
//! uncancelled shell on the light cone.

use lightfront::propagation::InitialFieldSpec;
use lightfront::scenarios::{coulomb_front, shell_report, CoulombFront};
use lightfront::Vec3;

fn main() -> lightfront::Result<()> {
    let setup = CoulombFront::uniform(Vec3::new(0.3, 0.0, 0.0))?;
    let data = coulomb_front(&setup)?;
    let count = |region: &str| data.rows.iter().filter(|r| r.region == region).count();
    println!("t = {}: inside {}, outside {}, on front {}", setup.time, count("inside"), count("outside"), count("band"));

    let report = shell_report(&*setup.actual, &InitialFieldSpec::coulomb(Vec3::zeros()), setup.time, 6)?;
    println!("momentum gap {:?}", report.momentum_gap.as_slice());
    for s in &report.samples {
        println!("  at {:>7.3?}: net shell |E| = {:.4e}", s.point.as_slice(), s.net_e.norm());
    }
    Ok(())
}
