//! Field of a charge on a circular orbit, compared with its Coulomb limit.

use lightfront::kinematics::{Branch, Circular, Static, Worldline};
use lightfront::lw::{larmor_power, lw_field};
use lightfront::units::Units;
use lightfront::Vec3;

fn main() -> lightfront::Result<()> {
    let orbit = Circular::new(Vec3::zeros(), 0.2, 2.0)?;
    let at_rest = Static::new(Vec3::zeros());
    println!("{:>6} {:>14} {:>14} {:>14}", "r", "|E| orbit", "|E| static", "|B| orbit");
    for r in [1.0, 2.0, 5.0, 10.0, 50.0] {
        let x = Vec3::new(0.0, 0.0, r);
        let f = lw_field(&orbit, &x, 0.0, Branch::Retarded)?;
        let s = lw_field(&at_rest, &x, 0.0, Branch::Retarded)?;
        println!("{r:>6} {:>14.6e} {:>14.6e} {:>14.6e}", f.e.norm(), s.e.norm(), f.b.norm());
    }
    let a = orbit.point(0.0)?.a;
    println!("radiated power of a unit charge: {:.6e}", larmor_power(&a, 1.0, &Units::natural()));
    Ok(())
}
