//! Checks initial data against the motion and repairs it by adaptation.

use std::sync::Arc;

use lightfront::compatibility::{adapt_initial_field, check_c1, check_c2, AdaptOptions};
use lightfront::kinematics::{Polynomial, Worldline};
use lightfront::propagation::{FreeFieldSpec, InitialFieldSpec};
use lightfront::Vec3;

fn main() -> lightfront::Result<()> {
    let actual: Arc<dyn Worldline> = Arc::new(Polynomial::from_derivatives(
        0.0,
        &[Vec3::zeros(), Vec3::new(0.2, 0.0, 0.0), Vec3::new(0.0, 0.3, 0.0)],
    ));
    let candidates = [
        ("frozen", Polynomial::from_derivatives(0.0, &[Vec3::zeros()])),
        ("inertial", Polynomial::from_derivatives(0.0, &[Vec3::zeros(), Vec3::new(0.2, 0.0, 0.0)])),
    ];
    for (name, aux) in candidates {
        let init = InitialFieldSpec::unchecked(1.0, Arc::new(aux), FreeFieldSpec::Zero);
        let c1 = check_c1(&*actual, &init)?;
        let c2 = check_c2(&*actual, &init, 1)?;
        println!("{name:>9}: positions/momenta match {}, smoothness {:?}", c1.pass, c2.smoothness_class);
        if c1.pass {
            let adapted = adapt_initial_field(&actual, &init, &AdaptOptions::default())?;
            println!("{:>9}  after adaptation: {:?}", "", adapted.report.after.smoothness_class);
        }
    }
    Ok(())
}
