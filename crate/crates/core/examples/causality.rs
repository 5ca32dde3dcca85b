//! Perturbing the initial momentum changes the field only inside the cone.

use std::sync::Arc;

use lightfront::compatibility::{perturbation_experiment_a1, PerturbationSetup};
use lightfront::kinematics::Static;
use lightfront::propagation::InitialFieldSpec;
use lightfront::quadrature::fibonacci_sphere;
use lightfront::Vec3;

fn main() -> lightfront::Result<()> {
    for t in [0.5, 1.0, 2.0] {
        let setup = PerturbationSetup {
            actual: Arc::new(Static::new(Vec3::zeros())),
            init: InitialFieldSpec::coulomb(Vec3::zeros()),
            witness: None,
            time: t,
            outside_points: fibonacci_sphere(20).iter().map(|n| n * (t + 0.3)).collect(),
            sphere_samples: 12,
            horizon: 5.0,
        };
        let rep = perturbation_experiment_a1(&setup, &Vec3::new(0.01, 0.0, 0.0))?;
        println!(
            "t = {t}: outside change {:e}, largest shell on the cone {:.3e}",
            rep.outside_max_difference, rep.net_shell_max
        );
    }
    Ok(())
}
