//! How many brackets of the two admissible directions it takes to reach
//! every direction of the configuration space. For two trailers the answer
//! rises from 4 to 5 when the first trailer is perpendicular to the car.

use std::f64::consts::FRAC_PI_2;

use ntrailer::model::{FullState, Pose, VehicleParams};
use ntrailer::nonholonomy::{degree_of_nonholonomy, find_singular};

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_trailers(2);
    for alpha in [vec![0.4, -1.0], vec![FRAC_PI_2, -1.0]] {
        let r = degree_of_nonholonomy(&p, &FullState::new(Pose::default(), alpha.clone()))?;
        println!("alpha = {alpha:?}: degree {} (growth {:?})", r.degree, r.growth);
        for b in &r.spanning_set {
            println!("    {b}");
        }
    }

    let scan = find_singular(&p, 8)?;
    println!("generic degree {}; singular grid points:", scan.generic_degree);
    for pt in scan.singular_points() {
        println!("    alpha = ({:+.4}, {:+.4})  degree {:?}", pt.alpha[0], pt.alpha[1], pt.degree);
    }
    Ok(())
}
