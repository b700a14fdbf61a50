//! Phase portrait of one trailer with `a > 0` on an energy torus. Prints
//! the start and end of each trajectory; every one of them ends near the
//! stable node `(beta, alpha) = (0, 0)`.

use ntrailer::cli::{cmd_portrait, RunConfig};
use ntrailer::model::VehicleParams;

fn main() -> ntrailer::Result<()> {
    let mut config = RunConfig::new(VehicleParams::default());
    config.portrait.grid = 4;
    config.portrait.t_end = 60.0;
    config.portrait.dt = 60.0;
    let out = cmd_portrait(&config)?;
    let rows: Vec<&str> = out.artifact.lines().collect();
    println!("{}", rows[0]);
    for pair in rows[1..].chunks(2) {
        println!("{}\n{}\n", pair[0], pair[1]);
    }
    println!("{}", out.summary);
    Ok(())
}
