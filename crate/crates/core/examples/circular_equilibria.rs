//! Without offset the vehicle can travel on circles. The car's speed `u0`
//! and rotation `omega0` admit such a motion iff `n l^2 omega0^2 <= u0^2`,
//! and then every trailer follows its own concentric circle.

use ntrailer::equilibria::equilibria_a0;
use ntrailer::model::{FullState, Pose, VehicleParams};

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_offset(0.0).with_trailers(4);
    for u0 in [1.5, 2.0, 2.5] {
        let eq = equilibria_a0(&p, u0, 1.0)?;
        println!("u0 = {u0:.4}: condition {:+.4}, {} solution(s)", eq.condition, eq.solutions.len());
        for s in &eq.solutions {
            let q = FullState::new(Pose::default(), s.state.alpha.clone());
            let centre = (0.0, s.radius);
            let radii: Vec<String> = q
                .trailer_positions(&p)
                .iter()
                .map(|(x, y)| format!("{:.4}", ((x - centre.0).powi(2) + (y - centre.1).powi(2)).sqrt()))
                .collect();
            println!(
                "    alpha = {:?}  car radius {:.4}  trailer radii [{}]  residual {:.1e}",
                s.state.alpha,
                s.radius,
                radii.join(", "),
                s.residual
            );
        }
    }
    Ok(())
}
