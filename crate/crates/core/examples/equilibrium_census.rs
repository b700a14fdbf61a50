//! Relative equilibria with `a > 0`: straight-line motions with every
//! trailer aligned or folded back. There are `2^(n+1)` of them on each
//! energy level, exactly one stable and one unstable node among them.

use ntrailer::equilibria::{enumerate_equilibria, Stability};
use ntrailer::model::VehicleParams;

fn main() -> ntrailer::Result<()> {
    let energy = 1.0;
    for n in 0..=3 {
        let p = VehicleParams::default().with_trailers(n);
        let points = enumerate_equilibria(&p, energy)?;
        let count = |s| points.iter().filter(|e| e.stability == s).count();
        println!(
            "n = {n}: {} equilibria, {} stable, {} unstable, {} saddles",
            points.len(),
            count(Stability::StableNode),
            count(Stability::UnstableNode),
            count(Stability::Saddle)
        );
    }

    let p = VehicleParams::default();
    println!("\nn = 1 in detail:");
    for e in enumerate_equilibria(&p, energy)? {
        let eig: Vec<String> = e.eigenvalues.iter().map(|l| format!("{l:+.4}")).collect();
        println!(
            "  {}  u = {:+.4}  alpha = {:.4}  eigenvalues [{}]  {}{}",
            e.signature,
            e.state.u,
            e.state.alpha[0],
            eig.join(", "),
            e.stability,
            if e.physical { "" } else { "  (trailer folded onto the car)" }
        );
    }
    Ok(())
}
