//! Compares the inverse Cartier transform of a twisted pullback with the
//! pullback of the inverse Cartier transform, with and without a global lift.

use charp_hodge::cartier::verify_theorem;
use charp_hodge::harness::random::{perturb_lifts, rng_for};
use charp_hodge::registry::find;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["affine-2chart", "p1-log-rank2", "affine-global-lift"] {
        let s = find(name).expect("registered").load(5)?;
        let t = verify_theorem(&s.higgs, &s.lifts)?;
        println!(
            "{name}: ob(f) zero {}, nu zero {}, isomorphic {}, flat {}",
            t.ob_f_zero, t.nu_zero, t.iso.ok, t.flat
        );
        let mut rng = rng_for(3, name, 5);
        let stable = (0..5).all(|_| {
            perturb_lifts(&s.lifts, &mut rng)
                .and_then(|l| verify_theorem(&s.higgs, &l))
                .map(|r| r.ok() == t.ok())
                .unwrap_or(false)
        });
        println!("  unchanged under five other lift choices: {stable}");
    }
    Ok(())
}
