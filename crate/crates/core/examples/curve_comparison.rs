//! The modules F^r and E^r on the curve example: gluing, Higgs fields and
//! an exhaustive search for isomorphisms of bounded degree.

use charp_hodge::pullback::{prop28_report, PullbackContext};
use charp_hodge::registry::find;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = 7;
    let s = find("prop28-curve").expect("registered").load(p)?;
    let ctx = PullbackContext::new(s.f.clone(), s.tau.clone())?;
    for r in 1..=2 {
        let rep = prop28_report(&ctx, r, 2 * p as u32, 0)?;
        println!("r = {r}");
        println!("  gluing F = {:?}", rep.gluing_f);
        println!("  gluing E = {:?}", rep.gluing_e);
        println!("  theta F  = {:?}", rep.higgs_f);
        println!("  theta E  = {:?}", rep.higgs_e);
        println!("  degree scaling map is an isomorphism: {}", rep.explicit.ok);
        match rep.search.found_at {
            Some(level) => println!("  search found an isomorphism at degree {level}"),
            None => println!("  no isomorphism up to degree {}", rep.search.cap),
        }
    }
    Ok(())
}
