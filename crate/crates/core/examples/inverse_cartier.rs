//! Inverse Cartier transform of a Higgs bundle on two affine charts,
//! with local Frobenius lifts that do not glue.

use charp_hodge::cartier::{inverse_cartier, verify_lemma32};
use charp_hodge::registry::find;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = find("affine-2chart").expect("registered").load(5)?;
    let obstruction = s.lifts.fx.obstruction()?;
    println!("Frobenius lifts glue: {}", obstruction.is_zero());
    let v = inverse_cartier(&s.higgs, &s.lifts.fx)?;
    for (c, a) in v.locals().iter().enumerate() {
        println!("connection form on chart {c}: {a:?}");
    }
    for (k, t) in v.transitions().iter().enumerate() {
        println!("transition {k}: {t:?}");
    }
    println!("flat: {}", v.is_flat());
    for c in 0..s.x.num_charts() {
        println!("chart {c} intertwining holds: {}", verify_lemma32(&s.higgs, &s.lifts, c)?.ok);
    }
    Ok(())
}
