//! Twisted pullback of a rank-2 log Higgs bundle on the projective line,
//! compared across the three constructions and a change of representative.

use charp_hodge::harness::random::{random_sections, rng_for};
use charp_hodge::pullback::{compare_representatives, compare_tp1_tp2, tp2, tp3, PullbackContext};
use charp_hodge::registry::find;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = find("p1-log-rank2").expect("registered").load(5)?;
    let ctx = PullbackContext::new(s.f.clone(), s.tau.clone())?;
    for r in 1..=2 {
        let b = tp2(&s.higgs, &ctx, r)?;
        println!("r = {r}: twisted pullback has rank {}", b.rank());
        for (k, t) in b.transitions().iter().enumerate() {
            println!("  transition {k}: {t:?}");
        }
        let c = compare_tp1_tp2(&s.higgs, &ctx, r)?;
        println!("  tp1 vs tp2: {}", if c.check.ok { "isomorphic" } else { "different" });
        let b3 = tp3(&s.higgs, &ctx, r)?;
        println!("  tp3 transitions agree with tp2: {}", b3.transitions() == b.transitions());
        let sections = random_sections(&s.f, &mut rng_for(1, "example", 5))?;
        let rep = compare_representatives(&s.higgs, &ctx, &sections, r)?;
        println!("  changing tau by a coboundary: {}", if rep.check.ok { "isomorphic" } else { "different" });
    }
    Ok(())
}
