//! Loads a scenario from JSON text, runs its checks and prints the report.

use charp_hodge::harness::{run_scenario, Format, Options};
use charp_hodge::registry::find;
use charp_hodge::scenario::parse_scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = serde_json::to_string_pretty(&find("tensor-pair").expect("registered").scenario(5))?;
    println!("{text}");
    let s = parse_scenario(&serde_json::from_str(&text)?, None)?;
    let checks = ["tensor", "direct-sum", "theorem"].map(String::from);
    let report = run_scenario(&s, &checks, &Options::default())?;
    print!("{}", report.render(Format::Text));
    Ok(())
}
