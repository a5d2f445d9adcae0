use charp_hodge::harness::{run_scenario, verify, Options, Report};
use charp_hodge::registry::examples;
use charp_hodge::scenario::parse_scenario;

fn checks_of(report: &Report) -> Vec<(String, bool)> {
    match report {
        Report::Run { checks, .. } => checks.iter().map(|c| (c.check.clone(), c.ok)).collect(),
        Report::Verify { .. } => unreachable!(),
    }
}

#[test]
fn registry_scenarios_survive_a_json_round_trip() {
    for p in [3, 5, 7] {
        for ex in examples() {
            let v = ex.scenario(p);
            let text = serde_json::to_string(&v).unwrap();
            let s = parse_scenario(&serde_json::from_str(&text).unwrap(), None).unwrap();
            assert_eq!(s.name, ex.name);
            assert_eq!(s.prime, p);
        }
    }
}

#[test]
fn listed_checks_pass_except_the_curve_comparison() {
    let opts = Options::default();
    for p in [3, 5] {
        for ex in examples() {
            let s = ex.load(p).unwrap();
            let report = run_scenario(&s, &[], &opts).unwrap();
            for (check, ok) in checks_of(&report) {
                if check != "prop28" {
                    assert!(ok, "{} at p = {p}: {check} failed", ex.name);
                }
            }
        }
    }
}

#[test]
fn verify_suites_other_than_prop28_pass() {
    let opts = Options { prime: Some(5), ..Options::default() };
    for suite in charp_hodge::harness::SUITES.iter().filter(|s| **s != "prop28") {
        let report = verify(suite, &opts).unwrap();
        assert!(report.ok(), "{}", report.to_text());
    }
}

#[test]
fn text_and_json_reports_agree() {
    let s = examples().iter().find(|e| e.name == "affine-global-lift").unwrap().load(5).unwrap();
    let report = run_scenario(&s, &["theorem".to_string(), "descent".to_string()], &Options::default()).unwrap();
    let json = report.to_json();
    assert_eq!(json["result"], serde_json::Value::Bool(report.ok()));
    let text = report.to_text();
    assert!(text.contains("theorem") && text.contains("descent"));
    assert_eq!(report.exit_code(), 0);
}
