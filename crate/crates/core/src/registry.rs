//! Built-in scenarios, each generated for a given prime.

use serde_json::{json, Value};

use crate::scenario::{parse_scenario, InputError, Scenario};

/// A named scenario together with the statements it exercises.
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    /// Check identifiers of the statements this example exercises.
    pub cites: &'static [&'static str],
    build: fn(u64) -> Value,
}

impl Example {
    /// The scenario JSON at prime `p`.
    pub fn scenario(&self, p: u64) -> Value {
        let mut v = (self.build)(p);
        v["name"] = json!(self.name);
        v["prime"] = json!(p);
        v
    }

    pub fn load(&self, p: u64) -> Result<Scenario, InputError> {
        parse_scenario(&self.scenario(p), None)
    }
}

static EXAMPLES: &[Example] = &[
    Example {
        name: "affine-2chart",
        summary: "A^1 covered by x != 0 and x != 1, f = x^2 with lifts that do not glue",
        cites: &["tp-compare", "lemma32", "lemma33", "descent", "theorem", "flatness"],
        build: affine_two_chart,
    },
    Example {
        name: "affine-3chart",
        summary: "A^1 covered by x != 0, 1, 2 with a nonzero obstruction cocycle",
        cites: &["tp-compare", "lemma32", "lemma33", "theorem", "flatness"],
        build: affine_three_chart,
    },
    Example {
        name: "p1-log-rank2",
        summary: "P^1 with log poles at 0 and infinity, nilpotent field on O + O",
        cites: &["tp-compare", "representative", "direct-sum", "lemma32", "lemma33", "descent", "theorem", "flatness"],
        build: p1_log_rank2,
    },
    Example {
        name: "p1-frobenius-pullback",
        summary: "the degree-p map x -> x^p of P^1, whose pullback field vanishes",
        cites: &["tp-compare", "lemma32", "lemma33", "theorem", "flatness"],
        build: p1_frobenius_pullback,
    },
    Example {
        name: "prop28-curve",
        summary: "F^r and Sym^r(E_tau) for tau = 1/x on the two-chart line",
        cites: &["prop28", "extension", "sym-filtration", "tp-compare", "lemma32"],
        build: prop28_curve,
    },
    Example {
        name: "tensor-pair",
        summary: "two rank-2 log Higgs bundles on P^1 with opposite nilpotent fields",
        cites: &["tensor", "direct-sum", "tp-compare", "lemma32", "flatness"],
        build: tensor_pair,
    },
    Example {
        name: "affine-global-lift",
        summary: "f = x^2 with a global lift and standard Frobenius lifts, so nothing is twisted",
        cites: &["theorem", "descent", "lemma32", "lemma33", "flatness"],
        build: affine_global_lift,
    },
];

pub fn examples() -> &'static [Example] {
    EXAMPLES
}

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

fn log_chart(var: &str, inverted: &[&str]) -> Value {
    json!({"vars": [{"name": var, "log": true}], "inverted": inverted})
}

/// Charts of A^1 inverting `x - a` for each centre, with overlaps inverting both.
fn line_covering(centres: &[&[i64]]) -> Value {
    let factor = |a: i64| match a {
        0 => "x".to_string(),
        a if a < 0 => format!("x + {}", -a),
        a => format!("x - {a}"),
    };
    let inv = |c: &[i64]| c.iter().map(|&a| factor(a)).collect::<Vec<_>>();
    let charts: Vec<Value> = centres.iter().map(|c| json!({"vars": ["x"], "inverted": inv(c)})).collect();
    let union = |idx: &[usize]| {
        let mut all: Vec<i64> = idx.iter().flat_map(|&k| centres[k].iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        json!({"vars": ["x"], "inverted": inv(&all)})
    };
    let id = json!({"x": "x"});
    let n = centres.len();
    let mut overlaps = Vec::new();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            overlaps.push(json!({"pair": [i, j], "ring": union(&[i, j]), "restrict_i": id, "restrict_j": id}));
            for k in j + 1..n {
                triples.push(json!({"idx": [i, j, k], "ring": union(&[i, j, k]), "restrict": [id, id, id]}));
            }
        }
    }
    json!({"charts": charts, "overlaps": overlaps, "triples": triples})
}

/// P^1 with coordinates x and y = 1/x, both logarithmic.
fn p1_covering() -> Value {
    json!({
        "charts": [log_chart("x", &[]), log_chart("y", &[])],
        "overlaps": [{
            "pair": [0, 1],
            "ring": log_chart("x", &["x"]),
            "restrict_i": {"x": "x"},
            "restrict_j": {"y": "1/x"},
        }],
    })
}

fn nilpotent(var: &str, entry: &str) -> Value {
    json!({var: [["0", entry], ["0", "0"]]})
}

fn affine_two_chart(p: u64) -> Value {
    json!({
        "X": line_covering(&[&[0], &[1]]),
        "Y": line_covering(&[&[0], &[-1, 1]]),
        "f": [{"x": "x^2"}, {"x": "x^2"}],
        "lifts": {
            "f": [{"x": "x^2"}, {"x": format!("x^2 + {p}*x")}],
            "FX": [{"x": format!("x^{p}")}, {"x": format!("x^{p} + {p}*x^2")}],
            "FY": [{"x": format!("x^{p}")}, {"x": format!("x^{p} + {p}*x^3")}],
        },
        "higgs": {
            "rank": 2,
            "locals": [nilpotent("x", "x"), nilpotent("x", "x")],
            "transitions": [[["1", "1/x"], ["0", "1"]]],
        },
        "r": 1,
        "checks": ["tp-compare", "lemma32", "lemma33", "descent", "theorem", "flatness"],
    })
}

fn affine_three_chart(p: u64) -> Value {
    json!({
        "X": line_covering(&[&[0], &[1], &[2]]),
        "lifts": {
            "f": [{"x": "x"}, {"x": format!("x + {p}*x^2")}, {"x": format!("x + {p}")}],
            "FX": [{"x": format!("x^{p}")}, {"x": format!("x^{p}")}, {"x": format!("x^{p} + {p}*x")}],
        },
        "higgs": {
            "rank": 2,
            "locals": [nilpotent("x", "1"), nilpotent("x", "1"), nilpotent("x", "1")],
        },
        "r": 1,
        "checks": ["tp-compare", "lemma32", "lemma33", "theorem", "flatness"],
    })
}

fn p1_log_rank2(p: u64) -> Value {
    json!({
        "X": p1_covering(),
        "lifts": {
            "f": [{"x": "x"}, {"y": format!("y + {p}*y^2")}],
            "FX": [{"x": format!("x^{p}")}, {"y": format!("y^{p} + {p}*y^{}", p + 1)}],
            "FY": [{"x": format!("x^{p} + {p}*x^{}", p + 1)}, {"y": format!("y^{p}")}],
        },
        "higgs": {
            "rank": 2,
            "locals": [nilpotent("x", "1"), nilpotent("y", "-1")],
        },
        "r": 1,
        "checks": ["tp-compare", "representative", "direct-sum", "lemma32", "lemma33", "descent", "theorem", "flatness"],
    })
}

fn p1_frobenius_pullback(p: u64) -> Value {
    json!({
        "X": p1_covering(),
        "Y": p1_covering(),
        "f": [{"x": format!("x^{p}")}, {"y": format!("y^{p}")}],
        "lifts": {
            "f": [{"x": format!("x^{p}")}, {"y": format!("y^{p} + {p}*y^{}", p + 1)}],
        },
        "higgs": {
            "rank": 2,
            "locals": [nilpotent("x", "1"), nilpotent("y", "-1")],
        },
        "r": 1,
        "checks": ["tp-compare", "lemma32", "lemma33", "theorem", "flatness"],
    })
}

fn prop28_curve(p: u64) -> Value {
    json!({
        "X": line_covering(&[&[0], &[1]]),
        "higgs": {
            "rank": 2,
            "locals": [nilpotent("x", "1"), nilpotent("x", "1")],
        },
        "tau": [{"x": "1/x"}],
        "r": 2,
        "cap": 2 * p,
        "checks": ["prop28", "extension", "sym-filtration", "tp-compare", "lemma32"],
    })
}

fn tensor_pair(p: u64) -> Value {
    json!({
        "X": p1_covering(),
        "lifts": {
            "f": [{"x": "x"}, {"y": format!("y + {p}*y^2")}],
        },
        "higgs": {
            "rank": 2,
            "locals": [nilpotent("x", "1"), nilpotent("y", "-1")],
        },
        "higgs2": {
            "rank": 2,
            "locals": [{"x": [["0", "0"], ["1", "0"]]}, {"y": [["0", "0"], ["-1", "0"]]}],
        },
        "r": 1,
        "checks": ["tensor", "direct-sum", "tp-compare", "lemma32", "flatness"],
    })
}

fn affine_global_lift(p: u64) -> Value {
    json!({
        "X": line_covering(&[&[0], &[1]]),
        "Y": line_covering(&[&[0], &[-1, 1]]),
        "f": [{"x": "x^2"}, {"x": "x^2"}],
        "lifts": {
            "f": [{"x": "x^2"}, {"x": "x^2"}],
            "FX": [{"x": format!("x^{p}")}, {"x": format!("x^{p}")}],
            "FY": [{"x": format!("x^{p}")}, {"x": format!("x^{p}")}],
        },
        "higgs": {
            "rank": 2,
            "locals": [nilpotent("x", "x"), nilpotent("x", "x")],
            "transitions": [[["1", "1/x"], ["0", "1"]]],
        },
        "r": 1,
        "checks": ["theorem", "descent", "lemma32", "lemma33", "flatness"],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_loads() {
        for p in [3, 5, 7] {
            for e in examples() {
                if let Err(err) = e.load(p) {
                    panic!("{} at p = {p}: {err}", e.name);
                }
            }
        }
    }

    #[test]
    fn citations_are_nonempty() {
        assert!(examples().iter().all(|e| !e.cites.is_empty()));
        assert!(find("prop28-curve").is_some());
    }
}
