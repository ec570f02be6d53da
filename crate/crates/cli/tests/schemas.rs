use std::path::Path;

use fbq_core::sim::{Policy, SimConfig};
use fbq_core::solvers::{solve, SolverKind};
use serde_json::Value;

fn schema(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()
}

/// Serialized keys must be declared, and every required key must be present.
fn assert_matches(object_schema: &Value, value: &Value) {
    let props = object_schema["properties"].as_object().unwrap();
    let obj = value.as_object().unwrap();
    for k in obj.keys() {
        assert!(props.contains_key(k), "undeclared field `{k}`");
    }
    for r in object_schema["required"].as_array().unwrap() {
        assert!(obj.contains_key(r.as_str().unwrap()), "missing required `{r}`");
    }
}

#[test]
fn sim_config_schema_tracks_the_type() {
    let s = schema("sim_config.v1.schema.json");
    let v = serde_json::to_value(SimConfig::reference([0.0; 4], 1.0, Policy::EqualStatic)).unwrap();
    assert_matches(&s, &v);
    let names: Vec<&str> = s["$defs"]["policy"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_str().unwrap())
        .collect();
    assert_eq!(names, Policy::ALL.map(Policy::name));
}

#[test]
fn solution_schema_tracks_the_type() {
    let s = schema("results.v1.schema.json");
    let problem = fbq_cli::io::parse_json::<fbq_cli::commands::solve::ProblemInput>(
        fbq_cli::commands::solve::TOY_PROBLEM,
    )
    .unwrap()
    .into_problem()
    .unwrap();
    let v = serde_json::to_value(solve(&problem, SolverKind::Greedy).unwrap()).unwrap();
    assert_matches(&s["$defs"]["solution"], &v);
    assert_matches(&s["$defs"]["solution"]["properties"]["certificate"], &v["certificate"]);
}

#[test]
fn every_schema_is_versioned_json() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let name = e.unwrap().file_name().into_string().unwrap();
        assert!(name.ends_with(".v1.schema.json"), "{name}");
        let s = schema(&name);
        assert_eq!(s["$id"].as_str().unwrap(), format!("fbq/{name}"));
        n += 1;
    }
    assert_eq!(n, 6);
}
