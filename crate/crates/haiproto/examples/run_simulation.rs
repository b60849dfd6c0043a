//! Six robot-learning sessions with a scripted user and a stub model.

use haiproto::catalog::embedded;
use haiproto::runtime::{run_scenario, AgentsFixture};

const AGENTS: &str = include_str!("../fixtures/agents/robot_demo.agents");

fn main() {
    let cat = embedded();
    let fixture = AgentsFixture::parse(AGENTS).expect("valid fixture");
    let mut agents = fixture.build();
    let sc = &cat.scenarios["D1"];
    let parts: Vec<_> = sc.patterns.iter().map(|n| &cat.patterns[n]).collect();
    let traces = run_scenario(&cat, "D1", &parts, &mut agents, 7, 6).expect("runnable");
    for t in &traces {
        let y = &t.steps.last().expect("steps").bindings["Y"];
        let x = &t.steps.last().expect("steps").bindings["X"];
        println!("{}: {:?}, X = {}, Y = {}", t.run, t.outcome, x.value, y.value);
    }
    let model = agents["model"].learned().expect("stub model");
    println!("model holds {} examples", model.len());
    for (label, c) in model.centroids() {
        println!("  {label}: centroid {c:?}");
    }
    println!("(2, 6) -> {}", model.classify(&[2.0, 6.0]).unwrap());
}
