//! Compose the robot-learning design alternatives and check each one.

use haiproto::catalog::embedded;

fn main() {
    let cat = embedded();
    for name in ["D1", "D2", "D3", "D4"] {
        let sc = &cat.scenarios[name];
        let parts: Vec<&str> = sc.patterns.iter().map(String::as_str).collect();
        let composed = cat.compose(&parts).expect("patterns exist");
        println!(
            "{name}: {} messages, {:?}  [{}]",
            composed.pattern.messages.len(),
            composed.report.verdict,
            parts.join(" + ")
        );
    }

    // D4 extends D3 with an explanation exchange
    let d = cat.diff("D3", "D4").unwrap();
    for s in &d.only_in_b {
        println!("D4 adds {s}");
    }
}
