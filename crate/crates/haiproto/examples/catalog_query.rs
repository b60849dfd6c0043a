//! List the built-in patterns that support explanations or user control.

use haiproto::catalog::{embedded, parse_tags};

fn main() {
    let cat = embedded();
    let tags = parse_tags(&["xai", "control"]).expect("known tags");
    for p in cat.query(&tags) {
        let tags: Vec<&str> = p.tags.iter().map(|t| t.as_str()).collect();
        println!("{:<32} @{}", p.name, tags.join(", "));
    }
    println!("{} of {} patterns", cat.query(&tags).len(), cat.patterns.len());
}
