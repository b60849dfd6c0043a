//! Render a pattern and a scenario as Mermaid sequence diagrams.

use haiproto::catalog::embedded;
use haiproto::diagram::mermaid;

fn main() {
    let cat = embedded();
    print!("{}", mermaid(&cat.patterns["sample-annotation"], &cat).unwrap());
    println!();
    let d4 = cat.runnable("D4").unwrap();
    print!("{}", mermaid(&d4, &cat).unwrap());
}
