//! Compare the two ways a user can query the robot for a prediction.

use haiproto::catalog::embedded;

fn main() {
    let cat = embedded();
    let d = cat.diff("query-P1", "query-P2").expect("both patterns exist");
    println!("shared:");
    for s in &d.shared {
        println!("  {s}");
    }
    println!("only in query-P1:");
    for s in &d.only_in_a {
        println!("  {s}");
    }
    println!("only in query-P2:");
    for s in &d.only_in_b {
        println!("  {s}");
    }
}
