//! Parse a small protocol and print it back in canonical form.

use haiproto::dsl;

const SRC: &str = r#"
action req-sample_class(X,Y) := request(Y: output.label, X: input.raw_data|fvector) <- map(X,Y);
action annotate-sample(X,Y) := provide(Y: output.label, X: input.raw_data|fvector) <- map(X,Y);
message A5 := model -> user : req-sample_class(X, Y) [Y:reqSelfReport; X:WalkStand];
message A6 := user -> model : annotate-sample(X, Y) [X:WalkStand; Y:SelfReport];
/// the user labels a captured sample
pattern sample-annotation := [A5, A6] @hitl;
"#;

fn main() {
    let file = dsl::parse_named("demo.hai", SRC).unwrap_or_else(|diags| {
        for d in diags {
            eprintln!("{d}");
        }
        std::process::exit(1);
    });
    print!("{}", dsl::print(&file));

    // errors carry positions
    if let Err(diags) = dsl::parse_named("broken.hai", "action a(X) := provide(X: input) <- modify(X);") {
        for d in diags {
            println!("{d}");
        }
    }
}
