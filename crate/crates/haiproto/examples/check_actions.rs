//! Run the action typing rules over a few well-typed and ill-typed actions.

use haiproto::check::check_action;
use haiproto::dsl::{self, Decl};

const SRC: &str = r#"
action modify-prediction(X, Y, Z) := provide(Z: output.label, [X: input.raw_data, Y: output.label]) <- modify(Y, Z), map(X, Z);
action relabel(X, Y) := provide(Y: output.label, X: input.raw_data) <- modify(X, Y);
action pick(Y, L) := provide(Y: output.label, L: output.label) <- select(Y, L);
action pick-sample(X, L) := provide(X: input.raw_data, L: [output.label]) <- select(X, L);
"#;

fn main() {
    let file = dsl::parse(SRC).expect("parses");
    for d in &file.decls {
        if let Decl::Action(a) = d {
            let report = check_action(a);
            println!("{:<20} {:?}", a.name, report.verdict);
            for diag in &report.diagnostics {
                println!("    {}[{}]: {}", diag.severity, diag.code, diag.message);
            }
        }
    }
}
