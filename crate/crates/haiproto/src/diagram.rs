//! Mermaid sequence diagrams.

use std::fmt::Write;

use crate::check::Corpus;
use crate::model::Pattern;

/// One participant per role in order of first appearance, one arrow per
/// message labelled `action [head type]`. Requests use dashed arrows.
pub fn mermaid(pattern: &Pattern, corpus: &dyn Corpus) -> Result<String, String> {
    let mut roles: Vec<&str> = Vec::new();
    let mut arrows = String::new();
    for name in &pattern.messages {
        let m = corpus.message(name).ok_or_else(|| format!("unknown message `{name}`"))?;
        let a = corpus.action(&m.action).ok_or_else(|| format!("unknown action `{}`", m.action))?;
        for r in [&m.sender, &m.receiver] {
            if !roles.contains(&r.as_str()) {
                roles.push(r);
            }
        }
        let arrow = if a.is_request() { "-->>" } else { "->>" };
        let head = a.head_type().to_string();
        let head = if head.starts_with('[') { head } else { format!("[{head}]") };
        writeln!(arrows, "    {}{arrow}{}: {} {head}", m.sender, m.receiver, m.action).expect("string write");
    }
    let mut out = String::from("sequenceDiagram\n");
    writeln!(out, "    title {}", pattern.name).expect("string write");
    for r in roles {
        writeln!(out, "    participant {r}").expect("string write");
    }
    out.push_str(&arrows);
    Ok(out)
}

/// Number of arrows in a diagram produced by [`mermaid`].
pub fn arrow_count(diagram: &str) -> usize {
    diagram.lines().filter(|l| l.contains("->>")).count()
}
