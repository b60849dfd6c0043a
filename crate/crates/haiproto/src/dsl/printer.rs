use std::fmt::Write;

use super::{Decl, SourceFile};
use crate::model::{ActionDef, Arg, ModKind, Message, Pattern, Scenario};

fn arg(a: &Arg) -> String {
    match &a.var {
        Some(v) => format!("{v}: {}", a.ty),
        None => a.ty.to_string(),
    }
}

fn doc_lines(out: &mut String, doc: &str) {
    if !doc.is_empty() {
        for line in doc.lines() {
            if line.is_empty() {
                out.push_str("///\n");
            } else {
                let _ = writeln!(out, "/// {line}");
            }
        }
    }
}

fn escape(s: &str) -> String {
    let mut o = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => o.push_str("\\\""),
            '\\' => o.push_str("\\\\"),
            '\n' => o.push_str("\\n"),
            '\t' => o.push_str("\\t"),
            c => o.push(c),
        }
    }
    o
}

pub fn print_action(a: &ActionDef) -> String {
    let p = &a.primitive;
    let args: Vec<String> = std::iter::once(&p.head).chain(&p.refs).map(arg).collect();
    let mut s = format!("action {}({}) := {}({})", a.name, a.params.join(", "), p.kind.as_str(), args.join(", "));
    if !a.operations.is_empty() {
        let ops: Vec<String> =
            a.operations.iter().map(|o| format!("{}({})", o.kind.as_str(), o.args.join(", "))).collect();
        let _ = write!(s, " <- {}", ops.join(", "));
    }
    s.push(';');
    s
}

pub fn print_message(m: &Message) -> String {
    let mut s = format!("message {} := {} -> {} : {}({})", m.name, m.sender, m.receiver, m.action, m.args.join(", "));
    if !m.modifiers.is_empty() {
        let mut mods = m.modifiers.clone();
        mods.sort_by(|a, b| a.key.cmp(&b.key));
        let mods: Vec<String> = mods
            .iter()
            .map(|m| match m.kind {
                ModKind::Var => format!("{}:{}", m.key, m.value),
                ModKind::Free => format!("{}=\"{}\"", m.key, escape(&m.value)),
            })
            .collect();
        let _ = write!(s, " [{}]", mods.join("; "));
    }
    s.push(';');
    s
}

pub fn print_pattern(p: &Pattern) -> String {
    let mut s = format!("pattern {} := [{}]", p.name, p.messages.join(", "));
    if !p.tags.is_empty() {
        let tags: Vec<&str> = p.tags.iter().map(|t| t.as_str()).collect();
        let _ = write!(s, " @{}", tags.join(", "));
    }
    s.push(';');
    s
}

pub fn print_scenario(sc: &Scenario) -> String {
    format!("scenario {} := [{}];", sc.name, sc.patterns.join(", "))
}

fn kind(d: &Decl) -> u8 {
    match d {
        Decl::Role(_) => 0,
        Decl::Action(_) => 1,
        Decl::Message(_) => 2,
        Decl::Pattern(_) => 3,
        Decl::Scenario(_) => 4,
        Decl::Comment(_) => 5,
    }
}

fn doc_of(d: &Decl) -> &str {
    match d {
        Decl::Action(a) => &a.doc,
        Decl::Pattern(p) => &p.notes,
        Decl::Scenario(s) => &s.notes,
        _ => "",
    }
}

/// Canonical text: one declaration per line, a blank line between runs of
/// different declaration kinds and before documented declarations.
pub fn print(file: &SourceFile) -> String {
    let mut out = String::new();
    let mut prev: Option<&Decl> = None;
    for d in &file.decls {
        if let Some(p) = prev {
            let after_comment = matches!(p, Decl::Comment(_));
            let documented = !doc_of(d).is_empty();
            if documented || (kind(p) != kind(d) && !after_comment) {
                out.push('\n');
            }
        }
        doc_lines(&mut out, doc_of(d));
        let line = match d {
            Decl::Role(r) => format!("role {r};"),
            Decl::Action(a) => print_action(a),
            Decl::Message(m) => print_message(m),
            Decl::Pattern(p) => print_pattern(p),
            Decl::Scenario(s) => print_scenario(s),
            Decl::Comment(c) if c.is_empty() => "//".to_string(),
            Decl::Comment(c) => format!("// {c}"),
        };
        out.push_str(&line);
        out.push('\n');
        prev = Some(d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn single_action_prints_on_one_line() {
        let src = "action req-new_sample(X) := request(X: input.raw_data);";
        let f = parse(src).unwrap();
        assert_eq!(print(&f), format!("{src}\n"));
    }

    #[test]
    fn union_subtypes_are_preserved() {
        let src = "action annotate-sample(X,Y) := provide(Y:output.label, X:input.raw_data|fvector) <- map(X,Y);";
        let out = print(&parse(src).unwrap());
        assert!(out.contains("X: input.raw_data|fvector"), "{out}");
        assert_eq!(parse(&out).unwrap(), parse(src).unwrap());
    }

    #[test]
    fn comments_docs_and_grouping() {
        let src = "// header\nrole supervisor;\n/// asks\naction a(X) := request(X: input);\naction b(X) := provide(X: input);\nmessage m := user -> model : a(X) [note=\"a \\\"q\\\"\"; X:Foo];\n";
        let f = parse(src).unwrap();
        let out = print(&f);
        assert_eq!(
            out,
            "// header\nrole supervisor;\n\n/// asks\naction a(X) := request(X: input);\naction b(X) := provide(X: input);\n\nmessage m := user -> model : a(X) [X:Foo; note=\"a \\\"q\\\"\"];\n"
        );
        assert_eq!(parse(&out).unwrap(), f);
        assert_eq!(print(&parse(&out).unwrap()), out);
    }
}
