//! The pattern catalog: merged declarations from many files, with query,
//! diff, compose and JSON export.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::check::{self, CheckReport, Corpus};
use crate::diag::{Code, Diagnostic, Span};
use crate::dsl::{self, Decl, SourceFile};
use crate::model::{ActionDef, Message, Pattern, Scenario, Tag, PREDECLARED_ROLES};

/// The shipped corpus, one file per use case plus shared vocabulary.
pub const EMBEDDED: &[(&str, &str)] = &[
    ("fixtures/common.hai", include_str!("../fixtures/common.hai")),
    ("fixtures/robot.hai", include_str!("../fixtures/robot.hai")),
    ("fixtures/sound.hai", include_str!("../fixtures/sound.hai")),
    ("fixtures/interactive-RL.hai", include_str!("../fixtures/interactive-RL.hai")),
    ("fixtures/active-learning.hai", include_str!("../fixtures/active-learning.hai")),
    ("fixtures/sketching.hai", include_str!("../fixtures/sketching.hai")),
    ("fixtures/music-rec.hai", include_str!("../fixtures/music-rec.hai")),
    ("fixtures/scheduling-assistant.hai", include_str!("../fixtures/scheduling-assistant.hai")),
    ("fixtures/game.hai", include_str!("../fixtures/game.hai")),
    ("fixtures/patterns.hai", include_str!("../fixtures/patterns.hai")),
    ("fixtures/scenarios.hai", include_str!("../fixtures/scenarios.hai")),
    ("fixtures/supervisor.hai", include_str!("../fixtures/supervisor.hai")),
    ("fixtures/contestable.hai", include_str!("../fixtures/contestable.hai")),
];

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{} diagnostic(s)", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error("unknown pattern or scenario `{0}`")]
    UnknownPattern(String),
    #[error("{0}")]
    UnknownTag(String),
    #[error("nothing to compose")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Role,
    Action,
    Message,
    Pattern,
    Scenario,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Origin {
    pub path: String,
    pub span: Option<Span>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    /// Roles declared beyond `user` and `model`.
    pub roles: BTreeSet<String>,
    pub actions: BTreeMap<String, ActionDef>,
    pub messages: BTreeMap<String, Message>,
    pub patterns: BTreeMap<String, Pattern>,
    pub scenarios: BTreeMap<String, Scenario>,
    pub origins: BTreeMap<(Kind, String), Origin>,
}

impl Corpus for Catalog {
    fn action(&self, name: &str) -> Option<&ActionDef> {
        self.actions.get(name)
    }

    fn message(&self, name: &str) -> Option<&Message> {
        self.messages.get(name)
    }

    fn pattern(&self, name: &str) -> Option<&Pattern> {
        self.patterns.get(name)
    }

    fn has_role(&self, name: &str) -> bool {
        PREDECLARED_ROLES.contains(&name) || self.roles.contains(name)
    }
}

/// Expand directories into the `.hai` files beneath them, sorted; plain
/// files are kept as given.
pub fn source_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CatalogError> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<Result<_, _>>()?;
        entries.sort_by_key(|e| e.path());
        for e in entries {
            let p = e.path();
            if p.is_dir() {
                walk(&p, out)?;
            } else if p.extension().is_some_and(|x| x == "hai") {
                out.push(p);
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found = Vec::new();
            walk(p, &mut found).map_err(|source| CatalogError::Io { path: p.display().to_string(), source })?;
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Read and parse every file. Parse failures are collected across files.
pub fn read_sources(paths: &[PathBuf]) -> Result<Vec<SourceFile>, CatalogError> {
    let mut texts = Vec::new();
    for p in source_files(paths)? {
        let path = p.display().to_string();
        let text = std::fs::read_to_string(&p).map_err(|source| CatalogError::Io { path: path.clone(), source })?;
        texts.push((path, text));
    }
    parse_all(texts.iter().map(|(p, t)| (p.as_str(), t.as_str())))
}

fn parse_all<'a>(sources: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Vec<SourceFile>, CatalogError> {
    let mut files = Vec::new();
    let mut diags = Vec::new();
    for (path, text) in sources {
        match dsl::parse_named(path, text) {
            Ok(f) => files.push(f),
            Err(d) => diags.extend(d),
        }
    }
    if diags.is_empty() {
        Ok(files)
    } else {
        Err(CatalogError::Invalid(diags))
    }
}

/// Load files and directories into one catalog.
pub fn load(paths: &[PathBuf]) -> Result<Catalog, CatalogError> {
    Catalog::from_files(read_sources(paths)?)
}

/// Load in-memory `(path, text)` pairs.
pub fn load_sources(sources: &[(&str, &str)]) -> Result<Catalog, CatalogError> {
    Catalog::from_files(parse_all(sources.iter().copied())?)
}

/// The shipped corpus.
pub fn embedded() -> Catalog {
    load_sources(EMBEDDED).expect("embedded corpus loads")
}

/// One step of a pattern as seen by `diff`: who sends which action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub sender: String,
    pub receiver: String,
    pub action: String,
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {} : {}", self.sender, self.receiver, self.action)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionChange {
    pub action: String,
    pub in_a: Step,
    pub in_b: Step,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDiff {
    pub shared: Vec<Step>,
    pub only_in_a: Vec<Step>,
    pub only_in_b: Vec<Step>,
    pub direction_changes: Vec<DirectionChange>,
}

impl PatternDiff {
    pub fn is_empty(&self) -> bool {
        self.only_in_a.is_empty() && self.only_in_b.is_empty() && self.direction_changes.is_empty()
    }

    /// The same diff seen from the other side.
    pub fn swapped(&self) -> PatternDiff {
        PatternDiff {
            shared: self.shared.clone(),
            only_in_a: self.only_in_b.clone(),
            only_in_b: self.only_in_a.clone(),
            direction_changes: self
                .direction_changes
                .iter()
                .map(|c| DirectionChange { action: c.action.clone(), in_a: c.in_b.clone(), in_b: c.in_a.clone() })
                .collect(),
        }
    }
}

/// Order-respecting LCS diff. On equal-length alternatives the smaller step
/// is skipped first, so swapping the inputs swaps the result. Leftover steps
/// of one action are paired by rank across the sides; pairs that differ in
/// direction are reported as direction changes, ordered by action.
pub fn diff_steps(a: &[Step], b: &[Step]) -> PatternDiff {
    let (n, m) = (a.len(), b.len());
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if a[i] == b[j] { dp[i + 1][j + 1] + 1 } else { dp[i + 1][j].max(dp[i][j + 1]) };
        }
    }
    let mut out = PatternDiff::default();
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.shared.push(a[i].clone());
            i += 1;
            j += 1;
        } else if dp[i + 1][j] > dp[i][j + 1] || (dp[i + 1][j] == dp[i][j + 1] && a[i] < b[j]) {
            only_a.push(a[i].clone());
            i += 1;
        } else {
            only_b.push(b[j].clone());
            j += 1;
        }
    }
    only_a.extend(a[i..].iter().cloned());
    only_b.extend(b[j..].iter().cloned());

    // the k-th leftover of an action in `a` pairs with the k-th in `b`
    let mut used_a = vec![false; only_a.len()];
    let mut used_b = vec![false; only_b.len()];
    let actions: BTreeSet<&str> = only_a.iter().map(|s| s.action.as_str()).collect();
    for action in actions {
        let ia = (0..only_a.len()).filter(|&i| only_a[i].action == action);
        let ib = (0..only_b.len()).filter(|&j| only_b[j].action == action);
        for (i, j) in ia.zip(ib) {
            let (sa, sb) = (&only_a[i], &only_b[j]);
            if sa.sender != sb.sender || sa.receiver != sb.receiver {
                used_a[i] = true;
                used_b[j] = true;
                out.direction_changes.push(DirectionChange { action: action.to_string(), in_a: sa.clone(), in_b: sb.clone() });
            }
        }
    }
    out.only_in_a = only_a.into_iter().zip(used_a).filter(|(_, u)| !u).map(|(s, _)| s).collect();
    out.only_in_b = only_b.into_iter().zip(used_b).filter(|(_, u)| !u).map(|(s, _)| s).collect();
    out
}

/// Concatenate patterns into one anonymous pattern.
pub fn compose_patterns(parts: &[&Pattern]) -> Pattern {
    Pattern {
        name: parts.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join("+"),
        messages: parts.iter().flat_map(|p| p.messages.iter().cloned()).collect(),
        tags: parts.iter().flat_map(|p| p.tags.iter().copied()).collect(),
        notes: String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composed {
    pub pattern: Pattern,
    pub report: CheckReport,
}

/// Stable JSON shape of a catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Export {
    pub actions: Vec<ActionDef>,
    pub messages: Vec<Message>,
    pub patterns: Vec<Pattern>,
    pub roles: Vec<String>,
    pub scenarios: Vec<Scenario>,
}

/// Parse a list of tag names, rejecting anything outside the vocabulary.
pub fn parse_tags<S: AsRef<str>>(names: &[S]) -> Result<Vec<Tag>, CatalogError> {
    names.iter().map(|n| n.as_ref().parse::<Tag>().map_err(CatalogError::UnknownTag)).collect()
}

impl Catalog {
    /// Merge parsed files, then resolve every reference across the merge.
    pub fn from_files(files: Vec<SourceFile>) -> Result<Catalog, CatalogError> {
        let mut cat = Catalog::default();
        let mut diags = Vec::new();
        for f in &files {
            for (i, d) in f.decls.iter().enumerate() {
                let origin = Origin { path: f.path.clone(), span: f.span_of(i) };
                let (kind, name) = match d {
                    Decl::Role(r) => (Kind::Role, r.clone()),
                    Decl::Action(a) => (Kind::Action, a.name.clone()),
                    Decl::Message(m) => (Kind::Message, m.name.clone()),
                    Decl::Pattern(p) => (Kind::Pattern, p.name.clone()),
                    Decl::Scenario(s) => (Kind::Scenario, s.name.clone()),
                    Decl::Comment(_) => continue,
                };
                // patterns and scenarios share one namespace
                let clash = match kind {
                    Kind::Pattern | Kind::Scenario => cat
                        .origins
                        .get(&(Kind::Pattern, name.clone()))
                        .or_else(|| cat.origins.get(&(Kind::Scenario, name.clone()))),
                    _ => cat.origins.get(&(kind, name.clone())),
                };
                if let Some(first) = clash {
                    let mut diag = Diagnostic::new(
                        Code::DupName,
                        format!("`{name}` is already declared in {}", first.path),
                    )
                    .in_file(&origin.path);
                    diag.span = origin.span;
                    diags.push(diag);
                    continue;
                }
                match d {
                    Decl::Role(r) => {
                        cat.roles.insert(r.clone());
                    }
                    Decl::Action(a) => {
                        cat.actions.insert(a.name.clone(), a.clone());
                    }
                    Decl::Message(m) => {
                        cat.messages.insert(m.name.clone(), m.clone());
                    }
                    Decl::Pattern(p) => {
                        cat.patterns.insert(p.name.clone(), p.clone());
                    }
                    Decl::Scenario(s) => {
                        cat.scenarios.insert(s.name.clone(), s.clone());
                    }
                    Decl::Comment(_) => {}
                }
                cat.origins.insert((kind, name), origin);
            }
        }
        diags.extend(cat.unresolved());
        if diags.is_empty() {
            Ok(cat)
        } else {
            Err(CatalogError::Invalid(diags))
        }
    }

    fn locate(&self, kind: Kind, name: &str, diag: Diagnostic) -> Diagnostic {
        match self.origins.get(&(kind, name.to_string())) {
            Some(o) => {
                let mut d = diag.in_file(&o.path);
                d.span = o.span;
                d
            }
            None => diag,
        }
    }

    fn unresolved(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut missing = |kind: Kind, owner: &str, what: &str, target: &str| {
            let d = Diagnostic::new(Code::Unresolved, format!("`{owner}` refers to unknown {what} `{target}`"));
            out.push(self.locate(kind, owner, d));
        };
        for m in self.messages.values() {
            if !self.actions.contains_key(&m.action) {
                missing(Kind::Message, &m.name, "action", &m.action);
            }
            for r in [&m.sender, &m.receiver] {
                if !self.has_role(r) {
                    missing(Kind::Message, &m.name, "role", r);
                }
            }
        }
        for p in self.patterns.values() {
            for n in &p.messages {
                if !self.messages.contains_key(n) {
                    missing(Kind::Pattern, &p.name, "message", n);
                }
            }
        }
        for s in self.scenarios.values() {
            for n in &s.patterns {
                if !self.patterns.contains_key(n) {
                    missing(Kind::Scenario, &s.name, "pattern", n);
                }
            }
        }
        out
    }

    /// Implementation notes attached to patterns, by pattern name.
    pub fn annotations(&self) -> BTreeMap<&str, &str> {
        self.patterns
            .values()
            .filter(|p| !p.notes.is_empty())
            .map(|p| (p.name.as_str(), p.notes.as_str()))
            .collect()
    }

    /// Every check over every declaration, located at its declaration.
    pub fn check_all(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for a in self.actions.values() {
            for d in check::check_action(a).diagnostics {
                out.push(self.locate(Kind::Action, &a.name, d));
            }
        }
        for m in self.messages.values() {
            for d in check::check_message(m, self).diagnostics {
                out.push(self.locate(Kind::Message, &m.name, d));
            }
        }
        for p in self.patterns.values() {
            for d in check::check_pattern(p, self).diagnostics {
                out.push(self.locate(Kind::Pattern, &p.name, d));
            }
        }
        for s in self.scenarios.values() {
            for d in check::check_scenario(s, self).diagnostics {
                out.push(self.locate(Kind::Scenario, &s.name, d));
            }
        }
        out.sort_by(|a, b| (&a.path, a.span).cmp(&(&b.path, b.span)));
        out
    }

    /// Patterns carrying any of `tags`, by name; no tags means all.
    pub fn query(&self, tags: &[Tag]) -> Vec<&Pattern> {
        self.patterns
            .values()
            .filter(|p| tags.is_empty() || tags.iter().any(|t| p.tags.contains(t)))
            .collect()
    }

    pub fn steps(&self, pattern: &Pattern) -> Vec<Step> {
        pattern
            .messages
            .iter()
            .filter_map(|n| self.messages.get(n))
            .map(|m| Step { sender: m.sender.clone(), receiver: m.receiver.clone(), action: m.action.clone() })
            .collect()
    }

    pub fn diff(&self, a: &str, b: &str) -> Result<PatternDiff, CatalogError> {
        let pa = self.runnable(a)?;
        let pb = self.runnable(b)?;
        Ok(diff_steps(&self.steps(&pa), &self.steps(&pb)))
    }

    /// Concatenate named patterns and check the result at scenario scope.
    pub fn compose(&self, names: &[&str]) -> Result<Composed, CatalogError> {
        if names.is_empty() {
            return Err(CatalogError::Empty);
        }
        let parts = names
            .iter()
            .map(|n| self.patterns.get(*n).ok_or_else(|| CatalogError::UnknownPattern(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let pattern = compose_patterns(&parts);
        let report = self.check_composed(&pattern);
        Ok(Composed { pattern, report })
    }

    pub fn check_composed(&self, pattern: &Pattern) -> CheckReport {
        let msgs: Vec<&Message> = pattern.messages.iter().filter_map(|n| self.messages.get(n)).collect();
        check::check_sequence(&pattern.name, &msgs, self, true)
    }

    /// A pattern by name, or a scenario composed into one pattern that keeps
    /// the scenario's name.
    pub fn runnable(&self, name: &str) -> Result<Pattern, CatalogError> {
        if let Some(p) = self.patterns.get(name) {
            return Ok(p.clone());
        }
        let sc = self.scenarios.get(name).ok_or_else(|| CatalogError::UnknownPattern(name.to_string()))?;
        let names: Vec<&str> = sc.patterns.iter().map(String::as_str).collect();
        let mut composed = self.compose(&names)?.pattern;
        composed.name = sc.name.clone();
        Ok(composed)
    }

    pub fn export(&self) -> Export {
        Export {
            actions: self.actions.values().cloned().collect(),
            messages: self.messages.values().cloned().collect(),
            patterns: self.patterns.values().cloned().collect(),
            roles: self.roles.iter().cloned().collect(),
            scenarios: self.scenarios.values().cloned().collect(),
        }
    }

    pub fn export_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("catalog serializes")
    }

    /// Rebuild a catalog from its export. Origins are not part of the export.
    pub fn from_export(e: Export) -> Catalog {
        Catalog {
            roles: e.roles.into_iter().collect(),
            actions: e.actions.into_iter().map(|a| (a.name.clone(), a)).collect(),
            messages: e.messages.into_iter().map(|m| (m.name.clone(), m)).collect(),
            patterns: e.patterns.into_iter().map(|p| (p.name.clone(), p)).collect(),
            scenarios: e.scenarios.into_iter().map(|s| (s.name.clone(), s)).collect(),
            origins: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::Verdict;

    fn step(s: &str, r: &str, a: &str) -> Step {
        Step { sender: s.into(), receiver: r.into(), action: a.into() }
    }

    #[test]
    fn embedded_corpus_is_clean() {
        let cat = embedded();
        let diags = cat.check_all();
        assert!(diags.is_empty(), "{}", diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"));
    }

    #[test]
    fn empty_load_is_empty() {
        assert_eq!(load_sources(&[]).unwrap(), Catalog::default());
    }

    #[test]
    fn cross_file_duplicates_and_dangling_refs() {
        let a = "action annotate-sample(X, Y) := provide(Y: output.label, X: input.raw_data) <- map(X, Y);";
        let err = load_sources(&[("a.hai", a), ("b.hai", a)]).unwrap_err();
        let CatalogError::Invalid(d) = err else { panic!() };
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::DupName);
        assert_eq!(d[0].path.as_deref(), Some("b.hai"));

        let err = load_sources(&[("p.hai", "pattern p := [m];")]).unwrap_err();
        let CatalogError::Invalid(d) = err else { panic!() };
        assert_eq!(d[0].code, Code::Unresolved);
        assert_eq!(d[0].to_string(), "p.hai:1:9: error[E-UNRESOLVED]: `p` refers to unknown message `m`");
    }

    #[test]
    fn references_resolve_in_any_file_order() {
        let msgs = "message m := user -> model : a(X);\npattern p := [m] @hi;";
        let acts = "action a(X) := provide(X: input);";
        assert!(load_sources(&[("m.hai", msgs), ("a.hai", acts)]).is_ok());
    }

    #[test]
    fn lcs_diff() {
        let a = [step("user", "model", "ask"), step("model", "user", "x"), step("user", "model", "fix")];
        let b = [step("user", "model", "ask"), step("model", "user", "y"), step("user", "model", "fix")];
        let d = diff_steps(&a, &b);
        assert_eq!(d.shared.len(), 2);
        assert_eq!(d.only_in_a, [a[1].clone()]);
        assert_eq!(d.only_in_b, [b[1].clone()]);
        assert_eq!(diff_steps(&b, &a), d.swapped());
        assert!(diff_steps(&a, &a).is_empty());
    }

    #[test]
    fn direction_changes_are_paired() {
        let a = [step("user", "model", "show")];
        let b = [step("model", "user", "show")];
        let d = diff_steps(&a, &b);
        assert!(d.only_in_a.is_empty() && d.only_in_b.is_empty());
        assert_eq!(d.direction_changes.len(), 1);
    }

    #[test]
    fn compose_and_scenarios() {
        let cat = embedded();
        let c = cat.compose(&["class-selection", "new_class_sample", "sample-annotation"]).unwrap();
        assert_eq!(c.pattern.messages.len(), 6);
        assert_eq!(c.report.verdict, Verdict::Pass);
        assert!(matches!(cat.compose(&[]), Err(CatalogError::Empty)));
        assert!(matches!(cat.compose(&["nosuch"]), Err(CatalogError::UnknownPattern(_))));
        let half = cat.compose(&["class-selection"]).unwrap();
        assert_eq!(half.report.verdict, Verdict::Pass);
        assert_eq!(cat.runnable("D1").unwrap().messages, c.pattern.messages);
    }

    #[test]
    fn export_round_trips() {
        let cat = embedded();
        let json = cat.export_json();
        let back: Export = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cat.export());
        let rebuilt = Catalog::from_export(back);
        assert_eq!(rebuilt.actions, cat.actions);
        assert_eq!(rebuilt.patterns, cat.patterns);
        assert_eq!(rebuilt.export_json(), json);
    }

    #[test]
    fn unknown_tags_are_rejected() {
        assert!(parse_tags(&["xai", "hi"]).is_ok());
        assert!(matches!(parse_tags(&["nosuch"]), Err(CatalogError::UnknownTag(_))));
    }
}
