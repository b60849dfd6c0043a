//! Static checks: action typing, message arity, binding consistency and
//! dialogue coherence.

use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic, Severity};
use crate::dsl::{Decl, SourceFile};
use crate::model::{
    action_scope, type_compatible, ActionDef, Binding, Message, OpKind, Pattern, Scenario, TypeExpr,
    PREDECLARED_ROLES,
};

/// Name lookup used by the checks that need more than one declaration.
pub trait Corpus {
    fn action(&self, name: &str) -> Option<&ActionDef>;
    fn message(&self, name: &str) -> Option<&Message>;
    fn pattern(&self, _name: &str) -> Option<&Pattern> {
        None
    }
    fn has_role(&self, name: &str) -> bool {
        PREDECLARED_ROLES.contains(&name)
    }
}

impl Corpus for SourceFile {
    fn action(&self, name: &str) -> Option<&ActionDef> {
        self.decls.iter().find_map(|d| match d {
            Decl::Action(a) if a.name == name => Some(a),
            _ => None,
        })
    }

    fn message(&self, name: &str) -> Option<&Message> {
        self.decls.iter().find_map(|d| match d {
            Decl::Message(m) if m.name == name => Some(m),
            _ => None,
        })
    }

    fn pattern(&self, name: &str) -> Option<&Pattern> {
        self.decls.iter().find_map(|d| match d {
            Decl::Pattern(p) if p.name == name => Some(p),
            _ => None,
        })
    }

    fn has_role(&self, name: &str) -> bool {
        PREDECLARED_ROLES.contains(&name) || self.decls.iter().any(|d| matches!(d, Decl::Role(r) if r == name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub target: String,
    pub diagnostics: Vec<Diagnostic>,
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn new(target: impl Into<String>, diagnostics: Vec<Diagnostic>) -> Self {
        let verdict = if diagnostics.iter().any(|d| d.severity == Severity::Error) {
            Verdict::Fail
        } else if diagnostics.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Warn
        };
        CheckReport { target: target.into(), diagnostics, verdict }
    }

    pub fn has(&self, code: Code) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }

    pub fn codes(&self) -> Vec<Code> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }
}

pub fn check_action(def: &ActionDef) -> CheckReport {
    let mut diags: Vec<Diagnostic> =
        def.violations().into_iter().map(|(c, m)| Diagnostic::new(c, m)).collect();
    if let Ok(scope) = action_scope(def) {
        let ty = |v: &str| scope.iter().find(|(n, _)| n == v).map(|(_, t)| t);
        for op in &def.operations {
            match (op.kind, op.args.as_slice()) {
                (OpKind::Select, [a, b]) => {
                    let (Some(ta), Some(tb)) = (ty(a), ty(b)) else { continue };
                    match tb {
                        TypeExpr::List(elem) => {
                            if !type_compatible(ta, &TypeExpr::Base(elem.clone())) {
                                diags.push(Diagnostic::new(
                                    Code::SelectElem,
                                    format!("select({a},{b}) in `{}`: {b}'s elements are {elem}, {a} is {ta}", def.name),
                                ));
                            }
                        }
                        _ => diags.push(Diagnostic::new(
                            Code::SelectNonList,
                            format!("select({a},{b}) in `{}`: {b} is {tb}, not a list", def.name),
                        )),
                    }
                }
                (OpKind::Modify, [a, b]) => {
                    let (Some(ta), Some(tb)) = (ty(a), ty(b)) else { continue };
                    if !type_compatible(ta, tb) {
                        diags.push(Diagnostic::new(
                            Code::ModifyType,
                            format!("modify({a},{b}) in `{}`: {ta} and {tb} are incompatible", def.name),
                        ));
                    }
                }
                _ => {}
            }
        }
    }
    CheckReport::new(&def.name, diags)
}

fn message_diags(msg: &Message, corpus: &dyn Corpus) -> Vec<Diagnostic> {
    let mut diags: Vec<Diagnostic> =
        msg.violations().into_iter().map(|(c, m)| Diagnostic::new(c, m)).collect();
    for role in [&msg.sender, &msg.receiver] {
        if !corpus.has_role(role) {
            diags.push(Diagnostic::new(Code::Unresolved, format!("role `{role}` in `{}` is not declared", msg.name)));
        }
    }
    match corpus.action(&msg.action) {
        None => diags.push(Diagnostic::new(
            Code::UnknownAction,
            format!("`{}` sends unknown action `{}`", msg.name, msg.action),
        )),
        Some(a) if a.params.len() != msg.args.len() => diags.push(Diagnostic::new(
            Code::MsgArity,
            format!("`{}` passes {} argument(s) to `{}`, which takes {}", msg.name, msg.args.len(), a.name, a.params.len()),
        )),
        Some(_) => {}
    }
    diags
}

pub fn check_message(msg: &Message, corpus: &dyn Corpus) -> CheckReport {
    CheckReport::new(&msg.name, message_diags(msg, corpus))
}

/// A request waiting for a direction-reversed, type-compatible reply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    /// Index of the request in the message list.
    pub request: usize,
    /// Index of the message that discharged it.
    pub answered_by: Option<usize>,
}

/// Types a message conveys to its receiver: a provide conveys its head and
/// every scope variable, a request only what it references.
fn conveyed(action: &ActionDef) -> Vec<TypeExpr> {
    let p = &action.primitive;
    let mut out = Vec::new();
    let args: Vec<_> = if action.is_request() {
        p.refs.iter().collect()
    } else {
        out.push(p.head.ty.clone());
        std::iter::once(&p.head).chain(&p.refs).collect()
    };
    for a in args {
        out.extend(a.bindings().into_iter().map(|(_, t)| t));
    }
    out
}

/// Walk the messages and pair every request with the earliest later message
/// that answers it. A message discharges at most one obligation; a request
/// that answers another opens its own afterwards.
pub fn obligations(messages: &[&Message], corpus: &dyn Corpus) -> Vec<Obligation> {
    let mut out: Vec<Obligation> = Vec::new();
    for (i, m) in messages.iter().enumerate() {
        let Some(action) = corpus.action(&m.action) else { continue };
        let offered = conveyed(action);
        let open = out.iter_mut().find(|ob| {
            ob.answered_by.is_none() && {
                let req = messages[ob.request];
                let want = corpus.action(&req.action).map(ActionDef::head_type);
                req.sender == m.receiver
                    && req.receiver == m.sender
                    && want.is_some_and(|w| offered.iter().any(|t| type_compatible(w, t)))
            }
        });
        if let Some(ob) = open {
            ob.answered_by = Some(i);
        }
        if action.is_request() {
            out.push(Obligation { request: i, answered_by: None });
        }
    }
    out
}

/// Binding consistency over a message sequence. Returns the accumulated
/// binding and one E-BINDING per conflicting use.
pub fn bind_messages(messages: &[&Message], corpus: &dyn Corpus) -> (Binding, Vec<Diagnostic>) {
    let mut binding = Binding::default();
    let mut diags = Vec::new();
    for m in messages {
        let Some(action) = corpus.action(&m.action) else { continue };
        if action.params.len() != m.args.len() {
            continue;
        }
        for (var, param) in m.args.iter().zip(&action.params) {
            let Some(ty) = action.param_type(param) else { continue };
            if let Err(old) = binding.bind(var, &ty) {
                diags.push(Diagnostic::new(
                    Code::Binding,
                    format!("`{var}` is {old} but `{}` uses it as {ty}", m.name),
                ));
            }
        }
    }
    (binding, diags)
}

/// Binding and coherence over an already resolved message list. With
/// `scenario` set, unanswered requests are errors.
pub fn check_sequence(target: &str, messages: &[&Message], corpus: &dyn Corpus, scenario: bool) -> CheckReport {
    let (_, mut diags) = bind_messages(messages, corpus);
    for ob in obligations(messages, corpus) {
        if ob.answered_by.is_none() {
            let m = messages[ob.request];
            let code = if scenario { Code::UnansweredScenario } else { Code::Unanswered };
            diags.push(Diagnostic::new(
                code,
                format!("request `{}` ({} -> {}) is never answered in `{target}`", m.name, m.sender, m.receiver),
            ));
        }
    }
    CheckReport::new(target, diags)
}

fn resolve<'c>(names: &[String], corpus: &'c dyn Corpus, owner: &str, diags: &mut Vec<Diagnostic>) -> Vec<&'c Message> {
    names
        .iter()
        .filter_map(|n| {
            let m = corpus.message(n);
            if m.is_none() {
                diags.push(Diagnostic::new(Code::Unresolved, format!("`{owner}` refers to unknown message `{n}`")));
            }
            m
        })
        .collect()
}

pub fn check_pattern(pat: &Pattern, corpus: &dyn Corpus) -> CheckReport {
    let mut diags = Vec::new();
    if pat.messages.is_empty() {
        diags.push(Diagnostic::new(Code::EmptyPattern, format!("pattern `{}` has no messages", pat.name)));
    }
    let msgs = resolve(&pat.messages, corpus, &pat.name, &mut diags);
    diags.extend(check_sequence(&pat.name, &msgs, corpus, false).diagnostics);
    CheckReport::new(&pat.name, diags)
}

/// Message names of a scenario in order, or the patterns that do not resolve.
pub fn scenario_messages(sc: &Scenario, corpus: &dyn Corpus) -> Result<Vec<String>, Vec<String>> {
    let mut out = Vec::new();
    let mut missing = Vec::new();
    for p in &sc.patterns {
        match corpus.pattern(p) {
            Some(p) => out.extend(p.messages.iter().cloned()),
            None => missing.push(p.clone()),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(missing)
    }
}

/// Coherence over the concatenated patterns, unanswered requests escalated.
pub fn check_scenario(sc: &Scenario, corpus: &dyn Corpus) -> CheckReport {
    let mut diags = Vec::new();
    if sc.patterns.is_empty() {
        diags.push(Diagnostic::new(Code::EmptyPattern, format!("scenario `{}` has no patterns", sc.name)));
    }
    let names = match scenario_messages(sc, corpus) {
        Ok(n) => n,
        Err(missing) => {
            for p in missing {
                diags.push(Diagnostic::new(Code::Unresolved, format!("`{}` refers to unknown pattern `{p}`", sc.name)));
            }
            return CheckReport::new(&sc.name, diags);
        }
    };
    let msgs = resolve(&names, corpus, &sc.name, &mut diags);
    diags.extend(check_sequence(&sc.name, &msgs, corpus, true).diagnostics);
    CheckReport::new(&sc.name, diags)
}

/// Re-check concrete bindings (variable, payload type) recorded step by step,
/// e.g. from a trace. Conflicts are E-BINDING.
pub fn replay_bindings<'a, I>(steps: I) -> Vec<Diagnostic>
where
    I: IntoIterator<Item = &'a [(String, TypeExpr)]>,
{
    let mut binding = Binding::default();
    let mut diags = Vec::new();
    for (i, step) in steps.into_iter().enumerate() {
        for (var, ty) in step {
            if let Err(old) = binding.bind(var, ty) {
                diags.push(Diagnostic::new(Code::Binding, format!("step {}: `{var}` was {old}, now {ty}", i + 1)));
            }
        }
    }
    diags
}
