//! Deterministic enactment of patterns between agents.
//!
//! The engine walks a pattern's messages in order. For each one the sender
//! produces payloads for the variables it must bind, the engine checks them
//! against the template, and the receiver is notified. The first violation
//! aborts the run.

pub mod agents;
pub mod payload;
pub mod stub;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::compose_patterns;
use crate::check::{self, CheckReport, Corpus};
use crate::diag::Diagnostic;
use crate::model::{type_compatible, ActionDef, Message, Pattern, TypeExpr};

pub use agents::{AgentKind, AgentsError, AgentsFixture, RandomAgent, ScriptedAgent, StubModelAgent, StubRlAgent};
pub use payload::{Payload, Value};
pub use stub::{ClassifyError, NearestCentroid};

/// Pattern variables bound so far in one repetition.
pub type Values = BTreeMap<String, Payload>;

pub type Agents = BTreeMap<String, Box<dyn AgentBehavior>>;

/// What an agent sees when asked to speak or when a message arrives.
#[derive(Debug, Clone, Copy)]
pub struct Turn<'a> {
    pub step: usize,
    pub repetition: usize,
    pub message: &'a Message,
    pub action: &'a ActionDef,
    /// Every message argument with its template type, in argument order.
    pub slots: &'a [(String, TypeExpr)],
    /// The unbound arguments the sender must produce. A request's head is
    /// left open for the answer.
    pub needed: &'a [(String, TypeExpr)],
    pub values: &'a Values,
}

impl Turn<'_> {
    /// The message argument bound to the action's head, if it is not a group.
    pub fn head_arg(&self) -> Option<&str> {
        let head = self.action.primitive.head.var.as_deref()?;
        let i = self.action.params.iter().position(|p| p == head)?;
        self.message.args.get(i).map(String::as_str)
    }
}

pub trait AgentBehavior {
    /// Called before each repetition with a seed derived from the run seed.
    fn start(&mut self, _seed: u64) {}

    /// Payloads for `turn.needed`. Anything missing is a violation.
    fn produce(&mut self, turn: &Turn<'_>) -> Result<Values, String>;

    /// Called on the receiver after a conformant step, with the new values.
    fn on_receive(&mut self, _turn: &Turn<'_>) {}

    /// The classifier state, for agents that learn.
    fn learned(&self) -> Option<&NearestCentroid> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Violation {
    #[serde(rename = "V-TYPE")]
    Type,
    #[serde(rename = "V-REBIND")]
    Rebind,
    #[serde(rename = "V-MISSING")]
    Missing,
    #[serde(rename = "V-AGENT")]
    Agent,
}

impl Violation {
    pub fn as_str(self) -> &'static str {
        match self {
            Violation::Type => "V-TYPE",
            Violation::Rebind => "V-REBIND",
            Violation::Missing => "V-MISSING",
            Violation::Agent => "V-AGENT",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepVerdict {
    Conformant,
    Violation { code: Violation, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub message: String,
    pub sender: String,
    pub receiver: String,
    pub action: String,
    pub bindings: Values,
    pub verdict: StepVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Completed,
    Aborted { step: usize, code: Violation },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub run: String,
    pub pattern: String,
    pub repetition: usize,
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
}

/// One line of a `.jsonl` trace: a step, or the end of a repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum Record {
    Step {
        run: String,
        pattern: String,
        repetition: usize,
        step: usize,
        message: String,
        sender: String,
        receiver: String,
        action: String,
        bindings: Values,
        verdict: StepVerdict,
    },
    End {
        run: String,
        pattern: String,
        repetition: usize,
        outcome: Outcome,
    },
}

impl Trace {
    pub fn completed(&self) -> bool {
        self.outcome == Outcome::Completed
    }

    pub fn records(&self) -> Vec<Record> {
        let mut out: Vec<Record> = self
            .steps
            .iter()
            .map(|s| Record::Step {
                run: self.run.clone(),
                pattern: self.pattern.clone(),
                repetition: self.repetition,
                step: s.step,
                message: s.message.clone(),
                sender: s.sender.clone(),
                receiver: s.receiver.clone(),
                action: s.action.clone(),
                bindings: s.bindings.clone(),
                verdict: s.verdict.clone(),
            })
            .collect();
        out.push(Record::End {
            run: self.run.clone(),
            pattern: self.pattern.clone(),
            repetition: self.repetition,
            outcome: self.outcome,
        });
        out
    }

    /// Re-check the recorded bindings with the pattern binding rules.
    pub fn replay(&self) -> Vec<Diagnostic> {
        let steps: Vec<Vec<(String, TypeExpr)>> = self
            .steps
            .iter()
            .map(|s| s.bindings.iter().map(|(v, p)| (v.clone(), p.ty.clone())).collect())
            .collect();
        check::replay_bindings(steps.iter().map(Vec::as_slice))
    }
}

/// Serialize traces as JSON lines, one record per line.
pub fn to_jsonl(traces: &[Trace]) -> String {
    let mut out = String::new();
    for t in traces {
        for r in t.records() {
            out.push_str(&serde_json::to_string(&r).expect("record serializes"));
            out.push('\n');
        }
    }
    out
}

/// Rebuild traces from [`to_jsonl`] output.
pub fn from_jsonl(text: &str) -> Result<Vec<Trace>, String> {
    let mut traces = Vec::new();
    let mut steps = Vec::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let rec: Record = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", n + 1))?;
        match rec {
            Record::Step { step, message, sender, receiver, action, bindings, verdict, .. } => {
                steps.push(TraceStep { step, message, sender, receiver, action, bindings, verdict })
            }
            Record::End { run, pattern, repetition, outcome } => traces.push(Trace {
                run,
                pattern,
                repetition,
                steps: std::mem::take(&mut steps),
                outcome,
            }),
        }
    }
    if !steps.is_empty() {
        return Err("trace ends without an end record".into());
    }
    Ok(traces)
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("`{}` does not pass checking", .0.target)]
    Check(CheckReport),
    #[error("no agent for role `{0}`")]
    MissingAgent(String),
}

/// Seed for one agent in one repetition.
fn agent_seed(seed: u64, role: &str, repetition: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in role.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h ^ (repetition as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

struct Plan<'c> {
    name: String,
    steps: Vec<(&'c Message, &'c ActionDef, Vec<(String, TypeExpr)>)>,
}

fn plan<'c>(corpus: &'c dyn Corpus, name: &str, messages: &[String], agents: &Agents) -> Result<Plan<'c>, RunError> {
    let mut steps = Vec::new();
    for n in messages {
        // callers check first, so every name resolves
        let m = corpus.message(n).expect("checked message");
        let a = corpus.action(&m.action).expect("checked action");
        for role in [&m.sender, &m.receiver] {
            if !agents.contains_key(role.as_str()) {
                return Err(RunError::MissingAgent(role.clone()));
            }
        }
        let slots = m
            .args
            .iter()
            .zip(&a.params)
            .map(|(arg, p)| (arg.clone(), a.param_type(p).expect("declared param")))
            .collect();
        steps.push((m, a, slots));
    }
    Ok(Plan { name: name.to_string(), steps })
}

fn execute(plan: &Plan<'_>, agents: &mut Agents, seed: u64, repetition: usize) -> Trace {
    for (role, agent) in agents.iter_mut() {
        agent.start(agent_seed(seed, role, repetition));
    }
    let mut values = Values::new();
    let mut steps = Vec::new();
    for (i, (msg, action, slots)) in plan.steps.iter().enumerate() {
        let step = i + 1;
        let head: Vec<String> = if action.is_request() { action.head_vars() } else { Vec::new() };
        let mut needed: Vec<(String, TypeExpr)> = Vec::new();
        for ((arg, ty), param) in slots.iter().zip(&action.params) {
            if !values.contains_key(arg) && !head.contains(param) && !needed.iter().any(|(v, _)| v == arg) {
                needed.push((arg.clone(), ty.clone()));
            }
        }
        let turn = Turn { step, repetition, message: msg, action, slots, needed: &needed, values: &values };
        let sender = agents.get_mut(msg.sender.as_str()).expect("planned role");
        let result = sender.produce(&turn).map_err(|e| (Violation::Agent, e)).and_then(|produced| {
            let mut next = values.clone();
            for (var, p) in produced {
                if !slots.iter().any(|(v, _)| *v == var) {
                    return Err((Violation::Agent, format!("`{var}` is not an argument of `{}`", msg.name)));
                }
                match next.get(&var) {
                    Some(old) if *old != p => {
                        return Err((Violation::Rebind, format!("`{var}` is bound to {old}, got {p}")));
                    }
                    Some(_) => {}
                    None => {
                        next.insert(var, p);
                    }
                }
            }
            for (var, ty) in slots {
                if let Some(p) = next.get(var) {
                    if !type_compatible(ty, &p.ty) {
                        return Err((Violation::Type, format!("`{var}` expects {ty}, got {}", p.ty)));
                    }
                }
            }
            if let Some((var, ty)) = needed.iter().find(|(v, _)| !next.contains_key(v)) {
                return Err((Violation::Missing, format!("`{}` produced no {ty} for `{var}`", msg.sender)));
            }
            Ok(next)
        });
        let record = |bindings: Values, verdict| TraceStep {
            step,
            message: msg.name.clone(),
            sender: msg.sender.clone(),
            receiver: msg.receiver.clone(),
            action: msg.action.clone(),
            bindings,
            verdict,
        };
        match result {
            Ok(next) => {
                values = next;
                steps.push(record(values.clone(), StepVerdict::Conformant));
                let turn = Turn { step, repetition, message: msg, action, slots, needed: &needed, values: &values };
                agents.get_mut(msg.receiver.as_str()).expect("planned role").on_receive(&turn);
            }
            Err((code, detail)) => {
                steps.push(record(values.clone(), StepVerdict::Violation { code, detail }));
                return Trace {
                    run: format!("{}/{seed}/{repetition}", plan.name),
                    pattern: plan.name.clone(),
                    repetition,
                    steps,
                    outcome: Outcome::Aborted { step, code },
                };
            }
        }
    }
    Trace {
        run: format!("{}/{seed}/{repetition}", plan.name),
        pattern: plan.name.clone(),
        repetition,
        steps,
        outcome: Outcome::Completed,
    }
}

/// Enact one pattern once.
pub fn run(corpus: &dyn Corpus, pattern: &Pattern, agents: &mut Agents, seed: u64) -> Result<Trace, RunError> {
    let report = check::check_pattern(pattern, corpus);
    if report.verdict == check::Verdict::Fail {
        return Err(RunError::Check(report));
    }
    let plan = plan(corpus, &pattern.name, &pattern.messages, agents)?;
    Ok(execute(&plan, agents, seed, 0))
}

/// Enact one pattern `repeat` times under pattern-level checking.
pub fn run_repeated(corpus: &dyn Corpus, pattern: &Pattern, agents: &mut Agents, seed: u64, repeat: usize) -> Result<Vec<Trace>, RunError> {
    let report = check::check_pattern(pattern, corpus);
    if report.verdict == check::Verdict::Fail {
        return Err(RunError::Check(report));
    }
    let plan = plan(corpus, &pattern.name, &pattern.messages, agents)?;
    Ok(series(&plan, agents, seed, repeat))
}

fn series(plan: &Plan<'_>, agents: &mut Agents, seed: u64, repeat: usize) -> Vec<Trace> {
    let mut traces = Vec::new();
    for rep in 0..repeat {
        let t = execute(plan, agents, seed, rep);
        let done = t.completed();
        traces.push(t);
        if !done {
            break;
        }
    }
    traces
}

/// Enact the concatenation of `patterns` `repeat` times. Values reset between
/// repetitions while agents keep their state; an abort ends the series.
pub fn run_scenario(
    corpus: &dyn Corpus,
    name: &str,
    patterns: &[&Pattern],
    agents: &mut Agents,
    seed: u64,
    repeat: usize,
) -> Result<Vec<Trace>, RunError> {
    let composed = compose_patterns(patterns);
    let msgs: Vec<&Message> = composed.messages.iter().filter_map(|n| corpus.message(n)).collect();
    let mut report = check::check_sequence(name, &msgs, corpus, true);
    if msgs.len() != composed.messages.len() {
        report.verdict = check::Verdict::Fail;
    }
    if report.verdict == check::Verdict::Fail {
        return Err(RunError::Check(report));
    }
    let plan = plan(corpus, name, &composed.messages, agents)?;
    Ok(series(&plan, agents, seed, repeat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    const SRC: &str = r#"
action req-sample_class(X, Y) := request(Y: output.label, X: input.raw_data|fvector) <- map(X, Y);
action annotate-sample(X, Y) := provide(Y: output.label, X: input.raw_data|fvector) <- map(X, Y);
message A5 := model -> user : req-sample_class(X, Y);
message A6 := user -> model : annotate-sample(X, Y);
pattern sample-annotation := [A5, A6] @hitl;
"#;

    struct Fixed(Values);

    impl AgentBehavior for Fixed {
        fn produce(&mut self, turn: &Turn<'_>) -> Result<Values, String> {
            Ok(turn.needed.iter().filter_map(|(v, _)| self.0.get(v).map(|p| (v.clone(), p.clone()))).collect())
        }
    }

    fn fixed(pairs: &[(&str, &str)]) -> Box<dyn AgentBehavior> {
        Box::new(Fixed(pairs.iter().map(|(v, lit)| (v.to_string(), Payload::parse(lit).unwrap())).collect()))
    }

    fn setup(model: &[(&str, &str)], user: &[(&str, &str)]) -> (crate::dsl::SourceFile, Agents) {
        let f = parse(SRC).unwrap();
        let mut agents = Agents::new();
        agents.insert("model".into(), fixed(model));
        agents.insert("user".into(), fixed(user));
        (f, agents)
    }

    fn pattern(f: &crate::dsl::SourceFile) -> Pattern {
        f.pattern("sample-annotation").unwrap().clone()
    }

    #[test]
    fn scripted_annotation_completes() {
        let (f, mut agents) = setup(&[("X", "input.raw_data (1, 2)")], &[("Y", "output.label happy")]);
        let t = run(&f, &pattern(&f), &mut agents, 7).unwrap();
        assert_eq!(t.outcome, Outcome::Completed);
        assert_eq!(t.steps.len(), 2);
        assert_eq!(t.steps[1].bindings["Y"], Payload::parse("output.label happy").unwrap());
        // the request leaves its head open
        assert!(!t.steps[0].bindings.contains_key("Y"));
        assert!(t.replay().is_empty());
    }

    #[test]
    fn wrong_payload_type_aborts() {
        let (f, mut agents) = setup(&[("X", "output.label happy")], &[]);
        let t = run(&f, &pattern(&f), &mut agents, 0).unwrap();
        assert_eq!(t.outcome, Outcome::Aborted { step: 1, code: Violation::Type });
        assert_eq!(t.steps.len(), 1);
    }

    #[test]
    fn silence_is_missing() {
        let (f, mut agents) = setup(&[("X", "input.raw_data #a")], &[]);
        let t = run(&f, &pattern(&f), &mut agents, 0).unwrap();
        assert_eq!(t.outcome, Outcome::Aborted { step: 2, code: Violation::Missing });
    }

    #[test]
    fn missing_role_is_an_error() {
        let (f, mut agents) = setup(&[], &[]);
        agents.remove("user");
        assert!(matches!(run(&f, &pattern(&f), &mut agents, 0), Err(RunError::MissingAgent(r)) if r == "user"));
    }

    #[test]
    fn repeat_zero_is_empty_and_jsonl_round_trips() {
        let (f, mut agents) = setup(&[("X", "input.raw_data (1, 2)")], &[("Y", "output.label happy")]);
        let p = pattern(&f);
        assert!(run_scenario(&f, "s", &[&p], &mut agents, 1, 0).unwrap().is_empty());
        let traces = run_scenario(&f, "s", &[&p, &p], &mut agents, 1, 2).unwrap();
        assert_eq!(traces.len(), 2);
        let text = to_jsonl(&traces);
        assert_eq!(text.lines().count(), 2 * (4 + 1));
        assert_eq!(from_jsonl(&text).unwrap(), traces);
    }
}
