//! Agent implementations and the `.agents` fixture format.
//!
//! ```text
//! # one kind per role
//! agent user = scripted
//! agent model = stub
//! # scripted answers per message variable, used in order and then cycled
//! A2.Y = output.label happy
//! A2.Y = output.label sad
//! # compare two bound values: `accept` when equal, else `reject`
//! evaluation.F = feedback.eval match(P, Y)
//! # seed examples for a stub model
//! train model happy = (0, 0)
//! ```
//!
//! Kinds: `scripted`, `random`, `stub` (nearest-centroid model) and
//! `stub-rl A, B, ...` (a policy over the listed actions).

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::payload::{element_type, Payload, Value};
use super::stub::NearestCentroid;
use super::{AgentBehavior, Agents, Turn, Values};
use crate::model::{type_compatible, BaseType, Role, TypeExpr};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}:{line}: {message}")]
pub struct AgentsError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentKind {
    Scripted,
    Random,
    Stub,
    StubRl(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Literal(Payload),
    Match { ty: TypeExpr, left: String, right: String },
}

impl Rule {
    fn eval(&self, values: &Values) -> Result<Payload, String> {
        match self {
            Rule::Literal(p) => Ok(p.clone()),
            Rule::Match { ty, left, right } => {
                let get = |v: &str| values.get(v).ok_or_else(|| format!("match needs `{v}` bound"));
                let verdict = if get(left)?.value == get(right)?.value { "accept" } else { "reject" };
                Ok(Payload::symbol(ty.clone(), verdict))
            }
        }
    }
}

/// Scripted answers keyed by (message, variable).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Script {
    pub entries: BTreeMap<(String, String), Vec<Rule>>,
}

#[derive(Debug, Clone, Default)]
struct Cursor {
    script: Arc<Script>,
    used: BTreeMap<(String, String), usize>,
}

impl Cursor {
    fn next(&mut self, turn: &Turn<'_>, var: &str) -> Option<Result<Payload, String>> {
        let key = (turn.message.name.clone(), var.to_string());
        let rules = self.script.entries.get(&key)?;
        let n = self.used.entry(key).or_insert(0);
        let rule = &rules[*n % rules.len()];
        *n += 1;
        Some(rule.eval(turn.values))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgentsFixture {
    pub agents: BTreeMap<String, AgentKind>,
    pub script: Script,
    pub training: BTreeMap<String, Vec<(Vec<f64>, String)>>,
}

impl AgentsFixture {
    pub fn load(path: &Path) -> Result<AgentsFixture, AgentsError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| AgentsError { path: p.clone(), line: 0, message: e.to_string() })?;
        Self::parse_named(&p, &text)
    }

    pub fn parse(text: &str) -> Result<AgentsFixture, AgentsError> {
        Self::parse_named("<agents>", text)
    }

    pub fn parse_named(path: &str, text: &str) -> Result<AgentsFixture, AgentsError> {
        let mut fx = AgentsFixture::default();
        let mut train_lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |message: String| AgentsError { path: path.to_string(), line: i + 1, message };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected `=`".into()))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if let Some(role) = lhs.strip_prefix("agent ") {
                let role = role.trim().to_string();
                let kind = match rhs.split_once(char::is_whitespace) {
                    None if rhs == "scripted" => AgentKind::Scripted,
                    None if rhs == "random" => AgentKind::Random,
                    None if rhs == "stub" => AgentKind::Stub,
                    Some(("stub-rl", acts)) => {
                        let acts: Vec<String> = acts.split(',').map(|a| a.trim().to_string()).collect();
                        if acts.iter().any(String::is_empty) {
                            return Err(err("empty action name".into()));
                        }
                        AgentKind::StubRl(acts)
                    }
                    _ => return Err(err(format!("unknown agent kind `{rhs}`"))),
                };
                if fx.agents.insert(role.clone(), kind).is_some() {
                    return Err(err(format!("role `{role}` assigned twice")));
                }
            } else if let Some(rest) = lhs.strip_prefix("train ") {
                let (role, label) = rest.trim().split_once(char::is_whitespace).ok_or_else(|| err("expected `train ROLE LABEL`".into()))?;
                let x = Payload::parse(&format!("input {rhs}")).map_err(err)?;
                let Value::Vector(x) = x.value else {
                    return Err(err("training input must be a vector".into()));
                };
                fx.training.entry(role.to_string()).or_default().push((x, label.trim().to_string()));
                train_lines.push((i + 1, role.to_string()));
            } else {
                let (msg, var) = lhs.split_once('.').ok_or_else(|| err("expected `MESSAGE.VAR`".into()))?;
                let rule = parse_rule(rhs).map_err(err)?;
                fx.script.entries.entry((msg.to_string(), var.to_string())).or_default().push(rule);
            }
        }
        for (line, role) in train_lines {
            if fx.agents.get(&role) != Some(&AgentKind::Stub) {
                return Err(AgentsError { path: path.to_string(), line, message: format!("`{role}` is not a stub agent") });
            }
        }
        Ok(fx)
    }

    /// Fresh agents for every declared role.
    pub fn build(&self) -> Agents {
        let script = Arc::new(self.script.clone());
        let cursor = || Cursor { script: script.clone(), used: BTreeMap::new() };
        self.agents
            .iter()
            .map(|(role, kind)| {
                let agent: Box<dyn AgentBehavior> = match kind {
                    AgentKind::Scripted => Box::new(ScriptedAgent { cursor: cursor() }),
                    AgentKind::Random => Box::new(RandomAgent { cursor: cursor(), rng: ChaCha8Rng::seed_from_u64(0) }),
                    AgentKind::Stub => Box::new(StubModelAgent {
                        cursor: cursor(),
                        model: NearestCentroid::new(self.training.get(role).cloned().unwrap_or_default()),
                    }),
                    AgentKind::StubRl(actions) => Box::new(StubRlAgent {
                        cursor: cursor(),
                        actions: actions.clone(),
                        rng: ChaCha8Rng::seed_from_u64(0),
                    }),
                };
                (role.clone(), agent)
            })
            .collect()
    }
}

fn parse_rule(rhs: &str) -> Result<Rule, String> {
    if let Some((ty, call)) = rhs.split_once(" match(") {
        let inner = call.trim().strip_suffix(')').ok_or("unclosed match(")?;
        let (left, right) = inner.split_once(',').ok_or("match takes two variables")?;
        return Ok(Rule::Match { ty: ty.trim().parse()?, left: left.trim().into(), right: right.trim().into() });
    }
    Payload::parse(rhs).map(Rule::Literal)
}

fn label_type() -> TypeExpr {
    TypeExpr::base(Role::Output, &["label"])
}

fn has_subtype(ty: &TypeExpr, role: Role, sub: &str) -> bool {
    type_compatible(&TypeExpr::base(role, &[sub]), ty)
}

/// First bound input vector among the turn's arguments.
fn input_vector<'v>(turn: &Turn<'_>, values: &'v Values) -> Option<&'v [f64]> {
    turn.slots.iter().find_map(|(v, _)| {
        let p = values.get(v)?;
        match (&p.ty, &p.value) {
            (TypeExpr::Base(BaseType { role: Role::Input, .. }), Value::Vector(x)) => Some(x.as_slice()),
            _ => None,
        }
    })
}

/// Answers only from the script.
pub struct ScriptedAgent {
    cursor: Cursor,
}

impl AgentBehavior for ScriptedAgent {
    fn produce(&mut self, turn: &Turn<'_>) -> Result<Values, String> {
        let mut out = Values::new();
        for (var, _) in turn.needed {
            if let Some(p) = self.cursor.next(turn, var) {
                out.insert(var.clone(), p?);
            }
        }
        Ok(out)
    }
}

/// Scripted where possible, otherwise seeded random values of the right type.
pub struct RandomAgent {
    cursor: Cursor,
    rng: ChaCha8Rng,
}

impl RandomAgent {
    fn base_value(&mut self, ty: &TypeExpr, values: &Values) -> Value {
        if has_subtype(ty, Role::Output, "label") {
            // prefer labels offered earlier in the run
            let offered: Vec<&str> = values
                .values()
                .filter_map(|p| match &p.value {
                    Value::List(items) if type_compatible(&label_type(), &element_type(&p.ty)) => Some(items),
                    _ => None,
                })
                .flatten()
                .filter_map(Payload::as_symbol)
                .collect();
            return match offered.choose(&mut self.rng) {
                Some(s) => Value::Symbol(s.to_string()),
                None => Value::Symbol(format!("label-{}", self.rng.gen_range(0..3))),
            };
        }
        if has_subtype(ty, Role::Feedback, "eval") {
            return Value::Symbol(["accept", "reject"].choose(&mut self.rng).expect("non-empty").to_string());
        }
        for sub in ["action", "item"] {
            if has_subtype(ty, Role::Output, sub) {
                return Value::Symbol(format!("{sub}-{}", self.rng.gen_range(0..4)));
            }
        }
        let mut coord = || (self.rng.gen_range(0..20) as f64) / 2.0;
        Value::Vector(vec![coord(), coord()])
    }

    fn payload(&mut self, ty: &TypeExpr, values: &Values) -> Result<Payload, String> {
        let value = match ty {
            TypeExpr::List(_) => {
                let elem = element_type(ty);
                let items = (0..3)
                    .map(|_| {
                        let v = self.base_value(&elem, values);
                        Payload::new(elem.clone(), v)
                    })
                    .collect::<Result<_, _>>()?;
                Value::List(items)
            }
            _ => self.base_value(ty, values),
        };
        Payload::new(ty.clone(), value)
    }
}

impl AgentBehavior for RandomAgent {
    fn start(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn produce(&mut self, turn: &Turn<'_>) -> Result<Values, String> {
        let mut out = Values::new();
        for (var, ty) in turn.needed {
            let p = match self.cursor.next(turn, var) {
                Some(p) => p?,
                None => self.payload(ty, turn.values)?,
            };
            out.insert(var.clone(), p);
        }
        Ok(out)
    }
}

/// A model that predicts labels by nearest centroid and learns from every
/// label it is given for a bound input vector.
pub struct StubModelAgent {
    cursor: Cursor,
    model: NearestCentroid,
}

impl StubModelAgent {
    pub fn new(model: NearestCentroid) -> Self {
        StubModelAgent { cursor: Cursor::default(), model }
    }

    pub fn model(&self) -> &NearestCentroid {
        &self.model
    }
}

impl AgentBehavior for StubModelAgent {
    fn produce(&mut self, turn: &Turn<'_>) -> Result<Values, String> {
        let mut out = Values::new();
        for (var, ty) in turn.needed {
            if let Some(p) = self.cursor.next(turn, var) {
                out.insert(var.clone(), p?);
                continue;
            }
            if ty.is_group() || !has_subtype(ty, Role::Output, "label") || matches!(ty, TypeExpr::List(_)) {
                continue;
            }
            if let Some(x) = input_vector(turn, turn.values) {
                let label = self.model.classify(x).map_err(|e| e.to_string())?;
                out.insert(var.clone(), Payload::symbol(ty.clone(), &label));
            }
        }
        Ok(out)
    }

    fn on_receive(&mut self, turn: &Turn<'_>) {
        if turn.action.is_request() || !type_compatible(&label_type(), turn.action.head_type()) {
            return;
        }
        let Some(label) = turn.head_arg().and_then(|h| turn.values.get(h)).and_then(Payload::as_symbol) else {
            return;
        };
        if let Some(x) = input_vector(turn, turn.values) {
            self.model.learn(x.to_vec(), label);
        }
    }

    fn learned(&self) -> Option<&NearestCentroid> {
        Some(&self.model)
    }
}

/// An agent that observes random 2-D states and acts by a fixed policy:
/// the action indexed by the state's largest coordinate.
pub struct StubRlAgent {
    cursor: Cursor,
    actions: Vec<String>,
    rng: ChaCha8Rng,
}

impl StubRlAgent {
    pub fn policy(&self, state: &[f64]) -> &str {
        let best = state
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
            .0;
        &self.actions[best % self.actions.len()]
    }
}

impl AgentBehavior for StubRlAgent {
    fn start(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn produce(&mut self, turn: &Turn<'_>) -> Result<Values, String> {
        let mut out = Values::new();
        let mut state: Option<Vec<f64>> = input_vector(turn, turn.values).map(<[f64]>::to_vec);
        for (var, ty) in turn.needed {
            if let Some(p) = self.cursor.next(turn, var) {
                out.insert(var.clone(), p?);
            } else if has_subtype(ty, Role::Input, "state") && matches!(ty, TypeExpr::Base(_)) {
                let s = vec![self.rng.gen_range(0..10) as f64, self.rng.gen_range(0..10) as f64];
                state = Some(s.clone());
                out.insert(var.clone(), Payload::vector(ty.clone(), &s));
            }
        }
        for (var, ty) in turn.needed {
            if out.contains_key(var) || !has_subtype(ty, Role::Output, "action") || !matches!(ty, TypeExpr::Base(_)) {
                continue;
            }
            let act = match &state {
                Some(s) => self.policy(s).to_string(),
                None => self.actions.choose(&mut self.rng).expect("non-empty").clone(),
            };
            out.insert(var.clone(), Payload::symbol(ty.clone(), &act));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_line_kinds() {
        let fx = AgentsFixture::parse(
            "# demo\nagent user = scripted\nagent model = stub\nagent robot = stub-rl left, right\n\
             A2.Y = output.label happy\nA2.Y = output.label sad\ne.F = feedback.eval match(P, Y)\ntrain model a = (0, 1)\n",
        )
        .unwrap();
        assert_eq!(fx.agents.len(), 3);
        assert_eq!(fx.agents["robot"], AgentKind::StubRl(vec!["left".into(), "right".into()]));
        assert_eq!(fx.script.entries[&("A2".into(), "Y".into())].len(), 2);
        assert!(matches!(fx.script.entries[&("e".into(), "F".into())][0], Rule::Match { .. }));
        assert_eq!(fx.training["model"], vec![(vec![0.0, 1.0], "a".to_string())]);
        assert_eq!(fx.build().len(), 3);
    }

    #[test]
    fn reports_line_numbers() {
        let e = AgentsFixture::parse("agent user = scripted\n\nA1.L = output.label [a]\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(AgentsFixture::parse("agent user = wizard").is_err());
        assert!(AgentsFixture::parse("agent user = scripted\nagent user = stub").is_err());
        assert!(AgentsFixture::parse("agent user = scripted\ntrain user a = (1)").is_err());
    }

    #[test]
    fn match_compares_values() {
        let r = parse_rule("feedback.eval match(P, Y)").unwrap();
        let mut v = Values::new();
        v.insert("P".into(), Payload::parse("output.label a").unwrap());
        v.insert("Y".into(), Payload::parse("output.label b").unwrap());
        assert_eq!(r.eval(&v).unwrap().as_symbol(), Some("reject"));
        v.insert("Y".into(), Payload::parse("output.label a").unwrap());
        assert_eq!(r.eval(&v).unwrap().as_symbol(), Some("accept"));
        v.remove("Y");
        assert!(r.eval(&v).is_err());
    }
}
