//! Value types of the interaction calculus: types, primitives, actions,
//! messages and patterns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diag::Code;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
    Feedback,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Input, Role::Output, Role::Feedback];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Input => "input",
            Role::Output => "output",
            Role::Feedback => "feedback",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Role> {
        match s {
            "input" => Some(Role::Input),
            "output" => Some(Role::Output),
            "feedback" => Some(Role::Feedback),
            _ => None,
        }
    }
}

/// `role.sub1|sub2`; no subtypes is a wildcard.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseType {
    pub role: Role,
    pub subtypes: Vec<String>,
}

impl BaseType {
    pub fn new(role: Role, subtypes: &[&str]) -> Self {
        BaseType {
            role,
            subtypes: subtypes.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn wildcard(role: Role) -> Self {
        BaseType { role, subtypes: Vec::new() }
    }

    pub fn compatible(&self, other: &BaseType) -> bool {
        self.role == other.role
            && (self.subtypes.is_empty()
                || other.subtypes.is_empty()
                || self.subtypes.iter().any(|s| other.subtypes.contains(s)))
    }

    fn narrow(&self, other: &BaseType) -> Option<BaseType> {
        if !self.compatible(other) {
            return None;
        }
        let subtypes = if self.subtypes.is_empty() {
            other.subtypes.clone()
        } else if other.subtypes.is_empty() {
            self.subtypes.clone()
        } else {
            self.subtypes
                .iter()
                .filter(|s| other.subtypes.contains(s))
                .cloned()
                .collect()
        };
        Some(BaseType { role: self.role, subtypes })
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.role.as_str())?;
        if !self.subtypes.is_empty() {
            write!(f, ".{}", self.subtypes.join("|"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Base(BaseType),
    List(BaseType),
    Group(Vec<(String, TypeExpr)>),
}

impl TypeExpr {
    pub fn base(role: Role, subtypes: &[&str]) -> Self {
        TypeExpr::Base(BaseType::new(role, subtypes))
    }

    pub fn list(role: Role, subtypes: &[&str]) -> Self {
        TypeExpr::List(BaseType::new(role, subtypes))
    }

    pub fn is_group(&self) -> bool {
        matches!(self, TypeExpr::Group(_))
    }

    /// Structural well-formedness; reports the first problem.
    pub fn validate(&self) -> Result<(), (Code, String)> {
        fn base_ok(b: &BaseType) -> Result<(), (Code, String)> {
            let mut seen = BTreeSet::new();
            for s in &b.subtypes {
                if s.is_empty() {
                    return Err((Code::Type, "empty subtype name".into()));
                }
                if !seen.insert(s) {
                    return Err((Code::Type, format!("subtype `{s}` repeated in union")));
                }
            }
            Ok(())
        }
        match self {
            TypeExpr::Base(b) | TypeExpr::List(b) => base_ok(b),
            TypeExpr::Group(members) => {
                if members.len() < 2 {
                    return Err((Code::Arity, "group needs at least two members".into()));
                }
                let mut seen = BTreeSet::new();
                for (v, t) in members {
                    if !seen.insert(v) {
                        return Err((Code::DupVar, format!("group member `{v}` repeated")));
                    }
                    if t.is_group() {
                        return Err((Code::Type, "groups cannot nest".into()));
                    }
                    t.validate()?;
                }
                Ok(())
            }
        }
    }

    /// The most specific type both sides agree on, or `None` when incompatible.
    pub fn narrow(&self, other: &TypeExpr) -> Option<TypeExpr> {
        match (self, other) {
            (TypeExpr::Base(a), TypeExpr::Base(b)) => a.narrow(b).map(TypeExpr::Base),
            (TypeExpr::List(a), TypeExpr::List(b)) => a.narrow(b).map(TypeExpr::List),
            (TypeExpr::Group(a), TypeExpr::Group(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|((v, x), (_, y))| x.narrow(y).map(|t| (v.clone(), t)))
                .collect::<Option<Vec<_>>>()
                .map(TypeExpr::Group),
            _ => None,
        }
    }
}

/// Kinds match; bases agree on role and overlap on subtypes (empty is a
/// wildcard); lists compare elements; groups compare pointwise.
pub fn type_compatible(expected: &TypeExpr, actual: &TypeExpr) -> bool {
    match (expected, actual) {
        (TypeExpr::Base(a), TypeExpr::Base(b)) | (TypeExpr::List(a), TypeExpr::List(b)) => {
            a.compatible(b)
        }
        (TypeExpr::Group(a), TypeExpr::Group(b)) => {
            a.len() == b.len() && a.iter().zip(b).all(|((_, x), (_, y))| type_compatible(x, y))
        }
        _ => false,
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Base(b) => write!(f, "{b}"),
            TypeExpr::List(b) => write!(f, "[{b}]"),
            TypeExpr::Group(members) => {
                f.write_str("[")?;
                for (i, (v, t)) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}: {t}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl FromStr for TypeExpr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::dsl::parse_type(s).map_err(|d| {
            d.into_iter()
                .map(|d| d.message)
                .collect::<Vec<_>>()
                .join("; ")
        })
    }
}

impl Serialize for TypeExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TypeExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveKind {
    Provide,
    Request,
}

impl PrimitiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PrimitiveKind::Provide => "provide",
            PrimitiveKind::Request => "request",
        }
    }
}

/// One primitive argument: `X: type`, or an anonymous group `[X: t, Y: u]`
/// (then `var` is `None` and `ty` is a `Group`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arg {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub var: Option<String>,
    #[serde(rename = "type")]
    pub ty: TypeExpr,
}

impl Arg {
    pub fn named(var: &str, ty: TypeExpr) -> Self {
        Arg { var: Some(var.to_string()), ty }
    }

    pub fn group(members: Vec<(&str, TypeExpr)>) -> Self {
        Arg {
            var: None,
            ty: TypeExpr::Group(members.into_iter().map(|(v, t)| (v.to_string(), t)).collect()),
        }
    }

    /// Variables this argument introduces, in order.
    pub fn bindings(&self) -> Vec<(String, TypeExpr)> {
        match (&self.var, &self.ty) {
            (Some(v), t) => vec![(v.clone(), t.clone())],
            (None, TypeExpr::Group(members)) => members.clone(),
            (None, t) => vec![(String::new(), t.clone())],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimitiveSpec {
    pub kind: PrimitiveKind,
    pub head: Arg,
    pub refs: Vec<Arg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Select,
    Map,
    Modify,
    Create,
}

impl OpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OpKind::Select => "select",
            OpKind::Map => "map",
            OpKind::Modify => "modify",
            OpKind::Create => "create",
        }
    }

    pub fn from_keyword(s: &str) -> Option<OpKind> {
        match s {
            "select" => Some(OpKind::Select),
            "map" => Some(OpKind::Map),
            "modify" => Some(OpKind::Modify),
            "create" => Some(OpKind::Create),
            _ => None,
        }
    }

    /// Inclusive argument-count bounds.
    pub fn arity(self) -> (usize, usize) {
        match self {
            OpKind::Create => (1, 1),
            OpKind::Select => (1, 2),
            OpKind::Modify => (2, 2),
            OpKind::Map => (2, 3),
        }
    }

    pub fn accepts(self, n: usize) -> bool {
        let (lo, hi) = self.arity();
        (lo..=hi).contains(&n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operation {
    pub kind: OpKind,
    pub args: Vec<String>,
}

impl Operation {
    pub fn new(kind: OpKind, args: &[&str]) -> Self {
        Operation {
            kind,
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionDef {
    pub name: String,
    pub params: Vec<String>,
    pub primitive: PrimitiveSpec,
    pub operations: Vec<Operation>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub doc: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("variable `{0}` declared more than once")]
pub struct DuplicateVar(pub String);

/// Every declared variable with its type, groups flattened, in declaration order.
pub fn action_scope(def: &ActionDef) -> Result<Vec<(String, TypeExpr)>, DuplicateVar> {
    let mut out: Vec<(String, TypeExpr)> = Vec::new();
    for arg in std::iter::once(&def.primitive.head).chain(&def.primitive.refs) {
        for (v, t) in arg.bindings() {
            if out.iter().any(|(seen, _)| *seen == v) {
                return Err(DuplicateVar(v));
            }
            out.push((v, t));
        }
    }
    Ok(out)
}

impl ActionDef {
    pub fn is_request(&self) -> bool {
        self.primitive.kind == PrimitiveKind::Request
    }

    /// Variables of the head argument: what a request asks for, or what a
    /// provide primarily communicates.
    pub fn head_vars(&self) -> Vec<String> {
        self.primitive.head.bindings().into_iter().map(|(v, _)| v).collect()
    }

    pub fn head_type(&self) -> &TypeExpr {
        &self.primitive.head.ty
    }

    /// Declared type of a parameter, looked up through the flattened scope.
    pub fn param_type(&self, var: &str) -> Option<TypeExpr> {
        action_scope(self)
            .ok()?
            .into_iter()
            .find(|(v, _)| v == var)
            .map(|(_, t)| t)
    }

    /// Structural invariants (not the select/modify typing rules).
    pub fn violations(&self) -> Vec<(Code, String)> {
        let mut out = Vec::new();
        for arg in std::iter::once(&self.primitive.head).chain(&self.primitive.refs) {
            if let Err((code, e)) = arg.ty.validate() {
                out.push((code, format!("in `{}`: {e}", self.name)));
            }
            if arg.var.is_none() != arg.ty.is_group() {
                out.push((Code::Type, format!("in `{}`: only groups are anonymous", self.name)));
            }
        }
        let scope = match action_scope(self) {
            Ok(s) => s,
            Err(DuplicateVar(v)) => {
                out.push((Code::DupVar, format!("variable `{v}` declared twice in `{}`", self.name)));
                return out;
            }
        };
        let declared: Vec<&str> = scope.iter().map(|(v, _)| v.as_str()).collect();
        let mut seen_params = BTreeSet::new();
        for p in &self.params {
            if !seen_params.insert(p.as_str()) {
                out.push((Code::DupVar, format!("parameter `{p}` listed twice in `{}`", self.name)));
            } else if !declared.contains(&p.as_str()) {
                out.push((
                    Code::UndeclaredVar,
                    format!("parameter `{p}` of `{}` has no declared type", self.name),
                ));
            }
        }
        for v in &declared {
            if !self.params.iter().any(|p| p == v) {
                out.push((
                    Code::Params,
                    format!("declared variable `{v}` missing from the header of `{}`", self.name),
                ));
            }
        }
        for op in &self.operations {
            if !op.kind.accepts(op.args.len()) {
                let (lo, hi) = op.kind.arity();
                let want = if lo == hi { lo.to_string() } else { format!("{lo} or {hi}") };
                out.push((
                    Code::Arity,
                    format!(
                        "{} takes {want} argument(s), got {} in `{}`",
                        op.kind.as_str(),
                        op.args.len(),
                        self.name
                    ),
                ));
            }
            for a in &op.args {
                if !declared.contains(&a.as_str()) {
                    out.push((
                        Code::UndeclaredVar,
                        format!("{}({}) uses undeclared `{a}` in `{}`", op.kind.as_str(), op.args.join(","), self.name),
                    ));
                }
            }
        }
        out
    }
}

pub const PREDECLARED_ROLES: [&str; 2] = ["user", "model"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModKind {
    /// `X:WalkStand`, annotating a message variable.
    Var,
    /// `key="free text"`.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modifier {
    pub key: String,
    pub value: String,
    pub kind: ModKind,
}

impl Modifier {
    pub fn var(key: &str, value: &str) -> Self {
        Modifier { key: key.into(), value: value.into(), kind: ModKind::Var }
    }

    pub fn free(key: &str, value: &str) -> Self {
        Modifier { key: key.into(), value: value.into(), kind: ModKind::Free }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub name: String,
    pub sender: String,
    pub receiver: String,
    pub action: String,
    pub args: Vec<String>,
    pub modifiers: Vec<Modifier>,
}

impl Message {
    pub fn new(name: &str, sender: &str, receiver: &str, action: &str, args: &[&str]) -> Self {
        Message {
            name: name.into(),
            sender: sender.into(),
            receiver: receiver.into(),
            action: action.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
            modifiers: Vec::new(),
        }
    }

    /// Invariants checkable without the action table.
    pub fn violations(&self) -> Vec<(Code, String)> {
        let mut out = Vec::new();
        if self.sender == self.receiver {
            out.push((Code::SelfSend, format!("`{}` is sent from `{}` to itself", self.name, self.sender)));
        }
        let mut keys = BTreeSet::new();
        for m in &self.modifiers {
            if !keys.insert(&m.key) {
                out.push((Code::DupMod, format!("modifier `{}` repeated in `{}`", m.key, self.name)));
            }
            if m.kind == ModKind::Var && !self.args.contains(&m.key) {
                out.push((
                    Code::UnknownModVar,
                    format!("modifier `{}:{}` names no argument of `{}`", m.key, m.value, self.name),
                ));
            }
        }
        out
    }

    pub fn direction(&self) -> (String, String) {
        (self.sender.clone(), self.receiver.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Xai,
    Hitl,
    Hi,
    Control,
    Query,
}

impl Tag {
    pub const ALL: [Tag; 5] = [Tag::Xai, Tag::Hitl, Tag::Hi, Tag::Control, Tag::Query];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Xai => "xai",
            Tag::Hitl => "hitl",
            Tag::Hi => "hi",
            Tag::Control => "control",
            Tag::Query => "query",
        }
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown tag `{s}` (expected one of xai, hitl, hi, control, query)"))
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    pub name: String,
    pub messages: Vec<String>,
    pub tags: BTreeSet<Tag>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub notes: String,
}

impl Pattern {
    pub fn new(name: &str, messages: &[&str], tags: &[Tag]) -> Self {
        Pattern {
            name: name.into(),
            messages: messages.iter().map(|s| s.to_string()).collect(),
            tags: tags.iter().copied().collect(),
            notes: String::new(),
        }
    }
}

/// An ordered list of pattern names, composed by concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub patterns: Vec<String>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub notes: String,
}

/// Pattern-scope variable types accumulated while walking messages.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Binding {
    pub types: BTreeMap<String, TypeExpr>,
}

impl Binding {
    /// Bind `var` to `ty`, narrowing an existing binding. On conflict the
    /// existing type is kept and returned.
    pub fn bind(&mut self, var: &str, ty: &TypeExpr) -> Result<(), TypeExpr> {
        match self.types.get(var) {
            None => {
                self.types.insert(var.to_string(), ty.clone());
                Ok(())
            }
            Some(old) => match old.narrow(ty) {
                Some(n) => {
                    self.types.insert(var.to_string(), n);
                    Ok(())
                }
                None => Err(old.clone()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn action(name: &str, params: &[&str], kind: PrimitiveKind, head: Arg, refs: Vec<Arg>, ops: Vec<Operation>) -> ActionDef {
        ActionDef {
            name: name.into(),
            params: params.iter().map(|s| s.to_string()).collect(),
            primitive: PrimitiveSpec { kind, head, refs },
            operations: ops,
            doc: String::new(),
        }
    }

    #[test]
    fn compatibility_examples() {
        let label = TypeExpr::base(Role::Output, &["label"]);
        let union = TypeExpr::base(Role::Input, &["raw_data", "fvector"]);
        let raw = TypeExpr::base(Role::Input, &["raw_data"]);
        assert!(type_compatible(&label, &label));
        assert!(type_compatible(&union, &raw));
        assert!(!type_compatible(&label, &raw));
        assert!(type_compatible(&TypeExpr::base(Role::Input, &[]), &raw));
        assert!(!type_compatible(&raw, &TypeExpr::list(Role::Input, &["raw_data"])));
    }

    #[test]
    fn scope_of_class_selection() {
        let def = action(
            "req-class_selection",
            &["Y", "L"],
            PrimitiveKind::Request,
            Arg::named("Y", TypeExpr::base(Role::Output, &["label"])),
            vec![Arg::named("L", TypeExpr::list(Role::Output, &["label"]))],
            vec![Operation::new(OpKind::Select, &["Y", "L"])],
        );
        let scope = action_scope(&def).unwrap();
        assert_eq!(
            scope,
            vec![
                ("Y".to_string(), TypeExpr::base(Role::Output, &["label"])),
                ("L".to_string(), TypeExpr::list(Role::Output, &["label"])),
            ]
        );
        assert!(def.violations().is_empty());
    }

    #[test]
    fn scope_flattens_groups_in_declaration_order() {
        let def = action(
            "give-evaluative_advice",
            &["S", "A", "R"],
            PrimitiveKind::Provide,
            Arg::named("R", TypeExpr::base(Role::Feedback, &["eval"])),
            vec![Arg::group(vec![
                ("S", TypeExpr::base(Role::Input, &["state"])),
                ("A", TypeExpr::base(Role::Output, &["action"])),
            ])],
            vec![
                Operation::new(OpKind::Select, &["R"]),
                Operation::new(OpKind::Map, &["S", "A", "R"]),
            ],
        );
        let names: Vec<_> = action_scope(&def).unwrap().into_iter().map(|(v, _)| v).collect();
        assert_eq!(names, ["R", "S", "A"]);
        assert!(def.violations().is_empty());
    }

    #[test]
    fn single_head_scope_has_one_entry() {
        let def = action(
            "generate-sample",
            &["X"],
            PrimitiveKind::Provide,
            Arg::named("X", TypeExpr::base(Role::Input, &["raw_data"])),
            vec![],
            vec![Operation::new(OpKind::Create, &["X"])],
        );
        assert_eq!(action_scope(&def).unwrap().len(), 1);
    }

    #[test]
    fn duplicate_variables_are_reported() {
        let def = action(
            "dup",
            &["X"],
            PrimitiveKind::Provide,
            Arg::named("X", TypeExpr::base(Role::Input, &[])),
            vec![Arg::named("X", TypeExpr::base(Role::Output, &[]))],
            vec![],
        );
        assert_eq!(action_scope(&def), Err(DuplicateVar("X".into())));
        assert_eq!(def.violations()[0].0, Code::DupVar);
    }

    #[test]
    fn operation_arity_bounds() {
        assert!(OpKind::Create.accepts(1) && !OpKind::Create.accepts(2));
        assert!(OpKind::Select.accepts(1) && OpKind::Select.accepts(2) && !OpKind::Select.accepts(3));
        assert!(!OpKind::Modify.accepts(1) && OpKind::Modify.accepts(2));
        assert!(!OpKind::Map.accepts(1) && OpKind::Map.accepts(3) && !OpKind::Map.accepts(4));
    }

    #[test]
    fn header_must_cover_declared_variables() {
        let def = action(
            "short",
            &["X"],
            PrimitiveKind::Provide,
            Arg::named("X", TypeExpr::base(Role::Input, &[])),
            vec![Arg::named("Y", TypeExpr::base(Role::Output, &[]))],
            vec![],
        );
        assert_eq!(def.violations()[0].0, Code::Params);
    }

    #[test]
    fn message_local_invariants() {
        let mut m = Message::new("m", "user", "user", "a", &["X"]);
        m.modifiers = vec![Modifier::var("Z", "foo"), Modifier::free("ui", "slider"), Modifier::free("ui", "x")];
        let codes: Vec<Code> = m.violations().into_iter().map(|(c, _)| c).collect();
        assert_eq!(codes, [Code::SelfSend, Code::UnknownModVar, Code::DupMod]);
    }

    #[test]
    fn binding_narrows_unions() {
        let mut b = Binding::default();
        b.bind("X", &TypeExpr::base(Role::Input, &["raw_data", "fvector"])).unwrap();
        b.bind("X", &TypeExpr::base(Role::Input, &["raw_data"])).unwrap();
        assert_eq!(b.types["X"], TypeExpr::base(Role::Input, &["raw_data"]));
        assert!(b.bind("X", &TypeExpr::base(Role::Input, &["fvector"])).is_err());
        assert_eq!(b.types["X"], TypeExpr::base(Role::Input, &["raw_data"]));
    }

    #[test]
    fn tags_parse_from_closed_vocabulary() {
        assert_eq!("xai".parse::<Tag>(), Ok(Tag::Xai));
        assert!("nosuch".parse::<Tag>().is_err());
    }
}
