use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{lex, Tok, Token};
use super::{Decl, SourceFile};
use crate::diag::{Code, Diagnostic, Span};
use crate::model::{
    ActionDef, Arg, BaseType, Message, Modifier, OpKind, Operation, Pattern, PrimitiveKind,
    PrimitiveSpec, Role, Scenario, Tag, TypeExpr, PREDECLARED_ROLES,
};

type PResult<T> = Result<T, Diagnostic>;

const DECL_KEYWORDS: [&str; 5] = ["role", "action", "message", "pattern", "scenario"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: i32,
    diags: Vec<Diagnostic>,
}

fn is_var(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase()) && !s.contains('-')
}

fn is_ident(s: &str) -> bool {
    !s.contains('-')
}

impl Parser {
    fn new(text: &str) -> Self {
        let (toks, diags) = lex(text);
        Parser { toks, pos: 0, depth: 0, diags }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        match t.tok {
            Tok::LBrack | Tok::LParen => self.depth += 1,
            Tok::RBrack | Tok::RParen => self.depth -= 1,
            _ => {}
        }
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    /// Comments inside a declaration carry no meaning and are skipped.
    fn skip_inner_comments(&mut self) {
        while matches!(self.peek(), Tok::Comment(_) | Tok::Doc(_)) {
            self.bump();
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        let t = &self.toks[self.pos];
        Diagnostic::new(Code::Syntax, format!("expected {what}, found {}", t.tok.describe())).at(t.span)
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        self.skip_inner_comments();
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        self.skip_inner_comments();
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident_token(&mut self, what: &str, ok: fn(&str) -> bool) -> PResult<(String, Span)> {
        self.skip_inner_comments();
        match self.peek().clone() {
            Tok::Ident(s) if ok(&s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn name(&mut self) -> PResult<(String, Span)> {
        self.ident_token("a name", |_| true)
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        self.ident_token("an identifier", is_ident)
    }

    fn var(&mut self) -> PResult<(String, Span)> {
        self.ident_token("a variable (uppercase initial)", is_var)
    }

    fn var_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.var()?.0];
        while self.eat(&Tok::Comma) {
            out.push(self.var()?.0);
        }
        Ok(out)
    }

    fn base(&mut self) -> PResult<BaseType> {
        self.skip_inner_comments();
        let role = match self.peek() {
            Tok::Ident(s) => Role::from_keyword(s),
            _ => None,
        };
        let Some(role) = role else {
            return Err(self.unexpected("`input`, `output` or `feedback`"));
        };
        self.bump();
        let mut subtypes = Vec::new();
        if self.eat(&Tok::Dot) {
            subtypes.push(self.ident()?.0);
            while self.eat(&Tok::Pipe) {
                let (s, sp2) = self.ident()?;
                if subtypes.contains(&s) {
                    return Err(Diagnostic::new(Code::Type, format!("subtype `{s}` repeated in union")).at(sp2));
                }
                subtypes.push(s);
            }
        }
        Ok(BaseType { role, subtypes })
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        if self.eat(&Tok::LBrack) {
            let b = self.base()?;
            self.expect(Tok::RBrack)?;
            Ok(TypeExpr::List(b))
        } else {
            Ok(TypeExpr::Base(self.base()?))
        }
    }

    fn group_members(&mut self) -> PResult<Vec<(String, TypeExpr)>> {
        let open = self.span();
        let mut members = Vec::new();
        loop {
            let (v, _) = self.var()?;
            self.expect(Tok::Colon)?;
            members.push((v, self.type_expr()?));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrack)?;
        if members.len() < 2 {
            return Err(Diagnostic::new(Code::Syntax, "a group needs at least two members").at(open));
        }
        Ok(members)
    }

    fn arg(&mut self) -> PResult<Arg> {
        if self.eat(&Tok::LBrack) {
            let members = self.group_members()?;
            Ok(Arg { var: None, ty: TypeExpr::Group(members) })
        } else {
            let (v, _) = self.var()?;
            self.expect(Tok::Colon)?;
            Ok(Arg { var: Some(v), ty: self.type_expr()? })
        }
    }

    fn operation(&mut self) -> PResult<(Operation, Span)> {
        self.skip_inner_comments();
        let sp = self.span();
        let kind = match self.peek() {
            Tok::Ident(s) => OpKind::from_keyword(s),
            _ => None,
        };
        let Some(kind) = kind else {
            return Err(self.unexpected("`select`, `map`, `modify` or `create`"));
        };
        self.bump();
        self.expect(Tok::LParen)?;
        let args = self.var_list()?;
        self.expect(Tok::RParen)?;
        Ok((Operation { kind, args }, sp))
    }

    fn action(&mut self, doc: String) -> PResult<(Decl, Span)> {
        let (name, nsp) = self.name()?;
        self.expect(Tok::LParen)?;
        let params = self.var_list()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Define)?;
        self.skip_inner_comments();
        let kind = match self.peek() {
            Tok::Ident(s) if s == "provide" => PrimitiveKind::Provide,
            Tok::Ident(s) if s == "request" => PrimitiveKind::Request,
            _ => return Err(self.unexpected("`provide` or `request`")),
        };
        self.bump();
        self.expect(Tok::LParen)?;
        let head = self.arg()?;
        let mut refs = Vec::new();
        while self.eat(&Tok::Comma) {
            refs.push(self.arg()?);
        }
        self.expect(Tok::RParen)?;
        let mut operations = Vec::new();
        if self.eat(&Tok::LArrow) {
            loop {
                let (op, sp) = self.operation()?;
                if !op.kind.accepts(op.args.len()) {
                    let (lo, hi) = op.kind.arity();
                    let want = if lo == hi { lo.to_string() } else { format!("{lo} or {hi}") };
                    self.diags.push(
                        Diagnostic::new(
                            Code::Arity,
                            format!("{} takes {want} argument(s), got {}", op.kind.as_str(), op.args.len()),
                        )
                        .at(sp),
                    );
                }
                operations.push(op);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Semi)?;
        let def = ActionDef { name, params, primitive: PrimitiveSpec { kind, head, refs }, operations, doc };
        for (code, msg) in def.violations() {
            if code != Code::Arity || !msg.contains("argument(s)") {
                self.diags.push(Diagnostic::new(code, msg).at(nsp));
            }
        }
        Ok((Decl::Action(def), nsp))
    }

    fn modifier(&mut self) -> PResult<Modifier> {
        let (key, ksp) = self.ident_token("a modifier key", is_ident)?;
        self.skip_inner_comments();
        match self.peek() {
            Tok::Eq => {
                self.bump();
                self.skip_inner_comments();
                match self.peek().clone() {
                    Tok::Str(s) => {
                        self.bump();
                        Ok(Modifier::free(&key, &s))
                    }
                    _ => Err(self.unexpected("a string")),
                }
            }
            Tok::Colon => {
                if !is_var(&key) {
                    return Err(Diagnostic::new(
                        Code::Syntax,
                        format!("`{key}:` annotations need a variable (uppercase initial)"),
                    )
                    .at(ksp));
                }
                self.bump();
                let (v, _) = self.ident()?;
                Ok(Modifier::var(&key, &v))
            }
            _ => Err(self.unexpected("`=` or `:`")),
        }
    }

    fn message(&mut self) -> PResult<(Decl, Span)> {
        let (name, nsp) = self.name()?;
        self.expect(Tok::Define)?;
        let (sender, _) = self.ident()?;
        self.expect(Tok::Arrow)?;
        let (receiver, _) = self.ident()?;
        self.expect(Tok::Colon)?;
        let (action, _) = self.name()?;
        self.expect(Tok::LParen)?;
        let args = self.var_list()?;
        self.expect(Tok::RParen)?;
        let mut modifiers = Vec::new();
        if self.eat(&Tok::LBrack) {
            modifiers.push(self.modifier()?);
            while self.eat(&Tok::Semi) {
                modifiers.push(self.modifier()?);
            }
            self.expect(Tok::RBrack)?;
        }
        self.expect(Tok::Semi)?;
        modifiers.sort_by(|a, b| a.key.cmp(&b.key));
        let msg = Message { name, sender, receiver, action, args, modifiers };
        for (code, text) in msg.violations() {
            self.diags.push(Diagnostic::new(code, text).at(nsp));
        }
        Ok((Decl::Message(msg), nsp))
    }

    fn name_list(&mut self, what: &str, name: &str, nsp: Span) -> PResult<Vec<String>> {
        self.expect(Tok::LBrack)?;
        self.skip_inner_comments();
        if *self.peek() == Tok::RBrack {
            self.bump();
            self.diags.push(
                Diagnostic::new(Code::EmptyPattern, format!("{what} `{name}` has no members")).at(nsp),
            );
            return Ok(Vec::new());
        }
        let mut out = vec![self.name()?.0];
        while self.eat(&Tok::Comma) {
            out.push(self.name()?.0);
        }
        self.expect(Tok::RBrack)?;
        Ok(out)
    }

    fn pattern(&mut self, notes: String) -> PResult<(Decl, Span)> {
        let (name, nsp) = self.name()?;
        self.expect(Tok::Define)?;
        let messages = self.name_list("pattern", &name, nsp)?;
        let mut tags = BTreeSet::new();
        if self.eat(&Tok::At) {
            loop {
                let (t, tsp) = self.ident()?;
                match t.parse::<Tag>() {
                    Ok(tag) => {
                        tags.insert(tag);
                    }
                    Err(e) => self.diags.push(Diagnostic::new(Code::UnknownTag, e).at(tsp)),
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Semi)?;
        Ok((Decl::Pattern(Pattern { name, messages, tags, notes }), nsp))
    }

    fn scenario(&mut self, notes: String) -> PResult<(Decl, Span)> {
        let (name, nsp) = self.name()?;
        self.expect(Tok::Define)?;
        let patterns = self.name_list("scenario", &name, nsp)?;
        self.expect(Tok::Semi)?;
        Ok((Decl::Scenario(Scenario { name, patterns, notes }), nsp))
    }

    fn decl(&mut self, doc: String) -> PResult<(Decl, Span)> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("`role`, `action`, `message`, `pattern` or `scenario`")),
        };
        match kw.as_str() {
            "role" => {
                self.bump();
                let (name, nsp) = self.ident()?;
                self.expect(Tok::Semi)?;
                Ok((Decl::Role(name), nsp))
            }
            "action" => {
                self.bump();
                self.action(doc)
            }
            "message" => {
                self.bump();
                self.message()
            }
            "pattern" => {
                self.bump();
                self.pattern(doc)
            }
            "scenario" => {
                self.bump();
                self.scenario(doc)
            }
            _ => Err(self.unexpected("`role`, `action`, `message`, `pattern` or `scenario`")),
        }
    }

    /// Skip past the next `;` at the declaration's top nesting level, or past
    /// any `;` that is followed by the start of another declaration.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi => {
                    self.bump();
                    let next_decl = matches!(self.peek(), Tok::Eof | Tok::Comment(_) | Tok::Doc(_))
                        || matches!(self.peek(), Tok::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()));
                    if self.depth <= 0 || next_decl {
                        self.depth = 0;
                        return;
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn file(&mut self) -> (Vec<Decl>, Vec<Span>) {
        let mut decls = Vec::new();
        let mut spans = Vec::new();
        let mut doc: Vec<(String, Span)> = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Doc(d) => {
                    doc.push((d, self.span()));
                    self.bump();
                }
                Tok::Comment(c) => {
                    for (d, sp) in doc.drain(..) {
                        decls.push(Decl::Comment(d));
                        spans.push(sp);
                    }
                    spans.push(self.span());
                    decls.push(Decl::Comment(c));
                    self.bump();
                }
                _ => {
                    let takes_doc = matches!(self.peek(), Tok::Ident(s) if s == "action" || s == "pattern" || s == "scenario");
                    if !takes_doc {
                        for (d, sp) in doc.drain(..) {
                            decls.push(Decl::Comment(d));
                            spans.push(sp);
                        }
                    }
                    let text = doc.drain(..).map(|(d, _)| d).collect::<Vec<_>>().join("\n");
                    self.depth = 0;
                    match self.decl(text) {
                        Ok((d, sp)) => {
                            decls.push(d);
                            spans.push(sp);
                        }
                        Err(e) => {
                            self.diags.push(e);
                            self.recover();
                        }
                    }
                }
            }
        }
        for (d, sp) in doc {
            decls.push(Decl::Comment(d));
            spans.push(sp);
        }
        (decls, spans)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Space {
    Role,
    Action,
    Message,
    Pattern,
}

/// Duplicate names, and references to names declared later in the same file.
fn resolve_order(decls: &[Decl], spans: &[Span], diags: &mut Vec<Diagnostic>) {
    let mut first: BTreeMap<(Space, &str), usize> = BTreeMap::new();
    for (i, d) in decls.iter().enumerate() {
        let key = match d {
            Decl::Role(n) => (Space::Role, n.as_str()),
            Decl::Action(a) => (Space::Action, a.name.as_str()),
            Decl::Message(m) => (Space::Message, m.name.as_str()),
            Decl::Pattern(p) => (Space::Pattern, p.name.as_str()),
            Decl::Scenario(s) => (Space::Pattern, s.name.as_str()),
            Decl::Comment(_) => continue,
        };
        if key.0 == Space::Role && PREDECLARED_ROLES.contains(&key.1) {
            diags.push(Diagnostic::new(Code::DupName, format!("role `{}` is predeclared", key.1)).at(spans[i]));
            continue;
        }
        if first.contains_key(&key) {
            diags.push(Diagnostic::new(Code::DupName, format!("`{}` is declared twice", key.1)).at(spans[i]));
        } else {
            first.insert(key, i);
        }
    }
    let later = |space: Space, name: &str, at: usize, diags: &mut Vec<Diagnostic>| {
        if let Some(&j) = first.get(&(space, name)) {
            if j > at {
                diags.push(
                    Diagnostic::new(Code::Unresolved, format!("`{name}` is used before its declaration"))
                        .at(spans[at]),
                );
            }
        }
    };
    for (i, d) in decls.iter().enumerate() {
        match d {
            Decl::Message(m) => {
                later(Space::Action, &m.action, i, diags);
                later(Space::Role, &m.sender, i, diags);
                later(Space::Role, &m.receiver, i, diags);
            }
            Decl::Pattern(p) => {
                for n in &p.messages {
                    later(Space::Message, n, i, diags);
                }
            }
            Decl::Scenario(s) => {
                for n in &s.patterns {
                    later(Space::Pattern, n, i, diags);
                }
            }
            _ => {}
        }
    }
}

pub fn parse_source(path: &str, text: &str) -> Result<SourceFile, Vec<Diagnostic>> {
    let mut p = Parser::new(text);
    let (decls, spans) = p.file();
    let mut diags = std::mem::take(&mut p.diags);
    resolve_order(&decls, &spans, &mut diags);
    if diags.is_empty() {
        Ok(SourceFile { path: path.to_string(), decls, spans })
    } else {
        diags.sort_by_key(|d| d.span);
        for d in &mut diags {
            d.path = Some(path.to_string());
        }
        Err(diags)
    }
}

/// A standalone type: `input.raw_data|fvector`, `[output.label]`, or a
/// group `[S: input.state, A: output.action]`.
pub fn parse_type(text: &str) -> Result<TypeExpr, Vec<Diagnostic>> {
    let mut p = Parser::new(text);
    let is_group = *p.peek() == Tok::LBrack && matches!(p.peek_at(2), Tok::Colon);
    let res = if is_group {
        p.bump();
        p.group_members().map(TypeExpr::Group)
    } else {
        p.type_expr()
    };
    let res = res.and_then(|t| {
        if *p.peek() == Tok::Eof {
            Ok(t)
        } else {
            Err(p.unexpected("end of type"))
        }
    });
    match res {
        Ok(t) if p.diags.is_empty() => Ok(t),
        Ok(_) => Err(p.diags),
        Err(e) => {
            p.diags.push(e);
            Err(p.diags)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(src: &str) -> Vec<Code> {
        parse_source("t.hai", src).unwrap_err().into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn parses_class_selection_request() {
        let f = parse_source(
            "t.hai",
            "action req-class_selection(Y,L) := request(Y: output.label, L: [output.label]) <- select(Y,L);",
        )
        .unwrap();
        let Decl::Action(a) = &f.decls[0] else { panic!() };
        assert_eq!(a.name, "req-class_selection");
        assert_eq!(a.params, ["Y", "L"]);
        assert_eq!(a.primitive.kind, PrimitiveKind::Request);
        assert_eq!(a.primitive.head, Arg::named("Y", TypeExpr::base(Role::Output, &["label"])));
        assert_eq!(a.primitive.refs, vec![Arg::named("L", TypeExpr::list(Role::Output, &["label"]))]);
        assert_eq!(a.operations, vec![Operation::new(OpKind::Select, &["Y", "L"])]);
    }

    #[test]
    fn empty_pattern_is_rejected() {
        assert_eq!(codes("pattern p := [];"), [Code::EmptyPattern]);
    }

    #[test]
    fn modify_with_one_argument_is_an_arity_error() {
        assert_eq!(codes("action a(X) := provide(X: input) <- modify(X);"), [Code::Arity]);
    }

    #[test]
    fn syntax_errors_recover_at_semicolon() {
        let errs = codes("action a(X := provide(X: input);\nrole ok;\npattern q := [m] @xai q;");
        assert_eq!(errs, [Code::Syntax, Code::Syntax]);
    }

    #[test]
    fn modifiers_are_sorted_and_checked() {
        let f = parse_source(
            "t.hai",
            "message A5 := model -> user : req-sample_class(X, Y) [Y:reqSelfReport; X:WalkStand; ui=\"tablet\"];",
        )
        .unwrap();
        let Decl::Message(m) = &f.decls[0] else { panic!() };
        let keys: Vec<_> = m.modifiers.iter().map(|m| m.key.as_str()).collect();
        assert_eq!(keys, ["X", "Y", "ui"]);
        assert_eq!(
            codes("message m := user -> user : a(X) [Z:foo; Z:bar];"),
            [Code::SelfSend, Code::UnknownModVar, Code::DupMod, Code::UnknownModVar]
        );
    }

    #[test]
    fn unknown_tags_and_duplicates() {
        assert_eq!(codes("pattern p := [m] @nosuch;"), [Code::UnknownTag]);
        assert_eq!(codes("role a;\nrole a;"), [Code::DupName]);
        assert_eq!(codes("role user;"), [Code::DupName]);
    }

    #[test]
    fn forward_references_inside_a_file_are_unresolved() {
        let src = "pattern p := [m];\nmessage m := user -> model : a(X);";
        assert_eq!(codes(src), [Code::Unresolved]);
        // references to names this file never declares are left to the catalog
        assert!(parse_source("t.hai", "pattern p := [elsewhere];").is_ok());
    }

    #[test]
    fn undeclared_and_duplicate_vars() {
        assert_eq!(
            codes("action a(X) := provide(X: input) <- create(Y);"),
            [Code::UndeclaredVar]
        );
        assert_eq!(
            codes("action a(X) := provide(X: input, X: output);"),
            [Code::DupVar]
        );
    }

    #[test]
    fn docs_attach_to_actions_and_patterns() {
        let f = parse_source("t.hai", "/// first\n/// second\npattern p := [m] @hi, xai;\n/// stray\nrole r;").unwrap();
        let Decl::Pattern(p) = &f.decls[0] else { panic!() };
        assert_eq!(p.notes, "first\nsecond");
        assert_eq!(p.tags.iter().copied().collect::<Vec<_>>(), [Tag::Xai, Tag::Hi]);
        assert_eq!(f.decls[1], Decl::Comment("stray".into()));
    }

    #[test]
    fn standalone_types() {
        assert_eq!(parse_type("input.raw_data|fvector").unwrap(), TypeExpr::base(Role::Input, &["raw_data", "fvector"]));
        assert_eq!(parse_type("[output]").unwrap(), TypeExpr::list(Role::Output, &[]));
        assert!(parse_type("[S: input.state, A: output.action]").unwrap().is_group());
        assert!(parse_type("input.a|a").is_err());
        assert!(parse_type("[input] x").is_err());
        assert!(parse_type("").is_err());
    }

    #[test]
    fn diagnostics_are_deterministic() {
        let src = "action a(X) := provide(X: input) <- modify(X);\n% ;\npattern p := [];";
        assert_eq!(parse_source("t", src), parse_source("t", src));
    }
}
