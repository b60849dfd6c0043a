//! Concrete values exchanged during a run, and their literal syntax.
//!
//! A literal is a type followed by a value:
//!
//! ```text
//! output.label happy
//! input.raw_data (0.5, 1)
//! [output.label] [happy, neutral, sad]
//! input.raw_data #clip-07
//! feedback.eval "looks wrong"
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::TypeExpr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Symbol(String),
    Number(f64),
    Vector(Vec<f64>),
    List(Vec<Payload>),
    /// Opaque reference standing in for raw media.
    Blob(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    #[serde(rename = "type")]
    pub ty: TypeExpr,
    pub value: Value,
}

impl Payload {
    /// Pair a type with a value; list types need list values and the reverse.
    pub fn new(ty: TypeExpr, value: Value) -> Result<Payload, String> {
        match (&ty, &value) {
            (TypeExpr::Group(_), _) => Err(format!("payloads cannot carry group type {ty}")),
            (TypeExpr::List(_), Value::List(items)) => {
                let elem = element_type(&ty);
                match items.iter().find(|p| p.ty != elem) {
                    Some(p) => Err(format!("list element of type {} in {ty}", p.ty)),
                    None => Ok(Payload { ty, value }),
                }
            }
            (TypeExpr::List(_), _) => Err(format!("{ty} needs a list value")),
            (TypeExpr::Base(_), Value::List(_)) => Err(format!("{ty} cannot hold a list")),
            (TypeExpr::Base(_), _) => Ok(Payload { ty, value }),
        }
    }

    pub fn symbol(ty: TypeExpr, s: &str) -> Payload {
        Payload::new(ty, Value::Symbol(s.to_string())).expect("base type")
    }

    pub fn vector(ty: TypeExpr, v: &[f64]) -> Payload {
        Payload::new(ty, Value::Vector(v.to_vec())).expect("base type")
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match &self.value {
            Value::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match &self.value {
            Value::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Parse the literal syntax described in the module docs.
    pub fn parse(text: &str) -> Result<Payload, String> {
        let text = text.trim();
        let split = if text.starts_with('[') {
            text.find(']').map(|i| i + 1)
        } else {
            text.find(char::is_whitespace)
        };
        let split = split.ok_or_else(|| format!("expected `TYPE VALUE`, got `{text}`"))?;
        let ty: TypeExpr = text[..split].parse()?;
        let mut p = ValueParser { s: text[split..].trim().as_bytes(), pos: 0 };
        let payload = p.payload(&ty)?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(format!("trailing input after value in `{text}`"));
        }
        Ok(payload)
    }
}

pub(crate) fn element_type(ty: &TypeExpr) -> TypeExpr {
    match ty {
        TypeExpr::List(b) => TypeExpr::Base(b.clone()),
        other => other.clone(),
    }
}

fn fmt_number(f: &mut fmt::Formatter<'_>, n: f64) -> fmt::Result {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        write!(f, "{}", n as i64)
    } else {
        write!(f, "{n}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Symbol(s) if is_bare(s) => f.write_str(s),
            Value::Symbol(s) => write!(f, "{s:?}"),
            Value::Number(n) => fmt_number(f, *n),
            Value::Vector(v) => {
                f.write_str("(")?;
                for (i, n) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    fmt_number(f, *n)?;
                }
                f.write_str(")")
            }
            Value::List(items) => {
                f.write_str("[")?;
                for (i, p) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", p.value)?;
                }
                f.write_str("]")
            }
            Value::Blob(r) => write!(f, "#{r}"),
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.ty, self.value)
    }
}

fn is_bare(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

struct ValueParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ValueParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected `{}` at offset {}", c as char, self.pos))
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.pos < self.s.len() && f(self.s[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn number(&mut self) -> Result<f64, String> {
        self.skip_ws();
        let tok = self.take_while(|c| c.is_ascii_digit() || matches!(c, b'-' | b'+' | b'.' | b'e' | b'E'));
        match tok.parse::<f64>() {
            Ok(n) if n.is_finite() => Ok(n),
            _ => Err(format!("bad number `{tok}`")),
        }
    }

    fn payload(&mut self, ty: &TypeExpr) -> Result<Payload, String> {
        if let TypeExpr::List(_) = ty {
            let elem = element_type(ty);
            self.expect(b'[')?;
            let mut items = Vec::new();
            if self.peek() != Some(b']') {
                loop {
                    items.push(self.payload(&elem)?);
                    if self.peek() == Some(b',') {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            self.expect(b']')?;
            return Payload::new(ty.clone(), Value::List(items));
        }
        let value = match self.peek() {
            None => return Err("missing value".into()),
            Some(b'(') => {
                self.pos += 1;
                let mut v = vec![self.number()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    v.push(self.number()?);
                }
                self.expect(b')')?;
                Value::Vector(v)
            }
            Some(b'#') => {
                self.pos += 1;
                let r = self.take_while(|c| c.is_ascii_alphanumeric() || matches!(c, b'_' | b'-' | b'.' | b'/'));
                if r.is_empty() {
                    return Err("empty blob reference".into());
                }
                Value::Blob(r.to_string())
            }
            Some(b'"') => {
                self.pos += 1;
                let body = self.take_while(|c| c != b'"').to_string();
                self.expect(b'"')?;
                Value::Symbol(body)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => Value::Number(self.number()?),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                Value::Symbol(self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'-').to_string())
            }
            Some(c) => return Err(format!("unexpected `{}` in value", c as char)),
        };
        Payload::new(ty.clone(), value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip_through_display() {
        for lit in [
            "output.label happy",
            "input.raw_data (0.5, 1)",
            "[output.label] [happy, neutral, sad]",
            "input.raw_data #clip-07",
            "feedback.eval \"looks wrong\"",
            "input.model_params -3",
            "[input.raw_data] []",
        ] {
            let p = Payload::parse(lit).unwrap();
            assert_eq!(p.to_string(), lit);
            assert_eq!(Payload::parse(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn shape_must_match_type() {
        assert!(Payload::parse("output.label [a]").is_err());
        assert!(Payload::parse("[output.label] happy").is_err());
        assert!(Payload::parse("output.label").is_err());
        assert!(Payload::parse("input.raw_data (1, )").is_err());
        assert!(Payload::parse("input.raw_data (1) x").is_err());
    }

    #[test]
    fn json_shape() {
        let p = Payload::parse("[output.label] [a]").unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"type":"[output.label]","value":{"list":[{"type":"output.label","value":{"symbol":"a"}}]}}"#);
        assert_eq!(serde_json::from_str::<Payload>(&json).unwrap(), p);
    }
}
