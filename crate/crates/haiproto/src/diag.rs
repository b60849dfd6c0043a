//! Diagnostics shared by the parser, the checker and the catalog loader.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal, $sev:ident, $doc:literal;)*) => {
        /// The closed set of diagnostic codes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }

            pub fn severity(self) -> Severity {
                match self {
                    $(Code::$variant => Severity::$sev,)*
                }
            }

            /// One-line description, used by `--explain` style listings and docs.
            pub fn summary(self) -> &'static str {
                match self {
                    $(Code::$variant => $doc,)*
                }
            }

            pub fn from_str_code(s: &str) -> Option<Code> {
                match s {
                    $($text => Some(Code::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

codes! {
    Lex => "E-LEX", Error, "unknown character or unterminated string";
    Syntax => "E-SYNTAX", Error, "unexpected token";
    Arity => "E-ARITY", Error, "operation or group has the wrong number of arguments";
    DupName => "E-DUP-NAME", Error, "a name is declared twice";
    EmptyPattern => "E-EMPTY-PATTERN", Error, "pattern or scenario with no members";
    ModifyType => "E-MODIFY-TYPE", Error, "modify(A,B) over incompatible types";
    SelectElem => "E-SELECT-ELEM", Error, "select(A,B) where B's element type is incompatible with A";
    SelectNonList => "E-SELECT-NONLIST", Error, "select(A,B) where B is not a list";
    UndeclaredVar => "E-UNDECLARED-VAR", Error, "variable used but not declared by the primitive";
    DupVar => "E-DUP-VAR", Error, "variable declared twice in one action";
    Params => "E-PARAMS", Error, "action header does not list every declared variable";
    Type => "E-TYPE", Error, "malformed type expression";
    UnknownAction => "E-UNKNOWN-ACTION", Error, "message refers to an unknown action";
    SelfSend => "E-SELF-SEND", Error, "message sender equals receiver";
    UnknownModVar => "E-UNKNOWN-MOD-VAR", Error, "variable modifier names a variable not in the message";
    DupMod => "E-DUP-MOD", Error, "modifier key repeated in one message";
    MsgArity => "E-MSG-ARITY", Error, "message argument count differs from the action's parameters";
    Binding => "E-BINDING", Error, "pattern variable bound to incompatible types";
    Unanswered => "W-UNANSWERED", Warning, "request never answered within the pattern";
    UnansweredScenario => "E-UNANSWERED", Error, "request never answered within the scenario";
    Unresolved => "E-UNRESOLVED", Error, "reference to an undeclared or later-declared name";
    UnknownTag => "E-UNKNOWN-TAG", Error, "paradigm tag outside the closed vocabulary";
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Code::from_str_code(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown code {s}")))
    }
}

/// 1-based line and column, length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub len: usize,
}

impl Span {
    pub fn new(line: usize, col: usize, len: usize) -> Self {
        Span { line, col, len }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            message: message.into(),
            path: None,
            span: None,
        }
    }

    pub fn at(mut self, span: Span) -> Self {
        self.span = Some(span);
        self
    }

    pub fn in_file(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    /// `path:line:col: severity[code]: message`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = self.path.as_deref().unwrap_or("<input>");
        match self.span {
            Some(s) => write!(f, "{path}:{}:{}: ", s.line, s.col)?,
            None => write!(f, "{path}: ")?,
        }
        write!(f, "{}[{}]: {}", self.severity, self.code, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip_through_text() {
        for &c in Code::ALL {
            assert_eq!(Code::from_str_code(c.as_str()), Some(c));
            assert!(!c.summary().is_empty());
        }
        assert_eq!(Code::from_str_code("E999"), None);
    }

    #[test]
    fn only_unanswered_is_a_warning() {
        let warnings: Vec<_> = Code::ALL
            .iter()
            .filter(|c| c.severity() == Severity::Warning)
            .collect();
        assert_eq!(warnings, vec![&Code::Unanswered]);
    }

    #[test]
    fn renders_location_prefix() {
        let d = Diagnostic::new(Code::Arity, "modify takes 2 arguments")
            .at(Span::new(3, 7, 6))
            .in_file("a.hai");
        assert_eq!(d.to_string(), "a.hai:3:7: error[E-ARITY]: modify takes 2 arguments");
        let w = Diagnostic::new(Code::Unanswered, "x");
        assert_eq!(w.to_string(), "<input>: warning[W-UNANSWERED]: x");
    }
}
