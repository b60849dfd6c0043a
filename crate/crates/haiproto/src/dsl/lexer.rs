use crate::diag::{Code, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifiers and contextual keywords. Interior `-` is allowed when
    /// followed by another identifier character.
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Semi,
    Define,
    Arrow,
    LArrow,
    Dot,
    Pipe,
    At,
    Eq,
    Comment(String),
    Doc(String),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Define => "`:=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LArrow => "`<-`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Comment(_) | Tok::Doc(_) => "comment".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn rest_of_line(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }
}

fn comment_text(raw: String) -> String {
    let t = raw.strip_prefix(' ').map(str::to_string).unwrap_or(raw);
    t.trim_end().to_string()
}

/// Tokenize; lexical errors are reported and the offending character skipped,
/// so the token stream is always usable for further error reporting.
pub fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, col) = (cur.line, cur.col);
        let at = |len: usize| Span::new(line, col, len);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            cur.bump();
            cur.bump();
            let doc = cur.peek() == Some('/');
            if doc {
                cur.bump();
            }
            let body = comment_text(cur.rest_of_line());
            let len = cur.col - col;
            toks.push(Token {
                tok: if doc { Tok::Doc(body) } else { Tok::Comment(body) },
                span: at(len),
            });
            continue;
        }
        if ident_start(c) {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if ident_char(c) {
                    s.push(c);
                    cur.bump();
                } else if c == '-' && cur.peek2().is_some_and(ident_char) {
                    s.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            let len = s.chars().count();
            toks.push(Token { tok: Tok::Ident(s), span: at(len) });
            continue;
        }
        if c == '"' {
            cur.bump();
            let mut s = String::new();
            let mut closed = false;
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match cur.bump() {
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some(other) => {
                            diags.push(
                                Diagnostic::new(Code::Lex, format!("unknown escape `\\{other}`"))
                                    .at(Span::new(cur.line, cur.col.saturating_sub(2).max(1), 2)),
                            );
                        }
                        None => break,
                    },
                    other => s.push(other),
                }
            }
            let len = cur.col.saturating_sub(col).max(1);
            if closed {
                toks.push(Token { tok: Tok::Str(s), span: at(len) });
            } else {
                diags.push(Diagnostic::new(Code::Lex, "unterminated string").at(at(len)));
            }
            continue;
        }
        let two = |cur: &mut Cursor, t: Tok, toks: &mut Vec<Token>| {
            cur.bump();
            cur.bump();
            toks.push(Token { tok: t, span: Span::new(line, col, 2) });
        };
        match (c, cur.peek2()) {
            (':', Some('=')) => two(&mut cur, Tok::Define, &mut toks),
            ('-', Some('>')) => two(&mut cur, Tok::Arrow, &mut toks),
            ('<', Some('-')) => two(&mut cur, Tok::LArrow, &mut toks),
            _ => {
                cur.bump();
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    '|' => Tok::Pipe,
                    '@' => Tok::At,
                    '=' => Tok::Eq,
                    other => {
                        diags.push(
                            Diagnostic::new(Code::Lex, format!("unexpected character {other:?}")).at(at(1)),
                        );
                        continue;
                    }
                };
                toks.push(Token { tok, span: at(1) });
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, span: Span::new(cur.line, cur.col, 0) });
    (toks, diags)
}
