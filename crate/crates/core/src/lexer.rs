//! C11 tokenizer over spliced (logical) text.
//!
//! Tokens and trivia are produced on separate channels. Comments,
//! annotations (`/*@ .. */`, `//@ ..`) and directive lines never reach the
//! parser; the preprocessor and the annotation engine read them from the
//! trivia list.

use std::sync::Arc;

use crate::diag::Diagnostic;
use crate::source::{FileId, Pos, Range};

pub const KEYWORDS: &[&str] = &[
    "auto",
    "break",
    "case",
    "char",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extern",
    "float",
    "for",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "register",
    "restrict",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "typedef",
    "union",
    "unsigned",
    "void",
    "volatile",
    "while",
    "_Alignas",
    "_Alignof",
    "_Atomic",
    "_Bool",
    "_Complex",
    "_Generic",
    "_Imaginary",
    "_Noreturn",
    "_Static_assert",
    "_Thread_local",
];

/// Punctuators, longest first. The second element is the canonical name
/// (digraphs map to the token they stand for).
const PUNCTUATORS: &[(&str, &str)] = &[
    ("%:%:", "##"),
    ("...", "..."),
    ("<<=", "<<="),
    (">>=", ">>="),
    ("->", "->"),
    ("++", "++"),
    ("--", "--"),
    ("<<", "<<"),
    (">>", ">>"),
    ("<=", "<="),
    (">=", ">="),
    ("==", "=="),
    ("!=", "!="),
    ("&&", "&&"),
    ("||", "||"),
    ("*=", "*="),
    ("/=", "/="),
    ("%=", "%="),
    ("+=", "+="),
    ("-=", "-="),
    ("&=", "&="),
    ("^=", "^="),
    ("|=", "|="),
    ("##", "##"),
    ("<:", "["),
    (":>", "]"),
    ("<%", "{"),
    ("%>", "}"),
    ("%:", "#"),
    ("[", "["),
    ("]", "]"),
    ("(", "("),
    (")", ")"),
    ("{", "{"),
    ("}", "}"),
    (".", "."),
    ("&", "&"),
    ("*", "*"),
    ("+", "+"),
    ("-", "-"),
    ("~", "~"),
    ("!", "!"),
    ("/", "/"),
    ("%", "%"),
    ("<", "<"),
    (">", ">"),
    ("^", "^"),
    ("|", "|"),
    ("?", "?"),
    (":", ":"),
    (";", ";"),
    ("=", "="),
    (",", ","),
    ("#", "#"),
];

pub fn keyword(name: &str) -> Option<&'static str> {
    KEYWORDS.iter().copied().find(|k| *k == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(&'static str),
    Identifier,
    IntLit,
    FloatLit,
    CharLit,
    StringLit,
    Punct(&'static str),
}

impl TokenKind {
    pub fn name(&self) -> &'static str {
        match self {
            TokenKind::Keyword(_) => "keyword",
            TokenKind::Identifier => "identifier",
            TokenKind::IntLit => "integer_lit",
            TokenKind::FloatLit => "float_lit",
            TokenKind::CharLit => "char_lit",
            TokenKind::StringLit => "string_lit",
            TokenKind::Punct(_) => "punctuator",
        }
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self, TokenKind::Punct(q) if *q == p)
    }
}

/// Where a macro-expanded token came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub macro_name: String,
    /// Range of the outermost invocation in the including text.
    pub invocation: Range,
    pub invocation_file: FileId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub range: Range,
    pub file: FileId,
    pub origin: Option<Arc<Provenance>>,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind.is_punct(p)
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Identifier
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationStyle {
    Block,
    Line,
}

/// Error handling for annotation commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ErrorMode {
    #[default]
    Strict,
    Permissive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriviaKind {
    BlockComment,
    LineComment,
    /// `pragma` is `Some(Permissive)` for `/*@* .. */`, `None` otherwise.
    Annotation {
        style: AnnotationStyle,
        pragma: Option<ErrorMode>,
    },
    DirectiveLine,
    /// Bytes skipped by error recovery.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trivia {
    pub kind: TriviaKind,
    pub payload: String,
    pub range: Range,
    pub file: FileId,
    /// Set for annotations found inside a directive line; their bytes are
    /// also covered by that directive's range.
    pub nested: bool,
}

#[derive(Debug, Clone, Default)]
pub struct LexOutput {
    pub tokens: Vec<Token>,
    pub trivia: Vec<Trivia>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Tokenize a whole logical text.
pub fn tokenize(src: &str) -> LexOutput {
    Lexer::new(src, Pos::START, FileId(0)).run()
}

/// Tokenize `src`, which starts at `base` inside file `file`.
pub fn tokenize_at(src: &str, base: Pos, file: FileId) -> LexOutput {
    Lexer::new(src, base, file).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    i: usize,
    base: usize,
    line: u32,
    col: u32,
    file: FileId,
    at_line_start: bool,
    out: LexOutput,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, base: Pos, file: FileId) -> Lexer<'a> {
        Lexer {
            src,
            bytes: src.as_bytes(),
            i: 0,
            base: base.offset,
            line: base.line,
            col: base.col,
            file,
            at_line_start: true,
            out: LexOutput::default(),
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            offset: self.base + self.i,
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self, k: usize) -> u8 {
        self.bytes.get(self.i + k).copied().unwrap_or(0)
    }

    fn bump(&mut self) {
        let ch = self.src[self.i..].chars().next().unwrap();
        self.i += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn bump_n(&mut self, n: usize) {
        let stop = self.i + n;
        while self.i < stop {
            self.bump();
        }
    }

    fn slice(&self, start: Pos) -> &'a str {
        &self.src[start.offset - self.base..self.i]
    }

    fn run(mut self) -> LexOutput {
        while self.i < self.bytes.len() {
            let c = self.peek(0);
            match c {
                b' ' | b'\t' | b'\r' | 0x0b | 0x0c => self.bump(),
                b'\n' => {
                    self.bump();
                    self.at_line_start = true;
                }
                b'/' if self.peek(1) == b'*' => self.block_comment(false),
                b'/' if self.peek(1) == b'/' => self.line_comment(false),
                b'#' if self.at_line_start => self.directive(),
                b'%' if self.at_line_start && self.peek(1) == b':' => self.directive(),
                _ => {
                    self.at_line_start = false;
                    self.token();
                }
            }
        }
        self.out
    }

    fn push_trivia(&mut self, kind: TriviaKind, payload: String, start: Pos, nested: bool) {
        let range = Range::new(start, self.pos());
        self.out.trivia.push(Trivia {
            kind,
            payload,
            range,
            file: self.file,
            nested,
        });
    }

    fn diag(&mut self, range: Range, msg: impl Into<String>) {
        self.out
            .diagnostics
            .push(Diagnostic::error(range, msg).in_file(self.file));
    }

    /// Consume a block comment starting at `/*`.
    fn block_comment(&mut self, nested: bool) {
        let start = self.pos();
        self.bump_n(2);
        let body_start = self.i;
        let annotation = self.peek(0) == b'@';
        let mut pragma = None;
        if annotation {
            self.bump();
            if self.peek(0) == b'*' && self.peek(1) != b'/' {
                pragma = Some(ErrorMode::Permissive);
                self.bump();
            }
        }
        let payload_start = self.i;
        let mut terminated = false;
        while self.i < self.bytes.len() {
            if self.peek(0) == b'*' && self.peek(1) == b'/' {
                terminated = true;
                break;
            }
            self.bump();
        }
        let payload_end = self.i;
        if terminated {
            self.bump_n(2);
        } else {
            let r = Range::new(start, self.pos());
            self.diag(r, "unterminated block comment");
        }
        let (kind, payload) = if annotation {
            (
                TriviaKind::Annotation {
                    style: AnnotationStyle::Block,
                    pragma,
                },
                self.src[payload_start..payload_end].to_string(),
            )
        } else {
            (
                TriviaKind::BlockComment,
                self.src[body_start..payload_end].to_string(),
            )
        };
        // Comments inside a directive are recorded only when they are
        // annotations; plain comments are part of the directive line.
        if !nested || annotation {
            self.push_trivia(kind, payload, start, nested);
        }
    }

    fn line_comment(&mut self, nested: bool) {
        let start = self.pos();
        self.bump_n(2);
        let annotation = self.peek(0) == b'@';
        if annotation {
            self.bump();
        }
        let payload_start = self.i;
        while self.i < self.bytes.len() && self.peek(0) != b'\n' {
            self.bump();
        }
        let payload = self.src[payload_start..self.i].to_string();
        let kind = if annotation {
            TriviaKind::Annotation {
                style: AnnotationStyle::Line,
                pragma: None,
            }
        } else {
            TriviaKind::LineComment
        };
        if !nested || annotation {
            self.push_trivia(kind, payload, start, nested);
        }
    }

    /// A directive runs from `#` to the end of the line. Block comments may
    /// carry it across physical lines.
    fn directive(&mut self) {
        let start = self.pos();
        let nested_from = self.out.trivia.len();
        while self.i < self.bytes.len() {
            match self.peek(0) {
                b'\n' => break,
                b'/' if self.peek(1) == b'*' => self.block_comment(true),
                b'/' if self.peek(1) == b'/' => self.line_comment(true),
                q @ (b'"' | b'\'') => self.skip_quoted(q),
                _ => self.bump(),
            }
        }
        let payload = self.slice(start).to_string();
        let range = Range::new(start, self.pos());
        // Keep directive before the annotations nested in it.
        self.out.trivia.insert(
            nested_from,
            Trivia {
                kind: TriviaKind::DirectiveLine,
                payload,
                range,
                file: self.file,
                nested: false,
            },
        );
    }

    fn skip_quoted(&mut self, q: u8) {
        self.bump();
        while self.i < self.bytes.len() {
            match self.peek(0) {
                b'\\' if self.peek(1) != b'\n' && self.i + 1 < self.bytes.len() => {
                    self.bump();
                    self.bump();
                }
                b'\n' => return,
                c if c == q => {
                    self.bump();
                    return;
                }
                _ => self.bump(),
            }
        }
    }

    /// Skip to end of line after an error, recording the skipped bytes.
    fn recover(&mut self, start: Pos) {
        while self.i < self.bytes.len() && self.peek(0) != b'\n' {
            self.bump();
        }
        let payload = self.slice(start).to_string();
        self.push_trivia(TriviaKind::Skipped, payload, start, false);
    }

    fn push_token(&mut self, kind: TokenKind, start: Pos) {
        let text = self.slice(start).to_string();
        self.out.tokens.push(Token {
            kind,
            text,
            range: Range::new(start, self.pos()),
            file: self.file,
            origin: None,
        });
    }

    fn token(&mut self) {
        let start = self.pos();
        let c = self.peek(0);
        if c.is_ascii_alphabetic() || c == b'_' {
            // Encoding prefixes for literals.
            let prefix_len = match (c, self.peek(1), self.peek(2)) {
                (b'u', b'8', b'"') => 2,
                (b'L' | b'u' | b'U', b'"' | b'\'', _) => 1,
                _ => 0,
            };
            if prefix_len > 0 {
                let q = self.peek(prefix_len);
                self.bump_n(prefix_len);
                return self.quoted(q, start);
            }
            while self.peek(0).is_ascii_alphanumeric() || self.peek(0) == b'_' {
                self.bump();
            }
            if self.peek(0) == b'\\' && matches!(self.peek(1), b'u' | b'U') {
                let r = Range::new(start, self.pos());
                self.diag(r, "universal character names in identifiers are not supported");
                return self.recover(start);
            }
            let text = self.slice(start);
            let kind = match keyword(text) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Identifier,
            };
            return self.push_token(kind, start);
        }
        if c.is_ascii_digit() || (c == b'.' && self.peek(1).is_ascii_digit()) {
            return self.number(start);
        }
        if c == b'"' || c == b'\'' {
            return self.quoted(c, start);
        }
        let rest = &self.src[self.i..];
        if let Some(&(spelling, canon)) = PUNCTUATORS.iter().find(|(p, _)| rest.starts_with(p)) {
            self.bump_n(spelling.len());
            return self.push_token(TokenKind::Punct(canon), start);
        }
        self.bump();
        let r = Range::new(start, self.pos());
        let ch = self.slice(start).to_string();
        self.diag(r, format!("stray character {ch:?}"));
        self.recover(start);
    }

    fn number(&mut self, start: Pos) {
        loop {
            let c = self.peek(0);
            if matches!(c, b'e' | b'E' | b'p' | b'P') && matches!(self.peek(1), b'+' | b'-') {
                self.bump_n(2);
            } else if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' {
                self.bump();
            } else {
                break;
            }
        }
        let text = self.slice(start);
        let hex = text.starts_with("0x") || text.starts_with("0X");
        let float = if hex {
            text.contains(['.', 'p', 'P'])
        } else {
            text.contains(['.', 'e', 'E'])
        };
        let kind = if float {
            TokenKind::FloatLit
        } else {
            TokenKind::IntLit
        };
        self.push_token(kind, start);
    }

    fn quoted(&mut self, q: u8, start: Pos) {
        self.bump();
        loop {
            match self.peek(0) {
                0 if self.i >= self.bytes.len() => break,
                b'\n' => break,
                b'\\' => {
                    self.bump();
                    if self.i < self.bytes.len() && self.peek(0) != b'\n' {
                        self.bump();
                    }
                }
                c if c == q => {
                    self.bump();
                    let kind = if q == b'"' {
                        TokenKind::StringLit
                    } else {
                        TokenKind::CharLit
                    };
                    return self.push_token(kind, start);
                }
                _ => self.bump(),
            }
        }
        let r = Range::new(start, self.pos());
        let what = if q == b'"' { "string" } else { "character" };
        self.diag(r, format!("unterminated {what} literal"));
        self.recover(start);
    }
}

/// An annotation comment, with the delimiters and pragma marker removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationTrivia {
    pub style: AnnotationStyle,
    pub pragma: Option<ErrorMode>,
    pub payload: String,
    /// Logical position where the payload text starts.
    pub payload_start: Pos,
    pub range: Range,
}

/// Returns the annotation view of a comment trivia, or `None` for plain
/// comments and directive lines.
pub fn classify_annotation(t: &Trivia) -> Option<AnnotationTrivia> {
    match t.kind {
        TriviaKind::Annotation { style, pragma } => {
            let lead = match (style, pragma) {
                (AnnotationStyle::Block, Some(_)) => 4,
                _ => 3,
            };
            let trimmed = t.payload.trim_start();
            let skipped = &t.payload[..t.payload.len() - trimmed.len()];
            let mut payload_start = t.range.start;
            payload_start.offset += lead;
            payload_start.col += lead as u32;
            for ch in skipped.chars() {
                payload_start.offset += ch.len_utf8();
                if ch == '\n' {
                    payload_start.line += 1;
                    payload_start.col = 1;
                } else {
                    payload_start.col += 1;
                }
            }
            Some(AnnotationTrivia {
                style,
                pragma,
                payload: trimmed.trim_end().to_string(),
                payload_start,
                range: t.range,
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_texts(out: &LexOutput) -> Vec<(TokenKind, &str)> {
        out.tokens.iter().map(|t| (t.kind, t.text.as_str())).collect()
    }

    #[test]
    fn tokens_and_annotation() {
        let out = tokenize("int x; /*@ highlight */");
        assert_eq!(
            kinds_texts(&out),
            vec![
                (TokenKind::Keyword("int"), "int"),
                (TokenKind::Identifier, "x"),
                (TokenKind::Punct(";"), ";"),
            ]
        );
        assert_eq!(out.trivia.len(), 1);
        assert_eq!(out.trivia[0].payload, " highlight ");
        assert!(matches!(
            out.trivia[0].kind,
            TriviaKind::Annotation {
                style: AnnotationStyle::Block,
                pragma: None
            }
        ));
    }

    #[test]
    fn comment_styles_do_not_mix() {
        let out = tokenize("/* a // b */ 1");
        assert_eq!(out.trivia.len(), 1);
        assert_eq!(out.trivia[0].kind, TriviaKind::BlockComment);
        assert_eq!(kinds_texts(&out), vec![(TokenKind::IntLit, "1")]);

        let out = tokenize("// x /* y\nz */");
        assert_eq!(out.trivia[0].kind, TriviaKind::LineComment);
        assert_eq!(out.tokens[0].text, "z");
    }

    #[test]
    fn block_comments_do_not_nest() {
        let out = tokenize("/* /* */ x");
        assert_eq!(out.trivia.len(), 1);
        assert_eq!(out.tokens[0].text, "x");
    }

    #[test]
    fn empty_input() {
        let out = tokenize("");
        assert!(out.tokens.is_empty() && out.trivia.is_empty() && out.diagnostics.is_empty());
    }

    #[test]
    fn numbers() {
        let out = tokenize("1 0x1F 1.5 1e10 0x1p3 07u 1ULL .5f");
        let k: Vec<_> = out.tokens.iter().map(|t| t.kind).collect();
        use TokenKind::*;
        assert_eq!(
            k,
            vec![IntLit, IntLit, FloatLit, FloatLit, FloatLit, IntLit, IntLit, FloatLit]
        );
    }

    #[test]
    fn literals_and_prefixes() {
        let out = tokenize(r#"'a' L'b' "s\"t" u8"x" U"y""#);
        let k: Vec<_> = out.tokens.iter().map(|t| t.kind).collect();
        use TokenKind::*;
        assert_eq!(k, vec![CharLit, CharLit, StringLit, StringLit, StringLit]);
    }

    #[test]
    fn digraphs() {
        let out = tokenize("<: :> <% %>");
        let k: Vec<_> = out.tokens.iter().map(|t| t.kind).collect();
        use TokenKind::*;
        assert_eq!(k, vec![Punct("["), Punct("]"), Punct("{"), Punct("}")]);
    }

    #[test]
    fn directive_with_annotation() {
        let out = tokenize("#define N /*@ highlight */ 3\nint x;");
        assert_eq!(out.trivia[0].kind, TriviaKind::DirectiveLine);
        assert_eq!(out.trivia[0].payload, "#define N /*@ highlight */ 3");
        assert!(out.trivia[1].nested);
        assert_eq!(out.trivia[1].payload, " highlight ");
        assert_eq!(out.tokens.len(), 3);
    }

    #[test]
    fn directive_after_comment_and_multiline_comment() {
        let out = tokenize("/* c */ #define A /* x\n y */ 1\nA");
        let d = out.trivia.iter().find(|t| t.kind == TriviaKind::DirectiveLine).unwrap();
        assert_eq!(d.payload, "#define A /* x\n y */ 1");
        assert_eq!(out.tokens.len(), 1);
    }

    #[test]
    fn hash_not_at_line_start_is_a_token() {
        let out = tokenize("x # y");
        assert_eq!(out.tokens[1].kind, TokenKind::Punct("#"));
    }

    #[test]
    fn errors_recover_at_next_line() {
        let out = tokenize("int $ x;\nint y;");
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.tokens.iter().filter(|t| t.text == "y").count(), 1);
        assert!(out.tokens.iter().all(|t| t.text != "x"));

        let out = tokenize("char *s = \"abc\nint z;");
        assert_eq!(out.diagnostics.len(), 1);
        assert!(out.diagnostics[0].message.contains("unterminated string"));
        assert!(out.tokens.iter().any(|t| t.text == "z"));

        let out = tokenize("int a; /* open");
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.tokens.len(), 3);
    }

    #[test]
    fn ucn_identifier_rejected() {
        let out = tokenize("int a\\u00e9;\n");
        assert_eq!(out.diagnostics.len(), 1);
    }

    #[test]
    fn positions_track_lines() {
        let out = tokenize("int\n  x;");
        let x = &out.tokens[1];
        assert_eq!((x.range.start.line, x.range.start.col), (2, 3));
        assert_eq!(x.range.start.offset, 6);
    }

    #[test]
    fn classify() {
        let out = tokenize("/*@ assert ⟨a > i⟩ */ /* plain */ //@ +++@ highlight");
        let a = classify_annotation(&out.trivia[0]).unwrap();
        assert_eq!(a.payload, "assert ⟨a > i⟩");
        assert_eq!(a.style, AnnotationStyle::Block);
        assert!(classify_annotation(&out.trivia[1]).is_none());
        let b = classify_annotation(&out.trivia[2]).unwrap();
        assert_eq!(b.payload, "+++@ highlight");
        assert_eq!(b.style, AnnotationStyle::Line);
    }

    #[test]
    fn permissive_pragma() {
        let out = tokenize("/*@* highlight */ /*@*/");
        let a = classify_annotation(&out.trivia[0]).unwrap();
        assert_eq!(a.pragma, Some(ErrorMode::Permissive));
        assert_eq!(a.payload, "highlight");
        assert_eq!(a.payload_start.offset, 5);
        let b = classify_annotation(&out.trivia[1]).unwrap();
        assert_eq!(b.pragma, None);
        assert_eq!(b.payload, "");
    }
}
