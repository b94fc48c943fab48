//! A restricted, deterministic preprocessor.
//!
//! Supported: object-like and function-like `#define`, `#undef` and
//! `#include`. Conditional compilation, stringizing, token pasting and
//! variadic macros are reported as unsupported. Expansion follows the
//! hide-set discipline, so it terminates on every input.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Num;

use crate::diag::Diagnostic;
use crate::lexer::{self, Provenance, Token, TokenKind, Trivia, TriviaKind};
use crate::source::{FileId, Range, SourceFile, SourceSet};

pub const MAX_INCLUDE_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroDef {
    pub name: String,
    pub params: Option<Vec<String>>,
    pub body: Vec<Token>,
    pub def_range: Range,
    pub file: FileId,
}

impl MacroDef {
    fn same_definition(&self, other: &MacroDef) -> bool {
        self.params == other.params
            && self.body.len() == other.body.len()
            && self
                .body
                .iter()
                .zip(&other.body)
                .all(|(a, b)| a.kind == b.kind && a.text == b.text)
    }
}

#[derive(Debug, Clone, Default)]
pub struct MacroTable {
    map: HashMap<String, MacroDef>,
}

impl MacroTable {
    pub fn new() -> MacroTable {
        MacroTable::default()
    }

    /// Insert a definition. Returns a warning when an existing definition
    /// with a different body is replaced.
    pub fn define(&mut self, def: MacroDef) -> Option<Diagnostic> {
        let warn = match self.map.get(&def.name) {
            Some(old) if !old.same_definition(&def) => Some(
                Diagnostic::warning(def.def_range, format!("macro `{}` redefined", def.name))
                    .in_file(def.file),
            ),
            _ => None,
        };
        self.map.insert(def.name.clone(), def);
        warn
    }

    pub fn undef(&mut self, name: &str) -> Option<MacroDef> {
        self.map.remove(name)
    }

    pub fn get(&self, name: &str) -> Option<&MacroDef> {
        self.map.get(name)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectiveKind {
    Define(MacroDef),
    Undef(String),
    Include { path: String, angled: bool },
    /// Preserved but unsupported (`#if`, `#pragma`, ...).
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub kind: DirectiveKind,
    /// Tokens after the directive name.
    pub args: Vec<Token>,
    pub range: Range,
    pub file: FileId,
}

/// Turn directive-line trivia into directives, in source order.
pub fn scan_directives(trivia: &[Trivia]) -> (Vec<Directive>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    for t in trivia.iter().filter(|t| t.kind == TriviaKind::DirectiveLine) {
        match scan_one(t) {
            Ok(Some(d)) => out.push(d),
            Ok(None) => {}
            Err(d) => diags.push(d),
        }
    }
    (out, diags)
}

fn scan_one(t: &Trivia) -> Result<Option<Directive>, Diagnostic> {
    // Lex past the introducer, otherwise it would read as a directive again.
    let hash = if t.payload.starts_with("%:") { 2 } else { 1 };
    let mut base = t.range.start;
    base.offset += hash;
    base.col += hash as u32;
    let lexed = lexer::tokenize_at(&t.payload[hash..], base, t.file);
    let malformed = |msg: &str| Diagnostic::error(t.range, msg.to_string()).in_file(t.file);
    let mut toks = lexed.tokens.into_iter();
    let Some(name_tok) = toks.next() else {
        // Null directive.
        return Ok(None);
    };
    let args: Vec<Token> = toks.collect();
    let name = match name_tok.kind {
        TokenKind::Identifier | TokenKind::Keyword(_) => name_tok.text.clone(),
        _ => return Err(malformed("malformed directive: expected a directive name")),
    };
    let kind = match name.as_str() {
        "define" => DirectiveKind::Define(parse_define(&args, t)?),
        "undef" => match args.first() {
            Some(a) if a.is_ident() => DirectiveKind::Undef(a.text.clone()),
            _ => return Err(malformed("malformed #undef: expected an identifier")),
        },
        "include" => {
            let rest = t.payload[name_tok.range.end.offset - t.range.start.offset..].trim();
            let (path, angled) = if let Some(p) = rest.strip_prefix('"').and_then(|r| r.split_once('"')) {
                (p.0.to_string(), false)
            } else if let Some(p) = rest.strip_prefix('<').and_then(|r| r.split_once('>')) {
                (p.0.to_string(), true)
            } else {
                return Err(malformed("malformed #include: expected \"file\" or <file>"));
            };
            DirectiveKind::Include { path, angled }
        }
        _ => DirectiveKind::Other(name),
    };
    Ok(Some(Directive {
        kind,
        args,
        range: t.range,
        file: t.file,
    }))
}

fn parse_define(args: &[Token], t: &Trivia) -> Result<MacroDef, Diagnostic> {
    let err = |msg: String| Diagnostic::error(t.range, msg).in_file(t.file);
    let name = match args.first() {
        Some(a) if a.is_ident() => a,
        _ => return Err(err("malformed #define: expected a macro name".into())),
    };
    let mut rest = &args[1..];
    let mut params = None;
    if let Some(open) = rest.first() {
        if open.is_punct("(") && open.range.start.offset == name.range.end.offset {
            let mut ps = Vec::new();
            let mut i = 1;
            loop {
                match rest.get(i) {
                    Some(p) if p.is_punct(")") && ps.is_empty() => break,
                    Some(p) if p.is_punct("...") => {
                        return Err(err(format!(
                            "unsupported: variadic macro `{}`",
                            name.text
                        )))
                    }
                    Some(p) if p.is_ident() => ps.push(p.text.clone()),
                    _ => return Err(err("malformed macro parameter list".into())),
                }
                i += 1;
                match rest.get(i) {
                    Some(p) if p.is_punct(",") => i += 1,
                    Some(p) if p.is_punct(")") => break,
                    _ => return Err(err("malformed macro parameter list".into())),
                }
            }
            rest = &rest[i + 1..];
            params = Some(ps);
        }
    }
    if let Some(op) = rest.iter().find(|b| b.is_punct("#") || b.is_punct("##")) {
        let what = if op.is_punct("#") { "stringizing `#`" } else { "token pasting `##`" };
        return Err(err(format!("unsupported: {what} in macro `{}`", name.text)));
    }
    Ok(MacroDef {
        name: name.text.clone(),
        params,
        body: rest.to_vec(),
        def_range: t.range,
        file: t.file,
    })
}

/// One macro invocation written in the source, for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionEvent {
    pub macro_name: String,
    pub invocation: Range,
    pub file: FileId,
}

#[derive(Debug, Clone, Default)]
pub struct ExpandOutput {
    pub tokens: Vec<Token>,
    pub expansions: Vec<ExpansionEvent>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
struct HToken {
    tok: Token,
    hide: Arc<Vec<String>>,
}

impl HToken {
    fn hides(&self, name: &str) -> bool {
        self.hide.iter().any(|h| h == name)
    }
}

fn union_with(hs: &[String], name: &str) -> Arc<Vec<String>> {
    let mut v = hs.to_vec();
    if !v.iter().any(|h| h == name) {
        v.push(name.to_string());
        v.sort();
    }
    Arc::new(v)
}

/// Expand macros in `tokens`.
pub fn expand(mt: &MacroTable, tokens: &[Token]) -> ExpandOutput {
    let mut out = ExpandOutput::default();
    let input: VecDeque<HToken> = tokens
        .iter()
        .map(|t| HToken {
            tok: t.clone(),
            hide: Arc::new(Vec::new()),
        })
        .collect();
    let expanded = expand_h(mt, input, &mut out);
    out.tokens = expanded.into_iter().map(|h| h.tok).collect();
    out
}

fn expand_h(
    mt: &MacroTable,
    mut input: VecDeque<HToken>,
    out: &mut ExpandOutput,
) -> Vec<HToken> {
    let mut result = Vec::with_capacity(input.len());
    while let Some(h) = input.pop_front() {
        let def = match h.tok.kind {
            TokenKind::Identifier if !h.hides(&h.tok.text) => mt.get(&h.tok.text),
            _ => None,
        };
        let Some(def) = def else {
            result.push(h);
            continue;
        };
        let (invocation, inv_file) = match &h.tok.origin {
            Some(p) => (p.invocation, p.invocation_file),
            None => (h.tok.range, h.tok.file),
        };
        // Arguments record their own invocations; this one goes first.
        let slot = out.expansions.len();
        let replacement = match &def.params {
            None => {
                let hs = union_with(&h.hide, &def.name);
                substitute(def, &[], hs, invocation, inv_file)
            }
            Some(params) => {
                if !input.front().is_some_and(|t| t.tok.is_punct("(")) {
                    result.push(h);
                    continue;
                }
                let Some((args, rparen, consumed)) = collect_args(&input) else {
                    out.diagnostics.push(
                        Diagnostic::error(h.tok.range, format!("unterminated call of macro `{}`", def.name))
                            .in_file(h.tok.file),
                    );
                    result.push(h);
                    continue;
                };
                let arity_ok = args.len() == params.len()
                    || (params.is_empty() && args.len() == 1 && args[0].is_empty());
                if !arity_ok {
                    out.diagnostics.push(
                        Diagnostic::error(
                            h.tok.range,
                            format!(
                                "macro `{}` expects {} argument(s), got {}",
                                def.name,
                                params.len(),
                                args.len()
                            ),
                        )
                        .in_file(h.tok.file),
                    );
                    result.push(h);
                    continue;
                }
                let invocation = if h.tok.origin.is_some() {
                    invocation
                } else {
                    invocation.hull(rparen.tok.range)
                };
                input.drain(..consumed);
                let common: Vec<String> = h
                    .hide
                    .iter()
                    .filter(|n| rparen.hides(n))
                    .cloned()
                    .collect();
                let hs = union_with(&common, &def.name);
                let expanded_args: Vec<Vec<HToken>> = if params.is_empty() {
                    Vec::new()
                } else {
                    args.into_iter()
                        .map(|a| expand_h(mt, a.into(), out))
                        .collect()
                };
                substitute(def, &expanded_args, hs, invocation, inv_file)
            }
        };
        // Only invocations written in the source, including those inside
        // another macro's arguments.
        if h.tok.origin.is_none() {
            out.expansions.insert(
                slot,
                ExpansionEvent {
                    macro_name: def.name.clone(),
                    invocation,
                    file: inv_file,
                },
            );
        }
        for t in replacement.into_iter().rev() {
            input.push_front(t);
        }
    }
    result
}

/// Split `( a , b )` at top-level commas. Returns the arguments, the closing
/// parenthesis and the number of tokens consumed.
fn collect_args(input: &VecDeque<HToken>) -> Option<(Vec<Vec<HToken>>, HToken, usize)> {
    let mut depth = 0usize;
    let mut args = vec![Vec::new()];
    for (i, t) in input.iter().enumerate().skip(1) {
        if t.tok.is_punct("(") {
            depth += 1;
        } else if t.tok.is_punct(")") {
            if depth == 0 {
                return Some((args, t.clone(), i + 1));
            }
            depth -= 1;
        } else if t.tok.is_punct(",") && depth == 0 {
            args.push(Vec::new());
            continue;
        }
        args.last_mut().unwrap().push(t.clone());
    }
    None
}

fn substitute(
    def: &MacroDef,
    args: &[Vec<HToken>],
    hs: Arc<Vec<String>>,
    invocation: Range,
    inv_file: FileId,
) -> Vec<HToken> {
    let prov = Arc::new(Provenance {
        macro_name: def.name.clone(),
        invocation,
        invocation_file: inv_file,
    });
    let params = def.params.as_deref().unwrap_or(&[]);
    let mut out = Vec::new();
    let relocate = |mut tok: Token, hide: Arc<Vec<String>>| {
        tok.range = invocation;
        tok.file = inv_file;
        tok.origin = Some(prov.clone());
        HToken { tok, hide }
    };
    for b in &def.body {
        match params.iter().position(|p| b.is_ident() && *p == b.text) {
            Some(ix) => {
                for a in &args[ix] {
                    let mut merged: Vec<String> = a.hide.to_vec();
                    for n in hs.iter() {
                        if !merged.contains(n) {
                            merged.push(n.clone());
                        }
                    }
                    merged.sort();
                    out.push(relocate(a.tok.clone(), Arc::new(merged)));
                }
            }
            None => out.push(relocate(b.clone(), hs.clone())),
        }
    }
    out
}

/// Value of a C integer literal, ignoring suffixes.
pub fn int_literal_value(text: &str) -> Option<BigInt> {
    let t = text.trim_end_matches(['u', 'U', 'l', 'L']);
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        BigInt::from_str_radix(hex, 16).ok()
    } else if t.len() > 1 && t.starts_with('0') {
        BigInt::from_str_radix(&t[1..], 8).ok()
    } else {
        BigInt::from_str_radix(t, 10).ok()
    }
}

/// A `#define` surfaced to back-ends as a definition event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefineEvent {
    pub name: String,
    pub body_text: String,
    pub range: Range,
    pub file: FileId,
    /// Set when the body is a single integer literal.
    pub value: Option<BigInt>,
}

/// Locates included files.
pub trait IncludeResolver {
    fn resolve(&self, path: &str, angled: bool, from: Option<&Path>) -> Option<SourceFile>;
}

/// Resolves against the including file's directory, then the search path.
#[derive(Debug, Clone, Default)]
pub struct FsResolver {
    pub include_dirs: Vec<PathBuf>,
}

impl IncludeResolver for FsResolver {
    fn resolve(&self, path: &str, angled: bool, from: Option<&Path>) -> Option<SourceFile> {
        let mut candidates = Vec::new();
        if !angled {
            if let Some(dir) = from.and_then(Path::parent) {
                candidates.push(dir.join(path));
            }
        }
        candidates.extend(self.include_dirs.iter().map(|d| d.join(path)));
        candidates.into_iter().find_map(|p| {
            let text = std::fs::read_to_string(&p).ok()?;
            Some(SourceFile::new(p.display().to_string(), text).with_path(p))
        })
    }
}

/// In-memory resolver keyed by the spelled path.
#[derive(Debug, Clone, Default)]
pub struct MapResolver {
    pub files: HashMap<String, String>,
}

impl IncludeResolver for MapResolver {
    fn resolve(&self, path: &str, _angled: bool, _from: Option<&Path>) -> Option<SourceFile> {
        self.files
            .get(path)
            .map(|text| SourceFile::new(path.to_string(), text.clone()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct PreprocOutput {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
    pub expansions: Vec<ExpansionEvent>,
    pub definitions: Vec<DefineEvent>,
    /// Integer-valued macros in effect at the end of the main file.
    pub constants: BTreeMap<String, BigInt>,
    pub table: MacroTable,
}

/// Runs directives and expansion over one lexed file, splicing includes.
pub struct Preprocessor<'a> {
    resolver: &'a dyn IncludeResolver,
    sources: &'a mut SourceSet,
    out: PreprocOutput,
}

impl<'a> Preprocessor<'a> {
    pub fn new(resolver: &'a dyn IncludeResolver, sources: &'a mut SourceSet) -> Preprocessor<'a> {
        Preprocessor {
            resolver,
            sources,
            out: PreprocOutput::default(),
        }
    }

    pub fn with_table(mut self, table: MacroTable) -> Self {
        self.out.table = table;
        self
    }

    pub fn run(mut self, tokens: &[Token], trivia: &[Trivia]) -> PreprocOutput {
        let toks = self.process(tokens, trivia, 0);
        self.out.tokens = toks;
        self.out
    }

    fn process(&mut self, tokens: &[Token], trivia: &[Trivia], depth: usize) -> Vec<Token> {
        let (directives, diags) = scan_directives(trivia);
        self.out.diagnostics.extend(diags);
        let mut result = Vec::with_capacity(tokens.len());
        let mut next_tok = 0;
        for d in directives {
            let upto = tokens[next_tok..].partition_point(|t| t.range.start.offset < d.range.start.offset);
            self.flush(&tokens[next_tok..next_tok + upto], &mut result);
            next_tok += upto;
            self.apply(d, depth, &mut result);
        }
        self.flush(&tokens[next_tok..], &mut result);
        result
    }

    fn flush(&mut self, segment: &[Token], result: &mut Vec<Token>) {
        if segment.is_empty() {
            return;
        }
        if self.out.table.is_empty() {
            result.extend_from_slice(segment);
            return;
        }
        let e = expand(&self.out.table, segment);
        result.extend(e.tokens);
        self.out.expansions.extend(e.expansions);
        self.out.diagnostics.extend(e.diagnostics);
    }

    fn apply(&mut self, d: Directive, depth: usize, result: &mut Vec<Token>) {
        match d.kind {
            DirectiveKind::Define(def) => {
                let value = match def.body.as_slice() {
                    [t] if t.kind == TokenKind::IntLit => int_literal_value(&t.text),
                    _ => None,
                };
                match &value {
                    Some(v) => {
                        self.out.constants.insert(def.name.clone(), v.clone());
                    }
                    None => {
                        self.out.constants.remove(&def.name);
                    }
                }
                self.out.definitions.push(DefineEvent {
                    name: def.name.clone(),
                    body_text: def
                        .body
                        .iter()
                        .map(|t| t.text.as_str())
                        .collect::<Vec<_>>()
                        .join(" "),
                    range: def.def_range,
                    file: def.file,
                    value,
                });
                if let Some(w) = self.out.table.define(def) {
                    self.out.diagnostics.push(w);
                }
            }
            DirectiveKind::Undef(name) => {
                self.out.table.undef(&name);
                self.out.constants.remove(&name);
            }
            DirectiveKind::Include { path, angled } => {
                if let Some(toks) = self.include(&path, angled, d.range, d.file, depth + 1) {
                    result.extend(toks);
                }
            }
            DirectiveKind::Other(name) => {
                self.out.diagnostics.push(
                    Diagnostic::warning(d.range, format!("unsupported directive `#{name}` ignored"))
                        .in_file(d.file),
                );
            }
        }
    }

    fn include(&mut self, path: &str, angled: bool, range: Range, from: FileId, depth: usize) -> Option<Vec<Token>> {
        if depth > MAX_INCLUDE_DEPTH {
            self.out.diagnostics.push(
                Diagnostic::error(range, format!("include depth limit exceeded at depth {depth}"))
                    .in_file(from),
            );
            return None;
        }
        let from_path = self.sources.get(from).source.path.clone();
        let Some(src) = self.resolver.resolve(path, angled, from_path.as_deref()) else {
            self.out.diagnostics.push(
                Diagnostic::error(range, format!("cannot resolve include `{path}`")).in_file(from),
            );
            return None;
        };
        let id = self.sources.add(src);
        let logical = self.sources.get(id).logical.clone();
        let lexed = lexer::tokenize_at(&logical, crate::source::Pos::START, id);
        self.out.diagnostics.extend(lexed.diagnostics);
        Some(self.process(&lexed.tokens, &lexed.trivia, depth))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;

    fn texts(ts: &[Token]) -> Vec<&str> {
        ts.iter().map(|t| t.text.as_str()).collect()
    }

    fn pp(src: &str, files: &[(&str, &str)]) -> PreprocOutput {
        let mut set = SourceSet::default();
        let id = set.add(SourceFile::new("main.c", src.to_string()));
        let resolver = MapResolver {
            files: files.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        };
        let lexed = tokenize(&set.get(id).logical.clone());
        Preprocessor::new(&resolver, &mut set).run(&lexed.tokens, &lexed.trivia)
    }

    #[test]
    fn scan_define_and_include() {
        let lexed = tokenize("#define SQRT_UINT_MAX 65536\n#include \"lib.h\"\n#pragma once\n");
        let (ds, diags) = scan_directives(&lexed.trivia);
        assert!(diags.is_empty());
        assert_eq!(ds.len(), 3);
        match &ds[0].kind {
            DirectiveKind::Define(d) => {
                assert_eq!(d.name, "SQRT_UINT_MAX");
                assert_eq!(texts(&d.body), vec!["65536"]);
                assert!(d.params.is_none());
            }
            k => panic!("{k:?}"),
        }
        assert_eq!(
            ds[1].kind,
            DirectiveKind::Include {
                path: "lib.h".into(),
                angled: false
            }
        );
        assert_eq!(ds[2].kind, DirectiveKind::Other("pragma".into()));
        assert!(scan_directives(&[]).0.is_empty());
    }

    #[test]
    fn malformed_directives() {
        let lexed = tokenize("#define 3 x\n#define F(a,) a\n#define G(x...) x\n#define S(x) #x\n");
        let (ds, diags) = scan_directives(&lexed.trivia);
        assert!(ds.is_empty());
        assert_eq!(diags.len(), 4);
        assert!(diags[3].message.contains("stringizing"));
    }

    #[test]
    fn object_like() {
        let out = pp("#define N 3\nN+N", &[]);
        assert_eq!(texts(&out.tokens), vec!["3", "+", "3"]);
        assert_eq!(out.expansions.len(), 2);
        assert_eq!(out.constants.get("N"), Some(&BigInt::from(3)));
    }

    #[test]
    fn function_like() {
        let out = pp("#define F(x) x*x\nF(2)", &[]);
        assert_eq!(texts(&out.tokens), vec!["2", "*", "2"]);
        let out = pp("#define F(x, y) (x+y)\nF((1,2), 3)", &[]);
        assert_eq!(texts(&out.tokens), vec!["(", "(", "1", ",", "2", ")", "+", "3", ")"]);
        let out = pp("#define Z() 0\nZ()", &[]);
        assert_eq!(texts(&out.tokens), vec!["0"]);
    }

    #[test]
    fn invocations_in_arguments_are_recorded_once() {
        let out = pp("#define N 3\n#define SQ(x) x*x\n#define ID(x) x\nSQ(N) ID(SQ(1))", &[]);
        let names: Vec<_> = out.expansions.iter().map(|e| e.macro_name.as_str()).collect();
        assert_eq!(names, ["SQ", "N", "ID", "SQ"]);
    }

    #[test]
    fn function_like_without_parens_is_not_a_call() {
        let out = pp("#define F(x) x\nint F;", &[]);
        assert_eq!(texts(&out.tokens), vec!["int", "F", ";"]);
    }

    #[test]
    fn wrong_arity_left_unexpanded() {
        let out = pp("#define F(x) x\nF(1,2)", &[]);
        assert_eq!(texts(&out.tokens), vec!["F", "(", "1", ",", "2", ")"]);
        assert_eq!(out.diagnostics.len(), 1);
    }

    #[test]
    fn self_reference_is_hidden() {
        let out = pp("#define A A\nA", &[]);
        assert_eq!(texts(&out.tokens), vec!["A"]);
        let out = pp("#define A B\n#define B A\nA B", &[]);
        assert_eq!(texts(&out.tokens), vec!["A", "B"]);
        let out = pp("#define f(x) x f\nf(1)(2)", &[]);
        assert_eq!(texts(&out.tokens), vec!["1", "f", "(", "2", ")"]);
    }

    #[test]
    fn nested_args_expand() {
        let out = pp("#define N 4\n#define SQ(x) x*x\nSQ(N)", &[]);
        assert_eq!(texts(&out.tokens), vec!["4", "*", "4"]);
        let e = &out.tokens[0].origin.as_ref().unwrap();
        assert_eq!(e.invocation.start.offset, 30);
        assert_eq!(e.invocation.end.offset, 35);
    }

    #[test]
    fn provenance_points_at_invocation() {
        let out = pp("#define N 3\nint x = N;", &[]);
        let three = out.tokens.iter().find(|t| t.text == "3").unwrap();
        let p = three.origin.as_ref().unwrap();
        assert_eq!(p.macro_name, "N");
        assert_eq!(three.range, p.invocation);
        assert_eq!(p.invocation.start.line, 2);
    }

    #[test]
    fn redefinition_warns() {
        let out = pp("#define N 1\n#define N 1\n#define N 2\nN", &[]);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(texts(&out.tokens), vec!["2"]);
    }

    #[test]
    fn undef() {
        let out = pp("#define N 1\n#undef N\nN", &[]);
        assert_eq!(texts(&out.tokens), vec!["N"]);
        assert!(out.constants.is_empty());
    }

    #[test]
    fn include_empty_and_defining() {
        let out = pp("#include \"e.h\"\nint x;", &[("e.h", "")]);
        assert_eq!(texts(&out.tokens), vec!["int", "x", ";"]);
        let out = pp(
            "#include \"lim.h\"\nint y = SQRT_UINT_MAX;",
            &[("lim.h", "#define SQRT_UINT_MAX 65536\nint z;\n")],
        );
        assert_eq!(texts(&out.tokens), vec!["int", "z", ";", "int", "y", "=", "65536", ";"]);
        assert_eq!(out.tokens[0].file, FileId(1));
        assert_eq!(out.tokens[3].file, FileId(0));
    }

    #[test]
    fn unresolved_include() {
        let out = pp("#include <nope.h>\nint x;", &[]);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.tokens.len(), 3);
    }

    #[test]
    fn self_include_hits_depth_limit() {
        let out = pp("#include \"self.h\"\n", &[("self.h", "#include \"self.h\"\nint a;\n")]);
        let errs: Vec<_> = out.diagnostics.iter().filter(|d| d.is_error()).collect();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("depth 17"));
        assert_eq!(out.tokens.len(), 3 * MAX_INCLUDE_DEPTH);
    }

    #[test]
    fn int_literals() {
        assert_eq!(int_literal_value("65536"), Some(BigInt::from(65536)));
        assert_eq!(int_literal_value("0x10u"), Some(BigInt::from(16)));
        assert_eq!(int_literal_value("010"), Some(BigInt::from(8)));
        assert_eq!(int_literal_value("0"), Some(BigInt::from(0)));
        assert_eq!(int_literal_value("4294967295UL"), Some(BigInt::from(4294967295u64)));
    }
}
