//! Table-driven shift/reduce engine.
//!
//! Every shift and every reduction is recorded as one node of the
//! [`SrForest`], in the order the engine performed them; node ids are event
//! indices. Identifiers are classified as `TYPEDEF_NAME` when the lookahead
//! is fetched, using the environment as it stands at that moment.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::ast::{Expr, NodeId, TranslationUnit};
use crate::diag::Diagnostic;
use crate::env::{Env, EnvLog};
use crate::grammar::{grammar, Builder, EnvEvent, Grammar, Kid, Kids, Rule, RuleId, Sem, EXPR_MARKER};
use crate::lalr::Action;
use crate::lexer::{Token, TokenKind};
use crate::reports::{Markup, ReportKind};
use crate::source::{FileId, Range};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrEvent {
    Shift { token: usize, typedef_name: bool },
    Reduce { rule: RuleId, arity: u32 },
}

#[derive(Debug, Clone)]
pub struct SrNode {
    pub event: SrEvent,
    pub children: Vec<u32>,
    pub parent: Option<u32>,
    pub range: Range,
    pub file: FileId,
}

/// The shift/reduce forest. Node `i` is the `i`-th engine event.
#[derive(Debug, Clone, Default)]
pub struct SrForest {
    pub nodes: Vec<SrNode>,
    ast_nodes: HashMap<NodeId, u32>,
}

impl SrForest {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: u32) -> &SrNode {
        &self.nodes[i as usize]
    }

    pub fn events(&self) -> impl Iterator<Item = SrEvent> + '_ {
        self.nodes.iter().map(|n| n.event)
    }

    /// Nodes without a parent, in event order.
    pub fn roots(&self) -> Vec<u32> {
        (0..self.nodes.len() as u32)
            .filter(|&i| self.nodes[i as usize].parent.is_none())
            .collect()
    }

    /// Shift nodes in event order.
    pub fn leaves(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.nodes.len() as u32).filter(|&i| matches!(self.nodes[i as usize].event, SrEvent::Shift { .. }))
    }

    pub fn shift_count(&self) -> usize {
        self.leaves().count()
    }

    /// The reduce node that created an AST node.
    pub fn ast_node(&self, id: NodeId) -> Option<u32> {
        self.ast_nodes.get(&id).copied()
    }

    pub fn is_monadic(&self, i: u32) -> bool {
        match self.nodes[i as usize].event {
            SrEvent::Reduce { rule, .. } => grammar().rule(rule).monadic,
            SrEvent::Shift { .. } => false,
        }
    }

    pub fn rule(&self, i: u32) -> Option<&'static Rule> {
        match self.nodes[i as usize].event {
            SrEvent::Reduce { rule, .. } => Some(grammar().rule(rule)),
            SrEvent::Shift { .. } => None,
        }
    }

    /// `S <tokidx>` / `R <ruleid> <arity>`, one event per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in self.events() {
            match e {
                SrEvent::Shift { token, .. } => writeln!(out, "S {token}").unwrap(),
                SrEvent::Reduce { rule, arity } => writeln!(out, "R {} {arity}", rule.0).unwrap(),
            }
        }
        out
    }

    /// Preorder over the whole forest, roots in event order.
    pub fn preorder(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<u32> = self.roots().into_iter().rev().collect();
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n as usize].children.iter().rev());
        }
        out
    }
}

/// One matched child of a reduction, as seen by a wrapper.
#[derive(Debug, Clone, Copy)]
pub struct ChildView {
    pub range: Range,
    /// Token index for terminals.
    pub token: Option<usize>,
}

/// What a wrapper sees when its rule is reduced.
pub struct ReduceView<'a> {
    pub rule: &'a Rule,
    pub event: u32,
    pub range: Range,
    pub file: FileId,
    pub children: &'a [ChildView],
    /// Environment changes made by the rule's own action.
    pub env_events: &'a [EnvEvent],
    pub tokens: &'a [Token],
}

pub type Hook = Arc<dyn Fn(&mut Env, &ReduceView) -> Vec<Markup> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule id {0}")]
pub struct UnknownRule(pub u32);

/// Hooks run after the action of their rule, in reduction order.
#[derive(Clone, Default)]
pub struct Wrappers {
    hooks: HashMap<RuleId, Vec<Hook>>,
}

impl Wrappers {
    pub fn new() -> Wrappers {
        Wrappers::default()
    }

    pub fn register(&mut self, rule: RuleId, hook: Hook) -> Result<(), UnknownRule> {
        if rule.0 as usize >= grammar().rules.len() {
            return Err(UnknownRule(rule.0));
        }
        self.hooks.entry(rule).or_default().push(hook);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.hooks.is_empty()
    }

    pub fn extend(&mut self, other: &Wrappers) {
        for (r, hs) in &other.hooks {
            self.hooks.entry(*r).or_default().extend(hs.iter().cloned());
        }
    }
}

/// Wrappers producing definition/use markup from the environment.
pub fn env_reporters() -> Wrappers {
    let g = grammar();
    let mut w = Wrappers::new();
    let defs: Hook = Arc::new(|_, v| v.env_events.iter().flat_map(event_markup).collect());
    for r in g.rules.iter().filter(|r| r.monadic) {
        w.register(r.id, defs.clone()).unwrap();
    }
    let uses: Hook = Arc::new(|env, v| {
        let t = &v.tokens[v.children[0].token.unwrap()];
        vec![match env.lookup(&t.text) {
            Some(b) => use_markup(b, t.range, t.file),
            None => Markup::new(ReportKind::FreeVariable, t.range, t.file).prop("name", &t.text),
        }]
    });
    w.register(g.find_rule("primary_expression", "IDENTIFIER").unwrap(), uses)
        .unwrap();
    let typedefs: Hook = Arc::new(|env, v| {
        let t = &v.tokens[v.children[0].token.unwrap()];
        let mut m = Markup::new(ReportKind::TypedefName, t.range, t.file).prop("name", &t.text);
        if let Some(b) = env.lookup(&t.text) {
            m = m.prop("def_serial", b.serial).prop("type_text", &b.type_text);
        }
        vec![m]
    });
    w.register(g.find_rule("type_specifier", "TYPEDEF_NAME").unwrap(), typedefs)
        .unwrap();
    let labels: Hook = Arc::new(|env, v| {
        let t = &v.tokens[v.children[1].token.unwrap()];
        env.lookup_label(&t.text)
            .map(|b| use_markup(b, t.range, t.file))
            .into_iter()
            .collect()
    });
    w.register(g.find_rule("jump_statement", "goto IDENTIFIER ;").unwrap(), labels)
        .unwrap();
    w
}

fn use_markup(b: &crate::env::Binding, range: Range, file: FileId) -> Markup {
    Markup::new(ReportKind::EntityUse, range, file)
        .prop("name", &b.name)
        .prop("binding_kind", b.kind.as_str())
        .prop("type_text", &b.type_text)
        .prop("def_serial", b.serial)
}

fn event_markup(e: &EnvEvent) -> Vec<Markup> {
    match e {
        EnvEvent::Declared {
            binding: b,
            name_range,
            file,
            shadows,
        } => {
            let mut out = vec![Markup::new(ReportKind::EntityDef, *name_range, *file)
                .prop("name", &b.name)
                .prop("binding_kind", b.kind.as_str())
                .prop("type_text", &b.type_text)
                .prop("def_serial", b.serial)
                .prop("global", b.global)];
            if !b.type_text.is_empty() {
                out.push(
                    Markup::new(ReportKind::TypeInfo, *name_range, *file)
                        .prop("name", &b.name)
                        .prop("type_text", &b.type_text),
                );
            }
            if let Some(outer) = shadows {
                let d = Diagnostic::info(
                    *name_range,
                    format!("`{}` shadows an outer declaration (serial {})", b.name, outer.serial),
                )
                .in_file(*file);
                out.push(Markup::from_diagnostic(&d));
            }
            out
        }
        EnvEvent::Redeclared {
            binding,
            name_range,
            file,
        }
        | EnvEvent::Referenced {
            binding,
            name_range,
            file,
        } => vec![use_markup(binding, *name_range, *file)],
        EnvEvent::ScopePushed | EnvEvent::ScopePopped => Vec::new(),
    }
}

/// Everything a parse produces.
#[derive(Debug, Clone, Default)]
pub struct ParseOutput {
    pub ast: TranslationUnit,
    pub forest: SrForest,
    /// The environment the parse started from.
    pub env0: Env,
    /// The environment at the end of the parse.
    pub env: Env,
    pub env_log: EnvLog,
    pub markup: Vec<Markup>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutput {
    /// Environment visible just before forest event `event`.
    pub fn env_at(&self, event: u32) -> Env {
        self.env_log.snapshot(&self.env0, event)
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

/// Parses a translation unit.
pub fn parse(tokens: &[Token], env0: Env, wrappers: &Wrappers) -> ParseOutput {
    Engine::new(tokens, env0, wrappers).run(false).0
}

/// Parses a single expression (used for annotation payloads).
pub fn parse_expression(tokens: &[Token], env: Env) -> Result<Expr, Vec<Diagnostic>> {
    parse_expression_with(tokens, env, &Wrappers::new()).0
}

/// Like [`parse_expression`], also returning the markup of `wrappers`.
pub fn parse_expression_with(
    tokens: &[Token],
    env: Env,
    wrappers: &Wrappers,
) -> (Result<Expr, Vec<Diagnostic>>, Vec<Markup>) {
    let (out, sem) = Engine::new(tokens, env, wrappers).run(true);
    let r = match sem {
        Some(Sem::Expr(e)) if !out.has_errors() => Ok(e),
        _ => Err(out.diagnostics),
    };
    (r, out.markup)
}

struct Entry {
    state: u32,
    nt: Option<u16>,
    sem: Sem,
    range: Range,
    file: FileId,
    node: Option<u32>,
}

const EOF_TOKEN: usize = usize::MAX;
const NO_TERMINAL: u16 = u16::MAX;

struct Engine<'a> {
    g: &'static Grammar,
    tokens: &'a [Token],
    wrappers: &'a Wrappers,
    b: Builder<'a>,
    env0: Env,
    stack: Vec<Entry>,
    nodes: Vec<SrNode>,
    markup: Vec<Markup>,
    pos: usize,
    depth: i64,
    typedef_t: u16,
    ident_t: u16,
    spec_nts: [u16; 4],
    type_spec_nt: u16,
    tu_nt: u16,
}

impl<'a> Engine<'a> {
    fn new(tokens: &'a [Token], env0: Env, wrappers: &'a Wrappers) -> Engine<'a> {
        let g = grammar();
        let nt = |n: &str| g.nonterminal(n).unwrap();
        Engine {
            g,
            tokens,
            wrappers,
            b: Builder::new(tokens, env0.clone()),
            env0,
            stack: Vec::new(),
            nodes: Vec::new(),
            markup: Vec::new(),
            pos: 0,
            depth: 0,
            typedef_t: g.terminal("TYPEDEF_NAME").unwrap(),
            ident_t: g.terminal("IDENTIFIER").unwrap(),
            spec_nts: [
                nt("storage_class_specifier"),
                nt("type_specifier"),
                nt("type_qualifier"),
                nt("function_specifier"),
            ],
            type_spec_nt: nt("type_specifier"),
            tu_nt: nt("translation_unit"),
        }
    }

    fn run(mut self, expr_mode: bool) -> (ParseOutput, Option<Sem>) {
        self.stack.push(Entry {
            state: 0,
            nt: None,
            sem: Sem::None,
            range: Range::default(),
            file: FileId(0),
            node: None,
        });
        let mut result = None;
        if !self.tokens.is_empty() || expr_mode {
            if expr_mode {
                let t = self.g.terminal(EXPR_MARKER).unwrap();
                let Action::Shift(s) = self.g.tables.action(0, t) else { unreachable!() };
                self.stack.push(Entry {
                    state: s,
                    nt: None,
                    sem: Sem::None,
                    range: Range::default(),
                    file: FileId(0),
                    node: None,
                });
            }
            self.drive(expr_mode);
            result = if expr_mode {
                self.stack.pop().map(|e| e.sem)
            } else {
                None
            };
        }
        let ast = match self.stack.get_mut(1) {
            Some(e) if e.nt == Some(self.tu_nt) => match std::mem::replace(&mut e.sem, Sem::None) {
                Sem::Unit(tu) => tu,
                _ => TranslationUnit::default(),
            },
            _ => TranslationUnit::default(),
        };
        let mut forest = SrForest {
            nodes: self.nodes,
            ast_nodes: HashMap::new(),
        };
        forest.ast_nodes = self.b.node_events.iter().copied().collect();
        let out = ParseOutput {
            ast,
            forest,
            env0: self.env0,
            env: self.b.env,
            env_log: EnvLog { ops: self.b.log },
            markup: self.markup,
            diagnostics: self.b.diagnostics,
        };
        (out, result)
    }

    fn drive(&mut self, expr_mode: bool) {
        let mut la: Option<(u16, usize)> = None;
        loop {
            let st = self.stack.last().unwrap().state;
            if let Some(r) = self.g.tables.default_reduce[st as usize] {
                self.reduce(RuleId(r));
                continue;
            }
            let (t, ti) = *la.get_or_insert_with(|| self.fetch(st));
            let action = if t == NO_TERMINAL {
                Action::Error
            } else {
                self.g.tables.action(st, t)
            };
            match action {
                Action::Shift(s) => {
                    self.shift(s, ti, t == self.typedef_t);
                    la = None;
                }
                Action::Reduce(r) => self.reduce(RuleId(r)),
                Action::Accept => return,
                Action::Error => {
                    self.syntax_error(st, ti);
                    if ti == EOF_TOKEN || expr_mode {
                        return;
                    }
                    self.recover();
                    la = None;
                    if self.pos >= self.tokens.len() && self.stack.len() == 1 {
                        return;
                    }
                }
            }
        }
    }

    fn fetch(&self, st: u32) -> (u16, usize) {
        let Some(tok) = self.tokens.get(self.pos) else {
            return (self.g.eof, EOF_TOKEN);
        };
        let Some(t) = self.g.token_terminal(tok) else {
            return (NO_TERMINAL, self.pos);
        };
        if t == self.ident_t
            && self.b.env.is_typedef(&tok.text)
            && self.g.tables.action(st, self.typedef_t) != Action::Error
            && !self.type_specifier_pending()
        {
            return (self.typedef_t, self.pos);
        }
        (t, self.pos)
    }

    /// True when the specifiers just parsed already include a type
    /// specifier, so an identifier must be a declarator name.
    fn type_specifier_pending(&self) -> bool {
        for e in self.stack.iter().rev() {
            match e.nt {
                Some(nt) if nt == self.type_spec_nt => return true,
                Some(nt) if self.spec_nts.contains(&nt) => {}
                _ => return false,
            }
        }
        false
    }

    fn shift(&mut self, state: u32, ti: usize, typedef_name: bool) {
        let tok = &self.tokens[ti];
        let idx = self.nodes.len() as u32;
        self.nodes.push(SrNode {
            event: SrEvent::Shift {
                token: ti,
                typedef_name,
            },
            children: Vec::new(),
            parent: None,
            range: tok.range,
            file: tok.file,
        });
        if tok.is_punct("{") {
            self.depth += 1;
        } else if tok.is_punct("}") {
            self.depth -= 1;
        }
        self.stack.push(Entry {
            state,
            nt: None,
            sem: Sem::Tok(ti),
            range: tok.range,
            file: tok.file,
            node: Some(idx),
        });
        self.pos = ti + 1;
    }

    fn reduce(&mut self, rule: RuleId) {
        let r = self.g.rule(rule);
        let n = r.arity();
        let at = self.stack.len() - n;
        let entries: Vec<Entry> = self.stack.drain(at..).collect();
        let idx = self.nodes.len() as u32;
        let range = entries
            .iter()
            .map(|e| e.range)
            .reduce(Range::hull)
            .unwrap();
        let file = entries[0].file;
        let mut children = Vec::with_capacity(n);
        let mut views = Vec::with_capacity(n);
        let mut kids = Vec::with_capacity(n);
        for e in entries {
            if let Some(c) = e.node {
                self.nodes[c as usize].parent = Some(idx);
                children.push(c);
            }
            views.push(ChildView {
                range: e.range,
                token: match e.sem {
                    Sem::Tok(t) => Some(t),
                    _ => None,
                },
            });
            kids.push(Kid {
                sem: e.sem,
                range: e.range,
            });
        }
        self.nodes.push(SrNode {
            event: SrEvent::Reduce {
                rule,
                arity: n as u32,
            },
            children,
            parent: None,
            range,
            file,
        });
        self.b.event = idx;
        self.b.file = file;
        self.b.events.clear();
        let mut kids = Kids { v: kids, range };
        let sem = (self.g.action_of(rule))(&mut self.b, &mut kids);
        if let Some(hooks) = self.wrappers.hooks.get(&rule) {
            let view = ReduceView {
                rule: r,
                event: idx,
                range,
                file,
                children: &views,
                env_events: &self.b.events,
                tokens: self.tokens,
            };
            for h in hooks {
                let m = h(&mut self.b.env, &view);
                self.markup.extend(m);
            }
        }
        let lhs = self.g.lhs_ids[rule.0 as usize];
        let below = self.stack.last().unwrap().state;
        let state = self.g.tables.goto(below, lhs).expect("goto defined");
        self.stack.push(Entry {
            state,
            nt: Some(lhs),
            sem,
            range,
            file,
            node: Some(idx),
        });
    }

    fn syntax_error(&mut self, st: u32, ti: usize) {
        let (range, file, found) = match self.tokens.get(ti) {
            Some(t) => (t.range, t.file, format!("`{}`", t.text)),
            None => {
                let (r, f) = self
                    .tokens
                    .last()
                    .map(|t| (Range::empty_at(t.range.end), t.file))
                    .unwrap_or_default();
                (r, f, "end of input".to_string())
            }
        };
        let msg = match self.tokens.get(ti).and_then(|t| self.rejected_construct(ti, t)) {
            Some(what) => format!("unsupported construct: {what}"),
            None => {
                let expected: Vec<&str> = self
                    .g
                    .tables
                    .expected(st)
                    .into_iter()
                    .filter(|&t| self.g.terminals[t as usize] != EXPR_MARKER)
                    .map(|t| self.g.terminals[t as usize])
                    .collect();
                let mut shown = expected.iter().take(12).map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", ");
                if expected.len() > 12 {
                    shown.push_str(", ...");
                }
                format!("syntax error: unexpected {found}; expected one of {shown}")
            }
        };
        self.b.diagnostics.push(Diagnostic::error(range, msg).in_file(file));
    }

    fn rejected_construct(&self, ti: usize, t: &Token) -> Option<String> {
        match t.kind {
            TokenKind::Keyword(k @ ("_Generic" | "_Atomic" | "_Alignas")) => Some(format!("`{k}`")),
            TokenKind::Punct("{") if ti > 0 && self.tokens[ti - 1].is_punct("(") => {
                Some("GNU statement expression".into())
            }
            TokenKind::Identifier
                if matches!(
                    t.text.as_str(),
                    "__attribute__" | "__asm__" | "asm" | "__extension__" | "__typeof__" | "typeof"
                ) =>
            {
                Some(format!("GNU extension `{}`", t.text))
            }
            _ => None,
        }
    }

    /// Abandons the current external declaration and skips to the next `;`
    /// or `}` at brace depth zero.
    fn recover(&mut self) {
        let keep = if self.stack.len() > 1 && self.stack[1].nt == Some(self.tu_nt) {
            2
        } else {
            1
        };
        self.stack.truncate(keep);
        self.b.event = self.nodes.len() as u32;
        while self.b.env.depth() > 1 {
            self.b.pop_scope();
        }
        let mut d = self.depth;
        while let Some(t) = self.tokens.get(self.pos) {
            self.pos += 1;
            if t.is_punct("{") {
                d += 1;
            } else if t.is_punct("}") {
                d -= 1;
                if d <= 0 {
                    break;
                }
            } else if t.is_punct(";") && d <= 0 {
                break;
            }
        }
        self.depth = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;

    fn p(src: &str) -> ParseOutput {
        parse(&tokenize(src).tokens, Env::new(), &Wrappers::new())
    }

    #[test]
    fn function_definition() {
        let out = p("int f(int b){return b+1;}");
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        assert_eq!(out.ast.items.len(), 1);
        assert_eq!(out.forest.shift_count(), 13);
        assert_eq!(out.forest.roots().len(), 1);
        assert_eq!(out.env.pushes(), out.env.pops());
    }

    #[test]
    fn typedef_feedback() {
        let src = "typedef int T; T x;";
        let toks = tokenize(src).tokens;
        let out = parse(&toks, Env::new(), &Wrappers::new());
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        let typedef_shifts: Vec<usize> = out
            .forest
            .events()
            .filter_map(|e| match e {
                SrEvent::Shift { token, typedef_name: true } => Some(token),
                _ => None,
            })
            .collect();
        assert_eq!(typedef_shifts, vec![4]);
    }

    #[test]
    fn typedef_name_redeclared_as_variable() {
        let out = p("typedef int T; void f(void) { int T = 1; T = 2; }");
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
    }

    #[test]
    fn empty_input() {
        let out = p("");
        assert!(out.ast.items.is_empty());
        assert!(out.forest.is_empty());
        assert!(out.diagnostics.is_empty());
    }

    #[test]
    fn reduces_between_final_shifts() {
        let out = p("void f(void) { 1; }");
        let ev: Vec<SrEvent> = out.forest.events().collect();
        assert!(matches!(ev[0], SrEvent::Shift { .. }));
        let shifts: Vec<usize> = ev
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, SrEvent::Shift { .. }))
            .map(|(i, _)| i)
            .collect();
        let (a, b) = (shifts[shifts.len() - 2], shifts[shifts.len() - 1]);
        assert!(b - a > 1);
    }

    #[test]
    fn single_token_failure_keeps_events() {
        let out = p("int");
        assert_eq!(out.diagnostics.len(), 1);
        assert!(out.diagnostics[0].message.contains("end of input"));
        assert!(!out.forest.is_empty());
    }

    #[test]
    fn recovery_resumes_after_bad_declaration() {
        let out = p("int x = ; int y; void f(void) { int z = ; } int w;");
        assert_eq!(out.diagnostics.len(), 2, "{:?}", out.diagnostics);
        assert!(out.diagnostics[0].message.contains("expected"));
        assert_eq!(out.ast.items.len(), 2);
        assert_eq!(out.env.depth(), 1);
        assert!(out.env.lookup("w").is_some());
    }

    #[test]
    fn rejected_constructs_are_named() {
        for (src, what) in [
            ("int x = _Generic(1, int: 2);", "_Generic"),
            ("_Atomic int a;", "_Atomic"),
            ("_Alignas(4) int a;", "_Alignas"),
            ("int f(void) { return ({ 1; }); }", "statement expression"),
            ("int f(a) int a; { return a; }", "K&R"),
            ("struct s { int a : n; };", "bit-field"),
        ] {
            let out = p(src);
            assert!(
                out.diagnostics.iter().any(|d| d.message.contains(what)),
                "{src}: {:?}",
                out.diagnostics
            );
        }
    }

    #[test]
    fn forest_invariants() {
        let out = p("int a[3]; int main(void) { for (int i = 0; i < 3; i++) a[i] = i * 2; return a[1]; }");
        assert!(out.diagnostics.is_empty());
        let g = grammar();
        for n in &out.forest.nodes {
            if let SrEvent::Reduce { rule, arity } = n.event {
                assert_eq!(g.rule(rule).arity(), arity as usize);
                assert_eq!(n.children.len(), arity as usize);
                let hull = n
                    .children
                    .iter()
                    .map(|&c| out.forest.node(c).range)
                    .reduce(Range::hull)
                    .unwrap();
                assert_eq!(hull, n.range);
            }
        }
        assert_eq!(out.env.pushes(), out.env.pops());
    }

    #[test]
    fn expression_entry() {
        let toks = tokenize("1 + 2 * x").tokens;
        let e = parse_expression(&toks, Env::new()).unwrap();
        assert!(matches!(e.kind, crate::ast::ExprKind::Binary(crate::ast::BinOp::Add, _, _)));
        assert!(parse_expression(&tokenize("1 +").tokens, Env::new()).is_err());
        assert!(parse_expression(&[], Env::new()).is_err());
    }

    #[test]
    fn wrappers_fire_and_unknown_rule_rejected() {
        let mut w = Wrappers::new();
        assert_eq!(w.register(RuleId(100_000), Arc::new(|_, _| vec![])).err(), Some(UnknownRule(100_000)));
        let out = parse(&tokenize("int a; int f(void) { return a + z; }").tokens, Env::new(), &env_reporters());
        let kinds: Vec<ReportKind> = out.markup.iter().map(|m| m.kind).collect();
        assert!(kinds.contains(&ReportKind::EntityDef));
        assert!(kinds.contains(&ReportKind::EntityUse));
        assert!(kinds.contains(&ReportKind::FreeVariable));
        assert!(p("int a;").markup.is_empty());
        w.register(grammar().find_rule("lbrace", "{").unwrap(), Arc::new(|env, _| {
            vec![Markup::new(ReportKind::Highlight, Range::default(), FileId(0)).prop("depth", env.depth())]
        }))
        .unwrap();
        let out = parse(&tokenize("void f(void) { { } }").tokens, Env::new(), &w);
        let depths: Vec<&str> = out.markup.iter().map(|m| m.props["depth"].as_str()).collect();
        assert_eq!(depths, vec!["3", "4"]);
    }
}
