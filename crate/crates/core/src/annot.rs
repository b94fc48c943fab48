//! Annotation commands embedded in comments.
//!
//! An annotation comment holds a sequence of items, each a navigation prefix
//! (`+`* then `@`/`&`*), a command keyword and an argument. The prefix picks
//! the focus node in the shift/reduce forest; the command then runs either
//! at bottom-up time (in the order its focus was created during the parse)
//! or top-down after the parse (preorder over the forest). Commands are
//! late-bound: a command can register other commands for later items.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::diag::Diagnostic;
use crate::env::{Env, ExternalBinding};
use crate::lexer::{self, classify_annotation, ErrorMode, Token, Trivia};
use crate::parser::{env_reporters, parse, parse_expression_with, ParseOutput, SrEvent, SrForest};
use crate::reports::{Markup, ReportKind};
use crate::source::{FileId, Pos, Range};

/// One ancestry step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    /// `@`: the nearest proper ancestor.
    At,
    /// `&`: the nearest proper ancestor reduced by a monadic rule.
    Amp,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NavExpr {
    pub plus_count: usize,
    pub ancestry: Vec<Step>,
}

impl fmt::Display for NavExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.plus_count {
            f.write_str("+")?;
        }
        for s in &self.ancestry {
            f.write_str(match s {
                Step::At => "@",
                Step::Amp => "&",
            })?;
        }
        Ok(())
    }
}

/// A parsed item, with byte offsets into the payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub nav: NavExpr,
    pub keyword: String,
    pub arg: String,
    pub start: usize,
    pub keyword_span: (usize, usize),
    pub arg_span: (usize, usize),
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

fn is_nav(c: char) -> bool {
    matches!(c, '+' | '@' | '&')
}

fn is_kw_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_kw_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Does a new item start at byte `i`? It must begin a word, consist of
/// navigation symbols, and be followed by a keyword.
fn item_starts_at(s: &str, i: usize) -> bool {
    if i > 0 && !s[..i].ends_with(char::is_whitespace) {
        return false;
    }
    let rest = &s[i..];
    let nav_len = rest.len() - rest.trim_start_matches(is_nav).len();
    if nav_len == 0 {
        return false;
    }
    rest[nav_len..].trim_start().starts_with(is_kw_start)
}

/// Parses an annotation payload into items. On a syntax error the items
/// before it are returned along with the error.
pub fn parse_annotation(payload: &str) -> (Vec<Item>, Option<SyntaxError>) {
    let mut items = Vec::new();
    let mut i = 0;
    loop {
        i += payload[i..].len() - payload[i..].trim_start().len();
        if i >= payload.len() {
            return (items, None);
        }
        match parse_item(payload, i) {
            Ok(item) => {
                i = item.end;
                items.push(item);
            }
            Err(e) => return (items, Some(e)),
        }
    }
}

fn parse_item(s: &str, start: usize) -> Result<Item, SyntaxError> {
    let err = |offset, message: String| SyntaxError { offset, message };
    let mut nav = NavExpr::default();
    let mut i = start;
    for c in s[start..].chars() {
        match c {
            '+' if !nav.ancestry.is_empty() => {
                return Err(err(
                    i,
                    format!("malformed navigation prefix: `+` after `{}`", nav),
                ))
            }
            '+' => nav.plus_count += 1,
            '@' => nav.ancestry.push(Step::At),
            '&' => nav.ancestry.push(Step::Amp),
            _ => break,
        }
        i += 1;
    }
    i += s[i..].len() - s[i..].trim_start().len();
    let kw_len = s[i..]
        .char_indices()
        .find(|&(k, c)| if k == 0 { !is_kw_start(c) } else { !is_kw_char(c) })
        .map_or(s.len() - i, |(k, _)| k);
    if kw_len == 0 {
        let found = s[i..].chars().next().map_or("end of annotation".to_string(), |c| format!("`{c}`"));
        return Err(err(i, format!("expected an annotation command, found {found}")));
    }
    let keyword_span = (i, i + kw_len);
    let arg_from = i + kw_len;
    let arg_to = arg_end(s, arg_from)?;
    let raw = &s[arg_from..arg_to];
    let lead = raw.len() - raw.trim_start().len();
    let arg = raw.trim();
    let arg_span = (arg_from + lead, arg_from + lead + arg.len());
    Ok(Item {
        nav,
        keyword: s[keyword_span.0..keyword_span.1].to_string(),
        arg: arg.to_string(),
        start,
        keyword_span,
        arg_span,
        end: if arg.is_empty() { keyword_span.1 } else { arg_span.1 },
    })
}

/// End of the argument starting at `from`: the next top-level item start or
/// the end of the payload. Cartouches nest.
fn arg_end(s: &str, from: usize) -> Result<usize, SyntaxError> {
    let mut depth = 0usize;
    let mut open_at = from;
    for (k, c) in s[from..].char_indices() {
        let i = from + k;
        match c {
            '⟨' => {
                if depth == 0 {
                    open_at = i;
                }
                depth += 1;
            }
            '⟩' if depth == 0 => {
                return Err(SyntaxError {
                    offset: i,
                    message: "unbalanced `⟩` in annotation argument".into(),
                })
            }
            '⟩' => depth -= 1,
            _ if depth == 0 && item_starts_at(s, i) => return Ok(i),
            _ => {}
        }
    }
    if depth > 0 {
        return Err(SyntaxError {
            offset: open_at,
            message: "unterminated `⟨` in annotation argument".into(),
        });
    }
    Ok(s.len())
}

/// Strips one enclosing cartouche, if the whole text is one.
pub fn unquote(arg: &str) -> &str {
    let t = arg.trim();
    if let Some(inner) = t.strip_prefix('⟨').and_then(|r| r.strip_suffix('⟩')) {
        let mut depth = 0i32;
        for c in inner.chars() {
            match c {
                '⟨' => depth += 1,
                '⟩' => {
                    depth -= 1;
                    if depth < 0 {
                        return t;
                    }
                }
                _ => {}
            }
        }
        if depth == 0 {
            return inner.trim();
        }
    }
    t
}

/// Position reached after walking `text` from `p`.
fn advance(mut p: Pos, text: &str) -> Pos {
    for ch in text.chars() {
        p.offset += ch.len_utf8();
        if ch == '\n' {
            p.line += 1;
            p.col = 1;
        } else {
            p.col += 1;
        }
    }
    p
}

/// An annotation item located in a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    /// Document order.
    pub index: usize,
    pub nav: NavExpr,
    pub keyword: String,
    pub arg: String,
    pub range: Range,
    pub keyword_range: Range,
    pub arg_range: Range,
    /// The whole comment.
    pub comment: Range,
    pub file: FileId,
    pub mode: ErrorMode,
}

#[derive(Debug, Clone, Default)]
pub struct Collected {
    pub annotations: Vec<Annotation>,
    pub diagnostics: Vec<Diagnostic>,
    /// A strict-mode syntax error: the document's annotation pass fails.
    pub failed: bool,
}

/// Extracts the annotation items of a file's trivia. Comments marked with
/// the `*` pragma are permissive; the others use `default_mode`.
pub fn collect(trivia: &[Trivia], default_mode: ErrorMode) -> Collected {
    let mut out = Collected::default();
    for t in trivia {
        let Some(a) = classify_annotation(t) else { continue };
        let mode = a.pragma.unwrap_or(default_mode);
        let (items, err) = parse_annotation(&a.payload);
        let at = |off: usize| advance(a.payload_start, &a.payload[..off]);
        for it in items {
            out.annotations.push(Annotation {
                index: out.annotations.len(),
                nav: it.nav,
                keyword: it.keyword,
                arg: it.arg,
                range: Range::new(at(it.start), at(it.end)),
                keyword_range: Range::new(at(it.keyword_span.0), at(it.keyword_span.1)),
                arg_range: Range::new(at(it.arg_span.0), at(it.arg_span.1)),
                comment: a.range,
                file: t.file,
                mode,
            });
        }
        if let Some(e) = err {
            let p = at(e.offset);
            let r = Range::new(p, p);
            match mode {
                ErrorMode::Strict => {
                    out.failed = true;
                    out.diagnostics.push(Diagnostic::error(r, e.message).in_file(t.file));
                }
                ErrorMode::Permissive => out.diagnostics.push(
                    Diagnostic::warning(r, format!("{}; rest of annotation skipped", e.message)).in_file(t.file),
                ),
            }
        }
    }
    out
}

/// Resolves navigation expressions against a finished forest.
pub struct Resolver<'a> {
    forest: &'a SrForest,
    leaves: Vec<u32>,
    /// Per file: (token end offset, position in `leaves`), in shift order.
    by_file: HashMap<FileId, Vec<(usize, usize)>>,
}

impl<'a> Resolver<'a> {
    pub fn new(forest: &'a SrForest, tokens: &[Token]) -> Resolver<'a> {
        let leaves: Vec<u32> = forest.leaves().collect();
        let mut by_file: HashMap<FileId, Vec<(usize, usize)>> = HashMap::new();
        for (k, &leaf) in leaves.iter().enumerate() {
            if let SrEvent::Shift { token, .. } = forest.node(leaf).event {
                if let Some(t) = tokens.get(token) {
                    by_file.entry(t.file).or_default().push((t.range.end.offset, k));
                }
            }
        }
        Resolver {
            forest,
            leaves,
            by_file,
        }
    }

    /// The last shift leaf whose token ends at or before `offset` in `file`.
    pub fn default_leaf(&self, file: FileId, offset: usize) -> Option<u32> {
        self.default_pos(file, offset).map(|k| self.leaves[k])
    }

    fn default_pos(&self, file: FileId, offset: usize) -> Option<usize> {
        let v = self.by_file.get(&file)?;
        // Offsets are nondecreasing within a file.
        let n = v.partition_point(|&(end, _)| end <= offset);
        n.checked_sub(1).map(|i| v[i].1)
    }

    pub fn resolve(&self, nav: &NavExpr, file: FileId, offset: usize) -> Result<u32, String> {
        let pos = match (self.default_pos(file, offset), nav.plus_count) {
            (Some(k), n) => k + n,
            (None, 0) => return Err("focus out of range: no token precedes the annotation".into()),
            (None, n) => n - 1,
        };
        let mut node = *self
            .leaves
            .get(pos)
            .ok_or_else(|| format!("focus out of range: `{nav}` moves past the last token"))?;
        for (k, step) in nav.ancestry.iter().enumerate() {
            let mut p = self.forest.node(node).parent;
            if *step == Step::Amp {
                while let Some(q) = p {
                    if self.forest.is_monadic(q) {
                        break;
                    }
                    p = self.forest.node(q).parent;
                }
            }
            node = p.ok_or_else(|| format!("focus out of range: step {} of `{nav}` goes above the root", k + 1))?;
        }
        Ok(node)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Timing {
    BottomUp,
    TopDown,
}

impl Timing {
    pub fn as_str(self) -> &'static str {
        match self {
            Timing::BottomUp => "bottom_up",
            Timing::TopDown => "top_down",
        }
    }
}

/// The node an annotation command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Focus {
    pub node: u32,
    pub range: Range,
    pub file: FileId,
}

/// Everything a command handler receives besides the context.
pub struct Invocation<'a> {
    pub annotation: &'a Annotation,
    pub focus: Focus,
    /// The environment as it stood when the focus node was created.
    pub env: &'a Env,
    pub parse: &'a ParseOutput,
    pub tokens: &'a [Token],
    /// The argument text; for `setup` hooks, the text after the hook name.
    pub arg: &'a str,
}

pub type Handler = Arc<dyn Fn(&Invocation, &mut Context) -> Result<(), String> + Send + Sync>;

#[derive(Clone)]
pub struct Command {
    pub timing: Timing,
    pub handler: Handler,
}

/// Named results produced by commands and back-ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definition {
    Constant(BigInt),
    Binding(ExternalBinding),
    Text(String),
}

/// Specification text attached to a focus by one of the seL4 keywords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecAttachment {
    pub keyword: String,
    pub payload: String,
    pub focus: Focus,
    pub annotation: usize,
}

pub const SPEC_KEYWORDS: [&str; 12] = [
    "FNSPEC",
    "INVARIANT",
    "INV",
    "MODIFIES",
    "AUXUPD",
    "GHOSTUPD",
    "SPEC",
    "END-SPEC",
    "CALLS",
    "OWNED_BY",
    "RELSPEC",
    "DONT_TRANSLATE",
];

/// The state threaded through command execution.
#[derive(Clone)]
pub struct Context {
    pub registry: BTreeMap<String, Command>,
    /// Hooks reachable through `setup NAME` / `setup_td NAME`.
    pub setup_hooks: BTreeMap<String, Handler>,
    pub definitions: BTreeMap<String, Definition>,
    pub specs: Vec<SpecAttachment>,
    pub markup: Vec<Markup>,
    pub diagnostics: Vec<Diagnostic>,
    /// Set when a strict-mode failure stopped the plan.
    pub aborted: bool,
}

impl Default for Context {
    fn default() -> Self {
        Context::new()
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Context")
            .field("commands", &self.registry.keys().collect::<Vec<_>>())
            .field("setup_hooks", &self.setup_hooks.keys().collect::<Vec<_>>())
            .field("definitions", &self.definitions)
            .field("specs", &self.specs)
            .field("markup", &self.markup.len())
            .field("diagnostics", &self.diagnostics)
            .field("aborted", &self.aborted)
            .finish()
    }
}

impl Context {
    /// A context with the built-in commands.
    pub fn new() -> Context {
        let mut ctx = Context::empty();
        ctx.registry.insert("highlight".into(), command(Timing::BottomUp, highlight));
        ctx.registry.insert("setup".into(), command(Timing::BottomUp, setup));
        ctx.registry.insert("setup_td".into(), command(Timing::TopDown, setup));
        ctx.registry.insert("C".into(), command(Timing::BottomUp, c_command));
        for k in SPEC_KEYWORDS {
            ctx.registry.insert(k.into(), command(Timing::BottomUp, spec_keyword));
        }
        ctx.setup_hooks.insert("define".into(), Arc::new(define_hook));
        ctx
    }

    /// A context without any commands.
    pub fn empty() -> Context {
        Context {
            registry: BTreeMap::new(),
            setup_hooks: BTreeMap::new(),
            definitions: BTreeMap::new(),
            specs: Vec::new(),
            markup: Vec::new(),
            diagnostics: Vec::new(),
            aborted: false,
        }
    }

    /// Registers `keyword`, replacing (with a warning) any earlier command.
    /// Returns whether a command was replaced.
    pub fn register_command(&mut self, keyword: &str, timing: Timing, handler: Handler) -> bool {
        let replaced = self
            .registry
            .insert(keyword.to_string(), Command { timing, handler })
            .is_some();
        if replaced {
            self.diagnostics.push(Diagnostic::warning(
                Range::default(),
                format!("annotation command `{keyword}` redefined"),
            ));
        }
        replaced
    }

    pub fn register_setup_hook(&mut self, name: &str, handler: Handler) {
        self.setup_hooks.insert(name.to_string(), handler);
    }
}

fn command(timing: Timing, f: fn(&Invocation, &mut Context) -> Result<(), String>) -> Command {
    Command {
        timing,
        handler: Arc::new(f),
    }
}

fn highlight(inv: &Invocation, ctx: &mut Context) -> Result<(), String> {
    ctx.markup.push(
        Markup::new(ReportKind::Highlight, inv.focus.range, inv.focus.file)
            .prop("command", &inv.annotation.keyword)
            .prop("nav", &inv.annotation.nav),
    );
    Ok(())
}

fn setup(inv: &Invocation, ctx: &mut Context) -> Result<(), String> {
    let arg = inv.arg.trim();
    let (name, rest) = arg.split_once(char::is_whitespace).unwrap_or((arg, ""));
    if name.is_empty() {
        return Err(format!("`{}` expects a hook name", inv.annotation.keyword));
    }
    let hook = ctx
        .setup_hooks
        .get(name)
        .cloned()
        .ok_or_else(|| format!("unknown setup hook `{name}`"))?;
    let sub = Invocation {
        annotation: inv.annotation,
        focus: inv.focus,
        env: inv.env,
        parse: inv.parse,
        tokens: inv.tokens,
        arg: rest.trim(),
    };
    hook(&sub, ctx)
}

/// `setup define NAME [top_down]`: registers `NAME` as a command that
/// highlights its focus.
fn define_hook(inv: &Invocation, ctx: &mut Context) -> Result<(), String> {
    let mut words = inv.arg.split_whitespace();
    let name = words.next().ok_or("`define` expects a command name")?;
    let timing = match words.next() {
        None | Some("bottom_up") => Timing::BottomUp,
        Some("top_down") => Timing::TopDown,
        Some(w) => return Err(format!("unknown timing `{w}`")),
    };
    if !name.starts_with(is_kw_start) || !name.chars().all(is_kw_char) {
        return Err(format!("`{name}` is not a valid command name"));
    }
    ctx.register_command(name, timing, Arc::new(highlight));
    ctx.definitions
        .insert(format!("command:{name}"), Definition::Text(timing.as_str().to_string()));
    Ok(())
}

fn spec_keyword(inv: &Invocation, ctx: &mut Context) -> Result<(), String> {
    ctx.specs.push(SpecAttachment {
        keyword: inv.annotation.keyword.clone(),
        payload: unquote(inv.arg).to_string(),
        focus: inv.focus,
        annotation: inv.annotation.index,
    });
    Ok(())
}

/// How the nested `C` command sees the surrounding environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvMode {
    /// The environment at the focus.
    Inherit,
    /// Only typedefs and tags of the environment at the focus.
    Clear,
    /// Nothing.
    Empty,
}

/// `C [inherit|clear|empty] ⟨code⟩`: parses `code` as C, reporting its
/// definitions and uses. Global definitions are exported to the context.
fn c_command(inv: &Invocation, ctx: &mut Context) -> Result<(), String> {
    let arg = inv.arg;
    let open = arg.find('⟨').ok_or("`C` expects its code in ⟨ ⟩")?;
    let mode = match arg[..open].trim() {
        "" | "inherit" => EnvMode::Inherit,
        "clear" => EnvMode::Clear,
        "empty" => EnvMode::Empty,
        w => return Err(format!("unknown environment mode `{w}`")),
    };
    let close = arg.rfind('⟩').filter(|&c| c > open).ok_or("unterminated ⟨ in `C`")?;
    let code = &arg[open + '⟨'.len_utf8()..close];
    let start = advance(inv.annotation.arg_range.start, &arg[..open + '⟨'.len_utf8()]);
    let file = inv.annotation.file;
    let lexed = lexer::tokenize_at(code, start, file);
    if let Some(d) = lexed.diagnostics.iter().find(|d| d.is_error()) {
        return Err(format!("in nested C: {}", d.message));
    }
    let env = match mode {
        EnvMode::Inherit => inv.env.clone(),
        EnvMode::Clear => inv.env.typedefs_only(),
        EnvMode::Empty => Env::new(),
    };
    let wrappers = env_reporters();
    let out = parse(&lexed.tokens, env.clone(), &wrappers);
    if !out.has_errors() {
        let known: std::collections::HashSet<u64> = env.globals().iter().map(|b| b.serial).collect();
        for b in out.env.globals().iter().filter(|b| !known.contains(&b.serial)) {
            ctx.definitions.insert(
                b.name.clone(),
                Definition::Binding(ExternalBinding {
                    name: b.name.clone(),
                    kind: b.kind,
                    type_text: b.type_text.clone(),
                }),
            );
        }
        ctx.markup.extend(out.markup);
        ctx.diagnostics.extend(out.diagnostics);
        return Ok(());
    }
    match parse_expression_with(&lexed.tokens, env, &wrappers) {
        (Ok(_), markup) => {
            ctx.markup.extend(markup);
            Ok(())
        }
        (Err(_), _) => {
            let d = out.diagnostics.iter().find(|d| d.is_error()).unwrap();
            Err(format!("in nested C: {}", d.message))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Failed(String),
    UnknownCommand,
}

/// One executed (or attempted) command, in execution order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEntry {
    pub timing: Timing,
    pub keyword: String,
    pub focus: Focus,
    pub annotation: usize,
    pub outcome: Outcome,
}

/// Resolves, schedules and runs `annotations` over a finished parse.
///
/// Bottom-up commands run in the order their focus node was created; a
/// keyword is looked up when its turn comes, so commands registered by
/// earlier handlers are visible. Keywords bound to top-down commands at
/// that point are deferred and run afterwards in forest preorder.
pub fn run(ctx: &mut Context, annotations: &[Annotation], parse: &ParseOutput, tokens: &[Token]) -> Vec<PlanEntry> {
    let mut plan = Vec::new();
    let resolver = Resolver::new(&parse.forest, tokens);
    let mut targets = Vec::new();
    for a in annotations {
        match resolver.resolve(&a.nav, a.file, a.comment.start.offset) {
            Ok(node) => {
                let n = parse.forest.node(node);
                targets.push((
                    a,
                    Focus {
                        node,
                        range: n.range,
                        file: n.file,
                    },
                ));
            }
            Err(msg) => {
                if fail(ctx, a, msg) {
                    return plan;
                }
            }
        }
    }
    targets.sort_by_key(|(a, f)| (f.node, a.index));

    let mut replay = parse.env_log.replayer(&parse.env0);
    let mut deferred = Vec::new();
    for (a, focus) in targets {
        let Some(cmd) = ctx.registry.get(&a.keyword).cloned() else {
            plan.push(entry(Timing::BottomUp, a, focus, Outcome::UnknownCommand));
            if fail(ctx, a, format!("unknown annotation command `{}`", a.keyword)) {
                return plan;
            }
            continue;
        };
        if cmd.timing == Timing::TopDown {
            deferred.push((a, focus));
            continue;
        }
        let env = replay.at(focus.node + 1);
        if !execute(ctx, &mut plan, Timing::BottomUp, &cmd, a, focus, env, parse, tokens) {
            return plan;
        }
    }

    let mut order = vec![0usize; parse.forest.len()];
    for (k, n) in parse.forest.preorder().into_iter().enumerate() {
        order[n as usize] = k;
    }
    deferred.sort_by_key(|(a, f)| (order[f.node as usize], a.index));
    for (a, focus) in deferred {
        let Some(cmd) = ctx.registry.get(&a.keyword).cloned() else {
            plan.push(entry(Timing::TopDown, a, focus, Outcome::UnknownCommand));
            if fail(ctx, a, format!("unknown annotation command `{}`", a.keyword)) {
                return plan;
            }
            continue;
        };
        let env = parse.env_at(focus.node + 1);
        if !execute(ctx, &mut plan, Timing::TopDown, &cmd, a, focus, &env, parse, tokens) {
            return plan;
        }
    }
    plan
}

fn entry(timing: Timing, a: &Annotation, focus: Focus, outcome: Outcome) -> PlanEntry {
    PlanEntry {
        timing,
        keyword: a.keyword.clone(),
        focus,
        annotation: a.index,
        outcome,
    }
}

/// Runs one command. Returns false when the plan must stop.
#[allow(clippy::too_many_arguments)]
fn execute(
    ctx: &mut Context,
    plan: &mut Vec<PlanEntry>,
    timing: Timing,
    cmd: &Command,
    a: &Annotation,
    focus: Focus,
    env: &Env,
    parse: &ParseOutput,
    tokens: &[Token],
) -> bool {
    let inv = Invocation {
        annotation: a,
        focus,
        env,
        parse,
        tokens,
        arg: &a.arg,
    };
    match (cmd.handler)(&inv, ctx) {
        Ok(()) => {
            ctx.markup.push(
                Markup::new(ReportKind::AnnotationFocus, focus.range, focus.file)
                    .prop("keyword", &a.keyword)
                    .prop("nav", &a.nav)
                    .prop("timing", timing.as_str()),
            );
            plan.push(entry(timing, a, focus, Outcome::Done));
            true
        }
        Err(msg) => {
            plan.push(entry(timing, a, focus, Outcome::Failed(msg.clone())));
            !fail(ctx, a, format!("`{}` failed: {msg}", a.keyword))
        }
    }
}

/// Records a failure according to the annotation's mode. Returns true when
/// the plan must stop.
fn fail(ctx: &mut Context, a: &Annotation, msg: String) -> bool {
    match a.mode {
        ErrorMode::Strict => {
            ctx.diagnostics.push(Diagnostic::error(a.range, msg).in_file(a.file));
            ctx.aborted = true;
            true
        }
        ErrorMode::Permissive => {
            ctx.diagnostics.push(Diagnostic::warning(a.range, msg).in_file(a.file));
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(p: &str) -> Item {
        let (items, err) = parse_annotation(p);
        assert!(err.is_none(), "{err:?}");
        assert_eq!(items.len(), 1);
        items.into_iter().next().unwrap()
    }

    #[test]
    fn navigation_prefixes() {
        let it = one("@@ highlight");
        assert_eq!(it.nav.plus_count, 0);
        assert_eq!(it.nav.ancestry, vec![Step::At, Step::At]);
        assert_eq!(it.keyword, "highlight");
        assert_eq!(it.arg, "");

        let it = one("++& INVARIANT ⟨k ≤ UINT_MAX⟩");
        assert_eq!(it.nav.plus_count, 2);
        assert_eq!(it.nav.ancestry, vec![Step::Amp]);
        assert_eq!(it.keyword, "INVARIANT");
        assert_eq!(it.arg, "⟨k ≤ UINT_MAX⟩");
        assert_eq!(unquote(&it.arg), "k ≤ UINT_MAX");

        assert_eq!(one("END-SPEC").keyword, "END-SPEC");
        assert_eq!(one("+@highlight").nav.to_string(), "+@");
    }

    #[test]
    fn empty_payload_has_no_items() {
        assert_eq!(parse_annotation(""), (vec![], None));
        assert_eq!(parse_annotation("   \n "), (vec![], None));
    }

    #[test]
    fn several_items() {
        let (items, err) = parse_annotation("highlight @ setup define C2 & C ⟨ int x; @ y ⟩");
        assert!(err.is_none());
        let kws: Vec<_> = items.iter().map(|i| (i.nav.to_string(), i.keyword.as_str(), i.arg.as_str())).collect();
        assert_eq!(
            kws,
            vec![
                (String::new(), "highlight", ""),
                ("@".into(), "setup", "define C2"),
                ("&".into(), "C", "⟨ int x; @ y ⟩"),
            ]
        );
    }

    #[test]
    fn cartouches_nest() {
        let it = one("SPEC ⟨a ⟨b @ c⟩ d⟩");
        assert_eq!(it.arg, "⟨a ⟨b @ c⟩ d⟩");
        assert_eq!(unquote(&it.arg), "a ⟨b @ c⟩ d");
        assert_eq!(unquote("⟨a⟩ ⟨b⟩"), "⟨a⟩ ⟨b⟩");
    }

    #[test]
    fn malformed_prefixes() {
        let (items, err) = parse_annotation("highlight @+ highlight");
        assert_eq!(items.len(), 1);
        let e = err.unwrap();
        assert_eq!(e.offset, 11);
        assert!(e.message.contains("malformed navigation prefix"));

        let (items, err) = parse_annotation("@@");
        assert!(items.is_empty());
        assert!(err.unwrap().message.contains("expected an annotation command"));

        let (_, err) = parse_annotation("SPEC ⟨open");
        assert!(err.unwrap().message.contains("unterminated"));
    }

    #[test]
    fn collect_positions_and_modes() {
        let src = "int x; /*@ @ highlight */\n/*@* bad @+ x */ //@ +highlight\n";
        let lexed = lexer::tokenize(src);
        let c = collect(&lexed.trivia, ErrorMode::Strict);
        assert!(!c.failed);
        assert_eq!(c.diagnostics.len(), 1);
        assert_eq!(c.annotations.len(), 3);
        let a = &c.annotations[0];
        assert_eq!((a.range.start.col, a.range.end.col), (12, 23));
        assert_eq!((a.keyword_range.start.col, a.keyword_range.end.col), (14, 23));
        assert_eq!(c.annotations[1].mode, ErrorMode::Permissive);
        assert_eq!(c.annotations[1].keyword, "bad");
        assert_eq!(c.annotations[2].mode, ErrorMode::Strict);

        let lexed = lexer::tokenize("/*@ @+ x */");
        let c = collect(&lexed.trivia, ErrorMode::Strict);
        assert!(c.failed);
        assert!(c.diagnostics[0].is_error());
    }

    #[test]
    fn re_registration_warns() {
        let mut ctx = Context::new();
        assert!(!ctx.register_command("mine", Timing::BottomUp, Arc::new(highlight)));
        assert!(ctx.register_command("mine", Timing::TopDown, Arc::new(highlight)));
        assert_eq!(ctx.registry["mine"].timing, Timing::TopDown);
        assert_eq!(ctx.diagnostics.len(), 1);
    }
}
