//! The whole frontend for one document: splice, lex, preprocess, parse,
//! run annotations, lower, and collect everything as markup.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::annot::{self, Context, Outcome, PlanEntry};
use crate::diag::Diagnostic;
use crate::env::{Env, ExternalBinding};
use crate::lexer::{self, ErrorMode, LexOutput, Token, TokenKind};
use crate::lower::{self, Attached, Program};
use crate::parser::{self, ParseOutput, SrEvent, Wrappers};
use crate::preproc::{FsResolver, IncludeResolver, PreprocOutput, Preprocessor};
use crate::reports::{Markup, Report, ReportKind};
use crate::source::{FileId, Range, SourceFile, SourceSet};

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub include_dirs: Vec<PathBuf>,
    /// The input is already preprocessed: directives are ignored and no
    /// macros are expanded.
    pub assume_cpp: bool,
    /// Seeds the file scope before parsing.
    pub env_in: Vec<ExternalBinding>,
    /// Error mode of annotations without a pragma.
    pub mode: ErrorMode,
    /// Stop after parsing: no environment markup, annotations or lowering.
    pub parse_only: bool,
}

/// Everything one pipeline pass produced.
pub struct Analysis {
    pub sources: SourceSet,
    pub lex: LexOutput,
    pub pre: PreprocOutput,
    /// The token stream the parser saw.
    pub tokens: Vec<Token>,
    pub parse: ParseOutput,
    pub annotations: Vec<annot::Annotation>,
    pub plan: Vec<PlanEntry>,
    pub context: Context,
    pub core: Program,
    pub attached: Vec<Attached>,
    /// All markup except diagnostics, in production order.
    pub markup: Vec<Markup>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Analysis {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    /// Converts markup and diagnostics to reports for `doc`/`version`,
    /// ordered by position. Every call draws fresh serials; an
    /// `entity_def` report's serial is what the matching uses carry in
    /// `def_serial`.
    pub fn reports(&self) -> Vec<Report> {
        let src = &self.sources.get(FileId(0)).source;
        to_reports(&self.markup, &self.diagnostics, &self.sources, &src.id, src.version)
    }
}

pub fn to_reports(markup: &[Markup], diags: &[Diagnostic], sources: &SourceSet, doc: &str, version: u64) -> Vec<Report> {
    let mut all: Vec<Markup> = markup.to_vec();
    all.extend(diags.iter().map(Markup::from_diagnostic));
    // Stable, so equal positions keep production order.
    all.sort_by_key(|m| (m.file, m.range.start.offset, std::cmp::Reverse(m.range.end.offset)));

    let mut reports: Vec<Report> = all.iter().map(|m| Report::from_markup(m, sources, doc, version)).collect();
    let mut def_serials: HashMap<String, u64> = HashMap::new();
    for r in &mut reports {
        if r.kind == ReportKind::EntityDef {
            if let Some(b) = r.props.get("def_serial") {
                def_serials.insert(b.clone(), r.serial);
            }
        }
    }
    for r in &mut reports {
        if let Some(b) = r.props.get_mut("def_serial") {
            if let Some(s) = def_serials.get(b.as_str()) {
                *b = s.to_string();
            }
        }
    }
    reports
}

/// Runs the pipeline over `source` with the default include resolver.
pub fn analyze(source: SourceFile, opts: &Options, ctx: Context) -> Analysis {
    let resolver = FsResolver {
        include_dirs: opts.include_dirs.clone(),
    };
    analyze_with(source, opts, ctx, &resolver)
}

pub fn analyze_with(source: SourceFile, opts: &Options, mut ctx: Context, resolver: &dyn IncludeResolver) -> Analysis {
    let mut sources = SourceSet::default();
    let main = sources.add(source);
    let lex = lexer::tokenize(&sources.get(main).logical);
    let mut diagnostics = lex.diagnostics.clone();

    let pre = if opts.assume_cpp {
        PreprocOutput {
            tokens: lex.tokens.clone(),
            ..PreprocOutput::default()
        }
    } else {
        Preprocessor::new(resolver, &mut sources).run(&lex.tokens, &lex.trivia)
    };
    diagnostics.extend(pre.diagnostics.iter().cloned());
    let tokens = pre.tokens.clone();

    let mut env0 = Env::new();
    env0.seed(&opts.env_in);
    let wrappers = if opts.parse_only {
        Wrappers::new()
    } else {
        parser::env_reporters()
    };
    let parse = parser::parse(&tokens, env0, &wrappers);
    diagnostics.extend(parse.diagnostics.iter().cloned());

    let mut analysis = Analysis {
        sources,
        lex,
        pre,
        tokens,
        parse,
        annotations: Vec::new(),
        plan: Vec::new(),
        context: Context::empty(),
        core: Program::default(),
        attached: Vec::new(),
        markup: Vec::new(),
        diagnostics,
    };
    if opts.parse_only {
        return analysis;
    }
    let a = &mut analysis;
    a.markup.extend(a.parse.markup.iter().cloned());
    a.markup.extend(keyword_markup(&a.tokens));
    for e in &a.pre.expansions {
        a.markup
            .push(Markup::new(ReportKind::MacroExpansion, e.invocation, e.file).prop("macro", &e.macro_name));
    }
    for d in &a.pre.definitions {
        let mut m = Markup::new(ReportKind::EntityDef, d.range, d.file)
            .prop("name", &d.name)
            .prop("binding_kind", "macro")
            .prop("type_text", &d.body_text)
            .prop("def_serial", format!("macro:{}", crate::reports::fresh_serial()));
        if let Some(v) = &d.value {
            m = m.prop("value", v);
        }
        a.markup.push(m);
    }

    // Annotations. Included files contribute theirs too.
    let mut trivia = a.lex.trivia.clone();
    if !opts.assume_cpp {
        for f in 1..a.sources.files.len() {
            let id = FileId(f as u32);
            let lexed = lexer::tokenize_at(&a.sources.get(id).logical, crate::source::Pos::START, id);
            trivia.extend(lexed.trivia);
        }
    }
    let collected = annot::collect(&trivia, opts.mode);
    a.diagnostics.extend(collected.diagnostics);
    for ann in &collected.annotations {
        a.markup.push(
            Markup::new(ReportKind::Keyword, ann.keyword_range, ann.file)
                .prop("annotation", "true")
                .prop("command", &ann.keyword),
        );
    }
    if !collected.failed {
        a.plan = annot::run(&mut ctx, &collected.annotations, &a.parse, &a.tokens);
    }
    a.annotations = collected.annotations;
    a.markup.append(&mut ctx.markup);
    a.diagnostics.append(&mut ctx.diagnostics);

    // Lowering, so spec keywords land somewhere.
    if !a.parse.has_errors() {
        let forest = &a.parse.forest;
        let file_of = |id| forest.ast_node(id).map_or(FileId(0), |n| forest.node(n).file);
        let (mut core, mut lowering) = lower::lower_in(&a.parse.ast, file_of);
        let (attached, ds) = lower::attach_specs(&mut core, &ctx.specs);
        // Nobody asked to translate these, so their gaps are not worth a warning.
        let excluded: Vec<(FileId, Range)> = core
            .functions
            .iter()
            .filter(|f| f.specs.iter().any(|s| s.keyword == "DONT_TRANSLATE"))
            .map(|f| (f.file, f.range))
            .collect();
        lowering.retain(|d| !excluded.iter().any(|(file, r)| *file == d.file && r.contains(&d.range)));
        a.diagnostics.extend(lowering);
        a.diagnostics.extend(ds);
        a.core = core;
        a.attached = attached;
    }
    a.context = ctx;
    analysis
}

fn keyword_markup(tokens: &[Token]) -> impl Iterator<Item = Markup> + '_ {
    tokens.iter().filter_map(|t| match t.kind {
        TokenKind::Keyword(k) if t.origin.is_none() => {
            Some(Markup::new(ReportKind::Keyword, t.range, t.file).prop("keyword", k))
        }
        _ => None,
    })
}

/// Short description of a forest node: its rule, or the shifted token.
pub fn node_label(parse: &ParseOutput, tokens: &[Token], node: u32) -> String {
    match parse.forest.node(node).event {
        SrEvent::Shift { token, .. } => format!("shift `{}`", tokens[token].text),
        SrEvent::Reduce { .. } => match parse.forest.rule(node) {
            Some(r) => r.to_string(),
            None => "reduce".into(),
        },
    }
}

/// Physical `L:C-L:C` text of a logical range.
pub fn range_text(sources: &SourceSet, file: FileId, r: Range) -> String {
    let p = sources.get(file).mapper.physical_range(r);
    format!("{}:{}-{}:{}", p.start.line, p.start.col, p.end.line, p.end.col)
}

/// `file:line:col: severity: message`, in physical coordinates.
pub fn render_diagnostic(sources: &SourceSet, d: &Diagnostic) -> String {
    let f = sources.get(d.file);
    let p = f.mapper.physical_range(d.range);
    format!("{}:{}:{}: {}: {}", f.source.id, p.start.line, p.start.col, d.severity, d.message)
}

/// The execution plan, one line per command:
/// `timing keyword node focus-range outcome`, tab separated.
pub fn format_plan(a: &Analysis) -> String {
    let mut out = String::new();
    for e in &a.plan {
        let outcome = match &e.outcome {
            Outcome::Done => "ok".to_string(),
            Outcome::Failed(m) => format!("failed: {m}"),
            Outcome::UnknownCommand => "unknown command".into(),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.timing.as_str(),
            e.keyword,
            node_label(&a.parse, &a.tokens, e.focus.node),
            range_text(&a.sources, e.focus.file, e.focus.range),
            outcome
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reports::ReportKind;

    fn run(src: &str) -> Analysis {
        analyze(SourceFile::new("t.c", src), &Options::default(), Context::new())
    }

    #[test]
    fn uses_point_at_definition_reports() {
        let a = run("int x; int f(void) { return x; }");
        assert!(!a.has_errors());
        let reports = a.reports();
        let def = reports
            .iter()
            .find(|r| r.kind == ReportKind::EntityDef && r.props["name"] == "x")
            .unwrap();
        let usage = reports.iter().find(|r| r.kind == ReportKind::EntityUse).unwrap();
        assert_eq!(usage.props["def_serial"], def.serial.to_string());
        assert_eq!(def.props["def_serial"], def.serial.to_string());
    }

    #[test]
    fn define_is_reported_and_expanded() {
        let a = run("#define N 3\nint a = N;");
        let kinds: Vec<_> = a.reports().iter().map(|r| r.kind).collect();
        assert!(kinds.contains(&ReportKind::MacroExpansion));
        assert!(a.pre.constants.contains_key("N"));
    }

    #[test]
    fn plan_lines() {
        let a = run("int x; /*@ highlight */\nint y; //@ @ highlight\n");
        let plan = format_plan(&a);
        let lines: Vec<_> = plan.lines().collect();
        assert_eq!(lines.len(), 2, "{plan}");
        assert!(lines[0].starts_with("bottom_up\thighlight\tshift `;`\t1:6-1:7\tok"), "{plan}");
    }

    #[test]
    fn lowering_knows_which_file_a_function_came_from() {
        let mut r = crate::preproc::MapResolver::default();
        r.files.insert(
            "h.h".into(),
            "int jump(void) { goto out; out: return 0; }\n//@ FNSPEC ⟨true⟩\nint ok(void) { return 1; }\n".into(),
        );
        let main = "#include \"h.h\"\nint main(void) { return ok(); }\n";
        let a = analyze_with(SourceFile::new("t.c", main), &Options::default(), Context::new(), &r);
        let goto = a.diagnostics.iter().find(|d| d.message.contains("goto")).unwrap();
        assert_eq!(goto.file, FileId(1));
        assert_eq!(a.core.function("jump").unwrap().file, FileId(1));
        assert_eq!(a.core.function("main").unwrap().file, FileId(0));
        let spec: Vec<_> = a.attached.iter().map(|s| s.target.as_str()).collect();
        assert_eq!(spec, ["function ok"]);
    }

    #[test]
    fn physical_ranges_cover_splices() {
        let a = run("i\\\nnt x;");
        let r = a.reports();
        let kw = r.iter().find(|r| r.kind == ReportKind::Keyword).unwrap();
        assert_eq!((kw.start_line, kw.start_col, kw.end_line, kw.end_col), (1, 1, 2, 3));
    }
}
