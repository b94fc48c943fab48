//! C source printing and s-expression dumps of the AST.
//!
//! The printer emits the minimum parentheses needed for the text to parse
//! back to the same tree. The s-expression form omits ranges and node ids,
//! so two parses can be compared structurally.

use std::fmt;

use crate::ast::*;

const COMMA: u8 = 1;
const ASSIGN: u8 = 2;
const COND: u8 = 3;
const CAST: u8 = 14;
const UNARY: u8 = 15;
const POSTFIX: u8 = 16;
const PRIMARY: u8 = 17;

fn binary_level(op: BinOp) -> u8 {
    op.precedence() + 3
}

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Comma(..) => COMMA,
        ExprKind::Assign(..) => ASSIGN,
        ExprKind::Cond(..) => COND,
        ExprKind::Binary(op, ..) => binary_level(*op),
        ExprKind::Cast(..) => CAST,
        ExprKind::Unary(..) | ExprKind::SizeofExpr(_) | ExprKind::SizeofType(_) | ExprKind::AlignofType(_) => UNARY,
        ExprKind::PostInc(_)
        | ExprKind::PostDec(_)
        | ExprKind::Call(..)
        | ExprKind::Index(..)
        | ExprKind::Member { .. }
        | ExprKind::CompoundLiteral(..) => POSTFIX,
        _ => PRIMARY,
    }
}

/// Prints an expression.
pub fn expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, COMMA);
    s
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    if level(e) < min {
        out.push('(');
        write_expr(out, e, COMMA);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::IntLit(t) | ExprKind::FloatLit(t) | ExprKind::CharLit(t) => out.push_str(t),
        ExprKind::StrLit(parts) => out.push_str(&parts.join(" ")),
        ExprKind::Binary(op, l, r) => {
            let p = binary_level(*op);
            write_expr(out, l, p);
            out.push(' ');
            out.push_str(op.as_str());
            out.push(' ');
            write_expr(out, r, p + 1);
        }
        ExprKind::Assign(op, l, r) => {
            write_expr(out, l, UNARY);
            out.push(' ');
            out.push_str(op.as_str());
            out.push(' ');
            write_expr(out, r, ASSIGN);
        }
        ExprKind::Unary(op, x) => {
            let min = match op {
                UnOp::PreInc | UnOp::PreDec => UNARY,
                _ => CAST,
            };
            let mut inner = String::new();
            write_expr(&mut inner, x, min);
            out.push_str(op.as_str());
            if inner.starts_with(op.as_str().chars().next().unwrap()) {
                out.push(' ');
            }
            out.push_str(&inner);
        }
        ExprKind::PostInc(x) => {
            write_expr(out, x, POSTFIX);
            out.push_str("++");
        }
        ExprKind::PostDec(x) => {
            write_expr(out, x, POSTFIX);
            out.push_str("--");
        }
        ExprKind::Call(f, args) => {
            write_expr(out, f, POSTFIX);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, ASSIGN);
            }
            out.push(')');
        }
        ExprKind::Index(a, i) => {
            write_expr(out, a, POSTFIX);
            out.push('[');
            write_expr(out, i, COMMA);
            out.push(']');
        }
        ExprKind::Member { base, field, arrow } => {
            write_expr(out, base, POSTFIX);
            out.push_str(if *arrow { "->" } else { "." });
            out.push_str(&field.name);
        }
        ExprKind::Cast(t, x) => {
            out.push('(');
            out.push_str(&type_name(t));
            out.push(')');
            write_expr(out, x, CAST);
        }
        ExprKind::SizeofExpr(x) => {
            out.push_str("sizeof ");
            write_expr(out, x, UNARY);
        }
        ExprKind::SizeofType(t) => {
            out.push_str("sizeof(");
            out.push_str(&type_name(t));
            out.push(')');
        }
        ExprKind::AlignofType(t) => {
            out.push_str("_Alignof(");
            out.push_str(&type_name(t));
            out.push(')');
        }
        ExprKind::Cond(c, a, b) => {
            write_expr(out, c, binary_level(BinOp::Or));
            out.push_str(" ? ");
            write_expr(out, a, COMMA);
            out.push_str(" : ");
            write_expr(out, b, COND);
        }
        ExprKind::Comma(a, b) => {
            write_expr(out, a, COMMA);
            out.push_str(", ");
            write_expr(out, b, ASSIGN);
        }
        ExprKind::CompoundLiteral(t, items) => {
            out.push('(');
            out.push_str(&type_name(t));
            out.push(')');
            out.push_str(&init_list(items));
        }
    }
}

pub fn type_name(t: &TypeName) -> String {
    let d = declarator(&t.declarator);
    if d.is_empty() {
        specs(&t.specs)
    } else {
        format!("{} {d}", specs(&t.specs))
    }
}

pub fn specs(ss: &[DeclSpec]) -> String {
    ss.iter().map(spec).collect::<Vec<_>>().join(" ")
}

fn spec(s: &DeclSpec) -> String {
    match s {
        DeclSpec::Storage(sc) => sc.as_str().to_string(),
        DeclSpec::Qual(q) => q.as_str().to_string(),
        DeclSpec::Func(FuncSpec::Inline) => "inline".into(),
        DeclSpec::Func(FuncSpec::Noreturn) => "_Noreturn".into(),
        DeclSpec::Type(t) => type_spec(t),
    }
}

fn type_spec(t: &TypeSpec) -> String {
    match t {
        TypeSpec::Basic(b) => b.to_string(),
        TypeSpec::TypedefName(n) => n.name.clone(),
        TypeSpec::Struct(s) => {
            let mut out = String::from(match s.kind {
                StructKind::Struct => "struct",
                StructKind::Union => "union",
            });
            if let Some(n) = &s.name {
                out.push(' ');
                out.push_str(&n.name);
            }
            if let Some(ms) = &s.members {
                out.push_str(" { ");
                for m in ms {
                    out.push_str(&member(m));
                    out.push(' ');
                }
                out.push('}');
            }
            out
        }
        TypeSpec::Enum(e) => {
            let mut out = String::from("enum");
            if let Some(n) = &e.name {
                out.push(' ');
                out.push_str(&n.name);
            }
            if let Some(es) = &e.enumerators {
                let items: Vec<String> = es
                    .iter()
                    .map(|en| match &en.value {
                        Some(v) => format!("{} = {}", en.name.name, cond_expr(v)),
                        None => en.name.name.clone(),
                    })
                    .collect();
                out.push_str(&format!(" {{ {} }}", items.join(", ")));
            }
            out
        }
    }
}

fn cond_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, COND);
    s
}

fn assign_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, ASSIGN);
    s
}

fn member(m: &StructMember) -> String {
    match m {
        StructMember::Field { specs: ss, declarators } => {
            let ds: Vec<String> = declarators
                .iter()
                .map(|d| {
                    let mut s = d.declarator.as_ref().map(declarator).unwrap_or_default();
                    if let Some(w) = &d.width {
                        s.push_str(" : ");
                        s.push_str(&cond_expr(w));
                    }
                    s
                })
                .collect();
            if ds.is_empty() {
                format!("{};", specs(ss))
            } else {
                format!("{} {};", specs(ss), ds.join(", "))
            }
        }
        StructMember::StaticAssert { cond, message } => {
            format!("_Static_assert({}, {message});", cond_expr(cond))
        }
    }
}

fn quals(qs: &[TypeQual]) -> String {
    qs.iter().map(|q| q.as_str()).collect::<Vec<_>>().join(" ")
}

fn is_pointer(d: &Declarator) -> bool {
    matches!(d.kind, DeclaratorKind::Pointer { .. })
}

/// Prints a declarator, e.g. `*p[3]` or `(*f)(int)`.
pub fn declarator(d: &Declarator) -> String {
    match &d.kind {
        DeclaratorKind::Name(n) => n.name.clone(),
        DeclaratorKind::Abstract => String::new(),
        DeclaratorKind::Pointer { quals: qs, inner } => {
            let i = declarator(inner);
            if qs.is_empty() {
                format!("*{i}")
            } else if i.is_empty() {
                format!("* {}", quals(qs))
            } else {
                format!("* {} {i}", quals(qs))
            }
        }
        DeclaratorKind::Array {
            inner,
            quals: qs,
            is_static,
            size,
        } => {
            let mut s = wrapped(inner);
            s.push('[');
            let mut parts = Vec::new();
            if *is_static {
                parts.push("static".to_string());
            }
            if !qs.is_empty() {
                parts.push(quals(qs));
            }
            match size {
                ArraySize::Unspecified => {}
                ArraySize::Star => parts.push("*".into()),
                ArraySize::Expr(e) => parts.push(assign_expr(e)),
            }
            s.push_str(&parts.join(" "));
            s.push(']');
            s
        }
        DeclaratorKind::Function {
            inner,
            params,
            variadic,
        } => {
            let mut s = wrapped(inner);
            let mut ps: Vec<String> = params.iter().map(param).collect();
            if *variadic {
                ps.push("...".into());
            }
            s.push('(');
            s.push_str(&ps.join(", "));
            s.push(')');
            s
        }
        DeclaratorKind::KnR { inner, names } => {
            let names: Vec<&str> = names.iter().map(|n| n.name.as_str()).collect();
            format!("{}({})", wrapped(inner), names.join(", "))
        }
    }
}

fn wrapped(inner: &Declarator) -> String {
    let s = declarator(inner);
    if is_pointer(inner) {
        format!("({s})")
    } else {
        s
    }
}

fn param(p: &ParamDecl) -> String {
    let d = declarator(&p.declarator);
    if d.is_empty() {
        specs(&p.specs)
    } else {
        format!("{} {d}", specs(&p.specs))
    }
}

fn initializer(i: &Initializer) -> String {
    match i {
        Initializer::Expr(e) => assign_expr(e),
        Initializer::List(items) => init_list(items),
    }
}

fn init_list(items: &[InitItem]) -> String {
    let parts: Vec<String> = items
        .iter()
        .map(|it| {
            let mut s = String::new();
            for d in &it.designators {
                match d {
                    Designator::Index(e) => s.push_str(&format!("[{}]", cond_expr(e))),
                    Designator::Member(m) => s.push_str(&format!(".{}", m.name)),
                }
            }
            if !s.is_empty() {
                s.push_str(" = ");
            }
            s.push_str(&initializer(&it.init));
            s
        })
        .collect();
    format!("{{ {} }}", parts.join(", "))
}

pub fn decl(d: &Decl) -> String {
    match &d.kind {
        DeclKind::Var { specs: ss, items } => {
            let ds: Vec<String> = items
                .iter()
                .map(|it| match &it.init {
                    Some(i) => format!("{} = {}", declarator(&it.declarator), initializer(i)),
                    None => declarator(&it.declarator),
                })
                .collect();
            if ds.is_empty() {
                format!("{};", specs(ss))
            } else {
                format!("{} {};", specs(ss), ds.join(", "))
            }
        }
        DeclKind::StaticAssert { cond, message } => {
            format!("_Static_assert({}, {message});", cond_expr(cond))
        }
    }
}

pub fn stmt(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, s, 0);
    out
}

fn indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn write_stmt(out: &mut String, s: &Stmt, ind: usize) {
    match &s.kind {
        StmtKind::Compound(items) => {
            out.push_str("{\n");
            for it in items {
                indent(out, ind + 1);
                match it {
                    BlockItem::Decl(d) => out.push_str(&decl(d)),
                    BlockItem::Stmt(s) => write_stmt(out, s, ind + 1),
                }
                out.push('\n');
            }
            indent(out, ind);
            out.push('}');
        }
        StmtKind::Expr(None) => out.push(';'),
        StmtKind::Expr(Some(e)) => {
            out.push_str(&expr(e));
            out.push(';');
        }
        StmtKind::If { cond, then, els } => {
            out.push_str(&format!("if ({}) ", expr(cond)));
            write_stmt(out, then, ind);
            if let Some(e) = els {
                out.push_str(" else ");
                write_stmt(out, e, ind);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str(&format!("while ({}) ", expr(cond)));
            write_stmt(out, body, ind);
        }
        StmtKind::DoWhile { body, cond } => {
            out.push_str("do ");
            write_stmt(out, body, ind);
            out.push_str(&format!(" while ({});", expr(cond)));
        }
        StmtKind::For {
            init,
            cond,
            step,
            body,
        } => {
            out.push_str("for (");
            match init {
                ForInit::None => out.push(';'),
                ForInit::Expr(e) => {
                    out.push_str(&expr(e));
                    out.push(';');
                }
                ForInit::Decl(d) => out.push_str(&decl(d)),
            }
            if let Some(c) = cond {
                out.push(' ');
                out.push_str(&expr(c));
            }
            out.push(';');
            if let Some(st) = step {
                out.push(' ');
                out.push_str(&expr(st));
            }
            out.push_str(") ");
            write_stmt(out, body, ind);
        }
        StmtKind::Return(None) => out.push_str("return;"),
        StmtKind::Return(Some(e)) => out.push_str(&format!("return {};", expr(e))),
        StmtKind::Break => out.push_str("break;"),
        StmtKind::Continue => out.push_str("continue;"),
        StmtKind::Goto(l) => out.push_str(&format!("goto {};", l.name)),
        StmtKind::Labeled { label, body } => {
            out.push_str(&format!("{}: ", label.name));
            write_stmt(out, body, ind);
        }
        StmtKind::Switch { cond, body } => {
            out.push_str(&format!("switch ({}) ", expr(cond)));
            write_stmt(out, body, ind);
        }
        StmtKind::Case { value, body } => {
            out.push_str(&format!("case {}: ", cond_expr(value)));
            write_stmt(out, body, ind);
        }
        StmtKind::Default(body) => {
            out.push_str("default: ");
            write_stmt(out, body, ind);
        }
    }
}

/// Prints a translation unit as C source.
pub fn translation_unit(tu: &TranslationUnit) -> String {
    let mut out = String::new();
    for item in &tu.items {
        match item {
            ExternalDecl::Decl(d) => out.push_str(&decl(d)),
            ExternalDecl::Function(f) => {
                out.push_str(&specs(&f.specs));
                out.push(' ');
                out.push_str(&declarator(&f.declarator));
                out.push(' ');
                write_stmt(&mut out, &f.body, 0);
            }
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// S-expressions

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn node(head: &str, rest: impl IntoIterator<Item = Sexp>) -> Sexp {
        let mut v = vec![Sexp::atom(head)];
        v.extend(rest);
        Sexp::List(v)
    }

    /// Indented rendering: lists whose children are all atoms stay on one
    /// line.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.write_pretty(&mut out, 0);
        out.push('\n');
        out
    }

    fn write_pretty(&self, out: &mut String, ind: usize) {
        match self {
            Sexp::Atom(a) => out.push_str(a),
            Sexp::List(v) if v.iter().all(|x| matches!(x, Sexp::Atom(_))) => out.push_str(&self.to_string()),
            Sexp::List(v) => {
                out.push('(');
                v[0].write_pretty(out, ind + 1);
                for x in &v[1..] {
                    out.push('\n');
                    indent(out, ind + 1);
                    x.write_pretty(out, ind + 1);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn sexp_tu(tu: &TranslationUnit) -> Sexp {
    Sexp::node(
        "translation_unit",
        tu.items.iter().map(|it| match it {
            ExternalDecl::Decl(d) => sexp_decl(d),
            ExternalDecl::Function(f) => Sexp::node(
                "function",
                [
                    sexp_specs(&f.specs),
                    sexp_declarator(&f.declarator),
                    sexp_stmt(&f.body),
                ],
            ),
        }),
    )
}

fn sexp_specs(ss: &[DeclSpec]) -> Sexp {
    Sexp::node(
        "specs",
        ss.iter().map(|s| match s {
            DeclSpec::Type(TypeSpec::Struct(st)) => Sexp::node(
                match st.kind {
                    StructKind::Struct => "struct",
                    StructKind::Union => "union",
                },
                st.name
                    .iter()
                    .map(|n| Sexp::atom(&n.name))
                    .chain(st.members.iter().map(|ms| {
                        Sexp::node(
                            "members",
                            ms.iter().map(|m| match m {
                                StructMember::Field { specs, declarators } => Sexp::node(
                                    "field",
                                    std::iter::once(sexp_specs(specs)).chain(declarators.iter().map(|d| {
                                        Sexp::node(
                                            "member",
                                            d.declarator
                                                .iter()
                                                .map(sexp_declarator)
                                                .chain(d.width.iter().map(|w| Sexp::node("width", [sexp_expr(w)]))),
                                        )
                                    })),
                                ),
                                StructMember::StaticAssert { cond, message } => {
                                    Sexp::node("static_assert", [sexp_expr(cond), Sexp::atom(message)])
                                }
                            }),
                        )
                    })),
            ),
            DeclSpec::Type(TypeSpec::Enum(e)) => Sexp::node(
                "enum",
                e.name.iter().map(|n| Sexp::atom(&n.name)).chain(e.enumerators.iter().map(|es| {
                    Sexp::node(
                        "enumerators",
                        es.iter().map(|en| {
                            Sexp::node(
                                "enumerator",
                                std::iter::once(Sexp::atom(&en.name.name)).chain(en.value.iter().map(sexp_expr)),
                            )
                        }),
                    )
                })),
            ),
            DeclSpec::Type(TypeSpec::TypedefName(n)) => Sexp::node("typedef_name", [Sexp::atom(&n.name)]),
            other => Sexp::atom(spec(other)),
        }),
    )
}

fn sexp_declarator(d: &Declarator) -> Sexp {
    match &d.kind {
        DeclaratorKind::Name(n) => Sexp::node("name", [Sexp::atom(&n.name)]),
        DeclaratorKind::Abstract => Sexp::atom("abstract"),
        DeclaratorKind::Pointer { quals: qs, inner } => Sexp::node(
            "pointer",
            qs.iter().map(|q| Sexp::atom(q.as_str())).chain([sexp_declarator(inner)]),
        ),
        DeclaratorKind::Array {
            inner,
            quals: qs,
            is_static,
            size,
        } => Sexp::node(
            "array",
            [sexp_declarator(inner)]
                .into_iter()
                .chain(is_static.then(|| Sexp::atom("static")))
                .chain(qs.iter().map(|q| Sexp::atom(q.as_str())))
                .chain([match size {
                    ArraySize::Unspecified => Sexp::atom("unsized"),
                    ArraySize::Star => Sexp::atom("*"),
                    ArraySize::Expr(e) => sexp_expr(e),
                }]),
        ),
        DeclaratorKind::Function {
            inner,
            params,
            variadic,
        } => Sexp::node(
            "function",
            [sexp_declarator(inner)]
                .into_iter()
                .chain([Sexp::node(
                    "params",
                    params
                        .iter()
                        .map(|p| Sexp::node("param", [sexp_specs(&p.specs), sexp_declarator(&p.declarator)])),
                )])
                .chain(variadic.then(|| Sexp::atom("..."))),
        ),
        DeclaratorKind::KnR { inner, names } => Sexp::node(
            "knr",
            [sexp_declarator(inner)]
                .into_iter()
                .chain(names.iter().map(|n| Sexp::atom(&n.name))),
        ),
    }
}

fn sexp_init(i: &Initializer) -> Sexp {
    match i {
        Initializer::Expr(e) => sexp_expr(e),
        Initializer::List(items) => sexp_init_items(items),
    }
}

fn sexp_init_items(items: &[InitItem]) -> Sexp {
    Sexp::node(
        "init_list",
        items.iter().map(|it| {
            Sexp::node(
                "item",
                it.designators
                    .iter()
                    .map(|d| match d {
                        Designator::Index(e) => Sexp::node("at", [sexp_expr(e)]),
                        Designator::Member(m) => Sexp::node("dot", [Sexp::atom(&m.name)]),
                    })
                    .chain([sexp_init(&it.init)]),
            )
        }),
    )
}

pub fn sexp_decl(d: &Decl) -> Sexp {
    match &d.kind {
        DeclKind::Var { specs, items } => Sexp::node(
            "decl",
            std::iter::once(sexp_specs(specs)).chain(items.iter().map(|it| {
                Sexp::node(
                    "init_declarator",
                    std::iter::once(sexp_declarator(&it.declarator)).chain(it.init.iter().map(sexp_init)),
                )
            })),
        ),
        DeclKind::StaticAssert { cond, message } => Sexp::node("static_assert", [sexp_expr(cond), Sexp::atom(message)]),
    }
}

pub fn sexp_stmt(s: &Stmt) -> Sexp {
    match &s.kind {
        StmtKind::Compound(items) => Sexp::node(
            "compound",
            items.iter().map(|it| match it {
                BlockItem::Decl(d) => sexp_decl(d),
                BlockItem::Stmt(s) => sexp_stmt(s),
            }),
        ),
        StmtKind::Expr(e) => Sexp::node("expr_stmt", e.iter().map(sexp_expr)),
        StmtKind::If { cond, then, els } => Sexp::node(
            "if",
            [sexp_expr(cond), sexp_stmt(then)]
                .into_iter()
                .chain(els.iter().map(|e| sexp_stmt(e))),
        ),
        StmtKind::While { cond, body } => Sexp::node("while", [sexp_expr(cond), sexp_stmt(body)]),
        StmtKind::DoWhile { body, cond } => Sexp::node("do", [sexp_stmt(body), sexp_expr(cond)]),
        StmtKind::For {
            init,
            cond,
            step,
            body,
        } => Sexp::node(
            "for",
            [
                match init {
                    ForInit::None => Sexp::atom("_"),
                    ForInit::Expr(e) => sexp_expr(e),
                    ForInit::Decl(d) => sexp_decl(d),
                },
                cond.as_ref().map_or(Sexp::atom("_"), sexp_expr),
                step.as_ref().map_or(Sexp::atom("_"), sexp_expr),
                sexp_stmt(body),
            ],
        ),
        StmtKind::Return(e) => Sexp::node("return", e.iter().map(sexp_expr)),
        StmtKind::Break => Sexp::atom("break"),
        StmtKind::Continue => Sexp::atom("continue"),
        StmtKind::Goto(l) => Sexp::node("goto", [Sexp::atom(&l.name)]),
        StmtKind::Labeled { label, body } => Sexp::node("label", [Sexp::atom(&label.name), sexp_stmt(body)]),
        StmtKind::Switch { cond, body } => Sexp::node("switch", [sexp_expr(cond), sexp_stmt(body)]),
        StmtKind::Case { value, body } => Sexp::node("case", [sexp_expr(value), sexp_stmt(body)]),
        StmtKind::Default(body) => Sexp::node("default", [sexp_stmt(body)]),
    }
}

pub fn sexp_expr(e: &Expr) -> Sexp {
    match &e.kind {
        ExprKind::Ident(n) => Sexp::node("id", [Sexp::atom(n)]),
        ExprKind::IntLit(t) => Sexp::node("int", [Sexp::atom(t)]),
        ExprKind::FloatLit(t) => Sexp::node("float", [Sexp::atom(t)]),
        ExprKind::CharLit(t) => Sexp::node("char", [Sexp::atom(t)]),
        ExprKind::StrLit(p) => Sexp::node("string", p.iter().map(Sexp::atom)),
        ExprKind::Binary(op, l, r) => Sexp::node(op.as_str(), [sexp_expr(l), sexp_expr(r)]),
        ExprKind::Assign(op, l, r) => Sexp::node(op.as_str(), [sexp_expr(l), sexp_expr(r)]),
        ExprKind::Unary(op, x) => Sexp::node(&format!("prefix{}", op.as_str()), [sexp_expr(x)]),
        ExprKind::PostInc(x) => Sexp::node("postfix++", [sexp_expr(x)]),
        ExprKind::PostDec(x) => Sexp::node("postfix--", [sexp_expr(x)]),
        ExprKind::Call(f, args) => Sexp::node("call", std::iter::once(sexp_expr(f)).chain(args.iter().map(sexp_expr))),
        ExprKind::Index(a, i) => Sexp::node("index", [sexp_expr(a), sexp_expr(i)]),
        ExprKind::Member { base, field, arrow } => {
            Sexp::node(if *arrow { "->" } else { "." }, [sexp_expr(base), Sexp::atom(&field.name)])
        }
        ExprKind::Cast(t, x) => Sexp::node("cast", [sexp_type_name(t), sexp_expr(x)]),
        ExprKind::SizeofExpr(x) => Sexp::node("sizeof", [sexp_expr(x)]),
        ExprKind::SizeofType(t) => Sexp::node("sizeof_type", [sexp_type_name(t)]),
        ExprKind::AlignofType(t) => Sexp::node("alignof", [sexp_type_name(t)]),
        ExprKind::Cond(c, a, b) => Sexp::node("?:", [sexp_expr(c), sexp_expr(a), sexp_expr(b)]),
        ExprKind::Comma(a, b) => Sexp::node(",", [sexp_expr(a), sexp_expr(b)]),
        ExprKind::CompoundLiteral(t, items) => Sexp::node("compound_literal", [sexp_type_name(t), sexp_init_items(items)]),
    }
}

fn sexp_type_name(t: &TypeName) -> Sexp {
    Sexp::node("type", [sexp_specs(&t.specs), sexp_declarator(&t.declarator)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Env;
    use crate::lexer::tokenize;
    use crate::parser::{parse, parse_expression, Wrappers};

    fn reparse(src: &str) {
        let a = parse(&tokenize(src).tokens, Env::new(), &Wrappers::new());
        assert!(a.diagnostics.is_empty(), "{src}: {:?}", a.diagnostics);
        let printed = translation_unit(&a.ast);
        let b = parse(&tokenize(&printed).tokens, Env::new(), &Wrappers::new());
        assert!(b.diagnostics.is_empty(), "{printed}: {:?}", b.diagnostics);
        assert_eq!(sexp_tu(&a.ast), sexp_tu(&b.ast), "{printed}");
    }

    fn e(src: &str) -> String {
        expr(&parse_expression(&tokenize(src).tokens, Env::new()).unwrap())
    }

    #[test]
    fn minimal_parens() {
        assert_eq!(e("(a + b) * c"), "(a + b) * c");
        assert_eq!(e("a + (b * c)"), "a + b * c");
        assert_eq!(e("a - (b - c)"), "a - (b - c)");
        assert_eq!(e("(a - b) - c"), "a - b - c");
        assert_eq!(e("a = b = c"), "a = b = c");
        assert_eq!(e("-(-x)"), "- -x");
        assert_eq!(e("(a, b)"), "a, b");
        assert_eq!(e("f((a, b))"), "f((a, b))");
        assert_eq!(e("a ? b : c ? d : e"), "a ? b : c ? d : e");
        assert_eq!(e("(a ? b : c) ? d : e"), "(a ? b : c) ? d : e");
    }

    #[test]
    fn declarators() {
        reparse("int *p[3]; int (*q)[3]; int (*f)(int, char *); int *g(void); char **argv;");
        reparse("const int * const x = 0; unsigned long long n;");
    }

    #[test]
    fn statements_and_types() {
        reparse(
            "struct s { int a, b : 3; struct s *next; }; enum e { A, B = 2 };\n\
             typedef struct s S;\n\
             int f(S *p, int n, ...) {\n\
               int a[2] = { 1, [1] = 2 }; struct s v = { .a = 1 };\n\
               for (int i = 0; i < n; i++) { if (i) continue; else break; }\n\
               while (n--) ; do n++; while (n < 3);\n\
               switch (n) { case 1: n = 2; break; default: ; }\n\
               out: return p->a + sizeof(S) + sizeof n + (int)n;\n\
             }",
        );
    }
}
