//! Lowering of the C11 AST to CoreC, a small imperative core.
//!
//! CoreC has no `for`, `do`, compound assignment, increments or comma
//! operator; they are desugared here. Types are integer scalars, opaque
//! pointers and arrays of scalars. Constructs outside the core produce one
//! diagnostic each and mark the enclosing function untranslatable; lowering
//! itself always continues with the next declaration.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::annot::SpecAttachment;
use crate::ast::{self, ArraySize, BinOp, DeclSpec, DeclaratorKind, StorageClass, TypeSpec, UnOp};
use crate::diag::Diagnostic;
use crate::preproc::int_literal_value;
use crate::pretty::Sexp;
use crate::source::{FileId, Range};

pub const UINT_MAX: &str = "UINT_MAX";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreType {
    Void,
    Int { unsigned: bool, text: String },
    /// Pointers are opaque; only the pointee's spelling is kept.
    Ptr(String),
    Array(Box<CoreType>, Option<u64>),
}

impl CoreType {
    pub fn is_scalar(&self) -> bool {
        matches!(self, CoreType::Int { .. } | CoreType::Ptr(_))
    }

    fn is_unsigned_int(&self) -> bool {
        matches!(self, CoreType::Int { unsigned: true, text } if text == "unsigned int" || text == "unsigned")
    }

    pub fn text(&self) -> String {
        match self {
            CoreType::Void => "void".into(),
            CoreType::Int { text, .. } => text.clone(),
            CoreType::Ptr(p) => format!("{p}*"),
            CoreType::Array(t, Some(n)) => format!("{}[{n}]", t.text()),
            CoreType::Array(t, None) => format!("{}[]", t.text()),
        }
    }
}

/// Specification text attached by an annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecNote {
    pub keyword: String,
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub range: Range,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(BigInt),
    Var(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// One of `-`, `+`, `!`, `~`.
    Unary(UnOp, Box<Expr>),
    Call(String, Vec<Expr>),
    Index(Box<Expr>, Box<Expr>),
    Member(Box<Expr>, String, bool),
    /// `c ? a : b`; only the chosen branch is evaluated.
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LValue {
    Var(String),
    Index(String, Expr),
}

impl LValue {
    pub fn name(&self) -> &str {
        match self {
            LValue::Var(n) | LValue::Index(n, _) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub range: Range,
    pub specs: Vec<SpecNote>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Assign(LValue, Expr),
    If(Expr, Box<Stmt>, Box<Stmt>),
    While(Expr, Box<Stmt>),
    Return(Option<Expr>),
    Break,
    Skip,
    Seq(Vec<Stmt>),
    /// A call whose result is discarded.
    Call(Expr),
    Assert(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Init {
    Scalar(BigInt),
    Array(Vec<BigInt>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Global {
    pub name: String,
    pub ty: CoreType,
    pub init: Option<Init>,
    pub range: Range,
    pub file: FileId,
    pub specs: Vec<SpecNote>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: String,
    pub params: Vec<(String, CoreType)>,
    pub ret: CoreType,
    /// Block-scoped locals, renamed apart where names repeat.
    pub locals: Vec<(String, CoreType)>,
    /// `None` when the function contains unsupported constructs.
    pub body: Option<Stmt>,
    pub range: Range,
    pub file: FileId,
    pub specs: Vec<SpecNote>,
}

impl Function {
    pub fn translatable(&self) -> bool {
        self.body.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Program {
    pub globals: Vec<Global>,
    pub functions: Vec<Function>,
    /// Enumeration constants.
    pub constants: BTreeMap<String, BigInt>,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.iter().find(|f| f.name == name)
    }
}

/// Lowers a translation unit. Never fails as a whole.
pub fn lower(tu: &ast::TranslationUnit) -> (Program, Vec<Diagnostic>) {
    lower_in(tu, |_| FileId(0))
}

/// Like [`lower`], with `file_of` telling which file each external
/// declaration came from.
pub fn lower_in(tu: &ast::TranslationUnit, file_of: impl Fn(ast::NodeId) -> FileId) -> (Program, Vec<Diagnostic>) {
    let mut l = Lowerer::default();
    for item in &tu.items {
        match item {
            ast::ExternalDecl::Decl(d) => {
                l.file = file_of(d.id);
                l.global_decl(d)
            }
            ast::ExternalDecl::Function(f) => {
                l.file = file_of(f.id);
                l.function(f)
            }
        }
    }
    (l.program, l.diags)
}

/// A type before restriction to the core.
#[derive(Debug, Clone)]
enum Ty {
    Base(Base),
    Ptr(Box<Ty>),
    Array(Box<Ty>, Option<u64>),
    Func(Box<Ty>, Vec<(Option<String>, Ty)>, bool),
    Unsupported(String),
}

#[derive(Debug, Clone)]
enum Base {
    Void,
    Int { unsigned: bool, text: String },
    /// Struct, union or floating types: fine behind a pointer only.
    Other(String),
}

impl Ty {
    fn text(&self) -> String {
        match self {
            Ty::Base(Base::Void) => "void".into(),
            Ty::Base(Base::Int { text, .. }) | Ty::Base(Base::Other(text)) => text.clone(),
            Ty::Ptr(t) => format!("{}*", t.text()),
            Ty::Array(t, _) => format!("{}[]", t.text()),
            Ty::Func(r, _, _) => format!("{}()", r.text()),
            Ty::Unsupported(w) => w.clone(),
        }
    }
}

#[derive(Default)]
struct Lowerer {
    program: Program,
    diags: Vec<Diagnostic>,
    typedefs: HashMap<String, Ty>,
    globals: HashMap<String, CoreType>,
    functions: HashMap<String, ()>,
    file: FileId,
    /// Set while lowering a function body.
    f: Option<FnState>,
}

#[derive(Default)]
struct FnState {
    scopes: Vec<HashMap<String, (String, CoreType)>>,
    locals: Vec<(String, CoreType)>,
    uses: HashMap<String, usize>,
    loops: usize,
    ok: bool,
}

impl Lowerer {
    fn unsupported(&mut self, what: impl AsRef<str>, range: Range) {
        self.diags
            .push(Diagnostic::warning(range, format!("unsupported: {}", what.as_ref())).in_file(self.file));
        if let Some(f) = &mut self.f {
            f.ok = false;
        }
    }

    // ---- types -------------------------------------------------------

    fn base(&mut self, specs: &[DeclSpec]) -> Ty {
        let mut words = Vec::new();
        for s in specs {
            match s {
                DeclSpec::Type(TypeSpec::Basic(b)) => words.push(*b),
                DeclSpec::Type(TypeSpec::TypedefName(n)) => {
                    return self
                        .typedefs
                        .get(&n.name)
                        .cloned()
                        .unwrap_or_else(|| Ty::Unsupported(format!("unknown type `{}`", n.name)))
                }
                DeclSpec::Type(TypeSpec::Enum(e)) => {
                    self.enumerators(e);
                    return Ty::Base(Base::Int {
                        unsigned: false,
                        text: "int".into(),
                    });
                }
                DeclSpec::Type(TypeSpec::Struct(st)) => {
                    let kw = match st.kind {
                        ast::StructKind::Struct => "struct",
                        ast::StructKind::Union => "union",
                    };
                    let name = st.name.as_ref().map_or(String::new(), |n| format!(" {}", n.name));
                    return Ty::Base(Base::Other(format!("{kw}{name}")));
                }
                _ => {}
            }
        }
        if words.is_empty() {
            words.push("int");
        }
        let text = words.join(" ");
        if words.contains(&"void") {
            Ty::Base(Base::Void)
        } else if words.iter().any(|w| matches!(*w, "float" | "double" | "_Complex")) {
            Ty::Base(Base::Other(text))
        } else {
            let unsigned = words.iter().any(|w| matches!(*w, "unsigned" | "_Bool"));
            Ty::Base(Base::Int { unsigned, text })
        }
    }

    fn derive(&mut self, base: Ty, d: &ast::Declarator) -> Ty {
        match &d.kind {
            DeclaratorKind::Name(_) | DeclaratorKind::Abstract => base,
            DeclaratorKind::Pointer { inner, .. } => self.derive(Ty::Ptr(Box::new(base)), inner),
            DeclaratorKind::Array { inner, size, .. } => {
                let n = match size {
                    ArraySize::Expr(e) => match self.const_eval(e).and_then(|v| v.to_u64()) {
                        Some(n) => Some(n),
                        None => return Ty::Unsupported("non-constant array size".into()),
                    },
                    _ => None,
                };
                self.derive(Ty::Array(Box::new(base), n), inner)
            }
            DeclaratorKind::Function {
                inner,
                params,
                variadic,
            } => {
                let ps = params
                    .iter()
                    .map(|p| {
                        let b = self.base(&p.specs);
                        (p.declarator.name().map(|n| n.name.clone()), self.derive(b, &p.declarator))
                    })
                    .collect();
                self.derive(Ty::Func(Box::new(base), ps, *variadic), inner)
            }
            DeclaratorKind::KnR { .. } => Ty::Unsupported("K&R parameter list".into()),
        }
    }

    /// Restricts a value type to the core.
    fn core(&self, t: &Ty) -> Result<CoreType, String> {
        match t {
            Ty::Base(Base::Void) => Ok(CoreType::Void),
            Ty::Base(Base::Int { unsigned, text }) => Ok(CoreType::Int {
                unsigned: *unsigned,
                text: text.clone(),
            }),
            Ty::Base(Base::Other(text)) if text.starts_with("struct") || text.starts_with("union") => {
                Err(format!("{text} value"))
            }
            Ty::Base(Base::Other(text)) => Err(format!("floating point type `{text}`")),
            Ty::Ptr(inner) => match **inner {
                Ty::Func(..) => Err("function pointer".into()),
                Ty::Unsupported(ref w) => Err(w.clone()),
                ref p => Ok(CoreType::Ptr(p.text())),
            },
            Ty::Array(elem, n) => {
                let e = self.core(elem)?;
                if matches!(e, CoreType::Int { .. }) {
                    Ok(CoreType::Array(Box::new(e), *n))
                } else {
                    Err(format!("array of {}", e.text()))
                }
            }
            Ty::Func(..) => Err("function type in value position".into()),
            Ty::Unsupported(w) => Err(w.clone()),
        }
    }

    fn enumerators(&mut self, e: &ast::EnumSpec) {
        let Some(list) = &e.enumerators else { return };
        let mut next = BigInt::zero();
        for en in list {
            if let Some(v) = &en.value {
                match self.const_eval(v) {
                    Some(v) => next = v,
                    None => {
                        self.unsupported("non-constant enumerator value", v.range);
                        continue;
                    }
                }
            }
            self.program.constants.insert(en.name.name.clone(), next.clone());
            next += 1;
        }
    }

    fn const_eval(&self, e: &ast::Expr) -> Option<BigInt> {
        use ast::ExprKind as K;
        match &e.kind {
            K::IntLit(t) => int_literal_value(t),
            K::CharLit(t) => char_value(t),
            K::Ident(n) => self.program.constants.get(n).cloned(),
            K::Unary(op, x) => {
                let v = self.const_eval(x)?;
                unary(*op, &v)
            }
            K::Binary(op, a, b) => {
                let (a, b) = (self.const_eval(a)?, self.const_eval(b)?);
                binary(*op, &a, &b)
            }
            K::Cast(_, x) => self.const_eval(x),
            K::Cond(c, a, b) => {
                if self.const_eval(c)?.is_zero() {
                    self.const_eval(b)
                } else {
                    self.const_eval(a)
                }
            }
            _ => None,
        }
    }

    // ---- file scope --------------------------------------------------

    fn global_decl(&mut self, d: &ast::Decl) {
        let ast::DeclKind::Var { specs, items } = &d.kind else { return };
        let is_typedef = specs.contains(&DeclSpec::Storage(StorageClass::Typedef));
        let base = self.base(specs);
        for it in items {
            let ty = self.derive(base.clone(), &it.declarator);
            let Some(name) = it.declarator.name().map(|n| n.name.clone()) else { continue };
            let range = it.declarator.range.unwrap_or(d.range);
            if is_typedef {
                self.typedefs.insert(name, ty);
                continue;
            }
            if let Ty::Func(..) = ty {
                self.functions.insert(name, ());
                continue;
            }
            let ct = match self.core(&ty) {
                Ok(t) if t != CoreType::Void => t,
                Ok(_) => {
                    self.unsupported(format!("void variable `{name}`"), range);
                    continue;
                }
                Err(w) => {
                    self.unsupported(w, range);
                    continue;
                }
            };
            let init = match &it.init {
                None => None,
                Some(ast::Initializer::Expr(e)) => match self.const_eval(e) {
                    Some(v) if ct.is_scalar() => Some(Init::Scalar(v)),
                    _ => {
                        self.unsupported("non-constant global initializer", e.range);
                        continue;
                    }
                },
                Some(ast::Initializer::List(list)) => {
                    let vals: Option<Vec<BigInt>> = list
                        .iter()
                        .map(|i| match (&i.designators[..], &i.init) {
                            ([], ast::Initializer::Expr(e)) => self.const_eval(e),
                            _ => None,
                        })
                        .collect();
                    match (vals, &ct) {
                        (Some(v), CoreType::Array(..)) => Some(Init::Array(v)),
                        (Some(v), _) if v.len() == 1 => Some(Init::Scalar(v[0].clone())),
                        _ => {
                            self.unsupported("global initializer list", range);
                            continue;
                        }
                    }
                }
            };
            if self.globals.contains_key(&name) {
                // A tentative definition followed by the real one.
                self.program.globals.retain(|g| g.name != name);
            }
            self.globals.insert(name.clone(), ct.clone());
            self.program.globals.push(Global {
                name,
                ty: ct,
                init,
                range: d.range,
                file: self.file,
                specs: Vec::new(),
            });
        }
    }

    fn function(&mut self, fd: &ast::FunctionDef) {
        let name = fd.declarator.name().map(|n| n.name.clone()).unwrap_or_default();
        self.functions.insert(name.clone(), ());
        self.f = Some(FnState {
            scopes: vec![HashMap::new()],
            ok: true,
            ..FnState::default()
        });
        let base = self.base(&fd.specs);
        let ty = self.derive(base, &fd.declarator);
        let (ret, params) = match ty {
            Ty::Func(ret, params, variadic) => {
                if variadic {
                    self.unsupported("variadic function", fd.declarator.range.unwrap_or(fd.range));
                }
                let ret = match self.core(&ret) {
                    Ok(t) => t,
                    Err(w) => {
                        self.unsupported(format!("return type: {w}"), fd.range);
                        CoreType::Void
                    }
                };
                (ret, params)
            }
            _ => {
                self.unsupported("function declarator", fd.range);
                (CoreType::Void, Vec::new())
            }
        };
        let mut ps = Vec::new();
        for (pname, pty) in params {
            if matches!(pty, Ty::Base(Base::Void)) && pname.is_none() {
                continue;
            }
            // Array parameters decay.
            let pty = match pty {
                Ty::Array(e, _) => Ty::Ptr(e),
                t => t,
            };
            let Some(pname) = pname else {
                self.unsupported("unnamed parameter", fd.range);
                continue;
            };
            match self.core(&pty) {
                Ok(t) => {
                    let f = self.f.as_mut().unwrap();
                    f.uses.insert(pname.clone(), 1);
                    f.scopes[0].insert(pname.clone(), (pname.clone(), t.clone()));
                    ps.push((pname, t));
                }
                Err(w) => self.unsupported(format!("parameter `{pname}`: {w}"), fd.range),
            }
        }
        let body = self.stmt(&fd.body);
        let f = self.f.take().unwrap();
        self.program.functions.push(Function {
            name,
            params: ps,
            ret,
            locals: f.locals,
            body: if f.ok { body } else { None },
            range: fd.range,
            file: self.file,
            specs: Vec::new(),
        });
    }

    // ---- function scope ----------------------------------------------

    fn lookup(&self, name: &str) -> Option<(String, CoreType)> {
        if let Some(f) = &self.f {
            for s in f.scopes.iter().rev() {
                if let Some(b) = s.get(name) {
                    return Some(b.clone());
                }
            }
        }
        self.globals.get(name).map(|t| (name.to_string(), t.clone()))
    }

    fn declare_local(&mut self, name: &str, t: CoreType) -> String {
        let f = self.f.as_mut().unwrap();
        let n = f.uses.entry(name.to_string()).or_insert(0);
        *n += 1;
        let unique = if *n == 1 { name.to_string() } else { format!("{name}'{n}") };
        f.scopes.last_mut().unwrap().insert(name.to_string(), (unique.clone(), t.clone()));
        f.locals.push((unique.clone(), t));
        unique
    }

    fn push(&mut self) {
        self.f.as_mut().unwrap().scopes.push(HashMap::new());
    }

    fn pop(&mut self) {
        self.f.as_mut().unwrap().scopes.pop();
    }

    fn local_decl(&mut self, d: &ast::Decl) -> Option<Vec<Stmt>> {
        let ast::DeclKind::Var { specs, items } = &d.kind else {
            return Some(Vec::new());
        };
        for s in specs {
            if let DeclSpec::Storage(sc @ (StorageClass::Static | StorageClass::Extern | StorageClass::ThreadLocal)) = s {
                self.unsupported(format!("{} local declaration", sc.as_str()), d.range);
                return None;
            }
        }
        let is_typedef = specs.contains(&DeclSpec::Storage(StorageClass::Typedef));
        let base = self.base(specs);
        let mut out = Vec::new();
        let mut ok = true;
        for it in items {
            let ty = self.derive(base.clone(), &it.declarator);
            let Some(name) = it.declarator.name().map(|n| n.name.clone()) else { continue };
            let range = it.declarator.range.unwrap_or(d.range);
            if is_typedef {
                self.typedefs.insert(name, ty);
                continue;
            }
            if let Ty::Func(..) = ty {
                self.functions.insert(name, ());
                continue;
            }
            let ct = match self.core(&ty) {
                Ok(t) if t != CoreType::Void => t,
                Ok(_) => {
                    self.unsupported(format!("void variable `{name}`"), range);
                    ok = false;
                    continue;
                }
                Err(w) => {
                    self.unsupported(w, range);
                    ok = false;
                    continue;
                }
            };
            // The initializer is evaluated before the name is in scope.
            let init = match &it.init {
                None => Some(Vec::new()),
                Some(ast::Initializer::Expr(e)) => self.expr(e).map(|v| vec![(None, v)]),
                Some(ast::Initializer::List(list)) => self.init_list(list, &ct, range),
            };
            let unique = self.declare_local(&name, ct);
            let Some(init) = init else {
                ok = false;
                continue;
            };
            for (ix, v) in init {
                let full = range.hull(v.range);
                let lv = match ix {
                    None => LValue::Var(unique.clone()),
                    Some(i) => LValue::Index(
                        unique.clone(),
                        Expr {
                            kind: ExprKind::Int(BigInt::from(i)),
                            range: v.range,
                        },
                    ),
                };
                out.push(stmt(StmtKind::Assign(lv, v), full));
            }
        }
        ok.then_some(out)
    }

    fn init_list(&mut self, list: &[ast::InitItem], t: &CoreType, range: Range) -> Option<Vec<(Option<usize>, Expr)>> {
        let mut out = Vec::new();
        for (i, item) in list.iter().enumerate() {
            match (&item.designators[..], &item.init) {
                ([], ast::Initializer::Expr(e)) => {
                    let v = self.expr(e)?;
                    out.push((matches!(t, CoreType::Array(..)).then_some(i), v));
                }
                _ => {
                    self.unsupported("designated or nested initializer", range);
                    return None;
                }
            }
        }
        if !matches!(t, CoreType::Array(..)) && out.len() != 1 {
            self.unsupported("initializer list for a scalar", range);
            return None;
        }
        Some(out)
    }

    fn stmt(&mut self, s: &ast::Stmt) -> Option<Stmt> {
        use ast::StmtKind as K;
        let r = s.range;
        Some(match &s.kind {
            K::Compound(items) => {
                self.push();
                let mut out = Vec::new();
                let mut ok = true;
                for it in items {
                    match it {
                        ast::BlockItem::Decl(d) => match self.local_decl(d) {
                            Some(v) => out.extend(v),
                            None => ok = false,
                        },
                        ast::BlockItem::Stmt(s) => match self.stmt(s) {
                            Some(v) => out.push(v),
                            None => ok = false,
                        },
                    }
                }
                self.pop();
                if !ok {
                    return None;
                }
                stmt(StmtKind::Seq(out), r)
            }
            K::Expr(None) => stmt(StmtKind::Skip, r),
            K::Expr(Some(e)) => {
                let v = self.effect(e)?;
                if v.len() == 1 {
                    let mut only = v.into_iter().next().unwrap();
                    only.range = only.range.hull(r);
                    only
                } else {
                    stmt(StmtKind::Seq(v), r)
                }
            }
            K::If { cond, then, els } => {
                let c = self.expr(cond);
                let t = self.stmt(then);
                let e = match els {
                    Some(e) => self.stmt(e),
                    None => Some(stmt(StmtKind::Skip, then.range)),
                };
                stmt(StmtKind::If(c?, Box::new(t?), Box::new(e?)), r)
            }
            K::While { cond, body } => {
                let c = self.expr(cond);
                let b = self.loop_body(body);
                stmt(StmtKind::While(c?, Box::new(b?)), r)
            }
            K::DoWhile { body, cond } => {
                // do B while (c)  ==>  while (1) { B; if (!c) break; }
                let b = self.loop_body(body);
                let c = self.expr(cond)?;
                let exit = stmt(
                    StmtKind::If(
                        Expr {
                            range: c.range,
                            kind: ExprKind::Unary(UnOp::Not, Box::new(c)),
                        },
                        Box::new(stmt(StmtKind::Break, cond.range)),
                        Box::new(stmt(StmtKind::Skip, cond.range)),
                    ),
                    cond.range,
                );
                let one = Expr {
                    kind: ExprKind::Int(BigInt::from(1)),
                    range: r,
                };
                stmt(StmtKind::While(one, Box::new(stmt(StmtKind::Seq(vec![b?, exit]), r))), r)
            }
            K::For {
                init,
                cond,
                step,
                body,
            } => {
                // for (I; C; S) B  ==>  I; while (C) { B; S }
                self.push();
                let init = match init {
                    ast::ForInit::None => Some(Vec::new()),
                    ast::ForInit::Expr(e) => self.effect(e),
                    ast::ForInit::Decl(d) => self.local_decl(d),
                };
                let c = match cond {
                    Some(c) => self.expr(c),
                    None => Some(Expr {
                        kind: ExprKind::Int(BigInt::from(1)),
                        range: r,
                    }),
                };
                let b = self.loop_body(body);
                let st = match step {
                    Some(e) => self.effect(e),
                    None => Some(Vec::new()),
                };
                self.pop();
                let (mut init, c, b, st) = (init?, c?, b?, st?);
                let mut inner = vec![b];
                inner.extend(st);
                init.push(stmt(StmtKind::While(c, Box::new(stmt(StmtKind::Seq(inner), body.range))), r));
                stmt(StmtKind::Seq(init), r)
            }
            K::Return(e) => {
                let v = match e {
                    Some(e) => Some(self.expr(e)?),
                    None => None,
                };
                stmt(StmtKind::Return(v), r)
            }
            K::Break => {
                if self.f.as_ref().unwrap().loops == 0 {
                    self.unsupported("break outside a loop", r);
                    return None;
                }
                stmt(StmtKind::Break, r)
            }
            K::Continue => {
                self.unsupported("continue", r);
                return None;
            }
            K::Goto(_) => {
                self.unsupported("goto", r);
                return None;
            }
            K::Labeled { .. } => {
                self.unsupported("label", r);
                return None;
            }
            K::Switch { .. } => {
                self.unsupported("switch", r);
                return None;
            }
            K::Case { .. } | K::Default(_) => {
                self.unsupported("case label", r);
                return None;
            }
        })
    }

    fn loop_body(&mut self, body: &ast::Stmt) -> Option<Stmt> {
        self.f.as_mut().unwrap().loops += 1;
        let b = self.stmt(body);
        self.f.as_mut().unwrap().loops -= 1;
        b
    }

    /// An expression in statement position.
    fn effect(&mut self, e: &ast::Expr) -> Option<Vec<Stmt>> {
        use ast::ExprKind as K;
        let r = e.range;
        match &e.kind {
            K::Comma(a, b) => {
                let a = self.effect(a);
                let b = self.effect(b);
                let mut v = a?;
                v.extend(b?);
                Some(v)
            }
            K::Assign(op, lhs, rhs) => {
                let lv = self.lvalue(lhs);
                let v = self.expr(rhs);
                let (lv, v) = (lv?, v?);
                let v = match op.0 {
                    None => v,
                    Some(op) => self.binary(op, lvalue_expr(&lv, lhs.range), v, r)?,
                };
                let mut out = vec![stmt(StmtKind::Assign(lv.clone(), v), r)];
                if op.0 == Some(BinOp::Add) {
                    out.extend(self.overflow_check(&lv, r));
                }
                Some(out)
            }
            K::PostInc(x) | K::Unary(UnOp::PreInc, x) => self.step(x, BinOp::Add, r),
            K::PostDec(x) | K::Unary(UnOp::PreDec, x) => self.step(x, BinOp::Sub, r),
            K::Call(..) => Some(vec![stmt(StmtKind::Call(self.expr(e)?), r)]),
            _ => {
                self.expr(e)?;
                Some(vec![stmt(StmtKind::Skip, r)])
            }
        }
    }

    fn step(&mut self, x: &ast::Expr, op: BinOp, r: Range) -> Option<Vec<Stmt>> {
        let lv = self.lvalue(x)?;
        let one = Expr {
            kind: ExprKind::Int(BigInt::from(1)),
            range: r,
        };
        let v = self.binary(op, lvalue_expr(&lv, x.range), one, r)?;
        let mut out = vec![stmt(StmtKind::Assign(lv.clone(), v), r)];
        if op == BinOp::Add {
            out.extend(self.overflow_check(&lv, r));
        }
        Some(out)
    }

    /// `assert(x <= UINT_MAX)` after incrementing an `unsigned int`.
    fn overflow_check(&self, lv: &LValue, r: Range) -> Option<Stmt> {
        let LValue::Var(name) = lv else { return None };
        let t = self.type_of_unique(name)?;
        t.is_unsigned_int().then(|| {
            let var = Expr {
                kind: ExprKind::Var(name.clone()),
                range: r,
            };
            let max = Expr {
                kind: ExprKind::Var(UINT_MAX.into()),
                range: r,
            };
            stmt(
                StmtKind::Assert(Expr {
                    kind: ExprKind::Binary(BinOp::Le, Box::new(var), Box::new(max)),
                    range: r,
                }),
                r,
            )
        })
    }

    fn type_of_unique(&self, unique: &str) -> Option<CoreType> {
        if let Some(f) = &self.f {
            if let Some((_, t)) = f.locals.iter().find(|(n, _)| n == unique) {
                return Some(t.clone());
            }
            for s in &f.scopes {
                if let Some((_, t)) = s.values().find(|(n, _)| n == unique) {
                    return Some(t.clone());
                }
            }
        }
        self.globals.get(unique).cloned()
    }

    fn lvalue(&mut self, e: &ast::Expr) -> Option<LValue> {
        use ast::ExprKind as K;
        match &e.kind {
            K::Ident(n) => match self.lookup(n) {
                Some((u, t)) if t.is_scalar() => Some(LValue::Var(u)),
                Some(_) => {
                    self.unsupported(format!("assignment to array `{n}`"), e.range);
                    None
                }
                None => {
                    self.unsupported(format!("assignment to undeclared `{n}`"), e.range);
                    None
                }
            },
            K::Index(a, i) => match &a.kind {
                K::Ident(n) if matches!(self.lookup(n), Some((_, CoreType::Array(..)))) => {
                    let (u, _) = self.lookup(n).unwrap();
                    Some(LValue::Index(u, self.expr(i)?))
                }
                _ => {
                    self.unsupported("assignment through a pointer", e.range);
                    None
                }
            },
            K::Unary(UnOp::Deref, _) => {
                self.unsupported("assignment through a pointer", e.range);
                None
            }
            K::Member { .. } => {
                self.unsupported("assignment to a member", e.range);
                None
            }
            _ => {
                self.unsupported("assignment target", e.range);
                None
            }
        }
    }

    fn is_pointer(&self, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Var(n) => matches!(self.type_of_unique(n), Some(CoreType::Ptr(_))),
            ExprKind::Cond(_, a, b) => self.is_pointer(a) || self.is_pointer(b),
            _ => false,
        }
    }

    fn binary(&mut self, op: BinOp, a: Expr, b: Expr, r: Range) -> Option<Expr> {
        if matches!(op, BinOp::Add | BinOp::Sub) && (self.is_pointer(&a) || self.is_pointer(&b)) {
            self.unsupported("pointer arithmetic", r);
            return None;
        }
        Some(Expr {
            kind: ExprKind::Binary(op, Box::new(a), Box::new(b)),
            range: r,
        })
    }

    /// An expression in value position.
    fn expr(&mut self, e: &ast::Expr) -> Option<Expr> {
        use ast::ExprKind as K;
        let r = e.range;
        let kind = match &e.kind {
            K::Ident(n) => match self.lookup(n) {
                Some((u, _)) => ExprKind::Var(u),
                None if self.functions.contains_key(n) => {
                    self.unsupported(format!("function `{n}` used as a value"), r);
                    return None;
                }
                None => ExprKind::Var(n.clone()),
            },
            K::IntLit(t) => match int_literal_value(t) {
                Some(v) => ExprKind::Int(v),
                None => {
                    self.unsupported(format!("integer literal `{t}`"), r);
                    return None;
                }
            },
            K::CharLit(t) => match char_value(t) {
                Some(v) => ExprKind::Int(v),
                None => {
                    self.unsupported(format!("character literal {t}"), r);
                    return None;
                }
            },
            K::FloatLit(_) => {
                self.unsupported("floating point literal", r);
                return None;
            }
            K::StrLit(_) => {
                self.unsupported("string literal", r);
                return None;
            }
            K::Binary(op, a, b) => {
                let a = self.expr(a);
                let b = self.expr(b);
                return self.binary(*op, a?, b?, r);
            }
            K::Unary(op @ (UnOp::Neg | UnOp::Plus | UnOp::Not | UnOp::BitNot), x) => {
                ExprKind::Unary(*op, Box::new(self.expr(x)?))
            }
            K::Unary(UnOp::Deref, _) => {
                self.unsupported("pointer dereference", r);
                return None;
            }
            K::Unary(UnOp::AddrOf, _) => {
                self.unsupported("address-of", r);
                return None;
            }
            K::Unary(UnOp::PreInc | UnOp::PreDec, _) | K::PostInc(_) | K::PostDec(_) => {
                self.unsupported("increment inside an expression", r);
                return None;
            }
            K::Assign(..) => {
                self.unsupported("assignment inside an expression", r);
                return None;
            }
            K::Call(f, args) => {
                let K::Ident(name) = &f.kind else {
                    self.unsupported("call through a function pointer", r);
                    return None;
                };
                if self.lookup(name).is_some() {
                    self.unsupported("call through a function pointer", r);
                    return None;
                }
                let mut out = Vec::new();
                let mut ok = true;
                for a in args {
                    match self.expr(a) {
                        Some(v) => out.push(v),
                        None => ok = false,
                    }
                }
                if !ok {
                    return None;
                }
                ExprKind::Call(name.clone(), out)
            }
            K::Index(a, i) => {
                let a = self.expr(a);
                let i = self.expr(i);
                let a = a?;
                if self.is_pointer(&a) {
                    self.unsupported("indexing through a pointer", r);
                    return None;
                }
                ExprKind::Index(Box::new(a), Box::new(i?))
            }
            K::Member { base, field, arrow } => ExprKind::Member(Box::new(self.expr(base)?), field.name.clone(), *arrow),
            K::Cast(t, x) => {
                let b = self.base(&t.specs);
                let ty = self.derive(b, &t.declarator);
                match self.core(&ty) {
                    Ok(CoreType::Int { .. }) => return self.expr(x).map(|v| Expr { range: r, ..v }),
                    Ok(other) => {
                        self.unsupported(format!("cast to {}", other.text()), r);
                        return None;
                    }
                    Err(w) => {
                        self.unsupported(format!("cast: {w}"), r);
                        return None;
                    }
                }
            }
            K::SizeofExpr(_) | K::SizeofType(_) => {
                self.unsupported("sizeof", r);
                return None;
            }
            K::AlignofType(_) => {
                self.unsupported("_Alignof", r);
                return None;
            }
            K::Cond(c, a, b) => {
                let (c, a, b) = (self.expr(c), self.expr(a), self.expr(b));
                ExprKind::Cond(Box::new(c?), Box::new(a?), Box::new(b?))
            }
            K::Comma(..) => {
                self.unsupported("comma operator", r);
                return None;
            }
            K::CompoundLiteral(..) => {
                self.unsupported("compound literal", r);
                return None;
            }
        };
        Some(Expr { kind, range: r })
    }
}

fn stmt(kind: StmtKind, range: Range) -> Stmt {
    Stmt {
        kind,
        range,
        specs: Vec::new(),
    }
}

fn lvalue_expr(lv: &LValue, range: Range) -> Expr {
    let kind = match lv {
        LValue::Var(n) => ExprKind::Var(n.clone()),
        LValue::Index(n, i) => ExprKind::Index(
            Box::new(Expr {
                kind: ExprKind::Var(n.clone()),
                range,
            }),
            Box::new(i.clone()),
        ),
    };
    Expr { kind, range }
}

/// Integer value of a simple character constant.
pub fn char_value(t: &str) -> Option<BigInt> {
    let inner = t.strip_prefix('\'')?.strip_suffix('\'')?;
    let mut cs = inner.chars();
    let v = match (cs.next()?, cs.clone().next()) {
        ('\\', Some(_)) => {
            let rest: String = cs.collect();
            match rest.as_str() {
                "n" => 10,
                "t" => 9,
                "r" => 13,
                "0" => 0,
                "a" => 7,
                "b" => 8,
                "f" => 12,
                "v" => 11,
                "\\" => 92,
                "'" => 39,
                "\"" => 34,
                "?" => 63,
                r if r.starts_with('x') => u32::from_str_radix(&r[1..], 16).ok()?,
                r if r.chars().all(|c| c.is_digit(8)) => u32::from_str_radix(r, 8).ok()?,
                _ => return None,
            }
        }
        (c, None) => c as u32,
        _ => return None,
    };
    Some(BigInt::from(v))
}

/// C semantics of a unary operator over unbounded integers.
pub fn unary(op: UnOp, v: &BigInt) -> Option<BigInt> {
    Some(match op {
        UnOp::Neg => -v,
        UnOp::Plus => v.clone(),
        UnOp::Not => BigInt::from(v.is_zero() as u8),
        UnOp::BitNot => -v - 1,
        _ => return None,
    })
}

/// C semantics of a binary operator over unbounded integers. `None` on
/// division by zero or an unrepresentable shift.
pub fn binary(op: BinOp, a: &BigInt, b: &BigInt) -> Option<BigInt> {
    let bool_ = |c: bool| BigInt::from(c as u8);
    Some(match op {
        BinOp::Mul => a * b,
        BinOp::Div if b.is_zero() => return None,
        BinOp::Div => a / b,
        BinOp::Rem if b.is_zero() => return None,
        BinOp::Rem => a % b,
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Shl => a << b.to_u32().filter(|&s| s < 4096)?,
        BinOp::Shr => a >> b.to_u32()?,
        BinOp::Lt => bool_(a < b),
        BinOp::Gt => bool_(a > b),
        BinOp::Le => bool_(a <= b),
        BinOp::Ge => bool_(a >= b),
        BinOp::Eq => bool_(a == b),
        BinOp::Ne => bool_(a != b),
        BinOp::BitAnd => a & b,
        BinOp::BitXor => a ^ b,
        BinOp::BitOr => a | b,
        BinOp::And => bool_(!a.is_zero() && !b.is_zero()),
        BinOp::Or => bool_(!a.is_zero() || !b.is_zero()),
    })
}

// ---- spec attachment ---------------------------------------------------

/// Keywords that describe a whole function.
const FUNCTION_SPECS: [&str; 5] = ["FNSPEC", "RELSPEC", "MODIFIES", "CALLS", "DONT_TRANSLATE"];
const LOOP_SPECS: [&str; 2] = ["INVARIANT", "INV"];

/// Where a spec ended up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attached {
    pub keyword: String,
    pub payload: String,
    /// `function NAME`, `global NAME` or `<stmt kind> L:C-L:C`.
    pub target: String,
}

enum Target {
    Function(usize),
    Global(usize),
    Stmt(Vec<usize>, usize),
}

/// Attaches spec keywords to CoreC nodes. Function-level keywords go to
/// the enclosing function (or the next one when the annotation precedes
/// it), loop invariants to the nearest enclosing (or next) `while`, and
/// everything else to the smallest node containing the focus.
pub fn attach_specs(p: &mut Program, specs: &[SpecAttachment]) -> (Vec<Attached>, Vec<Diagnostic>) {
    let mut attached = Vec::new();
    let mut diags = Vec::new();
    for s in specs {
        let focus = s.focus.range;
        let note = SpecNote {
            keyword: s.keyword.clone(),
            payload: s.payload.clone(),
        };
        let miss = |what: &str| {
            Diagnostic::warning(focus, format!("`{}` has no {what} to attach to", s.keyword)).in_file(s.focus.file)
        };
        let file = s.focus.file;
        let inside = |f: &Function| f.file == file && f.range.contains(&focus);
        let after = |f: &Function| f.file == file && f.range.start.offset >= focus.end.offset;
        let containing_fn = p.functions.iter().position(inside);
        let fn_ix = containing_fn.or_else(|| p.functions.iter().position(after));
        if FUNCTION_SPECS.contains(&s.keyword.as_str()) {
            // A prefix annotation right after a function's closing brace
            // is about the next function.
            let closing = |f: &Function| focus.len() == 1 && focus.end.offset == f.range.end.offset;
            let fn_ix = p
                .functions
                .iter()
                .position(|f| inside(f) && !closing(f))
                .or_else(|| p.functions.iter().position(after));
            let Some(i) = fn_ix else {
                diags.push(miss("function"));
                continue;
            };
            if !p.functions[i].translatable() && s.keyword != "DONT_TRANSLATE" {
                diags.push(untranslatable(s, &p.functions[i]));
                continue;
            }
            p.functions[i].specs.push(note);
            attached.push(Attached {
                keyword: s.keyword.clone(),
                payload: s.payload.clone(),
                target: format!("function {}", p.functions[i].name),
            });
            continue;
        }
        let target = if LOOP_SPECS.contains(&s.keyword.as_str()) {
            let Some(i) = fn_ix else {
                diags.push(miss("loop"));
                continue;
            };
            if !p.functions[i].translatable() {
                diags.push(untranslatable(s, &p.functions[i]));
                continue;
            }
            let body = p.functions[i].body.as_ref().unwrap();
            let mut whiles = Vec::new();
            collect_stmts(body, &mut Vec::new(), &mut |st, path| {
                if matches!(st.kind, StmtKind::While(..)) {
                    whiles.push((st.range, path.to_vec()));
                }
            });
            let enclosing = whiles
                .iter()
                .filter(|(r, _)| r.contains(&focus))
                .min_by_key(|(r, _)| r.len());
            let next = || whiles.iter().find(|(r, _)| r.start.offset >= focus.end.offset);
            match enclosing.or_else(next) {
                Some((_, path)) => Some((i, path.clone())),
                None => {
                    diags.push(miss("loop"));
                    continue;
                }
            }
        } else {
            match smallest(p, file, focus) {
                Some(Target::Global(g)) => {
                    p.globals[g].specs.push(note);
                    attached.push(Attached {
                        keyword: s.keyword.clone(),
                        payload: s.payload.clone(),
                        target: format!("global {}", p.globals[g].name),
                    });
                    continue;
                }
                Some(Target::Function(i)) => {
                    if !p.functions[i].translatable() {
                        diags.push(untranslatable(s, &p.functions[i]));
                        continue;
                    }
                    p.functions[i].specs.push(note);
                    attached.push(Attached {
                        keyword: s.keyword.clone(),
                        payload: s.payload.clone(),
                        target: format!("function {}", p.functions[i].name),
                    });
                    continue;
                }
                Some(Target::Stmt(path, i)) => Some((i, path)),
                None => {
                    match containing_fn {
                        Some(i) if !p.functions[i].translatable() => diags.push(untranslatable(s, &p.functions[i])),
                        _ => diags.push(miss("node")),
                    }
                    continue;
                }
            }
        };
        if let Some((i, path)) = target {
            let st = stmt_at_mut(p.functions[i].body.as_mut().unwrap(), &path);
            st.specs.push(note);
            attached.push(Attached {
                keyword: s.keyword.clone(),
                payload: s.payload.clone(),
                target: format!("{} {}", stmt_label(st), range_text(st.range)),
            });
        }
    }
    (attached, diags)
}

fn untranslatable(s: &SpecAttachment, f: &Function) -> Diagnostic {
    Diagnostic::warning(
        s.focus.range,
        format!("`{}` targets untranslatable function `{}`", s.keyword, f.name),
    )
    .in_file(s.focus.file)
}

fn smallest(p: &Program, file: FileId, focus: Range) -> Option<Target> {
    let mut best: Option<(usize, Target)> = None;
    let consider = |len: usize, t: Target, best: &mut Option<(usize, Target)>| {
        // Ties go to the later (deeper) candidate.
        if best.as_ref().map_or(true, |(l, _)| len <= *l) {
            *best = Some((len, t));
        }
    };
    for (g, gl) in p.globals.iter().enumerate() {
        if gl.file == file && gl.range.contains(&focus) {
            consider(gl.range.len(), Target::Global(g), &mut best);
        }
    }
    for (i, f) in p.functions.iter().enumerate() {
        if f.file != file || !f.range.contains(&focus) {
            continue;
        }
        consider(f.range.len(), Target::Function(i), &mut best);
        let Some(body) = &f.body else { continue };
        let mut found = Vec::new();
        collect_stmts(body, &mut Vec::new(), &mut |st, path| {
            if st.range.contains(&focus) {
                found.push((st.range.len(), path.to_vec()));
            }
        });
        for (len, path) in found {
            consider(len, Target::Stmt(path, i), &mut best);
        }
    }
    best.map(|(_, t)| t)
}

fn children(s: &Stmt) -> Vec<&Stmt> {
    match &s.kind {
        StmtKind::If(_, a, b) => vec![a, b],
        StmtKind::While(_, b) => vec![b],
        StmtKind::Seq(v) => v.iter().collect(),
        _ => Vec::new(),
    }
}

fn collect_stmts<'a>(s: &'a Stmt, path: &mut Vec<usize>, f: &mut impl FnMut(&'a Stmt, &[usize])) {
    f(s, path);
    for (i, c) in children(s).into_iter().enumerate() {
        path.push(i);
        collect_stmts(c, path, f);
        path.pop();
    }
}

fn stmt_at_mut<'a>(s: &'a mut Stmt, path: &[usize]) -> &'a mut Stmt {
    let Some((&i, rest)) = path.split_first() else { return s };
    let child = match &mut s.kind {
        StmtKind::If(_, a, b) => {
            if i == 0 {
                &mut **a
            } else {
                &mut **b
            }
        }
        StmtKind::While(_, b) => &mut **b,
        StmtKind::Seq(v) => &mut v[i],
        _ => unreachable!("path leads into a leaf"),
    };
    stmt_at_mut(child, rest)
}

fn stmt_label(s: &Stmt) -> &'static str {
    match s.kind {
        StmtKind::Assign(..) => "assign",
        StmtKind::If(..) => "if",
        StmtKind::While(..) => "while",
        StmtKind::Return(_) => "return",
        StmtKind::Break => "break",
        StmtKind::Skip => "skip",
        StmtKind::Seq(_) => "seq",
        StmtKind::Call(_) => "call",
        StmtKind::Assert(_) => "assert",
    }
}

fn range_text(r: Range) -> String {
    format!("{}:{}-{}:{}", r.start.line, r.start.col, r.end.line, r.end.col)
}

// ---- printing ------------------------------------------------------------

pub fn sexp_program(p: &Program) -> Sexp {
    let mut items = Vec::new();
    for (n, v) in &p.constants {
        items.push(Sexp::node("const", [Sexp::atom(n), Sexp::atom(v.to_string())]));
    }
    for g in &p.globals {
        let mut v = vec![Sexp::atom(&g.name), Sexp::atom(g.ty.text())];
        match &g.init {
            Some(Init::Scalar(x)) => v.push(Sexp::atom(x.to_string())),
            Some(Init::Array(xs)) => v.push(Sexp::node("array", xs.iter().map(|x| Sexp::atom(x.to_string())))),
            None => {}
        }
        v.extend(specs_sexp(&g.specs));
        items.push(Sexp::node("global", v));
    }
    for f in &p.functions {
        let mut v = vec![
            Sexp::atom(&f.name),
            Sexp::node(
                "params",
                f.params
                    .iter()
                    .map(|(n, t)| Sexp::List(vec![Sexp::atom(n), Sexp::atom(t.text())])),
            ),
            Sexp::node("returns", [Sexp::atom(f.ret.text())]),
            Sexp::node(
                "locals",
                f.locals
                    .iter()
                    .map(|(n, t)| Sexp::List(vec![Sexp::atom(n), Sexp::atom(t.text())])),
            ),
        ];
        v.extend(specs_sexp(&f.specs));
        v.push(match &f.body {
            Some(b) => sexp_stmt(b),
            None => Sexp::atom("untranslatable"),
        });
        items.push(Sexp::node("function", v));
    }
    Sexp::node("program", items)
}

fn specs_sexp(specs: &[SpecNote]) -> Option<Sexp> {
    (!specs.is_empty()).then(|| {
        Sexp::node(
            "specs",
            specs
                .iter()
                .map(|s| Sexp::List(vec![Sexp::atom(&s.keyword), Sexp::atom(format!("{:?}", s.payload))])),
        )
    })
}

pub fn sexp_stmt(s: &Stmt) -> Sexp {
    let mut v = match &s.kind {
        StmtKind::Assign(lv, e) => vec![Sexp::atom("assign"), sexp_lvalue(lv), sexp_expr(e)],
        StmtKind::If(c, a, b) => vec![Sexp::atom("if"), sexp_expr(c), sexp_stmt(a), sexp_stmt(b)],
        StmtKind::While(c, b) => vec![Sexp::atom("while"), sexp_expr(c), sexp_stmt(b)],
        StmtKind::Return(e) => std::iter::once(Sexp::atom("return")).chain(e.iter().map(sexp_expr)).collect(),
        StmtKind::Break => vec![Sexp::atom("break")],
        StmtKind::Skip => vec![Sexp::atom("skip")],
        StmtKind::Seq(xs) => std::iter::once(Sexp::atom("seq")).chain(xs.iter().map(sexp_stmt)).collect(),
        StmtKind::Call(e) => vec![Sexp::atom("call_stmt"), sexp_expr(e)],
        StmtKind::Assert(e) => vec![Sexp::atom("assert"), sexp_expr(e)],
    };
    v.extend(specs_sexp(&s.specs));
    if v.len() == 1 && s.specs.is_empty() {
        return v.pop().unwrap();
    }
    Sexp::List(v)
}

fn sexp_lvalue(lv: &LValue) -> Sexp {
    match lv {
        LValue::Var(n) => Sexp::atom(n),
        LValue::Index(n, i) => Sexp::node("index", [Sexp::atom(n), sexp_expr(i)]),
    }
}

pub fn sexp_expr(e: &Expr) -> Sexp {
    match &e.kind {
        ExprKind::Int(v) => Sexp::atom(v.to_string()),
        ExprKind::Var(n) => Sexp::atom(n),
        ExprKind::Binary(op, a, b) => Sexp::node(op.as_str(), [sexp_expr(a), sexp_expr(b)]),
        ExprKind::Unary(op, a) => Sexp::node(op.as_str(), [sexp_expr(a)]),
        ExprKind::Call(f, args) => Sexp::node("call", std::iter::once(Sexp::atom(f)).chain(args.iter().map(sexp_expr))),
        ExprKind::Index(a, i) => Sexp::node("index", [sexp_expr(a), sexp_expr(i)]),
        ExprKind::Cond(c, a, b) => Sexp::node("?:", [sexp_expr(c), sexp_expr(a), sexp_expr(b)]),
        ExprKind::Member(b, f, arrow) => Sexp::node(if *arrow { "->" } else { "." }, [sexp_expr(b), Sexp::atom(f)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Env;
    use crate::lexer::tokenize;
    use crate::parser::{parse, Wrappers};

    fn low(src: &str) -> (Program, Vec<Diagnostic>) {
        let out = parse(&tokenize(src).tokens, Env::new(), &Wrappers::new());
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        lower(&out.ast)
    }

    fn body(p: &Program, f: &str) -> String {
        sexp_stmt(p.function(f).unwrap().body.as_ref().unwrap()).to_string()
    }

    #[test]
    fn for_loop_becomes_while() {
        let (p, d) = low("unsigned f(unsigned n) { unsigned i; for (i = 2; i*i <= n; i++) { n = n - 1; } return n; }");
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(
            body(&p, "f"),
            "(seq (seq (assign i 2) (while (<= (* i i) n) (seq (seq (assign n (- n 1))) (assign i (+ i 1)) \
             (assert (<= i UINT_MAX))))) (return n))"
        );
    }

    #[test]
    fn declarations_split() {
        let (p, d) = low("int a, b = 3; int c[2] = {1, 2};");
        assert!(d.is_empty());
        let names: Vec<_> = p.globals.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert_eq!(p.globals[1].init, Some(Init::Scalar(BigInt::from(3))));
        assert_eq!(
            p.globals[2].init,
            Some(Init::Array(vec![BigInt::from(1), BigInt::from(2)]))
        );
    }

    #[test]
    fn unsupported_constructs_are_named_once() {
        let (p, d) = low("int f(int x) { L: x = 1; goto L; return x; } int g(int x) { x += 2; return x; }");
        let msgs: Vec<_> = d.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(msgs, ["unsupported: label", "unsupported: goto"]);
        assert!(!p.function("f").unwrap().translatable());
        assert_eq!(body(&p, "g"), "(seq (assign x (+ x 2)) (return x))");
    }

    #[test]
    fn continue_and_switch_rejected() {
        let (p, d) = low("int f(int n) { while (n) { if (n) continue; } switch (n) { case 1: break; } return 0; }");
        assert_eq!(d.len(), 2);
        assert!(d[0].message.contains("continue"));
        assert!(d[1].message.contains("switch"));
        assert!(p.function("f").unwrap().body.is_none());
    }

    #[test]
    fn shadowed_locals_are_renamed() {
        let (p, _) = low("int f(int x) { int y = x; { int y = 2; x = y; } return y; }");
        assert_eq!(
            body(&p, "f"),
            "(seq (assign y x) (seq (assign y'2 2) (assign x y'2)) (return y))"
        );
    }

    #[test]
    fn do_while_and_comma() {
        let (p, d) = low("int f(int n) { int a; do a = 1, n--; while (n > 0); return a; }");
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(
            body(&p, "f"),
            "(seq (while 1 (seq (seq (assign a 1) (assign n (- n 1))) (if (! (> n 0)) break skip))) (return a))"
        );
    }

    #[test]
    fn pointers_are_opaque() {
        let (p, d) = low("int f(int *p, int n) { int *q; q = p; n = *p; return p + 1; }");
        let msgs: Vec<_> = d.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(msgs, ["unsupported: pointer dereference", "unsupported: pointer arithmetic"]);
        assert_eq!(p.function("f").unwrap().params[0].1, CoreType::Ptr("int".into()));
    }

    #[test]
    fn pointer_arithmetic_through_a_conditional() {
        let (_, d) = low("int f(int *p, int *q, int c) { int *r; r = (c ? p : q) + 1; return 0; }");
        let msgs: Vec<_> = d.iter().map(|d| d.message.as_str()).collect();
        assert_eq!(msgs, ["unsupported: pointer arithmetic"]);
    }

    #[test]
    fn char_values() {
        assert_eq!(char_value("'a'"), Some(BigInt::from(97)));
        assert_eq!(char_value("'\\n'"), Some(BigInt::from(10)));
        assert_eq!(char_value("'\\x41'"), Some(BigInt::from(65)));
        assert_eq!(char_value("'\\0'"), Some(BigInt::from(0)));
    }
}
