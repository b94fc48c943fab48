//! A Clean-style back end: CoreC translated to a small state-exception
//! language with `break`/`return` flags and list-lifted locals, plus an
//! interpreter for it.
//!
//! Every local (parameters included) owns a stack of values; a call pushes
//! one slot on each of the callee's locals and on the shared `result`
//! stack, and pops them again on exit. Values are unbounded integers, so
//! machine overflow only shows up through explicit `assert` statements.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::ast::{BinOp, UnOp};
use crate::diag::Diagnostic;
use crate::lower::{self, CoreType, ExprKind, Init, LValue, Program, StmtKind};
use crate::pretty::Sexp;
use crate::source::Range;

pub fn uint_max() -> BigInt {
    BigInt::from(u32::MAX)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(BigInt),
    Array(Vec<BigInt>),
}

/// JSON number when it fits in 64 bits, decimal string otherwise.
pub fn int_json(v: &BigInt) -> serde_json::Value {
    if let Some(i) = v.to_i64() {
        i.into()
    } else if let Some(u) = v.to_u64() {
        u.into()
    } else {
        v.to_string().into()
    }
}

impl Value {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(v) => int_json(v),
            Value::Array(xs) => xs.iter().map(int_json).collect(),
        }
    }

    fn zero_of(t: &CoreType) -> Value {
        match t {
            CoreType::Array(_, n) => Value::Array(vec![BigInt::zero(); n.unwrap_or(0) as usize]),
            _ => Value::Int(BigInt::zero()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Array(xs) => {
                let parts: Vec<_> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Local(String),
    Global(String),
}

impl Var {
    pub fn name(&self) -> &str {
        match self {
            Var::Local(n) | Var::Global(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CExpr {
    Const(BigInt),
    Read(Var),
    Index(Var, Box<CExpr>),
    Unary(UnOp, Box<CExpr>),
    Binary(BinOp, Box<CExpr>, Box<CExpr>),
    Call(String, Vec<CExpr>),
    Cond(Box<CExpr>, Box<CExpr>, Box<CExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CStmt {
    Assign(Var, Option<CExpr>, CExpr),
    If(CExpr, Box<CStmt>, Box<CStmt>),
    While(CExpr, Box<CStmt>),
    Return(Option<CExpr>),
    Break,
    Skip,
    Seq(Vec<CStmt>),
    Call(String, Vec<CExpr>),
    Assert(CExpr, Range),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proc {
    pub name: String,
    pub params: Vec<String>,
    /// Non-parameter locals with the value a fresh frame starts with.
    pub locals: Vec<(String, Value)>,
    pub returns_value: bool,
    pub body: CStmt,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CleanProgram {
    pub globals: BTreeMap<String, Value>,
    pub procs: BTreeMap<String, Proc>,
}

/// Translates every translatable function. `constants` are named numeric
/// constants (object-like `#define`s); `UINT_MAX` is always available.
pub fn translate(p: &Program, constants: &BTreeMap<String, BigInt>) -> (CleanProgram, Vec<Diagnostic>) {
    let mut consts = constants.clone();
    consts.extend(p.constants.iter().map(|(k, v)| (k.clone(), v.clone())));
    consts.insert(lower::UINT_MAX.into(), uint_max());

    let mut out = CleanProgram::default();
    for g in &p.globals {
        let v = match (&g.init, &g.ty) {
            (Some(Init::Scalar(v)), _) => Value::Int(v.clone()),
            (Some(Init::Array(xs)), CoreType::Array(_, n)) => {
                let mut xs = xs.clone();
                let len = n.map_or(xs.len(), |n| n as usize);
                xs.resize(len.max(xs.len()), BigInt::zero());
                Value::Array(xs)
            }
            (Some(Init::Array(xs)), _) => Value::Int(xs.first().cloned().unwrap_or_default()),
            (None, t) => Value::zero_of(t),
        };
        out.globals.insert(g.name.clone(), v);
    }
    let arrays: BTreeSet<&str> = p
        .globals
        .iter()
        .filter(|g| matches!(g.ty, CoreType::Array(..)))
        .map(|g| g.name.as_str())
        .collect();

    let mut diags = Vec::new();
    let mut calls: BTreeMap<String, (Range, Vec<(String, Range)>)> = BTreeMap::new();
    for f in &p.functions {
        let Some(body) = &f.body else { continue };
        if f.specs.iter().any(|s| s.keyword == "DONT_TRANSLATE") {
            continue;
        }
        let mut t = Translator {
            locals: f
                .params
                .iter()
                .chain(&f.locals)
                .map(|(n, t)| (n.clone(), matches!(t, CoreType::Array(..))))
                .collect(),
            global_arrays: &arrays,
            globals: &out.globals,
            consts: &consts,
            calls: Vec::new(),
            diags: Vec::new(),
        };
        let body = t.stmt(body);
        if !t.diags.is_empty() {
            diags.append(&mut t.diags);
            continue;
        }
        calls.insert(f.name.clone(), (f.range, t.calls));
        out.procs.insert(
            f.name.clone(),
            Proc {
                name: f.name.clone(),
                params: f.params.iter().map(|(n, _)| n.clone()).collect(),
                locals: f.locals.iter().map(|(n, t)| (n.clone(), Value::zero_of(t))).collect(),
                returns_value: f.ret != CoreType::Void,
                body,
            },
        );
    }
    // Drop procedures that call something without a translation, until
    // nothing changes.
    loop {
        let mut dropped = false;
        for (name, (_, cs)) in &calls {
            if !out.procs.contains_key(name) {
                continue;
            }
            if let Some((callee, r)) = cs.iter().find(|(c, _)| !out.procs.contains_key(c)) {
                diags.push(Diagnostic::error(
                    *r,
                    format!("`{name}` calls `{callee}`, which has no Clean translation"),
                ));
                out.procs.remove(name);
                dropped = true;
            }
        }
        if !dropped {
            break;
        }
    }
    (out, diags)
}

struct Translator<'a> {
    locals: HashMap<String, bool>,
    global_arrays: &'a BTreeSet<&'a str>,
    globals: &'a BTreeMap<String, Value>,
    consts: &'a BTreeMap<String, BigInt>,
    calls: Vec<(String, Range)>,
    diags: Vec<Diagnostic>,
}

impl Translator<'_> {
    fn var(&mut self, name: &str, r: Range) -> Option<Var> {
        if self.locals.contains_key(name) {
            Some(Var::Local(name.into()))
        } else if self.globals.contains_key(name) {
            Some(Var::Global(name.into()))
        } else {
            if !self.consts.contains_key(name) {
                self.diags.push(Diagnostic::error(r, format!("unbound identifier `{name}`")));
            }
            None
        }
    }

    fn is_array(&self, v: &Var) -> bool {
        match v {
            Var::Local(n) => self.locals.get(n).copied().unwrap_or(false),
            Var::Global(n) => self.global_arrays.contains(n.as_str()),
        }
    }

    fn expr(&mut self, e: &lower::Expr) -> CExpr {
        match &e.kind {
            ExprKind::Int(v) => CExpr::Const(v.clone()),
            ExprKind::Var(n) => match self.var(n, e.range) {
                Some(v) => {
                    if self.is_array(&v) {
                        self.diags
                            .push(Diagnostic::error(e.range, format!("array `{n}` used as a value")));
                    }
                    CExpr::Read(v)
                }
                None => CExpr::Const(self.consts.get(n).cloned().unwrap_or_default()),
            },
            ExprKind::Binary(op, a, b) => CExpr::Binary(*op, Box::new(self.expr(a)), Box::new(self.expr(b))),
            ExprKind::Unary(op, a) => CExpr::Unary(*op, Box::new(self.expr(a))),
            ExprKind::Call(f, args) => {
                self.calls.push((f.clone(), e.range));
                CExpr::Call(f.clone(), args.iter().map(|a| self.expr(a)).collect())
            }
            ExprKind::Index(a, i) => {
                let i = self.expr(i);
                match &a.kind {
                    ExprKind::Var(n) => match self.var(n, a.range) {
                        Some(v) if self.is_array(&v) => CExpr::Index(v, Box::new(i)),
                        _ => self.reject("indexing a non-array", e.range),
                    },
                    _ => self.reject("indexing a computed value", e.range),
                }
            }
            ExprKind::Member(..) => self.reject("member access", e.range),
            ExprKind::Cond(c, a, b) => CExpr::Cond(
                Box::new(self.expr(c)),
                Box::new(self.expr(a)),
                Box::new(self.expr(b)),
            ),
        }
    }

    fn reject(&mut self, what: &str, r: Range) -> CExpr {
        self.diags
            .push(Diagnostic::error(r, format!("{what} has no Clean translation")));
        CExpr::Const(BigInt::zero())
    }

    fn stmt(&mut self, s: &lower::Stmt) -> CStmt {
        match &s.kind {
            StmtKind::Assign(lv, e) => {
                let e = self.expr(e);
                let r = s.range;
                match lv {
                    LValue::Var(n) => match self.var(n, r) {
                        Some(v) => CStmt::Assign(v, None, e),
                        None => {
                            self.reject(&format!("assignment to constant `{n}`"), r);
                            CStmt::Skip
                        }
                    },
                    LValue::Index(n, i) => {
                        let i = self.expr(i);
                        match self.var(n, r) {
                            Some(v) if self.is_array(&v) => CStmt::Assign(v, Some(i), e),
                            _ => {
                                self.reject("indexed assignment to a non-array", r);
                                CStmt::Skip
                            }
                        }
                    }
                }
            }
            StmtKind::If(c, a, b) => CStmt::If(self.expr(c), Box::new(self.stmt(a)), Box::new(self.stmt(b))),
            StmtKind::While(c, b) => CStmt::While(self.expr(c), Box::new(self.stmt(b))),
            StmtKind::Return(e) => CStmt::Return(e.as_ref().map(|e| self.expr(e))),
            StmtKind::Break => CStmt::Break,
            StmtKind::Skip => CStmt::Skip,
            StmtKind::Seq(xs) => CStmt::Seq(xs.iter().map(|x| self.stmt(x)).collect()),
            StmtKind::Call(e) => match self.expr(e) {
                CExpr::Call(f, args) => CStmt::Call(f, args),
                _ => CStmt::Skip,
            },
            StmtKind::Assert(e) => CStmt::Assert(self.expr(e), s.range),
        }
    }
}

// ---- interpreter ---------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Assert,
    EmptyStack,
    MissingResult,
    DivisionByZero,
    /// Negative or oversized shift count.
    BadShift,
    IndexOutOfBounds,
    UnknownProc,
    Arity,
    OutOfFuel,
    DepthLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct State {
    pub break_val: bool,
    pub return_val: bool,
    pub globals: BTreeMap<String, Value>,
    pub locals: HashMap<String, Vec<Value>>,
    pub result: Vec<Option<BigInt>>,
    /// Set once; a failed state is terminal.
    pub failed: Option<Failure>,
}

impl State {
    pub fn new(p: &CleanProgram) -> State {
        State {
            globals: p.globals.clone(),
            ..State::default()
        }
    }

    /// Stack depth of every local, `result` included.
    pub fn depths(&self) -> BTreeMap<String, usize> {
        let mut m: BTreeMap<String, usize> = self.locals.iter().map(|(k, v)| (k.clone(), v.len())).collect();
        m.insert("result".into(), self.result.len());
        m
    }

    fn skipping(&self) -> bool {
        self.break_val || self.return_val || self.failed.is_some()
    }

    fn fail(&mut self, kind: FailureKind, message: impl Into<String>) {
        if self.failed.is_none() {
            self.failed = Some(Failure {
                kind,
                message: message.into(),
            });
        }
    }
}

/// Observation points for instrumented runs.
pub trait Tracer {
    /// Called just before `target` is written.
    fn write(&mut self, _state: &State, _target: &str) {}
    fn call_enter(&mut self, _state: &State, _proc: &str) {}
    /// Called after the callee's frame is popped.
    fn call_exit(&mut self, _state: &State, _proc: &str) {}
}

pub struct NoTrace;

impl Tracer for NoTrace {}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Statements and loop iterations executed before giving up.
    pub fuel: u64,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            fuel: 50_000_000,
            max_depth: 10_000,
        }
    }
}

pub struct Interp<'p, T: Tracer = NoTrace> {
    pub program: &'p CleanProgram,
    pub state: State,
    pub tracer: T,
    fuel: u64,
    depth: usize,
    max_depth: usize,
}

impl<'p> Interp<'p, NoTrace> {
    pub fn new(program: &'p CleanProgram, limits: Limits) -> Self {
        Interp::with_tracer(program, limits, NoTrace)
    }
}

impl<'p, T: Tracer> Interp<'p, T> {
    pub fn with_tracer(program: &'p CleanProgram, limits: Limits, tracer: T) -> Self {
        Interp {
            program,
            state: State::new(program),
            tracer,
            fuel: limits.fuel,
            depth: 0,
            max_depth: limits.max_depth,
        }
    }

    /// Calls a procedure from the outside. Leaves the state as the call
    /// left it, so globals can be inspected afterwards.
    pub fn call(&mut self, name: &str, args: &[BigInt]) -> Result<Option<BigInt>, Failure> {
        let r = self.invoke(name, args.to_vec());
        match self.state.failed.clone() {
            Some(f) => Err(f),
            None => Ok(r),
        }
    }

    fn invoke(&mut self, name: &str, args: Vec<BigInt>) -> Option<BigInt> {
        let Some(proc) = self.program.procs.get(name) else {
            self.state
                .fail(FailureKind::UnknownProc, format!("no procedure `{name}`"));
            return None;
        };
        if proc.params.len() != args.len() {
            self.state.fail(
                FailureKind::Arity,
                format!("`{name}` expects {} arguments, got {}", proc.params.len(), args.len()),
            );
            return None;
        }
        if self.depth >= self.max_depth {
            self.state
                .fail(FailureKind::DepthLimit, format!("call depth limit reached in `{name}`"));
            return None;
        }
        self.tracer.call_enter(&self.state, name);
        self.depth += 1;
        for (p, a) in proc.params.iter().zip(args) {
            self.state.locals.entry(p.clone()).or_default().push(Value::Int(a));
        }
        for (l, v) in &proc.locals {
            self.state.locals.entry(l.clone()).or_default().push(v.clone());
        }
        self.state.result.push(None);

        self.exec(&proc.body);

        let result = self.state.result.pop().flatten();
        for l in proc.params.iter().chain(proc.locals.iter().map(|(l, _)| l)) {
            if let Some(s) = self.state.locals.get_mut(l) {
                s.pop();
            }
        }
        self.state.return_val = false;
        self.state.break_val = false;
        self.depth -= 1;
        self.tracer.call_exit(&self.state, name);
        if self.state.failed.is_none() && proc.returns_value && result.is_none() {
            self.state.fail(
                FailureKind::MissingResult,
                format!("`{name}` finished without returning a value"),
            );
        }
        result
    }

    fn burn(&mut self) -> bool {
        if self.fuel == 0 {
            self.state.fail(FailureKind::OutOfFuel, "out of fuel");
            return false;
        }
        self.fuel -= 1;
        true
    }

    pub fn exec(&mut self, s: &CStmt) {
        if self.state.skipping() || !self.burn() {
            return;
        }
        match s {
            CStmt::Assign(var, ix, e) => {
                let Some(v) = self.eval(e) else { return };
                let ix = match ix {
                    Some(i) => match self.eval(i) {
                        Some(i) => Some(i),
                        None => return,
                    },
                    None => None,
                };
                self.store(var, ix, v);
            }
            CStmt::If(c, a, b) => {
                let Some(c) = self.eval(c) else { return };
                if c.is_zero() {
                    self.exec(b)
                } else {
                    self.exec(a)
                }
            }
            CStmt::While(c, body) => {
                loop {
                    if self.state.skipping() || !self.burn() {
                        break;
                    }
                    match self.eval(c) {
                        Some(v) if !v.is_zero() => self.exec(body),
                        _ => break,
                    }
                }
                self.state.break_val = false;
            }
            CStmt::Return(e) => {
                let v = match e {
                    Some(e) => match self.eval(e) {
                        Some(v) => Some(v),
                        None => return,
                    },
                    None => None,
                };
                self.tracer.write(&self.state, "result");
                match self.state.result.last_mut() {
                    Some(slot) => *slot = v,
                    None => self.state.fail(FailureKind::EmptyStack, "return outside a call"),
                }
                self.state.return_val = true;
            }
            CStmt::Break => self.state.break_val = true,
            CStmt::Skip => {}
            CStmt::Seq(xs) => {
                for x in xs {
                    if self.state.skipping() {
                        break;
                    }
                    self.exec(x);
                }
            }
            CStmt::Call(f, args) => {
                if let Some(args) = self.eval_args(args) {
                    self.invoke(f, args);
                }
            }
            CStmt::Assert(e, r) => {
                if let Some(v) = self.eval(e) {
                    if v.is_zero() {
                        self.state.fail(
                            FailureKind::Assert,
                            format!("assertion failed at {}:{}", r.start.line, r.start.col),
                        );
                    }
                }
            }
        }
    }

    fn store(&mut self, var: &Var, ix: Option<BigInt>, v: BigInt) {
        self.tracer.write(&self.state, var.name());
        let slot = match var {
            Var::Local(n) => self.state.locals.get_mut(n).and_then(|s| s.last_mut()),
            Var::Global(n) => self.state.globals.get_mut(n),
        };
        let Some(slot) = slot else {
            self.state
                .fail(FailureKind::EmptyStack, format!("no slot for `{}`", var.name()));
            return;
        };
        match (slot, ix) {
            (Value::Int(x), None) => *x = v,
            (Value::Array(xs), Some(i)) => {
                let len = xs.len();
                match i.to_usize().filter(|&i| i < len) {
                    Some(i) => xs[i] = v,
                    None => self.state.fail(
                        FailureKind::IndexOutOfBounds,
                        format!("index {i} out of bounds for `{}` of length {len}", var.name()),
                    ),
                }
            }
            _ => self
                .state
                .fail(FailureKind::EmptyStack, format!("shape mismatch writing `{}`", var.name())),
        }
    }

    fn read(&mut self, var: &Var) -> Option<&Value> {
        let v = match var {
            Var::Local(n) => self.state.locals.get(n).and_then(|s| s.last()),
            Var::Global(n) => self.state.globals.get(n),
        };
        if v.is_none() {
            let msg = format!("read of `{}` with an empty stack", var.name());
            self.state.fail(FailureKind::EmptyStack, msg);
            return None;
        }
        match var {
            Var::Local(n) => self.state.locals.get(n).and_then(|s| s.last()),
            Var::Global(n) => self.state.globals.get(n),
        }
    }

    fn eval_args(&mut self, args: &[CExpr]) -> Option<Vec<BigInt>> {
        args.iter().map(|a| self.eval(a)).collect()
    }

    /// `None` once the state has failed.
    pub fn eval(&mut self, e: &CExpr) -> Option<BigInt> {
        if self.state.failed.is_some() {
            return None;
        }
        match e {
            CExpr::Const(v) => Some(v.clone()),
            CExpr::Read(var) => match self.read(var)? {
                Value::Int(v) => Some(v.clone()),
                Value::Array(_) => {
                    let msg = format!("array `{}` read as a scalar", var.name());
                    self.state.fail(FailureKind::EmptyStack, msg);
                    None
                }
            },
            CExpr::Index(var, i) => {
                let i = self.eval(i)?;
                let name = var.name().to_string();
                let r = match self.read(var)? {
                    Value::Array(xs) => i.to_usize().and_then(|i| xs.get(i)).cloned().ok_or(xs.len()),
                    Value::Int(_) => Err(0),
                };
                match r {
                    Ok(v) => Some(v),
                    Err(len) => {
                        self.state.fail(
                            FailureKind::IndexOutOfBounds,
                            format!("index {i} out of bounds for `{name}` of length {len}"),
                        );
                        None
                    }
                }
            }
            CExpr::Unary(op, a) => {
                let a = self.eval(a)?;
                lower::unary(*op, &a)
            }
            CExpr::Binary(op, a, b) => {
                // && and || short-circuit, which matters once calls are involved.
                let a = self.eval(a)?;
                match op {
                    BinOp::And if a.is_zero() => return Some(BigInt::zero()),
                    BinOp::Or if !a.is_zero() => return Some(BigInt::from(1)),
                    _ => {}
                }
                let b = self.eval(b)?;
                match lower::binary(*op, &a, &b) {
                    Some(v) => Some(v),
                    None => {
                        let kind = if matches!(op, BinOp::Div | BinOp::Rem) {
                            FailureKind::DivisionByZero
                        } else {
                            FailureKind::BadShift
                        };
                        self.state.fail(kind, format!("`{a} {} {b}` is undefined", op.as_str()));
                        None
                    }
                }
            }
            CExpr::Cond(c, a, b) => {
                if self.eval(c)?.is_zero() {
                    self.eval(b)
                } else {
                    self.eval(a)
                }
            }
            CExpr::Call(f, args) => {
                let args = self.eval_args(args)?;
                let v = self.invoke(f, args);
                if self.state.failed.is_some() {
                    return None;
                }
                match v {
                    Some(v) => Some(v),
                    None => {
                        self.state
                            .fail(FailureKind::MissingResult, format!("`{f}` returned no value"));
                        None
                    }
                }
            }
        }
    }
}

/// Result of a top-level call.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub call: String,
    pub args: Vec<BigInt>,
    pub result: Option<BigInt>,
    pub failure: Option<Failure>,
    pub globals: BTreeMap<String, Value>,
}

impl RunResult {
    /// The object the CLI prints.
    pub fn to_json(&self) -> serde_json::Value {
        let mut o = serde_json::Map::new();
        o.insert("call".into(), self.call.clone().into());
        o.insert("args".into(), self.args.iter().map(int_json).collect());
        if let Some(r) = &self.result {
            o.insert("result".into(), int_json(r));
        }
        if let Some(f) = &self.failure {
            o.insert("failure".into(), serde_json::to_value(f).expect("plain struct"));
        }
        let globals: serde_json::Map<_, _> = self.globals.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        o.insert("globals".into(), globals.into());
        o.into()
    }
}

pub fn run(p: &CleanProgram, name: &str, args: &[BigInt], limits: Limits) -> RunResult {
    let mut it = Interp::new(p, limits);
    let r = it.call(name, args);
    let (result, failure) = match r {
        Ok(v) => (v, None),
        Err(f) => (None, Some(f)),
    };
    RunResult {
        call: name.into(),
        args: args.to_vec(),
        result,
        failure,
        globals: it.state.globals,
    }
}

// ---- printing ------------------------------------------------------------

pub fn sexp_program(p: &CleanProgram) -> Sexp {
    let mut items: Vec<Sexp> = p
        .globals
        .iter()
        .map(|(n, v)| Sexp::node("global", [Sexp::atom(n), Sexp::atom(v.to_string())]))
        .collect();
    for pr in p.procs.values() {
        items.push(Sexp::node(
            "proc",
            [
                Sexp::atom(&pr.name),
                Sexp::node("params", pr.params.iter().map(Sexp::atom)),
                Sexp::node("locals", pr.locals.iter().map(|(n, _)| Sexp::atom(n))),
                sexp_stmt(&pr.body),
            ],
        ));
    }
    Sexp::node("clean", items)
}

fn var_sexp(v: &Var) -> Sexp {
    match v {
        Var::Local(n) => Sexp::atom(n),
        Var::Global(n) => Sexp::node("global", [Sexp::atom(n)]),
    }
}

pub fn sexp_stmt(s: &CStmt) -> Sexp {
    match s {
        CStmt::Assign(v, None, e) => Sexp::node(":=", [var_sexp(v), sexp_expr(e)]),
        CStmt::Assign(v, Some(i), e) => Sexp::node(":=", [Sexp::node("index", [var_sexp(v), sexp_expr(i)]), sexp_expr(e)]),
        CStmt::If(c, a, b) => Sexp::node("if_C", [sexp_expr(c), sexp_stmt(a), sexp_stmt(b)]),
        CStmt::While(c, b) => Sexp::node("while_C", [sexp_expr(c), sexp_stmt(b)]),
        CStmt::Return(e) => Sexp::node("return_C", e.iter().map(sexp_expr)),
        CStmt::Break => Sexp::atom("break_C"),
        CStmt::Skip => Sexp::atom("skip"),
        CStmt::Seq(xs) => Sexp::node("seq", xs.iter().map(sexp_stmt)),
        CStmt::Call(f, args) => Sexp::node("call", std::iter::once(Sexp::atom(f)).chain(args.iter().map(sexp_expr))),
        CStmt::Assert(e, _) => Sexp::node("assert", [sexp_expr(e)]),
    }
}

pub fn sexp_expr(e: &CExpr) -> Sexp {
    match e {
        CExpr::Const(v) => Sexp::atom(v.to_string()),
        CExpr::Read(v) => var_sexp(v),
        CExpr::Index(v, i) => Sexp::node("index", [var_sexp(v), sexp_expr(i)]),
        CExpr::Unary(op, a) => Sexp::node(op.as_str(), [sexp_expr(a)]),
        CExpr::Binary(op, a, b) => Sexp::node(op.as_str(), [sexp_expr(a), sexp_expr(b)]),
        CExpr::Call(f, args) => Sexp::node("call", std::iter::once(Sexp::atom(f)).chain(args.iter().map(sexp_expr))),
        CExpr::Cond(c, a, b) => Sexp::node("?:", [sexp_expr(c), sexp_expr(a), sexp_expr(b)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Env;
    use crate::lexer::tokenize;
    use crate::parser::{parse, Wrappers};

    fn clean(src: &str) -> CleanProgram {
        let out = parse(&tokenize(src).tokens, Env::new(), &Wrappers::new());
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        let (core, d) = lower::lower(&out.ast);
        assert!(d.is_empty(), "{d:?}");
        let (p, d) = translate(&core, &BTreeMap::new());
        assert!(d.is_empty(), "{d:?}");
        p
    }

    fn call(p: &CleanProgram, f: &str, args: &[i64]) -> Result<Option<BigInt>, Failure> {
        let args: Vec<BigInt> = args.iter().map(|&a| BigInt::from(a)).collect();
        Interp::new(p, Limits::default()).call(f, &args)
    }

    #[test]
    fn factorial_recurses() {
        let p = clean("int fact(int n) { if (n <= 1) return 1; return n * fact(n - 1); }");
        assert_eq!(call(&p, "fact", &[5]), Ok(Some(BigInt::from(120))));
    }

    #[test]
    fn conditional_evaluates_one_branch() {
        let p = clean("int f(int x) { return x ? 10 / x : -1; }");
        assert_eq!(call(&p, "f", &[0]), Ok(Some(BigInt::from(-1))));
        assert_eq!(call(&p, "f", &[5]), Ok(Some(BigInt::from(2))));
    }

    #[test]
    fn return_skips_rest_of_sequence() {
        let p = clean("int k; int f(void) { return 0; k = 7; }");
        let mut it = Interp::new(&p, Limits::default());
        assert_eq!(it.call("f", &[]), Ok(Some(BigInt::zero())));
        assert_eq!(it.state.globals["k"], Value::Int(BigInt::zero()));
        assert!(!it.state.return_val);
    }

    #[test]
    fn break_resets_after_loop() {
        let p = clean("int f(void) { int x = 0; while (1) { x = 3; break; x = 4; } return x; }");
        assert_eq!(call(&p, "f", &[]), Ok(Some(BigInt::from(3))));
    }

    #[test]
    fn missing_result_fails() {
        let p = clean("int f(int x) { if (x) return 1; }");
        assert_eq!(call(&p, "f", &[1]), Ok(Some(BigInt::from(1))));
        assert_eq!(call(&p, "f", &[0]).unwrap_err().kind, FailureKind::MissingResult);
    }

    #[test]
    fn unsigned_increment_asserts() {
        let p = clean("unsigned int k = 4294967295; void f(void) { k++; }");
        assert_eq!(call(&p, "f", &[]).unwrap_err().kind, FailureKind::Assert);
    }

    #[test]
    fn frames_are_balanced() {
        let p = clean("int g(int a) { int t = a; return t + 1; } int f(int a) { int t = g(a); return g(t); }");
        let mut it = Interp::new(&p, Limits::default());
        assert_eq!(it.call("f", &[BigInt::from(1)]), Ok(Some(BigInt::from(3))));
        assert!(it.state.depths().values().all(|&d| d == 0));
    }

    #[test]
    fn untranslatable_callee_drops_caller() {
        let out = parse(
            &tokenize("int g(int *p) { return *p; } int f(int *p) { return g(p); }").tokens,
            Env::new(),
            &Wrappers::new(),
        );
        let (core, _) = lower::lower(&out.ast);
        let (p, d) = translate(&core, &BTreeMap::new());
        assert!(p.procs.is_empty());
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("`f` calls `g`"));
    }

    #[test]
    fn arrays_index_and_bounds() {
        let p = clean("int a[3] = {1, 2, 3}; int f(int i) { a[i] = a[i] * 10; return a[i]; }");
        assert_eq!(call(&p, "f", &[2]), Ok(Some(BigInt::from(30))));
        assert_eq!(call(&p, "f", &[3]).unwrap_err().kind, FailureKind::IndexOutOfBounds);
    }

    #[test]
    fn fuel_runs_out() {
        let p = clean("void f(void) { while (1) { } }");
        let r = Interp::new(&p, Limits { fuel: 1000, max_depth: 10 }).call("f", &[]);
        assert_eq!(r.unwrap_err().kind, FailureKind::OutOfFuel);
    }
}
