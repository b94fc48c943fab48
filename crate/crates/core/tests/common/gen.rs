//! Random subset-C programs for interpreter properties.
//!
//! Programs are generated as small trees and rendered to C, so they go
//! through the whole frontend before reaching the interpreter. Every
//! function takes two ints and returns one; `fN` may only call `f0..fN-1`,
//! which keeps recursion out. Loops carry their own counter so most runs
//! terminate; the ones that don't run out of fuel, which is fine.

use proptest::prelude::*;

#[derive(Debug, Clone)]
pub enum GExpr {
    Lit(u8),
    Var(u8),
    Bin(&'static str, Box<GExpr>, Box<GExpr>),
    Call(u8, Box<GExpr>, Box<GExpr>),
    Cond(Box<GExpr>, Box<GExpr>, Box<GExpr>),
}

#[derive(Debug, Clone)]
pub enum GStmt {
    Assign(u8, GExpr),
    Incr(u8),
    If(GExpr, Vec<GStmt>, Vec<GStmt>),
    While(u8, GExpr, Vec<GStmt>),
    For(u8, Vec<GStmt>),
    DoWhile(u8, Vec<GStmt>),
    Break,
    Return(GExpr),
    Call(u8, GExpr, GExpr),
    /// A block declaring a local that shadows `l0`.
    Block(GExpr, Vec<GStmt>),
}

#[derive(Debug, Clone)]
pub struct GProgram {
    pub funcs: Vec<Vec<GStmt>>,
    pub args: (i8, i8),
}

const OPS: [&str; 14] = ["+", "-", "*", "/", "%", "<", "<=", "==", "!=", "&", "|", "^", "&&", "||"];

fn expr() -> impl Strategy<Value = GExpr> {
    let leaf = prop_oneof![(0u8..10).prop_map(GExpr::Lit), any::<u8>().prop_map(GExpr::Var)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            3 => (prop::sample::select(&OPS[..]), inner.clone(), inner.clone())
                .prop_map(|(o, a, b)| GExpr::Bin(o, Box::new(a), Box::new(b))),
            1 => (any::<u8>(), inner.clone(), inner.clone()).prop_map(|(f, a, b)| GExpr::Call(f, Box::new(a), Box::new(b))),
            1 => (inner.clone(), inner.clone(), inner)
                .prop_map(|(c, a, b)| GExpr::Cond(Box::new(c), Box::new(a), Box::new(b))),
        ]
    })
}

fn stmt() -> impl Strategy<Value = GStmt> {
    let leaf = prop_oneof![
        3 => (any::<u8>(), expr()).prop_map(|(v, e)| GStmt::Assign(v, e)),
        1 => any::<u8>().prop_map(GStmt::Incr),
        1 => Just(GStmt::Break),
        1 => expr().prop_map(GStmt::Return),
        1 => (any::<u8>(), expr(), expr()).prop_map(|(f, a, b)| GStmt::Call(f, a, b)),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        let body = prop::collection::vec(inner, 0..4);
        prop_oneof![
            (expr(), body.clone(), body.clone()).prop_map(|(c, a, b)| GStmt::If(c, a, b)),
            (1u8..6, expr(), body.clone()).prop_map(|(n, c, b)| GStmt::While(n, c, b)),
            (1u8..6, body.clone()).prop_map(|(n, b)| GStmt::For(n, b)),
            (1u8..4, body.clone()).prop_map(|(n, b)| GStmt::DoWhile(n, b)),
            (expr(), body).prop_map(|(e, b)| GStmt::Block(e, b)),
        ]
    })
}

pub fn program() -> impl Strategy<Value = GProgram> {
    (
        prop::collection::vec(prop::collection::vec(stmt(), 1..6), 1..5),
        any::<i8>(),
        any::<i8>(),
    )
        .prop_map(|(funcs, a, b)| GProgram { funcs, args: (a, b) })
}

impl GProgram {
    pub fn entry(&self) -> String {
        format!("f{}", self.funcs.len() - 1)
    }

    pub fn to_c(&self) -> String {
        let mut r = Render::default();
        r.out.push_str("int g0 = 1;\nint g1 = 2;\nunsigned int u = 0;\n");
        for (i, body) in self.funcs.iter().enumerate() {
            r.func = i;
            r.counter = 0;
            r.scopes = vec![
                vec![("g0".into(), true), ("g1".into(), true), ("u".into(), true)],
                vec![("p0".into(), true), ("p1".into(), true), ("l0".into(), true)],
            ];
            r.out.push_str(&format!("\nint f{i}(int p0, int p1) {{\n  int l0 = 0;\n"));
            for s in body {
                r.stmt(s, 1);
            }
            r.out.push_str("  return p0 + l0;\n}\n");
        }
        r.out
    }
}

#[derive(Default)]
struct Render {
    out: String,
    /// Visible names, innermost scope last; the flag says whether the
    /// generator may assign to it (loop counters are off limits).
    scopes: Vec<Vec<(String, bool)>>,
    func: usize,
    loops: usize,
    counter: usize,
}

impl Render {
    fn visible(&self, assignable: bool) -> Vec<&str> {
        self.scopes
            .iter()
            .flatten()
            .filter(|(_, a)| *a || !assignable)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    fn var(&self, i: u8, assignable: bool) -> String {
        let v = self.visible(assignable);
        v[i as usize % v.len()].to_string()
    }

    fn callee(&self, f: u8) -> Option<String> {
        (self.func > 0).then(|| format!("f{}", f as usize % self.func))
    }

    fn expr(&self, e: &GExpr) -> String {
        match e {
            GExpr::Lit(n) => n.to_string(),
            GExpr::Var(i) => self.var(*i, false),
            GExpr::Bin(op @ ("/" | "%"), a, b) => format!("({} {op} ({} | 1))", self.expr(a), self.expr(b)),
            GExpr::Bin(op, a, b) => format!("({} {op} {})", self.expr(a), self.expr(b)),
            GExpr::Call(f, a, b) => match self.callee(*f) {
                Some(f) => format!("{f}({}, {})", self.expr(a), self.expr(b)),
                None => self.expr(a),
            },
            GExpr::Cond(c, a, b) => format!("({} ? {} : {})", self.expr(c), self.expr(a), self.expr(b)),
        }
    }

    fn line(&mut self, depth: usize, s: &str) {
        self.out.push_str(&"  ".repeat(depth));
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn body(&mut self, body: &[GStmt], depth: usize) {
        for s in body {
            self.stmt(s, depth);
        }
    }

    fn counter(&mut self) -> String {
        self.counter += 1;
        let w = format!("w{}", self.counter);
        self.scopes.push(vec![(w.clone(), false)]);
        w
    }

    fn stmt(&mut self, s: &GStmt, d: usize) {
        match s {
            GStmt::Assign(v, e) => {
                let l = format!("{} = {};", self.var(*v, true), self.expr(e));
                self.line(d, &l);
            }
            GStmt::Incr(v) => {
                let l = format!("{}++;", self.var(*v, true));
                self.line(d, &l);
            }
            GStmt::Break if self.loops > 0 => self.line(d, "break;"),
            GStmt::Break => self.line(d, ";"),
            GStmt::Return(e) => {
                let l = format!("return {};", self.expr(e));
                self.line(d, &l);
            }
            GStmt::Call(f, a, b) => {
                let l = match self.callee(*f) {
                    Some(f) => format!("{f}({}, {});", self.expr(a), self.expr(b)),
                    None => ";".into(),
                };
                self.line(d, &l);
            }
            GStmt::If(c, a, b) => {
                let l = format!("if ({}) {{", self.expr(c));
                self.line(d, &l);
                self.body(a, d + 1);
                self.line(d, "} else {");
                self.body(b, d + 1);
                self.line(d, "}");
            }
            GStmt::While(n, c, b) => {
                let cond = self.expr(c);
                let w = self.counter();
                self.line(d, &format!("{{ int {w} = 0;"));
                self.line(d, &format!("while ({w} < {n} && {cond}) {{"));
                self.line(d + 1, &format!("{w}++;"));
                self.loop_body(b, d + 1);
                self.line(d, "} }");
            }
            GStmt::For(n, b) => {
                let w = self.counter();
                self.line(d, &format!("for (int {w} = 0; {w} < {n}; {w}++) {{"));
                self.loop_body(b, d + 1);
                self.line(d, "}");
            }
            GStmt::DoWhile(n, b) => {
                let w = self.counter();
                self.line(d, &format!("{{ int {w} = 0;"));
                self.line(d, "do {");
                self.line(d + 1, &format!("{w}++;"));
                self.loop_body(b, d + 1);
                self.line(d, &format!("}} while ({w} < {n}); }}"));
            }
            GStmt::Block(e, b) => {
                let init = self.expr(e);
                self.line(d, &format!("{{ int l0 = {init};"));
                self.scopes.push(vec![("l0".into(), true)]);
                self.body(b, d + 1);
                self.scopes.pop();
                self.line(d, "}");
            }
        }
    }

    /// Body of a loop whose counter scope is already pushed.
    fn loop_body(&mut self, b: &[GStmt], d: usize) {
        self.loops += 1;
        self.body(b, d);
        self.loops -= 1;
        self.scopes.pop();
    }
}
