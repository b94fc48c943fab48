//! Scoped identifier environment.
//!
//! Three namespaces per scope (ordinary identifiers, tags, labels). Every
//! binding gets a process-wide serial from [`crate::reports::fresh_serial`],
//! which links uses back to the defining occurrence.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diag::Diagnostic;
use crate::reports::fresh_serial;
use crate::source::{FileId, Range};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingKind {
    Object,
    Function,
    Typedef,
    EnumConst,
    Param,
    Label,
    Tag,
}

impl BindingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BindingKind::Object => "object",
            BindingKind::Function => "function",
            BindingKind::Typedef => "typedef",
            BindingKind::EnumConst => "enum_const",
            BindingKind::Param => "param",
            BindingKind::Label => "label",
            BindingKind::Tag => "tag",
        }
    }

    pub fn namespace(self) -> Namespace {
        match self {
            BindingKind::Label => Namespace::Label,
            BindingKind::Tag => Namespace::Tag,
            _ => Namespace::Ordinary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Namespace {
    Ordinary,
    Tag,
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub kind: BindingKind,
    pub type_text: String,
    pub def_range: Range,
    pub def_file: FileId,
    pub serial: u64,
    pub global: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScopeKind {
    File,
    Function,
    Block,
}

#[derive(Debug, Clone)]
struct Scope {
    kind: ScopeKind,
    ordinary: HashMap<String, Arc<Binding>>,
    tags: HashMap<String, Arc<Binding>>,
    labels: HashMap<String, Arc<Binding>>,
}

impl Scope {
    fn new(kind: ScopeKind) -> Scope {
        Scope {
            kind,
            ordinary: HashMap::new(),
            tags: HashMap::new(),
            labels: HashMap::new(),
        }
    }

    fn table(&self, ns: Namespace) -> &HashMap<String, Arc<Binding>> {
        match ns {
            Namespace::Ordinary => &self.ordinary,
            Namespace::Tag => &self.tags,
            Namespace::Label => &self.labels,
        }
    }

    fn table_mut(&mut self, ns: Namespace) -> &mut HashMap<String, Arc<Binding>> {
        match ns {
            Namespace::Ordinary => &mut self.ordinary,
            Namespace::Tag => &mut self.tags,
            Namespace::Label => &mut self.labels,
        }
    }
}

/// Outcome of [`Env::declare`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declared {
    /// A fresh binding; `shadows` is the outer binding it hides, if any.
    New {
        binding: Arc<Binding>,
        shadows: Option<Arc<Binding>>,
    },
    /// A compatible redeclaration in the same scope; the first binding stays.
    Existing(Arc<Binding>),
}

impl Declared {
    pub fn binding(&self) -> &Arc<Binding> {
        match self {
            Declared::New { binding, .. } | Declared::Existing(binding) => binding,
        }
    }
}

/// One mutation of the environment, recorded so snapshots can be replayed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvOp {
    Push(ScopeKind),
    Pop,
    Bind(Arc<Binding>),
}

#[derive(Debug, Clone)]
pub struct Env {
    scopes: Vec<Scope>,
    pushes: u64,
    pops: u64,
}

impl Default for Env {
    fn default() -> Env {
        Env::new()
    }
}

/// An externally supplied binding, as read by `--env-in`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalBinding {
    pub name: String,
    pub kind: BindingKind,
    pub type_text: String,
}

impl Env {
    /// An environment holding only the (empty) file scope.
    pub fn new() -> Env {
        Env {
            scopes: vec![Scope::new(ScopeKind::File)],
            pushes: 0,
            pops: 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.scopes.len()
    }

    pub fn pushes(&self) -> u64 {
        self.pushes
    }

    pub fn pops(&self) -> u64 {
        self.pops
    }

    pub fn push_scope(&mut self, kind: ScopeKind) {
        self.scopes.push(Scope::new(kind));
        self.pushes += 1;
    }

    /// Pops the innermost scope. The file scope is never popped.
    pub fn pop_scope(&mut self) -> bool {
        if self.scopes.len() > 1 {
            self.scopes.pop();
            self.pops += 1;
            true
        } else {
            false
        }
    }

    fn target_scope(&self, ns: Namespace) -> usize {
        if ns == Namespace::Label {
            if let Some(i) = self.scopes.iter().rposition(|s| s.kind == ScopeKind::Function) {
                return i;
            }
        }
        self.scopes.len() - 1
    }

    /// Adds a binding to the innermost scope (labels go to the enclosing
    /// function scope).
    pub fn declare(
        &mut self,
        name: &str,
        kind: BindingKind,
        type_text: &str,
        def_range: Range,
        def_file: FileId,
    ) -> Result<Declared, Diagnostic> {
        assert!(!name.is_empty(), "empty name");
        let ns = kind.namespace();
        let si = self.target_scope(ns);
        if let Some(old) = self.scopes[si].table(ns).get(name) {
            return if compatible(old.kind, kind) {
                Ok(Declared::Existing(old.clone()))
            } else {
                Err(Diagnostic::error(
                    def_range,
                    format!(
                        "`{name}` redeclared as {} (previously {})",
                        kind.as_str(),
                        old.kind.as_str()
                    ),
                )
                .in_file(def_file))
            };
        }
        let shadows = self.scopes[..si]
            .iter()
            .rev()
            .find_map(|s| s.table(ns).get(name).cloned());
        let binding = Arc::new(Binding {
            name: name.to_string(),
            kind,
            type_text: type_text.to_string(),
            def_range,
            def_file,
            serial: fresh_serial(),
            global: si == 0,
        });
        self.scopes[si]
            .table_mut(ns)
            .insert(name.to_string(), binding.clone());
        Ok(Declared::New { binding, shadows })
    }

    /// Re-inserts an existing binding (used when replaying a log).
    pub fn bind(&mut self, b: Arc<Binding>) {
        let ns = b.kind.namespace();
        let si = self.target_scope(ns);
        self.scopes[si].table_mut(ns).insert(b.name.clone(), b);
    }

    pub fn apply(&mut self, op: &EnvOp) {
        match op {
            EnvOp::Push(k) => self.push_scope(*k),
            EnvOp::Pop => {
                self.pop_scope();
            }
            EnvOp::Bind(b) => self.bind(b.clone()),
        }
    }

    fn lookup_in(&self, ns: Namespace, name: &str) -> Option<&Arc<Binding>> {
        self.scopes.iter().rev().find_map(|s| s.table(ns).get(name))
    }

    /// Innermost ordinary-identifier binding.
    pub fn lookup(&self, name: &str) -> Option<&Arc<Binding>> {
        self.lookup_in(Namespace::Ordinary, name)
    }

    pub fn lookup_tag(&self, name: &str) -> Option<&Arc<Binding>> {
        self.lookup_in(Namespace::Tag, name)
    }

    pub fn lookup_label(&self, name: &str) -> Option<&Arc<Binding>> {
        self.lookup_in(Namespace::Label, name)
    }

    pub fn is_typedef(&self, name: &str) -> bool {
        self.lookup(name).is_some_and(|b| b.kind == BindingKind::Typedef)
    }

    /// Ordinary bindings of the file scope, sorted by name.
    pub fn globals(&self) -> Vec<Arc<Binding>> {
        let mut v: Vec<_> = self.scopes[0].ordinary.values().cloned().collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    /// Every visible ordinary binding, innermost first.
    pub fn visible(&self) -> Vec<Arc<Binding>> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for s in self.scopes.iter().rev() {
            let mut v: Vec<_> = s.ordinary.values().collect();
            v.sort_by(|a, b| a.name.cmp(&b.name));
            for b in v {
                if seen.insert(b.name.clone()) {
                    out.push(b.clone());
                }
            }
        }
        out
    }

    /// Collapses to a single file scope holding only the visible typedefs
    /// and tags; ordinary identifiers are dropped.
    pub fn typedefs_only(&self) -> Env {
        let mut env = Env::new();
        for s in &self.scopes {
            for b in s.ordinary.values().filter(|b| b.kind == BindingKind::Typedef) {
                env.scopes[0].ordinary.insert(b.name.clone(), b.clone());
            }
            for b in s.tags.values() {
                env.scopes[0].tags.insert(b.name.clone(), b.clone());
            }
        }
        env
    }

    /// Declares each external binding in the file scope.
    pub fn seed(&mut self, externals: &[ExternalBinding]) -> Vec<Arc<Binding>> {
        externals
            .iter()
            .filter_map(|e| {
                self.declare(&e.name, e.kind, &e.type_text, Range::default(), FileId(0))
                    .ok()
                    .map(|d| d.binding().clone())
            })
            .collect()
    }

    /// The file-scope bindings as an external binding list.
    pub fn export(&self) -> Vec<ExternalBinding> {
        let mut out: Vec<ExternalBinding> = self.scopes[0]
            .ordinary
            .values()
            .chain(self.scopes[0].tags.values())
            .map(|b| ExternalBinding {
                name: b.name.clone(),
                kind: b.kind,
                type_text: b.type_text.clone(),
            })
            .collect();
        out.sort_by(|a, b| (&a.name, a.kind.as_str()).cmp(&(&b.name, b.kind.as_str())));
        out
    }
}

fn compatible(old: BindingKind, new: BindingKind) -> bool {
    old == new && !matches!(new, BindingKind::Param | BindingKind::Label | BindingKind::EnumConst)
}

/// Environment operations tagged with the forest event during which they
/// happened. Replaying the prefix before event `e` yields the environment a
/// command focused on `e` observes.
#[derive(Debug, Clone, Default)]
pub struct EnvLog {
    pub ops: Vec<(u32, EnvOp)>,
}

impl EnvLog {
    /// The environment just before event `event` ran, starting from `base`.
    pub fn snapshot(&self, base: &Env, event: u32) -> Env {
        let mut env = base.clone();
        for (_, op) in self.ops.iter().take_while(|(e, _)| *e < event) {
            env.apply(op);
        }
        env
    }

    pub fn replayer<'a>(&'a self, base: &Env) -> Replayer<'a> {
        Replayer {
            log: self,
            env: base.clone(),
            next: 0,
        }
    }
}

/// Incremental snapshotting for monotonically increasing event indices.
pub struct Replayer<'a> {
    log: &'a EnvLog,
    env: Env,
    next: usize,
}

impl Replayer<'_> {
    pub fn at(&mut self, event: u32) -> &Env {
        while let Some((e, op)) = self.log.ops.get(self.next) {
            if *e >= event {
                break;
            }
            self.env.apply(op);
            self.next += 1;
        }
        &self.env
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decl(env: &mut Env, name: &str, kind: BindingKind) -> Declared {
        env.declare(name, kind, "int", Range::default(), FileId(0)).unwrap()
    }

    #[test]
    fn param_is_visible_in_body() {
        let mut env = Env::new();
        env.push_scope(ScopeKind::Function);
        let s = decl(&mut env, "b", BindingKind::Param).binding().serial;
        env.push_scope(ScopeKind::Block);
        assert_eq!(env.lookup("b").unwrap().serial, s);
        assert!(!env.lookup("b").unwrap().global);
    }

    #[test]
    fn typedef_classification() {
        let mut env = Env::new();
        decl(&mut env, "T", BindingKind::Typedef);
        assert!(env.is_typedef("T"));
        env.push_scope(ScopeKind::Block);
        decl(&mut env, "T", BindingKind::Object);
        assert!(!env.is_typedef("T"));
        env.pop_scope();
        assert!(env.is_typedef("T"));
    }

    #[test]
    fn pop_drops_bindings() {
        let mut env = Env::new();
        env.push_scope(ScopeKind::Block);
        decl(&mut env, "x", BindingKind::Object);
        assert!(env.pop_scope());
        assert!(env.lookup("x").is_none());
        assert!(!env.pop_scope());
        assert_eq!(env.pushes(), env.pops());
    }

    #[test]
    fn global_and_absent() {
        let mut env = Env::new();
        decl(&mut env, "k", BindingKind::Object);
        assert!(env.lookup("k").unwrap().global);
        assert!(env.lookup("z").is_none());
    }

    #[test]
    fn shadowing_reports_outer() {
        let mut env = Env::new();
        let outer = decl(&mut env, "x", BindingKind::Object).binding().serial;
        env.push_scope(ScopeKind::Block);
        match decl(&mut env, "x", BindingKind::Object) {
            Declared::New { binding, shadows } => {
                assert_eq!(shadows.unwrap().serial, outer);
                assert_eq!(env.lookup("x").unwrap().serial, binding.serial);
            }
            d => panic!("{d:?}"),
        }
    }

    #[test]
    fn redeclaration() {
        let mut env = Env::new();
        let a = decl(&mut env, "f", BindingKind::Function).binding().serial;
        assert_eq!(decl(&mut env, "f", BindingKind::Function), Declared::Existing(env.lookup("f").unwrap().clone()));
        assert_eq!(env.lookup("f").unwrap().serial, a);
        assert!(env
            .declare("f", BindingKind::Object, "int", Range::default(), FileId(0))
            .is_err());
    }

    #[test]
    fn namespaces_are_separate() {
        let mut env = Env::new();
        decl(&mut env, "s", BindingKind::Tag);
        assert!(env.lookup("s").is_none());
        decl(&mut env, "s", BindingKind::Object);
        assert_eq!(env.lookup_tag("s").unwrap().kind, BindingKind::Tag);
        env.push_scope(ScopeKind::Function);
        env.push_scope(ScopeKind::Block);
        decl(&mut env, "out", BindingKind::Label);
        env.pop_scope();
        assert!(env.lookup_label("out").is_some());
    }

    #[test]
    fn replay_matches_live() {
        let mut env = Env::new();
        let mut log = EnvLog::default();
        env.push_scope(ScopeKind::Block);
        log.ops.push((1, EnvOp::Push(ScopeKind::Block)));
        let b = decl(&mut env, "y", BindingKind::Object).binding().clone();
        log.ops.push((3, EnvOp::Bind(b.clone())));
        let base = Env::new();
        assert!(log.snapshot(&base, 3).lookup("y").is_none());
        assert_eq!(log.snapshot(&base, 4).lookup("y").unwrap().serial, b.serial);
        let mut r = log.replayer(&base);
        assert_eq!(r.at(2).depth(), 2);
        assert!(r.at(4).lookup("y").is_some());
    }

    #[test]
    fn seed_and_export() {
        let mut env = Env::new();
        let ext = vec![ExternalBinding {
            name: "g".into(),
            kind: BindingKind::Function,
            type_text: "int(int)".into(),
        }];
        let seeded = env.seed(&ext);
        assert_eq!(seeded.len(), 1);
        assert!(env.lookup("g").unwrap().global);
        assert_eq!(env.export(), ext);
        let json = serde_json::to_string(&ext).unwrap();
        assert_eq!(json, r#"[{"name":"g","kind":"function","type_text":"int(int)"}]"#);
    }

    #[test]
    fn typedefs_only_keeps_typedefs() {
        let mut env = Env::new();
        decl(&mut env, "T", BindingKind::Typedef);
        decl(&mut env, "x", BindingKind::Object);
        let e = env.typedefs_only();
        assert!(e.is_typedef("T"));
        assert!(e.lookup("x").is_none());
    }
}
