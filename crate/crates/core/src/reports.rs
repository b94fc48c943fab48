//! Report records and their NDJSON wire format.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostic, Severity};
use crate::source::{FileId, Range, SourceSet};

static NEXT_SERIAL: AtomicU64 = AtomicU64::new(1);

/// A process-wide unique, strictly increasing serial. The first call
/// returns 1.
pub fn fresh_serial() -> u64 {
    NEXT_SERIAL.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Keyword,
    EntityDef,
    EntityUse,
    FreeVariable,
    TypedefName,
    TypeInfo,
    Highlight,
    DiagnosticError,
    DiagnosticWarning,
    MacroExpansion,
    AnnotationFocus,
}

impl ReportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::Keyword => "keyword",
            ReportKind::EntityDef => "entity_def",
            ReportKind::EntityUse => "entity_use",
            ReportKind::FreeVariable => "free_variable",
            ReportKind::TypedefName => "typedef_name",
            ReportKind::TypeInfo => "type_info",
            ReportKind::Highlight => "highlight",
            ReportKind::DiagnosticError => "diagnostic_error",
            ReportKind::DiagnosticWarning => "diagnostic_warning",
            ReportKind::MacroExpansion => "macro_expansion",
            ReportKind::AnnotationFocus => "annotation_focus",
        }
    }
}

pub type Props = BTreeMap<String, String>;

/// A report before it is stamped with a serial and converted to physical
/// coordinates. `range` is logical, in `file`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Markup {
    pub kind: ReportKind,
    pub range: Range,
    pub file: FileId,
    pub props: Props,
}

impl Markup {
    pub fn new(kind: ReportKind, range: Range, file: FileId) -> Markup {
        Markup {
            kind,
            range,
            file,
            props: Props::new(),
        }
    }

    pub fn prop(mut self, key: &str, value: impl ToString) -> Markup {
        self.props.insert(key.to_string(), value.to_string());
        self
    }

    pub fn from_diagnostic(d: &Diagnostic) -> Markup {
        let kind = match d.severity {
            Severity::Error => ReportKind::DiagnosticError,
            Severity::Warning | Severity::Info => ReportKind::DiagnosticWarning,
        };
        Markup::new(kind, d.range, d.file)
            .prop("message", &d.message)
            .prop("severity", d.severity)
    }
}

/// One line of the report stream. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub serial: u64,
    pub doc: String,
    pub version: u64,
    pub kind: ReportKind,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
    pub props: Props,
}

impl Report {
    /// Stamps `m` with a fresh serial and physical coordinates.
    pub fn from_markup(m: &Markup, sources: &SourceSet, doc: &str, version: u64) -> Report {
        let file = sources.get(m.file);
        let r = file.mapper.physical_range(m.range);
        let mut props = m.props.clone();
        if m.file != FileId(0) {
            props.insert("file".into(), file.source.id.clone());
        }
        Report {
            serial: fresh_serial(),
            doc: doc.to_string(),
            version,
            kind: m.kind,
            start_line: r.start.line,
            start_col: r.start.col,
            end_line: r.end.line,
            end_col: r.end.col,
            props,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Writes one report as a JSON line.
pub fn emit<W: Write + ?Sized>(sink: &mut W, report: &Report) -> io::Result<()> {
    serde_json::to_writer(&mut *sink, report)?;
    sink.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{Pos, SourceFile};

    #[test]
    fn serials_are_distinct_and_increasing() {
        let a = fresh_serial();
        let b = fresh_serial();
        assert!(b > a);
    }

    #[test]
    fn concurrent_serials_are_distinct() {
        let handles: Vec<_> = (0..8)
            .map(|_| std::thread::spawn(|| (0..1000).map(|_| fresh_serial()).collect::<Vec<_>>()))
            .collect();
        let mut all: Vec<u64> = handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn field_order_is_fixed() {
        let mut set = SourceSet::default();
        set.add(SourceFile::new("a.c", "int main;"));
        let p = |offset, col| Pos { offset, line: 1, col };
        let m = Markup::new(ReportKind::Highlight, Range::new(p(4, 5), p(8, 9)), FileId(0))
            .prop("command", "highlight");
        let mut r = Report::from_markup(&m, &set, "a.c", 3);
        r.serial = 7;
        let mut out = Vec::new();
        emit(&mut out, &r).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "{\"serial\":7,\"doc\":\"a.c\",\"version\":3,\"kind\":\"highlight\",\
             \"start_line\":1,\"start_col\":5,\"end_line\":1,\"end_col\":9,\
             \"props\":{\"command\":\"highlight\"}}\n"
        );
    }

    #[test]
    fn spliced_keyword_covers_physical_extent() {
        let mut set = SourceSet::default();
        let id = set.add(SourceFile::new("a.c", "i\\\nnt x;"));
        assert_eq!(&*set.get(id).logical, "int x;");
        let p = |offset, col| Pos { offset, line: 1, col };
        let m = Markup::new(ReportKind::Keyword, Range::new(p(0, 1), p(3, 4)), id);
        let r = Report::from_markup(&m, &set, "a.c", 1);
        assert_eq!((r.start_line, r.start_col, r.end_line, r.end_col), (1, 1, 2, 3));
    }

    #[test]
    fn diagnostics_become_reports() {
        let d = Diagnostic::info(Range::default(), "shadows");
        let m = Markup::from_diagnostic(&d);
        assert_eq!(m.kind, ReportKind::DiagnosticWarning);
        assert_eq!(m.props["severity"], "info");
    }
}
