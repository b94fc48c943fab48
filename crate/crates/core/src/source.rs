//! Source text ownership, backslash-newline splicing and position mapping.
//!
//! The lexer and parser work on the *logical* text, i.e. the physical text
//! with every backslash-newline removed. [`SpliceMap`] remembers where the
//! removed pairs were so reports can be translated back to physical
//! line:column coordinates.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A byte position in logical text, with 1-based line and column.
///
/// Columns count Unicode scalar values; a tab is one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Pos {
    pub offset: usize,
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub const START: Pos = Pos {
        offset: 0,
        line: 1,
        col: 1,
    };
}

/// Half-open range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Range {
    pub start: Pos,
    pub end: Pos,
}

impl Range {
    pub fn new(start: Pos, end: Pos) -> Range {
        debug_assert!(start.offset <= end.offset);
        Range { start, end }
    }

    pub fn empty_at(p: Pos) -> Range {
        Range { start: p, end: p }
    }

    pub fn is_empty(&self) -> bool {
        self.start.offset == self.end.offset
    }

    pub fn len(&self) -> usize {
        self.end.offset - self.start.offset
    }

    /// Smallest range covering both.
    pub fn hull(self, other: Range) -> Range {
        let start = if other.start.offset < self.start.offset {
            other.start
        } else {
            self.start
        };
        let end = if other.end.offset > self.end.offset {
            other.end
        } else {
            self.end
        };
        Range { start, end }
    }

    pub fn contains(&self, other: &Range) -> bool {
        self.start.offset <= other.start.offset && other.end.offset <= self.end.offset
    }

    pub fn contains_offset(&self, off: usize) -> bool {
        self.start.offset <= off && off < self.end.offset
    }
}

impl std::fmt::Display for Range {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start.line, self.start.col, self.end.line, self.end.col
        )
    }
}

/// Index of a source file inside a [`SourceSet`]. The main document is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FileId(pub u32);

/// One version of a document.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub id: String,
    pub path: Option<PathBuf>,
    pub physical: Arc<str>,
    pub version: u64,
}

impl SourceFile {
    pub fn new(id: impl Into<String>, text: impl Into<Arc<str>>) -> SourceFile {
        SourceFile {
            id: id.into(),
            path: None,
            physical: text.into(),
            version: 1,
        }
    }

    pub fn with_path(mut self, path: impl Into<PathBuf>) -> SourceFile {
        self.path = Some(path.into());
        self
    }

    pub fn with_version(mut self, version: u64) -> SourceFile {
        self.version = version;
        self
    }

    /// A new version carrying `text`. The id is kept.
    pub fn edited(&self, text: impl Into<Arc<str>>) -> SourceFile {
        SourceFile {
            id: self.id.clone(),
            path: self.path.clone(),
            physical: text.into(),
            version: self.version + 1,
        }
    }
}

/// A contiguous run of bytes that is identical in both coordinate systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub logical_start: usize,
    pub physical_start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpliceMap {
    pub segments: Vec<Segment>,
    /// Removed backslash-newline sequences as `(physical offset, byte length)`.
    pub splices: Vec<(usize, usize)>,
    pub logical_len: usize,
    pub physical_len: usize,
}

/// Remove every `\`+`\n` and `\`+`\r\n` pair.
pub fn splice(physical: &str) -> (String, SpliceMap) {
    let bytes = physical.as_bytes();
    let mut logical = String::with_capacity(physical.len());
    let mut map = SpliceMap {
        physical_len: physical.len(),
        ..SpliceMap::default()
    };
    let mut seg_start = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        if bytes[i] == b'\\' {
            let splice_len = match (bytes.get(i + 1), bytes.get(i + 2)) {
                (Some(b'\n'), _) => 2,
                (Some(b'\r'), Some(b'\n')) => 3,
                _ => 0,
            };
            if splice_len > 0 {
                map.push_segment(logical.len(), seg_start, i - seg_start);
                logical.push_str(&physical[seg_start..i]);
                map.splices.push((i, splice_len));
                i += splice_len;
                seg_start = i;
                continue;
            }
        }
        i += 1;
    }
    map.push_segment(logical.len(), seg_start, bytes.len() - seg_start);
    logical.push_str(&physical[seg_start..]);
    map.logical_len = logical.len();
    (logical, map)
}

impl SpliceMap {
    fn push_segment(&mut self, logical_start: usize, physical_start: usize, len: usize) {
        if len == 0 {
            return;
        }
        self.segments.push(Segment {
            logical_start,
            physical_start,
            len,
        });
    }

    /// Identity map for text without splices.
    pub fn identity(len: usize) -> SpliceMap {
        let mut m = SpliceMap {
            logical_len: len,
            physical_len: len,
            ..SpliceMap::default()
        };
        m.push_segment(0, 0, len);
        m
    }

    /// Physical byte offset of logical byte `offset`.
    ///
    /// `offset == logical_len` maps to the end of the last segment.
    pub fn to_physical(&self, offset: usize) -> usize {
        assert!(
            offset <= self.logical_len,
            "logical offset {offset} out of range (len {})",
            self.logical_len
        );
        if self.segments.is_empty() {
            return 0;
        }
        let idx = self
            .segments
            .partition_point(|s| s.logical_start + s.len <= offset);
        match self.segments.get(idx) {
            Some(s) => s.physical_start + (offset - s.logical_start),
            None => {
                let last = self.segments.last().unwrap();
                last.physical_start + last.len
            }
        }
    }

    /// Logical offset of physical byte `offset`. Bytes inside a removed
    /// splice map to the next logical byte.
    pub fn to_logical(&self, offset: usize) -> usize {
        assert!(offset <= self.physical_len, "physical offset out of range");
        let idx = self
            .segments
            .partition_point(|s| s.physical_start + s.len <= offset);
        match self.segments.get(idx) {
            Some(s) if offset >= s.physical_start => s.logical_start + (offset - s.physical_start),
            Some(s) => s.logical_start,
            None => self.logical_len,
        }
    }

    /// Rebuild the physical text from the logical one.
    pub fn reconstruct(&self, logical: &str, physical_source: &str) -> String {
        let mut out = String::with_capacity(self.physical_len);
        let mut splices = self.splices.iter().peekable();
        for seg in &self.segments {
            while let Some(&&(p, n)) = splices.peek() {
                if p < seg.physical_start {
                    out.push_str(&physical_source[p..p + n]);
                    splices.next();
                } else {
                    break;
                }
            }
            out.push_str(&logical[seg.logical_start..seg.logical_start + seg.len]);
        }
        for &(p, n) in splices {
            out.push_str(&physical_source[p..p + n]);
        }
        out
    }
}

/// Line start table for computing 1-based line:col.
#[derive(Debug, Clone)]
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(text: &str) -> LineIndex {
        let mut starts = vec![0];
        starts.extend(
            text.bytes()
                .enumerate()
                .filter(|&(_, b)| b == b'\n')
                .map(|(i, _)| i + 1),
        );
        LineIndex { starts }
    }

    pub fn pos(&self, text: &str, offset: usize) -> Pos {
        let line = self.starts.partition_point(|&s| s <= offset) - 1;
        let start = self.starts[line];
        let col = text
            .get(start..offset)
            .map(|s| s.chars().count())
            .unwrap_or(offset - start);
        Pos {
            offset,
            line: line as u32 + 1,
            col: col as u32 + 1,
        }
    }
}

/// Translates logical ranges into physical line:col coordinates.
#[derive(Debug, Clone)]
pub struct PhysicalMapper {
    pub map: SpliceMap,
    physical: Arc<str>,
    lines: LineIndex,
}

impl PhysicalMapper {
    pub fn new(physical: Arc<str>, map: SpliceMap) -> PhysicalMapper {
        let lines = LineIndex::new(&physical);
        PhysicalMapper {
            map,
            physical,
            lines,
        }
    }

    /// Physical start and end positions. The end covers the full extent of
    /// the last logical character, so splice bytes inside the range are
    /// included.
    pub fn physical_range(&self, r: Range) -> Range {
        let start = self.map.to_physical(r.start.offset);
        let end = if r.is_empty() {
            start
        } else {
            let last = self.map.to_physical(r.end.offset - 1);
            let ch = self.physical[last..].chars().next().map_or(1, char::len_utf8);
            last + ch
        };
        Range {
            start: self.lines.pos(&self.physical, start),
            end: self.lines.pos(&self.physical, end),
        }
    }
}

/// All files taking part in one pipeline run. File 0 is the main document.
#[derive(Debug, Clone, Default)]
pub struct SourceSet {
    pub files: Vec<LoadedFile>,
}

#[derive(Debug, Clone)]
pub struct LoadedFile {
    pub source: SourceFile,
    pub logical: Arc<str>,
    pub mapper: PhysicalMapper,
}

impl SourceSet {
    pub fn add(&mut self, source: SourceFile) -> FileId {
        let (logical, map) = splice(&source.physical);
        let mapper = PhysicalMapper::new(source.physical.clone(), map);
        self.files.push(LoadedFile {
            source,
            logical: logical.into(),
            mapper,
        });
        FileId(self.files.len() as u32 - 1)
    }

    pub fn get(&self, id: FileId) -> &LoadedFile {
        &self.files[id.0 as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splice_inside_keyword() {
        let (logical, map) = splice("i\\\nn\\\nt x;");
        assert_eq!(logical, "int x;");
        assert_eq!(map.segments.len(), 3);
    }

    #[test]
    fn no_splice_single_segment() {
        let (logical, map) = splice("int x;");
        assert_eq!(logical, "int x;");
        assert_eq!(map.segments.len(), 1);
    }

    #[test]
    fn trailing_splice() {
        let (logical, map) = splice("a\\\n");
        assert_eq!(logical, "a");
        assert_eq!(map.segments.len(), 1);
        assert_eq!(map.reconstruct(&logical, "a\\\n"), "a\\\n");
    }

    #[test]
    fn crlf_splice_but_not_bare_cr() {
        let (logical, _) = splice("a\\\r\nb");
        assert_eq!(logical, "ab");
        let (logical, _) = splice("a\\\rb");
        assert_eq!(logical, "a\\\rb");
    }

    #[test]
    fn to_physical_examples() {
        let (_, map) = splice("i\\\nnt");
        assert_eq!(map.to_physical(0), 0);
        assert_eq!(map.to_physical(1), 3);
        let (_, id) = splice("abc");
        for o in 0..3 {
            assert_eq!(id.to_physical(o), o);
        }
    }

    #[test]
    #[should_panic]
    fn to_physical_out_of_range() {
        let (_, map) = splice("ab");
        map.to_physical(3);
    }

    #[test]
    fn physical_range_covers_splice() {
        let phys: Arc<str> = "i\\\nnt x;".into();
        let (_, map) = splice(&phys);
        let m = PhysicalMapper::new(phys, map);
        let r = Range::new(
            Pos { offset: 0, line: 1, col: 1 },
            Pos { offset: 3, line: 1, col: 4 },
        );
        let p = m.physical_range(r);
        assert_eq!((p.start.line, p.start.col), (1, 1));
        assert_eq!((p.end.line, p.end.col), (2, 3));
        assert_eq!(p.end.offset, 5);
    }

    #[test]
    fn line_index_counts_chars() {
        let t = "ab\n⟨x⟩y";
        let li = LineIndex::new(t);
        let p = li.pos(t, t.find('y').unwrap());
        assert_eq!((p.line, p.col), (2, 4));
    }
}
