#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use c11kit::annot::Context;
use c11kit::pipeline::{self, Analysis, Options};
use c11kit::source::SourceFile;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// Every corpus file as (file name, text), sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "c").then(|| {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                (name, std::fs::read_to_string(&p).expect("corpus file"))
            })
        })
        .collect();
    files.sort();
    files
}

pub fn corpus_file(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).expect("corpus file")
}

pub fn options() -> Options {
    Options {
        include_dirs: vec![corpus_dir()],
        ..Options::default()
    }
}

pub fn parse_only() -> Options {
    Options {
        parse_only: true,
        ..options()
    }
}

pub fn analyze(name: &str, text: &str) -> Analysis {
    analyze_opts(name, text, &options())
}

pub fn analyze_opts(name: &str, text: &str, opts: &Options) -> Analysis {
    pipeline::analyze(SourceFile::new(name, text.to_string()), opts, Context::new())
}

/// Rendered diagnostics, for failure messages.
pub fn errors(a: &Analysis) -> String {
    a.diagnostics
        .iter()
        .filter(|d| d.is_error())
        .map(|d| pipeline::render_diagnostic(&a.sources, d))
        .collect::<Vec<_>>()
        .join("\n")
}
