//! A C11 frontend built around a shift-reduce parser whose history stays
//! available after parsing, so comment annotations can navigate it.

pub mod annot;
pub mod ast;
pub mod clean;
pub mod diag;
pub mod env;
pub mod grammar;
pub mod lalr;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod pipeline;
pub mod preproc;
pub mod pretty;
pub mod reports;
pub mod server;
pub mod source;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/source.md")]
    struct Source;
    #[doc = include_str!("../../../book/src/lexing.md")]
    struct Lexing;
    #[doc = include_str!("../../../book/src/parsing.md")]
    struct Parsing;
    #[doc = include_str!("../../../book/src/annotations.md")]
    struct Annotations;
    #[doc = include_str!("../../../book/src/lowering.md")]
    struct Lowering;
    #[doc = include_str!("../../../book/src/reports.md")]
    struct Reports;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
