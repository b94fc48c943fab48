use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use c11kit::annot::Context;
use c11kit::clean::{self, Limits};
use c11kit::env::ExternalBinding;
use c11kit::lexer::ErrorMode;
use c11kit::lower;
use c11kit::pipeline::{self, Analysis, Options};
use c11kit::pretty;
use c11kit::reports;
use c11kit::source::SourceFile;

#[derive(Parser)]
#[command(name = "c11kit", version, about = "C11 frontend with navigable parse history and comment annotations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory searched for `#include` (repeatable).
    #[arg(long = "include-path", value_name = "DIR", global = true)]
    include_path: Vec<PathBuf>,
    /// Input is already preprocessed; skip directives and macro expansion.
    #[arg(long, global = true)]
    assume_cpp: bool,
    /// JSON binding list seeding the file scope.
    #[arg(long, value_name = "FILE", global = true)]
    env_in: Option<PathBuf>,
    /// Write the final file-scope bindings as JSON.
    #[arg(long, value_name = "FILE", global = true)]
    env_out: Option<PathBuf>,
    /// Annotation failures become warnings instead of aborting the plan.
    #[arg(long, global = true)]
    permissive: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print tokens, one per line.
    Lex {
        file: PathBuf,
        /// Also print comments, annotations and directive lines.
        #[arg(long)]
        trivia: bool,
    },
    /// Parse and report diagnostics.
    Parse {
        file: PathBuf,
        /// Print the AST as an s-expression.
        #[arg(long, conflicts_with = "dump_sr")]
        dump_ast: bool,
        /// Print the shift/reduce history.
        #[arg(long)]
        dump_sr: bool,
        /// Print the source regenerated from the AST.
        #[arg(long, conflicts_with_all = ["dump_ast", "dump_sr"])]
        pretty: bool,
    },
    /// Lower to CoreC.
    Lower {
        file: PathBuf,
        #[arg(long, conflicts_with = "dump_specs")]
        dump_core: bool,
        /// List attached spec annotations as (keyword, payload, target).
        #[arg(long)]
        dump_specs: bool,
    },
    /// Print the annotation execution plan.
    Annotate { file: PathBuf },
    /// Interpret a function.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "clean", value_parser = ["clean"])]
        backend: String,
        #[arg(long)]
        call: String,
        #[arg(long, num_args = 0.., allow_negative_numbers = true)]
        args: Vec<BigInt>,
        /// Statement budget.
        #[arg(long, default_value_t = Limits::default().fuel)]
        fuel: u64,
    },
    /// Run the full pipeline and stream reports as NDJSON.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Time parsing and full reporting.
    Bench {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        iters: usize,
    },
    /// Serve NDJSON requests on stdin.
    Serve,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("c11kit: {e}");
            ExitCode::from(2)
        }
    }
}

fn options(c: &Common) -> Result<Options, String> {
    let env_in = match &c.env_in {
        None => Vec::new(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str::<Vec<ExternalBinding>>(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
    };
    Ok(Options {
        include_dirs: c.include_path.clone(),
        assume_cpp: c.assume_cpp,
        env_in,
        mode: if c.permissive {
            ErrorMode::Permissive
        } else {
            ErrorMode::Strict
        },
        parse_only: false,
    })
}

fn load(path: &Path) -> Result<SourceFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(SourceFile::new(path.display().to_string(), text).with_path(path))
}

fn analyze(path: &Path, opts: &Options) -> Result<Analysis, String> {
    Ok(pipeline::analyze(load(path)?, opts, Context::new()))
}

/// Prints diagnostics to stderr and picks the exit code.
fn finish(a: &Analysis, common: &Common) -> Result<ExitCode, String> {
    for d in &a.diagnostics {
        eprintln!("{}", pipeline::render_diagnostic(&a.sources, d));
    }
    if let Some(p) = &common.env_out {
        let json = serde_json::to_string_pretty(&a.parse.env.export()).expect("bindings serialize");
        std::fs::write(p, json + "\n").map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(if a.has_errors() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let opts = options(&cli.common)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let io_err = |e: io::Error| e.to_string();
    match &cli.command {
        Command::Lex { file, trivia } => {
            let src = load(file)?;
            let mut sources = c11kit::source::SourceSet::default();
            let id = sources.add(src);
            let lexed = c11kit::lexer::tokenize(&sources.get(id).logical);
            let phys = |r| pipeline::range_text(&sources, id, r);
            let mut lines: Vec<(usize, String)> = lexed
                .tokens
                .iter()
                .map(|t| (t.range.start.offset, format!("{}\t{}\t{}", phys(t.range), t.kind.name(), t.text)))
                .collect();
            if *trivia {
                lines.extend(
                    lexed
                        .trivia
                        .iter()
                        .map(|t| (t.range.start.offset, format!("{}\t{:?}\t{:?}", phys(t.range), t.kind, t.payload))),
                );
                lines.sort_by_key(|(o, _)| *o);
            }
            for (_, l) in lines {
                writeln!(out, "{l}").map_err(io_err)?;
            }
            out.flush().map_err(io_err)?;
            let mut code = ExitCode::SUCCESS;
            for d in &lexed.diagnostics {
                eprintln!("{}", pipeline::render_diagnostic(&sources, d));
                if d.is_error() {
                    code = ExitCode::from(1);
                }
            }
            Ok(code)
        }
        Command::Parse {
            file,
            dump_ast,
            dump_sr,
            pretty: regen,
        } => {
            let a = analyze(file, &opts)?;
            if *dump_ast {
                writeln!(out, "{}", pretty::sexp_tu(&a.parse.ast).pretty()).map_err(io_err)?;
            } else if *dump_sr {
                write!(out, "{}", a.parse.forest.dump()).map_err(io_err)?;
            } else if *regen {
                write!(out, "{}", pretty::translation_unit(&a.parse.ast)).map_err(io_err)?;
            }
            out.flush().map_err(io_err)?;
            finish(&a, &cli.common)
        }
        Command::Lower {
            file,
            dump_core,
            dump_specs,
        } => {
            let a = analyze(file, &opts)?;
            if *dump_specs {
                for s in &a.attached {
                    writeln!(out, "{}\t{:?}\t{}", s.keyword, s.payload, s.target).map_err(io_err)?;
                }
            } else if *dump_core || !a.has_errors() {
                writeln!(out, "{}", lower::sexp_program(&a.core).pretty()).map_err(io_err)?;
            }
            out.flush().map_err(io_err)?;
            finish(&a, &cli.common)
        }
        Command::Annotate { file } => {
            let a = analyze(file, &opts)?;
            write!(out, "{}", pipeline::format_plan(&a)).map_err(io_err)?;
            out.flush().map_err(io_err)?;
            finish(&a, &cli.common)
        }
        Command::Run {
            file,
            call,
            args,
            fuel,
            ..
        } => {
            let a = analyze(file, &opts)?;
            if a.has_errors() {
                return finish(&a, &cli.common);
            }
            let (prog, diags) = clean::translate(&a.core, &a.pre.constants);
            for d in &diags {
                eprintln!("{}", pipeline::render_diagnostic(&a.sources, d));
            }
            if !prog.procs.contains_key(call) {
                finish(&a, &cli.common)?;
                eprintln!("c11kit: no translated function `{call}`");
                return Ok(ExitCode::from(1));
            }
            let limits = Limits {
                fuel: *fuel,
                ..Limits::default()
            };
            let r = clean::run(&prog, call, args, limits);
            writeln!(out, "{}", r.to_json()).map_err(io_err)?;
            out.flush().map_err(io_err)?;
            let code = finish(&a, &cli.common)?;
            Ok(if r.failure.is_some() { ExitCode::from(1) } else { code })
        }
        Command::Report { files } => {
            // Files are analysed in parallel; output stays in argument order.
            let results: Vec<Result<Analysis, String>> = std::thread::scope(|s| {
                let handles: Vec<_> = files.iter().map(|f| s.spawn(|| analyze(f, &opts))).collect();
                handles.into_iter().map(|h| h.join().expect("analysis thread")).collect()
            });
            let mut code = ExitCode::SUCCESS;
            for r in results {
                let a = r?;
                for rep in a.reports() {
                    reports::emit(&mut out, &rep).map_err(io_err)?;
                }
                out.flush().map_err(io_err)?;
                if finish(&a, &cli.common)? != ExitCode::SUCCESS {
                    code = ExitCode::from(1);
                }
            }
            Ok(code)
        }
        Command::Bench { file, iters } => {
            let src = load(file)?;
            let loc = src.physical.lines().count();
            let parse_opts = Options {
                parse_only: true,
                ..opts.clone()
            };
            let mut parse_times = Vec::new();
            let mut report_times = Vec::new();
            for i in 0..(*iters).max(1) {
                let t = Instant::now();
                let a = pipeline::analyze(src.clone(), &parse_opts, Context::new());
                let parse = t.elapsed();
                std::hint::black_box(&a.parse.forest);

                let t = Instant::now();
                let a = pipeline::analyze(src.clone(), &opts, Context::new());
                let n = a.reports().len();
                let report = t.elapsed();
                writeln!(
                    out,
                    "iter {}: parse {:.3}s ({:.1} kLoC/s), report {:.3}s ({n} reports)",
                    i + 1,
                    parse.as_secs_f64(),
                    kloc_per_sec(loc, parse),
                    report.as_secs_f64()
                )
                .map_err(io_err)?;
                parse_times.push(parse);
                report_times.push(report);
            }
            let (p, r) = (median(&mut parse_times), median(&mut report_times));
            writeln!(
                out,
                "median: parse {:.3}s ({:.1} kLoC/s), report {:.3}s, {loc} lines",
                p.as_secs_f64(),
                kloc_per_sec(loc, p),
                r.as_secs_f64()
            )
            .map_err(io_err)?;
            out.flush().map_err(io_err)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve => {
            drop(out);
            c11kit::server::serve(opts, io::stdin().lock(), io::stdout());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn kloc_per_sec(loc: usize, d: Duration) -> f64 {
    loc as f64 / 1000.0 / d.as_secs_f64().max(1e-9)
}

fn median(xs: &mut [Duration]) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}
