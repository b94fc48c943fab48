use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus").join(name)
}

fn c11kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c11kit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn usage_errors_and_missing_files_exit_2() {
    assert_eq!(c11kit(&[]).status.code(), Some(2));
    assert_eq!(c11kit(&["parse", "--dump-ast", "--dump-sr", "x.c"]).status.code(), Some(2));
    let o = c11kit(&["parse", "missing.c"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.c"), "{}", stderr(&o));
}

#[test]
fn syntax_errors_exit_1_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.c", "int f(void) {\n  return 1 +;\n}\n");
    let o = c11kit(&["parse", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.c:2:"), "{}", stderr(&o));
}

#[test]
fn report_prime_has_no_errors() {
    let o = c11kit(&["report", corpus("prime.c").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines = json_lines(&o);
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|v| v["kind"] != "diagnostic_error"));
    assert!(lines.iter().any(|v| v["kind"] == "macro_expansion"));
    let serials: Vec<u64> = lines.iter().map(|v| v["serial"].as_u64().unwrap()).collect();
    let mut sorted = serials.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), serials.len());
}

#[test]
fn report_keeps_argument_order() {
    let a = corpus("gcd.c");
    let b = corpus("fib.c");
    let o = c11kit(&["report", b.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let docs: Vec<String> = json_lines(&o).iter().map(|v| v["doc"].as_str().unwrap().to_string()).collect();
    let first_a = docs.iter().position(|d| d.ends_with("gcd.c")).unwrap();
    assert!(docs[..first_a].iter().all(|d| d.ends_with("fib.c")));
    assert!(docs[first_a..].iter().all(|d| d.ends_with("gcd.c")));
}

#[test]
fn run_prime() {
    let o = c11kit(&["run", corpus("prime.c").to_str().unwrap(), "--call", "prime", "--args", "97"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["result"], 1);
    assert_eq!(v["globals"]["k"], 8);
}

#[test]
fn failed_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "wrap.c", "unsigned int u = 4294967295u;\nvoid bump(void) { u++; }\n");
    let o = c11kit(&["run", &f, "--call", "bump"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["failure"]["kind"], "assert");
}

#[test]
fn negative_arguments() {
    let o = c11kit(&["run", corpus("abs_min_max.c").to_str().unwrap(), "--call", "iabs", "--args", "-5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("\"result\":5"), "{}", stdout(&o));
}

#[test]
fn lex_shows_annotations_as_trivia() {
    let o = c11kit(&["lex", "--trivia", corpus("nav_for.c").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("3:39-3:55\tAnnotation")), "{out}");
    assert!(out.lines().any(|l| l == "1:1-1:4\tkeyword\tint"), "{out}");
}

#[test]
fn annotate_prints_the_plan() {
    let o = c11kit(&["annotate", corpus("nav_for.c").to_str().unwrap()]);
    assert_eq!(stdout(&o), "bottom_up\thighlight\tshift `i`\t3:37-3:38\tok\n");
}

#[test]
fn dump_sr_is_one_event_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.c", "int f(int b){return b+1;}");
    let o = c11kit(&["parse", "--dump-sr", &f]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("S ")).count(), 13);
    assert!(out.lines().all(|l| l.starts_with("S ") || l.starts_with("R ")));
}

#[test]
fn env_out_then_env_in() {
    let dir = tempfile::tempdir().unwrap();
    let header = write(dir.path(), "types.c", "typedef unsigned long size_type;\nint counter;\n");
    let env = dir.path().join("env.json").display().to_string();
    let o = c11kit(&["parse", "--env-out", &env, &header]);
    assert_eq!(o.status.code(), Some(0));
    let bindings: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&env).unwrap()).unwrap();
    assert!(bindings.as_array().unwrap().iter().any(|b| b["name"] == "size_type" && b["kind"] == "typedef"));

    // `size_type n` only parses as a declaration if the typedef is known.
    let user = write(dir.path(), "user.c", "size_type n;\nint get(void) { return counter; }\n");
    assert_eq!(c11kit(&["parse", &user]).status.code(), Some(1));
    let o = c11kit(&["--env-in", &env, "report", &user]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(json_lines(&o).iter().any(|v| v["kind"] == "entity_use" && v["props"]["name"] == "counter"));
}

#[test]
fn include_path_is_searched() {
    let dir = tempfile::tempdir().unwrap();
    let inc = dir.path().join("inc");
    std::fs::create_dir(&inc).unwrap();
    write(&inc, "limits.h", "#define LIMIT 42\n");
    let f = write(dir.path(), "main.c", "#include \"limits.h\"\nint limit(void) { return LIMIT; }\n");
    let o = c11kit(&["run", &f, "--call", "limit"]);
    assert_eq!(o.status.code(), Some(1));
    let o = c11kit(&["--include-path", inc.to_str().unwrap(), "run", &f, "--call", "limit"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("\"result\":42"));
}

#[test]
fn permissive_downgrades_annotation_failures() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "u.c", "int x; /*@ nosuchcommand */\n");
    assert_eq!(c11kit(&["report", &f]).status.code(), Some(1));
    assert_eq!(c11kit(&["--permissive", "report", &f]).status.code(), Some(0));
}

#[test]
fn bench_prints_iterations_and_median() {
    let o = c11kit(&["bench", "--iters", "2", corpus("sieve.c").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("iter ")).count(), 2);
    assert!(out.lines().last().unwrap().starts_with("median: parse "), "{out}");
}

#[test]
fn serve_answers_on_stdout() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_c11kit"))
        .arg("serve")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(stdin, r#"{{"cmd":"open","doc":"d","version":1,"text":"int x; /*@ highlight */"}}"#).unwrap();
    writeln!(stdin, r#"{{"cmd":"shutdown"}}"#).unwrap();
    drop(stdin);
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert!(lines.iter().any(|v| v["kind"] == "highlight"));
    assert_eq!(lines.last().unwrap()["cmd"], "done");
}
