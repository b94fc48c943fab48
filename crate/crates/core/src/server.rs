//! The continuous-check server: NDJSON requests in, NDJSON reports out.
//!
//! Each accepted `open`/`update` starts a pipeline pass on its own thread.
//! All output goes through one writer thread, which also decides what is
//! stale: once a newer version of a document has been accepted, nothing
//! for older versions is written any more, and the superseded pass gets a
//! `cancelled` line instead of its `done`. Because the writer sees
//! acceptances and pass output in one channel, the decision does not race
//! with the passes themselves.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use crate::annot::Context;
use crate::pipeline::{analyze, Options};
use crate::source::SourceFile;

#[derive(Debug, Deserialize)]
struct Request {
    cmd: String,
    doc: Option<String>,
    version: Option<u64>,
    text: Option<String>,
}

/// Identifies one opening of a document; reopening starts a new epoch.
type Epoch = u64;

enum Out {
    /// A version was accepted; everything older is now stale.
    Accepted { doc: String, epoch: Epoch, version: u64 },
    Closed { doc: String, epoch: Epoch },
    /// Output of a pass, filtered before delivery.
    Pass { doc: String, epoch: Epoch, version: u64, line: String, done: bool },
    /// Unconditional reply (errors, stale notices).
    Reply(String),
}

struct DocEntry {
    epoch: Epoch,
    version: u64,
    cancel: Arc<AtomicBool>,
}

pub struct Server {
    opts: Arc<Options>,
    tx: Sender<Out>,
    docs: HashMap<String, DocEntry>,
    next_epoch: Epoch,
    workers: Vec<JoinHandle<()>>,
    writer: Option<JoinHandle<()>>,
    pass_delay: Duration,
}

impl Server {
    pub fn new<W: Write + Send + 'static>(opts: Options, sink: W) -> Server {
        let (tx, rx) = channel();
        let writer = std::thread::spawn(move || write_loop(rx, sink));
        Server {
            opts: Arc::new(opts),
            tx,
            docs: HashMap::new(),
            next_epoch: 0,
            workers: Vec::new(),
            writer: Some(writer),
            pass_delay: Duration::ZERO,
        }
    }

    /// Makes every pass sleep before it starts; useful to provoke
    /// overlapping passes in tests.
    pub fn set_pass_delay(&mut self, d: Duration) {
        self.pass_delay = d;
    }

    /// Handles one request line. Returns false on `shutdown`.
    pub fn handle_line(&mut self, line: &str) -> bool {
        if line.trim().is_empty() {
            return true;
        }
        let req: Request = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                self.reply(json!({"cmd": "error", "message": format!("malformed request: {e}")}));
                return true;
            }
        };
        let doc = req.doc.clone().unwrap_or_default();
        match req.cmd.as_str() {
            "shutdown" => return false,
            "open" | "update" if req.doc.is_none() => {
                self.reply(json!({"cmd": "error", "message": format!("`{}` needs a doc", req.cmd)}));
            }
            "open" | "update" => {
                let Some(text) = req.text else {
                    self.reply(json!({"cmd": "error", "doc": doc, "message": format!("`{}` needs text", req.cmd)}));
                    return true;
                };
                let known = self.docs.get(&doc).map(|d| d.version);
                let version = match (req.cmd.as_str(), req.version, known) {
                    (_, Some(v), _) => v,
                    ("open", None, None) => 1,
                    (_, None, _) => {
                        self.reply(json!({"cmd": "error", "doc": doc, "message": "missing version"}));
                        return true;
                    }
                };
                match known {
                    None if req.cmd == "update" => {
                        self.reply(json!({"cmd": "error", "doc": doc, "version": version,
                                          "message": format!("unknown document `{doc}`")}));
                    }
                    Some(cur) if version <= cur => {
                        self.reply(json!({"cmd": "stale", "doc": doc, "version": version, "current": cur}));
                    }
                    _ => self.accept(doc, version, text),
                }
            }
            "close" => match self.docs.remove(&doc) {
                Some(d) => {
                    d.cancel.store(true, Ordering::Relaxed);
                    let _ = self.tx.send(Out::Closed { doc, epoch: d.epoch });
                }
                None => self.reply(json!({"cmd": "error", "doc": doc, "message": format!("unknown document `{doc}`")})),
            },
            other => self.reply(json!({"cmd": "error", "message": format!("unknown command `{other}`")})),
        }
        true
    }

    fn reply(&self, v: serde_json::Value) {
        let _ = self.tx.send(Out::Reply(v.to_string()));
    }

    fn accept(&mut self, doc: String, version: u64, text: String) {
        let epoch = match self.docs.get(&doc) {
            Some(d) => {
                d.cancel.store(true, Ordering::Relaxed);
                d.epoch
            }
            None => {
                self.next_epoch += 1;
                self.next_epoch
            }
        };
        let cancel = Arc::new(AtomicBool::new(false));
        self.docs.insert(
            doc.clone(),
            DocEntry {
                epoch,
                version,
                cancel: cancel.clone(),
            },
        );
        let _ = self.tx.send(Out::Accepted {
            doc: doc.clone(),
            epoch,
            version,
        });
        let tx = self.tx.clone();
        let opts = self.opts.clone();
        let delay = self.pass_delay;
        self.workers.push(std::thread::spawn(move || {
            if !delay.is_zero() {
                std::thread::sleep(delay);
            }
            if cancel.load(Ordering::Relaxed) {
                return;
            }
            let src = SourceFile::new(doc.clone(), text).with_version(version);
            let a = analyze(src, &opts, Context::new());
            if cancel.load(Ordering::Relaxed) {
                return;
            }
            for r in a.reports() {
                let _ = tx.send(Out::Pass {
                    doc: doc.clone(),
                    epoch,
                    version,
                    line: r.to_json(),
                    done: false,
                });
            }
            let line = json!({"cmd": "done", "doc": doc, "version": version}).to_string();
            let _ = tx.send(Out::Pass {
                doc,
                epoch,
                version,
                line,
                done: true,
            });
        }));
        self.workers.retain(|w| !w.is_finished());
    }

    /// Waits for running passes and flushes all output.
    pub fn finish(mut self) {
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
        drop(self.tx);
        if let Some(w) = self.writer.take() {
            let _ = w.join();
        }
    }
}

#[derive(Default)]
struct Delivery {
    epoch: Epoch,
    latest: u64,
    /// Accepted version whose `done` or `cancelled` is still owed.
    pending: Option<u64>,
}

fn write_loop<W: Write>(rx: Receiver<Out>, mut sink: W) {
    let mut docs: HashMap<String, Delivery> = HashMap::new();
    let line = |sink: &mut W, s: &str| {
        let _ = sink.write_all(s.as_bytes());
        let _ = sink.write_all(b"\n");
        let _ = sink.flush();
    };
    for msg in rx {
        match msg {
            Out::Reply(s) => line(&mut sink, &s),
            Out::Accepted { doc, epoch, version } => {
                let d = docs.entry(doc.clone()).or_default();
                if d.epoch == epoch {
                    if let Some(old) = d.pending {
                        line(&mut sink, &cancelled(&doc, old));
                    }
                } else {
                    *d = Delivery::default();
                    d.epoch = epoch;
                }
                d.latest = version;
                d.pending = Some(version);
            }
            Out::Closed { doc, epoch } => {
                if let Some(d) = docs.get(&doc) {
                    if d.epoch == epoch {
                        if let Some(old) = d.pending {
                            line(&mut sink, &cancelled(&doc, old));
                        }
                        docs.remove(&doc);
                    }
                }
            }
            Out::Pass {
                doc,
                epoch,
                version,
                line: s,
                done,
            } => {
                let Some(d) = docs.get_mut(&doc) else { continue };
                if d.epoch != epoch || version != d.latest || d.pending != Some(version) {
                    continue;
                }
                line(&mut sink, &s);
                if done {
                    d.pending = None;
                }
            }
        }
    }
}

fn cancelled(doc: &str, version: u64) -> String {
    json!({"cmd": "cancelled", "doc": doc, "version": version}).to_string()
}

/// Reads requests until `shutdown` or end of input, then drains.
pub fn serve<R: BufRead, W: Write + Send + 'static>(opts: Options, input: R, output: W) {
    let mut server = Server::new(opts, output);
    for line in input.lines() {
        let Ok(line) = line else { break };
        if !server.handle_line(&line) {
            break;
        }
    }
    server.finish();
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    #[derive(Clone, Default)]
    struct Buf(Arc<Mutex<Vec<u8>>>);

    impl Write for Buf {
        fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(b);
            Ok(b.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    fn session(lines: &[&str]) -> Vec<serde_json::Value> {
        let buf = Buf::default();
        let input = lines.join("\n");
        serve(Options::default(), input.as_bytes(), buf.clone());
        let out = String::from_utf8(buf.0.lock().unwrap().clone()).unwrap();
        out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
    }

    #[test]
    fn open_reports_then_done() {
        let out = session(&[r#"{"cmd":"open","doc":"a","version":1,"text":"int x; /*@ highlight */"}"#]);
        assert!(out.iter().any(|v| v["kind"] == "highlight"));
        assert_eq!(out.last().unwrap()["cmd"], "done");
    }

    #[test]
    fn stale_and_unknown() {
        let out = session(&[
            r#"{"cmd":"open","doc":"a","version":3,"text":"int x;"}"#,
            r#"{"cmd":"update","doc":"a","version":2,"text":"int y;"}"#,
            r#"{"cmd":"close","doc":"a"}"#,
            r#"{"cmd":"update","doc":"a","version":4,"text":"int y;"}"#,
            "not json",
        ]);
        let cmds: Vec<_> = out.iter().filter_map(|v| v["cmd"].as_str()).collect();
        assert!(cmds.contains(&"stale"));
        assert_eq!(cmds.iter().filter(|c| **c == "error").count(), 2);
    }
}
