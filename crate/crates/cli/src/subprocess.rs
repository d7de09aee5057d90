//! Objectives evaluated by an external program, one process per trial.
//!
//! The program runs under `sh -c`, receives `{"config": {...}}` and a
//! newline on standard input and must print `{"objectives": [...],
//! "constraints": [...]}` on standard output. `BBO_TRIAL_INDEX` holds the
//! trial number.

use std::io::{Read, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use bbo_core::optimizer::{EvalFailure, Evaluation, Objective};
use bbo_core::Configuration;
use serde::{Deserialize, Serialize};

#[derive(Serialize)]
struct Request<'a> {
    config: &'a Configuration,
}

#[derive(Deserialize)]
struct Response {
    objectives: Vec<f64>,
    #[serde(default)]
    constraints: Vec<f64>,
}

pub struct SubprocessObjective {
    pub command: String,
    pub timeout: Option<Duration>,
    pub shape: (usize, usize),
}

const POLL: Duration = Duration::from_millis(5);
const MESSAGE_LIMIT: usize = 500;

fn tail(bytes: &[u8]) -> String {
    let text = String::from_utf8_lossy(bytes);
    let text = text.trim();
    let start = text.char_indices().rev().nth(MESSAGE_LIMIT).map_or(0, |(i, _)| i);
    text[start..].to_string()
}

/// Kills the child's whole process group, so that programs started by the
/// shell go too.
fn kill_tree(child: &mut Child) {
    #[cfg(unix)]
    unsafe {
        libc::kill(-(child.id() as i32), libc::SIGKILL);
    }
    let _ = child.kill();
    let _ = child.wait();
}

fn drain(mut source: impl Read + Send + 'static) -> mpsc::Receiver<Vec<u8>> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = source.read_to_end(&mut buf);
        let _ = tx.send(buf);
    });
    rx
}

impl SubprocessObjective {
    fn spawn(&self, trial_index: usize) -> std::io::Result<Child> {
        let mut cmd = Command::new("sh");
        cmd.arg("-c")
            .arg(&self.command)
            .env("BBO_TRIAL_INDEX", trial_index.to_string())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        #[cfg(unix)]
        {
            use std::os::unix::process::CommandExt;
            cmd.process_group(0);
        }
        cmd.spawn()
    }
}

impl Objective for SubprocessObjective {
    fn evaluate(&self, config: &Configuration, trial_index: usize) -> Result<Evaluation, EvalFailure> {
        let mut child = self
            .spawn(trial_index)
            .map_err(|e| EvalFailure::Crashed(format!("could not start '{}': {e}", self.command)))?;
        let mut request = serde_json::to_vec(&Request { config }).expect("configuration serializes");
        request.push(b'\n');
        if let Some(mut stdin) = child.stdin.take() {
            // a program that ignores its input may have exited already
            let _ = stdin.write_all(&request);
        }
        let stdout = drain(child.stdout.take().expect("piped stdout"));
        let stderr = drain(child.stderr.take().expect("piped stderr"));

        let started = Instant::now();
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) => {}
                Err(e) => {
                    kill_tree(&mut child);
                    return Err(EvalFailure::Crashed(format!("waiting for the program failed: {e}")));
                }
            }
            if self.timeout.is_some_and(|t| started.elapsed() >= t) {
                kill_tree(&mut child);
                return Err(EvalFailure::Timeout);
            }
            thread::sleep(POLL);
        };
        // descendants may still hold the pipes open; do not wait for them forever
        let grace = Duration::from_secs(5);
        let out = stdout.recv_timeout(grace).unwrap_or_default();
        let err = stderr.recv_timeout(grace).unwrap_or_default();
        #[cfg(unix)]
        unsafe {
            libc::kill(-(child.id() as i32), libc::SIGKILL);
        }

        if !status.success() {
            let mut msg = format!("program exited with {status}");
            let detail = tail(&err);
            if !detail.is_empty() {
                msg.push_str(": ");
                msg.push_str(&detail);
            }
            return Err(EvalFailure::Crashed(msg));
        }
        let text = String::from_utf8_lossy(&out);
        let line = text.lines().map(str::trim).rev().find(|l| !l.is_empty()).unwrap_or("");
        let response: Response = serde_json::from_str(line)
            .map_err(|e| EvalFailure::Protocol(format!("invalid response {:?}: {e}", tail(line.as_bytes()))))?;
        Ok(Evaluation::new(response.objectives, response.constraints))
    }

    fn shape(&self) -> Option<(usize, usize)> {
        Some(self.shape)
    }
}
