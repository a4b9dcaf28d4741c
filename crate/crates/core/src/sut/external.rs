use std::io::{Read, Write};
use std::process::{Command, Stdio};

use crate::stl::Trace;

use super::{Simulator, SutError};

/// Simulator backed by a child process: the input signals are written to its
/// standard input as CSV (`time,<input>,...`) and the output trace is read
/// from its standard output in the same format.
#[derive(Debug, Clone)]
pub struct ExternalProcess {
    pub command: String,
    pub args: Vec<String>,
}

impl Simulator for ExternalProcess {
    fn simulate(&self, inputs: &Trace) -> Result<Trace, SutError> {
        let fail = |msg: String| SutError::External(format!("`{}`: {msg}", self.command));
        let mut child = Command::new(&self.command)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| fail(format!("spawn failed: {e}")))?;

        let mut buf = Vec::new();
        inputs.write_csv(&mut buf)?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        // Written from a separate thread so a child that streams output
        // before reading all of its input cannot deadlock.
        let writer = std::thread::spawn(move || stdin.write_all(&buf));
        let mut stdout = String::new();
        child
            .stdout
            .take()
            .expect("piped stdout")
            .read_to_string(&mut stdout)
            .map_err(|e| fail(format!("reading output: {e}")))?;
        let status = child.wait().map_err(|e| fail(format!("wait failed: {e}")))?;
        let write_result = writer.join().map_err(|_| fail("input writer panicked".into()))?;
        if !status.success() {
            let mut stderr = String::new();
            if let Some(mut e) = child.stderr.take() {
                let _ = e.read_to_string(&mut stderr);
            }
            return Err(fail(format!("exited with {status}: {}", stderr.trim())));
        }
        write_result.map_err(|e| fail(format!("writing input: {e}")))?;
        let out = Trace::read_csv(stdout.as_bytes()).map_err(|e| fail(format!("bad output: {e}")))?;
        if out.len() != inputs.len() {
            return Err(fail(format!("returned {} samples for {} input samples", out.len(), inputs.len())));
        }
        Ok(out)
    }
}
