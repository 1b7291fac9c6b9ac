//! Line protocol between an adversary and a curator running elsewhere.
//!
//! ```text
//! > SCORE {"kind":"twin","n":2,"entries":["5/7","11/13"]}
//! < ESCORE 91/10
//! > SCORE {"kind":"custom","n":3,"entries":["1/5","2/5","3/5"]}
//! < LL 4.1e-1 AUC 1.0e0
//! > QUIT
//! ```
//!
//! Malformed requests get a single `ERR <reason>` line and the server keeps
//! going.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use crate::decimal::{DecimalScore, ScoreKind};
use crate::error::{Error, Result};
use crate::oracle::{DecimalAnswer, DecimalOracle, ExactOracle};
use crate::precision::rounded_answer;
use crate::scoring::{exact_score, ExactScore, Labeling, PredictionVector};
use crate::wire::{parse_rational, VectorDoc, VectorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    Exact,
    Decimal { phi: u32 },
}

/// The response line for one request, or `None` on `QUIT`.
pub fn respond(hidden: &Labeling, mode: OracleMode, line: &str) -> Option<String> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line == "QUIT" {
        return None;
    }
    let Some(body) = line.strip_prefix("SCORE ") else {
        return Some("ERR unknown command".to_string());
    };
    let x = match serde_json::from_str::<VectorDoc>(body) {
        Ok(doc) => match doc.to_vector() {
            Ok(x) => x,
            Err(Error::LengthMismatch { .. }) => return Some("ERR length".to_string()),
            Err(e) => return Some(format!("ERR {}", one_line(&e.to_string()))),
        },
        Err(e) => return Some(format!("ERR parse {}", one_line(&e.to_string()))),
    };
    if x.len() != hidden.len() {
        return Some("ERR length".to_string());
    }
    let reply = match mode {
        OracleMode::Exact => exact_score(&x, hidden).map(|s| format!("ESCORE {s}")),
        OracleMode::Decimal { phi } => {
            rounded_answer(&x, hidden, phi).map(|a| format!("LL {} AUC {}", a.ll.wire(), a.auc.wire()))
        }
    };
    Some(reply.unwrap_or_else(|e| format!("ERR {}", one_line(&e.to_string()))))
}

fn one_line(s: &str) -> String {
    s.replace(['\r', '\n'], " ")
}

/// Answers requests from `input` until `QUIT` or end of input.
pub fn serve<R: BufRead, W: Write>(
    hidden: &Labeling,
    mode: OracleMode,
    input: R,
    mut output: W,
) -> Result<()> {
    for line in input.lines() {
        match respond(hidden, mode, &line?) {
            Some(reply) => {
                writeln!(output, "{reply}")?;
                output.flush()?;
            }
            None => break,
        }
    }
    Ok(())
}

/// Client side of the protocol over any pair of streams.
#[derive(Debug)]
pub struct LineOracle<R, W> {
    reader: R,
    writer: W,
    phi: u32,
}

impl<R: BufRead, W: Write> LineOracle<R, W> {
    /// `phi` is the precision the remote oracle rounds to; it is only used
    /// by the decimal interface.
    pub fn new(reader: R, writer: W, phi: u32) -> Self {
        LineOracle { reader, writer, phi }
    }

    fn request(&mut self, x: &PredictionVector) -> Result<String> {
        let doc = serde_json::to_string(&VectorDoc::from_vector(VectorKind::Custom, x))?;
        writeln!(self.writer, "SCORE {doc}")?;
        self.writer.flush()?;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(Error::Oracle("oracle closed the connection".into()));
        }
        let line = line.trim_end_matches(['\r', '\n']).to_string();
        if let Some(reason) = line.strip_prefix("ERR ") {
            return Err(Error::Oracle(reason.to_string()));
        }
        Ok(line)
    }

    pub fn quit(&mut self) -> Result<()> {
        writeln!(self.writer, "QUIT")?;
        self.writer.flush()?;
        Ok(())
    }
}

impl<R: BufRead, W: Write> ExactOracle for LineOracle<R, W> {
    fn score(&mut self, x: &PredictionVector) -> Result<ExactScore> {
        let line = self.request(x)?;
        let value = line
            .strip_prefix("ESCORE ")
            .ok_or_else(|| Error::Oracle(format!("unexpected reply {line:?}")))?;
        ExactScore::new(parse_rational(value)?, x.len())
    }
}

impl<R: BufRead, W: Write> DecimalOracle for LineOracle<R, W> {
    fn phi(&self) -> u32 {
        self.phi
    }

    fn score(&mut self, x: &PredictionVector) -> Result<DecimalAnswer> {
        let line = self.request(x)?;
        let bad = || Error::Oracle(format!("unexpected reply {line:?}"));
        let parts: Vec<&str> = line.split(' ').collect();
        let [ "LL", ll, "AUC", auc ] = parts[..] else {
            return Err(bad());
        };
        Ok(DecimalAnswer {
            ll: DecimalScore::parse(ll, ScoreKind::LogLoss)?,
            auc: DecimalScore::parse(auc, ScoreKind::Auc)?,
        })
    }
}

/// A curator running as a child process that speaks the protocol on its
/// standard streams.
#[derive(Debug)]
pub struct ProcessOracle {
    child: Child,
    line: LineOracle<BufReader<ChildStdout>, ChildStdin>,
}

impl ProcessOracle {
    pub fn spawn(mut command: Command, phi: u32) -> Result<Self> {
        let mut child = command.stdin(Stdio::piped()).stdout(Stdio::piped()).spawn()?;
        let stdin = child.stdin.take().ok_or_else(|| Error::Io("no child stdin".into()))?;
        let stdout = child.stdout.take().ok_or_else(|| Error::Io("no child stdout".into()))?;
        Ok(ProcessOracle {
            child,
            line: LineOracle::new(BufReader::new(stdout), stdin, phi),
        })
    }

    /// Sends `QUIT` and waits for the child to exit.
    pub fn shutdown(mut self) -> Result<()> {
        self.line.quit()?;
        let status = self.child.wait()?;
        if !status.success() {
            return Err(Error::Oracle(format!("oracle exited with {status}")));
        }
        Ok(())
    }
}

impl ExactOracle for ProcessOracle {
    fn score(&mut self, x: &PredictionVector) -> Result<ExactScore> {
        ExactOracle::score(&mut self.line, x)
    }
}

impl DecimalOracle for ProcessOracle {
    fn phi(&self) -> u32 {
        self.line.phi
    }

    fn score(&mut self, x: &PredictionVector) -> Result<DecimalAnswer> {
        DecimalOracle::score(&mut self.line, x)
    }
}
