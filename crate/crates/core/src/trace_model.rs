//! Dynamic call traces: the canonical event format, its parser and a
//! stack-replay validator.
//!
//! A trace file is UTF-8 text with one event per line:
//!
//! ```text
//! <ts>\t<tid>\t<E|X>\t<method>
//! ```
//!
//! `ts` is an integer nanosecond timestamp, `tid` a thread id, `E`/`X` mark
//! method enter and exit. Lines starting with `#` are comments and blank lines
//! are ignored. A JSON-lines variant with the fields `ts`, `tid`, `ev`, `m` is
//! accepted line by line wherever the tab format is.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Fully qualified method identifier, e.g.
/// `com.mycompany.hr.dao.BaseDAO.getConnection()`.
///
/// Never empty and never contains whitespace, so it can sit in the last
/// column of a tab-separated record.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MethodName(String);

impl MethodName {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidMethodName(text));
        }
        Ok(MethodName(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Simple name of the declaring type: `a.b.Foo.bar(x.Y)` gives `Foo`.
    /// Names without a dot before the parameter list are returned whole.
    pub fn declaring_type(&self) -> &str {
        let head = match self.0.find('(') {
            Some(i) => &self.0[..i],
            None => &self.0,
        };
        match head.rfind('.') {
            Some(i) => {
                let owner = &head[..i];
                match owner.rfind('.') {
                    Some(j) => &owner[j + 1..],
                    None => owner,
                }
            }
            None => head,
        }
    }
}

impl TryFrom<String> for MethodName {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        MethodName::new(value)
    }
}

impl From<MethodName> for String {
    fn from(value: MethodName) -> Self {
        value.0
    }
}

impl AsRef<str> for MethodName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    #[serde(rename = "E")]
    Enter,
    #[serde(rename = "X")]
    Exit,
}

impl EventKind {
    pub fn code(self) -> char {
        match self {
            EventKind::Enter => 'E',
            EventKind::Exit => 'X',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceEvent {
    pub ts: u64,
    pub tid: u32,
    #[serde(rename = "ev")]
    pub kind: EventKind,
    #[serde(rename = "m")]
    pub method: MethodName,
}

impl TraceEvent {
    pub fn enter(ts: u64, tid: u32, method: MethodName) -> Self {
        TraceEvent {
            ts,
            tid,
            kind: EventKind::Enter,
            method,
        }
    }

    pub fn exit(ts: u64, tid: u32, method: MethodName) -> Self {
        TraceEvent {
            ts,
            tid,
            kind: EventKind::Exit,
            method,
        }
    }

    /// The event as one JSON-lines record (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace events always serialize")
    }
}

/// Formats the canonical tab-separated record, without the newline.
impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.ts,
            self.tid,
            self.kind.code(),
            self.method
        )
    }
}

/// How defects in a trace are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Any defect aborts.
    #[default]
    Strict,
    /// Defects become warnings; the tree builder repairs what it can.
    Lenient,
}

fn parse_error(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

/// Decodes one line. Returns `Ok(None)` for comments and blank lines.
///
/// `line_no` is only used to label errors.
pub fn parse_trace_line(line_no: usize, line: &str) -> Result<Option<TraceEvent>> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    if line.trim().is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    if line.starts_with('{') {
        return serde_json::from_str(line)
            .map(Some)
            .map_err(|e| parse_error(line_no, format!("bad JSON event: {e}")));
    }

    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(parse_error(
            line_no,
            format!("expected 4 tab-separated fields, found {}", fields.len()),
        ));
    }
    let ts = fields[0]
        .parse::<u64>()
        .map_err(|_| parse_error(line_no, format!("invalid timestamp {:?}", fields[0])))?;
    let tid = fields[1]
        .parse::<u32>()
        .map_err(|_| parse_error(line_no, format!("invalid thread id {:?}", fields[1])))?;
    let kind = match fields[2] {
        "E" => EventKind::Enter,
        "X" => EventKind::Exit,
        other => {
            return Err(parse_error(
                line_no,
                format!("unknown event kind {other:?}"),
            ))
        }
    };
    let method = MethodName::new(fields[3]).map_err(|_| {
        parse_error(
            line_no,
            format!(
                "method name {:?} is empty or contains whitespace",
                fields[3]
            ),
        )
    })?;
    Ok(Some(TraceEvent {
        ts,
        tid,
        kind,
        method,
    }))
}

/// Incremental reader over a line source.
///
/// Checks per-thread timestamp order as it goes: a regression is an error in
/// strict mode and a recorded warning in lenient mode. Memory use is one
/// timestamp per thread, independent of trace length.
pub struct EventStream<R> {
    source: R,
    mode: ParseMode,
    line_no: usize,
    buf: String,
    last_ts: HashMap<u32, u64>,
    warnings: Vec<String>,
    ordering_violations: usize,
}

impl<R: BufRead> EventStream<R> {
    pub fn new(source: R, mode: ParseMode) -> Self {
        EventStream {
            source,
            mode,
            line_no: 0,
            buf: String::new(),
            last_ts: HashMap::new(),
            warnings: Vec::new(),
            ordering_violations: 0,
        }
    }

    /// Next event with its 1-based line number, or `None` at end of input.
    pub fn next_event(&mut self) -> Result<Option<(usize, TraceEvent)>> {
        loop {
            self.buf.clear();
            if self.source.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let line = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
            let line = line.strip_suffix('\r').unwrap_or(line);
            let Some(event) = parse_trace_line(self.line_no, line)? else {
                continue;
            };
            let last = self.last_ts.entry(event.tid).or_insert(event.ts);
            if event.ts < *last {
                self.ordering_violations += 1;
                match self.mode {
                    ParseMode::Strict => {
                        return Err(Error::TimestampRegression {
                            line: self.line_no,
                            tid: event.tid,
                            previous: *last,
                            current: event.ts,
                        })
                    }
                    ParseMode::Lenient => self.warnings.push(format!(
                        "line {}: timestamp regression on tid {} ({} -> {})",
                        self.line_no, event.tid, *last, event.ts
                    )),
                }
            } else {
                *last = event.ts;
            }
            return Ok(Some((self.line_no, event)));
        }
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.warnings)
    }

    pub fn ordering_violations(&self) -> usize {
        self.ordering_violations
    }
}

/// A whole trace, partitioned by thread. File order is kept within each
/// thread; the relative order of events on different threads is dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub threads: BTreeMap<u32, Vec<TraceEvent>>,
    pub warnings: Vec<String>,
}

impl Trace {
    pub fn event_count(&self) -> usize {
        self.threads.values().map(Vec::len).sum()
    }

    pub fn from_events(events: impl IntoIterator<Item = TraceEvent>) -> Self {
        let mut threads: BTreeMap<u32, Vec<TraceEvent>> = BTreeMap::new();
        for event in events {
            threads.entry(event.tid).or_default().push(event);
        }
        Trace {
            threads,
            warnings: Vec::new(),
        }
    }
}

pub fn read_trace<R: BufRead>(source: R, mode: ParseMode) -> Result<Trace> {
    let mut stream = EventStream::new(source, mode);
    let mut threads: BTreeMap<u32, Vec<TraceEvent>> = BTreeMap::new();
    while let Some((_, event)) = stream.next_event()? {
        threads.entry(event.tid).or_default().push(event);
    }
    Ok(Trace {
        threads,
        warnings: stream.take_warnings(),
    })
}

pub fn parse_trace_str(text: &str, mode: ParseMode) -> Result<Trace> {
    read_trace(text.as_bytes(), mode)
}

/// Renders events in the canonical tab-separated format, one per line.
pub fn format_trace<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> String {
    let mut out = String::new();
    for event in events {
        out.push_str(&event.to_string());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceValidationReport {
    pub event_count: usize,
    pub thread_count: usize,
    pub unmatched_enters: BTreeMap<u32, usize>,
    pub orphan_exits: BTreeMap<u32, usize>,
    pub ordering_violations: usize,
}

impl TraceValidationReport {
    pub fn is_well_formed(&self) -> bool {
        self.ordering_violations == 0
            && self.unmatched_enters.values().all(|&n| n == 0)
            && self.orphan_exits.values().all(|&n| n == 0)
    }

    pub fn total_unmatched_enters(&self) -> usize {
        self.unmatched_enters.values().sum()
    }

    pub fn total_orphan_exits(&self) -> usize {
        self.orphan_exits.values().sum()
    }
}

/// Replays a LIFO stack per thread and counts defects.
///
/// An exit that finds an empty stack or a different method on top is an
/// orphan and leaves the stack untouched.
pub fn validate_trace(threads: &BTreeMap<u32, Vec<TraceEvent>>) -> TraceValidationReport {
    let mut report = TraceValidationReport {
        thread_count: threads.len(),
        ..Default::default()
    };
    for (&tid, events) in threads {
        report.event_count += events.len();
        let mut stack: Vec<&MethodName> = Vec::new();
        let mut orphans = 0;
        let mut last_ts = None;
        for event in events {
            if let Some(prev) = last_ts {
                if event.ts < prev {
                    report.ordering_violations += 1;
                }
            }
            last_ts = Some(last_ts.map_or(event.ts, |p: u64| p.max(event.ts)));
            match event.kind {
                EventKind::Enter => stack.push(&event.method),
                EventKind::Exit => {
                    if stack.last() == Some(&&event.method) {
                        stack.pop();
                    } else {
                        orphans += 1;
                    }
                }
            }
        }
        report.unmatched_enters.insert(tid, stack.len());
        report.orphan_exits.insert(tid, orphans);
    }
    report
}

/// `Read` adapter that hashes everything passing through it.
pub struct DigestReader<R> {
    inner: R,
    hasher: Sha256,
}

impl<R: Read> DigestReader<R> {
    pub fn new(inner: R) -> Self {
        DigestReader {
            inner,
            hasher: Sha256::new(),
        }
    }

    /// Hex SHA-256 of the bytes read so far, prefixed `sha256:`.
    pub fn hex_digest(&self) -> String {
        format!("sha256:{}", hex::encode(self.hasher.clone().finalize()))
    }
}

impl<R: Read> Read for DigestReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
