//! Single-line trace records.
//!
//! Two record kinds are understood, both `;`-separated:
//!
//! ```text
//! $2;<timestamp>;<test_case_id>
//! $1;<logging_ts>;<signature>;<session>;<trace_id>;<tin>;<tout>;<host>;<eoi>;<ess>
//! ```
//!
//! Numeric fields must be canonical unsigned decimals (no sign, no leading
//! zeros) so that [`Record`]'s `Display` output reproduces the input line.

use std::fmt;

use super::TraceError;

pub const OPERATION_MARKER: &str = "$1";
pub const HEADER_MARKER: &str = "$2";

const HEADER_FIELDS: usize = 3;
const OPERATION_FIELDS: usize = 10;

/// Start of the trace produced by one test case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceHeader {
    pub timestamp: u64,
    pub test_case_id: String,
}

/// One method execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationRecord {
    pub logging_timestamp: u64,
    /// `Class.method(paramTypes)`; the method identity used everywhere downstream.
    pub operation_signature: String,
    /// Kept verbatim, including the `<no-session-id>` placeholder.
    pub session_id: String,
    pub trace_id: u64,
    pub tin: u64,
    pub tout: u64,
    pub hostname: String,
    /// Execution order index.
    pub eoi: u32,
    /// Execution stack size (call depth).
    pub ess: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Header(TraceHeader),
    Operation(OperationRecord),
}

/// Parses one line. `line_no` is only used for error context.
pub fn parse_line(line: &str, line_no: usize) -> Result<Record, TraceError> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let fields: Vec<&str> = line.split(';').collect();
    match fields[0] {
        HEADER_MARKER => parse_header(&fields, line_no).map(Record::Header),
        OPERATION_MARKER => parse_operation(&fields, line_no).map(Record::Operation),
        other => Err(TraceError::UnknownRecordKind {
            line: line_no,
            kind: other.to_string(),
        }),
    }
}

fn parse_header(fields: &[&str], line_no: usize) -> Result<TraceHeader, TraceError> {
    expect_field_count(fields, HEADER_FIELDS, line_no)?;
    Ok(TraceHeader {
        timestamp: parse_uint(fields[1], "timestamp", line_no)?,
        test_case_id: non_empty(fields[2], "test_case_id", line_no)?,
    })
}

fn parse_operation(fields: &[&str], line_no: usize) -> Result<OperationRecord, TraceError> {
    expect_field_count(fields, OPERATION_FIELDS, line_no)?;
    let record = OperationRecord {
        logging_timestamp: parse_uint(fields[1], "logging_timestamp", line_no)?,
        operation_signature: non_empty(fields[2], "operation_signature", line_no)?,
        session_id: fields[3].to_string(),
        trace_id: parse_uint(fields[4], "trace_id", line_no)?,
        tin: parse_uint(fields[5], "tin", line_no)?,
        tout: parse_uint(fields[6], "tout", line_no)?,
        hostname: fields[7].to_string(),
        eoi: parse_uint(fields[8], "eoi", line_no)?,
        ess: parse_uint(fields[9], "ess", line_no)?,
    };
    if record.tin > record.tout {
        return Err(malformed(
            line_no,
            format!("tin {} is after tout {}", record.tin, record.tout),
        ));
    }
    Ok(record)
}

fn expect_field_count(fields: &[&str], expected: usize, line_no: usize) -> Result<(), TraceError> {
    if fields.len() != expected {
        return Err(malformed(
            line_no,
            format!("expected {expected} fields, found {}", fields.len()),
        ));
    }
    Ok(())
}

fn non_empty(field: &str, name: &str, line_no: usize) -> Result<String, TraceError> {
    if field.is_empty() {
        return Err(malformed(line_no, format!("{name} is empty")));
    }
    Ok(field.to_string())
}

fn parse_uint<T: std::str::FromStr>(field: &str, name: &str, line_no: usize) -> Result<T, TraceError> {
    let canonical = !field.is_empty()
        && field.bytes().all(|b| b.is_ascii_digit())
        && (field.len() == 1 || !field.starts_with('0'));
    if !canonical {
        return Err(malformed(line_no, format!("{name} {field:?} is not an unsigned integer")));
    }
    field
        .parse()
        .map_err(|_| malformed(line_no, format!("{name} {field:?} is out of range")))
}

fn malformed(line: usize, reason: String) -> TraceError {
    TraceError::MalformedRecord { line, reason }
}

impl fmt::Display for TraceHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{HEADER_MARKER};{};{}", self.timestamp, self.test_case_id)
    }
}

impl fmt::Display for OperationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{OPERATION_MARKER};{};{};{};{};{};{};{};{};{}",
            self.logging_timestamp,
            self.operation_signature,
            self.session_id,
            self.trace_id,
            self.tin,
            self.tout,
            self.hostname,
            self.eoi,
            self.ess
        )
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Record::Header(h) => h.fmt(f),
            Record::Operation(op) => op.fmt(f),
        }
    }
}
