//! Execution-trace ingestion.
//!
//! A trace log is a sequence of blocks. Each block starts with a header naming
//! the test case that produced it and holds the operation records that follow,
//! up to the next header.

mod capability;
mod record;

pub use capability::{CapabilityMap, CapabilityMapError};
pub use record::{parse_line, OperationRecord, Record, TraceHeader, HEADER_MARKER, OPERATION_MARKER};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: unknown record kind {kind:?}")]
    UnknownRecordKind { line: usize, kind: String },
    #[error("line {line}: operation record before any trace header")]
    RecordBeforeHeader { line: usize },
    #[error("line {line}: eoi {eoi} of trace {trace_id} does not follow previous eoi {previous}")]
    NonMonotonicEoi {
        line: usize,
        trace_id: u64,
        eoi: u32,
        previous: u32,
    },
    #[error("test case id {0:?} does not match Test_<Capability>_<UseCase>")]
    BadTestCaseId(String),
}

/// Records belonging to one test case, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceBlock {
    pub header: TraceHeader,
    /// 1-based line of the header, for diagnostics.
    pub header_line: usize,
    pub records: Vec<OperationRecord>,
}

impl TraceBlock {
    /// Capability named by the header's test case id.
    pub fn capability(&self) -> Result<String, TraceError> {
        extract_capability(&self.header.test_case_id).map(|(cap, _)| cap)
    }

    /// Distinct trace ids in order of first appearance.
    pub fn trace_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = Vec::new();
        for r in &self.records {
            if !ids.contains(&r.trace_id) {
                ids.push(r.trace_id);
            }
        }
        ids
    }

    /// True when records of more than one trace id share this block.
    pub fn is_interleaved(&self) -> bool {
        self.trace_ids().len() > 1
    }

    /// Records split by trace id, each group in file order.
    pub fn traces(&self) -> Vec<(u64, Vec<&OperationRecord>)> {
        self.trace_ids()
            .into_iter()
            .map(|id| (id, self.records.iter().filter(|r| r.trace_id == id).collect()))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceLog {
    pub blocks: Vec<TraceBlock>,
}

impl TraceLog {
    pub fn record_count(&self) -> usize {
        self.blocks.iter().map(|b| b.records.len()).sum()
    }

    /// Number of blocks mixing several trace ids.
    pub fn interleaved_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.is_interleaved()).count()
    }
}

/// Parses a whole log. Blank lines are skipped; LF and CRLF are accepted.
///
/// Within each (block, trace id) the eoi values must strictly increase.
pub fn parse_log(text: &str) -> Result<TraceLog, TraceError> {
    let mut log = TraceLog::default();
    // Last eoi seen per trace id within the current block.
    let mut last_eoi: Vec<(u64, u32)> = Vec::new();

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line, line_no)? {
            Record::Header(header) => {
                last_eoi.clear();
                log.blocks.push(TraceBlock {
                    header,
                    header_line: line_no,
                    records: Vec::new(),
                });
            }
            Record::Operation(op) => {
                let Some(block) = log.blocks.last_mut() else {
                    return Err(TraceError::RecordBeforeHeader { line: line_no });
                };
                match last_eoi.iter_mut().find(|(id, _)| *id == op.trace_id) {
                    Some((_, previous)) => {
                        if op.eoi <= *previous {
                            return Err(TraceError::NonMonotonicEoi {
                                line: line_no,
                                trace_id: op.trace_id,
                                eoi: op.eoi,
                                previous: *previous,
                            });
                        }
                        *previous = op.eoi;
                    }
                    None => last_eoi.push((op.trace_id, op.eoi)),
                }
                block.records.push(op);
            }
        }
    }
    Ok(log)
}

/// Like [`parse_log`], but accepts arbitrary 8-bit input. Bytes that are not
/// valid UTF-8 are read as Latin-1.
pub fn parse_log_bytes(bytes: &[u8]) -> Result<TraceLog, TraceError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_log(text),
        Err(_) => {
            let text: String = bytes.iter().map(|&b| b as char).collect();
            parse_log(&text)
        }
    }
}

/// Splits `Test_<Capability>_<UseCase>` into `(capability, use_case)`.
pub fn extract_capability(test_case_id: &str) -> Result<(String, String), TraceError> {
    let parts: Vec<&str> = test_case_id.split('_').collect();
    match parts.as_slice() {
        ["Test", cap, use_case] if !cap.is_empty() && !use_case.is_empty() => {
            Ok((cap.to_string(), use_case.to_string()))
        }
        _ => Err(TraceError::BadTestCaseId(test_case_id.to_string())),
    }
}
