//! On-disk shot record formats.
//!
//! The primary format is line-delimited JSON: a header line carrying the
//! schema version and run metadata, then one [`ShotRecord`] per line. A
//! compact binary format round-trips losslessly with the text format.
//! Both decoders validate records semantically; malformed input yields an
//! error, never a panic.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qec::{CorrectionAction, FinalMeasurement, ShotRecord, SyndromeRecord};

pub const SHOT_SCHEMA: &str = "nvnode-shots";
pub const SHOT_SCHEMA_VERSION: u32 = 1;
pub const BINARY_MAGIC: [u8; 4] = *b"NVQR";
pub const BINARY_VERSION: u8 = 1;

/// First line of a shot record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotFileHeader {
    pub schema: String,
    pub version: u32,
    /// Resolved run configuration, key-sorted for deterministic output.
    pub meta: BTreeMap<String, String>,
}

impl ShotFileHeader {
    pub fn new(meta: BTreeMap<String, String>) -> Self {
        ShotFileHeader { schema: SHOT_SCHEMA.to_string(), version: SHOT_SCHEMA_VERSION, meta }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SHOT_SCHEMA {
            return Err(Error::Parse(format!("unexpected schema {:?}", self.schema)));
        }
        if self.version != SHOT_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {}", self.version)));
        }
        Ok(())
    }
}

/// Decode and validate a single JSONL record line.
pub fn decode_jsonl_line(line: &str) -> Result<ShotRecord> {
    let record: ShotRecord =
        serde_json::from_str(line).map_err(|e| Error::Parse(format!("record line: {e}")))?;
    record.validate()?;
    Ok(record)
}

pub fn write_jsonl<W: Write>(
    writer: &mut W,
    header: &ShotFileHeader,
    records: &[ShotRecord],
) -> Result<()> {
    let header_line =
        serde_json::to_string(header).map_err(|e| Error::Parse(format!("header encode: {e}")))?;
    writeln!(writer, "{header_line}")?;
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::Parse(format!("record encode: {e}")))?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

pub fn write_jsonl_file(
    path: &Path,
    header: &ShotFileHeader,
    records: &[ShotRecord],
) -> Result<()> {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, header, records)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(reader: R) -> Result<(ShotFileHeader, Vec<ShotRecord>)> {
    let mut lines = reader.lines();
    let header_line = loop {
        match lines.next() {
            None => return Err(Error::Parse("empty record file".into())),
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
        }
    };
    let header: ShotFileHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::Parse(format!("record header: {e}")))?;
    header.validate()?;
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(decode_jsonl_line(&line)?);
    }
    Ok((header, records))
}

pub fn read_jsonl_file(path: &Path) -> Result<(ShotFileHeader, Vec<ShotRecord>)> {
    let file = std::fs::File::open(path)?;
    read_jsonl(std::io::BufReader::new(file))
}

fn action_code(action: CorrectionAction) -> u8 {
    match action {
        CorrectionAction::None => 0,
        CorrectionAction::FlipQ1 => 1,
        CorrectionAction::FlipQ2 => 2,
        CorrectionAction::FlipQ3 => 3,
    }
}

fn action_from_code(code: u8) -> CorrectionAction {
    match code {
        1 => CorrectionAction::FlipQ1,
        2 => CorrectionAction::FlipQ2,
        3 => CorrectionAction::FlipQ3,
        _ => CorrectionAction::None,
    }
}

/// Encode records into the compact binary format.
pub fn encode_binary(records: &[ShotRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(8 + records.len() * 8);
    out.extend_from_slice(&BINARY_MAGIC);
    out.push(BINARY_VERSION);
    for record in records {
        record.validate()?;
        let shot = u32::try_from(record.shot)
            .map_err(|_| Error::Parse(format!("shot index {} exceeds u32", record.shot)))?;
        out.extend_from_slice(&shot.to_le_bytes());
        out.push(u8::from(record.heralded));
        if !record.heralded {
            continue;
        }
        let n = u16::try_from(record.syndromes.len())
            .map_err(|_| Error::Parse("too many syndrome rounds".into()))?;
        out.extend_from_slice(&n.to_le_bytes());
        for s in &record.syndromes {
            out.extend_from_slice(&s.round.to_le_bytes());
            let packed = u8::from(s.ziz == 1)
                | (u8::from(s.izz == 1) << 1)
                | (action_code(s.action) << 2)
                | (u8::from(s.feedback_applied) << 4);
            out.push(packed);
        }
        let f = record.final_state.as_ref().expect("validated heralded record has final state");
        out.push(f.outcome);
        let parity = u8::from(f.ziz == 1)
            | (u8::from(f.izz == 1) << 1)
            | (u8::from(f.zii == 1) << 2)
            | (u8::from(f.zp == 1) << 3);
        out.push(parity);
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Parse("truncated binary record stream".into()));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Decode the compact binary format, validating every record. Accepts only
/// canonical encodings (reserved bits zero), so a successful decode
/// re-encodes to the identical byte string.
pub fn decode_binary(bytes: &[u8]) -> Result<Vec<ShotRecord>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.take(4)?;
    if magic != BINARY_MAGIC {
        return Err(Error::Parse("bad magic bytes".into()));
    }
    let version = cur.u8()?;
    if version != BINARY_VERSION {
        return Err(Error::Parse(format!("unsupported binary version {version}")));
    }
    let sign = |b: bool| if b { 1i8 } else { -1i8 };
    let mut records = Vec::new();
    while cur.pos < bytes.len() {
        let shot = cur.u32()? as u64;
        let flags = cur.u8()?;
        if flags > 1 {
            return Err(Error::Parse(format!("reserved flag bits set: {flags:#x}")));
        }
        if flags == 0 {
            let record = ShotRecord { shot, heralded: false, syndromes: vec![], final_state: None };
            records.push(record);
            continue;
        }
        let n = cur.u16()? as usize;
        let mut syndromes = Vec::with_capacity(n);
        for _ in 0..n {
            let round = cur.u16()?;
            let packed = cur.u8()?;
            if packed & 0xe0 != 0 {
                return Err(Error::Parse("reserved syndrome bits set".into()));
            }
            syndromes.push(SyndromeRecord {
                round,
                ziz: sign(packed & 1 != 0),
                izz: sign(packed & 2 != 0),
                action: action_from_code((packed >> 2) & 3),
                feedback_applied: packed & 16 != 0,
            });
        }
        let outcome = cur.u8()?;
        let parity = cur.u8()?;
        if parity & 0xf0 != 0 {
            return Err(Error::Parse("reserved parity bits set".into()));
        }
        let final_state = FinalMeasurement {
            outcome,
            ziz: sign(parity & 1 != 0),
            izz: sign(parity & 2 != 0),
            zii: sign(parity & 4 != 0),
            zp: sign(parity & 8 != 0),
        };
        let record = ShotRecord { shot, heralded: true, syndromes, final_state: Some(final_state) };
        record.validate()?;
        records.push(record);
    }
    Ok(records)
}
