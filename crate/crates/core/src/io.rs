//! Binary relation files.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! "DQO1"            4 bytes magic
//! n_rows            u64
//! payload flag      u8, 0 or 1
//! keys              n_rows × u32
//! payloads          n_rows × u64, only when the flag is 1
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::data::Relation;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"DQO1";
const HEADER_LEN: u64 = 4 + 8 + 1;

pub fn encode_relation(rel: &Relation) -> Vec<u8> {
    let n = rel.n_rows();
    let payload = rel.payload();
    let mut buf = Vec::with_capacity(HEADER_LEN as usize + n * 4 + payload.map_or(0, |_| n * 8));
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.push(payload.is_some() as u8);
    for k in rel.keys() {
        buf.extend_from_slice(&k.to_le_bytes());
    }
    if let Some(p) = payload {
        for v in p {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

pub fn decode_relation(bytes: &[u8]) -> Result<Relation> {
    if bytes.len() < 4 {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            found: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().expect("4-byte slice");
    if magic != MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    if (bytes.len() as u64) < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            found: bytes.len() as u64,
        });
    }
    let n_rows = u64::from_le_bytes(bytes[4..12].try_into().expect("8-byte slice"));
    let has_payload = match bytes[12] {
        0 => false,
        1 => true,
        other => return Err(Error::BadPayloadFlag(other)),
    };
    let row_width: u64 = if has_payload { 12 } else { 4 };
    let expected = n_rows
        .checked_mul(row_width)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::InvalidRelation(format!("row count {n_rows} overflows")))?;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(Error::Truncated { expected, found });
    }
    if found > expected {
        return Err(Error::LengthMismatch {
            n_rows,
            trailing: found - expected,
        });
    }

    let n = n_rows as usize;
    let body = &bytes[HEADER_LEN as usize..];
    let (key_bytes, payload_bytes) = body.split_at(n * 4);
    let key = key_bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4-byte chunk")))
        .collect();
    let payload = has_payload.then(|| {
        payload_bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect()
    });
    Relation::new(key, payload)
}

pub fn write_relation(rel: &Relation, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_relation(rel))?;
    file.flush()?;
    Ok(())
}

pub fn read_relation(path: impl AsRef<Path>) -> Result<Relation> {
    decode_relation(&fs::read(path)?)
}
