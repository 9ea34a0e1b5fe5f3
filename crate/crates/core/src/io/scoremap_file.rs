//! `CSM1` score-map files: magic, little-endian `u32` width and height, then
//! `width * height` little-endian `f32` values in row-major order.

use std::path::Path;

use crate::scoremap::ScoreMap;

use super::{read_bytes, write_bytes, IoError};

pub const CSM_MAGIC: &[u8; 4] = b"CSM1";
const HEADER: usize = 12;

pub fn encode_score_map(map: &ScoreMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + 4 * map.values().len());
    out.extend_from_slice(CSM_MAGIC);
    out.extend_from_slice(&(map.width() as u32).to_le_bytes());
    out.extend_from_slice(&(map.height() as u32).to_le_bytes());
    for v in map.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses a `CSM1` buffer. The error string names the first problem found.
pub fn decode_score_map(bytes: &[u8]) -> Result<ScoreMap, String> {
    if bytes.len() < HEADER {
        return Err(format!("file too short ({} bytes)", bytes.len()));
    }
    if &bytes[..4] != CSM_MAGIC {
        return Err("bad magic, expected CSM1".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4-byte slice"));
    let (w, h) = (word(4) as usize, word(8) as usize);
    let expected = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(HEADER))
        .ok_or_else(|| format!("dimensions {w}x{h} overflow"))?;
    if bytes.len() != expected {
        return Err(format!(
            "size {} does not match {w}x{h} (expected {expected})",
            bytes.len()
        ));
    }
    let values: Vec<f32> = bytes[HEADER..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")))
        .collect();
    ScoreMap::from_vec(w, h, values).map_err(|e| e.to_string())
}

pub fn write_score_map(path: &Path, map: &ScoreMap) -> Result<(), IoError> {
    write_bytes(path, &encode_score_map(map))
}

pub fn read_score_map(path: &Path) -> Result<ScoreMap, IoError> {
    decode_score_map(&read_bytes(path)?).map_err(|m| IoError::malformed(path, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let m = ScoreMap::from_vec(2, 1, vec![0.25, 1.0]).unwrap();
        let b = encode_score_map(&m);
        assert_eq!(b.len(), 12 + 8);
        assert_eq!(&b[..4], b"CSM1");
        assert_eq!(&b[4..12], &[2, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&b[12..16], &0.25f32.to_le_bytes());
        assert_eq!(decode_score_map(&b).unwrap(), m);
    }

    #[test]
    fn rejects_bad_files() {
        let m = ScoreMap::new(3, 2).unwrap();
        let mut b = encode_score_map(&m);
        assert!(decode_score_map(&b[..11]).is_err());
        assert!(decode_score_map(&b[..b.len() - 1]).is_err());
        b[12..16].copy_from_slice(&1.5f32.to_le_bytes());
        assert!(decode_score_map(&b).is_err());
        b[0] = b'X';
        assert!(decode_score_map(&b).unwrap_err().contains("magic"));
    }
}
