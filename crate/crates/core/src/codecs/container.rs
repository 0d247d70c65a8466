//! Compressed-file format.
//!
//! A 40-byte header followed by the payload bits, zero-padded to a whole
//! byte at the end only:
//!
//! | bytes  | field                                   |
//! |--------|-----------------------------------------|
//! | 0..4   | magic `LZLB`                            |
//! | 4      | format version (1)                      |
//! | 5      | codec id: 1 FDFS-LZ, 2 FSLZ, 3 SWLZ     |
//! | 6..8   | alphabet size, u16 little endian        |
//! | 8..16  | input length `N`, u64 LE                |
//! | 16..24 | window or database size `n_w`, u64 LE   |
//! | 24..32 | block length `L_o` (0 for SWLZ), u64 LE |
//! | 32..40 | payload length in bits, u64 LE          |
//!
//! An FDFS-LZ file does not carry its database; the decoder is given it.

use super::{BitStream, Codec};
use crate::error::{LabError, Result};

pub const MAGIC: &[u8; 4] = b"LZLB";
pub const VERSION: u8 = 1;
pub const HEADER_BYTES: usize = 40;
pub const HEADER_BITS: u64 = HEADER_BYTES as u64 * 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub codec: Codec,
    pub alphabet_size: u16,
    pub n: u64,
    pub n_w: u64,
    pub l_o: u64,
    pub payload_bits: u64,
}

pub fn to_bytes(header: &Header, payload: &BitStream) -> Result<Vec<u8>> {
    if header.payload_bits != payload.len_bits() {
        return Err(LabError::Invariant(format!(
            "header declares {} payload bits, stream holds {}",
            header.payload_bits,
            payload.len_bits()
        )));
    }
    let mut out = Vec::with_capacity(HEADER_BYTES + payload.as_bytes().len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(header.codec.id());
    out.extend_from_slice(&header.alphabet_size.to_le_bytes());
    for v in [header.n, header.n_w, header.l_o, header.payload_bits] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(payload.as_bytes());
    Ok(out)
}

pub fn from_bytes(bytes: &[u8]) -> Result<(Header, BitStream)> {
    if bytes.len() < HEADER_BYTES {
        return Err(LabError::Corrupt(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(LabError::Corrupt("missing LZLB magic".into()));
    }
    if bytes[4] != VERSION {
        return Err(LabError::Corrupt(format!("unsupported format version {}", bytes[4])));
    }
    let codec = Codec::from_id(bytes[5])?;
    let alphabet_size = u16::from_le_bytes([bytes[6], bytes[7]]);
    let word = |k: usize| u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap());
    let header = Header { codec, alphabet_size, n: word(0), n_w: word(1), l_o: word(2), payload_bits: word(3) };
    if alphabet_size == 0 || alphabet_size > 256 {
        return Err(LabError::Corrupt(format!("alphabet size {alphabet_size} outside 1..=256")));
    }
    let payload = BitStream::from_bytes(bytes[HEADER_BYTES..].to_vec(), header.payload_bits)?;
    Ok((header, payload))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_layout() {
        let mut payload = BitStream::new();
        payload.push_bits(0b1011, 4);
        let header = Header { codec: Codec::Swlz, alphabet_size: 2, n: 100, n_w: 16, l_o: 0, payload_bits: 4 };
        let bytes = to_bytes(&header, &payload).unwrap();
        assert_eq!(bytes.len(), 41);
        assert_eq!(&bytes[..8], &[b'L', b'Z', b'L', b'B', 1, 3, 2, 0]);
        assert_eq!(bytes[40], 0b1011_0000);
        assert_eq!(from_bytes(&bytes).unwrap(), (header, payload));
    }

    #[test]
    fn rejects_damage() {
        let header = Header { codec: Codec::Fslz, alphabet_size: 2, n: 1, n_w: 1, l_o: 1, payload_bits: 9 };
        let mut payload = BitStream::new();
        payload.push_bits(0, 9);
        let bytes = to_bytes(&header, &payload).unwrap();
        assert!(from_bytes(&bytes[..41]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(from_bytes(&bad).is_err());
        bad = bytes;
        bad[5] = 9;
        assert!(from_bytes(&bad).is_err());
    }
}
