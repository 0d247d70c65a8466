//! Elias-gamma integer code.

use super::bits::{BitReader, BitStream};
use crate::error::{LabError, Result};

/// Length of the gamma code of `l`: `2⌊log2 l⌋ + 1`.
pub fn gamma_len(l: u64) -> u32 {
    debug_assert!(l >= 1);
    2 * (63 - l.leading_zeros()) + 1
}

/// Writes `⌊log2 l⌋` zeros followed by the binary form of `l`.
pub fn write_gamma(out: &mut BitStream, l: u64) -> Result<()> {
    if l == 0 {
        return Err(LabError::InvalidArgument("the integer code needs L >= 1".into()));
    }
    let bits = 64 - l.leading_zeros();
    out.push_bits(0, bits - 1);
    out.push_bits(l, bits);
    Ok(())
}

pub fn read_gamma(r: &mut BitReader<'_>) -> Result<u64> {
    let mut zeros = 0;
    while !r.read_bit()? {
        zeros += 1;
        if zeros > 63 {
            return Err(LabError::Corrupt("gamma code longer than 64 bits".into()));
        }
    }
    Ok((1 << zeros) | r.read_bits(zeros)?)
}

/// The gamma code of `l` as a standalone stream.
pub fn int_code_encode(l: u64) -> Result<BitStream> {
    let mut out = BitStream::new();
    write_gamma(&mut out, l)?;
    Ok(out)
}

/// Decodes a stream holding exactly one gamma code word.
pub fn int_code_decode(bits: &BitStream) -> Result<u64> {
    let mut r = bits.reader();
    let l = read_gamma(&mut r)?;
    if r.remaining() != 0 {
        return Err(LabError::Corrupt(format!("{} bits left after the code word", r.remaining())));
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_code_words() {
        assert_eq!(int_code_encode(1).unwrap().to_bit_string(), "1");
        assert_eq!(int_code_encode(5).unwrap().to_bit_string(), "00101");
        assert_eq!(int_code_encode(8).unwrap().to_bit_string(), "0001000");
        assert!(int_code_encode(0).is_err());
    }

    #[test]
    fn exhaustive_round_trip() {
        for l in 1..=(1u64 << 16) {
            let s = int_code_encode(l).unwrap();
            assert_eq!(s.len_bits(), gamma_len(l) as u64);
            assert_eq!(int_code_decode(&s).unwrap(), l);
        }
    }

    #[test]
    fn extreme_values() {
        for l in [u64::MAX, 1 << 63, (1 << 40) + 17] {
            assert_eq!(int_code_decode(&int_code_encode(l).unwrap()).unwrap(), l);
        }
        assert_eq!(gamma_len(u64::MAX), 127);
    }

    #[test]
    fn truncated_stream_is_corrupt() {
        let s = BitStream::from_bytes(vec![0b0001_0000], 5).unwrap();
        assert!(int_code_decode(&s).is_err());
    }
}
