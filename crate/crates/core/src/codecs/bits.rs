use crate::error::{LabError, Result};

/// A packed, MSB-first bit buffer with an exact bit length.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitStream {
    bytes: Vec<u8>,
    len_bits: u64,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps `bytes`, of which the first `len_bits` bits are meaningful.
    pub fn from_bytes(bytes: Vec<u8>, len_bits: u64) -> Result<Self> {
        if len_bits.div_ceil(8) != bytes.len() as u64 {
            return Err(LabError::Corrupt(format!("{} bytes cannot hold exactly {len_bits} bits", bytes.len())));
        }
        Ok(Self { bytes, len_bits })
    }

    pub fn len_bits(&self) -> u64 {
        self.len_bits
    }

    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    /// Backing bytes; bits past `len_bits` in the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn push_bit(&mut self, bit: bool) {
        let offset = (self.len_bits % 8) as u32;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len_bits += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    #[inline]
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for k in (0..width).rev() {
            self.push_bit((value >> k) & 1 == 1);
        }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { stream: self, pos: 0 }
    }

    /// Renders the bits as a `0`/`1` string.
    pub fn to_bit_string(&self) -> String {
        let mut r = self.reader();
        (0..self.len_bits).map(|_| if r.read_bit().unwrap() { '1' } else { '0' }).collect()
    }
}

/// Sequential reader over a [`BitStream`].
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    stream: &'a BitStream,
    pos: u64,
}

impl BitReader<'_> {
    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.stream.len_bits - self.pos
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.stream.len_bits {
            return Err(LabError::Corrupt("read past the end of the bit stream".into()));
        }
        let byte = self.stream.bytes[(self.pos / 8) as usize];
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    #[inline]
    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        if self.remaining() < width as u64 {
            return Err(LabError::Corrupt("read past the end of the bit stream".into()));
        }
        let mut v = 0;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_read_back() {
        let mut s = BitStream::new();
        s.push_bits(0b101, 3);
        s.push_bit(true);
        s.push_bits(0xdead_beef, 32);
        s.push_bits(0, 0);
        assert_eq!(s.len_bits(), 36);
        assert_eq!(s.as_bytes().len(), 5);
        let mut r = s.reader();
        assert_eq!(r.read_bits(3).unwrap(), 0b101);
        assert!(r.read_bit().unwrap());
        assert_eq!(r.read_bits(32).unwrap(), 0xdead_beef);
        assert!(r.read_bit().is_err());
    }

    #[test]
    fn msb_first_layout() {
        let mut s = BitStream::new();
        s.push_bits(0b1100_0001_1, 9);
        assert_eq!(s.as_bytes(), &[0b1100_0001, 0b1000_0000]);
        assert_eq!(s.to_bit_string(), "110000011");
    }

    #[test]
    fn from_bytes_checks_length() {
        assert!(BitStream::from_bytes(vec![0, 0], 17).is_err());
        assert!(BitStream::from_bytes(vec![0, 0], 9).is_ok());
    }
}
