//! Little-endian framing shared by the persisted corpus, topic model and
//! sequence model files: an 8-byte magic, a `u32` format version, then a
//! body of fixed-width scalars and length-prefixed UTF-8 strings.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

pub(crate) struct BinWriter<W: Write> {
    inner: W,
}

impl<W: Write> BinWriter<W> {
    pub fn new(inner: W) -> Self {
        BinWriter { inner }
    }

    pub fn header(&mut self, magic: &[u8; 8], version: u32) -> Result<()> {
        self.inner.write_all(magic)?;
        self.u32(version)
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        Ok(self.inner.write_u32::<LittleEndian>(v)?)
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.inner.write_u64::<LittleEndian>(v)?)
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        Ok(self.inner.write_f64::<LittleEndian>(v)?)
    }

    pub fn len(&mut self, n: usize) -> Result<()> {
        let n = u32::try_from(n).map_err(|_| Error::Format(format!("length {n} too large")))?;
        self.u32(n)
    }

    pub fn str(&mut self, s: &str) -> Result<()> {
        self.len(s.len())?;
        Ok(self.inner.write_all(s.as_bytes())?)
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub(crate) struct BinReader<R: Read> {
    inner: R,
}

impl<R: Read> BinReader<R> {
    pub fn new(inner: R) -> Self {
        BinReader { inner }
    }

    /// Checks the magic and returns the stored version, rejecting versions
    /// newer than `max_version`.
    pub fn header(&mut self, magic: &[u8; 8], max_version: u32) -> Result<u32> {
        let mut found = [0u8; 8];
        self.inner
            .read_exact(&mut found)
            .map_err(|_| Error::Format("file too short for header".into()))?;
        if &found != magic {
            return Err(Error::Format(format!(
                "expected magic {:?}, found {:?}",
                String::from_utf8_lossy(magic),
                String::from_utf8_lossy(&found)
            )));
        }
        let version = self.u32()?;
        if version == 0 || version > max_version {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        Ok(version)
    }

    pub fn u32(&mut self) -> Result<u32> {
        self.inner.read_u32::<LittleEndian>().map_err(truncated)
    }

    pub fn u64(&mut self) -> Result<u64> {
        self.inner.read_u64::<LittleEndian>().map_err(truncated)
    }

    pub fn f64(&mut self) -> Result<f64> {
        self.inner.read_f64::<LittleEndian>().map_err(truncated)
    }

    pub fn len(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    pub fn str(&mut self) -> Result<String> {
        let n = self.len()?;
        let mut buf = vec![0u8; n];
        self.inner.read_exact(&mut buf).map_err(truncated)?;
        String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
    }
}

fn truncated(e: std::io::Error) -> Error {
    Error::Format(format!("truncated body: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_and_strings_round_trip() {
        let mut w = BinWriter::new(Vec::new());
        w.header(b"EWTEST\0\0", 1).unwrap();
        w.u32(7).unwrap();
        w.f64(-0.25).unwrap();
        w.str("naïve").unwrap();
        let bytes = w.finish().unwrap();

        let mut r = BinReader::new(bytes.as_slice());
        assert_eq!(r.header(b"EWTEST\0\0", 1).unwrap(), 1);
        assert_eq!(r.u32().unwrap(), 7);
        assert_eq!(r.f64().unwrap(), -0.25);
        assert_eq!(r.str().unwrap(), "naïve");
        assert!(r.u32().is_err());
    }

    #[test]
    fn rejects_wrong_magic_and_future_version() {
        let mut w = BinWriter::new(Vec::new());
        w.header(b"EWTEST\0\0", 3).unwrap();
        let bytes = w.finish().unwrap();
        assert!(BinReader::new(bytes.as_slice())
            .header(b"EWOTHER\0", 3)
            .is_err());
        assert!(BinReader::new(bytes.as_slice())
            .header(b"EWTEST\0\0", 2)
            .is_err());
    }
}
