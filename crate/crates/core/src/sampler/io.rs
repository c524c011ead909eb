//! On-disk sample formats.
//!
//! Text: a header line `p n`, then `n` lines of `p` whitespace-separated
//! tokens `+1` / `-1`.
//!
//! Binary: magic `ISNG`, little-endian `u32` p, little-endian `u64` n, then
//! `ceil(n * p / 8)` bytes holding the row-major spins as bits, least
//! significant bit first within each byte; a set bit means `+1`.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use super::SampleSet;
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"ISNG";

impl SampleSet {
    pub fn write_text(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{} {}", self.p, self.n)?;
        let mut line = String::with_capacity(3 * self.p);
        for row in self.rows() {
            line.clear();
            for (i, &s) in row.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(if s > 0 { "+1" } else { "-1" });
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn read_text(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::input("empty sample file"))??;
        let mut fields = header.split_whitespace().map(str::parse::<usize>);
        let (p, n) = match (fields.next(), fields.next(), fields.next()) {
            (Some(Ok(p)), Some(Ok(n)), None) => (p, n),
            _ => {
                return Err(Error::input(format!(
                    "bad sample header {header:?}, expected `p n`"
                )))
            }
        };
        let mut data = Vec::with_capacity(n.saturating_mul(p).min(1 << 30));
        let mut rows = 0;
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let before = data.len();
            for tok in line.split_whitespace() {
                data.push(match tok {
                    "+1" | "1" => 1,
                    "-1" => -1,
                    other => {
                        return Err(Error::input(format!(
                            "line {}: bad spin token {other:?}",
                            lineno + 2
                        )))
                    }
                });
            }
            if data.len() - before != p {
                return Err(Error::input(format!(
                    "line {}: expected {p} spins",
                    lineno + 2
                )));
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::input(format!(
                "header declares {n} samples, found {rows}"
            )));
        }
        SampleSet::new(p, n, data)
    }

    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        let p = u32::try_from(self.p).map_err(|_| Error::input("p does not fit in u32"))?;
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&p.to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        let mut bytes = vec![0u8; self.data.len().div_ceil(8)];
        for (k, &s) in self.data.iter().enumerate() {
            if s > 0 {
                bytes[k / 8] |= 1 << (k % 8);
            }
        }
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)
            .map_err(|_| Error::input("truncated binary sample header"))?;
        if &header[..4] != BINARY_MAGIC {
            return Err(Error::input("missing ISNG magic"));
        }
        let p = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
        let total = n
            .checked_mul(p)
            .ok_or_else(|| Error::input("sample dimensions overflow"))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != total.div_ceil(8) {
            return Err(Error::input(format!(
                "binary payload has {} bytes, expected {}",
                bytes.len(),
                total.div_ceil(8)
            )));
        }
        let data = (0..total)
            .map(|k| {
                if bytes[k / 8] >> (k % 8) & 1 == 1 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        SampleSet::new(p, n, data)
    }

    /// Writes binary when the extension is `.bin`, text otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        if is_binary_path(path) {
            self.write_binary(file)
        } else {
            self.write_text(file)
        }
    }

    /// Sniffs the magic bytes, so either format loads regardless of extension.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(BINARY_MAGIC) {
            Self::read_binary(bytes.as_slice())
        } else {
            Self::read_text(bytes.as_slice())
        }
    }
}

fn is_binary_path(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("bin"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_samples() -> impl Strategy<Value = SampleSet> {
        (1usize..20, 1usize..40).prop_flat_map(|(p, n)| {
            proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n * p)
                .prop_map(move |data| SampleSet::new(p, n, data).unwrap())
        })
    }

    proptest! {
        #[test]
        fn text_and_binary_round_trip(s in arb_samples()) {
            let mut text = Vec::new();
            s.write_text(&mut text).unwrap();
            let from_text = SampleSet::read_text(text.as_slice()).unwrap();
            prop_assert_eq!(&from_text, &s);

            let mut bin = Vec::new();
            from_text.write_binary(&mut bin).unwrap();
            prop_assert_eq!(bin.len(), 16 + (s.n() * s.p()).div_ceil(8));
            let from_bin = SampleSet::read_binary(bin.as_slice()).unwrap();
            prop_assert_eq!(&from_bin, &s);

            let mut text_again = Vec::new();
            from_bin.write_text(&mut text_again).unwrap();
            prop_assert_eq!(text, text_again);
        }
    }

    #[test]
    fn binary_layout() {
        let s = SampleSet::from_rows(&[vec![1, -1, 1], vec![-1, -1, 1], vec![1, 1, 1]]).unwrap();
        let mut bin = Vec::new();
        s.write_binary(&mut bin).unwrap();
        assert_eq!(&bin[..4], b"ISNG");
        assert_eq!(&bin[4..8], &3u32.to_le_bytes());
        assert_eq!(&bin[8..16], &3u64.to_le_bytes());
        // Bits 0..9 = 1 0 1 | 0 0 1 | 1 1 1
        assert_eq!(&bin[16..], &[0b1110_0101, 0b0000_0001]);
    }

    #[test]
    fn text_layout_and_errors() {
        let s = SampleSet::from_rows(&[vec![1, -1], vec![-1, 1]]).unwrap();
        let mut text = Vec::new();
        s.write_text(&mut text).unwrap();
        assert_eq!(String::from_utf8(text).unwrap(), "2 2\n+1 -1\n-1 +1\n");
        assert!(SampleSet::read_text("2 2\n+1 -1\n".as_bytes()).is_err());
        assert!(SampleSet::read_text("2 1\n+1 0\n".as_bytes()).is_err());
        assert!(SampleSet::read_text("2\n+1 -1\n".as_bytes()).is_err());
        assert!(SampleSet::read_binary(&b"NOPE0000000000000000"[..]).is_err());
    }
}
