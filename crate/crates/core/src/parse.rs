//! Compact record expressions.
//!
//! Grammar (whitespace ignored everywhere):
//!
//! ```text
//! Record := Term+
//! Term   := ('B' | 'W' | '[' Record ']') ('^' positive-integer)?
//! ```
//!
//! `"[WWBB]^2"` expands to `WWBBWWBB`, `"B^3W"` to `BBBW`. Errors carry the
//! byte offset of the offending input.

use crate::error::Error;
use crate::record::{Color, ColorRecord};
use crate::Result;

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    /// Term+ until end of input or a closing bracket.
    fn record(&mut self, out: &mut Vec<Color>) -> Result<()> {
        let mut terms = 0usize;
        while let Some(b) = self.peek() {
            if b == b']' {
                break;
            }
            self.term(out)?;
            terms += 1;
        }
        if terms == 0 {
            return Err(self.err("expected 'B', 'W' or '['"));
        }
        Ok(())
    }

    fn term(&mut self, out: &mut Vec<Color>) -> Result<()> {
        let start = out.len();
        match self.peek() {
            Some(b'B') => {
                out.push(Color::B);
                self.pos += 1;
            }
            Some(b'W') => {
                out.push(Color::W);
                self.pos += 1;
            }
            Some(b'[') => {
                let open = self.pos;
                self.pos += 1;
                if self.peek() == Some(b']') {
                    return Err(Error::Parse {
                        offset: open,
                        message: "empty group".to_string(),
                    });
                }
                self.record(out)?;
                match self.peek() {
                    Some(b']') => self.pos += 1,
                    _ => return Err(self.err("expected ']'")),
                }
            }
            Some(_) => return Err(self.err("expected 'B', 'W' or '['")),
            None => return Err(self.err("unexpected end of input")),
        }
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let count = self.count()?;
            let unit = out[start..].to_vec();
            for _ in 1..count {
                out.extend_from_slice(&unit);
            }
        }
        Ok(())
    }

    fn count(&mut self) -> Result<usize> {
        self.skip_ws();
        let digits_start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.err("expected repetition count after '^'"));
        }
        let text = std::str::from_utf8(&self.bytes[digits_start..self.pos]).expect("ascii digits");
        let count: usize = text.parse().map_err(|_| Error::Parse {
            offset: digits_start,
            message: "repetition count too large".to_string(),
        })?;
        if count == 0 {
            return Err(Error::Parse {
                offset: digits_start,
                message: "zero repetition".to_string(),
            });
        }
        Ok(count)
    }
}

/// Parse a compact record expression into the expanded record.
pub fn parse_record_expression(text: &str) -> Result<ColorRecord> {
    let mut parser = Parser::new(text);
    if parser.peek().is_none() {
        // no symbols at all: the empty record
        return Ok(ColorRecord::empty());
    }
    let mut out = Vec::new();
    parser.record(&mut out)?;
    if parser.peek().is_some() {
        return Err(parser.err("expected 'B', 'W' or '['"));
    }
    Ok(ColorRecord::new(out))
}

/// Render a record as an expression that parses back to it. Single-color
/// runs of length ≥ 8 come out run-length compressed (`B^12`), everything
/// else literal.
pub fn render(record: &ColorRecord) -> String {
    let symbols = record.symbols();
    let mut out = String::new();
    let mut i = 0;
    while i < symbols.len() {
        let c = symbols[i];
        let mut j = i + 1;
        while j < symbols.len() && symbols[j] == c {
            j += 1;
        }
        let run = j - i;
        if run >= 8 {
            out.push(c.as_char());
            out.push('^');
            out.push_str(&run.to_string());
        } else {
            for _ in 0..run {
                out.push(c.as_char());
            }
        }
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(s: &str) -> String {
        parse_record_expression(s)
            .unwrap()
            .symbols()
            .iter()
            .map(|c| c.as_char())
            .collect()
    }

    #[test]
    fn expands_examples() {
        assert_eq!(expand("[WWBB]^2"), "WWBBWWBB");
        assert_eq!(expand("B^3W"), "BBBW");
        assert_eq!(expand("[WB]^2[BW]^2"), "WBWBBWBW");
        assert_eq!(expand(" B ^ 2  [ W B ] ^ 2 "), "BBWBWB");
        assert_eq!(expand("[[WB]^2]^3"), "WBWBWBWBWBWB");
    }

    #[test]
    fn empty_group_is_an_error() {
        let err = parse_record_expression("[]^2").unwrap_err();
        match err {
            Error::Parse { offset, message } => {
                assert_eq!(offset, 0);
                assert_eq!(message, "empty group");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_repetition_is_an_error() {
        let err = parse_record_expression("B^0").unwrap_err();
        match err {
            Error::Parse { message, .. } => assert_eq!(message, "zero repetition"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn reports_byte_offsets() {
        let err = parse_record_expression("BWX").unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_record_expression("[BW").unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_input_parses_to_empty_record() {
        assert_eq!(parse_record_expression("").unwrap().len(), 0);
        assert_eq!(parse_record_expression("  ").unwrap().len(), 0);
    }

    #[test]
    fn render_compresses_long_runs() {
        let r: ColorRecord = "B^12WB".parse().unwrap();
        assert_eq!(render(&r), "B^12WB");
        let r: ColorRecord = "BBBWWW".parse().unwrap();
        assert_eq!(render(&r), "BBBWWW");
    }

    #[test]
    fn parse_render_round_trip() {
        for s in ["", "B", "W^9", "[WWBB]^4WBB", "BWBWBWBW", "B^8W^8B"] {
            let r: ColorRecord = s.parse().unwrap();
            let back = parse_record_expression(&render(&r)).unwrap();
            assert_eq!(r, back);
        }
    }
}
