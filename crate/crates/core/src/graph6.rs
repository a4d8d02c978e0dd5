//! graph6 encoding: a size prefix followed by the upper adjacency triangle
//! read column by column, six bits per printable byte with bias 63.
//!
//! Sizes up to 62 use the one-byte prefix. The four-byte prefix is accepted
//! and emitted only for the 63 and 64 vertex graphs a [`Graph`] can hold;
//! larger sizes and the eight-byte prefix are rejected.

use std::io::{self, BufRead};

use thiserror::Error;

use crate::graph::{Graph, MAX_VERTICES};

pub const HEADER: &str = ">>graph6<<";

const BIAS: u8 = 63;
const SHORT_FORM_MAX: usize = 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("byte {byte:#04x} at offset {offset} is outside the graph6 range 63..=126")]
    InvalidByte { offset: usize, byte: u8 },
    #[error("graph6 size prefix encodes {n} vertices; at most {MAX_VERTICES} are supported")]
    TooLarge { n: usize },
    #[error("eight-byte graph6 size prefix is not supported")]
    ExtendedSize,
    #[error("graph6 string has zero vertices")]
    ZeroVertices,
    #[error("graph6 body has {found} bytes, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("nonzero padding bits in final graph6 byte")]
    NonzeroPadding,
}

/// Parse tolerance for the final-byte padding bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Ignore padding bits.
    #[default]
    Tolerant,
    /// Reject nonzero padding bits.
    Strict,
}

/// Parses one graph6 line, tolerating nonzero padding.
pub fn parse_graph6(line: &str) -> Result<Graph, Graph6Error> {
    parse_graph6_with(line, Padding::Tolerant)
}

pub fn parse_graph6_with(line: &str, padding: Padding) -> Result<Graph, Graph6Error> {
    let text = line.trim_end_matches(['\n', '\r']);
    let text = text.strip_prefix(HEADER).unwrap_or(text);
    let bytes = text.as_bytes();
    if bytes.is_empty() {
        return Err(Graph6Error::Empty);
    }
    for (offset, &byte) in bytes.iter().enumerate() {
        if !(BIAS..=126).contains(&byte) {
            return Err(Graph6Error::InvalidByte { offset, byte });
        }
    }
    let (n, body) = decode_size(bytes)?;
    if n == 0 {
        return Err(Graph6Error::ZeroVertices);
    }
    let expected = body_len(n);
    if body.len() != expected {
        return Err(Graph6Error::WrongLength {
            expected,
            found: body.len(),
        });
    }

    let mut rows = vec![0u64; n];
    let mut bit = 0usize;
    for v in 1..n {
        for u in 0..v {
            let byte = body[bit / 6] - BIAS;
            if byte & (0b10_0000 >> (bit % 6)) != 0 {
                rows[u] |= 1 << v;
                rows[v] |= 1 << u;
            }
            bit += 1;
        }
    }
    if padding == Padding::Strict && !bit.is_multiple_of(6) {
        let last = body[expected - 1] - BIAS;
        if last & ((1u8 << (6 - bit % 6)) - 1) != 0 {
            return Err(Graph6Error::NonzeroPadding);
        }
    }
    Ok(Graph::from_rows_unchecked(&rows))
}

fn decode_size(bytes: &[u8]) -> Result<(usize, &[u8]), Graph6Error> {
    if bytes[0] != 126 {
        return Ok(((bytes[0] - BIAS) as usize, &bytes[1..]));
    }
    if bytes.len() >= 2 && bytes[1] == 126 {
        return Err(Graph6Error::ExtendedSize);
    }
    if bytes.len() < 4 {
        return Err(Graph6Error::WrongLength {
            expected: 3,
            found: bytes.len() - 1,
        });
    }
    let n = bytes[1..4]
        .iter()
        .fold(0usize, |acc, &b| (acc << 6) | (b - BIAS) as usize);
    if n > MAX_VERTICES {
        return Err(Graph6Error::TooLarge { n });
    }
    Ok((n, &bytes[4..]))
}

fn body_len(n: usize) -> usize {
    (n * (n - 1) / 2).div_ceil(6)
}

/// Canonical graph6 text for a labeled graph (no header, no newline).
pub fn emit_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::with_capacity(4 + body_len(n));
    if n <= SHORT_FORM_MAX {
        out.push(n as u8 + BIAS);
    } else {
        out.push(126);
        out.extend([12, 6, 0].map(|shift| ((n >> shift) & 0x3f) as u8 + BIAS));
    }
    let rows = g.rows();
    let mut acc = 0u8;
    let mut filled = 0;
    for v in 1..n {
        for row in &rows[..v] {
            acc = (acc << 1) | ((row >> v) & 1) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + BIAS);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + BIAS);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

/// A graph6 parse failure tied to its 1-based input line.
#[derive(Debug, Error)]
pub enum StreamError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: Graph6Error,
    },
    #[error("line {line}: {source}")]
    Io {
        line: usize,
        #[source]
        source: io::Error,
    },
}

impl StreamError {
    pub fn line(&self) -> usize {
        match self {
            StreamError::Parse { line, .. } | StreamError::Io { line, .. } => *line,
        }
    }
}

/// Lazily decodes a newline-delimited graph6 stream.
///
/// Blank lines are skipped and a `>>graph6<<` header is stripped wherever it
/// appears. By default a malformed line yields an error item and reading
/// continues; with [`Graph6Reader::stop_on_error`] the stream ends after the
/// first error.
pub struct Graph6Reader<I> {
    lines: I,
    line_no: usize,
    padding: Padding,
    stop_on_error: bool,
    stopped: bool,
}

/// Reads graphs from any buffered reader.
pub fn read_stream<R: BufRead>(reader: R) -> Graph6Reader<io::Lines<R>> {
    Graph6Reader::new(reader.lines())
}

/// Reads graphs from an in-memory sequence of lines.
pub fn read_lines<I, S>(lines: I) -> Graph6Reader<impl Iterator<Item = io::Result<String>>>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    Graph6Reader::new(lines.into_iter().map(|s| Ok(s.into())))
}

impl<I> Graph6Reader<I>
where
    I: Iterator<Item = io::Result<String>>,
{
    pub fn new(lines: I) -> Self {
        Self {
            lines,
            line_no: 0,
            padding: Padding::Tolerant,
            stop_on_error: false,
            stopped: false,
        }
    }

    pub fn padding(mut self, padding: Padding) -> Self {
        self.padding = padding;
        self
    }

    pub fn stop_on_error(mut self, stop: bool) -> Self {
        self.stop_on_error = stop;
        self
    }
}

impl<I> Iterator for Graph6Reader<I>
where
    I: Iterator<Item = io::Result<String>>,
{
    type Item = Result<Graph, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.stopped {
            return None;
        }
        loop {
            let raw = self.lines.next()?;
            self.line_no += 1;
            let line = self.line_no;
            let result = match raw {
                Err(source) => Err(StreamError::Io { line, source }),
                Ok(text) => {
                    let text = text.trim();
                    let text = text.strip_prefix(HEADER).unwrap_or(text);
                    if text.is_empty() {
                        continue;
                    }
                    parse_graph6_with(text, self.padding)
                        .map_err(|source| StreamError::Parse { line, source })
                }
            };
            if result.is_err() && self.stop_on_error {
                self.stopped = true;
            }
            return Some(result);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_encoded_examples() {
        assert_eq!(parse_graph6("@").unwrap(), Graph::complete(1).unwrap());
        assert_eq!(parse_graph6("Bw").unwrap(), Graph::complete(3).unwrap());
        assert_eq!(parse_graph6("C~").unwrap(), Graph::complete(4).unwrap());
        assert_eq!(emit_graph6(&Graph::complete(1).unwrap()), "@");
        assert_eq!(emit_graph6(&Graph::path(3).unwrap()), "Bg");
        assert_eq!(
            parse_graph6(">>graph6<<Bw\n").unwrap(),
            Graph::complete(3).unwrap()
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_graph6(""), Err(Graph6Error::Empty));
        assert!(matches!(
            parse_graph6("!!"),
            Err(Graph6Error::InvalidByte { offset: 0, .. })
        ));
        assert!(matches!(
            parse_graph6("C"),
            Err(Graph6Error::WrongLength {
                expected: 1,
                found: 0
            })
        ));
        assert!(matches!(
            parse_graph6("Bww"),
            Err(Graph6Error::WrongLength { .. })
        ));
        assert_eq!(parse_graph6("?"), Err(Graph6Error::ZeroVertices));
        assert_eq!(parse_graph6("~~??????"), Err(Graph6Error::ExtendedSize));
        // 4-byte prefix for 65 vertices.
        assert_eq!(parse_graph6("~?@@"), Err(Graph6Error::TooLarge { n: 65 }));
        // "Bx": bits 111001, last bit is padding.
        assert!(parse_graph6("Bx").is_ok());
        assert_eq!(
            parse_graph6_with("Bx", Padding::Strict),
            Err(Graph6Error::NonzeroPadding)
        );
        assert!(parse_graph6_with("Bw", Padding::Strict).is_ok());
    }

    #[test]
    fn emitted_length() {
        for n in 1..=62 {
            let g = Graph::complete(n).unwrap();
            let text = emit_graph6(&g);
            assert_eq!(text.len(), 1 + (n * (n - 1) / 2).div_ceil(6));
            assert_eq!(parse_graph6(&text).unwrap(), g);
        }
    }

    #[test]
    fn four_byte_prefix_round_trip() {
        for n in 63..=64 {
            let g = Graph::path(n).unwrap();
            let text = emit_graph6(&g);
            assert!(text.starts_with('~'));
            assert_eq!(parse_graph6(&text).unwrap(), g);
        }
    }

    #[test]
    fn stream_reading() {
        let graphs: Vec<_> = read_lines(["@", "Bw"]).map(Result::unwrap).collect();
        assert_eq!(
            graphs,
            vec![Graph::complete(1).unwrap(), Graph::complete(3).unwrap()]
        );

        let graphs: Vec<_> = read_lines([">>graph6<<Bw", "", "C~"]).collect();
        assert_eq!(graphs.len(), 2);
        assert!(graphs.iter().all(Result::is_ok));

        let items: Vec<_> = read_lines(["!!", "@"]).collect();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].as_ref().unwrap_err().line(), 1);
        assert!(items[1].is_ok());

        let items: Vec<_> = read_lines(["@", "!!", "@"]).stop_on_error(true).collect();
        assert_eq!(items.len(), 2);
        assert_eq!(items[1].as_ref().unwrap_err().line(), 2);
    }

    #[test]
    fn reader_over_bufread() {
        let data = b"@\nBw\r\n\nC~\n";
        let graphs: Vec<_> = read_stream(&data[..]).map(Result::unwrap).collect();
        assert_eq!(graphs.len(), 3);
        assert_eq!(graphs[2], Graph::complete(4).unwrap());
    }
}
