//! Stream record decoding.
//!
//! Two line-oriented encodings, chosen by the first non-blank byte of the
//! input:
//!
//! * text: `index<TAB or comma>value` (surrounding spaces are ignored),
//! * JSON lines: `{"i": index, "v": value}`.
//!
//! Blank lines and, in text mode, lines starting with `#` are skipped.

use std::io::BufRead;

use anyhow::{anyhow, Context, Result};
use maxsketch::StreamItem;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Text,
    JsonLines,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    i: u64,
    v: f64,
}

pub fn parse_text_record(line: &str) -> Result<StreamItem> {
    let mut parts = line.splitn(2, ['\t', ',']);
    let index = parts.next().unwrap_or_default().trim();
    let value = parts
        .next()
        .ok_or_else(|| anyhow!("expected `index<TAB or comma>value`"))?
        .trim();
    let index: u64 = index
        .parse()
        .with_context(|| format!("bad index {index:?}"))?;
    let value: f64 = value
        .parse()
        .with_context(|| format!("bad value {value:?}"))?;
    Ok(StreamItem::new(index, value)?)
}

pub fn parse_json_record(line: &str) -> Result<StreamItem> {
    let rec: JsonRecord = serde_json::from_str(line)?;
    Ok(StreamItem::new(rec.i, rec.v)?)
}

/// Streaming reader over stream records; holds one line of state.
pub struct RecordReader<R> {
    inner: R,
    buf: String,
    line_no: usize,
    encoding: Option<Encoding>,
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            buf: String::new(),
            line_no: 0,
            encoding: None,
        }
    }

    pub fn encoding(&self) -> Option<Encoding> {
        self.encoding
    }

    /// Next record, or `None` at end of input. Errors carry the line number.
    pub fn next_record(&mut self) -> Result<Option<StreamItem>> {
        loop {
            self.buf.clear();
            if self.inner.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let line = self.buf.trim();
            if line.is_empty() {
                continue;
            }
            let encoding = *self.encoding.get_or_insert(if line.starts_with('{') {
                Encoding::JsonLines
            } else {
                Encoding::Text
            });
            let parsed = match encoding {
                Encoding::Text if line.starts_with('#') => continue,
                Encoding::Text => parse_text_record(line),
                Encoding::JsonLines => parse_json_record(line),
            };
            return parsed
                .map(Some)
                .with_context(|| format!("line {}", self.line_no));
        }
    }
}

impl<R: BufRead> Iterator for RecordReader<R> {
    type Item = Result<StreamItem>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_record().transpose()
    }
}

pub fn read_all<R: BufRead>(inner: R) -> Result<Vec<StreamItem>> {
    RecordReader::new(inner).collect()
}
