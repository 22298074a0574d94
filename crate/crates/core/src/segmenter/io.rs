//! Segmentation files: one sequence per line, tokens joined by single
//! spaces, LF line endings.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

use super::Segmentation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedLine {
    /// The sequence with the spaces removed.
    pub text: String,
    pub segmentation: Segmentation,
}

pub fn format_tokens(text: &str, seg: &Segmentation) -> Result<String> {
    Ok(seg.tokens(text)?.join(" "))
}

/// Splits a space-separated token line. Runs of whitespace count as one
/// separator.
pub fn parse_tokens(line: &str) -> Result<SegmentedLine> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let seg = Segmentation::from_lengths(tokens.iter().map(|t| t.chars().count()))?;
    Ok(SegmentedLine {
        text: tokens.concat(),
        segmentation: seg,
    })
}

/// Reads a segmentation file; blank lines are skipped.
pub fn read_segmentations(path: impl AsRef<Path>) -> Result<Vec<SegmentedLine>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            parse_tokens(l).map_err(|e| Error::parse(path, n + 1, e.to_string()))
        })
        .collect()
}

pub fn write_segmentations<'a>(
    path: impl AsRef<Path>,
    items: impl IntoIterator<Item = (&'a str, &'a Segmentation)>,
) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(fs::File::create(path).map_err(io)?);
    for (text, seg) in items {
        writeln!(w, "{}", format_tokens(text, seg)?).map_err(io)?;
    }
    w.flush().map_err(io)
}
