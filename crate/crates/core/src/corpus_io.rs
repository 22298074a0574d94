//! Sequence ingestion: alphabets, plain-text / FASTA / paired-structure
//! readers, and fixed-width windowing.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

const AMINO20: &str = "ACDEFGHIKLMNPQRSTVWY";
const DNA4: &str = "ACGT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphabetKind {
    Generic,
    Amino20,
    Dna4,
}

impl fmt::Display for AlphabetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphabetKind::Generic => "generic",
            AlphabetKind::Amino20 => "amino20",
            AlphabetKind::Dna4 => "dna4",
        })
    }
}

/// A sorted set of single-character symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    kind: AlphabetKind,
}

impl Alphabet {
    /// The 20 standard amino-acid letters.
    pub fn amino20() -> Self {
        Alphabet {
            symbols: AMINO20.chars().collect(),
            kind: AlphabetKind::Amino20,
        }
    }

    pub fn dna4() -> Self {
        Alphabet {
            symbols: DNA4.chars().collect(),
            kind: AlphabetKind::Dna4,
        }
    }

    /// A generic alphabet over the given symbols, which must be unique and
    /// at least two in number.
    pub fn generic(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let mut symbols: Vec<char> = symbols.into_iter().collect();
        let given = symbols.len();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.len() != given {
            return Err(Error::InvalidArgument(
                "alphabet symbols must be unique".into(),
            ));
        }
        if symbols.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "alphabet needs at least 2 symbols, got {}",
                symbols.len()
            )));
        }
        Ok(Alphabet {
            symbols,
            kind: AlphabetKind::Generic,
        })
    }

    /// Generic alphabet made of every distinct character in `texts`.
    pub fn infer<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut symbols: Vec<char> = texts.into_iter().flat_map(str::chars).collect();
        symbols.sort_unstable();
        symbols.dedup();
        Alphabet::generic(symbols)
    }

    pub fn from_kind(kind: AlphabetKind) -> Option<Self> {
        match kind {
            AlphabetKind::Amino20 => Some(Alphabet::amino20()),
            AlphabetKind::Dna4 => Some(Alphabet::dna4()),
            AlphabetKind::Generic => None,
        }
    }

    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, ch: char) -> bool {
        self.symbols.binary_search(&ch).is_ok()
    }

    /// Raw cost of spelling one symbol, `log2 |alphabet|`.
    pub fn bits_per_symbol(&self) -> f64 {
        (self.symbols.len() as f64).log2()
    }

    /// Whether this kind upper-cases its input by default.
    fn folds_case(&self) -> bool {
        self.kind != AlphabetKind::Generic
    }
}

/// One named, non-empty symbol string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    id: String,
    symbols: String,
}

impl Sequence {
    pub fn new(id: impl Into<String>, symbols: impl Into<String>) -> Result<Self> {
        let id = id.into();
        let symbols = symbols.into();
        if symbols.is_empty() {
            return Err(Error::Empty(format!("sequence {id} has no symbols")));
        }
        Ok(Sequence { id, symbols })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn as_str(&self) -> &str {
        &self.symbols
    }

    /// Length in symbols (not bytes).
    pub fn len(&self) -> usize {
        self.symbols.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Byte offset of every symbol boundary, `len() + 1` entries; symbol
    /// span `[i, j)` is `&as_str()[offsets[i]..offsets[j]]`.
    pub fn char_offsets(&self) -> Vec<usize> {
        char_offsets(&self.symbols)
    }

    fn check(&self, alphabet: &Alphabet) -> Result<()> {
        match self.symbols.chars().find(|&c| !alphabet.contains(c)) {
            Some(ch) => Err(Error::OutOfAlphabet {
                id: self.id.clone(),
                ch,
                alphabet: alphabet.kind().to_string(),
            }),
            None => Ok(()),
        }
    }
}

/// A residue sequence aligned with its per-residue secondary-structure
/// states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedRecord {
    sequence: Sequence,
    structure: String,
}

impl PairedRecord {
    pub fn new(sequence: Sequence, structure: impl Into<String>) -> Result<Self> {
        let structure = structure.into();
        let (seq_len, st_len) = (sequence.len(), structure.chars().count());
        if seq_len != st_len {
            return Err(Error::LengthMismatch {
                id: sequence.id().to_string(),
                sequence: seq_len,
                structure: st_len,
            });
        }
        Ok(PairedRecord {
            sequence,
            structure,
        })
    }

    pub fn id(&self) -> &str {
        self.sequence.id()
    }

    pub fn sequence(&self) -> &Sequence {
        &self.sequence
    }

    pub fn structure(&self) -> &str {
        &self.structure
    }
}

/// Sequences sharing one alphabet, with at least one symbol in total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<Sequence>,
    alphabet: Alphabet,
}

impl Corpus {
    pub fn new(records: Vec<Sequence>, alphabet: Alphabet) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Empty("corpus has no sequences".into()));
        }
        for r in &records {
            r.check(&alphabet)?;
        }
        Ok(Corpus { records, alphabet })
    }

    /// Builds a corpus from in-memory strings, ids `seq1`, `seq2`, ...
    /// With no alphabet given, a generic one is inferred.
    pub fn from_strs<S: AsRef<str>>(texts: &[S], alphabet: Option<Alphabet>) -> Result<Self> {
        let alphabet = match alphabet {
            Some(a) => a,
            None => Alphabet::infer(texts.iter().map(|s| s.as_ref()))?,
        };
        let records = texts
            .iter()
            .enumerate()
            .map(|(i, s)| Sequence::new(format!("seq{}", i + 1), s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(records, alphabet)
    }

    pub fn records(&self) -> &[Sequence] {
        &self.records
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_symbols(&self) -> usize {
        self.records.iter().map(Sequence::len).sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sequence> {
        self.records.iter()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Sequence;
    type IntoIter = std::slice::Iter<'a, Sequence>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedCorpus {
    records: Vec<PairedRecord>,
    alphabet: Alphabet,
}

impl PairedCorpus {
    pub fn new(records: Vec<PairedRecord>, alphabet: Alphabet) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Empty("paired corpus has no records".into()));
        }
        for r in &records {
            r.sequence.check(&alphabet)?;
        }
        Ok(PairedCorpus { records, alphabet })
    }

    pub fn records(&self) -> &[PairedRecord] {
        &self.records
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The residue sequences alone.
    pub fn to_corpus(&self) -> Corpus {
        Corpus {
            records: self.records.iter().map(|r| r.sequence.clone()).collect(),
            alphabet: self.alphabet.clone(),
        }
    }
}

/// What to do with a record containing a symbol outside the alphabet.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OovPolicy {
    /// Drop the record and count it.
    #[default]
    Reject,
    /// Fail the whole read.
    Abort,
}

#[derive(Debug, Clone)]
pub struct ReadOptions {
    /// `None` infers a generic alphabet from the input.
    pub alphabet: Option<Alphabet>,
    pub policy: OovPolicy,
    /// Upper-case input; `None` folds for amino20/dna4 and keeps case for
    /// generic alphabets. FASTA input is always folded.
    pub uppercase: Option<bool>,
    /// Remove all whitespace inside a line (plain text only).
    pub strip_whitespace: bool,
    /// Allowed structure-state characters for paired input; `None` accepts any.
    pub structure_states: Option<Vec<char>>,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            alphabet: None,
            policy: OovPolicy::Reject,
            uppercase: None,
            strip_whitespace: true,
            structure_states: None,
        }
    }
}

impl ReadOptions {
    pub fn with_alphabet(alphabet: Alphabet) -> Self {
        ReadOptions {
            alphabet: Some(alphabet),
            ..Default::default()
        }
    }

    fn fold(&self) -> bool {
        self.uppercase
            .unwrap_or_else(|| self.alphabet.as_ref().is_some_and(Alphabet::folds_case))
    }
}

/// Side information from a read: what was skipped and why.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReadReport {
    pub skipped_empty: usize,
    /// Ids of records dropped under [`OovPolicy::Reject`].
    pub rejected: Vec<String>,
}

pub(crate) fn char_offsets(s: &str) -> Vec<usize> {
    let mut v: Vec<usize> = s.char_indices().map(|(b, _)| b).collect();
    v.push(s.len());
    v
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Applies the alphabet policy to parsed records, inferring the alphabet
/// when none was configured.
fn admit<T>(
    items: Vec<T>,
    opts: &ReadOptions,
    report: &mut ReadReport,
    seq_of: impl Fn(&T) -> &Sequence,
) -> Result<(Vec<T>, Alphabet)> {
    let alphabet = match &opts.alphabet {
        Some(a) => a.clone(),
        None => {
            if items.is_empty() {
                return Err(Error::Empty("no sequences in input".into()));
            }
            Alphabet::infer(items.iter().map(|r| seq_of(r).as_str()))?
        }
    };
    let mut kept = Vec::with_capacity(items.len());
    for item in items {
        match seq_of(&item).check(&alphabet) {
            Ok(()) => kept.push(item),
            Err(e) if opts.policy == OovPolicy::Abort => return Err(e),
            Err(_) => report.rejected.push(seq_of(&item).id().to_string()),
        }
    }
    if !report.rejected.is_empty() {
        log::warn!(
            "dropped {} record(s) with symbols outside the {} alphabet",
            report.rejected.len(),
            alphabet.kind()
        );
    }
    Ok((kept, alphabet))
}

/// Reads one sequence per line. Ids are `line<N>` with 1-based line numbers.
pub fn read_plain(path: impl AsRef<Path>, opts: &ReadOptions) -> Result<(Corpus, ReadReport)> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let fold = opts.fold();
    let mut report = ReadReport::default();
    let mut seqs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut s: String = if opts.strip_whitespace {
            line.chars().filter(|c| !c.is_whitespace()).collect()
        } else {
            line.trim_end_matches('\r').to_string()
        };
        if fold {
            s = s.to_uppercase();
        }
        if s.is_empty() {
            report.skipped_empty += 1;
            continue;
        }
        seqs.push(Sequence::new(format!("line{}", n + 1), s)?);
    }
    let (seqs, alphabet) = admit(seqs, opts, &mut report, |s| s)?;
    Ok((Corpus::new(seqs, alphabet)?, report))
}

/// Reads FASTA. Wrapped sequence lines are joined and upper-cased; the id is
/// the header text up to the first whitespace.
pub fn read_fasta(path: impl AsRef<Path>, opts: &ReadOptions) -> Result<(Corpus, ReadReport)> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut report = ReadReport::default();
    let mut parsed: Vec<(String, String)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("");
            if id.is_empty() {
                return Err(Error::parse(path, n + 1, "FASTA header has no id"));
            }
            parsed.push((id.to_string(), String::new()));
        } else if line.trim().is_empty() {
            continue;
        } else {
            match parsed.last_mut() {
                Some((_, seq)) => {
                    seq.extend(line.chars().filter(|c| !c.is_whitespace()));
                }
                None => {
                    return Err(Error::parse(path, n + 1, "sequence data before first header"))
                }
            }
        }
    }
    if parsed.is_empty() {
        return Err(Error::parse(path, 1, "no FASTA records"));
    }
    let mut seqs = Vec::with_capacity(parsed.len());
    for (id, seq) in parsed {
        if seq.is_empty() {
            report.skipped_empty += 1;
            continue;
        }
        seqs.push(Sequence::new(id, seq.to_uppercase())?);
    }
    let (seqs, alphabet) = admit(seqs, opts, &mut report, |s| s)?;
    Ok((Corpus::new(seqs, alphabet)?, report))
}

/// Reads repeating three-line records: id, sequence, structure string.
///
/// The sequence line follows the same case folding as [`read_plain`]; the
/// structure line is taken verbatim apart from a trailing `\r`, since a
/// blank state is meaningful.
pub fn read_paired(
    path: impl AsRef<Path>,
    opts: &ReadOptions,
) -> Result<(PairedCorpus, ReadReport)> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    if lines.len() % 3 != 0 {
        return Err(Error::parse(
            path,
            lines.len(),
            format!("{} lines is not a whole number of 3-line records", lines.len()),
        ));
    }
    let fold = opts.fold();
    let mut records = Vec::with_capacity(lines.len() / 3);
    for (k, chunk) in lines.chunks(3).enumerate() {
        let line_no = 3 * k + 1;
        let id = chunk[0].trim();
        if id.is_empty() {
            return Err(Error::parse(path, line_no, "empty record id"));
        }
        let mut seq = chunk[1].trim().to_string();
        if fold {
            seq = seq.to_uppercase();
        }
        let structure = chunk[2];
        if seq.is_empty() || structure.is_empty() {
            return Err(Error::parse(
                path,
                line_no,
                format!("record {id}: empty sequence or structure line"),
            ));
        }
        if let Some(states) = &opts.structure_states {
            if let Some(bad) = structure.chars().find(|c| !states.contains(c)) {
                return Err(Error::parse(
                    path,
                    line_no + 2,
                    format!("record {id}: unknown structure state {bad:?}"),
                ));
            }
        }
        records.push(PairedRecord::new(Sequence::new(id, seq)?, structure)?);
    }
    let mut report = ReadReport::default();
    let (records, alphabet) = admit(records, opts, &mut report, PairedRecord::sequence)?;
    Ok((PairedCorpus::new(records, alphabet)?, report))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes one sequence per line; the inverse of [`read_plain`].
pub fn write_plain<'a>(
    seqs: impl IntoIterator<Item = &'a Sequence>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for s in seqs {
        writeln!(w, "{}", s.as_str()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes FASTA with sequence lines wrapped at `wrap` symbols.
pub fn write_fasta<'a>(
    seqs: impl IntoIterator<Item = &'a Sequence>,
    path: impl AsRef<Path>,
    wrap: usize,
) -> Result<()> {
    let path = path.as_ref();
    let wrap = wrap.max(1);
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    for s in seqs {
        writeln!(w, ">{}", s.id()).map_err(io)?;
        let chars: Vec<char> = s.as_str().chars().collect();
        for line in chars.chunks(wrap) {
            let line: String = line.iter().collect();
            writeln!(w, "{line}").map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// A fixed-width slice of a longer sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub sequence: Sequence,
    /// 0-based window number within the source sequence.
    pub index: usize,
    /// Symbol offset of the first window symbol in the source.
    pub offset: usize,
    /// Final window shorter than the requested width.
    pub remainder: bool,
}

/// Splits `seq` into consecutive non-overlapping windows of `width`
/// symbols. A shorter trailing window is emitted with `remainder` set.
/// Window ids are `<id>_w<index>_<offset>`.
pub fn window(seq: &Sequence, width: usize) -> Result<Vec<Window>> {
    if width == 0 {
        return Err(Error::InvalidArgument("window width must be >= 1".into()));
    }
    let chars: Vec<char> = seq.as_str().chars().collect();
    chars
        .chunks(width)
        .enumerate()
        .map(|(index, chunk)| {
            let offset = index * width;
            Ok(Window {
                sequence: Sequence::new(
                    format!("{}_w{}_{}", seq.id(), index, offset),
                    chunk.iter().collect::<String>(),
                )?,
                index,
                offset,
                remainder: chunk.len() < width,
            })
        })
        .collect()
}
