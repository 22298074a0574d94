use crate::{Error, Result};

const BASES: [u8; 4] = [b'T', b'C', b'A', b'G'];

/// Standard code, codons ordered by T, C, A, G at each position.
const STANDARD: &[u8; 64] = b"FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG";

/// Marker for stop codons in the table.
const STOP: u8 = b'*';

/// Result of translating one codon or span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Translation {
    Protein(String),
    /// At least one codon in the span is a stop codon.
    Stop,
}

/// Codon → amino-acid table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneticCode {
    table: [u8; 64],
}

impl Default for GeneticCode {
    fn default() -> Self {
        GeneticCode::standard()
    }
}

fn base_index(b: u8) -> Option<usize> {
    match b {
        b'T' => Some(0),
        b'C' => Some(1),
        b'A' => Some(2),
        b'G' => Some(3),
        _ => None,
    }
}

impl GeneticCode {
    pub fn standard() -> Self {
        GeneticCode { table: *STANDARD }
    }

    fn index(codon: &[u8]) -> Result<usize> {
        let mut idx = 0;
        for &b in codon {
            let i = base_index(b).ok_or_else(|| {
                Error::InvalidArgument(format!("invalid nucleotide {:?}", b as char))
            })?;
            idx = idx * 4 + i;
        }
        Ok(idx)
    }

    /// Amino acid of one codon, `None` for a stop codon.
    pub fn amino(&self, codon: &[u8]) -> Result<Option<char>> {
        if codon.len() != 3 {
            return Err(Error::InvalidArgument(format!("codon of length {}", codon.len())));
        }
        let aa = self.table[Self::index(codon)?];
        Ok((aa != STOP).then_some(aa as char))
    }

    /// In-frame translation from the first base of `dna`.
    pub fn translate(&self, dna: &str) -> Result<Translation> {
        let bytes = dna.as_bytes();
        if bytes.len() % 3 != 0 {
            return Err(Error::InvalidArgument(format!(
                "span length {} is not a multiple of 3",
                bytes.len()
            )));
        }
        let mut protein = String::with_capacity(bytes.len() / 3);
        let mut stop = false;
        for codon in bytes.chunks(3) {
            match self.amino(codon)? {
                Some(aa) => protein.push(aa),
                None => stop = true,
            }
        }
        Ok(if stop { Translation::Stop } else { Translation::Protein(protein) })
    }

    /// All 64 codons with their amino acid (`None` = stop).
    pub fn entries(&self) -> impl Iterator<Item = ([u8; 3], Option<char>)> + '_ {
        (0..64).map(move |i| {
            let codon = [BASES[i / 16], BASES[i / 4 % 4], BASES[i % 4]];
            let aa = self.table[i];
            (codon, (aa != STOP).then_some(aa as char))
        })
    }

    pub fn stop_codons(&self) -> Vec<[u8; 3]> {
        self.entries().filter(|(_, aa)| aa.is_none()).map(|(c, _)| c).collect()
    }

    /// Codons encoding `aa`; empty for letters the code never produces.
    pub fn codons_for(&self, aa: char) -> Vec<[u8; 3]> {
        self.entries().filter(|(_, a)| *a == Some(aa)).map(|(c, _)| c).collect()
    }

    /// One back-translation of `protein`, choosing among synonymous codons
    /// with `pick(n)` (which must return an index below `n`).
    pub fn back_translate(&self, protein: &str, mut pick: impl FnMut(usize) -> usize) -> Result<String> {
        let mut dna = String::with_capacity(protein.len() * 3);
        for aa in protein.chars() {
            let codons = self.codons_for(aa);
            if codons.is_empty() {
                return Err(Error::InvalidArgument(format!("no codon encodes {aa:?}")));
            }
            let c = codons[pick(codons.len()) % codons.len()];
            dna.extend(c.iter().map(|&b| b as char));
        }
        Ok(dna)
    }
}
