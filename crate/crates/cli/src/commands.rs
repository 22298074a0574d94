use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use lexiseg::corpus_io::{self, window, OovPolicy, ReadOptions};
use lexiseg::dna_bridge::{
    coverage_report, coverage_segment, dna_roundtrip_corpus, CoverageConfig, GeneticCode,
};
use lexiseg::lexicon::{
    extract_candidates, filter_candidates, random_init, read_lexicon, uniform_init, write_lexicon,
};
use lexiseg::metrics::{corpus_prf, description_length, occurrence_stats, Averaging, TokenCounts};
use lexiseg::segmenter::{em_train, read_segmentations, segment_corpus, write_segmentations, SegmentedLine};
use lexiseg::structure::{build_structure_lexicon, structure_segment};
use lexiseg::{Alphabet, Corpus, FilterConfig, PairedCorpus, Segmentation, TrainConfig, TrainMode};

use crate::args::*;
use crate::output::{report_json, require_file, require_parent, Meta, Outputs};
use crate::UsageError;

fn alphabet_of(a: AlphabetArg) -> Option<Alphabet> {
    match a {
        AlphabetArg::Generic => None,
        AlphabetArg::Amino20 => Some(Alphabet::amino20()),
        AlphabetArg::Dna4 => Some(Alphabet::dna4()),
    }
}

fn read_options(input: &InputArgs) -> ReadOptions {
    ReadOptions {
        alphabet: alphabet_of(input.alphabet),
        policy: match input.oov {
            OovArg::Reject => OovPolicy::Reject,
            OovArg::Abort => OovPolicy::Abort,
        },
        ..Default::default()
    }
}

enum Loaded {
    Plain(Corpus),
    Paired(PairedCorpus),
}

impl Loaded {
    fn corpus(&self) -> Corpus {
        match self {
            Loaded::Plain(c) => c.clone(),
            Loaded::Paired(p) => p.to_corpus(),
        }
    }

    fn paired(&self, what: &str) -> Result<&PairedCorpus> {
        match self {
            Loaded::Paired(p) => Ok(p),
            Loaded::Plain(_) => Err(UsageError(format!("{what} needs --format paired")).into()),
        }
    }
}

fn load(input: &InputArgs) -> Result<Loaded> {
    let opts = read_options(input);
    let path = &input.input;
    Ok(match input.format {
        Format::Plain => Loaded::Plain(corpus_io::read_plain(path, &opts)?.0),
        Format::Fasta => Loaded::Plain(corpus_io::read_fasta(path, &opts)?.0),
        Format::Paired => Loaded::Paired(corpus_io::read_paired(path, &opts)?.0),
    })
}

fn header(meta: &Meta) -> Vec<String> {
    vec![meta.header_line(), meta.flags_line()]
}

pub fn train(a: &TrainArgs, meta: &Meta, out: &mut Outputs) -> Result<()> {
    require_file(&a.input.input)?;
    require_parent(&a.out)?;
    let log_path = a.log.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".iters.tsv");
        PathBuf::from(p)
    });
    require_parent(&log_path)?;
    let data = load(&a.input)?;

    if a.structure {
        let paired = data.paired("--structure")?;
        let (table, lex) = build_structure_lexicon(paired)?;
        log::info!(
            "{} distinct structure words over {} tokens",
            table.distinct(),
            table.total_tokens()
        );
        let lex = match a.fallback_log_prob {
            Some(f) => lex.with_fallback_log_prob(f)?,
            None => lex,
        };
        write_lexicon(&lex, out.claim(&a.out), &header(meta))?;
        return Ok(());
    }

    let corpus = data.corpus();
    let table = extract_candidates(&corpus, a.max_len)?;
    let filter = FilterConfig {
        min_count: a.min_count,
        min_border_entropy: a.min_border_entropy,
        keep_singletons: a.keep_singletons,
    };
    let filtered = filter_candidates(&table, &corpus, &filter)?;
    log::info!("{} candidates, {} after filtering", table.len(), filtered.len());
    let start = match a.filter_stage {
        FilterStage::Before => &filtered,
        FilterStage::After => &table,
    };
    let mut init = match a.init {
        InitArg::Uniform => uniform_init(start)?,
        InitArg::Random => random_init(start, a.common.seed)?,
    };
    if let Some(f) = a.fallback_log_prob {
        init = init.with_fallback_log_prob(f)?;
    }
    let cfg = TrainConfig {
        max_len: a.max_len,
        mode: match a.mode {
            ModeArg::Soft => TrainMode::Soft,
            ModeArg::Hard => TrainMode::Hard,
        },
        max_iters: a.iters,
        tol: a.tol,
        prune_below: a.prune_below,
        seed: a.common.seed,
    };
    let (mut lex, iters) = em_train(&corpus, init, &cfg)?;
    if a.filter_stage == FilterStage::After {
        lex = lex.retain(|w, _| filtered.get(w).is_some())?;
    }
    log::info!("trained lexicon: {} words after {} iterations", lex.len(), iters.len());

    write_lexicon(&lex, out.claim(&a.out), &header(meta))?;
    let mut tsv = String::new();
    for line in header(meta) {
        writeln!(tsv, "# {line}")?;
    }
    tsv.push_str("iteration\tlog_likelihood\tvocab_size\tmax_delta\n");
    for r in &iters {
        writeln!(tsv, "{}\t{}\t{}\t{}", r.iteration, r.log_likelihood, r.vocab_size, r.max_delta)?;
    }
    out.write(&log_path, &tsv)
}

pub fn segment(a: &SegmentArgs, _meta: &Meta, out: &mut Outputs) -> Result<()> {
    require_file(&a.input.input)?;
    if let Some(l) = &a.lexicon {
        require_file(l)?;
    }
    require_parent(&a.out)?;
    let data = load(&a.input)?;
    if a.structure_gold {
        let paired = data.paired("--structure-gold")?;
        let segs: Vec<Segmentation> = paired.records().iter().map(structure_segment).collect();
        let items = paired.records().iter().map(|r| r.sequence().as_str()).zip(segs.iter());
        write_segmentations(out.claim(&a.out), items)?;
        return Ok(());
    }
    let lex_path = a.lexicon.as_ref().expect("clap requires --lexicon");
    let lex = read_lexicon(lex_path, a.renormalize)?;
    let corpus = data.corpus();
    let segs = segment_corpus(corpus.records(), &lex);
    let items = corpus.records().iter().map(|s| s.as_str()).zip(segs.iter());
    write_segmentations(out.claim(&a.out), items)?;
    Ok(())
}

fn read_segs(path: &Path) -> Result<Vec<SegmentedLine>> {
    let lines = read_segmentations(path)?;
    if lines.is_empty() {
        bail!("{}: no segmented lines", path.display());
    }
    Ok(lines)
}

pub fn eval(a: &EvalArgs, meta: &Meta, out: &mut Outputs) -> Result<()> {
    require_file(&a.gold)?;
    require_file(&a.predicted)?;
    require_parent(&a.out)?;
    let gold = read_segs(&a.gold)?;
    let pred = read_segs(&a.predicted)?;
    if gold.len() != pred.len() {
        bail!("gold has {} lines but prediction has {}", gold.len(), pred.len());
    }
    for (i, (g, p)) in gold.iter().zip(&pred).enumerate() {
        if g.text != p.text {
            bail!("line {}: gold and predicted texts differ", i + 1);
        }
    }
    let averaging = match a.averaging {
        AveragingArg::Micro => Averaging::Micro,
        AveragingArg::Macro => Averaging::Macro,
    };
    let report = corpus_prf(
        gold.iter().zip(&pred).map(|(g, p)| (&g.segmentation, &p.segmentation)),
        averaging,
    )?;
    let extra = vec![("records", json!(gold.len())), ("averaging", json!(a.averaging))];
    out.write(&a.out, &report_json(meta, &report, extra)?)
}

fn token_counts(lines: &[SegmentedLine]) -> Result<TokenCounts> {
    let mut counts = TokenCounts::new();
    for l in lines {
        for t in l.segmentation.tokens(&l.text)? {
            counts.add(t);
        }
    }
    Ok(counts)
}

pub fn stats(a: &StatsArgs, meta: &Meta, out: &mut Outputs) -> Result<()> {
    require_file(&a.input)?;
    require_parent(&a.out)?;
    if let Some(h) = &a.histogram {
        require_parent(h)?;
    }
    let counts = token_counts(&read_segs(&a.input)?)?;
    let stats = occurrence_stats(&counts)?;
    let extra = vec![
        ("vocab_size", json!(counts.vocab_size())),
        ("total_tokens", json!(counts.total_tokens())),
        ("total_letters", json!(counts.total_letters())),
    ];
    out.write(&a.out, &report_json(meta, &stats, extra)?)?;
    if let Some(h) = &a.histogram {
        let mut tsv = String::from("frequency\twords\tletters\n");
        for (f, w, l) in counts.frequency_histogram() {
            writeln!(tsv, "{f}\t{w}\t{l}")?;
        }
        out.write(h, &tsv)?;
    }
    Ok(())
}

pub fn dl(a: &DlArgs, meta: &Meta, out: &mut Outputs) -> Result<()> {
    require_file(&a.input)?;
    require_file(&a.lexicon)?;
    require_parent(&a.out)?;
    let lines = read_segs(&a.input)?;
    let lex = read_lexicon(&a.lexicon, a.renormalize)?;
    let alphabet = match alphabet_of(a.alphabet) {
        Some(al) => al,
        None => Alphabet::infer(lines.iter().map(|l| l.text.as_str()))?,
    };
    let counts = token_counts(&lines)?;
    let (report, details) = description_length(&counts, &lex, &alphabet)?;
    let extra = vec![
        ("details", serde_json::to_value(details)?),
        ("alphabet_size", json!(alphabet.len())),
    ];
    out.write(&a.out, &report_json(meta, &report, extra)?)
}

pub fn coverage(a: &CoverageArgs, meta: &Meta, out: &mut Outputs) -> Result<()> {
    require_file(&a.input)?;
    require_file(&a.lexicon)?;
    for p in [Some(&a.out), a.histogram.as_ref(), a.annotated.as_ref()]
        .into_iter()
        .chain([a.roundtrip_corpus.as_ref(), a.roundtrip_gold.as_ref()])
        .flatten()
    {
        require_parent(p)?;
    }
    if a.width == 0 {
        return Err(UsageError("--width must be at least 1".into()).into());
    }
    let opts = ReadOptions::with_alphabet(Alphabet::dna4());
    let (dna, _) = corpus_io::read_fasta(&a.input, &opts)?;
    let lex = read_lexicon(&a.lexicon, a.renormalize)?;
    let code = GeneticCode::standard();
    let cfg = CoverageConfig {
        red_penalty: a.red_penalty,
        green_bonus: a.green_bonus,
        include_remainder: !a.drop_remainder,
    };
    let mut windows = Vec::new();
    for seq in dna.records() {
        windows.extend(window(seq, a.width)?);
    }
    let report = coverage_report(&windows, &lex, &code, &cfg)?;
    let extra = vec![
        ("windows", json!(report.per_window.len())),
        ("mean_window_coverage", json!(report.mean_window_coverage())),
    ];
    out.write(&a.out, &report_json(meta, &report, extra)?)?;

    if let Some(h) = &a.histogram {
        let mut tsv = String::from("bin_low\tbin_high\tcount\tfraction\n");
        for (lo, hi, c, f) in report.histogram_rows() {
            writeln!(tsv, "{lo:.1}\t{hi:.1}\t{c}\t{f}")?;
        }
        out.write(h, &tsv)?;
    }

    let counted: Vec<_> = windows
        .iter()
        .filter(|w| cfg.include_remainder || !w.remainder)
        .map(|w| w.sequence.clone())
        .collect();
    if let Some(p) = &a.annotated {
        let mut text = String::new();
        for w in &counted {
            let seg = coverage_segment(w, &lex, &code, &cfg)?;
            writeln!(text, "{}\t{}", w.id(), seg.annotate())?;
        }
        out.write(p, &text)?;
    }
    if a.roundtrip_corpus.is_some() || a.roundtrip_gold.is_some() {
        let records = dna_roundtrip_corpus(&counted, &lex, &code, &cfg)?;
        if records.is_empty() {
            log::warn!("no green runs; round-trip outputs are empty");
        }
        if let Some(p) = &a.roundtrip_corpus {
            corpus_io::write_plain(records.iter().map(|r| &r.protein), out.claim(p))?;
        }
        if let Some(p) = &a.roundtrip_gold {
            let items = records.iter().map(|r| (r.protein.as_str(), &r.gold));
            write_segmentations(out.claim(p), items)?;
        }
    }
    Ok(())
}

pub fn window_cmd(a: &WindowArgs, _meta: &Meta, out: &mut Outputs) -> Result<()> {
    require_file(&a.input)?;
    require_parent(&a.out)?;
    if a.width == 0 {
        return Err(UsageError("--width must be at least 1".into()).into());
    }
    let opts = ReadOptions {
        alphabet: alphabet_of(a.alphabet),
        ..Default::default()
    };
    let (seqs, _) = corpus_io::read_fasta(&a.input, &opts)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let mut kept = Vec::new();
    for seq in seqs.records() {
        kept.extend(
            window(seq, a.width)?
                .into_iter()
                .filter(|w| !(a.drop_remainder && w.remainder))
                .map(|w| w.sequence),
        );
    }
    corpus_io::write_fasta(kept.iter(), out.claim(&a.out), 60)?;
    Ok(())
}
