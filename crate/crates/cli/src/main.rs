//! One binary, subcommand per pipeline stage. All outputs are written
//! atomically (temp file + rename) and every command is deterministic
//! given identical inputs and flags. Log verbosity comes from the
//! OOVFST_LOG environment variable.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use oovfst::bpe::{self, BpeModel};
use oovfst::fst::{
    compose, extract_unk_spans, read_fst_text, shortest_path, write_fst_text, SymbolTable,
};
use oovfst::hclg::{build_hclg, mod_hclg, TransitionModel};
use oovfst::lexicon::{build_l, Lexicon, UNK_WORD};
use oovfst::metrics::{score, ErrorReport};
use oovfst::ngram::{arpa_to_g, BiasConfig};
use oovfst::split::{make_split, oov_report, parse_manifest, write_manifest};
use oovfst::{ArpaModel, Fst, GGraph, LGraph};

#[derive(Parser)]
#[command(name = "oovfst", version, about = "WFST toolkit for OOV-word recognition")]
struct Cli {
    /// Optional key=value config file (penalty, discount, boost_cost,
    /// num_merges); command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the L transducer from a pronunciation lexicon.
    BuildL(BuildLArgs),
    /// Add OOV words from a second lexicon into L.
    AddWords(AddWordsArgs),
    /// Replace the jnk pronunciation of [unk] with a phone-LM FST.
    SpliceUnkLm(SpliceArgs),
    /// Render an ARPA model as the G acceptor.
    BuildG(BuildGArgs),
    /// Add OOV words to L and replace [unk] arcs in G with them.
    ModLg(ModLgArgs),
    /// Bias a subword G towards tokenized OOV words.
    ModG(ModGArgs),
    /// Train a BPE merge list.
    BpeTrain(BpeTrainArgs),
    /// Tokenize text with a trained BPE model.
    BpeApply(BpeApplyArgs),
    /// Compose L and G into a decoding graph over transition ids.
    BuildHclg(BuildHclgArgs),
    /// Point all [unk] arcs of the decoding graph at an inserted HCL.
    ModHclg(ModHclgArgs),
    /// Compose two FSTs sharing the middle symbol table.
    Compose(ComposeArgs),
    /// Print the minimum-cost accepting path of an FST.
    ShortestPath(ShortestPathArgs),
    /// Recover [unk] phone spans from the best path of a composed graph.
    ExtractUnk(ExtractUnkArgs),
    /// Score hypotheses against references (WER, CER, OOV-CER). CER is
    /// computed over the concatenated words, inter-word separators
    /// excluded.
    Score(ScoreArgs),
    /// Split a manifest into a high-OOV test set and a speaker-disjoint
    /// train set.
    MakeSplit(MakeSplitArgs),
}

#[derive(Args)]
struct BuildLArgs {
    #[arg(long)]
    lexicon: PathBuf,
    /// Include the jnk:[unk] pronunciation.
    #[arg(long)]
    add_unk: bool,
    #[arg(long)]
    out_l: PathBuf,
    #[arg(long)]
    out_phones: PathBuf,
    #[arg(long)]
    out_words: PathBuf,
}

#[derive(Args)]
struct AddWordsArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    oov_lexicon: PathBuf,
    #[arg(long)]
    add_unk: bool,
    #[arg(long)]
    out_l: PathBuf,
    #[arg(long)]
    out_phones: PathBuf,
    #[arg(long)]
    out_words: PathBuf,
}

#[derive(Args)]
struct SpliceArgs {
    #[arg(long)]
    lexicon: PathBuf,
    /// Phone-LM acceptor in AT&T text over the lexicon's phone table.
    #[arg(long)]
    unk_lm: PathBuf,
    #[arg(long)]
    out_l: PathBuf,
    #[arg(long)]
    out_phones: PathBuf,
    #[arg(long)]
    out_words: PathBuf,
}

#[derive(Args)]
struct BuildGArgs {
    #[arg(long)]
    arpa: PathBuf,
    /// Word symbol table; derived from the ARPA vocabulary when absent.
    #[arg(long)]
    words: Option<PathBuf>,
    #[arg(long)]
    out_g: PathBuf,
    #[arg(long)]
    out_words: Option<PathBuf>,
}

#[derive(Args)]
struct ModLgArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    arpa: PathBuf,
    #[arg(long)]
    oov_lexicon: PathBuf,
    /// Cost added to each replacement arc, in nats.
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long)]
    out_l: PathBuf,
    #[arg(long)]
    out_g: PathBuf,
    #[arg(long)]
    out_phones: PathBuf,
    #[arg(long)]
    out_words: PathBuf,
}

#[derive(Args)]
struct ModGArgs {
    #[arg(long)]
    arpa: PathBuf,
    /// One OOV word per line.
    #[arg(long)]
    oov_list: PathBuf,
    #[arg(long)]
    bpe_model: PathBuf,
    /// Weight of newly added subword arcs, in nats.
    #[arg(long)]
    boost_cost: Option<f64>,
    /// Cost subtracted from existing subword arcs, in nats.
    #[arg(long)]
    discount: Option<f64>,
    #[arg(long)]
    words: Option<PathBuf>,
    #[arg(long)]
    out_g: PathBuf,
    #[arg(long)]
    out_words: Option<PathBuf>,
}

#[derive(Args)]
struct BpeTrainArgs {
    /// Plain text corpus, whitespace tokenized.
    #[arg(long, conflicts_with = "word_counts")]
    input: Option<PathBuf>,
    /// "word<TAB>count" table instead of running text.
    #[arg(long)]
    word_counts: Option<PathBuf>,
    #[arg(long)]
    merges: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BpeApplyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildHclgArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    arpa: PathBuf,
    /// "phone<TAB>tid" lines, ids dense from 1.
    #[arg(long)]
    transitions: PathBuf,
    /// HMM self-loop probability; 1.0 disables self-loops.
    #[arg(long, default_value_t = 1.0, value_parser = probability)]
    self_loop_prob: f64,
    #[arg(long)]
    add_unk: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    out_words: Option<PathBuf>,
    #[arg(long)]
    out_tids: Option<PathBuf>,
}

#[derive(Args)]
struct ModHclgArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    arpa: PathBuf,
    #[arg(long)]
    transitions: PathBuf,
    #[arg(long)]
    oov_lexicon: PathBuf,
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long, default_value_t = 1.0, value_parser = probability)]
    self_loop_prob: f64,
    /// Mark the transition model context dependent (the surgery then
    /// refuses to run).
    #[arg(long)]
    biphone: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    out_words: Option<PathBuf>,
    #[arg(long)]
    out_tids: Option<PathBuf>,
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Input symbols of a.
    #[arg(long)]
    isyms: PathBuf,
    /// Output symbols of a = input symbols of b.
    #[arg(long)]
    mid_syms: PathBuf,
    /// Output symbols of b.
    #[arg(long)]
    osyms: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShortestPathArgs {
    #[arg(long)]
    fst: PathBuf,
    #[arg(long)]
    isyms: PathBuf,
    #[arg(long)]
    osyms: PathBuf,
    /// Write the path here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractUnkArgs {
    #[arg(long)]
    fst: PathBuf,
    #[arg(long)]
    isyms: PathBuf,
    #[arg(long)]
    osyms: PathBuf,
    #[arg(long, default_value = UNK_WORD)]
    unk_symbol: String,
    /// Join each span's symbols into one recovered string (for
    /// character-based lexicons).
    #[arg(long)]
    join_chars: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// "utt_id<TAB>transcript" per line.
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    hyp: PathBuf,
    /// One OOV word per line; enables OOV-CER.
    #[arg(long)]
    oov_list: Option<PathBuf>,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MakeSplitArgs {
    /// "utt_id<TAB>speaker<TAB>duration<TAB>transcript" per line.
    #[arg(long)]
    manifest: PathBuf,
    /// One in-vocabulary word per line.
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Skip the lowercase/strip-punctuation pre-pass.
    #[arg(long)]
    no_normalize: bool,
}

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err("probability must be in (0, 1]".to_string())
    }
}

/// Defaults, overridable by a key=value config file, overridable by flags.
#[derive(Debug, Clone)]
struct CliConfig {
    penalty: f64,
    discount: f64,
    boost_cost: f64,
    num_merges: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        let bias = BiasConfig::default();
        CliConfig {
            penalty: bias.penalty,
            discount: bias.discount,
            boost_cost: bias.boost_cost,
            num_merges: bpe::DEFAULT_NUM_MERGES,
        }
    }
}

enum CliError {
    Usage(String),
    Domain(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Domain(e)
    }
}

fn load_config(path: Option<&Path>) -> Result<CliConfig, CliError> {
    let mut cfg = CliConfig::default();
    let path = match path {
        Some(p) => p,
        None => return Ok(cfg),
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || CliError::Usage(format!("config line {}: {line:?}", idx + 1));
        let (key, value) = line.split_once('=').ok_or_else(bad)?;
        match key.trim() {
            "penalty" => cfg.penalty = value.trim().parse().map_err(|_| bad())?,
            "discount" => cfg.discount = value.trim().parse().map_err(|_| bad())?,
            "boost_cost" => cfg.boost_cost = value.trim().parse().map_err(|_| bad())?,
            "num_merges" => cfg.num_merges = value.trim().parse().map_err(|_| bad())?,
            other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
        }
    }
    Ok(cfg)
}

fn bias_config(
    cfg: &CliConfig,
    penalty: Option<f64>,
    discount: Option<f64>,
    boost_cost: Option<f64>,
) -> Result<BiasConfig, CliError> {
    let bias = BiasConfig {
        penalty: penalty.unwrap_or(cfg.penalty),
        discount: discount.unwrap_or(cfg.discount),
        boost_cost: boost_cost.unwrap_or(cfg.boost_cost),
    };
    bias.validate().map_err(CliError::Usage)?;
    Ok(bias)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OOVFST_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::BuildL(args) => cmd_build_l(args).map_err(Into::into),
        Command::AddWords(args) => cmd_add_words(args).map_err(Into::into),
        Command::SpliceUnkLm(args) => cmd_splice(args).map_err(Into::into),
        Command::BuildG(args) => cmd_build_g(args).map_err(Into::into),
        Command::ModLg(args) => cmd_mod_lg(args, &cfg),
        Command::ModG(args) => cmd_mod_g(args, &cfg),
        Command::BpeTrain(args) => cmd_bpe_train(args, &cfg),
        Command::BpeApply(args) => cmd_bpe_apply(args).map_err(Into::into),
        Command::BuildHclg(args) => cmd_build_hclg(args).map_err(Into::into),
        Command::ModHclg(args) => cmd_mod_hclg(args, &cfg),
        Command::Compose(args) => cmd_compose(args).map_err(Into::into),
        Command::ShortestPath(args) => cmd_shortest_path(args).map_err(Into::into),
        Command::ExtractUnk(args) => cmd_extract_unk(args).map_err(Into::into),
        Command::Score(args) => cmd_score(args).map_err(Into::into),
        Command::MakeSplit(args) => cmd_make_split(args).map_err(Into::into),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Temp file next to the target, then rename, so readers never observe a
/// half-written file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn read_lexicon(path: &Path) -> Result<Lexicon> {
    Lexicon::parse(&read(path)?).with_context(|| format!("parsing lexicon {}", path.display()))
}

fn read_arpa(path: &Path) -> Result<ArpaModel> {
    ArpaModel::parse(&read(path)?).with_context(|| format!("parsing ARPA {}", path.display()))
}

fn read_symbols(path: &Path) -> Result<SymbolTable> {
    SymbolTable::read_text(&read(path)?)
        .with_context(|| format!("parsing symbol table {}", path.display()))
}

fn read_fst(path: &Path, isyms: &SymbolTable, osyms: &SymbolTable) -> Result<Fst> {
    read_fst_text(&read(path)?, isyms, osyms)
        .with_context(|| format!("parsing FST {}", path.display()))
}

fn write_l_artifacts(
    l: &LGraph,
    out_l: &Path,
    out_phones: &Path,
    out_words: &Path,
) -> Result<()> {
    let text = write_fst_text(&l.fst, &l.phone_syms, &l.word_syms)?;
    write_atomic(out_l, &text)?;
    write_atomic(out_phones, &l.phone_syms.write_text())?;
    write_atomic(out_words, &l.word_syms.write_text())?;
    Ok(())
}

fn write_g_artifacts(g: &GGraph, out_g: &Path, out_words: Option<&Path>) -> Result<()> {
    let text = write_fst_text(&g.fst, &g.word_syms, &g.word_syms)?;
    write_atomic(out_g, &text)?;
    if let Some(path) = out_words {
        write_atomic(path, &g.word_syms.write_text())?;
    }
    Ok(())
}

fn cmd_build_l(args: BuildLArgs) -> Result<()> {
    let lexicon = read_lexicon(&args.lexicon)?;
    let l = build_l(&lexicon, args.add_unk)?;
    write_l_artifacts(&l, &args.out_l, &args.out_phones, &args.out_words)
}

fn cmd_add_words(args: AddWordsArgs) -> Result<()> {
    let lexicon = read_lexicon(&args.lexicon)?;
    let oov = read_lexicon(&args.oov_lexicon)?;
    let mut l = build_l(&lexicon, args.add_unk)?;
    l.add_words(&oov)?;
    write_l_artifacts(&l, &args.out_l, &args.out_phones, &args.out_words)
}

fn cmd_splice(args: SpliceArgs) -> Result<()> {
    let lexicon = read_lexicon(&args.lexicon)?;
    let mut l = build_l(&lexicon, true)?;
    let p = read_fst(&args.unk_lm, &l.phone_syms, &l.phone_syms)?;
    l.splice_unk_lm(&p)?;
    write_l_artifacts(&l, &args.out_l, &args.out_phones, &args.out_words)
}

/// Word table from the ARPA vocabulary, sentence markers excluded.
fn arpa_word_table(model: &ArpaModel) -> SymbolTable {
    let mut syms = SymbolTable::new();
    for token in model.vocab() {
        if token != "<s>" && token != "</s>" {
            syms.add_symbol(token);
        }
    }
    syms
}

fn cmd_build_g(args: BuildGArgs) -> Result<()> {
    let model = read_arpa(&args.arpa)?;
    let syms = match &args.words {
        Some(path) => read_symbols(path)?,
        None => arpa_word_table(&model),
    };
    let g = arpa_to_g(&model, &syms)?;
    write_g_artifacts(&g, &args.out_g, args.out_words.as_deref())
}

fn cmd_mod_lg(args: ModLgArgs, cfg: &CliConfig) -> Result<(), CliError> {
    let bias = bias_config(cfg, args.penalty, None, None)?;
    let inner = || -> Result<()> {
        let lexicon = read_lexicon(&args.lexicon)?;
        let oov = read_lexicon(&args.oov_lexicon)?;
        let mut l = build_l(&lexicon, true)?;
        l.add_words(&oov)?;
        let model = read_arpa(&args.arpa)?;
        let mut g = arpa_to_g(&model, &l.word_syms)?;
        let replaced = g.replace_unk(&oov.words(), &bias)?;
        println!(
            "replaced {replaced} [unk] arc(s) with {} word(s) at penalty {}",
            oov.words().len(),
            bias.penalty
        );
        write_l_artifacts(&l, &args.out_l, &args.out_phones, &args.out_words)?;
        write_g_artifacts(&g, &args.out_g, None)?;
        Ok(())
    };
    inner().map_err(Into::into)
}

fn cmd_mod_g(args: ModGArgs, cfg: &CliConfig) -> Result<(), CliError> {
    let bias = bias_config(cfg, None, args.discount, args.boost_cost)?;
    let inner = || -> Result<()> {
        let model = read_arpa(&args.arpa)?;
        let syms = match &args.words {
            Some(path) => read_symbols(path)?,
            None => arpa_word_table(&model),
        };
        let mut g = arpa_to_g(&model, &syms)?;
        let bpe_model = BpeModel::parse(&read(&args.bpe_model)?)?;
        let oov_words: Vec<String> = read(&args.oov_list)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        let report = g.mod_subwords(&oov_words, &bpe_model, &bias)?;
        println!(
            "biased {} word(s): {} arc(s) added, {} discounted, {} state(s) created",
            report.modified.len(),
            report.arcs_added,
            report.arcs_discounted,
            report.states_added
        );
        for (word, token) in &report.skipped {
            println!("skipped {word}: subword {token} not in the language model");
        }
        write_g_artifacts(&g, &args.out_g, args.out_words.as_deref())?;
        Ok(())
    };
    inner().map_err(Into::into)
}

fn cmd_bpe_train(args: BpeTrainArgs, cfg: &CliConfig) -> Result<(), CliError> {
    let merges = args.merges.unwrap_or(cfg.num_merges);
    let inner = || -> Result<()> {
        let mut corpus: BTreeMap<String, u64> = BTreeMap::new();
        match (&args.input, &args.word_counts) {
            (Some(path), None) => {
                for word in read(path)?.split_whitespace() {
                    *corpus.entry(word.to_string()).or_insert(0) += 1;
                }
            }
            (None, Some(path)) => {
                for (idx, line) in read(path)?.lines().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let (word, count) = line
                        .split_once('\t')
                        .ok_or_else(|| anyhow!("word-count line {} lacks a tab", idx + 1))?;
                    let count: u64 = count
                        .trim()
                        .parse()
                        .with_context(|| format!("word-count line {}", idx + 1))?;
                    *corpus.entry(word.trim().to_string()).or_insert(0) += count;
                }
            }
            _ => bail!("exactly one of --input / --word-counts is required"),
        }
        let model = bpe::train(&corpus, merges)?;
        println!("trained {} merge(s)", model.merges().len());
        write_atomic(&args.out, &model.write_text())
    };
    inner().map_err(Into::into)
}

fn cmd_bpe_apply(args: BpeApplyArgs) -> Result<()> {
    let model = BpeModel::parse(&read(&args.model)?)?;
    let mut out = String::new();
    for line in read(&args.input)?.lines() {
        let mut tokens = Vec::new();
        for word in line.split_whitespace() {
            tokens.extend(model.tokenize(word));
        }
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    write_atomic(&args.out, &out)
}

fn assemble_hclg(
    lexicon: &Path,
    arpa: &Path,
    transitions: &Path,
    self_loop_prob: f64,
    add_unk: bool,
) -> Result<(oovfst::DecodingGraph, TransitionModel)> {
    let lexicon = read_lexicon(lexicon)?;
    let l = build_l(&lexicon, add_unk)?;
    let model = read_arpa(arpa)?;
    let g = arpa_to_g(&model, &l.word_syms)?;
    let tm = TransitionModel::parse(&read(transitions)?, self_loop_prob)?;
    let dg = build_hclg(&l, &g, &tm)?;
    Ok((dg, tm))
}

fn write_hclg_artifacts(
    dg: &oovfst::DecodingGraph,
    out: &Path,
    out_words: Option<&Path>,
    out_tids: Option<&Path>,
) -> Result<()> {
    let tid_syms = dg.tm.tid_symbols();
    let text = write_fst_text(&dg.fst, &tid_syms, &dg.word_syms)?;
    write_atomic(out, &text)?;
    if let Some(path) = out_words {
        write_atomic(path, &dg.word_syms.write_text())?;
    }
    if let Some(path) = out_tids {
        write_atomic(path, &tid_syms.write_text())?;
    }
    Ok(())
}

fn cmd_build_hclg(args: BuildHclgArgs) -> Result<()> {
    let (dg, _) = assemble_hclg(
        &args.lexicon,
        &args.arpa,
        &args.transitions,
        args.self_loop_prob,
        args.add_unk,
    )?;
    write_hclg_artifacts(&dg, &args.out, args.out_words.as_deref(), args.out_tids.as_deref())
}

fn cmd_mod_hclg(args: ModHclgArgs, cfg: &CliConfig) -> Result<(), CliError> {
    let bias = bias_config(cfg, args.penalty, None, None)?;
    let inner = || -> Result<()> {
        let (mut dg, _) = assemble_hclg(
            &args.lexicon,
            &args.arpa,
            &args.transitions,
            args.self_loop_prob,
            true,
        )?;
        dg.tm.context_dependent = args.biphone;
        let oov = read_lexicon(&args.oov_lexicon)?;
        mod_hclg(&mut dg, &oov, &bias)?;
        println!(
            "inserted HCL for {} word(s) at penalty {}",
            oov.len(),
            bias.penalty
        );
        write_hclg_artifacts(&dg, &args.out, args.out_words.as_deref(), args.out_tids.as_deref())
    };
    inner().map_err(Into::into)
}

fn cmd_compose(args: ComposeArgs) -> Result<()> {
    let isyms = read_symbols(&args.isyms)?;
    let mid = read_symbols(&args.mid_syms)?;
    let osyms = read_symbols(&args.osyms)?;
    let a = read_fst(&args.a, &isyms, &mid)?;
    let b = read_fst(&args.b, &mid, &osyms)?;
    let composed = compose(&a, &b);
    write_atomic(&args.out, &write_fst_text(&composed, &isyms, &osyms)?)
}

fn render_path(
    path: &oovfst::LinearPath,
    isyms: &SymbolTable,
    osyms: &SymbolTable,
) -> Result<String> {
    let mut out = format!("total\t{}\n", path.total_weight);
    for arc in &path.arcs {
        let i = isyms
            .symbol(arc.ilabel)
            .ok_or_else(|| anyhow!("no input symbol for label {}", arc.ilabel))?;
        let o = osyms
            .symbol(arc.olabel)
            .ok_or_else(|| anyhow!("no output symbol for label {}", arc.olabel))?;
        out.push_str(&format!("{i}\t{o}\t{}\n", arc.weight));
    }
    Ok(out)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_shortest_path(args: ShortestPathArgs) -> Result<()> {
    let isyms = read_symbols(&args.isyms)?;
    let osyms = read_symbols(&args.osyms)?;
    let fst = read_fst(&args.fst, &isyms, &osyms)?;
    let path = shortest_path(&fst)?;
    emit(args.out.as_deref(), &render_path(&path, &isyms, &osyms)?)
}

fn cmd_extract_unk(args: ExtractUnkArgs) -> Result<()> {
    let isyms = read_symbols(&args.isyms)?;
    let osyms = read_symbols(&args.osyms)?;
    let fst = read_fst(&args.fst, &isyms, &osyms)?;
    let unk = osyms
        .label(&args.unk_symbol)
        .ok_or_else(|| anyhow!("{:?} is not an output symbol", args.unk_symbol))?;
    let path = shortest_path(&fst)?;
    let spans = extract_unk_spans(&path, &isyms, unk);
    let mut out = String::new();
    for span in spans {
        let names: Vec<&str> = span.iter().map(|&l| isyms.symbol(l).unwrap()).collect();
        let line = if args.join_chars {
            names.concat()
        } else {
            names.join(" ")
        };
        out.push_str(&line);
        out.push('\n');
    }
    emit(args.out.as_deref(), &out)
}

fn read_transcripts(path: &Path) -> Result<Vec<(String, Vec<String>)>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in read(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = line
            .split_once('\t')
            .ok_or_else(|| anyhow!("{}:{}: expected utt_id<TAB>transcript", path.display(), idx + 1))?;
        let id = id.trim().to_string();
        if !seen.insert(id.clone()) {
            bail!("{}: duplicate utterance id {id:?}", path.display());
        }
        out.push((id, text.split_whitespace().map(str::to_string).collect()));
    }
    Ok(out)
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let refs = read_transcripts(&args.reference)?;
    let hyps = read_transcripts(&args.hyp)?;
    let hyp_map: BTreeMap<&str, &Vec<String>> =
        hyps.iter().map(|(id, words)| (id.as_str(), words)).collect();
    if hyps.len() != refs.len() {
        let ref_ids: BTreeSet<&str> = refs.iter().map(|(id, _)| id.as_str()).collect();
        for (id, _) in &hyps {
            if !ref_ids.contains(id.as_str()) {
                bail!("hypothesis utterance {id:?} has no reference");
            }
        }
    }
    let oov: BTreeSet<String> = match &args.oov_list {
        Some(path) => read(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect(),
        None => BTreeSet::new(),
    };

    let mut total = ErrorReport::default();
    let mut per_utt = Vec::new();
    for (id, ref_words) in &refs {
        let hyp_words = hyp_map
            .get(id.as_str())
            .ok_or_else(|| anyhow!("hypothesis missing utterance {id:?}"))?;
        let report = score(ref_words, hyp_words, &oov);
        total.merge(&report);
        per_utt.push((id.clone(), report));
    }

    let text = if args.json {
        let utterances: Vec<serde_json::Value> = per_utt
            .iter()
            .map(|(id, r)| {
                serde_json::json!({
                    "id": id,
                    "wer": r.wer(),
                    "substitutions": r.counts.substitutions,
                    "insertions": r.counts.insertions,
                    "deletions": r.counts.deletions,
                    "ref_words": r.counts.ref_words,
                })
            })
            .collect();
        let report = serde_json::json!({
            "wer": total.wer(),
            "cer": total.cer(),
            "oov_cer": total.oov_cer(),
            "counts": total.counts,
            "per_oov": total.per_oov,
            "utterances": utterances,
        });
        format!("{}\n", serde_json::to_string_pretty(&report)?)
    } else {
        let mut out = format!("utterances\t{}\n", per_utt.len());
        let rate = |r: Option<f64>| match r {
            Some(v) => format!("{v:.4}"),
            None => "absent".to_string(),
        };
        out.push_str(&format!(
            "wer\t{}\t(S={} I={} D={} N={})\n",
            rate(total.wer()),
            total.counts.substitutions,
            total.counts.insertions,
            total.counts.deletions,
            total.counts.ref_words
        ));
        out.push_str(&format!("cer\t{}\n", rate(total.cer())));
        out.push_str(&format!("oov_cer\t{}\n", rate(total.oov_cer())));
        for detail in &total.per_oov {
            out.push_str(&format!(
                "oov\t{}\t{}\t{}\n",
                detail.ref_word, detail.candidate, detail.char_edits
            ));
        }
        out
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_make_split(args: MakeSplitArgs) -> Result<()> {
    let manifest = parse_manifest(&read(&args.manifest)?, !args.no_normalize)?;
    let vocab: BTreeSet<String> = read(&args.vocab)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    let split = make_split(&manifest, &vocab)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    write_atomic(&args.out_dir.join("train.tsv"), &write_manifest(&split.train))?;
    write_atomic(&args.out_dir.join("test.tsv"), &write_manifest(&split.test))?;
    let mut types: Vec<(&String, &u64)> = split.oov_types.iter().collect();
    types.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    let oov_words: String = types.iter().map(|(w, _)| format!("{w}\n")).collect();
    write_atomic(&args.out_dir.join("oov_words.txt"), &oov_words)?;
    let stats = serde_json::json!({
        "train_utterances": split.train.len(),
        "test_utterances": split.test.len(),
        "excluded_utterances": split.excluded.len(),
        "oov_type_count": split.oov_types.len(),
        "oov_token_ratio": split.oov_token_ratio(),
        "oov_type_ratio": split.oov_type_ratio(),
        "train_hours": split.train_hours(),
        "test_hours": split.test_hours(),
        "oov_types": split.oov_types,
    });
    write_atomic(
        &args.out_dir.join("stats.json"),
        &format!("{}\n", serde_json::to_string_pretty(&stats)?),
    )?;
    print!("{}", oov_report(&split));
    Ok(())
}
