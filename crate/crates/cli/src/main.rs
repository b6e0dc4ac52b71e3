use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use eventweave::corpus::{clean_text, parse_conllu, split_corpus, Corpus};
use eventweave::dataset::{build_e2e, build_e2s, read_tsv, Dataset, E2ECondition, E2SCondition};
use eventweave::eval::{evaluate_condition, format_table, EvalOptions};
use eventweave::eventify::{eventify_story, NeScope, RepresentationConfig, WordMode};
use eventweave::genre::{train_lda_corpus, GenreAssignment, LdaConfig, TopicModel};
use eventweave::lexicon::Lexicons;
use eventweave::pipeline::{run_pipeline, PipelineConfig};
use eventweave::seqmodel::{ConditionalSequenceModel, DEFAULT_BEAM, DEFAULT_K, MAX_SENTENCE_LEN};
use eventweave::splitprune::split_and_prune;

#[derive(Parser)]
#[command(name = "eventweave", version, about = "Event representations and story generation over parsed story corpora")]
struct Cli {
    /// WordNet database directory (data.noun, index.noun, ...).
    #[arg(long, global = true)]
    wordnet: Option<PathBuf>,
    /// VerbNet XML file or directory.
    #[arg(long, global = true)]
    verbnet: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read CoNLL-U files into a binary corpus, optionally with a train/validation/test split.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write <out>.train/.validation/.test split by story.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the events of every sentence as JSON lines.
    Eventify {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "original")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "sentence")]
        ne_scope: Scope,
        /// Topic model whose genre is appended to each event.
        #[arg(long)]
        genre: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write split-and-pruned sentence fragments as JSON lines.
    Splitprune {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a topic model over stories.
    TrainLda {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 100)]
        topics: usize,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 13)]
        seed: u64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        beta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a pair file for an event-to-event or event-to-sentence condition.
    Dataset {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Event-to-event condition number (0-11) or event-to-sentence name (orig-orig, gen-gen, ...).
        #[arg(long)]
        condition: String,
        #[arg(long)]
        genre: Option<PathBuf>,
        /// Split the corpus by story first and write one file per part.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value = "pairs")]
        stem: String,
    },
    /// Train a sequence model on a pair file.
    Train {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode one input sequence.
    Decode {
        #[arg(long)]
        model: PathBuf,
        /// Space-separated input tokens.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = DEFAULT_BEAM)]
        beam: usize,
        #[arg(long, default_value_t = MAX_SENTENCE_LEN)]
        max_len: usize,
        /// Greedy decoding instead of beam search.
        #[arg(long)]
        greedy: bool,
    },
    /// Score a model on held-out pairs.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        strip_genre: bool,
        #[arg(long, default_value_t = DEFAULT_BEAM)]
        beam: usize,
        #[arg(long, default_value_t = MAX_SENTENCE_LEN)]
        max_len: usize,
        /// Add-one smoothing for BLEU.
        #[arg(long)]
        smooth: bool,
        /// Row label in the report.
        #[arg(long)]
        label: Option<String>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Generate a story continuation from a seed sentence.
    Generate {
        /// CoNLL-U file; its first sentence is the seed.
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        e2e: PathBuf,
        #[arg(long)]
        e2s: PathBuf,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        /// JSON pipeline configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Transcript destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Original,
    Ne,
    Generalized,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    Sentence,
    Pair,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    E2e,
    E2s,
}

fn lexicons(cli: &Cli, required: bool) -> Result<Lexicons> {
    match (&cli.wordnet, &cli.verbnet) {
        (Some(wn), Some(vn)) => Lexicons::load(wn, vn).context("loading lexicons"),
        (None, None) if !required => Ok(Lexicons::default()),
        _ => bail!("this command needs both --wordnet and --verbnet"),
    }
}

fn conllu_files(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .with_context(|| format!("reading {}", input.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "conllu"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .conllu files in {}", input.display());
    }
    Ok(files)
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::load(path).with_context(|| format!("loading corpus {}", path.display()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}{ext}"))
}

fn genres(path: Option<&PathBuf>, corpus: &Corpus) -> Result<Option<GenreAssignment>> {
    path.map(|p| {
        let model = TopicModel::load(p).with_context(|| format!("loading topic model {}", p.display()))?;
        Ok(model.assign_corpus(corpus))
    })
    .transpose()
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<usize> {
    let mut out = BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    let mut n = 0;
    for item in items {
        serde_json::to_writer(&mut out, &item)?;
        out.write_all(b"\n")?;
        n += 1;
    }
    out.flush()?;
    Ok(n)
}

enum Condition {
    E2e(E2ECondition),
    E2s(E2SCondition),
}

impl Condition {
    fn parse(kind: Kind, condition: &str) -> Result<Self> {
        Ok(match kind {
            Kind::E2e => {
                let id: u8 = condition
                    .parse()
                    .with_context(|| format!("event-to-event condition must be 0-11, got {condition:?}"))?;
                Condition::E2e(E2ECondition::from_id(id).with_context(|| format!("no condition {id}"))?)
            }
            Kind::E2s => Condition::E2s(condition.parse()?),
        })
    }

    fn needs_lexicons(&self) -> bool {
        match self {
            Condition::E2e(c) => !matches!(
                c,
                E2ECondition::OriginalSentences | E2ECondition::OriginalWords | E2ECondition::OriginalWithNe
            ),
            Condition::E2s(c) => !matches!(c, E2SCondition::OrigEventOrigSent | E2SCondition::OrigEventSpSent),
        }
    }

    fn build(&self, corpus: &Corpus, lex: &Lexicons, genres: Option<&GenreAssignment>) -> Result<Dataset> {
        Ok(match self {
            Condition::E2e(c) => build_e2e(corpus, *c, lex, genres)?,
            Condition::E2s(c) => build_e2s(corpus, *c, lex),
        })
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest { input, out, seed } => {
            let mut stories = Vec::new();
            for file in conllu_files(input)? {
                let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
                let parsed = parse_conllu(&text).with_context(|| format!("parsing {}", file.display()))?;
                stories.extend(parsed.stories);
            }
            for s in stories.iter_mut().flat_map(|s| s.sentences.iter_mut()) {
                s.raw_text = clean_text(&s.raw_text);
            }
            let corpus = Corpus::new(stories)?;
            corpus.save(out)?;
            println!("{} stories, {} sentences -> {}", corpus.len(), corpus.sentence_count(), out.display());
            if let Some(seed) = seed {
                let split = split_corpus(&corpus, *seed)?;
                for (name, part) in [("train", &split.train), ("validation", &split.validation), ("test", &split.test)] {
                    let path = with_suffix(out, name);
                    part.save(&path)?;
                    println!("{name}: {} stories -> {}", part.len(), path.display());
                }
            }
        }
        Command::Eventify { corpus, mode, ne_scope, genre, out } => {
            let corpus = load_corpus(corpus)?;
            let lex = lexicons(cli, matches!(mode, Mode::Generalized))?;
            let mut config = RepresentationConfig::new(match mode {
                Mode::Original => WordMode::Original,
                Mode::Ne => WordMode::OriginalWithNe,
                Mode::Generalized => WordMode::Generalized,
            });
            if matches!(ne_scope, Scope::Pair) {
                config.ne_numbering = NeScope::Continued;
            }
            config.include_genre = genre.is_some();
            let genres = genres(genre.as_ref(), &corpus)?;
            let records = corpus.stories.iter().flat_map(|s| {
                let g = genres.as_ref().and_then(|m| m.get(&s.id).copied());
                eventify_story(s, &config, &lex, g)
            });
            let n = write_jsonl(out, records)?;
            println!("{n} events -> {}", out.display());
        }
        Command::Splitprune { corpus, out } => {
            let corpus = load_corpus(corpus)?;
            let n = write_jsonl(
                out,
                corpus
                    .sentences()
                    .flat_map(split_and_prune)
                    .map(|f| f.record()),
            )?;
            println!("{n} fragments -> {}", out.display());
        }
        Command::TrainLda { corpus, topics, iters, seed, alpha, beta, out } => {
            let corpus = load_corpus(corpus)?;
            let config = LdaConfig {
                topics: *topics,
                iterations: *iters,
                alpha: *alpha,
                beta: *beta,
                seed: *seed,
            };
            let model = train_lda_corpus(&corpus, &config)?;
            model.save(out)?;
            println!("{topics} topics over {} words -> {}", model.vocab_size(), out.display());
        }
        Command::Dataset { corpus, kind, condition, genre, seed, out_dir, stem } => {
            let condition = Condition::parse(*kind, condition)?;
            let corpus = load_corpus(corpus)?;
            let lex = lexicons(cli, condition.needs_lexicons())?;
            let genres = genres(genre.as_ref(), &corpus)?;
            let parts: Vec<(String, Corpus)> = match seed {
                Some(seed) => {
                    let split = split_corpus(&corpus, *seed)?;
                    vec![
                        (format!("{stem}.train"), split.train),
                        (format!("{stem}.validation"), split.validation),
                        (format!("{stem}.test"), split.test),
                    ]
                }
                None => vec![(stem.clone(), corpus)],
            };
            for (name, part) in parts {
                let mut ds = condition.build(&part, &lex, genres.as_ref())?;
                if let Some(seed) = seed {
                    ds = ds.with_seed(*seed);
                }
                ds.save(out_dir, &name)?;
                println!("{name}: {} pairs", ds.pairs.len());
            }
        }
        Command::Train { pairs, order, k, out } => {
            let text = fs::read_to_string(pairs).with_context(|| format!("reading {}", pairs.display()))?;
            let pairs = read_tsv(&text)?;
            let model = ConditionalSequenceModel::train(&pairs, *order, *k)?;
            model.save(out)?;
            println!(
                "{} pairs, {} output tokens -> {}",
                pairs.len(),
                model.vocabulary().len(),
                out.display()
            );
        }
        Command::Decode { model, input, beam, max_len, greedy } => {
            let model = ConditionalSequenceModel::load(model)?;
            let input: Vec<&str> = input.split_whitespace().collect();
            let out = if *greedy {
                model.greedy_decode(&input, *max_len)
            } else {
                model.beam_decode(&input, *beam, *max_len)
            };
            println!("{}", out.join(" "));
        }
        Command::Evaluate { model, pairs, strip_genre, beam, max_len, smooth, label, json } => {
            let name = label.clone().unwrap_or_else(|| pairs.display().to_string());
            let model = ConditionalSequenceModel::load(model)?;
            let text = fs::read_to_string(pairs).with_context(|| format!("reading {}", pairs.display()))?;
            let opts = EvalOptions {
                strip_genre: *strip_genre,
                beam: *beam,
                max_len: *max_len,
                smooth_bleu: *smooth,
                ..Default::default()
            };
            let report = evaluate_condition(&model, &read_tsv(&text)?, &name, &opts)?;
            print!("{}", format_table(std::slice::from_ref(&report)));
            let rendered = serde_json::to_string_pretty(&report)?;
            match json {
                Some(path) => fs::write(path, rendered)?,
                None => println!("{rendered}"),
            }
        }
        Command::Generate { seed, e2e, e2s, steps, config, out } => {
            let config: PipelineConfig = match config {
                Some(p) => serde_json::from_str(&fs::read_to_string(p)?)
                    .with_context(|| format!("parsing {}", p.display()))?,
                None => PipelineConfig::default(),
            };
            let generalized = config.representation.word_mode == WordMode::Generalized;
            let lex = lexicons(cli, generalized)?;
            let text = fs::read_to_string(seed).with_context(|| format!("reading {}", seed.display()))?;
            let seed_corpus = parse_conllu(&text)?;
            let seed = seed_corpus.sentences().next().context("seed file has no sentence")?;
            let e2e = ConditionalSequenceModel::load(e2e)?;
            let e2s = ConditionalSequenceModel::load(e2s)?;
            let transcript = run_pipeline(seed, &e2e, &e2s, *steps, &config, &lex)?;
            if let Some(why) = &transcript.aborted {
                log::warn!("{why}");
            }
            let jsonl = transcript.to_jsonl()?;
            match out {
                Some(p) => fs::write(p, jsonl)?,
                None => print!("{jsonl}"),
            }
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
