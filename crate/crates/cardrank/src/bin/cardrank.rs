//! Batch command-line front end: every subcommand is a thin composition of
//! library operations. Exit codes: 0 success, 1 usage error, 2 data error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use cardrank::error::Error;
use cardrank::eval::{
    cross_validate, evaluate, predict_for_qpvs, train_strategy_model, write_summary_tsv, CvConfig,
    StrategyOptions,
};
use cardrank::gbt::{GbtConfig, GbtModel};
use cardrank::labeling::{
    import_human_judgments, label_approx_pairwise, label_ctr, label_discounted_pointwise,
    label_listwise, label_movement_pointwise, label_naive_pointwise, label_pairwise,
    write_card_labels, write_list_labels, write_pair_labels, AplSignRule, CardLabel,
    MovementConfig, PositivePolicy, Strategy,
};
use cardrank::ltl::{
    fit_ltl_per_query, read_ltl_models, write_ltl_models, write_value_report, FitConfig,
};
use cardrank::qpv::{chain_sessions, parse_qpv_log, write_qpv_log, Qpv};
use cardrank::ranking::{
    rank_listwise, rank_pointwise, read_candidate_lists, write_feature_dump, FeatureIndex,
    RankRequest,
};
use cardrank::synth::{generate_log, GroundTruth, WorldConfig};

fn parse_strategy(s: &str) -> Result<Strategy, Error> {
    s.parse()
}

#[derive(Parser)]
#[command(name = "cardrank", version, about = "Card ranking from query-reformulation feedback")]
struct Cli {
    /// Worker threads for parallel stages (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// TOML file overriding module defaults (sections: movement, ltl, gbt, cv, synth).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Emit machine-readable progress records on stderr.
    #[arg(long, global = true)]
    progress: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PositivesArg {
    /// Label every satisfied QPV positive.
    All,
    /// Label only satisfied QPVs that resolved a reformulation.
    PostReform,
}

impl From<PositivesArg> for PositivePolicy {
    fn from(value: PositivesArg) -> Self {
        match value {
            PositivesArg::All => PositivePolicy::All,
            PositivesArg::PostReform => PositivePolicy::PostReform,
        }
    }
}

/// Strategy knobs shared by label-producing subcommands.
#[derive(Args)]
struct StrategyFlags {
    /// Appeared-card default for movement labels.
    #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
    d_plus: Option<f64>,

    /// Disappeared-card default for movement labels.
    #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
    d_minus: Option<f64>,

    /// Which satisfied QPVs receive positive pointwise labels.
    #[arg(long, value_enum)]
    positives: Option<PositivesArg>,

    /// Emit approximated-pairwise labels uncombined (two per pair).
    #[arg(long)]
    uncombined: bool,

    /// Compatibility sign rule: preferred card always labeled positive.
    #[arg(long)]
    paper_example_signs: bool,

    /// Human judgments TSV (query, card_type, grade).
    #[arg(long, value_name = "FILE")]
    judgments: Option<PathBuf>,
}

#[derive(Args)]
struct GbtFlags {
    /// Number of boosted trees.
    #[arg(long)]
    trees: Option<usize>,

    /// Leaf-node budget per tree.
    #[arg(long)]
    leaves: Option<usize>,

    /// Shrinkage (learning rate) per tree.
    #[arg(long)]
    shrinkage: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics for a QPV log.
    Stats {
        #[arg(short, long, value_name = "LOG")]
        input: PathBuf,
        /// Report JSON (stdout when omitted).
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },

    /// Derive training labels from a QPV log (or judgments TSV for human).
    DeriveLabels {
        #[arg(short, long, value_name = "FILE")]
        input: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        /// npl, dpl, mpl, apl, pairwise, ll, ltl, ctr, or human.
        #[arg(long)]
        strategy: String,
        /// Pre-fitted credit model store for ltl (fits on the input otherwise).
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        #[command(flatten)]
        strategy_flags: StrategyFlags,
    },

    /// Fit per-query credit models.
    FitLtl {
        #[arg(short, long, value_name = "LOG")]
        input: PathBuf,
        /// Model store (one JSON record per query term).
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        /// Also write a per-card value report TSV.
        #[arg(long, value_name = "FILE")]
        values: Option<PathBuf>,
    },

    /// Train a ranking model for one strategy.
    Train {
        #[arg(short, long, value_name = "LOG")]
        input: PathBuf,
        /// Model file (versioned JSON).
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        /// Also save the feature index.
        #[arg(long, value_name = "FILE")]
        index: Option<PathBuf>,
        /// Also dump every indexed feature vector as TSV.
        #[arg(long, value_name = "FILE")]
        dump_features: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        gbt_flags: GbtFlags,
        #[command(flatten)]
        strategy_flags: StrategyFlags,
    },

    /// Rank a candidate card pool for one query.
    Rank {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Feature index saved by train.
        #[arg(long, value_name = "FILE")]
        index: Option<PathBuf>,
        /// Build the index from this log instead.
        #[arg(short, long, value_name = "LOG")]
        input: Option<PathBuf>,
        #[arg(long)]
        query: String,
        /// Comma-separated candidate card types.
        #[arg(long, value_name = "A,B,C")]
        cards: String,
        #[arg(long)]
        max_list_size: Option<usize>,
        /// Score whole rankings (listwise-label models).
        #[arg(long)]
        listwise: bool,
        /// Candidate-list file (one JSON array per line) for listwise scoring.
        #[arg(long, value_name = "FILE")]
        candidate_lists: Option<PathBuf>,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },

    /// Evaluate a model against a log with the exact-match protocol.
    Evaluate {
        #[arg(short, long, value_name = "LOG")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, value_name = "FILE")]
        index: Option<PathBuf>,
        /// Build the feature index from this training log instead.
        #[arg(long, value_name = "LOG")]
        train_log: Option<PathBuf>,
        #[arg(long)]
        listwise: bool,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },

    /// K-fold cross-validation of one strategy over a log.
    CrossValidate {
        #[arg(short, long, value_name = "LOG")]
        input: PathBuf,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report JSON (stdout when omitted).
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Also write a one-row summary TSV for comparison tables.
        #[arg(long, value_name = "FILE")]
        tsv: Option<PathBuf>,
        #[command(flatten)]
        gbt_flags: GbtFlags,
        #[command(flatten)]
        strategy_flags: StrategyFlags,
    },

    /// Generate a synthetic QPV log with ground-truth relevance.
    SynthGen {
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        /// Ground-truth sidecar (one JSON record per query).
        #[arg(long, value_name = "FILE")]
        truth: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        queries: Option<usize>,
        #[arg(long)]
        cards: Option<usize>,
        #[arg(long)]
        sessions: Option<usize>,
        #[arg(long)]
        steepness: Option<f64>,
    },
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// ── Config file ─────────────────────────────────────────────────────────

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    movement: MovementSection,
    #[serde(default)]
    ltl: LtlSection,
    #[serde(default)]
    gbt: GbtSection,
    #[serde(default)]
    cv: CvSection,
    #[serde(default)]
    synth: SynthSection,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MovementSection {
    d_plus: Option<f64>,
    d_minus: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LtlSection {
    l2_lambda: Option<f64>,
    max_iterations: Option<usize>,
    gradient_tolerance: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GbtSection {
    num_trees: Option<usize>,
    max_leaf_nodes: Option<usize>,
    shrinkage: Option<f64>,
    min_samples_per_leaf: Option<usize>,
    feature_subsample: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CvSection {
    num_folds: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthSection {
    num_queries: Option<usize>,
    num_card_types: Option<usize>,
    num_sessions: Option<usize>,
    relevance_concentration: Option<f64>,
    reformulation_steepness: Option<f64>,
    click_scale: Option<f64>,
    cards_per_page: Option<BTreeMap<String, f64>>,
}

/// Module defaults, overridden by the config file; CLI flags override both.
struct Tuning {
    movement: MovementConfig,
    ltl: FitConfig,
    gbt: GbtConfig,
    cv: CvConfig,
    synth: WorldConfig,
}

fn load_tuning(path: Option<&Path>) -> CliResult<Tuning> {
    let mut tuning = Tuning {
        movement: MovementConfig::default(),
        ltl: FitConfig::default(),
        gbt: GbtConfig::default(),
        cv: CvConfig::default(),
        synth: WorldConfig::default(),
    };
    let Some(path) = path else {
        return Ok(tuning);
    };
    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
    let file: FileConfig = toml::from_str(&text)
        .map_err(|e| usage(format!("config file {}: {e}", path.display())))?;

    macro_rules! apply {
        ($target:expr, $section:expr, $($field:ident),+) => {
            $(if let Some(v) = $section.$field { $target.$field = v; })+
        };
    }
    apply!(tuning.movement, file.movement, d_plus, d_minus);
    apply!(tuning.ltl, file.ltl, l2_lambda, max_iterations, gradient_tolerance);
    apply!(
        tuning.gbt,
        file.gbt,
        num_trees,
        max_leaf_nodes,
        shrinkage,
        min_samples_per_leaf,
        feature_subsample
    );
    apply!(tuning.cv, file.cv, num_folds);
    apply!(
        tuning.synth,
        file.synth,
        num_queries,
        num_card_types,
        num_sessions,
        relevance_concentration,
        reformulation_steepness
    );
    if let Some(scale) = file.synth.click_scale {
        tuning.synth.click_model.scale = scale;
    }
    if let Some(dist) = file.synth.cards_per_page {
        let mut parsed = BTreeMap::new();
        for (k, w) in dist {
            let size: usize = k
                .parse()
                .map_err(|_| usage(format!("config: page size {k:?} is not an integer")))?;
            parsed.insert(size, w);
        }
        tuning.synth.cards_per_page_distribution = parsed;
    }
    Ok(tuning)
}

// ── I/O helpers ─────────────────────────────────────────────────────────

fn load_log(path: &Path) -> CliResult<Vec<Qpv>> {
    let file = File::open(path).map_err(Error::Io)?;
    Ok(parse_qpv_log(BufReader::new(file))?)
}

/// Write through a temp file and rename, so interrupted runs never leave a
/// truncated output behind.
fn write_atomic(
    path: &Path,
    write_fn: impl FnOnce(&mut dyn Write) -> Result<(), Error>,
) -> CliResult<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| usage(format!("output path {} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!("{}.tmp", file_name.to_string_lossy()));
    let result = (|| -> Result<(), Error> {
        let mut writer = BufWriter::new(File::create(&tmp)?);
        write_fn(&mut writer)?;
        writer.flush()?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    std::fs::rename(&tmp, path).map_err(Error::Io)?;
    Ok(())
}

/// Write JSON to a file atomically, or pretty-print to stdout.
fn emit_json<T: serde::Serialize>(value: &T, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => write_atomic(path, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, value).map_err(Error::Json)?;
            lock.write_all(b"\n").map_err(Error::Io)?;
            Ok(())
        }
    }
}

fn strategy_options(flags: &StrategyFlags, tuning: &Tuning) -> CliResult<StrategyOptions> {
    let mut movement = tuning.movement;
    if let Some(d) = flags.d_plus {
        movement.d_plus = d;
    }
    if let Some(d) = flags.d_minus {
        movement.d_minus = d;
    }
    movement.validate()?;
    let judgments = match &flags.judgments {
        Some(path) => {
            let file = File::open(path).map_err(Error::Io)?;
            Some(import_human_judgments(BufReader::new(file))?)
        }
        None => None,
    };
    Ok(StrategyOptions {
        movement,
        positives: flags.positives.map(Into::into).unwrap_or_default(),
        apl_combine: !flags.uncombined,
        apl_sign_rule: if flags.paper_example_signs {
            AplSignRule::PreferredAlwaysPositive
        } else {
            AplSignRule::Definition
        },
        ltl_fit: tuning.ltl,
        human_judgments: judgments,
    })
}

fn apply_gbt_flags(gbt: &mut GbtConfig, flags: &GbtFlags, seed: Option<u64>) {
    if let Some(trees) = flags.trees {
        gbt.num_trees = trees;
    }
    if let Some(leaves) = flags.leaves {
        gbt.max_leaf_nodes = leaves;
    }
    if let Some(shrinkage) = flags.shrinkage {
        gbt.shrinkage = shrinkage;
    }
    if let Some(seed) = seed {
        gbt.seed = seed;
    }
}

fn progress(enabled: bool, step: &str) {
    if enabled {
        eprintln!("{{\"progress\":\"{step}\"}}");
    }
}

// ── Subcommands ─────────────────────────────────────────────────────────

fn cmd_derive_labels(
    input: &Path,
    output: &Path,
    strategy: &str,
    model: Option<&Path>,
    flags: &StrategyFlags,
    tuning: &Tuning,
) -> CliResult<()> {
    let opts = strategy_options(flags, tuning)?;
    if strategy.eq_ignore_ascii_case("pairwise") {
        let qpvs = load_log(input)?;
        let labels = label_pairwise(&qpvs);
        return write_atomic(output, |w| write_pair_labels(&labels, w));
    }
    let strategy: Strategy = strategy.parse().map_err(|e: Error| usage(e.to_string()))?;
    if strategy == Strategy::Human {
        let file = File::open(input).map_err(Error::Io)?;
        let labels = import_human_judgments(BufReader::new(file))?;
        return write_atomic(output, |w| write_card_labels(&labels, w));
    }

    let qpvs = load_log(input)?;
    let labels: Vec<CardLabel> = match strategy {
        Strategy::Npl => {
            let pairs = chain_sessions(&qpvs)?;
            label_naive_pointwise(&qpvs, &pairs, opts.positives)
        }
        Strategy::Dpl => {
            let pairs = chain_sessions(&qpvs)?;
            label_discounted_pointwise(&qpvs, &pairs, opts.positives)
        }
        Strategy::Mpl => {
            let pairs = chain_sessions(&qpvs)?;
            label_movement_pointwise(&pairs, &opts.movement)
        }
        Strategy::Apl => label_approx_pairwise(&qpvs, opts.apl_combine, opts.apl_sign_rule),
        Strategy::Ctr => label_ctr(&qpvs),
        Strategy::Ll => {
            let labels = label_listwise(&qpvs);
            return write_atomic(output, |w| write_list_labels(&labels, w));
        }
        Strategy::Ltl => {
            let models = match model {
                Some(path) => {
                    let file = File::open(path).map_err(Error::Io)?;
                    read_ltl_models(BufReader::new(file))?
                }
                None => fit_ltl_per_query(&qpvs, &tuning.ltl)?,
            };
            let by_query: BTreeMap<&str, _> =
                models.iter().map(|m| (m.query.as_str(), m)).collect();
            let mut labels = Vec::new();
            let mut cold = 0usize;
            for qpv in &qpvs {
                let model = by_query
                    .get(qpv.query.as_str())
                    .ok_or_else(|| Error::UnknownQuery(qpv.query.clone()))?;
                let labeled = model.qpv_labels(qpv)?;
                cold += labeled.cold_cards.len();
                labels.extend(labeled.labels);
            }
            if cold > 0 {
                eprintln!(
                    "warning: {cold} card observations were cold (zero-weight) under the model store"
                );
            }
            labels
        }
        Strategy::Human => unreachable!("handled above"),
    };
    write_atomic(output, |w| write_card_labels(&labels, w))
}

fn run(cli: Cli) -> CliResult<()> {
    let tuning = load_tuning(cli.config.as_deref())?;
    match cli.command {
        Command::Stats { input, output } => {
            let qpvs = load_log(&input)?;
            progress(cli.progress, "log-parsed");
            let report = cardrank::stats::compute_stats(&qpvs)?;
            emit_json(&report, output.as_deref())
        }

        Command::DeriveLabels {
            input,
            output,
            strategy,
            model,
            strategy_flags,
        } => {
            cmd_derive_labels(
                &input,
                &output,
                &strategy,
                model.as_deref(),
                &strategy_flags,
                &tuning,
            )?;
            progress(cli.progress, "labels-written");
            Ok(())
        }

        Command::FitLtl {
            input,
            output,
            values,
        } => {
            let qpvs = load_log(&input)?;
            let models = fit_ltl_per_query(&qpvs, &tuning.ltl)?;
            progress(cli.progress, "models-fit");
            write_atomic(&output, |w| write_ltl_models(&models, w))?;
            if let Some(values_path) = values {
                let mut by_query: BTreeMap<&str, Vec<Qpv>> = BTreeMap::new();
                for qpv in &qpvs {
                    by_query.entry(&qpv.query).or_default().push(qpv.clone());
                }
                let reports = models
                    .iter()
                    .map(|m| m.card_values(&by_query[m.query.as_str()]))
                    .collect::<Result<Vec<_>, _>>()?;
                write_atomic(&values_path, |w| write_value_report(&reports, w))?;
            }
            Ok(())
        }

        Command::Train {
            input,
            output,
            strategy,
            index,
            dump_features,
            seed,
            gbt_flags,
            strategy_flags,
        } => {
            let opts = strategy_options(&strategy_flags, &tuning)?;
            if strategy == Strategy::Human && opts.human_judgments.is_none() {
                return Err(usage("--strategy human requires --judgments <TSV>"));
            }
            let qpvs = load_log(&input)?;
            let mut gbt = tuning.gbt;
            apply_gbt_flags(&mut gbt, &gbt_flags, seed);
            let feature_index = FeatureIndex::build(&qpvs);
            progress(cli.progress, "index-built");
            let model = train_strategy_model(strategy, &qpvs, &feature_index, &gbt, &opts)?;
            progress(cli.progress, "model-trained");
            write_atomic(&output, |w| model.save(&mut *w))?;
            if let Some(index_path) = index {
                write_atomic(&index_path, |w| feature_index.save(&mut *w))?;
            }
            if let Some(dump_path) = dump_features {
                write_atomic(&dump_path, |w| write_feature_dump(&feature_index, w))?;
            }
            Ok(())
        }

        Command::Rank {
            model,
            index,
            input,
            query,
            cards,
            max_list_size,
            listwise,
            candidate_lists,
            output,
        } => {
            let model = GbtModel::load(BufReader::new(File::open(&model).map_err(Error::Io)?))?;
            let feature_index = match (index, input) {
                (Some(path), _) => {
                    FeatureIndex::load(BufReader::new(File::open(&path).map_err(Error::Io)?))?
                }
                (None, Some(log)) => FeatureIndex::build(&load_log(&log)?),
                (None, None) => {
                    return Err(usage("rank needs --index FILE or --input LOG to build features"))
                }
            };
            let candidates: Vec<String> = cards
                .split(',')
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty())
                .collect();
            let mut request = RankRequest::new(query, candidates);
            if let Some(cap) = max_list_size {
                request.max_list_size = cap;
            }
            let lists = match candidate_lists {
                Some(path) => Some(read_candidate_lists(BufReader::new(
                    File::open(&path).map_err(Error::Io)?,
                ))?),
                None => None,
            };
            let prediction = if listwise {
                rank_listwise(&model, &feature_index, &request, lists.as_deref())?
            } else {
                rank_pointwise(&model, &feature_index, &request)?
            };
            emit_json(&prediction, output.as_deref())
        }

        Command::Evaluate {
            input,
            model,
            index,
            train_log,
            listwise,
            output,
        } => {
            let model = GbtModel::load(BufReader::new(File::open(&model).map_err(Error::Io)?))?;
            let feature_index = match (index, train_log) {
                (Some(path), _) => {
                    FeatureIndex::load(BufReader::new(File::open(&path).map_err(Error::Io)?))?
                }
                (None, Some(log)) => FeatureIndex::build(&load_log(&log)?),
                (None, None) => {
                    return Err(usage(
                        "evaluate needs --index FILE or --train-log LOG to build features",
                    ))
                }
            };
            let qpvs = load_log(&input)?;
            let predictions = predict_for_qpvs(&model, &feature_index, &qpvs, listwise)?;
            progress(cli.progress, "predictions-issued");
            let report = evaluate(&predictions, &qpvs)?;
            emit_json(&report, output.as_deref())
        }

        Command::CrossValidate {
            input,
            strategy,
            folds,
            seed,
            output,
            tsv,
            gbt_flags,
            strategy_flags,
        } => {
            let opts = strategy_options(&strategy_flags, &tuning)?;
            if strategy == Strategy::Human && opts.human_judgments.is_none() {
                return Err(usage("--strategy human requires --judgments <TSV>"));
            }
            let qpvs = load_log(&input)?;
            let mut gbt = tuning.gbt;
            apply_gbt_flags(&mut gbt, &gbt_flags, seed);
            let mut cv = tuning.cv;
            if let Some(folds) = folds {
                cv.num_folds = folds;
            }
            if let Some(seed) = seed {
                cv.seed = seed;
            }
            let report = cross_validate(&qpvs, strategy, &gbt, &cv, &opts)?;
            progress(cli.progress, "folds-evaluated");
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            if let Some(tsv_path) = &tsv {
                write_atomic(tsv_path, |w| write_summary_tsv(std::slice::from_ref(&report), w))?;
            }
            emit_json(&report, output.as_deref())
        }

        Command::SynthGen {
            output,
            truth,
            seed,
            queries,
            cards,
            sessions,
            steepness,
        } => {
            let mut config = tuning.synth;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(queries) = queries {
                config.num_queries = queries;
            }
            if let Some(cards) = cards {
                config.num_card_types = cards;
            }
            if let Some(sessions) = sessions {
                config.num_sessions = sessions;
            }
            if let Some(steepness) = steepness {
                config.reformulation_steepness = steepness;
            }
            let (qpvs, ground_truth) = generate_log(&config)?;
            progress(cli.progress, "log-generated");
            write_atomic(&output, |w| write_qpv_log(&qpvs, w))?;
            if let Some(truth_path) = truth {
                write_atomic(&truth_path, |w| GroundTruth::write(&ground_truth, w))?;
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(workers) = cli.workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Data(e)) => {
            if is_broken_pipe(&e) {
                std::process::exit(0);
            }
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn is_broken_pipe(e: &Error) -> bool {
    match e {
        Error::Io(io) => io.kind() == std::io::ErrorKind::BrokenPipe,
        Error::Json(json) => json.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe),
        _ => false,
    }
}
