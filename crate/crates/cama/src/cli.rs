//! Command-line interface: one binary, one subcommand per pipeline stage.
//!
//! Every run resolves its parameters (defaults, then an optional `--config`
//! JSON file, then explicit flags) and echoes the resolved set to a sidecar
//! file in the output directory, so any run can be reproduced by pointing
//! `--config` at its sidecar. Diagnostics go to stderr; data goes to files
//! in the output directory or to stdout.
//!
//! Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::corpus::{load_corpus, save_corpus, Corpus};
use crate::datagen::{self, GenConfig, LenRange};
use crate::error::{Error, Result};
use crate::eval;
use crate::graph::build_graph;
use crate::rwr::{recommend, WalkConfig};
use crate::target::{cama_scores, Thresholds};
use crate::transition::build_transition;

#[derive(Debug, Parser)]
#[command(name = "cama", version, about = "Common-artist music recommender")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for generated files, reports and config sidecars.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,

    /// RNG seed (corpus generation, train/test splits).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Report format for evaluate and sweep.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic corpus.
    Generate(GenerateArgs),
    /// Score every listener and flag the selected targets.
    SelectTargets(SelectTargetsArgs),
    /// Build the listener-song graph and print its statistics.
    BuildGraph(BuildGraphArgs),
    /// Rank unplayed songs for one listener.
    Recommend(RecommendArgs),
    /// Run one train/test evaluation.
    Evaluate(EvaluateArgs),
    /// Sweep alpha and both thresholds independently.
    Sweep(SweepArgs),
}

const DEFAULT_PLAYLISTS: &str = "playlists.jsonl";
const DEFAULT_SONGS: &str = "songs.jsonl";

// ---------------------------------------------------------------------------
// Per-subcommand parameter sets (the sidecar format) and their flag sets.
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Parameter file (e.g. a previous run's sidecar); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub listeners: Option<usize>,
    #[arg(long)]
    pub songs: Option<usize>,
    #[arg(long)]
    pub artists: Option<usize>,
    #[arg(long)]
    pub playlist_len_min: Option<usize>,
    #[arg(long)]
    pub playlist_len_max: Option<usize>,
    #[arg(long)]
    pub artists_per_song_min: Option<usize>,
    #[arg(long)]
    pub artists_per_song_max: Option<usize>,
    /// Spread of the song-popularity curve; defaults to songs / 4.
    #[arg(long)]
    pub popularity_sigma: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateParams {
    pub seed: u64,
    pub listeners: usize,
    pub songs: usize,
    pub artists: usize,
    pub playlist_len_min: usize,
    pub playlist_len_max: usize,
    pub artists_per_song_min: usize,
    pub artists_per_song_max: usize,
    pub popularity_sigma: Option<f64>,
}

impl Default for GenerateParams {
    fn default() -> Self {
        let config = GenConfig::default();
        GenerateParams {
            seed: config.seed,
            listeners: config.n_listeners,
            songs: config.n_songs,
            artists: config.n_artists,
            playlist_len_min: config.playlist_len_range.min,
            playlist_len_max: config.playlist_len_range.max,
            artists_per_song_min: config.artists_per_song_range.min,
            artists_per_song_max: config.artists_per_song_range.max,
            popularity_sigma: config.popularity_sigma,
        }
    }
}

impl GenerateParams {
    fn to_gen_config(&self) -> GenConfig {
        GenConfig {
            seed: self.seed,
            n_listeners: self.listeners,
            n_songs: self.songs,
            n_artists: self.artists,
            playlist_len_range: LenRange::new(self.playlist_len_min, self.playlist_len_max),
            artists_per_song_range: LenRange::new(
                self.artists_per_song_min,
                self.artists_per_song_max,
            ),
            popularity_sigma: self.popularity_sigma,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectTargetsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Playlists file; defaults to playlists.jsonl in the output directory.
    #[arg(long)]
    pub playlists: Option<String>,
    /// Song catalog file; defaults to songs.jsonl in the output directory.
    #[arg(long)]
    pub songs: Option<String>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SelectTargetsParams {
    pub playlists: Option<String>,
    pub songs: Option<String>,
    pub t1: f64,
    pub t2: f64,
}

impl Default for SelectTargetsParams {
    fn default() -> Self {
        let t = Thresholds::default();
        SelectTargetsParams {
            playlists: None,
            songs: None,
            t1: t.t1,
            t2: t.t2,
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildGraphArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub playlists: Option<String>,
    #[arg(long)]
    pub songs: Option<String>,
    /// Also print the degree histogram.
    #[arg(long)]
    pub stats: bool,
    /// Write the transition matrix as (row, col, prob) CSV to this file.
    #[arg(long)]
    pub dump_tp: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct BuildGraphParams {
    pub playlists: Option<String>,
    pub songs: Option<String>,
    pub stats: bool,
    pub dump_tp: Option<String>,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub playlists: Option<String>,
    #[arg(long)]
    pub songs: Option<String>,
    /// Listener string id to recommend for.
    #[arg(long, required_unless_present = "config")]
    pub listener: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub top_n: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RecommendParams {
    pub playlists: Option<String>,
    pub songs: Option<String>,
    pub listener: String,
    pub alpha: f64,
    pub top_n: usize,
    pub max_steps: usize,
    pub tol: f64,
}

impl Default for RecommendParams {
    fn default() -> Self {
        let walk = WalkConfig::default();
        RecommendParams {
            playlists: None,
            songs: None,
            listener: String::new(),
            alpha: walk.alpha,
            top_n: 5,
            max_steps: walk.maximum_step,
            tol: walk.convergence_tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub playlists: Option<String>,
    #[arg(long)]
    pub songs: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long)]
    pub top_n: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateParams {
    pub seed: u64,
    pub playlists: Option<String>,
    pub songs: Option<String>,
    pub alpha: f64,
    pub t1: f64,
    pub t2: f64,
    pub top_n: usize,
    pub max_steps: usize,
    pub tol: f64,
}

impl Default for EvaluateParams {
    fn default() -> Self {
        let walk = WalkConfig::default();
        let thresholds = Thresholds::default();
        EvaluateParams {
            seed: 42,
            playlists: None,
            songs: None,
            alpha: walk.alpha,
            t1: thresholds.t1,
            t2: thresholds.t2,
            top_n: 5,
            max_steps: walk.maximum_step,
            tol: walk.convergence_tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub playlists: Option<String>,
    #[arg(long)]
    pub songs: Option<String>,
    /// Comma-separated alpha grid.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Comma-separated cama1-threshold grid.
    #[arg(long, value_delimiter = ',')]
    pub t1s: Option<Vec<f64>>,
    /// Comma-separated cama2-threshold grid.
    #[arg(long, value_delimiter = ',')]
    pub t2s: Option<Vec<f64>>,
    /// Comma-separated top-N grid.
    #[arg(long, value_delimiter = ',')]
    pub top_ns: Option<Vec<usize>>,
    /// Also write per-metric plot series under plots/.
    #[arg(long)]
    pub plots: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SweepParams {
    pub seed: u64,
    pub playlists: Option<String>,
    pub songs: Option<String>,
    pub alphas: Vec<f64>,
    pub t1s: Vec<f64>,
    pub t2s: Vec<f64>,
    pub top_ns: Vec<usize>,
    pub plots: bool,
}

impl Default for SweepParams {
    fn default() -> Self {
        let spec = eval::SweepSpec::default();
        SweepParams {
            seed: 42,
            playlists: None,
            songs: None,
            alphas: spec.alphas,
            t1s: spec.t1s,
            t2s: spec.t2s,
            top_ns: spec.top_ns,
            plots: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Parses the command line and runs it; the returned code is the process
/// exit status.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = u8::try_from(err.exit_code()).unwrap_or(2);
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn load_config_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.into(),
        line: e.line(),
        message: e.to_string(),
    })
}

fn base_params<T: DeserializeOwned + Default>(config: &Option<PathBuf>) -> Result<T> {
    match config {
        Some(path) => load_config_file(path),
        None => Ok(T::default()),
    }
}

fn write_sidecar<T: Serialize>(output_dir: &Path, name: &str, params: &T) -> Result<()> {
    let path = output_dir.join(format!("{name}-config.json"));
    let mut text = serde_json::to_string_pretty(params).expect("params serialize");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn resolve_input(output_dir: &Path, given: &Option<String>, default_name: &str) -> PathBuf {
    match given {
        Some(path) => PathBuf::from(path),
        None => output_dir.join(default_name),
    }
}

/// Writes a page of data to stdout. A closed pipe (`cama ... | head`) ends
/// the output without failing the run.
fn write_stdout(page: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(page.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Error::io("<stdout>", e)),
    }
}

fn load_input_corpus(
    output_dir: &Path,
    playlists: &Option<String>,
    songs: &Option<String>,
) -> Result<Corpus> {
    let playlists_path = resolve_input(output_dir, playlists, DEFAULT_PLAYLISTS);
    let songs_path = resolve_input(output_dir, songs, DEFAULT_SONGS);
    load_corpus(&playlists_path, &songs_path)
}

/// Runs a parsed command to completion.
pub fn run(cli: Cli) -> Result<()> {
    let out = &cli.output_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    match &cli.command {
        Command::Generate(args) => {
            let mut params: GenerateParams = base_params(&args.config)?;
            if let Some(seed) = cli.seed {
                params.seed = seed;
            }
            apply_generate_flags(&mut params, args);
            write_sidecar(out, "generate", &params)?;

            let corpus = datagen::generate(&params.to_gen_config())?;
            let playlists_path = out.join(DEFAULT_PLAYLISTS);
            let songs_path = out.join(DEFAULT_SONGS);
            save_corpus(&corpus, &playlists_path, &songs_path)?;
            eprintln!(
                "generated {} listeners, {} songs, {} artists with seed {}",
                corpus.n_listeners(),
                corpus.n_songs(),
                corpus.n_artists(),
                params.seed
            );
            eprintln!("wrote {}", playlists_path.display());
            eprintln!("wrote {}", songs_path.display());
        }

        Command::SelectTargets(args) => {
            let mut params: SelectTargetsParams = base_params(&args.config)?;
            if let Some(v) = &args.playlists {
                params.playlists = Some(v.clone());
            }
            if let Some(v) = &args.songs {
                params.songs = Some(v.clone());
            }
            if let Some(v) = args.t1 {
                params.t1 = v;
            }
            if let Some(v) = args.t2 {
                params.t2 = v;
            }
            write_sidecar(out, "select-targets", &params)?;

            let corpus = load_input_corpus(out, &params.playlists, &params.songs)?;
            let thresholds = Thresholds::new(params.t1, params.t2)?;
            let mut page = String::from("listener,cama1,cama2,selected\n");
            for listener in corpus.listeners() {
                let name = corpus.listener_name(listener);
                if corpus.playlist(listener).len() < 2 {
                    page.push_str(&format!("{name},,,false\n"));
                    continue;
                }
                let scores = cama_scores(listener, &corpus)?;
                page.push_str(&format!(
                    "{name},{},{},{}\n",
                    scores.cama1(),
                    scores.cama2(),
                    scores.exceeds(&thresholds)
                ));
            }
            write_stdout(&page)?;
        }

        Command::BuildGraph(args) => {
            let mut params: BuildGraphParams = base_params(&args.config)?;
            if let Some(v) = &args.playlists {
                params.playlists = Some(v.clone());
            }
            if let Some(v) = &args.songs {
                params.songs = Some(v.clone());
            }
            params.stats |= args.stats;
            if let Some(v) = &args.dump_tp {
                params.dump_tp = Some(v.clone());
            }
            write_sidecar(out, "build-graph", &params)?;

            let corpus = load_input_corpus(out, &params.playlists, &params.songs)?;
            let graph = build_graph(&corpus);
            let mut page = String::from("metric,value\n");
            page.push_str(&format!("listeners,{}\n", graph.n_listeners()));
            page.push_str(&format!("songs,{}\n", graph.n_songs()));
            page.push_str(&format!("nodes,{}\n", graph.num_nodes()));
            page.push_str(&format!(
                "listener_song_edges,{}\n",
                graph.listener_song_edges()
            ));
            page.push_str(&format!("song_song_edges,{}\n", graph.song_song_edges()));
            if params.stats {
                page.push_str("\ndegree,count\n");
                for (degree, count) in graph.degree_histogram() {
                    page.push_str(&format!("{degree},{count}\n"));
                }
            }
            write_stdout(&page)?;
            if let Some(dump) = &params.dump_tp {
                let tp = build_transition(&graph);
                let path = out.join(dump);
                let mut buf = Vec::new();
                tp.dump_csv(&mut buf).map_err(|e| Error::io(&path, e))?;
                std::fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
                eprintln!("wrote {}", path.display());
            }
        }

        Command::Recommend(args) => {
            let mut params: RecommendParams = base_params(&args.config)?;
            if let Some(v) = &args.playlists {
                params.playlists = Some(v.clone());
            }
            if let Some(v) = &args.songs {
                params.songs = Some(v.clone());
            }
            if let Some(v) = &args.listener {
                params.listener = v.clone();
            }
            if let Some(v) = args.alpha {
                params.alpha = v;
            }
            if let Some(v) = args.top_n {
                params.top_n = v;
            }
            if let Some(v) = args.max_steps {
                params.max_steps = v;
            }
            if let Some(v) = args.tol {
                params.tol = v;
            }
            write_sidecar(out, "recommend", &params)?;

            let corpus = load_input_corpus(out, &params.playlists, &params.songs)?;
            let listener = corpus
                .listener_by_name(&params.listener)
                .ok_or_else(|| Error::UnknownListener(params.listener.clone()))?;
            let graph = build_graph(&corpus);
            let tp = build_transition(&graph);
            let walk = WalkConfig {
                alpha: params.alpha,
                maximum_step: params.max_steps,
                convergence_tol: params.tol,
            };
            let ranked = recommend(&corpus, &graph, &tp, listener, &walk, params.top_n)?;
            let mut page = String::from("rank,song,score\n");
            for (i, (song, score)) in ranked.iter().enumerate() {
                page.push_str(&format!("{},{},{}\n", i + 1, corpus.song_name(*song), score));
            }
            write_stdout(&page)?;
        }

        Command::Evaluate(args) => {
            let mut params: EvaluateParams = base_params(&args.config)?;
            if let Some(seed) = cli.seed {
                params.seed = seed;
            }
            apply_evaluate_flags(&mut params, args);
            write_sidecar(out, "evaluate", &params)?;

            let corpus = load_input_corpus(out, &params.playlists, &params.songs)?;
            let thresholds = Thresholds::new(params.t1, params.t2)?;
            let walk = WalkConfig {
                alpha: params.alpha,
                maximum_step: params.max_steps,
                convergence_tol: params.tol,
            };
            let row = eval::evaluate(&corpus, &thresholds, &walk, params.top_n, params.seed)?;
            let report = eval::EvalReport { rows: vec![row] };
            let path = write_report(out, "evaluate_report", &report, cli.format)?;
            eprintln!("wrote {}", path.display());
        }

        Command::Sweep(args) => {
            let mut params: SweepParams = base_params(&args.config)?;
            if let Some(seed) = cli.seed {
                params.seed = seed;
            }
            if let Some(v) = &args.playlists {
                params.playlists = Some(v.clone());
            }
            if let Some(v) = &args.songs {
                params.songs = Some(v.clone());
            }
            if let Some(v) = &args.alphas {
                params.alphas = v.clone();
            }
            if let Some(v) = &args.t1s {
                params.t1s = v.clone();
            }
            if let Some(v) = &args.t2s {
                params.t2s = v.clone();
            }
            if let Some(v) = &args.top_ns {
                params.top_ns = v.clone();
            }
            params.plots |= args.plots;
            write_sidecar(out, "sweep", &params)?;

            let corpus = load_input_corpus(out, &params.playlists, &params.songs)?;
            let spec = eval::SweepSpec {
                alphas: params.alphas.clone(),
                t1s: params.t1s.clone(),
                t2s: params.t2s.clone(),
                top_ns: params.top_ns.clone(),
            };
            let report = eval::sweep(
                &corpus,
                &spec,
                &Thresholds::default(),
                &WalkConfig::default(),
                params.seed,
            )?;
            let path = write_report(out, "sweep_report", &report, cli.format)?;
            eprintln!("wrote {}", path.display());

            if params.plots {
                let plots_dir = out.join("plots");
                std::fs::create_dir_all(&plots_dir).map_err(|e| Error::io(&plots_dir, e))?;
                for (name, body) in
                    eval::plot_series(&report, &Thresholds::default(), &WalkConfig::default())
                {
                    let path = plots_dir.join(name);
                    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                    eprintln!("wrote {}", path.display());
                }
            }
        }
    }
    Ok(())
}

fn apply_generate_flags(params: &mut GenerateParams, args: &GenerateArgs) {
    if let Some(v) = args.listeners {
        params.listeners = v;
    }
    if let Some(v) = args.songs {
        params.songs = v;
    }
    if let Some(v) = args.artists {
        params.artists = v;
    }
    if let Some(v) = args.playlist_len_min {
        params.playlist_len_min = v;
    }
    if let Some(v) = args.playlist_len_max {
        params.playlist_len_max = v;
    }
    if let Some(v) = args.artists_per_song_min {
        params.artists_per_song_min = v;
    }
    if let Some(v) = args.artists_per_song_max {
        params.artists_per_song_max = v;
    }
    if let Some(v) = args.popularity_sigma {
        params.popularity_sigma = Some(v);
    }
}

fn apply_evaluate_flags(params: &mut EvaluateParams, args: &EvaluateArgs) {
    if let Some(v) = &args.playlists {
        params.playlists = Some(v.clone());
    }
    if let Some(v) = &args.songs {
        params.songs = Some(v.clone());
    }
    if let Some(v) = args.alpha {
        params.alpha = v;
    }
    if let Some(v) = args.t1 {
        params.t1 = v;
    }
    if let Some(v) = args.t2 {
        params.t2 = v;
    }
    if let Some(v) = args.top_n {
        params.top_n = v;
    }
    if let Some(v) = args.max_steps {
        params.max_steps = v;
    }
    if let Some(v) = args.tol {
        params.tol = v;
    }
}

fn write_report(
    out: &Path,
    stem: &str,
    report: &eval::EvalReport,
    format: Format,
) -> Result<PathBuf> {
    let (name, body) = match format {
        Format::Csv => (format!("{stem}.csv"), report.to_csv()),
        Format::Json => (format!("{stem}.json"), report.to_json_lines()),
    };
    let path = out.join(name);
    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
