//! Train/test evaluation of the recommender.
//!
//! Each listener's playlist is split roughly 4:1 with at least two held-out
//! songs. Target selection, graph construction and ranking all run on the
//! training playlists only; a recommendation counts as a hit when the song
//! is in the listener's held-out set. Precision, recall and F1 are computed
//! per listener and macro-averaged over the target listeners.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, ListenerId, SongId};
use crate::error::{Error, Result};
use crate::graph::{build_graph, HeteroGraph};
use crate::rwr::{recommend, WalkConfig};
use crate::target::{select_targets, Thresholds};
use crate::transition::{build_transition, TransitionMatrix};

/// A corpus partitioned into training playlists and held-out songs.
#[derive(Debug, Clone)]
pub struct SplitCorpus {
    pub train: Corpus,
    /// Held-out songs per listener, ascending by song id.
    pub test: Vec<Vec<SongId>>,
}

/// Held-out count for a playlist of length `k`: a 4:1 split, floored at 2.
pub fn test_size(k: usize) -> usize {
    ((k + 2) / 5).max(2)
}

/// Splits every playlist into train and test parts, deterministically in
/// the seed. Test songs are drawn uniformly per listener; the training
/// playlist keeps its original order.
pub fn split(corpus: &Corpus, seed: u64) -> Result<SplitCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_playlists = Vec::with_capacity(corpus.n_listeners());
    let mut test = Vec::with_capacity(corpus.n_listeners());

    for listener in corpus.listeners() {
        let playlist = corpus.playlist(listener);
        let k = playlist.len();
        let held_out = test_size(k);
        if k < held_out + 1 {
            return Err(Error::PlaylistTooSmall {
                listener: listener.0,
                len: k,
            });
        }

        // Partial Fisher-Yates over positions; the first `held_out` are test.
        let mut positions: Vec<usize> = (0..k).collect();
        for i in 0..held_out {
            let j = rng.gen_range(i..k);
            positions.swap(i, j);
        }
        let mut is_test = vec![false; k];
        for &p in &positions[..held_out] {
            is_test[p] = true;
        }

        let mut train_songs = Vec::with_capacity(k - held_out);
        let mut test_songs = Vec::with_capacity(held_out);
        for (pos, &song) in playlist.iter().enumerate() {
            if is_test[pos] {
                test_songs.push(song);
            } else {
                train_songs.push(song);
            }
        }
        test_songs.sort();
        train_playlists.push(train_songs);
        test.push(test_songs);
    }

    let train = Corpus::from_parts(
        train_playlists,
        corpus.song_artists.clone(),
        corpus.listener_names.clone(),
        corpus.song_names.clone(),
        corpus.artist_names.clone(),
    )?;
    Ok(SplitCorpus { train, test })
}

/// One evaluation configuration and its macro-averaged metrics.
///
/// Metrics are `None` when no listener cleared the thresholds; an absent
/// value is not a zero score.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EvalRow {
    /// Which hyperparameter this row varies (`alpha`, `t1`, `t2`) or
    /// `default` for a single evaluation.
    pub label: String,
    pub alpha: f64,
    pub t1: f64,
    pub t2: f64,
    pub top_n: usize,
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
    pub macro_f1: Option<f64>,
    pub n_target_listeners: usize,
}

/// Rows of evaluation results, in the order they were produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl EvalReport {
    /// CSV with a header naming every column. Metric columns are macro
    /// (per-listener) averages; absent metrics are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "label,alpha,t1,t2,top_n,macro_precision,macro_recall,macro_f1,n_target_listeners\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.label,
                row.alpha,
                row.t1,
                row.t2,
                row.top_n,
                fmt_opt(row.macro_precision),
                fmt_opt(row.macro_recall),
                fmt_opt(row.macro_f1),
                row.n_target_listeners
            ));
        }
        out
    }

    /// One JSON object per line, in row order.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&serde_json::to_string(row).expect("eval row serializes"));
            out.push('\n');
        }
        out
    }
}

/// Per-hyperparameter grids for a sweep. Each axis is varied on its own
/// while the other two stay at their defaults.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub t1s: Vec<f64>,
    pub t2s: Vec<f64>,
    pub top_ns: Vec<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            alphas: vec![0.2, 0.4, 0.6, 0.8],
            t1s: (1..=7).map(|i| i as f64 / 10.0).collect(),
            t2s: (1..=9).map(|i| i as f64 / 10.0).collect(),
            top_ns: (1..=10).collect(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty()
            || self.t1s.is_empty()
            || self.t2s.is_empty()
            || self.top_ns.is_empty()
        {
            return Err(Error::Config("sweep grids must be non-empty".into()));
        }
        Ok(())
    }
}

/// Evaluation engine over one fixed split: the graph and transition matrix
/// are built from the training corpus once, and full candidate rankings are
/// cached per (alpha, listener) so threshold and top-N variations reuse
/// walks.
pub struct Evaluator {
    split: SplitCorpus,
    graph: HeteroGraph,
    tp: TransitionMatrix,
    rank_cache: HashMap<(u64, u32), Vec<SongId>>,
}

impl Evaluator {
    pub fn new(corpus: &Corpus, seed: u64) -> Result<Self> {
        let split = split(corpus, seed)?;
        let graph = build_graph(&split.train);
        let tp = build_transition(&graph);
        Ok(Evaluator {
            split,
            graph,
            tp,
            rank_cache: HashMap::new(),
        })
    }

    pub fn split(&self) -> &SplitCorpus {
        &self.split
    }

    fn full_ranking(&mut self, listener: ListenerId, walk: &WalkConfig) -> Result<&[SongId]> {
        let key = (walk.alpha.to_bits(), listener.0);
        if !self.rank_cache.contains_key(&key) {
            let ranked = recommend(
                &self.split.train,
                &self.graph,
                &self.tp,
                listener,
                walk,
                self.split.train.n_songs(),
            )?;
            self.rank_cache
                .insert(key, ranked.into_iter().map(|(s, _)| s).collect());
        }
        Ok(&self.rank_cache[&key])
    }

    /// Runs one configuration and returns its metrics row.
    pub fn evaluate(
        &mut self,
        label: &str,
        thresholds: &Thresholds,
        walk: &WalkConfig,
        top_n: usize,
    ) -> Result<EvalRow> {
        if top_n == 0 {
            return Err(Error::Config("top_n must be at least 1".into()));
        }
        walk.validate()?;
        let targets = select_targets(&self.split.train, thresholds)?;

        let mut precision_sum = 0.0;
        let mut recall_sum = 0.0;
        let mut f1_sum = 0.0;
        for &listener in &targets {
            let ranking = self.full_ranking(listener, walk)?.to_vec();
            let test_songs = &self.split.test[listener.0 as usize];
            let hits = ranking
                .iter()
                .take(top_n)
                .filter(|s| test_songs.contains(s))
                .count() as f64;
            let precision = hits / top_n as f64;
            let recall = hits / test_songs.len() as f64;
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            precision_sum += precision;
            recall_sum += recall;
            f1_sum += f1;
        }

        let count = targets.len();
        let mean = |sum: f64| {
            if count == 0 {
                None
            } else {
                Some(sum / count as f64)
            }
        };
        Ok(EvalRow {
            label: label.to_string(),
            alpha: walk.alpha,
            t1: thresholds.t1,
            t2: thresholds.t2,
            top_n,
            macro_precision: mean(precision_sum),
            macro_recall: mean(recall_sum),
            macro_f1: mean(f1_sum),
            n_target_listeners: count,
        })
    }
}

/// Splits, evaluates one configuration, and returns the row.
pub fn evaluate(
    corpus: &Corpus,
    thresholds: &Thresholds,
    walk: &WalkConfig,
    top_n: usize,
    seed: u64,
) -> Result<EvalRow> {
    let mut evaluator = Evaluator::new(corpus, seed)?;
    evaluator.evaluate("default", thresholds, walk, top_n)
}

/// Varies each hyperparameter independently around the default point,
/// reusing one split for every row.
///
/// Row order: the alpha grid, then the cama1-threshold grid, then the
/// cama2-threshold grid, each crossed with every top-N. A configuration
/// reachable through more than one axis (a grid value equal to its default)
/// is evaluated once, under the first axis that produced it; a fully
/// degenerate sweep therefore yields a single row.
pub fn sweep(
    corpus: &Corpus,
    spec: &SweepSpec,
    defaults_thresholds: &Thresholds,
    defaults_walk: &WalkConfig,
    seed: u64,
) -> Result<EvalReport> {
    spec.validate()?;
    let mut evaluator = Evaluator::new(corpus, seed)?;
    let mut report = EvalReport::default();
    let mut seen: std::collections::HashSet<(u64, u64, u64, usize)> = Default::default();

    let mut run = |evaluator: &mut Evaluator,
                   report: &mut EvalReport,
                   label: &str,
                   thresholds: &Thresholds,
                   walk: &WalkConfig,
                   top_n: usize|
     -> Result<()> {
        let key = (
            walk.alpha.to_bits(),
            thresholds.t1.to_bits(),
            thresholds.t2.to_bits(),
            top_n,
        );
        if seen.insert(key) {
            report
                .rows
                .push(evaluator.evaluate(label, thresholds, walk, top_n)?);
        }
        Ok(())
    };

    for &alpha in &spec.alphas {
        let walk = WalkConfig {
            alpha,
            ..*defaults_walk
        };
        for &top_n in &spec.top_ns {
            run(
                &mut evaluator,
                &mut report,
                "alpha",
                defaults_thresholds,
                &walk,
                top_n,
            )?;
        }
    }
    for &t1 in &spec.t1s {
        let thresholds = Thresholds::new(t1, defaults_thresholds.t2)?;
        for &top_n in &spec.top_ns {
            run(
                &mut evaluator,
                &mut report,
                "t1",
                &thresholds,
                defaults_walk,
                top_n,
            )?;
        }
    }
    for &t2 in &spec.t2s {
        let thresholds = Thresholds::new(defaults_thresholds.t1, t2)?;
        for &top_n in &spec.top_ns {
            run(
                &mut evaluator,
                &mut report,
                "t2",
                &thresholds,
                defaults_walk,
                top_n,
            )?;
        }
    }
    Ok(report)
}

/// Reshapes a sweep report into plot-ready series: for each metric and each
/// varied hyperparameter, a CSV of metric-vs-top-N with one column per
/// hyperparameter value. Returns `(file name, csv body)` pairs.
///
/// A row belongs to an axis when its other two hyperparameters sit at the
/// default point, whichever axis originally labeled it, so a sweep grid that
/// passes through the defaults still gets a complete series.
pub fn plot_series(
    report: &EvalReport,
    defaults_thresholds: &Thresholds,
    defaults_walk: &WalkConfig,
) -> Vec<(String, String)> {
    type MetricFn = fn(&EvalRow) -> Option<f64>;
    type AxisFilter = fn(&EvalRow, f64, f64, f64) -> bool;
    type AxisValue = fn(&EvalRow) -> f64;
    let metrics: [(&str, MetricFn); 3] = [
        ("precision", |r| r.macro_precision),
        ("recall", |r| r.macro_recall),
        ("f1", |r| r.macro_f1),
    ];
    let (da, dt1, dt2) = (defaults_walk.alpha, defaults_thresholds.t1, defaults_thresholds.t2);
    let axes: [(&str, AxisFilter, AxisValue); 3] = [
        ("alpha", |r, _, dt1, dt2| r.t1 == dt1 && r.t2 == dt2, |r| {
            r.alpha
        }),
        ("cama1_threshold", |r, da, _, dt2| r.alpha == da && r.t2 == dt2, |r| {
            r.t1
        }),
        ("cama2_threshold", |r, da, dt1, _| r.alpha == da && r.t1 == dt1, |r| {
            r.t2
        }),
    ];

    let mut files = Vec::new();
    for (metric_name, metric) in metrics {
        for (axis_name, belongs, axis_value) in axes {
            let rows: Vec<&EvalRow> = report
                .rows
                .iter()
                .filter(|r| belongs(r, da, dt1, dt2))
                .collect();
            if rows.is_empty() {
                continue;
            }
            let mut values: Vec<f64> = Vec::new();
            let mut top_ns: Vec<usize> = Vec::new();
            for row in &rows {
                if !values.contains(&axis_value(row)) {
                    values.push(axis_value(row));
                }
                if !top_ns.contains(&row.top_n) {
                    top_ns.push(row.top_n);
                }
            }
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite axis values"));
            top_ns.sort_unstable();

            let mut csv = String::from("top_n");
            for v in &values {
                csv.push_str(&format!(",{axis_name}={v}"));
            }
            csv.push('\n');
            for &n in &top_ns {
                csv.push_str(&n.to_string());
                for &v in &values {
                    let cell = rows
                        .iter()
                        .find(|r| r.top_n == n && axis_value(r) == v)
                        .and_then(|r| metric(r));
                    csv.push(',');
                    csv.push_str(&fmt_opt(cell));
                }
                csv.push('\n');
            }
            files.push((format!("{metric_name}_vs_{axis_name}.csv"), csv));
        }
    }
    files
}
