//! Acceptance suite: one test per release criterion, each printing a
//! PASS line on success (visible with `cargo test --test acceptance --
//! --nocapture`).
//!
//! Tolerances and runtime budgets are pinned in the constants below.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use cama::corpus::{load_corpus, Corpus, ListenerId};
use cama::datagen::{self, GenConfig, LenRange};
use cama::eval::{self, SweepSpec};
use cama::graph::build_graph;
use cama::rwr::{recommend, rwr_oracle, rwr_rank, WalkConfig};
use cama::target::{cama_scores, select_targets, Thresholds};
use cama::transition::{build_transition, row_stochastic_check, TransitionMatrix};

const ORACLE_TOL: f64 = 1e-9;
const ROW_SUM_TOL: f64 = 1e-12;
const CONSERVATION_TOL: f64 = 1e-9;
const TP_BUDGET_SECS: f64 = 1.0;
const ORACLE_SUITE_BUDGET_SECS: f64 = 10.0;
const END_TO_END_BUDGET_SECS: f64 = 60.0;

fn fixture_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .expect("golden file present")
}

fn five_song_corpus() -> Corpus {
    load_corpus(
        &fixture_path("five_song_playlists.jsonl"),
        &fixture_path("five_song_songs.jsonl"),
    )
    .expect("fixture loads")
}

/// Chain playlist: song i and i+1 share a distinct artist, nothing else.
fn chain_corpus(len: usize) -> Corpus {
    let mut playlists_text = String::from("{\"listener\":\"L1\",\"songs\":[");
    let mut songs_text = String::new();
    for i in 0..len {
        if i > 0 {
            playlists_text.push(',');
        }
        playlists_text.push_str(&format!("\"S{}\"", i + 1));
        let mut artists = Vec::new();
        if i > 0 {
            artists.push(format!("\"A{i}\""));
        }
        if i + 1 < len {
            artists.push(format!("\"A{}\"", i + 1));
        }
        songs_text.push_str(&format!(
            "{{\"song\":\"S{}\",\"artists\":[{}]}}\n",
            i + 1,
            artists.join(",")
        ));
    }
    playlists_text.push_str("]}\n");
    let dir = tempfile::tempdir().unwrap();
    let pl = dir.path().join("p.jsonl");
    let sg = dir.path().join("s.jsonl");
    std::fs::write(&pl, playlists_text).unwrap();
    std::fs::write(&sg, songs_text).unwrap();
    load_corpus(&pl, &sg).unwrap()
}

/// 25 songs of one artist plus 25 pairwise-unrelated songs.
fn favorite_artist_corpus() -> Corpus {
    let mut playlists_text = String::from("{\"listener\":\"L1\",\"songs\":[");
    let mut songs_text = String::new();
    for i in 0..50 {
        if i > 0 {
            playlists_text.push(',');
        }
        playlists_text.push_str(&format!("\"S{}\"", i + 1));
        let artist = if i < 25 {
            "A0".to_string()
        } else {
            format!("A{}", i + 1)
        };
        songs_text.push_str(&format!(
            "{{\"song\":\"S{}\",\"artists\":[\"{artist}\"]}}\n",
            i + 1
        ));
    }
    playlists_text.push_str("]}\n");
    let dir = tempfile::tempdir().unwrap();
    let pl = dir.path().join("p.jsonl");
    let sg = dir.path().join("s.jsonl");
    std::fs::write(&pl, playlists_text).unwrap();
    std::fs::write(&sg, songs_text).unwrap();
    load_corpus(&pl, &sg).unwrap()
}

#[test]
fn criterion_1_worked_example_scores() {
    let corpus = five_song_corpus();
    let scores = cama_scores(ListenerId(0), &corpus).unwrap();
    // Exact rationals: 5/10 and 3/5.
    assert_eq!((scores.matching_pairs, scores.total_pairs), (5, 10));
    assert_eq!((scores.top_artist_count, scores.playlist_len), (3, 5));
    assert_eq!(scores.cama1(), 0.5);
    assert_eq!(scores.cama2(), 0.6);
    let thresholds = Thresholds::new(0.4, 0.5).unwrap();
    let targets = select_targets(&corpus, &thresholds).unwrap();
    assert_eq!(targets, vec![ListenerId(0)]);
    println!("ACCEPTANCE 1 PASS: worked example gives cama1=1/2, cama2=3/5 and is selected");
}

#[test]
fn criterion_2_counterexample_values() {
    let chain = chain_corpus(10);
    let scores = cama_scores(ListenerId(0), &chain).unwrap();
    assert_eq!((scores.matching_pairs, scores.total_pairs), (9, 45));
    assert_eq!(scores.cama1(), 0.2);

    let favorite = favorite_artist_corpus();
    let scores = cama_scores(ListenerId(0), &favorite).unwrap();
    assert_eq!((scores.top_artist_count, scores.playlist_len), (25, 50));
    assert_eq!(scores.cama2(), 0.5);
    println!("ACCEPTANCE 2 PASS: chain cama1=9/45=0.2, favorite-artist cama2=25/50=0.5");
}

#[test]
fn criterion_3_transition_stochasticity_on_default_corpus() {
    let start = Instant::now();
    let corpus = datagen::generate(&GenConfig::default()).unwrap();
    let graph = build_graph(&corpus);
    let tp = build_transition(&graph);

    assert!(row_stochastic_check(&tp).is_empty());
    for i in 0..tp.dim() {
        let sum = tp.row_sum(i);
        if graph.degree(i) > 0 {
            assert!((sum - 1.0).abs() <= ROW_SUM_TOL, "row {i} sums to {sum}");
        } else {
            assert_eq!(sum, 0.0);
        }
    }
    for i in 0..tp.n_listeners() {
        for j in 0..tp.n_listeners() {
            assert_eq!(tp.entry(i, j), 0.0, "listener-listener entry ({i},{j})");
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < TP_BUDGET_SECS, "took {elapsed:.3}s");
    println!(
        "ACCEPTANCE 3 PASS: default-corpus transition matrix is row-stochastic \
         with a zero listener block ({elapsed:.3}s)"
    );
}

/// 100 seeded corpora with at most 60 nodes, spanning sparse to dense.
fn random_small_matrices() -> Vec<TransitionMatrix> {
    (0..100u64)
        .map(|case| {
            let n_listeners = 2 + (case % 24) as usize;
            let n_songs = 2 + (case % 31) as usize;
            let config = GenConfig {
                seed: 1000 + case,
                n_listeners,
                n_songs,
                n_artists: 2 + (case % 7) as usize,
                playlist_len_range: LenRange::new(1, n_songs.min(5)),
                artists_per_song_range: LenRange::new(1, 2),
                popularity_sigma: None,
            };
            let corpus = datagen::generate(&config).unwrap();
            build_transition(&build_graph(&corpus))
        })
        .collect()
}

#[test]
fn criterion_4_oracle_equivalence_on_random_graphs() {
    let start = Instant::now();
    let matrices = random_small_matrices();
    assert_eq!(matrices.len(), 100);
    let mut worst: f64 = 0.0;
    for (case, tp) in matrices.iter().enumerate() {
        assert!(tp.dim() <= 60, "case {case} has {} nodes", tp.dim());
        let source = case % tp.n_listeners();
        for alpha in [0.2, 0.5, 0.8] {
            let config = WalkConfig {
                alpha,
                maximum_step: 500,
                convergence_tol: 1e-12,
            };
            let iterated = rwr_rank(tp, source, &config).unwrap();
            let solved = rwr_oracle(tp, source, alpha).unwrap();
            for (a, b) in iterated.all().iter().zip(solved.all()) {
                let diff = (a - b).abs();
                worst = worst.max(diff);
                assert!(
                    diff <= ORACLE_TOL,
                    "case {case} alpha {alpha}: diff {diff:e}"
                );
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < ORACLE_SUITE_BUDGET_SECS, "took {elapsed:.3}s");
    println!(
        "ACCEPTANCE 4 PASS: 100 graphs x 3 alphas, iterative vs dense solve \
         L-inf {worst:.2e} <= 1e-9 ({elapsed:.3}s)"
    );
}

#[test]
fn criterion_5_hand_solved_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let pl = dir.path().join("p.jsonl");
    let sg = dir.path().join("s.jsonl");
    std::fs::write(&pl, "{\"listener\":\"L1\",\"songs\":[\"S1\"]}\n").unwrap();
    std::fs::write(&sg, "{\"song\":\"S1\",\"artists\":[\"A1\"]}\n").unwrap();
    let corpus = load_corpus(&pl, &sg).unwrap();
    let tp = build_transition(&build_graph(&corpus));
    let config = WalkConfig {
        alpha: 0.8,
        maximum_step: 500,
        convergence_tol: 1e-13,
    };
    let scores = rwr_rank(&tp, 0, &config).unwrap();
    assert!((scores.all()[0] - 5.0 / 9.0).abs() <= 1e-9);
    assert!((scores.all()[1] - 4.0 / 9.0).abs() <= 1e-9);
    println!("ACCEPTANCE 5 PASS: two-node walk converges to (5/9, 4/9)");
}

#[test]
fn criterion_6_conservation_on_connected_fixtures() {
    for (name, corpus) in [
        ("five-song", five_song_corpus()),
        ("chain", chain_corpus(10)),
    ] {
        let tp = build_transition(&build_graph(&corpus));
        for steps in 1..=50 {
            let config = WalkConfig {
                alpha: 0.8,
                maximum_step: steps,
                convergence_tol: 0.0,
            };
            let scores = rwr_rank(&tp, 0, &config).unwrap();
            let total = scores.total();
            assert!(
                (total - 1.0).abs() <= CONSERVATION_TOL,
                "{name}: total {total} after {steps} steps"
            );
        }
    }
    println!("ACCEPTANCE 6 PASS: total score stays 1 +- 1e-9 at every iteration");
}

#[test]
fn criterion_7_recommendations_never_hit_training_playlists() {
    let corpus = datagen::generate(&GenConfig::default()).unwrap();
    let split = eval::split(&corpus, 42).unwrap();
    let graph = build_graph(&split.train);
    let tp = build_transition(&graph);
    let targets = select_targets(&split.train, &Thresholds::default()).unwrap();
    assert!(!targets.is_empty());
    let mut checked = 0usize;
    for &listener in &targets {
        // Rank the entire catalog so the check is exhaustive, not just top-N.
        let ranked = recommend(
            &split.train,
            &graph,
            &tp,
            listener,
            &WalkConfig::default(),
            corpus.n_songs(),
        )
        .unwrap();
        let train_playlist = split.train.playlist(listener);
        for (song, _) in &ranked {
            assert!(
                !train_playlist.contains(song),
                "listener {listener:?} was recommended training song {song:?}"
            );
            checked += 1;
        }
    }
    println!(
        "ACCEPTANCE 7 PASS: {checked} recommendations across {} listeners, \
         zero training-playlist hits",
        targets.len()
    );
}

#[test]
fn criterion_8_end_to_end_regression_on_seeded_corpus() {
    let start = Instant::now();
    let corpus = datagen::generate(&GenConfig::default()).unwrap();

    // Single evaluation at the defaults: sane metrics and a byte-stable report.
    let row = eval::evaluate(
        &corpus,
        &Thresholds::default(),
        &WalkConfig::default(),
        5,
        42,
    )
    .unwrap();
    assert!(row.n_target_listeners > 0, "defaults select nobody");
    for metric in [row.macro_precision, row.macro_recall, row.macro_f1] {
        let v = metric.expect("metrics present");
        assert!((0.0..=1.0).contains(&v), "metric {v} out of range");
    }
    let report = eval::EvalReport { rows: vec![row] };
    assert_eq!(
        report.to_csv(),
        golden("evaluate_report.csv"),
        "evaluation report drifted from the recorded golden"
    );

    // Full sweep: the alpha grid is exact and target counts are antitone in
    // both thresholds.
    let sweep_report = eval::sweep(
        &corpus,
        &SweepSpec::default(),
        &Thresholds::default(),
        &WalkConfig::default(),
        42,
    )
    .unwrap();
    let alphas: BTreeSet<String> = sweep_report
        .rows
        .iter()
        .filter(|r| r.label == "alpha")
        .map(|r| r.alpha.to_string())
        .collect();
    let expected: BTreeSet<String> = ["0.2", "0.4", "0.6", "0.8"]
        .into_iter()
        .map(String::from)
        .collect();
    assert_eq!(alphas, expected);

    for label in ["t1", "t2"] {
        let counts: Vec<usize> = sweep_report
            .rows
            .iter()
            .filter(|r| r.label == label && r.top_n == 5)
            .map(|r| r.n_target_listeners)
            .collect();
        assert!(!counts.is_empty());
        assert!(
            counts.windows(2).all(|w| w[0] >= w[1]),
            "{label} target counts not antitone: {counts:?}"
        );
    }
    assert_eq!(
        sweep_report.to_csv(),
        golden("sweep_report.csv"),
        "sweep report drifted from the recorded golden"
    );

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < END_TO_END_BUDGET_SECS, "took {elapsed:.3}s");
    println!(
        "ACCEPTANCE 8 PASS: end-to-end metrics sane, golden reports match, \
         alpha grid exact, threshold antitonicity holds ({elapsed:.3}s)"
    );
}

fn run_pipeline(dir: &Path) {
    let binary = env!("CARGO_BIN_EXE_cama");
    for args in [
        vec!["generate", "--seed", "42"],
        vec!["sweep", "--seed", "42", "--plots"],
    ] {
        let status = std::process::Command::new(binary)
            .args(&args)
            .arg("--output-dir")
            .arg(dir)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        assert!(status.success(), "{args:?} failed");
    }
}

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(current) = stack.pop() {
        for entry in std::fs::read_dir(&current).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn criterion_9_pipeline_runs_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_pipeline(dir_a.path());
    run_pipeline(dir_b.path());

    let tree_a = tree_bytes(dir_a.path());
    let tree_b = tree_bytes(dir_b.path());
    let names: Vec<&String> = tree_a.iter().map(|(n, _)| n).collect();
    assert!(
        names.iter().any(|n| n.as_str() == "sweep_report.csv"),
        "missing report in {names:?}"
    );
    assert_eq!(tree_a.len(), tree_b.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in tree_a.iter().zip(&tree_b) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "{name_a} differs between runs");
    }
    println!(
        "ACCEPTANCE 9 PASS: two generate+sweep pipeline runs produced {} \
         byte-identical files",
        tree_a.len()
    );
}
