//! Random walk with restart over the transition matrix.
//!
//! A walk starts with unit score on the target listener. Each step every
//! node pushes `alpha` times its score along its transition row, and the
//! source receives an extra `1 - alpha`. The update is synchronous: scores
//! are accumulated into a fresh vector and swapped in at the end of the
//! step, i.e.
//!
//! ```text
//! score' = alpha * T^t * score + (1 - alpha) * e_source
//! ```
//!
//! The fixed point of that map ranks every node by relevance to the source;
//! the song slice of the vector is the ranking the recommender consumes.
//! Because each transition row sums to 1 and `alpha + (1 - alpha) = 1`, the
//! total score stays at 1 as long as the walk never enters a degree-0 node,
//! and successive iterates contract in L1 by a factor of `alpha`, so the
//! walk converges geometrically.
//!
//! [`rwr_oracle`] solves the fixed-point equation directly as a dense linear
//! system. It exists to cross-check the iteration and is capped at small
//! dimensions.

use crate::corpus::{Corpus, ListenerId, SongId};
use crate::error::{Error, Result};
use crate::graph::HeteroGraph;
use crate::transition::TransitionMatrix;

/// Dimension cap for the dense fixed-point solve.
pub const ORACLE_DIM_CAP: usize = 500;

/// Walk parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig {
    /// Probability of walking along an edge; `1 - alpha` restarts at the
    /// source.
    pub alpha: f64,
    /// Hard cap on the number of propagation steps.
    pub maximum_step: usize,
    /// Early exit when the L1 change of a step falls below this; 0 disables
    /// the check and always runs `maximum_step` steps.
    pub convergence_tol: f64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            alpha: 0.8,
            maximum_step: 50,
            convergence_tol: 1e-10,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.maximum_step == 0 {
            return Err(Error::Config("maximum_step must be at least 1".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol < 0.0 {
            return Err(Error::Config(format!(
                "convergence_tol must be non-negative, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }
}

/// Per-node ranking scores, listeners first, songs after.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    n_listeners: usize,
    n_songs: usize,
    scores: Vec<f64>,
}

impl ScoreVector {
    pub fn all(&self) -> &[f64] {
        &self.scores
    }

    /// Scores of the song nodes, indexed by song id.
    pub fn song_scores(&self) -> &[f64] {
        &self.scores[self.n_listeners..]
    }

    pub fn total(&self) -> f64 {
        self.scores.iter().sum()
    }
}

fn check_source(tp: &TransitionMatrix, source: usize) -> Result<()> {
    if source >= tp.dim() {
        return Err(Error::SourceOutOfRange {
            node: source,
            dim: tp.dim(),
        });
    }
    if source >= tp.n_listeners() {
        return Err(Error::SourceNotListener(source));
    }
    Ok(())
}

/// Runs the walk from a listener node and returns the full score vector.
pub fn rwr_rank(tp: &TransitionMatrix, source: usize, config: &WalkConfig) -> Result<ScoreVector> {
    config.validate()?;
    check_source(tp, source)?;

    let dim = tp.dim();
    let mut score = vec![0.0; dim];
    score[source] = 1.0;
    let mut temp = vec![0.0; dim];

    for _ in 0..config.maximum_step {
        temp.iter_mut().for_each(|t| *t = 0.0);
        for (x, &mass) in score.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (cols, probs) = tp.row(x);
            for (&y, &p) in cols.iter().zip(probs) {
                temp[y as usize] += config.alpha * mass * p;
            }
        }
        temp[source] += 1.0 - config.alpha;

        let l1_change: f64 = score
            .iter()
            .zip(&temp)
            .map(|(a, b)| (a - b).abs())
            .sum();
        std::mem::swap(&mut score, &mut temp);

        if config.convergence_tol > 0.0 && l1_change < config.convergence_tol {
            break;
        }
    }

    Ok(ScoreVector {
        n_listeners: tp.n_listeners(),
        n_songs: tp.n_songs(),
        scores: score,
    })
}

/// Solves the walk's fixed point `s = alpha * T^t * s + (1 - alpha) * e`
/// directly as a dense linear system.
///
/// Independent of the iterative path; used to cross-check it. Capped at
/// [`ORACLE_DIM_CAP`] nodes.
pub fn rwr_oracle(tp: &TransitionMatrix, source: usize, alpha: f64) -> Result<ScoreVector> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    check_source(tp, source)?;
    let dim = tp.dim();
    if dim > ORACLE_DIM_CAP {
        return Err(Error::DenseDimension {
            dim,
            cap: ORACLE_DIM_CAP,
        });
    }

    // A = I - alpha * T^t
    let mut a = nalgebra::DMatrix::<f64>::identity(dim, dim);
    for x in 0..dim {
        let (cols, probs) = tp.row(x);
        for (&y, &p) in cols.iter().zip(probs) {
            a[(y as usize, x)] -= alpha * p;
        }
    }
    let mut b = nalgebra::DVector::<f64>::zeros(dim);
    b[source] = 1.0 - alpha;

    let solution = a.lu().solve(&b).ok_or(Error::SingularSystem)?;
    Ok(ScoreVector {
        n_listeners: tp.n_listeners(),
        n_songs: tp.n_songs(),
        scores: solution.iter().copied().collect(),
    })
}

/// Ranks the songs the listener has not yet played, best first.
///
/// Runs the walk from the listener's node, drops the listener's own playlist
/// from the candidates, sorts by score descending with ascending song index
/// as the tie-break, and keeps the first `top_n`.
pub fn recommend(
    corpus: &Corpus,
    graph: &HeteroGraph,
    tp: &TransitionMatrix,
    listener: ListenerId,
    config: &WalkConfig,
    top_n: usize,
) -> Result<Vec<(SongId, f64)>> {
    let source = graph.listener_node(listener);
    let ranking = rwr_rank(tp, source, config)?;
    let song_scores = ranking.song_scores();

    let playlist = corpus.playlist(listener);
    let mut candidates: Vec<(SongId, f64)> = corpus
        .songs()
        .filter(|s| !playlist.contains(s))
        .map(|s| (s, song_scores[s.0 as usize]))
        .collect();
    candidates.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then(a.0.cmp(&b.0))
    });
    candidates.truncate(top_n);
    Ok(candidates)
}
