//! Listening-pattern scores and target-listener selection.
//!
//! Two scores decide whether a listener shops for songs by artist:
//!
//! * `cama1`: the fraction of unordered song pairs in the playlist that
//!   share at least one artist. High when the whole playlist hangs together
//!   through common artists.
//! * `cama2`: the occurrence count of the most frequent artist divided by
//!   the playlist length. High when one favorite artist dominates.
//!
//! Either score alone is gameable: a chain of pairwise-linked songs keeps
//! cama1 positive while no artist repeats more than twice, and a playlist
//! that is half one artist and half unrelated songs pushes cama2 to 0.5
//! while most pairs are unrelated. A listener is a target only when both
//! scores strictly exceed their thresholds.
//!
//! Scores are kept as exact integer ratios next to the float value so that
//! threshold comparisons at representable ratios never depend on rounding.

use std::collections::HashMap;

use crate::corpus::{ArtistId, Corpus, ListenerId};
use crate::error::{Error, Result};

/// Pattern scores for one listener, as exact ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CamaScores {
    /// Unordered playlist song pairs sharing at least one artist.
    pub matching_pairs: u64,
    /// All C(k, 2) unordered pairs for playlist length k.
    pub total_pairs: u64,
    /// Playlist songs containing the most frequent artist.
    pub top_artist_count: u64,
    /// Playlist length k.
    pub playlist_len: u64,
}

impl CamaScores {
    /// `matching_pairs / total_pairs` as a float in [0, 1].
    pub fn cama1(&self) -> f64 {
        self.matching_pairs as f64 / self.total_pairs as f64
    }

    /// `top_artist_count / playlist_len` as a float in (0, 1].
    pub fn cama2(&self) -> f64 {
        self.top_artist_count as f64 / self.playlist_len as f64
    }

    /// Strict exceedance of both thresholds, compared exactly.
    pub fn exceeds(&self, thresholds: &Thresholds) -> bool {
        ratio_gt(self.matching_pairs, self.total_pairs, thresholds.t1)
            && ratio_gt(self.top_artist_count, self.playlist_len, thresholds.t2)
    }
}

/// Selection thresholds for (cama1, cama2).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Thresholds {
    pub t1: f64,
    pub t2: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { t1: 0.4, t2: 0.5 }
    }
}

impl Thresholds {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        let t = Thresholds { t1, t2 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t1", self.t1), ("t2", self.t2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!(
                    "threshold {name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Exact test of `p / q > t` for a non-negative rational and a finite float.
///
/// The float is decomposed into `m * 2^e` and the comparison is done in
/// integer arithmetic, so ratios that land exactly on a representable
/// threshold (1/2, 3/4, ...) compare strictly.
fn ratio_gt(p: u64, q: u64, t: f64) -> bool {
    debug_assert!(q > 0 && t.is_finite());
    if t < 0.0 {
        return true;
    }
    if t == 0.0 {
        return p > 0;
    }
    let bits = t.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp_bits == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let rhs = m as u128 * q as u128;
    if e >= 0 {
        // p > m * q * 2^e; shifting rhs past 128 bits means it exceeds any p.
        if e >= 128 || rhs.leading_zeros() < e as u32 {
            return false;
        }
        (p as u128) > (rhs << e)
    } else {
        // p * 2^-e > m * q; rhs < 2^117, so overflow of the left side wins.
        if p == 0 {
            return false;
        }
        let shift = -e;
        if shift >= 128 || (p as u128).leading_zeros() < shift as u32 {
            return true;
        }
        ((p as u128) << shift) > rhs
    }
}

/// Computes both pattern scores for one listener.
///
/// Errors for playlists of fewer than two songs: with no pairs to count,
/// cama1 is undefined.
pub fn cama_scores(listener: ListenerId, corpus: &Corpus) -> Result<CamaScores> {
    let playlist = corpus.playlist(listener);
    let k = playlist.len();
    if k < 2 {
        return Err(Error::IneligibleListener(listener.0));
    }

    // Sorted copies of each song's artist list for two-pointer intersection.
    let artist_sets: Vec<Vec<ArtistId>> = playlist
        .iter()
        .map(|&s| {
            let mut artists = corpus.artists(s).to_vec();
            artists.sort();
            artists
        })
        .collect();

    let mut matching_pairs = 0u64;
    for i in 0..k {
        for j in (i + 1)..k {
            if sorted_intersect(&artist_sets[i], &artist_sets[j]) {
                matching_pairs += 1;
            }
        }
    }

    let mut occurrences: HashMap<ArtistId, u64> = HashMap::new();
    for set in &artist_sets {
        for &artist in set {
            *occurrences.entry(artist).or_insert(0) += 1;
        }
    }
    let top_artist_count = occurrences.values().copied().max().unwrap_or(0);

    Ok(CamaScores {
        matching_pairs,
        total_pairs: (k as u64) * (k as u64 - 1) / 2,
        top_artist_count,
        playlist_len: k as u64,
    })
}

fn sorted_intersect(a: &[ArtistId], b: &[ArtistId]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Selects listeners whose scores strictly exceed both thresholds.
///
/// Listeners with fewer than two songs are skipped, not errors. The result
/// is in ascending listener order.
pub fn select_targets(corpus: &Corpus, thresholds: &Thresholds) -> Result<Vec<ListenerId>> {
    thresholds.validate()?;
    let mut targets = Vec::new();
    for listener in corpus.listeners() {
        if corpus.playlist(listener).len() < 2 {
            continue;
        }
        let scores = cama_scores(listener, corpus)?;
        if scores.exceeds(thresholds) {
            targets.push(listener);
        }
    }
    Ok(targets)
}
