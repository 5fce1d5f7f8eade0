//! Seeded synthetic corpus generation.
//!
//! Real playlist datasets with per-song artist lists are hard to come by, so
//! the evaluation harness runs on generated corpora. Song popularity and
//! artist productivity both follow a half-normal weight over rank, giving a
//! few hits that most listeners share and a long tail, rather than a uniform
//! catalog.
//!
//! Generation is a deterministic function of the config: the RNG is ChaCha8
//! seeded from `seed`, so the same config reproduces the same corpus on any
//! platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ArtistId, Corpus, SongId};
use crate::error::{Error, Result};

/// Inclusive integer range used for playlist and artist-list sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LenRange {
    pub min: usize,
    pub max: usize,
}

impl LenRange {
    pub fn new(min: usize, max: usize) -> Self {
        LenRange { min, max }
    }

    pub fn contains(&self, len: usize) -> bool {
        self.min <= len && len <= self.max
    }
}

/// Synthetic-corpus parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n_listeners: usize,
    pub n_songs: usize,
    pub n_artists: usize,
    /// Playlist sizes, sampled uniformly from this range.
    pub playlist_len_range: LenRange,
    /// Artist-list sizes per song, sampled uniformly from this range.
    pub artists_per_song_range: LenRange,
    /// Spread of the half-normal popularity curve over song rank.
    /// `None` defaults to `n_songs / 4`.
    pub popularity_sigma: Option<f64>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 42,
            n_listeners: 100,
            n_songs: 50,
            n_artists: 20,
            playlist_len_range: LenRange::new(11, 19),
            artists_per_song_range: LenRange::new(2, 4),
            popularity_sigma: None,
        }
    }
}

impl GenConfig {
    pub fn song_sigma(&self) -> f64 {
        self.popularity_sigma
            .unwrap_or(self.n_songs as f64 / 4.0)
    }

    fn artist_sigma(&self) -> f64 {
        self.n_artists as f64 / 4.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_listeners == 0 || self.n_songs == 0 || self.n_artists == 0 {
            return Err(Error::Config(
                "listener, song and artist counts must all be positive".into(),
            ));
        }
        let pl = self.playlist_len_range;
        if pl.min < 1 || pl.max < pl.min || pl.max > self.n_songs {
            return Err(Error::Config(format!(
                "playlist length range [{}, {}] must fit within [1, {}]",
                pl.min, pl.max, self.n_songs
            )));
        }
        let ar = self.artists_per_song_range;
        if ar.min < 1 || ar.max < ar.min || ar.max > self.n_artists {
            return Err(Error::Config(format!(
                "artists-per-song range [{}, {}] must fit within [1, {}]",
                ar.min, ar.max, self.n_artists
            )));
        }
        if self.song_sigma() <= 0.0 {
            return Err(Error::Config("popularity sigma must be positive".into()));
        }
        Ok(())
    }
}

/// Half-normal popularity weights over ranks `0..count`.
///
/// Entry `i` is proportional to `exp(-i^2 / (2 sigma^2))`; the vector is
/// strictly positive, non-increasing and sums to 1.
pub fn popularity_weights(count: usize, sigma: f64) -> Result<Vec<f64>> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::Config(format!(
            "popularity sigma must be a positive finite number, got {sigma}"
        )));
    }
    // Floored at the smallest positive double so extreme rank/sigma ratios
    // cannot underflow a weight to exactly zero.
    let mut weights: Vec<f64> = (0..count)
        .map(|i| {
            let i = i as f64;
            (-(i * i) / (2.0 * sigma * sigma))
                .exp()
                .max(f64::MIN_POSITIVE)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// Samples `k` distinct indices from `0..weights.len()`, each draw weighted
/// by the remaining items' weights. Returned in draw order.
fn sample_weighted_without_replacement(
    rng: &mut ChaCha8Rng,
    weights: &[f64],
    k: usize,
) -> Vec<usize> {
    debug_assert!(k <= weights.len());
    let mut remaining: Vec<(usize, f64)> = weights.iter().copied().enumerate().collect();
    let mut total: f64 = remaining.iter().map(|&(_, w)| w).sum();
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let mut target = rng.gen::<f64>() * total;
        let mut chosen = remaining.len() - 1;
        for (pos, &(_, w)) in remaining.iter().enumerate() {
            if target < w {
                chosen = pos;
                break;
            }
            target -= w;
        }
        let (idx, w) = remaining.swap_remove(chosen);
        picked.push(idx);
        total -= w;
    }
    picked
}

/// Generates a corpus from the config. Deterministic in the config.
pub fn generate(config: &GenConfig) -> Result<Corpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let artist_weights = popularity_weights(config.n_artists, config.artist_sigma())?;
    let song_weights = popularity_weights(config.n_songs, config.song_sigma())?;

    // Catalog: artists per song, weighted toward the prolific ranks.
    let ar = config.artists_per_song_range;
    let mut song_artists = Vec::with_capacity(config.n_songs);
    for _ in 0..config.n_songs {
        let count = rng.gen_range(ar.min..=ar.max);
        let mut artists: Vec<ArtistId> =
            sample_weighted_without_replacement(&mut rng, &artist_weights, count)
                .into_iter()
                .map(|i| ArtistId(i as u32))
                .collect();
        artists.sort();
        song_artists.push(artists);
    }

    // Playlists: songs per listener, weighted toward the popular ranks.
    let pl = config.playlist_len_range;
    let mut playlists = Vec::with_capacity(config.n_listeners);
    for _ in 0..config.n_listeners {
        let len = rng.gen_range(pl.min..=pl.max);
        let mut songs: Vec<SongId> =
            sample_weighted_without_replacement(&mut rng, &song_weights, len)
                .into_iter()
                .map(|i| SongId(i as u32))
                .collect();
        songs.sort();
        playlists.push(songs);
    }

    let listener_names = (0..config.n_listeners)
        .map(|i| format!("L{}", i + 1))
        .collect();
    let song_names = (0..config.n_songs).map(|i| format!("S{}", i + 1)).collect();
    let artist_names = (0..config.n_artists)
        .map(|i| format!("A{}", i + 1))
        .collect();

    Corpus::from_parts(
        playlists,
        song_artists,
        listener_names,
        song_names,
        artist_names,
    )
}
