//! Graph-based music recommendation for listeners with common-artist
//! listening patterns.
//!
//! The pipeline has four stages:
//!
//! 1. [`corpus`] loads (or [`datagen`] synthesizes) per-listener playlists
//!    and per-song artist lists.
//! 2. [`target`] scores each listener's playlist cohesion (`cama1`) and
//!    favorite-artist concentration (`cama2`) and selects the listeners
//!    whose scores clear both thresholds.
//! 3. [`graph`] builds a heterogeneous listener-song graph (playlist edges
//!    plus common-artist song-song edges), [`transition`] normalizes it to a
//!    row-stochastic transition matrix, and [`rwr`] ranks songs with a
//!    random walk with restart from the target listener.
//! 4. [`eval`] replays the whole pipeline over a train/test split and
//!    reports precision, recall and F1 for top-N recommendation, with
//!    hyperparameter sweeps.

pub mod corpus;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod graph;
pub mod rwr;
pub mod target;
pub mod transition;

pub mod cli;

#[cfg(test)]
pub(crate) mod testutil;

pub use corpus::{ArtistId, Corpus, ListenerId, SongId, load_corpus, save_corpus};
pub use error::{Error, Result};
