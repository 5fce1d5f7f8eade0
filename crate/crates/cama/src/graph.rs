//! Heterogeneous listener-song graph construction.
//!
//! Listeners occupy node indices `0..n` and songs `n..n+m`. A listener is
//! connected to every song in its playlist; two songs are connected when
//! their artist sets intersect. There are no listener-listener edges and no
//! self-loops, and all edges are undirected and unweighted.

use std::collections::BTreeSet;

use crate::corpus::{Corpus, ListenerId, SongId};

/// Undirected two-layer graph over listeners and songs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeteroGraph {
    n_listeners: usize,
    n_songs: usize,
    /// Sorted neighbor lists, one per node, listeners first.
    adj: Vec<Vec<u32>>,
    ls_edges: usize,
    ss_edges: usize,
}

impl HeteroGraph {
    pub fn n_listeners(&self) -> usize {
        self.n_listeners
    }

    pub fn n_songs(&self) -> usize {
        self.n_songs
    }

    pub fn num_nodes(&self) -> usize {
        self.n_listeners + self.n_songs
    }

    /// Node index of a listener (the identity mapping).
    pub fn listener_node(&self, listener: ListenerId) -> usize {
        listener.0 as usize
    }

    /// Node index of a song (offset past the listener block).
    pub fn song_node(&self, song: SongId) -> usize {
        self.n_listeners + song.0 as usize
    }

    pub fn is_song_node(&self, node: usize) -> bool {
        node >= self.n_listeners && node < self.num_nodes()
    }

    /// Sorted neighbor indices of a node.
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    /// Listener-song edge count (each undirected edge counted once).
    pub fn listener_song_edges(&self) -> usize {
        self.ls_edges
    }

    /// Song-song edge count (each undirected edge counted once).
    pub fn song_song_edges(&self) -> usize {
        self.ss_edges
    }

    /// `(degree, node count)` pairs in ascending degree order.
    pub fn degree_histogram(&self) -> Vec<(usize, usize)> {
        let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
        for list in &self.adj {
            *counts.entry(list.len()).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }
}

/// All unordered song pairs whose artist sets intersect.
///
/// Computed through an artist-to-songs inverted index rather than an
/// all-pairs scan; the result is the same set either way.
pub fn common_artist_pairs(corpus: &Corpus) -> BTreeSet<(SongId, SongId)> {
    let mut by_artist: Vec<Vec<SongId>> = vec![Vec::new(); corpus.n_artists()];
    for song in corpus.songs() {
        for &artist in corpus.artists(song) {
            by_artist[artist.0 as usize].push(song);
        }
    }
    let mut pairs = BTreeSet::new();
    for songs in &by_artist {
        for (i, &a) in songs.iter().enumerate() {
            for &b in &songs[i + 1..] {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    pairs
}

/// Builds the graph from a corpus. Adjacency lists come out sorted, so the
/// construction is deterministic for a given corpus.
pub fn build_graph(corpus: &Corpus) -> HeteroGraph {
    let n = corpus.n_listeners();
    let m = corpus.n_songs();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n + m];

    let mut ls_edges = 0;
    for listener in corpus.listeners() {
        for &song in corpus.playlist(listener) {
            let l = listener.0 as usize;
            let s = n + song.0 as usize;
            adj[l].push(s as u32);
            adj[s].push(l as u32);
            ls_edges += 1;
        }
    }

    let pairs = common_artist_pairs(corpus);
    let ss_edges = pairs.len();
    for &(a, b) in &pairs {
        let a = n + a.0 as usize;
        let b = n + b.0 as usize;
        adj[a].push(b as u32);
        adj[b].push(a as u32);
    }

    for list in &mut adj {
        list.sort_unstable();
    }

    HeteroGraph {
        n_listeners: n,
        n_songs: m,
        adj,
        ls_edges,
        ss_edges,
    }
}
