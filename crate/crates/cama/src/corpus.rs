//! Corpus loading, validation, dense indexing and persistence.
//!
//! A corpus is two JSON Lines files: one playlist record per listener and one
//! artist-list record per song. On load the string identifiers are re-indexed
//! to dense integers (listeners `0..n`, songs `0..m`, artists `0..a`) and the
//! original strings are kept for output.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense listener index, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ListenerId(pub u32);

/// Dense song index, `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SongId(pub u32);

/// Dense artist index, `0..a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArtistId(pub u32);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaylistRecord {
    listener: String,
    songs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SongRecord {
    song: String,
    artists: Vec<String>,
}

/// Validated, densely indexed dataset: per-listener playlists and per-song
/// artist lists, plus the original string identifiers.
///
/// Immutable after construction; shares safely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub(crate) playlists: Vec<Vec<SongId>>,
    pub(crate) song_artists: Vec<Vec<ArtistId>>,
    pub(crate) listener_names: Vec<String>,
    pub(crate) song_names: Vec<String>,
    pub(crate) artist_names: Vec<String>,
}

impl Corpus {
    /// Builds a corpus from already-dense parts, validating every invariant.
    pub fn from_parts(
        playlists: Vec<Vec<SongId>>,
        song_artists: Vec<Vec<ArtistId>>,
        listener_names: Vec<String>,
        song_names: Vec<String>,
        artist_names: Vec<String>,
    ) -> Result<Self> {
        let corpus = Corpus {
            playlists,
            song_artists,
            listener_names,
            song_names,
            artist_names,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    /// Number of listeners.
    pub fn n_listeners(&self) -> usize {
        self.playlists.len()
    }

    /// Number of songs in the catalog (listened to or not).
    pub fn n_songs(&self) -> usize {
        self.song_artists.len()
    }

    /// Number of distinct artists.
    pub fn n_artists(&self) -> usize {
        self.artist_names.len()
    }

    /// The listener's playlist in original order.
    pub fn playlist(&self, listener: ListenerId) -> &[SongId] {
        &self.playlists[listener.0 as usize]
    }

    /// The song's artist set.
    pub fn artists(&self, song: SongId) -> &[ArtistId] {
        &self.song_artists[song.0 as usize]
    }

    pub fn listener_name(&self, listener: ListenerId) -> &str {
        &self.listener_names[listener.0 as usize]
    }

    pub fn song_name(&self, song: SongId) -> &str {
        &self.song_names[song.0 as usize]
    }

    pub fn artist_name(&self, artist: ArtistId) -> &str {
        &self.artist_names[artist.0 as usize]
    }

    /// Looks up a listener by its original string id.
    pub fn listener_by_name(&self, name: &str) -> Option<ListenerId> {
        self.listener_names
            .iter()
            .position(|n| n == name)
            .map(|i| ListenerId(i as u32))
    }

    pub fn listeners(&self) -> impl Iterator<Item = ListenerId> {
        (0..self.playlists.len() as u32).map(ListenerId)
    }

    pub fn songs(&self) -> impl Iterator<Item = SongId> {
        (0..self.song_artists.len() as u32).map(SongId)
    }

    /// Checks every corpus invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.playlists.is_empty() {
            return Err(Error::Validation("corpus has no listeners".into()));
        }
        if self.song_artists.is_empty() {
            return Err(Error::Validation("corpus has no songs".into()));
        }
        if self.listener_names.len() != self.playlists.len()
            || self.song_names.len() != self.song_artists.len()
        {
            return Err(Error::Validation("name table length mismatch".into()));
        }
        let m = self.song_artists.len() as u32;
        let a = self.artist_names.len() as u32;
        for (l, playlist) in self.playlists.iter().enumerate() {
            if playlist.is_empty() {
                return Err(Error::Validation(format!(
                    "listener {:?} has an empty playlist",
                    self.listener_names[l]
                )));
            }
            let mut seen = vec![false; m as usize];
            for &SongId(s) in playlist {
                if s >= m {
                    return Err(Error::Validation(format!(
                        "listener {:?} references song index {s} out of range",
                        self.listener_names[l]
                    )));
                }
                if seen[s as usize] {
                    return Err(Error::Validation(format!(
                        "listener {:?} lists song {:?} more than once",
                        self.listener_names[l], self.song_names[s as usize]
                    )));
                }
                seen[s as usize] = true;
            }
        }
        for (s, artists) in self.song_artists.iter().enumerate() {
            if artists.is_empty() {
                return Err(Error::Validation(format!(
                    "song {:?} has no artists",
                    self.song_names[s]
                )));
            }
            for &ArtistId(art) in artists {
                if art >= a {
                    return Err(Error::Validation(format!(
                        "song {:?} references artist index {art} out of range",
                        self.song_names[s]
                    )));
                }
            }
        }
        Ok(())
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            lines.push((idx + 1, line));
        }
    }
    Ok(lines)
}

/// Loads and validates the two corpus files, re-indexing string ids densely.
///
/// Listeners are indexed in playlist-file order, songs in catalog-file order,
/// artists in order of first appearance in the catalog.
pub fn load_corpus(playlists_path: &Path, songs_path: &Path) -> Result<Corpus> {
    // Catalog first: playlists are validated against it.
    let mut song_names = Vec::new();
    let mut song_index: HashMap<String, SongId> = HashMap::new();
    let mut artist_names = Vec::new();
    let mut artist_index: HashMap<String, ArtistId> = HashMap::new();
    let mut song_artists: Vec<Vec<ArtistId>> = Vec::new();

    for (line_no, line) in read_lines(songs_path)? {
        let record: SongRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: songs_path.into(),
            line: line_no,
            message: e.to_string(),
        })?;
        if song_index.contains_key(&record.song) {
            return Err(Error::Parse {
                path: songs_path.into(),
                line: line_no,
                message: format!("duplicate song record {:?}", record.song),
            });
        }
        if record.artists.is_empty() {
            return Err(Error::Parse {
                path: songs_path.into(),
                line: line_no,
                message: format!("song {:?} has an empty artist list", record.song),
            });
        }
        let mut artists = Vec::with_capacity(record.artists.len());
        for name in &record.artists {
            let id = *artist_index.entry(name.clone()).or_insert_with(|| {
                artist_names.push(name.clone());
                ArtistId(artist_names.len() as u32 - 1)
            });
            if artists.contains(&id) {
                return Err(Error::Parse {
                    path: songs_path.into(),
                    line: line_no,
                    message: format!("song {:?} lists artist {name:?} twice", record.song),
                });
            }
            artists.push(id);
        }
        song_index.insert(record.song.clone(), SongId(song_names.len() as u32));
        song_names.push(record.song);
        song_artists.push(artists);
    }

    let mut listener_names = Vec::new();
    let mut playlists: Vec<Vec<SongId>> = Vec::new();
    let mut listener_seen: HashMap<String, ()> = HashMap::new();

    for (line_no, line) in read_lines(playlists_path)? {
        let record: PlaylistRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: playlists_path.into(),
            line: line_no,
            message: e.to_string(),
        })?;
        if listener_seen.insert(record.listener.clone(), ()).is_some() {
            return Err(Error::Parse {
                path: playlists_path.into(),
                line: line_no,
                message: format!("duplicate listener record {:?}", record.listener),
            });
        }
        if record.songs.is_empty() {
            return Err(Error::Parse {
                path: playlists_path.into(),
                line: line_no,
                message: format!("listener {:?} has an empty playlist", record.listener),
            });
        }
        let mut playlist = Vec::with_capacity(record.songs.len());
        for name in &record.songs {
            let id = *song_index.get(name).ok_or_else(|| Error::Parse {
                path: playlists_path.into(),
                line: line_no,
                message: format!(
                    "listener {:?} references unknown song {name:?}",
                    record.listener
                ),
            })?;
            if playlist.contains(&id) {
                return Err(Error::Parse {
                    path: playlists_path.into(),
                    line: line_no,
                    message: format!(
                        "listener {:?} lists song {name:?} more than once",
                        record.listener
                    ),
                });
            }
            playlist.push(id);
        }
        listener_names.push(record.listener);
        playlists.push(playlist);
    }

    Corpus::from_parts(
        playlists,
        song_artists,
        listener_names,
        song_names,
        artist_names,
    )
}

/// Writes the corpus back to the two JSON Lines files.
///
/// Records are emitted in dense-id order with original string ids, so a
/// save/load round trip yields an identical corpus and repeated saves are
/// byte-stable.
pub fn save_corpus(corpus: &Corpus, playlists_path: &Path, songs_path: &Path) -> Result<()> {
    corpus.validate()?;

    let file = File::create(songs_path).map_err(|e| Error::io(songs_path, e))?;
    let mut out = BufWriter::new(file);
    for song in corpus.songs() {
        let record = SongRecord {
            song: corpus.song_name(song).to_string(),
            artists: corpus
                .artists(song)
                .iter()
                .map(|&a| corpus.artist_name(a).to_string())
                .collect(),
        };
        let line = serde_json::to_string(&record).expect("song record serializes");
        writeln!(out, "{line}").map_err(|e| Error::io(songs_path, e))?;
    }
    out.flush().map_err(|e| Error::io(songs_path, e))?;

    let file = File::create(playlists_path).map_err(|e| Error::io(playlists_path, e))?;
    let mut out = BufWriter::new(file);
    for listener in corpus.listeners() {
        let record = PlaylistRecord {
            listener: corpus.listener_name(listener).to_string(),
            songs: corpus
                .playlist(listener)
                .iter()
                .map(|&s| corpus.song_name(s).to_string())
                .collect(),
        };
        let line = serde_json::to_string(&record).expect("playlist record serializes");
        writeln!(out, "{line}").map_err(|e| Error::io(playlists_path, e))?;
    }
    out.flush().map_err(|e| Error::io(playlists_path, e))?;
    Ok(())
}
