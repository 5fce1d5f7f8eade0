//! Shared helpers for unit tests.

use std::path::{Path, PathBuf};

use crate::corpus::{ArtistId, Corpus, SongId};

/// The worked five-song example: one listener of S1..S5 where
/// S1:{A1,A3} S2:{A1} S3:{A1} S4:{A2} S5:{A2,A3}.
///
/// Five of the ten song pairs share an artist and A1 occurs three times,
/// so the pattern scores are exactly 1/2 and 3/5.
pub fn five_song_fixture() -> Corpus {
    corpus_from_names(
        &[("L1", &["S1", "S2", "S3", "S4", "S5"])],
        &[
            ("S1", &["A1", "A3"]),
            ("S2", &["A1"]),
            ("S3", &["A1"]),
            ("S4", &["A2"]),
            ("S5", &["A2", "A3"]),
        ],
    )
}

/// One listener whose playlist is a chain: song i and i+1 share a distinct
/// artist and no other pair is related. 9 of 45 pairs match; every artist
/// occurs twice.
pub fn chain_fixture(len: usize) -> Corpus {
    let songs: Vec<String> = (0..len).map(|i| format!("S{}", i + 1)).collect();
    let mut catalog: Vec<(String, Vec<String>)> = Vec::new();
    for (i, song) in songs.iter().enumerate() {
        let mut artists = Vec::new();
        if i > 0 {
            artists.push(format!("A{i}"));
        }
        if i + 1 < len {
            artists.push(format!("A{}", i + 1));
        }
        catalog.push((song.clone(), artists));
    }
    let playlist: Vec<&str> = songs.iter().map(|s| s.as_str()).collect();
    let catalog_refs: Vec<(&str, Vec<&str>)> = catalog
        .iter()
        .map(|(s, a)| (s.as_str(), a.iter().map(|x| x.as_str()).collect()))
        .collect();
    corpus_from_owned(&[("L1", playlist)], &catalog_refs)
}

/// One listener with 50 songs: the first 25 share one artist, the other 25
/// carry pairwise-disjoint single artists. The favorite artist covers half
/// the playlist while most pairs are unrelated.
pub fn favorite_artist_fixture() -> Corpus {
    let songs: Vec<String> = (0..50).map(|i| format!("S{}", i + 1)).collect();
    let mut catalog: Vec<(String, Vec<String>)> = Vec::new();
    for (i, song) in songs.iter().enumerate() {
        let artists = if i < 25 {
            vec!["A0".to_string()]
        } else {
            vec![format!("A{}", i + 1)]
        };
        catalog.push((song.clone(), artists));
    }
    let playlist: Vec<&str> = songs.iter().map(|s| s.as_str()).collect();
    let catalog_refs: Vec<(&str, Vec<&str>)> = catalog
        .iter()
        .map(|(s, a)| (s.as_str(), a.iter().map(|x| x.as_str()).collect()))
        .collect();
    corpus_from_owned(&[("L1", playlist)], &catalog_refs)
}

/// Builds a corpus from string names, indexing in declaration order.
pub fn corpus_from_names(
    playlists: &[(&str, &[&str])],
    catalog: &[(&str, &[&str])],
) -> Corpus {
    let owned: Vec<(&str, Vec<&str>)> = playlists
        .iter()
        .map(|&(l, songs)| (l, songs.to_vec()))
        .collect();
    let catalog_owned: Vec<(&str, Vec<&str>)> = catalog
        .iter()
        .map(|&(s, artists)| (s, artists.to_vec()))
        .collect();
    corpus_from_owned(&owned, &catalog_owned)
}

fn corpus_from_owned(playlists: &[(&str, Vec<&str>)], catalog: &[(&str, Vec<&str>)]) -> Corpus {
    let mut song_names = Vec::new();
    let mut artist_names: Vec<String> = Vec::new();
    let mut song_artists = Vec::new();
    for (song, artists) in catalog {
        song_names.push(song.to_string());
        let ids = artists
            .iter()
            .map(|a| {
                match artist_names.iter().position(|x| x == a) {
                    Some(i) => ArtistId(i as u32),
                    None => {
                        artist_names.push(a.to_string());
                        ArtistId(artist_names.len() as u32 - 1)
                    }
                }
            })
            .collect();
        song_artists.push(ids);
    }
    let mut listener_names = Vec::new();
    let mut playlist_ids = Vec::new();
    for (listener, songs) in playlists {
        listener_names.push(listener.to_string());
        let ids = songs
            .iter()
            .map(|s| {
                SongId(
                    song_names
                        .iter()
                        .position(|x| x == s)
                        .unwrap_or_else(|| panic!("unknown song {s} in test corpus")) as u32,
                )
            })
            .collect();
        playlist_ids.push(ids);
    }
    Corpus::from_parts(
        playlist_ids,
        song_artists,
        listener_names,
        song_names,
        artist_names,
    )
    .expect("test corpus is valid")
}

/// Writes playlist/catalog JSON Lines files into `dir` and returns the paths.
pub fn write_corpus_files(
    dir: &Path,
    playlists: &[(&str, &[&str])],
    catalog: &[(&str, &[&str])],
) -> (PathBuf, PathBuf) {
    let pl = dir.join("playlists.jsonl");
    let sg = dir.join("songs.jsonl");
    let mut pl_text = String::new();
    for (listener, songs) in playlists {
        let songs_json: Vec<String> = songs.iter().map(|s| format!("\"{s}\"")).collect();
        pl_text.push_str(&format!(
            "{{\"listener\":\"{listener}\",\"songs\":[{}]}}\n",
            songs_json.join(",")
        ));
    }
    let mut sg_text = String::new();
    for (song, artists) in catalog {
        let artists_json: Vec<String> = artists.iter().map(|a| format!("\"{a}\"")).collect();
        sg_text.push_str(&format!(
            "{{\"song\":\"{song}\",\"artists\":[{}]}}\n",
            artists_json.join(",")
        ));
    }
    std::fs::write(&pl, pl_text).unwrap();
    std::fs::write(&sg, sg_text).unwrap();
    (pl, sg)
}
