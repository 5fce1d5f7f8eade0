//! Row-stochastic transition matrix over the listener-song graph.
//!
//! The matrix has the block structure
//!
//! ```text
//! TP = | 0      TP_LS |
//!      | TP_SL  TP_SS |
//! ```
//!
//! with each row normalized by that node's total edge weight. Listeners only
//! border songs, so a listener row spreads `1/deg` over its playlist. A song
//! borders both listeners and partner songs and shares a single denominator
//! across the two blocks, again `1/deg` with unit edge weights.
//!
//! Rows are stored compressed (CSR) with the probabilities materialized, in
//! ascending column order within each row. Degree-0 nodes keep an all-zero
//! row; score mass walking into them leaks out of the system, which leaves
//! rankings among reachable songs unaffected.

use std::io::Write;

use crate::graph::HeteroGraph;

/// Weight of every graph edge. Neighbors are equally valued, so the general
/// weighted normalization below collapses to reciprocal degree.
const EDGE_WEIGHT: f64 = 1.0;

/// Sparse row-stochastic matrix over `n + m` nodes, listeners first.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n_listeners: usize,
    n_songs: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<f64>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.n_listeners + self.n_songs
    }

    pub fn n_listeners(&self) -> usize {
        self.n_listeners
    }

    pub fn n_songs(&self) -> usize {
        self.n_songs
    }

    /// Nonzero entries of row `i` as parallel column/probability slices.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.cols[lo..hi], &self.probs[lo..hi])
    }

    /// Probability of moving from `i` to `j` (zero when no edge).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (cols, probs) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(pos) => probs[pos],
            Err(_) => 0.0,
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let (_, probs) = self.row(i);
        probs.iter().sum()
    }

    /// Writes `(row, col, prob)` triples as CSV, ascending by row then column.
    pub fn dump_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "row,col,prob")?;
        for i in 0..self.dim() {
            let (cols, probs) = self.row(i);
            for (c, p) in cols.iter().zip(probs) {
                writeln!(out, "{i},{c},{p}")?;
            }
        }
        Ok(())
    }
}

/// Normalizes the graph's adjacency into transition probabilities.
pub fn build_transition(graph: &HeteroGraph) -> TransitionMatrix {
    let dim = graph.num_nodes();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut probs = Vec::new();

    row_ptr.push(0);
    for node in 0..dim {
        let neighbors = graph.neighbors(node);
        let weight_sum: f64 = neighbors.len() as f64 * EDGE_WEIGHT;
        for &nb in neighbors {
            cols.push(nb);
            probs.push(EDGE_WEIGHT / weight_sum);
        }
        row_ptr.push(cols.len());
    }

    TransitionMatrix {
        n_listeners: graph.n_listeners(),
        n_songs: graph.n_songs(),
        row_ptr,
        cols,
        probs,
    }
}

/// A row whose sum is neither 0 nor 1 within tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSumDefect {
    pub row: usize,
    pub sum: f64,
}

/// Scans every row and reports the ones violating stochasticity. Zero rows
/// are legal (isolated nodes); anything else must sum to 1 within 1e-12.
pub fn row_stochastic_check(tp: &TransitionMatrix) -> Vec<RowSumDefect> {
    let mut defects = Vec::new();
    for i in 0..tp.dim() {
        let sum = tp.row_sum(i);
        if sum.abs() > 1e-12 && (sum - 1.0).abs() > 1e-12 {
            defects.push(RowSumDefect { row: i, sum });
        }
    }
    defects
}
