//! Canonical forms of exchange matrices under simultaneous row/column permutation.
//!
//! The search is an individualization-refinement tree: vertices are coloured
//! by iterated row signatures until the ordered partition is equitable, then
//! the first smallest non-singleton cell is split by individualizing each of
//! its vertices in turn. Every leaf is a vertex ordering; the key is the
//! lexicographically smallest matrix read off over all leaves. The tree is
//! explored exhaustively, so the optimal leaves are exactly one coset of the
//! automorphism group and we get `Aut(B)` for free.
//!
//! Worst case is exponential for matrices with large cells of interchangeable
//! vertices (e.g. many isolated vertices); mutation classes of connected
//! matrices stay small.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::matrix::ExchangeMatrix;
use crate::perm::Perm;

/// Opaque permutation-invariant key; equal keys iff permutation-equivalent matrices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct Labeling {
    pub key: CanonicalKey,
    /// `relabel . B` is the canonical matrix.
    pub relabel: Perm,
    /// Every automorphism of `B` (permutations fixing it), identity included.
    pub automorphisms: Vec<Perm>,
}

pub fn canonical_form(b: &ExchangeMatrix) -> CanonicalKey {
    canonical_labeling(b).key
}

pub fn canonical_matrix(b: &ExchangeMatrix) -> ExchangeMatrix {
    b.permuted(&canonical_labeling(b).relabel)
}

/// Order-preserving compression of the entries to small integers.
fn compress(entries: &[BigInt]) -> Vec<i64> {
    let mut distinct: Vec<&BigInt> = entries.iter().collect();
    distinct.sort();
    distinct.dedup();
    entries
        .iter()
        .map(|v| distinct.binary_search(&v).expect("present") as i64)
        .collect()
}

struct Search<'a, T> {
    n: usize,
    a: &'a [T],
    best: Option<Vec<T>>,
    leaves: Vec<Vec<usize>>,
}

impl<T: Ord + Copy> Search<'_, T> {
    fn at(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    /// Splits cells by (cell, sorted neighbour signature) until stable.
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let mut cell_of = vec![0usize; self.n];
        loop {
            for (c, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = c;
                }
            }
            let mut next = Vec::with_capacity(cells.len());
            for cell in &cells {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut signed: Vec<(Vec<(usize, T, T)>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<(usize, T, T)> = (0..self.n)
                            .filter(|&u| u != v)
                            .map(|u| (cell_of[u], self.at(v, u), self.at(u, v)))
                            .collect();
                        sig.sort_unstable();
                        (sig, v)
                    })
                    .collect();
                signed.sort();
                let mut start = 0;
                for idx in 1..=signed.len() {
                    if idx == signed.len() || signed[idx].0 != signed[start].0 {
                        next.push(signed[start..idx].iter().map(|(_, v)| *v).collect());
                        start = idx;
                    }
                }
            }
            if next.len() == cells.len() {
                return next;
            }
            cells = next;
        }
    }

    fn explore(&mut self, cells: Vec<Vec<usize>>) {
        let cells = self.refine(cells);
        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i);
        let Some(t) = target else {
            self.leaf(cells.into_iter().flatten().collect());
            return;
        };
        for &v in &cells[t] {
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend(cells[..t].iter().cloned());
            child.push(vec![v]);
            child.push(cells[t].iter().copied().filter(|&u| u != v).collect());
            child.extend(cells[t + 1..].iter().cloned());
            self.explore(child);
        }
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let key: Vec<T> = order
            .iter()
            .flat_map(|&i| order.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.at(i, j))
            .collect();
        let cmp = match &self.best {
            None => Ordering::Less,
            Some(best) => key.cmp(best),
        };
        match cmp {
            Ordering::Less => {
                self.best = Some(key);
                self.leaves = vec![order];
            }
            Ordering::Equal => self.leaves.push(order),
            Ordering::Greater => {}
        }
    }
}

fn encode(b: &ExchangeMatrix, order: &[usize]) -> CanonicalKey {
    let n = b.rank();
    let mut bytes = Vec::with_capacity(4 + 2 * n * n);
    bytes.extend_from_slice(&(n as u32).to_be_bytes());
    for &i in order {
        for &j in order {
            let raw = b.get(i, j).to_signed_bytes_be();
            bytes.extend_from_slice(&(raw.len() as u16).to_be_bytes());
            bytes.extend_from_slice(&raw);
        }
    }
    CanonicalKey(bytes)
}

/// Maps vertex `order[a]` to position `a`.
pub(crate) fn order_to_relabel(order: &[usize]) -> Perm {
    let mut images = vec![0; order.len()];
    for (pos, &v) in order.iter().enumerate() {
        images[v] = pos;
    }
    Perm::from_images(images).expect("order is a permutation")
}

/// Lex-minimal relabelled matrix of a row-major `n x n` integer matrix, with
/// every vertex order attaining it.
pub(crate) fn minimal_orders<T: Ord + Copy>(n: usize, a: &[T]) -> (Vec<T>, Vec<Vec<usize>>) {
    let mut search = Search {
        n,
        a,
        best: None,
        leaves: Vec::new(),
    };
    search.explore(vec![(0..n).collect()]);
    (search.best.unwrap_or_default(), search.leaves)
}

pub fn canonical_labeling(b: &ExchangeMatrix) -> Labeling {
    let a = compress(b.entries());
    let (_, leaves) = minimal_orders(b.rank(), &a);
    let first = order_to_relabel(&leaves[0]);
    let automorphisms = leaves
        .iter()
        .map(|order| order_to_relabel(order).inverse().compose(&first))
        .collect();
    Labeling {
        key: encode(b, &leaves[0]),
        relabel: first,
        automorphisms,
    }
}
