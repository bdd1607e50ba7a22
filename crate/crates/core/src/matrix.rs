//! Exact integer exchange matrices.
//!
//! An [`ExchangeMatrix`] is a square integer matrix `B` together with the
//! minimal positive diagonal `D` for which `DB` is skew-symmetric. Every
//! constructor validates skew-symmetrizability, so a value of this type always
//! satisfies the invariant. Matrices are immutable: mutation returns a fresh
//! value.
//!
//! Indices are 0-based throughout the library. Error messages and the
//! external file formats use the 1-based convention of the mathematical
//! literature.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::perm::Perm;

/// Why a square matrix fails to be skew-symmetrizable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetrizerError {
    #[error("diagonal entry b[{}][{}] is nonzero", .index + 1, .index + 1)]
    NonzeroDiagonal { index: usize },
    #[error("exactly one of b[{}][{}] and b[{}][{}] is zero", .i + 1, .j + 1, .j + 1, .i + 1)]
    OneSidedZero { i: usize, j: usize },
    #[error("b[{}][{}] and b[{}][{}] have the same sign", .i + 1, .j + 1, .j + 1, .i + 1)]
    SameSign { i: usize, j: usize },
    #[error("ratios around the cycle {} are inconsistent", format_cycle(.cycle))]
    InconsistentCycle { cycle: Vec<usize> },
}

fn format_cycle(cycle: &[usize]) -> String {
    cycle
        .iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("expected a nonempty square matrix, got {rows} rows with {detail}")]
    Shape { rows: usize, detail: String },
    #[error(transparent)]
    NotSkewSymmetrizable(#[from] SymmetrizerError),
    #[error("index {} out of range for rank {n}", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("index {} appears twice in the index set", .0 + 1)]
    DuplicateIndex(usize),
    #[error("lower part must be {n}x{n}, got {len} entries")]
    LowerShape { n: usize, len: usize },
}

/// `max(a, 0)`.
pub(crate) fn positive_part(a: &BigInt) -> BigInt {
    if a.is_positive() {
        a.clone()
    } else {
        BigInt::zero()
    }
}

/// Minimal positive integer symmetrizer of a square matrix given row-major.
///
/// Ratios `d_j / d_i = -b_ij / b_ji` are propagated along a BFS spanning
/// forest of the nonzero pattern; every remaining pair is then checked, and
/// each connected component is scaled to coprime integers.
pub fn check_skew_symmetrizable(n: usize, entries: &[BigInt]) -> Result<Vec<BigInt>, SymmetrizerError> {
    assert_eq!(entries.len(), n * n, "entries must be n*n");
    let at = |i: usize, j: usize| &entries[i * n + j];
    for i in 0..n {
        if !at(i, i).is_zero() {
            return Err(SymmetrizerError::NonzeroDiagonal { index: i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (at(i, j), at(j, i));
            if a.is_zero() != b.is_zero() {
                return Err(SymmetrizerError::OneSidedZero { i, j });
            }
            if !a.is_zero() && a.sign() == b.sign() {
                return Err(SymmetrizerError::SameSign { i, j });
            }
        }
    }

    let mut ratio: Vec<Option<BigRational>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut component = vec![usize::MAX; n];
    let mut result = vec![BigInt::zero(); n];
    for root in 0..n {
        if ratio[root].is_some() {
            continue;
        }
        ratio[root] = Some(BigRational::one());
        component[root] = root;
        let mut members = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if at(i, j).is_zero() {
                    continue;
                }
                // d_i b_ij = -d_j b_ji
                let di = ratio[i].clone().expect("visited");
                let expected = -di * BigRational::new(at(i, j).clone(), at(j, i).clone());
                match &ratio[j] {
                    None => {
                        ratio[j] = Some(expected);
                        parent[j] = Some(i);
                        component[j] = root;
                        members.push(j);
                        queue.push_back(j);
                    }
                    Some(dj) if *dj == expected => {}
                    Some(_) => {
                        return Err(SymmetrizerError::InconsistentCycle {
                            cycle: tree_cycle(&parent, i, j),
                        })
                    }
                }
            }
        }
        let lcm = members
            .iter()
            .map(|&v| ratio[v].as_ref().unwrap().denom().clone())
            .fold(BigInt::one(), |acc, d| acc.lcm(&d));
        let scaled: Vec<BigInt> = members
            .iter()
            .map(|&v| {
                let r = ratio[v].as_ref().unwrap();
                r.numer() * (&lcm / r.denom())
            })
            .collect();
        let gcd = scaled.iter().fold(BigInt::zero(), |acc, d| acc.gcd(d));
        for (&v, d) in members.iter().zip(scaled) {
            result[v] = d / &gcd;
        }
    }
    Ok(result)
}

/// Closes the tree paths from `i` and `j` to their common ancestor with the
/// edge `i - j`.
fn tree_cycle(parent: &[Option<usize>], i: usize, j: usize) -> Vec<usize> {
    let path = |mut v: usize| {
        let mut p = vec![v];
        while let Some(u) = parent[v] {
            p.push(u);
            v = u;
        }
        p
    };
    let pi = path(i);
    let pj = path(j);
    let lca = *pi.iter().find(|v| pj.contains(v)).expect("same component");
    let mut cycle: Vec<usize> = pi.iter().copied().take_while(|&v| v != lca).collect();
    cycle.push(lca);
    let back: Vec<usize> = pj.iter().copied().take_while(|&v| v != lca).collect();
    cycle.extend(back.into_iter().rev());
    cycle.push(i);
    cycle
}

/// Applies matrix mutation at column `k` to an `rows x cols` row-major block
/// whose top `cols x cols` part is the exchange matrix.
pub(crate) fn mutate_block(rows: usize, cols: usize, entries: &[BigInt], k: usize) -> Vec<BigInt> {
    let at = |i: usize, j: usize| &entries[i * cols + j];
    let mut out = Vec::with_capacity(entries.len());
    for i in 0..rows {
        let bik = at(i, k);
        for j in 0..cols {
            let bij = at(i, j);
            if i == k || j == k {
                out.push(-bij);
                continue;
            }
            let bkj = at(k, j);
            let mut v = bij.clone();
            if bik.is_positive() && bkj.is_positive() {
                v += bik * bkj;
            } else if bik.is_negative() && bkj.is_negative() {
                v -= bik * bkj;
            }
            out.push(v);
        }
    }
    out
}

/// A skew-symmetrizable `n x n` integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    entries: Vec<BigInt>,
    symmetrizer: Vec<BigInt>,
}

impl ExchangeMatrix {
    pub fn new(n: usize, entries: Vec<BigInt>) -> Result<Self, MatrixError> {
        if n == 0 || entries.len() != n * n {
            return Err(MatrixError::Shape {
                rows: n,
                detail: format!("{} entries", entries.len()),
            });
        }
        let symmetrizer = check_skew_symmetrizable(n, &entries)?;
        Ok(Self { n, entries, symmetrizer })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(MatrixError::Shape {
                rows: n,
                detail: format!("a row of length {}", bad.len()),
            });
        }
        Self::new(n, rows.iter().flatten().cloned().map(Into::into).collect())
    }

    /// `B_{b,c} = [[0, c], [-b, 0]]`.
    pub fn rank2(b: i64, c: i64) -> Result<Self, MatrixError> {
        Self::from_rows(&[vec![0, c], vec![-b, 0]])
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, vec![BigInt::zero(); n * n]).expect("zero matrix is skew-symmetric")
    }

    pub(crate) fn from_trusted(n: usize, entries: Vec<BigInt>, symmetrizer: Vec<BigInt>) -> Self {
        debug_assert_eq!(
            check_skew_symmetrizable(n, &entries).as_ref(),
            Ok(&symmetrizer),
            "symmetrizer cache out of sync"
        );
        Self { n, entries, symmetrizer }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// The minimal symmetrizer `d_1, .., d_n` (coprime on each connected component).
    pub fn symmetrizer(&self) -> &[BigInt] {
        &self.symmetrizer
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    /// `|b_ij * b_ji|`, the weight of the diagram arc between `i` and `j`.
    pub fn weight(&self, i: usize, j: usize) -> BigInt {
        (self.get(i, j) * self.get(j, i)).abs()
    }

    fn check_index(&self, k: usize) -> Result<(), MatrixError> {
        if k >= self.n {
            Err(MatrixError::IndexOutOfRange { index: k, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Matrix mutation `mu_k`. The symmetrizer is carried over unchanged.
    pub fn mutate(&self, k: usize) -> Result<Self, MatrixError> {
        self.check_index(k)?;
        Ok(self.mutate_unchecked(k))
    }

    pub(crate) fn mutate_unchecked(&self, k: usize) -> Self {
        let entries = mutate_block(self.n, self.n, &self.entries, k);
        Self::from_trusted(self.n, entries, self.symmetrizer.clone())
    }

    /// Applies the mutations of `word` left to right.
    pub fn mutate_word(&self, word: &[usize]) -> Result<Self, MatrixError> {
        word.iter().try_fold(self.clone(), |m, &k| m.mutate(k))
    }

    /// Rows and columns restricted to `indices`, in the given order.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<Self, MatrixError> {
        if indices.is_empty() {
            return Err(MatrixError::EmptyIndexSet);
        }
        for (pos, &i) in indices.iter().enumerate() {
            self.check_index(i)?;
            if indices[..pos].contains(&i) {
                return Err(MatrixError::DuplicateIndex(i));
            }
        }
        let entries = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Self::new(indices.len(), entries)
    }

    /// The relabelled matrix `sigma . B`, with `(sigma . B)[sigma(i)][sigma(j)] = B[i][j]`.
    pub fn permuted(&self, sigma: &Perm) -> Self {
        assert_eq!(sigma.len(), self.n);
        let mut entries = vec![BigInt::zero(); self.n * self.n];
        let mut symmetrizer = vec![BigInt::zero(); self.n];
        for i in 0..self.n {
            symmetrizer[sigma.apply(i)] = self.symmetrizer[i].clone();
            for j in 0..self.n {
                entries[sigma.apply(i) * self.n + sigma.apply(j)] = self.get(i, j).clone();
            }
        }
        Self::from_trusted(self.n, entries, symmetrizer)
    }

    pub fn extended(&self) -> ExtendedMatrix {
        ExtendedMatrix::principal(self)
    }

    /// Connected components of the nonzero pattern, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                for j in 0..self.n {
                    if !seen[j] && !self.get(i, j).is_zero() {
                        seen[j] = true;
                        comp.push(j);
                        queue.push_back(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }
}

impl fmt::Debug for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExchangeMatrix{:?}", self.rows())
    }
}

impl fmt::Display for ExchangeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A `2n x n` matrix whose upper part is an exchange matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtendedMatrix {
    upper: ExchangeMatrix,
    lower: Vec<BigInt>,
}

impl ExtendedMatrix {
    /// The extended matrix of `B`: upper part `B`, lower part the identity.
    pub fn principal(b: &ExchangeMatrix) -> Self {
        let n = b.rank();
        let lower = (0..n * n)
            .map(|idx| if idx / n == idx % n { BigInt::one() } else { BigInt::zero() })
            .collect();
        Self { upper: b.clone(), lower }
    }

    pub fn new(upper: ExchangeMatrix, lower: Vec<BigInt>) -> Result<Self, MatrixError> {
        let n = upper.rank();
        if lower.len() != n * n {
            return Err(MatrixError::LowerShape { n, len: lower.len() });
        }
        Ok(Self { upper, lower })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, MatrixError> {
        let n = rows.len() / 2;
        if rows.len() != 2 * n || n == 0 {
            return Err(MatrixError::Shape {
                rows: rows.len(),
                detail: "an odd or zero row count for an extended matrix".into(),
            });
        }
        let upper = ExchangeMatrix::from_rows(&rows[..n])?;
        if let Some(bad) = rows[n..].iter().find(|r| r.len() != n) {
            return Err(MatrixError::Shape {
                rows: rows.len(),
                detail: format!("a lower row of length {}", bad.len()),
            });
        }
        let lower = rows[n..].iter().flatten().cloned().map(Into::into).collect();
        Ok(Self { upper, lower })
    }

    pub fn rank(&self) -> usize {
        self.upper.rank()
    }

    pub fn upper(&self) -> &ExchangeMatrix {
        &self.upper
    }

    /// Entry `c_ij` of the lower (coefficient) block.
    pub fn lower(&self, i: usize, j: usize) -> &BigInt {
        &self.lower[i * self.rank() + j]
    }

    pub fn lower_entries(&self) -> &[BigInt] {
        &self.lower
    }

    /// Entry of the full `2n x n` matrix; rows `n..2n` are the lower block.
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        let n = self.rank();
        if i < n {
            self.upper.get(i, j)
        } else {
            self.lower(i - n, j)
        }
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        let n = self.rank();
        (0..2 * n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    pub fn mutate(&self, k: usize) -> Result<Self, MatrixError> {
        self.upper.check_index(k)?;
        Ok(self.mutate_unchecked(k))
    }

    pub(crate) fn mutate_unchecked(&self, k: usize) -> Self {
        let n = self.rank();
        let mut all = self.upper.entries.clone();
        all.extend(self.lower.iter().cloned());
        let mut mutated = mutate_block(2 * n, n, &all, k);
        let lower = mutated.split_off(n * n);
        Self {
            upper: ExchangeMatrix::from_trusted(n, mutated, self.upper.symmetrizer.clone()),
            lower,
        }
    }

    pub fn mutate_word(&self, word: &[usize]) -> Result<Self, MatrixError> {
        word.iter().try_fold(self.clone(), |m, &k| m.mutate(k))
    }
}

impl fmt::Debug for ExtendedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtendedMatrix{:?}", self.rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> ExchangeMatrix {
        ExchangeMatrix::from_rows(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Smallest positive diagonal with entries <= 10 found by exhaustive search.
    fn brute_symmetrizer(b: &ExchangeMatrix) -> Option<Vec<BigInt>> {
        let n = b.rank();
        let mut d = vec![1i64; n];
        loop {
            let ok = (0..n).all(|i| {
                (0..n).all(|j| BigInt::from(d[i]) * b.get(i, j) == -(BigInt::from(d[j]) * b.get(j, i)))
            });
            if ok {
                return Some(ints(&d));
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    return None;
                }
                d[pos] += 1;
                if d[pos] <= 10 {
                    break;
                }
                d[pos] = 1;
                pos += 1;
            }
        }
    }

    #[test]
    fn b21_symmetrizer() {
        let b = ExchangeMatrix::rank2(2, 1).unwrap();
        assert_eq!(b.symmetrizer(), ints(&[2, 1]).as_slice());
        assert_eq!(brute_symmetrizer(&b).unwrap(), ints(&[2, 1]));
    }

    #[test]
    fn skew_symmetric_gets_identity() {
        let b = m(&[vec![0, 1, -1], vec![-1, 0, 2], vec![1, -2, 0]]);
        assert_eq!(b.symmetrizer(), ints(&[1, 1, 1]).as_slice());
    }

    #[test]
    fn symmetrizer_matches_brute_force_on_small_examples() {
        let cases = vec![
            vec![vec![0, 1, 0], vec![-2, 0, 1], vec![0, -3, 0]],
            vec![vec![0, 2, 0], vec![-1, 0, 3], vec![0, -1, 0]],
            vec![vec![0, 4], vec![-1, 0]],
            vec![vec![0, -2, 0], vec![1, 0, 0], vec![0, 0, 0]],
        ];
        for rows in cases {
            let b = m(&rows);
            assert_eq!(Some(b.symmetrizer().to_vec()), brute_symmetrizer(&b), "{rows:?}");
        }
    }

    #[test]
    fn rejections() {
        let e = ExchangeMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap_err();
        assert_eq!(e, MatrixError::NotSkewSymmetrizable(SymmetrizerError::SameSign { i: 0, j: 1 }));
        let e = ExchangeMatrix::from_rows(&[vec![1, 0], vec![0, 0]]).unwrap_err();
        assert!(matches!(e, MatrixError::NotSkewSymmetrizable(SymmetrizerError::NonzeroDiagonal { index: 0 })));
        let e = ExchangeMatrix::from_rows(&[vec![0, 1], vec![0, 0]]).unwrap_err();
        assert!(matches!(e, MatrixError::NotSkewSymmetrizable(SymmetrizerError::OneSidedZero { .. })));
        // ratios 1/2, 1, 1 around the triangle cannot agree
        let e = ExchangeMatrix::from_rows(&[vec![0, 1, -1], vec![-2, 0, 1], vec![1, -1, 0]]).unwrap_err();
        match e {
            MatrixError::NotSkewSymmetrizable(SymmetrizerError::InconsistentCycle { cycle }) => {
                assert_eq!(cycle.first(), cycle.last());
                assert_eq!(cycle.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ExchangeMatrix::from_rows(&[vec![0, 1]]).is_err());
    }

    #[test]
    fn rank2_mutation_flips_signs() {
        let b = ExchangeMatrix::rank2(2, 1).unwrap();
        assert_eq!(b.mutate(0).unwrap(), ExchangeMatrix::rank2(-2, -1).unwrap());
        assert_eq!(b.mutate(1).unwrap(), ExchangeMatrix::rank2(-2, -1).unwrap());
        assert!(b.mutate(2).is_err());
    }

    /// Second, independent rendering of the mutation rule on plain integers.
    fn mutate_oracle(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
        let pos = |a: i64| a.max(0);
        let mut out = b.to_vec();
        for i in 0..b.len() {
            for j in 0..b[0].len() {
                out[i][j] = if i == k || j == k {
                    -b[i][j]
                } else {
                    b[i][j] + b[i][k] * pos(b[k][j]) + pos(-b[i][k]) * b[k][j]
                };
            }
        }
        out
    }

    #[test]
    fn a3_mutation_at_middle_vertex() {
        let rows = vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]];
        let expected = vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]];
        assert_eq!(mutate_oracle(&rows, 1), expected);
        assert_eq!(m(&rows).mutate(1).unwrap(), m(&expected));
    }

    #[test]
    fn extended_hexagon_first_steps() {
        let b = ExchangeMatrix::rank2(2, 1).unwrap().extended();
        let one = b.mutate(0).unwrap();
        assert_eq!(one, ExtendedMatrix::from_rows(&[vec![0, -1], vec![2, 0], vec![-1, 1], vec![0, 1]]).unwrap());
        let two = one.mutate(1).unwrap();
        assert_eq!(two, ExtendedMatrix::from_rows(&[vec![0, 1], vec![-2, 0], vec![1, -1], vec![2, -1]]).unwrap());
        assert_eq!(two.mutate(1).unwrap(), one);
    }

    #[test]
    fn principal_submatrices() {
        let a3 = m(&[vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]);
        assert_eq!(a3.principal_submatrix(&[0, 1, 2]).unwrap(), a3);
        assert_eq!(a3.principal_submatrix(&[0, 1]).unwrap(), m(&[vec![0, 1], vec![-1, 0]]));
        assert_eq!(a3.principal_submatrix(&[0, 2]).unwrap(), ExchangeMatrix::zero(2));
        assert_eq!(a3.principal_submatrix(&[]).unwrap_err(), MatrixError::EmptyIndexSet);
        assert!(matches!(a3.principal_submatrix(&[3]), Err(MatrixError::IndexOutOfRange { .. })));
        assert_eq!(a3.principal_submatrix(&[1, 1]).unwrap_err(), MatrixError::DuplicateIndex(1));
    }

    #[test]
    fn components_and_weights() {
        let b = m(&[vec![0, 3, 0], vec![-2, 0, 0], vec![0, 0, 0]]);
        assert_eq!(b.components(), vec![vec![0, 1], vec![2]]);
        assert_eq!(b.weight(0, 1), BigInt::from(6));
        assert!(!b.is_connected());
    }
}
