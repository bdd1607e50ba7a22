//! The simplicial g-vector fan: assembly, validation and point location.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::gvector::{g_vector_by_grading, g_vectors_by_recursion, GVector, GradingError};
use crate::io::{bigint_json, word_json};
use crate::matrix::{ExchangeMatrix, MatrixError};
use crate::seed::{enumerate_seeds, SeedError};

/// Pairwise face checks are exhaustive up to this many pairs in dimension
/// at most 3; beyond that (and for `n >= 4` with more than
/// `SAMPLED_PAIRS` pairs) a fixed-seed sample of pairs is checked.
const EXHAUSTIVE_PAIR_LIMIT: usize = 250_000;
const SAMPLED_PAIRS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error("seed enumeration failed: {0}")]
    Seed(SeedError),
    #[error("seed budget {budget} exhausted at depth {depth}")]
    BudgetExhausted { budget: usize, depth: usize },
    #[error("invalid fan: {0}")]
    Invalid(String),
}

impl From<SeedError> for FanError {
    fn from(e: SeedError) -> Self {
        match e {
            SeedError::BudgetExhausted { budget, depth } => FanError::BudgetExhausted { budget, depth },
            other => FanError::Seed(other),
        }
    }
}

/// How g-vectors are obtained while walking the exchange graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FanRoute {
    /// Compute cluster variables exactly and read off their degrees.
    #[default]
    Grading,
    /// Skip the Laurent arithmetic and carry `e_i` back along the mutation
    /// word with the transition rule. Usable far deeper than grading.
    Recursion,
}

impl FanRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            FanRoute::Grading => "grading",
            FanRoute::Recursion => "recursion",
        }
    }
}

impl FromStr for FanRoute {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "grading" => Ok(FanRoute::Grading),
            "recursion" => Ok(FanRoute::Recursion),
            other => Err(format!("unknown route `{other}`, expected grading or recursion")),
        }
    }
}

/// One cluster seen by the walk: its g-vectors, the word reaching it and its BFS layer.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub g_vectors: Vec<GVector>,
    pub word: Vec<usize>,
    pub layer: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GFan {
    dim: usize,
    rays: Vec<GVector>,
    cones: Vec<Vec<usize>>,
    provenance: Vec<Vec<usize>>,
    layers: Vec<usize>,
    closed: bool,
    pairs_checked: usize,
    exhaustive: bool,
}

impl GFan {
    /// Assembles and validates a fan from clusters. Rays are sorted
    /// lexicographically before cones are indexed; `closed` records that the
    /// walk exhausted the exchange graph.
    pub fn from_clusters(dim: usize, clusters: Vec<Cluster>, closed: bool) -> Result<Self, FanError> {
        let ray_set: BTreeSet<GVector> = clusters.iter().flat_map(|c| c.g_vectors.iter().cloned()).collect();
        let rays: Vec<GVector> = ray_set.into_iter().collect();
        let position: HashMap<&GVector, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut cones = Vec::with_capacity(clusters.len());
        let mut provenance = Vec::with_capacity(clusters.len());
        let mut layers = Vec::with_capacity(clusters.len());
        let mut seen = HashSet::new();
        for c in &clusters {
            if c.g_vectors.len() != dim || c.g_vectors.iter().any(|g| g.len() != dim) {
                return Err(FanError::Invalid(format!("cluster {} has the wrong shape", crate::io::word_text(&c.word))));
            }
            let mut cone: Vec<usize> = c.g_vectors.iter().map(|g| position[g]).collect();
            cone.sort_unstable();
            if !seen.insert(cone.clone()) {
                return Err(FanError::Invalid(format!("cone of {} repeats", crate::io::word_text(&c.word))));
            }
            cones.push(cone);
            provenance.push(c.word.clone());
            layers.push(c.layer);
        }
        let mut fan = GFan {
            dim,
            rays,
            cones,
            provenance,
            layers,
            closed,
            pairs_checked: 0,
            exhaustive: false,
        };
        fan.validate()?;
        Ok(fan)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[GVector] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    /// Mutation word (0-based) of the seed whose cluster spans each cone.
    pub fn provenance(&self) -> &[Vec<usize>] {
        &self.provenance
    }

    /// BFS layer of each cone.
    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    /// Earliest layer at which each ray appears.
    pub fn ray_layers(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.rays.len()];
        for (cone, &layer) in self.cones.iter().zip(&self.layers) {
            for &r in cone {
                out[r] = out[r].min(layer);
            }
        }
        out
    }

    /// The walk reached every seed, so no cone is missing.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Cone pairs that went through the face test, and whether that was all of them.
    pub fn validation(&self) -> (usize, bool) {
        (self.pairs_checked, self.exhaustive)
    }

    pub fn nonprimitive_rays(&self) -> Vec<usize> {
        self.rays
            .iter()
            .enumerate()
            .filter(|(_, r)| r.iter().fold(BigInt::zero(), |g, x| g.gcd(x)) != BigInt::one())
            .map(|(i, _)| i)
            .collect()
    }

    /// Cones as sets of ray vectors, independent of ray numbering.
    pub fn cone_vectors(&self) -> BTreeSet<Vec<GVector>> {
        self.cones
            .iter()
            .map(|c| {
                let mut v: Vec<GVector> = c.iter().map(|&i| self.rays[i].clone()).collect();
                v.sort();
                v
            })
            .collect()
    }

    fn validate(&mut self) -> Result<(), FanError> {
        for (idx, cone) in self.cones.iter().enumerate() {
            let m: Vec<GVector> = cone.iter().map(|&i| self.rays[i].clone()).collect();
            if determinant(&m).is_zero() {
                return Err(FanError::Invalid(format!(
                    "cone {idx} from {} has dependent rays",
                    crate::io::word_text(&self.provenance[idx])
                )));
            }
        }
        let c = self.cones.len();
        let total = c * c.saturating_sub(1) / 2;
        let pairs: Vec<(usize, usize)> = if total <= SAMPLED_PAIRS || (self.dim <= 3 && total <= EXHAUSTIVE_PAIR_LIMIT) {
            self.exhaustive = true;
            (0..c).flat_map(|a| (a + 1..c).map(move |b| (a, b))).collect()
        } else {
            self.exhaustive = false;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..SAMPLED_PAIRS.min(total))
                .map(|_| loop {
                    let a = rng.random_range(0..c);
                    let b = rng.random_range(0..c);
                    if a != b {
                        break (a.min(b), a.max(b));
                    }
                })
                .collect()
        };
        self.pairs_checked = pairs.len();
        let bad = pairs.par_iter().find_first(|&&(a, b)| !self.meet_in_common_face(a, b));
        if let Some(&(a, b)) = bad {
            return Err(FanError::Invalid(format!(
                "cones {a} and {b} overlap beyond a common face ({} and {})",
                crate::io::word_text(&self.provenance[a]),
                crate::io::word_text(&self.provenance[b])
            )));
        }
        Ok(())
    }

    /// Simplicial cones meet in the face spanned by their shared rays iff a
    /// hyperplane vanishes on the shared rays and strictly separates the rest.
    fn meet_in_common_face(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.cones[a], &self.cones[b]);
        let common: Vec<&GVector> = ca.iter().filter(|i| cb.contains(i)).map(|&i| &self.rays[i]).collect();
        let a_only: Vec<&GVector> = ca.iter().filter(|i| !cb.contains(i)).map(|&i| &self.rays[i]).collect();
        let b_only: Vec<&GVector> = cb.iter().filter(|i| !ca.contains(i)).map(|&i| &self.rays[i]).collect();
        let basis = nullspace(&common, self.dim);
        if basis.is_empty() {
            return a_only.is_empty() && b_only.is_empty();
        }
        let dot = |u: &GVector, v: &GVector| u.iter().zip(v).map(|(x, y)| x * y).sum::<BigInt>();
        let mut rows: Vec<(Vec<BigInt>, BigInt)> = Vec::new();
        for r in &a_only {
            rows.push((basis.iter().map(|h| dot(h, r)).collect(), BigInt::one()));
        }
        for r in &b_only {
            rows.push((basis.iter().map(|h| -dot(h, r)).collect(), BigInt::one()));
        }
        fourier_motzkin_feasible(rows, basis.len())
    }

    /// Every facet of every maximal cone is shared by exactly two cones.
    pub fn is_complete(&self) -> bool {
        let mut facets: HashMap<Vec<usize>, u32> = HashMap::new();
        for cone in &self.cones {
            for skip in 0..cone.len() {
                let facet: Vec<usize> = cone.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                *facets.entry(facet).or_default() += 1;
            }
        }
        !facets.is_empty() && facets.values().all(|&c| c == 2)
    }

    /// A maximal cone containing the rational point `p`, lowest index first.
    pub fn cone_membership(&self, p: &[BigRational]) -> Option<usize> {
        let lcm = p.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let scaled: Vec<BigInt> = p.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
        ConeIndex::new(self).locate(&scaled)
    }

    pub fn to_json(&self) -> Value {
        let mut provenance = Map::new();
        for (i, w) in self.provenance.iter().enumerate() {
            provenance.insert(i.to_string(), word_json(w));
        }
        json!({
            "dim": self.dim,
            "rays": self.rays.iter().map(|r| r.iter().map(bigint_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "cones": self.cones,
            "provenance": provenance,
            "layers": self.layers,
            "closed": self.closed,
            "complete": self.is_complete(),
            "nonprimitive_rays": self.nonprimitive_rays(),
            "validation": {"pairs_checked": self.pairs_checked, "exhaustive": self.exhaustive},
        })
    }

    /// Rank-2 picture: each ray as a chord from the centre to the unit circle.
    pub fn to_svg(&self) -> Option<String> {
        if self.dim != 2 {
            return None;
        }
        let mut s = String::new();
        s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" width=\"440\" height=\"440\">\n");
        s.push_str("  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.005\"/>\n");
        for r in &self.rays {
            let (x, y) = (to_f64(&r[0]), to_f64(&r[1]));
            let len = x.hypot(y);
            let _ = writeln!(
                s,
                "  <line x1=\"0\" y1=\"0\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"black\" stroke-width=\"0.01\"><title>({}, {})</title></line>",
                x / len,
                -y / len,
                r[0],
                r[1]
            );
        }
        s.push_str("</svg>\n");
        Some(s)
    }
}

pub(crate) fn to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() { f64::MIN } else { f64::MAX })
}

/// Walks the exchange graph of `b` breadth-first to `depth` layers (or until
/// it closes) and assembles the g-vector fan relative to `b`.
pub fn build_fan(b: &ExchangeMatrix, depth: Option<usize>, budget: usize, route: FanRoute) -> Result<GFan, FanError> {
    let (clusters, closed) = match route {
        FanRoute::Grading => {
            let seeds = enumerate_seeds(b, depth, budget)?;
            let clusters = seeds
                .seeds
                .par_iter()
                .zip(seeds.layers.par_iter())
                .map(|(s, &layer)| {
                    let g_vectors = s
                        .variables()
                        .iter()
                        .map(|v| g_vector_by_grading(v, b))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Cluster {
                        g_vectors,
                        word: s.history().to_vec(),
                        layer,
                    })
                })
                .collect::<Result<Vec<_>, FanError>>()?;
            (clusters, seeds.complete)
        }
        FanRoute::Recursion => walk_by_recursion(b, depth, budget)?,
    };
    GFan::from_clusters(b.rank(), clusters, closed)
}

fn walk_by_recursion(b: &ExchangeMatrix, depth: Option<usize>, budget: usize) -> Result<(Vec<Cluster>, bool), FanError> {
    let n = b.rank();
    let key = |gs: &[GVector]| {
        let mut k = gs.to_vec();
        k.sort();
        k
    };
    let root = Cluster {
        g_vectors: g_vectors_by_recursion(b, &[])?,
        word: Vec::new(),
        layer: 0,
    };
    let mut seen: HashSet<Vec<GVector>> = HashSet::new();
    seen.insert(key(&root.g_vectors));
    let mut clusters = vec![root];
    if budget == 0 {
        return Err(FanError::BudgetExhausted { budget, depth: 0 });
    }
    let mut frontier = vec![0usize];
    let mut layer = 0;
    while !frontier.is_empty() {
        if depth.is_some_and(|d| layer >= d) {
            return Ok((clusters, false));
        }
        let jobs: Vec<Vec<usize>> = frontier
            .iter()
            .flat_map(|&c| {
                let word = clusters[c].word.clone();
                let back = word.last().copied();
                (0..n).filter(move |&k| Some(k) != back).map(move |k| {
                    let mut w = word.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
        let computed: Vec<Vec<GVector>> = jobs
            .par_iter()
            .map(|w| g_vectors_by_recursion(b, w))
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for (word, g_vectors) in jobs.into_iter().zip(computed) {
            if seen.insert(key(&g_vectors)) {
                if clusters.len() >= budget {
                    return Err(FanError::BudgetExhausted { budget, depth: layer + 1 });
                }
                clusters.push(Cluster {
                    g_vectors,
                    word,
                    layer: layer + 1,
                });
                next.push(clusters.len() - 1);
            }
        }
        frontier = next;
        layer += 1;
    }
    Ok((clusters, true))
}

/// Counts `(checked, mismatches)` between grading and recursion g-vectors
/// over every variable of every seed within `depth` layers.
pub fn grading_recursion_mismatches(b: &ExchangeMatrix, depth: Option<usize>, budget: usize) -> Result<(usize, usize), FanError> {
    let seeds = enumerate_seeds(b, depth, budget)?;
    let results: Vec<(usize, usize)> = seeds
        .seeds
        .par_iter()
        .map(|s| {
            let by_recursion = g_vectors_by_recursion(b, s.history())?;
            let mut mismatches = 0;
            for (v, g) in s.variables().iter().zip(&by_recursion) {
                if g_vector_by_grading(v, b)? != *g {
                    mismatches += 1;
                }
            }
            Ok((by_recursion.len(), mismatches))
        })
        .collect::<Result<_, FanError>>()?;
    Ok(results.into_iter().fold((0, 0), |(a, b), (c, d)| (a + c, b + d)))
}

/// Point location in a fan. Each cone stores the rows of `sign(det) adj(R)`
/// where `R` has the cone's rays as columns, so `p` lies in the cone iff
/// every row has a non-negative product with `p`.
pub struct ConeIndex {
    cones: Vec<LocatorRows>,
}

struct LocatorRows {
    exact: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i64>>>,
}

impl ConeIndex {
    pub fn new(fan: &GFan) -> Self {
        let cones = fan
            .cones
            .par_iter()
            .map(|cone| {
                let cols: Vec<GVector> = cone.iter().map(|&i| fan.rays[i].clone()).collect();
                let exact = signed_adjugate_rows(&cols);
                let small = exact
                    .iter()
                    .map(|row| row.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
                    .collect::<Option<Vec<_>>>();
                LocatorRows { exact, small }
            })
            .collect();
        Self { cones }
    }

    pub fn locate(&self, p: &[BigInt]) -> Option<usize> {
        self.cones.iter().position(|c| {
            c.exact
                .iter()
                .all(|row| !row.iter().zip(p).map(|(a, x)| a * x).sum::<BigInt>().is_negative())
        })
    }

    /// Same as [`ConeIndex::locate`] with 128-bit arithmetic where it cannot overflow.
    pub fn locate_i64(&self, p: &[i64]) -> Option<usize> {
        self.cones.iter().position(|c| {
            if let Some(small) = &c.small {
                let fast = small.iter().try_fold(true, |ok, row| {
                    let dot = row.iter().zip(p).try_fold(0i128, |acc, (&a, &x)| {
                        acc.checked_add(i128::from(a) * i128::from(x))
                    })?;
                    Some(ok && dot >= 0)
                });
                if let Some(answer) = fast {
                    return answer;
                }
            }
            c.exact.iter().all(|row| {
                !row.iter()
                    .zip(p)
                    .map(|(a, &x)| a * BigInt::from(x))
                    .sum::<BigInt>()
                    .is_negative()
            })
        })
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }
}

/// Rows of `sign(det R) * adj(R)` for the matrix `R` with `cols` as columns.
fn signed_adjugate_rows(cols: &[GVector]) -> Vec<Vec<BigInt>> {
    let n = cols.len();
    let det = determinant(cols);
    // Gauss-Jordan on [R | I]; |det| R^-1 = sign(det) adj(R)
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from_integer(cols[j][i].clone())
                    } else {
                        BigRational::from_integer(BigInt::from(u8::from(j - n == i)))
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("nonsingular cone");
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..2 * n {
                    let delta = &m[col][j] * &f;
                    m[r][j] -= delta;
                }
            }
        }
    }
    let scale = BigRational::from_integer(det.abs());
    (0..n)
        .map(|i| {
            (n..2 * n)
                .map(|j| {
                    let v = &m[i][j] * &scale;
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub(crate) fn determinant(rows: &[GVector]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Integer basis of `{h : h . v = 0 for all v in rows}`.
fn nullspace(rows: &[&GVector], n: usize) -> Vec<GVector> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    let delta = &m[row][j] * &f;
                    m[r][j] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); n];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect()
}

/// Feasibility of `a . z >= b` over the rationals by Fourier-Motzkin elimination.
fn fourier_motzkin_feasible(mut rows: Vec<(Vec<BigInt>, BigInt)>, vars: usize) -> bool {
    let normalize = |(a, b): (Vec<BigInt>, BigInt)| {
        let g = a.iter().fold(b.abs(), |g, x| g.gcd(x));
        if g.is_zero() || g.is_one() {
            (a, b)
        } else {
            (a.iter().map(|x| x / &g).collect(), b / &g)
        }
    };
    for j in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            match r.0[j].sign() {
                num_bigint::Sign::Plus => pos.push(r),
                num_bigint::Sign::Minus => neg.push(r),
                num_bigint::Sign::NoSign => rest.push(r),
            }
        }
        let mut seen: HashSet<(Vec<BigInt>, BigInt)> = rest.iter().cloned().collect();
        for p in &pos {
            for q in &neg {
                let (fp, fq) = (-&q.0[j], p.0[j].clone());
                let a: Vec<BigInt> = p.0.iter().zip(&q.0).map(|(x, y)| x * &fp + y * &fq).collect();
                let combined = normalize((a, &p.1 * &fp + &q.1 * &fq));
                if seen.insert(combined.clone()) {
                    rest.push(combined);
                }
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(xs: &[i64]) -> GVector {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(xs: &[(i64, i64)]) -> Vec<BigRational> {
        xs.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())).collect()
    }

    #[test]
    fn b21_fan() {
        let b = ExchangeMatrix::rank2(2, 1).unwrap();
        let fan = build_fan(&b, None, 100, FanRoute::Grading).unwrap();
        let rays: BTreeSet<GVector> = fan.rays().iter().cloned().collect();
        let want: BTreeSet<GVector> = [[1, 0], [0, 1], [-1, 2], [-1, 1], [-1, 0], [0, -1]].iter().map(|r| g(r)).collect();
        assert_eq!(rays, want);
        assert_eq!(fan.cones().len(), 6);
        assert!(fan.is_complete());
        assert!(fan.is_closed());
        assert_eq!(fan.validation(), (15, true));
        let by_recursion = build_fan(&b, None, 100, FanRoute::Recursion).unwrap();
        assert_eq!(by_recursion.cone_vectors(), fan.cone_vectors());
        let initial = fan.cone_membership(&q(&[(1, 1), (1, 1)])).unwrap();
        assert!(fan.provenance()[initial].is_empty());
        let third = fan.cone_membership(&q(&[(-1, 1), (-1, 1)])).unwrap();
        let spanned: BTreeSet<GVector> = fan.cones()[third].iter().map(|&i| fan.rays()[i].clone()).collect();
        assert_eq!(spanned, [g(&[-1, 0]), g(&[0, -1])].into_iter().collect());
    }

    #[test]
    fn depth_zero_is_one_cone() {
        let b = ExchangeMatrix::rank2(3, 1).unwrap();
        let fan = build_fan(&b, Some(0), 100, FanRoute::Grading).unwrap();
        assert_eq!(fan.rays(), &[g(&[0, 1]), g(&[1, 0])]);
        assert_eq!(fan.cones().len(), 1);
        assert!(!fan.is_complete());
        assert_eq!(fan.cone_membership(&q(&[(-1, 1), (1, 1)])), None);
    }

    #[test]
    fn affine_fan_is_never_complete() {
        let b = ExchangeMatrix::rank2(4, 1).unwrap();
        for depth in [2, 5, 9] {
            let fan = build_fan(&b, Some(depth), 1000, FanRoute::Grading).unwrap();
            assert!(!fan.is_complete());
            assert!(!fan.is_closed());
        }
    }

    #[test]
    fn overlapping_cones_are_rejected() {
        let clusters = vec![
            Cluster { g_vectors: vec![g(&[1, 0]), g(&[0, 1])], word: vec![], layer: 0 },
            Cluster { g_vectors: vec![g(&[1, 1]), g(&[-1, 0])], word: vec![0], layer: 1 },
        ];
        assert!(matches!(GFan::from_clusters(2, clusters, false), Err(FanError::Invalid(_))));
        let flat = vec![Cluster { g_vectors: vec![g(&[1, 2]), g(&[2, 4])], word: vec![], layer: 0 }];
        assert!(matches!(GFan::from_clusters(2, flat, false), Err(FanError::Invalid(_))));
    }

    #[test]
    fn linear_algebra_helpers() {
        assert_eq!(determinant(&[g(&[2, 1, 0]), g(&[1, 3, 1]), g(&[0, 1, 4])]), BigInt::from(18));
        assert_eq!(determinant(&[g(&[0, 1]), g(&[1, 0])]), BigInt::from(-1));
        let ns = nullspace(&[&g(&[1, 1, 0])], 3);
        assert_eq!(ns.len(), 2);
        for h in &ns {
            assert_eq!(&h[0] + &h[1], BigInt::zero());
        }
        assert!(!fourier_motzkin_feasible(vec![(g(&[1]), BigInt::one()), (g(&[-1]), BigInt::one())], 1));
        assert!(fourier_motzkin_feasible(vec![(g(&[1, -1]), BigInt::one()), (g(&[0, 1]), BigInt::one())], 2));
    }

    #[test]
    fn svg_draws_each_ray() {
        let fan = build_fan(&ExchangeMatrix::rank2(2, 1).unwrap(), None, 100, FanRoute::Grading).unwrap();
        let svg = fan.to_svg().unwrap();
        assert_eq!(svg.matches("<line").count(), fan.rays().len());
        assert!(svg.contains("<title>(-1, 2)</title>"));
    }
}
