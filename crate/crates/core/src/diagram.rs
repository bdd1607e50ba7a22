//! Weighted diagrams `Gamma(B)` and recognition of Dynkin, extended Dynkin
//! and exceptional types.
//!
//! `Gamma(B)` has an arc `j -> i` of weight `|b_ij b_ji|` exactly when
//! `b_ij > 0`. Underlying-graph recognition compares against generated
//! templates of each family through the same canonical labeling used for
//! mutation classes; exceptional recognition compares the directed weighted
//! graph against the stored fixtures.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::canonical::minimal_orders;
use crate::matrix::ExchangeMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("vertex {} out of range for {n} vertices", .vertex + 1)]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {}", .0 + 1)]
    Loop(usize),
    #[error("more than one arc between vertices {} and {}", .0 + 1, .1 + 1)]
    ParallelArcs(usize, usize),
    #[error("arc {} -> {} has non-positive weight", .0 + 1, .1 + 1)]
    NonPositiveWeight(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arc {
    pub source: usize,
    pub target: usize,
    pub weight: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    n: usize,
    arcs: Vec<Arc>,
}

pub fn diagram_of(b: &ExchangeMatrix) -> Diagram {
    let n = b.rank();
    let mut arcs = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if b.get(i, j).is_positive() {
                arcs.push(Arc {
                    source: j,
                    target: i,
                    weight: b.weight(i, j),
                });
            }
        }
    }
    Diagram { n, arcs }
}

impl Diagram {
    pub fn from_arcs(n: usize, mut arcs: Vec<Arc>) -> Result<Self, DiagramError> {
        let mut seen = vec![false; n * n];
        for a in &arcs {
            for v in [a.source, a.target] {
                if v >= n {
                    return Err(DiagramError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a.source == a.target {
                return Err(DiagramError::Loop(a.source));
            }
            if !a.weight.is_positive() {
                return Err(DiagramError::NonPositiveWeight(a.source, a.target));
            }
            let (lo, hi) = (a.source.min(a.target), a.source.max(a.target));
            if std::mem::replace(&mut seen[lo * n + hi], true) {
                return Err(DiagramError::ParallelArcs(lo, hi));
            }
        }
        arcs.sort_by_key(|a| (a.source, a.target));
        Ok(Self { n, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    fn out_neighbours(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for a in &self.arcs {
            out[a.source].push(a.target);
        }
        out
    }

    /// No oriented cycles (Kahn's algorithm).
    pub fn is_acyclic(&self) -> bool {
        let out = self.out_neighbours();
        let mut indegree = vec![0usize; self.n];
        for a in &self.arcs {
            indegree[a.target] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| indegree[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop_front() {
            removed += 1;
            for &w in &out[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        removed == self.n
    }

    /// Connected as an undirected graph. The empty diagram counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for a in &self.arcs {
            adj[a.source].push(a.target);
            adj[a.target].push(a.source);
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// DOT text with 1-based vertex names and weight labels on arcs of weight > 1.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in 0..self.n {
            s.push_str(&format!("  {};\n", v + 1));
        }
        for a in &self.arcs {
            if a.weight == BigInt::from(1) {
                s.push_str(&format!("  {} -> {};\n", a.source + 1, a.target + 1));
            } else {
                s.push_str(&format!("  {} -> {} [label=\"{}\"];\n", a.source + 1, a.target + 1, a.weight));
            }
        }
        s.push_str("}\n");
        s
    }

    /// Arc weights as small integers, `None` if some weight exceeds `cap`.
    fn small_weights(&self, cap: i64) -> Option<Vec<(usize, usize, i64)>> {
        self.arcs
            .iter()
            .map(|a| {
                a.weight
                    .to_i64()
                    .filter(|&w| w <= cap)
                    .map(|w| (a.source, a.target, w))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
            Family::F => "F",
            Family::G => "G",
        };
        f.write_str(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exceptional {
    E6Elliptic,
    E7Elliptic,
    E8Elliptic,
    X6,
    X7,
    F4StarPlus,
    F4StarStar,
    G2StarPlus,
    G2StarStar,
}

impl Exceptional {
    pub const ALL: [Exceptional; 9] = [
        Exceptional::E6Elliptic,
        Exceptional::E7Elliptic,
        Exceptional::E8Elliptic,
        Exceptional::X6,
        Exceptional::X7,
        Exceptional::F4StarPlus,
        Exceptional::F4StarStar,
        Exceptional::G2StarPlus,
        Exceptional::G2StarStar,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Exceptional::E6Elliptic => "E6^(1,1)",
            Exceptional::E7Elliptic => "E7^(1,1)",
            Exceptional::E8Elliptic => "E8^(1,1)",
            Exceptional::X6 => "X6",
            Exceptional::X7 => "X7",
            Exceptional::F4StarPlus => "F4^(*,+)",
            Exceptional::F4StarStar => "F4^(*,*)",
            Exceptional::G2StarPlus => "G2^(*,+)",
            Exceptional::G2StarStar => "G2^(*,*)",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.tag() == tag)
    }

    /// The elliptic types `E_k^(1,1)`, which are skew-symmetric.
    pub fn is_elliptic(self) -> bool {
        matches!(
            self,
            Exceptional::E6Elliptic | Exceptional::E7Elliptic | Exceptional::E8Elliptic
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DiagramType {
    Dynkin { family: Family, n: usize },
    ExtendedDynkin { family: Family, n: usize },
    Exceptional(Exceptional),
    RankTwo { bc: BigInt },
    Unclassified,
}

impl DiagramType {
    pub fn is_classified(&self) -> bool {
        *self != DiagramType::Unclassified
    }
}

impl fmt::Display for DiagramType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramType::Dynkin { family, n } => write!(f, "{family}{n}"),
            DiagramType::ExtendedDynkin { family, n } => write!(f, "{family}{n}^(1)"),
            DiagramType::Exceptional(e) => f.write_str(e.tag()),
            DiagramType::RankTwo { bc } => write!(f, "rank2(bc={bc})"),
            DiagramType::Unclassified => f.write_str("unclassified"),
        }
    }
}

/// Undirected weighted edge list `(u, v, weight)` on vertices `0..`.
pub type Edges = Vec<(usize, usize, i64)>;

fn path(vertices: usize) -> Edges {
    (1..vertices).map(|i| (i - 1, i, 1)).collect()
}

/// A centre vertex `0` with arms of the given lengths.
fn star(arms: &[usize]) -> Edges {
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in arms {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next, 1));
            prev = next;
            next += 1;
        }
    }
    edges
}

/// Underlying graph of the Dynkin diagram `X_n`, when the family has one of
/// rank `n`. `C_n` shares the diagram of `B_n` and is reported as `B_n`.
pub fn dynkin_edges(family: Family, n: usize) -> Option<Edges> {
    match family {
        Family::A if n >= 1 => Some(path(n)),
        Family::B if n >= 2 => {
            let mut e = path(n);
            e[0].2 = 2;
            Some(e)
        }
        Family::D if n >= 4 => {
            let mut e = path(n - 1);
            e.push((n - 3, n - 1, 1));
            Some(e)
        }
        Family::E => match n {
            6 => Some(star(&[1, 2, 2])),
            7 => Some(star(&[1, 2, 3])),
            8 => Some(star(&[1, 2, 4])),
            _ => None,
        },
        Family::F if n == 4 => {
            let mut e = path(4);
            e[1].2 = 2;
            Some(e)
        }
        Family::G if n == 2 => Some(vec![(0, 1, 3)]),
        _ => None,
    }
}

/// Underlying graph of the extended Dynkin diagram `X_n^(1)` (on `n + 1` vertices).
pub fn extended_dynkin_edges(family: Family, n: usize) -> Option<Edges> {
    match family {
        Family::A if n == 1 => Some(vec![(0, 1, 4)]),
        Family::A if n >= 2 => {
            let mut e = path(n + 1);
            e.push((n, 0, 1));
            Some(e)
        }
        Family::B if n >= 3 => {
            let mut e = path(n - 1);
            e[0].2 = 2;
            e.push((n - 2, n - 1, 1));
            e.push((n - 2, n, 1));
            Some(e)
        }
        Family::C if n >= 2 => {
            let mut e = path(n + 1);
            e[0].2 = 2;
            e[n - 1].2 = 2;
            Some(e)
        }
        Family::D if n >= 4 => {
            // spine q_0..q_{n-4} with two leaves at each end
            let spine = n - 3;
            let mut e = path(spine);
            e.push((0, spine, 1));
            e.push((0, spine + 1, 1));
            e.push((spine - 1, spine + 2, 1));
            e.push((spine - 1, spine + 3, 1));
            Some(e)
        }
        Family::E => match n {
            6 => Some(star(&[2, 2, 2])),
            7 => Some(star(&[1, 3, 3])),
            8 => Some(star(&[1, 2, 5])),
            _ => None,
        },
        Family::F if n == 4 => {
            let mut e = path(5);
            e[1].2 = 2;
            Some(e)
        }
        Family::G if n == 2 => {
            let mut e = path(3);
            e[0].2 = 3;
            Some(e)
        }
        _ => None,
    }
}

/// Every Dynkin and extended Dynkin label whose graph has `vertices` vertices.
fn candidates(vertices: usize) -> Vec<(DiagramType, Edges)> {
    let families = [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F, Family::G];
    let mut out = Vec::new();
    for family in families {
        if let Some(e) = dynkin_edges(family, vertices) {
            out.push((DiagramType::Dynkin { family, n: vertices }, e));
        }
        if vertices >= 2 {
            if let Some(e) = extended_dynkin_edges(family, vertices - 1) {
                out.push((DiagramType::ExtendedDynkin { family, n: vertices - 1 }, e));
            }
        }
    }
    out
}

fn undirected_key(n: usize, edges: &[(usize, usize, i64)]) -> Vec<i64> {
    let mut a = vec![0i64; n * n];
    for &(u, v, w) in edges {
        a[u * n + v] = w;
        a[v * n + u] = w;
    }
    minimal_orders(n, &a).0
}

fn directed_key(n: usize, arcs: &[(usize, usize, i64)]) -> Vec<i64> {
    let mut a = vec![0i64; n * n];
    for &(s, t, w) in arcs {
        a[s * n + t] = w;
    }
    minimal_orders(n, &a).0
}

/// Recognizes the underlying weighted graph as one of the Dynkin or extended
/// Dynkin graphs. An oriented cycle on the `A_n^(1)` graph is excluded.
pub fn classify_underlying(g: &Diagram) -> DiagramType {
    let n = g.n();
    if n == 0 || !g.is_connected() {
        return DiagramType::Unclassified;
    }
    if n == 1 {
        return DiagramType::Dynkin { family: Family::A, n: 1 };
    }
    if n == 2 {
        let w = &g.arcs()[0].weight;
        return match w.to_i64() {
            Some(1) => DiagramType::Dynkin { family: Family::A, n: 2 },
            Some(2) => DiagramType::Dynkin { family: Family::B, n: 2 },
            Some(3) => DiagramType::Dynkin { family: Family::G, n: 2 },
            Some(4) => DiagramType::ExtendedDynkin { family: Family::A, n: 1 },
            _ => DiagramType::RankTwo { bc: w.clone() },
        };
    }
    let Some(arcs) = g.small_weights(4) else {
        return DiagramType::Unclassified;
    };
    // trees and the single cycle A_n^(1) only
    if arcs.len() != n - 1 && arcs.len() != n {
        return DiagramType::Unclassified;
    }
    let key = undirected_key(n, &arcs);
    for (label, edges) in candidates(n) {
        if edges.len() == arcs.len() && undirected_key(n, &edges) == key {
            if let DiagramType::ExtendedDynkin { family: Family::A, .. } = label {
                if !g.is_acyclic() {
                    return DiagramType::Unclassified;
                }
            }
            return label;
        }
    }
    DiagramType::Unclassified
}

#[derive(Deserialize)]
struct FixtureFile {
    version: u32,
    fixtures: Vec<FixtureEntry>,
}

#[derive(Deserialize)]
struct FixtureEntry {
    tag: String,
    n: usize,
    vertices: Vec<String>,
    symmetrizer: Vec<i64>,
    b: Vec<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct ExceptionalFixture {
    pub tag: Exceptional,
    /// Vertex names as drawn (`l`, `u`, `d`, `r` for left/up/down/right).
    pub vertices: Vec<String>,
    pub matrix: ExchangeMatrix,
    key: Vec<i64>,
}

const FIXTURE_JSON: &str = include_str!("../fixtures/exceptional.json");

/// The nine stored exceptional representatives, parsed and checked once.
pub fn exceptional_fixtures() -> &'static [ExceptionalFixture] {
    static CELL: OnceLock<Vec<ExceptionalFixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        let file: FixtureFile = serde_json::from_str(FIXTURE_JSON).expect("fixture file parses");
        assert_eq!(file.version, 1, "unsupported fixture file version");
        file.fixtures
            .into_iter()
            .map(|f| {
                let tag = Exceptional::from_tag(&f.tag).expect("known tag");
                let matrix = ExchangeMatrix::from_rows(&f.b).expect("fixture is skew-symmetrizable");
                assert_eq!(matrix.rank(), f.n);
                assert_eq!(f.vertices.len(), f.n);
                let d: Vec<BigInt> = f.symmetrizer.iter().map(|&v| BigInt::from(v)).collect();
                assert_eq!(matrix.symmetrizer(), d.as_slice(), "{} symmetrizer", f.tag);
                let arcs = diagram_of(&matrix).small_weights(4).expect("weights at most 4");
                let key = directed_key(f.n, &arcs);
                ExceptionalFixture {
                    tag,
                    vertices: f.vertices,
                    matrix,
                    key,
                }
            })
            .collect()
    })
}

pub fn exceptional_fixture(tag: Exceptional) -> &'static ExceptionalFixture {
    exceptional_fixtures()
        .iter()
        .find(|f| f.tag == tag)
        .expect("every tag has a fixture")
}

/// Orientation- and weight-sensitive isomorphism test against the nine fixtures.
pub fn match_exceptional(g: &Diagram) -> DiagramType {
    let n = g.n();
    if !(4..=10).contains(&n) {
        return DiagramType::Unclassified;
    }
    let Some(arcs) = g.small_weights(4) else {
        return DiagramType::Unclassified;
    };
    let mut key = None;
    for f in exceptional_fixtures().iter().filter(|f| f.matrix.rank() == n) {
        let k = key.get_or_insert_with(|| directed_key(n, &arcs));
        if *k == f.key {
            return DiagramType::Exceptional(f.tag);
        }
    }
    DiagramType::Unclassified
}

/// `classify_underlying`, falling back to `match_exceptional`.
pub fn classify(g: &Diagram) -> DiagramType {
    match classify_underlying(g) {
        DiagramType::Unclassified => match_exceptional(g),
        t => t,
    }
}

/// Skew-symmetrizable matrix realizing a tree or cycle edge list with the
/// given orientation: `orient[e]` true means edge `(u, v)` becomes `u -> v`.
///
/// Weight-1 and weight-4 edges join vertices of equal symmetrizer (entries
/// `1` and `2`); weight-2 and weight-3 edges change it by that factor, giving
/// entries `1` and `w`. The result has the smallest entries realizing each weight.
pub fn realize(vertices: usize, edges: &[(usize, usize, i64)], orient: &[bool]) -> ExchangeMatrix {
    assert_eq!(edges.len(), orient.len());
    let mut d = vec![BigInt::zero(); vertices];
    let mut adj = vec![Vec::new(); vertices];
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    for root in 0..vertices {
        if !d[root].is_zero() {
            continue;
        }
        d[root] = BigInt::from(1);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(v, w) in &adj[u] {
                if d[v].is_zero() {
                    d[v] = if w == 2 || w == 3 { &d[u] * w } else { d[u].clone() };
                    stack.push(v);
                }
            }
        }
    }
    let mut b = vec![BigInt::zero(); vertices * vertices];
    for (&(u, v, w), &forward) in edges.iter().zip(orient) {
        let (s, t) = if forward { (u, v) } else { (v, u) };
        // b_ts > 0, b_ts * b_st = -w, d_t b_ts = -d_s b_st
        let (bts, bst) = match w {
            4 => (BigInt::from(2), BigInt::from(-2)),
            1 => (BigInt::from(1), BigInt::from(-1)),
            _ if d[s] > d[t] => (BigInt::from(w), BigInt::from(-1)),
            _ => (BigInt::from(1), BigInt::from(-w)),
        };
        b[t * vertices + s] = bts;
        b[s * vertices + t] = bst;
    }
    ExchangeMatrix::new(vertices, b).expect("realization is skew-symmetrizable")
}
