//! Mutation classes: breadth-first exploration, the mutation-finiteness
//! decision, acyclic representatives and type recognition.
//!
//! The search runs over permutation classes. Each class is stored once, by
//! canonical key, and children are produced in the order
//! `(layer, lexicographic word)`, so "first member" and witness words are
//! deterministic and shortest.
//!
//! Cutoff: a pair `(i, j)` with `|b_ij b_ji| > 4` inside a connected
//! component of at least three vertices proves the class infinite. Rank-2
//! components never trigger it, since `B_{b,c}` only ever flips sign.
//!
//! Termination bound: while every weight in the large components is at most
//! 4, each nonzero entry satisfies `|b_ij| = sqrt(w d_j / d_i)` with `w <= 4`
//! and `d_j / d_i <= 4` (adjacent vertices), so `|b_ij| <= 4`. The symmetrizer
//! never changes, hence the class has at most `9^(n^2)` members and the
//! search ends. The node budget only guards against that bound being
//! astronomically large.
//!
//! Literal class size: with `G = {pi : pi . B` mutation equivalent to `B}`,
//! every permutation class `c` meets the literal class in `|G| / |Aut(M_c)|`
//! matrices. `G` is generated by the relabelings met on non-tree BFS edges
//! together with `Aut(B)`, and its order comes from Schreier-Sims.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::canonical::{minimal_orders, order_to_relabel};
use crate::diagram::{classify, classify_underlying, diagram_of, DiagramType};
use crate::io::{bigint_json, matrix_json, word_json};
use crate::matrix::ExchangeMatrix;
use crate::perm::{Perm, PermGroup};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("node budget {budget} exhausted after {visited} permutation classes")]
    BudgetExhausted { budget: usize, visited: usize },
    #[error("node budget must be at least 1")]
    ZeroBudget,
    #[error("matrix has {count} distinct entries of absolute value above 4; at most 123 are supported")]
    TooManyLargeEntries { count: usize },
    #[error("mutation class is infinite (weight {} at ({}, {}) after word {})", .0.weight, .0.pair.0 + 1, .0.pair.1 + 1, crate::io::word_text(&.0.word))]
    Infinite(Witness),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Finite,
    Infinite,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Finite => "Finite",
            Verdict::Infinite => "Infinite",
        }
    }
}

/// A mutation word (0-based) whose endpoint has `|b_ij b_ji| > 4` at `pair`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub word: Vec<usize>,
    pub pair: (usize, usize),
    pub weight: BigInt,
}

impl Witness {
    /// Replays the word from `b` and confirms the weight bound is violated.
    pub fn verify(&self, b: &ExchangeMatrix) -> bool {
        match b.mutate_word(&self.word) {
            Ok(end) => {
                let (i, j) = self.pair;
                i < end.rank() && j < end.rank() && end.weight(i, j) == self.weight && self.weight > BigInt::from(4)
            }
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MutationClassReport {
    pub verdict: Verdict,
    /// Number of distinct matrices in the class (finite classes only).
    pub class_size_raw: Option<u128>,
    /// Number of permutation classes (finite classes only).
    pub class_size_canonical: Option<usize>,
    pub witness: Option<Witness>,
    pub acyclic_representative: Option<(ExchangeMatrix, Vec<usize>)>,
}

impl MutationClassReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.as_str(),
            "class_size_raw": self.class_size_raw.map(|v| v.to_string()),
            "class_size_canonical": self.class_size_canonical,
            "witness": self.witness.as_ref().map(|w| json!({
                "word": word_json(&w.word),
                "pair": [w.pair.0 + 1, w.pair.1 + 1],
                "weight": bigint_json(&w.weight),
            })),
            "acyclic_representative": self.acyclic_representative.as_ref().map(|(m, w)| json!({
                "matrix": matrix_json(m),
                "word": word_json(w),
            })),
        })
    }
}

/// Compact working copy: entries of absolute value above 4 (which can only
/// sit in rank-2 components once the input passed the cutoff) are replaced
/// by order-preserving stand-ins `5, 6, ..`, keeping signs. Mutation of a
/// rank-2 component only flips signs, so the dynamics, permutation classes
/// and acyclicity are unchanged.
struct Compact {
    entries: Vec<i8>,
    large: Vec<bool>,
}

impl Compact {
    fn new(b: &ExchangeMatrix) -> Result<Self, ClassError> {
        let n = b.rank();
        let mut big: Vec<BigInt> = b
            .entries()
            .iter()
            .map(|v| v.abs())
            .filter(|v| *v > BigInt::from(4))
            .collect();
        big.sort();
        big.dedup();
        if big.len() > 123 {
            return Err(ClassError::TooManyLargeEntries { count: big.len() });
        }
        let entries = b
            .entries()
            .iter()
            .map(|v| {
                let abs = v.abs();
                let small = match abs.to_i8() {
                    Some(a) if a <= 4 => a,
                    _ => 5 + big.binary_search(&abs).expect("collected") as i8,
                };
                if v.is_negative() {
                    -small
                } else {
                    small
                }
            })
            .collect();
        let mut large = vec![false; n];
        for comp in b.components() {
            if comp.len() >= 3 {
                for v in comp {
                    large[v] = true;
                }
            }
        }
        Ok(Self { entries, large })
    }
}

fn mutate_compact(n: usize, a: &[i8], k: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(a.len());
    for i in 0..n {
        let bik = a[i * n + k] as i32;
        for j in 0..n {
            let bij = a[i * n + j] as i32;
            if i == k || j == k {
                out.push(-bij as i8);
                continue;
            }
            let bkj = a[k * n + j] as i32;
            let v = if bik > 0 && bkj > 0 {
                bij + bik * bkj
            } else if bik < 0 && bkj < 0 {
                bij - bik * bkj
            } else {
                bij
            };
            // parents have |entries| <= 4 in large components: |v| <= 20
            out.push(v as i8);
        }
    }
    out
}

/// First pair `i < j` inside a large component with `|b_ij b_ji| > 4`.
fn violation(n: usize, a: &[i8], large: &[bool]) -> Option<(usize, usize)> {
    for i in 0..n {
        if !large[i] {
            continue;
        }
        for j in (i + 1)..n {
            let w = (a[i * n + j] as i32 * a[j * n + i] as i32).abs();
            if w > 4 {
                return Some((i, j));
            }
        }
    }
    None
}

fn compact_acyclic(n: usize, a: &[i8]) -> bool {
    let mut indegree = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if a[i * n + j] > 0 {
                indegree[i] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut removed = 0;
    while let Some(j) = queue.pop_front() {
        removed += 1;
        for i in 0..n {
            if a[i * n + j] > 0 {
                indegree[i] -= 1;
                if indegree[i] == 0 {
                    queue.push_back(i);
                }
            }
        }
    }
    removed == n
}

struct Labeled {
    key: Box<[i8]>,
    relabel: Perm,
    automorphisms: usize,
}

fn label(n: usize, a: &[i8]) -> Labeled {
    let (key, leaves) = minimal_orders(n, a);
    Labeled {
        key: key.into_boxed_slice(),
        relabel: order_to_relabel(&leaves[0]),
        automorphisms: leaves.len(),
    }
}

/// One permutation class as first reached by the search.
pub struct ClassVisit<'a> {
    pub index: usize,
    pub word: &'a [usize],
    entries: &'a [i8],
    n: usize,
}

impl ClassVisit<'_> {
    pub fn is_acyclic(&self) -> bool {
        compact_acyclic(self.n, self.entries)
    }
}

enum Outcome {
    Complete { classes: usize, raw: u128 },
    Stopped,
    Infinite(Witness),
}

struct FrontierNode {
    entries: Vec<i8>,
    word: Vec<usize>,
}

struct Child {
    entries: Vec<i8>,
    violation: Option<(usize, usize)>,
    label: Option<Labeled>,
}

fn search(
    b: &ExchangeMatrix,
    budget: usize,
    mut visit: impl FnMut(&ClassVisit) -> ControlFlow<()>,
) -> Result<Outcome, ClassError> {
    if budget == 0 {
        return Err(ClassError::ZeroBudget);
    }
    let n = b.rank();
    let witness_at = |word: Vec<usize>, pair: (usize, usize)| {
        let end = b.mutate_word(&word).expect("valid word");
        Witness {
            weight: end.weight(pair.0, pair.1),
            word,
            pair,
        }
    };
    let compact = Compact::new(b)?;
    let large = &compact.large;
    if let Some(pair) = violation(n, &compact.entries, large) {
        return Ok(Outcome::Infinite(witness_at(Vec::new(), pair)));
    }

    let (root_key, root_leaves) = minimal_orders(n, &compact.entries);
    let root_relabel = order_to_relabel(&root_leaves[0]);
    let mut group = PermGroup::trivial(n);
    for leaf in &root_leaves[1..] {
        group.add_generator(&order_to_relabel(leaf).inverse().compose(&root_relabel));
    }
    let mut index: HashMap<Box<[i8]>, u32> = HashMap::new();
    let mut relabels: Vec<Perm> = vec![root_relabel];
    let mut aut_orders: Vec<u64> = vec![root_leaves.len() as u64];
    index.insert(root_key.into_boxed_slice(), 0);
    if visit(&ClassVisit { index: 0, word: &[], entries: &compact.entries, n }).is_break() {
        return Ok(Outcome::Stopped);
    }

    let mut frontier = vec![FrontierNode {
        entries: compact.entries.clone(),
        word: Vec::new(),
    }];
    while !frontier.is_empty() {
        let expanded: Vec<Vec<Child>> = frontier
            .par_iter()
            .map(|node| {
                (0..n)
                    .map(|k| {
                        let entries = mutate_compact(n, &node.entries, k);
                        let violation = violation(n, &entries, large);
                        let label = violation.is_none().then(|| label(n, &entries));
                        Child { entries, violation, label }
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (node, children) in frontier.iter().zip(expanded) {
            for (k, child) in children.into_iter().enumerate() {
                let mut word = node.word.clone();
                word.push(k);
                if let Some(pair) = child.violation {
                    return Ok(Outcome::Infinite(witness_at(word, pair)));
                }
                let lab = child.label.expect("labelled when no violation");
                if let Some(&existing) = index.get(&lab.key) {
                    // child = sigma_child^-1 sigma_existing . M_existing
                    let pi = lab.relabel.inverse().compose(&relabels[existing as usize]);
                    if !pi.is_identity() {
                        group.add_generator(&pi);
                    }
                    continue;
                }
                let id = relabels.len();
                if id >= budget {
                    return Err(ClassError::BudgetExhausted { budget, visited: id });
                }
                index.insert(lab.key, id as u32);
                relabels.push(lab.relabel);
                aut_orders.push(lab.automorphisms as u64);
                let view = ClassVisit {
                    index: id,
                    word: &word,
                    entries: &child.entries,
                    n,
                };
                if visit(&view).is_break() {
                    return Ok(Outcome::Stopped);
                }
                next.push(FrontierNode {
                    entries: child.entries,
                    word,
                });
            }
        }
        frontier = next;
    }
    let order = group.order();
    let raw = aut_orders
        .iter()
        .map(|&a| {
            debug_assert_eq!(order % a as u128, 0, "automorphism group not inside G");
            order / a as u128
        })
        .sum();
    Ok(Outcome::Complete {
        classes: relabels.len(),
        raw,
    })
}

/// Decides mutation-finiteness and counts the class when finite.
pub fn explore(b: &ExchangeMatrix, node_budget: usize) -> Result<MutationClassReport, ClassError> {
    let mut acyclic: Option<Vec<usize>> = None;
    let outcome = search(b, node_budget, |v| {
        if acyclic.is_none() && v.is_acyclic() {
            acyclic = Some(v.word.to_vec());
        }
        ControlFlow::Continue(())
    })?;
    Ok(match outcome {
        Outcome::Complete { classes, raw } => MutationClassReport {
            verdict: Verdict::Finite,
            class_size_raw: Some(raw),
            class_size_canonical: Some(classes),
            witness: None,
            acyclic_representative: acyclic.map(|w| (b.mutate_word(&w).expect("valid word"), w)),
        },
        Outcome::Infinite(w) => MutationClassReport {
            verdict: Verdict::Infinite,
            class_size_raw: None,
            class_size_canonical: None,
            witness: Some(w),
            acyclic_representative: None,
        },
        Outcome::Stopped => unreachable!("explore never stops early"),
    })
}

/// The first member, in `(layer, lexicographic word)` order, whose diagram
/// is acyclic, or `None` when the (finite) class has no acyclic member.
/// An infinite class is reported as an error.
///
/// The search stops early only at an acyclic member of rank 2, Dynkin or
/// extended Dynkin shape. Any other acyclic member of a connected matrix
/// means the class is infinite, so the search goes on to find the witness.
pub fn find_acyclic_representative(
    b: &ExchangeMatrix,
    node_budget: usize,
) -> Result<Option<(ExchangeMatrix, Vec<usize>)>, ClassError> {
    let mut found: Option<Vec<usize>> = None;
    let outcome = search(b, node_budget, |v| visit_acyclic(b, v, &mut found))?;
    if let Outcome::Infinite(w) = outcome {
        return Err(ClassError::Infinite(w));
    }
    Ok(found.map(|w| (b.mutate_word(&w).expect("valid word"), w)))
}

fn visit_acyclic(b: &ExchangeMatrix, v: &ClassVisit, found: &mut Option<Vec<usize>>) -> ControlFlow<()> {
    if !v.is_acyclic() {
        return ControlFlow::Continue(());
    }
    if found.is_none() {
        *found = Some(v.word.to_vec());
    }
    let member = b.mutate_word(v.word).expect("valid word");
    if classify_underlying(&diagram_of(&member)).is_classified() {
        *found = Some(v.word.to_vec());
        return ControlFlow::Break(());
    }
    ControlFlow::Continue(())
}

/// First acyclic member and first recognized member of a finite class.
pub(crate) struct Survey {
    pub acyclic: Option<Vec<usize>>,
    pub typed: Option<(DiagramType, Vec<usize>)>,
}

/// One pass combining [`find_acyclic_representative`] and [`classify_type`].
/// Stops at the first recognized acyclic member, in which case `typed` is
/// not final.
pub(crate) fn survey(b: &ExchangeMatrix, node_budget: usize) -> Result<Survey, ClassError> {
    let mut out = Survey { acyclic: None, typed: None };
    let outcome = search(b, node_budget, |v| {
        if visit_acyclic(b, v, &mut out.acyclic).is_break() {
            return ControlFlow::Break(());
        }
        if out.typed.is_none() {
            let member = b.mutate_word(v.word).expect("valid word");
            let t = classify(&diagram_of(&member));
            if t.is_classified() {
                out.typed = Some((t, v.word.to_vec()));
            }
        }
        ControlFlow::Continue(())
    })?;
    if let Outcome::Infinite(w) = outcome {
        return Err(ClassError::Infinite(w));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TypeReport {
    pub diagram_type: DiagramType,
    pub verdict: Verdict,
    /// Word reaching the first recognized member.
    pub word: Option<Vec<usize>>,
    pub witness: Option<Witness>,
}

impl TypeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "type": self.diagram_type.to_string(),
            "verdict": self.verdict.as_str(),
            "word": self.word.as_deref().map(word_json),
            "witness": self.witness.as_ref().map(|w| json!({
                "word": word_json(&w.word),
                "pair": [w.pair.0 + 1, w.pair.1 + 1],
                "weight": bigint_json(&w.weight),
            })),
        })
    }
}

/// Type of the class: the first member recognized by the Dynkin, extended
/// Dynkin or exceptional tables, plus the finiteness verdict. A finite class
/// with no recognized member is `Unclassified`.
pub fn classify_type(b: &ExchangeMatrix, node_budget: usize) -> Result<TypeReport, ClassError> {
    let mut found: Option<(DiagramType, Vec<usize>)> = None;
    let outcome = search(b, node_budget, |v| {
        if found.is_none() {
            let member = b.mutate_word(v.word).expect("valid word");
            let t = classify(&diagram_of(&member));
            if t.is_classified() {
                found = Some((t, v.word.to_vec()));
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(match outcome {
        Outcome::Infinite(w) => TypeReport {
            diagram_type: DiagramType::Unclassified,
            verdict: Verdict::Infinite,
            word: None,
            witness: Some(w),
        },
        _ => {
            let (diagram_type, word) = match found {
                Some((t, w)) => (t, Some(w)),
                None => (DiagramType::Unclassified, None),
            };
            TypeReport {
                diagram_type,
                verdict: Verdict::Finite,
                word,
                witness: None,
            }
        }
    })
}

/// Every permutation class of a finite mutation class, as `(matrix, word)`
/// with the matrix reached literally by the word. Errors on infinite classes.
pub fn class_members(b: &ExchangeMatrix, node_budget: usize) -> Result<Vec<(ExchangeMatrix, Vec<usize>)>, ClassError> {
    let mut words = Vec::new();
    let outcome = search(b, node_budget, |v| {
        words.push(v.word.to_vec());
        ControlFlow::Continue(())
    })?;
    if let Outcome::Infinite(w) = outcome {
        return Err(ClassError::Infinite(w));
    }
    Ok(words
        .into_iter()
        .map(|w| (b.mutate_word(&w).expect("valid word"), w))
        .collect())
}
