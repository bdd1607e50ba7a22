//! Seeds with principal coefficients and exchange-graph enumeration.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::io::word_json;
use crate::laurent::{LaurentError, LaurentExpr};
use crate::matrix::{ExchangeMatrix, ExtendedMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("exchange relation is not divisible by the old variable: {0}")]
    Exchange(#[from] LaurentError),
    #[error("exponent {0} in the exchange relation does not fit in 32 bits")]
    ExponentTooLarge(BigInt),
    #[error("seed budget {budget} exhausted at depth {depth}")]
    BudgetExhausted { budget: usize, depth: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Seed {
    variables: Vec<LaurentExpr>,
    matrix: ExtendedMatrix,
    history: Vec<usize>,
}

fn exponent(v: &BigInt) -> Result<u32, SeedError> {
    v.to_u32().ok_or_else(|| SeedError::ExponentTooLarge(v.clone()))
}

impl Seed {
    /// `(x_1..x_n)` with the extended matrix of `b`.
    pub fn initial(b: &ExchangeMatrix) -> Self {
        let n = b.rank();
        Self {
            variables: (0..n).map(|i| LaurentExpr::x(n, i)).collect(),
            matrix: b.extended(),
            history: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn variables(&self) -> &[LaurentExpr] {
        &self.variables
    }

    pub fn matrix(&self) -> &ExtendedMatrix {
        &self.matrix
    }

    /// Mutation word (0-based) from the initial seed.
    pub fn history(&self) -> &[usize] {
        &self.history
    }

    /// Right-hand side of the exchange relation at `k`:
    /// `prod x_i^[c_ik]+ + prod x_i^[-c_ik]+` over all `2n` rows, with
    /// `x_{n+j} = y_j`.
    pub fn exchange_binomial(&self, k: usize) -> Result<LaurentExpr, SeedError> {
        let n = self.rank();
        if k >= n {
            return Err(MatrixError::IndexOutOfRange { index: k, n }.into());
        }
        let mut plus = LaurentExpr::one(n);
        let mut minus = LaurentExpr::one(n);
        let mut y_plus = vec![0i64; 2 * n];
        let mut y_minus = vec![0i64; 2 * n];
        for i in 0..2 * n {
            let c = self.matrix.get(i, k);
            if c.is_zero() {
                continue;
            }
            let e = exponent(&c.abs())?;
            let side = c.is_positive();
            if i < n {
                let factor = self.variables[i].pow(e);
                if side {
                    plus = &plus * &factor;
                } else {
                    minus = &minus * &factor;
                }
            } else if side {
                y_plus[i] += i64::from(e);
            } else {
                y_minus[i] += i64::from(e);
            }
        }
        Ok(&plus.shift(&y_plus) + &minus.shift(&y_minus))
    }

    pub fn mutate(&self, k: usize) -> Result<Self, SeedError> {
        let binomial = self.exchange_binomial(k)?;
        let fresh = binomial.div_exact(&self.variables[k])?;
        let mut variables = self.variables.clone();
        variables[k] = fresh;
        let mut history = self.history.clone();
        history.push(k);
        Ok(Self {
            variables,
            matrix: self.matrix.mutate(k)?,
            history,
        })
    }

    pub fn mutate_word(&self, word: &[usize]) -> Result<Self, SeedError> {
        word.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Every variable has a monomial `x`-denominator and polynomial
    /// dependence on the coefficients.
    pub fn check_laurent(&self) -> bool {
        self.variables.iter().all(check_laurent_expr)
    }

    /// The unordered cluster, used as the seed identity.
    pub fn cluster_key(&self) -> Vec<LaurentExpr> {
        let mut key = self.variables.clone();
        key.sort();
        key
    }

    /// Same variables and matrix; the history is ignored.
    pub fn same_data(&self, other: &Self) -> bool {
        self.variables == other.variables && self.matrix == other.matrix
    }
}

impl std::fmt::Debug for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Seed")
            .field("variables", &self.variables)
            .field("history", &self.history)
            .finish()
    }
}

/// Normal-form check for a single expression: the numerator of the normal
/// form is a polynomial in `x` and `y`.
pub fn check_laurent_expr(v: &LaurentExpr) -> bool {
    let (num, _) = v.normal_form();
    let polynomial = num.terms().all(|(e, _)| e.iter().all(|&p| p >= 0));
    polynomial
}

/// Result of a breadth-first walk over the exchange graph.
#[derive(Debug, Clone)]
pub struct SeedEnumeration {
    /// Distinct seeds in BFS order, each with the first word reaching it.
    pub seeds: Vec<Seed>,
    /// BFS layer of each seed.
    pub layers: Vec<usize>,
    /// Distinct cluster variables in discovery order.
    pub variables: Vec<LaurentExpr>,
    /// Exchange-graph edges `(seed, k, seed)` discovered by the walk.
    pub edges: Vec<(usize, usize, usize)>,
    /// How many mutation paths of the walk arrived at each seed.
    pub path_counts: Vec<u64>,
    /// No unexplored mutation remains: the exchange graph is finite and fully listed.
    pub complete: bool,
}

impl SeedEnumeration {
    pub fn to_json(&self) -> Value {
        json!({
            "seed_count": self.seeds.len(),
            "variable_count": self.variables.len(),
            "complete": self.complete,
            "variables": self.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "seeds": self.seeds.iter().zip(&self.layers).zip(&self.path_counts).map(|((s, layer), paths)| json!({
                "word": word_json(s.history()),
                "layer": layer,
                "paths": paths,
                "cluster": s.variables().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Breadth-first enumeration of seeds from the initial seed of `b`, with
/// seeds identified by their unordered clusters.
///
/// `depth = None` walks until the exchange graph closes; `budget` caps the
/// number of distinct seeds either way.
pub fn enumerate_seeds(b: &ExchangeMatrix, depth: Option<usize>, budget: usize) -> Result<SeedEnumeration, SeedError> {
    let n = b.rank();
    let root = Seed::initial(b);
    let mut index: HashMap<Vec<LaurentExpr>, usize> = HashMap::new();
    let mut var_index: HashMap<LaurentExpr, usize> = HashMap::new();
    let mut out = SeedEnumeration {
        seeds: Vec::new(),
        layers: Vec::new(),
        variables: Vec::new(),
        edges: Vec::new(),
        path_counts: Vec::new(),
        complete: false,
    };
    let mut record = |seed: Seed, layer: usize, out: &mut SeedEnumeration| -> usize {
        for v in seed.variables() {
            if !var_index.contains_key(v) {
                var_index.insert(v.clone(), out.variables.len());
                out.variables.push(v.clone());
            }
        }
        out.seeds.push(seed);
        out.layers.push(layer);
        out.path_counts.push(1);
        out.seeds.len() - 1
    };
    index.insert(root.cluster_key(), 0);
    record(root, 0, &mut out);
    if budget == 0 {
        return Err(SeedError::BudgetExhausted { budget, depth: 0 });
    }
    let mut seen_edges: HashSet<(usize, usize)> = HashSet::new();
    let mut frontier = vec![0usize];
    let mut layer = 0;
    while !frontier.is_empty() {
        if depth.is_some_and(|d| layer >= d) {
            return Ok(out);
        }
        // a seed's parent edge is already known, so skip mutating straight back
        let jobs: Vec<(usize, usize)> = frontier
            .iter()
            .flat_map(|&s| {
                let back = out.seeds[s].history().last().copied();
                (0..n).filter(move |&k| Some(k) != back).map(move |k| (s, k))
            })
            .collect();
        let children: Vec<Seed> = jobs
            .par_iter()
            .map(|&(s, k)| out.seeds[s].mutate(k))
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for ((parent, k), child) in jobs.into_iter().zip(children) {
            let key = child.cluster_key();
            let target = match index.get(&key) {
                Some(&existing) => {
                    out.path_counts[existing] += 1;
                    existing
                }
                None => {
                    if out.seeds.len() >= budget {
                        return Err(SeedError::BudgetExhausted { budget, depth: layer + 1 });
                    }
                    let id = record(child, layer + 1, &mut out);
                    index.insert(key, id);
                    next.push(id);
                    id
                }
            };
            // seeds are clusters up to order, so the two endpoints may name the
            // exchanged position differently; adjacent clusters share one edge
            if seen_edges.insert((parent.min(target), parent.max(target))) {
                out.edges.push((parent, k, target));
            }
        }
        frontier = next;
        layer += 1;
    }
    out.complete = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b21() -> ExchangeMatrix {
        ExchangeMatrix::rank2(2, 1).unwrap()
    }

    #[test]
    fn first_mutation_of_b21() {
        let s = Seed::initial(&b21()).mutate(0).unwrap();
        assert_eq!(s.variables()[0].to_string(), "(x2^2 + y1)/x1");
        assert_eq!(s.matrix(), &ExtendedMatrix::from_rows(&[vec![0, -1], vec![2, 0], vec![-1, 1], vec![0, 1]]).unwrap());
        let s2 = s.mutate(1).unwrap();
        assert_eq!(s2.variables()[1], LaurentExpr::parse(2, "(x_2^2+y_1y_2x_1+y_1)/(x_1x_2)").unwrap());
    }

    #[test]
    fn mutation_is_an_involution_on_seeds() {
        let s = Seed::initial(&b21()).mutate_word(&[0, 1]).unwrap();
        for k in 0..2 {
            let back = s.mutate(k).unwrap().mutate(k).unwrap();
            assert!(back.same_data(&s));
            assert_ne!(back.history(), s.history());
        }
    }

    #[test]
    fn exchange_products_match_binomials() {
        let e = enumerate_seeds(&b21(), None, 100).unwrap();
        for &(a, k, b) in &e.edges {
            let (sa, sb) = (&e.seeds[a], &e.seeds[b]);
            let lhs = &sa.variables()[k] * &sa.mutate(k).unwrap().variables()[k];
            assert_eq!(lhs, sa.exchange_binomial(k).unwrap());
            assert_eq!(sa.mutate(k).unwrap().cluster_key(), sb.cluster_key());
        }
    }

    #[test]
    fn a2_pentagon() {
        let e = enumerate_seeds(&ExchangeMatrix::rank2(1, 1).unwrap(), None, 100).unwrap();
        assert!(e.complete);
        assert_eq!(e.seeds.len(), 5);
        assert_eq!(e.variables.len(), 5);
        // hand recurrence for the pentagon with principal coefficients
        let expected = ["x1", "x2", "(x2 + y1)/x1", "(x1y1y2 + x2 + y1)/(x1x2)", "(x1y2 + 1)/x2"];
        let mut got: Vec<String> = e.variables.iter().map(|v| v.to_string()).collect();
        let mut want: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn depth_zero_and_budget() {
        let e = enumerate_seeds(&b21(), Some(0), 10).unwrap();
        assert_eq!(e.seeds.len(), 1);
        assert_eq!(e.variables.len(), 2);
        assert!(!e.complete);
        let err = enumerate_seeds(&ExchangeMatrix::rank2(4, 1).unwrap(), None, 20).unwrap_err();
        assert!(matches!(err, SeedError::BudgetExhausted { budget: 20, .. }));
    }

    #[test]
    fn laurent_check() {
        let e = enumerate_seeds(&b21(), None, 100).unwrap();
        assert!(e.seeds.iter().all(Seed::check_laurent));
        assert!(e.variables.iter().all(LaurentExpr::has_nonnegative_coefficients));
        assert!(check_laurent_expr(&LaurentExpr::parse(2, "(x1 + x2)/x1").unwrap()));
        let bad = LaurentExpr::from_terms(2, vec![(vec![1, 0, -1, 0], 1.into())]);
        assert!(!check_laurent_expr(&bad));
    }
}
