//! g-vectors by grading and by the piecewise-linear transition rule.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::laurent::LaurentExpr;
use crate::matrix::{positive_part, ExchangeMatrix, MatrixError};

pub type GVector = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("expression has {got} variables, matrix has rank {n}")]
    Arity { got: usize, n: usize },
    #[error("zero has no degree")]
    Zero,
    #[error("terms have different degrees {first:?} and {other:?}")]
    Inhomogeneous { first: GVector, other: GVector },
}

/// Degree of one term under `deg(x_i) = e_i`, `deg(y_j) = -(column j of B)`.
fn term_degree(e: &[i64], b: &ExchangeMatrix) -> GVector {
    let n = b.rank();
    (0..n)
        .map(|i| {
            let mut d = BigInt::from(e[i]);
            for j in 0..n {
                if e[n + j] != 0 {
                    d -= b.get(i, j) * e[n + j];
                }
            }
            d
        })
        .collect()
}

/// The common degree of all terms of `v`, failing on inhomogeneous input.
pub fn g_vector_by_grading(v: &LaurentExpr, b: &ExchangeMatrix) -> Result<GVector, GradingError> {
    if v.n() != b.rank() {
        return Err(GradingError::Arity { got: v.n(), n: b.rank() });
    }
    let mut terms = v.terms();
    let (e, _) = terms.next().ok_or(GradingError::Zero)?;
    let first = term_degree(e, b);
    for (e, _) in terms {
        let other = term_degree(e, b);
        if other != first {
            return Err(GradingError::Inhomogeneous { first, other });
        }
    }
    Ok(first)
}

/// `g'_k = -g_k`, `g'_i = g_i + [b_ik]_+ g_k - b_ik min(g_k, 0)`.
///
/// Carries a g-vector of `A(B)` to the matching g-vector of `A(mu_k B)`.
pub fn nz_transition(g: &[BigInt], b: &ExchangeMatrix, k: usize) -> Result<GVector, MatrixError> {
    let n = b.rank();
    if k >= n {
        return Err(MatrixError::IndexOutOfRange { index: k, n });
    }
    let gk = &g[k];
    let gk_min = if gk.is_negative() { gk.clone() } else { BigInt::zero() };
    Ok((0..n)
        .map(|i| {
            if i == k {
                -gk
            } else {
                let bik = b.get(i, k);
                &g[i] + positive_part(bik) * gk - bik * &gk_min
            }
        })
        .collect())
}

/// g-vectors, relative to `b`, of the cluster reached by `word`.
///
/// With `B_0 = b` and `B_t = mu_{k_t} B_{t-1}`, variable `i` of the final
/// seed has g-vector `e_i` in `A(B_m)`; the transitions
/// `T_{k_t}^{B_t}` for `t = m..1` carry it back to `A(B_0)`.
pub fn g_vectors_by_recursion(b: &ExchangeMatrix, word: &[usize]) -> Result<Vec<GVector>, MatrixError> {
    let n = b.rank();
    let mut path = Vec::with_capacity(word.len());
    let mut current = b.clone();
    for &k in word {
        current = current.mutate(k)?;
        path.push(current.clone());
    }
    let mut gs: Vec<GVector> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    for (bt, &k) in path.iter().zip(word).rev() {
        for g in &mut gs {
            *g = nz_transition(g, bt, k)?;
        }
    }
    Ok(gs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> LaurentExpr {
        LaurentExpr::parse(2, s).unwrap()
    }

    fn g(xs: &[i64]) -> GVector {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn grading_on_b21() {
        let b = ExchangeMatrix::rank2(2, 1).unwrap();
        assert_eq!(g_vector_by_grading(&v("x2"), &b).unwrap(), g(&[0, 1]));
        assert_eq!(g_vector_by_grading(&v("(x2^2 + y1)/x1"), &b).unwrap(), g(&[-1, 2]));
        assert_eq!(g_vector_by_grading(&v("(y2x1 + 1)/x2"), &b).unwrap(), g(&[0, -1]));
        assert!(matches!(
            g_vector_by_grading(&v("x1 + x2"), &b),
            Err(GradingError::Inhomogeneous { .. })
        ));
        assert_eq!(g_vector_by_grading(&LaurentExpr::zero(2), &b), Err(GradingError::Zero));
    }

    #[test]
    fn transition_basics() {
        let b = ExchangeMatrix::from_rows(&[vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
        for k in 0..3 {
            let e: GVector = (0..3).map(|i| BigInt::from(u8::from(i == k))).collect();
            let out = nz_transition(&e, &b, k).unwrap();
            for i in 0..3 {
                let want = if i == k { BigInt::from(-1) } else { positive_part(b.get(i, k)) };
                assert_eq!(out[i], want);
            }
        }
        assert_eq!(nz_transition(&g(&[3, -2, 5]), &b, 1).unwrap()[1], BigInt::from(2));
    }

    #[test]
    fn recursion_matches_known_rank_two_cluster() {
        let b = ExchangeMatrix::rank2(2, 1).unwrap();
        assert_eq!(g_vectors_by_recursion(&b, &[]).unwrap(), vec![g(&[1, 0]), g(&[0, 1])]);
        assert_eq!(g_vectors_by_recursion(&b, &[0]).unwrap(), vec![g(&[-1, 2]), g(&[0, 1])]);
        assert_eq!(g_vectors_by_recursion(&b, &[0, 1]).unwrap(), vec![g(&[-1, 2]), g(&[-1, 1])]);
    }
}
