//! Named exchange matrices used by tests, the CLI and the acceptance suite.

use crate::diagram::{dynkin_edges, exceptional_fixture, extended_dynkin_edges, realize, Exceptional, Family};
use crate::matrix::ExchangeMatrix;

/// `B_{b,c} = [[0, c], [-b, 0]]`.
pub fn rank2(b: i64, c: i64) -> ExchangeMatrix {
    ExchangeMatrix::rank2(b, c).expect("B_{b,c} with bc > 0 or b = c = 0")
}

/// Dynkin diagram `X_n` with every edge oriented from lower to higher template index.
pub fn dynkin(family: Family, n: usize) -> Option<ExchangeMatrix> {
    let edges = dynkin_edges(family, n)?;
    Some(realize(n, &edges, &vec![true; edges.len()]))
}

/// Extended Dynkin diagram `X_n^(1)`; the `A_n^(1)` cycle gets one reversed
/// edge so it is not an oriented cycle.
pub fn extended_dynkin(family: Family, n: usize) -> Option<ExchangeMatrix> {
    let edges = extended_dynkin_edges(family, n)?;
    let mut orient = vec![true; edges.len()];
    if let Some(last) = orient.last_mut() {
        if family == Family::A && n >= 2 {
            *last = false;
        }
    }
    Some(realize(n + 1, &edges, &orient))
}

/// The linearly oriented `A_n` quiver `1 <- 2 <- .. <- n`.
pub fn linear_a(n: usize) -> ExchangeMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n.saturating_sub(1) {
        rows[i][i + 1] = 1;
        rows[i + 1][i] = -1;
    }
    ExchangeMatrix::from_rows(&rows).expect("path quiver")
}

/// One representative per extended Dynkin family, smallest rank first.
pub fn extended_dynkin_battery() -> Vec<(String, ExchangeMatrix)> {
    let picks = [
        (Family::A, 1),
        (Family::A, 2),
        (Family::A, 3),
        (Family::B, 3),
        (Family::B, 4),
        (Family::C, 2),
        (Family::C, 3),
        (Family::D, 4),
        (Family::D, 5),
        (Family::E, 6),
        (Family::E, 7),
        (Family::E, 8),
        (Family::F, 4),
        (Family::G, 2),
    ];
    picks
        .into_iter()
        .map(|(f, n)| (format!("{f}{n}^(1)"), extended_dynkin(f, n).expect("family exists")))
        .collect()
}

pub fn exceptional(tag: Exceptional) -> ExchangeMatrix {
    exceptional_fixture(tag).matrix.clone()
}

/// Resolves a fixture name such as `B2`, `A3^(1)`, `X7` or `B_{5,1}`.
pub fn by_name(name: &str) -> Option<ExchangeMatrix> {
    if let Some(e) = Exceptional::from_tag(name) {
        return Some(exceptional(e));
    }
    if let Some(inner) = name.strip_prefix("B_{").and_then(|s| s.strip_suffix('}')) {
        let (b, c) = inner.split_once(',')?;
        return ExchangeMatrix::rank2(b.trim().parse().ok()?, c.trim().parse().ok()?).ok();
    }
    let mut chars = name.chars();
    let family = match chars.next()? {
        'A' => Family::A,
        'B' => Family::B,
        'C' => Family::C,
        'D' => Family::D,
        'E' => Family::E,
        'F' => Family::F,
        'G' => Family::G,
        _ => return None,
    };
    let rest = chars.as_str();
    match rest.strip_suffix("^(1)") {
        Some(n) => extended_dynkin(family, n.parse().ok()?),
        None => dynkin(family, rest.parse().ok()?),
    }
}
