//! Denseness verdicts for g-vector fans, rank-2 limiting rays, and
//! sampling-based coverage measurements.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{classify_underlying, diagram_of, DiagramType, Exceptional};
use crate::fan::{build_fan, to_f64, ConeIndex, FanError, FanRoute, GFan};
use crate::io::{bigint_json, word_json};
use crate::matrix::ExchangeMatrix;
use crate::mutation_class::{find_acyclic_representative, survey, ClassError};

/// Sample directions are rounded to integer points at this scale.
pub const SAMPLE_SCALE: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenseError {
    #[error("matrix must be connected")]
    Disconnected,
    #[error("mutation class has no acyclic member")]
    NotAcyclicClass,
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("limiting rays need bc >= 4, got bc = {0}")]
    BelowThreshold(BigInt),
    #[error("the block on ({}, {}) has weight {weight}, the check needs weight above 4", .pair.0 + 1, .pair.1 + 1)]
    WeakBlock { pair: (usize, usize), weight: BigInt },
    #[error("index pair ({}, {}) is not two distinct indices below {n}", .pair.0 + 1, .pair.1 + 1)]
    BadPair { pair: (usize, usize), n: usize },
    #[error("quiver must be given by a skew-symmetric matrix")]
    NotSkewSymmetric,
    #[error("quiver has an oriented cycle")]
    Cyclic,
    #[error("sample count must be at least 1")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    Dense,
    NotDense,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Complete => "Complete",
            Status::Dense => "Dense",
            Status::NotDense => "NotDense",
            Status::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensenessVerdict {
    pub status: Status,
    pub justification: &'static str,
    /// The results the verdict rests on, strongest last.
    pub citations: Vec<&'static str>,
    /// Type of the class member that decided the verdict, when one did.
    pub diagram_type: Option<DiagramType>,
    /// Mutation word from the input to that member, or the infinite-class witness word.
    pub word: Option<Vec<usize>>,
}

impl DensenessVerdict {
    fn new(status: Status, justification: &'static str, citations: &[&'static str]) -> Self {
        Self {
            status,
            justification,
            citations: citations.to_vec(),
            diagram_type: None,
            word: None,
        }
    }

    fn at(mut self, t: DiagramType, word: Vec<usize>) -> Self {
        self.diagram_type = Some(t);
        self.word = Some(word);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status.as_str(),
            "justification": self.justification,
            "citations": self.citations,
            "type": self.diagram_type.as_ref().map(|t| t.to_string()),
            "word": self.word.as_deref().map(word_json),
        })
    }
}

const MUTATION_INFINITE: &str = "mutation-infinite fans are not dense";
const ACYCLIC_FINITE: &str = "acyclic mutation-finite classes are rank 2, Dynkin or extended Dynkin";
const FINITE_COMPLETE: &str = "finite type fans are complete";
const AFFINE_DENSE: &str = "affine type fans are dense";
const RANK2: &str = "rank 2 fans are dense iff bc <= 4";
const SKEW: &str = "skew-symmetric dense classification (X6 excluded)";
const X7_HALFSPACE: &str = "type X7 fans lie in an open half-space";
const OPEN_CASES: &str = "orbifold, X6 and F/G exceptional types are open";

fn not_dense_infinite(word: Vec<usize>) -> DensenessVerdict {
    let mut v = DensenessVerdict::new(Status::NotDense, "mutation-infinite", &[MUTATION_INFINITE]);
    v.word = Some(word);
    v
}

fn acyclic_verdict(rep: &ExchangeMatrix, word: Vec<usize>) -> DensenessVerdict {
    let t = classify_underlying(&diagram_of(rep));
    let v = match &t {
        DiagramType::Dynkin { .. } => {
            DensenessVerdict::new(Status::Complete, "finite-type-complete", &[ACYCLIC_FINITE, FINITE_COMPLETE])
        }
        DiagramType::ExtendedDynkin { .. } => {
            DensenessVerdict::new(Status::Dense, "affine-dense", &[ACYCLIC_FINITE, AFFINE_DENSE])
        }
        DiagramType::RankTwo { .. } => DensenessVerdict::new(Status::NotDense, "rank2-gap", &[RANK2]),
        _ => DensenessVerdict::new(Status::Unknown, "unclassified", &[ACYCLIC_FINITE]),
    };
    v.at(t, word)
}

/// Verdict for a class with an acyclic member: `Complete` for finite type,
/// `Dense` for affine type, `NotDense` for mutation-infinite classes and
/// rank 2 with `bc > 4`.
pub fn acyclic_denseness_verdict(b: &ExchangeMatrix, node_budget: usize) -> Result<DensenessVerdict, DenseError> {
    if !b.is_connected() {
        return Err(DenseError::Disconnected);
    }
    match find_acyclic_representative(b, node_budget) {
        Err(ClassError::Infinite(w)) => Ok(not_dense_infinite(w.word)),
        Err(e) => Err(e.into()),
        Ok(None) => Err(DenseError::NotAcyclicClass),
        Ok(Some((rep, word))) => Ok(acyclic_verdict(&rep, word)),
    }
}

/// Full decision tree. Classes without an acyclic member are decided only
/// in the skew-symmetric cases the classification covers; everything else
/// is `Unknown`.
pub fn general_verdict(b: &ExchangeMatrix, node_budget: usize) -> Result<DensenessVerdict, DenseError> {
    if !b.is_connected() {
        return Err(DenseError::Disconnected);
    }
    let survey = match survey(b, node_budget) {
        Err(ClassError::Infinite(w)) => return Ok(not_dense_infinite(w.word)),
        Err(e) => return Err(e.into()),
        Ok(s) => s,
    };
    if let Some(word) = survey.acyclic {
        let rep = b.mutate_word(&word).expect("valid word");
        return Ok(acyclic_verdict(&rep, word));
    }
    let (t, word) = survey.typed.unwrap_or((DiagramType::Unclassified, Vec::new()));
    let v = match (&t, b.is_skew_symmetric()) {
        (DiagramType::Exceptional(Exceptional::X7), true) => {
            DensenessVerdict::new(Status::NotDense, "X7-halfspace", &[SKEW, X7_HALFSPACE])
        }
        (DiagramType::Exceptional(Exceptional::X6), true) => {
            DensenessVerdict::new(Status::Unknown, "X6-open", &[SKEW, OPEN_CASES])
        }
        (DiagramType::Exceptional(e), true) if e.is_elliptic() => {
            DensenessVerdict::new(Status::Dense, "skew-symmetric-dense", &[SKEW])
        }
        _ => DensenessVerdict::new(Status::Unknown, "unclassified", &[OPEN_CASES]),
    };
    Ok(if t.is_classified() { v.at(t, word) } else { v })
}

/// `rational + coeff * sqrt(disc)` with `disc >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub rational: BigRational,
    pub coeff: BigRational,
    pub disc: BigInt,
}

impl QuadraticSurd {
    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && (self.coeff.is_zero() || self.disc.is_zero())
    }

    /// `self^2`, exact.
    pub fn square(&self) -> Self {
        let d = BigRational::from_integer(self.disc.clone());
        Self {
            rational: &self.rational * &self.rational + &self.coeff * &self.coeff * d,
            coeff: BigRational::from_integer(BigInt::from(2)) * &self.rational * &self.coeff,
            disc: self.disc.clone(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            rational: &self.rational * k,
            coeff: &self.coeff * k,
            disc: self.disc.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.disc, other.disc, "surds over different radicands");
        Self {
            rational: &self.rational + &other.rational,
            coeff: &self.coeff + &other.coeff,
            disc: self.disc.clone(),
        }
    }

    pub fn add_rational(&self, q: &BigRational) -> Self {
        Self {
            rational: &self.rational + q,
            ..self.clone()
        }
    }

    /// Enclosing rational interval of width at most `|coeff| / 2^bits`.
    pub fn bounds(&self, bits: u32) -> (BigRational, BigRational) {
        let scale = BigInt::one() << bits;
        let s = (&self.disc * &scale * &scale).sqrt();
        let denom = BigRational::from_integer(scale);
        let lo_root = BigRational::from_integer(s.clone()) / &denom;
        let hi_root = if &s * &s == &self.disc * (BigInt::one() << (2 * bits)) {
            lo_root.clone()
        } else {
            BigRational::from_integer(s + 1) / &denom
        };
        let a = &self.rational + &self.coeff * &lo_root;
        let b = &self.rational + &self.coeff * &hi_root;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let r = |q: &BigRational| to_f64(q.numer()) / to_f64(q.denom());
        r(&self.rational) + r(&self.coeff) * to_f64(&self.disc).sqrt()
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        // sign of (rational - q) + coeff * sqrt(disc)
        let a = &self.rational - q;
        let c = &self.coeff;
        let root_sign = if c.is_zero() || self.disc.is_zero() { 0 } else if c.is_positive() { 1 } else { -1 };
        let a_sign = if a.is_zero() { 0 } else if a.is_positive() { 1 } else { -1 };
        let sign = match (a_sign, root_sign) {
            (x, 0) => x,
            (0, y) => y,
            (x, y) if x == y => x,
            (x, _) => {
                // opposite signs: compare a^2 with c^2 disc
                let lhs = &a * &a;
                let rhs = c * c * BigRational::from_integer(self.disc.clone());
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => -x,
                    Ordering::Equal => 0,
                }
            }
        };
        sign.cmp(&0)
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() || self.disc.is_zero() {
            return write!(f, "{}", self.rational);
        }
        write!(f, "{} + {}*sqrt({})", self.rational, self.coeff, self.disc)
    }
}

/// The limiting rays `r_+`, `r_-` of the fan of `B_{b,c} = [[0, c], [-b, 0]]`
/// for `bc >= 4`, with slopes `(-bc +- sqrt(bc(bc-4))) / 2c`.
///
/// Slopes are the roots of `c t^2 + bc t + b`. The open gap between the two
/// rays is where `c (c y^2 + bc xy + b x^2) < 0` on the side `c x < 0`;
/// for `c > 0` that is the quadrant `x < 0 < y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTwoBoundary {
    pub b: BigInt,
    pub c: BigInt,
    pub r_plus: QuadraticSurd,
    pub r_minus: QuadraticSurd,
}

pub fn rank2_boundary(b: &BigInt, c: &BigInt) -> Result<RankTwoBoundary, DenseError> {
    let bc = b * c;
    if bc < BigInt::from(4) {
        return Err(DenseError::BelowThreshold(bc));
    }
    let disc: BigInt = &bc * (&bc - 4);
    let two_c = BigRational::from_integer(c * 2);
    let rational = BigRational::from_integer(-&bc) / &two_c;
    let coeff = BigRational::one() / &two_c;
    Ok(RankTwoBoundary {
        b: b.clone(),
        c: c.clone(),
        r_plus: QuadraticSurd {
            rational: rational.clone(),
            coeff: coeff.clone(),
            disc: disc.clone(),
        },
        r_minus: QuadraticSurd {
            rational,
            coeff: -coeff,
            disc,
        },
    })
}

impl RankTwoBoundary {
    pub fn is_double(&self) -> bool {
        self.r_plus == self.r_minus || self.r_plus.disc.is_zero()
    }

    /// `c t^2 + bc t + b` evaluated at a slope, exactly.
    pub fn residual(&self, t: &QuadraticSurd) -> QuadraticSurd {
        let c = BigRational::from_integer(self.c.clone());
        let bc = BigRational::from_integer(&self.b * &self.c);
        t.square()
            .scale(&c)
            .add(&t.scale(&bc))
            .add_rational(&BigRational::from_integer(self.b.clone()))
    }

    /// Whether `(x, y)` lies in the open cone between `r_+` and `r_-`.
    pub fn in_open_gap(&self, x: &BigInt, y: &BigInt) -> bool {
        let q = &self.c * y * y + &self.b * &self.c * x * y + &self.b * x * x;
        (&self.c * q).is_negative() && (&self.c * x).is_negative()
    }

    /// Direction vector of the ray with slope `t` on the gap side.
    fn direction(&self, t: f64) -> (f64, f64) {
        let x = if self.c.is_positive() { -1.0 } else { 1.0 };
        (x, x * t)
    }

    pub fn directions(&self) -> [(f64, f64); 2] {
        [self.direction(self.r_plus.to_f64()), self.direction(self.r_minus.to_f64())]
    }

    /// Angle of the open gap, `|atan r_+ - atan r_-|`.
    pub fn gap_angle(&self) -> f64 {
        (self.r_plus.to_f64().atan() - self.r_minus.to_f64().atan()).abs()
    }

    /// Smallest angle between `(x, y)` and either limiting ray.
    pub fn angular_distance(&self, x: &BigInt, y: &BigInt) -> f64 {
        let (px, py) = (to_f64(x), to_f64(y));
        self.directions()
            .iter()
            .map(|&(dx, dy)| (px * dy - py * dx).abs().atan2(px * dx + py * dy))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "b": bigint_json(&self.b),
            "c": bigint_json(&self.c),
            "r_plus": self.r_plus.to_string(),
            "r_minus": self.r_minus.to_string(),
            "r_plus_approx": self.r_plus.to_f64(),
            "r_minus_approx": self.r_minus.to_f64(),
            "gap_angle": self.gap_angle(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    pub samples: usize,
    pub rng_seed: u64,
    pub hits: usize,
    pub fraction: f64,
    /// Half-width of the 95% normal-approximation interval.
    pub half_width: f64,
}

impl Coverage {
    pub fn to_json(&self) -> Value {
        json!({
            "samples": self.samples,
            "rng_seed": self.rng_seed,
            "hits": self.hits,
            "fraction": self.fraction,
            "half_width": self.half_width,
        })
    }
}

/// Sample `index` of the stream: a standard normal vector rounded to
/// integers at [`SAMPLE_SCALE`]. Each sample has its own ChaCha8 stream, so
/// results do not depend on scheduling.
pub fn sample_point(rng_seed: u64, index: u64, n: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(index);
    (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (z * SAMPLE_SCALE).round() as i64
        })
        .collect()
}

/// Fraction of uniformly random directions that land in some cone of `fan`.
pub fn coverage_of(fan: &GFan, samples: usize, rng_seed: u64) -> Result<Coverage, DenseError> {
    if samples == 0 {
        return Err(DenseError::NoSamples);
    }
    let index = ConeIndex::new(fan);
    let n = fan.dim();
    let hits = (0..samples as u64)
        .into_par_iter()
        .filter(|&i| index.locate_i64(&sample_point(rng_seed, i, n)).is_some())
        .count();
    let p = hits as f64 / samples as f64;
    Ok(Coverage {
        samples,
        rng_seed,
        hits,
        fraction: p,
        half_width: 1.96 * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

pub fn coverage_estimate(
    b: &ExchangeMatrix,
    depth: Option<usize>,
    samples: usize,
    rng_seed: u64,
    node_budget: usize,
    route: FanRoute,
) -> Result<Coverage, DenseError> {
    let fan = build_fan(b, depth, node_budget, route)?;
    coverage_of(&fan, samples, rng_seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForbiddenRegionReport {
    pub holds: bool,
    pub boundary: RankTwoBoundary,
    pub cones: usize,
    pub points_checked: usize,
    /// First cone with a sample point projecting into the gap.
    pub violation: Option<usize>,
}

impl ForbiddenRegionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "boundary": self.boundary.to_json(),
            "cones": self.cones,
            "points_checked": self.points_checked,
            "violation": self.violation,
        })
    }
}

/// Projects interior points of every cone of the depth-limited fan onto the
/// coordinates `pair` and checks that none falls in the open gap of the
/// rank-2 block `B_pair`. Points are each cone's barycenter plus
/// `extra_points` random positive combinations of its rays.
pub fn forbidden_region_check(
    b: &ExchangeMatrix,
    pair: (usize, usize),
    depth: usize,
    node_budget: usize,
    route: FanRoute,
    extra_points: usize,
    rng_seed: u64,
) -> Result<ForbiddenRegionReport, DenseError> {
    let n = b.rank();
    let (i, j) = pair;
    if i >= n || j >= n || i == j {
        return Err(DenseError::BadPair { pair, n });
    }
    let weight = b.weight(i, j);
    if weight <= BigInt::from(4) {
        return Err(DenseError::WeakBlock { pair, weight });
    }
    // B_J = [[0, b_ij], [b_ji, 0]] = B_{b,c} with c = b_ij and b = -b_ji
    let boundary = rank2_boundary(&-b.get(j, i), b.get(i, j))?;
    let fan = build_fan(b, Some(depth), node_budget, route)?;
    let checks: Vec<(usize, bool)> = fan
        .cones()
        .par_iter()
        .enumerate()
        .map(|(idx, cone)| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(idx as u64);
            let mut points = 0;
            let mut bad = false;
            for round in 0..=extra_points {
                let weights: Vec<BigInt> = (0..cone.len())
                    .map(|_| if round == 0 { BigInt::one() } else { BigInt::from(rng.random_range(1u32..=1000)) })
                    .collect();
                let mut x = BigInt::zero();
                let mut y = BigInt::zero();
                for (w, &r) in weights.iter().zip(cone) {
                    x += w * &fan.rays()[r][i];
                    y += w * &fan.rays()[r][j];
                }
                points += 1;
                bad |= boundary.in_open_gap(&x, &y);
            }
            (points, bad)
        })
        .collect();
    let violation = checks.iter().position(|&(_, bad)| bad);
    Ok(ForbiddenRegionReport {
        holds: violation.is_none(),
        boundary,
        cones: fan.cones().len(),
        points_checked: checks.iter().map(|&(p, _)| p).sum(),
        violation,
    })
}

/// Skew-symmetric matrix of a quiver given as arrows `(source, target)`,
/// repeated for multiple arrows: `b_ij` counts arrows `j -> i` minus `i -> j`.
pub fn quiver_matrix(n: usize, arrows: &[(usize, usize)]) -> Result<ExchangeMatrix, crate::matrix::MatrixError> {
    let mut rows = vec![vec![0i64; n]; n];
    for &(s, t) in arrows {
        if s >= n || t >= n {
            return Err(crate::matrix::MatrixError::IndexOutOfRange { index: s.max(t), n });
        }
        rows[t][s] += 1;
        rows[s][t] -= 1;
    }
    ExchangeMatrix::from_rows(&rows)
}

/// Whether the path algebra of an acyclic connected quiver is g-tame, i.e.
/// the quiver is Dynkin or extended Dynkin. An `m`-fold arrow has diagram
/// weight `m^2`, so the Kronecker quiver is `A1^(1)`.
pub fn hereditary_g_tame(q: &ExchangeMatrix) -> Result<bool, DenseError> {
    if !q.is_skew_symmetric() {
        return Err(DenseError::NotSkewSymmetric);
    }
    let d = diagram_of(q);
    if !d.is_connected() {
        return Err(DenseError::Disconnected);
    }
    if !d.is_acyclic() {
        return Err(DenseError::Cyclic);
    }
    Ok(matches!(
        classify_underlying(&d),
        DiagramType::Dynkin { .. } | DiagramType::ExtendedDynkin { .. }
    ))
}
