//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clusterfan::denseness::{coverage_estimate, general_verdict, hereditary_g_tame, quiver_matrix, rank2_boundary, Status};
use clusterfan::diagram::{Exceptional, Family};
use clusterfan::fan::{build_fan, grading_recursion_mismatches, FanRoute, GFan};
use clusterfan::fixtures::{dynkin, exceptional, extended_dynkin, extended_dynkin_battery, linear_a, rank2};
use clusterfan::gvector::{nz_transition, GVector};
use clusterfan::laurent::LaurentExpr;
use clusterfan::matrix::{check_skew_symmetrizable, ExchangeMatrix, ExtendedMatrix};
use clusterfan::mutation_class::{explore, Verdict, DEFAULT_NODE_BUDGET};
use clusterfan::seed::enumerate_seeds;
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

const HEXAGON: [[[i64; 2]; 4]; 6] = [
    [[0, 1], [-2, 0], [1, 0], [0, 1]],
    [[0, -1], [2, 0], [-1, 1], [0, 1]],
    [[0, 1], [-2, 0], [1, -1], [2, -1]],
    [[0, -1], [2, 0], [1, 0], [0, -1]],
    [[0, 1], [-2, 0], [-1, 0], [0, -1]],
    [[0, -1], [2, 0], [-1, 0], [-2, 1]],
];

/// `HEXAGON_EDGES[i] = [target of mu_1, target of mu_2]`.
const HEXAGON_EDGES: [[usize; 2]; 6] = [[1, 3], [0, 2], [5, 1], [4, 0], [3, 5], [2, 4]];

fn hexagon() -> Outcome {
    let start = Instant::now();
    let nodes: Vec<ExtendedMatrix> = HEXAGON
        .iter()
        .map(|m| ExtendedMatrix::from_rows(&m.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap())
        .collect();
    let root = ExtendedMatrix::principal(&rank2(2, 1));
    check(root == nodes[0], "initial extended matrix differs")?;
    for (i, targets) in HEXAGON_EDGES.iter().enumerate() {
        for (k, &t) in targets.iter().enumerate() {
            let m = nodes[i].mutate(k).map_err(|e| e.to_string())?;
            check(m == nodes[t], format!("mu_{} of node {} is not node {}", k + 1, i + 1, t + 1))?;
        }
    }
    let mut walk = vec![root.clone()];
    for step in 0..6 {
        walk.push(walk.last().unwrap().mutate(step % 2).unwrap());
    }
    check(walk[6] == root, "alternating walk does not close after 6 steps")?;
    let distinct: BTreeSet<String> = walk[..6].iter().map(|m| format!("{:?}", m.rows())).collect();
    check(distinct.len() == 6, format!("{} distinct matrices on the walk", distinct.len()))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("6 matrices, 12 labelled edges, walk closes ({elapsed:.2?})"))
}

const B21_PRINTED: [&str; 6] = [
    "x_1",
    "x_2",
    "\\frac{x_2^2+y_1}{x_1}",
    "\\frac{x_2^2+y_1y_2x_1+y_1}{x_1x_2}",
    "\\frac{y_1y_2^2x_1^2+x_2^2+2y_1y_2x_1+y_1}{x_1x_2^2}",
    "\\frac{y_2x_1+1}{x_2}",
];

fn census() -> Outcome {
    let start = Instant::now();
    let e = enumerate_seeds(&rank2(2, 1), None, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(e.complete, "walk did not close")?;
    let got: BTreeSet<String> = e.variables.iter().map(|v| v.to_string()).collect();
    let mut want = BTreeSet::new();
    for s in B21_PRINTED {
        let plain = s.replace("\\frac{", "(").replace("}{", ")/(").replace('}', ")");
        want.insert(LaurentExpr::parse(2, &plain).map_err(|e| format!("{s}: {e}"))?.to_string());
    }
    check(got == want, format!("got {got:?}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("{} variables in {} seeds ({elapsed:.2?})", got.len(), e.seeds.len()))
}

fn grading_vs_recursion() -> Outcome {
    let cases = [
        ("A2", linear_a(2), None),
        ("B2", rank2(2, 1), None),
        ("A3", linear_a(3), None),
        ("B_{4,1}", rank2(4, 1), Some(8)),
    ];
    let mut parts = Vec::new();
    for (name, b, depth) in cases {
        let (checked, bad) = grading_recursion_mismatches(&b, depth, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        check(bad == 0, format!("{name}: {bad} mismatches of {checked}"))?;
        parts.push(format!("{name} {checked}"));
    }
    Ok(format!("0 mismatches ({})", parts.join(", ")))
}

fn finite_completeness() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("A2", linear_a(2)),
        ("A3", linear_a(3)),
        ("B2", rank2(2, 1)),
        ("B3", dynkin(Family::B, 3).unwrap()),
    ];
    let mut parts = Vec::new();
    for (name, b) in cases {
        let fan = build_fan(&b, None, DEFAULT_NODE_BUDGET, FanRoute::Grading).map_err(|e| e.to_string())?;
        check(fan.is_complete(), format!("{name}: fan not complete"))?;
        let c = coverage_estimate(&b, None, 100_000, 0, DEFAULT_NODE_BUDGET, FanRoute::Grading).map_err(|e| e.to_string())?;
        check(c.fraction == 1.0, format!("{name}: coverage {}", c.fraction))?;
        parts.push(format!("{name} {} cones", fan.cones().len()));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("complete, coverage 1.0 ({}; {elapsed:.2?})", parts.join(", ")))
}

fn rank2_convergence() -> Outcome {
    let boundary = rank2_boundary(&BigInt::from(4), &BigInt::from(1)).map_err(|e| e.to_string())?;
    let fan = build_fan(&rank2(4, 1), Some(50), DEFAULT_NODE_BUDGET, FanRoute::Recursion).map_err(|e| e.to_string())?;
    let layers = fan.ray_layers();
    let mut best = f64::INFINITY;
    let mut previous = f64::INFINITY;
    for t in 0..=50 {
        for (r, &l) in fan.rays().iter().zip(&layers) {
            if l == t {
                best = best.min(boundary.angular_distance(&r[0], &r[1]));
            }
        }
        check(best <= previous, format!("distance grew at layer {t}"))?;
        previous = best;
    }
    check(best < 1e-6, format!("monotone, but distance after 50 layers is {best:.3e}, not below 1e-6"))?;
    Ok(format!("monotone, final distance {best:.3e}"))
}

fn rank2_gap() -> Outcome {
    let boundary = rank2_boundary(&BigInt::from(5), &BigInt::from(1)).map_err(|e| e.to_string())?;
    let b = rank2(5, 1);
    let fan = build_fan(&b, Some(60), DEFAULT_NODE_BUDGET, FanRoute::Recursion).map_err(|e| e.to_string())?;
    for r in fan.rays() {
        check(!boundary.in_open_gap(&r[0], &r[1]), format!("ray {r:?} inside the gap"))?;
    }
    // arctangent interval of the slopes (-5 +- sqrt 5)/2, independent of the engine
    let (t1, t2) = ((-5.0 + 5f64.sqrt()) / 2.0, (-5.0 - 5f64.sqrt()) / 2.0);
    let gap = (t1.atan() - t2.atan()).abs();
    let want = 1.0 - gap / (2.0 * PI);
    let c = coverage_estimate(&b, Some(60), 100_000, 1, DEFAULT_NODE_BUDGET, FanRoute::Recursion).map_err(|e| e.to_string())?;
    check((c.fraction - want).abs() <= 0.01, format!("coverage {} vs {want:.4}", c.fraction))?;
    Ok(format!(
        "{} rays outside the gap, coverage {:.4} vs {want:.4}",
        fan.rays().len(),
        c.fraction
    ))
}

fn random_heavy_triangle(rng: &mut ChaCha8Rng) -> ExchangeMatrix {
    loop {
        let d: Vec<i64> = (0..3).map(|_| rng.random_range(1..=3)).collect();
        let mut rows = vec![vec![0i64; 3]; 3];
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let t: i64 = rng.random_range(0..=3);
            let g = d[i].gcd(&d[j]);
            rows[i][j] = -t * d[j] / g;
            rows[j][i] = t * d[i] / g;
        }
        let b = ExchangeMatrix::from_rows(&rows).unwrap();
        let heavy = [(0, 1), (1, 2), (0, 2)].iter().any(|&(i, j)| b.weight(i, j) > BigInt::from(4));
        if heavy && b.is_connected() {
            return b;
        }
    }
}

fn finiteness_battery() -> Outcome {
    let start = Instant::now();
    let mut fixtures = extended_dynkin_battery();
    for tag in Exceptional::ALL {
        fixtures.push((tag.tag().to_string(), exceptional(tag)));
    }
    for (name, b) in &fixtures {
        let r = explore(b, DEFAULT_NODE_BUDGET).map_err(|e| format!("{name}: {e}"))?;
        check(r.verdict == Verdict::Finite, format!("{name} reported infinite"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let b = random_heavy_triangle(&mut rng);
        let r = explore(&b, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        check(r.verdict == Verdict::Infinite, format!("{b:?} reported finite"))?;
        let w = r.witness.ok_or("infinite without witness")?;
        check(w.verify(&b), format!("witness {:?} does not replay", w.word))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("{} fixtures finite, 10 heavy triangles infinite with witnesses ({elapsed:.2?})", fixtures.len()))
}

fn verdict_table() -> Outcome {
    let weight5 = ExchangeMatrix::from_rows(&[vec![0, 5, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
    let table = [
        ("B_{1,1}", rank2(1, 1), Status::Complete, "finite-type-complete"),
        ("B_{2,1}", rank2(2, 1), Status::Complete, "finite-type-complete"),
        ("B_{3,1}", rank2(3, 1), Status::Complete, "finite-type-complete"),
        ("B_{4,1}", rank2(4, 1), Status::Dense, "affine-dense"),
        ("B_{2,2}", rank2(2, 2), Status::Dense, "affine-dense"),
        ("D4^(1)", extended_dynkin(Family::D, 4).unwrap(), Status::Dense, "affine-dense"),
        ("B_{5,1}", rank2(5, 1), Status::NotDense, "rank2-gap"),
        ("B_{3,3}", rank2(3, 3), Status::NotDense, "rank2-gap"),
        ("weight-5 triangle", weight5, Status::NotDense, "mutation-infinite"),
    ];
    for (name, b, status, tag) in &table {
        let v = general_verdict(b, DEFAULT_NODE_BUDGET).map_err(|e| format!("{name}: {e}"))?;
        check(
            v.status == *status && v.justification == *tag,
            format!("{name}: {} {} (want {} {tag})", v.status.as_str(), v.justification, status.as_str()),
        )?;
    }
    Ok(format!("{} inputs match", table.len()))
}

fn orientations(n: usize, edges: &[(usize, usize)]) -> Vec<ExchangeMatrix> {
    (0..1u32 << edges.len())
        .map(|mask| {
            let arrows: Vec<_> = edges
                .iter()
                .enumerate()
                .map(|(e, &(a, b))| if mask >> e & 1 == 1 { (b, a) } else { (a, b) })
                .collect();
            quiver_matrix(n, &arrows).unwrap()
        })
        .collect()
}

fn hereditary() -> Outcome {
    let mut tame = Vec::new();
    for n in 1..=5 {
        let path: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        tame.extend(orientations(n, &path));
    }
    tame.extend(orientations(4, &[(0, 1), (0, 2), (0, 3)]));
    tame.extend(orientations(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]));
    tame.push(quiver_matrix(2, &[(0, 1), (0, 1)]).unwrap());
    let wild = [
        quiver_matrix(2, &[(0, 1), (0, 1), (0, 1)]).unwrap(),
        quiver_matrix(3, &[(0, 1), (0, 1), (0, 1), (1, 2)]).unwrap(),
    ];
    for q in &tame {
        check(hereditary_g_tame(q).map_err(|e| e.to_string())?, format!("{q:?} reported not g-tame"))?;
    }
    for q in &wild {
        check(!hereditary_g_tame(q).map_err(|e| e.to_string())?, format!("{q:?} reported g-tame"))?;
    }
    Ok(format!("{} tame quivers true, {} wild false", tame.len(), wild.len()))
}

fn random_matrix(rng: &mut ChaCha8Rng) -> ExchangeMatrix {
    let n = rng.random_range(1..=5);
    let d: Vec<i64> = (0..n).map(|_| rng.random_range(1..=3)).collect();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let t: i64 = rng.random_range(-3..=3);
            let g = d[i].gcd(&d[j]);
            let (bij, bji) = (t * d[j] / g, -t * d[i] / g);
            if bij.abs() <= 3 && bji.abs() <= 3 {
                rows[i][j] = bij;
                rows[j][i] = bji;
            }
        }
    }
    ExchangeMatrix::from_rows(&rows).unwrap()
}

fn cones_of(fan: &GFan) -> BTreeSet<Vec<GVector>> {
    fan.cone_vectors()
        .into_iter()
        .map(|mut c| {
            c.sort();
            c
        })
        .collect()
}

fn nz_image(fan: &GFan, b: &ExchangeMatrix, k: usize) -> BTreeSet<Vec<GVector>> {
    fan.cone_vectors()
        .into_iter()
        .map(|c| {
            let mut m: Vec<GVector> = c.iter().map(|g| nz_transition(g, b, k).unwrap()).collect();
            m.sort();
            m
        })
        .collect()
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let b = random_matrix(&mut rng);
        for k in 0..b.rank() {
            let m = b.mutate(k).unwrap();
            check(m.mutate(k).unwrap() == b, format!("mu_{} not an involution on {b:?}", k + 1))?;
            let d = check_skew_symmetrizable(m.rank(), m.entries()).map_err(|e| e.to_string())?;
            check(d.as_slice() == b.symmetrizer(), format!("symmetrizer changed under mu_{} on {b:?}", k + 1))?;
        }
    }

    let mut fixtures: Vec<ExchangeMatrix> = [(1, 1), (2, 1), (3, 1), (4, 1), (2, 2), (5, 1), (3, 3)]
        .iter()
        .map(|&(b, c)| rank2(b, c))
        .collect();
    fixtures.extend(extended_dynkin_battery().into_iter().map(|(_, b)| b));
    fixtures.extend(Exceptional::ALL.iter().map(|&t| exceptional(t)));
    for b in &fixtures {
        let base = general_verdict(b, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        for k in 0..b.rank() {
            let v = general_verdict(&b.mutate(k).unwrap(), DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
            check(
                (v.status, v.justification) == (base.status, base.justification),
                format!("verdict changed under mu_{} on {b:?}", k + 1),
            )?;
        }
    }

    for b in [rank2(1, 1), rank2(2, 1), rank2(3, 1), linear_a(3)] {
        let fan = build_fan(&b, None, DEFAULT_NODE_BUDGET, FanRoute::Grading).map_err(|e| e.to_string())?;
        for k in 0..b.rank() {
            let target = build_fan(&b.mutate(k).unwrap(), None, DEFAULT_NODE_BUDGET, FanRoute::Grading).map_err(|e| e.to_string())?;
            check(nz_image(&fan, &b, k) == cones_of(&target), format!("fan of mu_{} {b:?} is not the image", k + 1))?;
        }
    }
    for b in [rank2(4, 1), rank2(2, 2), rank2(5, 1)] {
        let d = 12;
        let inner = build_fan(&b, Some(d - 1), DEFAULT_NODE_BUDGET, FanRoute::Recursion).map_err(|e| e.to_string())?;
        let outer = build_fan(&b, Some(d + 1), DEFAULT_NODE_BUDGET, FanRoute::Recursion).map_err(|e| e.to_string())?;
        for k in 0..2 {
            let mid = build_fan(&b.mutate(k).unwrap(), Some(d), DEFAULT_NODE_BUDGET, FanRoute::Recursion).map_err(|e| e.to_string())?;
            let mid = cones_of(&mid);
            check(
                nz_image(&inner, &b, k).is_subset(&mid) && mid.is_subset(&nz_image(&outer, &b, k)),
                format!("depth-limited fan of mu_{} {b:?} not sandwiched", k + 1),
            )?;
        }
    }
    Ok(format!(
        "1000 involution/symmetrizer cases, {} fixtures verdict-invariant, equivariance on 7 fans",
        fixtures.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("hexagon reproduction", hexagon),
        ("cluster-variable census", census),
        ("grading/recursion equivalence", grading_vs_recursion),
        ("finite-type completeness", finite_completeness),
        ("rank-2 convergence", rank2_convergence),
        ("rank-2 gap", rank2_gap),
        ("mutation-finiteness battery", finiteness_battery),
        ("denseness verdict table", verdict_table),
        ("hereditary g-tameness battery", hereditary),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
