//! `clusterfan`: command-line front end for the cluster-algebra engine.
//!
//! Every run builds a JSON report (tool version, parameters, input echo,
//! result). `--out` writes it to a file; `--format json` prints it, the
//! default text format prints a short summary. Exit status: 0 for any
//! verdict, 2 for input errors, 3 when a budget runs out, 1 for internal
//! failures.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use clusterfan::denseness::{coverage_of, general_verdict, hereditary_g_tame, rank2_boundary, DenseError};
use clusterfan::diagram::{classify_underlying, diagram_of};
use clusterfan::fan::{build_fan, FanError, FanRoute};
use clusterfan::io::{extended_text, input_json, matrix_text, parse_matrix, word_json, word_text, InputError, MatrixInput};
use clusterfan::matrix::MatrixError;
use clusterfan::mutation_class::{classify_type, explore, ClassError, DEFAULT_NODE_BUDGET};
use clusterfan::seed::{enumerate_seeds, SeedError};

#[derive(Parser, Debug)]
#[command(name = "clusterfan", version, about = "Exact cluster mutation, g-vector fans and denseness verdicts")]
struct Cli {
    verb: Verb,
    #[command(flatten)]
    opts: Options,
}

#[derive(clap::Args, Debug)]
struct Options {
    /// Matrix file in text or JSON format; `-` reads standard input.
    input: Option<PathBuf>,
    /// Inline matrix with rows separated by `;`, e.g. "0 1; -2 0".
    #[arg(long, conflicts_with_all = ["input", "fixture"])]
    matrix: Option<String>,
    /// Named matrix: B2, A3^(1), X7, E6^(1,1), B_{5,1}, ...
    #[arg(long, conflicts_with = "input")]
    fixture: Option<String>,
    /// Mutation directions for `mutate`, 1-based and comma-separated, e.g. `1,2,1`.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// `mutate`: extend a plain matrix by the identity before mutating.
    #[arg(long)]
    principal: bool,
    /// BFS depth (layers of mutations); unlimited when omitted.
    #[arg(long)]
    depth: Option<usize>,
    /// Node or seed budget.
    #[arg(long, env = "CLUSTERFAN_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
    budget: usize,
    /// Number of sample directions for `coverage`.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long = "rng-seed", default_value_t = 0)]
    rng_seed: u64,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a rank-2 SVG picture of the fan (`gfan`, `coverage`).
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// How g-vectors are computed; `coverage` defaults to recursion, the rest to grading.
    #[arg(long, value_enum)]
    route: Option<Route>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Verb {
    /// Mutate along the word given by --k.
    Mutate,
    /// Explore the mutation class and decide finiteness.
    Class,
    /// Recognize the Dynkin, extended Dynkin or exceptional type of the class.
    Type,
    /// Enumerate seeds with principal coefficients.
    Seeds,
    /// Build the g-vector fan.
    Gfan,
    /// Decide denseness of the g-vector fan.
    Dense,
    /// Estimate the fraction of directions covered by the fan.
    Coverage,
    /// Decide g-tameness of the path algebra of an acyclic quiver (skew-symmetric input).
    Hereditary,
}

impl Verb {
    fn name(self) -> &'static str {
        match self {
            Verb::Mutate => "mutate",
            Verb::Class => "class",
            Verb::Type => "type",
            Verb::Seeds => "seeds",
            Verb::Gfan => "gfan",
            Verb::Dense => "dense",
            Verb::Coverage => "coverage",
            Verb::Hereditary => "hereditary",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Grading,
    Recursion,
}

impl From<Route> for FanRoute {
    fn from(r: Route) -> Self {
        match r {
            Route::Grading => FanRoute::Grading,
            Route::Recursion => FanRoute::Recursion,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ClassError> for Failure {
    fn from(e: ClassError) -> Self {
        match e {
            ClassError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            ClassError::ZeroBudget | ClassError::TooManyLargeEntries { .. } => Failure::Input(e.to_string()),
            ClassError::Infinite(_) => Failure::Internal(e.to_string()),
        }
    }
}

impl From<SeedError> for Failure {
    fn from(e: SeedError) -> Self {
        match e {
            SeedError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            SeedError::Matrix(m) => m.into(),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<FanError> for Failure {
    fn from(e: FanError) -> Self {
        match e {
            FanError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            FanError::Matrix(m) => m.into(),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<DenseError> for Failure {
    fn from(e: DenseError) -> Self {
        match e {
            DenseError::Class(c) => c.into(),
            DenseError::Fan(f) => f.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read_input(opts: &Options) -> Result<(MatrixInput, String), Failure> {
    if let Some(name) = &opts.fixture {
        let b = clusterfan::fixtures::by_name(name).ok_or_else(|| Failure::Input(format!("unknown fixture `{name}`")))?;
        return Ok((MatrixInput::Plain(b), format!("fixture:{name}")));
    }
    if let Some(inline) = &opts.matrix {
        let rows: Vec<&str> = inline.split(';').map(str::trim).filter(|r| !r.is_empty()).collect();
        let n = rows.first().map_or(0, |r| r.split_whitespace().count());
        let text = format!("{n}\n{}\n", rows.join("\n"));
        return Ok((parse_matrix(&text)?, "inline".to_string()));
    }
    let path = opts
        .input
        .as_ref()
        .ok_or_else(|| Failure::Input("no input: give a matrix file, --matrix or --fixture".into()))?;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("reading standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    let parsed = parse_matrix(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((parsed, path.display().to_string()))
}

struct Outcome {
    result: Value,
    text: String,
}

fn one_based(word: &[usize]) -> Result<Vec<usize>, Failure> {
    word.iter()
        .map(|&k| k.checked_sub(1).ok_or_else(|| Failure::Input("directions are 1-based".into())))
        .collect()
}

fn run(verb: Verb, opts: &Options, input: &MatrixInput) -> Result<Outcome, Failure> {
    let b = input.upper();
    let mut text = String::new();
    let result = match verb {
        Verb::Mutate => {
            if opts.k.is_empty() {
                return Err(Failure::Input("mutate needs --k".into()));
            }
            let word = one_based(&opts.k)?;
            let extended = opts.principal || matches!(input, MatrixInput::Extended(_));
            if extended {
                let out = input.extended().mutate_word(&word)?;
                text.push_str(&extended_text(&out));
                json!({"word": word_json(&word), "matrix": clusterfan::io::extended_json(&out)})
            } else {
                let out = b.mutate_word(&word)?;
                text.push_str(&matrix_text(&out));
                json!({"word": word_json(&word), "matrix": clusterfan::io::matrix_json(&out)})
            }
        }
        Verb::Class => {
            let report = explore(b, opts.budget)?;
            let _ = writeln!(text, "verdict: {}", report.verdict.as_str());
            if let Some(raw) = report.class_size_raw {
                let _ = writeln!(text, "class_size_raw: {raw}");
            }
            if let Some(c) = report.class_size_canonical {
                let _ = writeln!(text, "class_size_canonical: {c}");
            }
            if let Some(w) = &report.witness {
                let _ = writeln!(
                    text,
                    "witness: {} reaches weight {} at ({}, {})",
                    word_text(&w.word),
                    w.weight,
                    w.pair.0 + 1,
                    w.pair.1 + 1
                );
            }
            if let Some((_, w)) = &report.acyclic_representative {
                let _ = writeln!(text, "acyclic_representative: {}", word_text(w));
            }
            report.to_json()
        }
        Verb::Type => {
            let report = classify_type(b, opts.budget)?;
            let _ = writeln!(text, "type: {}", report.diagram_type);
            let _ = writeln!(text, "verdict: {}", report.verdict.as_str());
            if let Some(w) = &report.word {
                let _ = writeln!(text, "word: {}", word_text(w));
            }
            report.to_json()
        }
        Verb::Seeds => {
            let e = enumerate_seeds(b, opts.depth, opts.budget)?;
            let _ = writeln!(text, "seeds: {}", e.seeds.len());
            let _ = writeln!(text, "cluster_variables: {}", e.variables.len());
            let _ = writeln!(text, "complete: {}", e.complete);
            for v in &e.variables {
                let _ = writeln!(text, "{v}");
            }
            e.to_json()
        }
        Verb::Gfan => {
            let route: FanRoute = opts.route.map_or(FanRoute::Grading, Into::into);
            let fan = build_fan(b, opts.depth, opts.budget, route)?;
            write_svg(opts, &fan)?;
            let _ = writeln!(text, "rays: {}", fan.rays().len());
            let _ = writeln!(text, "cones: {}", fan.cones().len());
            let _ = writeln!(text, "complete: {}", fan.is_complete());
            for r in fan.rays() {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(text, "ray ({})", cells.join(", "));
            }
            let mut v = fan.to_json();
            v["route"] = json!(route.as_str());
            v
        }
        Verb::Dense => {
            let verdict = general_verdict(b, opts.budget)?;
            let _ = writeln!(text, "status: {}", verdict.status);
            let _ = writeln!(text, "justification: {}", verdict.justification);
            if let Some(t) = &verdict.diagram_type {
                let _ = writeln!(text, "type: {t}");
            }
            let mut v = verdict.to_json();
            if b.rank() == 2 {
                if let Ok(boundary) = rank2_boundary(&-b.get(1, 0), b.get(0, 1)) {
                    v["rank2_boundary"] = boundary.to_json();
                }
            }
            v
        }
        Verb::Coverage => {
            let route: FanRoute = opts.route.map_or(FanRoute::Recursion, Into::into);
            let fan = build_fan(b, opts.depth, opts.budget, route)?;
            write_svg(opts, &fan)?;
            let c = coverage_of(&fan, opts.samples, opts.rng_seed)?;
            let _ = writeln!(text, "fraction: {:.6} +- {:.6}", c.fraction, c.half_width);
            let _ = writeln!(text, "hits: {}/{}", c.hits, c.samples);
            let _ = writeln!(text, "cones: {}", fan.cones().len());
            let mut v = c.to_json();
            v["cones"] = json!(fan.cones().len());
            v["route"] = json!(route.as_str());
            v
        }
        Verb::Hereditary => {
            let tame = hereditary_g_tame(b)?;
            let t = classify_underlying(&diagram_of(b));
            let _ = writeln!(text, "g-tame: {tame}");
            let _ = writeln!(text, "type: {t}");
            json!({"g_tame": tame, "type": t.to_string()})
        }
    };
    Ok(Outcome { result, text })
}

fn write_svg(opts: &Options, fan: &clusterfan::fan::GFan) -> Result<(), Failure> {
    let Some(path) = &opts.svg else {
        return Ok(());
    };
    let svg = fan
        .to_svg()
        .ok_or_else(|| Failure::Input("--svg is only available for rank-2 inputs".into()))?;
    std::fs::write(path, svg).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parameters(verb: Verb, opts: &Options) -> Value {
    let mut p = json!({
        "depth": opts.depth,
        "budget": opts.budget,
    });
    match verb {
        Verb::Mutate => {
            p["k"] = json!(opts.k);
            p["principal"] = json!(opts.principal);
        }
        Verb::Gfan => p["route"] = json!(opts.route.map_or(FanRoute::Grading, Into::into).as_str()),
        Verb::Coverage => {
            p["samples"] = json!(opts.samples);
            p["rng_seed"] = json!(opts.rng_seed);
            p["route"] = json!(opts.route.map_or(FanRoute::Recursion, Into::into).as_str());
        }
        _ => {}
    }
    p
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = read_input(&cli.opts).and_then(|(input, source)| {
        let out = run(cli.verb, &cli.opts, &input)?;
        let report = json!({
            "tool": "clusterfan",
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.verb.name(),
            "parameters": parameters(cli.verb, &cli.opts),
            "input": {"source": source, "matrix": input_json(&input)},
            "result": out.result,
        });
        let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        if let Some(path) = &cli.opts.out {
            std::fs::write(path, &body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        }
        Ok(match cli.opts.format {
            Format::Json => body,
            Format::Text => out.text,
        })
    });
    match outcome {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
