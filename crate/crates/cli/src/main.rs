//! `growth` — ball enumeration, canonical codecs, and bound tables.
//!
//! Exit codes: 0 ok, 2 parse error, 3 resource guard, 4 internal
//! invariant violation.

mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use growth_core::code::{
    canonical_representative, code_space_size, decode, growth_bound_entropy_residual, ln_big,
    verify_code, wr_bound, VertexLabeling,
};
use growth_core::graph::{
    canonical_derivation_traced, canonical_key, decode_derivation, encode_derivation,
    enumerate_graph_ball, Derivation, GraphError, LabeledGraph, Split,
};
use growth_core::group::Group;
use growth_core::raag::{
    build_complement, enumerate_ball, growth_bound, DefiningGraph, RaagError, Word,
};
use growth_core::tri::{build_labeled_dual, enumerate_flip_ball, GluingSpec, TriError};

use report::{Format, Report, Row};

#[derive(Parser)]
#[command(name = "growth", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Word balls and canonical codes in a graph group.
    Raag {
        #[command(subcommand)]
        sub: RaagCmd,
    },
    /// Split balls and derivation codecs on labeled trivalent graphs.
    Graph {
        #[command(subcommand)]
        sub: GraphCmd,
    },
    /// Flip balls of punctured-surface triangulations.
    Tri {
        #[command(subcommand)]
        sub: TriCmd,
    },
    /// Growth-bound and code-space tables.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input file path.
    #[arg(long)]
    input: String,
    /// Ball radius.
    #[arg(long, default_value_t = 0)]
    radius: usize,
    /// Cap on enumerated elements or classes.
    #[arg(long, default_value_t = 10_000_000)]
    guard_elements: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Seed for the shuffled half-edge orders (where applicable).
    #[arg(long)]
    seed: Option<u64>,
    /// Coefficient group, e.g. trivial, free:2, cyclic:3. Validated
    /// against the input file when that carries a group.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Subcommand)]
enum RaagCmd {
    /// Exact ball sizes with growth bound and code-space comparison.
    Ball(CommonArgs),
    /// Canonical representative, code, and decode roundtrip for a word.
    Code {
        #[command(flatten)]
        common: CommonArgs,
        /// Word, e.g. "a b' c" (trailing apostrophe = inverse).
        word: String,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Split ball sizes against 4^(5n-5+3r).
    Ball(CommonArgs),
    /// Canonicalize a derivation, encode it, decode it back.
    CodecRoundtrip {
        #[command(flatten)]
        common: CommonArgs,
        /// Derivation file: JSON list of {edge, kind, config}.
        #[arg(long)]
        derivation: String,
    },
}

#[derive(Subcommand)]
enum TriCmd {
    /// Flip ball sizes, with the dual split ball as upper bound.
    Ball(CommonArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Max degree of the complementary graph.
    #[arg(long)]
    c0: usize,
    /// Generator count for the code-space table.
    #[arg(long)]
    n: Option<usize>,
    /// Budget for the code-space table.
    #[arg(long, default_value_t = 0)]
    radius: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

enum CliError {
    Parse(String),
    Guard(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Guard(_) => "guard",
            CliError::Internal(_) => "internal-invariant",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Guard(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<RaagError> for CliError {
    fn from(e: RaagError) -> Self {
        match e {
            RaagError::ResourceGuard(_) => CliError::Guard(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::ResourceGuard(_) => CliError::Guard(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<TriError> for CliError {
    fn from(e: TriError) -> Self {
        match e {
            TriError::ResourceGuard(_) => CliError::Guard(e.to_string()),
            TriError::Graph(GraphError::ResourceGuard(g)) => {
                CliError::Guard(GraphError::ResourceGuard(g).to_string())
            }
            _ => CliError::Parse(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::Raag { sub } => match sub {
            RaagCmd::Ball(common) => cmd_raag_ball(&common),
            RaagCmd::Code { common, word } => cmd_raag_code(&common, &word),
        },
        Command::Graph { sub } => match sub {
            GraphCmd::Ball(common) => cmd_graph_ball(&common),
            GraphCmd::CodecRoundtrip { common, derivation } => {
                cmd_codec_roundtrip(&common, &derivation)
            }
        },
        Command::Tri { sub } => match sub {
            TriCmd::Ball(common) => cmd_tri_ball(&common),
        },
        Command::Bounds(args) => cmd_bounds(&args),
    };
    match result {
        Ok((report, format)) => {
            if !report.all_checks_pass() {
                eprintln!("error[internal-invariant]: a report check failed");
                print!("{}", report.render(format));
                return ExitCode::from(4);
            }
            print!("{}", report.render(format));
            eprintln!("# wall-clock: {:.1?}", started.elapsed());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {path}: {e}")))
}

fn parse_group_flag(text: &str) -> Result<Group, CliError> {
    let lower = text.to_lowercase();
    if lower == "trivial" {
        return Ok(Group::Trivial);
    }
    if let Some(rank) = lower.strip_prefix("free:") {
        let rank = rank
            .parse()
            .map_err(|_| CliError::Parse(format!("bad free rank in `{text}`")))?;
        return Ok(Group::Free { rank });
    }
    if let Some(order) = lower.strip_prefix("cyclic:") {
        let order: u32 = order
            .parse()
            .map_err(|_| CliError::Parse(format!("bad cyclic order in `{text}`")))?;
        if order == 0 {
            return Err(CliError::Parse("cyclic order must be >= 1".into()));
        }
        return Ok(Group::Cyclic { order });
    }
    Err(CliError::Parse(format!(
        "unknown group `{text}` (expected trivial, free:m, cyclic:k)"
    )))
}

fn load_labeled_graph(common: &CommonArgs) -> Result<LabeledGraph, CliError> {
    let text = read_file(&common.input)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("bad JSON in {}: {e}", common.input)))?;
    let graph = LabeledGraph::from_json(&value)?;
    if let Some(flag) = &common.group {
        let expected = parse_group_flag(flag)?;
        if graph.group != expected {
            return Err(CliError::Parse(format!(
                "--group {flag} disagrees with the group stored in {}",
                common.input
            )));
        }
    }
    Ok(graph)
}

fn cmd_raag_ball(common: &CommonArgs) -> Result<(Report, Format), CliError> {
    let theta = DefiningGraph::parse_json(&read_file(&common.input)?)?;
    let ball = enumerate_ball(&theta, common.radius, common.guard_elements, false)?;
    let mut report = Report::new(
        "raag ball",
        serde_json::json!({
            "input": common.input,
            "n": theta.n,
            "c0": ball.report.c0,
            "radius": common.radius,
            "growth_bound": ball.report.growth_bound,
        }),
    );
    let mut embedding_ok = true;
    let mut detail = Vec::new();
    for (r, &size) in ball.report.sizes.iter().enumerate() {
        let code_space = code_space_size(theta.n, ball.report.c0, r);
        let ok = BigUint::from(size) <= code_space;
        embedding_ok &= ok;
        detail.push(format!("r={r}: {size} <= {code_space}"));
        report.rows.push(Row {
            radius: r,
            size: size.to_string(),
            log_ratio: ball.report.log_ratios[r],
            bound: Some(ball.report.growth_bound),
            bound_exact: Some(code_space.to_string()),
        });
    }
    report.check("ball_le_code_space", embedding_ok, detail.join("; "));
    Ok((report, common.format.into()))
}

fn cmd_raag_code(common: &CommonArgs, word_text: &str) -> Result<(Report, Format), CliError> {
    let theta = DefiningGraph::parse_json(&read_file(&common.input)?)?;
    let word = Word::parse(word_text, &theta)?;
    let cbar = build_complement(&theta, common.seed);
    let l0 = VertexLabeling::initial(theta.n);
    let form = canonical_representative(&word, &cbar, &theta, &l0)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let verified = verify_code(&form.code);
    let decoded = decode(&form.code, &cbar, &l0).map_err(|e| CliError::Internal(e.to_string()))?;
    let roundtrip = decoded == form.word;
    let mut report = Report::new(
        "raag code",
        serde_json::json!({
            "input": common.input,
            "word": word_text,
            "n": theta.n,
            "c0": cbar.c0,
            "seed": common.seed,
        }),
    );
    report.data = serde_json::json!({
        "canonical_word": form.word.display(&theta),
        "code": form.code.entries,
        "code_cap": form.code.cap(),
    });
    report.check("verify_code", verified, "monotone and in range".into());
    report.check("decode_roundtrip", roundtrip, "decode(code) == canonical word".into());
    Ok((report, common.format.into()))
}

fn cmd_graph_ball(common: &CommonArgs) -> Result<(Report, Format), CliError> {
    let graph = load_labeled_graph(common)?;
    let ball = enumerate_graph_ball(&graph, common.radius, common.guard_elements, false)?;
    let n = ball.report.rank;
    let mut report = Report::new(
        "graph ball",
        serde_json::json!({
            "input": common.input,
            "rank": n,
            "radius": common.radius,
            "limit_3log4": ball.report.limit,
        }),
    );
    let mut ok = true;
    for (r, &size) in ball.report.sizes.iter().enumerate() {
        let bound = BigUint::from(4u32).pow((5 * n - 5 + 3 * r) as u32);
        ok &= BigUint::from(size) <= bound;
        report.rows.push(Row {
            radius: r,
            size: size.to_string(),
            log_ratio: ball.report.log_ratios[r],
            bound: Some(ball.report.bound_logs[r]),
            bound_exact: Some(bound.to_string()),
        });
    }
    report.check("ball_le_4pow", ok, "#B_r <= 4^(5n-5+3r) for every enumerated r".into());
    Ok((report, common.format.into()))
}

fn cmd_codec_roundtrip(
    common: &CommonArgs,
    derivation_path: &str,
) -> Result<(Report, Format), CliError> {
    let graph = load_labeled_graph(common)?;
    let splits: Vec<Split> = serde_json::from_str(&read_file(derivation_path)?)
        .map_err(|e| CliError::Parse(format!("bad derivation JSON: {e}")))?;
    let d = Derivation::new(graph.clone(), splits);
    let result = d.result()?;
    let canon = canonical_derivation_traced(&d)?;
    let budget = d.len();
    let pair = encode_derivation(&canon.derivation, budget)?;
    let decoded = decode_derivation(&pair, &graph, budget)?;
    let class_preserved = canonical_key(&canon.result)? == canonical_key(&result)?;
    let roundtrip = decoded == canon.derivation;
    let mut report = Report::new(
        "graph codec-roundtrip",
        serde_json::json!({
            "input": common.input,
            "derivation": derivation_path,
            "length": d.len(),
        }),
    );
    report.data = serde_json::json!({
        "canonical_splits": canon.derivation.splits,
        "phi": pair.phi,
        "psi": pair.psi,
    });
    report.check(
        "canonical_preserves_class",
        class_preserved,
        "canonical derivation reaches the same class".into(),
    );
    report.check("decode_inverts_encode", roundtrip, "decode(encode(d)) == d".into());
    Ok((report, common.format.into()))
}

fn cmd_tri_ball(common: &CommonArgs) -> Result<(Report, Format), CliError> {
    let spec: GluingSpec = serde_json::from_str(&read_file(&common.input)?)
        .map_err(|e| CliError::Parse(format!("bad gluing JSON: {e}")))?;
    let t0 = build_labeled_dual(&spec)?;
    let ball = enumerate_flip_ball(&t0, common.radius, common.guard_elements)?;
    let n = ball.report.dual_rank;
    let mut report = Report::new(
        "tri ball",
        serde_json::json!({
            "input": common.input,
            "genus": spec.genus,
            "punctures": spec.punctures,
            "n": spec.n,
            "dual_rank": n,
            "radius": common.radius,
            "limit_3log4": ball.report.limit,
        }),
    );
    for (r, &size) in ball.report.sizes.iter().enumerate() {
        let bound = BigUint::from(4u32).pow((5 * n - 5 + 3 * r) as u32);
        report.rows.push(Row {
            radius: r,
            size: size.to_string(),
            log_ratio: ball.report.log_ratios[r],
            bound: Some(ball.report.bound_logs[r]),
            bound_exact: Some(bound.to_string()),
        });
    }
    // Cross-check against the dual split ball on small radii; free-group
    // label growth makes the dual ball much larger, so cap the radius.
    let check_radius = common.radius.min(3);
    let dual = enumerate_graph_ball(&t0.graph, check_radius, common.guard_elements, false)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for r in 0..=check_radius {
        ok &= ball.report.sizes[r] <= dual.report.sizes[r];
        detail.push(format!("r={r}: {} <= {}", ball.report.sizes[r], dual.report.sizes[r]));
    }
    let mut containment = true;
    for (tri, _) in ball.representatives.iter().filter(|(_, r)| *r <= check_radius) {
        containment &= dual.keys.contains(&canonical_key(&tri.graph)?);
    }
    report.check("flip_ball_le_dual_ball", ok, detail.join("; "));
    report.check(
        "dual_keys_contained",
        containment,
        format!("dual classes of flip ball lie in the split ball up to r={check_radius}"),
    );
    report.check(
        "well_labeled",
        ball.representatives.iter().all(|(t, _)| t.is_well_labeled()),
        "every enumerated triangulation is well-labeled".into(),
    );
    Ok((report, common.format.into()))
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(Report, Format), CliError> {
    let c0 = args.c0;
    let mut report = Report::new(
        "bounds",
        serde_json::json!({
            "c0": c0,
            "n": args.n,
            "radius": args.radius,
            "growth_bound": growth_bound(c0),
        }),
    );
    let residual = growth_bound_entropy_residual(c0);
    if let Some(r) = residual {
        report.check(
            "entropy_identity",
            r < 1e-12,
            format!("|log2+(c0+1)H(1/(c0+1)) - closed form| = {r:.3e}"),
        );
        let c = c0 as f64;
        let entropy_rate = 2f64.ln() + (c + 1.0).ln() + c * (1.0 + 1.0 / c).ln();
        report.check(
            "entropy_le_growth_bound",
            entropy_rate <= growth_bound(c0) + 1e-12,
            format!("{entropy_rate:.6} <= {:.6}", growth_bound(c0)),
        );
    }
    if let Some(n) = args.n {
        for r in 0..=args.radius {
            let (exact, ratio) = wr_bound(n, c0, r);
            let space = code_space_size(n, c0, r);
            report.rows.push(Row {
                radius: r,
                size: space.to_string(),
                log_ratio: if r == 0 { None } else { Some(ln_big(&space) / r as f64) },
                bound: Some(ratio),
                bound_exact: Some(exact.to_string()),
            });
        }
        report.check(
            "code_space_le_closed_form",
            report.rows.iter().all(|row| {
                let space: BigUint = row.size.parse().unwrap();
                let bound: BigUint = row.bound_exact.as_ref().unwrap().parse().unwrap();
                space <= bound
            }),
            "#W_R <= 2^R binom(n+R(c0+1), R)".into(),
        );
    }
    Ok((report, args.format.into()))
}
