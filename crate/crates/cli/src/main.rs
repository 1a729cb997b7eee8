use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mrd::codes::{CodeFile, MooreSpec, RankCode};
use mrd::constructions::{builtin_examples, construct, validate_gamma, ConstructionKind};
use mrd::criteria::{detect_gabidulin, is_mrd_distance, is_mrd_full_gl, is_mrd_minor, is_mrd_subspace, MrdVerdict};
use mrd::gf::{FieldSpec, Fq, Fqm};
use mrd::isometry::{random_isometry, Isometry, IsometryJson};
use mrd::linalg::Matrix;
use mrd::search::{run_search, SearchMode, SearchSpace, Shard};

#[derive(Parser)]
#[command(name = "mrd", version, about = "Construct, verify and search rank-metric codes")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Describe F_{q^m} for a given modulus (default: smallest primitive one).
    Field(FieldArgs),
    /// Build a code from one of the explicit constructions.
    Construct(ConstructArgs),
    /// Run MRD checkers on a code.
    Check(CheckArgs),
    /// Decide whether an MRD code is a generalized Gabidulin code.
    Gabidulin(CodeArg),
    /// Emit the dual code.
    Dual(CodeArg),
    /// Minimum rank distance with a minimal-rank codeword.
    Distance(CodeArg),
    /// Apply a seeded random isometry (or a given one) to a code.
    Isometry(IsometryArgs),
    /// Search systematic generators [I_k | X].
    Search(SearchArgs),
    /// List the built-in reference codes.
    Examples(ExamplesArgs),
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    m: u32,
    /// Comma-separated coefficients c0,…,cm, constant term first.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "4")]
    Four,
    #[value(name = "5")]
    Five,
    Gabidulin,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Base-field parameter for constructions 4 and 5.
    #[arg(long)]
    gamma: Option<u32>,
    /// Report the gamma conditions instead of building the code.
    #[arg(long)]
    validate_only: bool,
    /// Gabidulin only: code length.
    #[arg(long)]
    n: Option<usize>,
    /// Gabidulin only: dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Gabidulin only: Frobenius step, coprime to m.
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Gabidulin only: evaluation points as canonical integers
    /// (default 1, α, …, α^{n-1}).
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<u32>>,
}

#[derive(Args)]
struct CodeArg {
    /// Code file path, or inline JSON.
    #[arg(long)]
    code: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Distance,
    Subspace,
    Minor,
    All,
    FullGl,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long, value_enum, default_value_t = Method::All)]
    method: Method,
}

#[derive(Args)]
struct IsometryArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long, required_unless_present = "isometry")]
    seed: Option<u64>,
    /// Isometry JSON {"lambda", "A", "sigma"} (path or inline) to apply
    /// instead of sampling one.
    #[arg(long, conflicts_with = "seed")]
    isometry: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, required_if_eq("mode", "random"))]
    seed: Option<u64>,
    #[arg(long, required_if_eq("mode", "random"))]
    samples: Option<u64>,
    /// Partition "i/T".
    #[arg(long, default_value = "0/1")]
    shard: String,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 16)]
    max_exemplars: usize,
    /// Extra X block as a JSON array of rows; repeatable.
    #[arg(long)]
    include_candidate: Vec<String>,
}

#[derive(Args)]
struct ExamplesArgs {
    /// Run every checker and exit 1 on any unexpected verdict.
    #[arg(long)]
    verify: bool,
}

/// Failure attributable to the input; maps to exit status 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Output {
    json: Value,
    text: String,
    status: u8,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, status: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
                Format::Text => out.text,
            };
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(body.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
                _ => ExitCode::from(out.status),
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<Output, InputError> {
    match cmd {
        Cmd::Field(a) => field_cmd(&a),
        Cmd::Construct(a) => construct_cmd(&a),
        Cmd::Check(a) => check_cmd(&a),
        Cmd::Gabidulin(a) => gabidulin_cmd(&a),
        Cmd::Dual(a) => dual_cmd(&a),
        Cmd::Distance(a) => distance_cmd(&a),
        Cmd::Isometry(a) => isometry_cmd(&a),
        Cmd::Search(a) => search_cmd(&a),
        Cmd::Examples(a) => examples_cmd(&a),
    }
}

fn build_field(a: &FieldArgs) -> Result<Arc<FieldSpec>, InputError> {
    let f = match &a.modulus {
        Some(c) => FieldSpec::new(a.q, a.m, c)?,
        None => FieldSpec::with_default_modulus(a.q, a.m)?,
    };
    Ok(Arc::new(f))
}

/// Reads a path, or takes the argument itself when it looks like JSON.
fn read_json_arg(arg: &str) -> Result<String, InputError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| InputError(format!("cannot read {arg}: {e}")))
    }
}

fn load_code(arg: &CodeArg) -> Result<RankCode, InputError> {
    let text = read_json_arg(&arg.code)?;
    let file: CodeFile = serde_json::from_str(&text).map_err(|e| InputError(format!("invalid code file: {e}")))?;
    RankCode::from_file(&file).map_err(|e| InputError(format!("invalid code file: {e}")))
}

fn code_json(c: &RankCode) -> Value {
    serde_json::to_value(c.to_file()).expect("serializable")
}

fn code_text(c: &RankCode) -> String {
    let f = c.field();
    let mut s = format!("code over F_{}^{} (modulus {:?}), n = {}, k = {}\n", f.q(), f.m(), f.modulus(), c.n(), c.k());
    for r in c.generator().to_rows() {
        let row: Vec<String> = r.iter().map(|e| e.value().to_string()).collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    s
}

fn field_cmd(a: &FieldArgs) -> Result<Output, InputError> {
    let f = build_field(a)?;
    let json = json!({
        "field": f.description(),
        "order": f.order(),
        "alpha": f.alpha(),
        "alpha_expansion": f.expand(f.alpha()),
    });
    let text = format!("F_{}^{}: order {}, modulus {:?} (constant term first)\n", f.q(), f.m(), f.order(), f.modulus());
    Ok(Output::ok(json, text))
}

fn construct_cmd(a: &ConstructArgs) -> Result<Output, InputError> {
    let f = build_field(&a.field)?;
    let kind = match a.kind {
        Kind::Four => ConstructionKind::Construction4,
        Kind::Five => ConstructionKind::Construction5,
        Kind::Gabidulin => return gabidulin_construct(a, f),
    };
    let gamma = Fq(a.gamma.ok_or_else(|| InputError("--gamma is required for constructions 4 and 5".into()))?);
    if a.validate_only {
        let cond = validate_gamma(kind, &f, gamma);
        let text = format!("gamma = {}: {}\n", cond.gamma.0, cond.summary());
        return Ok(Output::ok(serde_json::to_value(&cond)?, text));
    }
    let code = construct(kind, f, gamma)?;
    Ok(Output::ok(code_json(&code), code_text(&code)))
}

fn gabidulin_construct(a: &ConstructArgs, f: Arc<FieldSpec>) -> Result<Output, InputError> {
    let k = a.k.ok_or_else(|| InputError("--k is required for --kind gabidulin".into()))?;
    let g: Vec<Fqm> = match &a.points {
        Some(p) => p.iter().map(|&v| f.elem(v)).collect::<Result<_, _>>()?,
        None => {
            let n = a.n.ok_or_else(|| InputError("--n or --points is required for --kind gabidulin".into()))?;
            (0..n as i64).map(|i| f.alpha_pow(i)).collect()
        }
    };
    let code = RankCode::gabidulin(f, &MooreSpec { g, k, s: a.s })?;
    Ok(Output::ok(code_json(&code), code_text(&code)))
}

fn verdict_text(v: &MrdVerdict) -> String {
    let method = serde_json::to_value(v.method).expect("serializable");
    format!(
        "{:<9} {} (checked {})\n",
        method.as_str().unwrap_or("?"),
        if v.is_mrd { "MRD" } else { "not MRD" },
        v.checked
    )
}

fn check_cmd(a: &CheckArgs) -> Result<Output, InputError> {
    let code = load_code(&a.code)?;
    let verdicts: Vec<MrdVerdict> = match a.method {
        Method::Distance => vec![is_mrd_distance(&code)?],
        Method::Subspace => vec![is_mrd_subspace(&code)?],
        Method::Minor => vec![is_mrd_minor(&code)?],
        Method::FullGl => vec![is_mrd_full_gl(&code)?],
        Method::All => vec![is_mrd_distance(&code)?, is_mrd_subspace(&code)?, is_mrd_minor(&code)?],
    };
    let agree = verdicts.windows(2).all(|w| w[0].is_mrd == w[1].is_mrd);
    let text: String = verdicts.iter().map(verdict_text).collect::<String>() + &format!("agree: {agree}\n");
    Ok(Output::ok(json!({ "verdicts": verdicts, "agree": agree }), text))
}

fn gabidulin_cmd(a: &CodeArg) -> Result<Output, InputError> {
    let code = load_code(a)?;
    if code.k() >= code.n() {
        return Err(InputError(format!("need k < n, got k = {}, n = {}", code.k(), code.n())));
    }
    let mrd = is_mrd_minor(&code)?;
    if !mrd.is_mrd {
        let text = "not MRD; the Gabidulin criterion does not apply\n".to_string();
        return Ok(Output::ok(json!({ "mrd": mrd, "gabidulin": null }), text));
    }
    let g = detect_gabidulin(&code, true)?;
    let mut text = format!("generalized Gabidulin: {}\n", g.is_generalized_gabidulin);
    for (s, d) in &g.dims {
        let _ = writeln!(text, "  s = {s}: dim(C ∩ C^[s]) = {d}");
    }
    Ok(Output::ok(json!({ "mrd": mrd, "gabidulin": g }), text))
}

fn dual_cmd(a: &CodeArg) -> Result<Output, InputError> {
    let d = load_code(a)?.dual()?;
    Ok(Output::ok(code_json(&d), code_text(&d)))
}

fn distance_cmd(a: &CodeArg) -> Result<Output, InputError> {
    let code = load_code(a)?;
    let (d, msg) = code.min_rank_codeword()?;
    let word = code.encode(&msg)?;
    let json = json!({
        "min_rank_distance": d,
        "singleton_bound": code.singleton_bound(),
        "message": msg,
        "codeword": word,
    });
    let text = format!("minimum rank distance {d} (Singleton bound {})\n", code.singleton_bound());
    Ok(Output::ok(json, text))
}

fn isometry_cmd(a: &IsometryArgs) -> Result<Output, InputError> {
    let code = load_code(&a.code)?;
    let f = code.field();
    let iso = match (&a.isometry, a.seed) {
        (Some(s), _) => {
            let j: IsometryJson =
                serde_json::from_str(&read_json_arg(s)?).map_err(|e| InputError(format!("invalid isometry: {e}")))?;
            Isometry::from_json(f, &j)?
        }
        (None, Some(seed)) => random_isometry(f, code.n(), seed),
        (None, None) => return Err(InputError("--seed or --isometry is required".into())),
    };
    let image = iso.apply(&code)?;
    let json = json!({ "isometry": iso.to_json(), "code": image.to_file() });
    let text = format!("lambda = {}, sigma = {}\n{}", iso.lambda.value(), iso.sigma, code_text(&image));
    Ok(Output::ok(json, text))
}

fn parse_block(f: &FieldSpec, s: &str) -> Result<Matrix<Fqm>, InputError> {
    let rows: Vec<Vec<u32>> = serde_json::from_str(s).map_err(|e| InputError(format!("--include-candidate: {e}")))?;
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|v| f.elem(v)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows)?)
}

fn search_cmd(a: &SearchArgs) -> Result<Output, InputError> {
    let f = build_field(&a.field)?;
    let mut space = match a.mode {
        ModeArg::Exhaustive => SearchSpace::exhaustive(f.clone(), a.n, a.k),
        ModeArg::Random => {
            SearchSpace::random(f.clone(), a.n, a.k, a.seed.unwrap_or_default(), a.samples.unwrap_or_default())
        }
    };
    space.shard = Shard::parse(&a.shard)?;
    space.jobs = a.jobs;
    space.max_exemplars = a.max_exemplars;
    space.extra_candidates = a.include_candidate.iter().map(|s| parse_block(&f, s)).collect::<Result<_, _>>()?;
    let r = run_search(&space)?;

    let c = r.counts;
    let mut text = match r.mode {
        SearchMode::Exhaustive => "mode: exhaustive\n".to_string(),
        SearchMode::Random { seed, samples } => format!("mode: random (seed {seed}, {samples} samples)\n"),
    };
    let _ = writeln!(text, "shard: {}/{}, candidate space {}", r.shard.index, r.shard.total, r.cell_count);
    let _ = writeln!(text, "candidates_scanned {:>12}", c.candidates_scanned);
    let _ = writeln!(text, "non_mrd            {:>12}", c.non_mrd);
    let _ = writeln!(text, "mrd_gabidulin      {:>12}", c.mrd_gabidulin);
    let _ = writeln!(text, "mrd_non_gabidulin  {:>12}", c.mrd_non_gabidulin);
    for e in &r.exemplars {
        let _ = writeln!(text, "exemplar #{}: {:?}", e.index, e.code.generator);
    }
    for inc in &r.included {
        let _ = writeln!(text, "included {:?}: {}", inc.x, serde_json::to_value(inc.classification)?);
    }
    let _ = writeln!(text, "elapsed {:.1} ms on {} threads", r.timing.elapsed_ms, r.timing.jobs);
    Ok(Output::ok(serde_json::to_value(&r)?, text))
}

fn examples_cmd(a: &ExamplesArgs) -> Result<Output, InputError> {
    let mut entries = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for ex in builtin_examples()? {
        let mut entry = json!({
            "name": ex.name,
            "kind": ex.kind,
            "gamma": ex.gamma,
            "code": ex.code.to_file(),
            "expected_mrd": ex.expected_mrd,
            "expected_gabidulin": ex.expected_gabidulin,
        });
        let _ = write!(text, "{:<12}", ex.name);
        if a.verify {
            let verdicts = [is_mrd_distance(&ex.code)?, is_mrd_subspace(&ex.code)?, is_mrd_minor(&ex.code)?];
            let mrd_ok = verdicts.iter().all(|v| v.is_mrd == ex.expected_mrd);
            let gab = if verdicts[2].is_mrd { Some(detect_gabidulin(&ex.code, true)?) } else { None };
            let gab_ok = gab.as_ref().map(|g| g.is_generalized_gabidulin) == Some(ex.expected_gabidulin);
            let ok = mrd_ok && gab_ok;
            all_ok &= ok;
            entry["verdicts"] = json!(verdicts);
            entry["gabidulin"] = json!(gab);
            entry["matches_expected"] = json!(ok);
            let _ = write!(text, " {}", if ok { "ok" } else { "MISMATCH" });
        }
        text.push('\n');
        entries.push(entry);
    }
    let mut out = Output::ok(json!({ "examples": entries }), text);
    if a.verify {
        out.json["all_match"] = json!(all_ok);
        if !all_ok {
            out.status = 1;
        }
    }
    Ok(out)
}
