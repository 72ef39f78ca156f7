use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use subdiag::algebra::{BlockPartition, SubAlg};
use subdiag::beurling::{beurling_extract, type_split, wandering};
use subdiag::factor::{
    canonicalize, cholesky_in_a, factor_via_weighted_projection, inner_outer, inner_outer_via_projection, is_outer,
    outer_square_root, pair_distance, riesz_factor,
};
use subdiag::fkdet::fk_det;
use subdiag::io::{algebra_to_json, matrix_to_json, parse_algebra, parse_matrix, parse_shorthand, parse_subspace};
use subdiag::matcore::{determinant, inverse, CMatrix};
use subdiag::report::Report;
use subdiag::suites::{run_suite, select, SuiteConfig};
use subdiag::szego::{szego_l1p, szego_l2, szego_lp_general, GradientMode, SzegoOpts, SzegoResult};
use subdiag::tol;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Input { context: String, source: subdiag::Error },
    #[error(transparent)]
    Core(#[from] subdiag::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_precondition() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "subdiag", version, about = "Verification tools for subdiagonal subalgebras of matrix algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites and emit a JSON report.
    Verify(VerifyArgs),
    /// Fuglede-Kadison determinant of a matrix.
    Det(MatrixArgs),
    /// Factor a positive invertible b as a* a with a invertible in A.
    Factor(MatrixArgs),
    /// Inner-outer factorization f = u h.
    Innerouter(MatrixArgs),
    /// Szegő infimum for a positive weight h.
    Szego(SzegoArgs),
    /// Beurling decomposition of a right-invariant subspace.
    Beurling(BeurlingArgs),
    /// Riesz factorization x = y z for exponents 1/p + 1/q = 1/r.
    Riesz(RieszArgs),
    /// Exploratory experiments.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Clone)]
struct AlgebraArgs {
    /// Matrix size; defaults to the input matrix size, or 3.
    #[arg(long)]
    n: Option<usize>,
    /// Block sizes such as `2,1`; defaults to all ones (upper triangular).
    #[arg(long)]
    partition: Option<String>,
    /// Algebra descriptor file; overrides --partition.
    #[arg(long, value_name = "FILE")]
    algebra: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Also write the JSON output to this file.
    #[arg(long, value_name = "OUT")]
    json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct OptArgs {
    #[arg(long = "opt.restarts", default_value_t = tol::RESTARTS)]
    restarts: usize,
    #[arg(long = "opt.max-iters", default_value_t = tol::MAX_ITERS)]
    max_iters: usize,
    #[arg(long = "opt.gradient", value_enum, default_value_t = Gradient::Analytic)]
    gradient: Gradient,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Gradient {
    Analytic,
    CentralDifference,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Fixed Szegő weight: a matrix file or `diag:..` / `id:n`.
    #[arg(long)]
    h: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Tolerance override KEY=VALUE; keys: opt (Szegő value), grad (gradient).
    #[arg(long, value_name = "KEY=VALUE")]
    tol: Vec<String>,
    #[command(flatten)]
    opt: OptArgs,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Matrix file or shorthand (`diag:1,4`, `id:3`).
    #[arg(long)]
    matrix: String,
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SzegoArgs {
    /// Positive weight: matrix file or shorthand.
    #[arg(long)]
    h: String,
    #[command(flatten)]
    algebra: AlgebraArgs,
    /// Exponent p; without --q this is the L^1 form τ(h|a + d|^p)^(1/p).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "KEY=VALUE")]
    tol: Vec<String>,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct BeurlingArgs {
    #[arg(long, value_name = "FILE")]
    subspace: PathBuf,
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct RieszArgs {
    #[arg(long)]
    matrix: String,
    #[arg(long)]
    p: f64,
    /// Use `inf` for q = ∞.
    #[arg(long)]
    q: f64,
    #[arg(long)]
    r: f64,
    /// Regularize singular inputs as x + ε·1.
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(subcommand)]
    which: Experiment,
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Whether an outer h has an outer square root.
    OuterSquare(MatrixArgs),
}

/// Input bytes read from a file, or the literal shorthand text.
struct Loaded<T> {
    value: T,
    sha256: String,
    source: String,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_matrix(arg: &str) -> CliResult<Loaded<CMatrix>> {
    if let Some(m) = parse_shorthand(arg) {
        let value = m.map_err(|source| CliError::Input { context: arg.to_string(), source })?;
        return Ok(Loaded { value, sha256: sha256(arg.as_bytes()), source: arg.to_string() });
    }
    let text = read(Path::new(arg))?;
    let value = parse_matrix(&text).map_err(|source| CliError::Input { context: arg.to_string(), source })?;
    Ok(Loaded { value, sha256: sha256(text.as_bytes()), source: arg.to_string() })
}

fn input_entry<T>(l: &Loaded<T>) -> Value {
    json!({ "source": l.source, "sha256": l.sha256 })
}

fn resolve_algebra(a: &AlgebraArgs, default_n: Option<usize>) -> CliResult<(SubAlg, Option<Value>)> {
    if let Some(path) = &a.algebra {
        let text = read(path)?;
        let alg =
            parse_algebra(&text).map_err(|source| CliError::Input { context: path.display().to_string(), source })?;
        if let Some(n) = a.n.filter(|n| *n != alg.n()) {
            return Err(CliError::Usage(format!("--n {n} does not match the algebra file (n = {})", alg.n())));
        }
        let entry = json!({ "source": path.display().to_string(), "sha256": sha256(text.as_bytes()) });
        return Ok((alg, Some(entry)));
    }
    let partition = match &a.partition {
        Some(p) => BlockPartition::parse(p).map_err(|e| CliError::Usage(format!("--partition: {e}")))?,
        None => BlockPartition::scalar(a.n.or(default_n).unwrap_or(3)),
    };
    if let Some(n) = a.n.filter(|n| *n != partition.n()) {
        return Err(CliError::Usage(format!("--n {n} does not match partition {partition} (n = {})", partition.n())));
    }
    Ok((SubAlg::block_upper(partition), None))
}

fn check_dim(m: &CMatrix, alg: &SubAlg) -> CliResult<()> {
    if m.dim() != alg.n() {
        return Err(subdiag::Error::DimensionMismatch(alg.n(), m.dim()).into());
    }
    Ok(())
}

fn parse_tol(entries: &[String]) -> CliResult<(Option<f64>, Option<f64>)> {
    let (mut opt, mut grad) = (None, None);
    for e in entries {
        let (k, v) = e.split_once('=').ok_or_else(|| CliError::Usage(format!("--tol {e:?}: expected KEY=VALUE")))?;
        let v: f64 = v.parse().map_err(|_| CliError::Usage(format!("--tol {e:?}: bad number")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Usage(format!("--tol {e:?}: must be positive")));
        }
        match k {
            "opt" => opt = Some(v),
            "grad" => grad = Some(v),
            _ => return Err(CliError::Usage(format!("--tol: unknown key {k:?} (expected opt or grad)"))),
        }
    }
    Ok((opt, grad))
}

fn szego_opts(o: &OptArgs, seed: u64, grad: Option<f64>) -> SzegoOpts {
    SzegoOpts {
        restarts: o.restarts.max(1),
        max_iters: o.max_iters,
        grad_tol: grad.unwrap_or(tol::GRAD_TOL),
        seed,
        gradient: match o.gradient {
            Gradient::Analytic => GradientMode::Analytic,
            Gradient::CentralDifference => GradientMode::CentralDifference,
        },
    }
}

fn emit(value: &Value, out: &OutputArgs) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("json serializes") + "\n";
    if let Some(path) = &out.json {
        std::fs::write(path, &text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    print!("{text}");
    Ok(())
}

fn with_inputs(mut body: Map<String, Value>, inputs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in inputs {
        m.insert(k.to_string(), v);
    }
    body.insert("inputs".into(), Value::Object(m));
    Value::Object(body)
}

fn algebra_inputs(alg: &SubAlg, file: Option<Value>) -> Vec<(&'static str, Value)> {
    let mut v = vec![("algebra", algebra_to_json(alg))];
    if let Some(f) = file {
        v.push(("algebra_file", f));
    }
    v
}

fn rel_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    a.dist(b) / b.frob_norm().max(f64::MIN_POSITIVE)
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<bool> {
    let (alg, file) = resolve_algebra(&a.algebra, None)?;
    let h = a.h.as_deref().map(load_matrix).transpose()?;
    if let Some(h) = &h {
        check_dim(&h.value, &alg)?;
    }
    let (opt_tol, grad) = parse_tol(&a.tol)?;
    let exponents = match (a.p, a.q, a.r) {
        (None, None, None) => None,
        (Some(p), Some(q), Some(r)) => Some((p, q, r)),
        (Some(p), Some(q), None) => Some((p, q, p * q / (p + q))),
        _ => return Err(CliError::Usage("--p, --q (and optionally --r) must be given together".into())),
    };
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let names = select(&a.suite, &alg).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut cfg = SuiteConfig::new(alg.clone(), a.seed, a.trials);
    cfg.h = h.as_ref().map(|l| l.value.clone());
    cfg.exponents = exponents;
    cfg.szego = szego_opts(&a.opt, a.seed, grad);
    cfg.opt_tol = opt_tol;
    let mut suites = Vec::with_capacity(names.len());
    for name in names {
        suites.push(run_suite(name, &cfg)?);
    }
    let report = Report::new(a.seed, algebra_to_json(&alg), suites);
    let overall = report.overall;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    let mut inputs = Map::new();
    if let Some(h) = &h {
        inputs.insert("h".into(), input_entry(h));
    }
    if let Some(f) = file {
        inputs.insert("algebra_file".into(), f);
    }
    if !inputs.is_empty() {
        value["inputs"] = Value::Object(inputs);
    }
    emit(&value, &a.out)?;
    Ok(overall)
}

fn cmd_det(a: &MatrixArgs) -> CliResult<()> {
    let m = load_matrix(&a.matrix)?;
    let n = m.value.dim();
    let delta = fk_det(&m.value);
    let oracle = determinant(&m.value).norm().powf(1.0 / n as f64);
    let mut body = Map::new();
    body.insert("delta".into(), json!(delta));
    body.insert("lu_oracle".into(), json!(oracle));
    body.insert("relative_gap".into(), json!((delta - oracle).abs() / delta.max(oracle).max(f64::MIN_POSITIVE)));
    emit(&with_inputs(body, vec![("matrix", input_entry(&m))]), &a.out)
}

fn cmd_factor(a: &MatrixArgs) -> CliResult<()> {
    let m = load_matrix(&a.matrix)?;
    let (alg, file) = resolve_algebra(&a.algebra, Some(m.value.dim()))?;
    check_dim(&m.value, &alg)?;
    let b = &m.value;
    let binv = inverse(b)?.hermitian_part();
    let weighted = factor_via_weighted_projection(&binv, &alg)?;
    let mut body = Map::new();
    let a_main = if alg.partition().is_some() {
        let chol = cholesky_in_a(b, &alg)?;
        body.insert("method".into(), json!("block_cholesky"));
        body.insert("cross_method_distance".into(), json!(rel_dist(&weighted, &chol)));
        chol
    } else {
        body.insert("method".into(), json!("weighted_projection"));
        weighted
    };
    body.insert("a".into(), matrix_to_json(&a_main));
    body.insert("round_trip_residual".into(), json!(rel_dist(&(&a_main.adjoint() * &a_main), b)));
    body.insert("outside_algebra_residual".into(), json!(alg.residual_outside_a(&a_main)));
    let mut inputs = vec![("matrix", input_entry(&m))];
    inputs.extend(algebra_inputs(&alg, file));
    emit(&with_inputs(body, inputs), &a.out)
}

fn cmd_innerouter(a: &MatrixArgs) -> CliResult<()> {
    let m = load_matrix(&a.matrix)?;
    let (alg, file) = resolve_algebra(&a.algebra, Some(m.value.dim()))?;
    check_dim(&m.value, &alg)?;
    let f = &m.value;
    let n = f.dim();
    let proj = inner_outer_via_projection(f, &alg)?;
    let mut body = Map::new();
    let io = if alg.partition().is_some() {
        let qr = canonicalize(&inner_outer(f, &alg)?, &alg)?;
        body.insert("route_distance".into(), json!(pair_distance(&qr, &proj)));
        qr
    } else {
        proj
    };
    let diag = is_outer(&io.outer_h, &alg)?;
    body.insert("u".into(), matrix_to_json(&io.inner_u));
    body.insert("h".into(), matrix_to_json(&io.outer_h));
    body.insert("reconstruction_residual".into(), json!(rel_dist(&(&io.inner_u * &io.outer_h), f)));
    body.insert("unitarity_residual".into(), json!((&io.inner_u.adjoint() * &io.inner_u).dist(&CMatrix::identity(n))));
    body.insert("outer".into(), json!(diag.outer));
    body.insert("outer_certificate_residual".into(), json!(diag.certificate_residual));
    body.insert("delta".into(), json!(diag.delta));
    body.insert("delta_phi".into(), json!(diag.delta_phi));
    let mut inputs = vec![("matrix", input_entry(&m))];
    inputs.extend(algebra_inputs(&alg, file));
    emit(&with_inputs(body, inputs), &a.out)
}

fn szego_json(r: &SzegoResult) -> Value {
    json!({
        "value": r.value,
        "delta": r.delta,
        "gap": r.value - r.delta,
        "converged": r.converged,
        "iterations": r.iterations,
        "restarts_used": r.restarts_used,
        "grad_norm": r.grad_norm,
        "argmin_a": matrix_to_json(&r.argmin_a),
        "argmin_d": matrix_to_json(&r.argmin_d),
    })
}

fn cmd_szego(a: &SzegoArgs) -> CliResult<()> {
    let h = load_matrix(&a.h)?;
    let (alg, file) = resolve_algebra(&a.algebra, Some(h.value.dim()))?;
    check_dim(&h.value, &alg)?;
    let (_, grad) = parse_tol(&a.tol)?;
    let opts = szego_opts(&a.opt, a.seed, grad);
    let mut body = Map::new();
    match (a.p, a.q) {
        (None, None) => {
            body.insert("form".into(), json!("l2"));
            body.insert("result".into(), szego_json(&szego_l2(&h.value, &alg, &opts)?));
        }
        (Some(p), None) => {
            body.insert("form".into(), json!("l1p"));
            body.insert("p".into(), json!(p));
            body.insert("result".into(), szego_json(&szego_l1p(&h.value, p, &alg, &opts)?));
        }
        (Some(p), Some(q)) => {
            let r = szego_lp_general(&h.value, p, q, &alg, &opts)?;
            body.insert("form".into(), json!("lp"));
            body.insert("p".into(), json!(p));
            body.insert("q".into(), json!(q));
            body.insert("left".into(), szego_json(&r.left));
            body.insert("right".into(), szego_json(&r.right));
        }
        (None, Some(_)) => return Err(CliError::Usage("--q requires --p".into())),
    }
    body.insert("seed".into(), json!(a.seed));
    let mut inputs = vec![("h", input_entry(&h))];
    inputs.extend(algebra_inputs(&alg, file));
    emit(&with_inputs(body, inputs), &a.out)
}

fn cmd_beurling(a: &BeurlingArgs) -> CliResult<()> {
    let text = read(&a.subspace)?;
    let k = parse_subspace(&text)
        .map_err(|source| CliError::Input { context: a.subspace.display().to_string(), source })?;
    let (alg, file) = resolve_algebra(&a.algebra, Some(k.n()))?;
    if k.n() != alg.n() {
        return Err(subdiag::Error::DimensionMismatch(alg.n(), k.n()).into());
    }
    let w = wandering(&k, &alg)?;
    let split = type_split(&k, &alg)?;
    let d = beurling_extract(&k, &alg)?;
    let r = &d.residuals;
    let body = json!({
        "dim": k.dim(),
        "wandering_dim": w.dim(),
        "type1_dim": split.k1.dim(),
        "type2_dim": split.k2.dim(),
        "chain_length": split.chain_length,
        "isometries": d.isometries.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "residuals": {
            "wandering_gram_off_d": r.wandering_gram_off_d,
            "projection_defect": r.projection_defect,
            "modulus_off_d": r.modulus_off_d,
            "cross_products": r.cross_products,
            "reconstruction": r.reconstruction,
        },
    });
    let Value::Object(body) = body else { unreachable!() };
    let mut inputs =
        vec![("subspace", json!({ "source": a.subspace.display().to_string(), "sha256": sha256(text.as_bytes()) }))];
    inputs.extend(algebra_inputs(&alg, file));
    emit(&with_inputs(body, inputs), &a.out)
}

fn cmd_riesz(a: &RieszArgs) -> CliResult<()> {
    let m = load_matrix(&a.matrix)?;
    let (alg, file) = resolve_algebra(&a.algebra, Some(m.value.dim()))?;
    check_dim(&m.value, &alg)?;
    let rp = riesz_factor(&m.value, a.p, a.q, a.r, &alg, a.eps)?;
    let target = match a.eps {
        Some(e) => &m.value + &CMatrix::identity(alg.n()).scale_re(e),
        None => m.value.clone(),
    };
    let q = if a.q.is_infinite() { json!("inf") } else { json!(a.q) };
    let body = json!({
        "p": a.p, "q": q, "r": a.r,
        "y": matrix_to_json(&rp.y),
        "z": matrix_to_json(&rp.z),
        "norm_y_p": rp.norm_y_p,
        "norm_z_q": rp.norm_z_q,
        "norm_x_r": rp.norm_x_r,
        "product_residual": rel_dist(&(&rp.y * &rp.z), &target),
        "regularization": a.eps,
    });
    let Value::Object(body) = body else { unreachable!() };
    let mut inputs = vec![("matrix", input_entry(&m))];
    inputs.extend(algebra_inputs(&alg, file));
    emit(&with_inputs(body, inputs), &a.out)
}

fn cmd_outer_square(a: &MatrixArgs) -> CliResult<()> {
    let m = load_matrix(&a.matrix)?;
    let (alg, file) = resolve_algebra(&a.algebra, Some(m.value.dim()))?;
    check_dim(&m.value, &alg)?;
    let (root, o) = outer_square_root(&m.value, &alg)?;
    let body = json!({
        "experiment": "outer-square",
        "converged": o.converged,
        "iterations": o.iterations,
        "residual": o.residual,
        "root_is_outer": o.root_is_outer,
        "root": matrix_to_json(&root),
    });
    let Value::Object(body) = body else { unreachable!() };
    let mut inputs = vec![("matrix", input_entry(&m))];
    inputs.extend(algebra_inputs(&alg, file));
    emit(&with_inputs(body, inputs), &a.out)
}

fn run(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Verify(a) => return cmd_verify(a),
        Command::Det(a) => cmd_det(a)?,
        Command::Factor(a) => cmd_factor(a)?,
        Command::Innerouter(a) => cmd_innerouter(a)?,
        Command::Szego(a) => cmd_szego(a)?,
        Command::Beurling(a) => cmd_beurling(a)?,
        Command::Riesz(a) => cmd_riesz(a)?,
        Command::Experiment(e) => match &e.which {
            Experiment::OuterSquare(a) => cmd_outer_square(a)?,
        },
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli);
    if std::env::var_os("SUBDIAG_TIMING").is_some() {
        eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    }
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
