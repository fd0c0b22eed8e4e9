use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gkplat_core::code::{symplectic_defect, GkpCode};
use gkplat_core::constructions::{self, registry, GlueSpec, QubitStabilizerCode};
use gkplat_core::decoder::{self, DecoderKind, Syndrome, DEFAULT_TRUNC_K};
use gkplat_core::io;
use gkplat_core::lattice::{EnumOptions, GeneratorMatrix};
use gkplat_core::sim::{self, DecoderSpec};
use gkplat_core::theta;
use gkplat_core::Error;

/// Construct, analyze, decode and simulate GKP lattice codes.
#[derive(Parser)]
#[command(name = "gkplat", version)]
struct Cli {
    /// Worker threads (GKPLAT_THREADS takes precedence).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print code parameters and bound checks.
    Analyze(AnalyzeArgs),
    /// Build a code and write it as JSON.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
    },
    /// Decode one syndrome (or the syndrome of a given error).
    Decode(DecodeArgs),
    /// Monte-Carlo logical error rates over a σ̃ grid.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Registry name or code file.
    code: String,
    #[arg(long)]
    distance: bool,
    /// Theta series up to this squared norm.
    #[arg(long, value_name = "CUTOFF")]
    theta: Option<f64>,
    #[arg(long)]
    bounds: bool,
    #[arg(long)]
    standard_form: bool,
    #[arg(long)]
    css: bool,
    /// Test symplectic equivalence with another code.
    #[arg(long, value_name = "OTHER")]
    equivalent: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum BuildKind {
    /// `√λ` times a self-dual seed.
    Scaled {
        /// Registry seed (square, hexagonal, d4) or code file.
        #[arg(long = "seed")]
        seed_lattice: String,
        #[arg(long)]
        lambda: u64,
        /// Allow odd λ (qudit codes).
        #[arg(long)]
        qudit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concatenation of a qubit stabilizer code with the square GKP code.
    Concat {
        /// Registry name or `qubit-stab/1` file.
        #[arg(long)]
        qubit: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct sum of components glued by vectors of the dual.
    Glue {
        /// Component codes, in order.
        #[arg(long = "component", required = true)]
        components: Vec<String>,
        /// Glue vector in qqpp coordinates of the direct sum (comma-separated).
        #[arg(long = "glue", allow_hyphen_values = true)]
        glue: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tensor product with an integral lattice.
    Tensor {
        #[arg(long)]
        left: String,
        /// Generator of the second factor as a JSON matrix, e.g. "[[2]]".
        #[arg(long)]
        right: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Med,
    Babai,
    Mld,
    TwoStep,
}

impl From<DecoderArg> for DecoderKind {
    fn from(d: DecoderArg) -> Self {
        match d {
            DecoderArg::Med => DecoderKind::Med,
            DecoderArg::Babai => DecoderKind::Babai,
            DecoderArg::Mld => DecoderKind::Mld,
            DecoderArg::TwoStep => DecoderKind::TwoStep,
        }
    }
}

#[derive(Args)]
struct DecodeArgs {
    code: String,
    /// Syndrome in [0,1)^{2n}, comma-separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "error", required_unless_present = "error")]
    syndrome: Option<String>,
    /// A displacement whose syndrome is decoded, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    error: Option<String>,
    #[arg(long, value_enum, default_value = "med")]
    decoder: DecoderArg,
    /// Noise level σ̃ for the likelihood decoders.
    #[arg(long)]
    sigma: Option<f64>,
    /// MLD truncation factor.
    #[arg(long, default_value_t = DEFAULT_TRUNC_K)]
    trunc_k: f64,
}

#[derive(Args)]
struct SimulateArgs {
    code: String,
    #[arg(long, value_enum, default_value = "med")]
    decoder: DecoderArg,
    /// `a:b:steps`, or a single value.
    #[arg(long, default_value = "0.1")]
    sigma_grid: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Fail when more trials than this end in a decoder error.
    #[arg(long)]
    max_decoder_errors: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 3 for enumeration caps and decoder failures, 2 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(
            Error::RadiusTooLarge { .. }
            | Error::CutoffInsufficient { .. }
            | Error::GroupTooLarge(_)
            | Error::DegenerateSigma(_),
        ) => 3,
        _ if e.chain().any(|c| c.downcast_ref::<DecoderBudget>().is_some()) => 3,
        _ => 2,
    }
}

/// Print a line to stdout; a closed pipe (`gkplat … | head`) is not an error.
fn emit(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

#[derive(Debug, thiserror::Error)]
#[error("decoder error budget exceeded")]
struct DecoderBudget;

fn run(cli: Cli) -> anyhow::Result<()> {
    let policy = sim::policy_from_env(cli.threads);
    if let gkplat_core::par::ExecPolicy::Parallel { threads: Some(t) } = policy {
        gkplat_core::par::init_global_pool(t);
    }
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Build { kind } => build(kind),
        Command::Decode(a) => decode(a),
        Command::Simulate(a) => simulate(a, policy),
    }
}

/// Registry names win over files of the same name.
fn resolve_code(spec: &str) -> anyhow::Result<GkpCode> {
    if registry::is_code_name(spec) {
        if Path::new(spec).exists() {
            eprintln!("warning: {spec:?} names both a built-in code and a file; using the built-in code");
        }
        return Ok(registry::code(spec)?);
    }
    io::read_code(Path::new(spec)).with_context(|| format!("reading code {spec:?}"))
}

fn resolve_qubit(spec: &str) -> anyhow::Result<QubitStabilizerCode> {
    if registry::QUBIT_NAMES.contains(&spec) {
        return Ok(registry::qubit_code(spec)?);
    }
    io::read_qubit_code(Path::new(spec)).with_context(|| format!("reading qubit code {spec:?}"))
}

fn resolve_seed(spec: &str) -> anyhow::Result<GeneratorMatrix> {
    if registry::SEED_NAMES.contains(&spec) {
        return Ok(registry::seed(spec)?);
    }
    Ok(io::read_code(Path::new(spec)).with_context(|| format!("reading seed {spec:?}"))?.generator().clone())
}

fn parse_vector(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| anyhow!("invalid number {x:?}: {e}")))
        .collect()
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.8}")).collect();
    format!("({})", parts.join(", "))
}

fn analyze(a: AnalyzeArgs) -> anyhow::Result<()> {
    let code = resolve_code(&a.code)?;
    let opts = EnumOptions::default();
    let mut report = serde_json::Map::new();
    let mut text = Vec::new();
    text.push(format!("code {}: n = {}, d = {}, k = {:.6}", code.name(), code.n_modes(), code.logical_dim(), code.k()));
    report.insert("name".into(), code.name().into());
    report.insert("n_modes".into(), code.n_modes().into());
    report.insert("logical_dim".into(), code.logical_dim().into());
    report.insert("k".into(), code.k().into());

    if a.distance {
        match code.distance_with(&opts) {
            Ok(d) => {
                text.push(format!("distance Δ = {:.8}  witness {}", d.delta, fmt_vec(&d.witness)));
                report.insert("distance".into(), d.delta.into());
            }
            Err(Error::TrivialCode) => {
                text.push("distance: none (d = 1, no logical operators)".into());
                report.insert("distance".into(), serde_json::Value::Null);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(cutoff) = a.theta {
        let series = theta::theta_series_with(code.generator(), cutoff, &opts)?;
        text.push(format!("theta series up to {cutoff}:"));
        for t in &series.terms {
            text.push(format!("  {:.8}  {}", t.delta, t.count));
        }
        report.insert("theta".into(), serde_json::to_value(&series.terms)?);
    }
    if a.bounds {
        let b = code.bounds_report(None)?;
        text.push(format!("bounds ({}):", if b.all_hold() { "all hold" } else { "VIOLATED" }));
        for c in &b.checks {
            if c.vacuous {
                text.push(format!("  {:<26} vacuous", c.name));
            } else {
                let rel = if c.equality { "=" } else { "≤" };
                let status = if c.holds { "ok" } else { "FAIL" };
                text.push(format!("  {:<26} {:.8} {rel} {:.8}  slack {:.3e}  {status}", c.name, c.lhs, c.rhs, c.slack()));
            }
        }
        report.insert("bounds".into(), serde_json::to_value(&b)?);
    }
    if a.standard_form {
        let sf = code.standard_form()?;
        text.push(format!("standard form D = {:?}", sf.d));
        report.insert("standard_form".into(), serde_json::json!({ "d": sf.d, "basis": sf.basis.rows() }));
    }
    if a.css {
        match code.css_split() {
            Ok(Some(_)) => {
                let (dq, dp) = code.css_distances()?;
                text.push(format!("CSS: Δ_q = {dq:.8}, Δ_p = {dp:.8}"));
                report.insert("css".into(), serde_json::json!({ "delta_q": dq, "delta_p": dp }));
            }
            Ok(None) => {
                text.push("not CSS".into());
                report.insert("css".into(), serde_json::Value::Null);
            }
            Err(Error::NoExactForm) => {
                text.push("CSS: undetermined (no exact form)".into());
                report.insert("css".into(), serde_json::Value::Null);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(other) = &a.equivalent {
        let other = resolve_code(other)?;
        let (d1, d2) = (code.standard_form()?.d, other.standard_form()?.d);
        match code.symplectically_equivalent(&other)? {
            Some(eq) => {
                let d: Vec<String> = eq.d.iter().map(u64::to_string).collect();
                text.push(format!("equivalent, D=({})", d.join(",")));
                text.push(format!("R = {:.8}", eq.r));
                text.push(format!("‖RᵀJR − J‖ = {:.3e}", symplectic_defect(&eq.r)));
                let rows: Vec<Vec<f64>> = eq.r.row_iter().map(|r| r.iter().copied().collect()).collect();
                report.insert("equivalent".into(), serde_json::json!({ "equivalent": true, "d": eq.d, "r": rows }));
            }
            None => {
                text.push(format!("inequivalent, D = {d1:?} vs {d2:?}"));
                report.insert("equivalent".into(), serde_json::json!({ "equivalent": false, "d": [d1, d2] }));
            }
        }
    }
    if a.json {
        emit(&serde_json::to_string_pretty(&report)?)?;
    } else {
        emit(&text.join("\n"))?;
    }
    Ok(())
}

fn build(kind: BuildKind) -> anyhow::Result<()> {
    let (code, out) = match kind {
        BuildKind::Scaled { seed_lattice, lambda, qudit, out } => {
            let seed = resolve_seed(&seed_lattice)?;
            let name = format!("{seed_lattice}-x{lambda}");
            (constructions::scaled_code(name, &seed, lambda, qudit)?, out)
        }
        BuildKind::Concat { qubit, out } => {
            let q = resolve_qubit(&qubit)?;
            let code = if qubit == "surface17" {
                constructions::construction_a_with_order(&q, &registry::surface17_completion_order())?
            } else {
                constructions::construction_a(&q)?
            };
            (code, out)
        }
        BuildKind::Glue { components, glue, out } => {
            let codes = components.iter().map(|c| resolve_code(c)).collect::<anyhow::Result<Vec<_>>>()?;
            let vectors = glue.iter().map(|g| parse_vector(g)).collect::<anyhow::Result<Vec<_>>>()?;
            let spec = GlueSpec::new(&codes, vectors)?;
            (constructions::glue(&spec)?.with_name("glued"), out)
        }
        BuildKind::Tensor { left, right, out } => {
            let left_code = resolve_code(&left)?;
            let rows: Vec<Vec<f64>> =
                serde_json::from_str(&right).with_context(|| format!("parsing matrix {right:?}"))?;
            let m2 = GeneratorMatrix::from_rows(&rows)?;
            (constructions::tensor_code(&left_code, &m2)?, out)
        }
    };
    let exact = code.generator().exact().map(|e| e.c);
    emit(&format!(
        "{}: n = {}, d = {}, k = {:.6}{}",
        code.name(),
        code.n_modes(),
        code.logical_dim(),
        code.k(),
        exact.map_or(String::new(), |c| format!(", exact form c = {c}"))
    ))?;
    match out {
        Some(path) => io::write_code(&path, &code).with_context(|| format!("writing {}", path.display()))?,
        None => emit(&serde_json::to_string_pretty(&io::CodeFile::from_code(&code))?)?,
    }
    Ok(())
}

fn decode(a: DecodeArgs) -> anyhow::Result<()> {
    let code = resolve_code(&a.code)?;
    let s = match (&a.syndrome, &a.error) {
        (Some(s), _) => Syndrome(parse_vector(s)?),
        (None, Some(e)) => decoder::syndrome(&code, &parse_vector(e)?)?,
        (None, None) => bail!("one of --syndrome or --error is required"),
    };
    let opts = EnumOptions::default();
    let need_sigma = || a.sigma.ok_or_else(|| anyhow!("--sigma is required for this decoder"));
    let out = match DecoderKind::from(a.decoder) {
        DecoderKind::Med => decoder::decode_med(&code, &s, &opts)?,
        DecoderKind::Babai => decoder::decode_babai(&code, &s, &code.dual().rounding_reduced(0.99)?)?,
        DecoderKind::Mld => decoder::decode_mld(&code, &s, need_sigma()?, a.trunc_k, &opts)?,
        DecoderKind::TwoStep => {
            let q = code.origin().ok_or_else(|| anyhow!("two-step decoding needs a concatenated code"))?;
            decoder::decode_two_step(&code, q, &s, need_sigma()?)?
        }
    };
    let mut v = serde_json::to_value(&out)?;
    // With a known error, also classify the residual e − η̄.
    if let Some(e) = &a.error {
        let residual: Vec<f64> = parse_vector(e)?.iter().zip(&out.correction).map(|(x, y)| x - y).collect();
        let label = code.coset_label(&residual)?;
        v["logical_failure"] = label.iter().any(|&x| x != 0).into();
        v["residual_label"] = serde_json::to_value(label)?;
    }
    emit(&serde_json::to_string_pretty(&v)?)?;
    Ok(())
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![x.trim().parse()?]),
        [a, b, n] => Ok(sim::sigma_grid(a.trim().parse()?, b.trim().parse()?, n.trim().parse()?)?),
        _ => bail!("sigma grid must be `a:b:steps` or a single value, got {s:?}"),
    }
}

fn simulate(a: SimulateArgs, policy: gkplat_core::par::ExecPolicy) -> anyhow::Result<()> {
    let code = resolve_code(&a.code)?;
    let spec = DecoderSpec::for_code(a.decoder.into(), &code)?;
    let grid = parse_grid(&a.sigma_grid)?;
    let report = sim::run_grid(&code, &spec, &grid, a.trials, a.seed, policy)?;
    let csv = report.to_csv()?;
    match &a.out {
        Some(path) => std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
        None => emit(csv.trim_end())?,
    }
    eprintln!("{} points in {:.2}s", report.points.len(), report.wall_time);
    if let Some(budget) = a.max_decoder_errors {
        if let Some(p) = report.points.iter().find(|p| p.decoder_error_count > budget) {
            return Err(anyhow::Error::new(DecoderBudget).context(format!(
                "{} decoder errors at σ̃ = {} exceed the budget of {budget}",
                p.decoder_error_count, p.sigma_tilde
            )));
        }
    }
    Ok(())
}
