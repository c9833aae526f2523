use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use c2span::cofinite::{cofinite_report, verify_voa_span, CofiniteReport, VoaSpanReport};
use c2span::modes::borcherds_residual;
use c2span::scalar::{fmt_scalar, parse_scalar};
use c2span::spanset::{verify_module_span, ModuleSpanReport};
use c2span::virasoro::ModelDescriptor;
use c2span::zhu::an_dim_estimate;
use c2span::{
    build_module, build_virasoro_voa, compute_constants, compute_l, format_expression, minimal_model_central_charge,
    normalize, parse_expression, Base, CofiniteData, Error, ModuleKind, ModuleModel, Scalar, VecId, VoaModel,
};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Spanning sets, normal forms and finiteness checks for Virasoro minimal models.
#[derive(Parser, Debug)]
#[command(name = "c2span", version)]
struct Cli {
    /// `lee-yang`, a pair `p,q` of a minimal model, or a central charge such as `-22/5`.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Lowest weight of the module (default -1/5 for lee-yang, 0 otherwise).
    #[arg(long, global = true, allow_hyphen_values = true)]
    h: Option<String>,
    /// Weight window of the VOA and depth window of the module.
    #[arg(long, global = true)]
    wmax: Option<usize>,
    /// Directory for report files; reports go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    #[command(flatten)]
    Task(Task),
    /// Runs the commands listed in a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "kebab-case")]
enum Task {
    /// Graded dimensions and bases of the VOA and the module.
    Model,
    /// C2 codimensions, the generating set X and the constants B, N, Q.
    Cofinite,
    /// B, N, Q and the module constant L.
    Constants,
    /// Checks that the VOA spanning words span every weight in the window.
    VoaSpan,
    /// Checks that the module spanning elements span every depth in the window.
    ModuleSpan,
    /// Rewrites an expression such as `w[-1] w[-1] |h>` into spanning elements.
    Normalize {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Windowed dimension estimate of A_n of the module.
    Zhu {
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        n: usize,
    },
    /// Evaluates the Borcherds identity on module basis vectors.
    Identities {
        /// Every (k, q, r) in [-3, 3]^3 instead of a seeded sample.
        #[arg(long)]
        #[serde(default)]
        sweep: bool,
    },
}

impl Task {
    fn name(&self) -> &'static str {
        match self {
            Task::Model => "model",
            Task::Cofinite => "cofinite",
            Task::Constants => "constants",
            Task::VoaSpan => "voa-span",
            Task::ModuleSpan => "module-span",
            Task::Normalize { .. } => "normalize",
            Task::Zhu { .. } => "zhu",
            Task::Identities { .. } => "identities",
        }
    }
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum ModelSpec {
    Family { family: String, p: i64, q: i64 },
    Charge { c: String },
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    model: Option<ModelSpec>,
    h: Option<String>,
    w_max: Option<usize>,
    #[serde(default)]
    commands: Vec<Task>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

/// Why a run stopped. Verification failures exit with 1, everything else with 2.
enum Failure {
    Verification(String),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SpanDeficit { .. } | Error::NotCofiniteInWindow { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Settings {
    c: Scalar,
    h: Scalar,
    w_max: usize,
    out: Option<PathBuf>,
    seed: u64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn minimal_model(p: i64, q: i64) -> Outcome<Scalar> {
    if p < 2 || p >= q || gcd(p, q) != 1 {
        return Err(Failure::Config(format!("need coprime 2 <= p < q, got p = {p}, q = {q}")));
    }
    Ok(minimal_model_central_charge(p, q))
}

fn parse_model(s: &str) -> Outcome<(Scalar, Option<Scalar>)> {
    if s == "lee-yang" {
        return Ok((minimal_model(2, 5)?, Some(parse_scalar("-1/5")?)));
    }
    if let Some((p, q)) = s.split_once(',') {
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|_| Failure::Config(format!("bad model pair {s:?}")));
        return Ok((minimal_model(parse(p)?, parse(q)?)?, None));
    }
    Ok((parse_scalar(s.strip_prefix("c=").unwrap_or(s))?, None))
}

fn resolve(cli: &Cli, cfg: &RunConfig) -> Outcome<Settings> {
    let (c, default_h) = match (&cli.model, &cfg.model) {
        (Some(m), _) => parse_model(m)?,
        (None, Some(ModelSpec::Family { family, p, q })) => {
            if family != "virasoro-minimal" {
                return Err(Failure::Config(format!("unknown model family {family:?}")));
            }
            (minimal_model(*p, *q)?, None)
        }
        (None, Some(ModelSpec::Charge { c })) => (parse_scalar(c)?, None),
        (None, None) => parse_model("lee-yang")?,
    };
    let h = match cli.h.as_ref().or(cfg.h.as_ref()) {
        Some(s) => parse_scalar(s)?,
        None => default_h.unwrap_or_else(|| Scalar::from_integer(0.into())),
    };
    Ok(Settings {
        c,
        h,
        w_max: cli.wmax.or(cfg.w_max).unwrap_or(12),
        out: cli.out.clone().or_else(|| cfg.out.clone()),
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
    })
}

/// Models are built on first use and shared by all commands of a run.
struct Session {
    s: Settings,
    voa: Option<VoaModel>,
    module: Option<ModuleModel>,
    data: Option<CofiniteData>,
}

impl Session {
    fn voa(&mut self) -> Outcome<&VoaModel> {
        if self.voa.is_none() {
            self.voa = Some(build_virasoro_voa(self.s.c.clone(), self.s.w_max)?);
        }
        Ok(self.voa.as_ref().expect("built"))
    }

    fn module(&mut self) -> Outcome<(&VoaModel, &ModuleModel)> {
        self.voa()?;
        let voa = self.voa.as_ref().expect("built");
        let module = self
            .module
            .get_or_insert_with(|| build_module(voa, self.s.h.clone(), self.s.w_max, ModuleKind::SimpleQuotient));
        Ok((voa, module))
    }

    fn data(&mut self) -> Outcome<&CofiniteData> {
        if self.data.is_none() {
            let d = compute_constants(self.voa()?)?;
            self.data = Some(d);
        }
        Ok(self.data.as_ref().expect("built"))
    }

    fn all(&mut self) -> Outcome<(&VoaModel, &ModuleModel, &CofiniteData)> {
        self.data()?;
        self.module()?;
        Ok((self.voa.as_ref().unwrap(), self.module.as_ref().unwrap(), self.data.as_ref().unwrap()))
    }
}

#[derive(Serialize)]
struct ModelReport {
    schema: &'static str,
    voa: ModelDescriptor,
    module: ModelDescriptor,
}

#[derive(Serialize)]
struct ConstantsReport {
    schema: &'static str,
    central_charge: String,
    lowest_weight: String,
    #[serde(rename = "B")]
    b: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "Q")]
    q: usize,
    #[serde(rename = "L")]
    l: usize,
}

#[derive(Serialize)]
struct NormalizeReport {
    schema: &'static str,
    input: String,
    output: String,
    terms: usize,
    descents: usize,
}

#[derive(Serialize)]
struct IdentityReport {
    schema: &'static str,
    sweep: bool,
    seed: Option<u64>,
    vectors: Vec<String>,
    max_target_depth: usize,
    checks: usize,
    failures: Vec<String>,
}

/// A finished command: files to write (name, contents) and whether it verified.
struct Output {
    files: Vec<(String, String)>,
    ok: bool,
}

fn json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("reports serialize");
    s.push('\n');
    s
}

fn csv(rows: impl Iterator<Item = (usize, usize, usize)>) -> String {
    let mut s = String::from("weight,dim,cn_codim\n");
    for (w, d, c) in rows {
        s.push_str(&format!("{w},{d},{c}\n"));
    }
    s
}

fn voa_span_files(r: &VoaSpanReport) -> Vec<(String, String)> {
    vec![
        ("voa-span.json".into(), json(r)),
        ("voa-span.csv".into(), csv(r.rows.iter().map(|x| (x.weight, x.dim, x.cn_codims[0])))),
    ]
}

fn module_span_files(r: &ModuleSpanReport) -> Vec<(String, String)> {
    vec![
        ("module-span.json".into(), json(r)),
        ("module-span.csv".into(), csv(r.rows.iter().map(|x| (x.depth, x.dim, x.cn_codims[0])))),
    ]
}

fn one(name: &str, body: String) -> Output {
    Output { files: vec![(name.into(), body)], ok: true }
}

/// Target depth and module window used by the identity checks.
const IDENTITY_DEPTH: usize = 5;
const IDENTITY_WINDOW: usize = 21;

fn identities(session: &mut Session, sweep: bool) -> Outcome<Output> {
    let (seed, h) = (session.s.seed, session.s.h.clone());
    let voa = session.voa()?;
    let module = build_module(voa, h, IDENTITY_WINDOW, ModuleKind::SimpleQuotient);
    // products u_j v reach weight wt(u) + wt(v) + 2
    let mut labels: Vec<VecId> = Vec::new();
    for parts in [&[2u8][..], &[3], &[2, 2]] {
        let wt: usize = parts.iter().map(|&p| p as usize).sum();
        if 2 * wt + 2 <= voa.w_max() {
            if let Ok((id, _)) = voa.intern_word(parts) {
                labels.push(id);
            }
        }
    }
    if labels.is_empty() {
        return Err(Failure::Config(format!("window {} is too small for the identity checks", voa.w_max())));
    }
    let targets: Vec<_> = (0..=IDENTITY_DEPTH).flat_map(|d| module.basis_vectors(d)).collect();
    let mut cases = Vec::new();
    if sweep {
        for &u in &labels {
            for &v in &labels {
                for k in -3..=3 {
                    for q in -3..=3 {
                        for r in -3..=3 {
                            for t in 0..targets.len() {
                                cases.push((u, v, k, q, r, t));
                            }
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            let u = labels[rng.gen_range(0..labels.len())];
            let v = labels[rng.gen_range(0..labels.len())];
            let (k, q, r) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            cases.push((u, v, k, q, r, rng.gen_range(0..targets.len())));
        }
    }
    let mut failures = Vec::new();
    for &(u, v, k, q, r, t) in &cases {
        if !borcherds_residual(voa, &module, u, v, k, q, r, &targets[t])?.is_zero() {
            failures.push(format!("u={} v={} k={k} q={q} r={r} target={t}", voa.vector(u), voa.vector(v)));
        }
    }
    let report = IdentityReport {
        schema: "c2span.identities/1",
        sweep,
        seed: (!sweep).then_some(seed),
        vectors: labels.iter().map(|&id| voa.vector(id).to_string()).collect(),
        max_target_depth: IDENTITY_DEPTH,
        checks: cases.len(),
        failures,
    };
    let ok = report.failures.is_empty();
    if !ok {
        eprintln!("identities: {} of {} checks failed", report.failures.len(), report.checks);
    }
    Ok(Output { files: vec![("identities.json".into(), json(&report))], ok })
}

fn execute(session: &mut Session, task: &Task) -> Outcome<Output> {
    match task {
        Task::Model => {
            let (voa, module) = session.module()?;
            let r = ModelReport { schema: "c2span.models/1", voa: voa.adjoint().descriptor(), module: module.descriptor() };
            Ok(one("model.json", json(&r)))
        }
        Task::Cofinite => {
            let voa = session.voa()?;
            let data = compute_constants(voa)?;
            let r: CofiniteReport = cofinite_report(voa, &data);
            Ok(one("cofinite.json", json(&r)))
        }
        Task::Constants => {
            let (voa, module, data) = session.all()?;
            let l = compute_l(voa, module, data)?;
            let r = ConstantsReport {
                schema: "c2span.constants/1",
                central_charge: fmt_scalar(voa.central_charge()),
                lowest_weight: fmt_scalar(module.lowest_weight()),
                b: data.b,
                n: data.n,
                q: data.q,
                l,
            };
            Ok(one("constants.json", json(&r)))
        }
        Task::VoaSpan => {
            let w = session.s.w_max;
            let (voa, _, data) = session.all()?;
            let r = verify_voa_span(voa, data, w)?;
            Ok(Output { files: voa_span_files(&r), ok: true })
        }
        Task::ModuleSpan => {
            let (voa, module, data) = session.all()?;
            let l = compute_l(voa, module, data)?;
            let r = verify_module_span(voa, module, data, l, module.w_max())?;
            Ok(Output { files: module_span_files(&r), ok: true })
        }
        Task::Normalize { expr } => {
            let (voa, module, data) = session.all()?;
            let e = parse_expression(voa, expr)?;
            let vacuum = e.terms().next().is_some_and(|(w, _)| w.base == Base::Vacuum);
            let target = if vacuum { voa.adjoint() } else { module };
            let l = compute_l(voa, target, data)?;
            let n = normalize(voa, target, data, l, &e)?;
            let output = format_expression(voa, &n.expression);
            let mut trace = format!("{output}\n");
            for line in &n.trace {
                trace.push_str(&format!("{line}\n"));
            }
            let r = NormalizeReport {
                schema: "c2span.normalize/1",
                input: format_expression(voa, &e),
                output,
                terms: n.expression.len(),
                descents: n.descents,
            };
            Ok(Output { files: vec![("normalize.json".into(), json(&r)), ("normalize.trace".into(), trace)], ok: true })
        }
        Task::Zhu { n } => {
            let (voa, module, data) = session.all()?;
            let l = compute_l(voa, module, data)?;
            let top = module.w_max();
            let schedule: Vec<usize> = (top.saturating_sub(6)..=top).collect();
            let r = an_dim_estimate(voa, module, data, l, *n, &schedule)?;
            if !r.stabilized {
                eprintln!("zhu: estimate did not stabilize inside the window; dims are upper bounds");
            }
            Ok(one("zhu.json", json(&r)))
        }
        Task::Identities { sweep } => identities(session, *sweep),
    }
}

fn emit(out: Option<&Path>, prefix: &str, files: &[(String, String)]) -> Outcome<()> {
    match out {
        None => {
            for (_, body) in files {
                print!("{body}");
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
            for (name, body) in files {
                let path = dir.join(format!("{prefix}{name}"));
                fs::write(&path, body).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome<bool> {
    let (cfg, tasks, numbered) = match &cli.command {
        Command::Task(t) => (RunConfig::default(), vec![t.clone()], false),
        Command::Run { config } => {
            let text = fs::read_to_string(config)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", config.display())))?;
            let cfg: RunConfig =
                serde_json::from_str(&text).map_err(|e| Failure::Config(format!("bad config {}: {e}", config.display())))?;
            let tasks = cfg.commands.clone();
            (cfg, tasks, true)
        }
    };
    if tasks.is_empty() {
        return Err(Failure::Config("no commands to run".into()));
    }
    let settings = resolve(cli, &cfg)?;
    let out = settings.out.clone();
    let mut session = Session { s: settings, voa: None, module: None, data: None };
    let mut all_ok = true;
    for (i, task) in tasks.iter().enumerate() {
        let result = execute(&mut session, task).map_err(|f| match f {
            Failure::Verification(m) => Failure::Verification(format!("{}: {m}", task.name())),
            Failure::Config(m) => Failure::Config(format!("{}: {m}", task.name())),
        })?;
        let prefix = if numbered { format!("{:02}-", i + 1) } else { String::new() };
        emit(out.as_deref(), &prefix, &result.files)?;
        all_ok &= result.ok;
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
