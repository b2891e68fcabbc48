//! `finmet`: file-based front end for the finmet library.
//!
//! Every subcommand reads JSON metric documents, calls one library
//! operation and prints a JSON run report. Errors go to stderr as JSON;
//! exit codes are 0 (success), 1 (domain error) and 2 (usage error).

mod convert;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use finmet::embed::{kuratowski, EmbedMode};
use finmet::genericity::{block_space, perturb_to_anti, richness_search, singular_witness, Richness, RichnessQuery};
use finmet::gluing::{amalgam_disjoint, amalgam_shared, bridge_double, disjoint_sum};
use finmet::interpolation::interpolate;
use finmet::transmissible::{
    check_inequality, cycl0_check, doubling_check, hyperbolicity_delta, ptolemy_defect, ud_modulus,
    ultrametric_defect, Cycl0, Cycl0Options, Descriptor, Doubling, DoublingQ, Exponent, Hyperbolicity, Inequality,
    InequalityParam, Ptolemy, TransParam, Ultrametric, UniformDisconnected,
};
use finmet::{Metric, Rational, Scalar};
use serde_json::{json, Value};

use convert::ToJson;
use report::{CliError, CliResult, Inputs, RunReport};

#[derive(Parser)]
#[command(name = "finmet", version, about = "Exact computations on finite metric spaces")]
struct Cli {
    /// Seed for randomized solvers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the metric axioms.
    Validate { file: PathBuf },
    /// Sup-distance between two metrics on the same points.
    Dist { a: PathBuf, b: PathBuf },
    /// Diameter of the space or of a subset.
    Diam {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subset: Vec<String>,
    },
    /// Subspace on the given points.
    Restrict {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        subset: Vec<String>,
    },
    /// Multiply every distance by a factor, or cap it with `min(d, c)`.
    Scale {
        file: PathBuf,
        #[arg(long, value_parser = scalar_arg, required_unless_present = "cap", conflicts_with = "cap")]
        factor: Option<Rational>,
        #[arg(long, value_parser = scalar_arg)]
        cap: Option<Rational>,
    },
    /// Glue two metrics on the same points along a bridge of length r/2.
    GlueBridge {
        d: PathBuf,
        e: PathBuf,
        #[arg(long, value_parser = scalar_arg)]
        r: Rational,
    },
    /// Glue two metrics that agree on their shared points.
    GlueShared { x: PathBuf, y: PathBuf },
    /// Join two disjoint metrics through anchors at separation r.
    GlueDisjoint {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_parser = scalar_arg)]
        r: Rational,
        /// Anchor in the first space (default: its first point).
        #[arg(long)]
        a: Option<String>,
        /// Anchor in the second space (default: its first point).
        #[arg(long)]
        b: Option<String>,
    },
    /// Disjoint sum of several metrics.
    GlueSum {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Replace the metric on each part of a family, moving d by exactly eta.
    Interpolate {
        base: PathBuf,
        family: PathBuf,
        /// One metric per part, in family order.
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
    },
    /// Largest violation of a property.
    Check {
        property: Property,
        file: PathBuf,
        #[command(flatten)]
        p: ParamArgs,
        /// Cycle to test (cycl0 only).
        #[arg(long, value_delimiter = ',')]
        tuple: Option<Vec<String>>,
    },
    /// A small space violating a property.
    Witness {
        property: Property,
        #[arg(long, value_parser = scalar_arg)]
        eps: Rational,
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Shrinking violating blocks around a hub point.
    Blockspace {
        property: Property,
        #[arg(long, value_parser = scalar_arg)]
        eps: Rational,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Move a metric by less than eps so that it violates a property.
    Perturb {
        property: Property,
        file: PathBuf,
        #[arg(long, value_parser = scalar_arg)]
        eps: Rational,
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Search for a rescaled near-copy of a target space.
    Richness {
        file: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_parser = scalar_arg)]
        eps: Rational,
        /// Maximum number of subsets to scan.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Kuratowski embedding into sup-norm coordinates.
    Embed {
        file: PathBuf,
        /// Base point of the embedding (default: the first point).
        #[arg(long)]
        base: Option<String>,
        /// Use the unbased embedding `x -> d(x, ·)`.
        #[arg(long, conflicts_with = "base")]
        bounded: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Ultrametric,
    Ptolemy,
    Hyperbolicity,
    Doubling,
    #[value(alias = "uniformly-disconnected")]
    Ud,
    Cycl0,
    Inequality,
    Richness,
}

#[derive(Args, Default)]
struct ParamArgs {
    /// Parameter index: `C=..,alpha=..`, `delta=..`, `m=..` or `target=..,m=..`.
    #[arg(long, alias = "q")]
    param: Option<String>,
    /// Inequality `f >= 0` over distances `x12`, `x_{1,3}`, ... (inequality only).
    #[arg(long)]
    expr: Option<String>,
    /// Number of points of the inequality (default: the largest index used).
    #[arg(long)]
    points: Option<usize>,
    /// Sub-homogeneity degree of the inequality.
    #[arg(long, default_value_t = 1)]
    degree: u32,
    /// Target spaces (richness only).
    #[arg(long = "target")]
    targets: Vec<PathBuf>,
    /// Largest subset scanned (doubling)
    #[arg(long)]
    max_subset: Option<usize>,
    /// Longest chain scanned (ud)
    #[arg(long)]
    max_chain: Option<usize>,
    /// Scan every subset or chain, ignoring --max-subset and --max-chain.
    #[arg(long)]
    exhaustive: bool,
    /// Slack tolerance of the cycl0 solver [default: 1e-6]
    #[arg(long)]
    tol: Option<f64>,
    /// Random restarts of the cycl0 solver [default: 16]
    #[arg(long)]
    restarts: Option<usize>,
}

fn scalar_arg(s: &str) -> Result<Rational, String> {
    Rational::parse_text(s).ok_or_else(|| format!("not a number: {s:?}"))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct Params(BTreeMap<String, String>);

impl Params {
    fn parse(text: Option<&str>) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for item in text.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("expected key=value, got {item:?}")))?;
            map.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        Ok(Params(map))
    }

    fn scalar(&self, key: &str) -> CliResult<Option<Rational>> {
        self.0.get(key).map(|v| scalar_arg(v).map_err(usage)).transpose()
    }

    fn integer<N: std::str::FromStr>(&self, key: &str) -> CliResult<Option<N>> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| usage(format!("{key} must be a nonnegative integer, got {v:?}"))))
            .transpose()
    }
}

/// A registered parameter with an optional fixed index.
enum Param {
    Ultrametric,
    Ptolemy,
    Hyperbolicity(Option<Rational>),
    Doubling(Doubling, Option<DoublingQ<Rational>>),
    Ud(UniformDisconnected, Option<Rational>),
    Cycl0(Cycl0),
    Inequality(InequalityParam<Rational>),
    Richness(Richness<Rational>, Option<(usize, u32)>),
}

/// Runs `$body` with `$p` bound to the parameter and `$q` to its index.
macro_rules! with_param {
    ($param:expr, |$p:ident, $q:ident| $body:expr) => {
        match $param {
            Param::Ultrametric => {
                let ($p, $q) = (&Ultrametric, Some(()));
                $body
            }
            Param::Ptolemy => {
                let ($p, $q) = (&Ptolemy, Some(()));
                $body
            }
            Param::Hyperbolicity(q) => {
                let ($p, $q) = (&Hyperbolicity, q);
                $body
            }
            Param::Doubling(p, q) => {
                let ($p, $q) = (&p, q);
                $body
            }
            Param::Ud(p, q) => {
                let ($p, $q) = (&p, q);
                $body
            }
            Param::Cycl0(p) => {
                let ($p, $q) = (&p, Some(()));
                $body
            }
            Param::Inequality(p) => {
                let ($p, $q) = (&p, Some(()));
                $body
            }
            Param::Richness(p, q) => {
                let ($p, $q) = (&p, q);
                $body
            }
        }
    };
}

fn cycl0_options(args: &ParamArgs, seed: u64) -> Cycl0Options {
    let default = Cycl0Options::default();
    Cycl0Options {
        tol: args.tol.unwrap_or(default.tol),
        restarts: args.restarts.unwrap_or(default.restarts),
        seed,
        ..default
    }
}

fn inequality(args: &ParamArgs) -> CliResult<Inequality<Rational>> {
    let text = args.expr.as_deref().ok_or_else(|| usage("inequality needs --expr"))?;
    Ok(Inequality::parse(text, args.points, args.degree)?)
}

fn build_param(property: Property, args: &ParamArgs, seed: u64, inputs: &mut Inputs) -> CliResult<Param> {
    let params = Params::parse(args.param.as_deref())?;
    Ok(match property {
        Property::Ultrametric => Param::Ultrametric,
        Property::Ptolemy => Param::Ptolemy,
        Property::Hyperbolicity => Param::Hyperbolicity(params.scalar("delta")?),
        Property::Doubling => {
            let q = match (params.scalar("c")?, params.scalar("alpha")?) {
                (Some(c), Some(alpha)) => Some(DoublingQ { c, alpha: Exponent::from_scalar(&alpha)? }),
                (None, None) => None,
                _ => return Err(usage("doubling needs both C and alpha")),
            };
            let max_subset = if args.exhaustive { usize::MAX } else { args.max_subset.unwrap_or(usize::MAX) };
            Param::Doubling(Doubling { max_subset }, q)
        }
        Property::Ud => {
            let max_chain = if args.exhaustive { usize::MAX } else { args.max_chain.unwrap_or(usize::MAX) };
            Param::Ud(UniformDisconnected { max_chain }, params.scalar("delta")?)
        }
        Property::Cycl0 => {
            let m = params.integer("m")?.ok_or_else(|| usage("cycl0 needs --param m=.."))?;
            Param::Cycl0(Cycl0 { m, options: cycl0_options(args, seed) })
        }
        Property::Inequality => Param::Inequality(InequalityParam(inequality(args)?)),
        Property::Richness => {
            if args.targets.is_empty() {
                return Err(usage("richness needs at least one --target"));
            }
            let targets = args.targets.iter().map(|t| inputs.metric(t)).collect::<CliResult<Vec<_>>>()?;
            let q = match (params.integer("target")?, params.integer("m")?) {
                (None, None) => None,
                (t, m) => Some((t.unwrap_or(0), m.unwrap_or(1))),
            };
            Param::Richness(Richness { targets }, q)
        }
    })
}

fn index_or_first<T: Scalar, W: TransParam<T>>(p: &W, q: Option<W::Q>) -> CliResult<W::Q> {
    match q {
        Some(q) => Ok(q),
        None => p.q_enum().next().ok_or_else(|| finmet::Error::NotSingular(p.name()).into()),
    }
}

fn witness_json<W>(p: &W, q: Option<W::Q>, eps: &Rational) -> CliResult<Value>
where
    W: TransParam<Rational>,
    W::Q: ToJson,
    W::Z: ToJson,
{
    let q = index_or_first(p, q)?;
    Ok(singular_witness(p, &q, eps)?.to_json())
}

fn blockspace_json<W>(p: &W, eps: &Rational, blocks: usize) -> CliResult<Value>
where
    W: TransParam<Rational>,
    W::Q: ToJson,
    W::Z: ToJson,
    W::P: ToJson,
{
    Ok(block_space(p, eps, blocks)?.to_json())
}

fn perturb_json<W>(d: &Metric, eps: &Rational, p: &W, q: Option<W::Q>) -> CliResult<Value>
where
    W: TransParam<Rational>,
    W::Q: ToJson,
    W::Z: ToJson,
    W::P: ToJson,
{
    let out = perturb_to_anti(d, eps, p, q)?;
    let mut v = out.to_json();
    v["sup_dist"] = out.m.sup_dist(d)?.to_json();
    Ok(v)
}

fn check_json(
    property: Property,
    d: &Metric,
    args: &ParamArgs,
    tuple: Option<&[String]>,
    seed: u64,
) -> CliResult<(Value, bool)> {
    let params = Params::parse(args.param.as_deref())?;
    let n = d.len();
    let subset_cap = if args.exhaustive { n } else { args.max_subset.unwrap_or(n) };
    let chain_cap = if args.exhaustive { n } else { args.max_chain.unwrap_or(n) };
    Ok(match property {
        Property::Ultrametric => (ultrametric_defect(d).to_json(), true),
        Property::Ptolemy => (ptolemy_defect(d).to_json(), true),
        Property::Hyperbolicity => match params.scalar("delta")? {
            Some(delta) => (check_inequality(&Descriptor::Hyperbolicity { delta }, d)?.to_json(), true),
            None => (hyperbolicity_delta(d).to_json(), true),
        },
        Property::Doubling => {
            let c = params.scalar("c")?.ok_or_else(|| usage("doubling needs --param C=..,alpha=.."))?;
            let alpha = params.scalar("alpha")?.ok_or_else(|| usage("doubling needs --param C=..,alpha=.."))?;
            (doubling_check(d, &c, &alpha, subset_cap)?.to_json(), true)
        }
        Property::Ud => (ud_modulus(d, chain_cap)?.to_json(), true),
        Property::Cycl0 => {
            let options = cycl0_options(args, seed);
            match tuple {
                Some(a) => (cycl0_check(d, a, &options)?.to_json(), false),
                None => {
                    let m = params.integer("m")?.ok_or_else(|| usage("cycl0 needs --param m=.. or --tuple"))?;
                    let report = check_inequality(&Descriptor::Cycl0 { m, options }, d)?;
                    let mut v = report.to_json();
                    v["defect"] = report.defect.lossy_f64().to_json();
                    (v, false)
                }
            }
        }
        Property::Inequality => (check_inequality(&Descriptor::Custom(inequality(args)?), d)?.to_json(), true),
        Property::Richness => return Err(usage("use the richness subcommand")),
    })
}

fn metric_result(m: &Metric) -> Value {
    json!({ "metric": m.to_json() })
}

fn run(cmd: Cmd, seed: u64, inputs: &mut Inputs) -> CliResult<(Value, bool)> {
    let exact = |v: Value| Ok((v, true));
    match cmd {
        Cmd::Validate { file } => {
            let d = inputs.metric(&file)?;
            exact(json!({ "valid": true, "points": d.len() }))
        }
        Cmd::Dist { a, b } => {
            let (a, b) = (inputs.metric(&a)?, inputs.metric(&b)?);
            let (value, pair) = a.sup_dist_with_pair(&b)?;
            let mut v = json!({ "sup_dist": value.to_json() });
            if let Some((i, j)) = pair {
                v["pair"] = json!([a.label(i), a.label(j)]);
            }
            exact(v)
        }
        Cmd::Diam { file, subset } => {
            let d = inputs.metric(&file)?;
            let value = if subset.is_empty() { d.diameter() } else { d.diam(&subset)? };
            exact(json!({ "diam": value.to_json() }))
        }
        Cmd::Restrict { file, subset } => exact(metric_result(&inputs.metric(&file)?.restrict(&subset)?)),
        Cmd::Scale { file, factor, cap } => {
            let d = inputs.metric(&file)?;
            let m = match (factor, cap) {
                (Some(c), _) => d.scale(&c)?,
                (None, Some(c)) => d.min_cap(&c)?,
                (None, None) => return Err(usage("scale needs --factor or --cap")),
            };
            exact(metric_result(&m))
        }
        Cmd::GlueBridge { d, e, r } => {
            let (d, e) = (inputs.metric(&d)?, inputs.metric(&e)?);
            let b = bridge_double(&d, &e, &r)?;
            exact(json!({ "metric": b.glued.to_json(), "copies": b.copies, "bridge": b.bridge.to_json() }))
        }
        Cmd::GlueShared { x, y } => exact(metric_result(&amalgam_shared(&inputs.metric(&x)?, &inputs.metric(&y)?)?)),
        Cmd::GlueDisjoint { x, y, r, a, b } => {
            let (x, y) = (inputs.metric(&x)?, inputs.metric(&y)?);
            let a = a.unwrap_or_else(|| x.label(0).to_string());
            let b = b.unwrap_or_else(|| y.label(0).to_string());
            exact(metric_result(&amalgam_disjoint(&x, &y, &r, &a, &b)?))
        }
        Cmd::GlueSum { files } => {
            let family = files.iter().map(|f| inputs.metric(f)).collect::<CliResult<Vec<_>>>()?;
            exact(metric_result(&disjoint_sum(&family)?))
        }
        Cmd::Interpolate { base, family, metrics } => {
            let d = inputs.metric(&base)?;
            let family = inputs.family(&family)?;
            let metrics = metrics.iter().map(|f| inputs.metric(f)).collect::<CliResult<Vec<_>>>()?;
            let out = interpolate(&d, &family, &metrics)?;
            exact(json!({
                "metric": out.m.to_json(),
                "eta": out.eta.to_json(),
                "witness_pair": out.witness_pair.map(|(a, b)| vec![a, b]),
            }))
        }
        Cmd::Check { property, file, p, tuple } => {
            let d = inputs.metric(&file)?;
            check_json(property, &d, &p, tuple.as_deref(), seed)
        }
        Cmd::Witness { property, eps, p } => {
            let param = build_param(property, &p, seed, inputs)?;
            exact(with_param!(param, |w, q| witness_json(w, q, &eps))?)
        }
        Cmd::Blockspace { property, eps, blocks, p } => {
            let param = build_param(property, &p, seed, inputs)?;
            exact(with_param!(param, |w, _q| blockspace_json(w, &eps, blocks))?)
        }
        Cmd::Perturb { property, file, eps, p } => {
            let d = inputs.metric(&file)?;
            let param = build_param(property, &p, seed, inputs)?;
            exact(with_param!(param, |w, q| perturb_json(&d, &eps, w, q))?)
        }
        Cmd::Richness { file, target, eps, budget } => {
            let d = inputs.metric(&file)?;
            let query = RichnessQuery { target: inputs.metric(&target)?, epsilon: eps };
            exact(richness_search(&d, &query, budget)?.to_json())
        }
        Cmd::Embed { file, base, bounded } => {
            let d = inputs.metric(&file)?;
            let mode = if bounded {
                EmbedMode::Bounded
            } else {
                EmbedMode::Based(base.unwrap_or_else(|| d.label(0).to_string()))
            };
            let e = kuratowski(&d, &mode)?;
            let coords: Vec<Vec<Value>> = e.coords().iter().map(|c| c.iter().map(ToJson::to_json).collect()).collect();
            exact(json!({
                "mode": match &mode { EmbedMode::Bounded => json!("bounded"), EmbedMode::Based(o) => json!({ "based": o }) },
                "points": e.labels(),
                "coords": coords,
            }))
        }
    }
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn write_report(report: &RunReport, output: Option<&Path>) -> CliResult<()> {
    let text = report.render();
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string().trim_end().to_string())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(&usage("--threads must be at least 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&CliError::Io(e.to_string()));
        }
    }

    let command: Vec<String> = std::env::args().skip(1).collect();
    let mut inputs = Inputs::default();
    let start = Instant::now();
    let (result, exact) = match run(cli.cmd, cli.seed, &mut inputs) {
        Ok(out) => out,
        Err(e) => return fail(&e),
    };
    let report = RunReport {
        command,
        inputs: inputs.to_json(),
        result,
        exact,
        timing_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    match write_report(&report, cli.output.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
