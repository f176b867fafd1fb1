//! Command-line front end. The `pmstat` binary only forwards to [`dispatch`].
//!
//! Exit codes: 0 on success, 1 when a computation fails (or the suite has
//! unexpected results), 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::convergence::{
    ai_stat_cauchy_detect, ai_stat_conv_detect, gamma_set, lambda_set, metric_cauchy_forms, strong_conv_detect,
    strong_limit_point_set, Detection, IndexedSequence, LambdaCandidate, MetricFormsOptions, Recipe, Setting,
};
use crate::distfn::{levy_distance, StepDistFn};
use crate::error::{Error, Result};
use crate::harness::{run_suite, SuiteConfig};
use crate::pmspace::{FinitePMSpace, PointId};
use crate::summability::{ai_density, check_regularity, Ideal, IndexSet, SummMatrix, DEFAULT_HORIZON, DEFAULT_TOL};
use crate::triangle::{check_triangle_axioms, TriangleFn};

#[derive(Debug, Parser)]
#[command(name = "pmstat", version, about = "Probabilistic metric spaces and A^I-statistical convergence")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    /// Horizon N.
    #[arg(long = "N", global = true, value_name = "N")]
    pub horizon: Option<usize>,
    /// Density tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Bisection tolerance for the Lévy distance.
    #[arg(long = "dl-tol", global = true)]
    pub dl_tol: Option<f64>,
    /// cesaro | identity | first-column | block:<set>:<weight> | file:<path>
    #[arg(long, global = true)]
    pub matrix: Option<String>,
    /// fin | density:<matrix>
    #[arg(long, global = true)]
    pub ideal: Option<String>,
    /// Space JSON file, equilateral:<n>:<F> or line:<x1,x2,...>
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// const:L | except:L:<set>[:r] | alternate:p,q:<set> | splice:L:<set>:<seq>
    #[arg(long, global = true)]
    pub seq: Option<String>,
    #[arg(long, global = true, env = "PMSTAT_SEED")]
    pub seed: Option<u64>,
    /// JSON file with any of the global options.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a CSV summary here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lévy distance between two distance distribution functions.
    Dl {
        /// eps:<b>, eps0, epsinf or a JSON jump list [[x, F(x+)], ...]
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Check the triangle-function axioms of a t-norm lift.
    TnormCheck {
        /// min | prod | luka | maximal
        #[arg(long, default_value = "min")]
        tnorm: String,
    },
    /// Check axioms P-1 to P-4 of a space.
    SpaceValidate,
    /// Finite-horizon Silverman–Toeplitz check.
    MatrixCheck,
    /// A^I-density of an index set.
    Density {
        /// evens | odds | squares | pow2 | blocks:<p> | mod:<m>:<r,...> | finite:<k,...> | range:<lo>:<hi> | not:<set>
        #[arg(long)]
        set: String,
    },
    /// Strong and A^I-statistical convergence of --seq.
    Converge {
        /// Candidate limit; every carrier point when omitted.
        #[arg(long)]
        limit: Option<String>,
    },
    /// A^I-statistical Cauchyness of --seq.
    Cauchy {
        /// Read a non-metric space through d_L(F_pq, eps_0).
        #[arg(long)]
        levy_fallback: bool,
    },
    /// Statistical limit points of --seq.
    Lambda {
        /// Witness index set for a candidate, as <point>=<set>; repeatable.
        /// Defaults to the index sets on which the sequence is constant.
        #[arg(long = "witness")]
        witnesses: Vec<String>,
    },
    /// Statistical cluster points of --seq.
    Gamma,
    /// Generate instances and run the property suite.
    Suite {
        #[arg(long, default_value_t = 30)]
        size: usize,
    },
}

/// Global options as read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(rename = "N")]
    horizon: Option<usize>,
    tol: Option<f64>,
    dl_tol: Option<f64>,
    matrix: Option<String>,
    ideal: Option<String>,
    space: Option<String>,
    seq: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
}

/// Resolved options: command-line flags over `--config` over defaults.
#[derive(Debug, Clone)]
pub struct Options {
    pub horizon: usize,
    pub tol: Option<f64>,
    pub dl_tol: f64,
    pub matrix: String,
    pub ideal: String,
    pub space: String,
    pub seq: Option<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Options {
    fn resolve(g: Global) -> std::result::Result<Self, String> {
        let file = match &g.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?
            }
            None => ConfigFile::default(),
        };
        let opts = Options {
            horizon: g.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            tol: g.tol.or(file.tol),
            dl_tol: g.dl_tol.or(file.dl_tol).unwrap_or(1e-7),
            matrix: g.matrix.or(file.matrix).unwrap_or_else(|| "cesaro".into()),
            ideal: g.ideal.or(file.ideal).unwrap_or_else(|| "fin".into()),
            space: g.space.or(file.space).unwrap_or_else(|| "equilateral:3:eps:1".into()),
            seq: g.seq.or(file.seq),
            seed: g.seed.or(file.seed).unwrap_or(1),
            out: g.out.or(file.out),
            csv: g.csv.or(file.csv),
        };
        if opts.horizon == 0 {
            return Err("--N must be positive".into());
        }
        if opts.tol.is_some_and(|t| !(t > 0.0)) {
            return Err("--tol must be positive".into());
        }
        if !(opts.dl_tol > 0.0) {
            return Err("--dl-tol must be positive".into());
        }
        Ok(opts)
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }
}

/// `eps:<b>`, `eps0`, `epsinf`, or a JSON jump list.
pub fn parse_distfn(s: &str) -> Result<StepDistFn> {
    let s = s.trim();
    match s {
        "eps0" => return Ok(StepDistFn::eps0()),
        "epsinf" => return Ok(StepDistFn::eps_inf()),
        _ => {}
    }
    if let Some(b) = s.strip_prefix("eps:") {
        let b: f64 = b.parse().map_err(|_| Error::Parse(format!("bad step location `{b}`")))?;
        return StepDistFn::unit_step(b);
    }
    Ok(serde_json::from_str(s)?)
}

fn point_names(n: usize) -> Vec<String> {
    const SHORT: [&str; 6] = ["p", "q", "r", "s", "u", "v"];
    if n <= SHORT.len() {
        SHORT[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (0..n).map(|i| format!("x{i}")).collect()
    }
}

/// A space file, `equilateral:<n>:<F>` or `line:<x1,x2,...>`.
pub fn parse_space(s: &str) -> Result<FinitePMSpace> {
    if let Some(rest) = s.strip_prefix("equilateral:") {
        let (n, f) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected equilateral:<n>:<F>, got `{s}`")))?;
        let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad point count `{n}`")))?;
        return FinitePMSpace::build_equilateral(point_names(n), parse_distfn(f)?);
    }
    if let Some(rest) = s.strip_prefix("line:") {
        let xs = rest
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad position `{x}`"))))
            .collect::<Result<Vec<f64>>>()?;
        return FinitePMSpace::line(&xs);
    }
    FinitePMSpace::from_json(&fs::read_to_string(Path::new(s))?)
}

fn other_point(space: &FinitePMSpace, not: PointId) -> Result<PointId> {
    space
        .points()
        .find(|&p| p != not)
        .ok_or(Error::Empty("second carrier point"))
}

/// Sequence recipes by name; points by name or index.
pub fn parse_seq(s: &str, space: &FinitePMSpace) -> Result<IndexedSequence> {
    let s = s.trim();
    let bad = || Error::Parse(format!("unknown sequence `{s}`"));
    let (head, rest) = s.split_once(':').ok_or_else(bad)?;
    let seq = match head {
        "const" => IndexedSequence::constant(space.point(rest)?),
        "except" => {
            let (l, tail) = rest.split_once(':').ok_or_else(bad)?;
            let l = space.point(l)?;
            let (set, visit) = match tail.parse::<IndexSet>() {
                Ok(set) => (set, other_point(space, l)?),
                Err(_) => {
                    let (set, r) = tail.rsplit_once(':').ok_or_else(bad)?;
                    (set.parse()?, space.point(r)?)
                }
            };
            IndexedSequence::new(
                s,
                Recipe::Except {
                    limit: l,
                    exceptional: set,
                    visits: vec![visit],
                },
            )
        }
        "alternate" => {
            let (pq, set) = rest.split_once(':').ok_or_else(bad)?;
            let (p, q) = pq.split_once(',').ok_or_else(bad)?;
            IndexedSequence::new(
                s,
                Recipe::Alternate {
                    parts: vec![(set.parse()?, space.point(p)?)],
                    default: space.point(q)?,
                },
            )
        }
        "splice" => {
            let (l, tail) = rest.split_once(':').ok_or_else(bad)?;
            let l = space.point(l)?;
            // The set may itself contain ':'; take the first split where both
            // sides parse.
            let split = tail
                .match_indices(':')
                .map(|(i, _)| (&tail[..i], &tail[i + 1..]))
                .find_map(|(set, inner)| Some((set.parse::<IndexSet>().ok()?, parse_seq(inner, space).ok()?)))
                .ok_or_else(bad)?;
            let (set, inner) = split;
            crate::convergence::splice(&inner, set, l)
        }
        _ => return Err(bad()),
    };
    seq.recipe.validate(space.len())?;
    Ok(seq)
}

struct Ctx {
    opts: Options,
}

impl Ctx {
    fn space(&self) -> Result<FinitePMSpace> {
        parse_space(&self.opts.space)
    }

    fn matrix(&self) -> Result<SummMatrix> {
        self.opts.matrix.parse()
    }

    fn ideal(&self) -> Result<Ideal> {
        self.opts.ideal.parse()
    }

    fn seq(&self, space: &FinitePMSpace) -> Result<IndexedSequence> {
        let s = self
            .opts
            .seq
            .as_deref()
            .ok_or_else(|| Error::Parse("this command needs --seq".into()))?;
        parse_seq(s, space)
    }

    fn write(&self, report: &Value) -> Result<()> {
        if let Some(path) = &self.opts.out {
            fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
        }
        Ok(())
    }
}

fn names(space: &FinitePMSpace, pts: &[PointId]) -> Vec<String> {
    pts.iter().map(|&p| space.name(p).to_string()).collect()
}

fn detection_json(d: &Detection) -> Value {
    json!({
        "status": d.status,
        "residual": d.residual,
        "witness": d.witness,
        "checks": d.checks,
    })
}

/// Trims a bisection result to the digits its tolerance supports.
fn format_to_tol(v: f64, tol: f64) -> String {
    let digits = (-tol.log10()).floor().clamp(0.0, 15.0) as usize;
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn cmd_dl(ctx: &Ctx, f: &str, g: &str) -> Result<i32> {
    let f = parse_distfn(f)?;
    let g = parse_distfn(g)?;
    let (value, method) = if g.is_eps0() {
        (f.levy_to_eps0(), "closed-form")
    } else if f.is_eps0() {
        (g.levy_to_eps0(), "closed-form")
    } else {
        (levy_distance(&f, &g, ctx.opts.dl_tol)?, "bisection")
    };
    let shown = if method == "closed-form" {
        format!("{value}")
    } else {
        format_to_tol(value, ctx.opts.dl_tol)
    };
    println!("{shown}");
    ctx.write(&json!({"command": "dl", "f": f, "g": g, "levy": value, "method": method, "dl_tol": ctx.opts.dl_tol}))?;
    Ok(0)
}

fn cmd_tnorm_check(ctx: &Ctx, tnorm: &str) -> Result<i32> {
    let op: TriangleFn = tnorm.parse()?;
    let sample: Vec<StepDistFn> = [
        "eps0",
        "eps:0.5",
        "eps:1.25",
        "[[0.25,0.3],[1.0,0.8],[2.0,1.0]]",
        "[[0.5,0.5],[1.5,0.9]]",
    ]
    .iter()
    .map(|s| parse_distfn(s))
    .collect::<Result<_>>()?;
    let report = check_triangle_axioms(&op, tnorm, &sample, ctx.opts.tol.unwrap_or(1e-6))?;
    for a in &report.axioms {
        println!(
            "{} {:<14} worst residual {:.3e}",
            if a.passed { "PASS" } else { "FAIL" },
            a.axiom,
            a.worst_residual
        );
    }
    ctx.write(&json!({"command": "tnorm-check", "report": report}))?;
    Ok(0)
}

fn cmd_space_validate(ctx: &Ctx) -> Result<i32> {
    let space = ctx.space()?;
    let report = space.validate_axioms();
    match &report.violation {
        None => println!("PASS {} points, tau = {}", space.len(), space.tau()),
        Some(v) => println!("FAIL {v:?}"),
    }
    ctx.write(&json!({
        "command": "space-validate",
        "points": space.names(),
        "tau": space.tau().tag(),
        "report": report,
        "gap_grid": space.gap_grid(),
    }))?;
    Ok(0)
}

fn cmd_matrix_check(ctx: &Ctx) -> Result<i32> {
    let m = ctx.matrix()?;
    let report = check_regularity(&m, ctx.opts.horizon, ctx.opts.tol.unwrap_or(2e-3))?;
    for c in &report.conditions {
        println!(
            "{} {:<18} residual {:.3e}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.condition,
            c.residual,
            c.detail
        );
    }
    ctx.write(&json!({"command": "matrix-check", "report": report}))?;
    Ok(0)
}

fn cmd_density(ctx: &Ctx, set: &str) -> Result<i32> {
    let set: IndexSet = set.parse()?;
    let (m, ideal) = (ctx.matrix()?, ctx.ideal()?);
    let tol = ctx.opts.tol();
    let d = ai_density(&m, &ideal, &set, ctx.opts.horizon, tol)?;
    println!(
        "density {:.6} ({}, residual {:.2e}); tail range [{:.6}, {:.6}]; thin: {}",
        d.value,
        d.status,
        d.residual,
        d.liminf,
        d.limsup,
        d.is_thin(tol)
    );
    ctx.write(&json!({
        "command": "density",
        "set": set.to_string(),
        "matrix": m.name(),
        "ideal": ideal.name(),
        "horizon": ctx.opts.horizon,
        "tol": tol,
        "estimate": d,
        "thin": d.is_thin(tol),
    }))?;
    Ok(0)
}

fn with_setting<T>(ctx: &Ctx, f: impl FnOnce(&Setting, &FinitePMSpace, &IndexedSequence, &[PointId]) -> Result<T>) -> Result<T> {
    let space = ctx.space()?;
    let (m, ideal) = (ctx.matrix()?, ctx.ideal()?);
    let seq = ctx.seq(&space)?;
    let setting = Setting::new(&space, &m, &ideal, ctx.opts.horizon, ctx.opts.tol())?;
    let xs = setting.terms(&seq);
    f(&setting, &space, &seq, &xs)
}

fn cmd_converge(ctx: &Ctx, limit: Option<&str>) -> Result<i32> {
    let report = with_setting(ctx, |setting, space, seq, xs| {
        let candidates: Vec<PointId> = match limit {
            Some(l) => vec![space.point(l)?],
            None => space.points().collect(),
        };
        let mut rows = Vec::new();
        for c in candidates {
            let stat = ai_stat_conv_detect(setting, xs, c)?;
            let strong = strong_conv_detect(space, xs, c, setting.horizon);
            println!(
                "{:<8} statistical {:<12} (residual {:.4})  strong {:<12} (k0 {:?})",
                space.name(c),
                stat.status.to_string(),
                stat.residual,
                strong.status.to_string(),
                strong.witness
            );
            rows.push(json!({
                "point": space.name(c),
                "statistical": detection_json(&stat),
                "strong": detection_json(&strong),
            }));
        }
        Ok(json!({"command": "converge", "sequence": seq.description, "results": rows}))
    })?;
    ctx.write(&report)?;
    Ok(0)
}

fn cmd_cauchy(ctx: &Ctx, levy_fallback: bool) -> Result<i32> {
    let dl_tol = ctx.opts.dl_tol;
    let report = with_setting(ctx, |setting, _space, seq, xs| {
        let d = ai_stat_cauchy_detect(setting, xs)?;
        println!("cauchy {} (residual {:.4}, witness k0 {:?})", d.status, d.residual, d.witness);
        let opts = MetricFormsOptions {
            null_set: None,
            levy_fallback,
            levy_tol: dl_tol,
        };
        let forms = match metric_cauchy_forms(setting, xs, &opts) {
            Ok(r) => {
                println!("metric forms: p1 {} p2 {} p3 {}", r.p1.status, r.p2.status, r.p3.status);
                serde_json::to_value(&r)?
            }
            Err(Error::NotMetricSpace) => {
                println!("metric forms: skipped (space is not metric-induced; pass --levy-fallback)");
                Value::Null
            }
            Err(e) => return Err(e),
        };
        Ok(json!({
            "command": "cauchy",
            "sequence": seq.description,
            "verdict": detection_json(&d),
            "metric_forms": forms,
        }))
    })?;
    ctx.write(&report)?;
    Ok(0)
}

fn cmd_lambda(ctx: &Ctx, witnesses: &[String]) -> Result<i32> {
    let report = with_setting(ctx, |setting, space, seq, xs| {
        let candidates: Vec<LambdaCandidate> = if witnesses.is_empty() {
            seq.recipe
                .natural_witnesses()
                .into_iter()
                .map(|(point, w)| LambdaCandidate {
                    point,
                    witness: Some(w),
                })
                .collect()
        } else {
            witnesses
                .iter()
                .map(|w| {
                    let (p, set) = w
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected <point>=<set>, got `{w}`")))?;
                    Ok(LambdaCandidate {
                        point: space.point(p)?,
                        witness: Some(set.parse()?),
                    })
                })
                .collect::<Result<_>>()?
        };
        let r = lambda_set(setting, xs, &candidates)?;
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        println!("Lambda = {{{}}}", names(space, &r.members).join(", "));
        Ok(json!({
            "command": "lambda",
            "sequence": seq.description,
            "members": names(space, &r.members),
            "warnings": r.warnings,
            "evidence": r.evidence.iter().map(|(p, d, det)| json!({
                "point": space.name(*p),
                "witness_density": d,
                "subsequence": detection_json(det),
            })).collect::<Vec<_>>(),
        }))
    })?;
    ctx.write(&report)?;
    Ok(0)
}

fn cmd_gamma(ctx: &Ctx) -> Result<i32> {
    let report = with_setting(ctx, |setting, space, seq, xs| {
        let g = gamma_set(setting, xs)?;
        let limit_points = strong_limit_point_set(xs, setting.horizon);
        println!("Gamma = {{{}}}", names(space, &g.members).join(", "));
        println!("strong limit points = {{{}}}", names(space, &limit_points).join(", "));
        if !g.undetermined.is_empty() {
            println!("undetermined densities for {{{}}}", names(space, &g.undetermined).join(", "));
        }
        Ok(json!({
            "command": "gamma",
            "sequence": seq.description,
            "members": names(space, &g.members),
            "undetermined": names(space, &g.undetermined),
            "strong_limit_points": names(space, &limit_points),
            "evidence": g.evidence.iter().map(|(p, c)| json!({"point": space.name(*p), "checks": c})).collect::<Vec<_>>(),
        }))
    })?;
    ctx.write(&report)?;
    Ok(0)
}

fn cmd_suite(ctx: &Ctx, size: usize) -> Result<i32> {
    let config = SuiteConfig {
        seed: ctx.opts.seed,
        size,
        horizon: ctx.opts.horizon,
        tol: ctx.opts.tol.unwrap_or(SuiteConfig::default().tol),
        dl_tol: ctx.opts.dl_tol,
        ..SuiteConfig::default()
    };
    let report = run_suite(&config)?;
    for s in &report.summary {
        let expected = if s.negative_control { s.passed == 0 } else { s.failed == 0 };
        println!(
            "{} {:<36} {}/{} passed{}",
            if expected { "ok  " } else { "FAIL" },
            s.check,
            s.passed,
            s.runs,
            if s.negative_control { " (negative control)" } else { "" }
        );
    }
    for f in report.failures() {
        println!("unexpected: {} instance {:?}: {}", f.check, f.instance, f.detail);
    }
    if let Some(path) = &ctx.opts.out {
        fs::write(path, report.to_json() + "\n")?;
    }
    if let Some(path) = &ctx.opts.csv {
        fs::write(path, report.to_csv()?)?;
    }
    println!("suite {}", if report.ok() { "passed" } else { "failed" });
    Ok(if report.ok() { 0 } else { 1 })
}

fn run(cli: Cli, opts: Options) -> Result<i32> {
    let ctx = Ctx { opts };
    match &cli.command {
        Command::Dl { f, g } => cmd_dl(&ctx, f, g),
        Command::TnormCheck { tnorm } => cmd_tnorm_check(&ctx, tnorm),
        Command::SpaceValidate => cmd_space_validate(&ctx),
        Command::MatrixCheck => cmd_matrix_check(&ctx),
        Command::Density { set } => cmd_density(&ctx, set),
        Command::Converge { limit } => cmd_converge(&ctx, limit.as_deref()),
        Command::Cauchy { levy_fallback } => cmd_cauchy(&ctx, *levy_fallback),
        Command::Lambda { witnesses } => cmd_lambda(&ctx, witnesses),
        Command::Gamma => cmd_gamma(&ctx),
        Command::Suite { size } => cmd_suite(&ctx, *size),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let opts = match Options::resolve(cli.global.clone()) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    match run(cli, opts) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_distribution_specs() {
        assert_eq!(parse_distfn("eps:0.3").unwrap(), StepDistFn::unit_step(0.3).unwrap());
        assert!(parse_distfn("eps0").unwrap().is_eps0());
        assert_eq!(parse_distfn("[[1.0, 0.5], [2.0, 1.0]]").unwrap().jumps(), &[(1.0, 0.5), (2.0, 1.0)]);
        assert!(parse_distfn("eps:-1").is_err());
    }

    #[test]
    fn parses_spaces_and_sequences() {
        let space = parse_space("equilateral:3:eps:1").unwrap();
        assert_eq!(space.names(), &["p", "q", "r"]);
        let x = parse_seq("except:p:squares:r", &space).unwrap();
        assert_eq!(x.take(4), vec![PointId(2), PointId(0), PointId(0), PointId(2)]);
        let x = parse_seq("except:p:mod:3:0", &space).unwrap();
        assert_eq!(x.at(3), PointId(1));
        let x = parse_seq("alternate:p,q:evens", &space).unwrap();
        assert_eq!(x.take(2), vec![PointId(1), PointId(0)]);
        let y = parse_seq("splice:r:mod:4:0:alternate:p,q:evens", &space).unwrap();
        assert_eq!(y.take(4), vec![PointId(2), PointId(2), PointId(2), PointId(0)]);
        assert!(parse_seq("const:z", &space).is_err());
        assert!(parse_seq("wobble:p", &space).is_err());

        let line = parse_space("line:0,0.5,1").unwrap();
        assert!(line.metric().is_some());
    }

    #[test]
    fn formats_bisection_results() {
        assert_eq!(format_to_tol(0.30000004, 1e-6), "0.3");
        assert_eq!(format_to_tol(0.123456789, 1e-4), "0.1235");
    }
}
