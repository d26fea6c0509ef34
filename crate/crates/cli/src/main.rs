use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vgitkit::git::{self, GitError};
use vgitkit::hilb::{self, HilbPoint};
use vgitkit::io::{
    self, chamber_report_json, locus_json, m_json, mu_json, rat_json, rats_json, Report,
};
use vgitkit::rat::{fmt_rat, from_ints, parse_rat, Rat};
use vgitkit::strata::{self, StrataError};
use vgitkit::vgit::{self, VgitError};
use vgitkit::{EvalOptions, HmPolicy, LinCombo, Scene};

/// Exact relative VGIT computations for torus actions.
#[derive(Parser, Debug)]
#[command(name = "vgitkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Hilbert–Mumford weight of one point along one cocharacter
    Mu,
    /// M-function value with exact certificate, or a profile over [from, to]
    Mfunc,
    /// Statuses of every point (or one point)
    Status,
    /// Base strata, subtori, cocharacter classes and fingerprint classes
    Strata,
    /// Exact walls on the segment [from, to]
    Walls,
    /// Full chamber decomposition of [from, to]
    Chambers,
    /// Semi-continuity check near `from`
    Semicont,
    /// Distinct loci on a rational grid over [from, to]
    Audit,
    /// Weights, thresholds and cycle invariance for the hilb section
    HilbCheck,
}

#[derive(clap::Args, Debug, Clone)]
struct Opts {
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    #[arg(long, global = true)]
    point: Option<String>,
    #[arg(long, global = true)]
    lin: Option<String>,
    /// Segment parameter as p/q; needs --from and --to
    #[arg(long, global = true)]
    t: Option<String>,
    /// Comma-separated integer cocharacter
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, global = true)]
    from: Option<String>,
    #[arg(long, global = true)]
    to: Option<String>,
    #[arg(long, global = true)]
    grid: Option<u64>,
    #[arg(long = "m-max", global = true)]
    m_max: Option<u64>,
    /// Second hilb point for the cycle-invariance check
    #[arg(long, global = true)]
    twin: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
    /// Compute for linearizations not flagged hm_sanctioned
    #[arg(long = "allow-numerical", global = true)]
    allow_numerical: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Emit {
    Json,
    Csv,
}

impl Opts {
    fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put(
            "scene",
            self.scene.as_ref().map(|p| p.display().to_string()),
        );
        put("point", self.point.clone());
        put("lin", self.lin.clone());
        put("t", self.t.clone());
        put("lambda", self.lambda.clone());
        put("from", self.from.clone());
        put("to", self.to.clone());
        put("grid", self.grid.map(|g| g.to_string()));
        put("m_max", self.m_max.map(|g| g.to_string()));
        put("twin", self.twin.clone());
        if self.allow_numerical {
            m.insert("allow_numerical".into(), "true".into());
        }
        m
    }

    fn policy(&self) -> HmPolicy {
        if self.allow_numerical {
            HmPolicy::AllowNumerical
        } else {
            HmPolicy::RequireSanctioned
        }
    }

    fn eval(&self) -> EvalOptions {
        EvalOptions {
            policy: self.policy(),
            ..EvalOptions::default()
        }
    }

    fn segment(&self) -> Result<(&str, &str)> {
        match (&self.from, &self.to) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => bail!("--from and --to are required"),
        }
    }

    /// `--lin L`, or `--from/--to` with `--t`.
    fn combo(&self) -> Result<LinCombo> {
        match (&self.lin, &self.t) {
            (Some(l), None) => Ok(LinCombo::single(l.clone())),
            (None, Some(t)) => {
                let (a, b) = self.segment()?;
                let t = parse_rat(t).map_err(|e| anyhow!("--t: {}", e.0))?;
                LinCombo::segment(a, b, &t).map_err(|e| anyhow!("--t: {}", e.0))
            }
            (Some(_), Some(_)) => bail!("give either --lin or --t with --from/--to, not both"),
            (None, None) => bail!("--lin (or --from, --to and --t) is required"),
        }
    }

    fn lambda_ints(&self) -> Result<Option<Vec<i64>>> {
        self.lambda
            .as_deref()
            .map(|s| {
                s.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .with_context(|| format!("--lambda: {x:?} is not an integer"))
                    })
                    .collect()
            })
            .transpose()
    }
}

fn combo_json(c: &LinCombo) -> Value {
    Value::Object(
        c.terms()
            .iter()
            .map(|(n, w)| (n.clone(), rat_json(w)))
            .collect(),
    )
}

fn sanctioned(scene: &Scene, c: &LinCombo) -> bool {
    git::check_sanctioned(scene, c, HmPolicy::RequireSanctioned).is_ok()
}

fn find_point<'a>(scene: &'a Scene, name: &str) -> Result<&'a vgitkit::WeightedPoint> {
    scene
        .point(name)
        .ok_or_else(|| GitError::UnknownPoint(name.to_string()).into())
}

fn run(cmd: Command, opts: &Opts) -> Result<Report> {
    let path = opts.scene.as_ref().context("--scene is required")?;
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).context("scene file is not UTF-8")?;
    let loaded = io::parse_scene(&text)?;
    let scene = &loaded.scene;
    let results = match cmd {
        Command::Mu => cmd_mu(scene, opts)?,
        Command::Mfunc => cmd_mfunc(scene, opts)?,
        Command::Status => cmd_status(scene, opts)?,
        Command::Strata => cmd_strata(scene, opts)?,
        Command::Walls => {
            let (a, b) = opts.segment()?;
            let r = vgit::chamber_decomposition(scene, a, b, opts.eval())?;
            json!({
                "walls": rats_json(&r.walls),
                "spurious_candidates": rats_json(&r.spurious_candidates),
                "numerical_only": !sanctioned(scene, &LinCombo::segment(a, b, &Rat::new(1.into(), 2.into())).expect("t = 1/2")),
            })
        }
        Command::Chambers => {
            let (a, b) = opts.segment()?;
            chamber_report_json(&vgit::chamber_decomposition(scene, a, b, opts.eval())?)
        }
        Command::Semicont => {
            let (a, b) = opts.segment()?;
            let r = vgit::check_semicontinuity(scene, a, b, opts.eval())?;
            json!({
                "holds": r.holds,
                "witness_chamber": [rat_json(&r.witness_chamber.0), rat_json(&r.witness_chamber.1)],
                "t": rat_json(&r.t),
                "stable_L0": r.stable_start,
                "stable_Lt": r.stable_t,
                "semistable_Lt": r.semistable_t,
                "semistable_L0": r.semistable_start,
                "violations": r.violations.iter().map(|v| json!({"inclusion": v.inclusion, "point": v.point})).collect::<Vec<_>>(),
            })
        }
        Command::Audit => cmd_audit(scene, opts)?,
        Command::HilbCheck => cmd_hilb(&loaded.hilb, opts)?,
    };
    Ok(Report {
        command: command_name(cmd).to_string(),
        args: opts.echo(),
        input_digest: io::digest(&bytes),
        results,
    })
}

fn command_name(cmd: Command) -> &'static str {
    match cmd {
        Command::Mu => "mu",
        Command::Mfunc => "mfunc",
        Command::Status => "status",
        Command::Strata => "strata",
        Command::Walls => "walls",
        Command::Chambers => "chambers",
        Command::Semicont => "semicont",
        Command::Audit => "audit",
        Command::HilbCheck => "hilb-check",
    }
}

fn cmd_mu(scene: &Scene, opts: &Opts) -> Result<Value> {
    let point = find_point(scene, opts.point.as_deref().context("--point is required")?)?;
    let combo = opts.combo()?;
    let lambda = opts.lambda_ints()?.context("--lambda is required")?;
    git::check_sanctioned(scene, &combo, HmPolicy::AllowNumerical)?;
    let mu = git::mu(scene, point, &combo, &from_ints(&lambda))?;
    Ok(json!({
        "point": point.name,
        "linearization": combo_json(&combo),
        "lambda": lambda,
        "mu": mu_json(&mu),
    }))
}

fn cmd_mfunc(scene: &Scene, opts: &Opts) -> Result<Value> {
    let point = find_point(scene, opts.point.as_deref().context("--point is required")?)?;
    if let Some(grid) = opts.grid {
        if grid == 0 {
            bail!("--grid must be positive");
        }
        let (a, b) = opts.segment()?;
        let ts: Vec<Rat> = (0..=grid)
            .map(|k| Rat::new((k as i64).into(), (grid as i64).into()))
            .collect();
        let prof = vgit::m_profile(scene, point, a, b, &ts, opts.policy())?;
        return Ok(json!({
            "point": point.name,
            "from": a,
            "to": b,
            "samples": prof.samples.iter().map(|(t, m)| json!({"t": rat_json(t), "m": m_json(m)})).collect::<Vec<_>>(),
            "midpoint_defects": prof.defects,
        }));
    }
    let combo = opts.combo()?;
    let m = git::m_function(scene, point, &combo, opts.policy())?;
    Ok(json!({
        "point": point.name,
        "linearization": combo_json(&combo),
        "m": m_json(&m),
        "numerical_only": !sanctioned(scene, &combo),
    }))
}

fn cmd_status(scene: &Scene, opts: &Opts) -> Result<Value> {
    let combo = opts.combo()?;
    git::check_sanctioned(scene, &combo, opts.policy())?;
    let pts: Vec<_> = match &opts.point {
        Some(p) => vec![find_point(scene, p)?],
        None => scene.points().iter().collect(),
    };
    let mut out = serde_json::Map::new();
    for p in pts {
        let s = git::status(scene, p, &combo, opts.policy())?;
        out.insert(p.name.clone(), Value::String(s.as_str().into()));
    }
    Ok(json!({
        "linearization": combo_json(&combo),
        "statuses": out,
        "numerical_only": !sanctioned(scene, &combo),
    }))
}

fn cmd_strata(scene: &Scene, opts: &Opts) -> Result<Value> {
    let strata_set: BTreeSet<Vec<usize>> = scene
        .points()
        .iter()
        .map(|p| p.stratum.clone())
        .chain(scene.components().iter().map(|c| c.stratum.clone()))
        .collect();
    let lambda = opts.lambda_ints()?;
    let mut rows = Vec::new();
    for st in &strata_set {
        let chars = scene.stratum_ints(st);
        let closed = strata::is_closed_orbit_stratum(&chars);
        let mut row = json!({
            "stratum": st,
            "characters": chars,
            "closed_orbit": closed,
            "subtorus_cocharacters": strata::subtorus_gi(scene.rank(), &chars)?,
            "points": scene.points().iter().filter(|p| &p.stratum == st).map(|p| p.name.clone()).collect::<Vec<_>>(),
        });
        if let (Some(l), true) = (&lambda, closed) {
            let class = strata::classify_lambda(scene.rank(), &chars, l)?;
            row["lambda_class"] = json!(match class {
                strata::LambdaClass::Fixes => "fixes",
                strata::LambdaClass::NoLimit => "no-limit",
            });
        }
        rows.push(row);
    }
    let mut out = json!({ "strata": rows });
    if let Some(lin) = &opts.lin {
        let classes = strata::fingerprint_classes(scene, &[lin.as_str()])?;
        out["fingerprint_classes"] = Value::Array(
            classes
                .into_iter()
                .map(|(fp, names)| {
                    json!({
                        "stratum": fp.stratum,
                        "reduced_weights": fp.weights.values().next().map(|w| w.iter().map(|v| rats_json(v)).collect::<Vec<_>>()),
                        "points": names,
                    })
                })
                .collect(),
        );
        if let (Some(p), Some(l)) = (&opts.point, &lambda) {
            let point = find_point(scene, p)?;
            if !point.components.is_empty() {
                let mu = strata::mu_via_components(scene, point, lin, l)?;
                out["mu_via_components"] = mu_json(&mu);
            }
        }
    }
    Ok(out)
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn cmd_audit(scene: &Scene, opts: &Opts) -> Result<Value> {
    let (a, b) = opts.segment()?;
    let report = vgit::chamber_decomposition(scene, a, b, opts.eval())?;
    let grid = match opts.grid {
        Some(0) => bail!("--grid must be positive"),
        Some(g) => g,
        None => {
            let l = report.walls.iter().try_fold(1u64, |acc, w| {
                let d: u64 = w.denom().try_into().ok()?;
                Some(lcm(acc, d))
            });
            2 * l.context("wall denominators overflow 64 bits")?
        }
    };
    let audit = strata::audit_finiteness(scene, a, b, grid, opts.eval())?;
    let chamber_loci = report.distinct_loci();
    Ok(json!({
        "grid": grid,
        "distinct_loci": audit.loci.len(),
        "stable_under_doubling": audit.stabilized,
        "chamber_loci": chamber_loci.len(),
        "matches_chambers": audit.loci == chamber_loci,
        "loci": audit.loci.iter().map(locus_json).collect::<Vec<_>>(),
        "walls": rats_json(&report.walls),
    }))
}

fn hilb_summary(z: &HilbPoint, m_max: u64, lambda: Option<&[i64]>) -> Result<Value> {
    let th = hilb::status_threshold(z);
    let statuses: Vec<Value> = (1..=m_max)
        .map(|m| json!({"m": m, "status": hilb::status_lm(z, m).as_str()}))
        .collect();
    let mut out = json!({
        "name": z.name(),
        "status_Linf": th.linf_status.as_str(),
        "m_star": th.agrees_from,
        "stable_from": th.stable_from,
        "tail_status": th.tail_status.as_str(),
        "status_Lm": statuses,
    });
    if let Some(l) = lambda {
        let lam = from_ints(l);
        let ms: Vec<u64> = (1..=m_max).collect();
        let rows = hilb::convergence_report(z, std::slice::from_ref(&lam), &ms)?;
        out["lambda"] = json!(l);
        out["mu_Linf"] = mu_json(&hilb::mu_linf(z, &lam)?);
        out["convergence"] = Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "m": r.m,
                        "mu_Lm": mu_json(&hilb::mu_lm(z, &lam, r.m).expect("checked above")),
                        "mu_Lm_normalized": mu_json(&r.normalized),
                        "residual": r.residual.as_ref().map(fmt_rat),
                        "expected": r.expected.as_ref().map(fmt_rat),
                        "ok": r.ok,
                    })
                })
                .collect(),
        );
    }
    Ok(out)
}

fn cmd_hilb(points: &[HilbPoint], opts: &Opts) -> Result<Value> {
    if points.is_empty() {
        bail!("scene has no hilb section");
    }
    let m_max = opts.m_max.unwrap_or(5);
    if m_max == 0 {
        bail!("--m-max must be positive");
    }
    let lambda = opts.lambda_ints()?;
    let by_name = |n: &str| -> Result<&HilbPoint> {
        points
            .iter()
            .find(|z| z.name() == n)
            .ok_or_else(|| anyhow!("unknown hilb point {n:?}"))
    };
    let chosen: Vec<&HilbPoint> = match &opts.point {
        Some(n) => vec![by_name(n)?],
        None => points.iter().collect(),
    };
    let summaries = chosen
        .iter()
        .map(|z| hilb_summary(z, m_max, lambda.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    let mut out = json!({ "points": summaries });
    if let Some(t) = &opts.twin {
        let z1 = by_name(opts.point.as_deref().context("--twin needs --point")?)?;
        let v = hilb::cycle_invariance_check(z1, by_name(t)?)?;
        out["cycle_invariance"] = json!({
            "passes": v.passes(),
            "status_Linf": [v.linf.0.as_str(), v.linf.1.as_str()],
            "m_star": [v.thresholds.0.agrees_from, v.thresholds.1.agrees_from],
            "agree_from_m": v.from_m,
            "status_Lm_at_from": [v.lm_at_from.0.as_str(), v.lm_at_from.1.as_str()],
            "linf_strictly_semistable": v.linf_strictly_semistable,
        });
    }
    Ok(out)
}

fn is_refusal(e: &anyhow::Error) -> bool {
    let git_refusal = |g: &GitError| matches!(g, GitError::NotSanctioned(_));
    if let Some(g) = e.downcast_ref::<GitError>() {
        return git_refusal(g);
    }
    if let Some(VgitError::Git(g)) = e.downcast_ref::<VgitError>() {
        return git_refusal(g);
    }
    if let Some(StrataError::Git(g)) = e.downcast_ref::<StrataError>() {
        return git_refusal(g);
    }
    false
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("VGITKIT_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("VGITKIT_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot size the thread pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = init_threads().and_then(|_| run(cli.command, &cli.opts));
    match result {
        Ok(report) => {
            let out = match cli.opts.emit {
                Emit::Json => report.to_json(),
                Emit::Csv => report.to_csv(),
            };
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_refusal(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
