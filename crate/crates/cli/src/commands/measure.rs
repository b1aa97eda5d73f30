use anyhow::Result;
use clap::{Args, ValueEnum};
use recmart_core::chain::DEFAULT_PATH_CAP;
use recmart_core::martin::{mixture_profile, parse_mixture, profile_from_boundary, HarmonicProfile};
use recmart_core::models::ClosedForms;
use recmart_core::sigma::{
    avoidance_function, cylinder_measure, restricted_measure, verify_concatenation, AvoidanceConfig, CylinderConfig,
    HorizonFunctional, MeasureValue,
};
use recmart_core::{with_chain, SeedStream};
use serde_json::{json, Value};

use super::{base, boundary, chain, state, states};
use crate::error::{flag, usage};
use crate::output::{num, OutputArgs, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Q_x(F 1{X_k ≠ x0 for k >= n}) = E_x[F φ(X_n)].
    Restricted,
    /// The sequence n ↦ Q_x(A, X_k ≠ x0 for k >= n) of a cylinder A.
    Cylinder,
    /// Q_x(X_k ≠ y for all k).
    Avoid,
    /// Exact check of the concatenation identity at y.
    Concatenation,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long)]
    pub chain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "mixture")]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mixture: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Starting state; defaults to x0.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Event {X_0..X_m = path}, states separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub path: Option<String>,
    /// Event {X_k ≠ state for k <= n} (restricted).
    #[arg(long, allow_hyphen_values = true)]
    pub avoid: Option<String>,
    /// Horizon of the event, or prefix length for concatenation.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Total horizon for concatenation.
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    /// Target state for avoid and concatenation.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Comma-separated horizons (cylinder, avoid).
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    pub path_cap: u64,
    /// Needed only if a cylinder outgrows the enumeration budget and has to
    /// be sampled.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    pub trajectories: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(args: &MeasureArgs) -> Result<Report> {
    let any = chain(&args.chain)?;
    with_chain!(&any, c => run_on(c, args))
}

fn profile<C: ClosedForms + Clone + 'static>(c: &C, x0: &C::State, args: &MeasureArgs) -> Result<HarmonicProfile<C::State>>
where
    C::State: 'static,
{
    match &args.mixture {
        Some(m) => {
            let mu = flag("mixture", parse_mixture(m, |s| c.parse_boundary(s)))?;
            flag("x0", mixture_profile(c, x0, &mu))
        }
        None => flag("x0", profile_from_boundary(c, x0, &boundary(c, &args.alpha)?)),
    }
}

fn value_json(v: &MeasureValue) -> Value {
    json!({
        "value": if v.infinite { Value::String("inf".into()) } else { num(v.value) },
        "exact": v.exact.as_ref().map(|e| e.to_string()),
        "mode": v.mode.as_str(),
        "verdict": v.verdict.map(|d| d.as_str()),
        "bracket": v.bracket.map(|b| json!({ "lower": num(b.lower), "upper": num(b.upper), "width": num(b.width()) })),
        "certified_upper": v.certified_upper.map(num),
        "sequence": v.sequence.iter().map(|s| json!({
            "horizon": s.horizon,
            "value": num(s.value),
            "exact": s.exact.as_ref().map(|e| e.to_string()),
            "stderr": s.stderr.map(num),
        })).collect::<Vec<_>>(),
        "note": v.note,
    })
}

fn run_on<C: ClosedForms + Clone + 'static>(c: &C, args: &MeasureArgs) -> Result<Report>
where
    C::State: 'static,
{
    let x0 = base(c, &args.x0)?;
    let phi = profile(c, &x0, args)?;
    let x = match &args.x {
        Some(s) => state(c, "x", s)?,
        None => x0.clone(),
    };
    let y = args.y.as_ref().map(|s| state(c, "y", s)).transpose()?;
    let event = || -> Result<HorizonFunctional<C::State>> {
        if let Some(p) = &args.path {
            let path = states(c, "path", p)?;
            if path.is_empty() {
                return Err(usage("invalid value for --path: empty path"));
            }
            return Ok(HorizonFunctional::Path(path));
        }
        if let Some(a) = &args.avoid {
            return Ok(HorizonFunctional::Avoid { state: state(c, "avoid", a)?, n: args.n });
        }
        Ok(HorizonFunctional::One { n: args.n })
    };
    let mut meta = json!({
        "command": "measure",
        "chain": c.label(),
        "x0": c.format_state(&x0),
        "profile": phi.provenance.to_string(),
        "x": c.format_state(&x),
        "kind": format!("{:?}", args.kind).to_lowercase(),
    });
    let (result, failed) = match args.kind {
        Kind::Restricted => {
            let f = event()?;
            meta["event"] = json!(format!("{f:?}"));
            (value_json(&restricted_measure(c, &phi, &x, &f, args.path_cap)?), false)
        }
        Kind::Cylinder => {
            let f = event()?;
            if args.path.is_none() {
                return Err(usage("--kind cylinder needs --path"));
            }
            let horizons = args.horizons.clone().unwrap_or_else(|| vec![4, 6, 8, 10, 12]);
            let cfg = CylinderConfig {
                path_cap: args.path_cap,
                mc_trajectories: args.trajectories,
                stream: args.seed.map(SeedStream::new),
            };
            meta["event"] = json!(format!("{f:?}"));
            meta["seed"] = json!(args.seed);
            (value_json(&cylinder_measure(c, &phi, &x, &f, &horizons, &cfg)?), false)
        }
        Kind::Avoid => {
            let y = y.ok_or_else(|| usage("--kind avoid needs --y"))?;
            let mut cfg = AvoidanceConfig::default();
            if let Some(h) = &args.horizons {
                cfg.horizons = h.clone();
            }
            meta["y"] = json!(c.format_state(&y));
            (value_json(&avoidance_function(c, &phi, &x, &y, &cfg)?), false)
        }
        Kind::Concatenation => {
            let y = y.ok_or_else(|| usage("--kind concatenation needs --y"))?;
            let rep = flag("p", verify_concatenation(c, &phi, &x, &y, args.n, args.p, args.path_cap))?;
            meta["y"] = json!(c.format_state(&y));
            let v = json!({
                "n": args.n,
                "p": args.p,
                "paths_checked": rep.paths_checked,
                "nonzero_terms": rep.nonzero_terms,
                "max_discrepancy": rep.max_discrepancy.to_string(),
                "passed": rep.passed(),
            });
            (v, !rep.passed())
        }
    };
    let rows: Vec<Vec<String>> = match result["sequence"].as_array() {
        Some(seq) if !seq.is_empty() => seq
            .iter()
            .map(|s| vec![s["horizon"].to_string(), s["value"].to_string(), s["exact"].as_str().unwrap_or("").to_string()])
            .collect(),
        _ => vec![vec![String::new(), result.get("value").map_or_else(|| result["max_discrepancy"].to_string(), |v| v.to_string()), result["exact"].as_str().unwrap_or("").to_string()]],
    };
    meta["result"] = result;
    Ok(Report::new(meta, vec!["horizon", "value", "exact"], rows).failed(failed))
}
