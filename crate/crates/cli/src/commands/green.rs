use anyhow::Result;
use clap::{Args, ValueEnum};
use recmart_core::green::{green_mc, green_solve, green_solve_exact, GreenResult, McConfig, Policy, Truncation, DEFAULT_STEP_CAP};
use recmart_core::models::ClosedForms;
use recmart_core::with_chain;
use serde_json::json;

use super::{base, chain, default_radius, seed, state};
use crate::error::usage;
use crate::output::{cell, num, OutputArgs, Report};

/// Windows up to this size also get a rational solve.
const RATIONAL_LIMIT: usize = 600;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Mc,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Kill,
    Reflect,
}

#[derive(Args, Debug)]
pub struct GreenArgs {
    /// z, z2, bangbang[:q=p/q] or tree[:k=K].
    #[arg(long)]
    pub chain: String,
    /// Base point; defaults to the chain's own (0, origin or root).
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    /// Window radius around x0 for solves (default 50, smaller on the
    /// tree so the window stays under 4096 states); for Monte Carlo, runs
    /// leaving this ball are killed (no window when omitted).
    #[arg(long)]
    pub window_radius: Option<u64>,
    /// Exit handling at the window edge; defaults to reflect where that is
    /// exact and kill otherwise.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Repeat the solve on a window this much larger and report the change.
    #[arg(long, default_value_t = 0)]
    pub margin: u64,
    #[arg(long, default_value_t = 100_000)]
    pub trajectories: u64,
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    pub step_cap: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(args: &GreenArgs) -> Result<Report> {
    let any = chain(&args.chain)?;
    with_chain!(&any, c => run_on(c, args))
}

fn run_on<C: ClosedForms>(c: &C, args: &GreenArgs) -> Result<Report> {
    let x0 = base(c, &args.x0)?;
    let x = state(c, "x", &args.x)?;
    let y = state(c, "y", &args.y)?;
    let result = match args.method {
        MethodArg::ClosedForm => GreenResult::closed_form(c.exact_green(&x0, &x, &y)?),
        MethodArg::Exact => {
            let radius = match args.window_radius {
                Some(r) => r,
                None => default_radius(c, &x0)?,
            };
            let mut trunc = Truncation::preferred(c, x0.clone(), radius).with_margin(args.margin);
            if let Some(p) = args.policy {
                trunc.policy = match p {
                    PolicyArg::Kill => Policy::Kill,
                    PolicyArg::Reflect => Policy::Reflect,
                };
            }
            let mut r = green_solve(c, &x0, &[(x.clone(), y.clone())], &trunc)?.remove(0);
            if r.window.as_ref().is_some_and(|w| w.states <= RATIONAL_LIMIT) {
                r.exact = Some(green_solve_exact(c, &x0, &[(x.clone(), y.clone())], &trunc)?.remove(0));
            }
            r
        }
        MethodArg::Mc => {
            if args.policy == Some(PolicyArg::Reflect) {
                return Err(usage("--policy reflect applies to solves only"));
            }
            let stream = seed(args.seed, "--method mc")?;
            let mut cfg = McConfig::new(args.trajectories);
            cfg.step_cap = args.step_cap;
            if let Some(r) = args.window_radius {
                cfg = cfg.killed_outside(x0.clone(), r);
            }
            green_mc(c, &x0, &x, &y, &cfg, &stream)?
        }
    };
    let window = result.window.as_ref().map(|w| {
        json!({
            "radius": w.radius,
            // Simulation never enumerates the ball.
            "states": if args.method == MethodArg::Mc { None } else { Some(w.states) },
            "policy": w.policy.as_str(),
            "enlargement_delta": w.enlargement_delta.map(num),
        })
    });
    let json = json!({
        "command": "green",
        "chain": c.label(),
        "x0": c.format_state(&x0),
        "x": c.format_state(&x),
        "y": c.format_state(&y),
        "method": result.method.as_str(),
        "value": num(result.value),
        "exact": result.exact.as_ref().map(|v| v.to_string()),
        "stderr": num(result.stderr),
        "samples": result.samples,
        "seed": if args.method == MethodArg::Mc { args.seed } else { None },
        "window": window,
    });
    let row = vec![
        c.label(),
        c.format_state(&x0),
        c.format_state(&x),
        c.format_state(&y),
        result.method.as_str().to_string(),
        cell(result.value),
        result.exact.as_ref().map(|v| v.to_string()).unwrap_or_default(),
        cell(result.stderr),
    ];
    Ok(Report::new(json, vec!["chain", "x0", "x", "y", "method", "value", "exact", "stderr"], vec![row]))
}
