use anyhow::Result;
use clap::Args;
use recmart_core::htransform::{convergence_stats, TransformedChain};
use recmart_core::martin::{mixture_profile, parse_mixture, profile_from_boundary};
use recmart_core::models::ClosedForms;
use recmart_core::with_chain;
use serde_json::json;

use super::{base, boundary, chain, rational, seed, state};
use crate::error::{flag, usage};
use crate::output::{cell, num, OutputArgs, Report};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub chain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Boundary point of the profile (`+inf`, `-inf`, a ray, ...).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "mixture")]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mixture: Option<String>,
    /// Return weight of the transformed chain, a rational in (0, 1).
    #[arg(long, default_value = "1/2")]
    pub r: String,
    /// Starting state; defaults to x0.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trajectories: u64,
    /// Length of each trajectory.
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Extra checkpoints before `--steps`, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Vec<usize>,
    /// Threshold for the convergence witness (distance toward the boundary
    /// point: x on Z and bang-bang, agreement with the ray on the tree, |x|
    /// on Z²).
    #[arg(long, default_value_t = 50.0)]
    pub witness_threshold: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(args: &SimulateArgs) -> Result<Report> {
    let any = chain(&args.chain)?;
    with_chain!(&any, c => run_on(c, args))
}

fn run_on<C: ClosedForms + Clone + 'static>(c: &C, args: &SimulateArgs) -> Result<Report>
where
    C::State: 'static,
{
    let stream = seed(args.seed, "simulate")?;
    let x0 = base(c, &args.x0)?;
    let alpha = boundary(c, &args.alpha)?;
    let phi = match &args.mixture {
        Some(m) => {
            let mu = flag("mixture", parse_mixture(m, |s| c.parse_boundary(s)))?;
            flag("x0", mixture_profile(c, &x0, &mu))?
        }
        None => flag("x0", profile_from_boundary(c, &x0, &alpha))?,
    };
    let r = rational("r", &args.r)?;
    let tc = flag("r", TransformedChain::from_profile(c.clone(), phi, r.clone()))?;
    let start = match &args.start {
        Some(s) => state(c, "start", s)?,
        None => x0.clone(),
    };
    let mut checkpoints: Vec<usize> = args.checkpoints.iter().copied().filter(|&k| k < args.steps).collect();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    checkpoints.push(args.steps);
    if args.steps == 0 {
        return Err(usage("invalid value for --steps: must be positive"));
    }
    let rep = convergence_stats(&tc, &start, |x| c.convergence_witness(&alpha, x), args.trajectories, &checkpoints, args.witness_threshold, &stream)?;
    let stats: Vec<_> = rep
        .checkpoints
        .iter()
        .map(|s| {
            json!({
                "steps": s.steps,
                "fraction_above": num(s.fraction_above),
                "mean": num(s.mean),
                "q10": num(s.quantiles[0]),
                "median": num(s.quantiles[1]),
                "q90": num(s.quantiles[2]),
            })
        })
        .collect();
    let rows = rep
        .checkpoints
        .iter()
        .map(|s| {
            vec![
                s.steps.to_string(),
                cell(s.fraction_above),
                cell(s.mean),
                cell(s.quantiles[0]),
                cell(s.quantiles[1]),
                cell(s.quantiles[2]),
            ]
        })
        .collect();
    let json = json!({
        "command": "simulate",
        "chain": c.label(),
        "x0": c.format_state(&x0),
        "profile": tc.profile().provenance.to_string(),
        "r": r.to_string(),
        "start": c.format_state(&start),
        "trajectories": rep.trajectories,
        "seed": args.seed,
        "witness_threshold": num(rep.threshold),
        "checkpoints": stats,
    });
    Ok(Report::new(json, vec!["steps", "fraction_above", "mean", "q10", "median", "q90"], rows))
}
