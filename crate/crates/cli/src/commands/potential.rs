use anyhow::Result;
use clap::Args;
use recmart_core::models::Site;
use recmart_core::potential::{potential_mc, potential_table, residual_scale, verify_harmonicity, PotentialMcConfig};
use serde_json::json;

use super::{seed, states};
use crate::error::usage;
use crate::output::{cell, num, OutputArgs, Report};

#[derive(Args, Debug)]
pub struct PotentialArgs {
    /// The table covers max(|i|, |j|) <= radius.
    #[arg(long, default_value_t = 10)]
    pub radius: usize,
    /// Also report the scaled residual against the asymptotic expansion on
    /// the outermost ring.
    #[arg(long)]
    pub residuals: bool,
    /// Estimate G_origin(x, y) by simulation at this x (e.g. `1,0`).
    #[arg(long, allow_hyphen_values = true)]
    pub mc_x: Option<String>,
    /// Targets y for the estimate, separated by `;`.
    #[arg(long, allow_hyphen_values = true, requires = "mc_x")]
    pub mc_y: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trajectories: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(args: &PotentialArgs) -> Result<Report> {
    if args.radius == 0 {
        return Err(usage("invalid value for --radius: must be positive"));
    }
    let walk = recmart_core::models::Z2Walk::new();
    let table = potential_table(args.radius);
    let harm = verify_harmonicity(&table);
    let n = args.radius as i64;
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let v = table.get(i, j).expect("inside the table");
            let f = v.to_f64();
            rows.push(vec![i.to_string(), j.to_string(), v.to_string(), cell(f)]);
            if i >= 0 && j >= 0 && j <= i {
                values.push(json!({ "x": [i, j], "exact": v.to_string(), "value": num(f) }));
            }
        }
    }
    let mut json = json!({
        "command": "potential",
        "radius": args.radius,
        "harmonicity": {
            "passed": harm.passed(),
            "checked": harm.checked,
            "violations": harm.violations.len(),
        },
        "symmetry": "values listed for 0 <= j <= i; a(i, j) is invariant under sign changes and swapping",
        "values": values,
    });
    if args.residuals {
        json["residual_scale"] = num(residual_scale(&table, args.radius)?);
    }
    if let Some(xs) = &args.mc_x {
        let stream = seed(args.seed, "--mc-x")?;
        let x: Site = super::state(&walk, "mc-x", xs)?;
        let ys: Vec<Site> = match &args.mc_y {
            Some(s) => states(&walk, "mc-y", s)?,
            None => vec![(20, 0), (40, 0), (80, 0)],
        };
        let est = potential_mc(&walk, &x, &ys, args.trajectories, &stream, &PotentialMcConfig::default())?;
        json["monte_carlo"] = json!({
            "x": [x.0, x.1],
            "seed": args.seed,
            "trajectories": args.trajectories,
            "estimates": est.iter().map(|e| json!({
                "y": [e.y.0, e.y.1],
                "mean": num(e.estimate.mean),
                "stderr": num(e.estimate.stderr),
                "reference": num(e.reference),
            })).collect::<Vec<_>>(),
        });
    }
    Ok(Report::new(json, vec!["i", "j", "exact", "value"], rows).failed(!harm.passed()))
}
