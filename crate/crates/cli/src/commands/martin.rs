use anyhow::Result;
use clap::Args;
use recmart_core::chain::ball;
use recmart_core::green::{martin_kernel, KernelMethod, Truncation};
use recmart_core::martin::{check_harmonic_except, mixture_profile, parse_mixture, profile_from_boundary, total_mass};
use recmart_core::models::ClosedForms;
use recmart_core::with_chain;
use serde_json::json;

use super::{base, boundary, chain, default_radius, state, states};
use crate::error::flag;
use crate::output::{cell, num, OutputArgs, Report};

#[derive(Args, Debug)]
pub struct MartinArgs {
    #[arg(long)]
    pub chain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Boundary point: +inf / -inf on Z, inf on the half-line and the
    /// plane, a ray such as 0.1(0)* on the tree.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "mixture")]
    pub alpha: Option<String>,
    /// Finite boundary measure `w1*a1+w2*a2`; the profile is based at the
    /// chain's base point.
    #[arg(long, allow_hyphen_values = true)]
    pub mixture: Option<String>,
    /// Ball around x0 on which values are listed and harmonicity checked.
    #[arg(long, default_value_t = 5)]
    pub window_radius: u64,
    /// Only list these states (`;`-separated).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Also solve the Martin kernel L_{x0}(x, y) for the listed states.
    #[arg(long, allow_hyphen_values = true)]
    pub kernel_y: Option<String>,
    /// Window radius of the kernel solve; defaults as for `green`.
    #[arg(long, requires = "kernel_y")]
    pub kernel_radius: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(args: &MartinArgs) -> Result<Report> {
    let any = chain(&args.chain)?;
    with_chain!(&any, c => run_on(c, args))
}

fn run_on<C: ClosedForms + Clone + 'static>(c: &C, args: &MartinArgs) -> Result<Report>
where
    C::State: 'static,
{
    let x0 = base(c, &args.x0)?;
    let phi = match &args.mixture {
        Some(m) => {
            let mu = flag("mixture", parse_mixture(m, |s| c.parse_boundary(s)))?;
            flag("x0", mixture_profile(c, &x0, &mu))?
        }
        None => {
            let alpha = boundary(c, &args.alpha)?;
            flag("x0", profile_from_boundary(c, &x0, &alpha))?
        }
    };
    let window = ball(c, &x0, args.window_radius)?;
    let harmonic = check_harmonic_except(c, &phi, &x0, &window)?;
    let mass = total_mass(c, &phi)?;
    let listed = match &args.x {
        Some(s) => states(c, "x", s)?,
        None => window.clone(),
    };
    let kernel_y = args.kernel_y.as_ref().map(|s| state(c, "kernel-y", s)).transpose()?;
    let radius = match args.kernel_radius {
        Some(r) => r,
        None => default_radius(c, &x0)?,
    };
    let trunc = Truncation::preferred(c, x0.clone(), radius);
    let mut values = Vec::with_capacity(listed.len());
    let mut rows = Vec::with_capacity(listed.len());
    for x in &listed {
        let v = phi.evaluate(x);
        let kernel = match &kernel_y {
            Some(y) => Some(martin_kernel(c, &x0, x, y, KernelMethod::Solve(&trunc))?.value),
            None => None,
        };
        values.push(json!({
            "x": c.format_state(x),
            "phi": v.to_string(),
            "value": num(v.to_f64()),
            "kernel": kernel.map(num),
        }));
        rows.push(vec![c.format_state(x), v.to_string(), cell(v.to_f64()), kernel.map(cell).unwrap_or_default()]);
    }
    let failures: Vec<_> = harmonic
        .failures()
        .take(20)
        .map(|(x, r)| json!({ "x": c.format_state(x), "residual": r.to_string() }))
        .collect();
    let json = json!({
        "command": "martin",
        "chain": c.label(),
        "x0": c.format_state(&x0),
        "profile": phi.provenance.to_string(),
        "total_mass": mass.to_string(),
        "total_mass_value": num(mass.to_f64()),
        "harmonic": {
            "window_radius": args.window_radius,
            "states": window.len(),
            "passed": harmonic.passed(),
            "max_abs_residual": num(harmonic.max_abs_residual()),
            "balance_at_base": harmonic.balance_at_base.as_ref().map(|b| b.to_string()),
            "failures": failures,
        },
        "kernel_y": kernel_y.as_ref().map(|y| c.format_state(y)),
        "values": values,
    });
    Ok(Report::new(json, vec!["x", "phi", "value", "kernel"], rows).failed(!harmonic.passed()))
}
