use std::sync::Arc;

use anyhow::Result;
use clap::{Args, ValueEnum};
use recmart_core::chain::{ball, for_each_path, DEFAULT_PATH_CAP};
use recmart_core::green::{green_mc, green_solve, green_solve_exact, McConfig, Policy, Truncation};
use recmart_core::htransform::{
    convergence_stats, k_kernel, r_map, r_map_inverse, rn_identity_check, transience_stats, KTarget, RationalFn,
    TransformParams, TransformedChain,
};
use recmart_core::martin::{check_harmonic_except, profile_from_boundary, total_mass, HarmonicProfile, Provenance};
use recmart_core::models::{BangBang, ClosedForms, Infinity, Ray, Tree, Word, Z2Infinity, Z2Walk, ZEnd, ZWalk};
use recmart_core::potential::{asymptotic_residual, potential_mc, potential_table, verify_harmonicity, PotentialMcConfig};
use recmart_core::sigma::{
    avoidance_function, cylinder_measure, restricted_measure, verify_concatenation, AvoidanceConfig, CylinderConfig,
    HorizonFunctional, Verdict,
};
use recmart_core::{rat, rint, to_f64, Chain, PiRational, Rational, SeedStream};
use serde_json::json;

use super::seed;
use crate::output::{OutputArgs, Report};

const CAP: u64 = DEFAULT_PATH_CAP;
const MC_RUNS: u64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Rational identities only; no randomness.
    Exact,
    /// Seeded Monte Carlo checks.
    Mc,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "exact")]
    pub suite: Suite,
    /// Required for `mc` and `all`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Add a harmonicity check on the deliberately wrong profile φ(x) = x²
    /// on Z, which must fail.
    #[arg(long)]
    pub inject_fault: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    /// Statistical experiments that are reported but do not decide the
    /// exit status.
    Soft,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Soft => "soft",
        }
    }
}

struct Entry {
    id: &'static str,
    property: &'static str,
    status: Status,
    details: String,
}

#[derive(Default)]
struct Conformance {
    entries: Vec<Entry>,
}

impl Conformance {
    fn push(&mut self, id: &'static str, property: &'static str, ok: bool, details: impl Into<String>) {
        self.entries.push(Entry { id, property, status: Status::of(ok), details: details.into() });
    }

    fn soft(&mut self, id: &'static str, property: &'static str, details: impl Into<String>) {
        self.entries.push(Entry { id, property, status: Status::Soft, details: details.into() });
    }

    /// Runs `f`, turning an error into a failed entry.
    fn run(&mut self, id: &'static str, property: &'static str, f: impl FnOnce() -> recmart_core::Result<(bool, String)>) {
        match f() {
            Ok((ok, details)) => self.push(id, property, ok, details),
            Err(e) => self.push(id, property, false, format!("error: {e}")),
        }
    }
}

pub fn run(args: &VerifyArgs) -> Result<Report> {
    let stream = match args.suite {
        Suite::Exact => None,
        Suite::Mc | Suite::All => Some(seed(args.seed, "--suite mc and --suite all")?),
    };
    let mut report = Conformance::default();
    if args.suite != Suite::Mc {
        exact_suite(&mut report);
    }
    if args.inject_fault {
        injected_fault(&mut report);
    }
    if let Some(stream) = &stream {
        mc_suite(&mut report, stream);
    }

    let count = |s: Status| report.entries.iter().filter(|e| e.status == s).count();
    let (pass, fail, soft) = (count(Status::Pass), count(Status::Fail), count(Status::Soft));
    let checks: Vec<_> = report
        .entries
        .iter()
        .map(|e| json!({ "id": e.id, "property": e.property, "status": e.status.as_str(), "details": e.details }))
        .collect();
    let rows = report
        .entries
        .iter()
        .map(|e| vec![e.id.to_string(), e.property.to_string(), e.status.as_str().to_string(), e.details.clone()])
        .collect();
    let json = json!({
        "command": "verify",
        "suite": format!("{:?}", args.suite).to_lowercase(),
        "seed": if stream.is_some() { args.seed } else { None },
        "checks": checks,
        "summary": { "pass": pass, "fail": fail, "soft": soft },
    });
    Ok(Report::new(json, vec!["id", "property", "status", "details"], rows).failed(fail > 0))
}

fn exact_suite(r: &mut Conformance) {
    green_closed_forms(r);
    stationary(r);
    harmonic(r);
    sigma(r);
    htransform(r);
    potential(r);
}

fn max_error<C: ClosedForms>(c: &C, x0: &C::State, pairs: &[(C::State, C::State)], got: &[Rational]) -> recmart_core::Result<usize> {
    let mut wrong = 0;
    for ((x, y), g) in pairs.iter().zip(got) {
        if *g != c.exact_green(x0, x, y)? {
            wrong += 1;
        }
    }
    Ok(wrong)
}

fn green_closed_forms(r: &mut Conformance) {
    r.run("green.z", "Green function on Z", || {
        let z = ZWalk;
        let pairs: Vec<(i64, i64)> = (-6..=6).flat_map(|x| (-6..=6).map(move |y| (x, y))).collect();
        let trunc = Truncation::preferred(&z, 0, 50);
        let wrong = max_error(&z, &0, &pairs, &green_solve_exact(&z, &0, &pairs, &trunc)?)?;
        let g = green_solve(&z, &0, &[(2, 3)], &trunc)?[0].value;
        Ok((wrong == 0 && (g - 4.0).abs() <= 1e-10, format!("{} pairs on radius 50, {wrong} mismatches; G_0(2,3) = {g}", pairs.len())))
    });
    r.run("green.bangbang", "Green function of the bang-bang chain", || {
        let bb = BangBang::default();
        let pairs: Vec<(u64, u64)> = (0..=8).flat_map(|x| (0..=8).map(move |y| (x, y))).collect();
        let trunc = Truncation::preferred(&bb, 0, 50);
        let got = green_solve_exact(&bb, &0, &pairs, &trunc)?;
        let wrong = max_error(&bb, &0, &pairs, &got)?;
        let g11 = &got[pairs.iter().position(|p| *p == (1, 1)).expect("in grid")];
        let g02 = &got[pairs.iter().position(|p| *p == (0, 2)).expect("in grid")];
        let ok = wrong == 0 && *g11 == rat(3, 2) && *g02 == rat(3, 4);
        Ok((ok, format!("{} pairs on radius 50, {wrong} mismatches; G_0(1,1) = {g11}, G_0(0,2) = {g02}", pairs.len())))
    });
    r.run("green.tree", "Green function on the binary tree", || {
        let t = Tree::new(2)?;
        let root = Word::root();
        let words = ball(&t, &root, 3)?;
        let pairs: Vec<(Word, Word)> = words.iter().flat_map(|x| words.iter().map(move |y| (x.clone(), y.clone()))).collect();
        let got = green_solve_exact(&t, &root, &pairs, &Truncation::preferred(&t, root.clone(), 6))?;
        let wrong = max_error(&t, &root, &pairs, &got)?;
        Ok((wrong == 0, format!("{} pairs of depth <= 3 on depth 6, {wrong} mismatches", pairs.len())))
    });
}

fn stationary_row<C: ClosedForms>(c: &C, ys: &[C::State], radius: u64) -> recmart_core::Result<(bool, String)> {
    let x0 = c.base_point();
    let q: Vec<_> = ys.iter().map(|y| (x0.clone(), y.clone())).collect();
    let got = green_solve_exact(c, &x0, &q, &Truncation::preferred(c, x0.clone(), radius))?;
    let wrong = ys.iter().zip(&got).filter(|(y, g)| **g != c.beta(y) / c.beta(&x0)).count();
    Ok((wrong == 0, format!("{}: {} targets on radius {radius}, {wrong} mismatches", c.label(), ys.len())))
}

fn stationary(r: &mut Conformance) {
    const P: &str = "stationary row G(x0, y) = β(y)/β(x0)";
    r.run("stationary.z", P, || stationary_row(&ZWalk, &(-30..=30).collect::<Vec<_>>(), 50));
    r.run("stationary.bangbang", P, || {
        let ys: Vec<u64> = (0..=30).collect();
        let (a, da) = stationary_row(&BangBang::default(), &ys, 50)?;
        let (b, db) = stationary_row(&BangBang::new(rat(1, 5))?, &ys, 50)?;
        Ok((a && b, format!("{da}; {db}")))
    });
    r.run("stationary.tree", P, || {
        let mut ok = true;
        let mut details = Vec::new();
        for k in [2, 3] {
            let t = Tree::new(k)?;
            let (o, d) = stationary_row(&t, &ball(&t, &Word::root(), 3)?, 5)?;
            ok &= o;
            details.push(d);
        }
        Ok((ok, details.join("; ")))
    });
}

fn harmonic_entry<C: ClosedForms>(
    c: &C,
    phi: &HarmonicProfile<C::State>,
    window: &[C::State],
    mass: PiRational,
) -> recmart_core::Result<(bool, String)>
where
    C::State: 'static,
{
    let x0 = c.base_point();
    let rep = check_harmonic_except(c, phi, &x0, window)?;
    let m = total_mass(c, phi)?;
    let ok = rep.passed() && m == mass;
    Ok((ok, format!("{}: {} sites, max residual {}, mass {m} (want {mass})", c.label(), window.len(), rep.max_abs_residual())))
}

fn harmonic(r: &mut Conformance) {
    const P: &str = "boundary profile harmonic off x0";
    r.run("harmonic.z", P, || {
        let phi = profile_from_boundary(&ZWalk, &0, &ZEnd::Plus)?;
        harmonic_entry(&ZWalk, &phi, &(-50..=50).collect::<Vec<_>>(), PiRational::from_int(1))
    });
    r.run("harmonic.bangbang", P, || {
        let bb = BangBang::default();
        let phi = profile_from_boundary(&bb, &0, &Infinity)?;
        harmonic_entry(&bb, &phi, &(0..=50).collect::<Vec<_>>(), PiRational::from_int(4))
    });
    r.run("harmonic.tree", P, || {
        let t = Tree::new(2)?;
        let phi = profile_from_boundary(&t, &Word::root(), &Ray::constant(0))?;
        harmonic_entry(&t, &phi, &ball(&t, &Word::root(), 8)?, PiRational::rational(rat(1, 2)))
    });
    r.run("harmonic.z2", P, || {
        let walk = Z2Walk::new();
        let phi = profile_from_boundary(&walk, &(0, 0), &Z2Infinity)?;
        let rep = check_harmonic_except(&walk, &phi, &(0, 0), &ball(&walk, &(0, 0), 8)?)?;
        let m = total_mass(&walk, &phi)?;
        Ok((rep.passed() && m == PiRational::from_int(1), format!("z2: radius 8, max residual {}, mass {m}", rep.max_abs_residual())))
    });
}

fn injected_fault(r: &mut Conformance) {
    r.run("harmonic.injected-fault", "boundary profile harmonic off x0", || {
        let phi = HarmonicProfile::rational(0i64, Provenance::User("x^2".into()), |x: &i64| rint(x * x));
        let window: Vec<i64> = (-5..=5).collect();
        let rep = check_harmonic_except(&ZWalk, &phi, &0, &window)?;
        let ones = rep.residuals.iter().filter(|(_, v)| *v == PiRational::from_int(1)).count();
        Ok((
            rep.passed(),
            format!("φ(x) = x² on [-5, 5]: residual 1 at {ones} of {} sites, max residual {}", rep.residuals.len(), rep.max_abs_residual()),
        ))
    });
}

fn sigma(r: &mut Conformance) {
    r.run("sigma.restricted", "restricted measure E_x[F φ(X_n)]", || {
        let phi = profile_from_boundary(&ZWalk, &0, &ZEnd::Plus)?;
        let mut checked = 0;
        let mut ok = true;
        for n in 0..=5 {
            for x in -2..=3i64 {
                for f in [HorizonFunctional::One { n }, HorizonFunctional::Avoid { state: -1, n }] {
                    let mut want = rint(0);
                    for_each_path(&ZWalk, &x, n, CAP, |path, p| want += p * f.evaluate(path) * rint(2 * path[n].max(0)))?;
                    ok &= restricted_measure(&ZWalk, &phi, &x, &f, CAP)?.exact == Some(PiRational::rational(want));
                    checked += 1;
                }
            }
        }
        Ok((ok, format!("Z: {checked} functionals against path enumeration")))
    });
    r.run("sigma.concatenation", "concatenation identity", || {
        let phi = profile_from_boundary(&ZWalk, &0, &ZEnd::Plus)?;
        let t = Tree::new(2)?;
        let tphi = profile_from_boundary(&t, &Word::root(), &Ray::constant(0))?;
        let mut ok = true;
        let mut paths = 0;
        for (n, p) in [(1, 3), (2, 4)] {
            for y in -2..=2i64 {
                let rep = verify_concatenation(&ZWalk, &phi, &0, &y, n, p, CAP)?;
                ok &= rep.passed();
                paths += rep.paths_checked;
            }
            for y in ["@", "0", "1", "0.0"] {
                let rep = verify_concatenation(&t, &tphi, &Word::root(), &t.parse_state(y)?, n, p, CAP)?;
                ok &= rep.passed();
                paths += rep.paths_checked;
            }
        }
        Ok((ok, format!("Z and tree, (n, p) in {{(1, 3), (2, 4)}}: {paths} paths, discrepancy 0 required")))
    });
    r.run("sigma.cylinder-divergence", "cylinder measures need not converge", || {
        let phi = profile_from_boundary(&ZWalk, &0, &ZEnd::Plus)?;
        let a = HorizonFunctional::Path(vec![0i64, 1, 2]);
        let m = cylinder_measure(&ZWalk, &phi, &0, &a, &[4, 6, 8, 10, 12], &CylinderConfig::default())?;
        let seq: Vec<String> = m.sequence.iter().map(|s| s.exact.as_ref().map_or_else(|| s.value.to_string(), |e| e.to_string())).collect();
        Ok((m.verdict == Some(Verdict::Diverges), format!("Z, A = {{X = 0, 1, 2}}: {}", seq.join(", "))))
    });
    r.run("sigma.avoidance", "avoidance function", || {
        let phi = profile_from_boundary(&ZWalk, &0, &ZEnd::Plus)?;
        let v = avoidance_function(&ZWalk, &phi, &3, &1, &AvoidanceConfig::default())?;
        let b = v.bracket.expect("avoidance always brackets");
        Ok((b.contains(4.0) && b.width() < 0.2, format!("Z, x = 3, y = 1: [{}, {}] should contain 4", b.lower, b.upper)))
    });
}

fn rows_sum_to_one<C: Chain>(tc: &C, window: &[C::State]) -> recmart_core::Result<bool>
where
    C::State: Clone,
{
    for x in window {
        if tc.successors(x)?.iter().map(|(_, p)| p).sum::<Rational>() != rint(1) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn htransform(r: &mut Conformance) {
    r.run("htransform.rows", "transformed chain is stochastic", || {
        let mut ok = true;
        for q in [rat(1, 4), rat(1, 2), rat(3, 4)] {
            let z = TransformedChain::from_boundary(ZWalk, &TransformParams::new(0, ZEnd::Plus, q.clone())?)?;
            ok &= rows_sum_to_one(&z, &ball(&ZWalk, &0, 50)?)?;
            let bb = BangBang::default();
            let tb = TransformedChain::from_boundary(bb.clone(), &TransformParams::new(0, Infinity, q.clone())?)?;
            ok &= rows_sum_to_one(&tb, &ball(&bb, &0, 50)?)?;
            let t = Tree::new(2)?;
            let tt = TransformedChain::from_boundary(t.clone(), &TransformParams::new(Word::root(), Ray::constant(0), q.clone())?)?;
            ok &= rows_sum_to_one(&tt, &ball(&t, &Word::root(), 8)?)?;
            let walk = Z2Walk::new();
            let tz = TransformedChain::from_boundary(walk.clone(), &TransformParams::new((0, 0), Z2Infinity, q)?)?;
            ok &= tz.check_rows(&ball(&walk, &(0, 0), 12)?).is_ok();
        }
        Ok((ok, "r in {1/4, 1/2, 3/4}: Z and bang-bang radius 50, tree depth 8, Z² radius 12 (in Q + Q/π)".to_string()))
    });
    r.run("htransform.rn-identity", "path weights of the transformed chain", || {
        let z = TransformedChain::from_boundary(ZWalk, &TransformParams::new(0, ZEnd::Plus, rat(1, 2))?)?;
        let bb = TransformedChain::from_boundary(BangBang::default(), &TransformParams::new(0, Infinity, rat(1, 4))?)?;
        let mut ok = true;
        let mut paths = 0;
        for n in 0..=5 {
            for x in [-1i64, 0, 2] {
                let rep = rn_identity_check(&z, &x, n, CAP)?;
                ok &= rep.passed();
                paths += rep.paths;
            }
            for x in [0u64, 1, 3] {
                let rep = rn_identity_check(&bb, &x, n, CAP)?;
                ok &= rep.passed();
                paths += rep.paths;
            }
        }
        Ok((ok, format!("Z and bang-bang, n <= 5: {paths} paths")))
    });
    r.run("htransform.k-boundary", "Martin kernel of the transformed chain", || {
        let z = TransformedChain::from_boundary(ZWalk, &TransformParams::new(0, ZEnd::Plus, rat(1, 2))?)?;
        let mut ok = true;
        for x in -20..=20i64 {
            ok &= k_kernel(&z, &x, &KTarget::Boundary)?.exact == Some(rint(1));
        }
        let k25 = k_kernel(&z, &2, &KTarget::State(5))?.exact;
        ok &= k25 == Some(rint(1));
        Ok((ok, "Z, r = 1/2: K(x, +∞) = 1 for |x| <= 20 and K(2, 5) = 1".to_string()))
    });
    r.run("htransform.r-map", "harmonic functions correspond under R", || {
        let z = TransformedChain::from_boundary(ZWalk, &TransformParams::new(0, ZEnd::Plus, rat(1, 2))?)?;
        let window: Vec<i64> = (-50..=50).collect();
        let phi: RationalFn<i64> = Arc::new(|x: &i64| if *x >= 0 { rint(3 * x) } else { rint(-7 * x) });
        let h = r_map(&z, phi.clone(), &window)?;
        let back = r_map_inverse(&z, h, &window)?;
        Ok((window.iter().all(|x| back(x) == phi(x)), "Z, r = 1/2: R⁻¹ R = id on 3x_+ + 7x_− over [-50, 50]".to_string()))
    });
}

fn potential(r: &mut Conformance) {
    r.run("potential.table", "potential kernel of Z²", || {
        let table = potential_table(20);
        let rep = verify_harmonicity(&table);
        let ok = rep.passed()
            && *table.get(1, 1).expect("in table") == PiRational::inv_pi(rint(4))
            && *table.get(2, 1).expect("in table") == PiRational::new(rint(-1), rint(8));
        Ok((ok, format!("radius 20: {} sites, {} violations, a(1,1) = 4/π, a(2,1) = 8/π − 1", rep.checked, rep.violations.len())))
    });
    r.run("potential.asymptotics", "asymptotic expansion of the potential kernel", || {
        let table = potential_table(20);
        let mut worst: f64 = 0.0;
        for n in 1..=20i64 {
            worst = worst.max(asymptotic_residual(&table, &(n, 0))?.abs() * (n * n) as f64);
        }
        Ok((worst <= 0.1, format!("max |residual| · |x|² along the axis to 20: {worst:.6}")))
    });
}

fn mc_pairs<C: Chain>(
    chain: &C,
    x0: &C::State,
    pairs: &[(C::State, C::State)],
    cfg: &McConfig<C::State>,
    stream: &SeedStream,
    exact: impl Fn(usize) -> f64,
) -> recmart_core::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (k, (x, y)) in pairs.iter().enumerate() {
        let r = green_mc(chain, x0, x, y, cfg, &stream.fork(k as u64))?;
        let want = exact(k);
        let z = if r.stderr > 0.0 { (r.value - want).abs() / r.stderr } else if r.value == want { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
    }
    Ok((worst <= 4.0, format!("{}: {} pairs, {} runs each, worst deviation {worst:.3} standard errors", chain.label(), pairs.len(), cfg.trajectories)))
}

fn mc_suite(r: &mut Conformance, stream: &SeedStream) {
    const P: &str = "Monte Carlo Green function";
    r.run("mc.green.z", P, || {
        let pairs = [(0i64, 1i64), (1, 1), (2, 3), (3, 2), (-1, -4)];
        mc_pairs(&ZWalk, &0, &pairs, &McConfig::new(MC_RUNS), &stream.fork(1), |k| {
            to_f64(&ZWalk.exact_green(&0, &pairs[k].0, &pairs[k].1).expect("closed form"))
        })
    });
    r.run("mc.green.bangbang", P, || {
        let bb = BangBang::default();
        let pairs = [(0u64, 0u64), (0, 2), (1, 1), (2, 1), (3, 3)];
        mc_pairs(&bb, &0, &pairs, &McConfig::new(MC_RUNS), &stream.fork(2), |k| {
            to_f64(&bb.exact_green(&0, &pairs[k].0, &pairs[k].1).expect("closed form"))
        })
    });
    r.run("mc.green.tree", P, || {
        let t = Tree::new(2)?;
        let pairs: Vec<(Word, Word)> =
            [("@", "0"), ("0", "0"), ("0", "1"), ("1.0", "1"), ("0.1", "0.1.1")].iter().map(|(a, b)| (t.parse_state(a).expect("word"), t.parse_state(b).expect("word"))).collect();
        mc_pairs(&t, &Word::root(), &pairs, &McConfig::new(MC_RUNS), &stream.fork(3), |k| {
            to_f64(&t.exact_green(&Word::root(), &pairs[k].0, &pairs[k].1).expect("closed form"))
        })
    });
    r.run("mc.green.z2", P, || {
        let walk = Z2Walk::new();
        let pairs = [((1i64, 0i64), (1i64, 0i64)), ((0, 0), (1, 0)), ((2, 2), (1, 1)), ((3, 1), (-2, 0)), ((0, 1), (3, 0))];
        let exact = green_solve_exact(&walk, &(0, 0), &pairs, &Truncation::new((0, 0), 8, Policy::Kill))?;
        let cfg = McConfig::new(MC_RUNS).killed_outside((0, 0), 8);
        mc_pairs(&walk, &(0, 0), &pairs, &cfg, &stream.fork(4), |k| to_f64(&exact[k]))
    });
    r.run("mc.potential", "potential kernel by simulation", || {
        let walk = Z2Walk::new();
        let est = potential_mc(&walk, &(1, 0), &[(20, 0)], MC_RUNS, &stream.fork(5), &PotentialMcConfig::default())?;
        let e = &est[0];
        Ok((
            e.estimate.agrees(e.reference, 4.0),
            format!("x = (1,0), y = (20,0): {:.6} ± {:.6} vs {:.6}", e.estimate.mean, e.estimate.stderr, e.reference),
        ))
    });

    const C: &str = "transformed chain converges to the boundary point";
    match convergence(stream) {
        Ok(lines) => {
            for (id, details) in lines {
                r.soft(id, C, details);
            }
        }
        Err(e) => r.push("mc.convergence", C, false, format!("error: {e}")),
    }
    match TransformedChain::from_boundary(ZWalk, &TransformParams::new(0, ZEnd::Plus, rat(1, 2)).expect("r in (0, 1)")) {
        Ok(z) => {
            let t = transience_stats(&z, 2000, 2000, &stream.fork(9));
            r.soft(
                "mc.transience.z",
                "transformed chain is transient at x0",
                format!(
                    "Z, r = 1/2, 2000 runs of 2000 steps: {:.3} ± {:.3} returns to 0, last return by step 200 in {:.4} of runs",
                    t.mean_returns, t.returns_stderr, t.early_last_return_fraction
                ),
            );
        }
        Err(e) => r.push("mc.transience.z", "transformed chain is transient at x0", false, format!("error: {e}")),
    }
}

fn convergence(stream: &SeedStream) -> recmart_core::Result<Vec<(&'static str, String)>> {
    let half = rat(1, 2);
    let z = TransformedChain::from_boundary(ZWalk, &TransformParams::new(0, ZEnd::Plus, half.clone())?)?;
    let rep = convergence_stats(&z, &0, |x| *x as f64, 2000, &[1000, 10_000], 50.0, &stream.fork(6))?;
    let zline = format!(
        "Z, r = 1/2, 2000 runs: P(X_n > 50) = {:.4} at n = 1000, {:.4} at n = 10000",
        rep.checkpoints[0].fraction_above, rep.checkpoints[1].fraction_above
    );
    let bb = TransformedChain::from_boundary(BangBang::default(), &TransformParams::new(0, Infinity, half.clone())?)?;
    let rep = convergence_stats(&bb, &0, |x| *x as f64, 2000, &[1000], 100.0, &stream.fork(7))?;
    let bline = format!("bang-bang, r = 1/2, 2000 runs: P(X_1000 > 100) = {:.4}", rep.checkpoints[0].fraction_above);
    let t = Tree::new(2)?;
    let alpha = Ray::constant(0);
    let tt = TransformedChain::from_boundary(t, &TransformParams::new(Word::root(), alpha.clone(), half)?)?;
    let rep = convergence_stats(&tt, &Word::root(), |x| alpha.agreement(x) as f64, 500, &[100, 1000, 5000], 0.0, &stream.fork(8))?;
    let medians: Vec<String> = rep.checkpoints.iter().map(|s| format!("{}", s.quantiles[1])).collect();
    let tline = format!("tree, ray 000..., r = 1/2, 500 runs: median agreement {} at n = 100, 1000, 5000", medians.join(", "));
    Ok(vec![("mc.convergence.z", zline), ("mc.convergence.bangbang", bline), ("mc.convergence.tree", tline)])
}
