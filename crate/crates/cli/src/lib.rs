//! `pivlab` command line. Exit codes: 0 pass, 1 verification failure (the
//! report is still printed), 2 usage or input error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use pivlab::chains::{
    build_chain, chain_to_piv, enumerate_residue_cycles, parse_flag, piv_pole_expansion_check, rational_plain,
    solve_piv_params, verify_chain, verify_piv, PIVSolution,
};
use pivlab::equilibria::{
    distinct_equilibria, match_to_roots, multistart, solve_equilibrium, EquilibriumProblem, System,
};
use pivlab::exactalg::json::{parse_rational, ratfunc_from_json};
use pivlab::exactalg::{parse_ratfunc, Poly, RatFunc};
use pivlab::families::{
    adler_moser, adler_moser_wronskian, exp_augmented_wronskian, hermite, hermite_wronskian, HermiteSequence, TauVector,
};
use pivlab::monodromy::trivial_monodromy_report;
use pivlab::relations::{
    calogero_report, generalized_stieltjes_check, stieltjes_report, theorem1_check, ChargeConfig, RelationReport,
};
use pivlab::report::{emit_report, Emit, EquilibriumBatch, Format, RunManifest};
use pivlab::roots::complex_roots;
use pivlab::solutions::{build_f, partial_fractions, piv_w_from_f, potential_from_f, SolutionSpec};
use pivlab::{Error, Float, Rational};

#[derive(Parser, Serialize)]
#[command(
    name = "pivlab",
    version,
    about = "Rational Painleve-IV solutions: construction and verification"
)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = pivlab::DEFAULT_BITS)]
    bits: u32,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the output to this file.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    #[serde(skip)]
    format: OutFormat,
    /// Manifest timestamp; defaults to the current UTC time.
    #[arg(long, global = true)]
    #[serde(skip)]
    timestamp: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Serialize)]
enum Command {
    /// Polynomial families.
    #[command(subcommand)]
    Families(FamiliesCmd),
    /// Rational solutions f, w and u.
    #[command(subcommand)]
    Solutions(SolutionsCmd),
    /// Verifiers.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Dressing chains and residue cycles.
    #[command(subcommand)]
    Chains(ChainsCmd),
    /// Equilibrium solver.
    Solve(SolveArgs),
}

#[derive(Subcommand, Serialize)]
enum FamiliesCmd {
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    Hermite,
    AdlerMoser,
    AdlerMoserWronskian,
    HermiteWronskian,
    Exp,
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated Hermite indices.
    #[arg(long)]
    ks: Option<String>,
    /// Comma-separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    taus: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
}

#[derive(Subcommand, Serialize)]
enum SolutionsCmd {
    Build(BuildArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Hermite,
    AdlerMoserStep,
    Exp,
}

#[derive(Args, Serialize)]
struct BuildArgs {
    /// SolutionSpec JSON file.
    #[arg(long, conflicts_with = "mode")]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    ks: Option<String>,
    #[arg(long)]
    k_extra: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    taus: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
}

#[derive(Subcommand, Serialize)]
enum VerifyCmd {
    /// Stieltjes relations at a point set, or the generalized test for f.
    Stieltjes(PointArgs),
    /// Calogero relations at a point set.
    Calogero(PointArgs),
    /// Trivial monodromy of z² + u-type potentials.
    Monodromy(MonodromyArgs),
    /// Residue of (z + w)² vanishes at every pole of w.
    Theorem1(WArgs),
    /// Dressing-chain closure.
    Chain(ChainArgs),
    /// PIV identity for w and (a, b), with the pole expansion check.
    Piv(PivArgs),
}

#[derive(Args, Serialize)]
struct PointArgs {
    /// Zeros of H_n.
    #[arg(long)]
    hermite: Option<u32>,
    /// Zeros of the Hermite Wronskian W(H_k...).
    #[arg(long)]
    wronskian: Option<String>,
    /// ChargeConfig JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rational function f (generalized Stieltjes test; stieltjes only).
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Add this real offset to the first point.
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<f64>,
}

#[derive(Args, Serialize)]
struct MonodromyArgs {
    /// RatFunc JSON file holding u.
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    /// Use u = f' + f².
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// u = z² − 2(log W(H_ks))''.
    #[arg(long)]
    hermite_wronskian: Option<String>,
    /// u = −2(log W_n)'' for Adler–Moser Wronskians (use --taus).
    #[arg(long)]
    adler_moser: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    taus: Option<String>,
    /// Replace u by (1 + ε) u.
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<String>,
    /// Also run the exact residue-ring certificate.
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Serialize)]
struct WArgs {
    #[arg(long, allow_hyphen_values = true)]
    w: String,
}

#[derive(Args, Serialize)]
struct ChainArgs {
    /// JSON file with {"fs": [RatFunc, ...]}.
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Semicolon-separated rational functions.
    #[arg(long, allow_hyphen_values = true)]
    fs: Option<String>,
    #[arg(long)]
    flag: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    mu: String,
}

#[derive(Args, Serialize)]
struct PivArgs {
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    #[arg(long, allow_hyphen_values = true, requires = "b")]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    b: Option<String>,
}

#[derive(Subcommand, Serialize)]
enum ChainsCmd {
    Build(ChainBuildArgs),
    Cycles(CyclesArgs),
}

#[derive(Args, Serialize)]
struct ChainBuildArgs {
    #[arg(long)]
    flag: String,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    mu: String,
}

#[derive(Args, Serialize)]
struct CyclesArgs {
    #[arg(long = "N")]
    n: usize,
    /// Keep cycles with all |value| ≤ bound; defaults to (N−1)/2.
    #[arg(long)]
    bound: Option<i64>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SystemKind {
    Stieltjes,
    Calogero,
}

#[derive(Args, Serialize)]
struct SolveArgs {
    #[arg(long, value_enum)]
    system: SystemKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 8)]
    starts: usize,
    /// Single start from a ChargeConfig JSON file (its points).
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Deflate each found equilibrium before the next start.
    #[arg(long)]
    deflate: bool,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
}

enum Outcome {
    Pass,
    Fail,
}

struct Output {
    body: Box<dyn Emit>,
    outcome: Outcome,
}

fn pass_if(body: impl Emit + 'static, pass: bool) -> Output {
    Output {
        body: Box::new(body),
        outcome: if pass { Outcome::Pass } else { Outcome::Fail },
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn read_json(path: &Path) -> pivlab::Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: invalid JSON: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: pivlab::Result<T>) -> pivlab::Result<T> {
    r.map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_ks(s: &str) -> pivlab::Result<HermiteSequence> {
    let ks = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| usage(format!("--ks: not a positive integer: {t:?}")))
        })
        .collect::<pivlab::Result<Vec<_>>>()?;
    HermiteSequence::new(ks)
}

fn parse_taus(s: Option<&str>) -> pivlab::Result<TauVector> {
    match s {
        None => Ok(TauVector(Vec::new())),
        Some(s) => Ok(TauVector(
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(parse_rational)
                .collect::<pivlab::Result<Vec<_>>>()?,
        )),
    }
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> pivlab::Result<T> {
    v.clone().ok_or_else(|| usage(format!("missing {flag}")))
}

fn families_gen(a: &GenArgs) -> pivlab::Result<Output> {
    let taus = parse_taus(a.taus.as_deref())?;
    let poly_json = |p: Poly| serde_json::to_value(p).expect("poly serializes");
    let polynomial = match a.family {
        Family::Hermite => poly_json(hermite(need(&a.n, "--n")? as u32)),
        Family::AdlerMoser => poly_json(adler_moser(need(&a.n, "--n")?, &taus)?),
        Family::AdlerMoserWronskian => poly_json(adler_moser_wronskian(need(&a.n, "--n")?, &taus)?),
        Family::HermiteWronskian => poly_json(hermite_wronskian(&parse_ks(&need(&a.ks, "--ks")?)?)),
        Family::Exp => {
            let nu = parse_rational(&need(&a.nu, "--nu")?)?;
            serde_json::to_value(exp_augmented_wronskian(need(&a.n, "--n")?, &taus, &nu)?).expect("serializes")
        }
    };
    let body = json!({ "family": a.family, "n": a.n, "ks": a.ks, "taus": taus, "polynomial": polynomial });
    Ok(pass_if(body, true))
}

fn solutions_build(a: &BuildArgs, prec: u32) -> pivlab::Result<Output> {
    let spec: SolutionSpec = match (&a.spec, a.mode) {
        (Some(path), _) => {
            let v = read_json(path)?;
            in_file(path, serde_json::from_value(v).map_err(|e| usage(e.to_string())))?
        }
        (None, Some(Mode::Hermite)) => SolutionSpec::Hermite {
            ks: parse_ks(a.ks.as_deref().unwrap_or(""))?,
            k_extra: need(&a.k_extra, "--k-extra")?,
        },
        (None, Some(Mode::AdlerMoserStep)) => SolutionSpec::AdlerMoserStep {
            n: need(&a.n, "--n")?,
            direction: need(&a.direction, "--direction")?,
            taus: parse_taus(a.taus.as_deref())?,
        },
        (None, Some(Mode::Exp)) => SolutionSpec::Exp {
            n: need(&a.n, "--n")?,
            nu: parse_rational(&need(&a.nu, "--nu")?)?,
            taus: parse_taus(a.taus.as_deref())?,
        },
        (None, None) => return Err(usage("give --spec FILE or --mode")),
    };
    let f = build_f(&spec)?;
    let pf = match partial_fractions(&f, prec) {
        Ok(d) => d.to_json(),
        Err(e) => json!({ "not_in_class": e.to_string() }),
    };
    let body = json!({
        "spec": spec,
        "f": f,
        "w": piv_w_from_f(&f),
        "u": potential_from_f(&f),
        "partial_fractions": pf,
    });
    Ok(pass_if(body, true))
}

fn point_set(a: &PointArgs, prec: u32, relation: &str) -> pivlab::Result<ChargeConfig> {
    let mut cfg = match (&a.hermite, &a.wronskian, &a.config) {
        (Some(n), None, None) => ChargeConfig::unit(
            complex_roots(&hermite(*n), prec)?
                .into_iter()
                .map(|r| r.value)
                .collect(),
        ),
        (None, Some(ks), None) => ChargeConfig::unit(
            complex_roots(&hermite_wronskian(&parse_ks(ks)?), prec)?
                .into_iter()
                .map(|r| r.value)
                .collect(),
        ),
        (None, None, Some(path)) => in_file(path, ChargeConfig::from_json(&read_json(path)?, prec))?,
        _ => {
            return Err(usage(format!(
                "verify {relation}: give exactly one of --hermite, --wronskian, --config"
            )))
        }
    };
    if let Some(eps) = a.perturb {
        let first = cfg
            .points
            .first_mut()
            .ok_or_else(|| usage("--perturb needs a nonempty point set"))?;
        *first += Float::with_val(prec, eps);
    }
    Ok(cfg)
}

fn relation_output(rep: RelationReport) -> Output {
    let pass = rep.pass;
    pass_if(rep, pass)
}

fn verify_monodromy(a: &MonodromyArgs, prec: u32) -> pivlab::Result<Output> {
    let mut u = match (&a.potential, &a.u, &a.f, &a.hermite_wronskian, &a.adler_moser) {
        (Some(path), None, None, None, None) => in_file(path, ratfunc_from_json(&read_json(path)?))?,
        (None, Some(u), None, None, None) => parse_ratfunc(u)?,
        (None, None, Some(f), None, None) => potential_from_f(&parse_ratfunc(f)?),
        (None, None, None, Some(ks), None) => {
            let ld = RatFunc::log_derivative(&hermite_wronskian(&parse_ks(ks)?))?;
            let z = RatFunc::z();
            &(&z * &z) - &ld.derivative().scale(&Rational::from(2))
        }
        (None, None, None, None, Some(n)) => {
            let ld = RatFunc::log_derivative(&adler_moser_wronskian(*n, &parse_taus(a.taus.as_deref())?)?)?;
            ld.derivative().scale(&Rational::from(-2))
        }
        _ => {
            return Err(usage(
                "verify monodromy: give exactly one of --potential, --u, --f, --hermite-wronskian, --adler-moser",
            ))
        }
    };
    if let Some(eps) = &a.perturb {
        u = u.scale(&(parse_rational(eps)? + 1));
    }
    let rep = trivial_monodromy_report(&u, prec)?;
    let mut body = rep.to_json();
    let mut pass = rep.pass;
    if a.exact {
        let exact = pivlab::monodromy::trivial_monodromy_exact(&u, prec)?;
        body["exact_certificate"] = json!(exact);
        pass &= exact;
    }
    Ok(pass_if(body, pass))
}

fn chain_fs(a: &ChainArgs) -> pivlab::Result<Vec<RatFunc>> {
    match (&a.chain, &a.fs, &a.flag) {
        (Some(path), None, None) => {
            let v = read_json(path)?;
            let arr = v
                .get("fs")
                .and_then(Value::as_array)
                .ok_or_else(|| usage(format!("{}: fs: missing or not an array", path.display())))?;
            arr.iter()
                .enumerate()
                .map(|(i, f)| in_file(path, ratfunc_from_json(f).map_err(|e| usage(format!("fs[{i}]: {e}")))))
                .collect()
        }
        (None, Some(fs), None) => fs.split(';').map(parse_ratfunc).collect(),
        (None, None, Some(flag)) => Ok(build_chain(&parse_flag(flag)?, &parse_rational(&a.mu)?)?.fs),
        _ => Err(usage("verify chain: give exactly one of --chain, --fs, --flag")),
    }
}

fn verify_piv_cmd(a: &PivArgs, prec: u32) -> pivlab::Result<Output> {
    let w = parse_ratfunc(&a.w)?;
    let solved = solve_piv_params(&w);
    let solved_json = solved.as_ref().map(|p| {
        json!({
            "a": rational_plain(&p.a),
            "b": rational_plain(&p.b),
            "free_direction": p.free.as_ref().map(|(x, y)| [rational_plain(x), rational_plain(y)]),
        })
    });
    let (params, pass) = match (&a.a, &a.b) {
        (Some(sa), Some(sb)) => {
            let (pa, pb) = (parse_rational(sa)?, parse_rational(sb)?);
            let sol = PIVSolution {
                w: w.clone(),
                a: pa.clone(),
                b: pb.clone(),
            };
            let ok = verify_piv(&sol);
            (Some((pa, pb)), ok)
        }
        _ => (solved.as_ref().map(|p| (p.a.clone(), p.b.clone())), solved.is_some()),
    };
    let defect = params
        .as_ref()
        .map(|(pa, pb)| serde_json::to_value(pivlab::chains::piv_defect(&w, pa, pb)).expect("serializes"));
    let mut body = json!({
        "relation": "piv",
        "verdict": if pass { "pass" } else { "fail" },
        "w": w,
        "a": params.as_ref().map(|p| rational_plain(&p.0)),
        "b": params.as_ref().map(|p| rational_plain(&p.1)),
        "defect": defect,
        "solved_parameters": solved_json,
    });
    if pass {
        let pe = piv_pole_expansion_check(&w, prec)?;
        body["pole_expansion"] = pe.to_json();
        return Ok(pass_if(body, pe.pass));
    }
    Ok(pass_if(body, false))
}

fn chains_build(a: &ChainBuildArgs) -> pivlab::Result<Output> {
    let flag = parse_flag(&a.flag)?;
    let mu = parse_rational(&a.mu)?;
    let chain = match build_chain(&flag, &mu) {
        Ok(c) => c,
        Err(e @ Error::Construction(_)) => {
            let body = json!({ "verdict": "fail", "flag": a.flag, "mu": rational_plain(&mu), "error": e.to_string() });
            return Ok(pass_if(body, false));
        }
        Err(e) => return Err(e),
    };
    let verdict = verify_chain(&chain.fs)?;
    let mut body = json!({ "chain": chain, "verification": verdict.to_json() });
    if chain.period() == 3 {
        let (sol, note) = chain_to_piv(&chain)?;
        body["piv"] = json!({
            "w": sol.w,
            "a": rational_plain(&sol.a),
            "b": rational_plain(&sol.b),
            "verified": verify_piv(&sol),
            "comparison": note.to_json(),
        });
    }
    Ok(pass_if(body, verdict.pass))
}

fn chains_cycles(a: &CyclesArgs) -> pivlab::Result<Output> {
    let bound = a.bound.unwrap_or((a.n as i64 - 1) / 2);
    let cycles = enumerate_residue_cycles(a.n, bound)?;
    let body = json!({ "N": a.n, "bound": bound, "count": cycles.len(), "cycles": cycles });
    Ok(pass_if(body, true))
}

fn solve_cmd(a: &SolveArgs, prec: u32, seed: u64) -> pivlab::Result<Output> {
    let n_from_initial;
    let initial = match &a.initial {
        Some(path) => {
            let cfg = in_file(path, ChargeConfig::from_json(&read_json(path)?, prec))?;
            n_from_initial = Some(cfg.points.len());
            Some(cfg.points)
        }
        None => {
            n_from_initial = None;
            None
        }
    };
    let n = match (a.n, n_from_initial) {
        (Some(n), Some(m)) if n != m => return Err(usage(format!("--n {n} but the initial file has {m} points"))),
        (Some(n), _) | (None, Some(n)) => n,
        (None, None) => return Err(usage("solve: give --n or --initial")),
    };
    if n == 0 {
        return Err(usage("solve: --n must be positive"));
    }
    let system = match a.system {
        SystemKind::Stieltjes => System::stieltjes(n),
        SystemKind::Calogero => System::Calogero,
    };
    let mut runs = match initial {
        Some(z) => {
            let mut p = EquilibriumProblem::new(system.clone(), z, prec);
            p.max_iterations = a.max_iterations;
            p.seed = Some(seed);
            vec![solve_equilibrium(&p)?]
        }
        None if a.deflate => distinct_equilibria(&system, n, prec, a.starts, seed)?,
        None => multistart(&system, n, prec, a.starts, seed)?,
    };
    // Stieltjes equilibria are the zeros of H_n; Calogero ones are not
    // unique, so no reference is imposed.
    let tol = Float::with_val(64, 1e-20);
    let mut pass = runs.iter().any(|r| r.converged);
    if let SystemKind::Stieltjes = a.system {
        let h = hermite(n as u32);
        for r in runs.iter_mut().filter(|r| r.converged) {
            let m = match_to_roots(&r.config, &h, &tol, &format!("H_{n}"))?;
            pass &= m.matched;
            r.matched = Some(m);
        }
    }
    Ok(pass_if(EquilibriumBatch(runs), pass))
}

fn dispatch(cli: &Cli) -> pivlab::Result<Output> {
    let prec = cli.bits;
    match &cli.command {
        Command::Families(FamiliesCmd::Gen(a)) => families_gen(a),
        Command::Solutions(SolutionsCmd::Build(a)) => solutions_build(a, prec),
        Command::Verify(v) => match v {
            VerifyCmd::Stieltjes(a) => match &a.f {
                Some(f) => {
                    if a.hermite.is_some() || a.wronskian.is_some() || a.config.is_some() {
                        return Err(usage("verify stieltjes: --f excludes point-set flags"));
                    }
                    Ok(relation_output(generalized_stieltjes_check(&parse_ratfunc(f)?, prec)?))
                }
                None => Ok(relation_output(stieltjes_report(&point_set(a, prec, "stieltjes")?)?)),
            },
            VerifyCmd::Calogero(a) => {
                if a.f.is_some() {
                    return Err(usage("verify calogero: --f is not supported"));
                }
                Ok(relation_output(calogero_report(&point_set(a, prec, "calogero")?)?))
            }
            VerifyCmd::Monodromy(a) => verify_monodromy(a, prec),
            VerifyCmd::Theorem1(a) => Ok(relation_output(theorem1_check(&parse_ratfunc(&a.w)?, prec)?)),
            VerifyCmd::Chain(a) => {
                let v = verify_chain(&chain_fs(a)?)?;
                let pass = v.pass;
                Ok(pass_if(v.to_json(), pass))
            }
            VerifyCmd::Piv(a) => verify_piv_cmd(a, prec),
        },
        Command::Chains(ChainsCmd::Build(a)) => chains_build(a),
        Command::Chains(ChainsCmd::Cycles(a)) => chains_cycles(a),
        Command::Solve(a) => solve_cmd(a, prec, cli.seed.unwrap_or(0)),
    }
}

/// Run the tool on `argv` (including the program name).
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if cli.bits < 64 {
        let _ = writeln!(err, "error: --bits must be at least 64");
        return 2;
    }
    let output = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    let config = serde_json::to_value(&cli).expect("arguments serialize");
    let timestamp = cli
        .timestamp
        .clone()
        .unwrap_or_else(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let manifest = RunManifest::new(argv[1..].to_vec(), &config, cli.bits, cli.seed, timestamp);
    let text = match emit_report(output.body.as_ref(), &manifest, format) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &text) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return 2;
        }
    }
    let _ = out.write_all(text.as_bytes());
    match output.outcome {
        Outcome::Pass => 0,
        Outcome::Fail => 1,
    }
}
