//! Command-line front end. Every subcommand reads JSON or CSV inputs, runs
//! one library suite and emits a [`RunReport`].
//!
//! Exit codes: 0 all checks pass, 1 a check failed or a witness was found,
//! 2 only probe evidence under `--require-certified`, 3 bad input.

mod io;
mod report;

pub use io::{parse_seed, resolve_seed, InputError, MatrixJson, SEED_ENV};
pub use report::{Outcome, RunReport, Verdict, SCHEMA};

use crate::capacity::{bapat_suite, bound_chain, cap, cap_root_bound, equality_case, vdw_suite};
use crate::combi::{jump_system_check, lee_yang, log_submodular_check, phase_normalize, SupportSet};
use crate::detpoly::{johnson_suite, newton_maclaurin_check};
use crate::poly::{DensePoly, PolyJson};
use crate::polarize::{depolarize, gws_iterate, polarize_multi, polarize_uni, GwsOptions};
use crate::stability::{classify_preserver, delta_real_stable, probe_stable, symbol, DeltaOptions, LinOpSpec, PreserverClass, RegionSpec, SymbolSign};
use crate::sep::stability_transport_suite;
use crate::Error;
use clap::{Parser, Subcommand};
use io::{parse_generator, parse_init, parse_list, parse_usize_list, CliResult, Inputs, PencilJson};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (report schema 1)");

#[derive(Debug, Parser)]
#[command(name = "stablekit", version = VERSION, about = "Stable polynomial checks and suites")]
pub struct Cli {
    /// Master seed, decimal or 0x-hex [default: $STABLEKIT_SEED, else 0x5EED]
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Print the full JSON report
    #[arg(long, global = true)]
    pub json: bool,
    /// Treat probe-only evidence as inconclusive (exit 2)
    #[arg(long, global = true)]
    pub require_certified: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Line-restriction probes for stability on a region
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        probes: usize,
        /// H, rhp or disc
        #[arg(long, default_value = "H")]
        region: String,
    },
    /// Real stability of a multiaffine polynomial through Delta_ij >= 0
    DeltaCheck {
        #[arg(long)]
        input: PathBuf,
        /// Cauchy samples per pair
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Polarize a univariate (--m) or degree-bounded (--kappa) polynomial
    Polarize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        /// comma-separated degree bounds; defaults to the degrees of the input
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Greedy symmetrization towards the polarization
    GwsRun {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// write the imbalance trace as CSV here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Symbol of a linear operator and its preserver classification
    Symbol {
        /// identity, derivative:I, or falling:B1,..,Bm (variables 1-based)
        #[arg(long, conflicts_with = "linop")]
        op: Option<String>,
        /// comma-separated degree box for --op
        #[arg(long)]
        kappa: Option<String>,
        /// operator JSON {"kappa", "out_arity", "images": [{"alpha", "poly"}]}
        #[arg(long)]
        linop: Option<PathBuf>,
        /// use T((x - y)^kappa)
        #[arg(long)]
        minus: bool,
        #[arg(long, default_value_t = 200)]
        probes: usize,
    },
    /// Real-rootedness, interlacing and inertia of Det(xA, -B)
    Johnson {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
    },
    /// Fisher products and the Newton / Maclaurin chain
    Fisher {
        #[arg(long = "A")]
        a: PathBuf,
    },
    /// Capacity, and the coefficient bound chain when deg f = arity
    Capacity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Permanent lower bound for a doubly stochastic matrix
    Vdw {
        #[arg(long)]
        matrix: PathBuf,
        /// Sinkhorn-normalize first
        #[arg(long)]
        sinkhorn: bool,
    },
    /// Mixed discriminant lower bound
    Bapat {
        /// {"matrices": [..]}
        #[arg(long)]
        pencil: PathBuf,
    },
    /// Exclusion process evolution with stability and NA checks (sites 1-based)
    SepRun {
        #[arg(long)]
        sites: usize,
        /// "1-2:1.0,2-3:0.5"
        #[arg(long, default_value = "")]
        edges: String,
        /// "1,0,1"
        #[arg(long)]
        init: String,
        /// "0.1,1,10"
        #[arg(long)]
        times: String,
        /// "1:0.5,2:0.1"
        #[arg(long, default_value = "")]
        create: String,
        #[arg(long, default_value = "")]
        annihilate: String,
        /// "1>2:0.7"
        #[arg(long, default_value = "")]
        hops: String,
        #[arg(long, default_value_t = 400)]
        probes: usize,
    },
    /// Lee-Yang polynomial of a Hermitian matrix
    Leeyang {
        #[arg(long = "A")]
        a: PathBuf,
    },
    /// Support combinatorics: jump system, delta-matroid or log-submodularity
    Support {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = ["jump", "delta", "logsub"], default_value = "jump")]
        check: String,
    },
    /// Phase normalization of a Hurwitz stable polynomial
    Phase {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        probes: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::DeltaCheck { .. } => "delta-check",
            Command::Polarize { .. } => "polarize",
            Command::GwsRun { .. } => "gws-run",
            Command::Symbol { .. } => "symbol",
            Command::Johnson { .. } => "johnson",
            Command::Fisher { .. } => "fisher",
            Command::Capacity { .. } => "capacity",
            Command::Vdw { .. } => "vdw",
            Command::Bapat { .. } => "bapat",
            Command::SepRun { .. } => "sep-run",
            Command::Leeyang { .. } => "leeyang",
            Command::Support { .. } => "support",
            Command::Phase { .. } => "phase",
        }
    }
}

struct Ctx {
    seed: u64,
    require_certified: bool,
    inputs: Inputs,
}

/// What a subcommand hands back: verdicts, the JSON result, and an optional
/// plain-text body printed instead of the verdict summary.
struct Outcomes {
    verdicts: Vec<Verdict>,
    result: serde_json::Value,
    text: Option<String>,
}

fn done(verdicts: Vec<Verdict>, result: impl Serialize) -> CliResult<Outcomes> {
    Ok(Outcomes { verdicts, result: serde_json::to_value(result)?, text: None })
}

#[derive(Deserialize)]
struct LinOpJson {
    kappa: Vec<usize>,
    out_arity: usize,
    images: Vec<ImageJson>,
}

#[derive(Deserialize)]
struct ImageJson {
    alpha: Vec<usize>,
    poly: PolyJson,
}

fn linop_from_json(j: LinOpJson) -> CliResult<LinOpSpec> {
    let mut images = Vec::with_capacity(j.images.len());
    for im in j.images {
        images.push((im.alpha, im.poly.to_dense()?));
    }
    let zero = DensePoly::constant(j.out_arity, num_complex::Complex64::new(0.0, 0.0));
    Ok(LinOpSpec::from_fn(j.kappa, j.out_arity, |a| {
        Ok(images.iter().find(|(alpha, _)| alpha == a).map_or_else(|| zero.clone(), |x| x.1.clone()))
    })?)
}

fn linop_from_spec(op: &str, kappa: Option<&str>) -> CliResult<LinOpSpec> {
    let kappa = match kappa {
        Some(k) => parse_usize_list(k)?,
        None => return Err(InputError("--op needs --kappa".into())),
    };
    let (name, arg) = op.split_once(':').unwrap_or((op, ""));
    Ok(match name {
        "identity" => LinOpSpec::identity(kappa)?,
        "derivative" => {
            let i: usize = arg.trim().parse().map_err(|_| InputError(format!("bad variable {arg:?}")))?;
            if i == 0 || i > kappa.len() {
                return Err(InputError(format!("variable {i} outside 1..={}", kappa.len())));
            }
            LinOpSpec::derivative(kappa, i - 1)?
        }
        "falling" => LinOpSpec::falling_factorial_multiplier(kappa, &parse_usize_list(arg)?)?,
        _ => return Err(InputError(format!("unknown operator {op:?}"))),
    })
}

fn run_command(cmd: &Command, ctx: &Ctx) -> CliResult<Outcomes> {
    let rc = ctx.require_certified;
    match cmd {
        Command::Check { input, probes, region } => {
            let f = ctx.inputs.poly(input)?;
            let region = RegionSpec::parse(region)?;
            let v = probe_stable(&f, *probes, ctx.seed, &region)?;
            done(vec![Verdict::stability("stable", &v, rc)], json!({ "region": region, "verdict": v }))
        }
        Command::DeltaCheck { input, samples } => {
            let f = ctx.inputs.multiaffine(input)?;
            let opts = DeltaOptions { samples: *samples, ..DeltaOptions::default() };
            let v = delta_real_stable(&f, ctx.seed, &opts)?;
            done(vec![Verdict::stability("real_stable", &v, rc)], json!({ "verdict": v }))
        }
        Command::Polarize { input, m, kappa } => {
            let f = ctx.inputs.poly(input)?;
            let (g, kappa) = match (m, kappa) {
                (Some(_), Some(_)) => return Err(InputError("give --m or --kappa, not both".into())),
                (Some(m), None) => (polarize_uni(&f, *m)?, vec![*m]),
                (None, k) => {
                    let kappa = match k {
                        Some(k) => parse_usize_list(k)?,
                        None => f.degrees(),
                    };
                    (polarize_multi(&f, &kappa)?, kappa)
                }
            };
            let back = depolarize(&g, &kappa)?;
            let ok = back.approx_eq(&f, 1e-12 * (1.0 + f.max_abs_coeff()));
            done(vec![Verdict::check("diagonal_roundtrip", ok)], json!({ "kappa": kappa, "polarization": PolyJson::from_multiaffine(&g) }))
        }
        Command::GwsRun { input, m, tol, lambda, trace } => {
            let f = ctx.inputs.poly(input)?;
            let run = gws_iterate(&f, *m, &GwsOptions { tol: *tol, lambda: *lambda, ..GwsOptions::default() })?;
            let rate = if *m >= 2 { 1.0 - 1.0 / crate::poly::binomial(*m, 2) } else { 0.0 };
            let ok = run.trace.windows(2).all(|w| w[1] <= rate * w[0] + 1e-12);
            let mut csv = String::from("step,imbalance,pair_i,pair_j\n");
            for (k, v) in run.trace.iter().enumerate() {
                match k.checked_sub(1).and_then(|s| run.pairs.get(s)) {
                    Some(&(i, j)) => csv.push_str(&format!("{k},{v:e},{},{}\n", i + 1, j + 1)),
                    None => csv.push_str(&format!("{k},{v:e},,\n")),
                }
            }
            if let Some(path) = trace {
                std::fs::write(path, &csv)?;
            }
            let mut verdicts = vec![Verdict::check("converged", true).with_detail(format!("deviation {:e}", run.deviation))];
            if (*lambda - 0.5).abs() < f64::EPSILON {
                verdicts.push(Verdict::check("geometric_rate", ok).with_detail(format!("worst ratio {:.6} vs {:.6}", run.worst_ratio(), rate)));
            }
            let result = json!({
                "result": PolyJson::from_multiaffine(&run.result),
                "trace": run.trace,
                "pairs": run.pairs,
                "tol": run.tol,
                "deviation": run.deviation,
                "worst_ratio": run.worst_ratio(),
            });
            Ok(Outcomes { verdicts, result, text: Some(csv) })
        }
        Command::Symbol { op, kappa, linop, minus, probes } => {
            let t = match (op, linop) {
                (Some(op), None) => linop_from_spec(op, kappa.as_deref())?,
                (None, Some(path)) => linop_from_json(serde_json::from_str(&ctx.inputs.read(path)?)?)?,
                _ => return Err(InputError("give --op or --linop".into())),
            };
            let sign = if *minus { SymbolSign::Minus } else { SymbolSign::Plus };
            let s = symbol(&t, sign)?;
            let class = classify_preserver(&t, *probes, ctx.seed)?;
            let v = match &class {
                PreserverClass::RankOneForm { image_verdict } => Verdict::stability("preserver", image_verdict, rc).with_detail("rank one"),
                PreserverClass::SymbolStable { probes, seed } => Verdict::stability(
                    "preserver",
                    &crate::stability::StabilityVerdict::ProbePassed { probes: *probes, seed: *seed },
                    rc,
                ),
                PreserverClass::SymbolFalsified { .. } => Verdict::check("preserver", false).with_detail("symbol falsified"),
            };
            done(vec![v], json!({ "symbol": PolyJson::from_dense(&s), "class": class }))
        }
        Command::Johnson { a, b } => {
            let r = johnson_suite(&ctx.inputs.hermitian(a)?, &ctx.inputs.hermitian(b)?)?;
            let interlace = r.interlacing.iter().all(|x| x.1 == crate::detpoly::InterlaceVerdict::Interlaces);
            let verdicts = vec![
                Verdict::check("real_rooted", r.real_rooted),
                Verdict::check("interlacing", interlace),
                Verdict::check("inertia", r.inertia_match),
            ];
            done(verdicts, json!({ "p": PolyJson::from_dense(&r.p), "report": r }))
        }
        Command::Fisher { a } => {
            let r = newton_maclaurin_check(&ctx.inputs.hermitian(a)?)?;
            let mut verdicts = vec![
                Verdict::check("newton", r.newton.iter().all(|x| x.holds)),
                Verdict::check("monotone", r.monotone.iter().all(|x| x.holds)),
            ];
            if let Some(mc) = &r.maclaurin {
                verdicts.push(Verdict::check("maclaurin", mc.iter().all(|x| x.holds)));
            }
            done(verdicts, r)
        }
        Command::Capacity { input } => {
            let f = ctx.inputs.poly(input)?;
            let m = f.arity();
            if m == 1 && f.homogeneous_degree().is_none() {
                let r = cap_root_bound(&f)?;
                return done(vec![Verdict::check("root_bound", r.holds)], r);
            }
            if f.homogeneous_degree() == Some(m) {
                let stability = probe_stable(&f, crate::stability::DEFAULT_PROBES, ctx.seed, &RegionSpec::UpperHalfPlane)?;
                if stability.is_falsified() {
                    let c = cap(&f)?;
                    return done(vec![Verdict::stability("stable", &stability, rc)], json!({ "cap": c, "stability": stability }));
                }
                let chain = bound_chain(&f)?;
                let eq = equality_case(&f)?;
                let verdicts = vec![Verdict::stability("stable", &stability, rc), Verdict::check("bound_chain", chain.holds())];
                return done(verdicts, json!({ "chain": chain, "equality_case": eq }));
            }
            let c = cap(&f)?;
            done(vec![Verdict::check("converged", !c.diverged)], c)
        }
        Command::Vdw { matrix, sinkhorn } => {
            let b = ctx.inputs.csv_matrix(matrix)?;
            let r = vdw_suite(&b, *sinkhorn)?;
            let verdicts = vec![
                Verdict::check("permanent_bound", r.holds).with_detail(format!("per {:.12} bound {:.12} slack {:e}", r.permanent, r.bound, r.slack)),
                Verdict::check("capacity_one", r.cap_ok),
            ];
            done(verdicts, r)
        }
        Command::Bapat { pencil } => {
            let p: PencilJson = serde_json::from_str(&ctx.inputs.read(pencil)?)?;
            let mats = p.matrices.iter().map(MatrixJson::to_hermitian).collect::<CliResult<Vec<_>>>()?;
            let r = bapat_suite(&mats)?;
            let verdicts = vec![
                Verdict::check("discriminant_bound", r.holds).with_detail(format!("disc {:.12} bound {:.12}", r.disc, r.bound)),
                Verdict::check("capacity_one", r.cap_ok),
                Verdict::check("equality_case", r.equality == r.equality_case.is_power_of_linear),
            ];
            done(verdicts, r)
        }
        Command::SepRun { sites, edges, init, times, create, annihilate, hops, probes } => {
            let gen = parse_generator(*sites, edges, hops, create, annihilate)?;
            let phi0 = parse_init(*sites, init)?;
            let times = parse_list(times)?;
            if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(InputError("times must be finite and nonnegative".into()));
            }
            let r = stability_transport_suite(&phi0, &gen, &times, *probes, ctx.seed)?;
            let mut verdicts = vec![Verdict::stability("initial", &r.initial, rc)];
            for e in &r.entries {
                verdicts.push(Verdict::stability(format!("stable@{}", e.t), &e.verdict, rc));
                verdicts.push(Verdict::check(format!("nc@{}", e.t), e.nc.holds));
                if let Some(na) = &e.na {
                    verdicts.push(Verdict::check(format!("na@{}", e.t), na.holds).with_detail(format!("worst margin {:e}", na.worst_margin)));
                }
            }
            done(verdicts, json!({ "generator": gen, "report": r }))
        }
        Command::Leeyang { a } => {
            let r = lee_yang(&ctx.inputs.hermitian(a)?)?;
            let verdicts = vec![
                Verdict::check("palindromic", r.palindromic),
                Verdict::check("unit_circle", r.unit_circle).with_detail(format!("max deviation {:e}", r.max_circle_deviation)),
            ];
            done(verdicts, r)
        }
        Command::Support { input, check } => {
            let f = ctx.inputs.poly(input)?;
            match check.as_str() {
                "logsub" => {
                    let r = log_submodular_check(&f.to_multiaffine()?)?;
                    done(vec![Verdict::check("log_submodular", r.holds)], r)
                }
                kind => {
                    let s = SupportSet::of_dense(&f);
                    let r = jump_system_check(&s)?;
                    let v = if kind == "delta" { Verdict::check("delta_matroid", r.is_delta_matroid) } else { Verdict::check("jump_system", r.is_jump) };
                    done(vec![v], json!({ "support": s, "report": r }))
                }
            }
        }
        Command::Phase { input, probes } => {
            let f = ctx.inputs.poly(input)?;
            match phase_normalize(&f, *probes, ctx.seed) {
                Ok(r) => {
                    let v = Verdict::stability("hurwitz", &r.hurwitz, rc).with_detail(format!("theta {}", r.theta));
                    done(vec![v], json!({ "theta": r.theta, "normalized": PolyJson::from_dense(&r.normalized), "hurwitz": r.hurwitz }))
                }
                Err(Error::NotCertifiable(msg)) => done(vec![Verdict::check("hurwitz", false).with_detail(msg.clone())], json!({ "error": msg })),
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// Parses arguments and runs one subcommand, returning the report.
pub fn execute(cli: &Cli) -> CliResult<(RunReport, Option<String>)> {
    let seed = resolve_seed(cli.seed.as_deref())?;
    let args_json = serde_json::to_string(&cli.command)?;
    let ctx = Ctx { seed, require_certified: cli.require_certified, inputs: Inputs::new(cli.command.name(), &args_json) };
    let start = Instant::now();
    let out = run_command(&cli.command, &ctx)?;
    let mut timings = BTreeMap::new();
    timings.insert("total_ms".to_string(), start.elapsed().as_secs_f64() * 1e3);
    let report = RunReport {
        schema: SCHEMA,
        command: cli.command.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        inputs_digest: ctx.inputs.digest(),
        seed,
        verdicts: out.verdicts,
        result: out.result,
        timings,
    };
    Ok((report, out.text))
}

fn summary(r: &RunReport) -> String {
    let mut s = String::new();
    for v in &r.verdicts {
        let tag = match v.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
        };
        match &v.detail {
            Some(d) => s.push_str(&format!("{tag} {} ({d})\n", v.name)),
            None => s.push_str(&format!("{tag} {}\n", v.name)),
        }
    }
    s.push_str(&format!("seed 0x{:X}  digest {}\n", r.seed, &r.inputs_digest[..16]));
    s
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((report, text)) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                text.unwrap_or_else(|| summary(&report))
            };
            let _ = std::io::stdout().write_all(body.as_bytes());
            report.exit_code()
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    }
}
