//! Command-line front end: load instance documents, dispatch to the
//! solvers and bounds, and emit human tables or JSON.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure,
//! 4 problem over the size cap.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use guesswork_core::active_set::{active_set_upper_bound, ActiveSetConfig};
use guesswork_core::ensemble::{CostVector, CqEnsemble, JointDistribution, Povm};
use guesswork_core::entropic;
use guesswork_core::error::Error;
use guesswork_core::io::{
    generate_example, parse_instance, parse_strategy, ExampleSpec, InstanceDocument,
    SolutionDocument, StrategyDocument,
};
use guesswork_core::misdp::export_misdp;
use guesswork_core::solver::{
    solve_dual_with, solve_primal_with, verify_optimality_with, CertificateMode, SolverOptions,
};
use guesswork_core::strategy::{guess_distribution, ordered_to_sequential, Strategy};
use guesswork_core::DEFAULT_SEED;

#[derive(Parser)]
#[command(
    name = "guesswork",
    about = "Guesswork with quantum side information: exact SDP values, anytime upper bounds, strategies, and entropic certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Instance JSON file
    instance: PathBuf,
    /// Certified accuracy of the reported value
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
    /// Refuse exhaustive builds with more orders than this
    #[arg(long, default_value_t = 50_000)]
    size_cap: u128,
    /// Emit machine-readable JSON on stdout
    #[arg(long)]
    json: bool,
}

impl SolveArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            size_cap: self.size_cap,
            ..SolverOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Exact guesswork via the primal SDP over guess orders
    Solve {
        #[command(flatten)]
        common: SolveArgs,
        /// Check the optimality certificate over orders
        #[arg(long, value_enum)]
        verify: Option<VerifyMode>,
        /// Sample count for --verify sampled
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Where to write the solution document (default: <instance>.solution.json)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Dump the conic problem in the plain-text interchange format
        #[arg(long)]
        dump_conic: Option<PathBuf>,
    },
    /// Exact guesswork via the dual SDP (per-order slack blocks)
    Dual {
        #[command(flatten)]
        common: SolveArgs,
    },
    /// Active-set upper bound (constraint generation + simulated annealing)
    Bound {
        #[command(flatten)]
        common: SolveArgs,
        /// Maximum number of dual constraints (default: d_B^2)
        #[arg(long)]
        kappa: Option<usize>,
        /// Wall-clock budget in seconds
        #[arg(long, default_value_t = 300.0)]
        tmax: f64,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// One progress line per iteration on stderr
        #[arg(long)]
        verbose: bool,
    },
    /// Entropic bounds: Renyi/one-shot bracket, sandwiched entropy, Pliam and Massey lines
    Entropic {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Imperfect-key security certificate from the trace distance to an ideal key
    CertifyKey {
        instance: PathBuf,
        /// Promised normalized trace distance to the ideal key
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        json: bool,
    },
    /// Compile the optimal measurement into a sequential guess-by-guess protocol
    Strategy {
        #[command(flatten)]
        common: SolveArgs,
        /// Solve, then compile the optimal POVM into a sequential protocol
        #[arg(long)]
        reconstruct_sequential: bool,
        /// Where to write the strategy document (default: <instance>.strategy.json)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Replay a previously written strategy document against the instance
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Guesswork across the interpolating four-state family
    Sweep {
        #[arg(long, default_value = "bb84")]
        family: String,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Export the mixed-integer SDP reformulation
    ExportMisdp {
        instance: PathBuf,
        /// Number of POVM outcomes M
        #[arg(long)]
        outcomes: usize,
        /// Output file (default: <instance>.misdp)
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Generate a built-in example instance
    Gen {
        /// bb84 | bb84-family | trine | random-qubits | random-qutrits | tensor2
        name: String,
        /// Angle for bb84-family (radians)
        #[arg(long)]
        phi: Option<f64>,
        /// Number of random states
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Inner family for tensor2
        #[arg(long)]
        inner: Option<String>,
        /// Output file (default: stdout)
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print the generated document to stdout even with --output
        #[arg(long)]
        json: bool,
    },
}

/// 9 significant digits for human tables.
fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (8 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn load(path: &Path) -> Result<(CqEnsemble, CostVector), Error> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SizeCapExceeded { .. } => 4,
        Error::EigenFailure { .. }
        | Error::SolverStalled { .. }
        | Error::Numerical(_)
        | Error::BudgetExhausted { .. }
        | Error::DimensionMismatch(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Solve {
            common,
            verify,
            samples,
            seed,
            output,
            dump_conic,
        } => {
            let (ens, cv) = load(&common.instance)?;
            if let Some(path) = &dump_conic {
                dump_conic_problem(&ens, &cv, path)?;
            }
            let opts = common.options();
            let sol = solve_primal_with(&ens, &cv, &opts)?;
            let report = match verify {
                Some(VerifyMode::Exhaustive) => Some(verify_optimality_with(
                    &ens,
                    &cv,
                    &sol,
                    CertificateMode::Exhaustive,
                    &opts,
                )?),
                Some(VerifyMode::Sampled) => Some(verify_optimality_with(
                    &ens,
                    &cv,
                    &sol,
                    CertificateMode::Sampled { samples, seed },
                    &opts,
                )?),
                None => None,
            };
            let out_path =
                output.unwrap_or_else(|| common.instance.with_extension("solution.json"));
            let doc = SolutionDocument::from_solution(&sol, &ens, Some(seed));
            std::fs::write(&out_path, doc.to_json())?;

            if common.json {
                let mut body = json!({
                    "value": sol.value,
                    "gap": sol.gap,
                    "certificate_margin": sol.certificate_margin,
                    "iterations": sol.iterations,
                    "tolerance": sol.tolerance,
                    "seed": seed,
                    "support": support_names(&sol, &ens),
                    "solution_file": out_path.display().to_string(),
                });
                if let Some(r) = &report {
                    body["verify"] = json!({
                        "worst_margin": r.worst_margin,
                        "orders_checked": r.orders_checked,
                        "witness": r.witness.as_ref().map(|g| g.letters(&ens)),
                    });
                }
                println!("{}", serde_json::to_string_pretty(&body).unwrap());
            } else {
                println!("guesswork value   {}", sig9(sol.value));
                println!("duality gap       {:.3e}", sol.gap);
                println!(
                    "certificate       {:.3e} (min eigenvalue margin)",
                    sol.certificate_margin
                );
                println!("support orders    {}", format_orders(&sol, &ens));
                if let Some(r) = &report {
                    println!(
                        "verified          worst margin {:.3e} over {} orders",
                        r.worst_margin, r.orders_checked
                    );
                }
                println!("solution written  {}", out_path.display());
            }
            Ok(())
        }
        Command::Dual { common } => {
            let (ens, cv) = load(&common.instance)?;
            let sol = solve_dual_with(&ens, &cv, &common.options())?;
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "value": sol.value,
                        "gap": sol.gap,
                        "trace_dual_y": sol.dual_y.trace(),
                        "tolerance": sol.tolerance,
                        "iterations": sol.iterations,
                    }))
                    .unwrap()
                );
            } else {
                println!("dual value        {}", sig9(sol.value));
                println!("tr(Y)             {}", sig9(sol.dual_y.trace()));
                println!("duality gap       {:.3e}", sol.gap);
            }
            Ok(())
        }
        Command::Bound {
            common,
            kappa,
            tmax,
            restarts,
            seed,
            verbose,
        } => {
            let (ens, cv) = load(&common.instance)?;
            let cfg = ActiveSetConfig {
                kappa,
                t_max: tmax,
                sa_restarts: restarts,
                rng_seed: seed,
                verbose,
                solver: common.options(),
                ..ActiveSetConfig::default()
            };
            let res = active_set_upper_bound(&ens, &cv, &cfg)?;
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "upper_bound": res.upper_bound,
                        "converged_exact": res.converged_exact,
                        "iterations": res.iterations,
                        "elapsed_seconds": res.elapsed,
                        "working_set": res.working_set.iter().map(|g| g.letters(&ens)).collect::<Vec<_>>(),
                        "bound_trace": res.bound_trace,
                        "seed": seed,
                        "tolerance": cfg.solver.tol,
                    }))
                    .unwrap()
                );
            } else {
                println!("upper bound       {}", sig9(res.upper_bound));
                println!(
                    "converged exact   {} ({} constraints, {} iterations, {:.2}s)",
                    res.converged_exact,
                    res.working_set.len(),
                    res.iterations,
                    res.elapsed
                );
            }
            Ok(())
        }
        Command::Entropic {
            instance,
            seed,
            json: as_json,
        } => {
            let (ens, _cv) = load(&instance)?;
            entropic_report(&ens, seed, as_json)
        }
        Command::CertifyKey {
            instance,
            epsilon,
            json: as_json,
        } => {
            let (ens, _) = load(&instance)?;
            let cert = entropic::certify_key(&ens, epsilon)?;
            if as_json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "lower_bound": cert.best_lower(),
                        "pliam_line": cert.pliam_lower,
                        "lipschitz_line": cert.lipschitz_lower,
                        "delta_computed": cert.delta_true,
                        "epsilon_declared": cert.epsilon_declared,
                        "delta_used": cert.delta_used,
                        "ideal_value": cert.ideal_value,
                    }))
                    .unwrap()
                );
            } else {
                println!("ideal key value   {}", sig9(cert.ideal_value));
                println!(
                    "distance          computed {:.3e}, declared {:.3e}",
                    cert.delta_true, cert.epsilon_declared
                );
                println!(
                    "guesswork bound   {} (trace-distance line)",
                    sig9(cert.pliam_lower)
                );
                println!(
                    "                  {} (continuity line)",
                    sig9(cert.lipschitz_lower)
                );
            }
            Ok(())
        }
        Command::Strategy {
            common,
            reconstruct_sequential,
            output,
            replay,
        } => {
            let (ens, cv) = load(&common.instance)?;
            if let Some(path) = replay {
                let text = std::fs::read_to_string(&path)?;
                let seq = parse_strategy(&text)?.to_strategy()?;
                let (dist, cost) = guess_distribution(&ens, &Strategy::Sequential(seq), &cv)?;
                print_distribution(&dist, cost, common.json);
                return Ok(());
            }
            if !reconstruct_sequential {
                return Err(Error::Parse(
                    "nothing to do: pass --reconstruct-sequential or --replay FILE".into(),
                ));
            }
            let sol = solve_primal_with(&ens, &cv, &common.options())?;
            let seq = ordered_to_sequential(&sol.povm, ens.len())?;
            let out_path =
                output.unwrap_or_else(|| common.instance.with_extension("strategy.json"));
            let doc = StrategyDocument::from_strategy(&seq, ens.letters());
            std::fs::write(&out_path, doc.to_json())?;
            let (dist, cost) = guess_distribution(&ens, &Strategy::Sequential(seq), &cv)?;
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "expected_cost": cost,
                        "optimal_value": sol.value,
                        "guess_distribution": dist.probs,
                        "p_infinity": dist.p_inf,
                        "strategy_file": out_path.display().to_string(),
                        "tolerance": sol.tolerance,
                    }))
                    .unwrap()
                );
            } else {
                println!("optimal value     {}", sig9(sol.value));
                println!("sequential cost   {}", sig9(cost));
                print!("p(N = k)          ");
                for p in &dist.probs {
                    print!("{} ", sig9(*p));
                }
                println!();
                println!("strategy written  {}", out_path.display());
            }
            Ok(())
        }
        Command::Sweep {
            family,
            points,
            tol,
            json: as_json,
        } => {
            if family != "bb84" {
                return Err(Error::Parse(format!(
                    "unknown sweep family '{family}' (only 'bb84')"
                )));
            }
            if points < 2 {
                return Err(Error::Parse("need at least two grid points".into()));
            }
            let opts = SolverOptions {
                tol,
                ..SolverOptions::default()
            };
            let mut rows = Vec::with_capacity(points);
            for i in 0..points {
                let phi = i as f64 * std::f64::consts::PI / (points - 1) as f64;
                let ens =
                    guesswork_core::io::example_ensemble(&ExampleSpec::Bb84Family { phi })?;
                let cv = CostVector::standard(ens.len());
                let sol = solve_primal_with(&ens, &cv, &opts)?;
                rows.push((phi, sol.value));
            }
            if as_json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "family": family,
                        "points": rows.iter().map(|(phi, v)| json!({"phi": phi, "value": v})).collect::<Vec<_>>(),
                        "tolerance": tol,
                    }))
                    .unwrap()
                );
            } else {
                println!("{:>12}  {:>14}", "phi", "guesswork");
                for (phi, v) in &rows {
                    println!("{:>12}  {:>14}", sig9(*phi), sig9(*v));
                }
            }
            Ok(())
        }
        Command::ExportMisdp {
            instance,
            outcomes,
            output,
            json: as_json,
        } => {
            let (ens, cv) = load(&instance)?;
            let f = export_misdp(&ens, &cv, outcomes)?;
            let out_path = output.unwrap_or_else(|| instance.with_extension("misdp"));
            std::fs::write(&out_path, f.to_text())?;
            if as_json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "file": out_path.display().to_string(),
                        "mode": f.mode.as_str(),
                        "psd_blocks": f.psd_blocks,
                        "binary_matrices": f.binary_matrices,
                        "binary_scalars": f.binary_scalars,
                        "linearization_scalars": f.linearization_scalars,
                        "linearization_inequalities": f.linearization_inequalities,
                    }))
                    .unwrap()
                );
            } else {
                println!(
                    "wrote {} ({} PSD blocks, {} binary matrices, {} linearization scalars, mode {})",
                    out_path.display(),
                    f.psd_blocks,
                    f.binary_matrices,
                    f.linearization_scalars,
                    f.mode.as_str()
                );
            }
            Ok(())
        }
        Command::Gen {
            name,
            phi,
            n,
            seed,
            inner,
            output,
            json: as_json,
        } => {
            let spec = parse_example_name(&name, phi, n, seed, inner.as_deref())?;
            let doc = generate_example(&spec)?;
            emit_document(&doc, output.as_deref(), as_json)
        }
    }
}

fn parse_example_name(
    name: &str,
    phi: Option<f64>,
    n: Option<usize>,
    seed: u64,
    inner: Option<&str>,
) -> Result<ExampleSpec, Error> {
    let spec = match name {
        "bb84" => ExampleSpec::Bb84,
        "bb84-family" => ExampleSpec::Bb84Family {
            phi: phi.ok_or_else(|| Error::Parse("bb84-family needs --phi".into()))?,
        },
        "trine" => ExampleSpec::Trine,
        "random-qubits" => ExampleSpec::RandomQubits {
            n: n.ok_or_else(|| Error::Parse("random-qubits needs --n".into()))?,
            seed,
        },
        "random-qutrits" => ExampleSpec::RandomQutrits {
            n: n.ok_or_else(|| Error::Parse("random-qutrits needs --n".into()))?,
            seed,
        },
        "tensor2" => {
            let inner_name =
                inner.ok_or_else(|| Error::Parse("tensor2 needs --inner NAME".into()))?;
            ExampleSpec::Tensor2(Box::new(parse_example_name(inner_name, phi, n, seed, None)?))
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown example '{other}' (expected bb84, bb84-family, trine, random-qubits, random-qutrits, tensor2)"
            )))
        }
    };
    Ok(spec)
}

fn emit_document(doc: &InstanceDocument, output: Option<&Path>, as_json: bool) -> Result<(), Error> {
    let text = doc.to_json();
    match output {
        Some(path) => {
            std::fs::write(path, &text)?;
            if as_json {
                println!("{text}");
            } else {
                println!("wrote {}", path.display());
            }
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn support_names(
    sol: &guesswork_core::solver::GuessworkSolution,
    ens: &CqEnsemble,
) -> Vec<Vec<String>> {
    sol.support
        .iter()
        .map(|g| g.letters(ens).iter().map(|s| s.to_string()).collect())
        .collect()
}

fn format_orders(sol: &guesswork_core::solver::GuessworkSolution, ens: &CqEnsemble) -> String {
    sol.support
        .iter()
        .map(|g| format!("({})", g.letters(ens).join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_distribution(
    dist: &guesswork_core::strategy::GuessDistribution,
    cost: f64,
    as_json: bool,
) {
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "expected_cost": finite_or_null(cost),
                "guess_distribution": dist.probs,
                "p_infinity": dist.p_inf,
            }))
            .unwrap()
        );
    } else {
        println!("expected cost     {}", sig9(cost));
        print!("p(N = k)          ");
        for p in &dist.probs {
            print!("{} ", sig9(*p));
        }
        println!();
        if dist.p_inf > 0.0 {
            println!("p(N = inf)        {}", sig9(dist.p_inf));
        }
    }
}

fn dump_conic_problem(ens: &CqEnsemble, cv: &CostVector, path: &Path) -> Result<(), Error> {
    use guesswork_core::ensemble::{cost_operator, enumerate_orders};
    use guesswork_core::sdp::{ConicProblem, Constraint};
    use guesswork_core::solver::hermitian_basis;

    let orders: Vec<_> = enumerate_orders(ens.len(), cv.k()).collect();
    let rs: Vec<_> = orders
        .iter()
        .map(|g| cost_operator(ens, cv, g).map(|c| c.matrix))
        .collect::<Result<Vec<_>, _>>()?;
    let d = ens.dim();
    let identity = guesswork_core::linalg::HermitianMatrix::identity(d);
    let constraints = hermitian_basis(d)
        .into_iter()
        .map(|h| Constraint {
            rhs: h.hs_inner(&identity),
            terms: (0..rs.len()).map(|b| (b, h.clone())).collect(),
        })
        .collect();
    let problem = ConicProblem {
        blocks: vec![d; rs.len()],
        objective: rs,
        constraints,
    };
    let mut file = std::fs::File::create(path)?;
    problem.write_text(&mut file)?;
    Ok(())
}

fn entropic_report(ens: &CqEnsemble, seed: u64, as_json: bool) -> Result<(), Error> {
    let n = ens.len() as f64;
    let massey = entropic::massey_bound(ens.probs())?;
    let sandwiched = entropic::sandwiched_h_half(ens)?;
    let best_measured = entropic::best_measured_h_half(ens, seed)?;
    let one_shot_lower = sandwiched.lower.exp() / (1.0 + n.ln());
    let one_shot_upper = best_measured.exp();
    let key = entropic::certify_key(ens, 0.0)?;

    // the classical reduction exists when every state is diagonal
    let classical = classical_reduction(ens);
    let arikan = classical.as_ref().map(entropic::arikan_bounds).transpose()?;
    let pliam = classical
        .as_ref()
        .map(entropic::pliam_side_info_bound)
        .transpose()?;

    let sandwich_n1 = entropic::asymptotic_sandwich(ens, 1, seed)?;
    let sandwich_n2 = entropic::asymptotic_sandwich(ens, 2, seed).ok();

    if as_json {
        let mut body = json!({
            "seed": seed,
            "massey": { "lower": finite_or_null(massey.lower), "applicable": massey.applicable, "entropy_bits": massey.witness_value },
            "sandwiched_h_half": { "value": sandwiched.lower, "exp": sandwiched.lower.exp() },
            "best_measured_h_half": { "value": best_measured, "exp": one_shot_upper },
            "one_shot_bracket": { "lower": one_shot_lower, "upper": one_shot_upper },
            "key_bound": { "lower": key.best_lower(), "delta": key.delta_true },
            "asymptotic_sandwich": {
                "n1": { "lower": sandwich_n1.lower, "upper": sandwich_n1.upper },
            },
        });
        if let Some(s2) = &sandwich_n2 {
            body["asymptotic_sandwich"]["n2"] = json!({ "lower": s2.lower, "upper": s2.upper });
        }
        if let Some(a) = &arikan {
            body["arikan"] = json!({ "lower": a.lower, "upper": a.upper });
        }
        if let Some(p) = &pliam {
            body["pliam"] = json!({ "lower": p.lower, "l1_distance": p.witness_value });
        }
        println!("{}", serde_json::to_string_pretty(&body).unwrap());
    } else {
        println!("{:<34} {:>14} {:>14}", "quantity", "lower", "upper");
        if massey.applicable {
            println!("{:<34} {:>14} {:>14}", "massey G(X)", sig9(massey.lower), "-");
        } else {
            println!(
                "{:<34} {:>14} {:>14}",
                "massey G(X)", "n/a (H<2 bits)", "-"
            );
        }
        if let Some(a) = &arikan {
            println!(
                "{:<34} {:>14} {:>14}",
                "arikan bracket on G(X|Y)",
                sig9(a.lower),
                sig9(a.upper)
            );
        }
        if let Some(p) = &pliam {
            println!("{:<34} {:>14} {:>14}", "pliam G(X|Y)", sig9(p.lower), "-");
        }
        println!(
            "{:<34} {:>14} {:>14}",
            "sandwiched H_1/2(X|B)",
            sig9(sandwiched.lower),
            sig9(sandwiched.lower)
        );
        println!(
            "{:<34} {:>14} {:>14}",
            "best measured H_1/2 (heuristic)",
            "-",
            sig9(best_measured)
        );
        println!(
            "{:<34} {:>14} {:>14}",
            "one-shot bracket on G(X|B)",
            sig9(one_shot_lower),
            sig9(one_shot_upper)
        );
        println!(
            "{:<34} {:>14} {:>14}",
            "trace-distance key bound",
            sig9(key.best_lower()),
            "-"
        );
        println!(
            "{:<34} {:>14} {:>14}",
            "asymptotic rate sandwich (n=1)",
            sig9(sandwich_n1.lower),
            sig9(sandwich_n1.upper)
        );
        if let Some(s2) = &sandwich_n2 {
            println!(
                "{:<34} {:>14} {:>14}",
                "asymptotic rate sandwich (n=2)",
                sig9(s2.lower),
                sig9(s2.upper)
            );
        }
    }
    Ok(())
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

/// The induced classical joint when every state is diagonal: measuring in
/// the computational basis loses nothing.
fn classical_reduction(ens: &CqEnsemble) -> Option<JointDistribution> {
    let d = ens.dim();
    for x in 0..ens.len() {
        for i in 0..d {
            for j in (i + 1)..d {
                if ens.state(x).get(i, j).norm() > 1e-12 {
                    return None;
                }
            }
        }
    }
    let basis: Vec<_> = (0..d)
        .map(|i| {
            (
                guesswork_core::ensemble::OutcomeLabel::Opaque(format!("e{i}")),
                guesswork_core::linalg::HermitianMatrix::pure_state(
                    &guesswork_core::linalg::CVector::basis(d, i),
                ),
            )
        })
        .collect();
    let povm = Povm::new(basis).ok()?;
    JointDistribution::from_measurement(ens, &povm).ok()
}
