use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use srl::budget::budget_eval;
use srl::generators::{gen_example, gen_noisy, gen_union_of_cosets};
use srl::io;
use srl::regularity::{
    cayley_partition_verify, coset_approximation, dichotomy_tree_builder, good_subspace_search,
    goodness, total_uniformity, uniformity, DichotomyOutcome, SubspaceSearch,
};
use srl::{
    cover_or_witness, dft, find_order_witness, parseval_energy, stability_number,
    verify_order_witness, CoverOrWitness, DenseFunction, Effort, GroupContext, SearchOutcome,
    SetIndicator, SetSide, StabilityNumber, Subspace,
};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "srl", version, about = "Stable arithmetic regularity toolkit for F_p^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, help = "prime p")]
    p: Option<u8>,
    #[arg(long, global = true, help = "dimension n")]
    n: Option<usize>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    k: Option<u64>,
    #[arg(long = "max-codim", global = true)]
    max_codim: Option<usize>,
    #[arg(long = "working-epsilon", global = true)]
    working_epsilon: Option<f64>,
    #[arg(long, global = true, help = "search node budget")]
    effort: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "in", global = true, help = "input set file")]
    input: Option<PathBuf>,
    #[arg(long, global = true, help = "subspace file")]
    subspace: Option<PathBuf>,
    #[arg(long, global = true, help = "output certificate/set file")]
    out: Option<PathBuf>,
    #[arg(long, global = true, help = "structured report file")]
    report: Option<PathBuf>,
    #[arg(long, global = true, help = "worker threads (or SRL_THREADS)")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a fixture or randomized set model
    Gen {
        /// subgroup | basis_set | pairsum_complement | green_sanders | union | noisy
        name: String,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Spectrum of a set's indicator function
    Dft,
    /// Order-property search, witness verification, covers
    Stability {
        /// verify a witness file instead of searching
        #[arg(long)]
        verify: Option<PathBuf>,
        /// run the cover-or-witness procedure
        #[arg(long)]
        cover: bool,
        /// compute the stability number up to --k
        #[arg(long)]
        number: bool,
    },
    /// Per-coset density verdicts
    Goodness,
    /// Balanced-spectrum sup at one y (or the worst over a transversal)
    Uniformity {
        #[arg(long)]
        y: Option<usize>,
        #[arg(long)]
        total: bool,
    },
    /// Good-subspace search by density increment
    Search,
    /// Dichotomy engine: good subspace or tree witness
    Dichotomy,
    /// Coset approximation |A Δ X|
    Approx,
    /// Cayley partition table verification
    Partition,
    /// Stability budget table
    Budget {
        #[arg(long)]
        ell: Option<u64>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var("SRL_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let started = Instant::now();
    match run(&cli) {
        Ok((code, verdict, certificate, trace)) => {
            let report = json!({
                "operation": operation_name(&cli.command),
                "parameters": parameters(&cli),
                "verdict": verdict,
                "certificate": certificate,
                "trace": trace,
                "timings": { "total_ms": started.elapsed().as_millis() as u64 },
            });
            let pretty = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{pretty}");
            if let Some(path) = &cli.report {
                if let Err(e) = std::fs::write(path, pretty) {
                    eprintln!("error writing report: {e}");
                    std::process::exit(1);
                }
            }
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn operation_name(c: &Command) -> &'static str {
    match c {
        Command::Gen { .. } => "gen",
        Command::Dft => "dft",
        Command::Stability { .. } => "stability",
        Command::Goodness => "goodness",
        Command::Uniformity { .. } => "uniformity",
        Command::Search => "search",
        Command::Dichotomy => "dichotomy",
        Command::Approx => "approx",
        Command::Partition => "partition",
        Command::Budget { .. } => "budget",
    }
}

fn parameters(cli: &Cli) -> Value {
    json!({
        "p": cli.p, "n": cli.n, "epsilon": cli.epsilon, "mu": cli.mu, "k": cli.k,
        "max_codim": cli.max_codim, "working_epsilon": cli.working_epsilon,
        "effort": cli.effort, "seed": cli.seed,
        "in": cli.input, "subspace": cli.subspace, "out": cli.out,
        "threads": cli.threads,
    })
}

fn load_set(cli: &Cli) -> srl::Result<(GroupContext, SetIndicator)> {
    let path = cli
        .input
        .as_deref()
        .ok_or_else(|| srl::Error::Parse("--in <set file> is required".into()))?;
    io::read_set(path)
}

fn load_subspace(cli: &Cli, ctx: &GroupContext) -> srl::Result<Subspace> {
    match cli.subspace.as_deref() {
        Some(path) => {
            let (sctx, h) = io::read_subspace(path)?;
            if &sctx != ctx {
                return Err(srl::Error::ContextMismatch);
            }
            Ok(h)
        }
        None => Ok(Subspace::full(ctx)),
    }
}

fn write_set(path: &Path, ctx: &GroupContext, a: &SetIndicator) -> srl::Result<()> {
    if path.extension().is_some_and(|e| e == "srl2") {
        io::write_set_binary(path, ctx, a)
    } else {
        io::write_set_text(path, ctx, a)
    }
}

fn effort(cli: &Cli) -> Effort {
    cli.effort.map(|max_nodes| Effort { max_nodes }).unwrap_or_default()
}

type Outcome = (i32, Value, Value, Value);

fn run(cli: &Cli) -> srl::Result<Outcome> {
    match &cli.command {
        Command::Gen { name, count, rate } => run_gen(cli, name, *count, *rate),
        Command::Dft => {
            let (ctx, a) = load_set(cli)?;
            let f = DenseFunction::indicator(&ctx, &a);
            let s = dft(&ctx, &f)?;
            let (sup, argmax) = s.max_modulus_where(|t| t != 0);
            let (time_e, spec_e) = parseval_energy(&ctx, &f)?;
            let rel = if time_e > 0.0 { (time_e - spec_e).abs() / time_e } else { 0.0 };
            Ok((
                0,
                json!({"status": "ok", "density": a.density(), "sup_nontrivial": sup,
                       "argmax_t": argmax, "parseval_relative_error": rel}),
                Value::Null,
                Value::Null,
            ))
        }
        Command::Stability { verify, cover, number } => run_stability(cli, verify.as_deref(), *cover, *number),
        Command::Goodness => {
            let (ctx, a) = load_set(cli)?;
            let h = load_subspace(cli, &ctx)?;
            let eps = cli.epsilon.unwrap_or(0.1);
            let rep = goodness(&ctx, &a, &h, eps)?;
            let verdict = if rep.is_good() { "good" } else { "bad" };
            Ok((
                0,
                json!({"status": verdict, "bad_count": rep.bad_count, "worst_y": rep.worst_y}),
                serde_json::to_value(&rep).expect("report serializes"),
                Value::Null,
            ))
        }
        Command::Uniformity { y, total } => {
            let (ctx, a) = load_set(cli)?;
            let h = load_subspace(cli, &ctx)?;
            let eps = cli.epsilon.unwrap_or(0.1);
            let rep = if *total {
                total_uniformity(&ctx, &a, &h, eps)?
            } else {
                uniformity(&ctx, &a, &h, y.unwrap_or(0), eps)?
            };
            let verdict = if rep.uniform { "uniform" } else { "non-uniform" };
            Ok((
                0,
                json!({"status": verdict, "sup_coeff": rep.sup_coeff, "argmax_t": rep.argmax_t, "y": rep.y}),
                serde_json::to_value(&rep).expect("report serializes"),
                Value::Null,
            ))
        }
        Command::Search => {
            let (ctx, a) = load_set(cli)?;
            let eps = cli.epsilon.unwrap_or(0.1);
            let max_codim = cli.max_codim.unwrap_or(ctx.n());
            match good_subspace_search(&ctx, &a, eps, max_codim)? {
                SubspaceSearch::Good(gs) => {
                    let mut cert = serde_json::to_value(&gs).expect("certificate serializes");
                    if let Some(out) = &cli.out {
                        io::write_subspace(out, &ctx, &gs.subspace)?;
                        cert["file"] = json!(out);
                    }
                    Ok((
                        0,
                        json!({"status": "good-subspace", "codim": gs.subspace.codim(), "epsilon": gs.epsilon}),
                        cert,
                        serde_json::to_value(&gs.refinement_trace).expect("trace serializes"),
                    ))
                }
                SubspaceSearch::Failure(f) => Ok((
                    2,
                    json!({"status": "failure", "final_codim": f.final_codim, "anomalies": f.anomalies}),
                    Value::Null,
                    serde_json::to_value(&f.refinement_trace).expect("trace serializes"),
                )),
            }
        }
        Command::Dichotomy => {
            let (ctx, a) = load_set(cli)?;
            let k = cli.k.unwrap_or(2);
            let mu = cli.mu.unwrap_or(0.1);
            let max_codim = cli.max_codim.unwrap_or(ctx.n());
            match dichotomy_tree_builder(&ctx, &a, k, mu, max_codim, cli.working_epsilon)? {
                DichotomyOutcome::Good(gs) => {
                    let mut cert = serde_json::to_value(&gs).expect("certificate serializes");
                    if let Some(out) = &cli.out {
                        io::write_subspace(out, &ctx, &gs.subspace)?;
                        cert["file"] = json!(out);
                    }
                    Ok((
                        0,
                        json!({"status": "good-subspace", "codim": gs.subspace.codim()}),
                        cert,
                        Value::Null,
                    ))
                }
                DichotomyOutcome::Tree(tw) => {
                    let mut cert = serde_json::to_value(&tw).expect("certificate serializes");
                    if let Some(out) = &cli.out {
                        io::write_tree_witness(out, &ctx, &tw, a.source())?;
                        cert["file"] = json!(out);
                    }
                    Ok((0, json!({"status": "tree-witness", "height": tw.d}), cert, Value::Null))
                }
                DichotomyOutcome::Inconclusive { level, node, reason } => Ok((
                    2,
                    json!({"status": "inconclusive", "level": level, "node": node, "reason": reason}),
                    Value::Null,
                    Value::Null,
                )),
            }
        }
        Command::Approx => {
            let (ctx, a) = load_set(cli)?;
            let h = load_subspace(cli, &ctx)?;
            let eps = cli.epsilon.unwrap_or(0.1);
            let rep = coset_approximation(&ctx, &a, &h, eps)?;
            if let Some(out) = &cli.out {
                write_set(out, &ctx, &rep.union_set)?;
            }
            Ok((
                0,
                json!({"status": "ok", "sym_diff": rep.sym_diff, "h_is_good": rep.h_is_good,
                       "bound": eps * ctx.order() as f64, "dense_cosets": rep.dense_coset_reps.len()}),
                serde_json::to_value(&rep).expect("report serializes"),
                Value::Null,
            ))
        }
        Command::Partition => {
            let (ctx, a) = load_set(cli)?;
            let h = load_subspace(cli, &ctx)?;
            let eps = cli.epsilon.unwrap_or(0.1);
            let rep = cayley_partition_verify(&ctx, &a, &h, eps)?;
            let verdict = if rep.violations.is_empty() { "ok" } else { "violations" };
            Ok((
                0,
                json!({"status": verdict, "violations": rep.violations.len(), "parts": rep.reps.len()}),
                serde_json::to_value(&rep).expect("report serializes"),
                Value::Null,
            ))
        }
        Command::Budget { ell } => {
            let k = cli.k.unwrap_or(2);
            let mu = cli.mu.unwrap_or(0.1);
            let eps = cli.epsilon.unwrap_or(mu / 4.0);
            let b = budget_eval(k, ell.unwrap_or(k), mu, eps);
            println!("h({}, {})            = {}", b.k, b.ell, b.h_k_ell);
            println!("d_max({})            = {}", b.k, b.d_max);
            println!("m = floor(2/eps)     = {}", b.m);
            println!("D   (f_k = h(k+1,y)) = {}", b.d_big_text);
            println!("D   (f_k = h(k,y))   = {}", b.d_big_statement);
            println!("codim bound (text)   = {}", b.codim_bound_text);
            println!("codim bound (stmt)   = {}", b.codim_bound_statement);
            println!("-log2 nominal eps    = {}", b.nominal_epsilon_neg_log2);
            Ok((
                0,
                json!({"status": "ok"}),
                serde_json::to_value(&b).expect("budget serializes"),
                Value::Null,
            ))
        }
    }
}

fn run_stability(cli: &Cli, verify: Option<&Path>, cover: bool, number: bool) -> srl::Result<Outcome> {
    let (ctx, a) = load_set(cli)?;
    if let Some(wpath) = verify {
        let (w, side) = io::read_order_witness(wpath, &ctx)?;
        let target = match side {
            SetSide::Set => a.clone(),
            SetSide::Complement => a.complement(),
        };
        let valid = verify_order_witness(&ctx, &target, &w);
        return Ok((
            0,
            json!({"status": if valid { "valid" } else { "invalid" }, "k": w.k, "side": side}),
            serde_json::to_value(&w).expect("witness serializes"),
            Value::Null,
        ));
    }
    let k = cli.k.unwrap_or(2) as usize;
    if cover {
        return match cover_or_witness(&ctx, &a, k)? {
            CoverOrWitness::Cover(c) => {
                let mut cert = serde_json::to_value(&c).expect("certificate serializes");
                if let Some(out) = &cli.out {
                    io::write_cover(out, &ctx, &c, a.source())?;
                    cert["file"] = json!(out);
                }
                Ok((
                    0,
                    json!({"status": "cover", "side": c.side, "translates": c.translates.len()}),
                    cert,
                    Value::Null,
                ))
            }
            CoverOrWitness::Witness { side, witness } => {
                let mut cert = serde_json::to_value(&witness).expect("witness serializes");
                if let Some(out) = &cli.out {
                    io::write_order_witness(out, &ctx, &witness, side, a.source())?;
                    cert["file"] = json!(out);
                }
                Ok((0, json!({"status": "witness", "side": side, "k": witness.k}), cert, Value::Null))
            }
        };
    }
    if number {
        return match stability_number(&ctx, &a, k, effort(cli))? {
            StabilityNumber::Certified(s) => {
                Ok((0, json!({"status": "certified", "stability_number": s}), Value::Null, Value::Null))
            }
            StabilityNumber::LowerBound(s) => {
                Ok((2, json!({"status": "lower-bound", "witness_height": s}), Value::Null, Value::Null))
            }
        };
    }
    match find_order_witness(&ctx, &a, k, effort(cli))? {
        SearchOutcome::Witness(w) => {
            let mut cert = serde_json::to_value(&w).expect("witness serializes");
            if let Some(out) = &cli.out {
                io::write_order_witness(out, &ctx, &w, SetSide::Set, a.source())?;
                cert["file"] = json!(out);
            }
            Ok((0, json!({"status": "witness-found", "k": k}), cert, Value::Null))
        }
        SearchOutcome::NoneFound => Ok((
            0,
            json!({"status": format!("{k}-stable (exhaustive)"), "k": k}),
            Value::Null,
            Value::Null,
        )),
        SearchOutcome::BudgetExhausted => {
            Ok((2, json!({"status": "budget-exhausted", "k": k}), Value::Null, Value::Null))
        }
    }
}

fn run_gen(cli: &Cli, name: &str, count: Option<usize>, rate: Option<f64>) -> srl::Result<Outcome> {
    let (ctx, set, spec): (GroupContext, SetIndicator, Value) = match name {
        "union" => {
            let path = cli
                .subspace
                .as_deref()
                .ok_or_else(|| srl::Error::Parse("gen union requires --subspace".into()))?;
            let (ctx, h) = io::read_subspace(path)?;
            let count = count.ok_or_else(|| srl::Error::Parse("gen union requires --count".into()))?;
            let s = gen_union_of_cosets(&ctx, &h, count, cli.seed.unwrap_or(0))?;
            (ctx, s, Value::Null)
        }
        "noisy" => {
            let (ctx, a) = load_set(cli)?;
            let rate = rate.ok_or_else(|| srl::Error::Parse("gen noisy requires --rate".into()))?;
            let (s, flips) = gen_noisy(&ctx, &a, rate, cli.seed.unwrap_or(0))?;
            (ctx, s, json!({"flips": flips}))
        }
        fixture => {
            let p = cli.p.unwrap_or(if fixture == "green_sanders" { 3 } else { 2 });
            let n = cli.n.ok_or_else(|| srl::Error::Parse("gen requires --n".into()))?;
            let (s, spec) = gen_example(fixture, p, n, cli.seed)?;
            let ctx = GroupContext::new(p, n)?;
            (ctx, s, serde_json::to_value(&spec).expect("spec serializes"))
        }
    };
    if let Some(out) = &cli.out {
        write_set(out, &ctx, &set)?;
    }
    Ok((
        0,
        json!({"status": "ok", "size": set.len(), "density": set.density(), "source": set.source()}),
        spec,
        Value::Null,
    ))
}
