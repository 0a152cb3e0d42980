use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dqo_core::algo::{AlgoId, Role};
use dqo_core::bench::{self, BenchOptions};
use dqo_core::data::{generate_dataset, generate_fk_pair, DatasetSpec, FkSpec};
use dqo_core::io::{read_relation, write_relation};
use dqo_core::mav::{Mav, MavPattern, MavRegistry, Physicality, TriState};
use dqo_core::optimizer::{self, LogicalPlan, Mode, OptResult};
use dqo_core::oracle::{oracle_group, oracle_join};
use dqo_core::props::{infer_props, MetaProps};
use dqo_core::{Error, QueryStats, Relation};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "dqo", version, about = "Deep query optimisation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key-only dataset and write it as a relation file.
    Gen(GenArgs),
    /// Time the grouping variants on one dataset or a sweep of group counts.
    BenchGroup(BenchArgs),
    /// Find the best plan for the example join + group-by query.
    Optimize(OptimizeArgs),
    /// Emit the DP tables of all eight property cells as CSV.
    DpTable(DpTableArgs),
    /// Manage the algorithmic view registry.
    Mav {
        #[command(subcommand)]
        command: MavCommand,
    },
}

#[derive(Args)]
struct SeedArg {
    /// Defaults to $DQO_SEED, then 42.
    #[arg(long, env = "DQO_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    groups: usize,
    #[arg(long)]
    sorted: bool,
    #[arg(long)]
    dense: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Relation file to benchmark. Without it a dataset is generated.
    #[arg(long, conflicts_with_all = ["rows", "groups", "sweep"])]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000_000)]
    rows: usize,
    /// Single group count; ignored with --sweep.
    #[arg(long, default_value_t = 1024)]
    groups: usize,
    /// Sweep group counts 2^1..2^20 (clipped to --rows).
    #[arg(long)]
    sweep: bool,
    #[arg(long)]
    sorted: bool,
    #[arg(long)]
    dense: bool,
    #[command(flatten)]
    seed: SeedArg,
    /// Comma-separated grouping algorithms.
    #[arg(long, value_delimiter = ',', default_value = "HG,SPHG,OG,SOG,BSG")]
    algos: Vec<String>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct StatsArgs {
    #[arg(long, default_value_t = QueryStats::DEFAULT.n_r)]
    n_r: u64,
    #[arg(long, default_value_t = QueryStats::DEFAULT.n_s)]
    n_s: u64,
    #[arg(long, default_value_t = QueryStats::DEFAULT.join_out)]
    join_out: u64,
    #[arg(long, default_value_t = QueryStats::DEFAULT.group_out)]
    group_out: u64,
}

impl StatsArgs {
    fn stats(&self) -> Result<QueryStats> {
        Ok(QueryStats::new(
            self.n_r,
            self.n_s,
            self.join_out,
            self.group_out,
        )?)
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ModeArg {
    Sqo,
    Dqo,
    Both,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Properties of R, e.g. `unsorted,dense`.
    #[arg(long = "R")]
    r: String,
    /// Properties of S, e.g. `sorted,sparse`.
    #[arg(long = "S")]
    s: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Registry file of algorithmic views to apply before enumeration.
    #[arg(long)]
    mavs: Option<PathBuf>,
    /// Print the plan tree.
    #[arg(long)]
    explain: bool,
    /// Generate matching data, run the chosen plan(s) and check them
    /// against the reference operators.
    #[arg(long)]
    execute: bool,
    #[command(flatten)]
    stats: StatsArgs,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Args)]
struct DpTableArgs {
    #[command(flatten)]
    stats: StatsArgs,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MavCommand {
    /// Append a view to a registry file (created if missing).
    Add {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        role: String,
        /// T, F or *.
        #[arg(long, default_value = "*")]
        sorted: String,
        /// T, F or *.
        #[arg(long, default_value = "*")]
        dense: String,
        #[arg(long)]
        choice: String,
        #[arg(long, default_value = "full")]
        physicality: String,
    },
    /// Print the views of a registry file.
    List {
        #[arg(long)]
        registry: PathBuf,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = DatasetSpec {
        n_rows: args.rows,
        n_groups: args.groups,
        sorted: args.sorted,
        dense: args.dense,
        seed: args.seed.seed,
    };
    let rel = generate_dataset(&spec)?;
    write_relation(&rel, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    println!("{} {}", args.out.display(), infer_props(&rel));
    Ok(())
}

fn parse_algos(names: &[String]) -> Result<Vec<AlgoId>> {
    names
        .iter()
        .map(|n| {
            let algo: AlgoId = n.parse()?;
            if algo.role() != Role::Group {
                bail!("{algo} is not a grouping algorithm");
            }
            Ok(algo)
        })
        .collect()
}

fn cmd_bench_group(args: BenchArgs) -> Result<bool> {
    let algos = parse_algos(&args.algos)?;
    let opts = BenchOptions {
        repetitions: args.reps,
        warmup: args.warmup,
    };
    if opts.repetitions == 0 {
        bail!("--reps must be at least 1");
    }
    let mut datasets: Vec<Relation> = Vec::new();
    if let Some(path) = &args.input {
        datasets.push(read_relation(path).with_context(|| format!("reading {}", path.display()))?);
    } else {
        let counts = if args.sweep {
            bench::sweep_group_counts(args.rows)
        } else {
            vec![args.groups]
        };
        for groups in counts {
            datasets.push(generate_dataset(&DatasetSpec {
                n_rows: args.rows,
                n_groups: groups,
                sorted: args.sorted,
                dense: args.dense,
                seed: args.seed.seed,
            })?);
        }
    }

    let mut rows = Vec::new();
    let mut agree = true;
    for rel in &datasets {
        let dataset_rows = bench::bench_dataset(&algos, rel, opts)?;
        agree &= bench::checksums_agree(&dataset_rows);
        rows.extend(dataset_rows);
    }
    bench::write_bench_csv(&rows, output(args.out.as_ref())?)?;
    if !agree {
        eprintln!("error: checksums disagree across algorithms");
    }
    Ok(agree)
}

fn parse_side(text: &str, n_rows: u64, n_groups: u64) -> Result<MetaProps> {
    let mut sorted = None;
    let mut dense = None;
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.to_ascii_lowercase().as_str() {
            "sorted" => sorted = Some(true),
            "unsorted" => sorted = Some(false),
            "dense" => dense = Some(true),
            "sparse" => dense = Some(false),
            other => bail!("unknown property {other:?} (use sorted|unsorted, dense|sparse)"),
        }
    }
    match (sorted, dense) {
        (Some(sorted), Some(dense)) => Ok(MetaProps::new(sorted, dense, n_rows, n_groups)),
        _ => bail!("{text:?} must name both sortedness and density"),
    }
}

fn report(mode: Mode, res: &OptResult, explain: bool) {
    println!(
        "{mode}: best={} cost={} states={}",
        res.best_plan.summary(),
        res.best_cost,
        res.enumerated_state_count
    );
    if explain {
        print!("{}", res.best_plan.explain());
    }
}

fn execute_and_verify(
    lp: &LogicalPlan,
    stats: &QueryStats,
    seed: u64,
    results: &[&OptResult],
) -> Result<()> {
    if lp.r.dense != lp.s.dense {
        bail!("--execute needs R and S to share density");
    }
    let (r, s) = generate_fk_pair(&FkSpec {
        n_r: stats.n_r as usize,
        n_s: stats.n_s as usize,
        n_groups: stats.group_out as usize,
        r_sorted: lp.r.sorted,
        s_sorted: lp.s.sorted,
        dense: lp.r.dense,
        seed,
    })?;
    let expected = oracle_group(&optimizer::rekey_by_payload(&oracle_join(&r, &s))?);
    for res in results {
        let got = optimizer::execute_plan(&res.best_plan, &r, &s)?.canonical();
        if got != expected {
            bail!(
                "{} disagrees with the reference result",
                res.best_plan.summary()
            );
        }
        println!(
            "execute {}: {} groups, matches reference",
            res.best_plan.summary(),
            got.len()
        );
    }
    Ok(())
}

fn cmd_optimize(args: OptimizeArgs) -> Result<()> {
    let stats = args.stats.stats()?;
    let r = parse_side(&args.r, stats.n_r, stats.n_r)?;
    let s = parse_side(&args.s, stats.n_s, stats.n_s.min(stats.n_r))?;
    let lp = LogicalPlan::new(r, s);
    let registry = args
        .mavs
        .as_ref()
        .map(|p| MavRegistry::load(p).with_context(|| format!("loading {}", p.display())))
        .transpose()?;

    let modes: &[Mode] = match args.mode {
        ModeArg::Sqo => &[Mode::Sqo],
        ModeArg::Dqo => &[Mode::Dqo],
        ModeArg::Both => &[Mode::Sqo, Mode::Dqo],
    };
    let mut results = Vec::new();
    for &mode in modes {
        let res = optimizer::enumerate(&lp, &stats, mode, registry.as_ref())
            .with_context(|| format!("{mode} enumeration for R {r}, S {s}"))?;
        report(mode, &res, args.explain);
        results.push(res);
    }
    if let [sqo, dqo] = results.as_slice() {
        println!(
            "improvement factor: {:.4}",
            sqo.best_cost.value() / dqo.best_cost.value()
        );
    }
    if args.execute {
        let refs: Vec<&OptResult> = results.iter().collect();
        execute_and_verify(&lp, &stats, args.seed.seed, &refs)?;
    }
    Ok(())
}

fn cmd_dp_table(args: DpTableArgs) -> Result<()> {
    let cells = optimizer::dp_pivot_table(&args.stats.stats()?)?;
    optimizer::write_pivot_csv(&cells, output(args.out.as_ref())?)?;
    Ok(())
}

fn cmd_mav(command: MavCommand) -> Result<()> {
    match command {
        MavCommand::Add {
            registry,
            id,
            role,
            sorted,
            dense,
            choice,
            physicality,
        } => {
            let mut reg = MavRegistry::load_or_default(&registry)?;
            let mav = Mav {
                id,
                pattern: MavPattern {
                    role: role.parse()?,
                    sorted: sorted.parse::<TriState>().map_err(anyhow::Error::msg)?,
                    dense: dense.parse::<TriState>().map_err(anyhow::Error::msg)?,
                },
                choice: choice.parse()?,
                physicality: physicality
                    .parse::<Physicality>()
                    .map_err(anyhow::Error::msg)?,
            };
            let line = mav.to_line();
            reg.add(mav)?;
            reg.save(&registry)?;
            println!("added {line}");
        }
        MavCommand::List { registry } => {
            let reg = MavRegistry::load(&registry)
                .with_context(|| format!("loading {}", registry.display()))?;
            for m in reg.mavs() {
                println!("{}", m.to_line());
            }
        }
    }
    Ok(())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidSpec(_)) | Some(Error::InvalidStats(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::BenchGroup(a) => cmd_bench_group(a).and_then(|ok| {
            if ok {
                Ok(())
            } else {
                bail!("benchmark checksums disagree")
            }
        }),
        Command::Optimize(a) => cmd_optimize(a),
        Command::DpTable(a) => cmd_dp_table(a),
        Command::Mav { command } => cmd_mav(command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
