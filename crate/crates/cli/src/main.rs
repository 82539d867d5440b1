//! `pairpref`: stable matchings under pairwise preferences from the shell.
//!
//! Exit codes: 0 success, 1 no stable matching, 2 input or gate error,
//! 3 search limit exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pairpref::io::matching_json;
use pairpref::oracle::search_parallel;
use pairpref::sat::{build_gadget, parse_dimacs, sat_brute, GadgetInstance};
use pairpref::{
    find_blocking, generate_instance, parse_instance, parse_matching, serialize_instance, solve, GeneratorParams,
    Instance, OracleAnswer, OracleLimits, OrderClass, SolveError, StabilityNotion, Verdict,
};

const NONE_FOUND: u8 = 1;
const LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "pairpref", version, about = "Stable matchings under pairwise preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the preference class of every agent and of each side.
    Classify { instance: PathBuf },
    /// Run the polynomial solver for a notion, if the instance is in a tractable cell.
    Solve {
        #[arg(long)]
        notion: StabilityNotion,
        instance: PathBuf,
        /// Write solver events here, one JSON object per line.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a matching; print STABLE or a blocking edge.
    Check {
        #[arg(long)]
        notion: StabilityNotion,
        instance: PathBuf,
        #[arg(long)]
        matching: PathBuf,
    },
    /// Exhaustive search for stable matchings (small instances).
    Oracle {
        #[arg(long)]
        notion: StabilityNotion,
        instance: PathBuf,
        /// Stop at the first stable matching.
        #[arg(long)]
        first: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Random instance with preferences of the given classes.
    Generate {
        #[arg(long)]
        men: usize,
        #[arg(long)]
        women: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value = "strict")]
        men_class: OrderClass,
        #[arg(long, default_value = "strict")]
        women_class: OrderClass,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the hardness gadget of a (2,2)-E3-SAT formula (DIMACS).
    Reduce {
        #[arg(long)]
        notion: StabilityNotion,
        cnf: PathBuf,
        /// Write the vertex maps of the construction here.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Compare satisfiability of a formula with stable-matching existence in its gadget.
    VerifyReduction {
        #[arg(long)]
        notion: StabilityNotion,
        cnf: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = OracleLimits::default().max_edges)]
    max_edges: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_nodes)]
    max_nodes: u64,
    /// Seconds.
    #[arg(long, default_value_t = OracleLimits::default().time_budget.as_secs_f64())]
    time_budget: f64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl LimitArgs {
    fn limits(&self) -> Result<OracleLimits> {
        let time_budget = Duration::try_from_secs_f64(self.time_budget).context("invalid --time-budget")?;
        Ok(OracleLimits { max_edges: self.max_edges, max_nodes: self.max_nodes, time_budget })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("invalid instance {}", path.display()))
}

fn load_gadget(path: &Path, notion: StabilityNotion) -> Result<GadgetInstance> {
    let f = parse_dimacs(&read(path)?).with_context(|| format!("invalid formula {}", path.display()))?;
    build_gadget(&f, notion).context("cannot build gadget")
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Classify { instance } => {
            let inst = load_instance(&instance)?;
            print(&classify_report(&inst));
            Ok(0)
        }
        Command::Solve { notion, instance, trace } => cmd_solve(notion, &instance, trace.as_deref()),
        Command::Check { notion, instance, matching } => {
            let inst = load_instance(&instance)?;
            let m = parse_matching(&read(&matching)?, &inst)
                .with_context(|| format!("invalid matching {}", matching.display()))?;
            match find_blocking(notion, &inst, &m)? {
                None => {
                    println!("STABLE");
                    Ok(0)
                }
                Some(w) => {
                    print(&w.to_json(&inst));
                    Ok(NONE_FOUND)
                }
            }
        }
        Command::Oracle { notion, instance, first, limits } => {
            let inst = load_instance(&instance)?;
            let answer = search_parallel(&inst, notion, &limits.limits()?, first, limits.jobs.max(1));
            print(&oracle_report(&inst, &answer));
            Ok(match answer.verdict {
                Verdict::Exists(_) => 0,
                Verdict::NotExists => NONE_FOUND,
                Verdict::LimitExceeded => LIMIT,
            })
        }
        Command::Generate { men, women, density, men_class, women_class, seed } => {
            let params = GeneratorParams::new(men, women, density, seed).classes(men_class, women_class);
            if let Err(e) = params.validate() {
                bail!("invalid generator parameters: {e}");
            }
            println!("{}", serialize_instance(&generate_instance(&params)));
            Ok(0)
        }
        Command::Reduce { notion, cnf, provenance } => {
            let g = load_gadget(&cnf, notion)?;
            if let Some(path) = provenance {
                let text = serde_json::to_string_pretty(&g.provenance())?;
                fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            }
            println!("{}", serialize_instance(&g.instance));
            Ok(0)
        }
        Command::VerifyReduction { notion, cnf, limits } => cmd_verify(notion, &cnf, &limits),
    }
}

fn classify_report(inst: &Instance) -> Value {
    let (men, women) = inst.classify_sides();
    let agents = |names: &[String], classes: &[OrderClass]| -> serde_json::Map<String, Value> {
        names.iter().zip(classes).map(|(n, c)| (n.clone(), json!(c.name()))).collect()
    };
    json!({
        "men": men.name(),
        "women": women.name(),
        "agents": {
            "men": agents(inst.men(), inst.man_classes()),
            "women": agents(inst.women(), inst.woman_classes()),
        },
    })
}

fn cmd_solve(notion: StabilityNotion, path: &Path, trace: Option<&Path>) -> Result<u8> {
    let inst = load_instance(path)?;
    let solution = match solve(&inst, notion) {
        Ok(s) => s,
        Err(SolveError::Hard(cell)) => {
            bail!("{cell} is NP-complete; no polynomial solver applies. Try `pairpref oracle --notion {notion}` on small instances")
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(out) = trace {
        let mut file = fs::File::create(out).with_context(|| format!("cannot write {}", out.display()))?;
        for event in &solution.trace {
            writeln!(file, "{event}")?;
        }
    }
    match solution.matching {
        Some(m) => {
            print(&matching_json(&m, &inst));
            Ok(0)
        }
        None => {
            println!("NONE");
            Ok(NONE_FOUND)
        }
    }
}

fn oracle_report(inst: &Instance, answer: &OracleAnswer) -> Value {
    let verdict = match answer.verdict {
        Verdict::Exists(_) => "exists",
        Verdict::NotExists => "not_exists",
        Verdict::LimitExceeded => "limit",
    };
    let matchings: Vec<Value> = answer.matchings().unwrap_or_default().iter().map(|m| matching_json(m, inst)).collect();
    json!({
        "verdict": verdict,
        "nodes_expanded": answer.nodes_expanded,
        "count": matchings.len(),
        "matchings": matchings,
    })
}

fn cmd_verify(notion: StabilityNotion, cnf: &Path, limits: &LimitArgs) -> Result<u8> {
    let g = load_gadget(cnf, notion)?;
    let assignment = sat_brute(&g.formula)?;
    let forward_sound = match &assignment {
        Some(a) => find_blocking(notion, &g.instance, &g.assignment_to_matching(a)?)?.is_none(),
        None => true,
    };
    let answer = search_parallel(&g.instance, notion, &limits.limits()?, true, limits.jobs.max(1));
    let sat = assignment.is_some();
    let (stable_exists, agree) = match answer.exists() {
        Some(e) => (json!(e), json!(e == sat)),
        None => (json!("limit"), json!("unknown")),
    };
    // a stable gadget matching must read back as a satisfying assignment
    let backward_sound = match answer.matchings() {
        Some(ms) => ms.iter().all(|m| g.extract_assignment(m).is_ok_and(|a| g.formula.satisfies(&a))),
        None => true,
    };
    print(&json!({
        "notion": notion,
        "num_vars": g.formula.num_vars,
        "sat": sat,
        "stable_exists": stable_exists,
        "agree": agree,
        "forward_sound": forward_sound,
        "backward_sound": backward_sound,
    }));
    Ok(if answer.exists().is_none() { LIMIT } else { 0 })
}
