//! Command-line front end. Every subcommand produces one deterministic JSON
//! report that echoes the parameters needed to replay it.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::cmap::{degeneracy_report, escalate_degeneracy, CmapAlgorithm};
use crate::error::{Error, Result};
use crate::io::{parse_actions, parse_cmap, parse_profile, read_text, render, AuctionInstance};
use crate::maniplab::{
    certify_truthful_on_grid, covering_partitions, demo_nonreasonable, find_manipulation, monotone_tables,
    random_replay, DeclarationGrid, Mechanism,
};
use crate::model::{welfare, Amount};
use crate::payments::{run_vcg_based, PivotRule};
use crate::second_chance::{declarations, run_second_chance, run_second_chance_ir, Action};
use crate::wd::{check_reasonable, AllocationRange};

#[derive(Parser, Debug)]
#[command(name = "mechlab", version, about = "Mechanism-design laboratory for combinatorial auctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a VCG-based mechanism on declared valuations.
    Auction(AuctionArgs),
    /// Run the second chance mechanism with declarations and appeals.
    SecondChance(SecondChanceArgs),
    /// Search for profitable misreports by one agent.
    Manipulate(ManipulateArgs),
    /// Check truthfulness exhaustively over a declaration grid.
    Certify(CertifyArgs),
    /// Measure and escalate the degeneracy of a cost-minimization heuristic.
    Degenerate(DegenerateArgs),
    /// Look for items whose only desirer goes without them.
    CheckReasonable(CheckReasonableArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MechanismArgs {
    /// optimal, single_winner, second_highest, greedy, in_range, or
    /// lowest_type_closure:<alg>.
    #[arg(long, default_value = "optimal")]
    pub alg: String,
    /// zero, clarke_exact, clarke_algorithmic, or clarke_with:<alg>.
    #[arg(long, default_value = "clarke_exact")]
    pub pivot: String,
}

#[derive(Args, Debug)]
pub struct AuctionArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub mech: MechanismArgs,
    /// Extra algorithms whose welfare is reported next to the main run.
    #[arg(long, value_delimiter = ',')]
    pub compare: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SecondChanceArgs {
    /// True types of the agents.
    #[arg(long)]
    pub instance: PathBuf,
    /// Declarations and appeals; truthful and appeal-free when omitted.
    #[arg(long)]
    pub actions: Option<PathBuf>,
    #[command(flatten)]
    pub mech: MechanismArgs,
    /// Step budget for each appeal.
    #[arg(long, default_value_t = 1000)]
    pub time_limit: u64,
    /// Run the individually rational variant; --pivot is then ignored.
    #[arg(long)]
    pub ir: bool,
}

#[derive(Args, Debug)]
pub struct ManipulateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub mech: MechanismArgs,
    /// Only search deviations of this agent.
    #[arg(long)]
    pub agent: Option<usize>,
    /// Deviation grid, `tables:<v1>,<v2>,...` in units.
    #[arg(long, default_value = "tables:0,1,2,3")]
    pub grid: String,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Supplies items, agents and an optional range.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub items: usize,
    #[arg(long, default_value_t = 3)]
    pub agents: usize,
    #[command(flatten)]
    pub mech: MechanismArgs,
    #[arg(long, default_value = "tables:0,1,2,3")]
    pub grid: String,
    /// Random replay samples drawn after the exhaustive pass.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct DegenerateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// optimal, heuristic, first_found[:e1,e2,...], or shortest_path_tree.
    #[arg(long, default_value = "heuristic")]
    pub alg: String,
    /// Forcing parameters in units.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub alphas: Vec<String>,
}

#[derive(Args, Debug)]
pub struct CheckReasonableArgs {
    /// Profile to check; without it, sweep every partition of --items items.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value = "single_winner")]
    pub alg: String,
    #[arg(long, default_value_t = 3)]
    pub items: usize,
}

fn load_profile(path: &Path) -> Result<AuctionInstance> {
    parse_profile(&read_text(path)?)
}

fn mechanism(inst: Option<&AuctionInstance>, args: &MechanismArgs) -> Result<Mechanism> {
    let alg = match inst {
        Some(i) => i.algorithm(&args.alg)?,
        None => crate::wd::AllocationAlgorithm::from_name(&args.alg)?,
    };
    Ok(Mechanism::vcg(alg, PivotRule::from_name(&args.pivot)?))
}

fn grid_values(spec: &str) -> Result<Vec<Amount>> {
    let list = spec
        .strip_prefix("tables:")
        .ok_or_else(|| Error::invalid(format!("grid {spec:?} must look like tables:<v1>,<v2>,...")))?;
    list.split(',').map(Amount::parse_units).collect()
}

fn mech_echo(m: &Mechanism) -> Value {
    json!({ "mechanism": m.name() })
}

pub fn cmd_auction(args: &AuctionArgs) -> Result<Value> {
    let inst = load_profile(&args.instance)?;
    let mech = mechanism(Some(&inst), &args.mech)?;
    let pivot = PivotRule::from_name(&args.mech.pivot)?;
    let outcome = run_vcg_based(mech.alg(), &inst.profile, &pivot, &inst.profile)?;
    let mut comparison = vec![json!({
        "alg": mech.alg().name(),
        "welfare": render::money(welfare(&inst.profile, &outcome.allocation)?),
    })];
    for name in &args.compare {
        let alg = inst.algorithm(name)?;
        let o = alg.allocate(&inst.profile)?;
        comparison.push(json!({ "alg": alg.name(), "welfare": render::money(welfare(&inst.profile, &o)?) }));
    }
    Ok(json!({
        "config": mech_echo(&mech),
        "profile": render::profile(&inst.profile, &inst.names),
        "outcome": render::outcome(&outcome, &inst.names),
        "welfare": comparison,
    }))
}

pub fn cmd_second_chance(args: &SecondChanceArgs) -> Result<Value> {
    let inst = load_profile(&args.instance)?;
    let truth = &inst.profile;
    let actions: Vec<Action> = match &args.actions {
        Some(p) => parse_actions(&read_text(p)?, truth.items())?,
        None => truth.valuations().iter().cloned().map(Action::naked).collect(),
    };
    let alg = inst.algorithm(&args.mech.alg)?;
    let (run, pivot_name) = if args.ir {
        (run_second_chance_ir(&alg, &actions, args.time_limit, truth)?, format!("clarke_with:{}", alg.name()))
    } else {
        let pivot = PivotRule::from_name(&args.mech.pivot)?;
        (run_second_chance(&alg, &actions, &pivot, args.time_limit, truth)?, pivot.name())
    };
    let declared = declarations(&actions, truth.items())?;
    let ir_holds = (0..truth.agents())
        .filter(|&i| actions[i].is_truthful(truth.valuation(i)))
        .all(|i| run.outcome.utilities[i] >= Amount::ZERO);
    Ok(json!({
        "config": {
            "alg": alg.name(),
            "pivot": pivot_name,
            "time_limit": args.time_limit,
            "individually_rational_variant": args.ir,
        },
        "true_types": render::profile(truth, &inst.names),
        "declarations": render::profile(&declared, &inst.names),
        "run": render::second_chance(&run, &inst.names),
        "truthful_utilities_non_negative": ir_holds,
    }))
}

pub fn cmd_manipulate(args: &ManipulateArgs) -> Result<Value> {
    let inst = load_profile(&args.instance)?;
    let mech = mechanism(Some(&inst), &args.mech)?;
    let deviations = monotone_tables(inst.profile.items(), &grid_values(&args.grid)?)?;
    let agents: Vec<usize> = match args.agent {
        Some(a) => vec![a],
        None => (0..inst.profile.agents()).collect(),
    };
    let mut rows = Vec::new();
    for agent in agents {
        let w = find_manipulation(&mech, &inst.profile, agent, &deviations)?;
        rows.push(json!({
            "agent": agent,
            "witness": w.as_ref().map(|w| render::witness(w, &inst.names)),
        }));
    }
    Ok(json!({
        "config": { "mechanism": mech.name(), "grid": args.grid, "deviations": deviations.len() },
        "profile": render::profile(&inst.profile, &inst.names),
        "agents": rows,
    }))
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<Value> {
    let inst = args.instance.as_deref().map(load_profile).transpose()?;
    let (items, agents) = match &inst {
        Some(i) => (i.profile.items(), i.profile.agents()),
        None => (args.items, args.agents),
    };
    let mech = mechanism(inst.as_ref(), &args.mech)?;
    let grid = DeclarationGrid::monotone_tables(items, agents, &grid_values(&args.grid)?)?;
    let names: Vec<String> = (0..agents).map(|i| format!("agent{i}")).collect();
    let witness = certify_truthful_on_grid(&mech, &grid)?;
    let replay = if args.samples > 0 && witness.is_none() {
        Some(random_replay(&mech, &grid, args.samples, args.seed)?)
    } else {
        None
    };
    Ok(json!({
        "config": {
            "mechanism": mech.name(),
            "items": items,
            "agents": agents,
            "grid": args.grid,
            "samples": args.samples,
            "seed": args.seed,
        },
        "profiles": grid.profile_count(),
        "grid_truthful": witness.is_none(),
        "witness": witness.as_ref().map(|w| render::witness(w, &names)),
        "replay_witness": replay.flatten().as_ref().map(|w| render::witness(w, &names)),
    }))
}

pub fn cmd_degenerate(args: &DegenerateArgs) -> Result<Value> {
    let (inst, seed) = parse_cmap(&read_text(&args.instance)?)?;
    let alg = CmapAlgorithm::from_name(&args.alg)?;
    let alphas = args.alphas.iter().map(|a| Amount::parse_units(a)).collect::<Result<Vec<_>>>()?;
    let layout = inst.layout().to_vec();
    let seed_report = degeneracy_report(&inst, &alg, &seed)?;
    let escalation = match escalate_degeneracy(&inst, &alg, &seed, &alphas) {
        Ok(steps) => json!({ "steps": render::escalation(&steps, &layout) }),
        Err(Error::Precondition(msg)) => json!({ "skipped": msg }),
        Err(e) => return Err(e),
    };
    Ok(json!({
        "config": {
            "alg": alg.name(),
            "alphas": alphas.iter().map(|a| render::money(*a)).collect::<Vec<_>>(),
        },
        "seed_type": render::cmap_type(&seed),
        "seed": render::degeneracy(&seed_report, &layout),
        "escalation": escalation,
    }))
}

pub fn cmd_check_reasonable(args: &CheckReasonableArgs) -> Result<Value> {
    if let Some(path) = &args.instance {
        let inst = load_profile(path)?;
        let alg = inst.algorithm(&args.alg)?;
        let w = check_reasonable(&alg, &inst.profile)?;
        return Ok(json!({
            "config": { "alg": alg.name() },
            "profile": render::profile(&inst.profile, &inst.names),
            "reasonable_here": w.is_none(),
            "witness": w.as_ref().map(|w| render::reasonableness(w, &inst.names)),
        }));
    }
    let m = args.items;
    if m == 0 || m > 4 {
        return Err(Error::invalid("partition sweeps cover 1 to 4 items"));
    }
    let mut rows = Vec::new();
    for n in 1..=m {
        for p in covering_partitions(n, m) {
            let range = AllocationRange::everything(n, m).without(&p)?;
            let demo = demo_nonreasonable(&range, &p)?;
            let names: Vec<String> = (0..n).map(|i| format!("agent{i}")).collect();
            rows.push(json!({
                "partition": render::allocation(&p),
                "profile_kind": demo.profile_kind,
                "chosen": render::allocation(&demo.allocation),
                "witness": demo.witness.as_ref().map(|w| json!({ "item": w.item, "agent": names[w.agent] })),
            }));
        }
    }
    let found = rows.iter().filter(|r| !r["witness"].is_null()).count();
    Ok(json!({
        "config": { "items": m, "range": "all allocations except the partition" },
        "partitions": rows.len(),
        "witnesses": found,
        "rows": rows,
    }))
}

/// Runs one subcommand and returns its report.
pub fn run(cli: &Cli) -> Result<Value> {
    let (name, result) = match &cli.command {
        Command::Auction(a) => ("auction", cmd_auction(a)?),
        Command::SecondChance(a) => ("second-chance", cmd_second_chance(a)?),
        Command::Manipulate(a) => ("manipulate", cmd_manipulate(a)?),
        Command::Certify(a) => ("certify", cmd_certify(a)?),
        Command::Degenerate(a) => ("degenerate", cmd_degenerate(a)?),
        Command::CheckReasonable(a) => ("check-reasonable", cmd_check_reasonable(a)?),
    };
    Ok(json!({ "command": name, "report": result }))
}

/// Runs the command and writes the pretty-printed report.
pub fn execute(cli: &Cli) -> Result<()> {
    let report = run(cli)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
