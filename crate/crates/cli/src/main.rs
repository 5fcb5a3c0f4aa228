//! `beaverlab`: exhaustive halting censuses of small Turing machine
//! spaces, an equational prover over enumerated axiom systems, shared
//! decision-time statistics, and field-image rendering.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use beaverlab_core::census::{
    busy_beaver, collect_runtimes, fit_table, output_census, run_census, CensusError,
    OutputRule,
};
use beaverlab_core::prover::{
    annotate_system, decide, proof_census, truth_space, AxiomStatus, Consistency,
    DecisionBudget, ProofEvidence, ProofResult, SystemAnnotation, TraceStep,
};
use beaverlab_core::stats::{
    fbb, optime_with, parse_gamma, read_distribution_csv, render_6sig, write_distribution_csv,
    cumulative_fraction, Denominator, StatsError,
};
use beaverlab_core::terms::{
    enumerate_formulas, generate_axiom_systems, parse_equation, AxiomSystem,
};
use beaverlab_core::tm::{self, decode_machine, known_s, known_sigma, machine_count, TmError};
use beaverlab_core::viz::{
    curve_order_for, render_field, render_matrix, render_spectrum_legend, FieldValue,
};

use beaverlab_cli::formats::{self, FormatError};
use beaverlab_cli::manifest::Manifest;

#[derive(Parser)]
#[command(name = "beaverlab", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Curve,
    Matrix,
}

#[derive(Clone, Copy, ValueEnum)]
enum DenominatorArg {
    Total,
    Decided,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputRuleArg {
    /// Tape over the interval of visited head positions.
    VisitedExtent,
    /// The same interval with leading and trailing blanks removed.
    Trimmed,
}

impl OutputRuleArg {
    fn rule(self) -> OutputRule {
        match self {
            OutputRuleArg::VisitedExtent => OutputRule::VisitedExtent,
            OutputRuleArg::Trimmed => OutputRule::Trimmed,
        }
    }

    fn name(self) -> &'static str {
        match self {
            OutputRuleArg::VisitedExtent => "visited-extent",
            OutputRuleArg::Trimmed => "trimmed",
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Rewrite-search depth cap (proof length cap).
    #[arg(long, default_value_t = 17)]
    max_proof_steps: u32,
    /// Size cap on intermediate terms, in leaves.
    #[arg(long, default_value_t = 16)]
    max_term_leaves: u32,
    /// Node cap for the rewrite search frontier.
    #[arg(long, default_value_t = 200_000)]
    max_frontier: usize,
    /// Largest model domain searched for disproofs.
    #[arg(long, default_value_t = 3)]
    model_max_k: u32,
    /// Node cap for one backtracking model search.
    #[arg(long, default_value_t = 500_000)]
    model_node_cap: u64,
}

impl BudgetArgs {
    fn budget(&self) -> DecisionBudget {
        DecisionBudget {
            max_proof_steps: self.max_proof_steps,
            max_term_leaves: self.max_term_leaves,
            max_frontier: self.max_frontier,
            model_max_k: self.model_max_k,
            model_node_cap: self.model_node_cap,
        }
    }

    fn parameters(&self) -> Vec<(String, String)> {
        vec![
            ("max_proof_steps".into(), self.max_proof_steps.to_string()),
            ("max_term_leaves".into(), self.max_term_leaves.to_string()),
            ("max_frontier".into(), self.max_frontier.to_string()),
            ("model_max_k".into(), self.model_max_k.to_string()),
            ("model_node_cap".into(), self.model_node_cap.to_string()),
        ]
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive halting census of the (n,2) machine space.
    TmCensus {
        #[arg(long)]
        states: u32,
        /// Step budget; defaults to the known S(n) for n <= 4.
        #[arg(long)]
        budget: Option<u64>,
        /// Worker count; BEAVER_SHARDS overrides the default.
        #[arg(long)]
        shards: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: CensusFormat,
        /// Also write `<out>.fit.csv` with the reference-curve comparison.
        #[arg(long)]
        fit: bool,
        /// Emit the fit table even when n != 3.
        #[arg(long)]
        force_fit: bool,
        /// Allow overwriting existing output files.
        #[arg(long)]
        regenerate: bool,
    },
    /// Busy Beaver extraction: maxima and champion indexes.
    TmBb {
        #[arg(long)]
        states: u32,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        shards: Option<usize>,
    },
    /// Census of distinct output strings over halting machines.
    TmOutputs {
        #[arg(long)]
        states: u32,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        shards: Option<usize>,
        #[arg(long, value_enum, default_value = "visited-extent")]
        rule: OutputRuleArg,
        /// Write the full `output,count` dump here.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        regenerate: bool,
    },
    /// Run one machine, optionally tracing every configuration.
    TmRun {
        #[arg(long)]
        states: u32,
        #[arg(long)]
        index: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        trace: bool,
    },
    /// Render a runtime or proof-length field as a PPM image.
    Viz {
        /// Render the (n,2) runtime field.
        #[arg(long, conflicts_with = "truthspace")]
        states: Option<u32>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        shards: Option<usize>,
        /// Render a proof-length field from a truth-space CSV.
        #[arg(long)]
        truthspace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "curve")]
        layout: Layout,
        /// Hilbert curve order; default fits the cell count.
        #[arg(long)]
        order: Option<u32>,
        /// Output image; defaults to `field_<n>x2_order<k>.ppm` for
        /// machine-space renders.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Crop `x,y,w,h` of the full render.
        #[arg(long)]
        crop: Option<String>,
        /// Also write the spectrum legend strip.
        #[arg(long)]
        legend: Option<PathBuf>,
        #[arg(long)]
        regenerate: bool,
    },
    /// Enumerate the canonical formula corpus of one length.
    LogicFormulas {
        #[arg(long)]
        length: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        regenerate: bool,
    },
    /// Generate axiom systems as subset masks over a corpus.
    LogicSystems {
        #[arg(long)]
        length: u32,
        /// Keep only the first N systems (an initial segment).
        #[arg(long)]
        sample: Option<u64>,
        /// Comma-separated checks: consistent, independent. Keeps only
        /// systems passing all requested checks, annotated.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        regenerate: bool,
    },
    /// Decide one goal against an axiom file.
    LogicProve {
        #[arg(long)]
        axioms: PathBuf,
        #[arg(long)]
        goal: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        trace: bool,
    },
    /// Full pipeline: corpus, systems, filter, truth space, census.
    LogicCensus {
        #[arg(long)]
        length: u32,
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        regenerate: bool,
    },
    /// Optimal timeout: smallest step reaching a target decided fraction.
    Optime {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        gamma: String,
        #[arg(long, value_enum, default_value = "total")]
        denominator: DenominatorArg,
    },
}

enum CliError {
    Usage(String),
    Overflow(String),
    Undecided,
    Unachievable(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Overflow(_) => 3,
            CliError::Undecided => 10,
            CliError::Unachievable(_) => 11,
            CliError::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Overflow(m)
            | CliError::Unachievable(m)
            | CliError::Other(m) => m,
            CliError::Undecided => "undecided within budget",
        }
    }
}

impl From<TmError> for CliError {
    fn from(e: TmError) -> Self {
        match e {
            TmError::CountOverflow(_) => CliError::Overflow(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CensusError> for CliError {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::Tm(tm) => tm.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<beaverlab_core::viz::VizError> for CliError {
    fn from(e: beaverlab_core::viz::VizError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

// BEAVER_SHARDS overrides --shards when set.
fn shard_count(flag: Option<usize>) -> usize {
    std::env::var("BEAVER_SHARDS")
        .ok()
        .and_then(|v| v.parse().ok())
        .or(flag)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
        .max(1)
}

fn default_budget(states: u32, flag: Option<u64>) -> Result<u64, CliError> {
    flag.or_else(|| known_s(states)).ok_or_else(|| {
        CliError::Usage(format!(
            "no default step budget for n = {states}; pass --budget"
        ))
    })
}

/// Refuse to overwrite existing outputs unless --regenerate was given.
fn guard_output(path: &Path, regenerate: bool) -> Result<(), CliError> {
    if path.exists() && !regenerate {
        return Err(CliError::Usage(format!(
            "{} exists; pass --regenerate to overwrite",
            path.display()
        )));
    }
    Ok(())
}

fn parse_crop(spec: &str) -> Result<(u32, u32, u32, u32), CliError> {
    let parts: Vec<u32> = spec
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad crop spec '{spec}', expected x,y,w,h")))?;
    match parts.as_slice() {
        [x, y, w, h] => Ok((*x, *y, *w, *h)),
        _ => Err(CliError::Usage(format!("bad crop spec '{spec}', expected x,y,w,h"))),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::TmCensus { states, budget, shards, out, format, fit, force_fit, regenerate } => {
            cmd_tm_census(states, budget, shards, out, format, fit, force_fit, regenerate)
        }
        Command::TmBb { states, budget, shards } => cmd_tm_bb(states, budget, shards),
        Command::TmOutputs { states, budget, shards, rule, out, regenerate } => {
            cmd_tm_outputs(states, budget, shards, rule, out, regenerate)
        }
        Command::TmRun { states, index, budget, trace } => cmd_tm_run(states, index, budget, trace),
        Command::Viz {
            states,
            budget,
            shards,
            truthspace,
            layout,
            order,
            out,
            crop,
            legend,
            regenerate,
        } => cmd_viz(states, budget, shards, truthspace, layout, order, out, crop, legend, regenerate),
        Command::LogicFormulas { length, out, regenerate } => {
            cmd_logic_formulas(length, out, regenerate)
        }
        Command::LogicSystems { length, sample, filter, out, budget, regenerate } => {
            cmd_logic_systems(length, sample, filter, out, &budget, regenerate)
        }
        Command::LogicProve { axioms, goal, budget, trace } => {
            cmd_logic_prove(&axioms, &goal, &budget, trace)
        }
        Command::LogicCensus { length, sample, out, budget, regenerate } => {
            cmd_logic_census(length, sample, out, &budget, regenerate)
        }
        Command::Optime { dist, gamma, denominator } => cmd_optime(&dist, &gamma, denominator),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_tm_census(
    states: u32,
    budget: Option<u64>,
    shards: Option<usize>,
    out: PathBuf,
    format: CensusFormat,
    fit: bool,
    force_fit: bool,
    regenerate: bool,
) -> Result<(), CliError> {
    let start = Instant::now();
    machine_count(states)?;
    let budget = default_budget(states, budget)?;
    let shards = shard_count(shards);
    guard_output(&out, regenerate)?;
    let census = run_census(states, budget, shards)?;
    let body = match format {
        CensusFormat::Csv => formats::census_to_csv(&census),
        CensusFormat::Json => formats::census_to_json(&census),
    };
    fs::write(&out, body)?;
    let mut outputs = vec![out.clone()];
    if fit || force_fit {
        if states == 3 || force_fit {
            let fit_path = PathBuf::from(format!("{}.fit.csv", out.display()));
            guard_output(&fit_path, regenerate)?;
            fs::write(&fit_path, formats::fit_table_to_csv(&fit_table(&census)))?;
            outputs.push(fit_path);
        } else {
            println!("fit table skipped: the reference curve targets (3,2); pass --force-fit");
        }
    }
    println!(
        "census ({states},2): budget {budget}, {} halting, {} non-halting, max t {}",
        census.halting_total(),
        census.nonhalting,
        census.max_halting_time().map_or("-".into(), |t| t.to_string()),
    );
    Manifest {
        command: "tm-census".into(),
        parameters: vec![
            ("states".into(), states.to_string()),
            ("budget".into(), budget.to_string()),
            ("format".into(), match format {
                CensusFormat::Csv => "csv".into(),
                CensusFormat::Json => "json".into(),
            }),
        ],
        inputs: vec![],
        outputs,
        shards: Some(shards),
        wall_time_ms: start.elapsed().as_millis(),
    }
    .write()?;
    Ok(())
}

fn cmd_tm_bb(states: u32, budget: Option<u64>, shards: Option<usize>) -> Result<(), CliError> {
    let budget = default_budget(states, budget)?;
    let shards = shard_count(shards);
    let record = busy_beaver(states, budget, shards)?;
    println!("space ({states},2), budget {budget}");
    println!("S_observed={}", record.s_observed);
    println!("Sigma_observed={}", record.sigma_observed);
    let list = |champions: &[u64]| -> String {
        let mut text: Vec<String> = champions.iter().take(100).map(|i| i.to_string()).collect();
        if champions.len() > 100 {
            text.push(format!("(+{} more)", champions.len() - 100));
        }
        text.join(" ")
    };
    println!("step champions ({}): {}", record.step_champions.len(), list(&record.step_champions));
    println!("ones champions ({}): {}", record.ones_champions.len(), list(&record.ones_champions));
    match known_s(states) {
        Some(s) => {
            let verdict = if s == record.s_observed { "AGREE" } else { "DISAGREE" };
            println!("reference S({states})={s}: {verdict}");
        }
        None => println!("reference S({states}): unknown"),
    }
    match known_sigma(states) {
        Some(sig) => {
            let verdict = if sig == record.sigma_observed { "AGREE" } else { "DISAGREE" };
            println!("reference Sigma({states})={sig}: {verdict}");
        }
        None => println!("reference Sigma({states}): unknown"),
    }
    Ok(())
}

fn cmd_tm_outputs(
    states: u32,
    budget: Option<u64>,
    shards: Option<usize>,
    rule: OutputRuleArg,
    out: PathBuf,
    regenerate: bool,
) -> Result<(), CliError> {
    let start = Instant::now();
    let budget = default_budget(states, budget)?;
    let shards = shard_count(shards);
    guard_output(&out, regenerate)?;
    let census = output_census(states, budget, rule.rule(), shards)?;
    let mut dump = String::from("output,count\n");
    for (output, count) in &census.outputs {
        dump.push_str(&format!("{output},{count}\n"));
    }
    fs::write(&out, dump)?;
    let single = census.single_symbol_count();
    let halters = census.halting_total();
    let total = machine_count(states)?;
    println!(
        "outputs ({states},2) rule {}: {} distinct, longest {}",
        rule.name(),
        census.distinct,
        census.longest
    );
    println!(
        "single-symbol outputs: {single} ({} of halters, {} of all machines)",
        render_6sig(num_rational::Ratio::new(single, halters.max(1))),
        render_6sig(num_rational::Ratio::new(single, total)),
    );
    Manifest {
        command: "tm-outputs".into(),
        parameters: vec![
            ("states".into(), states.to_string()),
            ("budget".into(), budget.to_string()),
            ("rule".into(), rule.name().into()),
        ],
        inputs: vec![],
        outputs: vec![out],
        shards: Some(shards),
        wall_time_ms: start.elapsed().as_millis(),
    }
    .write()?;
    Ok(())
}

fn cmd_tm_run(states: u32, index: u64, budget: Option<u64>, trace: bool) -> Result<(), CliError> {
    let budget = default_budget(states, budget)?;
    let machine = decode_machine(index, states)?;
    print!("{machine}");
    if trace {
        let mut config = beaverlab_core::tm::Configuration::initial();
        let mut left = 0i64;
        let mut right = 0i64;
        loop {
            if config.steps >= budget {
                break;
            }
            let outcome = tm::step(&machine, &mut config);
            left = left.min(config.head);
            right = right.max(config.head);
            let tape: String =
                (left..=right).map(|o| if config.tape.get(o) == 1 { '1' } else { '0' }).collect();
            println!(
                "#{} state={} head={} tape[{}..{}]={}",
                config.steps, config.state, config.head, left, right, tape
            );
            if outcome == tm::StepOutcome::Halted {
                break;
            }
        }
    }
    let result = tm::run(&machine, budget);
    match result.status {
        tm::RunStatus::Halted => println!(
            "HALTED steps={} ones={} output={} extent=[{},{}]",
            result.steps, result.ones, result.output, result.extent.0, result.extent.1
        ),
        tm::RunStatus::BudgetExceeded => println!(
            "BUDGET_EXCEEDED steps={} ones={} extent=[{},{}]",
            result.steps, result.ones, result.extent.0, result.extent.1
        ),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_viz(
    states: Option<u32>,
    budget: Option<u64>,
    shards: Option<usize>,
    truthspace: Option<PathBuf>,
    layout: Layout,
    order: Option<u32>,
    out: Option<PathBuf>,
    crop: Option<String>,
    legend: Option<PathBuf>,
    regenerate: bool,
) -> Result<(), CliError> {
    let start = Instant::now();
    let shards_used;
    let mut parameters: Vec<(String, String)> = Vec::new();
    let mut inputs = Vec::new();

    let (values, s_max): (Vec<Option<u64>>, u64) = match (&states, &truthspace) {
        (Some(n), None) => {
            let budget = default_budget(*n, budget)?;
            let shards = shard_count(shards);
            shards_used = Some(shards);
            parameters.push(("states".into(), n.to_string()));
            parameters.push(("budget".into(), budget.to_string()));
            let runtimes = collect_runtimes(*n, budget, shards)?;
            let s = runtimes.iter().flatten().copied().max().unwrap_or(1) as u64;
            (runtimes.into_iter().map(|r| r.map(u64::from)).collect(), s)
        }
        (None, Some(path)) => {
            shards_used = None;
            parameters.push(("truthspace".into(), path.display().to_string()));
            inputs.push(path.clone());
            let times = formats::truth_space_times_from_csv(&fs::read_to_string(path)?)?;
            let s = times.iter().flatten().copied().max().unwrap_or(1);
            (times, s)
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --states or --truthspace".into(),
            ))
        }
    };

    let count = values.len() as u64;
    let out = match out {
        Some(path) => path,
        None => match states {
            // Pinned default name for machine-space fields.
            Some(n) => PathBuf::from(format!(
                "field_{n}x2_order{}.ppm",
                order.unwrap_or_else(|| curve_order_for(count))
            )),
            None => return Err(CliError::Usage("pass --out for truth-space renders".into())),
        },
    };
    guard_output(&out, regenerate)?;
    let field_values = values
        .iter()
        .map(|v| v.map_or(FieldValue::Undecided, FieldValue::Decided));
    let image = match layout {
        Layout::Curve => {
            let order = order.unwrap_or_else(|| curve_order_for(count));
            parameters.push(("order".into(), order.to_string()));
            render_field(field_values, count, s_max, order)?
        }
        Layout::Matrix => {
            // Matrix layout only makes sense for truth spaces: width =
            // system count from the CSV header.
            let path = truthspace.as_ref().ok_or_else(|| {
                CliError::Usage("--layout matrix requires --truthspace".into())
            })?;
            let text = fs::read_to_string(path)?;
            let header = text.lines().next().unwrap_or_default();
            let width = header.split(',').count().saturating_sub(1) as u32;
            let height = (count / width.max(1) as u64) as u32;
            render_matrix(field_values, width, height, s_max)?
        }
    };
    let image = match crop {
        Some(spec) => {
            let (x, y, w, h) = parse_crop(&spec)?;
            parameters.push(("crop".into(), format!("{x},{y},{w},{h}")));
            image.crop(x, y, w, h)?
        }
        None => image,
    };
    fs::write(&out, image.to_ppm())?;
    let mut outputs = vec![out.clone()];
    if let Some(legend_path) = legend {
        guard_output(&legend_path, regenerate)?;
        fs::write(&legend_path, render_spectrum_legend(s_max)?.to_ppm())?;
        outputs.push(legend_path);
    }
    println!("field: {}x{} pixels, max decision time {s_max}", image.width, image.height);
    Manifest {
        command: "viz".into(),
        parameters,
        inputs,
        outputs,
        shards: shards_used,
        wall_time_ms: start.elapsed().as_millis(),
    }
    .write()?;
    Ok(())
}

fn cmd_logic_formulas(length: u32, out: PathBuf, regenerate: bool) -> Result<(), CliError> {
    let start = Instant::now();
    guard_output(&out, regenerate)?;
    let corpus = enumerate_formulas(length);
    fs::write(&out, formats::corpus_to_text(&corpus))?;
    println!("corpus length {length}: {} formulas", corpus.len());
    Manifest {
        command: "logic-formulas".into(),
        parameters: vec![("length".into(), length.to_string())],
        inputs: vec![],
        outputs: vec![out],
        shards: None,
        wall_time_ms: start.elapsed().as_millis(),
    }
    .write()?;
    Ok(())
}

fn parse_filter(filter: &str) -> Result<(bool, bool), CliError> {
    let mut consistent = false;
    let mut independent = false;
    for item in filter.split(',') {
        match item.trim() {
            "consistent" => consistent = true,
            "independent" => independent = true,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown filter '{other}' (expected consistent, independent)"
                )))
            }
        }
    }
    Ok((consistent, independent))
}

fn annotation_flags(ann: &SystemAnnotation) -> (Option<bool>, Option<bool>) {
    let consistent = match ann.consistency {
        Consistency::Consistent { .. } => Some(true),
        Consistency::Inconsistent => Some(false),
        Consistency::Unknown => None,
    };
    let independent = if ann.independence.is_empty() {
        None
    } else if ann.independence.iter().all(|s| matches!(s, AxiomStatus::Independent { .. })) {
        Some(true)
    } else if ann.independence.iter().any(|s| matches!(s, AxiomStatus::Dependent { .. })) {
        Some(false)
    } else {
        None
    };
    (consistent, independent)
}

fn cmd_logic_systems(
    length: u32,
    sample: Option<u64>,
    filter: Option<String>,
    out: PathBuf,
    budget_args: &BudgetArgs,
    regenerate: bool,
) -> Result<(), CliError> {
    let start = Instant::now();
    guard_output(&out, regenerate)?;
    let corpus = enumerate_formulas(length);
    let systems: Vec<AxiomSystem> = generate_axiom_systems(&corpus, sample)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .collect();
    let sampled = systems.len();
    let budget = budget_args.budget();
    let records: Vec<formats::SystemRecord> = match &filter {
        None => systems
            .into_iter()
            .map(|system| formats::SystemRecord { system, consistent: None, independent: None })
            .collect(),
        Some(filter) => {
            let (want_consistent, want_independent) = parse_filter(filter)?;
            systems
                .into_iter()
                .filter_map(|system| {
                    if system.is_empty() {
                        return None;
                    }
                    let ann = annotate_system(system, &budget);
                    let (consistent, independent) = annotation_flags(&ann);
                    let keep = (!want_consistent || consistent == Some(true))
                        && (!want_independent
                            || (ann.fully_independent() && consistent == Some(true)));
                    keep.then_some(formats::SystemRecord {
                        system: ann.system,
                        consistent: Some(consistent),
                        independent: Some(independent),
                    })
                })
                .collect()
        }
    };
    fs::write(&out, formats::systems_to_jsonl(&records))?;
    println!("systems length {length}: {} of {} sampled kept", records.len(), sampled);
    let mut parameters = vec![
        ("length".into(), length.to_string()),
        ("sample".into(), sample.map_or("all".into(), |s| s.to_string())),
        ("filter".into(), filter.unwrap_or_else(|| "none".into())),
    ];
    parameters.extend(budget_args.parameters());
    Manifest {
        command: "logic-systems".into(),
        parameters,
        inputs: vec![],
        outputs: vec![out],
        shards: None,
        wall_time_ms: start.elapsed().as_millis(),
    }
    .write()?;
    Ok(())
}

fn print_trace_segment(steps: &[TraceStep]) {
    for step in steps {
        println!(
            "{} --[axiom #{}, {}, pos {}]--> {}",
            step.from,
            step.axiom,
            if step.left_to_right { "ltr" } else { "rtl" },
            step.position,
            step.to
        );
    }
}

fn cmd_logic_prove(
    axioms_path: &Path,
    goal: &str,
    budget_args: &BudgetArgs,
    trace: bool,
) -> Result<(), CliError> {
    let corpus = formats::corpus_from_text(&fs::read_to_string(axioms_path)?)?;
    let system = AxiomSystem::from_axioms(corpus);
    let goal = parse_equation(goal).map_err(|e| CliError::Usage(e.to_string()))?;
    let budget = budget_args.budget();
    match decide(&system, &goal, &budget) {
        ProofResult::Proven { length } => {
            println!("PROVEN length={length}");
            if trace {
                match beaverlab_core::prover::prove_with_evidence(system.axioms(), &goal, &budget)
                {
                    Some((_, ProofEvidence::Reflexivity)) => println!("# reflexivity"),
                    Some((_, ProofEvidence::Subsumption { axiom })) => {
                        println!("# instance of axiom #{axiom}")
                    }
                    Some((_, ProofEvidence::Valley { from_lhs, from_rhs, meet })) => {
                        print_trace_segment(&from_lhs);
                        println!("-- meet: {meet} --");
                        print_trace_segment(&from_rhs);
                    }
                    None => println!("# trace unavailable"),
                }
            }
        }
        ProofResult::Disproven { model } => {
            println!("DISPROVEN k={}", model.k);
            println!("{}", formats::model_to_json(&model));
        }
        ProofResult::Undecided(flags) => {
            println!(
                "UNDECIDED proof_side={} model_side={} frontier_capped={} model_node_capped={}",
                flags.proof_side, flags.model_side, flags.frontier_capped, flags.model_node_capped
            );
            return Err(CliError::Undecided);
        }
    }
    Ok(())
}

fn cmd_logic_census(
    length: u32,
    sample: Option<u64>,
    out_base: PathBuf,
    budget_args: &BudgetArgs,
    regenerate: bool,
) -> Result<(), CliError> {
    let start = Instant::now();
    let base = out_base.display().to_string();
    let corpus_path = PathBuf::from(format!("{base}.corpus.txt"));
    let systems_path = PathBuf::from(format!("{base}.systems.jsonl"));
    let space_path = PathBuf::from(format!("{base}.truthspace.csv"));
    let dist_path = PathBuf::from(format!("{base}.dist.csv"));
    for path in [&corpus_path, &systems_path, &space_path, &dist_path] {
        guard_output(path, regenerate)?;
    }

    let budget = budget_args.budget();
    let corpus = enumerate_formulas(length);
    let systems: Vec<AxiomSystem> = generate_axiom_systems(&corpus, sample)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .collect();
    let sampled = systems.len();
    let kept = beaverlab_core::prover::filter_systems(systems, &budget);
    let records: Vec<formats::SystemRecord> = kept
        .iter()
        .map(|ann| {
            let (consistent, independent) = annotation_flags(ann);
            formats::SystemRecord {
                system: ann.system.clone(),
                consistent: Some(consistent),
                independent: Some(independent),
            }
        })
        .collect();
    let space = truth_space(
        kept.into_iter().map(|a| a.system).collect(),
        corpus.clone(),
        &budget,
    );
    let census = proof_census(&space);

    fs::write(&corpus_path, formats::corpus_to_text(&corpus))?;
    fs::write(&systems_path, formats::systems_to_jsonl(&records))?;
    fs::write(&space_path, formats::truth_space_to_csv(&space))?;
    fs::write(&dist_path, write_distribution_csv(&census))?;

    println!(
        "length {length}: corpus {}, systems {} sampled / {} kept, {} cells",
        corpus.len(),
        sampled,
        space.systems.len(),
        space.cells.len()
    );
    println!(
        "decided {} (undecided {}), decision times {:?}",
        census.decided(),
        census.undecided,
        census.counts
    );
    if census.decided() > 0 {
        let fbb_value = fbb(&census).map_err(|e| CliError::Other(e.to_string()))?;
        println!("fBB({length}) = {fbb_value}");
        for milestone in [1u64, 5, 9] {
            println!(
                "decided by t={milestone}: {}",
                render_6sig(cumulative_fraction(&census, milestone))
            );
        }
    }

    let mut parameters = vec![
        ("length".into(), length.to_string()),
        ("sample".into(), sample.map_or("all".into(), |s| s.to_string())),
    ];
    parameters.extend(budget_args.parameters());
    Manifest {
        command: "logic-census".into(),
        parameters,
        inputs: vec![],
        outputs: vec![corpus_path, systems_path, space_path, dist_path],
        shards: None,
        wall_time_ms: start.elapsed().as_millis(),
    }
    .write()?;
    Ok(())
}

fn cmd_optime(dist: &Path, gamma: &str, denominator: DenominatorArg) -> Result<(), CliError> {
    let text = fs::read_to_string(dist)?;
    let label = dist.display().to_string();
    let d = read_distribution_csv(&text, &label).map_err(|e| CliError::Usage(e.to_string()))?;
    let gamma_value = parse_gamma(gamma).map_err(|e| CliError::Usage(e.to_string()))?;
    let denom = match denominator {
        DenominatorArg::Total => Denominator::Total,
        DenominatorArg::Decided => Denominator::Decided,
    };
    match optime_with(&d, gamma_value, denom) {
        Ok(step) => {
            println!("OPTIME gamma={gamma} step={step}");
            Ok(())
        }
        Err(StatsError::Unachievable { gamma, max }) => Err(CliError::Unachievable(format!(
            "gamma {gamma} unachievable; decided fraction is {max}"
        ))),
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}
