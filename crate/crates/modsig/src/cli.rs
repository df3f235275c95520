//! Command-line interface: argument parsing, pipeline orchestration, and
//! report output.
//!
//! Exit codes: 0 success, 2 usage error, 3 model or data error, 4
//! degenerate test (a partition with no within/between contrast).

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::graph::{degree_quartiles, CommunityAssignment, Graph, SelfLoopPolicy};
use crate::io::covariates::{
    read_covariates_table, resolve_assignment, CovariateTable, MissingPolicy,
};
use crate::io::edge_list::{read_edge_list, write_edge_list};
use crate::io::gml::read_gml;
use crate::null::family::{EdgeModel, Family};
use crate::null::fit::{compare_models, fit_edge_model, saturated_log_likelihood};
use crate::null::{check_assumptions, estimate_pi, PiVector};
use crate::report::{GraphSummary, ModelBlock, PValue, ReportDocument, TestBlock};
use crate::significance::{significance_test, TestOptions};
use crate::sim::sample_graph;

#[derive(Parser)]
#[command(
    name = "modsig",
    version,
    about = "Significance testing for covariate-defined communities under a degree-based null model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether a covariate's groups capture more edge weight than
    /// degrees alone explain
    Test(TestArgs),
    /// Fit one edge-weight family and report its log-likelihood
    Fit(FitArgs),
    /// Compare the count families on one graph by likelihood and deviance
    CompareModels(CompareArgs),
    /// Screen a dataset against the modeling assumptions
    Diagnose(DiagnoseArgs),
    /// Run the test with a parametric bootstrap (default 10000 replicates)
    Bootstrap(TestArgs),
    /// Sample a graph from the null model and write it as an edge list
    Simulate(SimulateArgs),
}

#[derive(Args)]
#[group(id = "input", required = true, multiple = false)]
struct InputArgs {
    /// Tab-separated edge list: u<TAB>v[<TAB>weight], '#' comments
    #[arg(long, value_name = "FILE", group = "input")]
    edges: Option<PathBuf>,
    /// GML file; node attributes become covariate columns
    #[arg(long, value_name = "FILE", group = "input")]
    gml: Option<PathBuf>,
}

/// Families valid for the normal-approximation test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestFamily {
    Bernoulli,
    Poisson,
    Negbin,
}

impl From<TestFamily> for Family {
    fn from(f: TestFamily) -> Family {
        match f {
            TestFamily::Bernoulli => Family::Bernoulli,
            TestFamily::Poisson => Family::Poisson,
            TestFamily::Negbin => Family::NegBin,
        }
    }
}

/// All five families, for fitting and simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnyFamily {
    Bernoulli,
    Poisson,
    Negbin,
    ZiPoisson,
    ZiNegbin,
}

impl From<AnyFamily> for Family {
    fn from(f: AnyFamily) -> Family {
        match f {
            AnyFamily::Bernoulli => Family::Bernoulli,
            AnyFamily::Poisson => Family::Poisson,
            AnyFamily::Negbin => Family::NegBin,
            AnyFamily::ZiPoisson => Family::ZiPoisson,
            AnyFamily::ZiNegbin => Family::ZiNegBin,
        }
    }
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    /// CSV covariate table (header row; first column = node label).
    /// Defaults to the GML node attributes when --gml is used
    #[arg(long, value_name = "FILE")]
    covariates: Option<PathBuf>,
    /// Covariate column defining the groups; repeat to test several
    #[arg(long = "column", value_name = "NAME", required = true)]
    columns: Vec<String>,
    /// Edge-weight family for the null model
    #[arg(long, value_enum, default_value_t = TestFamily::Poisson)]
    model: TestFamily,
    /// Parametric bootstrap replicates (0 = normal approximation only)
    #[arg(long, value_name = "B")]
    bootstrap: Option<usize>,
    /// Seed for the bootstrap; every column reuses the same replicate
    /// streams so covariates are compared on common draws
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Multiply reported p-values by M, capped at 1 (a correction applied
    /// by this tool)
    #[arg(long, value_name = "M")]
    bonferroni: Option<usize>,
    /// Drop self-loops instead of rejecting the input
    #[arg(long)]
    drop_self_loops: bool,
    /// Drop nodes with missing covariate values instead of erroring
    #[arg(long)]
    drop_missing: bool,
    /// Write the JSON report here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write a CSV summary (one row per covariate)
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    model: AnyFamily,
    #[arg(long)]
    drop_self_loops: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    drop_self_loops: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_name = "FILE")]
    covariates: Option<PathBuf>,
    /// Covariate column for the group-count screen
    #[arg(long, value_name = "NAME")]
    column: Option<String>,
    /// Family whose fitted moments feed the dispersion screens
    #[arg(long, value_enum, default_value_t = AnyFamily::Poisson)]
    model: AnyFamily,
    #[arg(long)]
    drop_self_loops: bool,
    #[arg(long)]
    drop_missing: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("pi").required(true).multiple(false)))]
struct SimulateArgs {
    /// Edge list whose estimated degree parameters drive the simulation
    #[arg(long, value_name = "FILE", group = "pi")]
    pi_from: Option<PathBuf>,
    /// Explicit comma-separated degree parameters
    #[arg(long, value_name = "V1,V2,...", group = "pi")]
    pi_values: Option<String>,
    #[arg(long, value_enum)]
    model: AnyFamily,
    /// Dispersion parameter (negbin and zi-negbin)
    #[arg(long, value_name = "R")]
    r: Option<f64>,
    /// Zero-inflation mass (zi-poisson and zi-negbin)
    #[arg(long, value_name = "OMEGA")]
    omega: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output edge list path
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

/// Result of one CLI invocation, for embedding and tests.
#[derive(Debug)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub report: Option<ReportDocument>,
}

/// Parses argv (including the program name) and runs the command. The JSON
/// report goes to `--out` when given, stdout otherwise; errors print one
/// line to stderr.
pub fn run_command<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let exit_code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return CommandOutcome {
                exit_code,
                report: None,
            };
        }
    };
    match dispatch(cli.command) {
        Ok((report, to_stdout)) => {
            if let Some(text) = to_stdout {
                println!("{text}");
            }
            CommandOutcome {
                exit_code: 0,
                report: Some(report),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            CommandOutcome {
                exit_code: e.exit_code(),
                report: None,
            }
        }
    }
}

/// The loaded input: graph, any covariates that came with it, and loader
/// warnings.
struct LoadedInput {
    graph: Graph,
    covariates: Option<CovariateTable>,
    warnings: Vec<String>,
}

fn load_input(input: &InputArgs, drop_self_loops: bool) -> Result<LoadedInput> {
    let policy = if drop_self_loops {
        SelfLoopPolicy::Drop
    } else {
        SelfLoopPolicy::Reject
    };
    match (&input.edges, &input.gml) {
        (Some(path), None) => Ok(LoadedInput {
            graph: read_edge_list(path, policy)?,
            covariates: None,
            warnings: Vec::new(),
        }),
        (None, Some(path)) => {
            let data = read_gml(path, policy)?;
            Ok(LoadedInput {
                graph: data.graph,
                covariates: Some(data.covariates),
                warnings: data.warnings,
            })
        }
        // clap's input group enforces exactly one; this covers programmatic
        // misuse.
        _ => Err(Error::Usage(
            "exactly one of --edges or --gml is required".into(),
        )),
    }
}

/// Covariate table for the run: an explicit CSV wins, otherwise the GML
/// node attributes.
fn covariate_source(
    loaded: &LoadedInput,
    csv_path: &Option<PathBuf>,
) -> Result<CovariateTable> {
    match csv_path {
        Some(path) => read_covariates_table(path),
        None => loaded.covariates.clone().ok_or_else(|| {
            Error::Usage("--covariates is required unless the input is a GML file".into())
        }),
    }
}

fn graph_summary(g: &Graph) -> Result<GraphSummary> {
    Ok(GraphSummary {
        nodes: g.n(),
        edges: g.edge_count(),
        total_weight: g.total_weight(),
        degree_quartiles: degree_quartiles(g)?,
    })
}

/// Removes degree-zero nodes before estimation, recording a warning naming
/// the count. The test statistics are defined only for positive degrees.
fn drop_isolated_lenient(
    g: Graph,
    a: Option<CommunityAssignment>,
    warnings: &mut Vec<String>,
) -> (Graph, Option<CommunityAssignment>) {
    let isolated = g.isolated_nodes();
    if isolated.is_empty() {
        return (g, a);
    }
    warnings.push(format!(
        "dropped {} isolated node(s) before estimation: degree parameters need positive degrees",
        isolated.len()
    ));
    let (kept, keep) = g.drop_isolated();
    let a = a.map(|a| a.restrict(&keep));
    (kept, a)
}

fn dispatch(command: Command) -> Result<(ReportDocument, Option<String>)> {
    match command {
        Command::Test(args) => {
            let replicates = args.bootstrap.unwrap_or(0);
            run_test("test", args, replicates)
        }
        Command::Bootstrap(args) => {
            let replicates = args.bootstrap.unwrap_or(10_000);
            run_test("bootstrap", args, replicates)
        }
        Command::Fit(args) => run_fit(args),
        Command::CompareModels(args) => run_compare(args),
        Command::Diagnose(args) => run_diagnose(args),
        Command::Simulate(args) => run_simulate(args),
    }
}

fn run_test(
    command: &str,
    args: TestArgs,
    replicates: usize,
) -> Result<(ReportDocument, Option<String>)> {
    let loaded = load_input(&args.input, args.drop_self_loops)?;
    let table = covariate_source(&loaded, &args.covariates)?;
    let missing_policy = if args.drop_missing {
        MissingPolicy::Drop
    } else {
        MissingPolicy::Error
    };
    if let Some(m) = args.bonferroni {
        if m == 0 {
            return Err(Error::Usage("--bonferroni must be at least 1".into()));
        }
    }

    let mut doc = ReportDocument::new(command, graph_summary(&loaded.graph)?);
    doc.warnings = loaded.warnings.clone();
    doc.seed = (replicates > 0).then_some(args.seed);

    let options = TestOptions {
        bootstrap_replicates: replicates,
        seed: args.seed,
        ..TestOptions::default()
    };
    for column in &args.columns {
        let resolved = resolve_assignment(&loaded.graph, &table, column, missing_policy)?;
        let mut warnings = resolved.warnings.clone();
        let (g, a) =
            drop_isolated_lenient(resolved.graph, Some(resolved.assignment), &mut warnings);
        let a = a.expect("assignment present");
        if a.is_degenerate() {
            return Err(Error::DegenerateTest(format!(
                "column {column:?} yields {} group(s) over {} node(s): no within/between contrast",
                a.k(),
                g.n()
            )));
        }
        let result = significance_test(&g, &a, args.model.into(), &options)?;
        warnings.extend(result.warnings.clone());
        if doc.model.is_none() {
            doc.model = Some(model_block(&g, &result.model)?);
        }
        let p_bonferroni = args.bonferroni.map(|m| {
            PValue::from((result.p_normal * m as f64).min(1.0))
        });
        doc.tests.push(TestBlock {
            covariate: Some(column.clone()),
            k: result.k,
            n_used: result.n,
            q_hat: result.q_hat,
            b_hat: result.b_hat,
            s_hat: result.s_hat,
            z: result.z,
            p_normal: PValue::from(result.p_normal),
            p_bootstrap: result.p_bootstrap,
            p_bonferroni,
            bonferroni_m: args.bonferroni,
            bootstrap: result.bootstrap,
            diagnostics: result.diagnostics,
            warnings,
        });
    }
    finish(doc, &args.out, &args.csv)
}

fn model_block(g: &Graph, model: &EdgeModel) -> Result<ModelBlock> {
    let ll = crate::null::fit::log_likelihood(g, model)?;
    let residual_deviance = if model.family() == Family::Bernoulli {
        None
    } else {
        Some(2.0 * (saturated_log_likelihood(g)? - ll))
    };
    Ok(ModelBlock {
        model: *model,
        log_likelihood: Some(ll),
        parameter_count: g.n() + model.family().extra_parameter_count(),
        residual_deviance,
        r_at_cap: false,
        warnings: Vec::new(),
    })
}

fn run_fit(args: FitArgs) -> Result<(ReportDocument, Option<String>)> {
    let loaded = load_input(&args.input, args.drop_self_loops)?;
    let mut doc = ReportDocument::new("fit", graph_summary(&loaded.graph)?);
    doc.warnings = loaded.warnings.clone();
    let (g, _) = drop_isolated_lenient(loaded.graph, None, &mut doc.warnings);
    let fitted = fit_edge_model(&g, args.model.into())?;
    let residual_deviance = if fitted.model.family() == Family::Bernoulli {
        None
    } else {
        Some(2.0 * (saturated_log_likelihood(&g)? - fitted.log_likelihood))
    };
    doc.model = Some(ModelBlock {
        model: fitted.model,
        log_likelihood: Some(fitted.log_likelihood),
        parameter_count: g.n() + fitted.model.family().extra_parameter_count(),
        residual_deviance,
        r_at_cap: fitted.r_at_cap,
        warnings: fitted.warnings,
    });
    finish(doc, &args.out, &None)
}

fn run_compare(args: CompareArgs) -> Result<(ReportDocument, Option<String>)> {
    let loaded = load_input(&args.input, args.drop_self_loops)?;
    let mut doc = ReportDocument::new("compare-models", graph_summary(&loaded.graph)?);
    doc.warnings = loaded.warnings.clone();
    let (g, _) = drop_isolated_lenient(loaded.graph, None, &mut doc.warnings);
    doc.model_comparison = Some(compare_models(&g)?);
    finish(doc, &args.out, &None)
}

fn run_diagnose(args: DiagnoseArgs) -> Result<(ReportDocument, Option<String>)> {
    let loaded = load_input(&args.input, args.drop_self_loops)?;
    let mut doc = ReportDocument::new("diagnose", graph_summary(&loaded.graph)?);
    doc.warnings = loaded.warnings.clone();

    let (g, a) = match &args.column {
        None => {
            let (g, _) = drop_isolated_lenient(loaded.graph, None, &mut doc.warnings);
            (g, None)
        }
        Some(column) => {
            let table = covariate_source(&loaded, &args.covariates)?;
            let policy = if args.drop_missing {
                MissingPolicy::Drop
            } else {
                MissingPolicy::Error
            };
            let resolved = resolve_assignment(&loaded.graph, &table, column, policy)?;
            doc.warnings.extend(resolved.warnings);
            let (g, a) = drop_isolated_lenient(
                resolved.graph,
                Some(resolved.assignment),
                &mut doc.warnings,
            );
            (g, a)
        }
    };
    let fitted = fit_edge_model(&g, args.model.into())?;
    doc.model = Some(ModelBlock {
        model: fitted.model,
        log_likelihood: Some(fitted.log_likelihood),
        parameter_count: g.n() + fitted.model.family().extra_parameter_count(),
        residual_deviance: None,
        r_at_cap: fitted.r_at_cap,
        warnings: fitted.warnings,
    });
    doc.diagnostics = Some(check_assumptions(&g, &fitted.model, a.as_ref()));
    finish(doc, &args.out, &None)
}

fn run_simulate(args: SimulateArgs) -> Result<(ReportDocument, Option<String>)> {
    let pi = match (&args.pi_from, &args.pi_values) {
        (Some(path), None) => {
            let g = read_edge_list(path, SelfLoopPolicy::Reject)?;
            estimate_pi(&g)?
        }
        (None, Some(list)) => {
            let values = list
                .split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        Error::Usage(format!("cannot parse degree parameter {v:?}"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            PiVector::from_values(values)?
        }
        _ => {
            return Err(Error::Usage(
                "exactly one of --pi-from or --pi-values is required".into(),
            ))
        }
    };
    let model = build_model(args.model, args.r, args.omega)?;
    let g = sample_graph(&pi, &model, args.seed)?;
    write_edge_list(&args.out, &g)?;
    let mut doc = ReportDocument::new("simulate", graph_summary(&g)?);
    doc.seed = Some(args.seed);
    doc.model = Some(ModelBlock {
        model,
        log_likelihood: None,
        parameter_count: pi.len() + model.family().extra_parameter_count(),
        residual_deviance: None,
        r_at_cap: false,
        warnings: Vec::new(),
    });
    finish(doc, &None, &None)
}

/// Assembles an edge model from the family flag and its parameters,
/// rejecting parameters the family does not take.
fn build_model(family: AnyFamily, r: Option<f64>, omega: Option<f64>) -> Result<EdgeModel> {
    let need = |opt: Option<f64>, name: &str| {
        opt.ok_or_else(|| Error::Usage(format!("--{name} is required for this family")))
    };
    let refuse = |opt: Option<f64>, name: &str| {
        if opt.is_some() {
            Err(Error::Usage(format!(
                "--{name} does not apply to this family"
            )))
        } else {
            Ok(())
        }
    };
    let model = match family {
        AnyFamily::Bernoulli => {
            refuse(r, "r")?;
            refuse(omega, "omega")?;
            EdgeModel::Bernoulli
        }
        AnyFamily::Poisson => {
            refuse(r, "r")?;
            refuse(omega, "omega")?;
            EdgeModel::Poisson
        }
        AnyFamily::Negbin => {
            refuse(omega, "omega")?;
            EdgeModel::NegBin { r: need(r, "r")? }
        }
        AnyFamily::ZiPoisson => {
            refuse(r, "r")?;
            EdgeModel::ZiPoisson {
                omega: need(omega, "omega")?,
            }
        }
        AnyFamily::ZiNegbin => EdgeModel::ZiNegBin {
            omega: need(omega, "omega")?,
            r: need(r, "r")?,
        },
    };
    model.validate()?;
    Ok(model)
}

/// Writes the report to `--out` or returns it for stdout; also writes the
/// CSV summary when requested.
fn finish(
    doc: ReportDocument,
    out: &Option<PathBuf>,
    csv: &Option<PathBuf>,
) -> Result<(ReportDocument, Option<String>)> {
    let json = doc.to_json_string()?;
    if let Some(path) = csv {
        fs::write(path, doc.csv_summary()).map_err(|e| Error::io(path, e))?;
    }
    match out {
        Some(path) => {
            fs::write(path, json + "\n").map_err(|e| Error::io(path, e))?;
            Ok((doc, None))
        }
        None => Ok((doc, Some(json))),
    }
}
