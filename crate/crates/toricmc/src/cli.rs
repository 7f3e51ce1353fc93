//! Command-line front end. Every subcommand reads JSON (or CSV matrices
//! with `--format csv`), prints one canonical JSON object, and exits 0 on
//! success, 1 on a negative mathematical answer, 2 on bad input, 3 when an
//! enumeration budget runs out.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{Map, Number, Value};

use crate::amodel::{AModel, Binomial};
use crate::cycles::{cycle_census, decompose_trajectory, enumerate_cycles};
use crate::design::{design_of, indicator_poly, moment, monomial_basis, TermOrder};
use crate::error::{Error, Result};
use crate::graph::{is_realizable, Realizability, Trajectory, TransitionGraph};
use crate::json;
use crate::lattice::{hilbert_basis_of_span, DEFAULT_MAX_CANDIDATES};
use crate::matrix::IntMatrix;
use crate::reversible::{
    detailed_balance_solve, kolmogorov_check, metropolis_reversible,
    params_from_reversible, reversal_divergence, reversible_from_params, Combiner,
    KolmogorovVerdict,
};
use crate::tmc::{
    expected_counts, homogeneity_check, partition_function, stationary_distribution,
    Homogeneity,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CombinerKind {
    Min,
    Harmonic,
    Product,
}

#[derive(Parser, Debug)]
#[command(
    name = "toricmc",
    version,
    about = "Toric models, toric Markov chains and reversible chains"
)]
struct Cli {
    /// Comparison tolerance for floating-point checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Budget for Hilbert/Graver/cycle enumeration
    #[arg(long, global = true, env = "TORICMC_MAX_CANDIDATES", default_value_t = DEFAULT_MAX_CANDIDATES)]
    max_candidates: usize,

    /// Random seed; reserved for subcommands that sample instances.
    /// Everything shipped here is deterministic and ignores it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Treat matrix input files as CSV instead of JSON
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Also print an aligned table to stderr
    #[arg(long, global = true)]
    table: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integer kernel basis of the model matrix
    Kernel { model: PathBuf },
    /// Hilbert basis of the monoid spanned by the model's rows
    Hilbert { model: PathBuf },
    /// Binomial invariants from the kernel (or the Graver basis)
    Invariants {
        model: PathBuf,
        /// Use the Graver basis of the kernel instead of a lattice basis
        #[arg(long)]
        graver: bool,
    },
    /// Model closed under taking pointwise limits of densities
    Closure { model: PathBuf },
    /// Face of the model where the given rows vanish
    Face {
        model: PathBuf,
        /// Rows to set to zero, as indices or row labels
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<String>,
    },
    /// Whether two parameter vectors give one distribution
    Confounded {
        model: PathBuf,
        /// First parameter vector, comma separated
        #[arg(long)]
        s: String,
        /// Second parameter vector, comma separated
        #[arg(long)]
        t: String,
    },
    /// Whether two models have equal rational row spans
    Equiv { model1: PathBuf, model2: PathBuf },
    /// Moment of a monomial under the model at a parameter
    Moments {
        model: PathBuf,
        /// Parameter vector, one entry per model row
        #[arg(long)]
        t: String,
        /// Monomial exponents, one per coordinate (model rows minus one)
        #[arg(long)]
        alpha: String,
    },
    /// Monomial basis of functions on the design (Buchberger-Moller)
    Mbasis {
        model: PathBuf,
        /// Variable precedence for the degrevlex order, comma-separated
        /// indices; defaults to the natural order
        #[arg(long)]
        vars: Option<String>,
    },
    /// Indicator polynomial of one design point
    Indicator {
        model: PathBuf,
        /// Point coordinates (comma separated) or its column label
        #[arg(long)]
        point: String,
    },
    /// Partition function of the trajectory model
    TmcZ {
        graph: PathBuf,
        params: PathBuf,
        #[arg(long)]
        steps: usize,
    },
    /// Expected transition counts under the trajectory model
    TmcExpected {
        graph: PathBuf,
        params: PathBuf,
        #[arg(long)]
        steps: usize,
    },
    /// Whether the weights are a Markov chain up to normalization
    TmcHomog { graph: PathBuf, params: PathBuf },
    /// Whether a count matrix comes from some trajectory
    Realizable { graph: PathBuf, counts: PathBuf },
    /// Elementary cycles and the census by length
    Cycles { graph: PathBuf },
    /// Split a trajectory into elementary cycles and a remainder
    Decompose {
        graph: PathBuf,
        /// Comma-separated state labels
        #[arg(long)]
        trajectory: String,
    },
    /// Kolmogorov cycle criterion for reversibility
    Kcheck { graph: PathBuf, chain: PathBuf },
    /// Detailed-balance weights, when they exist
    Dbsolve { graph: PathBuf, chain: PathBuf },
    /// Reversible kernel from edge and cut parameters
    RevBuild { graph: PathBuf, params: PathBuf },
    /// Edge and cut parameters of a reversible kernel
    RevParams { graph: PathBuf, chain: PathBuf },
    /// Reversible joint from a proposal joint via a symmetric combiner
    Metropolis {
        graph: PathBuf,
        joint: PathBuf,
        #[arg(long, value_enum, default_value_t = CombinerKind::Min)]
        combiner: CombinerKind,
    },
    /// KL divergence between the path law and its reversal
    Divergence {
        graph: PathBuf,
        chain: PathBuf,
        /// Trajectory length
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Stationary distribution; computed from the chain when omitted
        #[arg(long)]
        pi: Option<String>,
    },
}

struct Report {
    value: Value,
    table: Vec<Vec<String>>,
    negative: bool,
}

impl Report {
    fn new(value: Value) -> Self {
        Report { value, table: Vec::new(), negative: false }
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            if cli.table && !report.table.is_empty() {
                print_table(&report.table);
            }
            let text = json::canonical_json(&report.value);
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: {}", e);
                    return 2;
                }
            } else {
                print!("{}", text);
            }
            if report.negative {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::EnumerationBudgetExceeded { .. }
                | Error::AmbientDimensionTooLarge { .. } => 3,
                Error::NotReversible(_) | Error::CombinerViolation(_, _) => 1,
                _ => 2,
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    let tol = cli.tol;
    let budget = cli.max_candidates;
    match &cli.command {
        Command::Kernel { model } => {
            let m = load_model(model, cli.format)?;
            let basis = m.kernel_basis();
            let rows: Vec<Vec<BigInt>> = basis.vectors().to_vec();
            let mut report = Report::new(Value::Object(one_field(
                "kernel",
                json::int_rows_to_value(&rows),
            )));
            report.table = int_table(&rows);
            Ok(report)
        }
        Command::Hilbert { model } => {
            let m = load_model(model, cli.format)?;
            let basis = hilbert_basis_of_span(m.matrix(), budget)?;
            let rows: Vec<Vec<BigInt>> = basis.vectors().to_vec();
            let mut report = Report::new(Value::Object(one_field(
                "hilbert",
                json::int_rows_to_value(&rows),
            )));
            report.table = int_table(&rows);
            Ok(report)
        }
        Command::Invariants { model, graver } => {
            let m = load_model(model, cli.format)?;
            let invariants: Vec<Binomial> = if *graver {
                m.graver_invariants(budget)?
                    .iter()
                    .map(|g| Binomial::from_kernel_vector(&g.vector))
                    .collect()
            } else {
                m.invariants()
            };
            let names = point_names(&m);
            let mut items = Vec::new();
            let mut table = Vec::new();
            for b in &invariants {
                let mut entry = Map::new();
                entry.insert("plus".into(), json::int_rows_to_value(&[b.plus.clone()])[0].clone());
                entry.insert("minus".into(), json::int_rows_to_value(&[b.minus.clone()])[0].clone());
                items.push(Value::Object(entry));
                table.push(vec![binomial_string(b, &names)]);
            }
            let mut report =
                Report::new(Value::Object(one_field("invariants", Value::Array(items))));
            report.table = table;
            Ok(report)
        }
        Command::Closure { model } => {
            let m = load_model(model, cli.format)?;
            let closed = m.closure(budget)?;
            let rows = closed.matrix().to_rows();
            let mut report = Report::new(json::model_to_value(&closed));
            report.table = int_table(&rows);
            Ok(report)
        }
        Command::Face { model, rows } => {
            let m = load_model(model, cli.format)?;
            let zero_rows: Vec<usize> = rows
                .iter()
                .map(|r| parse_row_ref(&m, r))
                .collect::<Result<_>>()?;
            let (support, face) = m.face(&zero_rows)?;
            let mut out = Map::new();
            out.insert(
                "support".into(),
                Value::Array(
                    support
                        .iter()
                        .map(|&j| Value::Number(Number::from(j as u64)))
                        .collect(),
                ),
            );
            if let Some(labels) = m.col_labels() {
                out.insert(
                    "support_labels".into(),
                    Value::Array(
                        support
                            .iter()
                            .map(|&j| Value::String(labels[j].clone()))
                            .collect(),
                    ),
                );
            }
            out.insert("model".into(), json::model_to_value(&face));
            let mut report = Report::new(Value::Object(out));
            report.table = vec![support.iter().map(|j| j.to_string()).collect()];
            Ok(report)
        }
        Command::Confounded { model, s, t } => {
            let m = load_model(model, cli.format)?;
            let s = parse_f64_list(s)?;
            let t = parse_f64_list(t)?;
            let (direct, linear) = m.confounded_detail(&s, &t, tol)?;
            let mut out = Map::new();
            out.insert("confounded".into(), Value::Bool(direct));
            out.insert("log_linear_criterion".into(), Value::Bool(linear));
            let mut report = Report::new(Value::Object(out));
            report.table = vec![vec!["confounded".into(), direct.to_string()]];
            report.negative = !direct;
            Ok(report)
        }
        Command::Equiv { model1, model2 } => {
            let a = load_model(model1, cli.format)?;
            let b = load_model(model2, cli.format)?;
            let eq = a.equivalent(&b)?;
            let mut report =
                Report::new(Value::Object(one_field("equivalent", Value::Bool(eq))));
            report.table = vec![vec!["equivalent".into(), eq.to_string()]];
            report.negative = !eq;
            Ok(report)
        }
        Command::Moments { model, t, alpha } => {
            let m = load_model(model, cli.format)?;
            let t = parse_f64_list(t)?;
            let alpha = parse_u32_list(alpha)?;
            let value = moment(&m, &t, &alpha)?;
            let mut report =
                Report::new(Value::Object(one_field("moment", json::f64_to_value(value))));
            report.table = vec![vec!["moment".into(), format!("{:.16e}", value)]];
            Ok(report)
        }
        Command::Mbasis { model, vars } => {
            let m = load_model(model, cli.format)?;
            let d = design_of(&m)?;
            let order = match vars {
                Some(list) => TermOrder::degrevlex_with_vars(parse_usize_list(list)?)?,
                None => TermOrder::degrevlex(d.dim()),
            };
            let basis = monomial_basis(&d, &order)?;
            let names = coordinate_names(&m);
            let mut out = Map::new();
            out.insert(
                "basis".into(),
                Value::Array(
                    basis
                        .iter()
                        .map(|mono| {
                            Value::Array(
                                mono.iter()
                                    .map(|&e| Value::Number(Number::from(e as u64)))
                                    .collect(),
                            )
                        })
                        .collect(),
                ),
            );
            out.insert(
                "monomials".into(),
                Value::Array(
                    basis
                        .iter()
                        .map(|mono| Value::String(monomial_string(mono, &names)))
                        .collect(),
                ),
            );
            let mut report = Report::new(Value::Object(out));
            report.table = basis
                .iter()
                .map(|mono| vec![monomial_string(mono, &names)])
                .collect();
            Ok(report)
        }
        Command::Indicator { model, point } => {
            let m = load_model(model, cli.format)?;
            let d = design_of(&m)?;
            let coords = parse_point(&m, point)?;
            let poly = indicator_poly(&d, &coords)?;
            let names = coordinate_names(&m);
            let mut terms = Vec::new();
            let mut table = Vec::new();
            for (mono, coeff) in poly.terms() {
                let mut entry = Map::new();
                entry.insert(
                    "exponents".into(),
                    Value::Array(
                        mono.iter()
                            .map(|&e| Value::Number(Number::from(e as u64)))
                            .collect(),
                    ),
                );
                entry.insert("coefficient".into(), json::rational_to_value(coeff));
                terms.push(Value::Object(entry));
                table.push(vec![coeff.to_string(), monomial_string(mono, &names)]);
            }
            let mut out = Map::new();
            out.insert("point".into(), json::int_rows_to_value(&[coords.clone()])[0].clone());
            out.insert("terms".into(), Value::Array(terms));
            let mut report = Report::new(Value::Object(out));
            report.table = table;
            Ok(report)
        }
        Command::TmcZ { graph, params, steps } => {
            let g = load_graph(graph)?;
            let t = json::tmc_param_from_value(&g, &json::read_value(params)?)?;
            let z = partition_function(&g, &t, *steps);
            let mut report = Report::new(Value::Object(one_field("z", json::f64_to_value(z))));
            report.table = vec![vec!["z".into(), format!("{:.16e}", z)]];
            Ok(report)
        }
        Command::TmcExpected { graph, params, steps } => {
            let g = load_graph(graph)?;
            let t = json::tmc_param_from_value(&g, &json::read_value(params)?)?;
            let e = expected_counts(&g, &t, *steps);
            let mut report = Report::new(Value::Object(one_field(
                "expected",
                json::f64_rows_to_value(&e),
            )));
            report.table = f64_table(&e);
            Ok(report)
        }
        Command::TmcHomog { graph, params } => {
            let g = load_graph(graph)?;
            let t = json::tmc_param_from_value(&g, &json::read_value(params)?)?;
            match homogeneity_check(&g, &t, tol) {
                Homogeneity::IsMc { s } => {
                    let mut out = Map::new();
                    out.insert("is_mc".into(), Value::Bool(true));
                    out.insert("row_sum".into(), json::f64_to_value(s));
                    let mut report = Report::new(Value::Object(out));
                    report.table = vec![vec!["is_mc".into(), "true".into()]];
                    Ok(report)
                }
                Homogeneity::NotMc { v, w } => {
                    let mut out = Map::new();
                    out.insert("is_mc".into(), Value::Bool(false));
                    out.insert(
                        "witness".into(),
                        Value::Array(vec![
                            Value::String(g.label(v).to_string()),
                            Value::String(g.label(w).to_string()),
                        ]),
                    );
                    let mut report = Report::new(Value::Object(out));
                    report.table =
                        vec![vec!["is_mc".into(), "false".into()], vec![
                            "witness".into(),
                            format!("{} vs {}", g.label(v), g.label(w)),
                        ]];
                    report.negative = true;
                    Ok(report)
                }
            }
        }
        Command::Realizable { graph, counts } => {
            let g = load_graph(graph)?;
            let n = load_count_matrix(counts, cli.format)?;
            let mut out = Map::new();
            let mut report;
            match is_realizable(&n, &g) {
                Realizability::Closed => {
                    out.insert("realizable".into(), Value::Bool(true));
                    out.insert("kind".into(), Value::String("closed".into()));
                    report = Report::new(Value::Object(out));
                    report.table = vec![vec!["realizable".into(), "closed".into()]];
                }
                Realizability::Open { start, end } => {
                    out.insert("realizable".into(), Value::Bool(true));
                    out.insert("kind".into(), Value::String("open".into()));
                    out.insert("start".into(), Value::String(g.label(start).to_string()));
                    out.insert("end".into(), Value::String(g.label(end).to_string()));
                    report = Report::new(Value::Object(out));
                    report.table = vec![vec![
                        "realizable".into(),
                        format!("open {} -> {}", g.label(start), g.label(end)),
                    ]];
                }
                Realizability::NotRealizable(reason) => {
                    out.insert("realizable".into(), Value::Bool(false));
                    out.insert("reason".into(), Value::String(reason.clone()));
                    report = Report::new(Value::Object(out));
                    report.table = vec![vec!["realizable".into(), "false".into()],
                        vec!["reason".into(), reason]];
                    report.negative = true;
                }
            }
            Ok(report)
        }
        Command::Cycles { graph } => {
            let g = load_graph(graph)?;
            let census = cycle_census(&g, budget)?;
            let cycles = enumerate_cycles(&g, budget)?;
            let by_length = |m: &std::collections::BTreeMap<usize, usize>| {
                let mut out = Map::new();
                for (len, count) in m {
                    out.insert(len.to_string(), Value::Number(Number::from(*count as u64)));
                }
                Value::Object(out)
            };
            let mut totals = Map::new();
            totals.insert(
                "oriented".into(),
                Value::Number(Number::from(census.oriented_total() as u64)),
            );
            totals.insert(
                "unoriented".into(),
                Value::Number(Number::from(census.unoriented_total() as u64)),
            );
            totals.insert(
                "undirected".into(),
                Value::Number(Number::from(census.undirected_total() as u64)),
            );
            let mut census_obj = Map::new();
            census_obj.insert("oriented".into(), by_length(&census.oriented_by_length));
            census_obj.insert("unoriented".into(), by_length(&census.unoriented_by_length));
            census_obj.insert("undirected".into(), by_length(&census.undirected_by_length));
            census_obj.insert("totals".into(), Value::Object(totals));
            let mut out = Map::new();
            out.insert("census".into(), Value::Object(census_obj));
            out.insert(
                "cycles".into(),
                Value::Array(
                    cycles
                        .iter()
                        .map(|c| {
                            Value::Array(
                                c.states()
                                    .iter()
                                    .map(|&v| Value::String(g.label(v).to_string()))
                                    .collect(),
                            )
                        })
                        .collect(),
                ),
            );
            let mut report = Report::new(Value::Object(out));
            let mut table = vec![vec![
                "length".to_string(),
                "oriented".to_string(),
                "unoriented".to_string(),
                "undirected".to_string(),
            ]];
            for (len, count) in &census.oriented_by_length {
                table.push(vec![
                    len.to_string(),
                    count.to_string(),
                    census
                        .unoriented_by_length
                        .get(len)
                        .copied()
                        .unwrap_or(0)
                        .to_string(),
                    census
                        .undirected_by_length
                        .get(len)
                        .copied()
                        .unwrap_or(0)
                        .to_string(),
                ]);
            }
            report.table = table;
            Ok(report)
        }
        Command::Decompose { graph, trajectory } => {
            let g = load_graph(graph)?;
            let labels: Vec<&str> = trajectory.split(',').map(str::trim).collect();
            let traj = Trajectory::from_labels(&g, &labels)?;
            let (remainder, cycles) = decompose_trajectory(&g, &traj)?;
            let label_seq = |states: &[usize]| {
                Value::Array(
                    states
                        .iter()
                        .map(|&v| Value::String(g.label(v).to_string()))
                        .collect(),
                )
            };
            let mut items = Vec::new();
            let mut table = Vec::new();
            for (cycle, mult) in &cycles {
                let mut entry = Map::new();
                entry.insert("states".into(), label_seq(cycle.states()));
                entry.insert("multiplicity".into(), Value::Number(Number::from(*mult)));
                items.push(Value::Object(entry));
                table.push(vec![
                    mult.to_string(),
                    cycle
                        .states()
                        .iter()
                        .map(|&v| g.label(v))
                        .collect::<Vec<_>>()
                        .join(" "),
                ]);
            }
            let mut out = Map::new();
            out.insert("remainder".into(), label_seq(remainder.states()));
            out.insert("cycles".into(), Value::Array(items));
            let mut report = Report::new(Value::Object(out));
            report.table = table;
            Ok(report)
        }
        Command::Kcheck { graph, chain } => {
            let g = load_graph(graph)?;
            let p = load_chain_matrix(chain, cli.format)?;
            match kolmogorov_check(&g, &p, tol, budget)? {
                KolmogorovVerdict::Reversible => {
                    let mut report = Report::new(Value::Object(one_field(
                        "reversible",
                        Value::Bool(true),
                    )));
                    report.table = vec![vec!["reversible".into(), "true".into()]];
                    Ok(report)
                }
                KolmogorovVerdict::Violation(c) => {
                    let mut out = Map::new();
                    out.insert("reversible".into(), Value::Bool(false));
                    out.insert(
                        "witness".into(),
                        Value::Array(
                            c.states()
                                .iter()
                                .map(|&v| Value::String(g.label(v).to_string()))
                                .collect(),
                        ),
                    );
                    let mut report = Report::new(Value::Object(out));
                    report.table = vec![vec!["reversible".into(), "false".into()], vec![
                        "witness".into(),
                        c.states()
                            .iter()
                            .map(|&v| g.label(v))
                            .collect::<Vec<_>>()
                            .join(" "),
                    ]];
                    report.negative = true;
                    Ok(report)
                }
            }
        }
        Command::Dbsolve { graph, chain } => {
            let g = load_graph(graph)?;
            let p = load_chain_matrix(chain, cli.format)?;
            match detailed_balance_solve(&g, &p, tol)? {
                Some(kappa) => {
                    let mut out = Map::new();
                    out.insert("reversible".into(), Value::Bool(true));
                    out.insert("kappa".into(), json::f64_vec_to_value(&kappa));
                    let mut report = Report::new(Value::Object(out));
                    report.table = kappa
                        .iter()
                        .enumerate()
                        .map(|(v, x)| vec![g.label(v).to_string(), format!("{:.16e}", x)])
                        .collect();
                    Ok(report)
                }
                None => {
                    let mut report = Report::new(Value::Object(one_field(
                        "reversible",
                        Value::Bool(false),
                    )));
                    report.table = vec![vec!["reversible".into(), "false".into()]];
                    report.negative = true;
                    Ok(report)
                }
            }
        }
        Command::RevBuild { graph, params } => {
            let g = load_graph(graph)?;
            let rp = json::reversible_param_from_value(&g, &json::read_value(params)?)?;
            let (p, kappa) = reversible_from_params(&g, &rp)?;
            let mut out = Map::new();
            out.insert("p".into(), json::f64_rows_to_value(&p));
            out.insert("kappa".into(), json::f64_vec_to_value(&kappa));
            let mut report = Report::new(Value::Object(out));
            report.table = f64_table(&p);
            Ok(report)
        }
        Command::RevParams { graph, chain } => {
            let g = load_graph(graph)?;
            let p = load_chain_matrix(chain, cli.format)?;
            let rp = params_from_reversible(&g, &p, tol)?;
            let mut report = Report::new(json::reversible_param_to_value(&g, &rp));
            report.table = rp
                .t()
                .iter()
                .enumerate()
                .map(|(i, x)| vec![format!("t[{}]", i), format!("{:.16e}", x)])
                .collect();
            Ok(report)
        }
        Command::Metropolis { graph, joint, combiner } => {
            let g = load_graph(graph)?;
            let q = load_chain_matrix(joint, cli.format)?;
            let f = match combiner {
                CombinerKind::Min => Combiner::Min,
                CombinerKind::Harmonic => Combiner::Harmonic,
                CombinerKind::Product => Combiner::Product,
            };
            let p = metropolis_reversible(&g, &q, &f)?;
            let margins = crate::reversible::joint_margins(&p);
            let mut out = Map::new();
            out.insert("p".into(), json::f64_rows_to_value(&p));
            out.insert("margins".into(), json::f64_vec_to_value(&margins));
            let mut report = Report::new(Value::Object(out));
            report.table = f64_table(&p);
            Ok(report)
        }
        Command::Divergence { graph, chain, steps, pi } => {
            let g = load_graph(graph)?;
            let p = load_chain_matrix(chain, cli.format)?;
            let pi = match pi {
                Some(list) => parse_f64_list(list)?,
                None => stationary_distribution(&p)?,
            };
            let d = reversal_divergence(&g, &pi, &p, *steps, 1e-10)?;
            let mut out = Map::new();
            out.insert("divergence".into(), json::f64_to_value(d));
            out.insert("pi".into(), json::f64_vec_to_value(&pi));
            let mut report = Report::new(Value::Object(out));
            report.table = vec![vec!["divergence".into(), format!("{:.16e}", d)]];
            Ok(report)
        }
    }
}

fn one_field(key: &str, value: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert(key.to_string(), value);
    m
}

fn load_model(path: &Path, format: Format) -> Result<AModel> {
    match format {
        Format::Json => json::model_from_value(&json::read_value(path)?),
        Format::Csv => {
            let text = std::fs::read_to_string(path)?;
            let rows = json::csv_to_int_rows(&text)?;
            AModel::with_uniform_weights(IntMatrix::from_rows(&rows)?)
        }
    }
}

fn load_graph(path: &Path) -> Result<TransitionGraph> {
    json::graph_from_value(&json::read_value(path)?)
}

/// Chain files are either `{"p": [[...]]}` or a bare matrix.
fn load_chain_matrix(path: &Path, format: Format) -> Result<Vec<Vec<f64>>> {
    match format {
        Format::Csv => {
            let text = std::fs::read_to_string(path)?;
            json::csv_to_f64_rows(&text)
        }
        Format::Json => {
            let v = json::read_value(path)?;
            match v.as_object().and_then(|m| m.get("p")) {
                Some(inner) => json::f64_rows_from_value(inner),
                None => json::f64_rows_from_value(&v),
            }
        }
    }
}

fn load_count_matrix(path: &Path, format: Format) -> Result<Vec<Vec<u64>>> {
    let rows = match format {
        Format::Csv => {
            let text = std::fs::read_to_string(path)?;
            json::csv_to_int_rows(&text)?
        }
        Format::Json => {
            let v = json::read_value(path)?;
            let inner = match v.as_object().and_then(|m| m.get("n")) {
                Some(inner) => inner.clone(),
                None => v,
            };
            json::int_rows_from_value(&inner)?
        }
    };
    use num_traits::ToPrimitive;
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    x.to_u64()
                        .ok_or_else(|| Error::Input("counts must be nonnegative integers".into()))
                })
                .collect()
        })
        .collect()
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("bad number \"{}\"", x)))
        })
        .collect()
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| Error::Input(format!("bad exponent \"{}\"", x)))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("bad index \"{}\"", x)))
        })
        .collect()
}

/// Row reference: an index, or a row label when the model has them.
fn parse_row_ref(model: &AModel, r: &str) -> Result<usize> {
    if let Ok(i) = r.trim().parse::<usize>() {
        return Ok(i);
    }
    if let Some(labels) = model.row_labels() {
        if let Some(i) = labels.iter().position(|l| l == r.trim()) {
            return Ok(i);
        }
    }
    Err(Error::Input(format!("unknown row \"{}\"", r)))
}

/// Point reference: comma-separated coordinates, or a column label.
fn parse_point(model: &AModel, point: &str) -> Result<Vec<BigInt>> {
    let col_of = |j: usize| -> Vec<BigInt> {
        (1..model.matrix().rows())
            .map(|i| model.matrix().get(i, j).clone())
            .collect()
    };
    if let Some(labels) = model.col_labels() {
        if let Some(j) = labels.iter().position(|l| l == point.trim()) {
            return Ok(col_of(j));
        }
    }
    let coords = point
        .split(',')
        .map(|x| {
            use std::str::FromStr;
            BigInt::from_str(x.trim()).map_err(|_| Error::Input(format!("bad point \"{}\"", point)))
        })
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != model.matrix().rows() - 1 {
        return Err(Error::Input(format!(
            "point needs {} coordinates",
            model.matrix().rows() - 1
        )));
    }
    Ok(coords)
}

/// Names for the sample points (columns): labels if present, else p0, p1, ...
fn point_names(model: &AModel) -> Vec<String> {
    match model.col_labels() {
        Some(labels) => labels.to_vec(),
        None => (0..model.matrix().cols()).map(|j| format!("p{}", j)).collect(),
    }
}

/// Names for the design coordinates (rows past the first): labels if
/// present, else x1, x2, ...
fn coordinate_names(model: &AModel) -> Vec<String> {
    match model.row_labels() {
        Some(labels) => labels[1..].to_vec(),
        None => (1..model.matrix().rows()).map(|i| format!("x{}", i)).collect(),
    }
}

fn monomial_string(mono: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (v, &e) in mono.iter().enumerate() {
        if e == 1 {
            parts.push(names[v].clone());
        } else if e > 1 {
            parts.push(format!("{}^{}", names[v], e));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn binomial_string(b: &Binomial, names: &[String]) -> String {
    let side = |exps: &[BigInt]| {
        use num_traits::{One, Zero};
        let mut parts = Vec::new();
        for (j, e) in exps.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                parts.push(names[j].clone());
            } else {
                parts.push(format!("{}^{}", names[j], e));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    };
    format!("{} - {}", side(&b.plus), side(&b.minus))
}

fn int_table(rows: &[Vec<BigInt>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect()
}

fn f64_table(rows: &[Vec<f64>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|row| row.iter().map(|x| format!("{:.6}", x)).collect())
        .collect()
}

fn print_table(rows: &[Vec<String>]) {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.len());
        }
    }
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, cell)| format!("{:>width$}", cell, width = widths[j]))
            .collect();
        eprintln!("{}", line.join("  "));
    }
}
