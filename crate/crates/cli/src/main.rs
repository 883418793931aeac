use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use modalrel::harness::{run_campaign, CampaignConfig, GenParams};
use modalrel::kripke::{answer_direct, EvalError, KripkeModel};
use modalrel::par::Execution;
use modalrel::relalg::{eval, render_algebra, RelationInstance};
use modalrel::schema::{build_database, render_tables};
use modalrel::syntax::{parse_query, ModalQuery};
use modalrel::translate::{translate_query, Mutation, TranslateError, TranslateOptions};

const GRAMMAR: &str = "\
QUERY GRAMMAR
  formula := formula -> formula            (right associative, loosest)
           | formula | formula
           | formula & formula
           | ! unary | <R> unary | [R] unary
           | exists VAR . unary | forall VAR . unary
           | <lam VAR . formula>(term)
           | term = term | term != term
           | ( formula )
  term    := 'object'        quoted object constant
           | concept         bare concept constant
           | ?x              object variable
           | %a              concept variable
           | @concept | @%a  concept value at the current state
  Quantifier bodies bind tightly: `exists ?x . (p & q)` needs the parentheses.
  Targets are the free variables, listed with --target ?x --target ?y or
  --target ?x,?y, in the order the answer columns should appear.

EXIT CODES
  0  success
  1  usage or I/O error
  2  query parse, kind or signature error
  3  model file or model invariant error
  4  query has no algebra translation (@ applied to a concept variable)
  5  the two engines disagree, or a fuzz campaign failed";

#[derive(Parser)]
#[command(name = "modalrel", version, about = "Modal queries over Kripke models, evaluated directly or compiled to relational algebra", after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Direct,
    Algebra,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    AtomIgnoresComparison,
    NegationIsIdentity,
    DiamondIgnoresRelationName,
    BoxAsDiamond,
    OrAsIntersection,
    AndAsUnion,
    ExistsAsForall,
    ForallAsExists,
    LambdaIgnoresStateJoin,
    LambdaSkipsSubstitution,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::AtomIgnoresComparison => Mutation::AtomIgnoresComparison,
            MutationArg::NegationIsIdentity => Mutation::NegationIsIdentity,
            MutationArg::DiamondIgnoresRelationName => Mutation::DiamondIgnoresRelationName,
            MutationArg::BoxAsDiamond => Mutation::BoxAsDiamond,
            MutationArg::OrAsIntersection => Mutation::OrAsIntersection,
            MutationArg::AndAsUnion => Mutation::AndAsUnion,
            MutationArg::ExistsAsForall => Mutation::ExistsAsForall,
            MutationArg::ForallAsExists => Mutation::ForallAsExists,
            MutationArg::LambdaIgnoresStateJoin => Mutation::LambdaIgnoresStateJoin,
            MutationArg::LambdaSkipsSubstitution => Mutation::LambdaSkipsSubstitution,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print (or write) the Sta, Rel, Con and Obj tables of a model
    Map {
        model: PathBuf,
        /// Write Sta.tsv, Rel.tsv, Con.tsv and Obj.tsv into this directory
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Start each table with a line of column indices
        #[arg(long)]
        header: bool,
    },
    /// Print the relational algebra expression for a query
    Translate {
        query: String,
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "target", value_delimiter = ',')]
        targets: Vec<String>,
        /// Also evaluate the expression and print the answer
        #[arg(long)]
        eval: bool,
        #[arg(long)]
        header: bool,
    },
    /// Answer a query on a model
    Eval {
        query: String,
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "target", value_delimiter = ',')]
        targets: Vec<String>,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
        #[arg(long)]
        header: bool,
    },
    /// Differential campaign over random models and queries
    Fuzz {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 6)]
        max_states: usize,
        #[arg(long, default_value_t = 8)]
        max_objects: usize,
        #[arg(long, default_value_t = 3)]
        max_concepts: usize,
        #[arg(long, default_value_t = 2)]
        max_relations: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        #[arg(long, default_value_t = 2)]
        max_free_vars: usize,
        /// Generate predicate abstractions
        #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
        allow_lambda: bool,
        /// Allow @%a; such queries only run through the direct evaluator
        #[arg(long)]
        allow_concept_vars: bool,
        /// Break one translation rule on purpose
        #[arg(long, value_enum)]
        mutation: Option<MutationArg>,
        /// Write a JSON report with per-case results and timings
        #[arg(long)]
        report: Option<PathBuf>,
        /// Run cases one at a time
        #[arg(long)]
        sequential: bool,
        /// Skip counterexample shrinking
        #[arg(long)]
        no_shrink: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(1, format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<KripkeModel, Failure> {
    KripkeModel::from_json(&read(path)?).map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))
}

fn load_query(text: &str, targets: &[String]) -> Result<ModalQuery, Failure> {
    parse_query(text, targets).map_err(|e| Failure::new(2, e.to_string()))
}

fn translate_failure(e: TranslateError) -> Failure {
    let code = if matches!(e, TranslateError::UntranslatableTerm(_)) {
        4
    } else {
        2
    };
    Failure::new(code, e.to_string())
}

fn direct_failure(e: EvalError) -> Failure {
    Failure::new(2, e.to_string())
}

fn algebra_answer(model: &KripkeModel, query: &ModalQuery) -> Result<(String, RelationInstance), Failure> {
    let expr = translate_query(query, model).map_err(translate_failure)?;
    let answer =
        eval(&expr, &build_database(model).instance).map_err(|e| Failure::new(1, format!("internal error: {e}")))?;
    Ok((render_algebra(&expr), answer))
}

fn cmd_map(model: &Path, out_dir: Option<&Path>, header: bool) -> CmdResult {
    let tables = render_tables(&build_database(&load_model(model)?), header);
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::new(1, format!("{}: {e}", dir.display())))?;
            let mut written = String::new();
            for (name, body) in tables {
                let path = dir.join(&name);
                fs::write(&path, body).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
                written.push_str(&format!("{}\n", path.display()));
            }
            Ok(written)
        }
        None => Ok(tables
            .into_iter()
            .map(|(name, body)| format!("# {}\n{body}", name.trim_end_matches(".tsv")))
            .collect::<Vec<_>>()
            .join("\n")),
    }
}

fn cmd_translate(query: &str, model: &Path, targets: &[String], evaluate: bool, header: bool) -> CmdResult {
    let model = load_model(model)?;
    let query = load_query(query, targets)?;
    let (text, answer) = algebra_answer(&model, &query)?;
    let mut out = format!("{text}\n");
    if evaluate {
        out.push_str(&answer.to_tsv(header));
    }
    Ok(out)
}

fn cmd_eval(query: &str, model: &Path, targets: &[String], engine: Engine, header: bool) -> CmdResult {
    let model = load_model(model)?;
    let query = load_query(query, targets)?;
    let answer = match engine {
        Engine::Direct => answer_direct(&model, &query).map_err(direct_failure)?,
        Engine::Algebra => algebra_answer(&model, &query)?.1,
        Engine::Both => {
            let direct = answer_direct(&model, &query).map_err(direct_failure)?;
            let (_, algebra) = algebra_answer(&model, &query)?;
            if direct != algebra {
                return Err(Failure::new(
                    5,
                    format!(
                        "engines disagree: direct has {} rows, algebra has {}",
                        direct.len(),
                        algebra.len()
                    ),
                ));
            }
            direct
        }
    };
    Ok(answer.to_tsv(header))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Map { model, out_dir, header } => cmd_map(&model, out_dir.as_deref(), header),
        Command::Translate {
            query,
            model,
            targets,
            eval,
            header,
        } => cmd_translate(&query, &model, &targets, eval, header),
        Command::Eval {
            query,
            model,
            targets,
            engine,
            header,
        } => cmd_eval(&query, &model, &targets, engine, header),
        Command::Fuzz {
            seed,
            cases,
            max_states,
            max_objects,
            max_concepts,
            max_relations,
            max_depth,
            max_free_vars,
            allow_lambda,
            allow_concept_vars,
            mutation,
            report,
            sequential,
            no_shrink,
        } => {
            let params = GenParams {
                seed,
                max_states,
                max_objects,
                max_concepts,
                max_relations,
                max_depth,
                max_free_vars,
                allow_lambda,
                allow_concept_vars,
            };
            let mut cfg = CampaignConfig::new(params, cases);
            cfg.execution = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            cfg.options = TranslateOptions {
                mutation: mutation.map(Mutation::from),
                ..TranslateOptions::default()
            };
            cfg.shrink = !no_shrink;
            let summary = run_campaign(&cfg).map_err(|e| Failure::new(1, e.to_string()))?;
            eprintln!("wall time {:.3}s", summary.elapsed.as_secs_f64());
            if let Some(path) = report {
                fs::write(&path, summary.to_json()).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
            }
            let text = summary.render();
            if summary.ok() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::new(5, "campaign failed"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
