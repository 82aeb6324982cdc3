use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gradprol::generate::{generate_instance, GeneratorParams};
use gradprol::pipeline::{
    find_witness, load_instance, run_instance, run_oracle, write_alpha, write_instance, Correction,
    InstanceFiles, PipelineError, RunOptions, ALPHA_FILE, EXIT_INFEASIBLE, EXIT_INPUT_ERROR,
};
use gradprol::rational::format_rational;

#[derive(Parser)]
#[command(version, about = "Build coarse edge prolongations with G^h α = β G^H")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Fine graph file
    fine: PathBuf,
    /// Aggregates file
    aggregates: PathBuf,
    /// Nodal prolongation α (defaults to the uniform split)
    #[arg(long)]
    alpha: Option<PathBuf>,
    /// Coarse graph (defaults to the built one)
    #[arg(long)]
    coarse: Option<PathBuf>,
}

impl InstanceArgs {
    fn files(&self) -> InstanceFiles {
        InstanceFiles {
            fine: self.fine.clone(),
            aggregates: self.aggregates.clone(),
            alpha: self.alpha.clone(),
            coarse: self.coarse.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the coarse graph and β, verify commutativity, write outputs
    Build {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Correction::Minnorm)]
        correction: Correction,
        /// Record wall-clock time in the report
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Generate a random instance
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        nodes: usize,
        /// Target edges per fine node
        #[arg(long, default_value_t = 2.0)]
        density: f64,
        #[arg(long, default_value_t = 5)]
        aggregates: usize,
        /// Probability of overlap across an aggregate boundary edge
        #[arg(long, default_value_t = 0.25)]
        overlap: f64,
        #[arg(long, default_value = "instance")]
        out: PathBuf,
    },
    /// Solve every row by dense elimination and compare with the solver
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Emit an α that no β can match on a disconnected induced subgraph
    Witness {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Fine edge to target (1-based); defaults to the first disconnected one
        #[arg(long)]
        edge: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, PipelineError> {
    match cli.command {
        Command::Build {
            instance,
            correction,
            timing,
            out,
        } => {
            let loaded = load_instance(&instance.files())?;
            let output = run_instance(&loaded, RunOptions { correction, timing })?;
            output.write_to(&out)?;
            let counts = &output.report.counts;
            println!(
                "solved {} rows, skipped {}, infeasible {}; commutativity {}",
                counts.solved,
                counts.skipped_not_in_f_tilde,
                counts.infeasible,
                output.report.commutativity
            );
            for row in &output.report.disconnected {
                println!(
                    "fine edge {}: disconnected induced subgraph {:?}",
                    row.fine_edge, row.components
                );
            }
            Ok(output.exit_code())
        }
        Command::Gen {
            seed,
            nodes,
            density,
            aggregates,
            overlap,
            out,
        } => {
            let instance = generate_instance(&GeneratorParams {
                seed,
                fine_nodes: nodes,
                density,
                aggregates,
                overlap,
            })?;
            write_instance(&instance, &out)?;
            println!(
                "wrote {} fine nodes, {} fine edges, {} aggregates to {}",
                instance.fine.node_count(),
                instance.fine.edge_count(),
                instance.aggregation.coarse_node_count(),
                out.display()
            );
            Ok(0)
        }
        Command::Oracle { instance } => {
            let loaded = load_instance(&instance.files())?;
            let cmp = run_oracle(&loaded)?;
            for (i, v) in cmp.verdicts.iter().enumerate() {
                let verdict = if v.is_solvable() {
                    "solvable"
                } else {
                    "unsolvable"
                };
                println!("{} {}", i + 1, verdict);
            }
            println!("agreement {}", cmp.agrees());
            if !cmp.agrees() {
                return Err(PipelineError::Usage("oracle and solver disagree".into()));
            }
            Ok(if cmp.all_solvable() {
                0
            } else {
                EXIT_INFEASIBLE
            })
        }
        Command::Witness {
            instance,
            edge,
            out,
        } => {
            let loaded = load_instance(&instance.files())?;
            let edge = match edge {
                Some(0) => return Err(PipelineError::Usage("edge indices start at 1".into())),
                Some(e) => Some(e - 1),
                None => None,
            };
            let witness = find_witness(&loaded, edge)?;
            std::fs::create_dir_all(&out).map_err(|source| PipelineError::Io {
                path: out.clone(),
                source,
            })?;
            write_alpha(&witness.alpha, &out.join(ALPHA_FILE))?;
            let component: Vec<usize> = witness.component.iter().map(|n| n + 1).collect();
            println!(
                "fine edge {} component {:?} witness {}",
                witness.fine_edge + 1,
                component,
                format_rational(&witness.value)
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
