use clap::{Parser, Subcommand};
use stgrad::cli::{self, Options};

#[derive(Parser)]
#[command(
    name = "stgrad",
    about = "Exact invariants of stably graded exceptional Lie algebras, verified against the built-in catalog"
)]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
    /// Enumerate the large Weyl groups (adds the full W(E7) run).
    #[arg(long, global = true)]
    enumerate_large: bool,
    /// Run the slow optional b-function computations.
    #[arg(long, global = true)]
    bfun_heavy: bool,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze one grading case and compare against the catalog.
    Analyze {
        /// Case label, e.g. "E8,5s" or "3D4,3s".
        label: String,
    },
    /// Recompute and verify every case of the catalog.
    Tables,
    /// Print computed orbit data of a case (exploration helper).
    Probe { label: String },
    /// b-function data of a rank-one case.
    Bfun {
        /// Case label, e.g. "G2,3s".
        label: String,
        /// Integer values for the parameters s_1, s_2, ...
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        s: Vec<i64>,
        /// Only assemble b_exp from the stored roots.
        #[arg(long)]
        roots_only: bool,
    },
}

fn main() {
    let args = Args::parse();
    let opts = Options {
        enumerate_large: args.enumerate_large,
        bfun_heavy: args.bfun_heavy,
    };
    let code = match args.cmd {
        Cmd::Analyze { label } => match cli::cmd_analyze(&label, opts) {
            Ok(rep) => {
                if args.json {
                    println!("{}", serde_json::to_string_pretty(&rep).unwrap());
                } else {
                    print!("{}", rep.render());
                }
                if rep.all_ok() {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Cmd::Tables => match cli::cmd_tables(opts) {
            Ok(out) => {
                if args.json {
                    println!("{}", serde_json::to_string_pretty(&out.reports).unwrap());
                } else {
                    for rep in &out.reports {
                        print!("{}", rep.render());
                    }
                    let n_ok = out.reports.iter().filter(|r| r.all_ok()).count();
                    println!("---\n{}/{} cases match", n_ok, out.reports.len());
                }
                if out.all_ok {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Cmd::Probe { label } => match cli::cmd_probe(&label, opts) {
            Ok(text) => {
                println!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Cmd::Bfun {
            label,
            s,
            roots_only,
        } => match cli::cmd_bfun(&label, &s, roots_only, opts) {
            Ok(text) => {
                println!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
    };
    std::process::exit(code);
}
