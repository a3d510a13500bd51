use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use permspec::disambiguate::specification;
use permspec::enumeration::coefficients;
use permspec::io::{from_json_str, read_perm_file, to_json_string};
use permspec::oracle::{
    audit_specification, bound_looks_tight, check_simples_avoid_basis, enumerate_class, simples_in_class,
};
use permspec::sampler::{build_tables, heatmap, sample_batch};
use permspec::system::{ambiguous_system, SimpleSet};
use permspec::{Basis, EquationSystem, Perm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Combinatorial specifications, counting and uniform sampling for
/// permutation classes with finitely many simple permutations.
#[derive(Parser)]
#[command(name = "permspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an unambiguous specification and write it as JSON.
    Specify(ClassArgs),
    /// Print the system before disambiguation.
    Ambiguous {
        #[command(flatten)]
        class: ClassArgs,
        /// Emit JSON instead of one equation per line.
        #[arg(long)]
        json: bool,
    },
    /// Print the counting sequence, one "n<TAB>c_n" line per size.
    Count {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short = 'N', long = "order", default_value_t = 20)]
        order: usize,
        /// Also write the counts of every equation to this JSON file.
        #[arg(long)]
        tables_json: Option<PathBuf>,
    },
    /// Draw uniform permutations of one size, one per line.
    Sample(SampleArgs),
    /// Overlay samples: row x, column y counts samples with σ(x) = y.
    Heatmap {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute force checks for small sizes.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct ClassArgs {
    /// Basis file: one permutation per line, '#' starts a comment.
    #[arg(long)]
    basis: PathBuf,
    /// Simple permutations of the class, same format as the basis.
    #[arg(long, conflicts_with = "simples_bound")]
    simples: Option<PathBuf>,
    /// Without --simples, search the simples of the class up to this size.
    #[arg(long, default_value_t = 8)]
    simples_bound: usize,
    /// Accept bases containing 12 or 21.
    #[arg(long)]
    allow_small: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// List the permutations of size n avoiding the basis.
    Enumerate {
        #[arg(long)]
        basis: PathBuf,
        #[arg(short, long)]
        n: usize,
    },
    /// List the simple permutations of the class up to a size.
    Simples {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long, default_value_t = 8)]
        maxlen: usize,
    },
    /// Check disjointness and completeness of a specification.
    Audit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 7)]
        nmax: usize,
    },
}

fn read_basis(path: &Path, allow_small: bool) -> Result<Basis> {
    let patterns = read_perm_file(path)?;
    let basis = if allow_small { Basis::with_small_patterns(patterns) } else { Basis::new(patterns) };
    match basis {
        Err(e @ permspec::Error::TrivialClass(_)) if !allow_small => {
            Err(e).context(format!("{}: pass --allow-small to build the class anyway", path.display()))
        }
        r => Ok(r.with_context(|| format!("basis file {}", path.display()))?),
    }
}

fn read_class(args: &ClassArgs) -> Result<(Basis, SimpleSet)> {
    let basis = read_basis(&args.basis, args.allow_small)?;
    let simples = match &args.simples {
        Some(path) => {
            let s = read_perm_file(path)?;
            check_simples_avoid_basis(basis.patterns(), &s).with_context(|| format!("simples file {}", path.display()))?;
            s
        }
        None => {
            let s = simples_in_class(basis.patterns(), args.simples_bound);
            if bound_looks_tight(&s, args.simples_bound) {
                log::warn!(
                    "found a simple permutation of size {}; the class may have larger ones, raise --simples-bound",
                    args.simples_bound
                );
            }
            s
        }
    };
    Ok((basis, SimpleSet::new(simples)?))
}

fn read_spec(path: &Path) -> Result<EquationSystem> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    from_json_str(&text).with_context(|| format!("specification {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn draw(args: &SampleArgs) -> Result<Vec<Perm>> {
    let spec = read_spec(&args.spec)?;
    let tables = build_tables(&spec, args.size)?;
    Ok(sample_batch(&tables, args.size, args.count, args.seed, ChaCha8Rng::seed_from_u64)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Specify(args) => {
            let (basis, simples) = read_class(&args)?;
            let spec = specification(&basis, &simples)?;
            log::info!("{} equations", spec.len());
            emit(args.out.as_deref(), &to_json_string(&spec))
        }
        Command::Ambiguous { class, json } => {
            let (basis, simples) = read_class(&class)?;
            let sys = ambiguous_system(&basis, &simples)?;
            let text = if json { to_json_string(&sys) } else { sys.to_string() };
            emit(class.out.as_deref(), &text)
        }
        Command::Count { spec, order, tables_json } => {
            let spec = read_spec(&spec)?;
            let table = coefficients(&spec, order)?;
            let mut w = BufWriter::new(io::stdout().lock());
            for (n, c) in table.top().iter().enumerate().skip(1) {
                writeln!(w, "{n}\t{c}")?;
            }
            w.flush()?;
            if let Some(path) = tables_json {
                let tables: serde_json::Map<String, serde_json::Value> = table
                    .names
                    .iter()
                    .zip(&table.counts)
                    .map(|(name, cs)| (name.clone(), cs.iter().map(|c| c.to_string()).collect()))
                    .collect();
                let doc = serde_json::json!({ "order": order, "tables": tables });
                let mut text = serde_json::to_string_pretty(&doc)?;
                text.push('\n');
                emit(Some(&path), &text)?;
            }
            Ok(())
        }
        Command::Sample(args) => {
            let mut w = BufWriter::new(io::stdout().lock());
            for s in draw(&args)? {
                writeln!(w, "{s}")?;
            }
            Ok(w.flush()?)
        }
        Command::Heatmap { sample, out } => {
            let h = heatmap(&draw(&sample)?, sample.size);
            let mut text = String::new();
            for row in h {
                let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            emit(out.as_deref(), &text)
        }
        Command::Oracle(OracleCommand::Enumerate { basis, n }) => {
            let basis = read_perm_file(&basis)?;
            let mut w = BufWriter::new(io::stdout().lock());
            for s in enumerate_class(&basis, n) {
                writeln!(w, "{s}")?;
            }
            Ok(w.flush()?)
        }
        Command::Oracle(OracleCommand::Simples { basis, maxlen }) => {
            let simples = simples_in_class(&read_perm_file(&basis)?, maxlen);
            if bound_looks_tight(&simples, maxlen) {
                log::warn!("found a simple permutation of size {maxlen}; larger ones may exist");
            }
            for s in simples {
                println!("{s}");
            }
            Ok(())
        }
        Command::Oracle(OracleCommand::Audit { spec, nmax }) => {
            let report = audit_specification(&read_spec(&spec)?, nmax);
            for v in &report.violations {
                println!("{v}");
            }
            if !report.is_clean() {
                bail!("{} violations up to size {nmax}", report.total_violations);
            }
            println!("clean: {} checks up to size {nmax}", report.checked);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
