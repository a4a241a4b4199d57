use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use skewlines::geometry::{enumerate_subspaces, ResourceGuard};
use skewlines::incidence::{build_skew_lines, incidence_between, IncidenceKind, IncidenceSpec};
use skewlines::mmio::{ordering_comments, write_csv, write_matrix_market};
use skewlines::snf::{p_local_elementary_divisors, smith_normal_form, ElementaryDivisorProfile};
use skewlines::theorem::{
    check_prime, polynomial_identity_checks, verify_all, Engine, VerifyOptions,
};
use skewlines::Prime;

const EXIT_ERROR: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "skewlines",
    version,
    about = "Elementary divisors of subspace incidence matrices over F_p"
)]
struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Lift the family-size cap and the p <= 7 limit.
    #[arg(long, global = true)]
    allow_large: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the r-subspaces of F_p^n.
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Also print each subspace's reduced echelon basis.
        #[arg(long)]
        bases: bool,
    },
    /// Write an incidence matrix between r- and s-subspaces.
    Matrix {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, value_enum, default_value_t = Kind::Skew)]
        kind: Kind,
        /// Output path, `-` for stdout.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Mm)]
        format: Format,
    },
    /// Elementary divisors of the skew-lines matrix.
    Divisors {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Write the profile as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check every computed invariant of the skew-lines matrix against its closed form.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Run the checks that are skipped by default on large matrices.
        #[arg(long)]
        all_checks: bool,
        /// Write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate the polynomial identities between the closed forms.
    Identities,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Skew,
    Psi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Mm,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Bigint,
    Plocal,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Bigint => Engine::Bigint,
            EngineArg::Plocal => Engine::PLocal,
            EngineArg::Both => Engine::Both,
        }
    }
}

fn guard(allow_large: bool) -> anyhow::Result<ResourceGuard> {
    let mut g = ResourceGuard::from_env()?;
    g.allow_override = allow_large;
    Ok(g)
}

fn create(path: &Path) -> anyhow::Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout().lock()));
    }
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let allow_large = cli.allow_large;
    match cli.command {
        Command::Enumerate { p, n, r, bases } => {
            let p = Prime::new(p)?;
            let family = enumerate_subspaces(p, n, r, &guard(allow_large)?)?;
            println!("{} subspaces", family.len());
            if bases {
                for line in ordering_comments("subspace", &family, true).iter().skip(1) {
                    println!("{line}");
                }
            }
        }
        Command::Matrix {
            p,
            n,
            r,
            s,
            kind,
            out,
            format,
        } => {
            let p = Prime::new(p)?;
            let kind = match kind {
                Kind::Skew => IncidenceKind::Skew,
                Kind::Psi => IncidenceKind::HyperplaneComplement,
            };
            let spec = IncidenceSpec { p, n, r, s, kind };
            spec.validate()?;
            let g = guard(allow_large)?;
            let rows = enumerate_subspaces(p, n, r, &g)?;
            let cols = enumerate_subspaces(p, n, s, &g)?;
            let m = incidence_between(&rows, &cols, kind)?;
            let mut comments = vec![match kind {
                IncidenceKind::Skew => {
                    "entry 1 iff the row and column subspaces meet only in 0".to_string()
                }
                IncidenceKind::HyperplaneComplement => {
                    "entry 1 iff the column subspace is not contained in the row hyperplane"
                        .to_string()
                }
            }];
            comments.extend(ordering_comments("row", &rows, true));
            comments.extend(ordering_comments("column", &cols, true));
            let w = create(&out)?;
            match format {
                Format::Mm => write_matrix_market(&m, &comments, w)?,
                Format::Csv => write_csv(&m, &comments, w)?,
            }
        }
        Command::Divisors { p, engine, json } => {
            let p = Prime::new(p)?;
            let engine = engine.map_or_else(|| Engine::default_for(p), Engine::from);
            let opts = VerifyOptions {
                guard: guard(allow_large)?,
                allow_large_prime: allow_large,
                exhaustive: false,
            };
            check_prime(p, Some(engine), &opts)?;
            let a = build_skew_lines(p, &opts.guard)?;
            let size = a.rows();
            let mut profiles: Vec<(&str, ElementaryDivisorProfile)> = Vec::new();
            if matches!(engine, Engine::Bigint | Engine::Both) {
                let snf = smith_normal_form(&a, false);
                profiles.push((
                    "bigint",
                    ElementaryDivisorProfile::from_invariant_factors(p, size, &snf.diagonal),
                ));
            }
            if matches!(engine, Engine::PLocal | Engine::Both) {
                profiles.push(("p_local", p_local_elementary_divisors(&a, p)?));
            }
            let (_, first) = &profiles[0];
            println!("p = {p}, A is {size} x {size}\n");
            print!("{first}");
            if let Some((_, other)) = profiles.get(1) {
                if other != first {
                    eprintln!("bigint and p-local profiles differ:\n{other}");
                    return Ok(EXIT_VERIFY_FAILED);
                }
                println!("\nbigint and p-local engines agree");
            }
            if let Some(path) = json {
                write_text(&path, &first.to_json())?;
            }
        }
        Command::Verify {
            p,
            engine,
            all_checks,
            json,
        } => {
            let p = Prime::new(p)?;
            let engine = engine.map_or_else(|| Engine::default_for(p), Engine::from);
            let opts = VerifyOptions {
                guard: guard(allow_large)?,
                allow_large_prime: allow_large,
                exhaustive: all_checks,
            };
            let report = verify_all(p, engine, &opts)?;
            print!("{}", report.render());
            if let Some(path) = json {
                write_text(&path, &report.to_json())?;
            }
            if !report.passed {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Identities => {
            let checks = polynomial_identity_checks();
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(EXIT_VERIFY_FAILED);
            }
            println!("\nall identities hold");
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_ERROR);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
