//! Command-line front end of `exner-bench`.
//!
//! Settings come from built-in defaults, then an optional `key = value`
//! config file, then flags. Exit codes: 0 success, 1 an acceptance check
//! failed (outputs are still written), 2 configuration or domain error,
//! 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{ExnerError, Result};
use crate::harness::{
    exact_profile, run_benchmark, run_convergence, snapshot_profile, verify_oracle,
    BenchmarkConfig, Check, ProfileRow,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Column header of every profile CSV.
pub const CSV_HEADER: &str = "x,h,u,z_b,eta,q_b";

#[derive(Debug, Parser)]
#[command(
    name = "exner-bench",
    version,
    about = "Saint-Venant-Exner solver checked against an exact solution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CommandKind {
    Bench,
    Converge,
    Verify,
    ExactDump,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate to T and compare with the exact solution.
    Bench(Flags),
    /// Run a mesh-refinement study and fit convergence rates.
    Converge(Flags),
    /// Check the exact solution against the equations by finite differences.
    Verify(Flags),
    /// Write the exact solution at the requested times.
    ExactDump(Flags),
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// Flat key = value file; flags override its entries.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "J")]
    cells: Option<String>,
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    cfl: Option<String>,
    /// Final time in seconds.
    #[arg(long, value_name = "T", allow_hyphen_values = true)]
    tend: Option<String>,
    /// relaxation | rusanov
    #[arg(long)]
    scheme: Option<String>,
    /// grass | mpm | custom
    #[arg(long)]
    law: Option<String>,
    /// exact | transmissive
    #[arg(long)]
    bc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    /// Seed of the oracle sampler.
    #[arg(long, value_name = "N")]
    seed: Option<String>,
    /// Number of oracle sample points.
    #[arg(long, value_name = "N")]
    samples: Option<String>,
    /// Comma-separated mesh sizes for `converge`.
    #[arg(long, value_name = "J,J,...")]
    levels: Option<String>,
    /// Comma-separated output times for `exact-dump`.
    #[arg(long, value_name = "T,T,...")]
    times: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let pairs = [
            ("cells", &self.cells),
            ("cfl", &self.cfl),
            ("tend", &self.tend),
            ("scheme", &self.scheme),
            ("law", &self.law),
            ("bc", &self.bc),
            ("xmin", &self.xmin),
            ("xmax", &self.xmax),
            ("out", &self.out),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("levels", &self.levels),
            ("times", &self.times),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }
}

/// Parsed `key = value` lines. Blank lines and `#` comments are ignored.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ExnerError::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                n + 1
            ))
        })?;
        let key = key.trim();
        if !BenchmarkConfig::KEYS.contains(&key) {
            return Err(ExnerError::Config(format!(
                "line {}: unknown config key `{key}`",
                n + 1
            )));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub config_path: Option<PathBuf>,
    pub bench: BenchmarkConfig,
    /// Whether the final time was given explicitly.
    pub explicit_tend: bool,
}

impl CliConfig {
    fn resolve(flags: &Flags) -> Result<Self> {
        let mut bench = BenchmarkConfig::default();
        let mut explicit_tend = false;
        let mut pairs: Vec<(String, String)> = Vec::new();
        if let Some(path) = &flags.config {
            let text = fs::read_to_string(path).map_err(|e| {
                ExnerError::Config(format!("cannot read config file {}: {e}", path.display()))
            })?;
            pairs = parse_config_text(&text)
                .map_err(|e| ExnerError::Config(format!("{}: {e}", path.display())))?;
        }
        pairs.extend(
            flags
                .overrides()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string())),
        );
        for (k, v) in &pairs {
            bench.set(k, v)?;
            explicit_tend |= k == "tend";
        }
        Ok(CliConfig {
            config_path: flags.config.clone(),
            bench,
            explicit_tend,
        })
    }
}

fn format_profile(rows: &[ProfileRow]) -> String {
    let mut s = String::with_capacity(rows.len() * 150);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.x, r.h, r.u, r.z_b, r.eta, r.q_b
        );
    }
    s
}

pub fn write_profile(path: &Path, rows: &[ProfileRow]) -> Result<()> {
    fs::write(path, format_profile(rows))?;
    Ok(())
}

/// Two-panel gnuplot script: free surface and bed, then velocity.
pub fn plot_script(computed: &str, exact: &str, title: &str) -> String {
    format!(
        "# run from this directory: gnuplot plot.gp\n\
         set terminal pngcairo size 1200,450\n\
         set output 'profiles.png'\n\
         set datafile separator ','\n\
         set multiplot layout 1,2 title '{title}'\n\
         set xlabel 'x (m)'\n\
         set ylabel 'elevation (m)'\n\
         set title 'water surface and bed'\n\
         plot '{computed}' using 1:5 skip 1 with lines title 'h+z_b', \\\n\
         \x20    '{computed}' using 1:4 skip 1 with lines title 'z_b', \\\n\
         \x20    '{exact}' using 1:5 skip 1 with lines dashtype 2 title 'exact h+z_b', \\\n\
         \x20    '{exact}' using 1:4 skip 1 with lines dashtype 2 title 'exact z_b'\n\
         set ylabel 'u (m/s)'\n\
         set title 'velocity'\n\
         plot '{computed}' using 1:3 skip 1 with lines title 'u', \\\n\
         \x20    '{exact}' using 1:3 skip 1 with lines dashtype 2 title 'exact u'\n\
         unset multiplot\n"
    )
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| ExnerError::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn report_checks(checks: &[Check]) -> i32 {
    for c in checks {
        if c.passed {
            println!("{c}");
        } else {
            eprintln!("{c}");
        }
    }
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn bench(cfg: &BenchmarkConfig) -> Result<i32> {
    let run = run_benchmark(cfg)?;
    let law = cfg.law()?;
    let out = &cfg.out;
    fs::create_dir_all(out)?;
    write_profile(
        &out.join("snapshot.csv"),
        &snapshot_profile(&run.snapshot, &law),
    )?;
    write_profile(
        &out.join("exact.csv"),
        &exact_profile(cfg, run.snapshot.time)?,
    )?;
    let title = format!(
        "{} scheme, J = {}, t = {} s",
        cfg.scheme, cfg.cells, run.snapshot.time
    );
    fs::write(
        out.join("plot.gp"),
        plot_script("snapshot.csv", "exact.csv", &title),
    )?;
    write_json(&out.join("report.json"), &run.report)?;
    let n = &run.report.norms;
    println!(
        "{} J={} T={}: {} steps, relative L1 h {:.3e} u {:.3e} z_b {:.3e}",
        cfg.scheme,
        cfg.cells,
        run.snapshot.time,
        run.report.steps,
        n.h.rel_l1,
        n.u.rel_l1,
        n.z_b.rel_l1
    );
    Ok(report_checks(&run.report.checks))
}

fn converge(cfg: &BenchmarkConfig) -> Result<i32> {
    let report = run_convergence(cfg, &cfg.levels)?;
    fs::create_dir_all(&cfg.out)?;
    write_json(&cfg.out.join("convergence.json"), &report)?;
    for l in &report.levels {
        println!(
            "J={:<6} L1 h {:.4e} u {:.4e} z_b {:.4e}",
            l.cells, l.l1.h, l.l1.u, l.l1.z_b
        );
    }
    let r = &report.rates;
    println!("rates: h {:.3} u {:.3} z_b {:.3}", r.h, r.u, r.z_b);
    Ok(report_checks(&report.checks))
}

fn verify(cfg: &BenchmarkConfig) -> Result<i32> {
    let report = verify_oracle(cfg)?;
    fs::create_dir_all(&cfg.out)?;
    write_json(&cfg.out.join("oracle.json"), &report)?;
    println!(
        "{} samples ({} skipped), seed {}",
        report.samples, report.skipped, report.seed
    );
    if report.skipped > 0 {
        eprintln!(
            "warning: {} samples left the validity domain and were skipped",
            report.skipped
        );
    }
    Ok(report_checks(&report.checks))
}

fn exact_dump(cfg: &BenchmarkConfig) -> Result<i32> {
    if cfg.times.is_empty() {
        return Ok(EXIT_OK);
    }
    // compute everything before touching the output directory
    let profiles = cfg
        .times
        .iter()
        .map(|&t| Ok((t, exact_profile(cfg, t)?)))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(&cfg.out)?;
    for (t, rows) in profiles {
        let path = cfg.out.join(format!("exact_t{t}.csv"));
        write_profile(&path, &rows)?;
        println!("{}", path.display());
    }
    Ok(EXIT_OK)
}

fn dispatch(kind: CommandKind, flags: &Flags) -> Result<i32> {
    let cli = CliConfig::resolve(flags)?;
    let mut cfg = cli.bench;
    if kind == CommandKind::Converge && !cli.explicit_tend {
        cfg.t_end = 1.0;
    }
    cfg.validate()?;
    match kind {
        CommandKind::Bench => bench(&cfg),
        CommandKind::Converge => converge(&cfg),
        CommandKind::Verify => verify(&cfg),
        CommandKind::ExactDump => exact_dump(&cfg),
    }
}

/// Parse `argv`, run the subcommand and return the process exit code.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (kind, flags) = match &cli.command {
        Command::Bench(f) => (CommandKind::Bench, f),
        Command::Converge(f) => (CommandKind::Converge, f),
        Command::Verify(f) => (CommandKind::Verify, f),
        Command::ExactDump(f) => (CommandKind::ExactDump, f),
    };
    match dispatch(kind, flags) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    }
}
