//! The `vol` command line: single contracts from flags, or chains from CSV.
//!
//! Exit codes: 0 on success, 1 on data errors (bad rows, missing columns,
//! unreadable files), 2 on usage errors. Results go to stdout or `--output`;
//! diagnostics go to stderr only.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use vol_batch::{
    batch_greeks, batch_iv, batch_price, env_workers, format_output, format_plain, parse_csv, BatchError,
    BatchOptions, ChainTable, Column, Format, THREADS_ENV,
};
use vol_core::{IvMethod, Model, OptionFlag};

const CHAIN_COLUMNS: [&str; 9] = ["flag", "S", "F", "K", "t", "r", "q", "sigma", "price"];
const GREEK_COLUMNS: [&str; 5] = ["delta", "gamma", "theta", "rho", "vega"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "vol", version, about = "European option pricing, Greeks and implied volatility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price from volatility.
    Price(Args),
    /// Implied volatility from price.
    Iv(Args),
    /// Delta, gamma, theta (per day), rho and vega (per 1%).
    Greeks(Args),
    /// Run several computations over a CSV chain.
    Chain(Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Compute {
    Price,
    Iv,
    Greeks,
}

#[derive(Debug, clap::Args)]
struct Args {
    /// black, bs or bsm.
    #[arg(long, default_value = "bsm")]
    model: Model,
    /// halley or lbr.
    #[arg(long, default_value = "halley")]
    method: IvMethod,
    /// c or p.
    #[arg(long)]
    flag: Option<String>,
    /// Spot price (bs, bsm).
    #[arg(long = "s", allow_negative_numbers = true)]
    spot: Option<f64>,
    /// Forward price (black).
    #[arg(long = "f", allow_negative_numbers = true)]
    forward: Option<f64>,
    #[arg(long = "k", allow_negative_numbers = true)]
    strike: Option<f64>,
    /// Years to expiry.
    #[arg(long = "t", allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long = "r", allow_negative_numbers = true)]
    r: Option<f64>,
    /// Dividend yield (bsm only).
    #[arg(long = "q", allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    price: Option<f64>,
    /// CSV chain to read, or `-` for stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv, json or plain. Defaults to plain for a single contract, csv for a chain.
    #[arg(long)]
    format: Option<Format>,
    /// Computations for `chain`, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    compute: Vec<Compute>,
}

impl Args {
    fn has_inline_fields(&self) -> bool {
        self.flag.is_some()
            || [self.spot, self.forward, self.strike, self.t, self.r, self.q, self.sigma, self.price]
                .iter()
                .any(Option::is_some)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (args, steps) = match command {
        Command::Price(a) | Command::Iv(a) | Command::Greeks(a) if !a.compute.is_empty() => {
            return Err(CliError::Usage("--compute is only valid with chain".into()));
        }
        Command::Price(a) => (a, vec![Compute::Price]),
        Command::Iv(a) => (a, vec![Compute::Iv]),
        Command::Greeks(a) => (a, vec![Compute::Greeks]),
        Command::Chain(a) => {
            if a.compute.is_empty() {
                return Err(CliError::Usage("chain needs --compute (price, iv, greeks)".into()));
            }
            if a.input.is_none() {
                return Err(CliError::Usage("chain needs --input".into()));
            }
            let mut steps = a.compute.clone();
            steps.sort();
            steps.dedup();
            (a, steps)
        }
    };
    if std::env::var_os(THREADS_ENV).is_some() && env_workers().is_none() {
        let _ = writeln!(stderr, "warning: ignoring {THREADS_ENV}: expected a positive integer");
    }
    let opts = BatchOptions::default();

    let text = match &args.input {
        Some(path) => {
            if args.has_inline_fields() {
                return Err(CliError::Usage("give either --input or inline contract fields, not both".into()));
            }
            let table = parse_csv(&read_input(path)?).map_err(|e| data_error(e, true))?;
            check_columns(&table, args.model, &steps)?;
            let table = compute(table, args.model, args.method, &steps, &opts)?;
            format_output(&table, args.format.unwrap_or(Format::Csv))
        }
        None => {
            let table = inline_table(&args, steps[0])?;
            let table = compute(table, args.model, args.method, &steps, &opts)?;
            inline_output(&table, steps[0], args.format.unwrap_or(Format::Plain))?
        }
    };
    match &args.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Data(format!("cannot write output: {e}"))),
    }
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

fn data_error(e: BatchError, from_file: bool) -> CliError {
    match e.index() {
        // header is line 1, data row 0 is line 2
        Some(i) if from_file => CliError::Data(format!("{e} (line {})", i + 2)),
        _ => CliError::Data(e.to_string()),
    }
}

fn check_columns(table: &ChainTable, model: Model, steps: &[Compute]) -> Result<(), CliError> {
    let missing = |c: &str| CliError::Data(format!("missing column {c}, required by --model {model} and the requested computation"));
    let has = |c: &str| table.get(c).is_some();
    if let Some(unknown) = table.names().find(|n| !CHAIN_COLUMNS.contains(n)) {
        return Err(CliError::Data(format!("unknown column {unknown} (expected columns from {})", CHAIN_COLUMNS.join(","))));
    }
    let (underlying, other) = if model.is_spot() { ("S", "F") } else { ("F", "S") };
    if has(other) {
        return Err(CliError::Data(format!("column {other} is not used by --model {model} (expected {underlying})")));
    }
    if has("q") && model != Model::BlackScholesMerton {
        return Err(CliError::Data(format!("column q is not used by --model {model}; use --model bsm")));
    }
    for c in ["flag", underlying, "K", "t", "r"] {
        if !has(c) {
            return Err(missing(c));
        }
    }
    if (steps.contains(&Compute::Price) || steps.contains(&Compute::Greeks)) && !has("sigma") {
        return Err(missing("sigma"));
    }
    if steps.contains(&Compute::Price) && has("price") {
        return Err(CliError::Data("column price is already present; drop it or do not request price".into()));
    }
    if steps.contains(&Compute::Iv) && !steps.contains(&Compute::Price) && !has("price") {
        return Err(missing("price"));
    }
    Ok(())
}

fn compute(
    mut table: ChainTable,
    model: Model,
    method: IvMethod,
    steps: &[Compute],
    opts: &BatchOptions,
) -> Result<ChainTable, CliError> {
    let from_file = table.len() != 1;
    for step in steps {
        table = match step {
            Compute::Price => batch_price(model, &table, opts),
            Compute::Iv => batch_iv(model, method, &table, opts),
            Compute::Greeks => batch_greeks(model, &table, opts),
        }
        .map_err(|e| data_error(e, from_file))?;
    }
    Ok(table)
}

fn inline_table(args: &Args, step: Compute) -> Result<ChainTable, CliError> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Usage(format!("missing --{name}")));
    let flag: OptionFlag = args
        .flag
        .as_deref()
        .ok_or_else(|| CliError::Usage("missing --flag".into()))?
        .parse()
        .map_err(|_| CliError::Usage(format!("bad --flag {:?} (expected c or p)", args.flag.as_deref().unwrap_or(""))))?;
    let (underlying_name, underlying, other) = if args.model.is_spot() {
        ("S", need(args.spot, "s")?, args.forward.map(|_| "--f"))
    } else {
        ("F", need(args.forward, "f")?, args.spot.map(|_| "--s"))
    };
    if let Some(opt) = other {
        return Err(CliError::Usage(format!("{opt} is not used by --model {}", args.model)));
    }
    if args.q.is_some() && args.model != Model::BlackScholesMerton {
        return Err(CliError::Usage(format!("--q is not used by --model {}; use --model bsm", args.model)));
    }
    let mut columns = vec![
        (underlying_name, underlying),
        ("K", need(args.strike, "k")?),
        ("t", need(args.t, "t")?),
        ("r", need(args.r, "r")?),
    ];
    if let Some(q) = args.q {
        columns.push(("q", q));
    }
    match step {
        Compute::Iv => columns.push(("price", need(args.price, "price")?)),
        _ => columns.push(("sigma", need(args.sigma, "sigma")?)),
    }
    let mut table = ChainTable::new(1);
    table.insert("flag", Column::Flag(vec![flag])).expect("one row");
    for (name, v) in columns {
        table.insert(name, Column::Real(vec![v])).expect("one row");
    }
    Ok(table)
}

/// Computed columns of a one-row table. Plain output of a single value is the
/// bare number.
fn inline_output(table: &ChainTable, step: Compute, format: Format) -> Result<String, CliError> {
    let names: &[&str] = match step {
        Compute::Price => &["price"],
        Compute::Iv => &["iv", "status"],
        Compute::Greeks => &GREEK_COLUMNS,
    };
    if let Some(status) = table.status().map(|s| s[0]).filter(|s| !s.is_success()) {
        return Err(CliError::Data(format!("no implied volatility: {status}")));
    }
    if format == Format::Plain && step != Compute::Greeks {
        let v = table.real(names[0]).expect("computed column")[0];
        return Ok(format!("{}\n", format_plain(v)));
    }
    let mut out = ChainTable::new(1);
    for name in names {
        out.insert(name, table.get(name).expect("computed column").clone()).expect("one row");
    }
    Ok(format_output(&out, format))
}
