use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use vcnet::Schema;
use vcnet_cli::{
    cmd_analyze, cmd_hist, cmd_simulate, load_schema, parse_pair, HistConfig, RunConfig, Statistic,
    TableFormat,
};

/// Direction-of-influence networks from panel time series.
#[derive(Parser)]
#[command(name = "vcnet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every variable pair and write tables and networks.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "out")]
        outdir: PathBuf,
        /// Volatility cutoff in units of standard deviation.
        #[arg(long, default_value_t = vcnet::DEFAULT_H)]
        h: f64,
        /// Significance level for the direction test.
        #[arg(long, default_value_t = vcnet::DEFAULT_ALPHA)]
        alpha: f64,
        /// TOML column mapping.
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Table formats to write.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [TableFormat::Tsv, TableFormat::Text])]
        format: Vec<TableFormat>,
    },
    /// Generate a synthetic panel from a TOML spec.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Histogram of a per-entity statistic for one ordered pair.
    Hist {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
        /// Ordered pair of variable codes, e.g. `i,m`.
        #[arg(long)]
        pair: String,
        #[arg(long, value_enum, default_value_t = Statistic::DeltaF)]
        statistic: Statistic,
        /// Number of bins over [-1, 1].
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[arg(long, default_value_t = vcnet::DEFAULT_H)]
        h: f64,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
}

fn schema(path: Option<PathBuf>) -> Result<Schema> {
    path.map_or_else(|| Ok(Schema::default()), |p| load_schema(&p))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            input,
            outdir,
            h,
            alpha,
            schema: schema_path,
            format,
        } => {
            let config = RunConfig {
                input,
                outdir,
                h,
                alpha,
                schema: schema(schema_path)?,
                formats: format,
            };
            println!("{}", cmd_analyze(&config)?);
        }
        Command::Simulate { spec, output, seed } => {
            println!("{}", cmd_simulate(&spec, &output, seed)?);
        }
        Command::Hist {
            input,
            outdir,
            pair,
            statistic,
            bins,
            h,
            schema: schema_path,
        } => {
            let config = HistConfig {
                input,
                outdir,
                schema: schema(schema_path)?,
                h,
                pair: parse_pair(&pair)?,
                statistic,
                bins,
            };
            let (path, hist) = cmd_hist(&config)?;
            println!(
                "wrote {} ({} values, {} out of range)",
                path.display(),
                hist.n,
                hist.out_of_range
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
