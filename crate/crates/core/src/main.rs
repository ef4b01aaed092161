use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use fmetric::bench::{bench, rows_to_csv};
use fmetric::cantor::CANTOR_TOL;
use fmetric::ffunc::{log_grid, WORKING_RANGE};
use fmetric::topology::check_cover;
use fmetric::{
    cantor_check, check_d3, check_f1, check_fip, check_tb_equivalence, equivalence_report,
    generate, greedy_net, load_instance_path, metrize, metrize_with_witnesses, shrink_generator,
    validate_family, AlphaMode, Builtin, Error, FMetricInstance, GeneratorConfig, Geometry,
    MetricKind, VerdictReport, WeightDistribution,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fmetric",
    version,
    about = "Finite F-metric spaces: axioms, induced metric, covers, nested families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the F-function on the working range and the chain inequality
    Verify { file: PathBuf },
    /// Emit the induced metric d
    Metrize {
        file: PathBuf,
        /// Include a minimizing chain for every pair (JSON only)
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Greedy eps-net of a set in D or d
    Cover {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "D")]
        metric: MetricKind,
        #[command(flatten)]
        set: SetArg,
    },
    /// Both directions of the total-boundedness equivalence at scale eps
    TbCheck {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        set: SetArg,
    },
    /// Cantor intersection check on a nested family
    Cantor {
        file: PathBuf,
        #[arg(long, conflicts_with = "generate")]
        family: Option<PathBuf>,
        #[arg(long, requires = "steps")]
        generate: bool,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = CANTOR_TOL)]
        tol: f64,
        /// Where to write the diameter traces as CSV (default: stderr)
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Finite intersection property of a family of sets
    Fip {
        file: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Full equivalence report for an instance
    Report {
        file: PathBuf,
        /// Print a human-readable table instead of JSON
        #[arg(long)]
        table: bool,
    },
    /// Generate a random instance
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long = "f", value_parser = parse_builtin)]
        f: Builtin,
        #[arg(long, conflicts_with = "calibrate")]
        alpha: Option<f64>,
        #[arg(long)]
        calibrate: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `uniform:LO,HI` or `euclidean:DIM[,SCALE]`
        #[arg(long, default_value = "uniform:0.1,10")]
        dist: String,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Time both metrization kernels
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "f", value_parser = parse_builtin, default_value = "ln")]
        f: Builtin,
    },
}

#[derive(Args)]
struct SetArg {
    /// Comma-separated point ids (default: every point)
    #[arg(long, value_delimiter = ',')]
    set: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Deserialize)]
struct FamilyFile {
    family: Vec<Vec<String>>,
}

fn parse_builtin(s: &str) -> Result<Builtin, String> {
    Builtin::from_name(s).map_err(|e| e.to_string())
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult = Result<u8, CliError>;

fn read_family(inst: &FMetricInstance, path: &Path) -> Result<Vec<Vec<usize>>, Error> {
    let file: FamilyFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.family.iter().map(|s| inst.indices_of(s)).collect()
}

fn resolve_set(inst: &FMetricInstance, set: &SetArg) -> Result<Vec<usize>, Error> {
    match &set.set {
        Some(ids) => inst.indices_of(ids),
        None => Ok((0..inst.size()).collect()),
    }
}

fn verdict_code(report: &VerdictReport) -> u8 {
    match report.status {
        fmetric::Status::Pass | fmetric::Status::HypothesisUnsatisfied => 0,
        fmetric::Status::Fail => EXIT_FAIL,
        fmetric::Status::Error => EXIT_NUMERIC,
    }
}

fn emit(report: &VerdictReport) -> u8 {
    println!("{}", report.to_json_pretty());
    verdict_code(report)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Verify { file } => {
            let inst = load_instance_path(&file)?;
            let mut report =
                VerdictReport::new("verify", "D is an F-metric controlled by (f, alpha)");
            let grid = log_grid(WORKING_RANGE.0, WORKING_RANGE.1, 1000);
            report.push_section(check_f1(inst.control().f(), &grid)?);
            report.push_section(check_d3(&inst)?);
            Ok(emit(&report))
        }
        Command::Metrize {
            file,
            witness,
            format,
        } => {
            let inst = load_instance_path(&file)?;
            match format {
                Format::Json => {
                    let m = if witness {
                        metrize_with_witnesses(&inst)
                    } else {
                        metrize(&inst)
                    };
                    let out = serde_json::to_string_pretty(&m.to_file()).map_err(Error::from)?;
                    println!("{out}");
                }
                Format::Csv => {
                    if witness {
                        return Err(CliError::Usage("--witness requires --format json".into()));
                    }
                    let m = metrize(&inst);
                    let mut w = csv::Writer::from_writer(std::io::stdout());
                    let mut header = vec!["id".to_owned()];
                    header.extend(inst.points().iter().cloned());
                    w.write_record(&header).map_err(|e| Error::Io(e.into()))?;
                    for (i, id) in inst.points().iter().enumerate() {
                        let mut rec = vec![id.clone()];
                        rec.extend(m.matrix().row(i).iter().map(f64::to_string));
                        w.write_record(&rec).map_err(|e| Error::Io(e.into()))?;
                    }
                    w.flush().map_err(Error::from)?;
                }
            }
            Ok(0)
        }
        Command::Cover {
            file,
            eps,
            metric,
            set,
        } => {
            let inst = load_instance_path(&file)?;
            let target = resolve_set(&inst, &set)?;
            let geo = Geometry::new(inst);
            let cover = greedy_net(&geo, &target, eps, metric)?;
            let report = check_cover(&geo, &cover)?;
            let out = json!({
                "cover": cover.to_json(geo.instance()),
                "verdict": report,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).map_err(Error::from)?
            );
            eprint!("{}", report.table());
            Ok(verdict_code(&report))
        }
        Command::TbCheck { file, eps, set } => {
            let inst = load_instance_path(&file)?;
            let target = resolve_set(&inst, &set)?;
            let geo = Geometry::new(inst);
            Ok(emit(&check_tb_equivalence(&geo, &target, eps)?))
        }
        Command::Cantor {
            file,
            family,
            generate,
            steps,
            seed,
            tol,
            trace_out,
        } => {
            let inst = load_instance_path(&file)?;
            let geo = Geometry::new(inst);
            let nf = match (family, generate) {
                (Some(path), false) => validate_family(&geo, &read_family(geo.instance(), &path)?)?,
                (None, true) => shrink_generator(&geo, seed, steps.unwrap_or(geo.size()))?,
                _ => {
                    return Err(CliError::Usage(
                        "cantor needs either --family FILE or --generate --steps N".into(),
                    ))
                }
            };
            let report = cantor_check(&geo, &nf, tol)?;
            let csv = nf.traces_csv();
            match trace_out {
                Some(path) => std::fs::write(path, csv).map_err(Error::from)?,
                None => eprint!("{csv}"),
            }
            Ok(emit(&report))
        }
        Command::Fip { file, family } => {
            let inst = load_instance_path(&file)?;
            let fam = read_family(&inst, &family)?;
            Ok(emit(&check_fip(&inst, &fam)?))
        }
        Command::Report { file, table } => {
            let inst = load_instance_path(&file)?;
            let report = equivalence_report(&inst)?;
            if table {
                print!("{}", report.table());
                Ok(verdict_code(&report))
            } else {
                Ok(emit(&report))
            }
        }
        Command::Gen {
            n,
            f,
            alpha,
            calibrate,
            seed,
            dist,
            output,
        } => {
            let alpha = match (alpha, calibrate) {
                (Some(a), false) => AlphaMode::Fixed(a),
                (None, true) => AlphaMode::Calibrated,
                _ => {
                    return Err(CliError::Usage(
                        "gen needs exactly one of --alpha A or --calibrate".into(),
                    ))
                }
            };
            let config = GeneratorConfig {
                n_points: n,
                weights: WeightDistribution::parse(&dist)?,
                f,
                alpha,
                seed,
            };
            let json = generate(&config)?.to_json();
            match output {
                Some(path) => std::fs::write(path, json + "\n").map_err(Error::from)?,
                None => println!("{json}"),
            }
            Ok(0)
        }
        Command::Bench {
            sizes,
            repeats,
            seed,
            f,
        } => {
            let config = GeneratorConfig::calibrated(0, f, seed);
            let rows = bench(&config, &sizes, repeats)?;
            print!("{}", rows_to_csv(&rows));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() {
                EXIT_NUMERIC
            } else {
                EXIT_USAGE
            })
        }
    }
}
