//! Command line front end.
//!
//! Exit codes: 0 on success, 2 for analysis errors, 64 for usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{self, DatasetDescriptor, OutputFormat, BUILTIN_NAMES};
use crate::error::{Error, Result};
use crate::plot::{self, Scaling};
use crate::recode::{self, RatingMatrix, RecodedMatrix};
use crate::variants::{self, Variant, VariantConfig, VariantResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "dsrating",
    version,
    about = "Dual scaling and correspondence analysis of rating data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one analysis and write its coordinates.
    Analyze(AnalyzeArgs),
    /// Write an intermediate re-coded table as CSV.
    Recode(RecodeArgs),
    /// Run one analysis and draw it as SVG.
    Plot(PlotArgs),
    /// List the bundled datasets.
    Datasets,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV file, or builtin:<name>.
    #[arg(long)]
    data: String,
    /// Largest value of the 1..q rating scale.
    #[arg(long)]
    scale_max: Option<u32>,
    /// The CSV starts with a row of object names.
    #[arg(long)]
    header: bool,
    /// Header name of the column holding respondent labels.
    #[arg(long)]
    id_column: Option<String>,
}

impl DataArgs {
    fn load(&self) -> Result<RatingMatrix> {
        let mut desc = DatasetDescriptor::parse(&self.data);
        desc.scale_max = self.scale_max;
        desc.has_header = self.header;
        desc.id_column = self.id_column.clone();
        desc.load()
    }
}

#[derive(Debug, Args)]
struct AnalysisArgs {
    /// ds1, ds1e, ds2, ds3 or car.
    #[arg(long)]
    variant: Variant,
    #[arg(long, default_value_t = crate::engine::DEFAULT_DIMS)]
    dims: usize,
    /// Remove respondents or objects whose margins vanish instead of failing.
    #[arg(long)]
    drop_degenerate: bool,
}

impl AnalysisArgs {
    fn config(&self) -> VariantConfig {
        VariantConfig::new(self.variant)
            .with_dims(self.dims)
            .with_drop_degenerate(self.drop_degenerate)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SvgKind {
    Objects,
    Individuals,
    Biplot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScalingArg {
    Standard,
    Principal,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    analysis: AnalysisArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "biplot")]
    svg_kind: SvgKind,
    /// Coordinates for object and individual maps; defaults follow the variant.
    #[arg(long, value_enum)]
    scaling: Option<ScalingArg>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    analysis: AnalysisArgs,
    #[arg(long, value_enum, default_value = "biplot")]
    svg_kind: SvgKind,
    #[arg(long, value_enum)]
    scaling: Option<ScalingArg>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RecodeKind {
    /// T = R - 1
    T,
    /// S = (q - 1) - T
    S,
    /// [T | S]
    Fc,
    /// T* stacked over S*
    Fr,
    /// T stacked over S
    FrCounts,
    /// T*
    Rank,
    /// S*
    RankRev,
    /// E = T* - S*
    Dominance,
    /// successive category ranks
    Scd,
}

#[derive(Debug, Args)]
struct RecodeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    kind: RecodeKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, stdout),
        Command::Recode(a) => cmd_recode(&a, stdout),
        Command::Plot(a) => cmd_plot(&a),
        Command::Datasets => cmd_datasets(stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", e.name());
            EXIT_DOMAIN
        }
    }
}

fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    let ratings = a.data.load()?;
    let res = variants::run(&ratings, &a.analysis.config())?;
    if let Some(path) = &a.out {
        let format = match a.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        };
        data::write_atomic(path, &data::serialize_result(&res, format))?;
    }
    if let Some(path) = &a.svg {
        plot::emit_svg(&plot_spec(&res, a.svg_kind, a.scaling)?, path)?;
    }
    writeln!(stdout, "{}", summary(&res)).map_err(|e| Error::io("<stdout>", e))
}

/// One-line human summary with the cumulative explained variance in percent.
pub fn summary(res: &VariantResult) -> String {
    let sol = &res.solution;
    let cum = sol.cumulative_explained[sol.k - 1];
    let mut line = format!(
        "variant={} k={} explained={}%",
        res.config.variant,
        sol.k,
        (cum * 100.0).round()
    );
    if !res.dropped.is_empty() {
        line.push_str(&format!(" dropped={}", res.dropped.join(";")));
    }
    line
}

fn plot_spec(res: &VariantResult, kind: SvgKind, scaling: Option<ScalingArg>) -> Result<plot::BiplotSpec> {
    let car = res.config.variant == Variant::Car;
    let chosen = |default: Scaling| match scaling {
        Some(ScalingArg::Standard) => Scaling::Standard,
        Some(ScalingArg::Principal) => Scaling::Principal,
        None => default,
    };
    match kind {
        SvgKind::Objects => {
            let default = if car {
                Scaling::Principal
            } else {
                Scaling::Standard
            };
            plot::build_object_map(res, chosen(default))
        }
        SvgKind::Individuals => {
            let default = if car {
                Scaling::Standard
            } else {
                Scaling::Principal
            };
            plot::build_individual_map(res, chosen(default))
        }
        SvgKind::Biplot => plot::build_biplot(res),
    }
}

fn cmd_plot(a: &PlotArgs) -> Result<()> {
    let ratings = a.data.load()?;
    let res = variants::run(&ratings, &a.analysis.config())?;
    plot::emit_svg(&plot_spec(&res, a.svg_kind, a.scaling)?, &a.out)
}

fn recoded(r: &RatingMatrix, kind: RecodeKind) -> Result<RecodedMatrix> {
    let t = recode::shift_counts(r);
    Ok(match kind {
        RecodeKind::T => t,
        RecodeKind::S => recode::reverse_counts(&t)?,
        RecodeKind::Fc => recode::double_columns(&t, &recode::reverse_counts(&t)?)?,
        RecodeKind::FrCounts => recode::double_rows(&t, &recode::reverse_counts(&t)?)?,
        RecodeKind::Fr => {
            let (ts, ss) = recode::rank_rows(r);
            recode::double_rows(&ts, &ss)?
        }
        RecodeKind::Rank => recode::rank_rows(r).0,
        RecodeKind::RankRev => recode::rank_rows(r).1,
        RecodeKind::Dominance => {
            let (ts, ss) = recode::rank_rows(r);
            recode::dominance(&ts, &ss)?
        }
        RecodeKind::Scd => recode::successive_categories(r),
    })
}

fn cmd_recode(a: &RecodeArgs, stdout: &mut dyn Write) -> Result<()> {
    let ratings = a.data.load()?;
    let csv = data::recoded_to_csv(&recoded(&ratings, a.kind)?);
    match &a.out {
        Some(path) => data::write_atomic(path, csv.as_bytes()),
        None => stdout
            .write_all(csv.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn cmd_datasets(stdout: &mut dyn Write) -> Result<()> {
    for name in BUILTIN_NAMES {
        let r = data::builtin(name)?;
        writeln!(stdout, "{name} {}x{} q={}", r.n(), r.p(), r.q()).map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}
