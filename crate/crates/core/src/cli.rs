//! Command-line front end shared by the `celu` binary and the tests.
//!
//! Exit codes: `0` success, `1` a check failed, `2` usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::activation::{parse_alpha_list, Activation, ShapeParam};
use crate::batch;
use crate::error::{Error, Result};
use crate::gradcheck;
use crate::plot::{self, CurveGrid};
use crate::train::{self, MlpModel, TrainConfig, TrainTrace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "celu", version, about = "ELU / CELU activation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample activation and derivative curves to CSV or SVG.
    Plot(PlotArgs),
    /// Compare analytic CELU derivatives against central differences.
    Gradcheck(GradcheckArgs),
    /// Measure the derivative jump at x = 0 for ELU and CELU.
    Discontinuity(DiscontinuityArgs),
    /// Train the toy sin(2x) regression network.
    Train(TrainArgs),
    /// Time the batch kernels.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    Elu,
    Celu,
}

impl From<CurveKind> for Activation {
    fn from(k: CurveKind) -> Self {
        match k {
            CurveKind::Elu => Activation::Elu,
            CurveKind::Celu => Activation::Celu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotFormat {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum, default_value = "celu")]
    pub activation: CurveKind,
    /// Comma separated shape parameters.
    #[arg(long, default_value = "0.25,0.5,1,2,4")]
    pub alphas: String,
    #[arg(long, default_value_t = plot::DEFAULT_X_RANGE.0, allow_negative_numbers = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = plot::DEFAULT_X_RANGE.1, allow_negative_numbers = true)]
    pub xmax: f64,
    #[arg(long, default_value_t = plot::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: PlotFormat,
    /// Output file, `-` for standard output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DiscontinuityArgs {
    #[arg(long, default_value = "0.25,0.5,1,2,4")]
    pub alphas: String,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_parser = parse_activation, default_value = "celu")]
    pub activation: Activation,
    #[arg(long, default_value_t = 1.0)]
    pub alpha0: f64,
    /// Whether the per-layer alpha is learned.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub trainable: bool,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 3)]
    pub seed: u64,
    /// Comma separated layer widths.
    #[arg(long, default_value = "1,16,16,1")]
    pub layers: String,
    /// Optional per-step trace CSV.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Kernels to time, separated by `,` or `;`.
    #[arg(long, default_value = "elu,celu,relu")]
    pub kinds: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1 << 20)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = batch::BENCH_SEED)]
    pub seed: u64,
}

fn parse_activation(s: &str) -> std::result::Result<Activation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs an already parsed command. Errors are usage errors.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Plot(args) => cmd_plot(args, out),
        Command::Gradcheck(args) => cmd_gradcheck(args, out),
        Command::Discontinuity(args) => cmd_discontinuity(args, out),
        Command::Train(args) => cmd_train(args, out),
        Command::Bench(args) => cmd_bench(args, out),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> Result<i32> {
    let alphas = parse_alpha_list(&args.alphas)?;
    let grid = CurveGrid::new(
        args.activation.into(),
        &alphas,
        args.xmin,
        args.xmax,
        args.samples,
    )?;
    let write = |w: &mut dyn Write| match args.format {
        PlotFormat::Csv => grid.write_csv(w),
        PlotFormat::Svg => grid.write_svg(w),
    };
    if args.out.as_os_str() == "-" {
        write(out)?;
    } else {
        let mut file = create(&args.out)?;
        write(&mut file)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", args.out.display())))?;
        writeln!(
            out,
            "wrote {} rows ({} alphas x {} samples) to {}",
            grid.rows().len(),
            grid.alphas().len(),
            grid.xs().len(),
            args.out.display()
        )?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_gradcheck(args: &GradcheckArgs, out: &mut dyn Write) -> Result<i32> {
    let report = gradcheck::check_celu_gradients(args.samples, args.seed, args.tol)?;
    writeln!(out, "samples:             {}", report.samples)?;
    writeln!(out, "max rel err d/dx:    {:e}", report.max_rel_err_dx)?;
    writeln!(out, "max rel err d/dalpha: {:e}", report.max_rel_err_dalpha)?;
    writeln!(
        out,
        "worst input:         x = {}, alpha = {}",
        report.worst_input.0, report.worst_input.1
    )?;
    writeln!(out, "tolerance:           {:e}", report.tol)?;
    writeln!(out, "result:              {}", if report.passed { "PASS" } else { "FAIL" })?;
    Ok(if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_discontinuity(args: &DiscontinuityArgs, out: &mut dyn Write) -> Result<i32> {
    let alphas = parse_alpha_list(&args.alphas)?;
    writeln!(
        out,
        "{:>10} {:>14} {:>14} {:>14} {:>14}",
        "alpha", "elu_left", "elu_gap", "celu_left", "celu_gap"
    )?;
    for alpha in alphas {
        let elu = gradcheck::measure_elu_discontinuity(alpha);
        let celu = gradcheck::measure_celu_discontinuity(alpha);
        writeln!(
            out,
            "{:>10} {:>14.9} {:>14.3e} {:>14.9} {:>14.3e}",
            alpha.get(),
            elu.left_limit_estimate,
            elu.gap,
            celu.left_limit_estimate,
            celu.gap
        )?;
    }
    Ok(EXIT_OK)
}

fn parse_layers(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("bad layer width {p:?}")))
        })
        .collect()
}

/// Writes `step,loss,max_gain,alpha_0,...`, one row per step.
pub fn write_trace_csv(trace: &TrainTrace, mut w: impl Write) -> io::Result<()> {
    let n_alpha = trace.alphas.first().map_or(0, Vec::len);
    let alpha_cols: Vec<String> = (0..n_alpha).map(|i| format!(",alpha_{i}")).collect();
    writeln!(w, "step,loss,max_gain{}", alpha_cols.concat())?;
    for (step, ((loss, gain), alphas)) in trace
        .losses
        .iter()
        .zip(&trace.max_gains)
        .zip(&trace.alphas)
        .enumerate()
    {
        write!(w, "{step},{loss},{gain}")?;
        for a in alphas {
            write!(w, ",{a}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<i32> {
    let alpha0 = ShapeParam::new(args.alpha0)?;
    let config = TrainConfig::new(args.steps, args.lr, args.seed)?;
    let sizes = parse_layers(&args.layers)?;
    let mut model = MlpModel::init(&sizes, args.activation, alpha0, args.trainable, args.seed)?;
    let trace = train::train(&mut model, &config)?;

    if let Some(path) = &args.trace_out {
        let file = create(path)?;
        write_trace_csv(&trace, file)?;
    }

    let max_gain = trace.max_gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reduced = trace.final_loss <= 0.5 * trace.initial_loss();
    writeln!(out, "activation:   {}", args.activation)?;
    writeln!(out, "steps:        {}", config.steps())?;
    writeln!(out, "initial loss: {}", trace.initial_loss())?;
    writeln!(out, "final loss:   {}", trace.final_loss)?;
    writeln!(out, "loss ratio:   {:.4}", trace.loss_ratio())?;
    writeln!(out, "max gain:     {max_gain}")?;
    writeln!(out, "final alphas: {:?}", trace.final_alphas)?;
    writeln!(out, "result:       {}", if reduced { "PASS" } else { "FAIL" })?;
    Ok(if reduced { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let alpha = ShapeParam::new(args.alpha)?;
    let kinds = args
        .kinds
        .split([',', ';'])
        .filter(|k| !k.trim().is_empty())
        .map(str::parse::<Activation>)
        .collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() {
        return Err(Error::InvalidConfig("no kernels selected".into()));
    }
    writeln!(
        out,
        "{:<8} {:>10} {:>8} {:>12} {:>12} {:>12} {:>18}",
        "kind", "n", "repeats", "median_ns", "min_ns", "max_ns", "input_checksum"
    )?;
    for kind in kinds {
        let r = batch::throughput_bench_seeded(kind, alpha, args.n, args.repeats, args.seed)?;
        writeln!(
            out,
            "{:<8} {:>10} {:>8} {:>12.4} {:>12.4} {:>12.4} {:>18}",
            kind.name(),
            r.n,
            r.repeats,
            r.median_ns_per_elem,
            r.min_ns_per_elem,
            r.max_ns_per_elem,
            format!("{:016x}", r.input_checksum)
        )?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("celu").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn plot_to_stdout() {
        let (code, out, _) = run_capture(&[
            "plot", "--activation", "celu", "--alphas", "1", "--xmin", "-4", "--xmax", "4",
            "--samples", "3", "--out", "-",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "x,alpha,value,dx,dalpha\n-4,1,-0.9816843611112658,0.01831563888873418,-0.9084218055563291\n0,1,0,1,0\n4,1,4,1,0\n");
    }

    #[test]
    fn plot_usage_errors() {
        for bad in [
            vec!["plot", "--alphas", "0", "--out", "-"],
            vec!["plot", "--xmin", "1", "--xmax", "1", "--out", "-"],
            vec!["plot", "--samples", "1", "--out", "-"],
            vec!["plot", "--activation", "relu", "--out", "-"],
            vec!["plot", "--out", "/nonexistent-dir/x.csv"],
        ] {
            let (code, _, _) = run_capture(&bad);
            assert_eq!(code, EXIT_USAGE, "{bad:?}");
        }
    }

    #[test]
    fn gradcheck_exit_codes() {
        assert_eq!(run_capture(&["gradcheck"]).0, EXIT_OK);
        assert_eq!(run_capture(&["gradcheck", "--tol", "0"]).0, EXIT_CHECK_FAILED);
        assert_eq!(run_capture(&["gradcheck", "--samples", "0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["gradcheck", "--samples", "x"]).0, EXIT_USAGE);
    }

    #[test]
    fn discontinuity_table() {
        let (code, out, _) = run_capture(&["discontinuity", "--alphas", "3"]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split_whitespace().collect();
        let elu_gap: f64 = row[2].parse().unwrap();
        let celu_gap: f64 = row[4].parse().unwrap();
        assert!((elu_gap - 2.0).abs() < 1e-6);
        assert!(celu_gap <= 1e-7);
        assert_eq!(run_capture(&["discontinuity", "--alphas", "-1"]).0, EXIT_USAGE);
    }

    #[test]
    fn train_usage_errors() {
        assert_eq!(run_capture(&["train", "--steps", "0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["train", "--lr", "-1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["train", "--alpha0", "0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["train", "--layers", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn bench_rows_and_usage() {
        let (code, out, _) =
            run_capture(&["bench", "--kinds", "relu;celu", "--n", "4096", "--repeats", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 3);
        assert_eq!(run_capture(&["bench", "--repeats", "0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bench", "--kinds", "tanh"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("gradcheck"));
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
    }
}
