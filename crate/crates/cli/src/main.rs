use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use ehrelay::experiments::{emit, Coupling, Destination, ExperimentConfig, OutputFormat, PRESET_NAMES};
use ehrelay::optimize::{optimize_fraction_with, DEFAULT_FRAC_TOL};
use ehrelay::throughput::throughput_with;
use ehrelay::{
    figure_preset, EvalConfig, EvalMethod, McSettings, ProtocolFamily, SweepSpec, SweptParameter, SystemParams,
    TransmissionMode,
};

const OUTPUT_DIR_VAR: &str = "EHRELAY_OUTPUT_DIR";

/// Throughput of wireless-powered amplify-and-forward relaying.
#[derive(Parser)]
#[command(name = "ehrelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Throughput at a single operating point.
    Eval(EvalArgs),
    /// Best time-switching or power-splitting fraction.
    Optimize(OptimizeArgs),
    /// Sweep one parameter, from flags or a JSON config file.
    Sweep(SweepArgs),
    /// Run one of the built-in figure sweeps.
    Figure(FigureArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
#[command(rename_all = "snake_case")]
struct ParamArgs {
    #[arg(long)]
    source_power: Option<f64>,
    #[arg(long)]
    harvesting_efficiency: Option<f64>,
    #[arg(long)]
    dist_source_relay: Option<f64>,
    #[arg(long)]
    dist_relay_dest: Option<f64>,
    #[arg(long)]
    path_loss_exponent: Option<f64>,
    #[arg(long)]
    antenna_noise_var: Option<f64>,
    #[arg(long)]
    conversion_noise_var: Option<f64>,
    #[arg(long)]
    fading_mean_sr: Option<f64>,
    #[arg(long)]
    fading_mean_rd: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    block_time: Option<f64>,
}

impl ParamArgs {
    fn apply(&self, mut p: SystemParams) -> SystemParams {
        let fields = [
            (self.source_power, &mut p.source_power),
            (self.harvesting_efficiency, &mut p.harvesting_efficiency),
            (self.dist_source_relay, &mut p.dist_source_relay),
            (self.dist_relay_dest, &mut p.dist_relay_dest),
            (self.path_loss_exponent, &mut p.path_loss_exponent),
            (self.antenna_noise_var, &mut p.antenna_noise_var),
            (self.conversion_noise_var, &mut p.conversion_noise_var),
            (self.fading_mean_sr, &mut p.fading_mean_sr),
            (self.fading_mean_rd, &mut p.fading_mean_rd),
            (self.rate, &mut p.rate),
            (self.block_time, &mut p.block_time),
        ];
        for (flag, field) in fields {
            if let Some(v) = flag {
                *field = v;
            }
        }
        p
    }
}

#[derive(Args)]
#[command(rename_all = "snake_case")]
struct McArgs {
    #[arg(long)]
    num_realizations: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    antithetic: bool,
}

impl McArgs {
    fn apply(&self, mut mc: McSettings) -> McSettings {
        if let Some(n) = self.num_realizations {
            mc.num_realizations = n;
        }
        if let Some(s) = self.master_seed {
            mc.master_seed = s;
        }
        mc.antithetic |= self.antithetic;
        mc
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file, or `-` for stdout. Defaults to a file under
    /// $EHRELAY_OUTPUT_DIR when that is set, stdout otherwise.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn destination(&self, stem: &str) -> Destination {
        match &self.output {
            Some(p) if p == Path::new("-") => Destination::Stdout,
            Some(p) => Destination::File(p.clone()),
            None => match std::env::var_os(OUTPUT_DIR_VAR) {
                Some(dir) if !dir.is_empty() => {
                    let ext = match self.format {
                        Format::Csv => "csv",
                        Format::Json => "json",
                    };
                    Destination::File(PathBuf::from(dir).join(format!("{stem}.{ext}")))
                }
                _ => Destination::Stdout,
            },
        }
    }
}

#[derive(Args)]
#[command(rename_all = "snake_case", allow_negative_numbers = true)]
struct EvalArgs {
    #[arg(long, value_parser = label::<ProtocolFamily>)]
    protocol: ProtocolFamily,
    /// α for TSR, ρ for PSR. Ignored by Ideal.
    #[arg(long, default_value_t = 0.5)]
    fraction: f64,
    #[arg(long, value_parser = label::<TransmissionMode>, default_value = "delay_limited")]
    mode: TransmissionMode,
    #[arg(long, value_parser = label::<EvalMethod>, default_value = "exact")]
    method: EvalMethod,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
#[command(rename_all = "snake_case", allow_negative_numbers = true)]
struct OptimizeArgs {
    #[arg(long, value_parser = label::<ProtocolFamily>)]
    protocol: ProtocolFamily,
    #[arg(long, value_parser = label::<TransmissionMode>, default_value = "delay_limited")]
    mode: TransmissionMode,
    #[arg(long, value_parser = label::<EvalMethod>, default_value = "exact")]
    method: EvalMethod,
    #[arg(long, default_value_t = DEFAULT_FRAC_TOL)]
    frac_tol: f64,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
#[command(rename_all = "snake_case", allow_negative_numbers = true)]
struct SweepArgs {
    /// JSON file with any link, sweep and Monte-Carlo fields. Flags given
    /// alongside it take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = label::<SweptParameter>)]
    swept_parameter: Option<SweptParameter>,
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_parser = label::<ProtocolFamily>)]
    protocols: Option<Vec<ProtocolFamily>>,
    #[arg(long, value_delimiter = ',', value_parser = label::<TransmissionMode>)]
    modes: Option<Vec<TransmissionMode>>,
    #[arg(long, value_delimiter = ',', value_parser = label::<EvalMethod>)]
    methods: Option<Vec<EvalMethod>>,
    #[arg(long)]
    optimize_fraction: bool,
    /// Hold d₁ + d₂ at this value while sweeping dist_source_relay.
    #[arg(long)]
    total_distance: Option<f64>,
    #[arg(long)]
    base_fraction: Option<f64>,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct FigureArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    name: String,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    out: OutputArgs,
}

// Accepts the serialized label of any core enum, with `-` standing in for `_`.
fn label<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct EvalRecord {
    protocol: ProtocolFamily,
    fraction: Option<f64>,
    mode: TransmissionMode,
    method: EvalMethod,
    p_out: Option<f64>,
    capacity: Option<f64>,
    throughput: f64,
    stderr: Option<f64>,
    note: Option<String>,
}

#[derive(Serialize)]
struct OptimizeRecord {
    protocol: ProtocolFamily,
    mode: TransmissionMode,
    method: EvalMethod,
    best_fraction: f64,
    best_throughput: f64,
    evaluations: usize,
    bracket_width: f64,
    flat: bool,
}

fn write_record<T: Serialize>(record: &T, out: &OutputArgs, stem: &str) -> Result<(), String> {
    let mut buf = Vec::new();
    match out.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.serialize(record).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, record).map_err(|e| e.to_string())?;
            buf.push(b'\n');
        }
    }
    match out.destination(stem) {
        Destination::Stdout => std::io::stdout().write_all(&buf).map_err(|e| format!("<stdout>: {e}")),
        Destination::File(path) => std::fs::write(&path, &buf).map_err(|e| format!("{}: {e}", path.display())),
    }
}

fn config(mc: &McArgs) -> EvalConfig {
    EvalConfig {
        monte_carlo: mc.apply(McSettings::default()),
        ..Default::default()
    }
}

fn eval(args: &EvalArgs) -> Result<u8, String> {
    let params = args.params.apply(SystemParams::default());
    let protocol = match args.protocol {
        ProtocolFamily::Ideal => ehrelay::Protocol::Ideal,
        family => family.with_fraction(args.fraction).map_err(|e| e.to_string())?,
    };
    let r =
        throughput_with(&params, &protocol, args.mode, args.method, &config(&args.mc)).map_err(|e| e.to_string())?;
    let record = EvalRecord {
        protocol: args.protocol,
        fraction: protocol.fraction(),
        mode: args.mode,
        method: args.method,
        p_out: r.intermediate.outage(),
        capacity: r.intermediate.capacity(),
        throughput: r.throughput,
        stderr: r.std_error,
        note: r.note,
    };
    write_record(&record, &args.out, "eval")?;
    Ok(0)
}

fn optimize(args: &OptimizeArgs) -> Result<u8, String> {
    let params = args.params.apply(SystemParams::default());
    let r = optimize_fraction_with(
        &params,
        args.protocol,
        args.mode,
        args.method,
        args.frac_tol,
        &config(&args.mc),
    )
    .map_err(|e| e.to_string())?;
    let record = OptimizeRecord {
        protocol: args.protocol,
        mode: args.mode,
        method: args.method,
        best_fraction: r.best_fraction,
        best_throughput: r.best_throughput,
        evaluations: r.evaluations,
        bracket_width: r.bracket_width,
        flat: r.flat,
    };
    write_record(&record, &args.out, "optimize")?;
    Ok(0)
}

fn run(spec: &SweepSpec, params: &SystemParams, mc: &McSettings, out: &OutputArgs, stem: &str) -> Result<u8, String> {
    let result = ehrelay::run_sweep(spec, params, mc).map_err(|e| e.to_string())?;
    emit(&result, out.format.into(), &out.destination(stem)).map_err(|e| e.to_string())?;
    let failed = result.failed_cells();
    if failed > 0 {
        eprintln!("{failed} of {} cells failed", result.rows.len());
    }
    Ok(failed.min(255) as u8)
}

fn sweep(args: &SweepArgs) -> Result<u8, String> {
    let cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path).map_err(|e| e.to_string())?,
        None => ExperimentConfig::default(),
    };
    let mut spec = cfg.spec;
    if let Some(p) = args.swept_parameter {
        spec.swept_parameter = p;
    }
    if let Some(v) = &args.values {
        spec.values = v.clone();
    }
    if let Some(v) = &args.protocols {
        spec.protocols = v.clone();
    }
    if let Some(v) = &args.modes {
        spec.modes = v.clone();
    }
    if let Some(v) = &args.methods {
        spec.methods = v.clone();
    }
    spec.optimize_fraction |= args.optimize_fraction;
    if let Some(total) = args.total_distance {
        spec.coupling = Some(Coupling::FixedTotalDistance { total });
    }
    if let Some(f) = args.base_fraction {
        spec.base_fraction = f;
    }
    let params = args.params.apply(cfg.params);
    let mc = args.mc.apply(cfg.monte_carlo);
    run(&spec, &params, &mc, &args.out, "sweep")
}

fn figure(args: &FigureArgs) -> Result<u8, String> {
    let spec = figure_preset(&args.name).map_err(|e| e.to_string())?;
    let params = args.params.apply(SystemParams::default());
    let mc = args.mc.apply(McSettings::default());
    run(&spec, &params, &mc, &args.out, &args.name)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Optimize(a) => optimize(a),
        Command::Sweep(a) => sweep(a),
        Command::Figure(a) => figure(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
