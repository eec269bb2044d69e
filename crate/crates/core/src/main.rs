use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use alcomb::cli::{
    parse_lambda, parse_word_arg, run, CliCommand, DatumSpec, JobConfig, OutputFormat,
};
use alcomb::rootdata::Isogeny;
use alcomb::Error;

/// Exact alcove combinatorics for affine Weyl groups: linkage blocks,
/// fixed-point components, Kazhdan-Lusztig data, tilting and simple
/// characters.
#[derive(Parser)]
#[command(name = "alcomb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Root system type, e.g. A1, B2, G2, A1xA1.
    #[arg(long = "type")]
    type_str: Option<String>,
    /// Isogeny for --type: adjoint or simply_connected.
    #[arg(long, default_value = "adjoint")]
    isogeny: String,
    /// JSON root datum file (alternative to --type).
    #[arg(long)]
    datum_file: Option<PathBuf>,
    /// The characteristic parameter l >= 2.
    #[arg(long)]
    ell: Option<i64>,
    /// Output format: json or text.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct Bounds {
    /// Length cap for enumerations (default 8; for `simple`, giving this
    /// switches the region from Y to the length ideal in fW).
    #[arg(long)]
    max_length: Option<u32>,
    /// Coordinate radius for weight listings.
    #[arg(long = "box")]
    box_radius: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Block decomposition: representatives, I_lambda, stabilizer orders.
    Blocks {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Census of mu_l-fixed-point components with parahoric kinds.
    Components {
        #[command(flatten)]
        common: Common,
    },
    /// The blocks <-> components dictionary (shift by rho-check).
    Dict {
        #[command(flatten)]
        common: Common,
    },
    /// Antispherical (l-)Kazhdan-Lusztig polynomials on an fW ball.
    Kl {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bounds: Bounds,
        /// l-KL data file; defaults to the kl_fallback mode.
        #[arg(long)]
        pcan: Option<PathBuf>,
    },
    /// Validate an l-KL data file and emit its canonical serialization.
    PklImport {
        #[command(flatten)]
        common: Common,
        /// l-KL data file to import.
        #[arg(long)]
        pcan: PathBuf,
    },
    /// Tilting character [T(w •_l lambda)] in the nabla basis.
    Tilt {
        #[command(flatten)]
        common: Common,
        /// Coweight selecting the block (defaults to 0).
        #[arg(long)]
        lambda: Option<String>,
        /// Reduced word for w: generator indices, left-to-right product.
        #[arg(long)]
        w: String,
        /// l-KL data file; defaults to the kl_fallback mode.
        #[arg(long)]
        pcan: Option<PathBuf>,
    },
    /// Simple character [L(w •_l 0)] in the nabla basis on the Y region.
    Simple {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bounds: Bounds,
        /// Reduced word for w.
        #[arg(long)]
        w: String,
        /// Hat-map file (adds the nabla-in-simples expansion).
        #[arg(long)]
        hat: Option<PathBuf>,
        /// l-KL data file; defaults to the kl_fallback mode.
        #[arg(long)]
        pcan: Option<PathBuf>,
    },
    /// Weyl character and dimension of N(lambda) for the dual group.
    Weyl {
        #[command(flatten)]
        common: Common,
        /// Dominant coweight, comma- or space-separated coordinates.
        #[arg(long)]
        lambda: String,
    },
    /// Enumerate the finite Weyl group (reduced words).
    Wgroup {
        #[command(flatten)]
        common: Common,
    },
}

fn build_config(cli: Cli) -> Result<JobConfig, Error> {
    let (command, common, bounds, pcan, hat, lambda, w) = match cli.command {
        Command::Blocks { common, bounds } => {
            (CliCommand::Blocks, common, Some(bounds), None, None, None, None)
        }
        Command::Components { common } => {
            (CliCommand::Components, common, None, None, None, None, None)
        }
        Command::Dict { common } => (CliCommand::Dict, common, None, None, None, None, None),
        Command::Kl { common, bounds, pcan } => {
            (CliCommand::Kl, common, Some(bounds), pcan, None, None, None)
        }
        Command::PklImport { common, pcan } => {
            (CliCommand::PklImport, common, None, Some(pcan), None, None, None)
        }
        Command::Tilt { common, lambda, w, pcan } => {
            (CliCommand::Tilt, common, None, pcan, None, lambda, Some(w))
        }
        Command::Simple { common, bounds, w, hat, pcan } => {
            (CliCommand::Simple, common, Some(bounds), pcan, hat, None, Some(w))
        }
        Command::Weyl { common, lambda } => {
            (CliCommand::Weyl, common, None, None, None, Some(lambda), None)
        }
        Command::Wgroup { common } => (CliCommand::Wgroup, common, None, None, None, None, None),
    };

    let datum = match (&common.type_str, &common.datum_file) {
        (Some(t), None) => {
            let isogeny = match common.isogeny.as_str() {
                "adjoint" => Isogeny::Adjoint,
                "simply_connected" | "sc" => Isogeny::SimplyConnected,
                other => {
                    return Err(Error::Validation(format!(
                        "unknown isogeny '{other}' (expected adjoint or simply_connected)"
                    )))
                }
            };
            DatumSpec::Named { type_str: t.clone(), isogeny }
        }
        (None, Some(path)) => DatumSpec::File(path.clone()),
        (Some(_), Some(_)) => {
            return Err(Error::Validation("--type and --datum-file are mutually exclusive".into()))
        }
        (None, None) => {
            return Err(Error::Validation("a root datum is required: --type or --datum-file".into()))
        }
    };

    let format = match common.format.as_str() {
        "json" => OutputFormat::Json,
        "text" => OutputFormat::Text,
        other => return Err(Error::Validation(format!("unknown format '{other}'"))),
    };

    let mut config = JobConfig::new(datum, command);
    config.ell = common.ell;
    config.format = format;
    if let Some(b) = bounds {
        config.max_length = b.max_length;
        config.box_radius = b.box_radius;
    }
    config.pcan_path = pcan;
    config.hat_path = hat;
    config.lambda = lambda.as_deref().map(parse_lambda).transpose()?;
    config.w_word = w.as_deref().map(parse_word_arg).transpose()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(cli).and_then(|config| run(&config));
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (kind, code) = match &err {
                Error::Validation(_) => ("validation", 2),
                Error::DataFile(_) => ("data_file", 3),
                Error::Invariant(_) => ("invariant", 2),
            };
            eprintln!("{}", serde_json::json!({"error": err.to_string(), "kind": kind}));
            ExitCode::from(code)
        }
    }
}
