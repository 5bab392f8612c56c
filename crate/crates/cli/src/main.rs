mod commands;
mod error;
mod svg;
mod vector;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{ColorMode, Demo, Figure, Report};
use error::CliError;
use ks_core::Tolerance;
use vector::parse_ray;

#[derive(Parser)]
#[command(name = "ks", version, about = "Great-circle reachability and Kochen-Specker derivations on the unit sphere")]
struct Cli {
    /// Geometric tolerance, in (0, 1e-3).
    #[arg(long, global = true, default_value_t = 1e-9)]
    eps: f64,
    /// Print JSON instead of the plain listing.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a certificate that --to is reachable from --from.
    Reach {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// List (and optionally draw) the outward shell from a point.
    Shell {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run one of the two contradiction derivations.
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
        /// Directory for trace.json, system.json and summary.json.
        #[arg(short = 'o', long, global = true)]
        out: Option<PathBuf>,
    },
    /// Count or search colourings of a triad system document.
    Color {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ColorMode::Count)]
        mode: ColorMode,
    },
    /// Check a certificate (or triad system) document.
    Verify { file: PathBuf },
    /// Draw one of the constructions as SVG.
    Render {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long, allow_hyphen_values = true, default_value = "0,sqrt(1/2),sqrt(1/2)")]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Reach/verify round trip on seeded random pairs.
    Selfcheck {
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the exit-code table.
    Codes,
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Two poles at angular distance below π/4.
    First {
        #[arg(long, allow_hyphen_values = true, default_value = "0,sin(0.3),cos(0.3)")]
        pole: String,
    },
    /// The constant tripod against a zero near the pole.
    Second,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let tol = Tolerance::new(cli.eps)?;
    match &cli.command {
        Command::Reach { from, to, out } => {
            commands::cmd_reach(&parse_ray(from, tol)?, &parse_ray(to, tol)?, out.as_deref(), tol)
        }
        Command::Shell { point, n, svg } => commands::cmd_shell(&parse_ray(point, tol)?, *n, svg.as_deref(), tol),
        Command::Demo { which, out } => {
            let which = match which {
                DemoCommand::First { pole } => Demo::First(parse_ray(pole, tol)?),
                DemoCommand::Second => Demo::Second,
            };
            commands::cmd_demo(&which, out.as_deref(), tol)
        }
        Command::Color { file, mode } => commands::cmd_color(file, *mode),
        Command::Verify { file } => commands::cmd_verify(file, tol),
        Command::Render { figure, q, p, n, svg } => {
            let p = p.as_deref().map(|p| parse_ray(p, tol)).transpose()?;
            commands::cmd_render(*figure, &parse_ray(q, tol)?, p.as_ref(), *n, svg, tol)
        }
        Command::Selfcheck { pairs, seed } => commands::cmd_selfcheck(*pairs, *seed, tol),
        Command::Codes => Ok(commands::cmd_codes()),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn human(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_flat(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    human(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                if is_flat(x) {
                    out.push_str(&format!("{pad}{i}: {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}{i}:\n"));
                    human(x, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = if cli.json {
                let mut s = serde_json::to_string(&report.payload).expect("payload serializes");
                s.push('\n');
                s
            } else {
                let mut s = String::new();
                human(&report.payload, 0, &mut s);
                s
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            match report.failure {
                None => ExitCode::SUCCESS,
                Some(why) => {
                    eprintln!("check failed: {why}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            let code = e.exit_code();
            if cli.json {
                let doc = serde_json::json!({"error": e.code_name(), "code": code, "message": e.to_string()});
                let _ = writeln!(std::io::stdout(), "{doc}");
            }
            eprintln!("error[{}]: {e}", e.code_name());
            ExitCode::from(code as u8)
        }
    }
}
