use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cubicsing::degeneration::{bundled_reference, compare_with_reference, hasse_diagram};
use cubicsing::multipoly::{parse_number, MultiPoly};
use cubicsing::numfield::{FieldDescriptor, FieldRef, NumberField};
use cubicsing::scenarios::{
    bundled_catalog, bundled_names, bundled_scenario, emit_report, load_scenario, run_scenario, ReportFormat, RunOptions, Scenario, ScenarioReport,
};
use cubicsing::singularities::{classify_ade, modp_singular_scan, ProjPoint};

#[derive(Parser)]
#[command(name = "cubicsing", version, about = "Singular cubic threefolds: singularities, automorphisms, class-group cohomology and defect")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Check that the field generator reduces modulo every scan prime.
    #[arg(long, global = true)]
    field_check: bool,
    /// Comma-separated primes replacing the scenario scan primes.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Jet order used when classifying singular points.
    #[arg(long, global = true, default_value_t = 12)]
    truncation: u32,
    /// Largest automorphism group the closure may build.
    #[arg(long, global = true, default_value_t = 5000)]
    cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario file (or a bundled scenario by name).
    VerifyScenario {
        scenario: String,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
    /// Classify the singular points of a scenario, or of a given cubic at a given point.
    Classify {
        scenario: Option<String>,
        #[arg(long)]
        cubic: Option<String>,
        /// Point as comma-separated coordinates, e.g. 1,0,0,0,0.
        #[arg(long)]
        point: Option<String>,
        /// Field: Q, cyclotomic:N, quadratic:D or a JSON descriptor.
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// H1 of the class-group lattices for every subgroup test of a scenario.
    Cohomology { scenario: String },
    /// Projection from each listed singular point and the resulting defect.
    Defect { scenario: String },
    /// List the singular points of a cubic over F_p.
    ScanModp {
        scenario: Option<String>,
        #[arg(long)]
        cubic: Option<String>,
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Degeneration diagram of the configurations in the bundled reference.
    DegenerationGraph {
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        /// Print the comparison with the reference diagram instead.
        #[arg(long)]
        compare: bool,
    },
    /// Run the whole bundled catalog and print the summary report.
    Report {
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn options(g: &Global) -> RunOptions {
    RunOptions { truncation: g.truncation, cap: g.cap, primes: g.primes.clone(), field_check: g.field_check }
}

fn load(name: &str) -> Result<Scenario> {
    let path = Path::new(name);
    if path.exists() {
        return load_scenario(path).with_context(|| format!("loading {name}"));
    }
    match bundled_scenario(name) {
        Some(s) => s.with_context(|| format!("loading bundled scenario {name}")),
        None => bail!("{name} is neither a file nor a bundled scenario (bundled: {})", bundled_names().join(", ")),
    }
}

fn parse_field(s: &str) -> Result<FieldRef> {
    let desc = if s.trim_start().starts_with('{') {
        serde_json::from_str::<FieldDescriptor>(s)?
    } else if s == "Q" || s == "rational" {
        FieldDescriptor::Rational
    } else if let Some(n) = s.strip_prefix("cyclotomic:") {
        FieldDescriptor::Cyclotomic { n: n.parse()? }
    } else if let Some(d) = s.strip_prefix("quadratic:") {
        FieldDescriptor::Quadratic { d: d.parse()? }
    } else {
        bail!("unknown field {s:?}; use Q, cyclotomic:N, quadratic:D or a JSON descriptor");
    };
    Ok(NumberField::from_descriptor(&desc)?)
}

fn report_format(f: Format) -> ReportFormat {
    match f {
        Format::Markdown => ReportFormat::Markdown,
        Format::Json => ReportFormat::Json,
    }
}

fn run(cli: Cli) -> Result<bool> {
    let opts = options(&cli.global);
    match cli.command {
        Command::VerifyScenario { scenario, format } => {
            let s = load(&scenario)?;
            let r = run_scenario(&s, &opts);
            print!("{}", emit_report(std::slice::from_ref(&r), report_format(format)));
            Ok(r.pass)
        }
        Command::Classify { scenario, cubic, point, field } => {
            if let Some(name) = scenario {
                let s = load(&name)?;
                let mut ok = true;
                let mut out = Vec::new();
                for p in &s.points {
                    let r = classify_ade(&s.cubic, &p.point, opts.truncation)?;
                    ok &= r.ade_type == p.ade_type;
                    out.push(serde_json::json!({"name": p.name, "declared": p.ade_type.to_string(), "computed": r.to_json()}));
                }
                println!("{}", serde_json::to_string_pretty(&out)?);
                return Ok(ok);
            }
            let (Some(cubic), Some(point)) = (cubic, point) else { bail!("give a scenario, or both --cubic and --point") };
            let field = parse_field(&field)?;
            let f = MultiPoly::parse(&field, 5, &cubic)?;
            let coords = point.split(',').map(|c| parse_number(&field, c.trim())).collect::<Result<Vec<_>, _>>()?;
            let p = ProjPoint::new(coords).context("zero point")?;
            let r = classify_ade(&f, &p, opts.truncation)?;
            println!("{}", serde_json::to_string_pretty(&r.to_json())?);
            Ok(true)
        }
        Command::Cohomology { scenario } => {
            let r = run_scenario(&load(&scenario)?, &opts);
            println!("{}", serde_json::to_string_pretty(&r.cohomology)?);
            print_notes(&r);
            Ok(r.cohomology.iter().all(|h| h.pass))
        }
        Command::Defect { scenario } => {
            let r = run_scenario(&load(&scenario)?, &opts);
            println!("{}", serde_json::to_string_pretty(&r.defects)?);
            print_notes(&r);
            Ok(r.defects.iter().all(|d| d.pass))
        }
        Command::ScanModp { scenario, cubic, field } => {
            let (f, primes) = match (scenario, cubic) {
                (Some(name), None) => {
                    let s = load(&name)?;
                    let primes = opts.primes.clone().unwrap_or(s.scan_primes.clone());
                    (s.cubic, primes)
                }
                (None, Some(c)) => {
                    let field = parse_field(&field)?;
                    let Some(primes) = opts.primes.clone() else { bail!("--primes is required with --cubic") };
                    (MultiPoly::parse(&field, 5, &c)?, primes)
                }
                _ => bail!("give either a scenario or --cubic"),
            };
            let mut out = serde_json::Map::new();
            for p in primes {
                out.insert(p.to_string(), serde_json::to_value(modp_singular_scan(&f, p)?)?);
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::DegenerationGraph { format, compare } => {
            let reference = bundled_reference();
            let diagram = hasse_diagram(&reference.nodes);
            if compare {
                let c = compare_with_reference(&diagram, &reference);
                println!("{}", serde_json::to_string_pretty(&c)?);
                return Ok(c.acceptable());
            }
            match format {
                GraphFormat::Dot => print!("{}", diagram.to_dot()),
                GraphFormat::Json => println!("{}", serde_json::to_string_pretty(&diagram.to_json())?),
            }
            Ok(true)
        }
        Command::Report { format, out } => {
            let catalog = bundled_catalog()?;
            let reports: Vec<ScenarioReport> = catalog.iter().map(|s| run_scenario(s, &opts)).collect();
            let text = emit_report(&reports, report_format(format));
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::List => {
            for n in bundled_names() {
                println!("{n}");
            }
            Ok(true)
        }
    }
}

fn print_notes(r: &ScenarioReport) {
    for c in &r.caveats {
        eprintln!("note: {c}");
    }
}
