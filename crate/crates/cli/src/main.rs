use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rokhlin_core::rep_ring::RModule;
use rokhlin_core::scenario::{self, Scenario, ScenarioKind};
use rokhlin_core::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "rokhlin", version, about = "Runs the verification checks and writes JSON reports")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sampling seed for density checks and random sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rotation angle for the orbit maps.
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-point algebra of w_k and its embedding into w_k ⊗ w_{k+1}.
    FixedPoint {
        #[arg(long)]
        k: u32,
    },
    /// Rokhlin certificate for a stage of the UHF Z/2 action.
    CertifyUhf {
        #[arg(long, default_value_t = 2)]
        factors: usize,
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long, default_value = "1/2")]
        delta1: String,
        #[arg(long, default_value = "1/2")]
        delta2: String,
    },
    /// All AT-system checks on a preset or an explicit schedule.
    CertifyAt {
        #[arg(long, conflicts_with = "schedule")]
        preset: Option<String>,
        /// JSON file holding a list of {l00,l01,l10,l11} objects.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n_cyc: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 1])]
        r0: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        stages: usize,
        #[arg(long, default_value = "1/4")]
        eps0: String,
    },
    /// First stage at which the orbit sets are eps-dense.
    Density {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        n_cyc: u64,
        #[arg(long, default_value_t = 0)]
        start_summand: u8,
        #[arg(long, default_value_t = 40)]
        max_steps: usize,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Truncated invariants of a module over the representation ring.
    Kmodule {
        /// Module JSON, e.g. '{"summands":[{"cyclic":2},{"free":true}]}'.
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = 4)]
        level: u32,
    },
    /// Maximal additive order of the stage module for N, or of a given module.
    Mao {
        #[arg(long, required_unless_present = "module")]
        n_cyc: Option<u64>,
        #[arg(long)]
        module: Option<String>,
    },
    /// Two-step relative commutant and its family decomposition.
    Commutant {
        #[arg(long, default_value_t = 2)]
        n_cyc: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 1])]
        r0: Vec<u64>,
        /// l00,l01,l10,l11 at stage n.
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<u64>,
        /// l00,l01,l10,l11 at stage n+1.
        #[arg(long, value_delimiter = ',', required = true)]
        next: Vec<u64>,
    },
    /// Cartesian parameter sweep over a built-in or file-supplied grid.
    Sweep {
        #[arg(long, conflicts_with_all = ["template", "grid_file"])]
        grid: Option<String>,
        #[arg(long, requires = "grid_file")]
        template: Option<PathBuf>,
        #[arg(long, requires = "template")]
        grid_file: Option<PathBuf>,
    },
    /// Run a preset or a scenario file.
    Report {
        #[arg(long, conflicts_with = "scenario")]
        preset: Option<String>,
        #[arg(long, required_unless_present = "preset")]
        scenario: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_json(text: &str, what: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

fn l_object(v: &[u64]) -> Value {
    json!({"l00": v[0], "l01": v[1], "l10": v[2], "l11": v[3]})
}

fn with_globals(mut s: Scenario, cli: &Cli) -> Scenario {
    let takes_seed = matches!(s.kind, ScenarioKind::AtCircle | ScenarioKind::Density | ScenarioKind::RepRingSweep);
    let takes_theta = matches!(s.kind, ScenarioKind::AtCircle | ScenarioKind::Density);
    if let (true, Some(seed)) = (takes_seed, cli.seed) {
        s.params.insert("seed".into(), Value::from(seed));
    }
    if let (true, Some(theta)) = (takes_theta, cli.theta) {
        s.params.insert("theta".into(), Value::from(theta));
    }
    s
}

fn params(v: Value) -> BTreeMap<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

/// Returns the serialized report and whether every check passed.
fn execute(cli: &Cli) -> Result<(String, bool, Option<String>), Failure> {
    let run = |s: Scenario| -> Result<(String, bool, Option<String>), Failure> {
        let s = with_globals(s, cli);
        let r = scenario::run(&s)?;
        Ok((r.to_json(), r.pass, s.out.clone()))
    };
    match &cli.command {
        Command::FixedPoint { k } => {
            let r = scenario::fixed_point_report(*k)?;
            Ok((r.to_json(), r.pass, None))
        }
        Command::CertifyUhf { factors, level, delta1, delta2 } => run(Scenario::new(
            ScenarioKind::UhfZ2,
            params(json!({"n_factors": factors, "L": level, "delta1": delta1, "delta2": delta2})),
        )),
        Command::CertifyAt { preset, schedule, n_cyc, r0, stages, eps0 } => {
            if r0.len() != 2 {
                return Err(Failure::Usage("--r0 takes two values".into()));
            }
            let mut p = params(json!({"N": n_cyc, "eps0": eps0}));
            match schedule {
                Some(path) => {
                    p.insert("schedule".into(), parse_json(&read(path)?, "schedule")?);
                    p.insert("r0".into(), json!(r0));
                }
                None => {
                    p.insert("preset".into(), Value::from(preset.clone().unwrap_or_else(|| "e5328".into())));
                    p.insert("stages".into(), Value::from(*stages));
                }
            }
            run(Scenario::new(ScenarioKind::AtCircle, p))
        }
        Command::Density { eps, n_cyc, start_summand, max_steps, samples } => run(Scenario::new(
            ScenarioKind::Density,
            params(json!({
                "eps": eps, "N": n_cyc, "start_summand": start_summand,
                "max_steps": max_steps, "samples": samples,
            })),
        )),
        Command::Kmodule { module, level } => {
            let m: RModule = serde_json::from_str(module).map_err(|e| Failure::Usage(format!("module: {e}")))?;
            let r = scenario::kmodule_report(&m, *level)?;
            Ok((r.to_json(), r.pass, None))
        }
        Command::Mao { n_cyc, module } => {
            let m: RModule = match (module, n_cyc) {
                (Some(text), _) => serde_json::from_str(text).map_err(|e| Failure::Usage(format!("module: {e}")))?,
                (None, Some(n)) => RModule::at_stage(*n),
                (None, None) => return Err(Failure::Usage("give --n-cyc or --module".into())),
            };
            let mao = m.mao()?;
            let pass = n_cyc.is_none_or(|n| module.is_some() || mao.to_string() == n.to_string());
            let doc = json!({
                "module": m,
                "mao": mao.to_string(),
                "checks": [{"name": "mao_equals_N", "pass": pass}],
                "pass": pass,
            });
            Ok((serde_json::to_string_pretty(&doc).expect("plain data"), pass, None))
        }
        Command::Commutant { n_cyc, r0, l, next } => {
            if l.len() != 4 || next.len() != 4 || r0.len() != 2 {
                return Err(Failure::Usage("--l and --next take four values and --r0 takes two".into()));
            }
            run(Scenario::new(
                ScenarioKind::Commutant,
                params(json!({"N": n_cyc, "r0": r0, "schedule": [l_object(l), l_object(next)], "n": 0})),
            ))
        }
        Command::Sweep { grid, template, grid_file } => {
            let (template, grid) = match (grid, template, grid_file) {
                (Some(name), _, _) => scenario::builtin_grid(name)?,
                (None, Some(t), Some(g)) => {
                    let template = Scenario::from_json(&read(t)?)?;
                    let grid: BTreeMap<String, Vec<Value>> = serde_json::from_str(&read(g)?)
                        .map_err(|e| Failure::Usage(format!("grid: {e}")))?;
                    (template, grid)
                }
                _ => return Err(Failure::Usage("give --grid or both --template and --grid-file".into())),
            };
            let r = scenario::sweep(&with_globals(template, cli), &grid);
            Ok((serde_json::to_string_pretty(&r).expect("plain data"), r.pass, None))
        }
        Command::Report { preset, scenario } => {
            let s = match (preset, scenario) {
                (Some(name), _) => Scenario::preset(name)?,
                (None, Some(path)) => Scenario::from_json(&read(path)?)?,
                (None, None) => return Err(Failure::Usage("give --preset or --scenario".into())),
            };
            run(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Format::Json = cli.format;
    match execute(&cli) {
        Ok((text, pass, scenario_out)) => {
            let target = cli.out.clone().or(scenario_out.map(PathBuf::from));
            match target {
                Some(path) => {
                    if let Err(e) = fs::write(&path, format!("{text}\n")) {
                        eprintln!("{}", json!({"error": format!("{}: {e}", path.display())}));
                        return ExitCode::from(2);
                    }
                }
                None => {
                    // A closed pipe downstream is not an error of ours.
                    let _ = writeln!(std::io::stdout().lock(), "{text}");
                }
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more checks failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{}", json!({"error": msg}));
            ExitCode::from(2)
        }
    }
}
