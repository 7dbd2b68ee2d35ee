//! `qstab`: compile, simulate and sweep syndrome-extraction schedules for QCCD machines.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qstab_core::code::{generate, parse_code};
use qstab_core::compile::compile;
use qstab_core::config::HardwareConfig;
use qstab_core::experiment::{run_suite, suite_csv, sweep, sweep_csv, Manifest};
use qstab_core::noise::{coherence_from_p, error_budget_with};
use qstab_core::sim::{simulate_trace, verify, LatencyReport};
use qstab_core::{Hardware, Policy, Schedule, StabilizerCode};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qstab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Target {
    /// Code generator (`surface:3`, `color:5`, `repetition:7`) or a code file.
    #[arg(long)]
    code: String,
    /// Hardware shorthand (`linear`, `linear:8x5`, `grid`, `grid:4x6x5`) or a JSON config file.
    #[arg(long, default_value = "linear")]
    hw: String,
}

#[derive(clap::Args)]
struct CompileArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_parser = parse_policy)]
    compiler: Policy,
    /// Ancilla count, or `sweep` to keep the lowest-latency budget of the six-point sweep.
    #[arg(long, default_value = "1")]
    ancilla_budget: String,
    #[arg(long, default_value_t = 2)]
    rounds: usize,
    /// Schedule output path.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Report output path; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the mapping after every round to this path.
    #[arg(long)]
    dump_mapping: Option<PathBuf>,
    /// Write one `start end op` line per simulated operation to this path.
    #[arg(long)]
    emit_events: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated code in the text format.
    GenCode {
        spec: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print a code's stabilizers and Tanner-graph neighbourhoods.
    DumpCode {
        #[arg(long)]
        code: String,
    },
    /// Compile, verify and simulate; writes the schedule and a JSON report.
    Compile(CompileArgs),
    /// Simulate a schedule file and print its latency report.
    Simulate {
        schedule: PathBuf,
        #[arg(long, default_value = "linear")]
        hw: String,
        /// Code the schedule was compiled for; sizes automatic hardware shapes.
        #[arg(long)]
        code: Option<String>,
        #[arg(long)]
        emit_events: Option<PathBuf>,
    },
    /// Check a schedule file against its code; exits 1 on any violation.
    Verify {
        schedule: PathBuf,
        #[command(flatten)]
        target: Target,
    },
    /// Circuit-level rates and the twirled idle channel for a latency report.
    Noise {
        /// Physical error rates, comma separated.
        #[arg(short, long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// JSON report written by `compile` or `simulate`.
        #[arg(long, conflicts_with = "latency_us")]
        report: Option<PathBuf>,
        /// Round latencies in microseconds, comma separated.
        #[arg(long, value_delimiter = ',')]
        latency_us: Vec<f64>,
        /// Override T1 in seconds.
        #[arg(long, requires = "t2")]
        t1: Option<f64>,
        /// Override T2 in seconds.
        #[arg(long, requires = "t1")]
        t2: Option<f64>,
    },
    /// Six-point ancilla-budget sweep as CSV.
    Sweep {
        #[command(flatten)]
        target: Target,
        /// Compilers to sweep; all when absent.
        #[arg(long, value_delimiter = ',', value_parser = parse_policy)]
        compiler: Vec<Policy>,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a JSON manifest of codes, machines, compilers and budgets; writes CSV.
    Suite {
        manifest: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse::<Policy>().map_err(|e| e.to_string())
}

fn load_code(source: &str) -> Result<StabilizerCode> {
    let path = Path::new(source);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
        let label = path.file_stem().map_or(source.into(), |s| s.to_string_lossy().into_owned());
        return Ok(parse_code(&text).with_context(|| format!("parsing {source}"))?.with_label(label));
    }
    Ok(generate(source)?)
}

fn load_hw_config(source: &str) -> Result<HardwareConfig> {
    let path = Path::new(source);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
        return Ok(HardwareConfig::from_json(&text)?);
    }
    Ok(HardwareConfig::from_shorthand(source)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn events_text(schedule: &Schedule, hw: &Hardware) -> Result<String> {
    let trace = simulate_trace(schedule, hw)?;
    Ok(trace.events.iter().map(|e| e.to_line() + "\n").collect())
}

fn report_json(report: &LatencyReport, extra: serde_json::Value) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    if let (Some(obj), serde_json::Value::Object(more)) = (value.as_object_mut(), extra) {
        obj.insert("per_round_us".into(), json!(report.mean_round_us()));
        obj.extend(more);
    }
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

fn cmd_compile(args: &CompileArgs) -> Result<()> {
    let (target, policy, rounds) = (&args.target, args.compiler, args.rounds);
    let code = load_code(&target.code)?;
    let cfg = load_hw_config(&target.hw)?;
    let hw = cfg.build(code.m())?;
    let budget = match args.ancilla_budget.as_str() {
        "sweep" => sweep(&code, &hw, &[policy], rounds)
            .into_iter()
            .find(|r| r.argmin)
            .map(|r| r.budget)
            .context("no budget in the sweep compiled")?,
        n => n.parse().with_context(|| format!("bad ancilla budget {n:?}"))?,
    };
    let schedule = compile(&code, &hw, policy, budget, rounds)?;
    let check = verify(&schedule, &code, &hw);
    if let Some(v) = check.first() {
        bail!(
            "schedule failed verification ({} violations); first at round {}, op {}: {}",
            check.violations.len(),
            v.round,
            v.index,
            v.message
        );
    }
    let trace = simulate_trace(&schedule, &hw)?;
    if let Some(p) = &args.out {
        fs::write(p, schedule.to_text()).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &args.dump_mapping {
        let mut text = format!("initial\n{}", schedule.initial.to_text());
        for (k, m) in trace.round_mappings.iter().enumerate() {
            text.push_str(&format!("after round {k}\n{}", m.to_text()));
        }
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &args.emit_events {
        let text: String = trace.events.iter().map(|e| e.to_line() + "\n").collect();
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    let report = report_json(
        &trace.report,
        json!({
            "code": code.label(),
            "hardware": cfg.label(code.m()),
            "compiler": policy.to_string(),
            "budget": budget,
        }),
    )?;
    write_or_print(args.report.as_deref(), &report)
}

fn hw_for_schedule(hw: &str, code: Option<&str>, schedule: &Schedule) -> Result<Hardware> {
    let cfg = load_hw_config(hw)?;
    let m = match code {
        Some(c) => load_code(c)?.m(),
        None => schedule.initial.trap_count(),
    };
    let hw = cfg.build(m)?;
    if hw.trap_count() != schedule.initial.trap_count() {
        bail!(
            "schedule maps {} traps but the hardware has {}",
            schedule.initial.trap_count(),
            hw.trap_count()
        );
    }
    Ok(hw)
}

fn load_schedule(path: &Path) -> Result<Schedule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Schedule::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_noise(p: &[f64], report: Option<&Path>, latency_us: &[f64], t1: Option<f64>, t2: Option<f64>) -> Result<()> {
    let report: LatencyReport = match report {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None if !latency_us.is_empty() => LatencyReport {
            total_us: latency_us.iter().sum(),
            rounds: latency_us.to_vec(),
            shuttle_count: 0,
            swap_count: 0,
            cooling_count: 0,
            trap_busy_us: vec![],
            final_mapping: String::new(),
        },
        None => bail!("give --report or --latency-us"),
    };
    let budgets = p
        .iter()
        .map(|&p| {
            let (a, b) = match (t1, t2) {
                (Some(a), Some(b)) => (a, b),
                _ => coherence_from_p(p)?,
            };
            error_budget_with(&report, p, a, b)
        })
        .collect::<qstab_core::Result<Vec<_>>>()?;
    println!("{}", serde_json::to_string_pretty(&budgets)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenCode { spec, out } => {
            let code = generate(&spec)?;
            write_or_print(out.as_deref(), &code.to_text())?;
        }
        Command::DumpCode { code } => {
            let code = load_code(&code)?;
            let graph = code.tanner_graph();
            println!(
                "{}: n={} m={} max_weight={} edges={}",
                code.label(),
                code.n(),
                code.m(),
                code.max_weight(),
                graph.edge_count()
            );
            for s in code.stabilizers() {
                println!("s{} w{}: {}", s.id, s.weight(), s);
            }
            for q in 0..code.n() {
                let checks: Vec<String> = graph.data_neighbors(q).iter().map(|c| format!("s{c}")).collect();
                println!("d{q}: {}", checks.join(" "));
            }
        }
        Command::Compile(args) => cmd_compile(&args)?,
        Command::Simulate {
            schedule,
            hw,
            code,
            emit_events,
        } => {
            let schedule = load_schedule(&schedule)?;
            let hw = hw_for_schedule(&hw, code.as_deref(), &schedule)?;
            let trace = simulate_trace(&schedule, &hw)?;
            if let Some(p) = emit_events {
                fs::write(&p, events_text(&schedule, &hw)?).with_context(|| format!("writing {}", p.display()))?;
            }
            print!("{}", report_json(&trace.report, json!({}))?);
        }
        Command::Verify { schedule, target } => {
            let schedule = load_schedule(&schedule)?;
            let code = load_code(&target.code)?;
            let hw = hw_for_schedule(&target.hw, Some(&target.code), &schedule)?;
            let check = verify(&schedule, &code, &hw);
            if check.is_valid() {
                println!("ok: {} rounds, {} ops", schedule.rounds.len(), schedule.ops().count());
            } else {
                for v in &check.violations {
                    println!("round {} op {} t={}: {}", v.round, v.index, v.time_us, v.message);
                }
                return Ok(ExitCode::from(1));
            }
        }
        Command::Noise {
            p,
            report,
            latency_us,
            t1,
            t2,
        } => cmd_noise(&p, report.as_deref(), &latency_us, t1, t2)?,
        Command::Sweep {
            target,
            compiler,
            rounds,
            out,
        } => {
            let code = load_code(&target.code)?;
            let cfg = load_hw_config(&target.hw)?;
            let hw = cfg.build(code.m())?;
            let policies = if compiler.is_empty() { Policy::ALL.to_vec() } else { compiler };
            let rows = sweep(&code, &hw, &policies, rounds);
            write_or_print(out.as_deref(), &sweep_csv(code.label(), &cfg.label(code.m()), rounds, &rows))?;
        }
        Command::Suite { manifest, out } => {
            let text = fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let manifest = Manifest::from_json(&text)?;
            write_or_print(out.as_deref(), &suite_csv(&run_suite(&manifest)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
