//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test fails if any criterion does.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use qstab_core::code::StabilizerCode;
use qstab_core::compile::{budget_sweep, compile, compile_from, MovelessOptions};
use qstab_core::config::HardwareConfig;
use qstab_core::experiment::{run, run_suite, suite_csv, sweep, sweep_csv, Manifest};
use qstab_core::hardware::{intratrap_swap_time, JunctionKind, Topology};
use qstab_core::sim::{simulate, simulate_trace, theoretical_min_latency, verify};
use qstab_core::{coherence_from_p, pta_channel, Hardware, Op, Policy, SwapMethod, TimingModel};

const AC1_TIME_LIMIT: Duration = Duration::from_secs(300);
const AC4_MIN_GEOMEAN: f64 = 1.3;
const AC8_MAX_REL_ERR: f64 = 1e-6;
const AC8_RK4_STEPS: usize = 4000;
const SUITE_ROUNDS: usize = 2;

type Outcome = Result<String, String>;

fn hw_for(kind: &str, code: &StabilizerCode) -> Hardware {
    HardwareConfig::from_shorthand(kind).unwrap().build(code.m()).unwrap()
}

fn budgets_1_m(code: &StabilizerCode) -> Vec<usize> {
    let mut b = vec![1, code.m()];
    b.dedup();
    b
}

fn ac1_ac9_correctness_and_bound() -> (Outcome, Outcome) {
    let start = Instant::now();
    let codes = common::suite_codes();
    let results: Vec<(Vec<String>, Vec<String>, usize)> = std::thread::scope(|s| {
        let handles: Vec<_> = codes
            .iter()
            .map(|(name, code)| {
                s.spawn(move || {
                    let (mut bad, mut below, mut count) = (Vec::new(), Vec::new(), 0);
                    for kind in ["linear", "grid"] {
                        let hw = hw_for(kind, code);
                        let floor = theoretical_min_latency(code, hw.timing());
                        for p in Policy::ALL {
                            for b in budgets_1_m(code) {
                                count += 1;
                                let tag = format!("{name}/{kind}/{p}/b{b}");
                                let schedule = match compile(code, &hw, p, b, SUITE_ROUNDS) {
                                    Ok(s) => s,
                                    Err(e) => {
                                        bad.push(format!("{tag}: {e}"));
                                        continue;
                                    }
                                };
                                let check = verify(&schedule, code, &hw);
                                if !check.is_valid() {
                                    bad.push(format!("{tag}: {} violations", check.violations.len()));
                                }
                                let report = simulate(&schedule, &hw).unwrap();
                                if report.rounds.iter().any(|&r| r < floor) {
                                    below.push(format!("{tag}: {:?} < {floor}", report.rounds));
                                }
                            }
                        }
                    }
                    (bad, below, count)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let elapsed = start.elapsed();
    let count: usize = results.iter().map(|r| r.2).sum();
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.0).collect();
    let below: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    let ac1 = if !bad.is_empty() {
        Err(format!("{} of {count} runs invalid, first: {}", bad.len(), bad[0]))
    } else if elapsed > AC1_TIME_LIMIT {
        Err(format!("{count} runs clean but took {elapsed:.1?}"))
    } else {
        Ok(format!("{count} runs, zero violations, {elapsed:.1?}"))
    };
    let serial = single_trap_serial_sum();
    let ac9 = match (below.first(), serial) {
        (Some(b), _) => Err(format!("round below bound: {b}")),
        (None, Err(e)) => Err(e),
        (None, Ok(n)) => Ok(format!("{count} schedules above bound; {n} single-trap schedules equal serial sum")),
    };
    (ac1, ac9)
}

/// Every op on one trap runs back to back, so latency is the plain sum of op times.
fn single_trap_serial_sum() -> Result<usize, String> {
    let mut n = 0;
    for name in ["repetition:3", "repetition:5", "surface:3", "color:3"] {
        let code = qstab_core::code::generate(name).unwrap();
        for p in Policy::ALL {
            for b in budgets_1_m(&code) {
                let hw = common::linear(1, code.n() + b + 1);
                let t = hw.timing().clone();
                let s = compile(&code, &hw, p, b, SUITE_ROUNDS).map_err(|e| e.to_string())?;
                let expected: f64 = s
                    .ops()
                    .map(|op| match op {
                        Op::Gate2 { .. } => t.gate2,
                        Op::Gate1 { .. } => t.gate1,
                        Op::Measure { .. } => t.measure,
                        Op::Reset { .. } => 0.0,
                        other => panic!("unexpected {other:?} on one trap"),
                    })
                    .sum();
                let got = simulate(&s, &hw).unwrap().total_us;
                if got != expected {
                    return Err(format!("{name}/{p}/b{b}: {got} != serial {expected}"));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn ac2_pulling() -> Outcome {
    let (code, hw, initial) = common::pulling_instance();
    let count = |p| {
        let s = compile_from(&code, &hw, p, 1, initial.clone(), MovelessOptions::default()).unwrap();
        assert!(verify(&s, &code, &hw).is_valid());
        s.shuttle_count()
    };
    let (base, mao) = (count(Policy::Baseline), count(Policy::Mao));
    let msg = format!("baseline {base} shuttles, mao {mao}");
    if base > mao && mao == 2 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac3_dynamic_order() -> Outcome {
    let (code, hw, initial) = common::reorder_instance();
    let count = |o| {
        let s = compile_from(&code, &hw, Policy::Moveless, 1, initial.clone(), o).unwrap();
        assert!(verify(&s, &code, &hw).is_valid());
        s.shuttle_count()
    };
    let (dynamic, fixed) = (count(MovelessOptions::default()), count(MovelessOptions::STATIC));
    let msg = format!("dynamic {dynamic} shuttles, static {fixed}");
    if dynamic == 2 && fixed == 5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn best(code: &StabilizerCode, hw: &Hardware, p: Policy) -> (usize, f64) {
    sweep(code, hw, &[p], SUITE_ROUNDS)
        .into_iter()
        .find(|r| r.argmin)
        .map(|r| (r.budget, r.outcome.unwrap().total_us))
        .unwrap()
}

fn ac4_speedup() -> Outcome {
    let mut log = Vec::new();
    let mut slow = Vec::new();
    let mut log_sum = 0.0;
    let codes = common::suite_codes();
    for (name, code) in &codes {
        let hw = hw_for("linear", code);
        let (bb, base) = best(code, &hw, Policy::Baseline);
        let (mb, moveless) = best(code, &hw, Policy::Moveless);
        let s = base / moveless;
        log_sum += s.ln();
        log.push(format!("{name} {s:.2} (base* {base} @{bb}, moveless* {moveless} @{mb})"));
        if s < 1.0 {
            slow.push(name.to_string());
        }
    }
    let geomean = (log_sum / codes.len() as f64).exp();
    for line in &log {
        println!("    {line}");
    }
    let msg = format!("geomean {geomean:.3} (need >= {AC4_MIN_GEOMEAN}), below 1.0: {slow:?}");
    if slow.is_empty() && geomean >= AC4_MIN_GEOMEAN {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac5_fixed_point() -> Outcome {
    let mut checked = 0;
    for (name, code) in common::suite_codes() {
        let hw = hw_for("linear", &code);
        for b in budgets_1_m(&code) {
            let s = compile(&code, &hw, Policy::Moveless, b, 4).unwrap();
            let trace = simulate_trace(&s, &hw).unwrap();
            let phi0 = s.initial.data_traps();
            for (k, m) in trace.round_mappings.iter().enumerate() {
                if m.data_traps() != phi0 {
                    return Err(format!("{name}/b{b}: data moved by end of round {k}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} round boundaries match the initial data placement"))
}

fn ac6_reverse_round() -> Outcome {
    let mut mismatched = Vec::new();
    let mut unrestored = Vec::new();
    let mut count = 0;
    for (name, code) in common::suite_codes() {
        let hw = hw_for("linear", &code);
        for p in [Policy::Baseline, Policy::Mao] {
            for b in budgets_1_m(&code) {
                let (s, report) = run(&code, &hw, p, b, SUITE_ROUNDS).unwrap();
                let trace = simulate_trace(&s, &hw).unwrap();
                count += 1;
                if trace.round_mappings[1] != s.initial {
                    unrestored.push(format!("{name}/{p}/b{b}"));
                }
                if report.rounds[0] != report.rounds[1] {
                    mismatched.push(format!("{name}/{p}/b{b} {}/{}", report.rounds[0], report.rounds[1]));
                }
            }
        }
    }
    let msg = format!(
        "{count} runs; mapping restored in {}, equal round latency in {}",
        count - unrestored.len(),
        count - mismatched.len()
    );
    if mismatched.is_empty() && unrestored.is_empty() {
        Ok(msg)
    } else {
        for m in unrestored.iter().chain(&mismatched) {
            println!("    {m}");
        }
        Err(msg)
    }
}

fn ac7_timing() -> Outcome {
    let timing = TimingModel::default();
    let adjacent = common::linear(2, 5).hop_time(0, 1);
    // Traps 0-4 and one X junction (node 5); trap 0 reaches trap 2 over three segments.
    let topo = Topology::new(
        vec![5; 5],
        vec![JunctionKind::X],
        vec![(0, 1), (1, 5), (5, 2), (5, 3), (5, 4)],
        "x",
    )
    .unwrap();
    let hw = Hardware::new(topo, timing.clone()).unwrap();
    let via_x = hw.hop_time(0, 2);
    let segments = hw.route(0, 2).segments.len();
    let gateswap = intratrap_swap_time(&timing, SwapMethod::GateSwap, 5);
    let ionswap = intratrap_swap_time(&timing, SwapMethod::IonSwap, 5);
    let got = (adjacent, via_x, segments, gateswap, ionswap);
    let msg = format!("adjacent {adjacent}, X junction {via_x} over {segments} segments, GateSWAP {gateswap}, IonSWAP(5) {ionswap}");
    if got == (165.0, 295.0, 3, 300.0, 210.0) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac8_noise() -> Outcome {
    if coherence_from_p(1e-3) != Ok((10.0, 10.0)) || coherence_from_p(1e-4) != Ok((100.0, 100.0)) {
        return Err(format!("anchors {:?} {:?}", coherence_from_p(1e-3), coherence_from_p(1e-4)));
    }
    let pairs = [(10.0, 10.0), (10.0, 15.0), (31.62, 60.0), (100.0, 200.0)];
    let times = [1e-3, 0.05, 1.0, 7.5, 40.0];
    let mut worst: f64 = 0.0;
    for (t1, t2) in pairs {
        let mut prev = (0.0, 0.0, 0.0);
        for t in times {
            let c = pta_channel(t, t1, t2).map_err(|e| e.to_string())?;
            let (ox, oy, oz) = common::lindblad_pta(t, t1, t2, AC8_RK4_STEPS);
            for (got, want) in [(c.px, ox), (c.py, oy), (c.pz, oz)] {
                worst = worst.max((got - want).abs() / want.abs());
            }
            if c.px < prev.0 || c.py < prev.1 || c.pz < prev.2 {
                return Err(format!("not monotone at t={t}, T1={t1}, T2={t2}"));
            }
            prev = (c.px, c.py, c.pz);
        }
    }
    let msg = format!("anchors exact, 20-point grid max relative error {worst:.2e}, monotone");
    if worst < AC8_MAX_REL_ERR {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac10_sweep_trend(artifacts: &Path) -> Outcome {
    let mut worse = Vec::new();
    for (name, code) in common::suite_codes() {
        let hw = hw_for("linear", &code);
        let one = run(&code, &hw, Policy::Moveless, 1, SUITE_ROUNDS).unwrap().1.total_us;
        let all = run(&code, &hw, Policy::Moveless, code.m(), SUITE_ROUNDS).unwrap().1.total_us;
        println!("    {name}: budget 1 {one}, budget m {all}");
        if one > all {
            worse.push(name);
        }
    }
    std::fs::create_dir_all(artifacts).map_err(|e| e.to_string())?;
    for name in ["surface:5", "color:5"] {
        let code = qstab_core::code::generate(name).unwrap();
        let cfg = HardwareConfig::from_shorthand("linear").unwrap();
        let hw = cfg.build(code.m()).unwrap();
        let rows = sweep(&code, &hw, &Policy::ALL, SUITE_ROUNDS);
        if rows.iter().filter(|r| r.policy == Policy::Moveless).count() != budget_sweep(code.m()).len() {
            return Err(format!("{name}: sweep incomplete"));
        }
        let csv = sweep_csv(name, &cfg.label(code.m()), SUITE_ROUNDS, &rows);
        let file = artifacts.join(format!("sweep_{}.csv", name.replace(':', "")));
        std::fs::write(&file, csv).map_err(|e| e.to_string())?;
    }
    if worse.is_empty() {
        Ok("budget 1 <= budget m on every code; sweep CSVs written".into())
    } else {
        Err(format!("budget 1 slower than budget m on {worse:?}; sweep CSVs written"))
    }
}

fn ac11_determinism() -> Outcome {
    let manifest = Manifest::from_json(
        r#"{"codes":["repetition:5","surface:3","color:3"],"hardware":["linear","grid"],"budgets":["sweep"],"rounds":2}"#,
    )
    .unwrap();
    let a = suite_csv(&run_suite(&manifest));
    let b = suite_csv(&run_suite(&manifest));
    if a == b {
        Ok(format!("{} rows byte-identical", a.lines().count() - 1))
    } else {
        Err("suite CSVs differ between runs".into())
    }
}

#[test]
fn acceptance() {
    let artifacts = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../artifacts");
    let (ac1, ac9) = ac1_ac9_correctness_and_bound();
    let results = [
        ("AC1 correctness suite", ac1),
        ("AC2 pulling regression", ac2_pulling()),
        ("AC3 dynamic scheduling regression", ac3_dynamic_order()),
        ("AC4 directional speedup", ac4_speedup()),
        ("AC5 fixed-point mapping", ac5_fixed_point()),
        ("AC6 reverse-round identities", ac6_reverse_round()),
        ("AC7 timing model", ac7_timing()),
        ("AC8 noise model", ac8_noise()),
        ("AC9 lower bound", ac9),
        ("AC10 ancilla sweep trend", ac10_sweep_trend(&artifacts)),
        ("AC11 determinism", ac11_determinism()),
    ];
    let mut failed = Vec::new();
    for (name, outcome) in &results {
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
