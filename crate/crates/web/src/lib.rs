//! WebAssembly bindings for the browser demo.
//!
//! Each exported function takes plain strings and returns a JSON document, or throws the
//! error message as a string.

use qstab_core::code::generate;
use qstab_core::config::HardwareConfig;
use qstab_core::experiment::{run, sweep};
use qstab_core::sim::simulate_trace;
use qstab_core::{coherence_from_p, pta_channel, Hardware, Policy, StabilizerCode};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Out = Result<Value, String>;

fn setup(code: &str, hw: &str) -> Result<(StabilizerCode, Hardware), String> {
    let code = generate(code.trim()).map_err(|e| e.to_string())?;
    let hw = HardwareConfig::from_shorthand(hw.trim())
        .and_then(|c| c.build(code.m()))
        .map_err(|e| e.to_string())?;
    Ok((code, hw))
}

fn parse_budget(budget: &str, m: usize) -> Result<usize, String> {
    match budget.trim() {
        "m" => Ok(m),
        b => b.parse().map_err(|_| format!("bad ancilla budget {b:?}")),
    }
}

/// Compiles, simulates and lays out every operation on a per-resource timeline.
pub fn gantt(code: &str, hw: &str, compiler: &str, budget: &str, rounds: usize) -> Out {
    let (code, hw) = setup(code, hw)?;
    let policy: Policy = compiler.parse().map_err(|e: qstab_core::Error| e.to_string())?;
    let budget = parse_budget(budget, code.m())?;
    let (schedule, _) = run(&code, &hw, policy, budget, rounds).map_err(|e| e.to_string())?;
    let trace = simulate_trace(&schedule, &hw).map_err(|e| e.to_string())?;
    let mut lanes: Vec<String> = (0..hw.topology().trap_count()).map(|t| format!("t{t}")).collect();
    let events: Vec<Value> = trace
        .events
        .iter()
        .map(|e| {
            let lane = e.op.resource().to_string();
            if !lanes.contains(&lane) {
                lanes.push(lane.clone());
            }
            json!({
                "round": e.round,
                "start": e.start,
                "end": e.end,
                "kind": e.op.name(),
                "lane": lane,
                "text": e.op.to_string(),
            })
        })
        .collect();
    Ok(json!({
        "code": code.label(),
        "n": code.n(),
        "m": code.m(),
        "budget": budget,
        "report": trace.report,
        "lanes": lanes,
        "events": events,
    }))
}

/// Total latency of every compiler at each point of the ancilla-budget sweep.
pub fn budget_sweep(code: &str, hw: &str, rounds: usize) -> Out {
    let (code, hw) = setup(code, hw)?;
    let rows: Vec<Value> = sweep(&code, &hw, &Policy::ALL, rounds)
        .into_iter()
        .map(|r| match r.outcome {
            Ok(rep) => json!({
                "compiler": r.policy.as_str(),
                "budget": r.budget,
                "total_us": rep.total_us,
                "shuttles": rep.shuttle_count,
                "argmin": r.argmin,
            }),
            Err(e) => json!({ "compiler": r.policy.as_str(), "budget": r.budget, "error": e }),
        })
        .collect();
    Ok(json!({ "code": code.label(), "m": code.m(), "rows": rows }))
}

/// Idle Pauli probabilities for a round of `latency_us` across a log-spaced range of error rates.
pub fn noise_curve(latency_us: f64, points: usize) -> Out {
    if !(latency_us >= 0.0 && latency_us.is_finite()) {
        return Err(format!("bad latency {latency_us}"));
    }
    let points = points.clamp(2, 200);
    (0..points)
        .map(|i| {
            let p = 10f64.powf(-5.0 + 3.0 * i as f64 / (points - 1) as f64);
            let (t1, t2) = coherence_from_p(p).map_err(|e| e.to_string())?;
            let c = pta_channel(latency_us * 1e-6, t1, t2).map_err(|e| e.to_string())?;
            Ok(json!({ "p": p, "t1": t1, "px": c.px, "py": c.py, "pz": c.pz, "total": c.total() }))
        })
        .collect::<Result<Vec<_>, String>>()
        .map(Value::from)
}

fn to_js(out: Out) -> Result<String, JsValue> {
    out.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = gantt)]
pub fn gantt_js(code: &str, hw: &str, compiler: &str, budget: &str, rounds: usize) -> Result<String, JsValue> {
    to_js(gantt(code, hw, compiler, budget, rounds))
}

#[wasm_bindgen(js_name = budgetSweep)]
pub fn budget_sweep_js(code: &str, hw: &str, rounds: usize) -> Result<String, JsValue> {
    to_js(budget_sweep(code, hw, rounds))
}

#[wasm_bindgen(js_name = noiseCurve)]
pub fn noise_curve_js(latency_us: f64, points: usize) -> Result<String, JsValue> {
    to_js(noise_curve(latency_us, points))
}
