//! Budget sweeps and suite runs with CSV output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::code::{generate, StabilizerCode};
use crate::compile::{budget_sweep, compile};
use crate::config::HardwareConfig;
use crate::error::{Error, Result};
use crate::hardware::Hardware;
use crate::schedule::{Policy, Schedule};
use crate::sim::{simulate, verify, LatencyReport};

/// Compiles, verifies and simulates; a schedule that fails verification is an error.
pub fn run(
    code: &StabilizerCode,
    hw: &Hardware,
    policy: Policy,
    budget: usize,
    rounds: usize,
) -> Result<(Schedule, LatencyReport)> {
    let schedule = compile(code, hw, policy, budget, rounds)?;
    let check = verify(&schedule, code, hw);
    if let Some(v) = check.first() {
        return Err(Error::Invalid(format!(
            "verification failed at round {}, op {}, t={} us: {}",
            v.round, v.index, v.time_us, v.message
        )));
    }
    let report = simulate(&schedule, hw)?;
    Ok((schedule, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub policy: Policy,
    pub budget: usize,
    pub outcome: std::result::Result<LatencyReport, String>,
    /// Lowest total latency among this policy's rows.
    pub argmin: bool,
}

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Runs every policy at every budget of the six-point sweep.
pub fn sweep(code: &StabilizerCode, hw: &Hardware, policies: &[Policy], rounds: usize) -> Vec<SweepRow> {
    let tasks: Vec<(Policy, usize)> = policies
        .iter()
        .flat_map(|&p| budget_sweep(code.m()).into_iter().map(move |b| (p, b)))
        .collect();
    let outcomes = par_map(&tasks, |&(p, b)| {
        run(code, hw, p, b, rounds).map(|r| r.1).map_err(|e| e.to_string())
    });
    let mut rows: Vec<SweepRow> = tasks
        .into_iter()
        .zip(outcomes)
        .map(|((policy, budget), outcome)| SweepRow {
            policy,
            budget,
            outcome,
            argmin: false,
        })
        .collect();
    for &p in policies {
        let best = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.policy == p)
            .filter_map(|(i, r)| r.outcome.as_ref().ok().map(|rep| (i, rep.total_us)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        if let Some((i, _)) = best {
            rows[i].argmin = true;
        }
    }
    rows
}

/// Best baseline budget and its total latency over the six-point sweep.
pub fn baseline_star(code: &StabilizerCode, hw: &Hardware, rounds: usize) -> Option<(usize, f64)> {
    sweep(code, hw, &[Policy::Baseline], rounds)
        .into_iter()
        .find(|r| r.argmin)
        .and_then(|r| r.outcome.ok().map(|rep| (r.budget, rep.total_us)))
}

pub const SWEEP_HEADER: &str = "code,hardware,compiler,budget,rounds,total_us,per_round_us,shuttles,swaps,argmin,error";

pub fn sweep_csv(code: &str, hardware: &str, rounds: usize, rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let metrics = metrics(&r.outcome);
        let error = r.outcome.as_ref().err().map(|e| csv_field(e)).unwrap_or_default();
        out.push_str(&format!(
            "{code},{hardware},{},{},{rounds},{metrics},{},{error}\n",
            r.policy, r.budget, r.argmin as u8
        ));
    }
    out
}

fn metrics(outcome: &std::result::Result<LatencyReport, String>) -> String {
    match outcome {
        Ok(rep) => format!("{},{},{},{}", rep.total_us, rep.mean_round_us(), rep.shuttle_count, rep.swap_count),
        Err(_) => ",,,".to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HardwareEntry {
    Shorthand(String),
    Config(HardwareConfig),
}

impl HardwareEntry {
    pub fn config(&self) -> Result<HardwareConfig> {
        match self {
            HardwareEntry::Shorthand(s) => HardwareConfig::from_shorthand(s),
            HardwareEntry::Config(c) => Ok(c.clone()),
        }
    }
}

/// A budget as a count, `"m"`, `"sweep"` or a percentage such as `"40%"` of `m` rounded up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetToken {
    Count(usize),
    Named(String),
}

pub fn resolve_budgets(tokens: &[BudgetToken], m: usize) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::new();
    for token in tokens {
        let values = match token {
            BudgetToken::Count(b) => vec![*b],
            BudgetToken::Named(s) if s == "m" => vec![m],
            BudgetToken::Named(s) if s == "sweep" => budget_sweep(m),
            BudgetToken::Named(s) => {
                let pct: usize = s
                    .strip_suffix('%')
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| Error::Invalid(format!("bad budget {s:?}")))?;
                vec![(pct * m).div_ceil(100).max(1)]
            }
        };
        for b in values {
            if b == 0 || b > m {
                return Err(Error::Budget { budget: b, m });
            }
            if !out.contains(&b) {
                out.push(b);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub codes: Vec<String>,
    #[serde(default = "default_hardware")]
    pub hardware: Vec<HardwareEntry>,
    #[serde(default = "default_compilers")]
    pub compilers: Vec<Policy>,
    #[serde(default = "default_budgets")]
    pub budgets: Vec<BudgetToken>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
}

fn default_hardware() -> Vec<HardwareEntry> {
    vec![HardwareEntry::Shorthand("linear".into())]
}

fn default_compilers() -> Vec<Policy> {
    Policy::ALL.to_vec()
}

fn default_budgets() -> Vec<BudgetToken> {
    vec![BudgetToken::Named("sweep".into())]
}

fn default_rounds() -> usize {
    2
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("manifest: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub code: String,
    pub hardware: String,
    pub compiler: Option<Policy>,
    pub budget: Option<usize>,
    pub rounds: usize,
    pub outcome: std::result::Result<LatencyReport, String>,
    /// Baseline* latency divided by this row's latency.
    pub speedup: Option<f64>,
}

struct Instance {
    code: StabilizerCode,
    hw: Hardware,
    hw_label: String,
}

/// Runs every code x hardware x compiler x budget of the manifest. Rows keep manifest order.
pub fn run_suite(manifest: &Manifest) -> Vec<SuiteRow> {
    let rounds = manifest.rounds;
    let mut rows = Vec::new();
    let mut instances: Vec<Instance> = Vec::new();
    let mut plan: Vec<(usize, Policy, usize)> = Vec::new();
    let failed = |code: &str, hardware: String, message: String, rows: &mut Vec<SuiteRow>| {
        rows.push(SuiteRow {
            code: code.to_string(),
            hardware,
            compiler: None,
            budget: None,
            rounds,
            outcome: Err(message),
            speedup: None,
        })
    };
    // Row slots are reserved in manifest order and filled after the parallel run.
    let mut slots: Vec<std::result::Result<(usize, Policy, usize), usize>> = Vec::new();
    for spec in &manifest.codes {
        let code = match generate(spec) {
            Ok(c) => c,
            Err(e) => {
                failed(spec, String::new(), e.to_string(), &mut rows);
                slots.push(Err(rows.len() - 1));
                continue;
            }
        };
        for entry in &manifest.hardware {
            let built = entry.config().and_then(|cfg| Ok((cfg.build(code.m())?, cfg.label(code.m()))));
            let (hw, hw_label) = match built {
                Ok(x) => x,
                Err(e) => {
                    failed(spec, format!("{entry:?}"), e.to_string(), &mut rows);
                    slots.push(Err(rows.len() - 1));
                    continue;
                }
            };
            let budgets = match resolve_budgets(&manifest.budgets, code.m()) {
                Ok(b) => b,
                Err(e) => {
                    failed(spec, hw_label, e.to_string(), &mut rows);
                    slots.push(Err(rows.len() - 1));
                    continue;
                }
            };
            let idx = instances.len();
            for &p in &manifest.compilers {
                for &b in &budgets {
                    slots.push(Ok((idx, p, b)));
                }
            }
            for b in budget_sweep(code.m()) {
                plan.push((idx, Policy::Baseline, b));
            }
            instances.push(Instance {
                code: code.clone().with_label(spec.clone()),
                hw,
                hw_label,
            });
        }
    }
    for slot in slots.iter().flatten() {
        if !plan.contains(slot) {
            plan.push(*slot);
        }
    }
    let outcomes = par_map(&plan, |&(i, p, b)| {
        let inst = &instances[i];
        run(&inst.code, &inst.hw, p, b, rounds).map(|r| r.1).map_err(|e| e.to_string())
    });
    let results: BTreeMap<(usize, Policy, usize), std::result::Result<LatencyReport, String>> =
        plan.into_iter().zip(outcomes).collect();
    let star: Vec<Option<f64>> = (0..instances.len())
        .map(|i| {
            results
                .iter()
                .filter(|((j, p, _), _)| *j == i && *p == Policy::Baseline)
                .filter_map(|(_, r)| r.as_ref().ok().map(|rep| rep.total_us))
                .min_by(f64::total_cmp)
        })
        .collect();
    let mut out = Vec::with_capacity(slots.len());
    for slot in slots {
        match slot {
            Err(k) => out.push(rows[k].clone()),
            Ok(key @ (i, p, b)) => {
                let outcome = results[&key].clone();
                let speedup = match (&outcome, star[i]) {
                    (Ok(rep), Some(s)) if rep.total_us > 0.0 => Some(s / rep.total_us),
                    _ => None,
                };
                out.push(SuiteRow {
                    code: instances[i].code.label().to_string(),
                    hardware: instances[i].hw_label.clone(),
                    compiler: Some(p),
                    budget: Some(b),
                    rounds,
                    outcome,
                    speedup,
                });
            }
        }
    }
    out
}

pub const SUITE_HEADER: &str =
    "code,compiler,budget,rounds,total_us,per_round_us,shuttles,swaps,speedup_vs_baseline_star,hardware,error";

pub fn suite_csv(rows: &[SuiteRow]) -> String {
    let mut out = String::from(SUITE_HEADER);
    out.push('\n');
    for r in rows {
        let compiler = r.compiler.map(|p| p.to_string()).unwrap_or_default();
        let budget = r.budget.map(|b| b.to_string()).unwrap_or_default();
        let speedup = r.speedup.map(|s| format!("{s:.4}")).unwrap_or_default();
        let error = r.outcome.as_ref().err().map(|e| csv_field(e)).unwrap_or_default();
        out.push_str(&format!(
            "{},{compiler},{budget},{},{},{speedup},{},{error}\n",
            csv_field(&r.code),
            r.rounds,
            metrics(&r.outcome),
            csv_field(&r.hardware),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_surface_code;

    #[test]
    fn budget_tokens() {
        let t = |s: &str| BudgetToken::Named(s.into());
        assert_eq!(resolve_budgets(&[BudgetToken::Count(1), t("m")], 8).unwrap(), vec![1, 8]);
        assert_eq!(resolve_budgets(&[t("sweep")], 8).unwrap(), vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(resolve_budgets(&[t("40%"), t("m"), t("100%")], 8).unwrap(), vec![4, 8]);
        assert!(resolve_budgets(&[BudgetToken::Count(9)], 8).is_err());
        assert!(resolve_budgets(&[t("many")], 8).is_err());
    }

    #[test]
    fn manifest_defaults() {
        let m = Manifest::from_json(r#"{"codes":["surface:3"]}"#).unwrap();
        assert_eq!(m.rounds, 2);
        assert_eq!(m.compilers, Policy::ALL.to_vec());
        let m = Manifest::from_json(
            r#"{"codes":[],"hardware":["grid",{"topology":"linear","traps":4}],"budgets":[1,"m"],"compilers":["mao"]}"#,
        )
        .unwrap();
        assert_eq!(m.hardware.len(), 2);
        assert!(Manifest::from_json(r#"{"codes":[],"extra":1}"#).is_err());
    }

    #[test]
    fn empty_manifest_gives_header_only() {
        let m = Manifest::from_json(r#"{"codes":[]}"#).unwrap();
        assert_eq!(suite_csv(&run_suite(&m)), format!("{SUITE_HEADER}\n"));
    }

    #[test]
    fn bad_code_is_recorded_and_suite_continues() {
        let m = Manifest::from_json(r#"{"codes":["surface:4","repetition:3"],"budgets":[1],"compilers":["mao"]}"#).unwrap();
        let rows = run_suite(&m);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].outcome.is_err());
        assert!(rows[1].outcome.is_ok());
        let csv = suite_csv(&rows);
        assert!(csv.lines().nth(1).unwrap().starts_with("surface:4,,,2,,,,,,,"));
    }

    #[test]
    fn sweep_marks_one_argmin_per_policy() {
        let code = build_surface_code(3).unwrap();
        let hw = HardwareConfig::from_shorthand("linear").unwrap().build(code.m()).unwrap();
        let rows = sweep(&code, &hw, &[Policy::Baseline], 2);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows.iter().filter(|r| r.argmin).count(), 1);
        let csv = sweep_csv("surface:3", "linear:8x5", 2, &rows);
        assert_eq!(csv.lines().count(), 7);
    }
}
