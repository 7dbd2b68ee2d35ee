//! Discrete-event execution of schedules, latency reports and schedule verification.
//!
//! Operations are taken in schedule order. Each starts once its ions have finished
//! their previous operation and its resource (trap gate slot, segment or junction)
//! is free. A round starts when the previous round has fully finished.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::hardware::{Hardware, TimingModel};
use crate::mapping::{Ion, Mapping};
use crate::schedule::{Op, Resource, Schedule};

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub round: usize,
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub op: Op,
}

impl Event {
    /// `start_us end_us op ions resource`
    pub fn to_line(&self) -> String {
        format!("{} {} {}", self.start, self.end, self.op)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub total_us: f64,
    /// Latency of each round in microseconds.
    pub rounds: Vec<f64>,
    /// Split/merge pairs.
    #[serde(rename = "shuttles")]
    pub shuttle_count: usize,
    #[serde(rename = "swaps")]
    pub swap_count: usize,
    #[serde(rename = "cools")]
    pub cooling_count: usize,
    pub trap_busy_us: Vec<f64>,
    /// Final mapping in the `trap <t> capacity <c>: ions` text form.
    pub final_mapping: String,
}

impl LatencyReport {
    pub fn mean_round_us(&self) -> f64 {
        if self.rounds.is_empty() {
            0.0
        } else {
            self.total_us / self.rounds.len() as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub round: usize,
    pub index: usize,
    pub time_us: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Result of running a schedule: timing, events and the mapping after every round.
#[derive(Debug, Clone)]
pub struct Trace {
    pub report: LatencyReport,
    pub events: Vec<Event>,
    pub round_mappings: Vec<Mapping>,
}

struct Machine<'a> {
    hw: &'a Hardware,
    mapping: Mapping,
    transit: HashMap<Ion, usize>,
    ion_ready: HashMap<Ion, f64>,
    resource_free: HashMap<Resource, f64>,
}

impl Machine<'_> {
    fn in_trap(&self, ion: Ion, trap: usize) -> std::result::Result<(), String> {
        if trap >= self.mapping.trap_count() {
            return Err(format!("trap {trap} does not exist"));
        }
        if !self.mapping.contains(ion) {
            return Err(format!("unknown ion {ion}"));
        }
        match self.mapping.trap_of(ion) {
            Some(t) if t == trap => Ok(()),
            Some(t) => Err(format!("{ion} is in trap {t}, not trap {trap}")),
            None => Err(format!("{ion} is in transit")),
        }
    }

    /// Checks and applies the state change of one operation.
    fn apply(&mut self, op: &Op) -> std::result::Result<(), String> {
        let topo = self.hw.topology();
        match *op {
            Op::Split { ion, trap } => {
                self.in_trap(ion, trap)?;
                self.mapping.split_tail(trap, ion).map_err(|e| e.to_string())?;
                self.transit.insert(ion, trap);
            }
            Op::Move { ion, segment, from, to } => {
                let at = self.transit.get(&ion).copied().ok_or(format!("{ion} is not in transit"))?;
                if at != from {
                    return Err(format!("{ion} is at node {at}, not {from}"));
                }
                let seg = topo.segments().get(segment).ok_or(format!("segment {segment} does not exist"))?;
                if !((seg.a == from && seg.b == to) || (seg.a == to && seg.b == from)) {
                    return Err(format!("segment {segment} does not join {from} and {to}"));
                }
                self.transit.insert(ion, to);
            }
            Op::Cross { ion, junction } => {
                if topo.junction_kind(junction).is_none() {
                    return Err(format!("node {junction} is not a junction"));
                }
                if self.transit.get(&ion) != Some(&junction) {
                    return Err(format!("{ion} is not at junction {junction}"));
                }
            }
            Op::Merge { ion, trap } => {
                if self.transit.get(&ion) != Some(&trap) {
                    return Err(format!("{ion} has not reached trap {trap}"));
                }
                if self.mapping.free_slots(trap) == 0 {
                    return Err(format!("capacity of trap {trap} exceeded"));
                }
                self.transit.remove(&ion);
                self.mapping.insert(ion, trap).map_err(|e| e.to_string())?;
            }
            Op::Swap { trap, a, b } => {
                self.in_trap(a, trap)?;
                self.in_trap(b, trap)?;
                self.mapping.swap(trap, a, b).map_err(|e| e.to_string())?;
            }
            Op::Gate2 { data, ancilla, trap, .. } => {
                let (d, a) = (Ion::Data(data), Ion::Ancilla(ancilla));
                let (td, ta) = (self.mapping.trap_of(d), self.mapping.trap_of(a));
                if td.is_some() && ta.is_some() && td != ta {
                    return Err(format!("{d} and {a} not co-trapped"));
                }
                self.in_trap(d, trap)?;
                self.in_trap(a, trap)?;
            }
            Op::Gate1 { ion, trap, .. } | Op::Cool { ion, trap } => self.in_trap(ion, trap)?,
            Op::Measure { ancilla, trap, .. } | Op::Reset { ancilla, trap, .. } => {
                self.in_trap(Ion::Ancilla(ancilla), trap)?
            }
        }
        Ok(())
    }
}

/// Runs the schedule; `check` sees each operation before it is applied.
fn run(
    schedule: &Schedule,
    hw: &Hardware,
    mut check: impl FnMut(usize, usize, f64, &Op, &Mapping),
) -> std::result::Result<Trace, Violation> {
    if schedule.initial.trap_count() != hw.trap_count() {
        return Err(Violation {
            round: 0,
            index: 0,
            time_us: 0.0,
            message: format!(
                "schedule has {} traps, hardware has {}",
                schedule.initial.trap_count(),
                hw.trap_count()
            ),
        });
    }
    let mut m = Machine {
        hw,
        mapping: schedule.initial.clone(),
        transit: HashMap::new(),
        ion_ready: HashMap::new(),
        resource_free: HashMap::new(),
    };
    let mut events = Vec::new();
    let mut rounds = Vec::new();
    let mut round_mappings = Vec::new();
    let mut busy = vec![0.0; hw.trap_count()];
    let (mut shuttles, mut swaps, mut cools) = (0, 0, 0);
    let mut round_start = 0.0f64;
    for (r, round) in schedule.rounds.iter().enumerate() {
        let mut round_end = round_start;
        for (i, op) in round.ops.iter().enumerate() {
            let resource = op.resource();
            let ions = op.ions();
            let mut start = round_start;
            for ion in &ions {
                start = start.max(m.ion_ready.get(ion).copied().unwrap_or(0.0));
            }
            start = start.max(m.resource_free.get(&resource).copied().unwrap_or(0.0));
            let chain_len = match *op {
                Op::Swap { trap, .. } if trap < m.mapping.trap_count() => m.mapping.occupancy(trap),
                _ => 0,
            };
            check(r, i, start, op, &m.mapping);
            m.apply(op).map_err(|message| Violation {
                round: r,
                index: i,
                time_us: start,
                message,
            })?;
            let end = start + op.duration(hw, chain_len);
            for ion in ions {
                m.ion_ready.insert(ion, end);
            }
            m.resource_free.insert(resource, end);
            if let Resource::Trap(t) = resource {
                busy[t] += end - start;
            }
            match op {
                Op::Split { .. } => shuttles += 1,
                Op::Swap { .. } => swaps += 1,
                Op::Cool { .. } => cools += 1,
                _ => {}
            }
            round_end = round_end.max(end);
            events.push(Event {
                round: r,
                index: i,
                start,
                end,
                op: *op,
            });
        }
        if let Some((&ion, _)) = m.transit.iter().min() {
            return Err(Violation {
                round: r,
                index: round.ops.len(),
                time_us: round_end,
                message: format!("{ion} still in transit at round end"),
            });
        }
        rounds.push(round_end - round_start);
        round_mappings.push(m.mapping.clone());
        round_start = round_end;
    }
    let report = LatencyReport {
        total_us: rounds.iter().sum(),
        rounds,
        shuttle_count: shuttles,
        swap_count: swaps,
        cooling_count: cools,
        trap_busy_us: busy,
        final_mapping: m.mapping.to_text(),
    };
    Ok(Trace {
        report,
        events,
        round_mappings,
    })
}

pub fn simulate_trace(schedule: &Schedule, hw: &Hardware) -> Result<Trace> {
    run(schedule, hw, |_, _, _, _, _| {}).map_err(|v| Error::InvalidOp {
        round: v.round,
        index: v.index,
        message: v.message,
    })
}

pub fn simulate(schedule: &Schedule, hw: &Hardware) -> Result<LatencyReport> {
    simulate_trace(schedule, hw).map(|t| t.report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum AncillaState {
    Fresh,
    Active(usize),
    Measured(usize),
}

/// Checks co-trapping, capacity, one measurement per stabilizer per round,
/// reset before ancilla reuse, and pinned data for MAO and Moveless.
pub fn verify(schedule: &Schedule, code: &StabilizerCode, hw: &Hardware) -> VerifyReport {
    let mut violations = Vec::new();
    if schedule.n_data != code.n() {
        violations.push(Violation {
            round: 0,
            index: 0,
            time_us: 0.0,
            message: format!("schedule has {} data qubits, code has {}", schedule.n_data, code.n()),
        });
        return VerifyReport { violations };
    }
    let pins_data = schedule.policy.pins_data();
    let mut state = vec![AncillaState::Fresh; schedule.n_ancilla];
    let mut gates: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut measured = vec![0usize; code.m()];
    let mut current_round = 0;
    let end_of_round = |round: usize, time: f64, measured: &mut Vec<usize>, gates: &mut BTreeMap<(usize, usize), usize>, out: &mut Vec<Violation>| {
        for (s, count) in measured.iter().enumerate() {
            if *count == 0 {
                out.push(Violation { round, index: usize::MAX, time_us: time, message: format!("stabilizer {s} unmeasured") });
            }
        }
        measured.iter_mut().for_each(|c| *c = 0);
        gates.clear();
    };
    let mut last_time = 0.0;
    let result = run(schedule, hw, |r, i, t, op, _| {
        if r != current_round {
            end_of_round(current_round, last_time, &mut measured, &mut gates, &mut violations);
            current_round = r;
        }
        last_time = t;
        let mut flag = |message: String| violations.push(Violation { round: r, index: i, time_us: t, message });
        if pins_data && op.is_transport() && op.ions().iter().any(|ion| ion.is_data()) {
            flag(format!("{} policy moves data: {op}", schedule.policy));
        }
        if let Some(s) = op.stabilizer() {
            if s >= code.m() {
                flag(format!("unknown stabilizer {s}"));
                return;
            }
        }
        let ancilla_use = match *op {
            Op::Gate2 { ancilla, stab, .. } | Op::Measure { ancilla, stab, .. } => Some((ancilla, stab)),
            Op::Gate1 { ion: Ion::Ancilla(ancilla), stab, .. } => Some((ancilla, stab)),
            _ => None,
        };
        if let Some((a, s)) = ancilla_use {
            match state.get(a).copied() {
                None => flag(format!("unknown ancilla a{a}")),
                Some(AncillaState::Fresh) => state[a] = AncillaState::Active(s),
                Some(AncillaState::Active(p)) if p == s => {}
                Some(AncillaState::Active(p)) | Some(AncillaState::Measured(p)) => {
                    flag(format!("a{a} reused for stabilizer {s} without reset after stabilizer {p}"))
                }
            }
        }
        match *op {
            Op::Gate2 { data, stab, .. } => {
                if code.stabilizer(stab).pauli_on(data).is_none() {
                    flag(format!("d{data} is not in the support of stabilizer {stab}"));
                }
                let n = gates.entry((stab, data)).or_insert(0);
                *n += 1;
                if *n > 1 {
                    flag(format!("gate d{data} of stabilizer {stab} repeated"));
                }
            }
            Op::Measure { ancilla, stab, .. } => {
                measured[stab] += 1;
                if measured[stab] > 1 {
                    flag(format!("stabilizer {stab} measured more than once"));
                }
                let missing = code.stabilizer(stab).qubits().filter(|&q| !gates.contains_key(&(stab, q))).count();
                if missing > 0 {
                    flag(format!("stabilizer {stab} measured with {missing} gates missing"));
                }
                if let Some(st) = state.get_mut(ancilla) {
                    *st = AncillaState::Measured(stab);
                }
            }
            Op::Reset { ancilla, .. } => {
                if let Some(st) = state.get_mut(ancilla) {
                    *st = AncillaState::Fresh;
                }
            }
            _ => {}
        }
    });
    match result {
        Ok(trace) => {
            if !schedule.rounds.is_empty() {
                end_of_round(current_round, trace.report.total_us, &mut measured, &mut gates, &mut violations);
            }
        }
        Err(v) => violations.push(v),
    }
    violations.sort_by_key(|v| (v.round, v.index));
    VerifyReport { violations }
}

/// `w * gate2 + 2 * gate1 + measure` for the largest stabilizer weight `w`.
pub fn theoretical_min_latency(code: &StabilizerCode, timing: &TimingModel) -> f64 {
    code.max_weight() as f64 * timing.gate2 + 2.0 * timing.gate1 + timing.measure
}
