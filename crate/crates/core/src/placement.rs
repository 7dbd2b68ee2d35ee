//! Initial data/ancilla placement and eviction from overfull traps.

use std::cmp::Reverse;
use std::collections::VecDeque;

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::hardware::Hardware;
use crate::mapping::{Ion, Mapping};
use crate::schedule::Op;
use crate::transport;

/// Slots kept free in every data-bearing trap so an ancilla can always visit.
pub const RESERVE: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub data_trap: Vec<usize>,
    pub ancilla_trap: Vec<usize>,
}

impl Partition {
    pub fn data_in(&self, trap: usize) -> Vec<usize> {
        (0..self.data_trap.len()).filter(|&q| self.data_trap[q] == trap).collect()
    }

    /// Chains hold data in ascending order followed by ancillas in ascending order.
    pub fn to_mapping(&self, capacities: &[usize]) -> Result<Mapping> {
        let mut chains = vec![Vec::new(); capacities.len()];
        for (q, &t) in self.data_trap.iter().enumerate() {
            chains[t].push(Ion::Data(q));
        }
        for (a, &t) in self.ancilla_trap.iter().enumerate() {
            chains[t].push(Ion::Ancilla(a));
        }
        Mapping::from_chains(
            capacities.to_vec(),
            chains,
            self.data_trap.len(),
            self.ancilla_trap.len(),
        )
    }

    /// Sum over stabilizers of the largest number of support qubits sharing one trap.
    pub fn cohesion(&self, code: &StabilizerCode) -> usize {
        code.stabilizers()
            .iter()
            .map(|s| plurality(s.qubits(), &self.data_trap).1)
            .sum()
    }
}

/// Most common trap among `qubits` (ties to the lower trap) and its count.
fn plurality(qubits: impl Iterator<Item = usize>, data_trap: &[usize]) -> (usize, usize) {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for q in qubits {
        let t = data_trap[q];
        match counts.iter_mut().find(|(trap, _)| *trap == t) {
            Some(entry) => entry.1 += 1,
            None => counts.push((t, 1)),
        }
    }
    counts
        .into_iter()
        .min_by_key(|&(t, c)| (Reverse(c), t))
        .unwrap_or((0, 0))
}

fn bfs_order(code: &StabilizerCode) -> Vec<usize> {
    let tanner = code.tanner_graph();
    let mut seen = vec![false; code.n()];
    let mut order = Vec::with_capacity(code.n());
    for root in 0..code.n() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &s in tanner.data_neighbors(q) {
                for &r in tanner.check_neighbors(s) {
                    if !std::mem::replace(&mut seen[r], true) {
                        queue.push_back(r);
                    }
                }
            }
        }
    }
    order
}

/// Traps sorted by shuttle time from trap 0.
fn trap_order(hw: &Hardware) -> Vec<usize> {
    let mut order: Vec<usize> = (0..hw.trap_count()).collect();
    order.sort_by(|&a, &b| hw.hop_time(0, a).total_cmp(&hw.hop_time(0, b)).then(a.cmp(&b)));
    order
}

fn local_score(code: &StabilizerCode, stabs: &[usize], data_trap: &[usize]) -> usize {
    stabs
        .iter()
        .map(|&s| plurality(code.stabilizers()[s].qubits(), data_trap).1)
        .sum()
}

fn hill_climb(code: &StabilizerCode, data_trap: &mut [usize], limits: &[usize]) {
    let tanner = code.tanner_graph();
    let traps = limits.len();
    let mut load = vec![0usize; traps];
    for &t in data_trap.iter() {
        load[t] += 1;
    }
    let touched = |qs: &[usize]| {
        let mut s: Vec<usize> = qs.iter().flat_map(|&q| tanner.data_neighbors(q).iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    loop {
        let mut improved = false;
        for q in 0..data_trap.len() {
            let stabs = touched(&[q]);
            let from = data_trap[q];
            let before = local_score(code, &stabs, data_trap);
            for to in 0..traps {
                if to == from || load[to] >= limits[to] {
                    continue;
                }
                data_trap[q] = to;
                if local_score(code, &stabs, data_trap) > before {
                    load[from] -= 1;
                    load[to] += 1;
                    improved = true;
                    break;
                }
                data_trap[q] = from;
            }
        }
        for q in 0..data_trap.len() {
            for r in q + 1..data_trap.len() {
                let (tq, tr) = (data_trap[q], data_trap[r]);
                if tq == tr {
                    continue;
                }
                let stabs = touched(&[q, r]);
                let before = local_score(code, &stabs, data_trap);
                data_trap[q] = tr;
                data_trap[r] = tq;
                if local_score(code, &stabs, data_trap) > before {
                    improved = true;
                } else {
                    data_trap[q] = tq;
                    data_trap[r] = tr;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Packs data breadth-first over the Tanner graph, refines by hill climbing, then places ancillas.
///
/// Ancilla `j` starts in the trap holding most of stabilizer `j`'s support when it has room.
pub fn partition_data(code: &StabilizerCode, hw: &Hardware, budget: usize) -> Result<Partition> {
    let caps = hw.topology().capacities();
    let limits: Vec<usize> = caps.iter().map(|c| c.saturating_sub(RESERVE)).collect();
    let data_room: usize = limits.iter().sum();
    let total: usize = caps.iter().sum();
    if code.n() > data_room {
        return Err(Error::Infeasible(format!(
            "{} data qubits exceed {data_room} data slots",
            code.n()
        )));
    }
    if code.n() + budget > total {
        return Err(Error::Infeasible(format!(
            "{} data and {budget} ancilla exceed {total} slots",
            code.n()
        )));
    }
    let mut data_trap = vec![0; code.n()];
    let mut traps = trap_order(hw).into_iter();
    let mut current = traps.next().expect("topology has a trap");
    let mut used = 0;
    for q in bfs_order(code) {
        while used >= limits[current] {
            current = traps.next().expect("capacity checked");
            used = 0;
        }
        data_trap[q] = current;
        used += 1;
    }
    hill_climb(code, &mut data_trap, &limits);

    let mut room: Vec<usize> = caps.to_vec();
    for &t in &data_trap {
        room[t] -= 1;
    }
    let mut ancilla_trap = Vec::with_capacity(budget);
    for j in 0..budget {
        let home = code
            .stabilizers()
            .get(j)
            .map_or(0, |s| plurality(s.qubits(), &data_trap).0);
        let trap = if room[home] > 0 {
            home
        } else {
            (0..caps.len())
                .filter(|&t| room[t] > 0)
                .min_by(|&a, &b| hw.hop_time(home, a).total_cmp(&hw.hop_time(home, b)).then(a.cmp(&b)))
                .expect("capacity checked")
        };
        room[trap] -= 1;
        ancilla_trap.push(trap);
    }
    Ok(Partition {
        data_trap,
        ancilla_trap,
    })
}

pub fn initial_mapping(code: &StabilizerCode, hw: &Hardware, budget: usize) -> Result<Mapping> {
    partition_data(code, hw, budget)?.to_mapping(hw.topology().capacities())
}

/// How to pick an eviction victim.
pub struct Eviction<'a> {
    /// Data qubits may not be evicted.
    pub pin_data: bool,
    /// Ions that must stay, such as the partner of the gate being prepared.
    pub protected: &'a [Ion],
    /// Remaining two-qubit interactions and arrival stamp of an ion.
    pub priority: &'a dyn Fn(Ion) -> (usize, u64),
}

/// Frees one slot in `incoming` if it is full, returning the eviction's operations.
pub fn rebalance(
    mapping: &mut Mapping,
    hw: &Hardware,
    incoming: usize,
    rule: &Eviction<'_>,
) -> Result<Vec<Op>> {
    if mapping.free_slots(incoming) > 0 {
        return Ok(Vec::new());
    }
    let victim = mapping
        .chain(incoming)
        .iter()
        .copied()
        .filter(|ion| !rule.protected.contains(ion) && !(rule.pin_data && ion.is_data()))
        .min_by_key(|&ion| {
            let (pending, arrival) = (rule.priority)(ion);
            (pending, Reverse(arrival), ion)
        })
        .ok_or(Error::Saturated(incoming))?;
    let adjacent = hw
        .topology()
        .adjacent_traps(incoming)
        .into_iter()
        .filter(|&t| mapping.free_slots(t) > 0)
        .min_by_key(|&t| (mapping.occupancy(t), t));
    let target = adjacent
        .or_else(|| {
            (0..mapping.trap_count())
                .filter(|&t| t != incoming && mapping.free_slots(t) > 0)
                .min_by(|&a, &b| {
                    hw.hop_time(incoming, a)
                        .total_cmp(&hw.hop_time(incoming, b))
                        .then(a.cmp(&b))
                })
        })
        .ok_or(Error::Saturated(incoming))?;
    transport::shuttle(mapping, hw, victim, target)
}
