//! Shared lowering state: tracks the mapping while gates and shuttles are emitted.

use crate::error::{Error, Result};
use crate::hardware::Hardware;
use crate::mapping::{Ion, Mapping};
use crate::placement::{self, Eviction};
use crate::schedule::{Op, Policy};
use crate::transport;

use super::circuit::GateStep;

pub(crate) struct Builder<'a> {
    pub hw: &'a Hardware,
    pub policy: Policy,
    pub mapping: Mapping,
    pub ops: Vec<Op>,
    pending: [Vec<usize>; 2],
    arrival: [Vec<u64>; 2],
    clock: u64,
}

fn slot(ion: Ion) -> (usize, usize) {
    match ion {
        Ion::Data(i) => (0, i),
        Ion::Ancilla(i) => (1, i),
    }
}

impl<'a> Builder<'a> {
    pub fn new(hw: &'a Hardware, policy: Policy, mapping: Mapping) -> Self {
        let (nd, na) = (mapping.n_data(), mapping.n_ancilla());
        Builder {
            hw,
            policy,
            mapping,
            ops: Vec::new(),
            pending: [vec![0; nd], vec![0; na]],
            arrival: [vec![0; nd], vec![0; na]],
            clock: 0,
        }
    }

    pub fn set_pending(&mut self, ion: Ion, count: usize) {
        let (k, i) = slot(ion);
        self.pending[k][i] = count;
    }

    pub fn trap_of(&self, ion: Ion) -> Result<usize> {
        self.mapping
            .trap_of(ion)
            .ok_or_else(|| Error::Invalid(format!("{ion} is not in a trap")))
    }

    pub fn cost(&self, ion: Ion, to: usize) -> f64 {
        transport::move_cost(&self.mapping, self.hw, ion, to)
    }

    /// Moves `ion` to `to`, first evicting someone other than `partner` if `to` is full.
    pub fn shuttle(&mut self, ion: Ion, to: usize, partner: Ion) -> Result<()> {
        if self.mapping.trap_of(ion) == Some(to) {
            return Ok(());
        }
        let Builder { mapping, hw, pending, arrival, policy, .. } = self;
        let priority = |x: Ion| {
            let (k, i) = slot(x);
            (pending[k][i], arrival[k][i])
        };
        let rule = Eviction {
            pin_data: policy.pins_data(),
            protected: &[partner, ion],
            priority: &priority,
        };
        let mut ops = placement::rebalance(mapping, hw, to, &rule)?;
        ops.extend(transport::shuttle(mapping, hw, ion, to)?);
        for op in &ops {
            if let Op::Merge { ion, .. } = *op {
                self.clock += 1;
                let (k, i) = slot(ion);
                self.arrival[k][i] = self.clock;
            }
        }
        self.ops.extend(ops);
        Ok(())
    }

    /// Brings a data/ancilla pair together according to the policy's mover rule.
    pub fn co_trap(&mut self, data: usize, ancilla: usize) -> Result<()> {
        let (d, a) = (Ion::Data(data), Ion::Ancilla(ancilla));
        let (td, ta) = (self.trap_of(d)?, self.trap_of(a)?);
        if td == ta {
            return Ok(());
        }
        let move_data = match self.policy {
            Policy::Baseline => self.cost(d, ta) < self.cost(a, td),
            Policy::Mao | Policy::Moveless => false,
        };
        if move_data {
            self.shuttle(d, ta, a)
        } else {
            self.shuttle(a, td, d)
        }
    }

    /// Lowers gate steps of stabilizer `stab` served by `ancilla`, co-trapping before each two-qubit gate.
    pub fn emit(&mut self, stab: usize, ancilla: usize, steps: &[GateStep]) -> Result<()> {
        for step in steps {
            let op = match *step {
                GateStep::Gate1 { target } => Op::Gate1 {
                    ion: target,
                    trap: self.trap_of(target)?,
                    stab,
                },
                GateStep::Gate2 { data } => {
                    self.co_trap(data, ancilla)?;
                    for ion in [Ion::Data(data), Ion::Ancilla(ancilla)] {
                        let (k, i) = slot(ion);
                        self.pending[k][i] = self.pending[k][i].saturating_sub(1);
                    }
                    Op::Gate2 {
                        data,
                        ancilla,
                        trap: self.trap_of(Ion::Ancilla(ancilla))?,
                        stab,
                    }
                }
                GateStep::Measure => Op::Measure {
                    ancilla,
                    trap: self.trap_of(Ion::Ancilla(ancilla))?,
                    stab,
                },
                GateStep::Reset => Op::Reset {
                    ancilla,
                    trap: self.trap_of(Ion::Ancilla(ancilla))?,
                    stab,
                },
            };
            self.ops.push(op);
        }
        Ok(())
    }

    pub fn take_ops(&mut self) -> Vec<Op> {
        std::mem::take(&mut self.ops)
    }
}

/// Order in which an ancilla starting at `start` visits the traps in `traps`:
/// repeatedly the nearest unvisited one, ties to the lower trap.
pub(crate) fn itinerary(hw: &Hardware, start: usize, traps: &[usize]) -> Vec<usize> {
    let mut left: Vec<usize> = traps.to_vec();
    left.sort_unstable();
    left.dedup();
    let mut order = Vec::with_capacity(left.len());
    let mut cur = start;
    while !left.is_empty() {
        let (k, _) = left
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| hw.hop_time(cur, a).total_cmp(&hw.hop_time(cur, b)).then(a.cmp(&b)))
            .expect("nonempty");
        cur = left.remove(k);
        order.push(cur);
    }
    order
}
