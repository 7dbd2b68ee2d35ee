//! Moveless policy: pinned data, dynamic stabilizer/ancilla pairing and gate reordering.

use std::collections::BTreeSet;

use crate::code::{Stabilizer, StabilizerCode};
use crate::error::Result;
use crate::hardware::Hardware;
use crate::mapping::{Ion, Mapping};
use crate::schedule::{Op, Policy};
use crate::transport;

use super::builder::{itinerary, Builder};
use super::circuit;

/// Switches for the two reordering features; disabling both gives the static order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MovelessOptions {
    pub reorder_stabilizers: bool,
    pub reorder_gates: bool,
}

impl Default for MovelessOptions {
    fn default() -> Self {
        MovelessOptions {
            reorder_stabilizers: true,
            reorder_gates: true,
        }
    }
}

impl MovelessOptions {
    pub const STATIC: MovelessOptions = MovelessOptions {
        reorder_stabilizers: false,
        reorder_gates: false,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovementScore {
    pub stabilizer: usize,
    pub ancilla: usize,
    pub score: f64,
}

/// Projected shuttle time for `ancilla` to visit every trap holding `stab`'s support,
/// nearest unvisited trap first.
pub fn movement_score(stab: &Stabilizer, ancilla: usize, mapping: &Mapping, hw: &Hardware) -> MovementScore {
    let ion = Ion::Ancilla(ancilla);
    let start = mapping.trap_of(ion).expect("ancilla placed");
    let traps: Vec<usize> = stab
        .qubits()
        .map(|q| mapping.trap_of(Ion::Data(q)).expect("data placed"))
        .collect();
    let mut score = 0.0;
    let mut cur = start;
    for t in itinerary(hw, start, &traps) {
        score += if cur == start {
            transport::move_cost(mapping, hw, ion, t)
        } else {
            hw.hop_time(cur, t)
        };
        cur = t;
    }
    MovementScore {
        stabilizer: stab.id,
        ancilla,
        score,
    }
}

pub(crate) fn compile_round(
    code: &StabilizerCode,
    hw: &Hardware,
    budget: usize,
    options: MovelessOptions,
    mapping: Mapping,
) -> Result<(Vec<Op>, Mapping)> {
    let mut b = Builder::new(hw, Policy::Moveless, mapping);
    for q in 0..code.n() {
        b.set_pending(Ion::Data(q), code.tanner_graph().data_neighbors(q).len());
    }
    let mut remaining: BTreeSet<usize> = (0..code.m()).collect();
    while let Some(&first) = remaining.first() {
        let (s, a) = if options.reorder_stabilizers {
            let best = remaining
                .iter()
                .flat_map(|&s| (0..budget).map(move |a| (s, a)))
                .map(|(s, a)| movement_score(code.stabilizer(s), a, &b.mapping, hw))
                .min_by(|x, y| {
                    x.score
                        .total_cmp(&y.score)
                        .then(x.stabilizer.cmp(&y.stabilizer))
                        .then(x.ancilla.cmp(&y.ancilla))
                })
                .expect("nonempty");
            (best.stabilizer, best.ancilla)
        } else {
            (first, first % budget)
        };
        remaining.remove(&s);
        let stab = code.stabilizer(s);
        b.set_pending(Ion::Ancilla(a), stab.weight());
        let mut left: Vec<usize> = stab.qubits().collect();
        let mut started = false;
        while !left.is_empty() {
            let k = if options.reorder_gates {
                let here = b.trap_of(Ion::Ancilla(a))?;
                let cost = |q: usize| {
                    let t = b.mapping.trap_of(Ion::Data(q)).expect("data placed");
                    hw.hop_time(here, t)
                };
                (0..left.len())
                    .min_by(|&x, &y| cost(left[x]).total_cmp(&cost(left[y])).then(left[x].cmp(&left[y])))
                    .expect("nonempty")
            } else {
                0
            };
            let q = left.remove(k);
            if !started {
                b.co_trap(q, a)?;
                b.emit(s, a, &circuit::prepare(stab, a))?;
                started = true;
            }
            b.emit(s, a, &circuit::interact(stab.pauli_on(q).expect("in support"), q))?;
        }
        b.emit(s, a, &circuit::finish(stab, a))?;
    }
    let ops = b.take_ops();
    Ok((ops, b.mapping))
}
