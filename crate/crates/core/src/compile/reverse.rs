//! Round reversal: replays the movement of a round backwards so the mapping returns to its start.

use std::collections::BTreeMap;

use crate::mapping::Ion;
use crate::schedule::Op;

/// Ancilla-side operations of one stabilizer, split around its two-qubit gates.
#[derive(Default)]
struct Wrapping {
    before: Vec<Op>,
    after: Vec<Op>,
    seen_gate: bool,
}

fn is_ancilla_local(op: &Op) -> bool {
    matches!(
        op,
        Op::Gate1 { ion: Ion::Ancilla(_), .. } | Op::Measure { .. } | Op::Reset { .. }
    )
}

fn retarget(op: Op, trap: usize) -> Op {
    match op {
        Op::Gate1 { ion, stab, .. } => Op::Gate1 { ion, trap, stab },
        Op::Measure { ancilla, stab, .. } => Op::Measure { ancilla, trap, stab },
        Op::Reset { ancilla, stab, .. } => Op::Reset { ancilla, trap, stab },
        other => other,
    }
}

/// Inverts every transport in reverse order and runs each stabilizer's gates backwards.
/// Cooling follows each inverted merge, as in a forward round.
///
/// Ancilla preparation is re-emitted just before the stabilizer's first two-qubit
/// gate in the new order, and the measurement block just after its last one.
pub fn reverse_round(ops: &[Op]) -> Vec<Op> {
    let mut wraps: BTreeMap<usize, Wrapping> = BTreeMap::new();
    for op in ops {
        match *op {
            Op::Gate2 { stab, .. } => wraps.entry(stab).or_default().seen_gate = true,
            _ if is_ancilla_local(op) => {
                let stab = op.stabilizer().expect("gate op has a stabilizer");
                let w = wraps.entry(stab).or_default();
                if w.seen_gate {
                    w.after.push(*op);
                } else {
                    w.before.push(*op);
                }
            }
            _ => {}
        }
    }
    let mut body = Vec::with_capacity(ops.len());
    for op in ops.iter().rev() {
        match op.inverse() {
            Op::Cool { .. } => {}
            _ if is_ancilla_local(op) => {}
            Op::Merge { ion, trap } => {
                body.push(Op::Merge { ion, trap });
                body.push(Op::Cool { ion, trap });
            }
            inv => body.push(inv),
        }
    }
    let mut last_gate: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, op) in body.iter().enumerate() {
        if let Op::Gate2 { stab, .. } = *op {
            last_gate.insert(stab, i);
        }
    }
    let mut out = Vec::with_capacity(ops.len());
    let mut started = vec![];
    for (i, op) in body.iter().enumerate() {
        if let Op::Gate2 { stab, trap, .. } = *op {
            if !started.contains(&stab) {
                started.push(stab);
                out.extend(wraps[&stab].before.iter().map(|&o| retarget(o, trap)));
            }
            out.push(*op);
            if last_gate[&stab] == i {
                out.extend(wraps[&stab].after.iter().map(|&o| retarget(o, trap)));
            }
        } else {
            out.push(*op);
        }
    }
    out
}
