//! Lowering of a trap-to-trap shuttle into atomic operations.

use crate::error::{Error, Result};
use crate::hardware::Hardware;
use crate::mapping::{Ion, Mapping};
use crate::schedule::Op;

/// Projected time to bring `ion` to `to`, including a swap to the chain end if needed.
pub fn move_cost(mapping: &Mapping, hw: &Hardware, ion: Ion, to: usize) -> f64 {
    let Some(from) = mapping.trap_of(ion) else {
        return f64::INFINITY;
    };
    if from == to {
        return 0.0;
    }
    let swap = if mapping.is_tail(ion) {
        0.0
    } else {
        hw.swap_time(mapping.occupancy(from))
    };
    swap + hw.hop_time(from, to)
}

/// Emits swap-to-end, split, moves, junction crossings, merge and cooling, updating `mapping`.
pub fn shuttle(mapping: &mut Mapping, hw: &Hardware, ion: Ion, to: usize) -> Result<Vec<Op>> {
    let from = mapping
        .trap_of(ion)
        .ok_or_else(|| Error::Invalid(format!("{ion} is not in a trap")))?;
    if from == to {
        return Ok(Vec::new());
    }
    if mapping.free_slots(to) == 0 {
        return Err(Error::Invalid(format!("trap {to} is full")));
    }
    let mut ops = Vec::new();
    let tail = mapping.tail(from).expect("source chain holds the ion");
    if tail != ion {
        mapping.swap(from, ion, tail)?;
        ops.push(Op::Swap { trap: from, a: ion, b: tail });
    }
    mapping.split_tail(from, ion)?;
    ops.push(Op::Split { ion, trap: from });
    let route = hw.route(from, to);
    for (k, &segment) in route.segments.iter().enumerate() {
        let (a, b) = (route.nodes[k], route.nodes[k + 1]);
        ops.push(Op::Move { ion, segment, from: a, to: b });
        if !hw.topology().is_trap(b) {
            ops.push(Op::Cross { ion, junction: b });
        }
    }
    mapping.insert(ion, to)?;
    ops.push(Op::Merge { ion, trap: to });
    ops.push(Op::Cool { ion, trap: to });
    Ok(ops)
}
