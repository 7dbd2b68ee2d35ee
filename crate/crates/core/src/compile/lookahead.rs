//! Generic lookahead scheduler used by the baseline and MAO policies.
//!
//! Each two-qubit gate is a node; consecutive gates on the same ion are joined
//! by an edge. A ready gate scores `sum 2^-depth` over itself and everything it
//! unblocks, and the highest score runs next.

use crate::code::StabilizerCode;
use crate::error::Result;
use crate::hardware::Hardware;
use crate::mapping::{Ion, Mapping};
use crate::schedule::{Op, Policy};

use super::builder::{itinerary, Builder};
use super::circuit;

struct Node {
    stab: usize,
    data: usize,
}

/// Support of each stabilizer ordered trap by trap along the ancilla's itinerary.
fn gate_orders(code: &StabilizerCode, hw: &Hardware, mapping: &Mapping, budget: usize) -> Vec<Vec<usize>> {
    let mut position: Vec<usize> = (0..budget)
        .map(|a| mapping.trap_of(Ion::Ancilla(a)).expect("ancilla placed"))
        .collect();
    let mut orders = Vec::with_capacity(code.m());
    for stab in code.stabilizers() {
        let a = stab.id % budget;
        let trap_of = |q: usize| mapping.trap_of(Ion::Data(q)).expect("data placed");
        let traps: Vec<usize> = stab.qubits().map(trap_of).collect();
        let route = itinerary(hw, position[a], &traps);
        let mut order: Vec<usize> = stab.qubits().collect();
        order.sort_by_key(|&q| (route.iter().position(|&t| t == trap_of(q)), q));
        if let Some(&last) = route.last() {
            position[a] = last;
        }
        orders.push(order);
    }
    orders
}

pub(crate) fn compile_round(
    code: &StabilizerCode,
    hw: &Hardware,
    policy: Policy,
    budget: usize,
    mapping: Mapping,
) -> Result<(Vec<Op>, Mapping)> {
    let orders = gate_orders(code, hw, &mapping, budget);
    let mut nodes = Vec::new();
    for (s, order) in orders.iter().enumerate() {
        for &q in order {
            nodes.push(Node { stab: s, data: q });
        }
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut indeg = vec![0usize; nodes.len()];
    let mut last_data: Vec<Option<usize>> = vec![None; code.n()];
    let mut last_anc: Vec<Option<usize>> = vec![None; budget];
    for (i, node) in nodes.iter().enumerate() {
        for prev in [last_data[node.data], last_anc[node.stab % budget]].into_iter().flatten() {
            succ[prev].push(i);
            indeg[i] += 1;
        }
        last_data[node.data] = Some(i);
        last_anc[node.stab % budget] = Some(i);
    }
    let score: Vec<f64> = (0..nodes.len()).map(|i| lookahead_weight(&succ, i)).collect();

    let mut b = Builder::new(hw, policy, mapping);
    for q in 0..code.n() {
        b.set_pending(Ion::Data(q), code.tanner_graph().data_neighbors(q).len());
    }
    for a in 0..budget {
        let gates = (a..code.m()).step_by(budget).map(|s| code.stabilizer(s).weight()).sum();
        b.set_pending(Ion::Ancilla(a), gates);
    }
    let mut left = vec![0usize; code.m()];
    for node in &nodes {
        left[node.stab] += 1;
    }
    let mut done = vec![false; nodes.len()];
    let mut ready: Vec<usize> = (0..nodes.len()).filter(|&i| indeg[i] == 0).collect();
    while !ready.is_empty() {
        let (k, &i) = ready
            .iter()
            .enumerate()
            .max_by(|(_, &x), (_, &y)| {
                score[x]
                    .total_cmp(&score[y])
                    .then(nodes[y].stab.cmp(&nodes[x].stab))
                    .then(y.cmp(&x))
            })
            .expect("nonempty");
        ready.swap_remove(k);
        let Node { stab, data } = nodes[i];
        let s = code.stabilizer(stab);
        let a = stab % budget;
        if left[stab] == s.weight() {
            b.co_trap(data, a)?;
            b.emit(stab, a, &circuit::prepare(s, a))?;
        }
        let pauli = s.pauli_on(data).expect("data in support");
        b.emit(stab, a, &circuit::interact(pauli, data))?;
        done[i] = true;
        left[stab] -= 1;
        if left[stab] == 0 {
            b.emit(stab, a, &circuit::finish(s, a))?;
        }
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(j);
            }
        }
    }
    debug_assert!(done.iter().all(|&d| d));
    let ops = b.take_ops();
    Ok((ops, b.mapping))
}

/// `sum 2^-depth` over the node and all its descendants, each at its shallowest depth.
fn lookahead_weight(succ: &[Vec<usize>], root: usize) -> f64 {
    let mut depth = vec![usize::MAX; succ.len()];
    depth[root] = 0;
    let mut frontier = vec![root];
    let mut total = 1.0;
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in &succ[v] {
                if depth[w] == usize::MAX {
                    depth[w] = d;
                    total += 0.5f64.powi(d as i32);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    total
}
