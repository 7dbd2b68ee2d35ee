//! Gate-level syndrome extraction circuit of one stabilizer.

use crate::code::{Pauli, Stabilizer};
use crate::mapping::Ion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateStep {
    /// Basis change on `target`.
    Gate1 { target: Ion },
    Gate2 { data: usize },
    Measure,
    Reset,
}

/// Basis preparation on the ancilla before the first two-qubit gate.
pub fn prepare(stab: &Stabilizer, ancilla: usize) -> Vec<GateStep> {
    if stab.is_z_type() {
        Vec::new()
    } else {
        vec![GateStep::Gate1 { target: Ion::Ancilla(ancilla) }]
    }
}

/// The interaction with one data qubit; `Y` terms get a basis change on the data qubit.
pub fn interact(pauli: Pauli, data: usize) -> Vec<GateStep> {
    let gate = GateStep::Gate2 { data };
    match pauli {
        Pauli::Y => {
            let turn = GateStep::Gate1 { target: Ion::Data(data) };
            vec![turn, gate, turn]
        }
        Pauli::X | Pauli::Z => vec![gate],
    }
}

/// Basis change back, measurement and reset after the last two-qubit gate.
pub fn finish(stab: &Stabilizer, ancilla: usize) -> Vec<GateStep> {
    let mut steps = prepare(stab, ancilla);
    steps.extend([GateStep::Measure, GateStep::Reset]);
    steps
}

/// Full circuit with interactions in support order.
pub fn stabilizer_circuit(stab: &Stabilizer, ancilla: usize) -> Vec<GateStep> {
    let mut steps = prepare(stab, ancilla);
    for &(q, p) in &stab.support {
        steps.extend(interact(p, q));
    }
    steps.extend(finish(stab, ancilla));
    steps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stab(support: &[(usize, Pauli)]) -> Stabilizer {
        Stabilizer { id: 0, support: support.to_vec() }
    }

    fn counts(steps: &[GateStep]) -> (usize, usize, usize, usize) {
        let c = |f: fn(&GateStep) -> bool| steps.iter().filter(|s| f(s)).count();
        (
            c(|s| matches!(s, GateStep::Gate1 { .. })),
            c(|s| matches!(s, GateStep::Gate2 { .. })),
            c(|s| matches!(s, GateStep::Measure)),
            c(|s| matches!(s, GateStep::Reset)),
        )
    }

    #[test]
    fn weight_four_z_check() {
        let s = stab(&[(0, Pauli::Z), (1, Pauli::Z), (2, Pauli::Z), (3, Pauli::Z)]);
        let steps = stabilizer_circuit(&s, 0);
        assert_eq!(counts(&steps), (0, 4, 1, 1));
        assert_eq!(steps[4..], [GateStep::Measure, GateStep::Reset]);
    }

    #[test]
    fn weight_two_x_check() {
        let s = stab(&[(0, Pauli::X), (1, Pauli::X)]);
        let steps = stabilizer_circuit(&s, 3);
        assert_eq!(counts(&steps), (2, 2, 1, 1));
        assert_eq!(steps[0], GateStep::Gate1 { target: Ion::Ancilla(3) });
        assert_eq!(steps[3], GateStep::Gate1 { target: Ion::Ancilla(3) });
    }

    #[test]
    fn weight_one_check() {
        assert_eq!(counts(&stabilizer_circuit(&stab(&[(4, Pauli::Z)]), 0)), (0, 1, 1, 1));
    }

    #[test]
    fn y_terms_rotate_the_data_qubit() {
        let steps = stabilizer_circuit(&stab(&[(0, Pauli::Y), (1, Pauli::Z)]), 0);
        assert_eq!(counts(&steps), (4, 2, 1, 1));
        assert_eq!(steps[1], GateStep::Gate1 { target: Ion::Data(0) });
        assert_eq!(steps[3], GateStep::Gate1 { target: Ion::Data(0) });
    }
}
