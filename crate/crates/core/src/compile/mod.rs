//! Compilation of syndrome extraction rounds into atomic QCCD operations.

mod builder;
pub mod circuit;
mod lookahead;
pub mod moveless;
pub mod reverse;

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::hardware::Hardware;
use crate::mapping::Mapping;
use crate::placement;
use crate::schedule::{Policy, Round, Schedule};

pub use circuit::{stabilizer_circuit, GateStep};
pub use moveless::{movement_score, MovementScore, MovelessOptions};
pub use reverse::reverse_round;

/// Distinct budgets `1, ceil(0.2m), ceil(0.4m), ceil(0.6m), ceil(0.8m), m`.
pub fn budget_sweep(m: usize) -> Vec<usize> {
    let mut budgets: Vec<usize> = [0, 2, 4, 6, 8, 10]
        .iter()
        .map(|&tenths| (tenths * m).div_ceil(10).max(1))
        .collect();
    budgets.dedup();
    budgets
}

pub fn compile(
    code: &StabilizerCode,
    hw: &Hardware,
    policy: Policy,
    budget: usize,
    rounds: usize,
) -> Result<Schedule> {
    check_budget(code, budget)?;
    let initial = placement::initial_mapping(code, hw, budget)?;
    compile_from(code, hw, policy, rounds, initial, MovelessOptions::default())
}

pub fn compile_baseline(code: &StabilizerCode, hw: &Hardware, budget: usize, rounds: usize) -> Result<Schedule> {
    compile(code, hw, Policy::Baseline, budget, rounds)
}

pub fn compile_mao(code: &StabilizerCode, hw: &Hardware, budget: usize, rounds: usize) -> Result<Schedule> {
    compile(code, hw, Policy::Mao, budget, rounds)
}

pub fn compile_moveless(code: &StabilizerCode, hw: &Hardware, budget: usize, rounds: usize) -> Result<Schedule> {
    compile(code, hw, Policy::Moveless, budget, rounds)
}

fn check_budget(code: &StabilizerCode, budget: usize) -> Result<()> {
    if budget == 0 || budget > code.m() {
        return Err(Error::Budget { budget, m: code.m() });
    }
    Ok(())
}

/// Compiles from an explicit initial mapping; the ancilla budget is the mapping's ancilla count.
pub fn compile_from(
    code: &StabilizerCode,
    hw: &Hardware,
    policy: Policy,
    rounds: usize,
    initial: Mapping,
    options: MovelessOptions,
) -> Result<Schedule> {
    let budget = initial.n_ancilla();
    check_budget(code, budget)?;
    if rounds == 0 {
        return Err(Error::NoRounds);
    }
    if initial.n_data() != code.n() || initial.trap_count() != hw.trap_count() {
        return Err(Error::Invalid("initial mapping does not match code and hardware".into()));
    }
    let mut out = Vec::with_capacity(rounds);
    match policy {
        Policy::Baseline | Policy::Mao => {
            let (forward, _) = lookahead::compile_round(code, hw, policy, budget, initial.clone())?;
            let backward = reverse_round(&forward);
            for k in 0..rounds {
                let reversed = k % 2 == 1;
                let ops = if reversed { backward.clone() } else { forward.clone() };
                out.push(Round { ops, reversed });
            }
        }
        Policy::Moveless => {
            let mut mapping = initial.clone();
            for _ in 0..rounds {
                let (ops, next) = moveless::compile_round(code, hw, budget, options, mapping)?;
                mapping = next;
                out.push(Round { ops, reversed: false });
            }
        }
    }
    Ok(Schedule {
        policy,
        n_data: code.n(),
        n_ancilla: budget,
        initial,
        rounds: out,
    })
}
