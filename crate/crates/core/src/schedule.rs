//! Atomic operations, rounds and the schedule text format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::Hardware;
use crate::mapping::{parse_trap_line, Ion, Mapping};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Baseline,
    Mao,
    Moveless,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Baseline, Policy::Mao, Policy::Moveless];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Baseline => "baseline",
            Policy::Mao => "mao",
            Policy::Moveless => "moveless",
        }
    }

    /// Whether data qubits are pinned to their initial traps.
    pub fn pins_data(self) -> bool {
        !matches!(self, Policy::Baseline)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Policy::Baseline),
            "mao" => Ok(Policy::Mao),
            "moveless" => Ok(Policy::Moveless),
            _ => Err(Error::Invalid(format!("unknown compiler {s:?}"))),
        }
    }
}

/// Hardware resource an operation holds for its duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resource {
    Trap(usize),
    Segment(usize),
    Junction(usize),
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Trap(t) => write!(f, "t{t}"),
            Resource::Segment(s) => write!(f, "s{s}"),
            Resource::Junction(j) => write!(f, "j{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Split { ion: Ion, trap: usize },
    Move { ion: Ion, segment: usize, from: usize, to: usize },
    Cross { ion: Ion, junction: usize },
    Merge { ion: Ion, trap: usize },
    Swap { trap: usize, a: Ion, b: Ion },
    Gate1 { ion: Ion, trap: usize, stab: usize },
    Gate2 { data: usize, ancilla: usize, trap: usize, stab: usize },
    Measure { ancilla: usize, trap: usize, stab: usize },
    Reset { ancilla: usize, trap: usize, stab: usize },
    Cool { ion: Ion, trap: usize },
}

impl Op {
    pub fn ions(&self) -> Vec<Ion> {
        match *self {
            Op::Split { ion, .. }
            | Op::Move { ion, .. }
            | Op::Cross { ion, .. }
            | Op::Merge { ion, .. }
            | Op::Gate1 { ion, .. }
            | Op::Cool { ion, .. } => vec![ion],
            Op::Swap { a, b, .. } => vec![a, b],
            Op::Gate2 { data, ancilla, .. } => vec![Ion::Data(data), Ion::Ancilla(ancilla)],
            Op::Measure { ancilla, .. } | Op::Reset { ancilla, .. } => vec![Ion::Ancilla(ancilla)],
        }
    }

    pub fn resource(&self) -> Resource {
        match *self {
            Op::Move { segment, .. } => Resource::Segment(segment),
            Op::Cross { junction, .. } => Resource::Junction(junction),
            Op::Split { trap, .. }
            | Op::Merge { trap, .. }
            | Op::Swap { trap, .. }
            | Op::Gate1 { trap, .. }
            | Op::Gate2 { trap, .. }
            | Op::Measure { trap, .. }
            | Op::Reset { trap, .. }
            | Op::Cool { trap, .. } => Resource::Trap(trap),
        }
    }

    /// Duration on the given hardware; `chain_len` is the chain length seen by a swap.
    pub fn duration(&self, hw: &Hardware, chain_len: usize) -> f64 {
        let timing = hw.timing();
        match *self {
            Op::Split { .. } => timing.split,
            Op::Merge { .. } => timing.merge,
            Op::Move { .. } => timing.move_per_segment,
            Op::Cross { junction, .. } => hw
                .topology()
                .junction_kind(junction)
                .map_or(0.0, |k| timing.junction(k)),
            Op::Swap { .. } => hw.swap_time(chain_len),
            Op::Gate1 { .. } => timing.gate1,
            Op::Gate2 { trap, .. } => timing.gate2_time(hw.topology().capacity(trap)),
            Op::Measure { .. } => timing.measure,
            Op::Reset { .. } => 0.0,
            Op::Cool { .. } => timing.cool,
        }
    }

    /// The operation that undoes this one's effect on the mapping.
    pub fn inverse(&self) -> Op {
        match *self {
            Op::Split { ion, trap } => Op::Merge { ion, trap },
            Op::Merge { ion, trap } => Op::Split { ion, trap },
            Op::Move { ion, segment, from, to } => Op::Move {
                ion,
                segment,
                from: to,
                to: from,
            },
            other => other,
        }
    }

    pub fn stabilizer(&self) -> Option<usize> {
        match *self {
            Op::Gate1 { stab, .. }
            | Op::Gate2 { stab, .. }
            | Op::Measure { stab, .. }
            | Op::Reset { stab, .. } => Some(stab),
            _ => None,
        }
    }

    pub fn is_transport(&self) -> bool {
        matches!(self, Op::Split { .. } | Op::Move { .. } | Op::Cross { .. } | Op::Merge { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Op::Split { .. } => "split",
            Op::Move { .. } => "move",
            Op::Cross { .. } => "cross",
            Op::Merge { .. } => "merge",
            Op::Swap { .. } => "swap",
            Op::Gate1 { .. } => "gate1",
            Op::Gate2 { .. } => "gate2",
            Op::Measure { .. } => "measure",
            Op::Reset { .. } => "reset",
            Op::Cool { .. } => "cool",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name();
        match *self {
            Op::Split { ion, trap } | Op::Merge { ion, trap } | Op::Cool { ion, trap } => {
                write!(f, "{name} {ion} t{trap}")
            }
            Op::Move { ion, segment, from, to } => write!(f, "{name} {ion} s{segment} {from}>{to}"),
            Op::Cross { ion, junction } => write!(f, "{name} {ion} j{junction}"),
            Op::Swap { trap, a, b } => write!(f, "{name} {a},{b} t{trap}"),
            Op::Gate1 { ion, trap, stab } => write!(f, "{name} {ion} t{trap} s{stab}"),
            Op::Gate2 { data, ancilla, trap, stab } => write!(f, "{name} d{data},a{ancilla} t{trap} s{stab}"),
            Op::Measure { ancilla, trap, stab } | Op::Reset { ancilla, trap, stab } => {
                write!(f, "{name} a{ancilla} t{trap} s{stab}")
            }
        }
    }
}

fn prefixed(word: &str, prefix: char) -> Result<usize> {
    word.strip_prefix(prefix)
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| Error::Invalid(format!("expected {prefix}<index>, got {word:?}")))
}

fn ancilla_index(ion: Ion) -> Result<usize> {
    match ion {
        Ion::Ancilla(i) => Ok(i),
        Ion::Data(_) => Err(Error::Invalid(format!("{ion} is not an ancilla"))),
    }
}

impl FromStr for Op {
    type Err = Error;

    /// Accepts an optional leading `@<time>` field, which is ignored.
    fn from_str(line: &str) -> Result<Self> {
        let mut words: Vec<&str> = line.split_whitespace().collect();
        if words.first().is_some_and(|w| w.starts_with('@')) {
            words.remove(0);
        }
        let bad = || Error::Invalid(format!("bad operation {line:?}"));
        let ions = |w: &str| -> Result<Vec<Ion>> { w.split(',').map(str::parse).collect() };
        let one = |w: &str| -> Result<Ion> {
            match ions(w)?.as_slice() {
                [ion] => Ok(*ion),
                _ => Err(bad()),
            }
        };
        let op = match words.as_slice() {
            ["split", ion, t] => Op::Split { ion: one(ion)?, trap: prefixed(t, 't')? },
            ["merge", ion, t] => Op::Merge { ion: one(ion)?, trap: prefixed(t, 't')? },
            ["cool", ion, t] => Op::Cool { ion: one(ion)?, trap: prefixed(t, 't')? },
            ["move", ion, s, hop] => {
                let (from, to) = hop.split_once('>').ok_or_else(bad)?;
                Op::Move {
                    ion: one(ion)?,
                    segment: prefixed(s, 's')?,
                    from: from.parse().map_err(|_| bad())?,
                    to: to.parse().map_err(|_| bad())?,
                }
            }
            ["cross", ion, j] => Op::Cross { ion: one(ion)?, junction: prefixed(j, 'j')? },
            ["swap", pair, t] => match ions(pair)?.as_slice() {
                [a, b] => Op::Swap { trap: prefixed(t, 't')?, a: *a, b: *b },
                _ => return Err(bad()),
            },
            ["gate1", ion, t, s] => Op::Gate1 {
                ion: one(ion)?,
                trap: prefixed(t, 't')?,
                stab: prefixed(s, 's')?,
            },
            ["gate2", pair, t, s] => match ions(pair)?.as_slice() {
                [Ion::Data(d), Ion::Ancilla(a)] => Op::Gate2 {
                    data: *d,
                    ancilla: *a,
                    trap: prefixed(t, 't')?,
                    stab: prefixed(s, 's')?,
                },
                _ => return Err(bad()),
            },
            ["measure", a, t, s] => Op::Measure {
                ancilla: ancilla_index(one(a)?)?,
                trap: prefixed(t, 't')?,
                stab: prefixed(s, 's')?,
            },
            ["reset", a, t, s] => Op::Reset {
                ancilla: ancilla_index(one(a)?)?,
                trap: prefixed(t, 't')?,
                stab: prefixed(s, 's')?,
            },
            _ => return Err(bad()),
        };
        Ok(op)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub ops: Vec<Op>,
    /// Produced by reversing the previous round.
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub policy: Policy,
    pub n_data: usize,
    pub n_ancilla: usize,
    pub initial: Mapping,
    pub rounds: Vec<Round>,
}

impl Schedule {
    pub fn ops(&self) -> impl Iterator<Item = &Op> {
        self.rounds.iter().flat_map(|r| r.ops.iter())
    }

    pub fn shuttle_count(&self) -> usize {
        self.ops().filter(|op| matches!(op, Op::Split { .. })).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "schedule {} data {} ancilla {}\n",
            self.policy, self.n_data, self.n_ancilla
        );
        out.push_str(&self.initial.to_text());
        for (k, round) in self.rounds.iter().enumerate() {
            let dir = if round.reversed { "reverse" } else { "forward" };
            out.push_str(&format!("round {k} {dir}\n"));
            for op in &round.ops {
                out.push_str(&op.to_string());
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let at = |line: usize, e: Error| Error::Syntax {
            line,
            column: 1,
            message: e.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| Error::Invalid("empty schedule".into()))?;
        let words: Vec<&str> = header.split_whitespace().collect();
        let ["schedule", policy, "data", nd, "ancilla", na] = words.as_slice() else {
            return Err(at(hline, Error::Invalid("expected schedule header".into())));
        };
        let policy: Policy = policy.parse().map_err(|e| at(hline, e))?;
        let parse_count = |w: &str| w.parse::<usize>().map_err(|_| at(hline, Error::Invalid(format!("bad count {w:?}"))));
        let (n_data, n_ancilla) = (parse_count(nd)?, parse_count(na)?);

        let mut capacities = Vec::new();
        let mut chains = Vec::new();
        let mut rounds: Vec<Round> = Vec::new();
        for (lno, line) in lines {
            if line.starts_with("trap ") && rounds.is_empty() {
                let ((t, c), chain) = parse_trap_line(line).map_err(|e| at(lno, e))?;
                if t != capacities.len() {
                    return Err(at(lno, Error::Invalid(format!("expected trap {}", capacities.len()))));
                }
                capacities.push(c);
                chains.push(chain);
            } else if let Some(rest) = line.strip_prefix("round ") {
                let words: Vec<&str> = rest.split_whitespace().collect();
                let reversed = match words.as_slice() {
                    [k, dir] if k.parse::<usize>().ok() == Some(rounds.len()) => match *dir {
                        "forward" => false,
                        "reverse" => true,
                        _ => return Err(at(lno, Error::Invalid(format!("bad direction {dir:?}")))),
                    },
                    _ => return Err(at(lno, Error::Invalid(format!("expected round {}", rounds.len())))),
                };
                rounds.push(Round { ops: Vec::new(), reversed });
            } else {
                let op: Op = line.parse().map_err(|e| at(lno, e))?;
                rounds
                    .last_mut()
                    .ok_or_else(|| at(lno, Error::Invalid("operation before first round".into())))?
                    .ops
                    .push(op);
            }
        }
        let initial = Mapping::from_chains(capacities, chains, n_data, n_ancilla)?;
        Ok(Schedule {
            policy,
            n_data,
            n_ancilla,
            initial,
            rounds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ion() -> impl Strategy<Value = Ion> {
        prop_oneof![(0..50usize).prop_map(Ion::Data), (0..50usize).prop_map(Ion::Ancilla)]
    }

    fn op() -> impl Strategy<Value = Op> {
        let n = 0..100usize;
        prop_oneof![
            (ion(), n.clone()).prop_map(|(ion, trap)| Op::Split { ion, trap }),
            (ion(), n.clone()).prop_map(|(ion, trap)| Op::Merge { ion, trap }),
            (ion(), n.clone()).prop_map(|(ion, trap)| Op::Cool { ion, trap }),
            (ion(), n.clone(), n.clone(), n.clone())
                .prop_map(|(ion, segment, from, to)| Op::Move { ion, segment, from, to }),
            (ion(), n.clone()).prop_map(|(ion, junction)| Op::Cross { ion, junction }),
            (n.clone(), ion(), ion()).prop_map(|(trap, a, b)| Op::Swap { trap, a, b }),
            (ion(), n.clone(), n.clone()).prop_map(|(ion, trap, stab)| Op::Gate1 { ion, trap, stab }),
            (n.clone(), n.clone(), n.clone(), n.clone())
                .prop_map(|(data, ancilla, trap, stab)| Op::Gate2 { data, ancilla, trap, stab }),
            (n.clone(), n.clone(), n.clone()).prop_map(|(ancilla, trap, stab)| Op::Measure { ancilla, trap, stab }),
            (n.clone(), n.clone(), n).prop_map(|(ancilla, trap, stab)| Op::Reset { ancilla, trap, stab }),
        ]
    }

    proptest! {
        #[test]
        fn op_text_round_trip(op in op()) {
            prop_assert_eq!(op.to_string().parse::<Op>().unwrap(), op);
        }

        #[test]
        fn inverse_is_involution(op in op()) {
            prop_assert_eq!(op.inverse().inverse(), op);
        }
    }

    #[test]
    fn timestamps_are_ignored() {
        let op: Op = "@120.5 gate2 d3,a0 t1 s2".parse().unwrap();
        assert_eq!(op, Op::Gate2 { data: 3, ancilla: 0, trap: 1, stab: 2 });
        assert!("gate2 a0,d3 t1 s2".parse::<Op>().is_err());
        assert!("measure d0 t1 s2".parse::<Op>().is_err());
    }

    #[test]
    fn schedule_text_round_trip() {
        let initial = Mapping::from_chains(
            vec![4, 4],
            vec![vec![Ion::Data(0), Ion::Ancilla(0)], vec![Ion::Data(1)]],
            2,
            1,
        )
        .unwrap();
        let forward = vec![
            Op::Gate2 { data: 0, ancilla: 0, trap: 0, stab: 0 },
            Op::Split { ion: Ion::Ancilla(0), trap: 0 },
            Op::Move { ion: Ion::Ancilla(0), segment: 0, from: 0, to: 1 },
            Op::Merge { ion: Ion::Ancilla(0), trap: 1 },
            Op::Cool { ion: Ion::Ancilla(0), trap: 1 },
            Op::Gate2 { data: 1, ancilla: 0, trap: 1, stab: 0 },
            Op::Measure { ancilla: 0, trap: 1, stab: 0 },
            Op::Reset { ancilla: 0, trap: 1, stab: 0 },
        ];
        let s = Schedule {
            policy: Policy::Mao,
            n_data: 2,
            n_ancilla: 1,
            initial,
            rounds: vec![
                Round { ops: forward.clone(), reversed: false },
                Round { ops: forward, reversed: true },
            ],
        };
        let text = s.to_text();
        assert!(text.starts_with("schedule mao data 2 ancilla 1\ntrap 0 capacity 4: d0 a0\n"));
        assert_eq!(Schedule::parse(&text).unwrap(), s);
        assert_eq!(s.shuttle_count(), 2);
    }

    #[test]
    fn parse_reports_line() {
        let err = Schedule::parse("schedule mao data 1 ancilla 1\ntrap 0 capacity 3: d0 a0\nround 0 forward\nfly a0\n")
            .unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 4, .. }));
    }
}
