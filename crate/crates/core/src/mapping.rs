//! Ion-to-trap mapping with ordered chains.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ion {
    Data(usize),
    Ancilla(usize),
}

impl Ion {
    pub fn is_data(self) -> bool {
        matches!(self, Ion::Data(_))
    }

    pub fn index(self) -> usize {
        match self {
            Ion::Data(i) | Ion::Ancilla(i) => i,
        }
    }
}

impl fmt::Display for Ion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ion::Data(i) => write!(f, "d{i}"),
            Ion::Ancilla(i) => write!(f, "a{i}"),
        }
    }
}

impl FromStr for Ion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad ion name {s:?}"));
        let (kind, rest) = s.split_at_checked(1).ok_or_else(bad)?;
        let idx: usize = rest.parse().map_err(|_| bad())?;
        match kind {
            "d" => Ok(Ion::Data(idx)),
            "a" => Ok(Ion::Ancilla(idx)),
            _ => Err(bad()),
        }
    }
}

/// Where every ion sits. `None` means in transit between traps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mapping {
    capacities: Vec<usize>,
    chains: Vec<Vec<Ion>>,
    data: Vec<Option<usize>>,
    ancilla: Vec<Option<usize>>,
}

impl Mapping {
    pub fn new(capacities: Vec<usize>, n_data: usize, n_ancilla: usize) -> Self {
        Mapping {
            chains: vec![Vec::new(); capacities.len()],
            capacities,
            data: vec![None; n_data],
            ancilla: vec![None; n_ancilla],
        }
    }

    /// Builds a mapping from explicit chains, checking capacity and that every ion appears once.
    pub fn from_chains(
        capacities: Vec<usize>,
        chains: Vec<Vec<Ion>>,
        n_data: usize,
        n_ancilla: usize,
    ) -> Result<Self> {
        if chains.len() != capacities.len() {
            return Err(Error::Invalid(format!(
                "{} chains for {} traps",
                chains.len(),
                capacities.len()
            )));
        }
        let mut m = Mapping::new(capacities, n_data, n_ancilla);
        for (trap, chain) in chains.into_iter().enumerate() {
            for ion in chain {
                m.insert(ion, trap)?;
            }
        }
        if let Some(i) = m.data.iter().position(Option::is_none) {
            return Err(Error::Invalid(format!("data qubit d{i} is not placed")));
        }
        if let Some(i) = m.ancilla.iter().position(Option::is_none) {
            return Err(Error::Invalid(format!("ancilla a{i} is not placed")));
        }
        Ok(m)
    }

    fn slot(&mut self, ion: Ion) -> Result<&mut Option<usize>> {
        let slot = match ion {
            Ion::Data(i) => self.data.get_mut(i),
            Ion::Ancilla(i) => self.ancilla.get_mut(i),
        };
        slot.ok_or_else(|| Error::Invalid(format!("unknown ion {ion}")))
    }

    /// Appends an ion that is currently nowhere to the tail of a trap's chain.
    pub fn insert(&mut self, ion: Ion, trap: usize) -> Result<()> {
        if trap >= self.chains.len() {
            return Err(Error::Invalid(format!("trap {trap} does not exist")));
        }
        if self.chains[trap].len() >= self.capacities[trap] {
            return Err(Error::Invalid(format!("trap {trap} is full")));
        }
        let slot = self.slot(ion)?;
        if let Some(t) = *slot {
            return Err(Error::Invalid(format!("{ion} is already in trap {t}")));
        }
        *slot = Some(trap);
        self.chains[trap].push(ion);
        Ok(())
    }

    /// Removes the tail ion of a trap, leaving it in transit.
    pub fn split_tail(&mut self, trap: usize, ion: Ion) -> Result<()> {
        match self.chains.get(trap).and_then(|c| c.last()) {
            Some(&tail) if tail == ion => {}
            _ => return Err(Error::Invalid(format!("{ion} is not at the end of trap {trap}"))),
        }
        self.chains[trap].pop();
        *self.slot(ion)? = None;
        Ok(())
    }

    /// Exchanges the chain positions of two ions in the same trap.
    pub fn swap(&mut self, trap: usize, a: Ion, b: Ion) -> Result<()> {
        let chain = self
            .chains
            .get_mut(trap)
            .ok_or_else(|| Error::Invalid(format!("trap {trap} does not exist")))?;
        let pa = chain.iter().position(|&x| x == a);
        let pb = chain.iter().position(|&x| x == b);
        match (pa, pb) {
            (Some(i), Some(j)) if i != j => {
                chain.swap(i, j);
                Ok(())
            }
            _ => Err(Error::Invalid(format!("{a} and {b} are not both in trap {trap}"))),
        }
    }

    pub fn trap_of(&self, ion: Ion) -> Option<usize> {
        match ion {
            Ion::Data(i) => self.data.get(i).copied().flatten(),
            Ion::Ancilla(i) => self.ancilla.get(i).copied().flatten(),
        }
    }

    pub fn contains(&self, ion: Ion) -> bool {
        match ion {
            Ion::Data(i) => i < self.data.len(),
            Ion::Ancilla(i) => i < self.ancilla.len(),
        }
    }

    pub fn chain(&self, trap: usize) -> &[Ion] {
        &self.chains[trap]
    }

    pub fn tail(&self, trap: usize) -> Option<Ion> {
        self.chains[trap].last().copied()
    }

    pub fn is_tail(&self, ion: Ion) -> bool {
        self.trap_of(ion).and_then(|t| self.tail(t)) == Some(ion)
    }

    pub fn occupancy(&self, trap: usize) -> usize {
        self.chains[trap].len()
    }

    pub fn capacity(&self, trap: usize) -> usize {
        self.capacities[trap]
    }

    pub fn free_slots(&self, trap: usize) -> usize {
        self.capacities[trap] - self.chains[trap].len()
    }

    pub fn trap_count(&self) -> usize {
        self.chains.len()
    }

    pub fn n_data(&self) -> usize {
        self.data.len()
    }

    pub fn n_ancilla(&self) -> usize {
        self.ancilla.len()
    }

    /// Trap of every data qubit; `usize::MAX` marks a qubit in transit.
    pub fn data_traps(&self) -> Vec<usize> {
        self.data.iter().map(|t| t.unwrap_or(usize::MAX)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, chain) in self.chains.iter().enumerate() {
            out.push_str(&format!("trap {t} capacity {}:", self.capacities[t]));
            for ion in chain {
                out.push_str(&format!(" {ion}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text produced by [`Mapping::to_text`]. Ion counts are inferred.
    pub fn parse(text: &str) -> Result<Self> {
        let mut capacities = Vec::new();
        let mut chains = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (trap, chain) = parse_trap_line(line)?;
            if trap.0 != capacities.len() {
                return Err(Error::Invalid(format!("expected trap {}, got {line:?}", capacities.len())));
            }
            capacities.push(trap.1);
            chains.push(chain);
        }
        let count = |data: bool| {
            chains
                .iter()
                .flatten()
                .filter(|i: &&Ion| i.is_data() == data)
                .map(|i| i.index() + 1)
                .max()
                .unwrap_or(0)
        };
        let (n_data, n_ancilla) = (count(true), count(false));
        Mapping::from_chains(capacities, chains, n_data, n_ancilla)
    }
}

pub(crate) fn parse_trap_line(line: &str) -> Result<((usize, usize), Vec<Ion>)> {
    let bad = || Error::Invalid(format!("bad trap line {line:?}"));
    let (head, ions) = line.split_once(':').ok_or_else(bad)?;
    let words: Vec<&str> = head.split_whitespace().collect();
    let [ "trap", t, "capacity", c ] = words.as_slice() else {
        return Err(bad());
    };
    let t = t.parse().map_err(|_| bad())?;
    let c = c.parse().map_err(|_| bad())?;
    let chain = ions
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<Vec<Ion>>>()?;
    Ok(((t, c), chain))
}
