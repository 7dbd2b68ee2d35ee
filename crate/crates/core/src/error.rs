use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid code distance {0}: {1}")]
    InvalidDistance(usize, &'static str),

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("stabilizers {0} and {1} anticommute")]
    Anticommuting(usize, usize),

    #[error("stabilizer {stabilizer} references qubit {qubit}, but the code has {n} data qubits")]
    QubitOutOfRange {
        stabilizer: usize,
        qubit: usize,
        n: usize,
    },

    #[error("stabilizer {stabilizer} lists qubit {qubit} more than once")]
    DuplicateQubit { stabilizer: usize, qubit: usize },

    #[error("stabilizer {0} has empty support")]
    EmptyStabilizer(usize),

    #[error("a code needs at least one data qubit and one stabilizer")]
    EmptyCode,

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("invalid timing model: {0}")]
    Timing(String),

    #[error("trap {to} is unreachable from trap {from}")]
    Unreachable { from: usize, to: usize },

    #[error("placement infeasible: {0}")]
    Infeasible(String),

    #[error("machine saturated: no trap can absorb an ion evicted from trap {0}")]
    Saturated(usize),

    #[error("ancilla budget {budget} outside [1, {m}]")]
    Budget { budget: usize, m: usize },

    #[error("round count must be at least 1")]
    NoRounds,

    #[error("invalid schedule operation at round {round}, op {index}: {message}")]
    InvalidOp {
        round: usize,
        index: usize,
        message: String,
    },

    #[error("invalid physical error rate {0}")]
    ErrorRate(f64),

    #[error("unphysical coherence times: T2 = {t2} s exceeds 2*T1 = {} s", 2.0 * .t1)]
    Coherence { t1: f64, t2: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}
