//! Syndrome-extraction compilation and simulation for trapped-ion QCCD machines.

pub mod code;
pub mod compile;
pub mod config;
pub mod error;
pub mod experiment;
pub mod hardware;
pub mod mapping;
pub mod noise;
pub mod placement;
pub mod schedule;
pub mod sim;
pub mod transport;

pub use code::{Pauli, Stabilizer, StabilizerCode, TannerGraph};
pub use error::{Error, Result};
pub use hardware::{Hardware, JunctionKind, ShuttlePath, SwapMethod, TimingModel, Topology};
pub use mapping::{Ion, Mapping};
pub use noise::{coherence_from_p, error_budget, pta_channel, ErrorBudget, PauliChannel};
pub use schedule::{Op, Policy, Round, Schedule};
