//! Hardware configuration files and shorthand specs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardware::{make_grid, make_linear, Hardware, TimingModel, Topology};

/// Capacity used when a spec leaves it out.
pub const DEFAULT_CAPACITY: usize = 5;
/// Slots taken by sympathetic cooling ions when they occupy chain positions.
pub const COOLING_IONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Linear,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareConfig {
    pub topology: TopologyKind,
    /// Trap count for linear machines; defaults to one trap per stabilizer.
    #[serde(default)]
    pub traps: Option<usize>,
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub cols: Option<usize>,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
    #[serde(default)]
    pub timing: TimingModel,
    #[serde(default)]
    pub cooling_ions_occupy: bool,
}

fn default_capacity() -> usize {
    DEFAULT_CAPACITY
}

/// Near-square `rows x cols` with at least `traps` cells.
pub fn grid_shape(traps: usize) -> (usize, usize) {
    let traps = traps.max(1);
    let mut rows = (traps as f64).sqrt().floor() as usize;
    while rows * rows > traps {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, traps.div_ceil(rows))
}

impl HardwareConfig {
    pub fn linear(traps: Option<usize>, capacity: usize) -> Self {
        HardwareConfig {
            topology: TopologyKind::Linear,
            traps,
            rows: None,
            cols: None,
            capacity,
            timing: TimingModel::default(),
            cooling_ions_occupy: false,
        }
    }

    pub fn grid(shape: Option<(usize, usize)>, capacity: usize) -> Self {
        HardwareConfig {
            topology: TopologyKind::Grid,
            traps: None,
            rows: shape.map(|s| s.0),
            cols: shape.map(|s| s.1),
            capacity,
            timing: TimingModel::default(),
            cooling_ions_occupy: false,
        }
    }

    /// Parses `linear`, `grid`, `linear:<traps>x<cap>` or `grid:<rows>x<cols>x<cap>`.
    pub fn from_shorthand(spec: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad hardware spec {spec:?}"));
        let (kind, dims) = match spec.split_once(':') {
            Some((k, d)) => (k, Some(d)),
            None => (spec, None),
        };
        let nums = dims
            .map(|d| d.split('x').map(|x| x.parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>>>())
            .transpose()?;
        match (kind, nums.as_deref()) {
            ("linear", None) => Ok(Self::linear(None, DEFAULT_CAPACITY)),
            ("linear", Some(&[t, c])) => Ok(Self::linear(Some(t), c)),
            ("grid", None) => Ok(Self::grid(None, DEFAULT_CAPACITY)),
            ("grid", Some(&[r, c, cap])) => Ok(Self::grid(Some((r, c)), cap)),
            _ => Err(bad()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("hardware config: {e}")))
    }

    /// Builds the machine; `m` sizes automatic shapes to one trap per stabilizer.
    pub fn build(&self, m: usize) -> Result<Hardware> {
        let topology = match self.topology {
            TopologyKind::Linear => make_linear(self.traps.unwrap_or(m.max(1)), self.capacity)?,
            TopologyKind::Grid => {
                let (rows, cols) = match (self.rows, self.cols) {
                    (Some(r), Some(c)) => (r, c),
                    (None, None) => grid_shape(self.traps.unwrap_or(m)),
                    _ => return Err(Error::Invalid("grid needs both rows and cols".into())),
                };
                make_grid(rows, cols, self.capacity)?
            }
        };
        let topology: Topology = if self.cooling_ions_occupy {
            topology.with_reserved_slots(COOLING_IONS)?
        } else {
            topology
        };
        Hardware::new(topology, self.timing.clone())
    }

    /// Short human-readable name of the machine built for `m` stabilizers.
    pub fn label(&self, m: usize) -> String {
        match self.topology {
            TopologyKind::Linear => format!("linear:{}x{}", self.traps.unwrap_or(m.max(1)), self.capacity),
            TopologyKind::Grid => {
                let (r, c) = match (self.rows, self.cols) {
                    (Some(r), Some(c)) => (r, c),
                    _ => grid_shape(self.traps.unwrap_or(m)),
                };
                format!("grid:{r}x{c}x{}", self.capacity)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::SwapMethod;

    #[test]
    fn shorthand_forms() {
        let hw = HardwareConfig::from_shorthand("linear:8x5").unwrap().build(3).unwrap();
        assert_eq!((hw.trap_count(), hw.topology().capacity(0)), (8, 5));
        let hw = HardwareConfig::from_shorthand("grid:6x10x5").unwrap().build(3).unwrap();
        assert_eq!(hw.trap_count(), 60);
        let hw = HardwareConfig::from_shorthand("linear").unwrap().build(24).unwrap();
        assert_eq!(hw.trap_count(), 24);
        assert_eq!(HardwareConfig::from_shorthand("grid").unwrap().label(24), "grid:4x6x5");
        for bad in ["ring:3x5", "linear:8", "grid:2x2", "linear:ax5"] {
            assert!(HardwareConfig::from_shorthand(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_shapes_cover_trap_count() {
        for t in 1..200 {
            let (r, c) = grid_shape(t);
            assert!(r * c >= t && r <= c && (r - 1) * c < t.max(1) + c, "{t}");
        }
        assert_eq!(grid_shape(8), (2, 4));
        assert_eq!(grid_shape(9), (3, 3));
    }

    #[test]
    fn json_config_with_overrides() {
        let cfg = HardwareConfig::from_json(
            r#"{"topology":"grid","rows":2,"cols":3,"capacity":7,
                "timing":{"measure":150,"swap_method":"IonSwap"},"cooling_ions_occupy":true}"#,
        )
        .unwrap();
        let hw = cfg.build(1).unwrap();
        assert_eq!(hw.trap_count(), 6);
        assert_eq!(hw.topology().capacity(0), 5);
        assert_eq!(hw.timing().measure, 150.0);
        assert_eq!(hw.timing().split, 80.0);
        assert_eq!(hw.timing().swap_method, SwapMethod::IonSwap);
        assert!(HardwareConfig::from_json(r#"{"topology":"linear","colour":1}"#).is_err());
        assert!(HardwareConfig::from_json(r#"{"topology":"linear","timing":{"gate2":-1}}"#)
            .unwrap()
            .build(2)
            .is_err());
    }
}
