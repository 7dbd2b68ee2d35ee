//! Circuit-level error rates and Pauli-twirled idle channels derived from round latency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::LatencyReport;

/// Shortest and longest coherence time the fit is allowed to return, in seconds.
pub const COHERENCE_BOUNDS: (f64, f64) = (10.0, 100.0);

/// T1 = T2 from a log-linear fit through (1e-3, 10 s) and (1e-4, 100 s), clamped to the bounds.
pub fn coherence_from_p(p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ErrorRate(p));
    }
    let t = (0.01 / p).clamp(COHERENCE_BOUNDS.0, COHERENCE_BOUNDS.1);
    Ok((t, t))
}

/// Per-qubit Pauli probabilities of an idle period.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliChannel {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliChannel {
    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }
}

/// Twirled amplitude damping plus dephasing after idling `t` seconds.
pub fn pta_channel(t: f64, t1: f64, t2: f64) -> Result<PauliChannel> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Invalid(format!("idle time {t} s")));
    }
    if !(t1 > 0.0 && t2 > 0.0) || t2 > 2.0 * t1 {
        return Err(Error::Coherence { t1, t2 });
    }
    let damp = -(-t / t1).exp_m1();
    let dephase = -(-t / t2).exp_m1();
    Ok(PauliChannel {
        px: damp / 4.0,
        py: damp / 4.0,
        pz: dephase / 2.0 - damp / 4.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundChannel {
    pub round: usize,
    pub latency_us: f64,
    pub idle: PauliChannel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub p: f64,
    pub rate_1q: f64,
    pub rate_2q: f64,
    pub rate_meas: f64,
    pub t1: f64,
    pub t2: f64,
    /// Mean round latency the idle channel is evaluated at.
    pub round_us: f64,
    pub idle: PauliChannel,
    /// One entry per round, present only when round latencies differ.
    pub per_round: Vec<RoundChannel>,
}

pub fn error_budget(report: &LatencyReport, p: f64) -> Result<ErrorBudget> {
    let (t1, t2) = coherence_from_p(p)?;
    error_budget_with(report, p, t1, t2)
}

/// Like [`error_budget`] with explicit coherence times in seconds.
pub fn error_budget_with(report: &LatencyReport, p: f64, t1: f64, t2: f64) -> Result<ErrorBudget> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ErrorRate(p));
    }
    let round_us = report.mean_round_us();
    let idle = pta_channel(round_us * 1e-6, t1, t2)?;
    let uniform = report.rounds.windows(2).all(|w| w[0] == w[1]);
    let per_round = if uniform {
        Vec::new()
    } else {
        report
            .rounds
            .iter()
            .enumerate()
            .map(|(round, &latency_us)| {
                Ok(RoundChannel {
                    round,
                    latency_us,
                    idle: pta_channel(latency_us * 1e-6, t1, t2)?,
                })
            })
            .collect::<Result<_>>()?
    };
    Ok(ErrorBudget {
        p,
        rate_1q: 0.1 * p,
        rate_2q: p,
        rate_meas: p,
        t1,
        t2,
        round_us,
        idle,
        per_round,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rounds: &[f64]) -> LatencyReport {
        LatencyReport {
            total_us: rounds.iter().sum(),
            rounds: rounds.to_vec(),
            shuttle_count: 0,
            swap_count: 0,
            cooling_count: 0,
            trap_busy_us: vec![],
            final_mapping: String::new(),
        }
    }

    #[test]
    fn coherence_anchors() {
        assert_eq!(coherence_from_p(1e-3).unwrap(), (10.0, 10.0));
        assert_eq!(coherence_from_p(1e-4).unwrap(), (100.0, 100.0));
        let (t, _) = coherence_from_p(10f64.powf(-3.5)).unwrap();
        assert!((t - 10f64.powf(1.5)).abs() < 1e-9);
        assert_eq!(coherence_from_p(0.5).unwrap().0, 10.0);
        assert_eq!(coherence_from_p(1e-9).unwrap().0, 100.0);
        for bad in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(coherence_from_p(bad).is_err());
        }
    }

    #[test]
    fn closed_form_points() {
        assert_eq!(pta_channel(0.0, 10.0, 10.0).unwrap(), PauliChannel::default());
        let c = pta_channel(10.0 * 2f64.ln(), 10.0, 10.0).unwrap();
        for v in [c.px, c.py, c.pz] {
            assert!((v - 0.125).abs() < 1e-12);
        }
        let c = pta_channel(1e6, 10.0, 10.0).unwrap();
        assert!((c.px - 0.25).abs() < 1e-12 && (c.pz - 0.25).abs() < 1e-12);
        assert!(pta_channel(1.0, 1.0, 2.5).is_err());
        assert!(pta_channel(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn ten_millisecond_round() {
        let b = error_budget(&report(&[10_000.0]), 1e-3).unwrap();
        let x: f64 = 1e-3;
        let series = x / 4.0 - x * x / 8.0;
        assert!((b.idle.px - series).abs() < 1e-10);
        assert!((b.idle.pz - series).abs() < 1e-10);
        assert!((b.idle.px - 2.4988e-4).abs() < 1e-7);
        assert_eq!((b.rate_1q, b.rate_2q, b.rate_meas), (1e-4, 1e-3, 1e-3));
        assert!(b.per_round.is_empty());
    }

    #[test]
    fn per_round_entries_when_uneven() {
        let b = error_budget(&report(&[1000.0, 3000.0]), 1e-4).unwrap();
        assert_eq!(b.round_us, 2000.0);
        assert_eq!(b.per_round.len(), 2);
        assert!(b.per_round[0].idle.px < b.per_round[1].idle.px);
        let zero = error_budget(&report(&[0.0]), 1e-3).unwrap();
        assert_eq!(zero.idle, PauliChannel::default());
        assert_eq!(zero.rate_2q, 1e-3);
    }
}
