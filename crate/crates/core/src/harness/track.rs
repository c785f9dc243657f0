//! Tracking a simulation against a shrinking-front modulus family.
//!
//! Tracking starts at `t_offset`, which plays the role of `t′` for the
//! eventual family and of `t*/2` for the log-supercritical one. At each
//! output time `t` the empirical modulus of `θ(t)` is compared with
//! `ω(·, ξ₀(t − t_offset))`.

use serde::Serialize;

use crate::error::{argument, Error};
use crate::moduli::{field_obeys, Modulus, TimeDependentModulus, Violation};
use crate::spectral::{DiagnosticsRecord, Solver};
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct EntryCheck {
    /// `ω(0+, A₀)`.
    pub omega_zero: f64,
    /// `2C_β t_offset^{−1/β} ‖θ₀‖_{L²}`.
    pub required: f64,
    /// `omega_zero − required`; negative means refused.
    pub margin: f64,
    pub holds: bool,
    /// First radius where `θ(t_offset)` exceeds `ω(·, A₀)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackPoint {
    pub t: f64,
    pub xi0: f64,
    pub obeys: bool,
    pub worst_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Violation>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrackOutcome {
    Refused {
        reason: String,
    },
    Breakdown {
        t: f64,
        violation: Option<Violation>,
    },
    /// `reached_t1` is false when the simulation ended before `t_offset + t₁`.
    Preserved {
        through: f64,
        reached_t1: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackReport {
    pub t_offset: f64,
    pub t1: f64,
    pub a0: f64,
    pub entry: EntryCheck,
    pub outcome: TrackOutcome,
    pub points: Vec<TrackPoint>,
    /// Set when the solver blew up; the report covers the times before it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blow_up_at: Option<f64>,
    #[serde(skip)]
    pub trace: Vec<DiagnosticsRecord>,
}

impl TrackReport {
    pub fn summary(&self) -> String {
        match &self.outcome {
            TrackOutcome::Refused { reason } => format!("refused: {reason}"),
            TrackOutcome::Breakdown { t, .. } => format!("first breakdown at t = {t:.6e}"),
            TrackOutcome::Preserved {
                through,
                reached_t1: true,
            } => {
                format!("preserved through t1 (t = {through:.6e})")
            }
            TrackOutcome::Preserved { through, .. } => {
                format!(
                    "preserved through t = {through:.6e}; t_offset + t1 = {:.6e} not reached",
                    self.t_offset + self.t1
                )
            }
        }
    }
}

/// Steps `solver` from `t = 0` to its `t_end`, checking the family from `t_offset` on.
///
/// Checks happen at `t_offset`, every `output_every` steps after it, and at the end.
pub fn modulus_track(
    solver: &mut Solver<f64>,
    fam: &TimeDependentModulus<f64>,
    t_offset: f64,
    c_beta: f64,
    radii: &[f64],
) -> Result<TrackReport> {
    if solver.steps() != 0 {
        return argument("tracking needs a fresh solver");
    }
    if !(t_offset > 0.0 && c_beta > 0.0) {
        return argument("t_offset and C_beta must be positive");
    }
    let dt = solver.cfg.dt;
    let total = solver.cfg.n_steps();
    let k_off = (t_offset / dt).round() as usize;
    if (k_off as f64 * dt - t_offset).abs() > 1e-9 * t_offset.max(dt) {
        return argument("t_offset must be a multiple of dt");
    }
    if k_off > total {
        return argument("t_offset lies beyond the end of the simulation");
    }
    let beta = fam.beta;
    let top = fam.slice(fam.a0)?;
    let omega_zero = top.at_zero();
    let required = 2.0 * c_beta * t_offset.powf(-1.0 / beta) * solver.state().l2();
    let mut report = TrackReport {
        t_offset,
        t1: fam.t1(),
        a0: fam.a0,
        entry: EntryCheck {
            omega_zero,
            required,
            margin: omega_zero - required,
            holds: omega_zero > required,
            first_violation: None,
        },
        outcome: TrackOutcome::Refused {
            reason: String::new(),
        },
        points: Vec::new(),
        blow_up_at: None,
        trace: Vec::new(),
    };
    if !report.entry.holds {
        report.outcome = TrackOutcome::Refused {
            reason: format!(
                "entry condition fails: omega(0+, A0) = {omega_zero:.6e} <= {required:.6e} (deficit {:.6e})",
                required - omega_zero
            ),
        };
        return Ok(report);
    }

    let every = solver.cfg.output_every;
    let mut first_break = None;
    while solver.steps() <= total {
        let k = solver.steps();
        let due = k == k_off
            || k == total
            || (k > k_off && every > 0 && (k - k_off).is_multiple_of(every));
        if due {
            let d = solver.diagnostics(Some(radii))?;
            let emp = d.empirical.clone().expect("radii were supplied");
            let t = d.t;
            report.trace.push(d);
            let xi0 = fam.xi0_at(t - t_offset);
            let v = field_obeys(&emp, &fam.slice(xi0)?)?;
            if k == k_off && !v.obeys {
                report.entry.holds = false;
                report.entry.first_violation = v.first_violation;
                let r = v.first_violation.map_or(f64::NAN, |x| x.r);
                report.outcome = TrackOutcome::Refused {
                    reason: format!(
                        "theta(t_offset) violates omega(., A0) first at separation r = {r:.6e}"
                    ),
                };
                return Ok(report);
            }
            if !v.obeys && first_break.is_none() {
                first_break = Some((t, v.first_violation));
            }
            report.points.push(TrackPoint {
                t,
                xi0,
                obeys: v.obeys,
                worst_gap: v.worst_gap,
                first_violation: v.first_violation,
            });
        }
        if k == total {
            break;
        }
        match solver.step() {
            Ok(()) => {}
            Err(Error::BlowUp { t }) => {
                report.blow_up_at = Some(t);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let last = report.points.last().map_or(t_offset, |p| p.t);
    report.outcome = match first_break {
        Some((t, violation)) => TrackOutcome::Breakdown { t, violation },
        None if report.points.is_empty() => TrackOutcome::Refused {
            reason: "the simulation blew up before t_offset".into(),
        },
        None => TrackOutcome::Preserved {
            through: last,
            reached_t1: last - t_offset >= report.t1 * (1.0 - 1e-12),
        },
    };
    Ok(report)
}
