//! Exhaustive grid search over the protection radius R_p and the shared
//! fraction ω_s for the weighted-sum ADR, subject to per-class ADR floors.

use std::cmp::Ordering;

use crate::analytic::{ws_adr, AdrReport, OperatingPoint};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::Scenario;
use crate::simulator::{estimate_adr_grid, SimulationSettings};

/// Largest grid the optimizer accepts, to keep runaway flag values from
/// exhausting memory.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// R_p values, m.
    pub protection_radii: Vec<f64>,
    pub shared_fractions: Vec<f64>,
}

impl Default for SweepGrid {
    /// R_p = 0, 1, …, 20 km and ω_s = 0, 0.05, …, 1.
    fn default() -> Self {
        SweepGrid {
            protection_radii: (0..=20).map(|k| k as f64 * 1e3).collect(),
            shared_fractions: (0..=20).map(|k| k as f64 / 20.0).collect(),
        }
    }
}

impl SweepGrid {
    pub fn new(protection_radii: Vec<f64>, shared_fractions: Vec<f64>) -> Result<Self> {
        if protection_radii.is_empty() || shared_fractions.is_empty() {
            return Err(Error::InvalidArgument("sweep grid axes must be non-empty".into()));
        }
        if let Some(r) = protection_radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "protection radius must be finite and >= 0, got {r}"
            )));
        }
        if let Some(w) = shared_fractions.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidArgument(format!(
                "shared fraction must lie in [0, 1], got {w}"
            )));
        }
        for (name, axis) in [("protection radii", &protection_radii), ("shared fractions", &shared_fractions)] {
            if axis.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidArgument(format!("{name} must be strictly increasing")));
            }
        }
        if protection_radii.len().saturating_mul(shared_fractions.len()) > MAX_GRID_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid has more than {MAX_GRID_POINTS} points"
            )));
        }
        Ok(SweepGrid {
            protection_radii,
            shared_fractions,
        })
    }

    /// start, start+step, … up to stop inclusive (with a small allowance for
    /// rounding in the step count).
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
            return Err(Error::InvalidArgument(format!(
                "range {start}:{step}:{stop} needs finite values, step > 0 and stop >= start"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor();
        if n >= MAX_GRID_POINTS as f64 {
            return Err(Error::InvalidArgument(format!(
                "range {start}:{step}:{stop} has more than {MAX_GRID_POINTS} points"
            )));
        }
        // k/20 is the nearest double to 0.05·k; k·0.05 often is not.
        let per_unit = (1.0 / step).round();
        let divide = per_unit >= 1.0 && (1.0 / step - per_unit).abs() <= 1e-9 * per_unit;
        Ok((0..=n as usize)
            .map(|k| {
                if divide {
                    start + k as f64 / per_unit
                } else {
                    start + k as f64 * step
                }
            })
            .collect())
    }

    pub fn len(&self) -> usize {
        self.protection_radii.len() * self.shared_fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Operating points in R_p-major order.
    pub fn points(&self) -> Vec<OperatingPoint> {
        self.protection_radii
            .iter()
            .flat_map(|&rp| {
                self.shared_fractions.iter().map(move |&w| OperatingPoint {
                    protection_radius: rp,
                    shared_fraction: w,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    Simulated(SimulationSettings),
}

fn at_point(err: Error, p: OperatingPoint) -> Error {
    Error::GridPoint {
        rp_m: p.protection_radius,
        omega_s: p.shared_fraction,
        source: Box::new(err),
    }
}

/// ADR report at one operating point; other scenario fields are kept.
pub fn evaluate_point(sc: &Scenario, p: OperatingPoint, engine: &Engine) -> Result<AdrReport> {
    let cell = sc.with_operating_point(p.protection_radius, p.shared_fraction)?;
    match engine {
        Engine::Analytic => ws_adr(&cell),
        Engine::Simulated(s) => Ok(crate::simulator::estimate_adr_report(&cell, s)?.report),
    }
    .map_err(|e| at_point(e, p))
}

/// Reports for every grid point, R_p-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub reports: Vec<AdrReport>,
}

/// Evaluates the whole grid. The analytic engine parallelises over cells;
/// the simulator draws each scene once for all cells and parallelises over
/// trials.
pub fn sweep(sc: &Scenario, grid: &SweepGrid, engine: &Engine, exec: Execution) -> Result<SweepResult> {
    let points = grid.points();
    let reports = match engine {
        Engine::Analytic => exec
            .map_slice(&points, |&p| evaluate_point(sc, p, engine))
            .into_iter()
            .collect::<Result<Vec<_>>>()?,
        Engine::Simulated(s) => {
            estimate_adr_grid(sc, &grid.protection_radii, &grid.shared_fractions, &SimulationSettings { exec, ..*s })?
                .into_iter()
                .map(|e| e.report)
                .collect()
        }
    };
    Ok(SweepResult {
        grid: grid.clone(),
        reports,
    })
}

/// Total order used to pick the optimum: larger ws ADR first, then smaller
/// R_p, then smaller ω_s.
fn preference(a: &AdrReport, b: &AdrReport) -> Ordering {
    b.ws_adr
        .total_cmp(&a.ws_adr)
        .then(a.operating_point.protection_radius.total_cmp(&b.operating_point.protection_radius))
        .then(a.operating_point.shared_fraction.total_cmp(&b.operating_point.shared_fraction))
}

/// Index of the preferred feasible report, or `None` if none is feasible.
/// Independent of the order of `reports`.
pub fn best_index(reports: &[AdrReport]) -> Option<usize> {
    reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.feasible())
        .min_by(|a, b| preference(a.1, b.1))
        .map(|(i, _)| i)
}

/// Feasible reports with ws ADR ≥ (1 − rel_tol)·best, in preference order.
pub fn near_optimal(reports: &[AdrReport], rel_tol: f64) -> Vec<AdrReport> {
    let Some(b) = best_index(reports) else {
        return Vec::new();
    };
    let floor = reports[b].ws_adr - rel_tol * reports[b].ws_adr.abs();
    let mut set: Vec<AdrReport> = reports
        .iter()
        .filter(|r| r.feasible() && r.ws_adr >= floor)
        .copied()
        .collect();
    set.sort_by(preference);
    set
}

/// Result of a constrained grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub best: AdrReport,
    /// Feasible points whose ws ADR equals the best exactly.
    pub ties: Vec<OperatingPoint>,
    /// Feasible points within the relative tolerance of the best.
    pub near_optimal: Vec<OperatingPoint>,
    pub feasible_points: usize,
}

impl SweepResult {
    pub fn infeasible_count(&self) -> usize {
        self.reports.iter().filter(|r| !r.feasible()).count()
    }

    pub fn optimum(&self, near_tol: f64) -> Option<Optimum> {
        let b = best_index(&self.reports)?;
        let best = self.reports[b];
        let ties = near_optimal(&self.reports, 0.0)
            .into_iter()
            .filter(|r| r.ws_adr == best.ws_adr)
            .map(|r| r.operating_point)
            .collect();
        Some(Optimum {
            best,
            ties,
            near_optimal: near_optimal(&self.reports, near_tol)
                .into_iter()
                .map(|r| r.operating_point)
                .collect(),
            feasible_points: self.reports.iter().filter(|r| r.feasible()).count(),
        })
    }
}
