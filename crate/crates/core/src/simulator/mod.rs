//! Monte Carlo engine: samples network realizations around a typical user
//! and estimates coverage, area data rates and the protection-zone void
//! probability.
//!
//! Trial `t` always draws from its own ChaCha stream (see [`trial_rng`]),
//! and per-trial results are reduced in trial order, so an estimate depends
//! only on the scenario, the seed and the trial count.
//!
//! One scene serves all three user classes:
//!
//! * the shared-band NTN user is served by the nearest satellite and hears
//!   the other co-channel satellites whose own users are on the shared band,
//!   plus every co-channel BS outside its protection zone (a Poisson field
//!   conditioned on an empty disk is the field with the disk removed);
//! * the reserved-band NTN user hears the co-channel satellites on the
//!   reserved band;
//! * the TN user is served by the nearest BS and hears the other co-channel
//!   BSs and every co-channel satellite on the shared band.

mod scene;

pub use scene::{
    sample_base_stations, sample_satellites, sample_scene, trial_rng, BaseStation, NodeKind, Satellite,
    Scene, SceneNode,
};

use crate::analytic::{AdrReport, CoverageCurve, CoveragePoint, Source, UserClass};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::Scenario;

/// Default generator seed ("SGIN" in ASCII).
pub const DEFAULT_SEED: u64 = 0x5347_494E;
pub const DEFAULT_TRIALS: u64 = 100_000;
/// z for a two-sided 95% normal interval.
const Z95: f64 = 1.96;
/// Trials reduced together before the ordered final sum.
const BLOCK: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationSettings {
    pub trials: u64,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        SimulationSettings {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            exec: Execution::default(),
        }
    }
}

impl SimulationSettings {
    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trial count must be positive".into()));
        }
        Ok(())
    }
}

/// A binomial proportion with its 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionEstimate {
    pub value: f64,
    pub half_width: f64,
    pub trials: u64,
}

impl ProportionEstimate {
    fn from_counts(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        ProportionEstimate {
            value: p,
            half_width: Z95 * (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// Standard error √(p(1−p)/n).
    pub fn standard_error(&self) -> f64 {
        self.half_width / Z95
    }
}

/// Received powers at the typical user, before noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPowers {
    /// `None` when no satellite is in view.
    pub ntn_signal: Option<f64>,
    pub shared_interference: f64,
    pub reserved_interference: f64,
    /// `None` when the region holds no base station.
    pub tn_signal: Option<f64>,
    pub tn_interference: f64,
}

impl LinkPowers {
    pub fn sinr(&self, class: UserClass, noise: f64) -> Option<f64> {
        let (signal, interference) = match class {
            UserClass::NtnShared => (self.ntn_signal?, self.shared_interference),
            UserClass::NtnReserved => (self.ntn_signal?, self.reserved_interference),
            UserClass::Tn => (self.tn_signal?, self.tn_interference),
        };
        let denom = interference + noise;
        Some(if denom > 0.0 { signal / denom } else { f64::INFINITY })
    }
}

/// Everything about a scene needed to evaluate it at a fixed list of
/// protection radii and any void probability.
struct ScenePowers {
    ntn_signal: Option<f64>,
    /// (activity draw, power) of co-channel satellites other than the
    /// serving one, as heard by the NTN user.
    ntn_interferers: Vec<(f64, f64)>,
    /// Same, for every co-channel satellite as heard by the TN user.
    tn_sat_interferers: Vec<(f64, f64)>,
    /// Co-channel BS power from outside each protection radius, in the
    /// order the radii were given.
    bs_outside: Vec<f64>,
    tn_signal: Option<f64>,
    tn_bs_interference: f64,
}

impl ScenePowers {
    fn new(scene: &Scene, sc: &Scenario, radii: &[f64]) -> Self {
        let ntn = &sc.ntn;
        let tn = &sc.tn;
        let serving_sat = scene.nearest_satellite();
        let sat_power = |gain: f64, s: &Satellite| gain * s.fading * s.distance.powf(-ntn.path_loss_exp);
        let bs_power = |b: &BaseStation| tn.link_gain() * b.fading * b.distance.powf(-tn.path_loss_exp);

        let mut ntn_interferers = Vec::new();
        let mut tn_sat_interferers = Vec::new();
        for (i, s) in scene.satellites.iter().enumerate() {
            if !s.cochannel {
                continue;
            }
            let p = sat_power(ntn.interfering_gain(), s);
            tn_sat_interferers.push((s.activity_draw, p));
            if Some(i) != serving_sat {
                ntn_interferers.push((s.activity_draw, p));
            }
        }

        // Bin co-channel BS power by how many radii lie strictly below its
        // distance; radius i (in ascending order) then sees bins i+1...
        let mut order: Vec<usize> = (0..radii.len()).collect();
        order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
        let mut bins = vec![0.0; radii.len() + 1];
        let serving_bs = scene.nearest_base_station();
        let mut tn_bs_interference = 0.0;
        for (i, b) in scene.base_stations.iter().enumerate() {
            if !b.cochannel {
                continue;
            }
            let p = bs_power(b);
            bins[sorted.partition_point(|&r| r < b.distance)] += p;
            if Some(i) != serving_bs {
                tn_bs_interference += p;
            }
        }
        let mut bs_outside = vec![0.0; radii.len()];
        let mut tail = 0.0;
        for k in (0..radii.len()).rev() {
            tail += bins[k + 1];
            bs_outside[order[k]] = tail;
        }

        ScenePowers {
            ntn_signal: serving_sat.map(|i| sat_power(ntn.serving_gain(), &scene.satellites[i])),
            ntn_interferers,
            tn_sat_interferers,
            bs_outside,
            tn_signal: serving_bs.map(|i| bs_power(&scene.base_stations[i])),
            tn_bs_interference,
        }
    }

    /// Powers at the `radius`-th protection radius given to [`Self::new`].
    fn at(&self, radius: usize, void_probability: f64) -> LinkPowers {
        let mut shared = 0.0;
        let mut reserved = 0.0;
        for &(draw, p) in &self.ntn_interferers {
            if draw < void_probability {
                shared += p;
            } else {
                reserved += p;
            }
        }
        let tn_sats: f64 = self
            .tn_sat_interferers
            .iter()
            .filter(|(draw, _)| *draw < void_probability)
            .map(|(_, p)| p)
            .sum();
        LinkPowers {
            ntn_signal: self.ntn_signal,
            shared_interference: shared + self.bs_outside[radius],
            reserved_interference: reserved,
            tn_signal: self.tn_signal,
            tn_interference: self.tn_bs_interference + tn_sats,
        }
    }
}

/// Link powers for one scene at the scenario's operating point.
pub fn link_powers(scene: &Scene, sc: &Scenario) -> LinkPowers {
    ScenePowers::new(scene, sc, &[sc.spectrum.protection_radius]).at(0, sc.void_probability())
}

/// Shared when no base station lies within the protection radius.
pub fn classify_typical_ntn_user(scene: &Scene, protection_radius: f64) -> UserClass {
    if scene.base_stations.iter().any(|b| b.distance <= protection_radius) {
        UserClass::NtnReserved
    } else {
        UserClass::NtnShared
    }
}

/// Fraction of scenes whose typical NTN user lands on the shared band.
pub fn estimate_shared_probability(sc: &Scenario, settings: &SimulationSettings) -> Result<ProportionEstimate> {
    settings.check()?;
    let rp = sc.spectrum.protection_radius;
    let labels = settings.exec.map_range(settings.trials, |t| {
        sample_scene(sc, settings.seed, t).map(|s| classify_typical_ntn_user(&s, rp) == UserClass::NtnShared)
    });
    let mut hits = 0;
    for l in labels {
        hits += l? as u64;
    }
    Ok(ProportionEstimate::from_counts(hits, settings.trials))
}

fn class_noise(sc: &Scenario, class: UserClass) -> Result<f64> {
    match class {
        UserClass::NtnReserved => sc.reserved_noise(),
        _ => sc.shared_noise(),
    }
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if let Some(t) = thresholds.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "SINR threshold must be >= 0, got {t}"
        )));
    }
    Ok(())
}

/// Simulated coverage curves for `classes`, all from the same scenes.
pub fn estimate_coverage_curves(
    sc: &Scenario,
    classes: &[UserClass],
    thresholds: &[f64],
    settings: &SimulationSettings,
) -> Result<Vec<CoverageCurve>> {
    settings.check()?;
    check_thresholds(thresholds)?;
    let noise = classes
        .iter()
        .map(|&c| class_noise(sc, c))
        .collect::<Result<Vec<_>>>()?;

    let per_trial = settings.exec.map_range(settings.trials, |t| {
        let scene = sample_scene(sc, settings.seed, t)?;
        let lp = link_powers(&scene, sc);
        Ok(classes
            .iter()
            .zip(&noise)
            .map(|(&c, &n)| lp.sinr(c, n))
            .collect::<Vec<_>>())
    });
    let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;

    classes
        .iter()
        .enumerate()
        .map(|(k, &class)| {
            let sinrs: Vec<f64> = per_trial.iter().filter_map(|row| row[k]).collect();
            if sinrs.is_empty() {
                return Err(Error::AllDiscarded {
                    trials: settings.trials,
                    cause: "no serving node in any scene",
                });
            }
            let n = sinrs.len() as u64;
            let points = thresholds
                .iter()
                .map(|&theta| {
                    let hits = sinrs.iter().filter(|&&s| s >= theta).count() as u64;
                    let e = ProportionEstimate::from_counts(hits, n);
                    CoveragePoint {
                        threshold: theta,
                        probability: e.value,
                        half_width: Some(e.half_width),
                    }
                })
                .collect();
            Ok(CoverageCurve {
                user_class: class,
                source: Source::Simulated,
                points,
            })
        })
        .collect()
}

pub fn estimate_coverage_curve(
    sc: &Scenario,
    class: UserClass,
    thresholds: &[f64],
    settings: &SimulationSettings,
) -> Result<CoverageCurve> {
    Ok(estimate_coverage_curves(sc, &[class], thresholds, settings)?.remove(0))
}

/// A simulated ADR report and the 95% half-width of each class rate, in
/// [`UserClass::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdrEstimate {
    pub report: AdrReport,
    pub half_widths: [f64; 3],
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    /// Mean and standard error of the mean.
    fn mean_se(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        (mean, (var / n).sqrt())
    }
}

/// Per-cell constants: the cell scenario, λ·B for each class and the noise
/// power each class sees (`None` when λ·B = 0 and the class is skipped).
struct Cell {
    scenario: Scenario,
    density_bandwidth: [f64; 3],
    noise: [Option<f64>; 3],
}

/// Simulated ADR at every (R_p, ω_s) pair, R_p-major. Each scene is drawn
/// once and re-marked for every protection radius, so the cells share
/// their randomness.
pub fn estimate_adr_grid(
    sc: &Scenario,
    protection_radii: &[f64],
    shared_fractions: &[f64],
    settings: &SimulationSettings,
) -> Result<Vec<AdrEstimate>> {
    settings.check()?;
    let mut cells = Vec::with_capacity(protection_radii.len() * shared_fractions.len());
    for &rp in protection_radii {
        for &omega in shared_fractions {
            let cell_sc = sc.with_operating_point(rp, omega)?;
            let mut density_bandwidth = [0.0; 3];
            let mut noise = [None; 3];
            for (k, class) in UserClass::ALL.into_iter().enumerate() {
                let lb = crate::analytic::density_bandwidth(&cell_sc, class);
                density_bandwidth[k] = lb;
                if lb > 0.0 {
                    noise[k] = Some(class_noise(&cell_sc, class)?);
                }
            }
            cells.push(Cell {
                scenario: cell_sc,
                density_bandwidth,
                noise,
            });
        }
    }
    let voids: Vec<f64> = protection_radii
        .iter()
        .map(|&rp| Ok(sc.with_operating_point(rp, sc.spectrum.shared_fraction)?.void_probability()))
        .collect::<Result<_>>()?;
    let per_rp = shared_fractions.len();

    let blocks = settings.trials.div_ceil(BLOCK);
    let partial = settings.exec.map_range(blocks, |b| -> Result<Vec<[Moments; 3]>> {
        let mut acc = vec![[Moments::default(); 3]; cells.len()];
        for t in b * BLOCK..((b + 1) * BLOCK).min(settings.trials) {
            let scene = sample_scene(sc, settings.seed, t)?;
            let powers = ScenePowers::new(&scene, sc, protection_radii);
            for (i, &void) in voids.iter().enumerate() {
                let lp = powers.at(i, void);
                for j in 0..per_rp {
                    let idx = i * per_rp + j;
                    let cell = &cells[idx];
                    for (k, class) in UserClass::ALL.into_iter().enumerate() {
                        let Some(n) = cell.noise[k] else { continue };
                        let Some(sinr) = lp.sinr(class, n) else { continue };
                        if sinr.is_infinite() {
                            return Err(Error::Unbounded(format!(
                                "{} user saw neither interference nor noise",
                                class.label()
                            )));
                        }
                        acc[idx][k].push(sinr.ln_1p() / std::f64::consts::LN_2);
                    }
                }
            }
        }
        Ok(acc)
    });

    let mut total = vec![[Moments::default(); 3]; cells.len()];
    for block in partial {
        for (t, a) in total.iter_mut().zip(block?) {
            for k in 0..3 {
                t[k].merge(&a[k]);
            }
        }
    }

    cells
        .iter()
        .zip(total)
        .map(|(cell, m)| {
            let mut adr = [0.0; 3];
            let mut half = [0.0; 3];
            for k in 0..3 {
                if cell.noise[k].is_none() {
                    continue;
                }
                if m[k].n == 0 {
                    return Err(Error::AllDiscarded {
                        trials: settings.trials,
                        cause: "no serving node in any scene",
                    });
                }
                let (mean, se) = m[k].mean_se();
                adr[k] = cell.density_bandwidth[k] * mean;
                half[k] = Z95 * cell.density_bandwidth[k] * se;
            }
            Ok(AdrEstimate {
                report: AdrReport::new(&cell.scenario, adr[0], adr[1], adr[2], Source::Simulated),
                half_widths: half,
            })
        })
        .collect()
}

/// Simulated ADR at the scenario's own operating point.
pub fn estimate_adr_report(sc: &Scenario, settings: &SimulationSettings) -> Result<AdrEstimate> {
    let sp = &sc.spectrum;
    Ok(estimate_adr_grid(sc, &[sp.protection_radius], &[sp.shared_fraction], settings)?.remove(0))
}
