//! Scenario parameters, derived geometry and validation.
//!
//! Every engine consumes a [`Scenario`], which can only be obtained through
//! [`ScenarioConfig::validate`].

pub mod file;
pub mod units;

use std::ops::Deref;

use crate::error::{Error, Result, Violation};

pub use units::{from_linear, to_linear, DbKind, BOLTZMANN};

/// Earth and satellite-shell geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    /// R_E, m.
    pub earth_radius: f64,
    /// H, m.
    pub sat_altitude: f64,
}

impl GeometryParams {
    /// R_S = R_E + H.
    pub fn shell_radius(&self) -> f64 {
        self.earth_radius + self.sat_altitude
    }

    /// Distance to a satellite at the zenith, R_S − R_E.
    pub fn min_distance(&self) -> f64 {
        self.shell_radius() - self.earth_radius
    }

    /// Distance to a satellite on the horizon, √(R_S² − R_E²).
    pub fn max_distance(&self) -> f64 {
        let h = self.sat_altitude;
        (h * (2.0 * self.earth_radius + h)).sqrt()
    }

    /// R_S / R_E, the factor by which shell area grows per unit of r².
    pub fn area_factor(&self) -> f64 {
        self.shell_radius() / self.earth_radius
    }

    /// Area of the shell cap above the typical user's horizon,
    /// 2πR_S²(1 − R_E/R_S) = 2πR_S·H.
    pub fn visible_cap_area(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.shell_radius() * self.sat_altitude
    }
}

/// Satellite downlink parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NtnChannelParams {
    /// P_N, W.
    pub tx_power: f64,
    pub main_lobe_gain: f64,
    pub side_lobe_gain: f64,
    /// β_N0 at 1 m, linear.
    pub ref_path_loss: f64,
    pub path_loss_exp: f64,
    pub nakagami_m: u32,
    pub nakagami_omega: f64,
}

/// Base-station downlink parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TnChannelParams {
    /// P_T, W.
    pub tx_power: f64,
    pub antenna_gain: f64,
    /// β_T0 at 1 m, linear.
    pub ref_path_loss: f64,
    pub path_loss_exp: f64,
    /// BS service radius R_T, m. Stored for completeness; no expression uses it.
    pub service_radius: f64,
}

impl NtnChannelParams {
    /// P_N·G_ml·β_N0.
    pub fn serving_gain(&self) -> f64 {
        self.tx_power * self.main_lobe_gain * self.ref_path_loss
    }

    /// P_N·G_sl·β_N0.
    pub fn interfering_gain(&self) -> f64 {
        self.tx_power * self.side_lobe_gain * self.ref_path_loss
    }
}

impl TnChannelParams {
    /// P_T·G_T·β_T0.
    pub fn link_gain(&self) -> f64 {
        self.tx_power * self.antenna_gain * self.ref_path_loss
    }
}

/// Node densities (per m²) and the frequency reuse factor δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentDensities {
    pub sat_density: f64,
    pub bs_density: f64,
    /// Stored for completeness; no expression uses it.
    pub ntn_user_density: f64,
    /// Stored for completeness; no expression uses it.
    pub tn_user_density: f64,
    pub reuse_factor: u32,
}

impl DeploymentDensities {
    /// λ_N / δ.
    pub fn cochannel_sat_density(&self) -> f64 {
        self.sat_density / self.reuse_factor as f64
    }

    /// λ_T / δ.
    pub fn cochannel_bs_density(&self) -> f64 {
        self.bs_density / self.reuse_factor as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPolicy {
    /// B, Hz.
    pub total_bandwidth: f64,
    /// ω_s.
    pub shared_fraction: f64,
    /// R_p, m.
    pub protection_radius: f64,
}

impl SpectrumPolicy {
    /// B_S = ω_s·B.
    pub fn shared_bandwidth(&self) -> f64 {
        self.shared_fraction * self.total_bandwidth
    }

    /// B_R = B − B_S, so that the two always add back to B exactly.
    pub fn reserved_bandwidth(&self) -> f64 {
        self.total_bandwidth - self.shared_bandwidth()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// A fixed σ₀² in watts, independent of bandwidth.
    Explicit { power: f64 },
    /// k_B·T₀·B·NF over the band the link uses.
    Thermal {
        noise_figure_db: f64,
        reference_temperature: f64,
    },
    InterferenceLimited,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::Thermal {
            noise_figure_db: 7.0,
            reference_temperature: 290.0,
        }
    }
}

impl NoiseModel {
    /// σ₀² in watts over `bandwidth` Hz.
    pub fn power(&self, bandwidth: f64) -> Result<f64> {
        match *self {
            NoiseModel::Explicit { power } => Ok(power),
            NoiseModel::InterferenceLimited => Ok(0.0),
            NoiseModel::Thermal {
                noise_figure_db,
                reference_temperature,
            } => {
                if !(bandwidth > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "thermal noise needs a positive bandwidth, got {bandwidth} Hz"
                    )));
                }
                let nf = to_linear(noise_figure_db, DbKind::GainDbi)?;
                Ok(BOLTZMANN * reference_temperature * bandwidth * nf)
            }
        }
    }
}

/// Weights ξ and per-class ADR floors, bit/s/m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosWeights {
    pub xi_ntn_shared: f64,
    pub xi_ntn_reserved: f64,
    pub xi_tn: f64,
    pub adr_ntn_shared_min: f64,
    pub adr_ntn_reserved_min: f64,
    pub adr_tn_min: f64,
}

impl QosWeights {
    /// ξ_NS·a_NS + ξ_NR·a_NR + ξ_T·a_T, always evaluated in this order so
    /// that a recomputation from stored rates is bit-identical.
    pub fn weighted_sum(&self, ntn_shared: f64, ntn_reserved: f64, tn: f64) -> f64 {
        self.xi_ntn_shared * ntn_shared + self.xi_ntn_reserved * ntn_reserved + self.xi_tn * tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: GeometryParams,
    pub ntn: NtnChannelParams,
    pub tn: TnChannelParams,
    pub densities: DeploymentDensities,
    pub spectrum: SpectrumPolicy,
    pub noise: NoiseModel,
    pub weights: QosWeights,
    /// Half-width of the square in which base stations are sampled, m.
    pub sim_region_half_width: f64,
}

const KM: f64 = 1e3;
const PER_KM2: f64 = 1e-6;

impl Default for ScenarioConfig {
    /// The reference deployment: 100 km × 100 km remote area, 500 km shell,
    /// 300 MHz split 200/100 between TN and NTN.
    fn default() -> Self {
        ScenarioConfig {
            geometry: GeometryParams {
                earth_radius: 6371.0 * KM,
                sat_altitude: 500.0 * KM,
            },
            ntn: NtnChannelParams {
                tx_power: 100.0,
                main_lobe_gain: 1000.0,
                side_lobe_gain: 100.0,
                ref_path_loss: 1.0,
                path_loss_exp: 2.0,
                nakagami_m: 1,
                nakagami_omega: 1.0,
            },
            tn: TnChannelParams {
                tx_power: 10f64.powf(1.6),
                antenna_gain: 100.0,
                ref_path_loss: 1.0,
                path_loss_exp: 3.5,
                service_radius: 10.0 * KM,
            },
            densities: DeploymentDensities {
                sat_density: 1e-5 * PER_KM2,
                bs_density: 0.318 * PER_KM2,
                ntn_user_density: 0.0,
                tn_user_density: 0.0,
                reuse_factor: 2,
            },
            spectrum: SpectrumPolicy {
                total_bandwidth: 300e6,
                shared_fraction: 200.0 / 300.0,
                protection_radius: 12.0 * KM,
            },
            noise: NoiseModel::default(),
            weights: QosWeights {
                xi_ntn_shared: 27.0,
                xi_ntn_reserved: 29.0,
                xi_tn: 0.9,
                adr_ntn_shared_min: 0.0,
                adr_ntn_reserved_min: 0.0,
                adr_tn_min: 0.0,
            },
            sim_region_half_width: 50.0 * KM,
        }
    }
}

struct Checker(Vec<Violation>);

impl Checker {
    fn require(&mut self, ok: bool, field: &'static str, constraint: impl Into<String>) {
        if !ok {
            self.0.push(Violation {
                field,
                constraint: constraint.into(),
            });
        }
    }

    fn positive(&mut self, v: f64, field: &'static str) {
        self.require(v.is_finite() && v > 0.0, field, format!("must be finite and > 0, got {v}"));
    }

    fn non_negative(&mut self, v: f64, field: &'static str) {
        self.require(v.is_finite() && v >= 0.0, field, format!("must be finite and >= 0, got {v}"));
    }
}

impl ScenarioConfig {
    /// Checks every invariant and reports all violations, not just the first.
    pub fn validate(self) -> Result<Scenario> {
        let mut c = Checker(Vec::new());

        c.positive(self.geometry.earth_radius, "geometry.earth_radius");
        c.positive(self.geometry.sat_altitude, "geometry.sat_altitude");

        let n = &self.ntn;
        c.positive(n.tx_power, "ntn.tx_power");
        c.positive(n.side_lobe_gain, "ntn.side_lobe_gain");
        c.positive(n.main_lobe_gain, "ntn.main_lobe_gain");
        c.require(
            n.main_lobe_gain >= n.side_lobe_gain,
            "ntn.main_lobe_gain",
            "must be at least the side-lobe gain",
        );
        c.positive(n.ref_path_loss, "ntn.ref_path_loss");
        c.positive(n.path_loss_exp, "ntn.path_loss_exp");
        c.require(n.nakagami_m >= 1, "ntn.nakagami_m", "must be a positive integer");
        c.require(
            n.nakagami_omega == 1.0,
            "ntn.nakagami_omega",
            format!("must equal 1 (unit-mean fading power), got {}", n.nakagami_omega),
        );

        let t = &self.tn;
        c.positive(t.tx_power, "tn.tx_power");
        c.positive(t.antenna_gain, "tn.antenna_gain");
        c.positive(t.ref_path_loss, "tn.ref_path_loss");
        c.require(
            t.path_loss_exp.is_finite() && t.path_loss_exp > 2.0,
            "tn.path_loss_exp",
            format!("pathLossExp must exceed 2, got {}", t.path_loss_exp),
        );
        c.non_negative(t.service_radius, "tn.service_radius");

        let d = &self.densities;
        c.non_negative(d.sat_density, "densities.sat_density");
        c.non_negative(d.bs_density, "densities.bs_density");
        c.non_negative(d.ntn_user_density, "densities.ntn_user_density");
        c.non_negative(d.tn_user_density, "densities.tn_user_density");
        c.require(d.reuse_factor >= 1, "densities.reuse_factor", "must be >= 1");

        let s = &self.spectrum;
        c.positive(s.total_bandwidth, "spectrum.total_bandwidth");
        c.require(
            (0.0..=1.0).contains(&s.shared_fraction),
            "spectrum.shared_fraction",
            format!("sharedFraction out of [0,1], got {}", s.shared_fraction),
        );
        c.non_negative(s.protection_radius, "spectrum.protection_radius");

        match self.noise {
            NoiseModel::Explicit { power } => c.non_negative(power, "noise.explicit_power"),
            NoiseModel::Thermal {
                noise_figure_db,
                reference_temperature,
            } => {
                c.require(
                    noise_figure_db.is_finite(),
                    "noise.noise_figure_db",
                    "must be finite",
                );
                c.positive(reference_temperature, "noise.reference_temperature");
            }
            NoiseModel::InterferenceLimited => {}
        }

        let w = &self.weights;
        c.non_negative(w.xi_ntn_shared, "weights.xi_ntn_shared");
        c.non_negative(w.xi_ntn_reserved, "weights.xi_ntn_reserved");
        c.non_negative(w.xi_tn, "weights.xi_tn");
        c.non_negative(w.adr_ntn_shared_min, "weights.adr_ntn_shared_min");
        c.non_negative(w.adr_ntn_reserved_min, "weights.adr_ntn_reserved_min");
        c.non_negative(w.adr_tn_min, "weights.adr_tn_min");

        c.positive(self.sim_region_half_width, "sim_region_half_width");

        if c.0.is_empty() {
            Ok(Scenario(self))
        } else {
            Err(Error::Validation(c.0))
        }
    }
}

/// A [`ScenarioConfig`] that has passed validation. Immutable and `Sync`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario(ScenarioConfig);

impl Deref for Scenario {
    type Target = ScenarioConfig;

    fn deref(&self) -> &ScenarioConfig {
        &self.0
    }
}

impl Scenario {
    pub fn config(&self) -> &ScenarioConfig {
        &self.0
    }

    pub fn into_config(self) -> ScenarioConfig {
        self.0
    }

    /// The same scenario at a different (R_p, ω_s).
    pub fn with_operating_point(&self, protection_radius: f64, shared_fraction: f64) -> Result<Scenario> {
        let mut cfg = self.0;
        cfg.spectrum.protection_radius = protection_radius;
        cfg.spectrum.shared_fraction = shared_fraction;
        cfg.validate()
    }

    /// Applies `edit` to a copy of the configuration and revalidates.
    pub fn modified(&self, edit: impl FnOnce(&mut ScenarioConfig)) -> Result<Scenario> {
        let mut cfg = self.0;
        edit(&mut cfg);
        cfg.validate()
    }

    /// Noise power on the shared band B_S.
    pub fn shared_noise(&self) -> Result<f64> {
        self.noise.power(self.spectrum.shared_bandwidth())
    }

    /// Noise power on the reserved band B_R.
    pub fn reserved_noise(&self) -> Result<f64> {
        self.noise.power(self.spectrum.reserved_bandwidth())
    }

    /// exp(−π·λ_T·R_p²): the probability that a typical NTN user's protection
    /// zone holds no base station.
    pub fn void_probability(&self) -> f64 {
        let rp = self.spectrum.protection_radius;
        (-std::f64::consts::PI * self.densities.bs_density * rp * rp).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_is_valid() {
        let s = ScenarioConfig::default().validate().unwrap();
        assert_eq!(s.geometry.min_distance(), 500e3);
        assert!((s.tn.tx_power - 39.810717055349734).abs() < 1e-12);
    }

    #[test]
    fn derived_geometry() {
        let g = ScenarioConfig::default().geometry;
        assert_eq!(g.shell_radius(), 6871e3);
        let rs = g.shell_radius();
        let re = g.earth_radius;
        let direct = (rs * rs - re * re).sqrt();
        assert!((g.max_distance() - direct).abs() / direct < 1e-12);
        assert!(g.min_distance() < g.max_distance() && g.max_distance() < rs);
        let cap = 2.0 * std::f64::consts::PI * rs * rs * (1.0 - re / rs);
        assert!((g.visible_cap_area() - cap).abs() / cap < 1e-12);
    }

    #[test]
    fn collects_every_violation() {
        let mut cfg = ScenarioConfig::default();
        cfg.spectrum.shared_fraction = 1.3;
        cfg.tn.path_loss_exp = 2.0;
        cfg.densities.bs_density = -1.0;
        let Err(Error::Validation(v)) = cfg.validate() else {
            panic!("expected violations");
        };
        assert_eq!(v.len(), 3);
        assert!(v.iter().any(|v| v.field == "spectrum.shared_fraction"
            && v.constraint.contains("sharedFraction out of [0,1]")));
        assert!(v.iter().any(|v| v.field == "tn.path_loss_exp"
            && v.constraint.contains("pathLossExp must exceed 2")));
        assert!(v.iter().any(|v| v.field == "densities.bs_density"));
    }

    #[test]
    fn side_lobe_above_main_lobe_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.ntn.side_lobe_gain = 2000.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn noise_power_modes() {
        assert_eq!(NoiseModel::InterferenceLimited.power(1e6).unwrap(), 0.0);
        assert_eq!(NoiseModel::Explicit { power: 1e-13 }.power(0.0).unwrap(), 1e-13);
        let thermal = NoiseModel::Thermal {
            noise_figure_db: 0.0,
            reference_temperature: 290.0,
        };
        let p = thermal.power(1.0).unwrap();
        assert!((p - 4.0039e-21).abs() < 1e-25);
        assert!(thermal.power(0.0).is_err());
        assert!(thermal.power(-5.0).is_err());
    }

    proptest! {
        #[test]
        fn bandwidth_split_is_exact(omega in 0.0f64..=1.0, b in 1.0f64..1e12) {
            let s = SpectrumPolicy { total_bandwidth: b, shared_fraction: omega, protection_radius: 0.0 };
            prop_assert!((s.shared_bandwidth() + s.reserved_bandwidth() - b).abs() <= f64::EPSILON * b);
        }

        #[test]
        fn horizon_identity(re in 1e5f64..1e8, h in 1e3f64..1e7) {
            let g = GeometryParams { earth_radius: re, sat_altitude: h };
            let lhs = g.max_distance().powi(2);
            let rhs = g.min_distance().powi(2) + 2.0 * re * h;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs);
        }
    }
}
