//! Plain-text (TOML) scenario files.
//!
//! Files carry engineering units (km, km⁻², MHz, dBm, dBi); [`ScenarioFile::to_config`]
//! converts them to SI. Unknown keys are rejected.
//!
//! ```toml
//! sim_region_half_width_km = 50.0
//!
//! [geometry]
//! earth_radius_km = 6371.0
//! sat_altitude_km = 500.0
//!
//! [ntn]
//! tx_power_dbm = 50.0
//! main_lobe_gain_dbi = 30.0
//! side_lobe_gain_dbi = 20.0
//! ref_path_loss = 1.0          # linear, at 1 m
//! path_loss_exp = 2.0
//! nakagami_m = 1
//! nakagami_omega = 1.0
//!
//! [tn]
//! tx_power_dbm = 46.0
//! antenna_gain_dbi = 20.0
//! ref_path_loss = 1.0
//! path_loss_exp = 3.5
//! service_radius_km = 10.0
//!
//! [densities]
//! sat_per_km2 = 1e-5
//! bs_per_km2 = 0.318
//! ntn_users_per_km2 = 0.0
//! tn_users_per_km2 = 0.0
//! reuse_factor = 2
//!
//! [spectrum]
//! total_bandwidth_mhz = 300.0
//! shared_fraction = 0.6666666666666666
//! protection_radius_km = 12.0
//!
//! [noise]
//! mode = "thermal"             # or "explicit", "interference-limited"
//! noise_figure_db = 7.0        # thermal only
//! reference_temperature_k = 290.0
//! # explicit_power_w = 1e-13   # explicit only
//!
//! [weights]
//! xi_ntn_shared = 27.0
//! xi_ntn_reserved = 29.0
//! xi_tn = 0.9
//! adr_ntn_shared_min = 0.0     # bit/s/m²
//! adr_ntn_reserved_min = 0.0
//! adr_tn_min = 0.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::units::{from_linear, to_linear, DbKind};
use super::{
    DeploymentDensities, GeometryParams, NoiseModel, NtnChannelParams, QosWeights, Scenario,
    ScenarioConfig, SpectrumPolicy, TnChannelParams,
};
use crate::error::{Error, Result, Violation};

const KM: f64 = 1e3;
const PER_KM2: f64 = 1e-6;
const MHZ: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub sim_region_half_width_km: f64,
    pub geometry: GeometrySection,
    pub ntn: NtnSection,
    pub tn: TnSection,
    pub densities: DensitiesSection,
    pub spectrum: SpectrumSection,
    pub noise: NoiseSection,
    pub weights: WeightsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub earth_radius_km: f64,
    pub sat_altitude_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NtnSection {
    pub tx_power_dbm: f64,
    pub main_lobe_gain_dbi: f64,
    pub side_lobe_gain_dbi: f64,
    pub ref_path_loss: f64,
    pub path_loss_exp: f64,
    /// Read as a float so that a non-integer shape is reported by validation.
    pub nakagami_m: f64,
    pub nakagami_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TnSection {
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub ref_path_loss: f64,
    pub path_loss_exp: f64,
    #[serde(default)]
    pub service_radius_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitiesSection {
    pub sat_per_km2: f64,
    pub bs_per_km2: f64,
    #[serde(default)]
    pub ntn_users_per_km2: f64,
    #[serde(default)]
    pub tn_users_per_km2: f64,
    pub reuse_factor: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub total_bandwidth_mhz: f64,
    pub shared_fraction: f64,
    pub protection_radius_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    Explicit,
    Thermal,
    InterferenceLimited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub mode: NoiseMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit_power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_figure_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_temperature_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub xi_ntn_shared: f64,
    pub xi_ntn_reserved: f64,
    pub xi_tn: f64,
    #[serde(default)]
    pub adr_ntn_shared_min: f64,
    #[serde(default)]
    pub adr_ntn_reserved_min: f64,
    #[serde(default)]
    pub adr_tn_min: f64,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<ScenarioFile> {
        toml::from_str(text).map_err(|e| Error::ConfigFile(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ScenarioFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario file always serializes")
    }

    /// Converts to SI. Conversion problems that are really constraint
    /// violations (non-integer m, δ < 1, non-finite dB values) are reported
    /// together with every other violation.
    pub fn to_config(&self) -> Result<ScenarioConfig> {
        let mut bad = Vec::new();
        let mut lin = |v: f64, kind: DbKind, field: &'static str| match to_linear(v, kind) {
            Ok(x) => x,
            Err(_) => {
                bad.push(Violation {
                    field,
                    constraint: format!("must be a finite decibel value, got {v}"),
                });
                f64::NAN
            }
        };

        let ntn_tx = lin(self.ntn.tx_power_dbm, DbKind::PowerDbm, "ntn.tx_power_dbm");
        let ml = lin(self.ntn.main_lobe_gain_dbi, DbKind::GainDbi, "ntn.main_lobe_gain_dbi");
        let sl = lin(self.ntn.side_lobe_gain_dbi, DbKind::GainDbi, "ntn.side_lobe_gain_dbi");
        let tn_tx = lin(self.tn.tx_power_dbm, DbKind::PowerDbm, "tn.tx_power_dbm");
        let tn_g = lin(self.tn.antenna_gain_dbi, DbKind::GainDbi, "tn.antenna_gain_dbi");

        let m = self.ntn.nakagami_m;
        let nakagami_m = if m.fract() == 0.0 && m >= 1.0 && m <= u32::MAX as f64 {
            m as u32
        } else {
            bad.push(Violation {
                field: "ntn.nakagami_m",
                constraint: format!("must be a positive integer, got {m}"),
            });
            1
        };
        let delta = self.densities.reuse_factor;
        let reuse_factor = if delta >= 1 && delta <= u32::MAX as i64 {
            delta as u32
        } else {
            bad.push(Violation {
                field: "densities.reuse_factor",
                constraint: format!("must be >= 1, got {delta}"),
            });
            1
        };

        let noise = match self.noise.mode {
            NoiseMode::InterferenceLimited => NoiseModel::InterferenceLimited,
            NoiseMode::Explicit => match self.noise.explicit_power_w {
                Some(power) => NoiseModel::Explicit { power },
                None => {
                    bad.push(Violation {
                        field: "noise.explicit_power_w",
                        constraint: "required in explicit mode".into(),
                    });
                    NoiseModel::InterferenceLimited
                }
            },
            NoiseMode::Thermal => NoiseModel::Thermal {
                noise_figure_db: self.noise.noise_figure_db.unwrap_or(7.0),
                reference_temperature: self.noise.reference_temperature_k.unwrap_or(290.0),
            },
        };

        let cfg = ScenarioConfig {
            geometry: GeometryParams {
                earth_radius: self.geometry.earth_radius_km * KM,
                sat_altitude: self.geometry.sat_altitude_km * KM,
            },
            ntn: NtnChannelParams {
                tx_power: ntn_tx,
                main_lobe_gain: ml,
                side_lobe_gain: sl,
                ref_path_loss: self.ntn.ref_path_loss,
                path_loss_exp: self.ntn.path_loss_exp,
                nakagami_m,
                nakagami_omega: self.ntn.nakagami_omega,
            },
            tn: TnChannelParams {
                tx_power: tn_tx,
                antenna_gain: tn_g,
                ref_path_loss: self.tn.ref_path_loss,
                path_loss_exp: self.tn.path_loss_exp,
                service_radius: self.tn.service_radius_km * KM,
            },
            densities: DeploymentDensities {
                sat_density: self.densities.sat_per_km2 * PER_KM2,
                bs_density: self.densities.bs_per_km2 * PER_KM2,
                ntn_user_density: self.densities.ntn_users_per_km2 * PER_KM2,
                tn_user_density: self.densities.tn_users_per_km2 * PER_KM2,
                reuse_factor,
            },
            spectrum: SpectrumPolicy {
                total_bandwidth: self.spectrum.total_bandwidth_mhz * MHZ,
                shared_fraction: self.spectrum.shared_fraction,
                protection_radius: self.spectrum.protection_radius_km * KM,
            },
            noise,
            weights: QosWeights {
                xi_ntn_shared: self.weights.xi_ntn_shared,
                xi_ntn_reserved: self.weights.xi_ntn_reserved,
                xi_tn: self.weights.xi_tn,
                adr_ntn_shared_min: self.weights.adr_ntn_shared_min,
                adr_ntn_reserved_min: self.weights.adr_ntn_reserved_min,
                adr_tn_min: self.weights.adr_tn_min,
            },
            sim_region_half_width: self.sim_region_half_width_km * KM,
        };

        match cfg.validate() {
            Ok(_) if bad.is_empty() => Ok(cfg),
            Ok(_) => Err(Error::Validation(bad)),
            Err(Error::Validation(mut rest)) => {
                bad.append(&mut rest);
                Err(Error::Validation(bad))
            }
            Err(e) => Err(e),
        }
    }

    /// Parses, converts and validates in one go.
    pub fn to_scenario(&self) -> Result<Scenario> {
        self.to_config()?.validate()
    }

    /// Expresses an SI configuration in file units.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<ScenarioFile> {
        let noise = match cfg.noise {
            NoiseModel::Explicit { power } => NoiseSection {
                mode: NoiseMode::Explicit,
                explicit_power_w: Some(power),
                noise_figure_db: None,
                reference_temperature_k: None,
            },
            NoiseModel::Thermal {
                noise_figure_db,
                reference_temperature,
            } => NoiseSection {
                mode: NoiseMode::Thermal,
                explicit_power_w: None,
                noise_figure_db: Some(noise_figure_db),
                reference_temperature_k: Some(reference_temperature),
            },
            NoiseModel::InterferenceLimited => NoiseSection {
                mode: NoiseMode::InterferenceLimited,
                explicit_power_w: None,
                noise_figure_db: None,
                reference_temperature_k: None,
            },
        };
        Ok(ScenarioFile {
            sim_region_half_width_km: cfg.sim_region_half_width / KM,
            geometry: GeometrySection {
                earth_radius_km: cfg.geometry.earth_radius / KM,
                sat_altitude_km: cfg.geometry.sat_altitude / KM,
            },
            ntn: NtnSection {
                tx_power_dbm: from_linear(cfg.ntn.tx_power, DbKind::PowerDbm)?,
                main_lobe_gain_dbi: from_linear(cfg.ntn.main_lobe_gain, DbKind::GainDbi)?,
                side_lobe_gain_dbi: from_linear(cfg.ntn.side_lobe_gain, DbKind::GainDbi)?,
                ref_path_loss: cfg.ntn.ref_path_loss,
                path_loss_exp: cfg.ntn.path_loss_exp,
                nakagami_m: cfg.ntn.nakagami_m as f64,
                nakagami_omega: cfg.ntn.nakagami_omega,
            },
            tn: TnSection {
                tx_power_dbm: from_linear(cfg.tn.tx_power, DbKind::PowerDbm)?,
                antenna_gain_dbi: from_linear(cfg.tn.antenna_gain, DbKind::GainDbi)?,
                ref_path_loss: cfg.tn.ref_path_loss,
                path_loss_exp: cfg.tn.path_loss_exp,
                service_radius_km: cfg.tn.service_radius / KM,
            },
            densities: DensitiesSection {
                sat_per_km2: cfg.densities.sat_density / PER_KM2,
                bs_per_km2: cfg.densities.bs_density / PER_KM2,
                ntn_users_per_km2: cfg.densities.ntn_user_density / PER_KM2,
                tn_users_per_km2: cfg.densities.tn_user_density / PER_KM2,
                reuse_factor: cfg.densities.reuse_factor as i64,
            },
            spectrum: SpectrumSection {
                total_bandwidth_mhz: cfg.spectrum.total_bandwidth / MHZ,
                shared_fraction: cfg.spectrum.shared_fraction,
                protection_radius_km: cfg.spectrum.protection_radius / KM,
            },
            noise,
            weights: WeightsSection {
                xi_ntn_shared: cfg.weights.xi_ntn_shared,
                xi_ntn_reserved: cfg.weights.xi_ntn_reserved,
                xi_tn: cfg.weights.xi_tn,
                adr_ntn_shared_min: cfg.weights.adr_ntn_shared_min,
                adr_ntn_reserved_min: cfg.weights.adr_ntn_reserved_min,
                adr_tn_min: cfg.weights.adr_tn_min,
            },
        })
    }

    /// The reference deployment written with round engineering numbers.
    pub fn reference() -> ScenarioFile {
        ScenarioFile {
            sim_region_half_width_km: 50.0,
            geometry: GeometrySection {
                earth_radius_km: 6371.0,
                sat_altitude_km: 500.0,
            },
            ntn: NtnSection {
                tx_power_dbm: 50.0,
                main_lobe_gain_dbi: 30.0,
                side_lobe_gain_dbi: 20.0,
                ref_path_loss: 1.0,
                path_loss_exp: 2.0,
                nakagami_m: 1.0,
                nakagami_omega: 1.0,
            },
            tn: TnSection {
                tx_power_dbm: 46.0,
                antenna_gain_dbi: 20.0,
                ref_path_loss: 1.0,
                path_loss_exp: 3.5,
                service_radius_km: 10.0,
            },
            densities: DensitiesSection {
                sat_per_km2: 1e-5,
                bs_per_km2: 0.318,
                ntn_users_per_km2: 0.0,
                tn_users_per_km2: 0.0,
                reuse_factor: 2,
            },
            spectrum: SpectrumSection {
                total_bandwidth_mhz: 300.0,
                shared_fraction: 200.0 / 300.0,
                protection_radius_km: 12.0,
            },
            noise: NoiseSection {
                mode: NoiseMode::Thermal,
                explicit_power_w: None,
                noise_figure_db: Some(7.0),
                reference_temperature_k: Some(290.0),
            },
            weights: WeightsSection {
                xi_ntn_shared: 27.0,
                xi_ntn_reserved: 29.0,
                xi_tn: 0.9,
                adr_ntn_shared_min: 0.0,
                adr_ntn_reserved_min: 0.0,
                adr_tn_min: 0.0,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
    }

    #[test]
    fn reference_file_matches_default_config() {
        let from_file = ScenarioFile::reference().to_config().unwrap();
        let d = ScenarioConfig::default();
        assert!(close(from_file.tn.tx_power, d.tn.tx_power));
        assert!(close(from_file.ntn.tx_power, d.ntn.tx_power));
        assert!(close(from_file.ntn.main_lobe_gain, d.ntn.main_lobe_gain));
        assert!(close(from_file.densities.sat_density, d.densities.sat_density));
        assert!(close(from_file.densities.bs_density, d.densities.bs_density));
        assert_eq!(from_file.spectrum.protection_radius, d.spectrum.protection_radius);
        assert_eq!(from_file.noise, d.noise);
    }

    #[test]
    fn toml_round_trip() {
        let f = ScenarioFile::reference();
        let back = ScenarioFile::parse(&f.to_toml()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = ScenarioFile::reference().to_toml();
        text = text.replace("[geometry]", "[geometry]\nflat_earth = true");
        assert!(matches!(ScenarioFile::parse(&text), Err(Error::ConfigFile(_))));
        let text = format!("bogus = 1\n{}", ScenarioFile::reference().to_toml());
        assert!(ScenarioFile::parse(&text).is_err());
    }

    #[test]
    fn conversion_and_validation_problems_reported_together() {
        let mut f = ScenarioFile::reference();
        f.ntn.nakagami_m = 1.5;
        f.spectrum.shared_fraction = 1.3;
        let Err(Error::Validation(v)) = f.to_config() else {
            panic!("expected violations");
        };
        assert_eq!(v.len(), 2, "{v:?}");
    }

    #[test]
    fn explicit_mode_needs_power() {
        let mut f = ScenarioFile::reference();
        f.noise.mode = NoiseMode::Explicit;
        assert!(f.to_config().is_err());
        f.noise.explicit_power_w = Some(1e-13);
        assert_eq!(f.to_config().unwrap().noise, NoiseModel::Explicit { power: 1e-13 });
    }
}
