//! Stochastic-geometry expressions for the three typical users: thinned
//! satellite densities, serving-distance laws, interference Laplace
//! transforms, coverage probabilities and area data rates.

mod adr;
mod coverage;
mod laplace;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{DeploymentDensities, GeometryParams, Scenario};

pub use adr::{
    adr_ntn_reserved, adr_ntn_shared, adr_tn, class_adr, density_bandwidth, ws_adr, AdrReport, Feasibility, OperatingPoint,
};
pub use coverage::{coverage, coverage_curve, coverage_ntn_reserved, coverage_ntn_shared, coverage_tn};
pub use laplace::{ntn_interference_exponent, tn_interference_exponent};

/// The three typical users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UserClass {
    /// NTN user with an empty protection zone, on the shared band.
    NtnShared,
    /// NTN user with a BS inside its protection zone, on the reserved band.
    NtnReserved,
    /// Terrestrial user, on the shared band.
    Tn,
}

impl UserClass {
    pub const ALL: [UserClass; 3] = [UserClass::NtnShared, UserClass::NtnReserved, UserClass::Tn];

    pub fn label(self) -> &'static str {
        match self {
            UserClass::NtnShared => "ntn_shared",
            UserClass::NtnReserved => "ntn_reserved",
            UserClass::Tn => "tn",
        }
    }
}

/// Which engine produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Analytic,
    Simulated,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Simulated => "simulated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveragePoint {
    /// Linear SINR threshold θ.
    pub threshold: f64,
    pub probability: f64,
    /// 95% half-width; `None` for analytic points.
    pub half_width: Option<f64>,
}

/// P(SINR ≥ θ) over a list of thresholds, in the caller's threshold order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    pub user_class: UserClass,
    pub source: Source,
    pub points: Vec<CoveragePoint>,
}

/// Satellite densities per band and the protection-zone void probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumClassDensities {
    /// λ_NS.
    pub shared_sat: f64,
    /// λ_NR.
    pub reserved_sat: f64,
    /// λ_T / δ.
    pub cochannel_bs: f64,
    pub void_probability: f64,
}

impl SpectrumClassDensities {
    pub fn new(d: &DeploymentDensities, protection_radius: f64) -> Result<Self> {
        Ok(SpectrumClassDensities {
            shared_sat: shared_sat_density(d, protection_radius)?,
            reserved_sat: reserved_sat_density(d, protection_radius)?,
            cochannel_bs: d.cochannel_bs_density(),
            void_probability: void_probability(d.bs_density, protection_radius),
        })
    }

    pub fn of(sc: &Scenario) -> Self {
        Self::new(&sc.densities, sc.spectrum.protection_radius).expect("validated scenario")
    }
}

fn void_probability(bs_density: f64, protection_radius: f64) -> f64 {
    (-PI * bs_density * protection_radius * protection_radius).exp()
}

fn check_radius(rp: f64) -> Result<()> {
    if rp.is_nan() || rp < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "protection radius must be >= 0, got {rp}"
        )));
    }
    Ok(())
}

/// λ_NS = exp(−πλ_T R_p²)·λ_N/δ.
pub fn shared_sat_density(d: &DeploymentDensities, protection_radius: f64) -> Result<f64> {
    check_radius(protection_radius)?;
    Ok(void_probability(d.bs_density, protection_radius) * d.cochannel_sat_density())
}

/// λ_NR = λ_N/δ − λ_NS, so the two always partition λ_N/δ exactly.
pub fn reserved_sat_density(d: &DeploymentDensities, protection_radius: f64) -> Result<f64> {
    let shared = shared_sat_density(d, protection_radius)?;
    Ok(d.cochannel_sat_density() - shared)
}

/// P(|h|² ≥ x) for Nakagami-m fading with unit mean power.
pub fn nakagami_ccdf(m: u32, x: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("Nakagami m must be >= 1".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "fading CCDF needs x >= 0, got {x}"
        )));
    }
    let mx = m as f64 * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= mx / k as f64;
        sum += term;
    }
    Ok((-mx).exp() * sum)
}

/// λπ(R_S/R_E)(r² − R_min²): the mean number of satellites closer than `r`.
fn sats_within(g: &GeometryParams, sat_density: f64, r: f64) -> f64 {
    let r_min = g.min_distance();
    sat_density * PI * g.area_factor() * (r - r_min) * (r + r_min)
}

/// Density of the distance to the nearest visible satellite, conditioned on
/// at least one being visible. Zero outside [R_min, R_max].
pub fn sat_distance_pdf(g: &GeometryParams, sat_density: f64, r: f64) -> f64 {
    let (r_min, r_max) = (g.min_distance(), g.max_distance());
    if !(r_min..=r_max).contains(&r) {
        return 0.0;
    }
    let total = sats_within(g, sat_density, r_max);
    if total == 0.0 {
        // λ → 0 limit: uniform in r².
        return 2.0 * r / ((r_max - r_min) * (r_max + r_min));
    }
    2.0 * PI * sat_density * g.area_factor() * r * (-sats_within(g, sat_density, r)).exp()
        / -(-total).exp_m1()
}

/// CDF matching [`sat_distance_pdf`].
pub fn sat_distance_cdf(g: &GeometryParams, sat_density: f64, r: f64) -> f64 {
    let (r_min, r_max) = (g.min_distance(), g.max_distance());
    if r <= r_min {
        return 0.0;
    }
    if r >= r_max {
        return 1.0;
    }
    let total = sats_within(g, sat_density, r_max);
    if total == 0.0 {
        return (r * r - r_min * r_min) / (r_max * r_max - r_min * r_min);
    }
    (-sats_within(g, sat_density, r)).exp_m1() / (-total).exp_m1()
}

/// Rayleigh nearest-neighbour density of a planar PPP.
pub fn bs_distance_pdf(bs_density: f64, l: f64) -> f64 {
    if l < 0.0 {
        return 0.0;
    }
    2.0 * PI * bs_density * l * (-PI * bs_density * l * l).exp()
}

pub fn bs_distance_cdf(bs_density: f64, l: f64) -> f64 {
    if l <= 0.0 {
        return 0.0;
    }
    -(-PI * bs_density * l * l).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioConfig;
    use crate::quadrature::{integrate_finite, integrate_partitioned, integrate_semi_infinite, QuadratureSettings};
    use proptest::prelude::*;

    const KM2: f64 = 1e6;

    fn densities() -> DeploymentDensities {
        ScenarioConfig::default().densities
    }

    #[test]
    fn thinned_densities_reference_values() {
        let d = densities();
        assert_eq!(shared_sat_density(&d, 0.0).unwrap(), d.sat_density / 2.0);
        assert_eq!(reserved_sat_density(&d, 0.0).unwrap(), 0.0);

        // 5e-6 · exp(−π·0.318·1) per km²
        let ns = shared_sat_density(&d, 1e3).unwrap() * KM2;
        let nr = reserved_sat_density(&d, 1e3).unwrap() * KM2;
        let expected = 5e-6 * (-PI * 0.318f64).exp();
        assert!((ns - expected).abs() < 1e-15);
        assert!((ns - 1.841e-6).abs() < 5e-10);
        assert!((nr - 3.159e-6).abs() < 5e-10);

        assert_eq!(shared_sat_density(&d, 1e9).unwrap(), 0.0);
        assert_eq!(reserved_sat_density(&d, 1e9).unwrap(), d.sat_density / 2.0);
        assert!(shared_sat_density(&d, -1.0).is_err());
    }

    #[test]
    fn nakagami_reference_values() {
        assert_eq!(nakagami_ccdf(1, 0.0).unwrap(), 1.0);
        assert!((nakagami_ccdf(1, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!((nakagami_ccdf(2, 1.0).unwrap() - 3.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((nakagami_ccdf(2, 1.0).unwrap() - 0.40601).abs() < 1e-5);
        assert!(nakagami_ccdf(2, -0.1).is_err());
    }

    #[test]
    fn nakagami_matches_gamma_survival() {
        use statrs::distribution::{ContinuousCDF, Gamma};
        for m in 1..=3u32 {
            let gamma = Gamma::new(m as f64, m as f64).unwrap();
            for &x in &[0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0] {
                let ours = nakagami_ccdf(m, x).unwrap();
                assert!((ours - gamma.sf(x)).abs() < 1e-10, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn sat_distance_pdf_normalises() {
        let g = ScenarioConfig::default().geometry;
        let s = QuadratureSettings::default().with_rel_tol(1e-12);
        for &lambda in &[0.0, 1e-13, 1e-11, 1e-10] {
            let (lo, hi) = (g.min_distance(), g.max_distance());
            let mut breaks = vec![lo];
            breaks.extend((1..64).map(|i| lo + (hi - lo) * (i as f64 / 64.0).powi(3)));
            breaks.push(hi);
            let e = integrate_partitioned(|r| sat_distance_pdf(&g, lambda, r), &breaks, &s).unwrap();
            assert!((e.value - 1.0).abs() < 1e-9, "λ={lambda}: {}", e.value);
        }
    }

    #[test]
    fn sat_distance_cdf_integrates_pdf() {
        let g = ScenarioConfig::default().geometry;
        let lambda = 1e-11;
        let s = QuadratureSettings::default().with_rel_tol(1e-12);
        for &r in &[505e3, 520e3, 560e3, 700e3] {
            let e = integrate_finite(|x| sat_distance_pdf(&g, lambda, x), g.min_distance(), r, &s).unwrap();
            assert!((e.value - sat_distance_cdf(&g, lambda, r)).abs() < 1e-10);
        }
        assert!(sat_distance_pdf(&g, lambda, g.min_distance()) > 0.0);
        assert_eq!(sat_distance_pdf(&g, lambda, 100e3), 0.0);
    }

    #[test]
    fn bs_distance_law() {
        let lambda = 0.318 / KM2;
        let s = QuadratureSettings::default().with_rel_tol(1e-12);
        let e = integrate_semi_infinite(|l| bs_distance_pdf(lambda, l), 0.0, &s).unwrap();
        assert!((e.value - 1.0).abs() < 1e-9);
        let median = (2f64.ln() / (PI * lambda)).sqrt();
        assert!((bs_distance_cdf(lambda, median) - 0.5).abs() < 1e-15);
        assert!((median - 833.0).abs() < 1.0, "{median}");
    }

    proptest! {
        #[test]
        fn density_partition_is_exact(rp in 0.0f64..50e3, lt in 0.0f64..2.0, ln in 1e-7f64..1e-3, delta in 1u32..8) {
            let d = DeploymentDensities {
                sat_density: ln / KM2,
                bs_density: lt / KM2,
                ntn_user_density: 0.0,
                tn_user_density: 0.0,
                reuse_factor: delta,
            };
            let s = shared_sat_density(&d, rp).unwrap();
            let r = reserved_sat_density(&d, rp).unwrap();
            let total = d.sat_density / delta as f64;
            prop_assert!((s + r - total).abs() <= f64::EPSILON * total);
            prop_assert!(s >= 0.0 && r >= 0.0);
        }

        #[test]
        fn nakagami_is_exponential_at_m1(x in 0.0f64..50.0) {
            prop_assert!((nakagami_ccdf(1, x).unwrap() - (-x).exp()).abs() <= 1e-14);
        }
    }
}
