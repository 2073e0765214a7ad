use super::{coverage, Source, SpectrumClassDensities, UserClass};
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::quadrature::{integrate_with_cutoff, QuadratureSettings, TailCutoff};

/// Width of each panel of the rate integral, in bits. Coverage is smooth
/// in log₂(1 + θ), so wide panels converge as fast as narrow ones.
const ADR_PANEL_BITS: f64 = 4.0;

/// Spectral efficiency at which a coverage that has not yet fallen off is
/// declared unbounded. 2^256 is far past any physical SINR and still well
/// inside the range where the coverage integrals stay finite.
const ADR_MAX_BITS: f64 = 256.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// R_p, m.
    pub protection_radius: f64,
    /// ω_s.
    pub shared_fraction: f64,
}

impl OperatingPoint {
    pub fn of(sc: &Scenario) -> Self {
        OperatingPoint {
            protection_radius: sc.spectrum.protection_radius,
            shared_fraction: sc.spectrum.shared_fraction,
        }
    }
}

/// Whether each class meets its ADR floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feasibility {
    pub ntn_shared: bool,
    pub ntn_reserved: bool,
    pub tn: bool,
}

impl Feasibility {
    pub fn all(&self) -> bool {
        self.ntn_shared && self.ntn_reserved && self.tn
    }
}

/// Per-class area data rates (bit/s/m²) and their weighted sum at one
/// operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdrReport {
    pub operating_point: OperatingPoint,
    pub adr_ntn_shared: f64,
    pub adr_ntn_reserved: f64,
    pub adr_tn: f64,
    pub ws_adr: f64,
    pub feasibility: Feasibility,
    pub source: Source,
}

impl AdrReport {
    pub fn new(sc: &Scenario, ntn_shared: f64, ntn_reserved: f64, tn: f64, source: Source) -> Self {
        let w = &sc.weights;
        AdrReport {
            operating_point: OperatingPoint::of(sc),
            adr_ntn_shared: ntn_shared,
            adr_ntn_reserved: ntn_reserved,
            adr_tn: tn,
            ws_adr: w.weighted_sum(ntn_shared, ntn_reserved, tn),
            feasibility: Feasibility {
                ntn_shared: ntn_shared >= w.adr_ntn_shared_min,
                ntn_reserved: ntn_reserved >= w.adr_ntn_reserved_min,
                tn: tn >= w.adr_tn_min,
            },
            source,
        }
    }

    pub fn feasible(&self) -> bool {
        self.feasibility.all()
    }

    pub fn get(&self, class: UserClass) -> f64 {
        match class {
            UserClass::NtnShared => self.adr_ntn_shared,
            UserClass::NtnReserved => self.adr_ntn_reserved,
            UserClass::Tn => self.adr_tn,
        }
    }
}

/// λ·B for a class: the density of co-channel transmitters serving it and
/// the bandwidth it occupies.
pub fn density_bandwidth(sc: &Scenario, class: UserClass) -> f64 {
    let d = SpectrumClassDensities::of(sc);
    let s = &sc.spectrum;
    match class {
        UserClass::NtnShared => d.shared_sat * s.shared_bandwidth(),
        UserClass::NtnReserved => d.reserved_sat * s.reserved_bandwidth(),
        UserClass::Tn => d.cochannel_bs * s.shared_bandwidth(),
    }
}

/// λ·B·∫₀^∞ P(SINR ≥ 2^t − 1) dt.
pub fn class_adr(sc: &Scenario, class: UserClass) -> Result<f64> {
    let lb = density_bandwidth(sc, class);
    if lb == 0.0 {
        return Ok(0.0);
    }
    let settings = QuadratureSettings::default().with_rel_tol(1e-7).with_abs_tol(1e-10);
    let spectral = integrate_with_cutoff(
        |t| coverage(sc, class, t.exp2() - 1.0),
        0.0,
        &TailCutoff {
            panel_width: ADR_PANEL_BITS,
            max_panels: (ADR_MAX_BITS / ADR_PANEL_BITS) as usize,
            ..TailCutoff::default()
        },
        &settings,
    )
    .map_err(|e| match e {
        Error::NonDecaying(msg) => Error::Unbounded(format!(
            "{} coverage does not fall off with the threshold ({msg})",
            class.label()
        )),
        other => other,
    })?;
    Ok(lb * spectral.value)
}

pub fn adr_ntn_shared(sc: &Scenario) -> Result<f64> {
    class_adr(sc, UserClass::NtnShared)
}

pub fn adr_ntn_reserved(sc: &Scenario) -> Result<f64> {
    class_adr(sc, UserClass::NtnReserved)
}

pub fn adr_tn(sc: &Scenario) -> Result<f64> {
    class_adr(sc, UserClass::Tn)
}

pub fn ws_adr(sc: &Scenario) -> Result<AdrReport> {
    Ok(AdrReport::new(
        sc,
        adr_ntn_shared(sc)?,
        adr_ntn_reserved(sc)?,
        adr_tn(sc)?,
        Source::Analytic,
    ))
}
