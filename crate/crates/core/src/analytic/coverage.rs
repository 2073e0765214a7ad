use std::f64::consts::PI;

use super::laplace::{ntn_interference_exponent, tn_interference_exponent};
use super::{CoverageCurve, CoveragePoint, Source, SpectrumClassDensities, UserClass};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::Scenario;
use crate::quadrature::{
    complete_bell, integrate_partitioned, try_integrate, QuadratureSettings,
};

/// Upper end of the scaled TN outer integral.
const TN_OUTER_LIMIT: f64 = 60.0;

fn outer_settings() -> QuadratureSettings {
    QuadratureSettings::default()
}

/// Returns `Some(p)` for thresholds that need no integration.
fn trivial_threshold(theta: f64) -> Result<Option<f64>> {
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "SINR threshold must be >= 0, got {theta}"
        )));
    }
    Ok(if theta == 0.0 {
        Some(1.0)
    } else if theta == f64::INFINITY {
        Some(0.0)
    } else {
        None
    })
}

/// Σ_{k<m} (−s)^k/k! · dᵏ/dsᵏ exp(G(s)) given the jet of G.
fn nakagami_sum(jet: &[f64], s: f64, m: usize) -> f64 {
    let derivs = &jet[1..];
    let mut sum = 0.0;
    let mut coeff = 1.0;
    for k in 0..m {
        sum += coeff * complete_bell(derivs, k);
        coeff *= -s / (k + 1) as f64;
    }
    jet[0].exp() * sum
}

/// Integrates `conditional(r)` against the serving-satellite distance law.
///
/// Uses w = λπ(R_S/R_E)(r² − R_min²), under which the law becomes a
/// truncated unit exponential on [0, W].
fn average_over_serving_satellite<F>(sc: &Scenario, conditional: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = &sc.geometry;
    let lambda = sc.densities.sat_density;
    if lambda == 0.0 {
        return Err(Error::InvalidArgument(
            "satellite density is zero: no serving satellite exists".into(),
        ));
    }
    let r_min = g.min_distance();
    let scale = lambda * PI * g.area_factor();
    let total = 2.0 * lambda * PI * g.shell_radius() * g.sat_altitude;
    let norm = -(-total).exp_m1();

    let mut breaks = vec![0.0];
    breaks.extend([0.5, 2.0, 5.0, 12.0, 30.0, 80.0].into_iter().filter(|&w| w < total));
    breaks.push(total);

    let e = try_integrate(
        |w: f64| {
            let r = (r_min * r_min + w / scale).sqrt();
            Ok(conditional(r)? * (-w).exp() / norm)
        },
        |f| integrate_partitioned(f, &breaks, &outer_settings()),
    )?;
    Ok(e.value.clamp(0.0, 1.0))
}

/// Coverage of the typical NTN user on the shared band: interference from
/// shared-band satellites beyond the serving one and from co-channel base
/// stations outside the protection zone.
pub fn coverage_ntn_shared(sc: &Scenario, theta: f64) -> Result<f64> {
    if let Some(p) = trivial_threshold(theta)? {
        return Ok(p);
    }
    let dens = SpectrumClassDensities::of(sc);
    let noise = sc.shared_noise()?;
    let m = sc.ntn.nakagami_m as usize;
    let rp = sc.spectrum.protection_radius;

    average_over_serving_satellite(sc, |r| {
        let s = m as f64 * theta * r.powf(sc.ntn.path_loss_exp) / sc.ntn.serving_gain();
        let gn = ntn_interference_exponent(s, dens.shared_sat, r, &sc.geometry, &sc.ntn, m - 1)?;
        let gt = tn_interference_exponent(s, dens.cochannel_bs, rp, &sc.tn, m - 1)?;
        let mut jet: Vec<f64> = gn.iter().zip(&gt).map(|(a, b)| a + b).collect();
        jet[0] -= s * noise;
        if m > 1 {
            jet[1] -= noise;
        }
        Ok(nakagami_sum(&jet, s, m))
    })
}

/// Coverage of the typical NTN user on the reserved band: satellite
/// interference only.
pub fn coverage_ntn_reserved(sc: &Scenario, theta: f64) -> Result<f64> {
    if let Some(p) = trivial_threshold(theta)? {
        return Ok(p);
    }
    let dens = SpectrumClassDensities::of(sc);
    let noise = sc.reserved_noise()?;
    let m = sc.ntn.nakagami_m as usize;

    average_over_serving_satellite(sc, |r| {
        let s = m as f64 * theta * r.powf(sc.ntn.path_loss_exp) / sc.ntn.serving_gain();
        let mut jet = ntn_interference_exponent(s, dens.reserved_sat, r, &sc.geometry, &sc.ntn, m - 1)?;
        jet[0] -= s * noise;
        if m > 1 {
            jet[1] -= noise;
        }
        Ok(nakagami_sum(&jet, s, m))
    })
}

/// Coverage of the typical TN user: Rayleigh serving link from the nearest
/// BS, interference from co-channel BSs beyond it and from every shared-band
/// satellite in view.
pub fn coverage_tn(sc: &Scenario, theta: f64) -> Result<f64> {
    if let Some(p) = trivial_threshold(theta)? {
        return Ok(p);
    }
    let dens = SpectrumClassDensities::of(sc);
    let noise = sc.shared_noise()?;
    let lambda_t = sc.densities.bs_density;
    if lambda_t == 0.0 {
        return Err(Error::InvalidArgument(
            "base-station density is zero: no serving BS exists".into(),
        ));
    }
    let r_min = sc.geometry.min_distance();
    let alpha = sc.tn.path_loss_exp;
    let gain = sc.tn.link_gain();

    // With s ∝ l^α_T and the exclusion radius equal to l, the BS exponent
    // is exactly l² times its value at l = 1 m.
    let g_tt_unit = tn_interference_exponent(theta / gain, dens.cochannel_bs, 1.0, &sc.tn, 0)?[0];

    // w = πλ_T l² turns the serving-distance law into a unit exponential,
    // and the BS term adds −κ·w. Integrating in v = (1 + κ)·w keeps the
    // integrand below e^{−v} at every threshold, so [0, TN_OUTER_LIMIT]
    // loses less than 1e-26.
    let kappa = -g_tt_unit / (PI * lambda_t);
    let scale = 1.0 + kappa;
    let e = try_integrate(
        |v: f64| {
            let w = v / scale;
            let l2 = w / (PI * lambda_t);
            let s = theta * l2.powf(alpha / 2.0) / gain;
            let g_nt = ntn_interference_exponent(s, dens.shared_sat, r_min, &sc.geometry, &sc.ntn, 0)?[0];
            Ok((g_nt - s * noise - v).exp() / scale)
        },
        |f| integrate_partitioned(f, &[0.0, 0.5, 2.0, 5.0, 12.0, 25.0, TN_OUTER_LIMIT], &outer_settings()),
    )?;
    Ok(e.value.clamp(0.0, 1.0))
}

pub fn coverage(sc: &Scenario, class: UserClass, theta: f64) -> Result<f64> {
    match class {
        UserClass::NtnShared => coverage_ntn_shared(sc, theta),
        UserClass::NtnReserved => coverage_ntn_reserved(sc, theta),
        UserClass::Tn => coverage_tn(sc, theta),
    }
}

/// Analytic coverage at each threshold, evaluated data-parallel.
pub fn coverage_curve(
    sc: &Scenario,
    class: UserClass,
    thresholds: &[f64],
    exec: Execution,
) -> Result<CoverageCurve> {
    let probs = exec.map_slice(thresholds, |&t| coverage(sc, class, t));
    let points = thresholds
        .iter()
        .zip(probs)
        .map(|(&threshold, p)| {
            Ok(CoveragePoint {
                threshold,
                probability: p?,
                half_width: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageCurve {
        user_class: class,
        source: Source::Analytic,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NoiseModel, ScenarioConfig};

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    fn reference() -> Scenario {
        ScenarioConfig::default().validate().unwrap()
    }

    #[test]
    fn interference_and_noise_free_users_are_always_covered() {
        let sc = reference()
            .modified(|c| {
                c.densities.bs_density = 0.0;
                c.densities.reuse_factor = u32::MAX;
                c.noise = NoiseModel::InterferenceLimited;
            })
            .unwrap();
        for t in [-10.0, 0.0, 20.0, 60.0] {
            assert!((coverage_ntn_shared(&sc, db(t)).unwrap() - 1.0).abs() < 1e-6);
        }
        // R_p = 0 puts every satellite on the shared band.
        let sc = reference()
            .modified(|c| {
                c.spectrum.protection_radius = 0.0;
                c.noise = NoiseModel::InterferenceLimited;
            })
            .unwrap();
        assert!((coverage_ntn_reserved(&sc, db(10.0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tn_without_interference_is_covered() {
        let sc = reference()
            .modified(|c| {
                c.densities.sat_density = 1e-30;
                c.densities.reuse_factor = 1_000_000_000;
                c.noise = NoiseModel::InterferenceLimited;
            })
            .unwrap();
        let p = coverage_tn(&sc, db(0.0)).unwrap();
        assert!(p > 0.999, "{p}");
    }

    #[test]
    fn trivial_thresholds() {
        let sc = reference();
        assert_eq!(coverage_tn(&sc, 0.0).unwrap(), 1.0);
        assert_eq!(coverage_ntn_shared(&sc, f64::INFINITY).unwrap(), 0.0);
        assert!(coverage_ntn_reserved(&sc, -1.0).is_err());
    }

    #[test]
    fn curves_are_monotone_and_bounded() {
        let sc = reference();
        let thresholds: Vec<f64> = (-10..=20).step_by(2).map(|t| db(t as f64)).collect();
        for class in UserClass::ALL {
            let curve = coverage_curve(&sc, class, &thresholds, Execution::Parallel).unwrap();
            for w in curve.points.windows(2) {
                assert!(w[0].probability >= w[1].probability, "{class:?}");
            }
            for p in &curve.points {
                assert!((0.0..=1.0).contains(&p.probability));
            }
        }
    }

    #[test]
    fn single_term_shortcut_matches_rayleigh_formula() {
        // With m = 1 the Nakagami sum is just L(s).
        let jet = [-0.3, 1.0, 2.0];
        assert!((nakagami_sum(&jet, 5.0, 1) - (-0.3f64).exp()).abs() < 1e-15);
        // m = 2: L(s) − s L′(s) = e^G (1 − s G′)
        let v = nakagami_sum(&jet, 5.0, 2);
        assert!((v - (-0.3f64).exp() * (1.0 - 5.0)).abs() < 1e-14);
    }
}
