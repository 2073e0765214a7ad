//! Laplace-transform exponents of the interference fields.
//!
//! Both functions return the jet `[g(s), g′(s), …, g⁽ᵏ⁾(s)]` of the exponent
//! g, so that L(s) = exp(g(s)). Derivatives are taken analytically under
//! the integral sign; no finite differences are involved.

use std::f64::consts::PI;

use statrs::function::beta::{checked_beta_reg, ln_beta};

use crate::error::{Error, Result};
use crate::model::{GeometryParams, NtnChannelParams, TnChannelParams};
use crate::quadrature::{integrate_finite, QuadratureSettings};

/// Inner integrals are nested inside outer ones, so they run tighter and
/// purely relative.
fn inner_settings() -> QuadratureSettings {
    QuadratureSettings::default()
        .with_rel_tol(1e-10)
        .with_abs_tol(f64::MIN_POSITIVE)
}

/// (m)_j = m(m+1)…(m+j−1).
fn rising(m: f64, j: usize) -> f64 {
    (0..j).map(|i| m + i as f64).product()
}

/// j-th derivative of F(z) = 1 − (1 + z)^(−m).
fn kernel(m: f64, z: f64, j: usize) -> f64 {
    if j == 0 {
        -(-m * z.ln_1p()).exp_m1()
    } else {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sign * rising(m, j) * (1.0 + z).powf(-m - j as f64)
    }
}

/// Exponent of the Laplace transform of interference from a satellite field
/// of density `density` occupying distances [`r_near`, R_max]:
///
/// g(s) = −2πλ(R_S/R_E) ∫ [1 − (1 + P_N G_sl β_N0 s v^(−α_N)/m)^(−m)] v dv.
///
/// Interferers use the side-lobe gain and Nakagami-m fading.
pub fn ntn_interference_exponent(
    s: f64,
    density: f64,
    r_near: f64,
    geometry: &GeometryParams,
    ntn: &NtnChannelParams,
    order: usize,
) -> Result<Vec<f64>> {
    let (r_min, r_max) = (geometry.min_distance(), geometry.max_distance());
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("Laplace variable must be >= 0, got {s}")));
    }
    let slack = 1e-9 * r_max;
    if !(r_near >= r_min - slack && r_near <= r_max + slack) {
        return Err(Error::InvalidArgument(format!(
            "interferer lower limit {r_near} m outside [{r_min}, {r_max}] m"
        )));
    }
    let mut jet = vec![0.0; order + 1];
    let r_near = r_near.clamp(r_min, r_max);
    if density == 0.0 || r_near >= r_max {
        return Ok(jet);
    }

    // With u = v²/R_max², the per-interferer scale is β(u) = β₀ u^(−α/2).
    let m = ntn.nakagami_m as f64;
    let half_alpha = 0.5 * ntn.path_loss_exp;
    let beta0 = ntn.interfering_gain() * r_max.powf(-ntn.path_loss_exp) / m;
    let lo = (r_near / r_max).powi(2);
    let prefactor = -PI * density * geometry.area_factor() * r_max * r_max;
    let settings = inner_settings();

    for (j, out) in jet.iter_mut().enumerate() {
        if j == 0 && s == 0.0 {
            continue;
        }
        let e = integrate_finite(
            |u: f64| {
                let beta = beta0 * u.powf(-half_alpha);
                kernel(m, s * beta, j) * beta.powi(j as i32)
            },
            lo,
            1.0,
            &settings,
        )?;
        *out = prefactor * e.value;
    }
    Ok(jet)
}

/// Exponent of the Laplace transform of interference from base stations of
/// density `density` beyond `exclusion`, with Rayleigh fading:
///
/// g(s) = −2πλ ∫_exclusion^∞ [1 − 1/(1 + P_T G_T β_T0 s x^(−α_T))] x dx.
///
/// At s = 0 with zero exclusion the derivatives are infinite (the mean
/// interference of an unbounded field diverges) and are returned as such.
pub fn tn_interference_exponent(
    s: f64,
    density: f64,
    exclusion: f64,
    tn: &TnChannelParams,
    order: usize,
) -> Result<Vec<f64>> {
    let alpha = tn.path_loss_exp;
    if !(alpha > 2.0) {
        return Err(Error::NonDecaying(format!(
            "planar interference diverges for path-loss exponent {alpha} <= 2"
        )));
    }
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("Laplace variable must be >= 0, got {s}")));
    }
    if exclusion.is_nan() || exclusion < 0.0 {
        return Err(Error::InvalidArgument(format!("exclusion radius must be >= 0, got {exclusion}")));
    }
    let mut jet = vec![0.0; order + 1];
    if density == 0.0 || exclusion == f64::INFINITY {
        return Ok(jet);
    }
    let c = tn.link_gain();

    if s == 0.0 {
        // g⁽ʲ⁾(0) = −2πλ F⁽ʲ⁾(0) c^j ∫ x^(1−αj) dx
        for (j, out) in jet.iter_mut().enumerate().skip(1) {
            let jf = j as f64;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let tail = if exclusion > 0.0 {
                exclusion.powf(2.0 - alpha * jf) / (alpha * jf - 2.0)
            } else {
                f64::INFINITY
            };
            *out = -2.0 * PI * density * sign * rising(1.0, j) * c.powi(j as i32) * tail;
        }
        return Ok(jet);
    }

    // x = ρy with ρ = (cs)^(1/α) gives z = y^(−α). With q = y^α and
    // t = 1/(1 + q) the radial integrals become incomplete beta functions:
    //   ∫_a^∞ F(z) y dy               = B_τ(1 − 2/α, 2/α) / α
    //   ∫_a^∞ F⁽ʲ⁾(z) z^j y dy (j ≥ 1) = ±j!·B_τ(j − 2/α, 1 + 2/α) / α
    // where τ = 1/(1 + a^α).
    let rho = (c * s).powf(1.0 / alpha);
    let tau = 1.0 / (1.0 + (exclusion / rho).powf(alpha));
    let d = 2.0 / alpha;

    for (j, out) in jet.iter_mut().enumerate() {
        let jf = j as f64;
        let (p, q, coeff) = if j == 0 {
            (1.0 - d, d, 1.0)
        } else {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            (jf - d, 1.0 + d, sign * rising(1.0, j))
        };
        let radial = coeff * incomplete_beta(p, q, tau)? / alpha;
        *out = -2.0 * PI * density * rho * rho * s.powi(-(j as i32)) * radial;
    }
    Ok(jet)
}

/// Unregularized B_x(p, q) = ∫₀ˣ t^(p−1) (1−t)^(q−1) dt.
fn incomplete_beta(p: f64, q: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let reg = checked_beta_reg(p, q, x)
        .map_err(|e| Error::InvalidArgument(format!("incomplete beta B_{x}({p}, {q}): {e}")))?;
    Ok(reg * ln_beta(p, q).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioConfig;
    use crate::quadrature::{finite_diff_derivative, nth_derivative_exp, ExpFormTransform, StepRule};

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    #[test]
    fn empty_fields_and_zero_s() {
        let c = cfg();
        let r0 = c.geometry.min_distance();
        assert_eq!(ntn_interference_exponent(0.0, 1e-11, r0, &c.geometry, &c.ntn, 0).unwrap(), vec![0.0]);
        assert_eq!(ntn_interference_exponent(3.0, 0.0, r0, &c.geometry, &c.ntn, 2).unwrap(), vec![0.0; 3]);
        assert_eq!(tn_interference_exponent(0.0, 1e-7, 12e3, &c.tn, 0).unwrap(), vec![0.0]);
        assert_eq!(tn_interference_exponent(1e6, 0.0, 12e3, &c.tn, 1).unwrap(), vec![0.0; 2]);
        assert_eq!(tn_interference_exponent(1e6, 1e-7, f64::INFINITY, &c.tn, 0).unwrap(), vec![0.0]);
    }

    #[test]
    fn tn_derivative_at_zero_is_mean_interference() {
        let c = cfg();
        let (lambda, rp) = (1.59e-7, 12e3);
        let jet = tn_interference_exponent(0.0, lambda, rp, &c.tn, 1).unwrap();
        let alpha = c.tn.path_loss_exp;
        let mean = 2.0 * PI * lambda * c.tn.link_gain() * rp.powf(2.0 - alpha) / (alpha - 2.0);
        assert!((jet[1] + mean).abs() < 1e-12 * mean);
        // Continuity from the right.
        let near = tn_interference_exponent(1e-3, lambda, rp, &c.tn, 1).unwrap();
        assert!((near[1] - jet[1]).abs() < 1e-3 * mean, "{near:?} {jet:?}");
    }

    #[test]
    fn tn_closed_form_matches_direct_quadrature() {
        use crate::quadrature::integrate_semi_infinite;
        let c = cfg();
        let lambda = 1.59e-7;
        let g = c.tn.link_gain();
        let alpha = c.tn.path_loss_exp;
        for &(s, rp) in &[(1e6, 0.0), (1e6, 12e3), (1e9, 500.0), (3e3, 40.0), (1e12, 2e4)] {
            let jet = tn_interference_exponent(s, lambda, rp, &c.tn, 2).unwrap();
            for (j, &got) in jet.iter().enumerate() {
                let direct = integrate_semi_infinite(
                    |x: f64| {
                        let z = g * s * x.powf(-alpha);
                        let k = if j == 0 { z / (1.0 + z) } else { kernel(1.0, z, j) * (g * x.powf(-alpha)).powi(j as i32) };
                        k * x
                    },
                    rp,
                    &QuadratureSettings::default().with_rel_tol(1e-11),
                )
                .unwrap()
                .value;
                let expected = -2.0 * PI * lambda * direct;
                assert!((got - expected).abs() <= 1e-8 * expected.abs(), "s={s} rp={rp} j={j}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = cfg();
        let mut tn = c.tn;
        tn.path_loss_exp = 2.0;
        assert!(matches!(tn_interference_exponent(1.0, 1e-7, 0.0, &tn, 0), Err(Error::NonDecaying(_))));
        assert!(tn_interference_exponent(-1.0, 1e-7, 0.0, &c.tn, 0).is_err());
        assert!(ntn_interference_exponent(1.0, 1e-11, 10.0, &c.geometry, &c.ntn, 0).is_err());
    }

    #[test]
    fn transforms_decrease_in_s() {
        let c = cfg();
        let r = 530e3;
        let mut prev_n = 0.0;
        let mut prev_t = 0.0;
        for i in 1..=20 {
            let s = 1e5 * 1.7f64.powi(i);
            let gn = ntn_interference_exponent(s, 5e-12, r, &c.geometry, &c.ntn, 0).unwrap()[0];
            let gt = tn_interference_exponent(s * 1e-3, 1.59e-7, 1e3, &c.tn, 0).unwrap()[0];
            assert!(gn < prev_n && gt < prev_t, "s={s}");
            prev_n = gn;
            prev_t = gt;
        }
    }

    #[test]
    fn bell_composition_matches_finite_differences_at_m2() {
        let mut c = cfg();
        c.ntn.nakagami_m = 2;
        let r = 540e3;
        let lambda = 5e-12;
        let tf = ExpFormTransform::new(
            |s, k| ntn_interference_exponent(s, lambda, r, &c.geometry, &c.ntn, k),
            3,
        );
        let lap = |s: f64| tf.value(s).unwrap();
        for &s in &[1e6, 5e6, 2e7] {
            for k in 1..=3 {
                let exact = nth_derivative_exp(&tf, s, k).unwrap();
                let fd = finite_diff_derivative(lap, s, k, StepRule::Relative(0.05)).unwrap();
                assert!((exact - fd).abs() <= 1e-5 * exact.abs(), "s={s} k={k}: {exact} vs {fd}");
            }
        }
    }
}
