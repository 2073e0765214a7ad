//! Adaptive Gauss–Kronrod quadrature, semi-infinite maps, and derivatives of
//! exponential-form Laplace transforms.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiInfiniteMap {
    /// u = a + t/(1 − t). Suits integrands with polynomial tails.
    Algebraic,
    /// u = a − ln(1 − t).
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub semi_infinite_map: SemiInfiniteMap,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 500,
            semi_infinite_map: SemiInfiniteMap::Algebraic,
        }
    }
}

impl QuadratureSettings {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(Error::InvalidArgument(format!(
                "quadrature settings need positive tolerances and at least one subdivision: {self:?}"
            )));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss
// weights (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208643474262,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integrand is not finite on [{a:e}, {b:e}]"
        )));
    }
    Ok(Panel { a, b, value, error })
}

/// ∫_a^b f over an initial partition given by `breaks` (sorted, endpoints included).
pub fn integrate_partitioned<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    settings.check()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument(format!(
            "integration breakpoints must be sorted and at least two: {breaks:?}"
        )));
    }
    let mut panels = Vec::with_capacity(settings.max_subdivisions + breaks.len());
    for w in breaks.windows(2) {
        if w[0] < w[1] {
            panels.push(gauss_kronrod_21(&f, w[0], w[1])?);
        }
    }
    let mut evaluations = 21 * panels.len();
    if panels.is_empty() {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations });
    }

    let mut splits = 0;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= settings.tolerance(value) {
            return Ok(Estimate { value, error, evaluations });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        let unsplittable = !(p.a < mid && mid < p.b);
        if splits >= settings.max_subdivisions || unsplittable {
            return Err(Error::QuadratureBudget {
                estimate: value,
                achieved: error,
                subdivisions: splits,
            });
        }
        panels[worst] = gauss_kronrod_21(&f, p.a, mid)?;
        panels.push(gauss_kronrod_21(&f, mid, p.b)?);
        evaluations += 42;
        splits += 1;
    }
}

/// ∫_a^b f. Reversed limits are rejected.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "finite integration needs finite a <= b, got [{a}, {b}]"
        )));
    }
    integrate_partitioned(f, &[a, b], settings)
}

/// Rejects integrands whose magnitude does not fall faster than 1/u.
fn probe_tail<F: Fn(f64) -> f64>(f: &F, a: f64) -> Result<()> {
    let scale = a.abs().max(1.0);
    let weight = |k: f64| {
        let x = a + k * scale;
        f(x).abs() * (x - a + scale)
    };
    let near = weight(1e4);
    let far = weight(1e12);
    if !near.is_finite() || !far.is_finite() {
        return Err(Error::NonDecaying(format!(
            "integrand is not finite far beyond a = {a:e}"
        )));
    }
    if far > 0.0 && far >= 0.5 * near {
        return Err(Error::NonDecaying(format!(
            "|f(u)|·u does not shrink beyond a = {a:e} ({near:e} -> {far:e})"
        )));
    }
    Ok(())
}

/// ∫_a^∞ f after mapping [a, ∞) onto [0, 1).
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument(format!("lower limit must be finite, got {a}")));
    }
    probe_tail(&f, a)?;
    match settings.semi_infinite_map {
        SemiInfiniteMap::Algebraic => integrate_partitioned(
            |t: f64| {
                let w = 1.0 - t;
                f(a + t / w) / (w * w)
            },
            &decade_breaks(|x| x / (1.0 + x), 12),
            settings,
        ),
        SemiInfiniteMap::Exponential => integrate_partitioned(
            |t: f64| {
                let w = 1.0 - t;
                f(a - (-t).ln_1p()) / w
            },
            &decade_breaks(|x| -(-x).exp_m1(), 2),
            settings,
        ),
    }
}

/// Images of x = 10⁻⁶ … 10^`top` under the map, so that features at any
/// of those scales start out on their own panel.
fn decade_breaks(map: impl Fn(f64) -> f64, top: i32) -> Vec<f64> {
    let mut breaks = vec![0.0];
    breaks.extend((-6..=top).map(|k| map(10f64.powi(k))).filter(|&t| t < 1.0));
    breaks.push(1.0);
    breaks.dedup();
    breaks
}

/// Runs `integrate` on an infallible view of `f`; the first error `f`
/// produces aborts the result.
pub fn try_integrate<F, I>(f: F, integrate: I) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
    I: FnOnce(&dyn Fn(f64) -> f64) -> Result<Estimate>,
{
    let failure = std::cell::RefCell::new(None);
    let eval = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let out = integrate(&eval);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => out,
    }
}

/// Integrates a nonnegative, eventually decaying `f` over [a, ∞) panel by
/// panel, stopping once `f` at the end of `successive` consecutive panels is
/// below `floor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCutoff {
    pub panel_width: f64,
    pub floor: f64,
    pub successive: usize,
    pub max_panels: usize,
}

impl Default for TailCutoff {
    fn default() -> Self {
        TailCutoff {
            panel_width: 1.0,
            floor: 1e-6,
            successive: 3,
            max_panels: 256,
        }
    }
}

pub fn integrate_with_cutoff<F: Fn(f64) -> Result<f64>>(
    f: F,
    a: f64,
    cutoff: &TailCutoff,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    // The integrand may fail; stash the first error and poison the sum.
    let failure = std::cell::RefCell::new(None);
    let eval = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };

    let mut total = Estimate { value: 0.0, error: 0.0, evaluations: 0 };
    let mut quiet = 0;
    for k in 0..cutoff.max_panels {
        let lo = a + k as f64 * cutoff.panel_width;
        let hi = lo + cutoff.panel_width;
        let panel = integrate_finite(&eval, lo, hi, settings);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let panel = panel?;
        total.value += panel.value;
        total.error += panel.error;
        total.evaluations += panel.evaluations + 1;

        let end = eval(hi);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        if end.abs() < cutoff.floor {
            quiet += 1;
            if quiet >= cutoff.successive {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonDecaying(format!(
        "integrand still above {} after {} panels",
        cutoff.floor, cutoff.max_panels
    )))
}

/// L(s) = exp(g(s)) with the exponent's derivatives known analytically.
///
/// `jet(s, k)` must return `[g(s), g′(s), …, g⁽ᵏ⁾(s)]` for every
/// `k <= max_order`.
pub struct ExpFormTransform<F> {
    jet: F,
    max_order: usize,
}

impl<F> ExpFormTransform<F>
where
    F: Fn(f64, usize) -> Result<Vec<f64>>,
{
    pub fn new(jet: F, max_order: usize) -> Self {
        ExpFormTransform { jet, max_order }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn exponent_jet(&self, s: f64, k: usize) -> Result<Vec<f64>> {
        if k > self.max_order {
            return Err(Error::DerivativeOrder {
                requested: k,
                available: self.max_order,
            });
        }
        (self.jet)(s, k)
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        Ok(self.exponent_jet(s, 0)?[0].exp())
    }
}

/// Complete Bell polynomial B_n(x₁, …, x_n); `x[i]` holds x_{i+1}.
pub fn complete_bell(x: &[f64], n: usize) -> f64 {
    assert!(x.len() >= n, "need {n} arguments, got {}", x.len());
    let mut b = vec![1.0; n + 1];
    for m in 0..n {
        // B_{m+1} = Σ_i C(m, i) B_{m−i} x_{i+1}
        let mut binom = 1.0;
        let mut acc = 0.0;
        for i in 0..=m {
            acc += binom * b[m - i] * x[i];
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        b[m + 1] = acc;
    }
    b[n]
}

/// dᵏ/dsᵏ exp(g(s)) from the jet `[g, g′, …, g⁽ᵏ⁾]` via Faà di Bruno.
pub fn exp_derivative_from_jet(jet: &[f64], k: usize) -> Result<f64> {
    if jet.len() < k + 1 {
        return Err(Error::DerivativeOrder {
            requested: k,
            available: jet.len().saturating_sub(1),
        });
    }
    Ok(jet[0].exp() * complete_bell(&jet[1..], k))
}

pub fn nth_derivative_exp<F>(tf: &ExpFormTransform<F>, s: f64, k: usize) -> Result<f64>
where
    F: Fn(f64, usize) -> Result<Vec<f64>>,
{
    let jet = tf.exponent_jet(s, k)?;
    exp_derivative_from_jet(&jet, k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Absolute(f64),
    /// h·max(|s|, 1).
    Relative(f64),
}

/// Central-difference k-th derivative (k ∈ {1, 2, 3}) refined by two rounds of
/// Richardson extrapolation. Intended as an independent cross-check.
pub fn finite_diff_derivative<F: Fn(f64) -> f64>(
    f: F,
    s: f64,
    k: usize,
    step: StepRule,
) -> Result<f64> {
    let h = match step {
        StepRule::Absolute(h) => h,
        StepRule::Relative(h) => h * s.abs().max(1.0),
    };
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "finite differences support k in 1..=3, got {k}"
        )));
    }
    if !(h > 0.0) || s + 0.25 * h == s {
        return Err(Error::StepUnderflow(s));
    }
    let central = |h: f64| match k {
        1 => (f(s + h) - f(s - h)) / (2.0 * h),
        2 => (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h),
        _ => (f(s + 2.0 * h) - 2.0 * f(s + h) + 2.0 * f(s - h) - f(s - 2.0 * h)) / (2.0 * h * h * h),
    };
    let d0 = central(h);
    let d1 = central(0.5 * h);
    let d2 = central(0.25 * h);
    let r1 = (4.0 * d1 - d0) / 3.0;
    let r2 = (4.0 * d2 - d1) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}
