use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::model::Scenario;

/// Refuse realizations that would not fit comfortably in memory.
const MAX_MEAN_NODES: f64 = 5e7;

/// One visible satellite, seen from the typical user at (0, 0, R_E).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Satellite {
    /// Earth-centred position, m.
    pub position: [f64; 3],
    pub distance: f64,
    /// Nakagami-m power gain towards the typical user.
    pub fading: f64,
    /// On the typical user's reuse channel.
    pub cochannel: bool,
    /// Uniform draw deciding whether this satellite's own user has an empty
    /// protection zone. Kept raw so the same scene can be re-marked for any
    /// protection radius.
    pub activity_draw: f64,
}

impl Satellite {
    /// True when this satellite transmits on the shared band, given the
    /// void probability of its own user's protection zone.
    pub fn shared_active(&self, void_probability: f64) -> bool {
        self.activity_draw < void_probability
    }
}

/// One base station on the ground plane; the typical user is the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseStation {
    pub position: [f64; 2],
    pub distance: f64,
    /// Rayleigh power gain towards the typical user.
    pub fading: f64,
    pub cochannel: bool,
}

/// A network realization around the typical user.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub satellites: Vec<Satellite>,
    pub base_stations: Vec<BaseStation>,
}

/// The generator for trial `trial`: a ChaCha stream keyed by the trial
/// index, so every trial sees the same numbers whatever the worker count.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64, what: &str) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    if !(mean.is_finite() && mean > 0.0 && mean <= MAX_MEAN_NODES) {
        return Err(Error::InvalidArgument(format!(
            "mean {what} count per scene is {mean:e}, outside (0, {MAX_MEAN_NODES:e}]"
        )));
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.sample(rng) as usize)
}

/// A PPP of density λ_N on the shell, restricted to the cap above the
/// user's horizon.
pub fn sample_satellites<R: Rng + ?Sized>(rng: &mut R, sc: &Scenario) -> Result<Vec<Satellite>> {
    let g = &sc.geometry;
    let count = poisson_count(rng, sc.densities.sat_density * g.visible_cap_area(), "satellite")?;
    let (re, rs) = (g.earth_radius, g.shell_radius());
    let cos_min = re / rs;
    let m = sc.ntn.nakagami_m as f64;
    let fading = Gamma::new(m, sc.ntn.nakagami_omega / m)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let reuse = sc.densities.reuse_factor as f64;

    let mut sats = Vec::with_capacity(count);
    for _ in 0..count {
        // Uniform on the cap: cos θ is uniform on [R_E/R_S, 1].
        let cos_t = cos_min + (1.0 - cos_min) * rng.random::<f64>();
        let phi = 2.0 * PI * rng.random::<f64>();
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let position = [rs * sin_t * phi.cos(), rs * sin_t * phi.sin(), rs * cos_t];
        let d2 = (re * re + rs * rs - 2.0 * re * rs * cos_t).max(0.0);
        sats.push(Satellite {
            position,
            distance: d2.sqrt().max(g.min_distance()),
            fading: fading.sample(rng),
            cochannel: rng.random::<f64>() * reuse < 1.0,
            activity_draw: rng.random(),
        });
    }
    Ok(sats)
}

/// A PPP of density λ_T on the square of half-width `half_width` centred
/// on the user.
pub fn sample_base_stations<R: Rng + ?Sized>(
    rng: &mut R,
    sc: &Scenario,
    half_width: f64,
) -> Result<Vec<BaseStation>> {
    let side = 2.0 * half_width;
    let count = poisson_count(rng, sc.densities.bs_density * side * side, "base-station")?;
    let reuse = sc.densities.reuse_factor as f64;
    let mut bss = Vec::with_capacity(count);
    for _ in 0..count {
        let x = half_width * (2.0 * rng.random::<f64>() - 1.0);
        let y = half_width * (2.0 * rng.random::<f64>() - 1.0);
        let fading: f64 = Exp1.sample(rng);
        bss.push(BaseStation {
            position: [x, y],
            distance: (x * x + y * y).sqrt(),
            fading,
            cochannel: rng.random::<f64>() * reuse < 1.0,
        });
    }
    Ok(bss)
}

/// Satellites first, then base stations, from the trial's own stream.
pub fn sample_scene(sc: &Scenario, seed: u64, trial: u64) -> Result<Scene> {
    let mut rng = trial_rng(seed, trial);
    let satellites = sample_satellites(&mut rng, sc)?;
    let base_stations = sample_base_stations(&mut rng, sc, sc.sim_region_half_width)?;
    Ok(Scene {
        satellites,
        base_stations,
    })
}

impl Scene {
    pub fn nearest_satellite(&self) -> Option<usize> {
        nearest(self.satellites.iter().map(|s| s.distance))
    }

    pub fn nearest_base_station(&self) -> Option<usize> {
        nearest(self.base_stations.iter().map(|b| b.distance))
    }

    /// Flattened node list for inspection, satellites first.
    pub fn nodes(&self, void_probability: f64) -> Vec<SceneNode> {
        let sats = self.satellites.iter().map(|s| SceneNode {
            kind: NodeKind::Satellite,
            position: s.position,
            distance: s.distance,
            fading: s.fading,
            cochannel: s.cochannel,
            shared_active: Some(s.shared_active(void_probability)),
        });
        let bss = self.base_stations.iter().map(|b| SceneNode {
            kind: NodeKind::BaseStation,
            position: [b.position[0], b.position[1], 0.0],
            distance: b.distance,
            fading: b.fading,
            cochannel: b.cochannel,
            shared_active: None,
        });
        sats.chain(bss).collect()
    }
}

fn nearest(distances: impl Iterator<Item = f64>) -> Option<usize> {
    distances
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((i, d)),
        })
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Satellite,
    BaseStation,
}

impl NodeKind {
    pub fn label(self) -> &'static str {
        match self {
            NodeKind::Satellite => "satellite",
            NodeKind::BaseStation => "base_station",
        }
    }
}

/// One row of a scene dump. Satellite positions are Earth-centred; base
/// stations are on the ground plane with z = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneNode {
    pub kind: NodeKind,
    pub position: [f64; 3],
    pub distance: f64,
    pub fading: f64,
    pub cochannel: bool,
    /// `None` for base stations.
    pub shared_active: Option<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioConfig;

    fn reference() -> Scenario {
        ScenarioConfig::default().validate().unwrap()
    }

    #[test]
    fn scenes_are_reproducible_per_trial() {
        let sc = reference();
        let a = sample_scene(&sc, 7, 3).unwrap();
        let b = sample_scene(&sc, 7, 3).unwrap();
        let c = sample_scene(&sc, 7, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn satellites_are_visible_and_on_the_shell() {
        let sc = reference();
        let g = sc.geometry;
        let scene = sample_scene(&sc, 1, 0).unwrap();
        assert!(!scene.satellites.is_empty());
        for s in &scene.satellites {
            let r = s.position.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((r - g.shell_radius()).abs() < 1e-6 * r);
            let dz = s.position[2] - g.earth_radius;
            let d = (s.position[0].powi(2) + s.position[1].powi(2) + dz * dz).sqrt();
            assert!((d - s.distance).abs() < 1e-6 * d);
            assert!(s.distance >= g.min_distance() && s.distance <= g.max_distance() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn base_stations_fill_the_square() {
        let sc = reference();
        let scene = sample_scene(&sc, 1, 0).unwrap();
        let w = sc.sim_region_half_width;
        let expected = sc.densities.bs_density * 4.0 * w * w;
        let n = scene.base_stations.len() as f64;
        assert!((n - expected).abs() < 5.0 * expected.sqrt(), "{n} vs {expected}");
        for b in &scene.base_stations {
            assert!(b.position[0].abs() <= w && b.position[1].abs() <= w);
        }
    }

    #[test]
    fn mean_satellite_count_matches_cap_area() {
        let sc = reference();
        let trials = 2000;
        let total: usize = (0..trials)
            .map(|t| sample_satellites(&mut trial_rng(11, t), &sc).unwrap().len())
            .sum();
        let mean = total as f64 / trials as f64;
        let expected = sc.densities.sat_density * sc.geometry.visible_cap_area();
        let se = (expected / trials as f64).sqrt();
        assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected}");
    }

    #[test]
    fn dump_lists_every_node() {
        let sc = reference();
        let scene = sample_scene(&sc, 2, 0).unwrap();
        let nodes = scene.nodes(sc.void_probability());
        assert_eq!(nodes.len(), scene.satellites.len() + scene.base_stations.len());
        assert!(nodes
            .iter()
            .all(|n| (n.kind == NodeKind::Satellite) == n.shared_active.is_some()));
    }

    #[test]
    fn empty_field_has_no_nearest() {
        let scene = Scene {
            satellites: vec![],
            base_stations: vec![],
        };
        assert_eq!(scene.nearest_satellite(), None);
        assert_eq!(scene.nearest_base_station(), None);
    }
}
