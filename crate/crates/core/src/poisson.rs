//! Stationary Poisson point processes on axis-aligned windows.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::geometry::Cuboid;
use crate::geometry::PointSet;
use crate::seeds;

const DIRECT_STREAM: u64 = 0xd1;
const CUBE_STREAM: u64 = 0xc0;

/// How a sample is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    /// One Poisson count for the whole window, then i.i.d. uniform points.
    #[default]
    #[serde(rename = "DIRECT")]
    Direct,
    /// Independent Poisson counts per unit lattice cube, clipped to the window.
    #[serde(rename = "CUBE")]
    Cube,
}

impl std::fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplingMode::Direct => "DIRECT",
            SamplingMode::Cube => "CUBE",
        })
    }
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DIRECT" => Ok(SamplingMode::Direct),
            "CUBE" => Ok(SamplingMode::Cube),
            _ => Err(Error::Parse(format!("unknown sampling mode {s:?}"))),
        }
    }
}

/// Intensity, window, seed and mode of a sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonConfig {
    /// Expected number of points per unit volume.
    pub intensity: f64,
    pub window: Cuboid,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: SamplingMode,
}

impl PoissonConfig {
    pub fn new(intensity: f64, window: Cuboid, seed: u64, mode: SamplingMode) -> Result<Self> {
        let cfg = PoissonConfig {
            intensity,
            window,
            seed,
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intensity.is_finite() && self.intensity > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "intensity must be positive, got {}",
                self.intensity
            )));
        }
        Ok(())
    }

    /// Parses the key-value config file format.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: PoissonConfig = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Draws a sample according to `cfg.mode`.
pub fn sample(cfg: &PoissonConfig) -> Result<PointSet> {
    match cfg.mode {
        SamplingMode::Direct => sample_direct(cfg),
        SamplingMode::Cube => sample_cube_construction(cfg),
    }
}

/// `N ~ Poisson(t * vol)` followed by `N` uniform points in the window.
pub fn sample_direct(cfg: &PoissonConfig) -> Result<PointSet> {
    cfg.validate()?;
    let mut rng = seeds::stream(cfg.seed, &[DIRECT_STREAM]);
    Ok(sample_window(&mut rng, &cfg.window, cfg.intensity))
}

/// Lattice-cube construction: the window is tiled by unit cubes anchored at
/// its lower corner, each cube receives an independent `Poisson(t)` number of
/// uniform points, and points outside the window are discarded.
///
/// Each cube draws from its own stream keyed by `(seed, cube index)`, so the
/// sample does not depend on the order in which cubes are visited.
pub fn sample_cube_construction(cfg: &PoissonConfig) -> Result<PointSet> {
    cfg.validate()?;
    let w = &cfg.window;
    let d = w.dim();
    let counts: Vec<u64> = (0..d).map(|i| w.side(i).ceil().max(1.0) as u64).collect();
    let mut coords = Vec::new();
    let mut index = vec![0u64; d];
    let mut path = vec![0u64; d + 1];
    path[0] = CUBE_STREAM;
    let mut p = vec![0.0; d];
    'cubes: loop {
        path[1..].copy_from_slice(&index);
        let mut rng = seeds::stream(cfg.seed, &path);
        let n = poisson_count(&mut rng, cfg.intensity);
        for _ in 0..n {
            for (a, x) in p.iter_mut().enumerate() {
                *x = w.lo()[a] + index[a] as f64 + rng.random::<f64>();
            }
            if w.contains(&p) {
                coords.extend_from_slice(&p);
            }
        }
        // Odometer over cube indices.
        for a in 0..d {
            index[a] += 1;
            if index[a] < counts[a] {
                continue 'cubes;
            }
            index[a] = 0;
        }
        break;
    }
    Ok(PointSet::from_flat(d, coords, true))
}

/// A Poisson count with the given mean; zero mean yields zero.
pub(crate) fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng) as u64
}

/// A direct-mode sample of intensity `t` on `window` from `rng`.
pub(crate) fn sample_window(rng: &mut ChaCha8Rng, window: &Cuboid, t: f64) -> PointSet {
    let d = window.dim();
    let n = poisson_count(rng, t * window.volume());
    let mut coords = Vec::with_capacity(n as usize * d);
    for _ in 0..n {
        for a in 0..d {
            coords.push(window.lo()[a] + window.side(a) * rng.random::<f64>());
        }
    }
    PointSet::from_flat(d, coords, true)
}
