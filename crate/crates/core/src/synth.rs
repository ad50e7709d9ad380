//! Seeded synthetic point clouds.
//!
//! All draws come from one ChaCha8 stream seeded with [`SynthSpec::seed`],
//! so a spec always produces the same cloud on every platform. Cluster
//! families place centres uniformly and move each point away from a random
//! centre along a uniformly random direction; coordinates leaving the cube
//! are reflected back into `[0, 1)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Pareto, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::curve::check_dim;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Uniform,
    LognormalCluster,
    ParetoCluster,
    /// Uniform background mixed with log-normal clusters.
    Mixture,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Uniform,
        Family::LognormalCluster,
        Family::ParetoCluster,
        Family::Mixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::LognormalCluster => "lognormal-cluster",
            Family::ParetoCluster => "pareto-cluster",
            Family::Mixture => "mixture",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s || f.name().replace('-', "") == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub family: Family,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    /// Log-normal radius parameters (before `scale`).
    pub mu: f64,
    pub sigma: f64,
    /// Density exponent of the Pareto radius, `p(r) ∝ r^-alpha` for `r ≥ 1`.
    pub alpha: f64,
    pub clusters: usize,
    /// Multiplier applied to every radius.
    pub scale: f64,
    /// Fraction of uniform points in a mixture.
    pub background: f64,
}

impl SynthSpec {
    pub fn new(family: Family, n: usize, count: usize, seed: u64) -> Self {
        SynthSpec {
            family,
            n,
            count,
            seed,
            mu: 0.0,
            sigma: 1.0,
            alpha: 2.5,
            clusters: 10,
            scale: 0.01,
            background: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.count == 0 {
            return bad("point count must be at least 1");
        }
        if self.family == Family::Uniform {
            return Ok(());
        }
        if self.clusters == 0 {
            return bad("cluster count must be at least 1");
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return bad("scale must be positive");
        }
        match self.family {
            Family::ParetoCluster if !(self.alpha > 1.0 && self.alpha.is_finite()) => {
                bad("alpha must exceed 1")
            }
            Family::LognormalCluster | Family::Mixture
                if !(self.sigma > 0.0 && self.sigma.is_finite() && self.mu.is_finite()) =>
            {
                bad("sigma must be positive and mu finite")
            }
            Family::Mixture if !(0.0..=1.0).contains(&self.background) => {
                bad("background fraction must lie in [0, 1]")
            }
            _ => Ok(()),
        }
    }
}

/// Reflects `x` into `[0, 1)`.
pub fn fold(x: f64) -> f64 {
    let t = x.rem_euclid(2.0);
    let r = if t >= 1.0 { 2.0 - t } else { t };
    if r >= 1.0 {
        1.0 - f64::EPSILON / 2.0
    } else {
        r
    }
}

enum Radius {
    Lognormal(LogNormal<f64>),
    Pareto(Pareto<f64>),
}

impl Radius {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Radius::Lognormal(d) => d.sample(rng),
            Radius::Pareto(d) => d.sample(rng),
        }
    }
}

pub fn generate(spec: &SynthSpec) -> Result<PointCloud> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coords = Vec::with_capacity(n * spec.count);

    if spec.family == Family::Uniform {
        coords.extend((0..n * spec.count).map(|_| rng.gen::<f64>()));
        return PointCloud::from_rows(n, coords);
    }

    let radius = match spec.family {
        Family::ParetoCluster => Radius::Pareto(
            Pareto::new(1.0, spec.alpha - 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?,
        ),
        _ => Radius::Lognormal(
            LogNormal::new(spec.mu, spec.sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?,
        ),
    };
    let centres: Vec<f64> = (0..n * spec.clusters).map(|_| rng.gen()).collect();
    let background = if spec.family == Family::Mixture {
        spec.background
    } else {
        0.0
    };

    let mut dir = vec![0.0; n];
    for _ in 0..spec.count {
        if background > 0.0 && rng.gen::<f64>() < background {
            coords.extend((0..n).map(|_| rng.gen::<f64>()));
            continue;
        }
        let c = rng.gen_range(0..spec.clusters);
        let norm = loop {
            for d in dir.iter_mut() {
                *d = rng.sample(StandardNormal);
            }
            let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        let r = spec.scale * radius.draw(&mut rng);
        let centre = &centres[c * n..(c + 1) * n];
        coords.extend(centre.iter().zip(&dir).map(|(c, d)| fold(c + r * d / norm)));
    }
    PointCloud::from_rows(n, coords)
}

/// Writes `cloud` as CSV with columns `id,x0,...`; values use the shortest
/// representation that parses back to the same double.
pub fn write_csv<W: Write>(cloud: &PointCloud, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend((0..cloud.dim()).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for i in 0..cloud.len() {
        let mut row = vec![cloud.id(i).to_string()];
        row.extend(cloud.point(i).iter().map(|x| format!("{x:?}")));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_reproducible() {
        let spec = SynthSpec::new(Family::Uniform, 2, 4, 7);
        let a = generate(&spec).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a, generate(&spec).unwrap());
        let mut other = spec.clone();
        other.seed = 8;
        assert_ne!(a, generate(&other).unwrap());
    }

    #[test]
    fn single_point() {
        for family in Family::ALL {
            let cloud = generate(&SynthSpec::new(family, 3, 1, 5)).unwrap();
            assert_eq!(cloud.len(), 1);
        }
    }

    #[test]
    fn all_families_stay_in_the_cube() {
        for family in Family::ALL {
            let mut spec = SynthSpec::new(family, 4, 5_000, 11);
            spec.scale = 0.3;
            let cloud = generate(&spec).unwrap();
            assert!(cloud.coords().iter().all(|x| (0.0..1.0).contains(x)));
        }
    }

    #[test]
    fn invalid_specs_fail() {
        let mut s = SynthSpec::new(Family::ParetoCluster, 2, 10, 1);
        s.alpha = 1.0;
        assert!(generate(&s).is_err());
        let mut s = SynthSpec::new(Family::LognormalCluster, 2, 10, 1);
        s.clusters = 0;
        assert!(generate(&s).is_err());
        assert!(generate(&SynthSpec::new(Family::Uniform, 2, 0, 1)).is_err());
        assert!(generate(&SynthSpec::new(Family::Uniform, 0, 3, 1)).is_err());
        let mut s = SynthSpec::new(Family::Mixture, 2, 10, 1);
        s.background = 1.5;
        assert!(generate(&s).is_err());
    }

    #[test]
    fn fold_reflects() {
        assert_eq!(fold(0.25), 0.25);
        assert_eq!(fold(1.25), 0.75);
        assert_eq!(fold(-0.25), 0.25);
        assert_eq!(fold(2.5), 0.5);
        assert!(fold(1.0) < 1.0);
        assert_eq!(fold(-1.0), 1.0 - f64::EPSILON / 2.0);
    }

    #[test]
    fn uniform_marginals_are_uniform() {
        let cloud = generate(&SynthSpec::new(Family::Uniform, 3, 100_000, 42)).unwrap();
        for axis in 0..3 {
            let mut xs: Vec<f64> = cloud.points().map(|p| p[axis]).collect();
            xs.sort_by(f64::total_cmp);
            let m = xs.len() as f64;
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| (x - i as f64 / m).abs().max(((i + 1) as f64 / m - x).abs()))
                .fold(0.0, f64::max);
            assert!(d < 0.01, "axis {axis}: {d}");
        }
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!("lognormalCluster".parse::<Family>().unwrap(), Family::LognormalCluster);
        assert!("gauss".parse::<Family>().is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let cloud = generate(&SynthSpec::new(Family::Uniform, 3, 10, 1)).unwrap();
        let mut buf = Vec::new();
        write_csv(&cloud, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 11);
        assert!(text.starts_with("id,x0,x1,x2\n0,"));
    }
}
