//! Storage measures comparing the scaled index with the optimal static one.
//!
//! Leaf counts of the scaled tree are counts of its non-empty leaves: the
//! generated subtree only contains cells that hold points, and the empty
//! siblings kept in [`ScaledTree`] for the binary layout are not part of it.
//! The static tree always counts all `2^(nk)` cells.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::curve::Scheme;
use crate::error::{Error, Result};
use crate::tree::{self, LeafCounts, ScaledTree, StaticProfile};

/// Slack allowed on the unit interval before ρ is reported as invalid.
pub const RHO_TOLERANCE: f64 = 1e-9;

/// Leaf statistics of one tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeStats {
    pub total_leaves: f64,
    pub non_empty: u64,
    pub overfilled: u64,
}

impl TreeStats {
    pub fn new(total_leaves: f64, non_empty: u64, overfilled: u64) -> Self {
        TreeStats {
            total_leaves,
            non_empty,
            overfilled,
        }
    }

    /// Statistics of the scaled index: only non-empty leaves count.
    pub fn scaled(counts: LeafCounts) -> Self {
        TreeStats {
            total_leaves: counts.non_empty as f64,
            non_empty: counts.non_empty as u64,
            overfilled: counts.overfilled as u64,
        }
    }

    pub fn of_static(profile: &StaticProfile) -> Self {
        TreeStats {
            total_leaves: profile.total_leaves_f64(),
            non_empty: profile.non_empty as u64,
            overfilled: profile.overfilled as u64,
        }
    }
}

/// ω: overfilled leaves per non-empty leaf.
pub fn omega(stats: &TreeStats) -> Result<f64> {
    if stats.non_empty == 0 {
        return Err(Error::NoNonEmptyLeaves);
    }
    Ok(stats.overfilled as f64 / stats.non_empty as f64)
}

/// Ω = (1 + ω) · leaf count.
pub fn capacity_omega(stats: &TreeStats) -> Result<f64> {
    Ok((1.0 + omega(stats)?) * stats.total_leaves)
}

/// Smallest `k` with `s · 2^(nk) ≥ N`, i.e. `⌈log2(N / s) / n⌉` clamped at 0,
/// evaluated in integers.
pub fn static_k(points: u64, capacity: u64, n: usize) -> u32 {
    assert!(points >= 1 && capacity >= 1 && n >= 1);
    if points <= capacity {
        return 0;
    }
    let mut k = 0u32;
    // s * 2^(nk) stays below 2^(64 + 64): the loop exits before overflow
    let mut reach = u128::from(capacity);
    while reach < u128::from(points) {
        k += 1;
        reach <<= n.min(64);
    }
    k
}

/// ρ from its ingredients: `(2s)^ρ = N / leaves · (1 + ω_static)`.
pub fn rho_from_parts(points: u64, scaled_leaves: u64, omega_static: f64, capacity: u64) -> Result<f64> {
    if scaled_leaves == 0 {
        return Err(Error::NoNonEmptyLeaves);
    }
    if capacity == 0 {
        return Err(Error::ZeroCapacity);
    }
    let arg = points as f64 / scaled_leaves as f64 * (1.0 + omega_static);
    let rho = arg.ln() / (2.0 * capacity as f64).ln();
    if !(-RHO_TOLERANCE..=1.0 + RHO_TOLERANCE).contains(&rho) {
        return Err(Error::RhoOutOfRange { value: rho });
    }
    Ok(rho)
}

/// One row of a metric sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMetrics {
    pub n: usize,
    pub s: usize,
    pub scheme: Scheme,
    pub k: u32,
    pub leaves_scaled: u64,
    pub leaves_static: u128,
    pub omega_scaled: f64,
    pub omega_static: f64,
    #[serde(rename = "Omega_scaled")]
    pub capacity_scaled: f64,
    #[serde(rename = "Omega_static")]
    pub capacity_static: f64,
    #[serde(rename = "R")]
    pub ratio: f64,
    pub rho: f64,
}

impl IndexMetrics {
    pub const COLUMNS: [&'static str; 12] = [
        "n",
        "s",
        "scheme",
        "k",
        "leaves_scaled",
        "leaves_static",
        "omega_scaled",
        "omega_static",
        "Omega_scaled",
        "Omega_static",
        "R",
        "rho",
    ];

    /// Builds the scaled tree and the static profile and combines them.
    pub fn compute(cloud: &PointCloud, capacity: usize, scheme: Scheme, max_bits: u32) -> Result<Self> {
        let tree = tree::build_scaled(cloud, capacity, scheme, max_bits)?;
        Self::for_tree(cloud, &tree)
    }

    pub fn for_tree(cloud: &PointCloud, tree: &ScaledTree) -> Result<Self> {
        let k = static_k(cloud.len() as u64, tree.capacity() as u64, cloud.dim());
        let profile = tree::static_profile(cloud, k, tree.capacity())?;
        Self::from_parts(tree.leaf_counts(), &profile, cloud.len(), tree.capacity(), tree.scheme())
    }

    /// Combines leaf tallies of the scaled tree with a static profile taken
    /// at the optimal iteration.
    pub fn from_parts(
        scaled: LeafCounts,
        profile: &StaticProfile,
        points: usize,
        capacity: usize,
        scheme: Scheme,
    ) -> Result<Self> {
        let scaled_stats = TreeStats::scaled(scaled);
        let static_stats = TreeStats::of_static(profile);
        let omega_scaled = omega(&scaled_stats)?;
        let omega_static = omega(&static_stats)?;
        let capacity_scaled = capacity_omega(&scaled_stats)?;
        let capacity_static = capacity_omega(&static_stats)?;
        let leaves_static = u128::try_from(profile.total_leaves()).map_err(|_| {
            Error::InvalidParameter(format!(
                "static tree with 2^{} leaves",
                profile.log2_total_leaves()
            ))
        })?;
        Ok(IndexMetrics {
            n: profile.n,
            s: capacity,
            scheme,
            k: profile.k,
            leaves_scaled: scaled.non_empty as u64,
            leaves_static,
            omega_scaled,
            omega_static,
            capacity_scaled,
            capacity_static,
            ratio: capacity_scaled / capacity_static,
            rho: rho_from_parts(
                points as u64,
                scaled.non_empty as u64,
                omega_static,
                capacity as u64,
            )?,
        })
    }
}

/// R(S) = Ω(T_scaled) / Ω(T_static).
pub fn capacity_ratio(cloud: &PointCloud, capacity: usize, scheme: Scheme, max_bits: u32) -> Result<f64> {
    let tree = tree::build_scaled(cloud, capacity, scheme, max_bits)?;
    let k = static_k(cloud.len() as u64, capacity as u64, cloud.dim());
    let profile = tree::static_profile(cloud, k, capacity)?;
    let scaled = capacity_omega(&TreeStats::scaled(tree.leaf_counts()))?;
    Ok(scaled / capacity_omega(&TreeStats::of_static(&profile))?)
}

/// Local sparsity measure ρ(S, s).
pub fn local_sparsity_rho(cloud: &PointCloud, capacity: usize, scheme: Scheme, max_bits: u32) -> Result<f64> {
    Ok(IndexMetrics::compute(cloud, capacity, scheme, max_bits)?.rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::DEFAULT_MAX_BITS;

    #[test]
    fn omega_examples() {
        assert_eq!(omega(&TreeStats::new(10.0, 4, 1)).unwrap(), 0.25);
        assert_eq!(omega(&TreeStats::new(4.0, 4, 0)).unwrap(), 0.0);
        assert_eq!(omega(&TreeStats::new(64.0, 1, 1)).unwrap(), 1.0);
        assert!(matches!(
            omega(&TreeStats::new(8.0, 0, 0)),
            Err(Error::NoNonEmptyLeaves)
        ));
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity_omega(&TreeStats::new(10.0, 4, 1)).unwrap(), 12.5);
        assert_eq!(capacity_omega(&TreeStats::new(4.0, 4, 0)).unwrap(), 4.0);
    }

    #[test]
    fn static_k_examples() {
        assert_eq!(static_k(2_450_000, 1, 8), 3);
        assert_eq!(static_k(4096, 1, 3), 4);
        assert_eq!(static_k(1000, 2, 4), 3);
        assert_eq!(static_k(5, 5, 2), 0);
        assert_eq!(static_k(6, 5, 7), 1);
        assert_eq!(static_k(u64::MAX, 1, 1), 64);
    }

    #[test]
    fn static_k_agrees_with_float_formula() {
        for points in [2u64, 3, 17, 100, 1023, 1024, 1025, 99_999, 2_450_000] {
            for s in [1u64, 2, 3, 64, 1 << 14] {
                for n in 1..=9 {
                    let expected = if points <= s {
                        0
                    } else {
                        ((points as f64 / s as f64).log2() / n as f64).ceil() as u32
                    };
                    assert_eq!(static_k(points, s, n), expected, "N={points} s={s} n={n}");
                }
            }
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_from_parts(100, 100, 0.0, 3).unwrap(), 0.0);
        assert!((rho_from_parts(8, 4, 0.0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            rho_from_parts(10, 1, 1.0, 1),
            Err(Error::RhoOutOfRange { .. })
        ));
    }

    #[test]
    fn orthant_cloud_has_unit_ratio() {
        let cloud = PointCloud::from_rows(2, vec![0.1, 0.1, 0.9, 0.1, 0.9, 0.9, 0.1, 0.9]).unwrap();
        for scheme in Scheme::ALL {
            let m = IndexMetrics::compute(&cloud, 1, scheme, DEFAULT_MAX_BITS).unwrap();
            assert_eq!(m.k, 1);
            assert_eq!(m.ratio, 1.0);
            assert_eq!(m.rho, 0.0);
        }
    }

    #[test]
    fn duplicate_cloud_has_tiny_ratio() {
        let cloud = PointCloud::from_rows(2, [0.3, 0.7].repeat(10)).unwrap();
        let r = capacity_ratio(&cloud, 1, Scheme::Ring, DEFAULT_MAX_BITS).unwrap();
        // one overfilled leaf against 16 overfilled-cell static leaves
        assert_eq!(r, 2.0 / 32.0);
        assert!(local_sparsity_rho(&cloud, 1, Scheme::Ring, DEFAULT_MAX_BITS).is_err());
    }

    #[test]
    fn csv_header_matches_serialized_fields() {
        let cloud = PointCloud::from_rows(1, vec![0.1, 0.6, 0.7]).unwrap();
        let m = IndexMetrics::compute(&cloud, 1, Scheme::Bubble, DEFAULT_MAX_BITS).unwrap();
        let mut w = csv::Writer::from_writer(vec![]);
        w.serialize(&m).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), IndexMetrics::COLUMNS.join(","));
    }
}
