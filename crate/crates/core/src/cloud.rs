use std::collections::HashSet;

use crate::curve::check_dim;
use crate::error::{Error, Result};

/// Points of the unit cube `[0, 1)^n`, row-major, with a stable id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    coords: Vec<f64>,
    ids: Vec<u64>,
}

impl PointCloud {
    pub fn new(n: usize, coords: Vec<f64>, ids: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        if coords.len() != ids.len() * n {
            return Err(Error::Malformed {
                what: "point cloud",
                detail: format!(
                    "{} coordinates for {} ids in dimension {n}",
                    coords.len(),
                    ids.len()
                ),
            });
        }
        if let Some((i, &value)) = coords
            .iter()
            .enumerate()
            .find(|(_, &x)| !(0.0..1.0).contains(&x))
        {
            return Err(Error::CoordinateRange { axis: i % n, value });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|&&id| !seen.insert(id)) {
            return Err(Error::Malformed {
                what: "point cloud",
                detail: format!("duplicate id {dup}"),
            });
        }
        Ok(PointCloud { n, coords, ids })
    }

    /// Ids are the row numbers `0..N`.
    pub fn from_rows(n: usize, coords: Vec<f64>) -> Result<Self> {
        let len = coords.len().checked_div(n).unwrap_or(0);
        Self::new(n, coords, (0..len as u64).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    pub fn id(&self, i: usize) -> u64 {
        self.ids[i]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.n)
    }

    /// Restriction to the listed axes, in the given order.
    pub fn project(&self, axes: &[usize]) -> Result<PointCloud> {
        check_dim(axes.len())?;
        if let Some(&d) = axes.iter().find(|&&a| a >= self.n) {
            return Err(Error::CoordinateIndex { d, n: self.n });
        }
        let coords = self
            .points()
            .flat_map(|p| axes.iter().map(move |&a| p[a]))
            .collect();
        Ok(PointCloud {
            n: axes.len(),
            coords,
            ids: self.ids.clone(),
        })
    }

    /// First `bits` binary digits of every coordinate, row-major.
    pub(crate) fn quantize(&self, bits: u32) -> Vec<u64> {
        let scale = 2f64.powi(bits as i32);
        self.coords.iter().map(|&x| (x * scale) as u64).collect()
    }
}
