//! Dataset containers shared by the estimators.

use crate::error::{Error, Result};

/// A row-major set of `len` points in `dim` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    values: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("point dimension must be at least 1"));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::param(format!("{} values do not form rows of dimension {dim}", values.len())));
        }
        Ok(PointSet { dim, values })
    }

    pub fn empty(dim: usize) -> Self {
        PointSet { dim: dim.max(1), values: Vec::new() }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(1);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::param("rows have differing dimensions"));
            }
            values.extend_from_slice(row);
        }
        PointSet::new(dim, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.dim, "row dimension mismatch");
        self.values.extend_from_slice(row);
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Rows `start..end` as a new set.
    pub fn slice(&self, start: usize, end: usize) -> PointSet {
        PointSet { dim: self.dim, values: self.values[start * self.dim..end * self.dim].to_vec() }
    }

    /// Coordinate `axis` of every point.
    pub fn column(&self, axis: usize) -> Vec<f64> {
        self.rows().map(|r| r[axis]).collect()
    }
}

/// Data split into `groups` disjoint blocks of equal size. Samples beyond
/// `groups * group_size` are discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedDataset {
    points: PointSet,
    groups: usize,
    group_size: usize,
}

impl GroupedDataset {
    /// Splits `points` into `groups` blocks of `⌊len / groups⌋` consecutive rows.
    pub fn split(points: &PointSet, groups: usize) -> Result<Self> {
        if groups == 0 || groups.is_multiple_of(2) {
            return Err(Error::param(format!("group count must be odd and positive, got {groups}")));
        }
        let group_size = points.len() / groups;
        if group_size == 0 {
            return Err(Error::InsufficientSamples {
                bound: "one sample per group",
                needed: groups,
                got: points.len(),
            });
        }
        Ok(GroupedDataset { points: points.slice(0, groups * group_size), groups, group_size })
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Number of points kept after discarding the remainder.
    pub fn len(&self) -> usize {
        self.groups * self.group_size
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut PointSet {
        &mut self.points
    }

    /// Rows belonging to group `g`.
    pub fn group(&self, g: usize) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        let d = self.points.dim();
        self.points.as_flat()[g * self.group_size * d..(g + 1) * self.group_size * d].chunks_exact(d)
    }

    /// Group index of row `i`.
    pub fn group_of(&self, i: usize) -> usize {
        i / self.group_size
    }
}

/// Smallest odd integer not below `x`.
pub(crate) fn ceil_odd(x: f64) -> usize {
    let c = x.ceil().max(1.0) as usize;
    if c.is_multiple_of(2) {
        c + 1
    } else {
        c
    }
}
