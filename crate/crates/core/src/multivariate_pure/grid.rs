use crate::error::{ensure_positive, Error, Result};

/// Default maximum number of candidates in a grid.
pub const DEFAULT_GRID_CAP: usize = 1_000_000;

/// Finite candidate set for the pure-DP selection step.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGrid {
    dim: usize,
    points: Vec<f64>,
}

impl CandidateGrid {
    /// Product grid `J₁ × ⋯ × J_d` with `Jᵢ = {cᵢ + j·α/√d : |j| ≤ ⌈√d⌉}`,
    /// which covers `[cᵢ − α, cᵢ + α]` with spacing `α/√d`.
    pub fn build(center: &[f64], alpha: f64, cap: usize) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        let d = center.len();
        if d == 0 {
            return Err(Error::param("grid dimension must be positive"));
        }
        let half = (d as f64).sqrt().ceil() as i64;
        let per_axis = (2 * half + 1) as usize;
        let size = (per_axis as f64).powi(d as i32);
        if size > cap as f64 {
            return Err(Error::GridTooLarge { size, cap });
        }
        let step = alpha / (d as f64).sqrt();
        let total = size as usize;
        let mut points = Vec::with_capacity(total * d);
        let mut index = vec![0usize; d];
        for _ in 0..total {
            for (axis, &i) in index.iter().enumerate() {
                points.push(center[axis] + (i as i64 - half) as f64 * step);
            }
            for i in index.iter_mut() {
                *i += 1;
                if *i < per_axis {
                    break;
                }
                *i = 0;
            }
        }
        Ok(CandidateGrid { dim: d, points })
    }

    /// Arbitrary candidate list, one row per candidate.
    pub fn from_points(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::param("candidate set must be nonempty"));
        };
        let dim = first.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::param("candidates must share a positive dimension"));
        }
        Ok(CandidateGrid { dim, points: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }
}
