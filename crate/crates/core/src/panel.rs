//! Bivariate observation panels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SampledPath, TimeGrid, TIME_EPS};

/// Two return series on one common grid: `returns1[j-1] = Δ_j X¹`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncPanel {
    grid: TimeGrid,
    returns1: Vec<f64>,
    returns2: Vec<f64>,
}

impl SyncPanel {
    pub fn new(grid: TimeGrid, returns1: Vec<f64>, returns2: Vec<f64>) -> Result<Self> {
        let n = grid.intervals();
        if returns1.len() != n || returns2.len() != n {
            return Err(Error::InvalidArgument(format!(
                "grid has {n} intervals but return series have lengths {} and {}",
                returns1.len(),
                returns2.len()
            )));
        }
        if returns1.iter().chain(&returns2).any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument("non-finite return".into()));
        }
        Ok(Self {
            grid,
            returns1,
            returns2,
        })
    }

    /// Equally spaced panel over `[0, horizon]`.
    pub fn uniform(horizon: f64, returns1: Vec<f64>, returns2: Vec<f64>) -> Result<Self> {
        let grid = TimeGrid::uniform(returns1.len(), horizon)?;
        Self::new(grid, returns1, returns2)
    }

    /// Builds the panel from two paths observed on the same grid.
    pub fn from_paths(path1: &SampledPath, path2: &SampledPath) -> Result<Self> {
        if let Some((index, left, right)) = path1.grid().first_mismatch(path2.grid()) {
            return Err(Error::GridMismatch { index, left, right });
        }
        Self::new(path1.grid().clone(), path1.increments(), path2.increments())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn returns1(&self) -> &[f64] {
        &self.returns1
    }

    pub fn returns2(&self) -> &[f64] {
        &self.returns2
    }

    pub fn len(&self) -> usize {
        self.returns1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns1.is_empty()
    }

    pub fn mesh(&self) -> f64 {
        self.grid.mesh()
    }

    /// Restricts the panel to the intervals ending at or before `t`.
    pub fn up_to(&self, t: f64) -> Result<SyncPanel> {
        let grid = self.grid.up_to(t)?;
        let n = grid.intervals();
        Self::new(
            grid,
            self.returns1[..n].to_vec(),
            self.returns2[..n].to_vec(),
        )
    }

    /// Iterator over `(Δ_j X¹, Δ_j X²)`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.returns1
            .iter()
            .copied()
            .zip(self.returns2.iter().copied())
    }
}

/// Two paths observed at their own (possibly interleaved) times `τ_j`, `ν_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsyncPanel {
    path1: SampledPath,
    path2: SampledPath,
}

impl AsyncPanel {
    pub fn new(path1: SampledPath, path2: SampledPath) -> Result<Self> {
        let (left, right) = (path1.grid().horizon(), path2.grid().horizon());
        if (left - right).abs() > TIME_EPS {
            return Err(Error::HorizonMismatch { left, right });
        }
        Ok(Self { path1, path2 })
    }

    pub fn path1(&self) -> &SampledPath {
        &self.path1
    }

    pub fn path2(&self) -> &SampledPath {
        &self.path2
    }

    /// Combined mesh: the larger of the two grids' meshes.
    pub fn mesh(&self) -> f64 {
        self.path1.grid().mesh().max(self.path2.grid().mesh())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_paths_names_first_mismatch() {
        let g1 = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let g2 = TimeGrid::new(vec![0.0, 0.4, 1.0]).unwrap();
        let p1 = SampledPath::new(g1, vec![0.0, 1.0, 2.0]).unwrap();
        let p2 = SampledPath::new(g2, vec![0.0, 1.0, 2.0]).unwrap();
        match SyncPanel::from_paths(&p1, &p2) {
            Err(Error::GridMismatch { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_paths_builds_increments() {
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let p1 = SampledPath::new(g.clone(), vec![0.0, 1.0, 3.0]).unwrap();
        let p2 = SampledPath::new(g, vec![1.0, 1.0, 0.0]).unwrap();
        let panel = SyncPanel::from_paths(&p1, &p2).unwrap();
        assert_eq!(panel.returns1(), &[1.0, 2.0]);
        assert_eq!(panel.returns2(), &[0.0, -1.0]);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(SyncPanel::uniform(1.0, vec![1.0, 2.0], vec![1.0]).is_err());
    }

    #[test]
    fn async_requires_equal_horizons() {
        let p1 = SampledPath::new(TimeGrid::new(vec![0.0, 1.0]).unwrap(), vec![0.0, 1.0]).unwrap();
        let p2 = SampledPath::new(TimeGrid::new(vec![0.0, 2.0]).unwrap(), vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            AsyncPanel::new(p1, p2),
            Err(Error::HorizonMismatch { .. })
        ));
    }

    #[test]
    fn async_mesh_is_max() {
        let p1 =
            SampledPath::new(TimeGrid::new(vec![0.0, 0.2, 1.0]).unwrap(), vec![0.0; 3]).unwrap();
        let p2 =
            SampledPath::new(TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap(), vec![0.0; 3]).unwrap();
        let a = AsyncPanel::new(p1, p2).unwrap();
        assert!((a.mesh() - 0.8).abs() < 1e-15);
    }
}
