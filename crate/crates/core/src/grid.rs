//! Observation grids and sampled paths.
//!
//! Time is measured in trading days; a 7-hour day sampled every 5 minutes is
//! a grid of 84 intervals with mesh `h = 1/84`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance (in days) used whenever two timestamps are compared
/// for equality.
pub const TIME_EPS: f64 = 1e-12;

/// A partition `0 = t_0 < t_1 < ... < t_n = T` of the observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least two timestamps, got {}",
                times.len()
            )));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "non-finite timestamp at index {i}"
            )));
        }
        if times[0].abs() > TIME_EPS {
            return Err(Error::InvalidGrid(format!(
                "first timestamp must be 0, got {}",
                times[0]
            )));
        }
        for (j, w) in times.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::InvalidGrid(format!(
                    "timestamps not strictly increasing at index {}: {} then {}",
                    j + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(Self { times })
    }

    /// `n` equal intervals over `[0, horizon]`.
    pub fn uniform(n: usize, horizon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("uniform grid needs n >= 1".into()));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let step = horizon / n as f64;
        let mut times: Vec<f64> = (0..=n).map(|j| j as f64 * step).collect();
        times[n] = horizon;
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("grid has at least two points")
    }

    /// Number of intervals `n`.
    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mesh `h = max_j (t_j - t_{j-1})`.
    pub fn mesh(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index of the last timestamp `<= t` (within [`TIME_EPS`]), if any.
    pub fn last_index_at_or_before(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|&s| s <= t + TIME_EPS);
        k.checked_sub(1)
    }

    /// First index at which the two grids disagree, or `None` when they are
    /// the same partition.
    pub fn first_mismatch(&self, other: &TimeGrid) -> Option<(usize, f64, f64)> {
        let n = self.times.len().min(other.times.len());
        for j in 0..n {
            if (self.times[j] - other.times[j]).abs() > TIME_EPS {
                return Some((j, self.times[j], other.times[j]));
            }
        }
        if self.times.len() != other.times.len() {
            let left = self.times.get(n).copied().unwrap_or(f64::NAN);
            let right = other.times.get(n).copied().unwrap_or(f64::NAN);
            return Some((n, left, right));
        }
        None
    }

    /// The grid restricted to timestamps `<= t`.
    pub fn up_to(&self, t: f64) -> Result<TimeGrid> {
        let last = self.last_index_at_or_before(t).unwrap_or(0);
        if last == 0 {
            return Err(Error::InvalidArgument(format!(
                "cutoff {t} precedes the first observation interval"
            )));
        }
        TimeGrid::new(self.times[..=last].to_vec())
    }
}

/// Discrete observations `X_{t_0}, ..., X_{t_n}` of one process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledPath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidPath(format!(
                "{} values for {} timestamps",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidPath(format!("non-finite value at index {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Increments `X_{t_j} - X_{t_{j-1}}`, `j = 1..n`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Observations at times `<= t`.
    pub fn up_to(&self, t: f64) -> Result<SampledPath> {
        let grid = self.grid.up_to(t)?;
        let values = self.values[..grid.len()].to_vec();
        SampledPath::new(grid, values)
    }

    /// Samples the path at the coarse timestamps, taking the last fine
    /// observation at or before each coarse time (cadlag convention).
    pub fn resample(&self, coarse: &TimeGrid) -> Result<SampledPath> {
        let fine_horizon = self.grid.horizon();
        if coarse.horizon() > fine_horizon + TIME_EPS {
            return Err(Error::InvalidArgument(format!(
                "coarse horizon {} exceeds path horizon {}",
                coarse.horizon(),
                fine_horizon
            )));
        }
        let values = coarse
            .times()
            .iter()
            .map(|&t| {
                let k = self
                    .grid
                    .last_index_at_or_before(t)
                    .expect("both grids start at 0");
                self.values[k]
            })
            .collect();
        SampledPath::new(coarse.clone(), values)
    }

    /// Reads a `time,value` CSV with a header row.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "time" || &headers[1] != "value" {
            return Err(Error::Parse(format!(
                "expected header `time,value`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |field: &str, col: &str| -> Result<f64> {
                field.parse::<f64>().map_err(|e| {
                    Error::Parse(format!("row {}: bad {col} `{field}`: {e}", line + 2))
                })
            };
            if record.len() != 2 {
                return Err(Error::Parse(format!(
                    "row {}: expected 2 fields, found {}",
                    line + 2,
                    record.len()
                )));
            }
            times.push(parse(&record[0], "time")?);
            values.push(parse(&record[1], "value")?);
        }
        SampledPath::new(TimeGrid::new(times)?, values)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["time", "value"])?;
        for (t, v) in self.grid.times().iter().zip(&self.values) {
            wtr.write_record([format!("{t:e}"), format!("{v:e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seconds_grid(seconds: usize, step: usize) -> TimeGrid {
        TimeGrid::uniform(seconds / step, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        assert!(TimeGrid::new(vec![0.1, 0.5]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(TimeGrid::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn mesh_is_largest_gap() {
        let g = TimeGrid::new(vec![0.0, 0.1, 0.5, 0.6]).unwrap();
        assert!((g.mesh() - 0.4).abs() < 1e-15);
        assert_eq!(g.intervals(), 3);
    }

    #[test]
    fn one_second_day_resamples_to_84_intervals() {
        let fine = seconds_grid(25_200, 1);
        let values: Vec<f64> = (0..fine.len()).map(|k| k as f64).collect();
        let path = SampledPath::new(fine, values).unwrap();
        let coarse = seconds_grid(25_200, 300);
        let sampled = path.resample(&coarse).unwrap();
        assert_eq!(sampled.grid().intervals(), 84);
        // exact fine indices are hit, not their neighbours
        assert_eq!(sampled.values()[1], 300.0);
        assert_eq!(sampled.values()[84], 25_200.0);
    }

    #[test]
    fn resample_onto_same_grid_is_identity() {
        let g = TimeGrid::new(vec![0.0, 0.3, 0.7, 1.0]).unwrap();
        let p = SampledPath::new(g.clone(), vec![1.0, 2.0, -1.0, 4.0]).unwrap();
        assert_eq!(p.resample(&g).unwrap(), p);
    }

    #[test]
    fn resample_between_points_takes_preceding_value() {
        let g = TimeGrid::new(vec![0.0, 0.3, 0.7, 1.0]).unwrap();
        let p = SampledPath::new(g, vec![1.0, 2.0, -1.0, 4.0]).unwrap();
        let coarse = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(p.resample(&coarse).unwrap().values(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn resample_rejects_longer_horizon() {
        let g = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let p = SampledPath::new(g, vec![0.0, 1.0, 2.0]).unwrap();
        let coarse = TimeGrid::new(vec![0.0, 2.0]).unwrap();
        assert!(p.resample(&coarse).is_err());
    }

    #[test]
    fn csv_roundtrip_and_header_check() {
        let g = TimeGrid::new(vec![0.0, 0.25, 1.0]).unwrap();
        let p = SampledPath::new(g, vec![0.0, 0.125, -3.5e-4]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(SampledPath::read_csv(buf.as_slice()).unwrap(), p);

        let bad = "t,v\n0,1\n1,2\n";
        assert!(SampledPath::read_csv(bad.as_bytes())
            .unwrap_err()
            .is_parse_error());
        let bad_num = "time,value\n0,1\n1,abc\n";
        assert!(SampledPath::read_csv(bad_num.as_bytes())
            .unwrap_err()
            .is_parse_error());
    }

    #[test]
    fn up_to_truncates() {
        let g = TimeGrid::uniform(4, 1.0).unwrap();
        let h = g.up_to(0.5).unwrap();
        assert_eq!(h.intervals(), 2);
        assert!(g.up_to(0.1).is_err());
    }

    fn arb_path() -> impl Strategy<Value = SampledPath> {
        prop::collection::vec((1e-3f64..1.0, -1.0f64..1.0), 1..40).prop_map(|steps| {
            let mut times = vec![0.0];
            let mut values = vec![0.0];
            for (dt, dx) in steps {
                times.push(times.last().unwrap() + dt);
                values.push(values.last().unwrap() + dx);
            }
            SampledPath::new(TimeGrid::new(times).unwrap(), values).unwrap()
        })
    }

    proptest! {
        #[test]
        fn resample_is_idempotent(path in arb_path(), k in 1usize..20) {
            let coarse = TimeGrid::uniform(k, path.grid().horizon()).unwrap();
            let once = path.resample(&coarse).unwrap();
            let twice = once.resample(&coarse).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn increments_telescope(path in arb_path()) {
            let total: f64 = crate::sum::compensated_sum(path.increments());
            let v = path.values();
            let direct = v[v.len() - 1] - v[0];
            prop_assert!((total - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }
}
