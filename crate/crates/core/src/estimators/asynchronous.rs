//! Truncated Hayashi-Yoshida covariation for asynchronously observed paths.

use crate::error::Result;
use crate::grid::TIME_EPS;
use crate::panel::AsyncPanel;
use crate::threshold::check_r_h;

use super::sync::{accumulate_products, truncate};

/// `]a, b] ∩ ]c, d] ≠ ∅`.
#[inline]
pub fn intervals_overlap(a: f64, b: f64, c: f64, d: f64) -> bool {
    a < d - TIME_EPS && c < b - TIME_EPS
}

/// Sums `(ΔX¹)⋆ (ΔX²)⋆` over every pair of observation intervals that
/// overlap. Terms are added path-1-major, path-2 ascending, so on a common
/// grid this reproduces [`super::threshold_ic`] bit for bit.
///
/// `r_h` should be computed from [`AsyncPanel::mesh`], the larger of the two
/// meshes.
pub fn hy_threshold_ic(panel: &AsyncPanel, r_h: f64) -> Result<f64> {
    check_r_h(r_h)?;
    let tau = panel.path1().grid().times();
    let nu = panel.path2().grid().times();
    let x: Vec<f64> = panel
        .path1()
        .increments()
        .into_iter()
        .map(|d| truncate(d, r_h))
        .collect();
    let y: Vec<f64> = panel
        .path2()
        .increments()
        .into_iter()
        .map(|d| truncate(d, r_h))
        .collect();

    let k = y.len();
    let mut first = 0usize;
    let mut terms = Vec::with_capacity(x.len() + k);
    for (j, &xj) in x.iter().enumerate() {
        let (a, b) = (tau[j], tau[j + 1]);
        // path-2 intervals ending at or before `a` cannot overlap this or any later interval
        while first < k && nu[first + 1] <= a + TIME_EPS {
            first += 1;
        }
        let mut i = first;
        while i < k && nu[i] < b - TIME_EPS {
            debug_assert!(intervals_overlap(a, b, nu[i], nu[i + 1]));
            terms.push((xj, y[i]));
            i += 1;
        }
    }
    Ok(accumulate_products(terms))
}
