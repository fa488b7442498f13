//! Does the per-degree collision level drift with network density?
//!
//! Each `(node count, degree)` bucket with enough samples contributes one
//! point `mean collisions ~ β0 + β_count·count + β_degree·degree`. The
//! density effect is `β_count`, tested against zero with a two-sided
//! Student t test.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use statrs::distribution::{ContinuousCDF, StudentsT};

use ringvcs_core::collisions::{CollisionStats, MIN_CONFIDENT_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFit {
    pub points: usize,
    pub count_slope: f64,
    pub count_slope_se: f64,
    pub degree_slope: f64,
    /// Two-sided 95% critical value of the t distribution.
    pub t_critical: f64,
}

impl TrendFit {
    pub fn t_statistic(&self) -> f64 {
        self.count_slope / self.count_slope_se
    }

    /// True when the density slope is not significantly different from 0
    /// at the 95% level.
    pub fn density_independent(&self) -> bool {
        self.count_slope.abs() <= self.t_critical * self.count_slope_se
    }
}

/// Solves the 3×3 system `m·x = v` by Gaussian elimination with partial
/// pivoting; also returns the inverse's diagonal.
fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> Option<([f64; 3], [f64; 3])> {
    // Augment with the identity to get the inverse alongside.
    let mut a = [[0.0; 7]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = v[i];
        a[i][4 + i] = 1.0;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let p = a[col][col];
        a[col].iter_mut().for_each(|x| *x /= p);
        for row in 0..3 {
            if row != col {
                let f = a[row][col];
                let pivot_row = a[col];
                a[row].iter_mut().zip(pivot_row).for_each(|(x, y)| *x -= f * y);
            }
        }
    }
    Some((
        [a[0][3], a[1][3], a[2][3]],
        [a[0][4], a[1][5], a[2][6]],
    ))
}

pub fn density_trend(
    per_count: &BTreeMap<usize, CollisionStats>,
    degrees: RangeInclusive<usize>,
) -> Option<TrendFit> {
    let points: Vec<[f64; 3]> = per_count
        .iter()
        .flat_map(|(&count, stats)| {
            stats
                .buckets
                .range(degrees.clone())
                .filter(|(_, b)| b.samples >= MIN_CONFIDENT_SAMPLES)
                .map(move |(&d, b)| [count as f64, d as f64, b.mean()])
        })
        .collect();
    let n = points.len();
    if n < 4 {
        return None;
    }
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for p in &points {
        let row = [1.0, p[0], p[1]];
        for i in 0..3 {
            xty[i] += row[i] * p[2];
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let (beta, inv_diag) = solve3(xtx, xty)?;
    let rss: f64 = points
        .iter()
        .map(|p| {
            let r = p[2] - (beta[0] + beta[1] * p[0] + beta[2] * p[1]);
            r * r
        })
        .sum();
    let df = (n - 3) as f64;
    let sigma2 = rss / df;
    let t_critical = StudentsT::new(0.0, 1.0, df).ok()?.inverse_cdf(0.975);
    Some(TrendFit {
        points: n,
        count_slope: beta[1],
        count_slope_se: (sigma2 * inv_diag[1]).sqrt(),
        degree_slope: beta[2],
        t_critical,
    })
}
