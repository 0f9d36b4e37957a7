use crate::error::{Error, Result};
use crate::geometry::Pose2;

use super::PlannedPath;

/// Poses at arc lengths `spacing, 2·spacing, …` along the path, the last one
/// at the goal. A path of length `L` yields `max(1, ⌈L/spacing⌉)` poses.
/// Headings follow the path tangent averaged over a window of one spacing,
/// which smooths the staircase of an 8-connected cell path.
pub fn place_vertices(path: &PlannedPath, spacing: f64) -> Result<Vec<Pose2>> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid("vertex spacing must be positive"));
    }
    if path.waypoints.is_empty() {
        return Err(Error::invalid("path has no waypoints"));
    }
    let pts = &path.waypoints;
    let mut arc = Vec::with_capacity(pts.len());
    arc.push(0.0);
    for w in pts.windows(2) {
        let last = *arc.last().unwrap();
        arc.push(last + (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1));
    }
    let total = *arc.last().unwrap();
    let count = ((total / spacing - 1e-9).ceil() as usize).max(1);
    let at = |s: f64| -> (f64, f64) {
        let s = s.clamp(0.0, total);
        let k = arc.partition_point(|&a| a < s).clamp(1, pts.len().max(2) - 1);
        if pts.len() == 1 {
            return pts[0];
        }
        let (a0, a1) = (arc[k - 1], arc[k]);
        let t = if a1 > a0 { (s - a0) / (a1 - a0) } else { 1.0 };
        (pts[k - 1].0 + t * (pts[k].0 - pts[k - 1].0), pts[k - 1].1 + t * (pts[k].1 - pts[k - 1].1))
    };
    let half = 0.5 * spacing;
    Ok((1..=count)
        .map(|k| {
            let s = (k as f64 * spacing).min(total);
            let (x, y) = at(s);
            let behind = at(s - half);
            let ahead = at(s + half);
            let theta = if total > 0.0 {
                (ahead.1 - behind.1).atan2(ahead.0 - behind.0)
            } else {
                0.0
            };
            Pose2::new(x, y, theta)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn straight(len: f64, n: usize, angle: f64) -> PlannedPath {
        let waypoints = (0..=n)
            .map(|i| {
                let s = len * i as f64 / n as f64;
                (1.0 + s * angle.cos(), 2.0 + s * angle.sin())
            })
            .collect();
        PlannedPath { waypoints, cost: len }
    }

    #[test]
    fn five_meters() {
        let p = straight(5.0, 50, 0.0);
        let v = place_vertices(&p, 1.0).unwrap();
        assert_eq!(v.len(), 5);
        let last = v.last().unwrap();
        assert!((last.x - 6.0).abs() < 1e-12 && (last.y - 2.0).abs() < 1e-12);
        assert!((v[0].x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn short_path_single_pose_at_goal() {
        let p = straight(0.3, 3, 1.0);
        let v = place_vertices(&p, 1.0).unwrap();
        assert_eq!(v.len(), 1);
        let g = p.goal();
        assert!((v[0].x - g.0).abs() < 1e-12 && (v[0].y - g.1).abs() < 1e-12);
    }

    #[test]
    fn single_waypoint() {
        let p = PlannedPath { waypoints: vec![(1.0, 1.0)], cost: 0.0 };
        let v = place_vertices(&p, 1.0).unwrap();
        assert_eq!(v, vec![Pose2::new(1.0, 1.0, 0.0)]);
        assert!(place_vertices(&p, 0.0).is_err());
    }

    #[test]
    fn straight_headings() {
        let angle = -2.3;
        let v = place_vertices(&straight(4.2, 42, angle), 1.0).unwrap();
        assert_eq!(v.len(), 5);
        for p in v {
            assert!((p.theta - angle).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn count_monotone_in_length(a in 0.0f64..20.0, b in 0.0f64..20.0, spacing in 0.2f64..3.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let n_lo = place_vertices(&straight(lo, 10, 0.4), spacing).unwrap().len();
            let n_hi = place_vertices(&straight(hi, 10, 0.4), spacing).unwrap().len();
            prop_assert!(n_lo <= n_hi);
            prop_assert_eq!(n_hi, ((hi / spacing - 1e-9).ceil() as usize).max(1));
        }
    }
}
