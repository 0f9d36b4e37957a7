use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Mean of the member points.
    pub centroid: (f64, f64),
    pub count: usize,
    /// Indices into the input slice.
    pub members: Vec<usize>,
}

const MAX_SHIFTS: usize = 100;
const CONVERGED: f64 = 1e-4;

/// Flat-kernel mean-shift. Every point climbs to a mode; points whose modes
/// lie within half a bandwidth of each other share a cluster.
pub fn cluster_mean_shift(points: &[(f64, f64)], bandwidth: f64) -> Result<Vec<Cluster>> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::invalid("bandwidth must be positive"));
    }
    let bw2 = bandwidth * bandwidth;
    let mut modes: Vec<(f64, f64)> = Vec::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let mut x = p;
        for _ in 0..MAX_SHIFTS {
            let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
            for q in points {
                if (q.0 - x.0).powi(2) + (q.1 - x.1).powi(2) <= bw2 {
                    sx += q.0;
                    sy += q.1;
                    n += 1;
                }
            }
            if n == 0 {
                break;
            }
            let m = (sx / n as f64, sy / n as f64);
            let moved = (m.0 - x.0).hypot(m.1 - x.1);
            x = m;
            if moved < CONVERGED {
                break;
            }
        }
        match modes
            .iter()
            .position(|m| (m.0 - x.0).hypot(m.1 - x.1) < 0.5 * bandwidth)
        {
            Some(k) => clusters[k].push(i),
            None => {
                modes.push(x);
                clusters.push(vec![i]);
            }
        }
    }
    Ok(clusters
        .into_iter()
        .map(|members| {
            let n = members.len() as f64;
            let cx = members.iter().map(|&m| points[m].0).sum::<f64>() / n;
            let cy = members.iter().map(|&m| points[m].1).sum::<f64>() / n;
            Cluster { centroid: (cx, cy), count: members.len(), members }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_blobs() {
        let mut pts = Vec::new();
        for i in 0..5 {
            pts.push((0.0 + 0.05 * i as f64, 0.0));
            pts.push((5.0, 5.0 + 0.05 * i as f64));
        }
        let cl = cluster_mean_shift(&pts, 0.75).unwrap();
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].count, 5);
        assert!((cl[0].centroid.0 - 0.1).abs() < 1e-12);
        assert!((cl[1].centroid.1 - 5.1).abs() < 1e-12);
    }

    #[test]
    fn empty_input() {
        assert!(cluster_mean_shift(&[], 1.0).unwrap().is_empty());
        assert!(cluster_mean_shift(&[(0.0, 0.0)], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn partition_of_input(pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 0..40)) {
            let cl = cluster_mean_shift(&pts, 0.75).unwrap();
            let mut all: Vec<usize> = cl.iter().flat_map(|c| c.members.clone()).collect();
            all.sort();
            prop_assert_eq!(all, (0..pts.len()).collect::<Vec<_>>());
            prop_assert_eq!(cl.iter().map(|c| c.count).sum::<usize>(), pts.len());
        }
    }
}
