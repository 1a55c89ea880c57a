//! Flat-kernel mean shift.
//!
//! Every point seeds a climb: the seed moves to the mean of all points within
//! `bandwidth` until a step is shorter than `1e-3 * bandwidth` or `max_iter`
//! is reached. Modes are then visited by descending neighborhood size (ties:
//! lexicographic coordinates) and merged into the first kept mode within
//! `bandwidth / 2`. Labels are numbered by descending cluster size.
//!
//! Points are processed in lexicographic order internally, so the result does
//! not depend on input order, down to the last floating-point bit.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::par;

const TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct MeanShiftResult {
    /// Cluster label per input point, in input order.
    pub labels: Vec<usize>,
    /// Mode of each cluster, indexed by label.
    pub centers: Vec<Vec<f64>>,
}

impl MeanShiftResult {
    pub fn n_clusters(&self) -> usize {
        self.centers.len()
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct Climb {
    mode: Vec<f64>,
    intensity: usize,
}

fn climb(points: &[&[f64]], start: &[f64], bandwidth: f64, max_iter: usize) -> Climb {
    let radius2 = bandwidth * bandwidth;
    let dim = start.len();
    let mut x = start.to_vec();
    let mut within = 0;
    for _ in 0..max_iter {
        let mut sum = vec![0.0; dim];
        within = 0;
        for p in points {
            if dist2(p, &x) <= radius2 {
                within += 1;
                for (s, v) in sum.iter_mut().zip(p.iter()) {
                    *s += v;
                }
            }
        }
        if within == 0 {
            break;
        }
        let mean: Vec<f64> = sum.into_iter().map(|s| s / within as f64).collect();
        let shift = dist2(&mean, &x).sqrt();
        x = mean;
        if shift < TOLERANCE * bandwidth {
            break;
        }
    }
    let intensity = points.iter().filter(|p| dist2(p, &x) <= radius2).count();
    debug_assert!(within > 0 || intensity == 0);
    Climb { mode: x, intensity }
}

pub fn mean_shift(points: &[Vec<f64>], bandwidth: f64, max_iter: usize) -> Result<MeanShiftResult> {
    if points.is_empty() {
        return Err(Error::EmptyInput("mean shift needs at least one point"));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::Config(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
        return Err(Error::Domain("points must share one dimension and be finite".into()));
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]));
    let sorted: Vec<&[f64]> = order.iter().map(|&i| points[i].as_slice()).collect();

    let climbs = par::map(&sorted, |p| climb(&sorted, p, bandwidth, max_iter));

    let mut visit: Vec<usize> = (0..climbs.len()).collect();
    visit.sort_by(|&a, &b| {
        climbs[b]
            .intensity
            .cmp(&climbs[a].intensity)
            .then_with(|| lex_cmp(&climbs[a].mode, &climbs[b].mode))
    });
    let merge2 = (bandwidth / 2.0) * (bandwidth / 2.0);
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut seed_center = vec![0usize; climbs.len()];
    for s in visit {
        let mode = &climbs[s].mode;
        match kept.iter().position(|c| dist2(c, mode) <= merge2) {
            Some(c) => seed_center[s] = c,
            None => {
                seed_center[s] = kept.len();
                kept.push(mode.clone());
            }
        }
    }

    let mut sizes = vec![0usize; kept.len()];
    for &c in &seed_center {
        sizes[c] += 1;
    }
    let mut rank: Vec<usize> = (0..kept.len()).collect();
    rank.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then_with(|| lex_cmp(&kept[a], &kept[b])));
    let mut relabel = vec![0usize; kept.len()];
    for (new, &old) in rank.iter().enumerate() {
        relabel[old] = new;
    }

    let mut labels = vec![0usize; points.len()];
    for (sorted_pos, &orig) in order.iter().enumerate() {
        labels[orig] = relabel[seed_center[sorted_pos]];
    }
    let centers = rank.into_iter().map(|old| kept[old].clone()).collect();
    Ok(MeanShiftResult { labels, centers })
}
