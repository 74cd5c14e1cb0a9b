//! The fragmentation kernel: greatest-fixpoint peeling of points whose ball
//! piece is epsilon-small in a target pseudometric.
//!
//! Peeling is sound and complete for the subset formulation: the fixpoint is
//! empty exactly when every nonempty subset A of the cloud has a point a with
//! rho-diam(B(a, r) cap A) <= epsilon. Soundness rests on ball-piece diameters
//! being monotone under subsets, which makes the peeling rank a valid
//! induction order. This equivalence is exhaustively tested against the
//! all-subsets oracle on small clouds.

use rayon::prelude::*;

use crate::error::{DynError, Result};
use crate::pseudometric::Pseudometric;

#[derive(Clone, Debug, serde::Serialize)]
pub struct FragmentationReport {
    pub epsilon: f64,
    pub r: f64,
    pub fragmented: bool,
    /// Peeling stage per point index; None for residual points.
    pub ranks: Vec<Option<u32>>,
    /// Indices of the residual bad set (empty iff fragmented).
    pub residual: Vec<usize>,
    pub stages: u32,
}

/// Runs the kernel with explicit ball lists (closed balls, ties included).
pub fn fragmentation_kernel_with_balls(
    balls: &[Vec<usize>],
    rho: &Pseudometric,
    epsilon: f64,
    r: f64,
) -> Result<FragmentationReport> {
    if epsilon <= 0.0 || r <= 0.0 {
        return Err(DynError::Precondition(
            "epsilon and r must be positive".into(),
        ));
    }
    let n = balls.len();
    let mut alive = vec![true; n];
    let mut ranks: Vec<Option<u32>> = vec![None; n];
    let mut stage = 0u32;
    loop {
        let peel: Vec<usize> = (0..n)
            .into_par_iter()
            .filter(|&i| {
                if !alive[i] {
                    return false;
                }
                let mut diam = 0.0f64;
                let piece: Vec<usize> =
                    balls[i].iter().copied().filter(|&j| alive[j]).collect();
                for (a, &x) in piece.iter().enumerate() {
                    for &y in &piece[a + 1..] {
                        diam = diam.max(rho.eval(x, y));
                        if diam > epsilon {
                            return false;
                        }
                    }
                }
                diam <= epsilon
            })
            .collect();
        if peel.is_empty() {
            break;
        }
        stage += 1;
        for i in peel {
            alive[i] = false;
            ranks[i] = Some(stage);
        }
    }
    let residual: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    Ok(FragmentationReport {
        epsilon,
        r,
        fragmented: residual.is_empty(),
        ranks,
        residual,
        stages: stage.max(1),
    })
}

/// Kernel over a cloud-shaped input: balls come from an ambient ball metric.
pub fn fragmentation_kernel(
    n: usize,
    ball_metric: impl Fn(usize, usize) -> f64 + Sync,
    rho: &Pseudometric,
    epsilon: f64,
    r: f64,
) -> Result<FragmentationReport> {
    let balls: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| ball_metric(i, j) <= r).collect())
        .collect();
    fragmentation_kernel_with_balls(&balls, rho, epsilon, r)
}

/// Smallest epsilon in a descending grid at which the kernel fragments;
/// +infinity when none does. A set of diameter exactly epsilon counts as
/// epsilon-small (ties use <=).
pub fn fragmentation_defect(
    balls: &[Vec<usize>],
    rho: &Pseudometric,
    r: f64,
    grid: &[f64],
) -> Result<f64> {
    if grid.is_empty() {
        return Err(DynError::EmptyGrid);
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut best = f64::INFINITY;
    for &eps in &sorted {
        let rep = fragmentation_kernel_with_balls(balls, rho, eps, r)?;
        if rep.fragmented {
            best = eps;
        } else {
            break; // monotone: smaller eps cannot fragment if this one failed
        }
    }
    Ok(best)
}

/// Replays the peeling order and certifies the subset property
/// constructively: at each stage the peeled points' ball pieces inside the
/// surviving set are epsilon-small.
pub fn replay_check(
    balls: &[Vec<usize>],
    rho: &Pseudometric,
    report: &FragmentationReport,
) -> bool {
    if !report.fragmented {
        return true;
    }
    let n = balls.len();
    for stage in 1..=report.stages {
        for i in 0..n {
            if report.ranks[i] == Some(stage) {
                let piece: Vec<usize> = balls[i]
                    .iter()
                    .copied()
                    .filter(|&j| match report.ranks[j] {
                        None => true,
                        Some(s) => s >= stage,
                    })
                    .collect();
                if rho.diam_of(&piece) > report.epsilon {
                    return false;
                }
            }
        }
    }
    true
}
