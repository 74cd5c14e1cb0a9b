//! Finite point clouds standing in for compact spaces and orbit closures.
//!
//! A cloud carries a resolution radius r: the single ball radius that proxies
//! "open set" everywhere downstream. Verdicts are meaningful only together
//! with r, so it travels with the cloud.

use crate::error::{DynError, Result};
use crate::space::{AmbientSpace, Point, SpaceKind, SymPoint};
use crate::system::{orbit_segment, Horizon, SystemSpec};

#[derive(Clone, Debug)]
pub enum Provenance {
    Grid { density: usize },
    OrbitClosure { base: String, horizon: i64 },
    Explicit { label: String },
}

#[derive(Clone, Debug)]
pub struct SampleCloud {
    pub space: AmbientSpace,
    pub points: Vec<Point>,
    pub r: f64,
    pub provenance: Provenance,
}

impl SampleCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.space.distance(&self.points[i], &self.points[j])
    }

    /// Indices within the closed ball of radius `r` around point i.
    pub fn ball(&self, i: usize, r: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.distance(i, j) <= r)
            .collect()
    }

    /// All balls at the cloud's own radius.
    pub fn balls(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|i| self.ball(i, self.r)).collect()
    }

    /// Same points, different resolution radius.
    pub fn with_r(&self, r: f64) -> SampleCloud {
        SampleCloud {
            r,
            ..self.clone()
        }
    }

    /// Half the maximal nearest-neighbor gap; the radius at which the cloud
    /// covers itself in the sample_space sense.
    pub fn covering_radius(&self) -> f64 {
        let n = self.len();
        if n <= 1 {
            return self.r;
        }
        let max_nn = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| self.distance(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        0.5 * max_nn
    }

    pub fn nearest(&self, p: &Point) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, q) in self.points.iter().enumerate() {
            let d = self.space.distance(p, q);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

/// Deterministic quasi-uniform grid on a geometric space. r is half the
/// maximal nearest-neighbor gap; coverage is guaranteed analytically per
/// space kind.
pub fn sample_space(space: &AmbientSpace, density: usize) -> Result<SampleCloud> {
    if density < 2 {
        return Err(DynError::DensityTooSmall {
            density,
            kind: format!("{:?}", space.kind),
        });
    }
    let (points, r) = match &space.kind {
        SpaceKind::Circle => {
            let pts = (0..density)
                .map(|k| Point::Circle(k as f64 / density as f64))
                .collect();
            (pts, 1.0 / (2.0 * density as f64))
        }
        SpaceKind::Interval => {
            let m = density - 1;
            let pts = (0..density)
                .map(|k| Point::Interval(k as f64 / m as f64))
                .collect();
            (pts, 1.0 / (2.0 * m as f64))
        }
        SpaceKind::Torus2 => {
            let mut pts = Vec::with_capacity(density * density);
            for i in 0..density {
                for j in 0..density {
                    pts.push(Point::Torus([
                        i as f64 / density as f64,
                        j as f64 / density as f64,
                    ]));
                }
            }
            (pts, 1.0 / (2.0 * density as f64))
        }
        SpaceKind::Disk => {
            // polar rings j/density with ~8j points on ring j; every disk
            // point is within half a radial gap plus half an angular chord
            let d = density as f64;
            let mut pts = vec![Point::Disk([0.0, 0.0])];
            for j in 1..=density {
                let rho = j as f64 / d;
                let m = 8 * j;
                for k in 0..m {
                    let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    pts.push(Point::Disk([rho * ang.cos(), rho * ang.sin()]));
                }
            }
            (pts, 1.0 / (2.0 * d) + std::f64::consts::PI / (8.0 * d))
        }
        SpaceKind::SequenceSpace { alphabet, .. } => {
            if *alphabet != 2 {
                return Err(DynError::Subshift(
                    "grid sampling implemented for the binary full shift; use orbit closures"
                        .into(),
                ));
            }
            let order = (density as f64).log2().ceil().max(1.0) as u32;
            let word = de_bruijn(2, order as usize);
            let period = word.len() as i64;
            let gen = crate::space::SymGen::new(
                format!("debruijn-2-{order}"),
                2,
                move |n: i64| word[n.rem_euclid(period) as usize],
            );
            let pts: Vec<Point> = (0..period)
                .map(|k| {
                    Point::Sym(SymPoint {
                        gen: gen.clone(),
                        offset: k,
                    })
                })
                .collect();
            // every binary sequence agrees with some cyclic shift through a
            // centered window of length ~order/2 on each side
            let half = ((order as i64 - 1) / 2).max(0);
            (pts, 0.5f64.powi(half as i32))
        }
        SpaceKind::Suspension { .. } => {
            return Err(DynError::Subshift(
                "suspension spaces are sampled from their construction".into(),
            ))
        }
    };
    Ok(SampleCloud {
        space: space.clone(),
        points,
        r,
        provenance: Provenance::Grid { density },
    })
}

/// Binary-alphabet de Bruijn word containing every `order`-word once.
pub fn de_bruijn(sigma: usize, order: usize) -> Vec<u8> {
    fn rec(sigma: usize, order: usize, t: usize, p: usize, a: &mut Vec<u8>, s: &mut Vec<u8>) {
        if t > order {
            if order % p == 0 {
                s.extend(&a[1..p + 1]);
            }
        } else {
            a[t] = a[t - p];
            rec(sigma, order, t + 1, p, a, s);
            for c in a[t - p] + 1..sigma as u8 {
                a[t] = c;
                rec(sigma, order, t + 1, t, a, s);
            }
        }
    }
    let mut a = vec![0u8; order * sigma + 1];
    let mut s = Vec::with_capacity(sigma.pow(order as u32));
    rec(sigma, order, 1, 1, &mut a, &mut s);
    s
}

/// Orbit segment with near-duplicates merged (greedy, in |n| order), standing
/// in for the orbit closure at the given depth.
pub fn orbit_closure_sample(
    sys: &SystemSpec,
    x: &Point,
    horizon: Horizon,
    merge_tol: f64,
) -> Result<SampleCloud> {
    if merge_tol < 0.0 {
        return Err(DynError::Precondition("merge-tol must be >= 0".into()));
    }
    let seg = orbit_segment(sys, x, horizon)?;
    // visit n = 0, 1, -1, 2, -2, ... so representatives have small |n|
    let mut order: Vec<usize> = (0..seg.len()).collect();
    order.sort_by_key(|&i| {
        let n = seg[i].0;
        (n.abs(), n < 0)
    });
    let mut kept: Vec<Point> = Vec::new();
    for &i in &order {
        let p = &seg[i].1;
        let dup = kept
            .iter()
            .any(|q| sys.space.distance(p, q) <= merge_tol);
        if !dup {
            kept.push(p.clone());
        }
    }
    let r = if merge_tol > 0.0 {
        merge_tol
    } else {
        let mut min_gap = f64::INFINITY;
        for i in 0..kept.len() {
            for j in i + 1..kept.len() {
                let d = sys.space.distance(&kept[i], &kept[j]);
                if d > 0.0 {
                    min_gap = min_gap.min(d);
                }
            }
        }
        if min_gap.is_finite() {
            0.5 * min_gap
        } else {
            sys.space.diameter() * 0.5
        }
    };
    Ok(SampleCloud {
        space: sys.space.clone(),
        points: kept,
        r,
        provenance: Provenance::OrbitClosure {
            base: x.describe(),
            horizon: horizon.0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{cat_map, disk_twist, rotation};

    #[test]
    fn circle_grid_of_8() {
        let cloud = sample_space(&AmbientSpace::circle(), 8).unwrap();
        assert_eq!(cloud.len(), 8);
        assert!((cloud.r - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn interval_grid_of_5() {
        let cloud = sample_space(&AmbientSpace::interval(), 5).unwrap();
        assert_eq!(cloud.len(), 5);
        assert!((cloud.r - 0.125).abs() < 1e-15);
        let expect = [0.0, 0.25, 0.5, 0.75, 1.0];
        for (p, e) in cloud.points.iter().zip(expect) {
            assert!(matches!(p, Point::Interval(v) if (*v - e).abs() < 1e-15));
        }
    }

    #[test]
    fn torus_grid_of_4() {
        let cloud = sample_space(&AmbientSpace::torus2(), 4).unwrap();
        assert_eq!(cloud.len(), 16);
        assert!((cloud.r - 0.125).abs() < 1e-15);
    }

    #[test]
    fn grids_cover_dense_probes() {
        // max over a dense probe set of distance-to-cloud <= r
        let cases = vec![
            (AmbientSpace::circle(), 16usize),
            (AmbientSpace::interval(), 9),
            (AmbientSpace::torus2(), 6),
            (AmbientSpace::disk(), 5),
        ];
        for (space, density) in cases {
            let cloud = sample_space(&space, density).unwrap();
            let probes: Vec<Point> = (0..500)
                .map(|i| {
                    let u = (i as f64 + 0.37) / 500.0;
                    let v = ((i * 7 + 11) % 500) as f64 / 500.0;
                    match space.kind {
                        SpaceKind::Circle => Point::Circle(u),
                        SpaceKind::Interval => Point::Interval(u),
                        SpaceKind::Torus2 => Point::Torus([u, v]),
                        SpaceKind::Disk => {
                            let rho = u.sqrt();
                            let ang = 2.0 * std::f64::consts::PI * v;
                            Point::Disk([rho * ang.cos(), rho * ang.sin()])
                        }
                        _ => unreachable!(),
                    }
                })
                .collect();
            for p in &probes {
                let (_, d) = cloud.nearest(p);
                assert!(
                    d <= cloud.r + 1e-12,
                    "{}: probe {} at {}",
                    space.descriptor(),
                    p.describe(),
                    d
                );
            }
        }
    }

    #[test]
    fn rational_rotation_orbit_closure_has_four_points() {
        let sys = rotation(0.25).unwrap();
        let cloud = orbit_closure_sample(&sys, &Point::Circle(0.0), Horizon(100), 0.0).unwrap();
        assert_eq!(cloud.len(), 4);
    }

    #[test]
    fn irrational_rotation_orbit_closure_has_no_merges() {
        // pairwise-distance oracle: all 2001 iterates are distinct
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let cloud =
            orbit_closure_sample(&sys, &Point::Circle(0.0), Horizon(1000), 1e-6).unwrap();
        assert_eq!(cloud.len(), 2001);
        for i in 0..40 {
            for j in i + 1..40 {
                assert!(cloud.distance(i, j) > 1e-6);
            }
        }
    }

    #[test]
    fn disk_twist_orbit_stays_on_its_circle() {
        let sys = disk_twist();
        let cloud =
            orbit_closure_sample(&sys, &Point::Disk([0.5, 0.0]), Horizon(50), 0.0).unwrap();
        assert!(cloud.len() <= 101);
        for p in &cloud.points {
            match p {
                Point::Disk([x, y]) => {
                    assert!(((x * x + y * y).sqrt() - 0.5).abs() < 1e-9)
                }
                _ => panic!(),
            }
        }
    }

    #[test]
    fn orbit_closure_monotone_in_horizon() {
        let sys = cat_map();
        let x = Point::Torus([0.3, 0.2]);
        let small = orbit_closure_sample(&sys, &x, Horizon(8), 1e-9).unwrap();
        let large = orbit_closure_sample(&sys, &x, Horizon(16), 1e-9).unwrap();
        for p in &small.points {
            let (_, d) = large.nearest(p);
            assert!(d <= 1e-9);
        }
    }

    #[test]
    fn density_too_small_is_an_error() {
        assert!(sample_space(&AmbientSpace::circle(), 1).is_err());
    }

    #[test]
    fn de_bruijn_word_is_complete() {
        let w = de_bruijn(2, 3);
        assert_eq!(w, vec![0, 0, 0, 1, 0, 1, 1, 1]);
        let w8 = de_bruijn(2, 8);
        assert_eq!(w8.len(), 256);
        let mut seen = std::collections::HashSet::new();
        for i in 0..256usize {
            let word: Vec<u8> = (0..8).map(|k| w8[(i + k) % 256]).collect();
            seen.insert(word);
        }
        assert_eq!(seen.len(), 256);
    }
}
