//! Orbit-sup pseudometrics over sample clouds, epsilon-nets and
//! separability profiles.
//!
//! Pseudometrics are materialized as packed symmetric matrices over cloud
//! indices. Entries are pure maxima of pointwise distances, so parallel
//! evaluation is bit-deterministic regardless of thread count.

use rayon::prelude::*;

use crate::error::{DynError, Result};
use crate::sampling::SampleCloud;
use crate::space::{first_disagreement, Point, SpaceKind};
use crate::system::{Horizon, SystemSpec};

/// A symmetric, zero-diagonal distance table over cloud indices.
#[derive(Clone, Debug)]
pub struct Pseudometric {
    pub label: String,
    n: usize,
    // packed strict upper triangle, row-major
    values: Vec<f64>,
}

impl Pseudometric {
    fn packed_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn eval(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else if i < j {
            self.values[self.packed_index(i, j)]
        } else {
            self.values[self.packed_index(j, i)]
        }
    }

    pub fn diameter(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &b| a.max(b))
    }

    /// Diameter of a subset of indices.
    pub fn diam_of(&self, idx: &[usize]) -> f64 {
        let mut d = 0.0f64;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                d = d.max(self.eval(i, j));
            }
        }
        d
    }

    fn from_pair_fn(
        label: String,
        n: usize,
        f: impl Fn(usize, usize) -> f64 + Sync,
    ) -> Pseudometric {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let values: Vec<f64> = pairs.par_iter().map(|&(i, j)| f(i, j)).collect();
        Pseudometric { label, n, values }
    }

    /// The ambient metric itself.
    pub fn ambient(cloud: &SampleCloud) -> Pseudometric {
        Self::from_pair_fn("ambient-d".into(), cloud.len(), |i, j| cloud.distance(i, j))
    }

    /// d over the orbit window: max over |n| <= N of d(T^n x, T^n y).
    /// Always >= ambient d (the n = 0 term) and nondecreasing in N.
    pub fn orbit_sup(sys: &SystemSpec, cloud: &SampleCloud, horizon: Horizon) -> Result<Pseudometric> {
        let label = format!("d_H(N={})", horizon.0);
        if matches!(cloud.space.kind, SpaceKind::SequenceSpace { .. }) {
            let n = cloud.len();
            let pm = Self::from_pair_fn(label, n, |i, j| {
                sym_orbit_sup(&cloud.points[i], &cloud.points[j], horizon.0)
            });
            return Ok(pm);
        }
        let tables = iterate_tables(sys, cloud, horizon)?;
        let n = cloud.len();
        Ok(Self::from_pair_fn(label, n, |i, j| {
            let mut m = 0.0f64;
            for t in &tables {
                m = m.max(cloud.space.distance(&t[i], &t[j]));
            }
            m
        }))
    }

    /// Observable-sup pseudometric: max over |n| <= N of |f(T^n x) - f(T^n y)|.
    pub fn observable_sup(
        sys: &SystemSpec,
        obs: &Observable,
        cloud: &SampleCloud,
        horizon: Horizon,
    ) -> Result<Pseudometric> {
        obs.validate_on(cloud)?;
        let tables = iterate_tables(sys, cloud, horizon)?;
        let real_tables: Vec<Vec<f64>> = tables
            .iter()
            .map(|t| t.iter().map(|p| (obs.f)(p)).collect())
            .collect();
        let n = cloud.len();
        Ok(Self::from_pair_fn(
            format!("rho_Hf({},N={})", obs.label, horizon.0),
            n,
            |i, j| {
                let mut m = 0.0f64;
                for t in &real_tables {
                    m = m.max((t[i] - t[j]).abs());
                }
                m
            },
        ))
    }

    /// Sup over a family of real-valued tables of |f(x) - f(y)|.
    pub fn family_sup_real(label: &str, n: usize, tables: &[Vec<f64>]) -> Result<Pseudometric> {
        for t in tables {
            if t.len() != n {
                return Err(DynError::TableIncomplete(t.len()));
            }
        }
        Ok(Self::from_pair_fn(
            format!("family-sup({label},{} tables)", tables.len()),
            n,
            |i, j| {
                let mut m = 0.0f64;
                for t in tables {
                    m = m.max((t[i] - t[j]).abs());
                }
                m
            },
        ))
    }

    /// Sup over a family of point-valued tables of d(F(x), F(y)).
    pub fn family_sup_points(
        label: &str,
        cloud: &SampleCloud,
        tables: &[Vec<Point>],
    ) -> Result<Pseudometric> {
        for t in tables {
            if t.len() != cloud.len() {
                return Err(DynError::TableIncomplete(t.len()));
            }
        }
        Ok(Self::from_pair_fn(
            format!("family-sup({label},{} tables)", tables.len()),
            cloud.len(),
            |i, j| {
                let mut m = 0.0f64;
                for t in tables {
                    m = m.max(cloud.space.distance(&t[i], &t[j]));
                }
                m
            },
        ))
    }

    pub fn from_matrix(label: &str, n: usize, eval: impl Fn(usize, usize) -> f64 + Sync) -> Pseudometric {
        Self::from_pair_fn(label.to_string(), n, eval)
    }
}

/// Exact orbit-sup distance for sequence-space points: shifting moves the
/// nearest disagreement toward the origin, so the sup is 2^-(max(0, p - N))
/// with p the least |k| where symbols differ.
fn sym_orbit_sup(x: &Point, y: &Point, n: i64) -> f64 {
    match (x, y) {
        (Point::Sym(a), Point::Sym(b)) => {
            // scan far enough that anything unresolved is below 2^-40
            let cutoff = n + 40;
            match first_disagreement(a, b, cutoff) {
                Some(p) => {
                    let residual = (p - n).max(0);
                    0.5f64.powi(residual as i32)
                }
                None => 0.0,
            }
        }
        _ => f64::NAN,
    }
}

/// All iterate tables T^n over the cloud for |n| <= N.
pub fn iterate_tables(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    horizon: Horizon,
) -> Result<Vec<Vec<Point>>> {
    let n = horizon.0;
    let mut tables: Vec<Vec<Point>> = Vec::with_capacity((2 * n + 1) as usize);
    let mut fwd = cloud.points.clone();
    let mut bwd = cloud.points.clone();
    tables.push(cloud.points.clone());
    for _ in 1..=n {
        let next_f: Result<Vec<Point>> = fwd.iter().map(|p| sys.forward(p)).collect();
        let next_b: Result<Vec<Point>> = bwd.iter().map(|p| sys.inverse(p)).collect();
        fwd = next_f?;
        bwd = next_b?;
        tables.push(fwd.clone());
        tables.push(bwd.clone());
    }
    Ok(tables)
}

/// A registered real-valued observable with a declared sup-norm bound.
pub struct Observable {
    pub label: String,
    pub sup_norm: f64,
    pub lipschitz: Option<f64>,
    pub f: Box<dyn Fn(&Point) -> f64 + Send + Sync>,
}

impl Observable {
    pub fn new(
        label: impl Into<String>,
        sup_norm: f64,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Observable {
            label: label.into(),
            sup_norm,
            lipschitz: None,
            f: Box::new(f),
        }
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    /// Boundedness gate: non-finite or out-of-bound values are rejected here,
    /// not discovered downstream.
    pub fn validate_on(&self, cloud: &SampleCloud) -> Result<()> {
        for p in &cloud.points {
            let v = (self.f)(p);
            if !v.is_finite() || v.abs() > self.sup_norm + 1e-9 {
                return Err(DynError::BadObservable(
                    self.label.clone(),
                    format!("value {v} at {} exceeds declared bound {}", p.describe(), self.sup_norm),
                ));
            }
        }
        Ok(())
    }
}

/// Greedy farthest-point net: centers pairwise > epsilon apart, every point
/// within epsilon of a center. Seeded at index 0; ties resolve to the
/// smallest index, so the result is a pure function of the cloud order.
pub fn eps_net(rho: &Pseudometric, epsilon: f64) -> Vec<usize> {
    let n = rho.len();
    if n == 0 {
        return vec![];
    }
    let mut centers = vec![0usize];
    let mut dist_to_centers: Vec<f64> = (0..n).map(|i| rho.eval(0, i)).collect();
    loop {
        let mut best = 0usize;
        let mut best_d = -1.0;
        for i in 0..n {
            if dist_to_centers[i] > best_d {
                best_d = dist_to_centers[i];
                best = i;
            }
        }
        if best_d <= epsilon {
            break;
        }
        centers.push(best);
        for i in 0..n {
            dist_to_centers[i] = dist_to_centers[i].min(rho.eval(best, i));
        }
    }
    centers
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ProfileRow {
    pub horizon: i64,
    pub epsilon: f64,
    pub net_size: usize,
}

/// Net sizes across a schedule of (cloud, horizon) pairs. Purely descriptive:
/// finite nets cannot certify separability, so no verdict field exists.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SeparabilityProfile {
    pub pseudometric: String,
    pub rows: Vec<ProfileRow>,
}

pub enum RhoFamily<'a> {
    OrbitSup,
    ObservableSup(&'a Observable),
}

pub fn separability_profile(
    sys: &SystemSpec,
    family: RhoFamily<'_>,
    schedule: &[(SampleCloud, Horizon)],
    epsilon: f64,
) -> Result<SeparabilityProfile> {
    if schedule.is_empty() {
        return Err(DynError::Precondition("schedule must be nonempty".into()));
    }
    let mut rows = Vec::new();
    let mut label = String::new();
    for (cloud, horizon) in schedule {
        let rho = match &family {
            RhoFamily::OrbitSup => Pseudometric::orbit_sup(sys, cloud, *horizon)?,
            RhoFamily::ObservableSup(obs) => {
                Pseudometric::observable_sup(sys, obs, cloud, *horizon)?
            }
        };
        label = rho.label.clone();
        rows.push(ProfileRow {
            horizon: horizon.0,
            epsilon,
            net_size: eps_net(&rho, epsilon).len(),
        });
    }
    Ok(SeparabilityProfile {
        pseudometric: label,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{orbit_closure_sample, sample_space};
    use crate::space::AmbientSpace;
    use crate::symbolic;
    use crate::system::{cat_map, rotation};

    #[test]
    fn orbit_sup_is_ambient_for_rotations() {
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let cloud = sample_space(&sys.space, 32).unwrap();
        let amb = Pseudometric::ambient(&cloud);
        let dh = Pseudometric::orbit_sup(&sys, &cloud, Horizon(200)).unwrap();
        for i in 0..cloud.len() {
            for j in 0..cloud.len() {
                assert!((amb.eval(i, j) - dh.eval(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orbit_sup_dominates_ambient_and_grows_with_horizon() {
        let sys = cat_map();
        let cloud = sample_space(&sys.space, 8).unwrap();
        let amb = Pseudometric::ambient(&cloud);
        let d4 = Pseudometric::orbit_sup(&sys, &cloud, Horizon(4)).unwrap();
        let d8 = Pseudometric::orbit_sup(&sys, &cloud, Horizon(8)).unwrap();
        for i in 0..cloud.len() {
            for j in i + 1..cloud.len() {
                assert!(d4.eval(i, j) >= amb.eval(i, j) - 1e-15);
                assert!(d8.eval(i, j) >= d4.eval(i, j) - 1e-15);
            }
        }
    }

    #[test]
    fn cat_map_separates_nearby_points() {
        // oracle: iterate both orbits explicitly; the unstable multiplier
        // (3+sqrt(5))/2 stretches 0.01 past 1/4 within 8 steps
        let sys = cat_map();
        let a = Point::Torus([0.0, 0.0]);
        let b = Point::Torus([0.01, 0.0]);
        let mut m = 0.0f64;
        let mut x = a.clone();
        let mut y = b.clone();
        for _ in 0..8 {
            x = sys.forward(&x).unwrap();
            y = sys.forward(&y).unwrap();
            m = m.max(sys.space.distance(&x, &y));
        }
        assert!(m >= 0.25, "oracle got {m}");
        // and through the pseudometric machinery on a 2-point cloud
        let cloud = SampleCloud {
            space: sys.space.clone(),
            points: vec![a, b],
            r: 0.02,
            provenance: crate::sampling::Provenance::Explicit {
                label: "pair".into(),
            },
        };
        let dh = Pseudometric::orbit_sup(&sys, &cloud, Horizon(8)).unwrap();
        assert!(dh.eval(0, 1) >= 0.25);
    }

    #[test]
    fn observable_sup_bounds() {
        let sys = cat_map();
        let cloud = sample_space(&sys.space, 8).unwrap();
        let obs = Observable::new("x0", 1.0, |p| match p {
            Point::Torus([x, _]) => *x,
            _ => f64::NAN,
        });
        let rho = Pseudometric::observable_sup(&sys, &obs, &cloud, Horizon(8)).unwrap();
        let dh = Pseudometric::orbit_sup(&sys, &cloud, Horizon(8)).unwrap();
        for i in 0..cloud.len() {
            for j in i + 1..cloud.len() {
                assert!(rho.eval(i, j) <= 2.0 * obs.sup_norm + 1e-12);
                // the x-coordinate is 2-Lipschitz for the torus arc metric
                // (|x - y| mod-1 difference <= 2 * arc distance)
                assert!(rho.eval(i, j) <= 2.0 * dh.eval(i, j) + 1e-12);
            }
        }
        let constant = Observable::new("c", 1.0, |_| 0.5);
        let rho_c = Pseudometric::observable_sup(&sys, &constant, &cloud, Horizon(8)).unwrap();
        assert_eq!(rho_c.diameter(), 0.0);
    }

    #[test]
    fn unbounded_observable_rejected() {
        let sys = rotation(0.3).unwrap();
        let cloud = sample_space(&sys.space, 8).unwrap();
        let obs = Observable::new("big", 0.1, |_| 7.0);
        assert!(Pseudometric::observable_sup(&sys, &obs, &cloud, Horizon(2)).is_err());
    }

    #[test]
    fn shift_moves_symbol_differences_to_the_origin() {
        let sub = symbolic::Subshift::full(2);
        let sys = sub.shift_system(64);
        let x = sub.point(symbolic::zeros_gen(), 0);
        let one_at_5 = crate::space::SymGen::new("one-at-5", 2, |n| u8::from(n == 5));
        let y = sub.point(one_at_5, 0);
        let cloud = SampleCloud {
            space: sys.space.clone(),
            points: vec![x, y],
            r: 0.1,
            provenance: crate::sampling::Provenance::Explicit { label: "t".into() },
        };
        let obs = Observable::new("sym0", 1.0, |p| match p {
            Point::Sym(sp) => sp.symbol(0) as f64,
            _ => f64::NAN,
        });
        // horizon below |k| = 5 sees nothing; at 5 the difference reaches 0
        let lo = Pseudometric::observable_sup(&sys, &obs, &cloud, Horizon(4)).unwrap();
        assert_eq!(lo.eval(0, 1), 0.0);
        let hi = Pseudometric::observable_sup(&sys, &obs, &cloud, Horizon(5)).unwrap();
        assert_eq!(hi.eval(0, 1), 1.0);
    }

    #[test]
    fn greedy_net_on_circle_grid() {
        // oracle: 8 equally spaced points, arc diameter 1/2, eps = 0.3 -> 2
        let cloud = sample_space(&AmbientSpace::circle(), 8).unwrap();
        let rho = Pseudometric::ambient(&cloud);
        let net = eps_net(&rho, 0.3);
        assert_eq!(net.len(), 2);
        // eps at least the diameter -> single center
        assert_eq!(eps_net(&rho, 0.5).len(), 1);
        // eps below the minimal gap -> every point is a center
        assert_eq!(eps_net(&rho, 0.1249).len(), 8);
    }

    #[test]
    fn profile_constant_for_rotation_and_growing_for_morse() {
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let grid = sample_space(&sys.space, 64).unwrap();
        let schedule: Vec<_> = [10i64, 100, 1000]
            .iter()
            .map(|&n| (grid.clone(), Horizon(n)))
            .collect();
        let prof = separability_profile(&sys, RhoFamily::OrbitSup, &schedule, 0.1).unwrap();
        assert!(prof.rows.windows(2).all(|w| w[0].net_size == w[1].net_size));

        let sub = symbolic::morse_subshift();
        let sys = sub.shift_system(256);
        let x = sub.point(symbolic::morse_generator(), 0);
        let schedule: Vec<_> = [16i64, 64]
            .iter()
            .map(|&n| {
                let cloud = orbit_closure_sample(&sys, &x, Horizon(n), 0.0).unwrap();
                (cloud, Horizon(n))
            })
            .collect();
        let sizes: Vec<usize> = schedule
            .iter()
            .map(|(cloud, _)| cloud.len())
            .collect();
        let prof = separability_profile(&sys, RhoFamily::OrbitSup, &schedule, 0.5).unwrap();
        // net size equals the number of distinct sampled points and grows
        assert_eq!(prof.rows[0].net_size, sizes[0]);
        assert_eq!(prof.rows[1].net_size, sizes[1]);
        assert!(prof.rows[1].net_size > prof.rows[0].net_size);
    }
}
