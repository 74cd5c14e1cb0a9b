//! Finite-horizon approximation of the iterate closure in X^X: cluster maps,
//! observable families, fragmented-family checks and the double-arrow
//! verification over the sturmian coding model.

use serde::Serialize;

use crate::error::{DynError, Result};
use crate::fragment::{fragmentation_kernel_with_balls, FragmentationReport};
use crate::pseudometric::{iterate_tables, Observable, Pseudometric};
use crate::sampling::SampleCloud;
use crate::space::Point;
use crate::symbolic::{sturmian_two_arrows, Alpha, TwoArrows, TwoArrowsBase};
use crate::system::{Horizon, SystemSpec};

/// A function table on the cloud approximating a limit of iterates. The
/// exponent list records which iterates merged into it; every recorded
/// iterate is within tol of the representative table in sup distance.
#[derive(Clone, Debug)]
pub struct ClusterMap {
    pub table: Vec<Point>,
    pub exponents: Vec<i64>,
    pub tol: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct EnvelopeApprox {
    pub maps: Vec<ClusterMap>,
    pub horizon: i64,
    pub tol: f64,
}

fn sup_distance(cloud: &SampleCloud, a: &[Point], b: &[Point], early_exit: f64) -> f64 {
    let mut m = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        m = m.max(cloud.space.distance(x, y));
        if m > early_exit {
            return m;
        }
    }
    m
}

/// Iterate tables deduplicated by a greedy leader pass in |n| order: a table
/// joins the first representative within tol, otherwise becomes one. The
/// identity (exponent 0) is processed first and always survives;
/// representatives end up pairwise more than tol apart.
pub fn envelope_approx(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    horizon: Horizon,
    tol: f64,
) -> Result<EnvelopeApprox> {
    if tol <= 0.0 {
        return Err(DynError::Precondition("tol must be > 0".into()));
    }
    let tables = iterate_tables(sys, cloud, horizon)?;
    // tables come ordered 0, +1, -1, +2, -2, ...
    let exps: Vec<i64> = {
        let mut v = vec![0i64];
        for k in 1..=horizon.0 {
            v.push(k);
            v.push(-k);
        }
        v
    };
    let mut maps: Vec<ClusterMap> = Vec::new();
    for (table, &e) in tables.into_iter().zip(&exps) {
        let mut joined = false;
        for rep in maps.iter_mut() {
            if sup_distance(cloud, &rep.table, &table, tol) <= tol {
                rep.exponents.push(e);
                rep.multiplicity += 1;
                joined = true;
                break;
            }
        }
        if !joined {
            maps.push(ClusterMap {
                table,
                exponents: vec![e],
                tol,
                multiplicity: 1,
            });
        }
    }
    Ok(EnvelopeApprox {
        maps,
        horizon: horizon.0,
        tol,
    })
}

/// Observable tables of the envelope representatives, deduplicated at sup
/// tol. Built from the envelope itself, so the count never exceeds the
/// envelope's (post-composition is a quotient).
pub fn ef_family(
    env: &EnvelopeApprox,
    obs: &Observable,
    cloud: &SampleCloud,
) -> Result<Vec<Vec<f64>>> {
    obs.validate_on(cloud)?;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for m in &env.maps {
        let table: Vec<f64> = m.table.iter().map(|p| (obs.f)(p)).collect();
        let dup = out.iter().any(|t| {
            t.iter()
                .zip(&table)
                .all(|(a, b)| (a - b).abs() <= env.tol)
        });
        if !dup {
            out.push(table);
        }
    }
    Ok(out)
}

/// Fragmented-family check: the kernel under the family-sup pseudometric.
pub fn fragmented_family_check(
    rho: &Pseudometric,
    cloud: &SampleCloud,
    epsilon: f64,
    r: f64,
) -> Result<(bool, FragmentationReport)> {
    let balls: Vec<Vec<usize>> = (0..cloud.len()).map(|i| cloud.ball(i, r)).collect();
    let rep = fragmentation_kernel_with_balls(&balls, rho, epsilon, r)?;
    Ok((rep.fragmented, rep))
}

/// Worst spread of a table over the r-balls of the cloud; near zero exactly
/// when the table is uniformly continuous at scale r.
pub fn continuity_defect(table: &[Point], cloud: &SampleCloud, r: f64) -> Result<f64> {
    if table.len() != cloud.len() {
        return Err(DynError::TableIncomplete(table.len()));
    }
    let mut worst = 0.0f64;
    for i in 0..cloud.len() {
        let ball = cloud.ball(i, r);
        for (a, &x) in ball.iter().enumerate() {
            for &y in &ball[a + 1..] {
                worst = worst.max(cloud.space.distance(&table[x], &table[y]));
            }
        }
    }
    Ok(worst)
}

/// Desk-scale first-Baire-class certificate: the kernel on the singleton
/// family of the map's coordinates fragments at (epsilon, r).
pub fn baire_class_proxy(
    table: &[Point],
    cloud: &SampleCloud,
    r: f64,
    epsilon: f64,
) -> Result<bool> {
    let rho = Pseudometric::family_sup_points("map", cloud, std::slice::from_ref(&table.to_vec()))?;
    let (ok, _) = fragmented_family_check(&rho, cloud, epsilon, r)?;
    Ok(ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct FSemigroupReport {
    pub fragmented: bool,
    /// Max distance from a composed table to its nearest representative.
    pub closure_defect: f64,
    pub degraded: bool,
}

/// Left-translation family of the envelope: tables q -> p o q over the
/// finite map set with the sup metric, composed through nearest-cloud
/// projection. Fragmentation of that family is the semigroup check; a
/// closure defect above tol degrades confidence but is reported, not hidden.
pub fn f_semigroup_check(
    env: &EnvelopeApprox,
    cloud: &SampleCloud,
    epsilon: f64,
    r: f64,
) -> Result<FSemigroupReport> {
    let k = env.maps.len();
    // compose(p, q)(x) = p(project(q(x))) with projection onto the cloud
    let project = |p: &Point| cloud.nearest(p).0;
    let mut closure_defect = 0.0f64;
    // left translation tables: for each p, the map q -> p o q, recorded as
    // the index of the nearest representative plus the defect
    let mut translate: Vec<Vec<usize>> = Vec::with_capacity(k);
    for p in &env.maps {
        let mut row = Vec::with_capacity(k);
        for q in &env.maps {
            let composed: Vec<Point> = q
                .table
                .iter()
                .map(|y| p.table[project(y)].clone())
                .collect();
            let mut best = (0usize, f64::INFINITY);
            for (j, rep) in env.maps.iter().enumerate() {
                let d = sup_distance(cloud, &rep.table, &composed, best.1);
                if d < best.1 {
                    best = (j, d);
                }
            }
            closure_defect = closure_defect.max(best.1);
            row.push(best.0);
        }
        translate.push(row);
    }
    // sup metric among representative maps
    let map_dist = Pseudometric::from_matrix("sup(maps)", k, |i, j| {
        sup_distance(cloud, &env.maps[i].table, &env.maps[j].table, f64::INFINITY)
    });
    // family-sup pseudometric of the translation family over the map set
    let rho = Pseudometric::from_matrix("family-sup(translations)", k, |i, j| {
        let mut m = 0.0f64;
        for row in &translate {
            m = m.max(map_dist.eval(row[i], row[j]));
        }
        m
    });
    let balls: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).filter(|&j| map_dist.eval(i, j) <= r).collect())
        .collect();
    let rep = fragmentation_kernel_with_balls(&balls, &rho, epsilon, r)?;
    Ok(FSemigroupReport {
        fragmented: rep.fragmented,
        closure_defect,
        degraded: closure_defect > env.tol,
    })
}

// ---------------------------------------------------------------------------
// double-arrow verification over the sturmian coding model

#[derive(Clone, Debug, Serialize)]
pub struct GammaPairReport {
    pub gamma_index: i64,
    /// Sup distance between the two one-sided limit tables.
    pub pair_separation: f64,
    /// Tail iterates along denominators settle on each side within tol.
    pub minus_converged: bool,
    pub plus_converged: bool,
    /// Both limit tables project to the rotation by gamma on every sample.
    pub factor_consistent: bool,
    pub minus_baire: bool,
    pub plus_baire: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoArrowsReport {
    pub depth: i64,
    pub tol: f64,
    /// Min pairwise sup-distance among the shift tables |n| <= 200.
    pub shift_discreteness: f64,
    pub pairs: Vec<GammaPairReport>,
}

/// The coding-model cloud: tagged pairs over the rotation orbit plus some
/// off-orbit samples.
pub fn two_arrows_cloud(ta: &TwoArrows, orbit_radius: i64, window: i64) -> SampleCloud {
    let mut points = Vec::new();
    for n in -orbit_radius..=orbit_radius {
        for plus in [false, true] {
            points.push(ta.point(TwoArrowsBase::Orbit { index: n, plus }));
        }
    }
    for j in 0..24 {
        let beta = ((j as f64 + 0.5) * 0.707106781186547 / 24.0).rem_euclid(1.0);
        points.push(ta.point(TwoArrowsBase::OffOrbit { beta, plus: true }));
    }
    SampleCloud {
        space: crate::space::AmbientSpace::sequence(2, window),
        points,
        r: 0.5f64.powi(6),
        provenance: crate::sampling::Provenance::Explicit {
            label: format!("two-arrows(orbit {orbit_radius})"),
        },
    }
}

fn base_of(_ta: &TwoArrows, idx: usize, orbit_radius: i64) -> TwoArrowsBase {
    let pair_count = (2 * orbit_radius + 1) as usize * 2;
    if idx < pair_count {
        let n = idx / 2;
        TwoArrowsBase::Orbit {
            index: n as i64 - orbit_radius,
            plus: idx % 2 == 1,
        }
    } else {
        let j = idx - pair_count;
        let beta = ((j as f64 + 0.5) * 0.707106781186547 / 24.0).rem_euclid(1.0);
        TwoArrowsBase::OffOrbit { beta, plus: true }
    }
}

/// Shift table T^m over the coding cloud (exact: offsets move by m).
fn shift_table(cloud: &SampleCloud, m: i64) -> Vec<Point> {
    cloud
        .points
        .iter()
        .map(|p| match p {
            Point::Sym(sp) => Point::Sym(crate::space::SymPoint {
                gen: sp.gen.clone(),
                offset: sp.offset + m,
            }),
            _ => unreachable!("two-arrows clouds are symbolic"),
        })
        .collect()
}

/// One-sided limit table: every sample moves to (its angle + gamma) with the
/// chosen side tag; off-orbit images keep a single coding.
fn limit_table(
    ta: &TwoArrows,
    cloud: &SampleCloud,
    orbit_radius: i64,
    gamma_index: i64,
    plus: bool,
) -> Vec<Point> {
    (0..cloud.len())
        .map(|i| match base_of(ta, i, orbit_radius) {
            TwoArrowsBase::Orbit { index, .. } => ta.point(TwoArrowsBase::Orbit {
                index: index + gamma_index,
                plus,
            }),
            TwoArrowsBase::OffOrbit { beta, .. } => ta.point(TwoArrowsBase::OffOrbit {
                beta: (beta + gamma_index as f64 * ta.alpha.value()).rem_euclid(1.0),
                plus,
            }),
        })
        .collect()
}

/// Verifies, at finite depth over the coding model:
/// shift tables are pairwise far apart (the iterate set is discrete);
/// along denominators of the continued fraction, iterates converge to two
/// distinct one-sided tables agreeing with the rotation factor; and every
/// limit table passes the first-Baire-class kernel.
pub fn verify_two_arrows(alpha: Alpha, depth: i64, tol: f64) -> Result<TwoArrowsReport> {
    if tol <= 0.0 {
        return Err(DynError::Precondition("tol must be > 0".into()));
    }
    let ta = sturmian_two_arrows(alpha);
    let orbit_radius = 220.max(depth / 40);
    let window = 64i64;
    let cloud = two_arrows_cloud(&ta, orbit_radius, window);
    let convergents = ta.alpha.convergents(depth as u64);
    if convergents.len() < 4 {
        return Err(DynError::DepthExhausted(
            "convergent stream too short for the requested depth".into(),
        ));
    }

    // discreteness of the shift tables
    let shift_range = 200i64;
    let tables: Vec<Vec<Point>> = (-shift_range..=shift_range)
        .map(|m| shift_table(&cloud, m))
        .collect();
    let mut discreteness = f64::INFINITY;
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let d = sup_distance_early(&cloud, &tables[i], &tables[j]);
            discreteness = discreteness.min(d);
        }
    }

    // per-gamma convergence to the one-sided pair
    let mut pairs = Vec::new();
    let qs: Vec<i64> = convergents.iter().map(|&(_, q)| q as i64).collect();
    for g in 0..10i64 {
        // denominators q_k approach 0 alternately from above (even k) and
        // below (odd k); adding g shifts the approach target to g*alpha
        let below: Vec<i64> = qs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 1)
            .map(|(_, &q)| g + q)
            .collect();
        let above: Vec<i64> = qs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(_, &q)| g + q)
            .collect();
        let minus_limit = limit_table(&ta, &cloud, orbit_radius, g, false);
        let plus_limit = limit_table(&ta, &cloud, orbit_radius, g, true);
        let converged_to = |seq: &[i64], target: &[Point]| -> bool {
            let take = seq.len().saturating_sub(2);
            seq.iter()
                .skip(take)
                .all(|&m| sup_distance_early(&cloud, &shift_table(&cloud, m), target) <= tol)
        };
        let minus_converged = !below.is_empty() && converged_to(&below, &minus_limit);
        let plus_converged = !above.is_empty() && converged_to(&above, &plus_limit);
        let pair_separation = sup_distance_early(&cloud, &minus_limit, &plus_limit);
        // factor consistency: projections move by gamma exactly
        let gamma = (g as f64 * ta.alpha.value()).rem_euclid(1.0);
        let factor_consistent = (0..cloud.len()).all(|i| {
            let src = ta.project(base_of(&ta, i, orbit_radius));
            let img_minus = match base_of(&ta, i, orbit_radius) {
                TwoArrowsBase::Orbit { index, .. } => ta.project(TwoArrowsBase::Orbit {
                    index: index + g,
                    plus: false,
                }),
                TwoArrowsBase::OffOrbit { beta, .. } => {
                    (beta + gamma).rem_euclid(1.0)
                }
            };
            crate::space::arc_distance(img_minus, (src + gamma).rem_euclid(1.0)) < 1e-9
        });
        let minus_baire = baire_class_proxy(&minus_limit, &cloud, 0.5f64.powi(8), 0.25)?;
        let plus_baire = baire_class_proxy(&plus_limit, &cloud, 0.5f64.powi(8), 0.25)?;
        pairs.push(GammaPairReport {
            gamma_index: g,
            pair_separation,
            minus_converged,
            plus_converged,
            factor_consistent,
            minus_baire,
            plus_baire,
        });
    }
    Ok(TwoArrowsReport {
        depth,
        tol,
        shift_discreteness: discreteness,
        pairs,
    })
}

fn sup_distance_early(cloud: &SampleCloud, a: &[Point], b: &[Point]) -> f64 {
    let mut m = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        m = m.max(cloud.space.distance(x, y));
        if m >= 1.0 {
            return m;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_space;
    use crate::space::AmbientSpace;
    use crate::system::rotation;

    #[test]
    fn rational_rotation_envelope_has_exactly_four_maps() {
        let sys = rotation(0.25).unwrap();
        let cloud = sample_space(&sys.space, 16).unwrap();
        let env = envelope_approx(&sys, &cloud, Horizon(10), 1e-6).unwrap();
        assert_eq!(env.maps.len(), 4);
        // identity present with exponent 0
        assert!(env.maps[0].exponents.contains(&0));
    }

    #[test]
    fn irrational_rotation_envelope_counts_angles_mod_tol() {
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let cloud = sample_space(&sys.space, 64).unwrap();
        let env = envelope_approx(&sys, &cloud, Horizon(1000), 1e-2).unwrap();
        assert!(
            env.maps.len() >= 100 && env.maps.len() <= 2001,
            "got {}",
            env.maps.len()
        );
        // representatives pairwise more than tol apart
        for i in 0..env.maps.len().min(40) {
            for j in i + 1..env.maps.len().min(40) {
                let d = sup_distance(
                    &cloud,
                    &env.maps[i].table,
                    &env.maps[j].table,
                    f64::INFINITY,
                );
                assert!(d > env.tol);
            }
        }
    }

    #[test]
    fn envelope_cardinality_antitone_in_tol_monotone_in_horizon() {
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let cloud = sample_space(&sys.space, 32).unwrap();
        let coarse = envelope_approx(&sys, &cloud, Horizon(200), 0.05).unwrap();
        let fine = envelope_approx(&sys, &cloud, Horizon(200), 0.01).unwrap();
        assert!(fine.maps.len() >= coarse.maps.len());
        let shallow = envelope_approx(&sys, &cloud, Horizon(50), 0.01).unwrap();
        assert!(fine.maps.len() >= shallow.maps.len());
    }

    #[test]
    fn ef_family_quotient_property() {
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let cloud = sample_space(&sys.space, 64).unwrap();
        let env = envelope_approx(&sys, &cloud, Horizon(300), 1e-2).unwrap();
        // constant observable: exactly one table
        let constant = Observable::new("const", 1.0, |_| 0.25);
        assert_eq!(ef_family(&env, &constant, &cloud).unwrap().len(), 1);
        // injective arc coordinate keeps the envelope count
        let coord = Observable::new("arc", 1.0, |p| match p {
            Point::Circle(x) => *x,
            _ => f64::NAN,
        });
        let fam = ef_family(&env, &coord, &cloud).unwrap();
        assert!(fam.len() <= env.maps.len());
        assert_eq!(fam.len(), env.maps.len());
    }

    #[test]
    fn full_shift_projection_family_is_unfragmented() {
        // coordinate projections over a de Bruijn cloud: every ball holds a
        // pair differing at some coordinate, so the family kernel sticks
        let space = AmbientSpace::sequence(2, 64);
        let cloud = sample_space(&space, 256).unwrap();
        let sys = crate::system::shift_system(2, 64);
        let env = envelope_approx(&sys, &cloud, Horizon(8), 1e-3).unwrap();
        let obs = Observable::new("sym0", 1.0, |p| match p {
            Point::Sym(sp) => sp.symbol(0) as f64,
            _ => f64::NAN,
        });
        let fam = ef_family(&env, &obs, &cloud).unwrap();
        // tables pairwise sup-distance 1 (coordinate projections)
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                let d = fam[i]
                    .iter()
                    .zip(&fam[j])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                assert_eq!(d, 1.0);
            }
        }
        let rho = Pseudometric::family_sup_real("proj", cloud.len(), &fam).unwrap();
        let (ok, rep) = fragmented_family_check(&rho, &cloud, 0.5, cloud.r).unwrap();
        assert!(!ok);
        assert_eq!(rep.residual.len(), cloud.len());
    }

    #[test]
    fn lipschitz_family_on_rotation_is_fragmented() {
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let cloud = sample_space(&sys.space, 64).unwrap();
        let env = envelope_approx(&sys, &cloud, Horizon(200), 1e-2).unwrap();
        let coord = Observable::new("arc", 1.0, |p| match p {
            Point::Circle(x) => *x,
            _ => f64::NAN,
        });
        let fam = ef_family(&env, &coord, &cloud).unwrap();
        let rho = Pseudometric::family_sup_real("arc-fam", cloud.len(), &fam).unwrap();
        // observable is 1-Lipschitz for |.| but wraps: allow the wrap jump
        let (ok, _) = fragmented_family_check(&rho, &cloud, 1.0, cloud.r).unwrap();
        assert!(ok);
    }

    #[test]
    fn continuity_defect_of_isometric_tables() {
        let sys = rotation(0.3).unwrap();
        let cloud = sample_space(&sys.space, 32).unwrap();
        let env = envelope_approx(&sys, &cloud, Horizon(20), 1e-3).unwrap();
        let ball_diam = 2.0 * cloud.r;
        for m in env.maps.iter().take(5) {
            let d = continuity_defect(&m.table, &cloud, cloud.r).unwrap();
            assert!(d <= ball_diam + 1e-12);
        }
        // identity table: defect equals the max ball diameter exactly
        let idt: Vec<Point> = cloud.points.clone();
        let d = continuity_defect(&idt, &cloud, cloud.r).unwrap();
        assert!(d > 0.0 && d <= ball_diam + 1e-12);
    }

    #[test]
    fn baire_proxy_accepts_continuous_rejects_oscillating() {
        let space = AmbientSpace::circle();
        let cloud = sample_space(&space, 64).unwrap();
        // continuous table: the identity
        let idt: Vec<Point> = cloud.points.clone();
        assert!(baire_class_proxy(&idt, &cloud, cloud.r, 2.5 * cloud.r).unwrap());
        // parity-of-index table oscillates at every scale
        let osc: Vec<Point> = (0..cloud.len())
            .map(|i| Point::Circle(if i % 2 == 0 { 0.0 } else { 0.5 }))
            .collect();
        assert!(!baire_class_proxy(&osc, &cloud, cloud.r, 0.4).unwrap());
    }

    #[test]
    fn f_semigroup_of_rotations() {
        // finite cyclic envelope
        let sys = rotation(0.25).unwrap();
        let cloud = sample_space(&sys.space, 32).unwrap();
        let env = envelope_approx(&sys, &cloud, Horizon(8), 1e-6).unwrap();
        let rep = f_semigroup_check(&env, &cloud, 0.3, 0.3).unwrap();
        assert!(rep.fragmented);
        assert!(!rep.degraded);
        // irrational rotation: isometric translations stay fragmented
        let sys = rotation(2f64.sqrt() - 1.0).unwrap();
        let cloud = sample_space(&sys.space, 48).unwrap();
        let env = envelope_approx(&sys, &cloud, Horizon(120), 2e-2).unwrap();
        let rep = f_semigroup_check(&env, &cloud, 0.2, 0.1).unwrap();
        assert!(rep.fragmented);
    }

    #[test]
    fn two_arrows_smoke() {
        let rep = verify_two_arrows(Alpha::golden(), 600, 1e-2).unwrap();
        assert!(rep.shift_discreteness >= 0.5);
        for p in &rep.pairs {
            assert!(p.pair_separation >= 0.5, "gamma {}", p.gamma_index);
            assert!(p.factor_consistent);
        }
    }
}
