//! Equicontinuity sets at a scale, sensitivity constants, and the
//! NS / AE / LE / HNS verdict pipeline.
//!
//! Every verdict is scale-indexed: it asserts the strongest finitely checked
//! statement at its (epsilon-grid, r, N) tuple, never a bare property.

use serde::Serialize;

use crate::error::{DynError, Result};
use crate::fragment::{fragmentation_kernel_with_balls, FragmentationReport};
use crate::pseudometric::Pseudometric;
use crate::sampling::{orbit_closure_sample, SampleCloud};
use crate::system::{Horizon, SystemSpec};

/// Points whose r-ball stays epsilon-small over the horizon window.
#[derive(Clone, Debug, Serialize)]
pub struct EqReport {
    pub epsilon: f64,
    pub horizon: i64,
    pub r: f64,
    pub eq_points: Vec<usize>,
    /// Every cloud point within r of an eq point.
    pub dense: bool,
    /// Fraction of eq points whose forward image lands (at the nearest cloud
    /// neighbor) outside the eq set; exact invariance holds only in the
    /// limit, so the defect is reported instead of asserted away.
    pub invariance_defect: f64,
}

/// The d_H pseudometric together with its cloud, shared across checks.
pub struct OrbitAnalysis<'a> {
    pub sys: &'a SystemSpec,
    pub cloud: &'a SampleCloud,
    pub horizon: Horizon,
    pub dh: Pseudometric,
    balls: Vec<Vec<usize>>,
}

impl<'a> OrbitAnalysis<'a> {
    pub fn new(sys: &'a SystemSpec, cloud: &'a SampleCloud, horizon: Horizon) -> Result<Self> {
        let dh = Pseudometric::orbit_sup(sys, cloud, horizon)?;
        let balls = cloud.balls();
        Ok(OrbitAnalysis {
            sys,
            cloud,
            horizon,
            dh,
            balls,
        })
    }

    pub fn ball(&self, i: usize) -> &[usize] {
        &self.balls[i]
    }
}

pub fn eq_epsilon(analysis: &OrbitAnalysis<'_>, epsilon: f64) -> Result<EqReport> {
    if epsilon <= 0.0 {
        return Err(DynError::Precondition("epsilon must be > 0".into()));
    }
    let cloud = analysis.cloud;
    let n = cloud.len();
    let eq_points: Vec<usize> = (0..n)
        .filter(|&i| analysis.dh.diam_of(analysis.ball(i)) <= epsilon)
        .collect();
    let dense = (0..n).all(|i| {
        eq_points
            .iter()
            .any(|&e| cloud.distance(i, e) <= cloud.r)
    });
    // invariance defect: forward images of eq points, snapped to the cloud
    let mut misses = 0usize;
    for &i in &eq_points {
        let img = analysis.sys.forward(&cloud.points[i])?;
        let (j, _) = cloud.nearest(&img);
        if !eq_points.contains(&j) {
            misses += 1;
        }
    }
    let invariance_defect = if eq_points.is_empty() {
        0.0
    } else {
        misses as f64 / eq_points.len() as f64
    };
    Ok(EqReport {
        epsilon,
        horizon: analysis.horizon.0,
        r: cloud.r,
        eq_points,
        dense,
        invariance_defect,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Property {
    #[serde(rename = "NS")]
    NotSensitive,
    #[serde(rename = "sensitive")]
    Sensitive,
    #[serde(rename = "AE")]
    AlmostEquicontinuous,
    #[serde(rename = "not-AE")]
    NotAlmostEquicontinuous,
    #[serde(rename = "LE")]
    LocallyEquicontinuous,
    #[serde(rename = "not-LE")]
    NotLocallyEquicontinuous,
    #[serde(rename = "HNS")]
    HereditarilyNotSensitive,
    #[serde(rename = "not-HNS")]
    NotHereditarilyNotSensitive,
}

#[derive(Clone, Debug, Serialize)]
pub enum Witness {
    None,
    /// The scale at which the property failed plus the substantiating points.
    Failure { epsilon: f64, points: Vec<usize> },
}

/// A scale-indexed verdict. The caveat records the proxy semantics in words.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub property: Property,
    pub epsilon_grid: Vec<f64>,
    pub r: f64,
    pub horizon: i64,
    pub witness: Witness,
    pub caveat: String,
}

impl Verdict {
    fn positive(property: Property, grid: &[f64], r: f64, horizon: i64) -> Verdict {
        Verdict {
            property,
            epsilon_grid: grid.to_vec(),
            r,
            horizon,
            witness: Witness::None,
            caveat: format!("holds at every grid epsilon with ball radius {r}, |n| <= {horizon}"),
        }
    }

    fn negative(
        property: Property,
        grid: &[f64],
        r: f64,
        horizon: i64,
        epsilon: f64,
        points: Vec<usize>,
    ) -> Verdict {
        Verdict {
            property,
            epsilon_grid: grid.to_vec(),
            r,
            horizon,
            witness: Witness::Failure { epsilon, points },
            caveat: format!("fails at epsilon = {epsilon} with ball radius {r}, |n| <= {horizon}"),
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(
            self.property,
            Property::NotSensitive
                | Property::AlmostEquicontinuous
                | Property::LocallyEquicontinuous
                | Property::HereditarilyNotSensitive
        )
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(DynError::EmptyGrid);
    }
    if grid.iter().any(|&e| e <= 0.0) {
        return Err(DynError::Precondition("grid must be positive".into()));
    }
    Ok(())
}

/// Default epsilon grid: diam * {2^-1 .. 2^-10}, descending.
pub fn default_eps_grid(diameter: f64) -> Vec<f64> {
    (1..=10).map(|k| diameter * 0.5f64.powi(k)).collect()
}

/// Not sensitive at a scale: some ball stays epsilon-small for every grid
/// epsilon.
pub fn ns_check(analysis: &OrbitAnalysis<'_>, grid: &[f64]) -> Result<Verdict> {
    check_grid(grid)?;
    let r = analysis.cloud.r;
    let horizon = analysis.horizon.0;
    for &eps in grid {
        let rep = eq_epsilon(analysis, eps)?;
        if rep.eq_points.is_empty() {
            return Ok(Verdict::negative(
                Property::Sensitive,
                grid,
                r,
                horizon,
                eps,
                (0..analysis.cloud.len()).collect(),
            ));
        }
    }
    Ok(Verdict::positive(Property::NotSensitive, grid, r, horizon))
}

/// Largest grid epsilon at which no ball stays small; 0 when none.
pub fn sensitivity_constant(analysis: &OrbitAnalysis<'_>, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for &eps in &sorted {
        let rep = eq_epsilon(analysis, eps)?;
        if rep.eq_points.is_empty() {
            return Ok(eps);
        }
    }
    Ok(0.0)
}

/// Almost equicontinuous at a scale: the intersection of eq sets over the
/// grid is r-dense in the cloud.
pub fn ae_check(analysis: &OrbitAnalysis<'_>, grid: &[f64]) -> Result<Verdict> {
    check_grid(grid)?;
    let cloud = analysis.cloud;
    let r = cloud.r;
    let horizon = analysis.horizon.0;
    let mut core: Option<Vec<usize>> = None;
    let mut last_eps = grid[0];
    for &eps in grid {
        last_eps = eps;
        let rep = eq_epsilon(analysis, eps)?;
        core = Some(match core {
            None => rep.eq_points,
            Some(prev) => prev
                .into_iter()
                .filter(|i| rep.eq_points.contains(i))
                .collect(),
        });
        if core.as_ref().unwrap().is_empty() {
            break;
        }
    }
    let core = core.unwrap_or_default();
    let uncovered: Vec<usize> = (0..cloud.len())
        .filter(|&i| !core.iter().any(|&e| cloud.distance(i, e) <= r))
        .collect();
    if uncovered.is_empty() {
        Ok(Verdict::positive(
            Property::AlmostEquicontinuous,
            grid,
            r,
            horizon,
        ))
    } else {
        Ok(Verdict::negative(
            Property::NotAlmostEquicontinuous,
            grid,
            r,
            horizon,
            last_eps,
            uncovered,
        ))
    }
}

/// Locally equicontinuous at a scale: every sampled point is a point of
/// equicontinuity inside its own orbit-closure sample.
///
/// The orbit closure is sampled at `orbit_depth` (default 4x the analysis
/// horizon) so that the restricted d_H is saturated.
pub fn le_check(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    grid: &[f64],
    horizon: Horizon,
    orbit_depth: Option<i64>,
) -> Result<Verdict> {
    check_grid(grid)?;
    let depth = Horizon(orbit_depth.unwrap_or(4 * horizon.0));
    let min_eps = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut failures = Vec::new();
    for (i, x) in cloud.points.iter().enumerate() {
        let sub = orbit_closure_sample(sys, x, depth, 0.0)?;
        // x is index 0 after greedy |n|-ordered merging
        let base = 0usize;
        let mates: Vec<usize> = (0..sub.len())
            .filter(|&j| sub.distance(base, j) <= sub.r)
            .collect();
        // point-of-equicontinuity test: pairs against x only
        let mut worst = 0.0f64;
        if mates.len() > 1 {
            let pair_cloud = sub;
            let dh = Pseudometric::orbit_sup(sys, &pair_cloud, horizon)?;
            for &j in &mates {
                worst = worst.max(dh.eval(base, j));
            }
        }
        if worst > min_eps {
            failures.push(i);
        }
    }
    if failures.is_empty() {
        Ok(Verdict::positive(
            Property::LocallyEquicontinuous,
            grid,
            cloud.r,
            horizon.0,
        ))
    } else {
        Ok(Verdict::negative(
            Property::NotLocallyEquicontinuous,
            grid,
            cloud.r,
            horizon.0,
            min_eps,
            failures,
        ))
    }
}

/// Hereditarily not sensitive at a scale: the fragmentation kernel empties
/// the cloud under d_H at every grid epsilon. The witness is the residual
/// bad set of the largest failing epsilon, a closed invariant-up-to-proxy
/// sub-cloud.
pub fn hns_check(
    analysis: &OrbitAnalysis<'_>,
    grid: &[f64],
    r: f64,
) -> Result<(Verdict, Vec<FragmentationReport>)> {
    check_grid(grid)?;
    let cloud = analysis.cloud;
    let balls: Vec<Vec<usize>> = (0..cloud.len()).map(|i| cloud.ball(i, r)).collect();
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut reports = Vec::new();
    let mut failing: Option<(f64, Vec<usize>)> = None;
    for &eps in &sorted {
        let rep = fragmentation_kernel_with_balls(&balls, &analysis.dh, eps, r)?;
        if !rep.fragmented && failing.is_none() {
            failing = Some((eps, rep.residual.clone()));
        }
        reports.push(rep);
    }
    let verdict = match failing {
        None => Verdict::positive(
            Property::HereditarilyNotSensitive,
            grid,
            r,
            analysis.horizon.0,
        ),
        Some((eps, residual)) => Verdict::negative(
            Property::NotHereditarilyNotSensitive,
            grid,
            r,
            analysis.horizon.0,
            eps,
            residual,
        ),
    };
    Ok((verdict, reports))
}

#[derive(Clone, Debug, Serialize)]
pub enum PropertyOutcome {
    Pass { vacuous: bool },
    Contradiction { detail: String },
    Unknown { why: String },
}

/// A weakly mixing system that is not sensitive must be trivial: if the
/// product probe reports transitive and ns_check passes, the cloud diameter
/// must already be below the largest grid epsilon.
pub fn wm_triviality_test(
    analysis: &OrbitAnalysis<'_>,
    grid: &[f64],
    product_transitive: crate::recurrence::ProbeOutcome,
) -> Result<PropertyOutcome> {
    check_grid(grid)?;
    let ns = ns_check(analysis, grid)?;
    let weakly_mixing = analysis.sys.weak_mixing_asserted
        || matches!(product_transitive, crate::recurrence::ProbeOutcome::Transitive);
    if matches!(product_transitive, crate::recurrence::ProbeOutcome::Unknown)
        && !analysis.sys.weak_mixing_asserted
    {
        return Ok(PropertyOutcome::Unknown {
            why: "product transitivity probe inconclusive".into(),
        });
    }
    if !(weakly_mixing && ns.is_positive()) {
        return Ok(PropertyOutcome::Pass { vacuous: true });
    }
    let max_eps = grid.iter().cloned().fold(0.0f64, f64::max);
    let diam = Pseudometric::ambient(analysis.cloud).diameter();
    if diam <= max_eps {
        Ok(PropertyOutcome::Pass { vacuous: false })
    } else {
        Ok(PropertyOutcome::Contradiction {
            detail: format!(
                "weakly mixing and NS at scale, yet cloud diameter {diam} > {max_eps}"
            ),
        })
    }
}

/// Structural cross-checks between the verdict routes, asserted on every
/// gallery run: HNS forces NS, AE forces NS, and the kernel-residual route
/// agrees with the eq-set route at identical scales.
pub fn consistency_violations(
    analysis: &OrbitAnalysis<'_>,
    grid: &[f64],
    r: f64,
) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let ns = ns_check(analysis, grid)?;
    let ae = ae_check(analysis, grid)?;
    let (hns, _) = hns_check(analysis, grid, r)?;
    if hns.is_positive() && !ns.is_positive() && r <= analysis.cloud.r {
        // kernel residual empty at eps means stage one peeled a point whose
        // ball at r <= cloud.r is eps-small; that ball witnesses Eq_eps
        bad.push(format!(
            "{}: HNS positive but NS negative at matched scales",
            analysis.sys.name
        ));
    }
    if ae.is_positive() && !ns.is_positive() {
        bad.push(format!(
            "{}: AE positive but NS negative at matched scales",
            analysis.sys.name
        ));
    }
    Ok(bad)
}
