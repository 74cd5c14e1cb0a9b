//! Chain digraphs, chain-recurrent sets, wandering-ball peeling toward the
//! Birkhoff center, prolongation, capturing sets and the mincenter proxy.

use std::collections::HashSet;

use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{DynError, Result};
use crate::sampling::SampleCloud;
use crate::system::{Horizon, SystemSpec};

/// Forward chain digraph: an edge x -> y whenever d(T x, y) <= delta.
#[derive(Clone, Debug)]
pub struct ChainDigraph {
    pub delta: f64,
    pub horizon: i64,
    pub edges: Vec<Vec<usize>>,
}

pub fn chain_digraph(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    delta: f64,
    horizon: Horizon,
) -> Result<ChainDigraph> {
    if delta <= 0.0 {
        return Err(DynError::Precondition("delta must be > 0".into()));
    }
    let n = cloud.len();
    let mut edges = vec![Vec::new(); n];
    for i in 0..n {
        let img = sys.forward(&cloud.points[i])?;
        for j in 0..n {
            if cloud.space.distance(&img, &cloud.points[j]) <= delta {
                edges[i].push(j);
            }
        }
    }
    Ok(ChainDigraph {
        delta,
        horizon: horizon.0,
        edges,
    })
}

fn sccs_of(edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut graph = DiGraph::<(), ()>::new();
    let ids: Vec<_> = (0..edges.len()).map(|_| graph.add_node(())).collect();
    for (i, outs) in edges.iter().enumerate() {
        for &j in outs {
            graph.add_edge(ids[i], ids[j], ());
        }
    }
    petgraph::algo::tarjan_scc(&graph)
        .into_iter()
        .map(|comp| comp.into_iter().map(|ix| ix.index()).collect())
        .collect()
}

/// Nodes lying on directed cycles (their component has an internal edge).
pub fn chain_recurrent_set(dg: &ChainDigraph) -> Vec<usize> {
    let mut out = Vec::new();
    for comp in sccs_of(&dg.edges) {
        let inside: HashSet<usize> = comp.iter().copied().collect();
        let cyclic = comp
            .iter()
            .any(|&v| dg.edges[v].iter().any(|j| inside.contains(j)));
        if cyclic {
            out.extend(comp);
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BirkhoffReport {
    pub delta: f64,
    pub r: f64,
    pub horizon: i64,
    /// Survivor sets per stage, stage 0 = whole cloud.
    pub stages: Vec<Vec<usize>>,
    pub reached_fixpoint: bool,
    /// Chain-recurrent nodes are protected from peeling; how many times the
    /// raw wandering test would have removed one anyway.
    pub protected: usize,
}

/// Iteratively removes nodes whose r-ball is wandering at scale (delta, N):
/// all T^j images of the surviving ball piece, 1 <= |j| <= N, stay more than
/// delta away from it. Chain-recurrent nodes are never peeled, keeping the
/// final stage a superset of the chain-recurrent set by construction.
pub fn birkhoff_center_iteration(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    delta: f64,
    horizon: Horizon,
    max_stages: usize,
) -> Result<BirkhoffReport> {
    if max_stages < 1 {
        return Err(DynError::Precondition("max-stages must be >= 1".into()));
    }
    let n = cloud.len();
    let dg = chain_digraph(sys, cloud, delta, horizon)?;
    let recurrent: HashSet<usize> = chain_recurrent_set(&dg).into_iter().collect();
    let balls = cloud.balls();
    // orbit tables up to the horizon, reused across stages
    let tables = crate::pseudometric::iterate_tables(sys, cloud, horizon)?;
    let mut alive: Vec<bool> = vec![true; n];
    let mut stages = vec![(0..n).collect::<Vec<usize>>()];
    let mut protected = 0usize;
    let mut reached_fixpoint = false;
    for _ in 0..max_stages {
        let mut peel = Vec::new();
        for x in 0..n {
            if !alive[x] {
                continue;
            }
            let piece: Vec<usize> = balls[x].iter().copied().filter(|&j| alive[j]).collect();
            // wandering: every image point of the piece stays > delta from it
            let mut wandering = true;
            'scan: for t in &tables[1..] {
                for &y in &piece {
                    for &z in &piece {
                        if cloud.space.distance(&t[y], &cloud.points[z]) <= delta {
                            wandering = false;
                            break 'scan;
                        }
                    }
                }
            }
            if wandering {
                if recurrent.contains(&x) {
                    protected += 1;
                } else {
                    peel.push(x);
                }
            }
        }
        if peel.is_empty() {
            reached_fixpoint = true;
            break;
        }
        for x in peel {
            alive[x] = false;
        }
        stages.push((0..n).filter(|&i| alive[i]).collect());
    }
    Ok(BirkhoffReport {
        delta,
        r: cloud.r,
        horizon: horizon.0,
        stages,
        reached_fixpoint,
        protected,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProlongationReport {
    pub base: usize,
    pub prol_set: Vec<usize>,
    pub delta: f64,
    pub horizon: i64,
}

/// prol-set = { y : some x' within delta of x has an iterate within delta
/// of y, |n| <= N }. Always contains the delta-truncated orbit segment.
pub fn prolongation(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    x: usize,
    delta: f64,
    horizon: Horizon,
) -> Result<ProlongationReport> {
    let n = cloud.len();
    let mut hit = vec![false; n];
    for xp in 0..n {
        if cloud.distance(x, xp) > delta {
            continue;
        }
        let seg = crate::system::orbit_segment(sys, &cloud.points[xp], horizon)?;
        for (_, p) in &seg {
            for (j, hit_j) in hit.iter_mut().enumerate() {
                if !*hit_j && cloud.space.distance(p, &cloud.points[j]) <= delta {
                    *hit_j = true;
                }
            }
        }
    }
    Ok(ProlongationReport {
        base: x,
        prol_set: (0..n).filter(|&i| hit[i]).collect(),
        delta,
        horizon: horizon.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lem1Outcome {
    pub checked: usize,
    pub violations: Vec<usize>,
}

/// For points of the eq-proxy: the prolongation set must stay inside the
/// 2-delta fattening of the orbit-closure sample. Non-eq points are skipped.
pub fn lem1_check(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    eq_points: &[usize],
    delta: f64,
    horizon: Horizon,
) -> Result<Lem1Outcome> {
    let mut violations = Vec::new();
    for &x in eq_points {
        let prol = prolongation(sys, cloud, x, delta, horizon)?;
        let orbit =
            crate::sampling::orbit_closure_sample(sys, &cloud.points[x], horizon, 0.0)?;
        for &y in &prol.prol_set {
            let (_, d) = orbit.nearest(&cloud.points[y]);
            if d > 2.0 * delta {
                violations.push(x);
                break;
            }
        }
    }
    Ok(Lem1Outcome {
        checked: eq_points.len(),
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CapturingOutcome {
    pub captures: bool,
    pub violators: Vec<usize>,
}

/// A is capturing in B when no orbit from B - A enters the delta-fattening
/// of A. Requires A to be a subset of B.
pub fn capturing_check(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    a: &[usize],
    b: &[usize],
    delta: f64,
    horizon: Horizon,
) -> Result<CapturingOutcome> {
    let a_set: HashSet<usize> = a.iter().copied().collect();
    if !a.iter().all(|i| b.contains(i)) {
        return Err(DynError::Precondition("A must be a subset of B".into()));
    }
    let mut violators = Vec::new();
    for &x in b {
        if a_set.contains(&x) {
            continue;
        }
        let seg = crate::system::orbit_segment(sys, &cloud.points[x], horizon)?;
        let enters = seg.iter().any(|(_, p)| {
            a.iter()
                .any(|&i| cloud.space.distance(p, &cloud.points[i]) <= delta)
        });
        if enters {
            violators.push(x);
        }
    }
    Ok(CapturingOutcome {
        captures: violators.is_empty(),
        violators,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MincenterComponent {
    pub nodes: Vec<usize>,
    pub minimal_ish: bool,
    pub gap_bound: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MincenterReport {
    pub components: Vec<MincenterComponent>,
    pub mincenter: Vec<usize>,
    pub delta: f64,
    pub horizon: i64,
}

/// Candidate minimal pieces: components of the chain digraph restricted to
/// chain-recurrent nodes, tagged minimal-ish when every member returns
/// delta-close to itself with gaps bounded by ceil(N/4) inside the horizon.
pub fn mincenter_approx(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    delta: f64,
    horizon: Horizon,
) -> Result<MincenterReport> {
    let dg = chain_digraph(sys, cloud, delta, horizon)?;
    let recurrent: HashSet<usize> = chain_recurrent_set(&dg).into_iter().collect();
    let restricted: Vec<Vec<usize>> = dg
        .edges
        .iter()
        .enumerate()
        .map(|(i, outs)| {
            if recurrent.contains(&i) {
                outs.iter()
                    .copied()
                    .filter(|j| recurrent.contains(j))
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let gap_bound = (horizon.0 + 3) / 4;
    let mut components = Vec::new();
    let mut mincenter = Vec::new();
    for comp in sccs_of(&restricted) {
        if comp.iter().all(|&v| !recurrent.contains(&v)) {
            continue;
        }
        let mut minimal_ish = true;
        'members: for &x in &comp {
            // syndetic-return test: delta-returns with gaps <= gap_bound
            let mut cur = cloud.points[x].clone();
            let mut last_return = 0i64;
            for j in 1..=horizon.0 {
                cur = sys.forward(&cur)?;
                if cloud.space.distance(&cur, &cloud.points[x]) <= delta {
                    last_return = j;
                } else if j - last_return > gap_bound {
                    minimal_ish = false;
                    break 'members;
                }
            }
        }
        let mut nodes = comp.clone();
        nodes.sort_unstable();
        if minimal_ish {
            mincenter.extend(nodes.iter().copied());
        }
        components.push(MincenterComponent {
            nodes,
            minimal_ish,
            gap_bound,
        });
    }
    mincenter.sort_unstable();
    Ok(MincenterReport {
        components,
        mincenter,
        delta,
        horizon: horizon.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeOutcome {
    Transitive,
    NotTransitive,
    Unknown,
}

/// Chain edges for the full group action: a single chain step may apply the
/// generator or its inverse (the acting group is the integers, so chains
/// witness g U meeting V for g of either sign).
fn group_chain_edges(
    sys: &SystemSpec,
    points: &[crate::space::Point],
    space: &crate::space::AmbientSpace,
    delta: f64,
) -> Result<Vec<Vec<usize>>> {
    let n = points.len();
    let mut edges = vec![Vec::new(); n];
    for i in 0..n {
        let fwd = sys.forward(&points[i])?;
        let bwd = sys.inverse(&points[i])?;
        for j in 0..n {
            let d = space
                .distance(&fwd, &points[j])
                .min(space.distance(&bwd, &points[j]));
            if d <= delta {
                edges[i].push(j);
            }
        }
    }
    Ok(edges)
}

/// Strong connectivity within a step budget: every ordered pair must be
/// joined by a chain of at most `budget` delta-steps.
fn strongly_connected_within(edges: &[Vec<usize>], budget: i64) -> bool {
    let n = edges.len();
    for start in 0..n {
        let mut seen = vec![false; n];
        let mut frontier = vec![start];
        seen[start] = true;
        let mut reached = 1usize;
        let mut steps = 0i64;
        while !frontier.is_empty() && steps < budget && reached < n {
            let mut next = Vec::new();
            for &v in &frontier {
                for &u in &edges[v] {
                    if !seen[u] {
                        seen[u] = true;
                        reached += 1;
                        next.push(u);
                    }
                }
            }
            frontier = next;
            steps += 1;
        }
        if reached < n {
            return false;
        }
    }
    true
}

/// Chain transitivity of the system itself at (delta, step budget N).
pub fn chain_transitivity_probe(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    delta: f64,
    horizon: Horizon,
) -> Result<ProbeOutcome> {
    let edges = group_chain_edges(sys, &cloud.points, &cloud.space, delta)?;
    Ok(if strongly_connected_within(&edges, horizon.0.max(1)) {
        ProbeOutcome::Transitive
    } else {
        ProbeOutcome::NotTransitive
    })
}

/// Chain transitivity of the product system on cloud x cloud, subsampled by
/// uniform stride to at most 4096 product nodes. Verdicts hold at the
/// subsample scale; an exceeded budget returns Unknown.
pub fn product_transitivity_probe(
    sys: &SystemSpec,
    cloud: &SampleCloud,
    delta: f64,
    horizon: Horizon,
) -> Result<ProbeOutcome> {
    let n = cloud.len();
    let stride = {
        let mut s = 1usize;
        while (n / s + usize::from(n % s > 0)).pow(2) > 4096 {
            s += 1;
        }
        s
    };
    let idx: Vec<usize> = (0..n).step_by(stride).collect();
    if idx.len() < 2 {
        return Ok(ProbeOutcome::Unknown);
    }
    let m = idx.len();
    let mut pair_points = Vec::with_capacity(m * m);
    for &i in &idx {
        for &j in &idx {
            pair_points.push((i, j));
        }
    }
    // product edges: both coordinates within delta, same group element on
    // both (the diagonal action), allowing either generator per step
    let mut fwd = Vec::with_capacity(n);
    let mut bwd = Vec::with_capacity(n);
    for p in &cloud.points {
        fwd.push(sys.forward(p)?);
        bwd.push(sys.inverse(p)?);
    }
    let near = |p: &crate::space::Point, j: usize| cloud.space.distance(p, &cloud.points[j]);
    let mut edges = vec![Vec::new(); m * m];
    for (a, &(i, j)) in pair_points.iter().enumerate() {
        for (b, &(k, l)) in pair_points.iter().enumerate() {
            let via_fwd = near(&fwd[i], k).max(near(&fwd[j], l));
            let via_bwd = near(&bwd[i], k).max(near(&bwd[j], l));
            if via_fwd.min(via_bwd) <= delta {
                edges[a].push(b);
            }
        }
    }
    Ok(if strongly_connected_within(&edges, horizon.0.max(1)) {
        ProbeOutcome::Transitive
    } else {
        ProbeOutcome::NotTransitive
    })
}
