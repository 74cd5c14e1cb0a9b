//! Ambient compact metric spaces and their points.
//!
//! Every space carries a single fixed metric with diameter at most 2. The
//! metric descriptors are part of the public record: any result that depends
//! on metric scaling is reported together with [`AmbientSpace::descriptor`].

use std::fmt;
use std::sync::Arc;

use crate::error::{DynError, Result};

/// Bi-infinite symbol sequence presented as a total function on positions.
///
/// Points of sequence spaces hold a shared generator plus a shift offset, so
/// the shift action is exact and symbols are available at every position.
pub struct SymGen {
    pub label: String,
    pub alphabet: usize,
    func: Box<dyn Fn(i64) -> u8 + Send + Sync>,
}

impl SymGen {
    pub fn new(
        label: impl Into<String>,
        alphabet: usize,
        func: impl Fn(i64) -> u8 + Send + Sync + 'static,
    ) -> Arc<Self> {
        Arc::new(SymGen {
            label: label.into(),
            alphabet,
            func: Box::new(func),
        })
    }

    pub fn symbol(&self, position: i64) -> u8 {
        (self.func)(position)
    }
}

impl fmt::Debug for SymGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymGen({}, |S|={})", self.label, self.alphabet)
    }
}

/// A point of a sequence space: generator plus shift offset.
#[derive(Clone, Debug)]
pub struct SymPoint {
    pub gen: Arc<SymGen>,
    pub offset: i64,
}

impl SymPoint {
    pub fn symbol(&self, k: i64) -> u8 {
        self.gen.symbol(self.offset.saturating_add(k))
    }

    /// The window of symbols at positions -radius..=radius.
    pub fn window(&self, radius: i64) -> Vec<u8> {
        (-radius..=radius).map(|k| self.symbol(k)).collect()
    }
}

/// A point of one of the ambient spaces.
///
/// Geometric coordinates are plain f64 with the declared per-application
/// error budget (<= 1e-12 additive per map application for gallery maps).
#[derive(Clone, Debug)]
pub enum Point {
    /// Circle coordinate in [0, 1).
    Circle(f64),
    /// Torus coordinates, each in [0, 1).
    Torus([f64; 2]),
    /// Interval coordinate in [0, 1].
    Interval(f64),
    /// Planar coordinates with x^2 + y^2 <= 1.
    Disk([f64; 2]),
    /// Sequence-space point.
    Sym(SymPoint),
    /// Suspension point: base point plus a coordinate on the circle [0,1)/0~1.
    Prod(Box<Point>, f64),
}

impl Point {
    pub fn describe(&self) -> String {
        match self {
            Point::Circle(x) => format!("circle({x:.9})"),
            Point::Torus([x, y]) => format!("torus({x:.9},{y:.9})"),
            Point::Interval(x) => format!("interval({x:.9})"),
            Point::Disk([x, y]) => format!("disk({x:.9},{y:.9})"),
            Point::Sym(p) => {
                let w: String = p
                    .window(8)
                    .iter()
                    .map(|s| char::from_digit(*s as u32, 36).unwrap_or('?'))
                    .collect();
                format!("sym[{}@{}:{}]", p.gen.label, p.offset, w)
            }
            Point::Prod(base, t) => format!("({}, t={t:.9})", base.describe()),
        }
    }
}

/// Arc distance on the circle of total length 1; diameter 1/2.
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Reduce a coordinate to [0, 1).
pub fn wrap_unit(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

#[derive(Clone, Debug)]
pub enum SpaceKind {
    Circle,
    Torus2,
    Interval,
    Disk,
    /// Finite alphabet, with `window` bounding how far symbol comparisons go;
    /// pairs agreeing through |k| <= window are treated as coincident.
    SequenceSpace { alphabet: usize, window: i64 },
    Suspension { base: Box<AmbientSpace> },
}

/// A compact metric space with its fixed metric.
#[derive(Clone, Debug)]
pub struct AmbientSpace {
    pub kind: SpaceKind,
}

impl AmbientSpace {
    pub fn circle() -> Self {
        AmbientSpace {
            kind: SpaceKind::Circle,
        }
    }
    pub fn torus2() -> Self {
        AmbientSpace {
            kind: SpaceKind::Torus2,
        }
    }
    pub fn interval() -> Self {
        AmbientSpace {
            kind: SpaceKind::Interval,
        }
    }
    pub fn disk() -> Self {
        AmbientSpace {
            kind: SpaceKind::Disk,
        }
    }
    pub fn sequence(alphabet: usize, window: i64) -> Self {
        AmbientSpace {
            kind: SpaceKind::SequenceSpace { alphabet, window },
        }
    }
    pub fn suspension(base: AmbientSpace) -> Self {
        AmbientSpace {
            kind: SpaceKind::Suspension {
                base: Box::new(base),
            },
        }
    }

    /// Human-readable metric descriptor, attached to reports.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            SpaceKind::Circle => "arc distance on circle of total length 1".into(),
            SpaceKind::Torus2 => "max of arc distances on the 2-torus".into(),
            SpaceKind::Interval => "absolute difference on [0,1]".into(),
            SpaceKind::Disk => "Euclidean distance on the unit disk".into(),
            SpaceKind::SequenceSpace { alphabet, window } => format!(
                "2^-min|k| symbol disagreement metric, alphabet {alphabet}, window {window}"
            ),
            SpaceKind::Suspension { base } => {
                format!("max(base, arc) product metric over [{}]", base.descriptor())
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            SpaceKind::Circle => 0.5,
            SpaceKind::Torus2 => 0.5,
            SpaceKind::Interval => 1.0,
            SpaceKind::Disk => 2.0,
            SpaceKind::SequenceSpace { .. } => 1.0,
            SpaceKind::Suspension { base } => base.diameter().max(0.5),
        }
    }

    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (&self.kind, a, b) {
            (SpaceKind::Circle, Point::Circle(x), Point::Circle(y)) => arc_distance(*x, *y),
            (SpaceKind::Torus2, Point::Torus(p), Point::Torus(q)) => {
                arc_distance(p[0], q[0]).max(arc_distance(p[1], q[1]))
            }
            (SpaceKind::Interval, Point::Interval(x), Point::Interval(y)) => (x - y).abs(),
            (SpaceKind::Disk, Point::Disk(p), Point::Disk(q)) => {
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
            }
            (SpaceKind::SequenceSpace { window, .. }, Point::Sym(x), Point::Sym(y)) => {
                sym_distance(x, y, *window)
            }
            (SpaceKind::Suspension { base }, Point::Prod(x, s), Point::Prod(y, t)) => {
                base.distance(x, y).max(arc_distance(*s, *t))
            }
            _ => f64::NAN,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (&self.kind, p) {
            (SpaceKind::Circle, Point::Circle(x)) => (0.0..1.0).contains(x),
            (SpaceKind::Torus2, Point::Torus(q)) => q.iter().all(|x| (0.0..1.0).contains(x)),
            (SpaceKind::Interval, Point::Interval(x)) => (0.0..=1.0).contains(x),
            (SpaceKind::Disk, Point::Disk(q)) => q[0] * q[0] + q[1] * q[1] <= 1.0 + 1e-12,
            (SpaceKind::SequenceSpace { alphabet, .. }, Point::Sym(x)) => {
                x.gen.alphabet == *alphabet
            }
            (SpaceKind::Suspension { base }, Point::Prod(x, t)) => {
                base.contains(x) && (0.0..1.0).contains(t)
            }
            _ => false,
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(DynError::PointNotInSpace(p.describe()))
        }
    }
}

/// d(x, y) = 2^-(least |k| with x_k != y_k); 1 when symbols at 0 differ.
///
/// Agreement through |k| <= window counts as coincidence (distance 0).
pub fn sym_distance(x: &SymPoint, y: &SymPoint, window: i64) -> f64 {
    match first_disagreement(x, y, window) {
        Some(k) => 0.5f64.powi(k as i32),
        None => 0.0,
    }
}

/// Least |k| <= window with x_k != y_k.
pub fn first_disagreement(x: &SymPoint, y: &SymPoint, window: i64) -> Option<i64> {
    for k in 0..=window {
        if x.symbol(k) != y.symbol(k) {
            return Some(k);
        }
        if k > 0 && x.symbol(-k) != y.symbol(-k) {
            return Some(k);
        }
    }
    None
}
