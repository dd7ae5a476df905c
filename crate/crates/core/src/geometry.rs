//! Compact convex bodies with exact first-coordinate projection and slicing.
//!
//! The dimension-induction maximizer needs closed-form projections and
//! slices, so instead of a general membership oracle we use a small shape
//! grammar: an interval (dimension 1), and a box or ball cut by at most
//! one half-space (dimension >= 2). Box-with-cut and ball-with-cut cover
//! every budget set the demand machinery produces, and both are closed
//! under slicing.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::GEOM_TOL;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GeometryError {
    /// Construction would produce an empty body.
    #[error("body is empty: {0}")]
    EmptyBody(String),
    /// Slice coordinate lies outside the projection beyond tolerance.
    #[error("slice at {t} is empty (projection is [{lo}, {hi}])")]
    EmptySlice { t: f64, lo: f64, hi: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid shape: {0}")]
    BadShape(String),
}

/// A point of R^n; coordinates are plain f64 commodity quantities.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point{:?}", self.0)
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Closed interval [lo, hi] with lo <= hi.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, GeometryError> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(GeometryError::BadShape(format!(
                "invalid interval [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, t: f64, tol: f64) -> bool {
        t >= self.lo - tol && t <= self.hi + tol
    }

    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.lo, self.hi)
    }
}

/// Closed half-space `normal . x <= offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn satisfies(&self, x: &[f64], tol: f64) -> bool {
        dot(&self.normal, x) <= self.offset + tol
    }

    /// Euclidean projection onto the half-space (identity if already inside).
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let v = dot(&self.normal, x) - self.offset;
        let n2 = dot(&self.normal, &self.normal);
        if v <= 0.0 || n2 <= 0.0 {
            return x.to_vec();
        }
        let s = v / n2;
        x.iter().zip(&self.normal).map(|(xi, ni)| xi - s * ni).collect()
    }
}

/// A nonempty compact convex body of R^n.
///
/// Inhabitation is checked at construction; boundedness and convexity
/// are guaranteed by the grammar. One-dimensional boxes and balls are
/// canonicalized to `Interval`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Interval(Interval),
    Box {
        bounds: Vec<Interval>,
        cut: Option<Halfspace>,
    },
    Ball {
        center: Point,
        radius: f64,
        cut: Option<Halfspace>,
    },
}

/// Minimum of `n . x` over a box, attained at a corner.
fn box_corner_min(bounds: &[Interval], n: &[f64]) -> f64 {
    bounds
        .iter()
        .zip(n)
        .map(|(b, ni)| (ni * b.lo).min(ni * b.hi))
        .sum()
}

/// Intersect a 1-D interval with `a*x <= c`.
fn interval_cut(iv: Interval, a: f64, c: f64) -> Result<Interval, GeometryError> {
    let (mut lo, mut hi) = (iv.lo, iv.hi);
    if a > GEOM_TOL {
        hi = hi.min(c / a);
    } else if a < -GEOM_TOL {
        lo = lo.max(c / a);
    } else if 0.0 > c + GEOM_TOL {
        return Err(GeometryError::EmptyBody(
            "degenerate constraint excludes everything".into(),
        ));
    }
    if lo > hi {
        if lo - hi <= GEOM_TOL {
            let m = 0.5 * (lo + hi);
            return Ok(Interval { lo: m, hi: m });
        }
        return Err(GeometryError::EmptyBody(format!(
            "interval cut empty: [{lo}, {hi}]"
        )));
    }
    Interval::new(lo, hi)
}

impl ConvexBody {
    pub fn interval(lo: f64, hi: f64) -> Result<Self, GeometryError> {
        Ok(ConvexBody::Interval(Interval::new(lo, hi)?))
    }

    /// Box with an optional half-space cut; checks inhabitation.
    pub fn cut_box(bounds: Vec<Interval>, cut: Option<Halfspace>) -> Result<Self, GeometryError> {
        if bounds.is_empty() {
            return Err(GeometryError::BadShape("box needs at least one axis".into()));
        }
        if let Some(hs) = &cut {
            if hs.normal.len() != bounds.len() {
                return Err(GeometryError::DimensionMismatch {
                    expected: bounds.len(),
                    got: hs.normal.len(),
                });
            }
            if box_corner_min(&bounds, &hs.normal) > hs.offset + GEOM_TOL {
                return Err(GeometryError::EmptyBody(format!(
                    "box corner minimum {} exceeds offset {}",
                    box_corner_min(&bounds, &hs.normal),
                    hs.offset
                )));
            }
        }
        if bounds.len() == 1 {
            let iv = match cut {
                Some(hs) => interval_cut(bounds[0], hs.normal[0], hs.offset)?,
                None => bounds[0],
            };
            return Ok(ConvexBody::Interval(iv));
        }
        Ok(ConvexBody::Box { bounds, cut })
    }

    /// Ball with an optional half-space cut; checks inhabitation.
    pub fn cut_ball(
        center: Point,
        radius: f64,
        cut: Option<Halfspace>,
    ) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(GeometryError::BadShape(format!("bad radius {radius}")));
        }
        if let Some(hs) = &cut {
            if hs.normal.len() != center.dim() {
                return Err(GeometryError::DimensionMismatch {
                    expected: center.dim(),
                    got: hs.normal.len(),
                });
            }
            let reach = dot(&hs.normal, center.coords()) - norm(&hs.normal) * radius;
            if reach > hs.offset + GEOM_TOL {
                return Err(GeometryError::EmptyBody(format!(
                    "ball minimum {} exceeds offset {}",
                    reach, hs.offset
                )));
            }
        }
        if center.dim() == 1 {
            let iv = Interval::new(center.0[0] - radius, center.0[0] + radius)?;
            let iv = match cut {
                Some(hs) => interval_cut(iv, hs.normal[0], hs.offset)?,
                None => iv,
            };
            return Ok(ConvexBody::Interval(iv));
        }
        Ok(ConvexBody::Ball {
            center,
            radius,
            cut,
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexBody::Interval(_) => 1,
            ConvexBody::Box { bounds, .. } => bounds.len(),
            ConvexBody::Ball { center, .. } => center.dim(),
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        if x.dim() != self.dimension() {
            return false;
        }
        match self {
            ConvexBody::Interval(iv) => iv.contains(x.0[0], tol),
            ConvexBody::Box { bounds, cut } => {
                bounds
                    .iter()
                    .zip(x.coords())
                    .all(|(b, xi)| b.contains(*xi, tol))
                    && cut.as_ref().is_none_or(|hs| hs.satisfies(x.coords(), tol))
            }
            ConvexBody::Ball {
                center,
                radius,
                cut,
            } => {
                dist(x.coords(), center.coords()) <= radius + tol
                    && cut.as_ref().is_none_or(|hs| hs.satisfies(x.coords(), tol))
            }
        }
    }

    /// A guaranteed member, used to seed nets and sampling.
    pub fn inner_point(&self) -> Point {
        match self {
            ConvexBody::Interval(iv) => Point(vec![iv.midpoint()]),
            ConvexBody::Box { bounds, cut } => match cut {
                None => Point(bounds.iter().map(|b| b.midpoint()).collect()),
                Some(hs) => {
                    let center: Vec<f64> = bounds.iter().map(|b| b.midpoint()).collect();
                    if hs.satisfies(&center, 0.0) {
                        return Point(center);
                    }
                    // The corner attaining min n.x is a member by inhabitation.
                    Point(
                        bounds
                            .iter()
                            .zip(&hs.normal)
                            .map(|(b, ni)| if *ni >= 0.0 { b.lo } else { b.hi })
                            .collect(),
                    )
                }
            },
            ConvexBody::Ball {
                center,
                radius: _,
                cut,
            } => match cut {
                None => center.clone(),
                Some(hs) => {
                    if hs.satisfies(center.coords(), 0.0) {
                        center.clone()
                    } else {
                        // Projection of the center onto the cut plane lies in
                        // the ball whenever the body is inhabited.
                        Point(hs.project(center.coords()))
                    }
                }
            },
        }
    }

    /// Upper bound on the diameter (ignores the cut, which only shrinks).
    pub fn diameter_upper(&self) -> f64 {
        match self {
            ConvexBody::Interval(iv) => iv.width(),
            ConvexBody::Box { bounds, .. } => bounds
                .iter()
                .map(|b| b.width() * b.width())
                .sum::<f64>()
                .sqrt(),
            ConvexBody::Ball { radius, .. } => 2.0 * radius,
        }
    }

    fn bounding_box(&self) -> Vec<Interval> {
        match self {
            ConvexBody::Interval(iv) => vec![*iv],
            ConvexBody::Box { bounds, .. } => bounds.clone(),
            ConvexBody::Ball { center, radius, .. } => center
                .coords()
                .iter()
                .map(|c| Interval {
                    lo: c - radius,
                    hi: c + radius,
                })
                .collect(),
        }
    }

    /// Clamp onto the uncut core shape (box or ball); identity for members.
    fn clamp_to_core(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ConvexBody::Interval(iv) => vec![iv.clamp(x[0])],
            ConvexBody::Box { bounds, .. } => bounds
                .iter()
                .zip(x)
                .map(|(b, xi)| b.clamp(*xi))
                .collect(),
            ConvexBody::Ball { center, radius, .. } => {
                let d = dist(x, center.coords());
                if d <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / d;
                    center
                        .coords()
                        .iter()
                        .zip(x)
                        .map(|(c, xi)| c + s * (xi - c))
                        .collect()
                }
            }
        }
    }

    fn cut(&self) -> Option<&Halfspace> {
        match self {
            ConvexBody::Interval(_) => None,
            ConvexBody::Box { cut, .. } | ConvexBody::Ball { cut, .. } => cut.as_ref(),
        }
    }

    /// Exact projection `{ x_1 : x in body }`, closed form per shape.
    pub fn project_first(&self) -> Interval {
        match self {
            ConvexBody::Interval(iv) => *iv,
            ConvexBody::Box { bounds, cut } => {
                let base = bounds[0];
                let Some(hs) = cut else { return base };
                let n1 = hs.normal[0];
                let rest_min = box_corner_min(&bounds[1..], &hs.normal[1..]);
                let budget = hs.offset - rest_min;
                let (mut lo, mut hi) = (base.lo, base.hi);
                if n1 > GEOM_TOL {
                    hi = hi.min(budget / n1);
                } else if n1 < -GEOM_TOL {
                    lo = lo.max(budget / n1);
                }
                if lo > hi {
                    // Inhabitation keeps the overshoot within rounding noise.
                    let m = 0.5 * (lo + hi);
                    return Interval { lo: m, hi: m };
                }
                Interval { lo, hi }
            }
            ConvexBody::Ball {
                center,
                radius,
                cut,
            } => {
                let c1 = center.0[0];
                let base = Interval {
                    lo: c1 - radius,
                    hi: c1 + radius,
                };
                let Some(hs) = cut else { return base };
                let n1 = hs.normal[0];
                let q = norm(&hs.normal[1..]);
                let v = hs.offset - dot(&hs.normal[1..], &center.coords()[1..]) - n1 * c1;
                // Feasible s = t - c1 solve g(s) = n1*s - q*sqrt(r^2 - s^2) <= v,
                // with g convex on [-r, r].
                let r = *radius;
                let g = |s: f64| n1 * s - q * (r * r - s * s).max(0.0).sqrt();
                let s_star = if q > GEOM_TOL {
                    -n1 * r / (n1 * n1 + q * q).sqrt()
                } else if n1 > 0.0 {
                    -r
                } else {
                    r
                };
                if g(s_star) > v + GEOM_TOL {
                    // Empty up to tolerance; collapse to the feasible touch point.
                    let t = c1 + s_star;
                    return Interval { lo: t, hi: t };
                }
                let bisect = |mut bad: f64, mut good: f64| {
                    // g(bad) > v >= g(good); shrink to the crossing.
                    for _ in 0..100 {
                        let m = 0.5 * (bad + good);
                        if g(m) <= v {
                            good = m;
                        } else {
                            bad = m;
                        }
                    }
                    good
                };
                let lo_s = if g(-r) <= v { -r } else { bisect(-r, s_star) };
                let hi_s = if g(r) <= v { r } else { bisect(r, s_star) };
                Interval {
                    lo: c1 + lo_s,
                    hi: c1 + hi_s,
                }
            }
        }
    }

    /// The (n-1)-dimensional body `{ (x_2..x_n) : (t, x_2..x_n) in body }`.
    pub fn slice_first(&self, t: f64) -> Result<ConvexBody, GeometryError> {
        let proj = self.project_first();
        if !proj.contains(t, GEOM_TOL) {
            return Err(GeometryError::EmptySlice {
                t,
                lo: proj.lo,
                hi: proj.hi,
            });
        }
        let t = proj.clamp(t);
        match self {
            ConvexBody::Interval(_) => Err(GeometryError::BadShape(
                "cannot slice a one-dimensional body".into(),
            )),
            ConvexBody::Box { bounds, cut } => {
                let rest: Vec<Interval> = bounds[1..].to_vec();
                let rest_cut = match cut {
                    None => None,
                    Some(hs) => {
                        let n_rest: Vec<f64> = hs.normal[1..].to_vec();
                        let offset = hs.offset - hs.normal[0] * t;
                        if n_rest.iter().all(|a| a.abs() <= GEOM_TOL) {
                            if 0.0 > offset + GEOM_TOL {
                                return Err(GeometryError::EmptySlice {
                                    t,
                                    lo: proj.lo,
                                    hi: proj.hi,
                                });
                            }
                            None
                        } else {
                            Some(Halfspace {
                                normal: n_rest,
                                offset,
                            })
                        }
                    }
                };
                ConvexBody::cut_box(rest, rest_cut).map_err(|_| GeometryError::EmptySlice {
                    t,
                    lo: proj.lo,
                    hi: proj.hi,
                })
            }
            ConvexBody::Ball {
                center,
                radius,
                cut,
            } => {
                let d = t - center.0[0];
                let rho2 = radius * radius - d * d;
                let rho = rho2.max(0.0).sqrt();
                let rest_center = Point(center.0[1..].to_vec());
                let rest_cut = match cut {
                    None => None,
                    Some(hs) => {
                        let n_rest: Vec<f64> = hs.normal[1..].to_vec();
                        let offset = hs.offset - hs.normal[0] * t;
                        if n_rest.iter().all(|a| a.abs() <= GEOM_TOL) {
                            if 0.0 > offset + GEOM_TOL {
                                return Err(GeometryError::EmptySlice {
                                    t,
                                    lo: proj.lo,
                                    hi: proj.hi,
                                });
                            }
                            None
                        } else {
                            Some(Halfspace {
                                normal: n_rest,
                                offset,
                            })
                        }
                    }
                };
                ConvexBody::cut_ball(rest_center, rho, rest_cut).map_err(|_| {
                    GeometryError::EmptySlice {
                        t,
                        lo: proj.lo,
                        hi: proj.hi,
                    }
                })
            }
        }
    }

    /// Finite eps-approximation: an axis lattice of spacing `eps/sqrt(n)`
    /// intersected with the body, plus projections of near-miss lattice
    /// nodes (each projection step is nonexpansive toward every member,
    /// so a node within eps/2 of some member yields a net point within
    /// eps/2 of that member).
    pub fn eps_net(&self, eps: f64) -> EpsNet {
        assert!(eps > 0.0, "eps must be positive");
        let dim = self.dimension();
        let h = eps / (dim as f64).sqrt();
        let bb = self.bounding_box();
        let counts: Vec<usize> = bb
            .iter()
            .map(|b| (b.width() / h).ceil() as usize + 1)
            .collect();
        let mut points: Vec<Point> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let mut push = |p: Point, seen: &mut std::collections::BTreeSet<Vec<u64>>| {
            let key: Vec<u64> = p.coords().iter().map(|x| x.to_bits()).collect();
            if seen.insert(key) {
                points.push(p);
            }
        };
        push(self.inner_point(), &mut seen);

        let total: usize = counts.iter().product();
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let g: Vec<f64> = idx
                .iter()
                .zip(&bb)
                .map(|(k, b)| b.lo + *k as f64 * h)
                .collect();
            let gp = Point(g.clone());
            if self.contains(&gp, GEOM_TOL) {
                push(gp, &mut seen);
            } else {
                // Alternate core-shape clamp and half-space projection; both
                // are nonexpansive toward any member of the body.
                let mut y = g.clone();
                for _ in 0..32 {
                    y = self.clamp_to_core(&y);
                    if let Some(hs) = self.cut() {
                        y = hs.project(&y);
                    }
                    if self.contains(&Point(y.clone()), GEOM_TOL) {
                        break;
                    }
                }
                let yp = Point(y);
                if self.contains(&yp, GEOM_TOL) && dist(yp.coords(), &g) <= 0.5 * eps + GEOM_TOL {
                    push(yp, &mut seen);
                }
            }
            // advance multi-index
            for d in 0..dim {
                idx[d] += 1;
                if idx[d] < counts[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        EpsNet { points, eps, dim }
    }

    /// Rejection-sample a uniform member, or None after `max_attempts`.
    pub fn sample_member(&self, rng: &mut impl rand::Rng, max_attempts: usize) -> Option<Point> {
        for _ in 0..max_attempts {
            let candidate = match self {
                ConvexBody::Interval(iv) => {
                    if iv.width() == 0.0 {
                        vec![iv.lo]
                    } else {
                        vec![rng.random_range(iv.lo..=iv.hi)]
                    }
                }
                ConvexBody::Box { bounds, .. } => bounds
                    .iter()
                    .map(|b| {
                        if b.width() == 0.0 {
                            b.lo
                        } else {
                            rng.random_range(b.lo..=b.hi)
                        }
                    })
                    .collect(),
                ConvexBody::Ball { center, radius, .. } => {
                    crate::rng::ball_point(rng, center.coords(), *radius)
                }
            };
            let p = Point(candidate);
            if self.contains(&p, 0.0) {
                return Some(p);
            }
        }
        None
    }
}

/// Finite eps-approximation to a body: every listed point is a member and
/// every member lies within `eps` of some listed point.
#[derive(Clone, Debug)]
pub struct EpsNet {
    pub points: Vec<Point>,
    pub eps: f64,
    pub dim: usize,
}

impl EpsNet {
    pub fn from_points(points: Vec<Point>, eps: f64) -> Result<Self, GeometryError> {
        let dim = points.first().map(|p| p.dim()).unwrap_or(0);
        if points.iter().any(|p| p.dim() != dim) {
            return Err(GeometryError::BadShape("mixed dimensions in net".into()));
        }
        Ok(EpsNet { points, eps, dim })
    }

    /// Distance from `x` to the nearest net point.
    pub fn distance_to(&self, x: &Point) -> f64 {
        self.points
            .iter()
            .map(|p| p.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// One point per row, comma-separated coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let row: Vec<String> = p.coords().iter().map(|x| format!("{x}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, eps: f64) -> Result<Self, GeometryError> {
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let coords: Result<Vec<f64>, _> =
                line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            points.push(Point(coords.map_err(|e| {
                GeometryError::BadShape(format!("bad CSV row {line:?}: {e}"))
            })?));
        }
        EpsNet::from_points(points, eps)
    }
}

/// Hausdorff distance between two finite point sets; approximates the
/// distance between the underlying bodies within `a.eps + b.eps`.
pub fn hausdorff(a: &EpsNet, b: &EpsNet) -> f64 {
    assert_eq!(a.dim, b.dim, "hausdorff requires equal ambient dimension");
    let directed = |from: &EpsNet, to: &EpsNet| {
        from.points
            .iter()
            .map(|p| to.distance_to(p))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

// ---------------------------------------------------------------------------
// JSON schema: { shape, bounds | center+radius, p, w }
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BodyJson {
    shape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<f64>,
}

impl ConvexBody {
    pub fn to_json(&self) -> String {
        let js = match self {
            ConvexBody::Interval(iv) => BodyJson {
                shape: "interval".into(),
                bounds: Some(vec![[iv.lo, iv.hi]]),
                center: None,
                radius: None,
                p: None,
                w: None,
            },
            ConvexBody::Box { bounds, cut } => BodyJson {
                shape: "box-halfspace".into(),
                bounds: Some(bounds.iter().map(|b| [b.lo, b.hi]).collect()),
                center: None,
                radius: None,
                p: cut.as_ref().map(|hs| hs.normal.clone()),
                w: cut.as_ref().map(|hs| hs.offset),
            },
            ConvexBody::Ball {
                center,
                radius,
                cut,
            } => BodyJson {
                shape: "ball-halfspace".into(),
                bounds: None,
                center: Some(center.0.clone()),
                radius: Some(*radius),
                p: cut.as_ref().map(|hs| hs.normal.clone()),
                w: cut.as_ref().map(|hs| hs.offset),
            },
        };
        serde_json::to_string(&js).expect("body serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let js: BodyJson = serde_json::from_str(text)
            .map_err(|e| GeometryError::BadShape(format!("bad body JSON: {e}")))?;
        let cut = match (js.p, js.w) {
            (Some(normal), Some(offset)) => Some(Halfspace { normal, offset }),
            (None, None) => None,
            _ => {
                return Err(GeometryError::BadShape(
                    "p and w must be given together".into(),
                ))
            }
        };
        match js.shape.as_str() {
            "interval" => {
                let bounds = js
                    .bounds
                    .ok_or_else(|| GeometryError::BadShape("interval needs bounds".into()))?;
                if bounds.len() != 1 {
                    return Err(GeometryError::BadShape(
                        "interval takes exactly one bounds pair".into(),
                    ));
                }
                let iv = Interval::new(bounds[0][0], bounds[0][1])?;
                match cut {
                    None => Ok(ConvexBody::Interval(iv)),
                    Some(hs) => ConvexBody::cut_box(vec![iv], Some(hs)),
                }
            }
            "box" | "box-halfspace" => {
                let bounds = js
                    .bounds
                    .ok_or_else(|| GeometryError::BadShape("box needs bounds".into()))?;
                let ivs: Result<Vec<Interval>, _> = bounds
                    .iter()
                    .map(|[lo, hi]| Interval::new(*lo, *hi))
                    .collect();
                ConvexBody::cut_box(ivs?, cut)
            }
            "ball" | "ball-halfspace" => {
                let center = js
                    .center
                    .ok_or_else(|| GeometryError::BadShape("ball needs center".into()))?;
                let radius = js
                    .radius
                    .ok_or_else(|| GeometryError::BadShape("ball needs radius".into()))?;
                ConvexBody::cut_ball(Point(center), radius, cut)
            }
            other => Err(GeometryError::BadShape(format!("unknown shape {other:?}"))),
        }
    }
}
