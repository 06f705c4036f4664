use std::sync::Arc;

use crate::dyadic::Domain;
use crate::error::{Error, Result};
use crate::geom::{
    clip_polygon, clip_polygon_box, clip_segment_box, dist_point_triangle, Aabb, HalfSpace, Point, Polygon,
};
use crate::scalar::{lit, Scalar};

/// Position of a closed box relative to a region.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Placement {
    Inside,
    Outside,
    Partial,
}

/// Measurable window used to restrict sets: balls, boxes, dilates of a
/// dyadic domain and boolean combinations of those.
#[derive(Clone, Debug)]
pub enum Region<T> {
    All,
    Ball { center: Point<T>, radius: T, open: bool },
    Box { bx: Aabb<T>, open: bool },
    /// `{ f <= r }` (or `{ f < r }` when open) for the shape function of `domain`.
    Scaled { domain: Arc<Domain>, r: T, open: bool },
    Not(Box<Region<T>>),
    And(Vec<Region<T>>),
}

impl<T: Scalar> Region<T> {
    pub fn ball(center: Point<T>, radius: T) -> Self {
        Region::Ball { center, radius, open: false }
    }

    pub fn open_ball(center: Point<T>, radius: T) -> Self {
        Region::Ball { center, radius, open: true }
    }

    pub fn closed_box(bx: Aabb<T>) -> Self {
        Region::Box { bx, open: false }
    }

    pub fn open_box(bx: Aabb<T>) -> Self {
        Region::Box { bx, open: true }
    }

    pub fn scaled(domain: &Arc<Domain>, r: T) -> Self {
        Region::Scaled { domain: domain.clone(), r, open: false }
    }

    pub fn scaled_open(domain: &Arc<Domain>, r: T) -> Self {
        Region::Scaled { domain: domain.clone(), r, open: true }
    }

    /// Closed shell `{ lo <= f <= hi }`.
    pub fn shell(domain: &Arc<Domain>, lo: T, hi: T) -> Self {
        Region::And(vec![Region::scaled(domain, hi), Region::scaled_open(domain, lo).not()])
    }

    /// Closed ball annulus `{ lo <= |x - c| <= hi }`.
    pub fn annulus(center: Point<T>, lo: T, hi: T) -> Self {
        Region::And(vec![Region::ball(center, hi), Region::open_ball(center, lo).not()])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            Region::Not(r) => *r,
            r => Region::Not(Box::new(r)),
        }
    }

    pub fn and(self, other: Region<T>) -> Self {
        match (self, other) {
            (Region::All, r) | (r, Region::All) => r,
            (Region::And(mut a), Region::And(b)) => {
                a.extend(b);
                Region::And(a)
            }
            (Region::And(mut a), r) => {
                a.push(r);
                Region::And(a)
            }
            (r, Region::And(mut a)) => {
                a.insert(0, r);
                Region::And(a)
            }
            (a, b) => Region::And(vec![a, b]),
        }
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        match self {
            Region::All => true,
            Region::Ball { center, radius, open } => {
                let d = p.dist(center);
                if *open {
                    d < *radius
                } else {
                    d <= *radius
                }
            }
            Region::Box { bx, open } => {
                if *open {
                    bx.contains_open(p)
                } else {
                    bx.contains(p)
                }
            }
            Region::Scaled { domain, r, open } => {
                if *open {
                    domain.contains_open_scaled(p, *r)
                } else {
                    domain.contains_scaled(p, *r)
                }
            }
            Region::Not(r) => !r.contains(p),
            Region::And(rs) => rs.iter().all(|r| r.contains(p)),
        }
    }

    /// Bounding box of a bounded region, `None` when unbounded.
    pub fn bbox(&self, n: usize) -> Option<Aabb<T>> {
        match self {
            Region::All | Region::Not(_) => None,
            Region::Ball { center, radius, .. } => {
                Some(Aabb::new(n, *center, *center).expand(*radius))
            }
            Region::Box { bx, .. } => Some(*bx),
            Region::Scaled { domain, r, .. } => {
                let boxes = domain.boxes::<T>();
                let mut hi: Point<T> = Point::zero();
                for b in &boxes {
                    for i in 0..n {
                        hi[i] = hi[i].max(b.hi[i] * *r);
                    }
                }
                Some(Aabb::new(n, Point::zero() - hi, hi))
            }
            Region::And(rs) => {
                let mut out: Option<Aabb<T>> = None;
                for r in rs {
                    if let Some(b) = r.bbox(n) {
                        out = Some(match out {
                            None => b,
                            Some(o) => {
                                let mut c = o;
                                for i in 0..n {
                                    c.lo[i] = c.lo[i].max(b.lo[i]);
                                    c.hi[i] = c.hi[i].min(b.hi[i]);
                                }
                                c
                            }
                        });
                    }
                }
                out
            }
        }
    }

    /// Parameter intervals of `a + s (b - a)`, `s in [0, 1]`, lying in the
    /// region, sorted and merged. Endpoint openness is not tracked.
    pub fn segment_intervals(&self, a: &Point<T>, b: &Point<T>) -> Vec<(T, T)> {
        match self {
            Region::All => vec![(T::zero(), T::one())],
            Region::Ball { center, radius, .. } => {
                let d = *b - *a;
                let w = *a - *center;
                let qa = d.norm2();
                let qb = lit::<T>(2.0) * d.dot(&w);
                let qc = w.norm2() - *radius * *radius;
                if qa == T::zero() {
                    return if qc <= T::zero() { vec![(T::zero(), T::one())] } else { vec![] };
                }
                let disc = qb * qb - lit::<T>(4.0) * qa * qc;
                if disc < T::zero() {
                    return vec![];
                }
                let sq = disc.sqrt();
                let t0 = ((-qb - sq) / (lit::<T>(2.0) * qa)).max(T::zero());
                let t1 = ((-qb + sq) / (lit::<T>(2.0) * qa)).min(T::one());
                if t0 <= t1 {
                    vec![(t0, t1)]
                } else {
                    vec![]
                }
            }
            Region::Box { bx, open } => clip_segment_box(a, b, bx, *open).into_iter().collect(),
            Region::Scaled { domain, r, open } => {
                let mut iv = Vec::new();
                for bx in domain.boxes::<T>() {
                    let sb = scale_box(&bx, *r);
                    if let Some(v) = clip_segment_box(a, b, &sb, *open) {
                        iv.push(v);
                    }
                }
                merge_intervals(iv)
            }
            Region::Not(r) => complement_intervals(&r.segment_intervals(a, b)),
            Region::And(rs) => {
                let mut cur = vec![(T::zero(), T::one())];
                for r in rs {
                    if cur.is_empty() {
                        break;
                    }
                    cur = intersect_intervals(&cur, &r.segment_intervals(a, b));
                }
                cur
            }
        }
    }

    /// Convex pieces of a planar convex polygon inside the region. Pieces may
    /// overlap only along shared boundaries or where the region itself is a
    /// union; ball boundaries crossing the polygon are unsupported.
    pub fn polygon_pieces(&self, poly: &[Point<T>]) -> Result<Vec<Polygon<T>>> {
        let whole = || -> Vec<Polygon<T>> { vec![poly.iter().copied().collect()] };
        match self {
            Region::All => Ok(whole()),
            Region::Ball { center, radius, .. } => {
                if poly.iter().all(|p| p.dist(center) <= *radius) {
                    Ok(whole())
                } else if poly_dist(poly, center) > *radius {
                    Ok(vec![])
                } else {
                    Err(Error::Unsupported("polygon crossing a ball boundary".into()))
                }
            }
            Region::Box { bx, open } => {
                let c = clip_polygon_box(poly, bx, *open);
                Ok(if c.len() >= 3 { vec![c] } else { vec![] })
            }
            Region::Scaled { domain, r, open } => {
                let mut out = Vec::new();
                for bx in domain.boxes::<T>() {
                    let c = clip_polygon_box(poly, &scale_box(&bx, *r), *open);
                    if c.len() >= 3 {
                        out.push(c);
                    }
                }
                Ok(out)
            }
            Region::Not(inner) => inner.polygon_complement(poly),
            Region::And(rs) => {
                let mut cur = whole();
                for r in rs {
                    let mut next = Vec::new();
                    for p in &cur {
                        next.extend(r.polygon_pieces(p)?);
                    }
                    cur = next;
                    if cur.is_empty() {
                        break;
                    }
                }
                Ok(cur)
            }
        }
    }

    fn polygon_complement(&self, poly: &[Point<T>]) -> Result<Vec<Polygon<T>>> {
        let whole = || -> Vec<Polygon<T>> { vec![poly.iter().copied().collect()] };
        match self {
            Region::All => Ok(vec![]),
            Region::Ball { center, radius, .. } => {
                if poly_dist(poly, center) >= *radius {
                    Ok(whole())
                } else if poly.iter().all(|p| p.dist(center) < *radius) {
                    Ok(vec![])
                } else {
                    Err(Error::Unsupported("polygon crossing a ball boundary".into()))
                }
            }
            Region::Box { bx, open } => Ok(subtract_box(poly, bx, !*open)),
            Region::Scaled { domain, r, open } => {
                let mut cur = whole();
                for bx in domain.boxes::<T>() {
                    let sb = scale_box(&bx, *r);
                    let mut next = Vec::new();
                    for p in &cur {
                        next.extend(subtract_box(p, &sb, !*open));
                    }
                    cur = next;
                    if cur.is_empty() {
                        break;
                    }
                }
                Ok(cur)
            }
            Region::Not(inner) => inner.polygon_pieces(poly),
            Region::And(rs) => {
                let mut out = Vec::new();
                for r in rs {
                    out.extend(r.polygon_complement(poly)?);
                }
                Ok(out)
            }
        }
    }

    /// Exact placement of a closed box (cells of the adaptive grids).
    pub fn classify(&self, bx: &Aabb<T>) -> Placement {
        let n = bx.n;
        match self {
            Region::All => Placement::Inside,
            Region::Ball { center, radius, open } => {
                let near = bx.dist_point(center);
                let far = bx.far_dist_point(center);
                let (inside, outside) = if *open {
                    (far < *radius, near >= *radius)
                } else {
                    (far <= *radius, near > *radius)
                };
                if inside {
                    Placement::Inside
                } else if outside {
                    Placement::Outside
                } else {
                    Placement::Partial
                }
            }
            Region::Box { bx: r, open } => {
                let inside = (0..n).all(|i| {
                    if *open {
                        bx.lo[i] > r.lo[i] && bx.hi[i] < r.hi[i]
                    } else {
                        bx.lo[i] >= r.lo[i] && bx.hi[i] <= r.hi[i]
                    }
                });
                let outside = (0..n).any(|i| {
                    if *open {
                        bx.hi[i] <= r.lo[i] || bx.lo[i] >= r.hi[i]
                    } else {
                        bx.hi[i] < r.lo[i] || bx.lo[i] > r.hi[i]
                    }
                });
                if inside {
                    Placement::Inside
                } else if outside {
                    Placement::Outside
                } else {
                    Placement::Partial
                }
            }
            Region::Scaled { domain, r, open } => {
                // the scaled domain is a union of boxes symmetric in every
                // coordinate, so the extreme corners decide
                let mut far = Point::zero();
                let mut near = Point::zero();
                for i in 0..n {
                    far[i] = bx.lo[i].abs().max(bx.hi[i].abs());
                    near[i] = if bx.lo[i] <= T::zero() && bx.hi[i] >= T::zero() {
                        T::zero()
                    } else {
                        bx.lo[i].abs().min(bx.hi[i].abs())
                    };
                }
                let has = |p: &Point<T>| {
                    if *open {
                        domain.contains_open_scaled(p, *r)
                    } else {
                        domain.contains_scaled(p, *r)
                    }
                };
                if has(&far) {
                    Placement::Inside
                } else if !has(&near) {
                    Placement::Outside
                } else {
                    Placement::Partial
                }
            }
            Region::Not(r) => match r.classify(bx) {
                Placement::Inside => Placement::Outside,
                Placement::Outside => Placement::Inside,
                Placement::Partial => Placement::Partial,
            },
            Region::And(rs) => {
                let mut all_in = true;
                for r in rs {
                    match r.classify(bx) {
                        Placement::Outside => return Placement::Outside,
                        Placement::Partial => all_in = false,
                        Placement::Inside => {}
                    }
                }
                if all_in {
                    Placement::Inside
                } else {
                    Placement::Partial
                }
            }
        }
    }
}

fn scale_box<T: Scalar>(b: &Aabb<T>, r: T) -> Aabb<T> {
    Aabb::new(b.n, b.lo * r, b.hi * r)
}

fn poly_dist<T: Scalar>(poly: &[Point<T>], p: &Point<T>) -> T {
    if poly.len() < 3 {
        return poly.iter().map(|q| q.dist(p)).fold(T::infinity(), T::min);
    }
    (1..poly.len() - 1)
        .map(|i| dist_point_triangle(p, &poly[0], &poly[i], &poly[i + 1]))
        .fold(T::infinity(), T::min)
}

/// `poly \ box`, as disjoint convex pieces (one per violated face).
/// `closed_box` removes the closed box, otherwise the open one.
fn subtract_box<T: Scalar>(poly: &[Point<T>], bx: &Aabb<T>, closed_box: bool) -> Vec<Polygon<T>> {
    let mut out = Vec::new();
    let mut rest: Polygon<T> = poly.iter().copied().collect();
    for i in 0..bx.n {
        for (c, s) in [(bx.lo[i], -T::one()), (bx.hi[i], T::one())] {
            if rest.len() < 3 {
                return out;
            }
            let h = HalfSpace::axis(i, c, s);
            let outside = clip_polygon(&rest, &h, closed_box);
            if outside.len() >= 3 {
                out.push(outside);
            }
            let flipped = HalfSpace { origin: h.origin, normal: h.normal * -T::one() };
            rest = clip_polygon(&rest, &flipped, false);
        }
    }
    out
}

pub fn merge_intervals<T: Scalar>(mut iv: Vec<(T, T)>) -> Vec<(T, T)> {
    iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<(T, T)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        if let Some(last) = out.last_mut() {
            if a <= last.1 {
                last.1 = last.1.max(b);
                continue;
            }
        }
        out.push((a, b));
    }
    out
}

fn complement_intervals<T: Scalar>(iv: &[(T, T)]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    let mut cur = T::zero();
    for &(a, b) in iv {
        if a > cur {
            out.push((cur, a));
        }
        cur = cur.max(b);
    }
    if cur < T::one() {
        out.push((cur, T::one()));
    }
    out
}

fn intersect_intervals<T: Scalar>(a: &[(T, T)], b: &[(T, T)]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polygon_area;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::from_f64(&[x, y])
    }

    #[test]
    fn annulus_intervals() {
        let r = Region::annulus(p(0.0, 0.0), 1.0, 2.0);
        let iv = r.segment_intervals(&p(-3.0, 0.0), &p(3.0, 0.0));
        let len: f64 = iv.iter().map(|(a, b)| (b - a) * 6.0).sum();
        assert!((len - 2.0).abs() < 1e-12);
    }

    #[test]
    fn box_subtraction_area() {
        let sq = [p(0.0, 0.0), p(4.0, 0.0), p(4.0, 4.0), p(0.0, 4.0)];
        let hole = Aabb::new(2, p(1.0, 1.0), p(2.0, 3.0));
        let r = Region::closed_box(hole).not();
        let pieces = r.polygon_pieces(&sq).unwrap();
        let a: f64 = pieces.iter().map(|q| polygon_area(q)).sum();
        assert!((a - 14.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_domain_classify() {
        let d = Arc::new(Domain::from_boxes(2, 1, &[vec![1, 1]]).unwrap());
        let r = Region::scaled(&d, 1.0);
        let inside = Aabb::new(2, p(0.0, 0.0), p(0.5, 0.5));
        let outside = Aabb::new(2, p(0.6, 0.0), p(0.7, 0.1));
        let partial = Aabb::new(2, p(0.4, 0.4), p(0.7, 0.7));
        assert_eq!(r.classify(&inside), Placement::Inside);
        assert_eq!(r.classify(&outside), Placement::Outside);
        assert_eq!(r.classify(&partial), Placement::Partial);
        assert_eq!(Region::scaled_open(&d, 1.0).classify(&inside), Placement::Partial);
    }
}
