//! Radial projections in dyadic cubes and the skeleton cascade that pushes a
//! set onto the `d`-skeleton of a cubical complex.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use smallvec::smallvec;

use crate::dyadic::{splitmix, DyadicComplex, DyadicCube};
use crate::error::{Error, Result};
use crate::geom::{clip_polygon, clip_segment_halfspace, fan_triangles, Aabb, HalfSpace, Point, Polygon};
use crate::geomset::{union_area, union_length, PolySet, Simplex};
use crate::report::fmt_num;
use crate::scalar::{dyadic_coord, dyadic_len, lit, to_f64, Scalar};

/// Tunables of the cascade.
#[derive(Clone, Debug)]
pub struct FfOptions {
    /// Candidate centers tried per cube (the barycenter counts as the first).
    pub candidates: usize,
    /// Required distance from the center to the set, in units of the cube side.
    pub clearance: f64,
    /// Relative slack when deciding that a `d`-face is fully covered.
    pub full_tol: f64,
}

impl Default for FfOptions {
    fn default() -> Self {
        FfOptions { candidates: 256, clearance: 0.01, full_tol: 1e-9 }
    }
}

/// One radial projection performed by the cascade.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionRecord<T> {
    pub stage: usize,
    pub cube: DyadicCube,
    pub center: Point<T>,
    pub before: T,
    pub after: T,
}

#[derive(Clone, Debug)]
pub struct FfOutput<T> {
    /// Projected set: the full `d`-faces plus everything left in place.
    pub set: PolySet<T>,
    /// `d`-faces kept by the erosion.
    pub full_faces: Vec<DyadicCube>,
    /// Pieces left untouched because they lie on the boundary of `|K|`
    /// (local variant only).
    pub residual: PolySet<T>,
    /// Pieces outside `|K|°`, passed through unchanged (local variant only).
    pub outside: PolySet<T>,
    pub records: Vec<ProjectionRecord<T>>,
}

fn face_dist<T: Scalar>(cube: &DyadicCube, x: &Point<T>, i: usize, up: bool) -> T {
    if up {
        cube.hi::<T>(i) - x[i]
    } else {
        x[i] - cube.lo::<T>(i)
    }
}

/// Half-spaces cutting out the cone over face `(i, up)` seen from `x`.
fn cone<T: Scalar>(cube: &DyadicCube, x: &Point<T>, i: usize, up: bool) -> Vec<HalfSpace<T>> {
    let s = if up { T::one() } else { -T::one() };
    let ai = face_dist(cube, x, i, up);
    let mut e_i = Point::zero();
    e_i[i] = s;
    let mut out = vec![HalfSpace { origin: *x, normal: e_i }];
    for j in cube.axes().filter(|j| *j != i) {
        let mut e_j = Point::zero();
        e_j[j] = T::one();
        let ap = face_dist(cube, x, j, true);
        let am = face_dist(cube, x, j, false);
        out.push(HalfSpace { origin: *x, normal: e_i * ap - e_j * ai });
        out.push(HalfSpace { origin: *x, normal: e_i * am + e_j * ai });
    }
    out
}

/// Rounds coordinates lying within a tiny tolerance of the lattice of scale
/// `m` onto it, and clamps the free coordinates into the cube.
fn snap<T: Scalar>(p: &mut Point<T>, cube: &DyadicCube) {
    let m = cube.scale;
    let h: T = dyadic_len(m);
    let tol = h * T::epsilon().sqrt();
    for i in 0..cube.ambient() {
        let (lo, hi) = (cube.lo::<T>(i), cube.hi::<T>(i));
        let mut v = p[i].max(lo).min(hi);
        let q = (v / h).round();
        if (v - q * h).abs() <= tol {
            v = dyadic_coord(to_f64(q) as i64, m);
        }
        p[i] = v;
    }
}

fn project_with<T: Scalar>(cube: &DyadicCube, x: &Point<T>, y: &Point<T>, i: usize, up: bool) -> Point<T> {
    let s = if up { T::one() } else { -T::one() };
    let ai = face_dist(cube, x, i, up);
    let di = s * (y[i] - x[i]);
    let target = if up { cube.hi::<T>(i) } else { cube.lo::<T>(i) };
    if y[i] == target {
        return *y;
    }
    let mut p = *x + (*y - *x) * (ai / di);
    p[i] = target;
    snap(&mut p, cube);
    p
}

/// Radial projection `Π_{σ,x}` of a single point of the cube onto its
/// relative boundary.
pub fn radial_project_point<T: Scalar>(cube: &DyadicCube, center: &Point<T>, y: &Point<T>) -> Result<Point<T>> {
    check_center(cube, center)?;
    if !cube.aabb::<T>().contains(y) {
        return Err(Error::Precondition("point outside the cube".into()));
    }
    if cube.axes().all(|i| y[i] == center[i]) {
        return Err(Error::Precondition("point coincides with the projection center".into()));
    }
    // exit parameter along the ray is the smallest over the free axes
    let mut best: Option<(T, usize, bool)> = None;
    for i in cube.axes() {
        let d = y[i] - center[i];
        if d == T::zero() {
            continue;
        }
        let up = d > T::zero();
        let t = face_dist(cube, center, i, up) / d.abs();
        if best.is_none_or(|(b, _, _)| t < b) {
            best = Some((t, i, up));
        }
    }
    let (_, i, up) = best.expect("nonzero direction");
    Ok(project_with(cube, center, y, i, up))
}

fn check_center<T: Scalar>(cube: &DyadicCube, x: &Point<T>) -> Result<()> {
    let ok = cube.axes().all(|i| x[i] > cube.lo::<T>(i) && x[i] < cube.hi::<T>(i))
        && cube.flat_axes().all(|i| x[i] == cube.lo::<T>(i));
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition("projection center not in the relative interior of the cube".into()))
    }
}

/// Images of one piece lying in `cube` under the radial projection from `x`.
fn project_piece<T: Scalar>(cube: &DyadicCube, x: &Point<T>, s: &Simplex<T>, out: &mut Vec<Simplex<T>>) {
    let faces: Vec<(usize, bool)> = cube.axes().flat_map(|i| [(i, false), (i, true)]).collect();
    match s.len() {
        1 => {
            let y = s[0];
            for &(i, up) in &faces {
                if cone(cube, x, i, up).iter().all(|h| h.eval(&y) >= T::zero()) {
                    out.push(smallvec![project_with(cube, x, &y, i, up)]);
                    return;
                }
            }
        }
        2 => {
            let (a, b) = (s[0], s[1]);
            for &(i, up) in &faces {
                let mut range = Some((T::zero(), T::one()));
                for h in cone(cube, x, i, up) {
                    range = range.and_then(|r| clip_segment_halfspace(&a, &b, r, &h));
                }
                if let Some((t0, t1)) = range {
                    if t1 > t0 {
                        let p = project_with(cube, x, &a.lerp(&b, t0), i, up);
                        let q = project_with(cube, x, &a.lerp(&b, t1), i, up);
                        if p != q {
                            out.push(smallvec![p, q]);
                        }
                    }
                }
            }
        }
        _ => {
            for &(i, up) in &faces {
                let mut poly: Polygon<T> = s.iter().copied().collect();
                for h in cone(cube, x, i, up) {
                    poly = clip_polygon(&poly, &h, false);
                    if poly.len() < 3 {
                        break;
                    }
                }
                if poly.len() < 3 {
                    continue;
                }
                let img: Vec<Point<T>> = poly.iter().map(|y| project_with(cube, x, y, i, up)).collect();
                for t in fan_triangles(&img, T::zero()) {
                    out.push(t.iter().copied().collect());
                }
            }
        }
    }
}

/// Projects every simplex of `set` (assumed to lie in `cube`) radially from
/// `center` onto the relative boundary of the cube.
pub fn project_set_in_cube<T: Scalar>(set: &PolySet<T>, cube: &DyadicCube, center: &Point<T>) -> Result<PolySet<T>> {
    check_center(cube, center)?;
    if set.n != cube.ambient() {
        return Err(Error::Invalid("set and cube live in different dimensions".into()));
    }
    let bx = cube.aabb::<T>().expand(dyadic_len::<T>(cube.scale) * lit(1e-12));
    if set.dist_to(center) == T::zero() {
        return Err(Error::Precondition("projection center lies on the set".into()));
    }
    let mut out = Vec::new();
    for s in &set.simplices {
        if !s.iter().all(|p| bx.contains(p)) {
            return Err(Error::Precondition("simplex not inside the cube".into()));
        }
        project_piece(cube, center, s, &mut out);
    }
    Ok(PolySet { n: set.n, d: set.d, simplices: out })
}

fn pieces_dist<T: Scalar>(pieces: &[Simplex<T>], p: &Point<T>) -> T {
    pieces
        .iter()
        .map(|s| match s.len() {
            1 => p.dist(&s[0]),
            2 => crate::geom::dist_point_segment(p, &s[0], &s[1]),
            _ => crate::geom::dist_point_triangle(p, &s[0], &s[1], &s[2]),
        })
        .fold(T::infinity(), T::min)
}

/// Center in the relative interior of `cube` at distance at least
/// `clearance * side` from the given pieces, chosen among the barycenter and
/// uniform samples (generator seeded by `(seed, cube)`) to minimize the image
/// measure. Returns the center and the achieved ratio `after / before`.
pub fn find_good_center<T: Scalar>(
    cube: &DyadicCube,
    pieces: &[Simplex<T>],
    seed: u64,
    opts: &FfOptions,
) -> Result<(Point<T>, T)> {
    let h: T = cube.side();
    let need = h * lit(opts.clearance);
    let bary = cube.center::<T>();
    let n = cube.ambient();
    let d = pieces.first().map_or(0, |s| s.len() - 1);
    let before = piece_measure(pieces, n, d);
    if pieces.is_empty() || before <= T::zero() {
        return Ok((bary, T::zero()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ cube.stable_hash()));
    let mut best: Option<(Point<T>, T)> = None;
    for k in 0..opts.candidates.max(1) {
        let p = if k == 0 {
            bary
        } else {
            let mut p = bary;
            for i in cube.axes() {
                // strictly inside: avoid the closed boundary
                let u: f64 = rng.gen_range(0.02..0.98);
                p[i] = cube.lo::<T>(i) + h * lit(u);
            }
            p
        };
        if pieces_dist(pieces, &p) < need {
            continue;
        }
        let mut img = Vec::new();
        for s in pieces {
            project_piece(cube, &p, s, &mut img);
        }
        img.retain(|s| !is_degenerate(s));
        let ratio = piece_measure(&img, n, d) / before;
        if best.as_ref().is_none_or(|(_, r)| ratio < *r) {
            best = Some((p, ratio));
        }
    }
    best.ok_or_else(|| {
        Error::Exhausted(format!(
            "no center with clearance {} in cube {} after {} candidates",
            to_f64(need),
            cube.id(),
            opts.candidates
        ))
    })
}

/// Smallest lattice face (scale `m`) containing a piece, read off its centroid.
pub(crate) fn carrier<T: Scalar>(s: &Simplex<T>, n: usize, m: i32) -> DyadicCube {
    let k: T = lit(s.len() as f64);
    let mut c = Point::zero();
    for p in s {
        c = c + *p;
    }
    let c = c * (T::one() / k);
    let inv = T::one() / dyadic_len::<T>(m);
    let mut corner = [0i64; crate::geom::MAX_DIM];
    let mut axes = Vec::new();
    for i in 0..n {
        let q = c[i] * inv;
        let f = q.floor();
        corner[i] = to_f64(f) as i64;
        if q != f {
            axes.push(i);
        }
    }
    DyadicCube::new(m, &corner[..n], &axes).expect("valid carrier")
}

/// Splits a simplex along every lattice hyperplane of scale `m` it crosses.
pub(crate) fn grid_split<T: Scalar>(s: &Simplex<T>, n: usize, m: i32) -> Vec<Simplex<T>> {
    let h: T = dyadic_len(m);
    let mut cur: Vec<Simplex<T>> = vec![s.clone()];
    if s.len() == 1 {
        return cur;
    }
    for axis in 0..n {
        let mut next = Vec::new();
        for piece in cur {
            let lo = piece.iter().map(|p| p[axis]).fold(T::infinity(), T::min);
            let hi = piece.iter().map(|p| p[axis]).fold(T::neg_infinity(), T::max);
            let c0 = to_f64((lo / h).floor()) as i64;
            let c1 = to_f64((hi / h).ceil()) as i64;
            if lo == hi || c1 - c0 <= 1 {
                next.push(piece);
                continue;
            }
            for c in c0..c1 {
                let a: T = dyadic_coord(c, m);
                let b: T = dyadic_coord(c + 1, m);
                if piece.len() == 2 {
                    let (p, q) = (piece[0], piece[1]);
                    let d = q[axis] - p[axis];
                    let ta = ((a - p[axis]) / d).max(T::zero()).min(T::one());
                    let tb = ((b - p[axis]) / d).max(T::zero()).min(T::one());
                    let (t0, t1) = (ta.min(tb), ta.max(tb));
                    if t1 > t0 {
                        let mut u = p.lerp(&q, t0);
                        let mut v = p.lerp(&q, t1);
                        snap_axis(&mut u, axis, &[a, b]);
                        snap_axis(&mut v, axis, &[a, b]);
                        if t0 == T::zero() {
                            u = p;
                        }
                        if t1 == T::one() {
                            v = q;
                        }
                        next.push(smallvec![u, v]);
                    }
                } else {
                    let mut poly: Polygon<T> = piece.iter().copied().collect();
                    poly = clip_polygon(&poly, &HalfSpace::axis(axis, a, T::one()), false);
                    poly = clip_polygon(&poly, &HalfSpace::axis(axis, b, -T::one()), false);
                    for p in poly.iter_mut() {
                        snap_axis(p, axis, &[a, b]);
                    }
                    for t in fan_triangles(&poly, T::zero()) {
                        next.push(t.iter().copied().collect());
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

fn snap_axis<T: Scalar>(p: &mut Point<T>, axis: usize, planes: &[T]) {
    for &c in planes {
        if (p[axis] - c).abs() <= c.abs().max(T::one()) * T::epsilon() * lit(16.0) {
            p[axis] = c;
        }
    }
}

pub(crate) fn piece_measure<T: Scalar>(pieces: &[Simplex<T>], n: usize, d: usize) -> T {
    match d {
        0 => lit(pieces.len() as f64),
        1 => {
            let segs: Vec<_> = pieces.iter().map(|s| (s[0], s[1])).collect();
            union_length(&segs, n)
        }
        _ => {
            let polys: Vec<Polygon<T>> = pieces.iter().map(|s| s.iter().copied().collect()).collect();
            union_area(&polys, n)
        }
    }
}

pub(crate) fn is_degenerate<T: Scalar>(s: &Simplex<T>) -> bool {
    match s.len() {
        1 => false,
        2 => s[0] == s[1],
        _ => crate::geom::triangle_area(&s[0], &s[1], &s[2]) == T::zero(),
    }
}

/// The face itself as simplices.
pub(crate) fn face_simplices<T: Scalar>(f: &DyadicCube) -> Vec<Simplex<T>> {
    let b = f.aabb::<T>();
    let ax: Vec<usize> = f.axes().collect();
    match ax.len() {
        0 => vec![smallvec![b.lo]],
        1 => vec![smallvec![b.lo, b.hi]],
        _ => {
            let (i, j) = (ax[0], ax[1]);
            let mut p10 = b.lo;
            p10[i] = b.hi[i];
            let mut p01 = b.lo;
            p01[j] = b.hi[j];
            vec![smallvec![b.lo, p10, b.hi], smallvec![b.lo, b.hi, p01]]
        }
    }
}

fn top_cubes_meeting<T: Scalar>(k: &DyadicComplex, bx: &Aabb<T>) -> Vec<DyadicCube> {
    let m = k.scale;
    let n = k.n;
    let inv = T::one() / dyadic_len::<T>(m);
    let lo: Vec<i64> = (0..n).map(|i| to_f64((bx.lo[i] * inv).floor()) as i64 - 1).collect();
    let hi: Vec<i64> = (0..n).map(|i| to_f64((bx.hi[i] * inv).floor()) as i64).collect();
    let mut out = Vec::new();
    let mut idx = lo.clone();
    loop {
        let c = DyadicCube::top(m, &idx);
        if k.contains(&c) {
            out.push(c);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if idx[i] < hi[i] {
                idx[i] += 1;
                break;
            }
            idx[i] = lo[i];
            i += 1;
        }
    }
}

fn meets_interior<T: Scalar>(k: &DyadicComplex, s: &Simplex<T>) -> bool {
    let bx = Aabb::of_points(k.n, s);
    top_cubes_meeting(k, &bx).iter().any(|c| {
        let b = c.aabb::<T>();
        match s.len() {
            1 => b.contains_open(&s[0]),
            2 => crate::geom::clip_segment_box(&s[0], &s[1], &b, true).is_some(),
            _ => crate::geom::clip_polygon_box(s, &b, true).len() >= 3,
        }
    })
}

/// Global cascade: pushes a set contained in `|K|` onto full `d`-faces of `K`.
pub fn ff_project<T: Scalar>(set: &PolySet<T>, k: &DyadicComplex, seed: u64) -> Result<FfOutput<T>> {
    cascade(set, k, seed, &FfOptions::default(), false)
}

/// Local cascade: identity outside `|K|°`; below the top dimension only
/// faces interior to `|K|` are projected or eroded.
pub fn ff_project_local<T: Scalar>(set: &PolySet<T>, k: &DyadicComplex, seed: u64) -> Result<FfOutput<T>> {
    cascade(set, k, seed, &FfOptions::default(), true)
}

pub fn ff_project_with<T: Scalar>(
    set: &PolySet<T>,
    k: &DyadicComplex,
    seed: u64,
    opts: &FfOptions,
    local: bool,
) -> Result<FfOutput<T>> {
    cascade(set, k, seed, opts, local)
}

fn cascade<T: Scalar>(
    set: &PolySet<T>,
    k: &DyadicComplex,
    seed: u64,
    opts: &FfOptions,
    local: bool,
) -> Result<FfOutput<T>> {
    let n = k.n;
    let d = set.d;
    let m = k.scale;
    if set.n != n {
        return Err(Error::Invalid(format!("set in R^{} but complex in R^{n}", set.n)));
    }
    if k.dim() != Some(n) && !k.is_empty() {
        return Err(Error::Invalid("complex must be built from top-dimensional cubes".into()));
    }
    if d >= n {
        return Err(Error::Precondition(format!("set dimension {d} must be below {n}")));
    }
    let empty = PolySet { n, d, simplices: Vec::new() };
    let mut outside = empty.clone();
    let mut residual = empty.clone();
    let mut work: BTreeMap<DyadicCube, Vec<Simplex<T>>> = BTreeMap::new();
    for s in &set.simplices {
        if local && !meets_interior(k, s) {
            outside.simplices.push(s.clone());
            continue;
        }
        for piece in grid_split(s, n, m) {
            if is_degenerate(&piece) {
                continue;
            }
            let c = carrier(&piece, n, m);
            if !k.contains(&c) {
                if local {
                    outside.simplices.push(piece);
                    continue;
                }
                return Err(Error::Precondition(format!("set leaves |K| near cell {}", c.id())));
            }
            work.entry(c).or_default().push(piece);
        }
    }
    let mut records = Vec::new();
    for stage in (d + 1..=n).rev() {
        let jobs: Vec<(DyadicCube, Vec<Simplex<T>>)> = {
            let keys: Vec<DyadicCube> = work
                .keys()
                .filter(|c| c.dim() == stage && (!local || stage == n || k.is_interior_face(c)))
                .copied()
                .collect();
            keys.into_iter().map(|c| (c, work.remove(&c).unwrap())).collect()
        };
        let results: Vec<Result<(ProjectionRecord<T>, Vec<Simplex<T>>)>> = jobs
            .par_iter()
            .map(|(cube, pieces)| {
                let (x, _) = find_good_center(cube, pieces, seed, opts)?;
                let mut img = Vec::new();
                for s in pieces {
                    project_piece(cube, &x, s, &mut img);
                }
                img.retain(|s| !is_degenerate(s));
                let rec = ProjectionRecord {
                    stage,
                    cube: *cube,
                    center: x,
                    before: piece_measure(pieces, n, d),
                    after: piece_measure(&img, n, d),
                };
                Ok((rec, img))
            })
            .collect();
        for r in results {
            let (rec, img) = r?;
            records.push(rec);
            for s in img {
                let c = carrier(&s, n, m);
                work.entry(c).or_default().push(s);
            }
        }
    }
    let mut full_faces = Vec::new();
    let mut out = empty.clone();
    let h: T = dyadic_len(m);
    let full = h.powi(d as i32) * (T::one() - lit(opts.full_tol));
    for (face, pieces) in work {
        let eligible = !local || face.dim() == n || k.is_interior_face(&face);
        if face.dim() > d || !eligible {
            // left in place on the boundary of |K| (local variant)
            residual.simplices.extend(pieces);
            continue;
        }
        if face.dim() < d {
            continue;
        }
        let cover = piece_measure(&pieces, n, d);
        if d == 0 || cover >= full {
            full_faces.push(face);
            out.simplices.extend(face_simplices::<T>(&face));
        } else {
            // a radial projection from an uncovered point would collapse these
            // pieces onto the (d-1)-skeleton, which carries no d-measure
            records.push(ProjectionRecord {
                stage: d,
                cube: face,
                center: face.center(),
                before: cover,
                after: T::zero(),
            });
        }
    }
    out.simplices.extend(residual.simplices.iter().cloned());
    out.simplices.extend(outside.simplices.iter().cloned());
    Ok(FfOutput { set: out, full_faces, residual, outside, records })
}

/// CSV of projection records: `stage,cube,center,before,after`.
pub fn records_csv<T: Scalar>(records: &[ProjectionRecord<T>]) -> String {
    let mut s = String::from("stage,cube,center,before,after\n");
    for r in records {
        let c: Vec<String> = (0..r.cube.ambient()).map(|i| fmt_num(to_f64(r.center[i]))).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.stage,
            r.cube.id(),
            c.join(" "),
            fmt_num(to_f64(r.before)),
            fmt_num(to_f64(r.after))
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::from_f64(&[x, y])
    }

    #[test]
    fn projection_from_center() {
        let sq = DyadicCube::top(0, &[0, 0]);
        let e = PolySet::from_segments(2, &[(p(0.25, 0.75), p(0.75, 0.75))]);
        let img = project_set_in_cube(&e, &sq, &p(0.5, 0.5)).unwrap();
        assert!((img.total_measure() - 1.0).abs() < 1e-12);
        let img = project_set_in_cube(&e, &sq, &p(0.5, 0.1)).unwrap();
        assert!((img.total_measure() - 9.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_center_beats_barycenter() {
        let cube = DyadicCube::top(0, &[0, 0]);
        let piece: Simplex<f64> = smallvec![p(0.25, 0.75), p(0.75, 0.75)];
        let (_, ratio) = find_good_center(&cube, &[piece], 7, &FfOptions::default()).unwrap();
        assert!(ratio <= 1.0 + 1e-12);
        assert!(ratio < 0.75);
    }

    #[test]
    fn boundary_points_fixed() {
        let sq = DyadicCube::top(0, &[0, 0]);
        let y = p(1.0, 0.3);
        assert_eq!(radial_project_point(&sq, &p(0.4, 0.6), &y).unwrap(), y);
        let z = radial_project_point(&sq, &p(0.5, 0.5), &p(0.5, 0.75)).unwrap();
        assert_eq!(z, p(0.5, 1.0));
    }

    #[test]
    fn cascade_gives_full_edges() {
        let k = DyadicComplex::from_top((0..4).flat_map(|i| (0..4).map(move |j| DyadicCube::top(2, &[i, j]))))
            .unwrap();
        let e = PolySet::from_segments(2, &[(p(0.1, 0.13), p(0.9, 0.77)), (p(0.3, 0.9), p(0.35, 0.05))]);
        let out = ff_project(&e, &k, 7).unwrap();
        let h = 0.25;
        for f in &out.full_faces {
            assert_eq!(f.dim(), 1);
            assert!(k.contains(f));
        }
        assert!((out.set.total_measure() - h * out.full_faces.len() as f64).abs() < 1e-12);
        assert!(!out.full_faces.is_empty());
    }
}
