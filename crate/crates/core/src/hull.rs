//! Exact convex hulls, hull intersection and the overlap predicate.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

pub type Point = (Rational, Rational);

/// Sign of the cross product (b-a) x (c-a): positive for a left turn.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Ordering {
    let v = (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0);
    v.cmp(&Rational::zero())
}

/// Strict convex hull in counterclockwise order via monotone chain.
/// Collinear boundary points are dropped. Degenerate inputs yield a single
/// point or the two endpoints of the common segment.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in pts.iter() {
        while lower.len() >= 2
            && orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p) != Ordering::Greater
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p) != Ordering::Greater
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Closed half-plane `n . x >= c`.
#[derive(Clone, Debug)]
struct HalfPlane {
    n: (Rational, Rational),
    c: Rational,
}

impl HalfPlane {
    fn side(&self, p: &Point) -> Rational {
        &self.n.0 * &p.0 + &self.n.1 * &p.1 - &self.c
    }
}

fn dot_halfplane(origin: &Point, dir: (Rational, Rational)) -> HalfPlane {
    let c = &dir.0 * &origin.0 + &dir.1 * &origin.1;
    HalfPlane { n: dir, c }
}

/// A hull (point, segment or CCW polygon) as an intersection of closed
/// half-planes.
fn half_planes(hull: &[Point]) -> Vec<HalfPlane> {
    match hull.len() {
        0 => vec![],
        1 => {
            let p = &hull[0];
            vec![
                dot_halfplane(p, (Rational::from_integer(1.into()), Rational::zero())),
                dot_halfplane(p, (Rational::from_integer((-1).into()), Rational::zero())),
                dot_halfplane(p, (Rational::zero(), Rational::from_integer(1.into()))),
                dot_halfplane(p, (Rational::zero(), Rational::from_integer((-1).into()))),
            ]
        }
        2 => {
            let (u, v) = (&hull[0], &hull[1]);
            let d = (&v.0 - &u.0, &v.1 - &u.1);
            let perp = (-d.1.clone(), d.0.clone());
            let nperp = (d.1.clone(), -d.0.clone());
            vec![
                // both closed sides of the supporting line
                dot_halfplane(u, perp),
                dot_halfplane(u, nperp),
                // between the endpoints
                dot_halfplane(u, (d.0.clone(), d.1.clone())),
                dot_halfplane(v, (-d.0.clone(), -d.1.clone())),
            ]
        }
        _ => hull
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let v = &hull[(i + 1) % hull.len()];
                // inside (left of u->v): perp(v-u) . x >= perp(v-u) . u
                let d = (&v.0 - &u.0, &v.1 - &u.1);
                dot_halfplane(u, (-d.1.clone(), d.0.clone()))
            })
            .collect(),
    }
}

/// Clip a cyclic point list by one half-plane (Sutherland-Hodgman step).
fn clip(subject: &[Point], h: &HalfPlane) -> Vec<Point> {
    if subject.is_empty() {
        return vec![];
    }
    if subject.len() == 1 {
        return if !h.side(&subject[0]).is_negative() { subject.to_vec() } else { vec![] };
    }
    let mut out = Vec::new();
    for i in 0..subject.len() {
        let cur = &subject[i];
        let nxt = &subject[(i + 1) % subject.len()];
        let sc = h.side(cur);
        let sn = h.side(nxt);
        let cur_in = !sc.is_negative();
        let nxt_in = !sn.is_negative();
        if cur_in {
            out.push(cur.clone());
        }
        if cur_in != nxt_in {
            // exact crossing point of segment cur->nxt with the boundary
            let denom = &sn - &sc;
            let t = -&sc / &denom;
            let x = &cur.0 + &t * (&nxt.0 - &cur.0);
            let y = &cur.1 + &t * (&nxt.1 - &cur.1);
            out.push((x, y));
        }
    }
    out
}

/// Distinct points of the intersection of two hulls. The result is only used
/// to distinguish empty / single point / larger intersections, so duplicate
/// and collinear vertices are simply deduplicated.
fn intersection_points(hull_a: &[Point], hull_b: &[Point]) -> Vec<Point> {
    if hull_a.is_empty() || hull_b.is_empty() {
        return vec![];
    }
    let mut subject: Vec<Point> = hull_a.to_vec();
    for h in half_planes(hull_b) {
        subject = clip(&subject, &h);
        if subject.is_empty() {
            return vec![];
        }
    }
    let mut distinct: Vec<Point> = Vec::new();
    for p in subject {
        if !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    distinct
}

/// Relative-interior membership: open polygon interior, open segment, or the
/// point itself for degenerate hulls.
fn in_relative_interior(hull: &[Point], x: &Point) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == *x,
        2 => {
            let (u, v) = (&hull[0], &hull[1]);
            if orient(u, v, x) != Ordering::Equal {
                return false;
            }
            let d = (&v.0 - &u.0, &v.1 - &u.1);
            let t_num = &d.0 * (&x.0 - &u.0) + &d.1 * (&x.1 - &u.1);
            let len2 = &d.0 * &d.0 + &d.1 * &d.1;
            t_num.is_positive() && t_num < len2
        }
        _ => (0..hull.len()).all(|i| {
            orient(&hull[i], &hull[(i + 1) % hull.len()], x) == Ordering::Greater
        }),
    }
}

/// Do the convex hulls of `a` and `b` overlap?
///
/// A single shared point does not count as overlap unless it lies in the
/// relative interior of both hulls (so a proper segment crossing counts, a
/// corner touching a boundary does not); any larger intersection counts.
pub fn hulls_overlap(a: &[Point], b: &[Point]) -> bool {
    let ha = convex_hull(a);
    let hb = convex_hull(b);
    let inter = intersection_points(&ha, &hb);
    match inter.len() {
        0 => false,
        1 => in_relative_interior(&ha, &inter[0]) && in_relative_interior(&hb, &inter[0]),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn pt(x: i64, y: i64) -> Point {
        (rat_int(x), rat_int(y))
    }

    #[test]
    fn parallel_segments_do_not_overlap() {
        let a = [pt(0, 0), pt(1, 0)];
        let b = [pt(0, 1), pt(1, 1)];
        assert!(!hulls_overlap(&a, &b));
    }

    #[test]
    fn crossing_segments_overlap() {
        let a = [pt(0, 0), pt(2, 2)];
        let b = [pt(0, 2), pt(2, 0)];
        assert!(hulls_overlap(&a, &b));
    }

    #[test]
    fn triangle_containing_point_overlaps() {
        let a = [pt(0, 0), pt(4, 0), pt(0, 4)];
        let b = [pt(1, 1), pt(9, 9)];
        assert!(hulls_overlap(&a, &b));
    }

    #[test]
    fn single_touching_corner_is_not_overlap() {
        let a = [pt(0, 0), pt(2, 0), pt(0, 2)];
        let b = [pt(1, 1), pt(3, 1), pt(1, 3)];
        // hulls touch along the segment x+y=2? No: b's corner (1,1) lies on
        // a's hypotenuse; intersection is that single boundary point.
        assert!(!hulls_overlap(&a, &b));
    }

    #[test]
    fn segment_endpoint_touch_is_not_overlap() {
        let a = [pt(0, 0), pt(1, 1)];
        let b = [pt(1, 1), pt(2, 0)];
        assert!(!hulls_overlap(&a, &b));
    }

    #[test]
    fn nested_hulls_overlap() {
        let a = [pt(0, 0), pt(10, 0), pt(10, 10), pt(0, 10)];
        let b = [pt(2, 2), pt(3, 2), pt(3, 3)];
        assert!(hulls_overlap(&a, &b));
    }

    #[test]
    fn shared_boundary_segment_is_overlap() {
        let a = [pt(0, 0), pt(4, 0), pt(0, 4)];
        let b = [pt(1, 0), pt(3, 0), pt(2, -2)];
        assert!(hulls_overlap(&a, &b));
    }

    #[test]
    fn point_inside_segment_overlaps() {
        let a = [(rat(1, 2), rat_int(0))];
        let b = [pt(0, 0), pt(1, 0)];
        assert!(hulls_overlap(&a, &b));
    }

    #[test]
    fn point_at_segment_end_does_not_overlap() {
        let a = [pt(0, 0)];
        let b = [pt(0, 0), pt(1, 0)];
        assert!(hulls_overlap(&a, &b) == false);
    }

    #[test]
    fn hull_of_collinear_points_is_a_segment() {
        let pts = [pt(0, 0), pt(1, 1), pt(2, 2), pt(3, 3)];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![pt(0, 0), pt(3, 3)]);
    }

    #[test]
    fn separated_squares_do_not_overlap() {
        let a = [pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)];
        let b = [pt(3, 0), pt(4, 0), pt(4, 1), pt(3, 1)];
        assert!(!hulls_overlap(&a, &b));
    }
}
