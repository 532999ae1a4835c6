//! Exact distance-geometry predicates.
//!
//! Everything here works on squared rational lengths. Sums of (generally
//! irrational) lengths or triangle areas are compared by sign-careful
//! repeated squaring, never by evaluating square roots.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Sixteen times the squared triangle area from squared side lengths:
/// `2(x²y² + y²z² + z²x²) − (x⁴ + y⁴ + z⁴)` for squared sides `x², y², z²`.
///
/// Negative output means the squared triangle inequality is violated, which
/// callers treat as evidence of an impossible (non-planar) length set.
pub fn heron16(x2: &Rational, y2: &Rational, z2: &Rational) -> Rational {
    let xy = x2 * y2;
    let yz = y2 * z2;
    let zx = z2 * x2;
    let sq = x2 * x2 + y2 * y2 + z2 * z2;
    (xy + yz + zx) * Rational::from_integer(2.into()) - sq
}

/// Exact ordering of `√s + √t` versus `√u + √v` for nonnegative rationals.
pub fn cmp_sqrt_sum(s: &Rational, t: &Rational, u: &Rational, v: &Rational) -> Ordering {
    debug_assert!(
        !s.is_negative() && !t.is_negative() && !u.is_negative() && !v.is_negative(),
        "cmp_sqrt_sum takes squared (nonnegative) quantities"
    );
    // (√s+√t)² = s+t+2√(st); likewise for the right side. Both sides are
    // nonnegative, so comparing squares preserves the order.
    let d = s + t - u - v;
    let p = s * t; // (√s·√t)²
    let q = u * v;
    cmp_shifted_root(&d, &p, &q)
}

/// Ordering of `d + 2√p` versus `2√q` with `p, q >= 0`.
fn cmp_shifted_root(d: &Rational, p: &Rational, q: &Rational) -> Ordering {
    let four = Rational::from_integer(4.into());
    let sixteen = Rational::from_integer(16.into());
    if !d.is_negative() {
        // Both sides nonnegative: square once more.
        // (d + 2√p)² = d² + 4p + 4d√p  vs  4q
        let m = &four * q - d * d - &four * p;
        if m.is_negative() {
            return Ordering::Greater;
        }
        // 4d√p vs m, both nonnegative: compare squares.
        let lhs = &sixteen * (d * d) * p;
        let rhs = &m * &m;
        lhs.cmp(&rhs)
    } else {
        // 2√p vs 2√q - d with the right side strictly positive.
        // Square: 4p vs 4q + d² - 4d√q, i.e. (4p - 4q - d²) vs -4d√q.
        let m = &four * p - &four * q - d * d;
        if m.is_negative() {
            return Ordering::Less;
        }
        let lhs = &m * &m;
        let rhs = &sixteen * (d * d) * q;
        lhs.cmp(&rhs)
    }
}

/// Exactly decide `√w == √x + √y + √z` for nonnegative rationals.
///
/// Derivation: squaring twice collapses the three cross roots into rational
/// quantities. The candidate identities introduced by squaring correspond to
/// sign-flipped combinations; callers restrict `w` to the maximal value and
/// the `m >= 0`, `u >= 0` guards reject all of them (the flipped variants
/// force a degenerate zero, where the equality is genuine anyway).
fn sqrt_eq_sum3(w: &Rational, x: &Rational, y: &Rational, z: &Rational) -> bool {
    let two = Rational::from_integer(2.into());
    let m = w - x - y - z;
    if m.is_negative() {
        return false;
    }
    // s = m/2 is the candidate value of √(xy) + √(yz) + √(zx).
    let s = &m / &two;
    let pairs = x * y + y * z + z * x;
    // u = (s² - pairs)/2 is the candidate value of x√(yz) + y√(xz) + z√(xy).
    let u = (&s * &s - &pairs) / &two;
    if u.is_negative() {
        return false;
    }
    let xyz = x * y * z;
    let rhs = &xyz * (x + y + z) + &two * &xyz * &s;
    &u * &u == rhs
}

/// Six squared lengths among four labeled points `p, a, b, r`.
#[derive(Clone, Debug)]
pub struct QuadDistances {
    pub pa2: Rational,
    pub pb2: Rational,
    pub pr2: Rational,
    pub ab2: Rational,
    pub ar2: Rational,
    pub br2: Rational,
}

impl QuadDistances {
    /// Squared-area quantities of the four triangles, indexed by the omitted
    /// point in the order `[p, a, b, r]`.
    fn herons(&self) -> [Rational; 4] {
        [
            heron16(&self.ab2, &self.br2, &self.ar2), // triangle a,b,r
            heron16(&self.pb2, &self.br2, &self.pr2), // triangle p,b,r
            heron16(&self.pa2, &self.ar2, &self.pr2), // triangle p,a,r
            heron16(&self.pa2, &self.ab2, &self.pb2), // triangle p,a,b
        ]
    }
}

/// Which of the four labeled points is involved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadPoint {
    P,
    A,
    B,
    R,
}

const QUAD_POINTS: [QuadPoint; 4] = [QuadPoint::P, QuadPoint::A, QuadPoint::B, QuadPoint::R];

/// Shape of the quadrilateral spanned by four mutually adjacent points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadShape {
    Convex,
    /// The named point lies inside (or on the boundary of) the triangle of
    /// the other three.
    Concave(QuadPoint),
    /// The six lengths admit no planar realization.
    Inconsistent,
}

/// Classify the quadrilateral on `p, a, b, r` from squared lengths alone.
///
/// Concavity is recognized by one triangle area equaling the sum of the
/// other three; convexity by a balanced two-plus-two split of the areas.
/// Anything else cannot come from planar points.
pub fn quad_shape(q: &QuadDistances) -> QuadShape {
    let h = q.herons();
    if h.iter().any(|x| x.is_negative()) {
        return QuadShape::Inconsistent;
    }
    let max = h.iter().max().expect("four entries");
    let max = max.clone();
    for (i, point) in QUAD_POINTS.iter().enumerate() {
        if h[i] == max {
            let others: Vec<&Rational> =
                (0..4).filter(|&j| j != i).map(|j| &h[j]).collect();
            if sqrt_eq_sum3(&h[i], others[0], others[1], others[2]) {
                return QuadShape::Concave(*point);
            }
        }
    }
    // 2+2 balances: {p,a|b,r}, {p,b|a,r}, {p,r|a,b}.
    let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    for ((i, j), (k, l)) in pairings {
        if cmp_sqrt_sum(&h[i], &h[j], &h[k], &h[l]) == Ordering::Equal {
            return QuadShape::Convex;
        }
    }
    QuadShape::Inconsistent
}

/// Relation of `p` and `r` to the line through `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideResult {
    SameSide,
    OppositeSide,
    Inconsistent,
}

/// Decide from squared lengths whether `p` and `r` lie on the same side of
/// the line through `a` and `b`. A point exactly on the line counts as
/// `SameSide`.
pub fn same_side(q: &QuadDistances) -> SideResult {
    let h = q.herons();
    if h.iter().any(|x| x.is_negative()) {
        return SideResult::Inconsistent;
    }
    // h[3] = triangle p,a,b: zero means p lies on the line through a,b.
    // h[0] = triangle a,b,r: zero means r lies on the line.
    if h[3].is_zero() || h[0].is_zero() {
        return SideResult::SameSide;
    }
    match quad_shape(q) {
        QuadShape::Inconsistent => SideResult::Inconsistent,
        QuadShape::Concave(QuadPoint::A) | QuadShape::Concave(QuadPoint::B) => {
            SideResult::OppositeSide
        }
        QuadShape::Concave(_) => SideResult::SameSide,
        QuadShape::Convex => {
            // p and r sit on opposite corners exactly when |rp| + |ab| is the
            // strictly largest of the three pair sums.
            let first = cmp_sqrt_sum(&q.pr2, &q.ab2, &q.ar2, &q.pb2);
            let second = cmp_sqrt_sum(&q.pr2, &q.ab2, &q.br2, &q.pa2);
            if first == Ordering::Greater && second == Ordering::Greater {
                SideResult::OppositeSide
            } else {
                SideResult::SameSide
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int, sq_dist, Rational};

    fn quad_from_coords(
        p: (Rational, Rational),
        a: (Rational, Rational),
        b: (Rational, Rational),
        r: (Rational, Rational),
    ) -> QuadDistances {
        QuadDistances {
            pa2: sq_dist(&p, &a),
            pb2: sq_dist(&p, &b),
            pr2: sq_dist(&p, &r),
            ab2: sq_dist(&a, &b),
            ar2: sq_dist(&a, &r),
            br2: sq_dist(&b, &r),
        }
    }

    fn pt(x: i64, y: i64) -> (Rational, Rational) {
        (rat_int(x), rat_int(y))
    }

    #[test]
    fn heron_on_right_triangle() {
        assert_eq!(heron16(&rat_int(9), &rat_int(16), &rat_int(25)), rat_int(576));
    }

    #[test]
    fn heron_degenerate_collinear() {
        assert_eq!(heron16(&rat_int(1), &rat_int(1), &rat_int(4)), rat_int(0));
    }

    #[test]
    fn heron_impossible_triangle_is_negative() {
        assert!(heron16(&rat_int(1), &rat_int(1), &rat_int(9)).is_negative());
    }

    #[test]
    fn sqrt_sum_examples() {
        assert_eq!(
            cmp_sqrt_sum(&rat_int(4), &rat_int(9), &rat_int(25), &rat_int(0)),
            Ordering::Equal
        );
        assert_eq!(
            cmp_sqrt_sum(&rat_int(2), &rat_int(2), &rat_int(9), &rat_int(0)),
            Ordering::Less
        );
        assert_eq!(
            cmp_sqrt_sum(&rat_int(1), &rat_int(1), &rat_int(1), &rat_int(1)),
            Ordering::Equal
        );
        assert_eq!(
            cmp_sqrt_sum(&rat_int(9), &rat_int(0), &rat_int(2), &rat_int(2)),
            Ordering::Greater
        );
        // fractional inputs: √(1/4)+√(1/4) = 1 vs √(1)+√0
        assert_eq!(
            cmp_sqrt_sum(&rat(1, 4), &rat(1, 4), &rat_int(1), &rat_int(0)),
            Ordering::Equal
        );
    }

    #[test]
    fn unit_square_is_convex() {
        let q = quad_from_coords(pt(0, 0), pt(1, 0), pt(0, 1), pt(1, 1));
        assert_eq!(quad_shape(&q), QuadShape::Convex);
    }

    #[test]
    fn interior_point_is_concave() {
        // b = (2,1) inside triangle p(0,0), a(4,0), r(2,3)
        let q = quad_from_coords(pt(0, 0), pt(4, 0), pt(2, 1), pt(2, 3));
        assert_eq!(quad_shape(&q), QuadShape::Concave(QuadPoint::B));
    }

    #[test]
    fn impossible_heron_is_inconsistent() {
        let q = QuadDistances {
            pa2: rat_int(1),
            pb2: rat_int(1),
            pr2: rat_int(9),
            ab2: rat_int(1),
            ar2: rat_int(1),
            br2: rat_int(1),
        };
        assert_eq!(quad_shape(&q), QuadShape::Inconsistent);
        assert_eq!(same_side(&q), SideResult::Inconsistent);
    }

    #[test]
    fn rectangle_diagonal_separates() {
        // line through a(3,0), b(0,4); p(0,0) and r(3,4) on opposite sides
        let q = quad_from_coords(pt(0, 0), pt(3, 0), pt(0, 4), pt(3, 4));
        assert_eq!(same_side(&q), SideResult::OppositeSide);
    }

    #[test]
    fn unit_square_side_line_keeps_p_r_together() {
        // line ab is x = 1; p(0,0), r(0,1) both on the left
        let q = quad_from_coords(pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1));
        assert_eq!(same_side(&q), SideResult::SameSide);
    }

    #[test]
    fn point_on_line_counts_as_same_side() {
        // p lies on the line through a and b
        let q = quad_from_coords(pt(2, 0), pt(0, 0), pt(5, 0), pt(3, 4));
        assert_eq!(same_side(&q), SideResult::SameSide);
    }

    #[test]
    fn collinear_triple_classified_as_concave_middle() {
        // p,a,b on a line with a in the middle, r off the line
        let q = quad_from_coords(pt(0, 0), pt(1, 0), pt(2, 0), pt(1, 2));
        assert_eq!(quad_shape(&q), QuadShape::Concave(QuadPoint::A));
    }

    #[test]
    fn same_side_symmetry() {
        // swapping p<->r and a<->b must not change the answer
        let cases = [
            (pt(0, 0), pt(3, 0), pt(0, 4), pt(3, 4)),
            (pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)),
            (pt(-1, 2), pt(3, 1), pt(0, 4), pt(2, -2)),
        ];
        for (p, a, b, r) in cases {
            let base = same_side(&quad_from_coords(p.clone(), a.clone(), b.clone(), r.clone()));
            let swap_pr = same_side(&quad_from_coords(r.clone(), a.clone(), b.clone(), p.clone()));
            let swap_ab = same_side(&quad_from_coords(p, b, a, r));
            assert_eq!(base, swap_pr);
            assert_eq!(base, swap_ab);
        }
    }
}
