//! Projective and polygonal primitives shared by the rest of the crate.
//!
//! Coordinates follow the image convention: `x` grows to the right and `y`
//! grows downwards. Pixel `(i, j)` covers the unit square `[i, i+1) x [j, j+1)`
//! and is sampled at its center `(i + 0.5, j + 0.5)`.
//!
//! Quadrilaterals are stored clockwise (as seen on screen) starting at the
//! top-left corner, which is the corner with the smallest `x + y` (ties go to
//! the smaller `y`). A clockwise on-screen polygon has a *positive* shoelace
//! sum in this convention.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// The vector rotated by +90 degrees on screen: `(1, 0)` becomes `(0, 1)`.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    #[inline]
    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    #[inline]
    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    #[inline]
    fn div(self, rhs: f64) -> Point {
        Point::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Shoelace area; positive for polygons listed clockwise on screen.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * acc
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    signed_area(poly).abs()
}

fn on_segment(p: Point, a: Point, b: Point, eps: f64) -> bool {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a) <= eps;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t) <= eps
}

/// Even-odd point-in-polygon test; points on the boundary count as inside.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if on_segment(p, a, b, 1e-9) {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True when every turn has the same sign (collinear vertices allowed).
pub fn is_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let scale = poly
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(1.0, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut sign = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let turn = (b - a).cross(c - b);
        if turn.abs() <= eps {
            continue;
        }
        if sign == 0.0 {
            sign = turn.signum();
        } else if turn.signum() != sign {
            return false;
        }
    }
    sign != 0.0
}

fn orientation(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Closed-segment intersection test.
fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let eps = 1e-12;
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if ((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps))
        && ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps))
    {
        return true;
    }
    (o1.abs() <= eps && on_segment(c, a, b, 1e-9))
        || (o2.abs() <= eps && on_segment(d, a, b, 1e-9))
        || (o3.abs() <= eps && on_segment(a, c, d, 1e-9))
        || (o4.abs() <= eps && on_segment(b, c, d, 1e-9))
}

/// True when no two non-adjacent edges touch and no vertex repeats.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if poly[i].distance(poly[j]) <= 1e-12 {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// A quadrilateral stored clockwise from its top-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadBox {
    corners: [Point; 4],
}

impl QuadBox {
    /// Validates and canonicalizes four corners given in either winding.
    pub fn new(corners: [Point; 4]) -> Result<Self> {
        if corners.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateQuad("non-finite corner".into()));
        }
        let [a, b, c, d] = corners;
        if segments_intersect(a, b, c, d) || segments_intersect(b, c, d, a) {
            return Err(Error::DegenerateQuad("self-intersecting quad".into()));
        }
        let quad = Self::canonical(corners);
        let scale = quad.max_edge();
        if quad.area() <= 1e-12 * scale.max(1.0) * scale.max(1.0) {
            return Err(Error::DegenerateQuad("zero area".into()));
        }
        Ok(quad)
    }

    /// Axis-aligned box spanning `[x0, x1] x [y0, y1]`.
    pub fn axis_aligned(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new([
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    /// Reads `x1 y1 x2 y2 x3 y3 x4 y4`.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if coords.len() != 8 {
            return Err(Error::DegenerateQuad(format!(
                "expected 8 coordinates, got {}",
                coords.len()
            )));
        }
        Self::new([
            Point::new(coords[0], coords[1]),
            Point::new(coords[2], coords[3]),
            Point::new(coords[4], coords[5]),
            Point::new(coords[6], coords[7]),
        ])
    }

    /// Reorders the corners without checking area or simplicity. Used for
    /// the zero-height rectangles `min_area_rect` emits for collinear input.
    pub(crate) fn canonical(mut corners: [Point; 4]) -> Self {
        if signed_area(&corners) < 0.0 {
            corners.reverse();
        }
        let mut start = 0;
        for i in 1..4 {
            let s = corners[i].x + corners[i].y;
            let best = corners[start].x + corners[start].y;
            let tol = 1e-9 * (1.0 + best.abs());
            if s < best - tol || ((s - best).abs() <= tol && corners[i].y < corners[start].y) {
                start = i;
            }
        }
        corners.rotate_left(start);
        Self { corners }
    }

    #[inline]
    pub fn corners(&self) -> &[Point; 4] {
        &self.corners
    }

    pub fn top_left(&self) -> Point {
        self.corners[0]
    }
    pub fn top_right(&self) -> Point {
        self.corners[1]
    }
    pub fn bottom_right(&self) -> Point {
        self.corners[2]
    }
    pub fn bottom_left(&self) -> Point {
        self.corners[3]
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.corners)
    }

    pub fn center(&self) -> Point {
        let sum = self
            .corners
            .iter()
            .fold(Point::default(), |acc, &p| acc + p);
        sum / 4.0
    }

    /// Mean length of the top and bottom edges.
    pub fn width(&self) -> f64 {
        0.5 * (self.corners[0].distance(self.corners[1])
            + self.corners[3].distance(self.corners[2]))
    }

    /// Mean length of the left and right edges.
    pub fn height(&self) -> f64 {
        0.5 * (self.corners[0].distance(self.corners[3])
            + self.corners[1].distance(self.corners[2]))
    }

    fn max_edge(&self) -> f64 {
        (0..4)
            .map(|i| self.corners[i].distance(self.corners[(i + 1) % 4]))
            .fold(0.0, f64::max)
    }

    /// Even-odd containment with the boundary counted as inside.
    pub fn contains(&self, p: Point) -> bool {
        point_in_polygon(p, &self.corners)
    }

    pub fn to_flat(&self) -> [f64; 8] {
        let c = &self.corners;
        [
            c[0].x, c[0].y, c[1].x, c[1].y, c[2].x, c[2].y, c[3].x, c[3].y,
        ]
    }

    /// Axis-aligned bounds `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        bounds(&self.corners)
    }
}

pub(crate) fn bounds(points: &[Point]) -> (f64, f64, f64, f64) {
    points.iter().fold(
        (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ),
        |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
    )
}

/// A closed text polygon: the first half of the control points traces one
/// long edge, the second half traces the opposite edge in reverse.
#[derive(Debug, Clone, PartialEq)]
pub struct TextPolygon {
    control_points: Vec<Point>,
}

impl TextPolygon {
    pub fn new(control_points: Vec<Point>) -> Result<Self> {
        let n = control_points.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::OddVertexCount(n));
        }
        if control_points.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegeneratePolygon("non-finite control point".into()));
        }
        if !is_simple(&control_points) {
            return Err(Error::DegeneratePolygon("polygon is not simple".into()));
        }
        Ok(Self { control_points })
    }

    /// Builds the polygon from paired edge points: `top[i]` faces `bottom[i]`.
    pub fn from_edges(top: &[Point], bottom: &[Point]) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::OddVertexCount(top.len() + bottom.len()));
        }
        let mut pts = top.to_vec();
        pts.extend(bottom.iter().rev());
        Self::new(pts)
    }

    pub fn points(&self) -> &[Point] {
        &self.control_points
    }

    /// Number of control-point pairs.
    pub fn pairs(&self) -> usize {
        self.control_points.len() / 2
    }

    /// First long edge, in order.
    pub fn top_edge(&self) -> &[Point] {
        &self.control_points[..self.pairs()]
    }

    /// Opposite long edge, re-reversed so `bottom_edge()[i]` pairs with `top_edge()[i]`.
    pub fn bottom_edge(&self) -> Vec<Point> {
        self.control_points[self.pairs()..]
            .iter()
            .rev()
            .copied()
            .collect()
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.control_points)
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_polygon(p, &self.control_points)
    }
}

impl From<QuadBox> for TextPolygon {
    fn from(q: QuadBox) -> Self {
        Self {
            control_points: q.corners.to_vec(),
        }
    }
}

/// A 3x3 projective transform, row-major, normalized so the bottom-right
/// coefficient is 1 whenever it is nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerspectiveMap {
    m: [f64; 9],
}

const DENOM_EPS: f64 = 1e-12;

impl PerspectiveMap {
    pub const IDENTITY: PerspectiveMap = PerspectiveMap {
        m: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    };

    pub fn from_matrix(m: [f64; 9]) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateQuad("non-finite matrix".into()));
        }
        let map = Self { m: normalize(m) };
        if det3(&map.m).abs() <= 1e-12 {
            return Err(Error::DegenerateQuad("singular projective map".into()));
        }
        Ok(map)
    }

    pub fn coefficients(&self) -> &[f64; 9] {
        &self.m
    }

    /// Homography sending each `src[i]` to `dst[i]`.
    ///
    /// Both point sets are first normalized (centroid at the origin, mean
    /// distance sqrt 2) and the 8x8 system is solved by Gaussian elimination
    /// with partial pivoting.
    pub fn solve(src: &[Point; 4], dst: &[Point; 4]) -> Result<Self> {
        check_quad_points(src)?;
        check_quad_points(dst)?;
        let ts = Similarity::normalizing(src);
        let td = Similarity::normalizing(dst);
        let s = src.map(|p| ts.apply(p));
        let d = dst.map(|p| td.apply(p));

        let mut a = [[0.0f64; 9]; 8];
        for i in 0..4 {
            let (x, y) = (s[i].x, s[i].y);
            let (u, v) = (d[i].x, d[i].y);
            a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u, u];
            a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v, v];
        }
        let h = gauss_solve(&mut a)
            .ok_or_else(|| Error::DegenerateQuad("singular homography system".into()))?;
        let hn = [h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0];
        let m = mul3(&td.inverse_matrix(), &mul3(&hn, &ts.matrix()));
        Self::from_matrix(m)
    }

    /// Maps `p`, failing when the projective denominator vanishes.
    pub fn apply(&self, p: Point) -> Result<Point> {
        self.map_point(p)
            .ok_or(Error::ProjectiveDivideByZero { x: p.x, y: p.y })
    }

    /// Like [`apply`](Self::apply) for hot loops.
    #[inline]
    pub fn map_point(&self, p: Point) -> Option<Point> {
        let m = &self.m;
        let w = m[6] * p.x + m[7] * p.y + m[8];
        if w.abs() <= DENOM_EPS {
            return None;
        }
        Some(Point::new(
            (m[0] * p.x + m[1] * p.y + m[2]) / w,
            (m[3] * p.x + m[4] * p.y + m[5]) / w,
        ))
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = &self.m;
        let det = det3(m);
        if det.abs() <= 1e-12 {
            return Err(Error::DegenerateQuad("singular projective map".into()));
        }
        let adj = [
            m[4] * m[8] - m[5] * m[7],
            m[2] * m[7] - m[1] * m[8],
            m[1] * m[5] - m[2] * m[4],
            m[5] * m[6] - m[3] * m[8],
            m[0] * m[8] - m[2] * m[6],
            m[2] * m[3] - m[0] * m[5],
            m[3] * m[7] - m[4] * m[6],
            m[1] * m[6] - m[0] * m[7],
            m[0] * m[4] - m[1] * m[3],
        ];
        Self::from_matrix(adj.map(|v| v / det))
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &PerspectiveMap) -> Result<Self> {
        Self::from_matrix(mul3(&self.m, &first.m))
    }
}

/// Maps `src` onto `dst`; alias kept close to the operation name used by callers.
pub fn solve_perspective(src: &[Point; 4], dst: &[Point; 4]) -> Result<PerspectiveMap> {
    PerspectiveMap::solve(src, dst)
}

pub fn apply_perspective(m: &PerspectiveMap, p: Point) -> Result<Point> {
    m.apply(p)
}

fn normalize(m: [f64; 9]) -> [f64; 9] {
    if m[8].abs() > DENOM_EPS {
        m.map(|v| v / m[8])
    } else {
        m
    }
}

fn det3(m: &[f64; 9]) -> f64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6])
}

fn mul3(a: &[f64; 9], b: &[f64; 9]) -> [f64; 9] {
    let mut out = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            out[r * 3 + c] = (0..3).map(|k| a[r * 3 + k] * b[k * 3 + c]).sum();
        }
    }
    out
}

fn check_quad_points(pts: &[Point; 4]) -> Result<()> {
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateQuad("non-finite corner".into()));
    }
    let (x0, y0, x1, y1) = bounds(pts);
    let scale = (x1 - x0).max(y1 - y0);
    if scale <= 0.0 {
        return Err(Error::DegenerateQuad("all corners coincide".into()));
    }
    for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        if orientation(pts[i], pts[j], pts[k]).abs() <= 1e-12 * scale * scale {
            return Err(Error::DegenerateQuad(format!(
                "corners {i}, {j}, {k} are collinear"
            )));
        }
    }
    Ok(())
}

/// Uniform scale plus translation used to condition the homography solve.
struct Similarity {
    scale: f64,
    cx: f64,
    cy: f64,
}

impl Similarity {
    fn normalizing(pts: &[Point; 4]) -> Self {
        let c = pts.iter().fold(Point::default(), |acc, &p| acc + p) / 4.0;
        let mean = pts.iter().map(|&p| p.distance(c)).sum::<f64>() / 4.0;
        let scale = if mean > 0.0 {
            std::f64::consts::SQRT_2 / mean
        } else {
            1.0
        };
        Self {
            scale,
            cx: c.x,
            cy: c.y,
        }
    }

    fn apply(&self, p: Point) -> Point {
        Point::new((p.x - self.cx) * self.scale, (p.y - self.cy) * self.scale)
    }

    fn matrix(&self) -> [f64; 9] {
        let s = self.scale;
        [s, 0.0, -s * self.cx, 0.0, s, -s * self.cy, 0.0, 0.0, 1.0]
    }

    fn inverse_matrix(&self) -> [f64; 9] {
        let s = 1.0 / self.scale;
        [s, 0.0, self.cx, 0.0, s, self.cy, 0.0, 0.0, 1.0]
    }
}

/// Solves the augmented 8x9 system in place; `None` when a pivot vanishes.
fn gauss_solve(a: &mut [[f64; 9]; 8]) -> Option<[f64; 8]> {
    const N: usize = 8;
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            let f = row[col] / pivot_row[col];
            if f != 0.0 {
                for (r, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *r -= f * p;
                }
            }
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut acc = a[row][N];
        for k in (row + 1)..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Convex hull by Andrew's monotone chain, collinear points dropped.
/// The result winds with a positive shoelace sum.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2
            && orientation(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && orientation(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Minimum-area enclosing rectangle by rotating calipers over hull edges.
///
/// Collinear input yields a zero-height rectangle along the segment and a
/// single distinct point yields a zero-size rectangle; only empty input
/// is an error.
pub fn min_area_rect(points: &[Point]) -> Result<QuadBox> {
    if points.is_empty() {
        return Err(Error::DegenerateInput("no points".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateInput("non-finite point".into()));
    }
    let hull = convex_hull(points);
    match hull.len() {
        1 => {
            return Ok(QuadBox {
                corners: [hull[0]; 4],
            })
        }
        2 => return Ok(QuadBox::canonical([hull[0], hull[1], hull[1], hull[0]])),
        _ => {}
    }

    let n = hull.len();
    let mut best: Option<(f64, [Point; 4])> = None;
    for i in 0..n {
        let origin = hull[i];
        let Some(u) = (hull[(i + 1) % n] - origin).normalized() else {
            continue;
        };
        let v = u.perp();
        let (mut umin, mut umax, mut vmin, mut vmax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for &p in &hull {
            let d = p - origin;
            let (pu, pv) = (d.dot(u), d.dot(v));
            umin = umin.min(pu);
            umax = umax.max(pu);
            vmin = vmin.min(pv);
            vmax = vmax.max(pv);
        }
        let area = (umax - umin) * (vmax - vmin);
        if best.as_ref().is_none_or(|(a, _)| area < *a) {
            best = Some((
                area,
                [
                    origin + u * umin + v * vmin,
                    origin + u * umax + v * vmin,
                    origin + u * umax + v * vmax,
                    origin + u * umin + v * vmax,
                ],
            ));
        }
    }
    let (_, corners) = best.ok_or_else(|| Error::DegenerateInput("empty hull".into()))?;
    Ok(QuadBox::canonical(corners))
}

/// Clips `subject` against the convex polygon `clip` (both wound positively).
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut output = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        let edge = b - a;
        let input = std::mem::take(&mut output);
        let inside = |p: Point| edge.cross(p - a) >= 0.0;
        let n = input.len();
        for j in 0..n {
            let cur = input[j];
            let prev = input[(j + n - 1) % n];
            let (cur_in, prev_in) = (inside(cur), inside(prev));
            if cur_in != prev_in {
                let d = cur - prev;
                let denom = edge.cross(d);
                if denom != 0.0 {
                    let t = edge.cross(a - prev) / denom;
                    output.push(prev + d * t);
                }
            }
            if cur_in {
                output.push(cur);
            }
        }
    }
    output
}

fn positively_wound(poly: &[Point]) -> Vec<Point> {
    let mut v = poly.to_vec();
    if signed_area(&v) < 0.0 {
        v.reverse();
    }
    v
}

/// Signed fan triangles `(origin, p_i, p_{i+1})`, each wound positively,
/// paired with the sign of its original orientation.
fn fan(poly: &[Point]) -> Vec<([Point; 3], f64)> {
    let o = poly[0];
    (1..poly.len() - 1)
        .filter_map(|i| {
            let tri = [o, poly[i], poly[i + 1]];
            let s = signed_area(&tri);
            if s == 0.0 {
                None
            } else if s > 0.0 {
                Some((tri, 1.0))
            } else {
                Some(([o, poly[i + 1], poly[i]], -1.0))
            }
        })
        .collect()
}

/// Area of `a ∩ b` for simple polygons.
///
/// Convex pairs are clipped directly. Otherwise both polygons are written as
/// signed sums of fan triangles and the pairwise triangle intersections are
/// accumulated, which is exact for any simple polygons in O(nm) clips.
pub fn intersection_area(a: &[Point], b: &[Point]) -> f64 {
    if a.len() < 3 || b.len() < 3 {
        return 0.0;
    }
    let a = positively_wound(a);
    let b = positively_wound(b);
    if is_convex(&a) && is_convex(&b) {
        return polygon_area(&clip_convex(&a, &b));
    }
    let fa = fan(&a);
    let fb = fan(&b);
    let mut total = 0.0;
    for (ta, sa) in &fa {
        for (tb, sb) in &fb {
            let clipped = clip_convex(ta, tb);
            if clipped.len() >= 3 {
                total += sa * sb * polygon_area(&clipped);
            }
        }
    }
    total.max(0.0)
}

fn lexicographic(a: &[Point], b: &[Point]) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Intersection over union of two simple polygons, in `[0, 1]`.
///
/// The arguments are put in a canonical order before computing, so the
/// result is bit-for-bit symmetric.
pub fn polygon_iou(a: &[Point], b: &[Point]) -> Result<f64> {
    for (name, poly) in [("first", a), ("second", b)] {
        if poly.len() < 3 || poly.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegeneratePolygon(format!(
                "{name} polygon is malformed"
            )));
        }
        if polygon_area(poly) <= 1e-12 {
            return Err(Error::DegeneratePolygon(format!(
                "{name} polygon has zero area"
            )));
        }
    }
    let (a, b) = if lexicographic(a, b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    };
    let inter = intersection_area(a, b);
    let union = polygon_area(a) + polygon_area(b) - inter;
    if union <= 0.0 {
        return Ok(0.0);
    }
    Ok((inter / union).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn unit_square() -> [Point; 4] {
        [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]
    }

    #[test]
    fn identity_homography() {
        let m = PerspectiveMap::solve(&unit_square(), &unit_square()).unwrap();
        for (got, want) in m
            .coefficients()
            .iter()
            .zip(PerspectiveMap::IDENTITY.coefficients())
        {
            assert!((got - want).abs() < 1e-12);
        }
        let q = m.apply(p(3.0, 4.0)).unwrap();
        assert!((q.x - 3.0).abs() < 1e-12 && (q.y - 4.0).abs() < 1e-12);
    }

    #[test]
    fn translation_homography() {
        let dst = unit_square().map(|q| q + p(5.0, 3.0));
        let m = PerspectiveMap::solve(&unit_square(), &dst).unwrap();
        let c = m.coefficients();
        let want = [1.0, 0.0, 5.0, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0];
        for (g, w) in c.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{c:?}");
        }
        let q = m.apply(p(0.0, 0.0)).unwrap();
        assert!((q.x - 5.0).abs() < 1e-12 && (q.y - 3.0).abs() < 1e-12);
    }

    #[test]
    fn general_quad_homography_round_trip() {
        let dst = [p(0.0, 0.0), p(2.0, 0.2), p(2.1, 1.5), p(-0.1, 1.2)];
        let m = PerspectiveMap::solve(&unit_square(), &dst).unwrap();
        for (s, d) in unit_square().iter().zip(&dst) {
            let q = m.apply(*s).unwrap();
            assert!(q.distance(*d) < 1e-9);
        }
        let c = m.apply(p(0.5, 0.5)).unwrap();
        assert!(point_in_polygon(c, &dst));
        let back = m.inverse().unwrap().apply(c).unwrap();
        assert!(back.distance(p(0.5, 0.5)) < 1e-9);
    }

    #[test]
    fn collinear_homography_is_rejected() {
        let bad = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(0.0, 1.0)];
        assert!(matches!(
            PerspectiveMap::solve(&bad, &unit_square()),
            Err(Error::DegenerateQuad(_))
        ));
    }

    #[test]
    fn projective_divide_by_zero() {
        let m = PerspectiveMap::from_matrix([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            m.apply(p(-1.0, 2.0)),
            Err(Error::ProjectiveDivideByZero { x: -1.0, y: 2.0 })
        );
    }

    #[test]
    fn canonical_corner_order() {
        // counter-clockwise input starting at bottom-right
        let q = QuadBox::new([p(4.0, 2.0), p(4.0, 0.0), p(0.0, 0.0), p(0.0, 2.0)]).unwrap();
        assert_eq!(
            q.corners(),
            &[p(0.0, 0.0), p(4.0, 0.0), p(4.0, 2.0), p(0.0, 2.0)]
        );
        assert!(q.area() > 0.0);
        // diamond: x+y ties between (1,0) and (0,1), smaller y wins
        let d = QuadBox::new([p(0.0, 1.0), p(1.0, 2.0), p(2.0, 1.0), p(1.0, 0.0)]).unwrap();
        assert_eq!(d.top_left(), p(1.0, 0.0));
        assert_eq!(d.top_right(), p(2.0, 1.0));
    }

    #[test]
    fn bow_tie_is_rejected() {
        let r = QuadBox::new([p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(0.0, 1.0)]);
        assert!(matches!(r, Err(Error::DegenerateQuad(_))));
    }

    #[test]
    fn min_area_rect_axis_aligned() {
        let r = min_area_rect(&[p(0.0, 0.0), p(4.0, 0.0), p(4.0, 2.0), p(0.0, 2.0)]).unwrap();
        assert!((r.area() - 8.0).abs() < 1e-12);
        assert_eq!(
            r.corners(),
            &[p(0.0, 0.0), p(4.0, 0.0), p(4.0, 2.0), p(0.0, 2.0)]
        );
    }

    #[test]
    fn min_area_rect_rotated_square() {
        let pts = [p(1.0, 0.0), p(2.0, 1.0), p(1.0, 2.0), p(0.0, 1.0)];
        let r = min_area_rect(&pts).unwrap();
        assert!((r.area() - 2.0).abs() < 1e-12);
        for q in pts {
            assert!(r.corners().iter().any(|c| c.distance(q) < 1e-12));
        }
    }

    #[test]
    fn min_area_rect_l_shape() {
        let pts = [
            p(0.0, 0.0),
            p(3.0, 0.0),
            p(3.0, 1.0),
            p(1.0, 1.0),
            p(1.0, 2.0),
            p(0.0, 2.0),
        ];
        let r = min_area_rect(&pts).unwrap();
        assert!((r.area() - 6.0).abs() < 1e-12);
        assert_eq!(r.bounds(), (0.0, 0.0, 3.0, 2.0));
    }

    #[test]
    fn min_area_rect_collinear_is_zero_height() {
        let r = min_area_rect(&[p(0.0, 0.0), p(1.0, 1.0), p(3.0, 3.0)]).unwrap();
        assert_eq!(r.area(), 0.0);
        assert!(r.corners().contains(&p(3.0, 3.0)));
        let single = min_area_rect(&[p(2.0, 5.0)]).unwrap();
        assert_eq!(single.corners(), &[p(2.0, 5.0); 4]);
        assert!(matches!(min_area_rect(&[]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn rectangle_output_is_rectangular() {
        let pts = [
            p(0.3, 0.1),
            p(5.0, 1.7),
            p(4.2, 3.9),
            p(-0.4, 2.2),
            p(2.0, 4.4),
        ];
        let r = min_area_rect(&pts).unwrap();
        let c = r.corners();
        for i in 0..4 {
            let e0 = c[(i + 1) % 4] - c[i];
            let e1 = c[(i + 2) % 4] - c[(i + 1) % 4];
            assert!(e0.dot(e1).abs() / (e0.norm() * e1.norm()) < 1e-9);
        }
        assert!((c[0].distance(c[1]) - c[3].distance(c[2])).abs() < 1e-9);
    }

    #[test]
    fn iou_basic_cases() {
        let a = unit_square();
        assert_eq!(polygon_iou(&a, &a).unwrap(), 1.0);
        let far = a.map(|q| q + p(3.0, 0.0));
        assert_eq!(polygon_iou(&a, &far).unwrap(), 0.0);
        let half = a.map(|q| q + p(0.5, 0.0));
        assert!((polygon_iou(&a, &half).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn iou_half_shift_matches_monte_carlo() {
        use rand::{Rng, SeedableRng};
        let a = unit_square();
        let b = a.map(|q| q + p(0.5, 0.0));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let (mut inter, mut union) = (0u32, 0u32);
        for _ in 0..1_000_000 {
            let q = p(rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.0));
            let (ia, ib) = (q.x <= 1.0, q.x >= 0.5);
            inter += (ia && ib) as u32;
            union += (ia || ib) as u32;
        }
        let mc = inter as f64 / union as f64;
        assert!((polygon_iou(&a, &b).unwrap() - mc).abs() < 1e-2);
    }

    #[test]
    fn iou_nonconvex_fan_path() {
        // L-shape overlapping a square: L area 4, square (0,0)-(2,2) area 4,
        // intersection = 3 (square minus the (1..2, 1..2) notch), union = 5
        let l = [
            p(0.0, 0.0),
            p(3.0, 0.0),
            p(3.0, 1.0),
            p(1.0, 1.0),
            p(1.0, 2.0),
            p(0.0, 2.0),
        ];
        let sq = [p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)];
        assert!(!is_convex(&l));
        assert!((intersection_area(&l, &sq) - 3.0).abs() < 1e-12);
        let iou = polygon_iou(&l, &sq).unwrap();
        assert!((iou - 3.0 / 5.0).abs() < 1e-12);
        assert_eq!(iou, polygon_iou(&sq, &l).unwrap());
    }

    #[test]
    fn iou_rejects_zero_area() {
        let flat = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)];
        assert!(matches!(
            polygon_iou(&flat, &unit_square()),
            Err(Error::DegeneratePolygon(_))
        ));
    }

    #[test]
    fn text_polygon_validation() {
        assert_eq!(
            TextPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)]),
            Err(Error::OddVertexCount(3))
        );
        let poly = TextPolygon::from_edges(
            &[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)],
            &[p(0.0, 1.0), p(1.0, 1.0), p(2.0, 1.0)],
        )
        .unwrap();
        assert_eq!(poly.pairs(), 3);
        assert_eq!(poly.bottom_edge()[0], p(0.0, 1.0));
        assert!((poly.area() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn point_in_polygon_boundary_counts() {
        let sq = unit_square();
        assert!(point_in_polygon(p(0.0, 0.5), &sq));
        assert!(point_in_polygon(p(1.0, 1.0), &sq));
        assert!(point_in_polygon(p(0.5, 0.5), &sq));
        assert!(!point_in_polygon(p(1.5, 0.5), &sq));
    }
}
