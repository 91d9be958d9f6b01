use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalized rate pairs `(x, y) >= 0` with `(x - a)(y + b) <= c` and
/// `(x + b)(y - a) <= c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolaRegion<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> HyperbolaRegion<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Self { a, b, c }
    }

    pub fn contains(&self, x: T, y: T) -> bool {
        let Self { a, b, c } = *self;
        x >= T::zero() && y >= T::zero() && (x - a) * (y + b) <= c && (x + b) * (y - a) <= c
    }

    /// Names of the closed-form hypotheses that fail; empty when all hold.
    pub fn hypothesis_failures(&self) -> Vec<&'static str> {
        let Self { a, b, c } = *self;
        let zero = T::zero();
        let mut failed = Vec::new();
        if !(b > zero) {
            failed.push("b > 0");
        }
        if !(c > zero) {
            failed.push("c > 0");
        }
        if !(a + b > zero) {
            failed.push("a + b > 0");
        }
        if !(a * b + c > zero) {
            failed.push("ab + c > 0");
        }
        if !(self.discriminant_root() > b + c / b) {
            failed.push("sqrt((a + b)^2 + 4c) > b + c/b");
        }
        failed
    }

    fn discriminant_root(&self) -> T {
        let s = self.a + self.b;
        (s * s + T::lit(4.0) * self.c).sqrt()
    }

    /// Positive root of `(x - a)(x + b) = c`, where the region meets the diagonal.
    pub fn diagonal_root(&self) -> T {
        (self.a - self.b + self.discriminant_root()) / T::lit(2.0)
    }

    /// Largest `x` in the region: `a + c/b`.
    pub fn extent(&self) -> T {
        self.a + self.c / self.b
    }
}

/// `max x + y` over the convex hull of the region, `a - b + sqrt((a + b)^2 + 4c)`.
/// Valid only under the hypotheses listed by [`HyperbolaRegion::hypothesis_failures`].
pub fn hull_max_sum<T: Real>(region: &HyperbolaRegion<T>) -> Result<T> {
    let failed = region.hypothesis_failures();
    if !failed.is_empty() {
        return Err(Error::Hypothesis(failed));
    }
    Ok(region.a - region.b + region.discriminant_root())
}

/// Rasterized counterpart of [`hull_max_sum`].
///
/// Samples the region on a `(n + 1) x (n + 1)` grid over `[0, a + c/b]^2`,
/// keeps the lowest and highest feasible point of every grid column, takes
/// their convex hull and returns the largest `x + y` among its vertices.
/// Requires `b > 0` and `c >= 0`, which make each column's feasible set an
/// interval starting at `y = 0`.
pub fn numeric_hull_max<T: Real>(region: &HyperbolaRegion<T>, samples_per_axis: usize) -> Result<T> {
    let HyperbolaRegion { b, c, .. } = *region;
    if !(b > T::zero()) || !(c >= T::zero()) {
        return Err(Error::Domain(format!("rasterization needs b > 0 and c >= 0 (b = {b}, c = {c})")));
    }
    let extent = region.extent();
    if !(extent.is_finite() && extent > T::zero()) {
        return Err(Error::Domain(format!("bounding box [0, {extent}] is degenerate")));
    }
    if samples_per_axis == 0 {
        return Err(Error::Domain("need at least one sample per axis".into()));
    }
    let n = samples_per_axis;
    let coord = |k: usize| extent * T::count(k) / T::count(n);

    let mut points = Vec::with_capacity(2 * (n + 1));
    for i in 0..=n {
        let x = coord(i);
        if !region.contains(x, T::zero()) {
            continue;
        }
        // largest j with (x, y_j) feasible
        let (mut lo, mut hi) = (0usize, n + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if region.contains(x, coord(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        points.push((x, T::zero()));
        if lo > 0 {
            points.push((x, coord(lo)));
        }
    }
    let hull = convex_hull(points);
    hull.iter()
        .map(|p| p.0 + p.1)
        .fold(None, |acc: Option<T>, s| Some(acc.map_or(s, |a| a.max(s))))
        .ok_or_else(|| Error::Domain("no grid point lies in the region".into()))
}

/// Andrew's monotone chain; returns hull vertices counterclockwise.
pub(crate) fn convex_hull<T: Real>(mut pts: Vec<(T, T)>) -> Vec<(T, T)> {
    pts.sort_by(|p, q| p.partial_cmp(q).expect("finite points"));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (T, T), a: (T, T), b: (T, T)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(T, T)> = Vec::with_capacity(pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(T, T)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_anchors() {
        let v = hull_max_sum(&HyperbolaRegion::new(0.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(v, 5f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 1.2360680, epsilon = 1e-7);
        let v = hull_max_sum(&HyperbolaRegion::new(0.0, 1.0, 1.1)).unwrap();
        assert_abs_diff_eq!(v, 5.4f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 1.3237900, epsilon = 1e-7);
        let v = hull_max_sum(&HyperbolaRegion::new(1.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(v, 8f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn diagonal_root_solves_the_quadratic() {
        for (a, b, c) in [(0.0, 1.0, 1.0), (1.0, 1.0, 1.0), (0.3, 2.0, 0.7), (-0.2, 1.5, 2.0)] {
            let r = HyperbolaRegion::new(a, b, c);
            let x0 = r.diagonal_root();
            assert!(x0 > 0.0);
            assert_abs_diff_eq!((x0 - a) * (x0 + b) - c, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hypothesis_violations_are_named() {
        match hull_max_sum(&HyperbolaRegion::new(0.0, -1.0, 1.0)) {
            Err(Error::Hypothesis(failed)) => {
                assert!(failed.contains(&"b > 0"));
                assert!(failed.contains(&"a + b > 0"));
            }
            other => panic!("{other:?}"),
        }
        // c/b too large for the concavity condition
        match hull_max_sum(&HyperbolaRegion::new(0.0, 1.0, 3.0)) {
            Err(Error::Hypothesis(failed)) => {
                assert_eq!(failed, vec!["sqrt((a + b)^2 + 4c) > b + c/b"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_without_hypotheses() {
        // closed form does not apply; the hull reaches the axis point (a + c/b, 0)
        let r = HyperbolaRegion::new(0.0, 1.0, 3.0);
        assert_abs_diff_eq!(numeric_hull_max(&r, 2000).unwrap(), 3.0, epsilon = 1e-12);
        assert!(3.0 > 2.0 * r.diagonal_root());

        // thin region hugging the box [0, a]^2
        let r = HyperbolaRegion::new(0.5, 1.0, 0.01);
        let v = numeric_hull_max(&r, 2000).unwrap();
        assert_abs_diff_eq!(v, hull_max_sum(&r).unwrap(), epsilon = 2.0 * r.extent() / 2000.0);
        assert!(numeric_hull_max(&HyperbolaRegion::new(0.0, 0.0, 1.0), 10).is_err());
    }

    #[test]
    fn oracle_tracks_closed_form_on_small_grids() {
        let r = HyperbolaRegion::new(0.0, 1.0, 1.0);
        let exact = hull_max_sum(&r).unwrap();
        for n in [50, 200, 1000] {
            let approx = numeric_hull_max(&r, n).unwrap();
            let h = r.extent() / n as f64;
            assert!(approx <= exact + 1e-12);
            assert!(exact - approx <= 2.0 * h, "n={n}: {approx} vs {exact}");
        }
    }

    #[test]
    fn monotone_chain() {
        let hull = convex_hull(vec![(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.0, 1.0), (0.5, 0.2)]);
        assert_eq!(hull, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }
}
