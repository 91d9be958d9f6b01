use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `coef1 * R1 + coef2 * R2 <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane<T> {
    pub coef1: T,
    pub coef2: T,
    pub rhs: T,
}

impl<T: Real> HalfPlane<T> {
    pub fn new(coef1: T, coef2: T, rhs: T) -> Self {
        Self { coef1, coef2, rhs }
    }

    fn slack(&self, (r1, r2): (T, T)) -> T {
        self.rhs - self.coef1 * r1 - self.coef2 * r2
    }

    fn scale(&self) -> T {
        T::one().max(self.coef1.abs()).max(self.coef2.abs()).max(self.rhs.abs())
    }
}

/// Convex polygon of rate pairs in the nonnegative quadrant, given by linear
/// constraints. Vertices are kept in counterclockwise order starting nearest the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRegion<T> {
    constraints: Vec<HalfPlane<T>>,
    vertices: Vec<(T, T)>,
}

fn tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(64.0))
}

impl<T: Real> RateRegion<T> {
    /// Builds the region `{R1, R2 >= 0} ∩ constraints` and enumerates its vertices.
    pub fn new(constraints: Vec<HalfPlane<T>>) -> Result<Self> {
        let tol = tolerance::<T>();
        let mut all = constraints.clone();
        all.push(HalfPlane::new(-T::one(), T::zero(), T::zero()));
        all.push(HalfPlane::new(T::zero(), -T::one(), T::zero()));

        if let Some(ray) = recession_ray(&all, tol) {
            return Err(Error::Domain(format!("region is unbounded along {ray:?}")));
        }

        let mut vertices: Vec<(T, T)> = Vec::new();
        for (i, h) in all.iter().enumerate() {
            for k in &all[i + 1..] {
                let det = h.coef1 * k.coef2 - h.coef2 * k.coef1;
                if det.abs() <= tol * h.scale() * k.scale() {
                    continue;
                }
                let r1 = (h.rhs * k.coef2 - h.coef2 * k.rhs) / det;
                let r2 = (h.coef1 * k.rhs - h.rhs * k.coef1) / det;
                let feasible = all.iter().all(|c| c.slack((r1, r2)) >= -tol * c.scale());
                let fresh = vertices
                    .iter()
                    .all(|&(v1, v2)| (v1 - r1).abs() > tol || (v2 - r2).abs() > tol);
                if feasible && fresh {
                    vertices.push((r1, r2));
                }
            }
        }
        if vertices.is_empty() {
            return Err(Error::Domain("region is empty".into()));
        }

        let n = T::count(vertices.len());
        let cx = vertices.iter().map(|v| v.0).sum::<T>() / n;
        let cy = vertices.iter().map(|v| v.1).sum::<T>() / n;
        vertices.sort_by(|p, q| {
            let ap = (p.1 - cy).atan2(p.0 - cx);
            let aq = (q.1 - cy).atan2(q.0 - cx);
            ap.partial_cmp(&aq).expect("finite vertices")
        });
        let start = (0..vertices.len())
            .min_by(|&i, &j| {
                let ni = vertices[i].0 + vertices[i].1;
                let nj = vertices[j].0 + vertices[j].1;
                ni.partial_cmp(&nj)
                    .expect("finite vertices")
                    .then(vertices[j].1.partial_cmp(&vertices[i].1).expect("finite"))
            })
            .unwrap_or(0);
        vertices.rotate_left(start);
        Ok(Self { constraints, vertices })
    }

    /// The user-supplied constraints; nonnegativity is implicit.
    pub fn constraints(&self) -> &[HalfPlane<T>] {
        &self.constraints
    }

    pub fn vertices(&self) -> &[(T, T)] {
        &self.vertices
    }

    pub fn contains(&self, point: (T, T), tol: T) -> bool {
        point.0 >= -tol
            && point.1 >= -tol
            && self.constraints.iter().all(|c| c.slack(point) >= -tol * c.scale())
    }

    /// Convex polygons: containment reduces to the vertices.
    pub fn is_subset_of(&self, other: &Self, tol: T) -> bool {
        self.vertices.iter().all(|&v| other.contains(v, tol))
    }

    /// `max R1 + R2` over the region.
    pub fn max_sum(&self) -> T {
        self.vertices
            .iter()
            .map(|v| v.0 + v.1)
            .fold(T::neg_infinity(), T::max)
    }
}

/// A nonzero direction `d >= 0` with `c . d <= 0` for every constraint, if any.
fn recession_ray<T: Real>(all: &[HalfPlane<T>], tol: T) -> Option<(T, T)> {
    let mut candidates = vec![(T::one(), T::zero()), (T::zero(), T::one())];
    for c in all {
        candidates.push((c.coef2, -c.coef1));
        candidates.push((-c.coef2, c.coef1));
    }
    candidates.into_iter().find(|&(d1, d2)| {
        let norm = d1.abs().max(d2.abs());
        norm > T::zero()
            && d1 >= -tol * norm
            && d2 >= -tol * norm
            && all.iter().all(|c| c.coef1 * d1 + c.coef2 * d2 <= tol * norm * c.scale())
    })
}

/// Time-sharing inner bound for the cooperation-facilitator model:
/// `R1, R2 <= m`, `R1 + R2 <= 2m - g`.
pub fn cf_inner_region<T: Real>(m: u32, g: u32) -> Result<RateRegion<T>> {
    if g == 0 || g > m {
        return Err(Error::Domain(format!("g = {g} outside 1..={m}")));
    }
    let mm = T::count(m as usize);
    let g = T::count(g as usize);
    RateRegion::new(vec![
        HalfPlane::new(T::one(), T::zero(), mm),
        HalfPlane::new(T::zero(), T::one(), mm),
        HalfPlane::new(T::one(), T::one(), mm + mm - g),
    ])
}

/// Outer bound for the cooperation-facilitator model at cooperation rate `delta`:
/// `R1, R2 <= m + delta`, `R1 + R2 <= 2m`.
pub fn cf_outer_region<T: Real>(m: u32, delta: T) -> Result<RateRegion<T>> {
    if !(delta >= T::zero()) {
        return Err(Error::Domain(format!("delta = {delta} must be nonnegative")));
    }
    let mm = T::count(m as usize);
    RateRegion::new(vec![
        HalfPlane::new(T::one(), T::zero(), mm + delta),
        HalfPlane::new(T::zero(), T::one(), mm + delta),
        HalfPlane::new(T::one(), T::one(), mm + mm),
    ])
}

/// Sum rate `m - g` achieved without cooperation by single-user codes.
pub fn ie_inner_sum<T: Real>(m: u32, g: u32) -> Result<T> {
    if g > m {
        return Err(Error::Domain(format!("g = {g} exceeds m = {m}")));
    }
    Ok(T::count((m - g) as usize))
}
