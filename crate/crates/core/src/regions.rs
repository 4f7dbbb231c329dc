//! Two-rate polyhedral regions for the three-node relay example.
//!
//! Regions live in the nonnegative quadrant of `(R13, R23)` and are given by
//! inequalities `a·r ≤ b`. Vertices come from intersecting every pair of
//! boundary lines (including the axes) and keeping the feasible points.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};

/// Membership tolerance for vertices.
pub const VERTEX_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRegion {
    pub variables: Vec<String>,
    pub inequalities: Vec<Inequality>,
}

impl RateRegion {
    pub fn new(variables: Vec<String>, inequalities: Vec<Inequality>) -> Result<Self> {
        if variables.len() != 2 {
            return Err(Error::InvalidRegion(format!("regions have two rates, got {}", variables.len())));
        }
        for (i, ineq) in inequalities.iter().enumerate() {
            if ineq.coeffs.len() != variables.len() {
                return Err(Error::InvalidRegion(format!("inequality {i} has {} coefficients", ineq.coeffs.len())));
            }
            if ineq.coeffs.iter().chain([&ineq.bound]).any(|v| !v.is_finite()) {
                return Err(Error::InvalidRegion(format!("inequality {i} has a non-finite entry")));
            }
        }
        let region = Self { variables, inequalities };
        region.check_bounded()?;
        Ok(region)
    }

    fn rate_names() -> Vec<String> {
        vec!["R13".into(), "R23".into()]
    }

    fn check_bounded(&self) -> Result<()> {
        for (j, name) in self.variables.iter().enumerate() {
            let mut lp = LinearProgram::<f64>::new(2);
            let mut c = vec![0.0; 2];
            c[j] = -1.0;
            lp.set_objective(c);
            for ineq in &self.inequalities {
                lp.add_constraint(ineq.coeffs.clone(), Relation::Le, ineq.bound);
            }
            if lp.minimize(1e-9).status == LpStatus::Unbounded {
                return Err(Error::UnboundedRegion(name.clone()));
            }
        }
        Ok(())
    }

    /// True when `point ≥ 0` and every inequality holds within `tol`.
    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        point.iter().all(|v| *v >= -tol) && self.inequalities.iter().all(|i| dot(&i.coeffs, point) <= i.bound + tol)
    }

    /// Largest half-plane distance by which `point` lies outside.
    pub fn violation(&self, point: &[f64]) -> f64 {
        let axes = point.iter().map(|v| (-v).max(0.0));
        let rows = self.inequalities.iter().map(|i| {
            let norm = dot(&i.coeffs, &i.coeffs).sqrt().max(f64::MIN_POSITIVE);
            ((dot(&i.coeffs, point) - i.bound) / norm).max(0.0)
        });
        axes.chain(rows).fold(0.0, f64::max)
    }

    /// Vertices in counterclockwise order; empty when the region is empty.
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        let mut lines: Vec<(f64, f64, f64)> =
            self.inequalities.iter().map(|i| (i.coeffs[0], i.coeffs[1], i.bound)).collect();
        lines.push((-1.0, 0.0, 0.0));
        lines.push((0.0, -1.0, 0.0));
        let mut out: Vec<[f64; 2]> = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a1, b1, c1) = lines[i];
                let (a2, b2, c2) = lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let p = [(c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det];
                if self.contains(&p, VERTEX_TOL) && !out.iter().any(|q| close(q, &p)) {
                    out.push([clean(p[0]), clean(p[1])]);
                }
            }
        }
        if out.len() > 2 {
            let cx = out.iter().map(|p| p[0]).sum::<f64>() / out.len() as f64;
            let cy = out.iter().map(|p| p[1]).sum::<f64>() / out.len() as f64;
            out.sort_by(|p, q| (p[1] - cy).atan2(p[0] - cx).total_cmp(&(q[1] - cy).atan2(q[0] - cx)));
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn close(p: &[f64; 2], q: &[f64; 2]) -> bool {
    (p[0] - q[0]).abs() <= VERTEX_TOL && (p[1] - q[1]).abs() <= VERTEX_TOL
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-15 {
        0.0
    } else {
        v
    }
}

impl fmt::Display for RateRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ineq in &self.inequalities {
            let terms: Vec<String> =
                ineq.coeffs.iter().zip(&self.variables).map(|(a, v)| format!("{a:.6}*{v}")).collect();
            writeln!(f, "{} <= {:.6}", terms.join(" + "), ineq.bound)?;
        }
        Ok(())
    }
}

fn ineq(a: f64, b: f64, bound: f64) -> Inequality {
    Inequality { coeffs: vec![a, b], bound }
}

/// `R23 ≤ R2`, `R13 ≤ R1 + Cr`, `R23 + (M+1)·R13 ≤ (M+1)·R1 + R2`.
pub fn proposition1_region(r1: f64, r2: f64, cr: f64, m: usize) -> Result<RateRegion> {
    if !(r1 > 0.0) {
        return Err(Error::InvalidRegion(format!("R1 must be positive, got {r1}")));
    }
    if !(r2 >= 0.0) || !(cr >= 0.0) {
        return Err(Error::InvalidRegion("R2 and Cr must be nonnegative".into()));
    }
    let k = (m + 1) as f64;
    RateRegion::new(
        RateRegion::rate_names(),
        vec![ineq(0.0, 1.0, r2), ineq(1.0, 0.0, r1 + cr), ineq(k, 1.0, k * r1 + r2)],
    )
}

/// `R23 ≤ R2`, `R13 ≤ R1 + R̃`, `R13 + R23 ≤ R1 + R2`.
pub fn bitpipe_region(r1: f64, r2: f64, rtilde: f64) -> Result<RateRegion> {
    if !(r1 >= 0.0) || !(r2 >= 0.0) || !(rtilde >= 0.0) {
        return Err(Error::InvalidRegion("rates must be nonnegative".into()));
    }
    RateRegion::new(
        RateRegion::rate_names(),
        vec![ineq(0.0, 1.0, r2), ineq(1.0, 0.0, r1 + rtilde), ineq(1.0, 1.0, r1 + r2)],
    )
}

/// Largest violation of either region by a vertex of the other.
pub fn vertex_gap(a: &RateRegion, b: &RateRegion) -> Result<f64> {
    if a.variables != b.variables {
        return Err(Error::InvalidRegion("regions use different rate variables".into()));
    }
    let one = a.vertices().iter().map(|v| b.violation(v)).fold(0.0, f64::max);
    let two = b.vertices().iter().map(|v| a.violation(v)).fold(0.0, f64::max);
    Ok(one.max(two))
}

/// Mutual vertex containment within `tol`.
pub fn regions_equal(a: &RateRegion, b: &RateRegion, tol: f64) -> Result<bool> {
    if a.variables != b.variables {
        return Err(Error::InvalidRegion("regions use different rate variables".into()));
    }
    let inside = |x: &RateRegion, y: &RateRegion| x.vertices().iter().all(|v| y.contains(v, tol));
    Ok(inside(a, b) && inside(b, a))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonEquivalence {
    /// True when no grid value of `R̃` reproduces the region.
    pub no_equivalent: bool,
    pub grid_points: usize,
    pub min_gap: f64,
    pub min_gap_at: f64,
    /// First grid value whose bit-pipe region matches, if any.
    pub matching_rtilde: Option<f64>,
}

/// Sweeps `R̃ = k·step` over `[0, R1 + R2 + Cr]`.
pub fn no_equivalent_bitpipe(r1: f64, r2: f64, cr: f64, m: usize, step: f64) -> Result<NonEquivalence> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("grid step must be positive".into()));
    }
    let target = proposition1_region(r1, r2, cr, m)?;
    let span = r1 + r2 + cr;
    let count = (span / step + 1e-9).floor() as usize + 1;
    let mut result = NonEquivalence {
        no_equivalent: true,
        grid_points: count,
        min_gap: f64::INFINITY,
        min_gap_at: 0.0,
        matching_rtilde: None,
    };
    for k in 0..count {
        let rt = k as f64 * step;
        let pipe = bitpipe_region(r1, r2, rt)?;
        let gap = vertex_gap(&target, &pipe)?;
        if gap < result.min_gap {
            result.min_gap = gap;
            result.min_gap_at = rt;
        }
        if regions_equal(&target, &pipe, VERTEX_TOL)? && result.matching_rtilde.is_none() {
            result.matching_rtilde = Some(rt);
            result.no_equivalent = false;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_vertices() {
        let r = proposition1_region(1.0, 2.0, 0.5, 1).unwrap();
        let v = r.vertices();
        let expected = [[0.0, 0.0], [1.5, 0.0], [1.5, 1.0], [1.0, 2.0], [0.0, 2.0]];
        assert_eq!(v.len(), 5);
        for e in expected {
            assert!(v.iter().any(|p| close(p, &e)), "{e:?} missing from {v:?}");
        }
    }

    #[test]
    fn printing() {
        let r = proposition1_region(1.0, 2.0, 0.5, 1).unwrap();
        let text = r.to_string();
        assert_eq!(
            text,
            "0.000000*R13 + 1.000000*R23 <= 2.000000\n1.000000*R13 + 0.000000*R23 <= 1.500000\n2.000000*R13 + 1.000000*R23 <= 4.000000\n"
        );
    }

    #[test]
    fn m0_matches_pipe() {
        let a = proposition1_region(1.0, 2.0, 0.5, 0).unwrap();
        let b = bitpipe_region(1.0, 2.0, 0.5).unwrap();
        assert!(regions_equal(&a, &b, 1e-9).unwrap());
        assert!(regions_equal(&a, &a, 1e-9).unwrap());
    }

    #[test]
    fn unbounded_and_invalid() {
        let open = RateRegion::new(vec!["a".into(), "b".into()], vec![ineq(1.0, 0.0, 1.0)]);
        assert!(matches!(open, Err(Error::UnboundedRegion(v)) if v == "b"));
        assert!(proposition1_region(0.0, 1.0, 1.0, 1).is_err());
    }
}
