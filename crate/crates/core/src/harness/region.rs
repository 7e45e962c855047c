use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point `(1/p, 1/q)` of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub inv_p: f64,
    pub inv_q: f64,
}

impl RegionPoint {
    pub fn new(inv_p: f64, inv_q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&inv_p) || !(0.0..=1.0).contains(&inv_q) {
            return Err(invalid(format!("(1/p, 1/q) = ({inv_p}, {inv_q}) must lie in [0, 1]^2")));
        }
        Ok(RegionPoint { inv_p, inv_q })
    }

    pub fn p(&self) -> f64 {
        1.0 / self.inv_p
    }

    pub fn q(&self) -> f64 {
        1.0 / self.inv_q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Interior,
    BoundaryIncluded,
    BoundaryExcluded,
    Outside,
}

impl Membership {
    pub fn is_member(self) -> bool {
        matches!(self, Membership::Interior | Membership::BoundaryIncluded)
    }
}

/// Corners of the region for a given positive order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVertices {
    pub a: RegionPoint,
    pub a_prime: RegionPoint,
    pub b: RegionPoint,
    pub b_prime: RegionPoint,
    pub d: RegionPoint,
}

const EPS: f64 = 1e-12;

fn check(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.5) {
        return Err(invalid(format!("delta must lie in (0, 3/2), got {delta}")));
    }
    Ok(())
}

/// Classifies `pt` against `1/p - 1/q >= 2 delta / 3`, `1/p > 1/4 + delta/2`
/// and `1/q < 3/4 - delta/2`. Here `delta > 0` is the order of the negative
/// power; the rest of the crate uses the signed exponent `-delta`.
pub fn region_membership(delta: f64, pt: RegionPoint) -> Result<Membership> {
    check(delta)?;
    let gap = pt.inv_p - pt.inv_q - 2.0 * delta / 3.0;
    let left = pt.inv_p - (0.25 + 0.5 * delta);
    let top = (0.75 - 0.5 * delta) - pt.inv_q;
    if gap < -EPS || left < -EPS || top < -EPS {
        return Ok(Membership::Outside);
    }
    if left <= EPS || top <= EPS {
        return Ok(Membership::BoundaryExcluded);
    }
    if gap <= EPS {
        return Ok(Membership::BoundaryIncluded);
    }
    Ok(Membership::Interior)
}

pub fn region_vertices(delta: f64) -> Result<RegionVertices> {
    check(delta)?;
    let pt = |x: f64, y: f64| RegionPoint { inv_p: x, inv_q: y };
    Ok(RegionVertices {
        a: pt(0.25 + 0.5 * delta, 0.0),
        b: pt(0.25 + 0.5 * delta, 0.25 - delta / 6.0),
        b_prime: pt(0.75 + delta / 6.0, 0.75 - 0.5 * delta),
        a_prime: pt(1.0, 0.75 - 0.5 * delta),
        d: pt(1.0, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> RegionPoint {
        RegionPoint::new(x, y).unwrap()
    }

    #[test]
    fn classification_at_half() {
        assert_eq!(region_membership(0.5, pt(2.0 / 3.0, 1.0 / 3.0)).unwrap(), Membership::BoundaryIncluded);
        assert_eq!(region_membership(0.5, pt(0.5, 1.0 / 6.0)).unwrap(), Membership::BoundaryExcluded);
        assert_eq!(region_membership(0.5, pt(0.8, 0.2)).unwrap(), Membership::Interior);
        assert_eq!(region_membership(0.5, pt(0.5, 0.5)).unwrap(), Membership::Outside);
        assert!(region_membership(1.5, pt(0.5, 0.5)).is_err());
        assert!(RegionPoint::new(1.2, 0.0).is_err());
    }

    #[test]
    fn vertices_at_half() {
        let v = region_vertices(0.5).unwrap();
        let close = |p: RegionPoint, x: f64, y: f64| (p.inv_p - x).abs() < 1e-15 && (p.inv_q - y).abs() < 1e-15;
        assert!(close(v.a, 0.5, 0.0));
        assert!(close(v.b, 0.5, 1.0 / 6.0));
        assert!(close(v.b_prime, 5.0 / 6.0, 0.5));
        assert!(close(v.a_prime, 1.0, 0.5));
        assert!(close(v.d, 1.0, 0.0));
    }

    #[test]
    fn vertices_lie_on_the_constraint_lines() {
        for k in 1..15 {
            let delta = 0.1 * k as f64;
            let v = region_vertices(delta).unwrap();
            for p in [v.b, v.b_prime] {
                assert!((p.inv_p - p.inv_q - 2.0 * delta / 3.0).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn corner_d_is_always_a_member(delta in 0.01f64..1.49) {
            prop_assert!(region_membership(delta, pt(1.0, 0.0)).unwrap().is_member());
        }

        #[test]
        fn widening_the_gap_keeps_the_first_constraint(delta in 0.01f64..1.49, x in 0.0f64..1.0, y in 0.0f64..1.0, dx in 0.0f64..0.5) {
            // Moving 1/p right never breaks 1/p - 1/q >= 2 delta/3 or 1/p > 1/4 + delta/2.
            let before = region_membership(delta, pt(x, y)).unwrap();
            let after = region_membership(delta, pt((x + dx).min(1.0), y)).unwrap();
            if before.is_member() {
                prop_assert!(after != Membership::Outside);
            }
        }
    }
}
