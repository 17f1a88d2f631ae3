use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One edge of a Newton polygon.
///
/// `slope` is the slope of the lower convex hull edge through the points
/// `(i, v_p(c_i))`; the polynomial has `multiplicity` roots of valuation
/// `-slope` (counted with multiplicity).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonSegment {
    #[serde(with = "crate::arith::rational_str")]
    pub slope: BigRational,
    pub multiplicity: usize,
}

impl NewtonSegment {
    pub fn root_valuation(&self) -> BigRational {
        -self.slope.clone()
    }
}

/// Lower convex hull of `(i, valuations[i])`, skipping `None` (zero
/// coefficients). Collinear edges are merged, so slopes strictly increase.
pub fn newton_polygon(valuations: &[Option<i64>]) -> Result<Vec<NewtonSegment>> {
    let pts: Vec<(i64, i64)> = valuations
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i as i64, v)))
        .collect();
    if pts.is_empty() {
        return Err(Error::domain("Newton polygon of the zero polynomial"));
    }
    if valuations.last().is_none_or(|v| v.is_none()) {
        return Err(Error::domain("leading coefficient must be nonzero"));
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) as i128 * (p.1 - o.1) as i128 - (a.1 - o.1) as i128 * (p.0 - o.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(hull
        .windows(2)
        .map(|w| NewtonSegment {
            slope: BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(w[1].0 - w[0].0)),
            multiplicity: (w[1].0 - w[0].0) as usize,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn eisenstein_quadratic() {
        // x^2 - p
        let np = newton_polygon(&[Some(1), None, Some(0)]).unwrap();
        assert_eq!(np.len(), 1);
        assert_eq!(np[0].slope, q(-1, 2));
        assert_eq!(np[0].root_valuation(), q(1, 2));
        assert_eq!(np[0].multiplicity, 2);
    }

    #[test]
    fn unit_roots() {
        let np = newton_polygon(&[Some(0), None, Some(0)]).unwrap();
        assert_eq!(np, vec![NewtonSegment { slope: q(0, 1), multiplicity: 2 }]);
    }

    #[test]
    fn split_valuations() {
        // x^2 - x/p + 1
        let np = newton_polygon(&[Some(0), Some(-1), Some(0)]).unwrap();
        assert_eq!(
            np,
            vec![
                NewtonSegment { slope: q(-1, 1), multiplicity: 1 },
                NewtonSegment { slope: q(1, 1), multiplicity: 1 },
            ]
        );
    }

    #[test]
    fn vanishing_at_zero_shortens_polygon() {
        // x^3 + p x: root 0 is not counted
        let np = newton_polygon(&[None, Some(1), None, Some(0)]).unwrap();
        assert_eq!(np.iter().map(|s| s.multiplicity).sum::<usize>(), 2);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(newton_polygon(&[None, None]).is_err());
    }
}
