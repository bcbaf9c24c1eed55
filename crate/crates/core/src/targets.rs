//! Target sets for the zeta filters: where a word's statistic must land for
//! the word to be counted.
//!
//! All geometry runs in the max norm, so a ball is an axis-aligned cube and
//! every distance is a coordinatewise maximum. Targets support the two
//! set operations the theory needs: distance queries with slack (enlargement
//! `B(C, r)` is handled implicitly by testing `dist <= r`) and erosion
//! ([`Target::shrink`]), which realizes the inner-approximation step: any
//! point within `r < eps` of the eroded set lies in the original set.
//!
//! The empty set is an explicit variant, produced by eroding a point or
//! over-eroding a box or ball; filters over it are empty and the downstream
//! estimators report negative infinity rather than an error.

use crate::{Error, Result};

/// A closed interval `[lo, hi]`, possibly degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// A target set in `R^M` under the max norm.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// A single point.
    Point(Vec<f64>),
    /// A product of closed intervals.
    Box(Vec<Interval>),
    /// A closed max-norm ball: a cube of side `2 * radius`.
    Ball { center: Vec<f64>, radius: f64 },
    /// The empty set in `R^dim`.
    Empty { dim: usize },
}

impl Target {
    pub fn point(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidTarget("point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidTarget("point coordinates must be finite".into()));
        }
        Ok(Target::Point(coords))
    }

    pub fn cuboid(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidTarget("box needs at least one interval".into()));
        }
        for iv in &intervals {
            if !(iv.lo.is_finite() && iv.hi.is_finite()) {
                return Err(Error::InvalidTarget("box endpoints must be finite".into()));
            }
            if iv.lo > iv.hi {
                return Err(Error::InvalidTarget(format!(
                    "box interval [{}, {}] is inverted",
                    iv.lo, iv.hi
                )));
            }
        }
        Ok(Target::Box(intervals))
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidTarget("ball needs at least one center coordinate".into()));
        }
        if center.iter().any(|c| !c.is_finite()) || !radius.is_finite() {
            return Err(Error::InvalidTarget("ball center and radius must be finite".into()));
        }
        if radius < 0.0 {
            return Err(Error::InvalidTarget(format!("ball radius {radius} is negative")));
        }
        Ok(Target::Ball { center, radius })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            Target::Point(c) => c.len(),
            Target::Box(ivs) => ivs.len(),
            Target::Ball { center, .. } => center.len(),
            Target::Empty { dim } => *dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Target::Empty { .. })
    }

    /// Whether the set has nonempty interior. Points and empty sets do not;
    /// degenerate boxes and radius-zero balls do not either.
    pub fn has_interior(&self) -> bool {
        match self {
            Target::Point(_) | Target::Empty { .. } => false,
            Target::Box(ivs) => ivs.iter().all(|iv| iv.lo < iv.hi),
            Target::Ball { radius, .. } => *radius > 0.0,
        }
    }

    /// Max-norm distance from `x` to the set; `0` on the set, `+inf` for the
    /// empty set.
    ///
    /// Panics if `x.len() != self.dim()`; dimension agreement is validated
    /// once at the module boundaries, not per query.
    pub fn dist(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "point dimension mismatch");
        match self {
            Target::Point(c) => x
                .iter()
                .zip(c)
                .fold(0.0f64, |m, (xi, ci)| m.max((xi - ci).abs())),
            Target::Box(ivs) => x.iter().zip(ivs).fold(0.0f64, |m, (xi, iv)| {
                m.max((iv.lo - xi).max(xi - iv.hi).max(0.0))
            }),
            Target::Ball { center, radius } => {
                let d = x
                    .iter()
                    .zip(center)
                    .fold(0.0f64, |m, (xi, ci)| m.max((xi - ci).abs()));
                (d - radius).max(0.0)
            }
            Target::Empty { .. } => f64::INFINITY,
        }
    }

    /// Whether `x` lies within `slack` of the set: the filter predicate
    /// `x in B(C, slack)`. Boundary cases are inclusive.
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        self.dist(x) <= slack
    }

    /// Erosion by `eps >= 0`: the points of the set at max-norm distance at
    /// least `eps` from its complement. Eroding a point (or over-eroding a
    /// box or ball) yields the empty set, not an error.
    pub fn shrink(&self, eps: f64) -> Result<Target> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "erosion amount must be finite and non-negative, got {eps}"
            )));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        let dim = self.dim();
        Ok(match self {
            Target::Point(_) => Target::Empty { dim },
            Target::Box(ivs) => {
                let shrunk: Vec<Interval> = ivs
                    .iter()
                    .map(|iv| Interval { lo: iv.lo + eps, hi: iv.hi - eps })
                    .collect();
                if shrunk.iter().any(|iv| iv.lo > iv.hi) {
                    Target::Empty { dim }
                } else {
                    Target::Box(shrunk)
                }
            }
            Target::Ball { center, radius } => {
                if radius - eps < 0.0 {
                    Target::Empty { dim }
                } else {
                    Target::Ball { center: center.clone(), radius: radius - eps }
                }
            }
            Target::Empty { .. } => Target::Empty { dim },
        })
    }

    /// The extent `[min, max]` of the set along coordinate `coord`, `None`
    /// for the empty set. Used by oracles to bound search grids.
    pub fn bounding_interval(&self, coord: usize) -> Option<(f64, f64)> {
        assert!(coord < self.dim(), "coordinate out of range");
        match self {
            Target::Point(c) => Some((c[coord], c[coord])),
            Target::Box(ivs) => Some((ivs[coord].lo, ivs[coord].hi)),
            Target::Ball { center, radius } => Some((center[coord] - radius, center[coord] + radius)),
            Target::Empty { .. } => None,
        }
    }
}

/// Grammar: `point:<coords>`, `box:<lo,hi pairs>`, `ball:<coords>,<radius>`;
/// coordinates for separate axes are joined with `;`.
///
/// ```
/// use mfzeta::targets::Target;
/// let t: Target = "box:0.5,1.5;0.9,1.1".parse().unwrap();
/// assert_eq!(t.dim(), 2);
/// let b: Target = "ball:0.7;1.0,0.1".parse().unwrap();
/// assert_eq!(b.dim(), 2);
/// ```
impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidTarget(format!("missing ':' in target spec {s:?}")))?;
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidTarget(format!("bad number {t:?} in target spec")))
        };
        match kind {
            "point" => {
                let coords = body.split(';').map(num).collect::<Result<Vec<f64>>>()?;
                Target::point(coords)
            }
            "box" => {
                let intervals = body
                    .split(';')
                    .map(|pair| {
                        let (lo, hi) = pair.split_once(',').ok_or_else(|| {
                            Error::InvalidTarget(format!("box axis {pair:?} needs 'lo,hi'"))
                        })?;
                        Ok(Interval { lo: num(lo)?, hi: num(hi)? })
                    })
                    .collect::<Result<Vec<Interval>>>()?;
                Target::cuboid(intervals)
            }
            "ball" => {
                let (center_part, radius_part) = body.rsplit_once(',').ok_or_else(|| {
                    Error::InvalidTarget(format!("ball spec {body:?} needs '<center>,<radius>'"))
                })?;
                let center = center_part.split(';').map(num).collect::<Result<Vec<f64>>>()?;
                Target::ball(center, num(radius_part)?)
            }
            other => Err(Error::InvalidTarget(format!("unknown target kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distances_under_max_norm() {
        let b = Target::cuboid(vec![Interval { lo: 0.5, hi: 1.5 }]).unwrap();
        assert_eq!(b.dist(&[1.0]), 0.0);
        assert!(b.contains(&[1.0], 0.0));
        assert!((b.dist(&[1.7]) - 0.2).abs() < 1e-15);

        let p = Target::point(vec![1.0]).unwrap();
        assert!(!p.contains(&[1.02], 0.01));
        assert!(p.contains(&[1.02], 0.021));
        // Boundary is inclusive: exactly representable distance of 0.5.
        assert!(p.contains(&[1.5], 0.5));
        assert!(!p.contains(&[1.5], 0.4999999));

        // Max-norm ball: the corner of the unit cube is on the unit ball.
        let ball = Target::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(ball.dist(&[1.0, 1.0]), 0.0);
        assert!((ball.dist(&[1.25, 0.0]) - 0.25).abs() < 1e-15);

        let e = Target::Empty { dim: 1 };
        assert_eq!(e.dist(&[0.0]), f64::INFINITY);
        assert!(!e.contains(&[0.0], 1e18));
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dist_rejects_wrong_dimension() {
        Target::point(vec![1.0]).unwrap().dist(&[1.0, 2.0]);
    }

    #[test]
    fn shrink_erodes_each_kind() {
        let b = Target::cuboid(vec![Interval { lo: 0.0, hi: 1.0 }]).unwrap();
        assert_eq!(
            b.shrink(0.2).unwrap(),
            Target::Box(vec![Interval { lo: 0.2, hi: 0.8 }])
        );
        // Over-erosion empties the box; exact half leaves the midpoint.
        assert!(b.shrink(0.6).unwrap().is_empty());
        assert_eq!(
            b.shrink(0.5).unwrap(),
            Target::Box(vec![Interval { lo: 0.5, hi: 0.5 }])
        );

        let p = Target::point(vec![1.0]).unwrap();
        assert!(p.shrink(1e-9).unwrap().is_empty());
        assert_eq!(p.shrink(0.0).unwrap(), p);

        let ball = Target::ball(vec![0.7], 0.1).unwrap();
        assert_eq!(
            ball.shrink(0.04).unwrap(),
            Target::Ball { center: vec![0.7], radius: 0.1 - 0.04 }
        );
        assert!(ball.shrink(0.2).unwrap().is_empty());
        assert!(ball.shrink(-0.1).is_err());
        assert!(Target::Empty { dim: 1 }.shrink(0.3).unwrap().is_empty());
    }

    #[test]
    fn interior_and_bounds() {
        assert!(!Target::point(vec![1.0]).unwrap().has_interior());
        assert!(Target::cuboid(vec![Interval { lo: 0.0, hi: 1.0 }]).unwrap().has_interior());
        assert!(!Target::cuboid(vec![Interval { lo: 1.0, hi: 1.0 }]).unwrap().has_interior());
        assert!(Target::ball(vec![0.0], 0.5).unwrap().has_interior());
        assert!(!Target::ball(vec![0.0], 0.0).unwrap().has_interior());

        let b = Target::cuboid(vec![
            Interval { lo: 0.5, hi: 1.5 },
            Interval { lo: 0.9, hi: 1.1 },
        ])
        .unwrap();
        assert_eq!(b.bounding_interval(0), Some((0.5, 1.5)));
        assert_eq!(b.bounding_interval(1), Some((0.9, 1.1)));
        let (blo, bhi) = Target::ball(vec![0.7], 0.1).unwrap().bounding_interval(0).unwrap();
        assert!((blo - 0.6).abs() < 1e-15 && (bhi - 0.8).abs() < 1e-15);
        assert_eq!(Target::Empty { dim: 2 }.bounding_interval(1), None);
    }

    #[test]
    fn parse_target_specs() {
        assert_eq!("point:1.0".parse::<Target>().unwrap(), Target::Point(vec![1.0]));
        assert_eq!(
            "point:0.7;1.0".parse::<Target>().unwrap(),
            Target::Point(vec![0.7, 1.0])
        );
        assert_eq!(
            "box:0.5,1.5".parse::<Target>().unwrap(),
            Target::Box(vec![Interval { lo: 0.5, hi: 1.5 }])
        );
        assert_eq!(
            "ball:0.7,0.1".parse::<Target>().unwrap(),
            Target::Ball { center: vec![0.7], radius: 0.1 }
        );
        assert_eq!(
            "ball:0.7;1.0,0.1".parse::<Target>().unwrap(),
            Target::Ball { center: vec![0.7, 1.0], radius: 0.1 }
        );
        for bad in [
            "orb:1.0",
            "point:",
            "point:abc",
            "box:1.0",
            "box:2.0,1.0",
            "ball:0.7,-0.1",
            "1.0",
        ] {
            assert!(bad.parse::<Target>().is_err(), "{bad} should not parse");
        }
    }

    fn arb_target() -> impl Strategy<Value = Target> {
        prop_oneof![
            (-2.0f64..2.0).prop_map(|c| Target::point(vec![c]).unwrap()),
            (-2.0f64..2.0, 0.01f64..1.5).prop_map(|(lo, w)| {
                Target::cuboid(vec![Interval { lo, hi: lo + w }]).unwrap()
            }),
            (-2.0f64..2.0, 0.0f64..1.0).prop_map(|(c, r)| Target::ball(vec![c], r).unwrap()),
        ]
    }

    proptest! {
        /// Points within r < eps of the eroded set lie inside the original.
        #[test]
        fn erosion_buffer_lands_inside(
            t in arb_target(),
            eps in 0.01f64..0.5,
            frac in 0.0f64..0.99,
            x in -4.0f64..4.0,
        ) {
            let r = frac * eps;
            let shrunk = t.shrink(eps).unwrap();
            if shrunk.contains(&[x], r) {
                prop_assert!(t.contains(&[x], 0.0), "target {t:?}, eps {eps}, r {r}, x {x}");
            }
        }

        /// Enlarge-then-test agrees with the triangle inequality.
        #[test]
        fn dist_is_1_lipschitz(t in arb_target(), x in -4.0f64..4.0, dx in -0.5f64..0.5) {
            let d1 = t.dist(&[x]);
            let d2 = t.dist(&[x + dx]);
            prop_assert!((d1 - d2).abs() <= dx.abs() + 1e-12);
        }
    }
}
