//! Compact target sets living inside the open unit disc: line segments,
//! products of fat Cantor sets with an interval, filled slit chains, and
//! finite unions. Membership and distance queries return certified
//! envelopes; Cantor distances are evaluated at a finite stage with the
//! safe direction documented on each operation.

use crate::geometry::{
    dist_point_point_sq, dist_point_segment_sq, sqrt_bounds, BoundPair, GeometryError, Q, QPoint,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum TargetError {
    #[error("removal fraction {0} is not in [0, 1)")]
    BadFraction(Q),
    #[error("interval [{0}, {1}] is empty or degenerate")]
    BadInterval(Q, Q),
    #[error("stage {stage} removal of length {removal} does not fit interval of length {available}")]
    RemovalTooLarge { stage: usize, removal: Q, available: Q },
    #[error("requested stage {requested} but only {available} stages were built")]
    StageOutOfRange { requested: usize, available: usize },
    #[error("degenerate segment: endpoints coincide at {0}")]
    DegenerateSegment(QPoint),
    #[error("target set not certified inside the open unit disc (max |z|^2 = {0})")]
    NotInsideUnitDisc(Q),
    #[error("d0 envelope lower bound {0} is not positive")]
    D0NotPositive(Q),
    #[error("trapezoid vertices are not in convex position")]
    BadTrapezoid,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A Smith-Volterra-Cantor construction on a base interval. Stage `j`
/// removes, from each surviving interval, the central open subinterval of
/// length `fractions[j-1] * (b - a)` (a fraction of the original stage-0
/// length). All endpoints are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SVCSet {
    pub base: (Q, Q),
    pub fractions: Vec<Q>,
    pub stages: Vec<Vec<(Q, Q)>>,
}

/// Limit length of an SVC construction: exact for geometric schedules,
/// otherwise a certified pair with the stage-S length as upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SVCLimitLength {
    pub value: BoundPair,
    pub exact: bool,
    pub zero_length: bool,
}

/// The geometric schedule removing fraction `first * ratio^(j-1)` of the
/// original length at stage j. The default fat-Cantor schedule is
/// `geometric_fractions(1/4, 1/4, s)`, which removes total length 1/2.
pub fn geometric_fractions(first: &Q, ratio: &Q, stages: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(stages);
    let mut f = first.clone();
    for _ in 0..stages {
        out.push(f.clone());
        f = &f * ratio;
    }
    out
}

pub fn build_svc(interval: (Q, Q), fractions: &[Q]) -> Result<SVCSet, TargetError> {
    let (a, b) = interval;
    if a >= b {
        return Err(TargetError::BadInterval(a, b));
    }
    for f in fractions {
        if f.is_negative() || f >= &Q::one() {
            return Err(TargetError::BadFraction(f.clone()));
        }
    }
    let total = &b - &a;
    let mut stages: Vec<Vec<(Q, Q)>> = vec![vec![(a.clone(), b.clone())]];
    for (j, frac) in fractions.iter().enumerate() {
        let removal = frac * &total;
        let prev = stages.last().unwrap();
        let mut next = Vec::with_capacity(prev.len() * 2);
        for (u, v) in prev {
            let len = v - u;
            if removal >= len {
                return Err(TargetError::RemovalTooLarge {
                    stage: j + 1,
                    removal,
                    available: len,
                });
            }
            if removal.is_zero() {
                next.push((u.clone(), v.clone()));
                continue;
            }
            let mid = &(u + v) / &Q::int(2);
            let half = &removal / &Q::int(2);
            next.push((u.clone(), &mid - &half));
            next.push((&mid + &half, v.clone()));
        }
        stages.push(next);
    }
    Ok(SVCSet {
        base: (a, b),
        fractions: fractions.to_vec(),
        stages,
    })
}

impl SVCSet {
    pub fn stage_count(&self) -> usize {
        self.stages.len() - 1
    }

    /// Exact total length of the stage-`s` interval union.
    pub fn stage_length(&self, s: usize) -> Q {
        self.stages[s]
            .iter()
            .fold(Q::zero(), |acc, (u, v)| &acc + &(v - u))
    }

    /// Exact removed length up to and including stage `s`.
    pub fn removed_through(&self, s: usize) -> Q {
        &(&self.base.1 - &self.base.0) - &self.stage_length(s)
    }

    pub fn limit_length(&self) -> SVCLimitLength {
        let total = &self.base.1 - &self.base.0;
        let s = self.stage_count();
        // Geometric detection: constant ratio r with 2r < 1 lets the removed
        // tail sum in closed form: sum_j 2^(j-1) f_1 r^(j-1) = f_1 / (1 - 2r).
        let geometric_sum = match self.fractions.len() {
            0 => Some(Q::zero()),
            1 => None,
            _ => {
                let f1 = &self.fractions[0];
                if f1.is_zero() {
                    if self.fractions.iter().all(|f| f.is_zero()) {
                        Some(Q::zero())
                    } else {
                        None
                    }
                } else {
                    let ratio = &self.fractions[1] / f1;
                    let constant = self
                        .fractions
                        .windows(2)
                        .all(|w| !w[0].is_zero() && &w[1] / &w[0] == ratio);
                    if constant && &(&ratio * &Q::int(2)) < &Q::one() {
                        Some(f1 / &(&Q::one() - &(&ratio * &Q::int(2))))
                    } else {
                        None
                    }
                }
            }
        };
        match geometric_sum {
            Some(removed_fraction) => {
                let limit = (&total * &(&Q::one() - &removed_fraction)).max(Q::zero());
                SVCLimitLength {
                    zero_length: limit.is_zero(),
                    value: BoundPair::exact(limit),
                    exact: true,
                }
            }
            None => {
                let upper = self.stage_length(s);
                SVCLimitLength {
                    value: BoundPair {
                        lower: Q::zero(),
                        upper,
                    },
                    exact: false,
                    zero_length: false,
                }
            }
        }
    }

    /// Exact squared distance from abscissa `x` to the stage-`s` interval
    /// union, together with the squared distance to the nearest stage
    /// interval *endpoint*. Endpoints survive every later stage, so the
    /// first value is a lower bound and the second an upper bound for the
    /// (squared) distance to the limit set.
    pub fn dist_sq_at_stage(&self, x: &Q, s: usize) -> Result<(Q, Q), TargetError> {
        if s >= self.stages.len() {
            return Err(TargetError::StageOutOfRange {
                requested: s,
                available: self.stage_count(),
            });
        }
        let mut stage_d: Option<Q> = None;
        let mut endpoint_d: Option<Q> = None;
        for (u, v) in &self.stages[s] {
            let d = if x < u {
                u - x
            } else if x > v {
                x - v
            } else {
                Q::zero()
            };
            let d2 = &d * &d;
            let du = &(u - x) * &(u - x);
            let dv = &(v - x) * &(v - x);
            let de = du.min(dv);
            stage_d = Some(match stage_d {
                Some(best) => best.min(d2),
                None => d2,
            });
            endpoint_d = Some(match endpoint_d {
                Some(best) => best.min(de),
                None => de,
            });
        }
        Ok((stage_d.unwrap(), endpoint_d.unwrap()))
    }
}

/// Four vertices in counter-clockwise convex position. Used for the filled
/// blocks of slit chains: the closure of a slit domain contains the full
/// trapezoid boundary, and the filled trapezoid is used for conservative
/// distance lower bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub vertices: [QPoint; 4],
}

fn cross(o: &QPoint, a: &QPoint, b: &QPoint) -> Q {
    let oa = a - o;
    let ob = b - o;
    &(&oa.re * &ob.im) - &(&oa.im * &ob.re)
}

impl Trapezoid {
    pub fn new(vertices: [QPoint; 4]) -> Result<Trapezoid, TargetError> {
        for i in 0..4 {
            let o = &vertices[i];
            let a = &vertices[(i + 1) % 4];
            let b = &vertices[(i + 2) % 4];
            if !cross(o, a, b).is_positive() {
                return Err(TargetError::BadTrapezoid);
            }
        }
        Ok(Trapezoid { vertices })
    }

    /// Exact: point inside or on the boundary.
    pub fn contains(&self, z: &QPoint) -> bool {
        (0..4).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % 4], z).is_negative())
    }

    /// Exact squared distance to the filled trapezoid.
    pub fn dist_sq_filled(&self, z: &QPoint) -> Q {
        if self.contains(z) {
            return Q::zero();
        }
        self.dist_sq_boundary(z)
    }

    /// Exact squared distance to the trapezoid boundary.
    pub fn dist_sq_boundary(&self, z: &QPoint) -> Q {
        (0..4)
            .map(|i| dist_point_segment_sq(z, &self.vertices[i], &self.vertices[(i + 1) % 4]))
            .min()
            .unwrap()
    }

    pub fn max_norm_sq(&self) -> Q {
        self.vertices
            .iter()
            .map(|v| v.norm_sq())
            .max()
            .unwrap()
    }
}

/// The compact set K: what the deleted-disc construction must avoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum TargetSet {
    Segment {
        a: QPoint,
        b: QPoint,
    },
    CantorProduct {
        svc: SVCSet,
        imag_interval: (Q, Q),
    },
    SlitChainSet {
        blocks: Vec<Trapezoid>,
        accumulation_point: QPoint,
    },
    Union {
        members: Vec<TargetSet>,
    },
}

/// Certified positive envelope of dist(K, unit circle).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D0Bound {
    pub value: BoundPair,
}

impl TargetSet {
    pub fn segment(a: QPoint, b: QPoint) -> Result<TargetSet, TargetError> {
        if a == b {
            return Err(TargetError::DegenerateSegment(a));
        }
        let t = TargetSet::Segment { a, b };
        t.certify_inside_unit_disc()?;
        Ok(t)
    }

    pub fn cantor_product(svc: SVCSet, imag_interval: (Q, Q)) -> Result<TargetSet, TargetError> {
        if imag_interval.0 > imag_interval.1 {
            return Err(TargetError::BadInterval(imag_interval.0, imag_interval.1));
        }
        let t = TargetSet::CantorProduct { svc, imag_interval };
        t.certify_inside_unit_disc()?;
        Ok(t)
    }

    pub fn slit_chain_set(
        blocks: Vec<Trapezoid>,
        accumulation_point: QPoint,
    ) -> Result<TargetSet, TargetError> {
        let t = TargetSet::SlitChainSet {
            blocks,
            accumulation_point,
        };
        t.certify_inside_unit_disc()?;
        Ok(t)
    }

    pub fn union(members: Vec<TargetSet>) -> Result<TargetSet, TargetError> {
        let t = TargetSet::Union { members };
        t.certify_inside_unit_disc()?;
        Ok(t)
    }

    /// Exact maximum of |z|^2 over the set. Attained at endpoints, product
    /// corners, or block vertices, all of which are certified members.
    pub fn max_norm_sq(&self) -> Q {
        match self {
            TargetSet::Segment { a, b } => a.norm_sq().max(b.norm_sq()),
            TargetSet::CantorProduct { svc, imag_interval } => {
                let (a, b) = &svc.base;
                let (c, d) = imag_interval;
                let x2 = (a * a).max(b * b);
                let y2 = (c * c).max(d * d);
                &x2 + &y2
            }
            TargetSet::SlitChainSet {
                blocks,
                accumulation_point,
            } => blocks
                .iter()
                .map(|t| t.max_norm_sq())
                .chain(std::iter::once(accumulation_point.norm_sq()))
                .max()
                .unwrap_or_else(|| accumulation_point.norm_sq()),
            TargetSet::Union { members } => members
                .iter()
                .map(|m| m.max_norm_sq())
                .max()
                .unwrap_or_else(Q::zero),
        }
    }

    pub fn certify_inside_unit_disc(&self) -> Result<(), TargetError> {
        let m = self.max_norm_sq();
        if m >= Q::one() {
            return Err(TargetError::NotInsideUnitDisc(m));
        }
        Ok(())
    }

    /// Certified envelope of the squared distance from `z` to K.
    ///
    /// For Cantor products the lower end is the distance to the stage-`s`
    /// set (a valid lower bound: the limit set is a subset of every stage)
    /// and the upper end is the distance to a certified member (a stage
    /// interval endpoint). All other variants are exact or bracketed by
    /// filled-block / boundary distances.
    pub fn dist_point_sq(&self, z: &QPoint, stage: usize) -> Result<BoundPair, TargetError> {
        match self {
            TargetSet::Segment { a, b } => Ok(BoundPair::exact(dist_point_segment_sq(z, a, b))),
            TargetSet::CantorProduct { svc, imag_interval } => {
                let s = stage.min(svc.stage_count());
                let (dx_lo, dx_hi) = svc.dist_sq_at_stage(&z.re, s)?;
                let (c, d) = imag_interval;
                let dy = if &z.im < c {
                    c - &z.im
                } else if &z.im > d {
                    &z.im - d
                } else {
                    Q::zero()
                };
                let dy2 = &dy * &dy;
                Ok(BoundPair {
                    lower: &dx_lo + &dy2,
                    upper: &dx_hi + &dy2,
                })
            }
            TargetSet::SlitChainSet {
                blocks,
                accumulation_point,
            } => {
                // Lower: distance to filled blocks (the set is a subset of
                // their union plus x0). Upper: distance to certified members
                // (block boundaries and x0).
                let mut lower = dist_point_point_sq(z, accumulation_point);
                let mut upper = lower.clone();
                for b in blocks {
                    lower = lower.min(b.dist_sq_filled(z));
                    upper = upper.min(b.dist_sq_boundary(z));
                }
                Ok(BoundPair { lower, upper })
            }
            TargetSet::Union { members } => {
                let mut out: Option<BoundPair> = None;
                for m in members {
                    let b = m.dist_point_sq(z, stage)?;
                    out = Some(match out {
                        None => b,
                        Some(acc) => BoundPair {
                            lower: acc.lower.min(b.lower),
                            upper: acc.upper.min(b.upper),
                        },
                    });
                }
                Ok(out.unwrap_or_else(|| BoundPair::exact(Q::zero())))
            }
        }
    }

    /// Certified envelope of the distance from K to the unit circle,
    /// d0 = 1 - max |z| over K.
    pub fn d0(&self, tol: &Q) -> Result<D0Bound, TargetError> {
        let m = self.max_norm_sq();
        let root = sqrt_bounds(&m, tol)?;
        let value = BoundPair {
            lower: &Q::one() - &root.upper,
            upper: &Q::one() - &root.lower,
        };
        if !value.lower.is_positive() {
            return Err(TargetError::D0NotPositive(value.lower));
        }
        Ok(D0Bound { value })
    }
}

/// The default fat-Cantor instantiation: base [-1/2, 1/2], geometric
/// schedule with exact limit length 1/2, imaginary part [-1/2, 1/2].
pub fn default_cantor_target(stages: usize) -> Result<TargetSet, TargetError> {
    let svc = build_svc(
        (Q::new(-1, 2), Q::new(1, 2)),
        &geometric_fractions(&Q::new(1, 4), &Q::new(1, 4), stages),
    )?;
    TargetSet::cantor_product(svc, (Q::new(-1, 2), Q::new(1, 2)))
}
