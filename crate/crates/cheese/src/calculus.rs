//! Rational functions with exact Gaussian-rational coefficients: evaluation,
//! symbolic high-order derivatives, sup-norm estimation on a deleted-disc
//! set, the Cauchy-style derivative bound, and the quasi-analyticity
//! (divergence) chain built on it.

use crate::cheese::{Membership, SwissCheese};
use crate::geometry::{
    log_bounds, root_bounds, sqrt_bounds, unit_circle_points, BoundPair, GeometryError, Q, QPoint,
};
use crate::poly::Poly;
use crate::targets::D0Bound;
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Fixed tolerance for the certified log/sqrt envelopes used in budgets and
/// chain checks. Shared so that independent recomputations agree exactly.
pub fn cert_tol() -> Q {
    Q::pow10(-12)
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CalculusError {
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("evaluation at a pole: {0}")]
    PoleAt(QPoint),
    #[error("declared poles do not factor the denominator exactly")]
    PoleDeclMismatch,
    #[error("pole {0} lies neither strictly inside a deleted disc nor strictly outside the closed unit disc")]
    UncertifiedPole(QPoint),
    #[error("point {0} is inside or on deleted disc {1} (s_j not positive)")]
    InsideDeletedDisc(QPoint, usize),
    #[error("point {0} is outside the open unit disc")]
    OutsideUnitDisc(QPoint),
    #[error("no N <= {0} satisfies the tail inequality")]
    NoSuchN(usize),
    #[error("empty k range")]
    EmptyRange,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// An exact pole declaration: location and order, verified against the
/// denominator by exact division at construction time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleDecl {
    pub location: QPoint,
    pub order: u32,
}

/// A rational function in reduced form (gcd of numerator and denominator
/// divided out) with all denominator roots declared exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMap {
    pub num: Poly,
    pub den: Poly,
    pub poles: Vec<PoleDecl>,
}

impl RationalMap {
    /// Build from numerator/denominator plus the candidate pole locations.
    /// The gcd is divided out first; the remaining denominator must factor
    /// exactly as lead * prod (z - p_i)^(m_i) over the candidates.
    pub fn new(
        num: Poly,
        den: Poly,
        candidate_poles: &[QPoint],
    ) -> Result<RationalMap, CalculusError> {
        if den.is_zero() {
            return Err(CalculusError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        } else {
            (num, den)
        };
        let poles = declare_poles(&den, candidate_poles)?;
        Ok(RationalMap { num, den, poles })
    }

    pub fn polynomial(p: Poly) -> RationalMap {
        RationalMap {
            num: p,
            den: Poly::one(),
            poles: vec![],
        }
    }

    /// sum of coef_i / (z - pole_i)^(order_i), plus a polynomial part.
    pub fn from_partial_fractions(
        terms: &[(QPoint, QPoint, u32)],
        poly_part: Poly,
    ) -> Result<RationalMap, CalculusError> {
        let mut num = Poly::zero();
        let mut den = Poly::one();
        for (_, pole, order) in terms {
            den = den.mul(&Poly::linear(pole).pow(*order));
        }
        for (coef, pole, order) in terms {
            let (rest, rem) = den.div_rem(&Poly::linear(pole).pow(*order));
            debug_assert!(rem.is_zero());
            num = num.add(&rest.scale(coef));
        }
        num = num.add(&poly_part.mul(&den));
        let candidates: Vec<QPoint> = terms.iter().map(|(_, p, _)| p.clone()).collect();
        RationalMap::new(num, den, &candidates)
    }

    pub fn eval(&self, z: &QPoint) -> Result<QPoint, CalculusError> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(CalculusError::PoleAt(z.clone()));
        }
        Ok(&self.num.eval(z) / &d)
    }

    /// Exact k-th derivative via the quotient rule, reduced after each step.
    /// The pole set is unchanged (orders grow).
    pub fn derivative(&self, k: u32) -> Result<RationalMap, CalculusError> {
        let mut cur = self.clone();
        let candidates: Vec<QPoint> = self.poles.iter().map(|p| p.location.clone()).collect();
        for _ in 0..k {
            let num = cur
                .num
                .derivative()
                .mul(&cur.den)
                .sub(&cur.num.mul(&cur.den.derivative()));
            let den = cur.den.mul(&cur.den);
            cur = RationalMap::new(num, den, &candidates)?;
        }
        Ok(cur)
    }

    /// Exact |f(z)|^2; errors at poles.
    pub fn modulus_sq(&self, z: &QPoint) -> Result<Q, CalculusError> {
        Ok(self.eval(z)?.norm_sq())
    }
}

/// Factor `den` over the candidate locations; every root must be covered.
fn declare_poles(den: &Poly, candidates: &[QPoint]) -> Result<Vec<PoleDecl>, CalculusError> {
    let mut rest = den.clone();
    let mut out = Vec::new();
    for loc in candidates {
        let lin = Poly::linear(loc);
        let mut order = 0u32;
        loop {
            let (q, r) = rest.div_rem(&lin);
            if r.is_zero() {
                rest = q;
                order += 1;
            } else {
                break;
            }
        }
        if order > 0 {
            out.push(PoleDecl {
                location: loc.clone(),
                order,
            });
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        return Err(CalculusError::PoleDeclMismatch);
    }
    Ok(out)
}

/// Where a certified pole lives relative to a cheese.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "site", rename_all = "snake_case")]
pub enum PoleSite {
    DeletedDisc { group: usize, disc: usize },
    OutsideUnitDisc,
}

/// Certify every pole of `f` against the cheese: strictly inside a named
/// deleted disc, or strictly outside the closed unit disc.
pub fn certify_poles(
    f: &RationalMap,
    cheese: &SwissCheese,
) -> Result<Vec<(PoleDecl, PoleSite)>, CalculusError> {
    let mut out = Vec::new();
    'poles: for pole in &f.poles {
        for (gi, group) in cheese.groups.iter().enumerate() {
            for (di, d) in group.deleted.iter().enumerate() {
                if d.strictly_contains(&pole.location) {
                    out.push((pole.clone(), PoleSite::DeletedDisc { group: gi, disc: di }));
                    continue 'poles;
                }
            }
        }
        if pole.location.norm_sq() > Q::one() {
            out.push((pole.clone(), PoleSite::OutsideUnitDisc));
            continue;
        }
        return Err(CalculusError::UncertifiedPole(pole.location.clone()));
    }
    Ok(out)
}

/// Certified lower bound on the distance from X to a pole site.
fn pole_clearance_lower(
    pole: &PoleDecl,
    site: &PoleSite,
    cheese: &SwissCheese,
    tol: &Q,
) -> Result<Q, CalculusError> {
    match site {
        PoleSite::DeletedDisc { group, disc } => {
            let d = &cheese.groups[*group].deleted[*disc];
            let off = sqrt_bounds(
                &crate::geometry::dist_point_point_sq(&pole.location, &d.center),
                tol,
            )?;
            Ok(&d.radius - &off.upper)
        }
        PoleSite::OutsideUnitDisc => {
            let m = sqrt_bounds(&pole.location.norm_sq(), tol)?;
            Ok(&m.lower - &Q::one())
        }
    }
}

/// Sampling plan for sup-norm estimation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupNormPlan {
    /// points per circle (outer boundary and each deleted-disc boundary)
    pub circle_points: usize,
    /// interior grid spacing denominator; 0 disables the grid
    pub grid_denom: i64,
}

impl Default for SupNormPlan {
    fn default() -> Self {
        SupNormPlan {
            circle_points: 64,
            grid_denom: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupNormEstimate {
    pub value: BoundPair,
    /// true when no analytic upper bound was available; the upper end then
    /// repeats the sampled lower bound and downstream checks must be
    /// reported as conditional.
    pub sample_only: bool,
    pub samples: usize,
}

impl SupNormEstimate {
    /// An exactly known sup norm (e.g. constants, or |z^k| on the disc).
    pub fn exact(v: Q) -> SupNormEstimate {
        SupNormEstimate {
            value: BoundPair::exact(v),
            sample_only: false,
            samples: 0,
        }
    }
}

/// Sampled lower envelope of |f|_X plus, when the pole certificate allows
/// it, an analytic upper bound sup|num| / inf|den| over the closed unit
/// disc with pole clearances.
pub fn sup_norm(
    f: &RationalMap,
    cheese: &SwissCheese,
    plan: &SupNormPlan,
) -> Result<SupNormEstimate, CalculusError> {
    let sites = certify_poles(f, cheese)?;
    let tol = cert_tol();
    let mut lower = Q::zero();
    let mut count = 0usize;

    let consider = |z: &QPoint, lower: &mut Q, count: &mut usize| -> Result<(), CalculusError> {
        if cheese.membership(z) == Membership::Out {
            return Ok(());
        }
        if let Ok(m2) = f.modulus_sq(z) {
            let m = sqrt_bounds(&m2, &tol)?;
            if &m.lower > lower {
                *lower = m.lower;
            }
            *count += 1;
        }
        Ok(())
    };

    for u in unit_circle_points(plan.circle_points) {
        consider(&u, &mut lower, &mut count)?;
    }
    for group in &cheese.groups {
        for d in &group.deleted {
            for u in unit_circle_points(plan.circle_points) {
                let z = &d.center + &u.scale(&d.radius);
                consider(&z, &mut lower, &mut count)?;
            }
        }
    }
    if plan.grid_denom > 0 {
        let g = plan.grid_denom;
        for i in -g..=g {
            for j in -g..=g {
                let z = QPoint::new(Q::new(i, g), Q::new(j, g));
                if z.norm_sq() <= Q::one() {
                    consider(&z, &mut lower, &mut count)?;
                }
            }
        }
    }

    // Analytic upper bound: |num(z)| <= sum |coeff| on the closed unit disc;
    // |den(z)| >= |lead| * prod clearance_i^(order_i) on X.
    let num_upper = f.num.coeff_modulus_sum_upper(&tol);
    let mut den_lower = match f.den.leading() {
        Some(l) => sqrt_bounds(&l.norm_sq(), &tol)?.lower,
        None => return Err(CalculusError::ZeroDenominator),
    };
    let mut have_upper = true;
    for (pole, site) in &sites {
        let s = pole_clearance_lower(pole, site, cheese, &tol)?;
        if !s.is_positive() {
            have_upper = false;
            break;
        }
        for _ in 0..pole.order {
            den_lower = &den_lower * &s;
        }
    }
    if have_upper && den_lower.is_positive() {
        let upper = (&num_upper / &den_lower).max(lower.clone());
        Ok(SupNormEstimate {
            value: BoundPair { lower, upper },
            sample_only: false,
            samples: count,
        })
    } else {
        Ok(SupNormEstimate {
            value: BoundPair {
                lower: lower.clone(),
                upper: lower,
            },
            sample_only: true,
            samples: count,
        })
    }
}

/// Certified envelope of k! (r_0/s_0^(k+1) + sum_j r_j/s_j^(k+1)) |f|_X,
/// the derivative bound at `z`, summed over the cheese's finitely many
/// deleted discs. r_0 = 1 and s_0 = 1 - |z|.
pub fn cauchy_bound(
    cheese: &SwissCheese,
    z: &QPoint,
    k: u32,
    supnorm: &SupNormEstimate,
) -> Result<BoundPair, CalculusError> {
    let tol = cert_tol();
    let zmod = sqrt_bounds(&z.norm_sq(), &tol)?;
    let s0 = BoundPair {
        lower: &Q::one() - &zmod.upper,
        upper: &Q::one() - &zmod.lower,
    };
    if !s0.lower.is_positive() {
        return Err(CalculusError::OutsideUnitDisc(z.clone()));
    }
    let mut sum_lower = s0.upper.pow(-(k as i32 + 1));
    let mut sum_upper = s0.lower.pow(-(k as i32 + 1));
    let mut disc_index = 0usize;
    for group in &cheese.groups {
        for d in &group.deleted {
            let dist = sqrt_bounds(&crate::geometry::dist_point_point_sq(z, &d.center), &tol)?;
            let s = BoundPair {
                lower: &dist.lower - &d.radius,
                upper: &dist.upper - &d.radius,
            };
            if !s.lower.is_positive() {
                return Err(CalculusError::InsideDeletedDisc(z.clone(), disc_index));
            }
            sum_lower = &sum_lower + &(&d.radius * &s.upper.pow(-(k as i32 + 1)));
            sum_upper = &sum_upper + &(&d.radius * &s.lower.pow(-(k as i32 + 1)));
            disc_index += 1;
        }
    }
    let kf = factorial(k);
    Ok(BoundPair {
        lower: &(&kf * &sum_lower) * &supnorm.value.lower,
        upper: &(&kf * &sum_upper) * &supnorm.value.upper,
    })
}

pub fn factorial(k: u32) -> Q {
    let mut f = BigInt::one();
    for i in 2..=k.max(1) {
        f *= BigInt::from(i);
    }
    Q::from_big(num_rational::BigRational::from_integer(f))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub k: u32,
    /// exact |f^(k)(z)|^2
    pub exact_sq: Q,
    pub bound: BoundPair,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeBoundReport {
    pub point: QPoint,
    pub checks: Vec<DerivativeCheck>,
    /// true when the sup norm had no analytic upper bound; a pass is then
    /// conditional on the sampled value.
    pub conditional: bool,
    pub all_pass: bool,
}

/// Compare exact k-th derivative moduli against the certified bound for
/// each k in `krange`. The underlying estimate is a theorem, so any failure
/// on certified inputs indicates an arithmetic bug.
pub fn verify_derivative_bound(
    cheese: &SwissCheese,
    f: &RationalMap,
    z: &QPoint,
    krange: std::ops::RangeInclusive<u32>,
    supnorm: &SupNormEstimate,
) -> Result<DerivativeBoundReport, CalculusError> {
    certify_poles(f, cheese)?;
    let mut checks = Vec::new();
    let mut all_pass = true;
    let mut cur = f.derivative(*krange.start())?;
    for k in krange.clone() {
        if k != *krange.start() {
            cur = cur.derivative(1)?;
        }
        let exact_sq = cur.modulus_sq(z)?;
        let bound = cauchy_bound(cheese, z, k, supnorm)?;
        let pass = exact_sq <= &bound.upper * &bound.upper;
        all_pass &= pass;
        checks.push(DerivativeCheck {
            k,
            exact_sq,
            bound,
            pass,
        });
    }
    Ok(DerivativeBoundReport {
        point: z.clone(),
        checks,
        conditional: supnorm.sample_only,
        all_pass,
    })
}

/// The sequence M_k = k! (1/d0_lower^(k+1) + U_k^k) |f|_upper with U_k the
/// upper envelope of log(k+3).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSequence {
    pub d0: D0Bound,
    pub supnorm: SupNormEstimate,
    pub entries: Vec<(u32, Q)>,
}

pub fn derivative_estimate_sequence(
    d0: &D0Bound,
    supnorm: &SupNormEstimate,
    krange: std::ops::RangeInclusive<u32>,
) -> Result<BoundSequence, CalculusError> {
    if krange.is_empty() {
        return Err(CalculusError::EmptyRange);
    }
    let tol = cert_tol();
    let mut entries = Vec::new();
    for k in krange {
        let u_k = log_bounds(&Q::int(k as i64 + 3), &tol)?.upper;
        let m_k = &(&factorial(k)
            * &(&d0.value.lower.pow(-(k as i32 + 1)) + &u_k.pow(k as i32)))
            * &supnorm.value.upper;
        entries.push((k, m_k));
    }
    Ok(BoundSequence {
        d0: d0.clone(),
        supnorm: supnorm.clone(),
        entries,
    })
}

/// Smallest N <= scan_limit such that L_k^k >= 1/d0_lower^(k+1), with L_k
/// the certified lower envelope of log(k+3), holds for every k in
/// [N, scan_limit]. The check beyond scan_limit is heuristic (the ratio is
/// eventually increasing); that caveat is part of the returned value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChosenN {
    pub n: u32,
    pub scan_limit: u32,
    pub note: String,
}

pub fn choose_n(d0: &D0Bound, scan_limit: u32) -> Result<ChosenN, CalculusError> {
    assert!(scan_limit >= 1);
    let tol = cert_tol();
    let mut first_good: Option<u32> = None;
    // Walk downward so first_good ends at the smallest N with an all-good tail.
    let mut tail_good = true;
    let mut holds = Vec::with_capacity(scan_limit as usize);
    for k in 1..=scan_limit {
        let l_k = log_bounds(&Q::int(k as i64 + 3), &tol)?.lower;
        let ok = &l_k.pow(k as i32) * &d0.value.lower.pow(k as i32 + 1) >= Q::one();
        holds.push(ok);
    }
    for k in (1..=scan_limit).rev() {
        tail_good &= holds[(k - 1) as usize];
        if tail_good {
            first_good = Some(k);
        }
    }
    match first_good {
        Some(n) => Ok(ChosenN {
            n,
            scan_limit,
            note: "verified for k in [N, scan_limit]; beyond scan_limit heuristic (ratio eventually increasing)".into(),
        }),
        None => Err(CalculusError::NoSuchN(scan_limit as usize)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcChainStep {
    pub k: u32,
    /// asserted only for k >= N
    pub tail_inequality: Option<bool>,
    /// (k!)^(1/k) <= k, checked as k! <= k^k
    pub factorial_root: bool,
    /// M_k <= 2 |f|_upper (k U_k)^k
    pub chain_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcChainReport {
    pub n: u32,
    pub steps: Vec<DcChainStep>,
    /// certified envelope of sum over k in [N, N+kspan] of
    /// 1/((2 |f|)^(1/k) k U_k)
    pub partial_sum: BoundPair,
    pub all_pass: bool,
}

/// Verify, termwise, the divergence chain: for k >= N the tail inequality
/// 1/d0^(k+1) <= U_k^k gives M_k <= 2 k! U_k^k |f|, then (k!)^(1/k) <= k
/// gives 1/M_k^(1/k) >= 1/((2|f|)^(1/k) k U_k). Reports each inequality
/// and the partial sum of the final lower-bound terms.
pub fn dc_chain_verify(
    seq: &BoundSequence,
    n: u32,
    kspan: u32,
) -> Result<DcChainReport, CalculusError> {
    let tol = cert_tol();
    let two_sup = &Q::int(2) * &seq.supnorm.value.upper;
    let mut steps = Vec::new();
    let mut partial = BoundPair::exact(Q::zero());
    let mut all_pass = true;
    for k in n..=(n + kspan) {
        let entry = seq
            .entries
            .iter()
            .find(|(kk, _)| *kk == k)
            .ok_or(CalculusError::EmptyRange)?;
        let m_k = &entry.1;
        let u_env = log_bounds(&Q::int(k as i64 + 3), &tol)?;
        let u_k = &u_env.upper;

        let tail = if k >= n {
            Some(&seq.d0.value.lower.pow(-(k as i32 + 1)) <= &u_k.pow(k as i32))
        } else {
            None
        };
        let kf = factorial(k);
        let k_q = Q::int(k as i64);
        let factorial_root = kf <= k_q.pow(k as i32);
        let chain_bound = m_k <= &(&two_sup * &(&k_q * u_k).pow(k as i32));
        all_pass &= tail.unwrap_or(true) && factorial_root && chain_bound;

        // Partial-sum term 1/((2|f|)^(1/k) k U_k), as a certified envelope.
        let root = root_bounds(&two_sup, k, &tol)?;
        if root.lower.is_positive() && u_env.lower.is_positive() {
            let term_lower = (&(&root.upper * &k_q) * u_k).recip();
            let term_upper = (&(&root.lower * &k_q) * &u_env.lower).recip();
            partial = partial.add(&BoundPair {
                lower: term_lower,
                upper: term_upper,
            });
        }
        steps.push(DcChainStep {
            k,
            tail_inequality: tail,
            factorial_root,
            chain_bound,
        });
    }
    Ok(DcChainReport {
        n,
        steps,
        partial_sum: partial,
        all_pass,
    })
}
