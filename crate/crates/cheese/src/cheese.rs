//! The deleted-disc pipeline: enumerate candidate discs avoiding the target
//! set, attach per-disc budgets, generate small-radius disc families inside
//! each candidate, assemble the cheese, and certify every inequality the
//! construction relies on. Also the empirical contract checker for
//! unit-function candidates (sequences of rational maps that should converge
//! to a function vanishing exactly off a parent disc).

use crate::calculus::{cert_tol, RationalMap};
use crate::geometry::{
    log_bounds, sqrt_bounds, unit_circle_points, BoundPair, Disc, GeometryError, Q, QPoint,
};
use crate::targets::{TargetError, TargetSet};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CheeseError {
    #[error("certificate failed: {0} ({1})")]
    CertificateFailed(String, String),
    #[error("budget too small for {m_count} discs at minimum spacing (base radius {base})")]
    Capacity { m_count: usize, base: Q },
    #[error("m_count must be >= 1")]
    EmptyFamily,
    #[error("duplicate group index {0}")]
    DuplicateIndex(u32),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Target(#[from] TargetError),
}

/// A candidate disc B_n: certified to sit inside the open unit disc at
/// positive distance from the target set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDisc {
    pub disc: Disc,
    pub n: u32,
    /// envelope of dist(B_n, K); the lower end is what budgets consume
    pub d_n: BoundPair,
    /// Cantor stage the distance was certified against
    pub stage: usize,
    pub accepted: bool,
}

/// The radii-sum budget for one candidate disc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub n: u32,
    pub epsilon: Q,
    pub kmax: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheeseGroup {
    pub candidate: CandidateDisc,
    pub budget: Budget,
    pub deleted: Vec<Disc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// The closed unit disc minus the union of all deleted discs, with the
/// target set it was built to avoid and the certificate bundle from
/// assembly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwissCheese {
    pub outer: Disc,
    pub target: TargetSet,
    pub groups: Vec<CheeseGroup>,
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    /// on a deleted-disc circle or the outer circle: still a member, flagged
    Boundary,
}

/// Deterministic enumeration of candidate discs avoiding `target`.
///
/// Levels l = 2, 3, ...: radius 1/2^(l+1), centers (i/2^l, j/2^l) scanned
/// row-major (i ascending, then j ascending). A candidate is accepted when
/// its closure stays strictly inside the closed unit disc (|c| + r < 1,
/// decided on squares) and its certified distance to the target is
/// positive. Returns the first `count` acceptances, indexed from 1 in
/// acceptance order.
pub fn enumerate_candidates(
    target: &TargetSet,
    count: usize,
    stage: usize,
) -> Result<Vec<CandidateDisc>, CheeseError> {
    enumerate_candidates_with_progress(target, count, stage, |_, _| {})
}

/// As `enumerate_candidates`, reporting (scanned, accepted) periodically.
pub fn enumerate_candidates_with_progress(
    target: &TargetSet,
    count: usize,
    stage: usize,
    mut progress: impl FnMut(usize, usize),
) -> Result<Vec<CandidateDisc>, CheeseError> {
    let tol = cert_tol();
    let mut out = Vec::with_capacity(count);
    let mut scanned = 0usize;
    for level in 2u32.. {
        if out.len() >= count {
            break;
        }
        let q = 1i64 << level;
        let radius = Q::new(1, 2 * q);
        for i in -q..=q {
            for j in -q..=q {
                if out.len() >= count {
                    break;
                }
                scanned += 1;
                if scanned % 512 == 0 {
                    progress(scanned, out.len());
                }
                let center = QPoint::new(Q::new(i, q), Q::new(j, q));
                // closure inside the open unit disc: |c|^2 < (1 - r)^2
                let slack = &Q::one() - &radius;
                if center.norm_sq() >= &slack * &slack {
                    continue;
                }
                let dist2 = target.dist_point_sq(&center, stage)?;
                let center_dist = BoundPair {
                    lower: sqrt_bounds(&dist2.lower, &tol)?.lower,
                    upper: sqrt_bounds(&dist2.upper, &tol)?.upper,
                };
                let d_n = BoundPair {
                    lower: &center_dist.lower - &radius,
                    upper: &center_dist.upper - &radius,
                };
                if !d_n.lower.is_positive() {
                    continue;
                }
                out.push(CandidateDisc {
                    disc: Disc::open(center, radius.clone())?,
                    n: out.len() as u32 + 1,
                    d_n,
                    stage,
                    accepted: true,
                });
            }
        }
    }
    progress(scanned, out.len());
    Ok(out)
}

/// Re-run the acceptance predicate on a candidate, independently of the
/// enumeration. Used by assembly and by tests.
pub fn acceptance_predicate(
    target: &TargetSet,
    disc: &Disc,
    stage: usize,
) -> Result<bool, CheeseError> {
    let slack = &Q::one() - &disc.radius;
    if !slack.is_positive() || disc.center.norm_sq() >= &slack * &slack {
        return Ok(false);
    }
    let dist2 = target.dist_point_sq(&disc.center, stage)?;
    let lower = &sqrt_bounds(&dist2.lower, &cert_tol())?.lower - &disc.radius;
    Ok(lower.is_positive())
}

/// epsilon_n = (1/2) * min over 1 <= k <= kmax of d_lower^(k+1) L_k^k / 2^n,
/// with L_k the certified lower bound of log(k+3). The leading 1/2 makes
/// every downstream inequality strict.
pub fn epsilon_budget(d_lower: &Q, n: u32, kmax: u32) -> Budget {
    assert!(d_lower.is_positive() && kmax >= 1);
    let tol = cert_tol();
    let mut min_term: Option<Q> = None;
    for k in 1..=kmax {
        let l_k = log_bounds(&Q::int(k as i64 + 3), &tol)
            .expect("log argument >= 4")
            .lower;
        let term = &d_lower.pow(k as i32 + 1) * &l_k.pow(k as i32);
        min_term = Some(match min_term {
            None => term,
            Some(m) => m.min(term),
        });
    }
    let halving = Q::new(1, 2);
    let scale = Q::int(2).pow(n as i32).recip();
    let epsilon = &(&halving * &min_term.unwrap()) * &scale;
    Budget { n, epsilon, kmax }
}

/// One side-by-side check of the summed budget inequality at a fixed k:
/// sum over groups of eps_n / d_n_lower^(k+1) <= L_k^k, left side exact
/// from stored rationals, right side the certified lower envelope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonBoundCheck {
    pub k: u32,
    pub lhs: Q,
    pub rhs: Q,
    pub pass: bool,
}

pub fn verify_epsilon_bound(cheese: &SwissCheese, k: u32) -> EpsilonBoundCheck {
    let tol = cert_tol();
    let mut lhs = Q::zero();
    for g in &cheese.groups {
        lhs = &lhs + &(&g.budget.epsilon * &g.candidate.d_n.lower.pow(-(k as i32 + 1)));
    }
    let rhs = log_bounds(&Q::int(k as i64 + 3), &tol)
        .expect("log argument >= 4")
        .lower
        .pow(k as i32);
    let pass = lhs <= rhs;
    EpsilonBoundCheck { k, lhs, rhs, pass }
}

/// Pairwise disjoint open discs inside `b.disc` with exact radii sum below
/// the budget.
///
/// Default placement (seed = None): ring of `m_count` exact rational unit
/// directions at half the parent radius, disc radii shrinking geometrically
/// (base, base/2, base/4, ...) from a base small enough that disjointness
/// and the radii sum are guaranteed by construction. seed = Some(s) keeps
/// the ring but scales each radius by a random factor in [1/2, 1], which
/// preserves every guarantee.
pub fn generate_mckissick_discs(
    b: &CandidateDisc,
    budget: &Budget,
    m_count: usize,
    seed: Option<u64>,
) -> Result<Vec<Disc>, CheeseError> {
    if m_count == 0 {
        return Err(CheeseError::EmptyFamily);
    }
    let r_b = &b.disc.radius;
    let eps = &budget.epsilon;
    let half = Q::new(1, 2);
    if m_count == 1 {
        let radius = (eps * &half).min(r_b * &half);
        if radius < min_spacing() {
            return Err(CheeseError::Capacity {
                m_count,
                base: radius,
            });
        }
        return Ok(vec![Disc::open(b.disc.center.clone(), radius)?]);
    }
    // Cheap precheck: base <= r_b/4 < 1/4, so the smallest radius
    // base/2^m_count is already below the spacing floor once m_count
    // reaches the floor's bit budget. Avoids the O(m^2) chord scan below.
    if m_count >= 254 {
        return Err(CheeseError::Capacity {
            m_count,
            base: r_b * &Q::new(1, 4),
        });
    }
    let ring_radius = r_b * &half;
    let dirs = unit_circle_points(m_count);
    // Exact minimum pairwise chord distance on the ring.
    let mut min_chord_sq: Option<Q> = None;
    for i in 0..m_count {
        for j in (i + 1)..m_count {
            let d2 = (&dirs[i] - &dirs[j]).norm_sq();
            min_chord_sq = Some(match min_chord_sq.take() {
                None => d2,
                Some(m) => m.min(d2),
            });
        }
    }
    let chord_lower =
        &sqrt_bounds(&min_chord_sq.unwrap(), &cert_tol())?.lower * &ring_radius;
    let base = (eps * &half)
        .min(&chord_lower * &half)
        .min(r_b * &Q::new(1, 4));
    // Smallest radius must stay above the representable-spacing floor.
    let smallest = &base * &Q::int(2).pow(m_count as i32).recip();
    if !base.is_positive() || smallest < min_spacing() {
        return Err(CheeseError::Capacity { m_count, base });
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut out = Vec::with_capacity(m_count);
    for (i, u) in dirs.iter().enumerate() {
        let center = &b.disc.center + &u.scale(&ring_radius);
        let mut radius = &base * &Q::int(2).pow(i as i32 + 1).recip();
        if let Some(rng) = rng.as_mut() {
            // factor in [1/2, 1] with denominator 64: shrinking only
            let f = Q::new(rng.gen_range(32..=64), 64);
            radius = &radius * &f;
        }
        out.push(Disc::open(center, radius)?);
    }
    Ok(out)
}

/// Absolute floor on generated radii; below this the family is treated as
/// out of capacity rather than silently emitting astronomically long
/// rationals.
fn min_spacing() -> Q {
    Q::int(2).pow(-256)
}

impl SwissCheese {
    /// Assemble and certify. Every certificate is recorded; the first
    /// failing certificate aborts assembly by name.
    pub fn assemble(
        target: TargetSet,
        groups: Vec<CheeseGroup>,
    ) -> Result<SwissCheese, CheeseError> {
        let outer = Disc::unit_closed();
        let mut certs = Vec::new();
        let push = |certs: &mut Vec<Certificate>,
                        name: &str,
                        pass: bool,
                        detail: String|
         -> Result<(), CheeseError> {
            certs.push(Certificate {
                name: name.into(),
                pass,
                detail: detail.clone(),
            });
            if pass {
                Ok(())
            } else {
                Err(CheeseError::CertificateFailed(name.into(), detail))
            }
        };

        let mut seen = std::collections::BTreeSet::new();
        for g in &groups {
            if !seen.insert(g.candidate.n) {
                return Err(CheeseError::DuplicateIndex(g.candidate.n));
            }
        }

        for g in &groups {
            let n = g.candidate.n;
            push(
                &mut certs,
                "candidate_acceptance",
                g.candidate.accepted
                    && acceptance_predicate(&target, &g.candidate.disc, g.candidate.stage)?
                    && g.candidate.d_n.lower.is_positive(),
                format!("group {n}"),
            )?;
            push(
                &mut certs,
                "budget_positive",
                g.budget.epsilon.is_positive() && g.budget.n == n,
                format!("group {n}: epsilon = {}", g.budget.epsilon),
            )?;
            // epsilon_n below the per-k budget line for every k <= kmax
            let reference = epsilon_budget(&g.candidate.d_n.lower, n, g.budget.kmax);
            push(
                &mut certs,
                "budget_within_bound",
                g.budget.epsilon <= reference.epsilon,
                format!("group {n}: epsilon = {}", g.budget.epsilon),
            )?;
            for (i, d) in g.deleted.iter().enumerate() {
                push(
                    &mut certs,
                    "deleted_inside_candidate",
                    g.candidate.disc.closure_contains_disc(d),
                    format!("group {n}, disc {i}"),
                )?;
                for (j, e) in g.deleted.iter().enumerate().skip(i + 1) {
                    push(
                        &mut certs,
                        "deleted_pairwise_disjoint",
                        d.open_disjoint(e),
                        format!("group {n}, discs {i} and {j}"),
                    )?;
                }
            }
            let radii_sum = g
                .deleted
                .iter()
                .fold(Q::zero(), |acc, d| &acc + &d.radius);
            push(
                &mut certs,
                "radii_sum_below_budget",
                radii_sum < g.budget.epsilon,
                format!("group {n}: sum = {radii_sum}"),
            )?;
        }

        let cheese = SwissCheese {
            outer,
            target,
            groups,
            certificates: Vec::new(),
        };
        let kmax = cheese
            .groups
            .iter()
            .map(|g| g.budget.kmax)
            .min()
            .unwrap_or(0);
        for k in 1..=kmax {
            let chk = verify_epsilon_bound(&cheese, k);
            push(
                &mut certs,
                "epsilon_bound",
                chk.pass,
                format!("k = {k}: lhs = {}, rhs = {}", chk.lhs, chk.rhs),
            )?;
        }
        Ok(SwissCheese {
            certificates: certs,
            ..cheese
        })
    }

    /// Exact membership against the finitely many discs.
    pub fn membership(&self, z: &QPoint) -> Membership {
        let n2 = z.norm_sq();
        if n2 > Q::one() {
            return Membership::Out;
        }
        let mut boundary = n2 == Q::one();
        for g in &self.groups {
            for d in &g.deleted {
                if d.strictly_contains(z) {
                    return Membership::Out;
                }
                boundary |= d.on_circle(z);
            }
        }
        if boundary {
            Membership::Boundary
        } else {
            Membership::In
        }
    }

    pub fn deleted_disc_count(&self) -> usize {
        self.groups.iter().map(|g| g.deleted.len()).sum()
    }
}

/// A candidate for the unit-function contract: a parent disc D, the deleted
/// family U inside it, and a sequence of rational maps expected to converge
/// (off U) to a function vanishing exactly outside D.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitFunctionCandidate {
    pub parent: Disc,
    pub deleted: Vec<Disc>,
    pub sequence: Vec<RationalMap>,
}

/// Sample plan for the contract checker. Needs at least one point in each
/// of: inside the parent disc but off the deleted family, the exterior
/// collar just outside the parent circle, and the far complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitFunctionPlan {
    pub inside: Vec<QPoint>,
    pub outside: Vec<QPoint>,
    /// |F| must stay below this at outside samples; Cauchy gaps too
    pub tol: Q,
    /// |F| must stay above this at inside samples
    pub floor: Q,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("sequence is empty")]
    EmptySequence,
    #[error("sample plan misses a required region: {0}")]
    MissingRegion(&'static str),
}

/// Sampled (not proved) verdicts; failure flags carry witness points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractReport {
    /// always "EMPIRICAL": sampled evidence, not a proof
    pub label: String,
    pub poles_ok: bool,
    pub pole_witness: Option<QPoint>,
    pub convergence_ok: bool,
    pub convergence_witness: Option<QPoint>,
    pub zero_outside_ok: bool,
    pub zero_witness: Option<QPoint>,
    pub nonzero_inside_ok: bool,
    pub nonzero_witness: Option<QPoint>,
}

impl ContractReport {
    pub fn all_ok(&self) -> bool {
        self.poles_ok && self.convergence_ok && self.zero_outside_ok && self.nonzero_inside_ok
    }
}

/// Run the four sampled checks: every pole strictly inside the deleted
/// family; the final Cauchy gap max over samples |f_last - f_prev| below
/// tol; |f_last| <= tol at outside samples; |f_last| >= floor at inside
/// samples. All comparisons are exact on squared moduli.
pub fn check_unit_function(
    cand: &UnitFunctionCandidate,
    plan: &UnitFunctionPlan,
) -> Result<ContractReport, PlanError> {
    if cand.sequence.is_empty() {
        return Err(PlanError::EmptySequence);
    }
    let inside_off_u: Vec<&QPoint> = plan
        .inside
        .iter()
        .filter(|z| {
            cand.parent.strictly_contains(z)
                && !cand.deleted.iter().any(|d| d.strictly_contains(z) || d.on_circle(z))
        })
        .collect();
    if inside_off_u.is_empty() {
        return Err(PlanError::MissingRegion("inside parent, off deleted family"));
    }
    let collar_limit = &cand.parent.radius * &Q::new(3, 2);
    let has_collar = plan.outside.iter().any(|z| {
        let d2 = crate::geometry::dist_point_point_sq(z, &cand.parent.center);
        d2 >= &cand.parent.radius * &cand.parent.radius && d2 <= &collar_limit * &collar_limit
    });
    if !has_collar {
        return Err(PlanError::MissingRegion("exterior collar"));
    }
    if plan.outside.is_empty() {
        return Err(PlanError::MissingRegion("complement of parent disc"));
    }

    let mut poles_ok = true;
    let mut pole_witness = None;
    for f in &cand.sequence {
        for p in &f.poles {
            if !cand.deleted.iter().any(|d| d.strictly_contains(&p.location)) {
                poles_ok = false;
                pole_witness.get_or_insert(p.location.clone());
            }
        }
    }

    let tol_sq = &plan.tol * &plan.tol;
    let floor_sq = &plan.floor * &plan.floor;
    let last = cand.sequence.last().unwrap();

    let mut convergence_ok = true;
    let mut convergence_witness = None;
    if cand.sequence.len() >= 2 {
        let prev = &cand.sequence[cand.sequence.len() - 2];
        for z in plan.inside.iter().chain(plan.outside.iter()) {
            if let (Ok(a), Ok(b)) = (last.eval(z), prev.eval(z)) {
                if (&a - &b).norm_sq() > tol_sq {
                    convergence_ok = false;
                    convergence_witness.get_or_insert(z.clone());
                }
            }
        }
    }

    let mut zero_outside_ok = true;
    let mut zero_witness = None;
    for z in &plan.outside {
        if let Ok(v) = last.eval(z) {
            if v.norm_sq() > tol_sq {
                zero_outside_ok = false;
                zero_witness.get_or_insert(z.clone());
            }
        }
    }

    let mut nonzero_inside_ok = true;
    let mut nonzero_witness = None;
    for z in &inside_off_u {
        match last.eval(z) {
            Ok(v) if v.norm_sq() >= floor_sq => {}
            _ => {
                nonzero_inside_ok = false;
                nonzero_witness.get_or_insert((*z).clone());
            }
        }
    }

    Ok(ContractReport {
        label: "EMPIRICAL".into(),
        poles_ok,
        pole_witness,
        convergence_ok,
        convergence_witness,
        zero_outside_ok,
        zero_witness,
        nonzero_inside_ok,
        nonzero_witness,
    })
}

/// A candidate family that passes the contract: 16 simple poles on an exact
/// rational ring at a quarter of the parent radius, each wrapped in its own
/// small deleted disc; the sequence is the partial-fraction partial sums of
/// the strictly proper product prod (-p_k)/(w - p_k) (w = z - center),
/// padded with the full sum so the final Cauchy gap is exactly zero.
///
/// The product is 1 at the center; near the center each factor has modulus
/// >= ring/(ring + |w|) >= 8/9 for |w| <= r/32, so |F| >= (8/9)^16 > 1/10;
/// outside the collar |w| >= 9r/8 each factor has modulus <= 2/7, so
/// |F| <= (2/7)^16 < 1e-9.
pub fn tuned_unit_candidate(parent: &Disc) -> UnitFunctionCandidate {
    let n_poles = 16usize;
    let ring = &parent.radius * &Q::new(1, 4);
    let hole_radius = &parent.radius * &Q::new(1, 64);
    let poles_rel: Vec<QPoint> = unit_circle_points(n_poles)
        .into_iter()
        .map(|u| u.scale(&ring))
        .collect();
    let deleted: Vec<Disc> = poles_rel
        .iter()
        .map(|p| Disc::open(&parent.center + p, hole_radius.clone()).unwrap())
        .collect();

    // A_k = prod_j (-p_j) / prod_{j != k} (p_k - p_j)
    let mut numerator = QPoint::int(1, 0);
    for p in &poles_rel {
        numerator = &numerator * &(-p);
    }
    let mut coeffs = Vec::with_capacity(n_poles);
    for (k, pk) in poles_rel.iter().enumerate() {
        let mut den = QPoint::int(1, 0);
        for (j, pj) in poles_rel.iter().enumerate() {
            if j != k {
                den = &den * &(pk - pj);
            }
        }
        coeffs.push(&numerator / &den);
    }

    // Partial sums in absolute coordinates: A_k / (z - (center + p_k)).
    let mut sequence = Vec::new();
    for n in 1..=n_poles {
        let terms: Vec<(QPoint, QPoint, u32)> = (0..n)
            .map(|k| {
                (
                    coeffs[k].clone(),
                    &parent.center + &poles_rel[k],
                    1u32,
                )
            })
            .collect();
        sequence.push(
            RationalMap::from_partial_fractions(&terms, crate::poly::Poly::zero())
                .expect("distinct poles"),
        );
    }
    // Constant tail: the limit is reached at n = n_poles.
    sequence.push(sequence.last().unwrap().clone());
    UnitFunctionCandidate {
        parent: parent.clone(),
        deleted,
        sequence,
    }
}

/// Default sample plan for `tuned_unit_candidate`: center plus an inner
/// ring at r/32 (inside, off the deleted family), an exterior collar ring
/// at 9r/8, and a far ring at 3r/2.
pub fn tuned_unit_plan(parent: &Disc, points_per_ring: usize) -> UnitFunctionPlan {
    let mut inside = vec![parent.center.clone()];
    for u in unit_circle_points(points_per_ring) {
        inside.push(&parent.center + &u.scale(&(&parent.radius * &Q::new(1, 32))));
    }
    let mut outside = Vec::new();
    for u in unit_circle_points(points_per_ring) {
        outside.push(&parent.center + &u.scale(&(&parent.radius * &Q::new(9, 8))));
        outside.push(&parent.center + &u.scale(&(&parent.radius * &Q::new(3, 2))));
    }
    UnitFunctionPlan {
        inside,
        outside,
        tol: Q::pow10(-6),
        floor: Q::new(1, 10),
    }
}
