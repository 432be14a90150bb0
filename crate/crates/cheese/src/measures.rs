//! Linear-feasibility search for representing and Jensen measures on
//! discretized sets: weighted point measures, constraint assembly from
//! test functions, an exact solver front end, a unit-circle positive
//! control, and an evidence harness over cheese target points.
//!
//! Every result carries a discretization-gap disclaimer: feasibility or
//! infeasibility of the discretized problem neither proves nor refutes
//! statements about the continuum.

use crate::calculus::{cert_tol, CalculusError, RationalMap};
use crate::cheese::{Membership, SwissCheese};
use crate::geometry::{log_bounds, Q, QPoint};
use crate::simplex::{
    solve_feasibility, FarkasWitness, LinearSystem, SimplexError, SolveOutcome, DEFAULT_PIVOT_CAP,
};
use serde::{Deserialize, Serialize};

pub const DISCRETIZATION_NOTE: &str =
    "discretized problem only: status is evidence about the finite model, not the continuum";

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("weights must be non-negative and sum to 1")]
    BadWeights,
    #[error("support points must be pairwise distinct")]
    DuplicateSupport,
    #[error("base point must be among the support candidates")]
    BasePointMissing,
    #[error("test function {0} has a pole at support point {1}")]
    PoleOnSupport(usize, QPoint),
    #[error("atom cap must lie in [0, 1)")]
    BadAtomCap(Q),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// A probability measure with finite support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub support: Vec<QPoint>,
    pub weights: Vec<Q>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<QPoint>, weights: Vec<Q>) -> Result<DiscreteMeasure, MeasureError> {
        if weights.len() != support.len()
            || weights.iter().any(|w| w.is_negative())
            || weights.iter().fold(Q::zero(), |a, w| &a + w) != Q::one()
        {
            return Err(MeasureError::BadWeights);
        }
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if support[i] == support[j] {
                    return Err(MeasureError::DuplicateSupport);
                }
            }
        }
        Ok(DiscreteMeasure { support, weights })
    }

    /// Exact integral of f against the measure; errors at poles with
    /// positive weight (zero-weight points are skipped).
    pub fn integrate(&self, f: &RationalMap) -> Result<QPoint, CalculusError> {
        let mut acc = QPoint::zero();
        for (z, w) in self.support.iter().zip(&self.weights) {
            if w.is_zero() {
                continue;
            }
            acc = &acc + &f.eval(z)?.scale(w);
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    Representing,
    Jensen,
}

/// The discretized measure-existence question for a base point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityProblem {
    pub x: QPoint,
    pub support: Vec<QPoint>,
    pub test_fns: Vec<RationalMap>,
    pub mode: MeasureMode,
    /// maximum allowed weight at x; delta < 1 excludes the trivial
    /// point-mass measure
    pub atom_cap: Q,
}

/// Assembled linear system plus bookkeeping about skipped Jensen rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub system: LinearSystem,
    /// test-function indices whose Jensen row was vacuous because
    /// |f(x)| = 0 (log is minus infinity: every measure satisfies it)
    pub vacuous_jensen: Vec<usize>,
    /// test-function indices excluded from Jensen rows because f vanishes
    /// at a support point (a minus-infinity coefficient has no linear
    /// encoding; the exclusion is recorded, not hidden)
    pub excluded_jensen: Vec<usize>,
}

/// Rows: per test f, Re and Im of sum w_i f(z_i) = f(x); in Jensen mode
/// additionally sum w_i log|f(z_i)| >= log|f(x)| with certified log
/// envelopes (coefficient lower ends, right-hand upper end, so a
/// satisfied row implies the true inequality); plus sum w = 1 and
/// w_x <= atom_cap.
pub fn build_constraints(p: &FeasibilityProblem) -> Result<ConstraintSystem, MeasureError> {
    if !(!p.atom_cap.is_negative() && p.atom_cap <= Q::one()) {
        return Err(MeasureError::BadAtomCap(p.atom_cap.clone()));
    }
    let x_index = p
        .support
        .iter()
        .position(|z| z == &p.x)
        .ok_or(MeasureError::BasePointMissing)?;
    let n = p.support.len();
    let mut sys = LinearSystem::new(n);
    sys.eq.push((vec![Q::one(); n], Q::one()));
    sys.ub.push((x_index, p.atom_cap.clone()));

    let tol = cert_tol();
    let mut vacuous = Vec::new();
    let mut excluded = Vec::new();
    for (fi, f) in p.test_fns.iter().enumerate() {
        let mut values = Vec::with_capacity(n);
        for z in &p.support {
            let v = f
                .eval(z)
                .map_err(|_| MeasureError::PoleOnSupport(fi, z.clone()))?;
            values.push(v);
        }
        let fx = f
            .eval(&p.x)
            .map_err(|_| MeasureError::PoleOnSupport(fi, p.x.clone()))?;
        sys.eq.push((
            values.iter().map(|v| v.re.clone()).collect(),
            fx.re.clone(),
        ));
        sys.eq.push((
            values.iter().map(|v| v.im.clone()).collect(),
            fx.im.clone(),
        ));

        if p.mode == MeasureMode::Jensen {
            if fx.is_zero() {
                vacuous.push(fi);
                continue;
            }
            if values.iter().any(|v| v.is_zero()) {
                excluded.push(fi);
                continue;
            }
            // log|f(z)| = log(|f(z)|^2)/2 with the conservative ends
            let coeffs: Result<Vec<Q>, MeasureError> = values
                .iter()
                .map(|v| {
                    Ok(&log_bounds(&v.norm_sq(), &tol)
                        .map_err(CalculusError::from)?
                        .lower
                        * &Q::new(1, 2))
                })
                .collect();
            let rhs = &log_bounds(&fx.norm_sq(), &tol)
                .map_err(CalculusError::from)?
                .upper
                * &Q::new(1, 2);
            sys.ge.push((coeffs?, rhs));
        }
    }
    Ok(ConstraintSystem {
        system: sys,
        vacuous_jensen: vacuous,
        excluded_jensen: excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible { measure: DiscreteMeasure },
    Infeasible { witness: FarkasWitness },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// always `DISCRETIZATION_NOTE`
    pub note: String,
    pub vacuous_jensen: Vec<usize>,
    pub excluded_jensen: Vec<usize>,
}

/// Assemble and solve. Feasible results are re-checked exactly against
/// the assembled rows before being returned.
pub fn solve(p: &FeasibilityProblem, pivot_cap: usize) -> Result<FeasibilityResult, MeasureError> {
    let cs = build_constraints(p)?;
    let status = match solve_feasibility(&cs.system, pivot_cap)? {
        SolveOutcome::Feasible { w } => {
            assert!(cs.system.satisfied_by(&w), "solver returned a non-solution");
            // drop zero-weight points for a clean measure, keeping order
            let mut support = Vec::new();
            let mut weights = Vec::new();
            for (z, wi) in p.support.iter().zip(&w) {
                if !wi.is_zero() {
                    support.push(z.clone());
                    weights.push(wi.clone());
                }
            }
            FeasibilityStatus::Feasible {
                measure: DiscreteMeasure::new(support, weights)?,
            }
        }
        SolveOutcome::Infeasible { witness } => FeasibilityStatus::Infeasible { witness },
        SolveOutcome::Unknown => FeasibilityStatus::Unknown,
    };
    Ok(FeasibilityResult {
        status,
        note: DISCRETIZATION_NOTE.into(),
        vacuous_jensen: cs.vacuous_jensen,
        excluded_jensen: cs.excluded_jensen,
    })
}

/// The unit-circle control, verified symbolically.
///
/// The m-th roots of unity are not rational points for general m, so the
/// uniform measure on them cannot be pushed through the rational solver.
/// Instead the defining identities are checked exactly in the exponent
/// ring: for the test functions z, ..., z^(m-1) each equality row reduces
/// to the geometric sum over all m-th roots of unity at exponent k, which
/// vanishes exactly when k is not a multiple of m; Jensen rows are vacuous
/// because every test function vanishes at the base point 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlReport {
    pub m: u32,
    /// uniform weight on each root
    pub weight: Q,
    pub atom_at_origin: Q,
    pub equality_rows_exact: bool,
    pub jensen_rows_vacuous: bool,
    pub feasible: bool,
    pub note: String,
}

pub fn control_disc_algebra(m: u32, mode: MeasureMode) -> ControlReport {
    assert!(m >= 3);
    // Row for test function z^k: sum over j of (1/m) omega^(jk) must equal
    // f(0) = 0. The exponent multiset {jk mod m : j} sums the full
    // geometric progression, which is zero iff k mod m != 0.
    let mut equality_rows_exact = true;
    for k in 1..m {
        let row_is_zero = k % m != 0; // geometric-sum identity
        // cross-check by explicit exponent bookkeeping: with g = gcd(k,m),
        // the exponents jk mod m hit exactly the multiples of g, each g
        // times, so the row sum is g times the full sum of (m/g)-th roots
        // of unity — zero because m/g > 1
        let mut residue_counts = vec![0u32; m as usize];
        for j in 0..m {
            residue_counts[((j * k) % m) as usize] += 1;
        }
        let g = num_integer::gcd(k, m);
        let pattern_ok = residue_counts
            .iter()
            .enumerate()
            .all(|(t, &c)| c == if t as u32 % g == 0 { g } else { 0 })
            && m / g > 1;
        equality_rows_exact &= row_is_zero && pattern_ok;
    }
    let jensen_rows_vacuous = mode == MeasureMode::Jensen; // every z^k is 0 at 0
    ControlReport {
        m,
        weight: Q::new(1, m as i64),
        atom_at_origin: Q::zero(),
        equality_rows_exact,
        jensen_rows_vacuous,
        feasible: equality_rows_exact,
        note: DISCRETIZATION_NOTE.into(),
    }
}

/// The m = 4 case is the one where all roots of unity are exact rational
/// points, so the control can also be run through the full solver.
pub fn control_disc_algebra_lp() -> Result<FeasibilityResult, MeasureError> {
    let roots = vec![
        QPoint::int(1, 0),
        QPoint::int(0, 1),
        QPoint::int(-1, 0),
        QPoint::int(0, -1),
    ];
    let mut support = roots;
    support.push(QPoint::zero());
    let test_fns = (1..=3u32)
        .map(|k| RationalMap::polynomial(crate::poly::Poly::z().pow(k)))
        .collect();
    let p = FeasibilityProblem {
        x: QPoint::zero(),
        support,
        test_fns,
        mode: MeasureMode::Representing,
        atom_cap: Q::zero(),
    };
    solve(&p, DEFAULT_PIVOT_CAP)
}

/// One entry of the evidence series for a cheese target point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceEntry {
    pub t: usize,
    pub atom_cap: Q,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceReport {
    /// always "EVIDENCE": a status trend on discretized instances, with
    /// no ground-truth claim in either direction
    pub label: String,
    pub x: QPoint,
    pub entries: Vec<EvidenceEntry>,
    pub note: String,
}

/// Jensen-mode feasibility at x with growing pole-certified test families
/// (simple poles at the first t deleted-disc centers) and atom cap
/// 1 - 1/t. Support: x plus a membership-filtered grid at the given
/// resolution denominator.
pub fn cheese_evidence(
    cheese: &SwissCheese,
    x: &QPoint,
    t_max: usize,
    resolution: i64,
) -> Result<EvidenceReport, MeasureError> {
    assert!(resolution >= 1);
    let mut support = vec![x.clone()];
    for i in -resolution..=resolution {
        for j in -resolution..=resolution {
            let z = QPoint::new(Q::new(i, resolution), Q::new(j, resolution));
            if &z != x && cheese.membership(&z) == Membership::In {
                support.push(z);
            }
        }
    }
    let pole_centers: Vec<QPoint> = cheese
        .groups
        .iter()
        .flat_map(|g| g.deleted.iter().map(|d| d.center.clone()))
        .collect();
    let mut entries = Vec::new();
    for t in 0..=t_max.min(pole_centers.len()) {
        let test_fns: Vec<RationalMap> = pole_centers[..t]
            .iter()
            .map(|c| {
                RationalMap::new(
                    crate::poly::Poly::one(),
                    crate::poly::Poly::linear(c),
                    std::slice::from_ref(c),
                )
                .expect("linear denominator")
            })
            .collect();
        let atom_cap = if t == 0 {
            Q::zero()
        } else {
            &Q::one() - &Q::new(1, t as i64)
        };
        let p = FeasibilityProblem {
            x: x.clone(),
            support: support.clone(),
            test_fns,
            mode: MeasureMode::Jensen,
            atom_cap,
        };
        let r = solve(&p, DEFAULT_PIVOT_CAP)?;
        entries.push(EvidenceEntry {
            t,
            atom_cap: p.atom_cap,
            status: match r.status {
                FeasibilityStatus::Feasible { .. } => "feasible".into(),
                FeasibilityStatus::Infeasible { .. } => "infeasible".into(),
                FeasibilityStatus::Unknown => "unknown".into(),
            },
        });
    }
    Ok(EvidenceReport {
        label: "EVIDENCE".into(),
        x: x.clone(),
        entries,
        note: DISCRETIZATION_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::simplex::LinearSystem as LS;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn fourth_roots_problem(mode: MeasureMode) -> FeasibilityProblem {
        let mut support = vec![
            QPoint::int(1, 0),
            QPoint::int(0, 1),
            QPoint::int(-1, 0),
            QPoint::int(0, -1),
        ];
        support.push(QPoint::zero());
        FeasibilityProblem {
            x: QPoint::zero(),
            support,
            test_fns: vec![RationalMap::polynomial(Poly::z())],
            mode,
            atom_cap: Q::zero(),
        }
    }

    #[test]
    fn measure_invariants() {
        assert!(DiscreteMeasure::new(
            vec![QPoint::int(0, 0), QPoint::int(1, 0)],
            vec![q("1/2"), q("1/2")]
        )
        .is_ok());
        assert!(matches!(
            DiscreteMeasure::new(vec![QPoint::int(0, 0)], vec![q("1/2")]),
            Err(MeasureError::BadWeights)
        ));
        assert!(matches!(
            DiscreteMeasure::new(
                vec![QPoint::int(0, 0), QPoint::int(0, 0)],
                vec![q("1/2"), q("1/2")]
            ),
            Err(MeasureError::DuplicateSupport)
        ));
    }

    #[test]
    fn constant_test_function_only_normalization_binds() {
        let p = FeasibilityProblem {
            x: QPoint::zero(),
            support: vec![QPoint::zero(), QPoint::int(1, 0)],
            test_fns: vec![RationalMap::polynomial(Poly::one())],
            mode: MeasureMode::Representing,
            atom_cap: q("1/2"),
        };
        let cs = build_constraints(&p).unwrap();
        // normalization + (Re, Im) rows of f = 1, which duplicate it
        assert_eq!(cs.system.eq.len(), 3);
        assert_eq!(cs.system.eq[1].0, vec![Q::one(), Q::one()]);
        assert_eq!(cs.system.eq[1].1, Q::one());
        assert_eq!(cs.system.eq[2].1, Q::zero());
        let r = solve(&p, DEFAULT_PIVOT_CAP).unwrap();
        assert!(matches!(r.status, FeasibilityStatus::Feasible { .. }));
    }

    #[test]
    fn roots_of_unity_equality_rows() {
        let cs = build_constraints(&fourth_roots_problem(MeasureMode::Representing)).unwrap();
        // f = z rows: sum w_i z_i = 0, real row then imaginary row
        let re_row = &cs.system.eq[1];
        assert_eq!(
            re_row.0,
            vec![Q::one(), Q::zero(), -Q::one(), Q::zero(), Q::zero()]
        );
        assert_eq!(re_row.1, Q::zero());
        let im_row = &cs.system.eq[2];
        assert_eq!(
            im_row.0,
            vec![Q::zero(), Q::one(), Q::zero(), -Q::one(), Q::zero()]
        );
    }

    #[test]
    fn jensen_row_vacuous_at_zero_of_f() {
        // f = z at x = 0: log|f(0)| = -inf, row dropped and recorded
        let cs = build_constraints(&fourth_roots_problem(MeasureMode::Jensen)).unwrap();
        assert!(cs.system.ge.is_empty());
        assert_eq!(cs.vacuous_jensen, vec![0]);
    }

    #[test]
    fn jensen_exclusion_when_f_vanishes_on_support() {
        // f = z - 1 vanishes at the support point 1 and not at x = 0
        let mut p = fourth_roots_problem(MeasureMode::Jensen);
        p.test_fns = vec![RationalMap::polynomial(Poly::linear(&QPoint::int(1, 0)))];
        let cs = build_constraints(&p).unwrap();
        assert!(cs.system.ge.is_empty());
        assert_eq!(cs.excluded_jensen, vec![0]);
    }

    #[test]
    fn jensen_row_uses_conservative_log_ends() {
        // support {2, 1/2} on the real axis, x = 2, f = z: row
        // w_1 log 2 + w_2 log(1/2) >= log 2 with envelope ends
        let p = FeasibilityProblem {
            x: QPoint::int(2, 0),
            support: vec![QPoint::int(2, 0), QPoint::new(q("1/2"), Q::zero())],
            test_fns: vec![RationalMap::polynomial(Poly::z())],
            mode: MeasureMode::Jensen,
            atom_cap: q("7/8"),
        };
        let cs = build_constraints(&p).unwrap();
        assert_eq!(cs.system.ge.len(), 1);
        let (coeffs, rhs) = &cs.system.ge[0];
        let tol = cert_tol();
        let l4 = log_bounds(&Q::int(4), &tol).unwrap();
        assert_eq!(coeffs[0], &l4.lower * &q("1/2"));
        assert_eq!(coeffs[1], -&(&l4.upper * &q("1/2")));
        assert_eq!(rhs, &(&l4.upper * &q("1/2")));
    }

    #[test]
    fn pole_on_support_rejected() {
        let mut p = fourth_roots_problem(MeasureMode::Representing);
        p.test_fns = vec![RationalMap::new(
            Poly::one(),
            Poly::linear(&QPoint::int(1, 0)),
            &[QPoint::int(1, 0)],
        )
        .unwrap()];
        assert!(matches!(
            build_constraints(&p),
            Err(MeasureError::PoleOnSupport(0, _))
        ));
    }

    #[test]
    fn lp_control_on_rational_roots() {
        let r = control_disc_algebra_lp().unwrap();
        match r.status {
            FeasibilityStatus::Feasible { measure } => {
                // uniform 1/4 on the roots, atom 0 at the origin
                assert_eq!(measure.weights, vec![q("1/4"); 4]);
                assert!(!measure.support.contains(&QPoint::zero()));
                // exact equality rows re-checked through integration
                for k in 1..=3u32 {
                    let f = RationalMap::polynomial(Poly::z().pow(k));
                    assert_eq!(measure.integrate(&f).unwrap(), QPoint::zero());
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symbolic_control_reports() {
        for m in [3u32, 8, 12] {
            let r = control_disc_algebra(m, MeasureMode::Representing);
            assert!(r.feasible, "m = {m}");
            assert!(r.equality_rows_exact);
            assert_eq!(r.weight, Q::new(1, m as i64));
            assert!(r.atom_at_origin.is_zero());
        }
        let r = control_disc_algebra(8, MeasureMode::Jensen);
        assert!(r.feasible && r.jensen_rows_vacuous);
    }

    #[test]
    fn trivial_measure_allowed_only_by_cap() {
        // single test f = z on support {1/2, 0, -1/2}
        let mk = |x: QPoint, cap: Q| FeasibilityProblem {
            x,
            support: vec![
                QPoint::new(q("1/2"), Q::zero()),
                QPoint::zero(),
                QPoint::new(q("-1/2"), Q::zero()),
            ],
            test_fns: vec![RationalMap::polynomial(Poly::z())],
            mode: MeasureMode::Representing,
            atom_cap: cap,
        };
        // x = 0 with a capped atom: the endpoints balance, feasible
        let r = solve(&mk(QPoint::zero(), q("1/2")), DEFAULT_PIVOT_CAP).unwrap();
        assert!(matches!(r.status, FeasibilityStatus::Feasible { .. }));
        // x = 1/2 (the support maximum of Re z) with no atom allowed:
        // the mean cannot reach 1/2; infeasible with a verified witness
        let r = solve(
            &mk(QPoint::new(q("1/2"), Q::zero()), Q::zero()),
            DEFAULT_PIVOT_CAP,
        )
        .unwrap();
        match r.status {
            FeasibilityStatus::Infeasible { witness } => assert!(witness.verify()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solver_deterministic_bytes() {
        let p = fourth_roots_problem(MeasureMode::Representing);
        let a = solve(&p, DEFAULT_PIVOT_CAP).unwrap();
        let b = solve(&p, DEFAULT_PIVOT_CAP).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    // ---- brute-force grid oracle ----

    /// All weight vectors with denominators `grid` over `n` variables.
    fn grid_feasible(sys: &LS, grid: i64) -> bool {
        fn rec(sys: &LS, grid: i64, acc: &mut Vec<Q>, left: i64) -> bool {
            if acc.len() + 1 == sys.n_vars {
                acc.push(Q::new(left, grid));
                let ok = sys.satisfied_by(acc);
                acc.pop();
                return ok;
            }
            for a in 0..=left {
                acc.push(Q::new(a, grid));
                if rec(sys, grid, acc, left - a) {
                    acc.pop();
                    return true;
                }
                acc.pop();
            }
            false
        }
        // the oracle explores the probability simplex; all instances
        // include the normalization row, so sum w = 1 is baked in
        rec(sys, grid, &mut Vec::new(), grid)
    }

    /// Random instance with a known grid witness (feasible) or an exact
    /// contradiction (infeasible), so the oracle and the solver must
    /// agree by construction.
    fn random_instance(rng: &mut ChaCha8Rng, grid: i64) -> (LS, bool) {
        let n = rng.gen_range(2..=4usize);
        let mut sys = LS::new(n);
        sys.eq.push((vec![Q::one(); n], Q::one()));
        // witness on the grid
        let mut left = grid;
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let a = if i + 1 == n { left } else { rng.gen_range(0..=left) };
            w.push(Q::new(a, grid));
            left -= a;
        }
        let dot = |a: &[Q]| -> Q {
            a.iter()
                .zip(&w)
                .fold(Q::zero(), |acc, (c, x)| &acc + &(c * x))
        };
        for _ in 0..rng.gen_range(1..=2) {
            let coeffs: Vec<Q> = (0..n).map(|_| Q::int(rng.gen_range(-3..=3))).collect();
            let rhs = dot(&coeffs);
            sys.eq.push((coeffs, rhs));
        }
        if rng.gen_bool(0.5) {
            let coeffs: Vec<Q> = (0..n).map(|_| Q::int(rng.gen_range(-3..=3))).collect();
            let slack = Q::new(rng.gen_range(0..=4), 8);
            let rhs = &dot(&coeffs) - &slack;
            sys.ge.push((coeffs, rhs));
        }
        let feasible = rng.gen_bool(0.5);
        if !feasible {
            // contradict the normalization row exactly
            sys.eq.push((vec![Q::one(); n], Q::int(2)));
        }
        (sys, feasible)
    }

    #[test]
    fn solver_agrees_with_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let grid = 64;
        for trial in 0..50 {
            let (sys, expect_feasible) = random_instance(&mut rng, grid);
            let lp = match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
                SolveOutcome::Feasible { w } => {
                    assert!(sys.satisfied_by(&w), "trial {trial}");
                    true
                }
                SolveOutcome::Infeasible { witness } => {
                    assert!(witness.verify(), "trial {trial}");
                    false
                }
                SolveOutcome::Unknown => panic!("trial {trial}: unknown"),
            };
            let oracle = grid_feasible(&sys, grid);
            assert_eq!(lp, expect_feasible, "trial {trial}");
            assert_eq!(oracle, expect_feasible, "trial {trial}");
        }
    }

    #[test]
    fn evidence_harness_on_small_cheese() {
        use crate::cheese::{
            enumerate_candidates, epsilon_budget, generate_mckissick_discs, CheeseGroup,
        };
        use crate::targets::TargetSet;
        let k = TargetSet::segment(
            QPoint::new(q("-1/2"), Q::zero()),
            QPoint::new(q("1/2"), Q::zero()),
        )
        .unwrap();
        let cands = enumerate_candidates(&k, 3, 0).unwrap();
        let groups: Vec<CheeseGroup> = cands
            .into_iter()
            .map(|c| {
                let budget = epsilon_budget(&c.d_n.lower, c.n, 12);
                let deleted = generate_mckissick_discs(&c, &budget, 1, None).unwrap();
                CheeseGroup {
                    candidate: c,
                    budget,
                    deleted,
                }
            })
            .collect();
        let cheese = SwissCheese::assemble(k, groups).unwrap();
        let x = QPoint::zero();
        let report = cheese_evidence(&cheese, &x, 3, 4).unwrap();
        assert_eq!(report.label, "EVIDENCE");
        assert_eq!(report.entries.len(), 4);
        // T = 0: no test functions, cap 0 -> feasible trivially
        assert_eq!(report.entries[0].status, "feasible");
        assert_eq!(report.note, DISCRETIZATION_NOTE);
    }
}
