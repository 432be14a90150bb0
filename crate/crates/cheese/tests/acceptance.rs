//! End-to-end acceptance gate. Each test prints one PASS line for its
//! criterion; any assertion failure fails the build.

use cheesecraft::calculus::{
    cauchy_bound, certify_poles, choose_n, dc_chain_verify, derivative_estimate_sequence,
    factorial, sup_norm, verify_derivative_bound, RationalMap, SupNormEstimate, SupNormPlan,
};
use cheesecraft::cheese::{
    check_unit_function, enumerate_candidates, epsilon_budget, generate_mckissick_discs,
    tuned_unit_candidate, tuned_unit_plan, verify_epsilon_bound, CheeseGroup,
};
use cheesecraft::geometry::{sqrt_bounds, BoundPair, Disc};
use cheesecraft::measures::{self, FeasibilityProblem, FeasibilityStatus, MeasureMode};
use cheesecraft::persist::WorkspaceFile;
use cheesecraft::poly::Poly;
use cheesecraft::simplex::{solve_feasibility, LinearSystem, SolveOutcome, DEFAULT_PIVOT_CAP};
use cheesecraft::slits::{
    build_chain, classify, propagation_from_chain, template_block, AccumulationSide, Cell,
    IntervalSystem,
};
use cheesecraft::targets::{build_svc, default_cantor_target, geometric_fractions, D0Bound};
use cheesecraft::{Q, QPoint, SwissCheese, TargetSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::Command;
use std::str::FromStr;
use std::time::Instant;

fn q(s: &str) -> Q {
    Q::from_str(s).unwrap()
}

fn segment_target() -> TargetSet {
    TargetSet::segment(
        QPoint::new(q("-1/2"), Q::zero()),
        QPoint::new(q("1/2"), Q::zero()),
    )
    .unwrap()
}

fn build_cheese(target: TargetSet, discs: usize, kmax: u32, m_count: usize) -> SwissCheese {
    let stage = 6;
    let candidates = enumerate_candidates(&target, discs, stage).unwrap();
    let groups: Vec<CheeseGroup> = candidates
        .into_iter()
        .map(|c| {
            let budget = epsilon_budget(&c.d_n.lower, c.n, kmax);
            let deleted = generate_mckissick_discs(&c, &budget, m_count, None).unwrap();
            CheeseGroup {
                candidate: c,
                budget,
                deleted,
            }
        })
        .collect();
    SwissCheese::assemble(target, groups).unwrap()
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cheesecraft")
}

#[test]
fn criterion_1_pipeline_certification() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let ws_path = dir.path().join("segment.json");

    let build = Command::new(bin())
        .args([
            "build",
            "--target",
            "segment",
            "--discs",
            "100",
            "--kmax",
            "10",
            "--mckissick",
            "4",
            "--out",
        ])
        .arg(&ws_path)
        .output()
        .unwrap();
    assert!(build.status.success(), "{build:?}");

    let verify = Command::new(bin())
        .args(["verify", "--workspace"])
        .arg(&ws_path)
        .output()
        .unwrap();
    assert!(verify.status.success(), "{verify:?}");

    let ws = WorkspaceFile::load(&ws_path).unwrap();
    let cheese = ws.cheese.unwrap();
    assert_eq!(cheese.groups.len(), 100);
    for g in &cheese.groups {
        assert!(g.deleted.len() >= 4, "group {}", g.candidate.n);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 60, "took {elapsed:?}");
    println!("ACCEPTANCE 1 pipeline certification (N=100, kmax=10, {elapsed:?}): PASS");
}

/// Largest power of two at or below `x` (x > 0). Budgets rounded down to
/// a dyadic keep every later envelope computation on short rationals.
fn dyadic_floor(x: &Q) -> Q {
    assert!(x.is_positive());
    let mut d = Q::one();
    while &d > x {
        d = &d * &q("1/2");
    }
    d
}

#[test]
fn criterion_2_derivative_bound_oracle_suite() {
    // Pipeline candidates with hand-placed dyadic deleted discs: the
    // budgets are rounded down to powers of two (still at or below the
    // computed reference, so assembly re-certifies them), which keeps the
    // rational arithmetic short through 2700 derivative-bound checks.
    let target = segment_target();
    let groups: Vec<CheeseGroup> = enumerate_candidates(&target, 3, 0)
        .unwrap()
        .into_iter()
        .map(|c| {
            let reference = epsilon_budget(&c.d_n.lower, c.n, 8);
            let epsilon = dyadic_floor(&reference.epsilon);
            let deleted = vec![Disc::open(c.disc.center.clone(), &epsilon * &q("1/4")).unwrap()];
            CheeseGroup {
                candidate: c,
                budget: cheesecraft::cheese::Budget {
                    n: reference.n,
                    epsilon,
                    kmax: reference.kmax,
                },
                deleted,
            }
        })
        .collect();
    let cheese = SwissCheese::assemble(target, groups).unwrap();
    let centers: Vec<QPoint> = cheese
        .groups
        .iter()
        .flat_map(|g| g.deleted.iter().map(|d| d.center.clone()))
        .take(3)
        .collect();
    assert_eq!(centers.len(), 3);

    let mut violations = 0usize;
    for c in &centers {
        let f = RationalMap::new(Poly::one(), Poly::linear(c), std::slice::from_ref(c)).unwrap();
        let sites = certify_poles(&f, &cheese).unwrap();
        assert_eq!(sites.len(), 1, "pole certified inside a deleted disc");
        let sup = sup_norm(&f, &cheese, &SupNormPlan::default()).unwrap();
        for i in 0..100i64 {
            let z = QPoint::new(Q::new(2 * i - 99, 200), Q::zero());
            let report = verify_derivative_bound(&cheese, &f, &z, 0..=8, &sup).unwrap();
            violations += report.checks.iter().filter(|c| !c.pass).count();
        }
    }
    assert_eq!(violations, 0);

    // Equality case on the bare disc: f = z^k at 0 meets k! exactly and
    // the certified envelope is tighter than 1e-9.
    let bare = SwissCheese::assemble(segment_target(), vec![]).unwrap();
    let tol = Q::pow10(-9);
    for k in 1..=8u32 {
        let f = RationalMap::polynomial(Poly::z().pow(k));
        let sup = SupNormEstimate::exact(Q::one());
        let bound = cauchy_bound(&bare, &QPoint::zero(), k, &sup).unwrap();
        let kf = factorial(k);
        assert!(bound.contains(&kf));
        assert!(bound.width() <= tol, "k = {k}");
        let report = verify_derivative_bound(&bare, &f, &QPoint::zero(), k..=k, &sup).unwrap();
        assert!(report.all_pass);
        assert_eq!(report.checks[0].exact_sq, &kf * &kf);
    }
    println!("ACCEPTANCE 2 derivative bound oracle suite (3 maps x 100 points x k<=8): PASS");
}

#[test]
fn criterion_3_quasi_analytic_chain() {
    let d0 = D0Bound {
        value: BoundPair::exact(q("1/2")),
    };
    let sup = SupNormEstimate::exact(Q::one());
    let chosen = choose_n(&d0, 100).unwrap();
    assert_eq!(chosen.n, 7, "scan oracle: k=6 fails, k=7 passes");

    let n = chosen.n;
    let seq = derivative_estimate_sequence(&d0, &sup, n..=(n + 50)).unwrap();
    let report = dc_chain_verify(&seq, n, 50).unwrap();
    assert!(report.all_pass);
    assert_eq!(report.steps.len(), 51, "k in [7, 57]");
    for step in &report.steps {
        assert_eq!(step.tail_inequality, Some(true), "k = {}", step.k);
        assert!(step.factorial_root && step.chain_bound, "k = {}", step.k);
    }
    assert!(report.partial_sum.lower.is_positive());
    println!("ACCEPTANCE 3 divergence chain (choose_N = 7, k in [7, 57]): PASS");
}

#[test]
fn criterion_4_fat_cantor_instantiation() {
    // The geometric removal schedule carries exact limit length 1/2.
    let svc = build_svc(
        (q("-1/2"), q("1/2")),
        &geometric_fractions(&q("1/4"), &q("1/4"), 6),
    )
    .unwrap();
    let limit = svc.limit_length();
    assert!(limit.exact && !limit.zero_length);
    assert_eq!(limit.value, BoundPair::exact(q("1/2")));

    // Product with a height-1 interval: area exactly 1/2.
    let height = Q::one();
    assert_eq!(&limit.value.lower * &height, q("1/2"));

    // dist(K, unit circle) envelope contains 1 - sqrt(2)/2 within 1e-6.
    let target = default_cantor_target(6).unwrap();
    let d0 = target.d0(&Q::pow10(-8)).unwrap();
    let s = sqrt_bounds(&q("1/2"), &Q::pow10(-9)).unwrap();
    let true_lo = &Q::one() - &s.upper;
    let true_hi = &Q::one() - &s.lower;
    let slack = Q::pow10(-6);
    assert!(&d0.value.lower - &slack <= true_lo, "lower end");
    assert!(&d0.value.upper + &slack >= true_hi, "upper end");

    // Full pipeline on the fat-Cantor target with 50 discs.
    let cheese = build_cheese(target, 50, 8, 2);
    assert_eq!(cheese.groups.len(), 50);
    for k in 1..=8 {
        assert!(verify_epsilon_bound(&cheese, k).pass, "k = {k}");
    }
    println!("ACCEPTANCE 4 fat Cantor instantiation (limit 1/2, N=50 pipeline): PASS");
}

#[test]
fn criterion_5_chain_classification() {
    let limit_only: BTreeSet<Cell> = [Cell::Limit].into_iter().collect();
    for n in 2..=10usize {
        let t = template_block(3, AccumulationSide::Right).unwrap();
        let chain = build_chain(&t, n, &q("4/7"), &QPoint::zero(), &q("1/4")).unwrap();
        let sys = propagation_from_chain(&chain, AccumulationSide::Right).unwrap();
        let cls = classify(&sys);
        assert_eq!(cls.r_points, limit_only, "rightward n = {n}");
        assert!(cls.points_of_continuity.is_empty(), "rightward n = {n}");

        let t = template_block(3, AccumulationSide::Left).unwrap();
        let chain = build_chain(&t, n, &q("4/7"), &QPoint::zero(), &q("1/4")).unwrap();
        let sys = propagation_from_chain(&chain, AccumulationSide::Left).unwrap();
        let cls = classify(&sys);
        assert!(cls.r_points.is_empty(), "leftward n = {n}");
        assert_eq!(cls.points_of_continuity, limit_only, "leftward n = {n}");
    }
    println!("ACCEPTANCE 5 chain classification (N in 2..=10, exact set equality): PASS");
}

#[test]
fn criterion_6_isolated_point_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240817);
    for trial in 0..10_000 {
        let n = rng.gen_range(2..=12);
        let sys = IntervalSystem::random(n, &mut rng);
        assert_eq!(
            sys.isolated_point_violation(),
            None,
            "trial {trial}: {sys:?}"
        );
    }
    println!("ACCEPTANCE 6 isolated point search (10^4 random systems, 0 counterexamples): PASS");
}

/// All weight vectors with denominator `grid`, recursion over the simplex.
fn grid_feasible(sys: &LinearSystem, grid: i64) -> bool {
    fn rec(sys: &LinearSystem, grid: i64, acc: &mut Vec<Q>, left: i64) -> bool {
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
    rec(sys, grid, &mut Vec::new(), grid)
}

/// Random instance carrying either a grid witness (feasible) or an exact
/// contradiction (infeasible), so solver and oracle must agree.
fn random_instance(rng: &mut ChaCha8Rng, grid: i64) -> (LinearSystem, bool) {
    let n = rng.gen_range(2..=4usize);
    let mut sys = LinearSystem::new(n);
    sys.eq.push((vec![Q::one(); n], Q::one()));
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
        sys.eq.push((vec![Q::one(); n], Q::int(2)));
    }
    (sys, feasible)
}

#[test]
fn criterion_7_measures() {
    // Control: uniform measure on the 8th roots of unity, no atom at 0.
    let report = measures::control_disc_algebra(8, MeasureMode::Jensen);
    assert!(report.feasible);
    assert_eq!(report.weight, q("1/8"));
    assert!(report.atom_at_origin.is_zero());
    assert!(report.equality_rows_exact);

    // Solver vs brute-force grid oracle on 200 random instances.
    let mut rng = ChaCha8Rng::seed_from_u64(7_000);
    let grid = 64;
    let mut agreements = 0usize;
    for trial in 0..200 {
        let (sys, expect) = random_instance(&mut rng, grid);
        let lp = match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
            SolveOutcome::Feasible { w } => {
                assert!(sys.satisfied_by(&w), "trial {trial}");
                true
            }
            SolveOutcome::Infeasible { witness } => {
                assert!(witness.verify(), "trial {trial}");
                false
            }
            SolveOutcome::Unknown => panic!("trial {trial}: pivot cap hit"),
        };
        assert_eq!(lp, expect, "trial {trial}");
        assert_eq!(grid_feasible(&sys, grid), expect, "trial {trial}");
        agreements += 1;
    }
    assert_eq!(agreements, 200, "100% agreement");

    // A feasible instance with live (non-vacuous) logarithmic rows, solved
    // with certified log envelopes and rechecked exactly.
    // Spread in the imaginary direction: |z + 2| grows away from the real
    // axis, so a symmetric measure satisfies the logarithmic row strictly.
    let p = FeasibilityProblem {
        x: QPoint::new(q("1/4"), Q::zero()),
        support: vec![
            QPoint::new(q("1/4"), Q::zero()),
            QPoint::new(q("1/4"), q("1/2")),
            QPoint::new(q("1/4"), q("-1/2")),
        ],
        test_fns: vec![RationalMap::polynomial(
            Poly::z().add(&Poly::constant(QPoint::int(2, 0))),
        )],
        mode: MeasureMode::Jensen,
        atom_cap: q("1/2"),
    };
    let cs = measures::build_constraints(&p).unwrap();
    assert!(!cs.system.ge.is_empty(), "jensen row present");
    assert!(cs.vacuous_jensen.is_empty() && cs.excluded_jensen.is_empty());
    let result = measures::solve(&p, DEFAULT_PIVOT_CAP).unwrap();
    assert!(matches!(result.status, FeasibilityStatus::Feasible { .. }));
    println!("ACCEPTANCE 7 measures (m=8 control, 200/200 oracle agreement, jensen rows): PASS");
}

#[test]
fn criterion_8_unit_function_contract() {
    let parent = Disc::open(QPoint::new(q("1/2"), q("1/2")), q("1/4")).unwrap();
    // 1 center + 333 inside-ring + 666 outside-ring points = 1000.
    let plan = tuned_unit_plan(&parent, 333);
    assert!(plan.inside.len() + plan.outside.len() >= 1000);

    let tuned = tuned_unit_candidate(&parent);
    let report = check_unit_function(&tuned, &plan).unwrap();
    assert!(report.all_ok(), "{report:?}");

    // Bad candidate 1: a pole off the deleted family, on the sample set.
    let mut bad = tuned_unit_candidate(&parent);
    bad.sequence.push(
        RationalMap::new(
            Poly::one(),
            Poly::linear(&parent.center),
            &[parent.center.clone()],
        )
        .unwrap(),
    );
    let r1 = check_unit_function(&bad, &plan).unwrap();
    assert!(!r1.poles_ok && r1.pole_witness.is_some());

    // Bad candidate 2: limit vanishing at interior samples.
    let mut bad = tuned_unit_candidate(&parent);
    bad.sequence = vec![
        RationalMap::polynomial(Poly::zero()),
        RationalMap::polynomial(Poly::zero()),
    ];
    let r2 = check_unit_function(&bad, &plan).unwrap();
    assert!(!r2.nonzero_inside_ok && r2.nonzero_witness.is_some());

    // Bad candidate 3: oscillating, non-Cauchy tail.
    let mut bad = tuned_unit_candidate(&parent);
    bad.sequence = vec![
        RationalMap::polynomial(Poly::one()),
        RationalMap::polynomial(Poly::constant(QPoint::int(-1, 0))),
    ];
    let r3 = check_unit_function(&bad, &plan).unwrap();
    assert!(!r3.convergence_ok && r3.convergence_witness.is_some());

    println!("ACCEPTANCE 8 unit function contract (3 rejections with witnesses, 1 accept): PASS");
}

#[test]
fn criterion_9_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let flags = [
        "build", "--target", "segment", "--discs", "12", "--kmax", "8", "--seed", "11",
    ];
    for out in [&a, &b] {
        let st = Command::new(bin())
            .args(flags)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(st.status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap(), "workspace bytes");

    let svg_a = dir.path().join("a.svg");
    let svg_b = dir.path().join("b.svg");
    for (ws, svg) in [(&a, &svg_a), (&b, &svg_b)] {
        let st = Command::new(bin())
            .args(["render", "--what", "cheese", "--workspace"])
            .arg(ws)
            .arg("--out")
            .arg(svg)
            .output()
            .unwrap();
        assert!(st.status.success());
    }
    assert_eq!(
        std::fs::read(&svg_a).unwrap(),
        std::fs::read(&svg_b).unwrap(),
        "svg bytes"
    );

    // Round trip: load and save reproduces the file byte for byte.
    let ws = WorkspaceFile::load(&a).unwrap();
    ws.save(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&a).unwrap(), "round trip");
    println!("ACCEPTANCE 9 reproducibility (byte-identical workspaces and figures): PASS");
}
