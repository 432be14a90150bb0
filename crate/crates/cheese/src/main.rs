//! Command-line front end: build and certify deleted-disc sets, re-verify
//! persisted workspaces, classify slit-chain propagation models, run
//! measure feasibility instances, and render figures.
//!
//! Exit codes: 0 success, 1 certificate/verification failure, 2 usage
//! error. All commands are deterministic given identical flags; the
//! `CHEESE_THREADS` environment variable bounds internal worker counts.

use cheesecraft::calculus::certify_poles;
use cheesecraft::cheese::{
    acceptance_predicate, enumerate_candidates_with_progress, epsilon_budget,
    generate_mckissick_discs, verify_epsilon_bound, CheeseGroup, EpsilonBoundCheck, SwissCheese,
};
use cheesecraft::geometry::{Q, QPoint};
use cheesecraft::measures::{self, FeasibilityProblem, FeasibilityStatus, MeasureMode};
use cheesecraft::persist::WorkspaceFile;
use cheesecraft::slits::{
    build_chain, classify, propagation_from_chain, propagation_none, render_cheese_svg,
    render_chain_svg, template_block, AccumulationSide, Cell, Direction, SlitChain,
};
use cheesecraft::targets::{build_svc, geometric_fractions, TargetSet};
use cheesecraft::Membership;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

const EXIT_CERT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "cheesecraft", version, about = "Certified deleted-disc set construction")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a certified deleted-disc set around a target and persist it.
    Build(BuildArgs),
    /// Re-run every certificate of a persisted workspace independently.
    Verify(VerifyArgs),
    /// Classify R-points and points of continuity of a slit-chain model.
    Classify(ClassifyArgs),
    /// Solve a discretized measure feasibility instance.
    Measure(MeasureArgs),
    /// Render a deterministic SVG figure.
    Render(RenderArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetKind {
    Segment,
    Cantor,
    SlitChain,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleKind {
    /// Fat-Cantor geometric schedule with limit length 1/2.
    Fat,
    /// Schedule removing the full length in the limit (zero limit length).
    Zero,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    target: TargetKind,
    /// Number of candidate discs to accept.
    #[arg(long, default_value_t = 10)]
    discs: usize,
    /// Highest derivative order the radius budgets must support.
    #[arg(long, default_value_t = 8)]
    kmax: u32,
    /// Cantor stage used for certified distances (and schedule depth).
    #[arg(long, default_value_t = 6)]
    stage: usize,
    /// Deleted discs per candidate group.
    #[arg(long, default_value_t = 4)]
    mckissick: usize,
    /// Deterministic jitter seed for deleted-disc radii.
    #[arg(long)]
    seed: Option<u64>,
    /// Cantor removal schedule (cantor target only).
    #[arg(long, value_enum, default_value_t = ScheduleKind::Fat)]
    schedule: ScheduleKind,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    workspace: PathBuf,
    /// Highest k for the radius-budget inequality; defaults to the
    /// smallest kmax recorded in the workspace budgets.
    #[arg(long)]
    kmax: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Right,
    Left,
    None,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Number of blocks in the chain.
    #[arg(long, default_value_t = 5)]
    cells: u32,
    #[arg(long, value_enum, default_value_t = DirectionArg::Right)]
    direction: DirectionArg,
    /// Optionally persist the propagation system.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Representing,
    Jensen,
}

#[derive(Args)]
struct MeasureArgs {
    /// Run the disc-algebra control instance with this many roots of
    /// unity instead of a workspace instance.
    #[arg(long)]
    control: Option<u32>,
    #[arg(long, required_unless_present = "control")]
    workspace: Option<PathBuf>,
    /// Base point as "p/q,p/q".
    #[arg(long, required_unless_present = "control")]
    point: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Jensen)]
    mode: ModeArg,
    /// Number of test functions.
    #[arg(long, default_value_t = 4)]
    testfns: usize,
    /// Maximum weight allowed at the base point, as "p/q".
    #[arg(long, default_value = "1/2")]
    atom_cap: String,
    /// Grid denominator for the support discretization.
    #[arg(long, default_value_t = 6)]
    resolution: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderWhat {
    Cheese,
    Chain,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, value_enum)]
    what: RenderWhat,
    /// Workspace to draw (cheese only).
    #[arg(long)]
    workspace: Option<PathBuf>,
    /// Chain parameters (chain only).
    #[arg(long, default_value_t = 5)]
    cells: u32,
    #[arg(long, value_enum, default_value_t = DirectionArg::Right)]
    direction: DirectionArg,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Build(a) => cmd_build(&a),
        Cmd::Verify(a) => cmd_verify(&a),
        Cmd::Classify(a) => cmd_classify(&a),
        Cmd::Measure(a) => cmd_measure(&a),
        Cmd::Render(a) => cmd_render(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn thread_count() -> usize {
    std::env::var("CHEESE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
                .min(8)
        })
}

fn parse_q(s: &str) -> Result<Q, String> {
    Q::from_str(s).map_err(|e| e.to_string())
}

fn parse_point(s: &str) -> Result<QPoint, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"p/q,p/q\", got `{s}`"))?;
    Ok(QPoint::new(parse_q(re.trim())?, parse_q(im.trim())?))
}

fn build_target(args: &BuildArgs) -> Result<TargetSet, String> {
    match args.target {
        TargetKind::Segment => TargetSet::segment(
            QPoint::new(Q::new(-1, 2), Q::zero()),
            QPoint::new(Q::new(1, 2), Q::zero()),
        )
        .map_err(|e| e.to_string()),
        TargetKind::Cantor => {
            let stages = args.stage.max(1);
            let fractions = match args.schedule {
                ScheduleKind::Fat => geometric_fractions(&Q::new(1, 4), &Q::new(1, 4), stages),
                ScheduleKind::Zero => geometric_fractions(&Q::new(1, 2), &Q::new(1, 4), stages),
            };
            let svc = build_svc((Q::new(-1, 2), Q::new(1, 2)), &fractions)
                .map_err(|e| e.to_string())?;
            let limit = svc.limit_length();
            if limit.zero_length {
                eprintln!(
                    "warning: cantor schedule has zero limit length; \
                     construction proceeds but the set carries no length"
                );
            }
            TargetSet::cantor_product(svc, (Q::new(-1, 2), Q::new(1, 2)))
                .map_err(|e| e.to_string())
        }
        TargetKind::SlitChain => {
            let chain = default_chain(4, AccumulationSide::Right)?;
            let blocks = chain
                .blocks
                .iter()
                .map(|b| b.outline())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            TargetSet::slit_chain_set(blocks, chain.x0.clone()).map_err(|e| e.to_string())
        }
    }
}

fn default_chain(n: usize, side: AccumulationSide) -> Result<SlitChain, String> {
    let template = template_block(3, side).map_err(|e| e.to_string())?;
    let x0 = match side {
        AccumulationSide::Right => QPoint::new(Q::new(1, 2), Q::zero()),
        AccumulationSide::Left => QPoint::new(Q::new(-1, 2), Q::zero()),
    };
    build_chain(&template, n, &Q::new(4, 7), &x0, &Q::new(1, 4)).map_err(|e| e.to_string())
}

fn cmd_build(args: &BuildArgs) -> Result<u8, String> {
    let target = build_target(args)?;
    let candidates = enumerate_candidates_with_progress(
        &target,
        args.discs,
        args.stage,
        |scanned, accepted| {
            eprintln!("scanned {scanned} grid discs, accepted {accepted}");
        },
    )
    .map_err(|e| e.to_string())?;

    let mut groups = Vec::with_capacity(candidates.len());
    for candidate in candidates {
        let budget = epsilon_budget(&candidate.d_n.lower, candidate.n, args.kmax);
        let deleted = generate_mckissick_discs(&candidate, &budget, args.mckissick, args.seed)
            .map_err(|e| e.to_string())?;
        groups.push(CheeseGroup {
            candidate,
            budget,
            deleted,
        });
    }

    let cheese = match SwissCheese::assemble(target, groups) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("certificate failure: {e}");
            return Ok(EXIT_CERT_FAILURE);
        }
    };
    let mut ws = WorkspaceFile::new();
    ws.cheese = Some(cheese);
    ws.save(&args.out).map_err(|e| e.to_string())?;
    let cheese = ws.cheese.as_ref().unwrap();
    println!(
        "built {} candidate groups, {} deleted discs, {} certificates passed",
        cheese.groups.len(),
        cheese.deleted_disc_count(),
        cheese.certificates.len()
    );
    println!("workspace written to {}", args.out.display());
    Ok(0)
}

/// The radius-budget inequality checks for k = 1..=kmax, fanned out over
/// `CHEESE_THREADS` workers and reassembled in k order.
fn epsilon_bound_checks(cheese: &SwissCheese, kmax: u32) -> Vec<EpsilonBoundCheck> {
    let ks: Vec<u32> = (1..=kmax).collect();
    if ks.is_empty() {
        return Vec::new();
    }
    let workers = thread_count().min(ks.len());
    let chunk = ks.len().div_ceil(workers);
    let mut out: Vec<Option<EpsilonBoundCheck>> = vec![None; ks.len()];
    std::thread::scope(|s| {
        for (k_chunk, out_chunk) in ks.chunks(chunk).zip(out.chunks_mut(chunk)) {
            s.spawn(move || {
                for (k, slot) in k_chunk.iter().zip(out_chunk.iter_mut()) {
                    *slot = Some(verify_epsilon_bound(cheese, *k));
                }
            });
        }
    });
    out.into_iter().map(|c| c.unwrap()).collect()
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, String> {
    let ws = WorkspaceFile::load(&args.workspace).map_err(|e| e.to_string())?;
    let Some(cheese) = &ws.cheese else {
        println!("workspace holds no deleted-disc set; nothing to verify (vacuous pass)");
        return Ok(0);
    };
    if cheese.groups.is_empty() {
        println!("deleted-disc set has no groups; nothing to verify (vacuous pass)");
        return Ok(0);
    }

    let mut failed: Option<String> = None;
    let mut report = |name: &str, pass: bool, detail: String| {
        println!(
            "certificate {name}: {}{}",
            if pass { "ok" } else { "FAIL" },
            if detail.is_empty() {
                String::new()
            } else {
                format!(" ({detail})")
            }
        );
        if !pass && failed.is_none() {
            failed = Some(name.to_string());
        }
    };

    let target_ok = cheese.target.certify_inside_unit_disc().is_ok();
    report("target_inside_unit_disc", target_ok, String::new());

    let mut acc_ok = true;
    let mut acc_detail = String::new();
    for g in &cheese.groups {
        match acceptance_predicate(&cheese.target, &g.candidate.disc, g.candidate.stage) {
            Ok(true) => {}
            Ok(false) => {
                acc_ok = false;
                acc_detail = format!("group {} fails acceptance", g.candidate.n);
                break;
            }
            Err(e) => {
                acc_ok = false;
                acc_detail = e.to_string();
                break;
            }
        }
    }
    report("candidate_acceptance", acc_ok, acc_detail);

    let budgets_ok = cheese.groups.iter().all(|g| g.budget.epsilon.is_positive());
    report("budget_positive", budgets_ok, String::new());

    let mut contain_ok = true;
    let mut contain_detail = String::new();
    for g in &cheese.groups {
        for d in &g.deleted {
            if !g.candidate.disc.closure_contains_disc(d) {
                contain_ok = false;
                contain_detail = format!("group {} holds an escaping disc", g.candidate.n);
            }
        }
    }
    report("deleted_inside_candidate", contain_ok, contain_detail);

    let all_deleted: Vec<_> = cheese.groups.iter().flat_map(|g| &g.deleted).collect();
    let mut disjoint_ok = true;
    'outer: for i in 0..all_deleted.len() {
        for j in i + 1..all_deleted.len() {
            if !all_deleted[i].open_disjoint(all_deleted[j]) {
                disjoint_ok = false;
                break 'outer;
            }
        }
    }
    report("deleted_pairwise_disjoint", disjoint_ok, String::new());

    let mut radii_ok = true;
    let mut radii_detail = String::new();
    for g in &cheese.groups {
        let sum = g
            .deleted
            .iter()
            .fold(Q::zero(), |acc, d| &acc + &d.radius);
        if sum >= g.budget.epsilon {
            radii_ok = false;
            radii_detail = format!("group {} radii sum reaches its budget", g.candidate.n);
        }
    }
    report("radii_sum_below_budget", radii_ok, radii_detail);

    let kmax = args.kmax.unwrap_or_else(|| {
        cheese
            .groups
            .iter()
            .map(|g| g.budget.kmax)
            .min()
            .unwrap_or(0)
    });
    let checks = epsilon_bound_checks(cheese, kmax);
    let bad = checks.iter().find(|c| !c.pass);
    report(
        "epsilon_bound",
        bad.is_none(),
        match bad {
            Some(c) => format!("violated at k={}", c.k),
            None => format!("k = 1..={kmax}"),
        },
    );

    let mut poles_ok = true;
    let mut poles_detail = String::new();
    for (i, f) in ws.rational_maps.iter().enumerate() {
        if let Err(e) = certify_poles(f, cheese) {
            poles_ok = false;
            poles_detail = format!("map {i}: {e}");
            break;
        }
    }
    if !ws.rational_maps.is_empty() {
        report("map_poles_clear_of_set", poles_ok, poles_detail);
    }

    match failed {
        Some(name) => {
            eprintln!("verification failed: certificate {name}");
            Ok(EXIT_CERT_FAILURE)
        }
        None => {
            println!("all certificates verified");
            Ok(0)
        }
    }
}

fn format_cells(cells: &BTreeSet<Cell>) -> String {
    if cells.is_empty() {
        return "none".to_string();
    }
    let names: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", names.join(", "))
}

fn cmd_classify(args: &ClassifyArgs) -> Result<u8, String> {
    if args.cells < 2 {
        return Err("a chain needs at least 2 cells".to_string());
    }
    let system = match args.direction {
        DirectionArg::None => propagation_none(args.cells),
        DirectionArg::Right | DirectionArg::Left => {
            let side = match args.direction {
                DirectionArg::Right => AccumulationSide::Right,
                _ => AccumulationSide::Left,
            };
            let chain = default_chain(args.cells as usize, side)?;
            propagation_from_chain(&chain, side).map_err(|e| e.to_string())?
        }
    };
    let classification = classify(&system);
    println!(
        "direction: {}",
        match system.direction {
            Direction::Rightward => "rightward",
            Direction::Leftward => "leftward",
            Direction::None => "none",
        }
    );
    println!("R-points: {}", format_cells(&classification.r_points));
    println!(
        "points of continuity: {}",
        format_cells(&classification.points_of_continuity)
    );
    if let Some(out) = &args.out {
        let mut ws = WorkspaceFile::new();
        ws.propagation_systems.push(system);
        ws.save(out).map_err(|e| e.to_string())?;
        println!("workspace written to {}", out.display());
    }
    Ok(0)
}

fn cmd_measure(args: &MeasureArgs) -> Result<u8, String> {
    let mode = match args.mode {
        ModeArg::Representing => MeasureMode::Representing,
        ModeArg::Jensen => MeasureMode::Jensen,
    };
    if let Some(m) = args.control {
        if m < 3 {
            return Err("control instance needs at least 3 roots of unity".to_string());
        }
        let report = measures::control_disc_algebra(m, mode);
        println!(
            "disc-algebra control, {} roots of unity: {}",
            report.m,
            if report.feasible { "feasible" } else { "infeasible" }
        );
        println!("uniform weight per root: {}", report.weight);
        println!("atom at origin: {}", report.atom_at_origin);
        println!("equality rows exact: {}", report.equality_rows_exact);
        println!("jensen rows vacuous: {}", report.jensen_rows_vacuous);
        println!("{}", report.note);
        return Ok(0);
    }

    let ws_path = args.workspace.as_ref().expect("clap enforces presence");
    let point_text = args.point.as_ref().expect("clap enforces presence");
    let ws = WorkspaceFile::load(ws_path).map_err(|e| e.to_string())?;
    let cheese = ws
        .cheese
        .as_ref()
        .ok_or_else(|| "workspace holds no deleted-disc set".to_string())?;
    let x = parse_point(point_text)?;
    if cheese.membership(&x) == Membership::Out {
        return Err(format!("point ({}, {}) lies outside the set", x.re, x.im));
    }
    let atom_cap = parse_q(&args.atom_cap)?;
    if args.resolution < 1 {
        return Err("resolution must be at least 1".to_string());
    }

    let mut support = vec![x.clone()];
    for i in -args.resolution..=args.resolution {
        for j in -args.resolution..=args.resolution {
            let z = QPoint::new(Q::new(i, args.resolution), Q::new(j, args.resolution));
            if z != x && cheese.membership(&z) == Membership::In {
                support.push(z);
            }
        }
    }

    // Test functions live outside the set by construction: simple poles at
    // deleted-disc centers, or plain monomials when no discs were deleted.
    let centers: Vec<QPoint> = cheese
        .groups
        .iter()
        .flat_map(|g| g.deleted.iter().map(|d| d.center.clone()))
        .take(args.testfns)
        .collect();
    let test_fns: Vec<_> = if centers.is_empty() {
        (1..=args.testfns as u32)
            .map(|k| {
                cheesecraft::calculus::RationalMap::polynomial(cheesecraft::poly::Poly::z().pow(k))
            })
            .collect()
    } else {
        centers
            .iter()
            .map(|c| {
                cheesecraft::calculus::RationalMap::from_partial_fractions(
                    &[(QPoint::int(1, 0), c.clone(), 1)],
                    cheesecraft::poly::Poly::zero(),
                )
                .expect("simple pole term is well-formed")
            })
            .collect()
    };

    let problem = FeasibilityProblem {
        x,
        support,
        test_fns,
        mode,
        atom_cap,
    };
    let result = measures::solve(&problem, cheesecraft::simplex::DEFAULT_PIVOT_CAP)
        .map_err(|e| e.to_string())?;
    match &result.status {
        FeasibilityStatus::Feasible { measure } => {
            println!(
                "status: feasible ({} support points, {} atoms)",
                problem.support.len(),
                measure.support.len()
            );
            for (z, w) in measure.support.iter().zip(&measure.weights) {
                println!(
                    "  weight ~{} at ({}, {})  [exact {}]",
                    w.to_decimal(6),
                    z.re,
                    z.im,
                    w
                );
            }
        }
        FeasibilityStatus::Infeasible { witness } => {
            println!(
                "status: infeasible (dual certificate over {} rows, verified: {})",
                witness.y.len(),
                witness.verify()
            );
        }
        FeasibilityStatus::Unknown => println!("status: unknown (pivot cap reached)"),
    }
    if !result.vacuous_jensen.is_empty() {
        println!("vacuous jensen rows: {:?}", result.vacuous_jensen);
    }
    if !result.excluded_jensen.is_empty() {
        println!("excluded jensen rows: {:?}", result.excluded_jensen);
    }
    println!("{}", result.note);
    Ok(0)
}

fn cmd_render(args: &RenderArgs) -> Result<u8, String> {
    let svg = match args.what {
        RenderWhat::Cheese => {
            let path = args
                .workspace
                .as_ref()
                .ok_or_else(|| "--workspace is required for --what cheese".to_string())?;
            let ws = WorkspaceFile::load(path).map_err(|e| e.to_string())?;
            let cheese = ws
                .cheese
                .as_ref()
                .ok_or_else(|| "workspace holds no deleted-disc set".to_string())?;
            render_cheese_svg(cheese)
        }
        RenderWhat::Chain => {
            let side = match args.direction {
                DirectionArg::Right => AccumulationSide::Right,
                DirectionArg::Left => AccumulationSide::Left,
                DirectionArg::None => {
                    return Err("--direction none has no chain geometry to draw".to_string())
                }
            };
            if args.cells < 2 {
                return Err("a chain needs at least 2 cells".to_string());
            }
            let chain = default_chain(args.cells as usize, side)?;
            render_chain_svg(&chain)
        }
    };
    std::fs::write(&args.out, svg).map_err(|e| e.to_string())?;
    println!("figure written to {}", args.out.display());
    Ok(0)
}
