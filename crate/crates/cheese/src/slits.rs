//! Slit-block geometry (trapezoidal blocks carrying thinner-and-longer
//! slits that accumulate toward one side), chains of such blocks shrinking
//! toward an accumulation point, and a finite combinatorial model of
//! vanishing propagation over the chain's cells. The model's rules are
//! axioms; the payoff is that hulls, R-points, and points of continuity are
//! then computed from their definitions.

use crate::geometry::{Q, QPoint};
use crate::targets::{TargetError, Trapezoid};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SlitError {
    #[error("slit abscissas must be strictly monotone toward the {0:?} side")]
    AbscissaOrder(AccumulationSide),
    #[error("slit widths must be strictly decreasing")]
    WidthOrder,
    #[error("slit depths must be strictly increasing")]
    DepthOrder,
    #[error("slits overlap: {0} and {1}")]
    SlitOverlap(usize, usize),
    #[error("slit {0} leaves the block interior")]
    SlitOutside(usize),
    #[error("need at least one slit")]
    NoSlits,
    #[error("chain needs at least 2 blocks")]
    ChainTooShort,
    #[error("scale ratio must be in (0,1), got {0}")]
    BadRatio(Q),
    #[error("blocks {0} and {1} do not touch")]
    TouchFailure(usize, usize),
    #[error("chain side {0:?} does not match requested side {1:?}")]
    SideMismatch(AccumulationSide, AccumulationSide),
    #[error(transparent)]
    Target(#[from] TargetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccumulationSide {
    Left,
    Right,
}

/// A vertical slit cut into the top edge of a block: located at `abscissa`
/// (relative to the block's base interval), reaching down `depth`, with
/// horizontal `width`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slit {
    pub abscissa: Q,
    pub depth: Q,
    pub width: Q,
}

/// An axis-aligned rectangular block [x0,x1] x [y0,y1] carrying slits that
/// get thinner and longer toward the accumulation side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlitBlock {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
    pub slits: Vec<Slit>,
    pub side: AccumulationSide,
}

impl SlitBlock {
    pub fn new(
        x0: Q,
        x1: Q,
        y0: Q,
        y1: Q,
        slits: Vec<Slit>,
        side: AccumulationSide,
    ) -> Result<SlitBlock, SlitError> {
        if slits.is_empty() {
            return Err(SlitError::NoSlits);
        }
        for w in slits.windows(2) {
            let toward = match side {
                AccumulationSide::Right => w[0].abscissa < w[1].abscissa,
                AccumulationSide::Left => w[0].abscissa > w[1].abscissa,
            };
            if !toward {
                return Err(SlitError::AbscissaOrder(side));
            }
            if w[1].width >= w[0].width {
                return Err(SlitError::WidthOrder);
            }
            if w[1].depth <= w[0].depth {
                return Err(SlitError::DepthOrder);
            }
        }
        let height = &y1 - &y0;
        for (i, s) in slits.iter().enumerate() {
            let half = &s.width * &Q::new(1, 2);
            let lo = &s.abscissa - &half;
            let hi = &s.abscissa + &half;
            if lo <= x0 || hi >= x1 || !s.depth.is_positive() || s.depth >= height {
                return Err(SlitError::SlitOutside(i));
            }
        }
        // pairwise disjoint horizontal extents
        for i in 0..slits.len() {
            for j in (i + 1)..slits.len() {
                let (a, b) = (&slits[i], &slits[j]);
                let gap = (&a.abscissa - &b.abscissa).abs();
                let need = &(&a.width + &b.width) * &Q::new(1, 2);
                if gap <= need {
                    return Err(SlitError::SlitOverlap(i, j));
                }
            }
        }
        Ok(SlitBlock {
            x0,
            x1,
            y0,
            y1,
            slits,
            side,
        })
    }

    pub fn width(&self) -> Q {
        &self.x1 - &self.x0
    }

    /// The block's outline as a trapezoid (rectangle), for target-set use.
    pub fn outline(&self) -> Result<Trapezoid, TargetError> {
        Trapezoid::new([
            QPoint::new(self.x0.clone(), self.y0.clone()),
            QPoint::new(self.x1.clone(), self.y0.clone()),
            QPoint::new(self.x1.clone(), self.y1.clone()),
            QPoint::new(self.x0.clone(), self.y1.clone()),
        ])
    }

    /// Affine image under z -> origin + scale * (z - (x0, y0)), slits
    /// scaled along.
    fn scaled_translated(&self, scale: &Q, origin_x: &Q, origin_y: &Q) -> SlitBlock {
        let map_x = |x: &Q| origin_x + &(&(x - &self.x0) * scale);
        let map_y = |y: &Q| origin_y + &(&(y - &self.y0) * scale);
        SlitBlock {
            x0: map_x(&self.x0),
            x1: map_x(&self.x1),
            y0: map_y(&self.y0),
            y1: map_y(&self.y1),
            slits: self
                .slits
                .iter()
                .map(|s| Slit {
                    abscissa: map_x(&s.abscissa),
                    depth: &s.depth * scale,
                    width: &s.width * scale,
                })
                .collect(),
            side: self.side,
        }
    }
}

/// A canonical block on [0,1] x [0,1/2] with `n_slits` slits accumulating
/// on `side`: widths 4^-(i+1), depths (1/4)(1 - 2^-(i+1)), abscissas
/// marching toward the accumulation side.
pub fn template_block(n_slits: usize, side: AccumulationSide) -> Result<SlitBlock, SlitError> {
    let n = n_slits.max(1) as i64;
    let mut slits = Vec::new();
    for i in 0..n {
        let frac = Q::new(i + 1, n + 1); // strictly inside (0,1)
        let abscissa = match side {
            AccumulationSide::Right => frac,
            AccumulationSide::Left => &Q::one() - &frac,
        };
        slits.push(Slit {
            abscissa,
            width: Q::int(4).pow(-(i as i32 + 2)),
            depth: &Q::new(1, 4) * &(&Q::one() - &Q::int(2).pow(-(i as i32 + 1))),
        });
    }
    SlitBlock::new(Q::zero(), Q::one(), Q::zero(), Q::new(1, 2), slits, side)
}

/// Blocks laid side by side, touching, shrinking geometrically toward the
/// accumulation point x_0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlitChain {
    pub blocks: Vec<SlitBlock>,
    pub ratio: Q,
    pub x0: QPoint,
    pub side: AccumulationSide,
}

/// N scaled copies of `template`, the first of width `first_width`,
/// consecutive widths scaled by `ratio`, accumulating at `x0` from the
/// left or right according to the template's side. Baseline is y = x0.im.
pub fn build_chain(
    template: &SlitBlock,
    n: usize,
    ratio: &Q,
    x0: &QPoint,
    first_width: &Q,
) -> Result<SlitChain, SlitError> {
    if n < 2 {
        return Err(SlitError::ChainTooShort);
    }
    if !ratio.is_positive() || *ratio >= Q::one() {
        return Err(SlitError::BadRatio(ratio.clone()));
    }
    // Total span = first_width * (1 - ratio^n)/(1 - ratio) < first_width/(1-ratio).
    let mut blocks = Vec::with_capacity(n);
    let mut offset = Q::zero(); // distance from x0 to the far edge placed so far
    let mut w = first_width.clone();
    // Block 1 is farthest from x0; block k sits at distance span_after(k).
    // Walk from the nearest block outward, then reverse.
    let mut widths = Vec::with_capacity(n);
    for _ in 0..n {
        widths.push(w.clone());
        w = &w * ratio;
    }
    // nearest block is the last (smallest); accumulate from x0 outward
    for (idx, w) in widths.iter().enumerate().rev() {
        let scale = w / &template.width();
        let (bx0, _bx1) = match template.side {
            AccumulationSide::Right => {
                // blocks approach x0 from the left: nearest block's right
                // edge at x0 - offset... build leftward
                let right = &x0.re - &offset;
                (&right - w, right.clone())
            }
            AccumulationSide::Left => {
                let left = &x0.re + &offset;
                (left.clone(), &left + w)
            }
        };
        let b = template.scaled_translated(&scale, &bx0, &x0.im);
        blocks.push((idx, b));
        offset = &offset + w;
    }
    blocks.sort_by_key(|(idx, _)| *idx);
    let blocks: Vec<SlitBlock> = blocks.into_iter().map(|(_, b)| b).collect();
    // touching: consecutive blocks share an edge abscissa
    for i in 0..(n - 1) {
        let ok = match template.side {
            AccumulationSide::Right => blocks[i].x1 == blocks[i + 1].x0,
            AccumulationSide::Left => blocks[i].x0 == blocks[i + 1].x1,
        };
        if !ok {
            return Err(SlitError::TouchFailure(i, i + 1));
        }
    }
    Ok(SlitChain {
        blocks,
        ratio: ratio.clone(),
        x0: x0.clone(),
        side: template.side,
    })
}

impl SlitChain {
    /// Exact max distance from block `i`'s far corner to x0, squared.
    pub fn block_far_dist_sq(&self, i: usize) -> Q {
        let b = &self.blocks[i];
        let fx = match self.side {
            AccumulationSide::Right => b.x0.clone(),
            AccumulationSide::Left => b.x1.clone(),
        };
        let dx = &fx - &self.x0.re;
        let dy = &b.y1 - &self.x0.im;
        &(&dx * &dx) + &(&dy * &dy)
    }
}

/// A cell of the propagation model: a numbered block or the limit point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Block(u32),
    Limit,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Block(n) => write!(f, "{n}"),
            Cell::Limit => write!(f, "x_0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Rightward,
    Leftward,
    None,
}

/// Finite model of vanishing propagation over cells 1..n plus the limit
/// cell. P(c) is the set of cells forced to vanish when a function
/// vanishes on a neighborhood within cell c.
///
/// Rightward (slits accumulating toward the limit): vanishing spreads to
/// every later block and the limit; block cells are "thick" (vanishing
/// propagates within the cell itself, so even P(c) = {c} would not make c
/// an R-point candidate by itself — see `classify`). Leftward: vanishing
/// spreads to every earlier block; the limit cell touches every tail, so
/// P(limit) is everything. Direction none: no propagation, every cell is a
/// point cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationSystem {
    pub n: u32,
    pub direction: Direction,
    /// cells where intra-cell propagation already rules out both R-point
    /// and point-of-continuity status locally (the slit blocks); point
    /// cells (the limit cell, or every cell under direction none) are not
    /// listed here
    pub thick: BTreeSet<Cell>,
}

impl PropagationSystem {
    pub fn cells(&self) -> Vec<Cell> {
        let mut v: Vec<Cell> = (1..=self.n).map(Cell::Block).collect();
        v.push(Cell::Limit);
        v
    }

    /// The hull of the ideal of functions vanishing near `cell`: P(cell).
    pub fn hull(&self, cell: Cell) -> BTreeSet<Cell> {
        let mut out = BTreeSet::new();
        match (self.direction, cell) {
            (Direction::Rightward, Cell::Block(k)) => {
                for m in k..=self.n {
                    out.insert(Cell::Block(m));
                }
                out.insert(Cell::Limit);
            }
            (Direction::Rightward, Cell::Limit) => {
                out.insert(Cell::Limit);
            }
            (Direction::Leftward, Cell::Block(k)) => {
                for m in 1..=k {
                    out.insert(Cell::Block(m));
                }
            }
            (Direction::Leftward, Cell::Limit) => {
                // every neighborhood of the limit meets every tail: the
                // ideal is zero at model level, its hull is everything
                out.extend(self.cells());
            }
            (Direction::None, c) => {
                out.insert(c);
            }
        }
        out
    }
}

pub fn propagation_from_chain(
    chain: &SlitChain,
    side: AccumulationSide,
) -> Result<PropagationSystem, SlitError> {
    if chain.side != side {
        return Err(SlitError::SideMismatch(chain.side, side));
    }
    let n = chain.blocks.len() as u32;
    let direction = match side {
        AccumulationSide::Right => Direction::Rightward,
        AccumulationSide::Left => Direction::Leftward,
    };
    let thick = (1..=n).map(Cell::Block).collect();
    Ok(PropagationSystem { n, direction, thick })
}

pub fn propagation_none(n: u32) -> PropagationSystem {
    PropagationSystem {
        n,
        direction: Direction::None,
        thick: BTreeSet::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub r_points: BTreeSet<Cell>,
    pub points_of_continuity: BTreeSet<Cell>,
}

/// Compute both point classes from the definitions.
///
/// A cell x is an R-point when the hull of its vanishing ideal is {x};
/// thick cells are never R-points (inside the cell the hull of any
/// neighborhood ideal already exceeds a point). A cell x is a point of
/// continuity when no other cell's hull captures it — and again a thick
/// cell fails on its own: within the cell there are distinct points each
/// inside the other's hull.
pub fn classify(system: &PropagationSystem) -> Classification {
    let cells = system.cells();
    let mut r_points = BTreeSet::new();
    let mut points_of_continuity = BTreeSet::new();
    for &x in &cells {
        let thick = system.thick.contains(&x);
        let singleton = {
            let h = system.hull(x);
            h.len() == 1 && h.contains(&x)
        };
        if singleton && !thick {
            r_points.insert(x);
        }
        let captured =
            cells.iter().any(|&y| y != x && system.hull(y).contains(&x));
        if !captured && !thick {
            points_of_continuity.insert(x);
        }
    }
    Classification {
        r_points,
        points_of_continuity,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatedPointReport {
    /// cells where the hypothesis held (all neighbors are points of
    /// continuity) and the conclusion (cell is an R-point) was checked
    pub checked: Vec<Cell>,
    pub counterexamples: Vec<Cell>,
}

/// For every cell whose neighbors (in the cell order, the limit cell being
/// adjacent to block n) are all points of continuity, assert the cell is
/// an R-point.
pub fn check_isolated_point_lemma(system: &PropagationSystem) -> IsolatedPointReport {
    let cls = classify(system);
    let cells = system.cells();
    let neighbors = |x: Cell| -> Vec<Cell> {
        match x {
            Cell::Block(k) => {
                let mut v = Vec::new();
                if k > 1 {
                    v.push(Cell::Block(k - 1));
                }
                if k < system.n {
                    v.push(Cell::Block(k + 1));
                } else {
                    v.push(Cell::Limit);
                }
                v
            }
            Cell::Limit => {
                if system.n >= 1 {
                    vec![Cell::Block(system.n)]
                } else {
                    vec![]
                }
            }
        }
    };
    let mut checked = Vec::new();
    let mut counterexamples = Vec::new();
    for &x in &cells {
        let hypothesis = neighbors(x)
            .into_iter()
            .all(|y| cls.points_of_continuity.contains(&y));
        if hypothesis {
            checked.push(x);
            if !cls.r_points.contains(&x) {
                counterexamples.push(x);
            }
        }
    }
    IsolatedPointReport {
        checked,
        counterexamples,
    }
}

/// A randomized propagation system over point cells 1..n (no limit cell,
/// no thick cells) whose hulls are order intervals [a_x, b_x] containing
/// x. Used for the model-level search for counterexamples to the isolated
/// point property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSystem {
    pub n: u32,
    /// hull of cell x = blocks a..=b, 1-based, a <= x <= b
    pub hulls: Vec<(u32, u32)>,
}

impl IntervalSystem {
    pub fn random(n: u32, rng: &mut ChaCha8Rng) -> IntervalSystem {
        let hulls = (1..=n)
            .map(|x| {
                let a = rng.gen_range(1..=x);
                let b = rng.gen_range(x..=n);
                (a, b)
            })
            .collect();
        IntervalSystem { n, hulls }
    }

    fn hull(&self, x: u32) -> std::ops::RangeInclusive<u32> {
        let (a, b) = self.hulls[(x - 1) as usize];
        a..=b
    }

    /// Search for a violation: a cell x whose neighbors are all points of
    /// continuity yet whose hull exceeds {x}. Returns the first violating
    /// cell if any.
    pub fn isolated_point_violation(&self) -> Option<u32> {
        let poc: Vec<bool> = (1..=self.n)
            .map(|x| {
                !(1..=self.n).any(|y| y != x && self.hull(y).contains(&x))
            })
            .collect();
        for x in 1..=self.n {
            let mut neighbors = Vec::new();
            if x > 1 {
                neighbors.push(x - 1);
            }
            if x < self.n {
                neighbors.push(x + 1);
            }
            let hypothesis = !neighbors.is_empty()
                && neighbors.iter().all(|&y| poc[(y - 1) as usize]);
            if hypothesis {
                let h = self.hull(x);
                if h != (x..=x) {
                    return Some(x);
                }
            }
        }
        None
    }
}

/// Deterministic SVG of a slit chain: block outlines with slits drawn as
/// notches, plus the accumulation point.
pub fn render_chain_svg(chain: &SlitChain) -> String {
    let mut body = String::new();
    for b in &chain.blocks {
        let mut path = format!(
            "M {} {} L {} {} L {} {}",
            dec(&b.x0),
            dec(&b.y0),
            dec(&b.x1),
            dec(&b.y0),
            dec(&b.x1),
            dec(&b.y1),
        );
        // top edge right-to-left, descending into each slit
        let mut slits: Vec<&Slit> = b.slits.iter().collect();
        slits.sort_by(|a, b| b.abscissa.cmp(&a.abscissa));
        for s in slits {
            let half = &s.width * &Q::new(1, 2);
            let hi = &s.abscissa + &half;
            let lo = &s.abscissa - &half;
            let down = &b.y1 - &s.depth;
            path.push_str(&format!(
                " L {x1} {yt} L {x1} {yd} L {x0} {yd} L {x0} {yt}",
                x1 = dec(&hi),
                x0 = dec(&lo),
                yt = dec(&b.y1),
                yd = dec(&down),
            ));
        }
        path.push_str(&format!(" L {} {} Z", dec(&b.x0), dec(&b.y1)));
        body.push_str(&format!(
            "  <path d=\"{path}\" fill=\"#d0d0d0\" stroke=\"black\" stroke-width=\"0.002\"/>\n"
        ));
    }
    body.push_str(&format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"0.004\" fill=\"black\"/>\n",
        dec(&chain.x0.re),
        dec(&chain.x0.im)
    ));
    svg_document(&body)
}

/// Deterministic SVG of a cheese: outer disc with deleted discs as holes.
pub fn render_cheese_svg(cheese: &crate::cheese::SwissCheese) -> String {
    let mut body = String::new();
    body.push_str(
        "  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"#e8d9a0\" stroke=\"black\" stroke-width=\"0.004\"/>\n",
    );
    for g in &cheese.groups {
        for d in &g.deleted {
            body.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"white\" stroke=\"none\"/>\n",
                dec(&d.center.re),
                dec(&d.center.im),
                dec(&d.radius)
            ));
        }
    }
    svg_document(&body)
}

fn svg_document(body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"-1.1 -1.1 2.2 2.2\" width=\"600\" height=\"600\">\n\
         <g transform=\"scale(1,-1)\">\n{body}</g>\n</svg>\n"
    )
}

fn dec(x: &Q) -> String {
    x.to_decimal(6)
}
