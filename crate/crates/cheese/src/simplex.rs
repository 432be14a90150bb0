//! Exact-rational linear feasibility via phase-one simplex with Bland's
//! rule. Feasible systems yield an exact solution vector; infeasible ones
//! yield a Farkas-style dual witness that is re-verified exactly before
//! being returned.

use crate::geometry::Q;
use serde::{Deserialize, Serialize};

/// A feasibility system over variables w_0..w_{n-1} with w >= 0:
/// equality rows a.w = b, inequality rows a.w >= b, and upper bounds
/// w_i <= c.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LinearSystem {
    pub n_vars: usize,
    pub eq: Vec<(Vec<Q>, Q)>,
    pub ge: Vec<(Vec<Q>, Q)>,
    pub ub: Vec<(usize, Q)>,
}

impl LinearSystem {
    pub fn new(n_vars: usize) -> LinearSystem {
        LinearSystem {
            n_vars,
            ..Default::default()
        }
    }

    /// Exact check of a candidate solution (length n_vars, w >= 0 included).
    pub fn satisfied_by(&self, w: &[Q]) -> bool {
        if w.len() != self.n_vars || w.iter().any(|x| x.is_negative()) {
            return false;
        }
        let dot = |a: &[Q]| -> Q {
            a.iter()
                .zip(w)
                .fold(Q::zero(), |acc, (c, x)| &acc + &(c * x))
        };
        self.eq.iter().all(|(a, b)| &dot(a) == b)
            && self.ge.iter().all(|(a, b)| &dot(a) >= b)
            && self.ub.iter().all(|(i, c)| &w[*i] <= c)
    }

    /// Standard form A x = b, x >= 0, b >= 0: surplus columns for ge rows,
    /// slack columns for upper bounds; rows with negative b negated.
    /// Returns (a, b, n_total) where the first n_vars columns are the
    /// original variables.
    fn standard_form(&self) -> (Vec<Vec<Q>>, Vec<Q>, usize) {
        let n_extra = self.ge.len() + self.ub.len();
        let n_total = self.n_vars + n_extra;
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut row_of = |mut coeffs: Vec<Q>, rhs: Q| {
            if rhs.is_negative() {
                for c in coeffs.iter_mut() {
                    *c = -&*c;
                }
                b.push(-&rhs);
            } else {
                b.push(rhs);
            }
            a.push(coeffs);
        };
        for (coeffs, rhs) in &self.eq {
            let mut row = vec![Q::zero(); n_total];
            row[..self.n_vars].clone_from_slice(coeffs);
            row_of(row, rhs.clone());
        }
        for (gi, (coeffs, rhs)) in self.ge.iter().enumerate() {
            let mut row = vec![Q::zero(); n_total];
            row[..self.n_vars].clone_from_slice(coeffs);
            row[self.n_vars + gi] = -Q::one(); // surplus
            row_of(row, rhs.clone());
        }
        for (ui, (var, cap)) in self.ub.iter().enumerate() {
            let mut row = vec![Q::zero(); n_total];
            row[*var] = Q::one();
            row[self.n_vars + self.ge.len() + ui] = Q::one(); // slack
            row_of(row, cap.clone());
        }
        (a, b, n_total)
    }
}

/// Dual certificate of infeasibility for the standardized system: a row
/// combination y with y.A <= 0 componentwise and y.b > 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasWitness {
    pub y: Vec<Q>,
    /// the standardized system the witness refers to
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
}

impl FarkasWitness {
    /// Exact re-verification of the certificate.
    pub fn verify(&self) -> bool {
        let m = self.a.len();
        if self.y.len() != m || self.b.len() != m || m == 0 {
            return false;
        }
        let n = self.a[0].len();
        for j in 0..n {
            let mut s = Q::zero();
            for i in 0..m {
                s = &s + &(&self.y[i] * &self.a[i][j]);
            }
            if s.is_positive() {
                return false;
            }
        }
        let mut yb = Q::zero();
        for i in 0..m {
            yb = &yb + &(&self.y[i] * &self.b[i]);
        }
        yb.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveOutcome {
    /// exact values for the original variables
    Feasible { w: Vec<Q> },
    Infeasible { witness: FarkasWitness },
    /// pivot cap reached (cannot happen with Bland's rule on finite
    /// systems, but the cap is honored)
    Unknown,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SimplexError {
    #[error("row has {0} coefficients, expected {1}")]
    RowLength(usize, usize),
    #[error("infeasibility detected but the dual witness failed exact verification")]
    WitnessInvalid,
}

/// Phase-one simplex: minimize the sum of artificial variables over the
/// standardized system. Bland's rule (lowest eligible index) guarantees
/// termination; `pivot_cap` is a safety valve only.
pub fn solve_feasibility(
    system: &LinearSystem,
    pivot_cap: usize,
) -> Result<SolveOutcome, SimplexError> {
    for (a, _) in system.eq.iter().chain(system.ge.iter()) {
        if a.len() != system.n_vars {
            return Err(SimplexError::RowLength(a.len(), system.n_vars));
        }
    }
    let (a, b, n_total) = system.standard_form();
    let m = a.len();
    if m == 0 {
        return Ok(SolveOutcome::Feasible {
            w: vec![Q::zero(); system.n_vars],
        });
    }

    // Tableau: columns [structural | artificial], one artificial per row.
    let n_cols = n_total + m;
    let mut t: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(n_cols + 1);
            row.extend(a[i].iter().cloned());
            for j in 0..m {
                row.push(if i == j { Q::one() } else { Q::zero() });
            }
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (0..m).map(|i| n_total + i).collect();

    // Phase-one objective row: reduced costs for cost 1 on artificials.
    // z_j - c_j with basic costs all 1 initially: obj[j] = sum_i t[i][j]
    // for structural j, 0 for artificials; obj value = sum b.
    let mut obj: Vec<Q> = (0..=n_cols)
        .map(|j| {
            let mut s = Q::zero();
            for row in t.iter() {
                s = &s + &row[j];
            }
            s
        })
        .collect();
    // subtract costs: structural c_j = 0, artificial c_j = 1
    for j in n_total..n_cols {
        obj[j] = &obj[j] - &Q::one();
    }

    let mut pivots = 0usize;
    loop {
        // Bland: entering = lowest column with positive reduced cost
        // (maximizing -sum artificials == minimizing sum).
        let entering = (0..n_cols).find(|&j| obj[j].is_positive());
        let Some(e) = entering else { break };
        // ratio test, Bland tie-break on lowest basis variable index
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][e].is_positive() {
                let ratio = &t[i][n_cols] / &t[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else {
            // unbounded phase-one cannot happen (objective bounded below
            // by 0); defensive stop
            return Ok(SolveOutcome::Unknown);
        };
        // pivot on (l, e)
        let p = t[l][e].clone();
        for v in t[l].iter_mut() {
            *v = &*v / &p;
        }
        for i in 0..m {
            if i != l && !t[i][e].is_zero() {
                let f = t[i][e].clone();
                for j in 0..=n_cols {
                    let d = &f * &t[l][j];
                    t[i][j] = &t[i][j] - &d;
                }
            }
        }
        if !obj[e].is_zero() {
            let f = obj[e].clone();
            for j in 0..=n_cols {
                let d = &f * &t[l][j];
                obj[j] = &obj[j] - &d;
            }
        }
        basis[l] = e;
        pivots += 1;
        if pivots >= pivot_cap {
            return Ok(SolveOutcome::Unknown);
        }
    }

    // objective value = -obj[rhs]? obj[n_cols] currently holds z - 0 =
    // sum of artificial basic values remaining.
    let residual = obj[n_cols].clone();
    if residual.is_zero() {
        let mut w = vec![Q::zero(); n_total];
        for i in 0..m {
            if basis[i] < n_total {
                w[basis[i]] = t[i][n_cols].clone();
            }
        }
        let w: Vec<Q> = w.into_iter().take(system.n_vars).collect();
        debug_assert!(system.satisfied_by(&w));
        return Ok(SolveOutcome::Feasible { w });
    }

    // Infeasible: y = c_B B^{-1}. The artificial column i is the unit
    // vector e_i, so its reduced cost is y_i - 1.
    let y: Vec<Q> = (0..m).map(|i| &obj[n_total + i] + &Q::one()).collect();
    let witness = FarkasWitness { y, a, b };
    if !witness.verify() {
        return Err(SimplexError::WitnessInvalid);
    }
    Ok(SolveOutcome::Infeasible { witness })
}

pub const DEFAULT_PIVOT_CAP: usize = 100_000;

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    #[test]
    fn two_weight_normalization_feasible() {
        let mut sys = LinearSystem::new(2);
        sys.eq.push((vec![Q::one(), Q::one()], Q::one()));
        match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
            SolveOutcome::Feasible { w } => {
                assert!(sys.satisfied_by(&w));
                assert_eq!(&w[0] + &w[1], Q::one());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradiction_yields_verified_witness() {
        // w_1 = 2 with w_1 <= 1
        let mut sys = LinearSystem::new(1);
        sys.eq.push((vec![Q::one()], Q::int(2)));
        sys.ub.push((0, Q::one()));
        match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
            SolveOutcome::Infeasible { witness } => assert!(witness.verify()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_rhs_handled() {
        // w_0 - w_1 = -1/2 with w_0 + w_1 = 1: w = (1/4, 3/4)
        let mut sys = LinearSystem::new(2);
        sys.eq.push((vec![Q::one(), -Q::one()], q("-1/2")));
        sys.eq.push((vec![Q::one(), Q::one()], Q::one()));
        match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
            SolveOutcome::Feasible { w } => {
                assert_eq!(w, vec![q("1/4"), q("3/4")]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ge_and_ub_rows() {
        // maximize nothing; need w_0 >= 1/2, w_0 <= 3/4, sum = 1
        let mut sys = LinearSystem::new(2);
        sys.eq.push((vec![Q::one(), Q::one()], Q::one()));
        sys.ge.push((vec![Q::one(), Q::zero()], q("1/2")));
        sys.ub.push((0, q("3/4")));
        match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
            SolveOutcome::Feasible { w } => assert!(sys.satisfied_by(&w)),
            other => panic!("{other:?}"),
        }
        // tighten to an empty band
        sys.ub[0].1 = q("1/4");
        assert!(matches!(
            solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap(),
            SolveOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn empty_system_is_feasible() {
        let sys = LinearSystem::new(3);
        match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
            SolveOutcome::Feasible { w } => assert_eq!(w, vec![Q::zero(); 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_bytes() {
        let mut sys = LinearSystem::new(3);
        sys.eq.push((vec![Q::one(), Q::one(), Q::one()], Q::one()));
        sys.ge.push((vec![Q::one(), Q::zero(), -Q::one()], q("1/8")));
        let a = solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap();
        let b = solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn pivot_cap_returns_unknown() {
        let mut sys = LinearSystem::new(2);
        sys.eq.push((vec![Q::one(), Q::one()], Q::one()));
        assert!(matches!(
            solve_feasibility(&sys, 0).unwrap(),
            SolveOutcome::Unknown | SolveOutcome::Feasible { .. }
        ));
    }

    #[test]
    fn degenerate_system_terminates() {
        // several redundant equalities; Bland's rule must not cycle
        let mut sys = LinearSystem::new(4);
        let one = Q::one();
        sys.eq
            .push((vec![one.clone(), one.clone(), one.clone(), one.clone()], one.clone()));
        sys.eq
            .push((vec![Q::int(2), Q::int(2), Q::int(2), Q::int(2)], Q::int(2)));
        sys.ge.push((vec![one.clone(), Q::zero(), Q::zero(), Q::zero()], Q::zero()));
        match solve_feasibility(&sys, DEFAULT_PIVOT_CAP).unwrap() {
            SolveOutcome::Feasible { w } => assert!(sys.satisfied_by(&w)),
            other => panic!("{other:?}"),
        }
    }
}
