//! Dense univariate polynomials with exact Gaussian-rational coefficients.
//! Coefficients are stored in ascending order with no trailing zeros.

use crate::geometry::{Q, QPoint};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<QPoint>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<QPoint>) -> Poly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Poly {
        Poly::constant(QPoint::int(1, 0))
    }

    pub fn constant(c: QPoint) -> Poly {
        Poly::new(vec![c])
    }

    /// The monomial z.
    pub fn z() -> Poly {
        Poly::new(vec![QPoint::int(0, 0), QPoint::int(1, 0)])
    }

    /// z - a.
    pub fn linear(a: &QPoint) -> Poly {
        Poly::new(vec![-a, QPoint::int(1, 0)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&QPoint> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &QPoint) -> QPoint {
        let mut acc = QPoint::int(0, 0);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = QPoint::int(0, 0);
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a + b
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![QPoint::int(0, 0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = a * b;
                coeffs[i + j] = &coeffs[i + j] + &prod;
            }
        }
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &QPoint) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Q::int(i as i64)))
            .collect();
        Poly::new(coeffs)
    }

    /// Exact Euclidean division: (quotient, remainder).
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let ddeg = divisor.degree().unwrap();
        let dlead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return (Poly::zero(), self.clone());
        }
        let qlen = rem.len() - ddeg;
        let mut quot = vec![QPoint::int(0, 0); qlen];
        for i in (0..qlen).rev() {
            let c = &rem[i + ddeg] / &dlead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let sub = &c * d;
                rem[i + j] = &rem[i + j] - &sub;
            }
            quot[i] = c;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic gcd over the Gaussian rationals.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Sum of coefficient moduli, as an envelope: an upper bound for |p(z)|
    /// on the closed unit disc. Returns the exact sum of |c|^2 roots upper.
    pub fn coeff_modulus_sum_upper(&self, tol: &Q) -> Q {
        let mut sum = Q::zero();
        for c in &self.coeffs {
            let m = crate::geometry::sqrt_bounds(&c.norm_sq(), tol).expect("norm_sq >= 0");
            sum += &m.upper;
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn p(coeffs: &[(i64, i64)]) -> Poly {
        Poly::new(coeffs.iter().map(|&(r, i)| QPoint::int(r, i)).collect())
    }

    #[test]
    fn eval_and_arith() {
        // (z^2 - 1)
        let f = p(&[(-1, 0), (0, 0), (1, 0)]);
        assert_eq!(f.eval(&QPoint::int(2, 0)), QPoint::int(3, 0));
        assert_eq!(f.eval(&QPoint::int(0, 1)), QPoint::int(-2, 0)); // i^2 - 1
        let g = Poly::linear(&QPoint::int(1, 0)); // z - 1
        let (quot, rem) = f.div_rem(&g);
        assert!(rem.is_zero());
        assert_eq!(quot, p(&[(1, 0), (1, 0)])); // z + 1
    }

    #[test]
    fn derivative_of_square() {
        let f = p(&[(0, 0), (0, 0), (1, 0)]); // z^2
        let d = f.derivative();
        assert_eq!(d.eval(&QPoint::int(3, 0)), QPoint::int(6, 0));
    }

    #[test]
    fn gcd_removes_common_factor() {
        let f = p(&[(-1, 0), (0, 0), (1, 0)]); // z^2 - 1
        let g = Poly::linear(&QPoint::int(1, 0)); // z - 1
        let d = f.gcd(&g);
        assert_eq!(d, g.monic());
    }

    #[test]
    fn complex_coefficients() {
        // (z - i)(z + i) = z^2 + 1
        let f = Poly::linear(&QPoint::int(0, 1)).mul(&Poly::linear(&QPoint::int(0, -1)));
        assert_eq!(f, p(&[(1, 0), (0, 0), (1, 0)]));
    }

    #[test]
    fn coeff_sum_upper_bounds_unit_disc_values() {
        let f = p(&[(1, 1), (0, -2), (3, 0)]);
        let bound = f.coeff_modulus_sum_upper(&q("1/1000000"));
        for z in [QPoint::int(1, 0), QPoint::int(0, 1), QPoint::new(q("3/5"), q("4/5"))] {
            let v = f.eval(&z).norm_sq();
            assert!(v <= &bound * &bound);
        }
    }
}
