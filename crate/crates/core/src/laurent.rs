//! Laurent polynomials `Z[v, v^-1]` with exact integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A finitely supported map exponent -> coefficient in the variable `v`.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// The variable `v`.
    pub fn v() -> Self {
        Self::monomial(1, 1)
    }

    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if coeff != 0 {
            coeffs.insert(exp, coeff);
        }
        LaurentPoly { coeffs }
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, c);
        }
        p
    }

    /// The coefficients `c_0 c_1 ...` of `v^0, v^1, ...` provided the
    /// polynomial has no negative exponents; `None` otherwise.
    pub fn nonneg_coeff_row(&self) -> Option<Vec<i64>> {
        if self.min_exp().is_some_and(|e| e < 0) {
            return None;
        }
        let max = self.max_exp().unwrap_or(0);
        let mut row = vec![0i64; (max + 1) as usize];
        for (&e, &c) in &self.coeffs {
            row[e as usize] = c;
        }
        Some(row)
    }

    pub fn from_coeff_row(row: &[i64]) -> Self {
        Self::from_pairs(row.iter().enumerate().map(|(e, &c)| (e as i64, c)))
    }

    pub fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.coeffs.get(&exp).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0) == 1
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    /// The bar involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (-e, c)).collect(),
        }
    }

    /// Multiplication by `v^k`.
    pub fn shifted(&self, k: i64) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    pub fn scaled(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &k)| (e, k * c)).collect(),
        }
    }

    /// Evaluation at `v = 1` (the sum of the coefficients).
    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn has_nonneg_coeffs(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in rhs.iter() {
            self.add_term(e, c);
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in rhs.iter() {
            self.add_term(e, -c);
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scaled(-1)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.iter() {
            for (e2, c2) in rhs.iter() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.iter() {
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match e {
                0 => write!(f, "{a}")?,
                1 if a == 1 => write!(f, "v")?,
                1 => write!(f, "{a}v")?,
                _ if a == 1 => write!(f, "v^{e}")?,
                _ => write!(f, "{a}v^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ring_basics() {
        let v = LaurentPoly::v();
        let vinv = LaurentPoly::monomial(-1, 1);
        assert_eq!(&v * &vinv, LaurentPoly::one());
        let p = LaurentPoly::from_pairs([(0, 1), (2, -3)]);
        assert_eq!(&p - &p, LaurentPoly::zero());
        assert_eq!(p.eval_at_one(), -2);
        assert_eq!(p.coeff(2), -3);
    }

    #[test]
    fn bar_is_involution_on_samples() {
        let p = LaurentPoly::from_pairs([(-2, 5), (0, 1), (3, 7)]);
        assert_eq!(p.bar().bar(), p);
        assert_eq!(p.bar().coeff(2), 5);
    }

    #[test]
    fn coeff_row_round_trip() {
        let p = LaurentPoly::from_pairs([(0, 0), (1, 1), (3, 4)]);
        let row = p.nonneg_coeff_row().unwrap();
        assert_eq!(row, vec![0, 1, 0, 4]);
        assert_eq!(LaurentPoly::from_coeff_row(&row), p);
        assert!(LaurentPoly::monomial(-1, 1).nonneg_coeff_row().is_none());
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-4i64..5, -9i64..10), 0..6)
            .prop_map(LaurentPoly::from_pairs)
    }

    proptest! {
        #[test]
        fn mul_commutes_and_bar_is_ring_hom(p in arb_poly(), q in arb_poly()) {
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!((&p * &q).bar(), &p.bar() * &q.bar());
            prop_assert_eq!((&p + &q).bar(), &p.bar() + &q.bar());
        }
    }
}
