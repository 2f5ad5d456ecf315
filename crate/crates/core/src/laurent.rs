//! Sparse Laurent polynomials in one variable `v` with exact coefficients.
//!
//! Terms are kept sorted by ascending exponent with zero coefficients dropped
//! eagerly, so two polynomials are equal exactly when their term lists are.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact coefficient ring for [`LaurentPoly`].
pub trait Coefficient: Clone + Eq + fmt::Debug + fmt::Display + Zero + One + Send + Sync {
    fn add_ref(&mut self, other: &Self);
    fn sub_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn is_negative(&self) -> bool;
}

impl Coefficient for BigInt {
    fn add_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coefficient for BigRational {
    fn add_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// A Laurent polynomial `sum c_k v^k`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly<C = BigInt> {
    terms: Vec<(i32, C)>,
}

/// Laurent polynomial over the rationals, used where statements are made after tensoring with Q.
pub type RationalLaurent = LaurentPoly<BigRational>;

impl<C: Coefficient> LaurentPoly<C> {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(C::one(), 0)
    }

    /// `c * v^k`.
    pub fn monomial(c: C, k: i32) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentPoly { terms: vec![(k, c)] }
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    /// Builds a polynomial from arbitrary `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i32, C)>>(terms: I) -> Self {
        let mut terms: Vec<(i32, C)> = terms.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(i32, C)> = Vec::with_capacity(terms.len());
        for (k, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1.add_ref(&c),
                _ => out.push((k, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        LaurentPoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Terms in ascending exponent order; never contains a zero coefficient.
    pub fn terms(&self) -> &[(i32, C)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest exponent, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i32> {
        self.terms.last().map(|t| t.0)
    }

    /// Lowest exponent, `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<i32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn coeff_at(&self, k: i32) -> C {
        match self.terms.binary_search_by_key(&k, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => C::zero(),
        }
    }

    /// The bar involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().rev().map(|(k, c)| (-k, c.clone())).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        let n = self.terms.len();
        (0..n).all(|i| {
            let (a, ca) = &self.terms[i];
            let (b, cb) = &self.terms[n - 1 - i];
            *a == -*b && ca == cb
        })
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// The substitution `v -> v^m` for `m > 0`.
    pub fn dilate(&self, m: i32) -> Self {
        assert!(m > 0, "dilation factor must be positive");
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e * m, c.clone())).collect(),
        }
    }

    /// Inverse of [`dilate`](Self::dilate); `None` if some exponent is not divisible by `m`.
    pub fn contract(&self, m: i32) -> Option<Self> {
        assert!(m > 0, "contraction factor must be positive");
        if self.terms.iter().any(|(e, _)| e % m != 0) {
            return None;
        }
        Some(LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e / m, c.clone())).collect(),
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, x)| (*e, x.mul_ref(c))).filter(|t| !t.1.is_zero()).collect(),
        }
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.iter().all(|t| !t.1.is_negative())
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            if a[i].0 < b[j].0 {
                out.push(a[i].clone());
                i += 1;
            } else if a[i].0 > b[j].0 {
                let c = if negate_other { b[j].1.negate() } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let mut c = a[i].1.clone();
                if negate_other {
                    c.sub_ref(&b[j].1);
                } else {
                    c.add_ref(&b[j].1);
                }
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate_other { t.1.negate() } else { t.1.clone() };
            out.push((t.0, c));
        }
        LaurentPoly { terms: out }
    }

    fn convolve(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.terms.len() == 1 {
            let (k, c) = &other.terms[0];
            return LaurentPoly {
                terms: self.terms.iter().map(|(e, x)| (e + k, x.mul_ref(c))).collect(),
            };
        }
        if self.terms.len() == 1 {
            return other.convolve(self);
        }
        let lo = self.terms[0].0 + other.terms[0].0;
        let hi = self.terms.last().unwrap().0 + other.terms.last().unwrap().0;
        let mut dense: Vec<C> = vec![C::zero(); (hi - lo + 1) as usize];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                dense[(ea + eb - lo) as usize].add_ref(&ca.mul_ref(cb));
            }
        }
        LaurentPoly {
            terms: dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (lo + i as i32, c))
                .collect(),
        }
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self = self.merge(&a.convolve(b), false);
    }

    /// `self -= a * b`.
    pub fn sub_mul(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self = self.merge(&a.convolve(b), true);
    }

    /// Evaluates the polynomial at `v = 1`.
    pub fn eval_at_one(&self) -> C {
        let mut s = C::zero();
        for (_, c) in &self.terms {
            s.add_ref(c);
        }
        s
    }
}

impl LaurentPoly<BigInt> {
    pub fn from_i64_terms<I: IntoIterator<Item = (i32, i64)>>(terms: I) -> Self {
        Self::from_terms(terms.into_iter().map(|(k, c)| (k, BigInt::from(c))))
    }

    /// `v + v^-1`.
    pub fn v_plus_inv() -> Self {
        Self::from_i64_terms([(-1, 1), (1, 1)])
    }

    pub fn to_rational(&self) -> RationalLaurent {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, BigRational::from_integer(c.clone()))).collect(),
        }
    }
}

impl<C: Coefficient> Add for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: Self) -> LaurentPoly<C> {
        self.merge(rhs, false)
    }
}

impl<C: Coefficient> Add for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: Self) -> LaurentPoly<C> {
        self.merge(&rhs, false)
    }
}

impl<C: Coefficient> Sub for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: Self) -> LaurentPoly<C> {
        self.merge(rhs, true)
    }
}

impl<C: Coefficient> Sub for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: Self) -> LaurentPoly<C> {
        self.merge(&rhs, true)
    }
}

impl<C: Coefficient> Mul for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: Self) -> LaurentPoly<C> {
        self.convolve(rhs)
    }
}

impl<C: Coefficient> Mul for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: Self) -> LaurentPoly<C> {
        self.convolve(&rhs)
    }
}

impl<C: Coefficient> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, c.negate())).collect(),
        }
    }
}

impl<C: Coefficient> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        -&self
    }
}

impl<C: Coefficient> AddAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &LaurentPoly<C>) {
        if !rhs.is_zero() {
            *self = self.merge(rhs, false);
        }
    }
}

impl<C: Coefficient> SubAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &LaurentPoly<C>) {
        if !rhs.is_zero() {
            *self = self.merge(rhs, true);
        }
    }
}

impl<C: Coefficient> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { c.negate() } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let unit = abs.is_one();
            match *k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !unit {
                        write!(f, "{abs}*")?;
                    }
                    if *k == 1 {
                        write!(f, "v")?;
                    } else {
                        write!(f, "v^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

// Serialized as `[[exponent, coefficient], ...]` with ascending exponents. Coefficients that
// fit in an i64 are JSON integers, larger ones are decimal strings.
impl Serialize for LaurentPoly<BigInt> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (k, c) in &self.terms {
            match c.to_i64() {
                Some(small) => seq.serialize_element(&(k, small))?,
                None => seq.serialize_element(&(k, c.to_string()))?,
            }
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WireCoeff {
    Small(i64),
    Big(String),
}

impl<'de> Deserialize<'de> for LaurentPoly<BigInt> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PolyVisitor;
        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = LaurentPoly<BigInt>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a list of [exponent, coefficient] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut terms: Vec<(i32, BigInt)> = Vec::new();
                while let Some((k, c)) = seq.next_element::<(i32, WireCoeff)>()? {
                    let c = match c {
                        WireCoeff::Small(x) => BigInt::from(x),
                        WireCoeff::Big(s) => s.parse().map_err(de::Error::custom)?,
                    };
                    if c.is_zero() {
                        return Err(de::Error::custom("zero coefficient in serialized polynomial"));
                    }
                    if let Some(last) = terms.last() {
                        if last.0 >= k {
                            return Err(de::Error::custom("exponents must be strictly ascending"));
                        }
                    }
                    terms.push((k, c));
                }
                Ok(LaurentPoly { terms })
            }
        }
        deserializer.deserialize_seq(PolyVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(terms: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_i64_terms(terms.iter().copied())
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p(&[(1, 1), (0, 1)]) + &p(&[(0, -1)]), p(&[(1, 1)]));
        assert_eq!(&LaurentPoly::zero() + &LaurentPoly::<BigInt>::zero(), LaurentPoly::zero());
        assert_eq!(&p(&[(2, 1), (0, -1)]) + &p(&[(0, 1), (-2, 1)]), p(&[(2, 1), (-2, 1)]));
    }

    #[test]
    fn mul_examples() {
        let s = LaurentPoly::v_plus_inv();
        assert_eq!(&s * &s, p(&[(2, 1), (0, 2), (-2, 1)]));
        assert_eq!(&s * &LaurentPoly::zero(), LaurentPoly::zero());
        assert_eq!(&p(&[(1, 1), (0, -1)]) * &p(&[(1, 1), (0, 1)]), p(&[(2, 1), (0, -1)]));
    }

    #[test]
    fn bar_examples() {
        assert_eq!(p(&[(2, 1), (1, 3)]).bar(), p(&[(-2, 1), (-1, 3)]));
        assert_eq!(LaurentPoly::v_plus_inv().bar(), LaurentPoly::v_plus_inv());
        assert!(LaurentPoly::<BigInt>::zero().bar().is_zero());
    }

    #[test]
    fn coeff_at_examples() {
        let s = LaurentPoly::v_plus_inv();
        assert_eq!(s.coeff_at(1), BigInt::from(1));
        assert_eq!(s.coeff_at(0), BigInt::from(0));
        assert_eq!(p(&[(3, 2)]).coeff_at(3), BigInt::from(2));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let a = p(&[(1, 2), (1, -2), (0, 0)]);
        assert!(a.is_zero());
        assert_eq!(a.degree(), None);
    }

    #[test]
    fn big_coefficients_survive() {
        let mut a = p(&[(0, i64::MAX)]);
        a = &a * &a;
        let expected: BigInt = BigInt::from(i64::MAX) * BigInt::from(i64::MAX);
        assert_eq!(a.coeff_at(0), expected);
        let json = serde_json::to_string(&a).unwrap();
        let back: LaurentPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn serialization_shape() {
        let a = p(&[(-1, 1), (2, -3)]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[-1,1],[2,-3]]");
        assert!(serde_json::from_str::<LaurentPoly>("[[2,1],[1,1]]").is_err());
        assert!(serde_json::from_str::<LaurentPoly>("[[1,0]]").is_err());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[(2, 1), (0, 2), (-2, 1)]).to_string(), "v^2 + 2 + v^-2");
        assert_eq!(p(&[(1, -3), (0, 1)]).to_string(), "-3*v + 1");
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i32..6, -20i64..20), 0..6).prop_map(|t| LaurentPoly::from_i64_terms(t))
    }

    proptest! {
        #[test]
        fn bar_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
            prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
        }

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            let mut acc = a.clone();
            acc.add_mul(&b, &c);
            prop_assert_eq!(acc, &a + &(&b * &c));
        }

        #[test]
        fn degree_is_additive(a in arb_poly(), b in arb_poly()) {
            if !a.is_zero() && !b.is_zero() {
                let ab = &a * &b;
                prop_assert_eq!(ab.degree(), Some(a.degree().unwrap() + b.degree().unwrap()));
                prop_assert_eq!(ab.valuation(), Some(a.valuation().unwrap() + b.valuation().unwrap()));
            }
        }

        #[test]
        fn serde_roundtrip(a in arb_poly()) {
            let json = serde_json::to_string(&a).unwrap();
            let back: LaurentPoly = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
