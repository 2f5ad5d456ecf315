//! The Hecke algebra over `Z[v, v^-1]` with quadratic relation `(T_s - v^2)(T_s + 1) = 0`.
//!
//! [`HeckeElt`] is a finitely supported combination of basis elements tagged with the basis it
//! is written in. T-basis arithmetic here works for arbitrary group elements; everything that
//! needs Kazhdan-Lusztig polynomials goes through a [`KLTable`].

mod table;

pub use table::{KLTable, Row, CONVENTION_TAG};

use std::collections::BTreeMap;

use crate::coxeter::{CoxeterDatum, GroupElt, Side};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Which basis the coefficients of a [`HeckeElt`] refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Standard basis `T_w`.
    T,
    /// Kazhdan-Lusztig basis `C_w = v^-l(w) sum_{y <= w} P_{y,w}(v^2) T_y`.
    C,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElt {
    basis: Basis,
    terms: BTreeMap<GroupElt, LaurentPoly>,
}

impl HeckeElt {
    pub fn zero(basis: Basis) -> Self {
        HeckeElt { basis, terms: BTreeMap::new() }
    }

    pub fn basis_element(basis: Basis, w: GroupElt) -> Self {
        Self::monomial(basis, w, LaurentPoly::one())
    }

    pub fn monomial(basis: Basis, w: GroupElt, c: LaurentPoly) -> Self {
        let mut h = Self::zero(basis);
        h.add_term(w, &c);
        h
    }

    pub fn from_terms<I: IntoIterator<Item = (GroupElt, LaurentPoly)>>(basis: Basis, terms: I) -> Self {
        let mut h = Self::zero(basis);
        for (w, c) in terms {
            h.add_term(w, &c);
        }
        h
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElt, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElt> {
        self.terms.keys()
    }

    pub fn coeff(&self, w: &GroupElt) -> LaurentPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: GroupElt, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        HeckeElt::from_terms(self.basis, self.terms.iter().map(|(w, a)| (*w, a * c)))
    }

    pub fn add(&self, other: &HeckeElt) -> Result<Self> {
        self.same_basis(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HeckeElt) -> Result<Self> {
        self.add(&other.scale(&-LaurentPoly::one()))
    }

    fn same_basis(&self, other: &HeckeElt) -> Result<()> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::Format("Hecke elements written in different bases".into()))
        }
    }

    pub(crate) fn require(&self, basis: Basis) -> Result<()> {
        if self.basis == basis {
            Ok(())
        } else {
            Err(Error::Format(format!("expected an element in the {basis:?}-basis")))
        }
    }
}

fn v2() -> LaurentPoly {
    LaurentPoly::from_i64_terms([(2, 1)])
}

fn v2_minus_one() -> LaurentPoly {
    LaurentPoly::from_i64_terms([(2, 1), (0, -1)])
}

/// `T_s * h` or `h * T_s` for `h` in the T-basis.
pub fn t_mul_gen(datum: &CoxeterDatum, s: usize, h: &HeckeElt, side: Side) -> Result<HeckeElt> {
    h.require(Basis::T)?;
    if s >= datum.rank() {
        return Err(Error::BadGenerator(s));
    }
    let (q, q1) = (v2(), v2_minus_one());
    let mut out = HeckeElt::zero(Basis::T);
    for (w, c) in h.terms() {
        datum.check(w)?;
        let (sw, down) = match side {
            Side::Left => (datum.lmul_gen(s, w), datum.is_left_descent(s, w)),
            Side::Right => (datum.rmul_gen(w, s), datum.is_right_descent(w, s)),
        };
        if down {
            out.add_term(sw, &(c * &q));
            out.add_term(*w, &(c * &q1));
        } else {
            out.add_term(sw, c);
        }
    }
    Ok(out)
}

fn t_mul_omega(datum: &CoxeterDatum, k: usize, h: &HeckeElt) -> HeckeElt {
    let om = datum.omega_element(k).expect("valid Omega index");
    HeckeElt::from_terms(Basis::T, h.terms().map(|(w, c)| (datum.mul_unchecked(&om, w), c.clone())))
}

/// `T_w * h`, expanded along the ShortLex word of `w`.
pub fn t_basis_times(datum: &CoxeterDatum, w: &GroupElt, h: &HeckeElt) -> Result<HeckeElt> {
    datum.check(w)?;
    let mut acc = h.clone();
    for &s in datum.reduced_word(w).iter().rev() {
        acc = t_mul_gen(datum, s, &acc, Side::Left)?;
    }
    Ok(t_mul_omega(datum, w.omega(), &acc))
}

/// Product of two T-basis elements.
pub fn t_mul(datum: &CoxeterDatum, a: &HeckeElt, b: &HeckeElt) -> Result<HeckeElt> {
    a.require(Basis::T)?;
    b.require(Basis::T)?;
    let mut out = HeckeElt::zero(Basis::T);
    for (w, c) in a.terms() {
        let part = t_basis_times(datum, w, b)?;
        for (z, d) in part.terms() {
            out.add_term(*z, &(c * d));
        }
    }
    Ok(out)
}

/// `T_s^-1 * h = v^-2 T_s h + (v^-2 - 1) h`.
fn t_inv_gen_left(datum: &CoxeterDatum, s: usize, h: &HeckeElt) -> Result<HeckeElt> {
    let ts = t_mul_gen(datum, s, h, Side::Left)?;
    let a = LaurentPoly::from_i64_terms([(-2, 1)]);
    let b = LaurentPoly::from_i64_terms([(-2, 1), (0, -1)]);
    ts.scale(&a).add(&h.scale(&b))
}

/// `bar(T_w) = (T_{w^-1})^-1`.
pub fn bar_t(datum: &CoxeterDatum, w: &GroupElt) -> Result<HeckeElt> {
    datum.check(w)?;
    let mut acc = HeckeElt::basis_element(Basis::T, datum.identity());
    for &s in datum.reduced_word(w).iter().rev() {
        acc = t_inv_gen_left(datum, s, &acc)?;
    }
    Ok(t_mul_omega(datum, w.omega(), &acc))
}

/// The ring involution with `bar(v) = v^-1` and `bar(T_w) = (T_{w^-1})^-1`.
pub fn bar_involution(datum: &CoxeterDatum, h: &HeckeElt) -> Result<HeckeElt> {
    h.require(Basis::T)?;
    let mut out = HeckeElt::zero(Basis::T);
    for (w, c) in h.terms() {
        let bw = bar_t(datum, w)?;
        let cb = c.bar();
        for (z, d) in bw.terms() {
            out.add_term(*z, &(&cb * d));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::TypeLabel;

    fn t(d: &CoxeterDatum, w: &[usize]) -> HeckeElt {
        HeckeElt::basis_element(Basis::T, d.from_word(w).unwrap())
    }

    fn p(terms: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_i64_terms(terms.iter().copied())
    }

    #[test]
    fn quadratic_relation() {
        let d = CoxeterDatum::new(TypeLabel::A2, false);
        let ts = t(&d, &[0]);
        let sq = t_mul(&d, &ts, &ts).unwrap();
        let expected = HeckeElt::from_terms(
            Basis::T,
            [(d.identity(), p(&[(2, 1)])), (d.from_word(&[0]).unwrap(), p(&[(2, 1), (0, -1)]))],
        );
        assert_eq!(sq, expected);
        // (T_s - v^2)(T_s + 1) = 0
        let e = t(&d, &[]);
        let left = ts.sub(&e.scale(&p(&[(2, 1)]))).unwrap();
        let right = ts.add(&e).unwrap();
        assert!(t_mul(&d, &left, &right).unwrap().is_zero());
        assert_eq!(t_mul_gen(&d, 0, &e, Side::Left).unwrap(), ts);
    }

    #[test]
    fn lengths_add() {
        let d = CoxeterDatum::new(TypeLabel::A1Affine, false);
        let got = t_mul_gen(&d, 0, &t(&d, &[1, 0]), Side::Left).unwrap();
        assert_eq!(got, t(&d, &[0, 1, 0]));
    }

    #[test]
    fn braid_relation_in_a2() {
        let d = CoxeterDatum::new(TypeLabel::A2, false);
        let (t1, t2) = (t(&d, &[0]), t(&d, &[1]));
        let lhs = t_mul(&d, &t_mul(&d, &t1, &t2).unwrap(), &t1).unwrap();
        let rhs = t_mul(&d, &t_mul(&d, &t2, &t1).unwrap(), &t2).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, t(&d, &[0, 1, 0]));
    }

    #[test]
    fn associativity_instance() {
        let d = CoxeterDatum::new(TypeLabel::A2Affine, false);
        let ts = t(&d, &[0]);
        let sq = t_mul(&d, &ts, &ts).unwrap();
        assert_eq!(t_mul(&d, &sq, &ts).unwrap(), t_mul(&d, &ts, &sq).unwrap());
        let a = t(&d, &[0, 1]).add(&t(&d, &[2]).scale(&p(&[(1, 3)]))).unwrap();
        let b = t(&d, &[1, 2, 0]).add(&t(&d, &[])).unwrap();
        let c = t(&d, &[0, 2]);
        let ab_c = t_mul(&d, &t_mul(&d, &a, &b).unwrap(), &c).unwrap();
        let a_bc = t_mul(&d, &a, &t_mul(&d, &b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
        let e = t(&d, &[]);
        assert_eq!(t_mul(&d, &e, &a).unwrap(), a);
    }

    #[test]
    fn bar_of_generator() {
        let d = CoxeterDatum::new(TypeLabel::A1Affine, false);
        let ts = t(&d, &[0]);
        let b = bar_involution(&d, &ts).unwrap();
        let expected = HeckeElt::from_terms(
            Basis::T,
            [(d.from_word(&[0]).unwrap(), p(&[(-2, 1)])), (d.identity(), p(&[(-2, 1), (0, -1)]))],
        );
        assert_eq!(b, expected);
        // T_s * bar(T_s) = T_e
        assert_eq!(t_mul(&d, &ts, &b).unwrap(), t(&d, &[]));
        let e = t(&d, &[]);
        assert_eq!(bar_involution(&d, &e).unwrap(), e);
    }

    #[test]
    fn bar_is_an_involution_on_a_ball() {
        let d = CoxeterDatum::new(TypeLabel::A2Affine, false);
        let ball = crate::coxeter::Ball::enumerate(&d, 6).unwrap();
        for id in 0..ball.len() {
            let tw = HeckeElt::basis_element(Basis::T, ball.element(id));
            let bb = bar_involution(&d, &bar_involution(&d, &tw).unwrap()).unwrap();
            assert_eq!(bb, tw, "{}", ball.display(id));
        }
    }

    #[test]
    fn bar_is_multiplicative() {
        let d = CoxeterDatum::new(TypeLabel::A2Affine, true);
        let om = d.omega_element(1).unwrap();
        let x = HeckeElt::basis_element(Basis::T, d.multiply(&om, &d.from_word(&[0, 1]).unwrap()).unwrap());
        let y = t(&d, &[2, 0, 1]).add(&t(&d, &[1]).scale(&p(&[(1, 1)]))).unwrap();
        let lhs = bar_involution(&d, &t_mul(&d, &x, &y).unwrap()).unwrap();
        let rhs = t_mul(&d, &bar_involution(&d, &x).unwrap(), &bar_involution(&d, &y).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn c_basis_input_is_rejected() {
        let d = CoxeterDatum::new(TypeLabel::A2, false);
        let c = HeckeElt::basis_element(Basis::C, d.identity());
        assert!(t_mul(&d, &c, &c).is_err());
        assert!(bar_involution(&d, &c).is_err());
    }
}
