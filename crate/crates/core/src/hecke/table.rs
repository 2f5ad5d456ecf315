use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{Basis, HeckeElt};
use crate::coxeter::{Ball, GroupElt, Side};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Normalization tag recorded in caches: parameter `v^2`, positive self-dual basis `C_w`.
pub const CONVENTION_TAG: &str = "Cprime-v2";

/// Sparse expansion `z -> coefficient`, sorted by ball id.
pub type Row = Vec<(usize, LaurentPoly)>;

type CoreRow = Vec<(u32, LaurentPoly)>;

/// Kazhdan-Lusztig polynomials, mu-coefficients and structure constants on a ball.
///
/// Polynomials are stored on the Coxeter part only (`P_{omega y, omega w} = P_{y,w}`) as
/// polynomials in `q = v^2`. Structure constants are filled lazily per right factor and
/// shared between threads once computed.
pub struct KLTable {
    ball: Ball,
    // p[w][y] for core ids y <= w (by id); zero unless y <= w in Bruhat order
    p: Vec<Vec<LaurentPoly>>,
    mu: Vec<Vec<(u32, BigInt)>>,
    h: Vec<OnceLock<Arc<Vec<CoreRow>>>>,
    // the ball is a whole finite group, so every product stays inside
    closed: bool,
}

fn v_power(k: i32) -> LaurentPoly {
    LaurentPoly::monomial(BigInt::one(), k)
}

impl KLTable {
    /// Runs the Kazhdan-Lusztig recursion over every element of the ball.
    pub fn compute(ball: Ball) -> KLTable {
        let n = ball.core_count();
        let mut p: Vec<Vec<LaurentPoly>> = Vec::with_capacity(n);
        let mut mu: Vec<Vec<(u32, BigInt)>> = Vec::with_capacity(n);
        p.push(vec![LaurentPoly::one()]);
        mu.push(Vec::new());
        for l in 1..=ball.radius() {
            let level = ball.core_level(l);
            let computed: Vec<Vec<LaurentPoly>> =
                level.clone().into_par_iter().map(|w| Self::recursion_step(&ball, &p, &mu, w)).collect();
            for (w, col) in level.zip(computed) {
                mu.push(Self::mu_column(&ball, w, &col));
                p.push(col);
            }
        }
        Self::from_columns(ball, p, mu)
    }

    fn from_columns(ball: Ball, p: Vec<Vec<LaurentPoly>>, mu: Vec<Vec<(u32, BigInt)>>) -> KLTable {
        let h = (0..ball.core_count()).map(|_| OnceLock::new()).collect();
        let rank = ball.datum().rank();
        let closed = (0..ball.core_count()).all(|w| (0..rank).all(|s| ball.core_lmul(w, s).is_some()));
        KLTable { ball, p, mu, h, closed }
    }

    /// Rebuilds a table from stored polynomials (core ids, polynomials in `q`), validating
    /// support and normalization.
    pub fn from_polynomials<I>(ball: Ball, records: I) -> Result<KLTable>
    where
        I: IntoIterator<Item = (usize, usize, LaurentPoly)>,
    {
        let n = ball.core_count();
        let mut p: Vec<Vec<LaurentPoly>> = (0..n).map(|w| vec![LaurentPoly::zero(); w + 1]).collect();
        let mut seen: Vec<usize> = vec![0; n];
        for (y, w, poly) in records {
            if w >= n || y > w || !ball.core_leq(y, w) {
                return Err(Error::Format(format!("record ({y},{w}) is not a Bruhat pair in the ball")));
            }
            if poly.is_zero() || !p[w][y].is_zero() {
                return Err(Error::Format(format!("record ({y},{w}) is zero or duplicated")));
            }
            p[w][y] = poly;
            seen[w] += 1;
        }
        for w in 0..n {
            if seen[w] != ball.core_lower(w).len() || !p[w][w].is_one() {
                return Err(Error::Format(format!("incomplete column for element {}", ball.display(ball.join(w, 0)))));
            }
        }
        let mu = (0..n).map(|w| Self::mu_column(&ball, w, &p[w])).collect();
        Ok(Self::from_columns(ball, p, mu))
    }

    fn lookup<'a>(ball: &Ball, p: &'a [Vec<LaurentPoly>], y: usize, w: usize) -> Option<&'a LaurentPoly> {
        if ball.core_leq(y, w) {
            Some(&p[w][y])
        } else {
            None
        }
    }

    // P_{x,w} = q^{1-c} P_{sx,v} + q^c P_{x,v} - sum_{z : sz < z} mu(z,v) q^{(l(w)-l(z))/2} P_{x,z}
    // with s the first letter of w, v = sw, c = 1 iff sx < x.
    fn recursion_step(ball: &Ball, p: &[Vec<LaurentPoly>], mu: &[Vec<(u32, BigInt)>], w: usize) -> Vec<LaurentPoly> {
        let s = ball.core_word(w)[0];
        let v = ball.core_lmul(w, s).expect("descent stays in ball");
        let lw = ball.core_length(w) as i32;
        let q = v_power(1);
        let corrections: Vec<(usize, LaurentPoly)> = mu[v]
            .iter()
            .filter(|(z, _)| ball.core_is_left_descent(s, *z as usize))
            .map(|(z, m)| {
                let z = *z as usize;
                let k = (lw - ball.core_length(z) as i32) / 2;
                (z, LaurentPoly::monomial(m.clone(), k))
            })
            .collect();
        let mut col = vec![LaurentPoly::zero(); w + 1];
        for &x in ball.core_lower(w) {
            let x = x as usize;
            let sx = ball.core_lmul(x, s).expect("Bruhat-smaller neighbours stay in ball");
            let down = ball.core_is_left_descent(s, x);
            let mut acc = LaurentPoly::zero();
            if let Some(a) = Self::lookup(ball, p, sx, v) {
                if down {
                    acc += a;
                } else {
                    acc.add_mul(a, &q);
                }
            }
            if let Some(b) = Self::lookup(ball, p, x, v) {
                if down {
                    acc.add_mul(b, &q);
                } else {
                    acc += b;
                }
            }
            for (z, c) in &corrections {
                if let Some(pz) = Self::lookup(ball, p, x, *z) {
                    acc.sub_mul(c, pz);
                }
            }
            col[x] = acc;
        }
        col
    }

    fn mu_column(ball: &Ball, w: usize, col: &[LaurentPoly]) -> Vec<(u32, BigInt)> {
        let lw = ball.core_length(w);
        ball.core_lower(w)
            .iter()
            .filter_map(|&y| {
                let y = y as usize;
                let d = lw - ball.core_length(y);
                if d % 2 == 0 {
                    return None;
                }
                let m = col[y].coeff_at(((d - 1) / 2) as i32);
                (!m.is_zero()).then_some((y as u32, m))
            })
            .collect()
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    /// Whether the ball is the whole (finite) group.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    // room left for a left factor when the right factor has length `ly`
    fn room(&self, ly: usize) -> Option<usize> {
        if self.closed {
            Some(usize::MAX)
        } else {
            self.radius().checked_sub(ly)
        }
    }

    /// Number of core ids `x` with `C_x C_y` computable.
    pub fn left_factors(&self, y: usize) -> usize {
        match self.room(self.ball.core_length(y)) {
            Some(r) => self.ball.cores_up_to(r.min(self.radius())),
            None => 0,
        }
    }

    /// The table restricted to a smaller ball (a prefix of this one).
    pub fn truncate(&self, radius: usize) -> KLTable {
        let ball = self.ball.truncate(radius);
        let n = ball.core_count();
        Self::from_columns(ball, self.p[..n].to_vec(), self.mu[..n].to_vec())
    }

    fn ids(&self, y: &GroupElt, w: &GroupElt) -> Result<(usize, usize)> {
        let y = self.ball.id_of(y).ok_or(Error::NotInBall)?;
        let w = self.ball.id_of(w).ok_or(Error::NotInBall)?;
        Ok((y, w))
    }

    /// `P_{y,w}` as a polynomial in `q` on core ids.
    pub fn core_p(&self, y: usize, w: usize) -> LaurentPoly {
        Self::lookup(&self.ball, &self.p, y, w).cloned().unwrap_or_default()
    }

    /// `P_{y,w}` on ball ids (zero when the length-zero parts differ).
    pub fn p_id(&self, y: usize, w: usize) -> LaurentPoly {
        let (cy, ky) = self.ball.split(y);
        let (cw, kw) = self.ball.split(w);
        if ky != kw {
            return LaurentPoly::zero();
        }
        self.core_p(cy, cw)
    }

    /// The Kazhdan-Lusztig polynomial `P_{y,w}` in `q = v^2`.
    pub fn kl_polynomial(&self, y: &GroupElt, w: &GroupElt) -> Result<LaurentPoly> {
        let (y, w) = self.ids(y, w)?;
        Ok(self.p_id(y, w))
    }

    /// `P_{y,w}(v^2)` written in `v`.
    pub fn kl_polynomial_v(&self, y: &GroupElt, w: &GroupElt) -> Result<LaurentPoly> {
        Ok(self.kl_polynomial(y, w)?.dilate(2))
    }

    /// Nonzero `mu(z, w)` for `z < w` on core ids.
    pub fn core_mu(&self, w: usize) -> &[(u32, BigInt)] {
        &self.mu[w]
    }

    pub fn mu_id(&self, y: usize, w: usize) -> BigInt {
        let (cy, ky) = self.ball.split(y);
        let (cw, kw) = self.ball.split(w);
        if ky != kw {
            return BigInt::zero();
        }
        self.mu[cw]
            .binary_search_by_key(&(cy as u32), |t| t.0)
            .map(|i| self.mu[cw][i].1.clone())
            .unwrap_or_default()
    }

    /// Coefficient of `q^{(l(w)-l(y)-1)/2}` in `P_{y,w}`.
    pub fn mu(&self, y: &GroupElt, w: &GroupElt) -> Result<BigInt> {
        let (y, w) = self.ids(y, w)?;
        Ok(self.mu_id(y, w))
    }

    /// All stored `(y, w, P_{y,w})` on core ids, column by column.
    pub fn core_polynomials(&self) -> impl Iterator<Item = (usize, usize, &LaurentPoly)> {
        (0..self.ball.core_count())
            .flat_map(move |w| self.ball.core_lower(w).iter().map(move |&y| (y as usize, w, &self.p[w][y as usize])))
    }

    /// `C_w` in the T-basis.
    pub fn c_basis_id(&self, w: usize) -> HeckeElt {
        let (cw, k) = self.ball.split(w);
        let shift = v_power(-(self.ball.core_length(cw) as i32));
        HeckeElt::from_terms(
            Basis::T,
            self.ball.core_lower(cw).iter().map(|&y| {
                let y = y as usize;
                (self.ball.element(self.ball.join(y, k)), &self.p[cw][y].dilate(2) * &shift)
            }),
        )
    }

    pub fn c_basis(&self, w: &GroupElt) -> Result<HeckeElt> {
        let id = self.ball.id_of(w).ok_or(Error::NotInBall)?;
        Ok(self.c_basis_id(id))
    }

    /// Rewrites a C-basis element in the T-basis.
    pub fn c_to_t(&self, h: &HeckeElt) -> Result<HeckeElt> {
        h.require(Basis::C)?;
        let mut out = HeckeElt::zero(Basis::T);
        for (w, c) in h.terms() {
            let cw = self.c_basis(w)?;
            for (y, a) in cw.terms() {
                out.add_term(*y, &(c * a));
            }
        }
        Ok(out)
    }

    /// Rewrites a T-basis element in the C-basis by peeling off Bruhat-maximal terms.
    pub fn t_to_c(&self, h: &HeckeElt) -> Result<HeckeElt> {
        h.require(Basis::T)?;
        let mut dense: Vec<LaurentPoly> = vec![LaurentPoly::zero(); self.ball.len()];
        for (w, c) in h.terms() {
            let id = self.ball.id_of(w).ok_or_else(|| Error::BallExceeded {
                radius: self.radius(),
                what: "T-to-C conversion of an element outside the ball".into(),
            })?;
            dense[id] = c.clone();
        }
        let terms = self.peel(&mut dense);
        Ok(HeckeElt::from_terms(Basis::C, terms.into_iter().map(|(id, c)| (self.ball.element(id), c))))
    }

    // Consumes a dense T-basis vector on ball ids; returns C-coefficients in ascending id order.
    fn peel(&self, dense: &mut [LaurentPoly]) -> Row {
        let mut out = Vec::new();
        for w in (0..dense.len()).rev() {
            if dense[w].is_zero() {
                continue;
            }
            let top = std::mem::take(&mut dense[w]);
            let (cw, k) = self.ball.split(w);
            for &y in self.ball.core_lower(cw) {
                let y = y as usize;
                if y != cw {
                    dense[self.ball.join(y, k)].sub_mul(&top, &self.p[cw][y].dilate(2));
                }
            }
            out.push((w, top.shift(self.ball.core_length(cw) as i32)));
        }
        out.reverse();
        out
    }

    // Left multiplication by T_s on a sparse core vector; `scratch` is all-zero on entry and exit.
    fn t_left_sparse(&self, s: usize, x: &CoreRow, scratch: &mut [LaurentPoly], touched: &mut Vec<usize>) -> CoreRow {
        let q = v_power(2);
        let q1 = LaurentPoly::from_i64_terms([(2, 1), (0, -1)]);
        let mut bump = |i: usize, c: LaurentPoly, scratch: &mut [LaurentPoly]| {
            if scratch[i].is_zero() {
                touched.push(i);
            }
            scratch[i] += &c;
        };
        for (w, c) in x {
            let w = *w as usize;
            let sw = self.ball.core_lmul(w, s).expect("product stays inside the ball");
            if self.ball.core_is_left_descent(s, w) {
                bump(sw, c * &q, scratch);
                bump(w, c * &q1, scratch);
            } else {
                bump(sw, c.clone(), scratch);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let out = touched
            .drain(..)
            .filter_map(|i| {
                let c = std::mem::take(&mut scratch[i]);
                (!c.is_zero()).then_some((i as u32, c))
            })
            .collect();
        out
    }

    // All rows C_x C_y for x with l(x) + l(y) <= radius, through the T-basis.
    fn compute_h_batch(&self, y: usize) -> Vec<CoreRow> {
        let ball = &self.ball;
        let n = ball.core_count();
        let ly = ball.core_length(y);
        let m = self.left_factors(y);
        let shift_y = v_power(-(ly as i32));
        let cy: CoreRow =
            ball.core_lower(y).iter().map(|&z| (z, &self.p[y][z as usize].dilate(2) * &shift_y)).collect();
        // tz[z] = T_z * C_y in the T-basis
        let mut tz: Vec<CoreRow> = Vec::with_capacity(m);
        let mut scratch = vec![LaurentPoly::zero(); n];
        let mut touched = Vec::new();
        tz.push(cy);
        for z in 1..m {
            let s = ball.core_word(z)[0];
            let sz = ball.core_lmul(z, s).unwrap();
            let next = self.t_left_sparse(s, &tz[sz], &mut scratch, &mut touched);
            tz.push(next);
        }
        (0..m)
            .into_par_iter()
            .map(|x| {
                let mut dense = vec![LaurentPoly::zero(); n];
                let shift_x = v_power(-(ball.core_length(x) as i32));
                for &z in ball.core_lower(x) {
                    let coeff = &self.p[x][z as usize].dilate(2) * &shift_x;
                    for (u, a) in &tz[z as usize] {
                        dense[*u as usize].add_mul(&coeff, a);
                    }
                }
                self.peel_core(&mut dense)
            })
            .collect()
    }

    fn peel_core(&self, dense: &mut [LaurentPoly]) -> CoreRow {
        let mut out = Vec::new();
        for w in (0..dense.len()).rev() {
            if dense[w].is_zero() {
                continue;
            }
            let top = std::mem::take(&mut dense[w]);
            for &y in self.ball.core_lower(w) {
                let y = y as usize;
                if y != w {
                    dense[y].sub_mul(&top, &self.p[w][y].dilate(2));
                }
            }
            out.push((w as u32, top.shift(self.ball.core_length(w) as i32)));
        }
        out.reverse();
        out
    }

    fn h_batch(&self, y: usize) -> &Arc<Vec<CoreRow>> {
        self.h[y].get_or_init(|| Arc::new(self.compute_h_batch(y)))
    }

    /// Computes and stores every structure-constant row reachable inside the ball.
    pub fn fill_h(&self) {
        (0..self.ball.core_count()).into_par_iter().for_each(|y| {
            self.h_batch(y);
        });
    }

    fn exceeded(&self, lx: usize, ly: usize) -> Error {
        Error::BallExceeded {
            radius: self.radius(),
            what: format!("product of lengths {lx} + {ly}"),
        }
    }

    /// Whether `C_x C_y` can be expanded inside the ball (core or ball ids alike).
    pub fn h_available(&self, x: usize, y: usize) -> bool {
        self.closed || self.ball.length(x) + self.ball.length(y) <= self.radius()
    }

    /// The row `z -> h_{x,y,z}` for Coxeter elements (core ids).
    pub fn core_h_row(&self, x: usize, y: usize) -> Result<&[(u32, LaurentPoly)]> {
        let (lx, ly) = (self.ball.core_length(x), self.ball.core_length(y));
        if !self.closed && lx + ly > self.radius() {
            return Err(self.exceeded(lx, ly));
        }
        Ok(&self.h_batch(y)[x])
    }

    /// The row `z -> h_{x,y,z}` on ball ids; length-zero parts are transported through the
    /// diagram automorphisms.
    pub fn h_row(&self, x: usize, y: usize) -> Result<Row> {
        let (cx, kx) = self.ball.split(x);
        let (cy, ky) = self.ball.split(y);
        let twisted = self.ball.core_conj(self.ball.datum().omega_inverse(ky), cx);
        let k = self.ball.datum().omega_mul(kx, ky);
        let row = self.core_h_row(twisted, cy)?;
        Ok(row.iter().map(|(z, c)| (self.ball.join(*z as usize, k), c.clone())).collect())
    }

    /// `C_x C_y` expanded in the C-basis.
    pub fn h_constants(&self, x: &GroupElt, y: &GroupElt) -> Result<HeckeElt> {
        let (x, y) = self.ids(x, y)?;
        let row = self.h_row(x, y)?;
        Ok(HeckeElt::from_terms(Basis::C, row.into_iter().map(|(z, c)| (self.ball.element(z), c))))
    }

    /// `C_s C_w` (left) or `C_w C_s` (right) on core ids via the mu-coefficients. The flag is
    /// true when the expansion contains a term outside the ball, which is then omitted.
    pub fn core_gen_product(&self, s: usize, w: usize, side: Side) -> (CoreRow, bool) {
        let ball = &self.ball;
        let descent = |z: usize| match side {
            Side::Left => ball.core_is_left_descent(s, z),
            Side::Right => ball.core_is_right_descent(z, s),
        };
        if descent(w) {
            return (vec![(w as u32, LaurentPoly::v_plus_inv())], false);
        }
        let up = match side {
            Side::Left => ball.core_lmul(w, s),
            Side::Right => ball.core_rmul(w, s),
        };
        let mut row: CoreRow = self.mu[w]
            .iter()
            .filter(|(z, _)| descent(*z as usize))
            .map(|(z, m)| (*z, LaurentPoly::constant(m.clone())))
            .collect();
        if let Some(u) = up {
            row.push((u as u32, LaurentPoly::one()));
        }
        (row, up.is_none())
    }

    /// `C_s C_w` or `C_w C_s` on ball ids.
    pub fn gen_product(&self, s: usize, w: usize, side: Side) -> (Row, bool) {
        let (cw, k) = self.ball.split(w);
        let s = match side {
            Side::Left => self.ball.datum().omega_permutation(self.ball.datum().omega_inverse(k))[s],
            Side::Right => s,
        };
        let (row, escaped) = self.core_gen_product(s, cw, side);
        let mut row: Row = row.into_iter().map(|(z, c)| (self.ball.join(z as usize, k), c)).collect();
        row.sort_by_key(|t| t.0);
        (row, escaped)
    }

    /// Structure constants `C_x C_y` for all `x` against a fixed `y`, computed by the
    /// mu-recursion `C_s C_{x'} = C_x + sum mu(z,x') C_z` instead of the T-basis. Used as an
    /// independent cross-check of [`core_h_row`](Self::core_h_row).
    pub fn mu_recursion_rows(&self, y: usize) -> Vec<Row> {
        let ball = &self.ball;
        let m = self.left_factors(y);
        let n = ball.core_count();
        let mut rows: Vec<Row> = Vec::with_capacity(m);
        rows.push(vec![(y, LaurentPoly::one())]);
        for x in 1..m {
            let s = ball.core_word(x)[0];
            let xp = ball.core_lmul(x, s).unwrap();
            let mut dense = vec![LaurentPoly::zero(); n];
            for (w, a) in &rows[xp] {
                let (prod, escaped) = self.core_gen_product(s, *w, Side::Left);
                assert!(!escaped, "mu-recursion left the ball");
                for (z, c) in prod {
                    dense[z as usize].add_mul(a, &c);
                }
            }
            for (z, m) in &self.mu[xp] {
                if ball.core_is_left_descent(s, *z as usize) {
                    let mc = LaurentPoly::constant(m.clone());
                    for (u, a) in &rows[*z as usize] {
                        dense[*u].sub_mul(&mc, a);
                    }
                }
            }
            rows.push(dense.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect());
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{CoxeterDatum, TypeLabel};
    use crate::hecke::{bar_involution, t_mul};

    fn table(t: TypeLabel, radius: usize, extended: bool) -> KLTable {
        KLTable::compute(Ball::enumerate(&CoxeterDatum::new(t, extended), radius).unwrap())
    }

    fn q(terms: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_i64_terms(terms.iter().copied())
    }

    #[test]
    fn diagonal_and_generators() {
        let t = table(TypeLabel::A2Affine, 4, false);
        let d = t.ball().datum().clone();
        for id in 0..t.ball().len() {
            let w = t.ball().element(id);
            assert!(t.kl_polynomial(&w, &w).unwrap().is_one());
        }
        let s = d.generator(0).unwrap();
        assert!(t.kl_polynomial(&d.identity(), &s).unwrap().is_one());
        assert_eq!(t.mu(&d.identity(), &s).unwrap(), BigInt::one());
    }

    #[test]
    fn a3_known_polynomial() {
        let t = table(TypeLabel::A3, 6, false);
        let d = t.ball().datum().clone();
        let y = d.from_word(&[1]).unwrap();
        let w = d.from_word(&[1, 0, 2, 1]).unwrap();
        assert_eq!(t.kl_polynomial(&y, &w).unwrap(), q(&[(0, 1), (1, 1)]));
        assert_eq!(t.mu(&y, &w).unwrap(), BigInt::one());
        assert_eq!(t.kl_polynomial_v(&y, &w).unwrap(), q(&[(0, 1), (2, 1)]));
    }

    #[test]
    fn c_basis_of_generator() {
        let t = table(TypeLabel::A1Affine, 3, false);
        let d = t.ball().datum().clone();
        let s = d.generator(0).unwrap();
        let cs = t.c_basis(&s).unwrap();
        let vinv = q(&[(-1, 1)]);
        let expected = HeckeElt::from_terms(Basis::T, [(d.identity(), vinv.clone()), (s, vinv)]);
        assert_eq!(cs, expected);
        assert_eq!(t.c_basis(&d.identity()).unwrap(), HeckeElt::basis_element(Basis::T, d.identity()));
    }

    #[test]
    fn generator_squares() {
        let t = table(TypeLabel::A2Affine, 4, false);
        let d = t.ball().datum().clone();
        let s = d.generator(1).unwrap();
        let h = t.h_constants(&s, &s).unwrap();
        assert_eq!(h, HeckeElt::monomial(Basis::C, s, LaurentPoly::v_plus_inv()));
        let w = d.from_word(&[0, 1, 2]).unwrap();
        let h = t.h_constants(&d.identity(), &w).unwrap();
        assert_eq!(h, HeckeElt::basis_element(Basis::C, w));
    }

    #[test]
    fn h_rows_match_direct_product() {
        let t = table(TypeLabel::A2Affine, 6, true);
        let d = t.ball().datum().clone();
        let b = t.ball();
        for (x, y) in [(5usize, 7usize), (10, 3), (4, 16), (20, 2), (13, 13)] {
            if !t.h_available(x, y) {
                continue;
            }
            let cx = t.c_basis_id(x);
            let cy = t.c_basis_id(y);
            let direct = t.t_to_c(&t_mul(&d, &cx, &cy).unwrap()).unwrap();
            let row = t.h_constants(&b.element(x), &b.element(y)).unwrap();
            assert_eq!(direct, row, "{} * {}", b.display(x), b.display(y));
        }
    }

    #[test]
    fn mu_recursion_agrees_with_t_basis() {
        let t = table(TypeLabel::A2Affine, 7, false);
        for y in 0..t.ball().core_count() {
            let mu_rows = t.mu_recursion_rows(y);
            for (x, row) in mu_rows.iter().enumerate() {
                let via_t: Row = t.core_h_row(x, y).unwrap().iter().map(|(z, c)| (*z as usize, c.clone())).collect();
                assert_eq!(&via_t, row);
            }
        }
    }

    #[test]
    fn bar_invariance_small() {
        let t = table(TypeLabel::C2Affine, 5, false);
        let d = t.ball().datum().clone();
        for id in 0..t.ball().len() {
            let c = t.c_basis_id(id);
            assert_eq!(bar_involution(&d, &c).unwrap(), c);
        }
    }

    #[test]
    fn products_beyond_the_ball_are_refused() {
        let t = table(TypeLabel::A1Affine, 4, false);
        let last = t.ball().len() - 1;
        assert!(matches!(t.h_row(last, 1), Err(Error::BallExceeded { .. })));
    }

    #[test]
    fn reload_from_polynomials() {
        let t = table(TypeLabel::A2Affine, 5, false);
        let records: Vec<_> = t.core_polynomials().map(|(y, w, p)| (y, w, p.clone())).collect();
        let back = KLTable::from_polynomials(t.ball().clone(), records.clone()).unwrap();
        for (y, w, p) in &records {
            assert_eq!(&back.core_p(*y, *w), p);
        }
        let mut broken = records.clone();
        broken.pop();
        assert!(KLTable::from_polynomials(t.ball().clone(), broken).is_err());
    }

    #[test]
    fn truncation_preserves_data() {
        let t = table(TypeLabel::A2Affine, 7, false);
        let small = table(TypeLabel::A2Affine, 5, false);
        let cut = t.truncate(5);
        let a: Vec<_> = cut.core_polynomials().map(|(y, w, p)| (y, w, p.clone())).collect();
        let b: Vec<_> = small.core_polynomials().map(|(y, w, p)| (y, w, p.clone())).collect();
        assert_eq!(a, b);
        assert_eq!(cut.core_h_row(3, 4).unwrap(), small.core_h_row(3, 4).unwrap());
    }
}
