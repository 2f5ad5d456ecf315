//! The based ring `J_c` of a two-sided cell and the homomorphism `phi_c : H -> J_c (x) A`.
//!
//! Structure constants are `gamma(x, y, z)`, the coefficient of `v^{a(c)}` in `h_{x,y,z}`.
//! Every operation needs the relevant `h` rows inside the ball and fails with
//! [`Error::BallExceeded`] otherwise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cells::{distinguished_involutions, AFunctionTable, CellPartition};
use crate::error::{Error, Result};
use crate::hecke::{Basis, HeckeElt, KLTable};
use crate::laurent::LaurentPoly;

/// Element of `J_c (x) A`: ball id of a cell member -> coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JElt {
    pub cell: usize,
    terms: BTreeMap<usize, LaurentPoly>,
}

impl JElt {
    pub fn zero(cell: usize) -> Self {
        JElt { cell, terms: BTreeMap::new() }
    }

    pub fn basis(cell: usize, x: usize) -> Self {
        let mut j = Self::zero(cell);
        j.add_term(x, &LaurentPoly::one());
        j
    }

    pub fn add_term(&mut self, x: usize, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(x).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &LaurentPoly)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, x: usize) -> LaurentPoly {
        self.terms.get(&x).cloned().unwrap_or_default()
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

    /// Whether all coefficients are integer constants (a pure element of `J_c`).
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.terms().iter().all(|(e, _)| *e == 0))
    }
}

/// One two-sided cell with certified a-value and its distinguished involutions.
pub struct CellRing<'a> {
    table: &'a KLTable,
    partition: &'a CellPartition,
    cell: usize,
    a: u32,
    involutions: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaEntry {
    pub x: String,
    pub y: String,
    pub z: String,
    pub gamma: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiFailure {
    pub x: String,
    pub y: String,
    pub reason: String,
}

/// Outcome of a multiplicativity check of `phi_c`.
#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub cell: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub eligible_pairs: usize,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<PhiFailure>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Pass/fail counts for the ring-level checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(mut self, other: CheckReport) -> CheckReport {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
        self
    }
}

impl<'a> CellRing<'a> {
    pub fn new(table: &'a KLTable, partition: &'a CellPartition, afn: &AFunctionTable, cell: usize) -> Result<Self> {
        let a = afn.require_certified(cell)?;
        let involutions = distinguished_involutions(table, partition, afn, cell)?;
        Ok(CellRing { table, partition, cell, a, involutions })
    }

    pub fn cell(&self) -> usize {
        self.cell
    }

    pub fn a_value(&self) -> u32 {
        self.a
    }

    /// Distinguished involutions of the cell (ball ids).
    pub fn involutions(&self) -> &[usize] {
        &self.involutions
    }

    pub fn members(&self) -> &[usize] {
        self.partition.two_sided.members(self.cell)
    }

    fn in_cell(&self, z: usize) -> bool {
        self.partition.cell_of(z) == self.cell
    }

    fn max_involution_length(&self) -> usize {
        self.involutions.iter().map(|&d| self.table.ball().length(d)).max().unwrap_or(0)
    }

    fn display(&self, id: usize) -> String {
        self.table.ball().display(id)
    }

    fn require_member(&self, x: usize) -> Result<()> {
        if self.in_cell(x) {
            Ok(())
        } else {
            Err(Error::MixedCells(format!("{} is not in cell {}", self.display(x), self.cell)))
        }
    }

    /// Nonzero `gamma(x, y, z)` for `z` in the cell.
    pub fn gamma_row(&self, x: usize, y: usize) -> Result<Vec<(usize, BigInt)>> {
        self.require_member(x)?;
        self.require_member(y)?;
        let row = self.table.h_row(x, y)?;
        Ok(row
            .into_iter()
            .filter(|(z, _)| self.in_cell(*z))
            .filter_map(|(z, h)| {
                let g = h.coeff_at(self.a as i32);
                (!g.is_zero()).then_some((z, g))
            })
            .collect())
    }

    pub fn gamma(&self, x: usize, y: usize, z: usize) -> Result<BigInt> {
        self.require_member(z)?;
        Ok(self.gamma_row(x, y)?.into_iter().find(|(w, _)| *w == z).map(|t| t.1).unwrap_or_default())
    }

    /// All nonzero structure constants over pairs whose products fit in the ball.
    pub fn gamma_table(&self) -> Vec<GammaEntry> {
        let m = self.members();
        let mut out = Vec::new();
        for &x in m {
            for &y in m {
                if let Ok(row) = self.gamma_row(x, y) {
                    for (z, g) in row {
                        out.push(GammaEntry {
                            x: self.display(x),
                            y: self.display(y),
                            z: self.display(z),
                            gamma: g.to_string(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, p: &JElt, q: &JElt) -> Result<JElt> {
        if p.cell != self.cell || q.cell != self.cell {
            return Err(Error::MixedCells(format!("product of elements of cells {} and {}", p.cell, q.cell)));
        }
        let mut out = JElt::zero(self.cell);
        for (x, cx) in p.terms() {
            for (y, cy) in q.terms() {
                let c = cx * cy;
                for (z, g) in self.gamma_row(x, y)? {
                    out.add_term(z, &c.scale(&g));
                }
            }
        }
        Ok(out)
    }

    /// `sum_{d in D_c} t_d`.
    pub fn unit(&self) -> JElt {
        let mut u = JElt::zero(self.cell);
        for &d in &self.involutions {
            u.add_term(d, &LaurentPoly::one());
        }
        u
    }

    /// `phi_c(C_w) = sum_{d, u} h_{w,d,u} t_u` with `u` in the cell, together with the terms
    /// `u` outside the cell having `h_{w,d,u} != 0` and the same a-value.
    fn phi_basis(&self, w: usize, afn: Option<&AFunctionTable>) -> Result<(JElt, Vec<usize>)> {
        let mut out = JElt::zero(self.cell);
        let mut stray = Vec::new();
        for &d in &self.involutions {
            for (u, h) in self.table.h_row(w, d)? {
                if self.in_cell(u) {
                    out.add_term(u, &h);
                } else if let Some(afn) = afn {
                    let cu = afn.cell(self.partition.cell_of(u));
                    if cu.certified && cu.value == self.a {
                        stray.push(u);
                    }
                }
            }
        }
        Ok((out, stray))
    }

    /// Image of a C-basis element under `phi_c`.
    pub fn phi(&self, h: &HeckeElt) -> Result<JElt> {
        h.require(Basis::C)?;
        let mut out = JElt::zero(self.cell);
        for (w, c) in h.terms() {
            let id = self.table.ball().id_of(w).ok_or(Error::NotInBall)?;
            let (img, _) = self.phi_basis(id, None)?;
            for (u, k) in img.terms() {
                out.add_term(u, &(c * k));
            }
        }
        Ok(out)
    }

    /// `phi_c(C_w)` on a ball id, failing loudly on a nonzero term outside the cell with the
    /// cell's a-value.
    pub fn phi_of(&self, w: usize, afn: &AFunctionTable) -> Result<JElt> {
        let (img, stray) = self.phi_basis(w, Some(afn))?;
        if let Some(&u) = stray.first() {
            return Err(Error::MixedCells(format!(
                "h_{{{}, d, {}}} != 0 with equal a-value outside the cell",
                self.display(w),
                self.display(u)
            )));
        }
        Ok(img)
    }

    fn check_pair(&self, x: usize, y: usize, afn: &AFunctionTable) -> std::result::Result<Option<String>, Error> {
        let px = self.phi_of(x, afn)?;
        let py = self.phi_of(y, afn)?;
        let rhs = self.mul(&px, &py)?;
        let mut lhs = JElt::zero(self.cell);
        for (z, h) in self.table.h_row(x, y)? {
            for (u, k) in self.phi_of(z, afn)?.terms() {
                lhs.add_term(u, &(&h * k));
            }
        }
        Ok((lhs != rhs).then(|| {
            let diff: Vec<String> = lhs
                .terms()
                .chain(rhs.terms())
                .map(|(u, _)| u)
                .filter(|&u| lhs.coeff(u) != rhs.coeff(u))
                .take(3)
                .map(|u| format!("t_{}: {} vs {}", self.display(u), lhs.coeff(u), rhs.coeff(u)))
                .collect();
            diff.join("; ")
        }))
    }

    /// Pairs `(x, y)` for which every step of the check is guaranteed to fit in the ball.
    pub fn eligible_pairs(&self) -> Vec<(usize, usize)> {
        let ball = self.table.ball();
        let budget = self.table.radius().checked_sub(2 * self.max_involution_length());
        let mut out = Vec::new();
        for x in 0..ball.len() {
            for y in 0..ball.len() {
                let ok = self.table.is_closed() || budget.is_some_and(|b| ball.length(x) + ball.length(y) <= b);
                if ok {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Checks `phi_c(C_x C_y) = phi_c(C_x) phi_c(C_y)` on the given pairs.
    pub fn verify_phi_pairs(&self, afn: &AFunctionTable, pairs: &[(usize, usize)]) -> PhiReport {
        let results: Vec<_> = pairs.par_iter().map(|&(x, y)| (x, y, self.check_pair(x, y, afn))).collect();
        let mut report =
            PhiReport { cell: self.cell, seed: None, eligible_pairs: pairs.len(), checked: 0, skipped: 0, failures: Vec::new() };
        for (x, y, r) in results {
            match r {
                Ok(None) => report.checked += 1,
                Ok(Some(reason)) => {
                    report.checked += 1;
                    report.failures.push(PhiFailure { x: self.display(x), y: self.display(y), reason });
                }
                Err(Error::BallExceeded { .. }) => report.skipped += 1,
                Err(e) => {
                    report.checked += 1;
                    report.failures.push(PhiFailure { x: self.display(x), y: self.display(y), reason: e.to_string() });
                }
            }
        }
        report
    }

    /// Multiplicativity on `samples` pairs drawn without replacement from the eligible pairs
    /// (all of them when there are fewer).
    pub fn verify_phi_homomorphism(&self, afn: &AFunctionTable, samples: usize, seed: u64) -> PhiReport {
        let pool = self.eligible_pairs();
        let chosen: Vec<(usize, usize)> = if samples >= pool.len() {
            pool.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = index::sample(&mut rng, pool.len(), samples).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| pool[i]).collect()
        };
        let mut report = self.verify_phi_pairs(afn, &chosen);
        report.eligible_pairs = pool.len();
        report.seed = Some(seed);
        report
    }

    /// `(sum t_d) t_x = t_x = t_x (sum t_d)` for every member whose products fit.
    pub fn verify_unit(&self) -> CheckReport {
        let unit = self.unit();
        self.members()
            .par_iter()
            .map(|&x| {
                let tx = JElt::basis(self.cell, x);
                let mut r = CheckReport::default();
                match (self.mul(&unit, &tx), self.mul(&tx, &unit)) {
                    (Ok(l), Ok(rr)) => {
                        r.checked += 1;
                        if l != tx || rr != tx {
                            r.failures.push(format!("unit fails at t_{}", self.display(x)));
                        }
                    }
                    (Err(Error::BallExceeded { .. }), _) | (_, Err(Error::BallExceeded { .. })) => r.skipped += 1,
                    (Err(e), _) | (_, Err(e)) => r.failures.push(e.to_string()),
                }
                r
            })
            .reduce(CheckReport::default, CheckReport::merge)
    }

    /// `(t_x t_y) t_z = t_x (t_y t_z)` on all member triples with `l(x) + l(y) + l(z)` within
    /// the radius (every triple when the ball is the whole group).
    pub fn verify_associativity(&self) -> CheckReport {
        let ball = self.table.ball();
        let r = self.table.radius();
        let m = self.members();
        let closed = self.table.is_closed();
        m.par_iter()
            .map(|&x| {
                let mut rep = CheckReport::default();
                let tx = JElt::basis(self.cell, x);
                for &y in m {
                    if !closed && ball.length(x) + ball.length(y) > r {
                        continue;
                    }
                    let ty = JElt::basis(self.cell, y);
                    let xy = match self.mul(&tx, &ty) {
                        Ok(v) => v,
                        Err(e) => {
                            rep.failures.push(e.to_string());
                            continue;
                        }
                    };
                    for &z in m {
                        if !closed && ball.length(x) + ball.length(y) + ball.length(z) > r {
                            continue;
                        }
                        let tz = JElt::basis(self.cell, z);
                        let lhs = self.mul(&xy, &tz);
                        let rhs = self.mul(&ty, &tz).and_then(|yz| self.mul(&tx, &yz));
                        match (lhs, rhs) {
                            (Ok(a), Ok(b)) => {
                                rep.checked += 1;
                                if a != b {
                                    rep.failures.push(format!(
                                        "({} {}) {} differs",
                                        self.display(x),
                                        self.display(y),
                                        self.display(z)
                                    ));
                                }
                            }
                            (Err(e), _) | (_, Err(e)) => rep.failures.push(e.to_string()),
                        }
                    }
                }
                rep
            })
            .reduce(CheckReport::default, CheckReport::merge)
    }

    /// Every computed structure constant is nonnegative.
    pub fn verify_gamma_positive(&self) -> CheckReport {
        let m = self.members();
        m.par_iter()
            .map(|&x| {
                let mut rep = CheckReport::default();
                for &y in m {
                    match self.gamma_row(x, y) {
                        Ok(row) => {
                            rep.checked += 1;
                            for (z, g) in row {
                                if g < BigInt::zero() {
                                    rep.failures.push(format!(
                                        "gamma({}, {}, {}) = {g}",
                                        self.display(x),
                                        self.display(y),
                                        self.display(z)
                                    ));
                                }
                            }
                        }
                        Err(Error::BallExceeded { .. }) => rep.skipped += 1,
                        Err(e) => rep.failures.push(e.to_string()),
                    }
                }
                rep
            })
            .reduce(CheckReport::default, CheckReport::merge)
    }

    /// `phi_c(C_w) = 0` for every `w` in a cell strictly below this one whose image fits.
    pub fn verify_kills_lower(&self, afn: &AFunctionTable) -> CheckReport {
        let below: Vec<usize> = (0..self.partition.n_elements())
            .filter(|&w| {
                let c = self.partition.cell_of(w);
                c != self.cell && self.partition.two_sided.leq(c, self.cell)
            })
            .collect();
        below
            .par_iter()
            .map(|&w| {
                let mut rep = CheckReport::default();
                match self.phi_of(w, afn) {
                    Ok(img) => {
                        rep.checked += 1;
                        if !img.is_zero() {
                            rep.failures.push(format!("phi(C_{}) != 0", self.display(w)));
                        }
                    }
                    Err(Error::BallExceeded { .. }) => rep.skipped += 1,
                    Err(e) => rep.failures.push(e.to_string()),
                }
                rep
            })
            .reduce(CheckReport::default, CheckReport::merge)
    }

    /// Whether every product of two members fits in the ball, so that the cell spans a
    /// finite-dimensional ring that is fully known.
    pub fn is_finite(&self) -> bool {
        let m = self.members();
        let ball = self.table.ball();
        let longest = m.iter().map(|&x| ball.length(x)).max().unwrap_or(0);
        let escapes = m.iter().any(|&x| self.partition.touches_boundary(x));
        self.table.is_closed() || (2 * longest <= self.table.radius() && !escapes)
    }

    /// Determinant of the trace form `Tr(L_x L_y)` of the regular representation of `J_c (x) Q`.
    /// Nonzero exactly when the ring is semisimple. Only defined for finite cells.
    pub fn trace_form_determinant(&self) -> Result<BigRational> {
        if !self.is_finite() {
            return Err(Error::BallExceeded {
                radius: self.table.radius(),
                what: format!("cell {} is not contained in a fully multiplied range", self.cell),
            });
        }
        let m = self.members();
        let n = m.len();
        let pos = |z: usize| m.binary_search(&z).expect("cell member");
        // left[x][z][w] = coefficient of t_z in t_x t_w
        let mut left = vec![vec![vec![BigRational::zero(); n]; n]; n];
        for (i, &x) in m.iter().enumerate() {
            for (j, &w) in m.iter().enumerate() {
                for (z, g) in self.gamma_row(x, w)? {
                    left[i][pos(z)][j] = BigRational::from_integer(g);
                }
            }
        }
        let mut form = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut tr = BigRational::zero();
                for a in 0..n {
                    for b in 0..n {
                        if !left[i][a][b].is_zero() && !left[j][b][a].is_zero() {
                            tr += &left[i][a][b] * &left[j][b][a];
                        }
                    }
                }
                form[i][j] = tr;
            }
        }
        Ok(determinant(form))
    }
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pivot;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}
