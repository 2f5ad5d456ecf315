//! Finite and (extended) affine Weyl groups.
//!
//! An element of the Coxeter part is stored as the integer matrix of its action on the root
//! lattice (in the basis of simple roots), together with the matrix of its inverse. Column `i`
//! of the matrix is `w(alpha_i)`, so right descents are read off column signs and left descents
//! off the inverse. Multiplying by a simple reflection touches a single row or column.
//!
//! Generator numbering: affine types use `0..=r` with `0` the affine node; finite types use
//! `1..=r`. Internally generators are dense indices `0..rank`, and [`CoxeterDatum::gen_label`]
//! maps an index to its printed label.
//!
//! Extended groups carry a finite group `Omega` of length-zero elements acting on the affine
//! diagram by automorphisms. `GroupElt { omega, core }` denotes the product `omega * core`.

mod ball;

pub use ball::{Ball, DEFAULT_BALL_CAP};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 4;
type Mat = [i32; MAX_RANK * MAX_RANK];

#[inline]
fn at(i: usize, j: usize) -> usize {
    i * MAX_RANK + j
}

/// Which side a generator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Supported Cartan types. The printed labels are exact: `"A1~"`, `"A2~"`, `"C2~"`, `"G2~"`,
/// `"A2"`, `"A3"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeLabel {
    A1Affine,
    A2Affine,
    C2Affine,
    G2Affine,
    A2,
    A3,
}

impl TypeLabel {
    pub const ALL: [TypeLabel; 6] = [
        TypeLabel::A1Affine,
        TypeLabel::A2Affine,
        TypeLabel::C2Affine,
        TypeLabel::G2Affine,
        TypeLabel::A2,
        TypeLabel::A3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TypeLabel::A1Affine => "A1~",
            TypeLabel::A2Affine => "A2~",
            TypeLabel::C2Affine => "C2~",
            TypeLabel::G2Affine => "G2~",
            TypeLabel::A2 => "A2",
            TypeLabel::A3 => "A3",
        }
    }

    pub fn is_affine(self) -> bool {
        matches!(self, TypeLabel::A1Affine | TypeLabel::A2Affine | TypeLabel::C2Affine | TypeLabel::G2Affine)
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TypeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TypeLabel::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnsupportedType(s.to_string()))
    }
}

/// A Cartan datum together with the optional group of diagram automorphisms.
#[derive(Clone, Debug)]
pub struct CoxeterDatum {
    label: TypeLabel,
    rank: usize,
    cartan: Vec<i32>,
    gen_labels: Vec<u32>,
    extended: bool,
    omega_perms: Vec<Vec<usize>>,
    omega_mul: Vec<Vec<u8>>,
    omega_inv: Vec<u8>,
    n_positive_roots: usize,
    checksum: String,
    fingerprint: u32,
}

/// An element `omega * core` of a (possibly extended) Weyl group.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElt {
    tag: u32,
    omega: u8,
    mat: Mat,
    inv: Mat,
}

impl GroupElt {
    /// Index of the length-zero component (0 is the identity).
    pub fn omega(&self) -> usize {
        self.omega as usize
    }

    /// The Coxeter-group component.
    pub fn core(&self) -> GroupElt {
        GroupElt { omega: 0, ..*self }
    }

    fn with_omega(&self, omega: usize) -> GroupElt {
        GroupElt { omega: omega as u8, ..*self }
    }

    /// `w(alpha_j)` expressed in simple roots.
    pub fn root_image(&self, j: usize, rank: usize) -> Vec<i32> {
        (0..rank).map(|i| self.mat[at(i, j)]).collect()
    }
}

impl fmt::Debug for GroupElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElt(omega={}, ", self.omega)?;
        f.debug_list().entries(self.mat.chunks(MAX_RANK)).finish()?;
        write!(f, ")")
    }
}

fn negative_column(m: &Mat, rank: usize, j: usize) -> bool {
    for i in 0..rank {
        let x = m[at(i, j)];
        if x != 0 {
            return x < 0;
        }
    }
    unreachable!("a root has a nonzero coefficient")
}

impl CoxeterDatum {
    pub fn new(label: TypeLabel, extended: bool) -> Self {
        let (cartan, rows): (Vec<i32>, usize) = match label {
            TypeLabel::A1Affine => (vec![2, -2, -2, 2], 2),
            TypeLabel::A2Affine => (vec![2, -1, -1, -1, 2, -1, -1, -1, 2], 3),
            TypeLabel::C2Affine => (vec![2, -1, 0, -2, 2, -2, 0, -1, 2], 3),
            TypeLabel::G2Affine => (vec![2, -1, 0, -1, 2, -1, 0, -3, 2], 3),
            TypeLabel::A2 => (vec![2, -1, -1, 2], 2),
            TypeLabel::A3 => (vec![2, -1, 0, -1, 2, -1, 0, -1, 2], 3),
        };
        let gen_labels: Vec<u32> = if label.is_affine() {
            (0..rows as u32).collect()
        } else {
            (1..=rows as u32).collect()
        };
        let n_positive_roots = match label {
            TypeLabel::A1Affine => 1,
            TypeLabel::A2Affine | TypeLabel::A2 => 3,
            TypeLabel::C2Affine => 4,
            TypeLabel::G2Affine | TypeLabel::A3 => 6,
        };
        let identity: Vec<usize> = (0..rows).collect();
        let mut omega_perms = vec![identity];
        if extended {
            match label {
                TypeLabel::A1Affine => omega_perms.push(vec![1, 0]),
                TypeLabel::A2Affine => {
                    omega_perms.push(vec![1, 2, 0]);
                    omega_perms.push(vec![2, 0, 1]);
                }
                TypeLabel::C2Affine => omega_perms.push(vec![2, 1, 0]),
                _ => {}
            }
        }
        let n_omega = omega_perms.len();
        let find = |p: &Vec<usize>| omega_perms.iter().position(|q| q == p).expect("Omega is closed") as u8;
        let omega_mul: Vec<Vec<u8>> = (0..n_omega)
            .map(|a| {
                (0..n_omega)
                    .map(|b| {
                        let comp: Vec<usize> = (0..rows).map(|i| omega_perms[a][omega_perms[b][i]]).collect();
                        find(&comp)
                    })
                    .collect()
            })
            .collect();
        let omega_inv: Vec<u8> = (0..n_omega)
            .map(|a| (0..n_omega).find(|&b| omega_mul[a][b] == 0).unwrap() as u8)
            .collect();

        let mut hasher = Sha256::new();
        hasher.update(label.as_str().as_bytes());
        hasher.update([extended as u8]);
        for c in &cartan {
            hasher.update(c.to_le_bytes());
        }
        for l in &gen_labels {
            hasher.update(l.to_le_bytes());
        }
        let digest = hasher.finalize();
        let checksum: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        let fingerprint = u32::from_le_bytes([digest[0], digest[1], digest[2], digest[3]]);

        let datum = CoxeterDatum {
            label,
            rank: rows,
            cartan,
            gen_labels,
            extended,
            omega_perms,
            omega_mul,
            omega_inv,
            n_positive_roots,
            checksum,
            fingerprint,
        };
        debug_assert!(datum.omega_perms.iter().all(|p| datum.is_diagram_automorphism(p)));
        datum
    }

    pub fn parse(label: &str, extended: bool) -> Result<Self> {
        Ok(Self::new(label.parse()?, extended))
    }

    fn is_diagram_automorphism(&self, p: &[usize]) -> bool {
        (0..self.rank).all(|i| (0..self.rank).all(|j| self.a(p[i], p[j]) == self.a(i, j)))
    }

    pub fn label(&self) -> TypeLabel {
        self.label
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn is_affine(&self) -> bool {
        self.label.is_affine()
    }

    /// Number of simple generators.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cartan entry `<alpha_i^vee, alpha_j>`.
    pub fn a(&self, i: usize, j: usize) -> i32 {
        self.cartan[i * self.rank + j]
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i32>> {
        (0..self.rank).map(|i| (0..self.rank).map(|j| self.a(i, j)).collect()).collect()
    }

    /// Coxeter matrix entry `m(s_i, s_j)`; `None` stands for infinity.
    pub fn coxeter_m(&self, i: usize, j: usize) -> Option<u32> {
        if i == j {
            return Some(1);
        }
        match self.a(i, j) * self.a(j, i) {
            0 => Some(2),
            1 => Some(3),
            2 => Some(4),
            3 => Some(6),
            _ => None,
        }
    }

    /// Number of positive roots of the finite Weyl group (`l(w_0)`), the universal bound on
    /// the a-function.
    pub fn n_positive_roots(&self) -> usize {
        self.n_positive_roots
    }

    pub fn gen_label(&self, s: usize) -> u32 {
        self.gen_labels[s]
    }

    pub fn gen_index(&self, label: u32) -> Result<usize> {
        self.gen_labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::BadGenerator(label as usize))
    }

    /// Hex checksum of the type, flag and generator numbering.
    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    pub fn omega_order(&self) -> usize {
        self.omega_perms.len()
    }

    /// The generator permutation induced by conjugation with `omega_k`.
    pub fn omega_permutation(&self, k: usize) -> &[usize] {
        &self.omega_perms[k]
    }

    pub fn omega_mul(&self, a: usize, b: usize) -> usize {
        self.omega_mul[a][b] as usize
    }

    pub fn omega_inverse(&self, a: usize) -> usize {
        self.omega_inv[a] as usize
    }

    pub fn check(&self, w: &GroupElt) -> Result<()> {
        if w.tag == self.fingerprint && w.omega() < self.omega_order() {
            Ok(())
        } else {
            Err(Error::DatumMismatch)
        }
    }

    fn check_gen(&self, s: usize) -> Result<()> {
        if s < self.rank {
            Ok(())
        } else {
            Err(Error::BadGenerator(s))
        }
    }

    pub fn identity(&self) -> GroupElt {
        let mut m = [0; MAX_RANK * MAX_RANK];
        for i in 0..self.rank {
            m[at(i, i)] = 1;
        }
        GroupElt { tag: self.fingerprint, omega: 0, mat: m, inv: m }
    }

    pub fn generator(&self, s: usize) -> Result<GroupElt> {
        self.check_gen(s)?;
        Ok(self.lmul_gen(s, &self.identity()))
    }

    /// The length-zero element `omega_k`.
    pub fn omega_element(&self, k: usize) -> Result<GroupElt> {
        if k >= self.omega_order() {
            return Err(Error::BadGenerator(k));
        }
        Ok(self.identity().with_omega(k))
    }

    fn core_lmul(&self, s: usize, m: &mut Mat, inv: &mut Mat) {
        let n = self.rank;
        let mut row = [0i32; MAX_RANK];
        for (c, r) in row.iter_mut().enumerate().take(n) {
            let mut acc = m[at(s, c)];
            for j in 0..n {
                acc -= self.a(s, j) * m[at(j, c)];
            }
            *r = acc;
        }
        for (c, r) in row.iter().enumerate().take(n) {
            m[at(s, c)] = *r;
        }
        let mut col = [0i32; MAX_RANK];
        for (r, c) in col.iter_mut().enumerate().take(n) {
            *c = inv[at(r, s)];
        }
        for j in 0..n {
            let aij = self.a(s, j);
            if aij != 0 {
                for r in 0..n {
                    inv[at(r, j)] -= aij * col[r];
                }
            }
        }
    }

    /// `s * w`.
    pub fn lmul_gen(&self, s: usize, w: &GroupElt) -> GroupElt {
        let s = self.omega_perms[self.omega_inverse(w.omega())][s];
        let mut out = *w;
        self.core_lmul(s, &mut out.mat, &mut out.inv);
        out
    }

    /// `w * s`.
    pub fn rmul_gen(&self, w: &GroupElt, s: usize) -> GroupElt {
        let mut out = *w;
        // (w s)^-1 = s w^-1
        self.core_lmul(s, &mut out.inv, &mut out.mat);
        out
    }

    fn matmul(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.rank;
        let mut out = [0; MAX_RANK * MAX_RANK];
        for i in 0..n {
            for k in 0..n {
                let x = a[at(i, k)];
                if x != 0 {
                    for j in 0..n {
                        out[at(i, j)] += x * b[at(k, j)];
                    }
                }
            }
        }
        out
    }

    /// `omega_k * core(w) * omega_k^-1`, the diagram automorphism applied to the Coxeter part.
    pub fn conjugate_core(&self, k: usize, w: &GroupElt) -> GroupElt {
        if k == 0 {
            return w.core();
        }
        let p = &self.omega_perms[k];
        let n = self.rank;
        let mut mat = [0; MAX_RANK * MAX_RANK];
        let mut inv = [0; MAX_RANK * MAX_RANK];
        for i in 0..n {
            for j in 0..n {
                mat[at(p[i], p[j])] = w.mat[at(i, j)];
                inv[at(p[i], p[j])] = w.inv[at(i, j)];
            }
        }
        GroupElt { tag: w.tag, omega: 0, mat, inv }
    }

    pub(crate) fn mul_unchecked(&self, a: &GroupElt, b: &GroupElt) -> GroupElt {
        let twisted = self.conjugate_core(self.omega_inverse(b.omega()), a);
        GroupElt {
            tag: a.tag,
            omega: self.omega_mul(a.omega(), b.omega()) as u8,
            mat: self.matmul(&twisted.mat, &b.mat),
            inv: self.matmul(&b.inv, &twisted.inv),
        }
    }

    /// Group product `a * b`.
    pub fn multiply(&self, a: &GroupElt, b: &GroupElt) -> Result<GroupElt> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn inverse(&self, w: &GroupElt) -> GroupElt {
        let k = w.omega();
        let core_inv = GroupElt { tag: w.tag, omega: 0, mat: w.inv, inv: w.mat };
        self.conjugate_core(k, &core_inv).with_omega(self.omega_inverse(k))
    }

    pub fn is_identity(&self, w: &GroupElt) -> bool {
        *w == self.identity()
    }

    /// `l(w s) < l(w)`.
    pub fn is_right_descent(&self, w: &GroupElt, s: usize) -> bool {
        negative_column(&w.mat, self.rank, s)
    }

    /// `l(s w) < l(w)`.
    pub fn is_left_descent(&self, s: usize, w: &GroupElt) -> bool {
        let s = self.omega_perms[self.omega_inverse(w.omega())][s];
        negative_column(&w.inv, self.rank, s)
    }

    pub fn descents(&self, w: &GroupElt, side: Side) -> Vec<usize> {
        (0..self.rank)
            .filter(|&s| match side {
                Side::Left => self.is_left_descent(s, w),
                Side::Right => self.is_right_descent(w, s),
            })
            .collect()
    }

    pub fn first_left_descent(&self, w: &GroupElt) -> Option<usize> {
        (0..self.rank).find(|&s| self.is_left_descent(s, w))
    }

    pub fn length(&self, w: &GroupElt) -> usize {
        let mut cur = w.core();
        let mut len = 0;
        while let Some(s) = (0..self.rank).find(|&s| self.is_right_descent(&cur, s)) {
            cur = self.rmul_gen(&cur, s);
            len += 1;
        }
        len
    }

    /// The ShortLex (lexicographically least) reduced word of the Coxeter part, in generator
    /// indices.
    pub fn reduced_word(&self, w: &GroupElt) -> Vec<usize> {
        let mut cur = w.core();
        let mut word = Vec::new();
        while let Some(s) = self.first_left_descent(&cur) {
            word.push(s);
            cur = self.lmul_gen(s, &cur);
        }
        word
    }

    /// Product of the generators in `word` (need not be reduced).
    pub fn from_word(&self, word: &[usize]) -> Result<GroupElt> {
        let mut w = self.identity();
        for &s in word {
            self.check_gen(s)?;
            w = self.rmul_gen(&w, s);
        }
        Ok(w)
    }

    /// Bruhat order. Elements with different length-zero components are incomparable.
    pub fn bruhat_leq(&self, y: &GroupElt, w: &GroupElt) -> Result<bool> {
        self.check(y)?;
        self.check(w)?;
        if y.omega() != w.omega() {
            return Ok(false);
        }
        let (mut y, mut w) = (y.core(), w.core());
        let (mut ly, mut lw) = (self.length(&y), self.length(&w));
        loop {
            if ly > lw {
                return Ok(false);
            }
            let Some(s) = self.first_left_descent(&w) else {
                return Ok(ly == 0);
            };
            w = self.lmul_gen(s, &w);
            lw -= 1;
            if self.is_left_descent(s, &y) {
                y = self.lmul_gen(s, &y);
                ly -= 1;
            }
        }
    }

    /// Formats an index word as comma-separated generator labels.
    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter().map(|&s| self.gen_label(s).to_string()).collect::<Vec<_>>().join(",")
    }

    /// Parses comma-separated generator labels (`""` or `"e"` is the empty word).
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Vec::new());
        }
        text.split(',')
            .map(|t| {
                let label: u32 = t.trim().parse().map_err(|_| Error::Format(format!("bad generator `{t}`")))?;
                self.gen_index(label)
            })
            .collect()
    }

    /// Positive roots of the finite root system, used as test oracles.
    pub fn finite_positive_roots(&self) -> Vec<Vec<i32>> {
        let gens: Vec<usize> = if self.is_affine() { (1..self.rank).collect() } else { (0..self.rank).collect() };
        self.real_roots_bounded(&gens, usize::MAX)
    }

    /// Positive real roots of height at most `max_height` in the root system generated by
    /// `gens`.
    pub fn real_roots_bounded(&self, gens: &[usize], max_height: usize) -> Vec<Vec<i32>> {
        use std::collections::BTreeSet;
        let n = self.rank;
        let mut seen: BTreeSet<Vec<i32>> = BTreeSet::new();
        let mut frontier: Vec<Vec<i32>> = gens
            .iter()
            .map(|&i| {
                let mut r = vec![0; n];
                r[i] = 1;
                r
            })
            .collect();
        while let Some(r) = frontier.pop() {
            if !seen.insert(r.clone()) {
                continue;
            }
            for &i in gens {
                let pairing: i32 = (0..n).map(|j| self.a(i, j) * r[j]).sum();
                let mut t = r.clone();
                t[i] -= pairing;
                let height: i32 = t.iter().sum();
                if t.iter().all(|&x| x >= 0) && height > 0 && (height as usize) <= max_height && !seen.contains(&t) {
                    frontier.push(t);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Applies `w` to a vector in the simple-root basis.
    pub fn act(&self, w: &GroupElt, x: &[i32]) -> Vec<i32> {
        (0..self.rank).map(|i| (0..self.rank).map(|j| w.mat[at(i, j)] * x[j]).sum()).collect()
    }
}
