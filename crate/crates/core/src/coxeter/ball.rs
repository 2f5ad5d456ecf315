use std::collections::HashMap;
use std::ops::Range;

use fixedbitset::FixedBitSet;

use super::{CoxeterDatum, GroupElt};
use crate::error::{Error, Result};

/// Default cap on the number of Coxeter elements in a ball.
pub const DEFAULT_BALL_CAP: usize = 250_000;

/// All elements of length at most `radius`, densely numbered.
///
/// Coxeter elements ("cores") are ordered by length and then by ShortLex reduced word. In an
/// extended group the element `omega_k * w` has id `core_id(w) * |Omega| + k`, so ids still
/// increase with length. Every ball of smaller radius is a prefix of a larger one.
#[derive(Clone, Debug)]
pub struct Ball {
    datum: CoxeterDatum,
    radius: usize,
    cores: Vec<GroupElt>,
    lengths: Vec<u32>,
    words: Vec<Vec<usize>>,
    index: HashMap<GroupElt, u32>,
    lmul: Vec<Vec<Option<u32>>>,
    rmul: Vec<Vec<Option<u32>>>,
    inverse: Vec<u32>,
    conj: Vec<Vec<u32>>,
    level_starts: Vec<usize>,
    lower: Vec<FixedBitSet>,
    lower_lists: Vec<Vec<u32>>,
}

impl Ball {
    pub fn enumerate(datum: &CoxeterDatum, radius: usize) -> Result<Ball> {
        Self::enumerate_with_cap(datum, radius, DEFAULT_BALL_CAP)
    }

    pub fn enumerate_with_cap(datum: &CoxeterDatum, radius: usize, cap: usize) -> Result<Ball> {
        let rank = datum.rank();
        let e = datum.identity();
        let mut cores = vec![e];
        let mut level_starts = vec![0usize];
        let mut index: HashMap<GroupElt, u32> = HashMap::new();
        index.insert(e, 0);
        let mut prev: Range<usize> = 0..1;
        for _ in 1..=radius {
            let mut level: Vec<(Vec<usize>, GroupElt)> = Vec::new();
            let mut seen: HashMap<GroupElt, ()> = HashMap::new();
            for i in prev.clone() {
                let w = cores[i];
                for s in 0..rank {
                    if !datum.is_right_descent(&w, s) {
                        let ws = datum.rmul_gen(&w, s);
                        if seen.insert(ws, ()).is_none() {
                            level.push((datum.reduced_word(&ws), ws));
                        }
                    }
                }
            }
            if cores.len() + level.len() > cap {
                return Err(Error::BallTooLarge { radius, cap });
            }
            level.sort_by(|a, b| a.0.cmp(&b.0));
            let start = cores.len();
            for (_, w) in level {
                index.insert(w, cores.len() as u32);
                cores.push(w);
            }
            level_starts.push(start);
            prev = start..cores.len();
        }
        level_starts.push(cores.len());

        let n = cores.len();
        let mut lengths = vec![0u32; n];
        for l in 0..=radius {
            for x in &mut lengths[level_starts[l]..level_starts[l + 1]] {
                *x = l as u32;
            }
        }
        let words: Vec<Vec<usize>> = cores.iter().map(|w| datum.reduced_word(w)).collect();
        let lookup = |w: &GroupElt| index.get(w).copied();
        let lmul: Vec<Vec<Option<u32>>> =
            cores.iter().map(|w| (0..rank).map(|s| lookup(&datum.lmul_gen(s, w))).collect()).collect();
        let rmul: Vec<Vec<Option<u32>>> =
            cores.iter().map(|w| (0..rank).map(|s| lookup(&datum.rmul_gen(w, s))).collect()).collect();
        let inverse: Vec<u32> = cores.iter().map(|w| lookup(&datum.inverse(w)).expect("closed under inverse")).collect();
        let conj: Vec<Vec<u32>> = (0..datum.omega_order())
            .map(|k| cores.iter().map(|w| lookup(&datum.conjugate_core(k, w)).expect("closed under Omega")).collect())
            .collect();

        // [e, w] = [e, sw] union s[e, sw] for a left descent s of w.
        let mut lower: Vec<FixedBitSet> = Vec::with_capacity(n);
        for w in 0..n {
            let mut set = FixedBitSet::with_capacity(n);
            if w == 0 {
                set.insert(0);
            } else {
                let s = words[w][0];
                let sw = lmul[w][s].expect("descent stays in ball") as usize;
                set.union_with(&lower[sw]);
                for y in lower[sw].ones() {
                    if let Some(sy) = lmul[y][s] {
                        set.insert(sy as usize);
                    }
                }
            }
            lower.push(set);
        }
        let lower_lists = lower.iter().map(|b| b.ones().map(|x| x as u32).collect()).collect();

        Ok(Ball {
            datum: datum.clone(),
            radius,
            cores,
            lengths,
            words,
            index,
            lmul,
            rmul,
            inverse,
            conj,
            level_starts,
            lower,
            lower_lists,
        })
    }

    /// The sub-ball of a smaller radius; ids are preserved.
    pub fn truncate(&self, radius: usize) -> Ball {
        if radius >= self.radius {
            return self.clone();
        }
        let n = self.level_starts[radius + 1];
        let cut = |v: &Vec<Option<u32>>| v.iter().map(|x| x.filter(|&i| (i as usize) < n)).collect();
        let mut level_starts = self.level_starts[..=radius].to_vec();
        level_starts.push(n);
        Ball {
            datum: self.datum.clone(),
            radius,
            cores: self.cores[..n].to_vec(),
            lengths: self.lengths[..n].to_vec(),
            words: self.words[..n].to_vec(),
            index: self.index.iter().filter(|(_, &i)| (i as usize) < n).map(|(k, v)| (*k, *v)).collect(),
            lmul: self.lmul[..n].iter().map(cut).collect(),
            rmul: self.rmul[..n].iter().map(cut).collect(),
            inverse: self.inverse[..n].to_vec(),
            conj: self.conj.iter().map(|c| c[..n].to_vec()).collect(),
            level_starts,
            lower: self
                .lower[..n]
                .iter()
                .map(|b| {
                    let mut c = FixedBitSet::with_capacity(n);
                    c.extend(b.ones().filter(|&i| i < n));
                    c
                })
                .collect(),
            lower_lists: self.lower_lists[..n].to_vec(),
        }
    }

    pub fn datum(&self) -> &CoxeterDatum {
        &self.datum
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn n_omega(&self) -> usize {
        self.datum.omega_order()
    }

    /// Number of elements, counting the length-zero decorations.
    pub fn len(&self) -> usize {
        self.cores.len() * self.n_omega()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn core_count(&self) -> usize {
        self.cores.len()
    }

    pub fn split(&self, id: usize) -> (usize, usize) {
        (id / self.n_omega(), id % self.n_omega())
    }

    pub fn join(&self, core: usize, omega: usize) -> usize {
        core * self.n_omega() + omega
    }

    pub fn element(&self, id: usize) -> GroupElt {
        let (c, k) = self.split(id);
        self.cores[c].with_omega(k)
    }

    pub fn core(&self, core: usize) -> &GroupElt {
        &self.cores[core]
    }

    pub fn id_of(&self, w: &GroupElt) -> Option<usize> {
        self.datum.check(w).ok()?;
        let c = *self.index.get(&w.core())? as usize;
        Some(self.join(c, w.omega()))
    }

    pub fn core_id_of(&self, w: &GroupElt) -> Option<usize> {
        self.datum.check(w).ok()?;
        if w.omega() != 0 {
            return None;
        }
        self.index.get(w).map(|&i| i as usize)
    }

    pub fn length(&self, id: usize) -> usize {
        self.lengths[self.split(id).0] as usize
    }

    pub fn core_length(&self, core: usize) -> usize {
        self.lengths[core] as usize
    }

    /// ShortLex reduced word of the Coxeter part of `id`.
    pub fn word(&self, id: usize) -> &[usize] {
        &self.words[self.split(id).0]
    }

    pub fn core_word(&self, core: usize) -> &[usize] {
        &self.words[core]
    }

    /// Printable form: the ShortLex word in generator labels, with an Omega tag when nontrivial.
    pub fn display(&self, id: usize) -> String {
        let (c, k) = self.split(id);
        let w = if self.words[c].is_empty() { "e".to_string() } else { self.datum.format_word(&self.words[c]) };
        if k == 0 {
            w
        } else {
            format!("w{k}*{w}")
        }
    }

    /// Core ids of length exactly `l` (empty beyond the radius).
    pub fn core_level(&self, l: usize) -> Range<usize> {
        if l > self.radius {
            let n = self.cores.len();
            return n..n;
        }
        self.level_starts[l]..self.level_starts[l + 1]
    }

    /// Number of core ids with length at most `l`.
    pub fn cores_up_to(&self, l: usize) -> usize {
        self.level_starts[(l + 1).min(self.radius + 1)]
    }

    pub fn core_lmul(&self, core: usize, s: usize) -> Option<usize> {
        self.lmul[core][s].map(|x| x as usize)
    }

    pub fn core_rmul(&self, core: usize, s: usize) -> Option<usize> {
        self.rmul[core][s].map(|x| x as usize)
    }

    pub fn core_is_left_descent(&self, s: usize, core: usize) -> bool {
        self.datum.is_left_descent(s, &self.cores[core])
    }

    pub fn core_is_right_descent(&self, core: usize, s: usize) -> bool {
        self.datum.is_right_descent(&self.cores[core], s)
    }

    /// `s * id`, if it lies in the ball.
    pub fn lmul(&self, s: usize, id: usize) -> Option<usize> {
        let (c, k) = self.split(id);
        let s = self.datum.omega_permutation(self.datum.omega_inverse(k))[s];
        self.core_lmul(c, s).map(|c2| self.join(c2, k))
    }

    /// `id * s`, if it lies in the ball.
    pub fn rmul(&self, id: usize, s: usize) -> Option<usize> {
        let (c, k) = self.split(id);
        self.core_rmul(c, s).map(|c2| self.join(c2, k))
    }

    /// `omega_k * id`.
    pub fn omega_lmul(&self, k: usize, id: usize) -> usize {
        let (c, j) = self.split(id);
        self.join(c, self.datum.omega_mul(k, j))
    }

    /// `id * omega_k`.
    pub fn omega_rmul(&self, id: usize, k: usize) -> usize {
        let (c, j) = self.split(id);
        let c2 = self.conj[self.datum.omega_inverse(k)][c] as usize;
        self.join(c2, self.datum.omega_mul(j, k))
    }

    pub fn inverse(&self, id: usize) -> usize {
        let (c, k) = self.split(id);
        let ci = self.inverse[c] as usize;
        self.join(self.conj[k][ci] as usize, self.datum.omega_inverse(k))
    }

    pub fn core_inverse(&self, core: usize) -> usize {
        self.inverse[core] as usize
    }

    /// The diagram automorphism `omega_k` applied to a Coxeter element.
    pub fn core_conj(&self, k: usize, core: usize) -> usize {
        self.conj[k][core] as usize
    }

    /// Sorted core ids `y <= w` in Bruhat order.
    pub fn core_lower(&self, core: usize) -> &[u32] {
        &self.lower_lists[core]
    }

    pub fn core_leq(&self, y: usize, w: usize) -> bool {
        self.lower[w].contains(y)
    }

    pub fn leq(&self, y: usize, w: usize) -> bool {
        let (cy, ky) = self.split(y);
        let (cw, kw) = self.split(w);
        ky == kw && self.core_leq(cy, cw)
    }
}
