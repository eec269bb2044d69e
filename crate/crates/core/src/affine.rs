//! The affine Weyl group `W_aff = W_f ⋉ ZR∨` as a Coxeter group.
//!
//! Elements are kept in the normal form `w · t_λ` with the finite part `w`
//! stored as its matrix action on `X∨` and `λ` in the coroot lattice. The
//! three level-`n` actions on coweights are
//!
//! ```text
//!   (w t_λ) ·_n μ = w(μ - nλ)
//!   (w t_λ) □_n μ = w(μ + nλ)
//!   (w t_λ) •_n μ = w(μ + ρ∨ + nλ) - ρ∨
//! ```
//!
//! Lengths come from the Iwahori-Matsumoto closed form
//! `ℓ(w t_λ) = Σ_{β>0, wβ>0} |<λ,β>| + Σ_{β>0, wβ<0} |<λ,β>+1|`,
//! pinned against a breadth-first word-length oracle in the test suite.
//! Bruhat order uses the lifting property; the subword characterization is
//! kept as a test oracle.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::matrix::{solve_integer, IntMat};
use crate::rootdata::RootDatum;
use crate::{Error, Result};

#[cfg(test)]
use std::collections::HashMap;

/// Which level-`n` action of `W_aff` on `X∨` to apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ActionMode {
    /// `(w t_λ) ·_n μ = w(μ - nλ)` (Bruhat-Tits sign conventions).
    Cdot,
    /// `(w t_λ) □_n μ = w(μ + nλ)` (indexes fixed-point components).
    Box,
    /// The `ρ∨`-shifted dot action governing linkage.
    Dot,
}

/// An element `w · t_λ` of the affine Weyl group.
#[derive(Clone, Debug)]
pub struct AffineWeylElt {
    mat: IntMat,
    inv: IntMat,
    trans: Vec<i64>,
    len: u32,
    fp: u64,
}

impl AffineWeylElt {
    pub fn length(&self) -> u32 {
        self.len
    }

    pub fn translation_part(&self) -> &[i64] {
        &self.trans
    }

    pub fn finite_part(&self) -> &IntMat {
        &self.mat
    }

    pub fn is_identity(&self) -> bool {
        self.len == 0
    }

    pub fn is_translation(&self) -> bool {
        self.mat == IntMat::identity(self.trans.len())
    }
}

impl PartialEq for AffineWeylElt {
    fn eq(&self, other: &Self) -> bool {
        self.fp == other.fp && self.trans == other.trans && self.mat == other.mat
    }
}

impl Eq for AffineWeylElt {}

impl Hash for AffineWeylElt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fp.hash(state);
        self.trans.hash(state);
        self.mat.hash(state);
    }
}

impl PartialOrd for AffineWeylElt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deterministic total order: by length, then translation, then matrix.
impl Ord for AffineWeylElt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fp, self.len, &self.trans, &self.mat).cmp(&(
            other.fp,
            other.len,
            &other.trans,
            &other.mat,
        ))
    }
}

/// The affine Weyl group of a root datum, with its simple reflections
/// `S_aff = S_f ∪ {t_{β∨} s_β : β a maximal root}` (finite generators first,
/// in simple-root order; affine generators after, in component order).
pub struct WaffGroup {
    datum: Arc<RootDatum>,
    gens: Vec<AffineWeylElt>,
    num_finite: usize,
    pos_root_set: HashSet<Vec<i64>>,
}

impl WaffGroup {
    pub fn new(datum: Arc<RootDatum>) -> Result<Arc<WaffGroup>> {
        if datum.num_simple() == 0 {
            return Err(Error::Validation(
                "affine Weyl group requires at least one simple root".into(),
            ));
        }
        let rank = datum.rank();
        let fp = datum.fingerprint();
        let pos_root_set: HashSet<Vec<i64>> = datum.positive_roots().iter().cloned().collect();

        let mut group = WaffGroup {
            datum: datum.clone(),
            gens: Vec::new(),
            num_finite: datum.num_simple(),
            pos_root_set,
        };

        let mut gens = Vec::new();
        for i in 0..datum.num_simple() {
            let mat = reflection_mat(rank, &datum.simple_roots()[i], &datum.simple_coroots()[i]);
            gens.push(group.mk(mat.clone(), mat, vec![0; rank], fp));
        }
        for comp in datum.components() {
            let beta_idx = comp.highest_root;
            let beta = &datum.positive_roots()[beta_idx];
            let beta_v = &datum.positive_coroots()[beta_idx];
            let mat = reflection_mat(rank, beta, beta_v);
            let trans: Vec<i64> = beta_v.iter().map(|&c| -c).collect();
            gens.push(group.mk(mat.clone(), mat, trans, fp));
        }
        group.gens = gens;
        Ok(Arc::new(group))
    }

    fn mk(&self, mat: IntMat, inv: IntMat, trans: Vec<i64>, fp: u64) -> AffineWeylElt {
        let len = self.im_length(&mat, &inv, &trans);
        AffineWeylElt { mat, inv, trans, len, fp }
    }

    fn im_length(&self, _mat: &IntMat, inv: &IntMat, trans: &[i64]) -> u32 {
        let mut total: i64 = 0;
        for beta in self.datum.positive_roots() {
            let w_beta = inv.apply_transpose(beta);
            let p = dot(trans, beta);
            if self.pos_root_set.contains(&w_beta) {
                total += p.abs();
            } else {
                total += (p + 1).abs();
            }
        }
        total as u32
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn identity(&self) -> AffineWeylElt {
        let rank = self.datum.rank();
        let id = IntMat::identity(rank);
        self.mk(id.clone(), id, vec![0; rank], self.datum.fingerprint())
    }

    /// All simple reflections, finite then affine.
    pub fn generators(&self) -> &[AffineWeylElt] {
        &self.gens
    }

    pub fn num_finite_generators(&self) -> usize {
        self.num_finite
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    /// Group law `(w t_λ)(w' t_μ) = ww' t_{w'^{-1}(λ) + μ}`.
    pub fn multiply(&self, x: &AffineWeylElt, y: &AffineWeylElt) -> AffineWeylElt {
        assert_eq!(x.fp, y.fp, "affine Weyl elements from different root data");
        let mat = x.mat.mul(&y.mat);
        let inv = y.inv.mul(&x.inv);
        let mut trans = y.inv.apply(&x.trans);
        for (t, &m) in trans.iter_mut().zip(&y.trans) {
            *t += m;
        }
        self.mk(mat, inv, trans, x.fp)
    }

    pub fn inverse(&self, x: &AffineWeylElt) -> AffineWeylElt {
        let trans: Vec<i64> = x.mat.apply(&x.trans).iter().map(|&c| -c).collect();
        self.mk(x.inv.clone(), x.mat.clone(), trans, x.fp)
    }

    /// The translation `t_λ`; errors when `λ` is outside the coroot lattice.
    pub fn translation(&self, lambda: &[i64]) -> Result<AffineWeylElt> {
        if solve_integer(self.datum.simple_coroots(), lambda).is_none() {
            return Err(Error::Validation(
                "translation vector is not in the coroot lattice".into(),
            ));
        }
        let id = IntMat::identity(self.datum.rank());
        Ok(self.mk(id.clone(), id, lambda.to_vec(), self.datum.fingerprint()))
    }

    /// The affine reflection `s_{α+mħ} = t_{mα∨} s_α` for the `idx`-th
    /// positive root.
    pub fn reflection(&self, pos_root_index: usize, m: i64) -> AffineWeylElt {
        let alpha = &self.datum.positive_roots()[pos_root_index];
        let alpha_v = &self.datum.positive_coroots()[pos_root_index];
        let mat = reflection_mat(self.datum.rank(), alpha, alpha_v);
        let trans: Vec<i64> = alpha_v.iter().map(|&c| -m * c).collect();
        self.mk(mat.clone(), mat, trans, self.datum.fingerprint())
    }

    /// `(w t_λ)^* = w t_{-λ}`, i.e. `(t_λ v)^* = t_{-λ} v`.
    pub fn star(&self, x: &AffineWeylElt) -> AffineWeylElt {
        let trans: Vec<i64> = x.trans.iter().map(|&c| -c).collect();
        self.mk(x.mat.clone(), x.inv.clone(), trans, x.fp)
    }

    /// Applies `x` to the coweight `μ` at level `n` in the given mode.
    pub fn act(&self, x: &AffineWeylElt, mu: &[i64], n: i64, mode: ActionMode) -> Vec<i64> {
        match mode {
            ActionMode::Cdot => {
                let v: Vec<i64> = mu.iter().zip(&x.trans).map(|(&m, &t)| m - n * t).collect();
                x.mat.apply(&v)
            }
            ActionMode::Box => {
                let v: Vec<i64> = mu.iter().zip(&x.trans).map(|(&m, &t)| m + n * t).collect();
                x.mat.apply(&v)
            }
            ActionMode::Dot => {
                // Doubled so that half-integral ρ∨ stays exact.
                let rho2 = self.datum.rho_check_doubled();
                let v: Vec<i64> = (0..mu.len())
                    .map(|i| 2 * mu[i] + rho2[i] + 2 * n * x.trans[i])
                    .collect();
                let w = x.mat.apply(&v);
                w.iter()
                    .zip(rho2)
                    .map(|(&c, &r)| {
                        let d = c - r;
                        debug_assert_eq!(d % 2, 0, "dot action left the coweight lattice");
                        d / 2
                    })
                    .collect()
            }
        }
    }

    /// Right descent test `ℓ(x s) < ℓ(x)`.
    pub fn has_right_descent(&self, x: &AffineWeylElt, gen: usize) -> bool {
        self.multiply(x, &self.gens[gen]).len < x.len
    }

    pub fn has_left_descent(&self, x: &AffineWeylElt, gen: usize) -> bool {
        self.multiply(&self.gens[gen], x).len < x.len
    }

    pub fn first_right_descent(&self, x: &AffineWeylElt) -> Option<usize> {
        (0..self.gens.len()).find(|&i| self.has_right_descent(x, i))
    }

    /// Bruhat order by the lifting property.
    pub fn bruhat_leq(&self, x: &AffineWeylElt, y: &AffineWeylElt) -> bool {
        if x.len > y.len {
            return false;
        }
        if x.len == y.len {
            return x == y;
        }
        let s = self
            .first_right_descent(y)
            .expect("nonidentity element must have a right descent");
        let ys = self.multiply(y, &self.gens[s]);
        let xs = self.multiply(x, &self.gens[s]);
        if xs.len < x.len {
            self.bruhat_leq(&xs, &ys)
        } else {
            self.bruhat_leq(x, &ys)
        }
    }

    /// Membership in `ᶠW_aff`: no left descent at a finite generator.
    pub fn is_min_in_wf(&self, x: &AffineWeylElt) -> bool {
        (0..self.num_finite).all(|i| !self.has_left_descent(x, i))
    }

    /// All of `ᶠW_aff` up to the given length, sorted canonically.
    pub fn enumerate_fw(&self, max_len: u32) -> Vec<AffineWeylElt> {
        let mut seen: HashSet<AffineWeylElt> = HashSet::new();
        let mut queue = VecDeque::from([self.identity()]);
        seen.insert(self.identity());
        while let Some(x) = queue.pop_front() {
            if x.len == max_len {
                continue;
            }
            for s in &self.gens {
                let y = self.multiply(&x, s);
                if y.len > x.len && y.len <= max_len && self.is_min_in_wf(&y) && seen.insert(y.clone())
                {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<AffineWeylElt> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// All elements up to the given length, sorted canonically.
    pub fn enumerate_ball(&self, max_len: u32) -> Vec<AffineWeylElt> {
        let mut seen: HashSet<AffineWeylElt> = HashSet::new();
        let mut queue = VecDeque::from([self.identity()]);
        seen.insert(self.identity());
        while let Some(x) = queue.pop_front() {
            if x.len == max_len {
                continue;
            }
            for s in &self.gens {
                let y = self.multiply(&x, s);
                if y.len <= max_len && seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<AffineWeylElt> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// The longest element of the coset `x W_I`; errors when `W_I` is
    /// infinite. `I` is a set of generator indices.
    pub fn max_in_coset(&self, x: &AffineWeylElt, i_set: &[usize]) -> Result<AffineWeylElt> {
        let cap = self.datum.positive_roots().len() as u32 + 1;
        let mut cur = x.clone();
        let mut steps = 0u32;
        loop {
            let Some(&s) = i_set.iter().find(|&&s| !self.has_right_descent(&cur, s)) else {
                return Ok(cur);
            };
            cur = self.multiply(&cur, &self.gens[s]);
            steps += 1;
            if steps > cap {
                return Err(Error::Validation(
                    "parabolic subgroup is infinite; coset has no longest element".into(),
                ));
            }
        }
    }

    /// Order of the subgroup generated by the given elements, with a cap to
    /// flag infinite (or unreasonably large) subgroups.
    pub fn subgroup_order(&self, gens: &[AffineWeylElt], cap: usize) -> Result<u64> {
        let mut seen: HashSet<AffineWeylElt> = HashSet::from([self.identity()]);
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.multiply(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
            if seen.len() > cap {
                return Err(Error::Validation(
                    "subgroup enumeration exceeded cap (infinite parabolic?)".into(),
                ));
            }
        }
        Ok(seen.len() as u64)
    }

    /// Canonical reduced word (greedy smallest left descent), as generator
    /// indices multiplied left to right.
    pub fn word(&self, x: &AffineWeylElt) -> Vec<usize> {
        let mut out = Vec::with_capacity(x.len as usize);
        let mut cur = x.clone();
        while cur.len > 0 {
            let i = (0..self.gens.len())
                .find(|&i| self.has_left_descent(&cur, i))
                .expect("nonidentity element must have a left descent");
            out.push(i);
            cur = self.multiply(&self.gens[i], &cur);
        }
        out
    }

    /// Parses a word (generator indices, left-to-right product order).
    pub fn from_word(&self, word: &[usize]) -> Result<AffineWeylElt> {
        let mut cur = self.identity();
        for &i in word {
            let s = self.gens.get(i).ok_or_else(|| {
                Error::Validation(format!(
                    "generator index {i} out of range (have {})",
                    self.gens.len()
                ))
            })?;
            cur = self.multiply(&cur, s);
        }
        Ok(cur)
    }
}

fn reflection_mat(rank: usize, alpha: &[i64], alpha_v: &[i64]) -> IntMat {
    let rows: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| (if i == j { 1 } else { 0 }) - alpha_v[i] * alpha[j])
                .collect()
        })
        .collect();
    IntMat::from_rows(&rows)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Breadth-first word-length oracle over `S_aff`.
    pub fn bfs_lengths(group: &WaffGroup, max_len: u32) -> HashMap<AffineWeylElt, u32> {
        let mut dist: HashMap<AffineWeylElt, u32> = HashMap::new();
        dist.insert(group.identity(), 0);
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == max_len {
                continue;
            }
            for s in group.generators() {
                let y = group.multiply(&x, s);
                if !dist.contains_key(&y) {
                    dist.insert(y.clone(), d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Subword oracle for the Bruhat order: `x <= y` iff `x` is a product of
    /// a subsequence of a fixed reduced expression of `y` (the products of
    /// all subsequences form exactly the ideal below `y`, by the deletion
    /// property).
    pub fn subword_leq(group: &WaffGroup, x: &AffineWeylElt, y: &AffineWeylElt) -> bool {
        let mut set: HashSet<AffineWeylElt> = HashSet::from([group.identity()]);
        for &s in &group.word(y) {
            let gen = &group.generators()[s];
            let extended: Vec<AffineWeylElt> = set.iter().map(|z| group.multiply(z, gen)).collect();
            set.extend(extended);
        }
        set.contains(x)
    }
}
